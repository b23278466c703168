use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::emit::{Cell, FieldMap, Record};
use crate::discrimination::{idp_limit_eta, overall_success_approx, overall_success_exact};
use crate::error_analysis::{
    expected_mean_betas, mc_average_beta, DeviationSampling, McParams, McSummary,
};
use crate::weak_measurement::{make_state_pair, pointer_states_analytic, postselection_probs};

/// One sweep point. Outputs that could not be computed are `None` and named
/// in `status`, which is otherwise `ok`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub index: u64,
    pub eta_re: f64,
    pub eta_im: f64,
    pub g: f64,
    pub eps: f64,
    pub delta_n_mag: f64,
    pub delta_f_mag: f64,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub pointer_overlap: Option<f64>,
    pub p_exact: Option<f64>,
    pub p_approx: Option<f64>,
    pub p_idp: Option<f64>,
    pub mean_beta_a: Option<f64>,
    pub mean_beta_b: Option<f64>,
    pub std_error_a: Option<f64>,
    pub std_error_b: Option<f64>,
    pub status: String,
}

impl ResultRow {
    pub fn is_complete(&self) -> bool {
        self.status == "ok"
    }
}

fn mc_params(cfg: &ExperimentConfig) -> McParams {
    McParams {
        eps: cfg.eps,
        g: cfg.g,
        delta_f_mag: cfg.delta_f_mag,
        samples: cfg.samples,
        seed: cfg.seed,
        sampling: DeviationSampling::from(cfg.delta_f_mode),
    }
}

pub fn compute_row(index: u64, cfg: &ExperimentConfig) -> ResultRow {
    let eta = cfg.eta_complex();
    let mut skipped: Vec<String> = Vec::new();
    let mut keep = |fields: &str, r: crate::Result<()>| {
        if let Err(e) = r {
            skipped.push(format!("{fields}: {e}"));
        }
    };

    let (lambda1, lambda2) = postselection_probs(eta, cfg.g);
    let mut pointer_overlap = None;
    keep(
        "pointer_overlap",
        pointer_states_analytic(eta, cfg.g).map(|p| pointer_overlap = Some(p.overlap())),
    );
    let mut p_approx = None;
    keep(
        "p_approx",
        overall_success_approx(eta, cfg.g).map(|p| p_approx = Some(p)),
    );
    let mut mc: Option<McSummary> = None;
    keep(
        "mean_beta_a, mean_beta_b, std_error_a, std_error_b",
        mc_average_beta(&mc_params(cfg)).map(|s| mc = Some(s)),
    );

    ResultRow {
        index,
        eta_re: cfg.eta[0],
        eta_im: cfg.eta[1],
        g: cfg.g,
        eps: cfg.eps,
        delta_n_mag: cfg.delta_n_mag,
        delta_f_mag: cfg.delta_f_mag,
        lambda1: Some(lambda1),
        lambda2: Some(lambda2),
        pointer_overlap,
        p_exact: Some(overall_success_exact(eta, cfg.g)),
        p_approx,
        p_idp: Some(idp_limit_eta(eta)),
        mean_beta_a: mc.map(|s| s.mean_beta_a),
        mean_beta_b: mc.map(|s| s.mean_beta_b),
        std_error_a: mc.map(|s| s.std_error_a),
        std_error_b: mc.map(|s| s.std_error_b),
        status: if skipped.is_empty() {
            "ok".into()
        } else {
            format!("skipped: {}", skipped.join("; "))
        },
    }
}

/// One row per sweep point, in sweep order, independent of thread count.
pub fn run_sweep(cfg: &ExperimentConfig) -> Vec<ResultRow> {
    let points = cfg.points();
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| compute_row(i as u64, p))
        .collect()
}

impl Record for ResultRow {
    const COLUMNS: &'static [&'static str] = &[
        "index",
        "eta_re",
        "eta_im",
        "g",
        "eps",
        "delta_n_mag",
        "delta_f_mag",
        "lambda1",
        "lambda2",
        "pointer_overlap",
        "p_exact",
        "p_approx",
        "p_idp",
        "mean_beta_a",
        "mean_beta_b",
        "std_error_a",
        "std_error_b",
        "status",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.index),
            Cell::Real(self.eta_re),
            Cell::Real(self.eta_im),
            Cell::Real(self.g),
            Cell::Real(self.eps),
            Cell::Real(self.delta_n_mag),
            Cell::Real(self.delta_f_mag),
            self.lambda1.into(),
            self.lambda2.into(),
            self.pointer_overlap.into(),
            self.p_exact.into(),
            self.p_approx.into(),
            self.p_idp.into(),
            self.mean_beta_a.into(),
            self.mean_beta_b.into(),
            self.std_error_a.into(),
            self.std_error_b.into(),
            Cell::Text(self.status.clone()),
        ]
    }

    fn from_fields(f: &FieldMap) -> Result<Self, String> {
        Ok(ResultRow {
            index: f.int("index")?,
            eta_re: f.real("eta_re")?,
            eta_im: f.real("eta_im")?,
            g: f.real("g")?,
            eps: f.real("eps")?,
            delta_n_mag: f.real("delta_n_mag")?,
            delta_f_mag: f.real("delta_f_mag")?,
            lambda1: f.opt_real("lambda1")?,
            lambda2: f.opt_real("lambda2")?,
            pointer_overlap: f.opt_real("pointer_overlap")?,
            p_exact: f.opt_real("p_exact")?,
            p_approx: f.opt_real("p_approx")?,
            p_idp: f.opt_real("p_idp")?,
            mean_beta_a: f.opt_real("mean_beta_a")?,
            mean_beta_b: f.opt_real("mean_beta_b")?,
            std_error_a: f.opt_real("std_error_a")?,
            std_error_b: f.opt_real("std_error_b")?,
            status: f.text("status")?,
        })
    }
}

/// Single-point Monte Carlo result, with the closed-form expectations.
#[derive(Debug, Clone, PartialEq)]
pub struct McRow {
    pub eps: f64,
    pub g: f64,
    pub delta_f_mag: f64,
    pub samples: u64,
    pub seed: u64,
    pub delta_f_mode: String,
    pub summary: McSummary,
    pub expected_beta_a: f64,
    pub expected_beta_b: f64,
}

pub fn mc_row(cfg: &ExperimentConfig) -> crate::Result<McRow> {
    let summary = mc_average_beta(&mc_params(cfg))?;
    let (expected_beta_a, expected_beta_b) = expected_mean_betas(cfg.eps, cfg.g, cfg.delta_f_mag);
    let mode = serde_json::to_value(cfg.delta_f_mode).expect("enum");
    Ok(McRow {
        eps: cfg.eps,
        g: cfg.g,
        delta_f_mag: cfg.delta_f_mag,
        samples: cfg.samples as u64,
        seed: cfg.seed,
        delta_f_mode: mode.as_str().unwrap_or_default().to_string(),
        summary,
        expected_beta_a,
        expected_beta_b,
    })
}

impl Record for McRow {
    const COLUMNS: &'static [&'static str] = &[
        "eps",
        "g",
        "delta_f_mag",
        "samples",
        "seed",
        "delta_f_mode",
        "mean_beta_a",
        "mean_beta_b",
        "std_error_a",
        "std_error_b",
        "mean_trace_beta_a",
        "mean_trace_beta_b",
        "std_error_trace_a",
        "std_error_trace_b",
        "expected_beta_a",
        "expected_beta_b",
    ];

    fn cells(&self) -> Vec<Cell> {
        let s = &self.summary;
        vec![
            Cell::Real(self.eps),
            Cell::Real(self.g),
            Cell::Real(self.delta_f_mag),
            Cell::Int(self.samples),
            Cell::Int(self.seed),
            Cell::Text(self.delta_f_mode.clone()),
            Cell::Real(s.mean_beta_a),
            Cell::Real(s.mean_beta_b),
            Cell::Real(s.std_error_a),
            Cell::Real(s.std_error_b),
            Cell::Real(s.mean_trace_beta_a),
            Cell::Real(s.mean_trace_beta_b),
            Cell::Real(s.std_error_trace_a),
            Cell::Real(s.std_error_trace_b),
            Cell::Real(self.expected_beta_a),
            Cell::Real(self.expected_beta_b),
        ]
    }

    fn from_fields(f: &FieldMap) -> Result<Self, String> {
        let samples = f.int("samples")?;
        let seed = f.int("seed")?;
        Ok(McRow {
            eps: f.real("eps")?,
            g: f.real("g")?,
            delta_f_mag: f.real("delta_f_mag")?,
            samples,
            seed,
            delta_f_mode: f.text("delta_f_mode")?,
            summary: McSummary {
                mean_beta_a: f.real("mean_beta_a")?,
                mean_beta_b: f.real("mean_beta_b")?,
                std_error_a: f.real("std_error_a")?,
                std_error_b: f.real("std_error_b")?,
                mean_trace_beta_a: f.real("mean_trace_beta_a")?,
                mean_trace_beta_b: f.real("mean_trace_beta_b")?,
                std_error_trace_a: f.real("std_error_trace_a")?,
                std_error_trace_b: f.real("std_error_trace_b")?,
                sample_count: samples as usize,
                seed,
            },
            expected_beta_a: f.real("expected_beta_a")?,
            expected_beta_b: f.real("expected_beta_b")?,
        })
    }
}

/// `|⟨ψ₁|ψ₂⟩|` and the IDP limit for one `η`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdpRow {
    pub eta_re: f64,
    pub eta_im: f64,
    pub overlap: f64,
    pub p_idp: f64,
}

/// One row per sweep point (only `η` matters).
pub fn run_idp(cfg: &ExperimentConfig) -> crate::Result<Vec<IdpRow>> {
    cfg.points()
        .iter()
        .map(|p| {
            let eta = p.eta_complex();
            Ok(IdpRow {
                eta_re: p.eta[0],
                eta_im: p.eta[1],
                overlap: make_state_pair(eta)?.overlap(),
                p_idp: idp_limit_eta(eta),
            })
        })
        .collect()
}

impl Record for IdpRow {
    const COLUMNS: &'static [&'static str] = &["eta_re", "eta_im", "overlap", "p_idp"];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Real(self.eta_re),
            Cell::Real(self.eta_im),
            Cell::Real(self.overlap),
            Cell::Real(self.p_idp),
        ]
    }

    fn from_fields(f: &FieldMap) -> Result<Self, String> {
        Ok(IdpRow {
            eta_re: f.real("eta_re")?,
            eta_im: f.real("eta_im")?,
            overlap: f.real("overlap")?,
            p_idp: f.real("p_idp")?,
        })
    }
}
