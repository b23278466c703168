//! Self-verification suite: the invariant checks of every module, run
//! against independent recomputations, with a pass/fail table.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::config::{ExperimentConfig, Spacing, SweepAxis, SweepParam};
use super::emit::{emit, Format, Metadata, ParsedTable};
use super::sweep::{run_sweep, ResultRow};
use crate::discrimination::{
    discriminate, idp_limit_eta, optimal_unambiguous_povm, overall_success_exact,
    povm_conventional, povm_weak, PovmSet, PovmWarning,
};
use crate::error_analysis::{
    beta_a_formula, beta_b_formula, beta_ratio, expected_mean_betas, first_order_pointer_states,
    mc_average_beta, source_states, DeviationSampling, McParams,
};
use crate::qubit_algebra::{
    bloch_to_density, density_to_bloch, partial_trace_a, tensor, BlochVector, Complex2x2,
    QubitState,
};
use crate::weak_measurement::{
    bloch_update_coeffs, coupling_unitary, evolve, evolve_postselect, exact_pointer_bloch,
    exact_pointer_overlap, make_state_pair, pointer_states_analytic, postselection_probs,
    protocol_outcomes, CouplingSpec, PostselectionSpec,
};
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Module {
    QubitAlgebra,
    WeakMeasurement,
    Discrimination,
    ErrorAnalysis,
    HarnessCli,
}

impl Module {
    pub const ALL: [Module; 5] = [
        Module::QubitAlgebra,
        Module::WeakMeasurement,
        Module::Discrimination,
        Module::ErrorAnalysis,
        Module::HarnessCli,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Module::QubitAlgebra => "qubit_algebra",
            Module::WeakMeasurement => "weak_measurement",
            Module::Discrimination => "discrimination",
            Module::ErrorAnalysis => "error_analysis",
            Module::HarnessCli => "harness_cli",
        }
    }
}

/// Deliberate defects, used to show that the suite catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Reconstructs the pointer with `c₂ = (α₂ + α₃(n·k_B))/D`, i.e. without
    /// the factor 2 on the reflection term.
    SingleReflectionTerm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Roughly a tenth of the sample counts.
    pub quick: bool,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            quick: false,
            seed: 20_240_601,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub module: Module,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render_table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{}  {:<16}  {:<width$}  {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.module.label(),
                c.name,
                c.detail,
            ));
        }
        let failed = self.failed().count();
        out.push_str(&format!(
            "{} checks, {} failed\n",
            self.checks.len(),
            failed
        ));
        out
    }
}

type Outcome = Result<String, String>;

struct Ctx {
    quick: bool,
    seed: u64,
    fault: Option<Fault>,
}

impl Ctx {
    fn n(&self, full: usize) -> usize {
        if self.quick {
            (full / 10).max(10)
        } else {
            full
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Passes when `worst ≤ tol`.
fn bound(what: &str, worst: f64, tol: f64) -> Outcome {
    let msg = format!("{what} = {worst:.3e} (tol {tol:.1e})");
    if worst <= tol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn unit(rng: &mut ChaCha8Rng) -> BlochVector {
    loop {
        let v = BlochVector::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if let Some(u) = v.normalized() {
            return u;
        }
    }
}

fn ball(rng: &mut ChaCha8Rng) -> BlochVector {
    unit(rng) * rng.gen::<f64>().cbrt()
}

fn state(rng: &mut ChaCha8Rng) -> QubitState {
    bloch_to_density(ball(rng)).expect("inside the ball")
}

fn matrix(rng: &mut ChaCha8Rng) -> Complex2x2 {
    let mut c = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    Complex2x2([[c(), c()], [c(), c()]])
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    SweepAxis {
        param: SweepParam::Eta,
        start: lo,
        stop: hi,
        count: n,
        spacing: Spacing::Log,
    }
    .values()
}

fn lin_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    SweepAxis {
        param: SweepParam::G,
        start: lo,
        stop: hi,
        count: n,
        spacing: Spacing::Linear,
    }
    .values()
}

fn protocol_grid(ctx: &Ctx) -> Vec<(f64, f64)> {
    let n = if ctx.quick { 8 } else { 20 };
    let etas = log_grid(1e-3, 1.0, n);
    let gs = lin_grid(0.01, FRAC_PI_2, n);
    etas.iter()
        .flat_map(|&e| gs.iter().map(move |&g| (e, g)))
        .collect()
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

// qubit_algebra

fn bloch_round_trip(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.n(1000) {
        let v = ball(&mut rng);
        let back = density_to_bloch(&bloch_to_density(v).map_err(|e| e.to_string())?);
        worst = worst.max(back.distance(v));
    }
    bound("max |v - v'|", worst, 1e-12)
}

fn purity(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.n(1000) {
        let v = ball(&mut rng);
        let rho = bloch_to_density(v).map_err(|e| e.to_string())?;
        worst = worst.max((rho.purity() - 0.5 * (1.0 + v.dot(v))).abs());
    }
    bound("max purity error", worst, 1e-12)
}

fn tensor_products(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(3);
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.n(200) {
        let [a, b, c, d, a2] = [0; 5].map(|_| matrix(&mut rng));
        let lhs = tensor(&a, &b) * tensor(&c, &d);
        worst = worst.max(lhs.max_abs_diff(&tensor(&(a * c), &(b * d))));
        let k = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let lin = tensor(&(a + a2.scale(k)), &b);
        worst = worst.max(lin.max_abs_diff(&(tensor(&a, &b) + tensor(&a2, &b).scale(k))));
        let lin = tensor(&a, &(b + a2.scale(k)));
        worst = worst.max(lin.max_abs_diff(&(tensor(&a, &b) + tensor(&a, &a2).scale(k))));
    }
    bound("max mixed-product / bilinearity error", worst, 1e-12)
}

fn partial_trace(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.n(200) {
        let x = matrix(&mut rng);
        let rho = state(&mut rng);
        let lhs = partial_trace_a(&tensor(&x, rho.matrix()));
        worst = worst.max(lhs.max_abs_diff(&rho.matrix().scale(x.trace())));
    }
    bound("max |Tr_A(X⊗ρ) - Tr(X)ρ|", worst, 1e-12)
}

// weak_measurement

fn postselection_probabilities(ctx: &Ctx) -> Outcome {
    let mut worst: f64 = 0.0;
    for (eta, g) in protocol_grid(ctx) {
        let (l1, l2) = postselection_probs(re(eta), g);
        let (o1, o2) = protocol_outcomes(re(eta), g).map_err(|e| e.to_string())?;
        let (o1, o2) = (
            o1.map_err(|e| e.to_string())?,
            o2.map_err(|e| e.to_string())?,
        );
        worst = worst
            .max((o1.success_prob - l2).abs())
            .max((o2.success_prob - l1).abs());
    }
    bound("max |p - λ|", worst, 1e-12)
}

fn pointer_overlap(ctx: &Ctx) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut points = protocol_grid(ctx);
    points.extend([(0.3, 0.7), (1.0, 2.0)]);
    for (eta, g) in points {
        for eta in [re(eta), Complex64::from_polar(eta, 1.1)] {
            let analytic = pointer_states_analytic(eta, g)
                .map_err(|e| e.to_string())?
                .overlap();
            let exact = exact_pointer_overlap(eta, g).map_err(|e| e.to_string())?;
            worst = worst.max((analytic - exact).abs());
        }
    }
    bound("max overlap difference", worst, 1e-12)
}

fn probability_conservation(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(7);
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.n(500) {
        let (ra, rb) = (state(&mut rng), state(&mut rng));
        let u = coupling_unitary(
            &CouplingSpec::new(rng.gen_range(0.0..PI), unit(&mut rng))
                .map_err(|e| e.to_string())?,
        );
        let f = PostselectionSpec::new(unit(&mut rng)).map_err(|e| e.to_string())?;
        let (Ok(yes), Ok(no)) = (
            evolve_postselect(&ra, &rb, &u, &f),
            evolve_postselect(&ra, &rb, &u, &f.complement()),
        ) else {
            continue;
        };
        worst = worst.max((yes.success_prob + no.success_prob - 1.0).abs());
        let mixture = *yes.pointer_state.matrix() * yes.success_prob
            + *no.pointer_state.matrix() * no.success_prob;
        let unconditioned = partial_trace_a(&evolve(&ra, &rb, &u));
        worst = worst.max(mixture.max_abs_diff(&unconditioned));
    }
    bound("max conservation / mixture error", worst, 1e-12)
}

fn update_reconstruction(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(8);
    let mut worst: f64 = 0.0;
    let mut used = 0;
    while used < ctx.n(1000) {
        let (k_a, k_b, f, n) = (
            ball(&mut rng),
            ball(&mut rng),
            unit(&mut rng),
            unit(&mut rng),
        );
        let g = rng.gen_range(0.0..PI);
        let Ok(coeffs) = bloch_update_coeffs(k_a, k_b, f, n, g) else {
            continue;
        };
        if coeffs.denominator < 1e-6 {
            continue;
        }
        let mut predicted = coeffs.pointer_bloch(k_b, n);
        if ctx.fault == Some(Fault::SingleReflectionTerm) {
            let c2 = (coeffs.alpha2 + coeffs.alpha3 * n.dot(k_b)) / coeffs.denominator;
            predicted = k_b * coeffs.c1 + n * c2 + n.cross(k_b) * coeffs.c3;
        }
        let exact = exact_pointer_bloch(k_a, k_b, f, n, g).map_err(|e| e.to_string())?;
        worst = worst.max(predicted.distance(exact.pointer_state.bloch()));
        worst = worst.max((coeffs.success_probability() - exact.success_prob).abs());
        used += 1;
    }
    bound("max Bloch / probability error", worst, 1e-10)
}

fn amplification(_: &Ctx) -> Outcome {
    let mut least = f64::INFINITY;
    for eta in [1e-4, 1e-3, 1e-2] {
        for g in [0.1, 0.2, 0.3] {
            let pair = make_state_pair(re(eta)).map_err(|e| e.to_string())?;
            let ps = pointer_states_analytic(re(eta), g).map_err(|e| e.to_string())?;
            let gain = ps.phi1.bloch().distance(ps.phi2.bloch())
                / pair.psi1.bloch().distance(pair.psi2.bloch());
            least = least.min(gain);
        }
    }
    let msg = format!("min pointer/source distance ratio = {least:.4}");
    if least > 1.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// discrimination

fn idp_bound(ctx: &Ctx) -> Outcome {
    let n = if ctx.quick { 12 } else { 40 };
    let mut worst = f64::NEG_INFINITY;
    for eta in log_grid(1e-4, 0.5, n) {
        for g in lin_grid(0.0, PI, n + 2).into_iter().skip(1).take(n) {
            worst = worst.max(overall_success_exact(re(eta), g) - idp_limit_eta(re(eta)));
        }
    }
    bound("max p_exact - p_idp", worst, 1e-12)
}

fn weak_coupling_limit(_: &Ctx) -> Outcome {
    let ratio = overall_success_exact(re(1e-3), 0.01) / idp_limit_eta(re(1e-3));
    let msg = format!("p_exact/p_idp at eta=1e-3, g=0.01 is {ratio:.8}");
    if ratio >= 0.99 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn half_maximum(_: &Ctx) -> Outcome {
    let mut worst: f64 = 0.0;
    for eta in [1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0] {
        worst = worst
            .max((overall_success_exact(re(eta), FRAC_PI_4) - 0.5 * idp_limit_eta(re(eta))).abs());
    }
    bound("max |p(pi/4) - p_idp/2|", worst, 1e-12)
}

fn povm_is_valid(set: &PovmSet) -> f64 {
    let [p1, p2, pq] = set.elements();
    let sum = (*p1 + *p2 + *pq).max_abs_diff(&Complex2x2::identity());
    let negativity = set
        .elements()
        .iter()
        .map(|m| -m.hermitian_eigenvalues()[0])
        .fold(0.0, f64::max);
    sum.max(negativity)
}

fn povm_sets(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(13);
    let mut worst: f64 = 0.0;
    for eps in [1e-4, 1e-3, 1e-2] {
        for g in [0.05, 0.1, 0.2] {
            for _ in 0..ctx.n(50) {
                let theta = rng.gen_range(0.0..TAU);
                let d = BlochVector::new(theta.cos(), theta.sin(), 0.0) * rng.gen_range(0.0..1e-2);
                for set in [povm_conventional(eps, d), povm_weak(eps, g, d)] {
                    let set = set.map_err(|e| e.to_string())?;
                    let [p1, p2, _] = set.elements();
                    let sum = (*p1 + *p2 + *set.pi_q()).max_abs_diff(&Complex2x2::identity());
                    let negativity =
                        -p1.hermitian_eigenvalues()[0].min(p2.hermitian_eigenvalues()[0]);
                    worst = worst.max(sum).max(negativity);
                }
            }
            for set in [
                povm_conventional(eps, BlochVector::ZERO),
                povm_weak(eps, g, BlochVector::ZERO),
            ] {
                worst = worst.max(povm_is_valid(&set.map_err(|e| e.to_string())?));
            }
        }
    }
    for eta in [1e-3, 0.1, 0.5, 1.0] {
        let pair = make_state_pair(re(eta)).map_err(|e| e.to_string())?;
        let (r1, r2) = (pair.psi1.density(), pair.psi2.density());
        let set = optimal_unambiguous_povm(&r1, &r2).map_err(|e| e.to_string())?;
        if set
            .warnings()
            .iter()
            .any(|w| matches!(w, PovmWarning::NegativeInconclusive { .. }))
        {
            return Err(format!(
                "optimal POVM at eta={eta} has a negative inconclusive element"
            ));
        }
        let report = discriminate(&r1, &r2, &set);
        worst = worst
            .max(povm_is_valid(&set))
            .max(report.p_error)
            .max((report.p_success - idp_limit_eta(re(eta))).abs());
    }
    bound("max completeness / positivity violation", worst, 1e-12)
}

fn unambiguity(_: &Ctx) -> Outcome {
    let mut worst: f64 = 0.0;
    for eps in [1e-3, 1e-2] {
        let (a1, a2) = source_states(eps).map_err(|e| e.to_string())?;
        let set = povm_conventional(eps, BlochVector::ZERO).map_err(|e| e.to_string())?;
        let c = discriminate(&a1, &a2, &set).conditional;
        worst = worst.max(c[0][1]).max(c[1][0]);
        for g in [0.05, 0.1] {
            let (b1, b2) = first_order_pointer_states(eps, g).map_err(|e| e.to_string())?;
            let set = povm_weak(eps, g, BlochVector::ZERO).map_err(|e| e.to_string())?;
            let c = discriminate(&b1, &b2, &set).conditional;
            worst = worst.max(c[0][1]).max(c[1][0]);
        }
    }
    bound("max cross probability", worst, 1e-12)
}

// error_analysis

fn mc_reference(ctx: &Ctx) -> McParams {
    McParams {
        eps: 1e-3,
        g: 0.05,
        delta_f_mag: 1e-3,
        samples: ctx.n(100_000),
        seed: ctx.seed,
        sampling: DeviationSampling::UniformAngle,
    }
}

fn mc_convergence(ctx: &Ctx) -> Outcome {
    let p = mc_reference(ctx);
    let s = mc_average_beta(&p).map_err(|e| e.to_string())?;
    let (ea, eb) = expected_mean_betas(p.eps, p.g, p.delta_f_mag);
    let za = (s.mean_beta_a - ea) / s.std_error_a;
    let zb = (s.mean_beta_b - eb) / s.std_error_b;
    let msg = format!(
        "<beta_A> = {:.5} (z {za:+.2}), <beta_B> = {:.3} (z {zb:+.2}), N = {}",
        s.mean_beta_a, s.mean_beta_b, s.sample_count
    );
    if za.abs() <= 4.0 && zb.abs() <= 4.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn beta_lower_bound(_: &Ctx) -> Outcome {
    let mut min_a = f64::INFINITY;
    let mut min_b = f64::INFINITY;
    for mag in [1e-4, 1e-3, 1e-2] {
        for k in 0..72 {
            let theta = TAU * k as f64 / 72.0;
            let d = BlochVector::new(theta.cos(), theta.sin(), 0.0) * mag;
            for j in 0..=200 {
                let s = mag * j as f64 / 200.0;
                min_a = min_a.min(beta_a_formula(s, d).map_err(|e| e.to_string())?.value());
                for g in [0.05, 0.1] {
                    let eps = s * g / 2.0;
                    min_b = min_b.min(
                        beta_b_formula(eps, g, d)
                            .map_err(|e| e.to_string())?
                            .value(),
                    );
                }
            }
        }
    }
    let worst = (min_a - 0.5).abs().max((min_b - 0.5).abs());
    bound(
        &format!("min beta_A = {min_a:.9}, min beta_B = {min_b:.9}; max |min - 1/2|"),
        worst,
        1e-6,
    )
}

fn mean_dominance(ctx: &Ctx) -> Outcome {
    for eps in [1e-4, 1e-3, 1e-2] {
        for g in [0.02, 0.05, 0.1, 0.2] {
            for mag in [1e-4, 1e-3, 1e-2] {
                let (a, b) = expected_mean_betas(eps, g, mag);
                if b < a {
                    return Err(format!(
                        "<beta_B> < <beta_A> at eps={eps}, g={g}, |delta_f|={mag}"
                    ));
                }
            }
        }
    }
    let s = mc_average_beta(&McParams {
        samples: ctx.n(20_000),
        ..mc_reference(ctx)
    })
    .map_err(|e| e.to_string())?;
    let msg = format!(
        "closed-form and sampled means: <beta_B> = {:.1} > <beta_A> = {:.3}",
        s.mean_beta_b, s.mean_beta_a
    );
    if s.mean_beta_b > s.mean_beta_a {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn mc_determinism(ctx: &Ctx) -> Outcome {
    let p = McParams {
        samples: ctx.n(20_000),
        sampling: DeviationSampling::Gaussian,
        ..mc_reference(ctx)
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?
            .install(|| mc_average_beta(&p).map_err(|e| e.to_string()))
    };
    let (one, four, default) = (
        run(1)?,
        run(4)?,
        mc_average_beta(&p).map_err(|e| e.to_string())?,
    );
    if one == four && one == default {
        Ok("bit-identical on 1, 4 and default worker counts".into())
    } else {
        Err("summaries differ between worker counts".into())
    }
}

fn closed_form_vs_trace(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(19);
    let mut worst: f64 = 0.0;
    let mut lowest = f64::INFINITY;
    for _ in 0..ctx.n(10_000) {
        let eps = 1e-2 * (1.0 - rng.gen::<f64>());
        let mag = rng.gen_range(1e-6..1e-2);
        let theta = rng.gen_range(0.0..TAU);
        let g = rng.gen_range(4.0 * eps..0.3);
        let d = BlochVector::new(theta.cos(), theta.sin(), 0.0) * mag;
        let a = 2.0 * eps / g;

        let (a1, a2) = source_states(eps).map_err(|e| e.to_string())?;
        let trace = beta_ratio(
            &a1,
            &a2,
            &povm_conventional(eps, d).map_err(|e| e.to_string())?,
        )
        .beta
        .value();
        let formula = beta_a_formula(eps, d).map_err(|e| e.to_string())?.value();
        worst = worst.max((formula - trace).abs() / trace / (10.0 * eps.max(mag).max(g * g)));
        lowest = lowest.min(formula);

        let (b1, b2) = first_order_pointer_states(eps, g).map_err(|e| e.to_string())?;
        let trace = beta_ratio(&b1, &b2, &povm_weak(eps, g, d).map_err(|e| e.to_string())?)
            .beta
            .value();
        let formula = beta_b_formula(eps, g, d)
            .map_err(|e| e.to_string())?
            .value();
        worst = worst.max((formula - trace).abs() / trace / (10.0 * a.max(mag).max(g * g)));
        lowest = lowest.min(formula);
    }
    if lowest < 0.5 - 1e-9 {
        return Err(format!("closed-form beta {lowest} below 1/2"));
    }
    bound("max relative error / tolerance", worst, 1.0)
}

// harness_cli

fn random_row(rng: &mut ChaCha8Rng, index: u64) -> ResultRow {
    let mut real = || loop {
        let x = f64::from_bits(rng.gen());
        if x.is_finite() {
            return x;
        }
    };
    let opt = |r: &mut dyn FnMut() -> f64, k: u64| match k % 4 {
        0 => None,
        1 => Some(f64::INFINITY),
        _ => Some(r()),
    };
    let kinds: [u64; 10] = std::array::from_fn(|i| index + i as u64 * 7);
    ResultRow {
        index,
        eta_re: real(),
        eta_im: real(),
        g: real(),
        eps: real(),
        delta_n_mag: real(),
        delta_f_mag: real(),
        lambda1: opt(&mut real, kinds[0]),
        lambda2: opt(&mut real, kinds[1]),
        pointer_overlap: opt(&mut real, kinds[2]),
        p_exact: opt(&mut real, kinds[3]),
        p_approx: opt(&mut real, kinds[4]),
        p_idp: opt(&mut real, kinds[5]),
        mean_beta_a: opt(&mut real, kinds[6]),
        mean_beta_b: opt(&mut real, kinds[7]),
        std_error_a: opt(&mut real, kinds[8]),
        std_error_b: opt(&mut real, kinds[9]),
        status: if index.is_multiple_of(3) {
            "ok".into()
        } else {
            "skipped: p_approx: reason, with comma".into()
        },
    }
}

fn rows_bit_equal(a: &ResultRow, b: &ResultRow) -> bool {
    use super::emit::Record;
    a.cells()
        .iter()
        .zip(b.cells().iter())
        .all(|(x, y)| match (x, y) {
            (super::emit::Cell::Real(p), super::emit::Cell::Real(q)) => p.to_bits() == q.to_bits(),
            _ => x == y,
        })
}

fn emit_round_trip(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(20);
    let rows: Vec<ResultRow> = (0..100).map(|i| random_row(&mut rng, i)).collect();
    let meta = Metadata::new("verify", ctx.seed);
    for format in [Format::Csv, Format::Jsonl] {
        let mut buf = Vec::new();
        emit(&mut buf, format, &meta, &rows).map_err(|e| e.to_string())?;
        let text = String::from_utf8(buf).map_err(|e| e.to_string())?;
        let table = ParsedTable::parse(&text, format)?;
        let back: Vec<ResultRow> = table.records()?;
        if table.metadata != meta || back.len() != rows.len() {
            return Err(format!("{format:?}: metadata or row count changed"));
        }
        if let Some(i) = (0..rows.len()).find(|&i| !rows_bit_equal(&rows[i], &back[i])) {
            return Err(format!("{format:?}: row {i} did not round-trip"));
        }
    }
    Ok("100 random rows bit-identical through csv and jsonl".into())
}

fn sweep_determinism(ctx: &Ctx) -> Outcome {
    let cfg = ExperimentConfig {
        eta: [1e-3, 0.0],
        g: 0.05,
        eps: 1e-3,
        delta_n_mag: 0.0,
        delta_f_mag: 1e-3,
        samples: ctx.n(2_000),
        seed: ctx.seed,
        sweep: Some(SweepAxis {
            param: SweepParam::G,
            start: 0.005,
            stop: FRAC_PI_2,
            count: 12,
            spacing: Spacing::Linear,
        }),
        delta_f_mode: Default::default(),
    };
    let render = |threads| -> Result<Vec<u8>, String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        let rows = pool.install(|| run_sweep(&cfg));
        if let Some(r) = rows
            .iter()
            .find(|r| !r.is_complete() && !r.status.starts_with("skipped: "))
        {
            return Err(format!(
                "row {} is neither complete nor marked skipped",
                r.index
            ));
        }
        let mut buf = Vec::new();
        emit(
            &mut buf,
            Format::Csv,
            &Metadata::new("sweep", cfg.seed),
            &rows,
        )
        .map_err(|e| e.to_string())?;
        Ok(buf)
    };
    if render(1)? == render(4)? {
        Ok("12-point sweep byte-identical on 1 and 4 workers".into())
    } else {
        Err("sweep output depends on worker count".into())
    }
}

type Check = (Module, &'static str, fn(&Ctx) -> Outcome);

const CHECKS: &[Check] = &[
    (Module::QubitAlgebra, "bloch_round_trip", bloch_round_trip),
    (Module::QubitAlgebra, "purity", purity),
    (Module::QubitAlgebra, "tensor_products", tensor_products),
    (Module::QubitAlgebra, "partial_trace", partial_trace),
    (
        Module::WeakMeasurement,
        "postselection_probabilities",
        postselection_probabilities,
    ),
    (Module::WeakMeasurement, "pointer_overlap", pointer_overlap),
    (
        Module::WeakMeasurement,
        "probability_conservation",
        probability_conservation,
    ),
    (
        Module::WeakMeasurement,
        "update_reconstruction",
        update_reconstruction,
    ),
    (Module::WeakMeasurement, "amplification", amplification),
    (Module::Discrimination, "idp_bound", idp_bound),
    (
        Module::Discrimination,
        "weak_coupling_limit",
        weak_coupling_limit,
    ),
    (Module::Discrimination, "half_maximum", half_maximum),
    (Module::Discrimination, "povm_sets", povm_sets),
    (Module::Discrimination, "unambiguity", unambiguity),
    (Module::ErrorAnalysis, "mc_convergence", mc_convergence),
    (Module::ErrorAnalysis, "beta_lower_bound", beta_lower_bound),
    (Module::ErrorAnalysis, "mean_dominance", mean_dominance),
    (Module::ErrorAnalysis, "mc_determinism", mc_determinism),
    (
        Module::ErrorAnalysis,
        "closed_form_vs_trace",
        closed_form_vs_trace,
    ),
    (Module::HarnessCli, "emit_round_trip", emit_round_trip),
    (Module::HarnessCli, "sweep_determinism", sweep_determinism),
];

pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    let ctx = Ctx {
        quick: opts.quick,
        seed: opts.seed,
        fault: opts.fault,
    };
    let mut checks: Vec<CheckResult> = CHECKS
        .iter()
        .map(|&(module, name, f)| {
            let (passed, detail) = match f(&ctx) {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult {
                module,
                name,
                passed,
                detail,
            }
        })
        .collect();
    let uncovered: Vec<&str> = Module::ALL
        .iter()
        .filter(|m| {
            !checks
                .iter()
                .any(|c| c.module == **m && c.name != "coverage")
        })
        .map(|m| m.label())
        .collect();
    checks.push(CheckResult {
        module: Module::HarnessCli,
        name: "coverage",
        passed: uncovered.is_empty(),
        detail: if uncovered.is_empty() {
            format!("all {} modules exercised", Module::ALL.len())
        } else {
            format!("no checks for {}", uncovered.join(", "))
        },
    });
    VerifyReport { checks }
}
