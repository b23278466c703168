//! Imperfect operations: first-order pointer states, success-to-error ratios β
//! for the conventional (A) and weak-measurement (B) strategies, and their
//! Monte Carlo averages over a random POVM deviation `δ_f` in the X–Y plane.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::discrimination::{pointer_tilt, povm_conventional, povm_weak, PovmSet};
use crate::error::{Error, Result};
use crate::qubit_algebra::{bloch_to_density, BlochVector, QubitState, EXACT_TOL};
use crate::weak_measurement::{exact_pointer_bloch, ETA_G_SEPARATION, WEAK_G_MAX};

/// Error sums at or below this make β unbounded.
pub const UNBOUNDED_DENOMINATOR: f64 = 1e-15;

/// Recorded in output metadata so runs can be reproduced elsewhere.
pub const RNG_ALGORITHM: &str =
    "ChaCha8Rng (rand_chacha 0.3); seed_from_u64(seed), set_stream(sample_index)";

/// Imperfection parameters of one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationSpec {
    /// Deviation of the coupling axis, `n = √(1−|δ_n|²)X̂ + δ_n`, `δ_n ⟂ X̂`.
    pub delta_n: BlochVector,
    /// Magnitude of the in-plane POVM deviation `δ_f`.
    pub delta_f_mag: f64,
    /// Source separation: `k_A2 = −√(1−ε²)Ẑ + εŶ`.
    pub eps: f64,
}

impl DeviationSpec {
    pub fn new(delta_n: BlochVector, delta_f_mag: f64, eps: f64) -> Result<Self> {
        check_delta_n(delta_n)?;
        if !(delta_f_mag >= 0.0 && delta_f_mag.is_finite()) {
            return Err(Error::param(
                "delta_f_mag",
                "must be finite and non-negative",
            ));
        }
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::param("eps", format!("{eps} is outside [0, 1)")));
        }
        Ok(DeviationSpec {
            delta_n,
            delta_f_mag,
            eps,
        })
    }

    pub fn coupling_axis(&self) -> BlochVector {
        coupling_axis(self.delta_n)
    }
}

fn check_delta_n(delta_n: BlochVector) -> Result<()> {
    if !delta_n.is_finite() || delta_n.norm() >= 1.0 {
        return Err(Error::param("delta_n", "magnitude must be below 1"));
    }
    if delta_n.x.abs() > EXACT_TOL {
        return Err(Error::param("delta_n", "must be orthogonal to X"));
    }
    Ok(())
}

fn coupling_axis(delta_n: BlochVector) -> BlochVector {
    BlochVector::X * (1.0 - delta_n.dot(delta_n)).sqrt() + delta_n
}

/// `k_A1 = −Ẑ`, `k_A2 = −√(1−ε²)Ẑ + εŶ`.
pub fn source_blochs(eps: f64) -> Result<(BlochVector, BlochVector)> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::param("eps", format!("{eps} is outside [0, 1]")));
    }
    Ok((
        -BlochVector::Z,
        BlochVector::new(0.0, eps, -(1.0 - eps * eps).sqrt()),
    ))
}

pub fn source_states(eps: f64) -> Result<(QubitState, QubitState)> {
    let (k1, k2) = source_blochs(eps)?;
    Ok((bloch_to_density(k1)?, bloch_to_density(k2)?))
}

/// `k_B1 = −Ẑ`, `k_B2 = −√(1−(2ε/g)²)Ẑ + (2ε/g)X̂`, requiring only `2ε/g ≤ 1`.
pub fn first_order_pointer_blochs(eps: f64, g: f64) -> Result<(BlochVector, BlochVector)> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::param("eps", "must be non-negative"));
    }
    let a = pointer_tilt(eps, g)?;
    Ok((
        -BlochVector::Z,
        BlochVector::new(a, 0.0, -(1.0 - a * a).sqrt()),
    ))
}

pub fn first_order_pointer_states(eps: f64, g: f64) -> Result<(QubitState, QubitState)> {
    let (k1, k2) = first_order_pointer_blochs(eps, g)?;
    Ok((bloch_to_density(k1)?, bloch_to_density(k2)?))
}

/// First-order pointer Bloch vectors for `1 ≫ g ≫ ε` with an axis deviation
/// `δ_n` of order `ε`. The closed form drops `δ_n` entirely (its effect is
/// claimed to be `O(|δ_n|²)`).
///
/// Enforced regime: `ε ≤ g/10`, `g ≤ 0.3`, `|δ_n| ≤ 10ε`.
pub fn perturbed_pointer_blochs(
    eps: f64,
    g: f64,
    delta_n: BlochVector,
) -> Result<(BlochVector, BlochVector)> {
    check_delta_n(delta_n)?;
    if !(g > 0.0 && g <= WEAK_G_MAX && eps <= g / ETA_G_SEPARATION) {
        return Err(Error::Regime(format!(
            "first-order pointer states need eps <= g/{ETA_G_SEPARATION} and 0 < g <= {WEAK_G_MAX} (eps = {eps}, g = {g})"
        )));
    }
    if delta_n.norm() > 10.0 * eps {
        return Err(Error::Regime(format!(
            "|delta_n| = {} must be of the order of eps (<= 10 eps)",
            delta_n.norm()
        )));
    }
    first_order_pointer_blochs(eps, g)
}

/// Exact conditional pointer Bloch vectors for the source pair, with pointer
/// and postselection along Ẑ and coupling axis `√(1−|δ_n|²)X̂ + δ_n`.
pub fn exact_pointer_blochs(
    eps: f64,
    g: f64,
    delta_n: BlochVector,
) -> Result<(BlochVector, BlochVector)> {
    check_delta_n(delta_n)?;
    let n = coupling_axis(delta_n);
    let (k1, k2) = source_blochs(eps)?;
    let run = |k: BlochVector| {
        exact_pointer_bloch(k, BlochVector::Z, BlochVector::Z, n, g)
            .map(|o| o.pointer_state.bloch())
    };
    Ok((run(k1)?, run(k2)?))
}

/// Success-to-error ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta {
    Finite(f64),
    /// No error probability at all: the discrimination is still unambiguous.
    Unbounded,
}

impl Beta {
    /// `+∞` for [`Beta::Unbounded`].
    pub fn value(self) -> f64 {
        match self {
            Beta::Finite(b) => b,
            Beta::Unbounded => f64::INFINITY,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Beta::Unbounded)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaResult {
    pub beta: Beta,
    /// `Tr(ρ₁π₁) + Tr(ρ₂π₂)`.
    pub success_sum: f64,
    /// `Tr(ρ₁π₂) + Tr(ρ₂π₁)`.
    pub error_sum: f64,
}

pub fn beta_ratio(rho1: &QubitState, rho2: &QubitState, povm: &PovmSet) -> BetaResult {
    let success_sum = rho1.expectation(povm.pi1()) + rho2.expectation(povm.pi2());
    let error_sum = rho1.expectation(povm.pi2()) + rho2.expectation(povm.pi1());
    let beta = if error_sum <= UNBOUNDED_DENOMINATOR {
        Beta::Unbounded
    } else {
        Beta::Finite(success_sum / error_sum)
    };
    BetaResult {
        beta,
        success_sum,
        error_sum,
    }
}

fn beta_closed_form(separation: f64, along: f64, delta_f: BlochVector) -> Beta {
    let d2 = delta_f.dot(delta_f);
    if d2 == 0.0 {
        return Beta::Unbounded;
    }
    Beta::Finite(1.0 + (separation * separation - separation * along) / (0.5 * d2))
}

/// `β_A = 1 + [ε² − ε(δ_f·Ŷ)] / (½|δ_f|²)`.
pub fn beta_a_formula(eps: f64, delta_f: BlochVector) -> Result<Beta> {
    povm_conventional(eps, delta_f)?;
    Ok(beta_closed_form(eps, delta_f.y, delta_f))
}

/// `β_B = 1 + [(2ε/g)² − (2ε/g)(δ_f·X̂)] / (½|δ_f|²)`.
pub fn beta_b_formula(eps: f64, g: f64, delta_f: BlochVector) -> Result<Beta> {
    povm_weak(eps, g, delta_f)?;
    Ok(beta_closed_form(2.0 * eps / g, delta_f.x, delta_f))
}

/// Averages `⟨β_A⟩ = 1 + 2ε²/|δ_f|²` and `⟨β_B⟩ = 1 + (2/g)²·2ε²/|δ_f|²`
/// over a uniformly oriented `δ_f`.
pub fn expected_mean_betas(eps: f64, g: f64, delta_f_mag: f64) -> (f64, f64) {
    let base = 2.0 * eps * eps / (delta_f_mag * delta_f_mag);
    (1.0 + base, 1.0 + (2.0 / g).powi(2) * base)
}

/// How the in-plane deviation `δ_f` is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeviationSampling {
    /// Fixed magnitude, angle uniform on `[0, 2π)`.
    #[default]
    UniformAngle,
    /// Independent `N(0, |δ_f|²/2)` components, so `E|δ_f|² = |δ_f|²`.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McParams {
    pub eps: f64,
    pub g: f64,
    pub delta_f_mag: f64,
    pub samples: usize,
    pub seed: u64,
    pub sampling: DeviationSampling,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSummary {
    pub mean_beta_a: f64,
    pub mean_beta_b: f64,
    pub std_error_a: f64,
    pub std_error_b: f64,
    /// Means of the trace-based ratios on the same samples.
    pub mean_trace_beta_a: f64,
    pub mean_trace_beta_b: f64,
    pub std_error_trace_a: f64,
    pub std_error_trace_b: f64,
    pub sample_count: usize,
    pub seed: u64,
}

/// Deviation for sample `index`; depends only on `(seed, index)`.
pub fn sample_delta_f(seed: u64, index: u64, mag: f64, sampling: DeviationSampling) -> BlochVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    match sampling {
        DeviationSampling::UniformAngle => {
            let theta = rng.gen::<f64>() * std::f64::consts::TAU;
            let (s, c) = theta.sin_cos();
            BlochVector::new(mag * c, mag * s, 0.0)
        }
        DeviationSampling::Gaussian => {
            let sigma = mag * std::f64::consts::FRAC_1_SQRT_2;
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            BlochVector::new(sigma * x, sigma * y, 0.0)
        }
    }
}

struct Sample {
    beta_a: f64,
    beta_b: f64,
    trace_a: f64,
    trace_b: f64,
}

/// Mean and standard error (sample std / √N); infinite if any value is.
fn mean_and_std_error(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    let mean = values.clone().sum::<f64>() / n as f64;
    if !mean.is_finite() {
        return (f64::INFINITY, f64::INFINITY);
    }
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Monte Carlo estimate of `⟨β_A⟩` and `⟨β_B⟩`.
///
/// Samples are evaluated in parallel but reduced in index order, so the
/// summary is bit-identical for any number of worker threads.
pub fn mc_average_beta(params: &McParams) -> Result<McSummary> {
    let McParams {
        eps,
        g,
        delta_f_mag,
        samples,
        seed,
        sampling,
    } = *params;
    if samples == 0 {
        return Err(Error::param("samples", "at least one sample is required"));
    }
    if !(delta_f_mag >= 0.0 && delta_f_mag.is_finite()) {
        return Err(Error::param(
            "delta_f_mag",
            "must be finite and non-negative",
        ));
    }
    // both builders must accept the nominal configuration
    povm_conventional(eps, BlochVector::ZERO)?;
    povm_weak(eps, g, BlochVector::ZERO)?;
    let (a1, a2) = source_states(eps)?;
    let (b1, b2) = first_order_pointer_states(eps, g)?;

    let evaluate = |index: u64| -> Result<Sample> {
        let delta_f = sample_delta_f(seed, index, delta_f_mag, sampling);
        let povm_a = povm_conventional(eps, delta_f)?;
        let povm_b = povm_weak(eps, g, delta_f)?;
        Ok(Sample {
            beta_a: beta_a_formula(eps, delta_f)?.value(),
            beta_b: beta_b_formula(eps, g, delta_f)?.value(),
            trace_a: beta_ratio(&a1, &a2, &povm_a).beta.value(),
            trace_b: beta_ratio(&b1, &b2, &povm_b).beta.value(),
        })
    };
    let results: Vec<Result<Sample>> = (0..samples as u64).into_par_iter().map(evaluate).collect();
    let samples_vec = results.into_iter().collect::<Result<Vec<_>>>()?;

    let stat = |f: fn(&Sample) -> f64| mean_and_std_error(samples_vec.iter().map(f));
    let (mean_beta_a, std_error_a) = stat(|s| s.beta_a);
    let (mean_beta_b, std_error_b) = stat(|s| s.beta_b);
    let (mean_trace_beta_a, std_error_trace_a) = stat(|s| s.trace_a);
    let (mean_trace_beta_b, std_error_trace_b) = stat(|s| s.trace_b);
    Ok(McSummary {
        mean_beta_a,
        mean_beta_b,
        std_error_a,
        std_error_b,
        mean_trace_beta_a,
        mean_trace_beta_b,
        std_error_trace_a,
        std_error_trace_b,
        sample_count: samples,
        seed,
    })
}
