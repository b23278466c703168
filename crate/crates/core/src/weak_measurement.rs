//! Weak coupling of a system qubit A to a pointer qubit B, followed by
//! postselection of A.
//!
//! The exact route builds the 4×4 joint state and traces out A. The closed
//! forms (pointer states, postselection probabilities, Bloch-vector update
//! coefficients) are checked against it in the tests below.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qubit_algebra::{
    bloch_to_density, partial_trace_a, pure_state_overlap, tensor, BlochVector, Complex2x2,
    PureQubit, QubitState, TwoQubitOperator, EXACT_TOL,
};

/// Success probability below which a conditional state is undefined.
pub const DEGENERATE_PROB: f64 = 1e-14;

/// Half-width of the `g ≈ π/4` band.
pub const QUARTER_PI_BAND: f64 = 0.01;
/// `|η| ≤ g / ETA_G_SEPARATION` for the weak-coupling regime.
pub const ETA_G_SEPARATION: f64 = 10.0;
/// Largest `g` still treated as weak coupling.
pub const WEAK_G_MAX: f64 = 0.3;

/// The two source states `|ψ₁⟩ = |1⟩_z` and
/// `|ψ₂⟩ = [(η + 1/√2)|0⟩_x + (η − 1/√2)|1⟩_x]/√(1+2|η|²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatePair {
    pub psi1: PureQubit,
    pub psi2: PureQubit,
    pub eta: Complex64,
}

impl StatePair {
    /// `|⟨ψ₁|ψ₂⟩|`, which equals `1/√(1+2|η|²)`.
    pub fn overlap(&self) -> f64 {
        crate::qubit_algebra::fidelity_overlap(&self.psi1, &self.psi2)
    }
}

pub fn make_state_pair(eta: Complex64) -> Result<StatePair> {
    if !(eta.re.is_finite() && eta.im.is_finite()) {
        return Err(Error::param("eta", "must be finite"));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let norm = (1.0 + 2.0 * eta.norm_sqr()).sqrt();
    let psi1 = PureQubit::from_x_basis(Complex64::new(r, 0.0), Complex64::new(-r, 0.0))?;
    let psi2 = PureQubit::from_x_basis((eta + r) / norm, (eta - r) / norm)?;
    Ok(StatePair { psi1, psi2, eta })
}

/// Postselection target `|ψ_f⟩ = (|0⟩_x + |1⟩_x)/√2 = |0⟩_z`.
pub fn protocol_postselection() -> PureQubit {
    PureQubit::zero_z()
}

/// Initial pointer state `|φ⟩ = |0⟩_z`.
pub fn protocol_pointer() -> PureQubit {
    PureQubit::zero_z()
}

/// Coupling `U = exp[−ig (n·σ_A)⊗(n·σ_B)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSpec {
    g: f64,
    axis: BlochVector,
}

impl CouplingSpec {
    pub fn new(g: f64, axis: BlochVector) -> Result<Self> {
        check_g(g)?;
        if !axis.is_unit(EXACT_TOL) {
            return Err(Error::param(
                "axis",
                format!("must be a unit vector, norm {}", axis.norm()),
            ));
        }
        Ok(CouplingSpec { g, axis })
    }

    /// The `σx ⊗ σx` coupling.
    pub fn along_x(g: f64) -> Result<Self> {
        CouplingSpec::new(g, BlochVector::X)
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn axis(&self) -> BlochVector {
        self.axis
    }
}

fn check_g(g: f64) -> Result<()> {
    if !(0.0..=PI).contains(&g) {
        return Err(Error::param("g", format!("{g} is outside [0, π]")));
    }
    Ok(())
}

/// Projective postselection `Π_f = ½(I + f·σ)` on qubit A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostselectionSpec {
    f: BlochVector,
}

impl PostselectionSpec {
    pub fn new(f: BlochVector) -> Result<Self> {
        if !f.is_unit(EXACT_TOL) {
            return Err(Error::param(
                "f",
                format!("must be a unit vector, norm {}", f.norm()),
            ));
        }
        Ok(PostselectionSpec { f })
    }

    pub fn direction(&self) -> BlochVector {
        self.f
    }

    pub fn projector(&self) -> Complex2x2 {
        (Complex2x2::identity() + self.f.sigma()) * 0.5
    }

    /// The complementary outcome `I − Π_f`.
    pub fn complement(&self) -> PostselectionSpec {
        PostselectionSpec { f: -self.f }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostselectedOutcome {
    pub pointer_state: QubitState,
    pub success_prob: f64,
}

/// `cos g · I₄ − i sin g · (n·σ)⊗(n·σ)`; exact since `((n·σ)⊗(n·σ))² = I₄`.
pub fn coupling_unitary(spec: &CouplingSpec) -> TwoQubitOperator {
    let ns = spec.axis.sigma();
    let nn = tensor(&ns, &ns);
    let (s, c) = spec.g.sin_cos();
    TwoQubitOperator::identity().scale(Complex64::new(c, 0.0)) + nn.scale(Complex64::new(0.0, -s))
}

/// `U (ρ_A ⊗ ρ_B) U†`.
pub fn evolve(rho_a: &QubitState, rho_b: &QubitState, u: &TwoQubitOperator) -> TwoQubitOperator {
    *u * tensor(rho_a.matrix(), rho_b.matrix()) * u.adjoint()
}

/// Couple, postselect A on `Π_f`, and return B's conditional state together
/// with the postselection probability.
pub fn evolve_postselect(
    rho_a: &QubitState,
    rho_b: &QubitState,
    u: &TwoQubitOperator,
    f: &PostselectionSpec,
) -> Result<PostselectedOutcome> {
    let joint = evolve(rho_a, rho_b, u);
    let p = tensor(&f.projector(), &Complex2x2::identity());
    let projected = p * joint * p;
    let success_prob = projected.trace().re;
    if success_prob < DEGENERATE_PROB {
        return Err(Error::DegeneratePostselection { prob: success_prob });
    }
    Ok(PostselectedOutcome {
        pointer_state: QubitState::from_unnormalized(partial_trace_a(&projected)),
        success_prob,
    })
}

/// The protocol's exact pipeline for both source states: σx⊗σx coupling of
/// strength `g`, pointer `|0⟩_z`, postselection on `|0⟩_z`.
pub fn protocol_outcomes(
    eta: Complex64,
    g: f64,
) -> Result<(Result<PostselectedOutcome>, Result<PostselectedOutcome>)> {
    let pair = make_state_pair(eta)?;
    let u = coupling_unitary(&CouplingSpec::along_x(g)?);
    let rho_b = protocol_pointer().density();
    let f = PostselectionSpec::new(BlochVector::Z)?;
    let run = |psi: &PureQubit| evolve_postselect(&psi.density(), &rho_b, &u, &f);
    Ok((run(&pair.psi1), run(&pair.psi2)))
}

/// Closed-form pointer states after successful postselection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerStates {
    /// `|φ′₁⟩ = |1⟩_z`.
    pub phi1: PureQubit,
    /// `|φ′₂⟩ ∝ √2 η cos g |0⟩_z − i sin g |1⟩_z`.
    pub phi2: PureQubit,
    /// `sin g = 0`: the `|ψ₁⟩` branch is never postselected, so `phi1` is
    /// formal only.
    pub phi1_zero_probability: bool,
}

impl PointerStates {
    pub fn overlap(&self) -> f64 {
        crate::qubit_algebra::fidelity_overlap(&self.phi1, &self.phi2)
    }
}

pub fn pointer_states_analytic(eta: Complex64, g: f64) -> Result<PointerStates> {
    check_g(g)?;
    let (s, c) = g.sin_cos();
    let a0 = eta * (SQRT_2 * c);
    let a1 = Complex64::new(0.0, -s);
    let norm_sqr = a0.norm_sqr() + a1.norm_sqr();
    if norm_sqr < DEGENERATE_PROB {
        return Err(Error::DegeneratePostselection { prob: norm_sqr });
    }
    let phi2 = PureQubit::normalized(a0, a1)?;
    Ok(PointerStates {
        phi1: PureQubit::one_z(),
        phi2,
        phi1_zero_probability: s * s < DEGENERATE_PROB,
    })
}

/// `(λ₁, λ₂) = ((2|η|²cos²g + sin²g)/(1+2|η|²), sin²g)`.
///
/// `λ₁` is the postselection probability of the `|ψ₂⟩` branch and `λ₂`
/// that of `|ψ₁⟩`.
pub fn postselection_probs(eta: Complex64, g: f64) -> (f64, f64) {
    let e2 = eta.norm_sqr();
    let (s, c) = g.sin_cos();
    let lambda1 = (2.0 * e2 * c * c + s * s) / (1.0 + 2.0 * e2);
    (lambda1, s * s)
}

/// Where the two postselection probabilities are approximately equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    NearQuarterPi,
    EtaMuchLessThanG,
    Neither,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::NearQuarterPi => "near-quarter-pi",
            Regime::EtaMuchLessThanG => "eta-much-less-than-g",
            Regime::Neither => "neither",
        }
    }
}

pub fn regime_check(eta: Complex64, g: f64) -> Regime {
    if (g - FRAC_PI_4).abs() <= QUARTER_PI_BAND {
        Regime::NearQuarterPi
    } else if eta.norm() <= g / ETA_G_SEPARATION && g <= WEAK_G_MAX {
        Regime::EtaMuchLessThanG
    } else {
        Regime::Neither
    }
}

/// Coefficients of `k_B' = c₁ k_B + c₂ n + c₃ (n × k_B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateCoeffs {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub alpha4: f64,
    /// `α₁ + α₂(n·k_B) + α₃`, twice the postselection probability.
    pub denominator: f64,
}

impl UpdateCoeffs {
    pub fn pointer_bloch(&self, k_b: BlochVector, n: BlochVector) -> BlochVector {
        k_b * self.c1 + n * self.c2 + n.cross(k_b) * self.c3
    }

    pub fn success_probability(&self) -> f64 {
        0.5 * self.denominator
    }
}

/// Bloch-vector form of the postselected pointer update.
///
/// The `n`-component carries `2α₃(n·k_B)`: the `sin²g` part of the evolution
/// reflects `k_B` about `n`, contributing `α₃[2(n·k_B)n − k_B]`.
pub fn bloch_update_coeffs(
    k_a: BlochVector,
    k_b: BlochVector,
    f: BlochVector,
    n: BlochVector,
    g: f64,
) -> Result<UpdateCoeffs> {
    for (name, v) in [("k_a", k_a), ("k_b", k_b)] {
        if !v.is_finite() || v.norm() > 1.0 + EXACT_TOL {
            return Err(Error::param(name, format!("norm {} exceeds 1", v.norm())));
        }
    }
    for (name, v) in [("f", f), ("n", n)] {
        if !v.is_unit(EXACT_TOL) {
            return Err(Error::param(
                name,
                format!("must be a unit vector, norm {}", v.norm()),
            ));
        }
    }
    if !g.is_finite() {
        return Err(Error::param("g", "must be finite"));
    }
    let (s, c) = g.sin_cos();
    let n_ka = n.dot(k_a);
    let f_n = f.dot(n);
    let n_kb = n.dot(k_b);
    // n × (k_A × n) is the part of k_A orthogonal to n; (n × k_A) × n is the same vector.
    let k_a_perp = n.cross(k_a.cross(n));

    let alpha1 = c * c * (1.0 + f.dot(k_a));
    let alpha2 = 2.0 * s * c * f.dot(n.cross(k_a));
    let alpha3 = s * s * (1.0 + n_ka * f_n - f.dot(k_a_perp));
    let alpha4 = 2.0 * (n_ka + f_n) * s * c;

    let denominator = alpha1 + alpha2 * n_kb + alpha3;
    if denominator < DEGENERATE_PROB {
        return Err(Error::DegeneratePostselection {
            prob: 0.5 * denominator,
        });
    }
    Ok(UpdateCoeffs {
        c1: (alpha1 - alpha3) / denominator,
        c2: (alpha2 + 2.0 * alpha3 * n_kb) / denominator,
        c3: alpha4 / denominator,
        alpha1,
        alpha2,
        alpha3,
        alpha4,
        denominator,
    })
}

/// Exact conditional pointer Bloch vector for general `(k_A, k_B, f, n, g)`.
pub fn exact_pointer_bloch(
    k_a: BlochVector,
    k_b: BlochVector,
    f: BlochVector,
    n: BlochVector,
    g: f64,
) -> Result<PostselectedOutcome> {
    let u = coupling_unitary(&CouplingSpec::new(g, n)?);
    evolve_postselect(
        &bloch_to_density(k_a)?,
        &bloch_to_density(k_b)?,
        &u,
        &PostselectionSpec::new(f)?,
    )
}

/// `|⟨φ′₁|φ′₂⟩|` computed from the exact pipeline's conditional states.
pub fn exact_pointer_overlap(eta: Complex64, g: f64) -> Result<f64> {
    let (o1, o2) = protocol_outcomes(eta, g)?;
    Ok(pure_state_overlap(&o1?.pointer_state, &o2?.pointer_state))
}
