//! Unambiguous discrimination: the IDP limit, the protocol's overall success
//! probability, and the POVM sets used by the conventional and weak-measurement
//! strategies.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qubit_algebra::{pure_state_overlap, BlochVector, Complex2x2, QubitState, EXACT_TOL};
use crate::weak_measurement::{
    pointer_states_analytic, postselection_probs, protocol_outcomes, ETA_G_SEPARATION, WEAK_G_MAX,
};

/// Eigenvalues of `π₁`, `π₂` may not go below this.
pub const POVM_ELEMENT_TOL: f64 = 1e-9;
/// `π_?` eigenvalues below this are flagged.
pub const INCONCLUSIVE_FLAG_TOL: f64 = 1e-9;
/// Largest state separation `ε` accepted by the POVM builders.
pub const EPS_MAX: f64 = 0.1;

/// Tolerance on the in-plane requirement `δ_f·Ẑ = 0`.
const PLANE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PovmWarning {
    /// The two target states coincide, so `π₁` and `π₂` cannot separate them.
    DegeneratePair,
    /// `π_?` has an eigenvalue below `−1e-9`.
    NegativeInconclusive { min_eigenvalue: f64 },
}

/// `{π₁, π₂, π_?}` with `π_? = I − π₁ − π₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmSet {
    pi1: Complex2x2,
    pi2: Complex2x2,
    pi_q: Complex2x2,
    warnings: Vec<PovmWarning>,
}

impl PovmSet {
    /// Builds the set from the two conclusive elements; `π_?` completes it.
    pub fn new(pi1: Complex2x2, pi2: Complex2x2) -> Result<Self> {
        let pi_q = Complex2x2::identity() - pi1 - pi2;
        PovmSet::from_elements(pi1, pi2, pi_q)
    }

    pub fn from_elements(pi1: Complex2x2, pi2: Complex2x2, pi_q: Complex2x2) -> Result<Self> {
        for (name, m) in [("pi1", &pi1), ("pi2", &pi2), ("pi_q", &pi_q)] {
            if !m.is_finite() || !m.is_hermitian(EXACT_TOL) {
                return Err(Error::param(
                    name,
                    "POVM element must be finite and Hermitian",
                ));
            }
        }
        for (name, m) in [("pi1", &pi1), ("pi2", &pi2)] {
            let [lo, _] = m.hermitian_eigenvalues();
            if lo < -POVM_ELEMENT_TOL {
                return Err(Error::param(name, format!("negative eigenvalue {lo:e}")));
            }
        }
        let sum = pi1 + pi2 + pi_q;
        if sum.max_abs_diff(&Complex2x2::identity()) > EXACT_TOL {
            return Err(Error::param("pi_q", "elements do not sum to the identity"));
        }
        let mut warnings = Vec::new();
        let [q_lo, _] = pi_q.hermitian_eigenvalues();
        if q_lo < -INCONCLUSIVE_FLAG_TOL {
            warnings.push(PovmWarning::NegativeInconclusive {
                min_eigenvalue: q_lo,
            });
        }
        Ok(PovmSet {
            pi1,
            pi2,
            pi_q,
            warnings,
        })
    }

    pub fn pi1(&self) -> &Complex2x2 {
        &self.pi1
    }

    pub fn pi2(&self) -> &Complex2x2 {
        &self.pi2
    }

    pub fn pi_q(&self) -> &Complex2x2 {
        &self.pi_q
    }

    pub fn elements(&self) -> [&Complex2x2; 3] {
        [&self.pi1, &self.pi2, &self.pi_q]
    }

    pub fn warnings(&self) -> &[PovmWarning] {
        &self.warnings
    }

    pub fn min_inconclusive_eigenvalue(&self) -> f64 {
        self.pi_q.hermitian_eigenvalues()[0]
    }

    fn with_warning(mut self, w: PovmWarning) -> Self {
        self.warnings.push(w);
        self
    }
}

/// Outcome statistics of a POVM applied to two equiprobable states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminationReport {
    /// `conditional[i][j] = Tr(ρ_{i+1} π_j)` with `j ∈ {1, 2, ?}`.
    pub conditional: [[f64; 3]; 2],
    pub p_success: f64,
    pub p_error: f64,
    pub p_inconclusive: f64,
}

pub fn discriminate(rho1: &QubitState, rho2: &QubitState, povm: &PovmSet) -> DiscriminationReport {
    let row = |rho: &QubitState| povm.elements().map(|pi| rho.expectation(pi));
    let conditional = [row(rho1), row(rho2)];
    DiscriminationReport {
        conditional,
        p_success: 0.5 * (conditional[0][0] + conditional[1][1]),
        p_error: 0.5 * (conditional[0][1] + conditional[1][0]),
        p_inconclusive: 0.5 * (conditional[0][2] + conditional[1][2]),
    }
}

/// IDP limit `1 − |⟨ψ₁|ψ₂⟩|` for equal priors.
pub fn idp_limit(overlap: f64) -> Result<f64> {
    if !(-EXACT_TOL..=1.0 + EXACT_TOL).contains(&overlap) {
        return Err(Error::param(
            "overlap",
            format!("{overlap} is outside [0, 1]"),
        ));
    }
    Ok(1.0 - overlap.clamp(0.0, 1.0))
}

/// `1 − 1/√(1+2|η|²)`.
pub fn idp_limit_eta(eta: Complex64) -> f64 {
    let x = 2.0 * eta.norm_sqr();
    let r = (1.0 + x).sqrt();
    x / (r * (1.0 + r))
}

/// `p = ½(λ₁+λ₂)(1 − |⟨φ′₁|φ′₂⟩|)`.
///
/// Written as `(|η|²+sin²g)/(1+2|η|²) · (1 − |sin g|/√(2|η|²cos²g + sin²g))`;
/// the fully degenerate point `η = 0, sin g = 0` returns 0.
pub fn overall_success_exact(eta: Complex64, g: f64) -> f64 {
    let e2 = eta.norm_sqr();
    let (s, c) = g.sin_cos();
    let norm = (2.0 * e2 * c * c + s * s).sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    let gap = 2.0 * e2 * c * c / (norm * (norm + s.abs()));
    (e2 + s * s) / (1.0 + 2.0 * e2) * gap
}

/// The same quantity assembled from the pointer-state closed form and
/// [`postselection_probs`], without the simplified product formula.
pub fn overall_success_from_pointers(eta: Complex64, g: f64) -> Result<f64> {
    let (l1, l2) = postselection_probs(eta, g);
    let ps = pointer_states_analytic(eta, g)?;
    Ok(0.5 * (l1 + l2) * idp_limit(ps.overlap())?)
}

/// The same quantity from the exact 4×4 pipeline: branch probabilities and
/// the overlap of the conditional pointer states.
pub fn overall_success_pipeline(eta: Complex64, g: f64) -> Result<f64> {
    let (o1, o2) = protocol_outcomes(eta, g)?;
    let (o1, o2) = (o1?, o2?);
    let overlap = pure_state_overlap(&o1.pointer_state, &o2.pointer_state);
    Ok(0.5 * (o1.success_prob + o2.success_prob) * idp_limit(overlap)?)
}

/// Weak-coupling approximation `|η|² cos²g`; requires `|η| ≤ g/10` and `g ≤ 0.3`.
pub fn overall_success_approx(eta: Complex64, g: f64) -> Result<f64> {
    if !(g.is_finite() && eta.norm() <= g / ETA_G_SEPARATION && g <= WEAK_G_MAX) {
        return Err(Error::Regime(format!(
            "weak-coupling formula needs |eta| <= g/{ETA_G_SEPARATION} and g <= {WEAK_G_MAX} (|eta| = {}, g = {g})",
            eta.norm()
        )));
    }
    Ok(eta.norm_sqr() * g.cos().powi(2))
}

/// Optimal equal-prior unambiguous POVM for two pure states:
/// `π₁ = ½(I − k₂·σ)/(1+s)`, `π₂ = ½(I − k₁·σ)/(1+s)`, `s = |⟨ψ₁|ψ₂⟩|`.
pub fn optimal_unambiguous_povm(rho1: &QubitState, rho2: &QubitState) -> Result<PovmSet> {
    let (k1, k2) = (rho1.bloch(), rho2.bloch());
    for (name, k) in [("rho1", k1), ("rho2", k2)] {
        if !k.is_unit(1e-9) {
            return Err(Error::param(
                name,
                format!("state must be pure, Bloch norm {}", k.norm()),
            ));
        }
    }
    if k1.distance(k2) <= EXACT_TOL {
        return Err(Error::NoDiscrimination);
    }
    let s = pure_state_overlap(rho1, rho2);
    let weight = 0.5 / (1.0 + s);
    let id = Complex2x2::identity();
    PovmSet::new((id - k2.sigma()) * weight, (id - k1.sigma()) * weight)
}

fn check_in_plane(delta_f: BlochVector) -> Result<()> {
    if !delta_f.is_finite() || delta_f.z.abs() > PLANE_TOL {
        return Err(Error::param(
            "delta_f",
            "deviation must lie in the X-Y plane",
        ));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=EPS_MAX).contains(&eps) {
        return Err(Error::param(
            "eps",
            format!("{eps} is outside [0, {EPS_MAX}]"),
        ));
    }
    Ok(())
}

/// `pre·[I + m·σ]` and `pre·[I + Ẑ·σ]`, where `m` is the unit vector with
/// transverse part `t + δ_f` (nominal tilt `t` plus the in-plane deviation).
fn tilted_pair(prefactor: f64, tilt: BlochVector, delta_f: BlochVector) -> Result<PovmSet> {
    let transverse = tilt + delta_f;
    let t2 = transverse.dot(transverse);
    if t2 > 1.0 {
        return Err(Error::param(
            "delta_f",
            "POVM Bloch vector would leave the unit sphere",
        ));
    }
    let m = BlochVector::new(transverse.x, transverse.y, (1.0 - t2).sqrt());
    let id = Complex2x2::identity();
    let pi1 = (id + m.sigma()) * prefactor;
    let pi2 = (id + BlochVector::Z.sigma()) * prefactor;
    let set = PovmSet::new(pi1, pi2)?;
    Ok(if tilt == BlochVector::ZERO {
        set.with_warning(PovmWarning::DegeneratePair)
    } else {
        set
    })
}

/// Conventional POVM on `k_A1 = −Ẑ`, `k_A2 = −√(1−ε²)Ẑ + εŶ`, with the `π₁`
/// Bloch vector deviated by `δ_f` in the X–Y plane. Prefactor `1/(4 − ε²/4)`.
///
/// The `π₁` Bloch vector is `√(1 − (ε − δ_f·Ŷ)² − (δ_f·X̂)²) Ẑ − εŶ + δ_f`,
/// which stays on the unit sphere.
pub fn povm_conventional(eps: f64, delta_f: BlochVector) -> Result<PovmSet> {
    check_eps(eps)?;
    check_in_plane(delta_f)?;
    tilted_pair(
        1.0 / (4.0 - eps * eps / 4.0),
        BlochVector::Y * -eps,
        delta_f,
    )
}

/// Weak-measurement POVM on the pointer pair `k_B1 = −Ẑ`,
/// `k_B2 = −√(1−(2ε/g)²)Ẑ + (2ε/g)X̂`. Prefactor `1/(4 − ε²/g²)`.
///
/// The `π₁` Bloch vector is `√(1 − (2ε/g − δ_f·X̂)² − (δ_f·Ŷ)²) Ẑ − (2ε/g)X̂ + δ_f`.
pub fn povm_weak(eps: f64, g: f64, delta_f: BlochVector) -> Result<PovmSet> {
    check_eps(eps)?;
    check_in_plane(delta_f)?;
    let a = pointer_tilt(eps, g)?;
    tilted_pair(
        1.0 / (4.0 - eps * eps / (g * g)),
        BlochVector::X * -a,
        delta_f,
    )
}

/// `2ε/g`, which must not exceed 1.
pub(crate) fn pointer_tilt(eps: f64, g: f64) -> Result<f64> {
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::param("g", format!("{g} must be positive")));
    }
    let a = 2.0 * eps / g;
    if a > 1.0 {
        return Err(Error::Regime(format!("2*eps/g = {a} exceeds 1")));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit_algebra::bloch_to_density;
    use crate::weak_measurement::make_state_pair;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn source_states(eps: f64) -> (QubitState, QubitState) {
        (
            bloch_to_density(-BlochVector::Z).unwrap(),
            bloch_to_density(BlochVector::new(0.0, eps, -(1.0 - eps * eps).sqrt())).unwrap(),
        )
    }

    #[test]
    fn idp_limit_examples() {
        assert_eq!(idp_limit(0.0).unwrap(), 1.0);
        assert_eq!(idp_limit(1.0).unwrap(), 0.0);
        let s = 1.0 / 3f64.sqrt();
        assert!((idp_limit(s).unwrap() - 0.422_649_730_810_374_2).abs() < 1e-15);
        assert!(idp_limit(1.1).is_err());
        assert!(idp_limit(-0.1).is_err());
        assert!(idp_limit(f64::NAN).is_err());
    }

    #[test]
    fn idp_limit_eta_examples() {
        assert_eq!(idp_limit_eta(re(0.0)), 0.0);
        let p = idp_limit_eta(re(0.01));
        // mpmath: 9.99850024995626e-5
        assert!((p - 9.998_500_249_956_258e-5).abs() < 1e-19);
        assert!((p - 1e-4).abs() / 1e-4 < 1e-3);
        assert!((idp_limit_eta(re(1.0)) - (1.0 - 1.0 / 3f64.sqrt())).abs() < 1e-15);
        for eta in [re(0.3), Complex64::new(0.1, -0.7)] {
            let pair = make_state_pair(eta).unwrap();
            assert!((idp_limit_eta(eta) - idp_limit(pair.overlap()).unwrap()).abs() < EXACT_TOL);
        }
    }

    #[test]
    fn overall_success_examples() {
        for eta in [1e-3, 0.3, 1.0] {
            let p = overall_success_exact(re(eta), FRAC_PI_4);
            assert!((p - 0.5 * (1.0 - 1.0 / (2.0 * eta * eta + 1.0).sqrt())).abs() < 1e-15);
        }
        assert!(overall_success_exact(re(0.2), FRAC_PI_2).abs() < 1e-15);
        assert_eq!(overall_success_exact(re(0.0), 0.0), 0.0);

        let p = overall_success_exact(re(1e-3), 0.1);
        // mpmath: 9.89983136623340e-7
        assert!((p - 9.899_831_366_233_402e-7).abs() < 1e-21);
        let approx = overall_success_approx(re(1e-3), 0.1).unwrap();
        assert!((approx - 9.900_332_889_206_208e-7).abs() < 1e-20);
        assert!((approx - p).abs() / p < 0.02);
    }

    #[test]
    fn overall_success_three_routes_agree() {
        for &(eta, g) in &[(1e-3, 0.1), (0.05, 0.3), (0.7, 1.2), (0.01, 2.5)] {
            let a = overall_success_exact(re(eta), g);
            let b = overall_success_from_pointers(re(eta), g).unwrap();
            let c = overall_success_pipeline(re(eta), g).unwrap();
            assert!(
                (a - b).abs() < EXACT_TOL && (a - c).abs() < EXACT_TOL,
                "eta={eta} g={g}"
            );
        }
    }

    #[test]
    fn overall_success_approx_regime() {
        let p = overall_success_approx(re(1e-3), 0.01).unwrap();
        assert!((p - 1e-6).abs() / 1e-6 <= 1e-4);
        assert!(matches!(
            overall_success_approx(re(0.1), 0.2),
            Err(Error::Regime(_))
        ));
        assert!(overall_success_approx(re(0.01), 0.35).is_err());
    }

    #[test]
    fn optimal_povm_examples() {
        let (up, down) = (PureQubitDensity::z(1.0), PureQubitDensity::z(-1.0));
        let povm = optimal_unambiguous_povm(&up, &down).unwrap();
        assert!(povm.pi1().max_abs_diff(up.matrix()) < 1e-15);
        assert!(povm.pi2().max_abs_diff(down.matrix()) < 1e-15);
        assert!(povm.pi_q().max_abs_diff(&Complex2x2::zero()) < 1e-15);

        let pair = make_state_pair(re(1.0)).unwrap();
        let (r1, r2) = (pair.psi1.density(), pair.psi2.density());
        let report = discriminate(&r1, &r2, &optimal_unambiguous_povm(&r1, &r2).unwrap());
        assert!((report.p_success - (1.0 - 1.0 / 3f64.sqrt())).abs() < 1e-10);
        assert!(report.conditional[0][1].abs() < 1e-12 && report.conditional[1][0].abs() < 1e-12);

        let ps = pointer_states_analytic(re(0.01), 0.1).unwrap();
        let (b1, b2) = (ps.phi1.density(), ps.phi2.density());
        let report = discriminate(&b1, &b2, &optimal_unambiguous_povm(&b1, &b2).unwrap());
        // 1 − 0.9902122000166117 (mpmath)
        assert!((report.p_success - 0.009_787_799_983_388_28).abs() < 1e-10);
    }

    struct PureQubitDensity;
    impl PureQubitDensity {
        fn z(sign: f64) -> QubitState {
            bloch_to_density(BlochVector::Z * sign).unwrap()
        }
    }

    #[test]
    fn optimal_povm_errors() {
        let up = PureQubitDensity::z(1.0);
        assert_eq!(
            optimal_unambiguous_povm(&up, &up).unwrap_err(),
            Error::NoDiscrimination
        );
        let mixed = bloch_to_density(BlochVector::new(0.0, 0.0, 0.5)).unwrap();
        assert!(matches!(
            optimal_unambiguous_povm(&up, &mixed),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn conventional_povm_examples() {
        let povm = povm_conventional(0.0, BlochVector::ZERO).unwrap();
        let quarter = (Complex2x2::identity() + Complex2x2::pauli_z()) * 0.25;
        assert!(povm.pi1().max_abs_diff(&quarter) < 1e-15);
        assert!(povm.pi2().max_abs_diff(&quarter) < 1e-15);
        assert!(povm.warnings().contains(&PovmWarning::DegeneratePair));

        let (r1, r2) = source_states(0.01);
        let povm = povm_conventional(0.01, BlochVector::ZERO).unwrap();
        let rep = discriminate(&r1, &r2, &povm);
        assert!(rep.conditional[0][1].abs() <= 1e-12 && rep.conditional[1][0].abs() <= 1e-12);
        assert!(rep.p_error.abs() <= 1e-12);
        // ½·2·(1 − √(1−ε²))/(4 − ε²/4), mpmath
        assert!((rep.p_success - 1.250_039_064_306_749_6e-5).abs() < 1e-17);
        assert!((rep.p_success + rep.p_error + rep.p_inconclusive - 1.0).abs() < 1e-12);
        assert!(povm.warnings().is_empty());
    }

    #[test]
    fn conventional_povm_errors() {
        assert!(povm_conventional(0.2, BlochVector::ZERO).is_err());
        assert!(povm_conventional(-0.01, BlochVector::ZERO).is_err());
        assert!(povm_conventional(0.01, BlochVector::new(0.0, 0.0, 0.01)).is_err());
        assert!(povm_conventional(0.01, BlochVector::new(1.0, 0.5, 0.0)).is_err());
    }

    #[test]
    fn weak_povm_examples() {
        let povm = povm_weak(0.0, 0.1, BlochVector::ZERO).unwrap();
        assert!(povm.pi1().max_abs_diff(povm.pi2()) < 1e-15);
        assert!(povm.warnings().contains(&PovmWarning::DegeneratePair));

        let (eps, g) = (0.001, 0.05);
        let a = 2.0 * eps / g;
        let b1 = bloch_to_density(-BlochVector::Z).unwrap();
        let b2 = bloch_to_density(BlochVector::new(a, 0.0, -(1.0 - a * a).sqrt())).unwrap();
        let povm = povm_weak(eps, g, BlochVector::ZERO).unwrap();
        let rep = discriminate(&b1, &b2, &povm);
        assert!(rep.conditional[0][1].abs() <= 1e-12 && rep.conditional[1][0].abs() <= 1e-12);
        let sum = *povm.pi1() + *povm.pi2() + *povm.pi_q();
        assert!(sum.max_abs_diff(&Complex2x2::identity()) < 1e-15);

        assert!(matches!(
            povm_weak(0.06, 0.1, BlochVector::ZERO),
            Err(Error::Regime(_))
        ));
        assert!(povm_weak(0.001, 0.0, BlochVector::ZERO).is_err());
        assert!(povm_weak(0.001, 0.1, BlochVector::new(0.0, 0.001, 0.001)).is_err());
    }

    #[test]
    fn truncated_prefactor_negativity_is_small_at_zero_deviation() {
        for eps in [1e-3, 1e-2, 0.1] {
            let povm = povm_conventional(eps, BlochVector::ZERO).unwrap();
            let lo = povm.min_inconclusive_eigenvalue();
            assert!(lo >= -10.0 * eps.powi(4), "eps={eps}: {lo}");
        }
    }

    #[test]
    fn deviated_povm_flags_negative_inconclusive() {
        // δ_f = εŶ aligns π₁ with π₂; the truncated prefactor then overshoots
        let povm = povm_conventional(0.01, BlochVector::new(0.0, 0.01, 0.0)).unwrap();
        assert!(matches!(
            povm.warnings(),
            [PovmWarning::NegativeInconclusive { .. }]
        ));
    }

    #[test]
    fn discriminate_examples() {
        let (up, down) = (PureQubitDensity::z(1.0), PureQubitDensity::z(-1.0));
        let proj = PovmSet::new(*up.matrix(), *down.matrix()).unwrap();
        let rep = discriminate(&up, &down, &proj);
        assert!((rep.p_success - 1.0).abs() < 1e-15 && rep.p_error.abs() < 1e-15);

        let give_up = PovmSet::new(Complex2x2::zero(), Complex2x2::zero()).unwrap();
        let rep = discriminate(&up, &bloch_to_density(BlochVector::X).unwrap(), &give_up);
        assert!((rep.p_inconclusive - 1.0).abs() < 1e-15);
    }

    #[test]
    fn povm_set_validation() {
        let id = Complex2x2::identity();
        assert!(PovmSet::new(id * -0.1, id * 0.5).is_err());
        assert!(PovmSet::from_elements(id * 0.5, id * 0.5, id * 0.5).is_err());
        let not_hermitian = Complex2x2::new([
            [Complex64::new(0.5, 0.0), Complex64::new(0.3, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
        ]);
        assert!(PovmSet::new(not_hermitian, id * 0.1).is_err());
    }
}
