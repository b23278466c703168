//! Exact complex linear algebra for one- and two-qubit objects.
//!
//! Two-qubit operators use qubit-A-major ordering: basis index `2a + b` for
//! `|a⟩_A |b⟩_B`, matching the written order `X_A ⊗ Y_B`.
//!
//! The x-basis convention is `|0⟩_x = (|0⟩_z + |1⟩_z)/√2` and
//! `|1⟩_x = (|0⟩_z − |1⟩_z)/√2`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for identities that hold exactly in real arithmetic.
pub const EXACT_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const IM: Complex64 = Complex64::new(0.0, 1.0);

// ---------------------------------------------------------------------------
// Bloch vectors
// ---------------------------------------------------------------------------

/// Real 3-vector on (or inside) the Bloch ball.
///
/// The same type carries rotation axes, postselection directions and small
/// deviation vectors, so the `‖v‖ ≤ 1` constraint is enforced where a vector
/// becomes a state (see [`bloch_to_density`]) rather than on construction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ZERO: BlochVector = BlochVector::new(0.0, 0.0, 0.0);
    pub const X: BlochVector = BlochVector::new(1.0, 0.0, 0.0);
    pub const Y: BlochVector = BlochVector::new(0.0, 1.0, 0.0);
    pub const Z: BlochVector = BlochVector::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        BlochVector::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: BlochVector) -> BlochVector {
        BlochVector::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: BlochVector) -> f64 {
        (self - other).norm()
    }

    pub fn scale(self, s: f64) -> BlochVector {
        BlochVector::new(self.x * s, self.y * s, self.z * s)
    }

    /// Unit vector along `self`; `None` for the zero vector.
    pub fn normalized(self) -> Option<BlochVector> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(1.0 / n))
    }

    pub fn is_unit(self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// The operator `v·σ`.
    pub fn sigma(self) -> Complex2x2 {
        Complex2x2::pauli_x() * self.x
            + Complex2x2::pauli_y() * self.y
            + Complex2x2::pauli_z() * self.z
    }
}

impl Add for BlochVector {
    type Output = BlochVector;
    fn add(self, o: BlochVector) -> BlochVector {
        BlochVector::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for BlochVector {
    type Output = BlochVector;
    fn sub(self, o: BlochVector) -> BlochVector {
        BlochVector::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for BlochVector {
    type Output = BlochVector;
    fn neg(self) -> BlochVector {
        self.scale(-1.0)
    }
}

impl Mul<f64> for BlochVector {
    type Output = BlochVector;
    fn mul(self, s: f64) -> BlochVector {
        self.scale(s)
    }
}

impl fmt::Display for BlochVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

// ---------------------------------------------------------------------------
// 2x2 complex matrices
// ---------------------------------------------------------------------------

/// Row-major 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex2x2(pub [[Complex64; 2]; 2]);

impl Complex2x2 {
    pub const fn new(m: [[Complex64; 2]; 2]) -> Self {
        Complex2x2(m)
    }

    pub fn zero() -> Self {
        Complex2x2([[ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        Complex2x2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn pauli_x() -> Self {
        Complex2x2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn pauli_y() -> Self {
        Complex2x2([[ZERO, -IM], [IM, ZERO]])
    }

    pub fn pauli_z() -> Self {
        Complex2x2([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// `|a⟩⟨b|` for column vectors given as amplitude pairs.
    pub fn outer(a: [Complex64; 2], b: [Complex64; 2]) -> Self {
        let mut m = [[ZERO; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = a[i] * b[j].conj();
            }
        }
        Complex2x2(m)
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[i][j]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Complex2x2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.0;
        out.iter_mut().flatten().for_each(|e| *e *= s);
        Complex2x2(out)
    }

    /// Largest absolute entry of `self − other`.
    pub fn max_abs_diff(&self, other: &Complex2x2) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale(Complex64::new(0.5, 0.0))
    }

    /// Eigenvalues (ascending) of the Hermitian part of the matrix.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let h = self.hermitian_part();
        let a = h.0[0][0].re;
        let d = h.0[1][1].re;
        let b = h.0[0][1];
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean - radius, mean + radius]
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|e| e.re.is_finite() && e.im.is_finite())
    }
}

impl Add for Complex2x2 {
    type Output = Complex2x2;
    fn add(self, o: Complex2x2) -> Complex2x2 {
        let mut out = self.0;
        for (row, other) in out.iter_mut().zip(o.0) {
            for (x, y) in row.iter_mut().zip(other) {
                *x += y;
            }
        }
        Complex2x2(out)
    }
}

impl Sub for Complex2x2 {
    type Output = Complex2x2;
    fn sub(self, o: Complex2x2) -> Complex2x2 {
        let mut out = self.0;
        for (row, other) in out.iter_mut().zip(o.0) {
            for (x, y) in row.iter_mut().zip(other) {
                *x -= y;
            }
        }
        Complex2x2(out)
    }
}

impl Mul for Complex2x2 {
    type Output = Complex2x2;
    fn mul(self, o: Complex2x2) -> Complex2x2 {
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.0[i][0] * o.0[0][j] + self.0[i][1] * o.0[1][j];
            }
        }
        Complex2x2(out)
    }
}

impl Mul<f64> for Complex2x2 {
    type Output = Complex2x2;
    fn mul(self, s: f64) -> Complex2x2 {
        self.scale(Complex64::new(s, 0.0))
    }
}

// ---------------------------------------------------------------------------
// 4x4 two-qubit operators
// ---------------------------------------------------------------------------

/// Row-major 4×4 complex matrix on qubits A ⊗ B (index `2a + b`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitOperator(pub [[Complex64; 4]; 4]);

impl TwoQubitOperator {
    pub fn zero() -> Self {
        TwoQubitOperator([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = ONE;
        }
        TwoQubitOperator(m)
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[i][j]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = [[ZERO; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.0[j][i].conj();
            }
        }
        TwoQubitOperator(out)
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.0;
        out.iter_mut().flatten().for_each(|e| *e *= s);
        TwoQubitOperator(out)
    }

    pub fn max_abs_diff(&self, other: &TwoQubitOperator) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖U†U − I‖_max ≤ tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self).max_abs_diff(&TwoQubitOperator::identity()) <= tol
    }

    pub fn partial_trace_a(&self) -> Complex2x2 {
        partial_trace_a(self)
    }
}

impl Add for TwoQubitOperator {
    type Output = TwoQubitOperator;
    fn add(self, o: TwoQubitOperator) -> TwoQubitOperator {
        let mut out = self.0;
        for (row, other) in out.iter_mut().zip(o.0) {
            for (x, y) in row.iter_mut().zip(other) {
                *x += y;
            }
        }
        TwoQubitOperator(out)
    }
}

impl Sub for TwoQubitOperator {
    type Output = TwoQubitOperator;
    fn sub(self, o: TwoQubitOperator) -> TwoQubitOperator {
        let mut out = self.0;
        for (row, other) in out.iter_mut().zip(o.0) {
            for (x, y) in row.iter_mut().zip(other) {
                *x -= y;
            }
        }
        TwoQubitOperator(out)
    }
}

impl Mul for TwoQubitOperator {
    type Output = TwoQubitOperator;
    fn mul(self, o: TwoQubitOperator) -> TwoQubitOperator {
        let mut out = [[ZERO; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = (0..4).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        TwoQubitOperator(out)
    }
}

/// Kronecker product: `(a⊗b)[2i+k, 2j+l] = a[i,j]·b[k,l]`.
pub fn tensor(a: &Complex2x2, b: &Complex2x2) -> TwoQubitOperator {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    TwoQubitOperator(out)
}

/// Trace over qubit A: `out[k,l] = Σ_a M[2a+k, 2a+l]`.
pub fn partial_trace_a(m: &TwoQubitOperator) -> Complex2x2 {
    let mut out = [[ZERO; 2]; 2];
    for (k, row) in out.iter_mut().enumerate() {
        for (l, e) in row.iter_mut().enumerate() {
            *e = m.0[k][l] + m.0[2 + k][2 + l];
        }
    }
    Complex2x2(out)
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// Density matrix of one qubit: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState(Complex2x2);

impl QubitState {
    /// Validates the density-matrix invariants at [`EXACT_TOL`].
    pub fn new(m: Complex2x2) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        if !m.is_hermitian(EXACT_TOL) {
            return Err(Error::InvalidState("matrix is not Hermitian".into()));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > EXACT_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let [lo, _] = m.hermitian_eigenvalues();
        if lo < -EXACT_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo:e}")));
        }
        Ok(QubitState(m))
    }

    /// Hermitian part of `m` divided by its trace. Used for conditional states,
    /// whose rounding noise scales with the inverse of the success probability.
    pub(crate) fn from_unnormalized(m: Complex2x2) -> Self {
        let h = m.hermitian_part();
        let tr = h.trace().re;
        QubitState(h.scale(Complex64::new(1.0 / tr, 0.0)))
    }

    pub fn from_bloch(v: BlochVector) -> Result<Self> {
        bloch_to_density(v)
    }

    pub fn maximally_mixed() -> Self {
        QubitState(Complex2x2::identity() * 0.5)
    }

    pub fn matrix(&self) -> &Complex2x2 {
        &self.0
    }

    pub fn bloch(&self) -> BlochVector {
        density_to_bloch(self)
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// `Tr(ρ·op)` (real part).
    pub fn expectation(&self, op: &Complex2x2) -> f64 {
        (self.0 * *op).trace().re
    }
}

/// `ρ = ½(I + v·σ)`.
pub fn bloch_to_density(v: BlochVector) -> Result<QubitState> {
    let norm = v.norm();
    if !v.is_finite() || norm > 1.0 + EXACT_TOL {
        return Err(Error::UnphysicalBloch { norm });
    }
    Ok(QubitState((Complex2x2::identity() + v.sigma()) * 0.5))
}

/// `v_i = Tr(ρ σ_i)`.
pub fn density_to_bloch(rho: &QubitState) -> BlochVector {
    BlochVector::new(
        rho.expectation(&Complex2x2::pauli_x()),
        rho.expectation(&Complex2x2::pauli_y()),
        rho.expectation(&Complex2x2::pauli_z()),
    )
}

/// Normalized pure qubit, amplitudes in the z basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureQubit {
    pub amp0: Complex64,
    pub amp1: Complex64,
}

impl PureQubit {
    /// Requires `|amp0|² + |amp1|² = 1` within [`EXACT_TOL`].
    pub fn new(amp0: Complex64, amp1: Complex64) -> Result<Self> {
        let n = amp0.norm_sqr() + amp1.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > EXACT_TOL {
            return Err(Error::InvalidState(format!(
                "amplitudes have squared norm {n}"
            )));
        }
        Ok(PureQubit { amp0, amp1 })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amp0: Complex64, amp1: Complex64) -> Result<Self> {
        let n = (amp0.norm_sqr() + amp1.norm_sqr()).sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidState(
                "zero or non-finite amplitude vector".into(),
            ));
        }
        Ok(PureQubit {
            amp0: amp0 / n,
            amp1: amp1 / n,
        })
    }

    /// State `c0|0⟩_x + c1|1⟩_x`.
    pub fn from_x_basis(c0: Complex64, c1: Complex64) -> Result<Self> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        PureQubit::new((c0 + c1) * r, (c0 - c1) * r)
    }

    pub fn zero_z() -> Self {
        PureQubit {
            amp0: ONE,
            amp1: ZERO,
        }
    }

    pub fn one_z() -> Self {
        PureQubit {
            amp0: ZERO,
            amp1: ONE,
        }
    }

    pub fn zero_x() -> Self {
        let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        PureQubit { amp0: r, amp1: r }
    }

    pub fn one_x() -> Self {
        let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        PureQubit { amp0: r, amp1: -r }
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.amp0, self.amp1]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureQubit) -> Complex64 {
        self.amp0.conj() * other.amp0 + self.amp1.conj() * other.amp1
    }

    pub fn density(&self) -> QubitState {
        QubitState::from_unnormalized(Complex2x2::outer(self.amplitudes(), self.amplitudes()))
    }

    pub fn bloch(&self) -> BlochVector {
        let c = self.amp0.conj() * self.amp1;
        BlochVector::new(
            2.0 * c.re,
            2.0 * c.im,
            self.amp0.norm_sqr() - self.amp1.norm_sqr(),
        )
    }
}

/// `|⟨ψ|φ⟩|`, clamped to `[0, 1]`.
pub fn fidelity_overlap(psi: &PureQubit, phi: &PureQubit) -> f64 {
    psi.inner(phi).norm().min(1.0)
}

/// `|⟨ψ|φ⟩| = √Tr(ρσ)` for two pure density matrices.
pub fn pure_state_overlap(rho: &QubitState, sigma: &QubitState) -> f64 {
    (rho.0 * sigma.0).trace().re.clamp(0.0, 1.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bloch_to_density_examples() {
        let mixed = bloch_to_density(BlochVector::ZERO).unwrap();
        assert!(mixed.matrix().max_abs_diff(&(Complex2x2::identity() * 0.5)) < 1e-15);

        let up = bloch_to_density(BlochVector::Z).unwrap();
        let expected = Complex2x2::new([[ONE, ZERO], [ZERO, ZERO]]);
        assert!(up.matrix().max_abs_diff(&expected) < 1e-15);

        // ½(I + (σx + σz)/√2), expanded by hand
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let rho = bloch_to_density(BlochVector::new(r, 0.0, r)).unwrap();
        let expected = Complex2x2::new([
            [c(0.5 * (1.0 + r), 0.0), c(0.5 * r, 0.0)],
            [c(0.5 * r, 0.0), c(0.5 * (1.0 - r), 0.0)],
        ]);
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn bloch_to_density_rejects_unphysical() {
        let err = bloch_to_density(BlochVector::new(1.0, 1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::UnphysicalBloch { .. }));
        assert!(bloch_to_density(BlochVector::new(f64::NAN, 0.0, 0.0)).is_err());
        // boundary tolerance
        assert!(bloch_to_density(BlochVector::new(0.0, 0.0, 1.0 + 5e-13)).is_ok());
    }

    #[test]
    fn density_to_bloch_examples() {
        assert_eq!(
            density_to_bloch(&QubitState::maximally_mixed()),
            BlochVector::ZERO
        );
        let up = PureQubit::zero_z().density();
        assert!(density_to_bloch(&up).distance(BlochVector::Z) < 1e-15);
        let v = BlochVector::new(0.3, -0.4, 0.5);
        let back = density_to_bloch(&bloch_to_density(v).unwrap());
        assert!(back.distance(v) < 1e-15);
    }

    #[test]
    fn qubit_state_validation() {
        assert!(QubitState::new(Complex2x2::identity()).is_err()); // trace 2
        assert!(QubitState::new(Complex2x2::pauli_x()).is_err()); // trace 0
        let not_psd = Complex2x2::new([[c(1.5, 0.0), ZERO], [ZERO, c(-0.5, 0.0)]]);
        assert!(QubitState::new(not_psd).is_err());
        let not_herm = Complex2x2::new([[c(0.5, 0.0), c(0.1, 0.0)], [ZERO, c(0.5, 0.0)]]);
        assert!(QubitState::new(not_herm).is_err());
    }

    #[test]
    fn tensor_examples() {
        let id = tensor(&Complex2x2::identity(), &Complex2x2::identity());
        assert_eq!(id, TwoQubitOperator::identity());

        let xx = tensor(&Complex2x2::pauli_x(), &Complex2x2::pauli_x());
        for i in 0..4 {
            for j in 0..4 {
                let want = if i + j == 3 { ONE } else { ZERO };
                assert_eq!(xx.get(i, j), want, "({i},{j})");
            }
        }

        let z = Complex2x2::pauli_z();
        let i2 = Complex2x2::identity();
        let lhs = tensor(&z, &i2) * tensor(&i2, &z);
        assert!(lhs.max_abs_diff(&tensor(&z, &z)) < 1e-15);
    }

    #[test]
    fn partial_trace_examples() {
        let out = partial_trace_a(&TwoQubitOperator::identity());
        assert!(out.max_abs_diff(&(Complex2x2::identity() * 2.0)) < 1e-15);

        let ra = bloch_to_density(BlochVector::new(0.1, 0.2, -0.3)).unwrap();
        let rb = bloch_to_density(BlochVector::new(-0.5, 0.0, 0.6)).unwrap();
        let out = partial_trace_a(&tensor(ra.matrix(), rb.matrix()));
        assert!(out.max_abs_diff(rb.matrix()) < 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        let psi = PureQubit::zero_x();
        assert!((fidelity_overlap(&psi, &psi) - 1.0).abs() < 1e-15);
        assert_eq!(
            fidelity_overlap(&PureQubit::zero_z(), &PureQubit::one_z()),
            0.0
        );

        // source pair at η = 1, written out in the x basis
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let psi1 = PureQubit::from_x_basis(c(r, 0.0), c(-r, 0.0)).unwrap();
        let n = 3f64.sqrt();
        let psi2 = PureQubit::from_x_basis(c((1.0 + r) / n, 0.0), c((1.0 - r) / n, 0.0)).unwrap();
        assert!((fidelity_overlap(&psi1, &psi2) - 0.577_350_269_189_625_8).abs() < 1e-15);
        assert!((fidelity_overlap(&psi2, &psi1) - fidelity_overlap(&psi1, &psi2)).abs() < 1e-16);
    }

    #[test]
    fn x_basis_convention() {
        assert!(PureQubit::zero_x().bloch().distance(BlochVector::X) < 1e-15);
        assert!(PureQubit::one_x().bloch().distance(-BlochVector::X) < 1e-15);
        let i_state = PureQubit::normalized(ONE, IM).unwrap();
        assert!(i_state.bloch().distance(BlochVector::Y) < 1e-15);
    }

    #[test]
    fn hermitian_eigenvalues_of_pauli() {
        for p in [
            Complex2x2::pauli_x(),
            Complex2x2::pauli_y(),
            Complex2x2::pauli_z(),
        ] {
            let [lo, hi] = p.hermitian_eigenvalues();
            assert!((lo + 1.0).abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
        }
    }

    fn ball_vector() -> impl Strategy<Value = BlochVector> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.0..=1.0f64)
            .prop_filter_map("zero direction", |(x, y, z, r)| {
                BlochVector::new(x, y, z).normalized().map(|u| u * r)
            })
    }

    fn matrix2() -> impl Strategy<Value = Complex2x2> {
        proptest::array::uniform8(-1.0..1.0f64).prop_map(|v| {
            Complex2x2::new([
                [c(v[0], v[1]), c(v[2], v[3])],
                [c(v[4], v[5]), c(v[6], v[7])],
            ])
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn bloch_round_trip(v in ball_vector()) {
            let rho = bloch_to_density(v).unwrap();
            prop_assert!(density_to_bloch(&rho).distance(v) <= EXACT_TOL);
            prop_assert!(QubitState::new(*rho.matrix()).is_ok());
            prop_assert!((rho.purity() - 0.5 * (1.0 + v.dot(v))).abs() <= EXACT_TOL);
        }
    }

    proptest! {
        #[test]
        fn tensor_mixed_product(a in matrix2(), b in matrix2(), cm in matrix2(), d in matrix2()) {
            let lhs = tensor(&a, &b) * tensor(&cm, &d);
            let rhs = tensor(&(a * cm), &(b * d));
            prop_assert!(lhs.max_abs_diff(&rhs) <= EXACT_TOL);
        }

        #[test]
        fn tensor_bilinear(a in matrix2(), a2 in matrix2(), b in matrix2(), s in -2.0..2.0f64) {
            let lhs = tensor(&(a + a2 * s), &b);
            let rhs = tensor(&a, &b) + tensor(&a2, &b).scale(c(s, 0.0));
            prop_assert!(lhs.max_abs_diff(&rhs) <= EXACT_TOL);
        }

        #[test]
        fn partial_trace_of_product(x in matrix2(), v in ball_vector()) {
            let rho = bloch_to_density(v).unwrap();
            let out = partial_trace_a(&tensor(&x, rho.matrix()));
            let want = rho.matrix().scale(x.trace());
            prop_assert!(out.max_abs_diff(&want) <= EXACT_TOL);
        }

        #[test]
        fn partial_trace_preserves_trace(entries in proptest::array::uniform32(-1.0..1.0f64)) {
            let mut m = TwoQubitOperator::zero();
            for i in 0..4 {
                for j in 0..4 {
                    let k = 2 * (4 * i + j);
                    m.0[i][j] = c(entries[k], entries[k + 1]);
                }
            }
            // Hermitian 4x4
            let h = m + m.adjoint();
            // direct summation oracle over the diagonal
            let direct: Complex64 = (0..4).map(|i| h.0[i][i]).sum();
            prop_assert!((partial_trace_a(&h).trace() - direct).norm() <= EXACT_TOL);
        }
    }
}
