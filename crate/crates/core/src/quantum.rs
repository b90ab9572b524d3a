//! Complex linear algebra for the three-level Λ system.
//!
//! Basis order is always `(|0⟩, |e⟩, |1⟩)`. The qubit subspace is spanned by
//! indices 0 and 2.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const IDX_0: usize = 0;
pub const IDX_E: usize = 1;
pub const IDX_1: usize = 2;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense 3×3 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Complex3x3(pub [[C64; 3]; 3]);

impl Default for Complex3x3 {
    fn default() -> Self {
        Self::zeros()
    }
}

impl Complex3x3 {
    pub const fn zeros() -> Self {
        Self([[ZERO; 3]; 3])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_real_diag(d: [f64; 3]) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            m.0[i][i] = C64::new(d[i], 0.0);
        }
        m
    }

    /// `|i⟩⟨j|`
    pub fn unit(i: usize, j: usize) -> Self {
        let mut m = Self::zeros();
        m.0[i][j] = ONE;
        m
    }

    /// `|a⟩⟨b|`
    pub fn outer(a: &[C64; 3], b: &[C64; 3]) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = a[i] * b[j].conj();
            }
        }
        m
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    pub fn scale_real(&self, s: f64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    /// `[self, other] = self·other − other·self`
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn mul_vec(&self, v: &[C64; 3]) -> [C64; 3] {
        let mut out = [ZERO; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i][0] * v[0] + self.0[i][1] * v[1] + self.0[i][2] * v[2];
        }
        out
    }

    /// `⟨a|M|b⟩`
    pub fn sandwich(&self, a: &[C64; 3], b: &[C64; 3]) -> C64 {
        let mb = self.mul_vec(b);
        a.iter().zip(mb.iter()).map(|(x, y)| x.conj() * y).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |M − M†|`
    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.dagger()).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Uses the trigonometric solution of the characteristic cubic; only the
    /// Hermitian part of `self` is considered.
    pub fn hermitian_eigenvalues(&self) -> [f64; 3] {
        let a = self.0[0][0].re;
        let b = self.0[1][1].re;
        let c = self.0[2][2].re;
        let d = 0.5 * (self.0[0][1] + self.0[1][0].conj());
        let e = 0.5 * (self.0[1][2] + self.0[2][1].conj());
        let f = 0.5 * (self.0[0][2] + self.0[2][0].conj());
        let p1 = d.norm_sqr() + e.norm_sqr() + f.norm_sqr();
        let q = (a + b + c) / 3.0;
        if p1 == 0.0 {
            let mut ev = [a, b, c];
            ev.sort_by(f64::total_cmp);
            return ev;
        }
        let p2 = (a - q).powi(2) + (b - q).powi(2) + (c - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        // B = (A − qI)/p, r = det(B)/2
        let (ba, bb, bc) = ((a - q) / p, (b - q) / p, (c - q) / p);
        let (bd, be, bf) = (d / p, e / p, f / p);
        let det = ba * bb * bc + 2.0 * (bd * be * bf.conj()).re
            - ba * be.norm_sqr()
            - bb * bf.norm_sqr()
            - bc * bd.norm_sqr();
        let r = (det / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let hi = q + 2.0 * p * phi.cos();
        let lo = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
        let mid = 3.0 * q - hi - lo;
        [lo, mid, hi]
    }
}

impl Index<(usize, usize)> for Complex3x3 {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Complex3x3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl Add for Complex3x3 {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for Complex3x3 {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl Sub for Complex3x3 {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl Neg for Complex3x3 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_real(-1.0)
    }
}

impl Mul for Complex3x3 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] =
                    self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j] + self.0[i][2] * rhs.0[2][j];
            }
        }
        m
    }
}

/// Normalized state of the three-level system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureState3([C64; 3]);

impl PureState3 {
    pub const NORM_TOL: f64 = 1e-12;

    /// Checks `‖ψ‖² = 1` to [`Self::NORM_TOL`].
    pub fn new(amps: [C64; 3]) -> Result<Self> {
        let n = norm_sqr(&amps);
        if !n.is_finite() || (n - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {n} is not 1")));
        }
        Ok(Self(amps))
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(amps: [C64; 3]) -> Result<Self> {
        let n = norm_sqr(&amps).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(Self(amps.map(|z| z / n)))
    }

    pub fn basis(i: usize) -> Self {
        let mut a = [ZERO; 3];
        a[i] = ONE;
        Self(a)
    }

    pub fn ground0() -> Self {
        Self::basis(IDX_0)
    }

    pub fn excited() -> Self {
        Self::basis(IDX_E)
    }

    pub fn ground1() -> Self {
        Self::basis(IDX_1)
    }

    /// Embeds a qubit state `a|0⟩ + b|1⟩` with zero `|e⟩` amplitude.
    pub fn from_qubit(q: &QubitState) -> Self {
        Self([q.0[0], ZERO, q.0[1]])
    }

    pub fn amplitudes(&self) -> &[C64; 3] {
        &self.0
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn projector(&self) -> Complex3x3 {
        Complex3x3::outer(&self.0, &self.0)
    }
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Normalized qubit state in the `(|0⟩, |1⟩)` basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitState(pub(crate) [C64; 2]);

impl QubitState {
    pub fn new(a0: C64, a1: C64) -> Result<Self> {
        let n = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidState("cannot normalize a zero qubit vector".into()));
        }
        Ok(Self([a0 / n, a1 / n]))
    }

    pub fn zero() -> Self {
        Self([ONE, ZERO])
    }

    pub fn one() -> Self {
        Self([ZERO, ONE])
    }

    /// `cos(polar/2)|0⟩ + e^{i·azimuth} sin(polar/2)|1⟩`
    pub fn from_bloch(polar: f64, azimuth: f64) -> Self {
        Self([
            C64::new((polar / 2.0).cos(), 0.0),
            C64::from_polar((polar / 2.0).sin(), azimuth),
        ])
    }

    pub fn amplitudes(&self) -> &[C64; 2] {
        &self.0
    }

    /// `|⟨self|other⟩|²`
    pub fn overlap_sqr(&self, other: &Self) -> f64 {
        (self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]).norm_sqr()
    }
}

/// Target holonomic rotation: axis `(θ, φ)` and geometric phase `β`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateParams {
    pub theta: f64,
    pub phi: f64,
    pub beta: f64,
}

impl GateParams {
    pub fn new(theta: f64, phi: f64, beta: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidArgument("gate angles must be finite".into()));
        }
        Ok(Self { theta, phi, beta })
    }
}

/// 2×2 unitary on the qubit subspace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitUnitary(pub [[C64; 2]; 2]);

impl QubitUnitary {
    pub fn apply(&self, q: &QubitState) -> QubitState {
        let [a, b] = q.0;
        QubitState([self.0[0][0] * a + self.0[0][1] * b, self.0[1][0] * a + self.0[1][1] * b])
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// `max |U†U − I|`
    pub fn unitarity_defect(&self) -> f64 {
        let u = &self.0;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut s = u[0][i].conj() * u[0][j] + u[1][i].conj() * u[1][j];
                if i == j {
                    s -= ONE;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    /// Distance to `other` after removing the best global phase.
    pub fn phase_insensitive_distance(&self, other: &Self) -> f64 {
        let overlap: C64 = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| other.0[i][j].conj() * self.0[i][j])
            .sum();
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
        (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| (self.0[i][j] - phase * other.0[i][j]).norm())
            .fold(0.0, f64::max)
    }
}

/// Ideal qubit-space propagator `e^{iβ/2}·exp(−i(β/2) n̂·σ⃗)` of the loop.
pub fn gate_unitary(params: &GateParams) -> QubitUnitary {
    let GateParams { theta, phi, beta } = *params;
    let (s, c) = (beta / 2.0).sin_cos();
    let i = C64::i();
    let glob = C64::from_polar(1.0, beta / 2.0);
    QubitUnitary([
        [
            glob * (c - i * s * theta.cos()),
            glob * (-i * s * theta.sin() * C64::from_polar(1.0, -phi)),
        ],
        [
            glob * (-i * s * theta.sin() * C64::from_polar(1.0, phi)),
            glob * (c + i * s * theta.cos()),
        ],
    ])
}

/// Bright and dark states `(|b⟩, |d⟩)` for mixing angle `theta` and drive
/// phases `(phi0, phi1)`.
pub fn bright_dark_states(theta: f64, phi0: f64, phi1: f64) -> (PureState3, PureState3) {
    let (s, c) = (theta / 2.0).sin_cos();
    let bright = [C64::from_polar(s, phi0), ZERO, -C64::from_polar(c, phi1)];
    let dark = [C64::from_polar(c, -phi1), ZERO, C64::from_polar(s, -phi0)];
    (PureState3(bright), PureState3(dark))
}

/// Rotating-frame Hamiltonian with excited-state detuning, in angular units.
pub fn hamiltonian(omega0: C64, omega1: C64, delta: f64) -> Complex3x3 {
    Complex3x3([
        [ZERO, 0.5 * omega0, ZERO],
        [0.5 * omega0.conj(), C64::new(delta, 0.0), 0.5 * omega1.conj()],
        [ZERO, 0.5 * omega1, ZERO],
    ])
}

/// Density matrix of the three-level system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix(Complex3x3);

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-8;
    pub const EIGEN_TOL: f64 = 1e-8;

    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: Complex3x3) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidState("density matrix has non-finite entries".into()));
        }
        let herm = m.hermiticity_defect();
        if herm > Self::HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > Self::TRACE_TOL {
            return Err(Error::InvalidState(format!("density matrix trace {tr} is not 1")));
        }
        let lo = m.hermitian_eigenvalues()[0];
        if lo < -Self::EIGEN_TOL {
            return Err(Error::InvalidState(format!("density matrix has eigenvalue {lo:e}")));
        }
        Ok(Self(m))
    }

    /// Wraps an integrator output without validation.
    pub(crate) fn from_raw(m: Complex3x3) -> Self {
        Self(m)
    }

    pub fn pure(psi: &PureState3) -> Self {
        Self(psi.projector())
    }

    pub fn from_qubit(q: &QubitState) -> Self {
        Self::pure(&PureState3::from_qubit(q))
    }

    pub fn matrix(&self) -> &Complex3x3 {
        &self.0
    }

    /// `(P₀, P_e, P₁)`
    pub fn populations(&self) -> [f64; 3] {
        [self.0[(IDX_0, IDX_0)].re, self.0[(IDX_E, IDX_E)].re, self.0[(IDX_1, IDX_1)].re]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0.hermitian_eigenvalues()[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn assert_u_eq(u: &QubitUnitary, expected: [[C64; 2]; 2], tol: f64) {
        for i in 0..2 {
            for j in 0..2 {
                assert!((u.0[i][j] - expected[i][j]).norm() <= tol, "{i}{j}: {} vs {}", u.0[i][j], expected[i][j]);
            }
        }
    }

    #[test]
    fn not_gate_is_pauli_x() {
        let u = gate_unitary(&GateParams::new(FRAC_PI_2, 0.0, PI).unwrap());
        assert_u_eq(&u, [[ZERO, ONE], [ONE, ZERO]], 1e-12);
    }

    #[test]
    fn zero_beta_is_identity() {
        for &(t, p) in &[(0.3, 1.2), (2.0, 5.0), (PI, 0.0)] {
            let u = gate_unitary(&GateParams::new(t, p, 0.0).unwrap());
            assert_u_eq(&u, [[ONE, ZERO], [ZERO, ONE]], 1e-14);
        }
    }

    #[test]
    fn hadamard_assignment() {
        let u = gate_unitary(&GateParams::new(FRAC_PI_4, 0.0, PI).unwrap());
        let h = FRAC_1_SQRT_2;
        assert_u_eq(&u, [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]], 1e-12);
    }

    #[test]
    fn gate_unitary_is_unitary_with_det_phase() {
        for k in 0..50 {
            let x = k as f64;
            let g = GateParams::new((x * 0.37) % (2.0 * PI), (x * 1.13) % (2.0 * PI), (x * 0.71) % (2.0 * PI)).unwrap();
            let u = gate_unitary(&g);
            assert!(u.unitarity_defect() < 1e-12);
            assert!((u.det() - C64::from_polar(1.0, g.beta)).norm() < 1e-12);
        }
    }

    #[test]
    fn bright_dark_examples() {
        let (b, d) = bright_dark_states(PI, 0.0, 0.0);
        assert_abs_diff_eq!(b.inner(&PureState3::ground0()).norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.inner(&PureState3::ground1()).norm(), 1.0, epsilon = 1e-12);
        let (b, d) = bright_dark_states(0.0, 0.0, 0.0);
        assert!((b.amplitudes()[2] + ONE).norm() < 1e-12);
        assert_abs_diff_eq!(d.inner(&PureState3::ground0()).norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bright_dark_orthonormal() {
        for k in 0..40 {
            let x = k as f64;
            let (b, d) = bright_dark_states(x * 0.41, x * 1.7, -x * 0.3);
            assert!(b.inner(&d).norm() < 1e-12);
            assert_abs_diff_eq!(b.inner(&b).re, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(d.inner(&d).re, 1.0, epsilon = 1e-12);
            assert_eq!(b.amplitudes()[1], ZERO);
            assert_eq!(d.amplitudes()[1], ZERO);
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let h = hamiltonian(ZERO, ZERO, 3.0);
        assert_eq!(h, Complex3x3::from_real_diag([0.0, 3.0, 0.0]));
        let h = hamiltonian(c(0.0, 2.0), c(-2.0, 0.0), 4.0);
        let expected = Complex3x3([
            [ZERO, c(0.0, 1.0), ZERO],
            [c(0.0, -1.0), c(4.0, 0.0), c(-1.0, 0.0)],
            [ZERO, c(-1.0, 0.0), ZERO],
        ]);
        assert_eq!(h, expected);
        assert_eq!(h, h.dagger());
    }

    #[test]
    fn dark_state_decouples() {
        for k in 0..30 {
            let x = k as f64 + 0.5;
            let (theta, p0, p1, amp) = (x * 0.23, x * 0.77, -x * 1.31, 1.0 + 0.1 * x);
            let o0 = C64::from_polar(2.0 * (theta / 2.0).sin() * amp, p0);
            let o1 = C64::from_polar(-2.0 * (theta / 2.0).cos() * amp, p1);
            let h = hamiltonian(o0, o1, 0.0);
            let (b, d) = bright_dark_states(theta, p0, p1);
            let e = PureState3::excited();
            assert!(h.sandwich(e.amplitudes(), d.amplitudes()).norm() < 1e-12);
            assert!(h.sandwich(b.amplitudes(), d.amplitudes()).norm() < 1e-12);
            assert!(h.sandwich(b.amplitudes(), b.amplitudes()).norm() < 1e-12);
            assert!(h.sandwich(d.amplitudes(), d.amplitudes()).norm() < 1e-12);
            assert!((h.sandwich(e.amplitudes(), b.amplitudes()) - c(amp, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_of_known_matrices() {
        let m = Complex3x3::from_real_diag([0.2, -0.1, 0.9]);
        let ev = m.hermitian_eigenvalues();
        assert_abs_diff_eq!(ev[0], -0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[2], 0.9, epsilon = 1e-12);
        // pure state: eigenvalues (0, 0, 1)
        let psi = PureState3::normalized([c(1.0, 0.0), c(0.0, 1.0), c(0.5, -0.5)]).unwrap();
        let ev = psi.projector().hermitian_eigenvalues();
        assert_abs_diff_eq!(ev[0], 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(ev[1], 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(ev[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(Complex3x3::from_real_diag([0.5, 0.0, 0.5])).is_ok());
        assert!(DensityMatrix::new(Complex3x3::from_real_diag([0.5, 0.0, 0.6])).is_err());
        assert!(DensityMatrix::new(Complex3x3::from_real_diag([1.2, 0.0, -0.2])).is_err());
        let mut m = Complex3x3::from_real_diag([0.5, 0.0, 0.5]);
        m[(0, 2)] = c(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        assert!(PureState3::new([ONE, ONE, ZERO]).is_err());
    }
}
