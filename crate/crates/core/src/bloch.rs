//! Two-qubit density matrices, their Bloch decomposition and partial
//! transposition.
//!
//! Basis order is |ee>, |eg>, |ge>, |gg> with |e> the +1 eigenstate of
//! sigma_z, so an X-shaped state has nonzero entries only on the diagonal
//! and the anti-diagonal.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-10;

pub const BASIS_LABELS: [&str; 4] = ["ee", "eg", "ge", "gg"];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Identity followed by sigma_x, sigma_y, sigma_z.
pub fn pauli(index: usize) -> Matrix2<Complex64> {
    match index {
        0 => Matrix2::new(ONE, ZERO, ZERO, ONE),
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -I, I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("pauli index {index} out of range"),
    }
}

pub fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// Which factor of the tensor product an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitDensityMatrix {
    m: Matrix4<Complex64>,
}

impl TwoQubitDensityMatrix {
    /// Validating constructor: Hermitian, unit trace and positive
    /// semidefinite within the module tolerances.
    pub fn new(m: Matrix4<Complex64>) -> Result<Self> {
        let rho = Self { m };
        rho.check_hermitian()?;
        rho.check_trace()?;
        rho.check_positive()?;
        Ok(rho)
    }

    /// Wraps a matrix without any checks. Used for intermediate and
    /// reconstructed matrices whose positivity is not guaranteed.
    pub fn new_unchecked(m: Matrix4<Complex64>) -> Self {
        Self { m }
    }

    pub fn from_pure(psi: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParams("state vector has zero or non-finite norm".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|a| a / norm).collect();
        Ok(Self { m: Matrix4::from_fn(|r, c| v[r] * v[c].conj()) })
    }

    pub fn maximally_mixed() -> Self {
        Self { m: Matrix4::identity() * Complex64::new(0.25, 0.0) }
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.m
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn purity(&self) -> f64 {
        (self.m * self.m).trace().re
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        linalg::hermitian4_eigenvalues(&self.m)
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.m[(i, j)] - self.m[(j, i)].conj()).norm());
            }
        }
        if worst.is_nan() || worst > HERMITICITY_TOL {
            return Err(Error::InvalidState {
                invariant: "hermiticity",
                detail: format!("max |M_ij - conj(M_ji)| = {worst:e}"),
            });
        }
        Ok(())
    }

    pub fn check_trace(&self) -> Result<()> {
        let dev = (self.trace() - ONE).norm();
        if dev.is_nan() || dev > TRACE_TOL {
            return Err(Error::InvalidState { invariant: "unit trace", detail: format!("|Tr - 1| = {dev:e}") });
        }
        Ok(())
    }

    pub fn check_positive(&self) -> Result<()> {
        let min = self.eigenvalues()[0];
        if min.is_nan() || min < -POSITIVITY_TOL {
            return Err(Error::InvalidState {
                invariant: "positive semidefinite",
                detail: format!("min eigenvalue = {min:e}"),
            });
        }
        Ok(())
    }

    /// Applies `U_A (x) U_B` by conjugation.
    pub fn rotate_locally(&self, ua: &Matrix2<Complex64>, ub: &Matrix2<Complex64>) -> Self {
        let u = kron(ua, ub);
        Self { m: u * self.m * u.adjoint() }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&StateJson::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: StateJson = serde_json::from_str(text)?;
        doc.try_into()
    }
}

/// Wire form of a density matrix: a 4x4 nested array of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub basis: Vec<String>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl From<&TwoQubitDensityMatrix> for StateJson {
    fn from(rho: &TwoQubitDensityMatrix) -> Self {
        Self {
            basis: BASIS_LABELS.iter().map(|s| s.to_string()).collect(),
            matrix: (0..4).map(|r| (0..4).map(|c| [rho.m[(r, c)].re, rho.m[(r, c)].im]).collect()).collect(),
        }
    }
}

impl TryFrom<StateJson> for TwoQubitDensityMatrix {
    type Error = Error;

    fn try_from(doc: StateJson) -> Result<Self> {
        if doc.basis != BASIS_LABELS {
            return Err(Error::InvalidParams(format!("basis must be {BASIS_LABELS:?}, got {:?}", doc.basis)));
        }
        if doc.matrix.len() != 4 || doc.matrix.iter().any(|row| row.len() != 4) {
            return Err(Error::InvalidParams("matrix must be 4x4".into()));
        }
        let m = Matrix4::from_fn(|r, c| {
            let [re, im] = doc.matrix[r][c];
            Complex64::new(re, im)
        });
        // Loaded states keep whatever came in; callers validate if needed.
        Ok(Self::new_unchecked(m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochDecomposition {
    /// Bloch vector of qubit A.
    pub x: Vector3<f64>,
    /// Bloch vector of qubit B.
    pub y: Vector3<f64>,
    /// Correlation matrix `t_ij = Tr[rho (sigma_i (x) sigma_j)]`.
    pub t: Matrix3<f64>,
}

impl BlochDecomposition {
    pub fn zero() -> Self {
        Self { x: Vector3::zeros(), y: Vector3::zeros(), t: Matrix3::zeros() }
    }
}

pub fn decompose(rho: &TwoQubitDensityMatrix) -> Result<BlochDecomposition> {
    rho.check_hermitian()?;
    rho.check_trace()?;
    Ok(bloch_components(rho))
}

/// [`decompose`] without the validity checks.
pub(crate) fn bloch_components(rho: &TwoQubitDensityMatrix) -> BlochDecomposition {
    let expect = |i: usize, j: usize| (rho.m * kron(&pauli(i), &pauli(j))).trace().re;
    BlochDecomposition {
        x: Vector3::from_fn(|i, _| expect(i + 1, 0)),
        y: Vector3::from_fn(|j, _| expect(0, j + 1)),
        t: Matrix3::from_fn(|i, j| expect(i + 1, j + 1)),
    }
}

/// Inverse of [`decompose`]. The result is Hermitian with unit trace but
/// may fail positivity, so it is returned unchecked.
pub fn reconstruct(b: &BlochDecomposition) -> TwoQubitDensityMatrix {
    let mut m = Matrix4::<Complex64>::identity();
    for i in 0..3 {
        m += kron(&pauli(i + 1), &pauli(0)) * Complex64::from(b.x[i]);
        m += kron(&pauli(0), &pauli(i + 1)) * Complex64::from(b.y[i]);
        for j in 0..3 {
            m += kron(&pauli(i + 1), &pauli(j + 1)) * Complex64::from(b.t[(i, j)]);
        }
    }
    TwoQubitDensityMatrix::new_unchecked(m * Complex64::from(0.25))
}

/// Transposes the indices of the chosen party. The result can have
/// negative eigenvalues, so it is returned as a bare matrix.
pub fn partial_transpose(rho: &TwoQubitDensityMatrix, party: Party) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, c| {
        let (ra, rb, ca, cb) = (r / 2, r % 2, c / 2, c % 2);
        let (ra, rb, ca, cb) = match party {
            Party::A => (ca, rb, ra, cb),
            Party::B => (ra, cb, ca, rb),
        };
        rho.m[(2 * ra + rb, 2 * ca + cb)]
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Pure,
    Mixed,
    XShape,
}

fn gaussian_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Deterministic random states for test harnesses.
///
/// `Pure` normalizes a complex Gaussian 4-vector, `Mixed` normalizes
/// `M M^dagger` for a complex Gaussian `M`, and `XShape` draws a random
/// diagonal plus anti-diagonal coherences inside the positivity disc of
/// each 2x2 block.
pub fn random_state(seed: u64, kind: StateKind) -> TwoQubitDensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        StateKind::Pure => {
            let psi = std::array::from_fn(|_| gaussian_complex(&mut rng));
            TwoQubitDensityMatrix::from_pure(psi).expect("gaussian vector is nonzero")
        }
        StateKind::Mixed => {
            let g = Matrix4::from_fn(|_, _| gaussian_complex(&mut rng));
            let m = g * g.adjoint();
            let tr = m.trace();
            let mut m = m / tr;
            // Force exact Hermiticity after the division.
            for i in 0..4 {
                m[(i, i)].im = 0.0;
                for j in (i + 1)..4 {
                    m[(j, i)] = m[(i, j)].conj();
                }
            }
            TwoQubitDensityMatrix::new_unchecked(m)
        }
        StateKind::XShape => {
            let diag: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() + 1e-3);
            let total: f64 = diag.iter().sum();
            let p = diag.map(|d| d / total);
            let mut coherence = |a: f64, b: f64| {
                let radius = rng.random::<f64>() * (a * b).sqrt();
                let phase = rng.random::<f64>() * std::f64::consts::TAU;
                Complex64::from_polar(radius, phase)
            };
            let rho14 = coherence(p[0], p[3]);
            let rho23 = coherence(p[1], p[2]);
            TwoQubitDensityMatrix::new_unchecked(x_shaped([p[0], p[1], p[2], p[3]], rho14, rho23))
        }
    }
}

/// Builds the X-pattern matrix from its diagonal and two coherences.
pub fn x_shaped(diag: [f64; 4], rho14: Complex64, rho23: Complex64) -> Matrix4<Complex64> {
    let mut m = Matrix4::from_diagonal(&nalgebra::Vector4::from(diag.map(Complex64::from)));
    m[(0, 3)] = rho14;
    m[(3, 0)] = rho14.conj();
    m[(1, 2)] = rho23;
    m[(2, 1)] = rho23.conj();
    m
}

/// Haar-ish random single-qubit unitary from a normalized quaternion.
pub fn random_unitary(rng: &mut ChaCha8Rng) -> Matrix2<Complex64> {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let [a, b, c, d] = q.map(|v| v / n);
    Matrix2::new(Complex64::new(a, b), Complex64::new(c, d), Complex64::new(-c, d), Complex64::new(a, -b))
}
