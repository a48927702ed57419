//! Brute-force counterparts of the closed-form measures.
//!
//! Each oracle works from the density matrix directly (operator traces,
//! explicit measurement channels, a library eigensolver) and searches over
//! measurement directions on a polar grid followed by local refinement.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bloch::{kron, partial_transpose, pauli, Party, TwoQubitDensityMatrix};
use crate::error::{Error, Result};

/// Points per axis of the local refinement grid around the incumbent.
const LOCAL_POINTS: usize = 17;
/// Points per axis for the four-dimensional CHSH refinement.
const PAIR_LOCAL_POINTS: usize = 9;
const SHRINK: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionGrid {
    pub polar_steps: usize,
    pub azimuth_steps: usize,
    pub refine_rounds: usize,
}

impl Default for DirectionGrid {
    fn default() -> Self {
        Self { polar_steps: 24, azimuth_steps: 48, refine_rounds: 3 }
    }
}

impl DirectionGrid {
    /// Checks the minimum resolution for oracle-grade accuracy.
    pub fn validate(&self) -> Result<()> {
        if self.polar_steps < 24 || self.azimuth_steps < 48 || self.refine_rounds < 2 {
            return Err(Error::InvalidParams(format!(
                "direction grid needs polar >= 24, azimuth >= 48, refine >= 2; got {}, {}, {}",
                self.polar_steps, self.azimuth_steps, self.refine_rounds
            )));
        }
        Ok(())
    }

    /// Unit vectors on the grid. The poles appear once each, as exact
    /// `+z` and `-z`.
    pub fn directions(&self) -> Vec<Vector3<f64>> {
        let p = self.polar_steps.max(2);
        let q = self.azimuth_steps.max(1);
        let mut out = vec![Vector3::z()];
        for i in 1..p {
            let theta = std::f64::consts::PI * i as f64 / p as f64;
            for j in 0..q {
                let phi = std::f64::consts::TAU * j as f64 / q as f64;
                out.push(Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()));
            }
        }
        out.push(-Vector3::z());
        out
    }

    fn initial_half_width(&self) -> f64 {
        let p = self.polar_steps.max(2) as f64;
        let q = self.azimuth_steps.max(1) as f64;
        (std::f64::consts::PI / p).max(std::f64::consts::TAU / q)
    }
}

/// Orthonormal basis of the plane tangent to the sphere at `n`.
fn tangent_basis(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let axis = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
        Vector3::x()
    } else if n.y.abs() <= n.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let e1 = n.cross(&axis).normalize();
    let e2 = n.cross(&e1);
    (e1, e2)
}

fn offsets(points: usize, half_width: f64) -> Vec<f64> {
    let m = (points - 1) as f64;
    (0..points).map(|k| half_width * (2.0 * k as f64 / m - 1.0)).collect()
}

/// Outcome of a search over one unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSearch {
    pub value: f64,
    pub direction: Vector3<f64>,
    /// Best value after the coarse grid and after each refinement round.
    pub history: Vec<f64>,
}

/// Maximizes `f` over the unit sphere. Only strict improvements replace the
/// incumbent, so ties keep the earliest grid point.
fn maximize_sphere<F: Fn(&Vector3<f64>) -> f64>(f: F, grid: &DirectionGrid) -> SphereSearch {
    let mut best_n = Vector3::z();
    let mut best = f64::NEG_INFINITY;
    for n in grid.directions() {
        let v = f(&n);
        if v > best {
            best = v;
            best_n = n;
        }
    }
    let mut history = vec![best];
    let mut h = grid.initial_half_width();
    for _ in 0..grid.refine_rounds {
        let (e1, e2) = tangent_basis(&best_n);
        let center = best_n;
        let steps = offsets(LOCAL_POINTS, h);
        for &a in &steps {
            for &b in &steps {
                let n = (center + e1 * a + e2 * b).normalize();
                let v = f(&n);
                if v > best {
                    best = v;
                    best_n = n;
                }
            }
        }
        history.push(best);
        h *= SHRINK;
    }
    SphereSearch { value: best, direction: best_n, history }
}

fn spin(n: &Vector3<f64>) -> Matrix2<Complex64> {
    pauli(1) * Complex64::from(n.x) + pauli(2) * Complex64::from(n.y) + pauli(3) * Complex64::from(n.z)
}

fn expectation(rho: &TwoQubitDensityMatrix, op: &Matrix4<Complex64>) -> f64 {
    (rho.matrix() * op).trace().re
}

/// Result of the projective measurement along `n` on qubit A, averaged over
/// outcomes.
pub fn measured_on_a(rho: &TwoQubitDensityMatrix, n: &Vector3<f64>) -> Matrix4<Complex64> {
    let id = pauli(0);
    let s = spin(n);
    let half = Complex64::from(0.5);
    let plus = kron(&((id + s) * half), &id);
    let minus = kron(&((id - s) * half), &id);
    let m = rho.matrix();
    plus * m * plus + minus * m * minus
}

/// Twice the squared Hilbert-Schmidt distance between `rho` and its image
/// under measurement along `n` on qubit A.
pub fn measurement_disturbance(rho: &TwoQubitDensityMatrix, n: &Vector3<f64>) -> f64 {
    let d = rho.matrix() - measured_on_a(rho, n);
    2.0 * d.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Minimal measurement disturbance over directions on qubit A.
pub fn discord_search(rho: &TwoQubitDensityMatrix, grid: &DirectionGrid) -> SphereSearch {
    let mut s = maximize_sphere(|n| -measurement_disturbance(rho, n), grid);
    s.value = -s.value;
    for v in &mut s.history {
        *v = -*v;
    }
    s
}

pub fn discord_bruteforce(rho: &TwoQubitDensityMatrix, grid: &DirectionGrid) -> f64 {
    discord_search(rho, grid).value
}

/// Local expectations and the covariance `<s_i s_j> - <s_i><s_j>`, each
/// from its own operator trace.
fn covariance_by_traces(rho: &TwoQubitDensityMatrix) -> (Matrix3<f64>, Matrix3<f64>) {
    let id = pauli(0);
    let a: [f64; 3] = std::array::from_fn(|i| expectation(rho, &kron(&pauli(i + 1), &id)));
    let b: [f64; 3] = std::array::from_fn(|j| expectation(rho, &kron(&id, &pauli(j + 1))));
    let t = Matrix3::from_fn(|i, j| expectation(rho, &kron(&pauli(i + 1), &pauli(j + 1))));
    let w = Matrix3::from_fn(|i, j| t[(i, j)] - a[i] * b[j]);
    (t, w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxCorrelation {
    pub value: f64,
    /// Measurement direction on qubit A.
    pub n: Vector3<f64>,
    /// Measurement direction on qubit B.
    pub nprime: Vector3<f64>,
    pub history: Vec<f64>,
}

/// Maximizes `<(s.n)(s.n')> - <s.n><s.n'>`. For each `n` the best `n'` is
/// `W^T n / |W^T n|`, so the search runs over `n` only.
pub fn maxcorr_bruteforce(rho: &TwoQubitDensityMatrix, grid: &DirectionGrid) -> MaxCorrelation {
    let (_, w) = covariance_by_traces(rho);
    let wt = w.transpose();
    let s = maximize_sphere(|n| (wt * n).norm(), grid);
    let image = wt * s.direction;
    let nprime = if image.norm() > 0.0 { image.normalize() } else { Vector3::z() };
    MaxCorrelation { value: s.value, n: s.direction, nprime, history: s.history }
}

/// `2 * sum |lambda_-|` over the spectrum of the partial transpose, from a
/// library Hermitian eigensolver.
pub fn negativity_eig(rho: &TwoQubitDensityMatrix) -> f64 {
    let pt = partial_transpose(rho, Party::A);
    let ev = pt.symmetric_eigen().eigenvalues;
    2.0 * ev.iter().filter(|&&l| l < 0.0).map(|l| -l).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChshSearch {
    pub value: f64,
    pub a: Vector3<f64>,
    pub a_prime: Vector3<f64>,
    pub history: Vec<f64>,
}

/// CHSH value for settings `a, a'` on A with the B settings chosen
/// optimally: `|T^T (a + a')| + |T^T (a - a')|`.
fn chsh_for_pair(tt: &Matrix3<f64>, a: &Vector3<f64>, ap: &Vector3<f64>) -> f64 {
    (tt * (a + ap)).norm() + (tt * (a - ap)).norm()
}

/// Maximizes `<A B> + <A B'> + <A' B> - <A' B'>` over the four directions.
pub fn chsh_search(rho: &TwoQubitDensityMatrix, grid: &DirectionGrid) -> ChshSearch {
    let (t, _) = covariance_by_traces(rho);
    let tt = t.transpose();
    let dirs = grid.directions();
    let images: Vec<Vector3<f64>> = dirs.iter().map(|d| tt * d).collect();
    let (mut bi, mut bj) = (0, 0);
    let mut best = f64::NEG_INFINITY;
    for i in 0..dirs.len() {
        for j in i..dirs.len() {
            let v = (images[i] + images[j]).norm() + (images[i] - images[j]).norm();
            if v > best {
                best = v;
                bi = i;
                bj = j;
            }
        }
    }
    let (mut a, mut ap) = (dirs[bi], dirs[bj]);
    let mut history = vec![best];
    let mut h = grid.initial_half_width();
    for _ in 0..grid.refine_rounds {
        let (e1, e2) = tangent_basis(&a);
        let (f1, f2) = tangent_basis(&ap);
        let (ca, cap) = (a, ap);
        let steps = offsets(PAIR_LOCAL_POINTS, h);
        let moved_a: Vec<Vector3<f64>> = steps
            .iter()
            .flat_map(|&x| steps.iter().map(move |&y| (x, y)))
            .map(|(x, y)| (ca + e1 * x + e2 * y).normalize())
            .collect();
        let moved_ap: Vec<Vector3<f64>> = steps
            .iter()
            .flat_map(|&x| steps.iter().map(move |&y| (x, y)))
            .map(|(x, y)| (cap + f1 * x + f2 * y).normalize())
            .collect();
        for na in &moved_a {
            for nap in &moved_ap {
                let v = chsh_for_pair(&tt, na, nap);
                if v > best {
                    best = v;
                    a = *na;
                    ap = *nap;
                }
            }
        }
        history.push(best);
        h *= SHRINK;
    }
    ChshSearch { value: best, a, a_prime: ap, history }
}

pub fn chsh_gridopt(rho: &TwoQubitDensityMatrix, grid: &DirectionGrid) -> f64 {
    chsh_search(rho, grid).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::x_shaped;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell() -> TwoQubitDensityMatrix {
        TwoQubitDensityMatrix::new_unchecked(x_shaped([0.5, 0.0, 0.0, 0.5], c(0.5), c(0.0)))
    }

    fn product() -> TwoQubitDensityMatrix {
        TwoQubitDensityMatrix::new_unchecked(x_shaped([0.0, 1.0, 0.0, 0.0], c(0.0), c(0.0)))
    }

    #[test]
    fn grid_includes_exact_poles() {
        let g = DirectionGrid::default();
        let d = g.directions();
        assert_eq!(d.len(), 2 + 23 * 48);
        assert_eq!(d[0], Vector3::z());
        assert_eq!(*d.last().unwrap(), -Vector3::z());
        assert!(d.iter().all(|n| (n.norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn grid_validation() {
        assert!(DirectionGrid::default().validate().is_ok());
        assert!(DirectionGrid { polar_steps: 12, ..Default::default() }.validate().is_err());
        assert!(DirectionGrid { refine_rounds: 1, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn tangent_basis_is_orthonormal() {
        for n in DirectionGrid::default().directions().iter().step_by(37) {
            let (e1, e2) = tangent_basis(n);
            assert!(e1.dot(n).abs() < 1e-14 && e2.dot(n).abs() < 1e-14 && e1.dot(&e2).abs() < 1e-14);
            assert!((e1.norm() - 1.0).abs() < 1e-14 && (e2.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn discord_oracle_examples() {
        let g = DirectionGrid::default();
        assert!(discord_bruteforce(&product(), &g).abs() < 1e-8);
        assert!((discord_bruteforce(&bell(), &g) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn maxcorr_bell_value_and_directions() {
        let m = maxcorr_bruteforce(&bell(), &DirectionGrid::default());
        assert!((m.value - 1.0).abs() < 1e-12);
        // The maximizers are degenerate; any returned pair must achieve the value.
        let (_, w) = covariance_by_traces(&bell());
        assert!(m.n.dot(&(w * m.nprime)) >= 1.0 - 1e-5);
        assert!((Vector3::z().dot(&(w * Vector3::z())) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negativity_oracle_examples() {
        assert!(negativity_eig(&product()).abs() < 1e-12);
        assert!((negativity_eig(&bell()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chsh_oracle_examples() {
        let g = DirectionGrid::default();
        let b = chsh_gridopt(&bell(), &g);
        assert!((b - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-4);
        assert!(b <= 2.0 * std::f64::consts::SQRT_2 + 1e-6);
        assert!((chsh_gridopt(&product(), &g) - 2.0).abs() < 1e-4);
    }
}
