//! Small dense eigenvalue routines used by the closed-form measures.
//!
//! Everything here is cyclic Jacobi on real symmetric matrices. Complex
//! Hermitian matrices are handled through their real 2n x 2n embedding
//! `[[Re, -Im], [Im, Re]]`, whose spectrum is the Hermitian spectrum with
//! every eigenvalue doubled.

use nalgebra::{Matrix3, Matrix4};
use num_complex::Complex64;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues of a real symmetric `n x n` matrix stored row-major, ascending.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
    let scale = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if scale == 0.0 {
        return vec![0.0; n];
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

pub fn symmetric3_eigenvalues(m: &Matrix3<f64>) -> [f64; 3] {
    let sym = (m + m.transpose()) * 0.5;
    let a: Vec<f64> = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| sym[(i, j)]).collect();
    let e = symmetric_eigenvalues(a, 3);
    [e[0], e[1], e[2]]
}

pub fn symmetric3_max_eigenvalue(m: &Matrix3<f64>) -> f64 {
    symmetric3_eigenvalues(m)[2]
}

/// Eigenvalues of a 4x4 Hermitian matrix, ascending. Only the Hermitian part
/// of `m` is used.
pub fn hermitian4_eigenvalues(m: &Matrix4<Complex64>) -> [f64; 4] {
    let mut a = vec![0.0; 64];
    for i in 0..4 {
        for j in 0..4 {
            let h = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            a[i * 8 + j] = h.re;
            a[(i + 4) * 8 + (j + 4)] = h.re;
            a[i * 8 + (j + 4)] = -h.im;
            a[(i + 4) * 8 + j] = h.im;
        }
    }
    let e = symmetric_eigenvalues(a, 8);
    // Each eigenvalue appears twice in the embedding.
    [0.5 * (e[0] + e[1]), 0.5 * (e[2] + e[3]), 0.5 * (e[4] + e[5]), 0.5 * (e[6] + e[7])]
}
