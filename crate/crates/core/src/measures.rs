//! Correlation quantifiers.
//!
//! Generic measures work on any two-qubit state through its Bloch
//! decomposition. The `_xstate` variants are the second-order closed forms
//! in terms of the raw amplitudes, and the Bell parameters read normalized
//! X-state coefficients.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{PerturbativeAmplitudes, XStateCoefficients};
use crate::bloch::{bloch_components, partial_transpose, BlochDecomposition, Party, TwoQubitDensityMatrix};
use crate::linalg::{hermitian4_eigenvalues, symmetric3_eigenvalues, symmetric3_max_eigenvalue};

/// Classical CHSH threshold.
pub const B_CLASSICAL: f64 = 2.0;
/// Quantum maximum of the CHSH parameter.
pub const B_TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

pub const HIERARCHY_TOL: f64 = 1e-9;

/// Bloch data seen from `party`: swapping the roles of the qubits swaps the
/// local vectors and transposes the correlation matrix.
fn oriented(rho: &TwoQubitDensityMatrix, party: Party) -> BlochDecomposition {
    let b = bloch_components(rho);
    match party {
        Party::A => b,
        Party::B => BlochDecomposition { x: b.y, y: b.x, t: b.t.transpose() },
    }
}

/// Geometric discord with measurement on qubit A.
pub fn geometric_discord(rho: &TwoQubitDensityMatrix) -> f64 {
    geometric_discord_on(rho, Party::A)
}

/// `D = 2 Tr S - 2 lambda_max(S)` with `S = (x x^T + T T^T) / 4`, where
/// `x` is the Bloch vector of the measured party.
pub fn geometric_discord_on(rho: &TwoQubitDensityMatrix, party: Party) -> f64 {
    let b = oriented(rho, party);
    let s = (b.x * b.x.transpose() + b.t * b.t.transpose()) * 0.25;
    (2.0 * (s.trace() - symmetric3_max_eigenvalue(&s))).max(0.0)
}

/// Second-order closed form `sqrt(Re(l)^2 + |X|^2)`.
pub fn sqrt_discord_xstate(amps: &PerturbativeAmplitudes) -> f64 {
    amps.l.re.hypot(amps.x_exch.norm())
}

/// `||rho^{T_A}||_1 - 1`, twice the magnitude of the negative part of the
/// partially transposed spectrum.
pub fn negativity(rho: &TwoQubitDensityMatrix) -> f64 {
    let ev = hermitian4_eigenvalues(&partial_transpose(rho, Party::A));
    2.0 * ev.iter().filter(|&&l| l < 0.0).map(|l| -l).sum::<f64>()
}

/// `max{0, sqrt((u2 - v2)^2 + 4|X|^2) - u2 - v2}`.
pub fn negativity_xstate(amps: &PerturbativeAmplitudes) -> f64 {
    let (u2, v2) = (amps.u2, amps.v2);
    let x2 = amps.x_exch.norm_sqr();
    // Written as a difference of squares over a sum, which is exactly zero
    // at the threshold |X|^2 = u2 v2 and keeps its sign in agreement with
    // `entanglement_onset`.
    let root = ((u2 - v2).powi(2) + 4.0 * x2).sqrt();
    let denom = root + u2 + v2;
    if denom == 0.0 {
        return 0.0;
    }
    (4.0 * (x2 - u2 * v2) / denom).max(0.0)
}

/// Entanglement is present iff `|X|^2 > u2 v2`.
pub fn entanglement_onset(amps: &PerturbativeAmplitudes) -> bool {
    amps.x_exch.norm_sqr() > amps.u2 * amps.v2
}

fn covariance(b: &BlochDecomposition) -> Matrix3<f64> {
    b.t - b.x * b.y.transpose()
}

/// Largest singular value of `W = T - x y^T`.
pub fn connected_correlation(rho: &TwoQubitDensityMatrix) -> f64 {
    let w = covariance(&bloch_components(rho));
    symmetric3_max_eigenvalue(&(w.transpose() * w)).max(0.0).sqrt()
}

/// `max{u2 + v2 + 2 Re A, 2(|X| + |l|)}`.
pub fn connected_correlation_xstate(amps: &PerturbativeAmplitudes) -> f64 {
    (amps.u2 + amps.v2 + 2.0 * amps.re_a).max(2.0 * (amps.x_exch.norm() + amps.l.norm()))
}

/// `-sqrt(2) (rho11 + rho44 - rho22 - rho33 + 2 Re rho23 + 2 Re rho14)` on
/// the normalized coefficients.
pub fn bell_chsh(coeffs: &XStateCoefficients) -> f64 {
    let n = coeffs.normalized();
    -std::f64::consts::SQRT_2 * (n.rho11 + n.rho44 - n.rho22 - n.rho33 + 2.0 * n.rho23.re + 2.0 * n.rho14.re)
}

/// Optimal CHSH value of an X-state, `2 sqrt(u1 + max(u2, u3))`.
pub fn bell_opt(coeffs: &XStateCoefficients) -> f64 {
    let n = coeffs.normalized();
    let (a, b) = (n.rho14.norm(), n.rho23.norm());
    let u1 = 4.0 * (a + b).powi(2);
    let u2 = (n.rho11 + n.rho44 - n.rho22 - n.rho33).powi(2);
    let u3 = 4.0 * (a - b).powi(2);
    2.0 * (u1 + u2.max(u3)).sqrt()
}

/// CHSH value for the fixed settings behind [`bell_chsh`], on any state:
/// `-sqrt(2) (t11 + t33)`.
pub fn bell_chsh_generic(rho: &TwoQubitDensityMatrix) -> f64 {
    let t = bloch_components(rho).t;
    -std::f64::consts::SQRT_2 * (t[(0, 0)] + t[(2, 2)])
}

/// Optimal CHSH value of any state: twice the root of the sum of the two
/// largest eigenvalues of `T^T T`.
pub fn bell_opt_generic(rho: &TwoQubitDensityMatrix) -> f64 {
    let t = bloch_components(rho).t;
    let ev = symmetric3_eigenvalues(&(t.transpose() * t));
    2.0 * (ev[1] + ev[2]).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub sqrt_discord: f64,
    pub negativity: f64,
    pub connected_corr: f64,
    pub bell_chsh: f64,
    pub bell_opt: f64,
    pub hierarchy_ok: bool,
}

pub fn hierarchy_holds(connected_corr: f64, sqrt_discord: f64, negativity: f64) -> bool {
    connected_corr >= sqrt_discord - HIERARCHY_TOL && sqrt_discord >= negativity - HIERARCHY_TOL
}

impl CorrelationReport {
    fn new(sqrt_discord: f64, negativity: f64, connected_corr: f64, bell_chsh: f64, bell_opt: f64) -> Self {
        Self {
            sqrt_discord,
            negativity,
            connected_corr,
            bell_chsh,
            bell_opt,
            hierarchy_ok: hierarchy_holds(connected_corr, sqrt_discord, negativity),
        }
    }
}

/// Report for one sweep point from the closed forms. `rho` is the
/// normalized state built from `coeffs`; it is carried along only so the
/// three inputs travel together.
pub fn report(
    _rho: &TwoQubitDensityMatrix,
    coeffs: &XStateCoefficients,
    amps: &PerturbativeAmplitudes,
) -> CorrelationReport {
    CorrelationReport::new(
        sqrt_discord_xstate(amps),
        negativity_xstate(amps),
        connected_correlation_xstate(amps),
        bell_chsh(coeffs),
        bell_opt(coeffs),
    )
}

/// Report for an arbitrary state from the generic measures.
pub fn report_generic(rho: &TwoQubitDensityMatrix) -> CorrelationReport {
    CorrelationReport::new(
        geometric_discord(rho).sqrt(),
        negativity(rho),
        connected_correlation(rho),
        bell_chsh_generic(rho),
        bell_opt_generic(rho),
    )
}

/// Bloch-vector lengths, used by range checks.
pub fn local_bloch_norms(rho: &TwoQubitDensityMatrix) -> (f64, f64) {
    let b = bloch_components(rho);
    (b.x.norm(), b.y.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{x_shaped, StateKind};
    use num_complex::Complex64;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell() -> TwoQubitDensityMatrix {
        let h = 1.0 / SQRT2;
        TwoQubitDensityMatrix::from_pure([c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap()
    }

    fn product() -> TwoQubitDensityMatrix {
        TwoQubitDensityMatrix::new_unchecked(x_shaped([0.0, 1.0, 0.0, 0.0], c(0.0, 0.0), c(0.0, 0.0)))
    }

    fn classical() -> TwoQubitDensityMatrix {
        TwoQubitDensityMatrix::new_unchecked(x_shaped([0.5, 0.0, 0.0, 0.5], c(0.0, 0.0), c(0.0, 0.0)))
    }

    fn amps(re_a: f64, x: Complex64, u2: f64, v2: f64, l: Complex64) -> PerturbativeAmplitudes {
        PerturbativeAmplitudes { xi: 1.0, re_a, x_exch: x, u2, v2, l, g2: 0.0 }
    }

    fn coeffs(d: [f64; 4], rho14: Complex64, rho23: Complex64) -> XStateCoefficients {
        XStateCoefficients::from_matrix(&TwoQubitDensityMatrix::new_unchecked(x_shaped(d, rho14, rho23)))
    }

    #[test]
    fn discord_examples() {
        assert!(geometric_discord(&product()).abs() < 1e-15);
        assert!((geometric_discord(&bell()) - 1.0).abs() < 1e-12);
        assert!(geometric_discord(&classical()).abs() < 1e-15);
    }

    #[test]
    fn discord_party_asymmetry() {
        // Classical on A, quantum on B: |0><0| (x) |+><+| mixed with |1><1| (x) |0><0|.
        let h = 0.5;
        let mut m = nalgebra::Matrix4::<Complex64>::zeros();
        m[(0, 0)] = c(0.25, 0.0);
        m[(0, 1)] = c(0.25, 0.0);
        m[(1, 0)] = c(0.25, 0.0);
        m[(1, 1)] = c(0.25, 0.0);
        m[(2, 2)] = c(h, 0.0);
        let rho = TwoQubitDensityMatrix::new(m).unwrap();
        assert!(geometric_discord_on(&rho, Party::A).abs() < 1e-14);
        assert!(geometric_discord_on(&rho, Party::B) > 1e-3);
    }

    #[test]
    fn sqrt_discord_xstate_examples() {
        let z = c(0.0, 0.0);
        assert_eq!(sqrt_discord_xstate(&PerturbativeAmplitudes::zero(0.0)), 0.0);
        assert!((sqrt_discord_xstate(&amps(0.0, z, 0.0, 0.0, c(0.01, 0.0))) - 0.01).abs() < 1e-17);
        assert!((sqrt_discord_xstate(&amps(0.0, c(0.0, 0.03), 0.0, 0.0, c(0.04, 0.0))) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn negativity_examples() {
        assert!(negativity(&product()).abs() < 1e-15);
        assert!((negativity(&bell()) - 1.0).abs() < 1e-12);
        let p = 2.0 / 3.0;
        let werner = TwoQubitDensityMatrix::new_unchecked(
            bell().matrix() * c(p, 0.0) + TwoQubitDensityMatrix::maximally_mixed().matrix() * c(1.0 - p, 0.0),
        );
        assert!((negativity(&werner) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn negativity_xstate_examples() {
        let z = c(0.0, 0.0);
        assert!((negativity_xstate(&amps(0.0, c(0.01, 0.0), 0.0, 0.0, z)) - 0.02).abs() < 1e-16);
        // Powers of two make |X|^2 = u2 v2 exact.
        let at_threshold = amps(0.0, c(0.125, 0.0), 0.25, 0.0625, z);
        assert_eq!(negativity_xstate(&at_threshold), 0.0);
        assert!((negativity_xstate(&amps(0.0, c(0.02, 0.0), 0.01, 0.01, z)) - 0.02).abs() < 1e-15);
    }

    #[test]
    fn onset_examples() {
        let z = c(0.0, 0.0);
        let (u2, v2): (f64, f64) = (0.02, 0.01);
        assert!(!entanglement_onset(&amps(0.0, c((0.5 * u2 * v2).sqrt(), 0.0), u2, v2, z)));
        assert!(entanglement_onset(&amps(0.0, c((2.0 * u2 * v2).sqrt(), 0.0), u2, v2, z)));
        assert!(!entanglement_onset(&PerturbativeAmplitudes::zero(0.0)));
        assert!(entanglement_onset(&amps(0.0, c(0.0, 1e-3), 0.0, 0.0, z)));
    }

    #[test]
    fn connected_correlation_examples() {
        assert!(connected_correlation(&product()).abs() < 1e-15);
        assert!((connected_correlation(&bell()) - 1.0).abs() < 1e-12);
        assert!((connected_correlation(&classical()) - 1.0).abs() < 1e-12);
        assert_eq!(connected_correlation_xstate(&PerturbativeAmplitudes::zero(0.0)), 0.0);
        let a = amps(-0.02, c(0.01, 0.0), 0.01, 0.01, c(0.005, 0.0));
        assert!((connected_correlation_xstate(&a) - 0.03).abs() < 1e-15);
    }

    #[test]
    fn bell_examples() {
        let initial = coeffs([0.0, 1.0, 0.0, 0.0], c(0.0, 0.0), c(0.0, 0.0));
        assert!((bell_chsh(&initial) - SQRT2).abs() < 1e-15);
        assert!((bell_opt(&initial) - 2.0).abs() < 1e-15);
        let phi = coeffs([0.5, 0.0, 0.0, 0.5], c(0.5, 0.0), c(0.0, 0.0));
        assert!((bell_chsh(&phi) + B_TSIRELSON).abs() < 1e-15);
        assert!((bell_opt(&phi) - B_TSIRELSON).abs() < 1e-15);
    }

    #[test]
    fn generic_bell_matches_xstate_forms() {
        for seed in 0..50 {
            let rho = crate::bloch::random_state(seed, StateKind::XShape);
            let k = XStateCoefficients::from_matrix(&rho);
            assert!((bell_chsh_generic(&rho) - bell_chsh(&k)).abs() < 1e-13);
            assert!((bell_opt_generic(&rho) - bell_opt(&k)).abs() < 1e-12);
        }
    }

    #[test]
    fn report_at_initial_state() {
        let rho = product();
        let k = XStateCoefficients::from_matrix(&rho);
        let r = report(&rho, &k, &PerturbativeAmplitudes::zero(0.0));
        assert_eq!(r.sqrt_discord, 0.0);
        assert_eq!(r.negativity, 0.0);
        assert_eq!(r.connected_corr, 0.0);
        assert!((r.bell_chsh - SQRT2).abs() < 1e-15);
        assert!((r.bell_opt - 2.0).abs() < 1e-15);
        assert!(r.hierarchy_ok);
    }

    #[test]
    fn classical_state_makes_hierarchy_strict() {
        let r = report_generic(&classical());
        assert!(r.connected_corr > r.sqrt_discord + 0.5);
        assert!(r.hierarchy_ok);
    }
}
