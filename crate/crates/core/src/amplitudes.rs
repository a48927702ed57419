//! Second-order amplitudes of the two-qubit Fermi problem and the reduced
//! X-state they assemble into.
//!
//! Units are hbar = v = Omega = 1. The coupling enters only through the
//! dimensionless `K = 4 d^2 N`, so every single-action product carries a
//! prefactor `d^2 N = K / 4`. Field correlations use the exponentially
//! regularized two-point function [`two_point`] with `eps = 1 / cutoff`.
//!
//! Double time integrals over the square `[0, tau]^2` of functions of
//! `t1 - t2` are reduced exactly to one-dimensional integrals,
//!
//! ```text
//! ∬ f(t1 - t2) dt1 dt2 = ∫_{-tau}^{tau} (tau - |s|) f(s) ds,
//! ```
//!
//! and evaluated with composite Gauss-Legendre on panels graded toward the
//! regularized poles. Photon-number resolved quantities are integrated
//! over mode frequency with adaptive Gauss-Kronrod instead, which gives an
//! independent route to the same numbers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bloch::{x_shaped, TwoQubitDensityMatrix};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_kronrod, graded_breakpoints, Adaptive, CompositeRule};

/// Mode integrals are truncated at this multiple of the cutoff, where the
/// exponential regulator is below 5e-18.
pub const MODE_CUTOFF_MULTIPLE: f64 = 40.0;

const MIN_PANEL_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Qubit separation in units of v / Omega.
    pub r_bar: f64,
    /// Dimensionless coupling `K = 2 (g / Omega)^2`.
    pub coupling: f64,
    /// UV cutoff in units of Omega.
    pub cutoff: f64,
    /// Node budget per time axis.
    pub quad_points: usize,
    pub include_two_photon: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            r_bar: std::f64::consts::FRAC_PI_4,
            coupling: 0.05,
            cutoff: 50.0,
            quad_points: 256,
            include_two_photon: true,
        }
    }
}

impl ModelParams {
    pub fn with_coupling(self, coupling: f64) -> Self {
        Self { coupling, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.r_bar > 0.0 && self.r_bar.is_finite()) {
            return bad(format!("r_bar must be positive and finite, got {}", self.r_bar));
        }
        if !(self.coupling >= 0.0 && self.coupling.is_finite()) {
            return bad(format!("coupling K must be >= 0, got {}", self.coupling));
        }
        if !(self.cutoff >= 10.0 && self.cutoff.is_finite()) {
            return bad(format!("cutoff must be >= 10, got {}", self.cutoff));
        }
        if self.quad_points < 32 {
            return bad(format!("quad_points must be >= 32, got {}", self.quad_points));
        }
        Ok(())
    }

    fn eps(&self) -> f64 {
        1.0 / self.cutoff
    }

    /// Interaction time `tau = xi * r_bar` in units of 1 / Omega.
    pub fn tau(&self, xi: f64) -> f64 {
        xi * self.r_bar
    }

    fn prefactor(&self) -> f64 {
        0.25 * self.coupling
    }
}

fn check_xi(p: &ModelParams, xi: f64) -> Result<()> {
    p.validate()?;
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(Error::InvalidParams(format!("xi must be >= 0 and finite, got {xi}")));
    }
    Ok(())
}

/// Regularized vacuum Wightman function of the line voltage with the
/// normalization `N` folded out:
///
/// `w(dx, dt) = (eps + i(dt - dx))^-2 + (eps + i(dt + dx))^-2`, `eps = 1 / cutoff`,
///
/// the closed form of `∫_0^∞ k e^{-k eps} [e^{ik dx} + e^{-ik dx}] e^{-ik dt} dk`.
pub fn two_point(dx: f64, dt: f64, cutoff: f64) -> Complex64 {
    let eps = 1.0 / cutoff;
    let a = Complex64::new(eps, dt - dx);
    let b = Complex64::new(eps, dt + dx);
    (a * a).inv() + (b * b).inv()
}

fn time_rule(p: &ModelParams, tau: f64, pole: f64) -> CompositeRule {
    CompositeRule::new(&graded_breakpoints(0.0, tau, &[pole], p.eps()), p.quad_points, MIN_PANEL_ORDER)
}

/// Time-ordered exchange amplitude `X = <0|T(S_B^+ S_A^-)|0>`:
///
/// `X = -(K/4) ∬ e^{i(t1 - t2)} w(r, |t1 - t2|) = -(K/2) ∫_0^tau (tau - s) cos(s) w(r, s) ds`.
pub fn amp_exchange(p: &ModelParams, xi: f64) -> Result<Complex64> {
    check_xi(p, xi)?;
    let tau = p.tau(xi);
    if tau == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let r = p.r_bar;
    let integral = time_rule(p, tau, r).integrate(|s| two_point(r, s, p.cutoff) * ((tau - s) * s.cos()));
    Ok(integral * (-2.0 * p.prefactor()))
}

/// Radiative correction `A = ½<0|T(S_A^+ S_A^- + S_B^- S_B^+)|0>`. Both
/// terms reduce to the same even integral, so
/// `A = -(K/2) ∫_0^tau (tau - s) cos(s) w(0, s) ds`.
pub fn radiative_amplitude(p: &ModelParams, xi: f64) -> Result<Complex64> {
    check_xi(p, xi)?;
    let tau = p.tau(xi);
    if tau == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let integral = time_rule(p, tau, 0.0).integrate(|s| two_point(0.0, s, p.cutoff) * ((tau - s) * s.cos()));
    Ok(integral * (-2.0 * p.prefactor()))
}

/// `Re A`, non-positive for every `xi > 0`.
pub fn amp_radiative(p: &ModelParams, xi: f64) -> Result<f64> {
    Ok(radiative_amplitude(p, xi)?.re)
}

/// `|U_A|^2` from the normal-ordered double time integral
/// `(K/4) ∬ e^{i(t1 - t2)} w(0, t1 - t2)`.
pub fn u2_double_time(p: &ModelParams, xi: f64) -> Result<f64> {
    emission_double_time(p, xi, 1.0)
}

/// `|V_B|^2` from `(K/4) ∬ e^{-i(t1 - t2)} w(0, t1 - t2)`.
pub fn v2_double_time(p: &ModelParams, xi: f64) -> Result<f64> {
    emission_double_time(p, xi, -1.0)
}

fn emission_double_time(p: &ModelParams, xi: f64, sign: f64) -> Result<f64> {
    check_xi(p, xi)?;
    let tau = p.tau(xi);
    if tau == 0.0 {
        return Ok(0.0);
    }
    let integral =
        time_rule(p, tau, 0.0).integrate(|s| two_point(0.0, s, p.cutoff) * Complex64::from_polar(tau - s, sign * s));
    Ok(2.0 * p.prefactor() * integral.re)
}

/// `l = <0|S_A^+ S_B^+|0>` as the un-ordered double time integral
/// `-(K/4) ∬ e^{i(t1 + t2)} w(r, t1 - t2)`. Integrating out `t1 + t2`
/// leaves only the symmetric part of `w`:
/// `l = -(K/4) ∫_0^tau Re w(r, s) (e^{i(2 tau - s)} - e^{is}) / i ds`.
pub fn coherence_double_time(p: &ModelParams, xi: f64) -> Result<Complex64> {
    check_xi(p, xi)?;
    let tau = p.tau(xi);
    if tau == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let r = p.r_bar;
    let minus_i = Complex64::new(0.0, -1.0);
    let integral = time_rule(p, tau, r).integrate(|s| {
        let phase = Complex64::from_polar(1.0, 2.0 * tau - s) - Complex64::from_polar(1.0, s);
        phase * minus_i * two_point(r, s, p.cutoff).re
    });
    Ok(integral * (-p.prefactor()))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

fn mode_breakpoints(p: &ModelParams, tau: f64) -> Vec<f64> {
    let top = MODE_CUTOFF_MULTIPLE * p.cutoff;
    // Roughly one panel per half period of the sinc envelope, capped.
    let width = (std::f64::consts::PI / tau).clamp(top / 4096.0, top / 8.0);
    let n = (top / width).ceil() as usize;
    let mut pts: Vec<f64> = (0..=n).map(|i| (i as f64 * width).min(top)).collect();
    pts.push(1.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn mode_integral<F: Fn(f64) -> Complex64>(p: &ModelParams, tau: f64, spectral: F) -> Complex64 {
    let eps = p.eps();
    let integrand = |w: f64| spectral(w) * (w * (-w * eps).exp());
    adaptive_kronrod(integrand, &mode_breakpoints(p, tau), Adaptive::default()).value
}

/// `|U_A|^2 = ∫ dk |U_A(k)|^2` with the resonant emission amplitude
/// `U_A(k) ∝ ∫_0^tau e^{i(w - 1) t} dt`:
/// `u2 = (K/2) ∫_0^∞ w e^{-w eps} tau^2 sinc^2((w - 1) tau / 2) dw`.
pub fn u2_modes(p: &ModelParams, xi: f64) -> Result<f64> {
    check_xi(p, xi)?;
    let tau = p.tau(xi);
    if tau == 0.0 {
        return Ok(0.0);
    }
    let v = mode_integral(p, tau, |w| Complex64::from((tau * sinc(0.5 * (w - 1.0) * tau)).powi(2)));
    Ok(2.0 * p.prefactor() * v.re)
}

/// `|V_B|^2` with the counter-rotating amplitude `∝ ∫_0^tau e^{i(w + 1) t} dt`.
pub fn v2_modes(p: &ModelParams, xi: f64) -> Result<f64> {
    check_xi(p, xi)?;
    let tau = p.tau(xi);
    if tau == 0.0 {
        return Ok(0.0);
    }
    let v = mode_integral(p, tau, |w| Complex64::from((tau * sinc(0.5 * (w + 1.0) * tau)).powi(2)));
    Ok(2.0 * p.prefactor() * v.re)
}

/// Mode overlap `sum_k V_B(k) U_A(k)^*`, the |ee><gg| coherence of the
/// traced state:
/// `(K/2) e^{i tau} ∫_0^∞ w e^{-w eps} cos(w r) tau^2 sinc((w+1)tau/2) sinc((w-1)tau/2) dw`.
pub fn emission_overlap_modes(p: &ModelParams, xi: f64) -> Result<Complex64> {
    check_xi(p, xi)?;
    let tau = p.tau(xi);
    if tau == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let r = p.r_bar;
    let v = mode_integral(p, tau, |w| {
        Complex64::from((w * r).cos() * tau * tau * sinc(0.5 * (w + 1.0) * tau) * sinc(0.5 * (w - 1.0) * tau))
    });
    Ok(Complex64::from_polar(2.0 * p.prefactor(), tau) * v.re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinglePhoton {
    pub u2: f64,
    pub v2: f64,
    pub l: Complex64,
}

/// Single-photon emission weights from mode integrals, plus the coherence
/// source `l` from its double time form.
pub fn amp_single_photon(p: &ModelParams, xi: f64) -> Result<SinglePhoton> {
    Ok(SinglePhoton { u2: u2_modes(p, xi)?, v2: v2_modes(p, xi)?, l: coherence_double_time(p, xi)? })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwoPhoton {
    Enabled(f64),
    Disabled,
}

impl TwoPhoton {
    pub fn value(self) -> f64 {
        match self {
            TwoPhoton::Enabled(v) => v,
            TwoPhoton::Disabled => 0.0,
        }
    }
}

/// `|G|^2 = ∬ dk1 dk2 |G(k1, k2)|^2` for `G = <2|T(S_B^+ S_A^-)|0>`.
///
/// The two-photon part of `T(S_B^+ S_A^-)|0>` only involves creation
/// operators, which commute, so time ordering drops out and the state is
/// `b^† c^† |0>` with `b^† = sum_k V_B(k) a_k^†`, `c^† = sum_k U_A(k) a_k^†`.
/// Its norm factorizes into one-dimensional mode integrals:
/// `|G|^2 = |U_A|^2 |V_B|^2 + |sum_k V_B(k) U_A(k)^*|^2`.
pub fn amp_two_photon(p: &ModelParams, xi: f64) -> Result<TwoPhoton> {
    check_xi(p, xi)?;
    if !p.include_two_photon {
        return Ok(TwoPhoton::Disabled);
    }
    let u2 = u2_modes(p, xi)?;
    let v2 = v2_modes(p, xi)?;
    let overlap = emission_overlap_modes(p, xi)?;
    Ok(TwoPhoton::Enabled(u2 * v2 + overlap.norm_sqr()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbativeAmplitudes {
    pub xi: f64,
    pub re_a: f64,
    pub x_exch: Complex64,
    pub u2: f64,
    pub v2: f64,
    pub l: Complex64,
    pub g2: f64,
}

impl PerturbativeAmplitudes {
    pub fn zero(xi: f64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self { xi, re_a: 0.0, x_exch: z, u2: 0.0, v2: 0.0, l: z, g2: 0.0 }
    }
}

/// All amplitudes at one time point. The emission weights are computed
/// once and shared with the two-photon term.
pub fn compute_amplitudes(p: &ModelParams, xi: f64) -> Result<PerturbativeAmplitudes> {
    check_xi(p, xi)?;
    if p.tau(xi) == 0.0 {
        return Ok(PerturbativeAmplitudes::zero(xi));
    }
    let u2 = u2_modes(p, xi)?;
    let v2 = v2_modes(p, xi)?;
    let g2 = if p.include_two_photon { u2 * v2 + emission_overlap_modes(p, xi)?.norm_sqr() } else { 0.0 };
    Ok(PerturbativeAmplitudes {
        xi,
        re_a: amp_radiative(p, xi)?,
        x_exch: amp_exchange(p, xi)?,
        u2,
        v2,
        l: coherence_double_time(p, xi)?,
        g2,
    })
}

/// Unnormalized entries of the reduced X-state together with their trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XStateCoefficients {
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
    pub rho44: f64,
    pub rho14: Complex64,
    pub rho23: Complex64,
    pub c: f64,
}

impl XStateCoefficients {
    /// Reads the X-pattern entries of a density matrix. `c` is the real
    /// part of the trace.
    pub fn from_matrix(rho: &TwoQubitDensityMatrix) -> Self {
        let m = rho.matrix();
        let d = [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re, m[(3, 3)].re];
        Self {
            rho11: d[0],
            rho22: d[1],
            rho33: d[2],
            rho44: d[3],
            rho14: m[(0, 3)],
            rho23: m[(1, 2)],
            c: d.iter().sum(),
        }
    }

    /// Entries divided by `c`, with `c = 1`.
    pub fn normalized(&self) -> Self {
        let c = self.c;
        Self {
            rho11: self.rho11 / c,
            rho22: self.rho22 / c,
            rho33: self.rho33 / c,
            rho44: self.rho44 / c,
            rho14: self.rho14 / c,
            rho23: self.rho23 / c,
            c: 1.0,
        }
    }

    pub fn to_matrix(&self) -> TwoQubitDensityMatrix {
        let n = self.normalized();
        TwoQubitDensityMatrix::new_unchecked(x_shaped([n.rho11, n.rho22, n.rho33, n.rho44], n.rho14, n.rho23))
    }
}

/// Places the amplitudes into the X pattern and normalizes by the trace.
///
/// The coherences are the mode sums of the traced state:
/// `rho14 = sum_k V_B(k) U_A(k)^* = -l` and `rho23 = conj(X)`.
/// Positivity of the result is not enforced; see
/// [`TwoQubitDensityMatrix::check_positive`].
pub fn assemble(p: &ModelParams, amps: &PerturbativeAmplitudes) -> Result<(XStateCoefficients, TwoQubitDensityMatrix)> {
    let rho22 = 1.0 + 2.0 * amps.re_a;
    if rho22.is_nan() || rho22 <= 0.0 {
        return Err(Error::OutOfRegime { xi: amps.xi, coupling: p.coupling, rho22 });
    }
    let rho11 = amps.v2;
    let rho33 = amps.x_exch.norm_sqr() + amps.g2;
    let rho44 = amps.u2;
    let coeffs = XStateCoefficients {
        rho11,
        rho22,
        rho33,
        rho44,
        rho14: -amps.l,
        rho23: amps.x_exch.conj(),
        c: rho11 + rho22 + rho33 + rho44,
    };
    let rho = coeffs.to_matrix();
    Ok((coeffs, rho))
}

pub const AMPLITUDE_CSV_HEADER: [&str; 13] =
    ["xi", "K", "r_bar", "cutoff", "re_A", "re_X", "im_X", "u2", "v2", "re_L", "im_L", "g2", "c"];

/// 17 significant digits, enough for a lossless f64 round trip.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// One amplitude-dump record in [`AMPLITUDE_CSV_HEADER`] order.
pub fn amplitude_record(p: &ModelParams, amps: &PerturbativeAmplitudes, c: f64) -> Vec<String> {
    [
        amps.xi,
        p.coupling,
        p.r_bar,
        p.cutoff,
        amps.re_a,
        amps.x_exch.re,
        amps.x_exch.im,
        amps.u2,
        amps.v2,
        amps.l.re,
        amps.l.im,
        amps.g2,
        c,
    ]
    .iter()
    .map(|&v| format_number(v))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams { coupling: 0.1, ..ModelParams::default() }
    }

    #[test]
    fn two_point_coincidence_limit() {
        let w = two_point(0.0, 0.0, 100.0);
        assert!((w.re - 20000.0).abs() < 1e-9 && w.im == 0.0);
    }

    #[test]
    fn two_point_hermiticity() {
        for (dx, dt) in [(0.3, 0.7), (0.785, 0.785), (0.0, -1.2), (2.0, 0.1)] {
            let a = two_point(dx, dt, 50.0);
            let b = two_point(dx, -dt, 50.0).conj();
            assert!((a - b).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn everything_vanishes_at_zero_time() {
        let p = params();
        assert_eq!(compute_amplitudes(&p, 0.0).unwrap(), PerturbativeAmplitudes::zero(0.0));
        assert_eq!(amp_exchange(&p, 0.0).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(amp_radiative(&p, 0.0).unwrap(), 0.0);
        let sp = amp_single_photon(&p, 0.0).unwrap();
        assert_eq!((sp.u2, sp.v2, sp.l), (0.0, 0.0, Complex64::new(0.0, 0.0)));
        assert_eq!(amp_two_photon(&p, 0.0).unwrap(), TwoPhoton::Enabled(0.0));
    }

    #[test]
    fn two_photon_disabled_marker() {
        let p = ModelParams { include_two_photon: false, ..params() };
        assert_eq!(amp_two_photon(&p, 1.0).unwrap(), TwoPhoton::Disabled);
        assert_eq!(TwoPhoton::Disabled.value(), 0.0);
        assert_eq!(compute_amplitudes(&p, 1.0).unwrap().g2, 0.0);
    }

    #[test]
    fn rejects_bad_params() {
        let p = params();
        assert!(matches!(amp_exchange(&p, -0.1), Err(Error::InvalidParams(_))));
        for bad in [
            ModelParams { r_bar: 0.0, ..p },
            ModelParams { coupling: -1.0, ..p },
            ModelParams { cutoff: 5.0, ..p },
            ModelParams { quad_points: 16, ..p },
        ] {
            assert!(matches!(compute_amplitudes(&bad, 0.5), Err(Error::InvalidParams(_))));
        }
    }

    #[test]
    fn assemble_initial_state() {
        let p = params();
        let (coeffs, rho) = assemble(&p, &PerturbativeAmplitudes::zero(0.0)).unwrap();
        assert_eq!(coeffs.c, 1.0);
        let mut want = nalgebra::Matrix4::<Complex64>::zeros();
        want[(1, 1)] = Complex64::new(1.0, 0.0);
        assert_eq!(*rho.matrix(), want);
    }

    #[test]
    fn assemble_arithmetic() {
        let amps = PerturbativeAmplitudes {
            xi: 1.0,
            re_a: -0.007,
            x_exch: Complex64::new(0.0, 0.01),
            u2: 0.01,
            v2: 0.004,
            l: Complex64::new(0.0, 0.0),
            g2: 0.0,
        };
        let (coeffs, rho) = assemble(&params(), &amps).unwrap();
        assert!((coeffs.c - 1.0001).abs() < 1e-15);
        assert!((rho.matrix()[(1, 1)].re - 0.986 / 1.0001).abs() < 1e-15);
        assert_eq!(coeffs.rho23, Complex64::new(0.0, -0.01));
    }

    #[test]
    fn assemble_rejects_nonpositive_rho22() {
        let mut amps = PerturbativeAmplitudes::zero(1.5);
        amps.re_a = -0.5;
        match assemble(&params(), &amps) {
            Err(Error::OutOfRegime { xi, rho22, .. }) => {
                assert_eq!(xi, 1.5);
                assert_eq!(rho22, 0.0);
            }
            other => panic!("expected out-of-regime, got {other:?}"),
        }
    }

    #[test]
    fn csv_number_format_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            let s = format_number(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }
}
