use fermi_correlations::amplitudes::{PerturbativeAmplitudes, XStateCoefficients};
use fermi_correlations::bloch::{
    decompose, partial_transpose, random_state, random_unitary, reconstruct, x_shaped, Party, StateKind,
    TwoQubitDensityMatrix,
};
use fermi_correlations::linalg::hermitian4_eigenvalues;
use fermi_correlations::measures::*;
use fermi_correlations::sweep::{run_sweep, SweepSpec};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn kind() -> impl Strategy<Value = StateKind> {
    prop_oneof![Just(StateKind::Pure), Just(StateKind::Mixed), Just(StateKind::XShape)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn hierarchy_on_random_states(seed in any::<u64>(), kind in kind()) {
        let r = report_generic(&random_state(seed, kind));
        prop_assert!(r.hierarchy_ok, "{:?}", r);
    }

    #[test]
    fn measures_stay_in_range(seed in any::<u64>(), kind in kind()) {
        let r = report_generic(&random_state(seed, kind));
        for v in [r.sqrt_discord, r.negativity, r.connected_corr] {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v), "{:?}", r);
        }
        prop_assert!(r.bell_opt >= 0.0 && r.bell_opt <= B_TSIRELSON + 1e-9);
    }

    #[test]
    fn pure_states_saturate_the_hierarchy(seed in any::<u64>()) {
        let r = report_generic(&random_state(seed, StateKind::Pure));
        prop_assert!((r.connected_corr - r.sqrt_discord).abs() <= 1e-8);
        prop_assert!((r.sqrt_discord - r.negativity).abs() <= 1e-8);
    }

    #[test]
    fn local_unitaries_leave_measures_unchanged(seed in any::<u64>(), kind in kind()) {
        let rho = random_state(seed, kind);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5555);
        let rotated = rho.rotate_locally(&random_unitary(&mut rng), &random_unitary(&mut rng));
        prop_assert!((geometric_discord(&rho) - geometric_discord(&rotated)).abs() <= 1e-10);
        prop_assert!((negativity(&rho) - negativity(&rotated)).abs() <= 1e-10);
        prop_assert!((connected_correlation(&rho) - connected_correlation(&rotated)).abs() <= 1e-10);
    }

    #[test]
    fn bloch_round_trip_and_norm_identity(seed in any::<u64>(), kind in kind()) {
        let rho = random_state(seed, kind);
        let b = decompose(&rho).unwrap();
        prop_assert!(b.x.norm() <= 1.0 + 1e-10 && b.y.norm() <= 1.0 + 1e-10);
        let back = reconstruct(&b);
        prop_assert!((back.matrix() - rho.matrix()).iter().all(|z| z.norm() <= 1e-12));
        let b2 = decompose(&back).unwrap();
        prop_assert!((b2.t - b.t).abs().max() <= 1e-12 && (b2.x - b.x).abs().max() <= 1e-12);
        let identity = 0.25 * (1.0 + b.x.norm_squared() + b.y.norm_squared() + b.t.norm_squared());
        prop_assert!((rho.purity() - identity).abs() <= 1e-10);
    }

    #[test]
    fn partial_transpose_spectrum_is_bounded(seed in any::<u64>(), kind in kind()) {
        let rho = random_state(seed, kind);
        for party in [Party::A, Party::B] {
            let pt = partial_transpose(&rho, party);
            prop_assert_eq!(pt.trace(), rho.trace());
            prop_assert_eq!(pt, pt.adjoint());
            let ev = hermitian4_eigenvalues(&pt);
            prop_assert!(ev[0] >= -0.5 - 1e-12 && ev[3] <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn xstate_negativity_has_the_block_form(seed in any::<u64>()) {
        let rho = random_state(seed, StateKind::XShape);
        let k = XStateCoefficients::from_matrix(&rho);
        let block = |a: f64, b: f64, z: Complex64| ((a - b).powi(2) + 4.0 * z.norm_sqr()).sqrt() - a - b;
        let want = block(k.rho11, k.rho44, k.rho23).max(block(k.rho22, k.rho33, k.rho14)).max(0.0);
        prop_assert!((negativity(&rho) - want).abs() <= 1e-12);
    }
}

fn random_amplitudes(rng: &mut ChaCha8Rng) -> PerturbativeAmplitudes {
    let u2: f64 = rng.random::<f64>() * 0.1;
    let v2: f64 = rng.random::<f64>() * 0.1;
    // Straddle the threshold |X|^2 = u2 v2, including exact hits.
    let x = match rng.random_range(0..4) {
        0 => 0.0,
        1 => (u2 * v2).sqrt(),
        _ => rng.random::<f64>() * 2.0 * (u2 * v2).sqrt(),
    };
    PerturbativeAmplitudes {
        xi: 1.0,
        re_a: -0.5 * (u2 + v2),
        x_exch: Complex64::from_polar(x, rng.random::<f64>() * std::f64::consts::TAU),
        u2: if rng.random_range(0..10) == 0 { 0.0 } else { u2 },
        v2,
        l: Complex64::new(rng.random::<f64>() * 0.05, rng.random::<f64>() * 0.05),
        g2: 0.0,
    }
}

#[test]
fn onset_agrees_with_closed_form_negativity() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..10_000 {
        let a = random_amplitudes(&mut rng);
        assert_eq!(entanglement_onset(&a), negativity_xstate(&a) > 0.0, "{a:?}");
    }
}

#[test]
fn optimal_bell_dominates_fixed_settings() {
    for seed in 0..10_000u64 {
        let k = XStateCoefficients::from_matrix(&random_state(seed, StateKind::XShape));
        assert!(bell_opt(&k) >= bell_chsh(&k).abs() - 1e-12, "seed {seed}");
        assert!(bell_opt(&k) <= B_TSIRELSON + 1e-9);
    }
}

#[test]
fn chsh_fixed_settings_vanish_on_psi_plus() {
    let psi = TwoQubitDensityMatrix::new_unchecked(x_shaped(
        [0.0, 0.5, 0.5, 0.0],
        Complex64::new(0.0, 0.0),
        Complex64::new(0.5, 0.0),
    ));
    assert!(bell_chsh(&XStateCoefficients::from_matrix(&psi)).abs() < 1e-15);
    assert!((bell_opt_generic(&psi) - B_TSIRELSON).abs() < 1e-12);
}

#[test]
fn closed_form_negativity_matches_generic_on_the_sweep() {
    for row in run_sweep(&SweepSpec::default()).unwrap() {
        assert!((row.report.negativity - negativity(&row.rho)).abs() <= 1e-12);
    }
}

fn consistency_gap(k: f64) -> f64 {
    let spec = SweepSpec { couplings: vec![k], xi_steps: 81, ..SweepSpec::default() };
    run_sweep(&spec)
        .unwrap()
        .iter()
        .flat_map(|r| {
            [
                (r.report.sqrt_discord - geometric_discord(&r.rho).sqrt()).abs(),
                (r.report.connected_corr - connected_correlation(&r.rho)).abs(),
            ]
        })
        .fold(0.0, f64::max)
}

#[test]
#[ignore = "fails: the closed forms differ from the generic measures at first order in K, not second"]
fn closed_forms_match_generic_measures_to_second_order() {
    for k in [0.02, 0.05, 0.08] {
        let gap = consistency_gap(k);
        assert!(gap <= 2.0 * k * k, "K = {k}: gap {gap}");
        let ratio = gap / consistency_gap(k / 2.0);
        assert!((ratio - 4.0).abs() < 0.4, "K = {k}: ratio {ratio}");
    }
}
