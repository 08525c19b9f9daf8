//! Checks against independent closed forms and brute-force expansions.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, LN_2, PI};

use approx::assert_abs_diff_eq;
use noon_core::generation::{generate_noon4_lkd, optimize_success, SuccessObjective};
use noon_core::interferometry::{
    fringe_scan, noon_projector, nphoton_rate, opa_fringe, phase_grid, run_mzi, visibility,
    MziLayout, Observable,
};
use noon_core::states::OpaSpec;
use noon_core::{apply_beamsplitter, Complex64, FockOptions, PureState};

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Expands `(t a† + r b†)^na (r a† + t b†)^nb |0,0⟩ / √(na! nb!)` term by term.
fn splitter_oracle(na: u32, nb: u32, theta: f64) -> Vec<((u32, u32), Complex64)> {
    let t = Complex64::new(theta.cos(), 0.0);
    let r = Complex64::new(0.0, theta.sin());
    let n = na + nb;
    let mut out = vec![Complex64::new(0.0, 0.0); n as usize + 1];
    for j in 0..=na {
        for k in 0..=nb {
            let coeff = binomial(na, j) * binomial(nb, k);
            let amp = t.powu(j) * r.powu(na - j) * r.powu(k) * t.powu(nb - k) * coeff;
            out[(j + k) as usize] += amp;
        }
    }
    let norm = (factorial(na) * factorial(nb)).sqrt();
    out.into_iter()
        .enumerate()
        .map(|(p, amp)| {
            let p = p as u32;
            (
                (p, n - p),
                amp * (factorial(p) * factorial(n - p)).sqrt() / norm,
            )
        })
        .collect()
}

#[test]
fn splitter_matches_multinomial_expansion() {
    for na in 0..=6 {
        for nb in 0..=6 {
            for &theta in &[FRAC_PI_4, 0.3, 1.1, -0.7] {
                let input = noon_core::make_fock(&[na, nb]).unwrap();
                let out = apply_beamsplitter(&input, 0, 1, theta).unwrap();
                for ((p, q), amp) in splitter_oracle(na, nb, theta) {
                    let got = out.amplitude(&[p, q]);
                    assert!(
                        (got - amp).norm() < 1e-12,
                        "|{na},{nb}> theta {theta}: amplitude of |{p},{q}> is {got}, expected {amp}"
                    );
                }
            }
        }
    }
}

/// `‖ê^N ψ‖²` with `ê = (a + b)/√2`, expanded binomially.
fn rate_oracle(state: &PureState, n: u32) -> f64 {
    let mut image = std::collections::BTreeMap::<(u32, u32), Complex64>::new();
    for (key, amp) in state.terms() {
        let (n0, n1) = (key.get(0), key.get(1));
        for k in 0..=n {
            if k > n0 || n - k > n1 {
                continue;
            }
            let lowering = (factorial(n0) / factorial(n0 - k) * factorial(n1)
                / factorial(n1 - (n - k)))
            .sqrt();
            *image.entry((n0 - k, n1 - (n - k))).or_default() += *amp * binomial(n, k) * lowering;
        }
    }
    let scale = 2f64.powi(-(n as i32));
    image.values().map(|a| a.norm_sqr()).sum::<f64>() * scale
}

#[test]
fn rate_matches_annihilator_expansion() {
    let state = PureState::from_terms(
        2,
        [
            ([3u32, 1], Complex64::new(0.4, 0.1)),
            ([2, 2], Complex64::new(-0.3, 0.5)),
            ([0, 4], Complex64::new(0.2, -0.2)),
            ([1, 1], Complex64::new(0.6, 0.0)),
        ],
        FockOptions::default(),
    )
    .unwrap();
    for n in 1..=4 {
        let got = nphoton_rate(&state, n).unwrap().mean;
        assert_abs_diff_eq!(got, rate_oracle(&state, n), epsilon = 1e-12);
    }
}

#[test]
fn noon_rate_fringe_closed_form() {
    for n in 1..=5u32 {
        let noon = noon_core::make_noon(n).unwrap();
        let peak = factorial(n) / 2f64.powi(n as i32);
        for &phi in &[0.0, 0.2, 1.0, 2.5] {
            let out = run_mzi(&noon, phi, 0.0, MziLayout::BarePhase).unwrap();
            let expected = peak * (1.0 + (f64::from(n) * phi).cos());
            assert_abs_diff_eq!(
                nphoton_rate(&out, n).unwrap().mean,
                expected,
                epsilon = 1e-12
            );
        }
    }
}

#[test]
fn noon_rate_decays_as_super_beer() {
    let n = 3u32;
    let noon = noon_core::make_noon(n).unwrap();
    let phis = phase_grid(0.0, 2.0 * PI, 25).unwrap();
    let lossless = fringe_scan(
        &noon,
        &phis,
        0.0,
        Observable::NPhotonRate(n),
        MziLayout::BarePhase,
    )
    .unwrap();
    for &gamma in &[0.1, LN_2, 1.3] {
        let lossy = fringe_scan(
            &noon,
            &phis,
            gamma,
            Observable::NPhotonRate(n),
            MziLayout::BarePhase,
        )
        .unwrap();
        let ratio = lossy.peak_to_peak() / lossless.peak_to_peak();
        assert_abs_diff_eq!(ratio, (-f64::from(n) * gamma).exp(), epsilon = 1e-12);
    }
}

#[test]
fn lossy_coherent_difference_closed_form() {
    let alpha = Complex64::new(1.2, -0.4);
    let beam = FockOptions::default()
        .coherent(
            &noon_core::CoherentSpec::new(alpha)
                .with_tail_epsilon(1e-16)
                .unwrap(),
        )
        .unwrap();
    let input = noon_core::tensor_product(&beam, &noon_core::make_fock(&[0]).unwrap()).unwrap();
    for &(phi, gamma) in &[(0.0, 0.0), (0.7, 0.3), (2.0, LN_2), (FRAC_PI_2, 1.0)] {
        let out = run_mzi(&input, phi, gamma, MziLayout::Full).unwrap();
        let got = Observable::Difference.measure(&out).unwrap().mean;
        let expected = (-gamma).exp() * alpha.norm_sqr() * f64::cos(phi);
        assert_abs_diff_eq!(got, expected, epsilon = 1e-12);
    }
}

#[test]
fn noon_projector_lossy_value() {
    // Renormalized amplitudes e^{2iφ}e^{−2γ} and 1 give 2e^{−2γ}cos 2φ / (1 + e^{−4γ}).
    let out = run_mzi(
        &noon_core::make_noon(2).unwrap(),
        FRAC_PI_8,
        LN_2,
        MziLayout::BarePhase,
    )
    .unwrap();
    let m = noon_projector(&out, 2).unwrap();
    assert_abs_diff_eq!(m.mean, 4.0 * 2f64.sqrt() / 17.0, epsilon = 1e-14);
    assert_abs_diff_eq!(m.mean, 0.332_756_132_323_081_2, epsilon = 1e-14);
}

/// Two-photon fringe visibility of two-mode squeezed vacuum,
/// `cosh² r / (4 sinh² r + cosh² r)`.
fn opa_visibility_closed_form(r: f64) -> f64 {
    let (c, s) = (r.cosh().powi(2), r.sinh().powi(2));
    c / (4.0 * s + c)
}

fn opa_phis() -> Vec<f64> {
    phase_grid(0.0, PI, 9).unwrap()
}

#[test]
fn opa_visibility_matches_closed_form() {
    for &r in &[0.05, 0.3, 0.7, 1.0, 1.5] {
        // The minimal cutoff drops 1e-10 of probability, which at small gain is
        // still visible against the weak two-photon rate; go well past it.
        let spec = OpaSpec::new(
            r,
            3 * OpaSpec::with_minimal_cutoff(r).unwrap().pair_cutoff() + 4,
        )
        .unwrap();
        let options = FockOptions::default().with_photon_cap(2 * spec.pair_cutoff());
        let v = visibility(&opa_fringe(&spec, options, &opa_phis()).unwrap()).unwrap();
        assert_abs_diff_eq!(v, opa_visibility_closed_form(r), epsilon = 1e-8);
    }
}

#[test]
fn opa_shortcut_equals_full_interferometer() {
    let spec = OpaSpec::with_minimal_cutoff(0.4).unwrap();
    let options = FockOptions::default().with_photon_cap(2 * spec.pair_cutoff());
    let phis = opa_phis();
    let short = opa_fringe(&spec, options, &phis).unwrap();
    let full = fringe_scan(
        &options.opa(&spec).unwrap(),
        &phis,
        0.0,
        Observable::NPhotonRate(2),
        MziLayout::Full,
    )
    .unwrap();
    for (a, b) in short.values.iter().zip(&full.values) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }
    for (a, b) in short.variances.iter().zip(&full.variances) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }
}

#[test]
fn lkd_success_regression() {
    let theta_star = (1.0 / 3f64.sqrt()).asin();
    assert_abs_diff_eq!(theta_star, 0.615_479_708_670_387, epsilon = 1e-15);
    let opt = optimize_success(SuccessObjective::Probability, (0.01, 1.56)).unwrap();
    assert_abs_diff_eq!(opt.theta, theta_star, epsilon = 1e-6);
    assert_abs_diff_eq!(opt.value, 48.0 / 729.0, epsilon = 1e-9);
    assert!(opt.value > 0.05 && opt.value < 0.25);
    let at_opt = generate_noon4_lkd(opt.theta).unwrap();
    assert!(at_opt.fidelity_to_target.unwrap() >= 1.0 - 1e-9);
}

#[test]
fn lkd_success_closed_form() {
    // 3 cos⁸θ sin⁴θ: two of six photons tapped, one per arm.
    for &theta in &[0.2, 0.5, 0.9, 1.3] {
        let p = generate_noon4_lkd(theta).unwrap().success_probability;
        let expected = 3.0 * theta.cos().powi(8) * theta.sin().powi(4);
        assert_abs_diff_eq!(p, expected, epsilon = 1e-12);
    }
}
