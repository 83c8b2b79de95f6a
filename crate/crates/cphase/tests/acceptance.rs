//! Acceptance suite: one test per numbered criterion, so the harness prints
//! one pass/fail line each. Tolerances are pinned in the assertions.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use cphase::collective;
use cphase::linalg::{hermiticity_defect, trace, trace_of_product};
use cphase::lindblad::integrate_lindblad;
use cphase::lossy;
use cphase::mscheme;
use cphase::params::SystemParams;
use cphase::rational::{resonance_triples, sqrt2_convergents, surd_convergents};
use cphase::scan::{optimize_objective, refine, GateObjective, OptimizeScheme, OptimizeSettings};
use cphase::two_level;
use cphase::vatom;

fn lossless_fidelity(delta: f64, g_t: f64) -> f64 {
    let p = SystemParams::lossless(delta, g_t).unwrap();
    let amps = vatom::closed_form_amplitudes(&p, g_t).unwrap();
    vatom::gate_fidelity_lossless(&amps).f_uncond
}

#[test]
fn criterion_01_convergent_tables() {
    let sqrt2: Vec<(u64, u64)> = sqrt2_convergents(5)
        .unwrap()
        .iter()
        .map(|c| (c.p, c.q))
        .collect();
    assert_eq!(sqrt2, vec![(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]);
    let sqrt17: Vec<(u64, u64)> = surd_convergents(17, 3)
        .unwrap()
        .iter()
        .map(|c| (c.p, c.q))
        .collect();
    assert_eq!(sqrt17, vec![(4, 1), (33, 8), (268, 65)]);
    println!("criterion 1: convergent tables exact");
}

#[test]
fn criterion_02_lossless_fidelities_at_rational_timings() {
    let f1 = lossless_fidelity(0.0, 6.473);
    assert!((f1 - 0.9714).abs() <= 5e-4, "F(0, 6.473) = {f1}");
    let f2 = lossless_fidelity(0.0, 15.629);
    assert!((f2 - 0.9950).abs() <= 5e-4, "F(0, 15.629) = {f2}");
    // The 17/12 timing: the quoted value is the local maximum near gT = 12π.
    let p = refine(
        |g_t, _| Ok(lossless_fidelity(0.0, g_t)),
        (12.0 * PI, 0.0),
        (12.0 * PI - 0.5, 12.0 * PI + 0.5),
        (0.0, 0.0),
        (0.05, 0.0),
    )
    .unwrap();
    assert!(
        (p.value - 0.9992).abs() <= 5e-4,
        "refined F near 12π = {} at gT = {}",
        p.value,
        p.g_t
    );
    println!(
        "criterion 2: F = {f1:.4}, {f2:.4}, {:.4} at the three rational timings",
        p.value
    );
}

#[test]
fn criterion_03_two_photon_return_amplitude_at_twelve_pi() {
    let p = SystemParams::lossless(0.0, 12.0 * PI).unwrap();
    let amps = vatom::closed_form_amplitudes(&p, 12.0 * PI).unwrap();
    assert!(amps.c_g2.im.abs() < 1e-12);
    assert!(
        (amps.c_g2.re - (-0.9957)).abs() <= 1e-4,
        "cos(12√2π) = {}",
        amps.c_g2.re
    );
    println!("criterion 3: cos(12√2π) = {:.5}", amps.c_g2.re);
}

#[test]
fn criterion_04_detuned_optima() {
    // Global refined maximum of the scan window.
    let best = optimize_objective(
        GateObjective::VLossless,
        20.0,
        2.0,
        &OptimizeSettings::default(),
    )
    .unwrap();
    assert!((best.g_t - 18.007).abs() <= 0.02, "gT = {}", best.g_t);
    assert!((best.delta - 1.3881).abs() <= 0.02, "δ/g = {}", best.delta);
    assert!((best.value - 0.9968).abs() <= 1e-3, "F = {}", best.value);

    // Local maximum seeded from the (3,4,1) triple prediction.
    let local = refine(
        |g_t, delta| Ok(lossless_fidelity(delta, g_t)),
        (8.886, 0.707),
        (0.0, 20.0),
        (0.0, 2.0),
        (0.1, 0.02),
    )
    .unwrap();
    assert!((local.g_t - 8.762).abs() <= 0.02, "gT = {}", local.g_t);
    assert!((local.delta - 0.699).abs() <= 0.02, "δ/g = {}", local.delta);
    assert!((local.value - 0.9849).abs() <= 1e-3, "F = {}", local.value);

    // The integer triple predicts its operating point exactly.
    let triples = resonance_triples(10).unwrap();
    let t341 = triples
        .iter()
        .find(|t| (t.n, t.m, t.q) == (3, 4, 1))
        .expect("(3,4,1) missing");
    assert!((t341.g_t - 8.886).abs() <= 5e-4);
    assert!((t341.delta_over_g - 0.707).abs() <= 5e-4);
    println!(
        "criterion 4: optima ({:.3}, {:.4}, {:.4}) and ({:.3}, {:.3}, {:.4}); (3,4,1) → ({:.3}, {:.3})",
        best.g_t, best.delta, best.value, local.g_t, local.delta, local.value,
        t341.g_t, t341.delta_over_g
    );
}

#[test]
fn criterion_05_two_atom_closed_form_and_minima() {
    // Closed form vs direct integration at N = 2, δ = 0.
    let params = SystemParams::in_units_of_g(0.0, 0.0, 0.0, 2, 0.0).unwrap();
    for k in 0..=40 {
        let t = 4.0 * k as f64 / 40.0;
        let amps = collective::n_atom_amplitudes(&params, t).unwrap();
        let closed = (1.0 + 2.0 * (6f64.sqrt() * t).cos()) / 3.0;
        assert!(
            (amps.c_g2 - C64::new(closed, 0.0)).norm() <= 1e-8,
            "t = {t}"
        );
    }
    // Minimum −1/(2N−1) via the integrated amplitudes at the predicted time.
    for n in [1u32, 2, 3, 5, 10] {
        let omega = (4.0 * n as f64 - 2.0).sqrt();
        let t_min = PI / omega;
        let p = SystemParams::in_units_of_g(0.0, 0.0, 0.0, n, 0.0).unwrap();
        let amps = collective::n_atom_amplitudes(&p, t_min).unwrap();
        let floor = -1.0 / (2.0 * n as f64 - 1.0);
        assert!(
            (amps.c_g2.re - floor).abs() <= 1e-8,
            "N = {n}: {} vs {floor}",
            amps.c_g2.re
        );
        assert!((collective::n_atom_ground_closed_form(n, 1.0, t_min) - floor).abs() <= 1e-12);
    }
    println!("criterion 5: two-atom closed form and −1/(2N−1) minima verified");
}

#[test]
fn criterion_06_cascade_vs_master_equation_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(20260810);
    let mut worst_v = 0.0f64;
    let mut worst_two = 0.0f64;
    for k in 0..10 {
        let gamma = rng.random_range(0.005..0.15);
        let delta = rng.random_range(0.0..2.0);
        let g_t = rng.random_range(1.0..12.0);
        let pv = SystemParams::in_units_of_g(delta, gamma, 0.0, 1, g_t).unwrap();
        let fast = lossy::gate_fidelity_lossy(&pv).unwrap().f_uncond;
        let oracle = lossy::lindblad_fidelity(&pv, 1e-3).unwrap();
        worst_v = worst_v.max((fast - oracle).abs());
        assert!(
            (fast - oracle).abs() <= 1e-6,
            "single-atom point {k}: cascade {fast} vs oracle {oracle}"
        );
        let p2 = SystemParams::in_units_of_g(delta, gamma, 0.0, 2, g_t).unwrap();
        let fast2 = collective::two_atom_gate_fidelity(&p2).unwrap().f_uncond;
        let oracle2 = collective::two_atom_lindblad_fidelity(&p2, 1e-3).unwrap();
        worst_two = worst_two.max((fast2 - oracle2).abs());
        assert!(
            (fast2 - oracle2).abs() <= 1e-6,
            "two-atom point {k}: cascade {fast2} vs oracle {oracle2}"
        );
    }
    println!(
        "criterion 6: cascade vs master equation, worst |ΔF| single {worst_v:.2e}, two-atom {worst_two:.2e}"
    );
}

#[test]
fn criterion_07_monte_carlo_state_average() {
    // t = 0: the average must come out at 0.4.
    let p0 = SystemParams::lossless(0.0, 0.0).unwrap();
    let a0 = vatom::closed_form_amplitudes(&p0, 0.0).unwrap();
    let (mean0, se0) = vatom::monte_carlo_fidelity(&a0, 100_000, 7).unwrap();
    assert!((mean0 - 0.4).abs() <= 3.0 * se0, "t = 0: {mean0} ± {se0}");

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for k in 0..20 {
        let delta = rng.random_range(0.0..2.0);
        let g_t = rng.random_range(0.0..20.0);
        let p = SystemParams::lossless(delta, g_t).unwrap();
        let amps = vatom::closed_form_amplitudes(&p, g_t).unwrap();
        if amps.c_g1.norm() < 1e-3 {
            continue;
        }
        let exact = vatom::gate_fidelity_lossless(&amps).f_uncond;
        let (mean, se) = vatom::monte_carlo_fidelity(&amps, 100_000, 1000 + k).unwrap();
        assert!(
            (mean - exact).abs() <= 3.0 * se,
            "point {k} at ({delta:.3}, {g_t:.3}): {mean} ± {se} vs {exact}"
        );
    }
    println!("criterion 7: Monte-Carlo averages match the closed form within 3σ");
}

#[test]
fn criterion_08_large_n_factorization_scaling() {
    // Collective V relations: C_g² = (C_g¹)², C_e² = C_g¹C_e¹, C_ee² = (C_e¹)².
    let deviation_v = |n: u32| -> f64 {
        let p = SystemParams::in_units_of_g(0.3, 0.0, 0.0, n, 0.0).unwrap();
        let tau_max = PI / (n as f64).sqrt();
        let mut worst = 0.0f64;
        for k in 1..=20 {
            let t = tau_max * k as f64 / 20.0;
            let c = collective::n_atom_amplitudes(&p, t).unwrap();
            worst = worst
                .max((c.c_g2 - c.c_g1 * c.c_g1).norm())
                .max((c.c_e2 - c.c_g1 * c.c_e1).norm())
                .max((c.c_ee2 - c.c_e1 * c.c_e1).norm());
        }
        worst
    };
    // Dual-rail relations carry a √2 on the singly-excited channel.
    let deviation_tl = |n: u32| -> f64 {
        let p = SystemParams::in_units_of_g(0.2, 0.0, 0.0, n, 0.0).unwrap();
        let tau_max = PI / (n as f64).sqrt();
        let mut worst = 0.0f64;
        for k in 1..=20 {
            let t = tau_max * k as f64 / 20.0;
            let c = two_level::two_level_amplitudes(&p, t).unwrap();
            worst = worst
                .max((c.c_g2 - c.c_g1 * c.c_g1).norm())
                .max((c.c_e2 - 2f64.sqrt() * c.c_g1 * c.c_e1).norm())
                .max((c.c_ee2 - c.c_e1 * c.c_e1).norm());
        }
        worst
    };
    for (label, deviation) in [
        ("collective V", deviation_v as fn(u32) -> f64),
        ("dual-rail", deviation_tl as fn(u32) -> f64),
    ] {
        let d100 = deviation(100);
        let d1k = deviation(1_000);
        let d10k = deviation(10_000);
        assert!(d10k <= 1e-3, "{label}: N = 10⁴ deviation {d10k}");
        for (hi, lo) in [(d100, d1k), (d1k, d10k)] {
            let ratio = hi / lo;
            assert!(
                (5.0..20.0).contains(&ratio),
                "{label}: per-decade ratio {ratio} ({d100:.2e}, {d1k:.2e}, {d10k:.2e})"
            );
        }
        println!(
            "criterion 8 ({label}): deviations {d100:.2e} → {d1k:.2e} → {d10k:.2e} (≈10× per decade)"
        );
    }
}

#[test]
fn criterion_09_five_level_closed_forms_and_asymptotics() {
    // Closed forms vs direct integration.
    for (delta, gamma, omega, t) in [
        (0.5, 0.05, 0.6, 8.0),
        (2.0, 0.1, 1.0, 5.0),
        (0.0, 0.0, 0.3, 12.0),
    ] {
        let p = SystemParams::in_units_of_g(delta, gamma, omega, 1, t).unwrap();
        let amps = mscheme::five_level_amplitudes(&p, t).unwrap();
        let (c1, c2) = mscheme::five_level_closed_form(&p, t).unwrap();
        assert!((amps.c_g1 - c1).norm() <= 1e-8);
        assert!((amps.c_g2 - c2).norm() <= 1e-8);
    }
    // Asymptotic error falls with detuning.
    let err_at = |delta: f64| -> f64 {
        let p = SystemParams::in_units_of_g(delta, 0.0, 0.5, 1, 0.0).unwrap();
        let mut worst = 0.0f64;
        for k in 0..=60 {
            let t = 30.0 * k as f64 / 60.0;
            let (e1, e2) = mscheme::five_level_closed_form(&p, t).unwrap();
            let (a1, a2) = mscheme::five_level_asymptotic(&p, t).unwrap();
            worst = worst.max((e1 - a1).norm()).max((e2 - a2).norm());
        }
        worst
    };
    let e100 = err_at(100.0);
    let e200 = err_at(200.0);
    assert!(e100 <= 0.05, "asymptotic error at δ = 100g: {e100}");
    assert!(e200 < e100, "{e200} vs {e100}");
    // A very strong drive freezes the ground amplitudes.
    let p = SystemParams::in_units_of_g(0.0, 0.0, 1000.0, 1, 0.0).unwrap();
    for t in [5.0, 15.0, 30.0] {
        let (c1, c2) = mscheme::five_level_closed_form(&p, t).unwrap();
        assert!((c1 - C64::new(1.0, 0.0)).norm() <= 1e-2);
        assert!((c2 - C64::new(1.0, 0.0)).norm() <= 1e-2);
    }
    println!(
        "criterion 9: closed forms ≤1e-8, asymptotic errors {e100:.3} → {e200:.3}, strong-drive freeze ≤1e-2"
    );
}

/// Grid maximum of a five-level objective on the shared window
/// (gT ≤ 30 sampled at 0.1, δ ≤ 10 sampled at 0.5).
fn five_level_grid_max(gamma: f64, omega: f64) -> f64 {
    let times: Vec<f64> = (0..=300).map(|k| k as f64 * 0.1).collect();
    let mut best = f64::MIN;
    for k in 0..=20 {
        let delta = 0.5 * k as f64;
        let swept =
            mscheme::five_level_fidelity_time_sweep(delta, gamma, omega, &times, 2.5e-3).unwrap();
        for f in swept {
            if f > best {
                best = f;
            }
        }
    }
    best
}

#[test]
fn criterion_10_five_level_optimal_drive() {
    let gamma = 0.1;
    let omegas = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2];
    let mut best_omega = 0.0;
    let mut best_value = f64::MIN;
    let mut at_zero = 0.0;
    for &omega in &omegas {
        let value = five_level_grid_max(gamma, omega);
        println!("  γ/g = {gamma}: Ω/g = {omega:.1} → F = {value:.4}");
        if omega == 0.0 {
            at_zero = value;
        }
        if value > best_value {
            best_value = value;
            best_omega = omega;
        }
    }
    assert!(
        (0.6..=1.0).contains(&best_omega),
        "best Ω/g = {best_omega} with F = {best_value}"
    );
    assert!(
        best_value > at_zero,
        "drive did not beat Ω = 0: {best_value} vs {at_zero}"
    );
    // At small γ the optimum runs into the scan window boundary; for the
    // stronger drives this happens already at γ/g = 0.01 (the gain comes
    // from pushing gT and δ up together).
    let small = cphase::scan::optimize_vs_gamma(
        OptimizeScheme::FiveLevel,
        &[0.01],
        30.0,
        10.0,
        &[1.2],
        &OptimizeSettings {
            gt_step: 0.1,
            delta_step: 0.5,
            scan_dt: 2.5e-3,
            refine_dt: 2.5e-3,
            refine: false,
        },
    )
    .unwrap();
    let p = small[0].1;
    assert!(
        p.hit_gt_boundary || p.hit_delta_boundary,
        "expected a boundary hit at small γ, got ({}, {})",
        p.g_t,
        p.delta
    );
    println!(
        "criterion 10: best Ω/g = {best_omega} (F = {best_value:.4} > {at_zero:.4} at Ω = 0); small-γ optimum at the window edge"
    );
}

#[test]
fn criterion_11_physicality_suite() {
    use cphase::linalg::hermitian_eigenvalues;
    let checks = |spec: &cphase::lindblad::LindbladSpec,
                  rho0: &ndarray::Array2<C64>,
                  t: f64,
                  pure_expected: bool,
                  label: &str| {
        let traj = integrate_lindblad(spec, rho0, t, 1e-3, 500).unwrap();
        for (k, rho) in traj.states.iter().enumerate() {
            let tr = (trace(rho) - C64::new(1.0, 0.0)).norm();
            assert!(tr <= 1e-10, "{label}: trace drift {tr} at sample {k}");
            let herm = hermiticity_defect(rho);
            assert!(herm <= 1e-10, "{label}: Hermiticity defect {herm}");
            let min = hermitian_eigenvalues(rho)[0];
            assert!(min >= -1e-8, "{label}: eigenvalue {min}");
            if pure_expected {
                let purity = trace_of_product(rho, rho).re;
                assert!(
                    (purity - 1.0).abs() <= 1e-8,
                    "{label}: purity {purity} at sample {k}"
                );
            }
        }
    };
    // Lossy and lossless representatives of all three master equations.
    let pv = SystemParams::in_units_of_g(0.7, 0.05, 0.0, 1, 8.0).unwrap();
    let (spec, basis) = lossy::v_lindblad_spec(&pv).unwrap();
    let mut rho0 = ndarray::Array2::<C64>::zeros((basis.len(), basis.len()));
    let g11 = basis.index(&[1, 1], cphase::AtomLevel::G).unwrap();
    rho0[(g11, g11)] = C64::new(1.0, 0.0);
    checks(&spec, &rho0, 8.0, false, "single-atom V");
    let pv0 = SystemParams::in_units_of_g(0.7, 0.0, 0.0, 1, 8.0).unwrap();
    let (spec0, _) = lossy::v_lindblad_spec(&pv0).unwrap();
    checks(&spec0, &rho0, 8.0, true, "single-atom V (γ = 0)");

    let p2 = SystemParams::in_units_of_g(1.0, 0.08, 0.0, 2, 6.0).unwrap();
    let (spec2, basis2) = collective::two_atom_lindblad_spec(&p2).unwrap();
    let mut rho2 = ndarray::Array2::<C64>::zeros((basis2.len(), basis2.len()));
    let g11 = basis2.index(&[1, 1], cphase::AtomLevel::G).unwrap();
    rho2[(g11, g11)] = C64::new(1.0, 0.0);
    checks(&spec2, &rho2, 6.0, false, "two-atom");

    let p5 = SystemParams::in_units_of_g(2.0, 0.1, 0.8, 1, 6.0).unwrap();
    let (spec5, basis5) = mscheme::five_level_lindblad_spec(&p5, 0.5).unwrap();
    let mut rho5 = ndarray::Array2::<C64>::zeros((basis5.len(), basis5.len()));
    let g11 = basis5.index(&[1, 1], cphase::AtomLevel::G).unwrap();
    rho5[(g11, g11)] = C64::new(1.0, 0.0);
    checks(&spec5, &rho5, 6.0, false, "five-level");
    let p5z = SystemParams::in_units_of_g(2.0, 0.0, 0.8, 1, 6.0).unwrap();
    let (spec5z, _) = mscheme::five_level_lindblad_spec(&p5z, 0.5).unwrap();
    checks(&spec5z, &rho5, 6.0, true, "five-level (γ = 0)");
    println!(
        "criterion 11: trace ≤1e-10, Hermiticity ≤1e-10, eigenvalues ≥ −1e-8, γ=0 purity ≤1e-8"
    );
}

#[test]
fn criterion_12_scheme_orderings() {
    // (a) One atom beats two at every loss rate.
    let settings = OptimizeSettings::default();
    let mut worst_gap = f64::MAX;
    for k in 0..20 {
        let gamma = 0.15 * k as f64 / 19.0;
        let single = optimize_objective(
            if gamma == 0.0 {
                GateObjective::VLossless
            } else {
                GateObjective::VLossy { gamma }
            },
            20.0,
            2.0,
            &settings,
        )
        .unwrap();
        let double =
            optimize_objective(GateObjective::TwoAtom { gamma }, 20.0, 2.0, &settings).unwrap();
        assert!(
            single.value >= double.value,
            "γ = {gamma}: single {} < two-atom {}",
            single.value,
            double.value
        );
        worst_gap = worst_gap.min(single.value - double.value);
    }

    // (b) Dual-rail fidelity is the V value minus the excited populations.
    for di in 0..=4 {
        for ti in 0..=8 {
            let delta = 0.5 * di as f64;
            let g_t = 2.5 * ti as f64;
            let p = SystemParams::lossless(delta, g_t).unwrap();
            let dual = two_level::two_level_gate_fidelity(&p).unwrap().f_uncond;
            let amps = vatom::closed_form_amplitudes(&p, g_t).unwrap();
            let v = vatom::gate_fidelity_lossless(&amps).f_uncond;
            let corr = (amps.c_e1.norm_sqr() + amps.c_e2.norm_sqr()) / 10.0;
            assert!(
                (dual - (v - corr)).abs() <= 1e-10,
                "identity broken at ({delta}, {g_t})"
            );
        }
    }

    // (c) At small loss the drive never helps, on the shared window.
    for gamma in [0.01, 0.03, 0.05] {
        let undriven = five_level_grid_max(gamma, 0.0);
        for omega in [0.4, 0.8, 1.2] {
            let driven = five_level_grid_max(gamma, omega);
            assert!(
                undriven >= driven,
                "γ = {gamma}: Ω = {omega} gives {driven} > undriven {undriven}"
            );
        }
    }
    println!(
        "criterion 12: single ≥ two-atom (min gap {worst_gap:.3}), dual-rail identity ≤1e-10, undriven ≥ driven for γ ≤ 0.05"
    );
}

#[test]
fn lossy_state_average_monte_carlo_oracle() {
    // Assumption-free check of the fidelity decomposition: draw random input
    // states, evolve each full density matrix under the master equation and
    // average the overlap with the ideal state directly. Any contribution
    // from photon coherences feeding through decay paths would show up here;
    // the average must land on the cascade value within sampling error.
    use cphase::basis::AtomLevel;
    let delta = 0.3;
    let gamma = 0.05;
    let g_t = 6.473;
    let params = SystemParams::in_units_of_g(delta, gamma, 0.0, 1, g_t).unwrap();
    let expected = lossy::gate_fidelity_lossy(&params).unwrap().f_uncond;
    let (spec, basis) = lossy::v_lindblad_spec(&params).unwrap();
    let dim = basis.len();
    let photon_states: [&[u8]; 4] = [&[0, 0], &[0, 1], &[1, 0], &[1, 1]];
    let ground: Vec<usize> = photon_states
        .iter()
        .map(|ph| basis.index(ph, AtomLevel::G).unwrap())
        .collect();
    let sectors: Vec<Vec<usize>> = photon_states
        .iter()
        .map(|ph| basis.photon_sector(ph))
        .collect();
    // Phase reference from the damped one-photon amplitude.
    let traj_phase = {
        let mut seed = ndarray::Array2::<C64>::zeros((dim, dim));
        seed[(ground[0], ground[1])] = C64::new(1.0, 0.0);
        let out = cphase::lindblad::propagate_matrix(&spec, &seed, g_t, 1e-3).unwrap();
        let z = out[(ground[0], ground[1])];
        z.conj() / z.norm()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let n_samples = 300;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_samples {
        let mut cuts = [
            rng.random::<f64>(),
            rng.random::<f64>(),
            rng.random::<f64>(),
        ];
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mags = [cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], 1.0 - cuts[2]];
        let alphas: Vec<C64> = mags
            .iter()
            .map(|&m| C64::from_polar(m.sqrt(), rng.random::<f64>() * std::f64::consts::TAU))
            .collect();
        let mut rho0 = ndarray::Array2::<C64>::zeros((dim, dim));
        for (i, &gi) in ground.iter().enumerate() {
            for (j, &gj) in ground.iter().enumerate() {
                rho0[(gi, gj)] = alphas[i] * alphas[j].conj();
            }
        }
        let rho =
            cphase::lindblad::integrate_lindblad(&spec, &rho0, g_t, 2e-3, usize::MAX).unwrap();
        let rho = rho.final_state();
        // Ideal-state coefficients {1, e^{iφ₁}, e^{iφ₁}, −e^{2iφ₁}}·α.
        let ideal = [
            alphas[0],
            alphas[1] * traj_phase,
            alphas[2] * traj_phase,
            -alphas[3] * traj_phase * traj_phase,
        ];
        let mut overlap = C64::new(0.0, 0.0);
        for (i, si) in sectors.iter().enumerate() {
            for (j, sj) in sectors.iter().enumerate() {
                // Trace over the atom: only equal atomic levels survive.
                let mut block = C64::new(0.0, 0.0);
                for (&a, &b) in si.iter().zip(sj.iter()) {
                    block += rho[(a, b)];
                }
                overlap += ideal[i].conj() * block * ideal[j];
            }
        }
        sum += overlap.re;
        sum_sq += overlap.re * overlap.re;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let se = ((sum_sq / n - mean * mean).max(0.0) / (n - 1.0)).sqrt();
    assert!(
        (mean - expected).abs() <= 3.0 * se,
        "state-averaged master equation {mean} ± {se} vs cascade {expected}"
    );
    println!(
        "lossy state average: Monte-Carlo master equation {mean:.5} ± {se:.5} vs cascade {expected:.5}"
    );
}

#[test]
fn fig3_interior_properties() {
    // Values between the quoted endpoints are pinned by properties:
    // unconditional fidelity falls with γ, conditioning helps, and the
    // conditional curve steps down at each regime switch.
    let gammas: Vec<f64> = (0..=31).map(|k| 0.005 * k as f64).collect();
    let curve = lossy::figure3_curve(&gammas).unwrap();
    assert!((curve[0].1 - 0.9968).abs() <= 1e-3);
    for w in curve.windows(2) {
        assert!(
            w[1].1 <= w[0].1 + 1e-12,
            "unconditional rose between γ = {} and {}",
            w[0].0,
            w[1].0
        );
    }
    for (gamma, fu, fc) in &curve {
        if *gamma > 0.0 {
            assert!(fc >= fu, "conditional below unconditional at γ = {gamma}");
        }
    }
    for boundary in [0.005, 0.015, 0.07] {
        let below = lossy::figure3_curve(&[boundary - 1e-4]).unwrap()[0].2;
        let above = lossy::figure3_curve(&[boundary + 1e-4]).unwrap()[0].2;
        assert!(
            above < below,
            "no conditional step at γ = {boundary}: {below} → {above}"
        );
    }
    println!(
        "fig3 interior: monotone, conditional ≥ unconditional, stepwise drops at regime switches"
    );
}
