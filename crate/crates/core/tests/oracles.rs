mod common;

use std::f64::consts::{PI, TAU};

use intermod::channel::{inner_product, make_correlated_pair, ComplexVector};
use intermod::detector::{
    energy_pdf, error_probability, mixture_pdf, optimal_threshold, regularized_lower_gamma, DetectorModel,
};
use intermod::simulator::{detect_ook_bit, ScenarioConfig, Link};
use intermod::weights::{build_weight_set, closed_form_norms, phase_align_targets, solve_min_norm, TargetGains};
use intermod::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn incomplete_gamma_two_one_matches_quadrature() {
    let q = common::lower_gamma_quadrature(2, 1.0);
    let p = regularized_lower_gamma(2.0, 1.0).unwrap();
    assert!((q - 0.264_241_117_657_115_4).abs() < 1e-13);
    assert!((p - q).abs() < 1e-13);
}

#[test]
fn energy_density_integrates_to_one() {
    let total = common::integrate(|e| energy_pdf(e, 50, 1.0).unwrap(), 0.0, 400.0, 2000);
    assert!((total - 1.0).abs() < 1e-8, "{total}");
}

#[test]
fn energy_density_matches_direct_formula() {
    for &(n, scale) in &[(1u32, 0.7), (5, 2.0), (50, 1.0), (400, 0.01)] {
        let mean = n as f64 * scale;
        for eps in [0.5 * mean, mean, 1.5 * mean] {
            let got = energy_pdf(eps, n as usize, scale).unwrap();
            let want = common::gamma_density(eps, n, scale);
            assert!(((got - want) / want).abs() < 1e-11, "n={n} eps={eps}");
        }
    }
}

#[test]
fn energy_density_moments() {
    let (n, scale) = (7usize, 1.3);
    let m1 = common::integrate(|e| e * energy_pdf(e, n, scale).unwrap(), 0.0, 200.0, 2000);
    let m2 = common::integrate(|e| e * e * energy_pdf(e, n, scale).unwrap(), 0.0, 200.0, 2000);
    assert!((m1 - 7.0 * 1.3).abs() < 1e-9);
    assert!((m2 - m1 * m1 - 7.0 * 1.3 * 1.3).abs() < 1e-8);
}

#[test]
fn mixture_density_integrates_to_one() {
    for &(n, sr) in &[(1usize, 1.0), (10, 0.5), (100, 0.1)] {
        let hi = (1.0 + sr) * (n as f64 + 40.0 * (n as f64).sqrt() + 40.0);
        let total = common::integrate(|e| mixture_pdf(e, n, sr, 1.0).unwrap(), 0.0, hi, 4000);
        assert!((total - 1.0).abs() < 1e-8, "n={n}: {total}");
    }
}

#[test]
fn error_probability_matches_quadrature() {
    for &(n, sr, sn) in &[(1u32, 1.0, 1.0), (4, 0.5, 2.0), (20, 0.3, 1.0), (60, 0.2, 0.5)] {
        let delta = optimal_threshold(n as usize, sr, sn).unwrap();
        let got = error_probability(n as usize, sr, sn, delta).unwrap();
        let want = common::pe_quadrature(n, sr, sn, delta);
        assert!(((got - want) / want).abs() < 1e-9, "n={n}: {got} vs {want}");
    }
    // The single-sample closed form: 0.5 (e^{-2 ln 2} + 1 - e^{-ln 2}).
    let d = optimal_threshold(1, 1.0, 1.0).unwrap();
    assert!((common::pe_quadrature(1, 1.0, 1.0, d) - 0.375).abs() < 1e-12);
}

#[test]
fn threshold_minimises_error_on_a_scan() {
    for &(n, sr, sn) in &[(1usize, 1.0, 1.0), (10, 0.3, 1.0), (100, 0.05, 2.0)] {
        let d = optimal_threshold(n, sr, sn).unwrap();
        let pe_star = error_probability(n, sr, sn, d).unwrap();
        let (lo, hi) = (0.2 * d, 5.0 * d);
        let step = (hi - lo) / 999.0;
        let (best_i, best) = (0..1000)
            .map(|i| (i, error_probability(n, sr, sn, lo + step * i as f64).unwrap()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!(pe_star <= best * (1.0 + 1e-12), "n={n}");
        assert!(((lo + step * best_i as f64) - d).abs() <= step, "n={n}");
    }
    // Single-sample threshold is 2 ln 2 at unit SNR.
    assert!((optimal_threshold(1, 1.0f64, 1.0).unwrap() - 1.386_294_361_119_890_6).abs() < 1e-15);
}

#[test]
fn false_alarm_rate_matches_gamma_tail() {
    let n = 8;
    let sn = 0.5;
    let det = DetectorModel::optimal(n, 0.4, sn).unwrap();
    let want = det.false_alarm_probability().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let trials = 100_000;
    let mut alarms = 0usize;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..trials {
        for x in buf.iter_mut() {
            *x = intermod::simulator::complex_noise(sn, &mut rng);
        }
        alarms += detect_ook_bit(&buf, det.threshold) as usize;
    }
    let rate = alarms as f64 / trials as f64;
    let sigma = (want * (1.0 - want) / trials as f64).sqrt();
    assert!((rate - want).abs() < 3.0 * sigma, "{rate} vs {want}");
}

#[test]
fn aligned_phase_minimises_weight_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..10 {
        let phase = rng.random::<f64>() * TAU - PI;
        let pair = make_correlated_pair::<f64>(6, 0.5, phase, 1.0, trial).unwrap();
        let alpha = 0.3;
        let b_pu = Complex64::new((1.0f64 - alpha).sqrt(), 0.0);
        let (best_k, _) = (0..360)
            .map(|k| {
                let t = TargetGains {
                    b_su: Complex64::from_polar(alpha.sqrt(), TAU * k as f64 / 360.0),
                    b_pu,
                };
                (k, solve_min_norm(pair.h_su(), pair.h_pu(), t).unwrap().norm_sqr())
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let grid_phase = TAU * best_k as f64 / 360.0;
        let aligned = phase_align_targets(alpha, pair.rho());
        let diff = (grid_phase - aligned.b_su.arg()).rem_euclid(TAU);
        let dist = diff.min(TAU - diff);
        assert!(dist <= TAU / 360.0, "trial {trial}: grid {grid_phase}, aligned {}", aligned.b_su.arg());
        // And the aligned phase is -arg(rho).
        let want = (-pair.rho().arg()).rem_euclid(TAU);
        let got = aligned.b_su.arg().rem_euclid(TAU);
        assert!((got - want).abs() < 1e-12 || (got - want).abs() > TAU - 1e-12);
    }
}

/// Component of `v` orthogonal to span{conj(h_su), conj(h_pu)}: the null
/// space of the two row constraints.
fn nullspace_component(v: &ComplexVector<f64>, h_su: &ComplexVector<f64>, h_pu: &ComplexVector<f64>) -> ComplexVector<f64> {
    let a1 = h_su.conj().normalized();
    let a2_raw = h_pu.conj();
    let a2 = a2_raw
        .axpy(-inner_product(&a1, &a2_raw).unwrap(), &a1)
        .unwrap()
        .normalized();
    let mut out = v.clone();
    for a in [&a1, &a2] {
        let c = inner_product(a, &out).unwrap();
        out = out.axpy(-c, a).unwrap();
    }
    out
}

#[test]
fn nullspace_perturbation_increases_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for seed in 0..50 {
        let k = [4usize, 8, 16][seed as usize % 3];
        let rho = rng.random::<f64>() * 0.9;
        let alpha = rng.random::<f64>() * 0.9;
        let pair = make_correlated_pair::<f64>(k, rho, rng.random::<f64>() * TAU, 1.0, seed).unwrap();
        let ws = build_weight_set(&pair, alpha).unwrap();
        let raw = ComplexVector::new(
            (0..k)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect(),
        )
        .unwrap();
        let delta = nullspace_component(&raw, pair.h_su(), pair.h_pu()).normalized();
        let delta = delta.scale(Complex64::new(1e-3, 0.0));
        for w in [ws.omega0(), ws.omega1()] {
            let moved = w.axpy(Complex64::new(1.0, 0.0), &delta).unwrap();
            // The perturbation leaves both constraints intact...
            let d_su = pair.h_su().transpose_dot(&moved).unwrap() - pair.h_su().transpose_dot(w).unwrap();
            let d_pu = pair.h_pu().transpose_dot(&moved).unwrap() - pair.h_pu().transpose_dot(w).unwrap();
            assert!(d_su.norm() < 1e-12 && d_pu.norm() < 1e-12);
            // ...and strictly increases the norm.
            assert!(moved.norm_sqr() > w.norm_sqr());
        }
    }
}

#[test]
fn solved_norms_match_closed_forms() {
    for &(alpha, rho) in &[(0.2, 0.8), (0.0, 0.0), (0.5, 0.0), (0.7, 0.95), (0.01, 0.3)] {
        let pair = make_correlated_pair::<f64>(8, rho, 1.0, 1.0, 77).unwrap();
        let ws = build_weight_set(&pair, alpha).unwrap();
        let cf = closed_form_norms(alpha, rho).unwrap();
        assert!((ws.norm0_sq() - cf.norm0_sq).abs() < 1e-9);
        assert!((ws.norm1_sq() - cf.norm1_sq).abs() < 1e-9);
        assert!((ws.xi() - cf.xi).abs() < 1e-9);
    }
}

#[test]
fn bit_one_energy_moments_match_gamma() {
    let cfg = ScenarioConfig::<f64> {
        m_subcarriers: 256,
        n_samples: 10,
        snr_db: 0.0,
        master_seed: 5,
        ..Default::default()
    };
    let link = Link::new(&cfg).unwrap();
    let energies = link.symbol_energies(true, 100_000, 5).unwrap();
    let n = energies.len() as f64;
    let mean = energies.iter().sum::<f64>() / n;
    let var = energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let scale = link.detector.sigma_r_sq + link.detector.sigma_n_sq;
    assert!((mean / (10.0 * scale) - 1.0).abs() < 0.01);
    assert!((var / (10.0 * scale * scale) - 1.0).abs() < 0.05);
}
