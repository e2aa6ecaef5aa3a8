use super::*;
use crate::divergence::q_alpha_z;
use crate::random;
use rand::Rng;

fn az(a: f64, z: f64) -> AlphaZ {
    AlphaZ::new(a, z).unwrap()
}

fn diag(v: &[f64]) -> HermitianOperator {
    HermitianOperator::from_real_diagonal(v)
}

#[test]
fn geometric_self_ladder_converges_to_one() {
    let g = DiagonalModel::geometric(0.5, true).unwrap();
    let levels: Vec<usize> = (1..=20).collect();
    let rep = ladder_models(&g, &g, az(2.0, 2.0), &levels, &LadderConfig::default()).unwrap();
    for (pt, n) in rep.points.iter().zip(1..) {
        let partial: f64 = (1..=n).map(|k| 0.5f64.powi(k)).sum();
        assert!((pt.value.value - partial).abs() < 1e-14);
    }
    assert!(rep.monotone);
    match rep.verdict {
        Verdict::Converged { limit, .. } => assert!((limit - 1.0).abs() < 1e-6),
        ref v => panic!("unexpected verdict {v:?}"),
    }
}

#[test]
fn power_vs_superpower_diverges() {
    let rho = DiagonalModel::power(3.0, true).unwrap();
    let sigma = DiagonalModel::superpower(0.5, true).unwrap();
    let levels = doubling_levels(12);
    let rep = ladder_models(&rho, &sigma, az(2.0, 2.0), &levels, &LadderConfig::default()).unwrap();
    // oracle: c₁² c₂⁻¹ Σ n^{-6+√n} with both constants from direct series
    let zeta3: f64 = (1..=400_000).rev().map(|n| (n as f64).powi(-3)).sum::<f64>() + 0.5 / 400_000.5f64.powi(2);
    let s2: f64 = (1..=200).map(|n| (n as f64).powf(-(n as f64).sqrt())).sum();
    let ln_c = -2.0 * zeta3.ln() + s2.ln();
    for pt in &rep.points {
        let n = pt.level as usize;
        let logs: Vec<f64> = (1..=n).map(|k| (k as f64).ln() * (-6.0 + (k as f64).sqrt())).collect();
        let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let oracle = ln_c + m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln();
        assert!((pt.log_value - oracle).abs() < 1e-10 * oracle.abs().max(1.0), "N={n}");
    }
    assert_eq!(rep.verdict, Verdict::Diverging);
    assert!(rep.monotone);
}

#[test]
fn full_window_reproduces_q() {
    let mut rng = random::seeded(21);
    for _ in 0..10 {
        let rho = random::density(4, &mut rng);
        let sigma = random::density(4, &mut rng);
        let p = az(2.0, 1.5);
        let rep = ladder_matrices(&rho, &sigma, p, &default_windows(&sigma).unwrap(), &LadderConfig::default())
            .unwrap();
        let q = q_alpha_z(&rho, &sigma, p).unwrap().value;
        assert!((rep.last().value.value - q).abs() <= 1e-12 * q);
    }
}

#[test]
fn sandwiched_matrix_ladders_are_monotone() {
    let mut rng = random::seeded(22);
    for _ in 0..20 {
        let d = rng.random_range(2..7);
        let rho = random::density(d, &mut rng);
        let sigma = random::density(d, &mut rng);
        for &a in &[1.5, 2.0, 3.0] {
            let rep = ladder(
                &Pair::Matrices { rho: rho.clone(), sigma: sigma.clone() },
                AlphaZ::sandwiched(a).unwrap(),
                &Levels::Default,
                &LadderConfig::default(),
            )
            .unwrap();
            assert!(rep.monotone, "{:?}", rep.values());
        }
    }
}

#[test]
fn empty_ladders_rejected() {
    let g = DiagonalModel::geometric(0.5, true).unwrap();
    assert!(ladder_models(&g, &g, az(2.0, 2.0), &[], &LadderConfig::default()).is_err());
    let i = HermitianOperator::identity(2);
    assert!(ladder_matrices(&i, &i, az(2.0, 2.0), &[], &LadderConfig::default()).is_err());
}

#[test]
fn q_fa_full_projection_matches_q() {
    let mut rng = random::seeded(23);
    let rho = random::density(3, &mut rng);
    let sigma = random::density(3, &mut rng);
    let p = AlphaZ::sandwiched(2.0).unwrap();
    let u = random::unitary(3, &mut rng);
    let family: Vec<Projection> =
        (1..=3).map(|k| Projection::from_orthonormal_columns(&u.columns(0, k).clone_owned())).collect();
    let est = q_fa_estimate(&rho, &sigma, p, &family, &LadderConfig::default()).unwrap();
    let q = q_alpha_z(&rho, &sigma, p).unwrap().value;
    assert!((est.value.value - q).abs() < 1e-12 * q);
    assert!(est.ladder.monotone);
}

#[test]
fn q_fa_support_violation_is_infinite() {
    let rho = diag(&[0.5, 0.5, 0.0]);
    let sigma = diag(&[0.0, 0.6, 0.4]);
    let ts: Vec<f64> = (1..=40).map(|k| 0.5f64.powi(k)).collect();
    let family = support_violation_family(&rho, &sigma, &ts).unwrap();
    let p = AlphaZ::sandwiched(2.0).unwrap();
    let est = q_fa_estimate(&rho, &sigma, p, &family, &LadderConfig::default()).unwrap();
    assert!(est.value.is_pos_inf());
    // each member equals ⟨ψ_t,ρψ_t⟩^α ⟨ψ_t,σψ_t⟩^{1-α}
    for (pt, &t) in est.ladder.points.iter().zip(&ts).take(10) {
        let a = (1.0 - t) * 0.5 + t * 0.5;
        let b = t * 0.6;
        let oracle = a * a / b;
        assert!((pt.value.value - oracle).abs() < 1e-8 * oracle);
    }
    assert!(support_violation_family(&sigma, &HermitianOperator::identity(3), &ts).is_err());
}

#[test]
fn q_fa_sub_ladder_is_a_lower_bound() {
    let rho = diag(&[0.4, 0.3, 0.2, 0.1]);
    let sigma = diag(&[0.1, 0.2, 0.3, 0.4]);
    let p = AlphaZ::sandwiched(2.0).unwrap();
    let family: Vec<Projection> = (1..=2)
        .map(|k| {
            let mut m = CMatrix::zeros(4, k);
            for j in 0..k {
                m[(j, j)] = c64(1.0);
            }
            Projection::from_orthonormal_columns(&m)
        })
        .collect();
    let est = q_fa_estimate(&rho, &sigma, p, &family, &LadderConfig::default()).unwrap();
    let q = q_alpha_z(&rho, &sigma, p).unwrap().value;
    let oracle = 0.16 / 0.1 + 0.09 / 0.2;
    assert!((est.value.value - oracle).abs() < 1e-12);
    assert!(est.value.value < q);
}

#[test]
fn contraction_checks() {
    let mut rng = random::seeded(24);
    let rho = random::density(4, &mut rng);
    let sigma = random::density(4, &mut rng);
    let p = AlphaZ::sandwiched(2.0).unwrap();
    let iso = random::isometry(4, 2, &mut rng);
    let proj = &iso * iso.adjoint();
    assert!(contraction_vs_projection_check(&proj, &rho, &sigma, p).unwrap());
    // K = P gives equality
    let pp = Projection::from_orthonormal_columns(&iso);
    let lhs = q_alpha_z(&compress(&proj, &rho).unwrap(), &compress(&proj, &sigma).unwrap(), p).unwrap().value;
    let rhs = q_alpha_z(&compress_projection(&pp, &rho), &compress_projection(&pp, &sigma), p).unwrap().value;
    assert!((lhs - rhs).abs() < 1e-12 * rhs);
    // K = tP scales by t^{2α} t^{2(1-α)} = t²
    let t = 0.6;
    let kt = &proj * c64(t);
    assert!(contraction_vs_projection_check(&kt, &rho, &sigma, p).unwrap());
    let lt = q_alpha_z(&compress(&kt, &rho).unwrap(), &compress(&kt, &sigma).unwrap(), p).unwrap().value;
    assert!((lt - t * t * rhs).abs() < 1e-12 * rhs);
    for _ in 0..100 {
        let k = random::contraction(4, 4, &mut rng);
        assert!(contraction_vs_projection_check(&k, &rho, &sigma, p).unwrap());
    }
}

#[test]
fn projection_monotonicity_random() {
    let mut rng = random::seeded(25);
    for _ in 0..60 {
        let d = rng.random_range(2..5);
        let rho = random::psd(d, &mut rng);
        let sigma = random::psd(d, &mut rng);
        let k = random::contraction(rng.random_range(1..=d), d, &mut rng);
        let a: f64 = rng.random_range(1.1..4.0);
        let lo = (a - 1.0).max(a / 2.0);
        let z = rng.random_range(lo..=a);
        let p = az(a, z);
        let full = q_alpha_z(&rho, &sigma, p).unwrap().value;
        let kr = compress(&k, &rho).unwrap();
        let ks = compress(&k, &sigma).unwrap();
        if kr.is_zero().unwrap() {
            continue;
        }
        let comp = q_alpha_z(&kr, &ks, p).unwrap();
        assert!(comp.value <= full * (1.0 + 1e-9), "{} > {full}", comp.value);
    }
}

#[test]
fn alpha_limit_commuting_pair() {
    let pair = Pair::Matrices { rho: diag(&[0.7, 0.3]), sigma: diag(&[0.5, 0.5]) };
    let alphas: Vec<f64> = (1..=12).map(|k| 2f64.powi(k)).collect();
    let rep = alpha_limit_to_dmax(&pair, &alphas, &LadderConfig::default()).unwrap();
    assert!(rep.ladder.monotone);
    for (pt, &a) in rep.ladder.points.iter().zip(&alphas) {
        let (t1, t2) = (a * 0.7f64.ln() + (1.0 - a) * 0.5f64.ln(), a * 0.3f64.ln() + (1.0 - a) * 0.5f64.ln());
        let oracle = (t1 + (1.0 + (t2 - t1).exp()).ln()) / (a - 1.0);
        assert!((pt.value.value - oracle).abs() < 1e-10);
    }
    assert!((rep.d_max.value - 1.4f64.ln()).abs() < 1e-14);
    assert!(matches!(rep.ladder.verdict, Verdict::Converged { .. }));
    assert!(!rep.limit_differs_from_d_max);
}

#[test]
fn alpha_limit_equal_states_is_zero() {
    let mut rng = random::seeded(26);
    let r = random::density(3, &mut rng);
    let pair = Pair::Matrices { rho: r.clone(), sigma: r };
    let rep = alpha_limit_to_dmax(&pair, &[2.0, 4.0, 8.0], &LadderConfig::default()).unwrap();
    for pt in &rep.ladder.points {
        assert!(pt.value.value.abs() < 1e-10);
    }
    assert!(rep.d_max.value.abs() < 1e-10);
}

#[test]
fn alpha_limit_flags_non_trace_class_counterexample() {
    let id = DiagonalModel::power(0.0, false).unwrap();
    let pair = Pair::Models { rho: id.clone(), sigma: id };
    let rep = alpha_limit_to_dmax(&pair, &[2.0, 4.0, 8.0], &LadderConfig::default()).unwrap();
    assert!(!rep.trace_class);
    assert_eq!(rep.d_max.value, 0.0);
    assert!(rep.raw.iter().all(|v| v.is_pos_inf()));
    assert!(rep.limit_differs_from_d_max);
    assert_eq!(rep.ladder.verdict, Verdict::Diverging);
}

/// `u r − (1-u) ln Q*_{1/(1-u)}` evaluated directly.
fn legendre_term(rho: &HermitianOperator, sigma: &HermitianOperator, u: f64, r: f64) -> f64 {
    let a = 1.0 / (1.0 - u);
    let lq = if rho.is_zero().unwrap() {
        f64::NEG_INFINITY
    } else {
        log_q_alpha_z(rho, sigma, AlphaZ::sandwiched(a).unwrap()).unwrap().value
    };
    u * r - (1.0 - u) * lq
}

#[test]
fn minimax_single_level_is_exact() {
    let vals = vec![vec![0.1, 0.5, 0.3]];
    let rep = minimax_exchange_check(&vals, &[0.0, 0.5, 1.0], 0.0).unwrap();
    assert!(rep.holds && rep.gap == 0.0);
}

#[test]
fn minimax_nested_commuting_projections() {
    let rho = diag(&[0.5, 0.3, 0.2]);
    let sigma = diag(&[0.2, 0.3, 0.5]);
    let u_grid: Vec<f64> = (1..40).map(|i| i as f64 / 40.0).collect();
    let r = 0.3;
    let family: Vec<Vec<f64>> = [2usize, 3]
        .iter()
        .map(|&k| {
            let mut m = CMatrix::zeros(3, k);
            for j in 0..k {
                m[(j, j)] = c64(1.0);
            }
            let pr = Projection::from_orthonormal_columns(&m);
            let (cr, cs) = (compress_projection(&pr, &rho), compress_projection(&pr, &sigma));
            u_grid.iter().map(|&u| legendre_term(&cr, &cs, u, r)).collect()
        })
        .collect();
    let rep = minimax_exchange_check(&family, &u_grid, 1e-12).unwrap();
    assert!(rep.holds, "{rep:?}");
}

#[test]
fn minimax_tensor_power_family() {
    let mut rng = random::seeded(27);
    let rho = random::density(2, &mut rng);
    let sigma = random::density(2, &mut rng);
    let u_grid: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
    let r = 0.4;
    let r2 = rho.kron(&rho);
    let s2 = sigma.kron(&sigma);
    let powers = [(1.0, rho.clone(), sigma.clone()), (2.0, r2.clone(), s2.clone()), (4.0, r2.kron(&r2), s2.kron(&s2))];
    let family: Vec<Vec<f64>> = powers
        .iter()
        .map(|(nf, rn, sn)| u_grid.iter().map(|&u| legendre_term(rn, sn, u, nf * r) / nf).collect())
        .collect();
    let rep = minimax_exchange_check(&family, &u_grid, 1e-6).unwrap();
    assert!(rep.holds, "{rep:?}");
}

#[test]
fn minimax_rejects_increasing_family() {
    let vals = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
    assert!(minimax_exchange_check(&vals, &[0.0, 1.0], 1e-9).is_err());
}

#[test]
fn geometric_pairs_recover_closed_form() {
    // Σ_n c₁^α c₂^{1-α} q^n with q = r₁^α r₂^{1-α}
    let rs = [0.3f64, 0.5, 0.8];
    for &r1 in &rs {
        for &r2 in &rs {
            for &a in &[1.5f64, 2.0, 4.0] {
                let q = r1.powf(a) * r2.powf(1.0 - a);
                if q >= 1.0 {
                    continue;
                }
                let c1 = (1.0 - r1) / r1;
                let c2 = (1.0 - r2) / r2;
                let closed = c1.powf(a) * c2.powf(1.0 - a) * q / (1.0 - q);
                let rho = DiagonalModel::geometric(r1, true).unwrap();
                let sigma = DiagonalModel::geometric(r2, true).unwrap();
                let rep = ladder_models(&rho, &sigma, az(a, a), &doubling_levels(9), &LadderConfig::default())
                    .unwrap();
                assert!(rep.monotone);
                match rep.verdict {
                    Verdict::Converged { limit, .. } => {
                        assert!((limit - closed).abs() / closed < 1e-4, "r1={r1} r2={r2} a={a}")
                    }
                    ref v => panic!("r1={r1} r2={r2} a={a}: {v:?}"),
                }
            }
        }
    }
}

#[test]
fn liminf_bound_on_fine_windows() {
    let mut rng = random::seeded(28);
    for _ in 0..20 {
        let rho = random::density(4, &mut rng);
        let sigma = random::density(4, &mut rng);
        for &(a, z) in &[(1.5, 1.5), (2.0, 3.0), (1.5, 4.0)] {
            let p = az(a, z);
            let q = q_alpha_z(&rho, &sigma, p).unwrap().value;
            let windows = default_windows(&sigma).unwrap();
            let rep = ladder_matrices(&rho, &sigma, p, &windows, &LadderConfig::default()).unwrap();
            let fine = rep.last().value.value;
            assert!(q <= fine + 1e-8);
            let w = windows.last().copied().unwrap();
            let lw = windowed_log_q(&rho, &sigma, p, w).unwrap();
            assert!((lw.exp() - q).abs() < 1e-10 * q);
        }
    }
}

#[test]
fn classify_rules() {
    let cfg = LadderConfig::default();
    assert_eq!(classify(&[], &cfg), Verdict::Inconclusive);
    assert_eq!(classify(&[0.0, f64::INFINITY], &cfg), Verdict::Diverging);
    assert_eq!(classify(&[0.0, 30.0], &cfg), Verdict::Diverging);
    let linear: Vec<f64> = (1..=8).map(|k| (2f64.powi(k)).ln()).collect();
    assert_eq!(classify(&linear, &cfg), Verdict::Diverging);
    let flat = vec![0.5f64.ln(); 5];
    assert!(matches!(classify(&flat, &cfg), Verdict::Converged { .. }));
}
