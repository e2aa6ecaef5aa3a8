use super::*;
use crate::divergence::relative_entropy;
use crate::random::{density as random_density, psd as random_psd};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn diag(v: &[f64]) -> HermitianOperator {
    HermitianOperator::from_real_diagonal(v)
}

fn classical_psi(p: &[f64], q: &[f64], u: f64) -> f64 {
    if u == 0.0 {
        return p.iter().sum::<f64>().ln();
    }
    if u == 1.0 {
        return p.iter().zip(q).map(|(a, b)| (a / b).ln()).fold(f64::NEG_INFINITY, f64::max);
    }
    let a = 1.0 / (1.0 - u);
    let s: f64 = p.iter().zip(q).map(|(x, y)| x.powf(a) * y.powf(1.0 - a)).sum();
    (1.0 - u) * s.ln()
}

fn grid_legendre(p: &[f64], q: &[f64], r: f64, n: usize) -> f64 {
    (0..=n)
        .map(|i| i as f64 / n as f64)
        .map(|u| u * r - classical_psi(p, q, u))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn bernoulli() -> Psi {
    Psi::matrices(diag(&[0.7, 0.3]), diag(&[0.5, 0.5])).unwrap()
}

const P: [f64; 2] = [0.7, 0.3];
const Q: [f64; 2] = [0.5, 0.5];

fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| a * (a / b).ln()).sum()
}

#[test]
fn identical_pair_gives_zero_curve() {
    let rho = diag(&[0.6, 0.3, 0.1]);
    let psi = Psi::matrices(rho.clone(), rho).unwrap();
    let curve = psi.curve(&default_u_grid()).unwrap();
    assert_eq!(curve.provenance, Provenance::Exact);
    for v in &curve.values {
        assert!(v.value.abs() < 1e-12, "{v:?}");
    }
}

#[test]
fn bernoulli_midpoint() {
    let v = bernoulli().value(0.5).unwrap();
    assert!((v.value - 0.5 * 1.16f64.ln()).abs() < 1e-12);
    assert!((v.value - 0.0742100).abs() < 1e-6);
}

#[test]
fn endpoints_follow_conventions() {
    let psi = Psi::matrices(diag(&[0.2, 0.1]), diag(&[0.5, 0.5])).unwrap();
    assert!((psi.value(0.0).unwrap().value - 0.3f64.ln()).abs() < 1e-14);
    assert!((psi.value(1.0).unwrap().value - 0.4f64.ln()).abs() < 1e-12);
    assert!(psi.value(1.2).is_err());
    assert!(psi.value(-0.1).is_err());
}

#[test]
fn divergent_model_pair_is_infinite_inside() {
    let rho = DiagonalModel::power(3.0, true).unwrap();
    let sigma = DiagonalModel::superpower(0.5, true).unwrap();
    let psi = Psi::models(rho, sigma, None, LadderConfig::default()).unwrap();
    let curve = psi.curve(&[0.0, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0]).unwrap();
    assert_eq!(curve.provenance, Provenance::FaLadder { level: 4096 });
    assert!(curve.values[0].value.abs() < 1e-12);
    for v in &curve.values[1..] {
        assert!(v.is_pos_inf(), "{v:?}");
    }
    let rep = hoeffding_anti(&psi, &curve, 0.3).unwrap();
    assert!(rep.h_star.is_neg_inf());
    assert!(rep.h_hat.value.abs() < 1e-12);
    assert_eq!(rep.maximizer_u, Some(0.0));
    assert_eq!(rep.variant, Variant::Fa);
}

#[test]
fn identical_pair_anti_divergence_is_positive_part() {
    let rho = diag(&[0.5, 0.25, 0.25]);
    let psi = Psi::matrices(rho.clone(), rho).unwrap();
    let curve = psi.curve(&default_u_grid()).unwrap();
    for r in [-1.0, -0.2, 0.0, 0.3, 1.5] {
        let rep = hoeffding_anti(&psi, &curve, r).unwrap();
        let want = f64::max(r, 0.0);
        assert!((rep.h_hat.value - want).abs() < 1e-10, "r={r}: {rep:?}");
        assert!((rep.h_star.value - want).abs() < 1e-10);
    }
}

#[test]
fn bernoulli_matches_grid_oracle() {
    let psi = bernoulli();
    let curve = psi.curve(&default_u_grid()).unwrap();
    for r in [0.05, 0.1, 0.2, 0.4] {
        let rep = hoeffding_anti(&psi, &curve, r).unwrap();
        let want = grid_legendre(&P, &Q, r, 10_000);
        assert!((rep.h_hat.value - want).abs() < 1e-4, "r={r}: {} vs {want}", rep.h_hat.value);
        assert!(rep.h_hat.value >= want - 1e-12);
        assert_eq!(rep.h_star.value, rep.h_hat.value);
    }
}

#[test]
fn bernoulli_threshold_at_relative_entropy() {
    let psi = bernoulli();
    let curve = psi.curve(&default_u_grid()).unwrap();
    let d = kl(&P, &Q);
    for r in [d - 0.05, d - 1e-3, d] {
        let rep = hoeffding_anti(&psi, &curve, r).unwrap();
        assert!(rep.h_hat.value.abs() < 1e-10, "r={r}: {rep:?}");
    }
    let rep = hoeffding_anti(&psi, &curve, d + 0.05).unwrap();
    assert!(rep.h_hat.value > 1e-4);
    assert!(rep.h_hat.value < 0.05);
}

#[test]
fn value_bounds_subnormalized() {
    let p = [0.3, 0.2, 0.1];
    let q = [0.2, 0.5, 0.3];
    let psi = Psi::matrices(diag(&p), diag(&q)).unwrap();
    let curve = psi.curve(&default_u_grid()).unwrap();
    let tr: f64 = p.iter().sum();
    let dnorm = kl(&p, &q) / tr;
    let dmax = classical_psi(&p, &q, 1.0);
    for r in [dnorm - tr.ln() - 0.3, dnorm - tr.ln() - 1e-3] {
        let rep = hoeffding_anti(&psi, &curve, r).unwrap();
        assert!((rep.h_hat.value + tr.ln()).abs() < 1e-10, "r={r}: {rep:?}");
    }
    for r in [dnorm - tr.ln() + 0.05, dnorm - tr.ln() + 0.5, 3.0] {
        let rep = hoeffding_anti(&psi, &curve, r).unwrap();
        assert!(rep.h_hat.value > -tr.ln());
        assert!(rep.h_hat.value < r - dnorm);
        assert!(rep.h_star.value >= r - dmax - 1e-8);
    }
}

#[test]
fn anti_divergence_is_convex_nondecreasing_with_unit_slopes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rho = random_density(3, &mut rng);
    let sigma = random_density(3, &mut rng);
    let psi = Psi::matrices(rho, sigma).unwrap();
    let curve = psi.curve(&default_u_grid()).unwrap();
    let rs: Vec<f64> = (0..41).map(|i| -1.0 + 0.1 * i as f64).collect();
    let h: Vec<f64> = hoeffding_sweep(&psi, &curve, &rs).unwrap().iter().map(|r| r.h_hat.value).collect();
    for i in 1..h.len() {
        let slope = (h[i] - h[i - 1]) / 0.1;
        assert!((-1e-8..=1.0 + 1e-8).contains(&slope), "slope {slope}");
    }
    for i in 1..h.len() - 1 {
        assert!(h[i - 1] + h[i + 1] - 2.0 * h[i] >= -1e-8);
    }
}

#[test]
fn bipolar_recovers_bernoulli_curve() {
    let psi = bernoulli();
    let curve = psi.curve(&default_u_grid()).unwrap();
    for u in [0.25, 0.5, 0.75] {
        let b = bipolar_recover_refined(&psi, &curve, u, None).unwrap();
        assert!((b.value.value - classical_psi(&P, &Q, u)).abs() < 1e-3, "u={u}: {b:?}");
        assert!(!b.boundary);
    }
}

#[test]
fn bipolar_identical_pair_and_boundary_flag() {
    let rho = diag(&[0.5, 0.5]);
    let psi = Psi::matrices(rho.clone(), rho).unwrap();
    let curve = psi.curve(&default_u_grid()).unwrap();
    for u in [0.2, 0.5, 0.9] {
        let b = bipolar_recover_refined(&psi, &curve, u, None).unwrap();
        assert!(b.value.value.abs() < 1e-9, "{b:?}");
    }
    let reports = hoeffding_sweep(&psi, &curve, &[1.0, 2.0, 3.0]).unwrap();
    let b = bipolar_recover(&reports, 0.5);
    assert!(b.boundary);
    assert_eq!(b.argmax_r, Some(1.0));
}

#[test]
fn cutoff_rate_examples() {
    let c = cutoff_rate(&bernoulli(), 0.5).unwrap();
    assert!(c.regular);
    assert!((c.value.value - 1.16f64.ln()).abs() < 1e-12);
    assert_eq!(c.alpha0, 2.0);

    let rho = diag(&[0.4, 0.6]);
    let same = Psi::matrices(rho.clone(), rho).unwrap();
    assert!(cutoff_rate(&same, 0.3).unwrap().value.value.abs() < 1e-12);

    let inf = Psi::models(
        DiagonalModel::power(3.0, true).unwrap(),
        DiagonalModel::superpower(0.5, true).unwrap(),
        None,
        LadderConfig::default(),
    )
    .unwrap();
    let c = cutoff_rate(&inf, 0.5).unwrap();
    assert!(!c.regular);
    assert_eq!(c.bracket[0], f64::NEG_INFINITY);
    assert_eq!(c.bracket[1], f64::INFINITY);
    assert!(cutoff_rate(&inf, 1.0).is_err());
}

#[test]
fn tensor_power_is_additive() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rho = random_density(2, &mut rng);
    let sigma = random_density(2, &mut rng);
    let one = Psi::matrices(rho.clone(), sigma.clone()).unwrap();
    for u in [0.0, 0.25, 0.5, 0.8, 1.0] {
        let v1 = one.value(u).unwrap().value;
        let v1n = tensor_power_psi(&rho, &sigma, 1, u).unwrap().value;
        assert!((v1 - v1n).abs() <= 1e-12 * (1.0 + v1.abs()));
        let v3 = tensor_power_psi(&rho, &sigma, 3, u).unwrap().value;
        assert!((v3 - 3.0 * v1).abs() <= 1e-7 * (1.0 + v3.abs()), "u={u}: {v3} vs {}", 3.0 * v1);
    }
    assert!(tensor_powers(&rho, &sigma, 13).is_err());
    assert!(tensor_powers(&rho, &sigma, 0).is_err());
}

#[test]
fn tensor_power_anti_divergence_scales() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rho = random_density(2, &mut rng);
    let sigma = random_density(2, &mut rng);
    let one = Psi::matrices(rho.clone(), sigma.clone()).unwrap();
    let two = Psi::tensor_power(&rho, &sigma, 2).unwrap();
    assert_eq!(two.variant(), Variant::Ofa);
    let grid = default_u_grid();
    let (c1, c2) = (one.curve(&grid).unwrap(), two.curve(&grid).unwrap());
    let d = relative_entropy(&rho, &sigma).unwrap().value;
    for r in [0.5 * d, d + 0.1, d + 0.5, 2.0] {
        let h1 = hoeffding_anti(&one, &c1, r).unwrap().h_hat.value;
        let h2 = hoeffding_anti(&two, &c2, 2.0 * r).unwrap().h_hat.value;
        assert!((h2 - 2.0 * h1).abs() < 1e-7, "r={r}: {h2} vs {}", 2.0 * h1);
    }
}

#[test]
fn tensor_power_anti_divergence_subadditive() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rho = random_density(2, &mut rng);
    let sigma = random_density(2, &mut rng);
    let grid = default_u_grid();
    let r = 0.4;
    let h: Vec<f64> = (1..=3)
        .map(|n| {
            let psi = Psi::tensor_power(&rho, &sigma, n).unwrap();
            let c = psi.curve(&grid).unwrap();
            hoeffding_anti(&psi, &c, n as f64 * r).unwrap().h_hat.value
        })
        .collect();
    assert!(h[1] <= h[0] + h[0] + 1e-8);
    assert!(h[2] <= h[0] + h[1] + 1e-8);
}

#[test]
fn unsupported_pair_keeps_both_versions_equal_when_interior_finite() {
    let psi = Psi::matrices(diag(&[0.5, 0.5, 0.0]), diag(&[0.2, 0.3, 0.5])).unwrap();
    let curve = psi.curve(&default_u_grid()).unwrap();
    for r in [-0.5, 0.1, 0.7, 2.0] {
        let rep = hoeffding_anti(&psi, &curve, r).unwrap();
        assert_eq!(rep.h_hat, rep.h_star);
    }
}

#[test]
fn curve_serializes() {
    let curve = bernoulli().curve(&[0.0, 0.5, 1.0]).unwrap();
    let json = serde_json::to_string(&curve).unwrap();
    let back: PsiCurve = serde_json::from_str(&json).unwrap();
    assert_eq!(back, curve);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn curve_is_convex_with_exact_endpoints(seed in any::<u64>(), d in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_psd(d, &mut rng);
        let sigma = random_density(d, &mut rng);
        let psi = Psi::matrices(rho.clone(), sigma.clone()).unwrap();
        let curve = psi.curve(&uniform_grid(40)).unwrap();
        prop_assert!(curve.min_second_difference() >= -1e-8);
        prop_assert!((curve.values[0].value - rho.trace().ln()).abs() < 1e-10);
        let dm = d_max(&rho, &sigma).unwrap().value;
        prop_assert!((curve.values[40].value - dm).abs() < 1e-10);
    }

    #[test]
    fn hat_dominates_and_lower_bound_holds(seed in any::<u64>(), r in -2.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(3, &mut rng);
        let sigma = random_density(3, &mut rng);
        let psi = Psi::matrices(rho.clone(), sigma.clone()).unwrap();
        let curve = psi.curve(&uniform_grid(50)).unwrap();
        let rep = hoeffding_anti(&psi, &curve, r).unwrap();
        prop_assert!(rep.h_hat.value >= rep.h_star.value - 1e-8);
        prop_assert!((rep.h_hat.value - rep.h_star.value).abs() <= 1e-8);
        let dm = d_max(&rho, &sigma).unwrap().value;
        prop_assert!(rep.h_star.value >= r - dm - 1e-8);
        prop_assert!(rep.h_hat.value >= -1e-12);
    }
}
