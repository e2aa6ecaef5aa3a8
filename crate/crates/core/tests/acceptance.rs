//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use rand::Rng;
use rayon::prelude::*;
use renyi_core::discrimination::{
    classical_relative_entropy, measured_lower_bound, measured_renyi, optimality_slack, sc_exponent_estimate,
    Channel, ClassicalPair, MeasuredSearch, Povm,
};
use renyi_core::divergence::{d_max, d_sandwiched, d_tilde_sandwiched, q_alpha_z, relative_entropy, AlphaZ};
use renyi_core::hoeffding::{bipolar_recover_refined, default_u_grid, hoeffding_anti, Psi};
use renyi_core::operator::{c64, DiagonalModel, HermitianOperator};
use renyi_core::random::{density, probability, psd, seeded, unitary};
use renyi_core::truncation::{doubling_levels, ladder_models, model_relative_entropy, LadderConfig, Verdict};
use renyi_core::variational::{optimizer_h, q_var_objective};
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn diag(v: &[f64]) -> HermitianOperator {
    HermitianOperator::from_real_diagonal(v)
}

fn classical_oracle() -> Outcome {
    let mut rng = seeded(1);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let d = rng.random_range(2..=8);
        let p = probability(d, 0.01, &mut rng);
        let q = probability(d, 0.01, &mut rng);
        let (rho, sigma) = (diag(&p), diag(&q));
        for alpha in [1.2, 2.0, 3.0, 5.0] {
            let want: f64 = p.iter().zip(&q).map(|(a, b)| a.powf(alpha) * b.powf(1.0 - alpha)).sum();
            for z in [0.5, 1.0, alpha, 2.0 * alpha] {
                let got = q_alpha_z(&rho, &sigma, AlphaZ::new(alpha, z).unwrap()).unwrap().value;
                worst = worst.max(rel(got, want));
            }
        }
        let ratio = p.iter().zip(&q).map(|(a, b)| a / b).fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(rel(d_max(&rho, &sigma).unwrap().value.exp(), ratio));
        let kl: f64 = p.iter().zip(&q).map(|(a, b)| a * (a / b).ln()).sum();
        worst = worst.max(rel(relative_entropy(&rho, &sigma).unwrap().value, kl));
    }
    outcome(worst <= 1e-10, format!("max relative error {worst:.2e}"))
}

fn z_monotonicity() -> Outcome {
    let violations: Vec<f64> = (0..500u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded(1000 + i);
            let d = rng.random_range(2..=6);
            let rho = density(d, &mut rng);
            let sigma = density(d, &mut rng);
            let mut worst = f64::NEG_INFINITY;
            for alpha in [1.5, 2.0, 3.0] {
                let mut zs = [0.6, 1.0, alpha / 2.0, alpha, 2.0 * alpha, 4.0 * alpha];
                zs.sort_by(f64::total_cmp);
                let qs: Vec<f64> =
                    zs.iter().map(|&z| q_alpha_z(&rho, &sigma, AlphaZ::new(alpha, z).unwrap()).unwrap().value).collect();
                for w in qs.windows(2) {
                    worst = worst.max(w[1] - w[0]);
                }
            }
            worst
        })
        .collect();
    let worst = violations.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    outcome(worst <= 1e-9, format!("largest increase along z {worst:.2e}"))
}

fn variational_saturation() -> Outcome {
    let params = [(1.5, 1.5), (2.0, 2.0), (3.0, 3.0), (2.0, 1.0), (3.0, 2.0)];
    let res: Vec<(f64, f64)> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded(2000 + i);
            let d = rng.random_range(2..=4);
            let rho = density(d, &mut rng);
            let sigma = density(d, &mut rng);
            let (mut gap, mut excess) = (0.0f64, f64::NEG_INFINITY);
            for &(a, z) in &params {
                let p = AlphaZ::new(a, z).unwrap();
                let q = q_alpha_z(&rho, &sigma, p).unwrap().value;
                let w = optimizer_h(&rho, &sigma, p, None).unwrap();
                gap = gap.max(rel(w.objective_q, q));
                for _ in 0..5 {
                    let h = psd(d, &mut rng).scale(rng.random_range(0.05..20.0));
                    excess = excess.max((q_var_objective(&h, &rho, &sigma, p).unwrap() - q) / q);
                }
            }
            (gap, excess)
        })
        .collect();
    let gap = res.iter().map(|r| r.0).fold(0.0, f64::max);
    let excess = res.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    outcome(
        gap <= 1e-8 && excess <= 1e-8,
        format!("optimizer gap {gap:.2e}, largest witness excess {excess:.2e} over 1000 witnesses per (α,z)"),
    )
}

fn recoverability() -> Outcome {
    let rs = [0.3, 0.5, 0.8];
    let levels = doubling_levels(9);
    let cfg = LadderConfig::default();
    let (mut worst, mut checked, mut skipped, mut all_ok) = (0.0f64, 0, 0, true);
    for &r1 in &rs {
        for &r2 in &rs {
            let rho = DiagonalModel::geometric(r1, true).unwrap();
            let sigma = DiagonalModel::geometric(r2, true).unwrap();
            for alpha in [1.5, 2.0, 4.0] {
                let t = r1.powf(alpha) * r2.powf(1.0 - alpha);
                if t >= 1.0 {
                    skipped += 1;
                    continue;
                }
                let (c1, c2) = ((1.0 - r1) / r1, (1.0 - r2) / r2);
                let closed = c1.powf(alpha) * c2.powf(1.0 - alpha) * t / (1.0 - t);
                let rep = ladder_models(&rho, &sigma, AlphaZ::sandwiched(alpha).unwrap(), &levels, &cfg).unwrap();
                checked += 1;
                match rep.verdict {
                    Verdict::Converged { limit, .. } => worst = worst.max(rel(limit, closed)),
                    _ => all_ok = false,
                }
                all_ok &= rep.monotone;
            }
        }
    }
    outcome(
        all_ok && worst < 1e-4,
        format!("{checked} converged ladders to N=512, max relative error {worst:.2e}; {skipped} pairs with Q=+∞ skipped"),
    )
}

fn divergence_example() -> Outcome {
    let rho = DiagonalModel::power(3.0, true).unwrap();
    let sigma = DiagonalModel::superpower(0.5, true).unwrap();
    let levels = doubling_levels(12);
    let cfg = LadderConfig::default();
    let mut ok = true;
    let mut notes = Vec::new();
    for alpha in [1.5, 2.0, 3.0] {
        let rep = ladder_models(&rho, &sigma, AlphaZ::sandwiched(alpha).unwrap(), &levels, &cfg).unwrap();
        let first = rep.points.iter().find(|p| p.log_value > 1e6f64.ln()).map(|p| p.level);
        ok &= first.is_some() && rep.verdict == Verdict::Diverging;
        let at = first.map_or("none".to_string(), |n| (n as u64).to_string());
        notes.push(format!("α={alpha}: >1e6 at N={at}, {:?}", rep.verdict));
    }
    let d: Vec<f64> = [1024, 2048, 4096].iter().map(|&n| model_relative_entropy(&rho, &sigma, n).value).collect();
    let sig3 = |x: f64| format!("{x:.2e}");
    let stable = d.iter().all(|x| x.is_finite()) && sig3(d[0]) == sig3(d[1]) && sig3(d[1]) == sig3(d[2]);
    ok &= stable;
    notes.push(format!("D(N=2^10,2^11,2^12) = {:.6}, {:.6}, {:.6}", d[0], d[1], d[2]));
    outcome(ok, notes.join("; "))
}

fn alpha_limit() -> Outcome {
    let mut rng = seeded(6);
    let (mut worst_mono, mut worst_gap) = (f64::NEG_INFINITY, 0.0f64);
    for _ in 0..50 {
        let d = rng.random_range(2..=5);
        let rho = psd(d, &mut rng);
        let sigma = density(d, &mut rng);
        let vals: Vec<f64> =
            (1..=12).map(|k| d_tilde_sandwiched(&rho, &sigma, 2f64.powi(k)).unwrap().value).collect();
        for w in vals.windows(2) {
            worst_mono = worst_mono.max(w[0] - w[1]);
        }
        let dm = d_max(&rho, &sigma).unwrap().value;
        worst_gap = worst_gap.max((vals[11] - dm).abs());
    }
    outcome(
        worst_mono <= 1e-9 && worst_gap < 1e-2,
        format!("largest decrease {worst_mono:.2e}, |D̃*_4096 − D_max| ≤ {worst_gap:.2e}"),
    )
}

fn legendre_oracle(p: &[f64], q: &[f64], r: f64) -> f64 {
    (0..=10_000)
        .map(|i| i as f64 / 10_000.0)
        .map(|u| {
            let psi = if u == 0.0 {
                0.0
            } else if u == 1.0 {
                p.iter().zip(q).map(|(a, b)| (a / b).ln()).fold(f64::NEG_INFINITY, f64::max)
            } else {
                let a = 1.0 / (1.0 - u);
                (1.0 - u) * p.iter().zip(q).map(|(x, y)| x.powf(a) * y.powf(1.0 - a)).sum::<f64>().ln()
            };
            u * r - psi
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn hoeffding_bipolar() -> Outcome {
    let (p, q) = ([0.7, 0.3], [0.5, 0.5]);
    let psi = Psi::matrices(diag(&p), diag(&q)).unwrap();
    let curve = psi.curve(&default_u_grid()).unwrap();
    let mut oracle_err = 0.0f64;
    for r in [0.05, 0.1, 0.2, 0.4] {
        let h = hoeffding_anti(&psi, &curve, r).unwrap().h_hat.value;
        oracle_err = oracle_err.max((h - legendre_oracle(&p, &q, r)).abs());
    }
    let mut bip_err = 0.0f64;
    for u in [0.25, 0.5, 0.75] {
        let b = bipolar_recover_refined(&psi, &curve, u, None).unwrap();
        bip_err = bip_err.max((b.value.value - psi.value(u).unwrap().value).abs());
    }
    let d = classical_relative_entropy(&ClassicalPair::new(p.to_vec(), q.to_vec()).unwrap()).value;
    let below = [0.0, 0.5 * d, d]
        .iter()
        .map(|&r| hoeffding_anti(&psi, &curve, r).unwrap().h_hat.value.abs())
        .fold(0.0, f64::max);
    let above = hoeffding_anti(&psi, &curve, d + 0.05).unwrap().h_hat.value;
    outcome(
        oracle_err < 1e-4 && bip_err < 1e-3 && below <= 1e-10 && above > 1e-4,
        format!(
            "oracle error {oracle_err:.2e}, bipolar error {bip_err:.2e}, |Ĥ| below D(p‖q) {below:.1e}, Ĥ at D+0.05 = {above:.3e}"
        ),
    )
}

fn strong_converse() -> Outcome {
    let pair = ClassicalPair::bernoulli(0.7, 0.5).unwrap();
    let n_grid = [250, 500, 1000, 1500, 2000];
    let grid = default_u_grid();
    let mut ok = true;
    let mut notes = Vec::new();
    for r in [0.15, 0.25] {
        let rep = sc_exponent_estimate(&pair, r, &n_grid).unwrap();
        let err = (rep.extrapolated - rep.prediction).abs();
        let slack = rep
            .points
            .iter()
            .map(|pt| optimality_slack(&pair, pt, &grid).unwrap())
            .fold(f64::INFINITY, f64::min);
        ok &= err < 5e-2 && slack >= -1e-8;
        notes.push(format!(
            "r={r}: exponent(2000)={:.5}, extrapolated={:.5}, Ĥ={:.5}, min optimality slack {slack:.2e}",
            rep.exponents.last().unwrap(),
            rep.extrapolated,
            rep.prediction
        ));
    }
    outcome(ok, notes.join("; "))
}

fn dpi() -> Outcome {
    let res: Vec<(f64, f64)> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded(9000 + i);
            let d_out = if i % 2 == 0 { 2 } else { 3 };
            let k = rng.random_range(if d_out == 2 { 2 } else { 1 }..=4);
            let ch = Channel::random(3, d_out, k, &mut rng).unwrap();
            let rho = density(3, &mut rng);
            let sigma = density(3, &mut rng);
            let (cr, cs) = (ch.apply(&rho).unwrap(), ch.apply(&sigma).unwrap());
            let mut d_inc = f64::NEG_INFINITY;
            for alpha in [1.5, 2.0, 3.0] {
                let before = d_sandwiched(&rho, &sigma, alpha).unwrap().value;
                let after = d_sandwiched(&cr, &cs, alpha).unwrap().value;
                d_inc = d_inc.max(after - before);
            }
            let grid = default_u_grid();
            let (p0, p1) = (Psi::matrices(rho, sigma).unwrap(), Psi::matrices(cr, cs).unwrap());
            let (c0, c1) = (p0.curve(&grid).unwrap(), p1.curve(&grid).unwrap());
            let mut h_dec = f64::NEG_INFINITY;
            for r in [0.1, 0.5] {
                let h0 = hoeffding_anti(&p0, &c0, r).unwrap().h_hat.value;
                let h1 = hoeffding_anti(&p1, &c1, r).unwrap().h_hat.value;
                h_dec = h_dec.max(h0 - h1);
            }
            (d_inc, h_dec)
        })
        .collect();
    let d_inc = res.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let h_dec = res.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    outcome(
        d_inc <= 1e-8 && h_dec <= 1e-8,
        format!("largest increase of D*_α {d_inc:.2e}, largest decrease of Ĥ_r* {h_dec:.2e}"),
    )
}

fn measured() -> Outcome {
    let mut rng = seeded(10);
    let mut comm_err = 0.0f64;
    for _ in 0..50 {
        let d = rng.random_range(2..=4);
        let u = unitary(d, &mut rng);
        let mk = |v: &[f64]| {
            HermitianOperator::from_matrix_hermitized(&u * diag(v).matrix() * u.adjoint())
        };
        let rho = mk(&probability(d, 0.05, &mut rng));
        let sigma = mk(&probability(d, 0.05, &mut rng));
        let basis = rho.spectral().unwrap().eigenvectors().clone();
        let m = Povm::from_basis(&basis).unwrap();
        for alpha in [1.5, 2.0, 3.0] {
            let meas = measured_renyi(&rho, &sigma, &m, alpha).unwrap().value;
            comm_err = comm_err.max((meas - d_sandwiched(&rho, &sigma, alpha).unwrap().value).abs());
        }
    }
    let cfg = MeasuredSearch { random_trials: 32, local_steps: 200, seed: 10 };
    let mut monotone = true;
    let mut positive = true;
    let mut notes = Vec::new();
    for i in 0..4 {
        let mut rng = seeded(100 + i);
        let rho = density(2, &mut rng);
        let sigma = density(2, &mut rng);
        let b = measured_lower_bound(&rho, &sigma, 2.0, &[1, 2, 3], &cfg).unwrap();
        monotone &= b.windows(2).all(|w| w[1].best_gap <= w[0].best_gap);
        positive &= b[0].gap > 0.0;
        let gaps: Vec<String> = b.iter().map(|x| format!("{:.2e}", x.gap)).collect();
        notes.push(format!("[{}]", gaps.join(", ")));
    }
    outcome(
        comm_err <= 1e-9 && monotone && positive,
        format!("commuting error {comm_err:.2e}; qubit gaps for n=1,2,3: {}", notes.join(" ")),
    )
}

fn dmax_oracle(rho: &HermitianOperator, sigma: &HermitianOperator) -> f64 {
    let l = sigma.matrix().clone().cholesky().expect("σ is positive definite").l();
    let li = l.try_inverse().unwrap();
    let x = &li * rho.matrix() * li.adjoint();
    let x = (&x + x.adjoint()) * c64(0.5);
    x.symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max).ln()
}

fn endpoints() -> Outcome {
    let mut rng = seeded(11);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d = rng.random_range(2..=5);
        let rho = psd(d, &mut rng);
        let sigma = psd(d, &mut rng);
        let psi = Psi::matrices(rho.clone(), sigma.clone()).unwrap();
        let tr: f64 = rho.matrix().diagonal().iter().map(|z| z.re).sum();
        worst = worst.max((psi.value(0.0).unwrap().value - tr.ln()).abs());
        worst = worst.max((psi.value(1.0).unwrap().value - dmax_oracle(&rho, &sigma)).abs());
    }
    outcome(worst <= 1e-10, format!("max endpoint error {worst:.2e}"))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("classical oracle equivalence", Duration::from_secs(10), classical_oracle),
        ("z-monotonicity and sandwiched ≤ Petz", Duration::from_secs(60), z_monotonicity),
        ("variational saturation", Duration::from_secs(120), variational_saturation),
        ("finite-dimensional recoverability", Duration::from_secs(30), recoverability),
        ("divergent power/superpower example", Duration::from_secs(20), divergence_example),
        ("α→∞ limit", Duration::from_secs(30), alpha_limit),
        ("Hoeffding anti-divergence and bipolar recovery", Duration::from_secs(10), hoeffding_bipolar),
        ("strong converse exponent", Duration::from_secs(120), strong_converse),
        ("data processing", Duration::from_secs(120), dpi),
        ("measured divergence", Duration::from_secs(180), measured),
        ("endpoint conventions", Duration::from_secs(5), endpoints),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed < budget;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({}; {:.2}s of {}s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            name,
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 11 acceptance criteria passed");
}
