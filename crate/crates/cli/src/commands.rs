//! The nine commands. Each computes its records (fanning out over parameters
//! where useful), builds its tables in scenario order and hands both to the
//! single writer in [`crate::output`].

use crate::output::{write_outputs, Cell, Options, Table};
use crate::scenario::{Operands, Resolved};
use crate::CliError;
use rayon::prelude::*;
use renyi_core::discrimination::{
    dpi_check, measured_lower_bound, sc_exponent_estimate, Channel, ClassicalPair, DpiReport, MeasuredBound,
    MeasuredSearch, ScExponentReport,
};
use renyi_core::divergence::{d_alpha_z, d_tilde, q_alpha_z, AlphaZ};
use renyi_core::hoeffding::{cutoff_rate, hoeffding_sweep, AntiDivergenceReport, CutoffRate, Psi, PsiCurve};
use renyi_core::operator::support_leq;
use renyi_core::random::{psd, seeded};
use renyi_core::truncation::{ladder_matrices, ladder_models, LadderReport, Verdict};
use renyi_core::variational::{
    dominance_violation_witnesses, optimizer_h, var_certificate, VarCertificate, VariationalWitness,
};
use renyi_core::{ExtendedValue, HermitianOperator, ModelFamily, Reason};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Compute,
    Ladder,
    Variational,
    Hoeffding,
    Cutoff,
    Simulate,
    Measured,
    Dpi,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Compute => "compute",
            Command::Ladder => "ladder",
            Command::Variational => "variational",
            Command::Hoeffding => "hoeffding",
            Command::Cutoff => "cutoff",
            Command::Simulate => "simulate",
            Command::Measured => "measured",
            Command::Dpi => "dpi",
            Command::Report => "report",
        }
    }
}

pub const COMPUTE_HEADER: &[&str] = &["alpha", "z", "Q", "D", "D_tilde", "status"];
pub const LADDER_HEADER: &[&str] = &["level", "value", "status"];
pub const VARIATIONAL_HEADER: &[&str] = &["alpha", "z", "Q", "max_objective", "relative_gap", "certified"];
pub const HOEFFDING_HEADER: &[&str] = &["r", "H_star", "H_hat", "argmax_u"];
pub const CUTOFF_HEADER: &[&str] = &["kappa", "alpha0", "value", "lower", "upper", "regular"];
pub const SIMULATE_HEADER: &[&str] = &["n", "r", "exponent", "prediction", "gap"];
pub const MEASURED_HEADER: &[&str] = &["n", "alpha", "best", "sandwiched", "gap", "best_gap", "family"];
pub const DPI_HEADER: &[&str] = &["trial", "alpha", "before", "after", "holds"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComputeRecord {
    pub alpha: f64,
    pub z: f64,
    pub q: ExtendedValue,
    pub d: ExtendedValue,
    pub d_tilde: ExtendedValue,
    pub status: String,
    /// The basis-cutoff ladder behind the values, for model pairs.
    pub ladder: Option<LadderReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderRecord {
    pub alpha: f64,
    pub z: f64,
    pub csv_file: String,
    pub report: LadderReport,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VariationalRecord {
    pub alpha: f64,
    pub z: f64,
    /// `optimizer` when the supports nest, `dominance_violation` otherwise.
    pub structured_witnesses: String,
    pub witnesses: Vec<VariationalWitness>,
    pub certificate: VarCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoeffdingResults {
    pub curve: PsiCurve,
    pub reports: Vec<AntiDivergenceReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpiRecord {
    pub trial: usize,
    pub d_out: usize,
    pub kraus: usize,
    pub report: DpiReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportIndex {
    pub commands: Vec<String>,
    pub files: Vec<String>,
}

fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Converged { .. } => "converged",
        Verdict::Diverging => "diverging",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn matrices<'a>(res: &'a Resolved, cmd: &str) -> Result<(&'a HermitianOperator, &'a HermitianOperator), CliError> {
    match &res.operands {
        Operands::Matrices { rho, sigma } => Ok((rho, sigma)),
        Operands::Models { .. } => Err(CliError::Input(format!("`{cmd}` needs matrix operators, not diagonal models"))),
    }
}

fn psi(res: &Resolved) -> Result<Psi, CliError> {
    let p = &res.scenario.params;
    Ok(match &res.operands {
        Operands::Matrices { rho, sigma } => Psi::matrices(rho.clone(), sigma.clone())?,
        Operands::Models { rho, sigma } => {
            Psi::models(rho.clone(), sigma.clone(), Some(p.levels.clone()), p.tolerances.ladder_config())?
        }
    })
}

fn windows(res: &Resolved) -> Vec<(f64, f64)> {
    res.scenario.params.windows.iter().flatten().map(|&[c, d]| (c, d)).collect()
}

fn compute_one(res: &Resolved, alpha: f64, z: f64) -> Result<ComputeRecord, CliError> {
    let p = AlphaZ::new(alpha, z)?;
    match &res.operands {
        Operands::Matrices { rho, sigma } => {
            let q = q_alpha_z(rho, sigma, p)?;
            Ok(ComputeRecord {
                alpha,
                z,
                q,
                d: d_alpha_z(rho, sigma, p)?,
                d_tilde: d_tilde(rho, sigma, p)?,
                status: q.reason.to_string(),
                ladder: None,
            })
        }
        Operands::Models { rho, sigma } => {
            let params = &res.scenario.params;
            let rep = ladder_models(rho, sigma, p, &params.levels, &params.tolerances.ladder_config())?;
            let log_q = match rep.verdict {
                Verdict::Diverging => f64::INFINITY,
                Verdict::Converged { limit, .. } => limit.ln(),
                Verdict::Inconclusive => rep.last().log_value,
            };
            let q = ExtendedValue::from_f64(log_q.exp(), Reason::LadderDivergent);
            let d = ExtendedValue::from_f64(log_q / (alpha - 1.0), Reason::LadderDivergent);
            let tr = rho.total_trace();
            let d_tilde =
                if tr.is_finite() { d.map_finite(|x| x - tr.ln() / (alpha - 1.0)) } else { ExtendedValue::not_evaluated() };
            Ok(ComputeRecord { alpha, z, q, d, d_tilde, status: verdict_name(&rep.verdict).to_string(), ladder: Some(rep) })
        }
    }
}

pub fn compute(res: &Resolved) -> Result<(Vec<Table>, Vec<ComputeRecord>), CliError> {
    let recs: Vec<ComputeRecord> =
        res.scenario.params.alpha_z().par_iter().map(|&(a, z)| compute_one(res, a, z)).collect::<Result<_, _>>()?;
    let mut t = Table::new("compute", COMPUTE_HEADER);
    for r in &recs {
        t.push(vec![
            Cell::Num(r.alpha),
            Cell::Num(r.z),
            Cell::num(&r.q),
            Cell::log(&r.d),
            Cell::log(&r.d_tilde),
            Cell::Text(r.status.clone()),
        ]);
    }
    Ok((vec![t], recs))
}

pub fn ladder(res: &Resolved) -> Result<(Vec<Table>, Vec<LadderRecord>), CliError> {
    let params = &res.scenario.params;
    let cfg = params.tolerances.ladder_config();
    let recs: Vec<LadderRecord> = params
        .alpha_z()
        .par_iter()
        .map(|&(alpha, z)| {
            let p = AlphaZ::new(alpha, z)?;
            let report = match &res.operands {
                Operands::Matrices { rho, sigma } => ladder_matrices(rho, sigma, p, &windows(res), &cfg)?,
                Operands::Models { rho, sigma } => ladder_models(rho, sigma, p, &params.levels, &cfg)?,
            };
            Ok(LadderRecord { alpha, z, csv_file: format!("ladder_a{alpha}_z{z}.csv"), report })
        })
        .collect::<Result<_, CliError>>()?;
    let tables = recs
        .iter()
        .map(|r| {
            let mut t = Table::new(format!("ladder_a{}_z{}", r.alpha, r.z), LADDER_HEADER);
            let status = verdict_name(&r.report.verdict);
            for pt in &r.report.points {
                t.push(vec![Cell::Num(pt.level), Cell::num(&pt.value), Cell::Text(status.to_string())]);
            }
            t
        })
        .collect();
    Ok((tables, recs))
}

pub fn variational(res: &Resolved) -> Result<(Vec<Table>, Vec<VariationalRecord>), CliError> {
    let (rho, sigma) = matrices(res, "variational")?;
    let params = &res.scenario.params;
    let nested = support_leq(rho, sigma)?;
    let recs: Vec<VariationalRecord> = params
        .alpha_z()
        .par_iter()
        .enumerate()
        .map(|(i, &(alpha, z))| {
            let p = AlphaZ::new(alpha, z)?;
            let mut witnesses = if nested {
                vec![optimizer_h(rho, sigma, p, None)?]
            } else {
                dominance_violation_witnesses(rho, sigma, p, &[1e-2, 1e-4, 1e-6, 1e-8, 1e-10])?
            };
            let mut rng = seeded(params.seed.wrapping_add(i as u64));
            for _ in 0..params.witnesses {
                witnesses.push(VariationalWitness::evaluate(psd(rho.dim(), &mut rng), rho, sigma, p)?);
            }
            let hs: Vec<HermitianOperator> = witnesses.iter_mut().filter_map(|w| w.h.take()).collect();
            if let Some(w) = witnesses.iter().find(|w| w.objective_q.is_nan()) {
                return Err(CliError::Numerical(format!("variational objective is NaN (F = {}, G = {})", w.f_value, w.g_value)));
            }
            let certificate = var_certificate(rho, sigma, p, &hs)?;
            let structured = if nested { "optimizer" } else { "dominance_violation" };
            Ok(VariationalRecord { alpha, z, structured_witnesses: structured.into(), witnesses, certificate })
        })
        .collect::<Result<_, CliError>>()?;
    let mut t = Table::new("variational", VARIATIONAL_HEADER);
    for r in &recs {
        let c = &r.certificate;
        t.push(vec![
            Cell::Num(r.alpha),
            Cell::Num(r.z),
            Cell::num(&c.q),
            Cell::Num(c.max_objective),
            Cell::Num(c.relative_gap),
            Cell::Bool(c.certified),
        ]);
    }
    Ok((vec![t], recs))
}

pub fn hoeffding(res: &Resolved) -> Result<(Vec<Table>, HoeffdingResults), CliError> {
    let params = &res.scenario.params;
    let psi = psi(res)?;
    let curve = psi.curve(&params.u_grid)?;
    let reports = hoeffding_sweep(&psi, &curve, &params.r_grid)?;
    let mut t = Table::new("hoeffding", HOEFFDING_HEADER);
    for r in &reports {
        t.push(vec![Cell::Log(r.r), Cell::log(&r.h_star), Cell::log(&r.h_hat), Cell::opt(r.maximizer_u)]);
    }
    Ok((vec![t], HoeffdingResults { curve, reports }))
}

pub fn cutoff(res: &Resolved) -> Result<(Vec<Table>, Vec<CutoffRate>), CliError> {
    let psi = psi(res)?;
    let recs: Vec<CutoffRate> =
        res.scenario.params.kappa.par_iter().map(|&k| cutoff_rate(&psi, k)).collect::<Result<_, _>>()?;
    let mut t = Table::new("cutoff", CUTOFF_HEADER);
    for c in &recs {
        t.push(vec![
            Cell::Num(c.kappa),
            Cell::Num(c.alpha0),
            Cell::log(&c.value),
            Cell::Log(c.bracket[0]),
            Cell::Log(c.bracket[1]),
            Cell::Bool(c.regular),
        ]);
    }
    Ok((vec![t], recs))
}

/// The distributions of a pair that is diagonal in the given basis.
pub fn classical_pair(res: &Resolved) -> Result<ClassicalPair, CliError> {
    let not_classical = || CliError::Input("`simulate` needs a commuting pair given as diagonal matrices or finite models".into());
    let diag = |a: &HermitianOperator| -> Option<Vec<f64>> {
        let m = a.matrix();
        let d = m.nrows();
        let off = (0..d).flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j))).any(|(i, j)| m[(i, j)].norm() != 0.0);
        if off {
            None
        } else {
            Some((0..d).map(|i| m[(i, i)].re).collect())
        }
    };
    let (p, q) = match &res.operands {
        Operands::Matrices { rho, sigma } => (diag(rho).ok_or_else(not_classical)?, diag(sigma).ok_or_else(not_classical)?),
        Operands::Models { rho, sigma } => match (rho.family(), sigma.family()) {
            (ModelFamily::Finite { values: a }, ModelFamily::Finite { values: b }) => {
                let n = a.len().max(b.len());
                ((1..=n).map(|k| rho.eigenvalue(k)).collect(), (1..=n).map(|k| sigma.eigenvalue(k)).collect())
            }
            _ => return Err(not_classical()),
        },
    };
    Ok(ClassicalPair::new(p, q)?)
}

pub fn simulate(res: &Resolved) -> Result<(Vec<Table>, Vec<ScExponentReport>), CliError> {
    let pair = classical_pair(res)?;
    let params = &res.scenario.params;
    let recs: Vec<ScExponentReport> =
        params.r_grid.iter().map(|&r| sc_exponent_estimate(&pair, r, &params.n_grid)).collect::<Result<_, _>>()?;
    let mut t = Table::new("simulate", SIMULATE_HEADER);
    for rep in &recs {
        for (pt, e) in rep.points.iter().zip(&rep.exponents) {
            t.push(vec![
                Cell::Int(pt.n as u64),
                Cell::Log(rep.r),
                Cell::Log(*e),
                Cell::Log(rep.prediction),
                Cell::Log(e - rep.prediction),
            ]);
        }
    }
    Ok((vec![t], recs))
}

pub fn measured(res: &Resolved) -> Result<(Vec<Table>, Vec<MeasuredBound>), CliError> {
    let (rho, sigma) = matrices(res, "measured")?;
    let params = &res.scenario.params;
    let cfg = MeasuredSearch {
        random_trials: params.measured.random_trials,
        local_steps: params.measured.local_steps,
        seed: params.seed,
    };
    let mut recs = Vec::new();
    for &alpha in &params.alpha {
        recs.extend(measured_lower_bound(rho, sigma, alpha, &params.copies, &cfg)?);
    }
    let mut t = Table::new("measured", MEASURED_HEADER);
    for b in &recs {
        t.push(vec![
            Cell::Int(b.n as u64),
            Cell::Num(b.alpha),
            Cell::log(&b.best),
            Cell::log(&b.sandwiched),
            Cell::Log(b.gap),
            Cell::Log(b.best_gap),
            Cell::Text(b.family.clone()),
        ]);
    }
    Ok((vec![t], recs))
}

pub fn dpi(res: &Resolved) -> Result<(Vec<Table>, Vec<DpiRecord>), CliError> {
    let (rho, sigma) = matrices(res, "dpi")?;
    let params = &res.scenario.params;
    let d_out = params.dpi.d_out.unwrap_or(rho.dim());
    let mut rng = seeded(params.seed);
    let channels: Vec<Channel> = (0..params.dpi.trials)
        .map(|_| Channel::random(rho.dim(), d_out, params.dpi.kraus, &mut rng))
        .collect::<Result<_, _>>()?;
    let jobs: Vec<(usize, f64)> =
        (0..channels.len()).flat_map(|t| params.alpha.iter().map(move |&a| (t, a))).collect();
    let recs: Vec<DpiRecord> = jobs
        .par_iter()
        .map(|&(trial, alpha)| {
            let report = dpi_check(&channels[trial], rho, sigma, alpha, params.tolerances.dpi_slack)?;
            Ok(DpiRecord { trial, d_out, kraus: params.dpi.kraus, report })
        })
        .collect::<Result<_, CliError>>()?;
    let mut t = Table::new("dpi", DPI_HEADER);
    for r in &recs {
        t.push(vec![
            Cell::Int(r.trial as u64),
            Cell::Num(r.report.alpha),
            Cell::log(&r.report.before),
            Cell::log(&r.report.after),
            Cell::Bool(r.report.holds),
        ]);
    }
    Ok((vec![t], recs))
}

fn names(paths: &[PathBuf]) -> Vec<String> {
    paths.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect()
}

/// Run `command` and write its outputs; returns the files written.
pub fn run(command: Command, res: &Resolved, opts: &Options) -> Result<Vec<PathBuf>, CliError> {
    let sc = &res.scenario;
    let name = command.name();
    match command {
        Command::Compute => compute(res).and_then(|(t, r)| write_outputs(opts, name, sc, &t, r)),
        Command::Ladder => ladder(res).and_then(|(t, r)| write_outputs(opts, name, sc, &t, r)),
        Command::Variational => variational(res).and_then(|(t, r)| write_outputs(opts, name, sc, &t, r)),
        Command::Hoeffding => hoeffding(res).and_then(|(t, r)| write_outputs(opts, name, sc, &t, r)),
        Command::Cutoff => cutoff(res).and_then(|(t, r)| write_outputs(opts, name, sc, &t, r)),
        Command::Simulate => simulate(res).and_then(|(t, r)| write_outputs(opts, name, sc, &t, r)),
        Command::Measured => measured(res).and_then(|(t, r)| write_outputs(opts, name, sc, &t, r)),
        Command::Dpi => dpi(res).and_then(|(t, r)| write_outputs(opts, name, sc, &t, r)),
        Command::Report => {
            let mut parts = vec![Command::Compute, Command::Ladder, Command::Hoeffding, Command::Cutoff];
            if matches!(res.operands, Operands::Matrices { .. }) {
                parts.push(Command::Variational);
            }
            let mut files = Vec::new();
            for c in &parts {
                files.extend(run(*c, res, opts)?);
            }
            let index = ReportIndex { commands: parts.iter().map(|c| c.name().to_string()).collect(), files: names(&files) };
            files.extend(write_outputs(opts, name, sc, &[], index)?);
            Ok(files)
        }
    }
}
