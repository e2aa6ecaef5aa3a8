//! Scenario files: schema, defaults and validation.
//!
//! A scenario is a JSON object
//!
//! ```json
//! {
//!   "name": "bernoulli",
//!   "rho":   {"diag": [0.7, 0.3]},
//!   "sigma": {"re": [[0.5, 0.0], [0.0, 0.5]], "im": [[0.0, 0.0], [0.0, 0.0]]},
//!   "params": {"alpha": [2.0]}
//! }
//! ```
//!
//! Operators are given as a dense matrix (`re`, optional `im`), a diagonal
//! (`diag`), or a diagonal model (`family` with `beta`, `gamma`, `ratio` or
//! `values`, and optional `normalize`, default `true`). Every key of
//! `params` is optional; see [`Params`] for the defaults.

use crate::CliError;
use renyi_core::hoeffding::default_u_grid;
use renyi_core::truncation::{default_windows, doubling_levels, LadderConfig};
use renyi_core::{DiagonalModel, HermitianOperator, ModelFamily};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub rho: OperatorSpec,
    pub sigma: OperatorSpec,
    #[serde(default)]
    pub params: Params,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOperatorSpec", into = "RawOperatorSpec")]
pub enum OperatorSpec {
    Matrix { re: Vec<Vec<f64>>, im: Vec<Vec<f64>> },
    Diagonal(Vec<f64>),
    Model { family: ModelFamily, normalize: bool },
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperatorSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    re: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    diag: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    normalize: Option<bool>,
}

impl TryFrom<RawOperatorSpec> for OperatorSpec {
    type Error = String;

    fn try_from(raw: RawOperatorSpec) -> Result<Self, String> {
        let kinds = [raw.re.is_some(), raw.diag.is_some(), raw.family.is_some()];
        match kinds.iter().filter(|k| **k).count() {
            0 => return Err("operator needs one of `re` (dense matrix), `diag` or `family` (diagonal model)".into()),
            1 => {}
            _ => return Err("operator must give exactly one of `re`, `diag` and `family`".into()),
        }
        let model_keys = raw.beta.is_some() || raw.gamma.is_some() || raw.ratio.is_some() || raw.values.is_some();
        if let Some(re) = raw.re {
            if model_keys || raw.normalize.is_some() {
                return Err("dense matrices take only `re` and `im`".into());
            }
            let d = re.len();
            let im = raw.im.unwrap_or_else(|| vec![vec![0.0; d]; d]);
            return Ok(OperatorSpec::Matrix { re, im });
        }
        if raw.im.is_some() {
            return Err("`im` given without `re`".into());
        }
        if let Some(diag) = raw.diag {
            if model_keys || raw.normalize.is_some() {
                return Err("`diag` takes no model parameters".into());
            }
            return Ok(OperatorSpec::Diagonal(diag));
        }
        let family = raw.family.expect("checked above");
        let need = |v: Option<f64>, key: &str| v.ok_or_else(|| format!("family {family:?} needs `{key}`"));
        let (fam, used) = match family.as_str() {
            "power" => (ModelFamily::Power { beta: need(raw.beta, "beta")? }, "beta"),
            "superpower" => (ModelFamily::Superpower { gamma: need(raw.gamma, "gamma")? }, "gamma"),
            "geometric" => (ModelFamily::Geometric { ratio: need(raw.ratio, "ratio")? }, "ratio"),
            "finite" => {
                let values = raw.values.clone().ok_or_else(|| format!("family {family:?} needs `values`"))?;
                (ModelFamily::Finite { values }, "values")
            }
            other => {
                return Err(format!("unknown family {other:?}; expected power, superpower, geometric or finite"))
            }
        };
        let given = [("beta", raw.beta.is_some()), ("gamma", raw.gamma.is_some()), ("ratio", raw.ratio.is_some()), ("values", raw.values.is_some())];
        if let Some((k, _)) = given.iter().find(|(k, g)| *g && *k != used) {
            return Err(format!("family {family:?} does not take `{k}`"));
        }
        Ok(OperatorSpec::Model { family: fam, normalize: raw.normalize.unwrap_or(true) })
    }
}

impl From<OperatorSpec> for RawOperatorSpec {
    fn from(spec: OperatorSpec) -> Self {
        match spec {
            OperatorSpec::Matrix { re, im } => RawOperatorSpec { re: Some(re), im: Some(im), ..Default::default() },
            OperatorSpec::Diagonal(d) => RawOperatorSpec { diag: Some(d), ..Default::default() },
            OperatorSpec::Model { family, normalize } => {
                let mut raw = RawOperatorSpec { normalize: Some(normalize), ..Default::default() };
                match family {
                    ModelFamily::Power { beta } => {
                        raw.family = Some("power".into());
                        raw.beta = Some(beta);
                    }
                    ModelFamily::Superpower { gamma } => {
                        raw.family = Some("superpower".into());
                        raw.gamma = Some(gamma);
                    }
                    ModelFamily::Geometric { ratio } => {
                        raw.family = Some("geometric".into());
                        raw.ratio = Some(ratio);
                    }
                    ModelFamily::Finite { values } => {
                        raw.family = Some("finite".into());
                        raw.values = Some(values);
                    }
                }
                raw
            }
        }
    }
}

/// Parameters; every field has a default.
///
/// | key | default |
/// |-----|---------|
/// | `alpha` | `[1.5, 2, 3]` |
/// | `sandwiched` | `true`: include `z = α` for every `α` |
/// | `z` | `[]`: extra `z` values paired with every `α` |
/// | `u_grid` | 101 uniform points on `[0,1]` |
/// | `r_grid` | `0, 0.05, …, 1` |
/// | `kappa` | `[0.25, 0.5, 0.75]` |
/// | `levels` | `2, 4, …, 2^20` (model cutoffs) |
/// | `windows` | spectral windows of `σ` (matrices) |
/// | `n_grid` | `[250, 500, 1000, 1500, 2000]` |
/// | `copies` | `[1, 2, 3]` |
/// | `seed` | `0` |
/// | `witnesses` | `16` random variational witnesses |
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub alpha: Vec<f64>,
    pub sandwiched: bool,
    pub z: Vec<f64>,
    pub u_grid: Vec<f64>,
    pub r_grid: Vec<f64>,
    pub kappa: Vec<f64>,
    pub levels: Vec<usize>,
    pub windows: Option<Vec<[f64; 2]>>,
    pub n_grid: Vec<usize>,
    pub copies: Vec<usize>,
    pub seed: u64,
    pub witnesses: usize,
    pub measured: MeasuredParams,
    pub dpi: DpiParams,
    pub tolerances: Tolerances,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            alpha: vec![1.5, 2.0, 3.0],
            sandwiched: true,
            z: Vec::new(),
            u_grid: default_u_grid(),
            r_grid: (0..=20).map(|i| i as f64 / 20.0).collect(),
            kappa: vec![0.25, 0.5, 0.75],
            levels: doubling_levels(20),
            windows: None,
            n_grid: vec![250, 500, 1000, 1500, 2000],
            copies: vec![1, 2, 3],
            seed: 0,
            witnesses: 16,
            measured: MeasuredParams::default(),
            dpi: DpiParams::default(),
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeasuredParams {
    pub random_trials: usize,
    pub local_steps: usize,
}

impl Default for MeasuredParams {
    fn default() -> Self {
        Self { random_trials: 64, local_steps: 200 }
    }
}

/// Random channels `C^d → C^{d_out}` with `kraus` Kraus operators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DpiParams {
    pub trials: usize,
    pub d_out: Option<usize>,
    pub kraus: usize,
}

impl Default for DpiParams {
    fn default() -> Self {
        Self { trials: 200, d_out: None, kraus: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub conv_tol: f64,
    pub div_cap: f64,
    pub growth_factor: f64,
    pub monotone_slack: f64,
    pub dpi_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let c = LadderConfig::default();
        Self {
            conv_tol: c.conv_tol,
            div_cap: c.div_cap,
            growth_factor: c.growth_factor,
            monotone_slack: c.monotone_slack,
            dpi_slack: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn ladder_config(&self) -> LadderConfig {
        LadderConfig {
            conv_tol: self.conv_tol,
            div_cap: self.div_cap,
            growth_factor: self.growth_factor,
            monotone_slack: self.monotone_slack,
        }
    }
}

impl Params {
    /// The `(α, z)` pairs in scenario order.
    pub fn alpha_z(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for &a in &self.alpha {
            if self.sandwiched {
                out.push((a, a));
            }
            out.extend(self.z.iter().filter(|&&z| !(self.sandwiched && z == a)).map(|&z| (a, z)));
        }
        out
    }
}

/// The operators a scenario describes.
#[derive(Clone, Debug)]
pub enum Operands {
    Matrices { rho: HermitianOperator, sigma: HermitianOperator },
    Models { rho: DiagonalModel, sigma: DiagonalModel },
}

/// A validated scenario with defaults filled, and its operators.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub scenario: Scenario,
    pub operands: Operands,
}

/// Command-line overrides applied before validation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

pub fn parse_scenario(path: &Path, overrides: Overrides) -> Result<Resolved, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Scenario(format!("{}: {e}", path.display())))?;
    let mut scenario = parse_str(&text).map_err(|e| CliError::Scenario(format!("{}: {e}", path.display())))?;
    if let Some(seed) = overrides.seed {
        scenario.params.seed = seed;
    }
    if let Some(tol) = overrides.tol {
        scenario.params.tolerances.conv_tol = tol;
    }
    resolve(scenario).map_err(|e| CliError::Scenario(format!("{}: {e}", path.display())))
}

/// Deserialize with the JSON path of the first offending field.
pub fn parse_str(text: &str) -> Result<Scenario, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            e.into_inner().to_string()
        } else {
            format!("field `{path}`: {}", e.into_inner())
        }
    })
}

fn check(ok: bool, field: &str, msg: impl std::fmt::Display) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(format!("field `{field}`: {msg}"))
    }
}

fn check_each<T: Copy + std::fmt::Display>(xs: &[T], field: &str, ok: impl Fn(T) -> bool, msg: &str) -> Result<(), String> {
    match xs.iter().position(|&x| !ok(x)) {
        Some(i) => Err(format!("field `{field}[{i}]`: {msg}, got {}", xs[i])),
        None => Ok(()),
    }
}

fn increasing<T: PartialOrd>(xs: &[T]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}

fn validate_params(p: &Params) -> Result<(), String> {
    check(!p.alpha.is_empty(), "params.alpha", "must not be empty")?;
    check_each(&p.alpha, "params.alpha", |a: f64| a > 1.0 && a.is_finite(), "α must be a finite number > 1")?;
    check_each(&p.z, "params.z", |z: f64| z > 0.0 && z.is_finite(), "z must be a finite number > 0")?;
    check(p.sandwiched || !p.z.is_empty(), "params.z", "must not be empty when `sandwiched` is false")?;
    check(p.u_grid.len() >= 2, "params.u_grid", "needs at least two points")?;
    check_each(&p.u_grid, "params.u_grid", |u: f64| (0.0..=1.0).contains(&u), "must lie in [0,1]")?;
    check(increasing(&p.u_grid), "params.u_grid", "must be strictly increasing")?;
    check(!p.r_grid.is_empty(), "params.r_grid", "must not be empty")?;
    check_each(&p.r_grid, "params.r_grid", |r: f64| r.is_finite(), "must be finite")?;
    check_each(&p.kappa, "params.kappa", |k: f64| k > 0.0 && k < 1.0, "must lie in (0,1)")?;
    check(!p.levels.is_empty(), "params.levels", "must not be empty")?;
    check_each(&p.levels, "params.levels", |n: usize| n >= 1, "must be ≥ 1")?;
    check(increasing(&p.levels), "params.levels", "must be strictly increasing")?;
    check(!p.n_grid.is_empty(), "params.n_grid", "must not be empty")?;
    check_each(&p.n_grid, "params.n_grid", |n: usize| n >= 1, "must be ≥ 1")?;
    check(!p.copies.is_empty(), "params.copies", "must not be empty")?;
    check_each(&p.copies, "params.copies", |n: usize| n >= 1, "must be ≥ 1")?;
    check(p.dpi.kraus >= 1, "params.dpi.kraus", "must be ≥ 1")?;
    check(p.dpi.d_out != Some(0), "params.dpi.d_out", "must be ≥ 1")?;
    let t = &p.tolerances;
    for (name, v) in [
        ("conv_tol", t.conv_tol),
        ("div_cap", t.div_cap),
        ("growth_factor", t.growth_factor),
        ("monotone_slack", t.monotone_slack),
        ("dpi_slack", t.dpi_slack),
    ] {
        check(v.is_finite() && v >= 0.0, &format!("params.tolerances.{name}"), format!("must be finite and ≥ 0, got {v}"))?;
    }
    check(t.growth_factor > 1.0, "params.tolerances.growth_factor", "must be > 1")?;
    check(t.div_cap > 1.0, "params.tolerances.div_cap", "must be > 1")?;
    if let Some(w) = &p.windows {
        check(!w.is_empty(), "params.windows", "must not be empty")?;
        if let Some(i) = w.iter().position(|[c, d]| !(*c >= 0.0 && d > c && d.is_finite())) {
            return Err(format!("field `params.windows[{i}]`: need 0 ≤ c < d < ∞"));
        }
    }
    Ok(())
}

enum Built {
    Matrix(HermitianOperator),
    Model(DiagonalModel),
}

fn build(spec: &OperatorSpec, field: &str) -> Result<Built, String> {
    match spec {
        OperatorSpec::Matrix { re, im } => {
            let op = HermitianOperator::from_parts(re, Some(im)).map_err(|e| format!("field `{field}`: {e}"))?;
            op.check_psd().map_err(|e| format!("field `{field}`: {e}"))?;
            Ok(Built::Matrix(op))
        }
        OperatorSpec::Diagonal(d) => {
            check(!d.is_empty(), &format!("{field}.diag"), "must not be empty")?;
            check_each(d, &format!("{field}.diag"), |x: f64| x >= 0.0 && x.is_finite(), "not positive semi-definite")?;
            Ok(Built::Matrix(HermitianOperator::from_real_diagonal(d)))
        }
        OperatorSpec::Model { family, normalize } => DiagonalModel::new(family.clone(), *normalize)
            .map(Built::Model)
            .map_err(|e| format!("field `{field}`: {e}")),
    }
}

/// Validate, build the operators and fill the operator-dependent defaults.
pub fn resolve(mut scenario: Scenario) -> Result<Resolved, String> {
    validate_params(&scenario.params)?;
    let rho = build(&scenario.rho, "rho")?;
    let sigma = build(&scenario.sigma, "sigma")?;
    let operands = match (rho, sigma) {
        (Built::Matrix(rho), Built::Matrix(sigma)) => {
            if rho.dim() != sigma.dim() {
                return Err(format!("rho is {0}×{0} but sigma is {1}×{1}", rho.dim(), sigma.dim()));
            }
            check(!rho.is_zero().unwrap_or(true), "rho", "must not be the zero operator")?;
            check(!sigma.is_zero().unwrap_or(true), "sigma", "must not be the zero operator")?;
            let p = &mut scenario.params;
            if p.windows.is_none() {
                let w = default_windows(&sigma).map_err(|e| format!("field `sigma`: {e}"))?;
                p.windows = Some(w.into_iter().map(|(c, d)| [c, d]).collect());
            }
            p.dpi.d_out.get_or_insert(rho.dim());
            Operands::Matrices { rho, sigma }
        }
        (Built::Model(rho), Built::Model(sigma)) => {
            check(scenario.params.windows.is_none(), "params.windows", "applies to matrices only; models use `levels`")?;
            Operands::Models { rho, sigma }
        }
        _ => return Err("rho and sigma must both be matrices (`re` or `diag`) or both be diagonal models (`family`)".into()),
    };
    Ok(Resolved { scenario, operands })
}
