//! JSON-configured experiments.
//!
//! A run writes `<out>/<command>/<timestamp>/` containing `config.json`
//! (the resolved configuration), one or more CSV tables and `report.json`.
//! CSV files start with a `# config: {...}` line so each file is
//! self-describing. Outputs depend only on the configuration, never on the
//! clock, apart from the directory name.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ensembles::{
    limit_graphon, solve_constrained, constrained_scaling, sample_constrained, EnsembleSpec, EntryLaw, Model,
    VarianceRule, CONSTRAINED_MAX_ITER, CONSTRAINED_TOL,
};
use crate::error::{validation, Error, Result};
use crate::freeconv::{
    default_density, gamma_m_density, gamma_m_free_cumulants, linspace, moments_from_free_cumulants, StieltjesGrid,
    DEFAULT_ETA,
};
use crate::graphon::{
    cut_distance_step, cut_norm, l1_distance, CutNormMode, Graphon, PermutationSearch, Profile, StepKernel,
};
use crate::moments::{moment_table, MomentSource};
use crate::spectral::{
    ks_distance, ks_distance_to, levy_distance, mean_norm_scan, norm_scan, pooled_esd_moments, trial_seed,
    EmpiricalCdf, Histogram, SpectralSample,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Moments,
    Simulate,
    Compare,
    NormScan,
    ConstrainedFit,
    Freeconv,
    Cutnorm,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Moments => "moments",
            Command::Simulate => "simulate",
            Command::Compare => "compare",
            Command::NormScan => "norm-scan",
            Command::ConstrainedFit => "constrained-fit",
            Command::Freeconv => "freeconv",
            Command::Cutnorm => "cutnorm",
        }
    }
}

/// Ready-made ensembles for the histogram figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recipe {
    /// Inhomogeneous Erdős–Rényi, `f = √(xy)`, `ε = 0.25`, `N = 1000`.
    ErdosHist,
    /// Gaussian generalized Wigner, `W = √(xy)`, `N = 1000`.
    GaussianSqrt,
    /// Gaussian generalized Wigner, `W = (x(1-y) + y(1-x))/2`, `N = 1000`.
    GaussianMixed,
}

impl Recipe {
    pub const N: usize = 1000;

    pub fn model(self, n: usize) -> Result<Model> {
        Ok(match self {
            Recipe::ErdosHist => Model::InhomEr { f: Graphon::Product(Profile::Sqrt), eps: 0.25 },
            Recipe::GaussianSqrt => Model::GeneralizedWigner {
                graphon: Graphon::Product(Profile::Sqrt),
                entry_law: EntryLaw::Gaussian,
                variance: VarianceRule::Grid,
                mean: 0.0,
            },
            Recipe::GaussianMixed => Model::GeneralizedWigner {
                // an n-block step graphon read by block averages reproduces the grid values
                graphon: Graphon::step_from_fn(n, |x, y| 0.5 * (x * (1.0 - y) + y * (1.0 - x)))?,
                entry_law: EntryLaw::Gaussian,
                variance: VarianceRule::BlockAverage,
                mean: 0.0,
            },
        })
    }
}

/// Which degree sequence a constrained fit uses when none is listed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeRule {
    /// `k_i = ⌊i^{1/3}⌋`, `i = 1..N`.
    CubeRoot,
}

impl DegreeRule {
    pub fn degrees(self, n: usize) -> Vec<u64> {
        match self {
            DegreeRule::CubeRoot => (1..=n as u64)
                .map(|i| {
                    let mut k = (i as f64).cbrt().round() as u64;
                    while k * k * k > i {
                        k -= 1;
                    }
                    while (k + 1).pow(3) <= i {
                        k += 1;
                    }
                    k
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

/// One experiment. Only `command` and `seed` are always required; the other
/// fields are checked per command and filled with defaults on resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graphon: Option<Graphon>,
    /// Second graphon for `cutnorm`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Graphon>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<Model>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recipe: Option<Recipe>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<MomentSource>,
    #[serde(default, rename = "Ns", skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kstar: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_rule: Option<DegreeRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extrapolate: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<PermutationSearch>,
}

impl ExperimentConfig {
    /// A config with only the mandatory fields set.
    pub fn new(command: Command, seed: u64) -> Self {
        Self {
            command,
            seed,
            out: None,
            graphon: None,
            reference: None,
            ensemble: None,
            recipe: None,
            n: None,
            orders: None,
            source: None,
            ns: None,
            trials: None,
            bins: None,
            range: None,
            kstar: None,
            degree_rule: None,
            grid: None,
            eta: None,
            extrapolate: None,
            search: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| validation(format!("invalid config: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| validation(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn require<T: Clone>(&self, field: Option<&T>, name: &str) -> Result<T> {
        field.cloned().ok_or_else(|| validation(format!("command {} needs field `{name}`", self.command.name())))
    }

    fn forbid_model_conflict(&self) -> Result<()> {
        if self.recipe.is_some() && self.ensemble.is_some() {
            return Err(validation("give either `recipe` or `ensemble`, not both"));
        }
        Ok(())
    }

    /// Checks the fields each command needs and fills in defaults.
    pub fn resolve(&self) -> Result<Self> {
        let mut c = self.clone();
        match self.command {
            Command::Moments => {
                c.require(self.graphon.as_ref(), "graphon")?;
                c.orders.get_or_insert_with(|| vec![2, 4]);
                c.source.get_or_insert(MomentSource::Laplacian);
            }
            Command::Simulate | Command::Compare => {
                self.forbid_model_conflict()?;
                if let Some(recipe) = self.recipe {
                    let n = *c.n.get_or_insert(Recipe::N);
                    c.ensemble = Some(recipe.model(n)?);
                    c.recipe = None;
                }
                c.require(c.ensemble.as_ref(), "ensemble")?;
                c.require(c.n.as_ref(), "N")?;
                c.trials.get_or_insert(1);
                c.orders.get_or_insert_with(|| vec![1, 2, 3, 4]);
                if self.command == Command::Simulate {
                    c.bins.get_or_insert(60);
                }
            }
            Command::NormScan => {
                c.require(self.ensemble.as_ref(), "ensemble")?;
                c.ns.get_or_insert_with(|| vec![512, 1024, 2048, 4096]);
                c.trials.get_or_insert(5);
            }
            Command::ConstrainedFit => {
                if self.kstar.is_none() {
                    let n = c.require(self.n.as_ref(), "N")?;
                    let rule = *c.degree_rule.get_or_insert(DegreeRule::CubeRoot);
                    c.kstar = Some(rule.degrees(n));
                }
                c.n = Some(c.kstar.as_ref().map_or(0, Vec::len));
                c.degree_rule = None;
                c.trials.get_or_insert(20);
            }
            Command::Freeconv => {
                c.grid.get_or_insert(GridSpec { lo: -8.0, hi: 8.0, points: 801 });
                c.eta.get_or_insert(DEFAULT_ETA);
                c.extrapolate.get_or_insert(true);
                c.orders.get_or_insert_with(|| vec![2, 4, 6]);
            }
            Command::Cutnorm => {
                c.require(self.graphon.as_ref(), "graphon")?;
                c.require(self.reference.as_ref(), "reference")?;
                c.search.get_or_insert(PermutationSearch::Auto);
            }
        }
        if c.trials == Some(0) {
            return Err(validation("trials must be positive"));
        }
        Ok(c)
    }
}

/// Process exit status for an error: 2 for configuration and input errors,
/// 3 for convergence failures, 4 for capacity limits, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Validation(_) | Error::Domain(_) | Error::Unsupported(_) | Error::Json(_) => 2,
        Error::Convergence { .. } => 3,
        Error::Capacity(_) => 4,
        Error::Io(_) => 1,
    }
}

/// Machine-readable error document printed by the binary.
pub fn error_json(err: &Error) -> Value {
    let kind = match err {
        Error::Validation(_) => "validation",
        Error::Domain(_) => "domain",
        Error::Unsupported(_) => "unsupported",
        Error::Json(_) => "json",
        Error::Convergence { .. } => "convergence",
        Error::Capacity(_) => "capacity",
        Error::Io(_) => "io",
    };
    let mut doc = json!({ "error": kind, "message": err.to_string(), "exit_code": exit_code(err) });
    if let Error::Convergence { iterations, residual, .. } = err {
        doc["iterations"] = json!(iterations);
        doc["residual"] = json!(residual);
    }
    doc
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub report: Value,
}

struct Artifacts {
    dir: PathBuf,
    header: String,
    files: Vec<PathBuf>,
}

impl Artifacts {
    fn csv(&mut self, name: &str, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        writeln!(buf, "{}", self.header)?;
        write(&mut buf)?;
        self.write(name, &buf)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.files.push(path);
        Ok(())
    }
}

fn run_dir(root: &Path, command: Command) -> Result<PathBuf> {
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ").to_string();
    let base = root.join(command.name());
    let mut dir = base.join(&stamp);
    let mut k = 1;
    while dir.exists() {
        dir = base.join(format!("{stamp}-{k}"));
        k += 1;
    }
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Resolves and runs an experiment, writing its artifacts under `out`
/// (falling back to the config's `out`, then `./out`).
pub fn run(config: &ExperimentConfig, out: Option<&Path>) -> Result<RunOutput> {
    let resolved = config.resolve()?;
    let root = out.map(Path::to_path_buf).or_else(|| resolved.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    // validate and compute before touching the file system
    let (report, tables) = execute(&resolved)?;
    let dir = run_dir(&root, resolved.command)?;
    let config_json = serde_json::to_string(&resolved)?;
    let mut artifacts = Artifacts { dir: dir.clone(), header: format!("# config: {config_json}"), files: Vec::new() };
    artifacts.write("config.json", serde_json::to_string_pretty(&resolved)?.as_bytes())?;
    for (name, body) in tables {
        artifacts.csv(&name, |buf| {
            buf.extend_from_slice(&body);
            Ok(())
        })?;
    }
    let full = json!({ "command": resolved.command.name(), "config": resolved, "result": report });
    artifacts.write("report.json", serde_json::to_string_pretty(&full)?.as_bytes())?;
    Ok(RunOutput { dir, files: artifacts.files, report: full })
}

type Tables = Vec<(String, Vec<u8>)>;

fn table(name: &str, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<(String, Vec<u8>)> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok((name.to_string(), buf))
}

fn execute(c: &ExperimentConfig) -> Result<(Value, Tables)> {
    match c.command {
        Command::Moments => run_moments(c),
        Command::Simulate => run_simulate(c),
        Command::Compare => run_compare(c),
        Command::NormScan => run_norm_scan(c),
        Command::ConstrainedFit => run_constrained_fit(c),
        Command::Freeconv => run_freeconv(c),
        Command::Cutnorm => run_cutnorm(c),
    }
}

fn unwrap_field<T: Clone>(field: &Option<T>) -> T {
    field.clone().expect("resolved config has every field its command uses")
}

fn run_moments(c: &ExperimentConfig) -> Result<(Value, Tables)> {
    let w = unwrap_field(&c.graphon);
    let report = moment_table(&unwrap_field(&c.orders), &w, unwrap_field(&c.source))?;
    let csv = table("moments.csv", |buf| {
        writeln!(buf, "order,moment")?;
        for (k, m) in &report.moments {
            writeln!(buf, "{k},{m}")?;
        }
        Ok(())
    })?;
    Ok((serde_json::to_value(&report)?, vec![csv]))
}

fn samples(c: &ExperimentConfig) -> Result<Vec<SpectralSample>> {
    let (model, n) = (unwrap_field(&c.ensemble), unwrap_field(&c.n));
    (0..unwrap_field(&c.trials))
        .map(|t| SpectralSample::from_spec(&EnsembleSpec::new(model.clone(), n, trial_seed(c.seed, n, t))?))
        .collect()
}

fn theoretical_moments(model: &Model, orders: &[usize]) -> Result<Option<Value>> {
    let Some(w) = limit_graphon(model) else { return Ok(None) };
    let even: Vec<usize> = orders.iter().copied().filter(|k| k % 2 == 0).collect();
    Ok(Some(serde_json::to_value(moment_table(&even, &w, MomentSource::Laplacian)?)?))
}

fn run_simulate(c: &ExperimentConfig) -> Result<(Value, Tables)> {
    let samples = samples(c)?;
    let orders = unwrap_field(&c.orders);
    let pooled = pooled_esd_moments(&samples, &orders)?;
    let all: Vec<f64> = samples.iter().flat_map(|s| s.eigenvalues.iter().copied()).collect();
    let hist = match c.range {
        Some(range) => Histogram::new(&all, unwrap_field(&c.bins), range)?,
        None => Histogram::covering(&all, unwrap_field(&c.bins))?,
    };
    let first = &samples[0];
    let std_errors: Vec<(usize, f64)> = orders.iter().map(|&k| (k, first.moment_standard_error(k))).collect();
    let report = json!({
        "N": first.n,
        "trials": samples.len(),
        "scale_applied": first.scale_applied,
        "empirical": pooled,
        "standard_errors": std_errors.iter().map(|(k, s)| (k.to_string(), json!(s))).collect::<serde_json::Map<_, _>>(),
        "theoretical": theoretical_moments(&unwrap_field(&c.ensemble), &orders)?,
        "histogram": { "bins": hist.counts.len(), "underflow": hist.underflow, "overflow": hist.overflow },
    });
    let eig = table("eigenvalues.csv", |buf| {
        writeln!(buf, "trial,eigenvalue")?;
        for (t, s) in samples.iter().enumerate() {
            for l in &s.eigenvalues {
                writeln!(buf, "{t},{l}")?;
            }
        }
        Ok(())
    })?;
    let h = table("histogram.csv", |buf| hist.write_csv(buf))?;
    Ok((report, vec![eig, h]))
}

fn run_compare(c: &ExperimentConfig) -> Result<(Value, Tables)> {
    let samples = samples(c)?;
    let model = unwrap_field(&c.ensemble);
    let orders = unwrap_field(&c.orders);
    let n = unwrap_field(&c.n);
    let empirical = pooled_esd_moments(&samples, &orders)?;
    let theory = limit_graphon(&model);
    let theoretical = theoretical_moments(&model, &orders)?;
    let observed = EmpiricalCdf::new(&samples.iter().flat_map(|s| s.eigenvalues.iter().copied()).collect::<Vec<_>>())?;

    // reference law: the decoupled matrix model with the same graphon
    let mut distances = serde_json::Map::new();
    if let Some(w) = &theory {
        let reference = (0..samples.len())
            .map(|t| {
                let spec = EnsembleSpec::new(Model::Decoupled { graphon: w.clone() }, n, trial_seed(c.seed ^ 0x5eed, n, t))?;
                SpectralSample::from_spec(&spec)
            })
            .collect::<Result<Vec<_>>>()?;
        let reference =
            EmpiricalCdf::new(&reference.iter().flat_map(|s| s.eigenvalues.iter().copied()).collect::<Vec<_>>())?;
        distances.insert("levy_to_decoupled".into(), json!(levy_distance(&observed, &reference)));
        distances.insert("ks_to_decoupled".into(), json!(ks_distance(&observed, &reference)));
    }
    if let Some(Graphon::Constant(v)) = &theory {
        // homogeneous case: the limit is γ_M dilated by √c
        if *v > 0.0 {
            let cdf = default_density()?.cdf();
            let s = v.sqrt();
            distances.insert("ks_to_gamma_m".into(), json!(ks_distance_to(&observed, |x| cdf.eval(x / s))));
        }
    }
    let csv = table("moments.csv", |buf| {
        writeln!(buf, "order,empirical,theoretical")?;
        let theo = theoretical.as_ref().and_then(|t| t.get("moments")).cloned().unwrap_or(Value::Null);
        for (k, m) in &empirical.moments {
            let t = theo.get(k.to_string()).and_then(Value::as_f64).map_or(String::new(), |v| v.to_string());
            writeln!(buf, "{k},{m},{t}")?;
        }
        Ok(())
    })?;
    let report = json!({ "empirical": empirical, "theoretical": theoretical, "distances": distances });
    Ok((report, vec![csv]))
}

fn run_norm_scan(c: &ExperimentConfig) -> Result<(Value, Tables)> {
    let model = unwrap_field(&c.ensemble);
    let ns = unwrap_field(&c.ns);
    let trials = unwrap_field(&c.trials);
    let template = EnsembleSpec::new(model.clone(), *ns.iter().min().unwrap_or(&2), c.seed)?;
    let has_mean = matches!(model, Model::GeneralizedWigner { mean, .. } if mean != 0.0);
    if has_mean {
        let scan = mean_norm_scan(&template, &ns, trials)?;
        let csv = table("mean_norm_scan.csv", |buf| scan.write_csv(buf))?;
        Ok((serde_json::to_value(&scan)?, vec![csv]))
    } else {
        let scan = norm_scan(&template, &ns, trials)?;
        let csv = table("norm_scan.csv", |buf| scan.write_csv(buf))?;
        let report = json!({
            "summary": scan.summary,
            "bracket": [scan.bracket.0, scan.bracket.1],
            "medians_in_bracket": scan.summary.iter().all(|s| s.median >= scan.bracket.0 && s.median <= scan.bracket.1),
        });
        Ok((report, vec![csv]))
    }
}

/// Fraction of vertices whose mean sampled degree lies within `width`
/// Poisson-binomial standard deviations (of the mean) of `k*`.
pub fn degree_band_coverage(kstar: &[u64], p: &crate::ensembles::SymMatrix, degrees: &[Vec<f64>], width: f64) -> f64 {
    let n = kstar.len();
    let trials = degrees.len() as f64;
    let within = (0..n)
        .filter(|&i| {
            let var: f64 = (0..n).filter(|&j| j != i).map(|j| p.get(i, j) * (1.0 - p.get(i, j))).sum();
            let mean = degrees.iter().map(|d| d[i]).sum::<f64>() / trials;
            (mean - kstar[i] as f64).abs() <= width * (var / trials).sqrt()
        })
        .count();
    within as f64 / n as f64
}

fn run_constrained_fit(c: &ExperimentConfig) -> Result<(Value, Tables)> {
    let kstar = unwrap_field(&c.kstar);
    let trials = unwrap_field(&c.trials);
    let sol = solve_constrained(&kstar, CONSTRAINED_TOL, CONSTRAINED_MAX_ITER)?;
    let n = kstar.len();
    let degrees: Vec<Vec<f64>> =
        (0..trials).map(|t| sample_constrained(&sol.p, trial_seed(c.seed, n, t)).row_sums()).collect();
    let coverage = degree_band_coverage(&kstar, &sol.p, &degrees, 4.0);
    let expected = sol.p.row_sums();
    let csv = table("fit.csv", |buf| {
        writeln!(buf, "vertex,kstar,x,expected_degree,mean_sampled_degree")?;
        for i in 0..n {
            let mean = degrees.iter().map(|d| d[i]).sum::<f64>() / trials as f64;
            writeln!(buf, "{i},{},{},{},{mean}", kstar[i], sol.x[i], expected[i])?;
        }
        Ok(())
    })?;
    let report = json!({
        "N": n,
        "residual": sol.residual,
        "iterations": sol.iterations,
        "eps_N": constrained_scaling(&kstar),
        "trials": trials,
        "coverage_4sigma": coverage,
    });
    Ok((report, vec![csv]))
}

fn run_freeconv(c: &ExperimentConfig) -> Result<(Value, Tables)> {
    let grid = unwrap_field(&c.grid);
    if grid.points < 2 || !(grid.lo < grid.hi) {
        return Err(validation("grid needs lo < hi and at least two points"));
    }
    let xs = linspace(grid.lo, grid.hi, grid.points);
    let eta = unwrap_field(&c.eta);
    let curve = gamma_m_density(&xs, eta, unwrap_field(&c.extrapolate))?;
    let stieltjes = StieltjesGrid::compute(&xs, eta)?;
    let orders = unwrap_field(&c.orders);
    let max_order = orders.iter().copied().max().unwrap_or(0);
    let kappa = gamma_m_free_cumulants(max_order);
    let moments: serde_json::Map<String, Value> = orders
        .iter()
        .map(|&k| {
            (k.to_string(), json!({ "density": curve.moment(k), "free_cumulants": moments_from_free_cumulants(&kappa, k) }))
        })
        .collect();
    let report = json!({
        "eta": eta,
        "extrapolated": curve.extrapolated,
        "mass": curve.mass(),
        "moments": moments,
        "free_cumulants": kappa,
    });
    let d = table("density.csv", |buf| curve.write_csv(buf))?;
    let s = table("stieltjes.csv", |buf| stieltjes.write_csv(buf))?;
    Ok((report, vec![d, s]))
}

fn run_cutnorm(c: &ExperimentConfig) -> Result<(Value, Tables)> {
    let (a, b) = (unwrap_field(&c.graphon), unwrap_field(&c.reference));
    let (sa, sb) = match (a.as_step(), b.as_step()) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(validation("cutnorm needs step or constant graphons")),
    };
    let kernel = StepKernel::difference(&sa, &sb)?;
    let exact = cut_norm(&kernel, CutNormMode::Exact).ok();
    let heuristic = cut_norm(&kernel, CutNormMode::Heuristic)?;
    let distance = cut_distance_step(&a, &b, unwrap_field(&c.search))?;
    let report = json!({
        "blocks": kernel.blocks(),
        "cut_norm_exact": exact,
        "cut_norm_heuristic": heuristic,
        "cut_distance": distance,
        "l1": l1_distance(&a, &b),
    });
    let csv = table("permutation.csv", |buf| {
        writeln!(buf, "block,image")?;
        for (i, p) in distance.permutation.iter().enumerate() {
            writeln!(buf, "{i},{p}")?;
        }
        Ok(())
    })?;
    Ok((report, vec![csv]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_root_rule() {
        let k = DegreeRule::CubeRoot.degrees(500);
        assert_eq!(&k[..8], &[1, 1, 1, 1, 1, 1, 1, 2]);
        assert_eq!(k[26], 3);
        assert_eq!(k[25], 2);
        assert_eq!(k[499], 7);
    }

    #[test]
    fn missing_fields_are_config_errors() {
        let err = ExperimentConfig::new(Command::Moments, 1).resolve().unwrap_err();
        assert_eq!(exit_code(&err), 2);
        assert!(ExperimentConfig::from_json(r#"{"command":"moments"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"command":"moments","seed":1,"bogus":3}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"command":"dance","seed":1}"#).is_err());
    }

    #[test]
    fn recipe_expands_into_ensemble() {
        let mut cfg = ExperimentConfig::new(Command::Simulate, 7);
        cfg.recipe = Some(Recipe::ErdosHist);
        let r = cfg.resolve().unwrap();
        assert_eq!(r.n, Some(1000));
        assert!(matches!(r.ensemble, Some(Model::InhomEr { eps, .. }) if eps == 0.25));
        assert!(r.recipe.is_none());
    }

    #[test]
    fn mixed_recipe_matches_grid_values() {
        let Model::GeneralizedWigner { graphon, variance, .. } = Recipe::GaussianMixed.model(50).unwrap() else {
            unreachable!()
        };
        assert_eq!(variance, VarianceRule::BlockAverage);
        let (x, y) = (4.0 / 50.0, 31.0 / 50.0);
        let expected = 0.5 * (x * (1.0 - y) + y * (1.0 - x));
        assert!((graphon.block_average(3, 30, 50) - expected).abs() < 1e-12);
    }

    #[test]
    fn error_documents() {
        let err = Error::Convergence { context: "x".into(), iterations: 5, residual: 0.1 };
        let doc = error_json(&err);
        assert_eq!(doc["exit_code"], 3);
        assert_eq!(doc["iterations"], 5);
        assert_eq!(exit_code(&Error::Capacity("big".into())), 4);
    }
}
