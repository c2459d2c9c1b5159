use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use rayon::prelude::*;
use realign::criteria::{
    ccnr_margin, ppt_margin, q_margin, shi_margin, sun_margin, threshold_scan, zhang_margin, CriterionReport,
    ParamPair, DEFAULT_TAU,
};
use realign::linalg::DensityMatrix;
use realign::measures::{concurrence_lower_bound, cren_lower_bound};
use realign::multipartite::{
    as_bipartite, biseparability_margin, full_separability_margin, gme_concurrence_lower_bound, Bipartition,
    MuFamily,
};
use realign::optimizer::{optimize_params, OptimizationResult, OptimizerConfig, TracePoint};
use realign::reproduce::{reproduce, ReferenceData, EXAMPLES};
use realign::states::{builtin_from_spec, Seed, StateFamily};

use crate::error::{usage, CliError, CliResult};
use crate::report::{InputDigest, Item};
use crate::state_file::{parse_state_file, write_state_file};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    Thm1,
    Ccnr,
    Zhang,
    Shi,
    Sun,
    Ppt,
    Bisep,
    Fullsep,
}

impl FromStr for Criterion {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "thm1" | "q" | "qmat" => Criterion::Thm1,
            "ccnr" => Criterion::Ccnr,
            "zhang" => Criterion::Zhang,
            "shi" => Criterion::Shi,
            "sun" => Criterion::Sun,
            "ppt" => Criterion::Ppt,
            "bisep" => Criterion::Bisep,
            "fullsep" => Criterion::Fullsep,
            other => return Err(format!("unknown criterion '{other}'")),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    Concurrence,
    Cren,
    Gme,
}

impl FromStr for Measure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "concurrence" => Measure::Concurrence,
            "cren" => Measure::Cren,
            "gme" => Measure::Gme,
            other => return Err(format!("unknown measure '{other}'")),
        })
    }
}

/// Parameters shared by every evaluating subcommand.
#[derive(Args, Clone, Debug)]
pub struct ParamArgs {
    /// Comma-separated mu vector
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub mu: Option<Vec<f64>>,
    /// Comma-separated nu vector
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub nu: Option<Vec<f64>>,
    /// Scalar parameter of the shi and sun criteria
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub beta: f64,
    /// Vector length of the sun criterion
    #[arg(long, default_value_t = 1)]
    pub l: usize,
    /// Vectors for fullsep, one per party from --q on, e.g. "1;1,2;1"
    #[arg(long)]
    pub mu_family: Option<String>,
    /// First realigned party of fullsep (1-based)
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    /// View a tripartite state as the cut i|rest (1-based) for bipartite criteria
    #[arg(long)]
    pub cut: Option<usize>,
    /// Detection threshold on the margin
    #[arg(long, default_value_t = DEFAULT_TAU)]
    pub tau: f64,
}

impl ParamArgs {
    fn pair(&self) -> CliResult<Option<ParamPair>> {
        match (&self.mu, &self.nu) {
            (Some(mu), Some(nu)) => Ok(Some(ParamPair::new(mu.clone(), nu.clone())?)),
            (None, None) => Ok(None),
            _ => Err(usage("--mu and --nu must be given together")),
        }
    }

    fn mu_family(&self) -> CliResult<Option<MuFamily>> {
        let Some(spec) = &self.mu_family else { return Ok(None) };
        let vectors = spec
            .split(';')
            .map(|part| {
                part.split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|e| usage(format!("--mu-family entry '{x}': {e}"))))
                    .collect::<CliResult<Vec<f64>>>()
            })
            .collect::<CliResult<Vec<_>>>()?;
        if self.q == 0 {
            return Err(usage("--q is 1-based"));
        }
        Ok(Some(MuFamily::new(vectors, self.q - 1)?))
    }

    fn cut(&self) -> CliResult<Option<Bipartition>> {
        match self.cut {
            None => Ok(None),
            Some(0) => Err(usage("--cut is 1-based")),
            Some(i) => Ok(Some(Bipartition::new(i - 1)?)),
        }
    }

    /// Canonical text of every parameter that influences the results.
    fn canonical(&self) -> String {
        format!(
            "mu={:?};nu={:?};alpha={};beta={};l={};family={:?};q={};cut={:?};tau={}",
            self.mu, self.nu, self.alpha, self.beta, self.l, self.mu_family, self.q, self.cut, self.tau
        )
    }
}

/// Resolved evaluation context.
pub struct Evaluator {
    pair: Option<ParamPair>,
    family: Option<MuFamily>,
    cut: Option<Bipartition>,
    alpha: f64,
    beta: f64,
    l: usize,
    tau: f64,
}

impl Evaluator {
    pub fn new(args: &ParamArgs) -> CliResult<Self> {
        if !(args.tau >= 0.0) {
            return Err(usage("--tau must be non-negative"));
        }
        Ok(Self {
            pair: args.pair()?,
            family: args.mu_family()?,
            cut: args.cut()?,
            alpha: args.alpha,
            beta: args.beta,
            l: args.l,
            tau: args.tau,
        })
    }

    fn bipartite(&self, rho: &DensityMatrix) -> CliResult<DensityMatrix> {
        match self.cut {
            Some(cut) => Ok(as_bipartite(rho, cut)?),
            None => Ok(rho.clone()),
        }
    }

    fn pair_for(&self, crit: &str) -> CliResult<&ParamPair> {
        self.pair.as_ref().ok_or_else(|| usage(format!("{crit} needs --mu and --nu (or --auto-params)")))
    }

    pub fn check(&self, crit: Criterion) -> CliResult<()> {
        match crit {
            Criterion::Thm1 => self.pair_for("thm1").map(|_| ()),
            Criterion::Bisep => self.pair_for("bisep").map(|_| ()),
            Criterion::Fullsep if self.family.is_none() => Err(usage("fullsep needs --mu-family")),
            Criterion::Sun if self.l == 0 => Err(usage("--l must be positive")),
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, crit: Criterion, rho: &DensityMatrix) -> CliResult<CriterionReport> {
        let report = match crit {
            Criterion::Thm1 => q_margin(&self.bipartite(rho)?, self.pair_for("thm1")?)?,
            Criterion::Ccnr => ccnr_margin(&self.bipartite(rho)?)?,
            Criterion::Zhang => zhang_margin(&self.bipartite(rho)?)?,
            Criterion::Shi => shi_margin(&self.bipartite(rho)?, self.alpha, self.beta)?,
            Criterion::Sun => sun_margin(&self.bipartite(rho)?, self.alpha, self.beta, self.l)?,
            Criterion::Ppt => ppt_margin(&self.bipartite(rho)?)?,
            Criterion::Bisep => biseparability_margin(rho, self.pair_for("bisep")?)?,
            Criterion::Fullsep => {
                full_separability_margin(rho, self.family.as_ref().ok_or_else(|| usage("fullsep needs --mu-family"))?)?
            }
        };
        Ok(report.with_tau(self.tau))
    }
}

pub fn load_state(spec: &str) -> CliResult<DensityMatrix> {
    if let Some(path) = spec.strip_prefix("file:") {
        parse_state_file(Path::new(path))
    } else if let Some(call) = spec.strip_prefix("builtin:") {
        Ok(builtin_from_spec(call)?)
    } else {
        Err(usage(format!("state '{spec}' must start with file: or builtin:")))
    }
}

fn criteria_list(list: &[String]) -> CliResult<Vec<Criterion>> {
    list.iter().map(|s| s.parse::<Criterion>().map_err(usage)).collect()
}

/// Optimizer flags.
#[derive(Args, Clone, Debug)]
pub struct OptArgs {
    /// Length of mu
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Length of nu
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1.0)]
    pub init_scale: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub opt_tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl OptArgs {
    fn config(&self, warm: Option<ParamPair>) -> OptimizerConfig {
        OptimizerConfig {
            n: self.n,
            m: self.m,
            restarts: self.restarts,
            max_iters: self.max_iters,
            init_scale: self.init_scale,
            seed: Seed(self.seed),
            tol: self.opt_tol,
            warm_start: warm,
        }
    }

    fn canonical(&self) -> String {
        format!(
            "n={};m={};restarts={};iters={};scale={};tol={};seed={}",
            self.n, self.m, self.restarts, self.max_iters, self.init_scale, self.opt_tol, self.seed
        )
    }
}

/// Keeps only the points where the best margin improved, plus the last one.
fn thin_trace(mut result: OptimizationResult) -> OptimizationResult {
    let mut kept: Vec<TracePoint> = Vec::new();
    for p in &result.trace {
        if kept.last().is_none_or(|k| p.margin > k.margin) {
            kept.push(*p);
        }
    }
    if let (Some(last), Some(k)) = (result.trace.last(), kept.last()) {
        if last != k {
            kept.push(*last);
        }
    }
    result.trace = kept;
    result
}

pub struct Output {
    pub items: Vec<Item>,
    pub digest: String,
    /// Reproduction deviations; any entry makes the run exit with code 5.
    pub deviations: Vec<String>,
}

#[derive(Args, Clone, Debug)]
pub struct DetectArgs {
    /// file:<path> or builtin:<name>(<params>)
    #[arg(long)]
    pub state: String,
    /// Comma-separated list of thm1, ccnr, zhang, shi, sun, ppt, bisep, fullsep
    #[arg(long, value_delimiter = ',', default_value = "thm1")]
    pub criterion: Vec<String>,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Choose mu and nu by optimizing the thm1 margin
    #[arg(long)]
    pub auto_params: bool,
    #[command(flatten)]
    pub opt: OptArgs,
}

pub fn run_detect(args: &DetectArgs) -> CliResult<Output> {
    let rho = load_state(&args.state)?;
    let crits = criteria_list(&args.criterion)?;
    let mut params = args.params.clone();
    let mut items = Vec::new();
    if args.auto_params {
        let eval = Evaluator::new(&params)?;
        let target = eval.bipartite(&rho)?;
        let result = thin_trace(optimize_params(&target, &args.opt.config(None))?);
        params.mu = Some(result.best.mu().to_vec());
        params.nu = Some(result.best.nu().to_vec());
        items.push(Item::Optimization(result));
    }
    let eval = Evaluator::new(&params)?;
    for &c in &crits {
        eval.check(c)?;
    }
    for c in crits {
        items.push(Item::Criterion(eval.evaluate(c, &rho)?));
    }
    let mut digest = InputDigest::new();
    digest.state(&rho);
    digest.text(&args.criterion.join(","));
    digest.text(&args.params.canonical());
    if args.auto_params {
        digest.text(&args.opt.canonical());
    }
    Ok(Output { items, digest: digest.finish(), deviations: vec![] })
}

#[derive(Args, Clone, Debug)]
pub struct ScanArgs {
    /// Family name, optionally with fixed trailing parameters: example2(0.2)
    #[arg(long)]
    pub family: String,
    #[arg(long, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value = "thm1")]
    pub criterion: String,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Also evaluate the criterion on N evenly spaced points of [lo, hi]
    #[arg(long)]
    pub grid: Option<usize>,
}

pub fn run_scan(args: &ScanArgs) -> CliResult<Output> {
    let family = StateFamily::from_spec(&args.family)?;
    let crit: Criterion = args.criterion.parse().map_err(usage)?;
    let eval = Evaluator::new(&args.params)?;
    eval.check(crit)?;
    let mut items = Vec::new();
    if let Some(n) = args.grid {
        if n < 2 {
            return Err(usage("--grid needs at least 2 points"));
        }
        let points: Vec<f64> =
            (0..n).map(|k| args.lo + (args.hi - args.lo) * k as f64 / (n - 1) as f64).collect();
        let reports = points
            .par_iter()
            .map(|&t| eval.evaluate(crit, &family.state(t)?))
            .collect::<CliResult<Vec<_>>>()?;
        items.extend(points.into_iter().zip(reports).map(|(param, report)| Item::GridPoint {
            family: family.name.clone(),
            param,
            report,
        }));
    }
    let evaluate = |r: &DensityMatrix| {
        eval.evaluate(crit, r).map_err(|e| match e {
            CliError::Kernel(k) => k,
            other => realign::Error::BadParams(other.to_string()),
        })
    };
    let result = threshold_scan(&family, evaluate, args.lo, args.hi, args.tol)?;
    items.push(Item::Threshold(result));
    let mut digest = InputDigest::new();
    digest.text(&family.name);
    digest.text(&format!("crit={};lo={};hi={};tol={};grid={:?}", args.criterion, args.lo, args.hi, args.tol, args.grid));
    digest.text(&args.params.canonical());
    Ok(Output { items, digest: digest.finish(), deviations: vec![] })
}

#[derive(Args, Clone, Debug)]
pub struct BoundArgs {
    #[arg(long)]
    pub state: String,
    /// Comma-separated list of concurrence, cren, gme
    #[arg(long, value_delimiter = ',')]
    pub measure: Option<Vec<String>>,
    #[command(flatten)]
    pub params: ParamArgs,
}

pub fn run_bound(args: &BoundArgs) -> CliResult<Output> {
    let rho = load_state(&args.state)?;
    let eval = Evaluator::new(&args.params)?;
    let p = eval.pair_for("bound")?;
    let measures: Vec<Measure> = match &args.measure {
        Some(list) => list.iter().map(|s| s.parse().map_err(usage)).collect::<CliResult<_>>()?,
        None if rho.parties() == 3 && eval.cut.is_none() => vec![Measure::Gme],
        None => vec![Measure::Concurrence, Measure::Cren],
    };
    let mut items = Vec::new();
    for m in measures {
        let report = match m {
            Measure::Concurrence => concurrence_lower_bound(&eval.bipartite(&rho)?, p)?,
            Measure::Cren => cren_lower_bound(&eval.bipartite(&rho)?, p)?,
            Measure::Gme => gme_concurrence_lower_bound(&rho, p)?,
        };
        items.push(Item::Bound(report));
    }
    let mut digest = InputDigest::new();
    digest.state(&rho);
    digest.text(&format!("measure={:?}", args.measure));
    digest.text(&args.params.canonical());
    Ok(Output { items, digest: digest.finish(), deviations: vec![] })
}

#[derive(Args, Clone, Debug)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub state: String,
    #[command(flatten)]
    pub opt: OptArgs,
    /// Start restart 0 from --mu/--nu
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub mu: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub nu: Option<Vec<f64>>,
    #[arg(long)]
    pub cut: Option<usize>,
}

pub fn run_optimize(args: &OptimizeArgs) -> CliResult<Output> {
    let rho = load_state(&args.state)?;
    let target = match args.cut {
        None => rho.clone(),
        Some(0) => return Err(usage("--cut is 1-based")),
        Some(i) => as_bipartite(&rho, Bipartition::new(i - 1)?)?,
    };
    let warm = match (&args.mu, &args.nu) {
        (Some(mu), Some(nu)) => Some(ParamPair::new(mu.clone(), nu.clone())?),
        (None, None) => None,
        _ => return Err(usage("--mu and --nu must be given together")),
    };
    let result = thin_trace(optimize_params(&target, &args.opt.config(warm))?);
    let check = q_margin(&target, &result.best)?;
    let mut digest = InputDigest::new();
    digest.state(&rho);
    digest.text(&args.opt.canonical());
    digest.text(&format!("mu={:?};nu={:?};cut={:?}", args.mu, args.nu, args.cut));
    Ok(Output { items: vec![Item::Optimization(result), Item::Criterion(check)], digest: digest.finish(), deviations: vec![] })
}

#[derive(Args, Clone, Debug)]
pub struct ReproduceArgs {
    /// 1 to 6, or all
    #[arg(long, default_value = "all")]
    pub example: String,
    /// Alternative reference table (TOML)
    #[arg(long)]
    pub reference: Option<PathBuf>,
}

pub fn run_reproduce(args: &ReproduceArgs) -> CliResult<Output> {
    let ids: Vec<u32> = if args.example == "all" {
        EXAMPLES.to_vec()
    } else {
        let id: u32 = args.example.parse().map_err(|_| usage(format!("--example '{}' is not 1-6 or all", args.example)))?;
        if !EXAMPLES.contains(&id) {
            return Err(usage(format!("--example {id} is not 1-6 or all")));
        }
        vec![id]
    };
    let (data, text) = match &args.reference {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            (ReferenceData::parse(&text)?, text)
        }
        None => {
            let data = ReferenceData::bundled()?;
            let text = format!("{data:?}");
            (data, text)
        }
    };
    let reports = reproduce(&ids, &data)?;
    let deviations = reports.iter().flat_map(|r| r.deviations().into_iter().map(move |d| format!("example {}: {d}", r.id))).collect();
    let mut digest = InputDigest::new();
    digest.text(&text);
    digest.text(&format!("{ids:?}"));
    Ok(Output { items: reports.into_iter().map(Item::Example).collect(), digest: digest.finish(), deviations })
}

#[derive(Args, Clone, Debug)]
pub struct ExportArgs {
    #[arg(long)]
    pub state: String,
    /// Destination state file
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run_export(args: &ExportArgs) -> CliResult<Output> {
    let rho = load_state(&args.state)?;
    write_state_file(&args.out, &rho)?;
    let mut digest = InputDigest::new();
    digest.state(&rho);
    Ok(Output { items: vec![], digest: digest.finish(), deviations: vec![] })
}
