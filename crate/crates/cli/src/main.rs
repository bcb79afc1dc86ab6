//! `holistic` command-line front end.
//!
//! Exit status: 0 on success, 1 on a usage error, 2 on a numerical failure.

mod output;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use holistic::constructor::periodic::SymbolSeriesJson;
use holistic::constructor::spectral::DEFAULT_K_MAX;
use holistic::constructor::two_element::TwoElementSeriesJson;
use holistic::constructor::{
    allowed_wavenumber_bands, construct_diffusion_symbol, decay_rate_through,
    two_element_eigenvalues, two_element_series_with, Advection,
};
use holistic::exec::{thread_limit_from_env, with_thread_limit, Execution};
use holistic::grid_ops::GridField;
use holistic::models::{ModelKind, ModelSpec};
use holistic::sim::{self, EventFilter, EventKind, SearchConfig, SimConfig};
use holistic::stability::{self, ClosedForm, ReducedSystem};
use holistic::subgrid::{holistic_field, natural_periodic_spline, piecewise_linear};
use serde::Serialize;

use output::{emit, num, opt_num, Csv};

#[derive(Debug, Parser)]
#[command(name = "holistic", version, about = "Holistic discretisation of Burgers' equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Holistic diffusion decay rates against the exact −κ² (CSV).
    Spectrum(SpectrumArgs),
    /// Subgrid field through given grid values (CSV).
    Field(FieldArgs),
    /// Exact periodic diffusion closure symbols (JSON).
    Construct(ConstructArgs),
    /// Two-element slow-manifold series and spectrum (JSON).
    TwoElement(TwoElementArgs),
    /// Wavenumber bands admitted by a coupling strength (CSV).
    Bands(BandsArgs),
    /// Equilibria and eigenvalues of a small Dirichlet reduction (JSON).
    Analyze(AnalyzeArgs),
    /// Integrate one model from A sin x (CSV or JSON).
    Simulate(SimulateArgs),
    /// Critical amplitudes over models and grid sizes (CSV or JSON).
    Sweep(SweepArgs),
}

/// Where the data go; without `--output` they are printed and no manifest
/// is written.
#[derive(Debug, Args, Serialize)]
struct OutputArgs {
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args, Serialize)]
struct SpectrumArgs {
    /// Truncation orders, one column each.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    orders: Vec<usize>,
    #[arg(long, default_value_t = 1.0, value_parser = real)]
    gamma: f64,
    #[arg(long, default_value_t = 1.2 * PI, value_parser = real)]
    kmax: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct FieldArgs {
    /// Grid values `U_0, …, U_{N−1}`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true, value_parser = real)]
    values: Vec<f64>,
    /// Period of the domain.
    #[arg(long, default_value_t = 2.0 * PI, value_parser = real)]
    length: f64,
    #[arg(long, default_value_t = 1.0, value_parser = real)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0, value_parser = real)]
    nu: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true, value_parser = real)]
    alpha: f64,
    #[arg(long, default_value_t = 201)]
    points: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct ConstructArgs {
    #[arg(long, default_value_t = 3)]
    order: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum AdvectionArg {
    /// Advection enters as `γα u u_x`.
    GammaAlpha,
    /// Advection enters as `α u u_x`.
    Alpha,
}

#[derive(Debug, Args, Serialize)]
struct TwoElementArgs {
    #[arg(long, default_value_t = 7)]
    gamma_order: usize,
    #[arg(long, default_value_t = 2)]
    alpha_order: usize,
    #[arg(long, value_enum, default_value_t = AdvectionArg::GammaAlpha)]
    advection: AdvectionArg,
    /// Modes of each family in the reported spectrum.
    #[arg(long, default_value_t = 3)]
    modes: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct BandsArgs {
    /// Coupling strength `C` in (0, 1].
    #[arg(long, default_value_t = 1.0, value_parser = real)]
    coupling: f64,
    #[arg(long, default_value_t = DEFAULT_K_MAX, value_parser = real)]
    kmax: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModelArg {
    Mixture,
    Holistic1,
    Holistic2,
    Diffusion,
}

#[derive(Debug, Args, Serialize)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Mixture weight; `p/q` accepted.
    #[arg(long, default_value = "2/3", value_parser = real)]
    theta: f64,
    #[arg(long, default_value_t = 1.0, value_parser = real)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0, value_parser = real)]
    nu: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true, value_parser = real)]
    alpha: f64,
    /// Truncation order of the diffusion model.
    #[arg(long, default_value_t = 1)]
    order: u8,
}

impl ModelArgs {
    fn spec(&self) -> holistic::Result<ModelSpec> {
        match self.model {
            ModelArg::Mixture => ModelSpec::mixture(self.theta, self.nu, self.alpha),
            ModelArg::Holistic1 => ModelSpec::holistic1(self.gamma, self.nu, self.alpha),
            ModelArg::Holistic2 => ModelSpec::holistic2(self.gamma, self.nu, self.alpha),
            ModelArg::Diffusion => ModelSpec::diffusion(self.order, self.gamma, self.nu),
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct AnalyzeArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Interior points of the reduction.
    #[arg(long = "M", default_value_t = 2)]
    m: usize,
    /// Half-width of the equilibrium search box.
    #[arg(long = "box", default_value_t = 1000.0, value_parser = real)]
    half_width: f64,
    /// Newton starts per axis.
    #[arg(long, default_value_t = 9)]
    grid: usize,
    #[arg(long)]
    sequential: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct IntegratorArgs {
    #[arg(long = "T", default_value_t = 10.0, value_parser = real)]
    t_max: f64,
    #[arg(long, default_value_t = 1e-8, value_parser = real)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-10, value_parser = real)]
    atol: f64,
    #[arg(long, default_value_t = 1000.0, value_parser = real)]
    threshold: f64,
    /// Integrate the raw closure without projecting onto reflection-invariant fields.
    #[arg(long)]
    no_symmetry: bool,
}

impl IntegratorArgs {
    fn apply(&self, cfg: &mut SimConfig) {
        cfg.t_max = self.t_max;
        cfg.rel_tol = self.rtol;
        cfg.abs_tol = self.atol;
        cfg.blowup_threshold = self.threshold;
        cfg.enforce_symmetry = !self.no_symmetry;
    }
}

#[derive(Debug, Args, Serialize)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long = "N")]
    n: usize,
    #[arg(long = "A", allow_hyphen_values = true, value_parser = real)]
    amplitude: f64,
    #[command(flatten)]
    integrator: IntegratorArgs,
    /// Keep every k-th accepted step.
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Run to T without stopping on irregularity.
    #[arg(long)]
    no_irregularity: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    out: Format,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SignArg {
    Both,
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum FilterArg {
    Any,
    Instability,
    Irregularity,
}

#[derive(Debug, Args, Serialize)]
struct SweepArgs {
    /// Model ids: `mixture:<θ>` (θ may be `p/q`), `holistic1`, `holistic2`.
    #[arg(long, value_delimiter = ',', default_value = "mixture:0,mixture:2/3,mixture:1,holistic1")]
    models: Vec<String>,
    #[arg(long = "Nmin", default_value_t = 3)]
    n_min: usize,
    #[arg(long = "Nmax", default_value_t = 16)]
    n_max: usize,
    #[arg(long, value_enum, default_value_t = SignArg::Both)]
    signs: SignArg,
    #[arg(long, value_enum, default_value_t = FilterArg::Any)]
    filter: FilterArg,
    #[arg(long, default_value_t = 1e4, value_parser = real)]
    cap: f64,
    #[command(flatten)]
    integrator: IntegratorArgs,
    #[arg(long)]
    sequential: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    out: Format,
    #[command(flatten)]
    output: OutputArgs,
}

/// Decimal or `p/q`.
fn real(s: &str) -> Result<f64, String> {
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    let v = match s.split_once('/') {
        Some((p, q)) => parse(p)? / parse(q)?,
        None => parse(s)?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not a finite number"))
    }
}

fn model_from_id(id: &str) -> Result<ModelSpec, Failure> {
    let spec = match id.trim() {
        "holistic1" => ModelSpec::holistic1(1.0, 1.0, 1.0),
        "holistic2" => ModelSpec::holistic2(1.0, 1.0, 1.0),
        other => match other.strip_prefix("mixture:") {
            Some(t) => ModelSpec::mixture(real(t).map_err(Failure::Usage)?, 1.0, 1.0),
            None => return Err(Failure::Usage(format!("unknown model `{other}`"))),
        },
    };
    Ok(spec?)
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<holistic::Error> for Failure {
    fn from(e: holistic::Error) -> Self {
        use holistic::Error as E;
        match e {
            E::GridTooSmall(_) | E::BadSpacing(_) | E::InvalidModel(_) | E::InvalidArgument(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("cannot write output: {e}"))
    }
}

type Outcome = Result<(), Failure>;

fn spectrum(a: &SpectrumArgs) -> Outcome {
    let t = Instant::now();
    let top = a.orders.iter().copied().max().unwrap_or(0);
    if a.orders.is_empty() || a.orders.contains(&0) {
        return Err(Failure::Usage("orders must be positive".into()));
    }
    if a.points < 2 || !(a.kmax > 0.0) {
        return Err(Failure::Usage("need at least 2 points and a positive kmax".into()));
    }
    let series = construct_diffusion_symbol(top)?;
    let mut header = vec!["kappa".to_string()];
    header.extend(a.orders.iter().map(|p| format!("lambda_order{p}")));
    header.push("exact".into());
    let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for i in 0..a.points {
        let kappa = a.kmax * i as f64 / (a.points - 1) as f64;
        let mut row = vec![num(kappa)];
        row.extend(
            a.orders
                .iter()
                .map(|&p| num(decay_rate_through(&series, p, kappa, a.gamma))),
        );
        row.push(num(0.0 - kappa * kappa));
        csv.row(row);
    }
    emit(a.out.output.as_deref(), &csv.into_string(), "spectrum", a, None::<()>, t.elapsed())?;
    Ok(())
}

fn field(a: &FieldArgs) -> Outcome {
    let t = Instant::now();
    let n = a.values.len();
    if n == 0 {
        return Err(Failure::Usage("no grid values".into()));
    }
    let u = GridField::new(a.values.clone(), a.length / n as f64)?;
    let spec = ModelSpec::holistic1(a.gamma, a.nu, a.alpha)?;
    let linear = piecewise_linear(&u);
    let full = holistic_field(&u, &spec)?;
    let spline = natural_periodic_spline(&u);
    let mut csv = Csv::new(&["x", "u0", "u", "spline"]);
    for (x, v) in full.sample(a.points) {
        csv.row([num(x), num(linear.eval(x)), num(v), num(spline.eval(x))]);
    }
    emit(a.out.output.as_deref(), &csv.into_string(), "field", a, None::<()>, t.elapsed())?;
    Ok(())
}

fn construct(a: &ConstructArgs) -> Outcome {
    let t = Instant::now();
    let series = construct_diffusion_symbol(a.order)?;
    let body = output::json(&SymbolSeriesJson::from(&series));
    emit(a.out.output.as_deref(), &body, "construct", a, None::<()>, t.elapsed())?;
    Ok(())
}

#[derive(Serialize)]
struct TwoElementReport {
    series: TwoElementSeriesJson,
    /// Coefficients of `γ^p U` in `U̇`, `p = 1, 2, …`.
    linear_coefficients: Vec<f64>,
    spectrum: Vec<holistic::constructor::Eigenpair>,
}

fn two_element(a: &TwoElementArgs) -> Outcome {
    let t = Instant::now();
    let adv = match a.advection {
        AdvectionArg::GammaAlpha => Advection::GammaAlpha,
        AdvectionArg::Alpha => Advection::Alpha,
    };
    let series = two_element_series_with(a.gamma_order, a.alpha_order, adv)?;
    let report = TwoElementReport {
        series: TwoElementSeriesJson::from(&series),
        linear_coefficients: series
            .linear_coefficients()
            .iter()
            .map(holistic::constructor::algebra::q_to_f64)
            .collect(),
        spectrum: two_element_eigenvalues(a.modes)?,
    };
    emit(a.out.output.as_deref(), &output::json(&report), "two-element", a, None::<()>, t.elapsed())?;
    Ok(())
}

fn bands(a: &BandsArgs) -> Outcome {
    let t = Instant::now();
    let bands = allowed_wavenumber_bands(a.coupling, a.kmax)?;
    let mut csv = Csv::new(&["band", "lo", "hi", "width"]);
    for (i, b) in bands.iter().enumerate() {
        csv.row([i.to_string(), num(b.lo), num(b.hi), num(b.width())]);
    }
    emit(a.out.output.as_deref(), &csv.into_string(), "bands", a, None::<()>, t.elapsed())?;
    Ok(())
}

#[derive(Serialize)]
struct Eigen {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct EquilibriumReport {
    point: Vec<f64>,
    eigenvalues: Vec<Eigen>,
    stable: bool,
}

#[derive(Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
enum ClosedReport {
    MixtureM2 {
        theta: f64,
        origin_eigenvalues: [f64; 2],
        unstable_point: Option<[f64; 2]>,
        unstable_eigenvalues: Option<[f64; 2]>,
    },
    Holistic1M2 {
        origin_eigenvalues: Vec<Eigen>,
    },
    MixtureM3(stability::MixtureM3Analysis),
}

#[derive(Serialize)]
struct AnalyzeReport {
    model: String,
    #[serde(rename = "M")]
    m: usize,
    system: String,
    search_half_width: f64,
    equilibria: Vec<EquilibriumReport>,
    closed_form: Option<ClosedReport>,
}

fn eigen(sys: &ReducedSystem, p: &[f64]) -> Result<Vec<Eigen>, Failure> {
    Ok(stability::eigenvalues_at(sys, p)?
        .into_iter()
        .map(|c| Eigen { re: c.re, im: c.im })
        .collect())
}

fn analyze(a: &AnalyzeArgs) -> Outcome {
    let t = Instant::now();
    let spec = a.model.spec()?;
    let sys = stability::reduce(&spec, a.m)?;
    let exec = if a.sequential { Execution::Sequential } else { Execution::Parallel };
    let points = stability::find_equilibria_with(&sys, a.half_width, a.grid, exec)?;
    let equilibria = points
        .iter()
        .map(|p| {
            let eigenvalues = eigen(&sys, p)?;
            let stable = eigenvalues.iter().all(|e| e.re < 0.0);
            Ok(EquilibriumReport {
                point: p.clone(),
                eigenvalues,
                stable,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let closed_form = match (spec.kind, a.m) {
        (ModelKind::Mixture { theta }, 2) => Some(ClosedReport::MixtureM2 {
            theta,
            origin_eigenvalues: [-3.0, -1.0],
            unstable_point: stability::mixture_m2_unstable_point(theta),
            unstable_eigenvalues: stability::mixture_m2_unstable_eigenvalues(theta),
        }),
        (ModelKind::Holistic1, 2) if spec.gamma == 1.0 => {
            let closed = ReducedSystem::closed(ClosedForm::Holistic1M2);
            Some(ClosedReport::Holistic1M2 {
                origin_eigenvalues: eigen(&closed, &[0.0, 0.0])?,
            })
        }
        (ModelKind::Mixture { theta }, 3) => {
            Some(ClosedReport::MixtureM3(stability::mixture_m3_analysis(theta)?))
        }
        _ => None,
    };
    let report = AnalyzeReport {
        model: spec.id(),
        m: a.m,
        system: sys.describe(),
        search_half_width: a.half_width,
        equilibria,
        closed_form,
    };
    emit(a.out.output.as_deref(), &output::json(&report), "analyze", a, None::<()>, t.elapsed())?;
    Ok(())
}

#[derive(Serialize)]
struct RunSummary {
    event: EventKind,
    t_event: Option<f64>,
    accepted_steps: usize,
    rejected_steps: usize,
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    config: &'a SimConfig,
    #[serde(flatten)]
    trajectory: &'a sim::Trajectory,
}

fn simulate(a: &SimulateArgs) -> Outcome {
    let t = Instant::now();
    let mut cfg = SimConfig::new(a.model.spec()?, a.n, a.amplitude);
    a.integrator.apply(&mut cfg);
    cfg.output_stride = a.stride;
    cfg.detect_irregularity = !a.no_irregularity;
    let tr = sim::integrate(&cfg)?;
    let body = match a.out {
        Format::Json => output::json(&SimulateReport {
            config: &cfg,
            trajectory: &tr,
        }),
        Format::Csv => {
            let mut header = vec!["t".to_string()];
            header.extend((0..cfg.n).map(|j| format!("U{j}")));
            let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
            for (time, state) in tr.times.iter().zip(&tr.states) {
                csv.row(std::iter::once(num(*time)).chain(state.iter().map(|v| num(*v))));
            }
            csv.into_string()
        }
    };
    let summary = RunSummary {
        event: tr.event.kind,
        t_event: tr.event.time,
        accepted_steps: tr.accepted_steps,
        rejected_steps: tr.rejected_steps,
    };
    eprintln!(
        "event {}{}",
        summary.event,
        summary.t_event.map(|t| format!(" at t = {t}")).unwrap_or_default()
    );
    emit(a.output.output.as_deref(), &body, "simulate", a, Some(summary), t.elapsed())?;
    Ok(())
}

#[derive(Serialize)]
struct SweepSummary {
    cells: usize,
    instability: usize,
    irregularity: usize,
    none: usize,
    failed: Vec<String>,
}

fn sweep(a: &SweepArgs) -> Outcome {
    let t = Instant::now();
    if a.n_min < 3 || a.n_max < a.n_min {
        return Err(Failure::Usage("need 3 ≤ Nmin ≤ Nmax".into()));
    }
    let models = a.models.iter().map(|m| model_from_id(m)).collect::<Result<Vec<_>, _>>()?;
    let ns: Vec<usize> = (a.n_min..=a.n_max).collect();
    let signs: &[i8] = match a.signs {
        SignArg::Both => &[1, -1],
        SignArg::Plus => &[1],
        SignArg::Minus => &[-1],
    };
    let search = SearchConfig {
        cap: a.cap,
        filter: match a.filter {
            FilterArg::Any => EventFilter::Any,
            FilterArg::Instability => EventFilter::Instability,
            FilterArg::Irregularity => EventFilter::Irregularity,
        },
        ..SearchConfig::default()
    };
    let mut base = SimConfig::new(models[0], ns[0], 0.0);
    a.integrator.apply(&mut base);
    base.validate()?;
    let exec = if a.sequential { Execution::Sequential } else { Execution::Parallel };
    let records = sim::sweep(&models, &ns, signs, &search, &base, exec)?;
    let count = |k: EventKind| records.iter().filter(|r| r.event == k).count();
    let summary = SweepSummary {
        cells: records.len(),
        instability: count(EventKind::Instability),
        irregularity: count(EventKind::Irregularity),
        none: count(EventKind::None),
        failed: records
            .iter()
            .filter_map(|r| {
                r.failure
                    .as_ref()
                    .map(|f| format!("{} N={} sign={}: {f}", r.model, r.n, r.sign))
            })
            .collect(),
    };
    let body = match a.out {
        Format::Json => output::json(&records),
        Format::Csv => {
            let mut csv = Csv::new(&["model", "N", "sign", "A_star", "event", "t_event"]);
            for r in &records {
                csv.row([
                    r.model.clone(),
                    r.n.to_string(),
                    r.sign.to_string(),
                    opt_num(r.a_star),
                    r.event.to_string(),
                    opt_num(r.t_event),
                ]);
            }
            csv.into_string()
        }
    };
    for f in &summary.failed {
        eprintln!("integrator failure: {f}");
    }
    emit(a.output.output.as_deref(), &body, "sweep", a, Some(summary), t.elapsed())?;
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Spectrum(a) => spectrum(a),
        Command::Field(a) => field(a),
        Command::Construct(a) => construct(a),
        Command::TwoElement(a) => two_element(a),
        Command::Bands(a) => bands(a),
        Command::Analyze(a) => analyze(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match with_thread_limit(thread_limit_from_env(), || run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(2)
        }
    }
}
