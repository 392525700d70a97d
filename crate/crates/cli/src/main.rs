//! Command-line front end: sampling, exact search, cycle census, closed
//! forms, second-moment reports, exhaustive oracles and Monte Carlo
//! experiments, with JSON or CSV output.
//!
//! Exit codes: 0 success, 1 usage error, 2 infeasible parameters.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rainbow_lab::census::census;
use rainbow_lab::colouring::{build_bipartite, EquitableColouring};
use rainbow_lab::config_model::{project_multigraph, DegreeSpec, Multigraph, Pairing};
use rainbow_lab::exact::frac_to_f64;
use rainbow_lab::mc::{
    oracle_exhaustive, run_trials, sample_hamilton_instance, sample_matching_instance,
    sample_planted_instance, Estimate, ExperimentPlan, Model, StatSpec,
};
use rainbow_lab::rng::stream_rng;
use rainbow_lab::search::{
    count_rainbow_hamilton, count_rainbow_matching, count_traffic_hamilton, SearchMode,
};
use rainbow_lab::theory::{
    expected_census_exact, expected_census_exact_matching, expected_hamilton_exact,
    lambda_delta_mu, matching_theory, rational_value, theory_report, RationalValue,
};
use rainbow_lab::variance::{argmax_f_with, quintic_tools, second_moment_finite};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "rainbow-lab",
    version,
    about = "Rainbow Hamilton cycles and rainbow perfect matchings in randomly coloured random regular multigraphs"
)]
struct CliArgs {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Hamilton,
    Matching,
    Planted,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Hamilton => Model::Hamilton,
            ModelArg::Matching => Model::Matching,
            ModelArg::Planted => Model::Planted,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw one coloured instance and print it.
    Sample {
        #[arg(long, value_enum, default_value = "hamilton")]
        model: ModelArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Count rainbow Hamilton cycles or rainbow perfect matchings.
    Search {
        #[arg(long, value_enum, default_value = "hamilton")]
        model: ModelArg,
        /// count everything or stop at the first witness
        #[arg(long, default_value = "count")]
        mode: String,
        /// read an instance emitted by `sample` instead of sampling
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Short-cycle census of one sampled instance.
    Census {
        #[arg(long, value_enum, default_value = "hamilton")]
        model: ModelArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        i_max: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Closed forms for one (n, d).
    Theory {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 4)]
        i_max: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Second-moment machinery: finite-size ratio, surface argmax,
    /// quintic diagnostics.
    Variance {
        #[arg(long)]
        d: usize,
        /// finite-size ratio at this n
        #[arg(long)]
        n: Option<usize>,
        /// maximise the rate surface over the overlap triangle
        #[arg(long, default_value_t = false)]
        surface: bool,
        /// quintic diagnostics at --delta
        #[arg(long, default_value_t = false)]
        quintic: bool,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        /// grid density per axis for --surface
        #[arg(long, default_value_t = 2000)]
        grid: usize,
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exhaustive ground truth at desk sizes.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 3)]
        i_max: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo experiment.
    Experiment {
        #[arg(long, value_enum, default_value = "hamilton")]
        model: ModelArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        i_max: usize,
        /// comma-separated statistics: y, ypos, z, x:I:J, fm:I:J:M[+I:J:M..],
        /// yfm:I:J:M[+..]; default: census means up to min(i_max, 3)
        #[arg(long)]
        stats: Option<String>,
        #[arg(long)]
        threads: Option<usize>,
        /// attach the exhaustive oracle record when sizes allow
        #[arg(long, default_value_t = false)]
        with_oracle: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn main() {
    let cli = match CliArgs::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap prints help/version through the error value
            if e.use_stderr() {
                eprint!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(AppError::Infeasible(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Err(AppError::Io(e)) => {
            eprintln!("io error: {e}");
            std::process::exit(1);
        }
    }
}

enum AppError {
    Infeasible(String),
    Usage(String),
    Io(std::io::Error),
}

impl From<rainbow_lab::Error> for AppError {
    fn from(e: rainbow_lab::Error) -> Self {
        AppError::Infeasible(e.to_string())
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), AppError> {
    match &out.output {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(text.as_bytes())?;
        }
        None => {
            print!("{text}");
        }
    }
    Ok(())
}

fn default_threads(requested: Option<usize>) -> usize {
    requested
        .or_else(|| {
            std::env::var("RAINBOW_LAB_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1)
        })
}

/// Instance document shared by `sample` and `search --input`.
#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    model: String,
    n: usize,
    d: usize,
    seed: u64,
    n_colours: usize,
    q: usize,
    pairing: Vec<String>,
    colouring: Vec<(usize, u32)>,
    simple: bool,
}

fn instance_doc(
    model: ModelArg,
    n: usize,
    d: usize,
    seed: u64,
    mg: &Multigraph,
    col: &EquitableColouring,
    pairing: &Pairing,
) -> InstanceDoc {
    InstanceDoc {
        model: format!("{model:?}").to_lowercase(),
        n,
        d,
        seed,
        n_colours: col.n_colours,
        q: col.q,
        pairing: pairing.serialize().lines().map(String::from).collect(),
        colouring: col
            .colours()
            .iter()
            .enumerate()
            .map(|(e, &c)| (e, c + 1))
            .collect(),
        simple: mg.is_simple(),
    }
}

fn load_instance(path: &PathBuf) -> Result<(Multigraph, EquitableColouring), AppError> {
    let text = std::fs::read_to_string(path)?;
    let doc: InstanceDoc = serde_json::from_str(&text)
        .map_err(|e| AppError::Usage(format!("cannot parse instance: {e}")))?;
    let cells = if doc.model == "matching" { 2 * doc.n } else { doc.n };
    let spec = DegreeSpec::new(cells, doc.d).map_err(AppError::from)?;
    let pairing_text = doc.pairing.join("\n");
    let pairing = Pairing::parse(spec, &pairing_text).map_err(AppError::from)?;
    let mg = project_multigraph(&pairing);
    let mut colours = vec![u32::MAX; doc.colouring.len()];
    for (e, c) in doc.colouring {
        if e >= colours.len() || c == 0 {
            return Err(AppError::Usage("colouring entry out of range".into()));
        }
        colours[e] = c - 1;
    }
    let col = EquitableColouring::new(doc.n_colours, doc.q, colours).map_err(AppError::from)?;
    Ok((mg, col))
}

fn sample_for(model: ModelArg, n: usize, d: usize, seed: u64)
    -> Result<(Multigraph, EquitableColouring), AppError>
{
    let mut rng = stream_rng(seed, 0);
    let pair = match model {
        ModelArg::Hamilton => sample_hamilton_instance(n, d, &mut rng)?,
        ModelArg::Matching => sample_matching_instance(n, d, &mut rng)?,
        ModelArg::Planted => sample_planted_instance(n, d, &mut rng)?,
    };
    Ok(pair)
}

#[derive(Serialize)]
struct SearchDoc {
    count: u64,
    exists: bool,
    nodes_expanded: u64,
    /// Hamilton searches only: the independent bipartite walker count.
    traffic_count: Option<u64>,
}

#[derive(Serialize)]
struct ResultsDoc {
    plan: ExperimentPlan,
    estimates: Vec<EstimateRow>,
    theory: Vec<TheoryRow>,
    oracle: Option<serde_json::Value>,
}

#[derive(Serialize)]
struct EstimateRow {
    stat: String,
    mean: f64,
    stderr: f64,
    trials: u64,
}

#[derive(Serialize)]
struct TheoryRow {
    stat: String,
    /// Exact finite-size mean when a closed form exists.
    exact: Option<RationalValue>,
    /// Limiting rate (Poisson parameter or product of rates).
    limit: Option<f64>,
    /// Conditioned mean, for the planted model.
    conditioned: Option<f64>,
}

fn theory_rows(plan: &ExperimentPlan) -> Vec<TheoryRow> {
    let mut rows = Vec::new();
    for s in &plan.stats {
        let stat = s.label();
        let row = match s {
            StatSpec::MeanY => TheoryRow {
                stat,
                exact: expected_hamilton_exact(plan.n, plan.d)
                    .ok()
                    .map(|h| rational_value(&h.e_y)),
                limit: None,
                conditioned: None,
            },
            StatSpec::MeanZ => TheoryRow {
                stat,
                exact: matching_theory(plan.n, plan.d)
                    .ok()
                    .map(|m| rational_value(&m.e_z)),
                limit: None,
                conditioned: None,
            },
            StatSpec::ProbYPositive => TheoryRow {
                stat,
                exact: None,
                limit: None,
                conditioned: None,
            },
            StatSpec::MeanX { i, j } => match plan.model {
                Model::Matching => TheoryRow {
                    stat,
                    exact: expected_census_exact_matching(plan.n, plan.d, *i, *j)
                        .ok()
                        .map(|r| rational_value(&r)),
                    limit: matching_theory(plan.n, plan.d)
                        .ok()
                        .and_then(|m| m.lambda(*i, *j).ok())
                        .map(|r| frac_to_f64(&r)),
                    conditioned: None,
                },
                Model::Hamilton => TheoryRow {
                    stat,
                    exact: expected_census_exact(plan.n, plan.d, *i, *j)
                        .ok()
                        .map(|r| rational_value(&r)),
                    limit: lambda_delta_mu(plan.d, *i, *j)
                        .ok()
                        .map(|t| frac_to_f64(&t.lambda)),
                    conditioned: None,
                },
                Model::Planted => TheoryRow {
                    stat,
                    exact: None,
                    limit: lambda_delta_mu(plan.d, *i, *j)
                        .ok()
                        .map(|t| frac_to_f64(&t.lambda)),
                    conditioned: lambda_delta_mu(plan.d, *i, *j)
                        .ok()
                        .map(|t| frac_to_f64(&t.mu)),
                },
            },
            StatSpec::FactorialMoment { orders, weight_y } => {
                let mut rate = Some(1.0f64);
                let mut cond = Some(1.0f64);
                for (i, j, m) in orders {
                    let t = match plan.model {
                        Model::Matching => matching_theory(plan.n, plan.d)
                            .ok()
                            .and_then(|mt| mt.lambda(*i, *j).ok())
                            .map(|l| (frac_to_f64(&l), frac_to_f64(&l))),
                        _ => lambda_delta_mu(plan.d, *i, *j)
                            .ok()
                            .map(|t| (frac_to_f64(&t.lambda), frac_to_f64(&t.mu))),
                    };
                    match t {
                        Some((l, mu)) => {
                            rate = rate.map(|r| r * l.powi(*m as i32));
                            cond = cond.map(|r| r * mu.powi(*m as i32));
                        }
                        None => {
                            rate = None;
                            cond = None;
                        }
                    }
                }
                let conditioned = if *weight_y || plan.model == Model::Planted {
                    cond
                } else {
                    None
                };
                TheoryRow {
                    stat,
                    exact: None,
                    limit: rate,
                    conditioned,
                }
            }
        };
        rows.push(row);
    }
    rows
}

fn parse_stats(spec: &str) -> Result<Vec<StatSpec>, AppError> {
    let mut out = Vec::new();
    for token in spec.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let stat = match token {
            "y" | "mean_y" => StatSpec::MeanY,
            "ypos" | "p_y_positive" => StatSpec::ProbYPositive,
            "z" | "mean_z" => StatSpec::MeanZ,
            _ => {
                let (kind, rest) = token
                    .split_once(':')
                    .ok_or_else(|| AppError::Usage(format!("bad stat token: {token}")))?;
                match kind {
                    "x" => {
                        let (i, j) = rest
                            .split_once(':')
                            .ok_or_else(|| AppError::Usage(format!("bad stat token: {token}")))?;
                        StatSpec::MeanX {
                            i: i.parse().map_err(|_| AppError::Usage(format!("bad index in {token}")))?,
                            j: j.parse().map_err(|_| AppError::Usage(format!("bad index in {token}")))?,
                        }
                    }
                    "fm" | "yfm" => {
                        let mut orders = Vec::new();
                        for part in rest.split('+') {
                            let fields: Vec<&str> = part.split(':').collect();
                            if fields.len() != 3 {
                                return Err(AppError::Usage(format!("bad moment factor: {part}")));
                            }
                            let i = fields[0].parse().map_err(|_| AppError::Usage(format!("bad index in {part}")))?;
                            let j = fields[1].parse().map_err(|_| AppError::Usage(format!("bad index in {part}")))?;
                            let m = fields[2].parse().map_err(|_| AppError::Usage(format!("bad order in {part}")))?;
                            orders.push((i, j, m));
                        }
                        StatSpec::FactorialMoment {
                            orders,
                            weight_y: kind == "yfm",
                        }
                    }
                    _ => return Err(AppError::Usage(format!("unknown stat: {token}"))),
                }
            }
        };
        out.push(stat);
    }
    if out.is_empty() {
        return Err(AppError::Usage("no statistics requested".into()));
    }
    Ok(out)
}

fn default_stats(model: Model, n: usize, i_max: usize) -> Vec<StatSpec> {
    let mut stats = Vec::new();
    let ceiling = i_max.min(3);
    for i in 1..=ceiling {
        for j in 0..=i {
            stats.push(StatSpec::MeanX { i, j });
        }
    }
    match model {
        Model::Hamilton if n <= 10 => stats.insert(0, StatSpec::MeanY),
        Model::Matching if n <= 6 => stats.insert(0, StatSpec::MeanZ),
        _ => {}
    }
    stats
}

fn estimates_csv(rows: &[(String, Estimate)]) -> String {
    let mut out = String::from("stat,mean,stderr,trials\n");
    for (label, e) in rows {
        out.push_str(&format!("{},{},{},{}\n", label, e.mean, e.std_error, e.trials));
    }
    out
}

fn run(cli: CliArgs) -> Result<(), AppError> {
    match cli.cmd {
        Cmd::Sample { model, n, d, seed, out } => {
            if model == ModelArg::Planted {
                return Err(AppError::Usage(
                    "sample emits pairing-backed instances; use the hamilton or matching model"
                        .into(),
                ));
            }
            let cells = if model == ModelArg::Matching { 2 * n } else { n };
            let spec = DegreeSpec::new(cells, d).map_err(AppError::from)?;
            let mut rng = stream_rng(seed, 0);
            let pairing = rainbow_lab::config_model::sample_pairing_with(spec, &mut rng);
            let mg = project_multigraph(&pairing);
            let (colours, q) = match model {
                ModelArg::Matching => (n, d),
                _ => (n, d / 2),
            };
            let col = rainbow_lab::colouring::sample_colouring_with(&mg, colours, q, &mut rng)
                .map_err(AppError::from)?;
            let doc = instance_doc(model, n, d, seed, &mg, &col, &pairing);
            match out.format {
                Format::Json => emit(&out, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())),
                Format::Csv => {
                    let mut text = String::from("# pairing\n");
                    text.push_str(&pairing.serialize());
                    text.push_str("# colouring\n");
                    text.push_str(&col.to_csv());
                    emit(&out, &text)
                }
            }
        }
        Cmd::Search { model, mode, input, n, d, seed, out } => {
            let mode = match mode.as_str() {
                "count" => SearchMode::Count,
                "exists" => SearchMode::Exists,
                other => return Err(AppError::Usage(format!("unknown mode: {other}"))),
            };
            let (mg, col) = match &input {
                Some(path) => load_instance(path)?,
                None => {
                    if n == 0 || d == 0 {
                        return Err(AppError::Usage(
                            "search needs --input or both --n and --d".into(),
                        ));
                    }
                    sample_for(model, n, d, seed)?
                }
            };
            let doc = match model {
                ModelArg::Matching => {
                    let r = count_rainbow_matching(&mg, &col).map_err(AppError::from)?;
                    SearchDoc {
                        count: r.count,
                        exists: r.exists,
                        nodes_expanded: r.nodes_expanded,
                        traffic_count: None,
                    }
                }
                _ => {
                    let r = count_rainbow_hamilton(&mg, &col, mode).map_err(AppError::from)?;
                    let traffic = if mode == SearchMode::Count {
                        let tb = build_bipartite(&mg, &col).map_err(AppError::from)?;
                        Some(
                            count_traffic_hamilton(&tb, SearchMode::Count)
                                .map_err(AppError::from)?
                                .count,
                        )
                    } else {
                        None
                    };
                    SearchDoc {
                        count: r.count,
                        exists: r.exists,
                        nodes_expanded: r.nodes_expanded,
                        traffic_count: traffic,
                    }
                }
            };
            match out.format {
                Format::Json => emit(&out, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())),
                Format::Csv => emit(
                    &out,
                    &format!(
                        "count,exists,nodes_expanded\n{},{},{}\n",
                        doc.count, doc.exists, doc.nodes_expanded
                    ),
                ),
            }
        }
        Cmd::Census { model, n, d, seed, i_max, out } => {
            let (mg, col) = sample_for(model, n, d, seed)?;
            let tb = build_bipartite(&mg, &col).map_err(AppError::from)?;
            let table = census(&tb, i_max).map_err(AppError::from)?;
            match out.format {
                Format::Csv => emit(&out, &table.to_csv()),
                Format::Json => {
                    #[derive(Serialize)]
                    struct Row {
                        i: usize,
                        j: usize,
                        count: u64,
                    }
                    let rows: Vec<Row> = (1..=i_max)
                        .flat_map(|i| (0..=i).map(move |j| (i, j)))
                        .map(|(i, j)| Row { i, j, count: table.get(i, j) })
                        .collect();
                    emit(&out, &format!("{}\n", serde_json::to_string_pretty(&rows).unwrap()))
                }
            }
        }
        Cmd::Theory { n, d, i_max, out } => {
            let rep = theory_report(n, d, i_max).map_err(AppError::from)?;
            match out.format {
                Format::Json => emit(&out, &format!("{}\n", serde_json::to_string_pretty(&rep).unwrap())),
                Format::Csv => {
                    let mut text = String::from("quantity,fraction,decimal\n");
                    if let Some(h) = &rep.hamilton {
                        text.push_str(&format!("e_y,{},{}\n", h.e_y.fraction, h.e_y.decimal));
                        text.push_str(&format!(
                            "growth_rate,{},{}\n",
                            h.growth_rate.fraction, h.growth_rate.decimal
                        ));
                    }
                    for row in &rep.limit_triples {
                        text.push_str(&format!(
                            "lambda_{}_{},{},{}\n",
                            row.i, row.j, row.triple.lambda.fraction, row.triple.lambda.decimal
                        ));
                        text.push_str(&format!(
                            "mu_{}_{},{},{}\n",
                            row.i, row.j, row.triple.mu.fraction, row.triple.mu.decimal
                        ));
                    }
                    for row in &rep.census_means {
                        text.push_str(&format!(
                            "e_x_{}_{},{},{}\n",
                            row.i, row.j, row.mean.fraction, row.mean.decimal
                        ));
                    }
                    text.push_str(&format!(
                        "e_z,{},{}\n",
                        rep.matching.e_z.fraction, rep.matching.e_z.decimal
                    ));
                    emit(&out, &text)
                }
            }
        }
        Cmd::Variance { d, n, surface, quintic, delta, grid, threads, out } => {
            #[derive(Serialize)]
            struct VarianceDoc {
                finite: Option<rainbow_lab::variance::SecondMomentReport>,
                surface: Option<rainbow_lab::variance::ArgmaxReport>,
                quintic: Option<rainbow_lab::variance::QuinticReport>,
            }
            let finite = match n {
                Some(n) => Some(second_moment_finite(n, d).map_err(AppError::from)?),
                None => None,
            };
            let surface_rep = if surface {
                Some(
                    argmax_f_with(d as f64 - 2.0, grid, default_threads(threads))
                        .map_err(AppError::from)?,
                )
            } else {
                None
            };
            let quintic_rep = if quintic {
                Some(quintic_tools(d as f64 - 2.0, delta).map_err(AppError::from)?)
            } else {
                None
            };
            if finite.is_none() && surface_rep.is_none() && quintic_rep.is_none() {
                return Err(AppError::Usage(
                    "variance needs --n, --surface or --quintic".into(),
                ));
            }
            match out.format {
                Format::Json => {
                    let doc = VarianceDoc { finite, surface: surface_rep, quintic: quintic_rep };
                    emit(&out, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
                }
                Format::Csv => {
                    let mut text = String::new();
                    if let Some(f) = &finite {
                        text.push_str("k,j,f\n");
                        for t in &f.terms {
                            text.push_str(&format!("{},{},{}\n", t.k, t.j, t.f));
                        }
                    }
                    if let Some(s) = &surface_rep {
                        text.push_str("quantity,value\n");
                        text.push_str(&format!("alpha_star,{}\n", s.alpha_star));
                        text.push_str(&format!("delta_star,{}\n", s.delta_star));
                        text.push_str(&format!("f_star,{}\n", s.f_star));
                        text.push_str(&format!("laplace_limit,{}\n", s.laplace_limit));
                    }
                    if let Some(q) = &quintic_rep {
                        text.push_str(&format!("g,{}\nh,{}\nh_second,{}\n", q.g, q.h, q.h_second));
                    }
                    emit(&out, &text)
                }
            }
        }
        Cmd::Oracle { n, d, i_max, out } => {
            let rec = oracle_exhaustive(n, d, i_max).map_err(AppError::from)?;
            match out.format {
                Format::Json => emit(&out, &format!("{}\n", serde_json::to_string_pretty(&rec).unwrap())),
                Format::Csv => {
                    let mut text = String::from("i,j,mean_fraction,mean_decimal\n");
                    for r in &rec.e_x {
                        text.push_str(&format!(
                            "{},{},{},{}\n",
                            r.i, r.j, r.mean.fraction, r.mean.decimal
                        ));
                    }
                    text.push_str("k,j,count\n");
                    for r in &rec.overlap_census {
                        text.push_str(&format!("{},{},{}\n", r.k, r.j, r.count));
                    }
                    emit(&out, &text)
                }
            }
        }
        Cmd::Experiment {
            model,
            n,
            d,
            trials,
            seed,
            i_max,
            stats,
            threads,
            with_oracle,
            out,
        } => {
            let model: Model = model.into();
            let stats = match &stats {
                Some(s) => parse_stats(s)?,
                None => default_stats(model, n, i_max),
            };
            let plan = ExperimentPlan { model, n, d, trials, seed, i_max, stats };
            plan.validate().map_err(AppError::from)?;
            let rows = run_trials(&plan, default_threads(threads)).map_err(AppError::from)?;
            let theory = theory_rows(&plan);
            let oracle = if with_oracle {
                oracle_exhaustive(n, d, i_max.min(n))
                    .ok()
                    .map(|o| serde_json::to_value(&o).unwrap())
            } else {
                None
            };
            let estimates: Vec<EstimateRow> = rows
                .iter()
                .map(|(stat, e)| EstimateRow {
                    stat: stat.clone(),
                    mean: e.mean,
                    stderr: e.std_error,
                    trials: e.trials,
                })
                .collect();
            match out.format {
                Format::Json => {
                    let doc = ResultsDoc { plan, estimates, theory, oracle };
                    emit(&out, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
                }
                Format::Csv => emit(&out, &estimates_csv(&rows)),
            }
        }
    }
}
