use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde_json::{json, Value};

use groupspan_core::compression::verify_compression;
use groupspan_core::config::{binomial, BUDGET_ENV, DEFAULT_BUDGET};
use groupspan_core::extremal::{g_range, g_rows_csv, h_max, h_table};
use groupspan_core::lattice::{
    edge_boundary, extremal_uniqueness, g_of_set, hexagon_volume, min_boundary_brute, min_boundary_scan, spiral_family,
};
use groupspan_core::svg::point_set_svg;
use groupspan_core::triples::{verify_lower_bound, SpanOptions};
use groupspan_core::witness::{
    case2_k3_params, case2_sqrt_params, ceil_sqrt, comb_subspace_find, find_homothetic, grid_search_space,
    recheck_witness, subspace_search_space, witness_pipeline, PairGrid, PipelineConfig, SubgroupEmbedding, Variant,
};
use groupspan_core::{Budget, Elem, Error, GroupSpec, OutputFormat, PointSet, RunConfig, TripleSystem};

mod exit {
    pub const USAGE: u8 = 1;
    pub const NOT_FOUND: u8 = 2;
    pub const BUDGET: u8 = 3;
    pub const COUNTEREXAMPLE: u8 = 4;
}

#[derive(Parser)]
#[command(
    name = "groupspan",
    version,
    about = "Exact tables, exhaustive checks and small spanning witnesses for triple systems in groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Node budget for exhaustive searches.
    #[arg(long, global = true, env = BUDGET_ENV, default_value_t = DEFAULT_BUDGET)]
    budget: u64,

    /// Worker threads. Output does not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// `json` or `csv`; each command has its own default.
    #[arg(long, global = true)]
    format: Option<OutputFormat>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Table of g(k) with the ratio g(k)/sqrt(12k).
    G {
        /// A single k or an inclusive range `a..b`.
        #[arg(long)]
        k: String,
    },
    /// h(m) and its lexicographically smallest maximiser.
    H {
        /// A single m or an inclusive range `a..b`.
        #[arg(long)]
        m: String,
    },
    /// Builds and certifies a small vertex set spanning k triples.
    Witness(WitnessArgs),
    /// Boundary minimisers in the triangular lattice.
    Isoperimetry {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        window: u32,
        #[arg(long, value_enum, default_value_t = IsoMode::Brute)]
        mode: IsoMode,
    },
    /// Runs an exhaustive verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Witness JSON to re-check (suite `witness`).
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        system: SystemArgs,
    },
    /// Checks that every k pairs of the lower-bound system span at least g(k) elements.
    Lowerbound {
        #[arg(long, default_value_t = 64)]
        n: u32,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Searches a triple system for a homothetic grid (cyclic) or a
    /// combinatorial subspace (power).
    Pattern {
        /// Grid side for cyclic groups, subspace dimension for power groups.
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        system: SystemArgs,
    },
}

#[derive(Args)]
struct SystemArgs {
    /// `zn:<n>`, `zqm:<q>:<m>` or `table:<path>`.
    #[arg(long)]
    group: Option<String>,
    /// Triple system JSON; defaults to the full system of `--group`.
    #[arg(long)]
    system: Option<PathBuf>,
    /// Keep each pair with this probability (`p/q` or a decimal), seeded by `--seed`.
    #[arg(long)]
    density: Option<String>,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value_t = VariantArg::K3)]
    variant: VariantArg,
    /// Comma-separated elements of the subgroup to localize to.
    #[arg(long)]
    subgroup: Option<String>,
    /// Re-check the emitted JSON against the system before writing it.
    #[arg(long)]
    check: bool,
    #[command(flatten)]
    system: SystemArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Sqrt,
    K3,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IsoMode {
    Spiral,
    Brute,
    Uniqueness,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Compression,
    Lowerbound,
    Claims,
    Witness,
}

enum Failure {
    Core(Error),
    Counterexample(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<String, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Core(Error::InvalidArgument(msg.into()))
}

fn search_space(n: u128) {
    eprintln!("search space: {n}");
}

fn parse_range(s: &str) -> Result<(u64, u64), Error> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad number `{t}`")));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => (num(s)?, num(s)?),
    };
    if lo > hi {
        return Err(Error::InvalidArgument(format!("empty range `{s}`")));
    }
    Ok((lo, hi))
}

fn parse_density(s: &str) -> Result<Ratio<u64>, Error> {
    let bad = || Error::Parse(format!("bad density `{s}`"));
    if s.contains('/') {
        return s.parse().map_err(|_| bad());
    }
    let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
    let den = 10u64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
    let whole: u64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| bad())? };
    let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    Ok(Ratio::new(whole * den + frac, den))
}

fn parse_group(s: &str) -> Result<GroupSpec, Error> {
    match s.strip_prefix("table:") {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
            let doc: Value = serde_json::from_str(&text)?;
            let cayley: Vec<Vec<u32>> = serde_json::from_value(doc.get("cayley").cloned().unwrap_or(doc))?;
            GroupSpec::table(cayley)
        }
        None => GroupSpec::parse(s),
    }
}

impl SystemArgs {
    fn load(&self, seed: u64) -> Result<TripleSystem, Error> {
        if let Some(path) = &self.system {
            let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            return TripleSystem::from_json(&text);
        }
        let spec = parse_group(
            self.group.as_deref().ok_or_else(|| Error::InvalidArgument("--group or --system is required".into()))?,
        )?;
        match &self.density {
            Some(d) => TripleSystem::random_dense(&spec, parse_density(d)?, seed),
            None => TripleSystem::full_system(&spec),
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports serialise") + "\n"
}

fn cmd_g(k: &str, format: OutputFormat) -> Outcome {
    let (lo, hi) = parse_range(k)?;
    let rows = g_range(lo.max(1), hi)?;
    match format {
        OutputFormat::Csv => Ok(g_rows_csv(&rows)),
        OutputFormat::Json => {
            Ok(pretty(&rows.iter().map(|r| json!({"k": r.k, "g": r.g, "ratio": r.ratio})).collect::<Vec<_>>()))
        }
        OutputFormat::Svg => Err(usage("g has no svg output")),
    }
}

fn cmd_h(m: &str, format: OutputFormat) -> Outcome {
    let (lo, hi) = parse_range(m)?;
    if lo < 3 {
        return Err(usage("h(m) needs m >= 3"));
    }
    let records: Vec<_> =
        if lo == hi { vec![h_max(lo)?] } else { h_table(hi).into_iter().flatten().filter(|r| r.m >= lo).collect() };
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("m,h,a,b,ell\n");
            for r in &records {
                out += &format!("{},{},{},{},{}\n", r.m, r.h_value, r.argmax.a, r.argmax.b, r.argmax.ell);
            }
            Ok(out)
        }
        OutputFormat::Json => Ok(pretty(&records)),
        OutputFormat::Svg => Err(usage("h has no svg output")),
    }
}

fn cmd_witness(args: &WitnessArgs, seed: u64, budget: Budget) -> Outcome {
    let system = args.system.load(seed)?;
    let subgroup = match &args.subgroup {
        Some(list) => {
            let elems = list
                .split(',')
                .map(|t| t.trim().parse::<u32>().map(Elem).map_err(|_| Error::Parse(format!("bad element `{t}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            Some(SubgroupEmbedding::from_elements(system.spec(), &elems)?)
        }
        None => None,
    };
    let variant = match args.variant {
        VariantArg::Sqrt => Variant::Sqrt,
        VariantArg::K3 => Variant::K3,
    };
    let local = subgroup.as_ref().map_or(system.spec(), |s| &s.spec);
    match *local {
        GroupSpec::Cyclic { n } => {
            let side = match variant {
                Variant::Sqrt => (ceil_sqrt(args.k), ceil_sqrt(args.k)),
                Variant::K3 => (args.k.div_ceil(2), 2),
            };
            search_space(grid_search_space(n as usize, side));
        }
        GroupSpec::Power { q, m } => {
            let dims = match variant {
                Variant::Sqrt => case2_sqrt_params(q, args.k).0 as usize + 1,
                Variant::K3 => case2_k3_params(q, args.k).2,
            };
            search_space(subspace_search_space(q, m, dims));
        }
        GroupSpec::Table { .. } => {}
    }
    let config = PipelineConfig { subgroup, budget, span: SpanOptions::default() };
    let result = witness_pipeline(&system, args.k, variant, &config)?;
    let doc = result.to_json();
    if args.check {
        let report = recheck_witness(&system, &doc, SpanOptions::default())?;
        if !report.pass {
            return Err(Failure::Counterexample(pretty(&report)));
        }
    }
    Ok(pretty(&doc))
}

fn cmd_isoperimetry(k: usize, window: u32, mode: IsoMode, format: OutputFormat, budget: Budget) -> Outcome {
    if k == 0 {
        return Err(usage("k must be positive"));
    }
    let sets: Vec<PointSet> = match mode {
        IsoMode::Spiral => (1..=k).map(|j| spiral_family(j).into_iter().collect()).collect(),
        IsoMode::Brute | IsoMode::Uniqueness => {
            search_space(binomial(hexagon_volume(window) as u64, k as u64));
            if mode == IsoMode::Brute {
                let best = min_boundary_brute(k, window, budget)?;
                let check = min_boundary_scan(k, window, budget)?;
                if check.minimum != best.minimum {
                    return Err(Failure::Counterexample(format!(
                        "enumerators disagree: {} vs {}\n",
                        best.minimum, check.minimum
                    )));
                }
                best.witnesses.into_iter().collect()
            } else {
                extremal_uniqueness(k, window, budget)?.into_iter().collect()
            }
        }
    };
    match format {
        OutputFormat::Svg => Ok(sets.last().map(point_set_svg).unwrap_or_default()),
        OutputFormat::Csv => {
            let mut out = String::from("size,boundary,g\n");
            for s in &sets {
                out += &format!("{},{},{}\n", s.len(), edge_boundary(s), g_of_set(s));
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = sets
                .iter()
                .map(|s| json!({"size": s.len(), "boundary": edge_boundary(s), "g": g_of_set(s), "points": s}))
                .collect();
            let label = match mode {
                IsoMode::Spiral => "spiral_prefixes",
                IsoMode::Brute => "minimisers",
                IsoMode::Uniqueness => "extremal_classes",
            };
            Ok(pretty(&json!({"k": k, "window_radius": window, label: rows})))
        }
    }
}

fn cmd_lowerbound(n: u32, k: usize, budget: Budget) -> Outcome {
    let pairs = (n as u64 / 8) * (n as u64 / 8);
    search_space(binomial(pairs, k as u64));
    let report = verify_lower_bound(n, k, budget)?;
    if report.pass {
        Ok(pretty(&report))
    } else {
        Err(Failure::Counterexample(pretty(&report)))
    }
}

fn cmd_verify(suite: Suite, input: Option<&PathBuf>, system: &SystemArgs, seed: u64, budget: Budget) -> Outcome {
    match suite {
        Suite::Compression => {
            let subsets: u128 = (1..=4).map(|s| binomial(7, s)).sum();
            search_space(subsets * subsets * 7);
            let report = verify_compression(7, 4, 6, budget)?;
            if report.counterexamples.is_empty() {
                Ok(report.to_json() + "\n")
            } else {
                Err(Failure::Counterexample(report.to_json() + "\n"))
            }
        }
        Suite::Lowerbound => cmd_lowerbound(64, 3, budget),
        Suite::Claims => {
            search_space(297);
            let skewed: Vec<u64> =
                h_table(299).into_iter().flatten().filter(|r| !r.is_near_equal()).map(|r| r.m).collect();
            let doc = json!({"m_range": [3, 299], "skewed": skewed, "pass": skewed.is_empty()});
            if skewed.is_empty() {
                Ok(pretty(&doc))
            } else {
                Err(Failure::Counterexample(pretty(&doc)))
            }
        }
        Suite::Witness => {
            let path = input.ok_or_else(|| usage("suite `witness` needs --input"))?;
            let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            let doc: Value = serde_json::from_str(&text).map_err(Error::from)?;
            let sys = match (&system.group, &system.system, doc.get("group")) {
                (None, None, Some(g)) => {
                    let spec: GroupSpec = serde_json::from_value(g.clone()).map_err(Error::from)?;
                    TripleSystem::full_system(&spec)?
                }
                _ => system.load(seed)?,
            };
            let report = recheck_witness(&sys, &doc, SpanOptions::default())?;
            if report.pass {
                Ok(pretty(&report))
            } else {
                Err(Failure::Counterexample(pretty(&report)))
            }
        }
    }
}

fn cmd_pattern(k: usize, system: &SystemArgs, seed: u64, budget: Budget) -> Outcome {
    let sys = system.load(seed)?;
    match *sys.spec() {
        GroupSpec::Cyclic { n } => {
            search_space(grid_search_space(n as usize, (k, k)));
            let grid = PairGrid::from_cells(n as usize, sys.iter_pairs().map(|(a, b)| (a.index(), b.index())))?;
            let found = find_homothetic(&grid, (k, k), budget)?
                .ok_or_else(|| Error::PatternNotFound(format!("no {k}x{k} homothetic grid")))?;
            Ok(pretty(&found))
        }
        GroupSpec::Power { q, m } => {
            search_space(subspace_search_space(q, m, k));
            let found = comb_subspace_find(&sys, k, budget)?
                .ok_or_else(|| Error::PatternNotFound(format!("no {k}-dimensional combinatorial subspace")))?;
            Ok(pretty(&found))
        }
        GroupSpec::Table { .. } => Err(usage("pattern search needs a cyclic or power group")),
    }
}

fn run(cli: &Cli) -> Outcome {
    let config = RunConfig {
        node_budget: cli.budget,
        worker_count: cli.workers,
        seed: cli.seed,
        output_format: cli.format.unwrap_or_default(),
        ..RunConfig::default()
    };
    config.validate()?;
    let budget = config.budget();
    let format = config.output_format;
    let seed = config.seed;
    config.install(|| match &cli.command {
        Command::G { k } => cmd_g(k, cli.format.unwrap_or(OutputFormat::Csv)),
        Command::H { m } => cmd_h(m, format),
        Command::Witness(args) => cmd_witness(args, seed, budget),
        Command::Isoperimetry { k, window, mode } => cmd_isoperimetry(*k, *window, *mode, format, budget),
        Command::Verify { suite, input, system } => cmd_verify(*suite, input.as_ref(), system, seed, budget),
        Command::Lowerbound { n, k } => cmd_lowerbound(*n, *k, budget),
        Command::Pattern { k, system } => cmd_pattern(*k, system, seed, budget),
    })?
}

fn emit(out: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(text) => match emit(cli.out.as_ref(), &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(exit::USAGE)
            }
        },
        Err(Failure::Counterexample(report)) => {
            let _ = emit(cli.out.as_ref(), &report);
            eprintln!("error: counterexample found");
            ExitCode::from(exit::COUNTEREXAMPLE)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::PatternNotFound(_) => exit::NOT_FOUND,
                Error::BudgetExceeded { .. } => exit::BUDGET,
                Error::Certification(_) => exit::COUNTEREXAMPLE,
                _ => exit::USAGE,
            })
        }
    }
}
