use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nodal_core::cli::{run, Command, FitParams, OutputFormat, RunConfig};
use nodal_core::cobordism::{DoublePointData, PairClass};

/// Nodal curve counts: Severi degrees, universal polynomials and series.
#[derive(Parser, Debug)]
#[command(name = "nodal", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    output: Format,

    /// Severi cache file (overrides NODAL_CACHE_DIR).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    /// Directory holding the Severi cache file.
    #[arg(long, env = "NODAL_CACHE_DIR", global = true, hide_env_values = true)]
    cache_dir: Option<PathBuf>,

    /// Upper bound on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Omit the generated_at field from JSON output.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Plane degrees used for fitting, as d1,d2.
    #[arg(long, value_parser = parse_pair::<u32>)]
    degrees: Option<(u32, u32)>,
    /// K3 self-intersections used for fitting, as s1,s2.
    #[arg(long, value_parser = parse_pair::<i64>)]
    k3: Option<(i64, i64)>,
    /// Skip the d >= 5r-1 ampleness check.
    #[arg(long = "unsafe")]
    unsafe_thresholds: bool,
}

impl From<FitArgs> for FitParams {
    fn from(a: FitArgs) -> Self {
        FitParams { degrees: a.degrees, k3: a.k3, unsafe_thresholds: a.unsafe_thresholds }
    }
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct ClassArgs {
    #[arg(long = "L2")]
    l2: i64,
    #[arg(long = "LK")]
    lk: i64,
    #[arg(long)]
    c1sq: i64,
    #[arg(long)]
    c2: i64,
}

impl From<ClassArgs> for PairClass {
    fn from(a: ClassArgs) -> Self {
        PairClass::new(a.l2, a.lk, a.c1sq, a.c2)
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generalized Severi degree N^{d,delta}(alpha, beta).
    #[command(allow_negative_numbers = true)]
    Severi {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        delta: i64,
        /// Assigned tangencies, e.g. "2^1,3^2" or "2,3,3".
        #[arg(long, default_value = "")]
        alpha: String,
        /// Unassigned tangencies; defaults to transverse points filling the degree.
        #[arg(long)]
        beta: Option<String>,
    },
    /// CSV table of plain Severi degrees.
    SeveriTable {
        #[arg(long)]
        dmax: u32,
        #[arg(long)]
        deltamax: u32,
    },
    /// Fit A1..A4, B1, B2 and the universal polynomials T_r.
    Fit {
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Generating function of a class (L2, LK, c1sq, c2).
    #[command(allow_negative_numbers = true)]
    Evaluate {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Coefficients of a class in the standard basis.
    #[command(allow_negative_numbers = true)]
    Decompose {
        #[command(flatten)]
        class: ClassArgs,
        /// Also report (LK, chi(L), chi(O), K^2).
        #[arg(long)]
        alt: bool,
    },
    /// Close a double point relation v0 = v1 + v2 - v3.
    #[command(allow_negative_numbers = true)]
    CloseRelation {
        /// L2,LK,c1sq,c2
        #[arg(long, value_parser = parse_class)]
        v1: PairClass,
        /// L2,LK,c1sq,c2
        #[arg(long, value_parser = parse_class)]
        v2: PairClass,
        #[arg(long = "gD")]
        g_d: u32,
        #[arg(long = "degLD")]
        deg_ld: i64,
    },
    /// Genus-indexed generating series B1^K2 B2^m (DG2)^r D2G2 / (Delta D2G2/q^2)^(chiO/2).
    #[command(allow_negative_numbers = true)]
    GenusSeries {
        #[arg(long)]
        r: u32,
        #[arg(long = "Ksq")]
        ksq: i64,
        #[arg(long)]
        m: i64,
        #[arg(long = "chiO")]
        chi_o: i64,
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Compare the fitted prediction for a plane degree with Severi degrees.
    Validate {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// q-expansions of G2, DG2, D2G2 and Delta.
    Forms {
        #[arg(long)]
        order: usize,
    },
}

fn parse_pair<T: std::str::FromStr>(s: &str) -> Result<(T, T), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected two comma-separated values, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<T>().map_err(|_| format!("invalid number {x:?}"));
    Ok((p(a)?, p(b)?))
}

fn parse_class(s: &str) -> Result<PairClass, String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse().map_err(|_| format!("invalid number {x:?}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [a, b, c, d] => Ok(PairClass::new(a, b, c, d)),
        _ => Err(format!("expected L2,LK,c1sq,c2, got {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Severi { d, delta, alpha, beta } => Command::Severi { d, delta, alpha, beta },
        Cmd::SeveriTable { dmax, deltamax } => Command::SeveriTable { dmax, deltamax },
        Cmd::Fit { order, fit } => Command::Fit { order, fit: fit.into() },
        Cmd::Evaluate { class, order, fit } => Command::Evaluate { class: class.into(), order, fit: fit.into() },
        Cmd::Decompose { class, alt } => Command::Decompose { class: class.into(), alt },
        Cmd::CloseRelation { v1, v2, g_d, deg_ld } => Command::CloseRelation {
            v1,
            v2,
            double_point: DoublePointData { g_d, deg_ld },
        },
        Cmd::GenusSeries { r, ksq, m, chi_o, order, fit } => {
            Command::GenusSeries { r, ksq, m, chi_o, order, fit: fit.into() }
        }
        Cmd::Validate { d, order, fit } => Command::Validate { d, order, fit: fit.into() },
        Cmd::Forms { order } => Command::Forms { order },
    };
    let cache_path = cli.cache.or_else(|| cli.cache_dir.map(|d| d.join("severi-v1.cache")));
    let config = RunConfig {
        command,
        output: match cli.output {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
            Format::Pretty => OutputFormat::Pretty,
        },
        cache_path,
        threads: cli.threads,
        timestamp: !cli.no_timestamp,
    };
    let outcome = run(&config);
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(outcome.document.as_bytes());
    let _ = stdout.flush();
    ExitCode::from(outcome.exit_code as u8)
}
