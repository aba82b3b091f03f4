use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use num_traits::Signed;

use lpexcess::config::load_channel;
use lpexcess::excess_lab::{self, estimates_csv};
use lpexcess::rational::parse_rational;
use lpexcess::witness::{find_witness, repair_pipeline, trim, RepairOutcome};
use lpexcess::{Error, ExperimentConfig, FundamentalPolytope, MsbChannel, ParityCheckMatrix, Rational};

#[derive(Parser)]
#[command(name = "lpexcess", version, about = "LP decoding with excess over symmetric channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the LLR table of a channel.
    ChannelInfo {
        /// `bsc:<beta>`, `qawgn:<sigma>:<bins>:<clip>` or a channel spec file.
        #[arg(long)]
        channel: String,
    },
    /// Build the alpha-distortion of a channel.
    Distort {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        alpha: String,
        /// Use this mixing weight instead of the default one.
        #[arg(long)]
        delta: Option<String>,
        /// Write the distorted channel as a spec file.
        #[arg(long)]
        emit_spec: Option<PathBuf>,
    },
    /// Emit a parity-check matrix in alist format.
    Graph(GraphArgs),
    /// Run the LP decoder on one LLR vector. Exits 1 on failure.
    Decode {
        #[arg(long)]
        alist: PathBuf,
        /// One LLR per line.
        #[arg(long)]
        llr: PathBuf,
        #[arg(long)]
        excess: Option<String>,
        /// Print the point certifying failure instead of the status.
        #[arg(long)]
        emit_witness_point: bool,
    },
    /// Dual witness search and trimming.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Estimate the success probability at `eps`.
    Simulate(ExperimentArgs),
    /// Success probability along `eps_grid`, with common random numbers.
    ExcessCurve(ExperimentArgs),
    /// Compare excess failures with the distorted channel's failures.
    MarkovCheck(ExperimentArgs),
    /// Check the AWGN noise-scaling coupling.
    AwgnCheck(ExperimentArgs),
    /// Redundant checks of degree at most `k` against all of them.
    RedundancyExp(ExperimentArgs),
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long, conflicts_with = "regular")]
    alist: Option<PathBuf>,
    /// Random `N:DV:DC`-regular code.
    #[arg(long)]
    regular: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Add every dual codeword of weight at most K as a check.
    #[arg(long, conflicts_with = "full")]
    redundant: Option<usize>,
    /// Add every nonzero dual codeword as a check.
    #[arg(long)]
    full: bool,
}

#[derive(Subcommand)]
enum WitnessCommand {
    /// Maximum-slack witness for `l - excess`.
    Find {
        #[arg(long)]
        alist: PathBuf,
        #[arg(long)]
        llr: PathBuf,
        #[arg(long)]
        excess: Option<String>,
    },
    /// Witness on the fully redundant graph for `l - eps`, trimmed to degree k
    /// and repaired.
    Trim {
        #[arg(long)]
        alist: PathBuf,
        #[arg(long)]
        llr: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: String,
        /// Defaults to the largest |LLR| in the file.
        #[arg(long)]
        llr_inf: Option<String>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

/// Data for stdout plus the exit code; `decode` and `witness` exit 1 when
/// decoding fails.
struct Output {
    data: String,
    code: u8,
}

impl Output {
    fn ok(data: String) -> Self {
        Output { data, code: 0 }
    }

    fn decode_failed(data: String) -> Self {
        Output { data, code: 1 }
    }
}

type CliResult = lpexcess::Result<Output>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let out = match run(cli.command) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(out.data.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(3);
    }
    ExitCode::from(out.code)
}

fn run(command: Command) -> CliResult {
    match command {
        Command::ChannelInfo { channel } => channel_info(&channel),
        Command::Distort { channel, alpha, delta, emit_spec } => {
            distort(&channel, &alpha, delta.as_deref(), emit_spec.as_deref())
        }
        Command::Graph(args) => graph(args),
        Command::Decode { alist, llr, excess, emit_witness_point } => {
            decode(&alist, &llr, excess.as_deref(), emit_witness_point)
        }
        Command::Witness(WitnessCommand::Find { alist, llr, excess }) => {
            witness_find(&alist, &llr, excess.as_deref())
        }
        Command::Witness(WitnessCommand::Trim { alist, llr, k, eps, llr_inf }) => {
            witness_trim(&alist, &llr, k, &eps, llr_inf.as_deref())
        }
        Command::Simulate(args) => experiment(args, Experiment::Simulate),
        Command::ExcessCurve(args) => experiment(args, Experiment::Curve),
        Command::MarkovCheck(args) => experiment(args, Experiment::Markov),
        Command::AwgnCheck(args) => experiment(args, Experiment::Awgn),
        Command::RedundancyExp(args) => experiment(args, Experiment::Redundancy),
    }
}

fn channel(spec: &str) -> lpexcess::Result<MsbChannel> {
    load_channel(spec, Path::new("."))
}

fn rational_arg(name: &str, value: &str) -> lpexcess::Result<Rational> {
    parse_rational(value).map_err(|_| Error::InvalidParameter(format!("bad {name}: {value:?}")))
}

fn read_code(path: &Path) -> lpexcess::Result<ParityCheckMatrix> {
    ParityCheckMatrix::from_alist(&std::fs::read_to_string(path)?)
}

/// One exact decimal or fraction per line; blank lines and `#` comments
/// are skipped.
fn read_llr(path: &Path) -> lpexcess::Result<Vec<Rational>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = vec![];
    for (idx, line) in text.lines().enumerate() {
        let v = line.split('#').next().unwrap().trim();
        if v.is_empty() {
            continue;
        }
        out.push(parse_rational(v).map_err(|_| {
            Error::InvalidParameter(format!("{}:{}: bad LLR {v:?}", path.display(), idx + 1))
        })?);
    }
    Ok(out)
}

fn channel_info(spec: &str) -> CliResult {
    let ch = channel(spec)?;
    let part = ch.sigma_partition();
    let mut out = String::from("label,probability,partner,llr,class,llr_inf\n");
    for a in 0..ch.alphabet_size() {
        let class = if part.minus.contains(&a) {
            "minus"
        } else if part.zero.contains(&a) {
            "zero"
        } else {
            "plus"
        };
        writeln!(
            out,
            "{},{},{},{:.6},{class},{:.6}",
            ch.labels()[a],
            ch.probabilities()[a],
            ch.labels()[ch.pairing()[a]],
            ch.llr(a),
            ch.llr_bound()
        )
        .unwrap();
    }
    Ok(Output::ok(out))
}

fn distort(spec: &str, alpha: &str, delta: Option<&str>, emit: Option<&Path>) -> CliResult {
    let ch = channel(spec)?;
    let alpha = rational_arg("alpha", alpha)?;
    let cert = match delta {
        Some(d) => {
            let d = rational_arg("delta", d)?;
            if d > alpha.clone() / Rational::from_integer(2.into()) {
                return Err(Error::InfeasibleDelta(format!("delta {d} exceeds alpha/2")));
            }
            ch.distort_with_delta(&d)?
        }
        None => ch.distort(&alpha)?,
    };
    if let Some(path) = emit {
        std::fs::write(path, cert.distorted.to_spec()).map_err(Error::from)?;
        info!("wrote distorted channel to {}", path.display());
    }
    let mut out = String::from("delta,c,s,epsilon,markov_factor,l1,max_scaling_error\n");
    writeln!(
        out,
        "{},{},{},{},{},{},{:e}",
        cert.delta,
        cert.c,
        cert.s,
        cert.epsilon,
        cert.markov_factor(ch.llr_bound()),
        cert.l1,
        cert.max_scaling_error(&ch)
    )
    .unwrap();
    Ok(Output::ok(out))
}

fn graph(args: GraphArgs) -> CliResult {
    let h = match (&args.alist, &args.regular) {
        (Some(path), None) => read_code(path)?,
        (None, Some(shape)) => {
            let parts: Vec<usize> = shape
                .split(':')
                .map(|v| v.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::InvalidParameter(format!("bad --regular {shape:?}")))?;
            let [n, dv, dc] = parts[..] else {
                return Err(Error::InvalidParameter(format!("bad --regular {shape:?}")));
            };
            ParityCheckMatrix::random_regular(n, dv, dc, args.seed)?
        }
        _ => return Err(Error::InvalidParameter("give exactly one of --alist, --regular".into())),
    };
    let g = if args.full {
        h.full_redundant_graph()?
    } else if let Some(k) = args.redundant {
        h.redundant_graph(k)?
    } else {
        h.tanner_graph()
    };
    Ok(Output::ok(g.parity_check_matrix().to_alist()))
}

fn decode(alist: &Path, llr: &Path, excess: Option<&str>, emit_point: bool) -> CliResult {
    let g = read_code(alist)?.tanner_graph();
    let l = read_llr(llr)?;
    let polytope = FundamentalPolytope::from_graph(&g)?;
    let outcome = match excess {
        Some(e) => polytope.decode_with_excess(&l, &rational_arg("excess", e)?)?,
        None => polytope.decode(&l)?,
    };
    let mut out = String::new();
    if emit_point {
        out.push_str("variable,value\n");
        for (i, v) in outcome.witness_point.iter().enumerate() {
            writeln!(out, "{i},{v}").unwrap();
        }
    } else {
        let status = if outcome.status.is_success() { "success" } else { "failure" };
        writeln!(out, "status,optimal_value\n{status},{}", outcome.optimal_value).unwrap();
    }
    if outcome.status.is_success() {
        Ok(Output::ok(out))
    } else {
        Ok(Output::decode_failed(out))
    }
}

fn witness_find(alist: &Path, llr: &Path, excess: Option<&str>) -> CliResult {
    let g = read_code(alist)?.tanner_graph();
    let mut l = read_llr(llr)?;
    if let Some(e) = excess {
        let e = rational_arg("excess", e)?;
        l.iter_mut().for_each(|v| *v -= &e);
    }
    let Some((w, slack)) = find_witness(&g, &l)? else {
        eprintln!("no witness: the LP decoder fails on this vector");
        return Ok(Output::decode_failed(String::new()));
    };
    let mut out = String::from("check,variable,weight,slack\n");
    for ((j, i), v) in g.edges().zip(w.weights()) {
        writeln!(out, "{j},{i},{v},{slack}").unwrap();
    }
    Ok(Output::ok(out))
}

fn witness_trim(alist: &Path, llr: &Path, k: usize, eps: &str, llr_inf: Option<&str>) -> CliResult {
    let h = read_code(alist)?;
    let base = h.tanner_graph();
    let full = h.full_redundant_graph()?;
    let l = read_llr(llr)?;
    let eps = rational_arg("eps", eps)?;
    let llr_inf = match llr_inf {
        Some(v) => rational_arg("llr_inf", v)?,
        None => l.iter().map(|v| v.abs()).max().unwrap_or_default(),
    };
    let shifted: Vec<Rational> = l.iter().map(|v| v - &eps).collect();
    let Some((w, _)) = find_witness(&full, &shifted)? else {
        eprintln!("no witness for l - eps on the fully redundant graph");
        return Ok(Output::decode_failed(String::new()));
    };
    let (_, report) = trim(&w, base.max_check_degree(), k, &eps, &llr_inf)?;
    let outcome = repair_pipeline(&base, &w, &l, &eps, &llr_inf, k)?;
    let repair = match outcome {
        RepairOutcome::Repaired { .. } => "repaired",
        RepairOutcome::NoTauWitness { .. } => "no-tau-witness",
        RepairOutcome::VerificationFailed { .. } => "verification-failed",
    };
    let mut out = String::from("k,removed_checks,risky,bound_rhs,verdict,repair\n");
    writeln!(
        out,
        "{k},{},{},{},{},{repair}",
        report.removed_checks.len(),
        report.risky_set.len(),
        report.bound_rhs,
        if report.within_bound { "within-bound" } else { "flagged" }
    )
    .unwrap();
    Ok(Output::ok(out))
}

enum Experiment {
    Simulate,
    Curve,
    Markov,
    Awgn,
    Redundancy,
}

fn required<T: Clone>(value: &Option<T>, key: &str) -> lpexcess::Result<T> {
    value
        .clone()
        .ok_or_else(|| Error::MalformedConfig { line: 0, msg: format!("missing key {key:?}") })
}

fn experiment(args: ExperimentArgs, kind: Experiment) -> CliResult {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let g = cfg.load_code()?.tanner_graph();
    let csv = match kind {
        Experiment::Simulate => {
            let est = excess_lab::estimate_success(&cfg.load_channel()?, &g, cfg.eps, cfg.trials, cfg.seed)?;
            estimates_csv(&[cfg.eps], &[est])
        }
        Experiment::Curve => {
            let grid = cfg.grid();
            let curve = excess_lab::excess_curve(&cfg.load_channel()?, &g, &grid, cfg.trials, cfg.seed)?;
            if curve.monotonicity_violations > 0 {
                log::error!("{} trials broke monotonicity", curve.monotonicity_violations);
            }
            estimates_csv(&curve.eps, &curve.points)
        }
        Experiment::Markov => {
            let alpha = required(&cfg.alpha, "alpha")?;
            let r = excess_lab::markov_bound_check(&cfg.load_channel()?, &alpha, &g, cfg.trials, cfg.seed)?;
            excess_lab::markov_csv(&r)
        }
        Experiment::Awgn => {
            let sigma = required(&cfg.sigma, "sigma")?;
            let sigma2 = required(&cfg.sigma2, "sigma2")?;
            let r = excess_lab::awgn_coupling_check(sigma, sigma2, &g, cfg.trials, cfg.seed)?;
            excess_lab::awgn_csv(&r)
        }
        Experiment::Redundancy => {
            let k = required(&cfg.k, "k")?;
            let r = excess_lab::redundancy_experiment(&cfg.load_channel()?, &g, k, cfg.eps, cfg.trials, cfg.seed)?;
            excess_lab::redundancy_csv(&r)
        }
    };
    match cfg.output_path() {
        Some(path) => {
            std::fs::write(&path, &csv).map_err(Error::from)?;
            info!("wrote {}", path.display());
            Ok(Output::ok(String::new()))
        }
        None => Ok(Output::ok(csv)),
    }
}
