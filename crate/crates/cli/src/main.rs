use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nmc_cli::config::{ExperimentConfig, ModeName};
use nmc_cli::run::build_code;
use nmc_cli::{run_experiment, write_atomic, write_report, RunError};
use nmc_core::code::{plan_parameters, PlannerConstants};
use nmc_core::persist::{deserialize_code, serialize_code};
use nmc_core::tamper::FamilyKind;

#[derive(Parser)]
#[command(name = "nmc", version, about = "Non-malleable code experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print t0 and k0 for a tampering family.
    Plan(PlanArgs),
    /// Build the configured code and save it.
    Build(RunArgs),
    /// Run the configured experiment: evaluation and, if present, the attack.
    Eval(RunArgs),
    /// Run only the configured attack.
    Attack(RunArgs),
    /// Summarize a saved JSON report.
    Report { path: PathBuf },
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    n: u32,
    /// log2 of the family size.
    #[arg(long, conflicts_with = "family", required_unless_present = "family")]
    family_log_size: Option<f64>,
    /// Take log2|F| from a named family at width n.
    #[arg(long)]
    family: Option<FamilyKind>,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.01)]
    eta: f64,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    c_t: f64,
    #[arg(long, default_value_t = 1.0)]
    c_k: f64,
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Master seed; code, family, eval and attack use seed, +1, +2, +3.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Output path; stdout when neither this nor the config gives one.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use a saved code instead of building one.
    #[arg(long)]
    code: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentConfig, RunError> {
        let text = std::fs::read_to_string(&self.config).map_err(|e| RunError::io(&self.config, e))?;
        let mut cfg = ExperimentConfig::from_json(&text)?;
        if let Some(seed) = self.seed {
            cfg.reseed(seed);
        }
        if let Some(mode) = self.mode {
            cfg.eval.mode = match mode {
                ModeArg::Exact => ModeName::Exact,
                ModeArg::Sampled => ModeName::Sampled,
            };
        }
        if let Some(out) = &self.out {
            cfg.output.path = Some(out.display().to_string());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out_path(&self, cfg: &ExperimentConfig) -> Option<PathBuf> {
        cfg.output.path.as_ref().map(PathBuf::from)
    }
}

fn stdout_bytes(bytes: &[u8]) -> Result<(), RunError> {
    std::io::stdout().write_all(bytes).map_err(|e| RunError::io(Path::new("<stdout>"), e))
}

fn plan(args: &PlanArgs) -> Result<(), RunError> {
    let log_size = match (args.family_log_size, args.family) {
        (Some(l), _) => l,
        (None, Some(kind)) => kind.log2_size(args.n),
        (None, None) => unreachable!("clap requires one of them"),
    };
    let constants = PlannerConstants { c_t: args.c_t, c_k: args.c_k };
    let p = plan_parameters(args.n, log_size, args.eps, args.eta, args.delta, constants)
        .map_err(|e| RunError::Validation(e.to_string()))?;
    if args.json {
        let mut out = serde_json::to_vec_pretty(&p).expect("plans serialize");
        out.push(b'\n');
        return stdout_bytes(&out);
    }
    let rows = [
        ("n", args.n.to_string()),
        ("log2|F|", log_size.to_string()),
        ("eps", args.eps.to_string()),
        ("eta", args.eta.to_string()),
        ("delta", args.delta.to_string()),
        ("c_t", args.c_t.to_string()),
        ("c_k", args.c_k.to_string()),
        ("t0", p.t0.to_string()),
        ("log2 t0", format!("{:.4}", p.log2_t0)),
        ("k0", p.k0.to_string()),
    ];
    let text: String = rows.iter().map(|(k, v)| format!("{k:<8} {v}\n")).collect();
    stdout_bytes(text.as_bytes())
}

fn build(args: &RunArgs) -> Result<(), RunError> {
    let cfg = args.load()?;
    let (code, summary) = build_code(&cfg)?;
    eprintln!(
        "built {} code n={} k={} t={} after {} rejected builds",
        summary.kind, summary.params.n, summary.params.k, summary.params.t, summary.build_retries
    );
    let bytes = serialize_code(&code);
    match args.out_path(&cfg) {
        Some(path) => write_atomic(&path, &bytes),
        None => stdout_bytes(&bytes),
    }
}

fn run(args: &RunArgs, attack_only: bool) -> Result<(), RunError> {
    let mut cfg = args.load()?;
    if attack_only {
        if cfg.attack.is_none() {
            return Err(RunError::Validation("config has no attack section".into()));
        }
        cfg.family = None;
    }
    let preloaded = match &args.code {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| RunError::io(path, e))?;
            Some(deserialize_code(&bytes).map_err(|e| RunError::Validation(format!("{}: {e}", path.display())))?)
        }
        None => None,
    };
    let started = Instant::now();
    let report = run_experiment(&cfg, preloaded)?;
    eprintln!("finished {} functions in {:.2?}", report.functions.len(), started.elapsed());
    match args.out_path(&cfg) {
        Some(path) => {
            for written in write_report(&report, &path)? {
                eprintln!("wrote {}", written.display());
            }
            Ok(())
        }
        None => stdout_bytes(&report.to_json()),
    }
}

fn summarize_report(path: &Path) -> Result<(), RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| RunError::Validation(format!("{}: {e}", path.display())))?;
    let code = &v["code"];
    let mut out = format!(
        "code      {} n={} k={} t={} delta={} seed={} retries={}\n",
        code["kind"].as_str().unwrap_or("?"),
        code["params"]["n"],
        code["params"]["k"],
        code["params"]["t"],
        code["params"]["delta"],
        code["params"]["seed"],
        code["build_retries"],
    );
    if let Some(s) = code["supports"].as_object() {
        out += &format!("supports  min={} max={} mean={} pass={}\n", s["min"], s["max"], s["mean"], s["pass"]);
    }
    if let Some(e) = v["eval"].as_object() {
        out += &format!("eval      mode={} r={} messages={}\n", e["mode"], e["r"], e["messages"]);
    }
    if let Some(s) = v["summary"].as_object() {
        for key in [
            "functions",
            "max_strong_error",
            "max_canonical_error",
            "max_nm_error",
            "min_detection_rate",
            "max_detection_rate",
        ] {
            out += &format!("{key:<20} {}\n", s[key]);
        }
    }
    if let Some(a) = v["attack"].as_object() {
        let kind = a["kind"].as_str().unwrap_or("?");
        let detail = match kind {
            "swap" => format!("error={}", a["achieved_error"]),
            "subset" => format!("gap={} mass_s0={} mass_s1={}", a["measured_gap"], a["mass_s0"], a["mass_s1"]),
            "barrier" => format!("joint={} marginal={}", a["dist_to_uniform_2k"], a["marginal_dist_to_uniform_k"]),
            _ => format!("{}: {}", a["attack"], a["error"]),
        };
        out += &format!("attack    {kind} {detail}\n");
    }
    stdout_bytes(out.as_bytes())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Plan(a) => plan(a),
        Command::Build(a) => build(a),
        Command::Eval(a) => run(a, false),
        Command::Attack(a) => run(a, true),
        Command::Report { path } => summarize_report(path),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
