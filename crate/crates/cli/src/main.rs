use clap::{Args, Parser, Subcommand, ValueEnum};
use qpd_core::capacity::{additivity_probe, maximize_coherent_information, OptimizeOptions};
use qpd_core::degradability::{classify_pd_with, PdLabel};
use qpd_core::io::{channel_from_json, channel_to_json, matrix_to_rows, LoadedChannel};
use qpd_core::polar::{ledger_from_json, ledger_report, validate_partition};
use qpd_core::zoo::{self, EntryStatus, ZooParams, CATALOG};
use qpd_core::{KrausChannel, QpdError, ReplaceState, Tolerances};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_INPUT: u8 = 2;
const EXIT_INDETERMINATE: u8 = 3;

#[derive(Parser)]
#[command(name = "qpd", version, about = "Quantum channel degradability and capacity analysis")]
struct Cli {
    /// Seed for every randomized analysis.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Override the residual tolerance (composition, trace preservation).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions, completeness and Choi spectrum of a channel file.
    Inspect { file: PathBuf },
    /// Four-solve degradability classification.
    Classify {
        file: PathBuf,
        /// Environment degrading map E -> E' (channel JSON); identity when omitted.
        #[arg(long)]
        degrading: Option<PathBuf>,
        /// Also try complex-conjugated targets when the plain solves are inconclusive.
        #[arg(long)]
        conjugate: bool,
    },
    /// Multi-start maximization of the coherent information.
    Capacity {
        file: PathBuf,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        /// Run the two-copy additivity probe as well.
        #[arg(long)]
        tensor: Option<usize>,
    },
    /// Exact-rational rate report for a polar-code ledger.
    Polar { file: PathBuf },
    /// Catalog of named channels.
    Zoo {
        #[command(subcommand)]
        action: ZooAction,
    },
}

#[derive(Subcommand)]
enum ZooAction {
    List,
    Export {
        id: String,
        #[command(flatten)]
        params: ZooArgs,
    },
}

#[derive(Args)]
struct ZooArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    a1: Option<f64>,
    #[arg(long)]
    a2: Option<f64>,
    #[arg(long)]
    n2: Option<u32>,
    #[arg(long)]
    n3: Option<u32>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    /// Replacement state for flagged constructions: mixed or ground.
    #[arg(long)]
    reference: Option<String>,
    /// Rescale a non-complete Kraus set onto a channel.
    #[arg(long)]
    repair: bool,
}

impl ZooArgs {
    fn to_params(&self) -> Result<ZooParams, Failure> {
        let mut p = ZooParams::default();
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { p.$f = v; })* };
        }
        set!(alpha, x, a1, a2, n2, n3, p, gamma, d);
        if let Some(r) = &self.reference {
            p.reference = match r.as_str() {
                "mixed" => ReplaceState::MaximallyMixed,
                "ground" => ReplaceState::Ground,
                other => return Err(Failure::input(format!("--reference: expected mixed or ground, got '{other}'"))),
            };
        }
        p.repair = self.repair;
        Ok(p)
    }
}

/// A report plus the exit status it implies.
struct Outcome {
    report: Value,
    code: u8,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<QpdError> for Failure {
    fn from(e: QpdError) -> Self {
        Self::input(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_channel(path: &Path) -> Result<LoadedChannel, Failure> {
    channel_from_json(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn tolerances(cli: &Cli) -> Result<Tolerances, Failure> {
    let mut tol = Tolerances::default();
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Failure::input(format!("--tol must be a positive number, got {t}")));
        }
        tol.residual_tol = t;
    }
    Ok(tol)
}

fn inspect(path: &Path, tol: &Tolerances) -> Result<Outcome, Failure> {
    let loaded = load_channel(path)?;
    let ch = &loaded.channel;
    let choi = ch.to_choi()?;
    let rank = choi.rank(tol.kraus_cutoff)?;
    let bound = ch.dim_in() * ch.dim_out();
    Ok(Outcome {
        report: json!({
            "command": "inspect",
            "name": ch.name(),
            "dim_in": ch.dim_in(),
            "dim_out": ch.dim_out(),
            "kraus_count": ch.kraus().len(),
            "tp_residual": loaded.validation.tp_residual,
            "tp_ok": !loaded.tp_warning,
            "choi_rank": rank,
            "choi_min_eig": loaded.validation.choi_min_eig,
            "environment_dimension": {
                "minimal": rank,
                "bound": bound,
                "ok": rank <= bound,
            },
        }),
        code: 0,
    })
}

fn classify(path: &Path, degrading: Option<&Path>, conjugate: bool, tol: &Tolerances) -> Result<Outcome, Failure> {
    let ch = load_channel(path)?.channel;
    let d = match degrading {
        Some(p) => load_channel(p)?.channel,
        None => KrausChannel::identity(ch.kraus().len()),
    };
    let c = classify_pd_with(&ch, &d, conjugate, tol)?;
    let code = if c.label == PdLabel::Undetermined { EXIT_INDETERMINATE } else { 0 };
    let mut report = serde_json::to_value(&c).expect("classification serializes");
    report["command"] = json!("classify");
    report["degrading"] = json!(d.name());
    Ok(Outcome { report, code })
}

fn capacity(cli: &Cli, path: &Path, restarts: usize, tensor: Option<usize>) -> Result<Outcome, Failure> {
    let ch = load_channel(path)?.channel;
    let opts = OptimizeOptions { restarts, seed: cli.seed, ..OptimizeOptions::default() };
    let mut report = match tensor {
        Some(n) => {
            let probe = additivity_probe(&ch, n, &opts)?;
            json!({ "additivity": probe, "value": probe.single })
        }
        None => {
            let r = maximize_coherent_information(&ch, &opts)?;
            json!({
                "value": r.value,
                "argmax_state": matrix_to_rows(r.argmax_state.mat()),
                "restarts_used": r.restarts_used,
                "converged": r.converged,
                "per_restart_values": r.per_restart_values,
            })
        }
    };
    report["command"] = json!("capacity");
    report["options"] = serde_json::to_value(opts).expect("options serialize");
    Ok(Outcome { report, code: 0 })
}

fn polar(path: &Path) -> Result<Outcome, Failure> {
    let ledger = ledger_from_json(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let ok = validate_partition(&ledger).ok;
    let mut report = ledger_report(&ledger);
    report["command"] = json!("polar");
    Ok(Outcome { report, code: if ok { 0 } else { EXIT_INDETERMINATE } })
}

fn zoo_list() -> Result<Outcome, Failure> {
    let defaults = ZooParams::default();
    let mut entries = Vec::new();
    for item in CATALOG {
        let e = zoo::build(item.id, &defaults)?;
        entries.push(json!({
            "id": e.id,
            "params": e.params,
            "dim_in": e.channel.dim_in(),
            "dim_out": e.channel.dim_out(),
            "kraus_count": e.validation.kraus_count,
            "tp_residual": e.validation.tp_residual,
            "status": e.status,
            "source": e.source,
            "description": e.description,
        }));
    }
    Ok(Outcome { report: json!({ "command": "zoo list", "entries": entries }), code: 0 })
}

/// Exports write the channel file to `--out` (or stdout) and the entry summary to stderr.
fn zoo_export(cli: &Cli, id: &str, args: &ZooArgs) -> Result<ExitCode, Failure> {
    let entry = zoo::build(id, &args.to_params()?)?;
    let text = channel_to_json(&entry.channel);
    match &cli.out {
        Some(p) => std::fs::write(p, &text).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    if entry.status == EntryStatus::Flagged {
        eprintln!("{id}: FLAGGED, completeness residual {:e}", entry.validation.tp_residual);
    } else {
        eprintln!("{id}: COMPLETE");
    }
    Ok(ExitCode::SUCCESS)
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if x.is_object() || (x.is_array() && x.as_array().is_some_and(|a| a.iter().any(|e| e.is_object()))) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_text(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {x}\n"));
                }
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                out.push_str(&format!("{pad}[{i}]\n"));
                render_text(x, indent + 1, out);
            }
        }
        other => out.push_str(&format!("{pad}{other}\n")),
    }
}

fn emit(cli: &Cli, mut report: Value, tol: &Tolerances) -> Result<(), Failure> {
    report["tolerances"] = serde_json::to_value(tol).expect("tolerances serialize");
    report["seed"] = json!(cli.seed);
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Text => {
            let mut s = String::new();
            render_text(&report, 0, &mut s);
            s
        }
    };
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    let tol = tolerances(cli)?;
    let outcome = match &cli.command {
        Command::Inspect { file } => inspect(file, &tol)?,
        Command::Classify { file, degrading, conjugate } => classify(file, degrading.as_deref(), *conjugate, &tol)?,
        Command::Capacity { file, restarts, tensor } => capacity(cli, file, *restarts, *tensor)?,
        Command::Polar { file } => polar(file)?,
        Command::Zoo { action: ZooAction::List } => zoo_list()?,
        Command::Zoo { action: ZooAction::Export { id, params } } => return zoo_export(cli, id, params),
    };
    emit(cli, outcome.report, &tol)?;
    Ok(ExitCode::from(outcome.code))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
