//! `lcdg`: command-line front end for the Cayley distance graph toolkit.
//!
//! Exit codes: 0 success, 2 usage or input errors, 3 a size cap was hit,
//! 4 a checked invariant or acceptance criterion failed.

mod commands;
mod manifest;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use lcdg_core::space::DEFAULT_INDEX_CAP;
use serde::Serialize;
use serde_json::{json, Value};

use commands::*;
use manifest::{csv_artifact, emit, json_artifact, Artifact};

#[derive(Parser, Debug)]
#[command(
    name = "lcdg",
    version,
    about = "Exact computations on Cayley distance graphs over F_q^d"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write `<command>.<ext>` here instead of printing.
    #[arg(long, global = true)]
    outdir: Option<PathBuf>,
    /// Output format where both are available.
    #[arg(long, global = true, value_enum)]
    out: Option<Format>,
    /// Cap on q^d for dense arrays.
    #[arg(long, global = true, default_value_t = DEFAULT_INDEX_CAP)]
    cap: u64,
    /// Record wall time in the manifest (outputs stop being byte-reproducible).
    #[arg(long, global = true)]
    record_time: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Profile {
    Desk,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues λ_m of C(E) via additive characters.
    Spectrum(SpectrumArgs),
    /// T_k, good tuples, the tuple partition and the energy inequality.
    Energy(EnergyArgs),
    /// Rooted and unrooted 2k-cycle counts.
    Cycles(CyclesArgs),
    /// Congruence classes of (a)-(b)-(c) tuples, one CSV row per class.
    Classes(ClassesArgs),
    /// Mixing lemma on seeded random multiset pairs.
    Mixing(MixingArgs),
    /// Sphere subset avoiding H - H with a certified large μ.
    Badset(BadSetArgs),
    /// Greedy subset with no good k-energy tuples.
    Indepset(IndepSetArgs),
    /// Degenerate-span tuple count L.
    DegenerateSpan(DegenerateArgs),
    /// Run the acceptance criteria.
    Verify {
        #[arg(long, value_enum, default_value = "desk")]
        profile: Profile,
        /// Run only these criteria.
        #[arg(long)]
        criterion: Vec<u8>,
    },
    /// Grid over (p, r, d, k) from a config file, one CSV row per cell.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug)]
pub enum CliError {
    Core(lcdg_core::Error),
    Usage(String),
    Io(std::io::Error),
    ChecksFailed(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(s) | CliError::ChecksFailed(s) => write!(f, "{s}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<lcdg_core::Error> for CliError {
    fn from(e: lcdg_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use lcdg_core::Error as E;
        match self {
            CliError::Core(E::SizeCapExceeded { .. }) => 3,
            CliError::Core(E::InvariantViolated(_) | E::NumericalDrift { .. } | E::NotGoodTuple) => 4,
            CliError::ChecksFailed(_) => 4,
            _ => 2,
        }
    }

    /// Machine-readable description for stderr.
    fn report(&self) -> Value {
        match self {
            CliError::Core(lcdg_core::Error::SizeCapExceeded { what, size, cap }) => json!({
                "error": "size_cap_exceeded",
                "what": what,
                "size": size.to_string(),
                "cap": cap.to_string(),
            }),
            CliError::Core(e) => json!({ "error": "core", "message": e.to_string() }),
            CliError::Usage(s) => json!({ "error": "usage", "message": s }),
            CliError::Io(e) => json!({ "error": "io", "message": e.to_string() }),
            CliError::ChecksFailed(s) => json!({ "error": "checks_failed", "message": s }),
        }
    }
}

fn params<T: Serialize>(args: &T, cap: u64) -> Value {
    let mut v = serde_json::to_value(args).expect("arguments serialize");
    if let Value::Object(map) = &mut v {
        map.insert("cap".into(), json!(cap));
    }
    v
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let wall = || cli.record_time.then(|| start.elapsed().as_secs_f64());
    let cap = cli.cap;
    let json_only = |name: &str| -> Result<(), CliError> {
        match cli.out {
            Some(Format::Csv) => Err(CliError::Usage(format!("{name} only writes JSON"))),
            _ => Ok(()),
        }
    };
    let (name, artifact): (&str, Artifact) = match &cli.command {
        Command::Spectrum(a) => {
            json_only("spectrum")?;
            let r = spectrum(a, cap)?;
            ("spectrum", json_artifact("spectrum", params(a, cap), wall(), &r))
        }
        Command::Energy(a) => {
            json_only("energy")?;
            let r = energy(a, cap)?;
            ("energy", json_artifact("energy", params(a, cap), wall(), &r))
        }
        Command::Cycles(a) => {
            json_only("cycles")?;
            let r = cycles(a, cap)?;
            ("cycles", json_artifact("cycles", params(a, cap), wall(), &r))
        }
        Command::Classes(a) => {
            let out = classes(a, cap)?;
            let artifact = if cli.out == Some(Format::Json) {
                let mut r = out.summary;
                r["rows"] = serde_json::to_value(&out.rows).expect("rows serialize");
                json_artifact("classes", params(a, cap), wall(), &r)
            } else {
                let mut w = csv::Writer::from_writer(Vec::new());
                for row in &out.rows {
                    w.serialize(row).map_err(|e| CliError::Usage(e.to_string()))?;
                }
                if out.rows.is_empty() {
                    w.write_record(["hash", "multiplicity", "representative"])
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                }
                let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?)
                    .expect("csv is utf-8");
                let mut p = params(a, cap);
                p["summary"] = out.summary;
                csv_artifact("classes", p, wall(), body)
            };
            ("classes", artifact)
        }
        Command::Mixing(a) => {
            json_only("mixing")?;
            let r = mixing(a, cap)?;
            ("mixing", json_artifact("mixing", params(a, cap), wall(), &r))
        }
        Command::Badset(a) => {
            json_only("badset")?;
            let r = badset(a)?;
            ("badset", json_artifact("badset", params(a, cap), wall(), &r))
        }
        Command::Indepset(a) => {
            json_only("indepset")?;
            let r = indepset(a, cap)?;
            ("indepset", json_artifact("indepset", params(a, cap), wall(), &r))
        }
        Command::DegenerateSpan(a) => {
            json_only("degenerate-span")?;
            let r = degenerate_span(a, cap)?;
            (
                "degenerate-span",
                json_artifact("degenerate-span", params(a, cap), wall(), &r),
            )
        }
        Command::Verify { profile, criterion } => return verify(cli, *profile, criterion),
        Command::Sweep { config } => {
            let text = std::fs::read_to_string(config)?;
            let cfg = sweep::SweepConfig::parse(&text)?;
            let body = cfg.run(cap)?;
            let p = params(&cfg, cap);
            let artifact = if cli.out == Some(Format::Json) {
                let mut rdr = csv::Reader::from_reader(body.as_bytes());
                let header = rdr.headers().map_err(|e| CliError::Usage(e.to_string()))?.clone();
                let rows: Vec<Value> = rdr
                    .records()
                    .map(|rec| {
                        let rec = rec.map_err(|e| CliError::Usage(e.to_string()))?;
                        Ok(Value::Object(
                            header
                                .iter()
                                .zip(rec.iter())
                                .map(|(h, v)| (h.to_string(), json!(v)))
                                .collect(),
                        ))
                    })
                    .collect::<Result<_, CliError>>()?;
                json_artifact("sweep", p, wall(), &json!({ "rows": rows }))
            } else {
                csv_artifact("sweep", p, wall(), body)
            };
            ("sweep", artifact)
        }
    };
    emit(name, &artifact, cli.outdir.as_deref())?;
    Ok(())
}

fn verify(cli: &Cli, profile: Profile, only: &[u8]) -> Result<(), CliError> {
    let start = Instant::now();
    let all = lcdg_verify::criteria();
    if let Some(bad) = only.iter().find(|&&id| !all.iter().any(|c| c.id == id)) {
        return Err(CliError::Usage(format!("no criterion {bad}")));
    }
    let mut outcomes = Vec::new();
    for c in all.iter().filter(|c| only.is_empty() || only.contains(&c.id)) {
        let o = c.run();
        println!("{}", o.line());
        outcomes.push(o);
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!(
        "{} of {} criteria passed in {:.1}s",
        outcomes.len() - failed.len(),
        outcomes.len(),
        start.elapsed().as_secs_f64()
    );
    if let Some(dir) = &cli.outdir {
        let p = json!({ "profile": profile, "criteria": only });
        // timings vary run to run, so this artifact always records them
        let r = json!({ "outcomes": outcomes, "passed": failed.is_empty() });
        let artifact = json_artifact("verify", p, Some(start.elapsed().as_secs_f64()), &r);
        emit("verify", &artifact, Some(dir))?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(format!("criteria {failed:?} failed")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("{}", json!({ "error": "usage", "message": e.to_string() }));
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code())
        }
    }
}
