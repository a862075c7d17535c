use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nidsbench_core::bench::{
    compare_runs, emit_tables, parse_kv, read_reports, run_experiment, run_grid, write_tables, BenchError,
    ReducerConfig, RunConfig, TableFormat,
};
use nidsbench_core::classifiers::ClassifierKind;
use nidsbench_core::dataset::Task;

#[derive(Parser)]
#[command(name = "nidsbench", version, about = "Feature selection vs. extraction benchmark on UNSW-NB15")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one (task, reducer, classifier) cell and print its report.
    Run(RunArgs),
    /// Run every combination; defaults to the full reference grid.
    Grid(GridArgs),
    /// Render comparison and per-class tables from saved reports.
    Report(ReportArgs),
    /// Summarise selection vs. extraction from saved reports.
    Compare(CompareArgs),
}

/// Flags shared by `run` and `grid`. They override the config file.
#[derive(Args)]
struct ConfigFlags {
    /// Key/value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    train: Option<String>,
    #[arg(long)]
    test: Option<String>,
    #[arg(long)]
    task: Option<String>,
    /// none, selection or extraction.
    #[arg(long)]
    reducer: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long)]
    classifier: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    repeat: Option<String>,
    /// Output directory for reports, artifacts and tables.
    #[arg(long)]
    out: Option<String>,
}

impl ConfigFlags {
    fn kv(&self) -> Result<BTreeMap<String, String>, BenchError> {
        let mut kv = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
                    path: path.clone(),
                    source,
                })?;
                parse_kv(&text)?
            }
            None => BTreeMap::new(),
        };
        let flags = [
            ("train", &self.train),
            ("test", &self.test),
            ("task", &self.task),
            ("reducer", &self.reducer),
            ("k", &self.k),
            ("threshold", &self.threshold),
            ("classifier", &self.classifier),
            ("seed", &self.seed),
            ("repeat", &self.repeat),
            ("out", &self.out),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                kv.insert(key.to_string(), v.clone());
            }
        }
        Ok(kv)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    flags: ConfigFlags,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    flags: ConfigFlags,
    /// Table format written under `<out>/tables`.
    #[arg(long, default_value = "csv")]
    format: TableFormat,
}

#[derive(Args)]
struct ReportArgs {
    /// Report files or directories of `*.jsonl`.
    #[arg(required = true)]
    runs: Vec<PathBuf>,
    #[arg(long, default_value = "markdown")]
    format: TableFormat,
    /// Write one file per table here instead of printing.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(required = true)]
    runs: Vec<PathBuf>,
    /// markdown or json.
    #[arg(long, default_value = "markdown")]
    format: String,
}

fn emit_error(kind: &str, message: &str) {
    eprintln!("{}", serde_json::json!({ "error": kind, "message": message }));
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Report(a) => cmd_report(a),
        Command::Compare(a) => cmd_compare(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            emit_error(e.kind(), &e.to_string());
            ExitCode::FAILURE
        }
    }
}

fn cmd_run(a: RunArgs) -> Result<ExitCode, BenchError> {
    let cfg = RunConfig::from_kv(&a.flags.kv()?)?;
    let report = run_experiment(&cfg)?;
    println!("{}", serde_json::to_string(&report).expect("report serializes"));
    Ok(ExitCode::SUCCESS)
}

fn list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, BenchError>
where
    T::Err: std::fmt::Display,
{
    v.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|e| BenchError::Config(format!("{key} = {v}: {e}"))))
        .collect()
}

/// Without reducer flags the reference grid is used. `--k` takes a comma
/// list and, without `--reducer`, expands to both selection and extraction.
fn reducers(method: Option<String>, ks: Option<String>, threshold: Option<String>) -> Result<Vec<ReducerConfig>, BenchError> {
    if method.is_none() && ks.is_none() && threshold.is_none() {
        return Ok(ReducerConfig::reference_grid());
    }
    let methods = match method {
        Some(m) => vec![m],
        None if threshold.is_some() => vec!["selection".to_string()],
        None => vec!["selection".to_string(), "extraction".to_string()],
    };
    let ks: Vec<usize> = ks.as_deref().map(|v| list("k", v)).transpose()?.unwrap_or_default();
    let mut out = Vec::new();
    for m in methods {
        let mut sizes: Vec<BTreeMap<String, String>> = ks
            .iter()
            .map(|k| BTreeMap::from([("k".to_string(), k.to_string())]))
            .collect();
        if let Some(t) = &threshold {
            sizes.push(BTreeMap::from([("threshold".to_string(), t.clone())]));
        }
        if sizes.is_empty() || m == "none" {
            sizes = vec![BTreeMap::new()];
        }
        for mut kv in sizes {
            if m == "none" {
                kv.clear();
            }
            kv.insert("reducer".into(), m.clone());
            let r = RunConfig::from_kv(&kv)?.reducer;
            if !out.contains(&r) {
                out.push(r);
            }
        }
    }
    Ok(out)
}

fn cmd_grid(a: GridArgs) -> Result<ExitCode, BenchError> {
    let mut kv = a.flags.kv()?;
    // task, classifier and k accept comma lists or `all` here
    let tasks = match kv.remove("task").as_deref() {
        None | Some("all") => vec![Task::Binary, Task::Multiclass],
        Some(v) => list("task", v)?,
    };
    let classifiers = match kv.remove("classifier").as_deref() {
        None | Some("all") => ClassifierKind::ALL.to_vec(),
        Some(v) => list("classifier", v)?,
    };
    let reducers = reducers(kv.remove("reducer"), kv.remove("k"), kv.remove("threshold"))?;
    let base = RunConfig::from_kv(&kv)?;

    let result = run_grid(&base, &tasks, &reducers, &classifiers)?;
    for r in &result.reports {
        println!(
            "{}",
            serde_json::json!({
                "task": r.label.task,
                "method": r.label.method,
                "k": r.label.k,
                "classifier": r.label.classifier,
                "precision": r.precision,
                "recall": r.recall,
                "f1": r.f1,
                "training_time": r.timing.training_time,
                "inference_time_per_sample": r.timing.inference_time_per_sample,
            })
        );
    }
    for f in &result.failures {
        eprintln!("{}", serde_json::json!({ "error": f.kind, "cell": f.cell, "message": f.error }));
    }
    if let (Some(out), false) = (&base.output_dir, result.reports.is_empty()) {
        let tables = emit_tables(&result.reports)?;
        write_tables(&out.join("tables"), &tables, a.format)?;
        if let Ok(summary) = compare_runs(&result.reports) {
            let path = out.join("comparison.md");
            std::fs::write(&path, summary.render_markdown()).map_err(|source| BenchError::Io { path, source })?;
        }
    }
    Ok(if result.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_report(a: ReportArgs) -> Result<ExitCode, BenchError> {
    let reports = read_reports(&a.runs)?;
    let tables = emit_tables(&reports)?;
    match a.out {
        Some(dir) => {
            for p in write_tables(&dir, &tables, a.format)? {
                println!("{}", p.display());
            }
        }
        None => {
            for t in &tables {
                println!("## {}\n\n{}", t.name, t.render(a.format));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_compare(a: CompareArgs) -> Result<ExitCode, BenchError> {
    let summary = compare_runs(&read_reports(&a.runs)?)?;
    match a.format.as_str() {
        "markdown" | "md" => print!("{}", summary.render_markdown()),
        "json" => println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes")),
        other => return Err(BenchError::Config(format!("format = {other}: expected markdown|json"))),
    }
    Ok(ExitCode::SUCCESS)
}
