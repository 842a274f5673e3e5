//! `betacoal` command-line frontend.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parameter error.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use betacoal::coalescent::{cpp_infinity_window, segregating_sites, simulate_path, tree_length, ChainSimulator};
use betacoal::rates::{merge_rate, total_rate};
use betacoal::sampling::RandomStream;
use betacoal::stats::report::{json_f64, json_str};
use betacoal::stats::{experiment_ids, run_experiment, ExperimentReport, RunOptions, DEFAULT_SEED};
use betacoal::{AlphaParams, AlphaSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "betacoal", version, about = "Beta(2-alpha, alpha)-coalescent simulation and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Write to this path instead of standard output.
    #[arg(long, global = true)]
    out: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Merger rates and jump probabilities for every m up to --m.
    Rates {
        #[arg(long, value_parser = parse_alpha)]
        alpha: AlphaSpec,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..=100_000))]
        m: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Per-replicate tree length, collision count and segregating sites.
    Simulate {
        #[arg(long, value_parser = parse_alpha)]
        alpha: AlphaSpec,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        reps: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Mutation rate for the segregating-sites count.
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Atoms of the windowed CPP(infinity) approximation on [a, b].
    CppWindow {
        #[arg(long, value_parser = parse_alpha)]
        alpha: AlphaSpec,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        /// Starting block count; defaults to 100 b.
        #[arg(long)]
        start_n: Option<u64>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        reps: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Dump one chain path as `i,X_i,T_i` rows.
    Path {
        #[arg(long, value_parser = parse_alpha)]
        alpha: AlphaSpec,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run a registered experiment, or `all`.
    Verify {
        /// Experiment id or `all`.
        id: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=1024))]
        threads: u64,
        /// Overrides the experiment's alpha where it has a single one.
        #[arg(long, value_parser = parse_alpha)]
        alpha: Option<AlphaSpec>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        reps: Option<u64>,
        /// Also write per-replicate raw values as CSV to this path.
        #[arg(long)]
        raw: Option<String>,
        #[command(flatten)]
        output: Output,
    },
}

fn parse_alpha(s: &str) -> Result<AlphaSpec, String> {
    let spec: AlphaSpec = s.parse().map_err(|e: betacoal::Error| e.to_string())?;
    AlphaParams::new(spec).map_err(|e| e.to_string())?;
    Ok(spec)
}

/// A usage or parameter error, reported with exit code 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

/// Rows of named columns, rendered as CSV or as a JSON envelope.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

enum Cell {
    Int(u64),
    Real(f64),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => format!("{x:?}"),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => json_f64(*x),
        }
    }
}

struct Header {
    command: String,
    alpha: String,
    seed: Option<u64>,
}

impl Header {
    fn comment(&self) -> String {
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        format!("# betacoal {VERSION} command=\"{}\" alpha={} seed={seed}\n", self.command, self.alpha)
    }

    fn json_fields(&self) -> String {
        let seed = self.seed.map_or_else(|| "null".to_string(), |s| s.to_string());
        format!(
            "\"version\":{},\"command\":{},\"alpha\":{},\"seed\":{seed}",
            json_str(VERSION),
            json_str(&self.command),
            json_str(&self.alpha)
        )
    }
}

fn render_table(h: &Header, t: &Table, format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str(&h.comment());
            s.push_str(&t.columns.join(","));
            s.push('\n');
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
        }
        Format::Json => {
            let _ = write!(s, "{{{},\"rows\":[", h.json_fields());
            for (i, row) in t.rows.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push('{');
                for (j, (c, v)) in t.columns.iter().zip(row).enumerate() {
                    if j > 0 {
                        s.push(',');
                    }
                    let _ = write!(s, "{}:{}", json_str(c), v.json());
                }
                s.push('}');
            }
            s.push_str("]}\n");
        }
    }
    s
}

fn write_output(out: &Option<String>, text: &str) -> io::Result<()> {
    match out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(text.as_bytes())?;
            f.flush()
        }
        None => {
            let mut o = io::stdout().lock();
            o.write_all(text.as_bytes())?;
            o.flush()
        }
    }
}

/// Rounds to 15 significant digits so that exact rationals print exactly.
fn round15(x: f64) -> f64 {
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn rates_table(alpha: AlphaSpec, max_m: u64) -> Result<Table, UsageError> {
    let p = AlphaParams::new(alpha)?;
    let mut rows = Vec::new();
    for m in 2..=max_m {
        let total = total_rate(m, &p)?;
        for k in 2..=m {
            let rate = merge_rate(m, k, &p)?;
            rows.push(vec![
                Cell::Int(m),
                Cell::Int(m - k + 1),
                Cell::Real(round15(rate)),
                Cell::Real(round15(rate / total)),
            ]);
        }
    }
    Ok(Table { columns: vec!["m", "l", "rate", "prob"], rows })
}

fn simulate_table(alpha: AlphaSpec, n: u64, reps: u64, seed: u64, theta: f64) -> Result<Table, UsageError> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(UsageError(format!("theta must be positive and finite, got {theta}")));
    }
    let p = AlphaParams::new(alpha)?;
    let mut rows = Vec::with_capacity(reps as usize);
    for r in 0..reps {
        let mut stream = RandomStream::new(seed, r);
        let path = simulate_path(n, &mut stream, &p)?;
        let length = tree_length(&path);
        let sites = segregating_sites(length, theta, &mut stream)?;
        rows.push(vec![Cell::Int(r), Cell::Real(length), Cell::Int(path.tau() as u64), Cell::Int(sites)]);
    }
    Ok(Table { columns: vec!["replicate", "L_n", "tau_n", "S_n"], rows })
}

fn cpp_table(alpha: AlphaSpec, a: u64, b: u64, start_n: Option<u64>, reps: u64, seed: u64) -> Result<Table, UsageError> {
    let p = AlphaParams::new(alpha)?;
    let start = start_n.unwrap_or(b.saturating_mul(100));
    let mut rows = Vec::new();
    for r in 0..reps {
        let pp = cpp_infinity_window(a, b, start, &mut RandomStream::new(seed, r), &p)?;
        rows.extend(pp.atoms().iter().map(|&x| vec![Cell::Int(r), Cell::Int(x)]));
    }
    Ok(Table { columns: vec!["replicate", "atom"], rows })
}

fn render_reports(h: &Header, reports: &[ExperimentReport], format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str(&h.comment());
            s.push_str("experiment_id,kind,name,statistic,value,comparison,threshold,pass\n");
            for r in reports {
                for m in &r.statistics {
                    let _ = writeln!(s, "{},statistic,{},{},{:?},,,", r.experiment_id, m.name, m.name, m.value);
                }
                for v in &r.verdicts {
                    let value = r.get(&v.statistic).unwrap_or(f64::NAN);
                    let cmp = v.comparison.symbol();
                    let _ = writeln!(
                        s,
                        "{},verdict,{},{},{:?},{cmp},{:?},{}",
                        r.experiment_id, v.name, v.statistic, value, v.threshold, v.pass
                    );
                }
            }
        }
        Format::Json => {
            let _ = write!(s, "{{{},\"reports\":[", h.json_fields());
            for (i, r) in reports.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(&r.to_json(true));
            }
            let all = reports.iter().all(ExperimentReport::passed);
            let _ = writeln!(s, "],\"pass\":{all}}}");
        }
    }
    s
}

fn render_raw(h: &Header, reports: &[ExperimentReport]) -> String {
    let mut s = h.comment();
    s.push_str("experiment_id,replicate,stat_name,value\n");
    for r in reports {
        for line in r.raw_csv_rows().lines() {
            let _ = writeln!(s, "{},{line}", r.experiment_id);
        }
    }
    s
}

fn run(cli: Cli, command_line: String) -> Result<bool, UsageError> {
    match cli.command {
        Command::Rates { alpha, m, output } => {
            let h = Header { command: command_line, alpha: alpha.to_string(), seed: None };
            let t = rates_table(alpha, m)?;
            write_output(&output.out, &render_table(&h, &t, output.format))?;
        }
        Command::Simulate { alpha, n, reps, seed, theta, output } => {
            let h = Header { command: command_line, alpha: alpha.to_string(), seed: Some(seed) };
            let t = simulate_table(alpha, n, reps, seed, theta)?;
            write_output(&output.out, &render_table(&h, &t, output.format))?;
        }
        Command::CppWindow { alpha, a, b, start_n, reps, seed, output } => {
            let h = Header { command: command_line, alpha: alpha.to_string(), seed: Some(seed) };
            let t = cpp_table(alpha, a, b, start_n, reps, seed)?;
            write_output(&output.out, &render_table(&h, &t, output.format))?;
        }
        Command::Path { alpha, n, seed, stream, out } => {
            let p = AlphaParams::new(alpha)?;
            let path = ChainSimulator::new(&p).path(n, &mut RandomStream::new(seed, stream))?;
            let mut buf = Vec::new();
            path.write_csv(&mut buf, seed, stream, alpha)?;
            write_output(&out, &String::from_utf8_lossy(&buf))?;
        }
        Command::Verify { id, seed, threads, alpha, n, reps, raw, output } => {
            let ids: Vec<&str> = if id == "all" {
                experiment_ids().to_vec()
            } else if experiment_ids().contains(&id.as_str()) {
                vec![id.as_str()]
            } else {
                return Err(UsageError(format!(
                    "unknown experiment id `{id}`; known ids: all, {}",
                    experiment_ids().join(", ")
                )));
            };
            let opts = RunOptions { seed, threads: threads as usize, alpha, n, replicates: reps };
            let mut reports = Vec::with_capacity(ids.len());
            for e in ids {
                let report = run_experiment(e, &opts)?;
                eprintln!("{}  ({:.1}s)", report.summary_line(), report.runtime_seconds);
                reports.push(report);
            }
            let alpha_text = alpha.map_or_else(|| "default".to_string(), |a| a.to_string());
            let h = Header { command: command_line, alpha: alpha_text, seed: Some(seed) };
            write_output(&output.out, &render_reports(&h, &reports, output.format))?;
            if let Some(path) = raw {
                write_output(&Some(path), &render_raw(&h, &reports))?;
            }
            return Ok(reports.iter().all(ExperimentReport::passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let command_line = std::env::args().collect::<Vec<_>>().join(" ");
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli, command_line) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
