//! The `psl3` command line: verification reports for the catalogue families,
//! the rank-6 witnesses, exhaustive search over tiny fields and brute-force
//! oracles.

pub mod oracle;
pub mod search;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use psl3_core::catalogue::{self, Family, Params};
use psl3_core::grp::DEFAULT_CAP;
use psl3_core::verify::{self, VerificationReport, VerifyOptions};
use rayon::prelude::*;

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "psl3", version, about = "Verify chiral and regular polytope generator families in PSL(3,q)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output format; json writes one object per line.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Largest group that is enumerated element by element.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Do not consider dualities in the chirality search.
    #[arg(long, global = true)]
    pub no_duality_branch: bool,
    /// Leave timings out of reports (makes output reproducible).
    #[arg(long, global = true)]
    pub no_timings: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verify one or more catalogue instances.
    Verify(FamilyArgs),
    /// Show the rank-6 impossibility witnesses.
    Witness(WitnessArgs),
    /// Exhaustively search PSL(3,2) or PSL(3,3) for chiral generator tuples.
    Search(SearchArgs),
    /// Recompute orders and intersections by brute force.
    Oracle(OracleArgs),
    /// List the family identifiers.
    Families,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    /// Family identifiers, comma separated (e.g. THM1,THM2).
    #[arg(long, value_delimiter = ',', required = true)]
    pub family: Vec<String>,
    /// Field orders, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i64>,
    #[arg(long)]
    pub i: Option<u32>,
    #[arg(long)]
    pub case: Option<u32>,
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub sign: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long = "a-prime", allow_hyphen_values = true)]
    pub a_prime: Option<String>,
}

impl FamilyArgs {
    fn params(&self) -> Params {
        Params {
            x: self.x.clone(),
            k: self.k,
            i: self.i,
            case: self.case,
            rank: self.rank,
            sign: self.sign,
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            a_prime: self.a_prime.clone(),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct WitnessArgs {
    #[arg(long, value_enum)]
    pub parity: Parity,
    #[arg(long, value_delimiter = ',', required = true)]
    pub q: Vec<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// 2 or 3.
    #[arg(long)]
    pub q: u32,
    /// Polytope ranks to scan (3 to 5), comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub rank: Vec<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Random membership probes.
    #[arg(long, default_value_t = 200)]
    pub samples: u64,
}

struct Failure(i32, String);

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

/// Parses `args`, runs the command and returns the exit code. Diagnostics go
/// to `err`; results go to `out` unless `--out` is given.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    run(&cli, out, err)
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.common.jobs.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut buf = Vec::new();
    let result = pool.install(|| dispatch(cli, &mut buf)).and_then(|code| {
        emit(&cli.common, &buf, out).map_err(|e| usage(format!("cannot write output: {e}")))?;
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn emit(common: &Common, buf: &[u8], out: &mut dyn Write) -> io::Result<()> {
    match &common.out {
        Some(path) => File::create(path)?.write_all(buf),
        None => out.write_all(buf),
    }
}

fn dispatch(cli: &Cli, out: &mut Vec<u8>) -> Result<i32, Failure> {
    let c = &cli.common;
    match &cli.command {
        Command::Verify(args) => {
            let families = parse_families(&args.family)?;
            let reports = verify_all(c, &families, &args.q, &args.params())?;
            write_reports(out, c.format.unwrap_or(Format::Json), &reports, text_report);
            Ok(verdict(&reports))
        }
        Command::Witness(args) => {
            let family = match args.parity {
                Parity::Even => Family::Rank6WitnessEven,
                Parity::Odd => Family::Rank6WitnessOdd,
            };
            let params = Params { a: args.a.clone(), b: args.b.clone(), ..Params::default() };
            let reports = verify_all(c, &[family], &args.q, &params)?;
            write_reports(out, c.format.unwrap_or(Format::Text), &reports, witness_text);
            Ok(verdict(&reports))
        }
        Command::Search(args) => {
            if !search::supported(args.q) {
                return Err(usage(format!("search supports q = 2 or 3, not {}", args.q)));
            }
            if let Some(r) = args.rank.iter().find(|r| !(3..=5).contains(*r)) {
                return Err(usage(format!("search supports ranks 3 to 5, not {r}")));
            }
            let opts = search::SearchOptions { search_duality: !c.no_duality_branch };
            let mut code = EXIT_OK;
            for &rank in &args.rank {
                let report = search::search(args.q, rank, opts);
                // no chiral polytope has a group PSL(3,2)
                if args.q == 2 && report.chiral > 0 {
                    code = EXIT_MISMATCH;
                }
                match c.format.unwrap_or(Format::Json) {
                    Format::Json => writeln!(out, "{}", serde_json::to_string(&report).expect("serializable")),
                    Format::Csv => {
                        if rank == args.rank[0] {
                            let _ = writeln!(out, "q,rank,sigma1_classes,string_tuples,rejected_short_generators,full_group,polytopes,chiral,directly_regular");
                        }
                        writeln!(
                            out,
                            "{},{},{},{},{},{},{},{},{}",
                            report.q,
                            report.rank,
                            report.sigma1_classes,
                            report.string_tuples,
                            report.rejected_short_generators,
                            report.full_group,
                            report.polytopes,
                            report.chiral,
                            report.directly_regular
                        )
                    }
                    Format::Text => writeln!(
                        out,
                        "PSL(3,{}) rank {}: {} chiral tuples ({} string tuples, {} generating, {} with IP+, {} directly regular)",
                        report.q, report.rank, report.chiral, report.string_tuples, report.full_group, report.polytopes, report.directly_regular
                    ),
                }
                .expect("write to buffer");
            }
            Ok(code)
        }
        Command::Oracle(args) => {
            let families = parse_families(&args.family.family)?;
            let params = args.family.params();
            let mut code = EXIT_OK;
            for &family in &families {
                for &q in &args.family.q {
                    let inst = catalogue::build(family, q, &params).map_err(|e| usage(e.to_string()))?;
                    let report = oracle::run(&inst, c.cap, args.samples, c.seed).map_err(|e| {
                        usage(format!("{} has order {}, above the cap {}", e.subgroup, e.order, e.cap))
                    })?;
                    if !report.consistent || report.subgroups.iter().any(|s| s.closure as u128 != s.schreier_sims) {
                        code = EXIT_INCONSISTENT;
                    }
                    match c.format.unwrap_or(Format::Json) {
                        Format::Json | Format::Csv => {
                            let _ = writeln!(out, "{}", serde_json::to_string(&report).expect("serializable"));
                        }
                        Format::Text => {
                            let _ = writeln!(out, "{} q={} schlafli {:?}", report.family, report.q, report.schlafli);
                            for s in &report.subgroups {
                                let _ = writeln!(out, "  |{}| = {} (Schreier-Sims {})", s.subgroup, s.closure, s.schreier_sims);
                            }
                            for i in &report.intersections {
                                let _ = writeln!(
                                    out,
                                    "  {} n {} has {} elements, equal to {}: {}",
                                    i.left, i.right, i.size, i.expected, i.equals_expected
                                );
                            }
                            let _ = writeln!(out, "  consistent: {}", report.consistent);
                        }
                    }
                }
            }
            Ok(code)
        }
        Command::Families => {
            for f in Family::ALL {
                let _ = writeln!(out, "{f}");
            }
            Ok(EXIT_OK)
        }
    }
}

fn parse_families(names: &[String]) -> Result<Vec<Family>, Failure> {
    names.iter().map(|s| s.parse::<Family>().map_err(|e| usage(e.to_string()))).collect()
}

/// Verifies every (family, q) combination in parallel; reports come back
/// sorted by family, then q.
fn verify_all(c: &Common, families: &[Family], qs: &[u32], params: &Params) -> Result<Vec<VerificationReport>, Failure> {
    let opts = VerifyOptions { cap: c.cap, search_duality: !c.no_duality_branch, timings: !c.no_timings };
    let mut jobs: Vec<(Family, u32)> = families.iter().flat_map(|&f| qs.iter().map(move |&q| (f, q))).collect();
    jobs.sort();
    jobs.dedup();
    let instances = jobs
        .iter()
        .map(|&(f, q)| catalogue::build(f, q, params).map_err(|e| usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let results: Vec<_> = instances.par_iter().map(|inst| verify::verify(inst, &opts)).collect();
    results
        .into_iter()
        .map(|r| {
            r.map_err(|e| {
                let code = if e.is_inconsistency() { EXIT_INCONSISTENT } else { EXIT_USAGE };
                Failure(code, e.to_string())
            })
        })
        .collect()
}

fn verdict(reports: &[VerificationReport]) -> i32 {
    if reports.iter().any(|r| r.oracle.iter().any(|o| o.closure != o.schreier_sims)) {
        EXIT_INCONSISTENT
    } else if reports.iter().all(|r| r.expectations_met) {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}

fn write_reports(out: &mut Vec<u8>, format: Format, reports: &[VerificationReport], text: fn(&VerificationReport) -> String) {
    match format {
        Format::Json => {
            for r in reports {
                let _ = writeln!(out, "{}", serde_json::to_string(r).expect("serializable"));
            }
        }
        Format::Csv => {
            let _ = writeln!(out, "{}", verify::CSV_HEADER);
            for r in reports {
                let _ = writeln!(out, "{}", verify::csv_row(r));
            }
        }
        Format::Text => {
            for r in reports {
                let _ = write!(out, "{}", text(r));
            }
        }
    }
}

fn text_report(r: &VerificationReport) -> String {
    verify::text_summary(r)
}

fn witness_text(r: &VerificationReport) -> String {
    let mut s = format!("{} q={}\n", r.family, r.q);
    if let Some(w) = r.witnesses.get("common_point") {
        let fixed = w["fixed_by"].as_array().map_or(0, Vec::len);
        let total = r.generators.len().min(6);
        if r.family == Family::Rank6WitnessEven {
            let all = if fixed == total { "all ".to_string() } else { String::new() };
            s += &format!("  (0,1,0) fixed by {all}{fixed} elements\n");
            let axes = w["on_axis_of"].as_array().map_or(0, Vec::len);
            s += &format!("  (0,1,0) lies on {axes} of {total} axes\n");
        }
    }
    if let Some(f) = r.facts.get("distant_generators_commute") {
        if f.holds {
            s += "  σ_1σ_5 = σ_5σ_1\n";
        } else {
            s += "  σ_1σ_5 ≠ σ_5σ_1: distant generators do not commute\n";
        }
        if let Some(w) = r.witnesses.get("noncommuting") {
            s += &format!("  σ_1 = {}\n  σ_5 = {}\n", w["sigma1"].as_str().unwrap_or(""), w["sigma5"].as_str().unwrap_or(""));
        }
    }
    s += &format!("  expectations met: {}\n", r.expectations_met);
    s
}
