//! Command-line front end.
//!
//! Exit codes are a stable contract:
//! `0` pass / conclusive, `1` property failure or refutation of a known value,
//! `2` usage or parse error, `3` internal guard tripped, `4` inconclusive.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bounds::bounds_report;
use crate::construct::{block_construction, middle_layer, threshold_construction, BlockParams, ThresholdParams};
use crate::io::{read_text, write_text, FamiliesFile, SequenceFile};
use crate::search::{
    delta, exceeding_quad_search, exists_arbitrarily_long, longest_sequence, seymour_max_pair, squeeze_search,
    Budget, SearchVerdict, VerdictKind,
};
use crate::sequence::{first_violation, reference_witness, witness_audit};
use crate::sets::{first_comparable_pair, render_word, GroundSize};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "exceedkit", version, about = "Incomparable set families and d-exceeding sequences")]
pub struct Cli {
    /// Maximum number of search states per query
    #[arg(long, global = true, default_value_t = 100_000_000)]
    budget_states: u64,

    /// Maximum wall-clock seconds per query
    #[arg(long, global = true, default_value_t = 600.0)]
    budget_secs: f64,

    /// Worker threads for parallel search (default: all cores)
    #[arg(long, global = true, env = "EXCEEDKIT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build pairwise incomparable families
    #[command(subcommand)]
    Construct(ConstructKind),
    /// Check a families or sequence file
    #[command(subcommand)]
    Verify(VerifyKind),
    /// Run an exhaustive search and print the verdict as JSON
    #[command(subcommand)]
    Search(SearchKind),
    /// Emit a reference witness sequence
    Witness {
        name: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate closed-form bounds
    #[command(subcommand)]
    Bounds(BoundsKind),
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print sets as element words ("234", "." for the empty set)
    #[arg(long)]
    pretty: bool,
}

#[derive(Subcommand, Debug)]
enum ConstructKind {
    /// One family per middle-layer subset of [s], lifted to [k]
    Middle {
        #[arg(long)]
        s: u32,
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Block construction: B ∩ C_i empty iff i is designated
    Block {
        #[command(flatten)]
        p: BlockArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Threshold construction: B ∩ C_i among the m smallest iff i is designated
    Threshold {
        #[command(flatten)]
        p: BlockArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct BlockArgs {
    #[arg(long)]
    s: u32,
    #[arg(long)]
    a: u32,
    #[arg(long)]
    c: u32,
    #[arg(long)]
    k: u32,
}

#[derive(Subcommand, Debug)]
enum VerifyKind {
    /// Families file: every two families incomparable
    Incomparable { path: PathBuf },
    /// Sequence file: d-exceeding, d defaulting to the file's d_claimed
    Exceeding {
        path: PathBuf,
        #[arg(long)]
        d: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum SearchKind {
    /// δ(k), the largest d with arbitrarily long d-exceeding sequences
    Delta {
        #[arg(long)]
        k: u32,
    },
    /// Whether arbitrarily long d-exceeding sequences exist
    Exists {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: usize,
    },
    /// Maximum length of a d-exceeding sequence
    Longest {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: usize,
    },
    /// Largest size of two incomparable equal-size families
    Seymour {
        #[arg(long)]
        k: u32,
    },
    /// Exceeding chain of four families of size ceil(2^k/3)
    Quad {
        #[arg(long)]
        k: u32,
    },
    /// Squeezing a set into the middle of an exceeding chain of 2^k/4-families
    Squeeze {
        #[arg(long)]
        k: u32,
    },
}

#[derive(Subcommand, Debug)]
enum BoundsKind {
    /// Print every applicable bound for k (and r, s, a when given)
    Table {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r: Option<u32>,
        #[arg(long, requires = "a")]
        s: Option<u32>,
        #[arg(long, requires = "s")]
        a: Option<u32>,
    },
}

/// Exact values known for small `k`, used to flag refutations.
const DELTA_KNOWN: [(u32, usize); 4] = [(1, 0), (2, 1), (3, 2), (4, 5)];
const LONGEST_KNOWN: [(u32, usize, u64); 3] = [(2, 2, 4), (3, 3, 10), (4, 6, 24)];

fn known_delta(k: u32) -> Option<usize> {
    DELTA_KNOWN.iter().find(|(kk, _)| *kk == k).map(|&(_, d)| d)
}

/// Whether a conclusive verdict contradicts a known value.
fn refutes_known(kind: &SearchKind, v: &SearchVerdict) -> bool {
    match kind {
        SearchKind::Delta { k } => known_delta(*k).is_some_and(|d| v.value != Some(d as u64)),
        SearchKind::Exists { k, d } => {
            known_delta(*k).is_some_and(|delta| (v.kind == VerdictKind::Exists) != (*d <= delta))
        }
        SearchKind::Longest { k, d } => {
            let unbounded_expected = known_delta(*k).map(|delta| *d <= delta);
            let value_mismatch = LONGEST_KNOWN
                .iter()
                .find(|(kk, dd, _)| kk == k && dd == d)
                .is_some_and(|&(_, _, len)| v.value != Some(len));
            value_mismatch || unbounded_expected.is_some_and(|u| u != (v.kind == VerdictKind::Unbounded))
        }
        SearchKind::Seymour { k } => {
            let expected = if *k >= 2 { 1u64 << (k - 2) } else { 0 };
            v.value != Some(expected)
        }
        SearchKind::Quad { .. } | SearchKind::Squeeze { .. } => v.kind == VerdictKind::Exists,
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Runs the CLI with the given arguments (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // the global pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let budget = Budget { max_states: cli.budget_states, max_secs: cli.budget_secs };
    let mut io = Io { out, err };
    match dispatch(cli.command, budget, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn ground(k: u32) -> anyhow::Result<GroundSize> {
    Ok(GroundSize::new(k)?)
}

fn emit(io: &mut Io, output: &OutputArgs, text: &str) -> anyhow::Result<()> {
    match &output.out {
        Some(path) => write_text(path, text)?,
        None => io.out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dispatch(command: Command, budget: Budget, io: &mut Io) -> anyhow::Result<i32> {
    match command {
        Command::Construct(kind) => construct(kind, io),
        Command::Verify(kind) => verify(kind, io),
        Command::Search(kind) => search(kind, budget, io),
        Command::Witness { name, output } => witness(&name, &output, io),
        Command::Bounds(BoundsKind::Table { k, r, s, a }) => {
            let report = bounds_report(ground(k)?, r, s.zip(a))?;
            writeln!(io.out, "{}", serde_json::to_string_pretty(&report)?)?;
            Ok(EXIT_PASS)
        }
    }
}

fn construct(kind: ConstructKind, io: &mut Io) -> anyhow::Result<i32> {
    let (k, fams, expected, output) = match kind {
        ConstructKind::Middle { s, k, output } => {
            let k = ground(k)?;
            let fams = middle_layer(s, k)?;
            (k, fams, 1u64 << (k.get() - s), output)
        }
        ConstructKind::Block { p, output } => {
            let params = BlockParams::new(p.s, p.a, p.c, ground(p.k)?)?;
            (params.k, block_construction(&params)?, params.expected_size(), output)
        }
        ConstructKind::Threshold { p, output } => {
            let params = ThresholdParams::new(p.s, p.a, p.c, ground(p.k)?)?;
            (params.k, threshold_construction(&params)?, params.expected_size(), output)
        }
    };
    if let Some(c) = first_comparable_pair(&fams)? {
        writeln!(io.err, "internal error: constructed families {} and {} are comparable", c.left_family, c.right_family)?;
        return Ok(EXIT_INTERNAL);
    }
    if let Some(bad) = fams.iter().find(|f| f.len() as u64 != expected) {
        writeln!(io.err, "internal error: family of size {} where {expected} was expected", bad.len())?;
        return Ok(EXIT_INTERNAL);
    }
    let sizes: Vec<String> = fams.iter().map(|f| f.len().to_string()).collect();
    writeln!(io.err, "{} families over [{k}], sizes {}, expected size {expected}", fams.len(), sizes.join("/"))?;
    let file = FamiliesFile::from_families(k, &fams);
    let text = if output.pretty { file.render_pretty() } else { file.to_json() };
    emit(io, &output, &text)?;
    Ok(EXIT_PASS)
}

fn verify(kind: VerifyKind, io: &mut Io) -> anyhow::Result<i32> {
    match kind {
        VerifyKind::Incomparable { path } => {
            let file = FamiliesFile::parse(&read_text(&path)?)?;
            let (k, fams) = file.to_families()?;
            match first_comparable_pair(&fams)? {
                None => {
                    writeln!(io.out, "PASS: {} families over [{k}] are pairwise incomparable", fams.len())?;
                    Ok(EXIT_PASS)
                }
                Some(c) => {
                    writeln!(
                        io.out,
                        "FAIL: family {} member {} contains family {} member {}",
                        c.left_family + 1,
                        render_word(c.superset),
                        c.right_family + 1,
                        render_word(c.subset)
                    )?;
                    Ok(EXIT_FAIL)
                }
            }
        }
        VerifyKind::Exceeding { path, d } => {
            let file = SequenceFile::parse(&read_text(&path)?)?;
            let k = file.ground()?;
            let d = d.unwrap_or(file.d_claimed);
            match first_violation(&file.sets, d) {
                None => {
                    writeln!(io.out, "PASS: sequence of length {} over [{k}] is {d}-exceeding", file.sets.len())?;
                    Ok(EXIT_PASS)
                }
                Some((i, j)) => {
                    writeln!(
                        io.out,
                        "FAIL: not {d}-exceeding: position {} ({}) contains position {} ({})",
                        i + 1,
                        render_word(file.sets[i]),
                        j + 1,
                        render_word(file.sets[j])
                    )?;
                    Ok(EXIT_FAIL)
                }
            }
        }
    }
}

fn search(kind: SearchKind, budget: Budget, io: &mut Io) -> anyhow::Result<i32> {
    let verdict = match &kind {
        SearchKind::Delta { k } => delta(ground(*k)?, budget)?,
        SearchKind::Exists { k, d } => exists_arbitrarily_long(ground(*k)?, *d, budget)?,
        SearchKind::Longest { k, d } => longest_sequence(ground(*k)?, *d, budget)?,
        SearchKind::Seymour { k } => seymour_max_pair(ground(*k)?, budget)?,
        SearchKind::Quad { k } => exceeding_quad_search(ground(*k)?, budget)?,
        SearchKind::Squeeze { k } => squeeze_search(ground(*k)?, budget)?,
    };
    writeln!(io.out, "{}", serde_json::to_string_pretty(&verdict)?)?;
    if let Err(e) = verdict.verify_witness() {
        writeln!(io.err, "internal error: witness does not verify: {e}")?;
        return Ok(EXIT_INTERNAL);
    }
    if !verdict.is_conclusive() {
        writeln!(io.err, "inconclusive: budget exhausted after {} states", verdict.states_explored)?;
        return Ok(EXIT_INCONCLUSIVE);
    }
    if refutes_known(&kind, &verdict) {
        writeln!(io.err, "REFUTATION: verdict contradicts the known value for this query")?;
        return Ok(EXIT_FAIL);
    }
    Ok(EXIT_PASS)
}

fn witness(name: &str, output: &OutputArgs, io: &mut Io) -> anyhow::Result<i32> {
    let seq = match reference_witness(name) {
        Ok(seq) => seq,
        Err(e) => {
            writeln!(io.err, "error: {e}")?;
            return Ok(EXIT_USAGE);
        }
    };
    let audit = witness_audit(name)?;
    writeln!(
        io.err,
        "{name}: length {}, max exceedance {} (stated {}, statement {})",
        audit.length, audit.max_exceedance, audit.stated_d, audit.statement_d
    )?;
    let file = SequenceFile::from_seq(&seq);
    // the file must pass its own verifier
    if first_violation(&file.sets, file.d_claimed).is_some() {
        return Ok(EXIT_INTERNAL);
    }
    let text = if output.pretty { file.render_pretty() } else { file.to_json() };
    emit(io, output, &text)?;
    Ok(EXIT_PASS)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("exceedkit").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_args(&["construct", "block", "--s", "3"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["construct", "block", "--s", "3", "--a", "2", "--c", "1", "--k", "6"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["witness", "nope"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["search", "delta", "--k", "0"]).0, EXIT_USAGE);
    }

    #[test]
    fn construct_reports_sizes() {
        let (code, out, err) = run_args(&["construct", "block", "--s", "3", "--a", "1", "--c", "2", "--k", "6"]);
        assert_eq!(code, EXIT_PASS);
        assert!(err.contains("sizes 9/9/9"), "{err}");
        assert!(err.contains("expected size 9"));
        let file = FamiliesFile::parse(&out).unwrap();
        assert_eq!(file.families.len(), 3);
    }

    #[test]
    fn search_exit_codes() {
        let (code, out, _) = run_args(&["search", "delta", "--k", "3"]);
        assert_eq!(code, EXIT_PASS);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["value"], 2);
        let (code, _, _) = run_args(&["--budget-states", "3", "search", "longest", "--k", "3", "--d", "3"]);
        assert_eq!(code, EXIT_INCONCLUSIVE);
    }

    #[test]
    fn refutation_check_flags_mismatches() {
        let k = GroundSize::new(3).unwrap();
        let mut v = SearchVerdict::new("delta", k, None, VerdictKind::Value);
        v.value = Some(3);
        assert!(refutes_known(&SearchKind::Delta { k: 3 }, &v));
        v.value = Some(2);
        assert!(!refutes_known(&SearchKind::Delta { k: 3 }, &v));
        let mut q = SearchVerdict::new("quad", k, None, VerdictKind::Exists);
        assert!(refutes_known(&SearchKind::Quad { k: 3 }, &q));
        q.kind = VerdictKind::NotExists;
        assert!(!refutes_known(&SearchKind::Quad { k: 3 }, &q));
    }

    #[test]
    fn pretty_witness_has_one_word_per_line() {
        let (code, out, _) = run_args(&["witness", "k4_len24", "--pretty"]);
        assert_eq!(code, EXIT_PASS);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 24);
        assert_eq!((lines[0], lines[15], lines[23]), (".", "234", "1234"));
    }
}
