//! Command-line front end: compression, decompression, regularity
//! detection, counting, extension/occurrence queries, and brute-force
//! verification, all over SLP files.
//!
//! Output is plain text, one record per line, space-separated decimals,
//! byte-identical across runs. Exit codes: 0 success, 1 domain errors
//! (bad positions, bad intervals, failed verification), 2 I/O or format
//! errors.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use slp_strings::reference_oracle::{naive_gpals, naive_lce, naive_occurrences, naive_runs};
use slp_strings::{
    all_gpals, all_runs, build_balanced_slp, compute_ap_table, count_gpals_in, count_runs_in,
    count_squares_in, expand_gpals, expand_runs, local_search, parse_slp, serialize_slp,
    substring_slp, ApTable, Interval, LceDirection, LceEngine, Ratio, Slp,
};

#[derive(Parser)]
#[command(name = "slpstr", version, about = "Regularity detection and queries on SLP-compressed strings", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum BuilderKind {
    Balanced,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountWhat {
    Runs,
    Squares,
    Gpals,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyWhat {
    Runs,
    Gpals,
    Lce,
    Occ,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an SLP from a file's raw bytes and write it out.
    Compress {
        text_file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = BuilderKind::Balanced)]
        builder: BuilderKind,
    },
    /// Write the derived string (or a 1-based inclusive range of it) to
    /// standard output as raw bytes.
    Decompress {
        slp_file: PathBuf,
        /// Range `b:e`, 1-based inclusive.
        #[arg(long)]
        range: Option<String>,
    },
    /// Grammar size, derived length, derivation-tree height.
    Stats { slp_file: PathBuf },
    /// Runs (maximal repetitions). Default prints the total count;
    /// --expand prints `b e c` per run; --quintuplets prints the compact
    /// `d1 d2 d3 c k` family blocks (variable-local coordinates).
    Runs {
        slp_file: PathBuf,
        #[arg(long, conflicts_with = "quintuplets")]
        expand: bool,
        #[arg(long)]
        quintuplets: bool,
    },
    /// Maximal gapped palindromes. Default prints the total count;
    /// --expand prints `b e` per palindrome; --groups prints the compact
    /// `b0 e0 db de k` families (variable-local coordinates).
    Gpals {
        slp_file: PathBuf,
        #[arg(long)]
        gap: u64,
        #[arg(long, conflicts_with = "groups")]
        expand: bool,
        #[arg(long)]
        groups: bool,
    },
    /// Longest common extension from positions k1 and k2.
    Lce {
        slp_file: PathBuf,
        /// rr: lcp of suffixes; ll: lcs of prefixes; lr/rl: one side read
        /// leftwards against the other read rightwards.
        #[arg(long)]
        mode: LceDirection,
        k1: u64,
        k2: u64,
    },
    /// Occurrences of a pattern (an SLP file) as `first diff count`
    /// progressions of start positions, ascending and disjoint.
    Occ {
        slp_file: PathBuf,
        #[arg(long)]
        pattern_file: PathBuf,
        /// First start position searched (default 1).
        #[arg(long)]
        from: Option<u64>,
        /// Window width as a multiple of the pattern length: an integer
        /// or a fraction `p/q`. Default: the whole text.
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Count regularities inside s[b..e] without materializing text.
    Count {
        slp_file: PathBuf,
        #[arg(long, value_enum)]
        what: CountWhat,
        /// Palindrome gap (only with --what gpals; default 0).
        #[arg(long)]
        gap: Option<u64>,
        /// Range `b:e`, 1-based inclusive.
        #[arg(long)]
        range: String,
    },
    /// Re-check compressed-side answers against brute force on the
    /// decompressed string. Prints OK or the first divergence.
    Verify {
        slp_file: PathBuf,
        #[arg(long, value_enum)]
        what: VerifyWhat,
        #[arg(long)]
        gap: Option<u64>,
        /// Refuse texts longer than this (default 1000000).
        #[arg(long)]
        limit: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Domain(String),
    Format(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Format(_) | Failure::Io(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Format(m) | Failure::Io(m) => m,
        }
    }
}

impl From<slp_strings::SlpError> for Failure {
    fn from(e: slp_strings::SlpError) -> Failure {
        Failure::Domain(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(&out).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn read_file(path: &PathBuf) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_slp(path: &PathBuf) -> Result<Slp, Failure> {
    let bytes = read_file(path)?;
    parse_slp(&bytes).map_err(|e| Failure::Format(format!("{}: {e}", path.display())))
}

/// Parses `b:e` (1-based inclusive) into an interval.
fn parse_range(text: &str) -> Result<Interval, Failure> {
    let (b, e) = text
        .split_once(':')
        .ok_or_else(|| Failure::Format(format!("range must be b:e, got {text:?}")))?;
    let b: u64 =
        b.trim().parse().map_err(|_| Failure::Format(format!("bad range start {b:?}")))?;
    let e: u64 = e.trim().parse().map_err(|_| Failure::Format(format!("bad range end {e:?}")))?;
    Interval::new(b, e).map_err(Failure::from)
}

/// Parses an integer or a fraction `p/q` with q ≥ 1.
fn parse_ratio(text: &str) -> Result<Ratio, Failure> {
    let bad = || Failure::Format(format!("alpha must be an integer or p/q, got {text:?}"));
    if let Some((p, q)) = text.split_once('/') {
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        Ok(Ratio::new(p, q))
    } else {
        let p: u64 = text.trim().parse().map_err(|_| bad())?;
        Ok(Ratio::new(p, 1))
    }
}

fn run(cmd: Cmd) -> Result<Vec<u8>, Failure> {
    let mut out = String::new();
    match cmd {
        Cmd::Compress { text_file, out: out_path, builder } => {
            let text = read_file(&text_file)?;
            let slp = match builder {
                BuilderKind::Balanced => build_balanced_slp(&text)?,
            };
            std::fs::write(&out_path, serialize_slp(&slp))
                .map_err(|e| Failure::Io(format!("{}: {e}", out_path.display())))?;
        }
        Cmd::Decompress { slp_file, range } => {
            let slp = load_slp(&slp_file)?;
            let symbols = match range {
                Some(r) => slp.decompress_range(parse_range(&r)?)?,
                None => slp.decompress(),
            };
            let mut bytes = Vec::with_capacity(symbols.len());
            for c in symbols {
                bytes.push(u8::try_from(c).map_err(|_| {
                    Failure::Domain(format!("symbol code {c} is not a byte"))
                })?);
            }
            return Ok(bytes);
        }
        Cmd::Stats { slp_file } => {
            let slp = load_slp(&slp_file)?;
            let (len, h) = slp.metrics(slp.root())?;
            writeln!(out, "n={} N={} h={}", slp.n(), len, h).unwrap();
        }
        Cmd::Runs { slp_file, expand, quintuplets } => {
            let slp = load_slp(&slp_file)?;
            let rs = all_runs(&slp);
            if expand {
                for r in rs.expand(None) {
                    writeln!(out, "{} {} {}", r.b, r.e, r.c).unwrap();
                }
            } else if quintuplets {
                let mut rows: Vec<[u128; 5]> = rs
                    .quintuplets()
                    .iter()
                    .map(|(_, q)| [q.d1 as u128, q.d2 as u128, q.d3 as u128, q.c as u128, q.k as u128])
                    .collect();
                rows.sort_unstable();
                for q in rows {
                    writeln!(out, "{} {} {} {} {}", q[0], q[1], q[2], q[3], q[4]).unwrap();
                }
            } else {
                writeln!(out, "{}", rs.count_runs()).unwrap();
            }
        }
        Cmd::Gpals { slp_file, gap, expand, groups } => {
            let slp = load_slp(&slp_file)?;
            let gp = all_gpals(&slp, gap);
            if expand {
                for p in gp.expand(None) {
                    writeln!(out, "{} {}", p.b, p.e).unwrap();
                }
            } else if groups {
                let mut rows: Vec<(u64, u64, i64, i64, u64)> = gp
                    .groups()
                    .iter()
                    .map(|(_, g)| (g.b0, g.e0, g.db, g.de, g.k))
                    .collect();
                rows.sort_unstable();
                for g in rows {
                    writeln!(out, "{} {} {} {} {}", g.0, g.1, g.2, g.3, g.4).unwrap();
                }
            } else {
                writeln!(out, "{}", gp.count()).unwrap();
            }
        }
        Cmd::Lce { slp_file, mode, k1, k2 } => {
            let slp = load_slp(&slp_file)?;
            let eng = LceEngine::new(&slp);
            writeln!(out, "{}", eng.lce(mode, k1, k2)?).unwrap();
        }
        Cmd::Occ { slp_file, pattern_file, from, alpha } => {
            let text = load_slp(&slp_file)?;
            let pattern = load_slp(&pattern_file)?;
            let n = text.text_len();
            let m = pattern.text_len();
            let b = from.unwrap_or(1);
            // Default window: wide enough to reach the last start position.
            let alpha = match alpha {
                Some(a) => parse_ratio(&a)?,
                None => Ratio::new(n / m + 1, 1),
            };
            let table = compute_ap_table(&text, &pattern);
            for ap in local_search(&text, &pattern, &table, pattern.root(), b, alpha)? {
                writeln!(out, "{} {} {}", ap.first, ap.diff, ap.count).unwrap();
            }
        }
        Cmd::Count { slp_file, what, gap, range } => {
            let slp = load_slp(&slp_file)?;
            let iv = parse_range(&range)?;
            let total = match what {
                CountWhat::Runs => count_runs_in(&slp, &all_runs(&slp), iv)?,
                CountWhat::Squares => count_squares_in(&slp, &all_runs(&slp), iv)?,
                CountWhat::Gpals => {
                    count_gpals_in(&slp, &all_gpals(&slp, gap.unwrap_or(0)), iv)?
                }
            };
            writeln!(out, "{total}").unwrap();
        }
        Cmd::Verify { slp_file, what, gap, limit, seed } => {
            let slp = load_slp(&slp_file)?;
            let limit = limit.unwrap_or(1_000_000);
            if slp.text_len() > limit {
                return Err(Failure::Domain(format!(
                    "verification refused: N={} exceeds limit {limit} (raise with --limit)",
                    slp.text_len()
                )));
            }
            match verify(&slp, what, gap.unwrap_or(0), seed) {
                None => writeln!(out, "OK").unwrap(),
                Some(divergence) => {
                    writeln!(out, "{divergence}").unwrap();
                    let mut stdout = std::io::stdout().lock();
                    let _ = stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush());
                    return Err(Failure::Domain("verification failed".into()));
                }
            }
        }
    }
    Ok(out.into_bytes())
}

/// Compares compressed-side answers with brute force on the decompressed
/// string; returns the first divergence, if any.
fn verify(slp: &Slp, what: VerifyWhat, gap: u64, seed: u64) -> Option<String> {
    let text = slp.decompress();
    let n = text.len() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match what {
        VerifyWhat::Runs => {
            let got = expand_runs(slp, None);
            let want = naive_runs(&text);
            first_diff(&got, &want, "runs", |r| format!("{} {} {}", r.b, r.e, r.c))
        }
        VerifyWhat::Gpals => {
            let got = expand_gpals(slp, gap, None);
            let want = naive_gpals(&text, gap);
            first_diff(&got, &want, "gpals", |p| format!("{} {}", p.b, p.e))
        }
        VerifyWhat::Lce => {
            let eng = LceEngine::new(slp);
            let modes =
                [LceDirection::Rr, LceDirection::Ll, LceDirection::Lr, LceDirection::Rl];
            for _ in 0..1000 {
                let mode = modes[rng.gen_range(0..4)];
                let k1 = rng.gen_range(1..=n);
                let k2 = rng.gen_range(1..=n);
                let got = eng.lce(mode, k1, k2).expect("positions are in range");
                let want = naive_lce(&text, mode, k1, k2);
                if got != want {
                    return Some(format!(
                        "MISMATCH lce mode={mode:?} k1={k1} k2={k2}: got {got} oracle {want}"
                    ));
                }
            }
            None
        }
        VerifyWhat::Occ => {
            for round in 0..200 {
                let b = rng.gen_range(1..=n);
                let e = rng.gen_range(b..=n);
                let iv = Interval::new(b, e).expect("b <= e");
                let pat_slp = substring_slp(slp, iv).expect("interval is in range");
                let table: ApTable = compute_ap_table(slp, &pat_slp);
                let alpha = Ratio::new(n / iv.len() + 1, 1);
                let aps =
                    local_search(slp, &pat_slp, &table, pat_slp.root(), 1, alpha)
                        .expect("window starts in range");
                let got: Vec<u64> = aps.iter().flat_map(|ap| ap.iter()).collect();
                let want = naive_occurrences(&text, &text[(b - 1) as usize..e as usize]);
                if got != want {
                    return Some(format!(
                        "MISMATCH occ round={round} pattern={b}:{e}: got {got:?} oracle {want:?}"
                    ));
                }
            }
            None
        }
    }
}

fn first_diff<T: PartialEq>(
    got: &[T],
    want: &[T],
    kind: &str,
    show: impl Fn(&T) -> String,
) -> Option<String> {
    if got == want {
        return None;
    }
    let i = got.iter().zip(want.iter()).take_while(|(a, b)| a == b).count();
    let g = got.get(i).map_or("end".to_string(), &show);
    let w = want.get(i).map_or("end".to_string(), &show);
    Some(format!("MISMATCH {kind}[{i}]: got {g} oracle {w}"))
}
