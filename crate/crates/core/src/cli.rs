//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O, 2 usage, 3 malformed container,
//! 4 parameter violation, 5 unrecoverable, 6 ambiguous, 7 verification
//! failures, 8 input that no codeword could have produced.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bits::{ceil_log2, BitString};
use crate::channel::{self, DeletionPattern, VerifyOptions};
use crate::codec::Codec;
use crate::container::{Container, Role, MAGIC};
use crate::error::Error;
use crate::params::{CodeParameters, ScaledOverrides};
use crate::sketch;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONTAINER: i32 = 3;
pub const EXIT_PARAMS: i32 = 4;
pub const EXIT_UNRECOVERABLE: i32 = 5;
pub const EXIT_AMBIGUOUS: i32 = 6;
pub const EXIT_VERIFY: i32 = 7;
pub const EXIT_INCONSISTENT: i32 = 8;

#[derive(Debug, Parser)]
#[command(name = "locdel", version, about = "Codes correcting deletions localized in a window of length k")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Window length and maximum number of deletions.
    #[arg(long)]
    k: usize,
    /// Use the paper-default parameter derivation.
    #[arg(long, conflicts_with_all = ["scaled_params", "ell"])]
    paper: bool,
    /// TOML file with scaled overrides (ell, blocks, b, block_len, syndromes).
    #[arg(long)]
    scaled_params: Option<PathBuf>,
    /// Marker length for scaled parameters.
    #[arg(long)]
    ell: Option<usize>,
}

impl ParamArgs {
    fn build(&self, n: usize) -> Result<CodeParameters, Failure> {
        if self.paper {
            return Ok(CodeParameters::paper(self.k, n)?);
        }
        let mut o = match &self.scaled_params {
            Some(path) => ScaledOverrides::from_toml(&read_text(path)?)?,
            None => ScaledOverrides::default(),
        };
        if self.ell.is_some() {
            o.ell = self.ell;
        }
        Ok(CodeParameters::scaled_with(self.k, n, &o)?)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encode a message file (raw bytes or a message container).
    Encode {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Message length in bits; defaults to the whole input.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Delete bits from a codeword inside one window.
    Corrupt {
        input: PathBuf,
        output: PathBuf,
        /// Draw a random pattern from this seed.
        #[arg(long, conflicts_with_all = ["window", "positions"])]
        seed: Option<u64>,
        /// One-based first position of the window.
        #[arg(long, requires = "positions")]
        window: Option<usize>,
        /// Comma-separated zero-based offsets inside the window.
        #[arg(long, value_delimiter = ',', requires = "window")]
        positions: Vec<usize>,
    },
    /// Decode a corrupted or clean codeword back to the message.
    Decode {
        input: PathBuf,
        output: PathBuf,
        /// Write a message container instead of raw bytes.
        #[arg(long)]
        container: bool,
    },
    /// Exhaustively decode every message and deletion pattern.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1 << 32)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        shards: u64,
        #[arg(long, default_value_t = 0)]
        shard_index: u64,
        /// Also audit locator coverage and gap-vector changes.
        #[arg(long)]
        audit: bool,
    },
    /// Print the redundancy table.
    Stats {
        #[command(flatten)]
        params: ParamArgs,
        /// `LO..HI`, each a number or `2^E`; n doubles from LO up to HI.
        #[arg(long, default_value = "2^12..2^18")]
        n_range: String,
    },
}

/// A failed command: the exit code and a message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Container(_) => EXIT_CONTAINER,
            Error::Parameters(_) => EXIT_PARAMS,
            Error::Unrecoverable => EXIT_UNRECOVERABLE,
            Error::Ambiguous(_) => EXIT_AMBIGUOUS,
            Error::Inconsistent(_) | Error::MalformedTrailer(_) => EXIT_INCONSISTENT,
            Error::Parse(_) | Error::InvalidInput(_) | Error::ScaleGuard(_) => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_fail(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_fail(path, e))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| io_fail(path, e))
}

fn write_bytes(path: &Path, data: &[u8]) -> Result<(), Failure> {
    fs::write(path, data).map_err(|e| io_fail(path, e))
}

fn read_container(path: &Path) -> Result<Container, Failure> {
    Ok(Container::from_bytes(&read_bytes(path)?)?)
}

fn codec_for(c: &Container) -> Result<Codec, Failure> {
    let p = &c.params;
    let sk = sketch::by_name(&c.sketch, p.block_len, p.syndromes, p.dense_len()).map_err(|e| Error::Container(e.to_string()))?;
    if sk.sketch_len() as u32 != c.sketch_len {
        return Err(Error::Container(format!(
            "sketch length {} does not match the recorded {}",
            sk.sketch_len(),
            c.sketch_len
        ))
        .into());
    }
    Ok(Codec::with_sketch(p, sk)?)
}

fn parse_n(s: &str) -> Result<usize, Failure> {
    let s = s.trim();
    let v = match s.strip_prefix("2^") {
        Some(e) => e
            .parse::<u32>()
            .ok()
            .and_then(|e| 1usize.checked_shl(e)),
        None => s.parse().ok(),
    };
    v.ok_or_else(|| usage(format!("bad message length {s:?}")))
}

fn parse_range(s: &str) -> Result<Vec<usize>, Failure> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| usage("range must be LO..HI"))?;
    let (lo, hi) = (parse_n(lo)?, parse_n(hi)?);
    if lo < 2 || lo > hi {
        return Err(usage("range needs 2 ≤ LO ≤ HI"));
    }
    let mut out = Vec::new();
    let mut n = lo;
    while n <= hi {
        out.push(n);
        n *= 2;
    }
    Ok(out)
}

fn cmd_encode(input: &Path, output: &Path, params: &ParamArgs, n: Option<usize>, out: &mut dyn Write) -> Result<(), Failure> {
    let raw = read_bytes(input)?;
    let mut u = if raw.starts_with(MAGIC) {
        let c = Container::from_bytes(&raw)?;
        if c.role != Role::Message {
            return Err(Error::Container("input container is not a message".into()).into());
        }
        c.payload
    } else {
        BitString::from_bytes(&raw, raw.len() * 8)?
    };
    if let Some(n) = n {
        if n > u.len() {
            return Err(usage(format!("--n {n} exceeds the {} input bits", u.len())));
        }
        u = u.slice(0..n);
    }
    let p = params.build(u.len())?;
    for w in p.warnings() {
        eprintln!("warning: {w}");
    }
    let codec = Codec::new(&p)?;
    let word = codec.encode(&u)?;
    let c = Container {
        role: Role::Codeword,
        params: p,
        sketch: codec.sketch().name().to_owned(),
        sketch_len: codec.sketch().sketch_len() as u32,
        original_len: None,
        payload: word,
    };
    write_bytes(output, &c.to_bytes()?)?;
    let l = codec.layout();
    writeln!(out, "n={} N={} redundancy={}", l.n, l.total(), l.redundancy()).ok();
    Ok(())
}

fn cmd_corrupt(
    input: &Path,
    output: &Path,
    seed: Option<u64>,
    window: Option<usize>,
    offsets: &[usize],
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let c = read_container(input)?;
    if c.role != Role::Codeword {
        return Err(Error::Container("input container is not a codeword".into()).into());
    }
    let k = c.params.k;
    let x = &c.payload;
    let pattern = match (seed, window) {
        (Some(seed), _) => channel::sample(x, k, seed)?.1,
        (None, Some(w)) => {
            if w == 0 {
                return Err(usage("--window is one-based"));
            }
            let mut pos: Vec<usize> = offsets.iter().map(|o| w + o).collect();
            pos.sort_unstable();
            pos.dedup();
            DeletionPattern::new(pos, k)?
        }
        (None, None) => return Err(usage("give --seed or --window with --positions")),
    };
    let y = pattern.apply(x)?;
    let pos: Vec<String> = pattern.positions().iter().map(|p| p.to_string()).collect();
    let corrupted = Container {
        role: Role::Corrupted,
        original_len: Some(x.len() as u64),
        payload: y,
        ..c
    };
    write_bytes(output, &corrupted.to_bytes()?)?;
    writeln!(out, "deleted={}", pos.join(",")).ok();
    Ok(())
}

fn cmd_decode(input: &Path, output: &Path, as_container: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let c = read_container(input)?;
    let codec = codec_for(&c)?;
    let total = codec.layout().total() as u64;
    match (c.role, c.original_len) {
        (Role::Codeword, _) => {}
        (Role::Corrupted, Some(n)) if n == total => {}
        (Role::Corrupted, _) => {
            return Err(Error::Container(format!("recorded codeword length does not match the parameters ({total})")).into())
        }
        (Role::Message, _) => return Err(Error::Container("input container is a message".into()).into()),
    }
    let (u, trace) = codec.decode_traced(&c.payload)?;
    let interval = trace.locate.map_or(0, |l| l.interval.len());
    let bytes = if as_container {
        Container {
            role: Role::Message,
            original_len: None,
            payload: u,
            ..c
        }
        .to_bytes()?
    } else {
        u.to_bytes()
    };
    write_bytes(output, &bytes)?;
    writeln!(out, "k'={} branch={} interval={interval}", trace.k_prime, trace.branch).ok();
    Ok(())
}

fn cmd_verify(params: &ParamArgs, n: usize, opts: VerifyOptions, out: &mut dyn Write) -> Result<i32, Failure> {
    let p = params.build(n)?;
    let codec = Codec::new(&p)?;
    let report = channel::verify_exhaustive(&codec, &opts)?;
    write!(out, "{}", report.summary()).ok();
    if opts.audit {
        let a = &report.audit;
        writeln!(
            out,
            "located\t{}\ncoverage_misses\t{}\nmax_f_spread\t{}\nmax_y_gap\t{}\nmax_count_change\t{}\nmax_replacement\t{}",
            a.located, a.coverage_misses, a.max_f_spread, a.max_y_gap, a.max_count_change, a.max_replacement
        )
        .ok();
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY })
}

/// One row of the redundancy table.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub n: usize,
    pub total: usize,
    pub redundancy: usize,
    pub log_n: u32,
    pub dense: usize,
    pub buffer: usize,
    pub locator: usize,
    pub corrector: usize,
    /// `k·log²(k·log n)`, the growth shape of the redundancy beyond `log n`.
    pub shape: f64,
}

pub fn stats_rows(params: &CodeParameters, ns: &[usize]) -> crate::Result<Vec<StatsRow>> {
    ns.iter()
        .map(|&n| {
            let p = params.rescaled(n)?;
            let l = Codec::new(&p)?.layout();
            let log_n = ceil_log2(n as u64);
            let kl = (p.k as f64 * (n as f64).log2()).log2();
            Ok(StatsRow {
                n,
                total: l.total(),
                redundancy: l.redundancy(),
                log_n,
                dense: l.dense_overhead(),
                buffer: l.buffer_len,
                locator: l.loc_len,
                corrector: l.cor_len,
                shape: p.k as f64 * kl * kl,
            })
        })
        .collect()
}

fn cmd_stats(params: &ParamArgs, range: &str, out: &mut dyn Write) -> Result<(), Failure> {
    let ns = parse_range(range)?;
    let base = params.build(ns[0])?;
    let rows = stats_rows(&base, &ns)?;
    writeln!(out, "n\tN\tN-n\tlog_n\tdense\tbuffer\tlocator\tcorrector\tk_log2_sq").ok();
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.2}",
            r.n, r.total, r.redundancy, r.log_n, r.dense, r.buffer, r.locator, r.corrector, r.shape
        )
        .ok();
    }
    Ok(())
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Encode { input, output, params, n } => cmd_encode(&input, &output, &params, n, out).map(|_| EXIT_OK),
        Command::Corrupt {
            input,
            output,
            seed,
            window,
            positions,
        } => cmd_corrupt(&input, &output, seed, window, &positions, out).map(|_| EXIT_OK),
        Command::Decode { input, output, container } => cmd_decode(&input, &output, container, out).map(|_| EXIT_OK),
        Command::Verify {
            params,
            n,
            budget,
            shards,
            shard_index,
            audit,
        } => cmd_verify(
            &params,
            n,
            VerifyOptions {
                shards,
                shard_index,
                budget,
                max_deletions: None,
                audit,
            },
            out,
        ),
        Command::Stats { params, n_range } => cmd_stats(&params, &n_range, out).map(|_| EXIT_OK),
    }
}

/// Runs the tool on `args` and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
