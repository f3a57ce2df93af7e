//! The `procscope` command line.
//!
//! Exit codes: 0 success or identical, 1 ambiguous or different, 2 data
//! error (parse, schema, digest, bad arguments), 3 I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};

use crate::emul::FpConfig;
use crate::fingerprint::{
    decode_pattern, diff, match_fingerprint, published_rows, synthetic_entry, Fingerprint, SignatureDb, SHIPPED_DB,
};
use crate::fphash::{fp_hash, FpHashParams, DEFAULT_R, DEFAULT_ROUNDS_PER_BYTE};
use crate::probes::{render_decimal, run_battery, Backend, BatteryOptions, Payload, TimingOutcome};

pub const DB_ENV: &str = "PROCSCOPE_DB";

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIFFERENT: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable tables.
    Text,
    /// Exactly the fingerprint (or database) file format.
    Fp,
}

#[derive(Debug, Parser)]
#[command(name = "procscope", version, about = "Floating-point environment fingerprinting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the probe battery and write a fingerprint.
    Run {
        /// native64, native32, or an emulator config such as sig24exp8-ne.
        #[arg(long, short, default_value = "native64")]
        backend: String,
        /// Fingerprint output file.
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Skip the popcount timing probe.
        #[arg(long)]
        no_timing: bool,
        #[arg(long, default_value_t = crate::probes::timing::MIN_ITERATIONS)]
        timing_iterations: u64,
        /// Record the creation time (never part of the digest).
        #[arg(long)]
        timestamp: bool,
    },
    /// Classify a fingerprint against a signature database.
    Match {
        fingerprint: PathBuf,
        /// Signature database; defaults to $PROCSCOPE_DB, then the built-in one.
        #[arg(long)]
        db: Option<PathBuf>,
    },
    /// Compare two fingerprints probe by probe.
    Diff { left: PathBuf, right: PathBuf },
    /// Environment-sensitive hash of a file or stdin.
    Hash {
        /// Input file; `-` or absent reads stdin.
        input: Option<PathBuf>,
        #[arg(long, short, default_value = "native64")]
        backend: String,
        /// Also hash under this backend and compare.
        #[arg(long)]
        compare: Option<String>,
        #[arg(long, default_value_t = DEFAULT_R)]
        r: f64,
        #[arg(long, default_value_t = DEFAULT_ROUNDS_PER_BYTE)]
        rounds: u32,
    },
    /// Run the battery under emulator configs and write a synthetic database.
    EmulateSweep {
        /// Comma-separated emulator configs.
        #[arg(long, value_delimiter = ',', default_value = "binary32,binary64,sig64exp15-ne")]
        configs: Vec<String>,
        /// Prepend the published per-processor rows.
        #[arg(long)]
        with_published_rows: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Data(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Self::Data(_) => EXIT_DATA,
            Self::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Data(m) | Self::Io(m) => m,
        }
    }
}

fn data(e: impl ToString) -> Failure {
    Failure::Data(e.to_string())
}

fn io_err(path: &Path, e: io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    String::from_utf8(bytes).map_err(|_| Failure::Data(format!("{}: not UTF-8", path.display())))
}

/// Writes via a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn load_fp(path: &Path) -> Result<Fingerprint, Failure> {
    let text = read_text(path)?;
    Fingerprint::parse(&text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn load_db(explicit: Option<&Path>) -> Result<(SignatureDb, String), Failure> {
    let path = explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(DB_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
    match path {
        Some(p) => {
            let text = read_text(&p)?;
            let db = SignatureDb::parse(&text).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))?;
            Ok((db, p.display().to_string()))
        }
        None => Ok((SignatureDb::parse(SHIPPED_DB).map_err(data)?, "built-in".into())),
    }
}

fn parse_backend(s: &str) -> Result<Backend, Failure> {
    s.parse().map_err(|e| Failure::Data(format!("backend {s:?}: {e}")))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "Yes"
    } else {
        "No"
    }
}

fn cell(p: Option<&Payload>, backend: Option<&Backend>) -> String {
    match p {
        Some(Payload::Bits(b) | Payload::Residual(b)) => match decode_pattern(b, backend) {
            Some(x) => format!("{} [{}]", render_decimal(x, 6), b),
            None => b.to_string(),
        },
        Some(Payload::ResidualPair(a, b)) => {
            let d = |q| {
                decode_pattern(q, backend)
                    .map(|x| render_decimal(x, 6))
                    .unwrap_or_default()
            };
            format!("{} [{}], {} [{}]", d(a), a, d(b), b)
        }
        Some(Payload::Error(m)) => format!("error: {m}"),
        Some(other) => other.canonical_value(),
        None => "-".into(),
    }
}

/// Human summary, grouped like the usual per-processor result tables.
pub fn summary(fp: &Fingerprint) -> String {
    let backend = fp.backend_spec();
    let b = backend.as_ref();
    let mut out = format!("backend {}\n\n", fp.backend);
    if let Some(Payload::Bool(v)) = fp.get("sqrt-identity") {
        out.push_str(&format!("sqrt(2)*sqrt(2) == 2          {}\n", yes_no(*v)));
    }
    if let Some(Payload::IntPair {
        first,
        second,
        anomalous,
    }) = fp.get("gentleman")
    {
        out.push_str(&format!(
            "significand bits, radix       {first}, {second}{}\n",
            if *anomalous { " (anomalous)" } else { "" }
        ));
    }
    if let Some(Payload::Bools(v)) = fp.get("easy-computations") {
        out.push_str("\n1.2-0.8 == 0.4  0.1+0.1 == 0.2  0.1+0.1+0.1 == 0.3  0.1+...+0.1 == 1.0\n");
        let c: Vec<&str> = v.iter().map(|&x| yes_no(x)).collect();
        if c.len() == 4 {
            out.push_str(&format!("{:<15}  {:<14}  {:<18}  {}\n", c[0], c[1], c[2], c[3]));
        }
    }
    out.push_str("\nsin(10^k * pi_i)\n");
    for k in crate::probes::SIN_EXPONENTS {
        for i in 1..=4 {
            let id = format!("sin-k{k}-pi{i}");
            out.push_str(&format!("  {id:<14} {}\n", cell(fp.get(&id), b)));
        }
    }
    out.push_str("\nresiduals\n");
    for r in fp.canonical_results().filter(|r| {
        r.probe_id.starts_with("rump") || r.probe_id.starts_with("sum-residual") || r.probe_id.starts_with("logistic")
    }) {
        out.push_str(&format!("  {:<17} {}\n", r.probe_id, cell(Some(&r.payload), b)));
    }
    match fp.get("popcount-timing") {
        Some(Payload::Timing(TimingOutcome::Measured(t))) => out.push_str(&format!(
            "\npopcount timing ({}): software {:.0} ns (iqr {:.0}), {} {:.0} ns (iqr {:.0}), ratio {:.2}\n",
            t.iterations,
            t.software_median_ns,
            t.software_iqr_ns,
            t.hardware_method,
            t.hardware_median_ns,
            t.hardware_iqr_ns,
            t.ratio
        )),
        Some(Payload::Timing(TimingOutcome::Unsupported)) => out.push_str("\npopcount timing unsupported\n"),
        _ => {}
    }
    out.push_str(&format!("\ndigest {}\n", fp.digest()));
    out
}

fn cmd_run(
    backend: &str,
    output: Option<&Path>,
    format: Format,
    timing: bool,
    timing_iterations: u64,
    timestamp: bool,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let backend = parse_backend(backend)?;
    if let Some(p) = output {
        let dir = p
            .parent()
            .filter(|d| !d.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        if !dir.is_dir() {
            return Err(Failure::Io(format!("{}: directory does not exist", dir.display())));
        }
    }
    let opts = BatteryOptions {
        include_timing: timing && !matches!(backend, Backend::Emulated(_)),
        timing_iterations,
        ..BatteryOptions::default()
    };
    let mut fp = Fingerprint::assemble(&backend, run_battery(&backend, &opts)).map_err(data)?;
    if timestamp {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        fp = fp.with_created(now);
    }
    let text = fp.serialize();
    if let Some(p) = output {
        write_atomic(p, &text).map_err(|e| io_err(p, e))?;
    }
    let shown = match format {
        Format::Fp => text,
        Format::Text => summary(&fp),
    };
    out.write_all(shown.as_bytes())
        .map_err(|e| Failure::Io(e.to_string()))?;
    Ok(EXIT_OK)
}

fn cmd_match(fp_path: &Path, db_path: Option<&Path>, out: &mut dyn Write) -> Result<i32, Failure> {
    let fp = load_fp(fp_path)?;
    let (db, source) = load_db(db_path)?;
    let report = match_fingerprint(&fp, &db).map_err(data)?;
    writeln!(
        out,
        "fingerprint {} ({})\ndatabase {source}\n\n{report}",
        fp_path.display(),
        fp.backend
    )
    .map_err(|e| Failure::Io(e.to_string()))?;
    Ok(if report.is_ambiguous() { EXIT_DIFFERENT } else { EXIT_OK })
}

fn cmd_diff(a: &Path, b: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let fa = load_fp(a)?;
    let fb = load_fp(b)?;
    let rows = diff(&fa, &fb);
    let mut text = format!(
        "left  {} ({})\nright {} ({})\n\n",
        a.display(),
        fa.backend,
        b.display(),
        fb.backend
    );
    let mut n = 0;
    for r in &rows {
        let mark = if r.differs() {
            n += 1;
            "*"
        } else {
            " "
        };
        text.push_str(&format!("{mark} {:<17} {:<40} {}\n", r.probe_id, r.left, r.right));
    }
    text.push_str(&format!("\n{n} difference(s)\n"));
    out.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string()))?;
    Ok(if n == 0 && fa.backend == fb.backend {
        EXIT_OK
    } else {
        EXIT_DIFFERENT
    })
}

fn cmd_hash(
    input: Option<&Path>,
    backend: &str,
    compare: Option<&str>,
    r: f64,
    rounds: u32,
    stdin: &mut dyn Read,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let params = |b: &str| -> Result<FpHashParams, Failure> {
        let p = FpHashParams {
            r,
            rounds_per_byte: rounds,
            ..FpHashParams::new(parse_backend(b)?)
        };
        p.validate().map_err(data)?;
        Ok(p)
    };
    let pa = params(backend)?;
    let pb = compare.map(params).transpose()?;
    let msg = match input {
        Some(p) if p != Path::new("-") => fs::read(p).map_err(|e| io_err(p, e))?,
        _ => {
            let mut v = Vec::new();
            stdin
                .read_to_end(&mut v)
                .map_err(|e| Failure::Io(format!("stdin: {e}")))?;
            v
        }
    };
    let da = fp_hash(&msg, &pa).map_err(data)?;
    let w = |out: &mut dyn Write, s: String| out.write_all(s.as_bytes()).map_err(|e| Failure::Io(e.to_string()));
    match pb {
        None => w(out, format!("{da}\n"))?,
        Some(pb) => {
            let db = fp_hash(&msg, &pb).map_err(data)?;
            w(
                out,
                format!(
                    "{da}  {}\n{db}  {}\nhamming {} of {} bits: {}\n",
                    pa.backend,
                    pb.backend,
                    da.hamming(&db),
                    da.bits(),
                    if da == db { "same" } else { "different" }
                ),
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(
    configs: &[String],
    with_published: bool,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let cfgs = configs
        .iter()
        .map(|c| {
            c.parse::<FpConfig>()
                .map_err(|e| Failure::Data(format!("config {c:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut entries = if with_published { published_rows() } else { Vec::new() };
    entries.extend(cfgs.iter().map(synthetic_entry));
    let text = SignatureDb::new(entries).map_err(data)?.serialize();
    match output {
        Some(p) => write_atomic(p, &text).map_err(|e| io_err(p, e))?,
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string()))?,
    }
    Ok(EXIT_OK)
}

/// Runs the CLI on explicit arguments and streams; returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_DATA } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run {
            backend,
            output,
            format,
            no_timing,
            timing_iterations,
            timestamp,
        } => cmd_run(
            backend,
            output.as_deref(),
            *format,
            !no_timing,
            *timing_iterations,
            *timestamp,
            out,
        ),
        Command::Match { fingerprint, db } => cmd_match(fingerprint, db.as_deref(), out),
        Command::Diff { left, right } => cmd_diff(left, right, out),
        Command::Hash {
            input,
            backend,
            compare,
            r,
            rounds,
        } => cmd_hash(input.as_deref(), backend, compare.as_deref(), *r, *rounds, stdin, out),
        Command::EmulateSweep {
            configs,
            with_published_rows,
            output,
        } => cmd_sweep(configs, *with_published_rows, output.as_deref(), out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "procscope: {}", f.message());
            f.code()
        }
    }
}

pub fn main() -> i32 {
    run(
        std::env::args_os(),
        &mut io::stdin().lock(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("procscope").chain(args.iter().copied()),
            &mut io::empty(),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn run_writes_fingerprint_atomically() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("fp.txt");
        let (code, out, _) = call(&["run", "--no-timing", "-o", p.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.contains("significand bits, radix       53, 2"));
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.lines().last().unwrap().starts_with("digest="));

        let missing = dir.path().join("no/such/dir/fp.txt");
        let (code, _, err) = call(&["run", "--no-timing", "-o", missing.to_str().unwrap()]);
        assert_eq!(code, 3, "{err}");
        assert!(!missing.exists());
    }

    #[test]
    fn bad_arguments_are_data_errors() {
        assert_eq!(call(&["run", "--backend", "sig99exp3"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn hash_of_empty_stdin() {
        let (code, out, _) = call(&["hash"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim().len(), 64);
        let (_, cmp, _) = call(&["hash", "--backend", "binary64", "--compare", "binary32"]);
        assert!(cmp.contains("different"));
    }
}
