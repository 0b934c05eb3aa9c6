use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use qpg::db::{read_records, RecordLine};
use qpg::report::{emit_table, Filter, Format};
use qpg::search::{default_jobs, search_to_file, SearchConfig};
use qpg_core::array::{parse_array, ParameterArray};
use qpg_core::enumerate::SearchBounds;
use qpg_core::record::{run_all, FeasibilityRecord};
use qpg_core::sita::derive_sita;
use qpg_core::spectral::spectral_data;

#[derive(Parser)]
#[command(name = "qpg", version, about = "Quotient-polynomial graph parameter arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check on one array.
    Verify { array: String },
    /// Enumerate arrays within bounds into a JSON-lines file.
    Search {
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 1)]
        min_order: u64,
        #[arg(long)]
        max_order: u64,
        #[arg(long)]
        max_valency: u64,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        resume: bool,
    },
    /// Eigenmatrix enclosures for one array.
    Spectra {
        array: String,
        /// Largest enclosure width, as a decimal or a fraction.
        #[arg(long, default_value = "1/1000000")]
        width: String,
    },
    /// Render a table from a search output file.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "all")]
        filter: String,
        #[arg(long, default_value = "md")]
        format: String,
        /// Add the failed check and the cyclotomicity flag.
        #[arg(long)]
        extended: bool,
    },
}

enum Failure {
    Usage(String),
    Io(String),
}

const USAGE: u8 = 2;
const IO: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(IO)
        }
    }
}

fn parse(text: &str) -> Result<ParameterArray, Failure> {
    parse_array(text).map_err(|e| Failure::Usage(format!("{text:?}: {e}")))
}

fn out_err(e: io::Error) -> Failure {
    Failure::Io(e.to_string())
}

fn run(command: Command) -> Result<(), Failure> {
    let mut stdout = io::stdout().lock();
    match command {
        Command::Verify { array } => {
            let a = parse(&array)?;
            let r = run_all(&a);
            print_record(&mut stdout, &r).map_err(out_err)?;
        }
        Command::Search { rank, min_order, max_order, max_valency, jobs, out, resume } => {
            if rank < 2 {
                return Err(Failure::Usage(format!("rank must be at least 2, got {rank}")));
            }
            let config = SearchConfig {
                bounds: SearchBounds { rank, min_order, max_order, max_valency },
                jobs: jobs.unwrap_or_else(default_jobs),
            };
            let done = search_to_file(&config, &out, resume, |p| {
                eprintln!("shards {}/{}, survivors {}", p.shards_done, p.shards_total, p.survivors);
            })
            .map_err(|e| Failure::Io(e.to_string()))?;
            writeln!(stdout, "{} records in {}", done.survivors, out.display()).map_err(out_err)?;
        }
        Command::Spectra { array, width } => {
            let a = parse(&array)?;
            let width = parse_width(&width).ok_or_else(|| Failure::Usage(format!("bad width {width:?}")))?;
            spectra(&mut stdout, &a, &width).map_err(out_err)?;
        }
        Command::Report { input, filter, format, extended } => {
            let filter: Filter = filter.parse().map_err(|e: qpg::report::UnknownName| Failure::Usage(e.to_string()))?;
            let format: Format = format.parse().map_err(|e: qpg::report::UnknownName| Failure::Usage(e.to_string()))?;
            let file = File::open(&input).map_err(|e| Failure::Io(format!("{}: {e}", input.display())))?;
            let records =
                read_records(BufReader::new(file), false).map_err(|e| Failure::Io(format!("{}: {e}", input.display())))?;
            stdout.write_all(emit_table(&records, filter, format, extended).as_bytes()).map_err(out_err)?;
        }
    }
    Ok(())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn flag(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "pass",
        Some(false) => "fail",
        None => "not reached",
    }
}

fn print_record(w: &mut impl Write, r: &FeasibilityRecord) -> io::Result<()> {
    writeln!(w, "array                {}", r.array)?;
    if let Some(key) = r.key() {
        writeln!(w, "canonical            {key}")?;
    }
    writeln!(w, "order                {}", r.array.order())?;
    writeln!(w, "status               {}", r.status)?;
    if let Some(mu) = &r.minimal_polynomial {
        writeln!(w, "minimal polynomial   {mu}")?;
        let factors: Vec<String> = r.factors.iter().map(|g| format!("({g})")).collect();
        writeln!(w, "factors              {}", factors.join(" "))?;
    }
    writeln!(w, "handshake            {}", flag(r.handshake))?;
    writeln!(w, "multiplicities       {}", flag(r.multiplicities_exist))?;
    writeln!(w, "frame                {}", flag(r.frame_integral))?;
    writeln!(w, "disc/frame square    {}", flag(r.disc_over_frame_square))?;
    writeln!(w, "trace                {}", flag(r.trace_integral))?;
    writeln!(w, "trace standard       {}", flag(r.trace_standard))?;
    let check = |c: Option<qpg_core::spectral::Check>| c.map_or("not reached".to_string(), |c| format!("{c:?}").to_lowercase());
    writeln!(w, "orthogonality        {}", check(r.orthogonality))?;
    writeln!(w, "krein                {}", check(r.krein))?;
    writeln!(w, "absolute bound       {}", flag(r.absolute_bound))?;
    if let Some(p) = &r.profile {
        writeln!(w, "profile              {:?}", p.multiplicities)?;
        writeln!(w, "frame number         {}", p.frame_number)?;
    }
    writeln!(w, "noncyclotomic        {}", yes_no(r.noncyclotomic))?;
    writeln!(w, "p-polynomial         {}", yes_no(r.p_polynomial))?;
    writeln!(w, "polynomial in        {:?}", r.polynomial_in)?;
    writeln!(w, "copolynomial in E    {:?}", r.copolynomial_in_e)?;
    writeln!(w, "idempotent witness   {:?}", r.idempotent_witness)?;
    writeln!(w, "distance partition   {:?}", r.distance_partition)?;
    writeln!(w, "record {}", RecordLine::from_record(r).to_line())
}

fn parse_width(s: &str) -> Option<BigRational> {
    let w = if let Some((n, d)) = s.split_once('/') {
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        BigRational::new(n.trim().parse().ok()?, d)
    } else if let Some((int, frac)) = s.split_once('.') {
        let digits = frac.len() as u32;
        let whole: BigInt = format!("{int}{frac}").parse().ok()?;
        BigRational::new(whole, BigInt::from(10).pow(digits))
    } else {
        BigRational::from_integer(s.parse().ok()?)
    };
    w.is_positive().then_some(w)
}

/// `x` to `digits` decimals, rounded down or up.
fn decimal(x: &BigRational, digits: u32, up: bool) -> String {
    let scale = BigInt::from(10).pow(digits);
    let scaled = x * BigRational::from_integer(scale.clone());
    let v = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    let (q, r) = v.abs().div_rem(&scale);
    let sign = if v.sign() == Sign::Minus { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{q}");
    }
    format!("{sign}{q}.{:0>width$}", r.to_string(), width = digits as usize)
}

fn digits_for(width: &BigRational) -> u32 {
    let mut digits = 0;
    let mut w = width.clone();
    while w < BigRational::one() && digits < 60 {
        w *= BigRational::from_integer(BigInt::from(10));
        digits += 1;
    }
    digits + 1
}

fn spectra(w: &mut impl Write, a: &ParameterArray, width: &BigRational) -> io::Result<()> {
    let r = run_all(a);
    writeln!(w, "status {}", r.status)?;
    let (Ok(basis), Some(profile)) = (derive_sita(a), r.profile.as_ref()) else {
        return writeln!(w, "no multiplicity profile passes the trace test");
    };
    let mut s = spectral_data(&basis, profile);
    let d = s.d();
    let digits = digits_for(width);
    let fmt = |iv: &qpg_core::roots::Interval| {
        format!("[{}, {}]", decimal(&iv.lo, digits, false), decimal(&iv.hi, digits, true))
    };
    writeln!(w, "multiplicities {:?}", s.multiplicities())?;
    writeln!(w, "P (rows: eigenspaces, columns: relations)")?;
    for i in 0..=d {
        let row: Vec<String> = (0..=d).map(|j| fmt(&s.p_enclosure(i, j, width))).collect();
        writeln!(w, "  {i}: {}", row.join(" "))?;
    }
    writeln!(w, "Q (rows: relations, columns: eigenspaces)")?;
    for i in 0..=d {
        let row: Vec<String> = (0..=d).map(|e| fmt(&s.q_enclosure(e, i, width))).collect();
        writeln!(w, "  {i}: {}", row.join(" "))?;
    }
    Ok(())
}
