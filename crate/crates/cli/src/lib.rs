//! Command-line driver: census enumeration, point counts, Weil polynomial
//! queries, obstruction lists, lattice statistics and census verification.
//!
//! Exit codes: 0 success, 1 verification failure, 2 gcd precondition
//! violated, 3 malformed input, 4 I/O failure.

pub mod format;
pub mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypercensus::gf2n::check_gcd_condition;
use hypercensus::obstruct::{all_reports, generate_obstructions, report};
use hypercensus::stats::{ratio_f64, tau3, tau4, w3_class_counts, ClassCountTable};
use hypercensus::weil::is_weil_poly;
use hypercensus::zeta::{annotate, count_points_and_weierstrass, weil_from_counts};
use hypercensus::{
    enumerate_genus, is_hyperelliptic, CurveRecord, Error, Field, Mode, Poly, ResiduePattern,
    WeilPoly,
};
use rayon::prelude::*;
use thiserror::Error;

pub use format::Format;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("genus {genus} over F_{q} rejected: {source}")]
    Precondition { genus: u32, q: u64, source: Error },
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("verification failed")]
    Verification,
}

impl CliError {
    pub fn io(path: impl Into<String>, source: io::Error) -> CliError {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification => 1,
            CliError::Precondition { .. } => 2,
            CliError::Core(Error::GcdCondition { .. } | Error::NoUniqueRoot { .. }) => 2,
            CliError::Core(_) | CliError::Input(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hypercensus",
    version,
    about = "Hyperelliptic curves over GF(2^n) in characteristic 2"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One model per isomorphism class of genus-g curves over GF(2^n).
    Enumerate(EnumerateArgs),
    /// Residue patterns no hyperelliptic Jacobian can realize.
    Obstructions(ObstructionsArgs),
    /// Point counts N_1..N_K of a single model.
    Count(CountArgs),
    /// Validity, 2-rank, residue pattern and obstruction verdict of a Weil polynomial.
    Weil(WeilArgs),
    /// Lattice-point statistics.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Run the invariant suite on a census file.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Jobs {
    /// Worker threads (0 = all cores).
    #[arg(long, env = "HYPERCENSUS_JOBS", default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    /// Extension degree of GF(2^n) over GF(2).
    #[arg(long)]
    pub n: u32,
    /// Irreducible modulus as a bit-integer, overriding the Conway polynomial.
    #[arg(long)]
    pub field_poly: Option<u64>,
}

impl FieldArgs {
    fn field(&self) -> Result<Field, CliError> {
        let field = match self.field_poly {
            Some(m) => Field::with_modulus(m)?,
            None => Field::conway(self.n)?,
        };
        if field.n() != self.n {
            return Err(CliError::Input(format!(
                "field polynomial {} has degree {}, expected {}",
                field.modulus(),
                field.n(),
                self.n
            )));
        }
        Ok(field)
    }
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub genus: u32,
    #[command(flatten)]
    pub field: FieldArgs,
    /// Store N_1..N_K (at least g; 0 skips point counting).
    #[arg(long)]
    pub with_counts: Option<u32>,
    #[command(flatten)]
    pub jobs: Jobs,
    /// Output file (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Jsonl,
}

#[derive(Debug, Args)]
pub struct ObstructionsArgs {
    #[arg(long)]
    pub genus: u32,
    /// Largest extension degree used in the parity argument (default 2g).
    #[arg(long)]
    pub max_ext: Option<u32>,
    /// Also use congruences modulo higher powers of 2.
    #[arg(long)]
    pub higher_power: bool,
    /// Report open patterns too, with their witnesses.
    #[arg(long)]
    pub all: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub genus: u32,
    #[command(flatten)]
    pub field: FieldArgs,
    /// Coefficients of v, constant term first, e.g. "0,1,1".
    #[arg(long)]
    pub v: String,
    /// Coefficients of u, constant term first.
    #[arg(long)]
    pub u: String,
    /// Count over GF(q^k) for k = 1..=ext.
    #[arg(long)]
    pub ext: u32,
}

#[derive(Debug, Args)]
pub struct WeilArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub genus: u32,
    /// a_1,...,a_g.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: String,
    /// Largest extension degree for the obstruction test (default 2g).
    #[arg(long)]
    pub max_ext: Option<u32>,
    #[arg(long)]
    pub higher_power: bool,
}

#[derive(Debug, Subcommand)]
pub enum StatsCommand {
    /// Residue-class counts of genus-3 Weil lattice points at q = 2^n.
    W3(W3Args),
    /// Finite-q genus-4 obstructed share from an exhaustive scan.
    Tau4(Tau4Args),
}

#[derive(Debug, Args)]
pub struct W3Args {
    /// q = 2^n; repeat for several rows.
    #[arg(long, required = true)]
    pub n: Vec<u32>,
    /// Append the obstructed-over-ordinary columns.
    #[arg(long)]
    pub tau: bool,
    #[command(flatten)]
    pub jobs: Jobs,
}

#[derive(Debug, Args)]
pub struct Tau4Args {
    /// q = 2^n; repeat for several rows.
    #[arg(long, required = true)]
    pub n: Vec<u32>,
    #[arg(long)]
    pub higher_power: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Census file (JSONL or CSV).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Recount up to GF(q^K) (default 2g, capped by the field-size limit).
    #[arg(long)]
    pub max_ext: Option<u32>,
    #[command(flatten)]
    pub jobs: Jobs,
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 3 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match execute(&cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = out.flush();
            if !matches!(e, CliError::Verification) {
                eprintln!("error: {e}");
            }
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Enumerate(a) => cmd_enumerate(a, out),
        Command::Obstructions(a) => cmd_obstructions(a, out),
        Command::Count(a) => cmd_count(a, out),
        Command::Weil(a) => cmd_weil(a, out),
        Command::Stats(StatsCommand::W3(a)) => cmd_w3(a, out),
        Command::Stats(StatsCommand::Tau4(a)) => cmd_tau4(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

fn stdout_err(e: io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

fn pool(jobs: &Jobs) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.jobs)
        .build()
        .map_err(|e| CliError::Input(format!("cannot start {} workers: {e}", jobs.jobs)))
}

fn check_genus(genus: u32, max: u32) -> Result<(), CliError> {
    if (1..=max).contains(&genus) {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "genus must be in 1..={max}, got {genus}"
        )))
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| CliError::Input(format!("bad {what} entry {x:?} in {s:?}")))
        })
        .collect()
}

fn show<T: ToString>(xs: &[T]) -> String {
    format!(
        "[{}]",
        xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
    )
}

fn cmd_enumerate(a: &EnumerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    check_genus(a.genus, 64)?;
    let field = a.field.field()?;
    check_gcd_condition(a.genus, &field).map_err(|source| CliError::Precondition {
        genus: a.genus,
        q: field.q(),
        source,
    })?;
    let k = a.with_counts.unwrap_or(a.genus);
    let rows = pool(&a.jobs)?.install(|| -> Result<Vec<_>, CliError> {
        let mut records = enumerate_genus(a.genus, &field)?;
        if k > 0 {
            records.par_iter_mut().try_for_each(|r| annotate(r, k))?;
        }
        Ok(records.iter().map(CurveRecord::to_row).collect())
    })?;
    match &a.out {
        None => format::write_rows(&rows, a.format, out),
        Some(path) => {
            let shown = path.display().to_string();
            let file = File::create(path).map_err(|e| CliError::io(&shown, e))?;
            let mut w = BufWriter::new(file);
            format::write_rows(&rows, a.format, &mut w).map_err(|e| match e {
                CliError::Io { source, .. } => CliError::io(&shown, source),
                e => e,
            })?;
            w.flush().map_err(|e| CliError::io(&shown, e))?;
            eprintln!("wrote {} curves to {shown}", rows.len());
            Ok(())
        }
    }
}

fn mode(higher_power: bool) -> Mode {
    if higher_power {
        Mode::HigherPower
    } else {
        Mode::Basic
    }
}

fn cmd_obstructions(a: &ObstructionsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    check_genus(a.genus, 12)?;
    let kmax = a.max_ext.unwrap_or(2 * a.genus).max(1);
    for r in all_reports(a.genus, kmax, mode(a.higher_power)) {
        if !r.obstructed && !a.all {
            continue;
        }
        match a.format {
            ReportFormat::Text => writeln!(out, "{r}"),
            ReportFormat::Jsonl => writeln!(
                out,
                "{}",
                serde_json::to_string(&r).map_err(|e| CliError::Input(e.to_string()))?
            ),
        }
        .map_err(stdout_err)?;
    }
    Ok(())
}

fn cmd_count(a: &CountArgs, out: &mut dyn Write) -> Result<(), CliError> {
    check_genus(a.genus, 64)?;
    let field = a.field.field()?;
    let v = Poly::parse(&field, &a.v)?;
    let u = Poly::parse(&field, &a.u)?;
    if !is_hyperelliptic(&v, &u, a.genus) {
        return Err(CliError::Input(format!(
            "y^2 + ({v}) y = {u} is not a smooth genus-{} model",
            a.genus
        )));
    }
    if a.ext == 0 {
        return Err(CliError::Input("--ext must be at least 1".into()));
    }
    let rec = CurveRecord::new(a.genus, v, u);
    let (mut ns, mut ws) = (Vec::new(), Vec::new());
    for k in 1..=a.ext {
        let (nk, wk) = count_points_and_weierstrass(&rec, k)?;
        ns.push(nk);
        ws.push(wk);
    }
    writeln!(out, "N={}", show(&ns)).map_err(stdout_err)?;
    writeln!(out, "W={}", show(&ws)).map_err(stdout_err)?;
    if a.ext >= a.genus {
        let w = weil_from_counts(field.q(), a.genus, &ns)?;
        let w: Vec<i64> = w
            .iter()
            .map(|x| {
                i64::try_from(x).map_err(|_| CliError::Input(format!("coefficient {x} overflows")))
            })
            .collect::<Result<_, _>>()?;
        let wp = WeilPoly::new(field.q(), w);
        writeln!(out, "weil={}", show(&wp.a)).map_err(stdout_err)?;
        writeln!(out, "two_rank={}", wp.two_rank()).map_err(stdout_err)?;
    }
    Ok(())
}

fn cmd_weil(a: &WeilArgs, out: &mut dyn Write) -> Result<(), CliError> {
    check_genus(a.genus, 12)?;
    if a.q < 2 || !a.q.is_power_of_two() {
        return Err(CliError::Input(format!(
            "q must be a power of 2, got {}",
            a.q
        )));
    }
    let coeffs: Vec<i64> = parse_list(&a.coeffs, "coefficient")?;
    if coeffs.len() != a.genus as usize {
        return Err(CliError::Input(format!(
            "expected {} coefficients, got {}",
            a.genus,
            coeffs.len()
        )));
    }
    let w = WeilPoly::new(a.q, coeffs);
    let kmax = a.max_ext.unwrap_or(2 * a.genus).max(1);
    let r = report(&w.pattern(), kmax, mode(a.higher_power));
    let lines = [
        format!("weil={}", is_weil_poly(&w)),
        format!("two_rank={}", w.two_rank()),
        format!("pattern={}", w.pattern()),
        format!("verdict={r}"),
    ];
    for l in lines {
        writeln!(out, "{l}").map_err(stdout_err)?;
    }
    Ok(())
}

fn q_of(n: u32) -> Result<u64, CliError> {
    if (1..=30).contains(&n) {
        Ok(1 << n)
    } else {
        Err(CliError::Input(format!("n must be in 1..=30, got {n}")))
    }
}

fn cmd_w3(a: &W3Args, out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["q".to_string()];
    header.extend((0..8).map(|c| format!("lattice_{}", ClassCountTable::label(c))));
    header.push("lattice_total".into());
    if a.tau {
        header.extend(
            [
                "tau3_obstructed",
                "tau3_ordinary",
                "tau3_total",
                "tau3_over_ordinary",
                "tau3_over_all",
            ]
            .map(String::from),
        );
    }
    w.write_record(&header).map_err(csv_err)?;
    let pool = pool(&a.jobs)?;
    for &n in &a.n {
        let q = q_of(n)?;
        let table = pool.install(|| w3_class_counts(q))?;
        let mut rec: Vec<String> = vec![q.to_string()];
        rec.extend(table.counts.iter().map(u64::to_string));
        rec.push(table.total().to_string());
        if a.tau {
            let t = tau3(&table);
            rec.extend([
                t.obstructed.to_string(),
                t.ordinary.to_string(),
                t.total.to_string(),
                format!("{:.6}", ratio_f64(&t.over_ordinary())),
                format!("{:.6}", ratio_f64(&t.over_all())),
            ]);
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(stdout_err)
}

fn cmd_tau4(a: &Tau4Args, out: &mut dyn Write) -> Result<(), CliError> {
    let obstructions: Vec<ResiduePattern> = generate_obstructions(4, 8, mode(a.higher_power));
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "q",
        "weil_total",
        "ordinary",
        "obstructed_ordinary",
        "tau4_over_ordinary",
    ])
    .map_err(csv_err)?;
    for &n in &a.n {
        let q = q_of(n)?;
        if q > 4 {
            return Err(CliError::Input(format!(
                "the genus-4 scan supports q <= 4, got {q}"
            )));
        }
        let (ratio, pc) = tau4(q, &obstructions)?;
        let (obs_ord, ord, _, total) = pc.tau(&obstructions);
        w.write_record([
            q.to_string(),
            total.to_string(),
            ord.to_string(),
            obs_ord.to_string(),
            format!("{:.6}", ratio_f64(&ratio)),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(stdout_err)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Input(e.to_string())
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let shown = a.input.display().to_string();
    let text = std::fs::read_to_string(&a.input).map_err(|e| CliError::io(&shown, e))?;
    let format = Format::detect(&a.input, &text);
    let rows = format::read_rows(&text, format)?;
    let report = pool(&a.jobs)?.install(|| verify::verify_rows(&rows, a.max_ext));
    writeln!(out, "{report}").map_err(stdout_err)?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn capture(args: &[&str]) -> Result<String, CliError> {
        let cli = Cli::try_parse_from(std::iter::once("hypercensus").chain(args.iter().copied()))
            .map_err(|e| CliError::Input(e.to_string()))?;
        let mut buf = Vec::new();
        execute(&cli, &mut buf)?;
        Ok(String::from_utf8(buf).unwrap())
    }

    #[test]
    fn count_example() {
        let out = capture(&[
            "count",
            "--genus",
            "3",
            "--n",
            "1",
            "--v",
            "1",
            "--u",
            "0,0,0,0,0,0,0,1",
            "--ext",
            "3",
        ])
        .unwrap();
        assert_eq!(out.lines().next(), Some("N=[3,5,3]"));
        assert!(out.contains("two_rank=0"));
    }

    #[test]
    fn gcd_violation_is_exit_2() {
        let e = capture(&["enumerate", "--genus", "4", "--n", "4"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("gcd(5, 15) = 5"), "{e}");
        capture(&[
            "enumerate",
            "--genus",
            "4",
            "--n",
            "1",
            "--with-counts",
            "0",
        ])
        .unwrap();
    }

    #[test]
    fn malformed_input_is_exit_3() {
        for args in [
            &[
                "count", "--genus", "1", "--n", "1", "--v", "1,x", "--u", "1", "--ext", "1",
            ][..],
            &[
                "count", "--genus", "1", "--n", "1", "--v", "1", "--u", "0", "--ext", "1",
            ][..],
            &["weil", "--q", "3", "--genus", "1", "--coeffs", "0"][..],
            &["weil", "--q", "2", "--genus", "2", "--coeffs", "0"][..],
            &[
                "enumerate",
                "--genus",
                "1",
                "--n",
                "2",
                "--field-poly",
                "11",
            ][..],
        ] {
            assert_eq!(capture(args).unwrap_err().exit_code(), 3, "{args:?}");
        }
    }

    #[test]
    fn weil_report() {
        let out = capture(&["weil", "--q", "2", "--genus", "3", "--coeffs", "-1,1,1"]).unwrap();
        assert!(out.contains("pattern=111"));
        assert!(out.contains("two_rank=3"));
        let out = capture(&["weil", "--q", "2", "--genus", "3", "--coeffs", "0,1,1"]).unwrap();
        assert!(out.contains("verdict=011 obstructed"), "{out}");
    }

    #[test]
    fn w3_csv() {
        let out = capture(&["stats", "w3", "--n", "1", "--n", "2", "--tau"]).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("q,lattice_000,"));
        assert!(lines[1].starts_with("2,"));
        let total: u64 = lines[1].split(',').nth(9).unwrap().parse().unwrap();
        assert_eq!(total, 215);
    }
}
