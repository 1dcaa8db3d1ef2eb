//! The `rectwave` command-line driver.
//!
//! Exit codes: `0` success, `1` usage or configuration error, `2` I/O or
//! file-format error, `3` numeric or validation failure.
//!
//! Image arguments are PGM paths or synthetic specs:
//! `synth:<function>:<n>` (raw samples of a [`TestFunction`]),
//! `synth:fixture:<n>` (the 8-bit axis-edges fixture) and
//! `synth:noise:<n>` (uniform 8-bit noise drawn from `--seed`).

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::approx::{
    budget_for_ratio, compress_decomposition, compress_report, CompressionReport, SelectionStrategy,
};
use crate::dwt1d::BoundaryMode;
use crate::error::Error;
use crate::filterbank::{
    builtin, discrete_vanishing_moments, load_filter_spec, primal_vanishing_moments,
    validate_biorthogonality, FilterBank, BUILTIN_TOL, MOMENT_TOL,
};
use crate::imageio::{
    axis_edges_fixture, dump_coeffs, read_pgm_file, render_composite, write_pgm_file,
};
use crate::ratelab::{
    check_budgets, default_fit_range, dyadic_budgets, fit_loglog_slope, rate_curve,
    sample_function, RateCurve, TestFunction,
};
use crate::transform2d::{
    energy_distribution, square_forward, CoeffContainer, Decomposition, Image, Levels,
    TransformKind, DEFAULT_MAX_LEVELS,
};

/// Process exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Pgm(_) | Error::Dump(_) => 2,
        Error::Validation { .. }
        | Error::MomentMismatch { .. }
        | Error::Numeric(_)
        | Error::LengthMismatch { .. }
        | Error::Malformed(_)
        | Error::DimensionMismatch(_) => 3,
        _ => 1,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "rectwave",
    version,
    about = "Square and rectangular wavelet image transforms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the composite coefficient view and a binary coefficient dump.
    Decompose(DecomposeArgs),
    /// Keep N coefficients, reconstruct, and report the error.
    Compress(CompressArgs),
    /// Compress with both transforms at several ratios and banks.
    Compare(CompareArgs),
    /// Per-level edge/cross energies of the square transform.
    Energy(EnergyArgs),
    /// N-term error curves and log-log slopes.
    Rate(RateArgs),
    /// Check perfect reconstruction and vanishing moments of a bank.
    ValidateFilter(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PadMode {
    Reflect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyKind {
    Topn,
    Theorem,
}

#[derive(Debug, Args)]
pub struct BankArgs {
    /// Built-in bank: haar, d4 or crf137.
    #[arg(long)]
    pub bank: Option<String>,
    /// Filter-spec file; overrides --bank.
    #[arg(long)]
    pub filter_spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// PGM path or synth:<function|fixture|noise>:<n>.
    pub input: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Pad non-dyadic inputs and crop after reconstruction.
    #[arg(long)]
    pub pad: Option<PadMode>,
}

#[derive(Debug, Args)]
pub struct LayoutArgs {
    /// J, or Jx,Jy for the rectangular transform.
    #[arg(long)]
    pub levels: Option<Levels>,
    #[arg(long, default_value = "periodic")]
    pub boundary: BoundaryMode,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub bank: BankArgs,
    #[command(flatten)]
    pub layout: LayoutArgs,
    #[arg(long, default_value = "rect")]
    pub transform: TransformKind,
    /// Composite PGM.
    #[arg(long)]
    pub out: PathBuf,
    /// Coefficient dump; defaults to the composite path with a .coeffs extension.
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub bank: BankArgs,
    #[command(flatten)]
    pub layout: LayoutArgs,
    #[arg(long, default_value = "rect")]
    pub transform: TransformKind,
    /// Compression ratio R; keeps round(total / R) coefficients.
    #[arg(long, conflicts_with = "keep_n", required_unless_present = "keep_n")]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub keep_n: Option<usize>,
    #[arg(long, value_enum, default_value_t = StrategyKind::Topn)]
    pub strategy: StrategyKind,
    /// Mixed-derivative order for the theorem strategy.
    #[arg(long = "M", default_value_t = 1)]
    pub m: u32,
    /// Norm exponent for the theorem strategy.
    #[arg(long = "p", default_value_t = 2.0)]
    pub p: f64,
    /// Reconstructed PGM.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Append the report row to this CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub layout: LayoutArgs,
    #[arg(long, value_delimiter = ',', default_value = "d4,crf137")]
    pub banks: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "80,160")]
    pub ratios: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "square,rect")]
    pub transforms: Vec<TransformKind>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub bank: BankArgs,
    #[command(flatten)]
    pub layout: LayoutArgs,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    /// Image; defaults to synth:tensor_smooth:256.
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub bank: BankArgs,
    #[arg(long)]
    pub levels: Option<Levels>,
    #[arg(long, value_delimiter = ',', default_value = "square,rect")]
    pub transforms: Vec<TransformKind>,
    /// Kept counts, strictly increasing; defaults to 2^8..2^14.
    #[arg(long, value_delimiter = ',')]
    pub budgets: Vec<usize>,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    /// Refit slopes of an existing curve CSV instead of computing curves.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub bank: BankArgs,
    #[arg(long, default_value_t = BUILTIN_TOL)]
    pub tol: f64,
}

type CmdResult = Result<(), Error>;

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let res = match &cli.command {
        Command::Decompose(a) => cmd_decompose(a, out),
        Command::Compress(a) => cmd_compress(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::Energy(a) => cmd_energy(a, out),
        Command::Rate(a) => cmd_rate(a, out),
        Command::ValidateFilter(a) => cmd_validate_filter(a, out),
    };
    match res {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn resolve_bank(args: &BankArgs, default: &str) -> Result<FilterBank, Error> {
    match &args.filter_spec {
        Some(path) => load_filter_spec(&std::fs::read_to_string(path)?),
        None => builtin(args.bank.as_deref().unwrap_or(default)),
    }
}

/// Loads a PGM path or a `synth:` spec.
pub fn load_input(spec: &str, seed: u64) -> Result<Image, Error> {
    let Some(rest) = spec.strip_prefix("synth:") else {
        return read_pgm_file(spec);
    };
    let (tag, n) = rest
        .rsplit_once(':')
        .ok_or_else(|| Error::Config(format!("bad synthetic input `{spec}`")))?;
    let n: usize = n
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("bad size in `{spec}`")))?;
    Ok(match tag {
        "fixture" => axis_edges_fixture(n),
        "noise" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Image::from_fn(n, n, |_, _| rng.gen_range(0..=255u32) as f64)
        }
        f => sample_function(f.parse::<TestFunction>()?, n),
    })
}

/// An input image brought to a size the transform accepts.
struct Prepared {
    original: Image,
    work: Image,
    levels: Levels,
}

impl Prepared {
    fn new(img: Image, levels: Option<Levels>, pad: Option<PadMode>) -> Self {
        match pad {
            None => {
                let levels = levels.unwrap_or_else(|| Levels::default_for(img.rows(), img.cols()));
                Self {
                    work: img.clone(),
                    original: img,
                    levels,
                }
            }
            Some(PadMode::Reflect) => {
                let levels = levels.unwrap_or(Levels::uniform(DEFAULT_MAX_LEVELS));
                let up = |n: usize, j: usize| n.div_ceil(1 << j) << j;
                let work = img.pad_reflect(up(img.rows(), levels.y), up(img.cols(), levels.x));
                Self {
                    original: img,
                    work,
                    levels,
                }
            }
        }
    }

    fn crop(&self, img: &Image) -> Image {
        img.crop(0, 0, self.original.rows(), self.original.cols())
    }
}

fn compress_one(
    prep: &Prepared,
    dec: &Decomposition,
    fb: &FilterBank,
    strategy: &SelectionStrategy,
) -> Result<(Image, CompressionReport), Error> {
    let c = compress_decomposition(&prep.work, dec, fb, strategy)?;
    let recon = prep.crop(&c.reconstructed);
    let mut report = compress_report(&prep.original, &recon, c.selection.kept, c.selection.total)?;
    report.bank = c.report.bank;
    report.transform = c.report.transform;
    report.strategy = c.report.strategy;
    Ok((recon, report))
}

/// Appends to `path`, writing `header` first only when the file is new or empty.
fn append_csv(path: &Path, header: &str, body: &str) -> CmdResult {
    let fresh = std::fs::metadata(path)
        .map(|m| m.len() == 0)
        .unwrap_or(true);
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(f, "{header}")?;
    }
    f.write_all(body.as_bytes())?;
    Ok(())
}

fn csv_label(s: &str) -> String {
    s.replace([',', '\n'], "_")
}

fn cmd_decompose(a: &DecomposeArgs, out: &mut dyn Write) -> CmdResult {
    let fb = resolve_bank(&a.bank, "crf137")?;
    let prep = Prepared::new(
        load_input(&a.input.input, a.input.seed)?,
        a.layout.levels,
        a.input.pad,
    );
    let dec = Decomposition::forward(&prep.work, &fb, a.transform, prep.levels, a.layout.boundary)?;
    write_pgm_file(&a.out, &render_composite(&dec))?;
    let coeffs = a
        .coeffs
        .clone()
        .unwrap_or_else(|| a.out.with_extension("coeffs"));
    std::fs::write(&coeffs, dump_coeffs(&dec)?)?;
    writeln!(
        out,
        "{} {} {}x{} levels={} -> {} {}",
        a.transform,
        fb.name,
        dec.rows(),
        dec.cols(),
        dec.levels(),
        a.out.display(),
        coeffs.display()
    )?;
    Ok(())
}

fn cmd_compress(a: &CompressArgs, out: &mut dyn Write) -> CmdResult {
    let fb = resolve_bank(&a.bank, "crf137")?;
    let prep = Prepared::new(
        load_input(&a.input.input, a.input.seed)?,
        a.layout.levels,
        a.input.pad,
    );
    let total = prep.work.len();
    let n = match (a.keep_n, a.ratio) {
        (Some(n), _) => n,
        (None, Some(r)) => budget_for_ratio(total, r)?,
        (None, None) => unreachable!("clap requires one of --ratio/--keep-n"),
    };
    let strategy = match a.strategy {
        StrategyKind::Topn => SelectionStrategy::TopN { n },
        StrategyKind::Theorem => SelectionStrategy::TheoremThreshold {
            m: a.m,
            p: a.p,
            budget: n,
        },
    };
    let dec = Decomposition::forward(&prep.work, &fb, a.transform, prep.levels, a.layout.boundary)?;
    let (recon, report) = compress_one(&prep, &dec, &fb, &strategy)?;
    let report = CompressionReport {
        image: csv_label(&a.input.input),
        ..report
    };
    if let Some(path) = &a.out {
        write_pgm_file(path, &recon)?;
    }
    let row = format!("{}\n", report.to_csv_row());
    if let Some(path) = &a.csv {
        append_csv(path, CompressionReport::csv_header(), &row)?;
    }
    write!(out, "{}\n{}", CompressionReport::csv_header(), row)?;
    Ok(())
}

fn cmd_compare(a: &CompareArgs, out: &mut dyn Write) -> CmdResult {
    let prep = Prepared::new(
        load_input(&a.input.input, a.input.seed)?,
        a.layout.levels,
        a.input.pad,
    );
    let banks = a
        .banks
        .iter()
        .map(|b| builtin(b))
        .collect::<Result<Vec<_>, _>>()?;
    let total = prep.work.len();
    let mut runs = Vec::new();
    for (bi, _) in banks.iter().enumerate() {
        for &r in &a.ratios {
            let n = budget_for_ratio(total, r)?;
            for &t in &a.transforms {
                runs.push((bi, n, t));
            }
        }
    }
    // one decomposition per (bank, transform), shared across ratios
    let decs = banks
        .par_iter()
        .flat_map_iter(|fb| a.transforms.iter().map(move |&t| (fb, t)))
        .map(|(fb, t)| Decomposition::forward(&prep.work, fb, t, prep.levels, a.layout.boundary))
        .collect::<Result<Vec<_>, _>>()?;
    let label = csv_label(&a.input.input);
    let rows = runs
        .par_iter()
        .map(|&(bi, n, t)| {
            let ti = a.transforms.iter().position(|&x| x == t).unwrap();
            let dec = &decs[bi * a.transforms.len() + ti];
            let (_, r) = compress_one(&prep, dec, &banks[bi], &SelectionStrategy::TopN { n })?;
            Ok(format!(
                "{}\n",
                CompressionReport {
                    image: label.clone(),
                    ..r
                }
                .to_csv_row()
            ))
        })
        .collect::<Result<Vec<String>, Error>>()?;
    let body: String = rows.concat();
    if let Some(path) = &a.csv {
        append_csv(path, CompressionReport::csv_header(), &body)?;
    }
    write!(out, "{}\n{}", CompressionReport::csv_header(), body)?;
    Ok(())
}

fn cmd_energy(a: &EnergyArgs, out: &mut dyn Write) -> CmdResult {
    let fb = resolve_bank(&a.bank, "d4")?;
    let prep = Prepared::new(
        load_input(&a.input.input, a.input.seed)?,
        a.layout.levels,
        a.input.pad,
    );
    if prep.levels.x != prep.levels.y {
        return Err(Error::Config(
            "energy uses the square transform: give a single J".into(),
        ));
    }
    let pyr = square_forward(&prep.work, &fb, prep.levels.x, a.layout.boundary)?;
    let table = energy_distribution(&pyr).to_csv();
    if let Some(path) = &a.csv {
        let body = table.split_once('\n').map(|x| x.1).unwrap_or("");
        append_csv(path, crate::transform2d::EnergyTable::csv_header(), body)?;
    }
    write!(out, "{table}")?;
    Ok(())
}

fn slope_line(c: &RateCurve) -> String {
    match fit_loglog_slope(c, default_fit_range(c.points.len())) {
        Ok(s) => format!(
            "# slope transform={} bank={} q={} value={:.6}\n",
            c.transform, c.bank, c.q, s
        ),
        Err(e) => format!(
            "# slope transform={} bank={} unavailable: {e}\n",
            c.transform, c.bank
        ),
    }
}

fn cmd_rate(a: &RateArgs, out: &mut dyn Write) -> CmdResult {
    if let Some(path) = &a.curve {
        let curves = RateCurve::parse_csv(&std::fs::read_to_string(path)?, a.q)?;
        if curves.is_empty() {
            return Err(Error::Numeric("curve file holds no points".into()));
        }
        for c in &curves {
            let s = fit_loglog_slope(c, default_fit_range(c.points.len()))?;
            writeln!(out, "{} {} slope {:.9}", c.transform, c.bank, s)?;
        }
        return Ok(());
    }
    let fb = resolve_bank(&a.bank, "haar")?;
    let img = load_input(
        a.input.as_deref().unwrap_or("synth:tensor_smooth:256"),
        a.seed,
    )?;
    let budgets = if a.budgets.is_empty() {
        dyadic_budgets(8, 14)
    } else {
        a.budgets.clone()
    };
    check_budgets(&budgets, img.len())?;
    let levels = a
        .levels
        .unwrap_or_else(|| Levels::default_for(img.rows(), img.cols()));
    let curves = a
        .transforms
        .iter()
        .map(|&t| rate_curve(&img, t, &fb, levels, &budgets, a.q))
        .collect::<Result<Vec<_>, _>>()?;
    let mut body: String = curves.iter().map(RateCurve::csv_rows).collect();
    for c in &curves {
        body.push_str(&slope_line(c));
    }
    if let Some(path) = &a.csv {
        append_csv(path, RateCurve::csv_header(), &body)?;
    }
    write!(out, "{}\n{}", RateCurve::csv_header(), body)?;
    Ok(())
}

fn cmd_validate_filter(a: &ValidateArgs, out: &mut dyn Write) -> CmdResult {
    let fb = resolve_bank(&a.bank, "haar")?;
    let report = validate_biorthogonality(&fb, a.tol);
    let dual = discrete_vanishing_moments(&fb, MOMENT_TOL);
    let primal = primal_vanishing_moments(&fb, MOMENT_TOL);
    writeln!(
        out,
        "bank={} signal_len={} max_deviation={:.3e} tol={:.1e} dual_moments={} primal_moments={} orthogonal={} symmetric={} {}",
        fb.name,
        report.signal_len,
        report.max_deviation,
        report.tol,
        dual,
        primal,
        fb.is_orthogonal(),
        fb.supports_symmetric(),
        if report.passed { "PASS" } else { "FAIL" }
    )?;
    if !report.passed {
        return Err(Error::Validation {
            bank: fb.name.clone(),
            condition: format!(
                "reconstruction deviation {:.3e} exceeds {:.1e}",
                report.max_deviation, report.tol
            ),
        });
    }
    Ok(())
}
