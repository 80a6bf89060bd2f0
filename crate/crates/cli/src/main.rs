use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum, ValueHint};
use serde::{Deserialize, Serialize};

use fermigauss::basis::RotatedView;
use fermigauss::correlators::kw_residuals;
use fermigauss::probability::{prob_phi_real, prob_z_real};
use fermigauss::scaling::{self, FitReport};
use fermigauss::tfi::{read_scan_csv, residue_grid, write_scan_csv};
use fermigauss::{
    oracle, sampling, BasisSpec, BitString, Boundary, Error, FormationBasis, GaussianState, ScalingModel, ScanConfig,
    SignSequence,
};

const EXIT_INPUT: u8 = 2;
const EXIT_SINGULAR: u8 = 3;

/// Gaussian fermionic states: amplitudes, formation probabilities and scaling fits.
#[derive(Parser)]
#[command(name = "fermigauss", version)]
struct Cli {
    /// Output format for results printed to stdout.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Worker threads (defaults to the number of cores).
    #[arg(long, env = "FERMIGAUSS_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Squared Pfaffian minor (any state).
    Pfaffian,
    /// Single determinant of the real correlator (real R, base 0…0).
    Det,
}

#[derive(Subcommand)]
enum Command {
    /// Amplitude of one configuration: 0/1 strings in σ^z, +/- strings in a rotated basis.
    Amplitude(QueryArgs),
    /// Probability of one configuration.
    Prob {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, value_enum, default_value_t = Method::Pfaffian)]
        method: Method,
    },
    /// Run a formation-probability scan campaign and write its CSV.
    Scan {
        #[arg(value_hint = ValueHint::FilePath)]
        campaign: PathBuf,
        /// Overrides the campaign's output path.
        #[arg(long, short, value_hint = ValueHint::FilePath)]
        out: Option<PathBuf>,
    },
    /// Fit a scan CSV to the finite-size scaling form and classify it.
    Fit {
        #[arg(value_hint = ValueHint::FilePath)]
        csv: PathBuf,
        #[arg(long)]
        model: ScalingModel,
        /// Only use sizes L ≥ this.
        #[arg(long)]
        l_min: Option<f64>,
        /// Only use sizes L ≤ this.
        #[arg(long)]
        l_max: Option<f64>,
        /// Only use sizes with L ≡ residue (mod 6).
        #[arg(long)]
        residue: Option<usize>,
        #[arg(long, short, value_hint = ValueHint::FilePath)]
        out: Option<PathBuf>,
    },
    /// Self-test: normalization in several bases and duality residuals on random states.
    Check {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Largest L for the exhaustive normalization sums.
        #[arg(long, default_value_t = 8)]
        max_l: usize,
    },
}

#[derive(clap::Args)]
struct QueryArgs {
    #[arg(value_hint = ValueHint::FilePath)]
    state: PathBuf,
    /// 0/1 string, or +/- string (put `--` before strings starting with `-`).
    #[arg(allow_hyphen_values = true)]
    configuration: String,
    /// Rotation angle; only used with +/- configurations.
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
}

/// Scan campaign: the scan configuration plus output and parallelism.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CampaignSpec {
    boundary: Boundary,
    basis: FormationBasis,
    base_pattern: String,
    #[serde(rename = "L_min")]
    l_min: usize,
    #[serde(rename = "L_max")]
    l_max: usize,
    stride: usize,
    output: Option<PathBuf>,
    threads: Option<usize>,
}

impl CampaignSpec {
    fn scan_config(&self) -> ScanConfig {
        ScanConfig {
            boundary: self.boundary,
            basis: self.basis,
            base_pattern: self.base_pattern.clone(),
            l_min: self.l_min,
            l_max: self.l_max,
            stride: self.stride,
        }
    }
}

/// Parsed configuration string.
enum Query {
    Z(BitString),
    Rotated(SignSequence, BasisSpec),
}

impl QueryArgs {
    fn load(&self) -> Result<(GaussianState, Query)> {
        let text = fs::read_to_string(&self.state).with_context(|| format!("reading {}", self.state.display()))?;
        let state = GaussianState::from_json(&text)?;
        let cfg = self.configuration.trim();
        let query = if !cfg.is_empty() && cfg.chars().all(|c| c == '0' || c == '1') {
            if self.phi.is_some() || self.alpha.is_some() {
                bail!(Error::InvalidConfiguration("--phi/--alpha need a +/- configuration".into()));
            }
            Query::Z(cfg.parse()?)
        } else {
            let s: SignSequence = cfg.parse()?;
            Query::Rotated(s, BasisSpec::new(self.phi.unwrap_or(0.0), self.alpha.unwrap_or(0.0)))
        };
        let l = match &query {
            Query::Z(b) => b.len(),
            Query::Rotated(s, _) => s.len(),
        };
        if l != state.len() {
            bail!(Error::DimensionMismatch {
                expected: state.len(),
                found: l
            });
        }
        Ok((state, query))
    }
}

fn basis_label(q: &Query) -> String {
    match q {
        Query::Z(_) => "z".to_string(),
        Query::Rotated(_, b) => FormationBasis::Rotated(*b).label(),
    }
}

fn emit<T: Serialize>(format: Format, record: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(record)?)?,
        Format::Csv => {
            let value = serde_json::to_value(record)?;
            let obj = value.as_object().ok_or_else(|| anyhow!("record is not an object"))?;
            let cell = |v: &serde_json::Value| match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            writeln!(out, "{}", obj.keys().cloned().collect::<Vec<_>>().join(","))?;
            writeln!(out, "{}", obj.values().map(cell).collect::<Vec<_>>().join(","))?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct AmplitudeRecord {
    configuration: String,
    basis: String,
    re: f64,
    im: f64,
    modulus2: f64,
    path: &'static str,
}

#[derive(Serialize)]
struct ProbRecord {
    configuration: String,
    basis: String,
    probability: f64,
    ln_probability: f64,
    path: &'static str,
}

fn cmd_amplitude(args: &QueryArgs, format: Format) -> Result<()> {
    let (state, query) = args.load()?;
    let (amp, path) = match &query {
        Query::Z(b) => (state.amplitude_z(b)?, "pfaffinho-z"),
        Query::Rotated(s, basis) => (RotatedView::new(&state, *basis)?.amplitude(s)?, "dual-pfaffinho"),
    };
    emit(
        format,
        &AmplitudeRecord {
            configuration: args.configuration.trim().to_string(),
            basis: basis_label(&query),
            re: amp.re,
            im: amp.im,
            modulus2: amp.norm_sqr(),
            path,
        },
    )
}

fn cmd_prob(args: &QueryArgs, method: Method, format: Format) -> Result<()> {
    let (state, query) = args.load()?;
    let (ln_p, path) = match (&query, method) {
        (Query::Z(b), Method::Pfaffian) => (state.ln_prob_z(b)?, "pfaffinho-z"),
        (Query::Z(b), Method::Det) => (prob_z_real(&state, b)?.ln(), "det-z"),
        (Query::Rotated(s, basis), Method::Pfaffian) => {
            (RotatedView::new(&state, *basis)?.ln_probability(s)?, "dual-pfaffinho")
        }
        (Query::Rotated(s, basis), Method::Det) => (prob_phi_real(&state, s, basis.phi)?.ln(), "det-phi"),
    };
    emit(
        format,
        &ProbRecord {
            configuration: args.configuration.trim().to_string(),
            basis: basis_label(&query),
            probability: ln_p.exp(),
            ln_probability: ln_p,
            path,
        },
    )
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            bail!(Error::InvalidConfiguration("thread count must be positive".into()));
        }
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

#[derive(Serialize)]
struct ScanSummary {
    output: String,
    rows: usize,
    failed: usize,
}

/// Returns the process exit code: nonzero only when every point failed.
fn cmd_scan(campaign: &Path, out: Option<PathBuf>, threads: Option<usize>, format: Format) -> Result<u8> {
    let text = fs::read_to_string(campaign).with_context(|| format!("reading {}", campaign.display()))?;
    let spec: CampaignSpec =
        serde_json::from_str(&text).map_err(Error::from).context("parsing campaign file")?;
    let config = spec.scan_config();
    config.grid()?;
    let output = out
        .or(spec.output.clone())
        .ok_or_else(|| Error::InvalidConfiguration("no output path (campaign \"output\" or --out)".into()))?;

    let rows = pool(threads.or(spec.threads))?.install(|| config.run())?;
    let failed = rows.iter().filter(|r| r.result.is_err()).count();
    for r in &rows {
        if let Err(e) = &r.result {
            eprintln!("L = {}: {e}", r.l);
        }
    }
    let mut buf = Vec::new();
    write_scan_csv(&rows, &mut buf)?;
    write_atomic(&output, &buf)?;
    emit(
        format,
        &ScanSummary {
            output: output.display().to_string(),
            rows: rows.len(),
            failed,
        },
    )?;
    if failed == rows.len() {
        eprintln!("error: every scan point failed");
        return Ok(EXIT_SINGULAR);
    }
    Ok(0)
}

#[derive(Serialize)]
struct FitRecord {
    model: ScalingModel,
    gamma: f64,
    s_or_a: f64,
    gamma_stderr: f64,
    s_or_a_stderr: f64,
    class: String,
    n_points: usize,
    window_lo: f64,
    window_hi: f64,
    residual_rms: f64,
}

fn cmd_fit(
    csv: &Path,
    model: ScalingModel,
    l_min: Option<f64>,
    l_max: Option<f64>,
    residue: Option<usize>,
    out: Option<PathBuf>,
    format: Format,
) -> Result<()> {
    let file = fs::File::open(csv).with_context(|| format!("reading {}", csv.display()))?;
    let mut points = read_scan_csv(file)?;
    points.retain(|&(l, _)| l_min.map_or(true, |lo| l >= lo) && l_max.map_or(true, |hi| l <= hi));
    if let Some(r) = residue {
        let keep: Vec<usize> = residue_grid(&points.iter().map(|p| p.0 as usize).collect::<Vec<_>>(), r);
        points.retain(|p| keep.contains(&(p.0 as usize)));
    }
    let report = FitReport::from(&scaling::fit(&points, model)?);
    if let Some(path) = out {
        write_atomic(&path, format!("{}\n", serde_json::to_string_pretty(&report)?).as_bytes())?;
    }
    match format {
        Format::Json => emit(format, &report),
        Format::Csv => emit(
            format,
            &FitRecord {
                model: report.model,
                gamma: report.gamma,
                s_or_a: report.s_or_a,
                gamma_stderr: report.stderr.gamma,
                s_or_a_stderr: report.stderr.s_or_a,
                class: report.class.label().to_string(),
                n_points: report.n_points,
                window_lo: report.window[0],
                window_hi: report.window[1],
                residual_rms: report.residual_rms,
            },
        ),
    }
}

#[derive(Serialize)]
struct CheckRecord {
    check: String,
    l: usize,
    value: f64,
    tolerance: f64,
    pass: bool,
}

fn cmd_check(seed: u64, max_l: usize, format: Format) -> Result<u8> {
    if !(2..=oracle::MAX_SERIES_L).contains(&max_l) {
        bail!(Error::SizeLimit {
            l: max_l,
            max: oracle::MAX_SERIES_L
        });
    }
    let mut rng = sampling::seeded(seed);
    let mut records = Vec::new();
    for l in 2..=max_l {
        let state = GaussianState::new(sampling::well_conditioned(&mut rng, l, true), sampling::random_bits(&mut rng, l))?;
        let dim = 1usize << l;
        let z: f64 = (0..dim)
            .map(|k| state.amplitude_z(&BitString::from_index(k, l)).map(|a| a.norm_sqr()))
            .sum::<fermigauss::Result<f64>>()?;
        records.push(CheckRecord {
            check: "norm-z".into(),
            l,
            value: (z - 1.0).abs(),
            tolerance: 1e-10,
            pass: (z - 1.0).abs() < 1e-10,
        });
        for (name, basis) in [
            ("norm-x", BasisSpec::sigma_x()),
            ("norm-y", BasisSpec::sigma_y()),
            ("norm-phi", BasisSpec::new(0.7, 0.3)),
        ] {
            let view = RotatedView::new(&state, basis)?;
            let total: f64 = (0..dim)
                .map(|k| view.amplitude(&SignSequence::from_index(k, l)).map(|a| a.norm_sqr()))
                .sum::<fermigauss::Result<f64>>()?;
            records.push(CheckRecord {
                check: name.into(),
                l,
                value: (total - 1.0).abs(),
                tolerance: 1e-10,
                pass: (total - 1.0).abs() < 1e-10,
            });
        }
    }
    for l in [4, 16, 64] {
        let r = sampling::well_conditioned(&mut rng, l, true);
        let dual = fermigauss::basis::dual_matrix(&r)?;
        let res = kw_residuals(&r, &dual.rtilde)?;
        records.push(CheckRecord {
            check: "kw-residual".into(),
            l,
            value: res,
            tolerance: 1e-9,
            pass: res < 1e-9,
        });
    }
    let all_pass = records.iter().all(|r| r.pass);
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&records)?),
        Format::Csv => {
            println!("check,L,value,tolerance,pass");
            for r in &records {
                println!("{},{},{:e},{:e},{}", r.check, r.l, r.value, r.tolerance, r.pass);
            }
        }
    }
    Ok(if all_pass { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Amplitude(args) => cmd_amplitude(&args, cli.format).map(|_| 0),
        Command::Prob { query, method } => cmd_prob(&query, method, cli.format).map(|_| 0),
        Command::Scan { campaign, out } => cmd_scan(&campaign, out, cli.threads, cli.format),
        Command::Fit {
            csv,
            model,
            l_min,
            l_max,
            residue,
            out,
        } => cmd_fit(&csv, model, l_min, l_max, residue, out, cli.format).map(|_| 0),
        Command::Check { seed, max_l } => pool(cli.threads)?.install(|| cmd_check(seed, max_l, cli.format)),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::SingularCayley(_)
            | Error::SingularQ(_)
            | Error::SingularBlock(_)
            | Error::SingularG(_)
            | Error::ZeroAmplitudeBase(_),
        ) => EXIT_SINGULAR,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            let code = exit_code(&err);
            eprintln!("error: {err:#}");
            if let Some(Error::SingularCayley(_)) = err.downcast_ref::<Error>() {
                eprintln!("hint: R + I or H·P − I is singular for this state; the rotated-basis dual matrix does not exist");
            }
            ExitCode::from(code)
        }
    }
}
