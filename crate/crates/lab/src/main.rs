use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use extlab::{emit, ExperimentConfig, Family, Format, LabError, Placement, SweepResult, TestFunctionSpec};
use extlab_core::feffgeom::{pair_geometry, write_geometry_report};
use extlab_core::spectral::{dirichlet, order_for, write_kernel_trace, DirichletSpec};
use extlab_core::wavelets::perturbed_projection;

#[derive(Parser)]
#[command(name = "extlab", version, about = "Numerical experiments for Fourier extension on the parabola")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Level or level range, e.g. `4` or `2..6`.
    #[arg(long, global = true, value_parser = parse_levels)]
    s: Option<(u32, u32)>,
    /// Comma-separated exponents.
    #[arg(long, global = true, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// ‖E Q_s f‖_{L^q(B(0,2^{2s}))}/‖f‖_q over levels, exponents and families.
    SweepExtension,
    /// First decoupling, overlap counts and pair geometry.
    AuditDecoupling,
    /// Dirichlet scaling, kernel decoupling, avg-trans majorant, sequence bounds.
    AuditStep3,
    /// Smoothed Alpert coefficients of the first configured family at level s_max.
    WaveletDump,
    /// Pair geometry of all caps at level s_max.
    GeometryReport,
    /// The dilated Dirichlet kernel at level s_max over one period.
    KernelTrace,
}

fn parse_levels(text: &str) -> Result<(u32, u32), String> {
    let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
    match text.split_once("..") {
        Some((a, b)) => Ok((parse(a)?, parse(b.trim_start_matches('='))?)),
        None => parse(text).map(|s| (s, s)),
    }
}

fn config(common: &Common) -> extlab::Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    if let Some((a, b)) = common.s {
        (cfg.s_min, cfg.s_max) = (a, b);
    }
    if let Some(q) = &common.q {
        cfg.q = q.clone();
    }
    if let Some(delta) = common.delta {
        cfg.delta = delta;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn create(path: &Path) -> extlab::Result<std::fs::File> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    std::fs::File::create(path).map_err(|e| LabError::io(path, e))
}

fn report(result: &SweepResult, path: &Path) {
    eprintln!("{}: {} rows -> {}", result.experiment, result.rows.len(), path.display());
    for (label, secs) in &result.timings {
        eprintln!("  {label}: {secs:.3} s");
    }
    for v in &result.violations {
        eprintln!("  violation: {v}");
    }
}

fn run(cli: &Cli) -> extlab::Result<bool> {
    let cfg = config(&cli.common)?;
    let dir = cfg.output_dir.clone();
    let sweep = |result: SweepResult| -> extlab::Result<bool> {
        let path = emit(&result, &dir, cli.common.format)?;
        report(&result, &path);
        Ok(result.violations.is_empty())
    };
    match cli.command {
        Command::SweepExtension => sweep(extlab::run_extension_sweep(&cfg)?),
        Command::AuditDecoupling => sweep(extlab::run_decoupling_audit(&cfg)?),
        Command::AuditStep3 => sweep(extlab::run_step3_audit(&cfg)?),
        Command::WaveletDump => {
            let s = cfg.s_max;
            let family = cfg.families.first().copied().unwrap_or(Family::SmoothBump);
            let f = TestFunctionSpec { family, level: cfg.family_level.unwrap_or(s), seed: cfg.seed, index: 0 }
                .generate(extlab::calibration::sequence_resolution(s), Placement::MiddleThird)?;
            let (coeffs, _) = perturbed_projection(&f, s, cfg.eta, 0.0)?;
            let path = dir.join("wavelet-dump.csv");
            coeffs.write_csv(create(&path)?)?;
            eprintln!("wavelet-dump: {} coefficients -> {}", coeffs.len(), path.display());
            Ok(true)
        }
        Command::GeometryReport => {
            let s = cfg.s_max;
            let n = 1u64 << s;
            let rows = (1..=n)
                .flat_map(|m| (1..=n).map(move |k| (m, k)))
                .map(|(m, k)| pair_geometry(m, k, s, cfg.cap_constant))
                .collect::<Result<Vec<_>, _>>()?;
            let path = dir.join("geometry-report.csv");
            write_geometry_report(&rows, create(&path)?)?;
            eprintln!("geometry-report: {} pairs -> {}", rows.len(), path.display());
            Ok(true)
        }
        Command::KernelTrace => {
            let s = cfg.s_max;
            let spec = DirichletSpec::dilated(order_for(cfg.lambda(), s), s)?;
            let period = 2.0 * std::f64::consts::PI * (s as f64).exp2();
            let count = 4096;
            let points: Vec<_> = (0..count)
                .map(|j| {
                    let t = period * (j as f64 / count as f64 - 0.5);
                    (t, dirichlet(&spec, t))
                })
                .collect();
            let path = dir.join("kernel-trace.csv");
            write_kernel_trace(&points, create(&path)?)?;
            eprintln!("kernel-trace: M = {} -> {}", spec.order, path.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
