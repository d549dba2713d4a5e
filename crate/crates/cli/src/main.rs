use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bshear::config::RunConfig;
use bshear::experiments::{self, CacheStatus, ExperimentKind, Systems};
use bshear::linalg::{CgSolver, FnOperator};
use bshear::shearlet::Generator;
use bshear::wavelet::WaveletFamily;
use bshear::{io, Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bshear", version, about = "Boundary shearlet systems on the unit square")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

/// Overrides applied on top of the config file.
#[derive(Args, Default)]
struct Flags {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    scales: Option<u32>,
    /// Shear levels per scale, e.g. 1,1,2,2.
    #[arg(long, global = true, value_delimiter = ',')]
    directions: Option<Vec<u32>>,
    #[arg(long, global = true)]
    wavelet: Option<WaveletFamily>,
    #[arg(long, global = true)]
    generator: Option<Generator>,
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// Single offset; same as --offsets with one value.
    #[arg(long, global = true, allow_hyphen_values = true, conflicts_with = "offsets")]
    offset: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    offsets: Option<Vec<f64>>,
    /// Sobolev orders.
    #[arg(long, global = true, value_delimiter = ',')]
    s: Option<Vec<f64>>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// CG tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    eig_tol: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    #[arg(long, global = true)]
    dense_limit: Option<usize>,
    #[arg(long, global = true)]
    probes: Option<usize>,
    #[arg(long, global = true, value_delimiter = ',')]
    n_terms: Option<Vec<usize>>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build or load the filter cache and write selection CSVs.
    Build,
    /// Run an experiment: frame-sweep, gramian, gelfand, nterm, cross-decay.
    Run {
        #[arg(value_parser = parse_kind)]
        kind: ExperimentKind,
    },
    /// Analyze an image or reconstruct one from coefficients.
    Transform {
        #[arg(value_enum)]
        direction: Direction,
        /// PGM (8/16-bit) or raw f64 file.
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Analyze,
    Reconstruct,
}

fn parse_kind(s: &str) -> std::result::Result<ExperimentKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn load_config(flags: &Flags) -> Result<RunConfig> {
    let mut cfg = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($($field:ident),*) => {$(
            if let Some(v) = &flags.$field {
                cfg.$field = v.clone();
            }
        )*};
    }
    set!(n, scales, wavelet, generator, tau, offsets, seed, tol, eig_tol, max_iter, dense_limit, probes, n_terms);
    if let Some(o) = &flags.out {
        cfg.out_dir = o.clone();
    }
    if let Some(d) = &flags.directions {
        cfg.directions = Some(d.clone());
    }
    if let Some(t) = flags.offset {
        cfg.offsets = vec![t];
    }
    if let Some(s) = &flags.s {
        cfg.s_values = s.clone();
    }
    if flags.cache_dir.is_some() {
        cfg.cache_dir = flags.cache_dir.clone();
    }
    if cfg.cache_dir.is_none() {
        cfg.cache_dir = Some(cfg.out_dir.join("cache"));
    }
    Ok(cfg)
}

fn last_offset(cfg: &RunConfig) -> Result<f64> {
    cfg.offsets.last().copied().ok_or_else(|| Error::Config("offsets must be nonempty".into()))
}

fn build(cfg: &RunConfig) -> Result<bool> {
    let sys = Systems::build(cfg)?;
    match &sys.cache {
        CacheStatus::Hit(p) => println!("cache hit: {}", p.display()),
        CacheStatus::Written(p) => println!("cache written: {}", p.display()),
        CacheStatus::Rebuilt { path, reason } => {
            println!("cache rebuilt ({reason}): {}", path.display())
        }
        CacheStatus::Disabled => println!("cache disabled"),
    }
    println!("wavelets: {}", sys.wavelets.len());
    let mut per_scale = std::collections::BTreeMap::new();
    for ch in sys.shearlets.channels() {
        *per_scale.entry(ch.j).or_insert(0usize) += 1;
    }
    for (j, c) in &per_scale {
        println!("shearlet scale {j}: {c} channels");
    }
    println!("shearlets: {}", sys.shearlets.len(true));
    let mut echo = cfg.echo();
    for &t in &cfg.offsets {
        let bss = sys.at(t)?;
        let path = cfg.out_dir.join(format!("selection_t{t}.csv"));
        echo.retain(|(k, _)| k != "t");
        echo.push(("t".into(), t.to_string()));
        fs::create_dir_all(&cfg.out_dir)?;
        bss.write_selection_csv(&path, &echo)?;
        println!("t = {t}: {} wavelets, {} shearlets -> {}", bss.wavelet_count(), bss.shearlet_count(), path.display());
    }
    Ok(true)
}

fn run(kind: ExperimentKind, cfg: &RunConfig) -> Result<bool> {
    let report = experiments::run(kind, cfg)?;
    for path in report.write(&cfg.out_dir)? {
        println!("{}", path.display());
    }
    let failed = report.rows.iter().filter(|r| r.error.is_some()).count();
    println!("{kind}: {} rows, {failed} failed, {:.1} s", report.rows.len(), report.wall_time_s);
    Ok(failed == 0)
}

fn stem(path: &Path) -> String {
    let s = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    s.strip_suffix(".coeffs").map(str::to_string).unwrap_or(s)
}

fn transform(direction: Direction, input: &Path, cfg: &mut RunConfig, n_flag: Option<usize>) -> Result<bool> {
    let t = last_offset(cfg)?;
    fs::create_dir_all(&cfg.out_dir)?;
    match direction {
        Direction::Analyze => {
            let (n, g) = io::read_grid(input)?;
            if n_flag.is_some_and(|m| m != n) {
                return Err(Error::Config(format!("--n {} does not match the {n}×{n} input", n_flag.unwrap())));
            }
            cfg.n = n;
            let sys = Systems::build(cfg)?;
            let bss = sys.at(t)?;
            let c = bss.analysis_stacked(&g)?;
            let raw = cfg.out_dir.join(format!("{}.coeffs.f64", stem(input)));
            let index = raw.with_extension("csv");
            io::write_raw_f64(&raw, &c)?;
            let mut echo = cfg.echo();
            echo.push(("t".into(), t.to_string()));
            bss.write_selection_csv(&index, &echo)?;
            println!("{} coefficients -> {}", c.len(), raw.display());
            println!("{}", index.display());
        }
        Direction::Reconstruct => {
            let c = io::read_raw_f64(input)?;
            let sys = Systems::build(cfg)?;
            let bss = sys.at(t)?;
            if c.len() != bss.len() {
                return Err(Error::Shape { expected: bss.len(), got: c.len() });
            }
            let n = cfg.n;
            let op = FnOperator::symmetric(n * n, |x| bss.frame_operator_apply(x));
            let solver = CgSolver::new(&op, cfg.tol, cfg.max_iter)?;
            let out = solver.solve(&bss.synthesis_stacked(&c)?)?;
            let path = cfg.out_dir.join(format!("{}.recon.pgm", stem(input)));
            let mut echo = cfg.echo();
            echo.push(("t".into(), t.to_string()));
            io::write_grid(&path, &out.x, n, &echo)?;
            println!("{} CG iterations, residual {:.3e}", out.iterations, out.residual);
            println!("{}", path.display());
            println!("{}", io::sidecar_path(&path).display());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.flags.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = load_config(&cli.flags).and_then(|mut cfg| {
        cfg.validate()?;
        match &cli.command {
            Command::Build => build(&cfg),
            Command::Run { kind } => run(*kind, &cfg),
            Command::Transform { direction, input } => transform(*direction, input, &mut cfg, cli.flags.n),
        }
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
