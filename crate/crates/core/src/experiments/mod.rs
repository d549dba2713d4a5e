//! Scripted experiments producing tables and curves.

mod cross_decay;
mod gelfand;
mod gramian;
mod nterm;
mod sweep;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

pub use cross_decay::{cross_decay_curve, log2_slope};
pub use gelfand::{gelfand_composite, gelfand_table, gelfand_trend};
pub use gramian::{block_fractions, gramian_report, GramianMode};
pub use nterm::{cartoon_grid, fit_slope, middle_decade, nterm_curve};
pub use sweep::{frame_bound_sweep, sweep_trend};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::geometry::DigitalDomain;
use crate::hybrid::{BoundaryShearletSystem, HybridConfig};
use crate::plot::{line_plot, Axes};
use crate::shearlet::{read_cache_header, read_filter_cache, write_filter_cache, ShearletSystem};
use crate::wavelet::WaveletSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    FrameSweep,
    Gramian,
    Gelfand,
    Nterm,
    CrossDecay,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [Self::FrameSweep, Self::Gramian, Self::Gelfand, Self::Nterm, Self::CrossDecay];

    /// File stem of the report.
    pub fn stem(&self) -> &'static str {
        match self {
            Self::FrameSweep => "frame_sweep",
            Self::Gramian => "gramian",
            Self::Gelfand => "gelfand",
            Self::Nterm => "nterm",
            Self::CrossDecay => "cross_decay",
        }
    }

    fn axes(&self) -> Axes {
        match self {
            Self::Nterm | Self::CrossDecay => Axes::LogLog,
            _ => Axes::Linear,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.stem().replace('_', "-"))
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().replace('_', "-");
        Self::ALL
            .into_iter()
            .find(|k| k.to_string() == key)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}' (frame-sweep, gramian, gelfand, nterm, cross-decay)")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub label: Option<String>,
    pub values: Vec<f64>,
    /// Failure message when the row could not be computed.
    pub error: Option<String>,
}

impl Row {
    pub fn ok(values: Vec<f64>) -> Self {
        Self { label: None, values, error: None }
    }

    pub fn labeled(label: impl Into<String>, values: Vec<f64>) -> Self {
        Self { label: Some(label.into()), values, error: None }
    }

    /// Row with the leading `known` values and NaN for the rest.
    pub fn failed(known: Vec<f64>, width: usize, err: &Error) -> Self {
        let mut values = known;
        values.resize(width, f64::NAN);
        Self { label: None, values, error: Some(err.to_string()) }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub params: Vec<(String, String)>,
    /// Name of the text column preceding the numeric ones, if rows carry labels.
    pub label_column: Option<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    /// Seeds, tolerances and derived summaries; written to the CSV header.
    pub metadata: Vec<(String, String)>,
    /// Not written to files so reruns stay byte-identical.
    pub wall_time_s: f64,
    /// Polylines for the PNG, one per series.
    pub series: Vec<Vec<(f64, f64)>>,
    /// Square grayscale image with values in `[0, 1]`, written as `<stem>_matrix.png`.
    pub image: Option<(usize, Vec<f64>)>,
}

impl ExperimentReport {
    fn new(kind: ExperimentKind, cfg: &RunConfig, columns: &[&str]) -> Self {
        Self {
            kind,
            params: cfg.echo(),
            label_column: None,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
            wall_time_s: 0.0,
            series: Vec::new(),
            image: None,
        }
    }

    fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.error.is_none())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.columns.iter().position(|x| x == name)?;
        Some(self.rows.iter().map(|r| r.values[c]).collect())
    }

    pub fn metadata_value(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Write `<stem>.csv` and, when there is something to draw, `<stem>.png`.
    pub fn write(&self, out_dir: &Path) -> Result<Vec<PathBuf>> {
        let mut echo = self.params.clone();
        echo.push(("kind".into(), self.kind.to_string()));
        echo.extend(self.metadata.iter().cloned());
        let mut header: Vec<&str> = Vec::new();
        if let Some(l) = &self.label_column {
            header.push(l);
        }
        header.extend(self.columns.iter().map(String::as_str));
        header.push("status");
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut cells = Vec::new();
                if self.label_column.is_some() {
                    cells.push(r.label.clone().unwrap_or_default());
                }
                cells.extend(r.values.iter().map(|v| v.to_string()));
                cells.push(r.error.clone().map_or("ok".into(), |e| format!("error: {e}")));
                cells
            })
            .collect();
        let csv = out_dir.join(format!("{}.csv", self.kind.stem()));
        crate::io::write_csv(&csv, &echo, &header, &rows)?;
        let mut out = vec![csv];
        if !self.series.is_empty() {
            let png = out_dir.join(format!("{}.png", self.kind.stem()));
            match line_plot(&png, &self.series, self.kind.axes()) {
                Ok(()) => out.push(png),
                Err(Error::Config(m)) => log::warn!("no plot for {}: {m}", self.kind),
                Err(e) => return Err(e),
            }
        }
        if let Some((side, px)) = &self.image {
            let png = out_dir.join(format!("{}_matrix.png", self.kind.stem()));
            crate::io::write_png_gray(&png, px, *side, *side, 0.0, 1.0)?;
            out.push(png);
        }
        Ok(out)
    }
}

/// How the shearlet filters were obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum CacheStatus {
    Disabled,
    Hit(PathBuf),
    Written(PathBuf),
    /// An unreadable or mismatched cache was replaced.
    Rebuilt { path: PathBuf, reason: String },
}

/// The two subsystems of a configuration and the hybrid system at `t = 0`.
pub struct Systems {
    pub domain: DigitalDomain,
    pub wavelets: Arc<WaveletSystem>,
    pub shearlets: Arc<ShearletSystem>,
    pub cache: CacheStatus,
    base: BoundaryShearletSystem,
    tau: f64,
}

impl Systems {
    pub fn build(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let domain = DigitalDomain::new(cfg.n)?;
        let wavelets = Arc::new(WaveletSystem::new(&domain, cfg.wavelet, cfg.scales)?);
        let (shearlets, cache) = load_shearlets(cfg, &domain)?;
        let shearlets = Arc::new(shearlets);
        let hc = HybridConfig::new(0.0, &wavelets, &shearlets).with_tau(cfg.tau);
        let base = BoundaryShearletSystem::new(&domain, wavelets.clone(), shearlets.clone(), hc)?;
        Ok(Self { domain, wavelets, shearlets, cache, base, tau: cfg.tau })
    }

    /// Hybrid system at offset `t`, sharing `Λ₀` with every other offset.
    pub fn at(&self, t: f64) -> Result<BoundaryShearletSystem> {
        let hc = HybridConfig::new(t, &self.wavelets, &self.shearlets).with_tau(self.tau);
        self.base.with_config(hc)
    }
}

/// Cache file name for a configuration.
pub fn cache_path(cfg: &RunConfig, dir: &Path) -> PathBuf {
    let ladder: Vec<String> = cfg.ladder().iter().map(|k| k.to_string()).collect();
    let rule = format!("{:?}", cfg.stride_rule).to_lowercase();
    dir.join(format!(
        "shearlets-n{}-L{}-k{}-{}-{}-s{}.bin",
        cfg.n,
        cfg.scales,
        ladder.join("_"),
        cfg.generator,
        rule,
        cfg.base_stride
    ))
}

fn load_shearlets(cfg: &RunConfig, domain: &DigitalDomain) -> Result<(ShearletSystem, CacheStatus)> {
    let params = cfg.shearlet_params();
    let Some(dir) = &cfg.cache_dir else {
        return Ok((ShearletSystem::new(domain, params)?, CacheStatus::Disabled));
    };
    let path = cache_path(cfg, dir);
    let mut reason = None;
    if path.exists() {
        let loaded = read_cache_header(&path).and_then(|head| {
            if head.matches(cfg.n, &params) {
                read_filter_cache(&path, domain)
            } else {
                Err(Error::Format { offset: 0, message: "cache header does not match the configuration".into() })
            }
        });
        match loaded {
            Ok(sys) => return Ok((sys, CacheStatus::Hit(path))),
            Err(e) => {
                log::warn!("rebuilding shearlet cache {}: {e}", path.display());
                reason = Some(e.to_string());
            }
        }
    }
    write_filter_cache(&path, &ShearletSystem::new(domain, params)?)?;
    // read back so a fresh build and a cache hit agree bit for bit
    let sys = read_filter_cache(&path, domain)?;
    let status = match reason {
        Some(reason) => CacheStatus::Rebuilt { path, reason },
        None => CacheStatus::Written(path),
    };
    Ok((sys, status))
}

/// Run one experiment kind with the offsets and lists of `cfg`.
pub fn run(kind: ExperimentKind, cfg: &RunConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let sys = Systems::build(cfg)?;
    let mut report = match kind {
        ExperimentKind::FrameSweep => frame_bound_sweep(&sys, cfg)?,
        ExperimentKind::Gramian => {
            let t = *cfg.offsets.last().ok_or_else(|| Error::Config("offsets must be nonempty".into()))?;
            gramian_report(&sys.at(t)?, cfg, GramianMode::Auto)?
        }
        ExperimentKind::Gelfand => gelfand_table(&sys, cfg)?,
        ExperimentKind::Nterm => {
            let t = *cfg.offsets.last().ok_or_else(|| Error::Config("offsets must be nonempty".into()))?;
            nterm_curve(&sys.at(t)?, cfg, &cartoon_grid(cfg)?)?
        }
        ExperimentKind::CrossDecay => cross_decay_curve(&sys, cfg)?,
    };
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
pub(crate) fn tiny_config() -> RunConfig {
    RunConfig { n: 32, scales: 3, offsets: vec![-4.0, 0.0], eig_tol: 1e-6, ..Default::default() }
}
