use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ExperimentKind, ExperimentReport, Row};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::hybrid::BoundaryShearletSystem;

const COLUMNS: [&str; 3] = ["distance_lo", "distance_hi", "energy_fraction"];
const IMAGE_SIDE: usize = 512;
/// Lowest `log₁₀|G|` shown in the image.
const IMAGE_FLOOR: f64 = -6.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GramianMode {
    /// Dense when the coefficient count is within the limit, sampled otherwise.
    Auto,
    Dense,
    Sampled,
}

/// Energy bin of an index distance: 0, 1, 2–3, 4–7, …
fn bin(d: usize) -> usize {
    if d == 0 {
        0
    } else {
        d.ilog2() as usize + 1
    }
}

fn bin_range(b: usize) -> (usize, usize) {
    if b == 0 {
        (0, 0)
    } else {
        (1 << (b - 1), (1 << b) - 1)
    }
}

struct Accumulator {
    nw: usize,
    /// wave-wave, wave-shear (both off-diagonal blocks), shear-shear.
    blocks: [f64; 3],
    bins: Vec<f64>,
}

impl Accumulator {
    fn add_column(&mut self, i: usize, col: &[f64], weight: f64) {
        let iw = i < self.nw;
        for (k, &g) in col.iter().enumerate() {
            let e = g * g * weight;
            let b = match (iw, k < self.nw) {
                (true, true) => 0,
                (false, false) => 2,
                _ => 1,
            };
            self.blocks[b] += e;
            self.bins[bin(i.abs_diff(k))] += e;
        }
    }
}

/// Block energy fractions and the off-diagonal decay profile of `G = T_Φ T_Φ*`.
pub fn gramian_report(bss: &BoundaryShearletSystem, cfg: &RunConfig, mode: GramianMode) -> Result<ExperimentReport> {
    let m = bss.len();
    let dense = match mode {
        GramianMode::Dense if m > cfg.dense_limit => {
            return Err(Error::DenseLimit { count: m, limit: cfg.dense_limit });
        }
        GramianMode::Dense => true,
        GramianMode::Sampled => false,
        GramianMode::Auto => m <= cfg.dense_limit,
    };
    let mut report = ExperimentReport::new(ExperimentKind::Gramian, cfg, &COLUMNS);
    report.label_column = Some("entry".into());
    report.meta("mode", if dense { "dense" } else { "sampled" });
    report.meta("coefficients", m);
    report.meta("t", bss.config().t);
    let nw = bss.wavelet_count();
    let mut acc = Accumulator { nw, blocks: [0.0; 3], bins: vec![0.0; bin(m.max(1)) + 1] };
    let mut unit = vec![0.0; m];
    let mut column = |i: usize| -> Result<Vec<f64>> {
        unit[i] = 1.0;
        let atom = bss.synthesis_stacked(&unit);
        unit[i] = 0.0;
        bss.analysis_stacked(&atom?)
    };
    if dense {
        let side = m.min(IMAGE_SIDE);
        let mut image = vec![0.0f64; side * side];
        let mut identity_dev = 0.0f64;
        for i in 0..m {
            let col = column(i)?;
            acc.add_column(i, &col, 1.0);
            let r = i * side / m;
            for (k, &g) in col.iter().enumerate() {
                let c = k * side / m;
                let cell = &mut image[r * side + c];
                *cell = cell.max(g.abs());
                identity_dev = identity_dev.max((g - if i == k { 1.0 } else { 0.0 }).abs());
            }
        }
        for v in &mut image {
            *v = (v.max(1e-300).log10() - IMAGE_FLOOR).max(0.0) / -IMAGE_FLOOR;
        }
        report.image = Some((side, image));
        report.meta("identity_deviation", identity_dev);
    } else {
        let ns = m - nw;
        let (pw, ps) = match (nw, ns) {
            (0, _) => (0, cfg.probes.min(ns)),
            (_, 0) => (cfg.probes.min(nw), 0),
            _ => ((cfg.probes / 2).min(nw), (cfg.probes - cfg.probes / 2).min(ns)),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut probes: Vec<(usize, f64)> = Vec::with_capacity(pw + ps);
        if pw > 0 {
            probes.extend(sample(&mut rng, nw, pw).into_iter().map(|i| (i, nw as f64 / pw as f64)));
        }
        if ps > 0 {
            probes.extend(sample(&mut rng, ns, ps).into_iter().map(|i| (nw + i, ns as f64 / ps as f64)));
        }
        probes.sort_by_key(|p| p.0);
        for &(i, w) in &probes {
            let col = column(i)?;
            acc.add_column(i, &col, w);
        }
        report.meta("seed", cfg.seed);
        report.meta("probes", probes.len());
    }
    let total: f64 = acc.blocks.iter().sum();
    for (name, e) in ["block:wave-wave", "block:wave-shear", "block:shear-shear"].iter().zip(acc.blocks) {
        report.rows.push(Row::labeled(*name, vec![f64::NAN, f64::NAN, e / total]));
    }
    let mut curve = Vec::new();
    for (b, &e) in acc.bins.iter().enumerate() {
        let (lo, hi) = bin_range(b);
        report.rows.push(Row::labeled(format!("distance:{lo}-{hi}"), vec![lo as f64, hi as f64, e / total]));
        curve.push((b as f64, e / total));
    }
    report.meta("diagonal_fraction", acc.bins[0] / total);
    report.series.push(curve);
    Ok(report)
}

/// Energy fractions `[wave-wave, wave-shear, shear-shear]` of a report.
pub fn block_fractions(report: &ExperimentReport) -> Option<[f64; 3]> {
    let f = report.column("energy_fraction")?;
    (f.len() >= 3).then(|| [f[0], f[1], f[2]])
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::experiments::{tiny_config, Systems};
    use crate::geometry::DigitalDomain;
    use crate::hybrid::HybridConfig;
    use crate::shearlet::{ShearletParams, ShearletSystem};
    use crate::wavelet::{WaveletFamily, WaveletSystem};

    #[test]
    fn wavelet_only_gramian_is_identity() {
        let d = DigitalDomain::new(16).unwrap();
        let w = Arc::new(WaveletSystem::new(&d, WaveletFamily::default(), 2).unwrap());
        let s = Arc::new(ShearletSystem::new(&d, ShearletParams::new(0)).unwrap());
        let cfg = HybridConfig::new(100.0, &w, &s);
        let bss = BoundaryShearletSystem::new(&d, w, s, cfg).unwrap();
        assert_eq!(bss.len(), 256);
        let rc = RunConfig { n: 16, scales: 2, ..Default::default() };
        let r = gramian_report(&bss, &rc, GramianMode::Dense).unwrap();
        let dev: f64 = r.metadata_value("identity_deviation").unwrap().parse().unwrap();
        assert!(dev < 1e-10);
        assert_eq!(block_fractions(&r).unwrap(), [1.0, 0.0, 0.0]);
        assert!((r.metadata_value("diagonal_fraction").unwrap().parse::<f64>().unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dense_limit_is_enforced() {
        let cfg = RunConfig { dense_limit: 10, ..tiny_config() };
        let sys = Systems::build(&cfg).unwrap();
        let bss = sys.at(0.0).unwrap();
        assert!(matches!(gramian_report(&bss, &cfg, GramianMode::Dense), Err(Error::DenseLimit { .. })));
        let r = gramian_report(&bss, &cfg, GramianMode::Auto).unwrap();
        assert_eq!(r.metadata_value("mode"), Some("sampled"));
    }

    #[test]
    fn bins_cover_distances() {
        assert_eq!((bin(0), bin(1), bin(2), bin(3), bin(4), bin(7), bin(8)), (0, 1, 2, 2, 3, 3, 4));
        assert_eq!(bin_range(3), (4, 7));
    }
}
