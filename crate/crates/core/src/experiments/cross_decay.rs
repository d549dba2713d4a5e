use rustfft::num_complex::Complex64;

use super::{ExperimentKind, ExperimentReport, Row, Systems};
use crate::config::RunConfig;
use crate::error::{Error, Result};

const COLUMNS: [&str; 3] = ["t", "excluded_wavelets", "energy"];

/// `e(ω) = Σ_{ψ ∈ Λ₀ᶜ} |⟨ω, ψ⟩|²` for each listed wavelet, two wavelets per
/// complex transform.
fn excluded_energy(sys: &Systems, wavelets: &[usize]) -> Result<Vec<f64>> {
    let sh = &sys.shearlets;
    let n = sh.n();
    let base = sys.at(0.0)?;
    let sel = base.shearlet_selection();
    let mut out = vec![0.0; wavelets.len()];
    let mut spec = vec![Complex64::default(); n * n];
    let mut fold = Vec::new();
    for (pair, chunk) in wavelets.chunks(2).enumerate() {
        let a = sys.wavelets.atom(&sys.wavelets.index(chunk[0]))?;
        let b = match chunk.get(1) {
            Some(&i) => sys.wavelets.atom(&sys.wavelets.index(i))?,
            None => vec![0.0; n * n],
        };
        for ((z, x), y) in spec.iter_mut().zip(&a).zip(&b) {
            *z = Complex64::new(*x, *y);
        }
        sh.fft().forward(&mut spec);
        let (mut ea, mut eb) = (0.0, 0.0);
        for (c, ch) in sh.channels().iter().enumerate() {
            let keep = sel.keep_mask(c);
            if keep.iter().all(|&k| k) {
                continue;
            }
            sh.analyze_channel(&spec, ch, true, &mut fold);
            for (v, _) in fold.iter().zip(keep).filter(|(_, &k)| !k) {
                ea += v.re * v.re;
                eb += v.im * v.im;
            }
        }
        out[2 * pair] = ea;
        if chunk.len() == 2 {
            out[2 * pair + 1] = eb;
        }
    }
    Ok(out)
}

/// Least-squares slope of `log₂ E` against `t` over rows with `E > 0`.
pub fn log2_slope(rows: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.1 > 0.0).map(|r| (r.0, r.1.log2())).collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `E(t)`: energy of inner products between wavelets outside `Θ_{t,τ}` and
/// shearlets outside `Λ₀`.
pub fn cross_decay_curve(sys: &Systems, cfg: &RunConfig) -> Result<ExperimentReport> {
    let t_min = cfg.offsets.iter().copied().reduce(f64::min).ok_or_else(|| Error::Config("offsets must be nonempty".into()))?;
    let mut report = ExperimentReport::new(ExperimentKind::CrossDecay, cfg, &COLUMNS);
    // Θᶜ shrinks as t grows, so the smallest offset lists every candidate
    let widest = sys.at(t_min)?;
    let keep = widest.wavelet_selection().keep_mask();
    let candidates: Vec<usize> = (0..keep.len()).filter(|&i| !keep[i]).collect();
    let energy = excluded_energy(sys, &candidates)?;
    let mut curve = Vec::new();
    for &t in &cfg.offsets {
        let bss = sys.at(t)?;
        let keep = bss.wavelet_selection().keep_mask();
        let mut e = 0.0;
        let mut count = 0;
        for (&i, &v) in candidates.iter().zip(&energy) {
            if !keep[i] {
                e += v;
                count += 1;
            }
        }
        log::info!("t = {t}: {count} excluded wavelets, E = {e:.4e}");
        report.rows.push(Row::ok(vec![t, count as f64, e]));
        curve.push((t, e));
    }
    let slope = log2_slope(&curve);
    report.meta("log2_slope", slope);
    report.meta("candidates", candidates.len());
    curve.sort_by(|a, b| a.0.total_cmp(&b.0));
    report.series.push(curve);
    Ok(report)
}
