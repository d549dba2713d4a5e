use super::{ExperimentKind, ExperimentReport, Row, Systems};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::linalg::{extremal_eigenvalues_with, EigenOptions, FnOperator, COLLAPSE_RATIO};

const COLUMNS: [&str; 8] =
    ["t", "wavelets", "shearlets", "lambda_min", "lambda_max", "quotient", "iterations_min", "iterations_max"];

/// Frame bounds of the hybrid system at each offset.
pub fn frame_bound_sweep(sys: &Systems, cfg: &RunConfig) -> Result<ExperimentReport> {
    if cfg.offsets.is_empty() {
        return Err(Error::Config("offsets must be nonempty".into()));
    }
    let mut report = ExperimentReport::new(ExperimentKind::FrameSweep, cfg, &COLUMNS);
    let opts = EigenOptions { seed: cfg.seed, ..EigenOptions::new(cfg.eig_tol) };
    report.meta("seed", opts.seed);
    report.meta("eig_tol", opts.tol);
    report.meta("inner_tol", opts.inner_tol);
    report.meta("collapse_ratio", COLLAPSE_RATIO);
    let dim = cfg.n * cfg.n;
    let mut curve = Vec::new();
    for &t in &cfg.offsets {
        let bss = match sys.at(t) {
            Ok(b) => b,
            Err(e) if e.is_numerical() => {
                report.rows.push(Row::failed(vec![t], COLUMNS.len(), &e));
                continue;
            }
            Err(e) => return Err(e),
        };
        let counts = vec![t, bss.wavelet_count() as f64, bss.shearlet_count() as f64];
        let op = FnOperator::symmetric(dim, |x| bss.frame_operator_apply(x));
        match extremal_eigenvalues_with(&op, &opts) {
            Ok(e) => {
                let q = e.quotient();
                log::info!("t = {t}: λ ∈ [{:.4e}, {:.4e}], quotient {q:.4}", e.lambda_min, e.lambda_max);
                if q.is_finite() {
                    curve.push((t, q));
                }
                let mut values = counts;
                values.extend([
                    e.lambda_min,
                    e.lambda_max,
                    q,
                    e.iterations_min as f64,
                    e.iterations_max as f64,
                ]);
                report.rows.push(Row::ok(values));
            }
            Err(e) if e.is_numerical() => report.rows.push(Row::failed(counts, COLUMNS.len(), &e)),
            Err(e) => return Err(e),
        }
    }
    curve.sort_by(|a, b| a.0.total_cmp(&b.0));
    report.series.push(curve);
    Ok(report)
}

/// Ratio of the quotients at the two largest offsets (≥ 1) and ratio of the
/// quotient at the smallest offset to the larger of those two.
pub fn sweep_trend(report: &ExperimentReport) -> Option<(f64, f64)> {
    let t = report.column("t")?;
    let q = report.column("quotient")?;
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.sort_by(|&a, &b| t[a].total_cmp(&t[b]));
    if order.len() < 3 {
        return None;
    }
    let (a, b) = (q[order[order.len() - 1]], q[order[order.len() - 2]]);
    let plateau = a.max(b);
    Some((plateau / a.min(b), q[order[0]] / plateau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::tiny_config;

    #[test]
    fn tiny_sweep_rows() {
        let cfg = RunConfig { offsets: vec![-40.0, -8.0, 0.0, 4.0], ..tiny_config() };
        let sys = Systems::build(&cfg).unwrap();
        let r = frame_bound_sweep(&sys, &cfg).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert!(r.all_ok());
        let w = r.column("wavelets").unwrap();
        assert!(w.windows(2).all(|p| p[0] <= p[1]));
        let q = r.column("quotient").unwrap();
        assert!(q.iter().all(|&v| v >= 1.0));
        let (plateau, blow) = sweep_trend(&r).unwrap();
        assert!(plateau >= 1.0 && blow > 0.0);
        let again = frame_bound_sweep(&sys, &cfg).unwrap();
        assert_eq!(again.rows, r.rows);
    }
}
