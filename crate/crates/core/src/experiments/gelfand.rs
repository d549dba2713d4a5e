use std::cell::Cell;

use super::{ExperimentKind, ExperimentReport, Row, Systems};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::hybrid::BoundaryShearletSystem;
use crate::linalg::{largest_singular_value_with, CgSolver, FnOperator};
use crate::wavelet::WaveletSystem;

const COLUMNS: [&str; 5] = ["t", "s", "sigma", "iterations", "cg_iterations"];

/// `W T_Φ S⁻¹ T_w* W_w⁻¹` from full wavelet coefficients to hybrid ones, with
/// `W = diag(2^{j s})` on the hybrid scales and `W_w` on the wavelet scales.
/// `cg_count` accumulates inner CG iterations.
pub fn gelfand_composite<'a>(
    bss: &'a BoundaryShearletSystem,
    wavelets: &'a WaveletSystem,
    solver: &'a CgSolver<'a>,
    s: f64,
    cg_count: &'a Cell<usize>,
) -> Result<FnOperator<'a>> {
    let wh = bss.sobolev_weights(s)?;
    let ww: Vec<f64> = wavelets.scales().iter().map(|&j| (-(j as f64) * s).exp2()).collect();
    let solve = move |r: &[f64]| -> Result<Vec<f64>> {
        let o = solver.solve(r)?;
        cg_count.set(cg_count.get() + o.iterations);
        Ok(o.x)
    };
    let scale = |v: &[f64], w: &[f64]| v.iter().zip(w).map(|(a, b)| a * b).collect::<Vec<f64>>();
    let (wh2, ww2) = (wh.clone(), ww.clone());
    Ok(FnOperator::new(
        wavelets.len(),
        bss.len(),
        move |x| {
            let u = solve(&wavelets.synthesis(&scale(x, &ww))?)?;
            Ok(scale(&bss.analysis_stacked(&u)?, &wh))
        },
        move |z| {
            let u = solve(&bss.synthesis_stacked(&scale(z, &wh2))?)?;
            Ok(scale(&wavelets.analysis(&u)?, &ww2))
        },
    ))
}

/// Largest singular value of the composite for every offset and Sobolev order.
pub fn gelfand_table(sys: &Systems, cfg: &RunConfig) -> Result<ExperimentReport> {
    if cfg.offsets.is_empty() || cfg.s_values.is_empty() {
        return Err(Error::Config("offsets and s values must be nonempty".into()));
    }
    let mut report = ExperimentReport::new(ExperimentKind::Gelfand, cfg, &COLUMNS);
    let inner = cfg.eig_tol / 10.0;
    report.meta("seed", cfg.seed);
    report.meta("eig_tol", cfg.eig_tol);
    report.meta("inner_tol", inner);
    report.meta("reference_plateau", "3.77..3.79 at offset 7.31");
    report.meta("reference_blowup", "13.10 at offset 0.35 and s=1.5 vs 3.79 at s=0");
    let dim = cfg.n * cfg.n;
    for &t in &cfg.offsets {
        let bss = sys.at(t)?;
        let op = FnOperator::symmetric(dim, |x| bss.frame_operator_apply(x));
        let solver = CgSolver::new(&op, inner, cfg.max_iter)?;
        let mut curve = Vec::new();
        for &s in &cfg.s_values {
            let count = Cell::new(0);
            let m = gelfand_composite(&bss, &sys.wavelets, &solver, s, &count)?;
            match largest_singular_value_with(&m, cfg.eig_tol, 300, cfg.seed) {
                Ok(r) => {
                    log::info!("t = {t}, s = {s}: σ = {:.4}", r.sigma);
                    curve.push((s, r.sigma));
                    report.rows.push(Row::ok(vec![t, s, r.sigma, r.iterations as f64, count.get() as f64]));
                }
                Err(e) if e.is_numerical() => report.rows.push(Row::failed(vec![t, s], COLUMNS.len(), &e)),
                Err(e) => return Err(e),
            }
        }
        report.series.push(curve);
    }
    Ok(report)
}

/// Per offset: `(t, spread, σ(s_max)/σ(s_min))` with spread `(max σ − min σ)/min σ`.
pub fn gelfand_trend(report: &ExperimentReport) -> Vec<(f64, f64, f64)> {
    let (Some(t), Some(s), Some(sig)) = (report.column("t"), report.column("s"), report.column("sigma")) else {
        return Vec::new();
    };
    let mut offsets: Vec<f64> = t.clone();
    offsets.sort_by(f64::total_cmp);
    offsets.dedup();
    offsets
        .into_iter()
        .map(|t0| {
            let rows: Vec<(f64, f64)> = (0..t.len()).filter(|&i| t[i] == t0).map(|i| (s[i], sig[i])).collect();
            let lo = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
            let hi = rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
            let first = rows.iter().min_by(|a, b| a.0.total_cmp(&b.0)).map_or(f64::NAN, |r| r.1);
            let last = rows.iter().max_by(|a, b| a.0.total_cmp(&b.0)).map_or(f64::NAN, |r| r.1);
            (t0, (hi - lo) / lo, last / first)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::tiny_config;

    #[test]
    fn rows_per_offset_and_s() {
        let cfg = RunConfig { s_values: vec![0.0, 1.0], eig_tol: 1e-4, ..tiny_config() };
        let sys = Systems::build(&cfg).unwrap();
        let r = gelfand_table(&sys, &cfg).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert!(r.all_ok());
        let sig = r.column("sigma").unwrap();
        assert!(sig.iter().all(|&v| v > 0.5 && v.is_finite()));
        let trend = gelfand_trend(&r);
        assert_eq!(trend.len(), 2);
        assert!(trend.iter().all(|x| x.1 >= 0.0));
    }
}
