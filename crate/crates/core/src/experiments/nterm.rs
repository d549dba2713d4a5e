use super::{ExperimentKind, ExperimentReport, Row};
use crate::cartoon::{rasterize_cartoon, CartoonSpec};
use crate::config::RunConfig;
use crate::error::{check_len, Error, Result};
use crate::hybrid::BoundaryShearletSystem;
use crate::linalg::{CgSolver, FnOperator};

const COLUMNS: [&str; 7] =
    ["N", "error_hybrid", "error_wavelet", "relative_hybrid", "relative_wavelet", "cg_iterations", "cg_residual"];

/// Raster of the cartoon described by `cfg.cartoon`.
pub fn cartoon_grid(cfg: &RunConfig) -> Result<Vec<f64>> {
    let spec = CartoonSpec::random(cfg.cartoon.nu, cfg.cartoon.seed, cfg.cartoon.crossings)?;
    rasterize_cartoon(&spec, &crate::geometry::DigitalDomain::new(cfg.n)?)
}

/// Indices sorted by decreasing magnitude, ties by index.
fn by_magnitude(c: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&a, &b| c[b].abs().total_cmp(&c[a].abs()).then(a.cmp(&b)));
    order
}

/// Indices of `ns` inside the decade centered (geometrically) on the range.
pub fn middle_decade(ns: &[usize]) -> Vec<usize> {
    let (Some(&lo), Some(&hi)) = (ns.iter().min(), ns.iter().max()) else {
        return Vec::new();
    };
    let c = ((lo as f64).ln() + (hi as f64).ln()) / 2.0;
    let half = 10f64.ln() / 2.0;
    (0..ns.len()).filter(|&i| ((ns[i] as f64).ln() - c).abs() <= half + 1e-12).collect()
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.log10(), p.1.log10())).collect();
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

/// Squared `L²` error of the `N`-term approximations of `g` by the hybrid
/// system (dual reconstruction `S⁻¹ T* c_N`) and by the full wavelet basis.
pub fn nterm_curve(bss: &BoundaryShearletSystem, cfg: &RunConfig, g: &[f64]) -> Result<ExperimentReport> {
    let n = bss.n();
    check_len(n * n, g.len())?;
    if cfg.n_terms.is_empty() {
        return Err(Error::Config("n_terms must be nonempty".into()));
    }
    let mut report = ExperimentReport::new(ExperimentKind::Nterm, cfg, &COLUMNS);
    report.meta("cg_tol", cfg.tol);
    report.meta("t", bss.config().t);
    let h2 = 1.0 / (n * n) as f64;
    let energy: f64 = g.iter().map(|v| v * v).sum::<f64>() * h2;

    let cw = bss.wavelets().analysis(g)?;
    let order_w = by_magnitude(&cw);
    // tail sums: err_w[N] = Σ_{i ≥ N} c²
    let mut tail = vec![0.0; cw.len() + 1];
    for i in (0..cw.len()).rev() {
        tail[i] = tail[i + 1] + cw[order_w[i]].powi(2);
    }

    let c = bss.analysis_stacked(g)?;
    let order = by_magnitude(&c);
    let op = FnOperator::symmetric(n * n, |x| bss.frame_operator_apply(x));
    let solver = CgSolver::new(&op, cfg.tol, cfg.max_iter)?;
    let mut kept = vec![0.0; c.len()];
    let mut filled = 0;
    let mut warm: Option<Vec<f64>> = None;
    let (mut curve_h, mut curve_w) = (Vec::new(), Vec::new());
    for &big_n in &cfg.n_terms {
        let take = big_n.min(c.len());
        for &i in &order[filled..take] {
            kept[i] = c[i];
        }
        filled = filled.max(take);
        let err_w = tail[big_n.min(cw.len())] * h2;
        let rhs = bss.synthesis_stacked(&kept)?;
        match solver.solve_from(&rhs, warm.as_deref()) {
            Ok(out) => {
                let err_h = g.iter().zip(&out.x).map(|(a, b)| (a - b).powi(2)).sum::<f64>() * h2;
                log::info!("N = {big_n}: hybrid {err_h:.4e}, wavelet {err_w:.4e}, {} CG steps", out.iterations);
                curve_h.push((big_n as f64, err_h));
                curve_w.push((big_n as f64, err_w));
                report.rows.push(Row::ok(vec![
                    big_n as f64,
                    err_h,
                    err_w,
                    err_h / energy,
                    err_w / energy,
                    out.iterations as f64,
                    out.residual,
                ]));
                warm = Some(out.x);
            }
            Err(e) if e.is_numerical() => {
                report.rows.push(Row::failed(vec![big_n as f64, f64::NAN, err_w], COLUMNS.len(), &e))
            }
            Err(e) => return Err(e),
        }
    }
    let window = middle_decade(&cfg.n_terms);
    let pick = |curve: &[(f64, f64)]| -> Vec<(f64, f64)> {
        curve.iter().filter(|p| window.iter().any(|&i| cfg.n_terms[i] as f64 == p.0)).copied().collect()
    };
    let (fit_h, fit_w) = (pick(&curve_h), pick(&curve_w));
    let dominance = fit_h.len() == window.len() && fit_h.iter().zip(&fit_w).all(|(a, b)| a.1 <= b.1);
    if let (Some(&a), Some(&b)) = (window.first(), window.last()) {
        report.meta("fit_n_min", cfg.n_terms[a]);
        report.meta("fit_n_max", cfg.n_terms[b]);
    }
    report.meta("slope_hybrid", fit_slope(&fit_h));
    report.meta("slope_wavelet", fit_slope(&fit_w));
    report.meta("dominance", dominance);
    report.meta("energy", energy);
    report.series = vec![curve_h, curve_w];
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{tiny_config, Systems};

    #[test]
    fn decade_and_slope() {
        assert_eq!(middle_decade(&[10, 100, 1000, 10000]), vec![1, 2]);
        assert_eq!(middle_decade(&[64, 128, 256, 512, 1024, 2048, 4096]), vec![2, 3, 4]);
        let pts: Vec<(f64, f64)> = (1..6).map(|k| (k as f64, (k as f64).powf(-2.0))).collect();
        assert!((fit_slope(&pts) + 2.0).abs() < 1e-12);
        assert!(fit_slope(&[(1.0, 1.0)]).is_nan());
    }

    #[test]
    fn smooth_field_is_captured_by_both() {
        let cfg = RunConfig { n_terms: vec![4, 16, 64, 256], ..tiny_config() };
        let sys = Systems::build(&cfg).unwrap();
        let g = crate::sobolev::band_limited_field(32, 1, 3);
        let r = nterm_curve(&sys.at(0.0).unwrap(), &cfg, &g).unwrap();
        assert!(r.all_ok());
        let rh = r.column("relative_hybrid").unwrap();
        let rw = r.column("relative_wavelet").unwrap();
        assert!(rh[3] <= 1e-4 && rw[3] <= 1e-4, "{rh:?} {rw:?}");
        assert!(rw.windows(2).all(|p| p[1] <= p[0]));
    }

    #[test]
    fn full_expansion_is_exact() {
        let cfg = tiny_config();
        let sys = Systems::build(&cfg).unwrap();
        let bss = sys.at(0.0).unwrap();
        let g = cartoon_grid(&RunConfig { n: 32, ..cfg.clone() }).unwrap();
        let cfg = RunConfig { n_terms: vec![bss.len()], ..cfg };
        let r = nterm_curve(&bss, &cfg, &g).unwrap();
        assert!(r.column("relative_hybrid").unwrap()[0] < 1e-12);
        assert!(r.column("relative_wavelet").unwrap()[0] < 1e-12);
    }
}
