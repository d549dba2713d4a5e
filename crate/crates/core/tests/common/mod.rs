//! Acceptance checks shared by the `acceptance` target and the focused tests.

#![allow(dead_code)]

use std::cell::Cell;
use std::time::Instant;

use bshear::config::RunConfig;
use bshear::experiments::{
    cartoon_grid, cross_decay_curve, frame_bound_sweep, gelfand_composite, gelfand_table, nterm_curve, sweep_trend,
    Systems,
};
use bshear::geometry::{boundary_distance, tubular_region, DigitalDomain};
use bshear::hybrid::INTERIOR_LEAK;
use bshear::linalg::{
    dot, extremal_eigenvalues_with, largest_singular_value_with, norm, CgSolver, EigenOptions, FnOperator,
    LinearOperator,
};
use bshear::sobolev::{band_limited_field, hs_proxy, interval, weighted_energy};
use bshear::wavelet::WaveletFamily;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Check {
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

pub fn timed(f: impl FnOnce() -> (bool, String)) -> Check {
    let start = Instant::now();
    let (pass, detail) = f();
    Check { pass, detail, seconds: start.elapsed().as_secs_f64() }
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    d / b.iter().map(|y| y * y).sum::<f64>().sqrt().max(1e-300)
}

fn random(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn config(n: usize, scales: u32, wavelet: WaveletFamily) -> RunConfig {
    RunConfig { n, scales, wavelet, ..Default::default() }
}

/// Dense assembly at n = 32, 3 scales against the matrix-free operators.
pub fn oracle() -> (bool, String) {
    let cfg = config(32, 3, WaveletFamily::default());
    let sys = Systems::build(&cfg).unwrap();
    let bss = sys.at(0.0).unwrap();
    let n = 32;
    let (dim, m) = (n * n, bss.len());

    // rows of T_Φ: wavelet atoms, then shearlet atoms rolled from the centered filter response
    let sh = &sys.shearlets;
    let mut t = DMatrix::<f64>::zeros(m, dim);
    for (r, idx) in bss.theta_sel().iter().enumerate() {
        t.row_mut(r).copy_from_slice(&sys.wavelets.atom(idx).unwrap());
    }
    let centered: Vec<Vec<f64>> = (0..sh.channels().len()).map(|c| sh.centered_atom(c)).collect();
    let nw = bss.wavelet_count();
    for (r, idx) in bss.lambda0_sel().iter().enumerate() {
        let c = sh.channel_index(idx.j, idx.k, idx.iota).unwrap();
        let (p1, p2) = sh.pixel(idx, true).unwrap();
        let mut row = t.row_mut(nw + r);
        for a in 0..n {
            for b in 0..n {
                row[((a + p1) % n) * n + (b + p2) % n] = centered[c][a * n + b];
            }
        }
    }
    let s = t.transpose() * &t;

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut product_err: f64 = 0.0;
    for _ in 0..5 {
        let f = random(&mut rng, dim);
        let c = random(&mut rng, m);
        let tf = &t * DVector::from_column_slice(&f);
        product_err = product_err.max(rel(&bss.analysis_stacked(&f).unwrap(), tf.as_slice()));
        let tc = t.transpose() * DVector::from_column_slice(&c);
        product_err = product_err.max(rel(&bss.synthesis_stacked(&c).unwrap(), tc.as_slice()));
        let sf = &s * DVector::from_column_slice(&f);
        product_err = product_err.max(rel(&bss.frame_operator_apply(&f).unwrap(), sf.as_slice()));
    }

    let eig = SymmetricEigen::new(s.clone());
    let (lo, hi) = (eig.eigenvalues.min(), eig.eigenvalues.max());
    let op = FnOperator::symmetric(dim, |x| bss.frame_operator_apply(x));
    // the bottom of the spectrum is a tight cluster, so Lanczos may run to the full dimension
    let est = extremal_eigenvalues_with(&op, &EigenOptions { max_iter: dim, ..EigenOptions::new(1e-10) }).unwrap();
    let eig_err = ((est.lambda_min - lo).abs() / lo).max((est.lambda_max - hi).abs() / hi);

    // W T_Φ S⁻¹ B W_w with B the wavelet synthesis matrix
    let s_value = 1.0;
    let mut b = DMatrix::<f64>::zeros(dim, sys.wavelets.len());
    for i in 0..sys.wavelets.len() {
        b.column_mut(i).copy_from_slice(&sys.wavelets.atom(&sys.wavelets.index(i)).unwrap());
    }
    let wh = DMatrix::from_diagonal(&DVector::from_vec(bss.sobolev_weights(s_value).unwrap()));
    let ww: Vec<f64> = sys.wavelets.scales().iter().map(|&j| (-(j as f64) * s_value).exp2()).collect();
    let ww = DMatrix::from_diagonal(&DVector::from_vec(ww));
    let s_inv = s.clone().cholesky().unwrap().inverse();
    let g = wh * &t * s_inv * b * ww;

    let solver = CgSolver::new(&op, 1e-13, 5000).unwrap();
    let count = Cell::new(0);
    let comp = gelfand_composite(&bss, &sys.wavelets, &solver, s_value, &count).unwrap();
    let mut comp_err: f64 = 0.0;
    for _ in 0..3 {
        let x = random(&mut rng, comp.dim_in());
        let gx = &g * DVector::from_column_slice(&x);
        comp_err = comp_err.max(rel(&comp.apply(&x).unwrap(), gx.as_slice()));
        let z = random(&mut rng, comp.dim_out());
        let gz = g.transpose() * DVector::from_column_slice(&z);
        comp_err = comp_err.max(rel(&comp.adjoint(&z).unwrap(), gz.as_slice()));
    }
    let sigma = SymmetricEigen::new(g.transpose() * &g).eigenvalues.max().sqrt();
    let est_sigma = largest_singular_value_with(&comp, 1e-12, 500, 3).unwrap().sigma;
    let sigma_err = (est_sigma - sigma).abs() / sigma;

    let pass = product_err <= 1e-10 && comp_err <= 1e-10 && eig_err <= 1e-6 && sigma_err <= 1e-5;
    (
        pass,
        format!(
            "products {product_err:.1e}, composite {comp_err:.1e}, eigenvalues {eig_err:.1e} (λ {lo:.6}..{hi:.4}), σ {sigma_err:.1e} (σ = {sigma:.5})"
        ),
    )
}

/// Worst `|⟨Ax, y⟩ − ⟨x, A*y⟩| / (‖x‖‖y‖)` over random probes.
fn worst_pairing(
    probes: usize,
    seed: u64,
    dims: (usize, usize),
    apply: impl Fn(&[f64]) -> Vec<f64>,
    adjoint: impl Fn(&[f64]) -> Vec<f64>,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let x = random(&mut rng, dims.0);
        let y = random(&mut rng, dims.1);
        let d = (dot(&apply(&x), &y) - dot(&x, &adjoint(&y))).abs() / (norm(&x) * norm(&y));
        worst = worst.max(d);
    }
    worst
}

/// 100 probes for the wavelet, shearlet and hybrid pairs at n = 128, 4 scales.
pub fn adjoints() -> (bool, String) {
    let cfg = config(128, 4, WaveletFamily::default());
    let sys = Systems::build(&cfg).unwrap();
    let bss = sys.at(0.0).unwrap();
    let dim = 128 * 128;
    let w = &sys.wavelets;
    let sh = &sys.shearlets;
    let dw = worst_pairing(100, 1, (dim, w.len()), |x| w.analysis(x).unwrap(), |y| w.synthesis(y).unwrap());
    let ds = worst_pairing(
        100,
        2,
        (dim, sh.len(true)),
        |x| sh.analysis(x, true).unwrap(),
        |y| sh.synthesis(y, true).unwrap(),
    );
    let dh =
        worst_pairing(100, 3, (dim, bss.len()), |x| bss.analysis_stacked(x).unwrap(), |y| bss.synthesis_stacked(y).unwrap());
    let pass = dw.max(ds).max(dh) <= 1e-10;
    (pass, format!("wavelet {dw:.1e}, shearlet {ds:.1e}, hybrid {dh:.1e}"))
}

pub const SWEEP_OFFSETS: [f64; 6] = [-30.0, -20.0, -16.0, -8.0, -4.0, 0.0];

/// Frame-bound quotient over six offsets at n = 256, 4 scales, τ = 1/3, Haar.
pub fn frame_sweep() -> (bool, String) {
    let cfg = RunConfig { offsets: SWEEP_OFFSETS.to_vec(), eig_tol: 1e-3, ..config(256, 4, WaveletFamily::Daubechies(1)) };
    let sys = Systems::build(&cfg).unwrap();
    let report = frame_bound_sweep(&sys, &cfg).unwrap();
    let q = report.column("quotient").unwrap();
    let Some((plateau, blowup)) = sweep_trend(&report) else {
        return (false, "too few offsets".into());
    };
    let pass = report.all_ok() && plateau <= 1.10 && (blowup >= 5.0 || blowup.is_infinite());
    let listing: Vec<String> = SWEEP_OFFSETS.iter().zip(&q).map(|(t, q)| format!("{t}:{q:.1}")).collect();
    (pass, format!("quotients {}; plateau ratio {plateau:.3}, blow-up {blowup:.1}×", listing.join(" ")))
}

pub const GELFAND_OFFSETS: [f64; 2] = [-16.0, 0.0];

/// Largest singular values of the Gelfand composite at n = 256, Haar.
pub fn gelfand() -> (bool, String) {
    let cfg = RunConfig { offsets: GELFAND_OFFSETS.to_vec(), eig_tol: 1e-3, ..config(256, 4, WaveletFamily::Daubechies(1)) };
    let sys = Systems::build(&cfg).unwrap();
    let report = gelfand_table(&sys, &cfg).unwrap();
    let (t, s, sigma) =
        (report.column("t").unwrap(), report.column("s").unwrap(), report.column("sigma").unwrap());
    let at = |t0: f64| -> Vec<(f64, f64)> { (0..t.len()).filter(|&i| t[i] == t0).map(|i| (s[i], sigma[i])).collect() };
    let (lo_t, hi_t) = (GELFAND_OFFSETS[0], GELFAND_OFFSETS[1]);
    let top = at(hi_t);
    let base = top.iter().find(|r| r.0 == 0.0).map_or(f64::NAN, |r| r.1);
    let (mn, mx) = interval(&top.iter().map(|r| r.1).collect::<Vec<_>>());
    let spread = (mx - mn) / base;
    let low = at(lo_t);
    let get = |v: &[(f64, f64)], s0: f64| v.iter().find(|r| r.0 == s0).map_or(f64::NAN, |r| r.1);
    let blowup = get(&low, 1.5) / get(&low, 0.0);
    let pass = report.all_ok() && spread <= 0.05 && blowup >= 2.0;
    let listing: Vec<String> = (0..t.len()).map(|i| format!("({},{}):{:.3}", t[i], s[i], sigma[i])).collect();
    (pass, format!("σ {}; spread at t={hi_t} {:.1}%, σ(1.5)/σ(0) at t={lo_t} {blowup:.2}", listing.join(" "), 100.0 * spread))
}

/// `S⁻¹ S f` for 20 random f at n = 256 with CG tolerance 1e-8.
pub fn reconstruction() -> (bool, String) {
    let cfg = config(256, 4, WaveletFamily::default());
    let sys = Systems::build(&cfg).unwrap();
    let bss = sys.at(0.0).unwrap();
    let dim = 256 * 256;
    let op = FnOperator::symmetric(dim, |x| bss.frame_operator_apply(x));
    let tol = 1e-8;
    let solver = CgSolver::new(&op, tol, 5000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut iters = 0;
    for _ in 0..20 {
        let f = random(&mut rng, dim);
        let out = solver.solve(&op.apply(&f).unwrap()).unwrap();
        worst = worst.max(rel(&out.x, &f));
        iters = iters.max(out.iterations);
    }
    (worst <= 10.0 * tol, format!("worst relative error {worst:.2e} (bound {:.0e}), ≤ {iters} CG iterations", 10.0 * tol))
}

/// N-term curves of the default cartoon at n = 256, db4, t = 0.
pub fn nterm() -> (bool, String) {
    let cfg = RunConfig { offsets: vec![0.0], ..config(256, 4, WaveletFamily::default()) };
    let sys = Systems::build(&cfg).unwrap();
    let g = cartoon_grid(&cfg).unwrap();
    let report = nterm_curve(&sys.at(0.0).unwrap(), &cfg, &g).unwrap();
    let meta = |k: &str| report.metadata_value(k).unwrap_or("nan").to_string();
    let sh: f64 = meta("slope_hybrid").parse().unwrap_or(f64::NAN);
    let sw: f64 = meta("slope_wavelet").parse().unwrap_or(f64::NAN);
    let dominance = meta("dominance") == "true";
    let pass = report.all_ok() && dominance && sh <= sw - 0.2;
    (
        pass,
        format!(
            "fit N {}..{}: slope hybrid {sh:.2}, wavelet {sw:.2}, hybrid ≤ wavelet everywhere: {dominance}",
            meta("fit_n_min"),
            meta("fit_n_max")
        ),
    )
}

fn decay(offsets: &[f64]) -> (Vec<f64>, f64) {
    let cfg = RunConfig { offsets: offsets.to_vec(), ..config(128, 4, WaveletFamily::default()) };
    let sys = Systems::build(&cfg).unwrap();
    let report = cross_decay_curve(&sys, &cfg).unwrap();
    let slope = report.metadata_value("log2_slope").unwrap().parse().unwrap_or(f64::NAN);
    (report.column("energy").unwrap(), slope)
}

pub const DECAY_OFFSETS: [f64; 4] = [1.0, 2.0, 3.0, 4.0];

/// Cross-Gramian energy `E(t)` at n = 128 over offsets 1..4, with a shifted
/// window reported for reference.
pub fn cross_decay() -> (bool, String) {
    let (e, slope) = decay(&DECAY_OFFSETS);
    let strict = e.windows(2).all(|p| p[1] < p[0]);
    let pass = strict && slope <= -1.0;
    let (e_ref, slope_ref) = decay(&[-8.0, -7.0, -6.0, -5.0]);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" ");
    (
        pass,
        format!(
            "E(1..4) {}, slope {slope:.2}; reference E(-8..-5) {}, slope {slope_ref:.2}",
            fmt(&e),
            fmt(&e_ref)
        ),
    )
}

/// Offset monotonicity, interior leakage of Λ₀ and the tubular mask at n = 128.
pub fn selection() -> (bool, String) {
    let cfg = config(128, 4, WaveletFamily::default());
    let sys = Systems::build(&cfg).unwrap();
    let offsets = [-30.0, -12.0, -4.0, -1.0, 0.0, 0.5, 2.0, 6.0];
    let systems: Vec<_> = offsets.iter().map(|&t| sys.at(t).unwrap()).collect();
    let monotone = systems.windows(2).all(|p| p[0].wavelet_selection().is_subset_of(p[1].wavelet_selection()));

    let n = 128;
    let sh = &sys.shearlets;
    let bss = &systems[4];
    let kept = bss.lambda0_sel();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_leak: f64 = 0.0;
    let half = (n / 2) as i64;
    for _ in 0..2000 {
        let idx = &kept[rng.gen_range(0..kept.len())];
        let c = sh.channel_index(idx.j, idx.k, idx.iota).unwrap();
        let (p1, p2) = sh.pixel(idx, true).unwrap();
        let atom = sh.centered_atom(c);
        let (mut out, mut total) = (0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                let e = atom[a * n + b].powi(2);
                let oa = if (a as i64) < half { a as i64 } else { a as i64 - n as i64 };
                let ob = if (b as i64) < half { b as i64 } else { b as i64 - n as i64 };
                let (x, y) = (p1 as i64 + oa, p2 as i64 + ob);
                total += e;
                if !(0..n as i64).contains(&x) || !(0..n as i64).contains(&y) {
                    out += e;
                }
            }
        }
        worst_leak = worst_leak.max(out / total);
    }

    let domain = DigitalDomain::new(n).unwrap();
    let q_sh = sh.q_sh();
    let mut tube_ok = true;
    for r in [0.0, 1.0, 2.5, 4.0, 6.0] {
        let mask = tubular_region(&domain, q_sh, r).unwrap();
        let radius = q_sh * (-r).exp2();
        for i in 0..n {
            for j in 0..n {
                let x = ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
                let d = x.0.min(1.0 - x.0).min(x.1).min(1.0 - x.1);
                tube_ok &= mask.bits[i * n + j] == (d < radius);
                tube_ok &= boundary_distance(x) == d;
            }
        }
    }
    let pass = monotone && worst_leak <= INTERIOR_LEAK && tube_ok;
    (
        pass,
        format!("Θ nested over {} offsets: {monotone}; worst sampled Λ₀ leakage {worst_leak:.1e}; tubular masks exact: {tube_ok}", offsets.len()),
    )
}

/// `h² Σ 2^{2js} c²` over the hybrid coefficients divided by the H^s proxy,
/// for 20 band-limited fields; returns the ratio interval.
pub fn ratio_interval(n: usize, s: u32, hybrid: bool) -> (f64, f64) {
    // fixed coarse scale 2^{-3} so the interval is comparable across n
    let scales = n.ilog2() - 3;
    let cfg = config(n, scales, WaveletFamily::default());
    let sys = Systems::build(&cfg).unwrap();
    let bss = sys.at(0.0).unwrap();
    let wscales = sys.wavelets.scales();
    let ratios: Vec<f64> = (0..20)
        .map(|seed| {
            let g = band_limited_field(n, 4, seed);
            let e = if hybrid {
                weighted_energy(&bss.analysis_stacked(&g).unwrap(), bss.scales(), s as f64, n).unwrap()
            } else {
                weighted_energy(&sys.wavelets.analysis(&g).unwrap(), &wscales, s as f64, n).unwrap()
            };
            e / hs_proxy(&g, n, s).unwrap()
        })
        .collect();
    interval(&ratios)
}

fn drift(a: (f64, f64), b: (f64, f64)) -> f64 {
    [a.0 / b.0, b.0 / a.0, a.1 / b.1, b.1 / a.1].into_iter().fold(1.0, f64::max)
}

/// Weighted hybrid coefficients against the H¹ proxy at n = 128 and 256.
pub fn norm_equivalence() -> (bool, String) {
    let a = ratio_interval(128, 1, true);
    let b = ratio_interval(256, 1, true);
    let d = drift(a, b);
    let pass = a.1 / a.0 < 1e3 && b.1 / b.0 < 1e3 && d < 2.0;
    (
        pass,
        format!(
            "n=128 [{:.3}, {:.3}] (b/a {:.2}), n=256 [{:.3}, {:.3}] (b/a {:.2}), drift {d:.3}",
            a.0,
            a.1,
            a.1 / a.0,
            b.0,
            b.1,
            b.1 / b.0
        ),
    )
}

/// Full-basis version of the check for the wavelet system alone.
pub fn wavelet_norm_equivalence(s: u32, n: usize) -> ((f64, f64), (f64, f64), f64) {
    let a = ratio_interval(n, s, false);
    let b = ratio_interval(2 * n, s, false);
    (a, b, drift(a, b))
}
