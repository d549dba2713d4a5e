//! Matrix-free operators, conjugate gradients and extremal spectra.
//!
//! Eigenvalue estimates come from power iteration (largest) and inverse
//! iteration with CG inner solves (smallest). The estimate at each step is
//! the Rayleigh–Ritz value over the span of all iterates so far, which is
//! never worse than the plain Rayleigh quotient of the last iterate and is
//! nondecreasing in the iteration count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, Error, Result};

/// Seed for dot-test probes and iteration starts.
pub const PROBE_SEED: u64 = 0x5EED_0001;

/// Below this `λ_min / λ_max` the lower frame bound counts as unresolved.
pub const COLLAPSE_RATIO: f64 = 1e-12;

pub trait LinearOperator {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>>;
    fn is_self_adjoint(&self) -> bool;
}

type BoxedMap<'a> = Box<dyn Fn(&[f64]) -> Result<Vec<f64>> + 'a>;

/// Operator defined by closures.
pub struct FnOperator<'a> {
    dim_in: usize,
    dim_out: usize,
    apply: BoxedMap<'a>,
    adjoint: Option<BoxedMap<'a>>,
}

impl<'a> FnOperator<'a> {
    pub fn new(
        dim_in: usize,
        dim_out: usize,
        apply: impl Fn(&[f64]) -> Result<Vec<f64>> + 'a,
        adjoint: impl Fn(&[f64]) -> Result<Vec<f64>> + 'a,
    ) -> Self {
        Self { dim_in, dim_out, apply: Box::new(apply), adjoint: Some(Box::new(adjoint)) }
    }

    /// A self-adjoint operator; the adjoint is the map itself.
    pub fn symmetric(dim: usize, apply: impl Fn(&[f64]) -> Result<Vec<f64>> + 'a) -> Self {
        Self { dim_in: dim, dim_out: dim, apply: Box::new(apply), adjoint: None }
    }
}

impl LinearOperator for FnOperator<'_> {
    fn dim_in(&self) -> usize {
        self.dim_in
    }

    fn dim_out(&self) -> usize {
        self.dim_out
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim_in, x.len())?;
        (self.apply)(x)
    }

    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim_out, y.len())?;
        match &self.adjoint {
            Some(f) => f(y),
            None => (self.apply)(y),
        }
    }

    fn is_self_adjoint(&self) -> bool {
        self.adjoint.is_none()
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseOperator {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_len(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut data = vec![0.0; n * n];
        for (i, &v) in d.iter().enumerate() {
            data[i * n + i] = v;
        }
        Self { rows: n, cols: n, data }
    }

    fn symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.data[i * self.cols + j] == self.data[j * self.cols + i]))
    }
}

impl LinearOperator for DenseOperator {
    fn dim_in(&self) -> usize {
        self.cols
    }

    fn dim_out(&self) -> usize {
        self.rows
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols, x.len())?;
        Ok(self.data.chunks_exact(self.cols).map(|row| dot(row, x)).collect())
    }

    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows, y.len())?;
        let mut out = vec![0.0; self.cols];
        for (row, &v) in self.data.chunks_exact(self.cols).zip(y) {
            axpy(v, row, &mut out);
        }
        Ok(out)
    }

    fn is_self_adjoint(&self) -> bool {
        self.symmetric()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn scale(v: &mut [f64], s: f64) {
    v.iter_mut().for_each(|x| *x *= s);
}

pub(crate) fn random_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Worst relative discrepancy `|⟨Ax, y⟩ − ⟨x, A*y⟩| / (‖x‖‖y‖ max(1, ‖A‖))` over random probes.
pub fn dot_test(op: &dyn LinearOperator, probes: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let x = random_vector(&mut rng, op.dim_in());
        let y = random_vector(&mut rng, op.dim_out());
        let ax = op.apply(&x)?;
        let aty = op.adjoint(&y)?;
        let gain = (norm(&ax) / norm(&x)).max(norm(&aty) / norm(&y)).max(1.0);
        let d = (dot(&ax, &y) - dot(&x, &aty)).abs() / (norm(&x) * norm(&y) * gain);
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Dot-test tolerance for the adjoint identity.
pub const DOT_TEST_TOL: f64 = 1e-10;

/// Symmetric dot test `⟨Ax, y⟩ = ⟨x, Ay⟩` on a self-adjoint operator.
fn check_self_adjoint(op: &dyn LinearOperator) -> Result<()> {
    if op.dim_in() != op.dim_out() {
        return Err(Error::NotSelfAdjoint { discrepancy: f64::INFINITY });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let x = random_vector(&mut rng, op.dim_in());
    let y = random_vector(&mut rng, op.dim_in());
    let ax = op.apply(&x)?;
    let ay = op.apply(&y)?;
    let gain = (norm(&ax) / norm(&x)).max(norm(&ay) / norm(&y)).max(1.0);
    let d = (dot(&ax, &y) - dot(&x, &ay)).abs() / (norm(&x) * norm(&y) * gain);
    if !op.is_self_adjoint() || d > DOT_TEST_TOL {
        return Err(Error::NotSelfAdjoint { discrepancy: d });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final true relative residual `‖Ax − b‖ / ‖b‖`.
    pub residual: f64,
    /// Largest `‖r_k‖ / min_{i<k} ‖r_i‖` seen during the run.
    pub residual_growth: f64,
}

/// Conjugate gradients for a self-adjoint positive semidefinite operator,
/// validated once by a dot test.
pub struct CgSolver<'a> {
    op: &'a dyn LinearOperator,
    pub tol: f64,
    pub max_iter: usize,
}

impl<'a> CgSolver<'a> {
    pub fn new(op: &'a dyn LinearOperator, tol: f64, max_iter: usize) -> Result<Self> {
        if !(tol > 0.0) || max_iter == 0 {
            return Err(Error::Config(format!("CG needs tol > 0 and max_iter > 0, got {tol}, {max_iter}")));
        }
        check_self_adjoint(op)?;
        Ok(Self { op, tol, max_iter })
    }

    pub fn operator(&self) -> &dyn LinearOperator {
        self.op
    }

    pub fn solve(&self, b: &[f64]) -> Result<CgOutcome> {
        self.solve_from(b, None)
    }

    /// Solve `Ax = b` starting from `x0` (zero when absent).
    pub fn solve_from(&self, b: &[f64], x0: Option<&[f64]>) -> Result<CgOutcome> {
        let dim = self.op.dim_in();
        check_len(dim, b.len())?;
        let bn = norm(b);
        if bn == 0.0 {
            return Ok(CgOutcome { x: vec![0.0; dim], iterations: 0, residual: 0.0, residual_growth: 1.0 });
        }
        let mut x = match x0 {
            Some(v) => {
                check_len(dim, v.len())?;
                v.to_vec()
            }
            None => vec![0.0; dim],
        };
        let mut iterations = 0;
        let mut growth: f64 = 1.0;
        loop {
            // (re)start from the true residual
            let ax = if x.iter().all(|&v| v == 0.0) { vec![0.0; dim] } else { self.op.apply(&x)? };
            let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            let true_res = norm(&r) / bn;
            if true_res <= self.tol {
                return Ok(CgOutcome { x, iterations, residual: true_res, residual_growth: growth });
            }
            if iterations >= self.max_iter {
                return Err(Error::NoConvergence { iterations, residual: true_res });
            }
            let mut p = r.clone();
            let mut rr = dot(&r, &r);
            let mut best = rr.sqrt();
            while iterations < self.max_iter {
                let ap = self.op.apply(&p)?;
                let pap = dot(&p, &ap);
                if !(pap > 0.0) {
                    return Err(Error::NoConvergence { iterations, residual: norm(&r) / bn });
                }
                let alpha = rr / pap;
                axpy(alpha, &p, &mut x);
                axpy(-alpha, &ap, &mut r);
                iterations += 1;
                let rr_new = dot(&r, &r);
                let rn = rr_new.sqrt();
                growth = growth.max(rn / best);
                best = best.min(rn);
                if rn / bn <= self.tol {
                    break;
                }
                let beta = rr_new / rr;
                rr = rr_new;
                for (pi, ri) in p.iter_mut().zip(&r) {
                    *pi = ri + beta * *pi;
                }
            }
            if iterations >= self.max_iter {
                let ax = self.op.apply(&x)?;
                let res = norm(&b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect::<Vec<_>>()) / bn;
                if res <= self.tol {
                    return Ok(CgOutcome { x, iterations, residual: res, residual_growth: growth });
                }
                return Err(Error::NoConvergence { iterations, residual: res });
            }
        }
    }
}

/// `x` with `‖Ax − b‖/‖b‖ ≤ tol`, or an error carrying the final residual.
pub fn cg_solve(op: &dyn LinearOperator, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    Ok(CgSolver::new(op, tol, max_iter)?.solve(b)?.x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralEstimate {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub iterations_min: usize,
    pub iterations_max: usize,
    /// Relative eigen-residual `‖Av − λv‖ / λ` of the worse of the two estimates.
    pub residual: f64,
    /// False when `λ_min` fell below the resolvable threshold or its solves failed.
    pub min_resolved: bool,
}

impl SpectralEstimate {
    /// `λ_max / λ_min`, infinite when the lower bound is unresolved.
    pub fn quotient(&self) -> f64 {
        if self.min_resolved {
            self.lambda_max / self.lambda_min
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Relative tolerance of the CG solves inside inverse iteration.
    pub inner_tol: f64,
    pub inner_max_iter: usize,
    pub seed: u64,
}

impl EigenOptions {
    pub fn new(tol: f64) -> Self {
        Self { tol, max_iter: 300, inner_tol: tol / 10.0, inner_max_iter: 5000, seed: PROBE_SEED }
    }
}

/// Result of one Krylov-accelerated power iteration.
#[derive(Clone, Debug)]
pub struct PowerResult {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// Ritz values after every step.
    pub history: Vec<f64>,
}

/// Largest eigenvalue of a self-adjoint PSD map given by `step`, by power
/// iteration with Rayleigh–Ritz over all iterates. Stops when `|Δλ| ≤ tol·λ`
/// and the Ritz residual is at most `√tol·λ`, or the Krylov space becomes
/// invariant.
pub fn power_iteration(
    dim: usize,
    mut step: impl FnMut(&[f64], usize) -> Result<Vec<f64>>,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<PowerResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = random_vector(&mut rng, dim);
    let nv = norm(&v);
    scale(&mut v, 1.0 / nv);
    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut history = Vec::new();
    let mut theta_prev = f64::NEG_INFINITY;
    loop {
        let k = basis.len() - 1;
        let mut w = step(&basis[k], k)?;
        let a = dot(&basis[k], &w);
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                axpy(-c, b, &mut w);
            }
        }
        let bnorm = norm(&w);
        let theta = tridiag_max_eig(&alpha, &beta);
        history.push(theta);
        // Ritz values of nested Krylov spaces interlace
        debug_assert!(theta >= theta_prev - 1e-12 * theta.abs().max(1.0), "{theta} < {theta_prev}");
        let scale_ref = theta.abs().max(f64::MIN_POSITIVE);
        let invariant = bnorm <= 1e-13 * scale_ref.max(a.abs());
        let stalled = (theta - theta_prev).abs() <= tol * scale_ref;
        // Ritz residual ‖Ay − θy‖ = β_k |s_k|; the Ritz value error is of order its square
        let mut ritz = None;
        let mut converged = false;
        if stalled {
            let s = tridiag_eigvec(&alpha, &beta, theta);
            converged = bnorm * s[k].abs() <= tol.sqrt() * scale_ref;
            ritz = Some(s);
        }
        if invariant || converged || basis.len() >= max_iter.min(dim) {
            let s = ritz.unwrap_or_else(|| tridiag_eigvec(&alpha, &beta, theta));
            let mut vector = vec![0.0; dim];
            for (b, &c) in basis.iter().zip(&s) {
                axpy(c, b, &mut vector);
            }
            let iterations = basis.len();
            if !(invariant || converged) {
                log::warn!("power iteration stopped at {iterations} steps without reaching tol {tol:e}");
            }
            return Ok(PowerResult { value: theta, vector, iterations, history });
        }
        theta_prev = theta;
        beta.push(bnorm);
        scale(&mut w, 1.0 / bnorm);
        basis.push(w);
    }
}

/// `λ_min`, `λ_max` of a self-adjoint PSD operator.
pub fn extremal_eigenvalues(op: &dyn LinearOperator, tol: f64) -> Result<SpectralEstimate> {
    extremal_eigenvalues_with(op, &EigenOptions::new(tol))
}

pub fn extremal_eigenvalues_with(op: &dyn LinearOperator, opts: &EigenOptions) -> Result<SpectralEstimate> {
    check_self_adjoint(op)?;
    let dim = op.dim_in();
    let top = power_iteration(dim, |v, _| op.apply(v), opts.tol, opts.max_iter, opts.seed)?;
    let lambda_max = top.value;
    let res_max = eigen_residual(op, &top.vector, lambda_max)?;
    let solver = CgSolver::new(op, opts.inner_tol, opts.inner_max_iter)?;
    // warm start: once converged, A⁻¹v ≈ v / λ_min
    let mut guess_scale = 1.0 / lambda_max.max(f64::MIN_POSITIVE);
    let mut estimate = None;
    let inverse = power_iteration(
        dim,
        |v, _| {
            let x0: Vec<f64> = v.iter().map(|x| x * guess_scale).collect();
            let out = solver.solve_from(v, Some(&x0))?;
            let ray = dot(v, &out.x);
            if ray > 0.0 {
                guess_scale = ray;
            }
            estimate = Some(ray);
            Ok(out.x)
        },
        opts.tol,
        opts.max_iter,
        opts.seed ^ 1,
    );
    match inverse {
        Ok(inv) if inv.value > 0.0 => {
            let lambda_min = 1.0 / inv.value;
            let res_min = eigen_residual(op, &inv.vector, lambda_min)?;
            let resolved = lambda_min / lambda_max >= COLLAPSE_RATIO;
            Ok(SpectralEstimate {
                lambda_min,
                lambda_max,
                iterations_min: inv.iterations,
                iterations_max: top.iterations,
                residual: res_max.max(res_min),
                min_resolved: resolved,
            })
        }
        Ok(_) | Err(Error::NoConvergence { .. }) => {
            let last = estimate.filter(|&r| r > 0.0).map(|r| 1.0 / r).unwrap_or(0.0);
            Ok(SpectralEstimate {
                lambda_min: last,
                lambda_max,
                iterations_min: 0,
                iterations_max: top.iterations,
                residual: f64::INFINITY,
                min_resolved: false,
            })
        }
        Err(e) => Err(e),
    }
}

fn eigen_residual(op: &dyn LinearOperator, v: &[f64], lambda: f64) -> Result<f64> {
    let av = op.apply(v)?;
    let r: f64 = av.iter().zip(v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
    Ok(r / (lambda.abs() * norm(v)).max(f64::MIN_POSITIVE))
}

#[derive(Clone, Debug)]
pub struct SingularEstimate {
    pub sigma: f64,
    pub iterations: usize,
    pub vector: Vec<f64>,
}

/// `σ_max(M) = √λ_max(MᵀM)` by power iteration on `MᵀM`.
pub fn largest_singular_value(m: &dyn LinearOperator, tol: f64) -> Result<f64> {
    Ok(largest_singular_value_with(m, tol, 300, PROBE_SEED)?.sigma)
}

pub fn largest_singular_value_with(
    m: &dyn LinearOperator,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<SingularEstimate> {
    let r = power_iteration(m.dim_in(), |v, _| m.adjoint(&m.apply(v)?), tol, max_iter, seed)?;
    Ok(SingularEstimate { sigma: r.value.max(0.0).sqrt(), iterations: r.iterations, vector: r.vector })
}

/// Largest eigenvalue of the symmetric tridiagonal matrix by Sturm bisection.
fn tridiag_max_eig(alpha: &[f64], beta: &[f64]) -> f64 {
    let k = alpha.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let r = if i > 0 { beta[i - 1].abs() } else { 0.0 } + if i + 1 < k { beta[i].abs() } else { 0.0 };
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    // count of eigenvalues below x
    let below = |x: f64| {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..k {
            let b2 = if i > 0 { beta[i - 1] * beta[i - 1] } else { 0.0 };
            d = alpha[i] - x - if i > 0 { b2 / d } else { 0.0 };
            if d == 0.0 {
                d = -1e-300;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) >= k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Unit eigenvector of the tridiagonal matrix for eigenvalue `theta`.
fn tridiag_eigvec(alpha: &[f64], beta: &[f64], theta: f64) -> Vec<f64> {
    let k = alpha.len();
    if k == 1 {
        return vec![1.0];
    }
    // inverse iteration on (T − θ I)
    let shift = theta + 1e-10 * theta.abs().max(1e-300);
    let diag: Vec<f64> = alpha.iter().map(|a| a - shift).collect();
    let mut y = vec![1.0; k];
    for _ in 0..3 {
        y = solve_tridiag(&diag, &beta[..k - 1], y);
        let ny = norm(&y);
        if !(ny.is_finite() && ny > 0.0) {
            return (0..k).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
        }
        scale(&mut y, 1.0 / ny);
    }
    y
}

/// Symmetric tridiagonal solve by Gaussian elimination with partial pivoting;
/// zero pivots are replaced by a tiny value.
fn solve_tridiag(diag: &[f64], off: &[f64], mut b: Vec<f64>) -> Vec<f64> {
    let k = diag.len();
    let guard = |v: f64| if v == 0.0 { 1e-300 } else { v };
    let mut d = diag.to_vec();
    let mut dl = off.to_vec();
    let mut du = off.to_vec();
    for i in 0..k - 1 {
        if d[i].abs() >= dl[i].abs() {
            let f = dl[i] / guard(d[i]);
            d[i + 1] -= f * du[i];
            b[i + 1] -= f * b[i];
            dl[i] = 0.0;
        } else {
            // swap rows i and i + 1; dl[i] then holds the second superdiagonal
            let f = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            if i + 2 < k {
                dl[i] = du[i + 1];
                du[i + 1] = -f * dl[i];
            } else {
                dl[i] = 0.0;
            }
            du[i] = tmp;
            let tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - f * b[i + 1];
        }
    }
    for i in (0..k).rev() {
        let mut v = b[i];
        if i + 1 < k {
            v -= du[i] * b[i + 1];
        }
        if i + 2 < k {
            v -= dl[i] * b[i + 2];
        }
        b[i] = v / guard(d[i]);
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solve_with_pivoting() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for k in [1usize, 2, 3, 7, 40] {
            // small diagonal forces row swaps
            let d: Vec<f64> = (0..k).map(|_| 1e-3 * rng.gen_range(-1.0..1.0)).collect();
            let e: Vec<f64> = (0..k.saturating_sub(1)).map(|_| rng.gen_range(0.5..1.5)).collect();
            let b = random_vector(&mut rng, k);
            let x = solve_tridiag(&d, &e, b.clone());
            for i in 0..k {
                let mut r = d[i] * x[i];
                if i > 0 {
                    r += e[i - 1] * x[i - 1];
                }
                if i + 1 < k {
                    r += e[i] * x[i + 1];
                }
                assert!((r - b[i]).abs() < 1e-9 * (1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()))), "k={k} i={i}");
            }
        }
    }

    #[test]
    fn cg_identity_and_diagonal() {
        let id = DenseOperator::diagonal(&[1.0; 5]);
        let b = vec![1.0, -2.0, 3.0, 0.5, 4.0];
        let out = CgSolver::new(&id, 1e-12, 10).unwrap().solve(&b).unwrap();
        assert_eq!(out.iterations, 1);
        assert_eq!(out.x, b);
        let d = DenseOperator::diagonal(&[1.0, 2.0, 4.0]);
        let x = cg_solve(&d, &[1.0, 2.0, 4.0], 1e-12, 10).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert!(cg_solve(&d, &[0.0; 3], 1e-12, 10).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cg_rejects_nonsymmetric_and_reports_failure() {
        let a = DenseOperator::new(2, 2, vec![1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(CgSolver::new(&a, 1e-8, 10), Err(Error::NotSelfAdjoint { .. })));
        let d = DenseOperator::diagonal(&(1..=50).map(|i| (i * i) as f64).collect::<Vec<_>>());
        let b = vec![1.0; 50];
        match cg_solve(&d, &b, 1e-14, 3) {
            Err(Error::NoConvergence { iterations, residual }) => {
                assert_eq!(iterations, 3);
                assert!(residual > 1e-14);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cg_warm_start() {
        let d = DenseOperator::diagonal(&[1.0, 3.0, 9.0, 27.0]);
        let solver = CgSolver::new(&d, 1e-12, 20).unwrap();
        let b = [1.0, 3.0, 9.0, 27.0];
        let out = solver.solve_from(&b, Some(&[1.0; 4])).unwrap();
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn eigen_diag() {
        let d = DenseOperator::diagonal(&[1.0, 2.0, 3.0]);
        let e = extremal_eigenvalues(&d, 1e-10).unwrap();
        assert!((e.lambda_min - 1.0).abs() < 1e-8, "{e:?}");
        assert!((e.lambda_max - 3.0).abs() < 1e-8);
        assert!(e.min_resolved);
        assert!((e.quotient() - 3.0).abs() < 1e-7);
    }

    #[test]
    fn eigen_singular_flagged() {
        let d = DenseOperator::diagonal(&[0.0, 1.0]);
        let e = extremal_eigenvalues(&d, 1e-10).unwrap();
        assert!(!e.min_resolved);
        assert!(e.quotient().is_infinite());
        assert!((e.lambda_max - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eigen_dense_spectrum() {
        let vals: Vec<f64> = (0..400).map(|i| 0.5 + (i as f64 / 399.0).powi(2) * 7.5).collect();
        let d = DenseOperator::diagonal(&vals);
        let e = extremal_eigenvalues(&d, 1e-10).unwrap();
        assert!((e.lambda_min - 0.5).abs() < 1e-6 * 0.5, "{e:?}");
        assert!((e.lambda_max - 8.0).abs() < 1e-6 * 8.0, "{e:?}");
    }

    #[test]
    fn power_history_is_monotone() {
        let vals: Vec<f64> = (0..200).map(|i| 1.0 + (i as f64).sqrt()).collect();
        let d = DenseOperator::diagonal(&vals);
        let r = power_iteration(200, |v, _| d.apply(v), 1e-12, 100, 3).unwrap();
        for w in r.history.windows(2) {
            assert!(w[1] >= w[0] - 1e-12 * w[0]);
        }
    }

    #[test]
    fn singular_values() {
        let two = DenseOperator::diagonal(&[2.0; 4]);
        assert!((largest_singular_value(&two, 1e-12).unwrap() - 2.0).abs() < 1e-10);
        let m = DenseOperator::diagonal(&[1.0, 3.0]);
        assert!((largest_singular_value(&m, 1e-12).unwrap() - 3.0).abs() < 1e-10);
        let rect = DenseOperator::new(2, 3, vec![1.0, 0.0, 0.0, 0.0, 0.0, 5.0]).unwrap();
        assert!((largest_singular_value(&rect, 1e-12).unwrap() - 5.0).abs() < 1e-10);
    }

    #[test]
    fn dot_test_detects_wrong_adjoint() {
        let good = FnOperator::new(3, 2, |x| Ok(vec![x[0] + x[1], 2.0 * x[2]]), |y| Ok(vec![y[0], y[0], 2.0 * y[1]]));
        assert!(dot_test(&good, 100, 1).unwrap() < 1e-14);
        let bad = FnOperator::new(3, 2, |x| Ok(vec![x[0] + x[1], 2.0 * x[2]]), |y| Ok(vec![y[0], 0.0, 2.0 * y[1]]));
        assert!(dot_test(&bad, 10, 1).unwrap() > 1e-3);
    }

    #[test]
    fn tridiagonal_helpers() {
        let alpha = [2.0, 2.0, 2.0];
        let beta = [-1.0, -1.0];
        let top = tridiag_max_eig(&alpha, &beta);
        assert!((top - (2.0 + 2f64.sqrt())).abs() < 1e-12);
        let v = tridiag_eigvec(&alpha, &beta, top);
        assert!((v[0].abs() - 0.5).abs() < 1e-8 && (v[1].abs() - 0.5f64.sqrt()).abs() < 1e-8);
    }
}
