//! Smooth periodic test fields and finite-difference Sobolev proxies.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, Error, Result};

/// Random trigonometric polynomial of degree `k_max` per axis, sampled at
/// pixel centers. Amplitudes fall off like `1/(1 + |k|²)`.
pub fn band_limited_field(n: usize, k_max: i32, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1.0 / n as f64;
    let mut terms = Vec::new();
    for k1 in -k_max..=k_max {
        for k2 in 0..=k_max {
            if k2 == 0 && k1 < 0 {
                continue;
            }
            let damp = 1.0 / (1.0 + (k1 * k1 + k2 * k2) as f64);
            let a: f64 = rng.gen_range(-1.0..1.0) * damp;
            let phase: f64 = rng.gen_range(0.0..TAU);
            terms.push((k1 as f64, k2 as f64, a, phase));
        }
    }
    let mut g = vec![0.0; n * n];
    for (i, row) in g.chunks_exact_mut(n).enumerate() {
        let x1 = (i as f64 + 0.5) * h;
        for (j, v) in row.iter_mut().enumerate() {
            let x2 = (j as f64 + 0.5) * h;
            *v = terms.iter().map(|&(k1, k2, a, p)| a * (TAU * (k1 * x1 + k2 * x2) + p).cos()).sum();
        }
    }
    g
}

/// `‖f‖²_{L²} + Σ_{1≤|α|≤s} (|α| choose α)‖∂^α f‖²` with periodic forward
/// differences, `s ∈ {0, 1, 2}`, integrals as `h²`-weighted sums.
pub fn hs_proxy(g: &[f64], n: usize, s: u32) -> Result<f64> {
    check_len(n * n, g.len())?;
    if s > 2 {
        return Err(Error::Config(format!("Sobolev proxy supports s ≤ 2, got {s}")));
    }
    let h = 1.0 / n as f64;
    let at = |i: usize, j: usize| g[(i % n) * n + j % n];
    let mut total = g.iter().map(|v| v * v).sum::<f64>();
    if s >= 1 {
        for i in 0..n {
            for j in 0..n {
                let d1 = (at(i + 1, j) - at(i, j)) / h;
                let d2 = (at(i, j + 1) - at(i, j)) / h;
                total += d1 * d1 + d2 * d2;
            }
        }
    }
    if s >= 2 {
        for i in 0..n {
            for j in 0..n {
                let c = at(i, j);
                let d11 = (at(i + 2, j) - 2.0 * at(i + 1, j) + c) / (h * h);
                let d22 = (at(i, j + 2) - 2.0 * at(i, j + 1) + c) / (h * h);
                let d12 = (at(i + 1, j + 1) - at(i + 1, j) - at(i, j + 1) + c) / (h * h);
                total += d11 * d11 + 2.0 * d12 * d12 + d22 * d22;
            }
        }
    }
    Ok(total * h * h)
}

/// `h² Σ 2^{2 j_n s} c_n²`, the grid analogue of the weighted sequence norm.
pub fn weighted_energy(coeffs: &[f64], scales: &[u32], s: f64, n: usize) -> Result<f64> {
    check_len(coeffs.len(), scales.len())?;
    let h2 = 1.0 / (n * n) as f64;
    Ok(coeffs.iter().zip(scales).map(|(c, &j)| (2.0 * j as f64 * s).exp2() * c * c).sum::<f64>() * h2)
}

/// Smallest and largest entry.
pub fn interval(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proxy_of_single_mode() {
        // cos(2πx₁): ‖f‖² = 1/2, ‖∂₁f‖² = 2π², ‖∂₁²f‖² = 8π⁴
        let n = 256;
        let h = 1.0 / n as f64;
        let g: Vec<f64> = (0..n * n).map(|p| (TAU * ((p / n) as f64 + 0.5) * h).cos()).collect();
        let pi2 = std::f64::consts::PI.powi(2);
        let l2 = hs_proxy(&g, n, 0).unwrap();
        assert!((l2 - 0.5).abs() < 1e-12);
        let h1 = hs_proxy(&g, n, 1).unwrap() - l2;
        assert!((h1 / (2.0 * pi2) - 1.0).abs() < 1e-3);
        let h2 = hs_proxy(&g, n, 2).unwrap() - l2 - h1;
        assert!((h2 / (8.0 * pi2 * pi2) - 1.0).abs() < 1e-3);
        assert!(hs_proxy(&g, n, 3).is_err());
    }

    #[test]
    fn fields_are_deterministic_and_nonzero() {
        let a = band_limited_field(32, 3, 5);
        assert_eq!(a, band_limited_field(32, 3, 5));
        assert_ne!(a, band_limited_field(32, 3, 6));
        assert!(a.iter().any(|v| v.abs() > 1e-3));
    }

    #[test]
    fn weighted_energy_matches_definition() {
        let e = weighted_energy(&[1.0, 2.0], &[1, 2], 1.0, 2).unwrap();
        assert!((e - (4.0 + 16.0 * 4.0) / 4.0).abs() < 1e-12);
        assert_eq!(interval(&[3.0, -1.0, 2.0]), (-1.0, 3.0));
    }
}
