//! Cartoon-like test images `f₁ + χ_D f₂` on the unit square with a star-shaped `D`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DigitalDomain;

/// Dense sampling used for curvature, crossing and length checks.
pub const CURVE_SAMPLES: usize = 8192;

/// Minimum angle between `∂D` and `∂Ω` at a crossing.
pub const MIN_CROSSING_ANGLE_DEG: f64 = 5.0;

/// One plane wave `amp · cos(2π(k₁x₁ + k₂x₂) + phase)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub k: (f64, f64),
    pub amp: f64,
    pub phase: f64,
}

/// Low-degree polynomial plus a few plane waves.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SmoothProfile {
    pub constant: f64,
    /// Coefficients of `x₁`, `x₂`.
    pub linear: (f64, f64),
    /// Coefficients of `x₁²`, `x₁x₂`, `x₂²`.
    pub quadratic: (f64, f64, f64),
    pub waves: Vec<Wave>,
}

impl SmoothProfile {
    pub fn constant(c: f64) -> Self {
        Self { constant: c, ..Default::default() }
    }

    pub fn eval(&self, x: (f64, f64)) -> f64 {
        let (a, b) = self.linear;
        let (q11, q12, q22) = self.quadratic;
        let mut v = self.constant + a * x.0 + b * x.1 + q11 * x.0 * x.0 + q12 * x.0 * x.1 + q22 * x.1 * x.1;
        for w in &self.waves {
            v += w.amp * (2.0 * PI * (w.k.0 * x.0 + w.k.1 * x.1) + w.phase).cos();
        }
        v
    }

    /// Upper bound for `‖f‖_{C²}` on the unit square (sup of value, gradient and Hessian norms).
    pub fn c2_bound(&self) -> f64 {
        let (a, b) = self.linear;
        let (q11, q12, q22) = self.quadratic;
        let poly = self.constant.abs() + 2.0 * (a.abs() + b.abs()) + 5.0 * (q11.abs() + q12.abs() + q22.abs());
        let waves: f64 = self
            .waves
            .iter()
            .map(|w| {
                let om = 2.0 * PI * w.k.0.hypot(w.k.1);
                w.amp.abs() * (1.0 + om + om * om)
            })
            .sum();
        poly + waves
    }

    /// Random profile with `c2_bound() ≤ budget` around `constant`.
    pub fn random(rng: &mut ChaCha8Rng, constant: f64, budget: f64) -> Self {
        let mut p = SmoothProfile {
            constant: 0.0,
            linear: (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            quadratic: (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            waves: (0..2)
                .map(|_| Wave {
                    k: (rng.gen_range(-2..=2) as f64, rng.gen_range(-2..=2) as f64),
                    amp: rng.gen_range(-1.0..1.0),
                    phase: rng.gen_range(0.0..2.0 * PI),
                })
                .collect(),
        };
        let bound = p.c2_bound();
        if bound > 0.0 {
            let s = budget / bound;
            p.linear = (p.linear.0 * s, p.linear.1 * s);
            p.quadratic = (p.quadratic.0 * s, p.quadratic.1 * s, p.quadratic.2 * s);
            p.waves.iter_mut().for_each(|w| w.amp *= s);
        }
        p.constant = constant;
        p
    }
}

/// `r(θ) = r₀ + Σ_k (a_k cos kθ + b_k sin kθ)` around `center`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarRegion {
    pub center: (f64, f64),
    pub r0: f64,
    /// `(a_k, b_k)` for `k = 1, 2, …`.
    pub coeffs: Vec<(f64, f64)>,
}

impl StarRegion {
    pub fn disk(center: (f64, f64), radius: f64) -> Self {
        Self { center, r0: radius, coeffs: Vec::new() }
    }

    /// `(r, r', r'')` at angle `theta`.
    pub fn radius(&self, theta: f64) -> (f64, f64, f64) {
        let mut r = self.r0;
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for (i, &(a, b)) in self.coeffs.iter().enumerate() {
            let k = (i + 1) as f64;
            let (s, c) = (k * theta).sin_cos();
            r += a * c + b * s;
            d1 += k * (b * c - a * s);
            d2 -= k * k * (a * c + b * s);
        }
        (r, d1, d2)
    }

    pub fn point(&self, theta: f64) -> (f64, f64) {
        let r = self.radius(theta).0;
        (self.center.0 + r * theta.cos(), self.center.1 + r * theta.sin())
    }

    pub fn curvature(&self, theta: f64) -> f64 {
        let (r, d1, d2) = self.radius(theta);
        (r * r + 2.0 * d1 * d1 - r * d2).abs() / (r * r + d1 * d1).powf(1.5)
    }

    pub fn contains(&self, x: (f64, f64)) -> bool {
        let (dx, dy) = (x.0 - self.center.0, x.1 - self.center.1);
        let rho = dx.hypot(dy);
        rho < self.radius(dy.atan2(dx)).0
    }

    fn tangent(&self, theta: f64) -> (f64, f64) {
        let (r, d1, _) = self.radius(theta);
        let (s, c) = theta.sin_cos();
        (d1 * c - r * s, d1 * s + r * c)
    }
}

fn in_square(x: (f64, f64)) -> bool {
    (0.0..=1.0).contains(&x.0) && (0.0..=1.0).contains(&x.1)
}

/// A point where `∂D` crosses `∂Ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct Crossing {
    pub point: (f64, f64),
    /// Angle between `∂D` and the side of the square it crosses, in degrees.
    pub angle_deg: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CartoonSpec {
    /// Curvature bound ν.
    pub nu: f64,
    pub seed: u64,
    pub f1: SmoothProfile,
    pub f2: SmoothProfile,
    pub region: Option<StarRegion>,
    pub boundary_crossings: usize,
}

impl CartoonSpec {
    /// Validated spec; rejects curvature above `nu`, nonpositive radii,
    /// a crossing count that disagrees with the sampled curve, and crossings
    /// flatter than 5°.
    pub fn new(
        nu: f64,
        seed: u64,
        f1: SmoothProfile,
        f2: SmoothProfile,
        region: Option<StarRegion>,
        boundary_crossings: usize,
    ) -> Result<Self> {
        let spec = Self { nu, seed, f1, f2, region, boundary_crossings };
        spec.validate()?;
        Ok(spec)
    }

    /// Indicator-like disk with `f₁ = 0` and `f₂ = height`.
    pub fn disk(center: (f64, f64), radius: f64, height: f64) -> Result<Self> {
        let region = StarRegion::disk(center, radius);
        let crossings = sample_crossings(&region).len();
        Self::new(
            1.0 / radius + 1e-9,
            0,
            SmoothProfile::default(),
            SmoothProfile::constant(height),
            Some(region),
            crossings,
        )
    }

    /// No discontinuity: `f = f₁`.
    pub fn smooth(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            nu: 0.0,
            seed,
            f1: SmoothProfile::random(&mut rng, 0.3, 0.6),
            f2: SmoothProfile::default(),
            region: None,
            boundary_crossings: 0,
        }
    }

    /// Random star region with curvature ≤ `nu` meeting `∂Ω` in exactly
    /// `crossings` transversal points (0 or 2), by rejection sampling.
    pub fn random(nu: f64, seed: u64, crossings: usize) -> Result<Self> {
        if crossings != 0 && crossings != 2 {
            return Err(Error::Config(format!("random cartoons support 0 or 2 crossings, got {crossings}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f1 = SmoothProfile::random(&mut rng, 0.2, 0.2);
        let f2 = SmoothProfile::random(&mut rng, 0.6, 0.2);
        for _ in 0..100_000 {
            let r0 = rng.gen_range(0.15..0.3);
            let coeffs: Vec<(f64, f64)> = (1..=3)
                .map(|k| {
                    let a = 0.25 * r0 / (k * k) as f64;
                    (rng.gen_range(-a..a), rng.gen_range(-a..a))
                })
                .collect();
            let center = if crossings == 0 {
                (rng.gen_range(0.4..0.6), rng.gen_range(0.4..0.6))
            } else {
                // sit the center on a random side, inside by less than r₀
                let along = rng.gen_range(0.35..0.65);
                let depth = rng.gen_range(0.3 * r0..0.8 * r0);
                match rng.gen_range(0..4) {
                    0 => (depth, along),
                    1 => (1.0 - depth, along),
                    2 => (along, depth),
                    _ => (along, 1.0 - depth),
                }
            };
            let region = StarRegion { center, r0, coeffs };
            let spec = Self { nu, seed, f1: f1.clone(), f2: f2.clone(), region: Some(region), boundary_crossings: crossings };
            if spec.validate().is_ok() {
                return Ok(spec);
            }
        }
        Err(Error::Config(format!("no star region with curvature ≤ {nu} found for seed {seed}")))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.f1.c2_bound() > 1.0 + 1e-12 || self.f2.c2_bound() > 1.0 + 1e-12 {
            return bad("smooth parts must have C² norm at most 1".into());
        }
        let Some(region) = &self.region else {
            return if self.boundary_crossings == 0 {
                Ok(())
            } else {
                bad("crossings requested without a region".into())
            };
        };
        if !(self.nu > 0.0) {
            return bad(format!("curvature bound must be positive, got {}", self.nu));
        }
        for i in 0..CURVE_SAMPLES {
            let th = 2.0 * PI * i as f64 / CURVE_SAMPLES as f64;
            if region.radius(th).0 <= 0.0 {
                return bad("star radius must stay positive".into());
            }
            let kappa = region.curvature(th);
            if kappa > self.nu {
                return bad(format!("curvature {kappa:.3} exceeds ν = {}", self.nu));
            }
        }
        let found = sample_crossings(region);
        if found.len() != self.boundary_crossings || found.len() % 2 != 0 {
            return bad(format!("curve crosses ∂Ω {} times, spec says {}", found.len(), self.boundary_crossings));
        }
        if let Some(c) = found.iter().find(|c| c.angle_deg < MIN_CROSSING_ANGLE_DEG) {
            return bad(format!("crossing at {:?} is not transversal ({:.2}°)", c.point, c.angle_deg));
        }
        Ok(())
    }

    pub fn eval(&self, x: (f64, f64)) -> f64 {
        let mut v = self.f1.eval(x);
        if let Some(r) = &self.region {
            if r.contains(x) {
                v += self.f2.eval(x);
            }
        }
        v
    }

    pub fn crossings(&self) -> Vec<Crossing> {
        self.region.as_ref().map(sample_crossings).unwrap_or_default()
    }

    /// Length of `∂D ∩ Ω` by dense polyline sampling.
    pub fn curve_length_in_domain(&self) -> f64 {
        let Some(r) = &self.region else { return 0.0 };
        let m = CURVE_SAMPLES * 4;
        let mut len = 0.0;
        let mut prev = r.point(0.0);
        for i in 1..=m {
            let p = r.point(2.0 * PI * i as f64 / m as f64);
            let mid = (0.5 * (p.0 + prev.0), 0.5 * (p.1 + prev.1));
            if in_square(mid) {
                len += (p.0 - prev.0).hypot(p.1 - prev.1);
            }
            prev = p;
        }
        len
    }
}

/// Sign changes of "inside the square" along the sampled curve, refined by bisection.
fn sample_crossings(region: &StarRegion) -> Vec<Crossing> {
    let m = CURVE_SAMPLES;
    let theta = |i: usize| 2.0 * PI * i as f64 / m as f64;
    let mut out = Vec::new();
    for i in 0..m {
        let (a, b) = (theta(i), theta(i + 1));
        if in_square(region.point(a)) == in_square(region.point(b)) {
            continue;
        }
        let inside_a = in_square(region.point(a));
        let (mut lo, mut hi) = (a, b);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if in_square(region.point(mid)) == inside_a {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let th = 0.5 * (lo + hi);
        let p = region.point(th);
        let t = region.tangent(th);
        // side hit: the coordinate closest to 0 or 1
        let d = [p.0.abs(), (1.0 - p.0).abs(), p.1.abs(), (1.0 - p.1).abs()];
        let side = (0..4).min_by(|&i, &j| d[i].total_cmp(&d[j])).unwrap();
        let tn = t.0.hypot(t.1);
        // sides 0,1 are x₁ = const (tangent (0,1)); sides 2,3 are x₂ = const
        let along = if side < 2 { t.1.abs() } else { t.0.abs() } / tn;
        let angle_deg = along.clamp(-1.0, 1.0).acos().to_degrees();
        out.push(Crossing { point: p, angle_deg });
    }
    out
}

/// `g[p] = f₁(p) + [p ∈ D] f₂(p)` at pixel centers, row-major.
pub fn rasterize_cartoon(spec: &CartoonSpec, domain: &DigitalDomain) -> Result<Vec<f64>> {
    spec.validate()?;
    Ok(domain.centers().map(|x| spec.eval(x)).collect())
}

/// Average `2×2` blocks of an `n×n` grid.
pub fn downsample2(g: &[f64], n: usize) -> Vec<f64> {
    let h = n / 2;
    let mut out = vec![0.0; h * h];
    for i in 0..h {
        for j in 0..h {
            let s = g[2 * i * n + 2 * j] + g[2 * i * n + 2 * j + 1] + g[(2 * i + 1) * n + 2 * j] + g[(2 * i + 1) * n + 2 * j + 1];
            out[i * h + j] = 0.25 * s;
        }
    }
    out
}

/// Sanity metrics of a raster.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothnessReport {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    /// `Σ |Δg|` over horizontal and vertical neighbor pairs, times the pixel size.
    pub total_variation: f64,
    pub jump_threshold: f64,
    /// Crofton estimate from thresholded differences in four directions.
    pub jump_length: f64,
    /// Reference length from the spec, when known.
    pub analytic_length: Option<f64>,
}

/// Jump differences must exceed this fraction of the value range.
pub const JUMP_FRACTION: f64 = 0.25;

pub fn reference_smoothness_report(g: &[f64], n: usize, analytic_length: Option<f64>) -> Result<SmoothnessReport> {
    crate::error::check_len(n * n, g.len())?;
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("grid has non-finite values".into()));
    }
    let min = g.iter().copied().fold(f64::INFINITY, f64::min);
    let max = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let h = 1.0 / n as f64;
    let mut tv = 0.0;
    let at = |i: usize, j: usize| g[i * n + j];
    for i in 0..n {
        for j in 0..n {
            if j + 1 < n {
                tv += (at(i, j + 1) - at(i, j)).abs();
            }
            if i + 1 < n {
                tv += (at(i + 1, j) - at(i, j)).abs();
            }
        }
    }
    // a smooth field never beats the threshold: its neighbor differences are O(h)
    let thr = (JUMP_FRACTION * (max - min)).max(4.0 * h);
    let mut axis = 0usize;
    let mut diag = 0usize;
    for i in 0..n {
        for j in 0..n {
            if j + 1 < n && (at(i, j + 1) - at(i, j)).abs() > thr {
                axis += 1;
            }
            if i + 1 < n && (at(i + 1, j) - at(i, j)).abs() > thr {
                axis += 1;
            }
            if i + 1 < n && j + 1 < n && (at(i + 1, j + 1) - at(i, j)).abs() > thr {
                diag += 1;
            }
            if i + 1 < n && j >= 1 && (at(i + 1, j - 1) - at(i, j)).abs() > thr {
                diag += 1;
            }
        }
    }
    let jump_length = PI / 8.0 * (axis as f64 * h + diag as f64 * h / 2f64.sqrt());
    Ok(SmoothnessReport {
        n,
        min,
        max,
        total_variation: tv * h,
        jump_threshold: thr,
        jump_length,
        analytic_length,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_area_and_length() {
        let spec = CartoonSpec::disk((0.5, 0.5), 0.25, 1.0).unwrap();
        assert_eq!(spec.boundary_crossings, 0);
        for n in [64, 256] {
            let d = DigitalDomain::new(n).unwrap();
            let g = rasterize_cartoon(&spec, &d).unwrap();
            let count = g.iter().filter(|&&v| v == 1.0).count() as f64;
            let nf = n as f64;
            let area = PI * 0.0625 * nf * nf;
            assert!((count - area).abs() <= 4.0 * 0.25 * nf * PI, "{count} vs {area}");
        }
        let d = DigitalDomain::new(256).unwrap();
        let g = rasterize_cartoon(&spec, &d).unwrap();
        let rep = reference_smoothness_report(&g, 256, Some(spec.curve_length_in_domain())).unwrap();
        let exact = 2.0 * PI * 0.25;
        assert!((rep.jump_length - exact).abs() < 0.1 * exact, "{}", rep.jump_length);
        assert!((rep.analytic_length.unwrap() - exact).abs() < 1e-6);
    }

    #[test]
    fn smooth_has_no_jumps() {
        let spec = CartoonSpec::smooth(3);
        assert!(spec.f1.c2_bound() <= 1.0);
        let d = DigitalDomain::new(128).unwrap();
        let g = rasterize_cartoon(&spec, &d).unwrap();
        let rep = reference_smoothness_report(&g, 128, None).unwrap();
        assert_eq!(rep.jump_length, 0.0);
    }

    #[test]
    fn random_star_crosses_twice() {
        let spec = CartoonSpec::random(40.0, 11, 2).unwrap();
        let cs = spec.crossings();
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|c| c.angle_deg >= MIN_CROSSING_ANGLE_DEG));
        let d = DigitalDomain::new(256).unwrap();
        let g = rasterize_cartoon(&spec, &d).unwrap();
        let rep = reference_smoothness_report(&g, 256, Some(spec.curve_length_in_domain())).unwrap();
        let exact = rep.analytic_length.unwrap();
        assert!(exact > 0.0 && rep.jump_length.is_finite());
        assert!((rep.jump_length - exact).abs() < 0.15 * exact, "{} vs {exact}", rep.jump_length);
        // same seed, same grid
        let again = CartoonSpec::random(40.0, 11, 2).unwrap();
        assert_eq!(rasterize_cartoon(&again, &d).unwrap(), g);
        let inner = CartoonSpec::random(40.0, 5, 0).unwrap();
        assert!(inner.crossings().is_empty());
    }

    #[test]
    fn rejects_bad_specs() {
        let wavy = StarRegion { center: (0.5, 0.5), r0: 0.2, coeffs: vec![(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.05)] };
        let e = CartoonSpec::new(10.0, 0, SmoothProfile::default(), SmoothProfile::constant(1.0), Some(wavy), 0);
        assert!(e.is_err());
        // a tangential touch is not transversal
        let touching = StarRegion::disk((0.5, 0.2), 0.2 + 1e-4);
        let n = sample_crossings(&touching).len();
        let e = CartoonSpec::new(10.0, 0, SmoothProfile::default(), SmoothProfile::constant(1.0), Some(touching), n);
        assert!(e.is_err());
        let wrong = CartoonSpec::new(10.0, 0, SmoothProfile::default(), SmoothProfile::constant(1.0), Some(StarRegion::disk((0.0, 0.5), 0.2)), 0);
        assert!(wrong.is_err());
        let rough = SmoothProfile::constant(2.0);
        assert!(CartoonSpec::new(10.0, 0, rough, SmoothProfile::default(), None, 0).is_err());
    }

    #[test]
    fn doubling_consistency() {
        let spec = CartoonSpec::random(40.0, 2, 2).unwrap();
        let err = |n: usize| {
            let g = rasterize_cartoon(&spec, &DigitalDomain::new(n).unwrap()).unwrap();
            let g2 = rasterize_cartoon(&spec, &DigitalDomain::new(2 * n).unwrap()).unwrap();
            let d = downsample2(&g2, 2 * n);
            g.iter().zip(&d).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / (n * n) as f64
        };
        let ratio = err(128) / err(256);
        assert!((1.5..=2.5).contains(&ratio), "{ratio}");
    }
}
