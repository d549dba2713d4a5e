//! Digitized unit square, boundary distances and tubular regions.
//!
//! Pixel `(i, j)` is stored at `i * n + j`; its center sits at
//! `((i + ½)/n, (j + ½)/n)` with `i` running along `x₁`.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct DigitalDomain {
    n: usize,
    pixel_size: f64,
    interior_mask: Vec<bool>,
}

impl DigitalDomain {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid size must be a power of two >= 8, got {n}"
            )));
        }
        Ok(Self {
            n,
            pixel_size: 1.0 / n as f64,
            interior_mask: vec![true; n * n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn log2_n(&self) -> u32 {
        self.n.trailing_zeros()
    }

    pub fn pixel_size(&self) -> f64 {
        self.pixel_size
    }

    pub fn interior_mask(&self) -> &[bool] {
        &self.interior_mask
    }

    /// Center of pixel `(i, j)` in domain units.
    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            (i as f64 + 0.5) * self.pixel_size,
            (j as f64 + 0.5) * self.pixel_size,
        )
    }

    pub fn centers(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(move |p| self.center(p / self.n, p % self.n))
    }
}

/// Distance from a point of the unit square to its boundary.
pub fn boundary_distance(x: (f64, f64)) -> f64 {
    x.0.min(1.0 - x.0).min(x.1).min(1.0 - x.1).max(0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceField {
    n: usize,
    d: Vec<f64>,
}

impl DistanceField {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.d
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }
}

pub fn distance_to_boundary(domain: &DigitalDomain) -> DistanceField {
    DistanceField {
        n: domain.n(),
        d: domain.centers().map(boundary_distance).collect(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinaryMask {
    n: usize,
    pub bits: Vec<bool>,
    pub meaning: String,
}

impl BinaryMask {
    pub fn new(n: usize, bits: Vec<bool>, meaning: impl Into<String>) -> Self {
        assert_eq!(bits.len(), n * n);
        Self {
            n,
            bits,
            meaning: meaning.into(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Pixel-wise inclusion `self ⊆ other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }
}

/// Pixels closer than `q_sh · 2^{-r}` to the boundary.
pub fn tubular_region(domain: &DigitalDomain, q_sh: f64, r: f64) -> Result<BinaryMask> {
    if !(q_sh > 0.0) {
        return Err(Error::Config(format!("q_sh must be positive, got {q_sh}")));
    }
    let radius = q_sh * (-r).exp2();
    let field = distance_to_boundary(domain);
    let bits = field
        .values()
        .iter()
        .zip(domain.interior_mask())
        .map(|(&d, &inside)| inside && d < radius)
        .collect();
    Ok(BinaryMask::new(domain.n(), bits, "tubular"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(DigitalDomain::new(7).is_err());
        assert!(DigitalDomain::new(4).is_err());
        assert!(DigitalDomain::new(24).is_err());
        let d = DigitalDomain::new(512).unwrap();
        assert_eq!(d.pixel_size(), 1.0 / 512.0);
        assert_eq!(d.pixel_size() * d.n() as f64, 1.0);
        assert!(d.interior_mask().iter().all(|&b| b));
    }

    #[test]
    fn pixel_centers() {
        let d = DigitalDomain::new(8).unwrap();
        assert_eq!(d.center(3, 3), (0.4375, 0.4375));
        assert_eq!(d.center(0, 0), (0.0625, 0.0625));
    }

    #[test]
    fn corner_and_center_distances() {
        let d = DigitalDomain::new(8).unwrap();
        let f = distance_to_boundary(&d);
        assert_eq!(f.at(0, 0), 1.0 / 16.0);
        for n in [8usize, 16, 64] {
            let d = DigitalDomain::new(n).unwrap();
            let f = distance_to_boundary(&d);
            let c = f.at(n / 2, n / 2);
            assert!((c - (0.5 - 1.0 / (2.0 * n as f64))).abs() < 1e-15);
        }
    }

    #[test]
    fn distance_matches_dense_boundary_sampling() {
        let d = DigitalDomain::new(32).unwrap();
        let f = distance_to_boundary(&d);
        // boundary points on a grid fine enough to hit every pixel-center projection
        let m = 32 * 64;
        let mut pts = Vec::new();
        for k in 0..=m {
            let s = k as f64 / m as f64;
            pts.extend([(s, 0.0), (s, 1.0), (0.0, s), (1.0, s)]);
        }
        for i in 0..32 {
            for j in 0..32 {
                let (x, y) = d.center(i, j);
                let brute = pts
                    .iter()
                    .map(|&(a, b)| ((x - a).powi(2) + (y - b).powi(2)).sqrt())
                    .fold(f64::INFINITY, f64::min);
                assert!((brute - f.at(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tubes() {
        let d = DigitalDomain::new(32).unwrap();
        assert_eq!(tubular_region(&d, 2.0, 0.0).unwrap().count(), 1024);
        let field = distance_to_boundary(&d);
        let t = tubular_region(&d, 0.25, 1.0).unwrap();
        let expect = field.values().iter().filter(|&&v| v < 0.125).count();
        assert_eq!(t.count(), expect);
        // four rings of width 4 pixels
        assert_eq!(expect, 1024 - 24 * 24);
        for n in [32usize, 1024] {
            let d = DigitalDomain::new(n).unwrap();
            assert_eq!(tubular_region(&d, 0.25, 20.0).unwrap().count(), 0);
        }
        assert!(tubular_region(&d, 0.0, 1.0).is_err());
    }

    #[test]
    fn distance_field_symmetry() {
        let n = 64;
        let d = DigitalDomain::new(n).unwrap();
        let f = distance_to_boundary(&d);
        for i in 0..n {
            for j in 0..n {
                let v = f.at(i, j);
                for w in [
                    f.at(j, i),
                    f.at(n - 1 - i, j),
                    f.at(i, n - 1 - j),
                    f.at(n - 1 - j, n - 1 - i),
                ] {
                    assert!((v - w).abs() < 1e-12);
                }
            }
        }
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn tube_monotone_in_r(q in 0.01f64..2.0, r in -3.0f64..10.0, dr in 0.0f64..4.0) {
                let d = DigitalDomain::new(32).unwrap();
                let wide = tubular_region(&d, q, r).unwrap();
                let thin = tubular_region(&d, q, r + dr).unwrap();
                prop_assert!(thin.is_subset_of(&wide));
            }

            #[test]
            fn distance_is_lipschitz(i in 0usize..32, j in 0usize..32, k in 0usize..32, l in 0usize..32) {
                let d = DigitalDomain::new(32).unwrap();
                let f = distance_to_boundary(&d);
                let (a, b) = (d.center(i, j), d.center(k, l));
                let dist = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
                prop_assert!((f.at(i, j) - f.at(k, l)).abs() <= dist + 1e-15);
                prop_assert!(f.at(i, j) >= 0.0 && f.at(i, j) <= 0.5f64.sqrt());
            }
        }
    }
}
