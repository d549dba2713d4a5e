use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Separable shearlet generator `ψ = ψ¹ ⊗ φ¹`, `φ = φ¹ ⊗ φ¹`.
///
/// `φ¹` is the centered cardinal B-spline of the given order, so
/// `φ̂¹(ξ) = sinc(ξ)^order`. The 1-D wavelet is the B-spline filtered by a
/// finite high-pass with `moments` vanishing moments:
/// `ψ̂¹(ξ) = sin(πξ)^moments · sinc(ξ)^order`. Both are compactly supported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Generator {
    pub order: u8,
    pub moments: u8,
}

impl Default for Generator {
    fn default() -> Self {
        Generator { order: 4, moments: 4 }
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Centered cardinal B-spline of order `m` (degree `m − 1`).
fn bspline(m: i32, x: f64) -> f64 {
    let h = m as f64 / 2.0;
    if x.abs() >= h {
        return 0.0;
    }
    let mut acc = 0.0;
    let mut binom = 1.0;
    let mut fact = 1.0;
    for k in 1..m {
        fact *= k as f64;
    }
    for i in 0..=m {
        let t = x + h - i as f64;
        if t > 0.0 {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            acc += s * binom * t.powi(m - 1);
        }
        binom = binom * (m - i) as f64 / (i + 1) as f64;
    }
    acc / fact
}

impl Generator {
    pub fn phi1(&self, xi: f64) -> f64 {
        sinc(xi).powi(self.order as i32)
    }

    pub fn psi1(&self, xi: f64) -> f64 {
        (PI * xi).sin().powi(self.moments as i32) * sinc(xi).powi(self.order as i32)
    }

    /// Centered cardinal B-spline `φ¹` in space, support `[−order/2, order/2]`.
    pub fn phi1_spatial(&self, x: f64) -> f64 {
        bspline(self.order as i32, x)
    }

    /// `ψ¹` in space: `2^{-M}(−1)^{M/2} Σ_i (−1)^i C(M,i) φ¹(x + M/2 − i)`.
    pub fn psi1_spatial(&self, x: f64) -> f64 {
        let m = self.moments as i32;
        let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let mut acc = 0.0;
        let mut binom = 1.0;
        for i in 0..=m {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            acc += s * binom * bspline(self.order as i32, x + (m / 2 - i) as f64);
            binom = binom * (m - i) as f64 / (i + 1) as f64;
        }
        sign * acc / (m as f64).exp2()
    }

    /// Location of the maximum of `|ψ̂¹|` on `(0, 1)`.
    pub fn psi1_peak(&self) -> f64 {
        let mut best = (0.0, 0.0);
        for i in 1..20_000 {
            let x = i as f64 / 20_000.0;
            let v = self.psi1(x).abs();
            if v > best.1 {
                best = (x, v);
            }
        }
        best.0
    }

    /// Half lengths of the supports of `φ¹` and `ψ¹`.
    pub fn support_half_lengths(&self) -> (f64, f64) {
        (self.order as f64 / 2.0, (self.order + self.moments) as f64 / 2.0)
    }

    /// Decay metadata `(α, β)`: vanishing order at the origin and Fourier decay.
    pub fn decay_exponents(&self) -> (f64, f64) {
        (self.moments as f64, self.order as f64)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bspline{}-m{}", self.order, self.moments)
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Config(format!("unsupported shearlet generator '{s}' (e.g. bspline4-m4)"));
        let rest = s.trim().strip_prefix("bspline").ok_or_else(bad)?;
        let (o, m) = match rest.split_once("-m") {
            Some((o, m)) => (o, m),
            None => (rest, "4"),
        };
        let order: u8 = o.parse().map_err(|_| bad())?;
        let moments: u8 = m.parse().map_err(|_| bad())?;
        if !(2..=10).contains(&order) || moments == 0 || moments % 2 != 0 || moments > 12 {
            return Err(bad());
        }
        Ok(Generator { order, moments })
    }
}

impl TryFrom<String> for Generator {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl From<Generator> for String {
    fn from(g: Generator) -> String {
        g.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_roundtrip() {
        let g = Generator::default();
        assert_eq!(g.to_string().parse::<Generator>().unwrap(), g);
        assert_eq!("bspline6".parse::<Generator>().unwrap(), Generator { order: 6, moments: 4 });
        assert!("bspline4-m3".parse::<Generator>().is_err());
        assert!("meyer".parse::<Generator>().is_err());
    }

    #[test]
    fn profile_shape() {
        let g = Generator::default();
        assert_eq!(g.phi1(0.0), 1.0);
        assert_eq!(g.psi1(0.0), 0.0);
        assert!(g.psi1(1.0).abs() < 1e-20);
        let p = g.psi1_peak();
        assert!(p > 0.2 && p < 0.6, "{p}");
    }

    #[test]
    fn spatial_profiles_match_fourier_side() {
        // cubic B-spline closed form
        let g = Generator::default();
        for &x in &[0.0, 0.3, -0.7, 1.2, -1.9, 2.5] {
            let a: f64 = f64::abs(x);
            let b = if a < 1.0 {
                (4.0 - 6.0 * a * a + 3.0 * a * a * a) / 6.0
            } else if a < 2.0 {
                (2.0 - a).powi(3) / 6.0
            } else {
                0.0
            };
            assert!((g.phi1_spatial(x) - b).abs() < 1e-14);
        }
        // quadrature of the Fourier integral on the compact support
        for &xi in &[0.0, 0.2, 0.37, 0.8, 1.3] {
            let (mut re_phi, mut re_psi) = (0.0, 0.0);
            let m = 16_000;
            for i in 0..m {
                let x = -4.0 + 8.0 * (i as f64 + 0.5) / m as f64;
                let c = (2.0 * PI * xi * x).cos() * 8.0 / m as f64;
                re_phi += g.phi1_spatial(x) * c;
                re_psi += g.psi1_spatial(x) * c;
            }
            assert!((re_phi - g.phi1(xi)).abs() < 1e-6, "{xi}");
            assert!((re_psi - g.psi1(xi)).abs() < 1e-6, "{xi}");
        }
    }
}
