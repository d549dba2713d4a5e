//! Periodized orthonormal 2-D wavelet basis on the digital square.
//!
//! Coefficients live in the usual Mallat pyramid layout of an `n × n`
//! array. Scales are absolute: an atom at scale `j` has spacing `2^{-j}`
//! in domain units, the finest detail scale is `log₂ n − 1` and the coarse
//! scale `J₀ = log₂ n − levels` also carries the scaling functions.

mod filters;

pub use filters::WaveletFamily;

use crate::error::{check_len, Error, Result};
use crate::geometry::DigitalDomain;

/// Relative amplitude below which atom samples count as outside the support.
pub const EPS_SUPP: f64 = 1e-3;

/// Energy fraction allowed outside the measured support radius.
pub(crate) const SUPPORT_ENERGY_LEAK: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WaveletIndex {
    pub j: u32,
    /// Translation index `(a, b)` on the `2^j × 2^j` lattice.
    pub pos: (usize, usize),
    /// 0 = scaling function (only at `J₀`), 1 = x₂-detail, 2 = x₁-detail, 3 = diagonal.
    pub orientation: u8,
}

#[derive(Clone, Debug)]
pub struct WaveletSystem {
    n: usize,
    family: WaveletFamily,
    levels: u32,
    j0: u32,
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Pixel offset of the `(0, 0)` atom center for each `(scale, orientation)`.
    centers: Vec<[(f64, f64); 4]>,
    radii: Vec<f64>,
    q_w0: f64,
    q_w1: f64,
    q_w2: f64,
}

impl WaveletSystem {
    /// `levels` is the number of detail scales; it may not exceed `log₂ n − 2`.
    pub fn new(domain: &DigitalDomain, family: WaveletFamily, levels: u32) -> Result<Self> {
        let log_n = domain.log2_n();
        if levels == 0 || levels + 2 > log_n {
            return Err(Error::Config(format!(
                "wavelet levels must be in 1..={} for n = {}, got {levels}",
                log_n - 2,
                domain.n()
            )));
        }
        let mut sys = Self {
            n: domain.n(),
            family,
            levels,
            j0: log_n - levels,
            lo: family.lowpass().to_vec(),
            hi: family.highpass(),
            centers: vec![[(0.0, 0.0); 4]; levels as usize],
            radii: vec![0.0; levels as usize],
            q_w0: 0.0,
            q_w1: 0.0,
            q_w2: 1.0,
        };
        sys.measure_atoms();
        Ok(sys)
    }

    fn measure_atoms(&mut self) {
        let n = self.n;
        let mut q: f64 = 0.0;
        for (li, j) in (self.j0..self.j0 + self.levels).enumerate() {
            let mut r_scale: f64 = 0.0;
            for o in 0..4u8 {
                if o == 0 && j != self.j0 {
                    continue;
                }
                let idx = WaveletIndex { j, pos: (0, 0), orientation: o };
                let atom = self.atom_unchecked(&idx);
                let c = periodic_centroid(&atom, n);
                self.centers[li][o as usize] = c;
                let r = support_radius(&atom, n, c) / n as f64;
                r_scale = r_scale.max(r);
            }
            self.radii[li] = r_scale;
            q = q.max(r_scale * (j as f64).exp2());
        }
        // orthonormal: the dual system is the primal one
        self.q_w0 = q;
        self.q_w1 = q;
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

    pub fn family(&self) -> WaveletFamily {
        self.family
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn j0(&self) -> u32 {
        self.j0
    }

    pub fn j_max(&self) -> u32 {
        self.j0 + self.levels - 1
    }

    pub fn q_w0(&self) -> f64 {
        self.q_w0
    }

    pub fn q_w1(&self) -> f64 {
        self.q_w1
    }

    pub fn q_w2(&self) -> f64 {
        self.q_w2
    }

    /// Measured support radius (domain units) of the atoms at scale `j`.
    pub fn support_radius(&self, j: u32) -> f64 {
        self.radii[(j - self.j0) as usize]
    }

    /// Number of indices per scale: `(j, count)`, the coarse scale including scaling functions.
    pub fn scale_counts(&self) -> Vec<(u32, usize)> {
        (self.j0..=self.j_max())
            .map(|j| {
                let per = 1usize << (2 * j);
                (j, if j == self.j0 { 4 * per } else { 3 * per })
            })
            .collect()
    }

    /// Index of the coefficient stored at flat pyramid position `flat`.
    pub fn index(&self, flat: usize) -> WaveletIndex {
        let (r, c) = (flat / self.n, flat % self.n);
        let base = 1usize << self.j0;
        if r < base && c < base {
            return WaveletIndex { j: self.j0, pos: (r, c), orientation: 0 };
        }
        let j = usize::BITS - 1 - r.max(c).leading_zeros();
        let s = 1usize << j;
        if r < s {
            WaveletIndex { j, pos: (r, c - s), orientation: 1 }
        } else if c < s {
            WaveletIndex { j, pos: (r - s, c), orientation: 2 }
        } else {
            WaveletIndex { j, pos: (r - s, c - s), orientation: 3 }
        }
    }

    pub fn flat(&self, idx: &WaveletIndex) -> Result<usize> {
        let bad = || Error::Index(format!("{idx:?}"));
        if idx.j < self.j0 || idx.j > self.j_max() || idx.orientation > 3 {
            return Err(bad());
        }
        if idx.orientation == 0 && idx.j != self.j0 {
            return Err(bad());
        }
        let s = 1usize << idx.j;
        if idx.pos.0 >= s || idx.pos.1 >= s {
            return Err(bad());
        }
        let (r, c) = match idx.orientation {
            0 => idx.pos,
            1 => (idx.pos.0, idx.pos.1 + s),
            2 => (idx.pos.0 + s, idx.pos.1),
            _ => (idx.pos.0 + s, idx.pos.1 + s),
        };
        Ok(r * self.n + c)
    }

    /// Scale of each flat coefficient.
    pub fn scales(&self) -> Vec<u32> {
        (0..self.len()).map(|f| self.index(f).j).collect()
    }

    /// Atom center in domain units (wrapped into the unit square).
    pub fn center(&self, idx: &WaveletIndex) -> (f64, f64) {
        let li = (idx.j - self.j0) as usize;
        let (c1, c2) = self.centers[li][idx.orientation as usize];
        let step = (self.n >> idx.j) as f64;
        let n = self.n as f64;
        let p1 = (c1 + idx.pos.0 as f64 * step).rem_euclid(n);
        let p2 = (c2 + idx.pos.1 as f64 * step).rem_euclid(n);
        ((p1 + 0.5) / n, (p2 + 0.5) / n)
    }

    pub fn analysis(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), f.len())?;
        let n = self.n;
        let mut a = f.to_vec();
        let mut scratch = vec![0.0; n];
        let mut out = vec![0.0; n];
        let mut size = n;
        for _ in 0..self.levels {
            // along x₂ (rows of the block)
            for r in 0..size {
                let row = &mut a[r * n..r * n + size];
                scratch[..size].copy_from_slice(row);
                self.split(&scratch[..size], &mut out[..size]);
                row.copy_from_slice(&out[..size]);
            }
            // along x₁ (columns of the block)
            for c in 0..size {
                for r in 0..size {
                    scratch[r] = a[r * n + c];
                }
                self.split(&scratch[..size], &mut out[..size]);
                for r in 0..size {
                    a[r * n + c] = out[r];
                }
            }
            size /= 2;
        }
        Ok(a)
    }

    pub fn synthesis(&self, c: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), c.len())?;
        let n = self.n;
        let mut a = c.to_vec();
        let mut scratch = vec![0.0; n];
        let mut out = vec![0.0; n];
        let mut size = n >> (self.levels - 1);
        for _ in 0..self.levels {
            for col in 0..size {
                for r in 0..size {
                    scratch[r] = a[r * n + col];
                }
                self.merge(&scratch[..size], &mut out[..size]);
                for r in 0..size {
                    a[r * n + col] = out[r];
                }
            }
            for r in 0..size {
                let row = &mut a[r * n..r * n + size];
                scratch[..size].copy_from_slice(row);
                self.merge(&scratch[..size], &mut out[..size]);
                row.copy_from_slice(&out[..size]);
            }
            size *= 2;
        }
        Ok(a)
    }

    pub fn atom(&self, idx: &WaveletIndex) -> Result<Vec<f64>> {
        self.flat(idx)?;
        Ok(self.atom_unchecked(idx))
    }

    fn atom_unchecked(&self, idx: &WaveletIndex) -> Vec<f64> {
        let mut c = vec![0.0; self.len()];
        c[self.flat(idx).expect("valid index")] = 1.0;
        self.synthesis(&c).expect("length matches")
    }

    /// One periodized analysis step: `[approx | detail]`.
    fn split(&self, x: &[f64], out: &mut [f64]) {
        let len = x.len();
        let half = len / 2;
        for k in 0..half {
            let (mut s, mut d) = (0.0, 0.0);
            for (l, (&h, &g)) in self.lo.iter().zip(&self.hi).enumerate() {
                let v = x[(2 * k + l) % len];
                s += h * v;
                d += g * v;
            }
            out[k] = s;
            out[half + k] = d;
        }
    }

    fn merge(&self, y: &[f64], out: &mut [f64]) {
        let len = y.len();
        let half = len / 2;
        out.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..half {
            let (s, d) = (y[k], y[half + k]);
            for (l, (&h, &g)) in self.lo.iter().zip(&self.hi).enumerate() {
                out[(2 * k + l) % len] += h * s + g * d;
            }
        }
    }
}

/// Circular energy centroid of a grid function, in pixels.
pub(crate) fn periodic_centroid(f: &[f64], n: usize) -> (f64, f64) {
    let mut m1 = vec![0.0; n];
    let mut m2 = vec![0.0; n];
    for (p, v) in f.iter().enumerate() {
        let e = v * v;
        m1[p / n] += e;
        m2[p % n] += e;
    }
    (circular_mean(&m1), circular_mean(&m2))
}

fn circular_mean(w: &[f64]) -> f64 {
    let n = w.len() as f64;
    let (mut s, mut c) = (0.0, 0.0);
    for (i, &e) in w.iter().enumerate() {
        let th = std::f64::consts::TAU * i as f64 / n;
        s += e * th.sin();
        c += e * th.cos();
    }
    (s.atan2(c) / std::f64::consts::TAU * n).rem_euclid(n)
}

pub(crate) fn wrap(d: f64, n: f64) -> f64 {
    let d = d.rem_euclid(n);
    if d >= n / 2.0 {
        d - n
    } else {
        d
    }
}

/// Radius (pixels) around `center` holding every sample above `EPS_SUPP` of the
/// peak and all but `SUPPORT_ENERGY_LEAK` of the energy.
pub(crate) fn support_radius(f: &[f64], n: usize, center: (f64, f64)) -> f64 {
    let peak = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let total: f64 = f.iter().map(|v| v * v).sum();
    let nf = n as f64;
    let mut by_dist: Vec<(f64, f64)> = f
        .iter()
        .enumerate()
        .map(|(p, v)| {
            let d1 = wrap((p / n) as f64 - center.0, nf);
            let d2 = wrap((p % n) as f64 - center.1, nf);
            ((d1 * d1 + d2 * d2).sqrt(), *v)
        })
        .collect();
    let amp = by_dist
        .iter()
        .filter(|(_, v)| v.abs() >= EPS_SUPP * peak)
        .fold(0.0f64, |m, (d, _)| m.max(*d));
    by_dist.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut outside = 0.0;
    let mut energy_r = 0.0;
    for (d, v) in &by_dist {
        if outside + v * v > SUPPORT_ENERGY_LEAK * total {
            energy_r = *d;
            break;
        }
        outside += v * v;
    }
    amp.max(energy_r)
}
