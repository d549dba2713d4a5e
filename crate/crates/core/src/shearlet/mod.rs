//! Cone-adapted digital shearlet system built from frequency-domain filters.
//!
//! Every channel `(j, k, ι)` is a real, even filter `H` on the `n × n` DFT
//! grid, so its spatial atom is real and centered on pixel `(0, 0)`.
//! Analysis computes `⟨f, ψ(· − p)⟩` for `p` on the channel's stride
//! lattice; synthesis is its exact adjoint.
//!
//! Scales: `j = 0` is the low-pass channel, directional scales are
//! `1..=levels`. Relative scale `j` sits at absolute dyadic scale
//! `J₀ + j − 1` with `J₀ = log₂ n − levels`, matching the wavelet system.

mod cache;
mod generator;

pub use cache::{read_cache_header, read_filter_cache, write_filter_cache, FilterCache};
pub use generator::Generator;

use std::collections::HashMap;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::fft::Fft2;
use crate::geometry::DigitalDomain;
use crate::wavelet::{support_radius, EPS_SUPP, SUPPORT_ENERGY_LEAK};

/// Angular bandwidth relative to the radial one.
const C_ANGULAR: f64 = 0.8;
/// Low-pass bandwidth relative to the coarsest directional scale.
const C_LOWPASS: f64 = 0.8;

/// `2⌈2^{j/2}⌉ + 1`, the number of shears per cone allowed at scale `j`.
pub fn shear_count(j: i64) -> Result<usize> {
    if j < 0 {
        return Err(Error::Config(format!("scale must be nonnegative, got {j}")));
    }
    if j > 120 {
        return Err(Error::Config(format!("scale {j} too large")));
    }
    let target = 1u128 << j;
    let mut c = (target as f64).sqrt().ceil() as u128;
    while c > 1 && (c - 1) * (c - 1) >= target {
        c -= 1;
    }
    while c * c < target {
        c += 1;
    }
    Ok(2 * c as usize + 1)
}

/// Default redundancy ladder `⌈j/2⌉` for `j = 1..=levels`.
pub fn default_ladder(levels: u32) -> Vec<u32> {
    (1..=levels).map(|j| j.div_ceil(2)).collect()
}

/// How lattice strides shrink from the finest scale to coarser ones.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrideRule {
    /// `(2^r, 2^{⌈r/2⌉})` for cone 1 and the transpose for cone −1, `r = levels − j`.
    #[default]
    Parabolic,
    /// `(2^r, 2^r)` for both cones.
    Isotropic,
}

impl std::str::FromStr for StrideRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "parabolic" => Ok(StrideRule::Parabolic),
            "isotropic" => Ok(StrideRule::Isotropic),
            _ => Err(Error::Config(format!("unknown stride rule '{s}' (parabolic, isotropic)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShearletParams {
    pub levels: u32,
    /// Shear level `κ_j` per directional scale; the cone holds `2·2^κ + 1` shears.
    pub ladder: Vec<u32>,
    pub generator: Generator,
    /// Lattice spacing in pixels at the finest scale.
    pub base_stride: usize,
    pub stride_rule: StrideRule,
}

impl ShearletParams {
    pub fn new(levels: u32) -> Self {
        Self {
            levels,
            ladder: default_ladder(levels),
            generator: Generator::default(),
            base_stride: 1,
            stride_rule: StrideRule::default(),
        }
    }

    pub fn with_ladder(mut self, ladder: Vec<u32>) -> Self {
        self.ladder = ladder;
        self
    }

    /// Total channel count `1 + Σ_j 2(2·2^{κ_j} + 1)`, or 0 for an empty system.
    pub fn channel_count(&self) -> usize {
        if self.levels == 0 {
            return 0;
        }
        1 + self.ladder.iter().map(|&k| 2 * (2 * (1usize << k) + 1)).sum::<usize>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ShearletIndex {
    pub j: u32,
    pub k: i32,
    /// Lattice position `(a, b)`; the atom sits on pixel `(a·s₁, b·s₂)`.
    pub m: (usize, usize),
    pub iota: i8,
}

#[derive(Clone, Debug)]
pub struct Channel {
    pub j: u32,
    pub k: i32,
    pub iota: i8,
    /// Absolute dyadic scale of the channel.
    pub abs_j: u32,
    pub stride: (usize, usize),
    /// ε-support half widths in pixels along `(x₁, x₂)`.
    pub half_width: (usize, usize),
    /// ε-support radius in pixels.
    pub radius: f64,
    filter: Vec<f64>,
}

impl Channel {
    pub fn filter(&self) -> &[f64] {
        &self.filter
    }

    pub(crate) fn grid(&self, n: usize, subsampled: bool) -> (usize, usize) {
        if subsampled {
            (n / self.stride.0, n / self.stride.1)
        } else {
            (n, n)
        }
    }

    fn strides(&self, subsampled: bool) -> (usize, usize) {
        if subsampled {
            self.stride
        } else {
            (1, 1)
        }
    }
}

#[derive(Clone, Debug)]
pub struct ShearletSystem {
    n: usize,
    params: ShearletParams,
    j0: u32,
    channels: Vec<Channel>,
    offsets_sub: Vec<usize>,
    offsets_full: Vec<usize>,
    fft: Fft2,
    small: HashMap<(usize, usize), Fft2>,
    q_sh: f64,
}

fn validate(n: usize, params: &ShearletParams) -> Result<u32> {
    let log_n = n.trailing_zeros();
    if params.levels > 0 && params.levels + 2 > log_n {
        return Err(Error::Config(format!(
            "shearlet scales must be at most {} for n = {n}, got {}",
            log_n - 2,
            params.levels
        )));
    }
    if params.ladder.len() != params.levels as usize {
        return Err(Error::Config(format!(
            "direction ladder has {} entries but {} scales were requested",
            params.ladder.len(),
            params.levels
        )));
    }
    if let Some(&k) = params.ladder.iter().find(|&&k| k > 5 || (1usize << k) * 8 > n) {
        return Err(Error::Config(format!("shear level {k} unsupported for n = {n}")));
    }
    if params.base_stride == 0
        || !params.base_stride.is_power_of_two()
        || params.base_stride * 4 > n
    {
        return Err(Error::Config(format!(
            "base stride must be a power of two at most n/4, got {}",
            params.base_stride
        )));
    }
    Ok(log_n - params.levels)
}

impl ShearletSystem {
    pub fn new(domain: &DigitalDomain, params: ShearletParams) -> Result<Self> {
        let n = domain.n();
        let j0 = validate(n, &params)?;
        let g = params.generator;
        let (h_phi, h_psi) = g.support_half_lengths();
        let mut planner = FftPlanner::new();
        let fft = Fft2::new(&mut planner, n, n);
        let mut specs: Vec<(u32, i32, i8, Vec<f64>)> = Vec::new();
        if params.levels > 0 {
            let b = C_LOWPASS * dilation(j0);
            let r = h_phi / b;
            let atom = sample_atom(n, (r, r), |x1, x2| g.phi1_spatial(b * x1) * g.phi1_spatial(b * x2));
            specs.push((0, 0, 0, spectrum_of_even(&fft, &atom)));
        }
        for (ji, &kappa) in params.ladder.iter().enumerate() {
            let j = ji as u32 + 1;
            let a = dilation(j0 + j - 1);
            let sh = (1u32 << kappa) as f64;
            let kmax = 1i32 << kappa;
            // tangential and normal support half lengths before shearing
            let t = h_phi * sh / (C_ANGULAR * a);
            for iota in [1i8, -1] {
                for k in -kmax..=kmax {
                    let s = k as f64 / sh;
                    let normal = h_psi / a + s.abs() * t;
                    let profile = |p: f64, q: f64| {
                        g.psi1_spatial(a * (p + s * q)) * g.phi1_spatial(C_ANGULAR * a * q / sh)
                    };
                    let atom = if iota == 1 {
                        sample_atom(n, (normal, t), |x1, x2| profile(x1, x2))
                    } else {
                        sample_atom(n, (t, normal), |x1, x2| profile(x2, x1))
                    };
                    specs.push((j, k, iota, spectrum_of_even(&fft, &atom)));
                }
            }
        }
        Self::from_filters(domain, params, specs)
    }

    /// Assemble a system from explicit `(j, k, ι, filter)` channels; filters are
    /// renormalized to unit atom norm.
    pub(crate) fn from_filters(
        domain: &DigitalDomain,
        params: ShearletParams,
        specs: Vec<(u32, i32, i8, Vec<f64>)>,
    ) -> Result<Self> {
        let n = domain.n();
        let j0 = validate(n, &params)?;
        if specs.len() != params.channel_count() {
            return Err(Error::Config(format!(
                "expected {} channels, got {}",
                params.channel_count(),
                specs.len()
            )));
        }
        let mut planner = FftPlanner::new();
        let fft = Fft2::new(&mut planner, n, n);
        let mut small = HashMap::new();
        let mut channels = Vec::with_capacity(specs.len());
        let mut q_sh: f64 = 0.0;
        for (j, k, iota, mut filter) in specs {
            check_len(n * n, filter.len())?;
            symmetrize(&mut filter, n);
            let energy: f64 = filter.iter().map(|h| h * h).sum();
            if !(energy > 0.0) {
                return Err(Error::Config(format!("channel ({j},{k},{iota}) has an empty filter")));
            }
            let scale = n as f64 / energy.sqrt();
            filter.iter_mut().for_each(|h| *h *= scale);
            let stride = channel_stride(&params, j, iota);
            small
                .entry((n / stride.0, n / stride.1))
                .or_insert_with(|| Fft2::new(&mut planner, n / stride.0, n / stride.1));
            let atom = centered_atom(&fft, &filter, n);
            let half_width = support_box(&atom, n);
            let radius = support_radius(&atom, n, (0.0, 0.0));
            let abs_j = if j == 0 { j0 } else { j0 + j - 1 };
            if iota != 0 {
                q_sh = q_sh.max(2.0 * radius / n as f64 * (abs_j as f64 / 2.0).exp2());
            }
            channels.push(Channel { j, k, iota, abs_j, stride, half_width, radius, filter });
        }
        let mut offsets_sub = vec![0];
        let mut offsets_full = vec![0];
        for ch in &channels {
            let (a, b) = ch.grid(n, true);
            offsets_sub.push(offsets_sub.last().unwrap() + a * b);
            offsets_full.push(offsets_full.last().unwrap() + n * n);
        }
        Ok(Self { n, params, j0, channels, offsets_sub, offsets_full, fft, small, q_sh })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &ShearletParams {
        &self.params
    }

    pub fn levels(&self) -> u32 {
        self.params.levels
    }

    pub fn ladder(&self) -> &[u32] {
        &self.params.ladder
    }

    pub fn generator(&self) -> Generator {
        self.params.generator
    }

    pub fn j0(&self) -> u32 {
        self.j0
    }

    /// Support constant in domain units: `supp ψ_{j,k,0,ι} ⊂ B_{2^{-J/2} q_sh / 2}` at absolute scale `J`.
    pub fn q_sh(&self) -> f64 {
        self.q_sh
    }

    pub fn generator_meta(&self) -> (f64, f64) {
        self.params.generator.decay_exponents()
    }

    pub(crate) fn fft(&self) -> &Fft2 {
        &self.fft
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel_index(&self, j: u32, k: i32, iota: i8) -> Option<usize> {
        self.channels.iter().position(|c| c.j == j && c.k == k && c.iota == iota)
    }

    /// Strides `(s₁, s₂)` in pixels for every scale, the low-pass at index 0, cone 1 orientation.
    pub fn strides(&self) -> Vec<(usize, usize)> {
        (0..=self.levels()).map(|j| channel_stride(&self.params, j, if j == 0 { 0 } else { 1 })).collect()
    }

    /// Number of channels at relative scale `j`.
    pub fn channels_at(&self, j: u32) -> usize {
        self.channels.iter().filter(|c| c.j == j).count()
    }

    pub fn len(&self, subsampled: bool) -> usize {
        *self.offsets(subsampled).last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    fn offsets(&self, subsampled: bool) -> &[usize] {
        if subsampled {
            &self.offsets_sub
        } else {
            &self.offsets_full
        }
    }

    /// Flat range of channel `c` in a coefficient stack.
    pub fn channel_range(&self, c: usize, subsampled: bool) -> std::ops::Range<usize> {
        let o = self.offsets(subsampled);
        o[c]..o[c + 1]
    }

    /// Lattice dimensions of channel `c`.
    pub fn channel_grid(&self, c: usize, subsampled: bool) -> (usize, usize) {
        self.channels[c].grid(self.n, subsampled)
    }

    pub fn index(&self, flat: usize, subsampled: bool) -> Result<ShearletIndex> {
        let o = self.offsets(subsampled);
        if flat >= *o.last().unwrap() {
            return Err(Error::Index(format!("shearlet coefficient {flat}")));
        }
        let c = o.partition_point(|&x| x <= flat) - 1;
        let ch = &self.channels[c];
        let (_, cols) = ch.grid(self.n, subsampled);
        let r = flat - o[c];
        Ok(ShearletIndex { j: ch.j, k: ch.k, m: (r / cols, r % cols), iota: ch.iota })
    }

    pub fn flat(&self, idx: &ShearletIndex, subsampled: bool) -> Result<usize> {
        let c = self
            .channel_index(idx.j, idx.k, idx.iota)
            .ok_or_else(|| Error::Index(format!("{idx:?}")))?;
        let (rows, cols) = self.channels[c].grid(self.n, subsampled);
        if idx.m.0 >= rows || idx.m.1 >= cols {
            return Err(Error::Index(format!("{idx:?}")));
        }
        Ok(self.offsets(subsampled)[c] + idx.m.0 * cols + idx.m.1)
    }

    /// Pixel on which the atom of `idx` is centered.
    pub fn pixel(&self, idx: &ShearletIndex, subsampled: bool) -> Result<(usize, usize)> {
        let c = self
            .channel_index(idx.j, idx.k, idx.iota)
            .ok_or_else(|| Error::Index(format!("{idx:?}")))?;
        let s = self.channels[c].strides(subsampled);
        Ok((idx.m.0 * s.0, idx.m.1 * s.1))
    }

    fn spectrum(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.forward(&mut buf);
        buf
    }

    pub fn analysis(&self, f: &[f64], subsampled: bool) -> Result<Vec<f64>> {
        check_len(self.n * self.n, f.len())?;
        let spec = self.spectrum(f);
        let mut out = vec![0.0; self.len(subsampled)];
        let mut fold = Vec::new();
        for (c, ch) in self.channels.iter().enumerate() {
            self.analyze_channel(&spec, ch, subsampled, &mut fold);
            let range = self.channel_range(c, subsampled);
            for (o, v) in out[range].iter_mut().zip(&fold) {
                *o = v.re;
            }
        }
        Ok(out)
    }

    /// Coefficients of a single channel from the spectrum of `f`.
    pub(crate) fn analyze_channel(
        &self,
        spec: &[Complex64],
        ch: &Channel,
        subsampled: bool,
        fold: &mut Vec<Complex64>,
    ) {
        let n = self.n;
        let (p1, p2) = ch.grid(n, subsampled);
        fold.clear();
        fold.resize(p1 * p2, Complex64::default());
        for u in 0..n {
            let row = &spec[u * n..(u + 1) * n];
            let hrow = &ch.filter[u * n..(u + 1) * n];
            let dst = &mut fold[(u % p1) * p2..(u % p1 + 1) * p2];
            for (chunk_s, chunk_h) in row.chunks_exact(p2).zip(hrow.chunks_exact(p2)) {
                for ((d, s), h) in dst.iter_mut().zip(chunk_s).zip(chunk_h) {
                    *d += s * *h;
                }
            }
        }
        self.small[&(p1, p2)].inverse(fold);
        let scale = 1.0 / (n * n) as f64;
        fold.iter_mut().for_each(|v| *v *= scale);
    }

    pub fn synthesis(&self, c: &[f64], subsampled: bool) -> Result<Vec<f64>> {
        check_len(self.len(subsampled), c.len())?;
        let n = self.n;
        let mut acc = vec![Complex64::default(); n * n];
        let mut small = Vec::new();
        for (ci, ch) in self.channels.iter().enumerate() {
            let coeffs = &c[self.channel_range(ci, subsampled)];
            if coeffs.iter().all(|&v| v == 0.0) {
                continue;
            }
            self.synthesize_channel(coeffs, ch, subsampled, &mut small, &mut acc);
        }
        self.fft.inverse(&mut acc);
        let scale = 1.0 / (n * n) as f64;
        Ok(acc.iter().map(|v| v.re * scale).collect())
    }

    /// Add `H · tile(FFT(coeffs))` into the spectrum accumulator.
    pub(crate) fn synthesize_channel(
        &self,
        coeffs: &[f64],
        ch: &Channel,
        subsampled: bool,
        small: &mut Vec<Complex64>,
        acc: &mut [Complex64],
    ) {
        let n = self.n;
        let (p1, p2) = ch.grid(n, subsampled);
        small.clear();
        small.extend(coeffs.iter().map(|&v| Complex64::new(v, 0.0)));
        self.small[&(p1, p2)].forward(small);
        for u in 0..n {
            let src = &small[(u % p1) * p2..(u % p1 + 1) * p2];
            let hrow = &ch.filter[u * n..(u + 1) * n];
            let arow = &mut acc[u * n..(u + 1) * n];
            for (chunk_a, chunk_h) in arow.chunks_exact_mut(p2).zip(hrow.chunks_exact(p2)) {
                for ((a, s), h) in chunk_a.iter_mut().zip(src).zip(chunk_h) {
                    *a += s * *h;
                }
            }
        }
    }

    /// Two channels on the same lattice in one inverse FFT: the real part of
    /// `fold` holds channel `a`, the imaginary part channel `b`.
    pub(crate) fn analyze_pair(&self, spec: &[Complex64], a: &Channel, b: &Channel, fold: &mut Vec<Complex64>) {
        let n = self.n;
        let (p1, p2) = a.grid(n, true);
        debug_assert_eq!((p1, p2), b.grid(n, true));
        fold.clear();
        fold.resize(p1 * p2, Complex64::default());
        for u in 0..n {
            let row = &spec[u * n..(u + 1) * n];
            let ha = &a.filter[u * n..(u + 1) * n];
            let hb = &b.filter[u * n..(u + 1) * n];
            let dst = &mut fold[(u % p1) * p2..(u % p1 + 1) * p2];
            for ((cs, ca), cb) in row.chunks_exact(p2).zip(ha.chunks_exact(p2)).zip(hb.chunks_exact(p2)) {
                for (((d, s), x), y) in dst.iter_mut().zip(cs).zip(ca).zip(cb) {
                    *d += s * Complex64::new(*x, *y);
                }
            }
        }
        self.small[&(p1, p2)].inverse(fold);
        let scale = 1.0 / (n * n) as f64;
        fold.iter_mut().for_each(|v| *v *= scale);
    }

    /// Adjoint of [`Self::analyze_pair`]: `coeffs` packs channel `a` in the
    /// real part and `b` in the imaginary part.
    pub(crate) fn synthesize_pair(
        &self,
        coeffs: &mut Vec<Complex64>,
        a: &Channel,
        b: &Channel,
        split: &mut Vec<(Complex64, Complex64)>,
        acc: &mut [Complex64],
    ) {
        let n = self.n;
        let (p1, p2) = a.grid(n, true);
        self.small[&(p1, p2)].forward(coeffs);
        split.clear();
        for r in 0..p1 {
            let rr = (p1 - r) % p1;
            for c in 0..p2 {
                let z = coeffs[r * p2 + c];
                let w = coeffs[rr * p2 + (p2 - c) % p2].conj();
                split.push(((z + w) * 0.5, (z - w) * Complex64::new(0.0, -0.5)));
            }
        }
        for u in 0..n {
            let src = &split[(u % p1) * p2..(u % p1 + 1) * p2];
            let ha = &a.filter[u * n..(u + 1) * n];
            let hb = &b.filter[u * n..(u + 1) * n];
            let arow = &mut acc[u * n..(u + 1) * n];
            for ((ch_acc, ca), cb) in arow.chunks_exact_mut(p2).zip(ha.chunks_exact(p2)).zip(hb.chunks_exact(p2)) {
                for (((d, s), x), y) in ch_acc.iter_mut().zip(src).zip(ca).zip(cb) {
                    *d += s.0 * *x + s.1 * *y;
                }
            }
        }
    }

    pub fn atom(&self, idx: &ShearletIndex, subsampled: bool) -> Result<Vec<f64>> {
        let flat = self.flat(idx, subsampled)?;
        let mut c = vec![0.0; self.len(subsampled)];
        c[flat] = 1.0;
        self.synthesis(&c, subsampled)
    }

    /// ε-support bounding box `(row_min, row_max, col_min, col_max)` of an atom in
    /// unwrapped pixel coordinates.
    pub fn bounding_box(&self, idx: &ShearletIndex, subsampled: bool) -> Result<(i64, i64, i64, i64)> {
        let (p1, p2) = self.pixel(idx, subsampled)?;
        let c = self.channel_index(idx.j, idx.k, idx.iota).unwrap();
        let (w1, w2) = self.channels[c].half_width;
        let (p1, p2, w1, w2) = (p1 as i64, p2 as i64, w1 as i64, w2 as i64);
        Ok((p1 - w1, p1 + w1, p2 - w2, p2 + w2))
    }

    /// Centered atom of channel `c` (pixel `(0,0)`), computed from its filter.
    pub fn centered_atom(&self, c: usize) -> Vec<f64> {
        centered_atom(&self.fft, &self.channels[c].filter, self.n)
    }

    /// Fraction of each lattice atom's energy falling outside `[0, n)²` when the
    /// centered atom is read as a function on `ℤ²` with offsets in `[−n/2, n/2)`.
    pub fn outside_energy(&self, c: usize, subsampled: bool) -> Vec<f64> {
        let n = self.n;
        let atom = self.centered_atom(c);
        let total: f64 = atom.iter().map(|v| v * v).sum();
        // prefix sums over the unwrapped energy map, index x + n/2
        let h = n / 2;
        let w = n + 1;
        let mut pre = vec![0.0; w * w];
        for a in 0..n {
            let x1 = (a + h) % n;
            for b in 0..n {
                let x2 = (b + h) % n;
                let e = atom[x1 * n + x2].powi(2);
                pre[(a + 1) * w + b + 1] = e + pre[a * w + b + 1] + pre[(a + 1) * w + b] - pre[a * w + b];
            }
        }
        let rect = |r0: usize, r1: usize, c0: usize, c1: usize| {
            pre[r1 * w + c1] - pre[r0 * w + c1] - pre[r1 * w + c0] + pre[r0 * w + c0]
        };
        let ch = &self.channels[c];
        let (g1, g2) = ch.grid(n, subsampled);
        let s = ch.strides(subsampled);
        // unwrapped offset x is kept iff 0 <= p + x < n, i.e. x + h in [h - p, h + n - p)
        let span = |p: usize| (h.saturating_sub(p), (h + n - p).min(n));
        let mut out = Vec::with_capacity(g1 * g2);
        for a in 0..g1 {
            let (r0, r1) = span(a * s.0);
            for b in 0..g2 {
                let (c0, c1) = span(b * s.1);
                let inside = rect(r0, r1, c0, c1);
                out.push(((total - inside) / total).max(0.0));
            }
        }
        out
    }

    /// `Σ |H|²` over all channels on the frequency grid.
    pub fn frame_symbol(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.n * self.n];
        for ch in &self.channels {
            for (a, h) in s.iter_mut().zip(&ch.filter) {
                *a += h * h;
            }
        }
        s
    }

    /// Minimum and maximum of the frame symbol.
    pub fn symbol_bounds(&self) -> (f64, f64) {
        self.frame_symbol()
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Absolute scale of every entry of a coefficient stack.
    pub fn scales(&self, subsampled: bool) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.len(subsampled));
        for (c, ch) in self.channels.iter().enumerate() {
            let r = self.channel_range(c, subsampled);
            out.extend(std::iter::repeat(ch.abs_j).take(r.len()));
        }
        out
    }
}

fn channel_stride(params: &ShearletParams, j: u32, iota: i8) -> (usize, usize) {
    let base = params.base_stride;
    if j == 0 {
        let s = base << (params.levels - 1);
        return (s, s);
    }
    let r = params.levels - j;
    let (a, b) = match params.stride_rule {
        StrideRule::Isotropic => (r, r),
        StrideRule::Parabolic => (r, r.div_ceil(2)),
    };
    let (a, b) = if iota == -1 { (b, a) } else { (a, b) };
    (base << a, base << b)
}

/// Enforce `H(ξ) = H(−ξ)`; sheared samples on the Nyquist lines break it.
fn symmetrize(h: &mut [f64], n: usize) {
    let neg = |i: usize| (n - i) % n;
    for u in 0..n {
        for v in 0..n {
            let q = neg(u) * n + neg(v);
            let p = u * n + v;
            if q > p {
                let m = 0.5 * (h[p] + h[q]);
                h[p] = m;
                h[q] = m;
            }
        }
    }
}

/// Dilation of the generator at absolute scale `J`; the finest scale
/// `log₂ n − 1` samples `ψ¹` at unit spacing.
fn dilation(abs_j: u32) -> f64 {
    ((abs_j + 1) as f64).exp2()
}

/// Periodized samples of a centered atom `f(x)` at pixel offsets `x = p/n`,
/// `f` vanishing outside `|x₁| ≤ r.0`, `|x₂| ≤ r.1` (domain units).
fn sample_atom(n: usize, r: (f64, f64), f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let nf = n as f64;
    let r1 = (r.0 * nf).ceil() as i64;
    let r2 = (r.1 * nf).ceil() as i64;
    let mut out = vec![0.0; n * n];
    for p1 in -r1..=r1 {
        let u = p1.rem_euclid(n as i64) as usize;
        for p2 in -r2..=r2 {
            let v = f(p1 as f64 / nf, p2 as f64 / nf);
            if v != 0.0 {
                out[u * n + p2.rem_euclid(n as i64) as usize] += v;
            }
        }
    }
    out
}

/// DFT of a real even grid function (real up to rounding).
fn spectrum_of_even(fft: &Fft2, atom: &[f64]) -> Vec<f64> {
    let mut buf: Vec<Complex64> = atom.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.forward(&mut buf);
    buf.iter().map(|v| v.re).collect()
}

fn centered_atom(fft: &Fft2, filter: &[f64], n: usize) -> Vec<f64> {
    let mut buf: Vec<Complex64> = filter.iter().map(|&h| Complex64::new(h, 0.0)).collect();
    fft.inverse(&mut buf);
    let scale = 1.0 / (n * n) as f64;
    buf.iter().map(|v| v.re * scale).collect()
}

/// Half widths of the smallest centered box holding every sample above `EPS_SUPP`
/// of the peak and all but `SUPPORT_ENERGY_LEAK` of the energy.
fn support_box(atom: &[f64], n: usize) -> (usize, usize) {
    let peak = atom.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let dist = |i: usize| if i <= n / 2 { i } else { n - i };
    let mut amp = (0, 0);
    let mut m1 = vec![0.0; n / 2 + 1];
    let mut m2 = vec![0.0; n / 2 + 1];
    let mut total = 0.0;
    for (p, v) in atom.iter().enumerate() {
        let (d1, d2) = (dist(p / n), dist(p % n));
        if v.abs() >= EPS_SUPP * peak {
            amp = (amp.0.max(d1), amp.1.max(d2));
        }
        let e = v * v;
        m1[d1] += e;
        m2[d2] += e;
        total += e;
    }
    let energy_width = |m: &[f64]| {
        let mut outside = 0.0;
        for w in (0..m.len()).rev() {
            if outside + m[w] > 0.5 * SUPPORT_ENERGY_LEAK * total {
                return w;
            }
            outside += m[w];
        }
        0
    };
    (amp.0.max(energy_width(&m1)), amp.1.max(energy_width(&m2)))
}
