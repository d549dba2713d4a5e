//! Boundary shearlet system: interior shearlets plus near-boundary wavelets.
//!
//! The stacked coefficient order is wavelets (pyramid order) followed by
//! shearlets (channel by channel, lattice row-major). Every entry carries its
//! absolute dyadic scale `j_n`; the shearlet low-pass sits at `J₀`.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use rustfft::num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::geometry::{boundary_distance, BinaryMask, DigitalDomain};
use crate::shearlet::{ShearletIndex, ShearletSystem};
use crate::wavelet::{WaveletIndex, WaveletSystem};

/// Energy fraction a kept shearlet may have outside the square.
pub const INTERIOR_LEAK: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HybridConfig {
    pub t: f64,
    pub tau: f64,
    pub s: f64,
    pub q_w0: f64,
    pub q_w1: f64,
    pub q_sh: f64,
}

impl HybridConfig {
    /// Offset `t` with `τ = 1/3`, `s = 0` and the support constants of the two systems.
    pub fn new(t: f64, wavelets: &WaveletSystem, shearlets: &ShearletSystem) -> Self {
        let q_sh = if shearlets.is_empty() { 1.0 } else { shearlets.q_sh() };
        Self { t, tau: 1.0 / 3.0, s: 0.0, q_w0: wavelets.q_w0(), q_w1: wavelets.q_w1(), q_sh }
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !self.t.is_finite() {
            return Err(Error::Config(format!("need τ > 0 and finite t, got τ = {}, t = {}", self.tau, self.t)));
        }
        if !(self.q_w0 > 0.0 && self.q_w1 > 0.0 && self.q_sh > 0.0) {
            return Err(Error::Config("support constants must be positive".into()));
        }
        if !(self.s >= 0.0) {
            return Err(Error::Config(format!("Sobolev order must be nonnegative, got {}", self.s)));
        }
        Ok(())
    }

    /// Distance below which a wavelet at scale `j` is kept.
    pub fn wavelet_threshold(&self, j: u32) -> f64 {
        let j = j as f64;
        (-j).exp2() * (self.q_w0 + self.q_w1) + self.q_sh * (-self.tau * (j - self.t)).exp2()
    }
}

/// Interior shearlets `Λ₀`.
#[derive(Clone, Debug)]
pub struct ShearletSelection {
    /// Kept local lattice positions per channel.
    kept: Vec<Vec<usize>>,
    keep: Vec<Vec<bool>>,
    total: usize,
}

impl ShearletSelection {
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn kept(&self, channel: usize) -> &[usize] {
        &self.kept[channel]
    }

    pub fn keep_mask(&self, channel: usize) -> &[bool] {
        &self.keep[channel]
    }

    /// Flat indices into the subsampled shearlet stack, in stacked order.
    pub fn flat(&self, shearlets: &ShearletSystem) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.total);
        for (c, kept) in self.kept.iter().enumerate() {
            let base = shearlets.channel_range(c, true).start;
            out.extend(kept.iter().map(|&p| base + p));
        }
        out
    }

    /// Pixel masks of kept atom centers, one per channel.
    pub fn masks(&self, shearlets: &ShearletSystem) -> Vec<BinaryMask> {
        let n = shearlets.n();
        self.kept
            .iter()
            .enumerate()
            .map(|(c, kept)| {
                let mut bits = vec![false; n * n];
                let (_, cols) = shearlets.channel_grid(c, true);
                let s = shearlets.channels()[c].stride;
                for &p in kept {
                    bits[(p / cols) * s.0 * n + (p % cols) * s.1] = true;
                }
                BinaryMask::new(n, bits, "shearlet-select")
            })
            .collect()
    }
}

/// Near-boundary wavelets `Θ_{t,τ}`.
#[derive(Clone, Debug)]
pub struct WaveletSelection {
    keep: Vec<bool>,
    flat: Vec<usize>,
}

impl WaveletSelection {
    pub fn len(&self) -> usize {
        self.flat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    /// Flat pyramid positions, increasing.
    pub fn flat(&self) -> &[usize] {
        &self.flat
    }

    pub fn keep_mask(&self) -> &[bool] {
        &self.keep
    }

    pub fn is_subset_of(&self, other: &WaveletSelection) -> bool {
        self.keep.len() == other.keep.len() && self.keep.iter().zip(&other.keep).all(|(&a, &b)| !a || b)
    }

    /// Pixel masks of kept atom centers, one per scale `J₀..=J_max`.
    pub fn masks(&self, wavelets: &WaveletSystem) -> Vec<BinaryMask> {
        let n = wavelets.n();
        let mut bits = vec![vec![false; n * n]; wavelets.levels() as usize];
        for &f in &self.flat {
            let idx = wavelets.index(f);
            let (x, y) = wavelets.center(&idx);
            let p = ((x * n as f64) as usize).min(n - 1) * n + ((y * n as f64) as usize).min(n - 1);
            bits[(idx.j - wavelets.j0()) as usize][p] = true;
        }
        bits.into_iter().map(|b| BinaryMask::new(n, b, "wavelet-select")).collect()
    }
}

/// Keep `(j,k,m,ι)` iff at most `INTERIOR_LEAK` of the atom's energy lies outside the square.
pub fn select_interior_shearlets(shearlets: &ShearletSystem, domain: &DigitalDomain) -> Result<ShearletSelection> {
    if shearlets.n() != domain.n() {
        return Err(Error::DomainMismatch(format!("shearlets on n = {}, domain n = {}", shearlets.n(), domain.n())));
    }
    let mut kept = Vec::with_capacity(shearlets.channels().len());
    let mut keep = Vec::with_capacity(shearlets.channels().len());
    let mut total = 0;
    for c in 0..shearlets.channels().len() {
        let outside = shearlets.outside_energy(c, true);
        let mask: Vec<bool> = outside.iter().map(|&e| e <= INTERIOR_LEAK).collect();
        let list: Vec<usize> = (0..mask.len()).filter(|&p| mask[p]).collect();
        total += list.len();
        kept.push(list);
        keep.push(mask);
    }
    Ok(ShearletSelection { kept, keep, total })
}

/// Keep `(j,m,υ)` iff `d(m, ∂Ω) < 2^{-j}(q_w0 + q_w1) + q_sh 2^{-τ(j-t)}`.
pub fn select_boundary_wavelets(
    wavelets: &WaveletSystem,
    domain: &DigitalDomain,
    config: &HybridConfig,
) -> Result<WaveletSelection> {
    if wavelets.n() != domain.n() {
        return Err(Error::DomainMismatch(format!("wavelets on n = {}, domain n = {}", wavelets.n(), domain.n())));
    }
    config.validate()?;
    let thresholds: Vec<f64> = (0..=wavelets.j_max()).map(|j| config.wavelet_threshold(j)).collect();
    let keep: Vec<bool> = (0..wavelets.len())
        .map(|f| {
            let idx = wavelets.index(f);
            boundary_distance(wavelets.center(&idx)) < thresholds[idx.j as usize]
        })
        .collect();
    let flat = (0..keep.len()).filter(|&f| keep[f]).collect();
    Ok(WaveletSelection { keep, flat })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridCoefficients {
    pub wavelet_part: Vec<f64>,
    pub shearlet_part: Vec<f64>,
    pub scale_of: Arc<[u32]>,
}

impl HybridCoefficients {
    pub fn len(&self) -> usize {
        self.wavelet_part.len() + self.shearlet_part.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stacked(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.len());
        v.extend_from_slice(&self.wavelet_part);
        v.extend_from_slice(&self.shearlet_part);
        v
    }

    /// `‖(2^{j_n s} c_n)‖₂`.
    pub fn weighted_norm(&self, s: f64) -> f64 {
        self.wavelet_part
            .iter()
            .chain(&self.shearlet_part)
            .zip(self.scale_of.iter())
            .map(|(c, &j)| (c * (j as f64 * s).exp2()).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Clone, Debug)]
pub struct BoundaryShearletSystem {
    domain: DigitalDomain,
    wavelets: Arc<WaveletSystem>,
    shearlets: Arc<ShearletSystem>,
    config: HybridConfig,
    theta: WaveletSelection,
    lambda0: Arc<ShearletSelection>,
    scales: Arc<[u32]>,
}

impl BoundaryShearletSystem {
    pub fn new(
        domain: &DigitalDomain,
        wavelets: Arc<WaveletSystem>,
        shearlets: Arc<ShearletSystem>,
        config: HybridConfig,
    ) -> Result<Self> {
        if wavelets.n() != shearlets.n() {
            return Err(Error::DomainMismatch(format!(
                "wavelets on n = {}, shearlets on n = {}",
                wavelets.n(),
                shearlets.n()
            )));
        }
        let lambda0 = Arc::new(select_interior_shearlets(&shearlets, domain)?);
        Self::assemble(domain, wavelets, shearlets, lambda0, config)
    }

    /// Same subsystems and `Λ₀`, different offsets.
    pub fn with_config(&self, config: HybridConfig) -> Result<Self> {
        Self::assemble(
            &self.domain,
            self.wavelets.clone(),
            self.shearlets.clone(),
            self.lambda0.clone(),
            config,
        )
    }

    fn assemble(
        domain: &DigitalDomain,
        wavelets: Arc<WaveletSystem>,
        shearlets: Arc<ShearletSystem>,
        lambda0: Arc<ShearletSelection>,
        config: HybridConfig,
    ) -> Result<Self> {
        let theta = select_boundary_wavelets(&wavelets, domain, &config)?;
        let mut scales = Vec::with_capacity(theta.len() + lambda0.len());
        scales.extend(theta.flat().iter().map(|&f| wavelets.index(f).j));
        for (c, ch) in shearlets.channels().iter().enumerate() {
            scales.extend(std::iter::repeat(ch.abs_j).take(lambda0.kept(c).len()));
        }
        Ok(Self {
            domain: domain.clone(),
            wavelets,
            shearlets,
            config,
            theta,
            lambda0,
            scales: scales.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.domain.n()
    }

    pub fn domain(&self) -> &DigitalDomain {
        &self.domain
    }

    pub fn wavelets(&self) -> &Arc<WaveletSystem> {
        &self.wavelets
    }

    pub fn shearlets(&self) -> &Arc<ShearletSystem> {
        &self.shearlets
    }

    pub fn config(&self) -> &HybridConfig {
        &self.config
    }

    pub fn wavelet_selection(&self) -> &WaveletSelection {
        &self.theta
    }

    pub fn shearlet_selection(&self) -> &ShearletSelection {
        &self.lambda0
    }

    pub fn theta_sel(&self) -> Vec<WaveletIndex> {
        self.theta.flat().iter().map(|&f| self.wavelets.index(f)).collect()
    }

    pub fn lambda0_sel(&self) -> Vec<ShearletIndex> {
        self.lambda0
            .flat(&self.shearlets)
            .into_iter()
            .map(|f| self.shearlets.index(f, true).expect("selected index is valid"))
            .collect()
    }

    pub fn wavelet_count(&self) -> usize {
        self.theta.len()
    }

    pub fn shearlet_count(&self) -> usize {
        self.lambda0.len()
    }

    /// Total number of stacked coefficients.
    pub fn len(&self) -> usize {
        self.theta.len() + self.lambda0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Absolute scale `j_n` of every stacked entry.
    pub fn scales(&self) -> &Arc<[u32]> {
        &self.scales
    }

    pub fn analysis(&self, f: &[f64]) -> Result<HybridCoefficients> {
        let v = self.analysis_stacked(f)?;
        let (w, s) = v.split_at(self.theta.len());
        Ok(HybridCoefficients {
            wavelet_part: w.to_vec(),
            shearlet_part: s.to_vec(),
            scale_of: self.scales.clone(),
        })
    }

    pub fn synthesis(&self, c: &HybridCoefficients) -> Result<Vec<f64>> {
        check_len(self.theta.len(), c.wavelet_part.len())?;
        check_len(self.lambda0.len(), c.shearlet_part.len())?;
        self.synthesis_stacked(&c.stacked())
    }

    /// `T_Φ f` as one stacked vector.
    pub fn analysis_stacked(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n() * self.n(), f.len())?;
        let mut out = Vec::with_capacity(self.len());
        let wc = self.wavelets.analysis(f)?;
        out.extend(self.theta.flat().iter().map(|&i| wc[i]));
        if self.lambda0.is_empty() {
            return Ok(out);
        }
        let spec = self.spectrum(f);
        let mut fold = Vec::new();
        for (c, ch) in self.shearlets.channels().iter().enumerate() {
            let kept = self.lambda0.kept(c);
            if kept.is_empty() {
                continue;
            }
            self.shearlets.analyze_channel(&spec, ch, true, &mut fold);
            out.extend(kept.iter().map(|&p| fold[p].re));
        }
        Ok(out)
    }

    /// `T_Φ* c` for a stacked vector.
    pub fn synthesis_stacked(&self, c: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), c.len())?;
        let n = self.n();
        let (cw, cs) = c.split_at(self.theta.len());
        let mut full = vec![0.0; n * n];
        for (&i, &v) in self.theta.flat().iter().zip(cw) {
            full[i] = v;
        }
        let mut f = self.wavelets.synthesis(&full)?;
        if self.lambda0.is_empty() {
            return Ok(f);
        }
        let mut acc = vec![Complex64::default(); n * n];
        let mut small = Vec::new();
        let mut lattice = Vec::new();
        let mut pos = 0;
        for (ci, ch) in self.shearlets.channels().iter().enumerate() {
            let kept = self.lambda0.kept(ci);
            if kept.is_empty() {
                continue;
            }
            let part = &cs[pos..pos + kept.len()];
            pos += kept.len();
            if part.iter().all(|&v| v == 0.0) {
                continue;
            }
            lattice.clear();
            lattice.resize(self.shearlets.channel_range(ci, true).len(), 0.0);
            for (&p, &v) in kept.iter().zip(part) {
                lattice[p] = v;
            }
            self.shearlets.synthesize_channel(&lattice, ch, true, &mut small, &mut acc);
        }
        self.add_inverse(&mut acc, &mut f);
        Ok(f)
    }

    /// `S f = T_Φ* T_Φ f` without materializing the coefficient stack.
    pub fn frame_operator_apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        check_len(n * n, f.len())?;
        let mut wc = self.wavelets.analysis(f)?;
        for (v, &k) in wc.iter_mut().zip(self.theta.keep_mask()) {
            if !k {
                *v = 0.0;
            }
        }
        let mut out = self.wavelets.synthesis(&wc)?;
        if self.lambda0.is_empty() {
            return Ok(out);
        }
        let spec = self.spectrum(f);
        let mut acc = vec![Complex64::default(); n * n];
        let mut fold = Vec::new();
        let mut split = Vec::new();
        let mut small = Vec::new();
        let mut lattice = Vec::new();
        let sh = &self.shearlets;
        // channels with kept atoms, paired by lattice shape
        let mut pending: Vec<(usize, (usize, usize))> = Vec::new();
        let mut pairs = Vec::new();
        for (c, ch) in sh.channels().iter().enumerate() {
            if self.lambda0.kept(c).is_empty() {
                continue;
            }
            let grid = ch.grid(n, true);
            match pending.iter().position(|&(_, g)| g == grid) {
                Some(i) => pairs.push((pending.swap_remove(i).0, Some(c))),
                None => pending.push((c, grid)),
            }
        }
        pairs.extend(pending.into_iter().map(|(c, _)| (c, None)));
        for (a, b) in pairs {
            let cha = &sh.channels()[a];
            let chb = &sh.channels()[b.unwrap_or(a)];
            sh.analyze_pair(&spec, cha, chb, &mut fold);
            let ma = self.lambda0.keep_mask(a);
            match b {
                Some(b) => {
                    let mb = self.lambda0.keep_mask(b);
                    for ((v, &ka), &kb) in fold.iter_mut().zip(ma).zip(mb) {
                        *v = Complex64::new(if ka { v.re } else { 0.0 }, if kb { v.im } else { 0.0 });
                    }
                    sh.synthesize_pair(&mut fold, cha, chb, &mut split, &mut acc);
                }
                None => {
                    lattice.clear();
                    lattice.extend(fold.iter().zip(ma).map(|(v, &k)| if k { v.re } else { 0.0 }));
                    sh.synthesize_channel(&lattice, cha, true, &mut small, &mut acc);
                }
            }
        }
        self.add_inverse(&mut acc, &mut out);
        Ok(out)
    }

    fn spectrum(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.shearlets.fft().forward(&mut buf);
        buf
    }

    fn add_inverse(&self, acc: &mut [Complex64], out: &mut [f64]) {
        self.shearlets.fft().inverse(acc);
        let n = self.n();
        let scale = 1.0 / (n * n) as f64;
        for (o, v) in out.iter_mut().zip(acc.iter()) {
            *o += v.re * scale;
        }
    }

    /// `w_n = 2^{j_n s}` per stacked entry.
    pub fn sobolev_weights(&self, s: f64) -> Result<Vec<f64>> {
        if !(s >= 0.0) {
            return Err(Error::Config(format!("Sobolev order must be nonnegative, got {s}")));
        }
        Ok(self.scales.iter().map(|&j| (j as f64 * s).exp2()).collect())
    }

    /// Selection dump: `kind,j,k,m1,m2,orientation` (υ for wavelets, ι for shearlets).
    pub fn write_selection_csv(&self, path: &Path, echo: &[(String, String)]) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        for (k, v) in echo {
            writeln!(file, "# {k}={v}")?;
        }
        let mut w = csv::Writer::from_writer(file);
        w.write_record(["kind", "j", "k", "m1", "m2", "orientation"])?;
        for idx in self.theta_sel() {
            w.write_record([
                "w".to_string(),
                idx.j.to_string(),
                String::new(),
                idx.pos.0.to_string(),
                idx.pos.1.to_string(),
                idx.orientation.to_string(),
            ])?;
        }
        for idx in self.lambda0_sel() {
            w.write_record([
                "s".to_string(),
                idx.j.to_string(),
                idx.k.to_string(),
                idx.m.0.to_string(),
                idx.m.1.to_string(),
                idx.iota.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::distance_to_boundary;
    use crate::shearlet::ShearletParams;
    use crate::wavelet::WaveletFamily;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn systems(n: usize, levels: u32) -> (DigitalDomain, Arc<WaveletSystem>, Arc<ShearletSystem>) {
        let d = DigitalDomain::new(n).unwrap();
        let w = WaveletSystem::new(&d, WaveletFamily::default(), levels).unwrap();
        let s = ShearletSystem::new(&d, ShearletParams::new(levels)).unwrap();
        (d, Arc::new(w), Arc::new(s))
    }

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn threshold_example() {
        let (_, w, s) = systems(32, 3);
        let cfg = HybridConfig { q_w0: 0.5, q_w1: 0.5, q_sh: 0.25, ..HybridConfig::new(0.0, &w, &s) };
        assert!((cfg.wavelet_threshold(6) - 0.078125).abs() < 1e-15);
    }

    #[test]
    fn wavelet_selection_matches_distance_thresholding() {
        let d = DigitalDomain::new(128).unwrap();
        let w = WaveletSystem::new(&d, WaveletFamily::default(), 4).unwrap();
        let cfg = HybridConfig { t: 0.0, tau: 1.0 / 3.0, s: 0.0, q_w0: 0.5, q_w1: 0.5, q_sh: 0.25 };
        let sel = select_boundary_wavelets(&w, &d, &cfg).unwrap();
        for f in 0..w.len() {
            let idx = w.index(f);
            let th = (-(idx.j as f64)).exp2() + 0.25 * (-(idx.j as f64) / 3.0).exp2();
            assert_eq!(sel.keep_mask()[f], boundary_distance(w.center(&idx)) < th);
        }
        let big = HybridConfig { t: 40.0, ..cfg };
        assert_eq!(select_boundary_wavelets(&w, &d, &big).unwrap().len(), w.len());
        let a = select_boundary_wavelets(&w, &d, &HybridConfig { t: 3.0, ..cfg }).unwrap();
        let b = select_boundary_wavelets(&w, &d, &HybridConfig { t: 5.0, ..cfg }).unwrap();
        assert!(a.is_subset_of(&b) && a.len() < b.len());
        assert_eq!(distance_to_boundary(&d).n(), 128);
    }

    #[test]
    fn interior_shearlets() {
        let (d, _, s) = systems(64, 3);
        let sel = select_interior_shearlets(&s, &d).unwrap();
        let c = s.channel_index(3, 0, 1).unwrap();
        let (rows, cols) = s.channel_grid(c, true);
        let st = s.channels()[c].stride;
        let center = (rows / 2) * cols + cols / 2;
        assert_eq!((rows / 2 * st.0, cols / 2 * st.1), (32, 32));
        assert!(sel.keep_mask(c)[center]);
        assert!(!sel.keep_mask(c)[0]);
        assert!(!sel.keep_mask(c)[cols / 2]);
    }

    #[test]
    fn hybrid_adjoint_and_frame_operator() {
        let (d, w, s) = systems(32, 3);
        let cfg = HybridConfig::new(1.0, &w, &s);
        let bss = BoundaryShearletSystem::new(&d, w, s, cfg).unwrap();
        assert!(bss.wavelet_count() > 0 && bss.shearlet_count() > 0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let f: Vec<f64> = (0..1024).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let g: Vec<f64> = (0..1024).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let c: Vec<f64> = (0..bss.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let tf = bss.analysis_stacked(&f).unwrap();
            let lhs = dot(&tf, &c);
            let rhs = dot(&f, &bss.synthesis_stacked(&c).unwrap());
            assert!((lhs - rhs).abs() <= 1e-10 * dot(&f, &f).sqrt() * dot(&c, &c).sqrt());
            let sf = bss.frame_operator_apply(&f).unwrap();
            assert!((dot(&sf, &f) - dot(&tf, &tf)).abs() <= 1e-10 * dot(&tf, &tf));
            let sg = bss.frame_operator_apply(&g).unwrap();
            assert!((dot(&sf, &g) - dot(&f, &sg)).abs() <= 1e-10 * dot(&f, &f).sqrt() * dot(&g, &g).sqrt());
            let via = bss.synthesis_stacked(&tf).unwrap();
            let err: f64 = via.iter().zip(&sf).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-12);
        }
    }

    #[test]
    fn weights_and_coefficients() {
        let (d, w, s) = systems(32, 3);
        let cfg = HybridConfig::new(0.0, &w, &s);
        let bss = BoundaryShearletSystem::new(&d, w, s, cfg).unwrap();
        assert!(bss.sobolev_weights(0.0).unwrap().iter().all(|&v| v == 1.0));
        let w1 = bss.sobolev_weights(1.0).unwrap();
        for (wv, &j) in w1.iter().zip(bss.scales().iter()) {
            assert_eq!(*wv, (j as f64).exp2());
        }
        assert!(bss.sobolev_weights(-1.0).is_err());
        let f: Vec<f64> = (0..1024).map(|i| (i as f64 * 0.1).sin()).collect();
        let c = bss.analysis(&f).unwrap();
        let direct: f64 = c.stacked().iter().zip(&w1).map(|(a, b)| (a * b).powi(2)).sum::<f64>().sqrt();
        assert!((c.weighted_norm(1.0) - direct).abs() < 1e-12 * direct);
        assert!(bss.analysis(&[0.0; 5]).is_err());
        let zero = bss.analysis(&vec![0.0; 1024]).unwrap();
        assert!(zero.stacked().iter().all(|&v| v == 0.0));
        assert!(bss.synthesis(&zero).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn empty_shearlet_part_is_masked_wavelets() {
        let d = DigitalDomain::new(32).unwrap();
        let w = Arc::new(WaveletSystem::new(&d, WaveletFamily::default(), 3).unwrap());
        let s = Arc::new(ShearletSystem::new(&d, ShearletParams::new(0)).unwrap());
        let cfg = HybridConfig::new(0.0, &w, &s);
        let bss = BoundaryShearletSystem::new(&d, w.clone(), s, cfg).unwrap();
        assert_eq!(bss.shearlet_count(), 0);
        let f: Vec<f64> = (0..1024).map(|i| ((i * 37) % 11) as f64).collect();
        let c = bss.analysis(&f).unwrap();
        let full = w.analysis(&f).unwrap();
        let expect: Vec<f64> = bss.wavelet_selection().flat().iter().map(|&i| full[i]).collect();
        assert_eq!(c.wavelet_part, expect);
    }

    #[test]
    fn unit_wavelet_coefficient_gives_atom() {
        let (d, w, s) = systems(32, 3);
        let cfg = HybridConfig::new(0.0, &w, &s);
        let bss = BoundaryShearletSystem::new(&d, w.clone(), s, cfg).unwrap();
        let mut c = vec![0.0; bss.len()];
        c[0] = 1.0;
        let g = bss.synthesis_stacked(&c).unwrap();
        let atom = w.atom(&bss.theta_sel()[0]).unwrap();
        assert!(g.iter().zip(&atom).all(|(a, b)| (a - b).abs() < 1e-14));
    }
}
