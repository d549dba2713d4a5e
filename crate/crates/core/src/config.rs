//! Run configuration shared by the experiments and the command line.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shearlet::{default_ladder, Generator, ShearletParams, StrideRule};
use crate::wavelet::WaveletFamily;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CartoonConfig {
    /// Curvature bound ν.
    pub nu: f64,
    pub seed: u64,
    /// Points where the discontinuity meets the boundary (0 or 2).
    pub crossings: usize,
}

impl Default for CartoonConfig {
    fn default() -> Self {
        Self { nu: 40.0, seed: 7, crossings: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    /// Number of scales of both subsystems.
    pub scales: u32,
    /// Shear levels per directional scale; `⌈j/2⌉` when absent.
    pub directions: Option<Vec<u32>>,
    pub wavelet: WaveletFamily,
    pub generator: Generator,
    pub stride_rule: StrideRule,
    pub base_stride: usize,
    pub tau: f64,
    pub offsets: Vec<f64>,
    pub s_values: Vec<f64>,
    pub seed: u64,
    /// Relative residual of CG solves with `S`.
    pub tol: f64,
    /// Relative tolerance of eigenvalue and singular-value iterations.
    pub eig_tol: f64,
    pub max_iter: usize,
    /// Largest coefficient count for a dense Gramian.
    pub dense_limit: usize,
    /// Unit-coefficient probes in sampled Gramian mode.
    pub probes: usize,
    pub n_terms: Vec<usize>,
    pub cartoon: CartoonConfig,
    pub cache_dir: Option<PathBuf>,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 256,
            scales: 4,
            directions: None,
            wavelet: WaveletFamily::default(),
            generator: Generator::default(),
            stride_rule: StrideRule::default(),
            base_stride: 1,
            tau: 1.0 / 3.0,
            offsets: vec![-30.0, -20.0, -16.0, -8.0, -4.0, 0.0],
            s_values: vec![0.0, 0.5, 1.0, 1.5],
            seed: crate::linalg::PROBE_SEED,
            tol: 1e-8,
            eig_tol: 1e-4,
            max_iter: 5000,
            dense_limit: 20_000,
            probes: 256,
            n_terms: vec![64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384],
            cartoon: CartoonConfig::default(),
            cache_dir: None,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn ladder(&self) -> Vec<u32> {
        self.directions.clone().unwrap_or_else(|| default_ladder(self.scales))
    }

    pub fn shearlet_params(&self) -> ShearletParams {
        ShearletParams {
            levels: self.scales,
            ladder: self.ladder(),
            generator: self.generator,
            base_stride: self.base_stride,
            stride_rule: self.stride_rule,
        }
    }

    /// Checks that do not need a built system.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !self.n.is_power_of_two() || self.n < 8 {
            return bad(format!("n must be a power of two ≥ 8, got {}", self.n));
        }
        if self.ladder().len() != self.scales as usize {
            return bad(format!("directions has {} entries but scales = {}", self.ladder().len(), self.scales));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return bad(format!("tau must be positive, got {}", self.tau));
        }
        if self.offsets.iter().any(|t| !t.is_finite()) {
            return bad("offsets must be finite".into());
        }
        if self.s_values.iter().any(|s| !(0.0..=2.0).contains(s)) {
            return bad("s values must lie in [0, 2]".into());
        }
        if !(self.tol > 0.0 && self.tol < 1.0) || !(self.eig_tol > 0.0 && self.eig_tol < 1.0) {
            return bad("tolerances must lie in (0, 1)".into());
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        if self.n_terms.windows(2).any(|w| w[0] >= w[1]) || self.n_terms.first() == Some(&0) {
            return bad("n_terms must be positive and increasing".into());
        }
        Ok(())
    }

    /// `key=value` lines that reproduce the run.
    pub fn echo(&self) -> Vec<(String, String)> {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let ulist = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let ladder = self.ladder().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        vec![
            ("n".into(), self.n.to_string()),
            ("scales".into(), self.scales.to_string()),
            ("directions".into(), ladder),
            ("wavelet".into(), self.wavelet.to_string()),
            ("generator".into(), self.generator.to_string()),
            ("stride_rule".into(), format!("{:?}", self.stride_rule).to_lowercase()),
            ("base_stride".into(), self.base_stride.to_string()),
            ("tau".into(), self.tau.to_string()),
            ("offsets".into(), list(&self.offsets)),
            ("s_values".into(), list(&self.s_values)),
            ("seed".into(), self.seed.to_string()),
            ("tol".into(), self.tol.to_string()),
            ("eig_tol".into(), self.eig_tol.to_string()),
            ("max_iter".into(), self.max_iter.to_string()),
            ("dense_limit".into(), self.dense_limit.to_string()),
            ("probes".into(), self.probes.to_string()),
            ("n_terms".into(), ulist(&self.n_terms)),
            ("cartoon.nu".into(), self.cartoon.nu.to_string()),
            ("cartoon.seed".into(), self.cartoon.seed.to_string()),
            ("cartoon.crossings".into(), self.cartoon.crossings.to_string()),
        ]
    }
}
