use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Orthonormal compactly supported wavelet family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum WaveletFamily {
    /// Daubechies with the given number of vanishing moments (1 = Haar).
    Daubechies(u8),
}

impl Default for WaveletFamily {
    fn default() -> Self {
        WaveletFamily::Daubechies(4)
    }
}

impl WaveletFamily {
    pub fn lowpass(&self) -> &'static [f64] {
        match self {
            WaveletFamily::Daubechies(p) => DAUBECHIES[(*p as usize) - 1],
        }
    }

    /// Quadrature mirror high-pass `g[l] = (-1)^l h[L-1-l]`.
    pub fn highpass(&self) -> Vec<f64> {
        let h = self.lowpass();
        let len = h.len();
        (0..len)
            .map(|l| if l % 2 == 0 { h[len - 1 - l] } else { -h[len - 1 - l] })
            .collect()
    }

    pub fn filter_len(&self) -> usize {
        self.lowpass().len()
    }
}

impl fmt::Display for WaveletFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WaveletFamily::Daubechies(p) => write!(f, "db{p}"),
        }
    }
}

impl FromStr for WaveletFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        if s == "haar" {
            return Ok(WaveletFamily::Daubechies(1));
        }
        s.strip_prefix("db")
            .and_then(|p| p.parse::<u8>().ok())
            .filter(|p| (1..=DAUBECHIES.len() as u8).contains(p))
            .map(WaveletFamily::Daubechies)
            .ok_or_else(|| Error::Config(format!("unsupported wavelet family '{s}' (haar, db1..db6)")))
    }
}

impl TryFrom<String> for WaveletFamily {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl From<WaveletFamily> for String {
    fn from(f: WaveletFamily) -> String {
        f.to_string()
    }
}

// Low-pass taps from the minimum-phase spectral factorization, 20 digits.
const DAUBECHIES: [&[f64]; 6] = [
    &[0.7071067811865475244, 0.7071067811865475244],
    &[
        0.48296291314453414337,
        0.83651630373780790558,
        0.22414386804201338103,
        -0.12940952255126038117,
    ],
    &[
        0.332670552950082616,
        0.80689150931109257649,
        0.4598775021184915701,
        -0.1350110200102545887,
        -0.085441273882026661693,
        0.035226291885709536603,
    ],
    &[
        0.23037781330889650086,
        0.71484657055291564709,
        0.63088076792985890788,
        -0.027983769416859854211,
        -0.18703481171909308408,
        0.030841381835560763627,
        0.032883011666885199735,
        -0.010597401785069032105,
    ],
    &[
        0.16010239797419291448,
        0.60382926979718967054,
        0.72430852843777292773,
        0.13842814590132073151,
        -0.24229488706638203186,
        -0.032244869584638374648,
        0.077571493840045713523,
        -0.0062414902127982742742,
        -0.012580751999081999469,
        0.003335725285473771278,
    ],
    &[
        0.11154074335010946362,
        0.49462389039845308568,
        0.75113390802109535068,
        0.31525035170919762909,
        -0.22626469396543982008,
        -0.12976686756726193556,
        0.097501605587323049102,
        0.027522865530305728626,
        -0.031582039317486029565,
        0.00055384220116149613925,
        0.0047772575109455106396,
        -0.0010773010853084795649,
    ],
];
