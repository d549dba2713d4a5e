//! Minimal line plots rendered straight to PNG (axes and polylines, no text).

use std::path::Path;

use crate::error::{Error, Result};

const W: usize = 640;
const H: usize = 480;
const MARGIN: usize = 40;
const PALETTE: [[u8; 3]; 5] = [[31, 119, 180], [214, 39, 40], [44, 160, 44], [148, 103, 189], [255, 127, 14]];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axes {
    Linear,
    LogLog,
}

struct Canvas {
    px: Vec<u8>,
}

impl Canvas {
    fn new() -> Self {
        Self { px: vec![255; W * H * 3] }
    }

    fn set(&mut self, x: i64, y: i64, c: [u8; 3]) {
        if x >= 0 && y >= 0 && (x as usize) < W && (y as usize) < H {
            let i = (y as usize * W + x as usize) * 3;
            self.px[i..i + 3].copy_from_slice(&c);
        }
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), c: [u8; 3]) {
        let steps = ((b.0 - a.0).abs().max((b.1 - a.1).abs()).ceil() as usize).max(1);
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            let x = a.0 + t * (b.0 - a.0);
            let y = a.1 + t * (b.1 - a.1);
            for (dx, dy) in [(0, 0), (1, 0), (0, 1)] {
                self.set(x.round() as i64 + dx, y.round() as i64 + dy, c);
            }
        }
    }
}

/// Draw each series as a polyline; nonpositive values are dropped on log axes.
pub fn line_plot(path: &Path, series: &[Vec<(f64, f64)>], axes: Axes) -> Result<()> {
    let tx = |v: f64| if axes == Axes::LogLog { v.log10() } else { v };
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite() && (axes == Axes::Linear || (*x > 0.0 && *y > 0.0)))
                .map(|&(x, y)| (tx(x), tx(y)))
                .collect()
        })
        .collect();
    let all: Vec<&(f64, f64)> = pts.iter().flatten().collect();
    if all.is_empty() {
        return Err(Error::Config("nothing to plot".into()));
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &&(x, y) in &all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let (pw, ph) = ((W - 2 * MARGIN) as f64, (H - 2 * MARGIN) as f64);
    let map = |(x, y): (f64, f64)| {
        (MARGIN as f64 + (x - x0) / (x1 - x0) * pw, (H - MARGIN) as f64 - (y - y0) / (y1 - y0) * ph)
    };
    let mut c = Canvas::new();
    let axis = [0, 0, 0];
    let (l, r, t, b) = (MARGIN as f64, (W - MARGIN) as f64, MARGIN as f64, (H - MARGIN) as f64);
    c.line((l, b), (r, b), axis);
    c.line((l, b), (l, t), axis);
    for (k, s) in pts.iter().enumerate() {
        let col = PALETTE[k % PALETTE.len()];
        for w in s.windows(2) {
            c.line(map(w[0]), map(w[1]), col);
        }
        for &p in s {
            let (x, y) = map(p);
            for dx in -2..=2 {
                for dy in -2..=2 {
                    c.set(x.round() as i64 + dx, y.round() as i64 + dy, col);
                }
            }
        }
    }
    crate::io::write_png(path, &c.px, W as u32, H as u32, png::ColorType::Rgb)
}
