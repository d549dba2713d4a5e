//! Boundary shearlet systems on the unit square: interior shearlets plus
//! near-boundary wavelets, with matrix-free frame operators and solvers.

pub mod cartoon;
pub mod config;
pub mod error;
pub mod experiments;
pub mod fft;
pub mod geometry;
pub mod hybrid;
pub mod io;
pub mod linalg;
pub mod plot;
pub mod shearlet;
pub mod sobolev;
pub mod wavelet;

pub use error::{Error, Result};
