//! Numerical toolkit for clamped-plate (bilaplacian) and Laplacian spectra on
//! rasterized Euclidean domains, together with the spectral lower bounds they
//! are known to satisfy.
//!
//! The pipeline is file-oriented and splits into small stages:
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`geometry`] | rasterized domains, volume / centroid / moment of inertia |
//! | [`discretize`] | sparse finite-difference operators (−Δ, Δ²) with boundary conditions |
//! | [`eigensolve`] | lowest eigenpairs by shift-invert Lanczos, dense oracle for tests |
//! | [`bounds`] | Weyl asymptotics and the Pólya / Li–Yau / Melas / Levine–Protter family of lower bounds, per-k reports |
//! | [`rearrangement`] | symmetric decreasing rearrangement of grid functions, radial profiles |
//! | [`lemma_lab`] | closed-form verification of the one-dimensional moment inequalities behind the plate bound |
//! | [`fourier_probe`] | discrete Fourier-side identities (Parseval, Bessel, gradient) on computed eigenfunctions |
//!
//! Every stage is deterministic: the same inputs and seed reproduce results
//! bit for bit.

pub mod bounds;
pub mod discretize;
pub mod eigensolve;
pub mod fourier_probe;
pub mod geometry;
pub mod lemma_lab;
pub mod rearrangement;
pub mod rng;

mod error;

pub use error::{Error, Result};
