//! Lowest eigenpairs of a sparse symmetric operator, plus a dense oracle for
//! small instances.
//!
//! `lowest_eigenpairs` is contract-first: the returned pairs satisfy
//! ‖Av − λv‖ ≤ tol·λ (checked explicitly, not estimated), eigenvalues are
//! ascending Rayleigh quotients, and eigenvectors are orthonormal in the
//! discrete L²(Ω) inner product hⁿ·Σ u v. Runs are deterministic for a fixed
//! seed.

pub mod cholesky;
pub mod dense;
mod lanczos;

use serde::{Deserialize, Serialize};

use crate::discretize::{ProblemTag, SparseOperator};
use crate::{Error, Result};

pub use lanczos::components;

/// Hard cap for the dense oracle.
pub const DENSE_MAX_DIM: usize = 2000;

/// The lowest part of a spectrum with solver provenance.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub problem: ProblemTag,
    pub n: usize,
    pub h: f64,
    pub domain_ref: String,
    /// Ascending eigenvalues (units 1/length² for Laplacians, 1/length⁴ for
    /// the plate).
    pub eigenvalues: Vec<f64>,
    /// Per-pair ‖Au − λu‖/λ achieved by the solver.
    pub residual_norms: Vec<f64>,
    /// Grid functions normalized so hⁿ·Σu² = 1, when requested.
    pub eigenvectors: Option<Vec<Vec<f64>>>,
}

/// On-disk schema for the spectrum hand-off file.
#[derive(Serialize, Deserialize)]
struct SpectrumFile {
    problem: ProblemTag,
    n: usize,
    h: f64,
    domain: String,
    eigenvalues: Vec<f64>,
    residuals: Vec<f64>,
    normalization: String,
}

impl Spectrum {
    pub fn to_json(&self) -> Result<String> {
        let file = SpectrumFile {
            problem: self.problem,
            n: self.n,
            h: self.h,
            domain: self.domain_ref.clone(),
            eigenvalues: self.eigenvalues.clone(),
            residuals: self.residual_norms.clone(),
            normalization: "L2_h".to_string(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Spectrum> {
        let file: SpectrumFile = serde_json::from_str(text)?;
        if file.normalization != "L2_h" {
            return Err(Error::InvalidInput(format!(
                "unsupported normalization `{}`",
                file.normalization
            )));
        }
        Ok(Spectrum {
            problem: file.problem,
            n: file.n,
            h: file.h,
            domain_ref: file.domain,
            eigenvalues: file.eigenvalues,
            residual_norms: file.residuals,
            eigenvectors: None,
        })
    }

    /// Mean of the first k eigenvalues (1-based k).
    pub fn mean_of_first(&self, k: usize) -> f64 {
        let k = k.min(self.eigenvalues.len());
        self.eigenvalues[..k].iter().sum::<f64>() / k as f64
    }

    /// Structural invariants: ascending order, residuals within tolerance,
    /// and (when vectors are present) L²_h orthonormality.
    pub fn validate(&self, tol: f64) -> Result<()> {
        for w in self.eigenvalues.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidInput(format!(
                    "eigenvalues out of order: {} before {}",
                    w[0], w[1]
                )));
            }
        }
        for (i, r) in self.residual_norms.iter().enumerate() {
            if !(*r <= tol) {
                return Err(Error::InvalidInput(format!(
                    "residual {r:.3e} of pair {i} exceeds tolerance {tol:.1e}"
                )));
            }
        }
        if let Some(vs) = &self.eigenvectors {
            let hn = self.h.powi(self.n as i32);
            for i in 0..vs.len() {
                for j in i..vs.len() {
                    let dot: f64 = vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    if (hn * dot - expect).abs() > 1e-8 {
                        return Err(Error::InvalidInput(format!(
                            "eigenvectors {i},{j} not L2_h-orthonormal: {}",
                            hn * dot
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Options for `lowest_eigenpairs`. The defaults match the pipeline:
/// seed 42, residual tolerance 1e−9, budget 500·m operator applications.
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub seed: u64,
    pub want_vectors: bool,
    /// Budget in operator applications per requested pair.
    pub budget_per_pair: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            seed: 42,
            want_vectors: false,
            budget_per_pair: 500,
        }
    }
}

pub const DEFAULT_TOL: f64 = 1e-9;

/// The m smallest eigenvalues (optionally with eigenvectors) to the given
/// relative residual tolerance. For the Neumann Laplacian the zero
/// eigenvalue is included and reported first.
pub fn lowest_eigenpairs(
    op: &SparseOperator,
    m: usize,
    tol: f64,
    opts: &SolveOptions,
) -> Result<Spectrum> {
    if m < 1 || m > op.dim / 4 {
        return Err(Error::TooManyPairs { m, max: op.dim / 4 });
    }
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::InvalidInput(format!(
            "tolerance {tol:.3e} outside [1e-12, 1e-4]"
        )));
    }
    let budget = opts.budget_per_pair.saturating_mul(m);
    let out = lanczos::shift_invert_lowest(op, m, tol, opts.seed, budget)?;
    Ok(spectrum_from_pairs(
        op,
        out.eigenvalues,
        out.residuals,
        out.vectors,
        opts.want_vectors,
        m,
    ))
}

/// Full spectrum by dense symmetric eigendecomposition; test oracle only.
pub fn dense_oracle(op: &SparseOperator) -> Result<Spectrum> {
    if op.dim > DENSE_MAX_DIM {
        return Err(Error::DenseTooLarge {
            dim: op.dim,
            max: DENSE_MAX_DIM,
        });
    }
    let a = op.to_dense();
    let (vals, vecs) = dense::symmetric_eigen(&a, op.dim)?;
    let gersh = op.gershgorin_bound().max(1e-300);
    let res_floor = gersh * 1e-14;
    let mut vectors = Vec::with_capacity(op.dim);
    let mut residuals = Vec::with_capacity(op.dim);
    for j in 0..op.dim {
        let v: Vec<f64> = (0..op.dim).map(|i| vecs[i * op.dim + j]).collect();
        let av = op.apply(&v);
        let mut r2 = 0.0;
        for i in 0..op.dim {
            let d = av[i] - vals[j] * v[i];
            r2 += d * d;
        }
        residuals.push(r2.sqrt() / vals[j].abs().max(res_floor));
        vectors.push(v);
    }
    Ok(spectrum_from_pairs(
        op, vals, residuals, vectors, true, op.dim,
    ))
}

fn spectrum_from_pairs(
    op: &SparseOperator,
    eigenvalues: Vec<f64>,
    residuals: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    want_vectors: bool,
    m: usize,
) -> Spectrum {
    let scale = op.h.powf(-(op.n as f64) / 2.0);
    let eigenvectors = want_vectors.then(|| {
        vectors
            .into_iter()
            .take(m)
            .map(|mut v| {
                for x in v.iter_mut() {
                    *x *= scale;
                }
                v
            })
            .collect()
    });
    Spectrum {
        problem: op.problem,
        n: op.n,
        h: op.h,
        domain_ref: op.domain_ref.clone(),
        eigenvalues: eigenvalues.into_iter().take(m).collect(),
        residual_norms: residuals.into_iter().take(m).collect(),
        eigenvectors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{clamped_bilaplacian, dirichlet_laplacian, neumann_laplacian};
    use crate::geometry::build_domain;

    #[test]
    fn one_cell_dense_oracle_values() {
        let d = build_domain("rect:w=1,h=1", 1.0).unwrap();
        let dir = dense_oracle(&dirichlet_laplacian(&d)).unwrap();
        assert_eq!(dir.eigenvalues.len(), 1);
        assert!((dir.eigenvalues[0] - 4.0).abs() < 1e-14);
        let pl = dense_oracle(&clamped_bilaplacian(&d)).unwrap();
        assert!((pl.eigenvalues[0] - 20.0).abs() < 1e-13);
    }

    #[test]
    fn two_cell_strip_dense_oracle() {
        // two cells in a row, h=1: matrix [[4,-1],[-1,4]] -> {3, 5}
        let d = build_domain("rect:w=2,h=1", 1.0).unwrap();
        let a = dirichlet_laplacian(&d);
        assert_eq!(a.dim, 2);
        let s = dense_oracle(&a).unwrap();
        assert!((s.eigenvalues[0] - 3.0).abs() < 1e-13);
        assert!((s.eigenvalues[1] - 5.0).abs() < 1e-13);
    }

    #[test]
    fn lanczos_matches_dense_oracle_on_small_disk() {
        let d = build_domain("disk:r=1", 0.1).unwrap();
        let a = dirichlet_laplacian(&d);
        assert!(a.dim <= DENSE_MAX_DIM);
        let oracle = dense_oracle(&a).unwrap();
        let opts = SolveOptions {
            want_vectors: true,
            ..Default::default()
        };
        let got = lowest_eigenpairs(&a, 6, 1e-10, &opts).unwrap();
        got.validate(1e-10).unwrap();
        for j in 0..6 {
            let rel = (got.eigenvalues[j] - oracle.eigenvalues[j]).abs() / oracle.eigenvalues[j];
            assert!(rel < 1e-9, "pair {j}: {rel:.2e}");
        }
    }

    #[test]
    fn neumann_zero_mode_is_exact_and_first() {
        let d = build_domain("lshape:a=1,b=0.5", 1.0 / 16.0).unwrap();
        let a = neumann_laplacian(&d);
        let s = lowest_eigenpairs(&a, 3, 1e-9, &SolveOptions::default()).unwrap();
        assert!(
            s.eigenvalues[0].abs() <= 1e-12,
            "zero mode {}",
            s.eigenvalues[0]
        );
        assert!(s.residual_norms[0] <= 1e-12);
        assert!(s.eigenvalues[1] > 1.0);
    }

    #[test]
    fn seeded_runs_are_bitwise_identical() {
        let d = build_domain("annulus:r_outer=1,r_inner=0.5", 1.0 / 24.0).unwrap();
        let a = dirichlet_laplacian(&d);
        let opts = SolveOptions::default();
        let s1 = lowest_eigenpairs(&a, 4, 1e-9, &opts).unwrap();
        let s2 = lowest_eigenpairs(&a, 4, 1e-9, &opts).unwrap();
        for (x, y) in s1.eigenvalues.iter().zip(&s2.eigenvalues) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn m_out_of_range_is_rejected() {
        let d = build_domain("rect:w=1,h=1", 0.25).unwrap();
        let a = dirichlet_laplacian(&d); // dim 16
        assert!(matches!(
            lowest_eigenpairs(&a, 5, 1e-9, &SolveOptions::default()),
            Err(Error::TooManyPairs { .. })
        ));
        assert!(lowest_eigenpairs(&a, 4, 1e-9, &SolveOptions::default()).is_ok());
    }

    #[test]
    fn unattainable_tolerance_reports_nonconvergence() {
        // the attainable residual of the fourth-order operator is near
        // eps·cond(A), far above 1e-12 at this resolution
        let d = build_domain("disk:r=1", 1.0 / 32.0).unwrap();
        let a = clamped_bilaplacian(&d);
        match lowest_eigenpairs(&a, 2, 1e-12, &SolveOptions::default()) {
            Err(Error::NonConvergence { worst, .. }) => {
                assert!(worst.is_finite() && worst > 1e-12, "achieved {worst:.2e}");
            }
            Err(other) => panic!("unexpected error {other}"),
            Ok(_) => panic!("tolerance below the attainable floor should not succeed"),
        }
    }

    #[test]
    fn spectrum_json_round_trip() {
        let d = build_domain("disk:r=1", 0.2).unwrap();
        let a = dirichlet_laplacian(&d);
        let s = dense_oracle(&a).unwrap();
        let text = s.to_json().unwrap();
        let back = Spectrum::from_json(&text).unwrap();
        assert_eq!(back.problem, ProblemTag::DirichletLaplacian);
        assert_eq!(back.eigenvalues, s.eigenvalues);
        assert_eq!(back.domain_ref, "disk:r=1");
        assert!(text.contains("\"normalization\": \"L2_h\""));
    }

    #[test]
    fn clamped_ritz_values_are_positive() {
        let d = build_domain("lshape:a=1,b=0.5", 1.0 / 12.0).unwrap();
        let a = clamped_bilaplacian(&d);
        let s = dense_oracle(&a).unwrap();
        assert!(s.eigenvalues[0] > 0.0);
    }
}
