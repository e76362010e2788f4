//! Sparse symmetric finite-difference operators on a raster domain:
//!
//! * `dirichlet_laplacian`: 5-point (2D) / 7-point (3D) stencil for −Δ with
//!   u = 0 enforced by zero extension outside the mask. The diagonal is
//!   always 2n/h²; couplings only go to inside neighbors.
//! * `neumann_laplacian`: graph-Laplacian form of −Δ; the diagonal counts
//!   inside neighbors, so missing neighbors encode a zero-flux wall at the
//!   cell boundary.
//! * `clamped_bilaplacian`: the full-grid squared 5/7-point stencil (13-point
//!   in 2D, 25-point in 3D) applied to the zero-extended function and
//!   restricted to inside cells. Because u is extended by zero on a ring of
//!   width two, this enforces u = 0 and, to discretization order,
//!   ∂u/∂ν = 0 — the clamped plate conditions. It is *not* the square of the
//!   Dirichlet matrix (which would impose u = Δu = 0 instead).
//!
//! All operators carry their 1/h² or 1/h⁴ scaling at assembly time and store
//! the cell ↔ unknown index maps used later by the Fourier probe.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::geometry::RasterDomain;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemTag {
    DirichletLaplacian,
    NeumannLaplacian,
    ClampedBilaplacian,
}

impl ProblemTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemTag::DirichletLaplacian => "dirichlet_laplacian",
            ProblemTag::NeumannLaplacian => "neumann_laplacian",
            ProblemTag::ClampedBilaplacian => "clamped_bilaplacian",
        }
    }
}

impl std::fmt::Display for ProblemTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Symmetric sparse operator in compressed-row storage, plus the grid
/// bookkeeping required to map unknowns back to cells.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    pub problem: ProblemTag,
    pub dim: usize,
    pub n: usize,
    pub h: f64,
    pub domain_ref: String,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    /// Flat mask-array cell index of each unknown, in lexicographic order.
    index_to_cell: Vec<u32>,
    /// Unknown index per flat cell, or -1 outside.
    cell_to_index: Vec<i32>,
    dims: [usize; 3],
    origin: [f64; 3],
}

impl SparseOperator {
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn index_to_cell(&self) -> &[u32] {
        &self.index_to_cell
    }

    pub fn cell_to_index(&self) -> &[i32] {
        &self.cell_to_index
    }

    /// Array indices (ix, iy, iz) of the cell carrying unknown `i`.
    pub fn cell_of(&self, i: usize) -> [usize; 3] {
        let flat = self.index_to_cell[i] as usize;
        let ix = flat % self.dims[0];
        let rest = flat / self.dims[0];
        [ix, rest % self.dims[1], rest / self.dims[1]]
    }

    /// Center coordinates of the cell carrying unknown `i`.
    pub fn coords_of(&self, i: usize) -> [f64; 3] {
        let idx = self.cell_of(i);
        [
            self.origin[0] + idx[0] as f64 * self.h,
            self.origin[1] + idx[1] as f64 * self.h,
            self.origin[2] + idx[2] as f64 * self.h,
        ]
    }

    /// y = A x. Safe for concurrent callers on disjoint output vectors.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for i in 0..self.dim {
            let mut acc = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[p] * x[self.cols[p] as usize];
            }
            y[i] = acc;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.matvec(x, &mut y);
        y
    }

    /// Quadratic form xᵀAx.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            let mut row = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                row += self.vals[p] * x[self.cols[p] as usize];
            }
            acc += x[i] * row;
        }
        acc
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }

    /// Raw compressed-row storage (row pointers, column indices, values).
    pub fn csr(&self) -> (&[usize], &[u32], &[f64]) {
        (&self.row_ptr, &self.cols, &self.vals)
    }

    /// Exact entry lookup (rows are sorted by column).
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    /// Gershgorin upper bound on the spectral radius.
    pub fn gershgorin_bound(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            let (_, vals) = self.row(i);
            let s: f64 = vals.iter().map(|v| v.abs()).sum();
            worst = worst.max(s);
        }
        worst
    }

    /// Coordinate-format dump (`i j value` per line, 17 significant digits)
    /// for cross-checks against external tooling.
    pub fn write_coo<W: Write>(&self, w: &mut W) -> Result<()> {
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                writeln!(w, "{} {} {:.16e}", i, c, v)?;
            }
        }
        Ok(())
    }

    /// Dense copy; for oracle-sized problems only.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.dim * self.dim];
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                a[i * self.dim + *c as usize] = *v;
            }
        }
        a
    }
}

/// Stencil offsets with their coefficients (numerators; the 1/h^p scale is
/// applied at assembly).
fn laplacian_offsets(n: usize) -> Vec<([i64; 3], f64)> {
    let mut out = vec![([0i64, 0, 0], 2.0 * n as f64)];
    for q in 0..n {
        for s in [-1i64, 1] {
            let mut d = [0i64; 3];
            d[q] = s;
            out.push((d, -1.0));
        }
    }
    out
}

/// Offsets of the squared Laplacian stencil: the convolution of the 2n+1
/// point kernel with itself. Center 4n²+2n, axial distance one −4n, axial
/// distance two +1, mixed two-axis diagonals +2.
fn bilaplacian_offsets(n: usize) -> Vec<([i64; 3], f64)> {
    let nf = n as f64;
    let mut out = vec![([0i64, 0, 0], 4.0 * nf * nf + 2.0 * nf)];
    for q in 0..n {
        for s in [-1i64, 1] {
            let mut d = [0i64; 3];
            d[q] = s;
            out.push((d, -4.0 * nf));
            let mut d2 = [0i64; 3];
            d2[q] = 2 * s;
            out.push((d2, 1.0));
        }
    }
    for q in 0..n {
        for r in (q + 1)..n {
            for sq in [-1i64, 1] {
                for sr in [-1i64, 1] {
                    let mut d = [0i64; 3];
                    d[q] = sq;
                    d[r] = sr;
                    out.push((d, 2.0));
                }
            }
        }
    }
    out
}

struct Indexing {
    index_to_cell: Vec<u32>,
    cell_to_index: Vec<i32>,
}

fn build_indexing(d: &RasterDomain) -> Indexing {
    let total = d.dims()[0] * d.dims()[1] * d.dims()[2];
    let mut cell_to_index = vec![-1i32; total];
    let mut index_to_cell = Vec::new();
    for flat in 0..total {
        if d.mask()[flat] {
            cell_to_index[flat] = index_to_cell.len() as i32;
            index_to_cell.push(flat as u32);
        }
    }
    Indexing {
        index_to_cell,
        cell_to_index,
    }
}

fn assemble(
    d: &RasterDomain,
    problem: ProblemTag,
    offsets: &[([i64; 3], f64)],
    scale: f64,
    graph_diagonal: bool,
) -> SparseOperator {
    let dims = d.dims();
    let idx = build_indexing(d);
    let dim = idx.index_to_cell.len();

    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols: Vec<u32> = Vec::new();
    let mut vals: Vec<f64> = Vec::new();
    row_ptr.push(0);

    let mut entries: Vec<(u32, f64)> = Vec::with_capacity(offsets.len());
    for i in 0..dim {
        let flat = idx.index_to_cell[i] as usize;
        let ix = (flat % dims[0]) as i64;
        let rest = flat / dims[0];
        let iy = (rest % dims[1]) as i64;
        let iz = (rest / dims[1]) as i64;

        entries.clear();
        let mut inside_neighbors = 0usize;
        for &(off, coeff) in offsets {
            let (jx, jy, jz) = (ix + off[0], iy + off[1], iz + off[2]);
            if jx < 0
                || jy < 0
                || jz < 0
                || jx >= dims[0] as i64
                || jy >= dims[1] as i64
                || jz >= dims[2] as i64
            {
                continue;
            }
            let jflat = (jz as usize * dims[1] + jy as usize) * dims[0] + jx as usize;
            let j = idx.cell_to_index[jflat];
            if j < 0 {
                continue;
            }
            if off == [0, 0, 0] {
                if !graph_diagonal {
                    entries.push((j as u32, coeff * scale));
                }
            } else {
                inside_neighbors += 1;
                entries.push((j as u32, coeff * scale));
            }
        }
        if graph_diagonal {
            entries.push((i as u32, inside_neighbors as f64 * scale));
        }
        entries.sort_unstable_by_key(|e| e.0);
        for &(c, v) in &entries {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }

    SparseOperator {
        problem,
        dim,
        n: d.n(),
        h: d.h(),
        domain_ref: d.shape_tag().to_string(),
        row_ptr,
        cols,
        vals,
        index_to_cell: idx.index_to_cell,
        cell_to_index: idx.cell_to_index,
        dims,
        origin: d.origin(),
    }
}

/// −Δ with u = 0 outside the mask.
pub fn dirichlet_laplacian(d: &RasterDomain) -> SparseOperator {
    let h2 = d.h() * d.h();
    assemble(
        d,
        ProblemTag::DirichletLaplacian,
        &laplacian_offsets(d.n()),
        1.0 / h2,
        false,
    )
}

/// −Δ with zero flux across missing-neighbor walls.
pub fn neumann_laplacian(d: &RasterDomain) -> SparseOperator {
    let h2 = d.h() * d.h();
    assemble(
        d,
        ProblemTag::NeumannLaplacian,
        &laplacian_offsets(d.n()),
        1.0 / h2,
        true,
    )
}

/// Δ² with clamped conditions by zero extension of the squared stencil.
pub fn clamped_bilaplacian(d: &RasterDomain) -> SparseOperator {
    let h4 = d.h().powi(4);
    assemble(
        d,
        ProblemTag::ClampedBilaplacian,
        &bilaplacian_offsets(d.n()),
        1.0 / h4,
        false,
    )
}

/// Apply the full-grid 5/7-point Laplacian to the zero extension of `x`
/// (defined on the operator's unknowns) over the whole mask array plus a
/// ring of width one. Returns the full-grid field; used to validate that the
/// clamped operator is exactly the squared stencil.
pub fn full_grid_laplacian_of_extension(op: &SparseOperator, x: &[f64]) -> Vec<f64> {
    // padded array: one extra cell on every side
    let [nx, ny, nz] = op.dims;
    let (px, py, pz) = (nx + 2, ny + 2, if op.n == 3 { nz + 2 } else { 1 });
    let zoff = if op.n == 3 { 1 } else { 0 };
    let mut field = vec![0.0; px * py * pz];
    for (i, &v) in x.iter().enumerate() {
        let [ix, iy, iz] = op.cell_of(i);
        field[((iz + zoff) * py + iy + 1) * px + ix + 1] = v;
    }
    let h2 = op.h * op.h;
    let mut out = vec![0.0; px * py * pz];
    for iz in 0..pz {
        for iy in 0..py {
            for ix in 0..px {
                let at = |jx: i64, jy: i64, jz: i64| -> f64 {
                    if jx < 0
                        || jy < 0
                        || jz < 0
                        || jx >= px as i64
                        || jy >= py as i64
                        || jz >= pz as i64
                    {
                        0.0
                    } else {
                        field[(jz as usize * py + jy as usize) * px + jx as usize]
                    }
                };
                let (x_, y_, z_) = (ix as i64, iy as i64, iz as i64);
                let mut acc = -2.0 * op.n as f64 * at(x_, y_, z_);
                acc += at(x_ - 1, y_, z_) + at(x_ + 1, y_, z_);
                acc += at(x_, y_ - 1, z_) + at(x_, y_ + 1, z_);
                if op.n == 3 {
                    acc += at(x_, y_, z_ - 1) + at(x_, y_, z_ + 1);
                }
                out[(iz * py + iy) * px + ix] = acc / h2;
            }
        }
    }
    out
}
