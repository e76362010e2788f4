//! Shift-invert Lanczos for the lowest eigenpairs of a sparse symmetric
//! positive (semi)definite operator.
//!
//! The operator is factored once (A + σI = LLᵀ) and Lanczos runs on the
//! inverse, whose dominant eigenvalues map to A's smallest. The basis is
//! kept reorthogonalized ("twice is enough" test), so degenerate pairs are
//! resolved; for the Neumann Laplacian the exact kernel (constants per
//! connected component) is deflated analytically, which reports the zero
//! mode with a zero residual.
//!
//! Eigenvalues are returned as Rayleigh quotients of the final orthonormal
//! Ritz block and every pair carries an explicitly computed residual, so the
//! contract ‖Av − λv‖ ≤ tol·λ is enforced rather than estimated.

use crate::discretize::{ProblemTag, SparseOperator};
use crate::eigensolve::cholesky::SparseCholesky;
use crate::eigensolve::dense::tridiagonal_eigen;
use crate::rng::SplitMix64;
use crate::{Error, Result};

pub struct LanczosOutcome {
    /// Ascending eigenvalues of A (Rayleigh quotients).
    pub eigenvalues: Vec<f64>,
    /// ℓ²-orthonormal eigenvectors, one per eigenvalue.
    pub vectors: Vec<Vec<f64>>,
    /// ‖Av − λv‖ / max(λ, floor) per pair.
    pub residuals: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn orthogonalize_once(w: &mut [f64], kernel: &[Vec<f64>], locked: &[Vec<f64>], basis: &[Vec<f64>]) {
    for q in kernel.iter().chain(locked.iter()).chain(basis.iter()) {
        let c = dot(w, q);
        if c != 0.0 {
            axpy(w, -c, q);
        }
    }
}

/// Orthogonalize with the Kahan–Parlett criterion: repeat the pass when the
/// first one removed more than half of the vector.
fn orthogonalize(w: &mut [f64], kernel: &[Vec<f64>], locked: &[Vec<f64>], basis: &[Vec<f64>]) {
    let before = norm(w);
    orthogonalize_once(w, kernel, locked, basis);
    let after = norm(w);
    if after < 0.5 * before {
        orthogonalize_once(w, kernel, locked, basis);
    }
}

fn random_vector(dim: usize, rng: &mut SplitMix64) -> Vec<f64> {
    (0..dim).map(|_| rng.range(-0.5, 0.5)).collect()
}

/// Connected components of the mask graph (axis adjacency), as unknown lists.
pub fn components(op: &SparseOperator) -> Vec<Vec<usize>> {
    let dims = op.dims();
    let cell_to_index = op.cell_to_index();
    let mut seen = vec![false; op.dim];
    let mut out = Vec::new();
    for start in 0..op.dim {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let c = op.cell_of(i);
            for q in 0..op.n {
                for s in [-1i64, 1] {
                    let mut d = [c[0] as i64, c[1] as i64, c[2] as i64];
                    d[q] += s;
                    if d[0] < 0
                        || d[1] < 0
                        || d[2] < 0
                        || d[0] >= dims[0] as i64
                        || d[1] >= dims[1] as i64
                        || d[2] >= dims[2] as i64
                    {
                        continue;
                    }
                    let flat = (d[2] as usize * dims[1] + d[1] as usize) * dims[0] + d[0] as usize;
                    let j = cell_to_index[flat];
                    if j >= 0 && !seen[j as usize] {
                        seen[j as usize] = true;
                        comp.push(j as usize);
                        stack.push(j as usize);
                    }
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Exact kernel of the Neumann graph Laplacian: normalized indicators of the
/// connected components.
fn kernel_vectors(op: &SparseOperator) -> Vec<Vec<f64>> {
    components(op)
        .into_iter()
        .map(|comp| {
            let scale = 1.0 / (comp.len() as f64).sqrt();
            let mut v = vec![0.0; op.dim];
            for i in comp {
                v[i] = scale;
            }
            v
        })
        .collect()
}

pub fn shift_invert_lowest(
    op: &SparseOperator,
    m: usize,
    tol: f64,
    seed: u64,
    budget: usize,
) -> Result<LanczosOutcome> {
    let dim = op.dim;
    let gersh = op.gershgorin_bound().max(1e-300);
    let res_floor = gersh * 1e-14;

    let kernel = if op.problem == ProblemTag::NeumannLaplacian {
        kernel_vectors(op)
    } else {
        Vec::new()
    };
    let k0 = kernel.len().min(m);
    let m_iter = m - k0;

    let mut rng = SplitMix64::new(seed);

    if m_iter == 0 {
        let vectors: Vec<Vec<f64>> = kernel.into_iter().take(m).collect();
        let count = vectors.len();
        return Ok(finalize(op, vectors, count, res_floor));
    }

    let sigma = if op.problem == ProblemTag::NeumannLaplacian {
        1e-6 * gersh
    } else {
        0.0
    };
    let chol = SparseCholesky::factor_operator(op, sigma)?;

    let free_dim = dim - kernel.len();
    let mut applications = 0usize;
    // converged eigenvectors locked out of later Lanczos cycles
    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut fruitless_restarts = 0usize;
    let mut worst_seen = f64::INFINITY;

    'cycle: loop {
        let m_rem = m_iter - locked.len();
        let free_now = free_dim - locked.len();
        let max_basis = free_now.min((4 * m_rem + 120).max(60));

        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_basis + 1);
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new(); // beta[j] couples basis[j], basis[j+1]

        let mut v0 = random_vector(dim, &mut rng);
        orthogonalize(&mut v0, &kernel, &locked, &basis);
        let n0 = norm(&v0);
        if n0 <= 1e-300 {
            return Err(Error::NonConvergence {
                tol,
                budget: applications,
                worst: worst_seen,
            });
        }
        for x in v0.iter_mut() {
            *x /= n0;
        }
        basis.push(v0);

        let mut solve_buf = vec![0.0; dim];
        let mut best_converged = 0usize;
        let mut last_progress = 1usize;

        loop {
            // one Lanczos step on B = (A + sigma)^-1
            let exhausted;
            {
                let j = basis.len() - 1;
                chol.solve(&basis[j], &mut solve_buf);
                applications += 1;
                let mut w = solve_buf.clone();
                if j > 0 {
                    axpy(&mut w, -beta[j - 1], &basis[j - 1]);
                }
                let a = dot(&w, &basis[j]);
                axpy(&mut w, -a, &basis[j]);
                alpha.push(a);
                orthogonalize(&mut w, &kernel, &locked, &basis);
                let b = norm(&w);
                let b_scale = alpha.iter().fold(1e-300f64, |acc, &x| acc.max(x.abs()));
                if basis.len() < free_now && basis.len() < max_basis {
                    if b <= 1e-13 * b_scale {
                        // invariant subspace hit: continue in a fresh direction
                        let mut fresh = random_vector(dim, &mut rng);
                        orthogonalize(&mut fresh, &kernel, &locked, &basis);
                        let nf = norm(&fresh);
                        if nf <= 1e-300 {
                            return Err(Error::NonConvergence {
                                tol,
                                budget: applications,
                                worst: worst_seen,
                            });
                        }
                        for x in fresh.iter_mut() {
                            *x /= nf;
                        }
                        beta.push(0.0);
                        basis.push(fresh);
                    } else {
                        let mut next = w;
                        for x in next.iter_mut() {
                            *x /= b;
                        }
                        beta.push(b);
                        basis.push(next);
                    }
                    exhausted = false;
                } else {
                    // keep the trailing coupling for residual estimates
                    beta.push(b);
                    exhausted = true;
                }
            }

            let k = alpha.len();
            let warmed = k >= (2 * m_rem + 12).min(free_now);
            let out_of_budget = applications >= budget;
            let checkpoint = exhausted || out_of_budget || (warmed && k % 10 == 0);
            if !checkpoint {
                continue;
            }

            let (theta, svec) = tridiagonal_eigen(&alpha, &beta[..k - 1], true)?;
            let s = svec.unwrap();
            let beta_last = beta[k - 1];

            let mut converged = 0usize;
            let mut all_ok = k >= m_rem;
            for r in 0..m_rem.min(k) {
                let idx = k - 1 - r;
                let th = theta[idx];
                if th <= 0.0 {
                    all_ok = false;
                    break;
                }
                let lam = 1.0 / th - sigma;
                let est = beta_last * s[(k - 1) * k + idx].abs();
                let rel = est * (gersh + sigma) / (th * lam.abs().max(res_floor));
                if rel <= 0.5 * tol {
                    converged += 1;
                } else {
                    all_ok = false;
                }
            }
            if converged > best_converged {
                best_converged = converged;
                last_progress = basis.len();
            }

            if all_ok || exhausted || out_of_budget {
                let candidates = ritz_block(&kernel, &locked, &basis, &alpha, &beta, m, m_rem)?;
                let kernel_count = kernel.len().min(m);
                let outcome = finalize(op, candidates, kernel_count, res_floor);
                let worst = outcome.residuals.iter().fold(0.0f64, |acc, &r| acc.max(r));
                worst_seen = worst_seen.min(worst);
                if worst <= tol {
                    // a single Krylov sequence sees one direction per
                    // eigenspace, so a copy of a multiple eigenvalue can be
                    // missing even though every returned pair is converged;
                    // sweep the deflated complement until nothing converges
                    // below the accepted cutoff
                    if basis.len() >= free_now {
                        return Ok(outcome);
                    }
                    return Ok(ensure_no_missed(
                        op,
                        &chol,
                        outcome,
                        kernel_count,
                        sigma,
                        tol,
                        gersh,
                        res_floor,
                        m,
                        &mut rng,
                        &mut applications,
                        budget,
                    ));
                }
                if out_of_budget || free_now == basis.len() {
                    return Err(Error::NonConvergence {
                        tol,
                        budget: applications,
                        worst,
                    });
                }
                if exhausted {
                    // lock what has converged and restart in the complement
                    let before = locked.len();
                    locked.clear();
                    for (i, v) in outcome.vectors.into_iter().enumerate() {
                        if i < kernel_count {
                            continue;
                        }
                        if outcome.residuals[i] <= tol && locked.len() < m_iter {
                            locked.push(v);
                        }
                    }
                    if locked.len() <= before {
                        fruitless_restarts += 1;
                        if fruitless_restarts >= 3 {
                            return Err(Error::NonConvergence {
                                tol,
                                budget: applications,
                                worst,
                            });
                        }
                    } else {
                        fruitless_restarts = 0;
                    }
                    if locked.len() >= m_iter {
                        // everything converged individually but the joint
                        // block failed; one more cycle rebuilds it
                        locked.truncate(m_iter.saturating_sub(1));
                    }
                    continue 'cycle;
                }
            }

            // stalled on a degenerate cluster: replace the trailing vector
            // with a fresh random direction (the zero coupling splits T)
            if basis.len().saturating_sub(last_progress) >= 60 && !exhausted {
                let mut fresh = random_vector(dim, &mut rng);
                orthogonalize(&mut fresh, &kernel, &locked, &basis);
                let nf = norm(&fresh);
                if nf > 1e-300 {
                    for x in fresh.iter_mut() {
                        *x /= nf;
                    }
                    let j = basis.len() - 1;
                    basis[j] = fresh;
                    beta[j - 1] = 0.0;
                    last_progress = basis.len();
                }
            }
        }
    }
}

/// Ritz vectors for the m_rem smallest remaining eigenvalues, jointly
/// orthonormalized behind the kernel and locked blocks.
fn ritz_block(
    kernel: &[Vec<f64>],
    locked: &[Vec<f64>],
    basis: &[Vec<f64>],
    alpha: &[f64],
    beta: &[f64],
    m: usize,
    m_rem: usize,
) -> Result<Vec<Vec<f64>>> {
    let k = alpha.len();
    let (_, svec) = tridiagonal_eigen(alpha, &beta[..k - 1], true)?;
    let s = svec.unwrap();
    let dim = basis[0].len();

    let mut vectors: Vec<Vec<f64>> = kernel.iter().take(m).cloned().collect();
    vectors.extend(locked.iter().cloned());
    for r in 0..m_rem.min(k) {
        let idx = k - 1 - r;
        let mut v = vec![0.0; dim];
        for (j, q) in basis.iter().take(k).enumerate() {
            let c = s[j * k + idx];
            if c != 0.0 {
                axpy(&mut v, c, q);
            }
        }
        vectors.push(v);
    }

    // modified Gram-Schmidt, two passes per vector
    for i in 0..vectors.len() {
        for _ in 0..2 {
            for jj in 0..i {
                let (head, tail) = vectors.split_at_mut(i);
                let c = dot(&tail[0], &head[jj]);
                axpy(&mut tail[0], -c, &head[jj]);
            }
        }
        let nv = norm(&vectors[i]);
        if nv <= 1e-300 {
            return Err(Error::InvalidInput(
                "degenerate Ritz block during orthonormalization".into(),
            ));
        }
        let inv = 1.0 / nv;
        for x in vectors[i].iter_mut() {
            *x *= inv;
        }
    }
    Ok(vectors)
}

/// Repeatedly search the orthogonal complement of the accepted pairs for an
/// eigenvalue below the accepted cutoff (a missed copy of a multiple
/// eigenvalue), merging hits until a sweep comes back clean.
#[allow(clippy::too_many_arguments)]
fn ensure_no_missed(
    op: &SparseOperator,
    chol: &SparseCholesky,
    mut outcome: LanczosOutcome,
    kernel_count: usize,
    sigma: f64,
    tol: f64,
    gersh: f64,
    res_floor: f64,
    m: usize,
    rng: &mut SplitMix64,
    applications: &mut usize,
    budget: usize,
) -> LanczosOutcome {
    let max_sweeps = 2 * m + 4;
    for _ in 0..max_sweeps {
        if *applications >= budget {
            break;
        }
        let cutoff = *outcome.eigenvalues.last().unwrap();
        match sweep_for_missed(
            op,
            chol,
            &outcome.vectors,
            sigma,
            tol,
            gersh,
            res_floor,
            cutoff,
            rng,
            applications,
            budget,
        ) {
            Some(v_new) => {
                let mut vectors = outcome.vectors;
                vectors.push(v_new);
                let mut merged = finalize(op, vectors, kernel_count, res_floor);
                merged.eigenvalues.truncate(m);
                merged.vectors.truncate(m);
                merged.residuals.truncate(m);
                outcome = merged;
            }
            None => break,
        }
    }
    outcome
}

/// One verification sweep: a short Lanczos run deflated against `deflate`.
/// Returns an eigenvector below `cutoff` when one converges there, `None`
/// when the smallest Ritz value of the complement sits at or above the
/// cutoff.
#[allow(clippy::too_many_arguments)]
fn sweep_for_missed(
    op: &SparseOperator,
    chol: &SparseCholesky,
    deflate: &[Vec<f64>],
    sigma: f64,
    tol: f64,
    gersh: f64,
    res_floor: f64,
    cutoff: f64,
    rng: &mut SplitMix64,
    applications: &mut usize,
    budget: usize,
) -> Option<Vec<f64>> {
    let dim = op.dim;
    if deflate.len() >= dim {
        return None;
    }
    let free = dim - deflate.len();
    let max_steps = free.min(80);

    let mut v0 = random_vector(dim, rng);
    orthogonalize(&mut v0, deflate, &[], &[]);
    let n0 = norm(&v0);
    if n0 <= 1e-8 {
        return None;
    }
    for x in v0.iter_mut() {
        *x /= n0;
    }
    let mut basis = vec![v0];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut solve_buf = vec![0.0; dim];

    loop {
        if *applications >= budget {
            return None;
        }
        let j = basis.len() - 1;
        chol.solve(&basis[j], &mut solve_buf);
        *applications += 1;
        let mut w = solve_buf.clone();
        if j > 0 {
            axpy(&mut w, -beta[j - 1], &basis[j - 1]);
        }
        let a = dot(&w, &basis[j]);
        axpy(&mut w, -a, &basis[j]);
        alpha.push(a);
        orthogonalize(&mut w, deflate, &[], &basis);
        let b = norm(&w);
        let k = alpha.len();
        let done_growing = k >= max_steps || b <= 1e-13 * a.abs().max(1e-300);
        if !done_growing {
            let mut next = w;
            for x in next.iter_mut() {
                *x /= b;
            }
            beta.push(b);
            basis.push(next);
        } else {
            beta.push(b);
        }

        if k % 8 == 0 || done_growing {
            let Ok((theta, svec)) = tridiagonal_eigen(&alpha, &beta[..k - 1], true) else {
                return None;
            };
            let s = svec.unwrap();
            let idx = k - 1;
            let th = theta[idx];
            if th > 0.0 {
                // Ritz values only over-estimate the smallest eigenvalue of
                // the complement, so a value below the cutoff is certain
                // evidence of a missed pair
                let lam = 1.0 / th - sigma;
                let est = beta[k - 1] * s[(k - 1) * k + idx].abs();
                let rel = est * (gersh + sigma) / (th * lam.abs().max(res_floor));
                if rel <= 0.3 * tol || done_growing {
                    if lam >= cutoff * (1.0 - 1e-9) {
                        return None;
                    }
                    if rel <= 0.3 * tol {
                        // build and verify the candidate
                        let mut v = vec![0.0; dim];
                        for (jj, q) in basis.iter().take(k).enumerate() {
                            let c = s[jj * k + idx];
                            if c != 0.0 {
                                axpy(&mut v, c, q);
                            }
                        }
                        orthogonalize(&mut v, deflate, &[], &[]);
                        let nv = norm(&v);
                        if nv <= 1e-8 {
                            return None;
                        }
                        for x in v.iter_mut() {
                            *x /= nv;
                        }
                        let av = op.apply(&v);
                        let rq = dot(&v, &av);
                        let mut r2 = 0.0;
                        for i in 0..dim {
                            let d = av[i] - rq * v[i];
                            r2 += d * d;
                        }
                        if r2.sqrt() / rq.abs().max(res_floor) <= tol && rq < cutoff * (1.0 - 1e-9)
                        {
                            return Some(v);
                        }
                    }
                }
            }
            if done_growing {
                return None;
            }
        }
    }
}

/// Rayleigh quotients, ascending sort, explicit residuals. The first
/// `kernel_count` vectors are known kernel members (the graph Laplacian
/// annihilates component indicators identically), so their eigenvalue and
/// residual are 0 by construction rather than by iteration.
fn finalize(
    op: &SparseOperator,
    vectors: Vec<Vec<f64>>,
    kernel_count: usize,
    res_floor: f64,
) -> LanczosOutcome {
    let mut pairs: Vec<(f64, Vec<f64>, f64)> = vectors
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            if i < kernel_count {
                return (0.0, v, 0.0);
            }
            let av = op.apply(&v);
            let lam = dot(&v, &av);
            let mut r2 = 0.0;
            for i in 0..v.len() {
                let d = av[i] - lam * v[i];
                r2 += d * d;
            }
            let rel = r2.sqrt() / lam.abs().max(res_floor);
            (lam, v, rel)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let residuals = pairs.iter().map(|p| p.2).collect();
    let vectors = pairs.into_iter().map(|p| p.1).collect();
    LanczosOutcome {
        eigenvalues,
        vectors,
        residuals,
    }
}
