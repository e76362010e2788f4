//! Dense symmetric eigensolvers.
//!
//! `tred2` + `tql2` are 0-based ports of the classic Householder reduction
//! and implicit-shift QL iteration for real symmetric matrices; `tql2` is
//! also used on the Lanczos tridiagonal. `jacobi_eigh` is an independent
//! cyclic Jacobi solver kept for validating the QL path on small matrices.

use crate::{Error, Result};

const EPS: f64 = 2.220446049250313e-16;

/// Householder reduction of a symmetric matrix (row-major `v`, size n×n) to
/// tridiagonal form. On return `v` holds the accumulated orthogonal
/// transform, `d` the diagonal and `e` the subdiagonal (`e[0]` = 0).
pub fn tred2(v: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
                v[j * n + i] = 0.0;
            }
        } else {
            for item in d.iter_mut().take(i) {
                *item /= scale;
                h += *item * *item;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[j * n + i] = f;
                g = e[j] + v[j * n + j] * f;
                for k in (j + 1)..i {
                    g += v[k * n + j] * d[k];
                    e[k] += v[k * n + j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k * n + j] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n.saturating_sub(1) {
        v[(n - 1) * n + i] = v[i * n + i];
        v[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k * n + i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k * n + i + 1] * v[k * n + j];
                }
                for k in 0..=i {
                    v[k * n + j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k * n + i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
        v[(n - 1) * n + j] = 0.0;
    }
    v[(n - 1) * n + n - 1] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix. `d` holds
/// the diagonal, `e` the subdiagonal with `e[0]` unused; `v` (row-major n×n)
/// accumulates eigenvectors into its columns (pass the identity for a pure
/// tridiagonal problem, or the tred2 transform). Eigenpairs are sorted
/// ascending on return.
pub fn tql2(d: &mut [f64], e: &mut [f64], v: &mut [f64], n: usize) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= EPS * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 64 {
                    return Err(Error::InvalidInput(
                        "tql2 failed to converge in 64 iterations".into(),
                    ));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0f64;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0f64;
                let mut s2 = 0.0f64;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[k * n + i + 1];
                        v[k * n + i + 1] = s * v[k * n + i] + c * h;
                        v[k * n + i] = c * v[k * n + i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= EPS * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // selection sort ascending, swapping vector columns along
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for j in (i + 1)..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for row in 0..n {
                v.swap(row * n + i, row * n + k);
            }
        }
    }
    Ok(())
}

/// Full eigendecomposition of a dense symmetric matrix (row-major `a`).
/// Returns ascending eigenvalues and the eigenvector matrix (row-major;
/// column j is the j-th eigenvector).
pub fn symmetric_eigen(a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut v = a.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, n, &mut d, &mut e);
    tql2(&mut d, &mut e, &mut v, n)?;
    Ok((d, v))
}

/// Eigenvalues (and optional vectors) of a symmetric tridiagonal matrix with
/// diagonal `diag` and subdiagonal `sub` (len n−1).
pub fn tridiagonal_eigen(
    diag: &[f64],
    sub: &[f64],
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[1..n].copy_from_slice(&sub[..n.saturating_sub(1)]);
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    tql2(&mut d, &mut e, &mut v, n)?;
    Ok((d, want_vectors.then_some(v)))
}

/// Cyclic Jacobi eigensolver; independent of the QL path, used as an oracle
/// on small matrices. Returns ascending eigenvalues and eigenvector columns.
pub fn jacobi_eigh(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let off = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += m[i * n + j] * m[i * n + j];
            }
        }
        s
    };
    let scale: f64 = (0..n).map(|i| m[i * n + i].abs()).fold(1e-300, f64::max);
    for _sweep in 0..64 {
        if off(&m) <= (EPS * scale).powi(2) * n as f64 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= EPS * scale * 1e-3 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let vals: Vec<f64> = order.iter().map(|&i| m[i * n + i]).collect();
    let mut vecs = vec![0.0; n * n];
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vecs[row * n + col] = v[row * n + src];
        }
    }
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use std::f64::consts::PI;

    /// Closed-form spectrum of the tridiagonal (2, −1) Toeplitz matrix:
    /// 4 sin²(jπ / (2(n+1))).
    #[test]
    fn tql2_matches_toeplitz_closed_form() {
        let n = 40;
        let diag = vec![2.0; n];
        let sub = vec![-1.0; n - 1];
        let (vals, vecs) = tridiagonal_eigen(&diag, &sub, true).unwrap();
        let v = vecs.unwrap();
        for j in 1..=n {
            let exact = 4.0 * (j as f64 * PI / (2.0 * (n as f64 + 1.0))).sin().powi(2);
            assert!(
                (vals[j - 1] - exact).abs() < 1e-12,
                "eig {j}: {} vs {exact}",
                vals[j - 1]
            );
        }
        // residual of one eigenpair
        let j = 5;
        let mut r: f64 = 0.0;
        for i in 0..n {
            let mut acc = 2.0 * v[i * n + j];
            if i > 0 {
                acc -= v[(i - 1) * n + j];
            }
            if i + 1 < n {
                acc -= v[(i + 1) * n + j];
            }
            r = r.max((acc - vals[j] * v[i * n + j]).abs());
        }
        assert!(r < 1e-13);
    }

    #[test]
    fn dense_eigen_agrees_with_jacobi_on_random_symmetric() {
        let n = 24;
        let mut rng = SplitMix64::new(11);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let x = rng.range(-1.0, 1.0);
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        let (ql_vals, ql_vecs) = symmetric_eigen(&a, n).unwrap();
        let (jc_vals, _) = jacobi_eigh(&a, n);
        for (x, y) in ql_vals.iter().zip(&jc_vals) {
            assert!((x - y).abs() < 1e-11, "{x} vs {y}");
        }
        // eigenvector columns are orthonormal
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n)
                    .map(|k| ql_vecs[k * n + i] * ql_vecs[k * n + j])
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dense_eigen_residuals_are_small() {
        let n = 30;
        let mut rng = SplitMix64::new(5);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let x = rng.range(0.0, 1.0);
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
            a[i * n + i] += n as f64;
        }
        let (vals, vecs) = symmetric_eigen(&a, n).unwrap();
        for j in 0..n {
            let mut worst: f64 = 0.0;
            for i in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += a[i * n + k] * vecs[k * n + j];
                }
                worst = worst.max((acc - vals[j] * vecs[i * n + j]).abs());
            }
            assert!(worst < 1e-10 * vals[n - 1].abs());
        }
    }
}
