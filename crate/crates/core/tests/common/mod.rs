//! Shared closed-form oracles for the integration suites. Everything here
//! is independent of the library's solver path: separable trigonometric
//! spectra for the square and Bessel-root frequencies for the disk.
//!
//! Each test target links its own copy, so not every oracle is used by
//! every target.
#![allow(dead_code)]

/// π²(j² + l²) for j, l ≥ 1, ascending.
pub fn square_dirichlet_continuum(count: usize) -> Vec<f64> {
    let pi2 = std::f64::consts::PI.powi(2);
    let mut vals = Vec::new();
    for j in 1..=16u32 {
        for l in 1..=16u32 {
            vals.push(pi2 * (j * j + l * l) as f64);
        }
    }
    vals.sort_by(f64::total_cmp);
    vals.truncate(count);
    vals
}

/// Discrete Dirichlet spectrum of the unit square on a node-registered grid:
/// (4/h²)(sin²(jπh/2) + sin²(lπh/2)) for j, l ≥ 1, ascending.
pub fn square_dirichlet_discrete(h: f64, count: usize) -> Vec<f64> {
    let half_pi_h = 0.5 * std::f64::consts::PI * h;
    let scale = 4.0 / (h * h);
    let mut vals = Vec::new();
    for j in 1..=16u32 {
        for l in 1..=16u32 {
            let sj = (j as f64 * half_pi_h).sin();
            let sl = (l as f64 * half_pi_h).sin();
            vals.push(scale * (sj * sj + sl * sl));
        }
    }
    vals.sort_by(f64::total_cmp);
    vals.truncate(count);
    vals
}

/// Discrete Neumann spectrum of the unit square on a cell-registered grid:
/// (4/h²)(sin²(jπh/2) + sin²(lπh/2)) for j, l ≥ 0, ascending.
pub fn square_neumann_discrete(h: f64, count: usize) -> Vec<f64> {
    let half_pi_h = 0.5 * std::f64::consts::PI * h;
    let scale = 4.0 / (h * h);
    let mut vals = Vec::new();
    for j in 0..=16u32 {
        for l in 0..=16u32 {
            let sj = (j as f64 * half_pi_h).sin();
            let sl = (l as f64 * half_pi_h).sin();
            vals.push(scale * (sj * sj + sl * sl));
        }
    }
    vals.sort_by(f64::total_cmp);
    vals.truncate(count);
    vals
}

/// Modified Bessel function I₀ by its power series (machine precision for
/// the argument range used here).
pub fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..200 {
        term *= q / ((m * m) as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

/// Modified Bessel function I₁ by its power series.
pub fn bessel_i1(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for m in 1..200 {
        term *= q / ((m * (m + 1)) as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

/// Frequency equation of the fundamental clamped-disk mode:
/// J₀(k)I₁(k) + I₀(k)J₁(k) = 0. Returns the smallest positive root.
pub fn clamped_disk_frequency() -> f64 {
    let f = |k: f64| libm::j0(k) * bessel_i1(k) + bessel_i0(k) * libm::j1(k);
    bisect(f, 3.0, 3.5)
}

/// Fundamental clamped-disk eigenvalue Γ₁ = k⁴ for the unit disk.
pub fn clamped_disk_gamma1() -> f64 {
    clamped_disk_frequency().powi(4)
}

/// First positive root of J₁′ (the first nonzero Neumann frequency of the
/// unit disk); μ₁ = root².
pub fn neumann_disk_mu1() -> f64 {
    // J1'(x) = J0(x) − J1(x)/x
    let f = |x: f64| libm::j0(x) - libm::j1(x) / x;
    let p = bisect(f, 1.5, 2.2);
    p * p
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    assert!(
        flo * f(hi) < 0.0,
        "bisection bracket does not straddle a root"
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}

#[allow(dead_code)]
pub fn rel_err(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs()
}
