//! Discrete Fourier-side identities on computed eigenfunctions.
//!
//! Each eigenfunction is extended by zero to a padded box and transformed
//! with amplitudes (2π)^{−n/2} hⁿ Σ u(x) e^{i⟨x,z⟩} on the dual grid of the
//! box. Because the eigenvectors are orthonormal in the discrete L²(Ω)
//! inner product, the following hold *exactly* (up to roundoff) on the dual
//! grid, with the raster volume V_h and inertia I_h:
//!
//! * Parseval: w Σ_z |φ̂_j|² = 1, and w Σ_z h(z) = k for h = Σ_{j≤k}|φ̂_j|²;
//! * Bessel: Σ_{j≤k} |φ̂_j(z)|² ≤ (2π)^{−n} V_h at every z;
//! * gradient Bessel: Σ_{j≤k} |∇φ̂_j(z)|² ≤ (2π)^{−n} I_h, with ∇φ̂ the
//!   transform of i·(x − centroid)·u, and the pointwise Cauchy–Schwarz bound
//!   |∇h(z)| ≤ 2(2π)^{−n} √(V_h I_h);
//! * energy: w Σ_z σ(z) |φ̂_j(z)|² = Γ_j, where σ is the symbol of the
//!   squared difference stencil — the discrete stand-in for |z|⁴. The
//!   continuum weight |z|⁴ is kept as a diagnostic only.
//!
//! The amplitudes are stored without the global phase e^{i x₀·z} of the
//! grid offset; every reported quantity is a product of an amplitude with a
//! conjugated amplitude at the same z, so the phase cancels.
//!
//! `mass_and_moment_pipeline` rearranges h(z), checks its radial mass and
//! fourth moment, and evaluates the final moment-inequality chain against
//! Σ Γ_j.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::discretize::{ProblemTag, SparseOperator};
use crate::eigensolve::Spectrum;
use crate::geometry::{unit_ball_volume, GeometrySummary};
use crate::lemma_lab::{lemma_rhs, ratio_from_parts};
use crate::rearrangement::{decreasing_rearrangement, radial_moment, GridFunction};
use crate::{Error, Result};

/// Relative slack for the exact discrete inequalities (Bessel, gradient).
pub const EXACT_SLACK: f64 = 1e-12;
/// Relative tolerance of the Parseval-based identities.
pub const PARSEVAL_TOL: f64 = 1e-8;
/// Relative tolerance of the radial mass identity after rearrangement.
pub const RADIAL_MASS_TOL: f64 = 5e-3;
/// Relative slack of the rearranged fourth-moment comparison against the
/// symbol-weighted energy. The squared-stencil symbol sits below |z|⁴, with
/// a deficit measured at ≈ 1.2·h on the disk for the first ten modes, so
/// the slack is frozen at 5% for the verification resolutions (h ≤ 1/32).
pub const MOMENT_SLACK: f64 = 5e-2;
/// Relative slack of the same comparison against the true |z|⁴-weighted
/// sum, where only quadrature and the dual-raster radius mismatch enter.
pub const PROXY_MOMENT_SLACK: f64 = 2e-2;

/// Transforms of a block of eigenfunctions on the dual grid of a padded box.
pub struct FourierTable {
    pub n: usize,
    pub h: f64,
    pub problem: ProblemTag,
    pub dual_dims: [usize; 3],
    /// Dual-cell volume Π 2π/(P_q h).
    pub dual_weight: f64,
    /// Signed frequency values per axis.
    freqs: [Vec<f64>; 3],
    /// Symbol of the squared stencil per dual cell.
    symbol: Vec<f64>,
    /// |φ̂_j(z)|-amplitudes per eigenfunction (phase-rotated).
    phi_hat: Vec<Vec<Complex64>>,
    /// Gradient transforms, cell-major with n components per cell.
    grad_hat: Vec<Vec<Complex64>>,
    pub eigenvalues: Vec<f64>,
    pub v_h: f64,
    pub i_h: f64,
}

fn next_fast_len(mut target: usize) -> usize {
    fn smooth(mut x: usize) -> bool {
        for f in [2, 3, 5] {
            while x % f == 0 {
                x /= f;
            }
        }
        x == 1
    }
    while !smooth(target) {
        target += 1;
    }
    target
}

/// In-place n-dimensional FFT with the e^{+i} (inverse, unscaled) kernel.
fn fft_nd(data: &mut [Complex64], dims: [usize; 3], n: usize, planner: &mut FftPlanner<f64>) {
    let (nx, ny, nz) = (dims[0], dims[1], dims[2]);
    // axis 0: contiguous rows
    let fft_x = planner.plan_fft_inverse(nx);
    for row in data.chunks_exact_mut(nx) {
        fft_x.process(row);
    }
    // axis 1: stride nx
    let fft_y = planner.plan_fft_inverse(ny);
    let mut line = vec![Complex64::default(); ny];
    for iz in 0..nz {
        for ix in 0..nx {
            for iy in 0..ny {
                line[iy] = data[(iz * ny + iy) * nx + ix];
            }
            fft_y.process(&mut line);
            for iy in 0..ny {
                data[(iz * ny + iy) * nx + ix] = line[iy];
            }
        }
    }
    // axis 2: stride nx*ny
    if n == 3 {
        let fft_z = planner.plan_fft_inverse(nz);
        let mut line = vec![Complex64::default(); nz];
        for iy in 0..ny {
            for ix in 0..nx {
                for iz in 0..nz {
                    line[iz] = data[(iz * ny + iy) * nx + ix];
                }
                fft_z.process(&mut line);
                for iz in 0..nz {
                    data[(iz * ny + iy) * nx + ix] = line[iz];
                }
            }
        }
    }
}

/// Zero-extend the eigenfunctions of a computed spectrum to a padded box and
/// transform them, together with their coordinate-weighted (gradient)
/// transforms.
pub fn transform_eigenfunctions(
    op: &SparseOperator,
    spectrum: &Spectrum,
    pad_factor: usize,
) -> Result<FourierTable> {
    let vectors = spectrum
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::MissingData("the transform needs eigenvectors".into()))?;
    if spectrum.problem != op.problem {
        return Err(Error::ProblemMismatch {
            expected: op.problem.to_string(),
            got: spectrum.problem.to_string(),
        });
    }
    if pad_factor < 2 {
        return Err(Error::InvalidInput("pad factor must be at least 2".into()));
    }
    let n = op.n;
    let h = op.h;
    let hn = h.powi(n as i32);
    let dims = op.dims();

    // raster volume and inertia about the centroid
    let v_h = hn * op.dim as f64;
    let mut centroid = [0.0f64; 3];
    for i in 0..op.dim {
        let x = op.coords_of(i);
        for q in 0..n {
            centroid[q] += x[q];
        }
    }
    for c in centroid.iter_mut() {
        *c /= op.dim as f64;
    }
    let mut i_h = 0.0;
    for i in 0..op.dim {
        let x = op.coords_of(i);
        for q in 0..n {
            let d = x[q] - centroid[q];
            i_h += d * d;
        }
    }
    i_h *= hn;

    let mut dual_dims = [1usize; 3];
    for q in 0..n {
        dual_dims[q] = next_fast_len(pad_factor * dims[q]);
    }
    let dual_len: usize = dual_dims[0] * dual_dims[1] * dual_dims[2];
    let mut dual_weight = 1.0;
    let mut freqs: [Vec<f64>; 3] = [vec![0.0], vec![0.0], vec![0.0]];
    for q in 0..n {
        dual_weight *= 2.0 * PI / (dual_dims[q] as f64 * h);
        let p = dual_dims[q];
        freqs[q] = (0..p)
            .map(|m| {
                let signed = if m <= p / 2 {
                    m as f64
                } else {
                    m as f64 - p as f64
                };
                2.0 * PI * signed / (p as f64 * h)
            })
            .collect();
    }

    // symbol of the squared stencil: (Σ_q (4/h²) sin²(π m_q / P_q))²
    let mut symbol = vec![0.0f64; dual_len];
    {
        let mut sin_terms: [Vec<f64>; 3] = [vec![0.0], vec![0.0], vec![0.0]];
        for q in 0..n {
            let p = dual_dims[q];
            sin_terms[q] = (0..p)
                .map(|m| {
                    let s = (PI * m as f64 / p as f64).sin();
                    4.0 / (h * h) * s * s
                })
                .collect();
        }
        let mut idx = 0;
        for iz in 0..dual_dims[2] {
            for iy in 0..dual_dims[1] {
                for ix in 0..dual_dims[0] {
                    let s = sin_terms[0][ix]
                        + if n >= 2 { sin_terms[1][iy] } else { 0.0 }
                        + if n == 3 { sin_terms[2][iz] } else { 0.0 };
                    symbol[idx] = s * s;
                    idx += 1;
                }
            }
        }
    }

    let amp = (2.0 * PI).powf(-(n as f64) / 2.0) * hn;
    let mut planner = FftPlanner::new();
    let mut phi_hat = Vec::with_capacity(vectors.len());
    let mut grad_hat = Vec::with_capacity(vectors.len());
    let mut field = vec![Complex64::default(); dual_len];
    for u in vectors {
        // plain transform
        field.iter_mut().for_each(|c| *c = Complex64::default());
        for (i, &v) in u.iter().enumerate() {
            let c = op.cell_of(i);
            field[(c[2] * dual_dims[1] + c[1]) * dual_dims[0] + c[0]] = Complex64::new(v, 0.0);
        }
        fft_nd(&mut field, dual_dims, n, &mut planner);
        let hat: Vec<Complex64> = field.iter().map(|c| c * amp).collect();

        // Parseval guard: w Σ |φ̂|² = hⁿ Σ u² = 1
        let total: f64 = hat.iter().map(|c| c.norm_sqr()).sum::<f64>() * dual_weight;
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "transform lost normalization: w Σ|φ̂|² = {total}"
            )));
        }
        phi_hat.push(hat);

        // gradient components: transform of i (x_q − centroid_q) u
        let mut grads = vec![Complex64::default(); dual_len * n];
        for q in 0..n {
            field.iter_mut().for_each(|c| *c = Complex64::default());
            for (i, &v) in u.iter().enumerate() {
                let c = op.cell_of(i);
                let x = op.coords_of(i);
                field[(c[2] * dual_dims[1] + c[1]) * dual_dims[0] + c[0]] =
                    Complex64::new(v * (x[q] - centroid[q]), 0.0);
            }
            fft_nd(&mut field, dual_dims, n, &mut planner);
            for (cell, c) in field.iter().enumerate() {
                grads[cell * n + q] = Complex64::new(0.0, 1.0) * c * amp;
            }
        }
        grad_hat.push(grads);
    }

    Ok(FourierTable {
        n,
        h,
        problem: op.problem,
        dual_dims,
        dual_weight,
        freqs,
        symbol,
        phi_hat,
        grad_hat,
        eigenvalues: spectrum.eigenvalues.clone(),
        v_h,
        i_h,
    })
}

impl FourierTable {
    pub fn k_available(&self) -> usize {
        self.phi_hat.len()
    }

    pub fn dual_len(&self) -> usize {
        self.symbol.len()
    }

    pub fn amplitude(&self, j: usize, cell: usize) -> Complex64 {
        self.phi_hat[j][cell]
    }

    /// |z|² of a dual cell.
    fn z_sq(&self, cell: usize) -> f64 {
        let ix = cell % self.dual_dims[0];
        let rest = cell / self.dual_dims[0];
        let iy = rest % self.dual_dims[1];
        let iz = rest / self.dual_dims[1];
        let mut z2 = self.freqs[0][ix] * self.freqs[0][ix];
        if self.n >= 2 {
            z2 += self.freqs[1][iy] * self.freqs[1][iy];
        }
        if self.n == 3 {
            z2 += self.freqs[2][iz] * self.freqs[2][iz];
        }
        z2
    }

    fn frequency_of(&self, cell: usize) -> [f64; 3] {
        let ix = cell % self.dual_dims[0];
        let rest = cell / self.dual_dims[0];
        let iy = rest % self.dual_dims[1];
        let iz = rest / self.dual_dims[1];
        [
            self.freqs[0][ix],
            if self.n >= 2 { self.freqs[1][iy] } else { 0.0 },
            if self.n == 3 { self.freqs[2][iz] } else { 0.0 },
        ]
    }

    /// h(z) = Σ_{j≤k} |φ̂_j(z)|² over the dual grid.
    pub fn spectral_density(&self, k: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dual_len()];
        for j in 0..k {
            for (cell, c) in self.phi_hat[j].iter().enumerate() {
                out[cell] += c.norm_sqr();
            }
        }
        out
    }
}

/// One named check with its worst margin and location.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeCheck {
    pub name: String,
    /// Positive means the inequality or identity held with room.
    pub worst_margin: f64,
    /// Frequency where the worst margin occurred (when meaningful).
    pub location: [f64; 3],
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BesselReport {
    pub k: usize,
    /// min over z of (2π)^{−n}V_h − Σ|φ̂_j|², relative to the bound.
    pub bessel_margin: f64,
    pub bessel_location: [f64; 3],
    /// min over z of (2π)^{−n}I_h − Σ|∇φ̂_j|², relative to the bound.
    pub gradient_sum_margin: f64,
    pub gradient_sum_location: [f64; 3],
    /// min over z of 2(2π)^{−n}√(V_h I_h) − |∇h(z)|, relative to the bound.
    pub gradient_pointwise_margin: f64,
    pub gradient_pointwise_location: [f64; 3],
    pub pass: bool,
}

/// Bessel and gradient inequalities at every dual-grid point.
pub fn bessel_check(table: &FourierTable, k: usize) -> Result<BesselReport> {
    if k == 0 || k > table.k_available() {
        return Err(Error::InvalidInput(format!(
            "k = {k} outside 1..={}",
            table.k_available()
        )));
    }
    let two_pi_neg_n = (2.0 * PI).powf(-(table.n as f64));
    let v_bound = two_pi_neg_n * table.v_h;
    let i_bound = two_pi_neg_n * table.i_h;
    let grad_bound = 2.0 * two_pi_neg_n * (table.v_h * table.i_h).sqrt();

    let mut worst_b = f64::INFINITY;
    let mut worst_b_cell = 0usize;
    let mut worst_gs = f64::INFINITY;
    let mut worst_gs_cell = 0usize;
    let mut worst_gp = f64::INFINITY;
    let mut worst_gp_cell = 0usize;

    let n = table.n;
    for cell in 0..table.dual_len() {
        let mut sum_phi = 0.0;
        let mut sum_grad = 0.0;
        let mut grad_h = [0.0f64; 3];
        for j in 0..k {
            let p = table.phi_hat[j][cell];
            sum_phi += p.norm_sqr();
            for q in 0..n {
                let g = table.grad_hat[j][cell * n + q];
                sum_grad += g.norm_sqr();
                // ∇h = 2 Σ_j Re(conj(φ̂_j) ∇φ̂_j)
                grad_h[q] += 2.0 * (p.conj() * g).re;
            }
        }
        let m_b = (v_bound - sum_phi) / v_bound;
        if m_b < worst_b {
            worst_b = m_b;
            worst_b_cell = cell;
        }
        let m_gs = (i_bound - sum_grad) / i_bound;
        if m_gs < worst_gs {
            worst_gs = m_gs;
            worst_gs_cell = cell;
        }
        let gh = (grad_h[0] * grad_h[0] + grad_h[1] * grad_h[1] + grad_h[2] * grad_h[2]).sqrt();
        let m_gp = (grad_bound - gh) / grad_bound;
        if m_gp < worst_gp {
            worst_gp = m_gp;
            worst_gp_cell = cell;
        }
    }

    let pass = worst_b >= -EXACT_SLACK && worst_gs >= -EXACT_SLACK && worst_gp >= -EXACT_SLACK;
    Ok(BesselReport {
        k,
        bessel_margin: worst_b,
        bessel_location: table.frequency_of(worst_b_cell),
        gradient_sum_margin: worst_gs,
        gradient_sum_location: table.frequency_of(worst_gs_cell),
        gradient_pointwise_margin: worst_gp,
        gradient_pointwise_location: table.frequency_of(worst_gp_cell),
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyReport {
    /// Relative deviation of w Σ σ(z)|φ̂_j|² from Γ_j, per eigenfunction.
    pub symbol_deviation: Vec<f64>,
    /// Diagnostic: relative deviation of the continuum-weight sum
    /// w Σ |z|⁴ |φ̂_j|² from Γ_j.
    pub proxy_deviation: Vec<f64>,
    pub worst_symbol_deviation: f64,
    pub pass: bool,
}

/// Symbol-weighted Parseval energy identity per eigenpair.
pub fn energy_identity(table: &FourierTable, spectrum: &Spectrum) -> Result<EnergyReport> {
    if table.problem != ProblemTag::ClampedBilaplacian
        || spectrum.problem != ProblemTag::ClampedBilaplacian
    {
        return Err(Error::ProblemMismatch {
            expected: ProblemTag::ClampedBilaplacian.to_string(),
            got: format!("{} / {}", table.problem, spectrum.problem),
        });
    }
    let mut symbol_deviation = Vec::new();
    let mut proxy_deviation = Vec::new();
    for (j, &gamma) in spectrum
        .eigenvalues
        .iter()
        .take(table.k_available())
        .enumerate()
    {
        let mut sum_sym = 0.0;
        let mut sum_proxy = 0.0;
        for (cell, c) in table.phi_hat[j].iter().enumerate() {
            let a2 = c.norm_sqr();
            sum_sym += table.symbol[cell] * a2;
            let z2 = table.z_sq(cell);
            sum_proxy += z2 * z2 * a2;
        }
        sum_sym *= table.dual_weight;
        sum_proxy *= table.dual_weight;
        symbol_deviation.push((sum_sym - gamma).abs() / gamma);
        proxy_deviation.push((sum_proxy - gamma).abs() / gamma);
    }
    let worst = symbol_deviation.iter().cloned().fold(0.0, f64::max);
    Ok(EnergyReport {
        symbol_deviation,
        proxy_deviation,
        worst_symbol_deviation: worst,
        pass: worst <= PARSEVAL_TOL,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub k: usize,
    /// (w Σ h − k)/k.
    pub mass_deviation: f64,
    /// (nB_n ∫ s^{n−1} g − k)/k after rearrangement.
    pub radial_mass_deviation: f64,
    /// g(0) against its ceiling (2π)^{−n} V_h.
    pub g0: f64,
    pub g0_bound: f64,
    /// Σ σh against the rearranged fourth moment (positive margin = holds).
    pub moment_margin: f64,
    /// Σ |z|⁴h against the rearranged fourth moment; the exact discrete
    /// rearrangement comparison, up to quadrature.
    pub proxy_moment_margin: f64,
    /// Hypothesis ratio of the final inequality against d = (n+2)/(48n²).
    pub ratio: f64,
    pub d: f64,
    /// Final chain value nB_n · rhs against Σ Γ_j.
    pub chain_value: f64,
    pub gamma_sum: f64,
    pub chain_holds: bool,
    pub pass: bool,
}

/// Mass identity, rearranged radial identities and the final chain.
pub fn mass_and_moment_pipeline(table: &FourierTable, k: usize) -> Result<ChainReport> {
    if table.problem != ProblemTag::ClampedBilaplacian {
        return Err(Error::ProblemMismatch {
            expected: ProblemTag::ClampedBilaplacian.to_string(),
            got: table.problem.to_string(),
        });
    }
    if k == 0 || k > table.k_available() {
        return Err(Error::InvalidInput(format!(
            "k = {k} outside 1..={}",
            table.k_available()
        )));
    }
    let n = table.n;
    let nf = n as f64;
    let bn = unit_ball_volume(n)?;
    let kf = k as f64;

    let density = table.spectral_density(k);
    let mass: f64 = density.iter().sum::<f64>() * table.dual_weight;
    let mass_deviation = (mass - kf) / kf;

    let mut energy = 0.0;
    let mut proxy_energy = 0.0;
    for (cell, &hval) in density.iter().enumerate() {
        energy += table.symbol[cell] * hval;
        let z2 = table.z_sq(cell);
        proxy_energy += z2 * z2 * hval;
    }
    energy *= table.dual_weight;
    proxy_energy *= table.dual_weight;

    let grid_fn = GridFunction::from_values(n, table.dual_weight, density, None)?;
    let profile = decreasing_rearrangement(&grid_fn)?;
    let radial_mass = radial_moment(&profile, 0)?;
    let radial_mass_deviation = (radial_mass - kf) / kf;
    let radial_fourth = radial_moment(&profile, 4)?;
    let moment_margin = (energy - radial_fourth) / energy;
    let proxy_moment_margin = (proxy_energy - radial_fourth) / proxy_energy;

    let g0 = profile.g0();
    let g0_bound = (2.0 * PI).powf(-nf) * table.v_h;

    // final chain: A = k/(nB_n), η = 2(2π)^{−n}√(V_h I_h), ψ0 = g(0),
    // d = (n+2)/(48n²)
    let a = kf / (nf * bn);
    let eta = 2.0 * (2.0 * PI).powf(-nf) * (table.v_h * table.i_h).sqrt();
    let d = (nf + 2.0) / (48.0 * nf * nf);
    let ratio = ratio_from_parts(nf, eta, a, g0);
    let chain_value = nf * bn * lemma_rhs(nf, eta, a, g0, d);
    let gamma_sum: f64 = table.eigenvalues.iter().take(k).sum();
    let chain_holds = chain_value <= gamma_sum * (1.0 + 1e-12);

    let pass = mass_deviation.abs() <= PARSEVAL_TOL
        && radial_mass_deviation.abs() <= RADIAL_MASS_TOL
        && g0 <= g0_bound * (1.0 + EXACT_SLACK)
        && moment_margin >= -MOMENT_SLACK
        && proxy_moment_margin >= -PROXY_MOMENT_SLACK
        && ratio < d
        && chain_holds;

    Ok(ChainReport {
        k,
        mass_deviation,
        radial_mass_deviation,
        g0,
        g0_bound,
        moment_margin,
        proxy_moment_margin,
        ratio,
        d,
        chain_value,
        gamma_sum,
        chain_holds,
        pass,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EtaBounds {
    /// 2(2π)^{−n}√(V·I).
    pub eta: f64,
    /// 2(2π)^{−n}(n/(n+2))^{1/2} B_n^{−1/n} V^{(n+1)/n}.
    pub lower_bound: f64,
}

impl EtaBounds {
    /// η ≥ bound up to a relative raster slack (the bound is attained for
    /// the ball, so rasterization can undershoot by O(h)).
    pub fn satisfied(&self, rel_slack: f64) -> bool {
        self.eta >= self.lower_bound * (1.0 - rel_slack)
    }
}

/// The slope bound η = 2(2π)^{−n}√(V·I) together with its volume-only lower
/// bound.
pub fn extract_eta(geo: &GeometrySummary) -> Result<EtaBounds> {
    let nf = geo.n as f64;
    let bn = unit_ball_volume(geo.n)?;
    let eta = 2.0 * (2.0 * PI).powf(-nf) * (geo.volume * geo.inertia).sqrt();
    let lower_bound = 2.0
        * (2.0 * PI).powf(-nf)
        * (nf / (nf + 2.0)).sqrt()
        * bn.powf(-1.0 / nf)
        * geo.volume.powf((nf + 1.0) / nf);
    Ok(EtaBounds { eta, lower_bound })
}

/// Aggregated probe report for the CLI.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub domain: String,
    pub h: f64,
    pub k: usize,
    pub pad_factor: usize,
    pub checks: Vec<ProbeCheck>,
    pub pass: bool,
}

/// Run every probe check on a clamped spectrum with vectors.
pub fn run_probe(
    op: &SparseOperator,
    spectrum: &Spectrum,
    geo: &GeometrySummary,
    pad_factor: usize,
    k: usize,
) -> Result<ProbeReport> {
    let table = transform_eigenfunctions(op, spectrum, pad_factor)?;
    let mut checks = Vec::new();

    let bessel = bessel_check(&table, k)?;
    checks.push(ProbeCheck {
        name: "bessel".into(),
        worst_margin: bessel.bessel_margin,
        location: bessel.bessel_location,
        pass: bessel.bessel_margin >= -EXACT_SLACK,
    });
    checks.push(ProbeCheck {
        name: "gradient_sum".into(),
        worst_margin: bessel.gradient_sum_margin,
        location: bessel.gradient_sum_location,
        pass: bessel.gradient_sum_margin >= -EXACT_SLACK,
    });
    checks.push(ProbeCheck {
        name: "gradient_pointwise".into(),
        worst_margin: bessel.gradient_pointwise_margin,
        location: bessel.gradient_pointwise_location,
        pass: bessel.gradient_pointwise_margin >= -EXACT_SLACK,
    });

    let energy = energy_identity(&table, spectrum)?;
    checks.push(ProbeCheck {
        name: "energy_identity".into(),
        worst_margin: PARSEVAL_TOL - energy.worst_symbol_deviation,
        location: [0.0; 3],
        pass: energy.pass,
    });

    for kk in 1..=k {
        let chain = mass_and_moment_pipeline(&table, kk)?;
        checks.push(ProbeCheck {
            name: format!("chain_k{kk}"),
            worst_margin: (chain.gamma_sum - chain.chain_value) / chain.gamma_sum,
            location: [0.0; 3],
            pass: chain.pass,
        });
    }

    let eta = extract_eta(geo)?;
    checks.push(ProbeCheck {
        name: "eta_floor".into(),
        worst_margin: (eta.eta - eta.lower_bound) / eta.lower_bound,
        location: [0.0; 3],
        // raster slack: the bound is tight for the ball
        pass: eta.satisfied(0.01),
    });

    let pass = checks.iter().all(|c| c.pass);
    Ok(ProbeReport {
        domain: spectrum.domain_ref.clone(),
        h: spectrum.h,
        k,
        pad_factor,
        checks,
        pass,
    })
}
