//! Pure-formula evaluators for the spectral asymptotics and lower bounds,
//! and per-k reports comparing them against a computed spectrum.
//!
//! With B_n the unit-ball volume, V the domain volume, I the moment of
//! inertia about the centroid and k the eigenvalue index:
//!
//! * Weyl values: 4π²(B_nV)^{−2/n}k^{2/n} for the Laplacian (×n/(n+2) in
//!   mean form) and 16π⁴(B_nV)^{−4/n}k^{4/n} for the plate (×n/(n+4)).
//! * Laplacian lower bounds: Pólya's conjectured per-k value, the Li–Yau
//!   averaged bound, and Melas's inertia-corrected refinement (its constant
//!   c_n is a caller-supplied parameter).
//! * Plate lower bounds on the mean of the first k eigenvalues:
//!   Levine–Protter, plus the two-term improvement
//!   `LP + C₂(n)·(V/I)·liyau_mean + C₃(n)·(V/I)²` with
//!   C₂(n) = (n+2)/(12n(n+4)) − 1/(1152n²(n+4)) and
//!   C₃(n) = 1/(576n(n+4)) − 1/(27648n²(n+2)(n+4)),
//!   and the variant with V/I replaced by 1/Σᵢ μᵢ⁻¹ from the first n nonzero
//!   Neumann eigenvalues.
//! * Geometric facts: the rearrangement bound I ≥ (n/(n+2))V(V/B_n)^{2/n}
//!   and the Neumann trace inequality Σ 1/μᵢ ≥ I/V.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::discretize::ProblemTag;
use crate::eigensolve::Spectrum;
use crate::geometry::{unit_ball_volume, GeometrySummary};
use crate::{Error, Result};

/// Inputs shared by the bound formulas.
#[derive(Clone, Debug)]
pub struct BoundInputs {
    pub n: usize,
    pub volume: f64,
    /// Moment of inertia; required by the inertia-corrected bounds.
    pub inertia: Option<f64>,
    pub k: u64,
    /// First n nonzero Neumann eigenvalues, ascending.
    pub mu: Option<Vec<f64>>,
    /// Melas's dimensional constant; no default is assumed.
    pub melas_cn: Option<f64>,
}

impl BoundInputs {
    pub fn new(n: usize, volume: f64, k: u64) -> Self {
        BoundInputs {
            n,
            volume,
            inertia: None,
            k,
            mu: None,
            melas_cn: None,
        }
    }

    pub fn with_inertia(mut self, inertia: f64) -> Self {
        self.inertia = Some(inertia);
        self
    }

    pub fn with_mu(mut self, mu: Vec<f64>) -> Self {
        self.mu = Some(mu);
        self
    }

    pub fn with_melas_cn(mut self, c: f64) -> Self {
        self.melas_cn = Some(c);
        self
    }

    fn check(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::BadDimension(self.n as i64));
        }
        if !(self.volume > 0.0) {
            return Err(Error::InvalidInput("volume must be positive".into()));
        }
        if self.k < 1 {
            return Err(Error::InvalidInput("index k must be at least 1".into()));
        }
        if let Some(i) = self.inertia {
            if !(i > 0.0) {
                return Err(Error::InvalidInput("inertia must be positive".into()));
            }
        }
        if let Some(mu) = &self.mu {
            if mu.len() != self.n {
                return Err(Error::InvalidInput(format!(
                    "need exactly n = {} Neumann eigenvalues, got {}",
                    self.n,
                    mu.len()
                )));
            }
            let mut prev = 0.0;
            for &m in mu {
                if !(m > 0.0) {
                    return Err(Error::InvalidInput(
                        "Neumann eigenvalues must be positive".into(),
                    ));
                }
                if m < prev {
                    return Err(Error::InvalidInput(
                        "Neumann eigenvalues must ascend".into(),
                    ));
                }
                prev = m;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Problem {
    Laplace,
    Plate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Kth,
    Mean,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LaplaceBound {
    Polya,
    LiYauMean,
    LiYauKth,
    MelasMean,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlateBound {
    LevineProtter,
    Theorem,
    Corollary,
}

/// k^e, switching to an explicit exp/ln evaluation for very large k so the
/// stress-test range cannot overflow intermediate powers.
fn kpow(k: u64, e: f64) -> f64 {
    let kf = k as f64;
    if kf > 1e9 {
        (e * kf.ln()).exp()
    } else {
        kf.powf(e)
    }
}

/// Leading Weyl-scale value for the k-th eigenvalue or the mean of the first
/// k, for the Laplacian or the plate.
pub fn weyl_value(problem: Problem, mode: Mode, n: usize, volume: f64, k: u64) -> Result<f64> {
    BoundInputs::new(n, volume, k).check()?;
    let nf = n as f64;
    let bn = unit_ball_volume(n)?;
    let v = match problem {
        Problem::Laplace => {
            let base = 4.0 * PI * PI * (bn * volume).powf(-2.0 / nf) * kpow(k, 2.0 / nf);
            match mode {
                Mode::Kth => base,
                Mode::Mean => nf / (nf + 2.0) * base,
            }
        }
        Problem::Plate => {
            let base = 16.0 * PI.powi(4) * (bn * volume).powf(-4.0 / nf) * kpow(k, 4.0 / nf);
            match mode {
                Mode::Kth => base,
                Mode::Mean => nf / (nf + 4.0) * base,
            }
        }
    };
    Ok(v)
}

/// Lower bounds for Dirichlet Laplacian eigenvalues.
pub fn laplace_lower_bound(kind: LaplaceBound, inputs: &BoundInputs) -> Result<f64> {
    inputs.check()?;
    match kind {
        LaplaceBound::Polya => weyl_value(
            Problem::Laplace,
            Mode::Kth,
            inputs.n,
            inputs.volume,
            inputs.k,
        ),
        LaplaceBound::LiYauMean | LaplaceBound::LiYauKth => weyl_value(
            Problem::Laplace,
            Mode::Mean,
            inputs.n,
            inputs.volume,
            inputs.k,
        ),
        LaplaceBound::MelasMean => {
            let c = inputs.melas_cn.ok_or_else(|| {
                Error::MissingData("Melas bound requires the constant c_n".into())
            })?;
            let i = inputs.inertia.ok_or_else(|| {
                Error::MissingData("Melas bound requires the moment of inertia".into())
            })?;
            Ok(weyl_value(
                Problem::Laplace,
                Mode::Mean,
                inputs.n,
                inputs.volume,
                inputs.k,
            )? + c * inputs.volume / i)
        }
    }
}

/// The two positive coefficients of the inertia correction in the plate
/// bound: C₂(n) = (n+2)/(12n(n+4)) − 1/(1152n²(n+4)),
/// C₃(n) = 1/(576n(n+4)) − 1/(27648n²(n+2)(n+4)).
pub fn plate_correction_coefficients(n: usize) -> (f64, f64) {
    let nf = n as f64;
    let c2 = (nf + 2.0) / (12.0 * nf * (nf + 4.0)) - 1.0 / (1152.0 * nf * nf * (nf + 4.0));
    let c3 = 1.0 / (576.0 * nf * (nf + 4.0)) - 1.0 / (27648.0 * nf * nf * (nf + 2.0) * (nf + 4.0));
    (c2, c3)
}

/// Lower bounds on the mean of the first k clamped-plate eigenvalues.
pub fn plate_lower_bound(kind: PlateBound, inputs: &BoundInputs) -> Result<f64> {
    inputs.check()?;
    let lp = weyl_value(
        Problem::Plate,
        Mode::Mean,
        inputs.n,
        inputs.volume,
        inputs.k,
    )?;
    let ratio = match kind {
        PlateBound::LevineProtter => return Ok(lp),
        PlateBound::Theorem => {
            let i = inputs.inertia.ok_or_else(|| {
                Error::MissingData("the inertia-corrected plate bound requires I".into())
            })?;
            inputs.volume / i
        }
        PlateBound::Corollary => {
            let mu = inputs.mu.as_ref().ok_or_else(|| {
                Error::MissingData("the Neumann-corrected plate bound requires mu".into())
            })?;
            let inv_sum: f64 = mu.iter().map(|m| 1.0 / m).sum();
            1.0 / inv_sum
        }
    };
    let (c2, c3) = plate_correction_coefficients(inputs.n);
    let liyau_mean = weyl_value(
        Problem::Laplace,
        Mode::Mean,
        inputs.n,
        inputs.volume,
        inputs.k,
    )?;
    Ok(lp + c2 * ratio * liyau_mean + c3 * ratio * ratio)
}

/// Rearrangement lower bound on the moment of inertia:
/// (n/(n+2))·V·(V/B_n)^{2/n}, with equality for the ball.
pub fn inertia_lower_bound(n: usize, volume: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::BadDimension(n as i64));
    }
    if !(volume > 0.0) {
        return Err(Error::InvalidInput("volume must be positive".into()));
    }
    let nf = n as f64;
    let bn = unit_ball_volume(n)?;
    Ok(nf / (nf + 2.0) * volume * (volume / bn).powf(2.0 / nf))
}

/// The Neumann trace inequality Σ 1/μᵢ ≥ I/V on given data.
#[derive(Clone, Copy, Debug)]
pub struct TraceCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn neumann_trace_check(mu: &[f64], volume: f64, inertia: f64) -> Result<TraceCheck> {
    if mu.is_empty() {
        return Err(Error::InvalidInput(
            "need at least one Neumann eigenvalue".into(),
        ));
    }
    for &m in mu {
        if !(m > 0.0) {
            return Err(Error::InvalidInput(
                "Neumann eigenvalues must be positive".into(),
            ));
        }
    }
    let lhs: f64 = mu.iter().map(|m| 1.0 / m).sum();
    let rhs = inertia / volume;
    Ok(TraceCheck {
        lhs,
        rhs,
        holds: lhs >= rhs,
    })
}

/// One bound column of a report row.
#[derive(Clone, Debug)]
pub struct BoundColumn {
    pub id: &'static str,
    pub value: f64,
    /// mean − bound; nonnegative when the bound holds.
    pub margin: f64,
}

#[derive(Clone, Debug)]
pub struct ReportRow {
    pub k: usize,
    pub mean: f64,
    pub columns: Vec<BoundColumn>,
    /// True when some lower bound exceeds the mean beyond the slack.
    pub violated: bool,
}

/// Per-k table of the running mean against every requested bound.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub problem: ProblemTag,
    pub domain_ref: String,
    pub n: usize,
    pub h: f64,
    /// Relative slack granted to the lower bounds (discretization headroom).
    pub slack: f64,
    pub rows: Vec<ReportRow>,
}

/// Options for report assembly.
#[derive(Clone, Debug)]
pub struct ReportOptions {
    /// Relative slack when flagging bound violations.
    pub slack: f64,
    /// Companion Neumann data for the Neumann-corrected plate bound.
    pub neumann: Option<Spectrum>,
    pub melas_cn: Option<f64>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            slack: 0.01,
            neumann: None,
            melas_cn: None,
        }
    }
}

/// Extract the first n nonzero eigenvalues from a Neumann spectrum,
/// discarding the (near-)zero kernel modes.
pub fn first_nonzero_neumann(spectrum: &Spectrum, n: usize) -> Result<Vec<f64>> {
    if spectrum.problem != ProblemTag::NeumannLaplacian {
        return Err(Error::ProblemMismatch {
            expected: ProblemTag::NeumannLaplacian.to_string(),
            got: spectrum.problem.to_string(),
        });
    }
    let scale = spectrum
        .eigenvalues
        .last()
        .copied()
        .unwrap_or(0.0)
        .abs()
        .max(1e-300);
    let nonzero: Vec<f64> = spectrum
        .eigenvalues
        .iter()
        .copied()
        .filter(|&e| e > 1e-8 * scale)
        .collect();
    if nonzero.len() < n {
        return Err(Error::MissingData(format!(
            "need {n} nonzero Neumann eigenvalues, spectrum provides {}",
            nonzero.len()
        )));
    }
    Ok(nonzero[..n].to_vec())
}

/// Assemble the per-k report for a computed spectrum.
pub fn build_report(
    spectrum: &Spectrum,
    geo: &GeometrySummary,
    opts: &ReportOptions,
) -> Result<BoundReport> {
    if spectrum.n != geo.n {
        return Err(Error::InvalidInput(format!(
            "spectrum dimension {} does not match geometry dimension {}",
            spectrum.n, geo.n
        )));
    }
    let mu = match (&opts.neumann, spectrum.problem) {
        (Some(neu), ProblemTag::ClampedBilaplacian) => Some(first_nonzero_neumann(neu, geo.n)?),
        (Some(_), other) => {
            return Err(Error::ProblemMismatch {
                expected: ProblemTag::ClampedBilaplacian.to_string(),
                got: other.to_string(),
            })
        }
        (None, _) => None,
    };

    let mut rows = Vec::new();
    let mut running = 0.0;
    for (i, &lam) in spectrum.eigenvalues.iter().enumerate() {
        let k = i + 1;
        running += lam;
        let mean = running / k as f64;
        let mut inputs = BoundInputs::new(geo.n, geo.volume, k as u64).with_inertia(geo.inertia);
        if let Some(mu) = &mu {
            inputs = inputs.with_mu(mu.clone());
        }
        if let Some(c) = opts.melas_cn {
            inputs = inputs.with_melas_cn(c);
        }

        let mut columns = Vec::new();
        match spectrum.problem {
            ProblemTag::ClampedBilaplacian => {
                let weyl = weyl_value(Problem::Plate, Mode::Mean, geo.n, geo.volume, k as u64)?;
                columns.push(BoundColumn {
                    id: "weyl_mean",
                    value: weyl,
                    margin: mean - weyl,
                });
                let lp = plate_lower_bound(PlateBound::LevineProtter, &inputs)?;
                columns.push(BoundColumn {
                    id: "levine_protter",
                    value: lp,
                    margin: mean - lp,
                });
                let th = plate_lower_bound(PlateBound::Theorem, &inputs)?;
                columns.push(BoundColumn {
                    id: "theorem",
                    value: th,
                    margin: mean - th,
                });
                if mu.is_some() {
                    let co = plate_lower_bound(PlateBound::Corollary, &inputs)?;
                    columns.push(BoundColumn {
                        id: "corollary",
                        value: co,
                        margin: mean - co,
                    });
                }
            }
            ProblemTag::DirichletLaplacian => {
                let weyl = weyl_value(Problem::Laplace, Mode::Mean, geo.n, geo.volume, k as u64)?;
                columns.push(BoundColumn {
                    id: "weyl_mean",
                    value: weyl,
                    margin: mean - weyl,
                });
                let ly = laplace_lower_bound(LaplaceBound::LiYauMean, &inputs)?;
                columns.push(BoundColumn {
                    id: "li_yau_mean",
                    value: ly,
                    margin: mean - ly,
                });
                if opts.melas_cn.is_some() {
                    let me = laplace_lower_bound(LaplaceBound::MelasMean, &inputs)?;
                    columns.push(BoundColumn {
                        id: "melas_mean",
                        value: me,
                        margin: mean - me,
                    });
                }
            }
            ProblemTag::NeumannLaplacian => {
                return Err(Error::ProblemMismatch {
                    expected: "dirichlet_laplacian or clamped_bilaplacian".into(),
                    got: spectrum.problem.to_string(),
                })
            }
        }

        // the Weyl column is an asymptote, not a bound; only true lower
        // bounds participate in the violation flag
        let violated = columns
            .iter()
            .any(|c| c.id != "weyl_mean" && c.margin < -opts.slack * mean.abs());
        rows.push(ReportRow {
            k,
            mean,
            columns,
            violated,
        });
    }

    Ok(BoundReport {
        problem: spectrum.problem,
        domain_ref: spectrum.domain_ref.clone(),
        n: spectrum.n,
        h: spectrum.h,
        slack: opts.slack,
        rows,
    })
}

impl BoundReport {
    pub fn any_violated(&self) -> bool {
        self.rows.iter().any(|r| r.violated)
    }

    pub fn column(&self, k: usize, id: &str) -> Option<&BoundColumn> {
        self.rows
            .get(k - 1)
            .and_then(|r| r.columns.iter().find(|c| c.id == id))
    }

    /// CSV rendering: provenance comments, then
    /// `k,mean,<bound columns>,<margin columns>` at 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# problem={}", self.problem).unwrap();
        writeln!(out, "# domain={}", self.domain_ref).unwrap();
        writeln!(out, "# n={} h={}", self.n, self.h).unwrap();
        writeln!(out, "# slack={}", self.slack).unwrap();
        let ids: Vec<&str> = self
            .rows
            .first()
            .map(|r| r.columns.iter().map(|c| c.id).collect())
            .unwrap_or_default();
        write!(out, "k,mean").unwrap();
        for id in &ids {
            write!(out, ",{id}").unwrap();
        }
        for id in &ids {
            write!(out, ",margin_{id}").unwrap();
        }
        out.push('\n');
        for row in &self.rows {
            write!(out, "{},{:.11e}", row.k, row.mean).unwrap();
            for c in &row.columns {
                write!(out, ",{:.11e}", c.value).unwrap();
            }
            for c in &row.columns {
                write!(out, ",{:.11e}", c.margin).unwrap();
            }
            out.push('\n');
        }
        out
    }
}
