//! Closed-form verification of the one-dimensional moment inequalities that
//! drive the plate bound, on piecewise-linear profiles.
//!
//! For a non-increasing ψ ≥ 0 with slopes in [−η, 0], A = ∫ s^{b−1}ψ and a
//! constant d < 1 dominating the hypothesis ratio
//! ψ(0)^{(2b+2)/b} / (6bη²(bA)^{2/b}), the chain of inequalities is
//!
//! * step one: D = ∫ s^{b+1}ψ ≥ (bA)^{(b+2)/b}ψ(0)^{−2/b}/(b+2)
//!   + Aψ(0)²/(6(b+2)η²);
//! * main: ∫ s^{b+3}ψ ≥ (bA)^{(b+4)/b}ψ(0)^{−4/b}/(b+4)
//!   + (1/(3b(b+4)η²) − d/(6(b+2)²(b+4)η²))·(bA)^{(b+2)/b}ψ(0)^{(2b−2)/b}
//!   + (1/(36b(b+4)η⁴) − d/(36(b+2)²(b+4)η⁴))·Aψ(0)⁴.
//!
//! Piecewise-linear profiles make every integral a finite sum of power
//! terms, so both sides are exact up to arithmetic and the inequalities can
//! be asserted with 1e−12 slack. The module also samples the associated
//! decreasing function F(t) on (0, (2π)^{−n}V] and evaluates the dimensional
//! constants that close the argument.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bounds::plate_correction_coefficients;
use crate::geometry::unit_ball_volume;
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Piecewise-linear admissible profile: non-increasing and nonnegative on
/// [0, ∞), linear between knots, zero from the last knot on.
#[derive(Clone, Debug)]
pub struct ProfileSpec {
    /// Ascending knot locations; the first is 0 and ψ vanishes at the last.
    pub knots: Vec<f64>,
    /// ψ at each knot; non-increasing, last entry 0.
    pub values: Vec<f64>,
    /// Power parameter b ≥ 1.
    pub b: f64,
    /// Slope bound: every slope lies in [−eta, 0].
    pub eta: f64,
    /// Hypothesis constant; defaults to (ratio + 1)/2 when absent.
    pub d: Option<f64>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LemmaVerdict {
    pub lhs_25: f64,
    pub rhs_25: f64,
    pub lhs_26: f64,
    pub rhs_26: f64,
    pub holds_25: bool,
    pub holds_26: bool,
    /// Hypothesis ratio of the case.
    pub ratio: f64,
    /// Constant d actually used.
    pub d: f64,
}

const HOLD_SLACK: f64 = 1e-12;

impl ProfileSpec {
    pub fn validate(&self) -> Result<()> {
        if self.knots.len() != self.values.len() || self.knots.len() < 2 {
            return Err(Error::InvalidInput(
                "profile needs matching knots and values, at least two".into(),
            ));
        }
        if self.knots[0] != 0.0 {
            return Err(Error::InvalidInput("first knot must be 0".into()));
        }
        for w in self.knots.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidInput("knots must strictly ascend".into()));
            }
        }
        if !(self.b >= 1.0) {
            return Err(Error::InvalidInput(format!(
                "b must be at least 1, got {}",
                self.b
            )));
        }
        if !(self.eta > 0.0) {
            return Err(Error::InvalidInput("eta must be positive".into()));
        }
        if !(self.values[0] > 0.0) {
            return Err(Error::InvalidInput("profile must start positive".into()));
        }
        if *self.values.last().unwrap() != 0.0 {
            return Err(Error::InvalidInput(
                "profile must reach 0 at the last knot".into(),
            ));
        }
        for (w, k) in self.values.windows(2).zip(self.knots.windows(2)) {
            let slope = (w[1] - w[0]) / (k[1] - k[0]);
            if slope > 1e-15 || slope < -self.eta * (1.0 + 1e-12) {
                return Err(Error::InvalidInput(format!(
                    "slope {slope} outside [-eta, 0] with eta {}",
                    self.eta
                )));
            }
        }
        if let Some(d) = self.d {
            if !(d < 1.0) {
                return Err(Error::InvalidInput("d must be below 1".into()));
            }
        }
        Ok(())
    }

    /// ∫₀^∞ s^p ψ(s) ds, exactly (sum of power terms per linear segment).
    pub fn power_moment(&self, p: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.knots.len() - 1 {
            let (t0, t1) = (self.knots[i], self.knots[i + 1]);
            let (v0, v1) = (self.values[i], self.values[i + 1]);
            let slope = (v1 - v0) / (t1 - t0);
            let alpha = v0 - slope * t0;
            acc += alpha * (t1.powf(p + 1.0) - t0.powf(p + 1.0)) / (p + 1.0)
                + slope * (t1.powf(p + 2.0) - t0.powf(p + 2.0)) / (p + 2.0);
        }
        acc
    }

    pub fn psi0(&self) -> f64 {
        self.values[0]
    }

    /// A = ∫ s^{b−1} ψ.
    pub fn a_moment(&self) -> f64 {
        self.power_moment(self.b - 1.0)
    }
}

/// ψ(0)^{(2b+2)/b} / (6bη²(bA)^{2/b}).
pub fn hypothesis_ratio(p: &ProfileSpec) -> Result<f64> {
    p.validate()?;
    let a = p.a_moment();
    if !(a > 0.0) {
        return Err(Error::InvalidInput("profile has nonpositive mass A".into()));
    }
    Ok(ratio_from_parts(p.b, p.eta, a, p.psi0()))
}

/// The hypothesis ratio from its raw ingredients.
pub fn ratio_from_parts(b: f64, eta: f64, a: f64, psi0: f64) -> f64 {
    psi0.powf((2.0 * b + 2.0) / b) / (6.0 * b * eta * eta * (b * a).powf(2.0 / b))
}

/// Right-hand side of the first (step-one) inequality.
pub fn melas_step_rhs(b: f64, eta: f64, a: f64, psi0: f64) -> f64 {
    (b * a).powf((b + 2.0) / b) * psi0.powf(-2.0 / b) / (b + 2.0)
        + a * psi0 * psi0 / (6.0 * (b + 2.0) * eta * eta)
}

/// Right-hand side of the main three-term inequality.
pub fn lemma_rhs(b: f64, eta: f64, a: f64, psi0: f64, d: f64) -> f64 {
    let eta2 = eta * eta;
    let eta4 = eta2 * eta2;
    let b2 = b + 2.0;
    let b4 = b + 4.0;
    let term1 = (b * a).powf(b4 / b) * psi0.powf(-4.0 / b) / b4;
    let coeff2 = 1.0 / (3.0 * b * b4 * eta2) - d / (6.0 * b2 * b2 * b4 * eta2);
    let term2 = coeff2 * (b * a).powf(b2 / b) * psi0.powf((2.0 * b - 2.0) / b);
    let coeff3 = 1.0 / (36.0 * b * b4 * eta4) - d / (36.0 * b2 * b2 * b4 * eta4);
    let term3 = coeff3 * a * psi0.powi(4);
    term1 + term2 + term3
}

/// Evaluate both inequalities on an admissible profile with exact integrals.
pub fn verify_lemma_case(p: &ProfileSpec) -> Result<LemmaVerdict> {
    let ratio = hypothesis_ratio(p)?;
    let d = p.d.unwrap_or((ratio + 1.0) / 2.0);
    if !(ratio < d && d < 1.0) {
        return Err(Error::HypothesisViolated { ratio, d });
    }
    let a = p.a_moment();
    let psi0 = p.psi0();
    let lhs_25 = p.power_moment(p.b + 3.0);
    let rhs_25 = lemma_rhs(p.b, p.eta, a, psi0, d);
    let lhs_26 = p.power_moment(p.b + 1.0);
    let rhs_26 = melas_step_rhs(p.b, p.eta, a, psi0);
    Ok(LemmaVerdict {
        lhs_25,
        rhs_25,
        lhs_26,
        rhs_26,
        holds_25: lhs_25 >= rhs_25 * (1.0 - HOLD_SLACK),
        holds_26: lhs_26 >= rhs_26 * (1.0 - HOLD_SLACK),
        ratio,
        d,
    })
}

/// Seeded generator of admissible piecewise-linear profiles: 3–12 knots on
/// [0, 10], slopes drawn in [−eta, 0], then the profile is scaled down (eta
/// held fixed) until the hypothesis ratio hits a target below 1.
pub fn random_admissible_profile(rng: &mut SplitMix64) -> ProfileSpec {
    let b = if rng.next_f64() < 0.5 {
        1.0 + rng.below(4) as f64
    } else {
        rng.range(1.0, 4.0)
    };
    let eta = rng.range(0.2, 3.0);
    let nknots = 3 + rng.below(10); // 3..=12
    let length = rng.range(1.0, 10.0);

    // ascending knots: 0 = t_0 < … < t_{K−1} = length
    let mut increments: Vec<f64> = (0..nknots - 1).map(|_| rng.range(0.05, 1.0)).collect();
    let total: f64 = increments.iter().sum();
    for inc in increments.iter_mut() {
        *inc *= length / total;
    }
    let mut knots = vec![0.0];
    for inc in &increments {
        knots.push(knots.last().unwrap() + inc);
    }

    // values built backward from ψ(last) = 0 with slopes in [−eta, 0]; the
    // final segment always drops so the last knot is where ψ reaches 0
    let mut values = vec![0.0; nknots];
    for i in (0..nknots - 1).rev() {
        let min_slope = if i == nknots - 2 { 0.05 * eta } else { 0.0 };
        let slope = rng.range(min_slope, eta);
        values[i] = values[i + 1] + slope * (knots[i + 1] - knots[i]);
    }

    let mut profile = ProfileSpec {
        knots,
        values,
        b,
        eta,
        d: None,
    };

    // scale ψ (eta fixed) so the ratio lands on a target strictly below 1
    let target = rng.range(0.02, 0.85);
    let ratio = hypothesis_ratio(&profile).expect("generated profile is valid");
    if ratio > target {
        let c = (target / ratio).sqrt();
        for v in profile.values.iter_mut() {
            *v *= c;
        }
    }
    profile
}

/// Samples of the decreasing comparison function F on (0, (2π)^{−n}V].
#[derive(Clone, Debug)]
pub struct FProfile {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    pub monotone_decreasing: bool,
}

/// Evaluate F(t) = c₁ t^{−4/n} + c₂ t^{(2n−2)/n} + c₃ t⁴ at `samples`
/// log-spaced points, with the coefficients determined by (n, k, η, B_n).
/// Requires η ≥ (2π)^{−n} B_n^{−1/n} V^{(n+1)/n}.
pub fn f_profile(n: usize, k: u64, eta: f64, volume: f64, samples: usize) -> Result<FProfile> {
    if n < 1 {
        return Err(Error::BadDimension(n as i64));
    }
    if !(volume > 0.0) || k < 1 || samples < 2 {
        return Err(Error::InvalidInput(
            "need positive volume, k ≥ 1, at least 2 samples".into(),
        ));
    }
    let nf = n as f64;
    let bn = unit_ball_volume(n)?;
    let eta_floor = (2.0 * PI).powf(-nf) * bn.powf(-1.0 / nf) * volume.powf((nf + 1.0) / nf);
    if !(eta >= eta_floor) {
        return Err(Error::InvalidInput(format!(
            "eta {eta:.6e} below the admissible floor {eta_floor:.6e}"
        )));
    }
    let kf = k as f64;
    let eta2 = eta * eta;
    let eta4 = eta2 * eta2;
    let c1 = nf / (nf + 4.0) * bn.powf(-4.0 / nf) * kf.powf((nf + 4.0) / nf);
    let c2 = (1.0 / (3.0 * (nf + 4.0) * eta2)
        - 1.0 / (288.0 * nf * (nf + 2.0) * (nf + 4.0) * eta2))
        * kf.powf((nf + 2.0) / nf)
        * bn.powf(-2.0 / nf);
    let c3 = (1.0 / (36.0 * nf * (nf + 4.0) * eta4)
        - 1.0 / (1728.0 * nf * nf * (nf + 2.0) * (nf + 4.0) * eta4))
        * kf;
    let t_max = (2.0 * PI).powf(-nf) * volume;
    let t_min = t_max * 1e-6;
    let log_lo = t_min.ln();
    let log_hi = t_max.ln();
    let mut t = Vec::with_capacity(samples);
    let mut values = Vec::with_capacity(samples);
    for i in 0..samples {
        let ti = (log_lo + (log_hi - log_lo) * i as f64 / (samples - 1) as f64).exp();
        let f = c1 * ti.powf(-4.0 / nf) + c2 * ti.powf((2.0 * nf - 2.0) / nf) + c3 * ti.powi(4);
        t.push(ti);
        values.push(f);
    }
    let monotone_decreasing = values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-13));
    Ok(FProfile {
        t,
        values,
        monotone_decreasing,
    })
}

/// The dimensional facts used to close the argument.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DimensionConstants {
    pub n: usize,
    /// B_n^{4/n} / (2π)², below 1/2 for every n.
    pub ball_ratio: f64,
    /// (n+2)/(48n²), below 1.
    pub d_value: f64,
    pub c2: f64,
    pub c3: f64,
    pub all_checks: bool,
}

pub fn dimension_constants(n: usize) -> Result<DimensionConstants> {
    if !(1..=64).contains(&n) {
        return Err(Error::InvalidInput(format!("dimension {n} outside 1..=64")));
    }
    let nf = n as f64;
    let bn = unit_ball_volume(n)?;
    let ball_ratio = bn.powf(4.0 / nf) / (4.0 * PI * PI);
    let d_value = (nf + 2.0) / (48.0 * nf * nf);
    let (c2, c3) = plate_correction_coefficients(n);
    let all_checks = ball_ratio < 0.5 && d_value < 1.0 && c2 > 0.0 && c3 > 0.0;
    Ok(DimensionConstants {
        n,
        ball_ratio,
        d_value,
        c2,
        c3,
        all_checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_ramp(b: f64, eta: f64) -> ProfileSpec {
        ProfileSpec {
            knots: vec![0.0, 1.0],
            values: vec![1.0, 0.0],
            b,
            eta,
            d: None,
        }
    }

    #[test]
    fn ramp_ratio_is_two_thirds() {
        // psi = 1 - s, b = 1, eta = 1: A = 1/2, ratio = 1/(6 (1/2)^2) = 2/3
        let p = unit_ramp(1.0, 1.0);
        assert!((p.a_moment() - 0.5).abs() < 1e-15);
        let r = hypothesis_ratio(&p).unwrap();
        assert!((r - 2.0 / 3.0).abs() < 1e-14, "{r}");
    }

    #[test]
    fn ratio_scales_quadratically_in_value_scale() {
        let p = unit_ramp(1.0, 1.0);
        let r1 = hypothesis_ratio(&p).unwrap();
        let mut q = p.clone();
        let c = 0.37;
        for v in q.values.iter_mut() {
            *v *= c;
        }
        let r2 = hypothesis_ratio(&q).unwrap();
        assert!((r2 - c * c * r1).abs() < 1e-14);
    }

    #[test]
    fn melas_step_on_the_ramp() {
        // b=1, eta=1, A=1/2, psi0=1: rhs = 1/24 + 1/36 = 0.069444,
        // and D = int s^2 (1-s) = 1/12
        let rhs = melas_step_rhs(1.0, 1.0, 0.5, 1.0);
        assert!((rhs - (1.0 / 24.0 + 1.0 / 36.0)).abs() < 1e-15);
        let p = unit_ramp(1.0, 1.0);
        let d_int = p.power_moment(2.0);
        assert!((d_int - 1.0 / 12.0).abs() < 1e-15);
        assert!(d_int >= rhs);
    }

    #[test]
    fn lemma_rhs_on_the_ramp_with_d_07() {
        let rhs = lemma_rhs(1.0, 1.0, 0.5, 1.0, 0.7);
        // 1/160 + (1/15 - 0.7/270)/8 + (1/180 - 0.7/1620)/2
        let expect =
            1.0 / 160.0 + (1.0 / 15.0 - 0.7 / 270.0) * 0.125 + (1.0 / 180.0 - 0.7 / 1620.0) * 0.5;
        assert!((rhs - expect).abs() < 1e-15, "{rhs} vs {expect}");
        assert!((rhs - 0.016821).abs() < 5e-6);
        let p = unit_ramp(1.0, 1.0);
        let lhs = p.power_moment(4.0);
        assert!((lhs - 1.0 / 30.0).abs() < 1e-15);
        assert!(lhs >= rhs);
    }

    #[test]
    fn lemma_rhs_decreases_in_d() {
        let lo = lemma_rhs(1.0, 1.0, 0.5, 1.0, 0.0);
        let hi = lemma_rhs(1.0, 1.0, 0.5, 1.0, 1.0);
        assert!(hi < lo);
    }

    #[test]
    fn small_mass_limits() {
        // A -> 0 sends both right-hand sides to 0
        assert!(melas_step_rhs(1.0, 1.0, 1e-14, 1.0) < 1e-12);
        assert!(lemma_rhs(1.0, 1.0, 1e-14, 1.0, 0.5).abs() < 1e-12);
        // eta -> infinity leaves only the first step-one term
        let rhs = melas_step_rhs(1.0, 1e9, 0.5, 1.0);
        assert!((rhs - (1.0 / 3.0) * 0.125).abs() < 1e-12);
    }

    #[test]
    fn ramp_case_verdict_holds() {
        let mut p = unit_ramp(1.0, 1.0);
        p.d = Some(0.7);
        let v = verify_lemma_case(&p).unwrap();
        assert!(v.holds_25 && v.holds_26);
        assert!((v.ratio - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn hypothesis_gate_errors_cleanly() {
        let mut p = unit_ramp(1.0, 1.0);
        p.d = Some(0.5); // ratio 2/3 is not below 0.5
        match verify_lemma_case(&p) {
            Err(Error::HypothesisViolated { ratio, d }) => {
                assert!((ratio - 2.0 / 3.0).abs() < 1e-14);
                assert_eq!(d, 0.5);
            }
            other => panic!("expected hypothesis violation, got {other:?}"),
        }
    }

    #[test]
    fn seeded_profiles_all_hold() {
        let mut rng = SplitMix64::new(42);
        for case in 0..200 {
            let p = random_admissible_profile(&mut rng);
            let v = verify_lemma_case(&p)
                .unwrap_or_else(|e| panic!("case {case}: generator produced {e}"));
            assert!(v.holds_25, "case {case}: {} < {}", v.lhs_25, v.rhs_25);
            assert!(v.holds_26, "case {case}: {} < {}", v.lhs_26, v.rhs_26);
            assert!(v.ratio < v.d && v.d < 1.0);
        }
    }

    #[test]
    fn rhs_monotone_in_d_on_seeded_profiles() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..50 {
            let p = random_admissible_profile(&mut rng);
            let ratio = hypothesis_ratio(&p).unwrap();
            let a = p.a_moment();
            let tight = lemma_rhs(p.b, p.eta, a, p.psi0(), ratio);
            let loose = lemma_rhs(p.b, p.eta, a, p.psi0(), (ratio + 1.0) / 2.0);
            assert!(tight >= loose * (1.0 - 1e-12));
        }
    }

    #[test]
    fn f_profile_monotone_on_the_disk_instance() {
        // n=2, k=1, V=pi, eta = 2 (2pi)^{-2} sqrt(pi * pi/2)
        let eta = 2.0 * (2.0 * PI).powi(-2) * (PI * PI / 2.0).sqrt();
        assert!((eta - 0.11254).abs() < 5e-5);
        let f = f_profile(2, 1, eta, PI, 1000).unwrap();
        assert!(f.monotone_decreasing);
        let t_max = *f.t.last().unwrap();
        assert!((t_max - 1.0 / (4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn f_profile_value_at_tmax_matches_plate_bound_times_k() {
        use crate::bounds::{plate_lower_bound, BoundInputs, PlateBound};
        for (n, volume, inertia) in [(2usize, PI, PI / 2.0), (2, 1.0, 1.0 / 6.0), (3, 1.3, 0.8)] {
            let nf = n as f64;
            let eta = 2.0 * (2.0 * PI).powf(-nf) * (volume * inertia).sqrt();
            for k in [1u64, 7, 100] {
                let f = f_profile(n, k, eta, volume, 64).unwrap();
                let f_at_tmax = *f.values.last().unwrap();
                let inputs = BoundInputs::new(n, volume, k).with_inertia(inertia);
                let bound = plate_lower_bound(PlateBound::Theorem, &inputs).unwrap();
                let rel = (f_at_tmax - bound * k as f64).abs() / (bound * k as f64);
                assert!(rel < 1e-10, "n={n} k={k}: rel {rel:.2e}");
            }
        }
    }

    #[test]
    fn f_profile_grows_pointwise_in_k() {
        let eta = 0.2;
        let f1 = f_profile(2, 1, eta, PI, 128).unwrap();
        let f2 = f_profile(2, 2, eta, PI, 128).unwrap();
        for (a, b) in f1.values.iter().zip(&f2.values) {
            assert!(b > a);
        }
    }

    #[test]
    fn f_profile_rejects_small_eta() {
        let err = f_profile(2, 1, 1e-6, PI, 16).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn dimension_constants_table() {
        let c2 = dimension_constants(2).unwrap();
        assert!((c2.ball_ratio - 0.25).abs() < 1e-14);
        assert!((c2.d_value - 1.0 / 48.0).abs() < 1e-15);
        assert!((c2.c2 - 0.0277417).abs() < 1e-6);
        assert!((c2.c3 - 1.44299e-4).abs() < 1e-9);
        for n in 1..=64 {
            assert!(dimension_constants(n).unwrap().all_checks, "n = {n}");
        }
        assert!(dimension_constants(0).is_err());
        assert!(dimension_constants(65).is_err());
    }
}
