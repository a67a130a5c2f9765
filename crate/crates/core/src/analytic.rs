//! Closed forms for maximally entangled mixed (ME) states and the extremal
//! `C − E_N` curves built from them.
//!
//! Within a unitary orbit (fixed eigenvalues λ1 ≥ λ2 ≥ λ3 ≥ λ4), ME states
//! reach both the largest concurrence and the largest negativity:
//!
//! ```text
//! C   = max(0, λ1 − λ3 − 2√(λ2 λ4))
//! E_N = max(0, √((λ1 − λ3)² + (λ2 − λ4)²) − λ2 − λ4)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `Σλ = 1` and on negative round-off in eigenvalues.
pub const SPECTRUM_TOL: f64 = 1e-12;
/// Slack accepted at the ends of the scalar domains (floating grids).
const DOMAIN_SLACK: f64 = 1e-12;

/// Four non-negative eigenvalues summing to one, stored in descending order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spectrum([f64; 4]);

impl Spectrum {
    /// Sorts descending; clamps round-off negatives in `[-SPECTRUM_TOL, 0)`.
    pub fn new(values: [f64; 4]) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum("non-finite eigenvalue".into()));
        }
        if let Some(v) = values.iter().find(|&&v| v < -SPECTRUM_TOL) {
            return Err(Error::InvalidSpectrum(format!("negative eigenvalue {v}")));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SPECTRUM_TOL {
            return Err(Error::InvalidSpectrum(format!("eigenvalues sum to {sum}")));
        }
        let mut v = values.map(|x| x.max(0.0));
        v.sort_by(|a, b| b.total_cmp(a));
        Ok(Self(v))
    }

    /// Renormalizes arbitrary non-negative weights onto the simplex.
    pub fn from_weights(weights: [f64; 4]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if sum.is_nan() || sum <= 0.0 || weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidSpectrum(
                "weights must be non-negative".into(),
            ));
        }
        Self::new(weights.map(|w| w / sum))
    }

    pub fn values(&self) -> &[f64; 4] {
        &self.0
    }

    pub fn participation_ratio(&self) -> f64 {
        1.0 / self.0.iter().map(|l| l * l).sum::<f64>()
    }
}

/// `max(0, λ1 − λ3 − 2√(λ2 λ4))`.
pub fn me_concurrence(lam: &Spectrum) -> f64 {
    let [l1, l2, l3, l4] = lam.0;
    (l1 - l3 - 2.0 * (l2 * l4).sqrt()).max(0.0)
}

/// `max(0, √((λ1 − λ3)² + (λ2 − λ4)²) − λ2 − λ4)`.
pub fn me_negativity(lam: &Spectrum) -> f64 {
    let [l1, l2, l3, l4] = lam.0;
    ((l1 - l3).hypot(l2 - l4) - l2 - l4).max(0.0)
}

fn check_domain(what: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    if value >= lo - DOMAIN_SLACK && value <= hi + DOMAIN_SLACK {
        Ok(value.clamp(lo, hi))
    } else {
        Err(Error::OutOfRange {
            what,
            value,
            lo,
            hi,
        })
    }
}

/// Largest ME gap among rank-2 states: `1 − 1/√R`, `R ∈ [1, 2]`.
pub fn max_gap_rank2(r: f64) -> Result<f64> {
    let r = check_domain("participation ratio", r, 1.0, 2.0)?;
    Ok(1.0 - 1.0 / r.sqrt())
}

/// Largest ME gap on the rank-3 branch `λ1 = λ2`, `R ∈ [2, 3]`:
/// `(1 + 2α − √(α − 4 + 15/R))/3` with `α = √(6/R − 2)`.
pub fn max_gap_rank3(r: f64) -> Result<f64> {
    let r = check_domain("participation ratio", r, 2.0, 3.0)?;
    let alpha = (6.0 / r - 2.0).max(0.0).sqrt();
    Ok((1.0 + 2.0 * alpha - (alpha - 4.0 + 15.0 / r).sqrt()) / 3.0)
}

/// The ME spectrum `(a, a, 1 − 2a, 0)` on the rank-3 branch with participation ratio `r`.
pub fn rank3_branch_spectrum(r: f64) -> Result<Spectrum> {
    let r = check_domain("participation ratio", r, 2.0, 3.0)?;
    let alpha = (6.0 / r - 2.0).max(0.0).sqrt();
    let a = (2.0 + alpha) / 6.0;
    Spectrum::new([a, a, 1.0 - 2.0 * a, 0.0])
}

/// Piecewise ME envelope of `C − E_N` against `R ∈ [1, 4]`.
pub fn me_gap_envelope(r: f64) -> Result<f64> {
    let r = check_domain("participation ratio", r, 1.0, 4.0)?;
    if r <= 2.0 {
        max_gap_rank2(r)
    } else if r <= 3.0 {
        max_gap_rank3(r)
    } else {
        Ok(0.0)
    }
}

/// Largest `C − E_N` at fixed concurrence, `1 − √(C² + (1 − C)²)`, with the
/// rank-2 spectrum `(max(C, 1−C), min(C, 1−C), 0, 0)` that attains it.
pub fn max_gap_vs_c(c: f64) -> Result<(f64, Spectrum)> {
    let c = check_domain("concurrence", c, 0.0, 1.0)?;
    let gap = 1.0 - c.hypot(1.0 - c);
    let hi = c.max(1.0 - c);
    let spectrum = Spectrum::new([hi, 1.0 - hi, 0.0, 0.0])?;
    Ok((gap, spectrum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn lam(v: [f64; 4]) -> Spectrum {
        Spectrum::new(v).unwrap()
    }

    #[test]
    fn spectrum_validation() {
        assert_eq!(lam([0.1, 0.4, 0.2, 0.3]).values(), &[0.4, 0.3, 0.2, 0.1]);
        assert!(Spectrum::new([0.5, 0.5, 0.1, 0.0]).is_err());
        assert!(Spectrum::new([0.6, 0.5, -0.1, 0.0]).is_err());
        assert!(Spectrum::new([f64::NAN, 0.5, 0.5, 0.0]).is_err());
        assert_eq!(lam([1.0, 0.0, 0.0, -1e-14]).values()[3], 0.0);
    }

    #[test]
    fn me_concurrence_values() {
        assert_eq!(me_concurrence(&lam([1.0, 0.0, 0.0, 0.0])), 1.0);
        assert_eq!(me_concurrence(&lam([0.5, 0.5, 0.0, 0.0])), 0.5);
        assert_eq!(me_concurrence(&lam([0.25; 4])), 0.0);
    }

    #[test]
    fn me_negativity_values() {
        assert_eq!(me_negativity(&lam([1.0, 0.0, 0.0, 0.0])), 1.0);
        assert_abs_diff_eq!(
            me_negativity(&lam([0.5, 0.5, 0.0, 0.0])),
            0.5f64.sqrt() - 0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            me_negativity(&lam([0.5, 0.5, 0.0, 0.0])),
            0.207_106_781_186_547_5,
            epsilon = 1e-15
        );
        assert_eq!(me_negativity(&lam([0.25; 4])), 0.0);
    }

    #[test]
    fn rank2_curve() {
        assert_eq!(max_gap_rank2(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            max_gap_rank2(2.0).unwrap(),
            1.0 - 0.5f64.sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            max_gap_rank2(1.5).unwrap(),
            0.183_503_419_072_273_8,
            epsilon = 1e-15
        );
        assert!(max_gap_rank2(2.1).is_err());
        assert!(max_gap_rank2(0.9).is_err());
    }

    #[test]
    fn rank3_curve() {
        assert_abs_diff_eq!(max_gap_rank3(3.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            max_gap_rank3(2.0).unwrap(),
            (3.0 - 4.5f64.sqrt()) / 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            max_gap_rank3(2.0).unwrap(),
            max_gap_rank2(2.0).unwrap(),
            epsilon = 1e-12
        );
        assert!(max_gap_rank3(1.9).is_err());
        assert!(max_gap_rank3(3.2).is_err());
    }

    /// Direct evaluation of the ME formulas on the branch spectrum must agree with
    /// the printed closed form.
    #[test]
    fn rank3_curve_matches_branch_spectrum() {
        for k in 0..=20 {
            let r = 2.0 + k as f64 / 20.0;
            let s = rank3_branch_spectrum(r).unwrap();
            assert_abs_diff_eq!(s.participation_ratio(), r, epsilon = 1e-12);
            let direct = me_concurrence(&s) - me_negativity(&s);
            assert_abs_diff_eq!(direct, max_gap_rank3(r).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn envelope_pieces() {
        assert_eq!(me_gap_envelope(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            me_gap_envelope(2.0).unwrap(),
            0.292_893_218_813_452_4,
            epsilon = 1e-15
        );
        assert_eq!(me_gap_envelope(3.5).unwrap(), 0.0);
        assert_eq!(me_gap_envelope(4.0).unwrap(), 0.0);
        assert!(me_gap_envelope(4.5).is_err());
        assert!(me_gap_envelope(1.0 - 1e-14).is_ok());
    }

    #[test]
    fn gap_vs_c() {
        let (g, s) = max_gap_vs_c(0.0).unwrap();
        assert_eq!(g, 0.0);
        assert_eq!(s.values(), &[1.0, 0.0, 0.0, 0.0]);
        let (g, s) = max_gap_vs_c(0.5).unwrap();
        assert_abs_diff_eq!(g, 1.0 - 0.5f64.sqrt(), epsilon = 1e-15);
        assert_eq!(s.values(), &[0.5, 0.5, 0.0, 0.0]);
        let (g, s) = max_gap_vs_c(1.0).unwrap();
        assert_eq!(g, 0.0);
        assert_eq!(s.values(), &[1.0, 0.0, 0.0, 0.0]);
        assert!(max_gap_vs_c(1.5).is_err());
    }

    #[test]
    fn gap_vs_c_matches_formulas_at_spectrum() {
        for k in 0..=50 {
            let c = k as f64 / 50.0;
            let (g, s) = max_gap_vs_c(c).unwrap();
            // the ME state of this spectrum has C = max(C, 1 - C); the gap is symmetric
            assert_abs_diff_eq!(me_concurrence(&s), c.max(1.0 - c), epsilon = 1e-12);
            assert_abs_diff_eq!(g, me_concurrence(&s) - me_negativity(&s), epsilon = 1e-12);
        }
    }
}
