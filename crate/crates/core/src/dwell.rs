//! Dwell-time bounds between consecutive services of one follower, and their
//! conversion to sample counts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DwellError {
    #[error("parameter `{0}` must be positive and finite")]
    NonPositive(&'static str),
    #[error("eta = {eta} must lie in [0, R = {r})")]
    Eta { eta: f64, r: f64 },
    #[error(
        "V_T = {vt} exceeds min(R_g / (2 λ_max(C)), (R − η) / λ_max(C)) = {bound}; \
         the leader could not guarantee both consensus inside R_g and an in-range service"
    )]
    ThresholdTooLarge { vt: f64, bound: f64 },
    #[error(
        "follower {follower}: minimum dwell {min:.4} s exceeds maximum dwell {max:.4} s, \
         so no service cadence satisfies both"
    )]
    Incomparable { follower: usize, min: f64, max: f64 },
    #[error("follower {follower}: sample period {ts} s is longer than the maximum dwell {max:.4} s")]
    CadenceTooCoarse { follower: usize, ts: f64, max: f64 },
}

/// Quantities shared by all followers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DwellParams {
    /// Largest singular value of the follower drift `A`.
    pub lambda_a: f64,
    /// Largest singular value of the follower output map `C`.
    pub lambda_c: f64,
    pub v_t: f64,
    pub ts: f64,
    pub r_g: f64,
    pub r: f64,
    pub eta: f64,
}

impl DwellParams {
    /// Upper bound on `V_T` that keeps every service in range and the
    /// feedback region reachable.
    pub fn threshold_bound(&self) -> f64 {
        (self.r_g / (2.0 * self.lambda_c)).min((self.r - self.eta) / self.lambda_c)
    }

    pub fn validate(&self) -> Result<(), DwellError> {
        for (name, v) in [
            ("lambda_max(A)", self.lambda_a),
            ("lambda_max(C)", self.lambda_c),
            ("V_T", self.v_t),
            ("T_s", self.ts),
            ("R_g", self.r_g),
            ("R", self.r),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(DwellError::NonPositive(name));
            }
        }
        if !(self.eta >= 0.0 && self.eta < self.r) {
            return Err(DwellError::Eta {
                eta: self.eta,
                r: self.r,
            });
        }
        let bound = self.threshold_bound();
        if self.v_t > bound {
            return Err(DwellError::ThresholdTooLarge { vt: self.v_t, bound });
        }
        Ok(())
    }
}

/// Longest gap between services that keeps `‖e1‖ <= V_T` under disturbances
/// bounded by `dbar`: `(1/λ) ln(λ V_T / d̄ + 1)`.
pub fn max_dwell(lambda_a: f64, v_t: f64, dbar: f64) -> f64 {
    (lambda_a * v_t / dbar + 1.0).ln() / lambda_a
}

/// Shortest gap after a service at goal error `e2_norm` that still makes the
/// goal error shrink across services: `(1/k) ln(‖e2‖ / (‖e2‖ − V_T))`, and
/// zero once `‖e2‖ <= V_T`.
pub fn min_dwell(k: f64, v_t: f64, e2_norm: f64) -> f64 {
    if e2_norm <= v_t {
        0.0
    } else {
        (e2_norm / (e2_norm - v_t)).ln() / k
    }
}

/// `n = ⌊max/T_s⌋` and `m = ⌊min/T_s⌋ + 1`, with `m = 0` when `min = 0`.
pub fn step_bounds(max_d: f64, min_d: f64, ts: f64) -> (usize, usize) {
    let n = (max_d / ts).floor() as usize;
    let m = if min_d == 0.0 {
        0
    } else {
        (min_d / ts).floor() as usize + 1
    };
    (n, m)
}

/// Envelope of `‖e1‖` after `t` seconds without service:
/// `(d̄/λ)(e^{λ t} − 1)`.
pub fn e1_envelope(lambda_a: f64, dbar: f64, t: f64) -> f64 {
    dbar / lambda_a * ((lambda_a * t).exp() - 1.0)
}

/// Per-follower dwell data at a service.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FollowerDwell {
    pub max_dwell: f64,
    pub min_dwell: f64,
    pub n: usize,
    pub m: usize,
}

/// Computes the bounds for follower `follower` (1-based, for messages) and
/// checks that the two conditions are compatible.
pub fn follower_dwell(
    p: &DwellParams,
    follower: usize,
    k: f64,
    dbar: f64,
    e2_norm: f64,
) -> Result<FollowerDwell, DwellError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(DwellError::NonPositive("k"));
    }
    if !(dbar > 0.0 && dbar.is_finite()) {
        return Err(DwellError::NonPositive("d_bar"));
    }
    let max = max_dwell(p.lambda_a, p.v_t, dbar);
    let min = min_dwell(k, p.v_t, e2_norm);
    if min > max {
        return Err(DwellError::Incomparable {
            follower,
            min,
            max,
        });
    }
    let (n, m) = step_bounds(max, min, p.ts);
    if n == 0 {
        return Err(DwellError::CadenceTooCoarse {
            follower,
            ts: p.ts,
            max,
        });
    }
    Ok(FollowerDwell {
        max_dwell: max,
        min_dwell: min,
        n,
        m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case_study() -> DwellParams {
        DwellParams {
            lambda_a: 1.0,
            lambda_c: 1.0,
            v_t: 1.0,
            ts: 0.5,
            r_g: 5.0,
            r: 5.0,
            eta: 4.0,
        }
    }

    #[test]
    fn max_dwell_examples() {
        assert!((max_dwell(1.0, 1.0, 0.04) - 26f64.ln()).abs() < 1e-12);
        assert!((max_dwell(1.0, 1.0, 0.04) - 3.2581).abs() < 1e-4);
        assert!((max_dwell(1.0, 1.0, 0.02) - 3.9318).abs() < 1e-4);
        assert!(max_dwell(1.0, 1.0, 1e12) < 1e-11);
    }

    #[test]
    fn min_dwell_examples() {
        let e = 800f64.sqrt();
        assert!((min_dwell(0.1, 1.0, e) - 10.0 * (e / (e - 1.0)).ln()).abs() < 1e-12);
        assert!((min_dwell(0.1, 1.0, e) - 0.35995).abs() < 1e-5);
        assert_eq!(min_dwell(0.1, 1.0, 1.0), 0.0);
        assert_eq!(min_dwell(0.1, 1.0, 0.3), 0.0);
        assert!(min_dwell(0.1, 1.0, 1e9) < 1e-7);
    }

    #[test]
    fn step_bound_examples() {
        assert_eq!(step_bounds(3.2581, 0.3603, 0.5), (6, 1));
        assert_eq!(step_bounds(3.2581, 0.0, 0.5).1, 0);
    }

    #[test]
    fn case_study_followers() {
        let p = case_study();
        p.validate().unwrap();
        let f1 = follower_dwell(&p, 1, 0.1, 0.04, 800f64.sqrt()).unwrap();
        assert_eq!((f1.n, f1.m), (6, 1));
        let f2 = follower_dwell(&p, 2, 0.15, 0.03, 1300f64.sqrt()).unwrap();
        assert_eq!((f2.n, f2.m), (7, 1));
        let f3 = follower_dwell(&p, 3, 0.2, 0.02, 3200f64.sqrt()).unwrap();
        assert_eq!((f3.n, f3.m), (7, 1));
    }

    #[test]
    fn threshold_bound_violation() {
        let p = DwellParams {
            v_t: 10.0,
            ..case_study()
        };
        assert_eq!(
            p.validate(),
            Err(DwellError::ThresholdTooLarge { vt: 10.0, bound: 1.0 })
        );
        let p = DwellParams {
            v_t: 3.0,
            eta: 0.0,
            ..case_study()
        };
        assert!(matches!(p.validate(), Err(DwellError::ThresholdTooLarge { .. })));
    }

    #[test]
    fn incomparable_bounds_rejected() {
        let p = case_study();
        assert!(matches!(
            follower_dwell(&p, 1, 0.1, 0.04, 1.05),
            Err(DwellError::Incomparable { .. })
        ));
    }

    #[test]
    fn envelope_at_max_dwell_reaches_threshold() {
        let t = max_dwell(1.0, 1.0, 0.04);
        assert!((e1_envelope(1.0, 0.04, t) - 1.0).abs() < 1e-12);
    }
}
