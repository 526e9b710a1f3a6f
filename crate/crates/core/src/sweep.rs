//! Bisection sweep for the critical parameter of the three-well family
//! `W_eps = |(1 - z^2)(z - i*eps)|^2`: below the threshold the minimizing
//! geodesic between the outer wells passes through the middle well
//! (degenerate triangle inequality), above it the direct connection exists.
//!
//! The bisection predicate is the STRICT/DEGENERATE classification of the
//! outer pair — the slack signal is smoother in `eps` near the transition
//! than the well-passage distance, which is recorded as a cross-check column.

use serde::Serialize;

use crate::error::Error;
use crate::geodesic::SolveOptions;
use crate::metric::{distance_matrix, obstruction_report, PairClass};
use crate::potential::Potential;
use crate::Result;

/// Outer wells of the family are indices 0 and 1; the movable middle well is
/// index 2.
const OUTER: (usize, usize) = (0, 1);
const MIDDLE: usize = 2;

#[derive(Debug, Clone, Serialize)]
pub struct SweepOptions {
    /// Bisection stops when the bracket is narrower than this.
    pub bisection_tol: f64,
    /// Classification tolerance, relative to the largest matrix entry.
    pub slack_tol_rel: f64,
    pub solve: SolveOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            bisection_tol: 0.02,
            slack_tol_rel: 5e-3,
            solve: SolveOptions::default(),
        }
    }
}

/// One evaluated parameter value.
#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub eps: f64,
    pub classification: PairClass,
    /// `min_l d(0,l) + d(l,1) - d(0,1)`.
    pub min_slack: f64,
    pub direct_distance: f64,
    pub via_distance: f64,
    /// Closest approach of the direct-pair geodesic to the middle well
    /// (cross-check signal).
    pub min_dist_to_intermediate: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub lo: f64,
    pub hi: f64,
    /// Estimated critical parameter, when the range brackets a transition.
    pub transition: Option<f64>,
    pub evaluations: Vec<SweepPoint>,
    pub message: String,
}

fn evaluate(eps: f64, opts: &SweepOptions) -> Result<SweepPoint> {
    let pot = Potential::alikakos_fusco(eps);
    let dm = distance_matrix(&pot, &opts.solve)?;
    let tol = (opts.slack_tol_rel * dm.max_entry()).max(1e-12);
    let report = obstruction_report(&dm, tol)?;
    let pair = report
        .pairs
        .iter()
        .find(|p| p.j == OUTER.0 && p.k == OUTER.1)
        .ok_or_else(|| Error::Internal("outer pair missing from report".into()))?;
    let direct = dm.get(OUTER.0, OUTER.1);
    let via = dm.get(OUTER.0, MIDDLE) + dm.get(MIDDLE, OUTER.1);
    let min_dist = dm
        .pair(OUTER.0, OUTER.1)
        .and_then(|p| p.result.as_ref())
        .map(|r| {
            r.well_proximity
                .iter()
                .find(|w| w.well_index == MIDDLE)
                .map(|w| w.distance)
                .unwrap_or(f64::NAN)
        })
        .unwrap_or(f64::NAN);
    Ok(SweepPoint {
        eps,
        classification: pair.class,
        min_slack: pair.min_slack.unwrap_or(f64::NAN),
        direct_distance: direct,
        via_distance: via,
        min_dist_to_intermediate: min_dist,
        tol,
    })
}

fn is_strict(point: &SweepPoint) -> bool {
    point.classification == PairClass::Strict
}

/// Bisects on `eps in [lo, hi]` using the obstruction classification of the
/// outer pair as the predicate. A degenerate range (`lo == hi`) yields a
/// single classification and no transition estimate.
pub fn sweep_alikakos_fusco(lo: f64, hi: f64, opts: &SweepOptions) -> Result<SweepResult> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::InvalidArgument(format!(
            "invalid sweep range [{lo}, {hi}]"
        )));
    }
    if !(opts.bisection_tol > 0.0) || !(opts.slack_tol_rel > 0.0) {
        return Err(Error::InvalidArgument(
            "sweep tolerances must be positive".into(),
        ));
    }
    let mut evaluations = Vec::new();

    if lo == hi {
        let point = evaluate(lo, opts)?;
        let message = format!(
            "degenerate range: eps = {lo} classified {:?}",
            point.classification
        );
        evaluations.push(point);
        return Ok(SweepResult {
            lo,
            hi,
            transition: None,
            evaluations,
            message,
        });
    }

    let p_lo = evaluate(lo, opts)?;
    let p_hi = evaluate(hi, opts)?;
    let strict_lo = is_strict(&p_lo);
    let strict_hi = is_strict(&p_hi);
    evaluations.push(p_lo);
    evaluations.push(p_hi);
    if strict_lo == strict_hi {
        let kind = if strict_lo { "STRICT" } else { "DEGENERATE" };
        return Ok(SweepResult {
            lo,
            hi,
            transition: None,
            evaluations,
            message: format!("no transition in range: both endpoints classified {kind}"),
        });
    }

    let (mut a, mut b) = (lo, hi);
    let mut strict_b = strict_hi;
    while b - a > opts.bisection_tol {
        let mid = 0.5 * (a + b);
        let point = evaluate(mid, opts)?;
        let strict_mid = is_strict(&point);
        evaluations.push(point);
        if strict_mid == strict_b {
            b = mid;
        } else {
            a = mid;
        }
        let _ = &mut strict_b; // strictness of b is preserved by the update
    }
    let transition = 0.5 * (a + b);
    Ok(SweepResult {
        lo,
        hi,
        transition: Some(transition),
        evaluations,
        message: format!("transition bracketed in [{a}, {b}]"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cheap_solve() -> SolveOptions {
        SolveOptions {
            node_count: 96,
            max_iterations: 10_000,
            bump_restarts: 3,
            ..SolveOptions::default()
        }
    }

    #[test]
    fn classification_flips_across_the_threshold() {
        let opts = SweepOptions {
            solve: cheap_solve(),
            ..SweepOptions::default()
        };
        let low = evaluate(0.3, &opts).unwrap();
        assert_eq!(low.classification, PairClass::Degenerate, "{low:?}");
        let high = evaluate(0.9, &opts).unwrap();
        assert_eq!(high.classification, PairClass::Strict, "{high:?}");
        // the cross-check signal agrees: the low geodesic threads the well
        assert!(low.min_dist_to_intermediate < 0.05, "{low:?}");
        assert!(high.min_dist_to_intermediate > 0.05, "{high:?}");
    }

    #[test]
    fn degenerate_range_reports_single_classification() {
        let opts = SweepOptions {
            solve: cheap_solve(),
            ..SweepOptions::default()
        };
        let r = sweep_alikakos_fusco(0.9, 0.9, &opts).unwrap();
        assert!(r.transition.is_none());
        assert_eq!(r.evaluations.len(), 1);
        assert!(r.message.contains("degenerate range"));
    }

    #[test]
    fn all_strict_range_reports_no_transition() {
        let opts = SweepOptions {
            solve: cheap_solve(),
            ..SweepOptions::default()
        };
        let r = sweep_alikakos_fusco(0.8, 0.9, &opts).unwrap();
        assert!(r.transition.is_none());
        assert!(r.message.contains("no transition"));
    }
}
