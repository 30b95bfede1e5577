//! Nearest-branch continuation of sampled principal phases.
//!
//! Consecutive defined samples are joined by the wrapped difference as long as
//! it stays below `pi/2`. Larger steps are never guessed: they are either an
//! error (analytic pipelines) or a recorded break (simulated data). Runs of
//! undefined samples are crossed by the wrapped difference unless the caller's
//! rule declares the crossing ambiguous, in which case the curve is re-anchored.

use crate::error::{PhaseError, Result};
use crate::scalar::{wrap_to_pi, Real};

/// Places `principal` on the `2 pi` branch nearest the secular line
/// `slope_sign * phi / 2`. A zero `slope_sign` (equator, unpolarized beam)
/// keeps the principal value.
pub fn secular_branch<T: Real>(principal: T, phi: T, slope_sign: T) -> T {
    if slope_sign == T::zero() {
        return principal;
    }
    let target = slope_sign * phi / T::lit(2.0);
    let tau = T::two_pi();
    principal + tau * ((target - principal) / tau).round()
}

/// What happened between the previous defined sample and this one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Crossing {
    /// Undefined run crossed by the nearest-branch difference.
    GapResolved,
    /// Undefined run whose sign could not be decided; curve re-anchored.
    GapAmbiguous,
    /// Adjacent samples more than `pi/2` apart; curve re-anchored.
    Violation,
}

#[derive(Debug, Clone)]
pub(crate) struct Continuation<T> {
    pub phases: Vec<Option<T>>,
    /// `(previous defined index, index, crossing)` for every crossing that was
    /// not an ordinary small step.
    pub crossings: Vec<(usize, usize, Crossing)>,
}

/// Continues `principal` along `phis`.
///
/// `ambiguous_gap(prev, next, wrapped_delta)` decides whether a jump larger than
/// `pi/2` across an undefined run has an undeterminable sign. With `strict`,
/// a step-size violation between adjacent samples is an error; otherwise it
/// is recorded and the curve is re-anchored.
pub(crate) fn continue_phases<T, F>(
    phis: &[T],
    principal: &[Option<T>],
    slope_sign: T,
    mut ambiguous_gap: F,
    strict: bool,
) -> Result<Continuation<T>>
where
    T: Real,
    F: FnMut(usize, usize, T) -> bool,
{
    debug_assert_eq!(phis.len(), principal.len());
    let half_pi = T::FRAC_PI_2();
    let mut phases = vec![None; principal.len()];
    let mut crossings = Vec::new();
    let mut prev: Option<(usize, T)> = None;

    for (j, p) in principal.iter().enumerate() {
        let Some(p) = *p else { continue };
        let value = match prev {
            None => secular_branch(p, phis[j], slope_sign),
            Some((i, last)) => {
                let d = wrap_to_pi(p - last);
                if j == i + 1 {
                    if d.abs() < half_pi {
                        last + d
                    } else if strict {
                        return Err(PhaseError::StepSizeViolation {
                            phi_from: phis[i].to_f64().unwrap_or(f64::NAN),
                            phi_to: phis[j].to_f64().unwrap_or(f64::NAN),
                            delta: d.to_f64().unwrap_or(f64::NAN),
                        });
                    } else {
                        crossings.push((i, j, Crossing::Violation));
                        secular_branch(p, phis[j], slope_sign)
                    }
                } else if d.abs() > half_pi && ambiguous_gap(i, j, d) {
                    crossings.push((i, j, Crossing::GapAmbiguous));
                    secular_branch(p, phis[j], slope_sign)
                } else {
                    crossings.push((i, j, Crossing::GapResolved));
                    last + d
                }
            }
        };
        phases[j] = Some(value);
        prev = Some((j, value));
    }
    Ok(Continuation { phases, crossings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn secular_branch_picks_nearest_turn() {
        assert!((secular_branch(0.1, 4.0 * PI, 1.0) - (0.1 + 2.0 * PI)).abs() < 1e-12);
        assert!((secular_branch(-0.1, 4.0 * PI, -1.0) - (-0.1 - 2.0 * PI)).abs() < 1e-12);
        assert_eq!(secular_branch(3.0, 100.0, 0.0), 3.0);
    }

    #[test]
    fn unwraps_linear_ramp() {
        let phis: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let principal: Vec<Option<f64>> = phis.iter().map(|&p| Some(wrap_to_pi(0.5 * p))).collect();
        let c = continue_phases(&phis, &principal, 1.0, |_, _, _| true, true).unwrap();
        for (phi, v) in phis.iter().zip(&c.phases) {
            assert!((v.unwrap() - 0.5 * phi).abs() < 1e-12);
        }
        assert!(c.crossings.is_empty());
    }

    #[test]
    fn strict_mode_refuses_large_steps() {
        let phis = [0.0, 0.1, 0.2];
        let principal = [Some(0.0), Some(0.1), Some(2.0)];
        let err = continue_phases(&phis, &principal, 1.0, |_, _, _| true, true).unwrap_err();
        assert!(matches!(err, PhaseError::StepSizeViolation { .. }));
        let c = continue_phases(&phis, &principal, 0.0, |_, _, _| true, false).unwrap();
        assert_eq!(c.crossings, vec![(1, 2, Crossing::Violation)]);
    }

    #[test]
    fn gap_rule_decides_reanchoring() {
        let phis = [0.0, 1.0, 2.0];
        let principal = [Some(0.0), None, Some(PI)];
        let c = continue_phases(&phis, &principal, 0.0, |_, _, _| true, true).unwrap();
        assert_eq!(c.phases[2], Some(PI));
        assert_eq!(c.crossings[0].2, Crossing::GapAmbiguous);

        let principal = [Some(0.0), None, Some(-2.5)];
        let c = continue_phases(&phis, &principal, 0.0, |_, _, _| false, true).unwrap();
        assert_eq!(c.phases[2], Some(-2.5));
        assert_eq!(c.crossings[0].2, Crossing::GapResolved);
    }
}
