//! Continuously monitored noncyclic phase of a state precessing about the
//! polar axis.
//!
//! The noncyclic phase at precession angle `phi` is the argument of
//! `<psi(0)|psi(phi)> = cos(phi/2) + i cos(theta) sin(phi/2)`, continued in
//! `phi` from `phase(0) = 0`. Off the equator it has secular slope
//! `+-1/2` (sign of `cos(theta)`) plus a zero-mean, `2 pi`-periodic wiggle. On the
//! equator the overlap is real and vanishes at odd multiples of `pi`; there the
//! phase is undefined and the `pi` jump across it has no determinable sign.

use crate::branch::{continue_phases, Crossing};
use crate::error::{PhaseError, Result};
use crate::scalar::{wrap_to_pi, Real};
use crate::spinor::{pancharatnam_overlap, BlochDirection, Hemisphere, Spinor, Su2, DEFAULT_TOL_ORTH};

/// Window (radians of `phi`) used by [`build_curve`] to flag steep but
/// continuous phase changes.
pub const DEFAULT_JUMP_WINDOW: f64 = 0.2;

/// Flanking phases across an undefined run that differ by `pi` within this
/// tolerance mark a jump whose sign cannot be decided.
pub const SINGULAR_JUMP_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint<T> {
    pub phi: T,
    /// Branch-continued phase; `None` where the overlap vanishes.
    pub phase: Option<T>,
    pub visibility: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpSign {
    Positive,
    Negative,
    Unresolved,
}

impl JumpSign {
    fn of<T: Real>(x: T) -> Self {
        if x < T::zero() {
            JumpSign::Negative
        } else {
            JumpSign::Positive
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            JumpSign::Positive => "+",
            JumpSign::Negative => "-",
            JumpSign::Unresolved => "unresolved",
        }
    }
}

/// How a jump showed up in the sampled curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpKind {
    /// Across a run of samples with undefined phase.
    SingularGap,
    /// Steep but continuous change within the detection window.
    Steep,
    /// Adjacent defined samples more than `pi/2` apart (simulated data only).
    StepViolation,
}

impl JumpKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            JumpKind::SingularGap => "singular-gap",
            JumpKind::Steep => "steep",
            JumpKind::StepViolation => "step-violation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent<T> {
    pub phi_location: T,
    /// Size of the jump, nonnegative.
    pub magnitude: T,
    pub sign: JumpSign,
    pub resolvable: bool,
    pub kind: JumpKind,
}

impl<T: Real> JumpEvent<T> {
    /// `magnitude` with its sign, or `None` when the sign is unresolved.
    pub fn signed_magnitude(&self) -> Option<T> {
        match self.sign {
            JumpSign::Positive => Some(self.magnitude),
            JumpSign::Negative => Some(-self.magnitude),
            JumpSign::Unresolved => None,
        }
    }

    pub(crate) fn unresolved(phi_location: T, magnitude: T, kind: JumpKind) -> Self {
        Self {
            phi_location,
            magnitude,
            sign: JumpSign::Unresolved,
            resolvable: false,
            kind,
        }
    }

    pub(crate) fn resolved(phi_location: T, delta: T, kind: JumpKind) -> Self {
        Self {
            phi_location,
            magnitude: delta.abs(),
            sign: JumpSign::of(delta),
            resolvable: true,
            kind,
        }
    }
}

/// Sampled noncyclic-phase curve for one polar angle.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCurve<T> {
    pub theta: T,
    pub samples: Vec<PhasePoint<T>>,
    pub jumps: Vec<JumpEvent<T>>,
    pub tol_orth: T,
}

impl<T: Real> PhaseCurve<T> {
    pub fn phis(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.phi).collect()
    }

    pub fn phases(&self) -> Vec<Option<T>> {
        self.samples.iter().map(|s| s.phase).collect()
    }

    pub fn is_fully_defined(&self) -> bool {
        self.samples.iter().all(|s| s.phase.is_some())
    }

    /// Phase at the sample closest to `phi`.
    pub fn phase_near(&self, phi: T) -> Option<T> {
        self.samples
            .iter()
            .min_by(|a, b| (a.phi - phi).abs().partial_cmp(&(b.phi - phi).abs()).unwrap())
            .and_then(|s| s.phase)
    }
}

/// Uniform grid of `steps + 1` points covering `[phi_min, phi_max]`.
pub fn phi_grid<T: Real>(phi_min: T, phi_max: T, steps: usize) -> Result<Vec<T>> {
    if !phi_min.is_finite() || !phi_max.is_finite() {
        return Err(PhaseError::NonFinite("phi range"));
    }
    if steps == 0 {
        return Err(PhaseError::InvalidParameter("steps must be at least 1".into()));
    }
    if phi_max <= phi_min {
        return Err(PhaseError::InvalidParameter(format!(
            "phi_max ({phi_max}) must exceed phi_min ({phi_min})"
        )));
    }
    let n = T::from_usize(steps).unwrap();
    let span = phi_max - phi_min;
    Ok((0..=steps)
        .map(|i| {
            if i == steps {
                phi_max
            } else {
                phi_min + span * T::from_usize(i).unwrap() / n
            }
        })
        .collect())
}

/// `true` when `phi` is an odd multiple of `pi` within the angle tolerance.
pub fn is_odd_multiple_of_pi<T: Real>(phi: T) -> bool {
    let k = ((phi - T::PI()) / T::two_pi()).round();
    let nearest = (T::lit(2.0) * k + T::one()) * T::PI();
    (phi - nearest).abs() <= T::angle_tol() * phi.abs().max(T::one())
}

/// Continued argument of `cos(phi/2) + i c sin(phi/2)` for `c != 0`, anchored
/// at zero for `phi = 0`.
pub(crate) fn continued_overlap_arg<T: Real>(c: T, phi: T) -> T {
    let half = phi / T::lit(2.0);
    let turns = (half / T::PI()).round();
    let r = half - turns * T::PI();
    let sign = if c < T::zero() { -T::one() } else { T::one() };
    (c * r.sin()).atan2(r.cos()) + turns * T::PI() * sign
}

/// Closed-form noncyclic phase; `None` at the equatorial singular points.
///
/// Off the equator this is `arctan(cos(theta) tan(phi/2))` on `(-pi, pi)`,
/// advanced by `pi sgn(cos theta)` per full turn. On the equator it is the
/// principal value of `arg cos(phi/2)`, alternating between `0` and `pi`.
pub fn closed_form_phase<T: Real>(theta: T, phi: T) -> Option<T> {
    match Hemisphere::of(theta) {
        Hemisphere::Equator => {
            if is_odd_multiple_of_pi(phi) {
                None
            } else if (phi / T::lit(2.0)).cos() > T::zero() {
                Some(T::zero())
            } else {
                Some(T::PI())
            }
        }
        _ => Some(continued_overlap_arg(theta.cos(), phi)),
    }
}

/// `|cos(phi/2) + i cos(theta) sin(phi/2)|`.
pub fn closed_form_visibility<T: Real>(theta: T, phi: T) -> T {
    let (s, c) = (phi / T::lit(2.0)).sin_cos();
    let ct = theta.cos();
    (c * c + ct * ct * s * s).sqrt()
}

fn singular_gap<T: Real>(d: T) -> bool {
    (d.abs() - T::PI()).abs() < T::lit(SINGULAR_JUMP_TOL)
}

/// Noncyclic-phase curve from spinor evolution: each sample evolves the
/// initial state by `z_precession(phi)`, takes the Pancharatnam overlap with
/// the initial state and continues the principal phase on the nearest branch.
///
/// The first defined sample is placed on the branch nearest the secular line
/// (`0` on the equator). Steps of `pi/2` or more between adjacent defined
/// samples are rejected with [`PhaseError::StepSizeViolation`].
pub fn build_curve<T: Real>(theta: T, phi_min: T, phi_max: T, steps: usize, tol_orth: T) -> Result<PhaseCurve<T>> {
    if !(tol_orth >= T::zero()) {
        return Err(PhaseError::InvalidParameter("tol_orth must be nonnegative".into()));
    }
    let initial = Spinor::from_bloch(BlochDirection::polar(theta)?);
    let phis = phi_grid(phi_min, phi_max, steps)?;
    let overlaps: Vec<_> = phis
        .iter()
        .map(|&phi| pancharatnam_overlap(&initial, &Su2::z_precession(phi).apply(&initial), tol_orth))
        .collect();
    let principal: Vec<Option<T>> = overlaps.iter().map(|o| o.phase).collect();
    let slope = Hemisphere::of(theta).sign::<T>();
    // Steps straddling a singular point are the discontinuity itself; any
    // other oversized step means the grid is too coarse.
    let locus = singularity_locus(theta, phis[0], phis[phis.len() - 1]);
    let cont = continue_phases(&phis, &principal, slope, |_, _, d| singular_gap(d), false)?;
    for &(i, j, crossing) in &cont.crossings {
        if crossing == Crossing::Violation && straddled(&locus, phis[i], phis[j]).is_none() {
            let d = wrap_to_pi(principal[j].unwrap() - principal[i].unwrap());
            return Err(PhaseError::StepSizeViolation {
                phi_from: phis[i].to_f64().unwrap_or(f64::NAN),
                phi_to: phis[j].to_f64().unwrap_or(f64::NAN),
                delta: d.to_f64().unwrap_or(f64::NAN),
            });
        }
    }

    let samples = phis
        .iter()
        .zip(&overlaps)
        .zip(cont.phases)
        .map(|((&phi, o), phase)| PhasePoint {
            phi,
            phase,
            visibility: o.visibility,
        })
        .collect();
    let mut curve = PhaseCurve {
        theta,
        samples,
        jumps: Vec::new(),
        tol_orth,
    };
    curve.jumps = detect_jumps(&curve, T::lit(DEFAULT_JUMP_WINDOW));
    Ok(curve)
}

/// [`build_curve`] with the default orthogonality threshold.
pub fn build_curve_default<T: Real>(theta: T, phi_min: T, phi_max: T, steps: usize) -> Result<PhaseCurve<T>> {
    build_curve(theta, phi_min, phi_max, steps, T::lit(DEFAULT_TOL_ORTH))
}

/// Finds jumps in a built curve.
///
/// Across each run of undefined samples, a wrapped change above `pi/2` is a
/// jump; when the flanks differ by `pi` (within [`SINGULAR_JUMP_TOL`]) its sign
/// is unresolvable. Adjacent samples on either side of a singular point are
/// treated the same way. Within runs of defined samples, a change above `pi/2`
/// inside any `window`-wide span is a steep (resolved) jump.
pub fn detect_jumps<T: Real>(curve: &PhaseCurve<T>, window: T) -> Vec<JumpEvent<T>> {
    let phis = curve.phis();
    let phases = curve.phases();
    let mut events = gap_events(&phis, &phases, |_, _, d| singular_gap(d));
    let mut breaks = Vec::new();
    if let (Some(&lo), Some(&hi)) = (phis.first(), phis.last()) {
        let locus = singularity_locus(curve.theta, lo, hi);
        for j in 1..phases.len() {
            let (Some(a), Some(b)) = (phases[j - 1], phases[j]) else {
                continue;
            };
            if let Some(at) = straddled(&locus, phis[j - 1], phis[j]) {
                breaks.push(j);
                let d = wrap_to_pi(b - a).abs();
                if d > T::FRAC_PI_2() {
                    events.push(JumpEvent::unresolved(at, d, JumpKind::SingularGap));
                }
            }
        }
    }
    events.extend(steep_events(&phis, &phases, window, &breaks));
    events.sort_by(|a, b| a.phi_location.partial_cmp(&b.phi_location).unwrap());
    events
}

/// Jump events across runs of `None` phases.
pub(crate) fn gap_events<T, F>(phis: &[T], phases: &[Option<T>], mut ambiguous: F) -> Vec<JumpEvent<T>>
where
    T: Real,
    F: FnMut(usize, usize, T) -> bool,
{
    let mut events = Vec::new();
    let mut prev: Option<(usize, T)> = None;
    for (j, p) in phases.iter().enumerate() {
        let Some(p) = *p else { continue };
        if let Some((i, last)) = prev {
            if j > i + 1 {
                let raw = p - last;
                let d = wrap_to_pi(raw);
                if d.abs() > T::FRAC_PI_2() {
                    let at = (phis[i] + phis[j]) / T::lit(2.0);
                    events.push(if ambiguous(i, j, d) {
                        JumpEvent::unresolved(at, d.abs(), JumpKind::SingularGap)
                    } else {
                        JumpEvent::resolved(at, raw, JumpKind::SingularGap)
                    });
                }
            }
        }
        prev = Some((j, p));
    }
    events
}

/// Steep-change events inside runs of consecutive defined samples. `breaks`
/// lists extra indices where a new run starts (re-anchored samples).
pub(crate) fn steep_events<T: Real>(
    phis: &[T],
    phases: &[Option<T>],
    window: T,
    breaks: &[usize],
) -> Vec<JumpEvent<T>> {
    let mut events = Vec::new();
    let n = phases.len();
    let mut start = 0;
    while start < n {
        if phases[start].is_none() {
            start += 1;
            continue;
        }
        let mut end = start;
        while end + 1 < n && phases[end + 1].is_some() && !breaks.contains(&(end + 1)) {
            end += 1;
        }
        let run: Vec<T> = phases[start..=end].iter().map(|p| p.unwrap()).collect();
        events.extend(steep_events_in_run(&phis[start..=end], &run, window));
        start = end + 1;
    }
    events
}

fn steep_events_in_run<T: Real>(phis: &[T], phases: &[T], window: T) -> Vec<JumpEvent<T>> {
    let n = phases.len();
    let mut events = Vec::new();
    if n < 2 {
        return events;
    }
    let threshold = T::FRAC_PI_2();
    // (first index, last index, sign of change)
    let mut cluster: Option<(usize, usize, bool)> = None;
    let mut j = 1;
    let close = |c: (usize, usize, bool), events: &mut Vec<JumpEvent<T>>| {
        let (a, b, _) = c;
        let steepest = (a..b)
            .max_by(|&k, &m| {
                let dk = (phases[k + 1] - phases[k]).abs();
                let dm = (phases[m + 1] - phases[m]).abs();
                dk.partial_cmp(&dm).unwrap()
            })
            .unwrap_or(a);
        let at = (phis[steepest] + phis[steepest + 1]) / T::lit(2.0);
        events.push(JumpEvent::resolved(at, phases[b] - phases[a], JumpKind::Steep));
    };
    for i in 0..n - 1 {
        if j <= i {
            j = i + 1;
        }
        while j + 1 < n && phis[j + 1] - phis[i] <= window {
            j += 1;
        }
        let delta = phases[j] - phases[i];
        if delta.abs() > threshold {
            let rising = delta > T::zero();
            cluster = match cluster {
                Some((a, b, s)) if s == rising && i <= b => Some((a, b.max(j), s)),
                Some(c) => {
                    close(c, &mut events);
                    Some((i, j, rising))
                }
                None => Some((i, j, rising)),
            };
        } else if let Some(c) = cluster {
            if i > c.1 {
                close(c, &mut events);
                cluster = None;
            }
        }
    }
    if let Some(c) = cluster {
        close(c, &mut events);
    }
    events
}

/// Precession angles in `[phi_min, phi_max]` where the overlap vanishes:
/// odd multiples of `pi` for an equatorial state, none otherwise.
pub fn singularity_locus<T: Real>(theta: T, phi_min: T, phi_max: T) -> Vec<T> {
    if Hemisphere::of(theta) != Hemisphere::Equator || !(phi_max >= phi_min) {
        return Vec::new();
    }
    let tau = T::two_pi();
    let slack = T::angle_tol();
    let k_lo = ((phi_min - T::PI()) / tau - slack).ceil();
    let k_hi = ((phi_max - T::PI()) / tau + slack).floor();
    let mut out = Vec::new();
    let mut k = k_lo;
    while k <= k_hi {
        out.push((T::lit(2.0) * k + T::one()) * T::PI());
        k = k + T::one();
    }
    out
}

/// Singular point strictly between `a` and `b`, if any.
fn straddled<T: Real>(locus: &[T], a: T, b: T) -> Option<T> {
    locus.iter().copied().find(|&l| l > a && l < b)
}

/// Split of an off-equator curve into its secular line and the residual wiggle.
#[derive(Debug, Clone, PartialEq)]
pub struct SecularDecomposition<T> {
    /// `sgn(cos theta) / 2`.
    pub secular_slope: T,
    /// `(phi, phase(phi) - secular_slope * phi)`.
    pub wiggle: Vec<(T, T)>,
    /// Trapezoidal mean of the wiggle over each `2 pi` period.
    pub period_means: Vec<T>,
}

impl<T: Real> SecularDecomposition<T> {
    pub fn max_abs_wiggle(&self) -> T {
        self.wiggle.iter().fold(T::zero(), |m, &(_, w)| m.max(w.abs()))
    }
}

/// Secular slope and wiggle of a fully defined, off-equator curve spanning a
/// whole number of `2 pi` periods with grid points on the period boundaries.
pub fn secular_wiggle_decomposition<T: Real>(curve: &PhaseCurve<T>) -> Result<SecularDecomposition<T>> {
    let hemisphere = Hemisphere::of(curve.theta);
    if hemisphere == Hemisphere::Equator {
        return Err(PhaseError::Equatorial);
    }
    if !curve.is_fully_defined() {
        return Err(PhaseError::UndefinedSamples);
    }
    let n = curve.samples.len();
    if n < 2 {
        return Err(PhaseError::InvalidParameter("curve needs at least two samples".into()));
    }
    let span = curve.samples[n - 1].phi - curve.samples[0].phi;
    let periods_f = span / T::two_pi();
    let periods = periods_f.round();
    if periods < T::one() || (periods_f - periods).abs() > T::lit(1e-9).max(T::angle_tol()) {
        return Err(PhaseError::NotWholePeriods {
            span: span.to_f64().unwrap_or(f64::NAN),
        });
    }
    let periods = periods.to_usize().unwrap();
    let intervals = n - 1;
    if !intervals.is_multiple_of(periods) {
        return Err(PhaseError::InvalidParameter(
            "phi grid does not place a sample on every 2 pi period boundary".into(),
        ));
    }

    let secular_slope = hemisphere.sign::<T>() / T::lit(2.0);
    let wiggle: Vec<(T, T)> = curve
        .samples
        .iter()
        .map(|s| (s.phi, s.phase.unwrap() - secular_slope * s.phi))
        .collect();

    let per = intervals / periods;
    let period_means = (0..periods)
        .map(|p| {
            let seg = &wiggle[p * per..=(p + 1) * per];
            let area = seg.windows(2).fold(T::zero(), |acc, w| {
                acc + (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / T::lit(2.0)
            });
            area / (seg[per].0 - seg[0].0)
        })
        .collect();
    Ok(SecularDecomposition {
        secular_slope,
        wiggle,
        period_means,
    })
}

/// Polar angle of the pole in the hemisphere opposite to `theta`.
pub fn reference_pole<T: Real>(theta: T) -> Result<T> {
    match Hemisphere::of(theta) {
        Hemisphere::Upper => Ok(T::PI()),
        Hemisphere::Lower => Ok(T::zero()),
        Hemisphere::Equator => Err(PhaseError::Equatorial),
    }
}

/// Phase of `theta` minus the linear phase of the opposite-hemisphere pole.
pub fn measured_difference<T: Real>(theta: T, phi: T) -> Result<T> {
    BlochDirection::polar(theta)?;
    let pole = reference_pole(theta)?;
    let own = closed_form_phase(theta, phi).ok_or(PhaseError::Equatorial)?;
    let reference = closed_form_phase(pole, phi).ok_or(PhaseError::Equatorial)?;
    Ok(own - reference)
}

/// The difference observable sampled on a uniform grid. Visibilities are those
/// of the `theta` state (the pole overlap has unit modulus).
pub fn measured_difference_curve<T: Real>(theta: T, phi_min: T, phi_max: T, steps: usize) -> Result<PhaseCurve<T>> {
    BlochDirection::polar(theta)?;
    reference_pole(theta)?;
    let tol_orth = T::lit(DEFAULT_TOL_ORTH);
    let samples = phi_grid(phi_min, phi_max, steps)?
        .into_iter()
        .map(|phi| {
            let visibility = closed_form_visibility(theta, phi);
            let phase = if visibility < tol_orth {
                None
            } else {
                measured_difference(theta, phi).ok()
            };
            PhasePoint { phi, phase, visibility }
        })
        .collect();
    let mut curve = PhaseCurve {
        theta,
        samples,
        jumps: Vec::new(),
        tol_orth,
    };
    curve.jumps = detect_jumps(&curve, T::lit(DEFAULT_JUMP_WINDOW));
    Ok(curve)
}

/// Angle by which precession about the polar axis carries a state along its
/// parallel of latitude. For polar-axis precession this is `phi` itself.
pub fn rotation_angle_on_sphere<T: Real>(_theta: T, phi: T) -> T {
    phi
}
