//! Simulated two-path interference of a spinor beam with its evolved copy.
//!
//! An auxiliary phase shifter `chi` scans the fringe. With overlap
//! `V e^{i Phi}`, each setting records counts with mean
//! `mean_count * (1 + V cos(chi - Phi)) / 2`. Counts are Poisson draws made by
//! inverse transform from a ChaCha8 stream keyed by `(seed, stream)`, so any
//! task can be reproduced on its own. The fit uses the first-harmonic
//! quadrature sums over the uniform `chi` grid.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{DiscreteCDF, Poisson};

use crate::branch::{continue_phases, Crossing};
use crate::curve::{gap_events, reference_pole, steep_events, JumpEvent, JumpKind, DEFAULT_JUMP_WINDOW};
use crate::error::{PhaseError, Result};
use crate::mixed::{DensityMatrix, MixedState};
use crate::scalar::{wrap_to_pi, Real};
use crate::spinor::{principal_arg, BlochDirection, Hemisphere, Spinor, Su2};

/// Fewest phase-shifter settings accepted.
pub const MIN_SETTINGS: usize = 8;

/// Default number of standard errors below which a fitted visibility is
/// indistinguishable from zero.
pub const DEFAULT_K_SIGMA: f64 = 3.0;

/// Beam entering the interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamState<T> {
    Pure(Spinor<T>),
    Mixed(DensityMatrix<T>),
}

impl<T: Real> BeamState<T> {
    /// Overlap whose modulus and argument set the fringe contrast and phase.
    pub fn overlap(&self, u: &Su2<T>) -> Complex<T> {
        match self {
            BeamState::Pure(s) => s.inner(&u.apply(s)),
            BeamState::Mixed(rho) => rho.trace_with(u),
        }
    }

    /// Beam at polar angle `theta` (zero azimuth) with polarization degree `p`.
    pub fn polar(theta: T, p: T) -> Result<Self> {
        let direction = BlochDirection::polar(theta)?;
        if p == T::one() {
            Ok(BeamState::Pure(Spinor::from_bloch(direction)))
        } else {
            Ok(BeamState::Mixed(DensityMatrix::from_mixed(&MixedState::new(
                direction, p,
            )?)))
        }
    }
}

impl<T> From<Spinor<T>> for BeamState<T> {
    fn from(s: Spinor<T>) -> Self {
        BeamState::Pure(s)
    }
}

impl<T> From<DensityMatrix<T>> for BeamState<T> {
    fn from(rho: DensityMatrix<T>) -> Self {
        BeamState::Mixed(rho)
    }
}

/// Simulated fringe record.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferogram<T> {
    pub chi_values: Vec<T>,
    pub expected_rates: Vec<T>,
    /// Poisson counts; `None` for a noiseless record.
    pub counts: Option<Vec<u64>>,
    pub mean_count: T,
    pub seed: Option<u64>,
    pub stream: u64,
    /// Generating contrast and phase.
    pub visibility: T,
    pub phase: T,
}

/// Generator for task `stream` of run `seed`.
pub fn task_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Smallest `k` with `P(X <= k) >= u` for `X ~ Poisson(mean)`.
pub fn poisson_inverse_transform(mean: f64, u: f64) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive Poisson mean");
    dist.inverse_cdf(u.clamp(0.0, 1.0))
}

/// Draws one Poisson count per rate.
pub fn sample_counts<T: Real, R: Rng>(rates: &[T], rng: &mut R) -> Vec<u64> {
    rates
        .iter()
        .map(|r| {
            let u: f64 = rng.random();
            poisson_inverse_transform(r.to_f64().unwrap_or(0.0), u)
        })
        .collect()
}

/// Fringe with given contrast and phase, optionally with Poisson noise.
pub fn synthesize_fringe<T: Real>(
    visibility: T,
    phase: T,
    chi_count: usize,
    mean_count: T,
    seed: Option<u64>,
    stream: u64,
) -> Result<Interferogram<T>> {
    if chi_count < MIN_SETTINGS {
        return Err(PhaseError::TooFewSettings {
            min: MIN_SETTINGS,
            got: chi_count,
        });
    }
    if !(mean_count > T::zero()) || !mean_count.is_finite() {
        return Err(PhaseError::NonPositiveMeanCount(
            mean_count.to_f64().unwrap_or(f64::NAN),
        ));
    }
    let n = T::from_usize(chi_count).unwrap();
    let half = T::lit(0.5);
    let chi_values: Vec<T> = (0..chi_count)
        .map(|j| T::two_pi() * T::from_usize(j).unwrap() / n)
        .collect();
    let expected_rates: Vec<T> = chi_values
        .iter()
        .map(|&chi| (mean_count * half * (T::one() + visibility * (chi - phase).cos())).max(T::zero()))
        .collect();
    let counts = seed.map(|s| sample_counts(&expected_rates, &mut task_rng(s, stream)));
    Ok(Interferogram {
        chi_values,
        expected_rates,
        counts,
        mean_count,
        seed,
        stream,
        visibility,
        phase,
    })
}

/// Fringe produced by `state` against its copy evolved by `u`. `seed = None`
/// gives the noiseless record.
pub fn synthesize<T: Real>(
    state: impl Into<BeamState<T>>,
    u: &Su2<T>,
    chi_count: usize,
    mean_count: T,
    seed: Option<u64>,
) -> Result<Interferogram<T>> {
    synthesize_stream(&state.into(), u, chi_count, mean_count, seed, 0)
}

/// [`synthesize`] drawing from an explicit task stream.
pub fn synthesize_stream<T: Real>(
    state: &BeamState<T>,
    u: &Su2<T>,
    chi_count: usize,
    mean_count: T,
    seed: Option<u64>,
    stream: u64,
) -> Result<Interferogram<T>> {
    let overlap = state.overlap(u);
    let visibility = overlap.norm();
    let phase = if visibility > T::zero() {
        principal_arg(overlap)
    } else {
        T::zero()
    };
    synthesize_fringe(visibility, phase, chi_count, mean_count, seed, stream)
}

/// Estimated fringe parameters with Poisson-propagated standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit<T> {
    /// In `(-pi, pi]`.
    pub phase_hat: T,
    pub visibility_hat: T,
    pub phase_stderr: T,
    pub visibility_stderr: T,
    /// Visibility indistinguishable from zero at `k_sigma` standard errors.
    pub singular: bool,
    /// Estimated mean count (twice the average count per setting).
    pub mean_count_hat: T,
}

/// [`fit_fringe_with`] at the default `k_sigma`.
pub fn fit_fringe<T: Real>(data: &Interferogram<T>) -> Result<FringeFit<T>> {
    fit_fringe_with(data, T::lit(DEFAULT_K_SIGMA))
}

/// First-harmonic fit of a fringe sampled on a uniform `chi` grid.
///
/// Uses counts when present, otherwise the expected rates. Standard errors
/// treat each setting as Poisson with variance equal to its recorded value;
/// for a noiseless record this is the error a counting experiment at the same
/// mean would have. The phase error is capped at `pi / sqrt(3)`, the spread of
/// a uniformly distributed angle.
pub fn fit_fringe_with<T: Real>(data: &Interferogram<T>, k_sigma: T) -> Result<FringeFit<T>> {
    let n = data.chi_values.len();
    if n < MIN_SETTINGS {
        return Err(PhaseError::TooFewSettings {
            min: MIN_SETTINGS,
            got: n,
        });
    }
    let y: Vec<T> = match &data.counts {
        Some(c) => {
            if c.len() != n {
                return Err(PhaseError::InvalidParameter(
                    "counts and chi grid lengths differ".into(),
                ));
            }
            c.iter().map(|&k| T::from_u64(k).unwrap()).collect()
        }
        None => data.expected_rates.clone(),
    };
    if y.len() != n {
        return Err(PhaseError::InvalidParameter("rates and chi grid lengths differ".into()));
    }

    let nf = T::from_usize(n).unwrap();
    let two = T::lit(2.0);
    let (mut sum, mut sc, mut ss) = (T::zero(), T::zero(), T::zero());
    let (mut wcc, mut wss, mut wcs) = (T::zero(), T::zero(), T::zero());
    for (&chi, &v) in data.chi_values.iter().zip(&y) {
        let (s, c) = chi.sin_cos();
        sum = sum + v;
        sc = sc + v * c;
        ss = ss + v * s;
        wcc = wcc + v * c * c;
        wss = wss + v * s * s;
        wcs = wcs + v * c * s;
    }
    let a0 = sum / nf;
    if !(a0 > T::zero()) {
        return Err(PhaseError::InvalidParameter("fringe has no counts".into()));
    }
    let cq = two * sc / nf;
    let sq = two * ss / nf;
    let n2 = nf * nf;
    let var_cc = T::lit(4.0) * wcc / n2;
    let var_ss = T::lit(4.0) * wss / n2;
    let cov_cs = T::lit(4.0) * wcs / n2;
    let var_aa = sum / n2;
    let cov_ac = two * sc / n2;
    let cov_as = two * ss / n2;

    let r2 = cq * cq + sq * sq;
    let r = r2.sqrt();
    let visibility_hat = r / a0;
    let phase_hat = if r > T::zero() {
        wrap_to_pi(sq.atan2(cq))
    } else {
        T::zero()
    };
    let cap = T::PI() / T::lit(3.0).sqrt();

    let (visibility_var, phase_stderr) = if r > T::zero() {
        let gc = cq / (r * a0);
        let gs = sq / (r * a0);
        let ga = -r / (a0 * a0);
        let vv = gc * gc * var_cc
            + gs * gs * var_ss
            + ga * ga * var_aa
            + two * (gc * gs * cov_cs + gc * ga * cov_ac + gs * ga * cov_as);
        let pv = (sq * sq * var_cc + cq * cq * var_ss - two * cq * sq * cov_cs) / (r2 * r2);
        (vv, pv.max(T::zero()).sqrt().min(cap))
    } else {
        ((var_cc + var_ss) / (two * a0 * a0), cap)
    };
    let visibility_stderr = visibility_var.max(T::zero()).sqrt();

    Ok(FringeFit {
        phase_hat,
        visibility_hat,
        phase_stderr,
        visibility_stderr,
        singular: visibility_hat < k_sigma * visibility_stderr,
        mean_count_hat: two * a0,
    })
}

/// Whether the experiment reports the beam's own phase or its difference
/// from the opposite-hemisphere pole beam.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentMode {
    Direct,
    Difference,
}

impl ExperimentMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentMode::Direct => "direct",
            ExperimentMode::Difference => "difference",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig<T> {
    pub chi_count: usize,
    pub mean_count: T,
    /// `None` for noiseless fringes.
    pub seed: Option<u64>,
    pub k_sigma: T,
    /// Degree of polarization of the beam (`1` for a pure state).
    pub p: T,
    pub mode: ExperimentMode,
    /// Width in `phi` of the steep-jump detection window.
    pub window: T,
    /// Fail on step-size violations instead of recording them as unresolved jumps.
    pub strict: bool,
}

impl<T: Real> Default for ExperimentConfig<T> {
    fn default() -> Self {
        Self {
            chi_count: 16,
            mean_count: T::lit(1e4),
            seed: None,
            k_sigma: T::lit(DEFAULT_K_SIGMA),
            p: T::one(),
            mode: ExperimentMode::Direct,
            window: T::lit(DEFAULT_JUMP_WINDOW),
            strict: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentPoint<T> {
    pub phi: T,
    pub fit: FringeFit<T>,
    /// Fit of the pole beam in difference mode.
    pub reference_fit: Option<FringeFit<T>>,
    /// Continued phase (difference in difference mode); `None` where a fit is singular.
    pub phase: Option<T>,
}

/// Measured phase curve rebuilt from simulated fringe fits.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentCurve<T> {
    pub theta: T,
    pub mode: ExperimentMode,
    pub points: Vec<ExperimentPoint<T>>,
    pub jumps: Vec<JumpEvent<T>>,
}

impl<T: Real> ExperimentCurve<T> {
    pub fn phis(&self) -> Vec<T> {
        self.points.iter().map(|p| p.phi).collect()
    }

    pub fn phases(&self) -> Vec<Option<T>> {
        self.points.iter().map(|p| p.phase).collect()
    }
}

struct FittedSeries<T> {
    fits: Vec<FringeFit<T>>,
    phases: Vec<Option<T>>,
    violations: Vec<(usize, usize)>,
}

fn fit_series<T: Real>(
    beam: &BeamState<T>,
    slope_sign: T,
    phis: &[T],
    config: &ExperimentConfig<T>,
    stream_offset: u64,
) -> Result<FittedSeries<T>> {
    let fits = phis
        .iter()
        .enumerate()
        .map(|(i, &phi)| {
            let data = synthesize_stream(
                beam,
                &Su2::z_precession(phi),
                config.chi_count,
                config.mean_count,
                config.seed,
                2 * i as u64 + stream_offset,
            )?;
            fit_fringe_with(&data, config.k_sigma)
        })
        .collect::<Result<Vec<_>>>()?;
    let principal: Vec<Option<T>> = fits
        .iter()
        .map(|f| if f.singular { None } else { Some(f.phase_hat) })
        .collect();
    // A jump across statistically null contrast never gets a sign.
    let cont = continue_phases(phis, &principal, slope_sign, |_, _, _| true, config.strict)?;
    let violations = cont
        .crossings
        .iter()
        .filter(|c| c.2 == Crossing::Violation)
        .map(|c| (c.0, c.1))
        .collect();
    Ok(FittedSeries {
        fits,
        phases: cont.phases,
        violations,
    })
}

/// Simulates a measured phase curve: one fringe per `phi`, fitted and
/// continued with the nearest-branch rule. Singular fits are left undefined and
/// jumps across them are reported unresolved. In difference mode the pole beam
/// in the opposite hemisphere is simulated on independent streams and its
/// continued phase subtracted.
pub fn experiment_curve<T: Real>(theta: T, phis: &[T], config: &ExperimentConfig<T>) -> Result<ExperimentCurve<T>> {
    if phis.is_empty() {
        return Err(PhaseError::InvalidParameter("empty phi grid".into()));
    }
    if phis.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(PhaseError::InvalidParameter(
            "phi grid must be strictly increasing".into(),
        ));
    }
    let beam = BeamState::polar(theta, config.p)?;
    let slope = |t: T| {
        if config.p == T::zero() {
            T::zero()
        } else {
            Hemisphere::of(t).sign::<T>()
        }
    };
    let own = fit_series(&beam, slope(theta), phis, config, 0)?;

    let (reference, mut violations) = match config.mode {
        ExperimentMode::Direct => (None, own.violations.clone()),
        ExperimentMode::Difference => {
            let pole = reference_pole(theta)?;
            let series = fit_series(&BeamState::polar(pole, config.p)?, slope(pole), phis, config, 1)?;
            let mut v = own.violations.clone();
            v.extend(series.violations.iter().copied());
            (Some(series), v)
        }
    };
    violations.sort();
    violations.dedup();

    let phases: Vec<Option<T>> = match &reference {
        None => own.phases.clone(),
        Some(r) => own
            .phases
            .iter()
            .zip(&r.phases)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => Some(*a - *b),
                _ => None,
            })
            .collect(),
    };

    let mut jumps = gap_events(phis, &phases, |_, _, _| true);
    for &(i, j) in &violations {
        if let (Some(a), Some(b)) = (phases[i], phases[j]) {
            let at = (phis[i] + phis[j]) / T::lit(2.0);
            jumps.push(JumpEvent::unresolved(
                at,
                wrap_to_pi(b - a).abs(),
                JumpKind::StepViolation,
            ));
        }
    }
    let breaks: Vec<usize> = violations.iter().map(|v| v.1).collect();
    jumps.extend(steep_events(phis, &phases, config.window, &breaks));
    jumps.sort_by(|a, b| a.phi_location.partial_cmp(&b.phi_location).unwrap());

    let points = phis
        .iter()
        .enumerate()
        .map(|(i, &phi)| ExperimentPoint {
            phi,
            fit: own.fits[i],
            reference_fit: reference.as_ref().map(|r| r.fits[i]),
            phase: phases[i],
        })
        .collect();
    Ok(ExperimentCurve {
        theta,
        mode: config.mode,
        points,
        jumps,
    })
}
