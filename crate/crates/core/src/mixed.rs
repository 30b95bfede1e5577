//! Partially polarized beams.
//!
//! A beam with polarization degree `p` along `n` is `rho = (I + p n.sigma)/2`.
//! Its interference with its own evolved copy gives the overlap `Tr(rho U)`,
//! which for polar-axis precession is `cos(phi/2) + i p cos(theta) sin(phi/2)`:
//! the pure-state formula with `cos(theta)` scaled by `p`. Converting a mixed
//! phase back to the fully polarized one is therefore a nonlinear map except
//! at the poles, which the residual functions below make measurable.

use num_complex::Complex;

use crate::branch::secular_branch;
use crate::curve::{measured_difference, reference_pole};
use crate::error::{PhaseError, Result};
use crate::scalar::Real;
use crate::spinor::{pancharatnam_overlap, BlochDirection, Hemisphere, OverlapResult, Spinor, Su2};

/// Beam direction on the Bloch sphere plus degree of polarization `p` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedState<T> {
    pub direction: BlochDirection<T>,
    p: T,
}

impl<T: Real> MixedState<T> {
    pub fn new(direction: BlochDirection<T>, p: T) -> Result<Self> {
        if !p.is_finite() || p < T::zero() || p > T::one() {
            return Err(PhaseError::InvalidParameter(format!(
                "degree of polarization {p} outside [0, 1]"
            )));
        }
        Ok(Self { direction, p })
    }

    pub fn p(&self) -> T {
        self.p
    }
}

/// Hermitian, unit-trace, positive semidefinite 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix<T> {
    m: [[Complex<T>; 2]; 2],
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(m: [[Complex<T>; 2]; 2]) -> Result<Self> {
        let tol = T::norm_tol();
        if m.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(PhaseError::NonFinite("density matrix"));
        }
        if m[0][0].im.abs() > tol || m[1][1].im.abs() > tol || (m[0][1] - m[1][0].conj()).norm() > tol {
            return Err(PhaseError::InvalidDensityMatrix("not Hermitian"));
        }
        if (m[0][0].re + m[1][1].re - T::one()).abs() > tol {
            return Err(PhaseError::InvalidDensityMatrix("trace is not 1"));
        }
        let rho = Self { m };
        if rho.eigenvalues()[0] < -tol {
            return Err(PhaseError::InvalidDensityMatrix("negative eigenvalue"));
        }
        Ok(rho)
    }

    /// `|psi><psi|`.
    pub fn from_pure(s: &Spinor<T>) -> Self {
        let (u, d) = (s.up(), s.down());
        Self {
            m: [[u * u.conj(), u * d.conj()], [d * u.conj(), d * d.conj()]],
        }
    }

    /// `(I + p n.sigma) / 2`.
    pub fn from_mixed(state: &MixedState<T>) -> Self {
        let half = T::lit(0.5);
        let [nx, ny, nz] = state.direction.unit_vector();
        let p = state.p;
        let off = Complex::new(p * nx * half, -p * ny * half);
        Self {
            m: [
                [Complex::new(half * (T::one() + p * nz), T::zero()), off],
                [off.conj(), Complex::new(half * (T::one() - p * nz), T::zero())],
            ],
        }
    }

    pub fn entries(&self) -> [[Complex<T>; 2]; 2] {
        self.m
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1]
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [T; 2] {
        let half = T::lit(0.5);
        let mean = half * (self.m[0][0].re + self.m[1][1].re);
        let diff = half * (self.m[0][0].re - self.m[1][1].re);
        let r = (diff * diff + self.m[0][1].norm_sqr()).sqrt();
        [mean - r, mean + r]
    }

    /// Bloch vector `p n = (Tr(rho sx), Tr(rho sy), Tr(rho sz))`.
    pub fn bloch_vector(&self) -> [T; 3] {
        let two = T::lit(2.0);
        [
            two * self.m[0][1].re,
            -two * self.m[0][1].im,
            self.m[0][0].re - self.m[1][1].re,
        ]
    }

    pub fn purity(&self) -> T {
        let [x, y, z] = self.bloch_vector();
        T::lit(0.5) * (T::one() + x * x + y * y + z * z)
    }

    /// `Tr(rho U)`.
    pub fn trace_with(&self, u: &Su2<T>) -> Complex<T> {
        let um = u.matrix();
        let m = self.m;
        m[0][0] * um[0][0] + m[0][1] * um[1][0] + m[1][0] * um[0][1] + m[1][1] * um[1][1]
    }
}

/// `density_from_mixed`.
pub fn density_from_mixed<T: Real>(m: &MixedState<T>) -> DensityMatrix<T> {
    DensityMatrix::from_mixed(m)
}

/// Interference overlap `Tr(rho U)` of a (possibly mixed) beam.
pub fn mixed_overlap<T: Real>(rho: &DensityMatrix<T>, u: &Su2<T>, tol_orth: T) -> OverlapResult<T> {
    OverlapResult::from_value(rho.trace_with(u), tol_orth)
}

/// Candidate laws for converting a partially polarized phase into the fully
/// polarized one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingLaw {
    /// `Phi_pure = Phi_mixed / p`.
    Linear,
    /// `tan(Phi_pure) = tan(Phi_mixed) / p`, branch-continued.
    Tangent,
}

impl ScalingLaw {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScalingLaw::Linear => "linear",
            ScalingLaw::Tangent => "tangent",
        }
    }

    /// Predicted fully polarized phase from a continued mixed phase.
    pub fn predict<T: Real>(&self, mixed_phase: T, p: T) -> T {
        match self {
            ScalingLaw::Linear => mixed_phase / p,
            ScalingLaw::Tangent => {
                // arctan(tan(x)/p) is monotone and fixes multiples of pi/2, so
                // continue it turn by turn around the nearest multiple of pi.
                let turns = (mixed_phase / T::PI()).round();
                let r = mixed_phase - turns * T::PI();
                r.sin().atan2(p * r.cos()) + turns * T::PI()
            }
        }
    }
}

/// Which phase the law is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// The noncyclic phase of the beam itself.
    Direct,
    /// Phase of the beam minus that of the opposite-hemisphere pole beam with
    /// the same polarization degree.
    Difference,
}

impl Observable {
    pub fn as_str(&self) -> &'static str {
        match self {
            Observable::Direct => "direct",
            Observable::Difference => "difference",
        }
    }
}

/// Branch-continued phase of `Tr(rho U(phi))` for polar-axis precession of a
/// beam at polar angle `theta` with polarization `p`. The principal value is
/// placed on the branch nearest the secular line, which is the continuation
/// anchored at `phi = 0`.
pub fn continued_mixed_phase<T: Real>(theta: T, p: T, phi: T, tol_orth: T) -> Result<T> {
    let state = MixedState::new(BlochDirection::polar(theta)?, p)?;
    let rho = DensityMatrix::from_mixed(&state);
    let o = mixed_overlap(&rho, &Su2::z_precession(phi), tol_orth);
    let principal = o.phase.ok_or_else(|| undefined(phi, o.visibility))?;
    let slope = if p == T::zero() {
        T::zero()
    } else {
        Hemisphere::of(theta).sign()
    };
    Ok(secular_branch(principal, phi, slope))
}

/// Branch-continued pure-state noncyclic phase via spinor evolution.
pub fn continued_pure_phase<T: Real>(theta: T, phi: T, tol_orth: T) -> Result<T> {
    let s = Spinor::from_bloch(BlochDirection::polar(theta)?);
    let o = pancharatnam_overlap(&s, &Su2::z_precession(phi).apply(&s), tol_orth);
    let principal = o.phase.ok_or_else(|| undefined(phi, o.visibility))?;
    Ok(secular_branch(principal, phi, Hemisphere::of(theta).sign()))
}

fn undefined<T: Real>(phi: T, visibility: T) -> PhaseError {
    PhaseError::UndefinedPhase {
        phi: phi.to_f64().unwrap_or(f64::NAN),
        visibility: visibility.to_f64().unwrap_or(f64::NAN),
    }
}

/// One evaluated point of a scaling-law test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingLawEvaluation<T> {
    pub mixed_phase: T,
    pub pure_phase: T,
    pub predicted: T,
    pub residual: T,
}

/// Applies `law` to the observable and compares with the fully polarized value.
pub fn evaluate_scaling_law<T: Real>(
    theta: T,
    p: T,
    phi: T,
    law: ScalingLaw,
    observable: Observable,
    tol_orth: T,
) -> Result<ScalingLawEvaluation<T>> {
    if !(p > T::zero() && p <= T::one()) {
        return Err(PhaseError::InvalidParameter(format!(
            "scaling laws need p in (0, 1], got {p}"
        )));
    }
    let (mixed_phase, pure_phase) = match observable {
        Observable::Direct => (
            continued_mixed_phase(theta, p, phi, tol_orth)?,
            continued_pure_phase(theta, phi, tol_orth)?,
        ),
        Observable::Difference => {
            let pole = reference_pole(theta)?;
            // Pure difference must be defined wherever the mixed one is used.
            continued_pure_phase(theta, phi, tol_orth)?;
            (
                continued_mixed_phase(theta, p, phi, tol_orth)? - continued_mixed_phase(pole, p, phi, tol_orth)?,
                measured_difference(theta, phi)?,
            )
        }
    };
    let predicted = law.predict(mixed_phase, p);
    Ok(ScalingLawEvaluation {
        mixed_phase,
        pure_phase,
        predicted,
        residual: (predicted - pure_phase).abs(),
    })
}

/// `|predicted pure phase - actual pure phase|` for the direct observable.
pub fn scaling_law_residual<T: Real>(theta: T, p: T, phi: T, law: ScalingLaw, tol_orth: T) -> Result<T> {
    evaluate_scaling_law(theta, p, phi, law, Observable::Direct, tol_orth).map(|e| e.residual)
}

/// One row of a residual map; `evaluation` is `None` where a phase is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRow<T> {
    pub theta: T,
    pub p: T,
    pub phi: T,
    pub law: ScalingLaw,
    pub observable: Observable,
    pub evaluation: Option<ScalingLawEvaluation<T>>,
}

/// Residuals of `law` for both observables over the full `(theta, p, phi)` grid,
/// ordered by theta, then p, then observable, then phi.
pub fn residual_map<T: Real>(
    thetas: &[T],
    ps: &[T],
    phis: &[T],
    law: ScalingLaw,
    tol_orth: T,
) -> Result<Vec<ResidualRow<T>>> {
    for &p in ps {
        if !(p > T::zero() && p <= T::one()) {
            return Err(PhaseError::InvalidParameter(format!("p = {p} outside (0, 1]")));
        }
    }
    for &theta in thetas {
        BlochDirection::polar(theta)?;
    }
    let mut rows = Vec::with_capacity(thetas.len() * ps.len() * phis.len() * 2);
    for &theta in thetas {
        for &p in ps {
            for observable in [Observable::Direct, Observable::Difference] {
                for &phi in phis {
                    let evaluation = evaluate_scaling_law(theta, p, phi, law, observable, tol_orth).ok();
                    rows.push(ResidualRow {
                        theta,
                        p,
                        phi,
                        law,
                        observable,
                        evaluation,
                    });
                }
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const TOL: f64 = 1e-9;

    fn mixed(theta: f64, az: f64, p: f64) -> MixedState<f64> {
        MixedState::new(BlochDirection::new(theta, az).unwrap(), p).unwrap()
    }

    #[test]
    fn density_examples() {
        let r = DensityMatrix::from_mixed(&mixed(0.0, 0.0, 1.0)).entries();
        assert!((r[0][0].re - 1.0).abs() < 1e-15 && r[1][1].norm() < 1e-15 && r[0][1].norm() < 1e-15);
        let r = DensityMatrix::from_mixed(&mixed(1.2, 0.3, 0.0)).entries();
        assert!((r[0][0].re - 0.5).abs() < 1e-15 && (r[1][1].re - 0.5).abs() < 1e-15);
        assert!(r[0][1].norm() < 1e-15);
        let r = DensityMatrix::from_mixed(&mixed(PI / 2.0, 0.0, 0.5)).entries();
        assert!((r[0][0].re - 0.5).abs() < 1e-15 && (r[1][1].re - 0.5).abs() < 1e-15);
        assert!((r[0][1] - Complex::new(0.25, 0.0)).norm() < 1e-15);
        assert!((r[1][0] - Complex::new(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn density_validation() {
        let z = Complex::new(0.0, 0.0);
        let one = Complex::new(1.0, 0.0);
        assert!(DensityMatrix::new([[one, z], [z, z]]).is_ok());
        assert!(DensityMatrix::new([[one, one], [z, z]]).is_err());
        assert!(DensityMatrix::new([[one, z], [z, one]]).is_err());
        let neg = [[Complex::new(1.5, 0.0), z], [z, Complex::new(-0.5, 0.0)]];
        assert_eq!(
            DensityMatrix::new(neg),
            Err(PhaseError::InvalidDensityMatrix("negative eigenvalue"))
        );
        assert!(MixedState::new(BlochDirection::plus_z(), 1.5).is_err());
    }

    #[test]
    fn pure_limit_matches_pancharatnam() {
        let d = BlochDirection::new(1.1, 0.7).unwrap();
        let s = Spinor::from_bloch(d);
        let rho = DensityMatrix::from_mixed(&MixedState::new(d, 1.0).unwrap());
        let u = Su2::axis_rotation(BlochDirection::new(0.4, 2.0).unwrap(), 2.3);
        let a = mixed_overlap(&rho, &u, TOL);
        let b = pancharatnam_overlap(&s, &u.apply(&s), TOL);
        assert!((a.value - b.value).norm() < 1e-12);
        assert!((a.phase.unwrap() - b.phase.unwrap()).abs() < 1e-12);
        assert!((DensityMatrix::from_pure(&s).purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unpolarized_overlap_is_real_cosine() {
        let rho = DensityMatrix::from_mixed(&mixed(0.8, 0.0, 0.0));
        for phi in [0.3, 2.0, 3.5, 5.0, 2.0 * PI] {
            let o = mixed_overlap(&rho, &Su2::z_precession(phi), TOL);
            assert!((o.value - Complex::new((phi / 2.0).cos(), 0.0)).norm() < 1e-15);
            let expected = if (phi / 2.0).cos() > 0.0 { 0.0 } else { PI };
            assert!((o.phase.unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn partially_polarized_pole_phase() {
        let rho = DensityMatrix::from_mixed(&mixed(0.0, 0.0, 0.5));
        let o = mixed_overlap(&rho, &Su2::z_precession(PI / 2.0), TOL);
        assert!((o.phase.unwrap() - 0.5f64.atan()).abs() < 1e-12);
        assert!((o.phase.unwrap() - 0.46365).abs() < 1e-5);
    }

    #[test]
    fn residual_examples() {
        let r = scaling_law_residual(0.0, 0.5, 0.01, ScalingLaw::Linear, TOL).unwrap();
        assert!(r < 1e-5);
        let r = scaling_law_residual(0.0, 0.5, PI / 2.0, ScalingLaw::Linear, TOL).unwrap();
        assert!((r - (2.0 * 0.5f64.atan() - PI / 4.0).abs()).abs() < 1e-12);
        assert!((r - 0.1419).abs() < 1e-3);
        let r = scaling_law_residual(0.0, 0.5, PI / 2.0, ScalingLaw::Tangent, TOL).unwrap();
        assert!(r < 1e-12);
    }

    #[test]
    fn residual_rejections() {
        assert!(matches!(
            scaling_law_residual(PI / 2.0, 0.5, PI, ScalingLaw::Linear, TOL),
            Err(PhaseError::UndefinedPhase { .. })
        ));
        assert!(scaling_law_residual(0.3, 0.0, 1.0, ScalingLaw::Linear, TOL).is_err());
        assert!(scaling_law_residual(0.3, 1.2, 1.0, ScalingLaw::Linear, TOL).is_err());
        assert!(evaluate_scaling_law(PI / 2.0, 0.5, 1.0, ScalingLaw::Linear, Observable::Difference, TOL).is_err());
    }

    #[test]
    fn tangent_law_continues_across_turns() {
        for phi in [2.5, PI, 4.0, 7.0, 11.0] {
            for theta in [0.0, PI] {
                let r = scaling_law_residual(theta, 0.3, phi, ScalingLaw::Tangent, TOL).unwrap();
                assert!(r < 1e-12, "theta {theta} phi {phi}: {r}");
            }
        }
    }

    #[test]
    fn residual_map_shape() {
        let rows = residual_map(&[0.0, PI / 2.0], &[0.5, 1.0], &[0.0, PI], ScalingLaw::Linear, TOL).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2 * 2);
        // Equatorial difference rows and the equatorial singular point are undefined.
        let undefined = rows.iter().filter(|r| r.evaluation.is_none()).count();
        assert_eq!(undefined, 2 + 2 * 2);
        assert!(residual_map(&[0.0], &[0.0], &[1.0], ScalingLaw::Linear, TOL).is_err());
    }
}
