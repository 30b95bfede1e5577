//! Two-level-system arithmetic: Bloch directions, spinors, SU(2) elements in
//! Cayley–Klein form and the Pancharatnam overlap between two states.
//!
//! Sign convention: [`Su2::z_precession`] is `diag(e^{+i phi/2}, e^{-i phi/2})`,
//! so the `theta = 0` pole state picks up the phase `+phi/2` and states in the
//! upper hemisphere have secular phase slope `+1/2`. Every other sign in the
//! crate follows from this choice.

use num_complex::Complex;

use crate::error::{PhaseError, Result};
use crate::scalar::{wrap_to_pi, Real};

/// Complex amplitude carrier.
pub type ComplexValue<T> = Complex<T>;

/// Default orthogonality threshold for analytic pipelines: below this overlap
/// modulus the interference phase is reported as undefined.
pub const DEFAULT_TOL_ORTH: f64 = 1e-9;

fn finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Point on the Bloch sphere. `theta` is measured from the +z precession axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochDirection<T> {
    theta: T,
    azimuth: T,
}

impl<T: Real> BlochDirection<T> {
    /// Validates `theta` into `[0, pi]` (overshoot within the angle tolerance
    /// is clamped) and reduces `azimuth` into `[0, 2 pi)`.
    pub fn new(theta: T, azimuth: T) -> Result<Self> {
        if !theta.is_finite() || !azimuth.is_finite() {
            return Err(PhaseError::NonFinite("Bloch direction"));
        }
        let tol = T::angle_tol();
        if theta < -tol || theta > T::PI() + tol {
            return Err(PhaseError::PolarAngleOutOfRange(theta.to_f64().unwrap_or(f64::NAN)));
        }
        let theta = theta.max(T::zero()).min(T::PI());
        let tau = T::two_pi();
        let mut azimuth = azimuth % tau;
        if azimuth < T::zero() {
            azimuth = azimuth + tau;
        }
        if azimuth >= tau {
            azimuth = T::zero();
        }
        Ok(Self { theta, azimuth })
    }

    /// Direction with zero azimuth, the setting used for polar-axis precession.
    pub fn polar(theta: T) -> Result<Self> {
        Self::new(theta, T::zero())
    }

    pub fn plus_z() -> Self {
        Self {
            theta: T::zero(),
            azimuth: T::zero(),
        }
    }

    pub fn plus_x() -> Self {
        Self {
            theta: T::FRAC_PI_2(),
            azimuth: T::zero(),
        }
    }

    pub fn plus_y() -> Self {
        Self {
            theta: T::FRAC_PI_2(),
            azimuth: T::FRAC_PI_2(),
        }
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn azimuth(&self) -> T {
        self.azimuth
    }

    /// Cartesian unit vector `(x, y, z)`.
    pub fn unit_vector(&self) -> [T; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sa, ca) = self.azimuth.sin_cos();
        [st * ca, st * sa, ct]
    }

    /// Which hemisphere the direction lies in relative to the precession axis.
    pub fn hemisphere(&self) -> Hemisphere {
        Hemisphere::of(self.theta)
    }
}

/// Upper (`theta < pi/2`), lower (`theta > pi/2`) or on the equator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hemisphere {
    Upper,
    Equator,
    Lower,
}

impl Hemisphere {
    /// `theta` within the angle tolerance of `pi/2` counts as the equator.
    pub fn of<T: Real>(theta: T) -> Self {
        let d = theta - T::FRAC_PI_2();
        if d.abs() < T::angle_tol() {
            Hemisphere::Equator
        } else if d < T::zero() {
            Hemisphere::Upper
        } else {
            Hemisphere::Lower
        }
    }

    /// `+1`, `0`, `-1`: the sign of the secular phase slope.
    pub fn sign<T: Real>(self) -> T {
        match self {
            Hemisphere::Upper => T::one(),
            Hemisphere::Equator => T::zero(),
            Hemisphere::Lower => -T::one(),
        }
    }
}

/// Normalized two-component state on the `+-z` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor<T> {
    up: Complex<T>,
    down: Complex<T>,
}

impl<T: Real> Spinor<T> {
    /// Builds a spinor, requiring `|up|^2 + |down|^2 = 1` within the norm tolerance.
    pub fn new(up: Complex<T>, down: Complex<T>) -> Result<Self> {
        if !finite(up) || !finite(down) {
            return Err(PhaseError::NonFinite("spinor"));
        }
        let norm_sq = up.norm_sqr() + down.norm_sqr();
        if (norm_sq - T::one()).abs() > T::norm_tol() {
            return Err(PhaseError::NotNormalized {
                what: "spinor",
                norm_sq: norm_sq.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { up, down })
    }

    /// Normalizes an arbitrary nonzero pair of amplitudes.
    pub fn normalized(up: Complex<T>, down: Complex<T>) -> Result<Self> {
        if !finite(up) || !finite(down) {
            return Err(PhaseError::NonFinite("spinor"));
        }
        let n = (up.norm_sqr() + down.norm_sqr()).sqrt();
        if n <= T::zero() {
            return Err(PhaseError::NotNormalized {
                what: "spinor",
                norm_sq: 0.0,
            });
        }
        Ok(Self {
            up: up / n,
            down: down / n,
        })
    }

    pub fn up(&self) -> Complex<T> {
        self.up
    }

    pub fn down(&self) -> Complex<T> {
        self.down
    }

    pub fn norm_sqr(&self) -> T {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Spinor<T>) -> Complex<T> {
        self.up.conj() * other.up + self.down.conj() * other.down
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Spinor<T>) -> T {
        self.inner(other).norm_sqr()
    }

    /// Multiplies both amplitudes by `e^{i alpha}`.
    pub fn with_global_phase(&self, alpha: T) -> Self {
        let f = Complex::from_polar(T::one(), alpha);
        Self {
            up: self.up * f,
            down: self.down * f,
        }
    }

    /// Fixes the global phase: `up` real and nonnegative, or when `|up|` is
    /// below `1e-14`, `down` real and positive.
    pub fn canonical(&self) -> Self {
        let eps = T::lit(1e-14);
        let reference = if self.up.norm() < eps { self.down } else { self.up };
        let n = reference.norm();
        if n == T::zero() {
            return *self;
        }
        let f = reference.conj() / n;
        Self {
            up: self.up * f,
            down: self.down * f,
        }
    }

    /// Standard Bloch parametrization: `up = cos(theta/2)`,
    /// `down = e^{i azimuth} sin(theta/2)`.
    pub fn from_bloch(d: BlochDirection<T>) -> Self {
        let half = d.theta / T::lit(2.0);
        Self {
            up: Complex::new(half.cos(), T::zero()),
            down: Complex::from_polar(half.sin(), d.azimuth),
        }
    }

    /// Inverse of [`Spinor::from_bloch`] up to global phase.
    pub fn to_bloch(&self) -> BlochDirection<T> {
        let c = self.canonical();
        let theta = T::lit(2.0) * c.down.norm().atan2(c.up.norm());
        let eps = T::lit(1e-14);
        let azimuth = if c.up.norm() < eps || c.down.norm() < eps {
            T::zero()
        } else {
            c.down.arg() - c.up.arg()
        };
        BlochDirection::new(theta.min(T::PI()), azimuth).expect("angles derived from a finite spinor are valid")
    }
}

/// `spinor_from_bloch`.
pub fn spinor_from_bloch<T: Real>(d: BlochDirection<T>) -> Spinor<T> {
    Spinor::from_bloch(d)
}

/// `bloch_from_spinor`.
pub fn bloch_from_spinor<T: Real>(s: &Spinor<T>) -> BlochDirection<T> {
    s.to_bloch()
}

/// SU(2) element `U = [[a, -conj(b)], [b, conj(a)]]` with `|a|^2 + |b|^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2<T> {
    a: Complex<T>,
    b: Complex<T>,
}

impl<T: Real> Su2<T> {
    pub fn new(a: Complex<T>, b: Complex<T>) -> Result<Self> {
        if !finite(a) || !finite(b) {
            return Err(PhaseError::NonFinite("SU(2) element"));
        }
        let norm_sq = a.norm_sqr() + b.norm_sqr();
        if (norm_sq - T::one()).abs() > T::norm_tol() {
            return Err(PhaseError::NotNormalized {
                what: "SU(2) element",
                norm_sq: norm_sq.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { a, b })
    }

    pub fn identity() -> Self {
        Self {
            a: Complex::new(T::one(), T::zero()),
            b: Complex::new(T::zero(), T::zero()),
        }
    }

    /// Precession by `phi` about the polar axis: `diag(e^{+i phi/2}, e^{-i phi/2})`.
    pub fn z_precession(phi: T) -> Self {
        Self {
            a: Complex::from_polar(T::one(), phi / T::lit(2.0)),
            b: Complex::new(T::zero(), T::zero()),
        }
    }

    /// `cos(angle/2) I + i sin(angle/2) (n . sigma)`.
    pub fn axis_rotation(axis: BlochDirection<T>, angle: T) -> Self {
        let [nx, ny, nz] = axis.unit_vector();
        let (s, c) = (angle / T::lit(2.0)).sin_cos();
        Self {
            a: Complex::new(c, s * nz),
            b: Complex::new(-s * ny, s * nx),
        }
    }

    pub fn a(&self) -> Complex<T> {
        self.a
    }

    pub fn b(&self) -> Complex<T> {
        self.b
    }

    /// Row-major 2x2 matrix.
    pub fn matrix(&self) -> [[Complex<T>; 2]; 2] {
        [[self.a, -self.b.conj()], [self.b, self.a.conj()]]
    }

    /// Matrix product `self * rhs` (apply `rhs` first), kept in Cayley–Klein form.
    pub fn compose(&self, rhs: &Su2<T>) -> Self {
        Self {
            a: self.a * rhs.a - self.b.conj() * rhs.b,
            b: self.b * rhs.a + self.a.conj() * rhs.b,
        }
    }

    /// Inverse element (the Hermitian adjoint).
    pub fn inverse(&self) -> Self {
        Self {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    /// Rescales `(a, b)` back onto the unit sphere; for long products.
    pub fn renormalized(&self) -> Self {
        let n = (self.a.norm_sqr() + self.b.norm_sqr()).sqrt();
        Self {
            a: self.a / n,
            b: self.b / n,
        }
    }

    pub fn apply(&self, s: &Spinor<T>) -> Spinor<T> {
        Spinor {
            up: self.a * s.up - self.b.conj() * s.down,
            down: self.b * s.up + self.a.conj() * s.down,
        }
    }

    pub fn trace(&self) -> Complex<T> {
        Complex::new(T::lit(2.0) * self.a.re, T::zero())
    }
}

/// `z_precession`.
pub fn z_precession<T: Real>(phi: T) -> Su2<T> {
    Su2::z_precession(phi)
}

/// `axis_rotation`.
pub fn axis_rotation<T: Real>(axis: BlochDirection<T>, angle: T) -> Su2<T> {
    Su2::axis_rotation(axis, angle)
}

/// `apply`.
pub fn apply<T: Real>(u: &Su2<T>, s: &Spinor<T>) -> Spinor<T> {
    u.apply(s)
}

/// `compose(u2, u1)`: the element equivalent to applying `u1` then `u2`.
pub fn compose<T: Real>(u2: &Su2<T>, u1: &Su2<T>) -> Su2<T> {
    u2.compose(u1)
}

/// Complex overlap with its modulus and (possibly undefined) principal phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapResult<T> {
    pub value: Complex<T>,
    pub visibility: T,
    /// Principal argument in `(-pi, pi]`; `None` below the orthogonality threshold.
    pub phase: Option<T>,
}

impl<T: Real> OverlapResult<T> {
    pub fn from_value(value: Complex<T>, tol_orth: T) -> Self {
        let visibility = value.norm();
        let phase = if visibility < tol_orth {
            None
        } else {
            Some(principal_arg(value))
        };
        Self {
            value,
            visibility,
            phase,
        }
    }

    pub fn is_defined(&self) -> bool {
        self.phase.is_some()
    }
}

/// `arg(z)` in `(-pi, pi]` (maps the `-pi` returned for `-0.0` imaginary parts to `pi`).
pub fn principal_arg<T: Real>(z: Complex<T>) -> T {
    wrap_to_pi(z.im.atan2(z.re))
}

/// `<reference|state>`, its visibility, and the noncyclic phase when the two
/// states are not orthogonal.
pub fn pancharatnam_overlap<T: Real>(reference: &Spinor<T>, state: &Spinor<T>, tol_orth: T) -> OverlapResult<T> {
    OverlapResult::from_value(reference.inner(state), tol_orth)
}
