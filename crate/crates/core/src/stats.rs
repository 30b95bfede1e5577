//! Small statistics helpers for judging simulated measurement runs.

use crate::scalar::Real;

/// Rayleigh test of circular uniformity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighTest<T> {
    /// Mean resultant length in `[0, 1]`.
    pub mean_resultant: T,
    /// `n * mean_resultant^2`.
    pub z: T,
    /// Probability of a resultant at least this long under uniformity.
    pub p_value: T,
}

/// Rayleigh test with Zar's p-value approximation
/// `exp(sqrt(1 + 4n + 4(n^2 - R^2)) - (1 + 2n))`, `R = n * mean_resultant`.
pub fn rayleigh_test<T: Real>(angles: &[T]) -> RayleighTest<T> {
    let n = T::from_usize(angles.len()).unwrap();
    if angles.is_empty() {
        return RayleighTest {
            mean_resultant: T::zero(),
            z: T::zero(),
            p_value: T::one(),
        };
    }
    let (s, c) = angles
        .iter()
        .fold((T::zero(), T::zero()), |(s, c), a| (s + a.sin(), c + a.cos()));
    let r = (s * s + c * c).sqrt();
    let mean_resultant = r / n;
    let four = T::lit(4.0);
    let p = ((T::one() + four * n + four * (n * n - r * r)).sqrt() - (T::one() + T::lit(2.0) * n)).exp();
    RayleighTest {
        mean_resultant,
        z: n * mean_resultant * mean_resultant,
        p_value: p.min(T::one()),
    }
}

/// Ordinary least-squares slope and intercept of `y` on `x`.
pub fn linear_fit<T: Real>(x: &[T], y: &[T]) -> Option<(T, T)> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = T::from_usize(x.len()).unwrap();
    let mx = x.iter().fold(T::zero(), |a, &v| a + v) / n;
    let my = y.iter().fold(T::zero(), |a, &v| a + v) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        sxy = sxy + (a - mx) * (b - my);
        sxx = sxx + (a - mx) * (a - mx);
    }
    if sxx == T::zero() {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}
