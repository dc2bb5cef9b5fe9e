//! Closed-form overlap areas used as elastic force magnitudes.

use std::f64::consts::PI;

use crate::error::{Error, Result};

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("radius must be positive, got {r}")))
    }
}

/// Intersection area of two discs of radius `r` whose centers are `d` apart:
/// `r^2 (theta - sin theta)` with `theta = 2 acos(d / 2r)`, zero for `d >= 2r`.
pub fn lens_area(d: f64, r: f64) -> Result<f64> {
    check_radius(r)?;
    if !(d >= 0.0) {
        return Err(Error::InvalidArgument(format!("distance must be non-negative, got {d}")));
    }
    Ok(lens_area_unchecked(d, r))
}

#[inline]
pub(crate) fn lens_area_unchecked(d: f64, r: f64) -> f64 {
    if d >= 2.0 * r {
        return 0.0;
    }
    r * r * phi_minus_sin(central_angle(0.5 * d, r))
}

/// `2 acos(d / r)` without the loss of precision of `acos` near 1.
#[inline]
fn central_angle(d: f64, r: f64) -> f64 {
    let s = ((r - d) * (r + d)).max(0.0).sqrt();
    2.0 * s.atan2(d)
}

/// `phi - sin(phi)`, by its Taylor series where direct subtraction would
/// cancel.
#[inline]
fn phi_minus_sin(phi: f64) -> f64 {
    if phi > 0.5 {
        return phi - phi.sin();
    }
    let p2 = phi * phi;
    let mut term = phi * p2 / 6.0;
    let mut sum = 0.0f64;
    let mut k = 3.0;
    while term.abs() > 1e-18 * sum.abs() && term != 0.0 {
        sum += term;
        term *= -p2 / ((k + 1.0) * (k + 2.0));
        k += 2.0;
    }
    sum
}

/// Area of a disc of radius `r` lying beyond a line at distance `d` from its
/// center (the circular segment): `r^2 alpha / 2 - d sqrt(r^2 - d^2)` with
/// `alpha = 2 acos(d / r)`, zero for `d >= r`.
pub fn halfplane_cut_area(d: f64, r: f64) -> Result<f64> {
    check_radius(r)?;
    if !(d >= 0.0) {
        return Err(Error::InvalidArgument(format!("distance must be non-negative, got {d}")));
    }
    Ok(overflow_area(d, r))
}

/// Disc area beyond a line for any signed center distance `d` (negative when
/// the center itself is beyond the line). Continuous and non-increasing in
/// `d`; saturates at `pi r^2` for `d <= -r`.
#[inline]
pub fn overflow_area(d: f64, r: f64) -> f64 {
    if d >= r {
        return 0.0;
    }
    if d <= -r {
        return PI * r * r;
    }
    // r^2 alpha / 2 - d sqrt(r^2 - d^2) = r^2 (alpha - sin alpha) / 2
    0.5 * r * r * phi_minus_sin(central_angle(d, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lens_examples() {
        assert_eq!(lens_area(2.0, 1.0).unwrap(), 0.0);
        assert_eq!(lens_area(5.0, 1.0).unwrap(), 0.0);
        assert!((lens_area(0.0, 1.0).unwrap() - PI).abs() < 1e-15);
        assert!(lens_area(-0.1, 1.0).is_err());
        assert!(lens_area(1.0, 0.0).is_err());
    }

    #[test]
    fn stable_near_tangency() {
        // series against direct evaluation where both are accurate
        for &phi in &[0.5f64, 0.3, 0.1] {
            let direct = phi - phi.sin();
            assert!((phi_minus_sin(phi) - direct).abs() < 1e-13 * direct);
        }
        let d = 2.0 - 1e-9;
        let a = lens_area(d, 1.0).unwrap();
        assert!(a > 0.0);
        assert!((a - 2.0 * halfplane_cut_area(0.5 * d, 1.0).unwrap()).abs() <= 1e-14 * a);
    }

    #[test]
    fn cut_examples() {
        assert_eq!(halfplane_cut_area(1.0, 1.0).unwrap(), 0.0);
        assert!((halfplane_cut_area(0.0, 1.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!(halfplane_cut_area(-1e-9, 1.0).is_err());
        assert!(halfplane_cut_area(0.1, -1.0).is_err());
    }

    #[test]
    fn overflow_extends_continuously() {
        let r = 1.3;
        assert!((overflow_area(-r, r) - PI * r * r).abs() < 1e-12);
        for k in 0..100 {
            let d = 0.01 + k as f64 * 0.01;
            let sum = overflow_area(d, r) + overflow_area(-d, r);
            assert!((sum - PI * r * r).abs() < 1e-12);
        }
    }

    #[test]
    fn kernels_monotone() {
        let r = 0.7;
        let mut prev_lens = f64::INFINITY;
        let mut prev_cut = f64::INFINITY;
        for k in 0..=1000 {
            let d = 2.0 * r * k as f64 / 1000.0;
            let l = lens_area(d, r).unwrap();
            let c = overflow_area(d - r, r);
            assert!(l <= prev_lens + 1e-15);
            assert!(c <= prev_cut + 1e-15);
            prev_lens = l;
            prev_cut = c;
        }
    }
}
