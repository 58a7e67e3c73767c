//! Möbius map between the exterior of two equal discs at `±d` and a concentric annulus.
//!
//! With `q = sqrt(1 - (s/d)^2)` the annulus modulus is `rho = (1 - q) / (1 + q)` and
//!
//! ```text
//! z(zeta) = A (zeta - sqrt(rho)) / (zeta + sqrt(rho)),   zeta(z) = sqrt(rho) (A + z) / (A - z),
//! ```
//!
//! with `A = sqrt(d^2 - s^2)`. The unit circle maps onto `|z - d| = s`, the circle
//! `|zeta| = rho` onto `|z + d| = s`, and `zeta = -sqrt(rho)` is the preimage of infinity.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{re, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusMap<T> {
    pub d: T,
    pub s: T,
    pub rho: T,
    pub sqrt_rho: T,
    /// `1 - rho`, kept separately so near-touching geometries keep full relative precision.
    pub one_minus_rho: T,
    /// Map scale `A`.
    pub a: T,
    /// `(1/pi) log(1/rho)`.
    pub t: T,
}

/// Builds the annulus map for half-distance `d` and radius `s`.
pub fn annulus_map<T: Real>(d: T, s: T) -> Result<AnnulusMap<T>> {
    if !(s > T::zero()) {
        return Err(Error::InvalidGeometry(format!(
            "radius must be positive, got {s}"
        )));
    }
    if !(s < d) {
        return Err(Error::InvalidGeometry(format!(
            "radius {s} must be below half-distance {d}"
        )));
    }
    let one = T::one();
    let two = T::lit(2.0);
    let gap = d - s;
    let a = (gap * (d + s)).sqrt();
    let q = a / d;
    let ratio = s / d;
    // (1 - q)/(1 + q) rewritten without the cancellation in 1 - q
    let rho = ratio * ratio / ((one + q) * (one + q));
    let one_minus_rho = two * q / (one + q);
    let t = two / T::PI() * (q.ln_1p() - (-gap / d).ln_1p());
    Ok(AnnulusMap {
        d,
        s,
        rho,
        sqrt_rho: rho.sqrt(),
        one_minus_rho,
        a,
        t,
    })
}

impl<T: Real> AnnulusMap<T> {
    /// `A` via the modulus form `d (1 - rho)/(1 + rho)`; equals `self.a` up to rounding.
    pub fn a_from_rho(&self) -> T {
        self.d * self.one_minus_rho / (T::one() + self.rho)
    }

    /// Circle gap `2(d - s)`.
    pub fn separation(&self) -> T {
        T::lit(2.0) * (self.d - self.s)
    }

    pub fn to_physical(&self, zeta: Complex<T>) -> Result<Complex<T>> {
        let den = zeta + self.sqrt_rho;
        if den.norm() <= T::epsilon() * self.sqrt_rho {
            return Err(Error::PoleAtInfinity);
        }
        Ok((zeta - self.sqrt_rho) / den * self.a)
    }

    pub fn to_annulus(&self, z: Complex<T>) -> Result<Complex<T>> {
        let den = re(self.a) - z;
        if den.norm() <= T::epsilon() * self.a {
            return Err(Error::PoleInDisc);
        }
        Ok((z + self.a) / den * self.sqrt_rho)
    }

    /// `(1 - sqrt(rho))/(1 + sqrt(rho))`.
    fn angle_factor(&self) -> T {
        let one = T::one();
        self.one_minus_rho / ((one + self.sqrt_rho) * (one + self.sqrt_rho))
    }

    /// Annulus angle `nu` of the boundary point `z = d + s e^{-i theta}` (`zeta = -e^{i nu}`),
    /// and likewise for `z = -d - s e^{i theta}` (`zeta = -rho e^{i nu}`).
    pub fn nu_from_theta(&self, theta: T) -> T {
        let half = theta / T::lit(2.0);
        T::lit(2.0) * (self.angle_factor() * half.sin()).atan2(half.cos())
    }

    /// Inverse of [`AnnulusMap::nu_from_theta`].
    pub fn theta_from_nu(&self, nu: T) -> T {
        let half = nu / T::lit(2.0);
        T::lit(2.0) * half.sin().atan2(self.angle_factor() * half.cos())
    }

    /// `d nu / d theta` at `theta`.
    pub fn dnu_dtheta(&self, theta: T) -> T {
        let k = self.angle_factor();
        let half = theta / T::lit(2.0);
        let (s, c) = (half.sin(), half.cos());
        k / (c * c + k * k * s * s)
    }
}

/// Accumulation points of the image sequence of two equal discs of radius `s` centred at
/// `z1` and `z2`; returns the point on the `z1` side.
pub fn reflection_limit_point<T: Real>(z1: Complex<T>, z2: Complex<T>, s: T) -> Complex<T> {
    let two = T::lit(2.0);
    let dist = (z2 - z1).norm();
    let gap = dist - two * s;
    let offset = (s * gap + gap * gap / T::lit(4.0)).sqrt();
    (z1 + z2) / two - (z2 - z1) / dist * offset
}
