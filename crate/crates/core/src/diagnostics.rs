//! Coefficient-decay diagnostics and the smooth cut-off split of the logarithmic term.
//!
//! On the `+d` circle, `W21(z) = log(1 + sqrt(rho) s/(z - d))` is singular at a point
//! a distance of order `T` from the boundary, so its Laurent coefficients in `s/(z - d)`
//! and its power-series coefficients in `zeta` both decay only like `rho^{j/2}/j`. A
//! cut-off `Phi` in the annulus angle splits it into a `zeta` series `omega1` with
//! `Re omega1 = (1 - Phi) Re W21` and an `s/(z - d)` series `omega2` with
//! `Re omega2 = Phi Re W21`, each smooth on the scale of the cut-off width.

use std::fmt::Write as _;

use num_complex::Complex;

use crate::conformal::AnnulusMap;
use crate::error::{Error, Result};
use crate::scalar::{cis, Real};

/// Number of equispaced samples used for the cosine series of the split.
pub const SPLIT_SAMPLES: usize = 1 << 14;

/// Weighted suprema `sup_j j^k |c_j|`, `k = 0..=k_max`, of a coefficient sequence
/// indexed from `j = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayProfile<T> {
    pub coefficients: Vec<Complex<T>>,
    /// `sups[k] = sup_j j^k |c_j|`.
    pub sups: Vec<T>,
    /// Modulus `T` of the geometry the coefficients belong to.
    pub t: T,
}

pub fn decay_profile<T: Real>(
    coefficients: &[Complex<T>],
    t: T,
    k_max: usize,
) -> Result<DecayProfile<T>> {
    if coefficients.is_empty() {
        return Err(Error::InvalidInput(
            "decay profile of an empty sequence".into(),
        ));
    }
    let mut sups = vec![T::zero(); k_max + 1];
    for (i, c) in coefficients.iter().enumerate() {
        let j = T::from_count(i + 1);
        let mut w = c.norm();
        for sup in sups.iter_mut() {
            *sup = sup.max(w);
            w = w * j;
        }
    }
    if sups.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidInput("coefficients are not finite".into()));
    }
    Ok(DecayProfile {
        coefficients: coefficients.to_vec(),
        sups,
        t,
    })
}

impl<T: Real> DecayProfile<T> {
    pub fn k_max(&self) -> usize {
        self.sups.len() - 1
    }

    /// CSV with columns `j,abs,w1,...,wK` where `wk = j^k |c_j|`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,abs");
        for k in 1..=self.k_max() {
            let _ = write!(out, ",w{k}");
        }
        out.push('\n');
        for (i, c) in self.coefficients.iter().enumerate() {
            let j = T::from_count(i + 1);
            let mut w = c.norm();
            let _ = write!(out, "{}", i + 1);
            for _ in 0..=self.k_max() {
                let _ = write!(out, ",{:.14e}", w.to_f64().unwrap_or(f64::NAN));
                w = w * j;
            }
            out.push('\n');
        }
        out
    }
}

/// Even cut-off with `Phi = 1` on `|nu| <= delta` and `Phi = 0` on `|nu| >= 2 delta`.
///
/// The transition is the smooth step `f(x)/(f(x) + f(1 - x))` with
/// `f(x) = exp(-1/x^smoothness)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec<T> {
    pub delta: T,
    pub smoothness: u32,
}

impl<T: Real> CutoffSpec<T> {
    pub fn new(delta: T) -> Result<Self> {
        let spec = Self {
            delta,
            smoothness: 1,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Width `sqrt(T)` matched to the annulus modulus.
    pub fn for_modulus(t: T) -> Result<Self> {
        Self::new(t.sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > T::zero()) || !(self.delta < T::FRAC_PI_2()) {
            return Err(Error::InvalidInput(format!(
                "cut-off width {} must lie in (0, pi/2)",
                self.delta
            )));
        }
        if self.smoothness == 0 {
            return Err(Error::InvalidInput(
                "cut-off smoothness must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

fn bump_profile<T: Real>(x: T, p: u32) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        (-T::one() / x.powi(p as i32)).exp()
    }
}

/// Smooth step from 0 (`x <= 0`) to 1 (`x >= 1`).
fn smooth_step<T: Real>(x: T, p: u32) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    if x >= T::one() {
        return T::one();
    }
    let a = bump_profile(x, p);
    let b = bump_profile(T::one() - x, p);
    a / (a + b)
}

/// `Phi(nu)`, extended `2 pi`-periodically.
pub fn cutoff_phi<T: Real>(spec: &CutoffSpec<T>, nu: T) -> T {
    let two_pi = T::lit(2.0) * T::PI();
    let nu = nu - two_pi * (nu / two_pi).round();
    T::one() - smooth_step((nu.abs() - spec.delta) / spec.delta, spec.smoothness)
}

/// Coefficients of the cut-off split of `W21`.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridSplit<T> {
    /// `omega1(zeta) = sum_{j>=0} zeta_coeffs[j] zeta^j` (real coefficients, `Im omega1(0) = 0`).
    pub zeta_coeffs: Vec<T>,
    /// `omega2 = sum_{j>=0} laurent_coeffs[j] (s/(z - d))^j`.
    pub laurent_coeffs: Vec<T>,
    /// Set when no cut-off was applied (`Phi = 0`): `omega2 = 0` and `omega1` is the plain
    /// `zeta` series of `W21`.
    pub degenerate: bool,
}

impl<T: Real> HybridSplit<T> {
    /// `Re omega1` at `zeta = -e^{i nu}`.
    pub fn re_omega1(&self, nu: T) -> T {
        cosine_sum(&self.zeta_coeffs, nu + T::PI())
    }

    /// `Re omega2` at `s/(z - d) = e^{i theta}`.
    pub fn re_omega2(&self, theta: T) -> T {
        cosine_sum(&self.laurent_coeffs, theta)
    }

    /// Coefficients `j = 1..` of `omega1` as complex numbers, for [`decay_profile`].
    pub fn zeta_tail(&self) -> Vec<Complex<T>> {
        self.zeta_coeffs[1..]
            .iter()
            .map(|&c| Complex::new(c, T::zero()))
            .collect()
    }

    /// Coefficients `j = 1..` of `omega2`.
    pub fn laurent_tail(&self) -> Vec<Complex<T>> {
        self.laurent_coeffs[1..]
            .iter()
            .map(|&c| Complex::new(c, T::zero()))
            .collect()
    }
}

fn cosine_sum<T: Real>(coeffs: &[T], x: T) -> T {
    // Clenshaw recurrence for sum c_j cos(j x)
    let two_cos = T::lit(2.0) * x.cos();
    let (mut b1, mut b2) = (T::zero(), T::zero());
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + two_cos * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs[0] + b1 * x.cos() - b2
}

/// Cosine coefficients `c_0..=c_{j_max}` of an even `2 pi`-periodic function sampled on
/// `SPLIT_SAMPLES` equispaced points.
fn cosine_coeffs<T: Real>(f: impl Fn(T) -> T, j_max: usize) -> Vec<T> {
    let n = SPLIT_SAMPLES;
    let step = T::lit(2.0) * T::PI() / T::from_count(n);
    let mut buf: Vec<Complex<T>> = (0..n)
        .map(|l| Complex::new(f(step * T::from_count(l)), T::zero()))
        .collect();
    T::fft_forward(&mut buf);
    let scale = T::one() / T::from_count(n);
    (0..=j_max)
        .map(|j| {
            let c = buf[j].re * scale;
            if j == 0 {
                c
            } else {
                c * T::lit(2.0)
            }
        })
        .collect()
}

/// `Re W21` on the `+d` circle as a function of the Laurent angle `theta`
/// (`s/(z - d) = e^{i theta}`).
pub fn re_w21_theta<T: Real>(map: &AnnulusMap<T>, theta: T) -> T {
    (Complex::new(T::one(), T::zero()) + cis(theta) * map.sqrt_rho)
        .norm()
        .ln()
}

/// Splits `W21` with the cut-off `spec` (or no cut-off when `None`), returning the first
/// `j_max + 1` coefficients of each series.
pub fn hybrid_split_w21<T: Real>(
    map: &AnnulusMap<T>,
    spec: Option<&CutoffSpec<T>>,
    j_max: usize,
) -> Result<HybridSplit<T>> {
    if !(64..=SPLIT_SAMPLES / 4).contains(&j_max) {
        return Err(Error::InvalidInput(format!(
            "j_max must lie in [64, {}], got {j_max}",
            SPLIT_SAMPLES / 4
        )));
    }
    if let Some(spec) = spec {
        spec.validate()?;
    }
    let phi = |nu: T| spec.map_or(T::zero(), |s| cutoff_phi(s, nu));
    // the point z = d + s e^{-i theta} has zeta = -e^{i nu(theta)} and s/(z - d) = e^{i theta}
    let h1 = cosine_coeffs(
        |nu: T| (T::one() - phi(nu)) * re_w21_theta(map, map.theta_from_nu(nu)),
        j_max,
    );
    let zeta_coeffs = h1
        .iter()
        .enumerate()
        .map(|(j, &h)| if j % 2 == 0 { h } else { -h })
        .collect();
    let laurent_coeffs = match spec {
        Some(_) => cosine_coeffs(
            |theta: T| phi(map.nu_from_theta(theta)) * re_w21_theta(map, theta),
            j_max,
        ),
        None => vec![T::zero(); j_max + 1],
    };
    Ok(HybridSplit {
        zeta_coeffs,
        laurent_coeffs,
        degenerate: spec.is_none(),
    })
}

/// Largest deviation of `Re omega1 + Re omega2` from `Re W21` over `n` points of the `+d`
/// circle placed between the sampling nodes.
pub fn split_reconstruction_error<T: Real>(
    map: &AnnulusMap<T>,
    split: &HybridSplit<T>,
    n: usize,
) -> T {
    let step = T::lit(2.0) * T::PI() / T::from_count(n);
    let mut worst = T::zero();
    for l in 0..n {
        let theta = step * (T::from_count(l) + T::lit(0.5)) - T::PI();
        let nu = map.nu_from_theta(theta);
        let err = (split.re_omega1(nu) + split.re_omega2(theta) - re_w21_theta(map, theta)).abs();
        worst = worst.max(err);
    }
    worst
}

/// Magnitudes `rho^{j/2}/j`, `j = 1..=j_max`, of the single-basis coefficients of `W21`.
pub fn single_basis_coeffs<T: Real>(map: &AnnulusMap<T>, j_max: usize) -> Vec<Complex<T>> {
    let mut p = T::one();
    (1..=j_max)
        .map(|j| {
            p = p * map.sqrt_rho;
            Complex::new(p / T::from_count(j), T::zero())
        })
        .collect()
}
