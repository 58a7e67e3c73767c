//! The prime-type product `P(zeta, rho)`, its logarithmic derivative `K = zeta P'/P`,
//! the exact two-disc complex potential built from `K`, and the field `omega` used to
//! study coefficient decay.
//!
//! `K` has two representations. The partial-fraction sum converges like `rho^{2k}` and is
//! used for moderate `rho`. The modular series in `mu = exp(-2 pi / T)` converges
//! extremely fast as `rho -> 1` and is used above [`KEvalSettings::rho_switch`].

use num_complex::Complex;

use crate::conformal::AnnulusMap;
use crate::error::{Error, Result};
use crate::scalar::{imag_unit, re, Real};

/// Truncation controls for the `P`/`K` series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KEvalSettings<T> {
    pub tol: T,
    pub rho_switch: T,
    pub max_terms: usize,
}

impl<T: Real> Default for KEvalSettings<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-14).max(T::lit(4.0) * T::epsilon()),
            rho_switch: T::lit(0.8),
            max_terms: 1_000_000,
        }
    }
}

impl<T: Real> KEvalSettings<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero() && self.tol < T::lit(1e-6)) {
            return Err(Error::InvalidInput(format!(
                "tol must lie in (0, 1e-6), got {}",
                self.tol
            )));
        }
        if !(self.rho_switch > T::zero() && self.rho_switch < T::one()) {
            return Err(Error::InvalidInput(format!(
                "rho_switch must lie in (0, 1), got {}",
                self.rho_switch
            )));
        }
        Ok(())
    }
}

/// Annulus modulus carried with `T = (1/pi) log(1/rho)` so near-unit `rho` loses nothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus<T> {
    pub rho: T,
    pub t: T,
}

impl<T: Real> Modulus<T> {
    pub fn from_rho(rho: T) -> Result<Self> {
        if !(rho > T::zero() && rho < T::one()) {
            return Err(Error::InvalidInput(format!(
                "rho must lie in (0, 1), got {rho}"
            )));
        }
        Ok(Self {
            rho,
            t: -rho.ln() / T::PI(),
        })
    }

    pub fn from_map(map: &AnnulusMap<T>) -> Self {
        Self {
            rho: map.rho,
            t: map.t,
        }
    }
}

#[inline]
fn one<T: Real>() -> Complex<T> {
    re(T::one())
}

/// `P(zeta) = (1 - zeta) prod_{k>=1} (1 - rho^{2k} zeta)(1 - rho^{2k}/zeta)`.
pub fn prime_p<T: Real>(
    zeta: Complex<T>,
    rho: T,
    settings: &KEvalSettings<T>,
) -> Result<Complex<T>> {
    Modulus::from_rho(rho)?;
    if zeta.norm() == T::zero() {
        return Err(Error::InvalidInput("P is undefined at zeta = 0".into()));
    }
    let inv = zeta.inv();
    let spread = zeta.norm() + inv.norm();
    let rho2 = rho * rho;
    let mut q = rho2;
    let mut p = one::<T>() - zeta;
    for _ in 0..settings.max_terms {
        if q * spread <= settings.tol {
            return Ok(p);
        }
        p = p * (one::<T>() - zeta * q) * (one::<T>() - inv * q);
        q = q * rho2;
    }
    Err(Error::ConvergenceFailure {
        terms: settings.max_terms,
    })
}

/// Partial-fraction (sum) representation of `K`.
pub fn k_sum<T: Real>(zeta: Complex<T>, rho: T, settings: &KEvalSettings<T>) -> Result<Complex<T>> {
    Modulus::from_rho(rho)?;
    sum_series(
        zeta,
        rho,
        settings,
        |x| x / (one::<T>() - x),
        |z| -z / (one::<T>() - z),
        -T::one(),
        T::one(),
    )
}

/// `zeta K'(zeta)` from the sum representation.
pub fn zeta_dk_sum<T: Real>(
    zeta: Complex<T>,
    rho: T,
    settings: &KEvalSettings<T>,
) -> Result<Complex<T>> {
    Modulus::from_rho(rho)?;
    let h = |x: Complex<T>| {
        let den = one::<T>() - x;
        x / (den * den)
    };
    sum_series(zeta, rho, settings, h, move |z| -h(z), -T::one(), -T::one())
}

/// `lead(zeta) + sum_k [a f(rho^{2k} zeta) + b f(rho^{2k}/zeta)]`.
fn sum_series<T: Real>(
    zeta: Complex<T>,
    rho: T,
    settings: &KEvalSettings<T>,
    f: impl Fn(Complex<T>) -> Complex<T>,
    lead: impl Fn(Complex<T>) -> Complex<T>,
    a: T,
    b: T,
) -> Result<Complex<T>> {
    if zeta.norm() == T::zero() {
        return Err(Error::InvalidInput("K is undefined at zeta = 0".into()));
    }
    let inv = zeta.inv();
    let spread = zeta.norm() + inv.norm();
    let rho2 = rho * rho;
    // the tail after a term of size eps is bounded by eps / (1 - rho^2)
    let stop = settings.tol * (T::one() - rho2);
    let half = T::lit(0.5);
    let mut acc = lead(zeta);
    let mut q = rho2;
    for _ in 0..settings.max_terms {
        let x = zeta * q;
        let y = inv * q;
        acc = acc + f(x) * a + f(y) * b;
        if q * spread <= stop && x.norm() < half && y.norm() < half {
            return Ok(acc);
        }
        q = q * rho2;
    }
    Err(Error::ConvergenceFailure {
        terms: settings.max_terms,
    })
}

/// Reduced modular variables for a point `zeta`.
struct ModularPoint<T> {
    /// `xi = log(zeta)/pi` after shifting `Re xi` into `[-T, T]`.
    xi: Complex<T>,
    /// Number of `rho^2` shifts removed: `K(zeta) = K(reduced) + shift`.
    shift: T,
    /// `log chi = i pi xi / T`; `|Re log chi| <= pi / T` for the principal branch.
    log_chi: Complex<T>,
}

fn modular_point<T: Real>(zeta: Complex<T>, m: &Modulus<T>) -> Result<ModularPoint<T>> {
    if zeta.norm() == T::zero() {
        return Err(Error::InvalidInput("K is undefined at zeta = 0".into()));
    }
    let pi = T::PI();
    let mut xi = zeta.ln() / pi;
    let period = T::lit(2.0) * m.t;
    let shift = (xi.re / period).round();
    xi.re = xi.re - shift * period;
    let log_chi = imag_unit::<T>() * xi * (pi / m.t);
    Ok(ModularPoint { xi, shift, log_chi })
}

/// Runs `term(e_plus, e_minus)` over `e_± = exp(±log_chi - 2 pi m / T)`, `m = 1, 2, ...`.
fn modular_tail<T: Real>(
    p: &ModularPoint<T>,
    m: &Modulus<T>,
    settings: &KEvalSettings<T>,
    term: impl Fn(Complex<T>, Complex<T>) -> Complex<T>,
) -> Result<Complex<T>> {
    let step = T::lit(2.0) * T::PI() / m.t;
    let log_tol = settings.tol.ln() - T::lit(2.0);
    let mut acc = Complex::new(T::zero(), T::zero());
    for k in 1..=settings.max_terms {
        let decay = step * T::from_count(k);
        let e_plus = (p.log_chi - decay).exp();
        let e_minus = (-p.log_chi - decay).exp();
        acc = acc + term(e_plus, e_minus);
        if p.log_chi.re.abs() - decay <= log_tol {
            return Ok(acc);
        }
    }
    Err(Error::ConvergenceFailure {
        terms: settings.max_terms,
    })
}

/// Modular (`mu`, `chi`) representation of `K`.
pub fn k_modular<T: Real>(
    zeta: Complex<T>,
    rho: T,
    settings: &KEvalSettings<T>,
) -> Result<Complex<T>> {
    k_modular_in(zeta, &Modulus::from_rho(rho)?, settings)
}

pub fn k_modular_in<T: Real>(
    zeta: Complex<T>,
    m: &Modulus<T>,
    settings: &KEvalSettings<T>,
) -> Result<Complex<T>> {
    let p = modular_point(zeta, m)?;
    let i = imag_unit::<T>();
    let two_t = T::lit(2.0) * m.t;
    // chi/(chi - 1), written in whichever of chi, 1/chi is bounded
    let lead = if p.log_chi.re <= T::zero() {
        let chi = p.log_chi.exp();
        chi / (chi - T::one())
    } else {
        one::<T>() / (one::<T>() - (-p.log_chi).exp())
    };
    let g = |e: Complex<T>| e / (one::<T>() - e);
    let tail = modular_tail(&p, m, settings, |ep, em| g(em) - g(ep))?;
    Ok(p.xi / two_t
        + Complex::new(T::lit(0.5), -T::one() / two_t)
        + i * (lead + tail) / m.t
        + p.shift)
}

/// `zeta K'(zeta)` from the modular representation.
pub fn zeta_dk_modular_in<T: Real>(
    zeta: Complex<T>,
    m: &Modulus<T>,
    settings: &KEvalSettings<T>,
) -> Result<Complex<T>> {
    let p = modular_point(zeta, m)?;
    let h = |x: Complex<T>| {
        let den = one::<T>() - x;
        x / (den * den)
    };
    // chi/(chi-1)^2 is invariant under chi -> 1/chi
    let bounded = if p.log_chi.re <= T::zero() {
        p.log_chi
    } else {
        -p.log_chi
    };
    let lead = h(bounded.exp());
    let tail = modular_tail(&p, m, settings, |ep, em| h(ep) + h(em))?;
    Ok(re(T::one() / (T::lit(2.0) * T::PI() * m.t)) + (lead + tail) / (m.t * m.t))
}

/// `K` with representation chosen by `settings.rho_switch`.
pub fn k_eval<T: Real>(
    zeta: Complex<T>,
    rho: T,
    settings: &KEvalSettings<T>,
) -> Result<Complex<T>> {
    k_in(zeta, &Modulus::from_rho(rho)?, settings)
}

pub fn k_in<T: Real>(
    zeta: Complex<T>,
    m: &Modulus<T>,
    settings: &KEvalSettings<T>,
) -> Result<Complex<T>> {
    if m.rho <= settings.rho_switch {
        k_sum(zeta, m.rho, settings)
    } else {
        k_modular_in(zeta, m, settings)
    }
}

/// `zeta K'(zeta)` with the same dispatch as [`k_in`].
pub fn zeta_dk_in<T: Real>(
    zeta: Complex<T>,
    m: &Modulus<T>,
    settings: &KEvalSettings<T>,
) -> Result<Complex<T>> {
    if m.rho <= settings.rho_switch {
        zeta_dk_sum(zeta, m.rho, settings)
    } else {
        zeta_dk_modular_in(zeta, m, settings)
    }
}

/// Exact complex potential for uniform flow `U0` past two equal discs at `±d`, as a
/// function of the annulus variable, normalised so that `W(-1) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactSolution<T> {
    pub map: AnnulusMap<T>,
    pub u0: Complex<T>,
    pub settings: KEvalSettings<T>,
    modulus: Modulus<T>,
    k_at_inv_sqrt_rho: Complex<T>,
    k_at_sqrt_rho: Complex<T>,
}

impl<T: Real> ExactSolution<T> {
    pub fn new(map: AnnulusMap<T>, u0: Complex<T>, settings: KEvalSettings<T>) -> Result<Self> {
        settings.validate()?;
        let modulus = Modulus::from_map(&map);
        let k_at_inv_sqrt_rho = k_in(re(T::one() / map.sqrt_rho), &modulus, &settings)?;
        let k_at_sqrt_rho = k_in(re(map.sqrt_rho), &modulus, &settings)?;
        Ok(Self {
            map,
            u0,
            settings,
            modulus,
            k_at_inv_sqrt_rho,
            k_at_sqrt_rho,
        })
    }

    pub fn modulus(&self) -> Modulus<T> {
        self.modulus
    }

    /// `W(zeta) = -2 A U0 (K(1/sqrt rho) - K(-zeta/sqrt rho)) + 2 A conj(U0) (K(sqrt rho) - K(-zeta sqrt rho))`.
    pub fn w(&self, zeta: Complex<T>) -> Result<Complex<T>> {
        let m = &self.map;
        let two_a = T::lit(2.0) * m.a;
        let k_outer = k_in(-zeta / m.sqrt_rho, &self.modulus, &self.settings)?;
        let k_inner = k_in(-zeta * m.sqrt_rho, &self.modulus, &self.settings)?;
        Ok(-self.u0 * (self.k_at_inv_sqrt_rho - k_outer) * two_a
            + self.u0.conj() * (self.k_at_sqrt_rho - k_inner) * two_a)
    }

    /// `w(z)` at a physical point.
    pub fn w_at(&self, z: Complex<T>) -> Result<Complex<T>> {
        self.w(self.map.to_annulus(z)?)
    }

    /// `zeta dW/dzeta`.
    pub fn zeta_dw(&self, zeta: Complex<T>) -> Result<Complex<T>> {
        let m = &self.map;
        let two_a = T::lit(2.0) * m.a;
        let outer = zeta_dk_in(-zeta / m.sqrt_rho, &self.modulus, &self.settings)?;
        let inner = zeta_dk_in(-zeta * m.sqrt_rho, &self.modulus, &self.settings)?;
        Ok(self.u0 * outer * two_a - self.u0.conj() * inner * two_a)
    }

    /// `dw/dz` at a physical point.
    pub fn dw_dz(&self, z: Complex<T>) -> Result<Complex<T>> {
        let a = self.map.a;
        let zeta = self.map.to_annulus(z)?;
        // zeta'(z)/zeta = 2A/(A^2 - z^2)
        Ok(self.zeta_dw(zeta)? * T::lit(2.0) * a / (re(a * a) - z * z))
    }

    /// `(A / (pi T)) (U0 - conj U0)`, the strength of the logarithmic part.
    pub fn log_strength(&self) -> Complex<T> {
        (self.u0 - self.u0.conj()) * (self.map.a / (T::PI() * self.map.t))
    }
}

/// `omega(z) = dW/dz - U0 + 2 A^2 (U0 - conj U0) / (pi T (z^2 - A^2))`.
pub fn omega_field<T: Real>(sol: &ExactSolution<T>, z: Complex<T>) -> Result<Complex<T>> {
    let a = sol.map.a;
    let log_term = sol.log_strength() * T::lit(2.0) * a / (z * z - a * a);
    Ok(sol.dw_dz(z)? - sol.u0 + log_term)
}

/// Laurent coefficients of `omega` about the two centres:
/// `omega = sum_j c_j (s/(z-d))^j + sum_j d_j (s/(z+d))^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaCoefficients<T> {
    /// `c[j - 1] = c_j`, `j = 1..=j_max`.
    pub c: Vec<Complex<T>>,
    /// `d[j - 1] = d_j`.
    pub d: Vec<Complex<T>>,
}

/// Trapezoidal quadrature of the boundary projections of `omega` on `n_quad` points per circle.
pub fn omega_coeffs<T: Real>(
    sol: &ExactSolution<T>,
    j_max: usize,
    n_quad: usize,
) -> Result<OmegaCoefficients<T>> {
    if j_max == 0 || n_quad < 4 * j_max {
        return Err(Error::InvalidInput(format!(
            "need n_quad >= 4 j_max, got n_quad {n_quad}, j_max {j_max}"
        )));
    }
    let (d, s) = (sol.map.d, sol.map.s);
    let two_pi = T::lit(2.0) * T::PI();
    let n = T::from_count(n_quad);
    let mut right = Vec::with_capacity(n_quad);
    let mut left = Vec::with_capacity(n_quad);
    for l in 0..n_quad {
        let theta = two_pi * T::from_count(l) / n;
        let e = Complex::new(theta.cos(), theta.sin());
        right.push(omega_field(sol, e.conj() * s + d)?);
        left.push(omega_field(sol, -e * s - d)?);
    }
    T::fft_forward(&mut right);
    T::fft_forward(&mut left);
    let mut c = Vec::with_capacity(j_max);
    let mut dd = Vec::with_capacity(j_max);
    for j in 1..=j_max {
        c.push(right[j] / n);
        let sign = if j % 2 == 0 { T::one() } else { -T::one() };
        dd.push(left[n_quad - j] * (sign / n));
    }
    Ok(OmegaCoefficients { c, d: dd })
}

/// `W_{2,1}(z) = log((z - A)/(z - d)) = log(1 + sqrt(rho) s / (z - d))`.
pub fn w21<T: Real>(map: &AnnulusMap<T>, z: Complex<T>) -> Complex<T> {
    (one::<T>() + (z - map.d).inv() * (map.sqrt_rho * map.s)).ln()
}

/// `W_{2,2}(z) = log((z + A)/(z + d)) = log(1 - sqrt(rho) s / (z + d))`.
pub fn w22<T: Real>(map: &AnnulusMap<T>, z: Complex<T>) -> Complex<T> {
    (one::<T>() - (z + map.d).inv() * (map.sqrt_rho * map.s)).ln()
}

/// Logarithmic part `W_2 = kappa (W_{2,2} - W_{2,1})` of the exact potential.
pub fn w2_log_part<T: Real>(sol: &ExactSolution<T>, z: Complex<T>) -> Complex<T> {
    sol.log_strength() * (w22(&sol.map, z) - w21(&sol.map, z))
}

/// The logarithmic decomposition of `w` without its additive constant:
/// `U0 z - sum_{k>=2} s^k c_k / ((k-1)(z-d)^{k-1}) - sum_{k>=2} s^k d_k / ((k-1)(z+d)^{k-1}) + W_2(z)`.
pub fn log_decomposition<T: Real>(
    sol: &ExactSolution<T>,
    coeffs: &OmegaCoefficients<T>,
    z: Complex<T>,
) -> Complex<T> {
    let (d, s) = (sol.map.d, sol.map.s);
    let x = (z - d).inv() * s;
    let y = (z + d).inv() * s;
    let mut acc = sol.u0 * z + w2_log_part(sol, z);
    let (mut px, mut py) = (re(s), re(s));
    for k in 2..=coeffs.c.len() {
        // s^k / (z-d)^{k-1} = s * x^{k-1}
        px = px * x;
        py = py * y;
        let w = T::one() / T::from_count(k - 1);
        acc = acc - (coeffs.c[k - 1] * px + coeffs.d[k - 1] * py) * w;
    }
    acc
}
