//! Basis families of the three collocation schemes and truncated expansions.
//!
//! Column order of a basis row is fixed:
//!
//! 1. the constant `1`;
//! 2. one Laurent family per disc, in disc order: `(s/(z - c))^k` for `k = 1..=N`;
//! 3. one annulus family per disc pair, in pair order: `zeta^k` for `k = 1..=N`
//!    followed by `(rho/zeta)^k` for `k = 1..=N`, where `zeta` is the pair's annulus
//!    variable evaluated in the pair's canonical frame.
//!
//! An expansion evaluates `w(z) = U0 z + sum_m coeff_m row_m(z)`.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex;
use sha2::{Digest, Sha256};

use crate::conformal::{annulus_map, AnnulusMap};
use crate::error::{Error, Result};
use crate::geometry::{all_pairs, close_pairs, Disc, DiscConfiguration, PairFrame};
use crate::scalar::{re, Real};

/// Relative tolerance used when deciding that a point lies inside a disc.
const INTERIOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Laurent expansions about every disc centre.
    ZScheme,
    /// Laurent series in the annulus variable of a single disc pair.
    ZetaScheme,
    /// Union of both families.
    Hybrid,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [
        SchemeKind::ZScheme,
        SchemeKind::ZetaScheme,
        SchemeKind::Hybrid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::ZScheme => "z",
            SchemeKind::ZetaScheme => "zeta",
            SchemeKind::Hybrid => "hybrid",
        }
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "z" | "zscheme" | "z-scheme" => Ok(SchemeKind::ZScheme),
            "zeta" | "zetascheme" | "zeta-scheme" => Ok(SchemeKind::ZetaScheme),
            "hybrid" => Ok(SchemeKind::Hybrid),
            other => Err(Error::InvalidInput(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Laurent family about one disc centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaurentFamily<T> {
    pub disc_index: usize,
    pub center: Complex<T>,
    pub radius: T,
}

/// Annulus family of one disc pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairFamily<T> {
    pub frame: PairFrame<T>,
    pub map: AnnulusMap<T>,
}

impl<T: Real> PairFamily<T> {
    pub fn new(frame: PairFrame<T>) -> Result<Self> {
        let map = annulus_map(frame.half_distance, frame.radius)?;
        Ok(Self { frame, map })
    }

    /// Annulus variable of the physical point `z`.
    pub fn zeta(&self, z: Complex<T>) -> Result<Complex<T>> {
        self.map.to_annulus(self.frame.to_frame(z))
    }

    /// Physical point with annulus variable `zeta`.
    pub fn physical(&self, zeta: Complex<T>) -> Result<Complex<T>> {
        Ok(self.frame.from_frame(self.map.to_physical(zeta)?))
    }
}

/// Shape of a truncated expansion: which families are active and at what truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisLayout<T> {
    scheme: SchemeKind,
    modes: usize,
    discs: Vec<Disc<T>>,
    laurent: Vec<LaurentFamily<T>>,
    pairs: Vec<PairFamily<T>>,
}

impl<T: Real> BasisLayout<T> {
    /// Layout with explicit families. Laurent families are built for `laurent_discs`.
    pub fn new(
        scheme: SchemeKind,
        modes: usize,
        discs: Vec<Disc<T>>,
        laurent_discs: &[usize],
        pairs: Vec<PairFrame<T>>,
    ) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidInput(
                "truncation must be at least one mode".into(),
            ));
        }
        let laurent = laurent_discs
            .iter()
            .map(|&j| {
                let d = discs
                    .get(j)
                    .ok_or_else(|| Error::InvalidInput(format!("disc index {j} out of range")))?;
                Ok(LaurentFamily {
                    disc_index: j,
                    center: d.center,
                    radius: d.radius,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let pairs = pairs
            .into_iter()
            .map(PairFamily::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            scheme,
            modes,
            discs,
            laurent,
            pairs,
        })
    }

    /// Families prescribed by `scheme` for `config`.
    ///
    /// `pair_threshold` selects hybrid pair families by circle gap; `None` keeps every pair.
    /// The annulus scheme is defined for exactly two discs.
    pub fn for_scheme(
        config: &DiscConfiguration<T>,
        scheme: SchemeKind,
        modes: usize,
        pair_threshold: Option<T>,
    ) -> Result<Self> {
        let discs = config.discs().to_vec();
        let every: Vec<usize> = (0..discs.len()).collect();
        let pairs = || match pair_threshold {
            Some(t) => close_pairs(config, t),
            None => all_pairs(config),
        };
        match scheme {
            SchemeKind::ZScheme => Self::new(scheme, modes, discs, &every, Vec::new()),
            SchemeKind::ZetaScheme => {
                if discs.len() != 2 {
                    return Err(Error::UnsupportedGeometry(format!(
                        "annulus scheme needs exactly two discs, got {}",
                        discs.len()
                    )));
                }
                Self::new(scheme, modes, discs, &[], all_pairs(config)?)
            }
            SchemeKind::Hybrid => Self::new(scheme, modes, discs, &every, pairs()?),
        }
    }

    pub fn scheme(&self) -> SchemeKind {
        self.scheme
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn discs(&self) -> &[Disc<T>] {
        &self.discs
    }

    pub fn laurent_families(&self) -> &[LaurentFamily<T>] {
        &self.laurent
    }

    pub fn pair_families(&self) -> &[PairFamily<T>] {
        &self.pairs
    }

    /// Number of complex basis functions, including the constant.
    pub fn len(&self) -> usize {
        1 + self.modes * (self.laurent.len() + 2 * self.pairs.len())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Column of the first Laurent coefficient of family `f`.
    pub fn laurent_offset(&self, f: usize) -> usize {
        1 + f * self.modes
    }

    /// Column of the first positive-power coefficient of pair family `p`; the negative
    /// powers follow after `modes` columns.
    pub fn pair_offset(&self, p: usize) -> usize {
        1 + self.laurent.len() * self.modes + 2 * p * self.modes
    }

    fn check_exterior(&self, z: Complex<T>) -> Result<()> {
        let tol = T::lit(INTERIOR_TOL);
        match self.discs.iter().position(|d| d.contains_strictly(z, tol)) {
            Some(j) => Err(Error::DomainViolation(format!(
                "point {z} lies inside disc {j}"
            ))),
            None => Ok(()),
        }
    }

    /// Writes the basis row at `z` into `out` (length [`BasisLayout::len`]).
    pub fn fill_row(&self, z: Complex<T>, out: &mut [Complex<T>]) -> Result<()> {
        assert_eq!(out.len(), self.len());
        self.check_exterior(z)?;
        let n = self.modes;
        out[0] = Complex::new(T::one(), T::zero());
        for (f, fam) in self.laurent.iter().enumerate() {
            let base = (z - fam.center).inv() * fam.radius;
            let mut p = base;
            for slot in &mut out[self.laurent_offset(f)..self.laurent_offset(f) + n] {
                *slot = p;
                p = p * base;
            }
        }
        for (f, fam) in self.pairs.iter().enumerate() {
            let zeta = fam.zeta(z)?;
            let inv = re(fam.map.rho) / zeta;
            let off = self.pair_offset(f);
            let (pos, neg) = out[off..off + 2 * n].split_at_mut(n);
            let (mut p, mut q) = (zeta, inv);
            for k in 0..n {
                pos[k] = p;
                neg[k] = q;
                p = p * zeta;
                q = q * inv;
            }
        }
        Ok(())
    }

    /// Basis row at `z`; `z` inside any disc is a [`Error::DomainViolation`].
    pub fn basis_row(&self, z: Complex<T>) -> Result<Vec<Complex<T>>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.len()];
        self.fill_row(z, &mut out)?;
        Ok(out)
    }

    /// SHA-256 of the disc geometry and active families, hex encoded.
    pub fn geometry_hash(&self) -> String {
        let mut h = Sha256::new();
        let mut put = |x: T| h.update(x.to_f64().unwrap_or(f64::NAN).to_bits().to_le_bytes());
        for d in &self.discs {
            put(d.center.re);
            put(d.center.im);
            put(d.radius);
        }
        h.update(b"laurent");
        for f in &self.laurent {
            h.update((f.disc_index as u64).to_le_bytes());
        }
        h.update(b"pairs");
        for p in &self.pairs {
            h.update((p.frame.index_pair.0 as u64).to_le_bytes());
            h.update((p.frame.index_pair.1 as u64).to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn family_label(&self, column: usize) -> (String, usize) {
        let n = self.modes;
        if column == 0 {
            return ("const".into(), 0);
        }
        let c = column - 1;
        let laurent_cols = self.laurent.len() * n;
        if c < laurent_cols {
            return (
                format!("laurent.{}", self.laurent[c / n].disc_index),
                c % n + 1,
            );
        }
        let c = c - laurent_cols;
        let (i, j) = self.pairs[c / (2 * n)].frame.index_pair;
        let within = c % (2 * n);
        if within < n {
            (format!("zeta.{i}.{j}"), within + 1)
        } else {
            (format!("zinv.{i}.{j}"), within - n + 1)
        }
    }

    fn column_of(&self, family: &str, index: usize) -> Option<usize> {
        let n = self.modes;
        if family == "const" {
            return (index == 0).then_some(0);
        }
        if index == 0 || index > n {
            return None;
        }
        let mut parts = family.split('.');
        let kind = parts.next()?;
        let ids: Vec<usize> = parts.map(|p| p.parse().ok()).collect::<Option<_>>()?;
        match (kind, ids.as_slice()) {
            ("laurent", [j]) => {
                let f = self.laurent.iter().position(|l| l.disc_index == *j)?;
                Some(self.laurent_offset(f) + index - 1)
            }
            ("zeta" | "zinv", [i, j]) => {
                let p = self
                    .pairs
                    .iter()
                    .position(|p| p.frame.index_pair == (*i, *j))?;
                let shift = if kind == "zeta" { 0 } else { n };
                Some(self.pair_offset(p) + shift + index - 1)
            }
            _ => None,
        }
    }
}

/// Truncated expansion `w(z) = U0 z + C + sum coeff * basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion<T> {
    layout: BasisLayout<T>,
    u0: Complex<T>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Expansion<T> {
    pub fn zeros(layout: BasisLayout<T>, u0: Complex<T>) -> Self {
        let coeffs = vec![Complex::new(T::zero(), T::zero()); layout.len()];
        Self { layout, u0, coeffs }
    }

    pub fn from_coeffs(
        layout: BasisLayout<T>,
        u0: Complex<T>,
        coeffs: Vec<Complex<T>>,
    ) -> Result<Self> {
        if coeffs.len() != layout.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients, got {}",
                layout.len(),
                coeffs.len()
            )));
        }
        Ok(Self { layout, u0, coeffs })
    }

    pub fn layout(&self) -> &BasisLayout<T> {
        &self.layout
    }

    pub fn scheme(&self) -> SchemeKind {
        self.layout.scheme
    }

    pub fn modes(&self) -> usize {
        self.layout.modes
    }

    pub fn u0(&self) -> Complex<T> {
        self.u0
    }

    /// All coefficients in basis order; entry 0 is the additive constant.
    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    pub fn constant(&self) -> Complex<T> {
        self.coeffs[0]
    }

    /// `a_k` (`k = 1..=N`) of Laurent family `f`.
    pub fn laurent_coeffs(&self, f: usize) -> &[Complex<T>] {
        let off = self.layout.laurent_offset(f);
        &self.coeffs[off..off + self.layout.modes]
    }

    /// Positive- and negative-power coefficients of pair family `p`.
    pub fn pair_coeffs(&self, p: usize) -> (&[Complex<T>], &[Complex<T>]) {
        let off = self.layout.pair_offset(p);
        let n = self.layout.modes;
        (
            &self.coeffs[off..off + n],
            &self.coeffs[off + n..off + 2 * n],
        )
    }

    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>> {
        let row = self.layout.basis_row(z)?;
        let sum = row
            .iter()
            .zip(&self.coeffs)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (b, c)| {
                acc + b * c
            });
        Ok(self.u0 * z + sum)
    }

    /// Coefficient of `1/z` in the expansion of `w(z) - U0 z` about infinity.
    pub fn far_field_dipole(&self) -> Complex<T> {
        let mut total = Complex::new(T::zero(), T::zero());
        for (f, fam) in self.layout.laurent.iter().enumerate() {
            total = total + self.laurent_coeffs(f)[0] * fam.radius;
        }
        // zeta = -sqrt(rho) (1 + 2A/u + ...) and rho/zeta = -sqrt(rho) (1 - 2A/u + ...)
        // with u = (z - m) conj(R), so 1/u = R/z + O(z^-2)
        for (p, fam) in self.layout.pairs.iter().enumerate() {
            let (pos, neg) = self.pair_coeffs(p);
            let mut weight = -fam.map.sqrt_rho;
            let mut sum = Complex::new(T::zero(), T::zero());
            for k in 0..self.layout.modes {
                sum = sum + (pos[k] - neg[k]) * (weight * T::from_count(k + 1));
                weight = weight * (-fam.map.sqrt_rho);
            }
            total = total + sum * fam.frame.rotation * (T::lit(2.0) * fam.map.a);
        }
        total
    }

    /// `(1/2 pi i) * contour integral of (w - U0 z) dz` over `|z| = radius` by the `n`-point
    /// trapezoid rule.
    pub fn dipole_quadrature(&self, radius: T, n: usize) -> Result<Complex<T>> {
        if n < 64 {
            return Err(Error::InvalidInput(format!(
                "quadrature needs at least 64 points, got {n}"
            )));
        }
        let needed = T::lit(2.0)
            * self
                .layout
                .discs
                .iter()
                .map(|d| d.center.norm() + d.radius)
                .fold(T::zero(), T::max);
        if !(radius >= needed) {
            return Err(Error::DomainViolation(format!(
                "contour radius {radius} must be at least {needed} (twice the enclosing radius)"
            )));
        }
        let mut sum = Complex::new(T::zero(), T::zero());
        let step = T::lit(2.0) * T::PI() / T::from_count(n);
        for l in 0..n {
            let z = Complex::from_polar(radius, step * T::from_count(l));
            sum = sum + (self.eval(z)? - self.u0 * z) * z;
        }
        Ok(sum / T::from_count(n))
    }

    /// Plain-text form: header lines then one `family index re im` line per coefficient.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# hybridisc expansion");
        let _ = writeln!(out, "scheme {}", self.layout.scheme);
        let _ = writeln!(out, "modes {}", self.layout.modes);
        let _ = writeln!(out, "geometry {}", self.layout.geometry_hash());
        let _ = writeln!(out, "u0 {:e} {:e}", self.u0.re, self.u0.im);
        for (m, c) in self.coeffs.iter().enumerate() {
            let (family, index) = self.layout.family_label(m);
            let _ = writeln!(out, "{family} {index} {:e} {:e}", c.re, c.im);
        }
        out
    }

    /// Parses [`Expansion::to_text`] output against `layout`, rejecting mismatched
    /// scheme, truncation or geometry.
    pub fn from_text(layout: BasisLayout<T>, text: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidInput(msg);
        let num = |s: &str| -> Result<T> {
            let v: f64 = s.parse().map_err(|_| bad(format!("bad number '{s}'")))?;
            Ok(T::lit(v))
        };
        let mut u0 = None;
        let mut coeffs = vec![None; layout.len()];
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["scheme", s] => {
                    if s.parse::<SchemeKind>()? != layout.scheme {
                        return Err(bad(format!("scheme '{s}' does not match layout")));
                    }
                }
                ["modes", n] => {
                    if n.parse::<usize>().ok() != Some(layout.modes) {
                        return Err(bad(format!("truncation '{n}' does not match layout")));
                    }
                }
                ["geometry", h] => {
                    if *h != layout.geometry_hash() {
                        return Err(bad("geometry hash does not match layout".into()));
                    }
                }
                ["u0", a, b] => u0 = Some(Complex::new(num(a)?, num(b)?)),
                [family, index, a, b] => {
                    let index: usize = index
                        .parse()
                        .map_err(|_| bad(format!("line {}: bad index", line_no + 1)))?;
                    let col = layout.column_of(family, index).ok_or_else(|| {
                        bad(format!(
                            "line {}: unknown coefficient {family} {index}",
                            line_no + 1
                        ))
                    })?;
                    coeffs[col] = Some(Complex::new(num(a)?, num(b)?));
                }
                _ => return Err(bad(format!("line {}: unrecognised '{line}'", line_no + 1))),
            }
        }
        let u0 = u0.ok_or_else(|| bad("missing u0 line".into()))?;
        let coeffs = coeffs
            .into_iter()
            .enumerate()
            .map(|(m, c)| c.ok_or_else(|| bad(format!("missing coefficient for column {m}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_coeffs(layout, u0, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoundaryKind;
    use crate::scalar::cis;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn single_disc(s: f64) -> DiscConfiguration<f64> {
        DiscConfiguration::new(
            vec![Disc::new(C::new(0.0, 0.0), s).unwrap()],
            C::new(1.0, 0.0),
            BoundaryKind::Flow,
            0,
        )
        .unwrap()
    }

    fn random_expansion(rng: &mut ChaCha8Rng, layout: &BasisLayout<f64>) -> Expansion<f64> {
        let coeffs = (0..layout.len())
            .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let u0 = cis(rng.gen_range(-3.0..3.0));
        Expansion::from_coeffs(layout.clone(), u0, coeffs).unwrap()
    }

    #[test]
    fn z_scheme_row_by_substitution() {
        let discs = vec![
            Disc::new(C::new(1.0, 0.0), 0.5).unwrap(),
            Disc::new(C::new(-1.0, 0.0), 0.5).unwrap(),
        ];
        let config =
            DiscConfiguration::new(discs, C::new(1.0, 0.0), BoundaryKind::Flow, 0).unwrap();
        let layout = BasisLayout::for_scheme(&config, SchemeKind::ZScheme, 1, None).unwrap();
        let row = layout.basis_row(C::new(3.0, 0.0)).unwrap();
        let expect = [1.0, 0.5 / 2.0, 0.5 / 4.0];
        assert_eq!(row.len(), 3);
        for (r, e) in row.iter().zip(expect) {
            assert!((r - C::new(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn family_counts_per_scheme() {
        let config = DiscConfiguration::two_disc(1.0, 0.99, C::new(1.0, 0.0)).unwrap();
        let n = 7;
        let z = BasisLayout::for_scheme(&config, SchemeKind::ZScheme, n, None).unwrap();
        let zeta = BasisLayout::for_scheme(&config, SchemeKind::ZetaScheme, n, None).unwrap();
        let hybrid = BasisLayout::for_scheme(&config, SchemeKind::Hybrid, n, None).unwrap();
        assert_eq!(
            (z.laurent_families().len(), z.pair_families().len()),
            (2, 0)
        );
        assert_eq!(
            (zeta.laurent_families().len(), zeta.pair_families().len()),
            (0, 1)
        );
        assert_eq!(
            (
                hybrid.laurent_families().len(),
                hybrid.pair_families().len()
            ),
            (2, 1)
        );
        assert_eq!(hybrid.len(), 1 + 4 * n);
        let e = Expansion::zeros(hybrid, C::new(1.0, 0.0));
        assert_eq!(e.laurent_coeffs(1).len(), n);
        assert_eq!(e.pair_coeffs(0).1.len(), n);
        let nine = DiscConfiguration::square_array(0.2, 0.01, C::new(1.0, 0.0)).unwrap();
        assert!(matches!(
            BasisLayout::for_scheme(&nine, SchemeKind::ZetaScheme, 3, None),
            Err(Error::UnsupportedGeometry(_))
        ));
    }

    #[test]
    fn annulus_powers_have_unit_modulus_on_outer_circle() {
        let config = DiscConfiguration::two_disc(1.0, 0.99, C::new(1.0, 0.0)).unwrap();
        let layout = BasisLayout::for_scheme(&config, SchemeKind::Hybrid, 12, None).unwrap();
        let off = layout.pair_offset(0);
        for l in 0..64 {
            let z = C::new(1.0, 0.0) + cis(2.0 * std::f64::consts::PI * l as f64 / 64.0) * 0.99;
            let row = layout.basis_row(z).unwrap();
            for k in 0..12 {
                assert!((row[off + k].norm() - 1.0).abs() < 1e-11);
            }
            // on the outer circle |rho/zeta| = rho
            assert!((row[off + 12].norm() - layout.pair_families()[0].map.rho).abs() < 1e-12);
        }
    }

    #[test]
    fn entries_bounded_at_infinity() {
        let config = DiscConfiguration::two_disc(1.0, 0.9, C::new(1.0, 0.0)).unwrap();
        let layout = BasisLayout::for_scheme(&config, SchemeKind::Hybrid, 6, None).unwrap();
        let dir = cis(0.7);
        let rows: Vec<Vec<C>> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&r| layout.basis_row(dir * r).unwrap())
            .collect();
        for m in 0..layout.len() {
            assert!(rows
                .iter()
                .all(|r| r[m].norm().is_finite() && r[m].norm() <= 1.0 + 1e-12));
        }
        // Laurent columns decay monotonically
        let laurent = layout.laurent_offset(0)..layout.pair_offset(0);
        for ((a, b), c) in rows[0][laurent.clone()]
            .iter()
            .zip(&rows[1][laurent.clone()])
            .zip(&rows[2][laurent])
        {
            assert!(b.norm() <= a.norm() && c.norm() <= b.norm());
        }
        // annulus variable tends to -sqrt(rho)
        let sr = layout.pair_families()[0].map.sqrt_rho;
        assert!((rows[2][layout.pair_offset(0)] + sr).norm() < 1e-2);
    }

    #[test]
    fn interior_point_is_domain_violation() {
        let config = DiscConfiguration::two_disc(1.0, 0.5, C::new(1.0, 0.0)).unwrap();
        let layout = BasisLayout::for_scheme(&config, SchemeKind::Hybrid, 3, None).unwrap();
        assert!(matches!(
            layout.basis_row(C::new(1.1, 0.0)),
            Err(Error::DomainViolation(_))
        ));
        assert!(layout.basis_row(C::new(1.5, 0.0)).is_ok());
    }

    #[test]
    fn zero_coefficients_give_uniform_field() {
        let config = DiscConfiguration::two_disc(1.0, 0.9, C::new(1.0, 0.0)).unwrap();
        let layout = BasisLayout::for_scheme(&config, SchemeKind::Hybrid, 4, None).unwrap();
        let mut e = Expansion::zeros(layout, C::new(0.3, -0.4));
        e.coeffs_mut()[0] = C::new(2.0, 1.0);
        let z = C::new(0.2, 3.0);
        assert!((e.eval(z).unwrap() - (C::new(0.3, -0.4) * z + C::new(2.0, 1.0))).norm() < 1e-15);
        assert_eq!(e.far_field_dipole(), C::new(0.0, 0.0));
    }

    #[test]
    fn one_cylinder_flow() {
        let s = 0.7;
        let u0 = cis(0.4);
        let layout =
            BasisLayout::for_scheme(&single_disc(s), SchemeKind::ZScheme, 3, None).unwrap();
        let mut e = Expansion::zeros(layout, u0);
        e.coeffs_mut()[1] = u0.conj() * s;
        for l in 0..100 {
            let z = cis(0.0628 * l as f64) * s;
            assert!(e.eval(z).unwrap().im.abs() < 1e-14);
        }
        assert!((e.far_field_dipole() - u0.conj() * s * s).norm() < 1e-15);
        let q = e.dipole_quadrature(10.0, 256).unwrap();
        assert!((q - u0.conj() * s * s).norm() < 1e-12);
    }

    #[test]
    fn quadrature_guards() {
        let e = Expansion::zeros(
            BasisLayout::for_scheme(&single_disc(1.0), SchemeKind::ZScheme, 2, None).unwrap(),
            C::new(1.0, 0.0),
        );
        assert!(matches!(
            e.dipole_quadrature(1.5, 128),
            Err(Error::DomainViolation(_))
        ));
        assert!(matches!(
            e.dipole_quadrature(5.0, 32),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn dipole_matches_quadrature_on_random_expansions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let two = DiscConfiguration::two_disc(1.0, 0.99, C::new(1.0, 0.0)).unwrap();
        let tilted = DiscConfiguration::new(
            vec![
                Disc::new(C::new(1.0, 1.0), 0.9).unwrap(),
                Disc::new(C::new(3.0, 3.0), 0.9).unwrap(),
                Disc::new(C::new(-1.0, 2.5), 0.9).unwrap(),
            ],
            C::new(1.0, 0.0),
            BoundaryKind::Flow,
            0,
        )
        .unwrap();
        let nine = DiscConfiguration::square_array(0.2, 0.01, C::new(1.0, 0.0)).unwrap();
        let layouts = [
            BasisLayout::for_scheme(&two, SchemeKind::Hybrid, 10, None).unwrap(),
            BasisLayout::for_scheme(&two, SchemeKind::ZetaScheme, 15, None).unwrap(),
            BasisLayout::for_scheme(&tilted, SchemeKind::Hybrid, 6, None).unwrap(),
            BasisLayout::for_scheme(&nine, SchemeKind::Hybrid, 5, Some(0.05)).unwrap(),
        ];
        for trial in 0..50 {
            let layout = &layouts[trial % layouts.len()];
            let e = random_expansion(&mut rng, layout);
            let r = 2.0
                * e.layout()
                    .discs()
                    .iter()
                    .map(|d| d.center.norm() + d.radius)
                    .fold(0.0, f64::max);
            let q = e.dipole_quadrature(r, 512).unwrap();
            let a = e.far_field_dipole();
            assert!(
                (q - a).norm() <= 1e-10 * (1.0 + a.norm()),
                "trial {trial}: {a} vs {q}"
            );
        }
    }

    #[test]
    fn quadrature_converged_under_doubling() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let config = DiscConfiguration::two_disc(1.0, 0.95, C::new(1.0, 0.0)).unwrap();
        let layout = BasisLayout::for_scheme(&config, SchemeKind::Hybrid, 8, None).unwrap();
        let e = random_expansion(&mut rng, &layout);
        let a = e.dipole_quadrature(4.0, 256).unwrap();
        let b = e.dipole_quadrature(4.0, 512).unwrap();
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn text_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let config = DiscConfiguration::square_array(0.2, 0.01, C::new(1.0, 0.0)).unwrap();
        let layout = BasisLayout::for_scheme(&config, SchemeKind::Hybrid, 4, Some(0.05)).unwrap();
        let e = random_expansion(&mut rng, &layout);
        let text = e.to_text();
        assert!(text.lines().any(|l| l.starts_with("zinv.0.1 4 ")));
        let back = Expansion::from_text(layout, &text).unwrap();
        assert_eq!(back, e);

        let other = DiscConfiguration::square_array(0.2, 0.02, C::new(1.0, 0.0)).unwrap();
        let other_layout =
            BasisLayout::for_scheme(&other, SchemeKind::Hybrid, 4, Some(0.05)).unwrap();
        assert!(Expansion::from_text(other_layout, &text).is_err());
    }

    proptest! {
        #[test]
        fn eval_is_linear(seed in 0u64..1000, x in -3.0f64..3.0, y in 1.2f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let config = DiscConfiguration::two_disc(1.0, 0.9, C::new(1.0, 0.0)).unwrap();
            let layout = BasisLayout::for_scheme(&config, SchemeKind::Hybrid, 5, None).unwrap();
            let a = random_expansion(&mut rng, &layout);
            let mut b = random_expansion(&mut rng, &layout);
            b = Expansion::from_coeffs(layout.clone(), a.u0(), b.coeffs().to_vec()).unwrap();
            let sum_coeffs: Vec<C> = a.coeffs().iter().zip(b.coeffs()).map(|(p, q)| p + q).collect();
            let sum = Expansion::from_coeffs(layout, a.u0(), sum_coeffs).unwrap();
            let z = C::new(x, y);
            let lhs = sum.eval(z).unwrap();
            let rhs = a.eval(z).unwrap() + b.eval(z).unwrap() - a.u0() * z;
            prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
        }
    }
}
