//! Disc configurations, canonical pair frames and close-pair detection.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{re, Real};

/// A circular inclusion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc<T> {
    pub center: Complex<T>,
    pub radius: T,
}

impl<T: Real> Disc<T> {
    pub fn new(center: Complex<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "disc radius must be positive, got {radius}"
            )));
        }
        if !center.re.is_finite() || !center.im.is_finite() {
            return Err(Error::InvalidGeometry("disc center must be finite".into()));
        }
        Ok(Self { center, radius })
    }

    /// Distance between the two circles (negative when they overlap).
    pub fn gap_to(&self, other: &Disc<T>) -> T {
        (other.center - self.center).norm() - self.radius - other.radius
    }

    pub fn contains_strictly(&self, z: Complex<T>, rel_tol: T) -> bool {
        (z - self.center).norm() < self.radius * (T::one() - rel_tol)
    }
}

/// Which part of `w` is prescribed constant on each boundary circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    /// `Im w = gamma_j` (uniform flow past rigid cylinders).
    Flow,
    /// `Re w = gamma_j` (perfectly conducting inclusions in a uniform field).
    Electrostatic,
}

impl BoundaryKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryKind::Flow => "flow",
            BoundaryKind::Electrostatic => "electrostatic",
        }
    }
}

/// Discs plus the far-field condition `w(z) ~ far_field * z`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscConfiguration<T> {
    discs: Vec<Disc<T>>,
    far_field: Complex<T>,
    bc_kind: BoundaryKind,
    reference_index: usize,
}

impl<T: Real> DiscConfiguration<T> {
    pub fn new(
        discs: Vec<Disc<T>>,
        far_field: Complex<T>,
        bc_kind: BoundaryKind,
        reference_index: usize,
    ) -> Result<Self> {
        if discs.is_empty() {
            return Err(Error::InvalidGeometry("configuration has no discs".into()));
        }
        if reference_index >= discs.len() {
            return Err(Error::InvalidGeometry(format!(
                "reference index {reference_index} out of range for {} discs",
                discs.len()
            )));
        }
        for (i, a) in discs.iter().enumerate() {
            for (j, b) in discs.iter().enumerate().skip(i + 1) {
                if !(a.gap_to(b) > T::zero()) {
                    return Err(Error::InvalidGeometry(format!(
                        "discs {i} and {j} overlap or touch"
                    )));
                }
            }
        }
        Ok(Self {
            discs,
            far_field,
            bc_kind,
            reference_index,
        })
    }

    /// Two discs of radius `s` centred at `-d` and `+d`.
    ///
    /// The disc at `+d` (index 1) carries the zero boundary constant, matching the
    /// normalisation of the exact two-disc solution.
    pub fn two_disc(d: T, s: T, far_field: Complex<T>) -> Result<Self> {
        let discs = vec![Disc::new(re(-d), s)?, Disc::new(re(d), s)?];
        Self::new(discs, far_field, BoundaryKind::Flow, 1)
    }

    /// Square 3x3 array of equal discs with centre spacing `pitch` and circle gap `gap`
    /// between nearest neighbours; the central disc sits at the origin.
    pub fn square_array(pitch: T, gap: T, far_field: Complex<T>) -> Result<Self> {
        if !(gap > T::zero()) || !(gap < pitch) {
            return Err(Error::InvalidGeometry(format!(
                "gap {gap} must lie in (0, pitch)"
            )));
        }
        let radius = (pitch - gap) / T::lit(2.0);
        let mut discs = Vec::with_capacity(9);
        for iy in [-1i32, 0, 1] {
            for ix in [-1i32, 0, 1] {
                let c = Complex::new(pitch * T::lit(ix as f64), pitch * T::lit(iy as f64));
                discs.push(Disc::new(c, radius)?);
            }
        }
        // central disc first
        discs.swap(0, 4);
        Self::new(discs, far_field, BoundaryKind::Flow, 0)
    }

    pub fn with_bc_kind(mut self, kind: BoundaryKind) -> Self {
        self.bc_kind = kind;
        self
    }

    pub fn with_far_field(mut self, far_field: Complex<T>) -> Self {
        self.far_field = far_field;
        self
    }

    pub fn discs(&self) -> &[Disc<T>] {
        &self.discs
    }

    pub fn far_field(&self) -> Complex<T> {
        self.far_field
    }

    pub fn bc_kind(&self) -> BoundaryKind {
        self.bc_kind
    }

    pub fn reference_index(&self) -> usize {
        self.reference_index
    }

    /// Index of the disc whose closed interior contains `z` strictly, if any.
    pub fn containing_disc(&self, z: Complex<T>, rel_tol: T) -> Option<usize> {
        self.discs
            .iter()
            .position(|d| d.contains_strictly(z, rel_tol))
    }

    /// Smallest radius `R` of a centred circle enclosing every disc.
    pub fn enclosing_radius(&self) -> T {
        self.discs
            .iter()
            .map(|d| d.center.norm() + d.radius)
            .fold(T::zero(), T::max)
    }
}

/// Similarity frame that places a disc pair at `-d` and `+d` on the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairFrame<T> {
    pub index_pair: (usize, usize),
    pub midpoint: Complex<T>,
    /// Unit complex number `e^{i phi}`; frame coordinates are `(z - midpoint) / rotation`.
    pub rotation: Complex<T>,
    pub half_distance: T,
    pub radius: T,
}

impl<T: Real> PairFrame<T> {
    #[inline]
    pub fn to_frame(&self, z: Complex<T>) -> Complex<T> {
        (z - self.midpoint) * self.rotation.conj()
    }

    #[inline]
    pub fn from_frame(&self, u: Complex<T>) -> Complex<T> {
        self.midpoint + u * self.rotation
    }

    pub fn gap(&self) -> T {
        T::lit(2.0) * (self.half_distance - self.radius)
    }
}

/// Canonical frame for the pair `(a, b)`: `a.center -> -d`, `b.center -> +d`.
pub fn pair_frame<T: Real>(a: &Disc<T>, b: &Disc<T>) -> Result<PairFrame<T>> {
    let scale = a.radius.max(b.radius);
    if (a.radius - b.radius).abs() > T::lit(1e-12) * scale {
        return Err(Error::UnsupportedGeometry(format!(
            "pair maps need equal radii, got {} and {}",
            a.radius, b.radius
        )));
    }
    if !(a.gap_to(b) > T::zero()) {
        return Err(Error::InvalidGeometry("discs overlap or touch".into()));
    }
    let two = T::lit(2.0);
    let axis = b.center - a.center;
    let dist = axis.norm();
    Ok(PairFrame {
        index_pair: (0, 1),
        midpoint: (a.center + b.center) / two,
        rotation: axis / dist,
        half_distance: dist / two,
        radius: a.radius,
    })
}

/// Every unordered pair whose circle gap is below `threshold`, ordered by `(i, j)`.
pub fn close_pairs<T: Real>(
    config: &DiscConfiguration<T>,
    threshold: T,
) -> Result<Vec<PairFrame<T>>> {
    if !(threshold > T::zero()) {
        return Err(Error::InvalidInput(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    let discs = config.discs();
    let mut out = Vec::new();
    for i in 0..discs.len() {
        for j in i + 1..discs.len() {
            if discs[i].gap_to(&discs[j]) < threshold {
                let mut frame = pair_frame(&discs[i], &discs[j])?;
                frame.index_pair = (i, j);
                out.push(frame);
            }
        }
    }
    Ok(out)
}

/// Every unordered pair regardless of gap.
pub fn all_pairs<T: Real>(config: &DiscConfiguration<T>) -> Result<Vec<PairFrame<T>>> {
    close_pairs(config, T::infinity())
}
