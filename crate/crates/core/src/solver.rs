//! Collocation, least-squares solution and error metrics.
//!
//! Real unknowns are ordered as follows. Column 0 is the free part of the additive
//! constant (`Im C` for flow, `Re C` for electrostatics; the other part is pinned to
//! zero). Each remaining complex coefficient `phi = x + iy` contributes the columns `x`
//! and `y` in basis order. The boundary constants `gamma_j` of every non-reference disc
//! come last, in disc order.

use std::time::{Duration, Instant};

use num_complex::Complex;

use crate::basis::{BasisLayout, Expansion, SchemeKind};
use crate::conformal::annulus_map;
use crate::error::{Error, Result};
use crate::geometry::{pair_frame, BoundaryKind, DiscConfiguration, PairFrame};
use crate::lstsq::{solve_min_norm, DenseMatrix};
use crate::scalar::{cis, imag_unit, re, Real};
use crate::special::{ExactSolution, KEvalSettings};

/// Default relative rank cut-off of the least-squares factorisation.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

/// Default number of test points per circle for [`boundary_error`].
pub const DEFAULT_TEST_POINTS: usize = 2048;

/// How a collocation point was generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointSource {
    /// Equispaced in the angle about the disc centre.
    Physical,
    /// Image of an equispaced point on an annulus circle of pair family `pair`.
    Annulus { pair: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollocationPoint<T> {
    pub z: Complex<T>,
    /// Index of the disc whose boundary carries the point.
    pub circle: usize,
    /// Generating angle (about the disc centre, or on the annulus circle).
    pub angle: T,
    pub source: PointSource,
}

/// Collocation points of `layout`: equispaced points on every physical circle unless the
/// layout is a pure annulus scheme, plus the images of equispaced points on both annulus
/// circles of every pair family.
pub fn collocation_points_for_layout<T: Real>(
    layout: &BasisLayout<T>,
    per_circle: usize,
) -> Result<Vec<CollocationPoint<T>>> {
    let n = layout.modes();
    if per_circle < 2 * n + 2 {
        return Err(Error::UnderdeterminedSystem(format!(
            "{per_circle} points per circle cannot determine {n} modes (need at least {})",
            2 * n + 2
        )));
    }
    let step = T::lit(2.0) * T::PI() / T::from_count(per_circle);
    let mut points = Vec::new();
    if layout.scheme() != SchemeKind::ZetaScheme {
        for (j, disc) in layout.discs().iter().enumerate() {
            for l in 0..per_circle {
                let angle = step * T::from_count(l);
                points.push(CollocationPoint {
                    z: disc.center + cis(angle) * disc.radius,
                    circle: j,
                    angle,
                    source: PointSource::Physical,
                });
            }
        }
    }
    for (p, fam) in layout.pair_families().iter().enumerate() {
        let (inner, outer) = fam.frame.index_pair;
        for (circle, radius) in [(outer, T::one()), (inner, fam.map.rho)] {
            let disc = layout.discs()[circle];
            for l in 0..per_circle {
                let angle = step * T::from_count(l);
                let u = fam.map.to_physical(cis(angle) * radius)?;
                // project onto the circle to remove rounding drift of the Möbius map
                let off = fam.frame.from_frame(u) - disc.center;
                let z = disc.center + off * (disc.radius / off.norm());
                points.push(CollocationPoint {
                    z,
                    circle,
                    angle,
                    source: PointSource::Annulus { pair: p },
                });
            }
        }
    }
    Ok(points)
}

/// Collocation points of `scheme` for `config` with `per_circle` points per circle.
pub fn collocation_points<T: Real>(
    config: &DiscConfiguration<T>,
    scheme: SchemeKind,
    modes: usize,
    per_circle: usize,
) -> Result<Vec<CollocationPoint<T>>> {
    let layout = BasisLayout::for_scheme(config, scheme, modes, None)?;
    collocation_points_for_layout(&layout, per_circle)
}

/// Overdetermined real system for the boundary conditions.
#[derive(Debug, Clone)]
pub struct CollocationSystem<T> {
    pub matrix: DenseMatrix<T>,
    pub rhs: Vec<T>,
    pub points: Vec<CollocationPoint<T>>,
    pub layout: BasisLayout<T>,
    pub config: DiscConfiguration<T>,
}

impl<T: Real> CollocationSystem<T> {
    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// Column of the boundary constant of `disc`, if it is an unknown.
    pub fn gamma_column(&self, disc: usize) -> Option<usize> {
        gamma_column(&self.layout, self.config.reference_index(), disc)
    }

    /// Packs an expansion and per-disc boundary constants into the unknown vector.
    pub fn pack(&self, expansion: &Expansion<T>, gammas: &[T]) -> Vec<T> {
        let mut x = vec![T::zero(); self.cols()];
        let c = expansion.coeffs();
        x[0] = match self.config.bc_kind() {
            BoundaryKind::Flow => c[0].im,
            BoundaryKind::Electrostatic => c[0].re,
        };
        for m in 1..c.len() {
            x[2 * m - 1] = c[m].re;
            x[2 * m] = c[m].im;
        }
        for (j, &g) in gammas.iter().enumerate() {
            if let Some(col) = self.gamma_column(j) {
                x[col] = g;
            }
        }
        x
    }

    /// Inverse of [`CollocationSystem::pack`].
    pub fn unpack(&self, x: &[T]) -> (Expansion<T>, Vec<T>) {
        let len = self.layout.len();
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); len];
        coeffs[0] = match self.config.bc_kind() {
            BoundaryKind::Flow => Complex::new(T::zero(), x[0]),
            BoundaryKind::Electrostatic => Complex::new(x[0], T::zero()),
        };
        for m in 1..len {
            coeffs[m] = Complex::new(x[2 * m - 1], x[2 * m]);
        }
        let gammas = (0..self.config.discs().len())
            .map(|j| self.gamma_column(j).map_or(T::zero(), |col| x[col]))
            .collect();
        let expansion =
            Expansion::from_coeffs(self.layout.clone(), self.config.far_field(), coeffs)
                .expect("layout length matches");
        (expansion, gammas)
    }
}

fn gamma_column<T: Real>(layout: &BasisLayout<T>, reference: usize, disc: usize) -> Option<usize> {
    if disc == reference || disc >= layout.discs().len() {
        return None;
    }
    let base = 2 * layout.len() - 1;
    Some(base + if disc > reference { disc - 1 } else { disc })
}

/// The boundary functional: `Im` for flow, `Re` for electrostatics.
#[inline]
pub(crate) fn boundary_part<T: Real>(kind: BoundaryKind, w: Complex<T>) -> T {
    match kind {
        BoundaryKind::Flow => w.im,
        BoundaryKind::Electrostatic => w.re,
    }
}

/// Assembles the system for an explicit layout and point set.
pub fn assemble_with_points<T: Real>(
    config: &DiscConfiguration<T>,
    layout: BasisLayout<T>,
    points: Vec<CollocationPoint<T>>,
) -> Result<CollocationSystem<T>> {
    if layout.discs() != config.discs() {
        return Err(Error::InvalidInput(
            "layout was built for a different configuration".into(),
        ));
    }
    let kind = config.bc_kind();
    let len = layout.len();
    let cols = 2 * len - 1 + config.discs().len() - 1;
    let rows = points.len();
    if rows < cols {
        return Err(Error::UnderdeterminedSystem(format!(
            "{rows} conditions for {cols} unknowns"
        )));
    }
    let u0 = config.far_field();
    let mut matrix = DenseMatrix::zeros(rows, cols);
    let mut rhs = Vec::with_capacity(rows);
    let mut row = vec![Complex::new(T::zero(), T::zero()); len];
    for (r, pt) in points.iter().enumerate() {
        layout.fill_row(pt.z, &mut row)?;
        // constant column: Im(i y) = y for flow, Re(x) = x for electrostatics
        matrix[(r, 0)] = T::one();
        for m in 1..len {
            let b = row[m];
            let (cx, cy) = match kind {
                BoundaryKind::Flow => (b.im, b.re),
                BoundaryKind::Electrostatic => (b.re, -b.im),
            };
            matrix[(r, 2 * m - 1)] = cx;
            matrix[(r, 2 * m)] = cy;
        }
        if let Some(col) = gamma_column(&layout, config.reference_index(), pt.circle) {
            matrix[(r, col)] = -T::one();
        }
        rhs.push(-boundary_part(kind, u0 * pt.z));
    }
    if !matrix.is_finite() || rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::DomainViolation(
            "non-finite entry in collocation system".into(),
        ));
    }
    Ok(CollocationSystem {
        matrix,
        rhs,
        points,
        layout,
        config: config.clone(),
    })
}

/// Assembles the system for `layout` with the standard point rule.
pub fn assemble_layout<T: Real>(
    config: &DiscConfiguration<T>,
    layout: BasisLayout<T>,
    per_circle: usize,
) -> Result<CollocationSystem<T>> {
    let points = collocation_points_for_layout(&layout, per_circle)?;
    assemble_with_points(config, layout, points)
}

/// Assembles the system of `scheme` at truncation `modes` with `per_circle` points per
/// circle. Hybrid layouts include every disc pair.
pub fn assemble<T: Real>(
    config: &DiscConfiguration<T>,
    scheme: SchemeKind,
    modes: usize,
    per_circle: usize,
) -> Result<CollocationSystem<T>> {
    let layout = BasisLayout::for_scheme(config, scheme, modes, None)?;
    assemble_layout(config, layout, per_circle)
}

/// Outcome of a least-squares solve.
#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub expansion: Expansion<T>,
    /// Boundary constant of every disc; the reference disc's entry is exactly zero.
    pub gammas: Vec<T>,
    /// `||A x - b||_2` recomputed from the assembled system.
    pub residual_norm: T,
    pub rank_estimate: usize,
    pub unknowns: usize,
    pub equations: usize,
    /// Filled by [`boundary_error`] when an exact solution is available.
    pub max_boundary_error: Option<T>,
    pub wall_time: Duration,
    pub config: DiscConfiguration<T>,
}

/// Minimum-norm least-squares solution of `system`, discarding directions below
/// `rank_tol` relative to the dominant one.
pub fn solve_least_squares<T: Real>(
    system: &CollocationSystem<T>,
    rank_tol: T,
) -> Result<SolveReport<T>> {
    let start = Instant::now();
    let sol = solve_min_norm(system.matrix.clone(), &system.rhs, rank_tol)?;
    let ax = system.matrix.mul_vec(&sol.x);
    let residual_norm = ax
        .iter()
        .zip(&system.rhs)
        .fold(T::zero(), |acc, (p, q)| acc + (*p - *q) * (*p - *q))
        .sqrt();
    let (expansion, gammas) = system.unpack(&sol.x);
    Ok(SolveReport {
        expansion,
        gammas,
        residual_norm,
        rank_estimate: sol.rank,
        unknowns: system.cols(),
        equations: system.rows(),
        max_boundary_error: None,
        wall_time: start.elapsed(),
        config: system.config.clone(),
    })
}

/// Assembles and solves `scheme` with the default `4 N` points per circle.
pub fn solve_scheme<T: Real>(
    config: &DiscConfiguration<T>,
    scheme: SchemeKind,
    modes: usize,
) -> Result<SolveReport<T>> {
    let start = Instant::now();
    let system = assemble(config, scheme, modes, 4 * modes)?;
    let mut report = solve_least_squares(&system, T::lit(DEFAULT_RANK_TOL))?;
    report.wall_time = start.elapsed();
    Ok(report)
}

/// Canonical frame of a two-disc configuration.
fn two_disc_frame<T: Real>(config: &DiscConfiguration<T>) -> Result<PairFrame<T>> {
    let discs = config.discs();
    if discs.len() != 2 {
        return Err(Error::UnsupportedGeometry(format!(
            "the exact solution needs exactly two discs, got {}",
            discs.len()
        )));
    }
    pair_frame(&discs[0], &discs[1])
}

/// Exact solution matching a two-disc configuration.
///
/// It is expressed in the canonical frame of the pair. For electrostatic boundary
/// conditions the flow solution with far field `i E0` is used, since `Re w` constant is
/// `Im(i w)` constant.
pub fn exact_solution_for<T: Real>(
    config: &DiscConfiguration<T>,
    settings: KEvalSettings<T>,
) -> Result<ExactSolution<T>> {
    let frame = two_disc_frame(config)?;
    let map = annulus_map(frame.half_distance, frame.radius)?;
    let u0 = frame_far_field(config, &frame);
    ExactSolution::new(map, u0, settings)
}

fn frame_far_field<T: Real>(config: &DiscConfiguration<T>, frame: &PairFrame<T>) -> Complex<T> {
    let u = config.far_field() * frame.rotation;
    match config.bc_kind() {
        BoundaryKind::Flow => u,
        BoundaryKind::Electrostatic => u * imag_unit(),
    }
}

/// Exact potential of a two-disc configuration at a physical point, up to an additive
/// constant.
pub fn exact_potential<T: Real>(
    config: &DiscConfiguration<T>,
    exact: &ExactSolution<T>,
    z: Complex<T>,
) -> Result<Complex<T>> {
    let frame = two_disc_frame(config)?;
    let w = exact.w_at(frame.to_frame(z))?;
    Ok(match config.bc_kind() {
        BoundaryKind::Flow => w,
        BoundaryKind::Electrostatic => -w * imag_unit(),
    })
}

/// Maximum of `|w_num - w_exact|` over `n_test` equispaced points on each circle, after
/// aligning the additive constants at the preimage of `zeta = -1`.
pub fn boundary_error<T: Real>(
    report: &SolveReport<T>,
    exact: &ExactSolution<T>,
    n_test: usize,
) -> Result<T> {
    let config = &report.config;
    let frame = two_disc_frame(config)?;
    let tol = T::lit(1e-12);
    let rel = |a: T, b: T| (a - b).abs() <= tol * b.abs().max(T::one());
    if !rel(exact.map.d, frame.half_distance) || !rel(exact.map.s, frame.radius) {
        return Err(Error::InvalidInput(
            "exact solution geometry does not match the report".into(),
        ));
    }
    let expected = frame_far_field(config, &frame);
    if (exact.u0 - expected).norm() > tol * (T::one() + expected.norm()) {
        return Err(Error::InvalidInput(
            "exact solution far field does not match the report".into(),
        ));
    }
    if n_test == 0 {
        return Err(Error::InvalidInput("need at least one test point".into()));
    }
    let z_ref = frame.from_frame(exact.map.to_physical(re(-T::one()))?);
    let shift = report.expansion.eval(z_ref)? - exact_potential(config, exact, z_ref)?;
    let step = T::lit(2.0) * T::PI() / T::from_count(n_test);
    let mut worst = T::zero();
    for disc in config.discs() {
        for l in 0..n_test {
            let z = disc.center + cis(step * T::from_count(l)) * disc.radius;
            let err =
                (report.expansion.eval(z)? - shift - exact_potential(config, exact, z)?).norm();
            if !err.is_finite() {
                return Ok(T::infinity());
            }
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

/// Solves `scheme` at `modes` and fills in the boundary error against `exact`.
pub fn solve_and_measure<T: Real>(
    config: &DiscConfiguration<T>,
    exact: &ExactSolution<T>,
    scheme: SchemeKind,
    modes: usize,
) -> Result<SolveReport<T>> {
    let mut report = solve_scheme(config, scheme, modes)?;
    report.max_boundary_error = Some(boundary_error(&report, exact, DEFAULT_TEST_POINTS)?);
    Ok(report)
}

/// Result of a truncation scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModesOutcome<T> {
    Reached { modes: usize, error: T },
    NotReached { best_error: T },
}

impl<T: Copy> ModesOutcome<T> {
    pub fn modes(&self) -> Option<usize> {
        match self {
            ModesOutcome::Reached { modes, .. } => Some(*modes),
            ModesOutcome::NotReached { .. } => None,
        }
    }
}

/// Truncation grid `step, 2 step, ...` up to `n_max`.
pub fn mode_grid(step: usize, n_max: usize) -> Vec<usize> {
    (1..)
        .map(|k| k * step)
        .take_while(|&n| n <= n_max)
        .collect()
}

/// Smallest `N` on the grid `5, 10, ..., n_max` whose boundary error is at most `target`.
pub fn modes_for_accuracy<T: Real>(
    config: &DiscConfiguration<T>,
    scheme: SchemeKind,
    target: T,
    n_max: usize,
) -> Result<ModesOutcome<T>> {
    modes_for_accuracy_on(config, scheme, target, &mode_grid(5, n_max))
}

/// Like [`modes_for_accuracy`] over an explicit ascending grid.
pub fn modes_for_accuracy_on<T: Real>(
    config: &DiscConfiguration<T>,
    scheme: SchemeKind,
    target: T,
    grid: &[usize],
) -> Result<ModesOutcome<T>> {
    if !(target > T::zero()) {
        return Err(Error::InvalidInput(format!(
            "target accuracy must be positive, got {target}"
        )));
    }
    let exact = exact_solution_for(config, KEvalSettings::default())?;
    let mut best = T::infinity();
    for &n in grid {
        let report = solve_and_measure(config, &exact, scheme, n)?;
        let err = report.max_boundary_error.unwrap_or(T::infinity());
        if err <= target {
            return Ok(ModesOutcome::Reached {
                modes: n,
                error: err,
            });
        }
        best = best.min(err);
    }
    Ok(ModesOutcome::NotReached { best_error: best })
}
