//! Hybrid representation for many discs and the nine-disc square-array benchmark.
//!
//! Every disc carries a Laurent family about its centre. Every pair whose circle gap is
//! below the threshold also carries the annulus family of that pair, collocated only on
//! the images of the two annulus circles.

use std::time::Instant;

use num_complex::Complex;

use crate::basis::{BasisLayout, Expansion, SchemeKind};
use crate::error::{Error, Result};
use crate::geometry::DiscConfiguration;
use crate::scalar::{cis, re, Real};
use crate::solver::{
    assemble_layout, boundary_part, solve_least_squares, ModesOutcome, SolveReport,
    DEFAULT_RANK_TOL,
};

/// Centre spacing of the benchmark array.
pub const NINE_DISC_PITCH: f64 = 0.4;
/// Gap threshold selecting the twelve nearest-neighbour pairs of the benchmark array.
pub const NINE_DISC_THRESHOLD: f64 = 0.05;

/// A multi-disc problem at a fixed truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiDiscProblem<T> {
    pub config: DiscConfiguration<T>,
    /// Pairs with circle gap below this value receive an annulus family.
    pub threshold: T,
    pub modes: usize,
    pub points_per_circle: usize,
}

impl<T: Real> MultiDiscProblem<T> {
    /// Problem with the default `2 N + 10` collocation points per circle.
    pub fn new(config: DiscConfiguration<T>, threshold: T, modes: usize) -> Result<Self> {
        let problem = Self {
            config,
            threshold,
            modes,
            points_per_circle: 2 * modes + 10,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn with_points_per_circle(mut self, points: usize) -> Self {
        self.points_per_circle = points;
        self
    }

    pub fn with_modes(mut self, modes: usize) -> Self {
        self.modes = modes;
        self.points_per_circle = 2 * modes + 10;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "pair threshold must be positive, got {}",
                self.threshold
            )));
        }
        if self.modes == 0 {
            return Err(Error::InvalidInput("need at least one mode".into()));
        }
        Ok(())
    }

    pub fn layout(&self) -> Result<BasisLayout<T>> {
        self.validate()?;
        BasisLayout::for_scheme(
            &self.config,
            SchemeKind::Hybrid,
            self.modes,
            Some(self.threshold),
        )
    }
}

/// Zero expansion in the hybrid basis of `problem`.
pub fn build_representation<T: Real>(problem: &MultiDiscProblem<T>) -> Result<Expansion<T>> {
    Ok(Expansion::zeros(
        problem.layout()?,
        problem.config.far_field(),
    ))
}

/// Collocates and solves `problem` in the least-squares sense.
pub fn solve_multidisc<T: Real>(problem: &MultiDiscProblem<T>) -> Result<SolveReport<T>> {
    let start = Instant::now();
    let system = assemble_layout(
        &problem.config,
        problem.layout()?,
        problem.points_per_circle,
    )?;
    let mut report = solve_least_squares(&system, T::lit(DEFAULT_RANK_TOL))?;
    report.wall_time = start.elapsed();
    Ok(report)
}

/// Maximum of `|Im w - gamma_j|` (or `Re w` for electrostatics) over `n_test` equispaced
/// points on every circle, offset by half a step from the collocation grid.
pub fn boundary_residual<T: Real>(report: &SolveReport<T>, n_test: usize) -> Result<T> {
    if n_test == 0 {
        return Err(Error::InvalidInput("need at least one test point".into()));
    }
    let kind = report.config.bc_kind();
    let step = T::lit(2.0) * T::PI() / T::from_count(n_test);
    let mut worst = T::zero();
    for (j, disc) in report.config.discs().iter().enumerate() {
        for l in 0..n_test {
            let angle = step * (T::from_count(l) + T::lit(0.5));
            let z = disc.center + cis(angle) * disc.radius;
            let w = report.expansion.eval(z)?;
            let err = (boundary_part(kind, w) - report.gammas[j]).abs();
            if !err.is_finite() {
                return Ok(T::infinity());
            }
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

/// The 3x3 benchmark array with circle gap `gap` between nearest neighbours and unit
/// far field along `x`.
pub fn nine_disc_config<T: Real>(gap: T) -> Result<DiscConfiguration<T>> {
    DiscConfiguration::square_array(T::lit(NINE_DISC_PITCH), gap, re(T::one()))
}

/// Benchmark problem at truncation `modes`.
pub fn nine_disc_benchmark<T: Real>(gap: T, modes: usize) -> Result<MultiDiscProblem<T>> {
    MultiDiscProblem::new(nine_disc_config(gap)?, T::lit(NINE_DISC_THRESHOLD), modes)
}

/// One row of a modes-versus-separation table.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationRow<T> {
    pub separation: T,
    /// `Reached` carries the change of the dipole to the next grid truncation.
    pub outcome: ModesOutcome<T>,
    /// Dipole at the reported truncation, or at the largest one tried.
    pub dipole: Complex<T>,
}

/// Smallest truncation on `grid` whose far-field dipole changes by at most `target` when
/// moving to the next grid entry, for every separation in `separations`.
///
/// `make(separation, modes)` builds the problem. Separations must be strictly decreasing.
pub fn modes_vs_separation<T, F>(
    make: F,
    target: T,
    separations: &[T],
    grid: &[usize],
) -> Result<Vec<SeparationRow<T>>>
where
    T: Real,
    F: Fn(T, usize) -> Result<MultiDiscProblem<T>>,
{
    if separations.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidInput(
            "separations must be strictly decreasing".into(),
        ));
    }
    separations
        .iter()
        .map(|&sep| {
            converge_dipole(|n| make(sep, n), target, grid).map(|(outcome, dipole)| SeparationRow {
                separation: sep,
                outcome,
                dipole,
            })
        })
        .collect()
}

/// Scans `grid` until the dipole is stable to `target` under one grid step.
pub fn converge_dipole<T, F>(
    make: F,
    target: T,
    grid: &[usize],
) -> Result<(ModesOutcome<T>, Complex<T>)>
where
    T: Real,
    F: Fn(usize) -> Result<MultiDiscProblem<T>>,
{
    if !(target > T::zero()) {
        return Err(Error::InvalidInput(format!(
            "target must be positive, got {target}"
        )));
    }
    if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "mode grid needs at least two ascending entries".into(),
        ));
    }
    let mut prev: Option<(usize, Complex<T>)> = None;
    let mut best = T::infinity();
    for &n in grid {
        let dipole = solve_multidisc(&make(n)?)?.expansion.far_field_dipole();
        if let Some((m, p)) = prev {
            let change = (dipole - p).norm();
            if change <= target {
                return Ok((
                    ModesOutcome::Reached {
                        modes: m,
                        error: change,
                    },
                    p,
                ));
            }
            best = best.min(change);
        }
        prev = Some((n, dipole));
    }
    let last = prev.map(|(_, p)| p).unwrap_or_default();
    Ok((ModesOutcome::NotReached { best_error: best }, last))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoundaryKind, Disc};

    #[test]
    fn single_disc_has_no_pairs() {
        let config = DiscConfiguration::new(
            vec![Disc::new(Complex::new(0.0, 0.0), 1.0).unwrap()],
            re(1.0),
            BoundaryKind::Flow,
            0,
        )
        .unwrap();
        let exp = build_representation(&MultiDiscProblem::new(config, 0.1, 6).unwrap()).unwrap();
        assert_eq!(exp.layout().laurent_families().len(), 1);
        assert!(exp.layout().pair_families().is_empty());
    }

    #[test]
    fn single_disc_matches_circle_theorem() {
        // w = U0 z + conj(U0) a^2 / z
        let u0 = Complex::new(0.6, 0.8);
        let config = DiscConfiguration::new(
            vec![Disc::new(Complex::new(0.0, 0.0), 0.5).unwrap()],
            u0,
            BoundaryKind::Flow,
            0,
        )
        .unwrap();
        let report = solve_multidisc(&MultiDiscProblem::new(config, 0.1, 4).unwrap()).unwrap();
        let expected = u0.conj() * 0.25;
        assert!((report.expansion.far_field_dipole() - expected).norm() < 1e-12);
    }

    #[test]
    fn nine_disc_layout_counts() {
        let exp = build_representation(&nine_disc_benchmark(1e-3, 5).unwrap()).unwrap();
        assert_eq!(exp.layout().laurent_families().len(), 9);
        assert_eq!(exp.layout().pair_families().len(), 12);
    }

    #[test]
    fn two_close_discs_reduce_to_two_disc_hybrid() {
        let config = DiscConfiguration::two_disc(1.0, 0.99, re(1.0)).unwrap();
        let a = MultiDiscProblem::new(config.clone(), 0.1, 10)
            .unwrap()
            .layout()
            .unwrap();
        let b = BasisLayout::for_scheme(&config, SchemeKind::Hybrid, 10, None).unwrap();
        assert_eq!(a.len(), b.len());
        assert_eq!(a.geometry_hash(), b.geometry_hash());
    }

    #[test]
    fn invalid_problems_rejected() {
        let config = nine_disc_config(1e-2).unwrap();
        assert!(matches!(
            MultiDiscProblem::new(config.clone(), 0.0, 5),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            MultiDiscProblem::new(config, 0.05, 0),
            Err(Error::InvalidInput(_))
        ));
        let bad = modes_vs_separation(nine_disc_benchmark, 1e-4, &[1e-3, 1e-2], &[5, 10]);
        assert!(matches!(bad, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn nine_disc_dipole_real_and_consistent() {
        let report = solve_multidisc(&nine_disc_benchmark(1e-2f64, 5).unwrap()).unwrap();
        let dipole = report.expansion.far_field_dipole();
        assert!(dipole.im.abs() < 1e-8, "{dipole}");
        let quad = report
            .expansion
            .dipole_quadrature(2.0 * report.config.enclosing_radius(), 1024)
            .unwrap();
        assert!((dipole - quad).norm() < 1e-8);
        assert!((dipole.norm() - 0.39194).abs() < 1e-4, "{dipole}");
    }

    #[test]
    fn boundary_residual_is_small() {
        let report = solve_multidisc(&nine_disc_benchmark(1e-2f64, 10).unwrap()).unwrap();
        let res = boundary_residual(&report, 1024).unwrap();
        assert!(
            res <= 10.0 * report.residual_norm,
            "{res} vs {}",
            report.residual_norm
        );
    }

    #[test]
    fn distant_pairs_do_not_matter() {
        let base = nine_disc_benchmark(1e-2f64, 10).unwrap();
        let mut wide = base.clone();
        wide.threshold = 0.25;
        assert_eq!(wide.layout().unwrap().pair_families().len(), 20);
        let p0 = solve_multidisc(&base).unwrap().expansion.far_field_dipole();
        let p1 = solve_multidisc(&wide).unwrap().expansion.far_field_dipole();
        assert!((p0 - p1).norm() < 1e-4, "{p0} vs {p1}");
    }

    #[test]
    fn well_separated_array_converges_quickly() {
        let make = |sep: f64, n| {
            MultiDiscProblem::new(DiscConfiguration::square_array(0.4, sep, re(1.0))?, 0.05, n)
        };
        let rows = modes_vs_separation(make, 1e-6, &[0.3, 0.25], &[5, 10, 15, 20]).unwrap();
        for row in rows {
            assert!(row.outcome.modes().is_some_and(|n| n <= 10), "{row:?}");
        }
    }
}
