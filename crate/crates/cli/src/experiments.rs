//! Experiment drivers. Sweep cells run on the current rayon pool; rows keep input order.

use std::fmt::Write as _;

use hybridisc::diagnostics::{decay_profile, hybrid_split_w21, single_basis_coeffs, CutoffSpec};
use hybridisc::multidisc::{
    converge_dipole, nine_disc_benchmark, solve_multidisc, MultiDiscProblem,
};
use hybridisc::solver::{
    exact_potential, exact_solution_for, modes_for_accuracy_on, solve_and_measure, ModesOutcome,
};
use hybridisc::special::omega_coeffs;
use hybridisc::{
    annulus_map, Complex64, DiscConfiguration64, ExactSolution64, KEvalSettings, SchemeKind,
    SolveReport64,
};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentKind, Layout};
use crate::error::CliError;

/// CSV table plus the solve reports backing its rows.
#[derive(Debug, Default)]
pub struct Outcome {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// `(label, report text)` for every solve that produced a row.
    pub reports: Vec<(String, String)>,
}

impl Outcome {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Scientific notation with 15 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    match config.experiment.kind {
        ExperimentKind::TwoDiscError => two_disc_error(config),
        ExperimentKind::ModesVsSeparation => match config.geometry.layout {
            Layout::TwoDisc => modes_vs_separation_two_disc(config),
            Layout::NineDisc => modes_vs_separation_nine_disc(config),
        },
        ExperimentKind::NineDiscDipole => nine_disc_dipole(config),
        ExperimentKind::ExactEval => exact_eval(config),
        ExperimentKind::DecayDiagnostics => decay_diagnostics(config),
    }
}

pub fn report_text(report: &SolveReport64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# solve report");
    let _ = writeln!(out, "unknowns {}", report.unknowns);
    let _ = writeln!(out, "equations {}", report.equations);
    let _ = writeln!(out, "rank {}", report.rank_estimate);
    let _ = writeln!(out, "residual_norm {}", num(report.residual_norm));
    if let Some(err) = report.max_boundary_error {
        let _ = writeln!(out, "max_boundary_error {}", num(err));
    }
    let gammas: Vec<String> = report.gammas.iter().map(|&g| num(g)).collect();
    let _ = writeln!(out, "gammas {}", gammas.join(" "));
    let p = report.expansion.far_field_dipole();
    let _ = writeln!(out, "dipole {} {}", num(p.re), num(p.im));
    out.push_str(&report.expansion.to_text());
    out
}

fn two_disc_config(config: &ExperimentConfig, s: f64) -> Result<DiscConfiguration64, CliError> {
    let base = DiscConfiguration64::two_disc(config.geometry.d, s, config.far_field()?)?;
    Ok(base.with_bc_kind(config.bc_kind()?))
}

fn exact_for(geometry: &DiscConfiguration64) -> Result<ExactSolution64, CliError> {
    Ok(exact_solution_for(geometry, KEvalSettings::default())?)
}

fn two_disc_error(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let geometry = two_disc_config(config, config.radius()?)?;
    let exact = exact_for(&geometry)?;
    let cells: Vec<(SchemeKind, usize)> = config
        .schemes()?
        .into_iter()
        .flat_map(|s| config.sweep.modes.iter().map(move |&n| (s, n)))
        .collect();
    let results: Vec<Result<SolveReport64, CliError>> = cells
        .par_iter()
        .map(|&(scheme, n)| Ok(solve_and_measure(&geometry, &exact, scheme, n)?))
        .collect();
    let mut out = Outcome {
        header: vec!["scheme", "N", "max_error"],
        ..Default::default()
    };
    for ((scheme, n), result) in cells.into_iter().zip(results) {
        let report = result?;
        let err = report.max_boundary_error.unwrap_or(f64::INFINITY);
        out.rows
            .push(vec![scheme.name().into(), n.to_string(), num(err)]);
        out.reports
            .push((format!("{}_N{n}", scheme.name()), report_text(&report)));
    }
    Ok(out)
}

fn modes_column(outcome: &ModesOutcome<f64>) -> (String, f64, bool) {
    match *outcome {
        ModesOutcome::Reached { modes, error } => (modes.to_string(), error, true),
        ModesOutcome::NotReached { best_error } => ("NA".into(), best_error, false),
    }
}

/// Scan outcome plus the solve at the reported truncation.
type ScanRow = (ModesOutcome<f64>, Option<SolveReport64>);

fn modes_vs_separation_two_disc(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let target = config.target()?;
    let d = config.geometry.d;
    let grid = &config.sweep.modes;
    let results: Vec<Result<ScanRow, CliError>> = config
        .sweep
        .separations
        .par_iter()
        .map(|&gap| {
            let geometry = two_disc_config(config, d - gap / 2.0)?;
            let outcome = modes_for_accuracy_on(&geometry, SchemeKind::Hybrid, target, grid)?;
            let report = match outcome.modes() {
                Some(n) => Some(solve_and_measure(
                    &geometry,
                    &exact_for(&geometry)?,
                    SchemeKind::Hybrid,
                    n,
                )?),
                None => None,
            };
            Ok((outcome, report))
        })
        .collect();
    let mut out = Outcome {
        header: vec!["separation", "modes", "max_error", "reached"],
        ..Default::default()
    };
    for (&gap, result) in config.sweep.separations.iter().zip(results) {
        let (outcome, report) = result?;
        let (modes, err, reached) = modes_column(&outcome);
        out.rows
            .push(vec![num(gap), modes.clone(), num(err), reached.to_string()]);
        if let Some(report) = report {
            out.reports
                .push((format!("sep{gap:e}_N{modes}"), report_text(&report)));
        }
    }
    Ok(out)
}

/// Benchmark array builder with the configured far field and boundary condition.
fn nine_disc_maker(
    config: &ExperimentConfig,
) -> Result<impl Fn(f64, usize) -> hybridisc::Result<MultiDiscProblem<f64>> + Sync, CliError> {
    let u0 = config.far_field()?;
    let bc = config.bc_kind()?;
    Ok(move |gap, modes| {
        nine_disc_benchmark(gap, modes).map(|mut p| {
            p.config = p.config.with_far_field(u0).with_bc_kind(bc);
            p
        })
    })
}

fn modes_vs_separation_nine_disc(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let target = config.target()?;
    let grid = &config.sweep.modes;
    let make = nine_disc_maker(config)?;
    let results: Vec<Result<(ModesOutcome<f64>, SolveReport64), CliError>> = config
        .sweep
        .separations
        .par_iter()
        .map(|&gap| {
            let (outcome, _) = converge_dipole(|n| make(gap, n), target, grid)?;
            let modes = outcome.modes().or(grid.last().copied()).unwrap_or(1);
            Ok((outcome, solve_multidisc(&make(gap, modes)?)?))
        })
        .collect();
    let mut out = Outcome {
        header: vec!["separation", "modes", "dipole_change", "reached"],
        ..Default::default()
    };
    for (&gap, result) in config.sweep.separations.iter().zip(results) {
        let (outcome, report) = result?;
        let (modes, change, reached) = modes_column(&outcome);
        out.reports.push((
            format!("sep{gap:e}_N{}", report.expansion.modes()),
            report_text(&report),
        ));
        out.rows
            .push(vec![num(gap), modes, num(change), reached.to_string()]);
    }
    Ok(out)
}

fn nine_disc_dipole(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let seps = &config.sweep.separations;
    let per_separation = config.sweep.modes.len() == seps.len();
    let make = nine_disc_maker(config)?;
    let results: Vec<Result<(usize, SolveReport64), CliError>> = seps
        .par_iter()
        .enumerate()
        .map(|(i, &gap)| {
            let modes = if per_separation {
                config.sweep.modes[i]
            } else {
                let grid = &config.sweep.modes;
                let (outcome, _) = converge_dipole(|n| make(gap, n), config.target()?, grid)?;
                let largest = grid.last().copied().unwrap_or(0);
                outcome
                    .modes()
                    .ok_or(hybridisc::Error::ConvergenceFailure { terms: largest })?
            };
            Ok((modes, solve_multidisc(&make(gap, modes)?)?))
        })
        .collect();
    let mut out = Outcome {
        header: vec![
            "separation",
            "dipole_magnitude",
            "modes",
            "dipole_re",
            "dipole_im",
        ],
        ..Default::default()
    };
    for (&gap, result) in seps.iter().zip(results) {
        let (modes, report) = result?;
        let p = report.expansion.far_field_dipole();
        out.rows.push(vec![
            num(gap),
            num(p.norm()),
            modes.to_string(),
            num(p.re),
            num(p.im),
        ]);
        out.reports
            .push((format!("sep{gap:e}_N{modes}"), report_text(&report)));
    }
    Ok(out)
}

fn exact_eval(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let geometry = two_disc_config(config, config.radius()?)?;
    let exact = exact_for(&geometry)?;
    let mut points: Vec<Complex64> = config
        .sweep
        .points
        .iter()
        .map(|&[x, y]| Complex64::new(x, y))
        .collect();
    let samples = config.sweep.boundary_samples.unwrap_or(0);
    for disc in geometry.discs() {
        for l in 0..samples {
            let angle = 2.0 * std::f64::consts::PI * l as f64 / samples as f64;
            points.push(disc.center + Complex64::from_polar(disc.radius, angle));
        }
    }
    let values: Vec<Result<Complex64, CliError>> = points
        .par_iter()
        .map(|&z| Ok(exact_potential(&geometry, &exact, z)?))
        .collect();
    let mut out = Outcome {
        header: vec!["x", "y", "re_w", "im_w"],
        ..Default::default()
    };
    for (z, w) in points.into_iter().zip(values) {
        let w = w?;
        out.rows
            .push(vec![num(z.re), num(z.im), num(w.re), num(w.im)]);
    }
    Ok(out)
}

fn decay_diagnostics(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let k_max = config.sweep.k_max.unwrap_or(3);
    let j_max = config.sweep.j_max.unwrap_or(1024);
    let d = config.geometry.d;
    let u0 = config.far_field()?;
    let results: Vec<Result<Vec<Vec<String>>, CliError>> = config
        .sweep
        .radii
        .par_iter()
        .map(|&s| {
            let map = annulus_map(d, s)?;
            let exact = ExactSolution64::new(map, u0, KEvalSettings::default())?;
            let omega = omega_coeffs(&exact, j_max, 4 * j_max)?;
            let split = hybrid_split_w21(&map, Some(&CutoffSpec::for_modulus(map.t)?), j_max)?;
            let families = [
                ("omega_c", omega.c),
                ("omega_d", omega.d),
                ("split_zeta", split.zeta_tail()),
                ("split_laurent", split.laurent_tail()),
                ("single_basis", single_basis_coeffs(&map, j_max)),
            ];
            let mut rows = Vec::new();
            for (name, coeffs) in families {
                let profile = decay_profile(&coeffs, map.t, k_max)?;
                for (k, sup) in profile.sups.iter().enumerate() {
                    rows.push(vec![
                        num(s),
                        num(map.t),
                        name.to_string(),
                        k.to_string(),
                        num(*sup),
                    ]);
                }
            }
            Ok(rows)
        })
        .collect();
    let mut out = Outcome {
        header: vec!["s", "T", "family", "k", "sup"],
        ..Default::default()
    };
    for rows in results {
        out.rows.extend(rows?);
    }
    Ok(out)
}
