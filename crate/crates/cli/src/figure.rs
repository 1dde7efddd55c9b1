//! Datasets behind the four standard figures.
//!
//! Every dataset is one CSV named `<figure>_<dataset>.csv`. Failed points
//! keep their row, with the error kind in `status`.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use vacuum_census::dispersion::{trajectory_points, SweepVariable};
use vacuum_census::population::{e_max, nk_asymptote, Asymptote};
use vacuum_census::{DispersionRoots, LorentzMedium, Result as CoreResult};

use crate::compute::{self, MethodChoice, DEFAULT_DUAL_TOL, DEFAULT_TOL, ROOT_COLUMNS};
use crate::error::{CliError, Result};
use crate::sweep::{grid, Scale};
use crate::table::{Cell, Table};

/// Loss rates drawn as separate curves in figures 1 to 3.
pub const GAMMA_SET: [f64; 5] = [0.0, 0.5, 1.0, 1.5, 2.0];
pub const OMEGA_C: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FigureName {
    Fig1,
    Fig2,
    Fig3,
    Suppfig1,
}

impl FigureName {
    pub fn as_str(&self) -> &'static str {
        match self {
            FigureName::Fig1 => "fig1",
            FigureName::Fig2 => "fig2",
            FigureName::Fig3 => "fig3",
            FigureName::Suppfig1 => "suppfig1",
        }
    }
}

fn header(figure: FigureName, dataset: &str, columns: Vec<&str>) -> Table {
    Table::new(columns)
        .meta("tool", concat!("vacuum-census ", env!("CARGO_PKG_VERSION")))
        .meta("figure", figure.as_str())
        .meta("dataset", dataset)
        .meta("omega0", 1)
}

fn with_tail(mut cols: Vec<&'static str>) -> Vec<&'static str> {
    cols.extend(["est_error", "status", "message"]);
    cols
}

fn root_columns(inputs: [&'static str; 3]) -> Vec<&'static str> {
    let mut cols = inputs.to_vec();
    cols.extend(ROOT_COLUMNS);
    with_tail(cols)
}

fn root_row(inputs: [f64; 3], point: &CoreResult<DispersionRoots>) -> Vec<Cell> {
    let mut row: Vec<Cell> = inputs.iter().map(|&x| x.into()).collect();
    row.extend(compute::root_cells(point));
    row.extend(compute::status_cells(point));
    row
}

fn trajectory(
    base: LorentzMedium,
    ck: f64,
    variable: SweepVariable,
    grid: &[f64],
) -> Vec<(f64, CoreResult<DispersionRoots>)> {
    grid.iter()
        .copied()
        .zip(trajectory_points(&base, ck, variable, grid))
        .collect()
}

fn unit(omega_c: f64, gamma_l: f64) -> Result<LorentzMedium> {
    Ok(LorentzMedium::unit(omega_c, gamma_l)?)
}

fn fig1() -> Result<Vec<(&'static str, Table)>> {
    let cks = grid(0.1, 3.0, 200, Scale::Log);
    let media = GAMMA_SET
        .iter()
        .map(|&g| unit(OMEGA_C, g))
        .collect::<Result<Vec<_>>>()?;
    let curves: Vec<_> = media
        .par_iter()
        .map(|m| trajectory(*m, 1.0, SweepVariable::Wavevector, &cks))
        .collect();
    let mut dispersion = header(
        FigureName::Fig1,
        "dispersion",
        root_columns(["gamma_L", "omega_c", "ck"]),
    )
    .meta("grid", "ck log 200 points in [0.1, 3]")
    .meta("branches", "matched by continuity along ck");
    for (g, curve) in GAMMA_SET.iter().zip(&curves) {
        for (ck, point) in curve {
            dispersion.push(root_row([*g, OMEGA_C, *ck], point));
        }
    }

    let gammas = grid(0.0, 2.0, 201, Scale::Linear);
    let mut traj = header(
        FigureName::Fig1,
        "trajectory",
        root_columns(["gamma_L", "omega_c", "ck"]),
    )
    .meta("grid", "gamma_L linear 201 points in [0, 2] at ck = 1");
    for (g, point) in trajectory(unit(OMEGA_C, 0.0)?, 1.0, SweepVariable::GammaL, &gammas) {
        traj.push(root_row([g, OMEGA_C, 1.0], &point));
    }
    Ok(vec![("dispersion", dispersion), ("trajectory", traj)])
}

fn population_row(omega_c: f64, gamma_l: f64, ck: f64, with_energy: bool) -> Vec<Cell> {
    let method = MethodChoice::Auto.resolve(gamma_l, None);
    let out = compute::population(omega_c, gamma_l, None, ck, method, Some(DEFAULT_TOL));
    let mut row: Vec<Cell> = vec![gamma_l.into(), omega_c.into(), ck.into()];
    row.push(method.as_str().into());
    match (&out, with_energy) {
        (Ok(r), false) => row.extend([r.n_k.into(), r.est_error.into()]),
        (Ok(r), true) => row.extend([
            r.n_k.into(),
            r.e_k.into(),
            r.est_error.into(),
            (ck * r.est_error).into(),
        ]),
        (Err(_), false) => row.extend([Cell::Empty, Cell::Empty]),
        (Err(_), true) => row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]),
    }
    row.extend(compute::status_cells(&out));
    row
}

fn fig2() -> Result<Vec<(&'static str, Table)>> {
    let wcs = grid(0.0, 1.0, 101, Scale::Linear);
    let points: Vec<(f64, f64)> = GAMMA_SET
        .iter()
        .flat_map(|&g| wcs.iter().map(move |&wc| (g, wc)))
        .collect();
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&(g, wc)| population_row(wc, g, 1.0, false))
        .collect();
    let mut population = header(
        FigureName::Fig2,
        "population",
        with_tail(vec!["gamma_L", "omega_c", "ck", "method", "n_k"]),
    )
    .meta("grid", "omega_c linear 101 points in [0, 1] at ck = 1")
    .meta("tol", DEFAULT_TOL);
    for row in rows {
        population.push(row);
    }

    let mut traj = header(
        FigureName::Fig2,
        "trajectory",
        root_columns(["gamma_L", "omega_c", "ck"]),
    )
    .meta(
        "grid",
        "omega_c linear 101 points in [0, 1] at gamma_L = 1, ck = 1",
    );
    for (wc, point) in trajectory(unit(0.0, 1.0)?, 1.0, SweepVariable::OmegaC, &wcs) {
        traj.push(root_row([1.0, wc, 1.0], &point));
    }
    Ok(vec![("population", population), ("trajectory", traj)])
}

fn fig3() -> Result<Vec<(&'static str, Table)>> {
    const NOTE: &str = "sample count chosen for smooth curves";
    let cks = grid(1e-2, 1e2, 81, Scale::Log);
    let points: Vec<(f64, f64)> = GAMMA_SET
        .iter()
        .flat_map(|&g| cks.iter().map(move |&ck| (g, ck)))
        .collect();
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&(g, ck)| population_row(OMEGA_C, g, ck, true))
        .collect();
    let mut population = header(
        FigureName::Fig3,
        "population",
        vec![
            "gamma_L",
            "omega_c",
            "ck",
            "method",
            "n_k",
            "e_k",
            "est_error",
            "e_k_est_error",
            "status",
            "message",
        ],
    )
    .meta("grid", "ck log 81 points in [1e-2, 1e2]")
    .meta("grid_choice", NOTE)
    .meta("tol", DEFAULT_TOL);
    for row in rows {
        population.push(row);
    }

    let m = unit(OMEGA_C, 0.0)?;
    let mut asymptotes = header(
        FigureName::Fig3,
        "asymptotes",
        with_tail(vec![
            "omega_c",
            "ck",
            "n_small_k",
            "n_large_k",
            "e_small_k",
            "e_large_k",
        ]),
    )
    .meta("grid", "ck log 81 points in [1e-2, 1e2]")
    .meta("grid_choice", NOTE)
    .meta("e_max", e_max(&m))
    .meta("est_error", "relative rounding bound");
    for &ck in &cks {
        let small = nk_asymptote(&m, ck, Asymptote::SmallK);
        let large = nk_asymptote(&m, ck, Asymptote::LargeK);
        asymptotes.push(vec![
            OMEGA_C.into(),
            ck.into(),
            small.into(),
            large.into(),
            (ck * small).into(),
            (ck * large).into(),
            (8.0 * f64::EPSILON).into(),
            "ok".into(),
            Cell::Empty,
        ]);
    }
    Ok(vec![("population", population), ("asymptotes", asymptotes)])
}

fn suppfig1() -> Result<Vec<(&'static str, Table)>> {
    const COUPLINGS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
    let losses = grid(0.05, 2.0, 21, Scale::Linear);
    let points: Vec<(f64, f64, f64)> = COUPLINGS
        .iter()
        .flat_map(|&wc| {
            let losses = &losses;
            losses
                .iter()
                .flat_map(move |&gl| losses.iter().map(move |&gp| (wc, gl, gp)))
        })
        .collect();
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&(wc, gl, gp)| {
            let method = MethodChoice::Auto.resolve(gl, Some(gp));
            let out = compute::population(wc, gl, Some(gp), 1.0, method, Some(DEFAULT_DUAL_TOL));
            let mut row: Vec<Cell> = vec![
                wc.into(),
                gl.into(),
                gp.into(),
                1.0.into(),
                method.as_str().into(),
            ];
            match &out {
                Ok(r) => row.extend([r.n_k.into(), r.est_error.into()]),
                Err(_) => row.extend([Cell::Empty, Cell::Empty]),
            }
            row.extend(compute::status_cells(&out));
            row
        })
        .collect();
    let mut table = header(
        FigureName::Suppfig1,
        "dual_loss",
        with_tail(vec!["omega_c", "gamma_L", "gamma_P", "ck", "method", "n_k"]),
    )
    .meta(
        "grid",
        "gamma_L x gamma_P linear 21 x 21 points in [0.05, 2]^2 at ck = 1",
    )
    .meta("tol", DEFAULT_DUAL_TOL);
    for row in rows {
        table.push(row);
    }
    Ok(vec![("dual_loss", table)])
}

pub fn tables(name: FigureName) -> Result<Vec<(&'static str, Table)>> {
    match name {
        FigureName::Fig1 => fig1(),
        FigureName::Fig2 => fig2(),
        FigureName::Fig3 => fig3(),
        FigureName::Suppfig1 => suppfig1(),
    }
}

/// Computes the datasets on `pool` and writes them into `outdir`.
pub fn write(name: FigureName, outdir: &Path, pool: &rayon::ThreadPool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(outdir).map_err(|e| CliError::io(outdir, e))?;
    let tables = pool.install(|| tables(name))?;
    let mut written = Vec::new();
    for (dataset, table) in tables {
        let path = outdir.join(format!("{}_{dataset}.csv", name.as_str()));
        table.write_file(&path)?;
        written.push(path);
    }
    Ok(written)
}
