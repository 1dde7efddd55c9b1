//! Batch front end: single-point queries, JSON-specified sweeps and figure
//! datasets, written as CSV with `#` metadata lines.

pub mod args;
pub mod compute;
pub mod error;
pub mod figure;
pub mod sweep;
pub mod table;

use std::io::Write;

use serde_json::{json, Value};
use vacuum_census::{Complex64, Method, PopulationResult};

use args::{Cli, Command, EpsArgs, Jobs, NkArgs, RootsArgs};
pub use error::{CliError, Result};

/// Largest relative gap `--verify` accepts between closed form and quadrature.
pub const VERIFY_TOLERANCE: f64 = 1e-4;

fn pool(jobs: &Jobs) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs.jobs {
        builder = builder.num_threads(n as usize);
    }
    Ok(builder.build()?)
}

fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn population_json(r: &PopulationResult) -> Value {
    json!({
        "method": r.method.as_str(),
        "n_k": r.n_k,
        "e_k": r.e_k,
        "est_error": r.est_error,
    })
}

fn eps(a: &EpsArgs) -> Result<Value> {
    let z = Complex64::new(a.omega, a.omega_im);
    let e = compute::eps(a.medium.wc, a.medium.gl, z)?;
    Ok(json!({
        "omega_c": a.medium.wc,
        "gamma_L": a.medium.gl,
        "omega": complex(z),
        "eps": complex(e),
        "est_error": compute::eps_error(e),
    }))
}

fn roots(a: &RootsArgs) -> Result<Value> {
    let r = compute::roots(a.medium.wc, a.medium.gl, a.ck)?;
    Ok(json!({
        "omega_c": a.medium.wc,
        "gamma_L": a.medium.gl,
        "ck": a.ck,
        "roots": [complex(r.roots[0]), complex(r.roots[1])],
        "derivs": [complex(r.derivs[0]), complex(r.derivs[1])],
        "regime": r.regime.as_str(),
        "ultrastrong": r.ultrastrong,
        "degenerate": r.degenerate,
        "est_error": compute::roots_error(&r),
    }))
}

/// The report, plus the mismatch to raise once it has been printed.
fn nk(a: &NkArgs) -> Result<(Value, Option<CliError>)> {
    let (wc, gl) = (a.medium.wc, a.medium.gl);
    if a.verify && a.gp.is_some() {
        return Err(CliError::Usage(
            "--verify compares single-loss methods and cannot take --gp".into(),
        ));
    }
    let method = a.method.resolve(gl, a.gp);
    if a.gp.is_some() && method != Method::DualLoss {
        return Err(CliError::Usage(format!(
            "--gp only applies to the dual_loss method, not {}",
            a.method.as_str()
        )));
    }
    let result = compute::population(wc, gl, a.gp, a.ck, method, a.tol)?;
    let mut out = json!({
        "omega_c": wc,
        "gamma_L": gl,
        "gamma_P": a.gp,
        "ck": a.ck,
    });
    for (k, v) in population_json(&result).as_object().into_iter().flatten() {
        out[k] = v.clone();
    }
    if a.verify {
        let closed = compute::population(wc, gl, None, a.ck, Method::ClosedForm, a.tol)?;
        let quad = compute::population(wc, gl, None, a.ck, Method::Quadrature, a.tol)?;
        let scale = closed.n_k.abs().max(quad.n_k.abs());
        let rel_diff = if scale == 0.0 {
            0.0
        } else {
            (closed.n_k - quad.n_k).abs() / scale
        };
        out["verify"] = json!({
            "closed_form": population_json(&closed),
            "quadrature": population_json(&quad),
            "rel_diff": rel_diff,
            "tolerance": VERIFY_TOLERANCE,
            "agree": rel_diff <= VERIFY_TOLERANCE,
        });
        if rel_diff > VERIFY_TOLERANCE || rel_diff.is_nan() {
            let mismatch = CliError::VerifyMismatch {
                closed_form: closed.n_k,
                quadrature: quad.n_k,
                rel_diff,
            };
            return Ok((out, Some(mismatch)));
        }
    }
    Ok((out, None))
}

/// Runs one command, writing its machine-readable report to `out`.
pub fn run<W: Write>(cli: Cli, mut out: W) -> Result<()> {
    let mut deferred = None;
    let report = match &cli.command {
        Command::Eps(a) => eps(a)?,
        Command::Roots(a) => roots(a)?,
        Command::Nk(a) => {
            let (report, mismatch) = nk(a)?;
            deferred = mismatch;
            report
        }
        Command::Sweep(a) => {
            let spec = sweep::SweepSpec::load(&a.spec)?;
            let table = spec.run(&pool(&a.jobs)?)?;
            let sidecar = sweep::write_outputs(&spec, &table, &a.out)?;
            json!({
                "csv": a.out,
                "sidecar": sidecar,
                "rows": table.rows.len(),
            })
        }
        Command::Figure(a) => {
            let files = figure::write(a.name, &a.outdir, &pool(&a.jobs)?)?;
            json!({ "figure": a.name.as_str(), "files": files })
        }
    };
    writeln!(out, "{report}").map_err(|e| CliError::io("<stdout>", e))?;
    deferred.map_or(Ok(()), Err)
}
