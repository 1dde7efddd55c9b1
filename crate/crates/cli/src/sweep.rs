//! Parameter sweeps driven by a JSON spec file.
//!
//! ```json
//! {
//!   "quantity": "nk_dual",
//!   "fixed": { "omega_c": 0.5, "ck": 1.0 },
//!   "axes": [
//!     { "param": "gamma_L", "min": 0.1, "max": 2.0, "count": 5 },
//!     { "param": "gamma_P", "min": 0.1, "max": 2.0, "count": 5, "scale": "log" }
//!   ],
//!   "method": "auto",
//!   "tol": 1e-6
//! }
//! ```
//!
//! Parameters are `omega_c`, `gamma_L`, `gamma_P`, `ck` and `omega` (the real
//! frequency at which `eps` is evaluated), all in units of `omega0`. Each one a
//! quantity needs is given either in `fixed` or as an axis, never both.
//! Unknown keys are rejected. Rows are emitted row-major: the last axis varies
//! fastest.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use vacuum_census::{Complex64, Method};

use crate::compute::{self, MethodChoice, ROOT_COLUMNS};
use crate::error::{CliError, Result};
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Eps,
    Roots,
    Nk,
    NkDual,
    Ek,
}

impl Quantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::Eps => "eps",
            Quantity::Roots => "roots",
            Quantity::Nk => "nk",
            Quantity::NkDual => "nk_dual",
            Quantity::Ek => "ek",
        }
    }

    fn required(&self) -> &'static [Param] {
        use Param::*;
        match self {
            Quantity::Eps => &[OmegaC, GammaL, Omega],
            Quantity::Roots | Quantity::Nk | Quantity::Ek => &[OmegaC, GammaL, Ck],
            Quantity::NkDual => &[OmegaC, GammaL, GammaP, Ck],
        }
    }

    fn optional(&self) -> &'static [Param] {
        match self {
            Quantity::Nk | Quantity::Ek => &[Param::GammaP],
            _ => &[],
        }
    }

    fn takes_method(&self) -> bool {
        matches!(self, Quantity::Nk | Quantity::NkDual | Quantity::Ek)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Param {
    #[serde(rename = "omega_c")]
    OmegaC,
    #[serde(rename = "gamma_L")]
    GammaL,
    #[serde(rename = "gamma_P")]
    GammaP,
    #[serde(rename = "ck")]
    Ck,
    #[serde(rename = "omega")]
    Omega,
}

const PARAMS: [Param; 5] = [
    Param::OmegaC,
    Param::GammaL,
    Param::GammaP,
    Param::Ck,
    Param::Omega,
];

impl Param {
    pub fn name(&self) -> &'static str {
        match self {
            Param::OmegaC => "omega_c",
            Param::GammaL => "gamma_L",
            Param::GammaP => "gamma_P",
            Param::Ck => "ck",
            Param::Omega => "omega",
        }
    }

    fn check(&self, x: f64) -> std::result::Result<(), String> {
        let ok = match self {
            Param::OmegaC => x >= 0.0 && x.is_finite(),
            Param::GammaL => (0.0..=2.0).contains(&x),
            Param::GammaP => x > 0.0 && x <= 2.0,
            Param::Ck => x > 0.0 && x.is_finite(),
            Param::Omega => x.is_finite(),
        };
        if ok {
            return Ok(());
        }
        let range = match self {
            Param::OmegaC => "[0, inf)",
            Param::GammaL => "[0, 2]",
            Param::GammaP => "(0, 2]",
            Param::Ck => "(0, inf)",
            Param::Omega => "finite values",
        };
        Err(format!("{} = {x} outside {range}", self.name()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixed {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_c: Option<f64>,
    #[serde(default, rename = "gamma_L", skip_serializing_if = "Option::is_none")]
    pub gamma_l: Option<f64>,
    #[serde(default, rename = "gamma_P", skip_serializing_if = "Option::is_none")]
    pub gamma_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ck: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

impl Fixed {
    fn get(&self, p: Param) -> Option<f64> {
        match p {
            Param::OmegaC => self.omega_c,
            Param::GammaL => self.gamma_l,
            Param::GammaP => self.gamma_p,
            Param::Ck => self.ck,
            Param::Omega => self.omega,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: Param,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl Axis {
    pub fn grid(&self) -> Vec<f64> {
        grid(self.min, self.max, self.count, self.scale)
    }
}

/// `count` points from `min` to `max`, both endpoints exact.
pub fn grid(min: f64, max: f64, count: usize, scale: Scale) -> Vec<f64> {
    let last = count.saturating_sub(1).max(1) as f64;
    (0..count)
        .map(|i| {
            if i == 0 {
                return min;
            }
            if i + 1 == count {
                return max;
            }
            let t = i as f64 / last;
            match scale {
                Scale::Linear => min + (max - min) * t,
                Scale::Log => (min.ln() + (max.ln() - min.ln()) * t).exp(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub quantity: Quantity,
    #[serde(default)]
    pub fixed: Fixed,
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub method: MethodChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl SweepSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::spec(path, e.into_inner().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.axes.len()) {
            return Err(CliError::spec("axes", "need 1 or 2 axes"));
        }
        let q = self.quantity;
        let used = |p: Param| q.required().contains(&p) || q.optional().contains(&p);
        for (i, axis) in self.axes.iter().enumerate() {
            let at = |field: &str| format!("axes[{i}].{field}");
            let name = axis.param.name();
            if !used(axis.param) {
                return Err(CliError::spec(
                    at("param"),
                    format!("{name} is not used by quantity {}", q.as_str()),
                ));
            }
            if self.axes[..i].iter().any(|a| a.param == axis.param) {
                return Err(CliError::spec(at("param"), format!("{name} swept twice")));
            }
            if self.fixed.get(axis.param).is_some() {
                return Err(CliError::spec(
                    format!("fixed.{name}"),
                    format!("{name} is also swept by axes[{i}]"),
                ));
            }
            if axis.count < 2 {
                return Err(CliError::spec(at("count"), "must be >= 2"));
            }
            axis.param
                .check(axis.min)
                .map_err(|m| CliError::spec(at("min"), m))?;
            axis.param
                .check(axis.max)
                .map_err(|m| CliError::spec(at("max"), m))?;
            if axis.scale == Scale::Log && !(axis.min > 0.0 && axis.max > 0.0) {
                return Err(CliError::spec(at("scale"), "log scale needs min, max > 0"));
            }
        }
        for p in PARAMS {
            let Some(x) = self.fixed.get(p) else {
                continue;
            };
            let path = format!("fixed.{}", p.name());
            if !used(p) {
                return Err(CliError::spec(
                    path,
                    format!("{} is not used by quantity {}", p.name(), q.as_str()),
                ));
            }
            p.check(x).map_err(|m| CliError::spec(path, m))?;
        }
        for &p in q.required() {
            if self.fixed.get(p).is_none() && self.axis_of(p).is_none() {
                return Err(CliError::spec(
                    format!("fixed.{}", p.name()),
                    format!("required by quantity {}", q.as_str()),
                ));
            }
        }
        self.validate_method()?;
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol <= 1e-3) {
                return Err(CliError::spec(
                    "tol",
                    format!("tol = {tol} outside (0, 1e-3]"),
                ));
            }
        }
        Ok(())
    }

    fn validate_method(&self) -> Result<()> {
        let q = self.quantity;
        let m = self.method;
        if !q.takes_method() {
            if m != MethodChoice::Auto {
                return Err(CliError::spec(
                    "method",
                    format!("quantity {} takes no method", q.as_str()),
                ));
            }
            return Ok(());
        }
        let has_gp = self.present(Param::GammaP);
        match m {
            MethodChoice::Auto => Ok(()),
            MethodChoice::DualLoss if has_gp => Ok(()),
            MethodChoice::DualLoss => Err(CliError::spec("method", "dual_loss needs gamma_P")),
            _ if has_gp || q == Quantity::NkDual => Err(CliError::spec(
                "method",
                format!("{} does not take gamma_P", m.as_str()),
            )),
            MethodChoice::Hopfield if self.axis_of(Param::GammaL).is_some() => Err(CliError::spec(
                "method",
                "hopfield needs gamma_L fixed at 0",
            )),
            MethodChoice::Hopfield if self.fixed.gamma_l != Some(0.0) => Err(CliError::spec(
                "fixed.gamma_L",
                "hopfield needs gamma_L = 0",
            )),
            _ => Ok(()),
        }
    }

    fn axis_of(&self, p: Param) -> Option<usize> {
        self.axes.iter().position(|a| a.param == p)
    }

    fn present(&self, p: Param) -> bool {
        self.fixed.get(p).is_some() || self.axis_of(p).is_some()
    }

    /// Parameters echoed as input columns, in canonical order.
    fn inputs(&self) -> Vec<Param> {
        PARAMS.into_iter().filter(|&p| self.present(p)).collect()
    }

    /// Grid points in row-major order, each a value per [`Self::inputs`].
    pub fn points(&self) -> Vec<Vec<f64>> {
        let grids: Vec<Vec<f64>> = self.axes.iter().map(Axis::grid).collect();
        let mut combos: Vec<Vec<f64>> = vec![Vec::new()];
        for g in &grids {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    g.iter().map(move |&x| {
                        let mut c = c.clone();
                        c.push(x);
                        c
                    })
                })
                .collect();
        }
        let inputs = self.inputs();
        combos
            .into_iter()
            .map(|c| {
                inputs
                    .iter()
                    .map(|&p| match self.axis_of(p) {
                        Some(i) => c[i],
                        None => self.fixed.get(p).unwrap_or(f64::NAN),
                    })
                    .collect()
            })
            .collect()
    }

    fn output_columns(&self) -> Vec<&'static str> {
        let mut cols = match self.quantity {
            Quantity::Eps => vec!["eps_re", "eps_im"],
            Quantity::Roots => ROOT_COLUMNS.to_vec(),
            Quantity::Nk | Quantity::NkDual => vec!["method", "n_k"],
            Quantity::Ek => vec!["method", "e_k"],
        };
        cols.extend(["est_error", "status", "message"]);
        cols
    }

    fn evaluate(&self, inputs: &[Param], values: &[f64]) -> Vec<Cell> {
        let get = |p: Param| inputs.iter().position(|&q| q == p).map(|i| values[i]);
        let wc = get(Param::OmegaC).unwrap_or(f64::NAN);
        let gl = get(Param::GammaL).unwrap_or(f64::NAN);
        let ck = get(Param::Ck).unwrap_or(f64::NAN);
        match self.quantity {
            Quantity::Eps => {
                let omega = get(Param::Omega).unwrap_or(f64::NAN);
                let out = compute::eps(wc, gl, Complex64::new(omega, 0.0));
                let mut cells = match &out {
                    Ok(e) => vec![e.re.into(), e.im.into(), compute::eps_error(*e).into()],
                    Err(_) => vec![Cell::Empty; 3],
                };
                cells.extend(compute::status_cells(&out));
                cells
            }
            Quantity::Roots => {
                let out = compute::roots(wc, gl, ck);
                let mut cells = compute::root_cells(&out);
                cells.extend(compute::status_cells(&out));
                cells
            }
            Quantity::Nk | Quantity::NkDual | Quantity::Ek => {
                let gp = get(Param::GammaP);
                let method = self.method.resolve(gl, gp);
                let out = compute::population(wc, gl, gp, ck, method, self.tol);
                let ek = self.quantity == Quantity::Ek;
                let scale = if ek { ck } else { 1.0 };
                let mut cells = match &out {
                    Ok(r) => vec![
                        r.method.as_str().into(),
                        (if ek { r.e_k } else { r.n_k }).into(),
                        (scale * r.est_error).into(),
                    ],
                    Err(_) => vec![method.as_str().into(), Cell::Empty, Cell::Empty],
                };
                cells.extend(compute::status_cells(&out));
                cells
            }
        }
    }

    fn table(&self) -> Table {
        let inputs = self.inputs();
        let mut columns: Vec<&str> = inputs.iter().map(Param::name).collect();
        columns.extend(self.output_columns());
        let mut table = Table::new(columns)
            .meta("tool", concat!("vacuum-census ", env!("CARGO_PKG_VERSION")))
            .meta("quantity", self.quantity.as_str())
            .meta("omega0", 1)
            .meta("method", self.method.as_str());
        for (i, a) in self.axes.iter().enumerate() {
            let scale = match a.scale {
                Scale::Linear => "linear",
                Scale::Log => "log",
            };
            table = table.meta(
                &format!("axis{i}"),
                format!(
                    "{} {scale} {} points in [{}, {}]",
                    a.param.name(),
                    a.count,
                    a.min,
                    a.max
                ),
            );
        }
        table
    }

    /// Evaluates every grid point, in parallel on `pool`, rows in grid order.
    pub fn run(&self, pool: &rayon::ThreadPool) -> Result<Table> {
        self.validate()?;
        let inputs = self.inputs();
        let points = self.points();
        let rows: Vec<Vec<Cell>> = pool.install(|| {
            points
                .par_iter()
                .map(|values| {
                    let mut row: Vec<Cell> = values.iter().map(|&x| x.into()).collect();
                    row.extend(self.evaluate(&inputs, values));
                    row
                })
                .collect()
        });
        let mut table = self.table();
        table.meta.push((
            "spec".to_string(),
            serde_json::to_string(self).map_err(CliError::from)?,
        ));
        for row in rows {
            table.push(row);
        }
        Ok(table)
    }
}

/// Writes `out` and a JSON sidecar next to it; returns the sidecar path.
pub fn write_outputs(spec: &SweepSpec, table: &Table, out: &Path) -> Result<PathBuf> {
    table.write_file(out)?;
    let status = table
        .columns
        .iter()
        .position(|c| c == "status")
        .expect("every sweep table has a status column");
    let ok = table
        .rows
        .iter()
        .filter(|r| r[status] == Cell::Text("ok".into()))
        .count();
    let methods: Vec<&str> = match table.columns.iter().position(|c| c == "method") {
        Some(i) => {
            let mut m: Vec<&str> = table
                .rows
                .iter()
                .filter_map(|r| match &r[i] {
                    Cell::Text(s) => Some(s.as_str()),
                    _ => None,
                })
                .collect();
            m.sort_unstable();
            m.dedup();
            m
        }
        None => Vec::new(),
    };
    let sidecar = serde_json::json!({
        "tool": "vacuum-census",
        "version": env!("CARGO_PKG_VERSION"),
        "csv": out.file_name().map(|n| n.to_string_lossy().into_owned()),
        "spec": spec,
        "columns": table.columns,
        "rows": table.rows.len(),
        "ok_rows": ok,
        "failed_rows": table.rows.len() - ok,
        "methods": methods,
    });
    let path = out.with_extension("json");
    let text = serde_json::to_string_pretty(&sidecar)?;
    fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

/// Method label `auto` resolves to, for documentation and tests.
pub fn auto_method(gamma_l: f64, gamma_p: Option<f64>) -> Method {
    MethodChoice::Auto.resolve(gamma_l, gamma_p)
}
