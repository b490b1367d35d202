//! Grid sweeps over system parameters, fanned out to a worker pool and
//! gathered back in grid order.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use gravent_core::{analytic, entanglement, SystemParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::inputs::{OutputFormat, RunInputs};
use crate::record::{RunRecord, Value};
use crate::InvalidInput;

/// Names accepted as axes and fixed values. `omega_khz` is in kHz, `tau`
/// is dimensionless, everything else as in [`SystemParams`].
pub const PARAMETERS: [&str; 8] = ["omega_khz", "lambda1", "lambda2", "eta", "mu", "chi", "tau", "target_en"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    /// Numeric negativity over `(lambda1, lambda2)` at fixed `tau`.
    ContourLambda,
    /// Numeric and first-order negativity along `tau`.
    TimeTrace,
    /// Numeric and asymptotic entanglement times.
    TauEntScan,
    /// Numeric negativity over arbitrary axes.
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(name: &str, min: f64, max: f64, count: usize) -> Self {
        Self {
            name: name.to_owned(),
            min,
            max,
            count,
            spacing: Spacing::Linear,
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if !PARAMETERS.contains(&self.name.as_str()) {
            bail!(InvalidInput(format!("unknown axis `{}`", self.name)));
        }
        if self.count < 2 {
            bail!(InvalidInput(format!("axis `{}` needs count >= 2", self.name)));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            bail!(InvalidInput(format!("axis `{}` bounds must be finite", self.name)));
        }
        let last = (self.count - 1) as f64;
        let values = match self.spacing {
            Spacing::Linear => (0..self.count)
                .map(|i| {
                    if i == self.count - 1 {
                        self.max
                    } else {
                        self.min + (self.max - self.min) * (i as f64 / last)
                    }
                })
                .collect(),
            Spacing::Log => {
                if !(self.min > 0.0 && self.max > 0.0) {
                    bail!(InvalidInput(format!("log axis `{}` needs positive bounds", self.name)));
                }
                let (a, b) = (self.min.ln(), self.max.ln());
                (0..self.count)
                    .map(|i| {
                        if i == 0 {
                            self.min
                        } else if i == self.count - 1 {
                            self.max
                        } else {
                            (a + (b - a) * i as f64 / last).exp()
                        }
                    })
                    .collect()
            }
        };
        Ok(values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub grid: Vec<Axis>,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    #[serde(default = "default_format")]
    pub output_format: OutputFormat,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
}

fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

fn default_parallelism() -> usize {
    1
}

/// Parameter values for one grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub params: SystemParams,
    pub tau: f64,
    pub target_en: f64,
}

impl SweepSpec {
    /// Fixed values taken from `inputs` for every parameter not on an axis.
    pub fn fixed_from(inputs: &RunInputs) -> BTreeMap<String, f64> {
        [
            ("omega_khz", inputs.omega_khz),
            ("lambda1", inputs.lambda1),
            ("lambda2", inputs.lambda2),
            ("eta", inputs.eta),
            ("mu", inputs.mu),
            ("chi", inputs.chi),
            ("tau", inputs.tau_max),
            ("target_en", inputs.target_en),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_owned(), v))
        .collect()
    }

    pub fn contour(inputs: &RunInputs) -> Self {
        Self {
            kind: SweepKind::ContourLambda,
            grid: vec![
                Axis::linear("lambda1", inputs.lambda_min, inputs.lambda_max, inputs.grid),
                Axis::linear("lambda2", inputs.lambda_min, inputs.lambda_max, inputs.grid),
            ],
            fixed: Self::fixed_from(inputs),
            output_format: inputs.format,
            parallelism: inputs.jobs,
        }
    }

    pub fn trace(inputs: &RunInputs) -> Self {
        Self {
            kind: SweepKind::TimeTrace,
            grid: vec![Axis::linear("tau", 0.0, inputs.tau_max, inputs.steps + 1)],
            fixed: Self::fixed_from(inputs),
            output_format: inputs.format,
            parallelism: inputs.jobs,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let parsed = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str::<RunRecord>(&text)
                .map_err(anyhow::Error::from)
                .and_then(|r| r.sweep.ok_or_else(|| anyhow!("record carries no sweep"))),
            Some("csv") => text
                .lines()
                .take_while(|l| l.starts_with('#'))
                .find_map(|l| l.strip_prefix(crate::record::SWEEP_PREFIX))
                .ok_or_else(|| anyhow!("no sweep line in CSV header"))
                .and_then(|l| serde_json::from_str(l).map_err(anyhow::Error::from)),
            _ => toml::from_str::<SweepSpec>(&text).map_err(anyhow::Error::from),
        };
        parsed.map_err(|e| anyhow!(InvalidInput(format!("sweep spec {}: {e:#}", path.display()))))
    }

    pub fn validate(&self) -> Result<()> {
        if self.parallelism == 0 {
            bail!(InvalidInput("parallelism must be >= 1".into()));
        }
        for key in self.fixed.keys() {
            if !PARAMETERS.contains(&key.as_str()) {
                bail!(InvalidInput(format!("unknown fixed parameter `{key}`")));
            }
        }
        let names: Vec<&str> = self.grid.iter().map(|a| a.name.as_str()).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                bail!(InvalidInput(format!("axis `{n}` appears twice")));
            }
        }
        match self.kind {
            SweepKind::ContourLambda if names != ["lambda1", "lambda2"] => {
                bail!(InvalidInput("contour sweep needs axes lambda1, lambda2".into()))
            }
            SweepKind::TimeTrace if names != ["tau"] => bail!(InvalidInput("time trace needs the single axis tau".into())),
            _ if self.grid.is_empty() => bail!(InvalidInput("sweep needs at least one axis".into())),
            _ => Ok(()),
        }
    }

    fn fixed_value(&self, name: &str) -> f64 {
        let default = RunInputs::default();
        self.fixed
            .get(name)
            .copied()
            .unwrap_or_else(|| Self::fixed_from(&default)[name])
    }

    /// All cells in row-major order (first axis slowest), with their axis values.
    pub fn cells(&self) -> Result<Vec<(Vec<f64>, gravent_core::Result<Cell>)>> {
        self.validate()?;
        let axes: Vec<Vec<f64>> = self.grid.iter().map(Axis::values).collect::<Result<_>>()?;
        let total: usize = axes.iter().map(Vec::len).product();
        let mut out = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            let mut coords = vec![0.0; axes.len()];
            for (k, axis) in axes.iter().enumerate().rev() {
                coords[k] = axis[rem % axis.len()];
                rem /= axis.len();
            }
            let value = |name: &str| {
                self.grid
                    .iter()
                    .position(|a| a.name == name)
                    .map(|k| coords[k])
                    .unwrap_or_else(|| self.fixed_value(name))
            };
            let cell = SystemParams::new(
                value("omega_khz") * 1e3,
                value("lambda1"),
                value("lambda2"),
                value("eta"),
                value("mu"),
                value("chi"),
            )
            .map(|params| Cell {
                params,
                tau: value("tau"),
                target_en: value("target_en"),
            });
            out.push((coords, cell));
        }
        Ok(out)
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = self.grid.iter().map(|a| a.name.clone()).collect();
        let extra: &[&str] = match self.kind {
            SweepKind::ContourLambda | SweepKind::Custom => &["en_numeric", "nu_min", "error"],
            SweepKind::TimeTrace => &["time_s", "en_numeric", "en_perturbative", "f_gra", "f_dec", "error"],
            SweepKind::TauEntScan => &["tau_ent_numeric_s", "tau_ent_asymptotic_s", "error"],
        };
        cols.extend(extra.iter().map(|s| s.to_string()));
        cols
    }

    /// Evaluates every cell. Per-cell solver errors land in the `error`
    /// column; the sweep itself fails only on an invalid specification.
    pub fn run(&self) -> Result<Vec<Vec<Value>>> {
        let cells = self.cells()?;
        let kind = self.kind;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.parallelism)
            .build()
            .context("building worker pool")?;
        let results: Vec<Vec<Value>> = pool.install(|| {
            cells
                .par_iter()
                .map(|(coords, cell)| {
                    let mut row: Vec<Value> = coords.iter().copied().map(Value::Num).collect();
                    row.extend(match cell {
                        Ok(cell) => evaluate(kind, cell),
                        Err(e) => error_tail(kind, &e.to_string()),
                    });
                    row
                })
                .collect()
        });
        Ok(results)
    }
}

fn error_tail(kind: SweepKind, message: &str) -> Vec<Value> {
    let width = match kind {
        SweepKind::ContourLambda | SweepKind::Custom => 2,
        SweepKind::TimeTrace => 5,
        SweepKind::TauEntScan => 2,
    };
    let mut v = vec![Value::Num(f64::NAN); width];
    v.push(Value::text(message));
    v
}

fn join_errors(errors: Vec<String>) -> Value {
    Value::text(errors.join("; "))
}

fn evaluate(kind: SweepKind, cell: &Cell) -> Vec<Value> {
    let p = &cell.params;
    match kind {
        SweepKind::ContourLambda | SweepKind::Custom => match entanglement::negativity_at(p, cell.tau) {
            Ok(r) => vec![r.log_negativity.into(), r.nu_min.into(), Value::empty()],
            Err(e) => error_tail(kind, &e.to_string()),
        },
        SweepKind::TimeTrace => {
            let mut errors = Vec::new();
            let mut take = |r: gravent_core::Result<f64>| match r {
                Ok(v) => Value::Num(v),
                Err(e) => {
                    errors.push(e.to_string());
                    Value::Num(f64::NAN)
                }
            };
            let numeric = take(entanglement::negativity_at(p, cell.tau).map(|r| r.log_negativity));
            let perturbative = take(analytic::negativity_perturbative(p, cell.tau));
            let (f_gra, f_dec) = match analytic::PerturbativeCurve::for_params(p).and_then(|c| c.evaluate(cell.tau)) {
                Ok((g, d)) => (Value::Num(g), Value::Num(d)),
                Err(_) => (Value::Num(f64::NAN), Value::Num(f64::NAN)),
            };
            errors.dedup();
            vec![
                p.seconds(cell.tau).into(),
                numeric,
                perturbative,
                f_gra,
                f_dec,
                join_errors(errors),
            ]
        }
        SweepKind::TauEntScan => {
            let mut errors = Vec::new();
            let numeric = analytic::tau_ent_numeric(p, cell.target_en).unwrap_or_else(|e| {
                errors.push(e.to_string());
                f64::NAN
            });
            let asymptotic = analytic::tau_ent(p, cell.target_en, false).unwrap_or_else(|e| {
                errors.push(e.to_string());
                f64::NAN
            });
            vec![numeric.into(), asymptotic.into(), join_errors(errors)]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_values() {
        let a = Axis::linear("lambda1", -1.0, 1.0, 41);
        let v = a.values().unwrap();
        assert_eq!(v.len(), 41);
        assert_eq!((v[0], v[20], v[40]), (-1.0, 0.0, 1.0));
        let log = Axis {
            spacing: Spacing::Log,
            ..Axis::linear("eta", 1e-14, 1e-10, 5)
        };
        let v = log.values().unwrap();
        assert_eq!((v[0], v[4]), (1e-14, 1e-10));
        assert!((v[2] / 1e-12 - 1.0).abs() < 1e-12);
        assert!(Axis::linear("lambda1", 0.0, 1.0, 1).values().is_err());
        assert!(Axis::linear("bogus", 0.0, 1.0, 3).values().is_err());
    }

    #[test]
    fn cells_are_row_major() {
        let mut spec = SweepSpec::contour(&RunInputs::default());
        spec.grid[0].count = 3;
        spec.grid[1].count = 2;
        let coords: Vec<Vec<f64>> = spec.cells().unwrap().into_iter().map(|c| c.0).collect();
        assert_eq!(
            coords,
            vec![
                vec![-1.0, -1.0],
                vec![-1.0, 1.0],
                vec![0.0, -1.0],
                vec![0.0, 1.0],
                vec![1.0, -1.0],
                vec![1.0, 1.0]
            ]
        );
    }
}
