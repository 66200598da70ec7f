//! Sweeps of one or two config parameters over a target command, one row per grid point.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::commands::{run_target, Target};
use crate::error::CliError;
use crate::output::{flatten, CommandOutput, RunContext, Table};

const MAX_AXES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Param {
    #[serde(rename = "delta")]
    Delta,
    #[serde(rename = "J")]
    J,
    #[serde(rename = "J_prime")]
    JPrime,
    #[serde(rename = "a")]
    A,
    #[serde(rename = "gamma0")]
    Gamma0,
}

impl Param {
    fn name(self) -> &'static str {
        match self {
            Param::Delta => "delta",
            Param::J => "J",
            Param::JPrime => "J_prime",
            Param::A => "a",
            Param::Gamma0 => "gamma0",
        }
    }

    fn is_integer(self) -> bool {
        matches!(self, Param::J | Param::JPrime)
    }

    fn check(self, v: f64) -> Result<(), CliError> {
        let ok = v.is_finite()
            && match self {
                Param::Delta | Param::Gamma0 => v > 0.0,
                Param::J | Param::JPrime => v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64,
                Param::A => v > 0.0 && v < 1.0,
            };
        if ok {
            Ok(())
        } else {
            Err(CliError::Axis(format!("{} = {v} is out of range", self.name())))
        }
    }

    /// Config location the parameter lives at for `target`.
    fn path(self, target: Target) -> Option<&'static [&'static str]> {
        let system = matches!(target, Target::String | Target::Beam);
        Some(match self {
            Param::Delta if target != Target::Continuum => &["delta"],
            Param::J if matches!(target, Target::Frame | Target::Haraux | Target::String | Target::Beam | Target::Continuum) => {
                &["J"]
            }
            Param::JPrime if target == Target::Haraux => &["J_prime"],
            Param::A if system => &["system", "a"],
            Param::Gamma0 if system => &["system", "gamma0"],
            Param::Gamma0 if matches!(target, Target::Gaps | Target::Frame | Target::Haraux | Target::Continuum) => {
                &["sequence", "gamma0"]
            }
            _ => return None,
        })
    }

    fn json(self, v: f64) -> Value {
        if self.is_integer() {
            json!(v as u64)
        } else {
            json!(v)
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: Param,
    pub values: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub target: Target,
    pub base: Value,
    #[serde(default)]
    pub axes: Vec<Axis>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanRow {
    pub params: BTreeMap<Param, f64>,
    #[serde(default)]
    pub report: Option<Value>,
    /// Key quantity differs from the previous row (classification or active set).
    #[serde(default)]
    pub changed: Option<bool>,
    #[serde(default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanReport {
    pub target: Target,
    pub axes: Vec<Axis>,
    pub rows: Vec<ScanRow>,
}

fn set_path(config: &mut Value, path: &[&str], v: Value) -> Result<(), CliError> {
    let (last, parents) = path.split_last().expect("nonempty path");
    let mut node = config;
    for key in parents {
        node = node
            .get_mut(*key)
            .ok_or_else(|| CliError::Usage(format!("scan base has no `{key}` object")))?;
    }
    let obj = node
        .as_object_mut()
        .ok_or_else(|| CliError::Usage("scan base must be a JSON object".into()))?;
    obj.insert(last.to_string(), v);
    Ok(())
}

/// Quantity whose change between consecutive rows is worth flagging.
fn change_key(target: Target, report: &Value) -> Option<Value> {
    match target {
        Target::Gaps | Target::Frame => report.get("classification").map(|c| json!([c["a2_leads"], c["partners"]])),
        Target::Continuum => report.get("active_count").cloned(),
        Target::Haraux => report.pointer("/extended/plan/active").cloned(),
        _ => None,
    }
}

fn grid_points(axes: &[Axis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

pub fn run(config: Value, ctx: &mut RunContext) -> Result<CommandOutput, CliError> {
    let cfg: ScanConfig = serde_json::from_value(config)?;
    if cfg.axes.len() > MAX_AXES {
        return Err(CliError::Usage(format!("at most {MAX_AXES} sweep axes, got {}", cfg.axes.len())));
    }
    if !cfg.base.is_object() {
        return Err(CliError::Usage("scan base must be a JSON object".into()));
    }
    for (i, axis) in cfg.axes.iter().enumerate() {
        if cfg.axes[..i].iter().any(|a| a.param == axis.param) {
            return Err(CliError::Usage(format!("axis {} given twice", axis.param.name())));
        }
        if axis.param.path(cfg.target).is_none() {
            return Err(CliError::Usage(format!(
                "axis {} does not apply to target {:?}",
                axis.param.name(),
                cfg.target
            )));
        }
        if axis.values.is_empty() {
            return Err(CliError::Axis(format!("{} has no values", axis.param.name())));
        }
        for &v in &axis.values {
            axis.param.check(v)?;
        }
    }

    let mut rows = Vec::new();
    let mut previous: Option<Value> = None;
    for point in grid_points(&cfg.axes) {
        let mut config = cfg.base.clone();
        let mut params = BTreeMap::new();
        for (axis, &v) in cfg.axes.iter().zip(&point) {
            let path = axis.param.path(cfg.target).expect("checked above");
            set_path(&mut config, path, axis.param.json(v))?;
            params.insert(axis.param, v);
        }
        let row = match run_target(cfg.target, config, ctx) {
            Ok(out) => {
                let key = change_key(cfg.target, &out.report);
                let changed = match (&previous, &key) {
                    (Some(p), Some(k)) => Some(p != k),
                    (None, Some(_)) => Some(false),
                    _ => None,
                };
                previous = key;
                ScanRow {
                    params,
                    report: Some(out.report),
                    changed,
                    error: None,
                }
            }
            Err(CliError::Library(e)) => ScanRow {
                params,
                report: None,
                changed: None,
                error: Some(e.to_string()),
            },
            Err(e) => return Err(e),
        };
        rows.push(row);
    }

    let table = tabulate(&cfg.axes, &rows);
    let report = ScanReport {
        target: cfg.target,
        axes: cfg.axes,
        rows,
    };
    Ok(CommandOutput::new(&report)?.with_table(table))
}

/// Axis columns, then every report scalar in order of first appearance, then `changed` and `error`.
fn tabulate(axes: &[Axis], rows: &[ScanRow]) -> Table {
    let flat: Vec<Vec<(String, Value)>> = rows
        .iter()
        .map(|r| {
            let mut cells = Vec::new();
            if let Some(rep) = &r.report {
                flatten("", rep, &mut cells);
            }
            cells
        })
        .collect();
    let mut report_cols: Vec<String> = Vec::new();
    let mut seen = HashSet::new();
    for (k, _) in flat.iter().flatten() {
        if seen.insert(k.as_str()) {
            report_cols.push(k.clone());
        }
    }
    let mut columns: Vec<String> = axes.iter().map(|a| format!("axis.{}", a.param.name())).collect();
    columns.extend(report_cols.iter().cloned());
    columns.push("changed".into());
    columns.push("error".into());

    let mut table = Table {
        columns,
        rows: Vec::new(),
    };
    for (row, cells) in rows.iter().zip(flat) {
        let cells: Map<String, Value> = cells.into_iter().collect();
        let mut out: Vec<Value> = axes.iter().map(|a| a.param.json(row.params[&a.param])).collect();
        out.extend(report_cols.iter().map(|c| cells.get(c).cloned().unwrap_or(Value::Null)));
        out.push(row.changed.map(Value::Bool).unwrap_or(Value::Null));
        out.push(row.error.clone().map(Value::String).unwrap_or(Value::Null));
        table.push(out);
    }
    table
}
