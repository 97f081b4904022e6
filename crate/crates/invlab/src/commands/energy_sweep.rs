use std::path::PathBuf;

use invlab_core::map::Region;
use invlab_core::quadrature::{integrate_energy, EnergyEntry, Functional, QuadratureOptions};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{one, require};
use crate::config::resolve;
use crate::error::{CliError, Result};
use crate::exec::Rayon;
use crate::maps::AnyMap;
use crate::output::{csv_text, fmt_f64, json_document, json_text, num, OutDir};

#[derive(Debug, Clone, Default, clap::Args, Serialize)]
pub struct Args {
    /// Flat JSON config file; flags override its keys.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Comma-separated eps values.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long)]
    pub a: Option<f64>,
    /// Hölder exponent; the midpoint of the admissible interval if omitted.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Exponent of the divergence probe `J^-q`.
    #[arg(long)]
    pub probe_power: Option<f64>,
    #[arg(long)]
    pub max_cells: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub eps: Vec<f64>,
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_probe")]
    pub probe_power: f64,
    #[serde(default = "default_max_cells")]
    pub max_cells: usize,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_tol() -> f64 {
    1e-3
}

fn default_probe() -> f64 {
    2.0
}

fn default_max_cells() -> usize {
    QuadratureOptions::new(1e-3).max_cells
}

fn default_out() -> PathBuf {
    PathBuf::from("out/energy-sweep")
}

/// Column prefixes of the four functionals; the probe is the only one whose
/// failure to converge is not an error.
const COLUMNS: [&str; 4] = ["dirichlet", "jac_neg_power_a", "jac_neg_power_probe", "distortion"];

pub fn execute(args: &Args) -> Result<()> {
    let (cfg, resolved): (Config, Value) = resolve(args.config.as_deref(), args)?;
    let rows = run(&cfg, &resolved)?;
    println!("energy-sweep: {} rows written to {}", rows, cfg.out.display());
    Ok(())
}

fn header() -> Vec<String> {
    let mut h = vec!["eps".to_string(), "a".into(), "p".into()];
    for c in COLUMNS {
        h.push(c.into());
        h.push(format!("{c}_err"));
        h.push(format!("{c}_converged"));
        for r in Region::FAMILY {
            h.push(format!("{c}_{}", r.name()));
        }
    }
    h
}

fn csv_cells(e: &EnergyEntry) -> Vec<String> {
    let mut v = vec![fmt_f64(e.total), fmt_f64(e.est_error), e.converged.to_string()];
    for r in Region::FAMILY {
        v.push(e.per_region.iter().find(|x| x.region == r).map_or(String::new(), |x| fmt_f64(x.value)));
    }
    v
}

fn json_entry(e: &EnergyEntry) -> Value {
    let regions: serde_json::Map<String, Value> = e
        .per_region
        .iter()
        .map(|r| (r.region.name().to_string(), json!({"value": num(r.value), "est_error": num(r.est_error)})))
        .collect();
    json!({
        "functional": e.functional.name(),
        "total": num(e.total),
        "est_error": num(e.est_error),
        "converged": e.converged,
        "flagged_cells": e.flagged.len(),
        "cells": e.cells,
        "per_region": regions,
    })
}

/// Runs the sweep and writes `energy_sweep.csv` and `energy_sweep.json`.
/// Outputs are written even when an integral fails; the error is returned
/// afterwards. Returns the number of complete rows.
pub fn run(cfg: &Config, resolved: &Value) -> Result<usize> {
    require(!cfg.eps.is_empty(), || "eps list is empty".into())?;
    require(cfg.max_cells > 0, || "max_cells must be positive".into())?;
    let maps = cfg
        .eps
        .iter()
        .map(|&e| AnyMap::family_with(e, cfg.a, cfg.p))
        .collect::<Result<Vec<_>>>()?;
    let mut opts = QuadratureOptions::new(cfg.tol);
    opts.max_cells = cfg.max_cells;
    let functionals = [
        Functional::Dirichlet,
        Functional::JacNegPower(cfg.a),
        Functional::JacNegPower(cfg.probe_power),
        Functional::Distortion,
    ];
    let mut csv_rows = Vec::new();
    let mut json_rows = Vec::new();
    let mut unconverged = Vec::new();
    let mut failure = None;
    'sweep: for (&eps, map) in cfg.eps.iter().zip(&maps) {
        let p = match map {
            AnyMap::Family(f) => f.params().p,
            _ => unreachable!(),
        };
        let mut row = vec![fmt_f64(eps), fmt_f64(cfg.a), fmt_f64(p)];
        let mut obj = serde_json::Map::new();
        obj.insert("eps".into(), num(eps));
        obj.insert("a".into(), num(cfg.a));
        obj.insert("p".into(), num(p));
        for (k, f) in functionals.iter().enumerate() {
            match integrate_energy(map, *f, &opts, &Rayon) {
                Ok(e) => {
                    if !e.converged && COLUMNS[k] != "jac_neg_power_probe" {
                        unconverged.push(format!("{} at eps {eps}", COLUMNS[k]));
                    }
                    row.extend(csv_cells(&e));
                    obj.insert(COLUMNS[k].into(), json_entry(&e));
                }
                Err(e) => {
                    failure = Some(CliError::from(e));
                    break 'sweep;
                }
            }
        }
        csv_rows.push(row);
        json_rows.push(Value::Object(obj));
    }
    let out = OutDir::new(&cfg.out);
    out.write("energy_sweep.csv", &csv_text(&header(), &csv_rows, resolved)?)?;
    let doc = json_document(
        "energy-sweep",
        resolved,
        json!({ "rows": json_rows, "complete": failure.is_none(), "unconverged": unconverged }),
    );
    out.write("energy_sweep.json", &json_text(&doc))?;
    if let Some(e) = failure {
        return Err(e);
    }
    if !unconverged.is_empty() {
        return Err(CliError::Aborted(format!("quadrature flagged: {}", unconverged.join(", "))));
    }
    Ok(csv_rows.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(eps: Vec<f64>, dir: &std::path::Path) -> Config {
        Config {
            eps,
            a: 1.0,
            p: None,
            tol: 1e-2,
            probe_power: 2.0,
            max_cells: 2000,
            out: dir.to_path_buf(),
        }
    }

    #[test]
    fn empty_list_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let e = run(&cfg(vec![], dir.path()), &Value::Null).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn rows_and_columns_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(vec![0.4], dir.path());
        let resolved = serde_json::to_value(&c).unwrap();
        // the small cell budget leaves the diverging probe unconverged only
        let r = run(&c, &resolved);
        let text = std::fs::read_to_string(dir.path().join("energy_sweep.csv")).unwrap();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let head = rd.headers().unwrap().clone();
        assert_eq!(head.len(), header().len() + 2);
        let recs: Vec<_> = rd.records().map(|r| r.unwrap()).collect();
        assert_eq!(recs.len(), 1);
        let col = |name: &str| head.iter().position(|h| h == name).unwrap();
        assert_eq!(&recs[0][col("eps")], "0.4");
        let total: f64 = recs[0][col("dirichlet")].parse().unwrap();
        let parts: f64 = Region::FAMILY
            .iter()
            .map(|r| recs[0][col(&format!("dirichlet_{}", r.name()))].parse::<f64>().unwrap())
            .sum();
        assert!((total - parts).abs() < 1e-9 * total);
        let doc: Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("energy_sweep.json")).unwrap()).unwrap();
        assert_eq!(doc["format_version"], 1);
        assert_eq!(doc["config"], resolved);
        assert_eq!(doc["rows"][0]["eps"], 0.4);
        match r {
            Ok(n) => assert_eq!(n, 1),
            Err(e) => assert!(e.to_string().contains("jac_neg_power_a") || e.to_string().contains("distortion") || e.to_string().contains("dirichlet"), "{e}"),
        }
    }
}
