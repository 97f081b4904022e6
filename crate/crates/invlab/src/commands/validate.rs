use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::acceptance::{run_criterion, CriterionResult, SuiteOptions, CRITERIA};
use crate::config::resolve;
use crate::error::{CliError, Result};
use crate::output::{json_document, json_text, OutDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    None,
    /// Compose the maps of the degree and Jacobian criteria with `z -> -z`.
    SignFlip,
}

#[derive(Debug, Clone, Default, clap::Args, Serialize)]
pub struct Args {
    /// Flat JSON config file; flags override its keys.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub mutate: Option<Mutation>,
    /// Fixed icosphere level for the degree criteria, without refinement.
    #[arg(long)]
    pub mesh_level: Option<u32>,
    /// Comma-separated criterion ids; all ten by default.
    #[arg(long, value_delimiter = ',')]
    pub criteria: Option<Vec<u8>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    #[serde(default = "no_mutation")]
    pub mutate: Mutation,
    #[serde(default)]
    pub mesh_level: Option<u32>,
    #[serde(default = "all_criteria")]
    pub criteria: Vec<u8>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn no_mutation() -> Mutation {
    Mutation::None
}

fn all_criteria() -> Vec<u8> {
    CRITERIA.iter().map(|c| c.0).collect()
}

fn default_out() -> PathBuf {
    PathBuf::from("out/validate")
}

pub fn execute(args: &Args) -> Result<()> {
    let (cfg, resolved): (Config, Value) = resolve(args.config.as_deref(), args)?;
    let results = run(&cfg, &resolved, |r| println!("{}", r.line()))?;
    verdict(&results)
}

/// Runs the selected criteria in order, calling `progress` after each, and
/// writes `validate.json`.
pub fn run(cfg: &Config, resolved: &Value, mut progress: impl FnMut(&CriterionResult)) -> Result<Vec<CriterionResult>> {
    if cfg.criteria.is_empty() {
        return Err(CliError::Config("criteria list is empty".into()));
    }
    let opts = SuiteOptions {
        seed: cfg.seed,
        sign_flip: cfg.mutate == Mutation::SignFlip,
        mesh_level: cfg.mesh_level,
    };
    let mut results = Vec::new();
    for &id in &cfg.criteria {
        let r = run_criterion(id, &opts)?;
        progress(&r);
        results.push(r);
    }
    let ids = |f: fn(&CriterionResult) -> bool| results.iter().filter(|r| f(r)).map(|r| r.id).collect::<Vec<_>>();
    let body = json!({
        "passed": results.iter().all(|r| r.passed),
        "failed": ids(|r| !r.passed && !r.aborted),
        "aborted": ids(|r| r.aborted),
        "criteria": results,
    });
    OutDir::new(&cfg.out).write("validate.json", &json_text(&json_document("validate", resolved, body)))?;
    Ok(results)
}

/// Exit status of a suite run: aborts take precedence over failures.
pub fn verdict(results: &[CriterionResult]) -> Result<()> {
    let aborted: Vec<String> = results.iter().filter(|r| r.aborted).map(|r| r.id.to_string()).collect();
    if !aborted.is_empty() {
        return Err(CliError::Aborted(format!("criteria aborted: {}", aborted.join(", "))));
    }
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
    if !failed.is_empty() {
        return Err(CliError::CriteriaFailed(format!("criteria failed: {}", failed.join(", "))));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(v: Value, dir: &std::path::Path) -> Config {
        let mut v = v;
        v["out"] = json!(dir);
        serde_json::from_value(v).unwrap()
    }

    #[test]
    fn cap_criterion_passes_and_report_is_written() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(json!({"seed": 1, "criteria": [9]}), dir.path());
        let resolved = serde_json::to_value(&c).unwrap();
        let mut lines = Vec::new();
        let rs = run(&c, &resolved, |r| lines.push(r.line())).unwrap();
        assert!(rs[0].passed, "{}", lines[0]);
        assert!(lines[0].starts_with("criterion 9: PASS"));
        assert!(verdict(&rs).is_ok());
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("validate.json")).unwrap()).unwrap();
        assert_eq!(doc["passed"], true);
        assert_eq!(doc["criteria"][0]["id"], 9);
    }

    #[test]
    fn sign_flip_fails_the_degree_oracles() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(json!({"seed": 1, "criteria": [3], "mutate": "sign-flip"}), dir.path());
        let rs = run(&c, &Value::Null, |_| {}).unwrap();
        assert!(!rs[0].passed && !rs[0].aborted, "{}", rs[0].line());
        assert_eq!(verdict(&rs).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn coarse_mesh_surfaces_an_abort() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(json!({"seed": 1, "criteria": [4], "mesh_level": 1}), dir.path());
        let rs = run(&c, &Value::Null, |_| {}).unwrap();
        assert!(rs[0].aborted, "{}", rs[0].line());
        assert_eq!(verdict(&rs).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn unknown_ids_and_missing_seed_are_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(json!({"seed": 1, "criteria": [12]}), dir.path());
        assert_eq!(run(&c, &Value::Null, |_| {}).unwrap_err().exit_code(), 2);
        assert!(serde_json::from_value::<Config>(json!({})).is_err());
    }
}
