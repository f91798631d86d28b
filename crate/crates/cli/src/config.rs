//! Experiment configuration: defaults, then the named TOML table, then flags.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

/// Flags that override single configuration keys.
#[derive(Debug, Default, Args, Serialize)]
pub struct Overrides {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub k_grid: Option<Vec<usize>>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub ell: Option<usize>,
    /// Walk powers for ell-sweep.
    #[arg(long, value_delimiter = ',')]
    pub ells: Option<Vec<usize>>,
    #[arg(long)]
    pub seeds: Option<u64>,
    #[arg(long)]
    pub base_seed: Option<u64>,
    #[arg(long)]
    pub edge_list: Option<PathBuf>,
}

impl Overrides {
    fn entries(&self) -> Vec<(&'static str, &'static str, Value)> {
        let mut out = Vec::new();
        let mut push = |flag, key, v: Option<Value>| {
            if let Some(v) = v {
                out.push((flag, key, v));
            }
        };
        push("--n", "n", self.n.map(Value::from));
        push("--k-grid", "k_grid", self.k_grid.clone().map(Value::from));
        push("--kappa", "kappa", self.kappa.map(Value::from));
        push("--ell", "ell", self.ell.map(Value::from));
        push("--ells", "ells", self.ells.clone().map(Value::from));
        push("--seeds", "seeds", self.seeds.map(Value::from));
        push("--base-seed", "base_seed", self.base_seed.map(Value::from));
        push("--edge-list", "edge_list", self.edge_list.as_ref().map(|p| Value::from(p.display().to_string())));
        out
    }
}

/// The `name` table of a TOML document, as JSON.
pub fn load_section(path: &Path, name: &str) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| graphcoreset::Error::io(path, e))?;
    let doc: toml::Table = toml::from_str(&text).map_err(|e| graphcoreset::Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        reason: e.to_string(),
    })?;
    match doc.get(name) {
        Some(v) => Ok(serde_json::to_value(v).map_err(graphcoreset::Error::from)?),
        None => Ok(Value::Object(Map::new())),
    }
}

/// Resolves a configuration. `nested` names a sub-table that receives every
/// override its parent does not declare (the SBM settings of ell-sweep).
pub fn resolve<T>(section: Value, overrides: &Overrides, nested: Option<&str>) -> Result<T, CliError>
where
    T: DeserializeOwned + Serialize + Default,
{
    let defaults = serde_json::to_value(T::default()).map_err(graphcoreset::Error::from)?;
    let Value::Object(mut table) = section else {
        return Err(CliError::Usage("experiment configuration must be a table".into()));
    };
    for (flag, key, value) in overrides.entries() {
        if defaults.get(key).is_some() {
            table.insert(key.to_string(), value);
            continue;
        }
        let sub = nested.filter(|s| defaults[*s].get(key).is_some());
        let Some(sub) = sub else {
            return Err(CliError::Usage(format!("{flag} does not apply to this experiment")));
        };
        let inner = table.entry(sub.to_string()).or_insert_with(|| Value::Object(Map::new()));
        match inner {
            Value::Object(m) => {
                m.insert(key.to_string(), value);
            }
            _ => return Err(CliError::Usage(format!("`{sub}` must be a table"))),
        }
    }
    serde_json::from_value(Value::Object(table))
        .map_err(|e| CliError::Usage(format!("invalid experiment configuration: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use graphcoreset::eval::experiment::{EllSweepConfig, SbmIndicatorConfig};

    #[test]
    fn defaults_then_table_then_flags() {
        let section = serde_json::json!({ "n": 500, "seeds": 3 });
        let flags = Overrides {
            seeds: Some(7),
            ..Default::default()
        };
        let c: SbmIndicatorConfig = resolve(section, &flags, None).unwrap();
        assert_eq!((c.n, c.seeds, c.kappa), (500, 7, 0.8));
    }

    #[test]
    fn nested_overrides_reach_sub_table() {
        let flags = Overrides {
            n: Some(300),
            ells: Some(vec![1, 5]),
            ..Default::default()
        };
        let c: EllSweepConfig = resolve(Value::Object(Map::new()), &flags, Some("sbm")).unwrap();
        assert_eq!(c.sbm.n, 300);
        assert_eq!(c.ells, vec![1, 5]);
    }

    #[test]
    fn foreign_flag_and_unknown_key_rejected() {
        let flags = Overrides {
            edge_list: Some("x.txt".into()),
            ..Default::default()
        };
        let e = resolve::<SbmIndicatorConfig>(Value::Object(Map::new()), &flags, None).unwrap_err();
        assert!(e.to_string().contains("--edge-list"));
        let bad = serde_json::json!({ "nn": 5 });
        assert!(resolve::<SbmIndicatorConfig>(bad, &Overrides::default(), None).is_err());
    }
}
