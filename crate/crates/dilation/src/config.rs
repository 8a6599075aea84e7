//! Run configuration: a flat key = value file with section headers, plus
//! command-line overrides. Parsing is hand-rolled so configs stay diffable
//! and dependency-free.
//!
//! ```text
//! [system]
//! id = cat_map
//!
//! [params]
//! K = 1.5
//!
//! [run]
//! k_list = 1,2
//! seed = 42
//! n_schedule = 1..20
//! n_l_schedule = 200,1000,5000
//! m_list = 1,2,5,10
//! tolerance = 0.05
//!
//! [output]
//! report = dilation_report.txt
//! ```
//!
//! Integer lists accept comma-separated entries and inclusive `a..b` ranges.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::lyapunov::TheoremConfig;
use crate::numeric::fmt_g17;
use crate::volume::DilationMethod;

/// Fully resolved run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub system_id: String,
    pub params: BTreeMap<String, f64>,
    /// Empty means "every k from 1 to the system dimension".
    pub k_list: Vec<usize>,
    pub budget: usize,
    pub seed: u64,
    pub n_schedule: Vec<usize>,
    pub n_l_schedule: Vec<usize>,
    pub m_list: Vec<usize>,
    pub nodes_per_axis: Option<usize>,
    pub truncation_r: f64,
    pub tolerance: f64,
    pub method: DilationMethod,
    pub test_functions: usize,
    pub report_path: PathBuf,
    pub csv: bool,
    pub cache_dir: Option<PathBuf>,
}

/// Raw parsed key/value pairs, keyed by (section, key).
type RawConfig = BTreeMap<(String, String), String>;

const SECTIONS: &[&str] = &["system", "params", "run", "output"];
const SYSTEM_KEYS: &[&str] = &["id"];
const RUN_KEYS: &[&str] = &[
    "k_list",
    "budget",
    "seed",
    "n_schedule",
    "n_l_schedule",
    "m_list",
    "nodes_per_axis",
    "truncation_r",
    "tolerance",
    "method",
    "test_functions",
];
const OUTPUT_KEYS: &[&str] = &["report", "csv", "cache"];

/// Parse the config file text and apply `section.key=value` overrides.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut raw = parse_raw(text)?;
    for item in overrides {
        let (path, value) = item.split_once('=').ok_or_else(|| {
            Error::Config(format!("--set expects SECTION.KEY=VALUE, got `{item}`"))
        })?;
        let (section, key) = path.trim().split_once('.').ok_or_else(|| {
            Error::Config(format!("--set expects SECTION.KEY=VALUE, got `{item}`"))
        })?;
        check_section_key(section, key)?;
        raw.insert(
            (section.to_string(), key.to_string()),
            value.trim().to_string(),
        );
    }
    build(&raw)
}

fn parse_raw(text: &str) -> Result<RawConfig> {
    let mut raw = RawConfig::new();
    let mut section = String::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| {
                Error::Config(format!("line {}: malformed section header", lineno + 1))
            })?;
            if !SECTIONS.contains(&name) {
                return Err(Error::Config(format!(
                    "line {}: unknown section [{name}] (expected one of {SECTIONS:?})",
                    lineno + 1
                )));
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "line {}: expected `key = value`, got `{line}`",
                lineno + 1
            ))
        })?;
        let key = key.trim().to_string();
        if section.is_empty() {
            return Err(Error::Config(format!(
                "line {}: `{key}` appears before any section header",
                lineno + 1
            )));
        }
        check_section_key(&section, &key)?;
        raw.insert((section.clone(), key), value.trim().to_string());
    }
    Ok(raw)
}

fn check_section_key(section: &str, key: &str) -> Result<()> {
    let ok = match section {
        "system" => SYSTEM_KEYS.contains(&key),
        "params" => true,
        "run" => RUN_KEYS.contains(&key),
        "output" => OUTPUT_KEYS.contains(&key),
        other => {
            return Err(Error::Config(format!(
                "unknown section `{other}` (expected one of {SECTIONS:?})"
            )))
        }
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "unknown key `{key}` in section [{section}]"
        )))
    }
}

fn build(raw: &RawConfig) -> Result<RunConfig> {
    let get = |section: &str, key: &str| -> Option<&String> {
        raw.get(&(section.to_string(), key.to_string()))
    };

    let system_id = get("system", "id")
        .ok_or_else(|| Error::Config("system.id: required".into()))?
        .clone();

    let mut params = BTreeMap::new();
    for ((section, key), value) in raw {
        if section == "params" {
            params.insert(key.clone(), parse_f64("params", key, value)?);
        }
    }

    let seed = match get("run", "seed") {
        Some(v) => parse_u64("run", "seed", v)?,
        None => {
            return Err(Error::Config(
                "run.seed: required (determinism contract)".into(),
            ))
        }
    };

    let config = RunConfig {
        system_id,
        params,
        k_list: match get("run", "k_list") {
            Some(v) => parse_usize_list("run", "k_list", v)?,
            None => Vec::new(),
        },
        budget: match get("run", "budget") {
            Some(v) => parse_usize("run", "budget", v)?,
            None => 8,
        },
        seed,
        n_schedule: match get("run", "n_schedule") {
            Some(v) => parse_usize_list("run", "n_schedule", v)?,
            None => (1..=50).collect(),
        },
        n_l_schedule: match get("run", "n_l_schedule") {
            Some(v) => parse_usize_list("run", "n_l_schedule", v)?,
            None => vec![200, 1000, 5000],
        },
        m_list: match get("run", "m_list") {
            Some(v) => parse_usize_list("run", "m_list", v)?,
            None => vec![1, 2, 5, 10],
        },
        nodes_per_axis: match get("run", "nodes_per_axis") {
            Some(v) => Some(parse_usize("run", "nodes_per_axis", v)?),
            None => None,
        },
        truncation_r: match get("run", "truncation_r") {
            Some(v) => parse_f64("run", "truncation_r", v)?,
            None => 50.0,
        },
        tolerance: match get("run", "tolerance") {
            Some(v) => parse_f64("run", "tolerance", v)?,
            None => 0.05,
        },
        method: match get("run", "method") {
            Some(v) => DilationMethod::parse(v)?,
            None => DilationMethod::SlopeFit,
        },
        test_functions: match get("run", "test_functions") {
            Some(v) => parse_usize("run", "test_functions", v)?,
            None => 20,
        },
        report_path: PathBuf::from(
            get("output", "report")
                .cloned()
                .unwrap_or_else(|| "dilation_report.txt".to_string()),
        ),
        csv: match get("output", "csv") {
            Some(v) => parse_bool("output", "csv", v)?,
            None => false,
        },
        cache_dir: get("output", "cache").map(PathBuf::from),
    };
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    /// Field-level validation; usage errors happen before any computation.
    pub fn validate(&self) -> Result<()> {
        if self.system_id.is_empty() {
            return Err(Error::Config("system.id: must be nonempty".into()));
        }
        for (name, list) in [
            ("run.k_list", &self.k_list),
            ("run.n_schedule", &self.n_schedule),
            ("run.n_l_schedule", &self.n_l_schedule),
            ("run.m_list", &self.m_list),
        ] {
            if name != "run.k_list" && list.is_empty() {
                return Err(Error::Config(format!("{name}: must be nonempty")));
            }
            if !list.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::Config(format!(
                    "{name}: must be strictly increasing, got {list:?}"
                )));
            }
        }
        if self.n_schedule[0] < 1 {
            return Err(Error::Config("run.n_schedule: entries must be >= 1".into()));
        }
        let max_m = *self.m_list.last().unwrap();
        if max_m >= self.n_l_schedule[0] {
            return Err(Error::Config(format!(
                "run.m_list: every m must stay below every n_l (m = {max_m} >= n_l = {})",
                self.n_l_schedule[0]
            )));
        }
        if self.truncation_r < 0.0 {
            return Err(Error::Config("run.truncation_r: must be >= 0".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::Config("run.tolerance: must be >= 0".into()));
        }
        if self.test_functions < 1 {
            return Err(Error::Config("run.test_functions: must be >= 1".into()));
        }
        Ok(())
    }

    pub fn to_theorem_config(&self) -> TheoremConfig {
        TheoremConfig {
            family_budget: self.budget,
            seed: self.seed,
            n_schedule: self.n_schedule.clone(),
            n_l_schedule: self.n_l_schedule.clone(),
            m_list: self.m_list.clone(),
            nodes_per_axis: self.nodes_per_axis,
            truncation_r: self.truncation_r,
            tolerance: self.tolerance,
            method: self.method,
            test_functions: self.test_functions,
            cache_dir: self.cache_dir.clone(),
        }
    }

    /// Canonical echo of every resolved field; the config hash is computed
    /// over these bytes and the report embeds them verbatim.
    pub fn canonical_echo(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("system.id = {}\n", self.system_id));
        for (k, v) in &self.params {
            out.push_str(&format!("params.{k} = {}\n", fmt_g17(*v)));
        }
        let list = |v: &Vec<usize>| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        out.push_str(&format!(
            "run.k_list = {}\n",
            if self.k_list.is_empty() {
                "all".to_string()
            } else {
                list(&self.k_list)
            }
        ));
        out.push_str(&format!("run.budget = {}\n", self.budget));
        out.push_str(&format!("run.seed = {}\n", self.seed));
        out.push_str(&format!("run.n_schedule = {}\n", list(&self.n_schedule)));
        out.push_str(&format!(
            "run.n_l_schedule = {}\n",
            list(&self.n_l_schedule)
        ));
        out.push_str(&format!("run.m_list = {}\n", list(&self.m_list)));
        out.push_str(&format!(
            "run.nodes_per_axis = {}\n",
            self.nodes_per_axis
                .map_or("default".to_string(), |n| n.to_string())
        ));
        out.push_str(&format!("run.truncation_r = {}\n", fmt_g17(self.truncation_r)));
        out.push_str(&format!("run.tolerance = {}\n", fmt_g17(self.tolerance)));
        out.push_str(&format!("run.method = {}\n", self.method.name()));
        out.push_str(&format!("run.test_functions = {}\n", self.test_functions));
        out.push_str(&format!("output.report = {}\n", self.report_path.display()));
        out.push_str(&format!("output.csv = {}\n", self.csv));
        out.push_str(&format!(
            "output.cache = {}\n",
            self.cache_dir
                .as_ref()
                .map_or("none".to_string(), |p| p.display().to_string())
        ));
        out
    }
}

fn parse_f64(section: &str, key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| Error::Config(format!("{section}.{key}: expected a number, got `{v}`")))
}

fn parse_u64(section: &str, key: &str, v: &str) -> Result<u64> {
    v.parse::<u64>().map_err(|_| {
        Error::Config(format!(
            "{section}.{key}: expected a nonnegative integer, got `{v}`"
        ))
    })
}

fn parse_usize(section: &str, key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>().map_err(|_| {
        Error::Config(format!(
            "{section}.{key}: expected a nonnegative integer, got `{v}`"
        ))
    })
}

fn parse_bool(section: &str, key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!(
            "{section}.{key}: expected true/false, got `{v}`"
        ))),
    }
}

/// Comma-separated integers; a token `a..b` expands to the inclusive range.
pub fn parse_usize_list(section: &str, key: &str, v: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for token in v.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        if let Some((a, b)) = token.split_once("..") {
            let a = parse_usize(section, key, a.trim())?;
            let b = parse_usize(section, key, b.trim())?;
            if a > b {
                return Err(Error::Config(format!(
                    "{section}.{key}: empty range `{token}`"
                )));
            }
            out.extend(a..=b);
        } else {
            out.push(parse_usize(section, key, token)?);
        }
    }
    Ok(out)
}
