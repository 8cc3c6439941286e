//! Run configuration: key-value config files, variable selections and
//! per-column transform pipelines.

use std::collections::HashMap;
use std::path::Path;

use tsecon::series::{Dataset, Frequency, TimeSeries};
use tsecon::Error;

/// Simple `key = value` config file (# starts a comment). Keys mirror the
/// long flag names; command-line flags win on conflict.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile, Error> {
        let text = std::fs::read_to_string(path)?;
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidArg(format!(
                    "config line {} is not `key = value`: {raw:?}",
                    lineno + 1
                ))
            })?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    /// Flag value if given, else the config entry.
    pub fn merge<'a>(&'a self, flag: Option<&'a str>, key: &str) -> Option<&'a str> {
        flag.or_else(|| self.get(key))
    }
}

/// One step of a column transform pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    Log,
    Diff(usize),
    Lag(usize),
    /// Hodrick-Prescott cyclical component; `None` uses the frequency's
    /// conventional lambda.
    HpCycle(Option<f64>),
}

/// `ALIAS=COLUMN:tf:tf` with the alias optional and transforms applied left
/// to right. Transform tokens: `log`, `diff`/`diff<k>`, `lag<k>`,
/// `hp`/`hp<lambda>`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarSpec {
    pub alias: Option<String>,
    pub column: String,
    pub transforms: Vec<Transform>,
}

fn parse_transform(token: &str) -> Result<Transform, Error> {
    let t = token.trim().to_ascii_lowercase();
    if t == "log" {
        return Ok(Transform::Log);
    }
    if let Some(rest) = t.strip_prefix("diff") {
        let k = if rest.is_empty() {
            1
        } else {
            rest.parse()
                .map_err(|_| Error::InvalidArg(format!("bad difference order in {token:?}")))?
        };
        return Ok(Transform::Diff(k));
    }
    if let Some(rest) = t.strip_prefix("lag") {
        let k = rest
            .parse()
            .map_err(|_| Error::InvalidArg(format!("bad lag count in {token:?}")))?;
        return Ok(Transform::Lag(k));
    }
    if let Some(rest) = t.strip_prefix("hp") {
        let lambda = if rest.is_empty() {
            None
        } else {
            Some(
                rest.parse()
                    .map_err(|_| Error::InvalidArg(format!("bad hp lambda in {token:?}")))?,
            )
        };
        return Ok(Transform::HpCycle(lambda));
    }
    Err(Error::InvalidArg(format!("unknown transform {token:?}")))
}

pub fn parse_var_specs(s: &str) -> Result<Vec<VarSpec>, Error> {
    let mut specs = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (alias, rest) = match part.split_once('=') {
            Some((a, r)) => (Some(a.trim().to_string()), r.trim()),
            None => (None, part),
        };
        let mut pieces = rest.split(':');
        let column = pieces
            .next()
            .filter(|c| !c.is_empty())
            .ok_or_else(|| Error::InvalidArg(format!("empty column in {part:?}")))?
            .to_string();
        let transforms = pieces.map(parse_transform).collect::<Result<Vec<_>, _>>()?;
        specs.push(VarSpec { alias, column, transforms });
    }
    if specs.is_empty() {
        return Err(Error::InvalidArg("no variables selected".into()));
    }
    Ok(specs)
}

/// Applies one spec against the loaded dataset.
pub fn apply_spec(
    spec: &VarSpec,
    data: &Dataset,
    frequency: Frequency,
) -> Result<TimeSeries, Error> {
    let mut series = data.get(&spec.column)?.clone();
    for t in &spec.transforms {
        series = match t {
            Transform::Log => series.log()?,
            Transform::Diff(k) => series.difference(*k)?,
            Transform::Lag(k) => series.lag(*k)?,
            Transform::HpCycle(lambda) => {
                let lambda = lambda.unwrap_or_else(|| frequency.default_hp_lambda());
                // Cyclical extraction needs a complete span: trim leading or
                // trailing gaps first.
                let complete = Dataset::new(vec![series])?.align(true)?.dataset;
                let (_, cycle) = tsecon::hp::hp_filter(&complete.series()[0], lambda)?;
                // Re-embed on the original index.
                let mut values = vec![None; data.index().len()];
                for i in 0..cycle.len() {
                    let p = cycle.index().period(i);
                    if let Some(pos) = data.index().position(&p) {
                        values[pos] = cycle.get(i);
                    }
                }
                TimeSeries::new(cycle.name(), data.index().clone(), values)?
            }
        };
    }
    if let Some(alias) = &spec.alias {
        series = series.with_name(alias.clone());
    }
    Ok(series)
}

/// Builds the working dataset from comma-separated variable specs; `None`
/// selects every column untransformed.
pub fn build_dataset(
    data: &Dataset,
    vars: Option<&str>,
    frequency: Frequency,
) -> Result<Dataset, Error> {
    match vars {
        None => Ok(data.clone()),
        Some(spec_str) => {
            let specs = parse_var_specs(spec_str)?;
            let series = specs
                .iter()
                .map(|s| apply_spec(s, data, frequency))
                .collect::<Result<Vec<_>, _>>()?;
            Dataset::new(series)
        }
    }
}
