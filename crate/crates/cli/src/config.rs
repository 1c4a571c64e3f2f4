//! Line-oriented `key = value` run configuration.
//!
//! ```text
//! # Fig. 2 style run
//! J = 1
//! chi = 0.3
//! B = 4
//! b = 2            # or `b = B` to tie the splitting to the field
//! TM = 1           # either TM/dT or TL/TR
//! dT = 0.4
//! Gamma_L = 1
//! Gamma_R = 0.25
//! sweep = D 0 6 0.05
//! sweep2 = TR 0.05 1 0.05
//! series = dT 0.4 1 1.6
//! columns = R, J_plus, J_minus
//! out = fig2.csv
//! ```

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::sweep::Column;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config line {line}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

fn at(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError { line: Some(line), message: message.into() }
}

fn global(message: impl Into<String>) -> ConfigError {
    ConfigError { line: None, message: message.into() }
}

/// Quantities that may be swept or listed in a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    D,
    B,
    SmallB,
    Chi,
    TR,
    DT,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::D => "D",
            Var::B => "B",
            Var::SmallB => "b",
            Var::Chi => "chi",
            Var::TR => "TR",
            Var::DT => "dT",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Var::D | Var::Chi => "1",
            Var::B | Var::SmallB | Var::TR | Var::DT => "J",
        }
    }
}

impl FromStr for Var {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "D" => Var::D,
            "B" => Var::B,
            "b" => Var::SmallB,
            "chi" => Var::Chi,
            "TR" => Var::TR,
            "dT" => Var::DT,
            _ => return Err(format!("unknown sweep variable `{s}` (expected D, B, b, chi, TR or dT)")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub var: Var,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Sweep {
    /// Grid `start, start + step, …` up to `stop` inclusive; `start == stop`
    /// is a single point.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| snap(self.start + i as f64 * self.step)).collect()
    }
}

/// Rounds away accumulated last-digit noise (`0.15000000000000002` → `0.15`).
fn snap(x: f64) -> f64 {
    format!("{x:.12}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub var: Var,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperatures {
    /// `T_L = TM + dT/2`, `T_R = TM − dT/2`.
    Bias { mean: Option<f64>, delta: Option<f64> },
    Explicit { left: Option<f64>, right: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Splitting {
    Fixed(f64),
    /// `b = B`.
    Linked,
    Free,
}

/// Values fixed by the config file; `None` marks a swept quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub exchange: f64,
    pub anisotropy: Option<f64>,
    pub dm: Option<f64>,
    pub field: Option<f64>,
    pub splitting: Splitting,
    pub temperatures: Temperatures,
    pub gamma_left: f64,
    pub gamma_right: f64,
    pub series: Option<Series>,
    /// Outer axis first.
    pub sweeps: Vec<Sweep>,
    pub columns: Option<Vec<Column>>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn varying(&self) -> Vec<Var> {
        self.series.iter().map(|s| s.var).chain(self.sweeps.iter().map(|s| s.var)).collect()
    }

    pub fn is_single_point(&self) -> bool {
        self.series.is_none() && self.sweeps.is_empty()
    }

    fn fixed(&self, var: Var) -> bool {
        match var {
            Var::D => self.dm.is_some(),
            Var::B => self.field.is_some(),
            Var::SmallB => !matches!(self.splitting, Splitting::Free),
            Var::Chi => self.anisotropy.is_some(),
            Var::TR => matches!(self.temperatures, Temperatures::Explicit { right: Some(_), .. }),
            Var::DT => matches!(self.temperatures, Temperatures::Bias { delta: Some(_), .. }),
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let varying = self.varying();
        let mut seen = HashSet::new();
        for var in &varying {
            if !seen.insert(*var) {
                return Err(global(format!("{} is varied more than once", var.name())));
            }
            if self.fixed(*var) {
                return Err(global(format!("{} is both fixed and varied", var.name())));
            }
            match (var, &self.temperatures) {
                (Var::TR, Temperatures::Bias { .. }) => {
                    return Err(global("sweeping TR requires the TL/TR temperature form"))
                }
                (Var::DT, Temperatures::Explicit { .. }) => {
                    return Err(global("sweeping dT requires the TM/dT temperature form"))
                }
                _ => {}
            }
        }
        let required: [(Var, &str); 6] = [
            (Var::Chi, "chi"),
            (Var::D, "D"),
            (Var::B, "B"),
            (Var::SmallB, "b"),
            (Var::TR, "TR"),
            (Var::DT, "dT"),
        ];
        for (var, key) in required {
            let applies = !matches!(
                (var, &self.temperatures),
                (Var::TR, Temperatures::Bias { .. }) | (Var::DT, Temperatures::Explicit { .. })
            );
            if applies && !self.fixed(var) && !seen.contains(&var) {
                return Err(global(format!("missing required key `{key}`")));
            }
        }
        match self.temperatures {
            Temperatures::Bias { mean: None, .. } => return Err(global("missing required key `TM`")),
            Temperatures::Explicit { left: None, .. } => return Err(global("missing required key `TL`")),
            _ => {}
        }
        Ok(())
    }
}

fn number(line: usize, key: &str, text: &str) -> Result<f64, ConfigError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| at(line, format!("`{key}`: malformed number `{}`", text.trim())))?;
    if !v.is_finite() {
        return Err(at(line, format!("`{key}`: value must be finite")));
    }
    Ok(v)
}

fn parse_sweep(line: usize, key: &str, value: &str) -> Result<Sweep, ConfigError> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    let [var, start, stop, step] = parts.as_slice() else {
        return Err(at(line, format!("`{key}` expects `VAR start stop step`")));
    };
    let var = var.parse().map_err(|e: String| at(line, e))?;
    let sweep = Sweep {
        var,
        start: number(line, key, start)?,
        stop: number(line, key, stop)?,
        step: number(line, key, step)?,
    };
    if !(sweep.step > 0.0) {
        return Err(at(line, format!("`{key}`: step must be > 0")));
    }
    if sweep.start > sweep.stop {
        return Err(at(line, format!("`{key}`: start must not exceed stop")));
    }
    Ok(sweep)
}

fn parse_series(line: usize, value: &str) -> Result<Series, ConfigError> {
    let mut parts = value.split_whitespace();
    let var = parts
        .next()
        .ok_or_else(|| at(line, "`series` expects `VAR v1 v2 …`"))?
        .parse()
        .map_err(|e: String| at(line, e))?;
    let values = parts.map(|p| number(line, "series", p)).collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(at(line, "`series` needs at least one value"));
    }
    Ok(Series { var, values })
}

fn parse_columns(line: usize, value: &str) -> Result<Vec<Column>, ConfigError> {
    value
        .split(',')
        .map(|c| c.trim().parse::<Column>().map_err(|e| at(line, e)))
        .collect()
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut seen_keys: HashSet<String> = HashSet::new();
    let mut exchange = None;
    let mut anisotropy = None;
    let mut dm = None;
    let mut field = None;
    let mut splitting = Splitting::Free;
    let (mut tm, mut dt, mut tl, mut tr) = (None, None, None, None);
    let (mut gl, mut gr) = (None, None);
    let mut series = None;
    let (mut sweep1, mut sweep2) = (None, None);
    let mut columns = None;
    let mut out = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| at(line, format!("expected `key = value`, got `{content}`")))?;
        let key = key.trim();
        let value = value.trim();
        if !seen_keys.insert(key.to_string()) {
            return Err(at(line, format!("duplicate key `{key}`")));
        }
        match key {
            "J" => exchange = Some(number(line, key, value)?),
            "chi" => anisotropy = Some(number(line, key, value)?),
            "D" => dm = Some(number(line, key, value)?),
            "B" => field = Some(number(line, key, value)?),
            "b" => {
                splitting = if value == "B" { Splitting::Linked } else { Splitting::Fixed(number(line, key, value)?) }
            }
            "TM" => tm = Some(number(line, key, value)?),
            "dT" => dt = Some(number(line, key, value)?),
            "TL" => tl = Some(number(line, key, value)?),
            "TR" => tr = Some(number(line, key, value)?),
            "Gamma_L" => gl = Some(number(line, key, value)?),
            "Gamma_R" => gr = Some(number(line, key, value)?),
            "sweep" => sweep1 = Some(parse_sweep(line, key, value)?),
            "sweep2" => sweep2 = Some((line, parse_sweep(line, key, value)?)),
            "series" => series = Some(parse_series(line, value)?),
            "columns" => columns = Some(parse_columns(line, value)?),
            "out" => out = Some(PathBuf::from(value)),
            _ => return Err(at(line, format!("unknown key `{key}`"))),
        }
    }

    let bias_form = tm.is_some() || dt.is_some();
    let explicit_form = tl.is_some() || tr.is_some();
    let sweeps_t: Vec<Var> = [&sweep1, &sweep2.as_ref().map(|(_, s)| s.clone())]
        .iter()
        .filter_map(|s| s.as_ref().map(|s| s.var))
        .chain(series.as_ref().map(|s: &Series| s.var))
        .collect();
    let temperatures = match (bias_form, explicit_form) {
        (true, true) => return Err(global("both TM/dT and TL/TR temperature forms given; use exactly one")),
        (true, false) => Temperatures::Bias { mean: tm, delta: dt },
        (false, true) => Temperatures::Explicit { left: tl, right: tr },
        (false, false) if sweeps_t.contains(&Var::DT) => Temperatures::Bias { mean: None, delta: None },
        (false, false) if sweeps_t.contains(&Var::TR) => Temperatures::Explicit { left: None, right: None },
        (false, false) => return Err(global("missing temperatures: give TM and dT, or TL and TR")),
    };
    let mut sweeps = Vec::new();
    if let Some(s) = sweep1 {
        sweeps.push(s);
    }
    if let Some((line, s)) = sweep2 {
        if sweeps.is_empty() {
            return Err(at(line, "`sweep2` requires `sweep`"));
        }
        sweeps.push(s);
    }
    let cfg = RunConfig {
        exchange: exchange.ok_or_else(|| global("missing required key `J`"))?,
        anisotropy,
        dm,
        field,
        splitting,
        temperatures,
        gamma_left: gl.ok_or_else(|| global("missing required key `Gamma_L`"))?,
        gamma_right: gr.ok_or_else(|| global("missing required key `Gamma_R`"))?,
        series,
        sweeps,
        columns,
        out,
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "J = 1\nchi = 0.3\nD = 0\nB = 4\nb = 2\nTM = 1\ndT = 0.4\nGamma_L = 1\nGamma_R = 0.25\n";

    #[test]
    fn minimal_bias_form() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.temperatures, Temperatures::Bias { mean: Some(1.0), delta: Some(0.4) });
        assert_eq!(cfg.splitting, Splitting::Fixed(2.0));
        assert!(cfg.is_single_point());
    }

    #[test]
    fn both_temperature_forms_rejected() {
        let err = parse_config(&format!("{MINIMAL}TL = 1.2\n")).unwrap_err();
        assert!(err.message.contains("both"));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = format!("# header\n\n{}", MINIMAL.replace("D = 0", "D = 0   # inline"));
        assert_eq!(parse_config(&text).unwrap().dm, Some(0.0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_config("J = 1\nchi = abc\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        let err = parse_config(&format!("{MINIMAL}colour = red\n")).unwrap_err();
        assert_eq!(err.line, Some(10));
        assert!(err.message.contains("unknown key"));
        let err = parse_config(&format!("{MINIMAL}J = 2\n")).unwrap_err();
        assert!(err.message.contains("duplicate"));
        let err = parse_config("J = 1\nnonsense\n").unwrap_err();
        assert_eq!(err.line, Some(2));
    }

    #[test]
    fn missing_keys() {
        let err = parse_config(&MINIMAL.replace("chi = 0.3\n", "")).unwrap_err();
        assert!(err.message.contains("`chi`"), "{err}");
        let err = parse_config(&MINIMAL.replace("Gamma_R = 0.25\n", "")).unwrap_err();
        assert!(err.message.contains("Gamma_R"));
        let err = parse_config(&MINIMAL.replace("TM = 1\ndT = 0.4\n", "")).unwrap_err();
        assert!(err.message.contains("temperatures"));
    }

    #[test]
    fn sweep_rules() {
        let base = MINIMAL.replace("D = 0\n", "");
        let cfg = parse_config(&format!("{base}sweep = D 0 1 0.25\n")).unwrap();
        assert_eq!(cfg.sweeps[0].values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let err = parse_config(&format!("{MINIMAL}sweep = D 0 1 0.25\n")).unwrap_err();
        assert!(err.message.contains("both fixed and varied"));
        assert!(parse_config(&format!("{base}sweep = D 0 1 0\n")).is_err());
        assert!(parse_config(&format!("{base}sweep = D 2 1 0.1\n")).is_err());
        assert!(parse_config(&format!("{base}sweep = Q 0 1 0.1\n")).is_err());
        let single = parse_config(&format!("{base}sweep = D 1.5 1.5 0.1\n")).unwrap();
        assert_eq!(single.sweeps[0].values(), vec![1.5]);
        let err = parse_config(&format!("{MINIMAL}sweep = TR 0.1 1 0.1\n")).unwrap_err();
        assert!(err.message.contains("TL/TR"));
    }

    #[test]
    fn grid_values_are_snapped() {
        let s = Sweep { var: Var::D, start: 0.0, stop: 6.0, step: 0.05 };
        let v = s.values();
        assert_eq!(v.len(), 121);
        assert_eq!(v[3], 0.15);
        assert_eq!(v[120], 6.0);
    }

    #[test]
    fn linked_splitting_and_series() {
        let text = "J = 1\nD = 0\nB = 1\nb = B\nTM = 1\ndT = 1\nGamma_L = 1\nGamma_R = 0.25\nseries = chi 0.9 0.3 0 -0.3\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.splitting, Splitting::Linked);
        assert_eq!(cfg.series.unwrap().values, vec![0.9, 0.3, 0.0, -0.3]);
        let err = parse_config(&format!("{text}sweep = b 0 1 0.5\n")).unwrap_err();
        assert!(err.message.contains("both fixed and varied"));
    }

    #[test]
    fn columns_key() {
        let cfg = parse_config(&format!("{MINIMAL}columns = R, J_plus, p4\n")).unwrap();
        assert_eq!(cfg.columns.unwrap(), vec![Column::Rectification, Column::JPlus, Column::Population(3)]);
        let err = parse_config(&format!("{MINIMAL}columns = R, nope\n")).unwrap_err();
        assert_eq!(err.line, Some(10));
    }
}
