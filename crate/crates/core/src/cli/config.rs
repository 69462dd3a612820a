//! Experiment configuration: a flat `key = value` file with optional
//! `[eps]` and `[tolerances]` sections, overridden by command-line flags.

use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "CONEKG_OUT";
pub const DEFAULT_SEED: u64 = 20240617;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    BulkBoundary,
    Symplectic,
    Goursat,
    Modular,
    Kms,
    Generator,
    Symbol,
    All,
}

impl Suite {
    pub const NAMED: [Suite; 7] = [
        Suite::BulkBoundary,
        Suite::Symplectic,
        Suite::Goursat,
        Suite::Modular,
        Suite::Kms,
        Suite::Generator,
        Suite::Symbol,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::BulkBoundary => "bulk-boundary",
            Suite::Symplectic => "symplectic",
            Suite::Goursat => "goursat",
            Suite::Modular => "modular",
            Suite::Kms => "kms",
            Suite::Generator => "generator",
            Suite::Symbol => "symbol",
            Suite::All => "all",
        }
    }

    /// The suites a run expands to.
    pub fn expand(&self) -> Vec<Suite> {
        match self {
            Suite::All => Self::NAMED.to_vec(),
            s => vec![*s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::NAMED
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|x| x.name() == s.trim())
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}'")))
    }
}

/// How `--tau` values are read: as the geometric flow parameter, or as the
/// modular parameter t with tau = -t / 2 pi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamConvention {
    Geometric,
    Modular,
}

impl FromStr for ParamConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "geometric" => Ok(Self::Geometric),
            "modular" => Ok(Self::Modular),
            o => Err(Error::Config(format!("unknown parameter convention '{o}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsOverride {
    pub eps0: f64,
    pub ratio: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub masses: Vec<f64>,
    /// Number of 16-node Gauss panels in u.
    pub grid_u: Option<usize>,
    /// Sphere rule (n_theta, n_phi).
    pub grid_sphere: Option<(usize, usize)>,
    pub eps: Option<EpsOverride>,
    pub taus: Vec<f64>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub param: ParamConvention,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            masses: vec![0.0, 0.5, 1.0],
            grid_u: None,
            grid_sphere: None,
            eps: None,
            taus: vec![-1.0, -0.5, 0.5, 1.0],
            seed: DEFAULT_SEED,
            output_dir: PathBuf::from("verify-out"),
            param: ParamConvention::Geometric,
            tolerances: BTreeMap::new(),
        }
    }
}

impl ExperimentConfig {
    /// Flow parameters in the geometric convention.
    pub fn geometric_taus(&self) -> Vec<f64> {
        match self.param {
            ParamConvention::Geometric => self.taus.clone(),
            ParamConvention::Modular => self.taus.iter().map(|&t| crate::modular::geometric_from_modular(t)).collect(),
        }
    }

    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    pub fn validate(&self) -> Result<()> {
        if self.masses.is_empty() {
            return Err(Error::Config("no masses".into()));
        }
        if let Some(m) = self.masses.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
            return Err(Error::Config(format!("mass {m} must be finite and >= 0")));
        }
        if self.grid_u == Some(0) {
            return Err(Error::Config("grid-u must be positive".into()));
        }
        if let Some((a, b)) = self.grid_sphere {
            if a == 0 || b == 0 {
                return Err(Error::Config("sphere grid counts must be positive".into()));
            }
        }
        if let Some(e) = self.eps {
            if !(e.eps0 > 0.0 && e.ratio > 0.0 && e.ratio < 1.0 && e.count >= 2) {
                return Err(Error::Config(format!("invalid eps schedule {e:?}")));
            }
        }
        if self.taus.iter().any(|t| !t.is_finite()) {
            return Err(Error::Config("non-finite tau".into()));
        }
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::Config(format!("tolerance {k} = {v} must be positive")));
        }
        Ok(())
    }
}

/// Command-line values; `None` or empty means "not given".
#[derive(Debug, Clone, Default)]
pub struct Flags {
    pub suite: Option<String>,
    pub masses: Vec<f64>,
    pub grid_u: Option<usize>,
    pub grid_sphere: Option<String>,
    pub eps0: Option<f64>,
    pub eps_ratio: Option<f64>,
    pub eps_count: Option<usize>,
    pub taus: Vec<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub param: Option<String>,
}

fn parse_list(v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Config(format!("'{s}': {e}"))))
        .collect()
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.trim().parse::<T>().map_err(|e| Error::Config(format!("{key} = '{v}': {e}")))
}

pub fn parse_sphere(v: &str) -> Result<(usize, usize)> {
    let (a, b) = v
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::Config(format!("sphere grid '{v}' is not NTHETAxNPHI")))?;
    Ok((parse_num("grid_sphere", a)?, parse_num("grid_sphere", b)?))
}

/// Parses the file format into a configuration on top of the defaults.
pub fn parse_config_text(text: &str) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::default();
    let mut section = String::new();
    let (mut e0, mut er, mut ec) = (None, None, None);
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = name.trim().to_string();
            if !matches!(section.as_str(), "eps" | "tolerances") {
                return Err(Error::Config(format!("line {}: unknown section [{section}]", ln + 1)));
            }
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", ln + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        match (section.as_str(), k) {
            ("", "suite") => c.suite = v.parse()?,
            ("", "masses") => c.masses = parse_list(v)?,
            ("", "grid_u") => c.grid_u = Some(parse_num(k, v)?),
            ("", "grid_sphere") => c.grid_sphere = Some(parse_sphere(v)?),
            ("", "taus") => c.taus = parse_list(v)?,
            ("", "seed") => c.seed = parse_num(k, v)?,
            ("", "out") => c.output_dir = PathBuf::from(v),
            ("", "param") => c.param = v.parse()?,
            ("eps", "eps0") => e0 = Some(parse_num(k, v)?),
            ("eps", "ratio") => er = Some(parse_num(k, v)?),
            ("eps", "count") => ec = Some(parse_num(k, v)?),
            ("tolerances", name) => {
                c.tolerances.insert(name.to_string(), parse_num(k, v)?);
            }
            (s, k) => return Err(Error::Config(format!("line {}: unknown key '{k}' in [{s}]", ln + 1))),
        }
    }
    c.eps = eps_from_parts(e0, er, ec)?;
    Ok(c)
}

fn eps_from_parts(e0: Option<f64>, r: Option<f64>, n: Option<usize>) -> Result<Option<EpsOverride>> {
    match (e0, r, n) {
        (None, None, None) => Ok(None),
        (Some(eps0), Some(ratio), Some(count)) => Ok(Some(EpsOverride { eps0, ratio, count })),
        _ => Err(Error::Config("eps0, eps ratio and eps count must be given together".into())),
    }
}

/// File (if any), then flags, then the environment for the output directory.
pub fn parse_config(file: Option<&Path>, flags: &Flags, env_out: Option<PathBuf>) -> Result<ExperimentConfig> {
    let mut c = match file {
        Some(p) => parse_config_text(&std::fs::read_to_string(p)?)?,
        None => ExperimentConfig::default(),
    };
    let file_sets_out = file.is_some() && c.output_dir != ExperimentConfig::default().output_dir;
    if let Some(s) = &flags.suite {
        c.suite = s.parse()?;
    }
    if !flags.masses.is_empty() {
        c.masses = flags.masses.clone();
    }
    if flags.grid_u.is_some() {
        c.grid_u = flags.grid_u;
    }
    if let Some(s) = &flags.grid_sphere {
        c.grid_sphere = Some(parse_sphere(s)?);
    }
    if flags.eps0.is_some() || flags.eps_ratio.is_some() || flags.eps_count.is_some() {
        c.eps = eps_from_parts(flags.eps0, flags.eps_ratio, flags.eps_count)?;
    }
    if !flags.taus.is_empty() {
        c.taus = flags.taus.clone();
    }
    if let Some(s) = flags.seed {
        c.seed = s;
    }
    if let Some(p) = &flags.param {
        c.param = p.parse()?;
    }
    match (&flags.out, env_out) {
        (Some(o), _) => c.output_dir = o.clone(),
        (None, Some(e)) if !file_sets_out => c.output_dir = e,
        _ => {}
    }
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        assert_eq!(parse_config_text("").unwrap(), ExperimentConfig::default());
        assert_eq!(parse_config(None, &Flags::default(), None).unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn file_then_flags() {
        let text = "suite = symplectic\nmasses = 0, 0.5\ngrid_sphere = 8x16 # comment\n[eps]\neps0 = 1e-3\nratio = 0.5\ncount = 5\n[tolerances]\nsymplectic = 1e-5\n";
        let c = parse_config_text(text).unwrap();
        assert_eq!(c.suite, Suite::Symplectic);
        assert_eq!(c.masses, vec![0.0, 0.5]);
        assert_eq!(c.grid_sphere, Some((8, 16)));
        assert_eq!(c.eps.unwrap().count, 5);
        assert_eq!(c.tolerance("symplectic", 1.0), 1e-5);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, text).unwrap();
        let flags = Flags { masses: vec![1.0], ..Default::default() };
        let c = parse_config(Some(&path), &flags, Some(PathBuf::from("envdir"))).unwrap();
        assert_eq!(c.masses, vec![1.0]);
        assert_eq!(c.output_dir, PathBuf::from("envdir"));
    }

    #[test]
    fn rejections() {
        assert!(matches!("bogus".parse::<Suite>(), Err(Error::Config(_))));
        let neg = Flags { masses: vec![-1.0], ..Default::default() };
        assert!(parse_config(None, &neg, None).is_err());
        let partial = Flags { eps0: Some(1e-3), ..Default::default() };
        assert!(parse_config(None, &partial, None).is_err());
        assert!(parse_config_text("[weird]\n").is_err());
        assert!(parse_config_text("nokey\n").is_err());
        assert!(parse_config_text("grid_sphere = 16\n").is_err());
    }

    #[test]
    fn modular_parameter_convention() {
        let c = ExperimentConfig { taus: vec![2.0 * std::f64::consts::PI], param: ParamConvention::Modular, ..Default::default() };
        assert!((c.geometric_taus()[0] + 1.0).abs() < 1e-15);
    }
}
