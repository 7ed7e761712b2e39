use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use qavg_core::ffield::{field_of_order, FieldSpec};
use qavg_core::quadric::{make_surface_with_budget, Point, QuadraticSurface, Rational};
use qavg_core::spectral::{grid_len, DEFAULT_GRID_BUDGET};
use qavg_core::tolerance;

use crate::CliError;

pub const BUDGET_ENV: &str = "QAVG_GRID_BUDGET";

pub const ALL_FAMILIES: [&str; 5] = ["delta", "subspace", "random", "dyadic", "sublevel"];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub identity: f64,
    pub convolution: f64,
    pub kernel_sup: f64,
    pub linf: f64,
    pub growth: f64,
    pub proof_slack: f64,
    pub averaging: f64,
    pub consecutive: (f64, f64),
    pub decay: (f64, f64),
    pub sharpness_slope: (f64, f64),
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: tolerance::IDENTITY,
            convolution: tolerance::CONVOLUTION_IDENTITY,
            kernel_sup: tolerance::KERNEL_SUP_CEILING,
            linf: tolerance::LINF_CEILING,
            growth: tolerance::GROWTH_CEILING,
            proof_slack: tolerance::PROOF_SLACK,
            averaging: tolerance::AVERAGING_CEILING,
            consecutive: tolerance::CONSECUTIVE_BAND,
            decay: tolerance::DECAY_BAND,
            sharpness_slope: tolerance::SHARPNESS_SLOPE_BAND,
        }
    }
}

/// The JSON config file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub q_list: Option<Vec<u64>>,
    pub d: Option<usize>,
    pub coeffs: Option<Vec<i64>>,
    pub families: Option<Vec<String>>,
    pub seeds: Option<Vec<u64>>,
    pub sets_per_regime: Option<usize>,
    pub tolerances: Tolerances,
    pub output_dir: Option<PathBuf>,
    pub grid_budget: Option<u64>,
    pub point: Option<String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// Overrides from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub q_list: Option<Vec<u64>>,
    pub d: Option<usize>,
    pub coeffs: Option<Vec<i64>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub point: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub q_list: Vec<u64>,
    pub d: usize,
    pub coeffs: Vec<i64>,
    pub families: Vec<String>,
    pub seeds: Vec<u64>,
    pub sets_per_regime: usize,
    pub tolerances: Tolerances,
    pub output_dir: PathBuf,
    pub grid_budget: u64,
    pub point: Option<Point>,
}

fn budget_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{BUDGET_ENV}: not an integer: {v:?}"))),
        Err(_) => Ok(None),
    }
}

pub fn parse_rational(text: &str) -> Result<Rational, CliError> {
    let text = text.trim();
    let bad = || CliError::Usage(format!("point: cannot parse {text:?} as a rational"));
    match text.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(text.parse().map_err(|_| bad())?)),
    }
}

/// `"4/5,1/5"` as the point `(1/p, 1/r)`.
pub fn parse_point(text: &str) -> Result<Point, CliError> {
    let (x, y) = text
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("point: expected \"x,y\", got {text:?}")))?;
    Ok(Point::new(parse_rational(x)?, parse_rational(y)?))
}

impl ExperimentConfig {
    pub fn resolve(file: ConfigFile, cli: Overrides) -> Result<Self, CliError> {
        let q_list = cli.q_list.or(file.q_list).unwrap_or_else(|| vec![3]);
        if q_list.is_empty() {
            return Err(CliError::Usage("q_list: empty".into()));
        }
        let d = cli.d.or(file.d).unwrap_or(4);
        let coeffs = cli
            .coeffs
            .or(file.coeffs)
            .unwrap_or_else(|| (0..d).map(|j| if j % 2 == 0 { 1 } else { -1 }).collect());
        if coeffs.len() != d {
            return Err(CliError::Usage(format!(
                "coeffs: length {} does not match d = {d}",
                coeffs.len()
            )));
        }
        let families = file
            .families
            .unwrap_or_else(|| ALL_FAMILIES.iter().map(|s| s.to_string()).collect());
        if let Some(bad) = families.iter().find(|f| !ALL_FAMILIES.contains(&f.as_str())) {
            return Err(CliError::Usage(format!(
                "families: unknown family {bad:?}, expected one of {ALL_FAMILIES:?}"
            )));
        }
        let seeds = match cli.seed {
            Some(s) => vec![s],
            None => file.seeds.unwrap_or_else(|| vec![0]),
        };
        if seeds.is_empty() {
            return Err(CliError::Usage("seeds: empty".into()));
        }
        let grid_budget = match file.grid_budget {
            Some(b) => b,
            None => budget_from_env()?.unwrap_or(DEFAULT_GRID_BUDGET),
        };
        let point = cli.point.or(file.point).map(|p| parse_point(&p)).transpose()?;
        let config = ExperimentConfig {
            q_list,
            d,
            coeffs,
            families,
            seeds,
            sets_per_regime: file.sets_per_regime.unwrap_or(200),
            tolerances: file.tolerances,
            output_dir: cli.out.or(file.output_dir).unwrap_or_else(|| PathBuf::from(".")),
            grid_budget,
            point,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.d < 2 {
            return Err(CliError::Usage(format!("d: dimension must be at least 2, got {}", self.d)));
        }
        for &q in &self.q_list {
            let field = field_of_order(q).map_err(|e| CliError::Usage(format!("q_list: q = {q}: {e}")))?;
            grid_len(field.q(), self.d, self.grid_budget)
                .map_err(|e| CliError::Usage(format!("q_list: q = {q}: {e}")))?;
            let p = field.p() as i64;
            if let Some(j) = self.coeffs.iter().position(|c| c.rem_euclid(p) == 0) {
                return Err(CliError::Usage(format!(
                    "coeffs: entry {j} ({}) vanishes mod {p}",
                    self.coeffs[j]
                )));
            }
        }
        Ok(())
    }

    pub fn field(&self, q: u64) -> Result<Arc<FieldSpec>, CliError> {
        field_of_order(q)
            .map(Arc::new)
            .map_err(|e| CliError::Usage(format!("q_list: q = {q}: {e}")))
    }

    pub fn surface(&self, q: u64) -> Result<QuadraticSurface, CliError> {
        let field = self.field(q)?;
        let coeffs = self.coeffs.iter().map(|&c| field.from_signed(c)).collect();
        make_surface_with_budget(field, coeffs, self.grid_budget)
            .map_err(|e| CliError::Usage(format!("coeffs: {e}")))
    }

    pub fn has_family(&self, name: &str) -> bool {
        self.families.iter().any(|f| f == name)
    }

    pub fn coeff_label(&self) -> String {
        self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(json: &str, cli: Overrides) -> Result<ExperimentConfig, CliError> {
        ExperimentConfig::resolve(serde_json::from_str(json).map_err(|e| CliError::Usage(e.to_string()))?, cli)
    }

    #[test]
    fn defaults() {
        let c = resolve("{}", Overrides::default()).unwrap();
        assert_eq!(c.q_list, vec![3]);
        assert_eq!(c.d, 4);
        assert_eq!(c.coeffs, vec![1, -1, 1, -1]);
        assert_eq!(c.families.len(), 5);
        assert_eq!(c.tolerances.identity, 1e-8);
        assert_eq!(c.sets_per_regime, 200);
    }

    #[test]
    fn command_line_wins() {
        let cli = Overrides {
            q_list: Some(vec![5, 7]),
            d: Some(2),
            coeffs: Some(vec![1, 2]),
            seed: Some(9),
            ..Default::default()
        };
        let c = resolve(r#"{"q_list": [3], "d": 4, "seeds": [1, 2]}"#, cli).unwrap();
        assert_eq!(c.q_list, vec![5, 7]);
        assert_eq!(c.d, 2);
        assert_eq!(c.seeds, vec![9]);
    }

    #[test]
    fn rejects_bad_configs() {
        let err = |json: &str| resolve(json, Overrides::default()).unwrap_err().to_string();
        assert!(err(r#"{"q_list": [4]}"#).contains("even characteristic"));
        assert!(err(r#"{"q_list": [6]}"#).contains("q_list"));
        assert!(err(r#"{"coeffs": [1, 1, 1]}"#).contains("coeffs"));
        assert!(err(r#"{"coeffs": [1, 3, 1, 1]}"#).contains("vanishes mod 3"));
        assert!(err(r#"{"families": ["bogus"]}"#).contains("families"));
        assert!(err(r#"{"q_list": [11], "d": 6, "grid_budget": 1000}"#).contains("grid budget exceeded"));
        assert!(err(r#"{"unknown_key": 1}"#).contains("unknown_key"));
        assert!(err(r#"{"tolerances": {"identity": 1e-8, "typo": 1}}"#).contains("typo"));
    }

    #[test]
    fn points() {
        let p = parse_point("4/5, 1/5").unwrap();
        assert_eq!(p, Point::from_ints(4, 5, 1, 5));
        assert_eq!(parse_point("0,1").unwrap(), Point::from_ints(0, 1, 1, 1));
        assert!(parse_point("4/0,1").is_err());
        assert!(parse_point("1").is_err());
    }
}
