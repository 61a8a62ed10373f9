//! Experiment configuration: one JSON document per run describing the
//! instance, the algorithm list, the iteration budget and optional
//! certificate settings. Every output embeds the config hash.

use serde::{Deserialize, Serialize};

use eqopt_core::certificate::{GridSettings, SynthesisSpec};
use eqopt_core::problems::{Constraint, InstanceSpec, Objective};
use eqopt_core::solvers::{default_params, validate_params, Algorithm, SolverParams};
use eqopt_core::{Error, Result};

/// One algorithm cell: which method, its matvec budget (IGM), and optional
/// step-size overrides.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    /// "igm", "gda", "papc" or "papc_primal".
    pub algorithm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_ell: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl AlgorithmSpec {
    pub fn named(algorithm: &str) -> Self {
        AlgorithmSpec {
            algorithm: algorithm.to_string(),
            two_ell: None,
            alpha1: None,
            alpha2: None,
            tau: None,
            theta: None,
        }
    }

    pub fn igm(two_ell: u32) -> Self {
        AlgorithmSpec { two_ell: Some(two_ell), ..AlgorithmSpec::named("igm") }
    }

    pub fn parse_algorithm(&self) -> Result<Algorithm> {
        match self.algorithm.as_str() {
            "igm" => Ok(Algorithm::Igm),
            "gda" => Ok(Algorithm::Gda),
            "papc" => Ok(Algorithm::PapcPd),
            "papc_primal" => Ok(Algorithm::PapcPrimal),
            other => Err(Error::InvalidParams(format!(
                "unknown algorithm '{other}' (expected igm, gda, papc or papc_primal)"
            ))),
        }
    }

    /// Defaults for this instance with any explicit overrides applied.
    pub fn resolve_params(&self, obj: &Objective, con: &Constraint) -> Result<SolverParams> {
        let algo = self.parse_algorithm()?;
        let two_ell = self.two_ell.unwrap_or(2);
        if two_ell == 0 {
            return Err(Error::InvalidParams("two_ell must be >= 1".into()));
        }
        let mut params = default_params(obj, con, algo, two_ell);
        if let Some(v) = self.alpha1 {
            params.alpha1 = v;
        }
        if let Some(v) = self.alpha2 {
            params.alpha2 = v;
        }
        if let Some(v) = self.tau {
            params.tau = v;
        }
        if let Some(v) = self.theta {
            params.theta = v;
        }
        validate_params(obj, con, algo, &params)?;
        Ok(params)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    #[serde(default = "default_max_iter")]
    pub max_iter: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_max_iter() -> u64 {
    100_000
}

fn default_tol() -> f64 {
    1e-8
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_iter: default_max_iter(), tol: default_tol() }
    }
}

/// Settings for the `certify` command; step sizes default to the
/// rate-optimal choices for the instance's constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySettings {
    #[serde(default = "default_two_ell")]
    pub two_ell: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_u: Option<f64>,
    #[serde(default = "default_gamma_points")]
    pub gamma_points: usize,
    #[serde(default = "default_theta_points")]
    pub theta_points: usize,
    #[serde(default = "default_sigma_points")]
    pub sigma_points: usize,
    #[serde(default = "default_mode_grid")]
    pub mode_grid: usize,
}

fn default_two_ell() -> u32 {
    2
}
fn default_gamma_points() -> usize {
    8
}
fn default_theta_points() -> usize {
    4096
}
fn default_sigma_points() -> usize {
    64
}
fn default_mode_grid() -> usize {
    64
}

impl Default for CertifySettings {
    fn default() -> Self {
        CertifySettings {
            two_ell: default_two_ell(),
            alpha1: None,
            alpha2: None,
            sigma_l: None,
            sigma_u: None,
            gamma_points: default_gamma_points(),
            theta_points: default_theta_points(),
            sigma_points: default_sigma_points(),
            mode_grid: default_mode_grid(),
        }
    }
}

impl CertifySettings {
    pub fn synthesis_spec(&self, instance: &InstanceSpec) -> Result<SynthesisSpec> {
        let sigma_l = self.sigma_l.unwrap_or(instance.sigmar);
        let sigma_u = self.sigma_u.unwrap_or(instance.sigma1);
        let alpha1 = self.alpha1.unwrap_or(2.0 / (instance.m + instance.l));
        let alpha2 = self.alpha2.unwrap_or(2.0 / (sigma_l + sigma_u));
        SynthesisSpec::new(instance.m, instance.l, sigma_l, sigma_u, self.two_ell, alpha1, alpha2)
    }

    pub fn grid_settings(&self) -> GridSettings {
        GridSettings {
            gamma_points: self.gamma_points,
            theta_points: self.theta_points,
            sigma_points: self.sigma_points,
            ..GridSettings::default()
        }
    }
}

/// Top-level experiment document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    /// Algorithm cells; when empty, `bench` runs the standard five settings
    /// (GDA, PAPC, IGM with ell in {0.5, 1, 2}).
    #[serde(default)]
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default)]
    pub budget: Budget,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certify: Option<CertifySettings>,
    /// Starting point; zeros when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn standard_bench_cells() -> Vec<AlgorithmSpec> {
        vec![
            AlgorithmSpec::named("gda"),
            AlgorithmSpec::named("papc"),
            AlgorithmSpec::igm(1),
            AlgorithmSpec::igm(2),
            AlgorithmSpec::igm(4),
        ]
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidParams(format!("config JSON: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidParams(format!("cannot read config {}: {e}", path.display()))
        })?;
        let config = Self::from_json_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.instance.validate()?;
        if !(self.budget.tol > 0.0) && !self.budget.tol.is_infinite() {
            return Err(Error::InvalidParams(format!(
                "budget.tol must be positive, got {}",
                self.budget.tol
            )));
        }
        if let Some(x0) = &self.x0 {
            if x0.len() != self.instance.n {
                return Err(Error::InvalidParams(format!(
                    "x0 length {} does not match n = {}",
                    x0.len(),
                    self.instance.n
                )));
            }
            if !x0.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidParams("x0 has non-finite entries".into()));
            }
        }
        for cell in &self.algorithms {
            cell.parse_algorithm()?;
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// FNV-1a hash of the canonical JSON serialization, as a hex string.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in canonical.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}
