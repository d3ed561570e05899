//! JSON run configuration for the command-line interface. Problem data are
//! expression strings in the language of [`crate::exprlang`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{default_epsilons, Axis, SweepConfig};
use crate::exprlang;
use crate::problem::{Problem, ScalarField1, ScalarField2};
use crate::{Error, Result};

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<MeshConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub a: String,
    pub f: String,
    #[serde(rename = "phi_L")]
    pub phi_l: String,
    #[serde(rename = "phi_R")]
    pub phi_r: String,
    #[serde(rename = "phi_B")]
    pub phi_b: String,
    pub epsilon: f64,
    pub alpha: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub axis: String,
    #[serde(rename = "fixed_N", default)]
    pub fixed_n: Option<usize>,
    #[serde(rename = "fixed_M", default)]
    pub fixed_m: Option<usize>,
    pub refine_values: Vec<usize>,
    #[serde(default)]
    pub epsilons: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: Option<String>,
    #[serde(default)]
    pub destination: Option<String>,
    #[serde(default)]
    pub what: Option<String>,
}

/// The builtin worked example as a config, so CLI overrides apply uniformly.
pub fn builtin_example_config() -> RunConfig {
    RunConfig {
        problem: ProblemConfig {
            a: "1+3*t".into(),
            f: "exp(3*t)".into(),
            phi_l: "1+t^5".into(),
            phi_r: "1+t^5".into(),
            phi_b: "1".into(),
            epsilon: 2f64.powi(-14),
            alpha: 0.9,
            t_final: 1.0,
        },
        mesh: Some(MeshConfig { n: 64, m: 256 }),
        sweep: None,
        output: None,
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg: RunConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("malformed JSON in {}: {e}", path.display())))?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    /// Parse all expressions and check numeric invariants without building
    /// anything.
    pub fn validate(&self) -> Result<()> {
        for (name, src) in [
            ("a", &self.problem.a),
            ("f", &self.problem.f),
            ("phi_L", &self.problem.phi_l),
            ("phi_R", &self.problem.phi_r),
            ("phi_B", &self.problem.phi_b),
        ] {
            exprlang::parse(src)
                .map_err(|e| Error::Config(format!("in expression for `{name}`: {e}")))?;
        }
        if !(self.problem.epsilon > 0.0) {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if !(self.problem.alpha > 0.0) {
            return Err(Error::Config("alpha must be positive".into()));
        }
        if !(self.problem.t_final > 0.0) {
            return Err(Error::Config("T must be positive".into()));
        }
        if let Some(mesh) = &self.mesh {
            if mesh.n % 4 != 0 || mesh.n < 8 {
                return Err(Error::Config(format!(
                    "mesh N must be divisible by 4 and >= 8, got {}",
                    mesh.n
                )));
            }
            if mesh.m < 1 {
                return Err(Error::Config("mesh M must be >= 1".into()));
            }
        }
        if let Some(sweep) = &self.sweep {
            sweep.parse_axis()?;
        }
        Ok(())
    }

    pub fn build_problem(&self) -> Result<Problem> {
        let pc = &self.problem;
        let a = exprlang::parse(&pc.a)?;
        let f = exprlang::parse(&pc.f)?;
        let phi_l = exprlang::parse(&pc.phi_l)?;
        let phi_r = exprlang::parse(&pc.phi_r)?;
        let phi_b = exprlang::parse(&pc.phi_b)?;
        Problem::new(
            ScalarField2::from_expr(a),
            ScalarField2::from_expr(f),
            ScalarField1::from_expr_of_t(phi_l),
            ScalarField1::from_expr_of_t(phi_r),
            ScalarField1::from_expr_of_x(phi_b),
            pc.epsilon,
            pc.alpha,
            pc.t_final,
        )
    }

    pub fn build_sweep(&self) -> Result<SweepConfig> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| Error::Config("sweep block missing".into()))?;
        let axis = sweep.parse_axis()?;
        let fixed_n = match axis {
            Axis::Time => sweep
                .fixed_n
                .or(self.mesh.as_ref().map(|m| m.n))
                .ok_or_else(|| Error::Config("fixed_N required for axis=time".into()))?,
            _ => sweep.fixed_n.or(self.mesh.as_ref().map(|m| m.n)).unwrap_or(0),
        };
        let fixed_m = match axis {
            Axis::Space => sweep
                .fixed_m
                .or(self.mesh.as_ref().map(|m| m.m))
                .ok_or_else(|| Error::Config("fixed_M required for axis=space".into()))?,
            _ => sweep.fixed_m.or(self.mesh.as_ref().map(|m| m.m)).unwrap_or(0),
        };
        Ok(SweepConfig {
            axis,
            fixed_n,
            fixed_m,
            refine_values: sweep.refine_values.clone(),
            epsilons: sweep.epsilons.clone().unwrap_or_else(default_epsilons),
            problem: self.build_problem()?,
        })
    }
}

impl SweepBlock {
    fn parse_axis(&self) -> Result<Axis> {
        match self.axis.as_str() {
            "time" => Ok(Axis::Time),
            "space" => Ok(Axis::Space),
            "both" => Ok(Axis::Both),
            other => Err(Error::Config(format!(
                "axis must be `time`, `space` or `both`, got `{other}`"
            ))),
        }
    }
}
