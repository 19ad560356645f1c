use std::path::{Path, PathBuf};

use fekete_core::{CompactSet, SearchOptions, Weight};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub starts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
    #[serde(default)]
    pub brute_force_budget: u128,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            starts: 4,
            seed: 0,
            max_sweeps: 200,
            brute_force_budget: 0,
        }
    }
}

/// Settings of the one-dimensional energy minimizer used as reference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReferenceConfig {
    pub nodes: usize,
    pub max_iters: usize,
    pub tol: f64,
    /// Nodes of the closed-form references.
    pub closed_form_nodes: usize,
    pub moment_degree: usize,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        ReferenceConfig {
            nodes: 800,
            max_iters: 1_000_000,
            tol: 1e-4,
            closed_form_nodes: 4000,
            moment_degree: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub perturbation: Weight,
    pub t_values: Vec<f64>,
    pub lemma_instances: usize,
    pub lemma_seed: u64,
    pub lemma_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            perturbation: Weight::real_power(1.0, 2),
            t_values: vec![0.2, 0.1, 0.05, -0.05, -0.1, -0.2],
            lemma_instances: 200,
            lemma_seed: 7,
            lemma_tol: 1e-6,
        }
    }
}

fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub set: CompactSet,
    #[serde(default = "Weight::zero")]
    pub weight: Weight,
    pub degrees: Vec<usize>,
    pub mesh_density: usize,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub outputs: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub format: Vec<Format>,
    #[serde(default)]
    pub reference: ReferenceConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.degrees.is_empty() {
            return Err(CliError::Config("degrees must not be empty".into()));
        }
        if self.degrees.contains(&0) {
            return Err(CliError::Config("every degree must be at least 1".into()));
        }
        if self.mesh_density == 0 {
            return Err(CliError::Config("mesh_density must be at least 1".into()));
        }
        if self.search.starts == 0 {
            return Err(CliError::Config("search.starts must be at least 1".into()));
        }
        if self.format.is_empty() {
            return Err(CliError::Config("format must list json and/or csv".into()));
        }
        self.set
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn search_options(&self) -> SearchOptions {
        SearchOptions {
            mesh_density: self.mesh_density,
            starts: self.search.starts,
            seed: self.search.seed,
            max_sweeps: self.search.max_sweeps,
            brute_force_budget: self.search.brute_force_budget,
        }
    }

    pub fn wants(&self, f: Format) -> bool {
        self.format.contains(&f)
    }
}
