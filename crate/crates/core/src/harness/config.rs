use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::split::SplitSpec;
use super::sweep::{ClassifierConfig, ClassifierKind};
use super::HarnessError;
use crate::features::ExtractConfig;

/// How the best network of a sweep is chosen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    /// Highest single test accuracy.
    #[default]
    Peak,
    /// Hidden size with the highest mean accuracy, then its best repetition.
    Mean,
}

/// Attribute set fed to the classifiers: PCA-reduced or raw spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Arm {
    Pca(usize),
    Raw,
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pca(n) => write!(f, "pca:{n}"),
            Self::Raw => f.write_str("raw"),
        }
    }
}

impl FromStr for Arm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "raw" {
            return Ok(Self::Raw);
        }
        s.strip_prefix("pca:")
            .and_then(|n| n.parse().ok())
            .filter(|&n: &usize| n > 0)
            .map(Self::Pca)
            .ok_or_else(|| format!("bad arm {s:?}; expected \"raw\" or \"pca:<components>\""))
    }
}

impl TryFrom<String> for Arm {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Arm> for String {
    fn from(a: Arm) -> Self {
        a.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed; required before training.
    pub seed: Option<u64>,
    /// Worker threads for trials and extraction; 0 uses every core.
    pub workers: usize,
    pub split: SplitSpec,
    pub hidden_min: usize,
    pub hidden_max: usize,
    pub reps: usize,
    pub rerun_reps: usize,
    pub classifiers: Vec<ClassifierKind>,
    pub arms: Vec<Arm>,
    pub selection: Selection,
    /// Fit PCA on the training rows only instead of the whole matrix.
    pub pca_fit_on_train: bool,
    /// MLP without bias terms.
    pub strict_paper: bool,
    pub extract: ExtractConfig,
    pub classifier: ClassifierConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: None,
            workers: 0,
            split: SplitSpec::default(),
            hidden_min: 10,
            hidden_max: 30,
            reps: 20,
            rerun_reps: 20,
            classifiers: vec![ClassifierKind::Mlp, ClassifierKind::SomLvq],
            arms: vec![Arm::Pca(50), Arm::Raw],
            selection: Selection::Peak,
            pca_fit_on_train: false,
            strict_paper: false,
            extract: ExtractConfig::default(),
            classifier: ClassifierConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }

    /// Classifier settings with the strict-paper switch applied.
    pub fn effective_classifier(&self) -> ClassifierConfig {
        let mut c = self.classifier.clone();
        if self.strict_paper {
            c.mlp.bias = false;
        }
        c
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.hidden_min == 0 || self.hidden_min > self.hidden_max {
            return Err(HarnessError::EmptyRange);
        }
        if self.reps == 0 {
            return Err(HarnessError::TooFewReps { needed: 1, got: 0 });
        }
        if self.rerun_reps < 2 {
            return Err(HarnessError::TooFewReps {
                needed: 2,
                got: self.rerun_reps,
            });
        }
        if self.classifiers.is_empty() || self.arms.is_empty() {
            return Err(HarnessError::Config("need at least one classifier and one arm".into()));
        }
        if !(self.split.test_fraction > 0.0 && self.split.test_fraction < 1.0) {
            return Err(HarnessError::InvalidFraction(self.split.test_fraction));
        }
        Ok(())
    }
}
