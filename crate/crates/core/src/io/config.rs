//! Run configuration (JSON) and its replay hash.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiments::{EnsembleSpec, ExperimentsConfig};
use crate::training::{HalfRangeRule, Ridge, TrainOptions};
use crate::transform::{RedundantTransform, ShiftSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformConfig {
    pub window: usize,
    pub stride_x: usize,
    pub stride_y: usize,
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self {
            window: 4,
            stride_x: 1,
            stride_y: 1,
        }
    }
}

impl TransformConfig {
    pub fn build(&self, width: usize, height: usize) -> Result<RedundantTransform> {
        RedundantTransform::new(self.window, self.stride_x, self.stride_y, width, height)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SfConfig {
    pub knot_count: usize,
    pub half_range_rule: HalfRangeRule,
    pub odd_symmetry: bool,
    /// Fixed ridge; `null` selects the relative default.
    pub lambda: Option<f64>,
}

impl Default for SfConfig {
    fn default() -> Self {
        Self {
            knot_count: 15,
            half_range_rule: HalfRangeRule::default(),
            odd_symmetry: false,
            lambda: None,
        }
    }
}

impl SfConfig {
    pub fn train_options(&self) -> TrainOptions {
        TrainOptions {
            ridge: self.lambda.map(Ridge::Fixed).unwrap_or_default(),
            odd_symmetry: self.odd_symmetry,
            ..TrainOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub sigma: f64,
    pub realizations: usize,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            sigma: 20.0,
            realizations: 5,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub train: Vec<PathBuf>,
    pub test: Vec<PathBuf>,
    pub ensemble: Option<EnsembleSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub transform: TransformConfig,
    pub sf: SfConfig,
    pub noise: NoiseConfig,
    pub data: DataConfig,
    pub output: PathBuf,
    pub experiments: ExperimentsConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            transform: TransformConfig::default(),
            sf: SfConfig::default(),
            noise: NoiseConfig::default(),
            data: DataConfig::default(),
            output: PathBuf::from("out"),
            experiments: ExperimentsConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    /// Check stride divisibility, knot count, noise level and data paths.
    pub fn validate(&self) -> Result<()> {
        ShiftSet::new(self.transform.window, self.transform.stride_x, self.transform.stride_y)
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.sf.knot_count < 2 {
            return Err(Error::Config("sf.knot_count must be at least 2".into()));
        }
        if let Some(l) = self.sf.lambda {
            if !(l >= 0.0) {
                return Err(Error::Config(format!("sf.lambda must be >= 0, got {l}")));
            }
        }
        if !(self.noise.sigma >= 0.0 && self.noise.sigma.is_finite()) {
            return Err(Error::Config(format!("noise.sigma must be >= 0, got {}", self.noise.sigma)));
        }
        if self.noise.realizations == 0 {
            return Err(Error::Config("noise.realizations must be at least 1".into()));
        }
        for p in self.data.train.iter().chain(&self.data.test) {
            if !p.exists() {
                return Err(Error::Config(format!("data path {} does not exist", p.display())));
            }
        }
        if let Some(e) = &self.data.ensemble {
            e.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        self.experiments.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON encoding,
    /// with the output directory left out.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = PathBuf::new();
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        hex::encode(&digest[..8])
    }
}
