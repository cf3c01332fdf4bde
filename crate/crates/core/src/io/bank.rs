//! JSON persistence of shrinkage banks.
//!
//! Floats are written in shortest round-trip form, so `load(save(b)) == b`
//! bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::shrinkage::{KnotGrid, PiecewiseLinearSf, SfBank};
use crate::training::{Method, Objectives, TrainedBank};
use crate::transform::{BandId, DctBasis};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    /// One half range per band.
    pub half_range: Vec<f64>,
    pub knot_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BankFile {
    pub window: usize,
    /// `[stride_x, stride_y]` of the transform the bank was trained for.
    pub strides: [usize; 2],
    pub grid: GridFile,
    pub params: Vec<Vec<f64>>,
    pub band_index: Vec<BandId>,
    #[serde(default)]
    pub method: Option<Method>,
    #[serde(default)]
    pub lambda: Vec<f64>,
    #[serde(default)]
    pub objective_values: Option<Objectives>,
    #[serde(default)]
    pub config_hash: Option<String>,
}

impl BankFile {
    pub fn from_bank(bank: &SfBank, strides: [usize; 2]) -> Result<Self> {
        let grids = bank.grids();
        let knot_count = grids[0].knot_count();
        if grids.iter().any(|g| g.knot_count() != knot_count) {
            return Err(invalid("bank files require the same knot count in every band"));
        }
        Ok(Self {
            window: bank.window(),
            strides,
            grid: GridFile {
                half_range: grids.iter().map(|g| g.half_range()).collect(),
                knot_count,
            },
            params: bank.sfs().iter().map(|s| s.params().to_vec()).collect(),
            band_index: bank.band_ids(),
            method: None,
            lambda: Vec::new(),
            objective_values: None,
            config_hash: None,
        })
    }

    pub fn from_trained(trained: &TrainedBank, strides: [usize; 2]) -> Result<Self> {
        let mut f = Self::from_bank(&trained.bank, strides)?;
        f.method = Some(trained.method);
        f.lambda = trained.lambda.clone();
        f.objective_values = Some(trained.objectives);
        Ok(f)
    }

    pub fn to_bank(&self) -> Result<SfBank> {
        let bands = self.window * self.window;
        if self.grid.half_range.len() != bands || self.params.len() != bands || self.band_index.len() != bands {
            return Err(invalid(format!(
                "bank file for window {} needs {bands} grids, parameter rows and band ids",
                self.window
            )));
        }
        if self.band_index != DctBasis::new(self.window)?.band_ids() {
            return Err(invalid("band_index is not in canonical band order"));
        }
        let sfs = self
            .grid
            .half_range
            .iter()
            .zip(&self.params)
            .map(|(&t, p)| PiecewiseLinearSf::new(KnotGrid::new(t, self.grid.knot_count)?, p.clone()))
            .collect::<Result<Vec<_>>>()?;
        SfBank::new(self.window, sfs)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}
