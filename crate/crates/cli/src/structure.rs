//! Structure-constant files: `{"n": 2, "C": [[[0, 1], [-1, 0]]]}`, one skew
//! `n×n` matrix per central direction (`"p"` optional, checked if present).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use srheat_core::steptwo::StructureConstants;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSpec {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<Vec<f64>>>,
}

impl StructureSpec {
    pub fn from_constants(c: &StructureConstants) -> Self {
        StructureSpec {
            n: c.n(),
            p: Some(c.p()),
            c: c
                .matrices()
                .iter()
                .map(|m| (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect())
                .collect(),
        }
    }

    pub fn to_constants(&self) -> Result<StructureConstants, String> {
        if let Some(p) = self.p {
            if p != self.c.len() {
                return Err(format!("p = {p} but {} matrices are given", self.c.len()));
            }
        }
        let mut mats = Vec::with_capacity(self.c.len());
        for (k, m) in self.c.iter().enumerate() {
            if m.len() != self.n || m.iter().any(|r| r.len() != self.n) {
                return Err(format!("matrix C^{} must be {n}x{n}", k + 1, n = self.n));
            }
            mats.push(DMatrix::from_fn(self.n, self.n, |i, j| m[i][j]));
        }
        StructureConstants::new(self.n, mats).map_err(|e| e.to_string())
    }
}
