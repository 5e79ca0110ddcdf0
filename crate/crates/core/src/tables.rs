//! Reference tables for q = 5 on d-ary trees.

use serde::{Deserialize, Serialize};

use crate::channel::{beta_of_epsilon, lambda_of_epsilon};
use crate::error::Result;
use crate::thresholds::{reproduce_table2, OptimizerSettings, Table2Row};

pub const TABLE_Q: usize = 5;

/// Branching numbers of the reference rows.
pub const TABLE_DEGREES: [usize; 5] = [2, 3, 4, 7, 15];

/// Critical total flip probabilities `ε_r` for q = 5, as estimated by the
/// population-dynamics simulations of Mézard and Montanari (2006). These
/// are third-party data and are never recomputed here.
pub const RECONSTRUCTION_EPSILON_Q5: [(usize, f64); 5] =
    [(2, 0.2348), (3, 0.33881), (4, 0.4008), (7, 0.4986), (15, 0.5955)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub d: usize,
    pub epsilon_r: f64,
    pub beta_r: f64,
    pub lambda_r: f64,
}

/// Converts each simulated `ε_r` to the equivalent `β_r` and `λ_r`.
pub fn reproduce_table1() -> Result<Vec<Table1Row>> {
    RECONSTRUCTION_EPSILON_Q5
        .iter()
        .map(|&(d, eps)| {
            Ok(Table1Row {
                d,
                epsilon_r: eps,
                beta_r: beta_of_epsilon(eps, TABLE_Q)?,
                lambda_r: lambda_of_epsilon(eps, TABLE_Q)?,
            })
        })
        .collect()
}

/// Extremality thresholds for the reference degrees.
pub fn compute_table2(q: usize, s: &OptimizerSettings) -> Result<Vec<Table2Row>> {
    reproduce_table2(q, &TABLE_DEGREES, s)
}
