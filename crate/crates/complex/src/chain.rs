//! The semisimplicial set of a sequence poset and its chain complex.
//!
//! p-simplices are the members of length p + 1 and the i-th face deletes
//! the i-th entry. Boundaries are stored transposed: one row per p-simplex
//! listing its faces with signs (−1)^i.

use crate::error::{ComplexError, Result};
use crate::poset::{delete, Levels};
use crate::snf::SparseRows;
use rayon::prelude::*;
use std::collections::HashMap;

#[derive(Clone, Debug)]
pub struct ChainComplex {
    /// simplices[p] lists the p-simplices as universe-index sequences.
    pub simplices: Vec<Vec<Vec<u32>>>,
    /// boundaries[0] is the augmentation C_0 → Z; boundaries[p] for p ≥ 1
    /// is ∂_p, transposed.
    pub boundaries: Vec<SparseRows>,
}

impl ChainComplex {
    pub fn from_levels(levels: &Levels) -> Result<Self> {
        let simplices = levels.by_len.clone();
        let mut boundaries = Vec::with_capacity(simplices.len());
        if let Some(v) = simplices.first() {
            boundaries.push(SparseRows {
                ncols: 1,
                rows: vec![vec![(0, 1)]; v.len()],
            });
        }
        for p in 1..simplices.len() {
            let index: HashMap<&[u32], u32> = simplices[p - 1]
                .iter()
                .enumerate()
                .map(|(i, s)| (s.as_slice(), i as u32))
                .collect();
            let rows: Result<Vec<Vec<(u32, i64)>>> = simplices[p]
                .par_iter()
                .map(|s| {
                    let mut row: Vec<(u32, i64)> = (0..s.len())
                        .map(|i| {
                            let face = delete(s, i);
                            let sign = if i % 2 == 0 { 1 } else { -1 };
                            index
                                .get(face.as_slice())
                                .map(|&f| (f, sign))
                                .ok_or_else(|| ComplexError::Internal(format!("face {face:?} of {s:?} is not a member")))
                        })
                        .collect::<Result<_>>()?;
                    row.sort_unstable_by_key(|e| e.0);
                    Ok(row)
                })
                .collect();
            boundaries.push(SparseRows {
                ncols: simplices[p - 1].len(),
                rows: rows?,
            });
        }
        Ok(ChainComplex { simplices, boundaries })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    /// ∂_p ∘ ∂_{p+1} = 0 for every p ≥ 0, the augmentation included.
    pub fn check_d_squared(&self) -> bool {
        (1..self.boundaries.len()).all(|p| {
            let lower = &self.boundaries[p - 1];
            self.boundaries[p].rows.par_iter().all(|row| {
                let mut acc: HashMap<u32, i64> = HashMap::new();
                for &(f, s) in row {
                    for &(g, t) in &lower.rows[f as usize] {
                        *acc.entry(g).or_insert(0) += s * t;
                    }
                }
                acc.values().all(|&v| v == 0)
            })
        })
    }
}
