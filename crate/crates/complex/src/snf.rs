//! Smith normal form invariants of sparse integer matrices.
//!
//! Unit pivots are eliminated sparsely (each removes one row and one column
//! and contributes an invariant factor 1). What is left has no unit entry
//! and is finished by a dense Smith normal form over big integers.

use crate::error::{ComplexError, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Largest dense remainder (rows × columns) handed to the dense phase.
pub const DENSE_CAP: usize = 25_000_000;

/// A sparse integer matrix stored by rows, entries sorted by column.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseRows {
    pub ncols: usize,
    pub rows: Vec<Vec<(u32, i64)>>,
}

impl SparseRows {
    pub fn new(ncols: usize) -> Self {
        SparseRows { ncols, rows: Vec::new() }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![0; self.ncols];
                for &(c, v) in r {
                    d[c as usize] += v;
                }
                d
            })
            .collect()
    }
}

/// Rank and the invariant factors other than 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithInvariants {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

fn overflow() -> ComplexError {
    ComplexError::CapExceeded("integer overflow during sparse elimination".into())
}

/// row_i − f·row_r, with the columns new to row_i reported.
fn axpy(ri: &[(u32, i64)], rr: &[(u32, i64)], f: i64, fresh: &mut Vec<u32>) -> Result<Vec<(u32, i64)>> {
    let mut out = Vec::with_capacity(ri.len() + rr.len());
    let (mut a, mut b) = (0, 0);
    while a < ri.len() || b < rr.len() {
        let ca = ri.get(a).map_or(u32::MAX, |e| e.0);
        let cb = rr.get(b).map_or(u32::MAX, |e| e.0);
        if ca < cb {
            out.push(ri[a]);
            a += 1;
        } else if cb < ca {
            let v = rr[b].1.checked_mul(f).and_then(i64::checked_neg).ok_or_else(overflow)?;
            out.push((cb, v));
            fresh.push(cb);
            b += 1;
        } else {
            let v = ri[a].1.checked_sub(rr[b].1.checked_mul(f).ok_or_else(overflow)?).ok_or_else(overflow)?;
            if v != 0 {
                out.push((ca, v));
            }
            a += 1;
            b += 1;
        }
    }
    Ok(out)
}

pub fn smith_invariants(m: &SparseRows) -> Result<SmithInvariants> {
    let mut rows: Vec<Vec<(u32, i64)>> = m
        .rows
        .iter()
        .map(|r| {
            let mut r: Vec<(u32, i64)> = r.iter().copied().filter(|e| e.1 != 0).collect();
            r.sort_unstable_by_key(|e| e.0);
            r
        })
        .collect();
    let nrows = rows.len();
    let mut alive = vec![true; nrows];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); m.ncols];
    let mut heap = BinaryHeap::with_capacity(nrows);
    for (r, row) in rows.iter().enumerate() {
        for &(c, _) in row {
            col_rows[c as usize].push(r as u32);
        }
        heap.push(Reverse((row.len(), r as u32)));
    }
    let mut rank = 0;
    let mut fresh = Vec::new();
    while let Some(Reverse((len, r))) = heap.pop() {
        let r = r as usize;
        if !alive[r] || rows[r].len() != len {
            continue;
        }
        if len == 0 {
            alive[r] = false;
            continue;
        }
        let pivot = rows[r]
            .iter()
            .filter(|e| e.1.abs() == 1)
            .min_by_key(|e| col_rows[e.0 as usize].len())
            .copied();
        let Some((c, a)) = pivot else { continue };
        let pivot_row = std::mem::take(&mut rows[r]);
        alive[r] = false;
        rank += 1;
        for i in std::mem::take(&mut col_rows[c as usize]) {
            let i = i as usize;
            if !alive[i] {
                continue;
            }
            let Ok(pos) = rows[i].binary_search_by_key(&c, |e| e.0) else { continue };
            let f = rows[i][pos].1.checked_mul(a).ok_or_else(overflow)?;
            fresh.clear();
            let updated = axpy(&rows[i], &pivot_row, f, &mut fresh)?;
            rows[i] = updated;
            for &col in &fresh {
                col_rows[col as usize].push(i as u32);
            }
            heap.push(Reverse((rows[i].len(), i as u32)));
        }
    }
    let rest: Vec<usize> = (0..nrows).filter(|&r| alive[r] && !rows[r].is_empty()).collect();
    if rest.is_empty() {
        return Ok(SmithInvariants { rank, torsion: Vec::new() });
    }
    let mut cols: Vec<u32> = rest.iter().flat_map(|&r| rows[r].iter().map(|e| e.0)).collect();
    cols.sort_unstable();
    cols.dedup();
    if rest.len().saturating_mul(cols.len()) > DENSE_CAP {
        return Err(ComplexError::CapExceeded(format!(
            "dense remainder {}x{} above {DENSE_CAP}",
            rest.len(),
            cols.len()
        )));
    }
    let dense: Vec<Vec<BigInt>> = rest
        .iter()
        .map(|&r| {
            let mut d = vec![BigInt::zero(); cols.len()];
            for &(c, v) in &rows[r] {
                d[cols.binary_search(&c).expect("column listed")] = BigInt::from(v);
            }
            d
        })
        .collect();
    let diag = dense_smith(dense);
    let mut torsion = Vec::new();
    for d in diag {
        rank += 1;
        if !d.is_one() {
            torsion.push(d);
        }
    }
    Ok(SmithInvariants { rank, torsion })
}

fn min_entry(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                best = Some((i, j));
                if x.abs().is_one() {
                    return best;
                }
            }
        }
    }
    best
}

/// Nonzero invariant factors, each dividing the next, of a dense matrix.
pub fn dense_smith(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let nr = a.len();
    let nc = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..nr.min(nc) {
        let Some((pi, pj)) = min_entry(&a, t) else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..nr {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    for j in t..nc {
                        let s = &q * &a[t][j];
                        a[i][j] -= s;
                    }
                    if !a[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..nc {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    for row in a.iter_mut().skip(t) {
                        let s = &q * &row[t];
                        row[j] -= s;
                    }
                    if !a[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                let mut best = (t, t);
                for i in t..nr {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t..nc {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                a.swap(t, best.0);
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
                continue;
            }
            let p = a[t][t].clone();
            let bad = (t + 1..nr).find(|&i| a[i][t + 1..].iter().any(|x| !x.is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    for j in t..nc {
                        let s = a[i][j].clone();
                        a[t][j] += s;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sparse(d: &[&[i64]]) -> SparseRows {
        SparseRows {
            ncols: d[0].len(),
            rows: d
                .iter()
                .map(|r| r.iter().enumerate().filter(|e| *e.1 != 0).map(|(c, &v)| (c as u32, v)).collect())
                .collect(),
        }
    }

    #[test]
    fn small_invariants() {
        let s = smith_invariants(&sparse(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]])).unwrap();
        assert_eq!(s.rank, 3);
        assert_eq!(s.torsion, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let s = smith_invariants(&sparse(&[&[1, 1], &[1, -1]])).unwrap();
        assert_eq!((s.rank, s.torsion), (2, vec![BigInt::from(2)]));
        let s = smith_invariants(&sparse(&[&[0, 0], &[0, 0]])).unwrap();
        assert_eq!(s.rank, 0);
    }
}
