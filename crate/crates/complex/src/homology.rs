//! Reduced integral homology of sequence posets, and explicit cycles over
//! prime fields for nonzero classes.

use crate::chain::ChainComplex;
use crate::error::Result;
use crate::poset::SequencePoset;
use crate::snf::{smith_invariants, SmithInvariants};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Default cap on members per length (simplices per degree).
pub const DEFAULT_SIMPLEX_CAP: usize = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub degree: i64,
    pub betti: usize,
    /// Torsion invariant factors in decimal.
    pub torsion: Vec<String>,
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedHomology {
    /// The poset has no members; H̃_{−1} = Z by convention.
    pub empty: bool,
    pub up_to: usize,
    pub groups: Vec<HomologyGroup>,
    pub simplex_counts: Vec<usize>,
}

impl ReducedHomology {
    pub fn vanishes(&self) -> bool {
        !self.empty && self.groups.iter().all(HomologyGroup::is_zero)
    }

    pub fn first_nonzero(&self) -> Option<&HomologyGroup> {
        self.groups.iter().find(|g| !g.is_zero())
    }
}

/// Reduced homology through degree `up_to`.
pub fn homology(f: &SequencePoset, up_to: usize, cap: usize) -> Result<ReducedHomology> {
    let levels = f.enumerate(up_to + 2, cap)?;
    homology_of_complex(&ChainComplex::from_levels(&levels)?, up_to)
}

pub fn homology_of_complex(cc: &ChainComplex, up_to: usize) -> Result<ReducedHomology> {
    let dims = cc.dims();
    if dims.first().is_none_or(|&n| n == 0) {
        return Ok(ReducedHomology {
            empty: true,
            up_to,
            groups: vec![HomologyGroup {
                degree: -1,
                betti: 1,
                torsion: Vec::new(),
            }],
            simplex_counts: dims,
        });
    }
    let top = (up_to + 1).min(cc.boundaries.len() - 1);
    let invariants: Vec<SmithInvariants> = (0..=top)
        .into_par_iter()
        .map(|p| smith_invariants(&cc.boundaries[p]))
        .collect::<Result<_>>()?;
    let rank = |p: usize| invariants.get(p).map_or(0, |s| s.rank);
    let groups = (0..=up_to)
        .map(|p| {
            let n = dims.get(p).copied().unwrap_or(0);
            HomologyGroup {
                degree: p as i64,
                betti: n - rank(p) - rank(p + 1),
                torsion: invariants
                    .get(p + 1)
                    .map(|s| s.torsion.iter().map(ToString::to_string).collect())
                    .unwrap_or_default(),
            }
        })
        .collect();
    Ok(ReducedHomology {
        empty: false,
        up_to,
        groups,
        simplex_counts: dims,
    })
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r, mut e, mut b) = (1u64, p - 2, a % p);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

type Vector = BTreeMap<u32, u64>;

fn reduce(v: &mut Vector, comb: Option<&mut Vector>, basis: &HashMap<u32, (Vector, Vector)>, p: u64) {
    let mut comb = comb;
    let mut cursor = 0u32;
    loop {
        let Some((&c, &x)) = v.range(cursor..).find(|(c, _)| basis.contains_key(c)) else { break };
        let (bv, bc) = &basis[&c];
        for (&k, &y) in bv {
            let e = v.entry(k).or_insert(0);
            *e = (*e + p - x * y % p) % p;
            if *e == 0 {
                v.remove(&k);
            }
        }
        if let Some(cm) = comb.as_deref_mut() {
            for (&k, &y) in bc {
                let e = cm.entry(k).or_insert(0);
                *e = (*e + p - x * y % p) % p;
                if *e == 0 {
                    cm.remove(&k);
                }
            }
        }
        cursor = c + 1;
    }
}

fn normalize(v: &mut Vector, comb: &mut Vector, p: u64) -> u32 {
    let (&lead, &x) = v.iter().next().expect("nonzero vector");
    let inv = inv_mod(x, p);
    for y in v.values_mut().chain(comb.values_mut()) {
        *y = *y * inv % p;
    }
    lead
}

fn to_field(row: &[(u32, i64)], p: u64) -> Vector {
    row.iter()
        .filter_map(|&(c, v)| {
            let x = v.rem_euclid(p as i64) as u64;
            (x != 0).then_some((c, x))
        })
        .collect()
}

/// A mod-`p` cycle in degree `degree` that is not a mod-`p` boundary, as
/// (simplex index, coefficient in (−p/2, p/2]) terms. None when every cycle
/// bounds or the degree holds more than `cap` simplices.
pub fn cycle_witness(cc: &ChainComplex, degree: usize, p: u64, cap: usize) -> Option<Vec<(usize, i64)>> {
    let n = cc.simplices.get(degree)?.len();
    let up = cc.simplices.get(degree + 1).map_or(0, Vec::len);
    if n > cap || up > cap {
        return None;
    }
    let mut image: HashMap<u32, (Vector, Vector)> = HashMap::new();
    if let Some(b) = cc.boundaries.get(degree + 1) {
        for row in &b.rows {
            let mut v = to_field(row, p);
            reduce(&mut v, None, &image, p);
            if !v.is_empty() {
                let mut empty = Vector::new();
                let lead = normalize(&mut v, &mut empty, p);
                image.insert(lead, (v, empty));
            }
        }
    }
    let mut basis: HashMap<u32, (Vector, Vector)> = HashMap::new();
    for (i, row) in cc.boundaries[degree].rows.iter().enumerate() {
        let mut v = to_field(row, p);
        let mut comb: Vector = [(i as u32, 1)].into_iter().collect();
        reduce(&mut v, Some(&mut comb), &basis, p);
        if v.is_empty() {
            let mut z = comb.clone();
            reduce(&mut z, None, &image, p);
            if !z.is_empty() {
                let half = p / 2;
                return Some(
                    comb.into_iter()
                        .map(|(k, x)| (k as usize, if x > half { x as i64 - p as i64 } else { x as i64 }))
                        .collect(),
                );
            }
        } else {
            let lead = normalize(&mut v, &mut comb, p);
            basis.insert(lead, (v, comb));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{Point, PosetKind, Predicate, SequencePoset};
    use std::sync::Arc;

    /// Sequences that are increasing along a cyclic order on four points and
    /// have length at most two: a subdivided circle.
    fn circle() -> SequencePoset {
        let universe: Vec<Point> = (0..4).map(|i| vec![i]).collect();
        let pred: Predicate = Arc::new(|s: &[Point]| match s {
            [_] => true,
            [a, b] => (a[0] + 1) % 4 == b[0],
            _ => false,
        });
        SequencePoset::new(PosetKind::Ordered, "circle", universe, pred).unwrap()
    }

    #[test]
    fn circle_has_h1() {
        let f = circle();
        let h = homology(&f, 1, 1000).unwrap();
        assert_eq!(h.groups[0].betti, 0);
        assert_eq!(h.groups[1].betti, 1);
        let levels = f.enumerate(3, 1000).unwrap();
        let cc = ChainComplex::from_levels(&levels).unwrap();
        assert!(cc.check_d_squared());
        let z = cycle_witness(&cc, 1, 65521, 1000).unwrap();
        assert_eq!(z.len(), 4);
    }

    #[test]
    fn point_is_acyclic() {
        let f = SequencePoset::ordered("pt", vec![vec![0]]).unwrap();
        let h = homology(&f, 3, 10).unwrap();
        assert!(h.vanishes());
    }

    #[test]
    fn empty_poset_is_reported() {
        let f = SequencePoset::ordered("none", vec![]).unwrap();
        let h = homology(&f, 1, 10).unwrap();
        assert!(h.empty);
        assert_eq!(h.groups[0].degree, -1);
    }
}
