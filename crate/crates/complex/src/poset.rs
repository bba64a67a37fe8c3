//! Posets of ordered sequences of distinct points, ordered by refinement.
//!
//! A poset is a candidate universe of points together with a membership
//! predicate on finite sequences. Points are short vectors of ids (one id
//! for plain elements, two for pairs, more after decoration). Membership is
//! evaluated lazily and memoized per sequence of universe indices.

use crate::error::{ComplexError, Result};
use dashmap::DashMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

pub type Point = Vec<u32>;
pub type Predicate = Arc<dyn Fn(&[Point]) -> bool + Send + Sync>;

pub const DEFAULT_MEMO_CAP: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PosetKind {
    Ordered,
    Unimodular,
    LambdaUnimodular,
    LambdaMuUnimodular,
    IsotropicUnimodular,
    HyperbolicUnimodular,
    MixedUnimodular,
    TranslatedUnimodular,
    TranslatedLambda,
    Link,
    Truncation,
    Decoration,
    Restriction,
    Intersection,
}

pub struct SequencePoset {
    kind: PosetKind,
    label: String,
    arity: usize,
    universe: Vec<Point>,
    index: HashMap<Point, u32>,
    max_len: Option<usize>,
    pred: Predicate,
    memo: DashMap<Vec<u32>, bool>,
    memo_cap: usize,
}

impl fmt::Debug for SequencePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequencePoset")
            .field("kind", &self.kind)
            .field("label", &self.label)
            .field("universe", &self.universe.len())
            .field("max_len", &self.max_len)
            .finish()
    }
}

/// Members grouped by length; `by_len[l]` holds the members of length l + 1
/// as sequences of universe indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Levels {
    pub by_len: Vec<Vec<Vec<u32>>>,
}

impl Levels {
    pub fn counts(&self) -> Vec<usize> {
        self.by_len.iter().map(Vec::len).collect()
    }

    pub fn total(&self) -> usize {
        self.by_len.iter().map(Vec::len).sum()
    }

    pub fn vertices(&self) -> Vec<u32> {
        self.by_len.first().map(|l| l.iter().map(|s| s[0]).collect()).unwrap_or_default()
    }
}

impl SequencePoset {
    pub fn new(kind: PosetKind, label: impl Into<String>, universe: Vec<Point>, pred: Predicate) -> Result<Self> {
        let arity = universe.first().map_or(1, Vec::len);
        Self::with_arity(kind, label, arity, universe, pred)
    }

    /// As [`SequencePoset::new`] with the arity given, so an empty universe
    /// keeps it.
    pub fn with_arity(
        kind: PosetKind,
        label: impl Into<String>,
        arity: usize,
        universe: Vec<Point>,
        pred: Predicate,
    ) -> Result<Self> {
        let mut index = HashMap::with_capacity(universe.len());
        for (i, p) in universe.iter().enumerate() {
            if p.len() != arity {
                return Err(ComplexError::Instance("points of different arity in one universe".into()));
            }
            if index.insert(p.clone(), i as u32).is_some() {
                return Err(ComplexError::Instance(format!("repeated point {p:?} in universe")));
            }
        }
        Ok(SequencePoset {
            kind,
            label: label.into(),
            arity,
            universe,
            index,
            max_len: None,
            pred,
            memo: DashMap::new(),
            memo_cap: DEFAULT_MEMO_CAP,
        })
    }

    /// 𝒪(V): every sequence of distinct points of V.
    pub fn ordered(label: impl Into<String>, universe: Vec<Point>) -> Result<Self> {
        Self::new(PosetKind::Ordered, label, universe, Arc::new(|_| true))
    }

    pub fn with_memo_cap(mut self, cap: usize) -> Self {
        self.memo_cap = cap;
        self
    }

    pub fn kind(&self) -> PosetKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn universe(&self) -> &[Point] {
        &self.universe
    }

    pub fn point(&self, i: u32) -> &Point {
        &self.universe[i as usize]
    }

    pub fn max_len(&self) -> Option<usize> {
        self.max_len
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn universe_index(&self, p: &[u32]) -> Option<u32> {
        self.index.get(p).copied()
    }

    pub fn points(&self, seq: &[u32]) -> Vec<Point> {
        seq.iter().map(|&i| self.universe[i as usize].clone()).collect()
    }

    /// Membership of a sequence of points.
    pub fn contains(&self, seq: &[Point]) -> bool {
        let mut idx = Vec::with_capacity(seq.len());
        for p in seq {
            match self.index.get(p) {
                Some(&i) => idx.push(i),
                None => return false,
            }
        }
        self.contains_idx(&idx)
    }

    /// Membership of a sequence of universe indices.
    pub fn contains_idx(&self, seq: &[u32]) -> bool {
        if seq.is_empty() || self.max_len.is_some_and(|m| seq.len() > m) {
            return false;
        }
        for (a, x) in seq.iter().enumerate() {
            if seq[a + 1..].contains(x) {
                return false;
            }
        }
        if let Some(v) = self.memo.get(seq) {
            return *v;
        }
        let v = (self.pred)(&self.points(seq));
        if self.memo.len() < self.memo_cap {
            self.memo.insert(seq.to_vec(), v);
        }
        v
    }

    /// Universe indices of the length-one members.
    pub fn vertices(&self) -> Vec<u32> {
        (0..self.universe.len() as u32)
            .into_par_iter()
            .filter(|&i| self.contains_idx(&[i]))
            .collect()
    }

    /// F_v = {w : wv ∈ F}.
    pub fn link(self: &Arc<Self>, v: &[Point]) -> Result<SequencePoset> {
        if !self.contains(v) {
            return Err(ComplexError::NotMember(format!("{v:?} in {}", self.label)));
        }
        let parent = self.clone();
        let tail: Vec<Point> = v.to_vec();
        let universe: Vec<Point> = self
            .universe
            .par_iter()
            .filter(|p| {
                let mut s = Vec::with_capacity(tail.len() + 1);
                s.push((*p).clone());
                s.extend(tail.iter().cloned());
                parent.contains(&s)
            })
            .cloned()
            .collect();
        let pred: Predicate = Arc::new(move |seq: &[Point]| {
            let mut s = seq.to_vec();
            s.extend(tail.iter().cloned());
            parent.contains(&s)
        });
        let mut out = SequencePoset::with_arity(PosetKind::Link, format!("{}_link{}", self.label, v.len()), self.arity, universe, pred)?;
        out.max_len = self.max_len.map(|m| m.saturating_sub(v.len()));
        Ok(out)
    }

    /// F_{≤k}.
    pub fn truncate(self: &Arc<Self>, k: usize) -> SequencePoset {
        let parent = self.clone();
        let pred: Predicate = Arc::new(move |seq: &[Point]| parent.contains(seq));
        let mut out = SequencePoset::with_arity(
            PosetKind::Truncation,
            format!("{}_le{k}", self.label),
            self.arity,
            self.universe.clone(),
            pred,
        )
        .expect("universe already validated");
        out.max_len = Some(self.max_len.map_or(k, |m| m.min(k)));
        out
    }

    /// 𝒪(X) ∩ F for the subset X of the universe selected by `keep`.
    pub fn restrict<K>(self: &Arc<Self>, label: impl Into<String>, keep: K) -> SequencePoset
    where
        K: Fn(&Point) -> bool + Sync,
    {
        let parent = self.clone();
        let universe: Vec<Point> = self.universe.par_iter().filter(|p| keep(p)).cloned().collect();
        let pred: Predicate = Arc::new(move |seq: &[Point]| parent.contains(seq));
        let mut out =
            SequencePoset::with_arity(PosetKind::Restriction, label, self.arity, universe, pred).expect("universe already validated");
        out.max_len = self.max_len;
        out
    }

    /// F ∩ G on the common points.
    pub fn intersect(self: &Arc<Self>, other: &Arc<SequencePoset>) -> Result<SequencePoset> {
        if self.arity != other.arity {
            return Err(ComplexError::Instance("intersecting posets of different arity".into()));
        }
        let universe: Vec<Point> = self
            .universe
            .iter()
            .filter(|p| other.index.contains_key(*p))
            .cloned()
            .collect();
        let (a, b) = (self.clone(), other.clone());
        let pred: Predicate = Arc::new(move |seq: &[Point]| a.contains(seq) && b.contains(seq));
        let mut out = SequencePoset::with_arity(
            PosetKind::Intersection,
            format!("{}_cap_{}", self.label, other.label),
            self.arity,
            universe,
            pred,
        )?;
        out.max_len = match (self.max_len, other.max_len) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        Ok(out)
    }

    /// F⟨S⟩: sequences ((v_1, s_1), …, (v_k, s_k)) of distinct pairs with
    /// (v_1, …, v_k) ∈ F. A decorated point is the F point followed by the
    /// S point.
    pub fn decorate(self: &Arc<Self>, s: &[Point]) -> Result<SequencePoset> {
        if s.is_empty() {
            return Err(ComplexError::Instance("decoration by the empty set".into()));
        }
        let a = self.arity;
        let mut universe = Vec::with_capacity(self.universe.len() * s.len());
        for p in &self.universe {
            for t in s {
                let mut q = p.clone();
                q.extend_from_slice(t);
                universe.push(q);
            }
        }
        let parent = self.clone();
        let pred: Predicate = Arc::new(move |seq: &[Point]| {
            let base: Vec<Point> = seq.iter().map(|q| q[..a].to_vec()).collect();
            parent.contains(&base)
        });
        let mut out = SequencePoset::with_arity(
            PosetKind::Decoration,
            format!("{}_dec{}", self.label, s.len()),
            a + s[0].len(),
            universe,
            pred,
        )?;
        out.max_len = self.max_len;
        Ok(out)
    }

    /// The same poset with its universe listed in a shuffled order.
    pub fn shuffled(self: &Arc<Self>, seed: u64) -> SequencePoset {
        let mut universe = self.universe.clone();
        universe.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let parent = self.clone();
        let pred: Predicate = Arc::new(move |seq: &[Point]| parent.contains(seq));
        let mut out = SequencePoset::with_arity(self.kind, format!("{}_shuffled", self.label), self.arity, universe, pred)
            .expect("universe already validated");
        out.max_len = self.max_len;
        out
    }

    /// All members of length at most `max_len`, by prefix extension. Under
    /// the chain condition p·v·w ∈ F forces p·w ∈ F, so the extensions of
    /// p·v are drawn from the last entries of its siblings. Fails once a
    /// level holds more than `cap` members.
    pub fn enumerate(&self, max_len: usize, cap: usize) -> Result<Levels> {
        self.enumerate_with(max_len, cap, false)
    }

    /// As [`SequencePoset::enumerate`], but every member is extended by every
    /// vertex, so members with a non-member face are found as well.
    pub fn enumerate_full(&self, max_len: usize, cap: usize) -> Result<Levels> {
        self.enumerate_with(max_len, cap, true)
    }

    fn enumerate_with(&self, max_len: usize, cap: usize, full: bool) -> Result<Levels> {
        let mut levels = Levels::default();
        if max_len == 0 {
            return Ok(levels);
        }
        let verts = self.vertices();
        if verts.len() > cap {
            return Err(ComplexError::CapExceeded(format!("{} vertices above cap {cap}", verts.len())));
        }
        levels.by_len.push(verts.iter().map(|&v| vec![v]).collect());
        let limit = self.max_len.map_or(max_len, |m| m.min(max_len));
        while levels.by_len.len() < limit {
            let prev = levels.by_len.last().expect("nonempty");
            if prev.is_empty() {
                break;
            }
            let len = prev[0].len();
            // sibling group [start, end) of each member: same prefix of length len - 1
            let mut group = vec![(0usize, prev.len()); prev.len()];
            if !full {
                let mut a = 0;
                for i in 1..=prev.len() {
                    if i == prev.len() || prev[i][..len - 1] != prev[a][..len - 1] {
                        group[a..i].fill((a, i));
                        a = i;
                    }
                }
            }
            let cands = |i: usize| -> Vec<u32> {
                if full {
                    verts.clone()
                } else {
                    let (a, b) = group[i];
                    prev[a..b].iter().map(|t| t[len - 1]).collect()
                }
            };
            let mut next = Vec::new();
            let mut i = 0;
            while i < prev.len() {
                // batches of roughly a million membership tests
                let mut j = i;
                let mut work = 0usize;
                while j < prev.len() && work < 1 << 20 {
                    work += if full { verts.len() } else { group[j].1 - group[j].0 };
                    j += 1;
                }
                let mut found: Vec<Vec<u32>> = (i..j)
                    .into_par_iter()
                    .flat_map_iter(|m| {
                        let s = &prev[m];
                        cands(m).into_iter().filter_map(move |v| {
                            if s.contains(&v) {
                                return None;
                            }
                            let mut t = Vec::with_capacity(s.len() + 1);
                            t.extend_from_slice(s);
                            t.push(v);
                            self.contains_idx(&t).then_some(t)
                        })
                    })
                    .collect();
                next.append(&mut found);
                if next.len() > cap {
                    return Err(ComplexError::CapExceeded(format!(
                        "more than {cap} members of length {}",
                        levels.by_len.len() + 1
                    )));
                }
                i = j;
            }
            if next.is_empty() {
                break;
            }
            levels.by_len.push(next);
        }
        Ok(levels)
    }

    /// A member with a one-entry deletion that is not a member, among the
    /// enumerated levels.
    pub fn chain_condition_violation(&self, levels: &Levels) -> Option<Vec<u32>> {
        levels.by_len.iter().skip(1).find_map(|level| {
            level
                .par_iter()
                .find_any(|s| (0..s.len()).any(|i| !self.contains_idx(&delete(s, i))))
                .cloned()
        })
    }

    /// Chain condition spot check: exhaustive through length `max_len` when
    /// the poset has at most 200 vertices, otherwise on `samples` random
    /// members built by random extension.
    pub fn check_chain_condition(&self, max_len: usize, samples: usize, seed: u64) -> Result<Option<Vec<u32>>> {
        let verts = self.vertices();
        if verts.len() <= 200 {
            let levels = self.enumerate_full(max_len, 2_000_000)?;
            return Ok(self.chain_condition_violation(&levels));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let mut s = vec![verts[rng.gen_range(0..verts.len())]];
            let target = rng.gen_range(1..=max_len.max(1));
            while s.len() < target {
                let mut extended = false;
                for _ in 0..64 {
                    let v = verts[rng.gen_range(0..verts.len())];
                    let mut t = s.clone();
                    t.push(v);
                    if self.contains_idx(&t) {
                        s = t;
                        extended = true;
                        break;
                    }
                }
                if !extended {
                    break;
                }
            }
            if (0..s.len()).any(|i| s.len() > 1 && !self.contains_idx(&delete(&s, i))) {
                return Ok(Some(s));
            }
        }
        Ok(None)
    }
}

pub(crate) fn delete(s: &[u32], i: usize) -> Vec<u32> {
    let mut t = Vec::with_capacity(s.len() - 1);
    t.extend_from_slice(&s[..i]);
    t.extend_from_slice(&s[i + 1..]);
    t
}

/// w ≤ v in the refinement order: w embeds into v along a strictly
/// increasing index map.
pub fn refines<T: PartialEq>(w: &[T], v: &[T]) -> bool {
    let mut it = v.iter();
    w.iter().all(|x| it.any(|y| y == x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(n: u32) -> Vec<Point> {
        (0..n).map(|i| vec![i]).collect()
    }

    #[test]
    fn ordered_counts() {
        let o = SequencePoset::ordered("O", pts(4)).unwrap();
        let l = o.enumerate(4, 1000).unwrap();
        assert_eq!(l.counts(), vec![4, 12, 24, 24]);
        assert!(o.chain_condition_violation(&l).is_none());
    }

    #[test]
    fn refinement_order() {
        assert!(refines(&[1, 3], &[1, 2, 3]));
        assert!(!refines(&[3, 1], &[1, 2, 3]));
        assert!(refines::<u32>(&[], &[1]));
    }

    #[test]
    fn truncation_keeps_vertices() {
        let o = Arc::new(SequencePoset::ordered("O", pts(5)).unwrap());
        let t = o.truncate(1);
        assert_eq!(t.enumerate(5, 1000).unwrap().counts(), vec![5]);
    }
}
