//! Stable rank sr(R), the transitivity condition (T_n), and the unitary
//! stable rank usr(R), by exhaustive search.

use crate::error::{AlgebraError, Result};
use crate::form::FormParameter;
use crate::module::ModElem;
use crate::quad::{transvection, unitary_group, QuadraticModule, UnitaryMap};
use crate::ring::{Elem, Ring};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

/// Default number of vector visits allowed per check.
pub const DEFAULT_BUDGET: u64 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EuMode {
    /// Orbits of the group generated by elementary transvections.
    Transvection,
    /// Orbits of the full unitary group U(H^n).
    FullU,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub vectors_visited: u64,
    pub candidates_tried: u64,
    pub classes: usize,
    pub orbits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeReport {
    pub ring: String,
    pub property: String,
    pub n: usize,
    pub holds: bool,
    /// Element indices of a failing vector, or of two vectors in distinct
    /// orbits of one class.
    pub counterexample: Option<Vec<Vec<u16>>>,
    pub mode: Option<EuMode>,
    pub stats: SearchStats,
}

fn decode(size: usize, mut idx: usize, len: usize, out: &mut [Elem]) {
    for o in out.iter_mut().take(len) {
        *o = Elem((idx % size) as u16);
        idx /= size;
    }
}

fn encode(size: usize, v: &[Elem]) -> usize {
    v.iter().rev().fold(0, |acc, e| acc * size + e.index())
}

fn count(size: usize, len: usize, budget: u64) -> Result<usize> {
    let total = (size as u128).pow(len as u32);
    if total > budget as u128 {
        return Err(AlgebraError::Budget(format!("{total} vectors exceed budget {budget}")));
    }
    Ok(total as usize)
}

/// (S_n): every unimodular (r_1, …, r_{n+1}) has t with
/// (r_1 + t_1 r_{n+1}, …, r_n + t_n r_{n+1}) unimodular.
pub fn check_sn(ring: &Ring, n: usize, budget: u64) -> Result<RangeReport> {
    if n == 0 {
        return Err(AlgebraError::Precondition("n must be at least 1".into()));
    }
    let size = ring.size();
    let total = count(size, n + 1, budget)?;
    let tcount = size.pow(n as u32);
    let results: Vec<(u64, Option<Vec<u16>>)> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut row = vec![Elem::ZERO; n + 1];
            decode(size, idx, n + 1, &mut row);
            if !ring.is_unimodular_row(&row) {
                return (0, None);
            }
            let last = row[n];
            let mut t = vec![Elem::ZERO; n];
            let mut short = vec![Elem::ZERO; n];
            for (tries, tidx) in (0..tcount).enumerate() {
                decode(size, tidx, n, &mut t);
                for i in 0..n {
                    short[i] = ring.add(row[i], ring.mul(t[i], last));
                }
                if ring.is_unimodular_row(&short) {
                    return (tries as u64 + 1, None);
                }
            }
            (tcount as u64, Some(row.iter().map(|e| e.0).collect()))
        })
        .collect();
    let tried = results.iter().map(|r| r.0).sum();
    let fail = results.into_iter().find_map(|r| r.1);
    Ok(RangeReport {
        ring: ring.label().to_string(),
        property: "S_n".into(),
        n,
        holds: fail.is_none(),
        counterexample: fail.map(|r| vec![r]),
        mode: None,
        stats: SearchStats {
            vectors_visited: total as u64,
            candidates_tried: tried,
            ..Default::default()
        },
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StableRankResult {
    /// Least n ≤ n_max with (S_n), or None for "> n_max".
    pub value: Option<usize>,
    pub reports: Vec<RangeReport>,
    /// Whether (S_n) ⇒ (S_{n+1}) held throughout the checked range.
    pub monotone: bool,
}

pub fn stable_rank(ring: &Ring, n_max: usize, budget: u64) -> Result<StableRankResult> {
    let mut reports = Vec::new();
    for n in 1..=n_max.max(1) {
        match check_sn(ring, n, budget) {
            Ok(r) => reports.push(r),
            Err(AlgebraError::Budget(_)) if !reports.is_empty() => break,
            Err(e) => return Err(e),
        }
    }
    let value = reports.iter().find(|r| r.holds).map(|r| r.n);
    let monotone = reports.windows(2).all(|w| !w[0].holds || w[1].holds);
    Ok(StableRankResult {
        value,
        reports,
        monotone,
    })
}

/// An elementary transvection τ(b, u, x) of H^n with b a standard basis
/// vector (index into e_1, f_1, …, e_n, f_n).
#[derive(Clone, Debug)]
pub struct EuGenerator {
    pub basis: usize,
    pub u: ModElem,
    pub x: Elem,
    pub map: UnitaryMap,
}

fn dual_index(k: usize) -> usize {
    k ^ 1
}

/// All τ(b, u, x) with b a standard basis vector, λ(b, u) = 0 and x ∈ μ(u).
pub fn elementary_unitary_generators(param: &Arc<FormParameter>, n: usize, cap: usize) -> Result<Vec<EuGenerator>> {
    let h = QuadraticModule::hyperbolic(param.clone(), n);
    let m = h.module();
    let count = (2 * n) as u128 * m.size() * param.members().len() as u128;
    if count > cap as u128 {
        return Err(AlgebraError::CapExceeded(format!("{count} generators")));
    }
    let mut out = Vec::new();
    for b in 0..2 * n {
        let e = m.gen(b);
        for u in m.elements() {
            if h.lambda(&e, &u) != Elem::ZERO {
                continue;
            }
            for x in param.coset_elements(h.mu(&u)) {
                let map = transvection(&h, &e, &u, x)?;
                out.push(EuGenerator {
                    basis: b,
                    u: u.clone(),
                    x,
                    map,
                });
            }
        }
    }
    Ok(out)
}

/// λ(b_k, v) for the standard basis of H^n.
fn lam_basis(ring: &Ring, eps: Elem, k: usize, v: &[Elem]) -> Elem {
    if k % 2 == 0 {
        v[k + 1]
    } else {
        ring.mul(eps, v[k - 1])
    }
}

/// μ(v) representative on H^n: Σ conj(a_i) b_i.
fn mu_hyperbolic(ring: &Ring, v: &[Elem]) -> Elem {
    ring.sum(v.chunks(2).map(|p| ring.mul(ring.conj(p[0]), p[1])))
}

/// Reduced generating data (b, c, r, x) for τ(b, c·r, x) with c a basis
/// vector other than the dual of b, and x ∈ Λ = μ(c·r). Products of these
/// give every τ(b, u, x), since transvections along a fixed b compose
/// additively in u.
fn reduced_generators(ring: &Ring, param: &FormParameter, n: usize) -> Vec<(usize, usize, Elem, Elem)> {
    let mut gens = Vec::new();
    for b in 0..2 * n {
        for &x in param.members() {
            gens.push((b, b, Elem::ZERO, x));
        }
        for c in 0..2 * n {
            if c == dual_index(b) {
                continue;
            }
            for r in ring.elements().skip(1) {
                for &x in param.members() {
                    gens.push((b, c, r, x));
                }
            }
        }
    }
    gens
}

fn apply_reduced(ring: &Ring, eps: Elem, gen: (usize, usize, Elem, Elem), v: &mut [Elem]) {
    let (b, c, r, x) = gen;
    let eb = ring.conj(eps);
    let le = lam_basis(ring, eps, b, v);
    let lu = ring.mul(ring.conj(r), lam_basis(ring, eps, c, v));
    let delta_b = ring.neg(ring.add(ring.mul(eb, lu), ring.mul3(eb, x, le)));
    v[c] = ring.add(v[c], ring.mul(r, le));
    v[b] = ring.add(v[b], delta_b);
}

/// Unimodular vectors of R^{2n} grouped by μ-class, as encoded indices.
fn classes(ring: &Ring, param: &FormParameter, n: usize, budget: u64) -> Result<BTreeMap<Elem, Vec<usize>>> {
    let size = ring.size();
    let total = count(size, 2 * n, budget)?;
    let tagged: Vec<Option<(Elem, usize)>> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut v = vec![Elem::ZERO; 2 * n];
            decode(size, idx, 2 * n, &mut v);
            ring.is_unimodular_row(&v)
                .then(|| (param.coset(mu_hyperbolic(ring, &v)).rep(), idx))
        })
        .collect();
    let mut map: BTreeMap<Elem, Vec<usize>> = BTreeMap::new();
    for (c, idx) in tagged.into_iter().flatten() {
        map.entry(c).or_default().push(idx);
    }
    Ok(map)
}

/// Orbit decomposition of one μ-class under the reduced transvection set.
fn class_orbits_transvection(
    ring: &Ring,
    eps: Elem,
    gens: &[(usize, usize, Elem, Elem)],
    n: usize,
    members: &[usize],
    order: &[usize],
) -> (Vec<Vec<usize>>, u64) {
    let size = ring.size();
    let total = size.pow(2 * n as u32);
    let mut seen = vec![false; total];
    let mut orbits = Vec::new();
    let mut visited = 0u64;
    let mut v = vec![Elem::ZERO; 2 * n];
    for &start in members {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(idx) = queue.pop_front() {
            visited += 1;
            for &g in order {
                decode(size, idx, 2 * n, &mut v);
                apply_reduced(ring, eps, gens[g], &mut v);
                let j = encode(size, &v);
                if !seen[j] {
                    seen[j] = true;
                    orbit.push(j);
                    queue.push_back(j);
                }
            }
        }
        orbit.sort();
        orbits.push(orbit);
    }
    (orbits, visited)
}

fn class_orbits_full(group: &[UnitaryMap], n: usize, size: usize, members: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = std::collections::HashSet::new();
    let mut orbits = Vec::new();
    let mut v = vec![Elem::ZERO; 2 * n];
    for &start in members {
        if seen.contains(&start) {
            continue;
        }
        decode(size, start, 2 * n, &mut v);
        let x = ModElem(v.clone());
        let mut orbit: Vec<usize> = group.iter().map(|g| encode(size, &g.apply(&x).0)).collect();
        orbit.sort();
        orbit.dedup();
        for &o in &orbit {
            seen.insert(o);
        }
        orbits.push(orbit);
    }
    orbits
}

/// Orbits of each μ-class of unimodular vectors in R^{2n}, keyed by the
/// class representative.
pub fn tn_orbits(
    param: &Arc<FormParameter>,
    n: usize,
    mode: EuMode,
    budget: u64,
    shuffle_seed: Option<u64>,
) -> Result<(BTreeMap<Elem, Vec<Vec<usize>>>, u64)> {
    let ring = param.ring().clone();
    let eps = param.epsilon();
    let cls = classes(&ring, param, n, budget)?;
    match mode {
        EuMode::Transvection => {
            let gens = reduced_generators(&ring, param, n);
            let mut order: Vec<usize> = (0..gens.len()).collect();
            if let Some(seed) = shuffle_seed {
                use rand::seq::SliceRandom;
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                order.shuffle(&mut rng);
            }
            let results: Vec<(Elem, Vec<Vec<usize>>, u64)> = cls
                .par_iter()
                .map(|(c, members)| {
                    let (o, visited) = class_orbits_transvection(&ring, eps, &gens, n, members, &order);
                    (*c, o, visited)
                })
                .collect();
            let visited = results.iter().map(|r| r.2).sum();
            Ok((results.into_iter().map(|(c, o, _)| (c, o)).collect(), visited))
        }
        EuMode::FullU => {
            let h = QuadraticModule::hyperbolic(param.clone(), n);
            let group = unitary_group(&h, 1 << 20)?;
            let size = ring.size();
            let visited = cls.values().map(|m| m.len() as u64).sum();
            let out = cls
                .iter()
                .map(|(c, members)| (*c, class_orbits_full(&group, n, size, members)))
                .collect();
            Ok((out, visited))
        }
    }
}

/// (T_n): each μ-class of unimodular vectors of R^{2n} is a single orbit.
pub fn check_tn(param: &Arc<FormParameter>, n: usize, mode: EuMode, budget: u64) -> Result<RangeReport> {
    if n == 0 {
        return Err(AlgebraError::Precondition("n must be at least 1".into()));
    }
    let ring = param.ring();
    let size = ring.size();
    let (orbits, visited) = tn_orbits(param, n, mode, budget, None)?;
    let mut counterexample = None;
    for o in orbits.values() {
        if o.len() > 1 && counterexample.is_none() {
            let mut a = vec![Elem::ZERO; 2 * n];
            let mut b = vec![Elem::ZERO; 2 * n];
            decode(size, o[0][0], 2 * n, &mut a);
            decode(size, o[1][0], 2 * n, &mut b);
            counterexample = Some(vec![a.iter().map(|e| e.0).collect(), b.iter().map(|e| e.0).collect()]);
        }
    }
    Ok(RangeReport {
        ring: ring.label().to_string(),
        property: "T_n".into(),
        n,
        holds: counterexample.is_none(),
        counterexample,
        mode: Some(mode),
        stats: SearchStats {
            vectors_visited: visited,
            candidates_tried: 0,
            classes: orbits.len(),
            orbits: orbits.values().map(|o| o.len()).sum(),
        },
    })
}

/// One reduced elementary transvection τ(b, c·r, x) of H^n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementaryStep {
    pub basis: usize,
    pub partner: usize,
    pub r: Elem,
    pub x: Elem,
}

impl ElementaryStep {
    pub fn apply(&self, ring: &Ring, eps: Elem, v: &mut [Elem]) {
        apply_reduced(ring, eps, (self.basis, self.partner, self.r, self.x), v);
    }

    /// Coordinates of (e, u) in H^n, and x.
    pub fn data(&self, n: usize) -> (Vec<Elem>, Vec<Elem>, Elem) {
        let mut e = vec![Elem::ZERO; 2 * n];
        e[self.basis] = Elem::ONE;
        let mut u = vec![Elem::ZERO; 2 * n];
        u[self.partner] = self.r;
        (e, u, self.x)
    }
}

/// Shortest sequence of reduced elementary transvections carrying `start`
/// to some vector accepted by `target`, found by breadth-first search.
pub fn eu_path<F>(param: &FormParameter, n: usize, start: &[Elem], target: F, budget: u64) -> Result<Option<Vec<ElementaryStep>>>
where
    F: Fn(&[Elem]) -> bool,
{
    let ring = param.ring();
    let eps = param.epsilon();
    if target(start) {
        return Ok(Some(Vec::new()));
    }
    let gens: Vec<ElementaryStep> = reduced_generators(ring, param, n)
        .into_iter()
        .map(|(basis, partner, r, x)| ElementaryStep { basis, partner, r, x })
        .collect();
    let mut parent: HashMap<Vec<Elem>, (Vec<Elem>, usize)> = HashMap::new();
    parent.insert(start.to_vec(), (Vec::new(), usize::MAX));
    let mut queue = VecDeque::from([start.to_vec()]);
    let mut visited = 0u64;
    while let Some(v) = queue.pop_front() {
        visited += 1;
        if visited > budget {
            return Err(AlgebraError::Budget(format!("path search visited {visited} vectors")));
        }
        for (gi, g) in gens.iter().enumerate() {
            let mut w = v.clone();
            g.apply(ring, eps, &mut w);
            if parent.contains_key(&w) {
                continue;
            }
            parent.insert(w.clone(), (v.clone(), gi));
            if target(&w) {
                let mut path = Vec::new();
                let mut cur = w;
                while cur != start {
                    let (prev, gi) = parent[&cur].clone();
                    path.push(gens[gi]);
                    cur = prev;
                }
                path.reverse();
                return Ok(Some(path));
            }
            queue.push_back(w);
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UsrResult {
    /// Least n ≤ n_max with (S_n) and (T_{n+1}), or None.
    pub value: Option<usize>,
    pub sr: Option<usize>,
    pub reports: Vec<RangeReport>,
    /// Set when a (T_n) check ran out of budget before a value was found.
    pub budget_exhausted: bool,
}

pub fn unitary_stable_rank(param: &Arc<FormParameter>, n_max: usize, mode: EuMode, budget: u64) -> Result<UsrResult> {
    let ring = param.ring();
    let sr = stable_rank(ring, n_max, budget)?;
    let mut reports = sr.reports.clone();
    let mut value = None;
    let mut budget_exhausted = false;
    for n in 1..=n_max.max(1) {
        let sn = sr.reports.iter().find(|r| r.n == n).is_some_and(|r| r.holds);
        if !sn {
            continue;
        }
        match check_tn(param, n + 1, mode, budget) {
            Ok(r) => {
                let holds = r.holds;
                reports.push(r);
                if holds {
                    value = Some(n);
                    break;
                }
            }
            Err(AlgebraError::Budget(_)) => {
                budget_exhausted = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(UsrResult {
        value,
        sr: sr.value,
        reports,
        budget_exhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::make_form_parameter;
    use crate::ring::{make_ring, Involution, RingSpec};

    #[test]
    fn gf2_and_z4_have_stable_rank_one() {
        for spec in [RingSpec::Gf { q: 2, involution: Involution::Identity }, RingSpec::Zmod { n: 4 }] {
            let r = make_ring(&spec).unwrap();
            let s = stable_rank(&r, 2, DEFAULT_BUDGET).unwrap();
            assert_eq!(s.value, Some(1));
            assert!(s.monotone);
        }
    }

    #[test]
    fn reduced_generators_act_as_transvections() {
        let r = Arc::new(make_ring(&RingSpec::Zmod { n: 4 }).unwrap());
        let p = Arc::new(make_form_parameter(r.clone(), Elem(3), &[]).unwrap());
        let h = QuadraticModule::hyperbolic(p.clone(), 2);
        let m = h.module();
        for g in reduced_generators(&r, &p, 2) {
            let u = m.scale(&m.gen(g.1), g.2);
            let t = transvection(&h, &m.gen(g.0), &u, g.3).unwrap();
            for v in m.elements().step_by(7) {
                let mut w = v.0.clone();
                apply_reduced(&r, p.epsilon(), g, &mut w);
                assert_eq!(t.apply(&v).0, w);
            }
        }
    }
}
