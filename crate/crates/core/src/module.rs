//! Finitely presented right modules over a finite ring.
//!
//! A module is R^n modulo the right submodule spanned by the relator
//! columns. Elements are stored as canonical representatives, obtained by
//! Howell reduction of the flattened Z/m-coordinates.

use crate::error::{AlgebraError, Result};
use crate::howell::HowellBasis;
use crate::linalg::{flatten, solve_elems, unflatten, RMatrix};
use crate::ring::{Elem, Ring};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModElem(pub Vec<Elem>);

impl fmt::Debug for ModElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", e.0)?;
        }
        write!(f, ")")
    }
}

impl ModElem {
    pub fn coords(&self) -> &[Elem] {
        &self.0
    }
}

pub struct Module {
    ring: Arc<Ring>,
    ngens: usize,
    relations: Vec<Vec<Elem>>,
    relbasis: HowellBasis,
    radix: Vec<u32>,
    size: u128,
}

impl fmt::Debug for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Module({} gens over {}, {} elements)",
            self.ngens,
            self.ring.label(),
            self.size
        )
    }
}

impl PartialEq for Module {
    fn eq(&self, other: &Self) -> bool {
        *self.ring == *other.ring
            && self.ngens == other.ngens
            && self.relbasis.rows() == other.relbasis.rows()
    }
}

impl Module {
    pub fn new(ring: Arc<Ring>, ngens: usize, relations: Vec<Vec<Elem>>) -> Result<Self> {
        for r in &relations {
            if r.len() != ngens || r.iter().any(|e| e.index() >= ring.size()) {
                return Err(AlgebraError::Shape(format!(
                    "relator of length {} for {} generators",
                    r.len(),
                    ngens
                )));
            }
        }
        let basis = ring.basis();
        let d = ring.dim();
        let gens = relations.iter().flat_map(|rho| {
            basis.iter().map(|&b| {
                let v: Vec<Elem> = rho.iter().map(|&x| ring.mul(x, b)).collect();
                flatten(&ring, &v)
            })
        });
        let gens: Vec<Vec<u32>> = gens.collect();
        let relbasis = HowellBasis::new(ring.modulus(), ngens * d, gens);
        let radix = relbasis.radix();
        let size = radix.iter().map(|&r| r as u128).product();
        Ok(Module {
            ring,
            ngens,
            relations,
            relbasis,
            radix,
            size,
        })
    }

    pub fn free(ring: Arc<Ring>, n: usize) -> Self {
        Self::new(ring, n, vec![]).expect("free module")
    }

    /// R/aR.
    pub fn cyclic(ring: Arc<Ring>, a: Elem) -> Self {
        Self::new(ring, 1, vec![vec![a]]).expect("cyclic module")
    }

    pub fn zero(ring: Arc<Ring>) -> Self {
        Self::free(ring, 0)
    }

    pub fn direct_sum(&self, other: &Module) -> Result<Module> {
        if *self.ring != *other.ring {
            return Err(AlgebraError::Mismatch);
        }
        let n = self.ngens + other.ngens;
        let mut rels = Vec::new();
        for r in &self.relations {
            let mut v = r.clone();
            v.resize(n, Elem::ZERO);
            rels.push(v);
        }
        for r in &other.relations {
            let mut v = vec![Elem::ZERO; self.ngens];
            v.extend_from_slice(r);
            rels.push(v);
        }
        Module::new(self.ring.clone(), n, rels)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn relations(&self) -> &[Vec<Elem>] {
        &self.relations
    }

    pub fn is_free_presentation(&self) -> bool {
        self.relbasis.is_zero()
    }

    /// Number of elements.
    pub fn size(&self) -> u128 {
        self.size
    }

    /// Canonical representative of the class of `v ∈ R^n`.
    pub fn canon(&self, v: &[Elem]) -> ModElem {
        debug_assert_eq!(v.len(), self.ngens);
        if self.relbasis.is_zero() {
            return ModElem(v.to_vec());
        }
        let mut c = flatten(&self.ring, v);
        self.relbasis.reduce(&mut c);
        ModElem(unflatten(&self.ring, &c, self.ngens))
    }

    pub fn zero_elem(&self) -> ModElem {
        ModElem(vec![Elem::ZERO; self.ngens])
    }

    pub fn gen(&self, i: usize) -> ModElem {
        let mut v = vec![Elem::ZERO; self.ngens];
        v[i] = Elem::ONE;
        self.canon(&v)
    }

    pub fn gens(&self) -> Vec<ModElem> {
        (0..self.ngens).map(|i| self.gen(i)).collect()
    }

    pub fn is_zero(&self, x: &ModElem) -> bool {
        x.0.iter().all(|&e| e == Elem::ZERO)
    }

    pub fn add(&self, a: &ModElem, b: &ModElem) -> ModElem {
        let v: Vec<Elem> = a.0.iter().zip(&b.0).map(|(&x, &y)| self.ring.add(x, y)).collect();
        self.canon(&v)
    }

    pub fn sub(&self, a: &ModElem, b: &ModElem) -> ModElem {
        let v: Vec<Elem> = a.0.iter().zip(&b.0).map(|(&x, &y)| self.ring.sub(x, y)).collect();
        self.canon(&v)
    }

    pub fn neg(&self, a: &ModElem) -> ModElem {
        let v: Vec<Elem> = a.0.iter().map(|&x| self.ring.neg(x)).collect();
        self.canon(&v)
    }

    /// Right action x·r.
    pub fn scale(&self, a: &ModElem, r: Elem) -> ModElem {
        let v: Vec<Elem> = a.0.iter().map(|&x| self.ring.mul(x, r)).collect();
        self.canon(&v)
    }

    /// sum_i v_i · c_i.
    pub fn combine(&self, vs: &[ModElem], cs: &[Elem]) -> ModElem {
        let mut acc = vec![Elem::ZERO; self.ngens];
        for (v, &c) in vs.iter().zip(cs) {
            if c == Elem::ZERO {
                continue;
            }
            for (a, &x) in acc.iter_mut().zip(&v.0) {
                *a = self.ring.add(*a, self.ring.mul(x, c));
            }
        }
        self.canon(&acc)
    }

    /// Whether `v` is a canonical representative.
    pub fn is_canonical(&self, v: &ModElem) -> bool {
        v.0.len() == self.ngens && self.canon(&v.0) == *v
    }

    /// All elements, in canonical enumeration order.
    pub fn elements(&self) -> ElementIter<'_> {
        ElementIter {
            module: self,
            counter: vec![0; self.radix.len()],
            done: false,
        }
    }

    /// Position of a canonical element in the enumeration order.
    pub fn index_of(&self, x: &ModElem) -> usize {
        let c = flatten(&self.ring, &x.0);
        let mut idx = 0usize;
        for (i, &r) in self.radix.iter().enumerate().rev() {
            idx = idx * r as usize + c[i] as usize;
        }
        idx
    }

    pub fn element_at(&self, mut idx: usize) -> ModElem {
        let c: Vec<u32> = self
            .radix
            .iter()
            .map(|&r| {
                let d = (idx % r as usize) as u32;
                idx /= r as usize;
                d
            })
            .collect();
        ModElem(unflatten(&self.ring, &c, self.ngens))
    }

    /// Relator constraints for functional values on generators.
    fn functional_constraints(&self, y: &[Elem]) -> Vec<Elem> {
        self.relations
            .iter()
            .map(|rho| self.ring.sum(y.iter().zip(rho).map(|(&a, &b)| self.ring.mul(a, b))))
            .collect()
    }

    /// All R-linear functionals M → R, by enumeration of generator values.
    /// Exponential; meant for oracles on small modules.
    pub fn all_functionals_brute(&self) -> Vec<LinearFunctional> {
        let size = self.ring.size();
        let total = size.pow(self.ngens as u32);
        (0..total)
            .filter_map(|mut idx| {
                let y: Vec<Elem> = (0..self.ngens)
                    .map(|_| {
                        let e = Elem((idx % size) as u16);
                        idx /= size;
                        e
                    })
                    .collect();
                self.functional_constraints(&y)
                    .iter()
                    .all(|&c| c == Elem::ZERO)
                    .then_some(LinearFunctional(y))
            })
            .collect()
    }

    /// Generators of the relation module of the submodule spanned by
    /// `gens`, i.e. additive generators of {x : sum gens_i x_i = 0 in M}.
    pub fn syzygies(&self, gens: &[ModElem]) -> Vec<Vec<Elem>> {
        let s = gens.len();
        let nr = self.relations.len();
        let ring = &self.ring;
        let kernel = solve_elems(
            ring,
            s + nr,
            |x| {
                let mut acc = vec![Elem::ZERO; self.ngens];
                for (i, g) in gens.iter().enumerate() {
                    for (a, &c) in acc.iter_mut().zip(&g.0) {
                        *a = ring.add(*a, ring.mul(c, x[i]));
                    }
                }
                for (j, rho) in self.relations.iter().enumerate() {
                    for (a, &c) in acc.iter_mut().zip(rho) {
                        *a = ring.sub(*a, ring.mul(c, x[s + j]));
                    }
                }
                acc
            },
            &vec![Elem::ZERO; self.ngens],
        )
        .map(|sol| sol.kernel)
        .unwrap_or_default();
        let mut out: Vec<Vec<Elem>> = kernel
            .into_iter()
            .map(|k| k[..s].to_vec())
            .filter(|k| k.iter().any(|&e| e != Elem::ZERO))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// The submodule spanned by `gens`, presented on those generators,
    /// together with its inclusion into `self`.
    pub fn present_submodule(self: &Arc<Self>, gens: &[ModElem]) -> (Arc<Module>, ModuleMap) {
        let rels = self.syzygies(gens);
        let sub = Arc::new(Module::new(self.ring.clone(), gens.len(), rels).expect("syzygy shape"));
        let incl = ModuleMap {
            domain: sub.clone(),
            codomain: self.clone(),
            images: gens.to_vec(),
        };
        (sub, incl)
    }

    /// Number of elements of the submodule spanned by `gens`.
    pub fn span_size(&self, gens: &[ModElem]) -> u128 {
        self.span_basis(gens).span_size() / self.relbasis.span_size()
    }

    fn span_basis(&self, gens: &[ModElem]) -> HowellBasis {
        let basis = self.ring.basis();
        let mut rows: Vec<Vec<u32>> = self.relbasis.rows().to_vec();
        for g in gens {
            for &b in &basis {
                let v: Vec<Elem> = g.0.iter().map(|&x| self.ring.mul(x, b)).collect();
                rows.push(flatten(&self.ring, &v));
            }
        }
        HowellBasis::new(self.ring.modulus(), self.ngens * self.ring.dim(), rows)
    }

    /// Whether `x` lies in the submodule spanned by `gens`.
    pub fn in_span(&self, gens: &[ModElem], x: &ModElem) -> bool {
        self.span_basis(gens).contains(&flatten(&self.ring, &x.0))
    }

    /// Right annihilator of `x` as a membership vector over ring elements.
    pub fn annihilator(&self, x: &ModElem) -> Vec<bool> {
        self.ring
            .elements()
            .map(|r| self.is_zero(&self.scale(x, r)))
            .collect()
    }

    /// A small generating set found greedily, each step taking the element
    /// that enlarges the span most.
    pub fn small_generating_set(&self) -> Vec<ModElem> {
        let mut chosen: Vec<ModElem> = Vec::new();
        let mut current = 1u128;
        while current < self.size {
            let mut best: Option<(u128, ModElem)> = None;
            for x in self.elements() {
                if self.is_zero(&x) {
                    continue;
                }
                let mut trial = chosen.clone();
                trial.push(x.clone());
                let s = self.span_size(&trial);
                if best.as_ref().is_none_or(|(b, _)| s > *b) {
                    best = Some((s, x));
                }
                if s == self.size {
                    break;
                }
            }
            let (s, x) = best.expect("nonzero element outside span");
            chosen.push(x);
            current = s;
        }
        chosen
    }

    /// Re-presentation on a small generating set, with its isomorphism
    /// onto `self`.
    pub fn minimal_presentation(self: &Arc<Self>) -> (Arc<Module>, ModuleMap) {
        let gens = self.small_generating_set();
        self.present_submodule(&gens)
    }

    /// All elements of the submodule spanned by `gens`.
    pub fn span_elements(&self, gens: &[ModElem]) -> Vec<ModElem> {
        let basis = self.ring.basis();
        let additive: Vec<ModElem> = gens
            .iter()
            .flat_map(|g| basis.iter().map(move |&b| self.scale(g, b)))
            .filter(|x| !self.is_zero(x))
            .collect();
        let mut seen: HashSet<ModElem> = HashSet::new();
        let zero = self.zero_elem();
        seen.insert(zero.clone());
        let mut out = vec![zero];
        let mut i = 0;
        while i < out.len() {
            let x = out[i].clone();
            for a in &additive {
                let y = self.add(&x, a);
                if seen.insert(y.clone()) {
                    out.push(y);
                }
            }
            i += 1;
        }
        out
    }

    /// Coefficients c with sum gens_i c_i = x, if x lies in their span.
    pub fn express(&self, gens: &[ModElem], x: &ModElem) -> Option<Vec<Elem>> {
        let s = gens.len();
        let ring = &self.ring;
        let sol = solve_elems(
            ring,
            s + self.relations.len(),
            |c| {
                let mut acc = vec![Elem::ZERO; self.ngens];
                for (i, g) in gens.iter().enumerate() {
                    for (a, &v) in acc.iter_mut().zip(&g.0) {
                        *a = ring.add(*a, ring.mul(v, c[i]));
                    }
                }
                for (j, rho) in self.relations.iter().enumerate() {
                    for (a, &v) in acc.iter_mut().zip(rho) {
                        *a = ring.sub(*a, ring.mul(v, c[s + j]));
                    }
                }
                acc
            },
            &x.0,
        )?;
        Some(sol.particular[..s].to_vec())
    }

    /// Number of R-linear functionals M → R.
    pub fn dual_size(&self) -> u128 {
        let d = self.ring.dim();
        let kernel = crate::linalg::kernel_elems(&self.ring, self.ngens, self.relations.len(), |y| {
            self.functional_constraints(y)
        });
        let rows: Vec<Vec<u32>> = kernel.iter().map(|k| flatten(&self.ring, k)).collect();
        HowellBasis::new(self.ring.modulus(), self.ngens * d, rows).span_size()
    }
}

pub struct ElementIter<'a> {
    module: &'a Module,
    counter: Vec<u32>,
    done: bool,
}

impl Iterator for ElementIter<'_> {
    type Item = ModElem;

    fn next(&mut self) -> Option<ModElem> {
        if self.done {
            return None;
        }
        let out = ModElem(unflatten(&self.module.ring, &self.counter, self.module.ngens));
        let mut i = 0;
        loop {
            if i == self.counter.len() {
                self.done = true;
                break;
            }
            self.counter[i] += 1;
            if self.counter[i] < self.module.radix[i] {
                break;
            }
            self.counter[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

/// An R-linear map M → R given by its values on generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearFunctional(pub Vec<Elem>);

impl LinearFunctional {
    pub fn eval(&self, ring: &Ring, x: &ModElem) -> Elem {
        ring.sum(self.0.iter().zip(&x.0).map(|(&a, &b)| ring.mul(a, b)))
    }
}

/// Applies the inverse-matrix correction: given functionals whose matrix
/// (φ̃_l(v_i)) is invertible, returns φ with φ_j(v_i) = δ_ij.
pub fn correct_dual_maps(
    module: &Module,
    seq: &[ModElem],
    tilde: &[LinearFunctional],
) -> Option<Vec<LinearFunctional>> {
    let ring = module.ring();
    let k = seq.len();
    if tilde.len() != k {
        return None;
    }
    let mut a = RMatrix::zeros(k, k);
    for (l, phi) in tilde.iter().enumerate() {
        for (i, v) in seq.iter().enumerate() {
            a.set(l, i, phi.eval(ring, v));
        }
    }
    let b = a.inverse(ring)?;
    Some(
        (0..k)
            .map(|j| {
                LinearFunctional(
                    (0..module.ngens())
                        .map(|g| ring.sum((0..k).map(|l| ring.mul(b.get(j, l), tilde[l].0[g]))))
                        .collect(),
                )
            })
            .collect(),
    )
}

/// Dual functionals φ_j with φ_j(v_i) = δ_ij, if the sequence is unimodular.
pub fn is_unimodular(module: &Module, seq: &[ModElem]) -> Result<Option<Vec<LinearFunctional>>> {
    if seq.is_empty() {
        return Err(AlgebraError::Precondition("empty sequence".into()));
    }
    let ring = module.ring();
    let k = seq.len();
    let nrel = module.relations.len();
    let mut duals = Vec::with_capacity(k);
    for j in 0..k {
        let mut target = vec![Elem::ZERO; nrel + k];
        target[nrel + j] = Elem::ONE;
        let sol = solve_elems(
            ring,
            module.ngens(),
            |y| {
                let mut out = module.functional_constraints(y);
                for v in seq {
                    out.push(ring.sum(y.iter().zip(&v.0).map(|(&a, &b)| ring.mul(a, b))));
                }
                out
            },
            &target,
        );
        match sol {
            None => return Ok(None),
            Some(s) => duals.push(LinearFunctional(s.particular)),
        }
    }
    Ok(Some(duals))
}

pub fn unimodular(module: &Module, seq: &[ModElem]) -> bool {
    !seq.is_empty() && matches!(is_unimodular(module, seq), Ok(Some(_)))
}

/// Largest length of a unimodular sequence.
pub fn rank(module: &Module) -> usize {
    let ring_size = module.ring().size() as f64;
    let by_size = if module.size() <= 1 {
        0
    } else {
        ((module.size() as f64).ln() / ring_size.ln() + 1e-9).floor() as usize
    };
    let bound = by_size.min(module.small_generating_set().len());
    if bound == 0 {
        return 0;
    }
    let uni: Vec<ModElem> = module
        .elements()
        .filter(|x| unimodular(module, std::slice::from_ref(x)))
        .collect();
    if uni.is_empty() {
        return 0;
    }
    let mut best = 1;
    let mut seq = Vec::new();
    rank_dfs(module, &uni, 0, &mut seq, bound, &mut best);
    best
}

fn rank_dfs(
    module: &Module,
    uni: &[ModElem],
    start: usize,
    seq: &mut Vec<ModElem>,
    bound: usize,
    best: &mut usize,
) {
    if *best >= bound {
        return;
    }
    for i in start..uni.len() {
        seq.push(uni[i].clone());
        if unimodular(module, seq) {
            *best = (*best).max(seq.len());
            rank_dfs(module, uni, i + 1, seq, bound, best);
        }
        seq.pop();
        if *best >= bound {
            return;
        }
    }
}

/// A decomposition M ≅ R^k ⊕ C from a unimodular sequence.
#[derive(Debug)]
pub struct Splitting {
    pub duals: Vec<LinearFunctional>,
    pub complement: Arc<Module>,
    pub inclusion: ModuleMap,
    pub projection: ModuleMap,
}

pub fn split_summand(module: &Arc<Module>, seq: &[ModElem]) -> Result<Splitting> {
    let duals = is_unimodular(module, seq)?
        .ok_or_else(|| AlgebraError::Precondition("sequence not unimodular".into()))?;
    let ring = module.ring();
    let proj = |m: &ModElem| -> ModElem {
        let cs: Vec<Elem> = duals.iter().map(|phi| ring.neg(phi.eval(ring, m))).collect();
        let mut vs = seq.to_vec();
        vs.push(m.clone());
        let mut cs = cs;
        cs.push(Elem::ONE);
        module.combine(&vs, &cs)
    };
    let images: Vec<ModElem> = module.gens().iter().map(proj).collect();
    let (complement, inclusion) = module.present_submodule(&images);
    let projection = ModuleMap::new(
        module.clone(),
        complement.clone(),
        complement.gens(),
    )?;
    Ok(Splitting {
        duals,
        complement,
        inclusion,
        projection,
    })
}

/// A homomorphism of presented modules, given by generator images.
#[derive(Clone)]
pub struct ModuleMap {
    domain: Arc<Module>,
    codomain: Arc<Module>,
    images: Vec<ModElem>,
}

impl fmt::Debug for ModuleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModuleMap{:?}", self.images)
    }
}

impl ModuleMap {
    pub fn new(domain: Arc<Module>, codomain: Arc<Module>, images: Vec<ModElem>) -> Result<Self> {
        if images.len() != domain.ngens() {
            return Err(AlgebraError::Shape("one image per generator needed".into()));
        }
        let images: Vec<ModElem> = images.iter().map(|x| codomain.canon(&x.0)).collect();
        let map = ModuleMap {
            domain,
            codomain,
            images,
        };
        for (i, rho) in map.domain.relations().iter().enumerate() {
            let img = map.apply_coords(rho);
            if !map.codomain.is_zero(&img) {
                return Err(AlgebraError::IllDefined(format!("relator {i} maps to {img:?}")));
            }
        }
        Ok(map)
    }

    pub fn identity(m: Arc<Module>) -> Self {
        let images = m.gens();
        ModuleMap {
            domain: m.clone(),
            codomain: m,
            images,
        }
    }

    pub fn domain(&self) -> &Arc<Module> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Module> {
        &self.codomain
    }

    pub fn images(&self) -> &[ModElem] {
        &self.images
    }

    fn apply_coords(&self, x: &[Elem]) -> ModElem {
        self.codomain.combine(&self.images, x)
    }

    pub fn apply(&self, x: &ModElem) -> ModElem {
        self.apply_coords(&x.0)
    }

    /// self ∘ first.
    pub fn compose_after(&self, first: &ModuleMap) -> ModuleMap {
        assert!(*first.codomain == *self.domain, "composition shapes");
        ModuleMap {
            domain: first.domain.clone(),
            codomain: self.codomain.clone(),
            images: first.images.iter().map(|x| self.apply(x)).collect(),
        }
    }

    pub fn image_size(&self) -> u128 {
        self.codomain.span_size(&self.images)
    }

    pub fn is_injective(&self) -> bool {
        self.image_size() == self.domain.size()
    }

    pub fn is_surjective(&self) -> bool {
        self.image_size() == self.codomain.size()
    }

    pub fn is_bijective(&self) -> bool {
        self.domain.size() == self.codomain.size() && self.is_surjective()
    }

    /// Inverse of a bijective map.
    pub fn inverse(&self) -> Option<ModuleMap> {
        if !self.is_bijective() {
            return None;
        }
        let ring = self.codomain.ring().clone();
        let n = self.domain.ngens();
        let nr = self.codomain.relations().len();
        let mut pre = Vec::with_capacity(self.codomain.ngens());
        for j in 0..self.codomain.ngens() {
            let mut target = vec![Elem::ZERO; self.codomain.ngens()];
            target[j] = Elem::ONE;
            let sol = solve_elems(
                &ring,
                n + nr,
                |x| {
                    let mut acc = vec![Elem::ZERO; self.codomain.ngens()];
                    for (i, g) in self.images.iter().enumerate() {
                        for (a, &c) in acc.iter_mut().zip(&g.0) {
                            *a = ring.add(*a, ring.mul(c, x[i]));
                        }
                    }
                    for (r, rho) in self.codomain.relations().iter().enumerate() {
                        for (a, &c) in acc.iter_mut().zip(rho) {
                            *a = ring.sub(*a, ring.mul(c, x[n + r]));
                        }
                    }
                    acc
                },
                &target,
            )?;
            pre.push(self.domain.canon(&sol.particular[..n]));
        }
        ModuleMap::new(self.codomain.clone(), self.domain.clone(), pre).ok()
    }

    pub fn same_as(&self, other: &ModuleMap) -> bool {
        *self.domain == *other.domain && *self.codomain == *other.codomain && self.images == other.images
    }
}

/// An isomorphism M → N if one exists.
pub fn is_isomorphic(m: &Arc<Module>, n: &Arc<Module>) -> Option<ModuleMap> {
    if *m.ring() != *n.ring() || m.size() != n.size() {
        return None;
    }
    let stats = |x: &Arc<Module>| {
        let mut h: HashMap<Vec<bool>, usize> = HashMap::new();
        for e in x.elements() {
            *h.entry(x.annihilator(&e)).or_default() += 1;
        }
        h
    };
    let n_elems: Vec<ModElem> = n.elements().collect();
    let n_ann: Vec<Vec<bool>> = n_elems.iter().map(|e| n.annihilator(e)).collect();
    {
        let mut hn: HashMap<Vec<bool>, usize> = HashMap::new();
        for a in &n_ann {
            *hn.entry(a.clone()).or_default() += 1;
        }
        if stats(m) != hn {
            return None;
        }
    }
    let (mp, iota) = m.minimal_presentation();
    let t = mp.ngens();
    let targets: Vec<Vec<&ModElem>> = iota
        .images()
        .iter()
        .map(|s| {
            let a = m.annihilator(s);
            n_elems
                .iter()
                .zip(&n_ann)
                .filter(|(_, b)| **b == a)
                .map(|(e, _)| e)
                .collect()
        })
        .collect();
    let span_sizes: Vec<u128> = (1..=t).map(|i| mp.span_size(&mp.gens()[..i])).collect();
    let mut chosen: Vec<ModElem> = Vec::with_capacity(t);
    let found = iso_search(&mp, n, &targets, &span_sizes, &mut chosen);
    if !found {
        return None;
    }
    let f = ModuleMap::new(mp.clone(), n.clone(), chosen).ok()?;
    let back = iota.inverse()?;
    let map = f.compose_after(&back);
    map.is_bijective().then_some(map)
}

fn iso_search(
    mp: &Arc<Module>,
    n: &Arc<Module>,
    targets: &[Vec<&ModElem>],
    span_sizes: &[u128],
    chosen: &mut Vec<ModElem>,
) -> bool {
    let i = chosen.len();
    if i == targets.len() {
        return n.span_size(chosen) == n.size();
    }
    for &cand in &targets[i] {
        chosen.push(cand.clone());
        let ok_rel = mp.relations().iter().all(|rho| {
            let last = rho.iter().rposition(|&e| e != Elem::ZERO);
            last != Some(i) || n.is_zero(&n.combine(chosen, &rho[..=i]))
        });
        if ok_rel && n.span_size(chosen) == span_sizes[i] && iso_search(mp, n, targets, span_sizes, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Result of the split-injection orbit computation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GlOrbitReport {
    pub applicable: bool,
    pub rank: usize,
    pub stable_rank: usize,
    pub unimodular_count: usize,
    pub orbit_sizes: Vec<usize>,
    pub single_orbit: bool,
    pub verified_moves: usize,
}

/// Orbits of GL(M) on unimodular elements (split injections R → M).
///
/// Moves are the swap automorphism of a unimodular pair, which exchanges
/// v and w and fixes the common kernel of their duals, and the scaling
/// automorphism m ↦ m + v(u−1)φ(m) for units u. Each move used in the BFS
/// tree is built as a module map and checked to be bijective.
pub fn gl_transitive_check(module: &Arc<Module>, stable_rank: usize) -> Result<GlOrbitReport> {
    let rk = rank(module);
    let ring = module.ring().clone();
    let uni: Vec<(ModElem, LinearFunctional)> = module
        .elements()
        .filter_map(|x| {
            is_unimodular(module, std::slice::from_ref(&x))
                .ok()
                .flatten()
                .map(|d| (x, d[0].clone()))
        })
        .collect();
    let index: HashMap<ModElem, usize> = uni.iter().enumerate().map(|(i, (x, _))| (x.clone(), i)).collect();
    let gens = module.gens();
    let mut seen = vec![false; uni.len()];
    let mut orbit_sizes = Vec::new();
    let mut verified = 0usize;
    for s in 0..uni.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut size = 1;
        let mut queue = VecDeque::from([s]);
        while let Some(i) = queue.pop_front() {
            let (v, phi) = &uni[i];
            let mut neighbours: Vec<(usize, ModuleMap)> = Vec::new();
            for &u in ring.units() {
                let target = module.scale(v, u);
                let Some(&j) = index.get(&target) else { continue };
                if seen[j] {
                    continue;
                }
                let um1 = ring.sub(u, Elem::ONE);
                let images: Vec<ModElem> = gens
                    .iter()
                    .map(|g| {
                        let c = ring.mul(um1, phi.eval(&ring, g));
                        module.combine(&[g.clone(), v.clone()], &[Elem::ONE, c])
                    })
                    .collect();
                neighbours.push((j, ModuleMap::new(module.clone(), module.clone(), images)?));
            }
            for (j, (w, _)) in uni.iter().enumerate() {
                if seen[j] || neighbours.iter().any(|(k, _)| *k == j) {
                    continue;
                }
                let pair = [v.clone(), w.clone()];
                let Some(d) = is_unimodular(module, &pair)? else { continue };
                let images: Vec<ModElem> = gens
                    .iter()
                    .map(|g| {
                        let a = d[0].eval(&ring, g);
                        let b = d[1].eval(&ring, g);
                        let na = ring.neg(a);
                        let nb = ring.neg(b);
                        module.combine(
                            &[g.clone(), v.clone(), w.clone(), w.clone(), v.clone()],
                            &[Elem::ONE, na, nb, a, b],
                        )
                    })
                    .collect();
                neighbours.push((j, ModuleMap::new(module.clone(), module.clone(), images)?));
            }
            for (j, f) in neighbours {
                if seen[j] {
                    continue;
                }
                if !f.is_bijective() || f.apply(v) != uni[j].0 {
                    return Err(AlgebraError::Internal("orbit move failed verification".into()));
                }
                verified += 1;
                seen[j] = true;
                size += 1;
                queue.push_back(j);
            }
        }
        orbit_sizes.push(size);
    }
    Ok(GlOrbitReport {
        applicable: rk > stable_rank,
        rank: rk,
        stable_rank,
        unimodular_count: uni.len(),
        single_orbit: orbit_sizes.len() == 1,
        orbit_sizes,
        verified_moves: verified,
    })
}

/// Set of all elements reachable as images of `x` under automorphisms;
/// used as an oracle by tests (enumerates all of GL(M)).
pub fn gl_orbits_brute(module: &Arc<Module>) -> Vec<HashSet<ModElem>> {
    let (mp, iota) = module.minimal_presentation();
    let back = iota.inverse().expect("presentation iso");
    let elems: Vec<ModElem> = module.elements().collect();
    let mut autos: Vec<ModuleMap> = Vec::new();
    let t = mp.ngens();
    let mut idx = vec![0usize; t];
    loop {
        let images: Vec<ModElem> = idx.iter().map(|&i| elems[i].clone()).collect();
        if let Ok(f) = ModuleMap::new(mp.clone(), module.clone(), images) {
            if f.is_bijective() {
                autos.push(f.compose_after(&back));
            }
        }
        let mut k = 0;
        loop {
            if k == t {
                break;
            }
            idx[k] += 1;
            if idx[k] < elems.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == t {
            break;
        }
    }
    let uni: Vec<ModElem> = elems
        .iter()
        .filter(|x| unimodular(module, std::slice::from_ref(*x)))
        .cloned()
        .collect();
    let mut orbits: Vec<HashSet<ModElem>> = Vec::new();
    for v in uni {
        if orbits.iter().any(|o| o.contains(&v)) {
            continue;
        }
        orbits.push(autos.iter().map(|f| f.apply(&v)).collect());
    }
    orbits
}
