//! Quadratic modules (M, λ, μ) for a form parameter (ε, Λ).
//!
//! λ is stored as a Gram matrix on generators and extended sesquilinearly,
//! antilinear in the first slot. μ is stored on generators and extended by
//!
//!   μ(Σ g_a x_a) = Σ_a conj(x_a) μ_a x_a + Σ_{a<b} conj(x_a) λ(g_a, g_b) x_b,
//!
//! which is the only extension compatible with axioms (2) and (3).

use crate::error::{AlgebraError, Result};
use crate::form::{FormParameter, LambdaCoset};
use crate::linalg::{solve_elems, RMatrix};
use crate::module::{is_unimodular, ModElem, Module, ModuleMap};
use crate::ring::{Elem, Ring};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

/// Largest module handled by exhaustive searches.
pub const DEFAULT_MODULE_CAP: u128 = 4096;
/// Largest number of element pairs visited by exhaustive validation.
pub const DEFAULT_PAIR_CAP: u128 = 1 << 24;

#[derive(Clone)]
pub struct QuadraticModule {
    module: Arc<Module>,
    param: Arc<FormParameter>,
    gram: RMatrix,
    mu: Vec<LambdaCoset>,
}

impl fmt::Debug for QuadraticModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadraticModule({:?}, gram {:?}, mu {:?})", self.module, self.gram.data, self.mu)
    }
}

fn axiom_err(axiom: &str, location: String) -> AlgebraError {
    AlgebraError::QuadraticAxiom {
        axiom: axiom.into(),
        location,
    }
}

impl QuadraticModule {
    /// Builds and validates a quadratic module from generator data.
    pub fn new(module: Arc<Module>, gram: RMatrix, mu: Vec<Elem>, param: Arc<FormParameter>) -> Result<Self> {
        let ring = module.ring().clone();
        if **param.ring() != *ring {
            return Err(AlgebraError::Mismatch);
        }
        let n = module.ngens();
        if gram.rows != n || gram.cols != n || mu.len() != n {
            return Err(AlgebraError::Shape(format!(
                "gram {}x{} and {} mu values for {} generators",
                gram.rows,
                gram.cols,
                mu.len(),
                n
            )));
        }
        if gram.data.iter().chain(&mu).any(|e| e.index() >= ring.size()) {
            return Err(AlgebraError::Shape("entry is not a ring element".into()));
        }
        let mu = mu.iter().map(|&m| param.coset(m)).collect();
        let q = QuadraticModule {
            module,
            param,
            gram,
            mu,
        };
        q.check_generators()?;
        Ok(q)
    }

    fn check_generators(&self) -> Result<()> {
        let ring = self.ring();
        let eps = self.param.epsilon();
        let n = self.ngens();
        for i in 0..n {
            for j in 0..n {
                if self.gram.get(i, j) != ring.mul(eps, ring.conj(self.gram.get(j, i))) {
                    return Err(axiom_err("1", format!("generators ({i}, {j})")));
                }
            }
            let m = self.mu[i].rep();
            let delta = ring.sub(ring.sub(self.gram.get(i, i), m), ring.mul(eps, ring.conj(m)));
            for a in ring.elements() {
                for b in ring.elements() {
                    if !self.param.contains(ring.mul3(ring.conj(a), delta, b)) {
                        return Err(axiom_err("3", format!("diagonal of generator {i}")));
                    }
                }
            }
        }
        for (k, rho) in self.module.relations().iter().enumerate() {
            for j in 0..n {
                let mut g = vec![Elem::ZERO; n];
                g[j] = Elem::ONE;
                if self.lambda_coords(rho, &g) != Elem::ZERO {
                    return Err(axiom_err("relations", format!("lambda(relator {k}, generator {j})")));
                }
            }
            if !self.param.contains(self.mu_coords(rho)) {
                return Err(axiom_err("relations", format!("mu(relator {k})")));
            }
        }
        Ok(())
    }

    /// The hyperbolic module H^g with basis e_1, f_1, …, e_g, f_g.
    pub fn hyperbolic(param: Arc<FormParameter>, g: usize) -> Self {
        let ring = param.ring().clone();
        let mut gram = RMatrix::zeros(2 * g, 2 * g);
        for i in 0..g {
            gram.set(2 * i, 2 * i + 1, Elem::ONE);
            gram.set(2 * i + 1, 2 * i, param.epsilon());
        }
        let module = Arc::new(Module::free(ring, 2 * g));
        QuadraticModule::new(module, gram, vec![Elem::ZERO; 2 * g], param).expect("hyperbolic module")
    }

    pub fn zero(param: Arc<FormParameter>) -> Self {
        Self::hyperbolic(param, 0)
    }

    pub fn direct_sum(&self, other: &QuadraticModule) -> Result<Self> {
        if *self.param != *other.param {
            return Err(AlgebraError::Mismatch);
        }
        let module = Arc::new(self.module.direct_sum(&other.module)?);
        let (a, b) = (self.ngens(), other.ngens());
        let mut gram = RMatrix::zeros(a + b, a + b);
        for i in 0..a {
            for j in 0..a {
                gram.set(i, j, self.gram.get(i, j));
            }
        }
        for i in 0..b {
            for j in 0..b {
                gram.set(a + i, a + j, other.gram.get(i, j));
            }
        }
        let mu = self.mu.iter().chain(&other.mu).map(|c| c.rep()).collect();
        QuadraticModule::new(module, gram, mu, self.param.clone())
    }

    /// The submodule spanned by `gens` with the restricted form, and its
    /// inclusion.
    pub fn restrict(&self, gens: &[ModElem]) -> Result<(QuadraticModule, ModuleMap)> {
        let (sub, incl) = self.module.present_submodule(gens);
        let k = gens.len();
        let mut gram = RMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                gram.set(i, j, self.lambda(&gens[i], &gens[j]));
            }
        }
        let mu = gens.iter().map(|g| self.mu(g).rep()).collect();
        Ok((QuadraticModule::new(sub, gram, mu, self.param.clone())?, incl))
    }

    pub fn module(&self) -> &Arc<Module> {
        &self.module
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.module.ring()
    }

    pub fn param(&self) -> &Arc<FormParameter> {
        &self.param
    }

    pub fn gram(&self) -> &RMatrix {
        &self.gram
    }

    pub fn mu_gens(&self) -> &[LambdaCoset] {
        &self.mu
    }

    pub fn ngens(&self) -> usize {
        self.module.ngens()
    }

    pub fn size(&self) -> u128 {
        self.module.size()
    }

    pub fn lambda_coords(&self, x: &[Elem], y: &[Elem]) -> Elem {
        let ring = self.ring();
        let n = self.ngens();
        let mut acc = Elem::ZERO;
        for a in 0..n {
            if x[a] == Elem::ZERO {
                continue;
            }
            let row = ring.sum((0..n).map(|b| ring.mul(self.gram.get(a, b), y[b])));
            acc = ring.add(acc, ring.mul(ring.conj(x[a]), row));
        }
        acc
    }

    /// Representative in R of μ evaluated on a coordinate vector.
    pub fn mu_coords(&self, x: &[Elem]) -> Elem {
        let ring = self.ring();
        let n = self.ngens();
        let mut acc = Elem::ZERO;
        for a in 0..n {
            if x[a] == Elem::ZERO {
                continue;
            }
            let ca = ring.conj(x[a]);
            acc = ring.add(acc, ring.mul3(ca, self.mu[a].rep(), x[a]));
            for b in a + 1..n {
                acc = ring.add(acc, ring.mul3(ca, self.gram.get(a, b), x[b]));
            }
        }
        acc
    }

    pub fn lambda(&self, x: &ModElem, y: &ModElem) -> Elem {
        self.lambda_coords(&x.0, &y.0)
    }

    pub fn mu(&self, x: &ModElem) -> LambdaCoset {
        self.param.coset(self.mu_coords(&x.0))
    }

    /// (λ(x, g_b))_b, so that λ(x, y) = Σ_b row_b y_b.
    pub fn lambda_row(&self, x: &ModElem) -> Vec<Elem> {
        let ring = self.ring();
        let n = self.ngens();
        (0..n)
            .map(|b| ring.sum((0..n).map(|a| ring.mul(ring.conj(x.0[a]), self.gram.get(a, b)))))
            .collect()
    }

    fn row_eval(&self, row: &[Elem], y: &ModElem) -> Elem {
        let ring = self.ring();
        ring.sum(row.iter().zip(&y.0).map(|(&r, &c)| ring.mul(r, c)))
    }

    /// Exhaustive check of axioms (1)–(3) and of well-definedness on every
    /// element pair.
    pub fn validate_exhaustive(&self, pair_cap: u128) -> Result<()> {
        let size = self.size();
        if size.saturating_mul(size) > pair_cap {
            return Err(AlgebraError::CapExceeded(format!("{size} elements squared exceeds {pair_cap}")));
        }
        let ring = self.ring().clone();
        let eps = self.param.epsilon();
        let m = &self.module;
        let elems: Vec<ModElem> = m.elements().collect();
        let rows: Vec<Vec<Elem>> = elems.iter().map(|x| self.lambda_row(x)).collect();
        let mus: Vec<Elem> = elems.iter().map(|x| self.mu_coords(&x.0)).collect();
        let basis = ring.basis();
        let err = (0..elems.len()).into_par_iter().find_map_first(|i| {
            let x = &elems[i];
            for a in ring.elements() {
                let lhs = self.mu(&m.scale(x, a));
                let rhs = self.param.coset(ring.mul3(ring.conj(a), mus[i], a));
                if lhs != rhs {
                    return Some(axiom_err("2", format!("element {x:?}, scalar {a}")));
                }
            }
            for rho in m.relations() {
                for &b in &basis {
                    let raw: Vec<Elem> = x.0.iter().zip(rho).map(|(&c, &r)| ring.add(c, ring.mul(r, b))).collect();
                    if !self.param.contains(ring.sub(self.mu_coords(&raw), mus[i])) {
                        return Some(axiom_err("relations", format!("mu at {x:?}")));
                    }
                    for y in &elems {
                        if self.lambda_coords(&raw, &y.0) != self.row_eval(&rows[i], y) {
                            return Some(axiom_err("relations", format!("lambda at {x:?}")));
                        }
                    }
                }
            }
            for (j, y) in elems.iter().enumerate() {
                let lxy = self.row_eval(&rows[i], y);
                let lyx = self.row_eval(&rows[j], x);
                if lxy != ring.mul(eps, ring.conj(lyx)) {
                    return Some(axiom_err("1", format!("pair ({x:?}, {y:?})")));
                }
                let s = m.index_of(&m.add(x, y));
                let d = ring.sub(ring.sub(ring.sub(mus[s], mus[i]), mus[j]), lxy);
                if !self.param.contains(d) {
                    return Some(axiom_err("3", format!("pair ({x:?}, {y:?})")));
                }
            }
            None
        });
        match err {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Elements of ⟨gens⟩^⊥ = {m : λ(g, m) = 0 for all g}.
    pub fn orthogonal_elements(&self, gens: &[ModElem]) -> Vec<ModElem> {
        let rows: Vec<Vec<Elem>> = gens.iter().map(|g| self.lambda_row(g)).collect();
        self.module
            .elements()
            .filter(|x| rows.iter().all(|r| self.row_eval(r, x) == Elem::ZERO))
            .collect()
    }

    /// Whether `map: self → other` is bijective and preserves λ and μ.
    pub fn is_isometry(&self, other: &QuadraticModule, map: &ModuleMap) -> bool {
        if **map.domain() != *self.module || **map.codomain() != *other.module || *self.param != *other.param {
            return false;
        }
        let n = self.ngens();
        let imgs = map.images();
        map.is_bijective()
            && (0..n).all(|i| {
                other.mu(&imgs[i]) == self.mu[i]
                    && (0..n).all(|j| other.lambda(&imgs[i], &imgs[j]) == self.gram.get(i, j))
            })
    }
}

/// A bijective map of quadratic modules preserving λ and μ; an element of
/// U(M) when source and target agree.
#[derive(Clone, Debug)]
pub struct Isometry {
    map: ModuleMap,
}

pub type UnitaryMap = Isometry;

impl Isometry {
    pub fn new(src: &QuadraticModule, dst: &QuadraticModule, map: ModuleMap) -> Result<Self> {
        if !src.is_isometry(dst, &map) {
            return Err(AlgebraError::Precondition("map is not an isometry".into()));
        }
        Ok(Isometry { map })
    }

    pub fn identity(q: &QuadraticModule) -> Self {
        Isometry {
            map: ModuleMap::identity(q.module.clone()),
        }
    }

    pub fn map(&self) -> &ModuleMap {
        &self.map
    }

    pub fn apply(&self, x: &ModElem) -> ModElem {
        self.map.apply(x)
    }

    /// self ∘ first.
    pub fn compose_after(&self, first: &Isometry) -> Isometry {
        Isometry {
            map: self.map.compose_after(&first.map),
        }
    }

    pub fn inverse(&self) -> Isometry {
        Isometry {
            map: self.map.inverse().expect("isometries are bijective"),
        }
    }
}

/// Witnesses w_i with λ(w_i, v_j) = δ_ij, if they exist.
pub fn is_lambda_unimodular(q: &QuadraticModule, seq: &[ModElem]) -> Option<Vec<ModElem>> {
    let ring = q.ring();
    let n = q.ngens();
    let k = seq.len();
    let gv: Vec<Vec<Elem>> = seq.iter().map(|v| q.gram.mul_vec(ring, &v.0)).collect();
    let f = |w: &[Elem]| -> Vec<Elem> {
        gv.iter()
            .map(|col| ring.sum((0..n).map(|a| ring.mul(ring.conj(w[a]), col[a]))))
            .collect()
    };
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let mut target = vec![Elem::ZERO; k];
        target[i] = Elem::ONE;
        let sol = solve_elems(ring, n, f, &target)?;
        out.push(q.module.canon(&sol.particular));
    }
    Some(out)
}

pub fn lambda_unimodular(q: &QuadraticModule, seq: &[ModElem]) -> bool {
    is_lambda_unimodular(q, seq).is_some()
}

/// Whether x ↦ λ(−, x) is a bijection from the submodule to its
/// antilinear dual.
pub fn is_nonsingular(q: &QuadraticModule) -> bool {
    let m = q.module();
    let gens = m.gens();
    let rows: Vec<Vec<Elem>> = gens.iter().map(|g| q.lambda_row(g)).collect();
    let kernel = m
        .elements()
        .filter(|x| rows.iter().all(|r| q.row_eval(r, x) == Elem::ZERO))
        .count();
    kernel == 1 && m.dual_size() == m.size()
}

/// Checks that a unimodular sequence lying in a submodule N on which λ is
/// non-singular is λ-unimodular in N, constructing the witnesses as
/// w_i = w'_i·ε where λ(−, w'_i) = conj(φ_i(−)) on N.
pub fn nonsingular_promotion_check(
    q: &QuadraticModule,
    n_gens: &[ModElem],
    seq: &[ModElem],
) -> Result<Vec<ModElem>> {
    let m = q.module();
    let ring = q.ring();
    if seq.is_empty() {
        return Err(AlgebraError::Precondition("empty sequence".into()));
    }
    if is_unimodular(m, seq)?.is_none() {
        return Err(AlgebraError::Precondition("sequence is not unimodular".into()));
    }
    let (qn, incl) = q.restrict(n_gens)?;
    if !is_nonsingular(&qn) {
        return Err(AlgebraError::NotApplicable("lambda restricted to N is singular".into()));
    }
    let nm = qn.module().clone();
    let mut seq_n = Vec::with_capacity(seq.len());
    for v in seq {
        let c = m
            .express(n_gens, v)
            .ok_or_else(|| AlgebraError::Precondition(format!("{v:?} is not in N")))?;
        seq_n.push(nm.canon(&c));
    }
    let duals = is_unimodular(&nm, &seq_n)?
        .ok_or_else(|| AlgebraError::Internal("restricted sequence not unimodular".into()))?;
    let t = nm.ngens();
    let eps = q.param().epsilon();
    let mut out = Vec::with_capacity(seq.len());
    for phi in &duals {
        let target: Vec<Elem> = (0..t).map(|a| ring.conj(phi.0[a])).collect();
        let sol = solve_elems(
            ring,
            t,
            |c| {
                (0..t)
                    .map(|a| ring.sum((0..t).map(|b| ring.mul(qn.gram.get(a, b), c[b]))))
                    .collect()
            },
            &target,
        )
        .ok_or_else(|| AlgebraError::Internal("no dual element despite non-singularity".into()))?;
        let w_prime = nm.canon(&sol.particular);
        out.push(incl.apply(&nm.scale(&w_prime, eps)));
    }
    for (i, w) in out.iter().enumerate() {
        for (j, v) in seq.iter().enumerate() {
            let want = if i == j { Elem::ONE } else { Elem::ZERO };
            if q.lambda(w, v) != want {
                return Err(AlgebraError::Internal("promoted witnesses fail".into()));
            }
        }
    }
    Ok(out)
}

/// μ vanishes on every element and λ on every pair, including the diagonal.
pub fn is_isotropic(q: &QuadraticModule, elems: &[ModElem]) -> bool {
    let zero = q.param().zero();
    elems.iter().all(|x| q.mu(x) == zero)
        && elems
            .iter()
            .all(|x| elems.iter().all(|y| q.lambda(x, y) == Elem::ZERO))
}

/// Whether M = ⟨v⟩ ⊕ ⟨w⟩^⊥ as R-modules, by counting and intersection.
pub fn check_summand_decomposition(q: &QuadraticModule, v: &[ModElem], w: &[ModElem]) -> bool {
    let m = q.module();
    let perp = q.orthogonal_elements(w);
    let span_v = m.span_size(v);
    let meet = perp.iter().filter(|x| m.in_span(v, x)).count();
    meet == 1 && span_v * perp.len() as u128 == m.size()
}

/// τ(e, u, x)(v) = v + u λ(e,v) − e ε̄ λ(u,v) − e ε̄ x λ(e,v).
pub fn transvection_apply(q: &QuadraticModule, e: &ModElem, u: &ModElem, x: Elem, v: &ModElem) -> ModElem {
    let ring = q.ring();
    let eb = q.param().epsilon_bar();
    let le = q.lambda(e, v);
    let lu = q.lambda(u, v);
    let ce = ring.neg(ring.add(ring.mul(eb, lu), ring.mul3(eb, x, le)));
    q.module()
        .combine(&[v.clone(), u.clone(), e.clone()], &[Elem::ONE, le, ce])
}

/// Checks the data (e, u, x) of a transvection.
pub fn transvection_data_ok(q: &QuadraticModule, e: &ModElem, u: &ModElem, x: Elem) -> bool {
    q.mu(e) == q.param().zero()
        && q.lambda(e, e) == Elem::ZERO
        && q.lambda(e, u) == Elem::ZERO
        && q.param().coset(x) == q.mu(u)
}

pub fn transvection(q: &QuadraticModule, e: &ModElem, u: &ModElem, x: Elem) -> Result<UnitaryMap> {
    if !transvection_data_ok(q, e, u, x) {
        return Err(AlgebraError::Precondition(
            "transvection needs mu(e) = 0, lambda(e,e) = lambda(e,u) = 0 and x in mu(u)".into(),
        ));
    }
    let images = q.module().gens().iter().map(|g| transvection_apply(q, e, u, x, g)).collect();
    let map = ModuleMap::new(q.module().clone(), q.module().clone(), images)?;
    Isometry::new(q, q, map).map_err(|_| AlgebraError::Internal("transvection is not unitary".into()))
}

/// Whether the transvection is orthogonal, i.e. e is λ-unimodular.
pub fn is_orthogonal_transvection(q: &QuadraticModule, e: &ModElem) -> bool {
    lambda_unimodular(q, std::slice::from_ref(e))
}

pub fn is_hyperbolic_pair(q: &QuadraticModule, x: &ModElem, y: &ModElem) -> bool {
    let zero = q.param().zero();
    q.mu(x) == zero
        && q.mu(y) == zero
        && q.lambda(x, x) == Elem::ZERO
        && q.lambda(y, y) == Elem::ZERO
        && q.lambda(x, y) == Elem::ONE
}

/// The projection onto ⟨x, y⟩^⊥ along ⟨x, y⟩ for a hyperbolic pair:
/// m ↦ m − x ε̄ λ(y, m) − y λ(x, m).
pub fn project_off_pair(q: &QuadraticModule, x: &ModElem, y: &ModElem, m: &ModElem) -> ModElem {
    let ring = q.ring();
    let eb = q.param().epsilon_bar();
    let a = ring.neg(ring.mul(eb, q.lambda(y, m)));
    let b = ring.neg(q.lambda(x, m));
    q.module().combine(&[m.clone(), x.clone(), y.clone()], &[Elem::ONE, a, b])
}

struct WittSearch<'a> {
    q: &'a QuadraticModule,
    elems: Vec<ModElem>,
    rows: Vec<Vec<Elem>>,
    isotropic: Vec<bool>,
    memo: HashMap<Vec<usize>, Vec<(usize, usize)>>,
}

impl WittSearch<'_> {
    fn lam(&self, i: usize, j: usize) -> Elem {
        self.q.row_eval(&self.rows[i], &self.elems[j])
    }

    fn upper_bound(&self, w: &[usize], gens: &[usize]) -> usize {
        let rad = w
            .iter()
            .filter(|&&x| gens.iter().all(|&g| self.lam(g, x) == Elem::ZERO))
            .count();
        let ratio = w.len() / rad.max(1);
        let r2 = self.q.ring().size() * self.q.ring().size();
        let mut k = 0;
        let mut p = r2;
        while p <= ratio {
            k += 1;
            p = p.saturating_mul(r2);
        }
        k
    }

    fn best(&mut self, w: Vec<usize>, gens: Vec<usize>) -> Vec<(usize, usize)> {
        if let Some(r) = self.memo.get(&w) {
            return r.clone();
        }
        let ub = self.upper_bound(&w, &gens);
        let mut result: Vec<(usize, usize)> = Vec::new();
        if ub > 0 {
            'outer: for &x in &w {
                if !self.isotropic[x] || x == 0 {
                    continue;
                }
                for &y in &w {
                    if !self.isotropic[y] || self.lam(x, y) != Elem::ONE {
                        continue;
                    }
                    let sub: Vec<usize> = w
                        .iter()
                        .copied()
                        .filter(|&z| self.lam(x, z) == Elem::ZERO && self.lam(y, z) == Elem::ZERO)
                        .collect();
                    let m = self.q.module();
                    let sub_gens: Vec<usize> = gens
                        .iter()
                        .map(|&g| {
                            let p = project_off_pair(self.q, &self.elems[x], &self.elems[y], &self.elems[g]);
                            m.index_of(&p)
                        })
                        .collect();
                    let rest = self.best(sub, sub_gens);
                    if rest.len() + 1 > result.len() {
                        result = std::iter::once((x, y)).chain(rest).collect();
                        if result.len() >= ub {
                            break 'outer;
                        }
                    }
                }
            }
        }
        self.memo.insert(w, result.clone());
        result
    }
}

/// A largest family of mutually orthogonal hyperbolic pairs, found by
/// exhaustive search over pairs and their orthogonal complements.
pub fn max_hyperbolic_family(q: &QuadraticModule) -> Result<Vec<(ModElem, ModElem)>> {
    if q.size() > DEFAULT_MODULE_CAP {
        return Err(AlgebraError::CapExceeded(format!("module has {} elements", q.size())));
    }
    let m = q.module();
    let elems: Vec<ModElem> = m.elements().collect();
    let rows = elems.iter().map(|x| q.lambda_row(x)).collect();
    let zero = q.param().zero();
    let isotropic = elems
        .iter()
        .map(|x| q.mu(x) == zero && q.lambda(x, x) == Elem::ZERO)
        .collect();
    let gens: Vec<usize> = m.gens().iter().map(|g| m.index_of(g)).collect();
    let mut search = WittSearch {
        q,
        elems,
        rows,
        isotropic,
        memo: HashMap::new(),
    };
    let all: Vec<usize> = (0..search.elems.len()).collect();
    let fam = search.best(all, gens);
    Ok(fam
        .into_iter()
        .map(|(x, y)| (search.elems[x].clone(), search.elems[y].clone()))
        .collect())
}

/// The Witt index g(M).
pub fn witt_index(q: &QuadraticModule) -> Result<usize> {
    Ok(max_hyperbolic_family(q)?.len())
}

/// An explicit decomposition M ≅ P ⊕ H^g with g = g(M).
#[derive(Clone, Debug)]
pub struct WittDecomposition {
    pub pairs: Vec<(ModElem, ModElem)>,
    pub complement: QuadraticModule,
    /// P ⊕ H^g, with the P generators first.
    pub standard: QuadraticModule,
    /// standard → M.
    pub iso: Isometry,
}

impl WittDecomposition {
    pub fn g(&self) -> usize {
        self.pairs.len()
    }
}

/// Decomposes along a given orthogonal hyperbolic family.
pub fn decompose_along(q: &QuadraticModule, pairs: &[(ModElem, ModElem)]) -> Result<WittDecomposition> {
    let m = q.module();
    let projected: Vec<ModElem> = m
        .gens()
        .iter()
        .map(|g| {
            pairs
                .iter()
                .fold(g.clone(), |acc, (x, y)| project_off_pair(q, x, y, &acc))
        })
        .collect();
    let (pm, incl) = m.present_submodule(&projected);
    let (mp, iota) = pm.minimal_presentation();
    let p_gens: Vec<ModElem> = iota.images().iter().map(|x| incl.apply(x)).collect();
    drop(mp);
    let (complement, p_incl) = q.restrict(&p_gens)?;
    let standard = complement.direct_sum(&QuadraticModule::hyperbolic(q.param().clone(), pairs.len()))?;
    let mut images: Vec<ModElem> = p_incl.images().to_vec();
    for (x, y) in pairs {
        images.push(x.clone());
        images.push(y.clone());
    }
    let map = ModuleMap::new(standard.module().clone(), m.clone(), images)?;
    let iso = Isometry::new(&standard, q, map)
        .map_err(|_| AlgebraError::Internal("Witt decomposition is not an isometry".into()))?;
    Ok(WittDecomposition {
        pairs: pairs.to_vec(),
        complement,
        standard,
        iso,
    })
}

pub fn witt_decomposition(q: &QuadraticModule) -> Result<WittDecomposition> {
    let pairs = max_hyperbolic_family(q)?;
    decompose_along(q, &pairs)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StableWittReport {
    /// g(M ⊕ H^k) for k = 0..=k_max.
    pub witt_by_k: Vec<usize>,
    pub stable_witt_index: usize,
    pub usr: Option<usize>,
    /// Whether ḡ ≥ usr, so that g(M) ≥ ḡ is predicted.
    pub lemma_applies: bool,
    pub lemma_holds: bool,
}

/// ḡ(M) estimated as max over k ≤ k_max of g(M ⊕ H^k) − k.
pub fn stable_witt_index(q: &QuadraticModule, k_max: usize, usr: Option<usize>) -> Result<StableWittReport> {
    let mut witt_by_k = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let s = q.direct_sum(&QuadraticModule::hyperbolic(q.param().clone(), k))?;
        witt_by_k.push(witt_index(&s)?);
    }
    let gbar = witt_by_k.iter().enumerate().map(|(k, &g)| g - k.min(g)).max().unwrap_or(0);
    let lemma_applies = usr.is_some_and(|u| gbar >= u);
    Ok(StableWittReport {
        lemma_holds: !lemma_applies || witt_by_k[0] >= gbar,
        witt_by_k,
        stable_witt_index: gbar,
        usr,
        lemma_applies,
    })
}

fn isometry_search(
    src: &QuadraticModule,
    dst: &QuadraticModule,
    cap: usize,
    first_only: bool,
) -> Result<Vec<Isometry>> {
    for q in [src, dst] {
        if q.size() > DEFAULT_MODULE_CAP {
            return Err(AlgebraError::CapExceeded(format!("module has {} elements", q.size())));
        }
    }
    if *src.param() != *dst.param() {
        return Err(AlgebraError::Mismatch);
    }
    if src.size() != dst.size() {
        return Ok(vec![]);
    }
    let (mp, iota) = src.module().minimal_presentation();
    let back = iota.inverse().ok_or_else(|| AlgebraError::Internal("presentation".into()))?;
    let s: Vec<ModElem> = iota.images().to_vec();
    let t = s.len();
    let n = dst.module();
    let dst_elems: Vec<ModElem> = n.elements().collect();
    let candidates: Vec<Vec<ModElem>> = s
        .iter()
        .map(|si| {
            let ann = src.module().annihilator(si);
            let mu = src.mu(si);
            let l = src.lambda(si, si);
            dst_elems
                .iter()
                .filter(|x| dst.mu(x) == mu && dst.lambda(x, x) == l && n.annihilator(x) == ann)
                .cloned()
                .collect()
        })
        .collect();
    let lam_s: Vec<Vec<Elem>> = s.iter().map(|a| s.iter().map(|b| src.lambda(a, b)).collect()).collect();
    let span_sizes: Vec<u128> = (1..=t).map(|i| mp.span_size(&mp.gens()[..i])).collect();
    let ctx = SearchCtx {
        mp: &mp,
        dst,
        candidates: &candidates,
        lam_s: &lam_s,
        span_sizes: &span_sizes,
        cap,
        first_only,
        found: AtomicUsize::new(0),
    };
    let finish = |chosen: Vec<ModElem>| -> Result<Isometry> {
        let f = ModuleMap::new(mp.clone(), n.clone(), chosen)?;
        let map = f.compose_after(&back);
        Isometry::new(src, dst, map).map_err(|_| AlgebraError::Internal("isometry search".into()))
    };
    if t == 0 {
        return Ok(vec![finish(vec![])?]);
    }
    let branches: Vec<Vec<Vec<ModElem>>> = candidates[0]
        .par_iter()
        .map(|c| {
            let mut out = Vec::new();
            if ctx.first_only && ctx.found.load(Ordering::Relaxed) > 0 {
                return out;
            }
            let mut chosen = vec![c.clone()];
            if ctx.accept(&chosen) {
                ctx.dfs(&mut chosen, &mut out);
            }
            out
        })
        .collect();
    if ctx.found.load(Ordering::Relaxed) > cap {
        return Err(AlgebraError::CapExceeded(format!("more than {cap} isometries")));
    }
    let mut result = Vec::new();
    for chosen in branches.into_iter().flatten() {
        result.push(finish(chosen)?);
        if first_only {
            break;
        }
    }
    Ok(result)
}

struct SearchCtx<'a> {
    mp: &'a Arc<Module>,
    dst: &'a QuadraticModule,
    candidates: &'a [Vec<ModElem>],
    lam_s: &'a [Vec<Elem>],
    span_sizes: &'a [u128],
    cap: usize,
    first_only: bool,
    found: AtomicUsize,
}

impl SearchCtx<'_> {
    fn accept(&self, chosen: &[ModElem]) -> bool {
        let i = chosen.len() - 1;
        let n = self.dst.module();
        let c = &chosen[i];
        (0..i).all(|j| self.dst.lambda(c, &chosen[j]) == self.lam_s[i][j])
            && self.mp.relations().iter().all(|rho| {
                let last = rho.iter().rposition(|&e| e != Elem::ZERO);
                last != Some(i) || n.is_zero(&n.combine(chosen, &rho[..=i]))
            })
            && n.span_size(chosen) == self.span_sizes[i]
    }

    fn dfs(&self, chosen: &mut Vec<ModElem>, out: &mut Vec<Vec<ModElem>>) {
        let found = self.found.load(Ordering::Relaxed);
        if found > self.cap || (self.first_only && found > 0) {
            return;
        }
        let i = chosen.len();
        if i == self.candidates.len() {
            if self.dst.module().span_size(chosen) == self.dst.size() {
                self.found.fetch_add(1, Ordering::Relaxed);
                out.push(chosen.clone());
            }
            return;
        }
        for c in &self.candidates[i] {
            chosen.push(c.clone());
            if self.accept(chosen) {
                self.dfs(chosen, out);
            }
            chosen.pop();
        }
    }
}

/// All elements of U(M), up to `cap` of them.
pub fn unitary_group(q: &QuadraticModule, cap: usize) -> Result<Vec<UnitaryMap>> {
    isometry_search(q, q, cap, false)
}

/// An isometry Q1 → Q2, or None after exhaustive search.
pub fn is_quad_isomorphic(q1: &QuadraticModule, q2: &QuadraticModule) -> Result<Option<Isometry>> {
    Ok(isometry_search(q1, q2, usize::MAX - 1, true)?.into_iter().next())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::make_form_parameter;
    use crate::ring::{make_ring, Involution, RingSpec};

    fn gf2_param(gens: &[Elem]) -> Arc<FormParameter> {
        let r = Arc::new(make_ring(&RingSpec::Gf { q: 2, involution: Involution::Identity }).unwrap());
        Arc::new(make_form_parameter(r, Elem::ONE, gens).unwrap())
    }

    #[test]
    fn hyperbolic_values() {
        let p = gf2_param(&[]);
        let h = QuadraticModule::hyperbolic(p.clone(), 1);
        let e = h.module().gen(0);
        let f = h.module().gen(1);
        assert_eq!(h.lambda(&e, &f), Elem::ONE);
        assert_eq!(h.lambda(&f, &e), p.epsilon());
        let ef = h.module().add(&e, &f);
        assert_eq!(h.mu(&ef), p.coset(Elem::ONE));
        h.validate_exhaustive(DEFAULT_PAIR_CAP).unwrap();
    }

    #[test]
    fn rejects_asymmetric_gram() {
        let r = Arc::new(make_ring(&RingSpec::Zmod { n: 4 }).unwrap());
        let p = Arc::new(make_form_parameter(r.clone(), Elem::ONE, &[]).unwrap());
        let m = Arc::new(Module::free(r, 2));
        let gram = RMatrix::from_rows(&[vec![Elem(0), Elem(1)], vec![Elem(2), Elem(0)]]);
        let err = QuadraticModule::new(m, gram, vec![Elem(0), Elem(0)], p).unwrap_err();
        assert!(matches!(err, AlgebraError::QuadraticAxiom { ref axiom, .. } if axiom == "1"));
    }

    #[test]
    fn transvection_example_gf2() {
        let p = gf2_param(&[]);
        let h2 = QuadraticModule::hyperbolic(p, 2);
        let m = h2.module();
        let (e1, f1, e2, f2) = (m.gen(0), m.gen(1), m.gen(2), m.gen(3));
        let t = transvection(&h2, &e1, &e2, Elem::ZERO).unwrap();
        assert_eq!(t.apply(&f1), m.add(&f1, &e2));
        assert_eq!(t.apply(&f2), m.add(&f2, &e1));
        assert_eq!(t.apply(&e1), e1);
        assert_eq!(t.apply(&e2), e2);
    }

    #[test]
    fn witt_of_hyperbolic() {
        let p = gf2_param(&[]);
        for g in 0..=3 {
            let h = QuadraticModule::hyperbolic(p.clone(), g);
            assert_eq!(witt_index(&h).unwrap(), g);
        }
    }
}
