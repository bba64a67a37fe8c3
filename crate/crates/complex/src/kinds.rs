//! The sequence posets attached to modules and quadratic modules.
//!
//! Points are element indices in the module's enumeration order (pairs of
//! indices for ℋ𝒰 and ℳ𝒰). Index 0 is always the zero element.

use crate::error::{ComplexError, Result};
use crate::poset::{Point, PosetKind, Predicate, SequencePoset};
use rayon::prelude::*;
use std::sync::Arc;
use wittlab_core::module::unimodular;
use wittlab_core::quad::QuadraticModule;
use wittlab_core::{Elem, ModElem, Module, RMatrix};

/// Largest module whose elements are listed eagerly.
pub const ELEMENT_CAP: u128 = 1 << 16;
/// Largest module for which the full λ table is precomputed.
pub const LAMBDA_TABLE_CAP: usize = 4096;

/// A module with its elements listed.
#[derive(Debug)]
pub struct ModuleSpace {
    module: Arc<Module>,
    elems: Vec<ModElem>,
}

impl ModuleSpace {
    pub fn new(module: Arc<Module>) -> Result<Self> {
        if module.size() > ELEMENT_CAP {
            return Err(ComplexError::CapExceeded(format!(
                "module with {} elements above {ELEMENT_CAP}",
                module.size()
            )));
        }
        let elems = module.elements().collect();
        Ok(ModuleSpace { module, elems })
    }

    pub fn module(&self) -> &Arc<Module> {
        &self.module
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elem(&self, i: u32) -> &ModElem {
        &self.elems[i as usize]
    }

    pub fn index(&self, x: &ModElem) -> u32 {
        self.module.index_of(&self.module.canon(&x.0)) as u32
    }

    pub fn all_points(&self) -> Vec<Point> {
        (0..self.elems.len() as u32).map(|i| vec![i]).collect()
    }
}

/// 𝒰 over `space`, on the points of `universe` (all elements when None).
pub fn unimodular_poset(space: &Arc<ModuleSpace>, universe: Option<Vec<Point>>) -> Result<SequencePoset> {
    let sp = space.clone();
    let pred: Predicate = Arc::new(move |seq: &[Point]| {
        let v: Vec<ModElem> = seq.iter().map(|p| sp.elem(p[0]).clone()).collect();
        unimodular(sp.module(), &v)
    });
    SequencePoset::new(
        PosetKind::Unimodular,
        "U",
        universe.unwrap_or_else(|| space.all_points()),
        pred,
    )
}

/// A quadratic module with element list, μ-vanishing flags and λ values.
#[derive(Debug)]
pub struct QuadSpace {
    q: QuadraticModule,
    elems: Vec<ModElem>,
    singular: Vec<bool>,
    mu_zero: Vec<bool>,
    gens: Vec<u32>,
    table: Option<Vec<Elem>>,
}

impl QuadSpace {
    pub fn new(q: QuadraticModule) -> Result<Self> {
        if q.size() > ELEMENT_CAP {
            return Err(ComplexError::CapExceeded(format!(
                "quadratic module with {} elements above {ELEMENT_CAP}",
                q.size()
            )));
        }
        let m = q.module().clone();
        let elems: Vec<ModElem> = m.elements().collect();
        let zero = q.param().zero();
        let mu_zero: Vec<bool> = elems.par_iter().map(|x| q.mu(x) == zero).collect();
        let singular = elems
            .par_iter()
            .zip(&mu_zero)
            .map(|(x, &z)| z && q.lambda(x, x) == Elem::ZERO)
            .collect();
        let gens = m.gens().iter().map(|g| m.index_of(g) as u32).collect();
        let n = elems.len();
        let table = (n <= LAMBDA_TABLE_CAP).then(|| {
            (0..n * n)
                .into_par_iter()
                .map(|t| q.lambda(&elems[t / n], &elems[t % n]))
                .collect()
        });
        Ok(QuadSpace {
            q,
            elems,
            singular,
            mu_zero,
            gens,
            table,
        })
    }

    pub fn quad(&self) -> &QuadraticModule {
        &self.q
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elem(&self, i: u32) -> &ModElem {
        &self.elems[i as usize]
    }

    pub fn index(&self, x: &ModElem) -> u32 {
        let m = self.q.module();
        m.index_of(&m.canon(&x.0)) as u32
    }

    pub fn lambda(&self, i: u32, j: u32) -> Elem {
        match &self.table {
            Some(t) => t[i as usize * self.elems.len() + j as usize],
            None => self.q.lambda(&self.elems[i as usize], &self.elems[j as usize]),
        }
    }

    pub fn mu_zero(&self, i: u32) -> bool {
        self.mu_zero[i as usize]
    }

    /// μ(x) = 0 and λ(x, x) = 0.
    pub fn singular(&self, i: u32) -> bool {
        self.singular[i as usize]
    }

    /// Indices of the nonzero singular elements.
    pub fn singular_elements(&self) -> Vec<u32> {
        (1..self.elems.len() as u32).filter(|&i| self.singular(i)).collect()
    }

    /// The span of the elements is isotropic.
    pub fn isotropic(&self, seq: &[u32]) -> bool {
        seq.iter().all(|&x| self.mu_zero(x))
            && seq
                .iter()
                .enumerate()
                .all(|(a, &x)| seq[a..].iter().all(|&y| self.lambda(x, y) == Elem::ZERO))
    }

    /// Witnesses w_i with λ(w_i, v_j) = δ_ij exist: the matrix
    /// (λ(g_a, v_j)) over the generators g_a has a left inverse.
    pub fn lambda_unimodular(&self, seq: &[u32]) -> bool {
        if seq.is_empty() {
            return false;
        }
        let rows: Vec<Vec<Elem>> = self
            .gens
            .iter()
            .map(|&g| seq.iter().map(|&v| self.lambda(g, v)).collect())
            .collect();
        if rows.is_empty() {
            return false;
        }
        RMatrix::from_rows(&rows).is_left_invertible(self.q.ring())
    }

    /// As [`Self::lambda_unimodular`], first trying the candidates `hints`:
    /// if (λ(h_i, v_j)) is diagonal with unit diagonal, rescaled hints are
    /// witnesses.
    pub fn lambda_unimodular_hint(&self, seq: &[u32], hints: &[u32]) -> bool {
        let ring = self.q.ring();
        if hints.len() == seq.len()
            && hints.iter().enumerate().all(|(i, &h)| {
                seq.iter().enumerate().all(|(j, &v)| {
                    let l = self.lambda(h, v);
                    if i == j {
                        ring.is_unit(l)
                    } else {
                        l == Elem::ZERO
                    }
                })
            })
        {
            return true;
        }
        self.lambda_unimodular(seq)
    }

    fn iu_member(&self, xs: &[u32]) -> bool {
        self.isotropic(xs) && self.lambda_unimodular(xs)
    }

    fn dual_pairs(&self, xs: &[u32], ys: &[u32]) -> bool {
        xs.iter().enumerate().all(|(i, &x)| {
            ys.iter()
                .enumerate()
                .all(|(j, &y)| self.lambda(x, y) == if i == j { Elem::ONE } else { Elem::ZERO })
        })
    }

    fn hu_member(&self, xs: &[u32], ys: &[u32]) -> bool {
        self.isotropic(xs)
            && self.isotropic(ys)
            && self.dual_pairs(xs, ys)
            && self.lambda_unimodular_hint(xs, ys)
            && self.lambda_unimodular_hint(ys, xs)
    }

    fn mu_member(&self, xs: &[u32], ys: &[u32]) -> bool {
        if !(self.isotropic(xs) && self.isotropic(ys)) {
            return false;
        }
        for (i, &y) in ys.iter().enumerate() {
            if y != 0 && !xs.iter().enumerate().all(|(j, &x)| self.lambda(x, y) == if i == j { Elem::ONE } else { Elem::ZERO }) {
                return false;
            }
        }
        self.lambda_unimodular(xs)
    }

    /// Pairs (x, y) of nonzero singular elements with λ(x, y) = 1.
    pub fn hyperbolic_pairs(&self) -> Vec<Point> {
        self.hyperbolic_pairs_within(&|_| true)
    }

    /// As [`Self::hyperbolic_pairs`] with both entries passing `keep`.
    pub fn hyperbolic_pairs_within(&self, keep: &(dyn Fn(u32) -> bool + Sync)) -> Vec<Point> {
        let s: Vec<u32> = self.singular_elements().into_iter().filter(|&x| keep(x)).collect();
        s.par_iter()
            .flat_map_iter(|&x| {
                let s = &s;
                s.iter().filter(move |&&y| self.lambda(x, y) == Elem::ONE).map(move |&y| vec![x, y])
            })
            .collect()
    }
}

fn firsts(seq: &[Point]) -> Vec<u32> {
    seq.iter().map(|p| p[0]).collect()
}

fn seconds(seq: &[Point]) -> Vec<u32> {
    seq.iter().map(|p| p[1]).collect()
}

fn singles(v: Vec<u32>) -> Vec<Point> {
    v.into_iter().map(|i| vec![i]).collect()
}

/// 𝒰(M, λ) on the given points (all elements when None).
pub fn lambda_unimodular_poset(space: &Arc<QuadSpace>, universe: Option<Vec<Point>>) -> Result<SequencePoset> {
    let sp = space.clone();
    let pred: Predicate = Arc::new(move |seq: &[Point]| sp.lambda_unimodular(&firsts(seq)));
    let universe = universe.unwrap_or_else(|| singles((0..space.len() as u32).collect()));
    SequencePoset::new(PosetKind::LambdaUnimodular, "U_lambda", universe, pred)
}

/// 𝒰(M, λ, μ) = 𝒪(ℐ(M, μ)) ∩ 𝒰(M, λ).
pub fn lambda_mu_unimodular_poset(space: &Arc<QuadSpace>, universe: Option<Vec<Point>>) -> Result<SequencePoset> {
    let sp = space.clone();
    let pred: Predicate = Arc::new(move |seq: &[Point]| {
        let xs = firsts(seq);
        xs.iter().all(|&x| sp.mu_zero(x)) && sp.lambda_unimodular(&xs)
    });
    let universe = universe.unwrap_or_else(|| {
        singles((0..space.len() as u32).filter(|&i| space.mu_zero(i)).collect())
    });
    SequencePoset::new(PosetKind::LambdaMuUnimodular, "U_lambda_mu", universe, pred)
}

/// ℐ𝒰(M): λ-unimodular sequences spanning an isotropic summand. A
/// λ-unimodular sequence is unimodular, so its span is a free summand.
pub fn isotropic_poset(space: &Arc<QuadSpace>) -> Result<SequencePoset> {
    isotropic_poset_within(space, &|_| true)
}

/// ℐ𝒰(M) on the singular elements passing `keep`. Every poset built from
/// it by links and intersections agrees with the one built from ℐ𝒰(M) as
/// long as their members only use such elements.
pub fn isotropic_poset_within(space: &Arc<QuadSpace>, keep: &(dyn Fn(u32) -> bool + Sync)) -> Result<SequencePoset> {
    let sp = space.clone();
    let pred: Predicate = Arc::new(move |seq: &[Point]| sp.iu_member(&firsts(seq)));
    SequencePoset::new(
        PosetKind::IsotropicUnimodular,
        "IU",
        singles(space.singular_elements().into_iter().filter(|&x| keep(x)).collect()),
        pred,
    )
}

/// ℋ𝒰(M) on pairs (x, y).
pub fn hyperbolic_poset(space: &Arc<QuadSpace>) -> Result<SequencePoset> {
    hyperbolic_poset_within(space, &|_| true)
}

/// ℋ𝒰(M) on pairs with both entries passing `keep`.
pub fn hyperbolic_poset_within(space: &Arc<QuadSpace>, keep: &(dyn Fn(u32) -> bool + Sync)) -> Result<SequencePoset> {
    let sp = space.clone();
    let pred: Predicate = Arc::new(move |seq: &[Point]| sp.hu_member(&firsts(seq), &seconds(seq)));
    SequencePoset::with_arity(
        PosetKind::HyperbolicUnimodular,
        "HU",
        2,
        space.hyperbolic_pairs_within(keep),
        pred,
    )
}

/// ℳ𝒰(M) on pairs (x, y) with y = 0 allowed.
pub fn mixed_poset(space: &Arc<QuadSpace>) -> Result<SequencePoset> {
    mixed_poset_within(space, &|_| true)
}

/// ℳ𝒰(M) on pairs with both entries passing `keep` or zero.
pub fn mixed_poset_within(space: &Arc<QuadSpace>, keep: &(dyn Fn(u32) -> bool + Sync)) -> Result<SequencePoset> {
    let sp = space.clone();
    let pred: Predicate = Arc::new(move |seq: &[Point]| sp.mu_member(&firsts(seq), &seconds(seq)));
    let mut universe: Vec<Point> = space
        .singular_elements()
        .into_iter()
        .filter(|&x| keep(x))
        .map(|x| vec![x, 0])
        .collect();
    universe.extend(space.hyperbolic_pairs_within(keep));
    SequencePoset::with_arity(PosetKind::MixedUnimodular, "MU", 2, universe, pred)
}
