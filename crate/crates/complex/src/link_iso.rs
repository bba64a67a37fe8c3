//! Explicit poset isomorphisms between links in ℐ𝒰, ℳ𝒰, ℋ𝒰 and the
//! corresponding posets of Y = V^⊥ ∩ W^⊥.
//!
//! For x = ((v_1, w_1), …, (v_k, w_k)) ∈ ℋ𝒰(M), every u ∈ V^⊥ splits
//! uniquely as u = y + x' with y ∈ Y and x' ∈ V. The maps are
//!
//! 1. ℐ𝒰(M)_v → ℐ𝒰(Y)⟨V⟩, u ↦ (y, x'),
//! 2. ℋ𝒰(M) ∩ ℳ𝒰(M)_{((v_i, 0))} → ℋ𝒰(Y)⟨V × V⟩, (u, u') ↦ ((y, y'), (x', x'')),
//! 3. ℋ𝒰(M)_x → ℋ𝒰(Y), (u, u') ↦ (u, u').
//!
//! A vertex map that is injective, sends members to members and whose
//! inverse sends members back, with equal member counts per length, is an
//! isomorphism of the refinement orders in both directions.

use crate::error::{ComplexError, Result};
use crate::kinds::{hyperbolic_poset_within, isotropic_poset_within, mixed_poset_within, QuadSpace};
use crate::poset::{Levels, Point, SequencePoset};
use crate::theorem::RangeContext;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::sync::Arc;
use wittlab_core::quad::{witt_index, QuadraticModule};
use wittlab_core::{Elem, ModElem, ModuleMap};

pub const DEFAULT_LINK_CAP: usize = 100_000;

#[derive(Clone, Debug)]
pub struct LinkIsoInstance {
    pub label: String,
    pub q: QuadraticModule,
    /// Coordinates of the pairs (v_i, w_i).
    pub pairs: Vec<(Vec<Elem>, Vec<Elem>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkIsoOptions {
    /// Largest total member count on either side.
    pub cap: usize,
    pub enforce_hypothesis: bool,
}

impl Default for LinkIsoOptions {
    fn default() -> Self {
        LinkIsoOptions {
            cap: DEFAULT_LINK_CAP,
            enforce_hypothesis: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkIsoPart {
    pub part: u8,
    pub lhs_counts: Vec<usize>,
    pub rhs_counts: Vec<usize>,
    pub vertex_map_injective: bool,
    pub forward: bool,
    pub backward: bool,
    pub isomorphic: bool,
    /// Set when a side exceeds the cap; the part is then not checked.
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkIsoReport {
    pub label: String,
    pub k: usize,
    pub witt_index: usize,
    pub usr: usize,
    pub y_size: usize,
    pub v_size: usize,
    pub parts: Vec<LinkIsoPart>,
    /// Every part that ran is an isomorphism.
    pub ok: bool,
}

struct Split {
    m: Arc<QuadSpace>,
    y: Arc<QuadSpace>,
    /// M index → Y index, for the elements of Y.
    to_y: HashMap<u32, u32>,
    /// Y index → M index.
    from_y: Vec<u32>,
    /// Elements of V, as M indices.
    v: Vec<u32>,
}

impl Split {
    fn add(&self, a: u32, b: u32) -> u32 {
        let md = self.m.quad().module();
        self.m.index(&md.add(self.m.elem(a), self.m.elem(b)))
    }

    fn sub(&self, a: u32, b: u32) -> u32 {
        let md = self.m.quad().module();
        self.m.index(&md.sub(self.m.elem(a), self.m.elem(b)))
    }

    /// u = y + x with y ∈ Y, x ∈ V; None unless exactly one split exists.
    fn split(&self, u: u32) -> Option<(u32, u32)> {
        let mut found = None;
        for &x in &self.v {
            if let Some(&y) = self.to_y.get(&self.sub(u, x)) {
                if found.is_some() {
                    return None;
                }
                found = Some((y, x));
            }
        }
        found
    }
}

fn build_split(q: &QuadraticModule, m: &Arc<QuadSpace>, vs: &[u32], ws: &[u32]) -> Result<Split> {
    let md = q.module();
    let ring = q.ring();
    let y_elems: Vec<u32> = (0..m.len() as u32)
        .filter(|&x| vs.iter().chain(ws).all(|&a| m.lambda(a, x) == Elem::ZERO && m.lambda(x, a) == Elem::ZERO))
        .collect();
    let mut gens: Vec<ModElem> = Vec::new();
    let mut span = 1u128;
    for &x in &y_elems {
        let mut t = gens.clone();
        t.push(m.elem(x).clone());
        let s = md.span_size(&t);
        if s > span {
            gens = t;
            span = s;
        }
        if span == y_elems.len() as u128 {
            break;
        }
    }
    let (qy, incl) = if gens.is_empty() {
        let z = QuadraticModule::zero(q.param().clone());
        let map = ModuleMap::new(z.module().clone(), md.clone(), Vec::new())?;
        (z, map)
    } else {
        q.restrict(&gens)?
    };
    let y = Arc::new(QuadSpace::new(qy)?);
    let from_y: Vec<u32> = (0..y.len() as u32).map(|i| m.index(&incl.apply(y.elem(i)))).collect();
    let to_y: HashMap<u32, u32> = from_y.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
    if to_y.len() != y_elems.len() || y_elems.iter().any(|x| !to_y.contains_key(x)) {
        return Err(ComplexError::Internal("Y presentation does not match the orthogonal complement".into()));
    }
    let mut v: HashSet<u32> = HashSet::from([0]);
    for &a in vs {
        let prev: Vec<u32> = v.iter().copied().collect();
        for x in prev {
            for r in ring.elements() {
                let t = md.add(m.elem(x), &md.scale(m.elem(a), r));
                v.insert(m.index(&t));
            }
        }
    }
    let mut v: Vec<u32> = v.into_iter().collect();
    v.sort_unstable();
    Ok(Split {
        m: m.clone(),
        y,
        to_y,
        from_y,
        v,
    })
}

fn enumerate_capped(f: &SequencePoset, cap: usize) -> std::result::Result<Levels, String> {
    let levels = f.enumerate(usize::MAX, cap).map_err(|e| e.to_string())?;
    if levels.total() > cap {
        return Err(format!("{} members above cap {cap}", levels.total()));
    }
    Ok(levels)
}

/// Member counts of F⟨S⟩ from those of F: every member of length l
/// carries |S|^l decorations.
fn decorated_counts(base: &Levels, s: usize) -> Vec<usize> {
    base.counts()
        .iter()
        .enumerate()
        .map(|(i, &c)| c.saturating_mul(s.saturating_pow(i as u32 + 1)))
        .collect()
}

fn skipped_part(part: u8, reason: String) -> LinkIsoPart {
    LinkIsoPart {
        part,
        lhs_counts: Vec::new(),
        rhs_counts: Vec::new(),
        vertex_map_injective: false,
        forward: false,
        backward: false,
        isomorphic: false,
        skipped: Some(reason),
    }
}

/// The right-hand side is enumerated first; the left-hand side may then
/// hold at most as many members as the right, or the part fails.
fn compare<F, G>(part: u8, lhs: &SequencePoset, rhs: &SequencePoset, cap: usize, phi: F, psi: G) -> LinkIsoPart
where
    F: Fn(&Point) -> Option<Point> + Sync,
    G: Fn(&Point) -> Option<Point> + Sync,
{
    let r = match enumerate_capped(rhs, cap) {
        Ok(r) => r,
        Err(e) => return skipped_part(part, e),
    };
    let mut out = skipped_part(part, String::new());
    out.skipped = None;
    out.rhs_counts = r.counts();
    let l = match enumerate_capped(lhs, r.total()) {
        Ok(l) => l,
        Err(_) => return out,
    };
    out.lhs_counts = l.counts();
    let images: Vec<Option<Point>> = l.vertices().iter().map(|&v| phi(lhs.point(v))).collect();
    let distinct: HashSet<&Point> = images.iter().flatten().collect();
    out.vertex_map_injective = images.iter().all(Option::is_some) && distinct.len() == images.len();
    let map_all = |levels: &Levels, src: &SequencePoset, dst: &SequencePoset, f: &(dyn Fn(&Point) -> Option<Point> + Sync)| {
        levels.by_len.par_iter().flatten().all(|s| {
            let img: Option<Vec<Point>> = s.iter().map(|&i| f(src.point(i))).collect();
            img.is_some_and(|p| dst.contains(&p))
        })
    };
    out.forward = map_all(&l, lhs, rhs, &phi);
    out.backward = map_all(&r, rhs, lhs, &psi);
    out.isomorphic = out.vertex_map_injective && out.forward && out.backward && out.lhs_counts == out.rhs_counts;
    out
}

/// Skips a part whose right-hand side, of the given counts, is above the cap.
fn over_cap(part: u8, counts: std::result::Result<Vec<usize>, String>, cap: usize) -> Option<LinkIsoPart> {
    match counts {
        Err(e) => Some(skipped_part(part, e)),
        Ok(c) => {
            let total = c.iter().fold(0usize, |a, &x| a.saturating_add(x));
            (total > cap).then(|| skipped_part(part, format!("{total} members above cap {cap}")))
        }
    }
}

pub fn verify_link_isos(inst: &LinkIsoInstance, ctx: &RangeContext, opts: &LinkIsoOptions) -> Result<LinkIsoReport> {
    let q = &inst.q;
    let k = inst.pairs.len();
    if k == 0 {
        return Err(ComplexError::Instance("empty base sequence".into()));
    }
    let m = Arc::new(QuadSpace::new(q.clone())?);
    let vs: Vec<u32> = inst.pairs.iter().map(|p| m.index(&ModElem(p.0.clone()))).collect();
    let ws: Vec<u32> = inst.pairs.iter().map(|p| m.index(&ModElem(p.1.clone()))).collect();
    // Members of all three links use only elements of V^⊥; the ambient
    // posets are built on V^⊥ and the base entries alone.
    let keep_mask: Vec<bool> = (0..m.len() as u32)
        .into_par_iter()
        .map(|u| {
            vs.contains(&u)
                || ws.contains(&u)
                || vs.iter().all(|&v| m.lambda(v, u) == Elem::ZERO && m.lambda(u, v) == Elem::ZERO)
        })
        .collect();
    let keep = |u: u32| keep_mask[u as usize];
    let hu = Arc::new(hyperbolic_poset_within(&m, &keep)?);
    let x: Vec<Point> = vs.iter().zip(&ws).map(|(&v, &w)| vec![v, w]).collect();
    if !hu.contains(&x) {
        return Err(ComplexError::NotMember("base is not in HU(M)".into()));
    }
    let g = witt_index(q)?;
    let usr = ctx.usr(q.param())?;
    if opts.enforce_hypothesis && g < usr + k {
        return Err(ComplexError::Hypothesis(format!("g(M) = {g} < usr + k = {}", usr + k)));
    }
    let sp = Arc::new(build_split(q, &m, &vs, &ws)?);
    let mut parts = Vec::new();

    let iu_m = Arc::new(isotropic_poset_within(&m, &keep)?);
    let v_pts: Vec<Point> = vs.iter().map(|&v| vec![v]).collect();
    let lhs1 = iu_m.link(&v_pts)?;
    let iu_y = Arc::new(isotropic_poset_within(&sp.y, &|_| true)?);
    let dec1: Vec<Point> = sp.v.iter().map(|&a| vec![a]).collect();
    let rhs1 = iu_y.decorate(&dec1)?;
    let iu_y_counts = enumerate_capped(&iu_y, opts.cap).map(|l| decorated_counts(&l, sp.v.len()));
    let s1 = sp.clone();
    let s2 = sp.clone();
    parts.push(over_cap(1, iu_y_counts, opts.cap).unwrap_or_else(|| compare(
        1,
        &lhs1,
        &rhs1,
        opts.cap,
        move |p| s1.split(p[0]).map(|(y, a)| vec![y, a]),
        move |p| Some(vec![s2.add(s2.from_y[p[0] as usize], p[1])]),
    )));

    let mu_m = Arc::new(mixed_poset_within(&m, &keep)?);
    let v0: Vec<Point> = vs.iter().map(|&v| vec![v, 0]).collect();
    let lhs2 = hu.intersect(&Arc::new(mu_m.link(&v0)?))?;
    let hu_y = Arc::new(hyperbolic_poset_within(&sp.y, &|_| true)?);
    let mut dec2 = Vec::new();
    for &a in &sp.v {
        for &b in &sp.v {
            dec2.push(vec![a, b]);
        }
    }
    let rhs2 = hu_y.decorate(&dec2)?;
    let hu_y_levels = enumerate_capped(&hu_y, opts.cap);
    let hu_y_counts = hu_y_levels.as_ref().map(|l| decorated_counts(l, dec2.len())).map_err(Clone::clone);
    let s1 = sp.clone();
    let s2 = sp.clone();
    parts.push(over_cap(2, hu_y_counts, opts.cap).unwrap_or_else(|| compare(
        2,
        &lhs2,
        &rhs2,
        opts.cap,
        move |p| {
            let (y, a) = s1.split(p[0])?;
            let (y2, b) = s1.split(p[1])?;
            Some(vec![y, y2, a, b])
        },
        move |p| {
            Some(vec![
                s2.add(s2.from_y[p[0] as usize], p[2]),
                s2.add(s2.from_y[p[1] as usize], p[3]),
            ])
        },
    )));

    let lhs3 = hu.link(&x)?;
    let s1 = sp.clone();
    let s2 = sp.clone();
    let hu_y_plain = hu_y_levels.map(|l| l.counts());
    parts.push(over_cap(3, hu_y_plain, opts.cap).unwrap_or_else(|| compare(
        3,
        &lhs3,
        &hu_y,
        opts.cap,
        move |p| Some(vec![*s1.to_y.get(&p[0])?, *s1.to_y.get(&p[1])?]),
        move |p| Some(vec![s2.from_y[p[0] as usize], s2.from_y[p[1] as usize]]),
    )));

    let ok = parts.iter().all(|p| p.skipped.is_some() || p.isomorphic);
    Ok(LinkIsoReport {
        label: inst.label.clone(),
        k,
        witt_index: g,
        usr,
        y_size: sp.y.len(),
        v_size: sp.v.len(),
        parts,
        ok,
    })
}
