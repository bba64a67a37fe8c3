//! Connectivity statements checked instance by instance.
//!
//! Each statement fixes a poset built from the instance and a bound d
//! computed from measured quantities (rank, stable rank, Witt index,
//! unitary stable rank, base length). The poset is then handed to
//! [`connectivity_verdict`].

use crate::error::{ComplexError, Result};
use crate::kinds::{
    hyperbolic_poset, isotropic_poset, lambda_mu_unimodular_poset, lambda_unimodular_poset, unimodular_poset,
    ModuleSpace, QuadSpace,
};
use crate::poset::{Point, SequencePoset};
use crate::verdict::{connectivity_verdict, ConnectivityVerdict, Tier, VerdictConfig};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};
use std::time::Instant;
use wittlab_core::form::FormParameter;
use wittlab_core::module::rank;
use wittlab_core::quad::{stable_witt_index, witt_index, QuadraticModule};
use wittlab_core::stable_rank::{stable_rank, unitary_stable_rank, EuMode, DEFAULT_BUDGET};
use wittlab_core::{Elem, ModElem, Module, Ring};

pub const DEFAULT_DEPTH: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    /// 𝒪(M) ∩ 𝒰(M^∞), and its links at v ∈ 𝒰(M^∞): rk(M) − sr(R) − |v| − 1.
    Gl,
    /// 𝒪(M ∪ (M + e_1)) ∩ 𝒰(M^∞), and its links: rk(M) − sr(R) − |v|.
    GlTranslated,
    /// 𝒪(ℐ(P ⊕ ⟨e_1, …, e_g⟩, μ)) ∩ 𝒰(N, λ) with N = P ⊕ H^g ⊕ H, and its
    /// links at v ∈ 𝒰(N, λ): g − usr(R) − |v| − 1.
    QuadLambda,
    /// 𝒪(ℐ(P ⊕ (E_g ∪ (E_g + e_{g+1})), μ)) ∩ 𝒰(N, λ), and its links:
    /// g − usr(R) − |v|.
    QuadTranslated,
    /// 𝒪(M) ∩ 𝒰(N, λ, μ) with N = M ⊕ H; part 2 links at v ∈ 𝒰(N, λ, μ),
    /// part 3 intersects with 𝒰(N, λ)_v: g(M) − usr(R) − |v| − 1.
    QuadCorollary,
    /// 𝒪(⟨v⟩^⊥) ∩ 𝒰(M, λ, μ)_v: g(M) − usr(R) − |v| − 1.
    OrthogonalLink,
    /// ℐ𝒰(M) and ℐ𝒰(M)_x: ⌊(g(M) − usr(R) − |x| − 2)/2⌋.
    Isotropic,
    /// ℋ𝒰(M) and ℋ𝒰(M)_x: ⌊(g(M) − usr(R) − |x| − 3)/2⌋.
    Hyperbolic,
    /// As `Hyperbolic` with the stable Witt index ḡ(M) in place of g(M).
    HyperbolicStable,
}

impl TheoremId {
    pub const ALL: [TheoremId; 9] = [
        TheoremId::Gl,
        TheoremId::GlTranslated,
        TheoremId::QuadLambda,
        TheoremId::QuadTranslated,
        TheoremId::QuadCorollary,
        TheoremId::OrthogonalLink,
        TheoremId::Isotropic,
        TheoremId::Hyperbolic,
        TheoremId::HyperbolicStable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Gl => "gl",
            TheoremId::GlTranslated => "gl-translated",
            TheoremId::QuadLambda => "quad-lambda",
            TheoremId::QuadTranslated => "quad-translated",
            TheoremId::QuadCorollary => "quad-corollary",
            TheoremId::OrthogonalLink => "orthogonal-link",
            TheoremId::Isotropic => "isotropic",
            TheoremId::Hyperbolic => "hyperbolic",
            TheoremId::HyperbolicStable => "hyperbolic-stable",
        }
    }

    pub fn parse(s: &str) -> Option<TheoremId> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }
}

#[derive(Clone, Debug)]
pub enum Structure {
    /// An R-module M (GL side).
    Module(Arc<Module>),
    /// M = P ⊕ H^g with the P generators first.
    Quad { p: QuadraticModule, g: usize },
}

/// An instance: the structure, a base sequence and the part of the
/// statement. Base coordinates live in the ambient module of the statement:
/// M ⊕ R^s on the GL side, N = M ⊕ H for `QuadLambda`, `QuadTranslated` and
/// `QuadCorollary`, M otherwise. For ℋ𝒰 the base lists x_1, y_1, x_2, ….
#[derive(Clone, Debug)]
pub struct TheoremInstance {
    pub label: String,
    pub structure: Structure,
    pub base: Vec<Vec<Elem>>,
    /// 1 without base; 2 for links; 3 for the third corollary part.
    pub part: u8,
}

/// Measured stable ranks, cached per ring and per form parameter.
pub struct RangeContext {
    pub budget: u64,
    pub n_max: usize,
    pub mode: EuMode,
    sr: Mutex<HashMap<String, Option<usize>>>,
    usr: Mutex<HashMap<String, Option<usize>>>,
}

impl Default for RangeContext {
    fn default() -> Self {
        RangeContext::new(DEFAULT_BUDGET, 3, EuMode::Transvection)
    }
}

pub fn param_key(p: &FormParameter) -> String {
    format!("{}|{}|{:?}", p.ring().label(), p.epsilon(), p.members())
}

impl RangeContext {
    pub fn new(budget: u64, n_max: usize, mode: EuMode) -> Self {
        RangeContext {
            budget,
            n_max,
            mode,
            sr: Mutex::new(HashMap::new()),
            usr: Mutex::new(HashMap::new()),
        }
    }

    pub fn sr(&self, ring: &Ring) -> Result<usize> {
        let key = ring.label().to_string();
        if let Some(v) = self.sr.lock().expect("lock").get(&key) {
            return v.ok_or_else(|| ComplexError::Instance(format!("sr({key}) not found within n ≤ {}", self.n_max)));
        }
        let v = stable_rank(ring, self.n_max, self.budget)?.value;
        self.sr.lock().expect("lock").insert(key.clone(), v);
        v.ok_or_else(|| ComplexError::Instance(format!("sr({key}) not found within n ≤ {}", self.n_max)))
    }

    pub fn usr(&self, param: &Arc<FormParameter>) -> Result<usize> {
        let key = param_key(param);
        if let Some(v) = self.usr.lock().expect("lock").get(&key) {
            return v.ok_or_else(|| ComplexError::Instance(format!("usr not found for {key}")));
        }
        let v = unitary_stable_rank(param, self.n_max, self.mode, self.budget)?.value;
        self.usr.lock().expect("lock").insert(key.clone(), v);
        v.ok_or_else(|| ComplexError::Instance(format!("usr not found for {key}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremConfig {
    /// Number s of free summands standing in for R^∞.
    pub depth: usize,
    pub verdict: VerdictConfig,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        TheoremConfig {
            depth: DEFAULT_DEPTH,
            verdict: VerdictConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub rk: Option<usize>,
    pub sr: Option<usize>,
    /// The g of a given decomposition P ⊕ H^g.
    pub g: Option<usize>,
    pub witt_index: Option<usize>,
    pub stable_witt_index: Option<usize>,
    pub usr: Option<usize>,
    pub base_len: usize,
    pub depth: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub instance: String,
    pub part: u8,
    pub poset: String,
    pub hypotheses: Hypotheses,
    pub bound: i64,
    pub verdict: ConnectivityVerdict,
    /// A refutation of an instance the statement covers.
    pub critical: bool,
    pub setup_ms: u64,
    pub verdict_ms: u64,
}

fn floor_half(x: i64) -> i64 {
    x.div_euclid(2)
}

fn points_of(space_index: impl Fn(&ModElem) -> u32, base: &[Vec<Elem>], arity: usize) -> Vec<Point> {
    base.chunks(arity)
        .map(|c| c.iter().map(|v| space_index(&ModElem(v.clone()))).collect())
        .collect()
}

fn check_lengths(base: &[Vec<Elem>], n: usize) -> Result<()> {
    match base.iter().find(|v| v.len() != n) {
        Some(v) => Err(ComplexError::Instance(format!("base vector of length {} in a module with {n} generators", v.len()))),
        None => Ok(()),
    }
}

struct Built {
    poset: SequencePoset,
    label: String,
    bound: i64,
    hyp: Hypotheses,
}

fn build_gl(inst: &TheoremInstance, m: &Arc<Module>, translated: bool, ctx: &RangeContext, cfg: &TheoremConfig) -> Result<Built> {
    let s = cfg.depth.max(1);
    let ring = m.ring().clone();
    let ambient = Arc::new(m.direct_sum(&Module::free(ring.clone(), s))?);
    check_lengths(&inst.base, ambient.ngens())?;
    let space = Arc::new(ModuleSpace::new(ambient)?);
    let mut f = Arc::new(unimodular_poset(&space, None)?);
    let k = inst.base.len();
    if k > 0 {
        let pts = points_of(|x| space.index(x), &inst.base, 1);
        f = Arc::new(f.link(&pts)?);
    }
    let nm = m.ngens();
    let sp = space.clone();
    let keep = move |p: &Point| {
        let c = &sp.elem(p[0]).0[nm..];
        c[1..].iter().all(|&x| x == Elem::ZERO) && (c[0] == Elem::ZERO || (translated && c[0] == Elem::ONE))
    };
    let label = if translated { "O(M u (M+e1)) n U(M^inf)" } else { "O(M) n U(M^inf)" };
    let poset = f.restrict(label, keep);
    let rk = rank(m) as i64;
    let sr = ctx.sr(&ring)?;
    let bound = rk - sr as i64 - k as i64 - if translated { 0 } else { 1 };
    Ok(Built {
        poset,
        label: format!("{label}{}", if k > 0 { "_v" } else { "" }),
        bound,
        hyp: Hypotheses {
            rk: Some(rk as usize),
            sr: Some(sr),
            base_len: k,
            depth: Some(s),
            ..Default::default()
        },
    })
}

fn quad_parts(p: &QuadraticModule, g: usize) -> Result<(QuadraticModule, QuadraticModule)> {
    let param = p.param().clone();
    let m = p.direct_sum(&QuadraticModule::hyperbolic(param.clone(), g))?;
    let n = p.direct_sum(&QuadraticModule::hyperbolic(param, g + 1))?;
    Ok((m, n))
}

fn build_quad_lambda(
    inst: &TheoremInstance,
    p: &QuadraticModule,
    g: usize,
    translated: bool,
    ctx: &RangeContext,
) -> Result<Built> {
    let (_, n) = quad_parts(p, g)?;
    check_lengths(&inst.base, n.ngens())?;
    let usr = ctx.usr(p.param())?;
    let space = Arc::new(QuadSpace::new(n)?);
    let mut f = Arc::new(lambda_unimodular_poset(&space, None)?);
    let k = inst.base.len();
    if k > 0 {
        f = Arc::new(f.link(&points_of(|x| space.index(x), &inst.base, 1))?);
    }
    let np = p.ngens();
    let sp = space.clone();
    let keep = move |pt: &Point| {
        let c = &sp.elem(pt[0]).0;
        sp.mu_zero(pt[0])
            && (0..g).all(|i| c[np + 2 * i + 1] == Elem::ZERO)
            && c[np + 2 * g + 1] == Elem::ZERO
            && (c[np + 2 * g] == Elem::ZERO || (translated && c[np + 2 * g] == Elem::ONE))
    };
    let label = if translated {
        "O(I(P+(E_g u E_g+e_g+1))) n U(N,lambda)"
    } else {
        "O(I(P+E_g)) n U(N,lambda)"
    };
    Ok(Built {
        poset: f.restrict(label, keep),
        label: label.into(),
        bound: g as i64 - usr as i64 - k as i64 - if translated { 0 } else { 1 },
        hyp: Hypotheses {
            g: Some(g),
            usr: Some(usr),
            base_len: k,
            ..Default::default()
        },
    })
}

fn build_corollary(inst: &TheoremInstance, p: &QuadraticModule, g: usize, ctx: &RangeContext) -> Result<Built> {
    let (m, n) = quad_parts(p, g)?;
    check_lengths(&inst.base, n.ngens())?;
    let usr = ctx.usr(p.param())?;
    let gm = witt_index(&m)?;
    let space = Arc::new(QuadSpace::new(n)?);
    let lm = Arc::new(lambda_mu_unimodular_poset(&space, None)?);
    let k = inst.base.len();
    let pts = points_of(|x| space.index(x), &inst.base, 1);
    let f = match inst.part {
        1 => lm,
        2 => Arc::new(lm.link(&pts)?),
        _ => {
            let l = Arc::new(lambda_unimodular_poset(&space, None)?);
            let lv = Arc::new(l.link(&pts)?);
            Arc::new(lm.intersect(&lv)?)
        }
    };
    let nm = m.ngens();
    let sp = space.clone();
    let keep = move |pt: &Point| sp.elem(pt[0]).0[nm..].iter().all(|&x| x == Elem::ZERO);
    let label = match inst.part {
        1 => "O(M) n U(N,lambda,mu)",
        2 => "O(M) n U(N,lambda,mu)_v",
        _ => "O(M) n U(N,lambda,mu) n U(N,lambda)_v",
    };
    Ok(Built {
        poset: f.restrict(label, keep),
        label: label.into(),
        bound: gm as i64 - usr as i64 - k as i64 - 1,
        hyp: Hypotheses {
            g: Some(g),
            witt_index: Some(gm),
            usr: Some(usr),
            base_len: k,
            ..Default::default()
        },
    })
}

fn build_on_m(theorem: TheoremId, inst: &TheoremInstance, p: &QuadraticModule, g: usize, ctx: &RangeContext) -> Result<Built> {
    let (m, _) = quad_parts(p, g)?;
    check_lengths(&inst.base, m.ngens())?;
    let usr = ctx.usr(p.param())?;
    let gm = witt_index(&m)?;
    let mut hyp = Hypotheses {
        g: Some(g),
        witt_index: Some(gm),
        usr: Some(usr),
        ..Default::default()
    };
    let space = Arc::new(QuadSpace::new(m.clone())?);
    let (poset, label, bound) = match theorem {
        TheoremId::OrthogonalLink => {
            let pts = points_of(|x| space.index(x), &inst.base, 1);
            hyp.base_len = pts.len();
            let lm = Arc::new(lambda_mu_unimodular_poset(&space, None)?);
            let f = Arc::new(lm.link(&pts)?);
            let sp = space.clone();
            let vs: Vec<u32> = pts.iter().map(|p| p[0]).collect();
            let keep = move |pt: &Point| vs.iter().all(|&v| sp.lambda(v, pt[0]) == Elem::ZERO);
            let label = "O(<v>perp) n U(M,lambda,mu)_v";
            (f.restrict(label, keep), label, gm as i64 - usr as i64 - pts.len() as i64 - 1)
        }
        TheoremId::Isotropic => {
            let pts = points_of(|x| space.index(x), &inst.base, 1);
            hyp.base_len = pts.len();
            let iu = isotropic_poset(&space)?;
            let f = if pts.is_empty() { iu } else { Arc::new(iu).link(&pts)? };
            (f, "IU(M)", floor_half(gm as i64 - usr as i64 - pts.len() as i64 - 2))
        }
        _ => {
            if inst.base.len() % 2 != 0 {
                return Err(ComplexError::Instance("hyperbolic base needs pairs".into()));
            }
            let pts = points_of(|x| space.index(x), &inst.base, 2);
            hyp.base_len = pts.len();
            let hu = hyperbolic_poset(&space)?;
            let f = if pts.is_empty() { hu } else { Arc::new(hu).link(&pts)? };
            let gg = if theorem == TheoremId::HyperbolicStable {
                let s = stable_witt_index(&m, 2, Some(usr))?.stable_witt_index;
                hyp.stable_witt_index = Some(s);
                s
            } else {
                gm
            };
            (f, "HU(M)", floor_half(gg as i64 - usr as i64 - pts.len() as i64 - 3))
        }
    };
    Ok(Built {
        poset,
        label: label.into(),
        bound,
        hyp,
    })
}

fn build(theorem: TheoremId, inst: &TheoremInstance, ctx: &RangeContext, cfg: &TheoremConfig) -> Result<Built> {
    let expected = if inst.base.is_empty() { 1 } else { 2 };
    if inst.part != expected && !(inst.part == 3 && theorem == TheoremId::QuadCorollary && !inst.base.is_empty()) {
        return Err(ComplexError::Instance(format!("part {} does not match a base of length {}", inst.part, inst.base.len())));
    }
    if theorem == TheoremId::OrthogonalLink && inst.base.is_empty() {
        return Err(ComplexError::Instance("the orthogonal link needs a base sequence".into()));
    }
    match (theorem, &inst.structure) {
        (TheoremId::Gl, Structure::Module(m)) => build_gl(inst, m, false, ctx, cfg),
        (TheoremId::GlTranslated, Structure::Module(m)) => build_gl(inst, m, true, ctx, cfg),
        (TheoremId::QuadLambda, Structure::Quad { p, g }) => build_quad_lambda(inst, p, *g, false, ctx),
        (TheoremId::QuadTranslated, Structure::Quad { p, g }) => build_quad_lambda(inst, p, *g, true, ctx),
        (TheoremId::QuadCorollary, Structure::Quad { p, g }) => build_corollary(inst, p, *g, ctx),
        (t, Structure::Quad { p, g }) if !matches!(t, TheoremId::Gl | TheoremId::GlTranslated) => {
            build_on_m(t, inst, p, *g, ctx)
        }
        (t, _) => Err(ComplexError::Instance(format!("{} does not apply to this structure", t.name()))),
    }
}

/// Builds the poset of the statement for an instance.
pub fn theorem_poset(theorem: TheoremId, inst: &TheoremInstance, ctx: &RangeContext, cfg: &TheoremConfig) -> Result<(SequencePoset, i64)> {
    let b = build(theorem, inst, ctx, cfg)?;
    Ok((b.poset, b.bound))
}

pub fn verify_theorem(theorem: TheoremId, inst: &TheoremInstance, ctx: &RangeContext, cfg: &TheoremConfig) -> Result<TheoremReport> {
    let t0 = Instant::now();
    let built = build(theorem, inst, ctx, cfg)?;
    let setup_ms = t0.elapsed().as_millis() as u64;
    let t1 = Instant::now();
    let verdict = connectivity_verdict(&built.poset, built.bound, &cfg.verdict);
    let verdict_ms = t1.elapsed().as_millis() as u64;
    Ok(TheoremReport {
        theorem,
        instance: inst.label.clone(),
        part: inst.part,
        poset: built.label,
        hypotheses: built.hyp,
        bound: built.bound,
        critical: verdict.tier == Tier::Refuted,
        verdict,
        setup_ms,
        verdict_ms,
    })
}

/// Members of 𝒪(M) ∩ 𝒰(M ⊕ R^s) through length `max_len`, as sequences of
/// M coordinates, for each depth s in `depths`; true when all agree.
pub fn depth_independence(m: &Arc<Module>, depths: &[usize], max_len: usize) -> Result<bool> {
    let mut sets: Vec<BTreeSet<Vec<Vec<Elem>>>> = Vec::new();
    for &s in depths {
        let ambient = Arc::new(m.direct_sum(&Module::free(m.ring().clone(), s))?);
        let space = Arc::new(ModuleSpace::new(ambient)?);
        let f = Arc::new(unimodular_poset(&space, None)?);
        let nm = m.ngens();
        let sp = space.clone();
        let r = f.restrict("O(M) n U", move |p| sp.elem(p[0]).0[nm..].iter().all(|&x| x == Elem::ZERO));
        let levels = r.enumerate(max_len, 5_000_000)?;
        let set = levels
            .by_len
            .iter()
            .flatten()
            .map(|s| s.iter().map(|&i| space.elem(r.point(i)[0]).0[..nm].to_vec()).collect())
            .collect();
        sets.push(set);
    }
    Ok(sets.windows(2).all(|w| w[0] == w[1]))
}
