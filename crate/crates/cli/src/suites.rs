//! Batch suites over the catalog.

use crate::catalog::{self, ParamEntry, QuadEntry};
use crate::report::{digest_json, CaseResult, Status, SuiteReport};
use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use std::time::Instant;
use wittlab_complex::link_iso::{verify_link_isos, LinkIsoInstance, LinkIsoOptions};
use wittlab_complex::theorem::{verify_theorem, RangeContext, Structure, TheoremConfig, TheoremId, TheoremInstance};
use wittlab_complex::verdict::{Tier, VerdictConfig};
use wittlab_core::block::{is_unimodular_block, is_unimodular_block_brute, matrix_reduce, reduce_keep_tail, Block};
use wittlab_core::module::unimodular;
use wittlab_core::pipeline::{cancel_h, hyperbolic_straighten, standard_decomposition, transitive_move, RangeData};
use wittlab_core::quad::{
    is_lambda_unimodular, is_quad_isomorphic, transvection, transvection_apply, transvection_data_ok, unitary_group,
    Isometry, QuadraticModule,
};
use wittlab_core::stable_rank::{stable_rank, unitary_stable_rank, EuMode, DEFAULT_BUDGET};
use wittlab_core::{AlgebraError, Elem, ModElem, Module, ModuleMap, RMatrix, Ring};

pub const SUITES: [&str; 9] = [
    "axioms",
    "stable-rank",
    "blocks",
    "straighten",
    "transitivity",
    "cancellation",
    "gl-connectivity",
    "quad-connectivity",
    "link-isos",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Search budget for stable-rank and elementary-path searches.
    pub budget: u64,
    pub n_max: usize,
    pub eu_mode: EuMode,
    /// Restrict the catalog to these ring labels; all when empty.
    pub rings: Vec<String>,
    /// Largest quadratic module validated pair by pair.
    pub axiom_element_cap: u128,
    /// Largest module whose single elements are checked against the oracle.
    pub oracle_element_cap: u128,
    /// Largest module whose pairs are checked against the oracle.
    pub oracle_pair_cap: u128,
    /// Largest module whose triples are checked against the oracle.
    pub oracle_triple_cap: u128,
    pub block_rings: Vec<String>,
    pub block_n_max: usize,
    pub block_k_max: usize,
    pub straighten_per_ring: usize,
    pub straighten_element_cap: u128,
    pub transitivity_rings: Vec<String>,
    pub transitivity_element_cap: u128,
    /// Largest unitary group enumerated when generator orbits split.
    pub unitary_group_cap: usize,
    pub cancellation_element_cap: u128,
    /// Largest M for the exhaustive isometry cross-check.
    pub cross_check_cap: u128,
    pub gl_n_max: usize,
    pub quad_g_max: usize,
    pub link_cap: usize,
    /// Largest ambient module for link isomorphisms.
    pub link_element_cap: u128,
    pub simplex_cap: usize,
    pub pi1_budget: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 20240917,
            budget: DEFAULT_BUDGET,
            n_max: 3,
            eu_mode: EuMode::Transvection,
            rings: Vec::new(),
            axiom_element_cap: 1024,
            oracle_element_cap: 1024,
            oracle_pair_cap: 128,
            oracle_triple_cap: 16,
            block_rings: vec!["GF(2)".into(), "Z/4".into()],
            block_n_max: 3,
            block_k_max: 2,
            straighten_per_ring: 200,
            straighten_element_cap: 1 << 16,
            transitivity_rings: vec!["GF(2)".into(), "Z/4".into()],
            transitivity_element_cap: 1024,
            unitary_group_cap: 100_000,
            cancellation_element_cap: 1 << 16,
            cross_check_cap: 1024,
            gl_n_max: 4,
            quad_g_max: 4,
            link_cap: 100_000,
            link_element_cap: 1024,
            simplex_cap: 5_000_000,
            pi1_budget: 50_000_000,
        }
    }
}

impl SuiteConfig {
    fn rings(&self) -> Result<Vec<Arc<Ring>>> {
        Ok(catalog::rings()?
            .into_iter()
            .filter(|r| self.rings.is_empty() || self.rings.iter().any(|l| l == r.label()))
            .collect())
    }

    fn named_rings(&self, labels: &[String]) -> Result<Vec<Arc<Ring>>> {
        Ok(self.rings()?.into_iter().filter(|r| labels.iter().any(|l| l == r.label())).collect())
    }

    fn range_context(&self) -> RangeContext {
        RangeContext::new(self.budget, self.n_max, self.eu_mode)
    }

    fn theorem_config(&self) -> TheoremConfig {
        TheoremConfig {
            depth: wittlab_complex::theorem::DEFAULT_DEPTH,
            verdict: VerdictConfig {
                simplex_cap: self.simplex_cap,
                pi1_budget: self.pi1_budget,
                ..Default::default()
            },
        }
    }

    fn rng(&self, salt: &str) -> ChaCha8Rng {
        let h = digest_json(&(self.seed, salt));
        ChaCha8Rng::seed_from_u64(u64::from_str_radix(&h[..16], 16).expect("hex digest"))
    }
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let t0 = Instant::now();
    let ctx = cfg.range_context();
    let cases = match name {
        "axioms" => axioms(cfg)?,
        "stable-rank" => stable_ranks(cfg)?,
        "blocks" => blocks(cfg)?,
        "straighten" => straighten(cfg, &ctx)?,
        "transitivity" => transitivity(cfg, &ctx)?,
        "cancellation" => cancellation(cfg, &ctx)?,
        "gl-connectivity" => gl_connectivity(cfg, &ctx)?,
        "quad-connectivity" => quad_connectivity(cfg, &ctx)?,
        "link-isos" => link_isos(cfg, &ctx)?,
        other => bail!("unknown suite {other}; known suites: {}", SUITES.join(", ")),
    };
    Ok(SuiteReport::new(
        name,
        cfg.seed,
        digest_json(&(name, cfg)),
        cases,
        t0.elapsed().as_millis() as u64,
    ))
}

fn timed<F: FnOnce() -> CaseResult>(f: F) -> CaseResult {
    let t = Instant::now();
    let mut c = f();
    c.wall_ms = t.elapsed().as_millis() as u64;
    c
}

fn error_case(case: &str, e: &AlgebraError) -> CaseResult {
    let status = match e {
        AlgebraError::Budget(_) | AlgebraError::CapExceeded(_) => Status::Inconclusive,
        _ => Status::Critical,
    };
    CaseResult::new(case, status, e.to_string())
}

fn all_params(cfg: &SuiteConfig) -> Result<Vec<ParamEntry>> {
    let mut out = Vec::new();
    for r in cfg.rings()? {
        out.extend(catalog::form_parameters(&r)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------- axioms

fn axioms(cfg: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let mut cases = Vec::new();
    for r in cfg.rings()? {
        cases.push(timed(|| match r.validate_involution() {
            Ok(()) => CaseResult::new(format!("ring {}", r.label()), Status::Verified, "ring and involution laws")
                .metric("size", r.size()),
            Err(e) => error_case(&format!("ring {}", r.label()), &e),
        }));
    }
    let params = all_params(cfg)?;
    for p in &params {
        cases.push(timed(|| match p.param.validate() {
            Ok(()) => CaseResult::new(format!("param {}", p.name), Status::Verified, "epsilon and Lambda sandwich")
                .metric("lambda_size", p.param.members().len()),
            Err(e) => error_case(&format!("param {}", p.name), &e),
        }));
    }
    let mut quads = Vec::new();
    for p in &params {
        quads.extend(catalog::quadratic_modules(p)?);
    }
    let cap = cfg.axiom_element_cap;
    let quad_cases: Vec<CaseResult> = quads
        .par_iter()
        .map(|e| {
            timed(|| {
                let case = format!("quad {}", e.name);
                let size = e.q.size();
                if size > cap {
                    return CaseResult::new(case, Status::Vacuous, format!("{size} elements above the exhaustive cap; generator axioms checked at construction"))
                        .metric("size", size);
                }
                match e.q.validate_exhaustive(cap * cap) {
                    Ok(()) => CaseResult::new(case, Status::Verified, "axioms (1)-(3) on all element pairs").metric("size", size),
                    Err(err) => error_case(&case, &err),
                }
            })
        })
        .collect();
    cases.extend(quad_cases);
    Ok(cases)
}

// ---------------------------------------------------------------- stable ranks

fn stable_ranks(cfg: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let mut cases = Vec::new();
    for r in cfg.rings()? {
        cases.push(timed(|| {
            let case = format!("sr {}", r.label());
            match stable_rank(&r, cfg.n_max, cfg.budget) {
                Ok(s) => match s.value {
                    Some(1) => CaseResult::new(case, Status::Verified, "sr = 1").metric("sr", 1),
                    Some(v) => CaseResult::new(case, Status::Critical, format!("sr = {v} for a semi-local ring")).metric("sr", v),
                    None => CaseResult::new(case, Status::Inconclusive, format!("sr > {}", cfg.n_max)),
                },
                Err(e) => error_case(&case, &e),
            }
        }));
    }
    for p in all_params(cfg)? {
        cases.push(timed(|| {
            let case = format!("usr {}", p.name);
            match unitary_stable_rank(&p.param, cfg.n_max, cfg.eu_mode, cfg.budget) {
                Ok(u) => match u.value {
                    Some(v) if v <= 2 => CaseResult::new(case, Status::Verified, format!("usr = {v} <= 2")).metric("usr", v),
                    Some(v) => CaseResult::new(case, Status::Critical, format!("usr = {v} > 2")).metric("usr", v),
                    None if u.budget_exhausted => CaseResult::new(case, Status::Inconclusive, "budget exhausted"),
                    None => CaseResult::new(case, Status::Inconclusive, format!("usr > {}", cfg.n_max)),
                },
                Err(e) => error_case(&case, &e),
            }
        }));
    }
    Ok(cases)
}

// ---------------------------------------------------------------- blocks

/// Functional values y·v for every functional y of the module.
fn functional_table(m: &Module, elems: &[ModElem]) -> Vec<Vec<Elem>> {
    let ring = m.ring();
    m.all_functionals_brute()
        .iter()
        .map(|f| elems.iter().map(|v| ring.sum(f.0.iter().zip(&v.0).map(|(&a, &b)| ring.mul(a, b)))).collect())
        .collect()
}

/// Definitional check: for every j some functional takes the values δ_ij.
fn oracle_unimodular(table: &[Vec<Elem>], seq: &[usize]) -> bool {
    (0..seq.len()).all(|j| {
        table.iter().any(|row| {
            seq.iter()
                .enumerate()
                .all(|(i, &x)| row[x] == if i == j { Elem::ONE } else { Elem::ZERO })
        })
    })
}

fn module_oracle_case(cfg: &SuiteConfig, name: &str, m: &Module) -> CaseResult {
    let case = format!("oracle {name}");
    let size = m.size();
    if size > cfg.oracle_element_cap {
        return CaseResult::new(case, Status::Vacuous, format!("{size} elements above cap"));
    }
    let elems: Vec<ModElem> = m.elements().collect();
    let table = functional_table(m, &elems);
    let n = elems.len();
    let max_len = if size <= cfg.oracle_triple_cap {
        3
    } else if size <= cfg.oracle_pair_cap {
        2
    } else {
        1
    };
    let mut checked = 0usize;
    let mut mismatch: Option<Vec<usize>> = None;
    let mut seqs: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for len in 1..=max_len {
        if len > 1 {
            seqs = seqs
                .iter()
                .flat_map(|s| (0..n).map(move |x| s.iter().copied().chain([x]).collect::<Vec<_>>()))
                .collect();
        }
        let bad = seqs.par_iter().find_any(|s| {
            let v: Vec<ModElem> = s.iter().map(|&i| elems[i].clone()).collect();
            unimodular(m, &v) != oracle_unimodular(&table, s)
        });
        checked += seqs.len();
        if let Some(b) = bad {
            mismatch = Some(b.clone());
            break;
        }
    }
    match mismatch {
        None => CaseResult::new(case, Status::Verified, format!("agrees on all sequences of length <= {max_len}"))
            .metric("sequences", checked)
            .metric("functionals", table.len()),
        Some(s) => CaseResult::new(case, Status::Critical, format!("disagreement on element indices {s:?}")),
    }
}

fn decode(size: usize, mut idx: usize, out: &mut [Elem]) {
    for o in out.iter_mut() {
        *o = Elem((idx % size) as u16);
        idx /= size;
    }
}

fn block_sweep_case(cfg: &SuiteConfig, name: &str, m: &Arc<Module>, n: usize, k: usize, sr: usize) -> CaseResult {
    let case = format!("blocks {name} n={n} k={k}");
    let ring = m.ring().clone();
    let size = ring.size();
    let ng = m.ngens();
    let total = size.pow((n * k + k * ng) as u32);
    let results: Vec<(usize, usize, usize, Option<String>)> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut v = vec![Elem::ZERO; n * k + k * ng];
            decode(size, idx, &mut v);
            let mat = RMatrix {
                rows: n,
                cols: k,
                data: v[..n * k].to_vec(),
            };
            let fs: Vec<Vec<Elem>> = v[n * k..].chunks(ng).map(<[Elem]>::to_vec).collect();
            let Ok(b) = Block::new(m.clone(), mat, fs) else { return (0, 0, 0, None) };
            let fast = is_unimodular_block(&b).is_some();
            match is_unimodular_block_brute(&b, 1 << 24) {
                Ok(slow) if slow != fast => return (1, 0, 0, Some(format!("oracle disagreement at block {idx}"))),
                Ok(_) => {}
                Err(e) => return (1, 0, 0, Some(format!("oracle failed at block {idx}: {e}"))),
            }
            if !fast || k + sr > n + 1 {
                return (1, 0, 0, None);
            }
            match matrix_reduce(&b, sr, cfg.budget) {
                Ok(c) if c.replay(&b) => {}
                Ok(_) => return (1, 1, 0, Some(format!("certificate replay mismatch at block {idx}"))),
                Err(e) => return (1, 1, 0, Some(format!("matrix_reduce failed at block {idx}: {e}"))),
            }
            let mut tails = 0;
            if n > k + sr - 1 {
                match reduce_keep_tail(&b, k + sr - 1, sr, cfg.budget) {
                    Ok(c) if c.replay(&b) => tails = 1,
                    Ok(_) => return (1, 1, 1, Some(format!("keep-tail replay mismatch at block {idx}"))),
                    Err(e) => return (1, 1, 1, Some(format!("reduce_keep_tail failed at block {idx}: {e}"))),
                }
            }
            (1, 1, tails, None)
        })
        .collect();
    let blocks: usize = results.iter().map(|r| r.0).sum();
    let reduced: usize = results.iter().map(|r| r.1).sum();
    let tails: usize = results.iter().map(|r| r.2).sum();
    let failure = results.into_iter().find_map(|r| r.3);
    let c = match failure {
        None => CaseResult::new(case, Status::Verified, "oracle agreement; every unimodular block reduced and replayed"),
        Some(f) => CaseResult::new(case, Status::Critical, f),
    };
    c.metric("blocks", blocks).metric("reduced", reduced).metric("keep_tail", tails)
}

fn blocks(cfg: &SuiteConfig) -> Result<Vec<CaseResult>> {
    let mut cases = Vec::new();
    for r in cfg.rings()? {
        for (name, m) in catalog::modules(&r) {
            cases.push(timed(|| module_oracle_case(cfg, &name, &m)));
        }
    }
    for r in cfg.named_rings(&cfg.block_rings)? {
        let sr = match stable_rank(&r, cfg.n_max, cfg.budget).map(|s| s.value) {
            Ok(Some(v)) => v,
            _ => {
                cases.push(CaseResult::new(format!("blocks {}", r.label()), Status::Inconclusive, "stable rank unavailable"));
                continue;
            }
        };
        let mut ms: Vec<(String, Arc<Module>)> = vec![(r.label().to_string(), Arc::new(Module::free(r.clone(), 1)))];
        ms.extend(catalog::modules(&r).into_iter().filter(|(n, _)| n.contains("/(")));
        for (name, m) in &ms {
            for n in 1..=cfg.block_n_max {
                for k in 1..=cfg.block_k_max.min(n) {
                    cases.push(timed(|| block_sweep_case(cfg, name, m, n, k, sr)));
                }
            }
        }
    }
    Ok(cases)
}

// ---------------------------------------------------------------- straightening

/// Whether `map` preserves λ and μ on generators and is bijective.
pub fn check_isometry(src: &QuadraticModule, dst: &QuadraticModule, map: &ModuleMap) -> bool {
    let gens = src.module().gens();
    let imgs: Vec<ModElem> = gens.iter().map(|g| map.apply(g)).collect();
    for (a, fa) in gens.iter().zip(&imgs) {
        if src.mu(a) != dst.mu(fa) {
            return false;
        }
        for (b, fb) in gens.iter().zip(&imgs) {
            if src.lambda(a, b) != dst.lambda(fa, fb) {
                return false;
            }
        }
    }
    src.size() == dst.size() && dst.module().span_size(&imgs) == dst.size()
}

/// λ-unimodularity in H^k by search for the witnesses w_i.
fn lambda_unimodular_brute(h: &QuadraticModule, seq: &[ModElem]) -> bool {
    let elems: Vec<ModElem> = h.module().elements().collect();
    (0..seq.len()).all(|i| {
        elems.iter().any(|w| {
            seq.iter()
                .enumerate()
                .all(|(j, v)| h.lambda(w, v) == if i == j { Elem::ONE } else { Elem::ZERO })
        })
    })
}

fn random_elem(q: &QuadraticModule, rng: &mut ChaCha8Rng) -> ModElem {
    let size = q.ring().size();
    let c: Vec<Elem> = (0..q.ngens()).map(|_| Elem(rng.gen_range(0..size) as u16)).collect();
    q.module().canon(&c)
}

fn random_lambda_unimodular(q: &QuadraticModule, k: usize, rng: &mut ChaCha8Rng) -> Option<Vec<ModElem>> {
    (0..10_000).find_map(|_| {
        let seq: Vec<ModElem> = (0..k).map(|_| random_elem(q, rng)).collect();
        is_lambda_unimodular(q, &seq).map(|_| seq)
    })
}

fn straighten_ring(cfg: &SuiteConfig, ctx: &RangeContext, r: &Arc<Ring>) -> CaseResult {
    let case = format!("straighten {}", r.label());
    let res = (|| -> Result<CaseResult> {
        let param = catalog::default_parameter(r)?;
        let usr = ctx.usr(&param)?;
        let sr = ctx.sr(r)?;
        let range = RangeData { sr, usr, budget: cfg.budget };
        let mut shapes: Vec<(String, QuadraticModule, usize, usize)> = Vec::new();
        for (pn, pq) in catalog::degenerate_complements(&param)? {
            for k in 1..=2 {
                let g = usr + k;
                let q = pq.direct_sum(&QuadraticModule::hyperbolic(param.clone(), g))?;
                if q.size() <= cfg.straighten_element_cap {
                    shapes.push((format!("{pn}+H^{g}"), q, pq.ngens(), k));
                }
            }
        }
        if shapes.is_empty() {
            return Ok(CaseResult::new(case.clone(), Status::Inconclusive, "no instance within the element cap"));
        }
        let mut rng = cfg.rng(&case);
        let mut done = 0;
        let mut per_shape: BTreeMap<String, usize> = BTreeMap::new();
        let mut transvections = 0usize;
        while done < cfg.straighten_per_ring {
            let (name, q, p, k) = &shapes[done % shapes.len()];
            let dec = standard_decomposition(q, *p)?;
            let Some(seq) = random_lambda_unimodular(q, *k, &mut rng) else {
                return Ok(CaseResult::new(case.clone(), Status::Inconclusive, format!("no random instance found on {name}")));
            };
            let st = match hyperbolic_straighten(q, &dec, &seq, range) {
                Ok(s) => s,
                Err(e) => return Ok(error_case(&case, &e).metric("instance", format!("{name} {seq:?}"))),
            };
            let g = dec.g();
            let images: Vec<ModElem> = seq.iter().map(|v| st.phi.apply(v)).collect();
            let ok_images = images == st.images;
            let ok_iso = check_isometry(q, q, st.phi.map());
            let ok_support = images.iter().all(|v| v.0[p + 2 * k..p + 2 * g].iter().all(|&c| c == Elem::ZERO));
            let hk = QuadraticModule::hyperbolic(param.clone(), *k);
            let proj: Vec<ModElem> = images.iter().map(|v| ModElem(v.0[*p..p + 2 * k].to_vec())).collect();
            let ok_proj = lambda_unimodular_brute(&hk, &proj);
            if !(ok_images && ok_iso && ok_support && ok_proj) {
                return Ok(CaseResult::new(
                    case.clone(),
                    Status::Critical,
                    format!("post-condition failed on {name} {seq:?}: images {ok_images}, isometry {ok_iso}, support {ok_support}, projection {ok_proj}"),
                ));
            }
            transvections += st.transvections;
            *per_shape.entry(name.clone()).or_default() += 1;
            done += 1;
        }
        let mut c = CaseResult::new(case.clone(), Status::Verified, format!("{done} instances straightened and re-verified"))
            .metric("instances", done)
            .metric("transvections", transvections);
        for (n, v) in per_shape {
            c = c.metric(&format!("on {n}"), v);
        }
        Ok(c)
    })();
    res.unwrap_or_else(|e| CaseResult::new(case, Status::Critical, e.to_string()))
}

fn straighten(cfg: &SuiteConfig, ctx: &RangeContext) -> Result<Vec<CaseResult>> {
    Ok(cfg.rings()?.iter().map(|r| timed(|| straighten_ring(cfg, ctx, r))).collect())
}

// ---------------------------------------------------------------- transitivity

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Orbit count per μ-class on λ-unimodular elements.
fn class_orbits(
    q: &QuadraticModule,
    elems: &[ModElem],
    members: &[usize],
    moves: &dyn Fn(&ModElem) -> Vec<ModElem>,
) -> BTreeMap<Elem, usize> {
    let m = q.module();
    let mut uf = UnionFind((0..elems.len()).collect());
    for &i in members {
        for w in moves(&elems[i]) {
            uf.union(i, m.index_of(&w));
        }
    }
    let mut roots: BTreeMap<Elem, std::collections::BTreeSet<usize>> = BTreeMap::new();
    for &i in members {
        let root = uf.find(i);
        roots.entry(q.mu(&elems[i]).rep()).or_default().insert(root);
    }
    roots.into_iter().map(|(k, v)| (k, v.len())).collect()
}

fn transitivity_case(cfg: &SuiteConfig, e: &QuadEntry, usr: usize, sr: usize) -> CaseResult {
    let case = format!("transitivity {}", e.name);
    let q = &e.q;
    let m = q.module();
    let ring = q.ring().clone();
    let elems: Vec<ModElem> = m.elements().collect();
    let members: Vec<usize> = (0..elems.len())
        .filter(|&i| is_lambda_unimodular(q, std::slice::from_ref(&elems[i])).is_some())
        .collect();
    let mut gens: Vec<(ModElem, ModElem, Elem)> = Vec::new();
    let mut us = vec![m.zero_elem()];
    for b in m.gens() {
        for r in ring.elements().filter(|&r| r != Elem::ZERO) {
            us.push(m.scale(&b, r));
        }
    }
    for j in 0..2 * e.g {
        let basis = m.gen(e.p + j);
        for u in &us {
            for x in ring.elements() {
                if transvection_data_ok(q, &basis, u, x) {
                    gens.push((basis.clone(), u.clone(), x));
                }
            }
        }
    }
    let moves = |v: &ModElem| gens.iter().map(|(a, u, x)| transvection_apply(q, a, u, *x, v)).collect::<Vec<_>>();
    let mut orbits = class_orbits(q, &elems, &members, &moves);
    let mut method = "elementary transvections";
    if orbits.values().any(|&c| c > 1) {
        match unitary_group(q, cfg.unitary_group_cap) {
            Ok(group) => {
                let full = |v: &ModElem| group.iter().map(|g| g.apply(v)).collect::<Vec<_>>();
                orbits = class_orbits(q, &elems, &members, &full);
                method = "full unitary group";
            }
            Err(err) => {
                return CaseResult::new(case, Status::Inconclusive, format!("generator orbits split and U(M) is not enumerable: {err}"));
            }
        }
    }
    let range = RangeData { sr, usr, budget: cfg.budget };
    let moved = match standard_decomposition(q, e.p) {
        Ok(dec) => {
            let mut rng = cfg.rng(&case);
            let mut bad = None;
            for _ in 0..members.len().min(20) {
                let v = &elems[members[rng.gen_range(0..members.len())]];
                match transitive_move(q, &dec, v, q.mu(v).rep(), range) {
                    Ok(mv) if mv.phi.apply(v) == mv.target && check_isometry(q, q, mv.phi.map()) => {}
                    Ok(_) => bad = Some(format!("transitive move of {v:?} fails verification")),
                    Err(err) => bad = Some(format!("transitive move of {v:?}: {err}")),
                }
            }
            bad
        }
        Err(err) => Some(err.to_string()),
    };
    let split: Vec<String> = orbits.iter().filter(|(_, &c)| c > 1).map(|(k, c)| format!("class {}: {c} orbits", k.0)).collect();
    let c = if !split.is_empty() {
        CaseResult::new(case, Status::Critical, split.join("; "))
    } else if let Some(b) = moved {
        CaseResult::new(case, Status::Critical, b)
    } else {
        CaseResult::new(case, Status::Verified, format!("single orbit in each of {} classes ({method})", orbits.len()))
    };
    c.metric("lambda_unimodular", members.len()).metric("classes", orbits.len()).metric("generators", gens.len())
}

fn transitivity(cfg: &SuiteConfig, ctx: &RangeContext) -> Result<Vec<CaseResult>> {
    let mut cases = Vec::new();
    for r in cfg.named_rings(&cfg.transitivity_rings)? {
        let sr = ctx.sr(&r)?;
        for p in catalog::form_parameters(&r)? {
            let usr = ctx.usr(&p.param)?;
            for e in catalog::quadratic_modules(&p)? {
                if e.g < usr + 1 || e.q.size() > cfg.transitivity_element_cap {
                    continue;
                }
                cases.push(timed(|| transitivity_case(cfg, &e, usr, sr)));
            }
        }
    }
    Ok(cases)
}

// ---------------------------------------------------------------- cancellation

fn permutation_isometry(src: &QuadraticModule, dst: &QuadraticModule, perm: &[usize]) -> Result<Isometry> {
    let images: Vec<ModElem> = perm.iter().map(|&i| dst.module().gen(i)).collect();
    let map = ModuleMap::new(src.module().clone(), dst.module().clone(), images)?;
    Ok(Isometry::new(src, dst, map)?)
}

fn scramble(q: &QuadraticModule, iso: Isometry, rng: &mut ChaCha8Rng, count: usize) -> Isometry {
    let mut iso = iso;
    let mut applied = 0;
    for _ in 0..100 * count {
        if applied == count {
            break;
        }
        let e = random_elem(q, rng);
        let u = random_elem(q, rng);
        let x = Elem(rng.gen_range(0..q.ring().size()) as u16);
        if let Ok(t) = transvection(q, &e, &u, x) {
            iso = t.compose_after(&iso);
            applied += 1;
        }
    }
    iso
}

fn cancellation_case(
    cfg: &SuiteConfig,
    name: String,
    m: QuadraticModule,
    n: QuadraticModule,
    perm: Vec<usize>,
    range: RangeData,
) -> CaseResult {
    let case = format!("cancel {name}");
    let res = (|| -> Result<CaseResult> {
        let h = QuadraticModule::hyperbolic(m.param().clone(), 1);
        let mh = m.direct_sum(&h)?;
        let nh = n.direct_sum(&h)?;
        if mh.size() > cfg.cancellation_element_cap {
            return Ok(CaseResult::new(case.clone(), Status::Vacuous, format!("{} elements above cap", mh.size())));
        }
        let mut rng = cfg.rng(&case);
        let iso = scramble(&nh, permutation_isometry(&mh, &nh, &perm)?, &mut rng, 8);
        let cross = m.size() <= cfg.cross_check_cap;
        let c = match cancel_h(&m, &n, &iso, range, cross) {
            Ok(c) => c,
            Err(e) => return Ok(error_case(&case, &e)),
        };
        if !check_isometry(&m, &n, c.isometry.map()) {
            return Ok(CaseResult::new(case.clone(), Status::Critical, "returned map is not an isometry"));
        }
        let independent = if cross { Some(is_quad_isomorphic(&m, &n)?.is_some()) } else { None };
        if c.cross_checked == Some(false) || independent == Some(false) {
            return Ok(CaseResult::new(case.clone(), Status::Critical, "exhaustive search disagrees"));
        }
        let detail = if cross { "isometry verified; exhaustive search agrees" } else { "isometry verified; cross-check above cap" };
        Ok(CaseResult::new(case.clone(), Status::Verified, detail)
            .metric("transvections", c.transvections)
            .metric("size", m.size()))
    })();
    res.unwrap_or_else(|e| CaseResult::new(case, Status::Critical, e.to_string()))
}

fn cancellation(cfg: &SuiteConfig, ctx: &RangeContext) -> Result<Vec<CaseResult>> {
    let mut cases = Vec::new();
    for r in cfg.rings()? {
        let param = catalog::default_parameter(&r)?;
        let usr = ctx.usr(&param)?;
        let range = RangeData { sr: ctx.sr(&r)?, usr, budget: cfg.budget };
        let h = |g| QuadraticModule::hyperbolic(param.clone(), g);
        let hu = h(usr);
        for (pn, pq) in catalog::degenerate_complements(&param)? {
            let m = hu.direct_sum(&pq)?;
            let n = pq.direct_sum(&hu)?;
            let (a, b) = (2 * usr, pq.ngens());
            let mut perm: Vec<usize> = (b..b + a).chain(0..b).collect();
            perm.extend([a + b, a + b + 1]);
            cases.push(timed(|| cancellation_case(cfg, format!("{} H^{usr}+{pn} vs {pn}+H^{usr}", r.label()), m.clone(), n.clone(), perm.clone(), range)));
        }
        let g = usr + 1;
        let perm: Vec<usize> = (0..2 * g + 2).collect();
        cases.push(timed(|| cancellation_case(cfg, format!("{} H^{g} vs H^{g}", r.label()), h(g), h(g), perm.clone(), range)));
    }
    Ok(cases)
}

// ---------------------------------------------------------------- connectivity

fn tier_status(t: Tier) -> Status {
    match t {
        Tier::Vacuous => Status::Vacuous,
        Tier::NonemptyVerified | Tier::HomologyVerified | Tier::FullyVerified => Status::Verified,
        Tier::Refuted => Status::Critical,
        Tier::Inconclusive => Status::Inconclusive,
    }
}

fn theorem_case(cfg: &SuiteConfig, ctx: &RangeContext, t: TheoremId, inst: &TheoremInstance) -> CaseResult {
    let case = format!("{} {} part {}", t.name(), inst.label, inst.part);
    match verify_theorem(t, inst, ctx, &cfg.theorem_config()) {
        Ok(r) => {
            let v = &r.verdict;
            let mut c = CaseResult::new(case, tier_status(v.tier), format!("bound {}: {:?}; {}", r.bound, v.tier, v.note))
                .metric("bound", r.bound)
                .metric("tier", serde_json::to_value(v.tier).expect("tier").as_str().unwrap_or_default())
                .metric("simplices", format!("{:?}", v.simplex_counts));
            if let Some(h) = &v.homology {
                let betti: Vec<usize> = h.groups.iter().map(|g| g.betti).collect();
                c = c.metric("betti", format!("{betti:?}"));
            }
            if let Some(p) = &v.pi1 {
                c = c.metric("pi1_trivial", p.trivial);
            }
            c
        }
        Err(e) => CaseResult::new(case, Status::Critical, e.to_string()),
    }
}

fn unit_vector(len: usize, i: usize) -> Vec<Elem> {
    let mut v = vec![Elem::ZERO; len];
    v[i] = Elem::ONE;
    v
}

pub fn gl_instances(cfg: &SuiteConfig) -> Result<Vec<(TheoremId, TheoremInstance)>> {
    let depth = cfg.theorem_config().depth;
    let gf2 = catalog::ring_by_label("GF(2)")?;
    let mut out = Vec::new();
    for n in 2..=cfg.gl_n_max {
        let m = Arc::new(Module::free(gf2.clone(), n));
        let inst = |base: Vec<Vec<Elem>>| TheoremInstance {
            label: format!("GF(2)^{n}"),
            structure: Structure::Module(m.clone()),
            part: if base.is_empty() { 1 } else { 2 },
            base,
        };
        out.push((TheoremId::Gl, inst(vec![])));
        out.push((TheoremId::Gl, inst(vec![unit_vector(n + depth, 0)])));
        if n <= 3 {
            out.push((TheoremId::GlTranslated, inst(vec![])));
            out.push((TheoremId::GlTranslated, inst(vec![unit_vector(n + depth, 0)])));
        }
    }
    for label in ["GF(3)", "Z/4"] {
        let r = catalog::ring_by_label(label)?;
        out.push((
            TheoremId::Gl,
            TheoremInstance {
                label: format!("{label}^2"),
                structure: Structure::Module(Arc::new(Module::free(r, 2))),
                base: vec![],
                part: 1,
            },
        ));
    }
    Ok(out)
}

fn gl_connectivity(cfg: &SuiteConfig, ctx: &RangeContext) -> Result<Vec<CaseResult>> {
    Ok(gl_instances(cfg)?.iter().map(|(t, i)| timed(|| theorem_case(cfg, ctx, *t, i))).collect())
}

pub fn quad_instances(cfg: &SuiteConfig) -> Result<Vec<(TheoremId, TheoremInstance)>> {
    let gf2 = catalog::ring_by_label("GF(2)")?;
    let param = catalog::default_parameter(&gf2)?;
    let zero = QuadraticModule::zero(param.clone());
    let inst = |g: usize, base: Vec<Vec<Elem>>| TheoremInstance {
        label: format!("GF(2) H^{g}"),
        structure: Structure::Quad { p: zero.clone(), g },
        part: if base.is_empty() { 1 } else { 2 },
        base,
    };
    let mut out = Vec::new();
    for g in 1..=cfg.quad_g_max {
        out.push((TheoremId::Isotropic, inst(g, vec![])));
        out.push((TheoremId::Hyperbolic, inst(g, vec![])));
    }
    for g in 2..=cfg.quad_g_max.min(4) {
        out.push((TheoremId::Isotropic, inst(g, vec![unit_vector(2 * g, 0)])));
    }
    for g in 1..=cfg.quad_g_max.min(3) {
        out.push((TheoremId::HyperbolicStable, inst(g, vec![])));
    }
    for g in 1..=cfg.quad_g_max.min(2) {
        out.push((TheoremId::QuadLambda, inst(g, vec![])));
        out.push((TheoremId::QuadTranslated, inst(g, vec![])));
        out.push((TheoremId::QuadCorollary, inst(g, vec![])));
        out.push((TheoremId::OrthogonalLink, inst(g + 1, vec![unit_vector(2 * g + 2, 0)])));
    }
    Ok(out)
}

fn quad_connectivity(cfg: &SuiteConfig, ctx: &RangeContext) -> Result<Vec<CaseResult>> {
    Ok(quad_instances(cfg)?.iter().map(|(t, i)| timed(|| theorem_case(cfg, ctx, *t, i))).collect())
}

// ---------------------------------------------------------------- link isomorphisms

pub fn link_iso_instances(cfg: &SuiteConfig, ctx: &RangeContext) -> Result<Vec<LinkIsoInstance>> {
    let mut out = Vec::new();
    for label in ["GF(2)", "GF(3)", "Z/4"] {
        let Ok(r) = catalog::ring_by_label(label) else { continue };
        if !cfg.rings.is_empty() && !cfg.rings.iter().any(|l| l == label) {
            continue;
        }
        let param = catalog::default_parameter(&r)?;
        let usr = ctx.usr(&param)?;
        let mut shapes: Vec<(String, QuadraticModule, usize)> = Vec::new();
        for g in usr + 1..=usr + 2 {
            shapes.push((format!("{label} H^{g}"), QuadraticModule::hyperbolic(param.clone(), g), 0));
        }
        for (pn, pq) in catalog::degenerate_complements(&param)? {
            let g = usr + 1;
            shapes.push((format!("{label} {pn}+H^{g}"), pq.direct_sum(&QuadraticModule::hyperbolic(param.clone(), g))?, pq.ngens()));
        }
        for (name, q, p) in shapes {
            let g = (q.ngens() - p) / 2;
            for k in 1..=g - usr {
                let pairs = (0..k)
                    .map(|i| (unit_vector(q.ngens(), p + 2 * i), unit_vector(q.ngens(), p + 2 * i + 1)))
                    .collect();
                out.push(LinkIsoInstance {
                    label: format!("{name} k={k}"),
                    q: q.clone(),
                    pairs,
                });
            }
        }
    }
    Ok(out)
}

fn link_isos(cfg: &SuiteConfig, ctx: &RangeContext) -> Result<Vec<CaseResult>> {
    let opts = LinkIsoOptions {
        cap: cfg.link_cap,
        enforce_hypothesis: true,
    };
    Ok(link_iso_instances(cfg, ctx)?
        .iter()
        .map(|inst| {
            timed(|| {
                let case = format!("link-iso {}", inst.label);
                if inst.q.size() > cfg.link_element_cap {
                    return CaseResult::new(case, Status::Vacuous, format!("{} elements above cap", inst.q.size()));
                }
                match verify_link_isos(inst, ctx, &opts) {
                    Ok(r) => {
                        let ran: Vec<u8> = r.parts.iter().filter(|p| p.skipped.is_none()).map(|p| p.part).collect();
                        let status = if !r.ok {
                            Status::Critical
                        } else if ran.is_empty() {
                            Status::Vacuous
                        } else {
                            Status::Verified
                        };
                        let mut c = CaseResult::new(case, status, format!("parts checked {ran:?} of 3"))
                            .metric("y_size", r.y_size)
                            .metric("v_size", r.v_size);
                        for p in &r.parts {
                            let v = match &p.skipped {
                                Some(s) => format!("skipped: {s}"),
                                None => format!("{} {:?}", if p.isomorphic { "iso" } else { "FAILED" }, p.lhs_counts),
                            };
                            c = c.metric(&format!("part{}", p.part), v);
                        }
                        c
                    }
                    Err(e) => CaseResult::new(case, Status::Critical, e.to_string()),
                }
            })
        })
        .collect())
}

/// Suite names mapped to a one-line description, for `--help`.
pub fn describe() -> HashMap<&'static str, &'static str> {
    HashMap::from([
        ("axioms", "ring, involution, form-parameter and quadratic-module axioms"),
        ("stable-rank", "sr and usr of every catalog ring and form parameter"),
        ("blocks", "unimodularity oracles and the matrix reduction sweep"),
        ("straighten", "hyperbolic straightening on random in-hypothesis sequences"),
        ("transitivity", "orbit enumeration of U(M) on lambda-unimodular classes"),
        ("cancellation", "cancellation of a hyperbolic summand"),
        ("gl-connectivity", "connectivity of O(M) n U(M^inf) and links"),
        ("quad-connectivity", "connectivity of the quadratic posets over GF(2)"),
        ("link-isos", "explicit link isomorphisms"),
    ])
}
