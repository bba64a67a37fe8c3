//! Constructive pipelines on P ⊕ H^g: straightening a λ-unimodular sequence
//! into P ⊕ H^k, the transitive move onto e_1 + f_1·r, and cancellation of
//! a hyperbolic summand.

use crate::block::{reduce_keep_tail, Block, KeepTailCertificate};
use crate::error::{AlgebraError, Result};
use crate::linalg::RMatrix;
use crate::module::{ModElem, ModuleMap};
use crate::quad::{
    decompose_along, is_lambda_unimodular, is_quad_isomorphic, max_hyperbolic_family, transvection, Isometry,
    QuadraticModule, UnitaryMap, WittDecomposition,
};
use crate::ring::Elem;
use crate::stable_rank::{eu_path, ElementaryStep};
use serde::{Deserialize, Serialize};

/// Inputs shared by the pipelines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeData {
    pub sr: usize,
    pub usr: usize,
    pub budget: u64,
}

/// A unitary map on the standard model P ⊕ H^g, built up by composition.
struct Builder<'a> {
    std: &'a QuadraticModule,
    p: usize,
    phi: UnitaryMap,
    count: usize,
}

impl<'a> Builder<'a> {
    fn new(std: &'a QuadraticModule, p: usize) -> Self {
        Builder {
            std,
            p,
            phi: Isometry::identity(std),
            count: 0,
        }
    }

    fn then(&mut self, e: &ModElem, u: &ModElem, x: Elem) -> Result<()> {
        let t = transvection(self.std, e, u, x)?;
        self.phi = t.compose_after(&self.phi);
        self.count += 1;
        Ok(())
    }

    /// Applies elementary steps of H^{g - offset} acting on the copies
    /// offset..g.
    fn then_steps(&mut self, steps: &[ElementaryStep], offset: usize, g: usize) -> Result<()> {
        let m = self.std.module().clone();
        let width = g - offset;
        for s in steps {
            let (e, u, x) = s.data(width);
            let mut ec = vec![Elem::ZERO; m.ngens()];
            let mut uc = vec![Elem::ZERO; m.ngens()];
            let base = self.p + 2 * offset;
            ec[base..base + 2 * width].copy_from_slice(&e);
            uc[base..base + 2 * width].copy_from_slice(&u);
            self.then(&m.canon(&ec), &m.canon(&uc), x)?;
        }
        Ok(())
    }
}

/// Output of [`hyperbolic_straighten`].
#[derive(Clone, Debug)]
pub struct StraightenResult {
    /// φ ∈ U(M) in the coordinates of the input module.
    pub phi: UnitaryMap,
    pub images: Vec<ModElem>,
    /// φ(v_i) in the standard model P ⊕ H^g.
    pub standard_images: Vec<ModElem>,
    /// The elements p̃_j ∈ P used in the transvections along e_j.
    pub p_tilde: Vec<ModElem>,
    pub keep_tail: KeepTailCertificate,
    pub transvections: usize,
    pub g: usize,
    pub k: usize,
}

/// Whether the standard coordinates lie in P ⊕ H^k with λ-unimodular
/// projection to H^k.
pub fn straightened(dec: &WittDecomposition, std_images: &[ModElem], k: usize) -> bool {
    let p = dec.complement.ngens();
    let g = dec.g();
    if std_images
        .iter()
        .any(|v| v.0[p + 2 * k..p + 2 * g].iter().any(|&c| c != Elem::ZERO))
    {
        return false;
    }
    if k == 0 {
        return true;
    }
    let hk = QuadraticModule::hyperbolic(dec.standard.param().clone(), k);
    let proj: Vec<ModElem> = std_images.iter().map(|v| ModElem(v.0[p..p + 2 * k].to_vec())).collect();
    is_lambda_unimodular(&hk, &proj).is_some()
}

/// The block A_(v_1, …, v_k) of a sequence in P ⊕ H^g: rows are the e_l and
/// f_l coefficients, the last row is λ(−, p_i) on P.
pub fn associated_block(dec: &WittDecomposition, std_seq: &[ModElem]) -> Result<Block> {
    let pq = &dec.complement;
    let p = pq.ngens();
    let g = dec.g();
    let k = std_seq.len();
    let mut matrix = RMatrix::zeros(2 * g, k);
    let mut functionals = Vec::with_capacity(k);
    let gens = pq.module().gens();
    for (i, v) in std_seq.iter().enumerate() {
        for r in 0..2 * g {
            matrix.set(r, i, v.0[p + r]);
        }
        let pi = pq.module().canon(&v.0[..p]);
        functionals.push(gens.iter().map(|b| pq.lambda(b, &pi)).collect());
    }
    Block::new(pq.module().clone(), matrix, functionals)
}

fn to_standard(dec: &WittDecomposition, v: &ModElem) -> ModElem {
    dec.iso.inverse().apply(v)
}

fn conjugate(dec: &WittDecomposition, q: &QuadraticModule, phi_std: &UnitaryMap) -> Result<UnitaryMap> {
    let inv = dec.iso.inverse();
    let map = dec.iso.map().compose_after(&phi_std.map().compose_after(inv.map()));
    Isometry::new(q, q, map).map_err(|_| AlgebraError::Internal("conjugated map is not unitary".into()))
}

/// Moves a λ-unimodular sequence of length k in P ⊕ H^g, g ≥ usr + k, into
/// P ⊕ H^k with λ-unimodular projection to H^k.
pub fn hyperbolic_straighten(
    q: &QuadraticModule,
    dec: &WittDecomposition,
    seq: &[ModElem],
    range: RangeData,
) -> Result<StraightenResult> {
    let k = seq.len();
    let g = dec.g();
    if k == 0 {
        return Err(AlgebraError::Precondition("empty sequence".into()));
    }
    if g < range.usr + k {
        return Err(AlgebraError::Precondition(format!("g = {g} < usr + k = {}", range.usr + k)));
    }
    if is_lambda_unimodular(q, seq).is_none() {
        return Err(AlgebraError::Precondition("sequence is not lambda-unimodular".into()));
    }
    let std = &dec.standard;
    let sm = std.module().clone();
    let ring = std.ring().clone();
    let p = dec.complement.ngens();
    let pm = dec.complement.module().clone();
    let std_seq: Vec<ModElem> = seq.iter().map(|v| to_standard(dec, v)).collect();

    let block = associated_block(dec, &std_seq)?;
    let top = k + range.sr - 1;
    let mut order: Vec<usize> = (0..top).map(|j| 2 * j).collect();
    order.extend((top..g).map(|j| 2 * j));
    order.extend((0..g).map(|j| 2 * j + 1));
    let reordered = block.permute_rows(&order);
    let keep_tail = reduce_keep_tail(&reordered, top, range.sr, range.budget)?;

    let mut b = Builder::new(std, p);
    let eps = std.param().epsilon();
    let eps_bar = std.param().epsilon_bar();
    let mut p_tilde = vec![pm.zero_elem(); g];
    for j in 0..top {
        p_tilde[j] = keep_tail.m[j].clone();
    }
    for (j, pt) in p_tilde.iter().enumerate() {
        if pm.is_zero(pt) {
            continue;
        }
        let y = dec.complement.mu(pt).rep();
        let mut uc = pt.0.clone();
        uc.resize(sm.ngens(), Elem::ZERO);
        let u = sm.scale(&sm.canon(&uc), ring.neg(eps_bar));
        let x = ring.mul3(eps, y, eps_bar);
        b.then(&sm.gen(p + 2 * j), &u, x)?;
    }

    let after: Vec<ModElem> = std_seq.iter().map(|v| b.phi.apply(v)).collect();
    let hpart: Vec<ModElem> = after.iter().map(|v| ModElem(v.0[p..].to_vec())).collect();
    let hg = QuadraticModule::hyperbolic(std.param().clone(), g);
    if is_lambda_unimodular(&hg, &hpart).is_none() {
        return Err(AlgebraError::Internal("hyperbolic projection is not lambda-unimodular".into()));
    }

    for i in 0..k {
        let cur = b.phi.apply(&std_seq[i]);
        let z = &cur.0[p + 2 * i..p + 2 * g];
        let width = g - i;
        let path = eu_path(std.param(), width, z, |w| w[2..].iter().all(|&c| c == Elem::ZERO), range.budget)?
            .ok_or_else(|| AlgebraError::Internal(format!("no elementary path for sequence entry {i}")))?;
        b.then_steps(&path, i, g)?;
    }

    let standard_images: Vec<ModElem> = std_seq.iter().map(|v| b.phi.apply(v)).collect();
    if !straightened(dec, &standard_images, k) {
        return Err(AlgebraError::Internal("straightened sequence fails the post-conditions".into()));
    }
    let phi = conjugate(dec, q, &b.phi)?;
    let images = seq.iter().map(|v| phi.apply(v)).collect();
    Ok(StraightenResult {
        phi,
        images,
        standard_images,
        p_tilde,
        keep_tail,
        transvections: b.count,
        g,
        k,
    })
}

/// Output of [`transitive_move`].
#[derive(Clone, Debug)]
pub struct TransitiveMove {
    pub phi: UnitaryMap,
    /// e_1 + f_1·r expressed in the input module.
    pub target: ModElem,
    pub transvections: usize,
}

/// φ ∈ U(M) with φ(v) = e_1 + f_1·r, where (e_1, f_1) is the first
/// hyperbolic pair of the decomposition.
pub fn transitive_move(
    q: &QuadraticModule,
    dec: &WittDecomposition,
    v: &ModElem,
    r: Elem,
    range: RangeData,
) -> Result<TransitiveMove> {
    let g = dec.g();
    if g < range.usr + 1 {
        return Err(AlgebraError::Precondition(format!("g = {g} < usr + 1")));
    }
    let param = q.param().clone();
    if param.coset(r) != q.mu(v) {
        return Err(AlgebraError::Precondition("r is not in mu(v)".into()));
    }
    let std = &dec.standard;
    let sm = std.module().clone();
    let ring = std.ring().clone();
    let p = dec.complement.ngens();
    let st = hyperbolic_straighten(q, dec, std::slice::from_ref(v), range)?;

    let inv = dec.iso.inverse();
    let phi1 = inv.compose_after(&st.phi).compose_after(&dec.iso);
    let mut b = Builder::new(std, p);
    b.phi = phi1;
    b.count = st.transvections;
    let sv = to_standard(dec, v);

    let cur = b.phi.apply(&sv);
    let path = eu_path(
        &param,
        g,
        &cur.0[p..],
        |w| w[0] == Elem::ONE && w[2..].iter().all(|&c| c == Elem::ZERO),
        range.budget,
    )?
    .ok_or_else(|| AlgebraError::Internal("no elementary move onto e_1 + f_1 b".into()))?;
    b.then_steps(&path, 0, g)?;

    let eps_bar = param.epsilon_bar();
    let f1 = sm.gen(p + 1);
    let cur = b.phi.apply(&sv);
    let mut pc = cur.0.clone();
    for c in pc[p..].iter_mut() {
        *c = Elem::ZERO;
    }
    let pel = sm.canon(&pc);
    if !sm.is_zero(&pel) {
        let x = std.mu(&pel).rep();
        let u = sm.scale(&pel, ring.neg(eps_bar));
        b.then(&f1, &u, x)?;
    }
    let cur = b.phi.apply(&sv);
    let bcoef = cur.0[p + 1];
    let diff = ring.sub(bcoef, r);
    if diff != Elem::ZERO {
        b.then(&f1, &sm.zero_elem(), diff)?;
    }
    let mut want = vec![Elem::ZERO; sm.ngens()];
    want[p] = Elem::ONE;
    want[p + 1] = r;
    let want = sm.canon(&want);
    if b.phi.apply(&sv) != want {
        return Err(AlgebraError::Internal("transitive move missed e_1 + f_1 r".into()));
    }
    let phi = conjugate(dec, q, &b.phi)?;
    let target = dec.iso.apply(&want);
    debug_assert_eq!(phi.apply(v), target);
    Ok(TransitiveMove {
        phi,
        target,
        transvections: b.count,
    })
}

/// Output of [`cancel_h`].
#[derive(Clone, Debug)]
pub struct Cancellation {
    pub isometry: Isometry,
    pub transvections: usize,
    /// Whether an independent exhaustive isometry search agrees.
    pub cross_checked: Option<bool>,
}

fn pad(q: &QuadraticModule, x: &ModElem) -> ModElem {
    let mut c = x.0.clone();
    c.resize(q.ngens(), Elem::ZERO);
    q.module().canon(&c)
}

/// Given an isometry M ⊕ H → N ⊕ H with g(M) ≥ usr, an explicit isometry
/// M → N.
pub fn cancel_h(
    m: &QuadraticModule,
    n: &QuadraticModule,
    iso: &Isometry,
    range: RangeData,
    cross_check: bool,
) -> Result<Cancellation> {
    let param = m.param().clone();
    if **n.param() != *param {
        return Err(AlgebraError::Mismatch);
    }
    let h = QuadraticModule::hyperbolic(param.clone(), 1);
    let mh = m.direct_sum(&h)?;
    let nh = n.direct_sum(&h)?;
    if !mh.is_isometry(&nh, iso.map()) || !iso.map().is_bijective() {
        return Err(AlgebraError::Precondition("iso is not an isometry M + H -> N + H".into()));
    }
    let pairs_m = max_hyperbolic_family(m)?;
    if pairs_m.len() < range.usr {
        return Err(AlgebraError::Precondition(format!("g(M) = {} < usr = {}", pairs_m.len(), range.usr)));
    }
    let (pm, pn) = (m.ngens(), n.ngens());
    let mm = mh.module().clone();
    let e = mm.gen(pm);
    let f = mm.gen(pm + 1);
    let inv = iso.inverse();
    let e1 = inv.apply(&nh.module().gen(pn));
    let f1 = inv.apply(&nh.module().gen(pn + 1));

    let mut pairs = vec![(e.clone(), f.clone())];
    pairs.extend(pairs_m.iter().map(|(x, y)| (pad(&mh, x), pad(&mh, y))));
    let dec = decompose_along(&mh, &pairs)?;
    let mv = transitive_move(&mh, &dec, &e1, Elem::ZERO, range)?;
    if mv.target != e {
        return Err(AlgebraError::Internal("transitive move did not land on e".into()));
    }
    let ring = mh.ring().clone();
    let mut psi = mv.phi.clone();
    let mut count = mv.transvections;

    let f2 = psi.apply(&f1);
    let mut yc = f2.0.clone();
    yc[pm] = Elem::ZERO;
    yc[pm + 1] = Elem::ZERO;
    let y = mm.canon(&yc);
    if f2.0[pm + 1] != Elem::ONE {
        return Err(AlgebraError::Internal("partner of e has f-coefficient other than 1".into()));
    }
    if !mm.is_zero(&y) {
        let x = mh.mu(&y).rep();
        let t = transvection(&mh, &e, &mm.neg(&y), x)?;
        psi = t.compose_after(&psi);
        count += 1;
    }
    let f3 = psi.apply(&f1);
    let a = f3.0[pm];
    if a != Elem::ZERO {
        let x = ring.mul(param.epsilon(), a);
        let t = transvection(&mh, &e, &mm.zero_elem(), x)?;
        psi = t.compose_after(&psi);
        count += 1;
    }
    if psi.apply(&e1) != e || psi.apply(&f1) != f {
        return Err(AlgebraError::Internal("hyperbolic pair not moved onto the summand".into()));
    }
    let back = iso.compose_after(&psi.inverse());
    let nm = n.module().clone();
    let mut images = Vec::with_capacity(pm);
    for gm in m.module().gens() {
        let x = back.apply(&pad(&mh, &gm));
        if x.0[pn] != Elem::ZERO || x.0[pn + 1] != Elem::ZERO {
            return Err(AlgebraError::Internal("image of M leaves N".into()));
        }
        images.push(nm.canon(&x.0[..pn]));
    }
    let map = ModuleMap::new(m.module().clone(), nm, images)?;
    if !map.is_bijective() {
        return Err(AlgebraError::Internal("cancelled map is not bijective".into()));
    }
    let isometry =
        Isometry::new(m, n, map).map_err(|_| AlgebraError::Internal("cancelled map is not an isometry".into()))?;
    let cross_checked = if cross_check {
        Some(is_quad_isomorphic(m, n)?.is_some())
    } else {
        None
    };
    Ok(Cancellation {
        isometry,
        transvections: count,
        cross_checked,
    })
}

/// Decomposition of P ⊕ H^g given in standard coordinates (P generators
/// first) along its standard hyperbolic basis.
pub fn standard_decomposition(q: &QuadraticModule, p: usize) -> Result<WittDecomposition> {
    let m = q.module();
    if q.ngens() < p || (q.ngens() - p) % 2 != 0 {
        return Err(AlgebraError::Shape("not of the form P + H^g".into()));
    }
    let g = (q.ngens() - p) / 2;
    let pairs: Vec<(ModElem, ModElem)> = (0..g).map(|j| (m.gen(p + 2 * j), m.gen(p + 2 * j + 1))).collect();
    decompose_along(q, &pairs)
}
