//! n×k-blocks for a module: a ring matrix with a last row of anti-linear
//! functionals, the legal moves on them, and the constructive reductions.

use crate::error::{AlgebraError, Result};
use crate::linalg::{solve_elems, RMatrix};
use crate::module::{ModElem, Module};
use crate::ring::{Elem, Ring};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Default number of candidate vectors tried by a shortening search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 1 << 22;

/// Block over a presented module. Functional `j` is stored by its values
/// on the module generators, so f_j(x) = Σ_b conj(x_b) · values[j][b].
#[derive(Clone, Debug)]
pub struct Block {
    module: Arc<Module>,
    matrix: RMatrix,
    functionals: Vec<Vec<Elem>>,
}

impl PartialEq for Block {
    fn eq(&self, other: &Self) -> bool {
        *self.module == *other.module && self.matrix == other.matrix && self.functionals == other.functionals
    }
}

impl Block {
    pub fn new(module: Arc<Module>, matrix: RMatrix, functionals: Vec<Vec<Elem>>) -> Result<Self> {
        if functionals.len() != matrix.cols {
            return Err(AlgebraError::Shape(format!(
                "{} functionals for {} columns",
                functionals.len(),
                matrix.cols
            )));
        }
        let ring = module.ring().clone();
        for (j, f) in functionals.iter().enumerate() {
            if f.len() != module.ngens() {
                return Err(AlgebraError::Shape(format!("functional {j} has wrong length")));
            }
            for rel in module.relations() {
                let v = ring.sum(rel.iter().zip(f).map(|(&r, &a)| ring.mul(ring.conj(r), a)));
                if v != Elem::ZERO {
                    return Err(AlgebraError::IllDefined(format!("functional {j} does not vanish on a relator")));
                }
            }
        }
        Ok(Block {
            module,
            matrix,
            functionals,
        })
    }

    pub fn module(&self) -> &Arc<Module> {
        &self.module
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.module.ring()
    }

    pub fn n(&self) -> usize {
        self.matrix.rows
    }

    pub fn k(&self) -> usize {
        self.matrix.cols
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn functionals(&self) -> &[Vec<Elem>] {
        &self.functionals
    }

    /// f_j(x).
    pub fn eval(&self, j: usize, x: &ModElem) -> Elem {
        let ring = self.ring();
        ring.sum(x.0.iter().zip(&self.functionals[j]).map(|(&c, &a)| ring.mul(ring.conj(c), a)))
    }

    pub fn left_multiply(&self, l: &LeftMultiplier) -> Result<Block> {
        let n = self.n();
        if l.s.rows != n || l.s.cols != n || l.column.len() != n {
            return Err(AlgebraError::Shape("left multiplier does not match the block".into()));
        }
        let ring = self.ring().clone();
        let mut top = l.s.mul(&ring, &self.matrix);
        for i in 0..n {
            for j in 0..self.k() {
                top.set(i, j, ring.add(top.get(i, j), self.eval(j, &l.column[i])));
            }
        }
        let functionals = self
            .functionals
            .iter()
            .map(|f| f.iter().map(|&a| ring.mul(l.corner, a)).collect())
            .collect();
        Ok(Block {
            module: self.module.clone(),
            matrix: top,
            functionals,
        })
    }

    pub fn right_multiply(&self, d: &RMatrix) -> Result<Block> {
        let k = self.k();
        if d.rows != k || d.cols != k {
            return Err(AlgebraError::Shape("right multiplier must be k×k".into()));
        }
        let ring = self.ring().clone();
        let top = self.matrix.mul(&ring, d);
        let t = self.module.ngens();
        let functionals = (0..k)
            .map(|j| {
                (0..t)
                    .map(|b| ring.sum((0..k).map(|l| ring.mul(self.functionals[l][b], d.get(l, j)))))
                    .collect()
            })
            .collect();
        Ok(Block {
            module: self.module.clone(),
            matrix: top,
            functionals,
        })
    }

    /// Rows `rows` and columns `cols` of the matrix, with the matching
    /// functionals.
    pub fn sub_block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Block {
        let mut m = RMatrix::zeros(rows.len(), cols.len());
        for (a, i) in rows.clone().enumerate() {
            for (b, j) in cols.clone().enumerate() {
                m.set(a, b, self.matrix.get(i, j));
            }
        }
        Block {
            module: self.module.clone(),
            matrix: m,
            functionals: self.functionals[cols].to_vec(),
        }
    }

    /// Rows of the matrix in the given order.
    pub fn permute_rows(&self, order: &[usize]) -> Block {
        let rows: Vec<Vec<Elem>> = order.iter().map(|&i| self.matrix.row(i).to_vec()).collect();
        let mut matrix = RMatrix::from_rows(&rows);
        matrix.cols = self.k();
        Block {
            module: self.module.clone(),
            matrix,
            functionals: self.functionals.clone(),
        }
    }

    pub fn top_is_unimodular(&self) -> bool {
        self.k() == 0 || self.matrix.is_left_invertible(self.ring())
    }
}

/// Left multiplier [[S, m], [0, s]] with S ∈ M_n(R), m ∈ M^n and s ∈ R.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeftMultiplier {
    pub s: RMatrix,
    pub column: Vec<ModElem>,
    pub corner: Elem,
}

impl LeftMultiplier {
    pub fn identity(module: &Module, n: usize) -> Self {
        LeftMultiplier {
            s: RMatrix::identity(n),
            column: vec![module.zero_elem(); n],
            corner: Elem::ONE,
        }
    }

    pub fn unipotent(module: &Module, column: Vec<ModElem>) -> Self {
        let n = column.len();
        LeftMultiplier {
            column,
            ..Self::identity(module, n)
        }
    }

    pub fn linear(module: &Module, c: RMatrix) -> Self {
        let n = c.rows;
        LeftMultiplier {
            s: c,
            ..Self::identity(module, n)
        }
    }

    /// self · other, for multipliers with corner 1.
    pub fn then_after(&self, module: &Module, other: &LeftMultiplier) -> LeftMultiplier {
        let ring = module.ring();
        let n = self.s.rows;
        let s = self.s.mul(ring, &other.s);
        let column = (0..n)
            .map(|i| {
                let carried = module.combine(
                    &other.column,
                    &(0..n).map(|l| ring.conj(self.s.get(i, l))).collect::<Vec<_>>(),
                );
                module.add(&carried, &module.scale(&self.column[i], ring.conj(other.corner)))
            })
            .collect();
        LeftMultiplier {
            s,
            column,
            corner: ring.mul(self.corner, other.corner),
        }
    }
}

/// The three legal moves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Move {
    /// [[1_n, m], [0, 1]] with m ∈ M^n.
    Unipotent { column: Vec<ModElem> },
    /// [[C, 0], [0, 1]] with C ∈ GL_n(R).
    Linear { c: RMatrix },
    /// Right multiplication by D ∈ GL_k(R).
    Right { d: RMatrix },
}

pub fn block_act(a: &Block, mv: &Move) -> Result<Block> {
    let ring = a.ring().clone();
    match mv {
        Move::Unipotent { column } => {
            if column.len() != a.n() || column.iter().any(|m| !a.module.is_canonical(m)) {
                return Err(AlgebraError::Shape("unipotent column must be n canonical module elements".into()));
            }
            a.left_multiply(&LeftMultiplier::unipotent(&a.module, column.clone()))
        }
        Move::Linear { c } => {
            if c.rows != a.n() || c.cols != a.n() || c.inverse(&ring).is_none() {
                return Err(AlgebraError::Shape("linear move needs an invertible n×n matrix".into()));
            }
            a.left_multiply(&LeftMultiplier::linear(&a.module, c.clone()))
        }
        Move::Right { d } => {
            if d.rows != a.k() || d.cols != a.k() || d.inverse(&ring).is_none() {
                return Err(AlgebraError::Shape("right move needs an invertible k×k matrix".into()));
            }
            a.right_multiply(d)
        }
    }
}

/// The inverse of a legal move.
pub fn inverse_move(a: &Block, mv: &Move) -> Result<Move> {
    let ring = a.ring();
    Ok(match mv {
        Move::Unipotent { column } => Move::Unipotent {
            column: column.iter().map(|m| a.module.neg(m)).collect(),
        },
        Move::Linear { c } => Move::Linear {
            c: c.inverse(ring).ok_or_else(|| AlgebraError::Shape("singular move".into()))?,
        },
        Move::Right { d } => Move::Right {
            d: d.inverse(ring).ok_or_else(|| AlgebraError::Shape("singular move".into()))?,
        },
    })
}

/// A left inverse A_L: ring part k×n and a module column of length k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockLeftInverse {
    pub ring_part: RMatrix,
    pub column: Vec<ModElem>,
}

impl BlockLeftInverse {
    pub fn verify(&self, a: &Block) -> bool {
        let ring = a.ring();
        (0..a.k()).all(|i| {
            (0..a.k()).all(|j| {
                let s = ring.sum((0..a.n()).map(|l| ring.mul(self.ring_part.get(i, l), a.matrix.get(l, j))));
                let v = ring.add(s, a.eval(j, &self.column[i]));
                v == if i == j { Elem::ONE } else { Elem::ZERO }
            })
        })
    }
}

/// Finds A_L with A_L · A = 1_k by solving one linear system per row.
pub fn is_unimodular_block(a: &Block) -> Option<BlockLeftInverse> {
    let ring = a.ring().clone();
    let (n, k, t) = (a.n(), a.k(), a.module.ngens());
    let mut ring_part = RMatrix::zeros(k, n);
    let mut column = Vec::with_capacity(k);
    for i in 0..k {
        let mut target = vec![Elem::ZERO; k];
        target[i] = Elem::ONE;
        let sol = solve_elems(
            &ring,
            n + t,
            |x| {
                (0..k)
                    .map(|j| {
                        let s = ring.sum((0..n).map(|l| ring.mul(x[l], a.matrix.get(l, j))));
                        let f = ring.sum(
                            (0..t).map(|b| ring.mul(ring.conj(x[n + b]), a.functionals[j][b])),
                        );
                        ring.add(s, f)
                    })
                    .collect()
            },
            &target,
        )?;
        for l in 0..n {
            ring_part.set(i, l, sol.particular[l]);
        }
        column.push(a.module.canon(&sol.particular[n..]));
    }
    let out = BlockLeftInverse { ring_part, column };
    debug_assert!(out.verify(a));
    Some(out)
}

/// Definitional oracle: enumerates every candidate row (r'_1..r'_n, m')
/// independently for each index.
pub fn is_unimodular_block_brute(a: &Block, cap: u128) -> Result<bool> {
    let ring = a.ring().clone();
    let (n, k) = (a.n(), a.k());
    let candidates = (ring.size() as u128).pow(n as u32) * a.module.size();
    if candidates > cap {
        return Err(AlgebraError::CapExceeded(format!("{candidates} candidate rows")));
    }
    let elems: Vec<ModElem> = a.module.elements().collect();
    let fvals: Vec<Vec<Elem>> = elems.iter().map(|m| (0..k).map(|j| a.eval(j, m)).collect()).collect();
    let size = ring.size();
    let total = size.pow(n as u32);
    let mut r = vec![Elem::ZERO; n];
    'row: for i in 0..k {
        for idx in 0..total {
            let mut t = idx;
            for x in r.iter_mut() {
                *x = Elem((t % size) as u16);
                t /= size;
            }
            let base: Vec<Elem> = (0..k)
                .map(|j| ring.sum((0..n).map(|l| ring.mul(r[l], a.matrix.get(l, j)))))
                .collect();
            for fv in &fvals {
                if (0..k).all(|j| ring.add(base[j], fv[j]) == if i == j { Elem::ONE } else { Elem::ZERO }) {
                    continue 'row;
                }
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// A vector t with (row_i + t_i · row_last)_{i<last} left unimodular, tried
/// in canonical enumeration order.
pub fn shortening_vector(ring: &Ring, row: &[Elem], budget: u64) -> Result<Option<Vec<Elem>>> {
    let m = row.len().saturating_sub(1);
    if row.is_empty() {
        return Ok(None);
    }
    let last = row[m];
    let size = ring.size() as u64;
    let total = size.checked_pow(m as u32).unwrap_or(u64::MAX);
    let mut t = vec![Elem::ZERO; m];
    let mut short = vec![Elem::ZERO; m];
    for idx in 0..total {
        if idx >= budget {
            return Err(AlgebraError::Budget(format!("shortening search over {total} vectors")));
        }
        let mut c = idx;
        for x in t.iter_mut() {
            *x = Elem((c % size) as u16);
            c /= size;
        }
        for i in 0..m {
            short[i] = ring.add(row[i], ring.mul(t[i], last));
        }
        if ring.is_unimodular_row(&short) {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// C ∈ GL_n(R), built from elementary row operations, with C·r = e_1.
pub fn pivot_to_e1(ring: &Ring, r: &[Elem], budget: u64) -> Result<Option<RMatrix>> {
    let n = r.len();
    if n == 0 {
        return Ok(None);
    }
    if n == 1 {
        return Ok(ring.inv(r[0]).map(|u| RMatrix::from_rows(&[vec![u]])));
    }
    let mut c = RMatrix::identity(n);
    let mut v = r.to_vec();
    // row_i += a · row_j on both v and c
    let add_row = |c: &mut RMatrix, v: &mut [Elem], i: usize, j: usize, a: Elem| {
        if a == Elem::ZERO {
            return;
        }
        v[i] = ring.add(v[i], ring.mul(a, v[j]));
        for col in 0..n {
            let x = ring.add(c.get(i, col), ring.mul(a, c.get(j, col)));
            c.set(i, col, x);
        }
    };
    let Some(t) = shortening_vector(ring, &v, budget)? else {
        return Ok(None);
    };
    for i in 0..n - 1 {
        add_row(&mut c, &mut v, i, n - 1, t[i]);
    }
    let b = ring
        .row_left_inverse(&v[..n - 1])
        .ok_or_else(|| AlgebraError::Internal("shortened column lost unimodularity".into()))?;
    let lead = ring.sub(Elem::ONE, v[n - 1]);
    for i in 0..n - 1 {
        add_row(&mut c, &mut v, n - 1, i, ring.mul(lead, b[i]));
    }
    debug_assert_eq!(v[n - 1], Elem::ONE);
    for i in 0..n - 1 {
        let a = ring.neg(v[i]);
        add_row(&mut c, &mut v, i, n - 1, a);
    }
    add_row(&mut c, &mut v, 0, n - 1, Elem::ONE);
    add_row(&mut c, &mut v, n - 1, 0, ring.neg(Elem::ONE));
    debug_assert!(v[0] == Elem::ONE && v[1..].iter().all(|&x| x == Elem::ZERO));
    Ok(Some(c))
}

/// One step of the inductive reduction, recorded for inspection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionStep {
    /// Number of rows and columns of the block at this depth.
    pub n: usize,
    pub k: usize,
    /// Shortening coefficients v with r_{i,1} + v_i f_1(m'_1) unimodular.
    pub v: Vec<Elem>,
    /// The pivot matrix C, absent in the base case.
    pub pivot: Option<RMatrix>,
}

/// Witness of matrix reducibility: [[1, m], [0, 1]] · A = (B; u) with B
/// unimodular.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionCertificate {
    pub m: Vec<ModElem>,
    pub b: RMatrix,
    pub b_left_inverse: RMatrix,
    pub steps: Vec<ReductionStep>,
}

impl ReductionCertificate {
    /// Replays the move on `a` and checks the claimed output bit for bit.
    pub fn replay(&self, a: &Block) -> bool {
        let ring = a.ring();
        if self.m.len() != a.n() {
            return false;
        }
        let Ok(out) = a.left_multiply(&LeftMultiplier::unipotent(&a.module, self.m.clone())) else {
            return false;
        };
        out.matrix == self.b
            && out.functionals == a.functionals
            && (a.k() == 0 || self.b_left_inverse.mul(ring, &self.b).is_identity())
    }
}

fn reduce_rec(a: &Block, sr: usize, budget: u64, steps: &mut Vec<ReductionStep>) -> Result<Vec<ModElem>> {
    let module = a.module.clone();
    let ring = module.ring().clone();
    let (n, k) = (a.n(), a.k());
    if k == 0 || a.top_is_unimodular() {
        return Ok(vec![module.zero_elem(); n]);
    }
    if k + sr > n + 1 {
        return Err(AlgebraError::Precondition(format!("k + sr = {} exceeds n + 1 = {}", k + sr, n + 1)));
    }
    let al = is_unimodular_block(a).ok_or_else(|| AlgebraError::Precondition("block is not unimodular".into()))?;
    let m1 = al.column[0].clone();
    let c = a.eval(0, &m1);
    let mut row: Vec<Elem> = a.matrix.col(0);
    row.push(c);
    let v = shortening_vector(&ring, &row, budget)?
        .ok_or_else(|| AlgebraError::Internal("no shortening for a unimodular row".into()))?;
    let w: Vec<ModElem> = v.iter().map(|&vi| module.scale(&m1, ring.conj(vi))).collect();
    if k == 1 {
        steps.push(ReductionStep { n, k, v, pivot: None });
        return Ok(w);
    }
    let a1 = a.left_multiply(&LeftMultiplier::unipotent(&module, w.clone()))?;
    let pivot = pivot_to_e1(&ring, &a1.matrix.col(0), budget)?
        .ok_or_else(|| AlgebraError::Internal("no pivot for a unimodular column".into()))?;
    let a1 = a1.left_multiply(&LeftMultiplier::linear(&module, pivot.clone()))?;
    let mut d = RMatrix::identity(k);
    for j in 1..k {
        d.set(0, j, ring.neg(a1.matrix.get(0, j)));
    }
    let a2 = a1.right_multiply(&d)?;
    let inner = a2.sub_block(1..n, 1..k);
    steps.push(ReductionStep {
        n,
        k,
        v,
        pivot: Some(pivot.clone()),
    });
    let m_inner = reduce_rec(&inner, sr, budget, steps)?;
    let mut m2 = vec![module.zero_elem()];
    m2.extend(m_inner);
    // sequence for A_1 is m2; undo the pivot: C^{-1} · m2
    let cinv = pivot
        .inverse(&ring)
        .ok_or_else(|| AlgebraError::Internal("pivot not invertible".into()))?;
    let back = LeftMultiplier::linear(&module, cinv).then_after(&module, &LeftMultiplier::unipotent(&module, m2));
    Ok((0..n).map(|i| module.add(&w[i], &back.column[i])).collect())
}

/// Matrix reduction of a unimodular block by induction on k.
pub fn matrix_reduce(a: &Block, sr: usize, budget: u64) -> Result<ReductionCertificate> {
    if is_unimodular_block(a).is_none() {
        return Err(AlgebraError::Precondition("block is not unimodular".into()));
    }
    if a.k() + sr > a.n() + 1 {
        return Err(AlgebraError::Precondition(format!(
            "k + sr = {} exceeds n + 1 = {}",
            a.k() + sr,
            a.n() + 1
        )));
    }
    let mut steps = Vec::new();
    let m = reduce_rec(a, sr, budget, &mut steps)?;
    let out = a.left_multiply(&LeftMultiplier::unipotent(&a.module, m.clone()))?;
    let b_left_inverse = if a.k() == 0 {
        RMatrix::zeros(0, a.n())
    } else {
        out.matrix
            .left_inverse(a.ring())
            .ok_or_else(|| AlgebraError::Internal("reduced matrix is not unimodular".into()))?
    };
    Ok(ReductionCertificate {
        m,
        b: out.matrix,
        b_left_inverse,
        steps,
    })
}

/// Output of the keep-tail reduction of an (n+l)×k block.
///
/// Corollary form: [[1_n, Q, m], [0, 1_l, 0], [0, 0, 1]] · A has a unimodular
/// top n×k part `b1` and leaves the last l+1 rows unchanged. Proposition
/// form: [[1_n, 0, m], [0, 1_l, 0], [0, 0, 1]] · A has a unimodular top
/// (n+l)×k part `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeepTailCertificate {
    pub n: usize,
    pub l: usize,
    pub m: Vec<ModElem>,
    pub q: RMatrix,
    pub b1: RMatrix,
    pub b: RMatrix,
    /// Number of row absorptions performed after the full reduction.
    pub absorptions: usize,
}

impl KeepTailCertificate {
    pub fn corollary_multiplier(&self, module: &Module) -> LeftMultiplier {
        let (n, l) = (self.n, self.l);
        let mut s = RMatrix::identity(n + l);
        for i in 0..n {
            for j in 0..l {
                s.set(i, n + j, self.q.get(i, j));
            }
        }
        let mut column = self.m.clone();
        column.extend((0..l).map(|_| module.zero_elem()));
        LeftMultiplier {
            s,
            column,
            corner: Elem::ONE,
        }
    }

    pub fn proposition_multiplier(&self, module: &Module) -> LeftMultiplier {
        let mut column = self.m.clone();
        column.extend((0..self.l).map(|_| module.zero_elem()));
        LeftMultiplier::unipotent(module, column)
    }

    pub fn replay(&self, a: &Block) -> bool {
        let ring = a.ring();
        let (n, l) = (self.n, self.l);
        if a.n() != n + l || self.m.len() != n {
            return false;
        }
        let Ok(cor) = a.left_multiply(&self.corollary_multiplier(&a.module)) else {
            return false;
        };
        let Ok(prop) = a.left_multiply(&self.proposition_multiplier(&a.module)) else {
            return false;
        };
        let top = cor.sub_block(0..n, 0..a.k());
        let tail_kept = (n..n + l).all(|i| cor.matrix.row(i) == a.matrix.row(i)) && cor.functionals == a.functionals;
        top.matrix == self.b1
            && tail_kept
            && prop.matrix == self.b
            && prop.functionals == a.functionals
            && self.b1.is_left_invertible(ring)
            && self.b.is_left_invertible(ring)
    }
}

/// Keep-tail reduction of an (n+l)×k block with k + sr = n + 1 and l > 0.
pub fn reduce_keep_tail(a: &Block, n: usize, sr: usize, budget: u64) -> Result<KeepTailCertificate> {
    let module = a.module.clone();
    let ring = module.ring().clone();
    let k = a.k();
    if a.n() <= n {
        return Err(AlgebraError::Precondition("the block needs l > 0 extra rows".into()));
    }
    let l = a.n() - n;
    if k + sr != n + 1 {
        return Err(AlgebraError::Precondition(format!("k + sr = {} but n + 1 = {}", k + sr, n + 1)));
    }
    if is_unimodular_block(a).is_none() {
        return Err(AlgebraError::Precondition("block is not unimodular".into()));
    }
    let head = a.sub_block(0..n, 0..k);
    if head.top_is_unimodular() {
        let b = a.matrix.clone();
        return Ok(KeepTailCertificate {
            n,
            l,
            m: vec![module.zero_elem(); n],
            q: RMatrix::zeros(n, l),
            b1: head.matrix,
            b,
            absorptions: 0,
        });
    }
    let full = matrix_reduce(a, sr, budget)?;
    let mut c = LeftMultiplier::unipotent(&module, full.m.clone());
    let mut cur = full.b.clone();
    let free = Arc::new(Module::free(ring.clone(), 1));
    let mut absorptions = 0;
    for rows in (n + 1..=n + l).rev() {
        let last = cur.row(rows - 1).to_vec();
        let mut head_rows = RMatrix::zeros(rows - 1, k);
        for i in 0..rows - 1 {
            for j in 0..k {
                head_rows.set(i, j, cur.get(i, j));
            }
        }
        let sub = Block::new(free.clone(), head_rows, last.iter().map(|&x| vec![x]).collect())?;
        let cert = matrix_reduce(&sub, sr, budget)?;
        let total = n + l;
        let mut s = RMatrix::identity(total);
        for i in 0..rows - 1 {
            s.set(i, rows - 1, ring.conj(cert.m[i].0[0]));
        }
        let step = LeftMultiplier::linear(&module, s.clone());
        c = step.then_after(&module, &c);
        cur = s.mul(&ring, &cur);
        absorptions += 1;
    }
    let mut q = RMatrix::zeros(n, l);
    for i in 0..n {
        for j in 0..l {
            q.set(i, j, c.s.get(i, n + j));
        }
    }
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { Elem::ONE } else { Elem::ZERO };
            if c.s.get(i, j) != want {
                return Err(AlgebraError::Internal("accumulated multiplier lost its identity block".into()));
            }
        }
    }
    let m = c.column[..n].to_vec();
    let mut cert = KeepTailCertificate {
        n,
        l,
        m,
        q,
        b1: RMatrix::zeros(n, k),
        b: RMatrix::zeros(n + l, k),
        absorptions,
    };
    let cor = a.left_multiply(&cert.corollary_multiplier(&module))?;
    let prop = a.left_multiply(&cert.proposition_multiplier(&module))?;
    cert.b1 = cor.sub_block(0..n, 0..k).matrix;
    cert.b = prop.matrix;
    if !cert.replay(a) {
        return Err(AlgebraError::Internal("keep-tail certificate does not replay".into()));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{make_ring, RingSpec};

    fn gf2() -> Arc<Ring> {
        Arc::new(make_ring(&RingSpec::Zmod { n: 2 }).unwrap())
    }

    #[test]
    fn forced_single_choice_over_gf2() {
        let r = gf2();
        let m = Arc::new(Module::free(r.clone(), 1));
        let a = Block::new(m, RMatrix::from_rows(&[vec![Elem(0)]]), vec![vec![Elem(1)]]).unwrap();
        let al = is_unimodular_block(&a).unwrap();
        assert_eq!(al.column[0].0, vec![Elem(1)]);
        let cert = matrix_reduce(&a, 1, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(cert.m[0].0, vec![Elem(1)]);
        assert!(cert.replay(&a));
    }

    #[test]
    fn pivot_reaches_e1() {
        let r = Arc::new(make_ring(&RingSpec::Zmod { n: 4 }).unwrap());
        let col = [Elem(2), Elem(3), Elem(2)];
        let c = pivot_to_e1(&r, &col, 1 << 20).unwrap().unwrap();
        assert!(c.inverse(&r).is_some());
        assert_eq!(c.mul_vec(&r, &col), vec![Elem(1), Elem(0), Elem(0)]);
    }
}
