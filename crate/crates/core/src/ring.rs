//! Finite rings with anti-involution, tabulated in full.
//!
//! Every supported ring is a free Z/m-module of some rank d, and an element's
//! index is the base-m number formed by its coordinates. So the zero element
//! has index 0 and the identity has index 1 for every kind.

use crate::error::{AlgebraError, Result};
use crate::group::{FiniteGroup, GroupSpec};
use serde::{Deserialize, Serialize};
use std::fmt;

pub const DEFAULT_RING_CAP: usize = 256;

#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub u16);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Involution {
    #[default]
    Identity,
    /// x ↦ x^p on GF(p²).
    Frobenius,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RingSpec {
    Zmod {
        n: u32,
    },
    Gf {
        q: u32,
        #[serde(default)]
        involution: Involution,
    },
    GroupRing {
        m: u32,
        group: GroupSpec,
        #[serde(default)]
        w1: Option<Vec<i8>>,
    },
}

impl RingSpec {
    pub fn label(&self) -> String {
        match self {
            RingSpec::Zmod { n } => format!("Z/{n}"),
            RingSpec::Gf { q, involution } => match involution {
                Involution::Identity => format!("GF({q})"),
                Involution::Frobenius => format!("GF({q})frob"),
            },
            RingSpec::GroupRing { m, group, w1 } => {
                let g = match group {
                    GroupSpec::Named(s) => s.clone(),
                    GroupSpec::Table(t) => format!("G{}", t.len()),
                };
                match w1 {
                    Some(w) if w.iter().any(|&s| s < 0) => {
                        let signs: String =
                            w.iter().map(|&s| if s < 0 { '-' } else { '+' }).collect();
                        format!("(Z/{m})[{g}]w{signs}")
                    }
                    _ => format!("(Z/{m})[{g}]"),
                }
            }
        }
    }
}

/// A finite ring with anti-involution, all operations tabulated.
pub struct Ring {
    spec: RingSpec,
    label: String,
    size: usize,
    modulus: u32,
    dim: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    conj: Vec<u16>,
    inv: Vec<u16>,
    units: Vec<Elem>,
    principal: Vec<Vec<u64>>,
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({})", self.label)
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

const NO_INV: u16 = u16::MAX;

pub fn make_ring(spec: &RingSpec) -> Result<Ring> {
    make_ring_with_cap(spec, DEFAULT_RING_CAP)
}

pub fn make_ring_with_cap(spec: &RingSpec, cap: usize) -> Result<Ring> {
    let (modulus, dim, mulfn, conjfn): (u32, usize, Box<dyn Fn(&[u32], &[u32]) -> Vec<u32>>, Box<dyn Fn(&[u32]) -> Vec<u32>>) =
        match spec {
            RingSpec::Zmod { n } => {
                if *n < 2 {
                    return Err(AlgebraError::InvalidParameter("n must be at least 2".into()));
                }
                let n = *n;
                (
                    n,
                    1,
                    Box::new(move |a, b| vec![(a[0] * b[0]) % n]),
                    Box::new(|a| a.to_vec()),
                )
            }
            RingSpec::Gf { q, involution } => {
                let (p, k) = prime_power(*q).ok_or_else(|| {
                    AlgebraError::InvalidParameter(format!("{q} is not a prime power"))
                })?;
                if *q > 9 {
                    return Err(AlgebraError::InvalidParameter(format!(
                        "GF({q}) exceeds the supported q <= 9"
                    )));
                }
                let modpoly = irreducible(p, k);
                let mp = modpoly.clone();
                let mul = move |a: &[u32], b: &[u32]| poly_mulmod(a, b, &mp, p);
                let conj: Box<dyn Fn(&[u32]) -> Vec<u32>> = match involution {
                    Involution::Identity => Box::new(|a| a.to_vec()),
                    Involution::Frobenius => {
                        if k != 2 {
                            return Err(AlgebraError::InvalidParameter(
                                "Frobenius involution needs q = p^2".into(),
                            ));
                        }
                        let mp = modpoly.clone();
                        Box::new(move |a| {
                            let mut r = vec![0u32; k];
                            r[0] = 1;
                            for _ in 0..p {
                                r = poly_mulmod(&r, a, &mp, p);
                            }
                            r
                        })
                    }
                };
                (p, k, Box::new(mul), conj)
            }
            RingSpec::GroupRing { m, group, w1 } => {
                if *m < 2 {
                    return Err(AlgebraError::InvalidParameter("m must be at least 2".into()));
                }
                let g = FiniteGroup::from_spec(group)?;
                if g.order() > 8 {
                    return Err(AlgebraError::InvalidParameter(
                        "group order above 8".into(),
                    ));
                }
                let n = g.order();
                let w: Vec<i8> = w1.clone().unwrap_or_else(|| vec![1; n]);
                if w.len() != n || w.iter().any(|&s| s != 1 && s != -1) {
                    return Err(AlgebraError::InvalidParameter(
                        "w1 must list +1 or -1 for each group element".into(),
                    ));
                }
                for a in 0..n {
                    for b in 0..n {
                        if w[g.mul(a, b)] != w[a] * w[b] {
                            return Err(AlgebraError::Involution(
                                "w1 is not a homomorphism".into(),
                            ));
                        }
                    }
                }
                let m = *m;
                let g2 = g.clone();
                let mul = move |a: &[u32], b: &[u32]| {
                    let mut r = vec![0u32; n];
                    for (i, &x) in a.iter().enumerate() {
                        if x == 0 {
                            continue;
                        }
                        for (j, &y) in b.iter().enumerate() {
                            let k = g2.mul(i, j);
                            r[k] = (r[k] + x * y) % m;
                        }
                    }
                    r
                };
                let conj = move |a: &[u32]| {
                    let mut r = vec![0u32; n];
                    for (i, &x) in a.iter().enumerate() {
                        let k = g.inv(i);
                        r[k] = if w[i] > 0 { x } else { (m - x) % m };
                    }
                    r
                };
                (m, n, Box::new(mul), Box::new(conj))
            }
        };
    let size_big = (modulus as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    if size_big > cap as u128 {
        return Err(AlgebraError::RingTooLarge {
            size: size_big.min(usize::MAX as u128) as usize,
            cap,
        });
    }
    let size = size_big as usize;
    let coords: Vec<Vec<u32>> = (0..size).map(|i| digits(i, modulus, dim)).collect();
    let encode = |c: &[u32]| -> u16 {
        let mut x = 0usize;
        for &d in c.iter().rev() {
            x = x * modulus as usize + d as usize;
        }
        x as u16
    };
    let mut add = vec![0u16; size * size];
    let mut mul = vec![0u16; size * size];
    for a in 0..size {
        for b in 0..size {
            let s: Vec<u32> = coords[a]
                .iter()
                .zip(&coords[b])
                .map(|(x, y)| (x + y) % modulus)
                .collect();
            add[a * size + b] = encode(&s);
            mul[a * size + b] = encode(&mulfn(&coords[a], &coords[b]));
        }
    }
    let neg: Vec<u16> = (0..size)
        .map(|a| {
            let c: Vec<u32> = coords[a].iter().map(|&x| (modulus - x) % modulus).collect();
            encode(&c)
        })
        .collect();
    let conj: Vec<u16> = (0..size).map(|a| encode(&conjfn(&coords[a]))).collect();
    let mut inv = vec![NO_INV; size];
    for a in 0..size {
        for b in 0..size {
            if mul[a * size + b] == 1 && mul[b * size + a] == 1 {
                inv[a] = b as u16;
                break;
            }
        }
    }
    let units = (0..size)
        .filter(|&a| inv[a] != NO_INV)
        .map(|a| Elem(a as u16))
        .collect();
    let words = size.div_ceil(64);
    let principal = (0..size)
        .map(|r| {
            let mut bits = vec![0u64; words];
            for a in 0..size {
                let x = mul[a * size + r] as usize;
                bits[x / 64] |= 1 << (x % 64);
            }
            bits
        })
        .collect();
    let ring = Ring {
        label: spec.label(),
        spec: spec.clone(),
        size,
        modulus,
        dim,
        add,
        mul,
        neg,
        conj,
        inv,
        units,
        principal,
    };
    ring.validate()?;
    Ok(ring)
}

fn digits(mut x: usize, m: u32, d: usize) -> Vec<u32> {
    (0..d)
        .map(|_| {
            let r = (x % m as usize) as u32;
            x /= m as usize;
            r
        })
        .collect()
}

fn prime_power(q: u32) -> Option<(u32, usize)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut k = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

/// Monic irreducible polynomial of degree k over F_p, lowest coefficients
/// first; the first one found in lexicographic order.
fn irreducible(p: u32, k: usize) -> Vec<u32> {
    if k == 1 {
        return vec![0, 1];
    }
    let count = (p as usize).pow(k as u32);
    for idx in 0..count {
        let mut f = digits(idx, p, k);
        f.push(1);
        // degree at most 3 here, so irreducible iff no root
        let has_root = (0..p).any(|x| {
            let mut acc = 0u32;
            for &c in f.iter().rev() {
                acc = (acc * x + c) % p;
            }
            acc == 0
        });
        if !has_root {
            return f;
        }
    }
    unreachable!("an irreducible polynomial exists in every degree")
}

fn poly_mulmod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    let k = f.len() - 1;
    let mut prod = vec![0u32; 2 * k];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for deg in (k..prod.len()).rev() {
        let c = prod[deg];
        if c != 0 {
            for t in 0..=k {
                let idx = deg - k + t;
                prod[idx] = (prod[idx] + (p - c) * f[t] % p) % p;
            }
        }
    }
    prod.truncate(k);
    prod
}

impl Ring {
    fn validate(&self) -> Result<()> {
        let n = self.size;
        let one = Elem::ONE;
        for a in self.elements() {
            if self.mul(one, a) != a || self.mul(a, one) != a {
                return Err(AlgebraError::RingAxiom(format!("1 is not an identity at {a}")));
            }
            if self.add(a, self.neg(a)) != Elem::ZERO {
                return Err(AlgebraError::RingAxiom(format!("negation fails at {a}")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let (ea, eb) = (Elem(a as u16), Elem(b as u16));
                if self.add(ea, eb) != self.add(eb, ea) {
                    return Err(AlgebraError::RingAxiom("addition not commutative".into()));
                }
                for c in 0..n {
                    let ec = Elem(c as u16);
                    if self.mul(self.mul(ea, eb), ec) != self.mul(ea, self.mul(eb, ec)) {
                        return Err(AlgebraError::RingAxiom(format!(
                            "multiplication not associative at ({a},{b},{c})"
                        )));
                    }
                    if self.add(self.add(ea, eb), ec) != self.add(ea, self.add(eb, ec)) {
                        return Err(AlgebraError::RingAxiom("addition not associative".into()));
                    }
                    let bc = self.add(eb, ec);
                    if self.mul(ea, bc) != self.add(self.mul(ea, eb), self.mul(ea, ec))
                        || self.mul(bc, ea) != self.add(self.mul(eb, ea), self.mul(ec, ea))
                    {
                        return Err(AlgebraError::RingAxiom(format!(
                            "distributivity fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        self.validate_involution()
    }

    /// Exhaustive check of the involution laws.
    pub fn validate_involution(&self) -> Result<()> {
        for a in self.elements() {
            if self.conj(self.conj(a)) != a {
                return Err(AlgebraError::Involution(format!(
                    "conj(conj({a})) != {a}"
                )));
            }
            for b in self.elements() {
                if self.conj(self.add(a, b)) != self.add(self.conj(a), self.conj(b)) {
                    return Err(AlgebraError::Involution(format!(
                        "conj not additive at ({a},{b})"
                    )));
                }
                if self.conj(self.mul(a, b)) != self.mul(self.conj(b), self.conj(a)) {
                    return Err(AlgebraError::Involution(format!(
                        "conj does not reverse the product ({a},{b})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// The base Z/m over which the ring is free.
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Rank of the ring as a free Z/m-module.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.size as u16).map(Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.add[a.index() * self.size + b.index()])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.mul[a.index() * self.size + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.index()])
    }

    #[inline]
    pub fn conj(&self, a: Elem) -> Elem {
        Elem(self.conj[a.index()])
    }

    pub fn inv(&self, a: Elem) -> Option<Elem> {
        let i = self.inv[a.index()];
        (i != NO_INV).then_some(Elem(i))
    }

    pub fn is_unit(&self, a: Elem) -> bool {
        self.inv[a.index()] != NO_INV
    }

    pub fn units(&self) -> &[Elem] {
        &self.units
    }

    pub fn mul3(&self, a: Elem, b: Elem, c: Elem) -> Elem {
        self.mul(self.mul(a, b), c)
    }

    pub fn sum<I: IntoIterator<Item = Elem>>(&self, it: I) -> Elem {
        it.into_iter().fold(Elem::ZERO, |acc, x| self.add(acc, x))
    }

    /// The image of an integer in the ring.
    pub fn from_int(&self, k: i64) -> Elem {
        let m = self.modulus as i64;
        let mut c = vec![0u32; self.dim];
        c[0] = k.rem_euclid(m) as u32;
        self.from_coords(&c)
    }

    pub fn is_central(&self, a: Elem) -> bool {
        self.elements().all(|b| self.mul(a, b) == self.mul(b, a))
    }

    pub fn is_commutative(&self) -> bool {
        self.elements().all(|a| self.is_central(a))
    }

    pub fn coords(&self, a: Elem) -> Vec<u32> {
        digits(a.index(), self.modulus, self.dim)
    }

    pub fn write_coords(&self, a: Elem, out: &mut [u32]) {
        let mut x = a.index();
        for o in out.iter_mut().take(self.dim) {
            *o = (x % self.modulus as usize) as u32;
            x /= self.modulus as usize;
        }
    }

    pub fn from_coords(&self, c: &[u32]) -> Elem {
        let mut x = 0usize;
        for &d in c[..self.dim].iter().rev() {
            x = x * self.modulus as usize + (d % self.modulus) as usize;
        }
        Elem(x as u16)
    }

    /// The Z/m-basis elements of the ring (coordinate unit vectors).
    pub fn basis(&self) -> Vec<Elem> {
        (0..self.dim)
            .map(|i| {
                let mut c = vec![0u32; self.dim];
                c[i] = 1;
                self.from_coords(&c)
            })
            .collect()
    }

    /// Whether the left ideal generated by `row` is the whole ring, i.e.
    /// some left combination of the entries equals 1.
    pub fn is_unimodular_row(&self, row: &[Elem]) -> bool {
        match row {
            [] => false,
            [a] => self.is_unit(*a),
            _ => {
                if row.iter().any(|&a| self.is_unit(a)) {
                    return true;
                }
                let mut acc = self.principal[row[0].index()].clone();
                for &r in &row[1..] {
                    acc = self.ideal_sum(&acc, &self.principal[r.index()]);
                    if acc[0] & 2 != 0 {
                        return true;
                    }
                }
                acc[0] & 2 != 0
            }
        }
    }

    fn ideal_sum(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; a.len()];
        let members = |bits: &[u64]| -> Vec<usize> {
            (0..self.size)
                .filter(|&i| bits[i / 64] >> (i % 64) & 1 == 1)
                .collect()
        };
        let ma = members(a);
        let mb = members(b);
        for &x in &ma {
            for &y in &mb {
                let s = self.add[x * self.size + y] as usize;
                out[s / 64] |= 1 << (s % 64);
            }
        }
        out
    }

    /// Coefficients `a` with sum a_i·row_i = 1, if any.
    pub fn row_left_inverse(&self, row: &[Elem]) -> Option<Vec<Elem>> {
        crate::linalg::solve_elems(self, row.len(), |x| vec![self.sum(x.iter().zip(row).map(|(&a, &r)| self.mul(a, r)))], &[Elem::ONE])
            .map(|s| s.particular)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rings() {
        let z4 = make_ring(&RingSpec::Zmod { n: 4 }).unwrap();
        assert_eq!(z4.size(), 4);
        let gf2 = make_ring(&RingSpec::Gf { q: 2, involution: Involution::Identity }).unwrap();
        assert_eq!(gf2.size(), 2);
        assert!(gf2.elements().all(|a| gf2.conj(a) == a));
        let c2 = make_ring(&RingSpec::GroupRing {
            m: 2,
            group: GroupSpec::Named("C2".into()),
            w1: Some(vec![1, 1]),
        })
        .unwrap();
        assert_eq!(c2.size(), 4);
        assert!(c2.elements().all(|a| c2.conj(a) == a));
    }

    #[test]
    fn fields_are_fields() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let r = make_ring(&RingSpec::Gf { q, involution: Involution::Identity }).unwrap();
            assert_eq!(r.size(), q as usize);
            assert_eq!(r.units().len(), q as usize - 1);
        }
    }

    #[test]
    fn frobenius_on_gf4() {
        let r = make_ring(&RingSpec::Gf { q: 4, involution: Involution::Frobenius }).unwrap();
        let moved = r.elements().filter(|&a| r.conj(a) != a).count();
        assert_eq!(moved, 2);
        assert!(make_ring(&RingSpec::Gf { q: 8, involution: Involution::Frobenius }).is_err());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(make_ring(&RingSpec::Gf { q: 6, involution: Involution::Identity }).is_err());
        assert!(make_ring(&RingSpec::Zmod { n: 1 }).is_err());
        let bad_w1 = RingSpec::GroupRing {
            m: 2,
            group: GroupSpec::Named("C3".into()),
            w1: Some(vec![1, -1, -1]),
        };
        assert!(matches!(make_ring(&bad_w1), Err(AlgebraError::Involution(_))));
        assert!(matches!(
            make_ring_with_cap(&RingSpec::Zmod { n: 300 }, 256),
            Err(AlgebraError::RingTooLarge { .. })
        ));
    }

    #[test]
    fn twisted_group_ring_involution() {
        let r = make_ring(&RingSpec::GroupRing {
            m: 3,
            group: GroupSpec::Named("C2".into()),
            w1: Some(vec![1, -1]),
        })
        .unwrap();
        // g has index 3 (coordinates (0,1)); conj(g) = -g
        let g = r.from_coords(&[0, 1]);
        assert_eq!(r.conj(g), r.neg(g));
    }

    #[test]
    fn nonabelian_group_ring() {
        let r = make_ring(&RingSpec::GroupRing {
            m: 2,
            group: GroupSpec::Named("S3".into()),
            w1: None,
        })
        .unwrap();
        assert_eq!(r.size(), 64);
        assert!(!r.is_commutative());
    }

    #[test]
    fn unimodular_rows_z4() {
        let r = make_ring(&RingSpec::Zmod { n: 4 }).unwrap();
        assert!(!r.is_unimodular_row(&[Elem(2), Elem(0)]));
        assert!(r.is_unimodular_row(&[Elem(2), Elem(1)]));
        let a = r.row_left_inverse(&[Elem(2), Elem(3)]).unwrap();
        assert_eq!(r.add(r.mul(a[0], Elem(2)), r.mul(a[1], Elem(3))), Elem::ONE);
    }
}
