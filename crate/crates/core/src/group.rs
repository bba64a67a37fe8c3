//! Small finite groups given by multiplication tables.

use crate::error::{AlgebraError, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    /// One of `C1`..`C8`, `V4`, `C2xC4`, `C2xC2xC2`, `S3`, `D4`, `Q8`.
    Named(String),
    /// Multiplication table; element 0 must be the identity.
    Table(Vec<Vec<usize>>),
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    pub fn from_table(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(AlgebraError::InvalidParameter("malformed group table".into()));
        }
        let table: Vec<usize> = rows.into_iter().flatten().collect();
        let mul = |a: usize, b: usize| table[a * n + b];
        for a in 0..n {
            if mul(0, a) != a || mul(a, 0) != a {
                return Err(AlgebraError::InvalidParameter(
                    "group element 0 is not the identity".into(),
                ));
            }
            for b in 0..n {
                for c in 0..n {
                    if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                        return Err(AlgebraError::InvalidParameter(
                            "group table not associative".into(),
                        ));
                    }
                }
            }
        }
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if mul(a, b) == 0 {
                    inverse[a] = b;
                }
            }
            if inverse[a] == usize::MAX || mul(inverse[a], a) != 0 {
                return Err(AlgebraError::InvalidParameter(
                    "group table lacks inverses".into(),
                ));
            }
        }
        Ok(FiniteGroup {
            order: n,
            table,
            inverse,
        })
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        match spec {
            GroupSpec::Table(t) => Self::from_table(t.clone()),
            GroupSpec::Named(name) => Self::named(name),
        }
    }

    pub fn named(name: &str) -> Result<Self> {
        let perms: Vec<Vec<usize>> = match name {
            "C1" => return Self::from_table(vec![vec![0]]),
            "V4" | "C2xC2" => return Self::cyclic_product(&[2, 2]),
            "C2xC4" => return Self::cyclic_product(&[2, 4]),
            "C2xC2xC2" => return Self::cyclic_product(&[2, 2, 2]),
            "S3" => vec![vec![1, 2, 0], vec![1, 0, 2]],
            "D4" => vec![vec![1, 2, 3, 0], vec![0, 3, 2, 1]],
            "Q8" => return Self::quaternion(),
            _ => {
                if let Some(k) = name.strip_prefix('C').and_then(|s| s.parse::<usize>().ok()) {
                    if (1..=8).contains(&k) {
                        return Self::cyclic_product(&[k]);
                    }
                }
                return Err(AlgebraError::InvalidParameter(format!(
                    "unknown group {name}"
                )));
            }
        };
        Self::from_permutations(&perms)
    }

    fn cyclic_product(orders: &[usize]) -> Result<Self> {
        let n: usize = orders.iter().product();
        let decode = |mut x: usize| -> Vec<usize> {
            orders
                .iter()
                .map(|&o| {
                    let d = x % o;
                    x /= o;
                    d
                })
                .collect()
        };
        let encode = |v: &[usize]| -> usize {
            let mut x = 0;
            for (i, &o) in orders.iter().enumerate().rev() {
                x = x * o + v[i];
            }
            x
        };
        let rows = (0..n)
            .map(|a| {
                let da = decode(a);
                (0..n)
                    .map(|b| {
                        let db = decode(b);
                        let s: Vec<usize> = (0..orders.len())
                            .map(|i| (da[i] + db[i]) % orders[i])
                            .collect();
                        encode(&s)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(rows)
    }

    fn from_permutations(gens: &[Vec<usize>]) -> Result<Self> {
        let deg = gens[0].len();
        let id: Vec<usize> = (0..deg).collect();
        let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { b.iter().map(|&i| a[i]).collect() };
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        index.insert(id, 0);
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let p = compose(&elems[i], g);
                if !index.contains_key(&p) {
                    index.insert(p.clone(), elems.len());
                    elems.push(p);
                }
            }
            i += 1;
        }
        let rows = elems
            .iter()
            .map(|a| elems.iter().map(|b| index[&compose(a, b)]).collect())
            .collect();
        Self::from_table(rows)
    }

    fn quaternion() -> Result<Self> {
        // elements (sign, unit) with unit 0=1, 1=i, 2=j, 3=k
        let unit_mul = |a: usize, b: usize| -> (bool, usize) {
            match (a, b) {
                (0, x) | (x, 0) => (false, x),
                (x, y) if x == y => (true, 0),
                (1, 2) => (false, 3),
                (2, 1) => (true, 3),
                (2, 3) => (false, 1),
                (3, 2) => (true, 1),
                (3, 1) => (false, 2),
                (1, 3) => (true, 2),
                _ => unreachable!(),
            }
        };
        let rows = (0..8)
            .map(|a| {
                (0..8)
                    .map(|b| {
                        let (sa, ua) = (a / 4 == 1, a % 4);
                        let (sb, ub) = (b / 4 == 1, b % 4);
                        let (s, u) = unit_mul(ua, ub);
                        ((sa ^ sb ^ s) as usize) * 4 + u
                    })
                    .collect()
            })
            .collect();
        Self::from_table(rows)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_orders() {
        for (n, k) in [("C2", 2), ("C8", 8), ("V4", 4), ("S3", 6), ("D4", 8), ("Q8", 8)] {
            assert_eq!(FiniteGroup::named(n).unwrap().order(), k);
        }
    }

    #[test]
    fn s3_is_nonabelian() {
        let g = FiniteGroup::named("S3").unwrap();
        let abelian = (0..6).all(|a| (0..6).all(|b| g.mul(a, b) == g.mul(b, a)));
        assert!(!abelian);
    }
}
