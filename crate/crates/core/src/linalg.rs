//! Exact linear algebra over a finite ring, reduced to Z/m.
//!
//! An additive map between powers of R is Z/m-linear in the coordinates of
//! its arguments, so its matrix over Z/m is read off by probing basis
//! vectors. Systems are then solved through the Howell normal form.

use crate::howell::solve_columns;
use crate::ring::{Elem, Ring};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElemSolution {
    pub particular: Vec<Elem>,
    /// Additive generators of the solution set of the homogeneous system.
    pub kernel: Vec<Vec<Elem>>,
}

/// Solves `f(x) = target` for `x ∈ R^n`, where `f` must be additive.
pub fn solve_elems<F>(ring: &Ring, n: usize, f: F, target: &[Elem]) -> Option<ElemSolution>
where
    F: Fn(&[Elem]) -> Vec<Elem>,
{
    let d = ring.dim();
    let basis = ring.basis();
    let mut columns = Vec::with_capacity(n * d);
    let mut x = vec![Elem::ZERO; n];
    for i in 0..n {
        for &b in &basis {
            x[i] = b;
            let y = f(&x);
            columns.push(flatten(ring, &y));
        }
        x[i] = Elem::ZERO;
    }
    let t = flatten(ring, target);
    let sol = solve_columns(ring.modulus(), &columns, &t)?;
    Some(ElemSolution {
        particular: unflatten(ring, &sol.particular, n),
        kernel: sol.kernel.iter().map(|k| unflatten(ring, k, n)).collect(),
    })
}

/// Additive generators of the kernel of an additive map `R^n → R^c`.
pub fn kernel_elems<F>(ring: &Ring, n: usize, c: usize, f: F) -> Vec<Vec<Elem>>
where
    F: Fn(&[Elem]) -> Vec<Elem>,
{
    solve_elems(ring, n, f, &vec![Elem::ZERO; c])
        .map(|s| s.kernel)
        .unwrap_or_default()
}

pub fn flatten(ring: &Ring, v: &[Elem]) -> Vec<u32> {
    let d = ring.dim();
    let mut out = vec![0u32; v.len() * d];
    for (i, &e) in v.iter().enumerate() {
        ring.write_coords(e, &mut out[i * d..(i + 1) * d]);
    }
    out
}

pub fn unflatten(ring: &Ring, c: &[u32], n: usize) -> Vec<Elem> {
    let d = ring.dim();
    (0..n).map(|i| ring.from_coords(&c[i * d..(i + 1) * d])).collect()
}

/// A dense matrix over a finite ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Elem>,
}

impl RMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RMatrix {
            rows,
            cols,
            data: vec![Elem::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Elem::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        RMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, ring: &Ring, other: &RMatrix) -> RMatrix {
        assert_eq!(self.cols, other.rows, "matrix shapes");
        let mut out = RMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s = ring.sum((0..self.cols).map(|l| ring.mul(self.get(i, l), other.get(l, j))));
                out.set(i, j, s);
            }
        }
        out
    }

    pub fn mul_vec(&self, ring: &Ring, v: &[Elem]) -> Vec<Elem> {
        (0..self.rows)
            .map(|i| ring.sum((0..self.cols).map(|l| ring.mul(self.get(i, l), v[l]))))
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| self.get(i, j) == if i == j { Elem::ONE } else { Elem::ZERO })
            })
    }

    /// A matrix X with X·self = 1, if one exists.
    pub fn left_inverse(&self, ring: &Ring) -> Option<RMatrix> {
        let (r, c) = (self.rows, self.cols);
        let mut out = RMatrix::zeros(c, r);
        for i in 0..c {
            let mut target = vec![Elem::ZERO; c];
            target[i] = Elem::ONE;
            let sol = solve_elems(
                ring,
                r,
                |x| {
                    (0..c)
                        .map(|j| ring.sum((0..r).map(|l| ring.mul(x[l], self.get(l, j)))))
                        .collect()
                },
                &target,
            )?;
            for (l, &v) in sol.particular.iter().enumerate() {
                out.set(i, l, v);
            }
        }
        Some(out)
    }

    /// Two-sided inverse of a square matrix; in a finite ring a one-sided
    /// inverse of a square matrix is two-sided.
    pub fn inverse(&self, ring: &Ring) -> Option<RMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let x = self.left_inverse(ring)?;
        debug_assert!(self.mul(ring, &x).is_identity());
        Some(x)
    }

    pub fn is_left_invertible(&self, ring: &Ring) -> bool {
        self.left_inverse(ring).is_some()
    }
}

/// Solves `A x = b` for a column vector `x`.
pub fn solve_linear(ring: &Ring, a: &RMatrix, b: &[Elem]) -> Option<ElemSolution> {
    assert_eq!(a.rows, b.len(), "right-hand side length");
    solve_elems(ring, a.cols, |x| a.mul_vec(ring, x), b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{make_ring, RingSpec};
    use std::collections::HashSet;

    fn z4() -> Ring {
        make_ring(&RingSpec::Zmod { n: 4 }).unwrap()
    }

    #[test]
    fn identity_system() {
        let r = z4();
        let a = RMatrix::identity(2);
        let s = solve_linear(&r, &a, &[Elem(3), Elem(1)]).unwrap();
        assert_eq!(s.particular, vec![Elem(3), Elem(1)]);
        assert!(s.kernel.iter().all(|k| k.iter().all(|&x| x == Elem::ZERO)));
    }

    #[test]
    fn doubling_over_z4() {
        let r = z4();
        let a = RMatrix::from_rows(&[vec![Elem(2)]]);
        assert!(solve_linear(&r, &a, &[Elem(1)]).is_none());
        let s = solve_linear(&r, &a, &[Elem(2)]).unwrap();
        assert_eq!(s.particular, vec![Elem(1)]);
        assert_eq!(s.kernel, vec![vec![Elem(2)]]);
    }

    fn additive_span(r: &Ring, gens: &[Vec<Elem>], n: usize) -> HashSet<Vec<Elem>> {
        let mut set = HashSet::new();
        set.insert(vec![Elem::ZERO; n]);
        let mut stack = vec![vec![Elem::ZERO; n]];
        while let Some(v) = stack.pop() {
            for g in gens {
                let w: Vec<Elem> = v.iter().zip(g).map(|(&a, &b)| r.add(a, b)).collect();
                if set.insert(w.clone()) {
                    stack.push(w);
                }
            }
        }
        set
    }

    fn check_against_enumeration(r: &Ring, a: &RMatrix, b: &[Elem]) {
        let n = a.cols;
        let mut sols = Vec::new();
        let total = r.size().pow(n as u32);
        for idx in 0..total {
            let mut t = idx;
            let x: Vec<Elem> = (0..n)
                .map(|_| {
                    let e = Elem((t % r.size()) as u16);
                    t /= r.size();
                    e
                })
                .collect();
            if a.mul_vec(r, &x) == b {
                sols.push(x);
            }
        }
        match solve_linear(r, a, b) {
            None => assert!(sols.is_empty()),
            Some(s) => {
                assert_eq!(a.mul_vec(r, &s.particular), b);
                let k = additive_span(r, &s.kernel, n);
                assert_eq!(k.len(), sols.len());
            }
        }
    }

    #[test]
    fn agrees_with_enumeration_on_noncommutative_ring() {
        let r = make_ring(&RingSpec::GroupRing {
            m: 2,
            group: crate::group::GroupSpec::Named("S3".into()),
            w1: None,
        })
        .unwrap();
        let picks = [3u16, 5, 17, 40, 63, 9];
        let a = RMatrix::from_rows(&[vec![Elem(picks[0]), Elem(picks[1])], vec![Elem(picks[2]), Elem(picks[3])]]);
        for b0 in [0u16, 1, 7] {
            check_against_enumeration(&r, &a, &[Elem(b0), Elem(picks[4])]);
        }
    }

    proptest::proptest! {
        #[test]
        fn agrees_with_enumeration_z4(entries in proptest::collection::vec(0u16..4, 4), b in proptest::collection::vec(0u16..4, 2)) {
            let r = z4();
            let a = RMatrix::from_rows(&[vec![Elem(entries[0]), Elem(entries[1])], vec![Elem(entries[2]), Elem(entries[3])]]);
            let b: Vec<Elem> = b.into_iter().map(Elem).collect();
            check_against_enumeration(&r, &a, &b);
        }

        #[test]
        fn agrees_with_enumeration_z3_c2_twisted(entries in proptest::collection::vec(0u16..9, 3), b in 0u16..9) {
            let r = make_ring(&RingSpec::GroupRing { m: 3, group: crate::group::GroupSpec::Named("C2".into()), w1: Some(vec![1, -1]) }).unwrap();
            let a = RMatrix::from_rows(&[vec![Elem(entries[0]), Elem(entries[1]), Elem(entries[2])]]);
            check_against_enumeration(&r, &a, &[Elem(b)]);
        }
    }
}
