//! Howell normal form over Z/m and exact linear solving built on it.
//!
//! Rows are vectors over Z/m with entries in `0..m`. The Howell form of a
//! generating set is an echelon basis of the spanned submodule for which
//! reduction by pivots yields a unique representative of every coset.

fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, s, t) = xgcd(b, a % b);
        (g, t, s - (a / b) * t)
    }
}

pub fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Echelon basis of a submodule of (Z/m)^ncols with the Howell property.
#[derive(Clone, Debug)]
pub struct HowellBasis {
    modulus: u32,
    ncols: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<(usize, u32)>,
}

impl HowellBasis {
    pub fn new<I>(modulus: u32, ncols: usize, gens: I) -> Self
    where
        I: IntoIterator<Item = Vec<u32>>,
    {
        let m = modulus as i64;
        let mut work: Vec<Vec<u32>> = gens
            .into_iter()
            .map(|mut r| {
                debug_assert_eq!(r.len(), ncols);
                for x in r.iter_mut() {
                    *x %= modulus;
                }
                r
            })
            .filter(|r| r.iter().any(|&x| x != 0))
            .collect();
        let mut rows: Vec<Vec<u32>> = Vec::new();
        let mut pivots = Vec::new();
        for col in 0..ncols {
            let mut pivot: Option<Vec<u32>> = None;
            let mut rest = Vec::with_capacity(work.len());
            for row in work.drain(..) {
                if row[col] == 0 {
                    rest.push(row);
                    continue;
                }
                match pivot.take() {
                    None => pivot = Some(row),
                    Some(p) => {
                        let a = p[col] as i64;
                        let b = row[col] as i64;
                        let (g, s, t) = xgcd(a, b);
                        let (ag, bg) = (a / g, b / g);
                        let mut np = vec![0u32; ncols];
                        let mut nr = vec![0u32; ncols];
                        for j in col..ncols {
                            let x = p[j] as i64;
                            let y = row[j] as i64;
                            np[j] = (s * x + t * y).rem_euclid(m) as u32;
                            nr[j] = (bg * x - ag * y).rem_euclid(m) as u32;
                        }
                        if nr.iter().any(|&x| x != 0) {
                            rest.push(nr);
                        }
                        pivot = Some(np);
                    }
                }
            }
            if let Some(mut p) = pivot {
                let a = p[col];
                let g = gcd(a, modulus);
                if a != g {
                    let u = unit_scaling(a, g, modulus);
                    for x in p.iter_mut().skip(col) {
                        *x = ((*x as u64 * u as u64) % modulus as u64) as u32;
                    }
                }
                let ann = modulus / g;
                if ann != modulus {
                    let extra: Vec<u32> = p
                        .iter()
                        .map(|&x| ((x as u64 * ann as u64) % modulus as u64) as u32)
                        .collect();
                    if extra.iter().any(|&x| x != 0) {
                        rest.push(extra);
                    }
                }
                pivots.push((col, p[col]));
                rows.push(p);
            }
            work = rest;
        }
        for i in 0..rows.len() {
            let (c, d) = pivots[i];
            let (head, tail) = rows.split_at_mut(i);
            let pr = &tail[0];
            for r in head.iter_mut() {
                let q = r[c] / d;
                if q != 0 {
                    sub_scaled(r, pr, q, modulus);
                }
            }
        }
        HowellBasis {
            modulus,
            ncols,
            rows,
            pivots,
        }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Pivot column and pivot value of each row.
    pub fn pivots(&self) -> &[(usize, u32)] {
        &self.pivots
    }

    /// Reduces `v` in place to the canonical representative of `v + span`.
    pub fn reduce(&self, v: &mut [u32]) {
        for (row, &(c, d)) in self.rows.iter().zip(&self.pivots) {
            let q = v[c] / d;
            if q != 0 {
                sub_scaled(v, row, q, self.modulus);
            }
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Number of elements of the spanned submodule.
    pub fn span_size(&self) -> u128 {
        self.pivots
            .iter()
            .map(|&(_, d)| (self.modulus / d) as u128)
            .product()
    }

    /// For each column, the number of values a canonical representative can
    /// take there.
    pub fn radix(&self) -> Vec<u32> {
        let mut r = vec![self.modulus; self.ncols];
        for &(c, d) in &self.pivots {
            r[c] = d;
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }
}

fn sub_scaled(v: &mut [u32], row: &[u32], q: u32, m: u32) {
    let m64 = m as u64;
    for (x, &y) in v.iter_mut().zip(row) {
        if y != 0 {
            let t = (q as u64 * y as u64) % m64;
            *x = ((*x as u64 + m64 - t) % m64) as u32;
        }
    }
}

fn unit_scaling(a: u32, g: u32, m: u32) -> u32 {
    (1..m)
        .find(|&u| gcd(u, m) == 1 && (u as u64 * a as u64) % m as u64 == g as u64)
        .expect("a unit multiple of a reaches gcd(a, m)")
}

/// Solution set of a linear system over Z/m.
#[derive(Clone, Debug)]
pub struct ZSolution {
    pub particular: Vec<u32>,
    /// Generators of the solution space of the homogeneous system.
    pub kernel: Vec<Vec<u32>>,
}

/// Solves `sum_i x_i * columns[i] = target` over Z/m.
pub fn solve_columns(modulus: u32, columns: &[Vec<u32>], target: &[u32]) -> Option<ZSolution> {
    let c = target.len();
    let u = columns.len();
    let rows = columns.iter().enumerate().map(|(i, col)| {
        let mut r = vec![0u32; c + u];
        r[..c].copy_from_slice(col);
        r[c + i] = 1;
        r
    });
    let h = HowellBasis::new(modulus, c + u, rows);
    let mut v = vec![0u32; c + u];
    for (x, &t) in v.iter_mut().zip(target) {
        *x = t % modulus;
    }
    let mut kernel = Vec::new();
    for (row, &(pc, d)) in h.rows.iter().zip(&h.pivots) {
        if pc < c {
            let q = v[pc] / d;
            if q != 0 {
                sub_scaled(&mut v, row, q, modulus);
            }
        } else {
            kernel.push(row[c..].to_vec());
        }
    }
    if v[..c].iter().any(|&x| x != 0) {
        return None;
    }
    let particular = v[c..]
        .iter()
        .map(|&y| (modulus - y) % modulus)
        .collect();
    Some(ZSolution { particular, kernel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn span(m: u32, n: usize, gens: &[Vec<u32>]) -> HashSet<Vec<u32>> {
        let mut set: HashSet<Vec<u32>> = HashSet::new();
        set.insert(vec![0; n]);
        let mut frontier = vec![vec![0; n]];
        while let Some(v) = frontier.pop() {
            for g in gens {
                let w: Vec<u32> = v.iter().zip(g).map(|(a, b)| (a + b) % m).collect();
                if set.insert(w.clone()) {
                    frontier.push(w);
                }
            }
        }
        set
    }

    #[test]
    fn howell_z4_single() {
        let h = HowellBasis::new(4, 2, vec![vec![2, 1]]);
        assert_eq!(h.rows(), &[vec![2, 1], vec![0, 2]]);
        assert_eq!(h.span_size(), 4);
    }

    #[test]
    fn solve_z4_examples() {
        assert!(solve_columns(4, &[vec![2]], &[1]).is_none());
        let s = solve_columns(4, &[vec![2]], &[2]).unwrap();
        assert_eq!(s.particular, vec![1]);
        assert_eq!(s.kernel, vec![vec![2]]);
    }

    proptest::proptest! {
        #[test]
        fn reduction_is_canonical(
            m in 2u32..13,
            raw in proptest::collection::vec(proptest::collection::vec(0u32..13, 3), 0..4),
            probe in proptest::collection::vec(0u32..13, 3),
        ) {
            let gens: Vec<Vec<u32>> = raw.iter().map(|r| r.iter().map(|x| x % m).collect()).collect();
            let h = HowellBasis::new(m, 3, gens.clone());
            let s = span(m, 3, &gens);
            proptest::prop_assert_eq!(h.span_size() as usize, s.len());
            let probe: Vec<u32> = probe.iter().map(|x| x % m).collect();
            let mut red = probe.clone();
            h.reduce(&mut red);
            for t in &s {
                let mut w: Vec<u32> = probe.iter().zip(t).map(|(a, b)| (a + b) % m).collect();
                h.reduce(&mut w);
                proptest::prop_assert_eq!(&w, &red);
            }
            let diff: Vec<u32> = probe.iter().zip(&red).map(|(a, b)| (a + m - b) % m).collect();
            proptest::prop_assert!(s.contains(&diff));
        }

        #[test]
        fn solver_matches_enumeration(
            m in 2u32..9,
            cols in proptest::collection::vec(proptest::collection::vec(0u32..9, 2), 1..4),
            target in proptest::collection::vec(0u32..9, 2),
        ) {
            let cols: Vec<Vec<u32>> = cols.iter().map(|r| r.iter().map(|x| x % m).collect()).collect();
            let target: Vec<u32> = target.iter().map(|x| x % m).collect();
            let u = cols.len();
            let eval = |x: &[u32]| -> Vec<u32> {
                (0..2).map(|j| x.iter().zip(&cols).map(|(a, c)| a * c[j]).sum::<u32>() % m).collect()
            };
            let mut brute_solutions = Vec::new();
            let total = (m as usize).pow(u as u32);
            for idx in 0..total {
                let mut x = vec![0u32; u];
                let mut t = idx;
                for xi in x.iter_mut() { *xi = (t % m as usize) as u32; t /= m as usize; }
                if eval(&x) == target { brute_solutions.push(x); }
            }
            match solve_columns(m, &cols, &target) {
                None => proptest::prop_assert!(brute_solutions.is_empty()),
                Some(sol) => {
                    proptest::prop_assert_eq!(eval(&sol.particular), target.clone());
                    let k = span(m, u, &sol.kernel);
                    for x in &brute_solutions {
                        let d: Vec<u32> = x.iter().zip(&sol.particular).map(|(a, b)| (a + m - b) % m).collect();
                        proptest::prop_assert!(k.contains(&d));
                    }
                    proptest::prop_assert_eq!(k.len(), brute_solutions.len());
                }
            }
        }
    }
}
