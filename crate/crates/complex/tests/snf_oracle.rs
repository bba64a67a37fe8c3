use num_bigint::BigInt;
use proptest::prelude::*;
use wittlab_complex::snf::{smith_invariants, SparseRows};

fn det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|b| b.count_ones() as usize == k)
        .map(|b| (0..n).filter(|i| b >> i & 1 == 1).collect())
        .collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

/// Invariant factors from gcds of k × k minors.
fn oracle(m: &[Vec<i64>]) -> (usize, Vec<i64>) {
    let (r, c) = (m.len(), m.first().map_or(0, Vec::len));
    let mut divisors = vec![1i64];
    for k in 1..=r.min(c) {
        let mut g = 0;
        for rows in subsets(r, k) {
            for cols in subsets(c, k) {
                let sub: Vec<Vec<i64>> = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j]).collect()).collect();
                g = gcd(g, det(&sub));
            }
        }
        if g == 0 {
            break;
        }
        divisors.push(g);
    }
    let factors: Vec<i64> = divisors.windows(2).map(|w| w[1] / w[0]).filter(|&f| f > 1).collect();
    (divisors.len() - 1, factors)
}

fn sparse(m: &[Vec<i64>], ncols: usize) -> SparseRows {
    let mut s = SparseRows::new(ncols);
    for r in m {
        s.rows.push(r.iter().enumerate().filter(|&(_, &x)| x != 0).map(|(c, &x)| (c as u32, x)).collect());
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_determinantal_divisors(
        (c, entries) in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| (Just(c), prop::collection::vec(-4i64..=4, r * c)))
    ) {
        let m: Vec<Vec<i64>> = entries.chunks(c).map(<[i64]>::to_vec).collect();
        let (rank, factors) = oracle(&m);
        let got = smith_invariants(&sparse(&m, c)).unwrap();
        prop_assert_eq!(got.rank, rank);
        let want: Vec<BigInt> = factors.into_iter().map(BigInt::from).collect();
        prop_assert_eq!(got.torsion, want);
    }
}
