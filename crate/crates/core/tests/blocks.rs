use proptest::prelude::*;
use std::sync::Arc;
use wittlab_core::block::{is_unimodular_block, is_unimodular_block_brute, matrix_reduce, reduce_keep_tail, Block};
use wittlab_core::ring::make_ring;
use wittlab_core::stable_rank::DEFAULT_BUDGET;
use wittlab_core::{Elem, Module, RMatrix, RingSpec};

fn block(size: u32, n: usize, k: usize, cyclic: Option<u16>, data: &[u16]) -> Block {
    let r = Arc::new(make_ring(&RingSpec::Zmod { n: size }).unwrap());
    let m = Arc::new(match cyclic {
        Some(a) => Module::cyclic(r, Elem(a)),
        None => Module::free(r, 1),
    });
    let e: Vec<Elem> = data.iter().map(|&x| Elem(x)).collect();
    let matrix = RMatrix {
        rows: n,
        cols: k,
        data: e[..n * k].to_vec(),
    };
    let fs = e[n * k..n * k + k]
        .iter()
        .map(|x| match cyclic {
            Some(a) => vec![Elem((x.0 * (size as u16 / a)) % size as u16)],
            None => vec![*x],
        })
        .collect();
    Block::new(m, matrix, fs).unwrap()
}

fn shape() -> impl Strategy<Value = (usize, usize, Option<u16>, Vec<u16>)> {
    (1usize..=3, 1usize..=2, prop_oneof![Just(None), Just(Some(2u16))])
        .prop_filter("k <= n", |(n, k, _)| k <= n)
        .prop_flat_map(|(n, k, c)| (Just(n), Just(k), Just(c), proptest::collection::vec(0u16..4, n * k + k)))
}

#[test]
fn identity_block_is_unimodular() {
    let b = block(4, 2, 2, None, &[1, 0, 0, 1, 0, 0]);
    assert!(is_unimodular_block(&b).is_some());
    assert!(is_unimodular_block_brute(&b, 1 << 20).unwrap());
    let c = matrix_reduce(&b, 1, DEFAULT_BUDGET).unwrap();
    assert!(c.replay(&b));
}

#[test]
fn zero_block_is_not() {
    let b = block(4, 2, 1, None, &[0, 0, 0]);
    assert!(is_unimodular_block(&b).is_none());
    assert!(!is_unimodular_block_brute(&b, 1 << 20).unwrap());
    assert!(matrix_reduce(&b, 1, DEFAULT_BUDGET).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn unimodular_blocks_reduce_and_replay((n, k, c, data) in shape()) {
        let b = block(4, n, k, c, &data);
        let fast = is_unimodular_block(&b);
        prop_assert_eq!(fast.is_some(), is_unimodular_block_brute(&b, 1 << 24).unwrap());
        if let Some(inv) = fast {
            prop_assert!(inv.verify(&b));
            if k + 1 <= n + 1 {
                let cert = matrix_reduce(&b, 1, DEFAULT_BUDGET).unwrap();
                prop_assert!(cert.replay(&b));
            }
            if n > k {
                let t = reduce_keep_tail(&b, k, 1, DEFAULT_BUDGET).unwrap();
                prop_assert!(t.replay(&b));
            }
        }
    }
}
