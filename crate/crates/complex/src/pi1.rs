//! Fundamental group of the realization through the edge-path group.
//!
//! Generators are the edges outside a spanning tree of the 1-skeleton;
//! every 2-simplex (a, b, c) gives the relator [ab][bc][ac]^{-1}. The
//! presentation is then simplified by Tietze moves that delete a generator
//! occurring exactly once in some relator.

use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};

pub const DEFAULT_PI1_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pi1Outcome {
    pub generators: usize,
    pub relators: usize,
    pub remaining_generators: usize,
    pub remaining_relators: usize,
    pub eliminations: usize,
    /// The presentation simplified to the trivial group.
    pub trivial: bool,
    pub budget_exhausted: bool,
}

/// A group presentation; letters are ±(generator + 1).
#[derive(Clone, Debug, Default)]
pub struct Presentation {
    pub generators: usize,
    pub relators: Vec<Vec<i32>>,
}

/// The edge-path presentation of a connected 2-skeleton given by vertex
/// ids, edges (a, b) and triangles (a, b, c).
pub fn edge_path_presentation(vertices: &[u32], edges: &[Vec<u32>], triangles: &[Vec<u32>]) -> Presentation {
    let mut adj: HashMap<u32, Vec<(u32, usize)>> = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        adj.entry(e[0]).or_default().push((e[1], i));
        adj.entry(e[1]).or_default().push((e[0], i));
    }
    let mut in_tree = vec![false; edges.len()];
    let mut seen: HashMap<u32, bool> = HashMap::new();
    if let Some(&root) = vertices.first() {
        seen.insert(root, true);
        let mut queue = VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            for &(b, i) in adj.get(&a).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(b, true).is_none() {
                    in_tree[i] = true;
                    queue.push_back(b);
                }
            }
        }
    }
    let mut letter: HashMap<(u32, u32), i32> = HashMap::new();
    let mut generators = 0;
    for (i, e) in edges.iter().enumerate() {
        if in_tree[i] {
            letter.insert((e[0], e[1]), 0);
        } else {
            generators += 1;
            letter.insert((e[0], e[1]), generators as i32);
        }
    }
    let relators = triangles
        .iter()
        .map(|t| {
            let l = |a: u32, b: u32| letter.get(&(a, b)).copied().unwrap_or(0);
            [l(t[0], t[1]), l(t[1], t[2]), -l(t[0], t[2])]
                .into_iter()
                .filter(|&x| x != 0)
                .collect()
        })
        .collect();
    Presentation { generators, relators }
}

fn free_reduce(w: &mut Vec<i32>) {
    let mut out: Vec<i32> = Vec::with_capacity(w.len());
    for &x in w.iter() {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    let (mut a, mut b) = (0, out.len());
    while b - a >= 2 && out[a] == -out[b - 1] {
        a += 1;
        b -= 1;
    }
    *w = out[a..b].to_vec();
}

fn inverse(w: &[i32]) -> Vec<i32> {
    w.iter().rev().map(|&x| -x).collect()
}

/// Simplifies the presentation; `trivial` is set when no generator is left.
pub fn simplify(mut p: Presentation, budget: u64) -> Pi1Outcome {
    let (generators, relators) = (p.generators, p.relators.len());
    let mut alive = vec![true; p.generators + 1];
    alive[0] = false;
    let mut remaining = p.generators;
    let mut work = 0u64;
    let mut eliminations = 0;
    let mut exhausted = false;
    loop {
        for r in p.relators.iter_mut() {
            free_reduce(r);
        }
        p.relators.retain(|r| !r.is_empty());
        if remaining == 0 {
            break;
        }
        p.relators.sort_by_key(Vec::len);
        let mut choice = None;
        for (ri, r) in p.relators.iter().enumerate() {
            let mut count: HashMap<i32, usize> = HashMap::new();
            for &x in r {
                *count.entry(x.abs()).or_insert(0) += 1;
            }
            if let Some(pos) = r.iter().position(|x| count[&x.abs()] == 1) {
                choice = Some((ri, pos));
                break;
            }
        }
        let Some((ri, pos)) = choice else { break };
        let r = p.relators.swap_remove(ri);
        let x = r[pos];
        let rest: Vec<i32> = r[pos + 1..].iter().chain(&r[..pos]).copied().collect();
        let g = x.abs();
        let image = if x > 0 { inverse(&rest) } else { rest };
        let image_inv = inverse(&image);
        for w in p.relators.iter_mut() {
            if !w.iter().any(|y| y.abs() == g) {
                continue;
            }
            let mut out = Vec::with_capacity(w.len() + image.len());
            for &y in w.iter() {
                if y == g {
                    out.extend_from_slice(&image);
                } else if y == -g {
                    out.extend_from_slice(&image_inv);
                } else {
                    out.push(y);
                }
            }
            work += out.len() as u64;
            *w = out;
        }
        alive[g as usize] = false;
        remaining -= 1;
        eliminations += 1;
        work += p.relators.len() as u64;
        if work > budget {
            exhausted = true;
            break;
        }
    }
    Pi1Outcome {
        generators,
        relators,
        remaining_generators: remaining,
        remaining_relators: p.relators.len(),
        eliminations,
        trivial: remaining == 0,
        budget_exhausted: exhausted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filled_triangle_is_simply_connected() {
        let v = [0, 1, 2];
        let e = vec![vec![0, 1], vec![1, 2], vec![0, 2]];
        let t = vec![vec![0, 1, 2]];
        let p = edge_path_presentation(&v, &e, &t);
        assert_eq!(p.generators, 1);
        assert!(simplify(p, 1000).trivial);
    }

    #[test]
    fn hollow_triangle_is_not() {
        let v = [0, 1, 2];
        let e = vec![vec![0, 1], vec![1, 2], vec![0, 2]];
        let p = edge_path_presentation(&v, &e, &[]);
        let out = simplify(p, 1000);
        assert!(!out.trivial);
        assert_eq!(out.remaining_generators, 1);
    }

    #[test]
    fn free_reduction() {
        let mut w = vec![1, 2, -2, 3, -1];
        free_reduce(&mut w);
        assert_eq!(w, vec![3]);
    }
}
