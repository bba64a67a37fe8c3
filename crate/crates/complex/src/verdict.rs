//! Connectivity verdicts with explicit certification tiers.
//!
//! d ≤ −2 is vacuous. d = −1 asks for a member. d = 0 asks for path
//! connectivity, decided exactly on the 1-skeleton. For d ≥ 1 reduced
//! homology through degree d is computed, and triviality of π₁ is attempted
//! on the edge-path presentation; with π₁ = 1 and H̃_i = 0 for i ≤ d the
//! Hurewicz theorem makes the space d-connected (tier `fully-verified`).

use crate::chain::ChainComplex;
use crate::homology::{cycle_witness, homology_of_complex, ReducedHomology, DEFAULT_SIMPLEX_CAP};
use crate::pi1::{edge_path_presentation, simplify, Pi1Outcome, DEFAULT_PI1_BUDGET};
use crate::poset::{Point, SequencePoset};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    Vacuous,
    NonemptyVerified,
    HomologyVerified,
    FullyVerified,
    Refuted,
    Inconclusive,
}

impl Tier {
    /// Whether the tier certifies the target (at some level).
    pub fn is_positive(self) -> bool {
        matches!(
            self,
            Tier::Vacuous | Tier::NonemptyVerified | Tier::HomologyVerified | Tier::FullyVerified
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// The poset has no members.
    Empty,
    /// A member of length one.
    Vertex { point: Point },
    /// Two vertices in different path components.
    Components { a: Point, b: Point },
    /// A mod-p cycle that is not a mod-p boundary.
    Cycle {
        degree: usize,
        prime: u64,
        terms: Vec<(Vec<Point>, i64)>,
    },
    /// The nonzero group, when the cycle search exceeds its cap.
    Invariants { degree: i64, betti: usize, torsion: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityVerdict {
    pub target: i64,
    pub tier: Tier,
    pub witness: Option<Witness>,
    pub homology: Option<ReducedHomology>,
    pub pi1: Option<Pi1Outcome>,
    pub simplex_counts: Vec<usize>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictConfig {
    pub simplex_cap: usize,
    pub pi1_budget: u64,
    pub witness_cap: usize,
}

impl Default for VerdictConfig {
    fn default() -> Self {
        VerdictConfig {
            simplex_cap: DEFAULT_SIMPLEX_CAP,
            pi1_budget: DEFAULT_PI1_BUDGET,
            witness_cap: 200_000,
        }
    }
}

fn verdict(target: i64, tier: Tier, witness: Option<Witness>, note: impl Into<String>) -> ConnectivityVerdict {
    ConnectivityVerdict {
        target,
        tier,
        witness,
        homology: None,
        pi1: None,
        simplex_counts: Vec::new(),
        note: note.into(),
    }
}

/// Splits the vertices into the component of the first one and the rest,
/// scanning only unvisited vertices.
pub fn first_component(f: &SequencePoset, verts: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let Some(&root) = verts.first() else { return (Vec::new(), Vec::new()) };
    let mut unvisited: Vec<u32> = verts[1..].to_vec();
    let mut comp = vec![root];
    let mut head = 0;
    while head < comp.len() && !unvisited.is_empty() {
        let a = comp[head];
        head += 1;
        let (near, far): (Vec<u32>, Vec<u32>) = unvisited
            .par_iter()
            .partition(|&&b| f.contains_idx(&[a, b]) || f.contains_idx(&[b, a]));
        comp.extend(near);
        unvisited = far;
    }
    (comp, unvisited)
}

pub fn connectivity_verdict(f: &SequencePoset, d: i64, cfg: &VerdictConfig) -> ConnectivityVerdict {
    if d <= -2 {
        return verdict(d, Tier::Vacuous, None, "target at most -2");
    }
    let verts = f.vertices();
    let Some(&v0) = verts.first() else {
        return verdict(d, Tier::Refuted, Some(Witness::Empty), "no members");
    };
    if d == -1 {
        let w = Witness::Vertex { point: f.point(v0).clone() };
        return verdict(d, Tier::NonemptyVerified, Some(w), format!("{} vertices", verts.len()));
    }
    let (comp, rest) = first_component(f, &verts);
    if let Some(&b) = rest.first() {
        let w = Witness::Components {
            a: f.point(v0).clone(),
            b: f.point(b).clone(),
        };
        return verdict(d, Tier::Refuted, Some(w), format!("{} of {} vertices reachable", comp.len(), verts.len()));
    }
    if d == 0 {
        let mut v = verdict(d, Tier::FullyVerified, None, format!("{} vertices, path-connected", verts.len()));
        v.simplex_counts = vec![verts.len()];
        return v;
    }
    let levels = match f.enumerate(d as usize + 2, cfg.simplex_cap) {
        Ok(l) => l,
        Err(e) => return verdict(d, Tier::Inconclusive, None, e.to_string()),
    };
    let counts = levels.counts();
    let cc = match ChainComplex::from_levels(&levels) {
        Ok(c) => c,
        Err(e) => return verdict(d, Tier::Inconclusive, None, e.to_string()),
    };
    if !cc.check_d_squared() {
        return verdict(d, Tier::Inconclusive, None, "boundary of boundary is nonzero");
    }
    let h = match homology_of_complex(&cc, d as usize) {
        Ok(h) => h,
        Err(e) => return verdict(d, Tier::Inconclusive, None, e.to_string()),
    };
    if let Some(g) = h.first_nonzero().cloned() {
        let prime = if g.betti > 0 {
            65521
        } else {
            smallest_prime_factor(g.torsion[0].parse::<u64>().unwrap_or(2))
        };
        let witness = match cycle_witness(&cc, g.degree as usize, prime, cfg.witness_cap) {
            Some(terms) => Witness::Cycle {
                degree: g.degree as usize,
                prime,
                terms: terms
                    .into_iter()
                    .map(|(i, c)| (f.points(&cc.simplices[g.degree as usize][i]), c))
                    .collect(),
            },
            None => Witness::Invariants {
                degree: g.degree,
                betti: g.betti,
                torsion: g.torsion.clone(),
            },
        };
        let mut v = verdict(d, Tier::Refuted, Some(witness), format!("reduced homology nonzero in degree {}", g.degree));
        v.homology = Some(h);
        v.simplex_counts = counts;
        return v;
    }
    let edges = cc.simplices.get(1).map(Vec::as_slice).unwrap_or(&[]);
    let triangles = cc.simplices.get(2).map(Vec::as_slice).unwrap_or(&[]);
    let pres = edge_path_presentation(&verts, edges, triangles);
    let pi1 = simplify(pres, cfg.pi1_budget);
    let (tier, note) = if pi1.trivial {
        (Tier::FullyVerified, "homology vanishes and the edge-path group is trivial")
    } else if pi1.budget_exhausted {
        (Tier::HomologyVerified, "homology vanishes; edge-path simplification ran out of budget")
    } else {
        (Tier::HomologyVerified, "homology vanishes; edge-path presentation did not simplify to the trivial group")
    };
    let mut v = verdict(d, tier, None, note);
    v.homology = Some(h);
    v.pi1 = Some(pi1);
    v.simplex_counts = counts;
    v
}

fn smallest_prime_factor(n: u64) -> u64 {
    (2..=n).find(|p| n % p == 0).unwrap_or(2)
}
