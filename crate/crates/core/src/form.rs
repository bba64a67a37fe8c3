//! Form parameters (ε, Λ) and cosets in R/Λ.

use crate::error::{AlgebraError, Result};
use crate::ring::{Elem, Ring};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::Arc;

/// A value of μ: an element of R/Λ, stored by its least-index representative.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LambdaCoset(pub Elem);

impl LambdaCoset {
    pub fn rep(self) -> Elem {
        self.0
    }
}

#[derive(Debug)]
pub struct FormParameter {
    ring: Arc<Ring>,
    epsilon: Elem,
    members: Vec<Elem>,
    in_lambda: Vec<bool>,
    canon: Vec<Elem>,
}

impl PartialEq for FormParameter {
    fn eq(&self, other: &Self) -> bool {
        *self.ring == *other.ring && self.epsilon == other.epsilon && self.members == other.members
    }
}

fn check_epsilon(ring: &Ring, eps: Elem) -> Result<Elem> {
    if eps.index() >= ring.size() {
        return Err(AlgebraError::Epsilon(format!("{eps} is not an element")));
    }
    let inv = ring
        .inv(eps)
        .ok_or_else(|| AlgebraError::Epsilon(format!("{eps} is not a unit")))?;
    if !ring.is_central(eps) {
        return Err(AlgebraError::Epsilon(format!("{eps} is not central")));
    }
    if ring.conj(eps) != inv {
        return Err(AlgebraError::Epsilon(format!("conj({eps}) is not its inverse")));
    }
    Ok(inv)
}

/// (Λ_min, Λ_max) for the given ε, as sorted element lists.
pub fn lambda_bounds(ring: &Ring, eps: Elem) -> Result<(Vec<Elem>, Vec<Elem>)> {
    check_epsilon(ring, eps)?;
    let min: BTreeSet<Elem> = ring
        .elements()
        .map(|r| ring.sub(r, ring.mul(eps, ring.conj(r))))
        .collect();
    let max: Vec<Elem> = ring
        .elements()
        .filter(|&r| ring.mul(eps, ring.conj(r)) == ring.neg(r))
        .collect();
    Ok((min.into_iter().collect(), max))
}

fn additive_closure(ring: &Ring, set: &mut Vec<bool>) {
    let mut members: Vec<Elem> = ring.elements().filter(|e| set[e.index()]).collect();
    let mut i = 0;
    while i < members.len() {
        let a = members[i];
        let current = members.clone();
        for b in current {
            let s = ring.add(a, b);
            if !set[s.index()] {
                set[s.index()] = true;
                members.push(s);
            }
        }
        i += 1;
    }
}

/// Builds Λ as the smallest form parameter containing `generators` and Λ_min.
pub fn make_form_parameter(ring: Arc<Ring>, eps: Elem, generators: &[Elem]) -> Result<FormParameter> {
    let (min, max) = lambda_bounds(&ring, eps)?;
    let mut set = vec![false; ring.size()];
    set[0] = true;
    for &g in min.iter().chain(generators) {
        if g.index() >= ring.size() {
            return Err(AlgebraError::FormParameter(format!("{g} is not an element")));
        }
        set[g.index()] = true;
    }
    loop {
        additive_closure(&ring, &mut set);
        let members: Vec<Elem> = ring.elements().filter(|e| set[e.index()]).collect();
        let mut grew = false;
        for &x in &members {
            for s in ring.elements() {
                let y = ring.mul3(ring.conj(s), x, s);
                if !set[y.index()] {
                    set[y.index()] = true;
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let maxset: BTreeSet<Elem> = max.into_iter().collect();
    if let Some(bad) = ring.elements().find(|e| set[e.index()] && !maxset.contains(e)) {
        return Err(AlgebraError::FormParameter(format!(
            "closure contains {bad}, outside Lambda_max"
        )));
    }
    from_set_unchecked(ring, eps, set)
}

/// Uses an explicit element set as Λ, validating every form-parameter law.
pub fn form_parameter_from_set(ring: Arc<Ring>, eps: Elem, elements: &[Elem]) -> Result<FormParameter> {
    check_epsilon(&ring, eps)?;
    let mut set = vec![false; ring.size()];
    for &e in elements {
        if e.index() >= ring.size() {
            return Err(AlgebraError::FormParameter(format!("{e} is not an element")));
        }
        set[e.index()] = true;
    }
    let p = from_set_unchecked(ring, eps, set)?;
    p.validate()?;
    Ok(p)
}

fn from_set_unchecked(ring: Arc<Ring>, eps: Elem, set: Vec<bool>) -> Result<FormParameter> {
    let members: Vec<Elem> = ring.elements().filter(|e| set[e.index()]).collect();
    let canon = ring
        .elements()
        .map(|r| {
            members
                .iter()
                .map(|&l| ring.add(r, l))
                .min()
                .unwrap_or(r)
        })
        .collect();
    Ok(FormParameter {
        ring,
        epsilon: eps,
        members,
        in_lambda: set,
        canon,
    })
}

impl FormParameter {
    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn epsilon(&self) -> Elem {
        self.epsilon
    }

    /// conj(ε) = ε⁻¹.
    pub fn epsilon_bar(&self) -> Elem {
        self.ring.conj(self.epsilon)
    }

    pub fn members(&self) -> &[Elem] {
        &self.members
    }

    pub fn contains(&self, r: Elem) -> bool {
        self.in_lambda[r.index()]
    }

    pub fn coset(&self, r: Elem) -> LambdaCoset {
        LambdaCoset(self.canon[r.index()])
    }

    /// All elements of the coset.
    pub fn coset_elements(&self, c: LambdaCoset) -> Vec<Elem> {
        let mut v: Vec<Elem> = self.members.iter().map(|&l| self.ring.add(c.0, l)).collect();
        v.sort();
        v
    }

    /// The distinct cosets of R/Λ.
    pub fn cosets(&self) -> Vec<LambdaCoset> {
        let set: BTreeSet<LambdaCoset> = self.ring.elements().map(|r| self.coset(r)).collect();
        set.into_iter().collect()
    }

    pub fn coset_add(&self, a: LambdaCoset, b: LambdaCoset) -> LambdaCoset {
        self.coset(self.ring.add(a.0, b.0))
    }

    pub fn zero(&self) -> LambdaCoset {
        LambdaCoset(Elem::ZERO)
    }

    /// Exhaustive check of ε and of the form-parameter laws for Λ.
    pub fn validate(&self) -> Result<()> {
        let ring = &self.ring;
        check_epsilon(ring, self.epsilon)?;
        let (min, max) = lambda_bounds(ring, self.epsilon)?;
        if let Some(m) = min.iter().find(|&&m| !self.contains(m)) {
            return Err(AlgebraError::FormParameter(format!(
                "Lambda_min element {m} missing"
            )));
        }
        let maxset: BTreeSet<Elem> = max.into_iter().collect();
        for &l in &self.members {
            if !maxset.contains(&l) {
                return Err(AlgebraError::FormParameter(format!(
                    "{l} lies outside Lambda_max"
                )));
            }
            if !self.contains(ring.neg(l)) {
                return Err(AlgebraError::FormParameter(format!("not closed under negating {l}")));
            }
            for &k in &self.members {
                if !self.contains(ring.add(l, k)) {
                    return Err(AlgebraError::FormParameter(format!(
                        "not closed under {l} + {k}"
                    )));
                }
            }
            for s in ring.elements() {
                if !self.contains(ring.mul3(ring.conj(s), l, s)) {
                    return Err(AlgebraError::FormParameter(format!(
                        "conj({s})*{l}*{s} leaves Lambda"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{make_ring, Involution, RingSpec};

    fn ring(spec: RingSpec) -> Arc<Ring> {
        Arc::new(make_ring(&spec).unwrap())
    }

    #[test]
    fn z4_minus_one() {
        let r = ring(RingSpec::Zmod { n: 4 });
        let (min, max) = lambda_bounds(&r, Elem(3)).unwrap();
        assert_eq!(min, vec![Elem(0), Elem(2)]);
        assert_eq!(max.len(), 4);
        let p = make_form_parameter(r, Elem(3), &[]).unwrap();
        assert_eq!(p.members(), &[Elem(0), Elem(2)]);
        assert_eq!(p.coset(Elem(3)), p.coset(Elem(1)));
        assert_eq!(p.coset(Elem(3)).rep(), Elem(1));
    }

    #[test]
    fn gf2_parameters() {
        let r = ring(RingSpec::Gf { q: 2, involution: Involution::Identity });
        let (min, _) = lambda_bounds(&r, Elem::ONE).unwrap();
        assert_eq!(min, vec![Elem(0)]);
        let small = make_form_parameter(r.clone(), Elem::ONE, &[]).unwrap();
        assert_eq!(small.members(), &[Elem(0)]);
        assert_eq!(small.coset(Elem(1)).rep(), Elem(1));
        let big = make_form_parameter(r, Elem::ONE, &[Elem::ONE]).unwrap();
        assert_eq!(big.members(), &[Elem(0), Elem(1)]);
    }

    #[test]
    fn rejects_closure_beyond_max() {
        let r = ring(RingSpec::Zmod { n: 4 });
        // with ε = 1 the bound Λ_max is {0, 2}
        assert!(make_form_parameter(r.clone(), Elem::ONE, &[Elem(1)]).is_err());
        assert!(lambda_bounds(&r, Elem(2)).is_err());
    }

    #[test]
    fn explicit_sets_are_validated() {
        let r = ring(RingSpec::Zmod { n: 4 });
        assert!(form_parameter_from_set(r.clone(), Elem(3), &[Elem(0), Elem(2)]).is_ok());
        assert!(form_parameter_from_set(r, Elem(3), &[Elem(0)]).is_err());
    }
}
