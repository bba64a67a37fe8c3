//! Built-in rings, form parameters and (quadratic) modules.

use anyhow::{Context, Result};
use std::sync::Arc;
use wittlab_core::form::{lambda_bounds, make_form_parameter, FormParameter};
use wittlab_core::group::GroupSpec;
use wittlab_core::quad::QuadraticModule;
use wittlab_core::ring::{make_ring, Involution, RingSpec};
use wittlab_core::{Elem, Module, RMatrix, Ring};

pub const MAX_HYPERBOLIC_RANK: usize = 5;

pub fn ring_specs() -> Vec<RingSpec> {
    let c2 = || GroupSpec::Named("C2".into());
    vec![
        RingSpec::Gf { q: 2, involution: Involution::Identity },
        RingSpec::Gf { q: 3, involution: Involution::Identity },
        RingSpec::Gf { q: 4, involution: Involution::Frobenius },
        RingSpec::Zmod { n: 4 },
        RingSpec::Zmod { n: 8 },
        RingSpec::GroupRing { m: 2, group: c2(), w1: None },
        RingSpec::GroupRing { m: 3, group: c2(), w1: None },
        RingSpec::GroupRing { m: 3, group: c2(), w1: Some(vec![1, -1]) },
    ]
}

pub fn rings() -> Result<Vec<Arc<Ring>>> {
    ring_specs()
        .iter()
        .map(|s| make_ring(s).map(Arc::new).with_context(|| s.label()))
        .collect()
}

pub fn ring_by_label(label: &str) -> Result<Arc<Ring>> {
    let spec = ring_specs()
        .into_iter()
        .find(|s| s.label() == label)
        .with_context(|| format!("no catalog ring {label}"))?;
    Ok(Arc::new(make_ring(&spec)?))
}

/// A named form parameter (ε, Λ).
#[derive(Clone, Debug)]
pub struct ParamEntry {
    pub name: String,
    pub param: Arc<FormParameter>,
}

/// ε ∈ {1, −1} (once when equal), each with Λ_min and, when different,
/// Λ_max.
pub fn form_parameters(ring: &Arc<Ring>) -> Result<Vec<ParamEntry>> {
    let mut eps = vec![Elem::ONE];
    let minus = ring.neg(Elem::ONE);
    if minus != Elem::ONE {
        eps.push(minus);
    }
    let mut out = Vec::new();
    for e in eps {
        let sign = if e == Elem::ONE { "+1" } else { "-1" };
        let (min, max) = lambda_bounds(ring, e)?;
        out.push(ParamEntry {
            name: format!("{} eps={sign} min", ring.label()),
            param: Arc::new(make_form_parameter(ring.clone(), e, &[])?),
        });
        if max != min {
            out.push(ParamEntry {
                name: format!("{} eps={sign} max", ring.label()),
                param: Arc::new(make_form_parameter(ring.clone(), e, &max)?),
            });
        }
    }
    Ok(out)
}

/// The Λ_min parameter with ε = −1, the default for quadratic instances.
pub fn default_parameter(ring: &Arc<Ring>) -> Result<Arc<FormParameter>> {
    Ok(Arc::new(make_form_parameter(ring.clone(), ring.neg(Elem::ONE), &[])?))
}

/// R-module instances: free of rank ≤ 3 and cyclic R/rR for non-units r.
pub fn modules(ring: &Arc<Ring>) -> Vec<(String, Arc<Module>)> {
    let mut out: Vec<(String, Arc<Module>)> = (1..=3)
        .map(|n| (format!("{}^{n}", ring.label()), Arc::new(Module::free(ring.clone(), n))))
        .collect();
    for a in ring.elements().filter(|&a| a != Elem::ZERO && !ring.is_unit(a)) {
        out.push((format!("{}/({})", ring.label(), a.0), Arc::new(Module::cyclic(ring.clone(), a))));
    }
    out
}

/// Degenerate complements P: R with zero form, and R/rR with zero form for
/// a non-unit r ≠ 0 when one exists.
pub fn degenerate_complements(param: &Arc<FormParameter>) -> Result<Vec<(String, QuadraticModule)>> {
    let ring = param.ring().clone();
    let mut out = vec![(
        "P0".to_string(),
        QuadraticModule::new(Arc::new(Module::free(ring.clone(), 1)), RMatrix::zeros(1, 1), vec![Elem::ZERO], param.clone())?,
    )];
    if let Some(a) = ring.elements().find(|&a| a != Elem::ZERO && !ring.is_unit(a)) {
        let m = Arc::new(Module::cyclic(ring.clone(), a));
        out.push((format!("P({})", a.0), QuadraticModule::new(m, RMatrix::zeros(1, 1), vec![Elem::ZERO], param.clone())?));
    }
    Ok(out)
}

/// A named quadratic module together with its decomposition data: `p` is
/// the number of complement generators and `g` the number of hyperbolic
/// summands following them.
#[derive(Clone, Debug)]
pub struct QuadEntry {
    pub name: String,
    pub q: QuadraticModule,
    pub p: usize,
    pub g: usize,
}

/// H^g for g ≤ 5 and P ⊕ H^g for g ≤ 3, over one form parameter.
pub fn quadratic_modules(entry: &ParamEntry) -> Result<Vec<QuadEntry>> {
    let mut out = Vec::new();
    for g in 0..=MAX_HYPERBOLIC_RANK {
        out.push(QuadEntry {
            name: format!("{} H^{g}", entry.name),
            q: QuadraticModule::hyperbolic(entry.param.clone(), g),
            p: 0,
            g,
        });
    }
    for (pn, pq) in degenerate_complements(&entry.param)? {
        for g in 1..=3 {
            out.push(QuadEntry {
                name: format!("{} {pn}+H^{g}", entry.name),
                q: pq.direct_sum(&QuadraticModule::hyperbolic(entry.param.clone(), g))?,
                p: pq.ngens(),
                g,
            });
        }
    }
    Ok(out)
}
