//! JSON instance descriptions.

use crate::catalog;
use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use wittlab_complex::theorem::{Structure, TheoremId, TheoremInstance};
use wittlab_core::form::{make_form_parameter, FormParameter};
use wittlab_core::quad::QuadraticModule;
use wittlab_core::ring::{make_ring, RingSpec};
use wittlab_core::{Elem, ModElem, Module, RMatrix, Ring};

/// A catalog label such as `GF(2)`, or a full ring description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RingRef {
    Label(String),
    Spec(RingSpec),
}

impl RingRef {
    pub fn build(&self) -> Result<Arc<Ring>> {
        match self {
            RingRef::Label(l) => catalog::ring_by_label(l),
            RingRef::Spec(s) => Ok(Arc::new(make_ring(s)?)),
        }
    }

    /// Accepts a label or inline JSON.
    pub fn parse(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            Ok(RingRef::Spec(serde_json::from_str(s).context("ring description")?))
        } else {
            Ok(RingRef::Label(s.to_string()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementSpec {
    pub ngens: usize,
    #[serde(default)]
    pub relations: Vec<Vec<u16>>,
    /// Gram matrix of λ on the generators; zero when absent.
    #[serde(default)]
    pub gram: Vec<Vec<u16>>,
    /// μ on the generators; zero when absent.
    #[serde(default)]
    pub mu: Vec<u16>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModuleSpec {
    Free { n: usize },
    Cyclic { a: u16 },
    Presented { ngens: usize, relations: Vec<Vec<u16>> },
    Hyperbolic { g: usize },
    /// P ⊕ H^g with the P generators first.
    Quadratic { complement: ComplementSpec, g: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub ring: RingRef,
    /// ε as an element index; −1 when absent.
    #[serde(default)]
    pub epsilon: Option<u16>,
    /// Additive generators of Λ beyond Λ_min.
    #[serde(default)]
    pub lambda: Vec<u16>,
    pub module: ModuleSpec,
}

fn elems(v: &[u16]) -> Vec<Elem> {
    v.iter().map(|&x| Elem(x)).collect()
}

pub fn elem_vec(v: &[u16]) -> Vec<Elem> {
    elems(v)
}

pub enum Built {
    Module(Arc<Module>),
    Quad { q: QuadraticModule, p: QuadraticModule, g: usize },
}

impl InstanceSpec {
    pub fn param(&self, ring: &Arc<Ring>) -> Result<Arc<FormParameter>> {
        let eps = self.epsilon.map_or(ring.neg(Elem::ONE), Elem);
        Ok(Arc::new(make_form_parameter(ring.clone(), eps, &elems(&self.lambda))?))
    }

    pub fn build(&self) -> Result<Built> {
        let ring = self.ring.build()?;
        Ok(match &self.module {
            ModuleSpec::Free { n } => Built::Module(Arc::new(Module::free(ring, *n))),
            ModuleSpec::Cyclic { a } => Built::Module(Arc::new(Module::cyclic(ring, Elem(*a)))),
            ModuleSpec::Presented { ngens, relations } => {
                Built::Module(Arc::new(Module::new(ring, *ngens, relations.iter().map(|r| elems(r)).collect())?))
            }
            ModuleSpec::Hyperbolic { g } => {
                let param = self.param(&ring)?;
                Built::Quad {
                    q: QuadraticModule::hyperbolic(param.clone(), *g),
                    p: QuadraticModule::zero(param),
                    g: *g,
                }
            }
            ModuleSpec::Quadratic { complement: c, g } => {
                let param = self.param(&ring)?;
                let m = Arc::new(Module::new(ring, c.ngens, c.relations.iter().map(|r| elems(r)).collect())?);
                let mut gram = RMatrix::zeros(c.ngens, c.ngens);
                for (i, row) in c.gram.iter().enumerate() {
                    for (j, &x) in row.iter().enumerate() {
                        gram.set(i, j, Elem(x));
                    }
                }
                let mut mu = elems(&c.mu);
                mu.resize(c.ngens, Elem::ZERO);
                let p = QuadraticModule::new(m, gram, mu, param.clone())?;
                Built::Quad {
                    q: p.direct_sum(&QuadraticModule::hyperbolic(param, *g))?,
                    p,
                    g: *g,
                }
            }
        })
    }

    pub fn quadratic(&self) -> Result<(QuadraticModule, QuadraticModule, usize)> {
        match self.build()? {
            Built::Quad { q, p, g } => Ok((q, p, g)),
            Built::Module(_) => bail!("a quadratic module is required"),
        }
    }

    pub fn digest(&self) -> String {
        crate::report::digest_json(self)
    }
}

pub fn mod_elem(q: &QuadraticModule, v: &[u16]) -> Result<ModElem> {
    if v.len() != q.ngens() {
        bail!("vector of length {} for {} generators", v.len(), q.ngens());
    }
    Ok(q.module().canon(&elems(v)))
}

/// A connectivity statement applied to an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremSpec {
    pub theorem: TheoremId,
    pub instance: InstanceSpec,
    #[serde(default)]
    pub base: Vec<Vec<u16>>,
    #[serde(default)]
    pub part: Option<u8>,
}

impl TheoremSpec {
    pub fn to_instance(&self) -> Result<TheoremInstance> {
        let structure = match self.instance.build()? {
            Built::Module(m) => Structure::Module(m),
            Built::Quad { p, g, .. } => Structure::Quad { p, g },
        };
        Ok(TheoremInstance {
            label: format!("{}:{}", self.theorem.name(), &self.digest()[..12]),
            structure,
            base: self.base.iter().map(|v| elems(v)).collect(),
            part: self.part.unwrap_or(if self.base.is_empty() { 1 } else { 2 }),
        })
    }

    pub fn digest(&self) -> String {
        crate::report::digest_json(self)
    }
}
