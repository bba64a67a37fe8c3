//! Algebraic substrate for verifying stability-range statements over
//! finite rings with anti-involution.

pub mod block;
pub mod error;
pub mod form;
pub mod group;
pub mod howell;
pub mod linalg;
pub mod module;
pub mod pipeline;
pub mod quad;
pub mod ring;
pub mod stable_rank;

pub use error::{AlgebraError, Result};
pub use form::{FormParameter, LambdaCoset};
pub use linalg::RMatrix;
pub use module::{ModElem, Module, ModuleMap};
pub use ring::{Elem, Ring, RingSpec};
