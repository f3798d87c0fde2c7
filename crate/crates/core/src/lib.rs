//! Computable coarse geometry of finite fuzzy metric spaces.
//!
//! A fuzzy metric space in the sense of George and Veeramani assigns to each
//! pair of points and each time parameter `t > 0` a proximity degree
//! `M(x,y,t)` in `(0,1]`, tied together by a t-norm weighted triangle
//! inequality.  This crate makes the coarse-geometric side of that theory
//! executable at desk scale: axiom verification, Property A witness families
//! and their certificates, asymptotic-dimension covers, the six-way
//! characterization transforms, coarse maps and equivalences, and explicit
//! coarse embeddings into finite-dimensional Hilbert space.
//!
//! Everything operates on finite point sets and emits machine-checkable
//! certificates; universally quantified statements are exercised as
//! per-parameter-tuple certificates over finite ladders.

pub mod characterizations;
pub mod coarse_maps;
pub mod coarse_structure;
pub mod covers_asdim;
pub mod embedding;
pub mod error;
pub mod formats;
pub mod fuzzy_space;
pub mod numerics;
pub mod property_a;

pub use error::Error;
pub use fuzzy_space::FuzzySpace;
pub use numerics::{TNorm, Tolerance};
pub use property_a::WitnessFamily;

pub type Result<T> = std::result::Result<T, Error>;
