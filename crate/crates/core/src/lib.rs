//! Numerical toolkit for Hamiltonian rotations of CP² and its one-point
//! blow-up.
//!
//! The crate covers the toric models ([`geometry`]), Hamiltonian flows and
//! Hofer lengths ([`dynamics`]), graph regions and quasi-cylinders
//! ([`regions`]), explicit ball embeddings with numerical verification
//! ([`embeddings`]) and a certificate engine that assembles capacity lower
//! bounds into length-minimality verdicts ([`capacities`]).
//!
//! Conventions used throughout:
//!
//! * CP² carries the form for which `[√(1-|z|²) : z₁ : z₂]` is a symplectic
//!   embedding of the open unit ball with the standard form. Lines have
//!   area π.
//! * Hamiltonian vector fields solve `i(X)ω = -dH`.
//! * Graph regions live in `M × R(s) × [0,1](t)` with the form `ω ⊕ dt∧ds`.
//! * [`geometry::volume`] is the moment-polytope area (Liouville volume
//!   divided by 4, the area of the period-2 angle torus).

pub mod capacities;
pub mod cli;
pub mod dynamics;
pub mod embeddings;
pub mod error;
pub mod export;
pub mod geometry;
pub mod numeric;
pub mod regions;

pub use error::{Error, Result};
