//! Exact and numerical tools for star-like periodic orbits of planar
//! polynomial vector fields.

pub mod bifurcate;
pub mod common;
pub mod decompose;
pub mod numerics;
pub mod polyring;
pub mod reversible;
pub mod systems;
pub mod sysio;
