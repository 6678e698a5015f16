//! Morse-Smale surface dynamics laboratory.
//!
//! The crate realizes a family of model surface diffeomorphisms, recovers
//! their combinatorial structure numerically, represents that structure as a
//! portable descriptor, and decides connectivity of characteristic orbit
//! spaces by exact combinatorial computation.

pub mod charspace;
pub mod descriptor;
pub mod families;
pub mod geom;
pub mod models;
