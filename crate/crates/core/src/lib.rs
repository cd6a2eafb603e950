//! Hopf actions of Taft algebras on path algebras of Schurian quivers.

pub mod cyclo;
pub mod quiver;
pub mod symmetry;
pub mod taft;
pub mod verifier;
pub mod oracle;
pub mod extensions;
pub mod fixtures;
pub mod cli;
