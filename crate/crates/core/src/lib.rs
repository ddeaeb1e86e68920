//! Exact-arithmetic toolkit for one-dimensional holomorphic foliations on
//! projective space that are singular along complete-intersection
//! subvarieties: Milnor numbers, kernel invariants, blow-up transforms,
//! classification of singular centers, and curve desingularization in
//! dimension three.

pub mod blowup;
pub mod chern;
pub mod cli;
pub mod desing;
pub mod field;
pub mod linalg;
pub mod nu;
pub mod oracle;
pub mod poly;
pub mod tower;
pub mod unipoly;
