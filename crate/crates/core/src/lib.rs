//! Hierarchical proof checking: a front end for structured declarative
//! proofs, generation of independent leaf obligations, filtration of hidden
//! assumptions, and a tableau prover for first-order logic with sets.

pub mod engine;
pub mod export;
pub mod meta;
pub mod prover;
pub mod surface;
