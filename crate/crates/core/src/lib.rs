//! Intersection-typed λ-calculi with memory: syntax, typing, reduction,
//! the degree-indexed simplification measure, and brute-force oracles.

pub mod syntax;
pub mod typing;
pub mod reduction;
pub mod measure;
pub mod oracle;
