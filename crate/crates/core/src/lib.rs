//! Prover for almost-sure innermost termination of probabilistic term
//! rewrite systems, based on annotated dependency pairs.

pub mod adp;
pub mod engine;
pub mod exec;
pub mod oracle;
pub mod parse;
pub mod poly;
pub mod processors;
pub mod ptrs;
pub mod term;
pub mod transforms;
