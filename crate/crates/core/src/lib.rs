//! Hard-instance lab for multi-pass graph streaming.
//!
//! The crate builds families of edge streams whose answer is easy to verify
//! offline but costly to extract under pass and space budgets: layered
//! pointer-chasing graphs, noisy gap cycle counting (NGC) instances made of
//! short cycles plus path "noise", XOR products of pointer-chasing instances,
//! and stream-to-stream reductions from NGC to MST / matching / max-cut /
//! acyclic-subgraph / property-testing problems.
//!
//! Everything is seeded and reproducible: generators are pure functions of
//! their parameters and a seed, the streaming runner meters persisted state
//! in bits under a fixed encoding, and every construction is checkable by the
//! exact oracles in [`oracles`].

pub mod instances;
pub mod oracles;
pub mod reductions;
pub mod seeds;
pub mod solvers;
pub mod stream;
pub mod xor_lab;
