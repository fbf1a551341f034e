//! Retrieval data structures (static functions) built from random band
//! systems over GF(2): every key hashes to one short block of random bits at
//! a random position, the resulting sorted band system is solved by plain
//! Gaussian elimination, and a query is a single windowed inner product.
//!
//! The crate also carries the simulation machinery used to check the
//! solver's behaviour empirically: coin-flipping Robin Hood placement,
//! per-cell heights, and the discretised M/D/1 queue that bounds them.

pub mod analysis;
pub mod band_solver;
pub mod bitkit;
pub mod chunked;
pub mod flat;
pub mod format;
pub mod row_gen;
pub mod sim_rng;
pub mod synth;

pub use band_solver::{BandRow, BandSystem, EliminationOutcome, SolutionTable, SolverError};
pub use bitkit::{BitVec, Block};
pub use chunked::{ChunkDirectory, ChunkedParams, ChunkedRetrieval};
pub use flat::{ConstructError, FlatParams, FlatRetrieval};
pub use format::FormatError;
pub use row_gen::{HashSeed, RowParams};
