//! Exact and Monte Carlo computations for random walks in Dirichlet random
//! environments on finite directed graphs.

pub mod error;
pub mod graph;
pub mod identity;
pub mod linalg;
pub mod markov;
pub mod seeding;
pub mod special;
pub mod stats;
pub mod tol;

pub use error::{Result, WalkError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
