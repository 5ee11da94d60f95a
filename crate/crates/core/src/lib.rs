//! Workbench for constraint satisfaction problems with few variables and
//! unbounded, ordered domains (udCSP).
//!
//! An instance consists of a domain size `n` (unary scale), a small set of
//! variables, and constraints of the form `R(m_1(x_1), ..., m_r(x_r))` where
//! `R` is a relation from a fixed finite-domain base language and the `m_i`
//! are unary guarding maps from `[n]` into the relation's domain. Map
//! families (one-hot, monotone, anti-monotone, unrestricted) carve out the
//! problem variants; polymorphism patterns classify base languages; the
//! solver hierarchy covers arc-consistency solvers, a 2-SAT pipeline, a
//! branching/exact-cover solver for one-hot instances, and a twin-width
//! dynamic program for binary monotone instances.

pub mod bits;
pub mod definability;
pub mod error;
pub mod generators;
pub mod model;
pub mod patterns;
pub mod propagation;
pub mod random;
pub mod solvers;
pub mod width;

pub use error::{Error, Result};

/// Enumeration and oracle budgets. Everything here is overridable; the
/// defaults match desk scale.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    /// Cap on the number of maps enumerated for one family instantiation.
    pub max_maps: usize,
    /// Cap on `n^k` for brute-force solution enumeration.
    pub max_oracle: u64,
    /// Cap on matrix dimensions in exact grid-rank search.
    pub max_matrix_dim: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_maps: 1_000_000,
            max_oracle: 10_000_000,
            max_matrix_dim: 64,
        }
    }
}

impl Budget {
    /// Budget scaled by the `UDCSP_BUDGET` environment variable when set
    /// (a multiplier on the enumeration caps).
    pub fn from_env() -> Self {
        let mut b = Budget::default();
        if let Ok(s) = std::env::var("UDCSP_BUDGET") {
            if let Ok(f) = s.parse::<f64>() {
                if f > 0.0 {
                    b.max_maps = (b.max_maps as f64 * f) as usize;
                    b.max_oracle = (b.max_oracle as f64 * f) as u64;
                }
            }
        }
        b
    }
}
