//! Branch-and-bound search for subsets of minimum cost when the cost is
//! U-shaped along every chain of the Boolean lattice, plus the baselines,
//! cost functions and dataset preprocessing used to benchmark it.
//!
//! ```
//! use ucurve::cost::synth_u_instance;
//! use ucurve::baselines::exhaustive;
//! use ucurve::search::{run_ucurve, SearchConfig};
//!
//! let cost = synth_u_instance(8, 42).unwrap();
//! let found = run_ucurve(&cost, SearchConfig::with_seed(42)).unwrap();
//! let oracle = exhaustive(&cost, 1, false).unwrap();
//! assert_eq!(found.best().unwrap().1, oracle.best().unwrap().1);
//! ```

pub mod baselines;
pub mod cost;
pub mod data;
pub mod lattice;
pub mod search;

pub use cost::{CostFunction, EvaluationLedger};
pub use lattice::{FeatureSubset, LatticeConfig};
pub use search::{run_ucurve, SearchConfig, SearchOutcome};
