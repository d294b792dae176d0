//! cheegerlab: comparison geometry of warped-product model spaces and
//! Cheeger-constant bounds for minimal submanifolds of space forms.
//!
//! The toolkit has two halves that meet in the comparison theorems:
//!
//! 1. a one-dimensional side (model spaces, isoperimetric comparison
//!    spaces, balance conditions, Cheeger bound values), and
//! 2. a mesh side (space-form ambients, sampled submanifolds, extrinsic
//!    growth profiles, discrete Laplacian checks).
//!
//! The CLI binary (`cheegerlab`) wires both together; see the README for
//! command examples.

pub mod ambient;
pub mod error;
pub mod extrinsic;
pub mod generators;
pub mod iso_comparison;
pub mod laplacian;
pub mod mesh;
pub mod model_space;
pub mod numerics;

pub use error::{Error, Result};

/// Initializes the global rayon pool from `CHEEGERLAB_THREADS`, defaulting to
/// all cores. Safe to call more than once; later calls are ignored.
///
/// All parallel reductions order their partial sums by chunk index, so the
/// numerical output is byte-identical for every thread count.
pub fn init_thread_pool_from_env() {
    let threads = std::env::var("CHEEGERLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0);
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
