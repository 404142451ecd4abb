//! File formats, a parallel benchmark driver and the `levy-ig` command line
//! on top of [`levy_ig_core`].
//!
//! * [`model_file`]: JSON model specifications;
//! * [`samples`]: sample CSV files;
//! * [`json`]: deterministic JSON output;
//! * [`bench`]: the bias benchmark on a rayon pool (`LEVY_IG_THREADS`);
//! * [`cli`]: argument parsing and dispatch.

pub mod bench;
pub mod cli;
pub mod error;
pub mod json;
pub mod model_file;
pub mod samples;

pub use error::{Error, Result};
pub use model_file::{load_model, ModelSpec};
