//! Synthetic instance generators, evaluation metrics, dataset input and
//! splitting, validation-grid weight selection, and the end-to-end
//! benchmark protocols built from them.

pub mod io;
pub mod metrics;
pub mod protocol;
pub mod synthetic;
pub mod tuning;
