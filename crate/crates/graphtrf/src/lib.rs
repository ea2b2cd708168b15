//! Zero-shot graph QA over multiple topology representation formats (TRFs),
//! with GRE-based preference probing and a learned per-question router.
//!
//! Pipeline stages (mirrored by the CLI subcommands):
//! generate instances -> render prompts -> probe a model -> build the
//! TRF-preference dataset -> train the router -> route -> evaluate.

pub mod client;
pub mod error;
pub mod graph;
pub mod journal;
pub mod manifest;
pub mod metrics;
pub mod oracles;
pub mod protocol;
pub mod render;
pub mod report;
pub mod router;
pub mod trf;

pub use error::{Error, Result};
