//! Tooling for Set-of-Mark style visual prompting data.
//!
//! The crate ingests COCO-style segmentation annotations, places numbered
//! tags on object masks, produces "list the tagged items" and QA
//! instruction-tuning records (from ground truth or through a chat-completions
//! vision model), probes corpora for listing-style text, scores predicted
//! listings with list-wise accuracy, and mixes datasets reproducibly.

pub mod annotations;
pub mod datamix;
pub mod error;
pub mod eval;
pub mod jsonio;
pub mod listparse;
pub mod markalloc;
pub mod pipeline;
pub mod pool;
pub mod textgen;

pub use error::{Error, ErrorClass, Result};
