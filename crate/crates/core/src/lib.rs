//! Mining, scoring, and desk-scale alignment for extract-method refactoring.
//!
//! The pipeline has five stages, one per CLI subcommand:
//!
//! - `mine`: walk git repositories commit-by-commit, detect extract-method
//!   refactorings, and emit filtered, split JSONL datasets.
//! - `score`: compute the composite reward (syntax, compile, detect) for a
//!   generated refactoring against its pre-refactoring method.
//! - `metrics`: BLEU / ROUGE-L / CodeBLEU over (candidate, reference) pairs.
//! - `train`: supervised fine-tuning plus PPO with an adaptive KL penalty
//!   over a built-in featurized-softmax policy and a synthetic micro-corpus.
//! - `eval`: qualitative report (parse / compile / detect percentages and
//!   unit-test pass counts) for generated outputs.

pub mod cli;
pub mod detect;
pub mod error;
pub mod harness;
pub mod lang;
pub mod metrics;
pub mod miner;
pub mod reward;
pub mod trainer;
pub mod wellformed;

pub use error::{Error, Result};
