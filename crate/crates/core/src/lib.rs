//! Fuzzy metric spaces in the sense of George and Veeramani, classification of sequences
//! (Cauchy, G-Cauchy, pseudo-Cauchy, cofinally Cauchy) at an explicit finite scale, and the
//! constructive procedures behind the characterisations of weak G-completeness.
//!
//! Every check works over exact rationals unless a space declares float mode, and every
//! verdict carries the finite evidence it was decided on.

pub mod cli;
pub mod completion;
pub mod descriptor;
pub mod error;
pub mod extract;
pub mod gallery;
pub mod rational;
pub mod sequences;
pub mod space;
pub mod suites;
pub mod tnorm;
pub mod verdict;

pub use error::{Error, Result};
pub use rational::{q, Num, Q};
pub use sequences::{classify, ClassificationReport, Scale, SequenceSpec};
pub use space::{standard_from_metric, ArithmeticMode, FuzzyMetricSpace, MetricSpace, Point, Subset, Universe};
pub use tnorm::TNorm;
pub use verdict::{Status, Verdict, Witness};
