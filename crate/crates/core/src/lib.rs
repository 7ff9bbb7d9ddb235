//! Feature screening for categorical node attributes on directed networks
//! by the log pseudo-likelihood ratio, with network naive Bayes and network
//! logistic classifiers and a simulation toolkit.

pub mod classify;
pub mod counts;
pub mod dataset;
pub mod plr;
pub mod rng;
pub mod screening;
pub mod simgen;
pub mod special;

#[cfg(any(test, feature = "oracle"))]
pub mod oracle;

pub use dataset::{DataError, Feature, FeatureSet, Level, NodeDataset, RawDataset};
pub use plr::{plr_statistic, PlrError, PlrStat};
