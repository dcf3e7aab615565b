//! Forecasting and evaluation of three-way football match outcomes.

pub mod data;
pub mod davidson;
pub mod dirichlet;
pub mod error;
pub mod eval;
pub mod optim;
pub mod poisson;
pub mod predictors;
pub mod report;
pub mod scoring;
pub mod selftest;
pub mod sim;

pub use data::{MatchRecord, Outcome, Prediction, Season, TeamId};
pub use error::{Error, Result};
