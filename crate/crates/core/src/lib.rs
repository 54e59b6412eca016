pub mod attack;
pub mod baselines;
pub mod criteria;
pub mod harness;
pub mod predictors;
pub mod trajcore;
