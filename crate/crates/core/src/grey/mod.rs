//! Non-homogeneous discrete grey model with fuzzy-weight Markov correction.

mod dgm;
mod forecast;
mod fuzzy;
mod markov;

pub use dgm::{ago, dgm_forecast, fit_dgm, iago, q_of_xi, DgmModel, GreySequence};
pub use forecast::{
    dgm_fmarkov_forecast, residual_ratio_series, GreyMarkovFit, GreyMarkovOptions, MidpointMode,
};
pub use fuzzy::{fuzzy_transition, FuzzyMarkovModel, FuzzyTransition, TriangularMemberships};
pub use markov::{
    markov_test, partition_states, ChiSquareVariant, MarkovTest, PartitionScheme, StatePartition,
};
