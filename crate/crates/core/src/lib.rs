//! Revenue-optimal pricing of privacy opt-out options.
//!
//! Users with heterogeneous privacy valuations choose between targeted use of a
//! service, opting out at a cost, or staying away. Providers earn full revenue
//! from targeted users and a fraction `gamma` of it from opted-out users. The
//! crate finds the revenue-maximizing opt-out cost for one provider and the pure
//! equilibria of the cost-setting game between two providers.

pub mod cli;
pub mod decision;
pub mod duopoly;
pub mod error;
pub mod population;
pub mod single_provider;
pub mod sweep;

pub use decision::{
    shares_duopoly, shares_exact, shares_monte_carlo, shares_single, user_choice, Choice, Offer,
    Provider, ProviderShare, Shares,
};
pub use duopoly::{
    best_response_dynamics, best_responses, payoff_matrix, pure_nash, regret, CostGrid,
    DuopolyParams, Dynamics, NashResult, Outcome, PayoffMatrix, Player, ProviderParams,
};
pub use error::{Error, Result};
pub use population::ValuationDistribution;
pub use single_provider::{
    choose_tool, optimal_cost, oracle_optimal_cost, revenue, revenue_no_optout, MarketParams,
    SingleSolution, Tool, ToolChoice,
};
pub use sweep::{
    duopoly_sweep, single_sweep, Axis, SolverSettings, SweepBase, SweepRow, SweepSpec,
};
