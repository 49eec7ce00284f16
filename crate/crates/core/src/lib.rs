//! Two-stage influence seeding on social graphs.
//!
//! A first-stage budget is spent on members of an accessible core set; once
//! their neighbors reveal whether they are reachable, the rest of the budget
//! is spent on the realized neighbors. The crate provides graph loading and
//! generation, influence weights and reachability models, the fractional
//! knapsack oracle for the second stage, greedy and LP-based algorithms for
//! the first stage, and exact and sampled evaluators.

pub mod error;
pub mod evaluation;
pub mod generators;
pub mod graph;
pub mod greedy;
pub mod influence;
pub mod instance;
pub mod knapsack;
pub mod lp;

pub use error::{Error, Result};
pub use graph::Graph;
pub use greedy::{GreedyOptions, SampleAndPrune, SeedingSolution, SplitStrategy};
pub use instance::{build_instance, BuildOptions, Instance};
pub use knapsack::{Item, SortedItemList};
