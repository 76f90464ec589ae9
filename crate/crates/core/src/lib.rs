//! Exact analysis of coordination games on graphs under adversarial
//! manipulation.
//!
//! Agents on a connected graph play a two-action coordination game where
//! convention `x` carries a gain `1 + α` over `y`. An adversary either
//! attaches imposters to every agent (*broad* attacks) or pins a subset of
//! agents to fixed actions (*focused* attacks). Under log-linear learning the
//! long-run behavior concentrates on potential maximizers, so the system's
//! exposure is measured by the worst efficiency among those maximizers.
//!
//! Everything here is exact: gains and risks are [`Rational`]s, enumeration
//! compares integer-scaled scores, and the linear programs behind randomized
//! gain strategies are solved with an exact simplex.

pub mod adversary;
pub mod constructions;
pub mod error;
pub mod game;
pub mod graph;
pub mod io;
mod parallel;
pub mod randomized;
pub mod rational;
pub mod risk;
mod space;
pub mod sss;
pub mod verify;

pub use adversary::{ActionSpace, Attack, BroadAttack, FocusedAttack};
pub use error::{Error, Result};
pub use game::{Action, ActionProfile};
pub use graph::{Graph, NodeSet, Partition};
pub use rational::Rational;
pub use space::ENUMERATION_CAP;
