//! Concrete rewrite systems for the multiway engine.

pub mod set;
pub mod string;
pub mod termsys;
pub mod tm;

pub use set::{SetRule, SetState, SetSystem};
pub use string::{check_complete_consistent, negation, StringSystem};
pub use termsys::{TermRule, TermSystem};
pub use tm::{TmState, TuringSystem};
