//! Multi-objective operator scheduling for data-flow graphs.
//!
//! Computes the pareto-optimal (area, power) schedules of a DFG under a
//! latency bound and an optional area or power budget, for three functional
//! unit styles: a single supply voltage, static multi-Vdd units, and
//! fine-grained DVS units that switch voltage between uses.

pub mod bb;
mod bound;
pub mod budget;
pub mod cost;
pub mod dfg;
pub mod error;
pub mod library;
pub mod list;
pub mod oracle;
pub mod pareto;
pub mod schedule;
pub mod timing;

pub use bb::{bb_first, bb_first_report, bb_pareto, bound_exceeded, FirstSolution, SearchConfig, SearchReport};
pub use budget::Budget;
pub use cost::{area_of, power_of, ArchMode, CostModel, CostTuple, PowerBreakdown};
pub use dfg::{Dfg, Node, OpType};
pub use error::{CostError, LibraryError, OracleError, ParseError};
pub use library::{ResourceLibrary, VoltageLevel};
pub use list::{list_schedule, ListOutcome, Priority};
pub use oracle::{enumerate_schedules, oracle_front, oracle_fronts, EnumerationBound};
pub use pareto::{dominates, dominates3, ParetoSet};
pub use schedule::{Schedule, Slot};
pub use timing::{compute_timing, validate_schedule, TimingInfo, Violation};
