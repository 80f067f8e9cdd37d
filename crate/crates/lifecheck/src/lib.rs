//! lifecheck — a static checker for lifetime annotations on function
//! signatures of an ownership-based systems language.
//!
//! The analysis runs in four stages over each function:
//!
//! 1. [`extract`] derives, for every argument and the return type, the nested
//!    values reachable from it together with the lifetime each value must
//!    outlive, plus the outlives bounds implied by the argument types.
//! 2. [`pattern`] pairs those facts across (argument, return) and
//!    (argument, argument) positions and flags pairs whose lifetimes permit a
//!    use-after-free or aliased mutable access.
//! 3. [`alias`] runs a flow- and field-sensitive intra-procedural points-to
//!    analysis over the function body to keep only pairs between which a
//!    value can actually travel.
//! 4. [`filter`] suppresses known-benign signature shapes (iterator
//!    `next`/`next_back` style methods) before reporting.
//!
//! See the `examples/` directory for one runnable demonstration of each
//! stage, and [`pipeline`] / [`cli`] for the assembled scanner.

pub mod alias;
pub mod corpus;
pub mod extract;
pub mod filter;
pub mod model;
pub mod parse;
pub mod pattern;
pub mod pipeline;
pub mod report;

pub mod cli;

pub use model::{
    type_equal, FunctionModel, Lifetime, MatchPolicy, StructDef, StructTable, SubjectType,
    ValuePath,
};
pub use pipeline::{analyze_source, scan_paths, AnalysisConfig};
pub use report::{emit_report, Finding, ReportFormat};
