//! Mixed-integer linear programming: model, LP engine, branch-and-bound and
//! the encoding of plant dynamics and temporal constraints.

mod bnb;
mod encode;
mod lp_format;
mod model;
mod simplex;

pub use encode::{
    add_l1_objective, encode_dynamics, encode_formula, EncodeError, EncodeOptions, FormulaContext,
    LeaderVars, Literal,
};
pub use bnb::{solve, BranchAndBound, MilpSolution, MilpSolver, MilpStatus};
pub use lp_format::to_lp_string;
pub use model::{Constraint, LinExpr, MilpModel, ModelError, Sense, VarId, VarKind, Variable};
pub use simplex::{LpEngine, LpStatus};
