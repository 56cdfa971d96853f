//! Scalar data fields, the obstacle extension into the boundary collar and
//! the force/flux balance checks on the shifted data.

mod balance;
mod expr;
mod field;
mod obstacle;

pub use balance::{check_balance, BalanceData, BalanceRegion};
pub use expr::{parse_expr, BinOp, Expr, ExprKind, Func, Var};
pub use field::{parse_field, FieldSource, ScalarField};
pub use obstacle::{extend_obstacle, ObstacleExtension, QuinticCutoff};
