//! Expression front ends: real superpotentials with symbolic derivatives, and
//! octonion expressions whose grouping is preserved exactly.

mod lexer;
mod oct;
mod scalar;

pub use oct::{eval_oct_expr, parse_oct_expr, parse_oct_expr_with, GroupingMode, OctExpr, OctLiteral, OctParse};
pub use scalar::{parse_scalar_expr, Func, ScalarExpr, Var};

use crate::error::Result;
use crate::grid::{Grid, ScalarField};

/// Samples `e` at every node of `grid`, in the grid's row-major layout.
pub fn eval_on_grid(e: &ScalarExpr, grid: &Grid) -> Result<ScalarField> {
    let data = (0..grid.len())
        .map(|idx| e.eval(grid.point(idx)).map(|v| crate::Scalar::new(v, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalarField::from_vec(*grid, data))
}
