use crate::error::{Error, Result};

use super::{parse_problem, Problem};

pub const BUILTIN_NAMES: [&str; 3] = ["ex1", "ex2", "ex3"];

const EX1: &str = include_str!("../../problems/ex1.prob");
const EX2: &str = include_str!("../../problems/ex2.prob");
const EX3: &str = include_str!("../../problems/ex3.prob");

/// Source text of a built-in problem file.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    match name.trim_end_matches(".prob") {
        "ex1" => Some(EX1),
        "ex2" => Some(EX2),
        "ex3" => Some(EX3),
        _ => None,
    }
}

/// The three reference instances: an irrational half-plane lattice whose
/// Lagrangian bound is `−∞` (ex1), a union of two irrational pieces with a
/// gap between the bound and the closed-hull relaxation (ex2), and the
/// irrational slab with no rational separating hyperplane (ex3).
pub fn builtin(name: &str) -> Result<Problem> {
    let src = builtin_source(name).ok_or_else(|| Error::UnknownBuiltin(name.to_string()))?;
    parse_problem(src)
}
