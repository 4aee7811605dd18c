//! First-order logic over LTS states with reflexive-transitive closure:
//! syntax, direct evaluation, grounding to a propositional graph, and CNF.

pub mod cnf;
pub mod eval;
pub mod formula;
pub mod ground;
pub mod parse;

pub use cnf::{to_cnf, Cnf};
pub use eval::{eval, holds, Env, EvalError};
pub use formula::{Rel, RelFormula, Term};
pub use ground::{ground, AtomTable, GLit, GroundAtom, GroundError, Grounded, Grounder, PropGraph, Signature};
pub use parse::{parse_formula, parse_formula_tokens, FORMULA_KEYWORDS};
