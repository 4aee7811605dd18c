//! Linear temporal logic without next: syntax, tableau translation to Büchi
//! automata and explicit-state checking by nested depth-first search.

mod buchi;
mod check;
mod formula;
mod lasso;

pub use buchi::{Buchi, BuchiState};
pub use check::{check, explore, CheckError, CheckReport, Explored, Lasso, Step, Verdict};
pub use formula::{is_operator_run, ltl, parse_ltl, parse_ltl_tokens, Ltl, LTL_KEYWORDS};
pub use lasso::eval_lasso;
