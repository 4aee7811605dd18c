use alloc::vec;
use alloc::vec::Vec;

use super::formula::Ltl;

/// Truth of `f` at position 0 of the infinite word whose positions are
/// `0..len`, where position `len - 1` is followed by `loop_start`.
/// `atom(i, name)` gives the value of an atom at position `i`.
pub fn eval_lasso(f: &Ltl, len: usize, loop_start: usize, atom: &dyn Fn(usize, &str) -> bool) -> bool {
    assert!(loop_start < len, "loop start must be inside the word");
    values(f, len, loop_start, atom)[0]
}

fn values(f: &Ltl, n: usize, ls: usize, atom: &dyn Fn(usize, &str) -> bool) -> Vec<bool> {
    let succ = |i: usize| if i + 1 == n { ls } else { i + 1 };
    match f {
        Ltl::True => vec![true; n],
        Ltl::False => vec![false; n],
        Ltl::Atom(a) => (0..n).map(|i| atom(i, a)).collect(),
        Ltl::Not(g) => values(g, n, ls, atom).into_iter().map(|b| !b).collect(),
        Ltl::And(a, b) => {
            let (x, y) = (values(a, n, ls, atom), values(b, n, ls, atom));
            x.iter().zip(&y).map(|(p, q)| *p && *q).collect()
        }
        Ltl::Or(a, b) => {
            let (x, y) = (values(a, n, ls, atom), values(b, n, ls, atom));
            x.iter().zip(&y).map(|(p, q)| *p || *q).collect()
        }
        // Least fixpoint of u = b | (a & X u).
        Ltl::Until(a, b) => {
            let (x, y) = (values(a, n, ls, atom), values(b, n, ls, atom));
            let mut u = vec![false; n];
            fixpoint(&mut u, |u, i| y[i] || (x[i] && u[succ(i)]));
            u
        }
        // Greatest fixpoint of r = b & (a | X r).
        Ltl::Release(a, b) => {
            let (x, y) = (values(a, n, ls, atom), values(b, n, ls, atom));
            let mut r = vec![true; n];
            fixpoint(&mut r, |r, i| y[i] && (x[i] || r[succ(i)]));
            r
        }
    }
}

fn fixpoint(v: &mut [bool], step: impl Fn(&[bool], usize) -> bool) {
    loop {
        let mut changed = false;
        for i in (0..v.len()).rev() {
            let nv = step(v, i);
            if nv != v[i] {
                v[i] = nv;
                changed = true;
            }
        }
        if !changed {
            return;
        }
    }
}
