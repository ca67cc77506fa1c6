//! Evaluation of guard goals against context-predicate definitions.

use alloc::{format, string::ToString, vec::Vec};
use core::cmp::Ordering;

use crate::error::{GuardError, TermError};
use crate::problem::{CmpOp, ContextPredicate, Goal, Problem};
use crate::term::{match_pairs, Pattern, Substitution, Term};

/// Call depth beyond which a definition is treated as recursive. Validated
/// problems are acyclic, so this only guards hand-assembled inputs.
const MAX_DEPTH: usize = 256;

/// All extensions of `s` satisfying `goal`, without duplicates.
pub fn eval_guard(problem: &Problem, goal: &Goal, s: &Substitution) -> Result<Vec<Substitution>, GuardError> {
    let mut out: Vec<Substitution> = Vec::new();
    let mut work = s.clone();
    solve(problem, core::slice::from_ref(goal), &mut work, 0, &mut |r| {
        if !out.contains(r) {
            out.push(r.clone());
        }
        Ok(())
    })?;
    Ok(out)
}

/// Every ground argument tuple of `pred` consistent with the given inputs.
/// `None` marks an output position.
pub fn call_pred(
    problem: &Problem,
    pred: &ContextPredicate,
    args: &[Option<Term>],
) -> Result<Vec<Vec<Term>>, GuardError> {
    call(problem, pred, args, 0)
}

type Sink<'a> = dyn FnMut(&Substitution) -> Result<(), GuardError> + 'a;

fn solve(
    problem: &Problem,
    goals: &[Goal],
    s: &mut Substitution,
    depth: usize,
    sink: &mut Sink<'_>,
) -> Result<(), GuardError> {
    let Some((goal, rest)) = goals.split_first() else {
        return sink(s);
    };
    let insufficient = || GuardError::Insufficient(goal.to_string());
    match goal {
        Goal::Compare(op, l, r) => {
            let lv = eval_opt(l, s)?;
            let rv = eval_opt(r, s)?;
            match (lv, rv) {
                (Some(a), Some(b)) => {
                    if compare(*op, &a, &b).ok_or_else(|| GuardError::NotComparable(goal.to_string()))? {
                        solve(problem, rest, s, depth, sink)?;
                    }
                    Ok(())
                }
                (None, Some(t)) | (Some(t), None) if *op == CmpOp::Eq => {
                    let var = match (l, r) {
                        (Pattern::Var(v), _) if !s.is_bound(v) => v.clone(),
                        (_, Pattern::Var(v)) if !s.is_bound(v) => v.clone(),
                        _ => return Err(insufficient()),
                    };
                    let mark = s.mark();
                    s.bind(var, t);
                    let r = solve(problem, rest, s, depth, sink);
                    s.undo(mark);
                    r
                }
                _ => Err(insufficient()),
            }
        }
        Goal::Call(atom) => {
            let pred = problem
                .guard(&atom.pred, atom.arity())
                .ok_or_else(|| GuardError::Unknown(format!("{}/{}", atom.pred, atom.arity())))?;
            let mut inputs = Vec::with_capacity(atom.arity());
            for arg in &atom.args {
                match eval_opt(arg, s)? {
                    Some(t) => inputs.push(Some(t)),
                    None if matches!(arg, Pattern::Var(_)) => inputs.push(None),
                    None => return Err(insufficient()),
                }
            }
            for tuple in call(problem, pred, &inputs, depth + 1)? {
                let mark = s.mark();
                let mut ok = true;
                for (arg, value) in atom.args.iter().zip(tuple) {
                    let Pattern::Var(v) = arg else { continue };
                    match s.get(v) {
                        Some(existing) => {
                            if *existing != value {
                                ok = false;
                                break;
                            }
                        }
                        None => s.bind(v.clone(), value),
                    }
                }
                let r = if ok { solve(problem, rest, s, depth, sink) } else { Ok(()) };
                s.undo(mark);
                r?;
            }
            Ok(())
        }
    }
}

/// Evaluates a pattern, mapping "still has unbound variables" to `None`.
fn eval_opt(p: &Pattern, s: &Substitution) -> Result<Option<Term>, GuardError> {
    match p.eval(s) {
        Ok(t) => Ok(Some(t)),
        Err(TermError::Unbound(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn compare(op: CmpOp, a: &Term, b: &Term) -> Option<bool> {
    match op {
        CmpOp::Eq => return Some(a == b),
        CmpOp::Ne => return Some(a != b),
        _ => {}
    }
    let ord = a.as_int()?.cmp(&b.as_int()?);
    Some(match op {
        CmpOp::Lt => ord == Ordering::Less,
        CmpOp::Le => ord != Ordering::Greater,
        CmpOp::Gt => ord == Ordering::Greater,
        CmpOp::Ge => ord != Ordering::Less,
        CmpOp::Eq | CmpOp::Ne => unreachable!(),
    })
}

fn call(
    problem: &Problem,
    pred: &ContextPredicate,
    args: &[Option<Term>],
    depth: usize,
) -> Result<Vec<Vec<Term>>, GuardError> {
    if depth > MAX_DEPTH {
        return Err(GuardError::Recursive(format!("{}/{}", pred.name, pred.arity)));
    }
    let mut results: Vec<Vec<Term>> = Vec::new();
    for rule in &pred.rules {
        let mut local = Substitution::new();
        let pairs = rule
            .head
            .args
            .iter()
            .zip(args)
            .filter_map(|(p, a)| a.as_ref().map(|t| (p, t)));
        let matched = match match_pairs(pairs, &mut local) {
            Ok(m) => m,
            Err(TermError::NonMatchable) => return Err(GuardError::Insufficient(rule.head.to_string())),
            Err(e) => return Err(e.into()),
        };
        if !matched {
            continue;
        }
        solve(problem, &rule.body, &mut local, depth, &mut |l| {
            let mut tuple = Vec::with_capacity(args.len());
            for (p, a) in rule.head.args.iter().zip(args) {
                tuple.push(match a {
                    Some(t) => t.clone(),
                    None => p.eval(l).map_err(|e| match e {
                        TermError::Unbound(_) => GuardError::Insufficient(rule.head.to_string()),
                        e => e.into(),
                    })?,
                });
            }
            if !results.contains(&tuple) {
                results.push(tuple);
            }
            Ok(())
        })?;
    }
    Ok(results)
}
