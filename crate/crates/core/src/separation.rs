//! Depth-first search for ground clause instances violated by an LP point.
//!
//! A search state is `(θ, z, n, p)`: the substitution built so far, the
//! activity of the partial ground clause, and the negative and positive
//! ground atoms collected so far. Clause items are processed in order.
//! Generator literals enumerate the support of the LP point, so only atoms
//! with positive value are ever tried there; every other negative literal
//! would contribute `1 − 0 = 1` and push `z` past the threshold at once.

use alloc::{format, string::String, vec::Vec};
use core::fmt;

use hashbrown::HashMap;

use crate::error::SolveError;
use crate::guard::eval_guard;
use crate::intern::{AtomId, AtomTable};
use crate::problem::{ClauseItem, Problem};
use crate::term::{match_atom_into, GroundAtom, Substitution, Symbol};

/// Values of an LP point, indexed for the search.
#[derive(Clone, Debug, Default)]
pub struct Support {
    values: Vec<f64>,
    by_pred: HashMap<(Symbol, usize), Vec<(AtomId, f64)>>,
}

impl Support {
    /// Builds the view from `(atom, value)` pairs. Atoms not listed read as 0.
    /// Only values above `threshold` enter the generator lists.
    pub fn new<I>(table: &AtomTable, values: I, threshold: f64) -> Self
    where
        I: IntoIterator<Item = (AtomId, f64)>,
    {
        let mut s = Support { values: alloc::vec![0.0; table.len()], by_pred: HashMap::new() };
        for (id, v) in values {
            s.values[id.index()] = v;
            if v > threshold {
                let a = table.atom(id);
                s.by_pred.entry((a.pred.clone(), a.arity())).or_default().push((id, v));
            }
        }
        for list in s.by_pred.values_mut() {
            list.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        }
        s
    }

    /// The 0/1 point of a finite interpretation.
    pub fn indicator(table: &AtomTable, model: &[AtomId]) -> Self {
        Self::new(table, model.iter().map(|&id| (id, 1.0)), 0.5)
    }

    pub fn value(&self, id: AtomId) -> f64 {
        self.values.get(id.index()).copied().unwrap_or(0.0)
    }

    fn candidates(&self, pred: &Symbol, arity: usize) -> &[(AtomId, f64)] {
        self.by_pred.get(&(pred.clone(), arity)).map_or(&[], Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.by_pred.is_empty()
    }
}

/// A violated ground instance of a clause.
#[derive(Clone, Debug, PartialEq)]
pub struct Cut {
    pub clause: usize,
    pub theta: Substitution,
    pub neg: Vec<AtomId>,
    pub pos: Vec<AtomId>,
    /// Activity of the ground clause at the separated point.
    pub z: f64,
}

impl Cut {
    pub fn violation(&self) -> f64 {
        1.0 - self.z
    }

    /// The clausal inequality as `(entries, rhs)` over atom ids:
    /// `Σ_pos x − Σ_neg x ≥ 1 − |neg|`.
    pub fn row(&self) -> (Vec<(AtomId, f64)>, f64) {
        let mut e: Vec<(AtomId, f64)> = self.pos.iter().map(|&a| (a, 1.0)).collect();
        e.extend(self.neg.iter().map(|&a| (a, -1.0)));
        (e, 1.0 - self.neg.len() as f64)
    }

    /// Canonical identity of the ground clause, independent of literal order.
    pub fn key(&self) -> (Vec<AtomId>, Vec<AtomId>) {
        let mut n = self.neg.clone();
        let mut p = self.pos.clone();
        n.sort_unstable();
        p.sort_unstable();
        (n, p)
    }

    /// The trace line `cut <clause> θ z`.
    pub fn trace_line(&self, problem: &Problem) -> String {
        format!("cut {} {} {}", problem.clauses()[self.clause].name, self.theta, self.z)
    }
}

/// A clause instance falsified by a candidate model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Position of the clause in the problem.
    pub index: usize,
    pub clause: String,
    pub theta: Substitution,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "clause \"{}\" violated at {}", self.clause, self.theta)
    }
}

struct Found {
    theta: Substitution,
    neg: Vec<AtomId>,
    pos: Vec<GroundAtom>,
    z: f64,
}

struct Search<'a> {
    problem: &'a Problem,
    items: &'a [ClauseItem],
    table: &'a AtomTable,
    support: &'a Support,
    threshold: f64,
    limit: usize,
    found: Vec<Found>,
}

impl Search<'_> {
    fn done(&self) -> bool {
        self.found.len() >= self.limit
    }

    fn dfs(
        &mut self,
        k: usize,
        theta: &mut Substitution,
        z: f64,
        n: &mut Vec<AtomId>,
        p: &mut Vec<GroundAtom>,
    ) -> Result<(), SolveError> {
        if z >= self.threshold || self.done() {
            return Ok(());
        }
        let Some(item) = self.items.get(k) else {
            self.found.push(Found { theta: theta.clone(), neg: n.clone(), pos: p.clone(), z });
            return Ok(());
        };
        match item {
            ClauseItem::Neg { atom, generator: true } => {
                let support = self.support;
                // candidates are sorted by value, so once one fails on z every
                // later one fails too, except atoms already in n
                let mut exhausted = false;
                for &(id, v) in support.candidates(&atom.pred, atom.arity()) {
                    let already = n.contains(&id);
                    if exhausted && !already {
                        continue;
                    }
                    let z2 = if already { z } else { z + 1.0 - v };
                    if z2 >= self.threshold {
                        exhausted = true;
                        if n.is_empty() {
                            break;
                        }
                        continue;
                    }
                    let mark = theta.mark();
                    if match_atom_into(atom, self.table.atom(id), theta)? {
                        if !already {
                            n.push(id);
                        }
                        let r = self.dfs(k + 1, theta, z2, n, p);
                        if !already {
                            n.pop();
                        }
                        theta.undo(mark);
                        r?;
                        if self.done() {
                            break;
                        }
                    }
                }
                Ok(())
            }
            ClauseItem::Neg { atom, generator: false } => {
                let g = atom.eval(theta)?;
                // an atom without a column has value 0 and contributes 1
                let Some(id) = self.table.get(&g) else { return Ok(()) };
                if n.contains(&id) {
                    return self.dfs(k + 1, theta, z, n, p);
                }
                n.push(id);
                let r = self.dfs(k + 1, theta, z + 1.0 - self.support.value(id), n, p);
                n.pop();
                r
            }
            ClauseItem::Pos(atom) => {
                let g = atom.eval(theta)?;
                if p.contains(&g) {
                    return self.dfs(k + 1, theta, z, n, p);
                }
                let v = self.table.get(&g).map_or(0.0, |id| self.support.value(id));
                p.push(g);
                let r = self.dfs(k + 1, theta, z + v, n, p);
                p.pop();
                r
            }
            ClauseItem::Guard(goal) => {
                for mut s in eval_guard(self.problem, goal, theta)? {
                    self.dfs(k + 1, &mut s, z, n, p)?;
                    if self.done() {
                        break;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Finds up to `limit` ground instances of clause `clause` whose activity is
/// below `1 − eps` at the point `support`. Positive-literal atoms of emitted
/// cuts are interned; creating their columns is left to the caller.
pub fn separate(
    problem: &Problem,
    clause: usize,
    table: &mut AtomTable,
    support: &Support,
    eps: f64,
    limit: usize,
) -> Result<Vec<Cut>, SolveError> {
    let found = run(problem, clause, table, support, 1.0 - eps, limit)?;
    Ok(found
        .into_iter()
        .map(|f| {
            let pos = f.pos.into_iter().map(|g| table.intern(g)).collect();
            let cut = Cut { clause, theta: f.theta, neg: f.neg, pos, z: f.z };
            debug_assert!(cut.violation() > eps);
            cut
        })
        .collect())
}

fn run(
    problem: &Problem,
    clause: usize,
    table: &AtomTable,
    support: &Support,
    threshold: f64,
    limit: usize,
) -> Result<Vec<Found>, SolveError> {
    let mut search = Search {
        problem,
        items: &problem.clauses()[clause].items,
        table,
        support,
        threshold,
        limit,
        found: Vec::new(),
    };
    if limit > 0 {
        search.dfs(0, &mut Substitution::new(), 0.0, &mut Vec::new(), &mut Vec::new())?;
    }
    Ok(search.found)
}

/// Checks the interpretation that is true exactly on `model`. Atoms of the
/// model must already be interned.
pub fn check_model(problem: &Problem, table: &AtomTable, model: &[AtomId]) -> Result<Option<Violation>, SolveError> {
    let support = Support::indicator(table, model);
    for (i, c) in problem.clauses().iter().enumerate() {
        if let Some(f) = run(problem, i, table, &support, 1.0, 1)?.pop() {
            return Ok(Some(Violation { index: i, clause: c.name.clone(), theta: f.theta }));
        }
    }
    Ok(None)
}
