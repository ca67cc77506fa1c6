//! Branch-price-and-cut over the lazily grown LP.
//!
//! Rows are clausal inequalities found by [`separate`]; columns are created
//! for the positive atoms of each cut as it is added. An atom without a
//! column appears in no row and has nonnegative cost, so adding it could not
//! lower the LP optimum. That makes every intermediate LP bound valid and
//! lets an LP-infeasible node be pruned without Farkas pricing.

use alloc::{collections::BinaryHeap, rc::Rc, string::String, vec::Vec};
use core::cmp::Ordering;

use hashbrown::HashMap;

use crate::error::{NothingToBranch, SolveError};
use crate::intern::{AtomId, AtomTable};
use crate::lp::{Basis, LpModel, LpSolution, LpStatus, LpTolerances};
use crate::problem::{ClauseItem, FoClause, Problem};
use crate::separation::{check_model, separate, Cut, Support};
use crate::term::{GroundAtom, Substitution};
use crate::guard::eval_guard;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoadMode {
    /// Eager when every clause is variable-free, lazy otherwise.
    Auto,
    /// Load all variable-free clauses before the first LP solve.
    Eager,
    /// Generate every row by separation.
    Lazy,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Violation threshold: a cut needs activity below `1 − epsilon`.
    pub epsilon: f64,
    pub integrality: f64,
    /// Absolute optimality gap.
    pub gap: f64,
    /// Most cuts taken from one clause per separation round.
    pub cuts_per_clause: usize,
    pub node_limit: Option<u64>,
    /// Most separation rounds over the whole solve.
    pub cut_round_limit: Option<u64>,
    /// Separation rounds at a node before it may branch without waiting
    /// for the cut loop to converge. Needed when an infinite base lets the
    /// loop extend a partial model forever.
    pub branch_after_rounds: Option<u64>,
    pub load: LoadMode,
    /// Remove rows that stay slack for this many consecutive LP solves.
    pub row_aging: Option<u32>,
    pub rounding: bool,
    pub minimal_model_heuristic: bool,
    pub lp: LpTolerances,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            epsilon: 1e-6,
            integrality: 1e-6,
            gap: 1e-6,
            cuts_per_clause: 500,
            node_limit: None,
            cut_round_limit: None,
            branch_after_rounds: Some(1),
            load: LoadMode::Auto,
            row_aging: None,
            rounding: true,
            minimal_model_heuristic: false,
            lp: LpTolerances::default(),
        }
    }
}

/// Hooks for the host: interruption (time limits) and tracing.
pub trait Monitor {
    /// Polled between LP solves; returning true stops the solve with
    /// status [`SolveStatus::LimitReached`].
    fn interrupted(&mut self) -> bool {
        false
    }

    fn on_cut(&mut self, _problem: &Problem, _cut: &Cut) {}
}

/// A monitor that never interrupts and ignores events.
pub struct NoMonitor;

impl Monitor for NoMonitor {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// No Herbrand model exists.
    Infeasible,
    LimitReached,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub nodes: u64,
    pub lp_solves: u64,
    pub lp_iterations: u64,
    pub cut_rounds: u64,
    pub cuts_added: u64,
    /// Per clause, in problem order: (name, cuts added).
    pub cuts_by_clause: Vec<(String, u64)>,
    pub columns: u64,
    pub rows_removed: u64,
    /// LP bound at the root once its cut loop finished.
    pub root_bound: Option<f64>,
    /// Root LP objective after every root solve, in order.
    pub root_trace: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    /// True atoms, sorted by id.
    pub model: Vec<AtomId>,
    pub best_bound: f64,
    pub stats: SolveStats,
    pub table: AtomTable,
}

impl SolveResult {
    pub fn model_atoms(&self) -> impl Iterator<Item = &GroundAtom> {
        self.model.iter().map(|&id| self.table.atom(id))
    }
}

/// Outcome of the cut loop at one node.
#[derive(Clone, Debug)]
pub enum CutLoop {
    /// No further cuts: the LP point satisfies every separable instance.
    Converged { bound: f64, x: Vec<(AtomId, f64)> },
    Infeasible,
    /// The node's bound reached the incumbent.
    Dominated { bound: f64 },
    /// Cuts were still being found when the round budget for the node ran
    /// out; `atom` is the branching choice for the pre-cut point `x`.
    Stalled { bound: f64, x: Vec<(AtomId, f64)>, atom: AtomId },
    Limit { bound: f64 },
}

/// Picks the most fractional atom, ties by smallest id.
pub fn branch(x: &[(AtomId, f64)], integrality: f64) -> Result<AtomId, NothingToBranch> {
    x.iter()
        .filter(|(_, v)| v.min(1.0 - v) > integrality)
        .min_by(|a, b| {
            (a.1 - 0.5).abs().total_cmp(&(b.1 - 0.5).abs()).then(a.0.cmp(&b.0))
        })
        .map(|&(id, _)| id)
        .ok_or(NothingToBranch)
}

/// Rounds at 0.5 and keeps the result only if it is a model.
pub fn simple_rounding(
    problem: &Problem,
    table: &AtomTable,
    x: &[(AtomId, f64)],
) -> Result<Option<Vec<AtomId>>, SolveError> {
    let mut m: Vec<AtomId> = x.iter().filter(|(_, v)| *v >= 0.5).map(|&(id, _)| id).collect();
    m.sort_unstable();
    Ok(match check_model(problem, table, &m)? {
        None => Some(m),
        Some(_) => None,
    })
}

#[derive(Clone, Debug)]
struct Node {
    fixings: Vec<(AtomId, bool)>,
    bound: f64,
    depth: usize,
    seq: u64,
    // optimal basis of the parent's last LP
    basis: Option<Rc<Basis>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // max-heap order: lowest bound, then deepest, then oldest
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

type RowKey = (Vec<AtomId>, Vec<AtomId>);

pub struct Solver<'p> {
    problem: &'p Problem,
    opts: SolveOptions,
    table: AtomTable,
    lp: LpModel,
    col_of: Vec<Option<usize>>,
    atom_of: Vec<AtomId>,
    col_cost: Vec<f64>,
    pool: HashMap<RowKey, bool>,
    row_keys: Vec<Option<RowKey>>,
    row_age: Vec<u32>,
    lazy: Vec<bool>,
    applied: Vec<AtomId>,
    incumbent: Option<(f64, Vec<AtomId>)>,
    stats: SolveStats,
    at_root: bool,
}

impl<'p> Solver<'p> {
    pub fn new(problem: &'p Problem, opts: SolveOptions) -> Result<Self, SolveError> {
        let mut lp = LpModel::with_tolerances(opts.lp);
        lp.set_compute_farkas(false);
        let eager = match opts.load {
            LoadMode::Auto => problem.is_ground(),
            LoadMode::Eager => true,
            LoadMode::Lazy => false,
        };
        let lazy = problem.clauses().iter().map(|c| !(eager && c.is_ground())).collect();
        let mut s = Solver {
            problem,
            opts,
            table: AtomTable::new(),
            lp,
            col_of: Vec::new(),
            atom_of: Vec::new(),
            col_cost: Vec::new(),
            pool: HashMap::new(),
            row_keys: Vec::new(),
            row_age: Vec::new(),
            lazy,
            applied: Vec::new(),
            incumbent: None,
            stats: SolveStats {
                cuts_by_clause: problem.clauses().iter().map(|c| (c.name.clone(), 0)).collect(),
                ..SolveStats::default()
            },
            at_root: true,
        };
        for i in 0..problem.clauses().len() {
            if !s.lazy[i] {
                s.load_ground_clause(i)?;
            }
        }
        Ok(s)
    }

    pub fn table(&self) -> &AtomTable {
        &self.table
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    pub fn lp(&self) -> &LpModel {
        &self.lp
    }

    /// Column of an atom, creating it on first use.
    fn column(&mut self, id: AtomId) -> Result<usize, SolveError> {
        if self.col_of.len() <= id.index() {
            self.col_of.resize(id.index() + 1, None);
        }
        if let Some(c) = self.col_of[id.index()] {
            return Ok(c);
        }
        let cost = self.problem.cost_of(self.table.atom(id))?;
        let c = self.lp.add_col(cost, 0.0, 1.0)?;
        self.col_of[id.index()] = Some(c);
        self.atom_of.push(id);
        self.col_cost.push(cost);
        self.stats.columns += 1;
        Ok(c)
    }

    fn col(&self, id: AtomId) -> Option<usize> {
        self.col_of.get(id.index()).copied().flatten()
    }

    fn add_row(&mut self, entries: &[(AtomId, f64)], rhs: f64, key: Option<RowKey>) -> Result<(), SolveError> {
        let mut e = Vec::with_capacity(entries.len());
        for &(id, a) in entries {
            e.push((self.column(id)?, a));
        }
        self.lp.add_row(&e, rhs)?;
        if let Some(k) = &key {
            self.pool.insert(k.clone(), true);
        }
        self.row_keys.push(key);
        self.row_age.push(0);
        Ok(())
    }

    /// Adds the single ground instance of a variable-free clause, if its
    /// guards hold and it is not a tautology.
    fn load_ground_clause(&mut self, i: usize) -> Result<(), SolveError> {
        let clause: &FoClause = &self.problem.clauses()[i];
        let s = Substitution::new();
        let mut neg: Vec<AtomId> = Vec::new();
        let mut pos: Vec<AtomId> = Vec::new();
        for item in &clause.items {
            match item {
                ClauseItem::Guard(g) => {
                    if eval_guard(self.problem, g, &s)?.is_empty() {
                        return Ok(());
                    }
                }
                ClauseItem::Neg { atom, .. } => {
                    let id = self.table.intern(atom.eval(&s)?);
                    if !neg.contains(&id) {
                        neg.push(id);
                    }
                }
                ClauseItem::Pos(atom) => {
                    let id = self.table.intern(atom.eval(&s)?);
                    if !pos.contains(&id) {
                        pos.push(id);
                    }
                }
            }
        }
        if neg.iter().any(|a| pos.contains(a)) {
            return Ok(());
        }
        let cut = Cut { clause: i, theta: s, neg, pos, z: 0.0 };
        let key = cut.key();
        if self.pool.contains_key(&key) {
            return Ok(());
        }
        let (row, rhs) = cut.row();
        // eager rows are never aged out: separation does not revisit them
        for &(id, _) in &row {
            self.column(id)?;
        }
        self.add_row(&row, rhs, None)?;
        self.pool.insert(key, true);
        Ok(())
    }

    /// Adds a row over ground atoms, creating columns as needed. Such rows
    /// must be valid for every model; they are never aged out.
    pub fn add_user_row(&mut self, entries: &[(GroundAtom, f64)], rhs: f64) -> Result<(), SolveError> {
        let ids: Vec<(AtomId, f64)> = entries.iter().map(|(g, a)| (self.table.intern(g.clone()), *a)).collect();
        self.add_row(&ids, rhs, None)
    }

    fn apply_fixings(&mut self, fixings: &[(AtomId, bool)]) -> Result<(), SolveError> {
        for id in core::mem::take(&mut self.applied) {
            if let Some(c) = self.col(id) {
                self.lp.set_bounds(c, 0.0, 1.0)?;
            }
        }
        for &(id, v) in fixings {
            let c = self.column(id)?;
            let b = if v { 1.0 } else { 0.0 };
            self.lp.set_bounds(c, b, b)?;
            self.applied.push(id);
        }
        Ok(())
    }

    fn lp_solve(&mut self) -> Result<LpSolution, SolveError> {
        let sol = self.lp.solve()?;
        self.stats.lp_solves += 1;
        self.stats.lp_iterations += sol.iterations as u64;
        if let (Some(k), LpStatus::Optimal) = (self.opts.row_aging, sol.status) {
            self.age_rows(k, &sol)?;
        }
        Ok(sol)
    }

    fn age_rows(&mut self, limit: u32, _sol: &LpSolution) -> Result<(), SolveError> {
        let mut drop = Vec::new();
        for i in 0..self.lp.num_rows() {
            if self.row_keys[i].is_none() {
                continue;
            }
            let (_, rhs) = self.lp.row(i);
            let slack = self.lp.row_activity(i) - rhs;
            if self.lp.row_is_loose(i) && slack > 1e-6 {
                self.row_age[i] += 1;
                if self.row_age[i] >= limit {
                    drop.push(i);
                }
            } else {
                self.row_age[i] = 0;
            }
        }
        if drop.is_empty() {
            return Ok(());
        }
        self.lp.remove_rows(&drop)?;
        let mut k = 0;
        let mut d = 0;
        let mut keys = Vec::with_capacity(self.row_keys.len() - drop.len());
        let mut ages = Vec::with_capacity(keys.capacity());
        for (key, age) in core::mem::take(&mut self.row_keys).into_iter().zip(core::mem::take(&mut self.row_age)) {
            if d < drop.len() && drop[d] == k {
                d += 1;
                if let Some(key) = key {
                    self.pool.insert(key, false);
                }
            } else {
                keys.push(key);
                ages.push(age);
            }
            k += 1;
        }
        self.row_keys = keys;
        self.row_age = ages;
        self.stats.rows_removed += drop.len() as u64;
        Ok(())
    }

    fn point(&self, sol: &LpSolution) -> Vec<(AtomId, f64)> {
        self.atom_of.iter().zip(&sol.x).map(|(&id, &v)| (id, v)).collect()
    }

    fn cutoff(&self) -> f64 {
        self.incumbent.as_ref().map_or(f64::INFINITY, |(v, _)| v - self.opts.gap)
    }

    /// One separation round; returns the number of rows added.
    fn separation_round(&mut self, x: &[(AtomId, f64)], monitor: &mut dyn Monitor) -> Result<usize, SolveError> {
        let support = Support::new(&self.table, x.iter().copied(), 1e-9);
        let mut added = 0;
        for i in 0..self.problem.clauses().len() {
            if !self.lazy[i] {
                continue;
            }
            let cuts = separate(self.problem, i, &mut self.table, &support, self.opts.epsilon, self.opts.cuts_per_clause)?;
            for cut in cuts {
                debug_assert!(is_instance(self.problem, &self.table, &cut));
                let key = cut.key();
                if self.pool.get(&key) == Some(&true) {
                    continue;
                }
                monitor.on_cut(self.problem, &cut);
                let (row, rhs) = cut.row();
                self.add_row(&row, rhs, Some(key))?;
                self.stats.cuts_added += 1;
                self.stats.cuts_by_clause[i].1 += 1;
                added += 1;
            }
        }
        Ok(added)
    }

    /// Runs the cut loop under the given fixings.
    pub fn cut_loop(&mut self, fixings: &[(AtomId, bool)], monitor: &mut dyn Monitor) -> Result<CutLoop, SolveError> {
        self.apply_fixings(fixings)?;
        let mut rounds = 0u64;
        let mut last = f64::NEG_INFINITY;
        loop {
            let sol = self.lp_solve()?;
            if sol.status == LpStatus::Infeasible {
                return Ok(CutLoop::Infeasible);
            }
            // the LP only grows, so its optimum is monotone within a node
            let bound = sol.objective.max(last);
            last = bound;
            if self.at_root {
                self.stats.root_trace.push(sol.objective);
            }
            if bound >= self.cutoff() {
                return Ok(CutLoop::Dominated { bound });
            }
            let x = self.point(&sol);
            if self.separation_round(&x, monitor)? == 0 {
                return Ok(CutLoop::Converged { bound, x });
            }
            rounds += 1;
            self.stats.cut_rounds += 1;
            if self.opts.cut_round_limit.is_some_and(|l| self.stats.cut_rounds >= l) || monitor.interrupted() {
                return Ok(CutLoop::Limit { bound });
            }
            if self.opts.branch_after_rounds.is_some_and(|l| rounds >= l) {
                if let Some(atom) = self.early_branch(&x, fixings) {
                    return Ok(CutLoop::Stalled { bound, x, atom });
                }
            }
        }
    }

    /// Most fractional atom, or else the newest unfixed true atom.
    fn early_branch(&self, x: &[(AtomId, f64)], fixings: &[(AtomId, bool)]) -> Option<AtomId> {
        branch(x, self.opts.integrality).ok().or_else(|| {
            x.iter()
                .rev()
                .find(|(id, v)| *v > 0.5 && !fixings.iter().any(|f| f.0 == *id))
                .map(|&(id, _)| id)
        })
    }

    fn model_cost(&self, model: &[AtomId]) -> Result<f64, SolveError> {
        let mut total = 0.0;
        for &id in model {
            total += match self.col(id) {
                Some(c) => self.col_cost[c],
                None => self.problem.cost_of(self.table.atom(id))?,
            };
        }
        Ok(total)
    }

    fn offer(&mut self, mut model: Vec<AtomId>) -> Result<bool, SolveError> {
        model.sort_unstable();
        model.dedup();
        if check_model(self.problem, &self.table, &model)?.is_some() {
            return Ok(false);
        }
        let cost = self.model_cost(&model)?;
        if self.incumbent.as_ref().map_or(true, |(v, _)| cost < *v - 1e-12) {
            self.incumbent = Some((cost, model));
            return Ok(true);
        }
        Ok(false)
    }

    /// Forward chaining from the atoms fixed true, adding the first positive
    /// atom of each violated instance. Gives up on purely negative
    /// violations, on atoms fixed false, and after `cap` additions.
    fn minimal_model(&mut self, fixings: &[(AtomId, bool)], cap: usize) -> Result<Option<Vec<AtomId>>, SolveError> {
        let mut m: Vec<AtomId> = fixings.iter().filter(|f| f.1).map(|f| f.0).collect();
        m.sort_unstable();
        for _ in 0..cap {
            let Some(v) = check_model(self.problem, &self.table, &m)? else {
                return Ok(Some(m));
            };
            let clause = &self.problem.clauses()[v.index];
            let Some(atom) = clause.positive_literals().next() else { return Ok(None) };
            let id = self.table.intern(atom.eval(&v.theta)?);
            if fixings.contains(&(id, false)) {
                return Ok(None);
            }
            if let Err(pos) = m.binary_search(&id) {
                m.insert(pos, id);
            }
        }
        Ok(None)
    }

    /// Full branch-price-and-cut.
    pub fn solve(mut self, monitor: &mut dyn Monitor) -> Result<SolveResult, SolveError> {
        let mut heap = BinaryHeap::new();
        let mut seq = 0u64;
        heap.push(Node { fixings: Vec::new(), bound: 0.0, depth: 0, seq, basis: None });
        let mut limited = false;
        let mut open_bound = f64::INFINITY;
        while let Some(node) = heap.pop() {
            if node.bound >= self.cutoff() {
                continue;
            }
            if let Some(basis) = &node.basis {
                self.lp.set_basis(basis);
            }
            if self.opts.node_limit.is_some_and(|l| self.stats.nodes >= l) || monitor.interrupted() {
                open_bound = node.bound;
                limited = true;
                break;
            }
            self.stats.nodes += 1;
            let outcome = self.cut_loop(&node.fixings, monitor)?;
            if self.at_root {
                self.stats.root_bound = match &outcome {
                    CutLoop::Converged { bound, .. }
                    | CutLoop::Stalled { bound, .. }
                    | CutLoop::Dominated { bound }
                    | CutLoop::Limit { bound } => Some(*bound),
                    CutLoop::Infeasible => None,
                };
                self.at_root = false;
            }
            let (bound, x, stalled) = match outcome {
                CutLoop::Infeasible | CutLoop::Dominated { .. } => continue,
                CutLoop::Limit { bound } => {
                    open_bound = bound.max(node.bound);
                    limited = true;
                    break;
                }
                CutLoop::Converged { bound, x } => (bound.max(node.bound), x, None),
                CutLoop::Stalled { bound, x, atom } => (bound.max(node.bound), x, Some(atom)),
            };
            let choice = match stalled {
                Some(atom) => Ok(atom),
                None => branch(&x, self.opts.integrality),
            };
            match choice {
                Err(NothingToBranch) => {
                    let model = x.iter().filter(|(_, v)| *v > 0.5).map(|&(id, _)| id).collect();
                    if !self.offer(model)? {
                        // integral yet not a model: only possible through
                        // tolerance effects; fall back to the heuristics below
                        if let Some(m) = self.minimal_model(&node.fixings, 10_000)? {
                            self.offer(m)?;
                        }
                    }
                }
                Ok(atom) => {
                    if self.opts.rounding && stalled.is_none() {
                        if let Some(m) = simple_rounding(self.problem, &self.table, &x)? {
                            self.offer(m)?;
                        }
                    }
                    if self.opts.minimal_model_heuristic {
                        if let Some(m) = self.minimal_model(&node.fixings, 10_000)? {
                            self.offer(m)?;
                        }
                    }
                    if bound >= self.cutoff() {
                        continue;
                    }
                    let basis = Some(Rc::new(self.lp.basis()));
                    for value in [false, true] {
                        seq += 1;
                        let mut fixings = node.fixings.clone();
                        fixings.push((atom, value));
                        heap.push(Node { fixings, bound, depth: node.depth + 1, seq, basis: basis.clone() });
                    }
                }
            }
        }
        self.stats.lp_iterations = self.lp.total_iterations();
        let incumbent_value = self.incumbent.as_ref().map(|(v, _)| *v);
        let (status, best_bound) = if limited {
            let rest = heap.iter().map(|n| n.bound).fold(open_bound, f64::min);
            (SolveStatus::LimitReached, incumbent_value.map_or(rest, |v| v.min(rest)))
        } else {
            match incumbent_value {
                Some(v) => (SolveStatus::Optimal, v),
                None => (SolveStatus::Infeasible, f64::INFINITY),
            }
        };
        let (objective, model) = match self.incumbent {
            Some((v, m)) => (Some(v), m),
            None => (None, Vec::new()),
        };
        Ok(SolveResult { status, objective, model, best_bound, stats: self.stats, table: self.table })
    }
}

/// Solves `problem` to optimality or until a limit is hit.
pub fn solve(problem: &Problem, opts: SolveOptions, monitor: &mut dyn Monitor) -> Result<SolveResult, SolveError> {
    Solver::new(problem, opts)?.solve(monitor)
}

/// Whether a cut is exactly the ground instance of its clause under its θ.
pub fn is_instance(problem: &Problem, table: &AtomTable, cut: &Cut) -> bool {
    let c = &problem.clauses()[cut.clause];
    let ground = |a: &crate::term::AtomPattern| a.eval(&cut.theta).ok().and_then(|g| table.get(&g));
    let mut neg: Vec<AtomId> = Vec::new();
    for a in c.negative_literals() {
        match ground(a) {
            Some(id) if !neg.contains(&id) => neg.push(id),
            Some(_) => {}
            None => return false,
        }
    }
    let mut pos: Vec<AtomId> = Vec::new();
    for a in c.positive_literals() {
        match ground(a) {
            Some(id) if !pos.contains(&id) => pos.push(id),
            Some(_) => {}
            None => return false,
        }
    }
    neg.sort_unstable();
    pos.sort_unstable();
    (neg, pos) == cut.key()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{CostExpr, CostRule, ProblemBuilder};
    use crate::term::{AtomPattern, Pattern, Term};
    use alloc::string::ToString;
    use alloc::vec;

    fn id(n: u32) -> AtomId {
        AtomId(n)
    }

    #[test]
    fn branch_rules() {
        assert_eq!(branch(&[(id(0), 0.5), (id(1), 0.9)], 1e-6), Ok(id(0)));
        assert_eq!(branch(&[(id(1), 0.5), (id(0), 0.5)], 1e-6), Ok(id(0)));
        assert_eq!(branch(&[(id(0), 1.0), (id(1), 0.0)], 1e-6), Err(NothingToBranch));
        assert_eq!(NothingToBranch.to_string(), "nothing to branch on");
    }

    fn ground_problem(clauses: &[(&[&str], &[&str])], unit: bool) -> Problem {
        let mut b = ProblemBuilder::new();
        for (k, (neg, pos)) in clauses.iter().enumerate() {
            let mut items = Vec::new();
            for n in *neg {
                items.push(ClauseItem::Neg { atom: AtomPattern::new(n, vec![]), generator: false });
            }
            for p in *pos {
                items.push(ClauseItem::Pos(AtomPattern::new(p, vec![])));
            }
            b.clause(FoClause::new(&alloc::format!("c{}", k), items));
        }
        if unit {
            for p in ["x1", "x2", "x3", "x4", "p", "q"] {
                b.cost_rule(CostRule { pattern: AtomPattern::new(p, vec![]), expr: CostExpr::Num(1.0) });
            }
        }
        b.build().unwrap()
    }

    fn hooker() -> Problem {
        ground_problem(
            &[(&[], &["x1", "x2", "x3"]), (&[], &["x1", "x4"]), (&[], &["x2", "x4"]), (&[], &["x3", "x4"])],
            true,
        )
    }

    #[test]
    fn hooker_root_bound_and_optimum() {
        for load in [LoadMode::Auto, LoadMode::Lazy] {
            let p = hooker();
            let opts = SolveOptions { load, ..SolveOptions::default() };
            let r = solve(&p, opts, &mut NoMonitor).unwrap();
            assert_eq!(r.status, SolveStatus::Optimal);
            assert!((r.objective.unwrap() - 2.0).abs() < 1e-9);
            assert!((r.stats.root_bound.unwrap() - 5.0 / 3.0).abs() < 1e-6, "{:?}", r.stats.root_bound);
            assert_eq!(r.model.len(), 2);
        }
    }

    #[test]
    fn hull_row_raises_root_bound() {
        let p = hooker();
        let mut s = Solver::new(&p, SolveOptions::default()).unwrap();
        let a = |n: &str| GroundAtom::new(n, vec![]);
        s.add_user_row(&[(a("x1"), 1.0), (a("x2"), 1.0), (a("x3"), 1.0), (a("x4"), 2.0)], 3.0).unwrap();
        match s.cut_loop(&[], &mut NoMonitor).unwrap() {
            CutLoop::Converged { bound, .. } => assert!((bound - 2.0).abs() < 1e-6),
            o => panic!("{:?}", o),
        }
    }

    #[test]
    fn contradiction_is_infeasible() {
        let p = ground_problem(&[(&[], &["p"]), (&["p"], &[])], true);
        let r = solve(&p, SolveOptions::default(), &mut NoMonitor).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert_eq!(r.objective, None);
    }

    #[test]
    fn all_negative_theory_is_solved_at_root_with_nothing() {
        let v = Pattern::var;
        let mut b = ProblemBuilder::new();
        b.clause(FoClause::new(
            "father",
            vec![
                ClauseItem::Neg { atom: AtomPattern::new("male", vec![v("X")]), generator: true },
                ClauseItem::Neg { atom: AtomPattern::new("parent", vec![v("X"), v("Y")]), generator: true },
                ClauseItem::Pos(AtomPattern::new("father", vec![v("X"), v("Y")])),
            ],
        ));
        let p = b.build().unwrap();
        let r = solve(&p, SolveOptions::default(), &mut NoMonitor).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective, Some(0.0));
        assert!(r.model.is_empty());
        assert_eq!(r.stats.cuts_added, 0);
        assert_eq!(r.stats.columns, 0);
        assert_eq!(r.stats.nodes, 1);
    }

    #[test]
    fn definite_chain_cut_loop_forces_minimal_model() {
        // path(a).  path(b) :- path(a).
        let mut b = ProblemBuilder::new();
        let pa = AtomPattern::new("path", vec![Pattern::constant("a")]);
        let pb = AtomPattern::new("path", vec![Pattern::constant("b")]);
        b.clause(FoClause::new("fact", vec![ClauseItem::Pos(pa.clone())]));
        b.clause(FoClause::new("rule", vec![ClauseItem::Neg { atom: pa, generator: false }, ClauseItem::Pos(pb)]));
        b.cost_rule(CostRule { pattern: AtomPattern::new("path", vec![Pattern::constant("a")]), expr: CostExpr::Num(0.5) });
        b.cost_rule(CostRule { pattern: AtomPattern::new("path", vec![Pattern::var("X")]), expr: CostExpr::Num(2.0) });
        let p = b.build().unwrap();
        let opts = SolveOptions { load: LoadMode::Lazy, branch_after_rounds: None, ..SolveOptions::default() };
        let mut s = Solver::new(&p, opts).unwrap();
        match s.cut_loop(&[], &mut NoMonitor).unwrap() {
            CutLoop::Converged { bound, x } => {
                assert!((bound - 2.5).abs() < 1e-9);
                assert_eq!(x.len(), 2);
                assert!(x.iter().all(|(_, v)| (v - 1.0).abs() < 1e-9));
            }
            o => panic!("{:?}", o),
        }
        let names: Vec<String> = s.table().iter().map(|(_, a)| a.to_string()).collect();
        assert_eq!(names, ["path(a)", "path(b)"]);
    }

    #[test]
    fn rounding_examples() {
        let p = ground_problem(&[(&[], &["p"])], false);
        let mut t = AtomTable::new();
        let pid = t.intern(GroundAtom::new("p", vec![]));
        assert_eq!(simple_rounding(&p, &t, &[(pid, 0.6)]).unwrap(), Some(vec![pid]));
        assert_eq!(simple_rounding(&p, &t, &[(pid, 1.0)]).unwrap(), Some(vec![pid]));

        let v = Pattern::var;
        let mut b = ProblemBuilder::new();
        b.clause(FoClause::new(
            "father",
            vec![
                ClauseItem::Neg { atom: AtomPattern::new("male", vec![v("X")]), generator: true },
                ClauseItem::Neg { atom: AtomPattern::new("parent", vec![v("X"), v("Y")]), generator: true },
                ClauseItem::Pos(AtomPattern::new("father", vec![v("X"), v("Y")])),
            ],
        ));
        let fp = b.build().unwrap();
        let mut t = AtomTable::new();
        let c = |s: &str| Term::constant(s);
        let m = t.intern(GroundAtom::new("male", vec![c("bob")]));
        let pa = t.intern(GroundAtom::new("parent", vec![c("bob"), c("alice")]));
        let f = t.intern(GroundAtom::new("father", vec![c("bob"), c("alice")]));
        assert_eq!(simple_rounding(&fp, &t, &[(m, 0.6), (pa, 0.6), (f, 0.0)]).unwrap(), None);
    }
}
