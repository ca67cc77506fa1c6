//! Bounded-variable dual simplex for `min c·x` subject to rows `a·x ≥ b` and
//! finite column bounds.
//!
//! Every row `i` has a logical variable `r_i = a_i·x` bounded by
//! `[b_i, u_i]`, where `u_i` exceeds the largest activity the column boxes
//! allow, so the upper bound never binds at a feasible point. With every
//! variable boxed, any basis can be made dual feasible by putting nonbasic
//! variables at the bound matching the sign of their reduced cost; the
//! method therefore never needs a primal phase 1, and adding rows, adding
//! columns or changing bounds all keep the current basis usable.
//!
//! Only the kernel of the basis is factorized: the submatrix of `A` formed
//! by the basic structural columns and the rows whose logical is nonbasic.
//! Its dimension is at most the number of columns, which in cut loops is far
//! smaller than the number of rows.

use alloc::{string::String, vec, vec::Vec};
use core::fmt;

use crate::error::LpError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpTolerances {
    /// Primal feasibility tolerance on bounds.
    pub feasibility: f64,
    /// Dual feasibility tolerance on reduced costs.
    pub optimality: f64,
    /// Smallest accepted pivot magnitude.
    pub pivot: f64,
}

impl Default for LpTolerances {
    fn default() -> Self {
        LpTolerances { feasibility: 1e-7, optimality: 1e-7, pivot: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// `c·x` when optimal, `+∞` when infeasible.
    pub objective: f64,
    /// Primal values per column (the last iterate when infeasible).
    pub x: Vec<f64>,
    /// Nonnegative row duals; empty unless optimal.
    pub duals: Vec<f64>,
    /// Row multipliers `μ ≥ 0` with `μ·b > max over the column box of μ·A·x`;
    /// present when infeasible and certificates are enabled.
    pub farkas: Option<Vec<f64>>,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Lower,
    Upper,
    Basic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Var {
    Col(usize),
    Row(usize),
}

#[derive(Clone, Debug)]
struct Column {
    cost: f64,
    lb: f64,
    ub: f64,
    box_lb: f64,
    box_ub: f64,
    entries: Vec<(usize, f64)>,
}

#[derive(Clone, Debug)]
struct Row {
    entries: Vec<(usize, f64)>,
    rhs: f64,
    upper: f64,
}

/// A saved basis, restorable with [`LpModel::set_basis`] after rows and
/// columns have been appended.
#[derive(Clone, Debug)]
pub struct Basis {
    cols: Vec<State>,
    rows: Vec<State>,
    epoch: u64,
}

const NONE: usize = usize::MAX;
const DEGENERATE_LIMIT: usize = 50;

#[derive(Clone, Debug)]
pub struct LpModel {
    tol: LpTolerances,
    cols: Vec<Column>,
    rows: Vec<Row>,
    col_state: Vec<State>,
    row_state: Vec<State>,
    x: Vec<f64>,
    r: Vec<f64>,
    dc: Vec<f64>,
    dr: Vec<f64>,
    // kernel: ks are basic columns, kr rows with nonbasic logicals
    ks: Vec<usize>,
    kr: Vec<usize>,
    col_pos: Vec<usize>,
    row_pos: Vec<usize>,
    // inverse of A[kr, ks], indexed inv[ks position][kr position]
    inv: Vec<Vec<f64>>,
    updates: usize,
    needs_factor: bool,
    compute_farkas: bool,
    iteration_total: u64,
    // bumped when rows are removed, invalidating saved bases
    epoch: u64,
}

impl Default for LpModel {
    fn default() -> Self {
        Self::new()
    }
}

impl LpModel {
    pub fn new() -> Self {
        Self::with_tolerances(LpTolerances::default())
    }

    pub fn with_tolerances(tol: LpTolerances) -> Self {
        LpModel {
            tol,
            cols: Vec::new(),
            rows: Vec::new(),
            col_state: Vec::new(),
            row_state: Vec::new(),
            x: Vec::new(),
            r: Vec::new(),
            dc: Vec::new(),
            dr: Vec::new(),
            ks: Vec::new(),
            kr: Vec::new(),
            col_pos: Vec::new(),
            row_pos: Vec::new(),
            inv: Vec::new(),
            updates: 0,
            needs_factor: false,
            compute_farkas: true,
            iteration_total: 0,
            epoch: 0,
        }
    }

    pub fn tolerances(&self) -> LpTolerances {
        self.tol
    }

    /// Whether infeasible solves also compute a Farkas certificate.
    pub fn set_compute_farkas(&mut self, on: bool) {
        self.compute_farkas = on;
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Simplex iterations over the lifetime of the model.
    pub fn total_iterations(&self) -> u64 {
        self.iteration_total
    }

    pub fn cost(&self, col: usize) -> f64 {
        self.cols[col].cost
    }

    pub fn bounds(&self, col: usize) -> (f64, f64) {
        (self.cols[col].lb, self.cols[col].ub)
    }

    pub fn row(&self, row: usize) -> (&[(usize, f64)], f64) {
        (&self.rows[row].entries, self.rows[row].rhs)
    }

    /// Adds a column with no row entries. `[lb, ub]` also becomes the box
    /// that later bound changes must stay inside.
    pub fn add_col(&mut self, cost: f64, lb: f64, ub: f64) -> Result<usize, LpError> {
        if !cost.is_finite() {
            return Err(LpError::InvalidColumn("non-finite cost"));
        }
        if !(lb.is_finite() && ub.is_finite() && lb <= ub) {
            return Err(LpError::InvalidColumn("bounds must be finite with lb <= ub"));
        }
        self.cols.push(Column { cost, lb, ub, box_lb: lb, box_ub: ub, entries: Vec::new() });
        self.col_state.push(if cost >= 0.0 { State::Lower } else { State::Upper });
        self.x.push(if cost >= 0.0 { lb } else { ub });
        self.dc.push(cost);
        self.col_pos.push(NONE);
        Ok(self.cols.len() - 1)
    }

    /// Adds the row `Σ coef·x_col ≥ rhs`. Repeated columns are summed and
    /// zero coefficients dropped.
    pub fn add_row(&mut self, entries: &[(usize, f64)], rhs: f64) -> Result<usize, LpError> {
        if !rhs.is_finite() {
            return Err(LpError::InvalidColumn("non-finite right-hand side"));
        }
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for &(j, a) in entries {
            if j >= self.cols.len() {
                return Err(LpError::UnknownColumn(j));
            }
            if !a.is_finite() {
                return Err(LpError::InvalidColumn("non-finite coefficient"));
            }
            match merged.iter_mut().find(|(k, _)| *k == j) {
                Some(e) => e.1 += a,
                None => merged.push((j, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        merged.sort_unstable_by_key(|&(j, _)| j);
        let i = self.rows.len();
        let mut max_act = 0.0;
        let mut act = 0.0;
        for &(j, a) in &merged {
            let c = &self.cols[j];
            max_act += (a * c.box_lb).max(a * c.box_ub);
            act += a * self.x[j];
            self.cols[j].entries.push((i, a));
        }
        let upper = max_act.max(rhs) + 1.0;
        self.rows.push(Row { entries: merged, rhs, upper });
        self.row_state.push(State::Basic);
        self.r.push(act);
        self.dr.push(0.0);
        self.row_pos.push(NONE);
        Ok(i)
    }

    /// Changes a column's bounds inside its original box.
    pub fn set_bounds(&mut self, col: usize, lb: f64, ub: f64) -> Result<(), LpError> {
        let c = self.cols.get_mut(col).ok_or(LpError::UnknownColumn(col))?;
        if !(lb <= ub && lb >= c.box_lb && ub <= c.box_ub) {
            return Err(LpError::InvalidColumn("bounds outside the column's box"));
        }
        c.lb = lb;
        c.ub = ub;
        Ok(())
    }

    /// True when the row's logical is basic, i.e. the row is not part of the
    /// current basis and can be removed without disturbing it.
    pub fn row_is_loose(&self, row: usize) -> bool {
        self.row_state[row] == State::Basic
    }

    /// Current activity `a_i·x` of a row.
    pub fn row_activity(&self, row: usize) -> f64 {
        self.r[row]
    }

    /// Deletes rows; the remaining rows keep their relative order. If any
    /// removed row is part of the basis the model restarts from the slack
    /// basis on the next solve.
    pub fn remove_rows(&mut self, rows: &[usize]) -> Result<(), LpError> {
        let m = self.rows.len();
        let mut drop = vec![false; m];
        for &i in rows {
            if i >= m {
                return Err(LpError::UnknownRow(i));
            }
            drop[i] = true;
        }
        let reset = rows.iter().any(|&i| self.row_state[i] != State::Basic);
        let mut remap = vec![NONE; m];
        let mut next = 0;
        for i in 0..m {
            if !drop[i] {
                remap[i] = next;
                next += 1;
            }
        }
        self.epoch += 1;
        retain_mask(&mut self.rows, &drop);
        retain_mask(&mut self.row_state, &drop);
        retain_mask(&mut self.r, &drop);
        retain_mask(&mut self.dr, &drop);
        for c in &mut self.cols {
            c.entries.retain(|&(i, _)| !drop[i]);
            for e in &mut c.entries {
                e.0 = remap[e.0];
            }
        }
        if reset {
            self.slack_reset();
        } else {
            for i in &mut self.kr {
                *i = remap[*i];
            }
            self.row_pos = vec![NONE; self.rows.len()];
            for (a, &i) in self.kr.iter().enumerate() {
                self.row_pos[i] = a;
            }
        }
        Ok(())
    }

    pub fn basis(&self) -> Basis {
        Basis { cols: self.col_state.clone(), rows: self.row_state.clone(), epoch: self.epoch }
    }

    /// Restarts the next solve from `basis`. Rows added since it was saved
    /// enter with basic logicals, new columns at their lower bound. Returns
    /// false, leaving the model unchanged, when rows were removed since.
    pub fn set_basis(&mut self, basis: &Basis) -> bool {
        if basis.epoch != self.epoch || basis.cols.len() > self.cols.len() || basis.rows.len() > self.rows.len() {
            return false;
        }
        let (n0, m0) = (basis.cols.len(), basis.rows.len());
        self.col_state[..n0].copy_from_slice(&basis.cols);
        self.col_state[n0..].iter_mut().for_each(|s| *s = State::Lower);
        self.row_state[..m0].copy_from_slice(&basis.rows);
        self.row_state[m0..].iter_mut().for_each(|s| *s = State::Basic);
        self.ks = (0..self.cols.len()).filter(|&j| self.col_state[j] == State::Basic).collect();
        self.kr = (0..self.rows.len()).filter(|&i| self.row_state[i] != State::Basic).collect();
        self.col_pos = vec![NONE; self.cols.len()];
        for (b, &j) in self.ks.iter().enumerate() {
            self.col_pos[j] = b;
        }
        self.row_pos = vec![NONE; self.rows.len()];
        for (a, &i) in self.kr.iter().enumerate() {
            self.row_pos[i] = a;
        }
        self.needs_factor = true;
        true
    }

    /// Reduced cost `c_j − Σ λ_i a_ij` under an optimal solution's duals.
    pub fn reduced_cost(&self, sol: &LpSolution, col: usize) -> Result<f64, LpError> {
        if !sol.is_optimal() {
            return Err(LpError::NotOptimal);
        }
        let c = self.cols.get(col).ok_or(LpError::UnknownColumn(col))?;
        let mut d = c.cost;
        for &(i, a) in &c.entries {
            d -= sol.duals.get(i).copied().unwrap_or(0.0) * a;
        }
        Ok(d)
    }

    /// Objective of the dual of the bounded problem at the given duals:
    /// `λ·b + Σ_j min(d_j·lb_j, d_j·ub_j)`.
    pub fn dual_objective(&self, sol: &LpSolution) -> Result<f64, LpError> {
        if !sol.is_optimal() {
            return Err(LpError::NotOptimal);
        }
        let mut v: f64 = self.rows.iter().zip(&sol.duals).map(|(r, l)| r.rhs * l).sum();
        for j in 0..self.cols.len() {
            let d = self.reduced_cost(sol, j)?;
            let c = &self.cols[j];
            v += (d * c.lb).min(d * c.ub);
        }
        Ok(v)
    }

    /// `μ·b − max over the column box of μ·A·x`; positive for a valid
    /// infeasibility certificate.
    pub fn farkas_margin(&self, mu: &[f64]) -> f64 {
        let mut lhs = 0.0;
        let mut coef = vec![0.0; self.cols.len()];
        for (i, row) in self.rows.iter().enumerate() {
            let m = mu.get(i).copied().unwrap_or(0.0);
            if m == 0.0 {
                continue;
            }
            lhs += m * row.rhs;
            for &(j, a) in &row.entries {
                coef[j] += m * a;
            }
        }
        let best: f64 = coef
            .iter()
            .zip(&self.cols)
            .map(|(&g, c)| (g * c.lb).max(g * c.ub))
            .sum();
        lhs - best
    }

    /// Computes Farkas multipliers as the duals of the elastic problem
    /// `min Σ v_i` subject to `a_i·x + v_i ≥ b_i`, which is always feasible
    /// and has a positive optimum exactly when this model is infeasible.
    pub fn farkas_certificate(&self) -> Result<Vec<f64>, LpError> {
        let mut aux = LpModel::with_tolerances(self.tol);
        aux.set_compute_farkas(false);
        for c in &self.cols {
            aux.add_col(0.0, c.lb, c.ub)?;
        }
        let n = self.cols.len();
        for row in &self.rows {
            let min_act: f64 = row
                .entries
                .iter()
                .map(|&(j, a)| (a * self.cols[j].lb).min(a * self.cols[j].ub))
                .sum();
            aux.add_col(1.0, 0.0, (row.rhs - min_act).max(0.0) + 1.0)?;
        }
        for (i, row) in self.rows.iter().enumerate() {
            let mut e = row.entries.clone();
            e.push((n + i, 1.0));
            aux.add_row(&e, row.rhs)?;
        }
        let sol = aux.solve()?;
        if !sol.is_optimal() {
            return Err(LpError::Numerical("elastic problem reported infeasible"));
        }
        Ok(sol.duals)
    }

    /// A human-readable listing in the common LP file layout.
    pub fn dump<'a>(&'a self, names: &'a dyn Fn(usize) -> String) -> LpDump<'a> {
        LpDump { model: self, names }
    }

    pub fn solve(&mut self) -> Result<LpSolution, LpError> {
        let m = self.rows.len();
        let n = self.cols.len();
        let interval = 100usize.max(self.ks.len());
        if self.needs_factor || self.updates >= interval {
            self.refactor();
        }
        self.recompute();

        let limit = 10_000 + 20 * (m + n);
        let mut iterations = 0usize;
        let mut degenerate = 0usize;
        let mut trouble = 0usize;
        let mut alpha_c = vec![0.0; n];
        let mut d_rows = vec![0.0; m];
        let mut touched: Vec<usize> = Vec::new();
        loop {
            if self.updates >= 100usize.max(self.ks.len()) {
                self.refactor();
                self.recompute();
            }
            let bland = degenerate >= DEGENERATE_LIMIT;
            let Some((p, to_lower)) = self.choose_leaving(bland) else {
                self.iteration_total += iterations as u64;
                return Ok(self.optimal_solution(iterations));
            };
            if iterations >= limit {
                self.iteration_total += iterations as u64;
                return Err(LpError::Numerical("iteration limit"));
            }
            iterations += 1;

            // row of B⁻¹ for the leaving variable, restricted to kernel rows
            let (rho, extra_row) = self.btran(p);
            alpha_c.iter_mut().for_each(|v| *v = 0.0);
            for (a, &rv) in rho.iter().enumerate() {
                if rv != 0.0 {
                    for &(j, coef) in &self.rows[self.kr[a]].entries {
                        alpha_c[j] += rv * coef;
                    }
                }
            }
            if let Some(i) = extra_row {
                for &(j, coef) in &self.rows[i].entries {
                    alpha_c[j] -= coef;
                }
            }

            let Some(q) = self.ratio_test(&alpha_c, &rho, to_lower, bland) else {
                self.iteration_total += iterations as u64;
                return self.infeasible_solution(iterations);
            };

            // column of B⁻¹ for the entering variable
            let ds = self.ftran(q, &mut d_rows, &mut touched);
            let alpha_rq = match p {
                Var::Col(j) => -ds[self.col_pos[j]],
                Var::Row(i) => -d_rows[i],
            };
            let alpha_row = match q {
                Var::Col(j) => alpha_c[j],
                Var::Row(i) => -rho[self.row_pos[i]],
            };
            if (alpha_rq - alpha_row).abs() > 1e-7 * (1.0 + alpha_rq.abs()) || alpha_rq.abs() < self.tol.pivot {
                for &i in &touched {
                    d_rows[i] = 0.0;
                }
                touched.clear();
                trouble += 1;
                if trouble > 5 {
                    self.iteration_total += iterations as u64;
                    return Err(LpError::Numerical("unstable basis"));
                }
                if self.updates == 0 {
                    self.slack_reset();
                }
                self.refactor();
                self.recompute();
                continue;
            }

            // primal step
            let (lo, hi) = self.var_bounds(p);
            let target = if to_lower { lo } else { hi };
            let t = (target - self.value(p)) / (-alpha_rq);
            match q {
                Var::Col(j) => self.x[j] += t,
                Var::Row(i) => self.r[i] += t,
            }
            for (b, &dv) in ds.iter().enumerate() {
                self.x[self.ks[b]] += dv * t;
            }
            for &i in &touched {
                if self.row_state[i] == State::Basic {
                    self.r[i] += d_rows[i] * t;
                }
                d_rows[i] = 0.0;
            }
            touched.clear();
            self.set_value(p, target);

            // dual step
            let dq = self.reduced(q);
            let theta = dq / alpha_rq;
            if theta.abs() < 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            for j in 0..n {
                if self.col_state[j] != State::Basic {
                    self.dc[j] -= theta * alpha_c[j];
                }
            }
            for (a, &i) in self.kr.iter().enumerate() {
                self.dr[i] += theta * rho[a];
            }
            self.set_reduced(p, -theta);
            self.set_reduced(q, 0.0);

            self.update_kernel(p, q, &ds, &rho);
            self.set_state(p, if to_lower { State::Lower } else { State::Upper });
            self.set_state(q, State::Basic);
            self.updates += 1;
        }
    }

    fn var_bounds(&self, v: Var) -> (f64, f64) {
        match v {
            Var::Col(j) => (self.cols[j].lb, self.cols[j].ub),
            Var::Row(i) => (self.rows[i].rhs, self.rows[i].upper),
        }
    }

    fn value(&self, v: Var) -> f64 {
        match v {
            Var::Col(j) => self.x[j],
            Var::Row(i) => self.r[i],
        }
    }

    fn set_value(&mut self, v: Var, val: f64) {
        match v {
            Var::Col(j) => self.x[j] = val,
            Var::Row(i) => self.r[i] = val,
        }
    }

    fn reduced(&self, v: Var) -> f64 {
        match v {
            Var::Col(j) => self.dc[j],
            Var::Row(i) => self.dr[i],
        }
    }

    fn set_reduced(&mut self, v: Var, d: f64) {
        match v {
            Var::Col(j) => self.dc[j] = d,
            Var::Row(i) => self.dr[i] = d,
        }
    }

    fn set_state(&mut self, v: Var, s: State) {
        match v {
            Var::Col(j) => self.col_state[j] = s,
            Var::Row(i) => self.row_state[i] = s,
        }
    }

    fn var_index(&self, v: Var) -> usize {
        match v {
            Var::Col(j) => j,
            Var::Row(i) => self.cols.len() + i,
        }
    }

    fn slack_reset(&mut self) {
        for s in &mut self.col_state {
            *s = State::Lower;
        }
        for s in &mut self.row_state {
            *s = State::Basic;
        }
        self.col_pos = vec![NONE; self.cols.len()];
        self.row_pos = vec![NONE; self.rows.len()];
        self.ks.clear();
        self.kr.clear();
        self.inv.clear();
        self.updates = 0;
        self.needs_factor = false;
    }

    /// Rebuilds the kernel inverse from the current basis, falling back to
    /// the slack basis when the kernel is singular.
    fn refactor(&mut self) {
        self.needs_factor = false;
        self.updates = 0;
        let k = self.ks.len();
        if k != self.kr.len() {
            self.slack_reset();
            return;
        }
        // [K | I] with K[a][b] = A[kr[a], ks[b]]
        let mut mat = vec![vec![0.0; 2 * k]; k];
        for (a, &i) in self.kr.iter().enumerate() {
            for &(j, coef) in &self.rows[i].entries {
                let b = self.col_pos[j];
                if b != NONE {
                    mat[a][b] = coef;
                }
            }
            mat[a][k + a] = 1.0;
        }
        for b in 0..k {
            let (piv_row, piv) = (b..k)
                .map(|a| (a, mat[a][b].abs()))
                .fold((b, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if piv < 1e-11 {
                self.slack_reset();
                return;
            }
            mat.swap(b, piv_row);
            let inv_p = 1.0 / mat[b][b];
            for v in mat[b].iter_mut() {
                *v *= inv_p;
            }
            let pivot_row = mat[b].clone();
            for (a, row) in mat.iter_mut().enumerate() {
                if a == b {
                    continue;
                }
                let f = row[b];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        // after elimination row b holds row b of K⁻¹ (indexed by kr positions)
        self.inv = mat.into_iter().map(|row| row[k..].to_vec()).collect();
    }

    /// Recomputes duals, puts nonbasic variables on their dual-feasible
    /// bounds and recomputes basic values.
    fn recompute(&mut self) {
        let m = self.rows.len();
        let mut y = vec![0.0; m];
        for (a, &i) in self.kr.iter().enumerate() {
            y[i] = self.ks.iter().enumerate().map(|(b, &j)| self.cols[j].cost * self.inv[b][a]).sum();
        }
        let opt = self.tol.optimality;
        for (j, c) in self.cols.iter().enumerate() {
            if self.col_state[j] == State::Basic {
                self.dc[j] = 0.0;
                continue;
            }
            let d = c.cost - c.entries.iter().map(|&(i, a)| y[i] * a).sum::<f64>();
            self.dc[j] = d;
            if d > opt {
                self.col_state[j] = State::Lower;
            } else if d < -opt {
                self.col_state[j] = State::Upper;
            }
            self.x[j] = if self.col_state[j] == State::Lower { c.lb } else { c.ub };
        }
        for i in 0..m {
            if self.row_state[i] == State::Basic {
                self.dr[i] = 0.0;
                continue;
            }
            self.dr[i] = y[i];
            if y[i] > opt {
                self.row_state[i] = State::Lower;
            } else if y[i] < -opt {
                self.row_state[i] = State::Upper;
            }
            let row = &self.rows[i];
            self.r[i] = if self.row_state[i] == State::Lower { row.rhs } else { row.upper };
        }
        // x_S = K⁻¹ (r_R − A[R, N] x_N)
        let k = self.ks.len();
        let mut v = vec![0.0; k];
        for (a, &i) in self.kr.iter().enumerate() {
            let mut acc = self.r[i];
            for &(j, coef) in &self.rows[i].entries {
                if self.col_state[j] != State::Basic {
                    acc -= coef * self.x[j];
                }
            }
            v[a] = acc;
        }
        for b in 0..k {
            self.x[self.ks[b]] = self.inv[b].iter().zip(&v).map(|(p, q)| p * q).sum();
        }
        for i in 0..m {
            if self.row_state[i] == State::Basic {
                self.r[i] = self.rows[i].entries.iter().map(|&(j, a)| a * self.x[j]).sum();
            }
        }
    }

    fn choose_leaving(&self, bland: bool) -> Option<(Var, bool)> {
        let tol = self.tol.feasibility;
        let mut best: Option<(Var, bool)> = None;
        let mut best_score = 0.0;
        let mut consider = |v: Var, val: f64, lo: f64, hi: f64, best: &mut Option<(Var, bool)>| {
            let (viol, to_lower) = if val < lo - tol {
                (lo - val, true)
            } else if val > hi + tol {
                (val - hi, false)
            } else {
                return;
            };
            let score = if bland { 1.0 } else { viol };
            if best.is_none() || score > best_score {
                best_score = score;
                *best = Some((v, to_lower));
            }
        };
        for &j in &self.ks {
            let c = &self.cols[j];
            consider(Var::Col(j), self.x[j], c.lb, c.ub, &mut best);
        }
        if bland {
            // smallest variable index among the infeasible ones
            let mut cands: Vec<(usize, Var, bool)> = Vec::new();
            for &j in &self.ks {
                let c = &self.cols[j];
                if self.x[j] < c.lb - tol || self.x[j] > c.ub + tol {
                    cands.push((j, Var::Col(j), self.x[j] < c.lb - tol));
                }
            }
            for (i, row) in self.rows.iter().enumerate() {
                if self.row_state[i] == State::Basic
                    && (self.r[i] < row.rhs - tol || self.r[i] > row.upper + tol)
                {
                    cands.push((self.var_index(Var::Row(i)), Var::Row(i), self.r[i] < row.rhs - tol));
                }
            }
            return cands.into_iter().min_by_key(|c| c.0).map(|c| (c.1, c.2));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if self.row_state[i] == State::Basic {
                consider(Var::Row(i), self.r[i], row.rhs, row.upper, &mut best);
            }
        }
        best
    }

    /// Row of the kernel inverse associated with a basic variable: returns
    /// `ρ` over kernel rows, plus the leaving row itself (coefficient −1)
    /// when the variable is a logical.
    fn btran(&self, p: Var) -> (Vec<f64>, Option<usize>) {
        match p {
            Var::Col(j) => (self.inv[self.col_pos[j]].clone(), None),
            Var::Row(i) => {
                let mut w = vec![0.0; self.kr.len()];
                for &(j, coef) in &self.rows[i].entries {
                    let b = self.col_pos[j];
                    if b != NONE {
                        for (wv, iv) in w.iter_mut().zip(&self.inv[b]) {
                            *wv += coef * iv;
                        }
                    }
                }
                (w, Some(i))
            }
        }
    }

    /// Change of the basic variables per unit increase of entering `q`:
    /// returned over kernel columns, and accumulated into `d_rows` (listed in
    /// `touched`) for rows.
    fn ftran(&self, q: Var, d_rows: &mut [f64], touched: &mut Vec<usize>) -> Vec<f64> {
        let k = self.ks.len();
        let mut ds = vec![0.0; k];
        let add = |i: usize, v: f64, d_rows: &mut [f64], touched: &mut Vec<usize>| {
            if d_rows[i] == 0.0 {
                touched.push(i);
            }
            d_rows[i] += v;
            if d_rows[i] == 0.0 {
                d_rows[i] = f64::MIN_POSITIVE;
            }
        };
        match q {
            Var::Col(q) => {
                for &(i, coef) in &self.cols[q].entries {
                    let a = self.row_pos[i];
                    if a != NONE {
                        for b in 0..k {
                            ds[b] -= self.inv[b][a] * coef;
                        }
                    }
                    add(i, coef, d_rows, touched);
                }
            }
            Var::Row(i) => {
                let a = self.row_pos[i];
                for b in 0..k {
                    ds[b] = self.inv[b][a];
                }
            }
        }
        for b in 0..k {
            if ds[b] != 0.0 {
                for &(i, coef) in &self.cols[self.ks[b]].entries {
                    add(i, coef * ds[b], d_rows, touched);
                }
            }
        }
        ds
    }

    fn ratio_test(&self, alpha_c: &[f64], rho: &[f64], to_lower: bool, bland: bool) -> Option<Var> {
        let s = if to_lower { 1.0 } else { -1.0 };
        let piv = self.tol.pivot;
        let mut cands: Vec<(Var, f64, f64)> = Vec::new();
        let mut push = |v: Var, state: State, alpha: f64, d: f64| {
            let sa = s * alpha;
            let (ok, dd) = match state {
                State::Lower => (sa < -piv, d),
                State::Upper => (sa > piv, -d),
                State::Basic => (false, 0.0),
            };
            if ok {
                cands.push((v, dd.max(0.0), alpha.abs()));
            }
        };
        for (j, c) in self.cols.iter().enumerate() {
            if c.lb < c.ub {
                push(Var::Col(j), self.col_state[j], alpha_c[j], self.dc[j]);
            }
        }
        for (a, &i) in self.kr.iter().enumerate() {
            push(Var::Row(i), self.row_state[i], -rho[a], self.dr[i]);
        }
        if cands.is_empty() {
            return None;
        }
        if bland {
            let min = cands.iter().map(|c| c.1 / c.2).fold(f64::INFINITY, f64::min);
            return cands
                .iter()
                .filter(|c| c.1 / c.2 <= min + 1e-12)
                .min_by_key(|c| self.var_index(c.0))
                .map(|c| c.0);
        }
        let bound = cands
            .iter()
            .map(|c| (c.1 + self.tol.optimality) / c.2)
            .fold(f64::INFINITY, f64::min);
        cands.iter().filter(|c| c.1 / c.2 <= bound).max_by(|x, y| x.2.total_cmp(&y.2)).map(|c| c.0)
    }

    fn update_kernel(&mut self, p: Var, q: Var, ds: &[f64], rho: &[f64]) {
        match (p, q) {
            (Var::Col(pj), Var::Col(qj)) => {
                // column replacement; u = −ds is K⁻¹ A[R, q]
                let b = self.col_pos[pj];
                let ub = -ds[b];
                let pivot_row: Vec<f64> = self.inv[b].iter().map(|v| v / ub).collect();
                for (b2, row) in self.inv.iter_mut().enumerate() {
                    if b2 == b {
                        continue;
                    }
                    let f = -ds[b2];
                    if f != 0.0 {
                        for (v, pv) in row.iter_mut().zip(&pivot_row) {
                            *v -= f * pv;
                        }
                    }
                }
                self.inv[b] = pivot_row;
                self.ks[b] = qj;
                self.col_pos[pj] = NONE;
                self.col_pos[qj] = b;
            }
            (Var::Col(pj), Var::Row(qi)) => {
                // shrink: drop column pj and row qi
                let b = self.col_pos[pj];
                let a = self.row_pos[qi];
                let piv = self.inv[b][a];
                let row_b = self.inv[b].clone();
                for (b2, row) in self.inv.iter_mut().enumerate() {
                    if b2 == b {
                        continue;
                    }
                    let f = row[a] / piv;
                    if f != 0.0 {
                        for (v, pv) in row.iter_mut().zip(&row_b) {
                            *v -= f * pv;
                        }
                    }
                }
                self.inv.swap_remove(b);
                for row in &mut self.inv {
                    row.swap_remove(a);
                }
                self.col_pos[pj] = NONE;
                self.ks.swap_remove(b);
                if b < self.ks.len() {
                    self.col_pos[self.ks[b]] = b;
                }
                self.row_pos[qi] = NONE;
                self.kr.swap_remove(a);
                if a < self.kr.len() {
                    self.row_pos[self.kr[a]] = a;
                }
            }
            (Var::Row(pi), Var::Col(qj)) => {
                // grow by row pi and column qj
                let mb: Vec<f64> = ds.iter().map(|v| -v).collect();
                let cm = rho;
                let mut crow_mb = 0.0;
                let mut d = 0.0;
                for &(j, coef) in &self.rows[pi].entries {
                    if j == qj {
                        d = coef;
                    }
                    let b = self.col_pos[j];
                    if b != NONE {
                        crow_mb += coef * mb[b];
                    }
                }
                let s = d - crow_mb;
                for (b, row) in self.inv.iter_mut().enumerate() {
                    let f = mb[b] / s;
                    if f != 0.0 {
                        for (v, c) in row.iter_mut().zip(cm) {
                            *v += f * c;
                        }
                    }
                    row.push(-mb[b] / s);
                }
                let mut last: Vec<f64> = cm.iter().map(|c| -c / s).collect();
                last.push(1.0 / s);
                self.inv.push(last);
                self.col_pos[qj] = self.ks.len();
                self.ks.push(qj);
                self.row_pos[pi] = self.kr.len();
                self.kr.push(pi);
            }
            (Var::Row(pi), Var::Row(qi)) => {
                // row replacement at qi's position by row pi
                let a = self.row_pos[qi];
                let w = rho;
                let wa = w[a];
                for row in self.inv.iter_mut() {
                    let f = row[a] / wa;
                    if f != 0.0 {
                        for (x, (v, wv)) in row.iter_mut().zip(w).enumerate() {
                            let e = if x == a { wv - 1.0 } else { *wv };
                            *v -= f * e;
                        }
                    }
                }
                self.kr[a] = pi;
                self.row_pos[qi] = NONE;
                self.row_pos[pi] = a;
            }
        }
    }

    fn optimal_solution(&mut self, iterations: usize) -> LpSolution {
        let x: Vec<f64> = self
            .x
            .iter()
            .zip(&self.cols)
            .map(|(&v, c)| v.clamp(c.lb, c.ub))
            .collect();
        let mut duals = vec![0.0; self.rows.len()];
        for (a, &i) in self.kr.iter().enumerate() {
            let y: f64 = self.ks.iter().enumerate().map(|(b, &j)| self.cols[j].cost * self.inv[b][a]).sum();
            duals[i] = y.max(0.0);
        }
        let objective = x.iter().zip(&self.cols).map(|(v, c)| v * c.cost).sum();
        LpSolution { status: LpStatus::Optimal, objective, x, duals, farkas: None, iterations }
    }

    fn infeasible_solution(&mut self, iterations: usize) -> Result<LpSolution, LpError> {
        let farkas = if self.compute_farkas { Some(self.farkas_certificate()?) } else { None };
        Ok(LpSolution {
            status: LpStatus::Infeasible,
            objective: f64::INFINITY,
            x: self.x.clone(),
            duals: Vec::new(),
            farkas,
            iterations,
        })
    }
}

fn retain_mask<T>(v: &mut Vec<T>, drop: &[bool]) {
    let mut k = 0;
    v.retain(|_| {
        k += 1;
        !drop[k - 1]
    });
}

/// Display adapter returned by [`LpModel::dump`].
pub struct LpDump<'a> {
    model: &'a LpModel,
    names: &'a dyn Fn(usize) -> String,
}

fn write_term(f: &mut fmt::Formatter<'_>, first: bool, coef: f64, name: &str) -> fmt::Result {
    let sign = if coef < 0.0 { "-" } else { "+" };
    let mag = coef.abs();
    if first {
        if coef < 0.0 {
            f.write_str("- ")?;
        }
    } else {
        write!(f, " {} ", sign)?;
    }
    if mag == 1.0 {
        f.write_str(name)
    } else {
        write!(f, "{} {}", mag, name)
    }
}

impl fmt::Display for LpDump<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.model;
        f.write_str("Minimize\n obj:")?;
        let mut first = true;
        for (j, c) in m.cols.iter().enumerate() {
            if c.cost != 0.0 {
                if first {
                    f.write_str(" ")?;
                }
                write_term(f, first, c.cost, &(self.names)(j))?;
                first = false;
            }
        }
        if first {
            f.write_str(" 0")?;
        }
        f.write_str("\nSubject To\n")?;
        for (i, row) in m.rows.iter().enumerate() {
            write!(f, " r{}:", i)?;
            if row.entries.is_empty() {
                f.write_str(" 0")?;
            }
            for (k, &(j, a)) in row.entries.iter().enumerate() {
                if k == 0 {
                    f.write_str(" ")?;
                }
                write_term(f, k == 0, a, &(self.names)(j))?;
            }
            writeln!(f, " >= {}", row.rhs)?;
        }
        f.write_str("Bounds\n")?;
        for (j, c) in m.cols.iter().enumerate() {
            writeln!(f, " {} <= {} <= {}", c.lb, (self.names)(j), c.ub)?;
        }
        f.write_str("End\n")
    }
}
