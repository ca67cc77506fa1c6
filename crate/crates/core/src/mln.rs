//! Markov logic MAP inference compiled to a ground [`Problem`].
//!
//! Each surviving soft grounding group gets a penalty atom `cb(i, key..)`
//! whose cost is the clause weight times the number of groundings in the
//! group. Minimizing total cost then minimizes the weight of falsified
//! groundings, which is MAP up to the constant reported in
//! [`MlnEncoding::constant`].

use alloc::{format, string::String, string::ToString, vec, vec::Vec};
use core::fmt;

use hashbrown::HashMap;

use crate::error::MlnError;
use crate::problem::{ClauseItem, CostExpr, CostRule, FoClause, Problem, ProblemBuilder};
use crate::term::{AtomPattern, GroundAtom, Symbol, Term};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weight {
    Soft(f64),
    Hard,
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Soft(w) => write!(f, "{}", w),
            Weight::Hard => f.write_str("HARD"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MlnArg {
    Var(Symbol),
    Const(Symbol),
}

impl MlnArg {
    fn resolve<'a>(&'a self, vars: &[Symbol], values: &'a [Symbol]) -> &'a Symbol {
        match self {
            MlnArg::Const(c) => c,
            MlnArg::Var(v) => &values[vars.iter().position(|x| x == v).expect("variable collected")],
        }
    }
}

impl fmt::Display for MlnArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MlnArg::Var(s) | MlnArg::Const(s) => f.write_str(s.as_str()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MlnLiteral {
    Atom { positive: bool, pred: Symbol, args: Vec<MlnArg> },
    /// `A = B` or `A != B`; decided during grounding, never a variable.
    Equal { positive: bool, lhs: MlnArg, rhs: MlnArg },
}

impl MlnLiteral {
    fn args(&self) -> Vec<&MlnArg> {
        match self {
            MlnLiteral::Atom { args, .. } => args.iter().collect(),
            MlnLiteral::Equal { lhs, rhs, .. } => vec![lhs, rhs],
        }
    }
}

impl fmt::Display for MlnLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MlnLiteral::Atom { positive, pred, args } => {
                if !positive {
                    f.write_str("!")?;
                }
                write!(f, "{}", pred.as_str())?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{}", a)?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
            MlnLiteral::Equal { positive, lhs, rhs } => {
                write!(f, "{} {} {}", lhs, if *positive { "=" } else { "!=" }, rhs)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MlnClause {
    pub weight: Weight,
    pub literals: Vec<MlnLiteral>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredDecl {
    pub name: Symbol,
    pub domains: Vec<Symbol>,
    /// Closed-world evidence predicate: unlisted atoms are false.
    pub closed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MlnProgram {
    domains: Vec<(Symbol, Vec<Symbol>)>,
    preds: Vec<PredDecl>,
    evidence: HashMap<(Symbol, Vec<Symbol>), bool>,
    clauses: Vec<MlnClause>,
    queries: Vec<Symbol>,
}

impl MlnProgram {
    pub fn domains(&self) -> &[(Symbol, Vec<Symbol>)] {
        &self.domains
    }

    pub fn domain(&self, name: &Symbol) -> Option<&[Symbol]> {
        self.domains.iter().find(|d| &d.0 == name).map(|d| d.1.as_slice())
    }

    pub fn predicates(&self) -> &[PredDecl] {
        &self.preds
    }

    pub fn predicate(&self, name: &Symbol) -> Option<&PredDecl> {
        self.preds.iter().find(|p| &p.name == name)
    }

    pub fn clauses(&self) -> &[MlnClause] {
        &self.clauses
    }

    pub fn queries(&self) -> &[Symbol] {
        &self.queries
    }

    /// Truth value fixed by evidence, if any.
    pub fn evidence(&self, pred: &Symbol, args: &[Symbol]) -> Option<bool> {
        let known = self.evidence.get(&(pred.clone(), args.to_vec())).copied();
        match self.predicate(pred) {
            Some(p) if p.closed => Some(known.unwrap_or(false)),
            _ => known,
        }
    }

    /// Variables of clause `i` in order of first appearance, with domains.
    pub fn clause_vars(&self, i: usize) -> Vec<(Symbol, Symbol)> {
        let mut out: Vec<(Symbol, Symbol)> = Vec::new();
        for lit in &self.clauses[i].literals {
            if let MlnLiteral::Atom { pred, args, .. } = lit {
                let decl = self.predicate(pred).expect("validated");
                for (a, d) in args.iter().zip(&decl.domains) {
                    if let MlnArg::Var(v) = a {
                        if !out.iter().any(|(x, _)| x == v) {
                            out.push((v.clone(), d.clone()));
                        }
                    }
                }
            }
        }
        out
    }

    /// Number of groundings of clause `i`.
    pub fn grounding_count(&self, i: usize) -> u64 {
        self.clause_vars(i)
            .iter()
            .map(|(_, d)| self.domain(d).map_or(0, |c| c.len() as u64))
            .product()
    }
}

#[derive(Clone, Debug, Default)]
pub struct MlnBuilder {
    domains: Vec<(Symbol, Vec<Symbol>)>,
    preds: Vec<PredDecl>,
    evidence: Vec<(Symbol, Vec<Symbol>, bool)>,
    clauses: Vec<MlnClause>,
    queries: Vec<Symbol>,
}

impl MlnBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn domain(&mut self, name: &str, constants: &[&str]) -> &mut Self {
        self.domains.push((Symbol::new(name), constants.iter().map(|c| Symbol::new(c)).collect()));
        self
    }

    pub fn predicate(&mut self, name: &str, domains: &[&str], closed: bool) -> &mut Self {
        self.preds.push(PredDecl {
            name: Symbol::new(name),
            domains: domains.iter().map(|d| Symbol::new(d)).collect(),
            closed,
        });
        self
    }

    pub fn evidence(&mut self, pred: &str, args: &[&str], truth: bool) -> &mut Self {
        self.evidence.push((Symbol::new(pred), args.iter().map(|a| Symbol::new(a)).collect(), truth));
        self
    }

    pub fn clause(&mut self, weight: Weight, literals: Vec<MlnLiteral>) -> &mut Self {
        self.clauses.push(MlnClause { weight, literals });
        self
    }

    pub fn query(&mut self, pred: &str) -> &mut Self {
        self.queries.push(Symbol::new(pred));
        self
    }

    pub fn build(self) -> Result<MlnProgram, MlnError> {
        let mut domains: Vec<(Symbol, Vec<Symbol>)> = Vec::new();
        for (name, consts) in self.domains {
            if domains.iter().any(|d| d.0 == name) {
                return Err(MlnError::Duplicate(name.as_str().into()));
            }
            let mut uniq: Vec<Symbol> = Vec::new();
            for c in consts {
                if !uniq.contains(&c) {
                    uniq.push(c);
                }
            }
            domains.push((name, uniq));
        }
        let mut preds: Vec<PredDecl> = Vec::new();
        for p in self.preds {
            if preds.iter().any(|q| q.name == p.name) {
                return Err(MlnError::Duplicate(p.name.as_str().into()));
            }
            for d in &p.domains {
                if !domains.iter().any(|x| &x.0 == d) {
                    return Err(MlnError::UnknownDomain(d.as_str().into()));
                }
            }
            preds.push(p);
        }
        let lookup = |pred: &Symbol, n: usize, shown: &dyn Fn() -> String| -> Result<Vec<Symbol>, MlnError> {
            let decl = preds
                .iter()
                .find(|p| &p.name == pred)
                .ok_or_else(|| MlnError::UnknownPredicate(pred.as_str().into()))?;
            if decl.domains.len() != n {
                return Err(MlnError::Arity { atom: shown(), expected: decl.domains.len(), found: n });
            }
            Ok(decl.domains.clone())
        };
        let add_constant = |domains: &mut Vec<(Symbol, Vec<Symbol>)>, d: &Symbol, c: &Symbol| {
            let dom = &mut domains.iter_mut().find(|x| &x.0 == d).expect("checked").1;
            if !dom.contains(c) {
                dom.push(c.clone());
            }
        };

        let mut evidence: HashMap<(Symbol, Vec<Symbol>), bool> = HashMap::new();
        for (pred, args, truth) in self.evidence {
            let shown = || format!("{}({})", pred.as_str(), join(&args));
            let doms = lookup(&pred, args.len(), &shown)?;
            for (d, c) in doms.iter().zip(&args) {
                add_constant(&mut domains, d, c);
            }
            match evidence.insert((pred.clone(), args.clone()), truth) {
                Some(t) if t != truth => return Err(MlnError::ContradictoryEvidence(shown())),
                _ => {}
            }
        }

        for c in &self.clauses {
            if let Weight::Soft(w) = c.weight {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(MlnError::UnsupportedWeight(w.to_string()));
                }
            }
            let mut var_dom: Vec<(Symbol, Symbol)> = Vec::new();
            for lit in &c.literals {
                let MlnLiteral::Atom { pred, args, .. } = lit else { continue };
                let doms = lookup(pred, args.len(), &|| lit.to_string())?;
                for (a, d) in args.iter().zip(&doms) {
                    match a {
                        MlnArg::Const(k) => add_constant(&mut domains, d, k),
                        MlnArg::Var(v) => match var_dom.iter().find(|x| &x.0 == v) {
                            Some((_, first)) if first != d => {
                                return Err(MlnError::DomainMismatch {
                                    var: v.as_str().into(),
                                    first: first.as_str().into(),
                                    second: d.as_str().into(),
                                })
                            }
                            Some(_) => {}
                            None => var_dom.push((v.clone(), d.clone())),
                        },
                    }
                }
            }
            for lit in &c.literals {
                for a in lit.args() {
                    if let MlnArg::Var(v) = a {
                        if !var_dom.iter().any(|x| &x.0 == v) {
                            return Err(MlnError::UnknownDomain(format!("of variable {}", v.as_str())));
                        }
                    }
                }
            }
        }
        for q in &self.queries {
            if !preds.iter().any(|p| &p.name == q) {
                return Err(MlnError::UnknownPredicate(q.as_str().into()));
            }
        }
        Ok(MlnProgram { domains, preds, evidence, clauses: self.clauses, queries: self.queries })
    }
}

fn join(args: &[Symbol]) -> String {
    let mut s = String::new();
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(a.as_str());
    }
    s
}

/// Groundings of one clause that share the same non-evidence atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct Group {
    pub clause: usize,
    /// Values of the variables occurring in open-predicate literals.
    pub key: Vec<Symbol>,
    /// Remaining literals as (positive, atom), without duplicates.
    pub residual: Vec<(bool, GroundAtom)>,
    pub multiplicity: u64,
}

fn ground_atom(pred: &Symbol, args: &[Symbol]) -> GroundAtom {
    GroundAtom { pred: pred.clone(), args: args.iter().map(|a| Term::App(a.clone(), Vec::new())).collect() }
}

/// Enumerates every grounding, drops those satisfied by evidence, strips
/// falsified evidence literals from the rest and groups by key.
pub fn ground_and_simplify(m: &MlnProgram) -> Vec<Group> {
    let mut groups: Vec<Group> = Vec::new();
    for (ci, clause) in m.clauses.iter().enumerate() {
        let vars = m.clause_vars(ci);
        let names: Vec<Symbol> = vars.iter().map(|v| v.0.clone()).collect();
        let doms: Vec<&[Symbol]> = vars.iter().map(|(_, d)| m.domain(d).unwrap_or(&[])).collect();
        let open: Vec<usize> = (0..vars.len())
            .filter(|&k| {
                clause.literals.iter().any(|l| match l {
                    MlnLiteral::Atom { pred, args, .. } => {
                        !m.predicate(pred).is_some_and(|p| p.closed) && args.contains(&MlnArg::Var(names[k].clone()))
                    }
                    MlnLiteral::Equal { .. } => false,
                })
            })
            .collect();
        let mut index: HashMap<Vec<Symbol>, usize> = HashMap::new();
        if doms.iter().any(|d| d.is_empty()) {
            continue;
        }
        let mut pick = vec![0usize; vars.len()];
        'outer: loop {
            let values: Vec<Symbol> = pick.iter().zip(&doms).map(|(&i, d)| d[i].clone()).collect();
            if let Some(residual) = simplify(m, clause, &names, &values) {
                let key: Vec<Symbol> = open.iter().map(|&k| values[k].clone()).collect();
                match index.get(&key) {
                    Some(&g) => groups[g].multiplicity += 1,
                    None => {
                        index.insert(key.clone(), groups.len());
                        groups.push(Group { clause: ci, key, residual, multiplicity: 1 });
                    }
                }
            }
            let mut k = pick.len();
            loop {
                if k == 0 {
                    break 'outer;
                }
                k -= 1;
                pick[k] += 1;
                if pick[k] < doms[k].len() {
                    break;
                }
                pick[k] = 0;
            }
        }
    }
    groups
}

/// Residual of one grounding, or `None` if evidence or a tautology
/// satisfies it.
fn simplify(m: &MlnProgram, clause: &MlnClause, vars: &[Symbol], values: &[Symbol]) -> Option<Vec<(bool, GroundAtom)>> {
    let mut residual: Vec<(bool, GroundAtom)> = Vec::new();
    for lit in &clause.literals {
        match lit {
            MlnLiteral::Equal { positive, lhs, rhs } => {
                if (lhs.resolve(vars, values) == rhs.resolve(vars, values)) == *positive {
                    return None;
                }
            }
            MlnLiteral::Atom { positive, pred, args } => {
                let args: Vec<Symbol> = args.iter().map(|a| a.resolve(vars, values).clone()).collect();
                match m.evidence(pred, &args) {
                    Some(t) if t == *positive => return None,
                    Some(_) => {}
                    None => {
                        let atom = ground_atom(pred, &args);
                        if residual.iter().any(|(p, a)| *a == atom && p != positive) {
                            return None;
                        }
                        if !residual.iter().any(|(_, a)| *a == atom) {
                            residual.push((*positive, atom));
                        }
                    }
                }
            }
        }
    }
    Some(residual)
}

#[derive(Clone, Debug)]
pub struct MlnEncoding {
    pub problem: Problem,
    /// Total soft weight over all groundings; MAP weight = constant − cost.
    pub constant: f64,
    pub groups: usize,
    pub penalty_atoms: usize,
    /// Groups folded into a direct atom cost.
    pub folded: usize,
    pub penalty_predicate: Symbol,
}

/// Builds the ground problem for `groups` of program `m`.
pub fn encode_map(m: &MlnProgram, groups: &[Group], iff: bool) -> Result<MlnEncoding, MlnError> {
    let mut cb = String::from("cb");
    while m.preds.iter().any(|p| p.name.as_str() == cb) {
        cb.push('_');
    }
    let mut costs: Vec<(GroundAtom, f64)> = Vec::new();
    let mut cost_index: HashMap<GroundAtom, usize> = HashMap::new();
    let mut add_cost = |atom: GroundAtom, c: f64| match cost_index.get(&atom) {
        Some(&i) => costs[i].1 += c,
        None => {
            cost_index.insert(atom.clone(), costs.len());
            costs.push((atom, c));
        }
    };
    let mut b = ProblemBuilder::new();
    let mut penalty_atoms = 0;
    let mut folded = 0;
    for (gi, g) in groups.iter().enumerate() {
        let name = format!("g{}_c{}", gi, g.clause);
        let lits = g.residual.iter().map(|(p, a)| (*p, a.clone()));
        match m.clauses[g.clause].weight {
            Weight::Hard => {
                if g.residual.is_empty() {
                    return Err(MlnError::HardUnsatisfiable(g.clause));
                }
                b.clause(ground_clause(&name, lits));
            }
            Weight::Soft(w) => {
                let cost = w * g.multiplicity as f64;
                if let [(false, atom)] = g.residual.as_slice() {
                    add_cost(atom.clone(), cost);
                    folded += 1;
                    continue;
                }
                let mut args = vec![Term::Int(g.clause as i64)];
                args.extend(g.key.iter().map(|k| Term::App(k.clone(), Vec::new())));
                let penalty = GroundAtom { pred: Symbol::new(&cb), args };
                b.clause(ground_clause(&name, lits.clone().chain([(true, penalty.clone())])));
                if iff {
                    for (k, (p, a)) in g.residual.iter().enumerate() {
                        let reverse = [(false, penalty.clone()), (!p, a.clone())];
                        b.clause(ground_clause(&format!("{}_iff{}", name, k), reverse.into_iter()));
                    }
                }
                add_cost(penalty, cost);
                penalty_atoms += 1;
            }
        }
    }
    for (atom, c) in costs {
        b.cost_rule(CostRule { pattern: AtomPattern::from_ground(&atom), expr: CostExpr::Num(c) });
    }
    let problem = b.build().map_err(|d| MlnError::Problem(d.into_iter().next().expect("non-empty").error))?;
    let constant = m
        .clauses
        .iter()
        .enumerate()
        .filter_map(|(i, c)| match c.weight {
            Weight::Soft(w) => Some(w * m.grounding_count(i) as f64),
            Weight::Hard => None,
        })
        .sum();
    Ok(MlnEncoding {
        problem,
        constant,
        groups: groups.len(),
        penalty_atoms,
        folded,
        penalty_predicate: Symbol::new(&cb),
    })
}

fn ground_clause(name: &str, lits: impl Iterator<Item = (bool, GroundAtom)>) -> FoClause {
    let mut lits: Vec<(bool, GroundAtom)> = lits.collect();
    // negative literals first, as clause validation requires
    lits.sort_by_key(|l| l.0);
    let items = lits
        .into_iter()
        .map(|(p, a)| {
            let atom = AtomPattern::from_ground(&a);
            if p {
                ClauseItem::Pos(atom)
            } else {
                ClauseItem::Neg { atom, generator: false }
            }
        })
        .collect();
    FoClause::new(name, items)
}

/// Grounds, simplifies and encodes in one step.
pub fn compile(m: &MlnProgram, iff: bool) -> Result<MlnEncoding, MlnError> {
    encode_map(m, &ground_and_simplify(m), iff)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(v: &str) -> MlnArg {
        MlnArg::Var(Symbol::new(v))
    }

    fn lit(positive: bool, pred: &str, args: &[&str]) -> MlnLiteral {
        MlnLiteral::Atom {
            positive,
            pred: Symbol::new(pred),
            args: args
                .iter()
                .map(|a| if a.starts_with(char::is_uppercase) { var(a) } else { MlnArg::Const(Symbol::new(a)) })
                .collect(),
        }
    }

    #[test]
    fn evidence_drops_satisfied_groundings() {
        let mut b = MlnBuilder::new();
        b.domain("d", &["a", "b"]).predicate("ev", &["d"], true).predicate("q", &["d"], false);
        b.evidence("ev", &["a"], true);
        b.clause(Weight::Soft(1.0), vec![lit(false, "ev", &["X"]), lit(true, "q", &["X"])]);
        let m = b.build().unwrap();
        let g = ground_and_simplify(&m);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].residual, vec![(true, ground_atom(&Symbol::new("q"), &[Symbol::new("a")]))]);
        assert_eq!(g[0].multiplicity, 1);
    }

    #[test]
    fn fully_satisfied_clause_yields_nothing() {
        let mut b = MlnBuilder::new();
        b.domain("d", &["a"]).predicate("ev", &["d"], true);
        b.evidence("ev", &["a"], true);
        b.clause(Weight::Hard, vec![lit(true, "ev", &["X"])]);
        assert!(ground_and_simplify(&b.build().unwrap()).is_empty());
    }

    fn advised_by() -> MlnProgram {
        let mut b = MlnBuilder::new();
        b.domain("person", &["a1", "a2"]).domain("paper", &[]);
        b.predicate("publication", &["paper", "person"], true);
        b.predicate("advisedBy", &["person", "person"], false);
        for p in ["p1", "p2"] {
            b.evidence("publication", &[p, "a1"], true).evidence("publication", &[p, "a2"], true);
        }
        b.clause(
            Weight::Soft(0.749),
            vec![
                lit(false, "publication", &["A3", "A1"]),
                lit(false, "publication", &["A3", "A2"]),
                MlnLiteral::Equal { positive: true, lhs: var("A1"), rhs: var("A2") },
                lit(true, "advisedBy", &["A1", "A2"]),
                lit(true, "advisedBy", &["A2", "A1"]),
            ],
        );
        b.build().unwrap()
    }

    #[test]
    fn shared_key_counts_multiplicity() {
        let m = advised_by();
        let g = ground_and_simplify(&m);
        // (a1,a2) and (a2,a1), each reached through both papers
        assert_eq!(g.len(), 2);
        assert!(g.iter().all(|g| g.multiplicity == 2 && g.residual.len() == 2));
        assert_eq!(g[0].key, vec![Symbol::new("a1"), Symbol::new("a2")]);
    }

    #[test]
    fn advised_by_encoding() {
        let m = advised_by();
        let mut g = ground_and_simplify(&m);
        g.truncate(1);
        g[0].multiplicity = 1;
        let e = encode_map(&m, &g, true).unwrap();
        let shown: Vec<String> = e.problem.clauses().iter().map(|c| c.to_string()).collect();
        assert_eq!(
            shown,
            [
                "advisedBy(a1,a2), advisedBy(a2,a1), cb(0,a1,a2)",
                "!cb(0,a1,a2), !advisedBy(a1,a2)",
                "!cb(0,a1,a2), !advisedBy(a2,a1)",
            ]
        );
        let cb = GroundAtom { pred: Symbol::new("cb"), args: vec![Term::Int(0), Term::constant("a1"), Term::constant("a2")] };
        assert!((e.problem.cost_of(&cb).unwrap() - 0.749).abs() < 1e-12);
        assert_eq!(e.penalty_atoms, 1);
    }

    #[test]
    fn single_negative_residual_folds_into_atom_cost() {
        let mut b = MlnBuilder::new();
        b.domain("d", &["a"]).domain("e", &["u", "v", "w"]);
        b.predicate("smokes", &["d"], false).predicate("k", &["e"], true);
        for c in ["u", "v", "w"] {
            b.evidence("k", &[c], true);
        }
        b.clause(Weight::Soft(2.0), vec![lit(false, "k", &["Y"]), lit(false, "smokes", &["X"])]);
        let m = b.build().unwrap();
        let e = compile(&m, true).unwrap();
        assert!(e.problem.clauses().is_empty());
        assert_eq!(e.folded, 1);
        let smokes = GroundAtom::new("smokes", vec![Term::constant("a")]);
        assert!((e.problem.cost_of(&smokes).unwrap() - 6.0).abs() < 1e-12);
        assert!((e.constant - 6.0).abs() < 1e-12);
    }

    #[test]
    fn hard_residuals() {
        let mut b = MlnBuilder::new();
        b.domain("d", &["a"]).predicate("p", &["d"], false).predicate("ev", &["d"], true);
        b.clause(Weight::Hard, vec![lit(true, "p", &["a"])]);
        let m = b.build().unwrap();
        let e = compile(&m, true).unwrap();
        assert_eq!(e.problem.clauses()[0].to_string(), "p(a)");
        assert!(e.problem.cost_rules().is_empty());

        let mut b = MlnBuilder::new();
        b.domain("d", &["a"]).predicate("ev", &["d"], true);
        b.clause(Weight::Hard, vec![lit(true, "ev", &["a"])]);
        let err = compile(&b.build().unwrap(), true).unwrap_err();
        assert_eq!(err.to_string(), "hard clause unsatisfiable given evidence: clause 0");
    }

    #[test]
    fn empty_soft_residual_forces_its_penalty() {
        let mut b = MlnBuilder::new();
        b.domain("d", &["a"]).predicate("ev", &["d"], true);
        b.clause(Weight::Soft(1.5), vec![lit(true, "ev", &["a"])]);
        let e = compile(&b.build().unwrap(), true).unwrap();
        assert_eq!(e.problem.clauses()[0].to_string(), "cb(0)");
    }

    #[test]
    fn penalty_name_avoids_clash() {
        let mut b = MlnBuilder::new();
        b.domain("d", &["a"]).predicate("cb", &["d"], false).predicate("q", &["d"], false);
        b.clause(Weight::Soft(1.0), vec![lit(true, "cb", &["X"]), lit(true, "q", &["X"])]);
        let e = compile(&b.build().unwrap(), false).unwrap();
        assert_eq!(e.penalty_predicate.as_str(), "cb_");
    }

    #[test]
    fn validation_errors() {
        let mut b = MlnBuilder::new();
        b.domain("d", &["a"]).predicate("p", &["d"], false);
        b.clause(Weight::Soft(-1.0), vec![lit(true, "p", &["X"])]);
        assert!(matches!(b.build(), Err(MlnError::UnsupportedWeight(_))));

        let mut b = MlnBuilder::new();
        b.domain("d", &["a"]).domain("e", &["b"]).predicate("p", &["d"], false).predicate("q", &["e"], false);
        b.clause(Weight::Hard, vec![lit(true, "p", &["X"]), lit(true, "q", &["X"])]);
        assert!(matches!(b.build(), Err(MlnError::DomainMismatch { .. })));

        let mut b = MlnBuilder::new();
        b.domain("d", &["a"]).predicate("p", &["d"], false);
        b.evidence("p", &["a"], true).evidence("p", &["a"], false);
        assert!(matches!(b.build(), Err(MlnError::ContradictoryEvidence(_))));
    }

    #[test]
    fn constants_extend_domains() {
        let mut b = MlnBuilder::new();
        b.domain("d", &["a"]).predicate("p", &["d"], false);
        b.evidence("p", &["b"], true);
        b.clause(Weight::Hard, vec![lit(true, "p", &["c"])]);
        let m = b.build().unwrap();
        assert_eq!(m.domain(&Symbol::new("d")).unwrap().len(), 3);
    }
}
