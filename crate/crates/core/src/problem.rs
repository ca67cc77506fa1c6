//! First-order clauses, context predicates, cost rules and their validation.
//!
//! A [`Problem`] is only obtainable through [`ProblemBuilder::build`], which
//! enforces the literal-order and binding invariants the separation search
//! relies on:
//!
//! * negative literals precede positive ones (guards may appear anywhere);
//! * every variable of a positive literal is bound by an earlier negative
//!   literal or guard call;
//! * arithmetic in a negative literal only mentions variables that are bound
//!   by the time the literal is matched;
//! * context predicates are non-recursive and every guard call is
//!   sufficiently instantiated for its definition.

use alloc::{
    boxed::Box,
    collections::BTreeMap,
    format,
    string::{String, ToString},
    vec::Vec,
};
use core::fmt;

use hashbrown::{HashMap, HashSet};

use crate::error::{CostError, ProblemError, TermError};
use crate::term::{match_atom, AtomPattern, GroundAtom, Pattern, Substitution, Symbol, CONS, NIL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "\\=",
            CmpOp::Lt => "<",
            CmpOp::Le => "=<",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// A goal in a guard: a call to a context predicate or a builtin comparison.
#[derive(Clone, PartialEq, Eq)]
pub enum Goal {
    Call(AtomPattern),
    Compare(CmpOp, Pattern, Pattern),
}

impl Goal {
    pub fn collect_vars(&self, out: &mut Vec<Symbol>) {
        match self {
            Goal::Call(a) => a.collect_vars(out),
            Goal::Compare(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::Call(a) => write!(f, "{}", a),
            Goal::Compare(op, l, r) => write!(f, "{} {} {}", l, op.symbol(), r),
        }
    }
}

impl fmt::Debug for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// One rule (or fact, when the body is empty) of a context predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardRule {
    pub head: AtomPattern,
    pub body: Vec<Goal>,
}

/// A predicate with fixed truth values, defined by rules and facts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextPredicate {
    pub name: Symbol,
    pub arity: usize,
    pub rules: Vec<GuardRule>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClauseItem {
    /// A negative literal. Generator literals enumerate groundings from the
    /// LP support; the others are fully bound when reached and only test.
    Neg { atom: AtomPattern, generator: bool },
    Pos(AtomPattern),
    Guard(Goal),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoClause {
    pub name: String,
    pub items: Vec<ClauseItem>,
}

impl FoClause {
    pub fn new(name: &str, items: Vec<ClauseItem>) -> Self {
        FoClause { name: name.to_string(), items }
    }

    pub fn negative_literals(&self) -> impl Iterator<Item = &AtomPattern> {
        self.items.iter().filter_map(|i| match i {
            ClauseItem::Neg { atom, .. } => Some(atom),
            _ => None,
        })
    }

    pub fn positive_literals(&self) -> impl Iterator<Item = &AtomPattern> {
        self.items.iter().filter_map(|i| match i {
            ClauseItem::Pos(atom) => Some(atom),
            _ => None,
        })
    }

    pub fn guards(&self) -> impl Iterator<Item = &Goal> {
        self.items.iter().filter_map(|i| match i {
            ClauseItem::Guard(g) => Some(g),
            _ => None,
        })
    }

    pub fn vars(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        for item in &self.items {
            match item {
                ClauseItem::Neg { atom, .. } | ClauseItem::Pos(atom) => atom.collect_vars(&mut out),
                ClauseItem::Guard(g) => g.collect_vars(&mut out),
            }
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.vars().is_empty()
    }
}

/// The clause body as written in a problem file, without name or period.
impl fmt::Display for FoClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match item {
                ClauseItem::Neg { atom, .. } => write!(f, "!{}", atom)?,
                ClauseItem::Pos(atom) => write!(f, "{}", atom)?,
                ClauseItem::Guard(g) => write!(f, "guard{{{}}}", g)?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Real-valued cost expression over the variables of a cost pattern.
#[derive(Clone, Debug, PartialEq)]
pub enum CostExpr {
    Num(f64),
    Var(Symbol),
    Neg(Box<CostExpr>),
    Bin(CostOp, Box<CostExpr>, Box<CostExpr>),
    /// Integer-to-real coercion, `float(X)`.
    Float(Box<CostExpr>),
}

impl CostExpr {
    pub fn bin(op: CostOp, a: CostExpr, b: CostExpr) -> Self {
        CostExpr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn eval(&self, s: &Substitution) -> Result<f64, TermError> {
        Ok(match self {
            CostExpr::Num(v) => *v,
            CostExpr::Var(v) => match s.get(v) {
                Some(t) => t.as_int().ok_or(TermError::ArithFault("non-integer operand"))? as f64,
                None => return Err(TermError::Unbound(v.clone())),
            },
            CostExpr::Neg(e) => -e.eval(s)?,
            CostExpr::Float(e) => e.eval(s)?,
            CostExpr::Bin(op, a, b) => {
                let (a, b) = (a.eval(s)?, b.eval(s)?);
                match op {
                    CostOp::Add => a + b,
                    CostOp::Sub => a - b,
                    CostOp::Mul => a * b,
                    CostOp::Div => {
                        if b == 0.0 {
                            return Err(TermError::ArithFault("division by zero"));
                        }
                        a / b
                    }
                }
            }
        })
    }

    pub fn collect_vars(&self, out: &mut Vec<Symbol>) {
        match self {
            CostExpr::Num(_) => {}
            CostExpr::Var(v) => crate::term::push_unique(out, v),
            CostExpr::Neg(e) | CostExpr::Float(e) => e.collect_vars(out),
            CostExpr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            CostExpr::Bin(CostOp::Add | CostOp::Sub, ..) => 1,
            CostExpr::Bin(..) => 2,
            CostExpr::Neg(_) => 0,
            CostExpr::Num(v) if v.is_sign_negative() => 0,
            _ => 4,
        }
    }
}

impl fmt::Display for CostExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Debug formatting of f64 is the shortest round-tripping form.
            CostExpr::Num(v) => write!(f, "{:?}", v),
            CostExpr::Var(v) => f.write_str(v.as_str()),
            CostExpr::Neg(e) => {
                if matches!(**e, CostExpr::Var(_) | CostExpr::Float(_)) {
                    write!(f, "-{}", e)
                } else {
                    write!(f, "-({})", e)
                }
            }
            CostExpr::Float(e) => write!(f, "float({})", e),
            CostExpr::Bin(op, a, b) => {
                let p = self.precedence();
                let sym = match op {
                    CostOp::Add => "+",
                    CostOp::Sub => "-",
                    CostOp::Mul => "*",
                    CostOp::Div => "/",
                };
                if a.precedence() < p {
                    write!(f, "({})", a)?;
                } else {
                    write!(f, "{}", a)?;
                }
                f.write_str(sym)?;
                if b.precedence() <= p {
                    write!(f, "({})", b)
                } else {
                    write!(f, "{}", b)
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostRule {
    pub pattern: AtomPattern,
    pub expr: CostExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArgType {
    Int,
    Sym,
    Term,
    List(Box<ArgType>),
}

impl ArgType {
    fn admits(&self, p: &Pattern) -> bool {
        match (self, p) {
            (_, Pattern::Var(_)) | (ArgType::Term, _) => true,
            (ArgType::Int, Pattern::Int(_) | Pattern::Arith(_)) => true,
            (ArgType::Sym, Pattern::App(_, args)) => args.is_empty(),
            (ArgType::List(_), Pattern::App(n, args)) if args.is_empty() => n.as_str() == NIL,
            (ArgType::List(elem), Pattern::App(n, args)) if args.len() == 2 && n.as_str() == CONS => {
                elem.admits(&args[0]) && self.admits(&args[1])
            }
            _ => false,
        }
    }
}

impl fmt::Display for ArgType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArgType::Int => f.write_str("int"),
            ArgType::Sym => f.write_str("sym"),
            ArgType::Term => f.write_str("term"),
            ArgType::List(t) => write!(f, "list({})", t),
        }
    }
}

/// Declared argument types of one predicate of the Herbrand base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub pred: Symbol,
    pub args: Vec<ArgType>,
}

/// Cost rules indexed for first-match lookup.
#[derive(Clone, Debug, Default)]
struct CostIndex {
    by_pred: HashMap<(Symbol, usize), Vec<usize>>,
    ground: HashMap<GroundAtom, usize>,
}

impl CostIndex {
    fn new(rules: &[CostRule]) -> Self {
        let mut idx = CostIndex::default();
        for (i, r) in rules.iter().enumerate() {
            match r.pattern.to_ground() {
                Ok(g) => {
                    idx.ground.entry(g).or_insert(i);
                }
                Err(_) => idx
                    .by_pred
                    .entry((r.pattern.pred.clone(), r.pattern.arity()))
                    .or_default()
                    .push(i),
            }
        }
        idx
    }
}

/// A validated problem instance: clauses, context predicates and costs.
#[derive(Clone, Debug)]
pub struct Problem {
    signatures: Vec<Signature>,
    guards: Vec<ContextPredicate>,
    costs: Vec<CostRule>,
    clauses: Vec<FoClause>,
    ground: bool,
    guard_index: BTreeMap<(Symbol, usize), usize>,
    cost_index: CostIndex,
}

impl PartialEq for Problem {
    fn eq(&self, other: &Self) -> bool {
        self.signatures == other.signatures
            && self.guards == other.guards
            && self.costs == other.costs
            && self.clauses == other.clauses
            && self.ground == other.ground
    }
}

impl Problem {
    pub fn clauses(&self) -> &[FoClause] {
        &self.clauses
    }

    pub fn guards(&self) -> &[ContextPredicate] {
        &self.guards
    }

    pub fn cost_rules(&self) -> &[CostRule] {
        &self.costs
    }

    pub fn signatures(&self) -> &[Signature] {
        &self.signatures
    }

    /// True iff every clause is variable-free; such problems are loaded
    /// eagerly by the solver.
    pub fn is_ground(&self) -> bool {
        self.ground
    }

    pub fn guard(&self, name: &Symbol, arity: usize) -> Option<&ContextPredicate> {
        self.guard_index
            .get(&(name.clone(), arity))
            .map(|&i| &self.guards[i])
    }

    /// Cost of a ground atom: the first matching cost rule in document order,
    /// or zero when no rule matches.
    pub fn cost_of(&self, atom: &GroundAtom) -> Result<f64, CostError> {
        let ground_hit = self.cost_index.ground.get(atom).copied();
        let mut chosen = None;
        if let Some(bucket) = self.cost_index.by_pred.get(&(atom.pred.clone(), atom.arity())) {
            for &i in bucket {
                if ground_hit.is_some_and(|g| g < i) {
                    break;
                }
                if let Some(s) = match_atom(&self.costs[i].pattern, atom)? {
                    chosen = Some((i, s));
                    break;
                }
            }
        }
        let (rule, s) = match (chosen, ground_hit) {
            (Some(c), _) => c,
            (None, Some(g)) => (g, Substitution::new()),
            (None, None) => return Ok(0.0),
        };
        let value = self.costs[rule].expr.eval(&s)?;
        if !value.is_finite() {
            return Err(CostError::NonFinite(atom.to_string()));
        }
        if value < 0.0 {
            return Err(CostError::Negative { atom: atom.to_string(), value });
        }
        Ok(value)
    }
}

/// Which builder item a [`Diagnostic`] refers to, by insertion index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ItemRef {
    Signature(usize),
    Guard(usize),
    Cost(usize),
    Clause(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub item: ItemRef,
    pub error: ProblemError,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.error)
    }
}

#[derive(Clone, Debug, Default)]
pub struct ProblemBuilder {
    signatures: Vec<Signature>,
    guard_rules: Vec<GuardRule>,
    costs: Vec<CostRule>,
    clauses: Vec<FoClause>,
}

impl ProblemBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn signature(&mut self, sig: Signature) -> &mut Self {
        self.signatures.push(sig);
        self
    }

    pub fn guard_rule(&mut self, rule: GuardRule) -> &mut Self {
        self.guard_rules.push(rule);
        self
    }

    pub fn cost_rule(&mut self, rule: CostRule) -> &mut Self {
        self.costs.push(rule);
        self
    }

    pub fn clause(&mut self, clause: FoClause) -> &mut Self {
        self.clauses.push(clause);
        self
    }

    pub fn build(self) -> Result<Problem, Vec<Diagnostic>> {
        let mut diags = Vec::new();

        let mut sig_index: HashMap<(Symbol, usize), usize> = HashMap::new();
        for (i, s) in self.signatures.iter().enumerate() {
            if sig_index.insert((s.pred.clone(), s.args.len()), i).is_some() {
                diags.push(Diagnostic {
                    item: ItemRef::Signature(i),
                    error: ProblemError::DuplicateSignature(format!("{}/{}", s.pred, s.args.len())),
                });
            }
        }

        // Group rules into predicates, keeping first-appearance order.
        let mut guards: Vec<ContextPredicate> = Vec::new();
        let mut guard_index = BTreeMap::new();
        let mut first_rule = Vec::new();
        for (i, r) in self.guard_rules.iter().enumerate() {
            let key = (r.head.pred.clone(), r.head.arity());
            let gi = *guard_index.entry(key).or_insert_with(|| {
                guards.push(ContextPredicate {
                    name: r.head.pred.clone(),
                    arity: r.head.arity(),
                    rules: Vec::new(),
                });
                first_rule.push(i);
                guards.len() - 1
            });
            guards[gi].rules.push(r.clone());
        }

        let mut checker = ModeChecker { guards: &guards, index: &guard_index, checked: HashSet::new() };
        for (gi, err) in checker.check_graph() {
            diags.push(Diagnostic { item: ItemRef::Guard(first_rule[gi]), error: err });
        }
        let graph_ok = diags.iter().all(|d| !matches!(d.item, ItemRef::Guard(_)));

        let typing = Typing { sigs: &self.signatures, index: &sig_index };

        for (i, rule) in self.costs.iter().enumerate() {
            if let Err(error) = check_cost_rule(rule, &typing) {
                diags.push(Diagnostic { item: ItemRef::Cost(i), error });
            }
        }

        let mut clauses = self.clauses;
        if graph_ok {
            for (i, clause) in clauses.iter_mut().enumerate() {
                if let Err(error) = check_clause(clause, &typing, &mut checker) {
                    diags.push(Diagnostic { item: ItemRef::Clause(i), error });
                }
            }
        }

        if !diags.is_empty() {
            return Err(diags);
        }
        let ground = clauses.iter().all(FoClause::is_ground);
        let cost_index = CostIndex::new(&self.costs);
        Ok(Problem {
            signatures: self.signatures,
            guards,
            costs: self.costs,
            clauses,
            ground,
            guard_index,
            cost_index,
        })
    }
}

struct Typing<'a> {
    sigs: &'a [Signature],
    index: &'a HashMap<(Symbol, usize), usize>,
}

impl Typing<'_> {
    fn check(&self, atom: &AtomPattern) -> Result<(), ProblemError> {
        if self.sigs.is_empty() {
            return Ok(());
        }
        let Some(&si) = self.index.get(&(atom.pred.clone(), atom.arity())) else {
            return Err(ProblemError::Undeclared(format!("{}/{}", atom.pred, atom.arity())));
        };
        for (pos, (ty, arg)) in self.sigs[si].args.iter().zip(&atom.args).enumerate() {
            if !ty.admits(arg) {
                return Err(ProblemError::Type {
                    atom: atom.to_string(),
                    position: pos + 1,
                    expected: ty.to_string(),
                });
            }
        }
        Ok(())
    }
}

fn contains(vars: &[Symbol], v: &Symbol) -> bool {
    vars.iter().any(|x| x == v)
}

fn all_bound(p: &Pattern, bound: &[Symbol]) -> bool {
    let mut vs = Vec::new();
    p.collect_vars(&mut vs);
    vs.iter().all(|v| contains(bound, v))
}

/// Arithmetic in a matched atom may only use variables bound before the match
/// or by plain positions of the same atom.
fn check_matchable(atom: &AtomPattern, bound: &[Symbol]) -> Result<(), ProblemError> {
    let mut plain = bound.to_vec();
    atom.args.iter().for_each(|a| a.collect_match_vars(&mut plain));
    let mut arith = Vec::new();
    atom.args.iter().for_each(|a| a.collect_arith_vars(&mut arith));
    if arith.iter().all(|v| contains(&plain, v)) {
        Ok(())
    } else {
        Err(ProblemError::NonMatchable(atom.to_string()))
    }
}

fn check_cost_rule(rule: &CostRule, typing: &Typing<'_>) -> Result<(), ProblemError> {
    typing.check(&rule.pattern)?;
    check_matchable(&rule.pattern, &[])?;
    let mut pv = Vec::new();
    rule.pattern.collect_vars(&mut pv);
    let mut ev = Vec::new();
    rule.expr.collect_vars(&mut ev);
    match ev.iter().find(|v| !contains(&pv, v)) {
        Some(v) => Err(ProblemError::CostVariable(v.as_str().to_string())),
        None => Ok(()),
    }
}

fn check_clause(
    clause: &mut FoClause,
    typing: &Typing<'_>,
    modes: &mut ModeChecker<'_>,
) -> Result<(), ProblemError> {
    let mut bound: Vec<Symbol> = Vec::new();
    let mut seen_pos = false;
    for item in clause.items.iter_mut() {
        match item {
            ClauseItem::Neg { atom, generator } => {
                if seen_pos {
                    return Err(ProblemError::PosBeforeNeg);
                }
                typing.check(atom)?;
                check_matchable(atom, &bound)?;
                let mut vs = Vec::new();
                atom.collect_vars(&mut vs);
                let free = vs.iter().find(|v| !contains(&bound, v));
                if let (false, Some(v)) = (*generator, free) {
                    return Err(ProblemError::UngroundedTest {
                        literal: atom.to_string(),
                        var: v.as_str().to_string(),
                    });
                }
                *generator = free.is_some();
                for v in vs {
                    crate::term::push_unique(&mut bound, &v);
                }
            }
            ClauseItem::Pos(atom) => {
                seen_pos = true;
                typing.check(atom)?;
                let mut vs = Vec::new();
                atom.collect_vars(&mut vs);
                if let Some(v) = vs.iter().find(|v| !contains(&bound, v)) {
                    return Err(ProblemError::UngroundedPositive {
                        literal: atom.to_string(),
                        var: v.as_str().to_string(),
                    });
                }
            }
            ClauseItem::Guard(goal) => modes.check_goal(goal, &mut bound)?,
        }
    }
    Ok(())
}

/// Static instantiation analysis for guard calls.
struct ModeChecker<'a> {
    guards: &'a [ContextPredicate],
    index: &'a BTreeMap<(Symbol, usize), usize>,
    checked: HashSet<(usize, Vec<bool>)>,
}

impl ModeChecker<'_> {
    /// Reports unknown callees and recursion, once per offending predicate.
    fn check_graph(&mut self) -> Vec<(usize, ProblemError)> {
        let mut errors = Vec::new();
        let mut state = alloc::vec![0u8; self.guards.len()];
        for gi in 0..self.guards.len() {
            if state[gi] == 0 {
                self.visit(gi, &mut state, &mut errors);
            }
        }
        errors
    }

    fn visit(&self, gi: usize, state: &mut [u8], errors: &mut Vec<(usize, ProblemError)>) {
        state[gi] = 1;
        for rule in &self.guards[gi].rules {
            for goal in &rule.body {
                let Goal::Call(atom) = goal else { continue };
                match self.index.get(&(atom.pred.clone(), atom.arity())) {
                    None => errors.push((gi, ProblemError::UnknownGuard(format!("{}/{}", atom.pred, atom.arity())))),
                    Some(&callee) => match state[callee] {
                        0 => self.visit(callee, state, errors),
                        1 => errors.push((gi, ProblemError::RecursiveGuard(format!("{}/{}", atom.pred, atom.arity())))),
                        _ => {}
                    },
                }
            }
        }
        state[gi] = 2;
    }

    fn check_goal(&mut self, goal: &Goal, bound: &mut Vec<Symbol>) -> Result<(), ProblemError> {
        let insufficient = || ProblemError::Insufficient(goal.to_string());
        match goal {
            Goal::Compare(op, l, r) => {
                let (lb, rb) = (all_bound(l, bound), all_bound(r, bound));
                match (lb, rb, op, l, r) {
                    (true, true, ..) => Ok(()),
                    (false, true, CmpOp::Eq, Pattern::Var(v), _) | (true, false, CmpOp::Eq, _, Pattern::Var(v)) => {
                        bound.push(v.clone());
                        Ok(())
                    }
                    _ => Err(insufficient()),
                }
            }
            Goal::Call(atom) => {
                let Some(&gi) = self.index.get(&(atom.pred.clone(), atom.arity())) else {
                    return Err(ProblemError::UnknownGuard(format!("{}/{}", atom.pred, atom.arity())));
                };
                let mut adornment = Vec::with_capacity(atom.arity());
                let mut outputs = Vec::new();
                for arg in &atom.args {
                    if all_bound(arg, bound) {
                        adornment.push(true);
                    } else if let Pattern::Var(v) = arg {
                        adornment.push(false);
                        outputs.push(v.clone());
                    } else {
                        return Err(insufficient());
                    }
                }
                self.check_call(gi, adornment).map_err(|_| insufficient())?;
                for v in outputs {
                    crate::term::push_unique(bound, &v);
                }
                Ok(())
            }
        }
    }

    /// Checks every rule of a predicate under a bound/free argument pattern.
    fn check_call(&mut self, gi: usize, adornment: Vec<bool>) -> Result<(), ProblemError> {
        if self.checked.contains(&(gi, adornment.clone())) {
            return Ok(());
        }
        let guards = self.guards;
        for rule in &guards[gi].rules {
            let mut bound = Vec::new();
            for (arg, &is_in) in rule.head.args.iter().zip(&adornment) {
                if is_in {
                    arg.collect_match_vars(&mut bound);
                }
            }
            for (arg, &is_in) in rule.head.args.iter().zip(&adornment) {
                let mut av = Vec::new();
                arg.collect_arith_vars(&mut av);
                if is_in && !av.iter().all(|v| contains(&bound, v)) {
                    return Err(ProblemError::Insufficient(rule.head.to_string()));
                }
            }
            for goal in &rule.body {
                self.check_goal(goal, &mut bound)?;
            }
            for (arg, &is_in) in rule.head.args.iter().zip(&adornment) {
                if !is_in && !all_bound(arg, &bound) {
                    return Err(ProblemError::Insufficient(rule.head.to_string()));
                }
            }
        }
        self.checked.insert((gi, adornment));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{ArithExpr, ArithOp, Term};
    use alloc::vec;

    fn v(n: &str) -> Pattern {
        Pattern::var(n)
    }

    fn atom(p: &str, args: Vec<Pattern>) -> AtomPattern {
        AtomPattern::new(p, args)
    }

    fn plus1(n: &str) -> Pattern {
        Pattern::arith(ArithExpr::bin(ArithOp::Add, ArithExpr::Var(Symbol::new(n)), ArithExpr::Int(1)))
    }

    fn neg(a: AtomPattern) -> ClauseItem {
        ClauseItem::Neg { atom: a, generator: true }
    }

    fn walls_builder() -> ProblemBuilder {
        let mut b = ProblemBuilder::new();
        // wall_between(I,X,Y,X+1,Y) :- I mod 3 = 0.
        b.guard_rule(GuardRule {
            head: atom("wall_between", vec![v("I"), v("X"), v("Y"), plus1("X"), v("Y")]),
            body: vec![Goal::Compare(
                CmpOp::Eq,
                Pattern::arith(ArithExpr::bin(ArithOp::Mod, ArithExpr::Var(Symbol::new("I")), ArithExpr::Int(3))),
                Pattern::Int(0),
            )],
        });
        b
    }

    #[test]
    fn walls_clause_validates() {
        let mut b = walls_builder();
        b.clause(FoClause::new(
            "walls",
            vec![
                neg(atom("position", vec![v("I"), v("X1"), v("Y1")])),
                neg(atom("position", vec![plus1("I"), v("X2"), v("Y2")])),
                ClauseItem::Guard(Goal::Call(atom(
                    "wall_between",
                    vec![v("I"), v("X1"), v("Y1"), v("X2"), v("Y2")],
                ))),
            ],
        ));
        let p = b.build().unwrap();
        let c = &p.clauses()[0];
        assert_eq!(c.negative_literals().count(), 2);
        assert_eq!(c.guards().count(), 1);
        assert_eq!(c.positive_literals().count(), 0);
        assert!(!p.is_ground());
    }

    #[test]
    fn literal_order_is_enforced() {
        let mut b = ProblemBuilder::new();
        b.clause(FoClause::new(
            "bad",
            vec![
                ClauseItem::Pos(atom("p", vec![])),
                neg(atom("q", vec![])),
            ],
        ));
        let errs = b.build().unwrap_err();
        assert_eq!(errs[0].error, ProblemError::PosBeforeNeg);
        assert_eq!(errs[0].item, ItemRef::Clause(0));
        assert_eq!(errs[0].error.to_string(), "positive literal before negative literal");
    }

    #[test]
    fn unbound_positive_variable_is_rejected() {
        let mut b = ProblemBuilder::new();
        b.clause(FoClause::new(
            "bad",
            vec![neg(atom("p", vec![v("X")])), ClauseItem::Pos(atom("q", vec![v("Y")]))],
        ));
        let errs = b.build().unwrap_err();
        assert!(errs[0].error.to_string().starts_with("ungrounded positive literal"));
    }

    #[test]
    fn unbound_arithmetic_in_negative_literal_is_rejected() {
        let mut b = ProblemBuilder::new();
        b.clause(FoClause::new("bad", vec![neg(atom("f", vec![plus1("N")]))]));
        assert!(matches!(b.build().unwrap_err()[0].error, ProblemError::NonMatchable(_)));
    }

    #[test]
    fn recursion_is_rejected() {
        let mut b = ProblemBuilder::new();
        b.guard_rule(GuardRule { head: atom("a", vec![v("X")]), body: vec![Goal::Call(atom("b", vec![v("X")]))] });
        b.guard_rule(GuardRule { head: atom("b", vec![v("X")]), body: vec![Goal::Call(atom("a", vec![v("X")]))] });
        let errs = b.build().unwrap_err();
        assert!(errs.iter().any(|d| matches!(d.error, ProblemError::RecursiveGuard(_))));
        assert!(errs[0].error.to_string().starts_with("recursive guard"));
    }

    #[test]
    fn guard_needs_bound_inputs() {
        let mut b = ProblemBuilder::new();
        b.guard_rule(GuardRule {
            head: atom("big", vec![v("X")]),
            body: vec![Goal::Compare(CmpOp::Gt, v("X"), Pattern::Int(3))],
        });
        b.clause(FoClause::new(
            "c",
            vec![ClauseItem::Guard(Goal::Call(atom("big", vec![v("X")]))), ClauseItem::Pos(atom("p", vec![v("X")]))],
        ));
        assert!(matches!(b.build().unwrap_err()[0].error, ProblemError::Insufficient(_)));
    }

    #[test]
    fn fact_table_guard_can_generate_positive_groundings() {
        let mut b = ProblemBuilder::new();
        for (x, y) in [("a", "b"), ("b", "c")] {
            b.guard_rule(GuardRule {
                head: atom("edge", vec![Pattern::constant(x), Pattern::constant(y)]),
                body: vec![],
            });
        }
        b.clause(FoClause::new(
            "c",
            vec![
                ClauseItem::Guard(Goal::Call(atom("edge", vec![v("X"), v("Y")]))),
                ClauseItem::Pos(atom("p", vec![v("X"), v("Y")])),
            ],
        ));
        assert!(b.build().is_ok());
    }

    #[test]
    fn test_literal_must_be_bound() {
        let mut b = ProblemBuilder::new();
        b.clause(FoClause::new(
            "c",
            vec![ClauseItem::Neg { atom: atom("p", vec![v("X")]), generator: false }],
        ));
        assert!(matches!(b.build().unwrap_err()[0].error, ProblemError::UngroundedTest { .. }));
    }

    #[test]
    fn bound_negative_literal_is_a_test() {
        let mut b = ProblemBuilder::new();
        b.clause(FoClause::new(
            "c",
            vec![neg(atom("p", vec![v("X")])), neg(atom("q", vec![v("X")]))],
        ));
        let p = b.build().unwrap();
        let flags: Vec<bool> = p.clauses()[0]
            .items
            .iter()
            .map(|i| matches!(i, ClauseItem::Neg { generator: true, .. }))
            .collect();
        assert_eq!(flags, vec![true, false]);
    }

    #[test]
    fn signatures_are_checked() {
        let mut b = ProblemBuilder::new();
        b.signature(Signature { pred: Symbol::new("f"), args: vec![ArgType::Int, ArgType::List(Box::new(ArgType::Int))] });
        b.clause(FoClause::new(
            "ok",
            vec![neg(atom("f", vec![v("N"), v("L")])), ClauseItem::Pos(atom("f", vec![plus1("N"), Pattern::cons(plus1("N"), v("L"))]))],
        ));
        assert!(b.clone().build().is_ok());
        b.clause(FoClause::new("bad", vec![ClauseItem::Pos(atom("f", vec![Pattern::constant("a"), Pattern::nil()]))]));
        assert!(matches!(b.clone().build().unwrap_err()[0].error, ProblemError::Type { .. }));
        let mut b2 = b.clone();
        b2.clause(FoClause::new("undeclared", vec![ClauseItem::Pos(atom("g", vec![]))]));
        assert!(b2.build().unwrap_err().iter().any(|d| matches!(d.error, ProblemError::Undeclared(_))));
    }

    fn cost_problem(rules: Vec<CostRule>) -> Problem {
        let mut b = ProblemBuilder::new();
        for r in rules {
            b.cost_rule(r);
        }
        b.build().unwrap()
    }

    #[test]
    fn cost_rule_division() {
        let p = cost_problem(vec![CostRule {
            pattern: atom("cb", vec![v("X"), v("L")]),
            expr: CostExpr::bin(CostOp::Div, CostExpr::Num(1.0), CostExpr::Float(Box::new(CostExpr::Var(Symbol::new("X"))))),
        }]);
        let a = GroundAtom::new("cb", vec![Term::Int(4), Term::list(vec![Term::Int(7)])]);
        assert_eq!(p.cost_of(&a), Ok(0.25));
        let unmatched = GroundAtom::new("parent", vec![Term::constant("bob"), Term::constant("jim")]);
        assert_eq!(p.cost_of(&unmatched), Ok(0.0));
    }

    #[test]
    fn first_matching_rule_wins() {
        let p = cost_problem(vec![
            CostRule { pattern: atom("cb", vec![v("X"), v("L")]), expr: CostExpr::Num(1.0) },
            CostRule { pattern: atom("cb", vec![Pattern::Int(1), Pattern::nil()]), expr: CostExpr::Num(9.9) },
        ]);
        let a = GroundAtom::new("cb", vec![Term::Int(1), Term::nil()]);
        assert_eq!(p.cost_of(&a), Ok(1.0));
        // and a ground rule placed first shadows the general one
        let p = cost_problem(vec![
            CostRule { pattern: atom("cb", vec![Pattern::Int(1), Pattern::nil()]), expr: CostExpr::Num(9.9) },
            CostRule { pattern: atom("cb", vec![v("X"), v("L")]), expr: CostExpr::Num(1.0) },
        ]);
        assert_eq!(p.cost_of(&a), Ok(9.9));
        let b = GroundAtom::new("cb", vec![Term::Int(2), Term::nil()]);
        assert_eq!(p.cost_of(&b), Ok(1.0));
    }

    #[test]
    fn negative_cost_is_an_error() {
        let p = cost_problem(vec![CostRule {
            pattern: atom("q", vec![v("X")]),
            expr: CostExpr::bin(CostOp::Sub, CostExpr::Num(1.0), CostExpr::Var(Symbol::new("X"))),
        }]);
        assert_eq!(p.cost_of(&GroundAtom::new("q", vec![Term::Int(0)])), Ok(1.0));
        assert!(matches!(
            p.cost_of(&GroundAtom::new("q", vec![Term::Int(3)])),
            Err(CostError::Negative { .. })
        ));
        assert!(matches!(
            p.cost_of(&GroundAtom::new("q", vec![Term::constant("a")])),
            Err(CostError::Term(TermError::ArithFault(_)))
        ));
    }

    #[test]
    fn cost_expression_variables_must_come_from_the_pattern() {
        let mut b = ProblemBuilder::new();
        b.cost_rule(CostRule { pattern: atom("q", vec![]), expr: CostExpr::Var(Symbol::new("Z")) });
        assert!(matches!(b.build().unwrap_err()[0].error, ProblemError::CostVariable(_)));
    }
}
