//! Terms, atoms and substitutions over the Herbrand universe.
//!
//! Ground values ([`Term`], [`GroundAtom`]) are kept separate from the
//! patterns that occur in clauses ([`Pattern`], [`AtomPattern`]). Patterns may
//! contain variables and integer arithmetic; arithmetic is only ever
//! *evaluated*, never solved, so a pattern such as `f(N+1)` can be matched
//! against a ground atom only once `N` is already bound.

use alloc::{boxed::Box, string::String, sync::Arc, vec::Vec};
use core::fmt;

use crate::error::TermError;

/// Functor used for list cells, `[H|T]`.
pub const CONS: &str = ".";
/// Functor used for the empty list, `[]`.
pub const NIL: &str = "[]";

/// An interned-by-value name: predicate, constructor or variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    #[inline]
    fn same(&self, other: &Symbol) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }

    /// True when the name prints without quotes.
    pub fn is_plain(&self) -> bool {
        let s = self.as_str();
        if s == NIL {
            return true;
        }
        let mut chars = s.chars();
        match chars.next() {
            Some(c) if c.is_ascii_lowercase() => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl From<String> for Symbol {
    fn from(s: String) -> Self {
        Symbol(Arc::from(s))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_plain() {
            return f.write_str(self.as_str());
        }
        f.write_str("'")?;
        for c in self.as_str().chars() {
            match c {
                '\'' => f.write_str("\\'")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                c => fmt::Write::write_char(f, c)?,
            }
        }
        f.write_str("'")
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A ground element of the Herbrand universe.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Int(i64),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn constant(name: &str) -> Self {
        Term::App(Symbol::new(name), Vec::new())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Self {
        Term::App(Symbol::new(name), args)
    }

    pub fn nil() -> Self {
        Term::constant(NIL)
    }

    pub fn cons(head: Term, tail: Term) -> Self {
        Term::App(Symbol::new(CONS), alloc::vec![head, tail])
    }

    /// Builds a proper list from its elements.
    pub fn list(items: Vec<Term>) -> Self {
        items
            .into_iter()
            .rev()
            .fold(Term::nil(), |tail, head| Term::cons(head, tail))
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::Int(v) => Some(*v),
            Term::App(..) => None,
        }
    }
}

impl From<i64> for Term {
    fn from(v: i64) -> Self {
        Term::Int(v)
    }
}

fn is_cons(name: &Symbol, arity: usize) -> bool {
    arity == 2 && name.as_str() == CONS
}

fn is_nil(name: &Symbol, arity: usize) -> bool {
    arity == 0 && name.as_str() == NIL
}

/// Shared view used by the printer so ground terms and patterns use the same
/// list sugar.
trait ListView: fmt::Display {
    fn as_app(&self) -> Option<(&Symbol, &[Self])>
    where
        Self: Sized;
}

impl ListView for Term {
    fn as_app(&self) -> Option<(&Symbol, &[Term])> {
        match self {
            Term::App(name, args) => Some((name, args)),
            Term::Int(_) => None,
        }
    }
}

impl ListView for Pattern {
    fn as_app(&self) -> Option<(&Symbol, &[Pattern])> {
        match self {
            Pattern::App(name, args) => Some((name, args)),
            _ => None,
        }
    }
}

fn write_app<T: ListView>(f: &mut fmt::Formatter<'_>, name: &Symbol, args: &[T]) -> fmt::Result {
    if is_cons(name, args.len()) {
        write!(f, "[{}", args[0])?;
        let mut tail = &args[1];
        loop {
            match tail.as_app() {
                Some((n, a)) if is_cons(n, a.len()) => {
                    write!(f, ",{}", a[0])?;
                    tail = &a[1];
                }
                Some((n, a)) if is_nil(n, a.len()) => return f.write_str("]"),
                _ => return write!(f, "|{}]", tail),
            }
        }
    }
    write!(f, "{}", name)?;
    write_args(f, args)
}

fn write_args<T: fmt::Display>(f: &mut fmt::Formatter<'_>, args: &[T]) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{}", a)?;
    }
    f.write_str(")")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(v) => write!(f, "{}", v),
            Term::App(name, args) => write_app(f, name, args),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    /// Integer division, truncating toward zero.
    Div,
    /// Floored modulus: the result takes the sign of the divisor.
    Mod,
}

impl ArithOp {
    fn precedence(self) -> u8 {
        match self {
            ArithOp::Add | ArithOp::Sub => 1,
            ArithOp::Mul | ArithOp::Div | ArithOp::Mod => 2,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
            ArithOp::Mod => " mod ",
        }
    }

    pub fn apply(self, a: i64, b: i64) -> Result<i64, TermError> {
        match self {
            ArithOp::Add => a.checked_add(b).ok_or(TermError::Overflow),
            ArithOp::Sub => a.checked_sub(b).ok_or(TermError::Overflow),
            ArithOp::Mul => a.checked_mul(b).ok_or(TermError::Overflow),
            ArithOp::Div => {
                if b == 0 {
                    return Err(TermError::ArithFault("division by zero"));
                }
                a.checked_div(b).ok_or(TermError::Overflow)
            }
            ArithOp::Mod => {
                if b == 0 {
                    return Err(TermError::ArithFault("modulus by zero"));
                }
                let r = a.checked_rem(b).ok_or(TermError::Overflow)?;
                Ok(if r != 0 && ((r < 0) != (b < 0)) { r + b } else { r })
            }
        }
    }
}

/// Integer arithmetic appearing inside a term position.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ArithExpr {
    Int(i64),
    Var(Symbol),
    Neg(Box<ArithExpr>),
    Bin(ArithOp, Box<ArithExpr>, Box<ArithExpr>),
}

impl ArithExpr {
    pub fn bin(op: ArithOp, lhs: ArithExpr, rhs: ArithExpr) -> Self {
        ArithExpr::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn eval(&self, s: &Substitution) -> Result<i64, TermError> {
        match self {
            ArithExpr::Int(v) => Ok(*v),
            ArithExpr::Var(v) => match s.get(v) {
                Some(Term::Int(x)) => Ok(*x),
                Some(_) => Err(TermError::ArithFault("non-integer operand")),
                None => Err(TermError::Unbound(v.clone())),
            },
            ArithExpr::Neg(e) => e.eval(s)?.checked_neg().ok_or(TermError::Overflow),
            ArithExpr::Bin(op, a, b) => op.apply(a.eval(s)?, b.eval(s)?),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Symbol>) {
        match self {
            ArithExpr::Int(_) => {}
            ArithExpr::Var(v) => push_unique(out, v),
            ArithExpr::Neg(e) => e.collect_vars(out),
            ArithExpr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            ArithExpr::Bin(op, ..) => op.precedence(),
            // negative operands always get parentheses
            ArithExpr::Neg(_) => 0,
            ArithExpr::Int(v) if *v < 0 => 0,
            _ => 4,
        }
    }
}

impl fmt::Display for ArithExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithExpr::Int(v) => write!(f, "{}", v),
            ArithExpr::Var(v) => write!(f, "{}", v.as_str()),
            ArithExpr::Neg(e) => {
                // `-3` reads back as a literal, so only variables go bare
                if !matches!(**e, ArithExpr::Var(_)) {
                    write!(f, "-({})", e)
                } else {
                    write!(f, "-{}", e)
                }
            }
            ArithExpr::Bin(op, a, b) => {
                let p = op.precedence();
                if a.precedence() < p {
                    write!(f, "({})", a)?;
                } else {
                    write!(f, "{}", a)?;
                }
                f.write_str(op.symbol())?;
                if b.precedence() <= p {
                    write!(f, "({})", b)
                } else {
                    write!(f, "{}", b)
                }
            }
        }
    }
}

impl fmt::Debug for ArithExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A term that may contain variables and arithmetic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Pattern {
    Int(i64),
    Var(Symbol),
    App(Symbol, Vec<Pattern>),
    /// A compound arithmetic expression; leaves are normalised to
    /// [`Pattern::Int`] / [`Pattern::Var`].
    Arith(ArithExpr),
}

impl Pattern {
    pub fn var(name: &str) -> Self {
        Pattern::Var(Symbol::new(name))
    }

    pub fn constant(name: &str) -> Self {
        Pattern::App(Symbol::new(name), Vec::new())
    }

    pub fn app(name: &str, args: Vec<Pattern>) -> Self {
        Pattern::App(Symbol::new(name), args)
    }

    pub fn cons(head: Pattern, tail: Pattern) -> Self {
        Pattern::App(Symbol::new(CONS), alloc::vec![head, tail])
    }

    pub fn nil() -> Self {
        Pattern::constant(NIL)
    }

    /// Wraps an arithmetic expression, collapsing leaves.
    pub fn arith(e: ArithExpr) -> Self {
        match e {
            ArithExpr::Int(v) => Pattern::Int(v),
            ArithExpr::Var(v) => Pattern::Var(v),
            e => Pattern::Arith(e),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Pattern::Int(_) => true,
            Pattern::Var(_) => false,
            Pattern::App(_, args) => args.iter().all(Pattern::is_ground),
            Pattern::Arith(e) => {
                let mut vs = Vec::new();
                e.collect_vars(&mut vs);
                vs.is_empty()
            }
        }
    }

    pub fn has_arith(&self) -> bool {
        match self {
            Pattern::Arith(_) => true,
            Pattern::App(_, args) => args.iter().any(Pattern::has_arith),
            _ => false,
        }
    }

    /// Variables in first-occurrence order.
    pub fn collect_vars(&self, out: &mut Vec<Symbol>) {
        match self {
            Pattern::Int(_) => {}
            Pattern::Var(v) => push_unique(out, v),
            Pattern::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Pattern::Arith(e) => e.collect_vars(out),
        }
    }

    /// Variables that a match binds directly, i.e. those outside arithmetic.
    pub fn collect_match_vars(&self, out: &mut Vec<Symbol>) {
        match self {
            Pattern::Var(v) => push_unique(out, v),
            Pattern::App(_, args) => args.iter().for_each(|a| a.collect_match_vars(out)),
            _ => {}
        }
    }

    /// Variables occurring inside arithmetic subterms.
    pub fn collect_arith_vars(&self, out: &mut Vec<Symbol>) {
        match self {
            Pattern::Arith(e) => e.collect_vars(out),
            Pattern::App(_, args) => args.iter().for_each(|a| a.collect_arith_vars(out)),
            _ => {}
        }
    }

    pub fn from_term(t: &Term) -> Self {
        match t {
            Term::Int(v) => Pattern::Int(*v),
            Term::App(name, args) => {
                Pattern::App(name.clone(), args.iter().map(Pattern::from_term).collect())
            }
        }
    }

    /// Replaces variables and folds arithmetic, producing a ground term.
    pub fn eval(&self, s: &Substitution) -> Result<Term, TermError> {
        match self {
            Pattern::Int(v) => Ok(Term::Int(*v)),
            Pattern::Var(v) => s.get(v).cloned().ok_or_else(|| TermError::Unbound(v.clone())),
            Pattern::App(name, args) => Ok(Term::App(
                name.clone(),
                args.iter().map(|a| a.eval(s)).collect::<Result<_, _>>()?,
            )),
            Pattern::Arith(e) => Ok(Term::Int(e.eval(s)?)),
        }
    }

    /// One-sided matching of this pattern against a ground term, extending `s`.
    ///
    /// Arithmetic subterms are evaluated after all plain positions have been
    /// matched; an arithmetic subterm with a still-unbound variable is a
    /// [`TermError::NonMatchable`] error. On `Ok(false)` the substitution may
    /// hold partial bindings; use [`match_atom_into`] for automatic rollback.
    pub fn match_term(&self, t: &Term, s: &mut Substitution) -> Result<bool, TermError> {
        let mut deferred = Vec::new();
        if !self.match_plain(t, s, &mut deferred) {
            return Ok(false);
        }
        check_deferred(&deferred, s)
    }

    fn match_plain<'p, 't>(
        &'p self,
        t: &'t Term,
        s: &mut Substitution,
        deferred: &mut Vec<(&'p ArithExpr, &'t Term)>,
    ) -> bool {
        match (self, t) {
            (Pattern::Int(a), Term::Int(b)) => a == b,
            (Pattern::Var(v), _) => match s.get(v) {
                Some(bound) => bound == t,
                None => {
                    s.bind(v.clone(), t.clone());
                    true
                }
            },
            (Pattern::App(pn, pa), Term::App(tn, ta)) => {
                pa.len() == ta.len()
                    && pn.same(tn)
                    && pa.iter().zip(ta).all(|(p, t)| p.match_plain(t, s, deferred))
            }
            (Pattern::Arith(e), _) => {
                deferred.push((e, t));
                true
            }
            _ => false,
        }
    }
}

fn check_deferred(deferred: &[(&ArithExpr, &Term)], s: &Substitution) -> Result<bool, TermError> {
    for (e, t) in deferred {
        let v = match e.eval(s) {
            Ok(v) => v,
            Err(TermError::Unbound(_)) => return Err(TermError::NonMatchable),
            Err(err) => return Err(err),
        };
        if t.as_int() != Some(v) {
            return Ok(false);
        }
    }
    Ok(true)
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Int(v) => write!(f, "{}", v),
            Pattern::Var(v) => f.write_str(v.as_str()),
            Pattern::App(name, args) => write_app(f, name, args),
            Pattern::Arith(e) => write!(f, "{}", e),
        }
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A ground atom: predicate symbol applied to ground terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub pred: Symbol,
    pub args: Vec<Term>,
}

impl GroundAtom {
    pub fn new(pred: &str, args: Vec<Term>) -> Self {
        GroundAtom { pred: Symbol::new(pred), args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        write_args(f, &self.args)
    }
}

impl fmt::Debug for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An atom whose arguments are patterns.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AtomPattern {
    pub pred: Symbol,
    pub args: Vec<Pattern>,
}

impl AtomPattern {
    pub fn new(pred: &str, args: Vec<Pattern>) -> Self {
        AtomPattern { pred: Symbol::new(pred), args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn from_ground(a: &GroundAtom) -> Self {
        AtomPattern {
            pred: a.pred.clone(),
            args: a.args.iter().map(Pattern::from_term).collect(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Pattern::is_ground)
    }

    pub fn collect_vars(&self, out: &mut Vec<Symbol>) {
        self.args.iter().for_each(|a| a.collect_vars(out));
    }

    /// Converts a variable-free pattern to a ground atom.
    pub fn to_ground(&self) -> Result<GroundAtom, TermError> {
        self.eval(&Substitution::new()).map_err(|e| match e {
            TermError::Unbound(_) => TermError::NonGround,
            e => e,
        })
    }

    /// Applies a substitution and folds arithmetic.
    pub fn eval(&self, s: &Substitution) -> Result<GroundAtom, TermError> {
        Ok(GroundAtom {
            pred: self.pred.clone(),
            args: self.args.iter().map(|a| a.eval(s)).collect::<Result<_, _>>()?,
        })
    }

    /// Whether this pattern could match atoms of `g`'s predicate.
    #[inline]
    pub fn same_predicate(&self, g: &GroundAtom) -> bool {
        self.args.len() == g.args.len() && self.pred.same(&g.pred)
    }
}

impl fmt::Display for AtomPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        write_args(f, &self.args)
    }
}

impl fmt::Debug for AtomPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Matches `pattern` against `ground`, returning the bindings on success.
pub fn match_atom(pattern: &AtomPattern, ground: &GroundAtom) -> Result<Option<Substitution>, TermError> {
    let mut s = Substitution::new();
    Ok(match_atom_into(pattern, ground, &mut s)?.then_some(s))
}

/// Matches `pattern` against `ground` under the existing bindings in `s`.
///
/// On success `s` is extended; on failure or error it is left unchanged.
pub fn match_atom_into(
    pattern: &AtomPattern,
    ground: &GroundAtom,
    s: &mut Substitution,
) -> Result<bool, TermError> {
    if !pattern.same_predicate(ground) {
        return Ok(false);
    }
    let mark = s.mark();
    let mut deferred = Vec::new();
    let plain = pattern
        .args
        .iter()
        .zip(&ground.args)
        .all(|(p, t)| p.match_plain(t, s, &mut deferred));
    let result = if plain { check_deferred(&deferred, s) } else { Ok(false) };
    if !matches!(result, Ok(true)) {
        s.undo(mark);
    }
    result
}

/// Matches pattern/term pairs jointly, with the same rollback behaviour as
/// [`match_atom_into`].
pub(crate) fn match_pairs<'a, I>(pairs: I, s: &mut Substitution) -> Result<bool, TermError>
where
    I: IntoIterator<Item = (&'a Pattern, &'a Term)>,
{
    let mark = s.mark();
    let mut deferred = Vec::new();
    let mut plain = true;
    for (p, t) in pairs {
        if !p.match_plain(t, s, &mut deferred) {
            plain = false;
            break;
        }
    }
    let result = if plain { check_deferred(&deferred, s) } else { Ok(false) };
    if !matches!(result, Ok(true)) {
        s.undo(mark);
    }
    result
}

/// Applies `s` to an atom pattern; see [`AtomPattern::eval`].
pub fn apply_eval(pattern: &AtomPattern, s: &Substitution) -> Result<GroundAtom, TermError> {
    pattern.eval(s)
}

/// A finite map from variables to ground terms.
///
/// Bindings are kept in insertion order so a search can undo back to a
/// [`mark`](Substitution::mark) cheaply. Equality ignores order.
#[derive(Clone, Default)]
pub struct Substitution {
    bindings: Vec<(Symbol, Term)>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution { bindings: Vec::new() }
    }

    pub fn get(&self, v: &Symbol) -> Option<&Term> {
        self.bindings.iter().find(|(k, _)| k.same(v)).map(|(_, t)| t)
    }

    pub fn is_bound(&self, v: &Symbol) -> bool {
        self.get(v).is_some()
    }

    /// Adds a binding. The variable must not already be bound.
    pub fn bind(&mut self, v: Symbol, t: Term) {
        debug_assert!(!self.is_bound(&v), "rebinding {}", v.as_str());
        self.bindings.push((v, t));
    }

    pub fn with(mut self, v: &str, t: Term) -> Self {
        self.bind(Symbol::new(v), t);
        self
    }

    pub fn mark(&self) -> usize {
        self.bindings.len()
    }

    pub fn undo(&mut self, mark: usize) {
        self.bindings.truncate(mark);
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Term)> {
        self.bindings.iter().map(|(k, v)| (k, v))
    }
}

impl PartialEq for Substitution {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().all(|(k, v)| other.get(k) == Some(v))
    }
}

impl Eq for Substitution {}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}/{}", k.as_str(), v)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub(crate) fn push_unique(out: &mut Vec<Symbol>, v: &Symbol) {
    if !out.iter().any(|x| x.same(v)) {
        out.push(v.clone());
    }
}
