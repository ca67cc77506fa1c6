//! The line-oriented MLN format.
//!
//! ```text
//! person = {anna, bob}          % domain
//! *friends(person, person)      % closed-world evidence predicate
//! smokes(person)                % open predicate
//! friends(anna, bob)            % evidence: a declared predicate, ground
//! !smokes(bob)
//! query smokes
//! 1.5: !smokes(X) v cancer(X)
//! HARD: !friends(X,Y) v X != Y
//! ```
//!
//! The first line naming a predicate declares it; later ground lines are
//! evidence.

use std::collections::HashSet;

use hbpc_core::mln::{MlnArg, MlnBuilder, MlnLiteral, MlnProgram, Weight};
use hbpc_core::{MlnError, Symbol};
use thiserror::Error;

use crate::lex::{tokenize, Cursor, Diagnostic, Tok};

#[derive(Debug, Error)]
pub enum MlnFileError {
    #[error("{}", join(.0))]
    Syntax(Vec<Diagnostic>),
    #[error(transparent)]
    Program(#[from] MlnError),
}

fn join(ds: &[Diagnostic]) -> String {
    ds.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

pub fn parse_mln(src: &str) -> Result<MlnProgram, MlnFileError> {
    let mut b = MlnBuilder::new();
    let mut declared: HashSet<String> = HashSet::new();
    let mut diags = Vec::new();
    for (n, line) in src.split('\n').enumerate() {
        let toks = match tokenize(line, false) {
            Ok(t) => t,
            Err(mut d) => {
                d.pos.line = n + 1;
                diags.push(d);
                continue;
            }
        };
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor::new(toks, line);
        if let Err(mut d) = parse_line(&mut c, &mut b, &mut declared) {
            d.pos.line = n + 1;
            diags.push(d);
        }
    }
    if !diags.is_empty() {
        return Err(MlnFileError::Syntax(diags));
    }
    Ok(b.build()?)
}

fn parse_line(c: &mut Cursor, b: &mut MlnBuilder, declared: &mut HashSet<String>) -> Result<(), Diagnostic> {
    if c.is_name("query") && !matches!(c.peek_at(1), Some(Tok::Punct("(" | ":"))) {
        c.next();
        loop {
            let name = name(c)?;
            b.query(&name);
            if !c.eat(",") {
                break;
            }
        }
    } else if matches!(c.peek(), Some(Tok::Name { .. })) && matches!(c.peek_at(1), Some(Tok::Punct("="))) {
        let dom = name(c)?;
        c.next();
        c.expect("{")?;
        let mut consts = Vec::new();
        if !c.is_punct("}") {
            loop {
                consts.push(constant(c)?);
                if !c.eat(",") {
                    break;
                }
            }
        }
        c.expect("}")?;
        let refs: Vec<&str> = consts.iter().map(String::as_str).collect();
        b.domain(&dom, &refs);
    } else if is_weight(c) {
        let weight = weight(c)?;
        c.expect(":")?;
        let mut lits = vec![literal(c)?];
        while c.is_name("v") {
            c.next();
            lits.push(literal(c)?);
        }
        b.clause(weight, lits);
    } else {
        let closed = c.eat("*");
        let negated = !closed && c.eat("!");
        let pos = c.pos();
        let pred = name(c)?;
        let args = arg_list(c)?;
        if closed || (!negated && !declared.contains(&pred)) {
            if declared.contains(&pred) {
                return Err(Diagnostic::new(pos, format!("duplicate declaration of {}", pred)));
            }
            let doms: Vec<&str> = args.iter().map(|a| a.as_str()).collect();
            b.predicate(&pred, &doms, closed);
            declared.insert(pred);
        } else {
            let ground: Vec<&str> = args.iter().map(|a| a.as_str()).collect();
            if let Some(v) = args.iter().find(|a| matches!(a, Arg::Var(_))) {
                return Err(Diagnostic::new(pos, format!("evidence atom {}({}) has variable {}", pred, ground.join(","), v.as_str())));
            }
            b.evidence(&pred, &ground, !negated);
        }
    }
    if !c.at_end() {
        return Err(c.unexpected("end of line"));
    }
    Ok(())
}

enum Arg {
    Var(String),
    Const(String),
}

impl Arg {
    fn as_str(&self) -> &str {
        match self {
            Arg::Var(s) | Arg::Const(s) => s,
        }
    }

    fn into_mln(self) -> MlnArg {
        match self {
            Arg::Var(s) => MlnArg::Var(Symbol::new(&s)),
            Arg::Const(s) => MlnArg::Const(Symbol::new(&s)),
        }
    }
}

fn is_weight(c: &Cursor) -> bool {
    match (c.peek(), c.peek_at(1)) {
        (Some(Tok::Int(_) | Tok::Float(_)), _) => true,
        (Some(Tok::Punct("-")), Some(Tok::Int(_) | Tok::Float(_))) => true,
        (Some(Tok::Var(v)), Some(Tok::Punct(":"))) => v == "HARD",
        _ => false,
    }
}

fn weight(c: &mut Cursor) -> Result<Weight, Diagnostic> {
    let neg = c.eat("-");
    let w = match c.next() {
        Some(Tok::Int(v)) => v as f64,
        Some(Tok::Float(v)) => v,
        Some(Tok::Var(v)) if v == "HARD" => return Ok(Weight::Hard),
        _ => return Err(Diagnostic::new(c.pos(), "expected a weight or HARD")),
    };
    Ok(Weight::Soft(if neg { -w } else { w }))
}

fn name(c: &mut Cursor) -> Result<String, Diagnostic> {
    match c.peek() {
        Some(Tok::Name { text, .. }) => {
            let s = text.clone();
            c.next();
            Ok(s)
        }
        _ => Err(c.unexpected("a name")),
    }
}

fn constant(c: &mut Cursor) -> Result<String, Diagnostic> {
    match c.peek() {
        Some(Tok::Int(v)) => {
            let s = v.to_string();
            c.next();
            Ok(s)
        }
        _ => name(c),
    }
}

fn arg(c: &mut Cursor) -> Result<Arg, Diagnostic> {
    let pos = c.pos();
    let a = match c.peek() {
        Some(Tok::Var(v)) => {
            let v = v.clone();
            c.next();
            Arg::Var(v)
        }
        _ => Arg::Const(constant(c)?),
    };
    if c.is_punct("(") {
        let err = MlnError::NotFunctionFree(format!("{}(...)", a.as_str()));
        return Err(Diagnostic::new(pos, err.to_string()));
    }
    Ok(a)
}

fn arg_list(c: &mut Cursor) -> Result<Vec<Arg>, Diagnostic> {
    let mut args = Vec::new();
    if c.eat("(") {
        loop {
            args.push(arg(c)?);
            if !c.eat(",") {
                break;
            }
        }
        c.expect(")")?;
    }
    Ok(args)
}

fn literal(c: &mut Cursor) -> Result<MlnLiteral, Diagnostic> {
    let negated = c.eat("!");
    if negated || (matches!(c.peek(), Some(Tok::Name { .. })) && matches!(c.peek_at(1), Some(Tok::Punct("(")))) {
        let pred = name(c)?;
        let args = arg_list(c)?.into_iter().map(Arg::into_mln).collect();
        return Ok(MlnLiteral::Atom { positive: !negated, pred: Symbol::new(&pred), args });
    }
    let first = arg(c)?;
    let eq = if c.eat("=") {
        Some(true)
    } else if c.eat("!=") {
        Some(false)
    } else {
        None
    };
    match (eq, first) {
        (Some(positive), lhs) => Ok(MlnLiteral::Equal { positive, lhs: lhs.into_mln(), rhs: arg(c)?.into_mln() }),
        (None, Arg::Const(pred)) => {
            let args = arg_list(c)?.into_iter().map(Arg::into_mln).collect();
            Ok(MlnLiteral::Atom { positive: true, pred: Symbol::new(&pred), args })
        }
        (None, Arg::Var(v)) => Err(Diagnostic::new(c.pos(), format!("variable {} is not a literal", v))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_symbols_fail() {
        let e = parse_mln("d = {a}\np(d)\n1.0: p(f(X))").unwrap_err().to_string();
        assert!(e.contains("3:") && e.contains("not function-free"), "{}", e);
    }

    #[test]
    fn declarations_then_evidence() {
        let m = parse_mln("d = {a, b}\n*e(d)\np(d)\ne(a)\n!p(b)\nquery p\n2: !e(X) v p(X)").unwrap();
        assert_eq!(m.evidence(&Symbol::new("e"), &[Symbol::new("a")]), Some(true));
        assert_eq!(m.evidence(&Symbol::new("e"), &[Symbol::new("b")]), Some(false));
        assert_eq!(m.evidence(&Symbol::new("p"), &[Symbol::new("b")]), Some(false));
        assert_eq!(m.evidence(&Symbol::new("p"), &[Symbol::new("a")]), None);
        assert_eq!(m.queries(), &[Symbol::new("p")]);
        assert_eq!(m.clauses()[0].weight, Weight::Soft(2.0));
    }

    #[test]
    fn bad_weights_are_rejected() {
        let e = parse_mln("d = {a}\np(d)\n-1.5: p(X)").unwrap_err();
        assert!(matches!(e, MlnFileError::Program(MlnError::UnsupportedWeight(_))), "{}", e);
        let e = parse_mln("d = {a}\np(d)\n0: p(X)").unwrap_err();
        assert!(matches!(e, MlnFileError::Program(MlnError::UnsupportedWeight(_))), "{}", e);
    }

    #[test]
    fn non_ground_evidence() {
        let e = parse_mln("d = {a}\np(d)\np(X)").unwrap_err().to_string();
        assert!(e.starts_with("3:1: evidence atom p(X) has variable X"), "{}", e);
    }
}
