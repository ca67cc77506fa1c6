//! The `.fol` problem format: parser and printer.
//!
//! See `docs/fol-grammar.md` for the grammar. The printer emits exactly the
//! syntax the parser reads, so `parse(print(p)) == p`.

use std::fmt::Write;

use hbpc_core::problem::{
    ArgType, ClauseItem, CmpOp, CostExpr, CostOp, CostRule, FoClause, Goal, GuardRule, ItemRef, Problem,
    ProblemBuilder, Signature,
};
use hbpc_core::term::{ArithExpr, ArithOp};
use hbpc_core::{AtomPattern, GroundAtom, Pattern, Symbol};

use crate::lex::{tokenize, Cursor, Diagnostic, Pos, Tok};

/// Parses a problem file, returning every diagnostic found.
pub fn parse_problem(src: &str) -> Result<Problem, Vec<Diagnostic>> {
    let toks = tokenize(src, false).map_err(|d| vec![d])?;
    let mut p = Parser { c: Cursor::new(toks, src), anon: 0 };
    let mut b = ProblemBuilder::new();
    let mut at: [Vec<Pos>; 4] = Default::default();
    let mut diags = Vec::new();
    while !p.c.at_end() {
        let pos = p.c.pos();
        match p.statement() {
            Ok(Statement::Type(s)) => {
                b.signature(s);
                at[0].push(pos);
            }
            Ok(Statement::Guard(r)) => {
                b.guard_rule(r);
                at[1].push(pos);
            }
            Ok(Statement::Cost(r)) => {
                b.cost_rule(r);
                at[2].push(pos);
            }
            Ok(Statement::Clause(c)) => {
                b.clause(c);
                at[3].push(pos);
            }
            Err(d) => {
                diags.push(d);
                p.c.recover(&Tok::Punct("."));
            }
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    b.build().map_err(|ds| {
        ds.into_iter()
            .map(|d| {
                let pos = match d.item {
                    ItemRef::Signature(i) => at[0][i],
                    ItemRef::Guard(i) => at[1][i],
                    ItemRef::Cost(i) => at[2][i],
                    ItemRef::Clause(i) => at[3][i],
                };
                Diagnostic::new(pos, d.error.to_string())
            })
            .collect()
    })
}

/// Parses one ground atom such as `parent(bob,[1,2])`.
pub fn parse_ground_atom(src: &str) -> Result<GroundAtom, Diagnostic> {
    let toks = tokenize(src, false)?;
    let mut p = Parser { c: Cursor::new(toks, src), anon: 0 };
    let pos = p.c.pos();
    let atom = p.atom()?;
    if !p.c.at_end() {
        return Err(p.c.unexpected("end of atom"));
    }
    atom.to_ground().map_err(|_| Diagnostic::new(pos, format!("{} is not ground", atom)))
}

enum Statement {
    Type(Signature),
    Guard(GuardRule),
    Cost(CostRule),
    Clause(FoClause),
}

struct Parser {
    c: Cursor,
    anon: usize,
}

impl Parser {
    fn statement(&mut self) -> Result<Statement, Diagnostic> {
        let kw = match self.c.peek() {
            Some(Tok::Name { text, quoted: false }) => text.clone(),
            _ => return Err(self.c.unexpected("`type`, `guard`, `cost` or `clause`")),
        };
        let st = match kw.as_str() {
            "type" => {
                self.c.next();
                let pred = self.name()?;
                let mut args = Vec::new();
                if self.c.eat("(") {
                    loop {
                        args.push(self.arg_type()?);
                        if !self.c.eat(",") {
                            break;
                        }
                    }
                    self.c.expect(")")?;
                }
                Statement::Type(Signature { pred, args })
            }
            "guard" => {
                self.c.next();
                let head = self.atom()?;
                let mut body = Vec::new();
                if self.c.eat(":-") {
                    body = self.goals()?;
                }
                Statement::Guard(GuardRule { head, body })
            }
            "cost" => {
                self.c.next();
                let pattern = self.atom()?;
                self.c.expect("=")?;
                let expr = self.cost_expr(0)?;
                Statement::Cost(CostRule { pattern, expr })
            }
            "clause" => {
                self.c.next();
                let name = match self.c.next() {
                    Some(Tok::Str(s)) => s,
                    _ => return Err(Diagnostic::new(self.c.pos(), "expected clause name in double quotes")),
                };
                self.c.expect(":")?;
                let mut items = Vec::new();
                if !self.c.is_punct(".") {
                    loop {
                        self.item(&mut items)?;
                        if !self.c.eat(",") {
                            break;
                        }
                    }
                }
                Statement::Clause(FoClause::new(&name, items))
            }
            _ => return Err(self.c.unexpected("`type`, `guard`, `cost` or `clause`")),
        };
        self.c.expect(".")?;
        Ok(st)
    }

    fn item(&mut self, items: &mut Vec<ClauseItem>) -> Result<(), Diagnostic> {
        if self.c.eat("!") {
            items.push(ClauseItem::Neg { atom: self.atom()?, generator: true });
        } else if self.c.is_name("guard") && matches!(self.c.peek_at(1), Some(Tok::Punct("{"))) {
            self.c.next();
            self.c.next();
            items.extend(self.goals()?.into_iter().map(ClauseItem::Guard));
            self.c.expect("}")?;
        } else {
            items.push(ClauseItem::Pos(self.atom()?));
        }
        Ok(())
    }

    fn arg_type(&mut self) -> Result<ArgType, Diagnostic> {
        let pos = self.c.pos();
        match self.c.next() {
            Some(Tok::Name { text, quoted: false }) => match text.as_str() {
                "int" => Ok(ArgType::Int),
                "sym" => Ok(ArgType::Sym),
                "term" => Ok(ArgType::Term),
                "list" => {
                    self.c.expect("(")?;
                    let t = self.arg_type()?;
                    self.c.expect(")")?;
                    Ok(ArgType::List(Box::new(t)))
                }
                other => Err(Diagnostic::new(pos, format!("unknown type `{}`", other))),
            },
            _ => Err(Diagnostic::new(pos, "expected a type: int, sym, term or list(T)")),
        }
    }

    fn name(&mut self) -> Result<Symbol, Diagnostic> {
        match self.c.peek() {
            Some(Tok::Name { text, .. }) => {
                let s = Symbol::new(text);
                self.c.next();
                Ok(s)
            }
            _ => Err(self.c.unexpected("a predicate name")),
        }
    }

    fn atom(&mut self) -> Result<AtomPattern, Diagnostic> {
        let pred = self.name()?;
        Ok(AtomPattern { pred, args: self.args()? })
    }

    fn args(&mut self) -> Result<Vec<Pattern>, Diagnostic> {
        let mut args = Vec::new();
        if self.c.eat("(") {
            loop {
                args.push(self.term(0)?);
                if !self.c.eat(",") {
                    break;
                }
            }
            self.c.expect(")")?;
        }
        Ok(args)
    }

    fn goals(&mut self) -> Result<Vec<Goal>, Diagnostic> {
        let mut goals = vec![self.goal()?];
        while self.c.eat(",") {
            goals.push(self.goal()?);
        }
        Ok(goals)
    }

    fn goal(&mut self) -> Result<Goal, Diagnostic> {
        let pos = self.c.pos();
        let lhs = self.term(0)?;
        let op = match self.c.peek() {
            Some(Tok::Punct("=")) => Some(CmpOp::Eq),
            Some(Tok::Punct("\\=" | "!=")) => Some(CmpOp::Ne),
            Some(Tok::Punct("<")) => Some(CmpOp::Lt),
            Some(Tok::Punct("=<")) => Some(CmpOp::Le),
            Some(Tok::Punct(">")) => Some(CmpOp::Gt),
            Some(Tok::Punct(">=")) => Some(CmpOp::Ge),
            _ => None,
        };
        match (op, lhs) {
            (Some(op), lhs) => {
                self.c.next();
                Ok(Goal::Compare(op, lhs, self.term(0)?))
            }
            (None, Pattern::App(pred, args)) if pred.as_str() != "." => Ok(Goal::Call(AtomPattern { pred, args })),
            (None, _) => Err(Diagnostic::new(pos, "expected a guard call or a comparison")),
        }
    }

    /// Term with integer arithmetic, by precedence climbing.
    fn term(&mut self, min: u8) -> Result<Pattern, Diagnostic> {
        let mut lhs = self.primary()?;
        loop {
            let op = match self.c.peek() {
                Some(Tok::Punct("+")) => ArithOp::Add,
                Some(Tok::Punct("-")) => ArithOp::Sub,
                Some(Tok::Punct("*")) => ArithOp::Mul,
                Some(Tok::Punct("/")) => ArithOp::Div,
                Some(Tok::Name { text, quoted: false }) if text == "mod" => ArithOp::Mod,
                _ => return Ok(lhs),
            };
            let prec = if matches!(op, ArithOp::Add | ArithOp::Sub) { 1 } else { 2 };
            if prec <= min {
                return Ok(lhs);
            }
            let pos = self.c.pos();
            self.c.next();
            let rhs = self.term(prec)?;
            lhs = Pattern::arith(ArithExpr::bin(op, to_arith(lhs, pos)?, to_arith(rhs, pos)?));
        }
    }

    fn primary(&mut self) -> Result<Pattern, Diagnostic> {
        let pos = self.c.pos();
        match self.c.next() {
            Some(Tok::Int(v)) => int(v, false, pos).map(Pattern::Int),
            Some(Tok::Var(v)) => {
                if v == "_" {
                    self.anon += 1;
                    return Ok(Pattern::var(&format!("_{}", self.anon)));
                }
                Ok(Pattern::var(&v))
            }
            Some(Tok::Name { text, .. }) => Ok(Pattern::App(Symbol::new(&text), self.args()?)),
            Some(Tok::Punct("-")) => {
                if let Some(&Tok::Int(v)) = self.c.peek() {
                    self.c.next();
                    return int(v, true, pos).map(Pattern::Int);
                }
                let inner = self.primary()?;
                Ok(Pattern::arith(ArithExpr::Neg(Box::new(to_arith(inner, pos)?))))
            }
            Some(Tok::Punct("(")) => {
                let t = self.term(0)?;
                self.c.expect(")")?;
                Ok(t)
            }
            Some(Tok::Punct("[")) => {
                if self.c.eat("]") {
                    return Ok(Pattern::nil());
                }
                let mut items = vec![self.term(0)?];
                while self.c.eat(",") {
                    items.push(self.term(0)?);
                }
                let tail = if self.c.eat("|") { self.term(0)? } else { Pattern::nil() };
                self.c.expect("]")?;
                Ok(items.into_iter().rev().fold(tail, |t, h| Pattern::cons(h, t)))
            }
            Some(Tok::Float(_)) => Err(Diagnostic::new(pos, "real numbers are only allowed in cost expressions")),
            Some(t) => Err(Diagnostic::new(pos, format!("expected a term, found {}", t))),
            None => Err(self.c.unexpected("a term")),
        }
    }

    fn cost_expr(&mut self, min: u8) -> Result<CostExpr, Diagnostic> {
        let mut lhs = self.cost_primary()?;
        loop {
            let op = match self.c.peek() {
                Some(Tok::Punct("+")) => CostOp::Add,
                Some(Tok::Punct("-")) => CostOp::Sub,
                Some(Tok::Punct("*")) => CostOp::Mul,
                Some(Tok::Punct("/")) => CostOp::Div,
                _ => return Ok(lhs),
            };
            let prec = if matches!(op, CostOp::Add | CostOp::Sub) { 1 } else { 2 };
            if prec <= min {
                return Ok(lhs);
            }
            self.c.next();
            let rhs = self.cost_expr(prec)?;
            lhs = CostExpr::bin(op, lhs, rhs);
        }
    }

    fn cost_primary(&mut self) -> Result<CostExpr, Diagnostic> {
        let pos = self.c.pos();
        match self.c.next() {
            Some(Tok::Int(v)) => Ok(CostExpr::Num(v as f64)),
            Some(Tok::Float(v)) => Ok(CostExpr::Num(v)),
            Some(Tok::Var(v)) => Ok(CostExpr::Var(Symbol::new(&v))),
            Some(Tok::Punct("-")) => match self.c.peek() {
                Some(&Tok::Int(v)) => {
                    self.c.next();
                    Ok(CostExpr::Num(-(v as f64)))
                }
                Some(&Tok::Float(v)) => {
                    self.c.next();
                    Ok(CostExpr::Num(-v))
                }
                _ => Ok(CostExpr::Neg(Box::new(self.cost_primary()?))),
            },
            Some(Tok::Punct("(")) => {
                let e = self.cost_expr(0)?;
                self.c.expect(")")?;
                Ok(e)
            }
            Some(Tok::Name { text, quoted: false }) if text == "float" => {
                self.c.expect("(")?;
                let e = self.cost_expr(0)?;
                self.c.expect(")")?;
                Ok(CostExpr::Float(Box::new(e)))
            }
            Some(t) => Err(Diagnostic::new(pos, format!("expected a cost expression, found {}", t))),
            None => Err(self.c.unexpected("a cost expression")),
        }
    }
}

fn int(v: u64, negative: bool, pos: Pos) -> Result<i64, Diagnostic> {
    let out = if negative { 0i64.checked_sub_unsigned(v) } else { i64::try_from(v).ok() };
    out.ok_or_else(|| Diagnostic::new(pos, "integer out of range"))
}

fn to_arith(p: Pattern, pos: Pos) -> Result<ArithExpr, Diagnostic> {
    match p {
        Pattern::Int(v) => Ok(ArithExpr::Int(v)),
        Pattern::Var(v) => Ok(ArithExpr::Var(v)),
        Pattern::Arith(e) => Ok(e),
        Pattern::App(..) => Err(Diagnostic::new(pos, format!("arithmetic on non-integer term {}", p))),
    }
}

/// Prints a problem in the `.fol` syntax.
pub fn print_problem(p: &Problem) -> String {
    let mut sections = [String::new(), String::new(), String::new(), String::new()];
    for s in p.signatures() {
        let out = &mut sections[0];
        let _ = write!(out, "type {}", s.pred);
        if !s.args.is_empty() {
            let args: Vec<String> = s.args.iter().map(ToString::to_string).collect();
            let _ = write!(out, "({})", args.join(", "));
        }
        out.push_str(".\n");
    }
    for r in p.guards().iter().flat_map(|g| &g.rules) {
        let out = &mut sections[1];
        let _ = write!(out, "guard {}", r.head);
        if !r.body.is_empty() {
            let body: Vec<String> = r.body.iter().map(ToString::to_string).collect();
            let _ = write!(out, " :- {}", body.join(", "));
        }
        out.push_str(".\n");
    }
    for c in p.cost_rules() {
        let _ = writeln!(sections[2], "cost {} = {}.", c.pattern, c.expr);
    }
    for c in p.clauses() {
        let out = &mut sections[3];
        let _ = write!(out, "clause {}:", quote(&c.name));
        if !c.items.is_empty() {
            let _ = write!(out, " {}", c);
        }
        out.push_str(".\n");
    }
    sections.into_iter().filter(|s| !s.is_empty()).collect::<Vec<_>>().join("\n")
}

fn quote(s: &str) -> String {
    let mut q = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            '\t' => q.push_str("\\t"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msgs(src: &str) -> Vec<String> {
        parse_problem(src).unwrap_err().into_iter().map(|d| d.to_string()).collect()
    }

    #[test]
    fn negative_literals_fold() {
        let p = parse_problem("clause \"c\": p(-3, X-1, -X, -(3)).").unwrap_err();
        // X is unbound, which is fine: only the shape is checked here
        assert!(p[0].message.contains("ungrounded positive literal p(-3,X-1,-X,-(3))"), "{:?}", p);
    }

    #[test]
    fn statements_report_positions() {
        let m = msgs("clause \"a\": p.\nclause \"b\": p, !q.\n");
        assert_eq!(m, vec!["2:1: positive literal before negative literal"]);
        let m = msgs("clause \"a\" p.\ncost q = .\n");
        assert_eq!(m.len(), 2);
        assert!(m[0].starts_with("1:12: expected `:`"), "{:?}", m);
        assert!(m[1].starts_with("2:10: expected a cost expression"), "{:?}", m);
    }

    #[test]
    fn ground_atoms() {
        let a = parse_ground_atom("parent(bob, [1,2|[]])").unwrap();
        assert_eq!(a.to_string(), "parent(bob,[1,2])");
        assert!(parse_ground_atom("p(X)").is_err());
        assert!(parse_ground_atom("p(a) q").is_err());
    }

    #[test]
    fn quoting_round_trips() {
        let src = "clause \"say \\\"hi\\\"\": 'Bob'(X), !'a b'(X).";
        assert!(parse_problem(src).is_err());
        let src = "clause \"say \\\"hi\\\"\": !'a b'(X), 'Bob'(X).";
        let p = parse_problem(src).unwrap();
        assert_eq!(print_problem(&p), "clause \"say \\\"hi\\\"\": !'a b'(X), 'Bob'(X).\n");
    }
}
