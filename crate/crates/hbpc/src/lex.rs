//! Tokenizer shared by the problem and MLN formats.

use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    /// Lowercase-initial name, or a quoted name when `quoted` is set.
    Name { text: String, quoted: bool },
    /// Uppercase- or underscore-initial name.
    Var(String),
    Str(String),
    Int(u64),
    Float(f64),
    Punct(&'static str),
    Newline,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name { text, .. } => write!(f, "`{}`", text),
            Tok::Var(v) => write!(f, "`{}`", v),
            Tok::Str(s) => write!(f, "string {:?}", s),
            Tok::Int(v) => write!(f, "`{}`", v),
            Tok::Float(v) => write!(f, "`{:?}`", v),
            Tok::Punct(p) => write!(f, "`{}`", p),
            Tok::Newline => f.write_str("end of line"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

/// A message tied to a source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub pos: Pos,
    pub message: String,
}

impl Diagnostic {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic { pos, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

// longest first so that `:-` wins over `:`
const PUNCT: [&str; 24] = [
    ":-", "\\=", "!=", "=<", ">=", "(", ")", "[", "]", "{", "}", ",", ".", "|", ":", "!", "=", "<", ">", "+", "-",
    "*", "/", "?",
];

/// Splits `src` into tokens. Newlines are emitted only when `newlines` is set.
pub fn tokenize(src: &str, newlines: bool) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        let start = i;
        if c == '\n' {
            if newlines {
                out.push(Token { tok: Tok::Newline, pos });
            }
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            if c.is_ascii_lowercase() {
                Tok::Name { text, quoted: false }
            } else {
                Tok::Var(text)
            }
        } else if c.is_ascii_digit() {
            lex_number(&chars, &mut i).map_err(|m| Diagnostic::new(pos, m))?
        } else if c == '\'' || c == '"' {
            let text = lex_quoted(&chars, &mut i, c).map_err(|m| Diagnostic::new(pos, m))?;
            if c == '\'' {
                Tok::Name { text, quoted: true }
            } else {
                Tok::Str(text)
            }
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            match PUNCT.iter().find(|p| rest.starts_with(**p)) {
                Some(p) => {
                    i += p.len();
                    Tok::Punct(p)
                }
                None => return Err(Diagnostic::new(pos, format!("unexpected character {:?}", c))),
            }
        };
        for &ch in &chars[start..i] {
            if ch == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        out.push(Token { tok, pos });
    }
    Ok(out)
}

fn lex_number(chars: &[char], i: &mut usize) -> Result<Tok, String> {
    let start = *i;
    let digits = |i: &mut usize| {
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
    };
    digits(i);
    let mut float = false;
    if *i + 1 < chars.len() && chars[*i] == '.' && chars[*i + 1].is_ascii_digit() {
        float = true;
        *i += 1;
        digits(i);
    }
    if *i < chars.len() && (chars[*i] == 'e' || chars[*i] == 'E') {
        let mut j = *i + 1;
        if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
            j += 1;
        }
        if j < chars.len() && chars[j].is_ascii_digit() {
            float = true;
            *i = j;
            digits(i);
        }
    }
    let text: String = chars[start..*i].iter().collect();
    if float {
        text.parse().map(Tok::Float).map_err(|_| format!("bad number {}", text))
    } else {
        text.parse().map(Tok::Int).map_err(|_| format!("integer {} out of range", text))
    }
}

fn lex_quoted(chars: &[char], i: &mut usize, quote: char) -> Result<String, String> {
    let mut text = String::new();
    *i += 1;
    loop {
        match chars.get(*i) {
            None => return Err("unterminated quoted name".into()),
            Some(&c) if c == quote => {
                *i += 1;
                return Ok(text);
            }
            Some('\\') => {
                let e = chars.get(*i + 1).ok_or("unterminated escape")?;
                text.push(match e {
                    'n' => '\n',
                    't' => '\t',
                    '\\' | '\'' | '"' => *e,
                    other => return Err(format!("unknown escape \\{}", other)),
                });
                *i += 2;
            }
            Some(&c) => {
                text.push(c);
                *i += 1;
            }
        }
    }
}

/// Cursor over a token list with position-aware errors.
pub struct Cursor {
    toks: Vec<Token>,
    at: usize,
    end: Pos,
}

impl Cursor {
    pub fn new(toks: Vec<Token>, src: &str) -> Self {
        let lines = src.split('\n').count();
        let last = src.rsplit('\n').next().map_or(0, |l| l.chars().count());
        Cursor { toks, at: 0, end: Pos { line: lines, column: last + 1 } }
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    pub fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.at + k).map(|t| &t.tok)
    }

    pub fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |t| t.pos)
    }

    pub fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.tok.clone());
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.at >= self.toks.len()
    }

    pub fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    pub fn is_name(&self, n: &str) -> bool {
        matches!(self.peek(), Some(Tok::Name { text, quoted: false }) if text == n)
    }

    pub fn eat(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, p: &str) -> Result<(), Diagnostic> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{}`", p)))
        }
    }

    pub fn unexpected(&self, wanted: &str) -> Diagnostic {
        let found = self.peek().map_or("end of input".to_string(), |t| t.to_string());
        Diagnostic::new(self.pos(), format!("expected {}, found {}", wanted, found))
    }

    /// Skips past the next `.` (or newline when `newlines` was on), for
    /// error recovery.
    pub fn recover(&mut self, stop: &Tok) {
        while let Some(t) = self.next() {
            if &t == stop {
                break;
            }
        }
    }
}
