//! Lexer and parser for `.lag` workspace files.
//!
//! ```text
//! lattice <id> { elements <name>+ ; [order <a> < <b> (, <a> < <b>)* ;] }
//! map <id> : <lattice> -> <lattice> { (<a> -> <b> ;)* }
//! connection <id> { alpha <map> ; gamma <map> ; }
//! mou <id> : <lattice> <-> <lattice> { (<a> -> <b> ;)* }
//! domain <id> { lattice <lattice> ; vars (<v> : <class> ;)* exports (...)* imports (...)* [processes <p>* ;] }
//! system <id> { left <domain> ; right <domain> ; connect <connection> ; }
//! program <id> { <phrase>* }
//! store <id> for <domain> { (<var> = <int> ;)* }
//! ```
//!
//! Phrases are `txn L|R { <z> := <expr> ; ... }`, `rd L|R <z> <y> ;`,
//! `wr L|R <x> <z> ;`, `trl <y> <x> ;` and `tlr <y> <x> ;`. Comments run
//! from `#` to the end of the line.

use std::fmt;

use lagois::{Assign, Expr, Namespace, Op, Phrase, Side};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn at(pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i128),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

// longest first so `<->` wins over `<`
const SYMBOLS: [&str; 15] = [
    "<->", "->", ":=", "{", "}", ";", ":", ",", "<", "=", "+", "-", "*", "(", ")",
];

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
        } else if c.is_whitespace() {
            col += 1;
            i += 1;
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse::<i128>()
                .ok()
                .filter(|&n| n <= i64::MAX as i128 + 1)
                .ok_or_else(|| ParseError::at(pos, format!("integer `{text}` out of range")))?;
            col += i - start;
            out.push((Tok::Int(n), pos));
        } else {
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            let sym = SYMBOLS
                .iter()
                .find(|s| rest.starts_with(*s))
                .ok_or_else(|| ParseError::at(pos, format!("unexpected character `{c}`")))?;
            i += sym.len();
            col += sym.len();
            out.push((Tok::Sym(sym), pos));
        }
    }
    out.push((Tok::Eof, Pos { line, column: col }));
    Ok(out)
}

/// A name with the position it was written at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub pos: Pos,
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Lattice {
        id: Name,
        elements: Vec<Name>,
        order: Vec<(Name, Name)>,
    },
    Map {
        id: Name,
        source: Name,
        target: Name,
        entries: Vec<(Name, Name)>,
    },
    Connection {
        id: Name,
        alpha: Name,
        gamma: Name,
    },
    Mou {
        id: Name,
        left: Name,
        right: Name,
        edges: Vec<(Name, Name)>,
    },
    Domain {
        id: Name,
        lattice: Name,
        vars: Vec<(Namespace, Name, Name)>,
        processes: Vec<Name>,
    },
    System {
        id: Name,
        left: Name,
        right: Name,
        connect: Name,
    },
    Program {
        id: Name,
        phrases: Vec<(Phrase, Pos)>,
    },
    Store {
        id: Name,
        domain: Name,
        values: Vec<(Name, i64)>,
    },
}

impl Decl {
    pub fn id(&self) -> &Name {
        match self {
            Decl::Lattice { id, .. }
            | Decl::Map { id, .. }
            | Decl::Connection { id, .. }
            | Decl::Mou { id, .. }
            | Decl::Domain { id, .. }
            | Decl::System { id, .. }
            | Decl::Program { id, .. }
            | Decl::Store { id, .. } => id,
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        Err(ParseError::at(
            self.pos(),
            format!("expected {wanted}, found {}", self.peek()),
        ))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == kw)
    }

    fn sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.is_sym(s) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.is_sym(s);
        if hit {
            self.bump();
        }
        hit
    }

    fn kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn name(&mut self) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Ident(text) => {
                let pos = self.pos();
                self.bump();
                Ok(Name { text, pos })
            }
            _ => self.unexpected("a name"),
        }
    }

    fn side(&mut self) -> Result<Side, ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == "L" => {
                self.bump();
                Ok(Side::Left)
            }
            Tok::Ident(s) if s == "R" => {
                self.bump();
                Ok(Side::Right)
            }
            _ => self.unexpected("`L` or `R`"),
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat_sym("-");
        let pos = self.pos();
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                let v = if neg { -n } else { n };
                i64::try_from(v)
                    .map_err(|_| ParseError::at(pos, format!("integer `{v}` out of range")))
            }
            _ => self.unexpected("an integer"),
        }
    }

    fn decls(&mut self) -> Result<Vec<Decl>, ParseError> {
        let mut out = Vec::new();
        while *self.peek() != Tok::Eof {
            out.push(self.decl()?);
        }
        Ok(out)
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return self.unexpected("a declaration"),
        };
        match kw.as_str() {
            "lattice" => self.lattice(),
            "map" => self.map(),
            "connection" => self.connection(),
            "mou" => self.mou(),
            "domain" => self.domain(),
            "system" => self.system(),
            "program" => self.program(),
            "store" => self.store(),
            _ => self.unexpected("a declaration"),
        }
    }

    fn lattice(&mut self) -> Result<Decl, ParseError> {
        self.bump();
        let id = self.name()?;
        self.sym("{")?;
        self.kw("elements")?;
        let mut elements = vec![self.name()?];
        while !self.is_sym(";") {
            elements.push(self.name()?);
        }
        self.sym(";")?;
        let mut order = Vec::new();
        if self.is_kw("order") {
            self.bump();
            loop {
                let a = self.name()?;
                self.sym("<")?;
                let b = self.name()?;
                order.push((a, b));
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.sym(";")?;
        }
        self.sym("}")?;
        Ok(Decl::Lattice {
            id,
            elements,
            order,
        })
    }

    fn arrows(&mut self) -> Result<Vec<(Name, Name)>, ParseError> {
        self.sym("{")?;
        let mut out = Vec::new();
        while !self.eat_sym("}") {
            let a = self.name()?;
            self.sym("->")?;
            let b = self.name()?;
            self.sym(";")?;
            out.push((a, b));
        }
        Ok(out)
    }

    fn map(&mut self) -> Result<Decl, ParseError> {
        self.bump();
        let id = self.name()?;
        self.sym(":")?;
        let source = self.name()?;
        self.sym("->")?;
        let target = self.name()?;
        let entries = self.arrows()?;
        Ok(Decl::Map {
            id,
            source,
            target,
            entries,
        })
    }

    fn connection(&mut self) -> Result<Decl, ParseError> {
        self.bump();
        let id = self.name()?;
        self.sym("{")?;
        self.kw("alpha")?;
        let alpha = self.name()?;
        self.sym(";")?;
        self.kw("gamma")?;
        let gamma = self.name()?;
        self.sym(";")?;
        self.sym("}")?;
        Ok(Decl::Connection { id, alpha, gamma })
    }

    fn mou(&mut self) -> Result<Decl, ParseError> {
        self.bump();
        let id = self.name()?;
        self.sym(":")?;
        let left = self.name()?;
        self.sym("<->")?;
        let right = self.name()?;
        let edges = self.arrows()?;
        Ok(Decl::Mou {
            id,
            left,
            right,
            edges,
        })
    }

    fn domain(&mut self) -> Result<Decl, ParseError> {
        self.bump();
        let id = self.name()?;
        self.sym("{")?;
        self.kw("lattice")?;
        let lattice = self.name()?;
        self.sym(";")?;
        let mut vars = Vec::new();
        let mut processes = Vec::new();
        while !self.eat_sym("}") {
            let section = self.name()?;
            let ns = match section.text.as_str() {
                "vars" => Namespace::Object,
                "exports" => Namespace::Export,
                "imports" => Namespace::Import,
                "processes" => {
                    while !self.eat_sym(";") {
                        processes.push(self.name()?);
                    }
                    continue;
                }
                _ => {
                    return Err(ParseError::at(
                        section.pos,
                        format!(
                        "expected `vars`, `exports`, `imports` or `processes`, found `{section}`"
                    ),
                    ))
                }
            };
            // entries continue while the next tokens read `name :`
            while matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek2(), Tok::Sym(":")) {
                let var = self.name()?;
                self.sym(":")?;
                let class = self.name()?;
                self.sym(";")?;
                vars.push((ns, var, class));
            }
            self.eat_sym(";");
        }
        Ok(Decl::Domain {
            id,
            lattice,
            vars,
            processes,
        })
    }

    fn system(&mut self) -> Result<Decl, ParseError> {
        self.bump();
        let id = self.name()?;
        self.sym("{")?;
        self.kw("left")?;
        let left = self.name()?;
        self.sym(";")?;
        self.kw("right")?;
        let right = self.name()?;
        self.sym(";")?;
        self.kw("connect")?;
        let connect = self.name()?;
        self.sym(";")?;
        self.sym("}")?;
        Ok(Decl::System {
            id,
            left,
            right,
            connect,
        })
    }

    fn program(&mut self) -> Result<Decl, ParseError> {
        self.bump();
        let id = self.name()?;
        self.sym("{")?;
        let mut phrases = Vec::new();
        while !self.eat_sym("}") {
            let pos = self.pos();
            phrases.push((self.phrase()?, pos));
        }
        Ok(Decl::Program { id, phrases })
    }

    fn phrase(&mut self) -> Result<Phrase, ParseError> {
        let kw = self.name()?;
        let p = match kw.text.as_str() {
            "txn" => {
                let side = self.side()?;
                self.sym("{")?;
                let mut assigns = Vec::new();
                while !self.eat_sym("}") {
                    let z = self.name()?;
                    self.sym(":=")?;
                    let e = self.expr()?;
                    self.sym(";")?;
                    assigns.push(Assign::new(z.text, e));
                }
                self.eat_sym(";");
                return Ok(Phrase::txn(side, assigns));
            }
            "rd" => {
                let side = self.side()?;
                let (z, y) = (self.name()?, self.name()?);
                Phrase::rd(side, &z.text, &y.text)
            }
            "wr" => {
                let side = self.side()?;
                let (x, z) = (self.name()?, self.name()?);
                Phrase::wr(side, &x.text, &z.text)
            }
            "trl" => {
                let (y, x) = (self.name()?, self.name()?);
                Phrase::trl(&y.text, &x.text)
            }
            "tlr" => {
                let (y, x) = (self.name()?, self.name()?);
                Phrase::tlr(&y.text, &x.text)
            }
            _ => {
                return Err(ParseError::at(
                    kw.pos,
                    format!("expected a phrase (`txn`, `rd`, `wr`, `trl`, `tlr`), found `{kw}`"),
                ))
            }
        };
        self.sym(";")?;
        Ok(p)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.term()?;
        loop {
            let op = if self.eat_sym("+") {
                Op::Add
            } else if self.eat_sym("-") {
                Op::Sub
            } else {
                return Ok(e);
            };
            e = Expr::bin(op, e, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.atom()?;
        while self.eat_sym("*") {
            e = Expr::bin(Op::Mul, e, self.atom()?);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Ident(_) => Ok(Expr::Var(self.name()?.text)),
            Tok::Int(_) => Ok(Expr::Lit(self.int()?)),
            Tok::Sym("-") if matches!(self.peek2(), Tok::Int(_)) => Ok(Expr::Lit(self.int()?)),
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.sym(")")?;
                Ok(e)
            }
            _ => self.unexpected("an expression"),
        }
    }

    fn store(&mut self) -> Result<Decl, ParseError> {
        self.bump();
        let id = self.name()?;
        self.kw("for")?;
        let domain = self.name()?;
        self.sym("{")?;
        let mut values = Vec::new();
        while !self.eat_sym("}") {
            let var = self.name()?;
            self.sym("=")?;
            let v = self.int()?;
            self.sym(";")?;
            values.push((var, v));
        }
        Ok(Decl::Store { id, domain, values })
    }
}

/// Parses a whole file into declarations, in source order.
pub fn parse_decls(src: &str) -> Result<Vec<Decl>, ParseError> {
    Parser {
        toks: lex(src)?,
        at: 0,
    }
    .decls()
}
