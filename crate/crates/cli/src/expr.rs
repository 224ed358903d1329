//! Expressions over a Chevalley basis.
//!
//! ```text
//! element := '-'? term (('+'|'-') term)*
//! term    := factor ('*'? factor)*
//! factor  := atom ('^' nat)?
//! atom    := 'x(' roots ')' | 'h(' roots ')' | 'h(' nat ')' | nat
//!          | '[' element ',' element ']' | '(' element ')'
//! roots   := ('+'|'-')? nat? 'e' nat (('+'|'-') nat? 'e' nat)*
//! ```
//!
//! Juxtaposition multiplies. `h(k)` is the `k`-th simple coroot, `h(β)` the
//! coroot of the root `β`; `[a, b]` is the commutator `ab − ba`.

use std::fmt;

use modlie::{Enveloping, LieAlgebra, PbwError, Root, RootSystem, UEElement};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown root {text} at line {line}, column {col}")]
    UnknownRoot { text: String, line: usize, col: usize },
    #[error("no simple coroot h({index}) at line {line}, column {col}")]
    UnknownCoroot { index: usize, line: usize, col: usize },
    #[error("coefficient overflow while evaluating")]
    Overflow,
}

impl From<PbwError> for ExprError {
    fn from(_: PbwError) -> Self {
        ExprError::Overflow
    }
}

/// A root as written: `(coefficient, ε-index)` terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootExpr(pub Vec<(i32, usize)>);

impl RootExpr {
    /// The vector in `Z^dim`, or `None` if an index is out of range.
    pub fn to_root(&self, dim: usize) -> Option<Root> {
        let mut c = vec![0; dim];
        for &(a, i) in &self.0 {
            if i == 0 || i > dim {
                return None;
            }
            c[i - 1] += a;
        }
        Some(Root::new(c))
    }
}

impl fmt::Display for RootExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(a, i) in &self.0 {
            f.write_str(if a < 0 { "-" } else { "+" })?;
            if a.abs() != 1 {
                write!(f, "{}", a.abs())?;
            }
            write!(f, "e{i}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    X(RootExpr),
    H(RootExpr),
    /// Simple coroot, 1-based.
    HSimple(usize),
    Int(u64),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Bracket(Box<Expr>, Box<Expr>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_sum(self))
    }
}

/// Text that parses back to the same tree.
pub fn print(e: &Expr) -> String {
    print_sum(e)
}

fn print_sum(e: &Expr) -> String {
    match e {
        Expr::Add(a, b) => format!("{} + {}", print_sum(a), print_term(b)),
        Expr::Sub(a, b) => format!("{} - {}", print_sum(a), print_term(b)),
        Expr::Neg(a) => format!("-{}", print_term(a)),
        _ => print_term(e),
    }
}

fn print_term(e: &Expr) -> String {
    match e {
        Expr::Mul(a, b) => format!("{} {}", print_term(a), print_factor(b)),
        _ => print_factor(e),
    }
}

fn print_factor(e: &Expr) -> String {
    match e {
        Expr::Pow(a, n) => format!("{}^{n}", print_atom(a)),
        _ => print_atom(e),
    }
}

fn print_atom(e: &Expr) -> String {
    match e {
        Expr::X(r) => format!("x({r})"),
        Expr::H(r) => {
            let s = r.to_string();
            format!("h({})", s.strip_prefix('+').unwrap_or(&s))
        }
        Expr::HSimple(k) => format!("h({k})"),
        Expr::Int(n) => n.to_string(),
        Expr::Bracket(a, b) => format!("[{}, {}]", print_sum(a), print_sum(b)),
        _ => format!("({})", print_sum(e)),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    rs: Option<&'a RootSystem>,
}

/// Parse without checking roots against a system.
pub fn parse(input: &str) -> Result<Expr, ExprError> {
    Parser {
        src: input.as_bytes(),
        pos: 0,
        rs: None,
    }
    .run()
}

/// Parse and reject roots and coroots that `rs` does not have.
pub fn parse_in(input: &str, rs: &RootSystem) -> Result<Expr, ExprError> {
    Parser {
        src: input.as_bytes(),
        pos: 0,
        rs: Some(rs),
    }
    .run()
}

impl<'a> Parser<'a> {
    fn run(mut self) -> Result<Expr, ExprError> {
        let e = self.element()?;
        self.ws();
        if self.pos < self.src.len() {
            return Err(self.error(format!("unexpected {:?}", self.src[self.pos] as char)));
        }
        Ok(e)
    }

    fn line_col(&self, pos: usize) -> (usize, usize) {
        let before = &self.src[..pos.min(self.src.len())];
        let line = before.iter().filter(|&&c| c == b'\n').count() + 1;
        let col = pos - before.iter().rposition(|&c| c == b'\n').map_or(0, |i| i + 1) + 1;
        (line, col)
    }

    fn error(&self, msg: String) -> ExprError {
        self.error_at(self.pos, msg)
    }

    fn error_at(&self, pos: usize, msg: String) -> ExprError {
        let (line, col) = self.line_col(pos);
        ExprError::Syntax { line, col, msg }
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        match self.peek() {
            Some(d) if d == c => {
                self.pos += 1;
                Ok(())
            }
            Some(d) => Err(self.error(format!("expected {:?}, found {:?}", c as char, d as char))),
            None => Err(self.error(format!("expected {:?}, found end of input", c as char))),
        }
    }

    fn nat(&mut self) -> Result<u64, ExprError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number".into()));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error_at(start, "number too large".into()))
    }

    fn element(&mut self) -> Result<Expr, ExprError> {
        let mut acc = if self.peek() == Some(b'-') {
            self.pos += 1;
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
                }
                Some(c) if c == b'x' || c == b'h' || c == b'[' || c == b'(' || c.is_ascii_digit() => {
                    acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let a = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.nat()?;
            let n = u32::try_from(n).map_err(|_| self.error("exponent too large".into()))?;
            return Ok(Expr::Pow(Box::new(a), n));
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let start = {
            self.ws();
            self.pos
        };
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                self.expect(b'(')?;
                let r = self.roots()?;
                self.expect(b')')?;
                self.check_root(&r, start)?;
                Ok(Expr::X(r))
            }
            Some(b'h') => {
                self.pos += 1;
                self.expect(b'(')?;
                let e = if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    let k = self.nat()? as usize;
                    if let Some(rs) = self.rs {
                        if k == 0 || k > rs.rank() {
                            let (line, col) = self.line_col(start);
                            return Err(ExprError::UnknownCoroot { index: k, line, col });
                        }
                    }
                    Expr::HSimple(k)
                } else {
                    let r = self.roots()?;
                    self.check_root(&r, start)?;
                    Expr::H(r)
                };
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'[') => {
                self.pos += 1;
                let a = self.element()?;
                self.expect(b',')?;
                let b = self.element()?;
                self.expect(b']')?;
                Ok(Expr::Bracket(Box::new(a), Box::new(b)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.element()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Int(self.nat()?)),
            Some(c) => Err(self.error(format!("unexpected {:?}", c as char))),
            None => Err(self.error("unexpected end of input".into())),
        }
    }

    fn roots(&mut self) -> Result<RootExpr, ExprError> {
        let mut terms = Vec::new();
        loop {
            let sign = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                Some(b'e') | Some(b'0'..=b'9') if terms.is_empty() => 1,
                _ => break,
            };
            let coef = if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                i32::try_from(self.nat()?).map_err(|_| self.error("coefficient too large".into()))?
            } else {
                1
            };
            if self.peek() != Some(b'e') {
                return Err(self.error("expected e<index> in root".into()));
            }
            self.pos += 1;
            let i = self.nat()? as usize;
            terms.push((sign * coef, i));
        }
        if terms.is_empty() {
            return Err(self.error("expected a root such as +e1-e2".into()));
        }
        Ok(RootExpr(terms))
    }

    fn check_root(&self, r: &RootExpr, at: usize) -> Result<(), ExprError> {
        let Some(rs) = self.rs else { return Ok(()) };
        match r.to_root(rs.ambient_dim()) {
            Some(root) if rs.contains(&root) => Ok(()),
            _ => {
                let (line, col) = self.line_col(at);
                Err(ExprError::UnknownRoot {
                    text: r.to_string(),
                    line,
                    col,
                })
            }
        }
    }
}

fn resolve(alg: &LieAlgebra, r: &RootExpr) -> Result<Root, ExprError> {
    let rs = alg.root_system();
    r.to_root(rs.ambient_dim())
        .filter(|root| rs.contains(root))
        .ok_or_else(|| ExprError::UnknownRoot {
            text: r.to_string(),
            line: 0,
            col: 0,
        })
}

/// Value of `e` in `U(L)`, in PBW normal form.
pub fn evaluate(e: &Expr, env: &Enveloping<'_>) -> Result<UEElement, ExprError> {
    let alg = env.algebra();
    Ok(match e {
        Expr::X(r) => env.root_vector(&resolve(alg, r)?).map_err(|_| ExprError::Overflow)?,
        Expr::H(r) => {
            let h = alg.coroot_expand(&resolve(alg, r)?).map_err(|_| ExprError::Overflow)?;
            env.from_lie(&h)?
        }
        Expr::HSimple(k) => {
            if *k == 0 || *k > alg.rank() {
                return Err(ExprError::UnknownCoroot {
                    index: *k,
                    line: 0,
                    col: 0,
                });
            }
            env.generator(alg.coroot_index(k - 1))
        }
        Expr::Int(n) => env.scalar(i64::try_from(*n).map_err(|_| ExprError::Overflow)?),
        Expr::Neg(a) => env.scale(-1, &evaluate(a, env)?)?,
        Expr::Add(a, b) => env.add(&evaluate(a, env)?, &evaluate(b, env)?)?,
        Expr::Sub(a, b) => env.sub(&evaluate(a, env)?, &evaluate(b, env)?)?,
        Expr::Mul(a, b) => env.multiply(&evaluate(a, env)?, &evaluate(b, env)?)?,
        Expr::Pow(a, n) => env.pow(&evaluate(a, env)?, *n)?,
        Expr::Bracket(a, b) => env.commutator(&evaluate(a, env)?, &evaluate(b, env)?)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use modlie::Family;

    fn x(s: &[(i32, usize)]) -> Expr {
        Expr::X(RootExpr(s.to_vec()))
    }

    #[test]
    fn atoms() {
        assert_eq!(parse("x(+e1)").unwrap(), x(&[(1, 1)]));
        assert_eq!(parse("x(e1-e2)").unwrap(), x(&[(1, 1), (-1, 2)]));
        assert_eq!(parse("h(2)").unwrap(), Expr::HSimple(2));
        assert_eq!(parse("x(+2e3)").unwrap(), x(&[(2, 3)]));
    }

    #[test]
    fn juxtaposition_and_precedence() {
        let e = parse("4 x(-e1) x(+e1) + h(e1)^2").unwrap();
        let Expr::Add(l, r) = e else { panic!() };
        assert!(matches!(*l, Expr::Mul(..)));
        assert!(matches!(*r, Expr::Pow(_, 2)));
        assert_eq!(parse("2*3").unwrap(), parse("2 3").unwrap());
    }

    #[test]
    fn commutator_syntax() {
        let e = parse("[x(+e1), (h(e1)+1)^2 + 4 x(-e1) x(+e1)]").unwrap();
        assert!(matches!(e, Expr::Bracket(..)));
    }

    #[test]
    fn syntax_error_position() {
        match parse("x(+e1") {
            Err(ExprError::Syntax { line: 1, col: 6, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse("x(+e1)\n + )") {
            Err(ExprError::Syntax { line: 2, col: 4, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_root() {
        let rs = RootSystem::build(Family::B, 2).unwrap();
        assert!(parse_in("x(+e1+e2)", &rs).is_ok());
        assert!(matches!(
            parse_in("1 + x(+2e1)", &rs),
            Err(ExprError::UnknownRoot { col: 5, .. })
        ));
        assert!(matches!(
            parse_in("h(3)", &rs),
            Err(ExprError::UnknownCoroot { index: 3, .. })
        ));
    }

    #[test]
    fn printing_round_trips() {
        for s in [
            "-x(+e1) + (-2)",
            "(a)",
            "x(-e1) (x(+e1) x(+e2))",
            "(x(+e1)^2)^3",
            "-(1 + 2) - (3 - 4)",
        ] {
            if let Ok(e) = parse(s) {
                assert_eq!(parse(&print(&e)).unwrap(), e, "{s}");
            }
        }
    }
}
