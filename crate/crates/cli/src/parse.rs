//! Expression language shared by elements, forms and series.
//!
//! ```text
//! sum     := wedge (('+' | '-') wedge)*
//! wedge   := product ('^' product)*          '^' not followed by an integer
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' '-'? INT)?
//! atom    := INT | NAME | NAME '(' sum (',' sum)* ')' | '(' sum ')'
//! ```

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Int(i64),
    Name(String),
    Call(String, Vec<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Wedge(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

/// A node with the byte offset it starts at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: Kind,
    pub pos: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Name(String),
    Sym(char),
    End,
}

fn lex(src: &str) -> CliResult<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = src[start..i]
                .parse::<i64>()
                .map_err(|_| CliError::parse(start, "integer literal out of range"))?;
            out.push((Tok::Int(n), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Name(src[start..i].to_string()), start));
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap_or(c);
            return Err(CliError::parse(i, format!("unexpected character '{ch}'")));
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> CliResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(CliError::parse(self.pos(), format!("expected '{c}'")))
        }
    }

    fn sum(&mut self) -> CliResult<Expr> {
        let mut lhs = self.wedge()?;
        loop {
            let pos = self.pos();
            let kind = if self.eat('+') {
                Kind::Add(Box::new(lhs), Box::new(self.wedge()?))
            } else if self.eat('-') {
                Kind::Sub(Box::new(lhs), Box::new(self.wedge()?))
            } else {
                return Ok(lhs);
            };
            lhs = Expr { kind, pos };
        }
    }

    /// `^` is a power when an integer follows, a wedge otherwise.
    fn caret_is_wedge(&self) -> bool {
        *self.peek() == Tok::Sym('^')
            && !matches!(self.peek_at(1), Tok::Int(_))
            && !(*self.peek_at(1) == Tok::Sym('-') && matches!(self.peek_at(2), Tok::Int(_)))
    }

    fn wedge(&mut self) -> CliResult<Expr> {
        let mut lhs = self.product()?;
        while self.caret_is_wedge() {
            let pos = self.pos();
            self.bump();
            lhs = Expr { kind: Kind::Wedge(Box::new(lhs), Box::new(self.product()?)), pos };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> CliResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.pos();
            let kind = if self.eat('*') {
                Kind::Mul(Box::new(lhs), Box::new(self.unary()?))
            } else if self.eat('/') {
                Kind::Div(Box::new(lhs), Box::new(self.unary()?))
            } else {
                return Ok(lhs);
            };
            lhs = Expr { kind, pos };
        }
    }

    fn unary(&mut self) -> CliResult<Expr> {
        let pos = self.pos();
        if self.eat('-') {
            return Ok(Expr { kind: Kind::Neg(Box::new(self.unary()?)), pos });
        }
        self.power()
    }

    fn power(&mut self) -> CliResult<Expr> {
        let base = self.atom()?;
        if *self.peek() == Tok::Sym('^') && !self.caret_is_wedge() {
            let pos = self.pos();
            self.bump();
            let neg = self.eat('-');
            let (tok, at) = self.bump();
            let Tok::Int(n) = tok else {
                return Err(CliError::parse(at, "expected an integer exponent"));
            };
            return Ok(Expr { kind: Kind::Pow(Box::new(base), if neg { -n } else { n }), pos });
        }
        Ok(base)
    }

    fn atom(&mut self) -> CliResult<Expr> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Int(n) => Ok(Expr { kind: Kind::Int(n), pos }),
            Tok::Name(name) => {
                if self.eat('(') {
                    let mut args = vec![self.sum()?];
                    while self.eat(',') {
                        args.push(self.sum()?);
                    }
                    self.expect(')')?;
                    Ok(Expr { kind: Kind::Call(name, args), pos })
                } else {
                    Ok(Expr { kind: Kind::Name(name), pos })
                }
            }
            Tok::Sym('(') => {
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::End => Err(CliError::parse(pos, "unexpected end of input")),
            Tok::Sym(c) => Err(CliError::parse(pos, format!("unexpected '{c}'"))),
        }
    }
}

pub fn parse(src: &str) -> CliResult<Expr> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let e = p.sum()?;
    if *p.peek() != Tok::End {
        return Err(CliError::parse(p.pos(), "unexpected trailing input"));
    }
    Ok(e)
}

/// Operations an expression can be evaluated with.
pub trait Algebra {
    type V: Clone;

    fn int(&self, n: i64) -> CliResult<Self::V>;
    fn name(&self, name: &str) -> CliResult<Self::V>;
    fn add(&self, a: Self::V, b: Self::V) -> CliResult<Self::V>;
    fn sub(&self, a: Self::V, b: Self::V) -> CliResult<Self::V>;
    fn mul(&self, a: Self::V, b: Self::V) -> CliResult<Self::V>;
    fn div(&self, a: Self::V, b: Self::V) -> CliResult<Self::V>;
    fn neg(&self, a: Self::V) -> CliResult<Self::V>;
    fn pow(&self, a: Self::V, n: i64) -> CliResult<Self::V>;

    fn wedge(&self, _a: Self::V, _b: Self::V) -> CliResult<Self::V> {
        Err(CliError::msg("wedge products are not available here"))
    }

    /// `O(t^n)`.
    fn big_o(&self, var: &str, _n: i64) -> CliResult<Self::V> {
        Err(CliError::msg(format!("precision tag O({var}^N) is not available here")))
    }

    fn call(&self, name: &str, _args: Vec<Self::V>) -> CliResult<Self::V> {
        Err(CliError::msg(format!("unknown function '{name}'")))
    }
}

pub fn eval<A: Algebra>(alg: &A, e: &Expr) -> CliResult<A::V> {
    let at = |r: CliResult<A::V>| r.map_err(|err| err.at(e.pos));
    match &e.kind {
        Kind::Int(n) => at(alg.int(*n)),
        Kind::Name(n) => at(alg.name(n)),
        Kind::Call(f, args) if f == "O" => {
            let [arg] = args.as_slice() else {
                return Err(CliError::parse(e.pos, "O takes one argument"));
            };
            let (var, n) = match &arg.kind {
                Kind::Name(v) => (v.clone(), 1),
                Kind::Pow(b, n) => match &b.kind {
                    Kind::Name(v) => (v.clone(), *n),
                    _ => return Err(CliError::parse(arg.pos, "expected O(name^N)")),
                },
                _ => return Err(CliError::parse(arg.pos, "expected O(name^N)")),
            };
            at(alg.big_o(&var, n))
        }
        Kind::Call(f, args) => {
            let vals = args.iter().map(|a| eval(alg, a)).collect::<CliResult<Vec<_>>>()?;
            at(alg.call(f, vals))
        }
        Kind::Neg(a) => {
            let a = eval(alg, a)?;
            at(alg.neg(a))
        }
        Kind::Pow(a, n) => {
            let a = eval(alg, a)?;
            at(alg.pow(a, *n))
        }
        Kind::Add(a, b) | Kind::Sub(a, b) | Kind::Mul(a, b) | Kind::Div(a, b) | Kind::Wedge(a, b) => {
            let a = eval(alg, a)?;
            let b = eval(alg, b)?;
            at(match &e.kind {
                Kind::Add(..) => alg.add(a, b),
                Kind::Sub(..) => alg.sub(a, b),
                Kind::Mul(..) => alg.mul(a, b),
                Kind::Div(..) => alg.div(a, b),
                _ => alg.wedge(a, b),
            })
        }
    }
}

/// Polynomials in one extra variable over an inner algebra, coefficients low
/// to high.
pub struct PolyAlg<'a, A: Algebra> {
    pub inner: &'a A,
    pub var: String,
}

impl<A: Algebra> PolyAlg<'_, A> {
    fn zero(&self) -> CliResult<A::V> {
        self.inner.int(0)
    }

    fn constant(&self, p: &[A::V]) -> Option<A::V> {
        match p.len() {
            0 => self.zero().ok(),
            1 => Some(p[0].clone()),
            _ => None,
        }
    }
}

impl<A: Algebra> Algebra for PolyAlg<'_, A> {
    type V = Vec<A::V>;

    fn int(&self, n: i64) -> CliResult<Self::V> {
        Ok(vec![self.inner.int(n)?])
    }

    fn name(&self, name: &str) -> CliResult<Self::V> {
        if name == self.var {
            Ok(vec![self.zero()?, self.inner.int(1)?])
        } else {
            Ok(vec![self.inner.name(name)?])
        }
    }

    fn add(&self, a: Self::V, b: Self::V) -> CliResult<Self::V> {
        let n = a.len().max(b.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let x = a.get(i).cloned().map_or_else(|| self.zero(), Ok)?;
            let y = b.get(i).cloned().map_or_else(|| self.zero(), Ok)?;
            out.push(self.inner.add(x, y)?);
        }
        Ok(out)
    }

    fn sub(&self, a: Self::V, b: Self::V) -> CliResult<Self::V> {
        let nb = self.neg(b)?;
        self.add(a, nb)
    }

    fn mul(&self, a: Self::V, b: Self::V) -> CliResult<Self::V> {
        if a.is_empty() || b.is_empty() {
            return Ok(Vec::new());
        }
        let mut out = vec![self.zero()?; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let prod = self.inner.mul(x.clone(), y.clone())?;
                out[i + j] = self.inner.add(out[i + j].clone(), prod)?;
            }
        }
        Ok(out)
    }

    fn div(&self, a: Self::V, b: Self::V) -> CliResult<Self::V> {
        let c = self
            .constant(&b)
            .ok_or_else(|| CliError::msg(format!("can only divide by constants in {}", self.var)))?;
        a.into_iter().map(|x| self.inner.div(x, c.clone())).collect()
    }

    fn neg(&self, a: Self::V) -> CliResult<Self::V> {
        a.into_iter().map(|x| self.inner.neg(x)).collect()
    }

    fn pow(&self, a: Self::V, n: i64) -> CliResult<Self::V> {
        if n < 0 {
            let c = self
                .constant(&a)
                .ok_or_else(|| CliError::msg(format!("negative power of a polynomial in {}", self.var)))?;
            return Ok(vec![self.inner.pow(c, n)?]);
        }
        let mut acc = self.int(1)?;
        for _ in 0..n {
            acc = self.mul(acc, a.clone())?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn show(e: &Expr) -> String {
        match &e.kind {
            Kind::Int(n) => n.to_string(),
            Kind::Name(n) => n.clone(),
            Kind::Call(f, a) => format!("{f}({})", a.iter().map(show).collect::<Vec<_>>().join(",")),
            Kind::Neg(a) => format!("(-{})", show(a)),
            Kind::Add(a, b) => format!("({} + {})", show(a), show(b)),
            Kind::Sub(a, b) => format!("({} - {})", show(a), show(b)),
            Kind::Mul(a, b) => format!("({} * {})", show(a), show(b)),
            Kind::Div(a, b) => format!("({} / {})", show(a), show(b)),
            Kind::Wedge(a, b) => format!("({} ^ {})", show(a), show(b)),
            Kind::Pow(a, n) => format!("{}^{n}", show(a)),
        }
    }

    #[test]
    fn precedence() {
        assert_eq!(show(&parse("dlog(t1) ^ dlog(t2)").unwrap()), "(dlog(t1) ^ dlog(t2))");
        assert_eq!(show(&parse("(w + t^-2)*dlog(t)").unwrap()), "((w + t^-2) * dlog(t))");
        assert_eq!(show(&parse("x * dlog(y1) ^ dlog(y2)").unwrap()), "((x * dlog(y1)) ^ dlog(y2))");
        assert_eq!(show(&parse("-t^2 + 3").unwrap()), "((-t^2) + 3)");
        assert_eq!(show(&parse("T^3").unwrap()), "T^3");
        assert_eq!(show(&parse("1 + O(t^4)").unwrap()), "(1 + O(t^4))");
        assert_eq!(show(&parse("a/b/c").unwrap()), "((a / b) / c)");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("(t + 1").unwrap_err();
        assert!(e.to_string().contains("position 6"), "{e}");
        let e = parse("t ^ ^").unwrap_err();
        assert!(e.to_string().contains("position 4"), "{e}");
        let e = parse("t $ 1").unwrap_err();
        assert!(e.to_string().contains("position 2"), "{e}");
    }
}
