//! Recursive-descent parser for polynomials, algebra elements, forms and
//! symbol sums, plus the JSON algebra file format.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgElem, AlgebraSpec, ParamSpec, TruncatedAlgebra};
use crate::error::{Error, Result};
use crate::forms::Form;
use crate::ksymbols::SymbolSum;
use crate::linalg::Q;
use crate::poly::{Monomial, Poly, Var, VarNames};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Q),
    Ident(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Wedge(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
    Call(Func, Box<Expr>),
    Symbol(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    end: (usize, usize),
}

fn lex(text: &str) -> Result<Lexer> {
    let mut toks = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let at = (line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
                col += 1;
            }
            toks.push((Tok::Num(s.parse().expect("digits")), at.0, at.1));
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_alphanumeric() || **d == '_') {
                s.push(d);
                chars.next();
                col += 1;
            }
            toks.push((Tok::Ident(s), at.0, at.1));
        } else if "+-*^/(){},∧&".contains(c) {
            chars.next();
            col += 1;
            toks.push((Tok::Op(if c == '&' { '∧' } else { c }), at.0, at.1));
        } else {
            return Err(Error::Syntax { line, col, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(Lexer { toks, end: (line, col) })
}

struct Parser {
    lx: Lexer,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.lx.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> (usize, usize) {
        self.lx.toks.get(self.pos).map_or(self.lx.end, |t| (t.1, t.2))
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self.here();
        Err(Error::Syntax { line, col, msg: msg.into() })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            self.fail(format!("expected `{op}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.term()?)));
        }
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('∧') {
                lhs = Expr::Wedge(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let Some(e) = n.to_i64().filter(|e| *e <= u32::MAX as i64) else {
                    return self.fail("exponent too large");
                };
                Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }))
            }
            _ => self.fail("expected integer exponent"),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                if self.eat('/') {
                    match self.peek().cloned() {
                        Some(Tok::Num(d)) if !d.is_zero() => {
                            self.pos += 1;
                            Ok(Expr::Num(Q::new(n, d)))
                        }
                        _ => self.fail("expected nonzero denominator"),
                    }
                } else {
                    Ok(Expr::Num(Q::from_integer(n)))
                }
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let func = match name.as_str() {
                    "exp" => Some(Func::Exp),
                    "log" => Some(Func::Log),
                    _ => None,
                };
                match func {
                    Some(f) if self.peek() == Some(&Tok::Op('(')) => {
                        self.pos += 1;
                        let arg = self.expr()?;
                        self.expect(')')?;
                        Ok(Expr::Call(f, Box::new(arg)))
                    }
                    _ => Ok(Expr::Ident(name)),
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Op('{')) => {
                self.pos += 1;
                let mut items = vec![self.expr()?];
                while self.eat(',') {
                    items.push(self.expr()?);
                }
                self.expect('}')?;
                Ok(Expr::Symbol(items))
            }
            Some(Tok::Op(c)) => self.fail(format!("unexpected `{c}`")),
            None => self.fail("unexpected end of input"),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser { lx: lex(text)?, pos: 0 };
    let e = p.expr()?;
    if p.pos < p.lx.toks.len() {
        return p.fail("trailing input");
    }
    Ok(e)
}

/// Names and invertibility flags in force while evaluating.
#[derive(Clone, Debug)]
pub struct Scope {
    pub names: VarNames,
    pub invertible: Vec<bool>,
}

impl Scope {
    pub fn nil_only(m: usize) -> Self {
        Scope { names: VarNames::standard(m, Vec::new()), invertible: Vec::new() }
    }

    pub fn of_spec(spec: &AlgebraSpec) -> Self {
        Scope { names: spec.names(), invertible: spec.params.iter().map(|p| p.invertible).collect() }
    }

    fn var(&self, name: &str) -> Result<Var> {
        self.names.lookup(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    fn monomial(&self, var: Var, e: i64) -> Result<Monomial> {
        let mut mono = Monomial::one(self.names.nil.len(), self.names.params.len());
        match var {
            Var::Nil(i) if e >= 0 => mono.nil[i] = e as u32,
            Var::Param(j) if e >= 0 || self.invertible[j] => mono.params[j] = e as i32,
            Var::Nil(i) => return Err(Error::NegativeExponent(self.names.nil_name(i).to_string())),
            Var::Param(j) => return Err(Error::NegativeExponent(self.names.params[j].clone())),
        }
        Ok(mono)
    }
}

fn nonneg(e: i64, what: &Expr) -> Result<u32> {
    u32::try_from(e).map_err(|_| Error::NegativeExponent(format!("{what:?}")))
}

/// A plain polynomial; `exp`, `log`, differentials and symbols are rejected.
pub fn eval_poly(e: &Expr, scope: &Scope) -> Result<Poly> {
    let k = scope.names.params.len();
    let m = scope.names.nil.len();
    Ok(match e {
        Expr::Num(q) => Poly::constant(q.clone(), m, k),
        Expr::Ident(name) => Poly::term(Q::one(), scope.monomial(scope.var(name)?, 1)?),
        Expr::Add(a, b) => eval_poly(a, scope)?.add(&eval_poly(b, scope)?),
        Expr::Sub(a, b) => eval_poly(a, scope)?.sub(&eval_poly(b, scope)?),
        Expr::Mul(a, b) => eval_poly(a, scope)?.mul(&eval_poly(b, scope)?),
        Expr::Neg(a) => eval_poly(a, scope)?.neg(),
        Expr::Pow(base, ex) => match base.as_ref() {
            Expr::Ident(name) => Poly::term(Q::one(), scope.monomial(scope.var(name)?, *ex)?),
            other => {
                let b = eval_poly(other, scope)?;
                let mut acc = Poly::constant(Q::one(), m, k);
                for _ in 0..nonneg(*ex, other)? {
                    acc = acc.mul(&b);
                }
                acc
            }
        },
        Expr::Wedge(..) | Expr::Call(..) | Expr::Symbol(_) => {
            return Err(Error::MalformedSpec("not a polynomial expression".into()));
        }
    })
}

pub fn parse_poly(text: &str, scope: &Scope) -> Result<Poly> {
    eval_poly(&parse_expr(text)?, scope)
}

fn scope_of(alg: &TruncatedAlgebra) -> Scope {
    Scope::of_spec(alg.spec())
}

pub fn eval_elem(e: &Expr, alg: &TruncatedAlgebra) -> Result<AlgElem> {
    Ok(match e {
        Expr::Num(q) => alg.constant(q.clone()),
        Expr::Ident(_) => alg.reduce(&eval_poly(e, &scope_of(alg))?)?,
        Expr::Add(a, b) => eval_elem(a, alg)?.add(&eval_elem(b, alg)?)?,
        Expr::Sub(a, b) => eval_elem(a, alg)?.sub(&eval_elem(b, alg)?)?,
        Expr::Mul(a, b) => eval_elem(a, alg)?.mul(&eval_elem(b, alg)?)?,
        Expr::Neg(a) => eval_elem(a, alg)?.neg(),
        Expr::Pow(base, ex) => match base.as_ref() {
            Expr::Ident(_) => alg.reduce(&eval_poly(e, &scope_of(alg))?)?,
            other => eval_elem(other, alg)?.pow(nonneg(*ex, other)?),
        },
        Expr::Call(Func::Exp, a) => eval_elem(a, alg)?.exp_nil()?,
        Expr::Call(Func::Log, a) => {
            let u = eval_elem(a, alg)?;
            let x = u.sub(&alg.one())?;
            if !x.is_nilpotent() {
                return Err(Error::NotNilpotent);
            }
            x.log1p()?
        }
        Expr::Wedge(..) | Expr::Symbol(_) => return Err(Error::MalformedSpec("not a ring element".into())),
    })
}

pub fn parse_elem(text: &str, alg: &TruncatedAlgebra) -> Result<AlgElem> {
    eval_elem(&parse_expr(text)?, alg)
}

fn differential(name: &str, alg: &TruncatedAlgebra) -> Option<Form> {
    let var = alg.names().lookup(name.strip_prefix('d')?)?;
    Some(Form::generator(alg, var))
}

fn has_form(e: &Expr, alg: &TruncatedAlgebra) -> bool {
    match e {
        Expr::Ident(n) => alg.names().lookup(n).is_none() && differential(n, alg).is_some(),
        Expr::Num(_) | Expr::Symbol(_) => false,
        Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => has_form(a, alg),
        Expr::Wedge(..) => true,
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => has_form(a, alg) || has_form(b, alg),
    }
}

/// A differential form; `dX` names the differential of a variable `X`.
pub fn eval_form(e: &Expr, alg: &TruncatedAlgebra) -> Result<Form> {
    if !has_form(e, alg) {
        return Ok(Form::from_elem(&eval_elem(e, alg)?));
    }
    match e {
        Expr::Ident(n) => differential(n, alg).ok_or_else(|| Error::UnknownVariable(n.clone())),
        Expr::Add(a, b) => eval_form(a, alg)?.add(&eval_form(b, alg)?),
        Expr::Sub(a, b) => eval_form(a, alg)?.sub(&eval_form(b, alg)?),
        Expr::Mul(a, b) | Expr::Wedge(a, b) => eval_form(a, alg)?.wedge(&eval_form(b, alg)?),
        Expr::Neg(a) => Ok(eval_form(a, alg)?.neg()),
        _ => Err(Error::MalformedSpec("differentials only combine by sums and products".into())),
    }
}

pub fn parse_form(text: &str, alg: &TruncatedAlgebra) -> Result<Form> {
    eval_form(&parse_expr(text)?, alg)
}

fn integer(e: &Expr) -> Option<i64> {
    match e {
        Expr::Num(q) if q.is_integer() => q.to_integer().to_i64(),
        Expr::Neg(a) => integer(a).map(|k| -k),
        _ => None,
    }
}

fn collect_symbols(e: &Expr, sign: i64, alg: &TruncatedAlgebra, out: &mut Vec<(i64, Vec<AlgElem>)>) -> Result<()> {
    match e {
        Expr::Symbol(items) => {
            out.push((sign, items.iter().map(|x| eval_elem(x, alg)).collect::<Result<_>>()?));
        }
        Expr::Add(a, b) => {
            collect_symbols(a, sign, alg, out)?;
            collect_symbols(b, sign, alg, out)?;
        }
        Expr::Sub(a, b) => {
            collect_symbols(a, sign, alg, out)?;
            collect_symbols(b, -sign, alg, out)?;
        }
        Expr::Neg(a) => collect_symbols(a, -sign, alg, out)?,
        Expr::Mul(a, b) => match (integer(a), integer(b)) {
            (Some(k), _) => collect_symbols(b, sign * k, alg, out)?,
            (None, Some(k)) => collect_symbols(a, sign * k, alg, out)?,
            _ => return Err(Error::NotASymbolSum),
        },
        _ => return Err(Error::NotASymbolSum),
    }
    Ok(())
}

/// `k*{u, v, ..} + ..` with integer `k` and unit entries.
pub fn eval_symbol(e: &Expr, alg: &TruncatedAlgebra) -> Result<SymbolSum> {
    let mut terms = Vec::new();
    collect_symbols(e, 1, alg, &mut terms)?;
    let arity = terms.first().map(|t| t.1.len()).ok_or(Error::NotASymbolSum)?;
    let mut s = SymbolSum::zero(alg, arity);
    for (c, us) in terms {
        s.push(c, us)?;
    }
    Ok(s)
}

pub fn parse_symbol(text: &str, alg: &TruncatedAlgebra) -> Result<SymbolSum> {
    eval_symbol(&parse_expr(text)?, alg)
}

/// On-disk algebra description. An empty ideal stands for `(t_1..t_m)^N`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub nilpotents: usize,
    pub bound: u32,
    #[serde(default)]
    pub ideal: Vec<String>,
    #[serde(default)]
    pub params: Vec<ParamSpec>,
}

impl AlgebraFile {
    pub fn to_spec(&self) -> Result<AlgebraSpec> {
        let mut spec = AlgebraSpec::truncated(self.nilpotents, self.bound);
        spec.params = self.params.clone();
        if !self.ideal.is_empty() {
            let scope = Scope::of_spec(&spec);
            let gens = self.ideal.iter().map(|g| parse_poly(g, &scope)).collect::<Result<Vec<_>>>()?;
            let mut with = AlgebraSpec::with_ideal(self.nilpotents, self.bound, gens);
            with.params = spec.params;
            spec = with;
        }
        Ok(spec)
    }

    pub fn build(&self) -> Result<TruncatedAlgebra> {
        TruncatedAlgebra::new(self.to_spec()?)
    }
}

pub fn parse_algebra_json(text: &str) -> Result<AlgebraFile> {
    serde_json::from_str(text).map_err(|e| Error::MalformedSpec(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gk_scope() -> Scope {
        Scope::nil_only(2)
    }

    #[test]
    fn grauert_kerner_round_trip() {
        let f = parse_poly("t1^4+t1^2*t2^3+t2^5", &gk_scope()).unwrap();
        let printed = f.display(&gk_scope().names);
        assert_eq!(printed, "t1^2*t2^3 + t2^5 + t1^4");
        assert_eq!(parse_poly(&printed, &gk_scope()).unwrap(), f);
    }

    #[test]
    fn structure() {
        let e = parse_expr("1+a*t").unwrap();
        let expect = Expr::Add(
            Box::new(Expr::Num(Q::one())),
            Box::new(Expr::Mul(Box::new(Expr::Ident("a".into())), Box::new(Expr::Ident("t".into())))),
        );
        assert_eq!(e, expect);
        assert!(matches!(parse_expr("{1+a*t^2, b}").unwrap(), Expr::Symbol(v) if v.len() == 2));
    }

    #[test]
    fn errors_are_positioned() {
        assert_eq!(parse_expr("t +\n  * 2").unwrap_err(), Error::Syntax { line: 2, col: 3, msg: "unexpected `*`".into() });
        assert!(matches!(parse_expr("t $"), Err(Error::Syntax { line: 1, col: 3, .. })));
        let spec = AlgebraSpec::truncated(1, 3).param("a", false).param("b", true);
        let scope = Scope::of_spec(&spec);
        assert!(parse_poly("b^-2*t", &scope).is_ok());
        assert_eq!(parse_poly("a^-1", &scope).unwrap_err(), Error::NegativeExponent("a".into()));
    }

    #[test]
    fn forms_and_symbols() {
        let alg = TruncatedAlgebra::new(AlgebraSpec::truncated(1, 3).param("b", true)).unwrap();
        let w = parse_form("t*dt∧db + 1/2*t^2*db & dt", &alg).unwrap();
        assert_eq!(parse_form(&w.to_string(), &alg).unwrap(), w);
        let s = parse_symbol("2*{1+b*t, b} - {b, 1+t}", &alg).unwrap();
        assert_eq!(s.terms().len(), 2);
        assert_eq!(parse_symbol(&s.to_string(), &alg).unwrap().to_string(), s.to_string());
        assert_eq!(parse_symbol("t*{b, b}", &alg).unwrap_err(), Error::NotASymbolSum);
        assert_eq!(parse_elem("log(exp(t))", &alg).unwrap(), alg.t(0));
    }

    #[test]
    fn algebra_file() {
        let file = parse_algebra_json(r#"{"nilpotents": 2, "bound": 3, "params": [{"name": "a", "invertible": true}]}"#).unwrap();
        let alg = file.build().unwrap();
        assert_eq!((alg.nilpotents(), alg.bound(), alg.is_monomial()), (2, 3, true));
        assert!(alg.param_invertible(0));
    }
}
