//! Text formats for polynomials.
//!
//! The canonical form is line oriented and byte-reproducible:
//!
//! ```text
//! poly 3
//! (4,2,0) 1/1
//! (2,4,0) 1/1
//! (2,2,2) -3/1
//! (0,0,6) 1/1
//! ```
//!
//! The header carries the variable count; terms follow in descending
//! graded-lex order with `num/den` coefficients. The infix form accepts
//! ordinary expressions such as `x1^4*x2^2 + 1/2*(x1 - x2)^2`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::monomial::Monomial;
use super::poly::Polynomial;
use super::scalar::{self, Scalar};
use crate::error::{Error, Result};

pub fn to_canonical(p: &Polynomial) -> String {
    let mut out = format!("poly {}\n", p.num_vars());
    for (m, c) in p.terms().rev() {
        out.push_str(&m.tuple_text());
        out.push(' ');
        out.push_str(&scalar::format_scalar(c));
        out.push('\n');
    }
    out
}

pub fn from_canonical(text: &str) -> Result<Polynomial> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty polynomial text".into()))?;
    let num_vars: usize = header
        .strip_prefix("poly")
        .map(str::trim)
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad header `{header}`")))?;
    let mut p = Polynomial::zero(num_vars);
    for line in lines {
        let (tuple, coef) = line
            .rsplit_once(' ')
            .ok_or_else(|| Error::Parse(format!("bad term line `{line}`")))?;
        let exps = parse_tuple(tuple)?;
        if exps.len() != num_vars {
            return Err(Error::Parse(format!(
                "term `{line}` has {} exponents, expected {num_vars}",
                exps.len()
            )));
        }
        p.add_term(Monomial::new(exps), scalar::parse_scalar(coef)?);
    }
    Ok(p)
}

/// Parses an exponent tuple such as `(2,0,1)`.
pub fn parse_tuple(text: &str) -> Result<Vec<u32>> {
    let inner = text
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("bad exponent tuple `{text}`")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|e| {
            e.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad exponent `{e}`")))
        })
        .collect()
}

/// A polynomial read from a file together with its variable names.
#[derive(Debug, Clone)]
pub struct NamedPolynomial {
    pub polynomial: Polynomial,
    pub names: Vec<String>,
}

/// Reads either the canonical form or an infix expression.
///
/// Infix input may start with a `vars x1 x2 ...` line fixing the variable
/// order; otherwise variables are inferred as `x1..xn` then `y1..ym`.
pub fn parse_polynomial(text: &str) -> Result<NamedPolynomial> {
    let content: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let first = content
        .first()
        .ok_or_else(|| Error::Parse("empty polynomial input".into()))?;
    if first.starts_with("poly ") || *first == "poly" {
        let p = from_canonical(text)?;
        let names = super::monomial::default_names(p.num_vars());
        return Ok(NamedPolynomial { polynomial: p, names });
    }
    let (names, body): (Option<Vec<String>>, Vec<&str>) = match first.strip_prefix("vars") {
        Some(rest) => (
            Some(
                rest.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect(),
            ),
            content[1..].to_vec(),
        ),
        None => (None, content),
    };
    let expr = body.join(" ");
    parse_infix(&expr, names.as_deref())
}

pub fn parse_infix(text: &str, names: Option<&[String]>) -> Result<NamedPolynomial> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let ast = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse(format!(
            "unexpected token {:?}",
            parser.tokens[parser.pos]
        )));
    }
    let names = match names {
        Some(n) => n.to_vec(),
        None => infer_names(&ast),
    };
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let polynomial = eval(&ast, &index, names.len())?;
    Ok(NamedPolynomial { polynomial, names })
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(Scalar),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            tokens.push(Token::Num(scalar::parse_scalar(&s)?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            tokens.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            tokens.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(tokens)
}

#[derive(Debug)]
enum Ast {
    Num(Scalar),
    Var(String),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>),
    Pow(Box<Ast>, u32),
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
            } else if matches!(
                self.peek(),
                Some(Token::Num(_)) | Some(Token::Ident(_)) | Some(Token::Op('('))
            ) {
                // implicit multiplication: `3x1`, `2(x1+1)`, `x1 x2`
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.eat('-') {
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.tokens.get(self.pos).cloned() {
                Some(Token::Num(n)) if n.is_integer() && n >= Scalar::zero() => {
                    self.pos += 1;
                    let e: u32 = n
                        .to_integer()
                        .try_into()
                        .map_err(|_| Error::Parse("exponent too large".into()))?;
                    return Ok(Ast::Pow(Box::new(base), e));
                }
                other => return Err(Error::Parse(format!("bad exponent {other:?}"))),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                Ok(Ast::Num(n))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                Ok(Ast::Var(name))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

fn collect_vars<'a>(ast: &'a Ast, out: &mut Vec<&'a str>) {
    match ast {
        Ast::Num(_) => {}
        Ast::Var(v) => out.push(v),
        Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) | Ast::Div(a, b) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
        Ast::Neg(a) | Ast::Pow(a, _) => collect_vars(a, out),
    }
}

fn split_name(name: &str) -> (String, Option<usize>) {
    let digits_at = name
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_ascii_digit())
        .last()
        .map(|(i, _)| i);
    match digits_at {
        Some(i) if i > 0 => (name[..i].to_string(), name[i..].parse().ok()),
        _ => (name.to_string(), None),
    }
}

fn infer_names(ast: &Ast) -> Vec<String> {
    let mut seen = Vec::new();
    collect_vars(ast, &mut seen);
    let mut indexed: BTreeMap<String, usize> = BTreeMap::new();
    let mut plain: Vec<String> = Vec::new();
    for name in seen {
        match split_name(name) {
            (prefix, Some(k)) if k >= 1 => {
                let e = indexed.entry(prefix).or_insert(0);
                *e = (*e).max(k);
            }
            _ => {
                if !plain.iter().any(|p| p == name) {
                    plain.push(name.to_string());
                }
            }
        }
    }
    plain.sort();
    let rank = |p: &str| match p {
        "x" => 0,
        "y" => 1,
        _ => 2,
    };
    let mut prefixes: Vec<(String, usize)> = indexed.into_iter().collect();
    prefixes.sort_by(|a, b| rank(&a.0).cmp(&rank(&b.0)).then(a.0.cmp(&b.0)));
    let mut names: Vec<String> = prefixes
        .into_iter()
        .flat_map(|(p, k)| (1..=k).map(move |i| format!("{p}{i}")))
        .collect();
    names.extend(plain);
    names
}

fn eval(ast: &Ast, index: &BTreeMap<&str, usize>, n: usize) -> Result<Polynomial> {
    Ok(match ast {
        Ast::Num(c) => Polynomial::constant(n, c.clone()),
        Ast::Var(v) => {
            let i = *index
                .get(v.as_str())
                .ok_or_else(|| Error::Parse(format!("unknown variable `{v}`")))?;
            Polynomial::var(n, i)
        }
        Ast::Add(a, b) => &eval(a, index, n)? + &eval(b, index, n)?,
        Ast::Sub(a, b) => &eval(a, index, n)? - &eval(b, index, n)?,
        Ast::Mul(a, b) => &eval(a, index, n)? * &eval(b, index, n)?,
        Ast::Div(a, b) => {
            let d = eval(b, index, n)?;
            if d.degree() > 0 {
                return Err(Error::Parse("division by a non-constant".into()));
            }
            let c = d.coefficient(&Monomial::one(n));
            if c.is_zero() {
                return Err(Error::Parse("division by zero".into()));
            }
            eval(a, index, n)?.scale(&(Scalar::one() / c))
        }
        Ast::Neg(a) => -eval(a, index, n)?,
        Ast::Pow(a, e) => eval(a, index, n)?.pow(*e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::scalar::{int, ratio};

    #[test]
    fn canonical_round_trip_is_byte_stable() {
        let p = parse_infix("x1^4*x2^2 + x1^2*x2^4 - 3*x1^2*x2^2*x3^2 + x3^6", None)
            .unwrap()
            .polynomial;
        let text = to_canonical(&p);
        assert_eq!(text, "poly 3\n(4,2,0) 1/1\n(2,4,0) 1/1\n(2,2,2) -3/1\n(0,0,6) 1/1\n");
        assert_eq!(from_canonical(&text).unwrap(), p);
        assert_eq!(to_canonical(&from_canonical(&text).unwrap()), text);
    }

    #[test]
    fn infix_features() {
        let p = parse_infix("1/2(x1 - x2)^2 + 3x1 x2", None).unwrap();
        assert_eq!(p.names, vec!["x1", "x2"]);
        let q = &p.polynomial;
        assert_eq!(q.coefficient_of(&[2, 0]), ratio(1, 2));
        assert_eq!(q.coefficient_of(&[1, 1]), int(2));
        assert_eq!(q.coefficient_of(&[0, 2]), ratio(1, 2));
    }

    #[test]
    fn inferred_names_fill_gaps_and_put_x_first() {
        let p = parse_infix("y2*x3 + x1", None).unwrap();
        assert_eq!(p.names, vec!["x1", "x2", "x3", "y1", "y2"]);
    }

    #[test]
    fn explicit_vars_line() {
        let p = parse_polynomial("vars a b\na^2 - b").unwrap();
        assert_eq!(p.names, vec!["a", "b"]);
        assert_eq!(p.polynomial.coefficient_of(&[0, 1]), int(-1));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_infix("x1 +", None).is_err());
        assert!(parse_infix("x1 / x2", None).is_err());
        assert!(parse_infix("x1 $ 2", None).is_err());
        assert!(from_canonical("poly 2\n(1,0,0) 1/1\n").is_err());
    }
}
