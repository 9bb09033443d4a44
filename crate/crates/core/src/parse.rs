//! Text grammar for elements of `H`, `V` and `H^{⊗n} ⊗_H V`.
//!
//! ```text
//! hopf     := [sign] hterm (sign hterm)*        hterm := [num ['*']] (d[i,..] | 1) ('*' d[..])*
//! element  := [sign] term (sign term)*          term  := factor (['*'] factor)*
//! factor   := num | d[i,..] name | name | '(' element ')'
//! pseudo   := [sign] [num ['*']] '(' hopf ('|' hopf)* ')' '@' term  (sign ...)*
//! ```
//! Names are generators or central symbols, which are replaced by their values.
//! Errors carry the 1-based column of the offending token.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hmodule::{AlgebraElement, Module, PseudoTensor};
use crate::hopf::{HTensor, HopfAlgebra, HopfElement, MultiIndex};
use crate::Q;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Q),
    Ident(String),
    D(Vec<u32>),
    Star,
    Plus,
    Minus,
    LParen,
    RParen,
    Bar,
    At,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    end: usize,
}

fn lex(s: &str) -> Result<Lexer> {
    let chars: Vec<char> = s.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '*' => Some(Tok::Star),
            '+' => Some(Tok::Plus),
            '-' | '−' => Some(Tok::Minus),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '|' => Some(Tok::Bar),
            '@' => Some(Tok::At),
            _ => None,
        };
        if let Some(t) = single {
            toks.push((t, col));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let num: String = chars[start..i].iter().collect();
            let mut q = Q::from_integer(num.parse().map_err(|_| Error::Parse { col, msg: "bad number".into() })?);
            if i < chars.len() && chars[i] == '/' {
                i += 1;
                let s2 = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if s2 == i {
                    return Err(Error::Parse { col: i + 1, msg: "expected a denominator".into() });
                }
                let den: String = chars[s2..i].iter().collect();
                let den: num_bigint::BigInt = den.parse().unwrap();
                if den.is_zero() {
                    return Err(Error::Parse { col: s2 + 1, msg: "zero denominator".into() });
                }
                q /= Q::from_integer(den);
            }
            toks.push((Tok::Num(q), col));
            continue;
        }
        if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if word == "d" && i < chars.len() && chars[i] == '[' {
                i += 1;
                let s2 = i;
                while i < chars.len() && chars[i] != ']' {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(Error::Parse { col, msg: "unclosed `d[`".into() });
                }
                let inner: String = chars[s2..i].iter().collect();
                i += 1;
                let mut idx = Vec::new();
                for part in inner.split(',') {
                    let v = part
                        .trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse { col: s2 + 1, msg: format!("bad exponent `{}`", part.trim()) })?;
                    idx.push(v);
                }
                toks.push((Tok::D(idx), col));
            } else {
                toks.push((Tok::Ident(word), col));
            }
            continue;
        }
        return Err(Error::Parse { col, msg: format!("unexpected character `{c}`") });
    }
    Ok(Lexer { toks, end: chars.len() + 1 })
}

struct Parser<'a> {
    lx: Lexer,
    pos: usize,
    hopf: &'a HopfAlgebra,
    module: Option<&'a Module>,
    central: &'a BTreeMap<String, Q>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.lx.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.lx.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.lx.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { col: self.col(), msg: msg.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn done(&self) -> Result<()> {
        if self.pos < self.lx.toks.len() {
            self.err("unexpected trailing input")
        } else {
            Ok(())
        }
    }

    fn multi_index(&self, idx: Vec<u32>, col: usize) -> Result<MultiIndex> {
        let dim = self.hopf.dim();
        if idx.len() != dim {
            return Err(Error::Parse { col, msg: format!("multi-index has {} entries, expected {dim}", idx.len()) });
        }
        Ok(MultiIndex(idx))
    }

    fn sign(&mut self) -> Option<bool> {
        if self.eat(&Tok::Plus) {
            Some(false)
        } else if self.eat(&Tok::Minus) {
            Some(true)
        } else {
            None
        }
    }

    fn hopf_expr(&mut self) -> Result<HopfElement> {
        let mut out = HopfElement::zero();
        let mut neg = self.sign().unwrap_or(false);
        loop {
            let t = self.hopf_term()?;
            out = out.add(&if neg { t.neg() } else { t });
            match self.sign() {
                Some(n) => neg = n,
                None => return Ok(out),
            }
        }
    }

    fn hopf_term(&mut self) -> Result<HopfElement> {
        let dim = self.hopf.dim();
        let mut acc = HopfElement::one(dim);
        let mut any = false;
        loop {
            match self.peek().cloned() {
                Some(Tok::Num(q)) => {
                    self.pos += 1;
                    acc = acc.scale(&q);
                }
                Some(Tok::D(idx)) => {
                    let col = self.col();
                    self.pos += 1;
                    let m = self.multi_index(idx, col)?;
                    acc = self.hopf.mul(&acc, &HopfElement::mono(m));
                }
                _ if !any => return self.err("expected `d[..]` or a number"),
                _ => return Ok(acc),
            }
            any = true;
            self.eat(&Tok::Star);
        }
    }

    fn element_expr(&mut self) -> Result<AlgebraElement> {
        let mut out = AlgebraElement::zero();
        let mut neg = self.sign().unwrap_or(false);
        loop {
            let t = self.element_term()?;
            out = out.add(&if neg { t.scale(&-Q::one()) } else { t });
            match self.sign() {
                Some(n) => neg = n,
                None => return Ok(out),
            }
        }
    }

    fn element_term(&mut self) -> Result<AlgebraElement> {
        let module = self.module.expect("element parsing needs a module");
        let mut coef = Q::one();
        let mut factors: Vec<AlgebraElement> = Vec::new();
        loop {
            let col = self.col();
            match self.peek().cloned() {
                Some(Tok::Num(q)) => {
                    self.pos += 1;
                    coef *= q;
                }
                Some(Tok::D(idx)) => {
                    self.pos += 1;
                    let m = self.multi_index(idx, col)?;
                    let Some(Tok::Ident(name)) = self.peek().cloned() else {
                        return self.err("expected a generator after `d[..]`");
                    };
                    let Some(g) = module.generator(&name) else {
                        return self.err(format!("unknown generator `{name}`"));
                    };
                    self.pos += 1;
                    factors.push(AlgebraElement::atom(g, m));
                }
                Some(Tok::Ident(name)) => {
                    self.pos += 1;
                    if let Some(g) = module.generator(&name) {
                        factors.push(module.gen_element(g));
                    } else if let Some(v) = self.central.get(&name) {
                        coef *= v.clone();
                    } else {
                        return Err(Error::Parse { col, msg: format!("unknown symbol `{name}`") });
                    }
                }
                Some(Tok::LParen) => {
                    self.pos += 1;
                    factors.push(self.element_expr()?);
                    self.expect(&Tok::RParen, "`)`")?;
                }
                _ => {
                    if factors.is_empty() && self.pos > 0 && matches!(self.lx.toks[self.pos - 1].0, Tok::Num(_)) {
                        break;
                    }
                    return self.err("expected a factor");
                }
            }
            if !self.eat(&Tok::Star)
                && !matches!(self.peek(), Some(Tok::Num(_) | Tok::D(_) | Tok::Ident(_) | Tok::LParen))
            {
                break;
            }
        }
        let mut acc = AlgebraElement::one();
        if factors.len() == 1 {
            acc = factors.pop().unwrap();
        } else {
            for f in &factors {
                acc = module.multiply(&acc, f).map_err(|_| Error::Parse {
                    col: self.col(),
                    msg: "products need a symmetric algebra".into(),
                })?;
            }
        }
        Ok(acc.scale(&coef))
    }

    fn pseudo_expr(&mut self, arity: Option<usize>) -> Result<PseudoTensor> {
        let module = self.module.expect("pseudotensor parsing needs a module");
        if self.lx.toks.len() == 1 && self.lx.toks[0].0 == Tok::Num(Q::zero()) {
            self.pos = 1;
            return match arity {
                Some(a) => Ok(PseudoTensor::zero(a)),
                None => self.err("cannot infer the arity of 0"),
            };
        }
        let mut out: Option<PseudoTensor> = None;
        let mut neg = self.sign().unwrap_or(false);
        loop {
            let mut coef = if neg { -Q::one() } else { Q::one() };
            while let Some(Tok::Num(q)) = self.peek().cloned() {
                self.pos += 1;
                coef *= q;
                self.eat(&Tok::Star);
            }
            let col = self.col();
            self.expect(&Tok::LParen, "`(`")?;
            let mut slots = vec![self.hopf_expr()?];
            while self.eat(&Tok::Bar) {
                slots.push(self.hopf_expr()?);
            }
            self.expect(&Tok::RParen, "`)`")?;
            self.expect(&Tok::At, "`@`")?;
            let v = self.element_term()?;
            let n = slots.len();
            if let Some(a) = arity {
                if a != n {
                    return Err(Error::Parse { col, msg: format!("term has {n} slots, expected {a}") });
                }
            }
            let t = module.normalize(&HTensor::pure(&slots), &v.scale(&coef));
            match &mut out {
                None => out = Some(t),
                Some(acc) => {
                    if acc.arity() != n {
                        return Err(Error::Parse { col, msg: "terms have different numbers of slots".into() });
                    }
                    acc.add_assign(&t);
                }
            }
            match self.sign() {
                Some(n) => neg = n,
                None => return Ok(out.unwrap()),
            }
        }
    }
}

fn parser<'a>(s: &str, hopf: &'a HopfAlgebra, module: Option<&'a Module>, central: &'a BTreeMap<String, Q>) -> Result<Parser<'a>> {
    let lx = lex(s)?;
    if lx.toks.is_empty() {
        return Err(Error::Parse { col: 1, msg: "empty input".into() });
    }
    Ok(Parser { lx, pos: 0, hopf, module, central })
}

static NO_CENTRAL: std::sync::OnceLock<BTreeMap<String, Q>> = std::sync::OnceLock::new();

fn no_central() -> &'static BTreeMap<String, Q> {
    NO_CENTRAL.get_or_init(BTreeMap::new)
}

pub fn parse_hopf(hopf: &HopfAlgebra, s: &str) -> Result<HopfElement> {
    let mut p = parser(s, hopf, None, no_central())?;
    let h = p.hopf_expr()?;
    p.done()?;
    Ok(h)
}

pub fn parse_element(module: &Module, s: &str, central: &BTreeMap<String, Q>) -> Result<AlgebraElement> {
    let mut p = parser(s, module.hopf(), Some(module), central)?;
    if p.lx.toks.len() == 1 && p.lx.toks[0].0 == Tok::Num(Q::zero()) {
        return Ok(AlgebraElement::zero());
    }
    let v = p.element_expr()?;
    p.done()?;
    Ok(v)
}

/// Parse a sum of `c (h₁|…|hₙ) @ v` terms into normal form.
pub fn parse_pseudo(module: &Module, s: &str, central: &BTreeMap<String, Q>, arity: Option<usize>) -> Result<PseudoTensor> {
    let mut p = parser(s, module.hopf(), Some(module), central)?;
    let t = p.pseudo_expr(arity)?;
    p.done()?;
    Ok(t)
}

pub fn parse_rational(s: &str) -> Result<Q> {
    let lx = lex(s)?;
    match lx.toks.as_slice() {
        [(Tok::Num(q), _)] => Ok(q.clone()),
        [(Tok::Minus, _), (Tok::Num(q), _)] => Ok(-q.clone()),
        _ => Err(Error::Parse { col: 1, msg: format!("expected a rational number, got `{s}`") }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hmodule::{Generator, ModuleKind, ModuleSpec};
    use std::sync::Arc;

    fn module(n: usize) -> Module {
        Module::new(
            Arc::new(HopfAlgebra::abelian(n)),
            ModuleSpec {
                generators: vec![
                    Generator { name: "u".into(), odd: false },
                    Generator { name: "v".into(), odd: false },
                ],
                kind: ModuleKind::SymmetricAlgebra,
            },
        )
        .unwrap()
    }

    #[test]
    fn element_round_trip() {
        let m = module(2);
        let c = BTreeMap::new();
        let v = parse_element(&m, "3 * d[2,0] u * d[0,1] v - 1/2 u", &c).unwrap();
        assert_eq!(m.fmt_element(&v), "-1/2 * u + 3 * d[2,0] u * d[0,1] v");
        assert_eq!(parse_element(&m, &m.fmt_element(&v), &c).unwrap(), v);
    }

    #[test]
    fn pseudo_round_trip() {
        let m = module(1);
        let c = BTreeMap::new();
        let t = parse_pseudo(&m, "(d[1]|1) @ 1", &c, None).unwrap();
        assert_eq!(m.fmt_pseudo(&t), "(d[1]|1) @ 1");
        let t2 = parse_pseudo(&m, "(1|d[1]) @ u - 2 (d[2]|1) @ u * v", &c, None).unwrap();
        assert_eq!(parse_pseudo(&m, &m.fmt_pseudo(&t2), &c, None).unwrap(), t2);
    }

    #[test]
    fn errors_report_columns() {
        let m = module(1);
        let c = BTreeMap::new();
        assert_eq!(
            parse_element(&m, "u + w", &c),
            Err(Error::Parse { col: 5, msg: "unknown symbol `w`".into() })
        );
        assert!(matches!(parse_element(&m, "u + d[1,0] v", &c), Err(Error::Parse { col: 5, .. })));
        assert!(matches!(parse_pseudo(&m, "(1|1 @ u", &c, None), Err(Error::Parse { col: 6, .. })));
    }

    #[test]
    fn central_symbols_substitute() {
        let m = module(1);
        let mut c = BTreeMap::new();
        c.insert("K".to_string(), Q::from_integer(3.into()));
        let t = parse_pseudo(&m, "(1|1) @ K", &c, None).unwrap();
        assert_eq!(m.fmt_pseudo(&t), "3 (1|1) @ 1");
    }
}
