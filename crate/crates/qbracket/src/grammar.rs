//! Text syntax for partition functions.
//!
//! ```text
//! expr   := factor ('*' factor)*
//! factor := rational | NAME '(' ints [';' param (',' param)*] ')' | 'Todot' '[' expr (',' expr)* ']'
//! param  := [ident '='] rational
//! ```
//!
//! Names: `Q(k)`, `Q(k; a=p/q)`, `Q(k; m=3)`, `H(k)`, `H(k; t)`, `H(k; a=p/q)`,
//! `S(k)`, `S(k; a)`, `S(k; t=3)`, `T(k,l)`, `T(k,l; a,b)`, `T(k,l; s=2,t=3)`.

use crate::bracket::odot_all;
use crate::cyclotomic::CycQ;
use crate::families::{Family, FamilyError, PartitionFunction};
use crate::field::{fmt_rat, parse_rat, Rat};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("unexpected {found} at offset {at}, expected {expected}")]
    Unexpected { at: usize, found: String, expected: &'static str },
    #[error("bad parameters for {name}: {msg}")]
    Params { name: String, msg: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Const(Rat),
    Fam(Family),
    Odot(Vec<Expr>),
}

/// A product of factors.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr(pub Vec<Factor>);

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        let mut p = Parser { toks: tokenize(src)?, pos: 0 };
        let e = p.expr()?;
        match p.peek() {
            None => Ok(e),
            Some(t) => Err(p.unexpected(t.text.clone(), "end of input")),
        }
    }

    /// The partition function; ⊙-products are realized on partitions of size ≤ n.
    pub fn function(&self, n: u32) -> Result<PartitionFunction, FamilyError> {
        let mut scalar = Rat::from_integer(1.into());
        let mut parts = Vec::new();
        for f in &self.0 {
            match f {
                Factor::Const(c) => scalar *= c,
                Factor::Fam(fam) => parts.push(fam.function()?),
                Factor::Odot(es) => {
                    let fs = es.iter().map(|e| e.function(n)).collect::<Result<Vec<_>, _>>()?;
                    parts.push(odot_all(&fs, n)?);
                }
            }
        }
        let prod = PartitionFunction::product(&parts);
        let out = if scalar == Rat::from_integer(1.into()) { prod } else { PartitionFunction::linear_combination(&[(CycQ::from_rat(scalar), prod)]) };
        Ok(out.with_tag(self.to_string()))
    }

    /// Total weight (constants have weight 0).
    pub fn weight(&self) -> i64 {
        self.0
            .iter()
            .map(|f| match f {
                Factor::Const(_) => 0,
                Factor::Fam(fam) => fam.weight(),
                Factor::Odot(es) => es.iter().map(Expr::weight).sum(),
            })
            .sum()
    }

    /// Smallest level containing every shift.
    pub fn level(&self) -> u64 {
        use num_integer::Integer;
        self.0.iter().fold(1, |acc, f| match f {
            Factor::Const(_) => acc,
            Factor::Fam(fam) => acc.lcm(&fam.level()),
            Factor::Odot(es) => es.iter().fold(acc, |a, e| a.lcm(&e.level())),
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|x| match x {
                Factor::Const(c) => fmt_rat(c),
                Factor::Fam(fam) => fam.to_string(),
                Factor::Odot(es) => format!("Todot[{}]", es.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")),
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Ident,
    Num,
    Sym(char),
}

#[derive(Clone, Debug)]
struct Tok {
    kind: Kind,
    text: String,
    at: usize,
}

fn tokenize(src: &str) -> Result<Vec<Tok>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (at, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok { kind: Kind::Ident, text: chars[start..i].iter().map(|x| x.1).collect(), at });
        } else if c.is_ascii_digit() || c == '-' {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '/') {
                i += 1;
            }
            out.push(Tok { kind: Kind::Num, text: chars[start..i].iter().map(|x| x.1).collect(), at });
        } else if "()[],;=*".contains(c) {
            out.push(Tok { kind: Kind::Sym(c), text: c.to_string(), at });
            i += 1;
        } else {
            return Err(ParseError::Unexpected { at, found: format!("'{c}'"), expected: "a name, number or delimiter" });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

struct Params {
    ints: Vec<i64>,
    named: Vec<(Option<String>, Rat)>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn end_offset(&self) -> usize {
        self.toks.last().map(|t| t.at + t.text.len()).unwrap_or(0)
    }

    fn unexpected(&self, found: String, expected: &'static str) -> ParseError {
        let at = self.peek().map(|t| t.at).unwrap_or_else(|| self.end_offset());
        ParseError::Unexpected { at, found, expected }
    }

    fn next(&mut self, expected: &'static str) -> Result<Tok, ParseError> {
        match self.toks.get(self.pos).cloned() {
            Some(t) => {
                self.pos += 1;
                Ok(t)
            }
            None => Err(self.unexpected("end of input".into(), expected)),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek().is_some_and(|t| t.kind == Kind::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char, expected: &'static str) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.peek().map(|t| t.text.clone()).unwrap_or_else(|| "end of input".into());
            Err(self.unexpected(found, expected))
        }
    }

    fn number(&mut self) -> Result<Rat, ParseError> {
        let t = self.next("a number")?;
        if t.kind != Kind::Num {
            self.pos -= 1;
            return Err(self.unexpected(t.text, "a number"));
        }
        parse_rat(&t.text).ok_or(ParseError::Unexpected { at: t.at, found: t.text, expected: "a rational p/q" })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut fs = vec![self.factor()?];
        while self.eat('*') {
            fs.push(self.factor()?);
        }
        Ok(Expr(fs))
    }

    fn factor(&mut self) -> Result<Factor, ParseError> {
        let t = self.next("a factor")?;
        match t.kind {
            Kind::Num => {
                self.pos -= 1;
                Ok(Factor::Const(self.number()?))
            }
            Kind::Ident if t.text == "Todot" => {
                self.expect('[', "'['")?;
                let mut es = vec![self.expr()?];
                while self.eat(',') {
                    es.push(self.expr()?);
                }
                self.expect(']', "']' or ','")?;
                Ok(Factor::Odot(es))
            }
            Kind::Ident => {
                self.expect('(', "'('")?;
                let params = self.params()?;
                self.expect(')', "')'")?;
                Ok(Factor::Fam(family(&t.text, params)?))
            }
            Kind::Sym(_) => {
                self.pos -= 1;
                Err(self.unexpected(t.text, "a factor"))
            }
        }
    }

    fn params(&mut self) -> Result<Params, ParseError> {
        let mut ints = Vec::new();
        loop {
            let r = self.number()?;
            if !r.is_integer() {
                return Err(self.unexpected(fmt_rat(&r), "an integer index"));
            }
            ints.push(r.to_integer().try_into().map_err(|_| self.unexpected(fmt_rat(&r), "a small integer"))?);
            if !self.eat(',') {
                break;
            }
        }
        let mut named = Vec::new();
        if self.eat(';') {
            loop {
                let key = if self.peek().is_some_and(|t| t.kind == Kind::Ident) {
                    let k = self.next("a name")?.text;
                    self.expect('=', "'='")?;
                    Some(k)
                } else {
                    None
                };
                named.push((key, self.number()?));
                if !self.eat(',') {
                    break;
                }
            }
        }
        Ok(Params { ints, named })
    }
}

fn family(name: &str, p: Params) -> Result<Family, ParseError> {
    let err = |msg: &str| ParseError::Params { name: name.to_string(), msg: msg.to_string() };
    let as_int = |r: &Rat| -> Result<i64, ParseError> {
        if r.is_integer() {
            r.to_integer().try_into().map_err(|_| err("integer out of range"))
        } else {
            Err(err("expected an integer parameter"))
        }
    };
    let keys: Vec<Option<&str>> = p.named.iter().map(|(k, _)| k.as_deref()).collect();
    let vals: Vec<&Rat> = p.named.iter().map(|(_, v)| v).collect();
    let fam = match (name, p.ints.as_slice(), keys.as_slice()) {
        ("Q", [k], []) => Family::q(*k),
        ("Q", [k], [None | Some("a")]) => Family::qa(*k, vals[0].clone()),
        ("Q", [k], [Some("m")]) => Family::Qm { k: *k, m: as_int(vals[0])? },
        ("H", [k], []) => Family::h(*k),
        ("H", [k], [None | Some("t")]) => Family::Ht { k: *k, t: as_int(vals[0])? },
        ("H", [k], [Some("a")]) => Family::H { k: *k, a: vals[0].clone() },
        ("S", [k], []) => Family::s(*k),
        ("S", [k], [None | Some("a")]) => Family::S { k: *k, a: vals[0].clone() },
        ("S", [k], [Some("t")]) => Family::St { k: *k, t: as_int(vals[0])? },
        ("T", [k, l], []) => Family::t(*k, *l),
        ("T", [k, l], [None | Some("a"), None | Some("b")]) => Family::T { k: *k, l: *l, a: vals[0].clone(), b: vals[1].clone() },
        ("T", [k, l], [Some("s"), Some("t")]) => Family::Tst { k: *k, l: *l, s: as_int(vals[0])?, t: as_int(vals[1])? },
        ("Q" | "H" | "S" | "T", _, _) => return Err(err("wrong number or kind of parameters")),
        _ => return Err(err("unknown family")),
    };
    fam.validate().map_err(|e| err(&e.to_string()))?;
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::qbracket;
    use crate::field::{rat, rat_int};
    use crate::qseries::QSeries;

    #[test]
    fn parses_the_documented_forms() {
        assert_eq!(Expr::parse("Q(2)").unwrap(), Expr(vec![Factor::Fam(Family::q(2))]));
        assert_eq!(Expr::parse("Q(3; a=1/3)").unwrap(), Expr(vec![Factor::Fam(Family::qa(3, rat(1, 3)))]));
        assert_eq!(Expr::parse("Q(3; 1/3)").unwrap(), Expr::parse("Q(3; a=1/3)").unwrap());
        assert_eq!(Expr::parse("H(4; 2)").unwrap(), Expr(vec![Factor::Fam(Family::Ht { k: 4, t: 2 })]));
        assert_eq!(Expr::parse("S(3; 1/2)").unwrap(), Expr(vec![Factor::Fam(Family::S { k: 3, a: rat(1, 2) })]));
        assert_eq!(
            Expr::parse("T(1,2; 1/2, 1/3)").unwrap(),
            Expr(vec![Factor::Fam(Family::T { k: 1, l: 2, a: rat(1, 2), b: rat(1, 3) })])
        );
        let e = Expr::parse("2 * Q(2)*Todot[T(1,1), T(1,1)]").unwrap();
        assert_eq!(e.0.len(), 3);
        assert_eq!(e.weight(), 6);
        assert_eq!(Expr::parse("Q(2; a=1/6)*Q(1; a=1/4)").unwrap().level(), 12);
    }

    #[test]
    fn reports_errors() {
        for bad in ["", "Q(", "Q(2", "Q(2)*", "Z(2)", "Q(1/2)", "T(1)", "H(1)", "Q(2)#", "Todot[Q(2)"] {
            assert!(Expr::parse(bad).is_err(), "{bad}");
        }
        assert!(matches!(Expr::parse("Q(2) Q(3)"), Err(ParseError::Unexpected { at: 5, .. })));
    }

    #[test]
    fn evaluates_brackets() {
        let s = qbracket(&Expr::parse("Q(2)").unwrap().function(4).unwrap(), 4).unwrap();
        let expect = QSeries::from_rats(&[rat(-1, 24), rat_int(1), rat_int(3), rat_int(4), rat_int(7)]);
        assert_eq!(s, expect);
        let one = qbracket(&Expr::parse("1").unwrap().function(3).unwrap(), 3).unwrap();
        assert_eq!(one, QSeries::one().truncate_int(4));
    }
}
