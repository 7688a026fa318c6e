//! Expression and problem-file parsing, plus canonical JSON reports.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | atom ('^' nat)?
//! atom   := nat ('/' nat)? | 'i' | var | 'e{' idx (',' idx)* '}' | '(' expr ')'
//! ```
//!
//! `*` is the wedge product, so `(v1^2)*e{1,2}` is a 2-vector. Every
//! diagnostic carries the byte offset into the original input and its line.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::cyclic::CyclicAction;
use crate::fdalg::{RingPresentation, Rule};
use crate::polyvec::{FormIndex, Polyvector};
use crate::scalar::{Field, Scalar};
use crate::series::{Monomial, SeriesContext, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax { expected: String, found: String },
    UnknownVariable(String),
    DegreeOverflow { degree: u32, trunc: u32 },
    FieldMismatch,
    Validation(String),
}

/// A diagnostic anchored at a byte offset and 1-based line.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
    pub line: usize,
}

impl ParseError {
    pub fn tag(&self) -> &'static str {
        match self.kind {
            ParseErrorKind::Syntax { .. } => "SyntaxError",
            ParseErrorKind::UnknownVariable(_) => "UnknownVariable",
            ParseErrorKind::DegreeOverflow { .. } => "DegreeOverflow",
            ParseErrorKind::FieldMismatch => "FieldMismatch",
            ParseErrorKind::Validation(_) => "ValidationError",
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at line {}, byte {}: ", self.tag(), self.line, self.offset)?;
        match &self.kind {
            ParseErrorKind::Syntax { expected, found } => write!(f, "expected {expected}, found {found}"),
            ParseErrorKind::UnknownVariable(v) => write!(f, "unknown variable `{v}`"),
            ParseErrorKind::DegreeOverflow { degree, trunc } => {
                write!(f, "monomial of degree {degree} exceeds truncation {trunc}")
            }
            ParseErrorKind::FieldMismatch => f.write_str("`i` requires field QI"),
            ParseErrorKind::Validation(m) => f.write_str(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Form(Vec<usize>),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(n) => write!(f, "number `{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Form(_) => f.write_str("form atom"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

/// Maps offsets within a fragment back to the enclosing document.
#[derive(Clone, Copy)]
struct Anchor<'a> {
    doc: &'a str,
    base: usize,
}

impl Anchor<'_> {
    fn err(&self, kind: ParseErrorKind, local: usize) -> ParseError {
        let offset = self.base + local;
        let line = self.doc.as_bytes()[..offset.min(self.doc.len())].iter().filter(|&&b| b == b'\n').count() + 1;
        ParseError { kind, offset, line }
    }

    fn syntax(&self, expected: &str, found: &Tok, local: usize) -> ParseError {
        self.err(ParseErrorKind::Syntax { expected: expected.into(), found: found.to_string() }, local)
    }
}

fn tokenize(text: &str, anchor: Anchor) -> Result<Vec<(Tok, usize)>, ParseError> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, i)),
            b'-' => out.push((Tok::Minus, i)),
            b'*' => out.push((Tok::Star, i)),
            b'^' => out.push((Tok::Caret, i)),
            b'/' => out.push((Tok::Slash, i)),
            b'(' => out.push((Tok::LParen, i)),
            b')' => out.push((Tok::RParen, i)),
            b'0'..=b'9' => {
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                out.push((Tok::Num(n), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                if word == "e" && b.get(i) == Some(&b'{') {
                    let close = text[i..].find('}').ok_or_else(|| {
                        anchor.err(ParseErrorKind::Syntax { expected: "`}`".into(), found: "end of input".into() }, i)
                    })?;
                    let inner = &text[i + 1..i + close];
                    let mut idx = Vec::new();
                    for part in inner.split(',') {
                        let v: usize = part.trim().parse().map_err(|_| {
                            anchor.err(
                                ParseErrorKind::Syntax {
                                    expected: "form index".into(),
                                    found: format!("`{}`", part.trim()),
                                },
                                i + 1,
                            )
                        })?;
                        idx.push(v);
                    }
                    out.push((Tok::Form(idx), start));
                    i += close + 1;
                    continue;
                }
                out.push((Tok::Ident(word.to_string()), start));
                continue;
            }
            _ => {
                return Err(anchor.err(
                    ParseErrorKind::Syntax { expected: "expression".into(), found: format!("`{}`", c as char) },
                    i,
                ))
            }
        }
        i += 1;
    }
    out.push((Tok::End, b.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    names: &'a [String],
    ctx: SeriesContext,
    wide: SeriesContext,
    anchor: Anchor<'a>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn at(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn check_degree(&self, p: &Polyvector, at: usize) -> Result<(), ParseError> {
        if let Some(d) = p.components().values().filter_map(|s| s.max_degree()).max() {
            if d > self.ctx.trunc {
                return Err(self.anchor.err(ParseErrorKind::DegreeOverflow { degree: d, trunc: self.ctx.trunc }, at));
            }
        }
        Ok(())
    }

    fn product(&self, a: &Polyvector, b: &Polyvector, at: usize) -> Result<Polyvector, ParseError> {
        let p = a.wedge(b).expect("same context");
        self.check_degree(&p, at)?;
        Ok(p)
    }

    fn expr(&mut self) -> Result<Polyvector, ParseError> {
        let mut neg = false;
        match self.peek() {
            Tok::Minus => {
                self.bump();
                neg = true;
            }
            Tok::Plus => {
                self.bump();
            }
            _ => {}
        }
        let first = self.term()?;
        let mut acc = if neg { first.neg() } else { first };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?).expect("same context");
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?).expect("same context");
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polyvector, ParseError> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            let at = self.at();
            self.bump();
            let rhs = self.factor()?;
            acc = self.product(&acc, &rhs, at)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polyvector, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let at = self.at();
        self.bump();
        let e_at = self.at();
        let e = match self.bump() {
            Tok::Num(n) => n,
            t => return Err(self.anchor.syntax("exponent", &t, e_at)),
        };
        // overflow surfaces in `product` after at most D+1 factors; the cap
        // only bounds work for constant bases
        let e: u32 = match u32::try_from(&e) {
            Ok(e) if e <= 10_000 => e,
            _ => {
                let degree = u32::try_from(&e).unwrap_or(u32::MAX);
                return Err(self.anchor.err(ParseErrorKind::DegreeOverflow { degree, trunc: self.ctx.trunc }, at));
            }
        };
        let mut acc = Polyvector::function(TruncatedSeries::one(self.wide));
        for _ in 0..e {
            acc = self.product(&acc, &base, at)?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Polyvector, ParseError> {
        let at = self.at();
        match self.bump() {
            Tok::Num(n) => {
                let mut r = BigRational::from_integer(n);
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let d_at = self.at();
                    match self.bump() {
                        Tok::Num(d) if !d.is_zero() => r /= BigRational::from_integer(d),
                        t => return Err(self.anchor.syntax("nonzero denominator", &t, d_at)),
                    }
                }
                Ok(Polyvector::function(TruncatedSeries::constant(self.wide, Scalar::from_rational(r))))
            }
            Tok::Ident(name) => {
                if let Some(i) = self.names.iter().position(|n| *n == name) {
                    return Ok(Polyvector::function(TruncatedSeries::var(self.wide, i)));
                }
                if name == "i" {
                    if self.ctx.field != Field::QI {
                        return Err(self.anchor.err(ParseErrorKind::FieldMismatch, at));
                    }
                    return Ok(Polyvector::function(TruncatedSeries::constant(self.wide, Scalar::i())));
                }
                Err(self.anchor.err(ParseErrorKind::UnknownVariable(name), at))
            }
            Tok::Form(idx) => {
                let n = self.ctx.num_vars;
                if idx.iter().any(|&i| i == 0 || i > n) || idx.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(self.anchor.err(
                        ParseErrorKind::Validation(format!("form indices must be strictly increasing in 1..{n}")),
                        at,
                    ));
                }
                let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
                Ok(Polyvector::basis(self.wide, FormIndex::from_indices(&zero_based).expect("distinct")))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                let c_at = self.at();
                match self.bump() {
                    Tok::RParen => Ok(inner),
                    t => Err(self.anchor.syntax("`)`", &t, c_at)),
                }
            }
            t => Err(self.anchor.syntax("number, variable, `i`, form or `(`", &t, at)),
        }
    }
}

fn parse_fragment(text: &str, names: &[String], ctx: SeriesContext, anchor: Anchor) -> Result<Polyvector, ParseError> {
    let toks = tokenize(text, anchor)?;
    let wide = ctx.with_trunc(ctx.trunc.saturating_mul(2));
    let mut p = Parser { toks, pos: 0, names, ctx, wide, anchor };
    let v = p.expr()?;
    if *p.peek() != Tok::End {
        let t = p.peek().clone();
        return Err(anchor.syntax("operator or end of input", &t, p.at()));
    }
    Ok(v.retruncate(ctx))
}

/// Parses a polyvector expression; variable names default to `v1..vn`.
pub fn parse_polyvector_named(text: &str, names: &[String], ctx: SeriesContext) -> Result<Polyvector, ParseError> {
    parse_fragment(text, names, ctx, Anchor { doc: text, base: 0 })
}

pub fn parse_polyvector(text: &str, ctx: SeriesContext) -> Result<Polyvector, ParseError> {
    parse_polyvector_named(text, &crate::series::default_names(ctx.num_vars), ctx)
}

fn as_function(p: Polyvector, anchor: Anchor, at: usize) -> Result<TruncatedSeries, ParseError> {
    if p.components().keys().any(|i| *i != FormIndex::EMPTY) {
        return Err(anchor.err(ParseErrorKind::Validation("expected a function, found form components".into()), at));
    }
    Ok(p.get(FormIndex::EMPTY))
}

pub fn parse_poly_named(text: &str, names: &[String], ctx: SeriesContext) -> Result<TruncatedSeries, ParseError> {
    let anchor = Anchor { doc: text, base: 0 };
    as_function(parse_fragment(text, names, ctx, anchor)?, anchor, 0)
}

/// Parses a series expression in the variables `v1..vn`.
pub fn parse_poly(text: &str, ctx: SeriesContext) -> Result<TruncatedSeries, ParseError> {
    parse_poly_named(text, &crate::series::default_names(ctx.num_vars), ctx)
}

fn parse_lincomb_at(text: &str, anchor: Anchor) -> Result<Vec<(Scalar, String)>, ParseError> {
    let toks = tokenize(text, anchor)?;
    let mut out = Vec::new();
    let mut k = 0;
    let mut first = true;
    loop {
        let mut sign = Scalar::one();
        match &toks[k].0 {
            Tok::Plus if !first => k += 1,
            Tok::Minus => {
                sign = Scalar::from_int(-1);
                k += 1;
            }
            Tok::End if !first => break,
            _ if first => {}
            t => return Err(anchor.syntax("`+` or `-`", t, toks[k].1)),
        }
        first = false;
        let mut coef = sign;
        let mut label = None;
        if let Tok::Num(n) = &toks[k].0 {
            let mut r = BigRational::from_integer(n.clone());
            k += 1;
            if toks[k].0 == Tok::Slash {
                match &toks[k + 1].0 {
                    Tok::Num(d) if !d.is_zero() => r /= BigRational::from_integer(d.clone()),
                    t => return Err(anchor.syntax("nonzero denominator", t, toks[k + 1].1)),
                }
                k += 2;
            }
            coef = &coef * &Scalar::from_rational(r);
            if toks[k].0 == Tok::Star {
                k += 1;
            } else {
                label = Some("1".to_string());
            }
        }
        if label.is_none() {
            match &toks[k].0 {
                Tok::Ident(s) => label = Some(s.clone()),
                t => return Err(anchor.syntax("basis label", t, toks[k].1)),
            }
            k += 1;
        }
        let label = label.expect("set above");
        if !coef.is_zero() {
            out.push((coef, label));
        }
        if toks[k].0 == Tok::End {
            break;
        }
    }
    Ok(out)
}

/// Parses `c1*label + c2*label - …` (a bare number means a multiple of `1`).
pub fn parse_lincomb(text: &str) -> Result<Vec<(Scalar, String)>, ParseError> {
    parse_lincomb_at(text, Anchor { doc: text, base: 0 })
}

/// Parses a constant such as `3/2`, `-i` or `1/2+1/3*i`.
pub fn parse_scalar(text: &str, field: Field) -> Result<Scalar, ParseError> {
    let ctx = SeriesContext::new(1, 0, field);
    let f = parse_poly_named(text, &["v1".to_string()], ctx)?;
    Ok(f.coeff(&Monomial::one(1)))
}

/// A validated problem file.
#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub names: Vec<String>,
    pub field: Field,
    pub ctx: Option<SeriesContext>,
    pub group: Option<CyclicAction>,
    pub w: Option<TruncatedSeries>,
    pub eta: Option<Polyvector>,
    pub ring: Option<RingPresentation>,
    pub digest: String,
}

/// Hex SHA-256 of the input bytes.
pub fn digest(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

struct Line<'a> {
    start: usize,
    text: &'a str,
}

fn split_words<'a>(line: &Line<'a>) -> Vec<(usize, &'a str)> {
    let mut out = Vec::new();
    let mut off = 0;
    for w in line.text.split_whitespace() {
        let pos = line.text[off..].find(w).expect("word present") + off;
        out.push((line.start + pos, w));
        off = pos + w.len();
    }
    out
}

/// Parses a problem file; `trunc_override` replaces the `trunc` directive.
pub fn parse_problem_with(bytes: &[u8], trunc_override: Option<u32>) -> Result<ProblemFile, ParseError> {
    let doc = std::str::from_utf8(bytes).map_err(|e| ParseError {
        kind: ParseErrorKind::Validation("input is not UTF-8".into()),
        offset: e.valid_up_to(),
        line: bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1,
    })?;
    let root = Anchor { doc, base: 0 };
    let mut lines = Vec::new();
    let mut start = 0;
    for raw in doc.split('\n') {
        let body = raw.split('#').next().unwrap_or("");
        if !body.trim().is_empty() {
            lines.push(Line { start, text: body });
        }
        start += raw.len() + 1;
    }
    let syntax = |what: &str, found: &str, at: usize| {
        root.err(ParseErrorKind::Syntax { expected: what.into(), found: found.into() }, at)
    };
    let validation = |msg: String, at: usize| root.err(ParseErrorKind::Validation(msg), at);

    let mut names: Option<(Vec<String>, usize)> = None;
    let mut field: Option<Field> = None;
    let mut trunc: Option<(u32, usize)> = None;
    let mut group: Option<(u32, Vec<u32>, usize)> = None;
    let mut w_src: Option<(usize, &str)> = None;
    let mut eta_src: Option<(usize, &str)> = None;
    let mut ring = RingPresentation::default();
    let mut ring_seen = false;
    let mut ring_rules: Vec<(usize, &str)> = Vec::new();
    let mut ring_c1: Option<(usize, &str)> = None;
    let mut basis_seen = false;
    let mut degrees_seen: Option<usize> = None;

    for line in &lines {
        let words = split_words(line);
        let (kw_at, kw) = words[0];
        let dup = |seen: bool| {
            if seen {
                Err(syntax("a single occurrence", &format!("repeated `{kw}`"), kw_at))
            } else {
                Ok(())
            }
        };
        let rest_of = |after: usize| -> (usize, &str) {
            let off = after - line.start;
            (after, &line.text[off..])
        };
        match kw {
            "vars" => {
                dup(names.is_some())?;
                let vs: Vec<String> = words[1..].iter().map(|(_, w)| w.to_string()).collect();
                if vs.is_empty() {
                    return Err(syntax("variable names", "end of line", kw_at + kw.len()));
                }
                for (k, (at, v)) in words[1..].iter().enumerate() {
                    let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                        && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                    if !ok || *v == "i" || *v == "e" {
                        return Err(validation(format!("`{v}` cannot be used as a variable name"), *at));
                    }
                    if vs[..k].contains(&v.to_string()) {
                        return Err(validation(format!("variable `{v}` declared twice"), *at));
                    }
                }
                names = Some((vs, kw_at));
            }
            "field" => {
                dup(field.is_some())?;
                field = Some(match words.get(1).map(|w| w.1) {
                    Some("Q") if words.len() == 2 => Field::Q,
                    Some("QI") if words.len() == 2 => Field::QI,
                    other => {
                        let at = words.get(1).map_or(kw_at, |w| w.0);
                        return Err(syntax("`Q` or `QI`", other.unwrap_or("end of line"), at));
                    }
                });
            }
            "trunc" => {
                dup(trunc.is_some())?;
                let (at, v) = *words.get(1).ok_or_else(|| syntax("truncation order", "end of line", kw_at))?;
                let d: u32 = v.parse().map_err(|_| syntax("positive integer", v, at))?;
                if d == 0 || words.len() > 2 {
                    return Err(syntax("a single positive integer", v, at));
                }
                trunc = Some((d, at));
            }
            "group" => {
                dup(group.is_some())?;
                let shape = words.get(1).map(|w| w.1) == Some("cyclic") && words.get(3).map(|w| w.1) == Some("weights");
                if !shape {
                    return Err(syntax("`group cyclic <n> weights <w...>`", line.text.trim(), kw_at));
                }
                let (at, n) = words[2];
                let n: u32 = n.parse().map_err(|_| syntax("group order", n, at))?;
                let mut ws = Vec::new();
                for (at, w) in &words[4..] {
                    ws.push(w.parse::<u32>().map_err(|_| syntax("integer weight", w, *at))?);
                }
                group = Some((n, ws, kw_at));
            }
            "W" | "eta" => {
                let (eq_at, eq) = *words.get(1).ok_or_else(|| syntax("`=`", "end of line", kw_at))?;
                if eq != "=" && !eq.starts_with('=') {
                    return Err(syntax("`=`", eq, eq_at));
                }
                let src = rest_of(eq_at + 1);
                if kw == "W" {
                    dup(w_src.is_some())?;
                    w_src = Some(src);
                } else {
                    dup(eta_src.is_some())?;
                    eta_src = Some(src);
                }
            }
            "ring" => {
                ring_seen = true;
                let (at, sub) = *words.get(1).ok_or_else(|| syntax("ring directive", "end of line", kw_at))?;
                match sub {
                    "basis" => {
                        dup(basis_seen)?;
                        basis_seen = true;
                        ring.labels = words[2..].iter().map(|w| w.1.to_string()).collect();
                    }
                    "degrees" => {
                        dup(degrees_seen.is_some())?;
                        degrees_seen = Some(at);
                        for (at, d) in &words[2..] {
                            ring.degrees.push(d.parse::<u8>().map_err(|_| syntax("degree 0 or 1", d, *at))? % 2);
                        }
                    }
                    "rule" => ring_rules.push(rest_of(at + sub.len())),
                    "c1" => {
                        dup(ring_c1.is_some())?;
                        let (eq_at, eq) = *words.get(2).ok_or_else(|| syntax("`=`", "end of line", at))?;
                        if !eq.starts_with('=') {
                            return Err(syntax("`=`", eq, eq_at));
                        }
                        ring_c1 = Some(rest_of(eq_at + 1));
                    }
                    "strict" => ring.strict = true,
                    other => return Err(syntax("basis, degrees, rule, c1 or strict", other, at)),
                }
            }
            other => return Err(syntax("directive", &format!("`{other}`"), kw_at)),
        }
    }

    let needs_ctx = names.is_some() || w_src.is_some() || eta_src.is_some() || group.is_some();
    let mut ctx = None;
    let field = field.unwrap_or(Field::Q);
    let mut out_names = Vec::new();
    if needs_ctx {
        let (vs, _) = names.clone().ok_or_else(|| syntax("`vars` line", "missing directive", doc.len()))?;
        let d = match (trunc_override, trunc) {
            (Some(d), _) => d,
            (None, Some((d, _))) => d,
            (None, None) => return Err(syntax("`trunc` line", "missing directive", doc.len())),
        };
        if d == 0 {
            return Err(validation("truncation order must be positive".into(), doc.len()));
        }
        ctx = Some(SeriesContext::new(vs.len(), d, field));
        out_names = vs;
    }
    let group = match group {
        Some((n, ws, at)) => {
            if ws.len() != out_names.len() {
                return Err(validation(
                    format!("group has {} weights but {} variables are declared", ws.len(), out_names.len()),
                    at,
                ));
            }
            Some(CyclicAction::new(n, ws).map_err(|e| validation(e.to_string(), at))?)
        }
        None => None,
    };
    let parse_at = |(at, src): (usize, &str)| -> Result<Polyvector, ParseError> {
        parse_fragment(src, &out_names, ctx.expect("context when expressions exist"), Anchor { doc, base: at })
    };
    let w = match w_src {
        Some(s) => Some(as_function(parse_at(s)?, root, s.0)?),
        None => None,
    };
    let eta = match eta_src {
        Some(s) => {
            let p = parse_at(s)?;
            if !p.is_zero() && p.form_degree() != Some(2) {
                return Err(validation("eta must be a 2-form".into(), s.0));
            }
            Some(p)
        }
        None => None,
    };
    let ring = if ring_seen {
        if !basis_seen {
            return Err(syntax("`ring basis` line", "missing directive", doc.len()));
        }
        if degrees_seen.is_none() {
            ring.degrees = vec![0; ring.labels.len()];
        } else if ring.degrees.len() != ring.labels.len() {
            return Err(validation("ring degrees and basis differ in length".into(), degrees_seen.unwrap_or(0)));
        }
        for (at, src) in ring_rules {
            let (lhs, rhs) = src.split_once('=').ok_or_else(|| syntax("`a*b = ...`", src.trim(), at))?;
            let eq_at = at + lhs.len() + 1;
            let mut factors = lhs.split('*').map(str::trim);
            let (Some(l), Some(r), None) = (factors.next(), factors.next(), factors.next()) else {
                return Err(syntax("`a*b`", lhs.trim(), at));
            };
            let anchor = Anchor { doc, base: eq_at };
            let terms = parse_lincomb_at(rhs, anchor)?;
            for lab in [l, r].into_iter().chain(terms.iter().map(|t| t.1.as_str())) {
                if !ring.labels.iter().any(|x| x == lab) {
                    return Err(validation(format!("unknown basis label `{lab}`"), at));
                }
            }
            ring.rules.push(Rule { left: l.into(), right: r.into(), rhs: terms });
        }
        if let Some((at, src)) = ring_c1 {
            ring.c1 = Some(parse_lincomb_at(src, Anchor { doc, base: at })?);
        }
        Some(ring)
    } else {
        None
    };
    Ok(ProblemFile { names: out_names, field, ctx, group, w, eta, ring, digest: digest(bytes) })
}

pub fn parse_problem(bytes: &[u8]) -> Result<ProblemFile, ParseError> {
    parse_problem_with(bytes, None)
}

/// Canonical report document. Keys are kept sorted by `serde_json::Map`, so
/// serialization is byte-stable.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, input_digest: &str) -> Self {
        let mut r = Report::default();
        r.set("command", json!(command));
        r.set("input_digest", json!(input_digest));
        r
    }

    pub fn set(&mut self, key: &str, v: Value) {
        self.fields.insert(key.to_string(), v);
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.fields)
    }

    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&Value::Object(self.fields.clone())).expect("json");
        s.push('\n');
        s
    }
}

pub fn scalar_json(s: &Scalar) -> Value {
    Value::String(s.to_string())
}

pub fn series_json(f: &TruncatedSeries, names: &[String]) -> Value {
    Value::String(f.render(names))
}

pub fn polyvector_json(p: &Polyvector, names: &[String]) -> Value {
    Value::String(p.render(names))
}

/// Canonical text for a monomial with coefficient 1.
pub fn monomial_json(m: &Monomial, names: &[String]) -> Value {
    Value::String(m.render(names))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> SeriesContext {
        SeriesContext::rational(3, 12)
    }

    #[test]
    fn parses_q_genus_two() {
        let q = parse_poly("-1*v1*v2*v3 + v1^5 + v2^5 + v3^5", ctx()).unwrap();
        assert_eq!(q.to_string(), "-v1*v2*v3 + v1^5 + v2^5 + v3^5");
        assert!(parse_poly("0", ctx()).unwrap().is_zero());
    }

    #[test]
    fn error_kinds() {
        let e = parse_poly("v1^13", ctx()).unwrap_err();
        assert_eq!(e.tag(), "DegreeOverflow");
        let e = parse_poly("v1 + w", ctx()).unwrap_err();
        assert_eq!((e.tag(), e.offset), ("UnknownVariable", 5));
        let e = parse_poly("2*i*v1", ctx()).unwrap_err();
        assert_eq!((e.tag(), e.offset), ("FieldMismatch", 2));
        let e = parse_poly("v1 + (v2", ctx()).unwrap_err();
        assert_eq!(e.tag(), "SyntaxError");
        let e = parse_poly("1/0", ctx()).unwrap_err();
        assert_eq!(e.tag(), "SyntaxError");
    }

    #[test]
    fn forms_and_gaussian() {
        let p = parse_polyvector("(v1^2)*e{1,2} - v3*e{3}", ctx()).unwrap();
        assert_eq!(p.render(&crate::series::default_names(3)), "(-v3)*e{3} + (v1^2)*e{1,2}");
        let qi = ctx().with_field(Field::QI);
        let f = parse_poly("(1+i)*v1 - i*v2", qi).unwrap();
        assert_eq!(f.to_string(), "(1+i)*v1 - i*v2");
    }

    #[test]
    fn lincomb() {
        let t = parse_lincomb("1/4*h3 - 4*h").unwrap();
        assert_eq!(t, vec![(Scalar::frac(1, 4), "h3".into()), (Scalar::from_int(-4), "h".into())]);
        assert!(parse_lincomb("0").unwrap().is_empty());
        assert_eq!(parse_lincomb("-2").unwrap(), vec![(Scalar::from_int(-2), "1".into())]);
    }

    const Q2: &str =
        "vars v1 v2 v3\nfield Q\ntrunc 12\ngroup cyclic 5 weights 1 1 3\nW = -1*v1*v2*v3 + v1^5 + v2^5 + v3^5\n";

    #[test]
    fn problem_file() {
        let p = parse_problem(Q2.as_bytes()).unwrap();
        assert_eq!(p.ctx.unwrap().num_vars, 3);
        assert_eq!(p.ctx.unwrap().trunc, 12);
        assert_eq!(p.group.unwrap().weights(), [1, 1, 3]);
        assert_eq!(p.digest.len(), 64);
    }

    #[test]
    fn problem_file_errors() {
        let no_trunc = Q2.replace("trunc 12\n", "");
        assert_eq!(parse_problem(no_trunc.as_bytes()).unwrap_err().tag(), "SyntaxError");
        let bad_w = Q2.replace("1 1 3", "1 1");
        let e = parse_problem(bad_w.as_bytes()).unwrap_err();
        assert_eq!((e.tag(), e.line), ("ValidationError", 4));
        let overflow = Q2.replace("v3^5\n", "v3^13\n");
        let e = parse_problem(overflow.as_bytes()).unwrap_err();
        assert_eq!((e.tag(), e.line), ("DegreeOverflow", 5));
        assert_eq!(&overflow[e.offset..e.offset + 1], "^");
    }

    #[test]
    fn ring_block() {
        let src = "ring basis 1 t\nring degrees 0 0\nring rule t*t = 1\n";
        let p = parse_problem(src.as_bytes()).unwrap();
        let ring = p.ring.unwrap();
        assert_eq!(ring.rules.len(), 1);
        assert!(p.ctx.is_none());
    }
}
