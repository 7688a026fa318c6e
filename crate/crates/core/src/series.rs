//! Sparse multivariate formal power series truncated at a total degree.
//!
//! Every series lives in a [`SeriesContext`] (number of variables, truncation
//! order `D`, base field). Terms of total degree above `D` are never stored;
//! products and substitutions discard them, so arithmetic is exact in the
//! quotient ring `K[v]/m^{D+1}`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("series live in different contexts ({0} vs {1})")]
    ContextMismatch(SeriesContext, SeriesContext),
    #[error("monomial of degree {degree} exceeds truncation order {trunc}")]
    DegreeOverflow { degree: u32, trunc: u32 },
    #[error("exponent vector has {got} entries, context has {expected} variables")]
    Arity { expected: usize, got: usize },
    #[error("substitution component {index} has a nonzero constant term")]
    OrderViolation { index: usize },
    #[error("coefficient {0} does not lie in the base field {1}")]
    FieldMismatch(Scalar, Field),
}

/// Shape shared by all composable series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeriesContext {
    pub num_vars: usize,
    pub trunc: u32,
    pub field: Field,
}

impl SeriesContext {
    pub fn new(num_vars: usize, trunc: u32, field: Field) -> Self {
        assert!(num_vars >= 1, "a series context needs at least one variable");
        assert!(trunc >= 1, "truncation order must be positive");
        SeriesContext { num_vars, trunc, field }
    }

    pub fn rational(num_vars: usize, trunc: u32) -> Self {
        Self::new(num_vars, trunc, Field::Q)
    }

    pub fn with_trunc(self, trunc: u32) -> Self {
        Self::new(self.num_vars, trunc, self.field)
    }

    pub fn with_field(self, field: Field) -> Self {
        Self::new(self.num_vars, self.trunc, field)
    }
}

impl fmt::Display for SeriesContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} D={} {}", self.num_vars, self.trunc, self.field)
    }
}

/// An exponent vector. Ordered graded-lex: total degree first, then
/// lexicographically with `v1 > v2 > ...` listed first within a degree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Box<[u32]>,
    degree: u32,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        let degree = exps.iter().sum();
        Monomial { exps: exps.into_boxed_slice(), degree }
    }

    pub fn one(n: usize) -> Self {
        Self::new(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self::new(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn num_vars(&self) -> usize {
        self.exps.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::new(self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut e = Vec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(other.exps.iter()) {
            if b > a {
                return None;
            }
            e.push(a - b);
        }
        Some(Monomial::new(e))
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// Reverse-lex comparison within a degree (used by the cross-check path).
    pub fn cmp_revlex(&self, other: &Monomial) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            for (a, b) in self.exps.iter().zip(other.exps.iter()).rev() {
                match a.cmp(b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }

    /// Renders as `v1^2*v3` with the supplied variable names.
    pub fn render(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{}", names[i], e) })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}

/// All monomials in `n` variables of total degree exactly `d`, graded-lex.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Monomial> {
    fn rec(n: usize, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i + 1 == n {
            cur.push(left);
            out.push(Monomial::new(cur.clone()));
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(n, i + 1, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, 0, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// All monomials of total degree at most `d`, graded-lex.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Monomial> {
    (0..=d).flat_map(|k| monomials_of_degree(n, k)).collect()
}

/// Default variable names `v1..vn`.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("v{i}")).collect()
}

/// A truncated series: canonical, zero-free map from monomials to scalars.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    ctx: SeriesContext,
    terms: BTreeMap<Monomial, Scalar>,
}

impl TruncatedSeries {
    pub fn zero(ctx: SeriesContext) -> Self {
        TruncatedSeries { ctx, terms: BTreeMap::new() }
    }

    pub fn constant(ctx: SeriesContext, c: Scalar) -> Self {
        let mut s = Self::zero(ctx);
        s.add_term(Monomial::one(ctx.num_vars), c);
        s
    }

    pub fn one(ctx: SeriesContext) -> Self {
        Self::constant(ctx, Scalar::one())
    }

    /// The coordinate function `v_{i+1}` (0-based index).
    pub fn var(ctx: SeriesContext, i: usize) -> Self {
        assert!(i < ctx.num_vars, "variable index out of range");
        let mut s = Self::zero(ctx);
        s.add_term(Monomial::var(ctx.num_vars, i), Scalar::one());
        s
    }

    /// A single term; fails if the degree exceeds `D`.
    pub fn monomial(ctx: SeriesContext, m: Monomial, c: Scalar) -> Result<Self, SeriesError> {
        Self::from_terms(ctx, [(m, c)])
    }

    /// Validated construction: rejects terms above the truncation order,
    /// arity mismatches and coefficients outside the base field.
    pub fn from_terms(
        ctx: SeriesContext,
        terms: impl IntoIterator<Item = (Monomial, Scalar)>,
    ) -> Result<Self, SeriesError> {
        let mut s = Self::zero(ctx);
        for (m, c) in terms {
            if m.num_vars() != ctx.num_vars {
                return Err(SeriesError::Arity { expected: ctx.num_vars, got: m.num_vars() });
            }
            if m.degree() > ctx.trunc {
                return Err(SeriesError::DegreeOverflow { degree: m.degree(), trunc: ctx.trunc });
            }
            if !ctx.field.contains(&c) {
                return Err(SeriesError::FieldMismatch(c, ctx.field));
            }
            s.add_term(m, c);
        }
        Ok(s)
    }

    /// Construction that silently discards terms above the truncation order.
    pub fn from_terms_truncating(ctx: SeriesContext, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut s = Self::zero(ctx);
        for (m, c) in terms {
            debug_assert_eq!(m.num_vars(), ctx.num_vars);
            s.add_term(m, c);
        }
        s
    }

    pub fn context(&self) -> SeriesContext {
        self.ctx
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Scalar> {
        &self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Lowest stored total degree, `None` for the zero series (order ∞).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(|m| m.degree())
    }

    /// Highest stored total degree.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    /// Adds `c·m` in place, dropping it if above `D`, pruning zeros.
    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if m.degree() > self.ctx.trunc || c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, other: &Self) -> Result<(), SeriesError> {
        if self.ctx != other.ctx {
            return Err(SeriesError::ContextMismatch(self.ctx, other.ctx));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries { ctx: self.ctx, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return Self::zero(self.ctx);
        }
        TruncatedSeries { ctx: self.ctx, terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    /// Product with every term above `D` discarded.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let d = self.ctx.trunc;
        let mut out = Self::zero(self.ctx);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                // `other` iterates in degree order, so the rest is too high
                if ma.degree() + mb.degree() > d {
                    break;
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    /// Multiplies by a single term `c·m`.
    pub fn mul_term(&self, m: &Monomial, c: &Scalar) -> Self {
        let mut out = Self::zero(self.ctx);
        if c.is_zero() {
            return out;
        }
        for (ma, ca) in &self.terms {
            if ma.degree() + m.degree() > self.ctx.trunc {
                break;
            }
            out.terms.insert(ma.mul(m), ca * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.ctx);
        for _ in 0..e {
            acc = acc.mul(self).expect("same context");
        }
        acc
    }

    /// Formal partial derivative in the 0-based variable `i`.
    pub fn partial(&self, i: usize) -> Self {
        assert!(i < self.ctx.num_vars, "variable index {i} out of range");
        let mut out = Self::zero(self.ctx);
        for (m, c) in &self.terms {
            let e = m.exps()[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[i] -= 1;
            out.terms.insert(Monomial::new(exps), c * &Scalar::from_int(e as i64));
        }
        out
    }

    /// The homogeneous component of degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        TruncatedSeries {
            ctx: self.ctx,
            terms: self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Terms of degree in `lo..=hi`.
    pub fn degree_range(&self, lo: u32, hi: u32) -> Self {
        TruncatedSeries {
            ctx: self.ctx,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() >= lo && m.degree() <= hi)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Re-home into a context with a different truncation order (dropping
    /// terms that no longer fit).
    pub fn retruncate(&self, ctx: SeriesContext) -> Self {
        assert_eq!(ctx.num_vars, self.ctx.num_vars);
        TruncatedSeries {
            ctx,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= ctx.trunc)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// `f(φ_1, …, φ_n)` truncated at `D`. Every `φ_i` must have zero
    /// constant term.
    pub fn substitute(&self, phi: &[TruncatedSeries]) -> Result<Self, SeriesError> {
        if phi.len() != self.ctx.num_vars {
            return Err(SeriesError::Arity { expected: self.ctx.num_vars, got: phi.len() });
        }
        for (i, p) in phi.iter().enumerate() {
            self.check(p)?;
            if p.order() == Some(0) {
                return Err(SeriesError::OrderViolation { index: i });
            }
        }
        let d = self.ctx.trunc as usize;
        // powers[i][e] = φ_i^e
        let mut powers: Vec<Vec<TruncatedSeries>> = Vec::with_capacity(phi.len());
        for (i, p) in phi.iter().enumerate() {
            let max_e = self.terms.keys().map(|m| m.exps()[i]).max().unwrap_or(0) as usize;
            let mut v = vec![Self::one(self.ctx)];
            for e in 1..=max_e.min(d) {
                let next = v[e - 1].mul(p)?;
                v.push(next);
            }
            powers.push(v);
        }
        let mut out = Self::zero(self.ctx);
        for (m, c) in &self.terms {
            let mut acc = Self::constant(self.ctx, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                acc = acc.mul(&powers[i][e as usize])?;
                if acc.is_zero() {
                    break;
                }
            }
            for (mm, cc) in acc.terms {
                out.add_term(mm, cc);
            }
        }
        Ok(out)
    }

    /// Maps every coefficient through `f`, pruning zeros.
    pub fn map_coeffs(&self, f: impl Fn(&Monomial, &Scalar) -> Scalar) -> Self {
        let mut out = Self::zero(self.ctx);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(m, c));
        }
        out
    }

    /// Canonical text, e.g. `-1*v1*v2*v3 + v1^5`. Parses back to the same
    /// series with [`crate::exparse::parse_poly`].
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = if c.leading_negative() { (true, -c) } else { (false, c.clone()) };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = m.render(names);
            let coeff = if mag.needs_parens() { format!("({mag})") } else { mag.to_string() };
            if m.degree() == 0 {
                out.push_str(&coeff);
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{coeff}*{mono}"));
            }
        }
        out
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&default_names(self.ctx.num_vars)))
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&default_names(self.ctx.num_vars)))
    }
}

macro_rules! series_op {
    ($tr:ident, $m:ident) => {
        /// Panics on context mismatch; use the inherent method for a `Result`.
        impl<'a> std::ops::$tr<&'a TruncatedSeries> for &'a TruncatedSeries {
            type Output = TruncatedSeries;
            fn $m(self, rhs: &'a TruncatedSeries) -> TruncatedSeries {
                TruncatedSeries::$m(self, rhs).expect("series context mismatch")
            }
        }
    };
}
series_op!(Add, add);
series_op!(Sub, sub);
series_op!(Mul, mul);

impl std::ops::Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: usize, d: u32) -> SeriesContext {
        SeriesContext::rational(n, d)
    }

    fn v(c: SeriesContext, i: usize) -> TruncatedSeries {
        TruncatedSeries::var(c, i)
    }

    #[test]
    fn additive_inverse_and_sum() {
        let c = ctx(3, 12);
        let a = v(c, 0);
        assert!((&a + &a.neg()).is_zero());
        let s = &(&v(c, 0) + &v(c, 1)) + &v(c, 1);
        assert_eq!(s.coeff(&Monomial::var(3, 1)), Scalar::from_int(2));
    }

    #[test]
    fn truncated_products() {
        let c = ctx(3, 12);
        assert_eq!(
            &v(c, 0) * &v(c, 1),
            TruncatedSeries::monomial(c, Monomial::new(vec![1, 1, 0]), Scalar::one()).unwrap()
        );
        assert!((&v(c, 0).pow(7) * &v(c, 0).pow(7)).is_zero());
        let c1 = ctx(1, 4);
        let one = TruncatedSeries::one(c1);
        let x = v(c1, 0);
        let p = &(&one + &x) * &(&one - &x);
        assert_eq!(p, &one - &x.pow(2));
    }

    #[test]
    fn construction_rejects_overflow() {
        let c = ctx(1, 3);
        let e = TruncatedSeries::monomial(c, Monomial::new(vec![4]), Scalar::one()).unwrap_err();
        assert_eq!(e, SeriesError::DegreeOverflow { degree: 4, trunc: 3 });
        let e = TruncatedSeries::from_terms(c, [(Monomial::new(vec![1]), Scalar::i())]).unwrap_err();
        assert!(matches!(e, SeriesError::FieldMismatch(..)));
    }

    #[test]
    fn context_mismatch() {
        let a = v(ctx(2, 4), 0);
        let b = v(ctx(2, 5), 0);
        assert!(matches!(a.add(&b), Err(SeriesError::ContextMismatch(..))));
    }

    #[test]
    fn partials() {
        let c = ctx(3, 12);
        let xyz = &(&v(c, 0) * &v(c, 1)) * &v(c, 2);
        assert_eq!(xyz.partial(0), &v(c, 1) * &v(c, 2));
        assert!(v(c, 1).pow(5).partial(0).is_zero());
    }

    #[test]
    fn substitution_examples() {
        let c = ctx(3, 12);
        let f = v(c, 0).pow(2);
        let phi = [&v(c, 0) + &v(c, 1), v(c, 1), v(c, 2)];
        let expect = &(&v(c, 0).pow(2) + &(&v(c, 0) * &v(c, 1)).scale(&Scalar::from_int(2))) + &v(c, 1).pow(2);
        assert_eq!(f.substitute(&phi).unwrap(), expect);

        let c4 = ctx(3, 4);
        let f = v(c4, 0).pow(3);
        let phi = [&v(c4, 0) - &v(c4, 0).pow(2), v(c4, 1), v(c4, 2)];
        let expect = &v(c4, 0).pow(3) - &v(c4, 0).pow(4).scale(&Scalar::from_int(3));
        assert_eq!(f.substitute(&phi).unwrap(), expect);
    }

    #[test]
    fn substitution_rejects_constant_terms() {
        let c = ctx(2, 4);
        let phi = [&v(c, 0) + &TruncatedSeries::one(c), v(c, 1)];
        assert_eq!(v(c, 0).substitute(&phi).unwrap_err(), SeriesError::OrderViolation { index: 0 });
    }

    #[test]
    fn monomial_enumeration_counts() {
        assert_eq!(monomials_of_degree(3, 4).len(), 15);
        assert_eq!(monomials_up_to(3, 12).len(), 455);
        let m = monomials_of_degree(3, 2);
        assert_eq!(m[0].exps(), &[2, 0, 0]);
        assert!(m.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn render_is_canonical() {
        let c = ctx(3, 6);
        let s = &(&v(c, 0) * &v(c, 1)).scale(&Scalar::from_int(-1)) + &v(c, 2).pow(5);
        assert_eq!(s.to_string(), "-v1*v2 + v3^5");
        assert_eq!(TruncatedSeries::zero(c).to_string(), "0");
        let t = TruncatedSeries::constant(c, Scalar::frac(-3, 2));
        assert_eq!(t.to_string(), "-3/2");
    }
}
