//! Polyvector fields `K[[V∨]] ⊗ Λ(V)` with wedge product and Schouten bracket.
//!
//! A [`Polyvector`] is a sparse map from [`FormIndex`] (a strictly increasing
//! set of generator indices) to series coefficients. The bracket is the
//! two-sum contraction formula:
//!
//! ```text
//! [f ξ_I, g ξ_J] = Σ_q (-1)^{k-q-1}          f ∂_{i_q}g  ξ_{I∖i_q} ∧ ξ_J
//!                + Σ_q (-1)^{l-q+(k-1)(l-1)} g ∂_{j_q}f  ξ_{J∖j_q} ∧ ξ_I
//! ```
//!
//! with `k = |I|`, `l = |J|` and `q` counting positions from 1. One
//! derivative is consumed, so brackets are exact up to degree `D-1` in
//! general, and up to `D` when both arguments vanish at the origin.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::Scalar;
use crate::series::{default_names, Monomial, SeriesContext, SeriesError, TruncatedSeries};

/// A set of generator indices `{i_1 < … < i_k}` naming `ξ_{i_1}∧…∧ξ_{i_k}`,
/// stored as a bitmask over 0-based indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FormIndex(u32);

impl FormIndex {
    pub const EMPTY: FormIndex = FormIndex(0);

    pub fn from_bits(bits: u32) -> Self {
        FormIndex(bits)
    }

    /// From 0-based indices; `None` if an index repeats.
    pub fn from_indices(idx: &[usize]) -> Option<Self> {
        let mut bits = 0u32;
        for &i in idx {
            assert!(i < 32, "at most 32 generators supported");
            if bits & (1 << i) != 0 {
                return None;
            }
            bits |= 1 << i;
        }
        Some(FormIndex(bits))
    }

    pub fn single(i: usize) -> Self {
        FormIndex(1 << i)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    /// Increasing 0-based indices.
    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }

    pub fn remove(self, i: usize) -> Self {
        FormIndex(self.0 & !(1 << i))
    }

    /// `ξ_I ∧ ξ_J = sign · ξ_{I∪J}`, or `None` when the sets overlap.
    pub fn wedge(self, other: FormIndex) -> Option<(i32, FormIndex)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // one transposition per pair (i in I, j in J) with i > j
        let mut inversions = 0u32;
        for j in other.indices() {
            let above = self.0 & !((1u32 << (j + 1)).wrapping_sub(1));
            let above = if j == 31 { 0 } else { above };
            inversions += above.count_ones();
        }
        let sign = if inversions % 2 == 0 { 1 } else { -1 };
        Some((sign, FormIndex(self.0 | other.0)))
    }

    /// All subsets of `{0..n}` ordered by size, then lexicographically.
    pub fn all(n: usize) -> Vec<FormIndex> {
        let mut v: Vec<FormIndex> = (0..(1u32 << n)).map(FormIndex).collect();
        v.sort();
        v
    }

    /// All subsets of size `k`.
    pub fn of_degree(n: usize, k: usize) -> Vec<FormIndex> {
        Self::all(n).into_iter().filter(|f| f.degree() == k).collect()
    }

    /// Text form `e{1,2}` (1-based), `1` for the empty index.
    pub fn render(self) -> String {
        if self.0 == 0 {
            return "1".into();
        }
        let idx: Vec<String> = self.indices().iter().map(|i| (i + 1).to_string()).collect();
        format!("e{{{}}}", idx.join(","))
    }
}

impl Ord for FormIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.indices().cmp(&other.indices()))
    }
}

impl PartialOrd for FormIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for FormIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Z2 parity of a single term `v^a ξ_I`: polynomial degree plus form degree.
pub fn term_parity(m: &Monomial, idx: FormIndex) -> u32 {
    (m.degree() + idx.degree() as u32) % 2
}

fn sign_scalar(e: i64) -> Scalar {
    if e.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        Scalar::from_int(-1)
    }
}

/// An element of `K[[V∨]] ⊗ Λ(V)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Polyvector {
    ctx: SeriesContext,
    comps: BTreeMap<FormIndex, TruncatedSeries>,
}

impl Polyvector {
    pub fn zero(ctx: SeriesContext) -> Self {
        Polyvector { ctx, comps: BTreeMap::new() }
    }

    /// A function regarded as a 0-vector.
    pub fn function(f: TruncatedSeries) -> Self {
        Self::component(FormIndex::EMPTY, f)
    }

    /// The single component `f · ξ_I`.
    pub fn component(idx: FormIndex, f: TruncatedSeries) -> Self {
        let mut p = Self::zero(f.context());
        p.add_component(idx, &f);
        p
    }

    /// The constant polyvector `ξ_I`.
    pub fn basis(ctx: SeriesContext, idx: FormIndex) -> Self {
        Self::component(idx, TruncatedSeries::one(ctx))
    }

    pub fn context(&self) -> SeriesContext {
        self.ctx
    }

    pub fn components(&self) -> &BTreeMap<FormIndex, TruncatedSeries> {
        &self.comps
    }

    pub fn get(&self, idx: FormIndex) -> TruncatedSeries {
        self.comps.get(&idx).cloned().unwrap_or_else(|| TruncatedSeries::zero(self.ctx))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Number of stored `(monomial, index)` terms.
    pub fn num_terms(&self) -> usize {
        self.comps.values().map(|s| s.len()).sum()
    }

    /// Adds `f · ξ_I` in place.
    pub fn add_component(&mut self, idx: FormIndex, f: &TruncatedSeries) {
        assert_eq!(f.context(), self.ctx, "polyvector component context mismatch");
        assert!(idx.bits() >> self.ctx.num_vars == 0, "form index out of range");
        if f.is_zero() {
            return;
        }
        let entry = self.comps.entry(idx).or_insert_with(|| TruncatedSeries::zero(self.ctx));
        for (m, c) in f.iter() {
            entry.add_term(m.clone(), c.clone());
        }
        if entry.is_zero() {
            self.comps.remove(&idx);
        }
    }

    /// Adds `c · v^m · ξ_I` in place.
    pub fn add_term(&mut self, idx: FormIndex, m: Monomial, c: Scalar) {
        if c.is_zero() || m.degree() > self.ctx.trunc {
            return;
        }
        let entry = self.comps.entry(idx).or_insert_with(|| TruncatedSeries::zero(self.ctx));
        entry.add_term(m, c);
        if entry.is_zero() {
            self.comps.remove(&idx);
        }
    }

    /// Iterates all `(index, monomial, coefficient)` terms.
    pub fn terms(&self) -> impl Iterator<Item = (FormIndex, &Monomial, &Scalar)> {
        self.comps.iter().flat_map(|(i, s)| s.iter().map(move |(m, c)| (*i, m, c)))
    }

    /// `Some(k)` when every component has form degree `k`.
    pub fn form_degree(&self) -> Option<usize> {
        let mut it = self.comps.keys().map(|i| i.degree());
        let first = it.next()?;
        it.all(|k| k == first).then_some(first)
    }

    /// The part of form degree `k`.
    pub fn form_part(&self, k: usize) -> Self {
        Polyvector {
            ctx: self.ctx,
            comps: self.comps.iter().filter(|(i, _)| i.degree() == k).map(|(i, s)| (*i, s.clone())).collect(),
        }
    }

    /// Minimum polynomial order over all components.
    pub fn order(&self) -> Option<u32> {
        self.comps.values().filter_map(|s| s.order()).min()
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
        for (i, s) in &other.comps {
            out.add_component(*i, s);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Polyvector { ctx: self.ctx, comps: self.comps.iter().map(|(i, s)| (*i, s.neg())).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero(self.ctx);
        for (i, s) in &self.comps {
            out.add_component(*i, &s.scale(c));
        }
        out
    }

    /// Multiplies every coefficient by the function `f`.
    pub fn mul_function(&self, f: &TruncatedSeries) -> Result<Self, SeriesError> {
        let mut out = Self::zero(self.ctx);
        for (i, s) in &self.comps {
            out.add_component(*i, &s.mul(f)?);
        }
        Ok(out)
    }

    /// Applies `op` to every coefficient series.
    pub fn map_series(&self, mut op: impl FnMut(FormIndex, &TruncatedSeries) -> TruncatedSeries) -> Self {
        let mut out = Self::zero(self.ctx);
        for (i, s) in &self.comps {
            out.add_component(*i, &op(*i, s));
        }
        out
    }

    pub fn retruncate(&self, ctx: SeriesContext) -> Self {
        let mut out = Self::zero(ctx);
        for (i, s) in &self.comps {
            out.add_component(*i, &s.retruncate(ctx));
        }
        out
    }

    /// Wedge product; coefficients commute, generators anticommute.
    pub fn wedge(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let mut out = Self::zero(self.ctx);
        for (i, f) in &self.comps {
            for (j, g) in &other.comps {
                if let Some((sign, k)) = i.wedge(*j) {
                    let prod = f.mul(g)?;
                    out.add_component(k, &prod.scale(&Scalar::from_int(sign as i64)));
                }
            }
        }
        Ok(out)
    }

    /// Schouten bracket `[self, other]`.
    pub fn schouten(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let mut out = Self::zero(self.ctx);
        for (i, f) in &self.comps {
            for (j, g) in &other.comps {
                schouten_into(&mut out, f, *i, g, *j);
            }
        }
        Ok(out)
    }

    /// Canonical text, e.g. `(v1^2)*e{1,2} + (-v3)*e{3}`, parseable by
    /// [`crate::exparse::parse_polyvector`].
    pub fn render(&self, names: &[String]) -> String {
        if self.comps.is_empty() {
            return "0".into();
        }
        self.comps
            .iter()
            .map(|(i, s)| {
                if *i == FormIndex::EMPTY {
                    format!("({})", s.render(names))
                } else {
                    format!("({})*{}", s.render(names), i.render())
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Accumulates `[f ξ_I, g ξ_J]` into `out`.
pub(crate) fn schouten_into(
    out: &mut Polyvector,
    f: &TruncatedSeries,
    i: FormIndex,
    g: &TruncatedSeries,
    j: FormIndex,
) {
    let k = i.degree() as i64;
    let l = j.degree() as i64;
    for (pos, &iq) in i.indices().iter().enumerate() {
        let q = pos as i64 + 1;
        let rest = i.remove(iq);
        let Some((wsign, idx)) = rest.wedge(j) else { continue };
        let dg = g.partial(iq);
        if dg.is_zero() {
            continue;
        }
        let coeff = f.mul(&dg).expect("same context");
        let s = sign_scalar(k - q - 1 + if wsign < 0 { 1 } else { 0 });
        out.add_component(idx, &coeff.scale(&s));
    }
    for (pos, &jq) in j.indices().iter().enumerate() {
        let q = pos as i64 + 1;
        let rest = j.remove(jq);
        let Some((wsign, idx)) = rest.wedge(i) else { continue };
        let df = f.partial(jq);
        if df.is_zero() {
            continue;
        }
        let coeff = g.mul(&df).expect("same context");
        let s = sign_scalar(l - q + (k - 1) * (l - 1) + if wsign < 0 { 1 } else { 0 });
        out.add_component(idx, &coeff.scale(&s));
    }
}

/// Term-by-term `[v^m ξ_I, g ξ_J]` for a monomial; `dg[i]` must be `∂_i g`.
/// Emits `(index, monomial, coefficient)` with possible repeats.
pub(crate) fn schouten_monomial_terms(
    m: &Monomial,
    i: FormIndex,
    g: &TruncatedSeries,
    dg: &[TruncatedSeries],
    j: FormIndex,
    mut emit: impl FnMut(FormIndex, Monomial, Scalar),
) {
    let trunc = g.context().trunc;
    let k = i.degree() as i64;
    let l = j.degree() as i64;
    for (pos, &iq) in i.indices().iter().enumerate() {
        let rest = i.remove(iq);
        let Some((wsign, idx)) = rest.wedge(j) else { continue };
        let s = sign_scalar(k - pos as i64 - 2 + if wsign < 0 { 1 } else { 0 });
        for (gm, gc) in dg[iq].iter() {
            if gm.degree() + m.degree() <= trunc {
                emit(idx, gm.mul(m), &s * gc);
            }
        }
    }
    for (pos, &jq) in j.indices().iter().enumerate() {
        let e = m.exps()[jq];
        if e == 0 {
            continue;
        }
        let rest = j.remove(jq);
        let Some((wsign, idx)) = rest.wedge(i) else { continue };
        let dm = m.div(&Monomial::var(m.num_vars(), jq)).expect("positive exponent");
        let s = &sign_scalar(l - pos as i64 - 1 + (k - 1) * (l - 1) + if wsign < 0 { 1 } else { 0 })
            * &Scalar::from_int(e as i64);
        for (gm, gc) in g.iter() {
            if gm.degree() + dm.degree() <= trunc {
                emit(idx, gm.mul(&dm), &s * gc);
            }
        }
    }
}

/// Free-function form of [`Polyvector::wedge`].
pub fn wedge(a: &Polyvector, b: &Polyvector) -> Result<Polyvector, SeriesError> {
    a.wedge(b)
}

/// Free-function form of [`Polyvector::schouten`].
pub fn schouten(a: &Polyvector, b: &Polyvector) -> Result<Polyvector, SeriesError> {
    a.schouten(b)
}

/// Interior contraction with `dW`, i.e. `[ω, W]`. Lowers form degree by one
/// and vanishes on functions.
pub fn contract_dw(omega: &Polyvector, w: &TruncatedSeries) -> Result<Polyvector, SeriesError> {
    omega.schouten(&Polyvector::function(w.clone()))
}

impl fmt::Debug for Polyvector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&default_names(self.ctx.num_vars)))
    }
}

impl fmt::Display for Polyvector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&default_names(self.ctx.num_vars)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx3() -> SeriesContext {
        SeriesContext::rational(3, 12)
    }

    fn v(c: SeriesContext, i: usize) -> TruncatedSeries {
        TruncatedSeries::var(c, i)
    }

    fn xi(c: SeriesContext, idx: &[usize]) -> Polyvector {
        Polyvector::basis(c, FormIndex::from_indices(idx).unwrap())
    }

    #[test]
    fn wedge_basics() {
        let c = ctx3();
        assert_eq!(xi(c, &[0]).wedge(&xi(c, &[1])).unwrap(), xi(c, &[0, 1]));
        assert!(xi(c, &[0]).wedge(&xi(c, &[0])).unwrap().is_zero());
        assert_eq!(xi(c, &[1]).wedge(&xi(c, &[0])).unwrap(), xi(c, &[0, 1]).neg());
        let a = Polyvector::component(FormIndex::single(0), v(c, 0));
        let b = Polyvector::component(FormIndex::single(1), v(c, 1));
        let expect = Polyvector::component(FormIndex::from_indices(&[0, 1]).unwrap(), &v(c, 0) * &v(c, 1));
        assert_eq!(a.wedge(&b).unwrap(), expect);
    }

    #[test]
    fn wedge_sign_three_forms() {
        let (s, k) = FormIndex::from_indices(&[0, 2]).unwrap().wedge(FormIndex::single(1)).unwrap();
        assert_eq!(s, -1);
        assert_eq!(k, FormIndex::from_indices(&[0, 1, 2]).unwrap());
    }

    #[test]
    fn bracket_of_functions_vanishes() {
        let c = ctx3();
        let f = Polyvector::function(&v(c, 0).pow(3) + &v(c, 1));
        let g = Polyvector::function(&v(c, 1) * &v(c, 2));
        assert!(f.schouten(&g).unwrap().is_zero());
    }

    #[test]
    fn bivector_against_function() {
        // [ξ_12, v1 v2] = v2 ξ2 − v1 ξ1
        let c = ctx3();
        let r = xi(c, &[0, 1]).schouten(&Polyvector::function(&v(c, 0) * &v(c, 1))).unwrap();
        let mut expect = Polyvector::component(FormIndex::single(1), v(c, 1));
        expect.add_component(FormIndex::single(0), &v(c, 0).neg());
        assert_eq!(r, expect);
    }

    #[test]
    fn contraction_one_variable() {
        let c = SeriesContext::rational(1, 6);
        let x = v(c, 0);
        let r = contract_dw(&xi(c, &[0]), &x.pow(2)).unwrap();
        // k = 1, q = 1: sign (−1)^{-1} = −1
        assert_eq!(r, Polyvector::function(x.scale(&Scalar::from_int(-2))));
        assert!(contract_dw(&Polyvector::function(x.clone()), &x.pow(3)).unwrap().is_zero());
    }

    #[test]
    fn contraction_of_top_form_gives_partials() {
        let c = ctx3();
        let q = &(&(&(&v(c, 0) * &v(c, 1)) * &v(c, 2)).neg() + &v(c, 0).pow(5)) + &(&v(c, 1).pow(5) + &v(c, 2).pow(5));
        let r = contract_dw(&xi(c, &[0, 1, 2]), &q).unwrap();
        assert_eq!(r.form_degree(), Some(2));
        for (drop, idx) in [(0usize, [1usize, 2]), (1, [0, 2]), (2, [0, 1])] {
            let comp = r.get(FormIndex::from_indices(&idx).unwrap());
            let d = q.partial(drop);
            assert!(comp == d || comp == d.neg(), "component {idx:?}");
        }
    }

    #[test]
    fn render_roundtrip_shape() {
        let c = ctx3();
        let p = Polyvector::component(FormIndex::from_indices(&[0, 1]).unwrap(), v(c, 0).pow(2));
        assert_eq!(p.render(&default_names(3)), "(v1^2)*e{1,2}");
    }
}
