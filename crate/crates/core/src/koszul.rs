//! Koszul-type complexes of polyvector fields: Hochschild cohomology of a
//! Maurer–Cartan pair, Jacobian rings and acyclicity checks.
//!
//! Everything is computed on the truncated complex `C_D` (terms of
//! polynomial degree ≤ D). The differential never lowers degree, so `C_D` is
//! a quotient complex and `d² = 0` holds exactly on it. Truncation creates
//! spurious classes near degree `D`; these are removed by the windowed
//! cohomology
//!
//! ```text
//! H(w, D) = π_w(Z_D) / B_w
//! dim     = dim C_w − (rank d_D − rank d_D|deg>w) − rank d_w(incoming)
//! ```
//!
//! which is stabilized when `H(w, D−1) = H(w, D) = H(w−1, D)`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::cyclic::{monomial_weight, CyclicAction, Reynolds};
use crate::linalg::{Echelon, Insert, PivotRule, SparseVec};
use crate::mcgauge::MCPair;
use crate::polyvec::{schouten_monomial_terms, FormIndex, Polyvector};
use crate::scalar::Scalar;
use crate::series::{monomials_of_degree, monomials_up_to, Monomial, SeriesContext, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KoszulError {
    #[error("differential does not square to zero: d(d({0})) = {1}")]
    DifferentialNotSquareZero(String, String),
    #[error("cohomology not stabilized at window {window}, truncation {trunc}")]
    NotStabilized { window: u32, trunc: u32, table: Vec<WindowRanks> },
    #[error("Jacobian quotient not stabilized below degree {0}")]
    JacobianNotStabilized(u32, Box<JacobianReport>),
    #[error("invalid window {window} for truncation {trunc} (need 1 <= window < trunc)")]
    InvalidWindow { window: u32, trunc: u32 },
    #[error("W must have order at least 2")]
    OrderTooLow,
    #[error("input is not invariant under {0}")]
    NotInvariant(String),
    #[error("group element g^{0} fixes a positive-dimensional subspace; the fixed-locus rule does not apply")]
    FixedLocusPositiveDimensional(u32),
    #[error("action has {got} weights for {expected} variables")]
    ActionArity { expected: usize, got: usize },
}

/// Ordered basis `v^a ξ_I` of a truncated space, by degree then monomial
/// order then form index.
#[derive(Clone, Debug)]
pub struct ComplexBasis {
    elems: Vec<(Monomial, FormIndex)>,
    pos: HashMap<(Monomial, FormIndex), usize>,
}

impl ComplexBasis {
    pub fn new(ctx: SeriesContext, forms: &[FormIndex], action: Option<&CyclicAction>) -> Self {
        let mut elems = Vec::new();
        for d in 0..=ctx.trunc {
            for m in monomials_of_degree(ctx.num_vars, d) {
                for &f in forms {
                    if action.is_none_or(|a| monomial_weight(&m, f, a) == 0) {
                        elems.push((m.clone(), f));
                    }
                }
            }
        }
        let pos = elems.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        ComplexBasis { elems, pos }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.elems[i].0.degree()
    }

    pub fn elem(&self, i: usize) -> &(Monomial, FormIndex) {
        &self.elems[i]
    }

    pub fn index(&self, m: &Monomial, f: FormIndex) -> Option<usize> {
        self.pos.get(&(m.clone(), f)).copied()
    }

    /// Number of elements of degree ≤ `w`.
    pub fn dim_up_to(&self, w: u32) -> usize {
        self.elems.partition_point(|(m, _)| m.degree() <= w)
    }

    pub fn to_polyvector(&self, ctx: SeriesContext, v: &SparseVec) -> Polyvector {
        let mut p = Polyvector::zero(ctx);
        for (i, c) in v {
            let (m, f) = &self.elems[*i];
            p.add_term(*f, m.clone(), c.clone());
        }
        p
    }
}

/// A linear map between two bases, stored column by column.
#[derive(Clone, Debug)]
pub struct Differential {
    src_deg: Vec<u32>,
    dst_deg: Vec<u32>,
    cols: Vec<SparseVec>,
}

impl Differential {
    /// Matrix of `x ↦ [x, target]` from `src` to `dst`.
    pub fn bracket(ctx: SeriesContext, src: &ComplexBasis, dst: &ComplexBasis, target: &Polyvector) -> Self {
        let comps: Vec<(FormIndex, &TruncatedSeries, Vec<TruncatedSeries>)> = target
            .components()
            .iter()
            .map(|(j, g)| (*j, g, (0..ctx.num_vars).map(|i| g.partial(i)).collect()))
            .collect();
        let cols = src
            .elems
            .par_iter()
            .map(|(m, f)| {
                let mut col = SparseVec::new();
                for (j, g, dg) in &comps {
                    schouten_monomial_terms(m, *f, g, dg, *j, |idx, m2, c| {
                        let r = dst.index(&m2, idx).expect("image lies in the target basis");
                        let e = col.entry(r).or_insert_with(Scalar::zero);
                        *e += &c;
                    });
                }
                col.retain(|_, c| !c.is_zero());
                col
            })
            .collect();
        Differential {
            src_deg: (0..src.len()).map(|i| src.degree(i)).collect(),
            dst_deg: (0..dst.len()).map(|i| dst.degree(i)).collect(),
            cols,
        }
    }

    pub fn col(&self, j: usize) -> &SparseVec {
        &self.cols[j]
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    pub(crate) fn truncated_col(&self, j: usize, trunc: u32) -> SparseVec {
        self.cols[j].iter().filter(|(r, _)| self.dst_deg[**r] <= trunc).map(|(r, c)| (*r, c.clone())).collect()
    }

    /// Rank of the map truncated at `trunc`, together with the rank of its
    /// restriction to columns of degree `> cut` for each `cut`.
    pub fn rank_profile(&self, trunc: u32, cuts: &[u32]) -> (usize, Vec<usize>) {
        let mut order: Vec<usize> = (0..self.cols.len()).filter(|&j| self.src_deg[j] <= trunc).collect();
        order.sort_by(|&a, &b| self.src_deg[b].cmp(&self.src_deg[a]).then(b.cmp(&a)));
        let mut e = Echelon::new(PivotRule::Min);
        let mut snaps = vec![None; cuts.len()];
        for j in order {
            let d = self.src_deg[j];
            for (k, cut) in cuts.iter().enumerate() {
                if snaps[k].is_none() && d <= *cut {
                    snaps[k] = Some(e.rank());
                }
            }
            e.insert(self.truncated_col(j, trunc), j);
        }
        let r = e.rank();
        (r, snaps.into_iter().map(|s| s.unwrap_or(r)).collect())
    }

    /// Kernel of the map truncated at `trunc`, as combinations of columns.
    pub fn kernel(&self, trunc: u32) -> Vec<SparseVec> {
        let mut e = Echelon::tracking(PivotRule::Min);
        let mut out = Vec::new();
        for j in (0..self.cols.len()).filter(|&j| self.src_deg[j] <= trunc) {
            if let Insert::Dependent(k) = e.insert(self.truncated_col(j, trunc), j) {
                out.push(k);
            }
        }
        out
    }

    /// Applies the map to a vector over the source basis.
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, c) in v {
            for (r, x) in &self.cols[*j] {
                *out.entry(*r).or_insert_with(Scalar::zero) += &(c * x);
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }
}

/// Cohomology dimensions at one `(window, truncation)` pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowRanks {
    pub window: u32,
    pub trunc: u32,
    pub even: usize,
    pub odd: usize,
}

/// Z2-graded cohomology ranks of a folded complex.
#[derive(Clone, Debug, PartialEq)]
pub struct HHReport {
    pub even: usize,
    pub odd: usize,
    pub window: u32,
    pub trunc: u32,
    /// Ranks at `(w, D)`, `(w, D−1)` and `(w−1, D)`.
    pub table: Vec<WindowRanks>,
    pub stabilized: bool,
    pub chain_dims: (usize, usize),
    pub invariant: bool,
    /// Class representatives, when requested.
    pub even_basis: Option<Vec<Polyvector>>,
    pub odd_basis: Option<Vec<Polyvector>>,
}

/// Windowed cohomology of a two-term periodic complex `A ⇄ B`.
struct TwoPeriodic {
    a: ComplexBasis,
    b: ComplexBasis,
    d_ab: Differential,
    d_ba: Differential,
}

/// Windowed ranks at `(w, D)`, `(w, D−1)` and `(w−1, D)`, sharing the
/// elimination passes.
fn window_triple(
    src: &ComplexBasis,
    out_map: &Differential,
    in_map: Option<&Differential>,
    w: u32,
    d: u32,
) -> [usize; 3] {
    let ((top, below), (in_w, in_w1)) = rayon::join(
        || rayon::join(|| out_map.rank_profile(d, &[w, w - 1]), || out_map.rank_profile(d - 1, &[w])),
        || {
            let r = |t: u32| in_map.map_or(0, |m| m.rank_profile(t, &[]).0);
            rayon::join(|| r(w), || r(w - 1))
        },
    );
    let (r_d, cuts) = top;
    let (r_d1, cut1) = below;
    [
        src.dim_up_to(w) - (r_d - cuts[0]) - in_w,
        src.dim_up_to(w) - (r_d1 - cut1[0]) - in_w,
        src.dim_up_to(w - 1) - (r_d - cuts[1]) - in_w1,
    ]
}

fn table_from(w: u32, d: u32, even: [usize; 3], odd: [usize; 3]) -> Vec<WindowRanks> {
    [(w, d), (w, d - 1), (w - 1, d)]
        .into_iter()
        .enumerate()
        .map(|(k, (window, trunc))| WindowRanks { window, trunc, even: even[k], odd: odd[k] })
        .collect()
}

impl TwoPeriodic {
    /// `d² = 0` on both halves.
    fn check_square_zero(&self, ctx: SeriesContext) -> Result<(), KoszulError> {
        for (src, first, second) in [(&self.a, &self.d_ab, &self.d_ba), (&self.b, &self.d_ba, &self.d_ab)] {
            let bad = (0..first.num_cols()).into_par_iter().find_map_first(|j| {
                let dd = second.apply(first.col(j));
                (!dd.is_empty()).then_some((j, dd))
            });
            if let Some((j, dd)) = bad {
                let x = src.to_polyvector(ctx, &[(j, Scalar::one())].into_iter().collect());
                return Err(KoszulError::DifferentialNotSquareZero(
                    x.to_string(),
                    src.to_polyvector(ctx, &dd).to_string(),
                ));
            }
        }
        Ok(())
    }
}

/// Representatives of `π_w(Z_D) / B_w`: kernel vectors projected to the
/// window, reduced modulo boundaries (highest-degree pivots), then put in
/// reduced echelon form (lowest-degree pivots).
fn class_representatives(
    src: &ComplexBasis,
    out_map: &Differential,
    in_map: Option<&Differential>,
    w: u32,
    d: u32,
) -> Vec<SparseVec> {
    let mut bound = Echelon::new(PivotRule::Max);
    if let Some(m) = in_map {
        for j in (0..m.num_cols()).filter(|&j| m.src_deg[j] <= w) {
            bound.insert(m.truncated_col(j, w), j);
        }
    }
    let mut reps = Echelon::new(PivotRule::Min);
    for k in out_map.kernel(d) {
        let proj: SparseVec = k.into_iter().filter(|(i, _)| src.degree(*i) <= w).collect();
        let nf = bound.reduce(&proj);
        if !nf.is_empty() {
            reps.insert(nf, 0);
        }
    }
    reps.reduced_basis()
}

/// Options shared by the cohomology computations.
#[derive(Clone, Copy, Debug, Default)]
pub struct HHOptions {
    /// Window `w`; defaults to `⌊D/2⌋`.
    pub window: Option<u32>,
    /// Also compute class representatives.
    pub with_basis: bool,
}

fn resolve_window(opts: &HHOptions, trunc: u32) -> Result<u32, KoszulError> {
    let w = opts.window.unwrap_or(trunc / 2);
    if w == 0 || w >= trunc {
        return Err(KoszulError::InvalidWindow { window: w, trunc });
    }
    Ok(w)
}

fn forms_of_parity(n: usize, parity: usize) -> Vec<FormIndex> {
    FormIndex::all(n).into_iter().filter(|f| f.degree() % 2 == parity).collect()
}

fn folded_complex(p: &MCPair, action: Option<&CyclicAction>) -> TwoPeriodic {
    let ctx = p.context();
    let target = p.total();
    let a = ComplexBasis::new(ctx, &forms_of_parity(ctx.num_vars, 0), action);
    let b = ComplexBasis::new(ctx, &forms_of_parity(ctx.num_vars, 1), action);
    let (d_ab, d_ba) =
        rayon::join(|| Differential::bracket(ctx, &a, &b, &target), || Differential::bracket(ctx, &b, &a, &target));
    TwoPeriodic { a, b, d_ab, d_ba }
}

/// Verifies that `x ↦ [x, W + η]` squares to zero on the truncated folded
/// complex.
pub fn check_square_zero(p: &MCPair) -> Result<(), KoszulError> {
    folded_complex(p, None).check_square_zero(p.context())
}

fn folded_hh(p: &MCPair, action: Option<&CyclicAction>, opts: &HHOptions) -> Result<HHReport, KoszulError> {
    let ctx = p.context();
    if p.w().order().is_some_and(|o| o < 2) {
        return Err(KoszulError::OrderTooLow);
    }
    let w = resolve_window(opts, ctx.trunc)?;
    let cx = folded_complex(p, action);
    cx.check_square_zero(ctx)?;
    let d = ctx.trunc;
    let (even, odd) = rayon::join(
        || window_triple(&cx.a, &cx.d_ab, Some(&cx.d_ba), w, d),
        || window_triple(&cx.b, &cx.d_ba, Some(&cx.d_ab), w, d),
    );
    let table = table_from(w, d, even, odd);
    let stabilized = table.iter().all(|t| (t.even, t.odd) == (table[0].even, table[0].odd));
    let (even_basis, odd_basis) = if opts.with_basis {
        let (e, o) = rayon::join(
            || class_representatives(&cx.a, &cx.d_ab, Some(&cx.d_ba), w, d),
            || class_representatives(&cx.b, &cx.d_ba, Some(&cx.d_ab), w, d),
        );
        (
            Some(e.iter().map(|v| cx.a.to_polyvector(ctx, v)).collect()),
            Some(o.iter().map(|v| cx.b.to_polyvector(ctx, v)).collect()),
        )
    } else {
        (None, None)
    };
    let report = HHReport {
        even: table[0].even,
        odd: table[0].odd,
        window: w,
        trunc: d,
        table: table.clone(),
        stabilized,
        chain_dims: (cx.a.len(), cx.b.len()),
        invariant: action.is_some(),
        even_basis,
        odd_basis,
    };
    if !stabilized {
        return Err(KoszulError::NotStabilized { window: w, trunc: d, table });
    }
    Ok(report)
}

/// Hochschild cohomology ranks of the pair via `x ↦ [x, W + η]` on the
/// parity-folded polyvector complex.
pub fn hh_ranks(p: &MCPair, opts: &HHOptions) -> Result<HHReport, KoszulError> {
    folded_hh(p, None, opts)
}

/// The same computation on the weight-0 subcomplex.
pub fn invariant_hh(p: &MCPair, action: &CyclicAction, opts: &HHOptions) -> Result<HHReport, KoszulError> {
    check_action(p, action)?;
    folded_hh(p, Some(action), opts)
}

fn check_action(p: &MCPair, action: &CyclicAction) -> Result<(), KoszulError> {
    let n = p.context().num_vars;
    if action.num_vars() != n {
        return Err(KoszulError::ActionArity { expected: n, got: action.num_vars() });
    }
    if !p.w().is_invariant(action) || !p.eta().is_invariant(action) {
        return Err(KoszulError::NotInvariant(action.to_string()));
    }
    Ok(())
}

/// One summand of the cohomology of `Λ(V) ⋊ Z_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sector {
    /// Exponent `k` of the group element `g^k`.
    pub element: u32,
    pub even: usize,
    pub odd: usize,
    /// Whether the ranks come from the fixed-locus rule rather than a
    /// computation.
    pub rule_based: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwistedReport {
    pub sectors: Vec<Sector>,
    pub even: usize,
    pub odd: usize,
}

/// Identity sector from [`invariant_hh`]; each non-identity element with
/// trivial fixed locus contributes rank 1 in parity `numVars mod 2`.
pub fn twisted_sector_ranks(p: &MCPair, action: &CyclicAction, opts: &HHOptions) -> Result<TwistedReport, KoszulError> {
    check_action(p, action)?;
    for k in 1..action.order() {
        if action.fixed_dim(k) > 0 {
            return Err(KoszulError::FixedLocusPositiveDimensional(k));
        }
    }
    let id = invariant_hh(p, action, opts)?;
    let mut sectors = vec![Sector { element: 0, even: id.even, odd: id.odd, rule_based: false }];
    let odd_vars = p.context().num_vars % 2 == 1;
    for k in 1..action.order() {
        let (even, odd) = if odd_vars { (0, 1) } else { (1, 0) };
        sectors.push(Sector { element: k, even, odd, rule_based: true });
    }
    let even = sectors.iter().map(|s| s.even).sum();
    let odd = sectors.iter().map(|s| s.odd).sum();
    Ok(TwistedReport { sectors, even, odd })
}

/// Tie-break within a degree for Jacobian eliminations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    GradedLex,
    ReverseLex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobianReport {
    /// `dim K[v]/(J + m^{d+1})` for `d = 0..D−1`.
    pub dims: Vec<usize>,
    pub stabilized: bool,
    pub total: Option<usize>,
    /// Standard monomials of the quotient.
    pub basis: Vec<Monomial>,
}

/// Quotient of `K[v]/m^{D+1}` by the span of `m·∂_iW`; reported up to
/// degree `D−1`, the last degree where the partials are exact.
pub fn jacobian_ring(w: &TruncatedSeries, order: MonomialOrder) -> Result<JacobianReport, KoszulError> {
    let ctx = w.context();
    if w.order().is_none_or(|o| o < 2) {
        return Err(KoszulError::OrderTooLow);
    }
    let n = ctx.num_vars;
    let d = ctx.trunc;
    let mut rows: Vec<Monomial> = Vec::new();
    for k in 0..=d {
        let mut ms = monomials_of_degree(n, k);
        if order == MonomialOrder::ReverseLex {
            ms.sort_by(|a, b| a.cmp_revlex(b));
        }
        rows.extend(ms);
    }
    let pos: HashMap<&Monomial, usize> = rows.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let partials: Vec<TruncatedSeries> = (0..n).map(|i| w.partial(i)).collect();
    let mut gens: Vec<SparseVec> = Vec::new();
    for m in monomials_up_to(n, d) {
        for p in &partials {
            let v: SparseVec = p
                .iter()
                .filter(|(pm, _)| pm.degree() + m.degree() <= d)
                .map(|(pm, c)| (pos[&pm.mul(&m)], c.clone()))
                .collect();
            if !v.is_empty() {
                gens.push(v);
            }
        }
    }
    let mut e = Echelon::new(PivotRule::Min);
    for (j, g) in gens.into_iter().enumerate().rev() {
        e.insert(g, j);
    }
    let pivots = e.pivots();
    let mut dims = Vec::new();
    for k in 0..d {
        let upto = rows.partition_point(|m| m.degree() <= k);
        let piv = pivots.partition_point(|&p| p < upto);
        dims.push(upto - piv);
    }
    let contrib = |k: usize| if k == 0 { dims[0] } else { dims[k] - dims[k - 1] };
    let len = dims.len();
    let stabilized = len >= 2 && contrib(len - 1) == 0 && contrib(len - 2) == 0;
    let top = d - 1;
    let mut basis: Vec<Monomial> = rows
        .iter()
        .enumerate()
        .filter(|(i, m)| m.degree() <= top && !e.has_pivot(*i))
        .map(|(_, m)| m.clone())
        .collect();
    basis.sort();
    let report = JacobianReport { total: stabilized.then(|| *dims.last().expect("D >= 1")), dims, stabilized, basis };
    if !stabilized {
        return Err(KoszulError::JacobianNotStabilized(d, Box::new(report)));
    }
    Ok(report)
}

/// A nonzero class found by [`koszul_exactness`].
#[derive(Clone, Debug, PartialEq)]
pub struct ExactnessFailure {
    pub form_degree: usize,
    /// Lowest polynomial degree carried by the witness.
    pub degree: u32,
    pub witness: Polyvector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactnessVerdict {
    pub exact: bool,
    /// Windowed cohomology at the top two form degrees, `(h_top, h_next)`.
    pub ranks: Vec<WindowRanks>,
    pub window: u32,
    pub trunc: u32,
    pub stabilized: bool,
    pub failure: Option<ExactnessFailure>,
}

/// Checks that `ι_{dW}` is acyclic at `Λ^n` and `Λ^{n−1}` inside the window.
/// `WindowRanks.even` holds the top-degree rank and `.odd` the next one.
pub fn koszul_exactness(w: &TruncatedSeries, opts: &HHOptions) -> Result<ExactnessVerdict, KoszulError> {
    let ctx = w.context();
    if w.order().is_none_or(|o| o < 2) {
        return Err(KoszulError::OrderTooLow);
    }
    let n = ctx.num_vars;
    let win = resolve_window(opts, ctx.trunc)?;
    let target = Polyvector::function(w.clone());
    let lvl: Vec<ComplexBasis> = (0..=n).map(|k| ComplexBasis::new(ctx, &FormIndex::of_degree(n, k), None)).collect();
    let top = n;
    let next = n.saturating_sub(1);
    let d_top = Differential::bracket(ctx, &lvl[top], &lvl[top.saturating_sub(1)], &target);
    let d_next = Differential::bracket(ctx, &lvl[next], &lvl[next.saturating_sub(1)], &target);
    let d = ctx.trunc;
    let (h_top, h_next) = rayon::join(
        || window_triple(&lvl[top], &d_top, None, win, d),
        || if next == top { [0; 3] } else { window_triple(&lvl[next], &d_next, Some(&d_top), win, d) },
    );
    let ranks = table_from(win, d, h_top, h_next);
    let stabilized = ranks.iter().all(|r| (r.even, r.odd) == (ranks[0].even, ranks[0].odd));
    let exact = ranks[0].even == 0 && ranks[0].odd == 0;
    let mut failure = None;
    if !exact {
        let (k, basis, out_map, in_map) =
            if ranks[0].even > 0 { (top, &lvl[top], &d_top, None) } else { (next, &lvl[next], &d_next, Some(&d_top)) };
        let reps = class_representatives(basis, out_map, in_map, win, d);
        if let Some(first) = reps.first() {
            let witness = basis.to_polyvector(ctx, first);
            let degree = first.keys().map(|i| basis.degree(*i)).min().unwrap_or(0);
            failure = Some(ExactnessFailure { form_degree: k, degree, witness });
        }
    } else if !stabilized {
        return Err(KoszulError::NotStabilized { window: win, trunc: d, table: ranks });
    }
    Ok(ExactnessVerdict { exact, ranks, window: win, trunc: d, stabilized, failure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exparse::parse_poly;

    fn pair(src: &str, n: usize, d: u32) -> MCPair {
        let ctx = SeriesContext::rational(n, d);
        MCPair::new(parse_poly(src, ctx).unwrap(), Polyvector::zero(ctx)).unwrap()
    }

    #[test]
    fn one_variable_examples() {
        for k in 2..=5u32 {
            let p = pair(&format!("v1^{k}"), 1, 2 * k + 2);
            let r = hh_ranks(&p, &HHOptions::default()).unwrap();
            assert_eq!((r.even, r.odd), (k as usize - 1, 0), "k = {k}");
        }
    }

    #[test]
    fn quadratic_form() {
        let p = pair("v1^2 + v2^2 + v3^2", 3, 6);
        let r = hh_ranks(&p, &HHOptions::default()).unwrap();
        assert_eq!((r.even, r.odd), (1, 0));
        let j = jacobian_ring(p.w(), MonomialOrder::GradedLex).unwrap();
        assert_eq!(j.total, Some(1));
        assert_eq!(j.basis, vec![Monomial::one(3)]);
    }

    #[test]
    fn jacobian_of_power() {
        let ctx = SeriesContext::rational(1, 8);
        let j = jacobian_ring(&parse_poly("v1^4", ctx).unwrap(), MonomialOrder::GradedLex).unwrap();
        assert_eq!(j.total, Some(3));
        assert_eq!(j.basis.len(), 3);
    }

    #[test]
    fn degenerate_witness() {
        let ctx = SeriesContext::rational(3, 8);
        let v = koszul_exactness(&parse_poly("v1^2*v2^2", ctx).unwrap(), &HHOptions::default()).unwrap();
        assert!(!v.exact);
        let f = v.failure.unwrap();
        assert_eq!((f.form_degree, f.degree), (2, 1));
    }
}
