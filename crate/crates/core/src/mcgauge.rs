//! Maurer–Cartan pairs `(W, η)`, gauge transformations acting on them and
//! the equivariant normal-form reduction to `λ v1v2v3 + Σ μ_i v_i^{2g+1}`.

use std::fmt;

use serde_json::{json, Value};

use crate::cyclic::{CyclicAction, Reynolds};
use crate::exparse::{parse_polyvector_named, parse_scalar};
use crate::koszul::{ComplexBasis, Differential};
use crate::linalg::{Echelon, Matrix, PivotRule, SparseVec};
use crate::polyvec::{contract_dw, FormIndex, Polyvector};
use crate::scalar::Scalar;
use crate::series::{monomials_up_to, Monomial, SeriesContext, SeriesError, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GaugeError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("{0}")]
    Shape(String),
    #[error("gauge field has order {found:?}, need at least {needed}")]
    OrderViolation { found: Option<u32>, needed: u32 },
    #[error("eta is not a coboundary: the system is infeasible in degree {degree}")]
    NotCoboundary { degree: u32 },
    #[error("rescaling parameter must be nonzero")]
    ZeroEpsilon,
    #[error("linear change is not invertible")]
    Singular,
    #[error("cubic part is degenerate or of unsupported shape: {0}")]
    CubicDegenerate(String),
    #[error("the cubic part needs the Gaussian field to reach the v1*v2*v3 shape")]
    RequiresGaussianField,
    #[error("tail in degree {degree} is not in the image of the gauge action")]
    TailUnsolvable { degree: u32 },
    #[error("truncation {trunc} is too small, need at least {needed}")]
    TruncationTooSmall { trunc: u32, needed: u32 },
    #[error("W is not invariant under {0}")]
    NotInvariant(String),
    #[error("malformed gauge log: {0}")]
    BadLog(String),
}

/// A formal function `W` and a bivector `η`.
#[derive(Clone, Debug, PartialEq)]
pub struct MCPair {
    w: TruncatedSeries,
    eta: Polyvector,
}

impl MCPair {
    /// Requires order ≥ 2 for `W` and every coefficient of `η`, and `η` in
    /// form degree 2. Use [`MCPair::order_ok`] for the stricter order-3 check.
    pub fn new(w: TruncatedSeries, eta: Polyvector) -> Result<Self, GaugeError> {
        if w.context() != eta.context() {
            return Err(SeriesError::ContextMismatch(w.context(), eta.context()).into());
        }
        if eta.components().keys().any(|i| i.degree() != 2) {
            return Err(GaugeError::Shape("eta must be a 2-form".into()));
        }
        if w.order().is_some_and(|o| o < 2) {
            return Err(GaugeError::OrderViolation { found: w.order(), needed: 2 });
        }
        if eta.order().is_some_and(|o| o < 2) {
            return Err(GaugeError::OrderViolation { found: eta.order(), needed: 2 });
        }
        Ok(MCPair { w, eta })
    }

    pub fn function(w: TruncatedSeries) -> Result<Self, GaugeError> {
        let ctx = w.context();
        Self::new(w, Polyvector::zero(ctx))
    }

    pub fn w(&self) -> &TruncatedSeries {
        &self.w
    }

    pub fn eta(&self) -> &Polyvector {
        &self.eta
    }

    pub fn context(&self) -> SeriesContext {
        self.w.context()
    }

    /// `W + η` as a single polyvector.
    pub fn total(&self) -> Polyvector {
        let mut t = self.eta.clone();
        t.add_component(FormIndex::EMPTY, &self.w);
        t
    }

    /// No coefficients of polynomial degree below 3.
    pub fn order_ok(&self) -> bool {
        self.w.order().is_none_or(|o| o >= 3) && self.eta.order().is_none_or(|o| o >= 3)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BracketCheck {
    pub name: &'static str,
    pub vanishes: bool,
    /// The bracket up to degree `D−1`.
    pub value: Polyvector,
    pub note: Option<&'static str>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct McVerdict {
    pub pass: bool,
    pub checks: Vec<BracketCheck>,
}

impl McVerdict {
    pub fn first_failure(&self) -> Option<&BracketCheck> {
        self.checks.iter().find(|c| !c.vanishes)
    }
}

fn below_top(p: &Polyvector) -> Polyvector {
    let top = p.context().trunc.saturating_sub(1);
    p.map_series(|_, s| s.degree_range(0, top))
}

/// Checks `[W,W] = [η,η] = [W,η] = 0` exactly up to degree `D−1`.
pub fn mc_check(p: &MCPair) -> McVerdict {
    let ctx = p.context();
    let wv = Polyvector::function(p.w.clone());
    let ee = below_top(&p.eta.schouten(&p.eta).expect("same context"));
    let we = below_top(&wv.schouten(&p.eta).expect("same context"));
    let checks = vec![
        BracketCheck {
            name: "[W,W]",
            vanishes: true,
            value: Polyvector::zero(ctx),
            note: Some("the bracket of two functions vanishes identically"),
        },
        BracketCheck { name: "[eta,eta]", vanishes: ee.is_zero(), value: ee, note: None },
        BracketCheck { name: "[W,eta]", vanishes: we.is_zero(), value: we, note: None },
    ];
    McVerdict { pass: checks.iter().all(|c| c.vanishes), checks }
}

/// One gauge transformation.
#[derive(Clone, Debug, PartialEq)]
pub enum GaugeStep {
    /// Exponentiated vector field; coefficients of order ≥ 2.
    VectorField(Polyvector),
    /// Shifts `η` by `[g³, W]`.
    ThreeForm(Polyvector),
    /// `v_i ↦ Σ_j M_ij v_j`, with the contragredient action on `ξ`.
    LinearChange(Matrix),
    /// Multiplies the degree-`j` part of a `k`-form by `ε^{j−k−2}`.
    CStarRescale(Scalar),
}

impl GaugeStep {
    pub fn kind(&self) -> &'static str {
        match self {
            GaugeStep::VectorField(_) => "vector_field",
            GaugeStep::ThreeForm(_) => "three_form",
            GaugeStep::LinearChange(_) => "linear_change",
            GaugeStep::CStarRescale(_) => "cstar_rescale",
        }
    }

    pub fn validate(&self, ctx: SeriesContext) -> Result<(), GaugeError> {
        match self {
            GaugeStep::VectorField(g) => check_vector_field(g, ctx),
            GaugeStep::ThreeForm(g) => {
                if g.context() != ctx {
                    return Err(SeriesError::ContextMismatch(g.context(), ctx).into());
                }
                if g.components().keys().any(|i| i.degree() != 3) {
                    return Err(GaugeError::Shape("three-form step must be a 3-form".into()));
                }
                Ok(())
            }
            GaugeStep::LinearChange(m) => {
                if m.rows() != ctx.num_vars || m.cols() != ctx.num_vars {
                    return Err(GaugeError::Shape(format!("matrix must be {0}x{0}", ctx.num_vars)));
                }
                if let Some(x) = (0..m.rows()).flat_map(|i| m.row(i).iter()).find(|x| !ctx.field.contains(x)) {
                    return Err(SeriesError::FieldMismatch(x.clone(), ctx.field).into());
                }
                m.inverse().map(|_| ()).ok_or(GaugeError::Singular)
            }
            GaugeStep::CStarRescale(e) => {
                if e.is_zero() {
                    return Err(GaugeError::ZeroEpsilon);
                }
                if !ctx.field.contains(e) {
                    return Err(SeriesError::FieldMismatch(e.clone(), ctx.field).into());
                }
                Ok(())
            }
        }
    }

    /// Acts on a pair.
    pub fn apply(&self, p: &MCPair) -> Result<MCPair, GaugeError> {
        let ctx = p.context();
        self.validate(ctx)?;
        match self {
            GaugeStep::VectorField(g) => {
                let w = exp_adjoint(g, &Polyvector::function(p.w.clone()))?.get(FormIndex::EMPTY);
                let eta = exp_adjoint(g, &p.eta)?;
                Ok(MCPair { w, eta })
            }
            GaugeStep::ThreeForm(g) => apply_threeform(p, g),
            GaugeStep::LinearChange(m) => {
                let w = linear_change_series(&p.w, m)?;
                let eta = linear_change_polyvector(&p.eta, m)?;
                Ok(MCPair { w, eta })
            }
            GaugeStep::CStarRescale(e) => {
                Ok(MCPair { w: cstar_rescale(&p.w, e)?, eta: cstar_rescale_polyvector(&p.eta, e)? })
            }
        }
    }

    /// The step undoing `self`.
    pub fn inverse(&self) -> Result<GaugeStep, GaugeError> {
        Ok(match self {
            GaugeStep::VectorField(g) => GaugeStep::VectorField(g.neg()),
            GaugeStep::ThreeForm(g) => GaugeStep::ThreeForm(g.neg()),
            GaugeStep::LinearChange(m) => GaugeStep::LinearChange(m.inverse().ok_or(GaugeError::Singular)?),
            GaugeStep::CStarRescale(e) => GaugeStep::CStarRescale(e.inv().ok_or(GaugeError::ZeroEpsilon)?),
        })
    }

    pub fn to_json(&self, names: &[String]) -> Value {
        match self {
            GaugeStep::VectorField(g) | GaugeStep::ThreeForm(g) => {
                json!({"step": self.kind(), "field": g.render(names)})
            }
            GaugeStep::LinearChange(m) => {
                let rows: Vec<Vec<String>> =
                    (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.to_string()).collect()).collect();
                json!({"step": self.kind(), "matrix": rows})
            }
            GaugeStep::CStarRescale(e) => json!({"step": self.kind(), "epsilon": e.to_string()}),
        }
    }

    pub fn from_json(v: &Value, names: &[String], ctx: SeriesContext) -> Result<GaugeStep, GaugeError> {
        let bad = |s: &str| GaugeError::BadLog(s.to_string());
        let kind = v.get("step").and_then(Value::as_str).ok_or_else(|| bad("missing step kind"))?;
        let text = |key: &str| v.get(key).and_then(Value::as_str).ok_or_else(|| bad(&format!("missing `{key}`")));
        let step = match kind {
            "vector_field" | "three_form" => {
                let g = parse_polyvector_named(text("field")?, names, ctx).map_err(|e| bad(&e.to_string()))?;
                if kind == "vector_field" {
                    GaugeStep::VectorField(g)
                } else {
                    GaugeStep::ThreeForm(g)
                }
            }
            "linear_change" => {
                let rows = v.get("matrix").and_then(Value::as_array).ok_or_else(|| bad("missing `matrix`"))?;
                let mut out = Vec::new();
                for r in rows {
                    let r = r.as_array().ok_or_else(|| bad("matrix rows must be arrays"))?;
                    let mut row = Vec::new();
                    for x in r {
                        let s = x.as_str().ok_or_else(|| bad("matrix entries must be strings"))?;
                        row.push(parse_scalar(s, ctx.field).map_err(|e| bad(&e.to_string()))?);
                    }
                    out.push(row);
                }
                if out.iter().any(|r| r.len() != out.len()) {
                    return Err(bad("matrix must be square"));
                }
                GaugeStep::LinearChange(Matrix::from_rows(out))
            }
            "cstar_rescale" => {
                GaugeStep::CStarRescale(parse_scalar(text("epsilon")?, ctx.field).map_err(|e| bad(&e.to_string()))?)
            }
            other => return Err(bad(&format!("unknown step `{other}`"))),
        };
        step.validate(ctx)?;
        Ok(step)
    }
}

fn check_vector_field(g: &Polyvector, ctx: SeriesContext) -> Result<(), GaugeError> {
    if g.context() != ctx {
        return Err(SeriesError::ContextMismatch(g.context(), ctx).into());
    }
    if g.components().keys().any(|i| i.degree() != 1) {
        return Err(GaugeError::Shape("vector-field step must be a 1-vector".into()));
    }
    if g.order().is_some_and(|o| o < 2) {
        return Err(GaugeError::OrderViolation { found: g.order(), needed: 2 });
    }
    Ok(())
}

/// `Σ_m ad(g)^m x / m!`. Terminates because each bracket with a field of
/// order ≥ 2 raises the polynomial degree.
pub fn exp_adjoint(g: &Polyvector, x: &Polyvector) -> Result<Polyvector, GaugeError> {
    check_vector_field(g, x.context())?;
    let mut out = x.clone();
    let mut term = x.clone();
    let mut m = 1i64;
    while !term.is_zero() {
        term = g.schouten(&term)?.scale(&Scalar::frac(1, m));
        out = out.add(&term)?;
        m += 1;
    }
    Ok(out)
}

/// `exp(g)·W`.
pub fn exp_vector_field(w: &TruncatedSeries, g: &Polyvector) -> Result<TruncatedSeries, GaugeError> {
    Ok(exp_adjoint(g, &Polyvector::function(w.clone()))?.get(FormIndex::EMPTY))
}

/// `(W, η) ↦ (W, η + [g³, W])`.
pub fn apply_threeform(p: &MCPair, g: &Polyvector) -> Result<MCPair, GaugeError> {
    GaugeStep::ThreeForm(g.clone()).validate(p.context())?;
    let eta = p.eta.add(&contract_dw(g, &p.w)?)?;
    Ok(MCPair { w: p.w.clone(), eta })
}

/// A 3-form `g³` with `[g³, W] = η` up to degree `D−1`; the zero solution is
/// chosen along any kernel.
pub fn solve_eta_coboundary(p: &MCPair) -> Result<Polyvector, GaugeError> {
    let ctx = p.context();
    let n = ctx.num_vars;
    if p.eta.is_zero() || n < 3 {
        return if below_top(&p.eta).is_zero() {
            Ok(Polyvector::zero(ctx))
        } else {
            Err(GaugeError::NotCoboundary { degree: p.eta.order().unwrap_or(0) })
        };
    }
    let top = ctx.trunc - 1;
    let src = ComplexBasis::new(ctx, &FormIndex::of_degree(n, 3), None);
    let dst = ComplexBasis::new(ctx, &FormIndex::of_degree(n, 2), None);
    let map = Differential::bracket(ctx, &src, &dst, &Polyvector::function(p.w.clone()));
    let target = |d: u32| -> SparseVec {
        p.eta
            .terms()
            .filter(|(_, m, _)| m.degree() <= d)
            .map(|(i, m, c)| (dst.index(m, i).expect("2-form basis"), c.clone()))
            .collect()
    };
    let solve = |d: u32| -> Option<SparseVec> {
        let mut e = Echelon::tracking(PivotRule::Min);
        for j in 0..map.num_cols() {
            e.insert(map.truncated_col(j, d), j);
        }
        e.express(&target(d))
    };
    match solve(top) {
        Some(x) => Ok(src.to_polyvector(ctx, &x)),
        None => {
            let degree = (0..=top).find(|&d| solve(d).is_none()).unwrap_or(top);
            Err(GaugeError::NotCoboundary { degree })
        }
    }
}

/// Multiplies the degree-`j` part by `ε^{j−2}`.
pub fn cstar_rescale(w: &TruncatedSeries, e: &Scalar) -> Result<TruncatedSeries, GaugeError> {
    rescale_series(w, e, 2)
}

fn rescale_series(f: &TruncatedSeries, e: &Scalar, shift: i64) -> Result<TruncatedSeries, GaugeError> {
    if e.is_zero() {
        return Err(GaugeError::ZeroEpsilon);
    }
    Ok(f.map_coeffs(|m, c| c * &e.powi(m.degree() as i64 - shift).expect("nonzero")))
}

pub fn cstar_rescale_polyvector(p: &Polyvector, e: &Scalar) -> Result<Polyvector, GaugeError> {
    if e.is_zero() {
        return Err(GaugeError::ZeroEpsilon);
    }
    Ok(p.map_series(|i, s| rescale_series(s, e, i.degree() as i64 + 2).expect("nonzero")))
}

fn linear_images(ctx: SeriesContext, m: &Matrix) -> Vec<TruncatedSeries> {
    (0..ctx.num_vars)
        .map(|i| {
            let mut f = TruncatedSeries::zero(ctx);
            for (j, x) in m.row(i).iter().enumerate() {
                f.add_term(Monomial::var(ctx.num_vars, j), x.clone());
            }
            f
        })
        .collect()
}

pub fn linear_change_series(f: &TruncatedSeries, m: &Matrix) -> Result<TruncatedSeries, GaugeError> {
    Ok(f.substitute(&linear_images(f.context(), m))?)
}

pub fn linear_change_polyvector(p: &Polyvector, m: &Matrix) -> Result<Polyvector, GaugeError> {
    let ctx = p.context();
    let n = ctx.num_vars;
    let inv = m.inverse().ok_or(GaugeError::Singular)?;
    let phi = linear_images(ctx, m);
    let xi: Vec<Polyvector> = (0..n)
        .map(|i| {
            let mut v = Polyvector::zero(ctx);
            for k in 0..n {
                v.add_term(FormIndex::single(k), Monomial::one(n), inv.get(k, i).clone());
            }
            v
        })
        .collect();
    let mut out = Polyvector::zero(ctx);
    for (idx, f) in p.components() {
        let mut form = Polyvector::function(TruncatedSeries::one(ctx));
        for i in idx.indices() {
            form = form.wedge(&xi[i])?;
        }
        out = out.add(&form.mul_function(&f.substitute(&phi)?)?)?;
    }
    Ok(out)
}

/// Applies a gauge log in order.
pub fn replay(log: &[GaugeStep], p: &MCPair) -> Result<MCPair, GaugeError> {
    log.iter().try_fold(p.clone(), |acc, s| s.apply(&acc))
}

/// Shape of the cubic part of an invariant `W` in three variables.
#[derive(Clone, Debug, PartialEq)]
pub enum CubicClass {
    /// `λ v1v2v3`.
    TypeA(Scalar),
    /// `λ (v1² + v2²) v3`; `witness` is a linear change commuting with the
    /// action that carries it to `λ v1v2v3` (entries in `Q(i)`).
    TypeB {
        lambda: Scalar,
        witness: Option<Matrix>,
    },
    Other(TruncatedSeries),
}

fn mono(exps: [u32; 3]) -> Monomial {
    Monomial::new(exps.to_vec())
}

pub fn type_b_witness() -> Matrix {
    let h = Scalar::frac(1, 2);
    let ih = &Scalar::i() * &h;
    Matrix::from_rows(vec![
        vec![h.clone(), h, Scalar::zero()],
        vec![-ih.clone(), ih, Scalar::zero()],
        vec![Scalar::zero(), Scalar::zero(), Scalar::one()],
    ])
}

pub fn classify_cubic(w: &TruncatedSeries, action: &CyclicAction) -> CubicClass {
    let c = w.homogeneous_part(3);
    if w.context().num_vars != 3 || w.order().is_some_and(|o| o < 3) {
        return CubicClass::Other(c);
    }
    let terms: Vec<(&Monomial, &Scalar)> = c.iter().collect();
    match terms.as_slice() {
        [(m, l)] if **m == mono([1, 1, 1]) => CubicClass::TypeA((*l).clone()),
        [(a, la), (b, lb)]
            if la == lb && {
                let mut ms = [(*a).clone(), (*b).clone()];
                ms.sort();
                ms == {
                    let mut t = [mono([2, 0, 1]), mono([0, 2, 1])];
                    t.sort();
                    t
                }
            } =>
        {
            let ws = action.weights();
            let commutes = ws.len() == 3 && ws[0] == ws[1];
            CubicClass::TypeB { lambda: (*la).clone(), witness: commutes.then(type_b_witness) }
        }
        _ => CubicClass::Other(c),
    }
}

/// Exponents for reaching `−v1v2v3 + Σ v_i^{2g+1}` from
/// `λ v1v2v3 + Σ μ_i v_i^{2g+1}` by `v_i ↦ a_i v_i` and a rescaling by `ε`:
/// `ε^{4g−4} = −λ^{2g+1}/(μ1μ2μ3)` and `a_i^{2g+1} = 1/(μ_i ε^{2g−1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicScaling {
    pub epsilon_power: u32,
    pub epsilon_target: Scalar,
    pub coordinate_power: u32,
    pub epsilon_exponent_in_coordinates: u32,
    pub coordinate_targets: Vec<String>,
}

impl SymbolicScaling {
    fn new(genus: u32, lambda: &Scalar, mu: &[Scalar; 3]) -> Self {
        let p = 2 * genus + 1;
        let prod = &(&mu[0] * &mu[1]) * &mu[2];
        let target = -(&lambda.pow(p) / &prod);
        SymbolicScaling {
            epsilon_power: 4 * genus - 4,
            epsilon_target: target,
            coordinate_power: p,
            epsilon_exponent_in_coordinates: 2 * genus - 1,
            coordinate_targets: mu.iter().map(|m| format!("1/(({m})*eps^{})", 2 * genus - 1)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalFormStatus {
    Normalized,
}

impl fmt::Display for NormalFormStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("normalized")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormReport {
    pub input: TruncatedSeries,
    pub genus: u32,
    pub gauge_log: Vec<GaugeStep>,
    pub output: TruncatedSeries,
    pub lambda: Scalar,
    pub mu: [Scalar; 3],
    pub residual: TruncatedSeries,
    pub status: NormalFormStatus,
    pub scaling: SymbolicScaling,
}

fn model(ctx: SeriesContext, lambda: &Scalar, mu: &[Scalar; 3], genus: u32) -> TruncatedSeries {
    let p = 2 * genus + 1;
    let mut f = TruncatedSeries::zero(ctx);
    f.add_term(mono([1, 1, 1]), lambda.clone());
    for (i, m) in mu.iter().enumerate() {
        let mut e = [0; 3];
        e[i] = p;
        f.add_term(mono(e), m.clone());
    }
    f
}

fn coefficients(w: &TruncatedSeries, genus: u32) -> (Scalar, [Scalar; 3]) {
    let p = 2 * genus + 1;
    let mu = [mono([p, 0, 0]), mono([0, p, 0]), mono([0, 0, p])].map(|m| w.coeff(&m));
    (w.coeff(&mono([1, 1, 1])), mu)
}

/// `W − (λ v1v2v3 + Σ μ_i v_i^{2g+1})` with the current coefficients.
pub fn residual(w: &TruncatedSeries, genus: u32) -> TruncatedSeries {
    let (l, mu) = coefficients(w, genus);
    w.sub(&model(w.context(), &l, &mu, genus)).expect("same context")
}

/// Splits `p = v1v2·q3 + v2v3·q1 + v3v1·q2`, sending each monomial to the
/// first pair of variables dividing it.
fn split_mixed(p: &TruncatedSeries) -> Option<[TruncatedSeries; 3]> {
    let ctx = p.context();
    let mut q = [TruncatedSeries::zero(ctx), TruncatedSeries::zero(ctx), TruncatedSeries::zero(ctx)];
    for (m, c) in p.iter() {
        let (slot, div) = [(2, mono([1, 1, 0])), (0, mono([0, 1, 1])), (1, mono([1, 0, 1]))]
            .into_iter()
            .find(|(_, d)| d.divides(m))?;
        q[slot].add_term(m.div(&div).expect("divides"), c.clone());
    }
    Some(q)
}

/// Least-degree-first solve of `Σ_j f_j ∂_jW_μ ≡ t mod m^{d+1}` with
/// invariant `f_j ξ_j` of order ≥ 2; returns `g = Σ f_j ξ_j` with
/// `[g, W_μ] ≡ −t`.
fn solve_tail(wmu: &TruncatedSeries, t: &TruncatedSeries, d: u32, action: &CyclicAction) -> Option<Polyvector> {
    let ctx = wmu.context();
    let rows: Vec<Monomial> = monomials_up_to(3, d);
    let pos = |m: &Monomial| rows.binary_search(m).ok();
    let wv = Polyvector::function(wmu.clone());
    let mut unknowns = Vec::new();
    let mut e = Echelon::tracking(PivotRule::Min);
    for m in monomials_up_to(3, d.saturating_sub(2)).into_iter().filter(|m| m.degree() >= 2) {
        for j in 0..3 {
            let x = Polyvector::component(
                FormIndex::single(j),
                TruncatedSeries::monomial(ctx, m.clone(), Scalar::one()).ok()?,
            );
            if !x.is_invariant(action) {
                continue;
            }
            let col: SparseVec = x
                .schouten(&wv)
                .ok()?
                .get(FormIndex::EMPTY)
                .iter()
                .filter(|(mm, _)| mm.degree() <= d)
                .map(|(mm, c)| (pos(mm).expect("row"), c.clone()))
                .collect();
            e.insert(col, unknowns.len());
            unknowns.push(x);
        }
    }
    let rhs: SparseVec = t.iter().map(|(m, c)| (pos(m).expect("row"), -c.clone())).collect();
    let sol = e.express(&rhs)?;
    let mut g = Polyvector::zero(ctx);
    for (k, c) in sol {
        g = g.add(&unknowns[k].scale(&c)).ok()?;
    }
    Some(g)
}

/// Reduces an invariant `W` with cubic part `λ v1v2v3` (or the Gaussian
/// shape, when working over `Q(i)`) to `λ v1v2v3 + Σ μ_i v_i^{2g+1}` up to
/// the truncation order, recording every gauge step.
pub fn normal_form(w: &TruncatedSeries, action: &CyclicAction, genus: u32) -> Result<NormalFormReport, GaugeError> {
    let ctx = w.context();
    if ctx.num_vars != 3 {
        return Err(GaugeError::Shape("normal form needs three variables".into()));
    }
    if genus < 2 || *action != CyclicAction::canonical(genus) {
        return Err(GaugeError::Shape(format!("action must be {}", CyclicAction::canonical(genus.max(2)))));
    }
    let p = 2 * genus + 1;
    let needed = p + 3;
    if ctx.trunc < needed {
        return Err(GaugeError::TruncationTooSmall { trunc: ctx.trunc, needed });
    }
    if !w.is_invariant(action) {
        return Err(GaugeError::NotInvariant(action.to_string()));
    }
    let mut log = Vec::new();
    let mut cur = MCPair::function(w.clone())?;
    let lambda = match classify_cubic(w, action) {
        CubicClass::TypeA(l) if !l.is_zero() => l,
        CubicClass::TypeB { lambda, witness: Some(m) } if !lambda.is_zero() => {
            if ctx.field != crate::scalar::Field::QI {
                return Err(GaugeError::RequiresGaussianField);
            }
            let step = GaugeStep::LinearChange(m);
            cur = step.apply(&cur)?;
            log.push(step);
            lambda
        }
        other => return Err(GaugeError::CubicDegenerate(format!("{other:?}"))),
    };
    let inv_lambda = lambda.inv().expect("nonzero");
    let push = |g: Polyvector, cur: &mut MCPair, log: &mut Vec<GaugeStep>| -> Result<(), GaugeError> {
        let g = g.project(action);
        if g.is_zero() {
            return Ok(());
        }
        let step = GaugeStep::VectorField(g);
        *cur = step.apply(cur)?;
        log.push(step);
        Ok(())
    };
    for d in 4..=p {
        let pd = residual(cur.w(), genus).homogeneous_part(d);
        if pd.is_zero() {
            continue;
        }
        let q = split_mixed(&pd).ok_or_else(|| GaugeError::CubicDegenerate(format!("unsplittable degree-{d} part")))?;
        let mut g = Polyvector::zero(ctx);
        for (i, qi) in q.iter().enumerate() {
            g.add_component(FormIndex::single(i), &qi.scale(&inv_lambda));
        }
        push(g, &mut cur, &mut log)?;
        debug_assert!(residual(cur.w(), genus).homogeneous_part(d).is_zero());
    }
    for d in p + 1..=ctx.trunc {
        let td = residual(cur.w(), genus).homogeneous_part(d);
        if td.is_zero() {
            continue;
        }
        let (l, mu) = coefficients(cur.w(), genus);
        let wmu = model(ctx, &l, &mu, genus);
        let g = solve_tail(&wmu, &td, d, action).ok_or(GaugeError::TailUnsolvable { degree: d })?;
        push(g, &mut cur, &mut log)?;
        if !residual(cur.w(), genus).homogeneous_part(d).is_zero() {
            return Err(GaugeError::TailUnsolvable { degree: d });
        }
    }
    let output = cur.w().clone();
    let (lambda, mu) = coefficients(&output, genus);
    let res = residual(&output, genus);
    let scaling = SymbolicScaling::new(genus, &lambda, &mu);
    Ok(NormalFormReport {
        input: w.clone(),
        genus,
        gauge_log: log,
        output,
        lambda,
        mu,
        residual: res,
        status: NormalFormStatus::Normalized,
        scaling,
    })
}
