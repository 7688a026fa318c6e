//! Diagonal cyclic group actions encoded by integer weights.
//!
//! The generator acts on `v_i` by `ζ^{w_i}` with `ζ` a primitive `n`-th root
//! of unity and on `ξ_i` by `ζ^{-w_i}`. Everything here reduces to residue
//! arithmetic on weights; roots of unity are never materialized.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::fdalg::{AlgebraError, Coefficient, FiniteDimAlgebra};
use crate::polyvec::{FormIndex, Polyvector};
use crate::series::{monomials_up_to, Monomial, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ActionError {
    #[error("group order must be at least 1")]
    ZeroOrder,
    #[error("weight {weight} is not a residue mod {order}")]
    WeightRange { weight: u32, order: u32 },
    #[error("expected {expected} weights, got {got}")]
    Arity { expected: usize, got: usize },
}

/// Order-`n` diagonal action with weight vector `w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclicAction {
    order: u32,
    weights: Vec<u32>,
}

impl CyclicAction {
    pub fn new(order: u32, weights: Vec<u32>) -> Result<Self, ActionError> {
        if order == 0 {
            return Err(ActionError::ZeroOrder);
        }
        if let Some(&w) = weights.iter().find(|&&w| w >= order) {
            return Err(ActionError::WeightRange { weight: w, order });
        }
        Ok(CyclicAction { order, weights })
    }

    /// The action of order `2g+1` with weights `(1, 1, 2g−1)`.
    pub fn canonical(genus: u32) -> Self {
        assert!(genus >= 1);
        CyclicAction { order: 2 * genus + 1, weights: vec![1, 1, 2 * genus - 1] }
    }

    pub fn trivial(num_vars: usize) -> Self {
        CyclicAction { order: 1, weights: vec![0; num_vars] }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn num_vars(&self) -> usize {
        self.weights.len()
    }

    pub fn check_arity(&self, num_vars: usize) -> Result<(), ActionError> {
        if self.weights.len() == num_vars {
            Ok(())
        } else {
            Err(ActionError::Arity { expected: num_vars, got: self.weights.len() })
        }
    }

    /// Number of coordinates fixed by the `k`-th power of the generator.
    pub fn fixed_dim(&self, k: u32) -> usize {
        self.weights.iter().filter(|&&w| (k as u64 * w as u64).is_multiple_of(self.order as u64)).count()
    }

    /// Weight of a form index alone: `−Σ_{i∈I} w_i mod n`.
    pub fn form_weight(&self, idx: FormIndex) -> u32 {
        let n = self.order as u64;
        let s: u64 = idx.indices().iter().map(|&i| self.weights[i] as u64).sum::<u64>() % n;
        ((n - s) % n) as u32
    }

    /// Sum of the weights on `I` (the twist picked up by `ξ_I`).
    pub fn form_twist(&self, idx: FormIndex) -> u32 {
        let n = self.order as u64;
        (idx.indices().iter().map(|&i| self.weights[i] as u64).sum::<u64>() % n) as u32
    }
}

impl fmt::Display for CyclicAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        write!(f, "cyclic {} weights {}", self.order, w.join(" "))
    }
}

/// `Σ a_i w_i − Σ_{i∈I} w_i mod n`.
pub fn monomial_weight(m: &Monomial, idx: FormIndex, a: &CyclicAction) -> u32 {
    let n = a.order as u64;
    let s: u64 = m.exps().iter().zip(&a.weights).map(|(&e, &w)| e as u64 * w as u64 % n).sum::<u64>() % n;
    ((s + a.form_weight(idx) as u64) % n) as u32
}

/// Types on which the Reynolds projection acts.
pub trait Reynolds: Sized {
    /// Keeps exactly the weight-0 terms.
    fn project(&self, a: &CyclicAction) -> Self;
    fn is_invariant(&self, a: &CyclicAction) -> bool;
}

impl Reynolds for TruncatedSeries {
    fn project(&self, a: &CyclicAction) -> Self {
        let mut out = TruncatedSeries::zero(self.context());
        for (m, c) in self.iter() {
            if monomial_weight(m, FormIndex::EMPTY, a) == 0 {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    fn is_invariant(&self, a: &CyclicAction) -> bool {
        self.iter().all(|(m, _)| monomial_weight(m, FormIndex::EMPTY, a) == 0)
    }
}

impl Reynolds for Polyvector {
    fn project(&self, a: &CyclicAction) -> Self {
        let mut out = Polyvector::zero(self.context());
        for (i, m, c) in self.terms() {
            if monomial_weight(m, i, a) == 0 {
                out.add_term(i, m.clone(), c.clone());
            }
        }
        out
    }

    fn is_invariant(&self, a: &CyclicAction) -> bool {
        self.terms().all(|(i, m, _)| monomial_weight(m, i, a) == 0)
    }
}

pub fn project_invariant<T: Reynolds>(x: &T, a: &CyclicAction) -> T {
    x.project(a)
}

/// All weight-0 monomials of degree `1..=d`, in graded-lex order.
pub fn invariant_monomials_up_to(d: u32, a: &CyclicAction) -> Vec<Monomial> {
    monomials_up_to(a.num_vars(), d)
        .into_iter()
        .filter(|m| m.degree() >= 1 && monomial_weight(m, FormIndex::EMPTY, a) == 0)
        .collect()
}

/// Element of the group ring `Q[Z_n]`: a rational combination of powers of a
/// formal root of unity `z` with `z^n = 1`. Order 0 marks a plain rational
/// that adopts the order of whatever it meets.
#[derive(Clone, Debug)]
pub struct RootOfUnityCoeff {
    order: u32,
    terms: BTreeMap<u32, BigRational>,
}

impl PartialEq for RootOfUnityCoeff {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for RootOfUnityCoeff {}

impl RootOfUnityCoeff {
    /// `c · z^r`.
    pub fn monomial(order: u32, r: u32, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(r % order.max(1), c);
        }
        RootOfUnityCoeff { order, terms }
    }

    pub fn terms(&self) -> &BTreeMap<u32, BigRational> {
        &self.terms
    }

    fn merged_order(&self, other: &Self) -> u32 {
        match (self.order, other.order) {
            (0, n) | (n, 0) => n,
            (a, b) => {
                assert_eq!(a, b, "mixing roots of unity of different orders");
                a
            }
        }
    }
}

impl fmt::Display for RootOfUnityCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|(r, c)| if *r == 0 { c.to_string() } else { format!("{c}*z^{r}") }).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl Coefficient for RootOfUnityCoeff {
    fn zero() -> Self {
        RootOfUnityCoeff { order: 0, terms: BTreeMap::new() }
    }

    fn one() -> Self {
        RootOfUnityCoeff::monomial(0, 0, BigRational::one())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn plus(&self, other: &Self) -> Self {
        let order = self.merged_order(other);
        let mut terms = self.terms.clone();
        for (r, c) in &other.terms {
            let e = terms.entry(*r).or_insert_with(BigRational::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(r);
            }
        }
        RootOfUnityCoeff { order, terms }
    }

    fn times(&self, other: &Self) -> Self {
        let order = self.merged_order(other);
        let mut terms: BTreeMap<u32, BigRational> = BTreeMap::new();
        for (r, c) in &self.terms {
            for (s, d) in &other.terms {
                let k = if order == 0 { 0 } else { (r + s) % order };
                let e = terms.entry(k).or_insert_with(BigRational::zero);
                *e += c * d;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        RootOfUnityCoeff { order, terms }
    }

    fn negated(&self) -> Self {
        RootOfUnityCoeff { order: self.order, terms: self.terms.iter().map(|(r, c)| (*r, -c)).collect() }
    }
}

/// The algebra `Λ(V) ⋊ Z_n` with basis `γ^a ⊗ ξ_I` and product
/// `(γ^a⊗ξ_I)(γ^b⊗ξ_J) = z^{b·Σ_{i∈I} w_i} · (ξ_I∧ξ_J) γ^{a+b}`.
pub fn build_semidirect(num_vars: usize, a: &CyclicAction) -> Result<FiniteDimAlgebra<RootOfUnityCoeff>, AlgebraError> {
    a.check_arity(num_vars).map_err(|e| AlgebraError::BadParams(e.to_string()))?;
    let n = a.order;
    let forms = FormIndex::all(num_vars);
    let basis: Vec<(u32, FormIndex)> = (0..n).flat_map(|g| forms.iter().map(move |f| (g, *f))).collect();
    let pos: BTreeMap<(u32, u32), usize> = basis.iter().enumerate().map(|(k, (g, f))| ((*g, f.bits()), k)).collect();
    let labels = basis.iter().map(|(g, f)| format!("g{g}.{}", f.render())).collect();
    let degrees = basis.iter().map(|(_, f)| (f.degree() % 2) as u8).collect();
    let table = basis
        .iter()
        .map(|(ga, i)| {
            basis
                .iter()
                .map(|(gb, j)| match i.wedge(*j) {
                    None => vec![],
                    Some((sign, k)) => {
                        let twist = (*gb as u64 * a.form_twist(*i) as u64 % n as u64) as u32;
                        let c = RootOfUnityCoeff::monomial(n, twist, BigRational::from_integer(sign.into()));
                        vec![(pos[&((ga + gb) % n, k.bits())], c)]
                    }
                })
                .collect()
        })
        .collect();
    FiniteDimAlgebra::new(labels, degrees, table, 0)
}
