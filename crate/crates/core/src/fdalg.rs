//! Finite-dimensional Z2-graded algebras given by structure constants.
//!
//! Algebras are built from a [`RingPresentation`] (a multiplication table on
//! named basis elements), checked for unit, grading and associativity on all
//! basis triples, and then split into generalized eigenspaces of a
//! multiplication operator with explicit orthogonal idempotents.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::unipoly::UniPoly;

/// Coefficient ring for structure constants.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
}

impl Coefficient for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("not associative on basis triple ({0}, {1}, {2})")]
    NotAssociative(String, String, String),
    #[error("no rule for product {0}*{1}")]
    IncompleteRules(String, String),
    #[error("product {0}*{1} violates the Z2 grading")]
    DegreeViolation(String, String),
    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate rule for {0}*{1}")]
    DuplicateRule(String, String),
    #[error("presentation needs a basis element named `1` acting as unit")]
    NoUnit,
    #[error("bad parameters: {0}")]
    BadParams(String),
}

/// Sparse linear combination of basis indices.
type Sparse<C> = Vec<(usize, C)>;

/// A unital algebra with basis, Z2 degrees and structure constants.
#[derive(Clone, Debug)]
pub struct FiniteDimAlgebra<C: Coefficient = Scalar> {
    labels: Vec<String>,
    degrees: Vec<u8>,
    table: Vec<Vec<Sparse<C>>>,
    unit: usize,
    c1: Option<Vec<C>>,
}

impl<C: Coefficient> FiniteDimAlgebra<C> {
    /// Builds and validates: grading, two-sided unit, associativity on all
    /// basis triples.
    pub fn new(
        labels: Vec<String>,
        degrees: Vec<u8>,
        table: Vec<Vec<Sparse<C>>>,
        unit: usize,
    ) -> Result<Self, AlgebraError> {
        let n = labels.len();
        assert_eq!(degrees.len(), n);
        assert_eq!(table.len(), n);
        let alg = FiniteDimAlgebra { labels, degrees, table, unit, c1: None };
        for i in 0..n {
            for j in 0..n {
                for (k, c) in &alg.table[i][j] {
                    if !c.is_zero() && alg.degrees[*k] != (alg.degrees[i] + alg.degrees[j]) % 2 {
                        return Err(AlgebraError::DegreeViolation(alg.labels[i].clone(), alg.labels[j].clone()));
                    }
                }
            }
            let e = alg.basis(i);
            let u = alg.basis(unit);
            if alg.mul(&u, &e) != e || alg.mul(&e, &u) != e {
                return Err(AlgebraError::NoUnit);
            }
        }
        alg.check_associative()?;
        Ok(alg)
    }

    pub fn with_c1(mut self, c1: Vec<C>) -> Self {
        assert_eq!(c1.len(), self.dim());
        self.c1 = Some(c1);
        self
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degrees(&self) -> &[u8] {
        &self.degrees
    }

    pub fn c1(&self) -> Option<&[C]> {
        self.c1.as_deref()
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn zero(&self) -> Vec<C> {
        vec![C::zero(); self.dim()]
    }

    pub fn basis(&self, i: usize) -> Vec<C> {
        let mut v = self.zero();
        v[i] = C::one();
        v
    }

    pub fn unit(&self) -> Vec<C> {
        self.basis(self.unit)
    }

    /// Product of basis elements.
    pub fn basis_product(&self, i: usize, j: usize) -> &[(usize, C)] {
        &self.table[i][j]
    }

    pub fn mul(&self, a: &[C], b: &[C]) -> Vec<C> {
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x.times(y);
                for (k, c) in &self.table[i][j] {
                    out[*k] = out[*k].plus(&xy.times(c));
                }
            }
        }
        out
    }

    pub fn add(&self, a: &[C], b: &[C]) -> Vec<C> {
        a.iter().zip(b).map(|(x, y)| x.plus(y)).collect()
    }

    pub fn scale(&self, c: &C, a: &[C]) -> Vec<C> {
        a.iter().map(|x| c.times(x)).collect()
    }

    fn sparse_mul(&self, a: &[(usize, C)], k: usize, left: bool) -> BTreeMap<usize, C> {
        let mut out: BTreeMap<usize, C> = BTreeMap::new();
        for (p, c) in a {
            let prod = if left { &self.table[*p][k] } else { &self.table[k][*p] };
            for (q, d) in prod {
                let t = c.times(d);
                let e = out.entry(*q).or_insert_with(C::zero);
                *e = e.plus(&t);
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Exhaustive associativity on basis triples.
    pub fn check_associative(&self) -> Result<(), AlgebraError> {
        let n = self.dim();
        let bad = (0..n).into_par_iter().find_map_first(|i| {
            for j in 0..n {
                for k in 0..n {
                    let lhs = self.sparse_mul(&self.table[i][j], k, true);
                    let rhs = self.sparse_mul(&self.table[j][k], i, false);
                    if lhs != rhs {
                        return Some((i, j, k));
                    }
                }
            }
            None
        });
        match bad {
            Some((i, j, k)) => Err(AlgebraError::NotAssociative(
                self.labels[i].clone(),
                self.labels[j].clone(),
                self.labels[k].clone(),
            )),
            None => Ok(()),
        }
    }

    /// Human-readable element, e.g. `1/128*h3 + 1/32*h2`.
    pub fn render(&self, a: &[C]) -> String {
        let parts: Vec<String> = a
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({})*{}", c, self.labels[i]))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// One product rule `left*right = Σ c·label`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub left: String,
    pub right: String,
    pub rhs: Vec<(Scalar, String)>,
}

/// Named basis plus multiplication rules. Products with `1` are implicit.
/// Unless `strict` is set, a missing `b*a` is filled from `a*b` with the
/// Koszul sign `(-1)^{|a||b|}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RingPresentation {
    pub labels: Vec<String>,
    pub degrees: Vec<u8>,
    pub rules: Vec<Rule>,
    pub strict: bool,
    pub c1: Option<Vec<(Scalar, String)>>,
}

impl RingPresentation {
    pub fn new(labels: &[&str], degrees: &[u8]) -> Self {
        RingPresentation {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            degrees: degrees.to_vec(),
            ..Default::default()
        }
    }

    pub fn rule(&mut self, left: &str, right: &str, rhs: Vec<(Scalar, String)>) {
        self.rules.push(Rule { left: left.into(), right: right.into(), rhs });
    }
}

fn lincomb_to_dense(labels: &[String], terms: &[(Scalar, String)]) -> Result<Vec<Scalar>, AlgebraError> {
    let mut v = vec![Scalar::zero(); labels.len()];
    for (c, l) in terms {
        let i = labels.iter().position(|x| x == l).ok_or_else(|| AlgebraError::UnknownLabel(l.clone()))?;
        v[i] = &v[i] + c;
    }
    Ok(v)
}

/// Realizes a presentation as a checked algebra.
pub fn from_presentation(p: &RingPresentation) -> Result<FiniteDimAlgebra<Scalar>, AlgebraError> {
    let n = p.labels.len();
    if p.degrees.len() != n {
        return Err(AlgebraError::BadParams("degree list length differs from basis".into()));
    }
    let unit = p.labels.iter().position(|l| l == "1").ok_or(AlgebraError::NoUnit)?;
    let idx = |l: &str| p.labels.iter().position(|x| x == l).ok_or_else(|| AlgebraError::UnknownLabel(l.to_string()));
    let mut table: Vec<Vec<Option<Sparse<Scalar>>>> = vec![vec![None; n]; n];
    for i in 0..n {
        table[unit][i] = Some(vec![(i, Scalar::one())]);
        table[i][unit] = Some(vec![(i, Scalar::one())]);
    }
    let sparse =
        |v: Vec<Scalar>| -> Sparse<Scalar> { v.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect() };
    for r in &p.rules {
        let (i, j) = (idx(&r.left)?, idx(&r.right)?);
        if i == unit || j == unit {
            continue;
        }
        if table[i][j].is_some() {
            return Err(AlgebraError::DuplicateRule(r.left.clone(), r.right.clone()));
        }
        table[i][j] = Some(sparse(lincomb_to_dense(&p.labels, &r.rhs)?));
    }
    if !p.strict {
        for i in 0..n {
            for j in 0..n {
                if table[i][j].is_none() {
                    if let Some(t) = table[j][i].clone() {
                        let neg = p.degrees[i] % 2 == 1 && p.degrees[j] % 2 == 1;
                        table[i][j] = Some(if neg { t.into_iter().map(|(k, c)| (k, -c)).collect() } else { t });
                    }
                }
            }
        }
    }
    let mut full = Vec::with_capacity(n);
    for (i, row) in table.into_iter().enumerate() {
        let mut out = Vec::with_capacity(n);
        for (j, e) in row.into_iter().enumerate() {
            out.push(e.ok_or_else(|| AlgebraError::IncompleteRules(p.labels[i].clone(), p.labels[j].clone()))?);
        }
        full.push(out);
    }
    let alg = FiniteDimAlgebra::new(p.labels.clone(), p.degrees.iter().map(|d| d % 2).collect(), full, unit)?;
    Ok(match &p.c1 {
        Some(c) => {
            let v = lincomb_to_dense(&p.labels, c)?;
            alg.with_c1(v)
        }
        None => alg,
    })
}

fn hp(e: usize) -> String {
    match e {
        0 => "1".into(),
        1 => "h".into(),
        _ => format!("h{e}"),
    }
}

/// `h^e` reduced by `h^top = c·h^low` (requires `low < top`).
fn reduce_power(e: usize, top: usize, c: &Scalar, low: usize) -> (Scalar, usize) {
    let mut coef = Scalar::one();
    let mut e = e;
    while e >= top {
        coef = &coef * c;
        e = e - top + low;
    }
    (coef, e)
}

/// `h^a·h^b` rules for the truncated power ring `1..h^{top-1}`.
fn power_rules(p: &mut RingPresentation, top: usize, c: &Scalar, low: usize) {
    for a in 1..top {
        for b in 1..top {
            let (k, e) = reduce_power(a + b, top, c, low);
            p.rule(&hp(a), &hp(b), vec![(k, hp(e))]);
        }
    }
}

/// Algebra with basis `1, h, …, h^{top-1}` plus odd classes `prim` that are
/// killed by `h` and pair symplectically into `(h^{top-1}/4 − 4h)`.
fn power_with_primitives(
    top: usize,
    rel: Scalar,
    prim: &[String],
    c1: Scalar,
) -> Result<FiniteDimAlgebra, AlgebraError> {
    let mut labels: Vec<String> = (0..top).map(hp).collect();
    labels.extend(prim.iter().cloned());
    let mut degrees = vec![0u8; top];
    degrees.extend(std::iter::repeat_n(1, prim.len()));
    let mut p = RingPresentation { labels, degrees, ..Default::default() };
    power_rules(&mut p, top, &rel, 2);
    for a in 1..top {
        for m in prim {
            p.rule(&hp(a), m, vec![]);
        }
    }
    for (i, a) in prim.iter().enumerate() {
        for (j, b) in prim.iter().enumerate() {
            // symplectic pairing on consecutive pairs
            let delta = match (i % 2, j) {
                (0, j) if j == i + 1 => 1,
                (1, j) if j + 1 == i => -1,
                _ => 0,
            };
            let rhs = if delta == 0 {
                vec![]
            } else {
                let d = Scalar::from_int(delta);
                vec![(&d * &Scalar::frac(1, 4), hp(top - 1)), (&d * &Scalar::from_int(-4), hp(1))]
            };
            p.rule(a, b, rhs);
        }
    }
    p.c1 = Some(vec![(c1, "h".into())]);
    from_presentation(&p)
}

/// Eight-dimensional ring `⟨h, μ_i | h⁴ = 16h², hμ = 0, μ_iμ_j = δ_ij(h³/4 − 4h)⟩`.
pub fn qh_moduli_sigma2() -> FiniteDimAlgebra {
    let prim: Vec<String> = (1..=4).map(|i| format!("m{i}")).collect();
    power_with_primitives(4, Scalar::from_int(16), &prim, Scalar::from_int(2)).expect("builtin is consistent")
}

/// Ring `⟨h, α_i | h^{2g} = 16h², hα = 0, α_iα_j = δ_ij(h^{2g−1}/4 − 4h)⟩`
/// of dimension `4g`.
pub fn qh_intersection(g: u32) -> Result<FiniteDimAlgebra, AlgebraError> {
    if g < 2 {
        return Err(AlgebraError::BadParams(format!("qh_intersection needs g >= 2, got {g}")));
    }
    let g = g as usize;
    let prim: Vec<String> = (1..=2 * g).map(|i| format!("a{i}")).collect();
    power_with_primitives(2 * g, Scalar::from_int(16), &prim, Scalar::from_int(2 * g as i64 - 2))
}

/// Quantum ring of the `n`-dimensional quadric: `h^{n+1} = 4h`, with an extra
/// middle class `a` (and `b = h^{n/2} − a`) for even `n`.
pub fn qh_quadric(n: u32) -> Result<FiniteDimAlgebra, AlgebraError> {
    if n < 1 {
        return Err(AlgebraError::BadParams("qh_quadric needs n >= 1".into()));
    }
    let n = n as usize;
    let top = n + 1;
    let four = Scalar::from_int(4);
    let mut labels: Vec<String> = (0..top).map(hp).collect();
    if n % 2 == 1 {
        let mut p = RingPresentation { degrees: vec![0; top], labels, ..Default::default() };
        power_rules(&mut p, top, &four, 1);
        p.c1 = Some(vec![(Scalar::from_int(n as i64), "h".into())]);
        return from_presentation(&p);
    }
    let m = n / 2;
    labels.push("a".into());
    let mut p = RingPresentation { degrees: vec![0; top + 1], labels, ..Default::default() };
    power_rules(&mut p, top, &four, 1);
    let half = Scalar::frac(1, 2);
    for j in 1..top {
        let (k, e) = reduce_power(m + j, top, &four, 1);
        p.rule(&hp(j), "a", vec![(&k * &half, hp(e))]);
    }
    let a2 = if n % 4 == 2 {
        vec![(Scalar::one(), "1".to_string())]
    } else {
        vec![(half.clone(), hp(n)), (Scalar::from_int(-1), "1".to_string())]
    };
    p.rule("a", "a", a2);
    p.c1 = Some(vec![(Scalar::from_int(n as i64), "h".into())]);
    from_presentation(&p)
}

/// Clifford-type algebra on generators `names` with symmetric form `b`:
/// `e_i e_j + e_j e_i = 2 b(i, j)`. Basis: increasing words; generators odd.
pub fn clifford_with_form(names: &[String], b: &[Vec<Scalar>]) -> Result<FiniteDimAlgebra, AlgebraError> {
    let k = names.len();
    if k > 10 {
        return Err(AlgebraError::BadParams("at most 10 generators".into()));
    }
    let words: Vec<u32> = {
        let mut w: Vec<u32> = (0..(1u32 << k)).collect();
        w.sort_by_key(|m| (m.count_ones(), (0..k).map(|i| u32::from(m & (1 << i) == 0)).collect::<Vec<_>>()));
        w
    };
    let pos: BTreeMap<u32, usize> = words.iter().enumerate().map(|(i, w)| (*w, i)).collect();
    let label = |w: u32| -> String {
        if w == 0 {
            "1".into()
        } else {
            (0..k).filter(|i| w & (1 << i) != 0).map(|i| names[i].as_str()).collect::<Vec<_>>().join("")
        }
    };
    let letters = |w: u32| -> Vec<usize> { (0..k).filter(|i| w & (1 << i) != 0).collect() };
    let mut table = Vec::with_capacity(words.len());
    for &wi in &words {
        let mut row = Vec::with_capacity(words.len());
        for &wj in &words {
            let mut seq = letters(wi);
            seq.extend(letters(wj));
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            normalize_word(seq, Scalar::one(), b, &mut |w, c| {
                let bits = w.iter().fold(0u32, |m, &i| m | (1 << i));
                let e = acc.entry(pos[&bits]).or_insert_with(Scalar::zero);
                *e = &*e + &c;
            });
            row.push(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect());
        }
        table.push(row);
    }
    let labels: Vec<String> = words.iter().map(|&w| label(w)).collect();
    let degrees: Vec<u8> = words.iter().map(|w| (w.count_ones() % 2) as u8).collect();
    FiniteDimAlgebra::new(labels, degrees, table, 0)
}

/// Rewrites a generator word into increasing words.
fn normalize_word(seq: Vec<usize>, c: Scalar, b: &[Vec<Scalar>], emit: &mut impl FnMut(Vec<usize>, Scalar)) {
    if c.is_zero() {
        return;
    }
    let Some(p) = (0..seq.len().saturating_sub(1)).find(|&i| seq[i] >= seq[i + 1]) else {
        emit(seq, c);
        return;
    };
    let (x, y) = (seq[p], seq[p + 1]);
    let mut shorter = seq[..p].to_vec();
    shorter.extend_from_slice(&seq[p + 2..]);
    if x == y {
        normalize_word(shorter, &c * &b[x][x], b, emit);
        return;
    }
    let mut swapped = seq.clone();
    swapped.swap(p, p + 1);
    normalize_word(swapped, -c.clone(), b, emit);
    normalize_word(shorter, &c * &(&Scalar::from_int(2) * &b[x][y]), b, emit);
}

/// Clifford algebra on `k` odd generators: hyperbolic pairs `x_j, y_j` with
/// `x y + y x = 1`, `x² = y² = 0`, and for odd `k` a last generator `z` with
/// `z² = 1`.
pub fn clifford(k: u32) -> Result<FiniteDimAlgebra, AlgebraError> {
    if k == 0 {
        return Err(AlgebraError::BadParams("clifford needs k >= 1".into()));
    }
    let k = k as usize;
    let pairs = k / 2;
    let mut names = Vec::new();
    for j in 1..=pairs {
        if pairs == 1 {
            names.push("x".to_string());
            names.push("y".to_string());
        } else {
            names.push(format!("x{j}"));
            names.push(format!("y{j}"));
        }
    }
    if k % 2 == 1 {
        names.push(if k == 1 { "x".into() } else { "z".into() });
    }
    let mut b = vec![vec![Scalar::zero(); k]; k];
    for j in 0..pairs {
        b[2 * j][2 * j + 1] = Scalar::frac(1, 2);
        b[2 * j + 1][2 * j] = Scalar::frac(1, 2);
    }
    if k % 2 == 1 {
        b[k - 1][k - 1] = Scalar::one();
    }
    clifford_with_form(&names, &b)
}

/// Exterior algebra on `m` odd generators `e1..em`.
pub fn exterior(m: u32) -> Result<FiniteDimAlgebra, AlgebraError> {
    if m == 0 {
        return Err(AlgebraError::BadParams("exterior needs m >= 1".into()));
    }
    let names: Vec<String> = (1..=m).map(|i| format!("e{i}")).collect();
    let b = vec![vec![Scalar::zero(); m as usize]; m as usize];
    clifford_with_form(&names, &b)
}

/// Looks up `qh_moduli_sigma2`, `qh_quadric(n)`, `qh_intersection(g)`,
/// `clifford(k)` or `exterior(m)`.
pub fn builtin(id: &str) -> Result<FiniteDimAlgebra, AlgebraError> {
    let id = id.trim();
    let (name, param) = match id.split_once('(') {
        Some((n, rest)) => {
            let inner = rest.strip_suffix(')').ok_or_else(|| AlgebraError::BadParams(id.to_string()))?;
            let v: u32 = inner.trim().parse().map_err(|_| AlgebraError::BadParams(id.to_string()))?;
            (n.trim(), Some(v))
        }
        None => (id, None),
    };
    let need = || param.ok_or_else(|| AlgebraError::BadParams(format!("{name} needs a parameter")));
    match name {
        "qh_moduli_sigma2" if param.is_none() => Ok(qh_moduli_sigma2()),
        "qh_quadric" => qh_quadric(need()?),
        "qh_intersection" => qh_intersection(need()?),
        "clifford" => clifford(need()?),
        "exterior" => exterior(need()?),
        _ => Err(AlgebraError::BadParams(format!("unknown builtin `{id}`"))),
    }
}

/// Matrix of `x ↦ a·x` in the basis.
pub fn mult_operator<C: Coefficient>(alg: &FiniteDimAlgebra<C>, a: &[C]) -> Vec<Vec<C>> {
    let n = alg.dim();
    let mut m = vec![vec![C::zero(); n]; n];
    for j in 0..n {
        let col = alg.mul(a, &alg.basis(j));
        for (i, x) in col.into_iter().enumerate() {
            m[i][j] = x;
        }
    }
    m
}

/// Scalar multiplication operator as a dense matrix.
pub fn mult_matrix(alg: &FiniteDimAlgebra, a: &[Scalar]) -> Matrix {
    Matrix::from_rows(mult_operator(alg, a))
}

/// `p(a)` computed in the algebra.
pub fn eval_poly(alg: &FiniteDimAlgebra, p: &UniPoly, a: &[Scalar]) -> Vec<Scalar> {
    let unit = alg.unit();
    let mut acc = alg.zero();
    for c in p.coeffs().iter().rev() {
        acc = alg.mul(&acc, a);
        acc = alg.add(&acc, &alg.scale(c, &unit));
    }
    acc
}

/// Minimal polynomial of `a`, from the first linear dependency among
/// `1, a, a², …`.
pub fn minimal_polynomial(alg: &FiniteDimAlgebra, a: &[Scalar]) -> UniPoly {
    let mut powers = vec![alg.unit()];
    loop {
        let next = alg.mul(powers.last().expect("nonempty"), a);
        let m = Matrix::from_cols(&powers, alg.dim());
        if let Some(x) = m.solve(&next) {
            let mut c: Vec<Scalar> = x.into_iter().map(|s| -s).collect();
            c.push(Scalar::one());
            return UniPoly::new(c);
        }
        powers.push(next);
    }
}

/// How a summand is labelled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EigenLabel {
    /// A rational (or Gaussian) eigenvalue.
    Value(Scalar),
    /// A factor without roots in the base field, kept whole.
    Block(UniPoly),
}

impl fmt::Display for EigenLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigenLabel::Value(s) => write!(f, "{s}"),
            EigenLabel::Block(p) => write!(f, "{p}"),
        }
    }
}

/// One generalized eigenspace.
#[derive(Clone, Debug)]
pub struct EigenBlock {
    pub label: EigenLabel,
    /// Squarefree factor whose power `multiplicity` divides the minimal
    /// polynomial exactly.
    pub factor: UniPoly,
    pub multiplicity: u32,
    pub dim: usize,
    pub basis: Vec<Vec<Scalar>>,
    pub idempotent: Vec<Scalar>,
}

/// Decomposition of the algebra under multiplication by `a`.
#[derive(Clone, Debug)]
pub struct EigenSplit {
    pub minpoly: UniPoly,
    pub blocks: Vec<EigenBlock>,
}

impl EigenSplit {
    pub fn value_dims(&self) -> Vec<(String, usize)> {
        self.blocks.iter().map(|b| (b.label.to_string(), b.dim)).collect()
    }

    pub fn block(&self, label: &Scalar) -> Option<&EigenBlock> {
        self.blocks.iter().find(|b| b.label == EigenLabel::Value(label.clone()))
    }
}

/// Splits into generalized eigenspaces of `x ↦ a·x`, with idempotents from
/// the Chinese remainder theorem on the coprime factors of the minimal
/// polynomial.
pub fn eigen_split(alg: &FiniteDimAlgebra, a: &[Scalar]) -> EigenSplit {
    let minpoly = minimal_polynomial(alg, a);
    let mut parts: Vec<(EigenLabel, UniPoly, u32)> = Vec::new();
    for (i, sf) in minpoly.squarefree().into_iter().enumerate() {
        let mult = i as u32 + 1;
        if sf.degree().unwrap_or(0) == 0 {
            continue;
        }
        let mut rest = sf;
        for r in rest.rational_roots() {
            let s = Scalar::from_rational(r);
            let lin = UniPoly::linear(&s);
            rest = rest.div_exact(&lin);
            parts.push((EigenLabel::Value(s), lin, mult));
        }
        if rest.degree().unwrap_or(0) > 0 {
            parts.push((EigenLabel::Block(rest.clone()), rest, mult));
        }
    }
    parts.sort_by(|x, y| match (&x.0, &y.0) {
        (EigenLabel::Value(a), EigenLabel::Value(b)) => b.cmp(a),
        (EigenLabel::Value(_), EigenLabel::Block(_)) => std::cmp::Ordering::Less,
        (EigenLabel::Block(_), EigenLabel::Value(_)) => std::cmp::Ordering::Greater,
        (EigenLabel::Block(p), EigenLabel::Block(q)) => p.to_string().cmp(&q.to_string()),
    });
    let blocks = parts
        .into_iter()
        .map(|(label, factor, mult)| {
            let pj = factor.pow(mult);
            let cof = minpoly.div_exact(&pj);
            let e_poly = match cof.inv_mod(&pj) {
                Some(inv) => cof.mul(&inv).rem(&minpoly),
                None => UniPoly::one(),
            };
            let idempotent = eval_poly(alg, &e_poly, a);
            let kernel_op = mult_matrix(alg, &eval_poly(alg, &pj, a));
            let basis = kernel_op.nullspace();
            EigenBlock { label, factor, multiplicity: mult, dim: basis.len(), basis, idempotent }
        })
        .collect();
    EigenSplit { minpoly, blocks }
}

/// Dimension of the generalized 0-eigenspace: `dim ker T^dim`.
pub fn zero_eigenspace_rank(alg: &FiniteDimAlgebra, a: &[Scalar]) -> usize {
    let t = mult_matrix(alg, a);
    t.pow(alg.dim() as u32).nullspace().len()
}

/// Result of testing `e·e = e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdempotentVerdict {
    pub pass: bool,
    pub square: Vec<Scalar>,
}

pub fn idempotent_check(alg: &FiniteDimAlgebra, e: &[Scalar]) -> IdempotentVerdict {
    let square = alg.mul(e, e);
    IdempotentVerdict { pass: square == e, square }
}

/// Parses a linear combination like `1/128*h3 + 1/32*h2 - m1` against the
/// algebra's labels.
pub fn parse_element(alg: &FiniteDimAlgebra, text: &str) -> Result<Vec<Scalar>, AlgebraError> {
    let terms = crate::exparse::parse_lincomb(text).map_err(|e| AlgebraError::BadParams(e.to_string()))?;
    lincomb_to_dense(alg.labels(), &terms)
}
