//! Dense univariate polynomials over [`Scalar`], with the factorization
//! pieces needed for eigenspace splitting.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::Scalar;

/// Coefficients from the constant term up; no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Scalar>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::new(vec![c])
    }

    /// `x - r`.
    pub fn linear(r: &Scalar) -> Self {
        Self::new(vec![-r.clone(), Scalar::one()])
    }

    pub fn x() -> Self {
        Self::new(vec![Scalar::zero(), Scalar::one()])
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lead().inv().expect("nonzero lead");
        self.scale(&inv)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = Scalar::zero();
        Self::new((0..n).map(|i| self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * &Scalar::from_int(i as i64)).collect())
    }

    /// Quotient and remainder.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.lead().inv().expect("nonzero lead");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Scalar::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = &rem[top] * &inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    let idx = top - dd + j;
                    rem[idx] -= &(&c * dc);
                }
                quot[top - dd] = c;
            }
            rem.pop();
        }
        (Self::new(quot), Self::new(rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// Exact division; panics if `d` does not divide.
    pub fn div_exact(&self, d: &Self) -> Self {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s·self + t·other = g` monic.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        let inv = r0.lead().inv().expect("gcd of zero polynomials");
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Inverse modulo `m`, if coprime.
    pub fn inv_mod(&self, m: &Self) -> Option<Self> {
        let (g, s, _) = self.rem(m).ext_gcd(m);
        (g.degree() == Some(0)).then(|| s.rem(m))
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(Scalar::zero(), |acc, c| &(&acc * x) + c)
    }

    /// Square-free decomposition (Yun): monic `a_1, a_2, …` with
    /// `monic(self) = Π a_i^i`. Entries may be constant 1.
    pub fn squarefree(&self) -> Vec<Self> {
        let f = self.monic();
        let df = f.derivative();
        let mut a = f.gcd(&df);
        let mut b = f.div_exact(&a);
        let mut c = df.div_exact(&a);
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        while b.degree().unwrap_or(0) > 0 {
            a = b.gcd(&d);
            out.push(a.clone());
            b = b.div_exact(&a);
            c = d.div_exact(&a);
            d = c.sub(&b.derivative());
        }
        out
    }

    /// Distinct rational roots (for Gaussian polynomials: the rational roots
    /// of both real and imaginary parts), in increasing order.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        if self.is_zero() {
            return vec![];
        }
        let re = UniPoly::new(self.coeffs.iter().map(|c| Scalar::from_rational(c.re().clone())).collect());
        let im = UniPoly::new(self.coeffs.iter().map(|c| Scalar::from_rational(c.im().clone())).collect());
        let p = if im.is_zero() { re } else { re.gcd(&im) };
        let mut roots = Vec::new();
        let mut p = p;
        if p.degree().unwrap_or(0) == 0 {
            return roots;
        }
        if p.coeffs[0].is_zero() {
            roots.push(BigRational::zero());
            while !p.is_zero() && p.coeffs[0].is_zero() {
                p = UniPoly::new(p.coeffs[1..].to_vec());
            }
        }
        if let Some(ints) = integer_coeffs(&p) {
            let a0 = ints[0].abs();
            let an = ints.last().expect("nonempty").abs();
            if let (Some(ps), Some(qs)) = (divisors(&a0), divisors(&an)) {
                for num in &ps {
                    for den in &qs {
                        for sign in [1i64, -1] {
                            let r = BigRational::new(num * BigInt::from(sign), den.clone());
                            if p.eval(&Scalar::from_rational(r.clone())).is_zero() && !roots.contains(&r) {
                                roots.push(r);
                            }
                        }
                    }
                }
            }
        }
        roots.sort();
        roots
    }

    /// Render in `x`, highest degree first, e.g. `x^3 - 4`.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.leading_negative();
            let a = if neg { -c.clone() } else { c.clone() };
            let coef = if a.needs_parens() { format!("({a})") } else { a.to_string() };
            let body = match (i, a.is_one()) {
                (0, _) => coef,
                (1, true) => var.to_string(),
                (1, false) => format!("{coef}*{var}"),
                (_, true) => format!("{var}^{i}"),
                (_, false) => format!("{coef}*{var}^{i}"),
            };
            if parts.is_empty() {
                parts.push(if neg { format!("-{body}") } else { body });
            } else {
                parts.push(format!("{} {}", if neg { "-" } else { "+" }, body));
            }
        }
        parts.join(" ")
    }
}

/// Scales a rational polynomial to primitive integer coefficients.
fn integer_coeffs(p: &UniPoly) -> Option<Vec<BigInt>> {
    if p.coeffs.iter().any(|c| !c.is_rational()) {
        return None;
    }
    let lcm = p.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.re().denom()));
    let ints: Vec<BigInt> =
        p.coeffs.iter().map(|c| (c.re() * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    Some(ints.into_iter().map(|x| x / &g).collect())
}

/// Positive divisors by trial division; `None` when the number is too large
/// to factor this way.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.to_u64().filter(|&n| n > 0 && n <= 1 << 40)?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(BigInt::from(d));
            if d * d != n {
                large.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::new(c.iter().map(|&x| Scalar::from_int(x)).collect())
    }

    #[test]
    fn division_and_gcd() {
        let f = p(&[-1, 0, 1]);
        let (q, r) = f.divrem(&p(&[-1, 1]));
        assert_eq!(q, p(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(f.gcd(&p(&[1, 2, 1])), p(&[1, 1]));
    }

    #[test]
    fn yun_decomposition() {
        // x^2 (x-4)(x+4) = x^4 - 16 x^2
        let sf = p(&[0, 0, -16, 0, 1]).squarefree();
        assert_eq!(sf, vec![p(&[-16, 0, 1]), p(&[0, 1])]);
    }

    #[test]
    fn rational_roots_found() {
        let f = p(&[0, 0, -16, 0, 1]);
        let r: Vec<String> = f.rational_roots().iter().map(|x| x.to_string()).collect();
        assert_eq!(r, ["-4", "0", "4"]);
        assert_eq!(p(&[-4, 0, 0, 1]).rational_roots(), vec![]);
        let half = UniPoly::new(vec![Scalar::frac(-1, 2), Scalar::one()]);
        assert_eq!(half.rational_roots(), vec![BigRational::new(1.into(), 2.into())]);
    }

    #[test]
    fn modular_inverse() {
        let m = p(&[-4, 0, 0, 1]);
        let a = p(&[0, 1]);
        let inv = a.inv_mod(&m).unwrap();
        assert_eq!(a.mul(&inv).rem(&m), UniPoly::one());
        assert!(p(&[0, 1]).inv_mod(&p(&[0, 0, 1])).is_none());
    }

    #[test]
    fn rendering() {
        assert_eq!(p(&[0, -4, 0, 0, 1]).to_string(), "x^4 - 4*x");
        assert_eq!(p(&[-4, 0, 0, 1]).to_string(), "x^3 - 4");
    }
}
