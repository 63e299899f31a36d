//! Exact normal ordering of single-mode ladder polynomials.
//!
//! A term `(p, q) ↦ c` stands for `c a†^p a^q`. `:(a† + a)^m:` is the naive
//! binomial expansion; the normal-ordered power follows from
//! `(a† + a)^m = Σ_{r even} t_r C(m, r) :(a† + a)^{m−r}:` with
//! `t_r = (r − 1)!!`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::combinatorics::{binomial_big, double_factorial_odd_big, factorial_big};
use crate::error::{Error, Result};
use crate::fock::{monomial, FockMatrix};

/// Largest power the brute-force rewriter accepts.
pub const BRUTE_FORCE_GUARD: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OperatorPoly {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl OperatorPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, BigRational::one())
    }

    pub fn monomial(p: u32, q: u32, c: BigRational) -> Self {
        let mut out = Self::zero();
        out.add_term(p, q, c);
        out
    }

    /// `a† + a`.
    pub fn x_sum() -> Self {
        let mut out = Self::zero();
        out.add_term(1, 0, BigRational::one());
        out.add_term(0, 1, BigRational::one());
        out
    }

    pub fn add_term(&mut self, p: u32, q: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((p, q)).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(p, q));
        }
    }

    pub fn coeff(&self, p: u32, q: u32) -> BigRational {
        self.terms
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(p, q), c) in &other.terms {
            out.add_term(p, q, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut out = Self::zero();
        for (&(p, q), c) in &self.terms {
            out.add_term(p, q, c * s);
        }
        out
    }

    /// Product of two normal-ordered polynomials, normal ordered by Wick's
    /// contraction count `(a†^p a^q)(a†^r a^s) = Σ_k C(q,k) C(r,k) k! a†^{p+r−k} a^{q+s−k}`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(p, q), c1) in &self.terms {
            for (&(r, s), c2) in &other.terms {
                for k in 0..=q.min(r) {
                    let w = binomial_big(q, k) * binomial_big(r, k) * factorial_big(k);
                    out.add_term(p + r - k, q + s - k, c1 * c2 * BigRational::from_integer(w));
                }
            }
        }
        out
    }

    /// Right-multiply by `a†` using `a^q a† = a† a^q + q a^{q−1}`.
    pub fn mul_right_creation(&self) -> Self {
        let mut out = Self::zero();
        for (&(p, q), c) in &self.terms {
            out.add_term(p + 1, q, c.clone());
            if q > 0 {
                out.add_term(p, q - 1, c * BigRational::from_integer(BigInt::from(q)));
            }
        }
        out
    }

    pub fn mul_right_annihilation(&self) -> Self {
        let mut out = Self::zero();
        for (&(p, q), c) in &self.terms {
            out.add_term(p, q + 1, c.clone());
        }
        out
    }

    /// Hermitian conjugate; coefficients are real so only powers swap.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (&(p, q), c) in &self.terms {
            out.add_term(q, p, c.clone());
        }
        out
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.terms.iter().all(|(&(p, q), c)| self.coeff(q, p) == *c)
    }

    /// Exact matrix on the truncated basis; every stored element is exact
    /// because the normal-ordered form never leaves the basis mid-product.
    pub fn render(&self, dim: usize) -> FockMatrix {
        let mut m = FockMatrix::zeros(dim);
        for (&(p, q), c) in &self.terms {
            let c = c.to_f64().unwrap_or(f64::NAN);
            m = &m + &monomial(dim, p, q).scale_re(c);
        }
        m
    }
}

impl fmt::Display for OperatorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(p, q), c) in self.terms.iter().rev() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            write!(f, "{}", c.abs())?;
            if p > 0 {
                write!(f, " a†^{p}")?;
            }
            if q > 0 {
                write!(f, " a^{q}")?;
            }
        }
        Ok(())
    }
}

/// `t_r = r!/(2^{r/2}(r/2)!)`, exact.
pub fn t_coeff(r: u32) -> Result<BigInt> {
    if !r.is_multiple_of(2) {
        return Err(Error::Domain(format!("t_r needs even r, got {r}")));
    }
    Ok(double_factorial_odd_big(r / 2))
}

/// `:(a† + a)^m: = Σ_r C(m, r) a†^r a^{m−r}`.
pub fn colon_power(m: u32) -> OperatorPoly {
    let mut out = OperatorPoly::zero();
    for r in 0..=m {
        out.add_term(r, m - r, BigRational::from_integer(binomial_big(m, r)));
    }
    out
}

/// Coefficients of `(a† + a)^m` in the basis `:(a† + a)^k:` as `(k, c_k)`,
/// highest `k` first.
pub fn colon_expansion(m: u32) -> Vec<(u32, BigInt)> {
    (0..=m)
        .step_by(2)
        .map(|r| (m - r, double_factorial_odd_big(r / 2) * binomial_big(m, r)))
        .collect()
}

/// Normal-ordered `(a† + a)^m` from the colon expansion.
pub fn normal_order_power(m: u32) -> OperatorPoly {
    let mut out = OperatorPoly::zero();
    for (k, c) in colon_expansion(m) {
        out = out.add(&colon_power(k).scale(&BigRational::from_integer(c)));
    }
    out
}

/// Normal-ordered `(a† + a)^m` by repeated right multiplication with the
/// commutator rule only.
pub fn brute_force_normal_order(m: u32) -> Result<OperatorPoly> {
    if m > BRUTE_FORCE_GUARD {
        return Err(Error::Guard {
            m,
            guard: BRUTE_FORCE_GUARD,
        });
    }
    let mut acc = OperatorPoly::one();
    for _ in 0..m {
        acc = acc.mul_right_creation().add(&acc.mul_right_annihilation());
    }
    Ok(acc)
}

/// `:(a† + a)^m: (a† + a) = :(a† + a)^{m+1}: + m :(a† + a)^{m−1}:`.
pub fn colon_power_step(p: &OperatorPoly, m: u32) -> Result<OperatorPoly> {
    if *p != colon_power(m) {
        return Err(Error::Contract(format!("input is not :(a† + a)^{m}:")));
    }
    let mut out = colon_power(m + 1);
    if m > 0 {
        out = out.add(&colon_power(m - 1).scale(&BigRational::from_integer(BigInt::from(m))));
    }
    Ok(out)
}

/// `⟨n|p|n⟩`; only balanced `a†^k a^k` terms survive, each giving `n!/(n−k)!`.
pub fn number_expectation(p: &OperatorPoly, n: u64) -> BigRational {
    let mut acc = BigRational::zero();
    for (&(a, b), c) in p.terms() {
        if a != b || a as u64 > n {
            continue;
        }
        let mut ff = BigInt::one();
        for i in 0..a as u64 {
            ff *= BigInt::from(n - i);
        }
        acc += c * BigRational::from_integer(ff);
    }
    acc
}
