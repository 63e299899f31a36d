//! Perturbative spectra and frequency operators.
//!
//! All closed forms are exact rationals; floats appear only when comparing
//! against diagonalization. Frequency operators are polynomials in `H₀`,
//! whose number-basis value is `H₀ = n + ½`.
//!
//! Three related objects appear here:
//! * `ω(m, n)`, the first-order λ-coefficient of `E_n − E_{n−1}`;
//! * the multiple-scale frequency `Ω(H₀)`, fixed by `Ω(n+½) + Ω(n−½) = 2ω(m, n)`;
//! * the first-order frequency operator `Ω₁(H₀)` with `⟨n|Ω₁|n⟩ = E_{n+1} − E_n`
//!   at first order. It equals the half-step average of `Ω`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::combinatorics::{binomial_big, binomial_signed_big, factorial_big};
use crate::error::{Error, Result};
use crate::fock::{h0, hamiltonian, FockMatrix, OscillatorSpec, Propagator, C64};
use crate::ordering::{normal_order_power, t_coeff};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

fn half() -> BigRational {
    rat(1, 2)
}

fn check_m(m: u32) -> Result<()> {
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::InvalidSpec(format!(
            "m must be even and >= 4, got {m}"
        )));
    }
    Ok(())
}

/// Polynomial in `H₀` with exact rational coefficients, lowest power first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreqPolynomial {
    coeffs: Vec<BigRational>,
}

impl FreqPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `H₀ − c`.
    pub fn linear_root(c: BigRational) -> Self {
        Self::new(vec![-c, BigRational::one()])
    }

    pub fn from_ratios(pairs: &[(i64, i64)]) -> Self {
        Self::new(pairs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, h: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * h + c)
    }

    /// Value at `H₀ = n + ½`.
    pub fn eval_level(&self, n: i64) -> BigRational {
        self.eval(&(int(BigInt::from(n)) + half()))
    }

    pub fn eval_f64(&self, h: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * h + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&rat(-1, 1)))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// `P(H₀ + s)`, expanded by Horner composition.
    pub fn shift(&self, s: &BigRational) -> Self {
        let lin = Self::new(vec![s.clone(), BigRational::one()]);
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| {
            acc.mul(&lin).add(&Self::constant(c.clone()))
        })
    }

    /// `½[P(H₀) + P(H₀ + 1)]`.
    pub fn average_shift(&self) -> Self {
        self.add(&self.shift(&BigRational::one())).scale(&half())
    }

    /// Inverse of [`average_shift`](Self::average_shift).
    ///
    /// Writing the average as `(1 + T)P` with `T = ½(shift − 1)`, which lowers
    /// the degree, the inverse is the terminating series `Σ_k (−T)^k`.
    pub fn inverse_average_shift(&self) -> Self {
        let mut term = self.clone();
        let mut acc = Self::zero();
        let mut sign = BigRational::one();
        while !term.is_zero() {
            acc = acc.add(&term.scale(&sign));
            term = term.shift(&BigRational::one()).sub(&term).scale(&half());
            sign = -sign;
        }
        acc
    }

    /// Diagonal matrix `P(H₀)` on the truncated basis.
    pub fn render(&self, dim: usize) -> FockMatrix {
        FockMatrix::diagonal(dim, |n| C64::new(self.eval_f64(n as f64 + 0.5), 0.0))
    }

    /// Lagrange interpolation through `(h_i, y_i)`.
    pub fn interpolate(points: &[(BigRational, BigRational)]) -> Self {
        let mut acc = Self::zero();
        for (i, (hi, yi)) in points.iter().enumerate() {
            let mut basis = Self::constant(yi.clone());
            for (j, (hj, _)) in points.iter().enumerate() {
                if i != j {
                    let inv = BigRational::one() / (hi - hj);
                    basis = basis.mul(&Self::linear_root(hj.clone())).scale(&inv);
                }
            }
            acc = acc.add(&basis);
        }
        acc
    }
}

impl fmt::Display for FreqPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            write!(f, "{}", c.abs())?;
            match k {
                0 => {}
                1 => write!(f, " H0")?,
                _ => write!(f, " H0^{k}")?,
            }
        }
        Ok(())
    }
}

/// λ-coefficient of the first-order energy `E_n = (n + ½) + λ E_{n,1}`.
pub fn first_order_energy_coeff(m: u32, n: u64) -> Result<BigRational> {
    check_m(m)?;
    let mut acc = BigInt::zero();
    for r in (0..=m).step_by(2) {
        let k = (m - r) / 2;
        if (k as u64) > n {
            continue;
        }
        acc += t_coeff(r)?
            * binomial_big(m, r)
            * binomial_big(m - r, k)
            * binomial_big(n as u32, k)
            * factorial_big(k);
    }
    let denom = BigInt::from(m) * BigInt::from(2).pow(m / 2);
    Ok(BigRational::new(acc, denom))
}

/// `(n + ½, E_{n,1})`.
pub fn first_order_energy(m: u32, n: u64) -> Result<(BigRational, BigRational)> {
    Ok((
        int(BigInt::from(n)) + half(),
        first_order_energy_coeff(m, n)?,
    ))
}

/// `ω(m, n)` by the closed level-spacing sum, with the generalized binomial so
/// that `n = 0` (and negative `n`) are defined.
pub fn level_spacing_closed(m: u32, n: i64) -> Result<BigRational> {
    check_m(m)?;
    let mut acc = BigInt::zero();
    for r in (0..=m - 2).step_by(2) {
        let k = (m - r) / 2;
        acc += t_coeff(r)?
            * binomial_big(m, r)
            * binomial_big(m - r, k)
            * binomial_signed_big(n - 1, k - 1)
            * factorial_big(k);
    }
    let denom = BigInt::from(m) * BigInt::from(2).pow(m / 2);
    Ok(BigRational::new(acc, denom))
}

/// First-order λ-coefficient of `E_n − E_{n−1}`.
pub fn level_spacing_first(m: u32, n: u64) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::Domain("level spacing needs n >= 1".into()));
    }
    level_spacing_closed(m, n as i64)
}

/// Multiple-scale frequency at `H₀ = n + ½`.
pub fn mspt_omega_half(m: u32, n: u64) -> Result<BigRational> {
    check_m(m)?;
    let mut acc = BigRational::zero();
    for k in 0..=n {
        let w = level_spacing_closed(m, k as i64)?;
        if (n - k).is_multiple_of(2) {
            acc += w;
        } else {
            acc -= w;
        }
    }
    acc *= rat(2, 1);
    let sign = if (n + m as u64 / 2).is_multiple_of(2) {
        1
    } else {
        -1
    };
    let boundary = BigRational::new(
        t_coeff(m)? * BigInt::from(sign),
        BigInt::from(2).pow((m - 2) / 2) * BigInt::from(m),
    );
    Ok(acc + boundary)
}

/// `Ω(H₀)` as a polynomial, interpolated through `m/2` levels and checked on
/// further ones.
pub fn mspt_omega_poly(m: u32) -> Result<FreqPolynomial> {
    check_m(m)?;
    let deg = (m / 2 - 1) as u64;
    let pts: Vec<_> = (0..=deg)
        .map(|n| Ok((int(BigInt::from(n)) + half(), mspt_omega_half(m, n)?)))
        .collect::<Result<_>>()?;
    let poly = FreqPolynomial::interpolate(&pts);
    for n in deg + 1..deg + 4 {
        if poly.eval_level(n as i64) != mspt_omega_half(m, n)? {
            return Err(Error::Numerical(format!(
                "Ω(H₀) for m = {m} is not a polynomial of degree {deg}"
            )));
        }
    }
    Ok(poly)
}

/// `G = 2cos[(λt/2)(Ω(n+½) − Ω(n−½))]`.
pub fn mspt_normalizer(m: u32, n: i64, lambda: f64, t: f64) -> Result<f64> {
    let omega = mspt_omega_poly(m)?;
    let diff = omega.eval_level(n) - omega.eval_level(n - 1);
    Ok(2.0 * (0.5 * lambda * t * diff.to_f64().unwrap_or(f64::NAN)).cos())
}

/// `Π_{i<j}(H₀ − ½ − i)`, the number-basis form of `a†^j a^j`.
fn falling(j: u32) -> FreqPolynomial {
    (0..j).fold(FreqPolynomial::constant(BigRational::one()), |acc, i| {
        acc.mul(&FreqPolynomial::linear_root(half() + int(BigInt::from(i))))
    })
}

/// First-order frequency operator `Ω₁(H₀)`.
///
/// Built from the resonant terms `a†^{k−1} a^k` with `k = (m − 2r)/2` of the
/// normal-ordered `(a† + a)^m`; commuting `a` through leaves `k a†^{k−1}a^{k−1}`
/// per resonant term, which is a falling factorial in `H₀`.
pub fn freq_operator_first(m: u32) -> Result<FreqPolynomial> {
    check_m(m)?;
    let mut acc = FreqPolynomial::zero();
    for r in 0..m / 2 {
        let q = m - 2 * r;
        let k = q / 2;
        let c =
            int(BigInt::from(k) * t_coeff(2 * r)? * binomial_big(m, 2 * r) * binomial_big(q, k));
        acc = acc.add(&falling(k - 1).scale(&c));
    }
    let denom = int(BigInt::from(m) * BigInt::from(2).pow(m / 2));
    Ok(acc.scale(&(BigRational::one() / denom)))
}

/// `Ω₁` obtained from the half-step average of `ω₁`, and `ω₁` back from `Ω₁`.
pub fn equivalence_maps(omega1: &FreqPolynomial) -> (FreqPolynomial, FreqPolynomial) {
    let big = omega1.average_shift();
    let back = big.inverse_average_shift();
    (big, back)
}

/// Second-order quartic results at one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticSecondOrder {
    /// Diagonal frequency `ψ_n`.
    pub psi: f64,
    pub energy: f64,
    /// `E_n − E_{n−1}`; for `n = 0` this is the formal value of the polynomial.
    pub delta_e: f64,
}

/// Exact `(a₀, a₁, a₂)` with `ψ_n = a₀ + a₁λ + a₂λ²`.
pub fn quartic_psi_coeffs(n: u64) -> [BigRational; 3] {
    let n = int(BigInt::from(n));
    [
        BigRational::one(),
        rat(3, 4) * (&n + half()),
        -rat(1, 64) * (rat(51, 1) * &n * &n + rat(51, 1) * &n + rat(21, 1)),
    ]
}

pub fn quartic_energy_coeffs(n: u64) -> [BigRational; 3] {
    let n = int(BigInt::from(n));
    let n2 = &n * &n;
    let n3 = &n2 * &n;
    [
        &n + half(),
        rat(3, 8) * (&n2 + &n + half()),
        -rat(1, 128) * (rat(34, 1) * n3 + rat(51, 1) * n2 + rat(59, 1) * &n + rat(21, 1)),
    ]
}

pub fn quartic_spacing_coeffs(n: u64) -> [BigRational; 3] {
    let n = int(BigInt::from(n));
    [
        BigRational::one(),
        rat(3, 4) * &n,
        -rat(1, 64) * (rat(51, 1) * &n * &n + rat(21, 1)),
    ]
}

fn eval_series(c: &[BigRational; 3], lambda: f64) -> f64 {
    let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
    f(&c[0]) + lambda * (f(&c[1]) + lambda * f(&c[2]))
}

pub fn quartic_second_order(n: u64, lambda: f64) -> QuarticSecondOrder {
    QuarticSecondOrder {
        psi: eval_series(&quartic_psi_coeffs(n), lambda),
        energy: eval_series(&quartic_energy_coeffs(n), lambda),
        delta_e: eval_series(&quartic_spacing_coeffs(n), lambda),
    }
}

/// `⟨n|X⁴|n⟩ = (3/2)H₀² + 3/8`.
pub fn x4_diagonal() -> FreqPolynomial {
    FreqPolynomial::from_ratios(&[(3, 8), (0, 1), (3, 2)])
}

/// Diagonal part of `ω₂`: `−(1/64)(51H₀² + 33/4)`.
pub fn omega2_small_diagonal() -> FreqPolynomial {
    FreqPolynomial::from_ratios(&[(-33, 256), (0, 1), (-51, 64)])
}

/// Diagonal part of `Ω₂`: `−(1/64)(51H₀² + 51H₀ + 135/4)`.
pub fn omega2_big_diagonal() -> FreqPolynomial {
    FreqPolynomial::from_ratios(&[(-135, 256), (-51, 64), (-51, 64)])
}

/// Egusquiza–Basagoiti second-order frequency `−(3/64)(5H₀² + 5H₀ + ¼)`.
pub fn omega2_eb() -> FreqPolynomial {
    FreqPolynomial::from_ratios(&[(-3, 256), (-15, 64), (-15, 64)])
}

/// `Ω₂ = −(1/64)(69H₀² + 51H₀ − 12X⁴ + 153/4)` and
/// `ω₂ = −(1/64)(69H₀² − 12X⁴ + 51/4)` on the truncated basis.
///
/// `X⁴` is rendered from its normal-ordered form, so every stored element is
/// the exact infinite-basis element.
pub fn quartic_omega2_operators(dim: usize) -> Result<(FockMatrix, FockMatrix)> {
    if dim < 5 {
        return Err(Error::InvalidDimension { got: dim, min: 5 });
    }
    let x4 = normal_order_power(4).render(dim).scale_re(0.25);
    let h = h0(dim);
    let h2 = &h * &h;
    let id = FockMatrix::identity(dim);
    let s = -1.0 / 64.0;
    let big = &(&(&h2.scale_re(69.0) + &h.scale_re(51.0)) - &x4.scale_re(12.0))
        + &id.scale_re(153.0 / 4.0);
    let small = &(&h2.scale_re(69.0) - &x4.scale_re(12.0)) + &id.scale_re(51.0 / 4.0);
    Ok((big.scale_re(s), small.scale_re(s)))
}

/// Ascending eigenvalue spacings `E_{n+1} − E_n`, `n < count`, by diagonalization.
pub fn numerical_spacings(spec: &OscillatorSpec, count: usize) -> Result<Vec<f64>> {
    if count + 1 > spec.dim {
        return Err(Error::InvalidDimension {
            got: spec.dim,
            min: count + 1,
        });
    }
    let e = Propagator::new(&hamiltonian(spec)?)?.energies();
    Ok((0..count).map(|n| e[n + 1] - e[n]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(pairs: &[(i64, i64)]) -> FreqPolynomial {
        FreqPolynomial::from_ratios(pairs)
    }

    #[test]
    fn first_order_energy_examples() {
        assert_eq!(first_order_energy_coeff(4, 0).unwrap(), rat(3, 16));
        for n in 0..10i64 {
            let six = rat(5, 48) * rat(4 * n * n * n + 6 * n * n + 8 * n + 3, 1);
            assert_eq!(first_order_energy_coeff(6, n as u64).unwrap(), six);
            let oct = rat(35, 64)
                * (rat(3, 2) + rat(4 * n + 5 * n * n + 2 * n * n * n + n * n * n * n, 1));
            assert_eq!(first_order_energy_coeff(8, n as u64).unwrap(), oct);
        }
        assert!(first_order_energy_coeff(5, 0).is_err());
    }

    #[test]
    fn level_spacing_examples() {
        for n in 1..10i64 {
            assert_eq!(level_spacing_first(4, n as u64).unwrap(), rat(3 * n, 4));
            assert_eq!(
                level_spacing_first(6, n as u64).unwrap(),
                rat(5, 4) * (rat(n * n, 1) + half())
            );
            assert_eq!(
                level_spacing_first(8, n as u64).unwrap(),
                rat(35, 16) * rat(n * n * n + 2 * n, 1)
            );
        }
        assert!(level_spacing_first(4, 0).is_err());
        assert_eq!(level_spacing_closed(6, 0).unwrap(), rat(5, 8));
    }

    #[test]
    fn level_spacing_is_energy_difference() {
        for m in [4, 6, 8, 10] {
            for n in 1..12u64 {
                let diff = first_order_energy_coeff(m, n).unwrap()
                    - first_order_energy_coeff(m, n - 1).unwrap();
                assert_eq!(level_spacing_first(m, n).unwrap(), diff, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn mspt_examples() {
        for n in 0..8i64 {
            assert_eq!(
                mspt_omega_half(4, n as u64).unwrap(),
                rat(3, 4) * (rat(n, 1) + half())
            );
            let h = rat(n, 1) + half();
            assert_eq!(
                mspt_omega_half(6, n as u64).unwrap(),
                rat(5, 4) * (&h * &h + rat(1, 4))
            );
        }
        assert_eq!(mspt_omega_poly(4).unwrap(), poly(&[(0, 1), (3, 4)]));
        assert_eq!(
            mspt_omega_poly(6).unwrap(),
            poly(&[(5, 16), (0, 1), (5, 4)])
        );
        assert_eq!(
            mspt_omega_poly(8).unwrap(),
            poly(&[(0, 1), (175, 64), (0, 1), (35, 16)])
        );
        assert_eq!(
            mspt_omega_poly(10).unwrap(),
            poly(&[(567, 256), (0, 1), (441, 32), (0, 1), (63, 16)])
        );
    }

    #[test]
    fn mspt_closure() {
        for m in [4, 6, 8, 10] {
            for n in 1..=10u64 {
                let lhs = mspt_omega_half(m, n).unwrap() + mspt_omega_half(m, n - 1).unwrap();
                assert_eq!(lhs, rat(2, 1) * level_spacing_first(m, n).unwrap());
            }
        }
    }

    #[test]
    fn normalizer_examples() {
        let (l, t) = (0.03, 2.5);
        for n in 1..5 {
            assert!(
                (mspt_normalizer(4, n, l, t).unwrap() - 2.0 * (3.0 * l * t / 8.0).cos()).abs()
                    < 1e-14
            );
            let six = 2.0 * (5.0 * l * t / 4.0 * n as f64).cos();
            assert!((mspt_normalizer(6, n, l, t).unwrap() - six).abs() < 1e-14);
        }
        assert_eq!(mspt_normalizer(8, 3, 0.1, 0.0).unwrap(), 2.0);
    }

    #[test]
    fn freq_operator_examples() {
        assert_eq!(freq_operator_first(4).unwrap(), poly(&[(3, 8), (3, 4)]));
        for m in [4, 6, 8, 10] {
            let om = freq_operator_first(m).unwrap();
            assert_eq!(om.degree() as u32, m / 2 - 1);
            for n in 0..=8u64 {
                let diff = first_order_energy_coeff(m, n + 1).unwrap()
                    - first_order_energy_coeff(m, n).unwrap();
                assert_eq!(om.eval_level(n as i64), diff, "m={m} n={n}");
            }
        }
        assert_eq!(
            freq_operator_first(6).unwrap().eval_level(0),
            rat(5, 4) * rat(3, 2)
        );
    }

    #[test]
    fn equivalence_examples() {
        let (big, back) = equivalence_maps(&poly(&[(0, 1), (3, 4)]));
        assert_eq!(big, poly(&[(3, 8), (3, 4)]));
        assert_eq!(back, poly(&[(0, 1), (3, 4)]));
        for m in [4, 6, 8, 10] {
            let small = mspt_omega_poly(m).unwrap();
            let (big, back) = equivalence_maps(&small);
            assert_eq!(big, freq_operator_first(m).unwrap());
            assert_eq!(back, small);
        }
        assert_eq!(
            omega2_small_diagonal().average_shift(),
            omega2_big_diagonal()
        );
    }

    #[test]
    fn quartic_second_order_examples() {
        let q = quartic_second_order(1, 0.01);
        assert!((q.delta_e - (1.0 + 0.0075 - 1e-4 / 64.0 * 72.0)).abs() < 1e-15);
        assert_eq!(quartic_psi_coeffs(0), [rat(1, 1), rat(3, 8), rat(-21, 64)]);
        for n in 1..10u64 {
            let e = quartic_energy_coeffs(n);
            let e0 = quartic_energy_coeffs(n - 1);
            let d = quartic_spacing_coeffs(n);
            for k in 0..3 {
                assert_eq!(&e[k] - &e0[k], d[k], "n={n} order {k}");
            }
        }
    }

    #[test]
    fn omega2_operator_elements() {
        let dim = 20;
        let (big, small) = quartic_omega2_operators(dim).unwrap();
        assert!(big.is_hermitian(1e-10) && small.is_hermitian(1e-10));
        let x4 = x4_diagonal();
        for n in 0..10i64 {
            let got = big.get(n as usize, n as usize).re;
            let expect = -3.0 / 64.0 * (17.0 * ((n + 1) * (n + 1)) as f64 + 7.0);
            assert!((got - expect).abs() < 1e-12, "n={n}");
            let e2 = |k: u64| quartic_energy_coeffs(k)[2].to_f64().unwrap();
            assert!((got - (e2(n as u64 + 1) - e2(n as u64))).abs() < 1e-12);
            if n >= 1 {
                let lhs = small.get(n as usize, n as usize).re
                    + small.get(n as usize - 1, n as usize - 1).re;
                assert!((lhs - 2.0 * (e2(n as u64) - e2(n as u64 - 1))).abs() < 1e-12);
            }
            let h = n as f64 + 0.5;
            assert!(
                (small.get(n as usize, n as usize).re - omega2_small_diagonal().eval_f64(h)).abs()
                    < 1e-12
            );
            assert!(
                (big.get(n as usize, n as usize).re - omega2_big_diagonal().eval_f64(h)).abs()
                    < 1e-12
            );
            let x4n = normal_order_power(4)
                .render(dim)
                .get(n as usize, n as usize)
                .re
                / 4.0;
            assert!((x4n - x4.eval_f64(h)).abs() < 1e-12);
        }
    }

    #[test]
    fn eb_form_disagrees() {
        for n in 1..8i64 {
            let eb = omega2_eb().eval(&(rat(n, 1) - half()));
            assert_eq!(eb, rat(-3, 64) * rat(5 * n * n - 1, 1));
            assert_ne!(eb, rat(-3, 64) * rat(17 * n * n + 7, 1));
        }
    }

    #[test]
    fn oracle_spacing_small_lambda() {
        let spec = OscillatorSpec::new(6, 0.01, 64).unwrap();
        let s = numerical_spacings(&spec, 2).unwrap();
        // E₁ − E₀ at first order is 1 + λ ω(6, 1) = 1 + (15/8)λ
        assert!((s[0] - (1.0 + 0.01 * 15.0 / 8.0)).abs() < 20.0 * 0.01f64.powi(2));
        let spec = OscillatorSpec::new(4, 0.05, 64).unwrap();
        let e0 = Propagator::new(&hamiltonian(&spec).unwrap())
            .unwrap()
            .energies()[0];
        let q = quartic_second_order(0, 0.05);
        assert!((e0 - q.energy).abs() < 5.0 * 0.05f64.powi(3));
    }

    #[test]
    fn display_poly() {
        assert_eq!(poly(&[(3, 8), (3, 4)]).to_string(), "3/4 H0 + 3/8");
    }

    proptest! {
        #[test]
        fn average_shift_round_trip(cs in proptest::collection::vec(-50i64..50, 1..7)) {
            let p = FreqPolynomial::new(cs.iter().map(|&c| rat(c, 7)).collect());
            let (big, back) = equivalence_maps(&p);
            prop_assert_eq!(back, p.clone());
            prop_assert_eq!(big.degree(), p.degree());
        }

        #[test]
        fn shift_composes(cs in proptest::collection::vec(-20i64..20, 1..6), a in -5i64..5, b in -5i64..5) {
            let p = FreqPolynomial::new(cs.iter().map(|&c| rat(c, 3)).collect());
            prop_assert_eq!(p.shift(&rat(a, 1)).shift(&rat(b, 1)), p.shift(&rat(a + b, 1)));
        }
    }
}
