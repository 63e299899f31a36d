//! Exact and floating combinatorial helpers shared by the closed forms.

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub fn factorial_big(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial_big(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Generalized binomial `x choose k` for integer `x`, possibly negative.
pub fn binomial_signed_big(x: i64, k: u32) -> BigInt {
    let mut num = BigInt::one();
    for i in 0..k as i64 {
        num *= BigInt::from(x - i);
    }
    num / factorial_big(k)
}

/// `(2j − 1)!!` written as `r!/(2^{r/2}(r/2)!)` with `r = 2j`.
pub fn double_factorial_odd_big(j: u32) -> BigInt {
    (0..j).fold(BigInt::one(), |acc, i| acc * BigInt::from(2 * i + 1))
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `t_r = r!/(2^{r/2}(r/2)!)` for even `r`, as a float.
pub fn t_coeff_f64(r: u32) -> f64 {
    debug_assert!(r.is_multiple_of(2));
    (0..r / 2).fold(1.0, |acc, i| acc * (2 * i + 1) as f64)
}

/// `ln n!` by direct summation for small n, Stirling series beyond.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 256 {
        (2..=n).map(|k| (k as f64).ln()).sum()
    } else {
        let x = n as f64 + 1.0;
        (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(binomial_big(9, 4), BigInt::from(126));
        assert_eq!(binomial(12, 6), 924.0);
        assert_eq!(double_factorial_odd_big(4), BigInt::from(105));
        assert_eq!(binomial_signed_big(-1, 3), BigInt::from(-1));
        assert_eq!(binomial_signed_big(5, 2), BigInt::from(10));
        assert_eq!(t_coeff_f64(6), 15.0);
    }

    #[test]
    fn ln_factorial_branches_agree() {
        let direct: f64 = (2..=300).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(300) - direct).abs() < 1e-9);
    }
}
