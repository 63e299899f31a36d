//! Aharonov–Anandan phase of an oscillator `H = a†a + ½ + λ′F`, evaluated in
//! the gauge where the cyclic state returns with phase `2π`.
//!
//! Every route returns the raw β; no reduction modulo `2π` is applied.

use std::f64::consts::PI;

use crate::combinatorics::{binomial, ln_factorial, t_coeff_f64};
use crate::error::{Error, Result};
use crate::fock::{coherent_state, FockMatrix, FockState};
use crate::C64;

/// Auto-sized bases drop amplitudes only once `Σ|C_n|` beyond the cut is below
/// this bound. That keeps the discarded mass far below it and also bounds the
/// cross terms `C_k* C_n ⟨k|F|n⟩` that straddle the cut.
pub const STATS_TAIL: f64 = 1e-12;

const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StatsFamily {
    /// Coherent light, `α = |α| e^{iθ}`.
    Poissonian {
        alpha_mag: f64,
        theta: f64,
    },
    /// Sub-Poissonian binomial distribution.
    Binomial {
        n: u32,
        p: f64,
    },
    /// Super-Poissonian negative binomial distribution.
    NegativeBinomial {
        w: u32,
        q: f64,
    },
    Custom,
}

impl StatsFamily {
    pub fn label(&self) -> &'static str {
        match self {
            StatsFamily::Poissonian { .. } => "poissonian",
            StatsFamily::Binomial { .. } => "sub-poissonian",
            StatsFamily::NegativeBinomial { .. } => "super-poissonian",
            StatsFamily::Custom => "custom",
        }
    }
}

/// Input amplitudes `C_n` over `n = 0..dim−1` plus the family that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct InputStatistics {
    family: StatsFamily,
    amps: Vec<C64>,
    tail: f64,
}

impl InputStatistics {
    /// Coherent input on an auto-sized basis (see [`STATS_TAIL`]).
    pub fn poissonian(alpha_mag: f64, theta: f64) -> Result<Self> {
        if alpha_mag < 0.0 || !alpha_mag.is_finite() {
            return Err(Error::Domain(format!(
                "|alpha| must be finite and >= 0, got {alpha_mag}"
            )));
        }
        let n0 = alpha_mag * alpha_mag;
        let family = StatsFamily::Poissonian { alpha_mag, theta };
        if n0 == 0.0 {
            return Self::from_weights(family, &[1.0], 0.0);
        }
        let (weights, tail) = truncated_weights(n0, |n| -n0 + n as f64 * n0.ln() - ln_factorial(n));
        Ok(Self::from_weights(family, &weights, tail)?.with_phase(theta))
    }

    pub fn poissonian_dim(alpha_mag: f64, theta: f64, dim: usize) -> Result<Self> {
        let psi = coherent_state(alpha_mag, theta, dim, STATS_TAIL)?;
        Ok(Self {
            family: StatsFamily::Poissonian { alpha_mag, theta },
            amps: psi.amplitudes().iter().copied().collect(),
            tail: psi.tail(),
        })
    }

    /// `|C_n|² = N!/((N−n)! n!) pⁿ (1−p)^{N−n}`, supported on `n ≤ N`.
    pub fn binomial(n: u32, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!(
                "binomial p must lie in [0, 1], got {p}"
            )));
        }
        let weights: Vec<f64> = (0..=n)
            .map(|k| binomial(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32))
            .collect();
        Self::from_weights(StatsFamily::Binomial { n, p }, &weights, 0.0)
    }

    /// `|C_n|² = (n+W−1)!/((W−1)! n!) qⁿ (1−q)^W` on an auto-sized basis.
    pub fn negative_binomial(w: u32, q: f64) -> Result<Self> {
        if w == 0 {
            return Err(Error::Domain("negative binomial needs W >= 1".into()));
        }
        if !(0.0..1.0).contains(&q) {
            return Err(Error::Domain(format!(
                "negative binomial q must lie in [0, 1), got {q}"
            )));
        }
        let family = StatsFamily::NegativeBinomial { w, q };
        if q == 0.0 {
            return Self::from_weights(family, &[1.0], 0.0);
        }
        let mean = w as f64 * q / (1.0 - q);
        let ln_w = |n: usize| {
            ln_factorial(n + w as usize - 1) - ln_factorial(w as usize - 1) - ln_factorial(n)
                + n as f64 * q.ln()
                + w as f64 * (1.0 - q).ln()
        };
        let (weights, tail) = truncated_weights(mean, ln_w);
        Self::from_weights(family, &weights, tail)
    }

    /// Arbitrary amplitudes; normalized over the given basis.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let psi = FockState::from_amplitudes(amps, 0.0)?;
        Ok(Self {
            family: StatsFamily::Custom,
            amps: psi.amplitudes().iter().copied().collect(),
            tail: 0.0,
        })
    }

    fn from_weights(family: StatsFamily, weights: &[f64], tail: f64) -> Result<Self> {
        let amps = weights
            .iter()
            .map(|w| C64::new(w.max(0.0).sqrt(), 0.0))
            .collect();
        let psi = FockState::from_amplitudes(amps, tail)?;
        Ok(Self {
            family,
            amps: psi.amplitudes().iter().copied().collect(),
            tail,
        })
    }

    /// Multiplies `C_n` by `e^{inθ}`, the phase a coherent input would carry.
    pub fn with_phase(mut self, theta: f64) -> Self {
        for (n, c) in self.amps.iter_mut().enumerate() {
            *c *= C64::from_polar(1.0, n as f64 * theta);
        }
        self
    }

    /// Replaces `arg C_n` by `phases(n)`, keeping `|C_n|`.
    pub fn with_phases(mut self, mut phases: impl FnMut(usize) -> f64) -> Self {
        for (n, c) in self.amps.iter_mut().enumerate() {
            *c = C64::from_polar(c.norm(), phases(n));
        }
        self
    }

    /// Zero-pads the basis to `dim` (never shrinks).
    pub fn padded(mut self, dim: usize) -> Self {
        if dim > self.amps.len() {
            self.amps.resize(dim, C64::new(0.0, 0.0));
        }
        self
    }

    pub fn family(&self) -> StatsFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn weight(&self, n: usize) -> f64 {
        self.amps.get(n).map_or(0.0, |c| c.norm_sqr())
    }

    pub fn weights(&self) -> Vec<f64> {
        self.amps.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn mean(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let second: f64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(n, c)| (n * n) as f64 * c.norm_sqr())
            .sum();
        second - mean * mean
    }
}

/// Weights `exp(ln_w(n))` cut where `Σ_{n ≥ dim} √w_n ≤ STATS_TAIL`; returns
/// the kept weights and the discarded mass.
fn truncated_weights(mean: f64, ln_w: impl Fn(usize) -> f64) -> (Vec<f64>, f64) {
    let mut weights = Vec::new();
    loop {
        let n = weights.len();
        let x = ln_w(n).exp();
        weights.push(x);
        if n as f64 > mean && x < 1e-60 {
            break;
        }
    }
    let mut amp_tail = 0.0;
    let mut mass_tail = 0.0;
    let mut cut = 1;
    for n in (1..weights.len()).rev() {
        if amp_tail + weights[n].sqrt() > STATS_TAIL {
            cut = n + 1;
            break;
        }
        amp_tail += weights[n].sqrt();
        mass_tail += weights[n];
    }
    weights.truncate(cut);
    (weights, mass_tail)
}

fn check_lambda_prime(lambda_prime: f64) -> Result<()> {
    if !lambda_prime.is_finite() || lambda_prime <= 0.0 {
        return Err(Error::Domain(format!(
            "lambda' must be finite and > 0 for a finite cyclic period, got {lambda_prime}"
        )));
    }
    Ok(())
}

/// `2π + Σ|C_n|² 2πn/λ′`, shared by every route.
fn free_part(stats: &InputStatistics, lambda_prime: f64) -> f64 {
    2.0 * PI + 2.0 * PI * stats.mean() / lambda_prime
}

/// `Σ_{k,n} C_k* C_n ⟨k|F|n⟩` by direct double summation.
fn double_sum(stats: &InputStatistics, f: &FockMatrix) -> C64 {
    let c = stats.amps();
    let mut acc = C64::new(0.0, 0.0);
    for (k, ck) in c.iter().enumerate() {
        for (n, cn) in c.iter().enumerate() {
            acc += ck.conj() * cn * f.get(k, n);
        }
    }
    acc
}

/// β = 2π + Σ|C_n|²(2πn/λ′) + 2π Σ_{k,n} C_k* C_n ⟨k|F|n⟩.
///
/// The `2πn/λ′` term is absent from Joshi et al.'s treatment of the Kerr
/// Hamiltonian; it is kept here.
pub fn aa_phase_general(stats: &InputStatistics, lambda_prime: f64, f: &FockMatrix) -> Result<f64> {
    check_lambda_prime(lambda_prime)?;
    if !f.is_hermitian(HERMITIAN_TOL * f.max_abs().max(1.0)) {
        return Err(Error::Contract(
            "F must be Hermitian for a real geometric phase".into(),
        ));
    }
    if f.dim() < stats.dim() {
        return Err(Error::DimensionMismatch(f.dim(), stats.dim()));
    }
    let s = double_sum(stats, f);
    Ok(free_part(stats, lambda_prime) + 2.0 * PI * s.re)
}

/// β = Σ|C_n|² 2π(1 + n/λ′ + P(n)) with `poly` the ascending coefficients of P.
pub fn aa_phase_number_poly(
    stats: &InputStatistics,
    lambda_prime: f64,
    poly: &[f64],
) -> Result<f64> {
    check_lambda_prime(lambda_prime)?;
    let p = |n: f64| poly.iter().rev().fold(0.0, |acc, c| acc * n + c);
    Ok(stats
        .weights()
        .iter()
        .enumerate()
        .map(|(n, w)| w * 2.0 * PI * (1.0 + n as f64 / lambda_prime + p(n as f64)))
        .sum())
}

/// β for `F = (a† + a)^m` from the normal-ordered expansion
/// `Σ_r t_{2r} mC2r Σ_p (m−2r)Cp a†^p a^{m−2r−p}`, each term contributing
/// `C*_{n−q+2p} C_n √(n!(n−q+2p)!)/(n−q+p)!` with `q = m − 2r`.
pub fn aa_phase_m(stats: &InputStatistics, m: u32, lambda_prime: f64) -> Result<f64> {
    check_lambda_prime(lambda_prime)?;
    if m == 0 || m % 2 == 1 {
        return Err(Error::InvalidSpec(format!(
            "m must be even and >= 2, got {m}"
        )));
    }
    let c = stats.amps();
    let dim = c.len() as i64;
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..=m / 2 {
        let q = m - 2 * r;
        let outer = t_coeff_f64(2 * r) * binomial(m, 2 * r);
        for p in 0..=q {
            let coeff = outer * binomial(q, p);
            for (n, cn) in c.iter().enumerate() {
                let n = n as i64;
                let mid = n - q as i64 + p as i64;
                let k = mid + p as i64;
                if mid < 0 || k < 0 || k >= dim {
                    continue;
                }
                let ln_elem = 0.5 * (ln_factorial(n as usize) + ln_factorial(k as usize))
                    - ln_factorial(mid as usize);
                acc += c[k as usize].conj() * cn * (coeff * ln_elem.exp());
            }
        }
    }
    Ok(free_part(stats, lambda_prime) + 2.0 * PI * acc.re)
}

/// Closed form for `F = (a† + a)⁴` and coherent input, reference form:
/// `8π + 2π[(6|α|⁴ + 12|α|² + |α|²/λ′) + 4|α|²(2|α|²+3) cos 2θ + 2|α|² cos 4θ]`.
///
/// The last term should carry `|α|⁴`; see [`aa_phase_quartic_coherent_corrected`].
/// The two agree at `|α|² ∈ {0, 1}`.
pub fn aa_phase_quartic_coherent(alpha_mag: f64, theta: f64, lambda_prime: f64) -> Result<f64> {
    check_lambda_prime(lambda_prime)?;
    let n0 = alpha_mag * alpha_mag;
    let bracket = 6.0 * n0 * n0
        + 12.0 * n0
        + n0 / lambda_prime
        + 4.0 * n0 * (2.0 * n0 + 3.0) * (2.0 * theta).cos()
        + 2.0 * n0 * (4.0 * theta).cos();
    Ok(8.0 * PI + 2.0 * PI * bracket)
}

/// As [`aa_phase_quartic_coherent`] with the `2|α|⁴ cos 4θ` term that
/// `⟨α|(a† + a)⁴|α⟩ = x⁴ + 6x² + 3`, `x = 2|α| cos θ`, produces.
pub fn aa_phase_quartic_coherent_corrected(
    alpha_mag: f64,
    theta: f64,
    lambda_prime: f64,
) -> Result<f64> {
    check_lambda_prime(lambda_prime)?;
    let n0 = alpha_mag * alpha_mag;
    let bracket = 6.0 * n0 * n0
        + 12.0 * n0
        + n0 / lambda_prime
        + 4.0 * n0 * (2.0 * n0 + 3.0) * (2.0 * theta).cos()
        + 2.0 * n0 * n0 * (4.0 * theta).cos();
    Ok(8.0 * PI + 2.0 * PI * bracket)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::monomial;
    use crate::ordering::normal_order_power;
    use proptest::prelude::*;

    fn x_power(m: u32, dim: usize) -> FockMatrix {
        normal_order_power(m).render(dim)
    }

    /// `⟨α|(a†+a)⁴|α⟩` from `x = 2|α| cos θ`: `x⁴ + 6x² + 3`.
    fn quartic_moment_oracle(alpha_mag: f64, theta: f64) -> f64 {
        let x = 2.0 * alpha_mag * theta.cos();
        x.powi(4) + 6.0 * x * x + 3.0
    }

    #[test]
    fn empty_f_vacuum_is_two_pi() {
        let s = InputStatistics::poissonian(0.0, 0.0).unwrap();
        let b = aa_phase_general(&s, 0.5, &FockMatrix::zeros(s.dim())).unwrap();
        assert!((b - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn vacuum_quartic_is_eight_pi() {
        let s = InputStatistics::poissonian(0.0, 0.0).unwrap().padded(8);
        let b = aa_phase_general(&s, 0.25, &x_power(4, 8)).unwrap();
        assert!((b - 8.0 * PI).abs() < 1e-12);
        let b = aa_phase_quartic_coherent(0.0, 1.0, 0.25).unwrap();
        assert!((b - 8.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn vacuum_sextic_constant_fifteen() {
        let s = InputStatistics::poissonian(0.0, 0.0).unwrap().padded(10);
        let b = aa_phase_m(&s, 6, 0.1).unwrap();
        assert!((b - (2.0 * PI + 2.0 * PI * 15.0)).abs() < 1e-12);
    }

    #[test]
    fn closed_form_unit_amplitude() {
        let lp = 1.0 / 16.0;
        let expect = 8.0 * PI + 2.0 * PI * (18.0 + 16.0 + 4.0 * 5.0 + 2.0);
        let s = InputStatistics::poissonian(1.0, 0.0).unwrap();
        let dim = s.dim() + 4;
        let fock = aa_phase_general(&s.clone().padded(dim), lp, &x_power(4, dim)).unwrap();
        assert!((fock - expect).abs() < 1e-9, "{fock} vs {expect}");
        assert!((aa_phase_quartic_coherent(1.0, 0.0, lp).unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn corrected_closed_form_matches_moment_oracle() {
        for &a2 in &[0.0, 1.0, 4.0] {
            for &th in &[0.0, PI / 4.0, PI / 2.0, 0.3] {
                let a: f64 = f64::sqrt(a2);
                let lp = 0.2;
                let oracle =
                    2.0 * PI + 2.0 * PI * a2 / lp + 2.0 * PI * quartic_moment_oracle(a, th);
                let closed = aa_phase_quartic_coherent_corrected(a, th, lp).unwrap();
                assert!((closed - oracle).abs() < 1e-9 * oracle);
            }
        }
    }

    #[test]
    fn stated_and_corrected_differ_off_unit_amplitude() {
        let lp = 0.2;
        let diff = aa_phase_quartic_coherent(2.0, 0.0, lp).unwrap()
            - aa_phase_quartic_coherent_corrected(2.0, 0.0, lp).unwrap();
        // 2π·2(|α|² − |α|⁴) at |α|² = 4
        assert!((diff - 2.0 * PI * 2.0 * (4.0 - 16.0)).abs() < 1e-9);
    }

    #[test]
    fn beta_m_matches_matrix_route() {
        for &m in &[2u32, 4, 6, 8] {
            for stats in [
                InputStatistics::poissonian(1.3, 0.7).unwrap(),
                InputStatistics::binomial(12, 0.35).unwrap().with_phase(0.4),
                InputStatistics::negative_binomial(3, 0.4)
                    .unwrap()
                    .with_phase(-1.1),
            ] {
                let dim = stats.dim();
                let a = aa_phase_m(&stats, m, 0.3).unwrap();
                let b = aa_phase_general(&stats, 0.3, &x_power(m, dim)).unwrap();
                assert!(
                    (a - b).abs() < 1e-10 * b.abs().max(1.0),
                    "m={m}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn beta_m_quartic_coherent_matches_corrected_closed_form() {
        let (a, th, lp) = (1.5, 0.6, 0.125);
        let s = InputStatistics::poissonian(a, th).unwrap();
        let b = aa_phase_m(&s, 4, lp).unwrap();
        let c = aa_phase_quartic_coherent_corrected(a, th, lp).unwrap();
        assert!((b - c).abs() < 1e-9 * c);
    }

    #[test]
    fn kerr_number_poly_matches_matrix() {
        let s = InputStatistics::poissonian(1.7, 0.2).unwrap();
        let dim = s.dim();
        let f = monomial(dim, 2, 2);
        let a = aa_phase_general(&s, 0.4, &f).unwrap();
        let b = aa_phase_number_poly(&s, 0.4, &[0.0, -1.0, 1.0]).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
        // closed form of Σ|C_n|²(n² − n) for Poisson is N₀²
        let n0: f64 = 1.7 * 1.7;
        let expect = 2.0 * PI * (1.0 + n0 / 0.4 + n0 * n0);
        assert!((b - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn zero_poly_is_free_part() {
        let s = InputStatistics::binomial(9, 0.5).unwrap();
        let b = aa_phase_number_poly(&s, 2.0, &[]).unwrap();
        assert!((b - (2.0 * PI + 2.0 * PI * 4.5 / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn theta_dependence_for_off_diagonal_f() {
        let lp = 0.1;
        let s0 = InputStatistics::poissonian(1.0, 0.0).unwrap();
        let s1 = InputStatistics::poissonian(1.0, PI / 4.0).unwrap();
        for m in [4u32, 6] {
            let b0 = aa_phase_m(&s0, m, lp).unwrap();
            let b1 = aa_phase_m(&s1, m, lp).unwrap();
            assert!((b0 - b1).abs() > 1.0, "m={m}");
        }
    }

    #[test]
    fn errors() {
        let s = InputStatistics::poissonian(1.0, 0.0).unwrap();
        assert!(matches!(
            aa_phase_quartic_coherent(1.0, 0.0, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(aa_phase_m(&s, 4, 0.0), Err(Error::Domain(_))));
        let nh = monomial(s.dim(), 1, 0);
        assert!(matches!(
            aa_phase_general(&s, 1.0, &nh),
            Err(Error::Contract(_))
        ));
        assert!(InputStatistics::binomial(3, 1.2).is_err());
        assert!(InputStatistics::negative_binomial(2, 1.0).is_err());
        assert!(InputStatistics::negative_binomial(0, 0.5).is_err());
    }

    #[test]
    fn families_have_their_moments() {
        let b = InputStatistics::binomial(20, 0.3).unwrap();
        assert!((b.mean() - 6.0).abs() < 1e-12);
        assert!((b.variance() - 4.2).abs() < 1e-10);
        assert!(b.variance() < b.mean());
        let nb = InputStatistics::negative_binomial(4, 0.5).unwrap();
        assert!((nb.mean() - 4.0).abs() < 1e-9);
        assert!((nb.variance() - 8.0).abs() < 1e-8);
        assert!(nb.tail() <= STATS_TAIL);
        let p = InputStatistics::poissonian(2.0, 0.0).unwrap();
        assert!((p.mean() - 4.0).abs() < 1e-9);
        assert!((p.variance() - 4.0).abs() < 1e-8);
    }

    #[test]
    fn double_sum_is_real_for_hermitian_f() {
        let s = InputStatistics::negative_binomial(2, 0.3)
            .unwrap()
            .with_phases(|n| 0.37 * (n * n) as f64);
        let f = x_power(6, s.dim());
        assert!(double_sum(&s, &f).im.abs() < 1e-12 * double_sum(&s, &f).norm().max(1.0));
    }

    proptest! {
        #[test]
        fn diagonal_f_ignores_phases(phases in proptest::collection::vec(0.0f64..2.0 * PI, 64), a in 0.1f64..2.0) {
            let base = InputStatistics::poissonian(a, 0.0).unwrap();
            let dim = base.dim();
            let f = FockMatrix::diagonal(dim, |n| C64::new((n * n) as f64 - 0.5 * n as f64, 0.0));
            let rand = base.clone().with_phases(|n| phases[n % phases.len()]);
            let b0 = aa_phase_general(&base, 0.7, &f).unwrap();
            let b1 = aa_phase_general(&rand, 0.7, &f).unwrap();
            prop_assert!((b0 - b1).abs() < 1e-12 * b0.abs().max(1.0));
        }

        #[test]
        fn number_poly_equals_diagonal_matrix(c0 in -2.0f64..2.0, c1 in -2.0f64..2.0, c2 in -1.0f64..1.0, a in 0.0f64..2.0) {
            let s = InputStatistics::poissonian(a, 0.3).unwrap();
            let f = FockMatrix::diagonal(s.dim(), |n| {
                let n = n as f64;
                C64::new(c0 + c1 * n + c2 * n * n, 0.0)
            });
            let x = aa_phase_general(&s, 0.5, &f).unwrap();
            let y = aa_phase_number_poly(&s, 0.5, &[c0, c1, c2]).unwrap();
            prop_assert!((x - y).abs() < 1e-12 * x.abs().max(1.0));
        }
    }
}
