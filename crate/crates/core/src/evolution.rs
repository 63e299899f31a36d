//! First-order field evolution for the generalized oscillator.
//!
//! In the interaction picture the perturbation is
//! `λ′ Σ_r c_r Σ_p C(q, p) a†^p a^{q−p} e^{i(2p−q)t}` with `q = m − 2r` and
//! `c_r = t_{2r} C(m, 2r)`. Commuting `a` through one term leaves
//! `p a†^{p−1} a^{q−p}`, and the time integral gives `g_w(t)` with `w = 2p − q`:
//! `(e^{iwt} − 1)/w`, or `it` on resonance. The Heisenberg operator is
//! `a_H(t) = e^{−it} a_I(t)`.

use num_traits::ToPrimitive;

use crate::combinatorics::{binomial, t_coeff_f64};
use crate::error::{Error, Result};
use crate::fock::{
    ladder_ops, monomial, number_op, quadrature_p, quadrature_x, FockMatrix, OscillatorSpec, C64,
};
use crate::spectra::{freq_operator_first, mspt_omega_poly};

fn cis(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// One `a†^{dag} a^{ann}` contribution to the first-order `a_I(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderTerm {
    pub dag: u32,
    pub ann: u32,
    /// `c_r C(q, p) p`.
    pub weight: f64,
    /// Interaction-picture frequency `2p − q`; zero marks the secular term.
    pub w: i32,
}

impl FirstOrderTerm {
    pub fn is_secular(&self) -> bool {
        self.w == 0
    }
}

/// All first-order terms of `a_I(t)` for the `m`-th oscillator.
pub fn first_order_terms(m: u32) -> Vec<FirstOrderTerm> {
    let mut out = Vec::new();
    for r in 0..=m / 2 {
        let q = m - 2 * r;
        let c = t_coeff_f64(2 * r) * binomial(m, 2 * r);
        for p in 1..=q {
            out.push(FirstOrderTerm {
                dag: p - 1,
                ann: q - p,
                weight: c * binomial(q, p) * p as f64,
                w: 2 * p as i32 - q as i32,
            });
        }
    }
    out
}

/// `∫₀ᵗ e^{iws} ds · i`, i.e. `(e^{iwt} − 1)/w` or `it` at `w = 0`.
pub fn g_w(w: i32, t: f64) -> C64 {
    if w == 0 {
        C64::new(0.0, t)
    } else {
        (cis(w as f64 * t) - 1.0) / w as f64
    }
}

/// Quartic coefficients of `a(t) = D₁a + D₂a† − (D₃a³ + D₄a†³ + D₅a†²a + D₆a†a²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DCoeffs {
    pub d: [C64; 6],
}

impl DCoeffs {
    /// `D_k`, one-based as in the usual notation.
    pub fn get(&self, k: usize) -> C64 {
        self.d[k - 1]
    }
}

pub fn quartic_d_coeffs(lambda: f64, t: f64) -> DCoeffs {
    let l = lambda;
    let (s, s2) = (t.sin(), (2.0 * t).sin());
    DCoeffs {
        d: [
            C64::new(1.0, -0.75 * l * t) * cis(-t),
            C64::new(0.0, -0.75 * l * s),
            I * (0.25 * l * s) * cis(-2.0 * t),
            I * (0.125 * l * s2) * cis(t),
            C64::new(0.0, 0.75 * l * s),
            I * (0.75 * l * t) * cis(-t),
        ],
    }
}

/// `a(t)` assembled from the quartic coefficients.
pub fn assemble_quartic_a(d: &DCoeffs, dim: usize) -> Result<FockMatrix> {
    let (a, ad) = ladder_ops(dim)?;
    let mut out = &a.scale(d.get(1)) + &ad.scale(d.get(2));
    for (k, (p, q)) in [(3, (0, 3)), (4, (3, 0)), (5, (2, 1)), (6, (1, 2))] {
        out = &out - &monomial(dim, p, q).scale(d.get(k));
    }
    Ok(out)
}

/// Heisenberg `a(t)` to first order in λ for general even `m`.
pub fn a_first_order(spec: &OscillatorSpec, t: f64) -> Result<FockMatrix> {
    let dim = spec.dim;
    let (a, _) = ladder_ops(dim)?;
    let lp = spec.lambda_prime();
    let mut ai = a;
    for term in first_order_terms(spec.m) {
        let c = g_w(term.w, t) * (lp * term.weight);
        ai = &ai - &monomial(dim, term.dag, term.ann).scale(c);
    }
    Ok(ai.scale(cis(-t)))
}

/// Where the dressing phase of a non-secular term sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhasePlacement {
    /// `e^{iλΩ₁t(w−1)} a†^{p−1} a^{q−p}`.
    Left,
    /// `a†^{p−1} e^{iλΩ₁t(w−1)} a^{q−p}`.
    #[default]
    Between,
}

/// Heisenberg `a(t)` with the secular term resummed into `e^{−iλΩ₁t}`.
pub fn a_secular_removed(
    spec: &OscillatorSpec,
    t: f64,
    placement: PhasePlacement,
) -> Result<FockMatrix> {
    let dim = spec.dim;
    let (a, _) = ladder_ops(dim)?;
    let omega = freq_operator_first(spec.m)?;
    let lam = spec.lambda;
    let dressed =
        |k: f64| FockMatrix::diagonal(dim, |n| cis(k * lam * t * omega.eval_f64(n as f64 + 0.5)));
    let mut ai = &dressed(-1.0) * &a;
    let lp = spec.lambda_prime();
    for term in first_order_terms(spec.m)
        .into_iter()
        .filter(|x| !x.is_secular())
    {
        let c = g_w(term.w, t) * (lp * term.weight);
        let phase = dressed((term.w - 1) as f64);
        let body = match placement {
            PhasePlacement::Left => {
                &(&phase * &monomial(dim, term.dag, 0)) * &monomial(dim, 0, term.ann)
            }
            PhasePlacement::Between => {
                &(&monomial(dim, term.dag, 0) * &phase) * &monomial(dim, 0, term.ann)
            }
        };
        ai = &ai - &body.scale(c);
    }
    Ok(ai.scale(cis(-t)))
}

/// `N(t)` and `N²(t)` for the quartic oscillator, first order in λ.
///
/// Cross terms `D₁* D_k` are kept to first order, so `D₁*` enters as `e^{it}`.
pub fn number_evolved(lambda: f64, t: f64, dim: usize) -> Result<(FockMatrix, FockMatrix)> {
    let d = quartic_d_coeffs(lambda, t);
    let d1c = cis(t);
    let mono = |p, q| monomial(dim, p, q);
    let herm = |x: FockMatrix| &x + &x.dagger();
    let n = number_op(dim);

    let mut n_t = n.clone();
    n_t = &n_t + &herm(mono(2, 0).scale(d1c * d.get(2)));
    for (k, (p, q)) in [(3, (1, 3)), (4, (4, 0)), (5, (3, 1)), (6, (2, 2))] {
        n_t = &n_t - &herm(mono(p, q).scale(d1c * d.get(k)));
    }

    let mut n2 = &mono(2, 2) + &n;
    let two = |k: usize| d1c * d.get(k) * 2.0;
    n2 = &n2 + &herm((&mono(3, 1) + &mono(2, 0)).scale(two(2)));
    for (k, (p1, q1), (p2, q2)) in [
        (3, (2, 4), (1, 3)),
        (4, (5, 1), (4, 0)),
        (5, (4, 2), (3, 1)),
        (6, (3, 3), (2, 2)),
    ] {
        let body = &mono(p1, q1) + &mono(p2, q2).scale_re(2.0);
        n2 = &n2 - &herm(body.scale(two(k)));
    }
    Ok((n_t, n2))
}

/// Multiple-scale zeroth-order position `X₀(t)`.
///
/// `Φ = t(1 + λΩ(H₀))` acts diagonally; the `(n−1, n)` and `(n, n−1)` elements,
/// the only ones `X` couples, are divided by `G(n)`.
pub fn mspt_position(spec: &OscillatorSpec, t: f64) -> Result<FockMatrix> {
    let dim = spec.dim;
    let omega = mspt_omega_poly(spec.m)?;
    let phi: Vec<f64> = (0..dim)
        .map(|n| t * (1.0 + spec.lambda * omega.eval_f64(n as f64 + 0.5)))
        .collect();
    let cos_phi = FockMatrix::diagonal(dim, |n| C64::new(phi[n].cos(), 0.0));
    let sin_phi = FockMatrix::diagonal(dim, |n| C64::new(phi[n].sin(), 0.0));
    let x = quadrature_x(dim)?;
    let p = quadrature_p(dim)?;
    let mut out = &(&(&x * &cos_phi) + &(&cos_phi * &x)) + &(&(&p * &sin_phi) + &(&sin_phi * &p));
    for n in 1..dim {
        let diff = omega.eval_level(n as i64) - omega.eval_level(n as i64 - 1);
        let g = 2.0 * (0.5 * spec.lambda * t * diff.to_f64().unwrap_or(f64::NAN)).cos();
        if g.abs() < 1e-300 {
            return Err(Error::Numerical(format!("normalizer vanishes at n = {n}")));
        }
        out.set(n - 1, n, out.get(n - 1, n) / g);
        out.set(n, n - 1, out.get(n, n - 1) / g);
    }
    Ok(out)
}

/// Odd harmonics generated at first order: `|w − 1|` over the non-secular
/// terms, keeping those above the fundamental. Yields `{3, 5, …, m − 1}`.
pub fn harmonic_content(m: u32) -> Result<Vec<u32>> {
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "harmonic content is defined for even m >= 4, got {m}"
        )));
    }
    let mut h: Vec<u32> = first_order_terms(m)
        .iter()
        .map(|x| (x.w - 1).unsigned_abs())
        .filter(|&k| k > 1)
        .collect();
    h.sort_unstable();
    h.dedup();
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{hamiltonian, Propagator};

    #[test]
    fn d_coeffs_limits() {
        let d = quartic_d_coeffs(0.1, 0.0);
        assert!((d.get(1) - C64::new(1.0, 0.0)).norm() < 1e-15);
        for k in 2..=6 {
            assert!(d.get(k).norm() < 1e-15);
        }
        let d = quartic_d_coeffs(0.1, std::f64::consts::PI);
        assert!(d.get(2).norm() < 1e-15 && d.get(3).norm() < 1e-15);
        let d = quartic_d_coeffs(0.0, 2.3);
        assert!((d.get(1) - cis(-2.3)).norm() < 1e-15);
    }

    #[test]
    fn d_coeffs_small() {
        for &t in &[0.5, 2.0, 7.0, 20.0] {
            let d = quartic_d_coeffs(0.01, t);
            for k in 2..=6 {
                assert!(d.get(k).norm() <= 0.01 * (1.0 + t));
            }
        }
    }

    #[test]
    fn general_m4_equals_d_assembly() {
        for &(l, t) in &[(0.01, 0.7), (0.1, 3.0), (0.05, 11.0)] {
            let spec = OscillatorSpec::new(4, l, 24).unwrap();
            let gen = a_first_order(&spec, t).unwrap();
            let quart = assemble_quartic_a(&quartic_d_coeffs(l, t), 24).unwrap();
            assert!(gen.max_abs_diff(&quart) < 1e-12);
        }
    }

    #[test]
    fn free_limit() {
        let spec = OscillatorSpec::new(6, 0.0, 20).unwrap();
        let (a, _) = ladder_ops(20).unwrap();
        let at = a_first_order(&spec, 1.3).unwrap();
        assert!(at.max_abs_diff(&a.scale(cis(-1.3))) < 1e-14);
    }

    #[test]
    fn first_order_against_exact() {
        let t = 1.0;
        let dim = 32;
        let (a, _) = ladder_ops(dim).unwrap();
        let mut resid = vec![];
        for l in [1e-3, 5e-4] {
            let spec = OscillatorSpec::new(4, l, dim).unwrap();
            let exact = Propagator::new(&hamiltonian(&spec).unwrap())
                .unwrap()
                .heisenberg(&a, t)
                .unwrap();
            let approx = assemble_quartic_a(&quartic_d_coeffs(l, t), dim).unwrap();
            resid.push((&exact - &approx).block(8).max_abs());
        }
        let ratio = resid[0] / resid[1];
        assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
    }

    #[test]
    fn commutator_residual_second_order() {
        let dim = 30;
        let mut r = vec![];
        for l in [2e-3, 1e-3] {
            let spec = OscillatorSpec::new(6, l, dim).unwrap();
            let at = a_first_order(&spec, 2.0).unwrap();
            let c = at.commutator(&at.dagger()).block(10);
            r.push(c.max_abs_diff(&FockMatrix::identity(10)));
        }
        assert!(r[0] / r[1] > 3.0, "{r:?}");
    }

    #[test]
    fn secular_removed_agrees_to_first_order() {
        let dim = 30;
        for placement in [PhasePlacement::Left, PhasePlacement::Between] {
            let mut r = vec![];
            for l in [2e-3, 1e-3] {
                let spec = OscillatorSpec::new(4, l, dim).unwrap();
                let a1 = a_first_order(&spec, 3.0).unwrap();
                let a2 = a_secular_removed(&spec, 3.0, placement).unwrap();
                r.push((&a1 - &a2).block(10).max_abs());
            }
            assert!((r[0] / r[1] - 4.0).abs() < 0.3, "{placement:?} {r:?}");
        }
    }

    #[test]
    fn secular_removed_bounded() {
        let l = 0.01;
        let spec = OscillatorSpec::new(4, l, 24).unwrap();
        let norm = |t: f64| {
            a_secular_removed(&spec, t, PhasePlacement::Between)
                .unwrap()
                .block(12)
                .spectral_norm()
        };
        let base = norm(0.0);
        for k in 1..=10 {
            let t = k as f64 / l;
            assert!(norm(t) < 1.2 * base, "t={t}");
        }
        let secular = a_first_order(&spec, 10.0 / l)
            .unwrap()
            .block(12)
            .spectral_norm();
        assert!(secular > 3.0 * base);
    }

    #[test]
    fn secular_removed_frequency() {
        let l = 0.02;
        let spec = OscillatorSpec::new(4, l, 20).unwrap();
        for n in 1..5usize {
            let t = 40.0;
            let el = a_secular_removed(&spec, t, PhasePlacement::Between)
                .unwrap()
                .get(n - 1, n);
            let expect = (n as f64).sqrt() * cis(-t * (1.0 + l * 0.75 * n as f64));
            assert!((el - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn number_evolved_basics() {
        let dim = 20;
        let (n, n2) = number_evolved(0.0, 1.1, dim).unwrap();
        let num = number_op(dim);
        assert!(n.max_abs_diff(&num) < 1e-14);
        assert!(n2.max_abs_diff(&(&num * &num)) < 1e-12);
        let (n, n2) = number_evolved(0.05, 1.1, dim).unwrap();
        assert!(n.is_hermitian(1e-12) && n2.is_hermitian(1e-12));
    }

    #[test]
    fn number_against_exact() {
        use crate::fock::{coherent_state, expectation};
        let dim = 40;
        let psi = coherent_state(1.2, 0.4, dim, 1e-14).unwrap();
        let mut r = vec![];
        for l in [1e-3, 5e-4] {
            let spec = OscillatorSpec::new(4, l, dim).unwrap();
            let exact = Propagator::new(&hamiltonian(&spec).unwrap())
                .unwrap()
                .heisenberg(&number_op(dim), 0.9)
                .unwrap();
            let (n, _) = number_evolved(l, 0.9, dim).unwrap();
            r.push((expectation(&exact, &psi).unwrap() - expectation(&n, &psi).unwrap()).norm());
        }
        assert!((r[0] / r[1] - 4.0).abs() < 0.5, "{r:?}");
    }

    #[test]
    fn mspt_position_cases() {
        let dim = 16;
        let spec = OscillatorSpec::new(4, 0.0, dim).unwrap();
        let x0 = mspt_position(&spec, 0.8).unwrap();
        let expect = &quadrature_x(dim).unwrap().scale_re(0.8f64.cos())
            + &quadrature_p(dim).unwrap().scale_re(0.8f64.sin());
        assert!(x0.max_abs_diff(&expect) < 1e-14);

        for m in [4, 6, 8] {
            let l = 0.01;
            let spec = OscillatorSpec::new(m, l, dim).unwrap();
            let t = 3.7;
            let x0 = mspt_position(&spec, t).unwrap();
            for n in 1..6u64 {
                let w = crate::spectra::level_spacing_first(m, n)
                    .unwrap()
                    .to_f64()
                    .unwrap();
                let expect = ((n as f64) / 2.0).sqrt() * cis(-t * (1.0 + l * w));
                assert!(
                    (x0.get(n as usize - 1, n as usize) - expect).norm() < 1e-12,
                    "m={m} n={n}"
                );
            }
        }
    }

    #[test]
    fn harmonics() {
        assert_eq!(harmonic_content(4).unwrap(), vec![3]);
        assert_eq!(harmonic_content(6).unwrap(), vec![3, 5]);
        assert_eq!(harmonic_content(8).unwrap(), vec![3, 5, 7]);
        assert!(harmonic_content(5).is_err());
    }

    #[test]
    fn secular_term_count() {
        for m in [4, 6, 8, 10] {
            let n = first_order_terms(m)
                .iter()
                .filter(|x| x.is_secular())
                .count();
            assert_eq!(n as u32, m / 2);
        }
    }
}
