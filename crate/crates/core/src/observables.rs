//! Quantum-optical observables of a coherent input `|α⟩`, `α = |α|e^{iθ}`.
//!
//! Closed forms are implemented as stated, including where they disagree
//! with the first-order operator algebra; the `*_from_scratch` and `*_exact`
//! routes are the independent checks.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::combinatorics::{binomial, t_coeff_f64};
use crate::error::{Error, Result};
use crate::evolution::{
    assemble_quartic_a, first_order_terms, g_w, number_evolved, quartic_d_coeffs,
};
use crate::fock::{coherent_state, expectation, lambda_prime, monomial, variance, FockMatrix, C64};
use crate::quality::MaybePole;

fn cis(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

/// Below this `|cos(t − θ)|` the phase parameter `Q` is reported as a pole.
pub const POLE_TOL: f64 = 1e-12;

/// Relative band inside which `d` counts as zero.
pub const CLASSIFY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhotonClass {
    Coherent,
    /// Bunched, super-Poissonian.
    Bunched,
    /// Antibunched, sub-Poissonian.
    Antibunched,
}

impl PhotonClass {
    pub fn label(self) -> &'static str {
        match self {
            PhotonClass::Coherent => "coherent",
            PhotonClass::Bunched => "bunched/super-poissonian",
            PhotonClass::Antibunched => "antibunched/sub-poissonian",
        }
    }
}

/// Class from the sign of `d = ΔN² − N̄`, with `|d| ≤ tol` treated as zero.
pub fn classify(d: f64, tol: f64) -> PhotonClass {
    if d.abs() <= tol {
        PhotonClass::Coherent
    } else if d > 0.0 {
        PhotonClass::Bunched
    } else {
        PhotonClass::Antibunched
    }
}

/// `g²(0)` or Mandel `Q`: a number, or the vacuum limit where only the
/// approach direction is meaningful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StatValue {
    Value(f64),
    /// `0/0` at `N₀ = 0`; the payload is the limiting value when one exists.
    VacuumLimit(Option<f64>),
}

impl StatValue {
    pub fn value(self) -> Option<f64> {
        match self {
            StatValue::Value(v) => Some(v),
            StatValue::VacuumLimit(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonStats {
    pub mean: f64,
    pub var: f64,
    pub d: f64,
    pub g2: StatValue,
    pub mandel_q: StatValue,
    pub class: PhotonClass,
}

/// First-order quartic photon statistics.
pub fn photon_stats_quartic(n0: f64, theta: f64, lambda: f64, t: f64) -> Result<PhotonStats> {
    if n0.is_nan() || n0 < 0.0 || lambda.is_nan() || lambda < 0.0 {
        return Err(Error::Domain("N0 and lambda must be >= 0".into()));
    }
    let a = t.sin() * (t - 2.0 * theta).sin();
    let b = (2.0 * t).sin() * (2.0 * (t - 2.0 * theta)).sin();
    let mean = n0 * (1.0 + lambda / 4.0 * (2.0 * (3.0 + 2.0 * n0) * a + n0 * b));
    let var = n0 * (1.0 + lambda * ((3.0 + 4.0 * n0) * a + n0 * b));
    let d = 0.75 * lambda * n0 * ((2.0 + 4.0 * n0) * a + n0 * b);
    if n0 == 0.0 {
        let x = 1.5 * lambda * a;
        let class = classify(x, CLASSIFY_TOL);
        return Ok(PhotonStats {
            mean,
            var,
            d,
            g2: StatValue::VacuumLimit(None),
            mandel_q: StatValue::VacuumLimit(Some(x / (1.0 + x))),
            class,
        });
    }
    Ok(PhotonStats {
        mean,
        var,
        d,
        g2: StatValue::Value(1.0 + d / (mean * mean)),
        mandel_q: StatValue::Value(d / mean),
        class: classify(d, CLASSIFY_TOL * n0.max(1.0).powi(2)),
    })
}

/// `d` for the `m`-th oscillator, first order: the closed double sum over
/// the non-resonant terms.
pub fn d_general(m: u32, alpha_mag: f64, theta: f64, lambda: f64, t: f64) -> Result<f64> {
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::InvalidSpec(format!(
            "m must be even and >= 4, got {m}"
        )));
    }
    let mut acc = 0.0;
    for r in 0..=m / 2 {
        let q = m - 2 * r;
        let c = t_coeff_f64(2 * r) * binomial(m, 2 * r);
        for p in 0..=q {
            if 2 * p == q || p < 2 {
                continue;
            }
            let w = (2 * p) as f64 - q as f64;
            let coef = c * binomial(q, p) * (p * (p - 1)) as f64 / w;
            acc += coef
                * alpha_mag.powi(q as i32)
                * (0.5 * w * (t - 2.0 * theta)).sin()
                * (0.5 * w * t).sin();
        }
    }
    Ok(4.0 * lambda_prime(m, lambda) * acc)
}

/// Photon statistics from the exact propagator; used as an oracle.
pub fn photon_stats_exact(
    m: u32,
    alpha_mag: f64,
    theta: f64,
    lambda: f64,
    t: f64,
    dim: usize,
) -> Result<(f64, f64)> {
    use crate::fock::{hamiltonian, number_op, OscillatorSpec, Propagator};
    let spec = OscillatorSpec::new(m, lambda, dim)?;
    let psi = coherent_state(alpha_mag, theta, dim, 1e-13)?;
    let u = Propagator::new(&hamiltonian(&spec)?)?.unitary(t);
    let out = psi.evolve(&u)?;
    let n = number_op(dim);
    let mean = expectation(&n, &out)?.re;
    let var = variance(&n, &out)?;
    Ok((mean, var))
}

/// Phase-fluctuation parameters with their `λ = 0` baselines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseParams {
    pub u: f64,
    pub s: f64,
    pub q: MaybePole,
    pub u0: f64,
    pub s0: f64,
    pub q0: MaybePole,
}

fn q_baseline(theta: f64, t: f64) -> MaybePole {
    let c = (t - theta).cos();
    if c.abs() < POLE_TOL {
        MaybePole::Pole
    } else {
        MaybePole::Finite(1.0 / (4.0 * c * c))
    }
}

fn s_baseline(n0: f64) -> f64 {
    n0 / (4.0 * (n0 + 0.5))
}

/// Mean photon number after the interaction, first order.
pub fn mean_photon_number(n0: f64, theta: f64, lambda: f64, t: f64) -> f64 {
    let a = t.sin() * (t - 2.0 * theta).sin();
    let b = (2.0 * t).sin() * (2.0 * (t - 2.0 * theta)).sin();
    n0 * (1.0 + lambda / 4.0 * (2.0 * (3.0 + 2.0 * n0) * a + n0 * b))
}

/// Reference closed forms for `U`, `S`, `Q`.
///
/// `U` carries `sin(t − θ)` in its first term as stated; the operator algebra
/// gives `sin(t − 2θ)` there, see [`pb_phase_params_from_scratch`].
pub fn pb_phase_params(n0: f64, theta: f64, lambda: f64, t: f64) -> Result<PhaseParams> {
    if n0.is_nan() || n0 < 0.0 {
        return Err(Error::Domain("N0 must be >= 0".into()));
    }
    if n0 == 0.0 {
        return pb_phase_params_vacuum(theta, lambda, t);
    }
    let l = lambda;
    let (s1, s2t) = (t.sin(), (2.0 * t).sin());
    let st2 = (t - 2.0 * theta).sin();
    let s2t2 = (2.0 * (t - 2.0 * theta)).sin();
    let s2t1 = (2.0 * (t - theta)).sin();
    let s2th = (2.0 * theta).sin();

    let u = 0.5
        * (1.0
            + l / 4.0 * (6.0 * (1.0 + 2.0 * n0) * s1 * (t - theta).sin() + 3.0 * n0 * s2t * s2t2));

    let nbar = mean_photon_number(n0, theta, l, t);
    let s = n0 / 4.0 / (nbar + 0.5)
        * (1.0
            + l / 4.0
                * (6.0 * (1.0 + 2.0 * n0) * s1 * s1
                    + 6.0 * n0 * t * s2t1
                    + 3.0 * n0 * s2th * s2t
                    + 4.0 * (3.0 + 2.0 * n0) * s1 * st2
                    + 4.0 * n0 * n0 * s2t * s2t2));

    let q0 = q_baseline(theta, t);
    let q = match q0 {
        MaybePole::Pole => MaybePole::Pole,
        MaybePole::Finite(q0v) => {
            let c2 = (t - theta).cos().powi(2);
            let first = 6.0 * (1.0 + 2.0 * n0) * s1 * s1
                + 4.0 * (3.0 + 4.0 * n0) * s1 * st2
                + n0 * (6.0 * t * s2t2 + 3.0 * s2th * s2t + 4.0 * s2t * s2t2);
            let second = -6.0 * t * s2t1 + (6.0 + 4.0 * n0) * s1 * st2
                - 6.0 * (1.0 + n0) * s1 * s1
                - 2.0 * n0 * s1 * (3.0 * t - 4.0 * theta).sin()
                + n0 * s2t * s2t2
                - n0 * s2t * s2th
                - 6.0 * n0 * t * s2t1;
            MaybePole::Finite(q0v * (1.0 + l / 4.0 * first - l / (8.0 * c2) * second))
        }
    };
    Ok(PhaseParams {
        u,
        s,
        q,
        u0: 0.5,
        s0: s_baseline(n0),
        q0,
    })
}

/// Vacuum-input phase parameters; `S` vanishes identically.
pub fn pb_phase_params_vacuum(theta: f64, lambda: f64, t: f64) -> Result<PhaseParams> {
    let l = lambda;
    let s1 = t.sin();
    let u = 0.5 * (1.0 + 1.5 * l * s1 * (t - theta).sin());
    let q0 = q_baseline(theta, t);
    let q = match q0 {
        MaybePole::Pole => MaybePole::Pole,
        MaybePole::Finite(q0v) => {
            let c2 = (t - theta).cos().powi(2);
            let st2 = (t - 2.0 * theta).sin();
            let inner = -t * (2.0 * (t - theta)).sin() + s1 * st2 - s1 * s1;
            MaybePole::Finite(q0v * (1.0 + 1.5 * l * s1 * (s1 + 2.0 * st2) - 0.75 * l / c2 * inner))
        }
    };
    Ok(PhaseParams {
        u,
        s: 0.0,
        q,
        u0: 0.5,
        s0: 0.0,
        q0,
    })
}

/// The same parameters assembled from operators: `E = (N̄ + ½)^{−1/2} a(t)`,
/// `C = (E + E†)/2`, `S = −(i/2)(E − E†)`, moments by direct expectation.
pub fn pb_phase_params_from_scratch(
    n0: f64,
    theta: f64,
    lambda: f64,
    t: f64,
    dim: usize,
) -> Result<PhaseParams> {
    let psi = coherent_state(n0.max(0.0).sqrt(), theta, dim, 1e-12)?;
    let (n_t, n2_t) = number_evolved(lambda, t, dim)?;
    let nbar = expectation(&n_t, &psi)?.re;
    let dn2 = expectation(&n2_t, &psi)?.re - nbar * nbar;
    let a_t = assemble_quartic_a(&quartic_d_coeffs(lambda, t), dim)?;
    let e = a_t.scale_re(1.0 / (nbar + 0.5).sqrt());
    let ed = e.dagger();
    let c_op = (&e + &ed).scale_re(0.5);
    let s_op = (&e - &ed).scale(C64::new(0.0, -0.5));
    let c_mean = expectation(&c_op, &psi)?.re;
    let s_mean = expectation(&s_op, &psi)?.re;
    let dc2 = variance(&c_op, &psi)?;
    let ds2 = variance(&s_op, &psi)?;
    let u = dn2 * (ds2 + dc2) / (s_mean * s_mean + c_mean * c_mean);
    let s = dn2 * ds2;
    let q = if c_mean.abs() < POLE_TOL {
        MaybePole::Pole
    } else {
        MaybePole::Finite(s / (c_mean * c_mean))
    };
    Ok(PhaseParams {
        u,
        s,
        q,
        u0: 0.5,
        s0: s_baseline(n0),
        q0: q_baseline(theta, t),
    })
}

/// Second-order λ-series `c₀ + c₁λ + c₂λ²` with complex coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSeries(pub [C64; 3]);

impl LambdaSeries {
    pub fn eval(&self, lambda: f64) -> C64 {
        self.0[0] + self.0[1] * lambda + self.0[2] * lambda * lambda
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|c| c.conj()))
    }

    /// Product truncated after `λ²`.
    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = (self.0, o.0);
        Self([
            a[0] * b[0],
            a[0] * b[1] + a[1] * b[0],
            a[0] * b[2] + a[1] * b[1] + a[2] * b[0],
        ])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.map(|c| c * s))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

/// Coefficients of `X(t) = Σ E_k M_k + h.c.` with
/// `M = (a, a³, a†²a, a⁵, a†a⁴, a†²a³)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureCoeffs {
    pub series: [LambdaSeries; 6],
    pub lambda: f64,
}

impl QuadratureCoeffs {
    /// `E_k` at the stored λ, one-based.
    pub fn get(&self, k: usize) -> C64 {
        self.series[k - 1].eval(self.lambda)
    }
}

/// `(p, q)` of the monomial multiplying `E_k`.
pub const QUADRATURE_MONOMIALS: [(u32, u32); 6] = [(0, 1), (0, 3), (2, 1), (0, 5), (1, 4), (2, 3)];

pub fn quadrature_coeffs_quartic(lambda: f64, t: f64) -> QuadratureCoeffs {
    let z = |re: f64, im: f64| C64::new(re, im);
    let (c1, s1) = (t.cos(), t.sin());
    let (c3, s3) = ((3.0 * t).cos(), (3.0 * t).sin());
    let (c5, s5) = ((5.0 * t).cos(), (5.0 * t).sin());
    let t2 = t * t;
    let r = FRAC_1_SQRT_2;
    let zero = C64::new(0.0, 0.0);

    let e1 = LambdaSeries([
        z(c1, -s1) * r,
        z(t * s1, t * c1 - s1) * (-0.75 * r),
        z(
            468.0 * t * s1 - 63.0 * c1 + 63.0 * c3 - 216.0 * t2 * c1,
            1188.0 * t * c1 - 1053.0 * s1 - 45.0 * s3 + 216.0 * t2 * s1,
        ) * (r / 512.0),
    ]);
    let e2 = LambdaSeries([
        zero,
        z(c1 - c3, s3 - 3.0 * s1) * (-r / 16.0),
        z(
            156.0 * c1 - 192.0 * t * s1 - 156.0 * c3 - 144.0 * t * s3,
            156.0 * s3 - 324.0 * s1 - 156.0 * t * c3,
        ) * (r / 512.0),
    ]);
    let e3 = LambdaSeries([
        zero,
        z(t * s1, -(t * c1 - s1)) * (-0.75 * r),
        z(
            936.0 * t * s1 - 126.0 * c1 + 126.0 * c3 - 432.0 * t2 * c1,
            2376.0 * t * c1 - 2106.0 * s1 - 90.0 * s3 + 432.0 * t2 * s1,
        ) * (r / 512.0),
    ]);
    let e4 = LambdaSeries([
        zero,
        zero,
        z(
            5.0 * c1 - 12.0 * t * s1 - 6.0 * c3 + c5,
            6.0 * s3 - s1 - 12.0 * t * c1 - s5,
        ) * (r / 256.0),
    ]);
    let e5 = LambdaSeries([
        zero,
        zero,
        z(
            39.0 * c1 - 48.0 * t * s1 - 39.0 * c3 - 36.0 * t * s3,
            39.0 * s3 - 81.0 * s1 - 36.0 * t * c3,
        ) * (r / 256.0),
    ]);
    let e6 = LambdaSeries([
        zero,
        zero,
        z(
            156.0 * t * s1 - 21.0 * c1 + 21.0 * c3 - 72.0 * t2 * c1,
            396.0 * t * c1 - 351.0 * s1 - 15.0 * s3 + 72.0 * t2 * s1,
        ) * (r / 256.0),
    ]);
    QuadratureCoeffs {
        series: [e1, e2, e3, e4, e5, e6],
        lambda,
    }
}

/// Second-order `X(t)` as a matrix.
pub fn x_quartic_second_order(lambda: f64, t: f64, dim: usize) -> FockMatrix {
    let e = quadrature_coeffs_quartic(lambda, t);
    let mut half = FockMatrix::zeros(dim);
    for (k, &(p, q)) in QUADRATURE_MONOMIALS.iter().enumerate() {
        half = &half + &monomial(dim, p, q).scale(e.get(k + 1));
    }
    &half + &half.dagger()
}

/// Second-order `(ΔX)²` for a coherent input, with every product of
/// coefficients truncated after `λ²`.
pub fn variance_x_quartic(alpha_mag: f64, theta: f64, lambda: f64, t: f64) -> f64 {
    let s = quadrature_coeffs_quartic(lambda, t).series;
    let (e1, e2, e3, e4, e5, e6) = (s[0], s[1], s[2], s[3], s[4], s[5]);
    let al = C64::from_polar(alpha_mag, theta);
    let alc = al.conj();
    let n = alpha_mag * alpha_mag;
    let re = |x: f64| C64::new(x, 0.0);

    let group1 = e1
        .mul(&e1.conj())
        .add(&e2.mul(&e2.conj()).scale(re(9.0 * n * n + 18.0 * n + 6.0)))
        .add(&e3.mul(&e3.conj()).scale(re(5.0 * n * n + 2.0 * n)));

    let terms = [
        e3.mul(&e3).scale(re(2.0 * n) * alc * alc),
        e1.mul(&e3).scale(re(2.0 * n)),
        e1.mul(&e3.conj()).scale(al * al),
        e1.mul(&e2.conj()).scale(alc * alc * 3.0),
        e2.mul(&e3).scale((al * al * n + al * al) * 6.0),
        e2.mul(&e3.conj()).scale(al.powi(4) * 3.0),
        e1.mul(&e5).scale(al.powi(4)),
        e1.mul(&e6).scale(al * al * (2.0 * n)),
        e1.mul(&e6.conj()).scale(re(3.0 * n * n)),
        e1.mul(&e5.conj()).scale(alc * alc * (4.0 * n)),
        e1.mul(&e4.conj()).scale(alc.powi(4) * 5.0),
    ];
    let group2 = terms
        .iter()
        .fold(LambdaSeries([C64::new(0.0, 0.0); 3]), |acc, x| acc.add(x));
    group1.eval(lambda).re + 2.0 * group2.eval(lambda).re
}

/// Vacuum `(ΔX)²`, second order.
pub fn variance_x_vacuum(lambda: f64, t: f64) -> f64 {
    let l = lambda;
    0.5 - 0.75 * l * t.sin().powi(2)
        + 3.0 * l * l / 512.0
            * (201.0 - 24.0 * t * t - 208.0 * (2.0 * t).cos() + 7.0 * (4.0 * t).cos()
                - 168.0 * t * (2.0 * t).sin())
}

/// Vacuum `(ΔX)²` with the secular terms resummed.
pub fn variance_x_vacuum_tucked(lambda: f64, t: f64) -> f64 {
    let l = lambda;
    let c2 = (2.0 * t).cos();
    0.5 * c2 - 0.75 * l * t.sin().powi(2)
        + 3.0 * l * l / 512.0 * (201.0 - 208.0 * c2 + 7.0 * (4.0 * t).cos())
        + 0.5 * ((0.75 * l * t).cos() - c2 * (1.0 - 63.0 * l * l / 64.0))
}

/// Vacuum `(ΔX)²` at `t = nπ`: `½ − (9λ²/64)n²π²`.
pub fn variance_x_vacuum_n_pi(lambda: f64, n: u32) -> f64 {
    let np = n as f64 * std::f64::consts::PI;
    0.5 - 9.0 * lambda * lambda / 64.0 * np * np
}

/// Vacuum `(ΔX)²` at `t = π/2`.
pub fn variance_x_vacuum_half_pi(lambda: f64) -> f64 {
    let pi2 = std::f64::consts::PI.powi(2);
    0.5 - 0.75 * lambda + 3.0 * lambda * lambda / 256.0 * (208.0 - 3.0 * pi2)
}

/// In-phase (`θ = 0`) `(ΔX)²`, second order.
pub fn variance_x_in_phase(n0: f64, lambda: f64, t: f64) -> f64 {
    let l = lambda;
    let (c2, c4, s2, s4) = (
        (2.0 * t).cos(),
        (4.0 * t).cos(),
        (2.0 * t).sin(),
        (4.0 * t).sin(),
    );
    let t2 = t * t;
    variance_x_vacuum(l, t)
        + 0.75
            * n0
            * (-l * (1.0 - c2 + t * s2)
                + 3.0 * l * l / 64.0
                    * (11.0 + 24.0 * t2 - 32.0 * c2 + 21.0 * c4 + 71.0 * t * s2 + t * s4
                        - 64.0 * t2 * c2))
        + n0 * n0 * l * l / 128.0
            * (237.0 + 72.0 * t2 - 256.0 * c2 + 19.0 * c4
                - 36.0 * t * s2
                - 36.0 * t * s4
                - 216.0 * t2 * c2)
}

/// In-phase `(ΔX)²` at `t = π/2`.
pub fn variance_x_in_phase_half_pi(n0: f64, lambda: f64) -> f64 {
    let l = lambda;
    let pi2 = std::f64::consts::PI.powi(2);
    variance_x_vacuum_half_pi(l)
        + 0.75 * n0 * (-2.0 * l + 3.0 * l * l / 64.0 * (64.0 + 22.0 * pi2))
        + n0 * n0 * l * l / 16.0 * (64.0 + 9.0 * pi2)
}

/// First-order `(ΔX)²` for general even `m`.
///
/// Each term `β a†^u a^v` of `a(t)` contributes its symmetrized coherent-state
/// covariance with the free field, `½ u ᾱ^{u−1}α^v` against `a` and
/// `½ v ᾱ^u α^{v−1}` against `a†`.
pub fn variance_x_general(m: u32, alpha_mag: f64, theta: f64, lambda: f64, t: f64) -> Result<f64> {
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::InvalidSpec(format!(
            "m must be even and >= 4, got {m}"
        )));
    }
    let al = C64::from_polar(alpha_mag, theta);
    let alc = al.conj();
    let pw = |z: C64, k: u32| {
        if k == 0 {
            C64::new(1.0, 0.0)
        } else {
            z.powu(k)
        }
    };
    let mut acc = C64::new(0.0, 0.0);
    for term in first_order_terms(m) {
        let beta = -g_w(term.w, t) * term.weight;
        let (u, v) = (term.dag, term.ann);
        let mut cov = C64::new(0.0, 0.0);
        if u > 0 {
            cov += cis(-t) * (u as f64) * pw(alc, u - 1) * pw(al, v);
        }
        if v > 0 {
            cov += cis(t) * (v as f64) * pw(alc, u) * pw(al, v - 1);
        }
        acc += cis(-t) * beta * cov;
    }
    Ok(0.5 + lambda_prime(m, lambda) * acc.re)
}

/// The general-`m` squeezing formula in its reference form. It does not reduce
/// to the quartic in-phase result; kept for comparison only.
pub fn variance_x_general_reference(
    m: u32,
    alpha_mag: f64,
    theta: f64,
    lambda: f64,
    t: f64,
) -> Result<f64> {
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::InvalidSpec(format!(
            "m must be even and >= 4, got {m}"
        )));
    }
    let pref = lambda * t / (2f64.powi(m as i32 / 2) * m as f64);
    let mut first = 0.0;
    let mut second = 0.0;
    for r in 0..=m / 2 {
        let q = m - 2 * r;
        let c = t_coeff_f64(2 * r) * binomial(m, 2 * r);
        let k = (q / 2) as f64;
        let coef = c * binomial(q, q / 2) * k * (k - 1.0);
        if coef != 0.0 {
            first += coef * alpha_mag.powi(q as i32 - 2) * (2.0 * (theta - t)).sin();
        }
        for p in 0..=q {
            if 2 * p == q || p == 0 {
                continue;
            }
            let w = (2 * p) as f64 - q as f64;
            let d = q as f64 - 2.0 * p as f64;
            let inner = (p as f64 - 1.0) * ((d + 2.0) / 2.0 * (2.0 * theta - t) - t).sin()
                + d * (d / 2.0 * (2.0 * theta - t)).sin();
            second += c * binomial(q, p) * p as f64 / w
                * alpha_mag.powi(q as i32 - 2)
                * (d / 2.0 * t).sin()
                * inner;
        }
    }
    Ok(0.5 * (1.0 + 2.0 * pref * first - 4.0 * pref * second))
}

/// `(ΔX)²` from the exact propagator; used as an oracle.
pub fn variance_x_exact(
    m: u32,
    alpha_mag: f64,
    theta: f64,
    lambda: f64,
    t: f64,
    dim: usize,
) -> Result<f64> {
    use crate::fock::{hamiltonian, quadrature_x, OscillatorSpec, Propagator};
    let spec = OscillatorSpec::new(m, lambda, dim)?;
    let psi = coherent_state(alpha_mag, theta, dim, 1e-13)?;
    let u = Propagator::new(&hamiltonian(&spec)?)?.unitary(t);
    variance(&quadrature_x(dim)?, &psi.evolve(&u)?)
}
