//! Classical oscillator `ẍ + x + λx^{m−1} = 0`: perturbative trajectories,
//! frequency renormalization by tucking in, and an RK4 reference integrator.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Trig {
    Cos,
    Sin,
}

impl Trig {
    fn eval(self, x: f64) -> f64 {
        match self {
            Trig::Cos => x.cos(),
            Trig::Sin => x.sin(),
        }
    }
}

/// `(λ power, t power, harmonic, trig)`.
type TermKey = (u32, u32, u32, Trig);

/// Finite sum `Σ c λ^k t^j trig(n t)` with numeric coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrigSeries {
    terms: BTreeMap<TermKey, f64>,
}

impl TrigSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, coeff: f64, lambda_pow: u32, t_pow: u32, harmonic: u32, trig: Trig) {
        if coeff == 0.0 || (harmonic == 0 && trig == Trig::Sin) {
            return;
        }
        let e = self
            .terms
            .entry((lambda_pow, t_pow, harmonic, trig))
            .or_insert(0.0);
        *e += coeff;
        if *e == 0.0 {
            self.terms.remove(&(lambda_pow, t_pow, harmonic, trig));
        }
    }

    pub fn coeff(&self, lambda_pow: u32, t_pow: u32, harmonic: u32, trig: Trig) -> f64 {
        self.terms
            .get(&(lambda_pow, t_pow, harmonic, trig))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (TermKey, f64)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, *v))
    }

    pub fn max_lambda_pow(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    /// Drops every term above `λ^order`.
    pub fn truncate(&self, order: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.0 <= order)
                .map(|(k, v)| (*k, *v))
                .collect(),
        }
    }

    pub fn is_secular_free(&self) -> bool {
        self.terms.keys().all(|k| k.1 == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in other.terms() {
            out.add_term(v, k.0, k.1, k.2, k.3);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::new();
        for (k, v) in self.terms() {
            out.add_term(v * s, k.0, k.1, k.2, k.3);
        }
        out
    }

    pub fn eval(&self, lambda: f64, t: f64) -> f64 {
        self.terms()
            .map(|((k, j, n, trig), c)| {
                c * lambda.powi(k as i32) * t.powi(j as i32) * trig.eval(n as f64 * t)
            })
            .sum()
    }

    /// Largest `|c|` among terms of the given λ power.
    pub fn max_abs_at(&self, lambda_pow: u32) -> f64 {
        self.terms()
            .filter(|(k, _)| k.0 == lambda_pow)
            .map(|(_, c)| c.abs())
            .fold(0.0, f64::max)
    }
}

/// Secular-free series evaluated at the shifted frequency
/// `ω′ = 1 + Σ_k w_k λ^k`, i.e. `Σ c λ^k trig(n ω′ t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Renormalized {
    /// `w_1, w_2, …`; the leading 1 is implicit.
    pub shifts: Vec<f64>,
    pub series: TrigSeries,
    /// Largest secular coefficient the frequency shift could not absorb.
    pub residual: f64,
}

impl Renormalized {
    pub fn omega_prime(&self, lambda: f64) -> f64 {
        1.0 + self
            .shifts
            .iter()
            .enumerate()
            .map(|(k, w)| w * lambda.powi(k as i32 + 1))
            .sum::<f64>()
    }

    pub fn eval(&self, lambda: f64, t: f64) -> f64 {
        self.series.eval(lambda, self.omega_prime(lambda) * t)
    }

    /// Taylor re-expansion in λ up to `λ^order`, secular terms reappearing.
    pub fn expand(&self, order: u32) -> TrigSeries {
        let mut out = TrigSeries::new();
        for ((k, _, n, trig), c) in self.series.terms() {
            if k > order {
                continue;
            }
            let room = order - k;
            // ε = n t δ with δ = Σ w_j λ^j; powers of ε kept as (λ power → coeff) with t^p
            let mut delta = vec![0.0; room as usize + 1];
            for (j, w) in self.shifts.iter().enumerate() {
                if j < room as usize {
                    delta[j + 1] = n as f64 * w;
                }
            }
            let mut eps_pow = vec![0.0; room as usize + 1];
            eps_pow[0] = 1.0;
            let mut factorial = 1.0;
            for p in 0..=room {
                if p > 0 {
                    eps_pow = poly_mul(&eps_pow, &delta, room as usize);
                    factorial *= p as f64;
                }
                // cos(nt + ε) = Σ_p ε^p/p! cos(nt + pπ/2), same for sin
                let (target, sign) = rotate(trig, p);
                for (l, e) in eps_pow.iter().enumerate() {
                    if *e != 0.0 {
                        out.add_term(sign * c * e / factorial, k + l as u32, p, n, target);
                    }
                }
            }
        }
        out
    }
}

/// `trig(x + pπ/2)` as `sign · target(x)`.
fn rotate(trig: Trig, p: u32) -> (Trig, f64) {
    match (trig, p % 4) {
        (Trig::Cos, 0) => (Trig::Cos, 1.0),
        (Trig::Cos, 1) => (Trig::Sin, -1.0),
        (Trig::Cos, 2) => (Trig::Cos, -1.0),
        (Trig::Cos, _) => (Trig::Sin, 1.0),
        (Trig::Sin, 0) => (Trig::Sin, 1.0),
        (Trig::Sin, 1) => (Trig::Cos, 1.0),
        (Trig::Sin, 2) => (Trig::Sin, -1.0),
        (Trig::Sin, _) => (Trig::Cos, -1.0),
    }
}

fn poly_mul(a: &[f64], b: &[f64], max: usize) -> Vec<f64> {
    let mut out = vec![0.0; max + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j <= max {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Absorbs secular terms into a frequency shift, order by order up to `λ^order`.
///
/// The order-zero part must be secular-free. At each order the `t¹` terms on
/// the fundamental fix `w_k` by least squares against the derivative of the
/// order-zero part; what remains non-secular becomes the new coefficients.
/// Secular terms left over after the shift land in `residual`.
pub fn tuck_in(series: &TrigSeries, order: u32) -> Result<Renormalized> {
    let zeroth = series.truncate(0);
    if !zeroth.is_secular_free() {
        return Err(Error::Contract(
            "order-zero part must be free of secular terms".into(),
        ));
    }
    let a_cos = zeroth.coeff(0, 0, 1, Trig::Cos);
    let a_sin = zeroth.coeff(0, 0, 1, Trig::Sin);
    let norm = a_cos * a_cos + a_sin * a_sin;
    let mut out = Renormalized {
        shifts: Vec::new(),
        series: zeroth,
        residual: 0.0,
    };
    for k in 1..=order {
        let diff = series.add(&out.expand(k).scale(-1.0));
        // d/dω of a_c cos t + a_s sin t at t¹: −a_c t sin t + a_s t cos t
        let s = diff.coeff(k, 1, 1, Trig::Sin);
        let c = diff.coeff(k, 1, 1, Trig::Cos);
        let w = if norm > 0.0 {
            (-a_cos * s + a_sin * c) / norm
        } else {
            0.0
        };
        out.shifts.push(w);
        let diff = series.add(&out.expand(k).scale(-1.0));
        for ((l, j, n, trig), v) in diff.terms() {
            if l != k {
                continue;
            }
            if j == 0 {
                out.series.add_term(v, l, 0, n, trig);
            } else {
                out.residual = out.residual.max(v.abs());
            }
        }
    }
    Ok(out)
}

fn push(s: &mut TrigSeries, scale: f64, lambda_pow: u32, terms: &[(f64, u32, u32, Trig)]) {
    for &(c, j, n, trig) in terms {
        s.add_term(scale * c, lambda_pow, j, n, trig);
    }
}

use Trig::{Cos, Sin};

/// Quartic series through `λ^order`: `x₀ + x₁ + x₂` with the K-coefficients.
pub fn quartic_series(x0: f64, v0: f64, order: u32) -> TrigSeries {
    let mut s = TrigSeries::new();
    push(&mut s, x0, 0, &[(1.0, 0, 1, Cos)]);
    push(&mut s, v0, 0, &[(1.0, 0, 1, Sin)]);
    if order >= 1 {
        let d = 1.0 / 32.0;
        push(
            &mut s,
            -d * x0.powi(3),
            1,
            &[(1.0, 0, 1, Cos), (-1.0, 0, 3, Cos), (12.0, 1, 1, Sin)],
        );
        push(
            &mut s,
            3.0 * d * x0 * x0 * v0,
            1,
            &[(1.0, 0, 3, Sin), (-7.0, 0, 1, Sin), (4.0, 1, 1, Cos)],
        );
        push(
            &mut s,
            -3.0 * d * x0 * v0 * v0,
            1,
            &[(1.0, 0, 3, Cos), (-1.0, 0, 1, Cos), (4.0, 1, 1, Sin)],
        );
        push(
            &mut s,
            -d * v0.powi(3),
            1,
            &[(1.0, 0, 3, Sin), (9.0, 0, 1, Sin), (-12.0, 1, 1, Cos)],
        );
    }
    if order >= 2 {
        let d = 1.0 / 1024.0;
        let k1 = [
            (1.0, 0, 5, Cos),
            (-36.0, 1, 3, Sin),
            (-24.0, 0, 3, Cos),
            (-72.0, 2, 1, Cos),
            (96.0, 1, 1, Sin),
            (23.0, 0, 1, Cos),
        ];
        let k2 = [
            (5.0, 0, 5, Sin),
            (108.0, 1, 3, Cos),
            (-132.0, 0, 3, Sin),
            (-72.0, 2, 1, Sin),
            (599.0, 0, 1, Sin),
            (-336.0, 1, 1, Cos),
        ];
        let k3 = [
            (-5.0, 0, 5, Cos),
            (90.0, 0, 3, Cos),
            (36.0, 1, 3, Sin),
            (-72.0, 2, 1, Cos),
            (-85.0, 0, 1, Cos),
            (264.0, 1, 1, Sin),
        ];
        let k4 = [
            (-5.0, 0, 5, Sin),
            (36.0, 1, 3, Cos),
            (6.0, 0, 3, Sin),
            (-72.0, 2, 1, Sin),
            (427.0, 0, 1, Sin),
            (-456.0, 1, 1, Cos),
        ];
        let k5 = [
            (5.0, 0, 5, Cos),
            (108.0, 1, 3, Sin),
            (108.0, 0, 3, Cos),
            (-72.0, 2, 1, Cos),
            (-113.0, 0, 1, Cos),
            (240.0, 1, 1, Sin),
        ];
        let k6 = [
            (1.0, 0, 5, Sin),
            (-36.0, 1, 3, Cos),
            (48.0, 0, 3, Sin),
            (-72.0, 2, 1, Sin),
            (271.0, 0, 1, Sin),
            (-384.0, 1, 1, Cos),
        ];
        push(&mut s, d * x0.powi(5), 2, &k1);
        push(&mut s, d * x0.powi(4) * v0, 2, &k2);
        push(&mut s, 2.0 * d * x0.powi(3) * v0 * v0, 2, &k3);
        push(&mut s, 2.0 * d * x0 * x0 * v0.powi(3), 2, &k4);
        push(&mut s, d * x0 * v0.powi(4), 2, &k5);
        push(&mut s, d * v0.powi(5), 2, &k6);
    }
    s
}

/// Sextic series through first order: `x₀ + Σ_i L_i x(0)^{5−i} ẋ(0)^i`.
pub fn sextic_series(x0: f64, v0: f64) -> TrigSeries {
    let mut s = TrigSeries::new();
    push(&mut s, x0, 0, &[(1.0, 0, 1, Cos)]);
    push(&mut s, v0, 0, &[(1.0, 0, 1, Sin)]);
    let d = 1.0 / 384.0;
    type Row = (f64, [(f64, u32, u32, Trig); 4]);
    let l: [Row; 6] = [
        (
            d,
            [
                (1.0, 0, 5, Cos),
                (15.0, 0, 3, Cos),
                (-16.0, 0, 1, Cos),
                (-120.0, 1, 1, Sin),
            ],
        ),
        (
            d,
            [
                (5.0, 0, 5, Sin),
                (45.0, 0, 3, Sin),
                (-280.0, 0, 1, Sin),
                (120.0, 1, 1, Cos),
            ],
        ),
        (
            2.0 * d,
            [
                (-5.0, 0, 5, Cos),
                (-15.0, 0, 3, Cos),
                (20.0, 0, 1, Cos),
                (-120.0, 1, 1, Sin),
            ],
        ),
        (
            2.0 * d,
            [
                (-5.0, 0, 5, Sin),
                (15.0, 0, 3, Sin),
                (-140.0, 0, 1, Sin),
                (120.0, 1, 1, Cos),
            ],
        ),
        (
            d,
            [
                (5.0, 0, 5, Cos),
                (-45.0, 0, 3, Cos),
                (40.0, 0, 1, Cos),
                (-120.0, 1, 1, Sin),
            ],
        ),
        (
            d,
            [
                (1.0, 0, 5, Sin),
                (-15.0, 0, 3, Sin),
                (-80.0, 0, 1, Sin),
                (120.0, 1, 1, Cos),
            ],
        ),
    ];
    for (i, (scale, terms)) in l.iter().enumerate() {
        let mono = x0.powi(5 - i as i32) * v0.powi(i as i32);
        push(&mut s, scale * mono, 1, terms);
    }
    s
}

/// Octic series through first order.
///
/// The `ẋ(0) x⁶(0)` bracket prints `378 sin t` next to `−2373 sin t`; the
/// equation of motion requires `378 sin 3t`, which is used here.
pub fn octic_series(x0: f64, v0: f64) -> TrigSeries {
    let mut s = TrigSeries::new();
    push(&mut s, x0, 0, &[(1.0, 0, 1, Cos)]);
    push(&mut s, v0, 0, &[(1.0, 0, 1, Sin)]);
    let rows: [[(f64, u32, u32, Trig); 5]; 8] = [
        [
            (1.0, 0, 7, Cos),
            (14.0, 0, 5, Cos),
            (126.0, 0, 3, Cos),
            (-141.0, 0, 1, Cos),
            (-840.0, 1, 1, Sin),
        ],
        [
            (7.0, 0, 7, Sin),
            (70.0, 0, 5, Sin),
            (378.0, 0, 3, Sin),
            (-2373.0, 0, 1, Sin),
            (840.0, 1, 1, Cos),
        ],
        [
            (-21.0, 0, 7, Cos),
            (-126.0, 0, 5, Cos),
            (-126.0, 0, 3, Cos),
            (273.0, 0, 1, Cos),
            (-2520.0, 1, 1, Sin),
        ],
        [
            (-35.0, 0, 7, Sin),
            (-70.0, 0, 5, Sin),
            (630.0, 0, 3, Sin),
            (-3815.0, 0, 1, Sin),
            (2520.0, 1, 1, Cos),
        ],
        [
            (35.0, 0, 7, Cos),
            (-70.0, 0, 5, Cos),
            (-630.0, 0, 3, Cos),
            (665.0, 0, 1, Cos),
            (-2520.0, 1, 1, Sin),
        ],
        [
            (21.0, 0, 7, Sin),
            (-126.0, 0, 5, Sin),
            (126.0, 0, 3, Sin),
            (-2415.0, 0, 1, Sin),
            (2520.0, 1, 1, Cos),
        ],
        [
            (-7.0, 0, 7, Cos),
            (70.0, 0, 5, Cos),
            (-378.0, 0, 3, Cos),
            (315.0, 0, 1, Cos),
            (-840.0, 1, 1, Sin),
        ],
        [
            (-1.0, 0, 7, Sin),
            (14.0, 0, 5, Sin),
            (-126.0, 0, 3, Sin),
            (-525.0, 0, 1, Sin),
            (840.0, 1, 1, Cos),
        ],
    ];
    for (i, terms) in rows.iter().enumerate() {
        let mono = x0.powi(7 - i as i32) * v0.powi(i as i32);
        push(&mut s, mono / 3072.0, 1, terms);
    }
    s
}

/// Shifted frequency: `1 + (3/8)λA² − (21/256)λ²A⁴` for m = 4,
/// `1 + (5/16)λa⁴` for m = 6, `1 + (35/128)λb⁶` for m = 8.
pub fn omega_prime(m: u32, amplitude: f64, lambda: f64) -> Result<f64> {
    let a2 = amplitude * amplitude;
    match m {
        4 => Ok(1.0 + 3.0 / 8.0 * lambda * a2 - 21.0 / 256.0 * lambda * lambda * a2 * a2),
        6 => Ok(1.0 + 5.0 / 16.0 * lambda * a2 * a2),
        8 => Ok(1.0 + 35.0 / 128.0 * lambda * a2 * a2 * a2),
        _ => Err(Error::Unsupported(format!(
            "classical frequency shift only for m in {{4, 6, 8}}, got {m}"
        ))),
    }
}

/// Quartic trajectory through `order ∈ {0, 1, 2}`.
///
/// Renormalized at order 2 uses the closed form for `ẋ(0) = 0`,
/// `A cos ω′t − (λA³/32)(cos ω′t − cos 3ω′t) + (λ²A⁵/1024)(cos 5ω′t − 24 cos 3ω′t + 23 cos ω′t)`;
/// lower orders go through [`tuck_in`].
pub fn quartic_classical(
    x0: f64,
    v0: f64,
    lambda: f64,
    t: f64,
    order: u32,
    renormalized: bool,
) -> Result<f64> {
    if order > 2 {
        return Err(Error::Unsupported(format!(
            "quartic series known through order 2, asked {order}"
        )));
    }
    if !renormalized {
        return Ok(quartic_series(x0, v0, order).eval(lambda, t));
    }
    if order == 2 {
        if v0 != 0.0 {
            return Err(Error::Unsupported(
                "renormalized second-order quartic needs v0 = 0".into(),
            ));
        }
        let a = x0;
        let w = omega_prime(4, a, lambda)? * t;
        return Ok(
            a * w.cos() - lambda * a.powi(3) / 32.0 * (w.cos() - (3.0 * w).cos())
                + lambda * lambda * a.powi(5) / 1024.0
                    * ((5.0 * w).cos() - 24.0 * (3.0 * w).cos() + 23.0 * w.cos()),
        );
    }
    Ok(tuck_in(&quartic_series(x0, v0, order), order)?.eval(lambda, t))
}

/// Sextic first-order trajectory. Renormalized with `ẋ(0) = 0` is
/// `a cos[(1 + 5λa⁴/16)t] + λa⁵(−cos t/24 + 5 cos 3t/128 + cos 5t/384)`.
pub fn sextic_classical(x0: f64, v0: f64, lambda: f64, t: f64, renormalized: bool) -> Result<f64> {
    if !renormalized {
        return Ok(sextic_series(x0, v0).eval(lambda, t));
    }
    if v0 == 0.0 {
        let a = x0;
        let w = omega_prime(6, a, lambda)?;
        return Ok(a * (w * t).cos()
            + lambda
                * a.powi(5)
                * (-t.cos() / 24.0 + 5.0 * (3.0 * t).cos() / 128.0 + (5.0 * t).cos() / 384.0));
    }
    Ok(tuck_in(&sextic_series(x0, v0), 1)?.eval(lambda, t))
}

/// Octic first-order trajectory. Renormalized with `ẋ(0) = 0` is
/// `b cos[(1 + 35λb⁶/128)t] + (λb⁷/3072)(−141 cos t + 126 cos 3t + 14 cos 5t + cos 7t)`.
pub fn octic_classical(x0: f64, v0: f64, lambda: f64, t: f64, renormalized: bool) -> Result<f64> {
    if !renormalized {
        return Ok(octic_series(x0, v0).eval(lambda, t));
    }
    if v0 == 0.0 {
        let b = x0;
        let w = omega_prime(8, b, lambda)?;
        return Ok(b * (w * t).cos()
            + lambda * b.powi(7) / 3072.0
                * (-141.0 * t.cos()
                    + 126.0 * (3.0 * t).cos()
                    + 14.0 * (5.0 * t).cos()
                    + (7.0 * t).cos()));
    }
    Ok(tuck_in(&octic_series(x0, v0), 1)?.eval(lambda, t))
}

/// Default RK4 step.
pub const RK4_DT: f64 = 1e-3;
/// Allowed relative energy drift before a run is rejected.
pub const RK4_DRIFT: f64 = 1e-8;

/// Sampled solution `(t, x, ẋ)` on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub m: u32,
    pub lambda: f64,
    pub x0: f64,
    pub v0: f64,
    pub dt: f64,
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    /// `max |H(t) − H(0)| / H(0)` over the run.
    pub max_drift: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Every `stride`-th sample as `(t, x)`, always including the last.
    pub fn samples(&self, stride: usize) -> Vec<(f64, f64)> {
        let stride = stride.max(1);
        let mut out: Vec<(f64, f64)> = (0..self.len())
            .step_by(stride)
            .map(|i| (self.t[i], self.x[i]))
            .collect();
        if !(self.len() - 1).is_multiple_of(stride) {
            out.push((self.t[self.len() - 1], self.x[self.len() - 1]));
        }
        out
    }
}

fn energy(m: u32, lambda: f64, x: f64, v: f64) -> f64 {
    0.5 * v * v + 0.5 * x * x + lambda / m as f64 * x.powi(m as i32)
}

/// Classical RK4 for `ẍ = −x − λx^{m−1}` from `t = 0` to `t_end`. Runs whose
/// relative energy drift exceeds [`RK4_DRIFT`] are rejected.
pub fn rk4_oracle(
    m: u32,
    x0: f64,
    v0: f64,
    lambda: f64,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let traj = rk4_integrate(m, x0, v0, lambda, t_end, dt)?;
    if !traj.max_drift.is_finite() || traj.max_drift > RK4_DRIFT {
        return Err(Error::Numerical(format!(
            "energy drift {:.3e} exceeds {RK4_DRIFT:.0e}; reduce dt (was {dt})",
            traj.max_drift
        )));
    }
    Ok(traj)
}

fn rk4_integrate(m: u32, x0: f64, v0: f64, lambda: f64, t_end: f64, dt: f64) -> Result<Trajectory> {
    if m < 3 {
        return Err(Error::InvalidSpec(format!("m must be >= 3, got {m}")));
    }
    if dt.is_nan() || dt <= 0.0 || t_end.is_nan() || t_end < 0.0 {
        return Err(Error::Domain(format!(
            "need dt > 0 and t_end >= 0, got dt = {dt}, t_end = {t_end}"
        )));
    }
    let steps = (t_end / dt).round() as usize;
    let h = if steps == 0 {
        0.0
    } else {
        t_end / steps as f64
    };
    let acc = |x: f64| -x - lambda * x.powi(m as i32 - 1);
    let e0 = energy(m, lambda, x0, v0);
    let mut traj = Trajectory {
        m,
        lambda,
        x0,
        v0,
        dt: h,
        t: Vec::with_capacity(steps + 1),
        x: Vec::with_capacity(steps + 1),
        v: Vec::with_capacity(steps + 1),
        max_drift: 0.0,
    };
    let (mut x, mut v) = (x0, v0);
    traj.t.push(0.0);
    traj.x.push(x);
    traj.v.push(v);
    for i in 1..=steps {
        let (k1x, k1v) = (v, acc(x));
        let (k2x, k2v) = (v + 0.5 * h * k1v, acc(x + 0.5 * h * k1x));
        let (k3x, k3v) = (v + 0.5 * h * k2v, acc(x + 0.5 * h * k2x));
        let (k4x, k4v) = (v + h * k3v, acc(x + h * k3x));
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if e0 > 0.0 {
            traj.max_drift = traj
                .max_drift
                .max((energy(m, lambda, x, v) - e0).abs() / e0);
        }
        traj.t.push(i as f64 * h);
        traj.x.push(x);
        traj.v.push(v);
    }
    Ok(traj)
}

/// Angular frequency from the zero crossings of `x(t)`, located by linear
/// interpolation (the curvature vanishes at a crossing).
pub fn zero_crossing_frequency(traj: &Trajectory) -> Result<f64> {
    let mut crossings = Vec::new();
    for i in 1..traj.len() {
        let (a, b) = (traj.x[i - 1], traj.x[i]);
        if a != 0.0 && a.signum() != b.signum() {
            crossings.push(traj.t[i - 1] + (traj.t[i] - traj.t[i - 1]) * a / (a - b));
        }
    }
    if crossings.len() < 2 {
        return Err(Error::Numerical("fewer than two zero crossings".into()));
    }
    let span = crossings[crossings.len() - 1] - crossings[0];
    Ok(std::f64::consts::PI * (crossings.len() - 1) as f64 / span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max_err(traj: &Trajectory, f: impl Fn(f64) -> f64, t_max: f64) -> f64 {
        traj.t
            .iter()
            .zip(&traj.x)
            .filter(|(t, _)| **t <= t_max)
            .map(|(t, x)| (f(*t) - x).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn harmonic_limit() {
        for order in 0..=2 {
            for ren in [false, true] {
                let x = quartic_classical(2.0, 0.0, 0.0, 1.3, order, ren).unwrap();
                assert!((x - 2.0 * 1.3f64.cos()).abs() < 1e-15);
            }
        }
        assert!(
            (sextic_classical(0.7, 0.0, 0.0, 2.0, true).unwrap() - 0.7 * 2.0f64.cos()).abs()
                < 1e-15
        );
        assert!(
            (octic_classical(0.7, 0.3, 0.0, 2.0, false).unwrap()
                - (0.7 * 2.0f64.cos() + 0.3 * 2.0f64.sin()))
            .abs()
                < 1e-15
        );
        let traj = rk4_oracle(4, 1.0, 0.0, 0.0, 10.0, RK4_DT).unwrap();
        assert!(max_err(&traj, f64::cos, 10.0) < 1e-9);
    }

    #[test]
    fn omega_prime_quartic_value() {
        let w = omega_prime(4, 2.0, 0.05).unwrap();
        assert!((w - (1.0 + 0.075 - 21.0 / 256.0 * 0.0025 * 16.0)).abs() < 1e-15);
    }

    #[test]
    fn series_satisfy_initial_conditions() {
        let (x0, v0) = (0.8, -0.6);
        for s in [
            quartic_series(x0, v0, 2),
            sextic_series(x0, v0),
            octic_series(x0, v0),
        ] {
            for k in 1..=s.max_lambda_pow() {
                let part = TrigSeries {
                    terms: s.terms().filter(|(key, _)| key.0 == k).collect(),
                };
                let h = 1e-6;
                let x = part.eval(1.0, 0.0);
                let v = (part.eval(1.0, h) - part.eval(1.0, -h)) / (2.0 * h);
                assert!(x.abs() < 1e-12 && v.abs() < 1e-8, "order {k}: {x} {v}");
            }
        }
    }

    /// Residual of `ẍ + x + λx^{m−1}` at order λ^k by finite differences.
    fn ode_residual(s: &TrigSeries, m: u32, k: u32, t: f64) -> f64 {
        let h = 1e-3;
        let part = |k: u32, t: f64| -> f64 {
            s.terms()
                .filter(|(key, _)| key.0 == k)
                .map(|((_, j, n, trig), c)| c * t.powi(j as i32) * trig.eval(n as f64 * t))
                .sum()
        };
        let xk = |t: f64| part(k, t);
        let xdd = (xk(t + h) - 2.0 * xk(t) + xk(t - h)) / (h * h);
        // forcing: λ-coefficient k of −x^{m−1}; only k = 1 (x₀^{m−1}) and k = 2 for m = 4 (3x₀²x₁)
        let forcing = match k {
            1 => part(0, t).powi(m as i32 - 1),
            2 => 3.0 * part(0, t).powi(2) * part(1, t),
            _ => 0.0,
        };
        xdd + xk(t) + forcing
    }

    #[test]
    fn series_solve_equation_of_motion() {
        let (x0, v0) = (0.9, 0.4);
        for t in [0.3, 1.7, 4.2] {
            let q = quartic_series(x0, v0, 2);
            assert!(ode_residual(&q, 4, 1, t).abs() < 1e-5);
            assert!(ode_residual(&q, 4, 2, t).abs() < 1e-5);
            assert!(ode_residual(&sextic_series(x0, v0), 6, 1, t).abs() < 1e-5);
            assert!(ode_residual(&octic_series(x0, v0), 8, 1, t).abs() < 1e-5);
        }
    }

    #[test]
    fn tuck_in_quartic_first_and_second_order() {
        let a = 2.0;
        let r1 = tuck_in(&quartic_series(a, 0.0, 1), 1).unwrap();
        assert!((r1.shifts[0] - 3.0 / 8.0 * a * a).abs() < 1e-12);
        let r2 = tuck_in(&quartic_series(a, 0.0, 2), 2).unwrap();
        assert!((r2.shifts[1] + 21.0 / 256.0 * a.powi(4)).abs() < 1e-12);
        assert!(r2.residual < 1e-12);
        for &t in &[0.5, 3.0, 20.0] {
            let x = r2.eval(0.05, t);
            let y = quartic_classical(a, 0.0, 0.05, t, 2, true).unwrap();
            assert!((x - y).abs() < 1e-12);
        }
        // re-expansion reproduces the input through λ²
        let back = r2.expand(2);
        let diff = back.add(&quartic_series(a, 0.0, 2).scale(-1.0));
        assert!(diff.terms().all(|(_, c)| c.abs() < 1e-12));
    }

    #[test]
    fn tuck_in_identity_on_secular_free() {
        let mut s = TrigSeries::new();
        s.add_term(1.0, 0, 0, 1, Cos);
        s.add_term(0.2, 1, 0, 3, Sin);
        let r = tuck_in(&s, 2).unwrap();
        assert_eq!(r.shifts, vec![0.0, 0.0]);
        assert_eq!(r.series, s);
    }

    #[test]
    fn tuck_in_sextic_octic_shifts() {
        let r = tuck_in(&sextic_series(1.2, 0.0), 1).unwrap();
        assert!((r.shifts[0] - 5.0 / 16.0 * 1.2f64.powi(4)).abs() < 1e-12);
        let r = tuck_in(&octic_series(0.9, 0.0), 1).unwrap();
        assert!((r.shifts[0] - 35.0 / 128.0 * 0.9f64.powi(6)).abs() < 1e-12);
        // with ẋ(0) ≠ 0 the shift depends on the energy amplitude R² = x₀² + ẋ₀²
        let r = tuck_in(&quartic_series(0.6, 0.8, 1), 1).unwrap();
        assert!((r.shifts[0] - 3.0 / 8.0).abs() < 1e-12 && r.residual < 1e-12);
        let r = tuck_in(&octic_series(0.6, 0.8), 1).unwrap();
        assert!((r.shifts[0] - 35.0 / 128.0).abs() < 1e-12 && r.residual < 1e-12);
    }

    #[test]
    fn renormalized_tracks_rk4_unrenormalized_drifts() {
        let (a, lambda) = (2.0, 0.05);
        let traj = rk4_oracle(4, a, 0.0, lambda, 50.0, RK4_DT).unwrap();
        let ren = max_err(
            &traj,
            |t| quartic_classical(a, 0.0, lambda, t, 2, true).unwrap(),
            50.0,
        );
        let raw = max_err(
            &traj,
            |t| quartic_classical(a, 0.0, lambda, t, 2, false).unwrap(),
            50.0,
        );
        assert!(ren < 0.05, "{ren}");
        assert!(raw > 0.5, "{raw}");
    }

    #[test]
    fn rk4_order_and_drift() {
        let run = |dt| rk4_integrate(4, 2.0, 0.0, 0.05, 10.0, dt).unwrap();
        let fine = run(1e-3 / 8.0);
        let e = |dt: f64| {
            let tr = run(dt);
            (tr.x[tr.len() - 1] - fine.x[fine.len() - 1]).abs()
        };
        let ratio = e(0.04) / e(0.02);
        assert!((ratio - 16.0).abs() < 1.5, "{ratio}");
        assert!(fine.max_drift < RK4_DRIFT);
        assert!(matches!(
            rk4_oracle(4, 2.0, 0.0, 0.05, 50.0, 0.2),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn zero_crossing_matches_shifted_frequencies() {
        for (m, a, lambda) in [(4u32, 2.0, 0.05), (6, 1.0, 0.05), (8, 1.0, 0.05)] {
            let traj = rk4_oracle(m, a, 0.0, lambda, 50.0, RK4_DT).unwrap();
            let w = zero_crossing_frequency(&traj).unwrap();
            let w_pred = omega_prime(m, a, lambda).unwrap();
            assert!((w / w_pred - 1.0).abs() < 5e-3, "m={m}: {w} vs {w_pred}");
        }
    }

    #[test]
    fn first_order_residual_scales_as_lambda_squared() {
        // renormalized first order over t ∈ [0, 20]
        for (m, a) in [(6u32, 1.0), (8, 1.0)] {
            let err = |lambda: f64| {
                let traj = rk4_oracle(m, a, 0.0, lambda, 20.0, RK4_DT).unwrap();
                let f = |t| match m {
                    6 => sextic_classical(a, 0.0, lambda, t, true).unwrap(),
                    _ => octic_classical(a, 0.0, lambda, t, true).unwrap(),
                };
                max_err(&traj, f, 20.0)
            };
            let ratio = err(0.02) / err(0.01);
            assert!(ratio > 3.0 && ratio < 5.0, "m={m}: {ratio}");
        }
    }

    #[test]
    fn unsupported_cases() {
        assert!(matches!(
            quartic_classical(1.0, 0.5, 0.1, 1.0, 2, true),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            quartic_classical(1.0, 0.0, 0.1, 1.0, 3, false),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            omega_prime(5, 1.0, 0.1),
            Err(Error::Unsupported(_))
        ));
    }

    proptest! {
        #[test]
        fn expand_inverts_tuck_in(x0 in -1.5f64..1.5, v0 in -1.5f64..1.5) {
            prop_assume!(x0.abs() + v0.abs() > 0.1);
            let s = quartic_series(x0, v0, 2);
            let r = tuck_in(&s, 2).unwrap();
            let diff = r.expand(2).add(&s.scale(-1.0));
            let scale = (x0 * x0 + v0 * v0).powf(2.5).max(1.0);
            prop_assert!(r.residual < 1e-12 * scale);
            prop_assert!(diff.terms().all(|(_, c)| c.abs() < 1e-10 * scale));
            let r2 = (x0 * x0 + v0 * v0) * 3.0 / 8.0;
            prop_assert!((r.shifts[0] - r2).abs() < 1e-12 * scale);
        }
    }
}
