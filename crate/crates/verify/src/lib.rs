//! Oracle-comparison suites behind the `verify` subcommand and the acceptance
//! target. Reports contain no timings so repeated runs are byte-identical.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use aho_core::classical;
use aho_core::evolution::a_first_order;
use aho_core::fock::{hamiltonian, ladder_ops, Propagator};
use aho_core::geometry::{self, InputStatistics};
use aho_core::observables::{self, photon_stats_quartic};
use aho_core::ordering::{brute_force_normal_order, colon_expansion, normal_order_power};
use aho_core::spectra::{self, freq_operator_first, mspt_omega_poly, numerical_spacings};
use aho_core::{FreqPolynomial, OscillatorSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed for the random sample points of the phase suite.
pub const PHASE_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub id: u32,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl SuiteResult {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn new(id: u32, title: &'static str) -> Self {
        Self {
            id,
            title,
            checks: vec![],
        }
    }

    fn check(&mut self, label: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            label: label.into(),
            pass,
            detail: detail.into(),
        });
    }

    /// Records an error from the library as a failed check.
    fn guard<T>(&mut self, label: &str, r: aho_core::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(label, false, format!("error: {e}"));
                None
            }
        }
    }
}

pub type Suite = fn() -> SuiteResult;

/// Suites 1 to 9 in order.
pub const SUITES: [(u32, Suite); 9] = [
    (1, normal_ordering),
    (2, spectra_oracle),
    (3, equivalence_map),
    (4, evolution),
    (5, phase_fluctuations),
    (6, squeezing),
    (7, photon_statistics),
    (8, geometric_phase),
    (9, classical_renormalization),
];

pub fn run_all() -> Vec<SuiteResult> {
    SUITES.iter().map(|(_, s)| s()).collect()
}

/// Plain-text report: one summary line per suite followed by its checks.
pub fn render_report(results: &[SuiteResult]) -> String {
    let mut out = String::new();
    for r in results {
        out.push_str(&format!(
            "[{}] {}. {}\n",
            if r.pass() { "PASS" } else { "FAIL" },
            r.id,
            r.title
        ));
        for c in &r.checks {
            out.push_str(&format!(
                "    {} {}: {}\n",
                if c.pass { "ok  " } else { "FAIL" },
                c.label,
                c.detail
            ));
        }
    }
    let failed = results.iter().filter(|r| !r.pass()).count();
    out.push_str(&format!(
        "{} of {} suites passed\n",
        results.len() - failed,
        results.len()
    ));
    out
}

/// Report text and whether every suite passed.
pub fn run_report() -> (String, bool) {
    let results = run_all();
    let ok = results.iter().all(SuiteResult::pass);
    (render_report(&results), ok)
}

fn e(x: f64) -> String {
    format!("{x:.3e}")
}

fn slope(r1: f64, r2: f64) -> f64 {
    (r1.abs() / r2.abs()).log2()
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// The expansions of `(a† + a)^m` over `:(a† + a)^k:` for m = 1..9.
const REFERENCE_EXPANSIONS: [&[i64]; 9] = [
    &[1],
    &[1, 1],
    &[1, 3],
    &[1, 6, 3],
    &[1, 10, 15],
    &[1, 15, 45, 15],
    &[1, 21, 105, 105],
    &[1, 28, 210, 420, 105],
    &[1, 36, 378, 1260, 945],
];

pub fn normal_ordering() -> SuiteResult {
    let mut s = SuiteResult::new(1, "normal-ordering exactness");
    let mut bad = vec![];
    for m in 1..=12 {
        match brute_force_normal_order(m) {
            Ok(b) if b == normal_order_power(m) => {}
            Ok(_) => bad.push(m.to_string()),
            Err(err) => bad.push(format!("{m} ({err})")),
        }
    }
    s.check(
        "closed expansion == brute-force commutator ordering, m = 1..12",
        bad.is_empty(),
        if bad.is_empty() {
            "exact equality".into()
        } else {
            format!("mismatch at m = {}", bad.join(", "))
        },
    );
    for (i, want) in REFERENCE_EXPANSIONS.iter().enumerate() {
        let m = i as u32 + 1;
        let got: Vec<BigInt> = colon_expansion(m).into_iter().map(|(_, c)| c).collect();
        let want: Vec<BigInt> = want.iter().map(|&c| BigInt::from(c)).collect();
        let list = got
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ");
        s.check(format!("reference expansion m = {m}"), got == want, list);
    }
    s
}

pub const SPECTRA_DIM: usize = 128;
pub const SPECTRA_LAMBDAS: [f64; 2] = [1e-2, 5e-3];

pub fn spectra_oracle() -> SuiteResult {
    let mut s = SuiteResult::new(2, "spectra oracle (lambda-halving slopes)");
    for m in [4u32, 6, 8, 10] {
        let Some(om1) = s.guard("frequency operator", freq_operator_first(m)) else {
            continue;
        };
        let mut spacings = vec![];
        for l in SPECTRA_LAMBDAS {
            let spec =
                OscillatorSpec::new(m, l, SPECTRA_DIM).and_then(|sp| numerical_spacings(&sp, 7));
            match s.guard("diagonalization", spec) {
                Some(v) => spacings.push(v),
                None => break,
            }
        }
        if spacings.len() < 2 {
            continue;
        }
        let resid = |k: usize, n: usize| {
            spacings[k][n] - (1.0 + SPECTRA_LAMBDAS[k] * to_f64(&om1.eval_level(n as i64)))
        };
        let slopes: Vec<f64> = (0..=6).map(|n| slope(resid(0, n), resid(1, n))).collect();
        let ok = slopes.iter().all(|sl| (sl - 2.0).abs() <= 0.2);
        let txt = slopes
            .iter()
            .map(|x| format!("{x:.3}"))
            .collect::<Vec<_>>()
            .join(" ");
        s.check(
            format!("m = {m} first-order slope 2.0 +- 0.2, n = 0..6"),
            ok,
            txt,
        );
        if m == 4 {
            let resid2 = |k: usize, n: usize| {
                let c = spectra::quartic_spacing_coeffs(n as u64 + 1);
                let l = SPECTRA_LAMBDAS[k];
                spacings[k][n] - (to_f64(&c[0]) + l * to_f64(&c[1]) + l * l * to_f64(&c[2]))
            };
            let slopes: Vec<f64> = (0..=6).map(|n| slope(resid2(0, n), resid2(1, n))).collect();
            let ok = slopes.iter().all(|sl| (sl - 3.0).abs() <= 0.3);
            let txt = slopes
                .iter()
                .map(|x| format!("{x:.3}"))
                .collect::<Vec<_>>()
                .join(" ");
            s.check("m = 4 second-order slope 3.0 +- 0.3, n = 0..6", ok, txt);
        }
    }
    s
}

pub fn equivalence_map() -> SuiteResult {
    let mut s = SuiteResult::new(3, "equivalence map Omega1 = average shift of omega1");
    for m in [4u32, 6, 8, 10] {
        let (Some(big), Some(small)) = (
            s.guard("Omega1", freq_operator_first(m)),
            s.guard("omega1", mspt_omega_poly(m)),
        ) else {
            continue;
        };
        let (avg, back) = spectra::equivalence_maps(&small);
        s.check(
            format!("m = {m} exact polynomial identity"),
            avg == big,
            format!("Omega1 = {big}"),
        );
        s.check(
            format!("m = {m} inverse map recovers omega1"),
            big.inverse_average_shift() == small && back == small,
            "exact",
        );
    }
    let want_big = FreqPolynomial::from_ratios(&[(3, 8), (3, 4)]);
    let want_small = FreqPolynomial::from_ratios(&[(0, 1), (3, 4)]);
    let ok = freq_operator_first(4).ok() == Some(want_big)
        && mspt_omega_poly(4).ok() == Some(want_small);
    s.check(
        "m = 4: Omega1 = (3/4)(H0 + 1/2), omega1 = (3/4)H0",
        ok,
        "exact",
    );
    s
}

pub const EVOLUTION_DIM: usize = 48;
pub const EVOLUTION_LAMBDAS: [f64; 2] = [2e-4, 1e-4];
/// Residuals are compared on this leading block, far from the truncation edge.
pub const EVOLUTION_BLOCK: usize = 8;

pub fn evolution() -> SuiteResult {
    let mut s = SuiteResult::new(4, "first-order evolution vs exact propagator");
    let Some((a, _)) = s.guard("ladder operators", ladder_ops(EVOLUTION_DIM)) else {
        return s;
    };
    for m in [4u32, 6] {
        let mut props = vec![];
        for l in EVOLUTION_LAMBDAS {
            let r = OscillatorSpec::new(m, l, EVOLUTION_DIM)
                .and_then(|sp| Ok((Propagator::new(&hamiltonian(&sp)?)?, sp)));
            props.extend(s.guard("propagator", r));
        }
        if props.len() < 2 {
            continue;
        }
        for t in [1.0, 3.0, 5.0] {
            let mut resid = vec![];
            for (p, spec) in &props {
                let r = p.heisenberg(&a, t).and_then(|ex| {
                    Ok((&ex - &a_first_order(spec, t)?)
                        .block(EVOLUTION_BLOCK)
                        .spectral_norm())
                });
                resid.extend(s.guard("residual", r));
            }
            if resid.len() == 2 {
                let ratio = resid[0] / resid[1];
                s.check(
                    format!("m = {m}, t = {t}: ratio 4 +- 0.5"),
                    (ratio - 4.0).abs() <= 0.5,
                    format!(
                        "ratio {ratio:.3} (residuals {}, {})",
                        e(resid[0]),
                        e(resid[1])
                    ),
                );
            }
        }
    }
    s
}

pub const PHASE_DIM: usize = 60;
pub const PHASE_LAMBDAS: [f64; 2] = [2e-3, 1e-3];
pub const PHASE_POINTS: usize = 20;

pub fn phase_fluctuations() -> SuiteResult {
    let mut s = SuiteResult::new(5, "phase fluctuations: closed forms vs from-scratch");
    let mut rng = ChaCha8Rng::seed_from_u64(PHASE_SEED);
    let mut points = vec![];
    while points.len() < PHASE_POINTS {
        let n0: f64 = rng.gen_range(0.5..4.0);
        let theta: f64 = rng.gen_range(0.0..PI);
        let t: f64 = rng.gen_range(0.1..3.0);
        if (t - theta).cos().abs() > 0.2 {
            points.push((n0, theta, t));
        }
    }
    let names = ["U", "S", "Q"];
    let mut ratios: [Vec<f64>; 3] = [vec![], vec![], vec![]];
    for &(n0, theta, t) in &points {
        let mut r = [[0.0; 2]; 3];
        for (k, l) in PHASE_LAMBDAS.into_iter().enumerate() {
            let pair = observables::pb_phase_params(n0, theta, l, t).and_then(|c| {
                Ok((
                    c,
                    observables::pb_phase_params_from_scratch(n0, theta, l, t, PHASE_DIM)?,
                ))
            });
            let Some((c, x)) = s.guard("phase parameters", pair) else {
                return s;
            };
            r[0][k] = c.u - x.u;
            r[1][k] = c.s - x.s;
            r[2][k] = match (c.q.value(), x.q.value()) {
                (Some(a), Some(b)) => a - b,
                _ => f64::NAN,
            };
        }
        for q in 0..3 {
            ratios[q].push(r[q][0] / r[q][1]);
        }
    }
    for q in 0..3 {
        let ok = ratios[q].iter().all(|r| (3.0..=5.0).contains(r));
        let (lo, hi) = ratios[q]
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                (lo.min(r), hi.max(r))
            });
        let n_ok = ratios[q]
            .iter()
            .filter(|r| (3.0..=5.0).contains(*r))
            .count();
        s.check(
            format!(
                "{}: residual ratio in [3, 5] at {PHASE_POINTS} random points",
                names[q]
            ),
            ok,
            format!("{n_ok}/{PHASE_POINTS} in band, ratios {lo:.3}..{hi:.3}"),
        );
    }

    let l = 0.01;
    for n0 in [1.0, 4.0] {
        if let Some(p) = s.guard(
            "closed form",
            observables::pb_phase_params(n0, FRAC_PI_4, l, FRAC_PI_4),
        ) {
            let want = 0.5 * (1.0 - 3.0 * l * n0 / 8.0);
            s.check(
                format!("U(theta = t = pi/4) = 1/2 (1 - 3 lambda N0 / 8), N0 = {n0}"),
                (p.u - want).abs() <= 1e-12,
                format!("closed {:.12}, reference {want:.12}", p.u),
            );
        }
        if let Some(p) = s.guard(
            "closed form",
            observables::pb_phase_params(n0, FRAC_PI_4, l, FRAC_PI_2),
        ) {
            let want = 0.5 * (1.0 + 3.0 * 2f64.sqrt() / 4.0 * l * (1.0 + 2.0 * n0));
            s.check(
                format!("U(theta = pi/4, t = pi/2) = 1/2 (1 + (3 sqrt2 / 4) lambda (1 + 2 N0)), N0 = {n0}"),
                (p.u - want).abs() <= 1e-12,
                format!("closed {:.12}, reference {want:.12}", p.u),
            );
        }
    }
    let mut vac = vec![];
    for &(theta, t) in &[(0.0, 0.5), (0.4, 0.9), (1.2, 2.7)] {
        let closed = observables::pb_phase_params_vacuum(theta, l, t).map(|p| p.s);
        let scratch = observables::pb_phase_params_from_scratch(0.0, theta, l, t, 30).map(|p| p.s);
        vac.extend(s.guard("vacuum", closed));
        vac.extend(s.guard("vacuum", scratch));
    }
    let worst = vac.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    s.check(
        "vacuum S = 0 (closed and from-scratch)",
        worst <= 1e-12,
        format!("max |S| {}", e(worst)),
    );
    s
}

pub const SQUEEZE_DIM: usize = 48;

pub fn squeezing() -> SuiteResult {
    let mut s = SuiteResult::new(6, "quadrature squeezing");
    let l = 0.02;
    let mut worst = 0.0f64;
    for n in 1..=4u32 {
        let t = n as f64 * PI;
        let want = 0.5 - 9.0 * l * l / 64.0 * (n as f64 * PI).powi(2);
        worst = worst.max((observables::variance_x_quartic(0.0, 0.0, l, t) - want).abs());
    }
    s.check(
        "vacuum (dX)^2 at t = n pi equals 1/2 - (9 lambda^2 / 64) n^2 pi^2",
        worst <= 1e-12,
        format!("max dev {}", e(worst)),
    );

    let v = observables::variance_x_quartic(0.0, 0.0, l, FRAC_PI_2);
    let want = 0.5 - 3.0 * l / 4.0 + 3.0 * l * l / 256.0 * (208.0 - 3.0 * PI * PI);
    s.check(
        "vacuum (dX)^2 at t = pi/2 equals 1/2 - 3 lambda/4 + (3 lambda^2/256)(208 - 3 pi^2)",
        (v - want).abs() <= 1e-12,
        format!("{v:.12} vs {want:.12}"),
    );

    for &(alpha, theta, t) in &[(0.0, 0.0, 1.0), (1.0, 0.3, 1.0), (1.0, 0.0, 2.0)] {
        let mut resid = vec![];
        for lam in [2e-3, 1e-3] {
            let ex = observables::variance_x_exact(4, alpha, theta, lam, t, SQUEEZE_DIM);
            if let Some(ex) = s.guard("exact variance", ex) {
                resid.push(observables::variance_x_quartic(alpha, theta, lam, t) - ex);
            }
        }
        if resid.len() == 2 {
            let ratio = resid[0] / resid[1];
            s.check(
                format!("second order vs exact, alpha = {alpha}, theta = {theta}, t = {t}: ratio 8 +- 1.5"),
                (ratio - 8.0).abs() <= 1.5,
                format!("ratio {ratio:.3} (residuals {}, {})", e(resid[0]), e(resid[1])),
            );
        }
    }

    let mut violations = 0;
    let mut max_v = f64::NEG_INFINITY;
    for i in 1..100 {
        let t = FRAC_PI_2 * i as f64 / 100.0;
        for j in 1..=10 {
            let lam = 0.005 * j as f64;
            if let Some(v) = s.guard(
                "general variance",
                observables::variance_x_general(4, 0.0, 0.0, lam, t),
            ) {
                max_v = max_v.max(v);
                if v >= 0.5 {
                    violations += 1;
                }
            }
        }
    }
    s.check(
        "m = 4, theta = 0 general form squeezed on t in (0, pi/2), lambda in (0, 0.05]",
        violations == 0,
        format!("{violations} grid points at or above 1/2, max {max_v:.12}"),
    );
    s
}

pub fn photon_statistics() -> SuiteResult {
    let mut s = SuiteResult::new(7, "photon statistics");
    let mut worst = 0.0f64;
    for m in [4u32, 6, 8] {
        for &(alpha, theta) in &[(1.0, 0.3), (1.5, 0.8), (0.7, 1.4)] {
            if let Some(d) = s.guard(
                "d",
                observables::d_general(m, alpha, theta, 0.01, 2.0 * theta),
            ) {
                worst = worst.max(d.abs());
            }
        }
    }
    s.check(
        "d(t = 2 theta) = 0 for m = 4, 6, 8",
        worst <= 1e-12,
        format!("max |d| {}", e(worst)),
    );

    let grid: Vec<f64> = (1..=100).map(|i| 2.0 * PI * i as f64 / 100.0).collect();
    let mut neg = 0;
    for m in [4u32, 6, 8] {
        for &t in &grid {
            match observables::d_general(m, 1.2, 0.0, 0.01, t) {
                Ok(d) if d >= -1e-15 => {}
                _ => neg += 1,
            }
        }
    }
    s.check(
        "theta = 0: d >= 0 on a 100-point t grid, m = 4, 6, 8",
        neg == 0,
        format!("{neg} negative"),
    );

    let mut mismatch = 0;
    let mut counted = 0;
    for &t in &grid {
        let s2 = (2.0 * t).sin();
        if s2.abs() < 1e-9 {
            continue;
        }
        counted += 1;
        match photon_stats_quartic(2.0, FRAC_PI_4, 0.01, t) {
            Ok(p) if p.d.signum() == (-s2).signum() => {}
            _ => mismatch += 1,
        }
    }
    s.check(
        "theta = pi/4: sign(d) = sign(-sin 2t)",
        mismatch == 0,
        format!("{mismatch} of {counted} mismatched"),
    );

    let mut worst = 0.0f64;
    for &(theta, t) in &[(0.2, 0.9), (0.0, 1.7), (1.1, 2.5)] {
        let lim = photon_stats_quartic(0.0, theta, 0.03, t).map(|p| p.mandel_q.value());
        let near = photon_stats_quartic(1e-6, theta, 0.03, t).map(|p| p.mandel_q.value());
        match (s.guard("vacuum Q", lim), s.guard("Q", near)) {
            (Some(Some(a)), Some(Some(b))) => worst = worst.max((a - b).abs()),
            _ => worst = f64::INFINITY,
        }
    }
    s.check(
        "vacuum Mandel Q limit vs N0 = 1e-6",
        worst <= 1e-5,
        format!("max dev {}", e(worst)),
    );
    s
}

pub const GEOMETRIC_LAMBDA_PRIME: f64 = 1.0 / 16.0;

pub fn geometric_phase() -> SuiteResult {
    let mut s = SuiteResult::new(8, "geometric phase: closed form vs Fock summation");
    let lp = GEOMETRIC_LAMBDA_PRIME;
    let fock = |alpha: f64, theta: f64| -> aho_core::Result<f64> {
        let stats = InputStatistics::poissonian(alpha, theta)?;
        geometry::aa_phase_general(&stats, lp, &normal_order_power(4).render(stats.dim()))
    };
    for n0 in [0.0f64, 1.0, 4.0] {
        for theta in [0.0, FRAC_PI_4, FRAC_PI_2] {
            let alpha = n0.sqrt();
            let pair = geometry::aa_phase_quartic_coherent(alpha, theta, lp)
                .and_then(|c| Ok((c, fock(alpha, theta)?)));
            if let Some((c, f)) = s.guard("beta", pair) {
                s.check(
                    format!("|alpha|^2 = {n0}, theta = {theta:.4}: agree to 1e-9"),
                    (c - f).abs() <= 1e-9,
                    format!("closed {c:.12}, Fock {f:.12}"),
                );
            }
        }
    }
    if let Some(v) = s.guard("vacuum", geometry::aa_phase_quartic_coherent(0.0, 0.0, lp)) {
        s.check(
            "vacuum beta = 8 pi",
            (v - 8.0 * PI).abs() <= 1e-12,
            format!("{v:.12}"),
        );
    }
    let spread = [0.0, FRAC_PI_4, FRAC_PI_2]
        .iter()
        .filter_map(|&th| fock(1.0, th).ok())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), b| {
            (lo.min(b), hi.max(b))
        });
    s.check(
        "beta depends on theta for |alpha| = 1",
        spread.1 - spread.0 > 1e-6,
        format!("range {:.6}..{:.6}", spread.0, spread.1),
    );
    s
}

pub const CLASSICAL_A: f64 = 2.0;
pub const CLASSICAL_LAMBDA: f64 = 0.05;
pub const CLASSICAL_T_END: f64 = 50.0;

pub fn classical_renormalization() -> SuiteResult {
    let mut s = SuiteResult::new(9, "classical quartic oscillator vs RK4");
    let Some(traj) = s.guard(
        "RK4",
        classical::rk4_oracle(
            4,
            CLASSICAL_A,
            0.0,
            CLASSICAL_LAMBDA,
            CLASSICAL_T_END,
            classical::RK4_DT,
        ),
    ) else {
        return s;
    };
    let mut ren = 0.0f64;
    let mut sec = 0.0f64;
    for (&t, &x) in traj.t.iter().zip(&traj.x) {
        let r = classical::quartic_classical(CLASSICAL_A, 0.0, CLASSICAL_LAMBDA, t, 2, true)
            .unwrap_or(f64::NAN);
        let u = classical::quartic_classical(CLASSICAL_A, 0.0, CLASSICAL_LAMBDA, t, 2, false)
            .unwrap_or(f64::NAN);
        ren = ren
            .max((r - x).abs())
            .max(if r.is_nan() { f64::INFINITY } else { 0.0 });
        sec = sec.max((u - x).abs());
    }
    s.check(
        "renormalized second order: max |dx| <= 0.05 on [0, 50]",
        ren <= 0.05,
        format!("max |dx| {ren:.6}"),
    );
    s.check(
        "secular second order: max |dx| > 0.5 on [0, 50]",
        sec > 0.5,
        format!("max |dx| {sec:.6}"),
    );
    let pair = classical::zero_crossing_frequency(&traj)
        .and_then(|w| Ok((w, classical::omega_prime(4, CLASSICAL_A, CLASSICAL_LAMBDA)?)));
    if let Some((w, wp)) = s.guard("frequency", pair) {
        let rel = (w - wp).abs() / wp;
        s.check(
            "zero-crossing frequency within 0.5% of omega'",
            rel <= 5e-3,
            format!("RK4 {w:.8}, omega' {wp:.8}, rel {}", e(rel)),
        );
    }
    s.check(
        "RK4 energy drift <= 1e-8",
        traj.max_drift <= classical::RK4_DRIFT,
        e(traj.max_drift),
    );
    s
}
