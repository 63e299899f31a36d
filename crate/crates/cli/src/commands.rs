//! One table builder per subcommand. Rows come out in grid order, last key
//! fastest; numerical trouble at a grid point becomes a row flag.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use aho_core::classical::{self, Trajectory};
use aho_core::evolution::{a_first_order, a_secular_removed, PhasePlacement};
use aho_core::fock::{
    coherent_state, default_dim, expectation, hamiltonian, ladder_ops, required_dim, Propagator,
};
use aho_core::geometry::{self, InputStatistics};
use aho_core::observables::{self, StatValue};
use aho_core::ordering::{
    brute_force_normal_order, colon_expansion, normal_order_power, BRUTE_FORCE_GUARD,
};
use aho_core::quality::{lambda_window_exceeded, secular_window_exceeded, MaybePole};
use aho_core::spectra::{self, FreqPolynomial};
use aho_core::{FockMatrix, OscillatorSpec, C64};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::config::{product, SweepConfig};
use crate::error::CliError;
use crate::table::{Cell, Table};

const TAIL: f64 = 1e-12;

/// Accumulates row flags and the provenance kinds that fed the row.
#[derive(Default)]
struct RowMeta {
    flags: Vec<&'static str>,
    kinds: Vec<&'static str>,
}

impl RowMeta {
    fn flag(&mut self, f: &'static str) {
        if !self.flags.contains(&f) {
            self.flags.push(f);
        }
    }

    fn kind(&mut self, k: &'static str) {
        if !self.kinds.contains(&k) {
            self.kinds.push(k);
        }
    }

    fn cells(self) -> [Cell; 2] {
        [
            Cell::Text(self.kinds.join(";")),
            Cell::Text(self.flags.join(";")),
        ]
    }
}

const META_COLS: [(&str, &str); 2] = [("provenance", "row"), ("flags", "quality")];

fn with_meta(cols: &[(&'static str, &'static str)]) -> Vec<(&'static str, &'static str)> {
    let mut v = cols.to_vec();
    v.extend(META_COLS);
    v
}

fn big_cell(c: &BigInt) -> Cell {
    c.to_i64()
        .map_or_else(|| Cell::Text(c.to_string()), Cell::Int)
}

fn ok_or_flag<T>(r: aho_core::Result<T>, meta: &mut RowMeta, flag: &'static str) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(_) => {
            meta.flag(flag);
            None
        }
    }
}

fn pole_cell(q: MaybePole, meta: &mut RowMeta) -> Cell {
    match q {
        MaybePole::Finite(v) => Cell::Num(v),
        MaybePole::Pole => {
            meta.flag("pole");
            Cell::Null
        }
    }
}

fn resolve_dim(dim: u32, alpha: f64, m: u32) -> usize {
    if dim == 0 {
        default_dim(alpha, m)
    } else {
        dim as usize
    }
}

/// Expansion coefficients of `(a† + a)^m` over `:(a† + a)^k:`.
pub fn order(cfg: &SweepConfig) -> Result<Table, CliError> {
    cfg.check_keys(&["m"])?;
    let ms = cfg.uints("m", &[4])?;
    let mut t = Table::new(&with_meta(&[
        ("m", "input"),
        ("power", "ordering::colon_expansion"),
        ("coeff", "ordering::colon_expansion"),
        ("brute_force_agrees", "ordering::brute_force_normal_order"),
    ]));
    for m in ms {
        let agrees = if m <= BRUTE_FORCE_GUARD {
            Cell::Bool(normal_order_power(m) == brute_force_normal_order(m)?)
        } else {
            Cell::Null
        };
        for (k, c) in colon_expansion(m) {
            let mut meta = RowMeta::default();
            meta.kind("closed-form");
            if matches!(agrees, Cell::Bool(_)) {
                meta.kind("oracle");
            } else {
                meta.flag("oracle-skipped");
            }
            let mut row = vec![
                Cell::Int(m as i64),
                Cell::Int(k as i64),
                big_cell(&c),
                agrees.clone(),
            ];
            row.extend(meta.cells());
            t.push(row);
        }
    }
    Ok(t)
}

fn ratio_f64(x: &num_rational::BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Level spacings `E_{n+1} − E_n`: first order, second order (m = 4), and diagonalization.
pub fn spectra(cfg: &SweepConfig) -> Result<Table, CliError> {
    cfg.check_keys(&["m", "lambda", "n", "dim"])?;
    let ms = cfg.uints("m", &[4])?;
    let lambdas = cfg.floats("lambda", &[0.01]);
    let dims = cfg.uints("dim", &[64])?;
    let ns = cfg.uints("n", &[0, 1, 2, 3, 4])?;
    let mut t = Table::new(&with_meta(&[
        ("m", "input"),
        ("lambda", "input"),
        ("dim", "input"),
        ("n", "input"),
        ("omega1", "spectra::freq_operator_first"),
        ("omega_mspt", "spectra::mspt_omega_poly"),
        ("spacing_first", "spectra::freq_operator_first"),
        ("spacing_second", "spectra::quartic_spacing_coeffs"),
        ("spacing_numeric", "spectra::numerical_spacings"),
        ("residual_first", "spacing_numeric - spacing_first"),
        ("residual_second", "spacing_numeric - spacing_second"),
    ]));
    let n_max = ns.iter().copied().max().unwrap_or(0) as usize;
    let mut polys: HashMap<u32, (FreqPolynomial, FreqPolynomial)> = HashMap::new();
    for idx in product(&[ms.len(), lambdas.len(), dims.len()]) {
        let (m, lambda, dim) = (ms[idx[0]], lambdas[idx[1]], dims[idx[2]] as usize);
        if let Entry::Vacant(e) = polys.entry(m) {
            e.insert((
                spectra::freq_operator_first(m)?,
                spectra::mspt_omega_poly(m)?,
            ));
        }
        let (om1, omega) = &polys[&m];
        let spec = OscillatorSpec::new(m, lambda, dim)?;
        let numeric = spectra::numerical_spacings(&spec, n_max + 1);
        for &n in &ns {
            let mut meta = RowMeta::default();
            meta.kind("closed-form");
            let w1 = ratio_f64(&om1.eval_level(n as i64));
            let first = 1.0 + lambda * w1;
            let second = (m == 4).then(|| {
                let c = spectra::quartic_spacing_coeffs(n as u64 + 1);
                ratio_f64(&c[0]) + lambda * ratio_f64(&c[1]) + lambda * lambda * ratio_f64(&c[2])
            });
            let num = match &numeric {
                Ok(v) => {
                    meta.kind("oracle");
                    Some(v[n as usize])
                }
                Err(_) => {
                    meta.flag("oracle-failed");
                    None
                }
            };
            if lambda_window_exceeded(m, lambda, n as f64 + 1.0) {
                meta.flag("lambda-window");
            }
            let mut row = vec![
                Cell::Int(m as i64),
                Cell::Num(lambda),
                Cell::Int(dim as i64),
                Cell::Int(n as i64),
                Cell::Num(w1),
                Cell::Num(omega.eval_f64(n as f64 + 0.5)),
                Cell::Num(first),
                Cell::opt(second),
                Cell::opt(num),
                Cell::opt(num.map(|x| x - first)),
                Cell::opt(num.zip(second).map(|(x, s)| x - s)),
            ];
            row.extend(meta.cells());
            t.push(row);
        }
    }
    Ok(t)
}

/// `⟨α|a(t)|α⟩` from the first-order and secular-removed operators against
/// the exact propagator.
pub fn evolve(cfg: &SweepConfig) -> Result<Table, CliError> {
    cfg.check_keys(&["m", "lambda", "t", "dim", "alpha", "theta"])?;
    let ms = cfg.uints("m", &[4])?;
    let lambdas = cfg.floats("lambda", &[1e-3]);
    let ts = cfg.floats("t", &[1.0]);
    let dims = cfg.uints("dim", &[0])?;
    let alphas = cfg.floats("alpha", &[1.0]);
    let thetas = cfg.floats("theta", &[0.0]);
    let mut tab = Table::new(&with_meta(&[
        ("m", "input"),
        ("lambda", "input"),
        ("alpha", "input"),
        ("theta", "input"),
        ("dim", "input"),
        ("t", "input"),
        ("a_first_re", "evolution::a_first_order"),
        ("a_first_im", "evolution::a_first_order"),
        ("a_resummed_re", "evolution::a_secular_removed"),
        ("a_resummed_im", "evolution::a_secular_removed"),
        ("a_exact_re", "fock::Propagator::heisenberg"),
        ("a_exact_im", "fock::Propagator::heisenberg"),
        ("residual_first", "|a_first - a_exact|"),
        ("residual_resummed", "|a_resummed - a_exact|"),
    ]));
    for idx in product(&[
        ms.len(),
        lambdas.len(),
        alphas.len(),
        thetas.len(),
        dims.len(),
    ]) {
        let (m, lambda, alpha, theta) =
            (ms[idx[0]], lambdas[idx[1]], alphas[idx[2]], thetas[idx[3]]);
        let dim = resolve_dim(dims[idx[4]], alpha, m);
        let spec = OscillatorSpec::new(m, lambda, dim)?;
        let prop = Propagator::new(&hamiltonian(&spec)?)?;
        let (a, _) = ladder_ops(dim)?;
        for &t in &ts {
            let mut meta = RowMeta::default();
            meta.kind("closed-form");
            if secular_window_exceeded(lambda, t) {
                meta.flag("secular-window");
            }
            let psi = ok_or_flag(
                coherent_state(alpha, theta, dim, TAIL),
                &mut meta,
                "truncation-tail",
            );
            let ev = |op: aho_core::Result<FockMatrix>| -> Option<C64> {
                let psi = psi.as_ref()?;
                expectation(&op.ok()?, psi).ok()
            };
            let first = ev(a_first_order(&spec, t));
            let res = ev(a_secular_removed(&spec, t, PhasePlacement::Between));
            let exact = ev(prop.heisenberg(&a, t));
            if exact.is_some() {
                meta.kind("oracle");
            }
            let re = |z: Option<C64>| Cell::opt(z.map(|z| z.re));
            let im = |z: Option<C64>| Cell::opt(z.map(|z| z.im));
            let diff = |z: Option<C64>| Cell::opt(z.zip(exact).map(|(z, e)| (z - e).norm()));
            let mut row = vec![
                Cell::Int(m as i64),
                Cell::Num(lambda),
                Cell::Num(alpha),
                Cell::Num(theta),
                Cell::Int(dim as i64),
                Cell::Num(t),
                re(first),
                im(first),
                re(res),
                im(res),
                re(exact),
                im(exact),
                diff(first),
                diff(res),
            ];
            row.extend(meta.cells());
            tab.push(row);
        }
    }
    Ok(tab)
}

/// Pegg–Barnett phase-fluctuation parameters, closed form and operator route.
pub fn phase(cfg: &SweepConfig) -> Result<Table, CliError> {
    cfg.check_keys(&["N0", "theta", "t", "lambda", "dim"])?;
    let n0s = cfg.floats("N0", &[1.0]);
    let thetas = cfg.floats("theta", &[0.0]);
    let ts = cfg.floats("t", &[1.0]);
    let lambdas = cfg.floats("lambda", &[0.01]);
    let dims = cfg.uints("dim", &[0])?;
    let mut tab = Table::new(&with_meta(&[
        ("N0", "input"),
        ("theta", "input"),
        ("t", "input"),
        ("lambda", "input"),
        ("dim", "input"),
        ("U", "observables::pb_phase_params"),
        ("S", "observables::pb_phase_params"),
        ("Q", "observables::pb_phase_params"),
        ("U0", "observables::pb_phase_params"),
        ("S0", "observables::pb_phase_params"),
        ("Q0", "observables::pb_phase_params"),
        ("U_scratch", "observables::pb_phase_params_from_scratch"),
        ("S_scratch", "observables::pb_phase_params_from_scratch"),
        ("Q_scratch", "observables::pb_phase_params_from_scratch"),
    ]));
    for idx in product(&[n0s.len(), thetas.len(), ts.len(), lambdas.len(), dims.len()]) {
        let (n0, theta, t, lambda) = (n0s[idx[0]], thetas[idx[1]], ts[idx[2]], lambdas[idx[3]]);
        let dim = match dims[idx[4]] {
            0 => required_dim(n0.max(0.0), TAIL) + 24,
            d => d as usize,
        };
        let mut meta = RowMeta::default();
        if secular_window_exceeded(lambda, t) {
            meta.flag("secular-window");
        }
        let p = observables::pb_phase_params(n0, theta, lambda, t)?;
        meta.kind("closed-form");
        let scratch = ok_or_flag(
            observables::pb_phase_params_from_scratch(n0, theta, lambda, t, dim),
            &mut meta,
            "truncation-tail",
        );
        if scratch.is_some() {
            meta.kind("from-scratch");
        }
        let mut row = vec![
            Cell::Num(n0),
            Cell::Num(theta),
            Cell::Num(t),
            Cell::Num(lambda),
            Cell::Int(dim as i64),
            Cell::Num(p.u),
            Cell::Num(p.s),
            pole_cell(p.q, &mut meta),
            Cell::Num(p.u0),
            Cell::Num(p.s0),
            pole_cell(p.q0, &mut meta),
        ];
        match scratch {
            Some(s) => {
                row.push(Cell::Num(s.u));
                row.push(Cell::Num(s.s));
                row.push(pole_cell(s.q, &mut meta));
            }
            None => row.extend([Cell::Null, Cell::Null, Cell::Null]),
        }
        row.extend(meta.cells());
        tab.push(row);
    }
    Ok(tab)
}

/// Quadrature variance `(ΔX)²`: second-order quartic, first-order general `m`,
/// the reference general form, and the exact propagator.
pub fn squeeze(cfg: &SweepConfig) -> Result<Table, CliError> {
    cfg.check_keys(&["m", "alpha", "theta", "t", "lambda", "dim"])?;
    let ms = cfg.uints("m", &[4])?;
    let alphas = cfg.floats("alpha", &[0.0]);
    let thetas = cfg.floats("theta", &[0.0]);
    let ts = cfg.floats("t", &[1.0]);
    let lambdas = cfg.floats("lambda", &[0.01]);
    let dims = cfg.uints("dim", &[0])?;
    let mut tab = Table::new(&with_meta(&[
        ("m", "input"),
        ("alpha", "input"),
        ("theta", "input"),
        ("t", "input"),
        ("lambda", "input"),
        ("dim", "input"),
        ("var_second_order", "observables::variance_x_quartic"),
        ("var_first_order", "observables::variance_x_general"),
        (
            "var_general_reference",
            "observables::variance_x_general_reference",
        ),
        ("var_exact", "observables::variance_x_exact"),
        ("squeezed", "var_exact < 1/2"),
    ]));
    for idx in product(&[
        ms.len(),
        alphas.len(),
        thetas.len(),
        ts.len(),
        lambdas.len(),
        dims.len(),
    ]) {
        let (m, alpha, theta, t, lambda) = (
            ms[idx[0]],
            alphas[idx[1]],
            thetas[idx[2]],
            ts[idx[3]],
            lambdas[idx[4]],
        );
        let dim = resolve_dim(dims[idx[5]], alpha, m);
        let mut meta = RowMeta::default();
        meta.kind("closed-form");
        if secular_window_exceeded(lambda, t) {
            meta.flag("secular-window");
        }
        let second = (m == 4).then(|| observables::variance_x_quartic(alpha, theta, lambda, t));
        let first = observables::variance_x_general(m, alpha, theta, lambda, t)?;
        let reference = observables::variance_x_general_reference(m, alpha, theta, lambda, t)?;
        let exact = ok_or_flag(
            observables::variance_x_exact(m, alpha, theta, lambda, t, dim),
            &mut meta,
            "truncation-tail",
        );
        if exact.is_some() {
            meta.kind("oracle");
        }
        let mut row = vec![
            Cell::Int(m as i64),
            Cell::Num(alpha),
            Cell::Num(theta),
            Cell::Num(t),
            Cell::Num(lambda),
            Cell::Int(dim as i64),
            Cell::opt(second),
            Cell::Num(first),
            Cell::Num(reference),
            Cell::opt(exact),
            exact.map_or(Cell::Null, |v| Cell::Bool(v < 0.5)),
        ];
        row.extend(meta.cells());
        tab.push(row);
    }
    Ok(tab)
}

fn stat_cell(v: StatValue, meta: &mut RowMeta) -> Cell {
    if let StatValue::VacuumLimit(_) = v {
        meta.flag("vacuum-limit");
    }
    Cell::opt(v.value())
}

/// Photon statistics: quartic closed form, general-`m` `d`, exact propagator.
pub fn stats(cfg: &SweepConfig) -> Result<Table, CliError> {
    cfg.check_keys(&["m", "alpha", "theta", "t", "lambda", "dim"])?;
    let ms = cfg.uints("m", &[4])?;
    let alphas = cfg.floats("alpha", &[1.0]);
    let thetas = cfg.floats("theta", &[0.0]);
    let ts = cfg.floats("t", &[1.0]);
    let lambdas = cfg.floats("lambda", &[0.01]);
    let dims = cfg.uints("dim", &[0])?;
    let mut tab = Table::new(&with_meta(&[
        ("m", "input"),
        ("alpha", "input"),
        ("theta", "input"),
        ("t", "input"),
        ("lambda", "input"),
        ("dim", "input"),
        ("mean", "observables::photon_stats_quartic"),
        ("var", "observables::photon_stats_quartic"),
        ("d", "observables::photon_stats_quartic"),
        ("g2", "observables::photon_stats_quartic"),
        ("mandel_q", "observables::photon_stats_quartic"),
        ("d_general", "observables::d_general"),
        ("class", "observables::classify(d_general)"),
        ("mean_exact", "observables::photon_stats_exact"),
        ("var_exact", "observables::photon_stats_exact"),
        ("d_exact", "observables::photon_stats_exact"),
    ]));
    for idx in product(&[
        ms.len(),
        alphas.len(),
        thetas.len(),
        ts.len(),
        lambdas.len(),
        dims.len(),
    ]) {
        let (m, alpha, theta, t, lambda) = (
            ms[idx[0]],
            alphas[idx[1]],
            thetas[idx[2]],
            ts[idx[3]],
            lambdas[idx[4]],
        );
        let dim = resolve_dim(dims[idx[5]], alpha, m);
        let mut meta = RowMeta::default();
        meta.kind("closed-form");
        if secular_window_exceeded(lambda, t) {
            meta.flag("secular-window");
        }
        let n0 = alpha * alpha;
        let quartic = if m == 4 {
            Some(observables::photon_stats_quartic(n0, theta, lambda, t)?)
        } else {
            None
        };
        let d = observables::d_general(m, alpha, theta, lambda, t)?;
        let class = observables::classify(d, observables::CLASSIFY_TOL * n0.max(1.0).powi(2));
        let exact = ok_or_flag(
            observables::photon_stats_exact(m, alpha, theta, lambda, t, dim),
            &mut meta,
            "truncation-tail",
        );
        if exact.is_some() {
            meta.kind("oracle");
        }
        let mut row = vec![
            Cell::Int(m as i64),
            Cell::Num(alpha),
            Cell::Num(theta),
            Cell::Num(t),
            Cell::Num(lambda),
            Cell::Int(dim as i64),
        ];
        match quartic {
            Some(s) => {
                row.extend([Cell::Num(s.mean), Cell::Num(s.var), Cell::Num(s.d)]);
                row.push(stat_cell(s.g2, &mut meta));
                row.push(stat_cell(s.mandel_q, &mut meta));
            }
            None => row.extend([Cell::Null, Cell::Null, Cell::Null, Cell::Null, Cell::Null]),
        }
        row.push(Cell::Num(d));
        row.push(Cell::from(class.label()));
        match exact {
            Some((mean, var)) => {
                row.extend([Cell::Num(mean), Cell::Num(var), Cell::Num(var - mean)])
            }
            None => row.extend([Cell::Null, Cell::Null, Cell::Null]),
        }
        row.extend(meta.cells());
        tab.push(row);
    }
    Ok(tab)
}

/// Family-specific parameter grid for the geometric phase.
enum FamilyPoint {
    Poisson,
    Binomial(u32, f64),
    NegBinomial(u32, f64),
}

/// Aharonov–Anandan phase for `F = (a† + a)^m` over input statistics families.
pub fn geometric(cfg: &SweepConfig) -> Result<Table, CliError> {
    cfg.check_keys(&[
        "family",
        "m",
        "lambda_prime",
        "alpha",
        "theta",
        "N",
        "p",
        "W",
        "q",
    ])?;
    let families = cfg.texts("family", &["poisson"]);
    let ms = cfg.uints("m", &[4])?;
    let lps = cfg.floats("lambda_prime", &[0.0625]);
    let alphas = cfg.floats("alpha", &[1.0]);
    let thetas = cfg.floats("theta", &[0.0]);
    let big_ns = cfg.uints("N", &[10])?;
    let ps = cfg.floats("p", &[0.5]);
    let ws = cfg.uints("W", &[2])?;
    let qs = cfg.floats("q", &[0.5]);
    let mut tab = Table::new(&with_meta(&[
        ("family", "input"),
        ("m", "input"),
        ("lambda_prime", "input"),
        ("alpha", "input"),
        ("theta", "input"),
        ("N", "input"),
        ("p", "input"),
        ("W", "input"),
        ("q", "input"),
        ("dim", "geometry::InputStatistics"),
        ("mean_n", "geometry::InputStatistics::mean"),
        ("beta_m", "geometry::aa_phase_m"),
        ("beta_fock", "geometry::aa_phase_general"),
        ("beta_closed", "geometry::aa_phase_quartic_coherent"),
        (
            "beta_closed_corrected",
            "geometry::aa_phase_quartic_coherent_corrected",
        ),
    ]));
    for fam in &families {
        let mut points = Vec::new();
        match fam.as_str() {
            "poisson" => {
                for idx in product(&[alphas.len()]) {
                    points.push((FamilyPoint::Poisson, alphas[idx[0]]));
                }
            }
            "binomial" => {
                for idx in product(&[big_ns.len(), ps.len()]) {
                    points.push((FamilyPoint::Binomial(big_ns[idx[0]], ps[idx[1]]), f64::NAN));
                }
            }
            "negbinomial" => {
                for idx in product(&[ws.len(), qs.len()]) {
                    points.push((FamilyPoint::NegBinomial(ws[idx[0]], qs[idx[1]]), f64::NAN));
                }
            }
            other => {
                return Err(CliError::Config(format!(
                    "family must be poisson, binomial or negbinomial, got '{other}'"
                )))
            }
        }
        for (point, alpha) in &points {
            for idx in product(&[ms.len(), lps.len(), thetas.len()]) {
                let (m, lp, theta) = (ms[idx[0]], lps[idx[1]], thetas[idx[2]]);
                let stats = match point {
                    FamilyPoint::Poisson => InputStatistics::poissonian(*alpha, theta)?,
                    FamilyPoint::Binomial(n, p) => {
                        InputStatistics::binomial(*n, *p)?.with_phase(theta)
                    }
                    FamilyPoint::NegBinomial(w, q) => {
                        InputStatistics::negative_binomial(*w, *q)?.with_phase(theta)
                    }
                };
                let mut meta = RowMeta::default();
                meta.kind("closed-form");
                let beta_m = geometry::aa_phase_m(&stats, m, lp)?;
                let f = normal_order_power(m).render(stats.dim());
                let fock = geometry::aa_phase_general(&stats, lp, &f)?;
                meta.kind("oracle");
                let closed = matches!(point, FamilyPoint::Poisson) && m == 4;
                let closed_val = if closed {
                    Some(geometry::aa_phase_quartic_coherent(*alpha, theta, lp)?)
                } else {
                    None
                };
                let corrected = if closed {
                    Some(geometry::aa_phase_quartic_coherent_corrected(
                        *alpha, theta, lp,
                    )?)
                } else {
                    None
                };
                let (nn, pp, ww, qq) = match point {
                    FamilyPoint::Poisson => (Cell::Null, Cell::Null, Cell::Null, Cell::Null),
                    FamilyPoint::Binomial(n, p) => {
                        (Cell::Int(*n as i64), Cell::Num(*p), Cell::Null, Cell::Null)
                    }
                    FamilyPoint::NegBinomial(w, q) => {
                        (Cell::Null, Cell::Null, Cell::Int(*w as i64), Cell::Num(*q))
                    }
                };
                let mut row = vec![
                    Cell::from(fam.as_str()),
                    Cell::Int(m as i64),
                    Cell::Num(lp),
                    if alpha.is_nan() {
                        Cell::Null
                    } else {
                        Cell::Num(*alpha)
                    },
                    Cell::Num(theta),
                    nn,
                    pp,
                    ww,
                    qq,
                    Cell::Int(stats.dim() as i64),
                    Cell::Num(stats.mean()),
                    Cell::Num(beta_m),
                    Cell::Num(fock),
                    Cell::opt(closed_val),
                    Cell::opt(corrected),
                ];
                row.extend(meta.cells());
                tab.push(row);
            }
        }
    }
    Ok(tab)
}

/// `(t, x_pert, x_secular, x_rk4)` triplets for the classical oscillators.
pub fn classical(cfg: &SweepConfig) -> Result<Table, CliError> {
    cfg.check_keys(&["m", "A", "v0", "lambda", "t_end", "dt", "stride", "order"])?;
    let ms = cfg.uints("m", &[4])?;
    let amps = cfg.floats("A", &[2.0]);
    let v0s = cfg.floats("v0", &[0.0]);
    let lambdas = cfg.floats("lambda", &[0.05]);
    let t_ends = cfg.floats("t_end", &[50.0]);
    let dts = cfg.floats("dt", &[classical::RK4_DT]);
    let strides = cfg.uints("stride", &[100])?;
    let orders = cfg.uints("order", &[2])?;
    let mut tab = Table::new(&with_meta(&[
        ("m", "input"),
        ("A", "input"),
        ("v0", "input"),
        ("lambda", "input"),
        ("order", "input"),
        ("t", "classical::rk4_oracle"),
        (
            "x_pert",
            "classical::{quartic,sextic,octic}_classical renormalized",
        ),
        ("x_secular", "classical::{quartic,sextic,octic}_classical"),
        ("x_rk4", "classical::rk4_oracle"),
        ("omega_prime", "classical::omega_prime"),
    ]));
    let grid = [
        ms.len(),
        amps.len(),
        v0s.len(),
        lambdas.len(),
        orders.len(),
        t_ends.len(),
        dts.len(),
        strides.len(),
    ];
    for idx in product(&grid) {
        let (m, a, v0, lambda) = (ms[idx[0]], amps[idx[1]], v0s[idx[2]], lambdas[idx[3]]);
        let order = orders[idx[4]];
        let (t_end, dt, stride) = (t_ends[idx[5]], dts[idx[6]], strides[idx[7]] as usize);
        if !matches!(m, 4 | 6 | 8) {
            return Err(CliError::Config(format!(
                "classical m must be 4, 6 or 8, got {m}"
            )));
        }
        if m != 4 && order != 1 && cfg.is_set("order") {
            return Err(CliError::Config(format!(
                "m = {m} series exist to first order only"
            )));
        }
        let order = if m == 4 { order } else { 1 };
        let pert = |t: f64, ren: bool| match m {
            4 => classical::quartic_classical(a, v0, lambda, t, order, ren),
            6 => classical::sextic_classical(a, v0, lambda, t, ren),
            _ => classical::octic_classical(a, v0, lambda, t, ren),
        };
        let mut grid_meta = RowMeta::default();
        let traj: Option<Trajectory> = ok_or_flag(
            classical::rk4_oracle(m, a, v0, lambda, t_end, dt),
            &mut grid_meta,
            "rk4-drift",
        );
        let samples: Vec<(f64, Option<f64>)> = match &traj {
            Some(tr) => tr
                .samples(stride)
                .into_iter()
                .map(|(t, x)| (t, Some(x)))
                .collect(),
            None => {
                let steps = (t_end / dt).round().max(0.0) as usize;
                (0..=steps)
                    .step_by(stride.max(1))
                    .map(|i| (i as f64 * dt, None))
                    .collect()
            }
        };
        let w = if v0 == 0.0 {
            classical::omega_prime(m, a, lambda).ok()
        } else {
            None
        };
        for (t, x_rk4) in samples {
            let mut meta = RowMeta::default();
            meta.flags.extend(grid_meta.flags.iter());
            meta.kind("closed-form");
            if x_rk4.is_some() {
                meta.kind("oracle");
            }
            let x_pert = ok_or_flag(pert(t, true), &mut meta, "unsupported");
            let x_sec = ok_or_flag(pert(t, false), &mut meta, "unsupported");
            let mut row = vec![
                Cell::Int(m as i64),
                Cell::Num(a),
                Cell::Num(v0),
                Cell::Num(lambda),
                Cell::Int(order as i64),
                Cell::Num(t),
                Cell::opt(x_pert),
                Cell::opt(x_sec),
                Cell::opt(x_rk4),
                Cell::opt(w),
            ];
            row.extend(meta.cells());
            tab.push(row);
        }
    }
    Ok(tab)
}
