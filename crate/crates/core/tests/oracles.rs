//! Cross-module checks: each closed form against an independently built oracle.

use aho_core::fock::{coherent_state, expectation, hamiltonian, quadrature_x, Propagator};
use aho_core::geometry::{aa_phase_general, aa_phase_number_poly, InputStatistics};
use aho_core::ordering::normal_order_power;
use aho_core::spectra::{first_order_energy, freq_operator_first};
use aho_core::{FockMatrix, OscillatorSpec, C64};
use num_traits::ToPrimitive;

#[test]
fn rendered_ordering_equals_quadrature_power() {
    // (a† + a)^m = (√2 X)^m, away from the truncation edge
    let dim = 40;
    let x = quadrature_x(dim).unwrap().scale_re(2f64.sqrt());
    for m in [2u32, 4, 6] {
        let direct = x.pow(m).block(dim - m as usize);
        let rendered = normal_order_power(m).render(dim).block(dim - m as usize);
        assert!(
            direct.max_abs_diff(&rendered) < 1e-9 * direct.max_abs(),
            "m={m}"
        );
    }
}

#[test]
fn first_order_energies_from_diagonalization() {
    for m in [4u32, 6] {
        let (lambda, dim) = (1e-4, 64);
        let e =
            Propagator::new(&hamiltonian(&OscillatorSpec::new(m, lambda, dim).unwrap()).unwrap())
                .unwrap()
                .energies();
        for n in 0..4u64 {
            let (e0, e1) = first_order_energy(m, n).unwrap();
            let approx = e0.to_f64().unwrap() + lambda * e1.to_f64().unwrap();
            assert!(
                (e[n as usize] - approx).abs() < 1e3 * lambda * lambda,
                "m={m} n={n}"
            );
        }
    }
}

#[test]
fn frequency_operator_is_first_order_spacing() {
    let w = freq_operator_first(6).unwrap();
    for n in 0..5u64 {
        let (_, a) = first_order_energy(6, n).unwrap();
        let (_, b) = first_order_energy(6, n + 1).unwrap();
        assert_eq!(w.eval_level(n as i64), b - a);
    }
}

#[test]
fn free_evolution_of_coherent_quadrature() {
    let dim = 40;
    let spec = OscillatorSpec::new(4, 0.0, dim).unwrap();
    let p = Propagator::new(&hamiltonian(&spec).unwrap()).unwrap();
    let psi = coherent_state(1.5, 0.4, dim, 1e-12).unwrap();
    let xt = p.heisenberg(&quadrature_x(dim).unwrap(), 0.9).unwrap();
    let got = expectation(&xt, &psi).unwrap();
    let want = 2f64.sqrt() * 1.5 * (0.4f64 - 0.9).cos();
    assert!((got - C64::new(want, 0.0)).norm() < 1e-9);
}

#[test]
fn geometric_routes_agree_on_number_diagonal() {
    let stats = InputStatistics::negative_binomial(3, 0.4)
        .unwrap()
        .with_phase(0.7);
    let poly = [0.5, -1.0, 2.0];
    let f = FockMatrix::diagonal(stats.dim(), |n| {
        C64::new(poly[0] + poly[1] * n as f64 + poly[2] * (n * n) as f64, 0.0)
    });
    let a = aa_phase_general(&stats, 0.1, &f).unwrap();
    let b = aa_phase_number_poly(&stats, 0.1, &poly).unwrap();
    assert!((a - b).abs() < 1e-9 * a.abs());
}
