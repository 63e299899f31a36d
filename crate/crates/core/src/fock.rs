//! Truncated Fock-space numerics.
//!
//! Dense complex matrices on the number basis `|0⟩ … |dim−1⟩`. The ladder
//! commutator necessarily fails on the top level, so invariant checks look at
//! the interior block only.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::combinatorics::ln_factorial;
use crate::error::{Error, Result};

pub type C64 = Complex64;

const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FockMatrix {
    m: DMatrix<C64>,
}

impl FockMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
        }
        Ok(Self { m })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            m: DMatrix::from_fn(dim, dim, f),
        }
    }

    /// Diagonal operator `f(N)` in the number basis.
    pub fn diagonal(dim: usize, mut f: impl FnMut(usize) -> C64) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        for n in 0..dim {
            m[(n, n)] = f(n);
        }
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, v: C64) {
        self.m[(row, col)] = v;
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn dagger(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { m: &self.m * s }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.dim());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Top-left `n × n` block.
    pub fn block(&self, n: usize) -> Self {
        let n = n.min(self.dim());
        Self {
            m: self.m.view((0, 0), (n, n)).into_owned(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                if (self.m[(i, j)] - self.m[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.m.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn spectral_norm(&self) -> f64 {
        self.m
            .clone()
            .singular_values()
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn apply(&self, psi: &FockState) -> Result<DVector<C64>> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), psi.dim()));
        }
        Ok(&self.m * &psi.amp)
    }
}

impl<'a> Add<&'a FockMatrix> for &'a FockMatrix {
    type Output = FockMatrix;
    fn add(self, rhs: &FockMatrix) -> FockMatrix {
        FockMatrix {
            m: &self.m + &rhs.m,
        }
    }
}

impl<'a> Sub<&'a FockMatrix> for &'a FockMatrix {
    type Output = FockMatrix;
    fn sub(self, rhs: &FockMatrix) -> FockMatrix {
        FockMatrix {
            m: &self.m - &rhs.m,
        }
    }
}

impl<'a> Mul<&'a FockMatrix> for &'a FockMatrix {
    type Output = FockMatrix;
    fn mul(self, rhs: &FockMatrix) -> FockMatrix {
        FockMatrix {
            m: &self.m * &rhs.m,
        }
    }
}

/// Annihilation and creation matrices, `⟨n−1|a|n⟩ = √n`.
pub fn ladder_ops(dim: usize) -> Result<(FockMatrix, FockMatrix)> {
    if dim < 2 {
        return Err(Error::InvalidDimension { got: dim, min: 2 });
    }
    let mut a = FockMatrix::zeros(dim);
    for n in 1..dim {
        a.set(n - 1, n, C64::new((n as f64).sqrt(), 0.0));
    }
    let ad = a.dagger();
    Ok((a, ad))
}

/// Normal-ordered monomial `a†^p a^q`. Elements inside the basis are exact.
pub fn monomial(dim: usize, p: u32, q: u32) -> FockMatrix {
    let (p, q) = (p as usize, q as usize);
    let mut m = FockMatrix::zeros(dim);
    for n in q..dim {
        let row = n - q + p;
        if row >= dim {
            break;
        }
        let mut amp = 1.0;
        for k in 0..q {
            amp *= ((n - k) as f64).sqrt();
        }
        for k in 1..=p {
            amp *= ((n - q + k) as f64).sqrt();
        }
        m.set(row, n, C64::new(amp, 0.0));
    }
    m
}

pub fn number_op(dim: usize) -> FockMatrix {
    FockMatrix::diagonal(dim, |n| C64::new(n as f64, 0.0))
}

/// `H₀ = a†a + ½`.
pub fn h0(dim: usize) -> FockMatrix {
    FockMatrix::diagonal(dim, |n| C64::new(n as f64 + 0.5, 0.0))
}

/// Position quadrature `X = (a + a†)/√2`.
pub fn quadrature_x(dim: usize) -> Result<FockMatrix> {
    let (a, ad) = ladder_ops(dim)?;
    Ok((&a + &ad).scale_re(std::f64::consts::FRAC_1_SQRT_2))
}

/// Momentum quadrature `Ẋ = i(a† − a)/√2`.
pub fn quadrature_p(dim: usize) -> Result<FockMatrix> {
    let (a, ad) = ladder_ops(dim)?;
    Ok((&ad - &a).scale(C64::new(0.0, std::f64::consts::FRAC_1_SQRT_2)))
}

/// Normalized state on the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    amp: DVector<C64>,
    tail: f64,
}

impl FockState {
    /// Normalizes the given amplitudes; `tail` records probability mass known
    /// to lie beyond the basis.
    pub fn from_amplitudes(amp: Vec<C64>, tail: f64) -> Result<Self> {
        if amp.is_empty() {
            return Err(Error::InvalidDimension { got: 0, min: 1 });
        }
        let v = DVector::from_vec(amp);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Numerical("state has zero or non-finite norm".into()));
        }
        Ok(Self {
            amp: v / C64::new(norm, 0.0),
            tail,
        })
    }

    pub fn number(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::InvalidDimension {
                got: dim,
                min: n + 1,
            });
        }
        let mut amp = vec![C64::new(0.0, 0.0); dim];
        amp[n] = C64::new(1.0, 0.0);
        Self::from_amplitudes(amp, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn amp(&self, n: usize) -> C64 {
        self.amp[n]
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amp
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.norm_squared()
    }

    /// Largest n with `|amp_n|² > eps`.
    pub fn support_top(&self, eps: f64) -> usize {
        (0..self.dim())
            .rev()
            .find(|&n| self.amp[n].norm_sqr() > eps)
            .unwrap_or(0)
    }

    pub fn evolve(&self, u: &FockMatrix) -> Result<Self> {
        let v = u.apply(self)?;
        Ok(Self {
            amp: v,
            tail: self.tail,
        })
    }
}

/// Poisson tail `Σ_{n ≥ dim} e^{−N₀} N₀ⁿ/n!`, summed directly.
pub fn poisson_tail(n0: f64, dim: usize) -> f64 {
    if n0 == 0.0 {
        return if dim == 0 { 1.0 } else { 0.0 };
    }
    let mut sum = 0.0;
    let mut n = dim;
    loop {
        let ln_w = -n0 + n as f64 * n0.ln() - ln_factorial(n);
        let w = ln_w.exp();
        sum += w;
        if (n as f64) > n0 && w < 1e-30 * sum.max(1e-300) {
            break;
        }
        if n > dim + 100_000 {
            break;
        }
        n += 1;
    }
    sum
}

/// Smallest truncation whose Poisson tail is below `bound`.
pub fn required_dim(n0: f64, bound: f64) -> usize {
    let mut d = 1;
    while poisson_tail(n0, d) > bound {
        d += 1;
    }
    d
}

/// Coherent state `|α⟩`, `α = |α| e^{iθ}`, truncated and renormalized.
pub fn coherent_state(
    alpha_mag: f64,
    theta: f64,
    dim: usize,
    tail_bound: f64,
) -> Result<FockState> {
    if alpha_mag < 0.0 || !alpha_mag.is_finite() {
        return Err(Error::Domain(format!(
            "|alpha| must be finite and >= 0, got {alpha_mag}"
        )));
    }
    if dim < 1 {
        return Err(Error::InvalidDimension { got: dim, min: 1 });
    }
    let n0 = alpha_mag * alpha_mag;
    let tail = poisson_tail(n0, dim);
    if tail > tail_bound {
        return Err(Error::Truncation {
            tail,
            bound: tail_bound,
            required: required_dim(n0, tail_bound),
        });
    }
    let amp = (0..dim)
        .map(|n| {
            if n0 == 0.0 {
                return if n == 0 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
            }
            let ln_mag = -0.5 * n0 + n as f64 * alpha_mag.ln() - 0.5 * ln_factorial(n);
            C64::from_polar(ln_mag.exp(), n as f64 * theta)
        })
        .collect();
    FockState::from_amplitudes(amp, tail)
}

/// `(m, λ, dim)` for one oscillator `H = a†a + ½ + λ′(a† + a)^m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorSpec {
    pub m: u32,
    pub lambda: f64,
    pub dim: usize,
}

impl OscillatorSpec {
    pub fn new(m: u32, lambda: f64, dim: usize) -> Result<Self> {
        if m < 4 || !m.is_multiple_of(2) {
            return Err(Error::InvalidSpec(format!(
                "m must be even and >= 4, got {m}"
            )));
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        if dim < m as usize + 4 {
            return Err(Error::InvalidSpec(format!(
                "dim must be >= m + 4 = {}, got {dim}",
                m + 4
            )));
        }
        Ok(Self { m, lambda, dim })
    }

    /// `λ′ = λ/(m 2^{m/2})`.
    pub fn lambda_prime(&self) -> f64 {
        lambda_prime(self.m, self.lambda)
    }
}

pub fn lambda_prime(m: u32, lambda: f64) -> f64 {
    lambda / (m as f64 * 2f64.powi(m as i32 / 2))
}

/// `max(4⌈|α|²⌉ + 20, m + 16)`.
pub fn default_dim(alpha_mag: f64, m: u32) -> usize {
    let n0 = (alpha_mag * alpha_mag).ceil() as usize;
    (4 * n0 + 20).max(m as usize + 16)
}

/// `H = a†a + ½ + λ′(a† + a)^m` by repeated multiplication.
pub fn hamiltonian(spec: &OscillatorSpec) -> Result<FockMatrix> {
    let (a, ad) = ladder_ops(spec.dim)?;
    let x = &a + &ad;
    let v = x.pow(spec.m).scale_re(spec.lambda_prime());
    Ok(&h0(spec.dim) + &v)
}

/// Cached eigendecomposition of a Hermitian `H` for repeated propagation.
pub struct Propagator {
    energies: Vec<f64>,
    vectors: DMatrix<C64>,
}

impl Propagator {
    pub fn new(h: &FockMatrix) -> Result<Self> {
        if !h.is_hermitian(HERMITIAN_TOL * h.max_abs().max(1.0)) {
            return Err(Error::Contract("Hamiltonian is not Hermitian".into()));
        }
        let (energies, vectors) = if h.is_real(0.0) {
            let re = h.matrix().map(|z| z.re);
            let eig = SymmetricEigen::new(re);
            (
                eig.eigenvalues.iter().cloned().collect::<Vec<_>>(),
                eig.eigenvectors.map(|x| C64::new(x, 0.0)),
            )
        } else {
            let eig = SymmetricEigen::new(h.matrix().clone());
            (
                eig.eigenvalues.iter().cloned().collect::<Vec<_>>(),
                eig.eigenvectors,
            )
        };
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::Numerical(format!(
                "eigendecomposition produced non-finite values (dim {}, max |H| {:.3e})",
                h.dim(),
                h.max_abs()
            )));
        }
        // reconstruction residual doubles as a condition report
        let rebuilt = &vectors
            * DMatrix::from_diagonal(&DVector::from_iterator(
                energies.len(),
                energies.iter().map(|&e| C64::new(e, 0.0)),
            ))
            * vectors.adjoint();
        let resid = (rebuilt - h.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if resid > 1e-8 * h.max_abs().max(1.0) {
            return Err(Error::Numerical(format!(
                "eigendecomposition residual {resid:.3e}"
            )));
        }
        Ok(Self { energies, vectors })
    }

    /// Eigenvalues in ascending order.
    pub fn energies(&self) -> Vec<f64> {
        let mut e = self.energies.clone();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }

    /// `U(t) = e^{−iHt}`.
    pub fn unitary(&self, t: f64) -> FockMatrix {
        let n = self.energies.len();
        let phases = DVector::from_iterator(
            n,
            self.energies.iter().map(|&e| C64::from_polar(1.0, -e * t)),
        );
        let m = &self.vectors * DMatrix::from_diagonal(&phases) * self.vectors.adjoint();
        FockMatrix { m }
    }

    /// `e^{iHt} O e^{−iHt}`.
    pub fn heisenberg(&self, o: &FockMatrix, t: f64) -> Result<FockMatrix> {
        if o.dim() != self.energies.len() {
            return Err(Error::DimensionMismatch(self.energies.len(), o.dim()));
        }
        let u = self.unitary(t);
        Ok(&(&u.dagger() * o) * &u)
    }
}

pub fn heisenberg_exact(h: &FockMatrix, o: &FockMatrix, t: f64) -> Result<FockMatrix> {
    Propagator::new(h)?.heisenberg(o, t)
}

pub fn expectation(o: &FockMatrix, psi: &FockState) -> Result<C64> {
    let v = o.apply(psi)?;
    Ok(psi.amp.dotc(&v))
}

/// `⟨O²⟩ − ⟨O⟩²` for Hermitian `O`.
pub fn variance(o: &FockMatrix, psi: &FockState) -> Result<f64> {
    if !o.is_hermitian(HERMITIAN_TOL * o.max_abs().max(1.0)) {
        return Err(Error::Contract(
            "variance requires a Hermitian operator".into(),
        ));
    }
    let v = o.apply(psi)?;
    let mean = psi.amp.dotc(&v).re;
    Ok(v.norm_squared() - mean * mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn ladder_action_dim3() {
        let (a, ad) = ladder_ops(3).unwrap();
        assert_eq!(a.get(0, 1), c(1.0));
        assert!((a.get(1, 2) - c(2f64.sqrt())).norm() < 1e-15);
        assert_eq!(a.get(0, 0), c(0.0));
        let n = &ad * &a;
        for k in 0..3 {
            assert!((n.get(k, k) - c(k as f64)).norm() < 1e-15);
        }
        assert_eq!(ad, a.dagger());
    }

    #[test]
    fn ladder_rejects_small_dim() {
        assert!(matches!(ladder_ops(1), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn canonical_commutator_interior() {
        let x = quadrature_x(16).unwrap();
        let p = quadrature_p(16).unwrap();
        let comm = x.commutator(&p).block(15);
        let target = FockMatrix::identity(15).scale(C64::new(0.0, 1.0));
        assert!(comm.max_abs_diff(&target) < 1e-12);
    }

    #[test]
    fn coherent_examples() {
        let vac = coherent_state(0.0, 0.3, 8, 1e-12).unwrap();
        assert_eq!(vac.amp(0), c(1.0));
        assert_eq!(vac.amp(3), c(0.0));

        let psi = coherent_state(2.0, 0.0, 40, 1e-12).unwrap();
        let mean = expectation(&number_op(40), &psi).unwrap();
        assert!((mean.re - 4.0).abs() < 1e-10);

        let psi = coherent_state(1.0, FRAC_PI_4, 30, 1e-12).unwrap();
        let ratio = psi.amp(1) / psi.amp(0);
        assert!((ratio - C64::from_polar(1.0, FRAC_PI_4)).norm() < 1e-14);
    }

    #[test]
    fn coherent_truncation_error_reports_dim() {
        match coherent_state(3.0, 0.0, 10, 1e-12) {
            Err(Error::Truncation { required, .. }) => {
                assert!(required > 10);
                assert!(coherent_state(3.0, 0.0, required, 1e-12).is_ok());
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn coherent_is_eigenstate_of_a() {
        let alpha = C64::from_polar(1.5, 0.4);
        let dim = 40;
        let psi = coherent_state(1.5, 0.4, dim, 1e-14).unwrap();
        let (a, _) = ladder_ops(dim).unwrap();
        let av = a.apply(&psi).unwrap();
        let resid = (av - psi.amplitudes() * alpha).norm();
        assert!(resid < 1e-6);
    }

    #[test]
    fn free_hamiltonian_is_diagonal() {
        let spec = OscillatorSpec::new(4, 0.0, 12).unwrap();
        let h = hamiltonian(&spec).unwrap();
        assert!(h.max_abs_diff(&h0(12)) < 1e-15);
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let spec = OscillatorSpec::new(6, 0.3, 30).unwrap();
        assert!(hamiltonian(&spec).unwrap().is_hermitian(1e-12));
    }

    #[test]
    fn spec_validation() {
        assert!(OscillatorSpec::new(3, 0.1, 20).is_err());
        assert!(OscillatorSpec::new(4, -0.1, 20).is_err());
        assert!(OscillatorSpec::new(8, 0.1, 11).is_err());
        assert!(OscillatorSpec::new(8, 0.1, 12).is_ok());
        assert_eq!(default_dim(0.0, 4), 20);
        assert_eq!(default_dim(3.0, 4), 56);
        assert_eq!(default_dim(0.5, 10), 26);
    }

    #[test]
    fn free_heisenberg_a() {
        let dim = 10;
        let (a, _) = ladder_ops(dim).unwrap();
        let h = h0(dim);
        let t = 0.83;
        let at = heisenberg_exact(&h, &a, t).unwrap();
        let expect = a.scale(C64::from_polar(1.0, -t));
        assert!(at.max_abs_diff(&expect) < 1e-12);
        let a0 = heisenberg_exact(&h, &a, 0.0).unwrap();
        assert!(a0.max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn h0_conserved() {
        let spec = OscillatorSpec::new(4, 0.2, 24).unwrap();
        let h = hamiltonian(&spec).unwrap();
        let ht = heisenberg_exact(&h, &h, 1.7).unwrap();
        assert!(ht.max_abs_diff(&h) < 1e-9);
    }

    #[test]
    fn variance_examples() {
        let dim = 48;
        let psi = coherent_state(1.7, 0.6, dim, 1e-14).unwrap();
        let x = quadrature_x(dim).unwrap();
        assert!((variance(&x, &psi).unwrap() - 0.5).abs() < 1e-9);
        let n = number_op(dim);
        assert!((variance(&n, &psi).unwrap() - 1.7 * 1.7).abs() < 1e-9);
        let id = FockMatrix::identity(dim);
        assert!((expectation(&id, &psi).unwrap() - c(1.0)).norm() < 1e-14);
        assert!(variance(&id, &psi).unwrap().abs() < 1e-14);
        let (a, _) = ladder_ops(dim).unwrap();
        assert!(matches!(variance(&a, &psi), Err(Error::Contract(_))));
    }

    #[test]
    fn propagator_rejects_non_hermitian() {
        let (a, _) = ladder_ops(5).unwrap();
        assert!(Propagator::new(&a).is_err());
    }
}
