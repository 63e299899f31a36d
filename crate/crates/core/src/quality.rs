//! Row-level quality flags. Numerical trouble is reported, never raised.

/// The perturbative solutions carry secular terms; beyond this `λt` they are
/// reported but flagged.
pub const SECULAR_LAMBDA_T: f64 = 0.3;

/// Heuristic edge of the perturbative regime for `λ n^{m/2 − 1}`.
pub const LAMBDA_WINDOW: f64 = 0.1;

pub fn secular_window_exceeded(lambda: f64, t: f64) -> bool {
    (lambda * t).abs() > SECULAR_LAMBDA_T
}

/// True when `λ · n_max^{m/2 − 1}` leaves the perturbative window.
pub fn lambda_window_exceeded(m: u32, lambda: f64, n_max: f64) -> bool {
    let e = (m as i32) / 2 - 1;
    lambda.abs() * n_max.max(1.0).powi(e) > LAMBDA_WINDOW
}

/// A value that may sit on a pole (for instance `1/cos²(t − θ)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaybePole {
    Finite(f64),
    Pole,
}

impl MaybePole {
    pub fn value(self) -> Option<f64> {
        match self {
            MaybePole::Finite(v) => Some(v),
            MaybePole::Pole => None,
        }
    }

    pub fn is_pole(self) -> bool {
        matches!(self, MaybePole::Pole)
    }
}
