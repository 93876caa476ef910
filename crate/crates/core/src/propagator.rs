//! Superradiant survival amplitude and bath memory kernel.
//!
//! For a Lorentzian spectral density of width `γ` the superradiant amplitude
//! obeys `c̈₊ + γ ċ₊ + r² c₊ = 0` with `c₊(0) = 1`, `ċ₊(0) = 0`, where
//! `r = √λ · α_T`. Its solution
//!
//! ```text
//! Φ(t) = e^{-γt/2} [cosh(Ωt/2) + (γ/Ω) sinh(Ωt/2)],   Ω² = γ² − 4r²
//! ```
//!
//! is over-damped for `2r < γ` (bad cavity), critically damped at `2r = γ`
//! and oscillatory for `2r > γ` (good cavity).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this magnitude `Φ(t)` is treated as a zero and the time-local rate
/// is reported as a pole.
pub const EPS_POLE: f64 = 1e-9;

/// `|Ω| t` below which the second-order series around `Ω = 0` is used.
const SERIES_CUTOFF: f64 = 1e-6;

/// Lorentzian bath `J(ω) = (1/π) λγ / ((ω − ω₀)² + γ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    lambda: f64,
    gamma: f64,
    omega0: f64,
}

impl BathSpec {
    pub fn new(lambda: f64, gamma: f64, omega0: f64) -> Result<Self> {
        if !(lambda.is_finite() && gamma.is_finite() && omega0.is_finite()) {
            return Err(Error::InvalidParameter("bath parameters must be finite".into()));
        }
        if lambda < 0.0 || gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "bath requires lambda >= 0 and gamma >= 0 (got lambda={lambda}, gamma={gamma})"
            )));
        }
        if lambda == 0.0 && gamma == 0.0 {
            return Err(Error::InvalidParameter("lambda and gamma cannot both be zero".into()));
        }
        Ok(Self { lambda, gamma, omega0 })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Spectral density at frequency `omega`. Not defined for `γ = 0`, where
    /// the density collapses to `λ δ(ω − ω₀)`; returns 0 off resonance there.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        if self.gamma == 0.0 {
            return 0.0;
        }
        let d = omega - self.omega0;
        self.lambda * self.gamma / (std::f64::consts::PI * (d * d + self.gamma * self.gamma))
    }

    /// Effective collective rate `r = √λ · α_T`.
    pub fn collective_rate(&self, alpha_total: f64) -> f64 {
        self.lambda.sqrt() * alpha_total
    }
}

/// Bath memory kernel `f(τ) = λ e^{-γτ}` for resonant qubits.
pub fn correlation(tau: f64, bath: &BathSpec) -> f64 {
    if bath.gamma == 0.0 {
        return bath.lambda;
    }
    bath.lambda * (-bath.gamma * tau.abs()).exp()
}

/// Parameters of the closed-form propagator: spectral width `γ` and
/// collective rate `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagatorParams {
    gamma: f64,
    r: f64,
}

impl PropagatorParams {
    pub fn new(gamma: f64, r: f64) -> Result<Self> {
        if !(gamma.is_finite() && r.is_finite()) || gamma < 0.0 || r < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "propagator requires finite gamma >= 0 and r >= 0 (got gamma={gamma}, r={r})"
            )));
        }
        Ok(Self { gamma, r })
    }

    /// Dimensionless parameterisation with `γ = 1` and `r = R`.
    pub fn from_ratio(ratio: f64) -> Result<Self> {
        Self::new(1.0, ratio)
    }

    pub fn from_bath(bath: &BathSpec, alpha_total: f64) -> Result<Self> {
        Self::new(bath.gamma, bath.collective_rate(alpha_total))
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `Ω² = γ² − 4r²`, exact as computed.
    pub fn omega_squared(&self) -> f64 {
        self.gamma * self.gamma - 4.0 * self.r * self.r
    }

    /// `Ω`, imaginary in the good cavity.
    pub fn omega(&self) -> Complex64 {
        Complex64::new(self.omega_squared(), 0.0).sqrt()
    }

    /// `R = r/γ`; `None` for `γ = 0`.
    pub fn ratio(&self) -> Option<f64> {
        (self.gamma > 0.0).then(|| self.r / self.gamma)
    }

    /// Markov-limit amplitude rate `r²/γ` (so that `Φ ≈ e^{-rate·t}`).
    pub fn markov_rate(&self) -> Option<f64> {
        (self.gamma > 0.0).then(|| self.r * self.r / self.gamma)
    }

    /// Slow eigenrate `γ − Ω` of the over-damped regime; this is the
    /// long-time limit of [`decay_rate`]. `None` unless `2r ≤ γ`.
    pub fn slow_rate(&self) -> Option<f64> {
        let w2 = self.omega_squared();
        (w2 >= 0.0).then(|| self.gamma - w2.sqrt())
    }

    pub fn is_overdamped(&self) -> bool {
        self.omega_squared() >= 0.0
    }
}

/// `Φ(t)` and `Φ̇(t)` multiplied by `e^{-shift}` so that both stay
/// representable at large `t`. The true values are `(phi, dphi) · e^{shift}`.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    phi: f64,
    dphi: f64,
    shift: f64,
}

fn scaled(gamma: f64, r: f64, omega_sq: f64, t: f64) -> Scaled {
    let half_t = 0.5 * t;
    // x² = Ω² t² / 4 is real on both sides of the critical point.
    let x_sq = omega_sq * half_t * half_t;
    if omega_sq.abs().sqrt() * t < SERIES_CUTOFF {
        let phi = 1.0 + gamma * half_t + 0.5 * x_sq + gamma * half_t * x_sq / 6.0;
        let dphi = -r * r * t * (1.0 + x_sq / 6.0);
        return Scaled { phi, dphi, shift: -gamma * half_t };
    }
    if omega_sq > 0.0 {
        // cosh x + g sinh x = eˣ [g(1 − e^{-2x}) + 1 + e^{-2x}] / 2, and the
        // combined exponent x − γt/2 = −2r²t/(γ + Ω) is formed without
        // cancellation, so Φ keeps full relative accuracy at long times.
        let omega = omega_sq.sqrt();
        let x = omega * half_t;
        let one_minus_u = -(-2.0 * x).exp_m1();
        let u = 1.0 - one_minus_u;
        let phi = 0.5 * ((gamma / omega) * one_minus_u + 1.0 + u);
        let dphi = -(r * r / omega) * one_minus_u;
        Scaled { phi, dphi, shift: -2.0 * r * r * t / (gamma + omega) }
    } else {
        let w = (-omega_sq).sqrt();
        let x = w * half_t;
        let (s, c) = x.sin_cos();
        let phi = c + (gamma / w) * s;
        let dphi = -(2.0 * r * r / w) * s;
        Scaled { phi, dphi, shift: -gamma * half_t }
    }
}

fn phi_from(gamma: f64, r: f64, omega_sq: f64, t: f64) -> f64 {
    let s = scaled(gamma, r, omega_sq, t);
    s.phi * s.shift.exp()
}

/// Superradiant survival amplitude `Φ(t)`.
pub fn phi(t: f64, params: &PropagatorParams) -> f64 {
    debug_assert!(t >= 0.0, "phi evaluated at negative time {t}");
    phi_from(params.gamma, params.r, params.omega_squared(), t)
}

/// Time derivative `Φ̇(t) = -(2r²/Ω) e^{-γt/2} sinh(Ωt/2)`.
pub fn phi_dot(t: f64, params: &PropagatorParams) -> f64 {
    let s = scaled(params.gamma, params.r, params.omega_squared(), t);
    s.dphi * s.shift.exp()
}

/// Markov-limit amplitude `e^{-(r²/γ) t}`.
pub fn phi_markov(t: f64, params: &PropagatorParams) -> Result<f64> {
    let rate = params
        .markov_rate()
        .ok_or_else(|| Error::InvalidParameter("Markov limit requires gamma > 0".into()))?;
    Ok((-rate * t).exp())
}

/// Time-local rate of the collective amplitude-damping master equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayRate {
    Finite(f64),
    /// `Φ(t)` is (numerically) zero; the rate diverges.
    Pole,
}

impl DecayRate {
    pub fn value(self) -> Option<f64> {
        match self {
            DecayRate::Finite(v) => Some(v),
            DecayRate::Pole => None,
        }
    }
}

/// `Γ(t) = −2 Φ̇(t)/Φ(t)` from the analytic derivative.
///
/// In the over-damped regime `Φ > 0` for all `t`, so the ratio is evaluated
/// on the rescaled pair and never reports a pole; its long-time limit is
/// [`PropagatorParams::slow_rate`].
pub fn decay_rate(t: f64, params: &PropagatorParams) -> DecayRate {
    let s = scaled(params.gamma, params.r, params.omega_squared(), t);
    if params.is_overdamped() {
        return DecayRate::Finite(-2.0 * s.dphi / s.phi);
    }
    let phi = s.phi * s.shift.exp();
    if phi.abs() < EPS_POLE {
        return DecayRate::Pole;
    }
    DecayRate::Finite(-2.0 * s.dphi / s.phi)
}

/// Amplitude rate `−Φ̇/Φ`, half of [`decay_rate`]; tends to `r²/γ` in the
/// Markov limit.
pub fn amplitude_rate(t: f64, params: &PropagatorParams) -> DecayRate {
    match decay_rate(t, params) {
        DecayRate::Finite(v) => DecayRate::Finite(0.5 * v),
        DecayRate::Pole => DecayRate::Pole,
    }
}

/// CP-divisibility of the collective amplitude-damping map, i.e. `Γ(t) ≥ 0`
/// for all `t`. Holds exactly when `Φ` never changes sign, i.e. `2r ≤ γ`.
pub fn is_cp_divisible(params: &PropagatorParams) -> bool {
    2.0 * params.r <= params.gamma
}

/// First positive zero of `Φ`, which exists only in the good cavity.
pub fn first_phi_zero(params: &PropagatorParams) -> Option<f64> {
    let w2 = params.omega_squared();
    if w2 >= 0.0 {
        return None;
    }
    let w = (-w2).sqrt();
    // cos x + (γ/w) sin x = 0 with x = wt/2 in (π/2, π].
    let x = std::f64::consts::PI - w.atan2(params.gamma);
    Some(2.0 * x / w)
}
