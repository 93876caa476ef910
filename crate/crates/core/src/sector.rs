//! Coupling profiles and single-excitation states.
//!
//! Qubits are indexed from 0. `|[j]⟩` is the basis state with qubit `j`
//! excited and every other qubit in `|g⟩`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the normalization of coupling weights.
const WEIGHT_TOL: f64 = 1e-12;

/// Real, non-negative qubit-bath couplings `α_j` with `α_T = √(Σ α_j²)` and
/// normalized weights `r_j = α_j / α_T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CouplingProfile {
    alphas: Vec<f64>,
    weights: Vec<f64>,
    alpha_total: f64,
}

impl CouplingProfile {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "coupling profile needs at least 2 qubits, got {}",
                alphas.len()
            )));
        }
        if alphas.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidParameter(
                "couplings must be finite and non-negative".into(),
            ));
        }
        let alpha_total = alphas.iter().map(|a| a * a).sum::<f64>().sqrt();
        if alpha_total <= 0.0 {
            return Err(Error::InvalidParameter("at least one coupling must be positive".into()));
        }
        let weights = alphas.iter().map(|a| a / alpha_total).collect();
        Ok(Self { alphas, weights, alpha_total })
    }

    /// Uniform coupling `α_j = 1` on `n` qubits.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    /// Three-qubit profile from `(r₁, r₂)` with `r₃ = √(1 − r₁² − r₂²)`.
    pub fn from_r12(r1: f64, r2: f64) -> Result<Self> {
        let rest = 1.0 - r1 * r1 - r2 * r2;
        if r1 < 0.0 || r2 < 0.0 || rest < -WEIGHT_TOL {
            return Err(Error::InvalidParameter(format!(
                "(r1, r2) = ({r1}, {r2}) is outside the quarter disc r1² + r2² ≤ 1"
            )));
        }
        Self::new(vec![r1, r2, rest.max(0.0).sqrt()])
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn alpha_total(&self) -> f64 {
        self.alpha_total
    }
}

impl TryFrom<Vec<f64>> for CouplingProfile {
    type Error = Error;

    fn try_from(alphas: Vec<f64>) -> Result<Self> {
        Self::new(alphas)
    }
}

impl From<CouplingProfile> for Vec<f64> {
    fn from(p: CouplingProfile) -> Self {
        p.alphas
    }
}

/// Pure state of the qubits restricted to zero and one excitation:
/// `Σ_j a_j |[j]⟩ + g0 |g…g⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    amplitudes: Vec<Complex64>,
    ground: Complex64,
}

impl SectorState {
    pub fn new(amplitudes: Vec<Complex64>, ground: Complex64) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::UnsupportedQubitCount(amplitudes.len()));
        }
        if amplitudes.iter().chain(std::iter::once(&ground)).any(|z| !z.is_finite()) {
            return Err(Error::InvalidParameter("amplitudes must be finite".into()));
        }
        Ok(Self { amplitudes, ground })
    }

    /// Excitation-sector state with no ground component.
    pub fn excited(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::new(amplitudes, Complex64::new(0.0, 0.0))
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::excited(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// `|[j]⟩` on `n` qubits.
    pub fn basis(n: usize, j: usize) -> Result<Self> {
        if j >= n {
            return Err(Error::InvalidParameter(format!("qubit index {j} out of range for n={n}")));
        }
        let mut a = vec![Complex64::new(0.0, 0.0); n];
        a[j] = Complex64::new(1.0, 0.0);
        Self::excited(a)
    }

    /// `|g…g⟩` on `n` qubits.
    pub fn ground_state(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n], Complex64::new(1.0, 0.0))
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn ground(&self) -> Complex64 {
        self.ground
    }

    /// Excited-sector weight `Q = Σ |a_j|²`.
    pub fn excited_weight(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.excited_weight() + self.ground.norm_sqr()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// Sector inner product `⟨self|other⟩` over the excitation amplitudes.
    pub fn overlap(&self, other: &SectorState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub(crate) fn check_n(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: self.n() });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_are_normalized() {
        let p = CouplingProfile::new(vec![1.0, 2.0, 2.0]).unwrap();
        assert_eq!(p.alpha_total(), 3.0);
        assert_eq!(p.weights(), &[1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0]);
        let s: f64 = p.weights().iter().map(|w| w * w).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn profile_validation() {
        assert!(CouplingProfile::new(vec![1.0]).is_err());
        assert!(CouplingProfile::new(vec![0.0, 0.0]).is_err());
        assert!(CouplingProfile::new(vec![1.0, -0.1]).is_err());
        assert!(CouplingProfile::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(CouplingProfile::from_r12(0.9, 0.9).is_err());
        assert!(CouplingProfile::from_r12(1.0, 0.0).is_ok());
    }

    #[test]
    fn r12_completion() {
        let p = CouplingProfile::from_r12(0.53, 0.6).unwrap();
        assert!((p.weights()[2] - 0.599_249_530_663).abs() < 1e-11);
    }

    #[test]
    fn profile_serde_goes_through_validation() {
        let p: CouplingProfile = serde_json::from_str("[1.0, 1.0, 1.0]").unwrap();
        assert_eq!(p.n(), 3);
        assert!(serde_json::from_str::<CouplingProfile>("[0.0, 0.0]").is_err());
    }

    #[test]
    fn state_weights() {
        let s = SectorState::new(
            vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.0)],
            Complex64::new(0.8, 0.0),
        )
        .unwrap();
        assert!((s.excited_weight() - 0.36).abs() < 1e-15);
        assert!(s.is_normalized(1e-12));
        assert!(SectorState::basis(3, 3).is_err());
        assert!(SectorState::from_real(&[1.0]).is_err());
    }
}
