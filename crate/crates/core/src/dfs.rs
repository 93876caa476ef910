//! Superradiant and subradiant (decoherence-free) states.
//!
//! The collective raising operator `Σ_j α_j σ₊^(j)` couples the excitation
//! sector to the bath only through the superradiant state `ψ₊ ∝ Σ_j r_j |[j]⟩`.
//! Its orthogonal complement inside the sector, spanned by the pair states
//! `ψ₋,jk ∝ r_k |[j]⟩ − r_j |[k]⟩`, is dark.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::numerical_rank;
use crate::sector::{CouplingProfile, SectorState};

/// Residual norm below which a Gram–Schmidt candidate is dropped.
const GS_DROP: f64 = 1e-10;
/// Relative singular-value cutoff for [`dfs_dimension`].
const RANK_TOL: f64 = 1e-9;

fn real_state(v: &[f64]) -> SectorState {
    SectorState::from_real(v).expect("n >= 2 checked by CouplingProfile")
}

/// `ψ₊` with amplitudes `a_j = r_j`.
pub fn superradiant_state(profile: &CouplingProfile) -> SectorState {
    real_state(profile.weights())
}

fn pair_vector(profile: &CouplingProfile, j: usize, k: usize) -> Result<Vec<f64>> {
    let n = profile.n();
    if j >= n || k >= n {
        return Err(Error::InvalidParameter(format!("pair ({j}, {k}) out of range for n={n}")));
    }
    if j == k {
        return Err(Error::InvalidParameter(format!("subradiant pair needs j != k (got {j})")));
    }
    let r = profile.weights();
    let norm = (r[j] * r[j] + r[k] * r[k]).sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "qubits {j} and {k} are both uncoupled; the pair state vanishes"
        )));
    }
    let mut v = vec![0.0; n];
    v[j] = r[k] / norm;
    v[k] = -r[j] / norm;
    Ok(v)
}

/// `ψ₋,jk = (r_k |[j]⟩ − r_j |[k]⟩) / √(r_j² + r_k²)`.
pub fn subradiant_pair(profile: &CouplingProfile, j: usize, k: usize) -> Result<SectorState> {
    pair_vector(profile, j, k).map(|v| real_state(&v))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal real basis of the dark subspace, as plain vectors.
pub(crate) fn subradiant_vectors(profile: &CouplingProfile) -> Vec<Vec<f64>> {
    let n = profile.n();
    let r = profile.weights();

    if n == 3 && r[0] * r[0] + r[1] * r[1] > 0.0 {
        let kappa = r[0] * r[0] + r[1] * r[1];
        let s = kappa.sqrt();
        return vec![
            vec![r[1] / s, -r[0] / s, 0.0],
            vec![r[0] * r[2] / s, r[1] * r[2] / s, -kappa / s],
        ];
    }

    let mut candidates: Vec<Vec<f64>> = (0..n)
        .filter(|&j| r[j] == 0.0)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    for j in 0..n {
        for k in (j + 1)..n {
            if let Ok(v) = pair_vector(profile, j, k) {
                candidates.push(v);
            }
        }
    }

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for mut v in candidates {
        if basis.len() == n - 1 {
            break;
        }
        // Two passes of modified Gram–Schmidt.
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &v);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm < GS_DROP {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        basis.push(v);
    }
    basis
}

/// Orthonormal basis of the `n − 1` dimensional decoherence-free subspace.
///
/// For three qubits with `r₁² + r₂² > 0` this is the pair
/// `ψ₋¹ = (r₂, −r₁, 0)/√κ`, `ψ₋² = (r₁r₃, r₂r₃, −κ)/√κ` with `κ = r₁² + r₂²`.
/// Otherwise uncoupled qubits contribute their `|[j]⟩` directly and the
/// pair states, in lexicographic `(j, k)` order, are orthonormalized.
pub fn subradiant_basis(profile: &CouplingProfile) -> Vec<SectorState> {
    subradiant_vectors(profile).iter().map(|v| real_state(v)).collect()
}

/// Coefficients of a sector state in the `{ψ₊, ψ₋ⁱ}` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DfsDecomposition {
    pub eta_plus: Complex64,
    pub eta_minus: Vec<Complex64>,
}

impl DfsDecomposition {
    /// Weight carried by the dark subspace, `Σ |η₋ⁱ|²`.
    pub fn dark_weight(&self) -> f64 {
        self.eta_minus.iter().map(|e| e.norm_sqr()).sum()
    }

    /// Rebuild the excitation amplitudes `η₊ψ₊ + Σ η₋ⁱ ψ₋ⁱ` (ground part zero).
    pub fn reconstruct(&self, profile: &CouplingProfile) -> Result<SectorState> {
        let basis = subradiant_vectors(profile);
        if basis.len() != self.eta_minus.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len() + 1,
                actual: self.eta_minus.len() + 1,
            });
        }
        let mut a: Vec<Complex64> = profile.weights().iter().map(|&w| self.eta_plus * w).collect();
        for (eta, v) in self.eta_minus.iter().zip(&basis) {
            a.iter_mut().zip(v).for_each(|(x, &y)| *x += eta * y);
        }
        SectorState::excited(a)
    }
}

/// `η₊ = ⟨ψ₊|state⟩` and `η₋ⁱ = ⟨ψ₋ⁱ|state⟩`.
pub fn decompose(state: &SectorState, profile: &CouplingProfile) -> Result<DfsDecomposition> {
    state.check_n(profile.n())?;
    let project = |v: &[f64]| -> Complex64 {
        v.iter().zip(state.amplitudes()).map(|(&w, a)| a * w).sum()
    };
    Ok(DfsDecomposition {
        eta_plus: project(profile.weights()),
        eta_minus: subradiant_vectors(profile).iter().map(|v| project(v)).collect(),
    })
}

/// `|Σ_j α_j a_j|`: the amplitude the collective raising operator transfers to
/// `|g…g⟩` times one bath quantum. Zero for dark states, `α_T` for `ψ₊`.
pub fn verify_dark(state: &SectorState, profile: &CouplingProfile) -> Result<f64> {
    state.check_n(profile.n())?;
    let s: Complex64 = profile
        .alphas()
        .iter()
        .zip(state.amplitudes())
        .map(|(&alpha, a)| a * alpha)
        .sum();
    Ok(s.norm())
}

/// Numerical rank of the stacked pair family `{ψ₋,jk}`.
pub fn dfs_dimension(profile: &CouplingProfile) -> usize {
    let n = profile.n();
    let rows: Vec<Vec<f64>> = (0..n)
        .flat_map(|j| ((j + 1)..n).map(move |k| (j, k)))
        .filter_map(|(j, k)| pair_vector(profile, j, k).ok())
        .collect();
    let m = DMatrix::from_fn(rows.len(), n, |i, c| rows[i][c]);
    numerical_rank(&m, RANK_TOL)
}
