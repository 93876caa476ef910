//! Time evolution in the single-excitation sector and the reduced state.
//!
//! Only the superradiant component of the excitation amplitudes evolves:
//! `a(t) = Φ(t) η₊ r + d`, where `d = (1 − |ψ₊⟩⟨ψ₊|) a(0)` is the dark part.
//! Norm lost from the sector ends up in `|g…g⟩ ⊗ (one bath quantum)`, so the
//! reduced state is `Q |ψ̃⟩⟨ψ̃| + (1 − Q) |g…g⟩⟨g…g|`.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dfs::subradiant_vectors;
use crate::error::{Error, Result};
use crate::linalg::{excitation_index, hermitian_eigenvalues, max_abs_diff, CMatrix};
use crate::propagator::{decay_rate, phi, DecayRate, PropagatorParams};
use crate::sector::{CouplingProfile, SectorState};

/// Normalization slack accepted on input states.
pub const NORM_TOL: f64 = 1e-8;
/// Below this excited weight the pure part of the canonical decomposition is
/// undefined.
pub const Q_FLOOR: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Three-qubit initial family
/// `(√((1+2p)/3), √((1−p)/3) e^{iθ}, √((1−p)/3) e^{iφ})`; `p = 0` is the W
/// state and `p = 1` is `|egg⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialFamily {
    pub p: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
}

pub fn initial_coefficients(family: &InitialFamily) -> Result<SectorState> {
    let InitialFamily { p, theta, phi } = *family;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("separability parameter p={p} outside [0, 1]")));
    }
    let major = ((1.0 + 2.0 * p) / 3.0).sqrt();
    let minor = ((1.0 - p) / 3.0).sqrt();
    SectorState::excited(vec![
        Complex64::new(major, 0.0),
        Complex64::from_polar(minor, theta),
        Complex64::from_polar(minor, phi),
    ])
}

fn check_initial(state: &SectorState) -> Result<()> {
    let deviation = (state.norm_sqr() - 1.0).abs();
    if deviation > NORM_TOL {
        return Err(Error::NotNormalized { deviation });
    }
    let g = state.ground();
    if g.im != 0.0 || g.re < 0.0 {
        return Err(Error::InvalidParameter(
            "initial ground amplitude must be real and non-negative".into(),
        ));
    }
    Ok(())
}

/// Superradiant coefficient `η₊` and the constant dark remainder `d`.
fn split(state: &SectorState, profile: &CouplingProfile) -> (Complex64, Vec<Complex64>) {
    let r = profile.weights();
    let eta_plus: Complex64 = r.iter().zip(state.amplitudes()).map(|(&w, a)| a * w).sum();
    let dark = state
        .amplitudes()
        .iter()
        .zip(r)
        .map(|(a, &w)| a - eta_plus * w)
        .collect();
    (eta_plus, dark)
}

fn with_phi(eta_plus: Complex64, dark: &[Complex64], r: &[f64], phi_t: f64) -> SectorState {
    // Near a zero of one amplitude the two terms cancel; a fused
    // multiply-add keeps that single rounding.
    let a: Vec<Complex64> = dark
        .iter()
        .zip(r)
        .map(|(d, &w)| {
            let c = eta_plus * w;
            Complex64::new(c.re.mul_add(phi_t, d.re), c.im.mul_add(phi_t, d.im))
        })
        .collect();
    let q: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let g = (1.0 - q).max(0.0).sqrt();
    SectorState::new(a, Complex64::new(g, 0.0)).expect("n >= 2")
}

/// Evolve an initial sector state to time `t`. The ground amplitude of the
/// result is the system-side weight `√(1 − Q(t))`.
pub fn evolve(
    state0: &SectorState,
    profile: &CouplingProfile,
    params: &PropagatorParams,
    t: f64,
) -> Result<SectorState> {
    state0.check_n(profile.n())?;
    check_initial(state0)?;
    let (eta_plus, dark) = split(state0, profile);
    Ok(with_phi(eta_plus, &dark, profile.weights(), phi(t, params)))
}

/// Evolution with the survival amplitude supplied directly.
pub fn evolve_to_phi(
    state0: &SectorState,
    profile: &CouplingProfile,
    phi_t: f64,
) -> Result<SectorState> {
    state0.check_n(profile.n())?;
    check_initial(state0)?;
    let (eta_plus, dark) = split(state0, profile);
    Ok(with_phi(eta_plus, &dark, profile.weights(), phi_t))
}

/// Reduced `2ⁿ × 2ⁿ` state of the qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn from_matrix(n: usize, matrix: CMatrix) -> Result<Self> {
        let dim = 1usize << n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: matrix.nrows() });
        }
        Ok(Self { n, matrix })
    }

    /// `|v⟩⟨v|` for a full `2ⁿ` state vector.
    pub fn pure(n: usize, v: &[Complex64]) -> Result<Self> {
        let dim = 1usize << n;
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: v.len() });
        }
        Ok(Self { n, matrix: CMatrix::from_fn(dim, dim, |i, j| v[i] * v[j].conj()) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        max_abs_diff(&self.matrix, &self.matrix.adjoint())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Reduced state of qubit `j`.
    pub fn reduced_qubit(&self, j: usize) -> Result<Matrix2<Complex64>> {
        if j >= self.n {
            return Err(Error::InvalidParameter(format!("qubit {j} out of range for n={}", self.n)));
        }
        let mask = 1usize << (self.n - 1 - j);
        let mut out = Matrix2::zeros();
        for i in 0..self.dim() {
            for k in 0..self.dim() {
                if (i & !mask) == (k & !mask) {
                    let a = usize::from(i & mask != 0);
                    let b = usize::from(k & mask != 0);
                    out[(a, b)] += self.matrix[(i, k)];
                }
            }
        }
        Ok(out)
    }
}

/// Reduced state with the single-excitation block `a a†` on `{|[j]⟩}`, weight
/// `1 − Q` on `|g…g⟩` and no sector/ground coherence.
pub fn density_matrix(state: &SectorState) -> Result<DensityMatrix> {
    let deviation = (state.norm_sqr() - 1.0).abs();
    if deviation > NORM_TOL {
        return Err(Error::NotNormalized { deviation });
    }
    let n = state.n();
    if n > 12 {
        return Err(Error::UnsupportedQubitCount(n));
    }
    let dim = 1usize << n;
    let a = state.amplitudes();
    let mut m = CMatrix::zeros(dim, dim);
    for (j, aj) in a.iter().enumerate() {
        for (k, ak) in a.iter().enumerate() {
            m[(excitation_index(n, j), excitation_index(n, k))] = aj * ak.conj();
        }
    }
    m[(0, 0)] = Complex64::new(1.0 - state.excited_weight(), 0.0);
    Ok(DensityMatrix { n, matrix: m })
}

/// `ρ = Q |ψ̃⟩⟨ψ̃| + (1 − Q) |g…g⟩⟨g…g|`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalParts {
    pub q: f64,
    /// `a / √Q`; `None` when `Q` is below [`Q_FLOOR`].
    pub pure_part: Option<SectorState>,
    pub ground_weight: f64,
}

pub fn canonical_decomposition(state: &SectorState) -> CanonicalParts {
    let q = state.excited_weight();
    let pure_part = (q >= Q_FLOOR).then(|| {
        let s = q.sqrt();
        SectorState::excited(state.amplitudes().iter().map(|a| a / s).collect())
            .expect("n >= 2")
    });
    CanonicalParts { q, pure_part, ground_weight: 1.0 - q }
}

/// Kraus pair of the amplitude-damping map on `span{ψ₊, |g…g⟩}` (in that
/// order): `E₀ = diag(Φ, 1)`, `E₁ = √(1 − Φ²) |g⟩⟨ψ₊|`.
pub fn kraus_operators(phi_t: f64) -> [Matrix2<Complex64>; 2] {
    let c = Complex64::new(phi_t, 0.0);
    let s = Complex64::new((1.0 - phi_t * phi_t).max(0.0).sqrt(), 0.0);
    [Matrix2::new(c, ZERO, ZERO, ONE), Matrix2::new(ZERO, ZERO, s, ZERO)]
}

/// Largest entry of `E₀†E₀ + E₁†E₁ − 1`.
pub fn kraus_completeness_residual(params: &PropagatorParams, t: f64) -> f64 {
    let [e0, e1] = kraus_operators(phi(t, params));
    let sum = e0.adjoint() * e0 + e1.adjoint() * e1 - Matrix2::identity();
    sum.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn kraus_apply(
    rho2: &Matrix2<Complex64>,
    params: &PropagatorParams,
    t: f64,
) -> Matrix2<Complex64> {
    let [e0, e1] = kraus_operators(phi(t, params));
    e0 * rho2 * e0.adjoint() + e1 * rho2 * e1.adjoint()
}

/// Build `ρ(t)` directly and through the block channel `ℰ₊₀ ⊕ 𝟙` in the
/// `{ψ₊, ψ₋ⁱ, |g…g⟩}` basis; returns the largest entry difference.
pub fn full_channel_consistency(
    state0: &SectorState,
    profile: &CouplingProfile,
    params: &PropagatorParams,
    t: f64,
) -> Result<f64> {
    let n = profile.n();
    let direct = density_matrix(&evolve(state0, profile, params, t)?)?;

    // Orthonormal frame of sector ⊕ ground: columns ψ₊, ψ₋¹…ψ₋ⁿ⁻¹, |g⟩.
    let dim = n + 1;
    let dark = subradiant_vectors(profile);
    let mut frame = CMatrix::zeros(dim, dim);
    for (j, &w) in profile.weights().iter().enumerate() {
        frame[(j, 0)] = Complex64::new(w, 0.0);
    }
    for (c, v) in dark.iter().enumerate() {
        for (j, &x) in v.iter().enumerate() {
            frame[(j, c + 1)] = Complex64::new(x, 0.0);
        }
    }
    frame[(n, n)] = ONE;

    let a = state0.amplitudes();
    let mut rho_s = CMatrix::zeros(dim, dim);
    for j in 0..n {
        for k in 0..n {
            rho_s[(j, k)] = a[j] * a[k].conj();
        }
    }
    rho_s[(n, n)] = Complex64::new(1.0 - state0.excited_weight(), 0.0);

    let mut m = frame.adjoint() * &rho_s * &frame;
    let phi_t = phi(t, params);
    let block = Matrix2::new(m[(0, 0)], m[(0, n)], m[(n, 0)], m[(n, n)]);
    let out = kraus_apply(&block, params, t);
    m[(0, 0)] = out[(0, 0)];
    m[(0, n)] = out[(0, 1)];
    m[(n, 0)] = out[(1, 0)];
    m[(n, n)] = out[(1, 1)];
    for i in 1..n {
        m[(0, i)] *= phi_t;
        m[(i, 0)] *= phi_t;
    }
    let rho_t = &frame * m * frame.adjoint();

    let full = 1usize << n;
    let embed = |i: usize| if i == n { 0 } else { excitation_index(n, i) };
    let mut block_path = CMatrix::zeros(full, full);
    for i in 0..dim {
        for k in 0..dim {
            block_path[(embed(i), embed(k))] = rho_t[(i, k)];
        }
    }
    Ok(max_abs_diff(direct.matrix(), &block_path))
}

/// Closed-form trajectory sampled on a time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SectorState>,
    pub q: Vec<f64>,
    pub phi: Vec<f64>,
    pub decay_rate: Vec<DecayRate>,
}

/// Evaluate the closed form at each time; points are independent and are
/// computed in parallel, assembled in grid order.
pub fn trajectory(
    state0: &SectorState,
    profile: &CouplingProfile,
    params: &PropagatorParams,
    times: &[f64],
) -> Result<Trajectory> {
    state0.check_n(profile.n())?;
    check_initial(state0)?;
    let (eta_plus, dark) = split(state0, profile);
    let r = profile.weights();
    let points: Vec<(SectorState, f64, DecayRate)> = times
        .par_iter()
        .map(|&t| {
            let p = phi(t, params);
            (with_phi(eta_plus, &dark, r, p), p, decay_rate(t, params))
        })
        .collect();
    let mut traj = Trajectory {
        times: times.to_vec(),
        states: Vec::with_capacity(times.len()),
        q: Vec::with_capacity(times.len()),
        phi: Vec::with_capacity(times.len()),
        decay_rate: Vec::with_capacity(times.len()),
    };
    for (s, p, g) in points {
        traj.q.push(s.excited_weight());
        traj.states.push(s);
        traj.phi.push(p);
        traj.decay_rate.push(g);
    }
    Ok(traj)
}
