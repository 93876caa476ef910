//! Negativity, the tripartite negativity bound and biseparability times.
//!
//! States reached by the dynamics have the form
//! `ρ = Q |ψ̃⟩⟨ψ̃| + (1 − Q) |g…g⟩⟨g…g|` with `ψ̃` a normalized
//! single-excitation state. For such a pure `ψ̃` the reduced state of qubit
//! `j` is `diag(1 − μ_j, μ_j)` with `μ_j = |ã_j|²`, so the one-vs-rest
//! negativity is `√(μ_j (1 − μ_j))`. The genuine tripartite quantity
//! reported is the upper bound `N*_CR = Q · N₍₃₎(ψ̃)` on the convex-roof
//! extended negativity; the convex roof itself is not minimized.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{evolve_to_phi, DensityMatrix, NORM_TOL, Q_FLOOR};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, qubit_mask, CMatrix};
use crate::propagator::{first_phi_zero, phi, PropagatorParams};
use crate::sector::{CouplingProfile, SectorState};

/// `N*_CR` at or below this value counts as zero for biseparability.
pub const EPS_BISEP: f64 = 1e-9;
/// Reduced-state impurity `1 − Tr ρ_j²` at or below this confirms that qubit
/// `j` has factored out.
pub const PURITY_TOL: f64 = 1e-8;
/// Agreement demanded between the trace-norm and negative-eigenvalue forms.
const NEGATIVITY_AGREEMENT: f64 = 1e-10;

fn subset_mask(n: usize, subset: &[usize]) -> Result<usize> {
    if subset.is_empty() {
        return Err(Error::InvalidParameter("partial transpose over an empty subset".into()));
    }
    let mut mask = 0usize;
    for &q in subset {
        if q >= n {
            return Err(Error::InvalidParameter(format!("qubit {q} out of range for n={n}")));
        }
        mask |= qubit_mask(n, q);
    }
    if mask.count_ones() as usize == n {
        return Err(Error::InvalidParameter("partial transpose over every qubit".into()));
    }
    Ok(mask)
}

/// Partial transpose over the qubits in `subset` (0-based).
pub fn partial_transpose(rho: &DensityMatrix, subset: &[usize]) -> Result<CMatrix> {
    let mask = subset_mask(rho.n(), subset)?;
    let m = rho.matrix();
    let dim = rho.dim();
    Ok(CMatrix::from_fn(dim, dim, |i, k| {
        let i2 = (i & !mask) | (k & mask);
        let k2 = (k & !mask) | (i & mask);
        m[(i2, k2)]
    }))
}

/// Both evaluations of the negativity of a bipartition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativityParts {
    /// `(‖ρ^T‖₁ − 1) / 2`
    pub from_trace_norm: f64,
    /// `Σ |λ_−|` over negative eigenvalues of `ρ^T`
    pub from_negative_eigenvalues: f64,
}

pub fn negativity_parts(rho: &DensityMatrix, subset: &[usize]) -> Result<NegativityParts> {
    let pt = partial_transpose(rho, subset)?;
    let ev = hermitian_eigenvalues(&pt);
    let trace_norm: f64 = ev.iter().map(|v| v.abs()).sum();
    let trace = rho.trace().re;
    Ok(NegativityParts {
        from_trace_norm: (trace_norm - trace) / 2.0,
        from_negative_eigenvalues: ev.iter().filter(|&&v| v < 0.0).map(|v| -v).sum(),
    })
}

/// Negativity of `ρ` across `subset : rest`.
pub fn negativity(rho: &DensityMatrix, subset: &[usize]) -> Result<f64> {
    let parts = negativity_parts(rho, subset)?;
    let gap = (parts.from_trace_norm - parts.from_negative_eigenvalues).abs();
    if gap > NEGATIVITY_AGREEMENT {
        return Err(Error::Numerical(format!(
            "negativity forms disagree by {gap:.3e}; is the trace 1?"
        )));
    }
    Ok(parts.from_negative_eigenvalues.max(0.0))
}

fn excitation_fractions(state: &SectorState) -> Result<Vec<f64>> {
    let q = state.excited_weight();
    if q < Q_FLOOR {
        return Err(Error::InvalidParameter("state has no excitation-sector component".into()));
    }
    Ok(state.amplitudes().iter().map(|a| a.norm_sqr() / q).collect())
}

/// `√(μ_j (1 − μ_j))` for the normalized excitation part of `state`.
pub fn pure_sector_negativity(state: &SectorState, j: usize) -> Result<f64> {
    let mu = excitation_fractions(state)?;
    let m = *mu
        .get(j)
        .ok_or_else(|| Error::InvalidParameter(format!("qubit {j} out of range for n={}", mu.len())))?;
    Ok((m * (1.0 - m)).max(0.0).sqrt())
}

/// One-vs-rest negativities of the normalized excitation part.
pub fn pure_sector_negativities(state: &SectorState) -> Result<Vec<f64>> {
    Ok(excitation_fractions(state)?
        .into_iter()
        .map(|m| (m * (1.0 - m)).max(0.0).sqrt())
        .collect())
}

/// Impurity `1 − Tr ρ_j² = 2 μ_j (1 − μ_j)` of each qubit in the normalized
/// excitation part.
pub fn reduced_impurities(state: &SectorState) -> Result<Vec<f64>> {
    Ok(excitation_fractions(state)?.into_iter().map(|m| 2.0 * m * (1.0 - m)).collect())
}

fn geometric_mean3(n: &[f64]) -> f64 {
    let prod: f64 = n.iter().product();
    if prod <= 0.0 {
        0.0
    } else {
        prod.cbrt()
    }
}

fn require_three(state: &SectorState) -> Result<()> {
    if state.n() != 3 {
        return Err(Error::UnsupportedQubitCount(state.n()));
    }
    Ok(())
}

/// Geometric mean of the three one-vs-rest negativities of the normalized
/// excitation part of a three-qubit state.
pub fn tripartite_negativity(state: &SectorState) -> Result<f64> {
    require_three(state)?;
    Ok(geometric_mean3(&pure_sector_negativities(state)?))
}

/// Upper bound `Q · N₍₃₎(ψ̃)` on the convex-roof extended negativity.
pub fn ncr_star(state: &SectorState) -> Result<f64> {
    require_three(state)?;
    let q = state.excited_weight();
    if q < Q_FLOOR {
        return Ok(0.0);
    }
    Ok(q * tripartite_negativity(state)?)
}

/// Concurrence of a two-qubit sector state mixed with `|gg⟩`: `2 |a₁| |a₂|`.
pub fn concurrence_two_qubit(state: &SectorState) -> Result<f64> {
    if state.n() != 2 {
        return Err(Error::UnsupportedQubitCount(state.n()));
    }
    let a = state.amplitudes();
    Ok(2.0 * a[0].norm() * a[1].norm())
}

/// Wootters concurrence of an arbitrary two-qubit density matrix.
///
/// With `ρ = Σ_i |v_i⟩⟨v_i|` (sub-normalized eigenvectors) the values `λ_i`
/// are the singular values of `τ_ik = ⟨v_i| σ_y⊗σ_y |v_k*⟩`, which avoids
/// taking square roots of near-zero eigenvalues of `ρρ̃`.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.n() != 2 {
        return Err(Error::UnsupportedQubitCount(rho.n()));
    }
    let (vals, vecs) = hermitian_eigen(rho.matrix());
    let mut v = CMatrix::zeros(4, 4);
    for (c, &p) in vals.iter().enumerate() {
        let s = p.max(0.0).sqrt();
        for i in 0..4 {
            v[(i, c)] = vecs[(i, c)] * s;
        }
    }
    // σ_y ⊗ σ_y is real: anti-diagonal (-1, 1, 1, -1).
    let mut flip = CMatrix::zeros(4, 4);
    flip[(0, 3)] = Complex64::new(-1.0, 0.0);
    flip[(1, 2)] = Complex64::new(1.0, 0.0);
    flip[(2, 1)] = Complex64::new(1.0, 0.0);
    flip[(3, 0)] = Complex64::new(-1.0, 0.0);
    let tau = v.adjoint() * flip * v.map(|z| z.conj());
    let mut sv: Vec<f64> = tau.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok((sv[0] - sv[1] - sv[2] - sv[3]).max(0.0))
}

/// The instant at which one qubit's amplitude passes through zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TStar {
    pub time: f64,
    /// 0-based index of the qubit that factors out.
    pub qubit: usize,
    /// `Φ(t*)`.
    pub phi_star: f64,
    /// `1 − Tr ρ_j²` of that qubit in the normalized excitation part at `t*`.
    pub purity_deficit: f64,
}

/// Bisection for `Φ(t) = target` on `[lo, hi]` where `Φ` is decreasing; stops
/// when the bracket can no longer be split in double precision.
fn bisect_phi(params: &PropagatorParams, target: f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return (lo, hi);
        }
        if phi(mid, params) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Smallest `t > 0` at which some `a_j(t) = Φ(t) η₊ r_j + d_j` vanishes and
/// qubit `j` factors out of the excitation part.
///
/// Each candidate needs `Φ* = −d_j / (η₊ r_j)` real and inside `(0, 1)`. `Φ`
/// decreases monotonically from 1 until its first zero (for ever in the
/// over-damped regime), so the root is bracketed there and bisected.
pub fn find_tstar(
    state0: &SectorState,
    profile: &CouplingProfile,
    params: &PropagatorParams,
) -> Result<Option<TStar>> {
    state0.check_n(profile.n())?;
    let deviation = (state0.norm_sqr() - 1.0).abs();
    if deviation > NORM_TOL {
        return Err(Error::NotNormalized { deviation });
    }
    let r = profile.weights();
    let eta_plus: Complex64 = r.iter().zip(state0.amplitudes()).map(|(&w, a)| a * w).sum();
    if eta_plus.norm() < 1e-14 || params.r() == 0.0 {
        return Ok(None);
    }

    let mut best: Option<TStar> = None;
    for (j, (&w, a)) in r.iter().zip(state0.amplitudes()).enumerate() {
        if w == 0.0 {
            continue;
        }
        let dark = a - eta_plus * w;
        let target = -dark / (eta_plus * w);
        if target.im.abs() > 1e-12 * target.norm().max(1.0) {
            continue;
        }
        let target = target.re;
        // Φ* at rounding level means the dark part vanishes on this qubit:
        // it factors out only as the whole sector decays.
        if !(target > 1e-12 && target < 1.0) {
            continue;
        }

        let hi = match first_phi_zero(params) {
            Some(tz) => tz,
            None => {
                let mut hi = 1.0 / (params.gamma() + params.r());
                while phi(hi, params) > target {
                    hi *= 2.0;
                    if !hi.is_finite() {
                        return Err(Error::Numerical("could not bracket t*".into()));
                    }
                }
                hi
            }
        };
        let (lo, hi) = bisect_phi(params, target, 0.0, hi);

        // Keep whichever end leaves the smaller residual amplitude.
        let amp = |t: f64| -> Result<(f64, SectorState)> {
            let s = evolve_to_phi(state0, profile, phi(t, params))?;
            Ok((s.amplitudes()[j].norm(), s))
        };
        let (res_lo, s_lo) = amp(lo)?;
        let (res_hi, s_hi) = amp(hi)?;
        let (t, state) = if res_lo <= res_hi { (lo, s_lo) } else { (hi, s_hi) };
        if t <= 0.0 || state.excited_weight() < Q_FLOOR {
            continue;
        }
        let deficit = reduced_impurities(&state)?[j];
        if deficit > PURITY_TOL {
            continue;
        }
        if best.is_none_or(|b| t < b.time) {
            best = Some(TStar { time: t, qubit: j, phi_star: phi(t, params), purity_deficit: deficit });
        }
    }
    Ok(best)
}

/// Long-time state when `Φ → 0`: the dark projection of the excitation
/// amplitudes, with the remaining weight on `|g…g⟩`.
pub fn asymptotic_state(state0: &SectorState, profile: &CouplingProfile) -> Result<SectorState> {
    evolve_to_phi(state0, profile, 0.0)
}

/// Entanglement summary of a three-qubit state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementReport {
    /// One-vs-rest negativities of the normalized excitation part; zero when
    /// that part is undefined.
    pub negativities: Vec<f64>,
    pub geometric_mean: f64,
    pub q: f64,
    /// Upper bound on the convex-roof extended negativity.
    pub n_star: f64,
    pub biseparable: bool,
    pub t_star: Option<f64>,
}

impl EntanglementReport {
    pub fn from_state(state: &SectorState, t_star: Option<f64>) -> Result<Self> {
        require_three(state)?;
        let q = state.excited_weight();
        if q < Q_FLOOR {
            return Ok(Self {
                negativities: vec![0.0; 3],
                geometric_mean: 0.0,
                q,
                n_star: 0.0,
                biseparable: true,
                t_star,
            });
        }
        let negativities = pure_sector_negativities(state)?;
        let geometric_mean = geometric_mean3(&negativities);
        let n_star = q * geometric_mean;
        let factored = reduced_impurities(state)?.iter().any(|&d| d <= PURITY_TOL);
        Ok(Self {
            negativities,
            geometric_mean,
            q,
            n_star,
            biseparable: factored && n_star <= EPS_BISEP,
            t_star,
        })
    }
}

/// Real matrix whose rows are the pair states `ψ₋,jk`; used by callers that
/// need the raw family rather than an orthonormal basis.
pub fn pair_family(profile: &CouplingProfile) -> DMatrix<f64> {
    let n = profile.n();
    let rows: Vec<Vec<f64>> = (0..n)
        .flat_map(|j| ((j + 1)..n).map(move |k| (j, k)))
        .filter_map(|(j, k)| crate::dfs::subradiant_pair(profile, j, k).ok())
        .map(|s| s.amplitudes().iter().map(|a| a.re).collect())
        .collect();
    DMatrix::from_fn(rows.len(), n, |i, c| rows[i][c])
}
