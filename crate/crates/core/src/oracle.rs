//! Independent checks of the closed form.
//!
//! * [`solve_cplus_ode`] integrates `c̈ + γċ + r²c = 0` (the memory-kernel
//!   equation differentiated once) with fixed-step RK4.
//! * [`solve_discretized_bath`] propagates qubits plus `K` explicit bath
//!   modes in the interaction picture, where only the detunings `δ_k` enter.
//! * [`brute_negativity`] builds the partial transpose with bit loops and
//!   diagonalizes its real `2D × 2D` embedding, sharing no code with
//!   [`crate::entanglement`].

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::DensityMatrix;
use crate::propagator::PropagatorParams;
use crate::sector::{CouplingProfile, SectorState};

/// Step size relative to `min(1/γ, 1/r)` above which the ODE oracle warns.
pub const RECOMMENDED_STEP: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct OdeCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub warnings: Vec<String>,
}

fn step_grid(t_max: f64, dt: f64) -> Result<(usize, f64)> {
    if !(t_max.is_finite() && t_max >= 0.0) {
        return Err(Error::InvalidParameter(format!("t_max={t_max} must be finite and >= 0")));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt={dt} must be positive")));
    }
    // The slack keeps `t_max / dt` that is an integer up to rounding from
    // gaining an extra step.
    let steps = (t_max / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    Ok((steps, t_max / steps as f64))
}

/// RK4 for `c₊` with `c₊(0) = 1`, `ċ₊(0) = 0`. `dt` is shrunk so that the
/// grid ends exactly at `t_max`.
pub fn solve_cplus_ode(params: &PropagatorParams, t_max: f64, dt: f64) -> Result<OdeCurve> {
    let (steps, h) = step_grid(t_max, dt)?;
    let (g, r2) = (params.gamma(), params.r() * params.r());
    let mut warnings = Vec::new();
    let scale = [params.gamma(), params.r()].into_iter().filter(|&x| x > 0.0).fold(0.0, f64::max);
    if scale > 0.0 && h > RECOMMENDED_STEP / scale {
        warnings.push(format!(
            "dt={h:.3e} exceeds the recommended {:.3e}; accuracy may degrade",
            RECOMMENDED_STEP / scale
        ));
    }
    let f = |c: f64, v: f64| (v, -g * v - r2 * c);
    let (mut c, mut v) = (1.0, 0.0);
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    times.push(0.0);
    values.push(c);
    for i in 0..steps {
        let (k1c, k1v) = f(c, v);
        let (k2c, k2v) = f(c + 0.5 * h * k1c, v + 0.5 * h * k1v);
        let (k3c, k3v) = f(c + 0.5 * h * k2c, v + 0.5 * h * k2v);
        let (k4c, k4v) = f(c + h * k3c, v + h * k3v);
        c += h / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        times.push((i + 1) as f64 * h);
        values.push(c);
    }
    Ok(OdeCurve { times, values, warnings })
}

/// Finite Lorentzian bath on a uniform midpoint grid of detunings
/// `δ_k ∈ [−W, W]` with `g_k² = J(ω₀ + δ_k) Δω`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedBath {
    detunings: Vec<f64>,
    couplings: Vec<f64>,
    spacing: f64,
}

impl DiscretizedBath {
    pub fn lorentzian(lambda: f64, gamma: f64, modes: usize, half_width: f64) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidParameter("need at least one bath mode".into()));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidParameter(format!("window half-width {half_width} must be positive")));
        }
        if !(lambda.is_finite() && lambda >= 0.0 && gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "discretization needs lambda >= 0 and gamma > 0 (got {lambda}, {gamma})"
            )));
        }
        let spacing = 2.0 * half_width / modes as f64;
        let detunings: Vec<f64> =
            (0..modes).map(|k| -half_width + (k as f64 + 0.5) * spacing).collect();
        let couplings = detunings
            .iter()
            .map(|d| (lambda * gamma / (std::f64::consts::PI * (d * d + gamma * gamma)) * spacing).sqrt())
            .collect();
        Ok(Self { detunings, couplings, spacing })
    }

    /// Bath whose collective rate with `profile` reproduces `params`:
    /// `λ = r² / α_T²`.
    pub fn for_params(
        params: &PropagatorParams,
        profile: &CouplingProfile,
        modes: usize,
        half_width: f64,
    ) -> Result<Self> {
        let lambda = params.r() * params.r() / (profile.alpha_total() * profile.alpha_total());
        Self::lorentzian(lambda, params.gamma(), modes, half_width)
    }

    /// Bath with every coupling switched off.
    pub fn decoupled(modes: usize, half_width: f64) -> Result<Self> {
        let mut b = Self::lorentzian(0.0, 1.0, modes, half_width)?;
        b.couplings.iter_mut().for_each(|g| *g = 0.0);
        Ok(b)
    }

    pub fn modes(&self) -> usize {
        self.detunings.len()
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// `2π / Δω`: beyond this the finite bath refocuses.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.spacing
    }

    pub fn total_weight(&self) -> f64 {
        self.couplings.iter().map(|g| g * g).sum()
    }
}

#[derive(Debug, Clone)]
pub struct BathCurve {
    pub times: Vec<f64>,
    /// Qubit amplitudes; the ground amplitude is the conserved vacuum
    /// component of the initial state.
    pub states: Vec<SectorState>,
    /// `Σ_k |c_k|²` at each sample.
    pub bath_population: Vec<f64>,
    /// Largest `|‖ψ(t)‖² − ‖ψ(0)‖²|` seen.
    pub max_norm_drift: f64,
    pub warnings: Vec<String>,
}

/// Interaction-picture RK4 for `n` qubit amplitudes and `K` mode amplitudes:
///
/// `ċ_j = −i α_j Σ_k g_k e^{−iδ_k t} c_k`, `ċ_k = −i g_k e^{iδ_k t} Σ_j α_j c_j`.
///
/// Every `sample_every`-th step is recorded (plus the final one).
pub fn solve_discretized_bath(
    state0: &SectorState,
    profile: &CouplingProfile,
    bath: &DiscretizedBath,
    t_max: f64,
    dt: f64,
    sample_every: usize,
) -> Result<BathCurve> {
    state0.check_n(profile.n())?;
    let (steps, h) = step_grid(t_max, dt)?;
    let every = sample_every.max(1);
    let mut warnings = Vec::new();
    if bath.recurrence_time() < t_max {
        warnings.push(format!(
            "recurrence time {:.4} is shorter than t_max={t_max}; finite-bath revivals will appear",
            bath.recurrence_time()
        ));
    }

    let alphas = profile.alphas();
    let g = bath.couplings();
    let det = bath.detunings();
    let n = alphas.len();
    let i = Complex64::new(0.0, 1.0);

    let deriv = |t: f64, y: &[Complex64], out: &mut [Complex64]| {
        let (qubits, modes) = y.split_at(n);
        let mut field = Complex64::new(0.0, 0.0);
        for k in 0..modes.len() {
            field += modes[k] * (g[k] * Complex64::cis(-det[k] * t));
        }
        let collective: Complex64 = alphas.iter().zip(qubits).map(|(&a, c)| c * a).sum();
        let (oq, om) = out.split_at_mut(n);
        for (o, &a) in oq.iter_mut().zip(alphas) {
            *o = -i * a * field;
        }
        for k in 0..om.len() {
            om[k] = -i * g[k] * Complex64::cis(det[k] * t) * collective;
        }
    };

    let dim = n + bath.modes();
    let mut y = vec![Complex64::new(0.0, 0.0); dim];
    y[..n].copy_from_slice(state0.amplitudes());
    let norm0: f64 = y.iter().map(|z| z.norm_sqr()).sum();
    let ground = state0.ground();

    let mut curve = BathCurve {
        times: Vec::new(),
        states: Vec::new(),
        bath_population: Vec::new(),
        max_norm_drift: 0.0,
        warnings,
    };
    let record = |t: f64, y: &[Complex64], curve: &mut BathCurve| -> Result<()> {
        curve.times.push(t);
        curve.states.push(SectorState::new(y[..n].to_vec(), ground)?);
        curve.bath_population.push(y[n..].iter().map(|z| z.norm_sqr()).sum());
        Ok(())
    };
    record(0.0, &y, &mut curve)?;

    let (mut k1, mut k2, mut k3, mut k4) =
        (vec![Complex64::new(0.0, 0.0); dim], vec![Complex64::new(0.0, 0.0); dim], vec![Complex64::new(0.0, 0.0); dim], vec![Complex64::new(0.0, 0.0); dim]);
    let mut tmp = vec![Complex64::new(0.0, 0.0); dim];
    for s in 0..steps {
        let t = s as f64 * h;
        deriv(t, &y, &mut k1);
        for d in 0..dim {
            tmp[d] = y[d] + k1[d] * (0.5 * h);
        }
        deriv(t + 0.5 * h, &tmp, &mut k2);
        for d in 0..dim {
            tmp[d] = y[d] + k2[d] * (0.5 * h);
        }
        deriv(t + 0.5 * h, &tmp, &mut k3);
        for d in 0..dim {
            tmp[d] = y[d] + k3[d] * h;
        }
        deriv(t + h, &tmp, &mut k4);
        for d in 0..dim {
            y[d] += (k1[d] + (k2[d] + k3[d]) * 2.0 + k4[d]) * (h / 6.0);
        }
        let norm: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        curve.max_norm_drift = curve.max_norm_drift.max((norm - norm0).abs());
        if (s + 1) % every == 0 || s + 1 == steps {
            record((s + 1) as f64 * h, &y, &mut curve)?;
        }
    }
    Ok(curve)
}

/// Negativity from an explicitly built partial transpose. The Hermitian
/// matrix `A + iB` is diagonalized through the real symmetric embedding
/// `[[A, −B], [B, A]]`, whose spectrum is that of `A + iB` with every
/// eigenvalue doubled.
pub fn brute_negativity(rho: &DensityMatrix, subset: &[usize]) -> Result<f64> {
    let n = rho.n();
    if subset.is_empty() || subset.iter().any(|&q| q >= n) {
        return Err(Error::InvalidParameter(format!("invalid subset {subset:?} for n={n}")));
    }
    let dim = rho.dim();
    let m = rho.matrix();
    let mut pt = vec![Complex64::new(0.0, 0.0); dim * dim];
    for row in 0..dim {
        for col in 0..dim {
            let (mut r2, mut c2) = (row, col);
            for &q in subset {
                let bit = n - 1 - q;
                let br = (row >> bit) & 1;
                let bc = (col >> bit) & 1;
                r2 = (r2 & !(1 << bit)) | (bc << bit);
                c2 = (c2 & !(1 << bit)) | (br << bit);
            }
            pt[row * dim + col] = m[(r2, c2)];
        }
    }
    let big = DMatrix::<f64>::from_fn(2 * dim, 2 * dim, |i, k| {
        let z = pt[(i % dim) * dim + (k % dim)];
        let z = Complex64::new(0.5, 0.0) * (z + pt[(k % dim) * dim + (i % dim)].conj());
        match (i < dim, k < dim) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let ev = SymmetricEigen::new(big).eigenvalues;
    Ok(ev.iter().filter(|&&v| v < 0.0).map(|v| -v).sum::<f64>() / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfs::{subradiant_pair, superradiant_state};
    use crate::entanglement::negativity;
    use crate::evolution::{density_matrix, evolve};
    use crate::propagator::phi;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_ode_error(gamma: f64, r: f64, t_max: f64, dt: f64) -> f64 {
        let p = PropagatorParams::new(gamma, r).unwrap();
        let c = solve_cplus_ode(&p, t_max, dt).unwrap();
        c.times.iter().zip(&c.values).map(|(&t, v)| (v - phi(t, &p)).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn ode_reference_values() {
        let p = PropagatorParams::new(1.0, 0.1).unwrap();
        let c = solve_cplus_ode(&p, 10.0, 1e-3).unwrap();
        assert_abs_diff_eq!(*c.values.last().unwrap(), 0.913_233_658_133_3, epsilon = 1e-9);
        assert!(c.warnings.is_empty());

        let h = PropagatorParams::new(0.0, 1.0).unwrap();
        let c = solve_cplus_ode(&h, 20.0, 1e-3).unwrap();
        for (t, v) in c.times.iter().zip(&c.values) {
            assert!((v - t.cos()).abs() <= 1e-8);
        }

        let idle = PropagatorParams::new(1.0, 0.0).unwrap();
        assert!(solve_cplus_ode(&idle, 5.0, 1e-2).unwrap().values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn ode_matches_closed_form() {
        assert!(max_ode_error(1.0, 0.5, 20.0, 1e-3) <= 1e-8);
        assert!(max_ode_error(1.0, 10.0, 20.0, 1e-4) <= 1e-8);
    }

    #[test]
    fn coarse_step_warns() {
        let p = PropagatorParams::new(1.0, 10.0).unwrap();
        let c = solve_cplus_ode(&p, 1.0, 0.01).unwrap();
        assert_eq!(c.warnings.len(), 1);
        assert!(solve_cplus_ode(&p, 1.0, 0.0).is_err());
    }

    #[test]
    fn bath_weights_follow_arctan() {
        let b = DiscretizedBath::lorentzian(0.7, 1.0, 4001, 40.0).unwrap();
        let exact = 0.7 * 2.0 / std::f64::consts::PI * 40f64.atan();
        assert!((b.total_weight() - exact).abs() < 1e-5);
        assert!(b.couplings().iter().all(|&g| g >= 0.0));
        let d = b.detunings();
        for k in 0..d.len() {
            assert_abs_diff_eq!(d[k], -d[d.len() - 1 - k], epsilon = 1e-12);
        }
    }

    #[test]
    fn decoupled_bath_freezes_state() {
        let p = CouplingProfile::uniform(3).unwrap();
        let s = SectorState::from_real(&[0.6, 0.0, 0.8]).unwrap();
        let b = DiscretizedBath::decoupled(11, 5.0).unwrap();
        let c = solve_discretized_bath(&s, &p, &b, 3.0, 0.01, 10).unwrap();
        for st in &c.states {
            assert_eq!(st, &s);
        }
    }

    #[test]
    fn discretized_bath_tracks_closed_form() {
        let params = PropagatorParams::new(1.0, 0.1).unwrap();
        let profile = CouplingProfile::from_r12(0.53, 0.6).unwrap();
        let s0 = SectorState::basis(3, 0).unwrap();
        let bath = DiscretizedBath::for_params(&params, &profile, 2001, 20.0).unwrap();
        let c = solve_discretized_bath(&s0, &profile, &bath, 20.0, 0.01, 50).unwrap();
        assert!(c.warnings.is_empty());
        assert!(c.max_norm_drift <= 1e-8);
        let mut err: f64 = 0.0;
        for (t, st) in c.times.iter().zip(&c.states) {
            let exact = evolve(&s0, &profile, &params, *t).unwrap();
            for (a, b) in st.amplitudes().iter().zip(exact.amplitudes()) {
                err = err.max((a - b).norm());
            }
        }
        assert!(err <= 1e-2, "max error {err}");
    }

    #[test]
    fn short_recurrence_warns() {
        let params = PropagatorParams::new(1.0, 0.1).unwrap();
        let profile = CouplingProfile::uniform(2).unwrap();
        let bath = DiscretizedBath::for_params(&params, &profile, 21, 10.0).unwrap();
        let c = solve_discretized_bath(&SectorState::basis(2, 0).unwrap(), &profile, &bath, 20.0, 0.05, 1)
            .unwrap();
        assert_eq!(c.warnings.len(), 1);
    }

    #[test]
    fn dark_state_stays_in_the_qubits() {
        let params = PropagatorParams::new(1.0, 0.1).unwrap();
        let profile = CouplingProfile::new(vec![0.3, 0.7, 1.1]).unwrap();
        let bath = DiscretizedBath::for_params(&params, &profile, 2001, 20.0).unwrap();
        let dark = subradiant_pair(&profile, 0, 2).unwrap();
        let c = solve_discretized_bath(&dark, &profile, &bath, 20.0, 0.01, 20).unwrap();
        assert!(c.bath_population.iter().all(|&p| p <= 1e-6));
    }

    #[test]
    fn superradiant_rate_scales_with_n() {
        // Equal single-qubit couplings; the collective rate grows as α_T² = nα².
        let (gamma, lambda, alpha) = (1.0, 0.0025, 1.0);
        let fit = |profile: &CouplingProfile| -> f64 {
            let bath = DiscretizedBath::lorentzian(lambda, gamma, 2001, 20.0).unwrap();
            let s0 = superradiant_state(profile);
            let c = solve_discretized_bath(&s0, profile, &bath, 15.0, 0.01, 100).unwrap();
            // Least-squares slope of ln Q on t ∈ [5, 15].
            let pts: Vec<(f64, f64)> = c
                .times
                .iter()
                .zip(&c.states)
                .filter(|(t, _)| **t >= 5.0)
                .map(|(t, s)| (*t, s.excited_weight().ln()))
                .collect();
            let m = pts.len() as f64;
            let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
            let (mx, my) = (sx / m, sy / m);
            let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
            let den: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
            -num / den
        };
        let single = fit(&CouplingProfile::new(vec![alpha, 0.0, 0.0]).unwrap());
        let collective = fit(&CouplingProfile::uniform(3).unwrap());
        let ratio = collective / single;
        assert!((ratio / 3.0 - 1.0).abs() <= 0.05, "ratio {ratio}");
    }

    #[test]
    fn brute_negativity_examples() {
        let w = SectorState::from_real(&[1.0 / 3f64.sqrt(); 3]).unwrap();
        let rho = density_matrix(&w).unwrap();
        assert_abs_diff_eq!(brute_negativity(&rho, &[0]).unwrap(), 2f64.sqrt() / 3.0, epsilon = 1e-10);

        let g = SectorState::ground_state(3).unwrap();
        assert_eq!(brute_negativity(&density_matrix(&g).unwrap(), &[1]).unwrap(), 0.0);
        assert!(brute_negativity(&rho, &[]).is_err());
    }

    #[test]
    fn brute_matches_entanglement_module() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let n = rng.random_range(2..=4);
            let q: f64 = rng.random_range(0.0..1.0);
            let a: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let a = a.into_iter().map(|z| z * (q.sqrt() / norm)).collect();
            let s = SectorState::new(a, Complex64::new((1.0 - q).sqrt(), 0.0)).unwrap();
            let rho = density_matrix(&s).unwrap();
            let j = rng.random_range(0..n);
            let fast = negativity(&rho, &[j]).unwrap();
            assert!((fast - brute_negativity(&rho, &[j]).unwrap()).abs() <= 1e-10);
        }
    }
}
