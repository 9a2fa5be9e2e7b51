//! Time evolution by spectral decomposition.
//!
//! Times are dimensionless (`omega t`), so a level of energy `E` picks up the
//! phase `(E/omega)(omega t)`. The survival probability is the modulus squared
//! of the return amplitude, `|<psi0| e^{-iHt} |psi0>|^2`.

use num_complex::Complex64;

use crate::eigensolve::chain_eigen;
use crate::error::{Error, Result};
use crate::model::{basis_index, chain_basis_state, JointState, ModelParams, Parity, Truncation};
use crate::observables::prominent_peaks;

/// Default sampling step in units of `1/omega`.
pub const DEFAULT_DT: f64 = 0.005;

/// Minimum height and prominence of a revival peak.
pub const REVIVAL_MIN_HEIGHT: f64 = 0.2;
pub const REVIVAL_MIN_PROMINENCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
struct Component {
    parity: Parity,
    /// `E/omega`.
    energy: f64,
    coefficient: Complex64,
    vector: Vec<f64>,
}

/// An initial state expanded in converged eigenstates.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionPlan {
    params: ModelParams,
    trunc: Truncation,
    initial: JointState,
    components: Vec<Component>,
    captured: f64,
}

fn project_on_chain(state: &JointState, p: Parity, vector: &[f64]) -> Complex64 {
    vector
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let (q, n) = chain_basis_state(p, k);
            state.amp(q, n) * v
        })
        .sum()
}

impl EvolutionPlan {
    /// Expand `initial` in eigenstates whose cutoff tail is below the
    /// tolerance, doubling the cutoff (up to 4096) until these carry all
    /// but `tail_tol` of the initial probability.
    pub fn new(params: &ModelParams, initial: &JointState, tail_tol: f64) -> Result<Self> {
        Self::starting_at(params, initial, tail_tol, params.default_nmax())
    }

    /// As [`EvolutionPlan::new`], with the first cutoff tried set explicitly.
    pub fn starting_at(params: &ModelParams, initial: &JointState, tail_tol: f64, start_nmax: usize) -> Result<Self> {
        let mut n_max = start_nmax.max(initial.n_max()).max(2);
        loop {
            if n_max > 4096 {
                return Err(Error::Truncation {
                    n_max: 4096,
                    reason: "initial state not resolved by converged eigenstates".into(),
                });
            }
            let trunc = Truncation::new(n_max, tail_tol)?;
            let psi = initial.resized(n_max)?;
            let mut components = Vec::new();
            for p in Parity::BOTH {
                let dec = chain_eigen(params, &trunc, p, None, true)?;
                let vectors = dec.vectors.expect("vectors requested");
                for (energy, v) in dec.values.into_iter().zip(vectors) {
                    let len = v.len();
                    if v[len - 2] * v[len - 2] + v[len - 1] * v[len - 1] > tail_tol {
                        break;
                    }
                    let coefficient = project_on_chain(&psi, p, &v);
                    components.push(Component {
                        parity: p,
                        energy: energy / params.omega(),
                        coefficient,
                        vector: v,
                    });
                }
            }
            let captured: f64 = components.iter().map(|c| c.coefficient.norm_sqr()).sum();
            if captured >= 1.0 - tail_tol {
                components.retain(|c| c.coefficient.norm_sqr() > 0.0);
                return Ok(Self {
                    params: *params,
                    trunc,
                    initial: psi,
                    components,
                    captured,
                });
            }
            n_max *= 2;
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    pub fn initial(&self) -> &JointState {
        &self.initial
    }

    /// `sum |c_k|^2` over the retained eigenstates.
    pub fn captured_weight(&self) -> f64 {
        self.captured
    }

    /// `(E_k/omega, |c_k|^2)` for every retained component.
    pub fn populations(&self) -> Vec<(f64, f64)> {
        self.components
            .iter()
            .map(|c| (c.energy, c.coefficient.norm_sqr()))
            .collect()
    }

    /// `psi(t) = sum_k e^{-i E_k t} c_k |phi_k>`, renormalized.
    pub fn evolve(&self, t: f64) -> Result<JointState> {
        let mut amps = vec![Complex64::new(0.0, 0.0); self.trunc.dim()];
        for c in &self.components {
            let weight = c.coefficient * Complex64::from_polar(1.0, -c.energy * t);
            for (k, &v) in c.vector.iter().enumerate() {
                let (q, n) = chain_basis_state(c.parity, k);
                amps[basis_index(q, n)] += weight * v;
            }
        }
        JointState::from_amplitudes(amps)
    }

    /// `|sum_k |c_k|^2 e^{-i E_k t}|^2`, normalized by the captured weight.
    pub fn survival_probability(&self, t: f64) -> f64 {
        let amp: Complex64 = self
            .components
            .iter()
            .map(|c| c.coefficient.norm_sqr() * Complex64::from_polar(1.0, -c.energy * t))
            .sum();
        (amp.norm_sqr() / (self.captured * self.captured)).min(1.0)
    }

    pub fn survival_trace(&self, times: &[f64]) -> Vec<f64> {
        times.iter().map(|&t| self.survival_probability(t)).collect()
    }
}

/// `0, dt, 2 dt, ...` up to and including `t_max` (within rounding).
pub fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) || !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "bad time grid t_max = {t_max}, dt = {dt}"
        )));
    }
    let steps = (t_max / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| k as f64 * dt).collect())
}

/// Revival peaks `(omega t, height)` of the survival probability sampled on
/// `times`, excluding `t = 0`.
pub fn revival_profile(plan: &EvolutionPlan, times: &[f64]) -> Result<Vec<(f64, f64)>> {
    let covers = times.first().is_some_and(|&t| t <= 0.0)
        && times.last().is_some_and(|&t| t >= 4.0 * std::f64::consts::PI - 1e-9);
    let fine = times.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= 0.01 + 1e-12);
    if !covers || !fine {
        return Err(Error::Precondition(
            "revival detection needs samples over [0, 4 pi] with step <= 0.01".into(),
        ));
    }
    let trace = plan.survival_trace(times);
    Ok(prominent_peaks(&trace, REVIVAL_MIN_HEIGHT, REVIVAL_MIN_PROMINENCE)
        .into_iter()
        .filter(|p| times[p.index] > 0.0)
        .map(|p| (times[p.index], p.height))
        .collect())
}

/// Largest probability found on the opposite parity chain over `times`.
pub fn parity_confinement(plan: &EvolutionPlan, times: &[f64]) -> Result<f64> {
    let (plus, minus) = plan.initial.parity_weights();
    let parity = plan.initial.definite_parity(1e-12).ok_or(Error::IndefiniteParity {
        weight: plus.min(minus),
    })?;
    let mut leak = 0.0f64;
    for &t in times {
        let (wp, wm) = plan.evolve(t)?.parity_weights();
        leak = leak.max(match parity {
            Parity::Plus => wm,
            Parity::Minus => wp,
        });
    }
    Ok(leak)
}
