//! Static properties of joint qubit-field states, plus closed-form
//! expectations in the two perturbative regimes that serve as validators.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{JointState, ModelParams, Qubit, Truncation};
use crate::perturbative::{adiabatic_state, Branch};
use crate::regimes::first_juddian_approx;
use crate::special::{displacement_element, laguerre};

/// Prominence floor used when counting modes of a photon distribution.
pub const MODE_PROMINENCE_FLOOR: f64 = 1e-3;

/// `<a^dag a + sigma_+ sigma_->`.
pub fn total_excitations(state: &JointState) -> f64 {
    (0..=state.n_max())
        .map(|m| {
            let pg = state.amp(Qubit::Ground, m).norm_sqr();
            let pe = state.amp(Qubit::Excited, m).norm_sqr();
            m as f64 * pg + (m + 1) as f64 * pe
        })
        .sum()
}

/// First two moments of the photon number.
pub fn photon_moments(state: &JointState) -> (f64, f64) {
    photon_distribution(state)
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(m1, m2), (m, p)| {
            let m = m as f64;
            (m1 + m * p, m2 + m * m * p)
        })
}

/// Fano-Mandel parameter `(<n^2> - <n>^2) / <n> - 1`; `None` for an (almost)
/// empty field, where the ratio is undefined.
pub fn fano_mandel(state: &JointState) -> Option<f64> {
    let (m1, m2) = photon_moments(state);
    if m1 < 1e-12 {
        None
    } else {
        Some((m2 - m1 * m1) / m1 - 1.0)
    }
}

/// Reduced qubit density matrix, index 0 = `|g>`, 1 = `|e>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDensity {
    pub rho: [[Complex64; 2]; 2],
}

impl QubitDensity {
    pub fn trace(&self) -> f64 {
        self.rho[0][0].re + self.rho[1][1].re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let diff = self.rho[0][0].re - self.rho[1][1].re;
        let off = self.rho[0][1].norm_sqr();
        let half_gap = 0.5 * (diff * diff + 4.0 * off).sqrt();
        let mid = 0.5 * self.trace();
        [mid - half_gap, mid + half_gap]
    }

    pub fn purity(&self) -> f64 {
        let [a, b] = self.eigenvalues();
        a * a + b * b
    }
}

pub fn reduced_qubit_density(state: &JointState) -> QubitDensity {
    let zero = Complex64::new(0.0, 0.0);
    let mut rho = [[zero; 2]; 2];
    let qubits = [Qubit::Ground, Qubit::Excited];
    for m in 0..=state.n_max() {
        for (i, qi) in qubits.iter().enumerate() {
            for (j, qj) in qubits.iter().enumerate() {
                rho[i][j] += state.amp(*qi, m) * state.amp(*qj, m).conj();
            }
        }
    }
    QubitDensity { rho }
}

/// Entanglement entropy `-sum lambda log2 lambda`, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &QubitDensity) -> f64 {
    rho.eigenvalues()
        .iter()
        .map(|&l| l.clamp(0.0, 1.0))
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum()
}

/// `P_m = |<g,m|psi>|^2 + |<e,m|psi>|^2`.
pub fn photon_distribution(state: &JointState) -> Vec<f64> {
    (0..=state.n_max())
        .map(|m| state.amp(Qubit::Ground, m).norm_sqr() + state.amp(Qubit::Excited, m).norm_sqr())
        .collect()
}

/// Photon distribution of either adiabatic state `(n, +-)`,
/// `P_m = |<m| D(alpha) |n>|^2`, for `m = 0..=m_max`.
pub fn adiabatic_photon_distribution(n: u32, alpha: f64, m_max: usize) -> Vec<f64> {
    (0..=m_max)
        .map(|m| displacement_element(m, n as usize, alpha).powi(2))
        .collect()
}

/// `|<a|b>|^2`.
pub fn fidelity(a: &JointState, b: &JointState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Half the `l1` distance between two distributions; the shorter one is
/// padded with zeros.
pub fn total_variation_distance(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|i| (at(p, i) - at(q, i)).abs()).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub height: f64,
    pub prominence: f64,
}

/// Local maxima of `values` with height at least `min_height` and
/// topographic prominence at least `min_prominence`. A plateau counts once,
/// at its first sample. Endpoints qualify when they exceed their one neighbour.
pub fn prominent_peaks(values: &[f64], min_height: f64, min_prominence: f64) -> Vec<Peak> {
    let n = values.len();
    let mut peaks = Vec::new();
    for i in 0..n {
        let v = values[i];
        let left_ok = i == 0 || values[i - 1] < v;
        // walk across a plateau to the first different value on the right
        let mut r = i + 1;
        while r < n && values[r] == v {
            r += 1;
        }
        let right_ok = r == n || values[r] < v;
        if !(left_ok && right_ok) || n < 2 || v < min_height {
            continue;
        }
        let mut left_min = v;
        let mut k = i;
        while k > 0 && values[k - 1] <= v {
            k -= 1;
            left_min = left_min.min(values[k]);
        }
        let mut right_min = v;
        let mut k = r.saturating_sub(1);
        while k + 1 < n && values[k + 1] <= v {
            k += 1;
            right_min = right_min.min(values[k]);
        }
        // a side without samples does not bound the peak
        let base = match (i == 0, r == n) {
            (true, true) => v,
            (true, false) => right_min,
            (false, true) => left_min,
            (false, false) => left_min.max(right_min),
        };
        let prominence = v - base;
        if prominence >= min_prominence {
            peaks.push(Peak {
                index: i,
                height: v,
                prominence,
            });
        }
    }
    peaks
}

/// Number of modes of a photon distribution above [`MODE_PROMINENCE_FLOOR`].
pub fn count_modes(distribution: &[f64]) -> usize {
    prominent_peaks(distribution, 0.0, MODE_PROMINENCE_FLOOR).len()
}

/// Midpoint of the outermost modes; `None` for a distribution without modes.
pub fn distribution_center(distribution: &[f64]) -> Option<f64> {
    let peaks = prominent_peaks(distribution, 0.0, MODE_PROMINENCE_FLOOR);
    let first = peaks.first()?.index as f64;
    let last = peaks.last()?.index as f64;
    Some(0.5 * (first + last))
}

/// The adiabatic label `(n, branch)` with `n < n_candidates` that best matches
/// `state`, together with its fidelity.
pub fn best_adiabatic_match(
    state: &JointState,
    params: &ModelParams,
    trunc: &Truncation,
    n_candidates: u32,
) -> Result<(u32, Branch, f64)> {
    let state = state.resized(trunc.n_max())?;
    let mut best: Option<(u32, Branch, f64)> = None;
    for n in 0..n_candidates {
        for b in Branch::BOTH {
            let f = fidelity(&state, &adiabatic_state(params, n, b, trunc)?)?;
            if best.is_none_or(|(_, _, fb)| f > fb) {
                best = Some((n, b, f));
            }
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("no candidate labels".into()))
}

/// Entropy of a pUSC eigenstate to second order, `1 - n alpha^2 / 8`,
/// valid below the `n`-th first Juddian point.
pub fn pusc_entropy_validator(n: u32, alpha: f64) -> Result<f64> {
    check_pusc_domain(n, alpha, "pusc_entropy_validator")?;
    Ok(1.0 - n as f64 * alpha * alpha / 8.0)
}

/// Entropy of a pDSC eigenstate to leading order,
/// `1 - e^(-4 alpha^2) L_n(4 alpha^2)^2 / 2`.
pub fn pdsc_entropy_validator(n: u32, alpha: f64) -> f64 {
    let y = (-2.0 * alpha * alpha).exp() * laguerre(n, 4.0 * alpha * alpha);
    1.0 - 0.5 * y * y
}

fn check_pusc_domain(n: u32, alpha: f64, quantity: &'static str) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain {
            quantity,
            detail: "needs a doublet index n >= 1".into(),
        });
    }
    let bound = first_juddian_approx(n)?;
    if !(alpha >= 0.0 && alpha <= bound * (1.0 + 1e-12)) {
        return Err(Error::Domain {
            quantity,
            detail: format!("alpha = {alpha} outside [0, {bound}] for n = {n}"),
        });
    }
    Ok(())
}

/// `<n^2> - <n>^2 - <n>` of a pUSC eigenstate to second order in
/// `alpha = g0/omega`:
/// `(3/4 - n) +- alpha sqrt(n) / 4 - alpha^2 (4n^3 - 8n^2 - 13n + 10) / 16`.
pub fn pusc_q_numerator(n: u32, alpha: f64, branch: Branch) -> Result<f64> {
    check_pusc_domain(n, alpha, "pusc_q_numerator")?;
    let nf = n as f64;
    let poly = 4.0 * nf.powi(3) - 8.0 * nf * nf - 13.0 * nf + 10.0;
    Ok((0.75 - nf) + branch.sign() * alpha * nf.sqrt() / 4.0 - alpha * alpha * poly / 16.0)
}

/// Sign (`-1`, `0` or `+1`) of [`pusc_q_numerator`].
pub fn pusc_q_sign_validator(n: u32, alpha: f64, branch: Branch) -> Result<i32> {
    let v = pusc_q_numerator(n, alpha, branch)?;
    Ok(if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    })
}

/// Leading-order Fano-Mandel parameter of a pDSC eigenstate,
/// `n (2 alpha^2 - 1) / (n + alpha^2)`.
pub fn pdsc_fano_mandel(n: u32, alpha: f64) -> Option<f64> {
    let mean = n as f64 + alpha * alpha;
    if mean < 1e-12 {
        None
    } else {
        Some(n as f64 * (2.0 * alpha * alpha - 1.0) / mean)
    }
}
