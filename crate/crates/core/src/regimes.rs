//! Regime boundaries and the classification of `(g0/omega, E/omega)` points.
//!
//! Three regions are distinguished. The perturbative ultrastrong region (pUSC)
//! lies below the first Juddian crossings, where Bloch-Siegert states are
//! accurate. The perturbative deep-strong region (pDSC) lies above the
//! couplings where adiabatic doublets become degenerate to within `delta`.
//! Everything else is non-perturbative.

use crate::eigensolve::chain_eigen;
use crate::error::{Error, Result};
use crate::model::{build_dense_hamiltonian, JointState, ModelParams, Parity, Truncation};
use crate::special::{assoc_laguerre, laguerre};

/// Default pDSC degeneracy threshold.
pub const DEFAULT_DELTA_TH: f64 = 0.1;

/// Manifolds whose crossings feed the default boundary fit.
pub const DEFAULT_FIT_MANIFOLDS: std::ops::RangeInclusive<u32> = 1..=32;

/// `n`-th first Juddian point from the Bloch-Siegert doublets,
/// `g/omega = 1 / sqrt(2 (2n + 1))`.
pub fn first_juddian_approx(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("Juddian index starts at 1".into()));
    }
    Ok(1.0 / (2.0 * (2.0 * n as f64 + 1.0)).sqrt())
}

/// Upper coupling limit of the pUSC region, `1/sqrt(6)`.
pub fn pusc_g_max() -> f64 {
    1.0 / 6f64.sqrt()
}

/// Energy boundary of the pUSC region,
/// `g^-2 (1 - 2 g^4) / 4 - 1 + sqrt((5 - 2 g^2)(1 - 2 g^2)) / 4` with `g = g0/omega`.
pub fn pusc_boundary_energy(g: f64) -> Result<f64> {
    if !(g > 0.0 && g <= std::f64::consts::FRAC_1_SQRT_2) {
        return Err(Error::Domain {
            quantity: "pusc_boundary_energy",
            detail: format!("g/omega = {g} outside (0, 1/sqrt(2)]"),
        });
    }
    let g2 = g * g;
    let radicand = ((5.0 - 2.0 * g2) * (1.0 - 2.0 * g2)).max(0.0);
    Ok(0.25 / g2 * (1.0 - 2.0 * g2 * g2) - 1.0 + 0.25 * radicand.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JuddianMethod {
    /// The closed form of [`first_juddian_approx`].
    Approximate,
    /// A located sign change of two exact opposite-parity levels.
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JuddianPoint {
    /// For numeric points, the larger chain index of the crossing pair.
    pub n: u32,
    pub g_cross: f64,
    pub energy: f64,
    pub method: JuddianMethod,
    /// Chain positions of the crossing levels (numeric points only).
    pub plus_index: Option<usize>,
    pub minus_index: Option<usize>,
}

impl JuddianPoint {
    pub fn approximate(params: &ModelParams, n: u32) -> Result<Self> {
        use crate::perturbative::{bs_energy, Branch, BsLabel};
        let g = first_juddian_approx(n)? * params.omega();
        let at = params.with_coupling(g)?;
        let energy = bs_energy(&at, BsLabel::doublet(n, Branch::Plus)?) / params.omega();
        Ok(Self {
            n,
            g_cross: g / params.omega(),
            energy,
            method: JuddianMethod::Approximate,
            plus_index: None,
            minus_index: None,
        })
    }
}

/// Lowest `count` eigenvalues of both chains, in units of omega.
fn chain_values(base: &ModelParams, g: f64, count: usize, trunc: &Truncation) -> Result<[Vec<f64>; 2]> {
    let params = base.with_coupling(g * base.omega())?;
    let w = base.omega();
    let plus = chain_eigen(&params, trunc, Parity::Plus, Some(count), false)?;
    let minus = chain_eigen(&params, trunc, Parity::Minus, Some(count), false)?;
    Ok([
        plus.values.iter().map(|e| e / w).collect(),
        minus.values.iter().map(|e| e / w).collect(),
    ])
}

fn adjacent_in_energy(values: &[Vec<f64>; 2], a: f64, b: f64) -> bool {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let tol = 1e-9 * (1.0 + hi.abs());
    values
        .iter()
        .flatten()
        .filter(|&&e| e > lo + tol && e < hi - tol)
        .count()
        == 0
}

/// Exact level crossings between opposite-parity pairs among the lowest
/// `n_levels` levels of each chain, found by scanning `g_grid` (in units of
/// omega, ascending) for sign changes and refined by bisection to `1e-6`.
///
/// `base` supplies omega and Omega; its coupling is ignored. A pair is
/// reported only when no other level lies between the two at either end of
/// the bracketing grid interval.
pub fn juddian_points_numeric(
    base: &ModelParams,
    g_grid: &[f64],
    n_levels: usize,
    trunc: &Truncation,
) -> Result<Vec<JuddianPoint>> {
    if n_levels == 0 {
        return Err(Error::InvalidParameter("n_levels must be at least 1".into()));
    }
    if g_grid.iter().any(|&g| !g.is_finite() || g <= 0.0) || g_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "coupling grid must be positive and ascending".into(),
        ));
    }
    if n_levels + 1 > trunc.chain_len() {
        return Err(Error::Truncation {
            n_max: trunc.n_max(),
            reason: format!("{n_levels} levels per chain exceed the truncated space"),
        });
    }
    // one spectator level above the window so adjacency is judged correctly
    let count = n_levels + 1;
    let samples = g_grid
        .iter()
        .map(|&g| chain_values(base, g, count, trunc))
        .collect::<Result<Vec<_>>>()?;

    let mut points = Vec::new();
    for i in 0..n_levels {
        for j in 0..n_levels {
            for (k, pair) in samples.windows(2).enumerate() {
                let d0 = pair[0][0][i] - pair[0][1][j];
                let d1 = pair[1][0][i] - pair[1][1][j];
                if d0 == 0.0 || d0.signum() == d1.signum() {
                    continue;
                }
                let adjacent = adjacent_in_energy(&pair[0], pair[0][0][i], pair[0][1][j])
                    || adjacent_in_energy(&pair[1], pair[1][0][i], pair[1][1][j]);
                if !adjacent {
                    continue;
                }
                let (mut lo, mut hi) = (g_grid[k], g_grid[k + 1]);
                let mut d_lo = d0;
                while hi - lo > 1e-6 {
                    let mid = 0.5 * (lo + hi);
                    let v = chain_values(base, mid, count, trunc)?;
                    let d = v[0][i] - v[1][j];
                    if d == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if d.signum() == d_lo.signum() {
                        lo = mid;
                        d_lo = d;
                    } else {
                        hi = mid;
                    }
                }
                let g_cross = 0.5 * (lo + hi);
                let v = chain_values(base, g_cross, count, trunc)?;
                points.push(JuddianPoint {
                    n: i.max(j) as u32,
                    g_cross,
                    energy: 0.5 * (v[0][i] + v[1][j]),
                    method: JuddianMethod::Numeric,
                    plus_index: Some(i),
                    minus_index: Some(j),
                });
            }
        }
    }
    points.sort_by(|a, b| a.g_cross.total_cmp(&b.g_cross));
    Ok(points)
}

/// First sign change of `E_{n,+} - E_{n+1,-}` on `g_grid`, i.e. the crossing
/// of the `n`-th chain levels of each parity, refined to `1e-6`.
pub fn first_juddian_numeric(
    base: &ModelParams,
    n: u32,
    g_grid: &[f64],
    trunc: &Truncation,
) -> Result<Option<JuddianPoint>> {
    if n == 0 {
        return Err(Error::InvalidParameter("Juddian index starts at 1".into()));
    }
    let idx = n as usize;
    let points = juddian_points_numeric(base, g_grid, idx + 1, trunc)?;
    Ok(points
        .into_iter()
        .find(|p| p.plus_index == Some(idx) && p.minus_index == Some(idx)))
}

/// Doublet splitting measure `e^(-2 a^2) |L_n(4 a^2)|`.
pub fn doublet_splitting(n: u32, alpha: f64) -> f64 {
    let x = 4.0 * alpha * alpha;
    (-0.5 * x).exp() * laguerre(n, x).abs()
}

/// Largest coupling `alpha = g0/omega` at which the adiabatic doublet `n`
/// is split by `delta_th * omega`, i.e. the largest root of
/// `(Omega/omega) e^(-2 a^2) |L_n(4 a^2)| = delta_th`.
pub fn pdsc_crossing(n: u32, delta_th: f64, omega_q_over_omega: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("doublet index starts at 1".into()));
    }
    if !(delta_th > 0.0 && delta_th < 1.0) {
        return Err(Error::InvalidParameter(format!("delta_th = {delta_th} outside (0, 1)")));
    }
    if !(omega_q_over_omega > 0.0 && omega_q_over_omega.is_finite()) {
        return Err(Error::InvalidParameter("qubit splitting must be positive".into()));
    }
    let target = delta_th / omega_q_over_omega;
    let f = |a: f64| doublet_splitting(n, a);
    let signed = |a: f64| laguerre(n, 4.0 * a * a);

    let mut a_hi = (n as f64).sqrt() + 4.0;
    while f(a_hi) >= 0.1 * target {
        a_hi *= 1.5;
    }
    let steps = (a_hi / 1e-3).ceil() as usize;
    let grid = |k: usize| a_hi * k as f64 / steps as f64;

    // the outermost lobe starts at the last sign change of L_n
    let mut last_zero = 0;
    for k in 1..=steps {
        if signed(grid(k - 1)).signum() != signed(grid(k)).signum() {
            last_zero = k;
        }
    }
    let (mut k_peak, mut peak) = (last_zero, f(grid(last_zero)));
    for k in last_zero..=steps {
        let v = f(grid(k));
        if v > peak {
            peak = v;
            k_peak = k;
        }
    }
    if peak < target {
        return Err(Error::ThresholdTooLarge { n, delta: delta_th });
    }
    let (mut lo, mut hi) = (grid(k_peak), a_hi);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// First-order change of the largest root when the threshold moves by `d_delta`:
/// `-e^(2 a^2) d_delta / (4 a s (L_n(4a^2) + 2 L^(1)_(n-1)(4a^2)))`
/// with `s = sign L_n(4 a^2)`.
pub fn delta_sensitivity(n: u32, alpha: f64, d_delta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("doublet index starts at 1".into()));
    }
    let x = 4.0 * alpha * alpha;
    let l = laguerre(n, x);
    let denom = 4.0 * alpha * l.signum() * (l + 2.0 * assoc_laguerre(n - 1, 1, x));
    if alpha == 0.0 || l == 0.0 || denom.abs() < 1e-300 || !denom.is_finite() {
        return Err(Error::SingularSensitivity { alpha });
    }
    if d_delta == 0.0 {
        return Ok(0.0);
    }
    Ok(-(2.0 * alpha * alpha).exp() * d_delta / denom)
}

/// `n = a g^2 + b g + c`, or equivalently a pDSC energy boundary
/// `E/omega = (a - 1) g^2 + b g + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdscFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl PdscFit {
    pub fn boundary_energy(&self, g: f64) -> f64 {
        (self.a - 1.0) * g * g + self.b * g + self.c
    }

    /// Root-mean-square residual over `(g, midpoint energy)` points.
    pub fn residual_rms(&self, points: &[(f64, f64)]) -> f64 {
        if points.is_empty() {
            return 0.0;
        }
        let ss: f64 = points.iter().map(|&(g, e)| (e - self.boundary_energy(g)).powi(2)).sum();
        (ss / points.len() as f64).sqrt()
    }
}

fn solve3(mut m: [[f64; 3]; 3], mut rhs: [f64; 3]) -> Option<[f64; 3]> {
    let scale = m.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() <= 1e-13 * scale {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (v, p) in m[row].iter_mut().zip(pivot_row).skip(col) {
                *v -= f * p;
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (rhs[row] - tail) / m[row][row];
    }
    Some(x)
}

/// Least-squares quadratic through `(g, E_mid)` points, where `E_mid/omega =
/// n - g^2` is the doublet midpoint; the fit is made to `E_mid + g^2`.
pub fn fit_pdsc_boundary(points: &[(f64, f64)]) -> Result<PdscFit> {
    if points.len() < 3 {
        return Err(Error::FitFailure(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    let mut normal = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for &(g, e) in points {
        let basis = [g * g, g, 1.0];
        let y = e + g * g;
        for r in 0..3 {
            for c in 0..3 {
                normal[r][c] += basis[r] * basis[c];
            }
            rhs[r] += basis[r] * y;
        }
    }
    let [a, b, c] = solve3(normal, rhs)
        .ok_or_else(|| Error::FitFailure("rank-deficient design: fewer than 3 distinct couplings".into()))?;
    Ok(PdscFit { a, b, c })
}

/// `(n, g_cross)` rows for each doublet index in `ns`.
pub fn crossing_table(ns: impl IntoIterator<Item = u32>, delta_th: f64) -> Result<Vec<(u32, f64)>> {
    ns.into_iter()
        .map(|n| pdsc_crossing(n, delta_th, 1.0).map(|g| (n, g)))
        .collect()
}

/// Fit points `(g_cross, n - g_cross^2)` from a crossing table.
pub fn midpoint_points(table: &[(u32, f64)]) -> Vec<(f64, f64)> {
    table.iter().map(|&(n, g)| (g, n as f64 - g * g)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurves {
    pub pusc_g_max: f64,
    pub pdsc_fit: PdscFit,
    pub delta_th: f64,
    pub pdsc_g_min: f64,
    /// Doublet indices whose crossings entered the fit.
    pub fitted_manifolds: Vec<u32>,
}

impl BoundaryCurves {
    /// Resonant boundaries for the threshold `delta_th`, fitted over
    /// [`DEFAULT_FIT_MANIFOLDS`].
    pub fn build(delta_th: f64) -> Result<Self> {
        Self::build_with(delta_th, DEFAULT_FIT_MANIFOLDS)
    }

    /// Manifolds whose outer lobe never reaches `delta_th` have no crossing
    /// and are left out of the fit.
    pub fn build_with(delta_th: f64, manifolds: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut table = Vec::new();
        for n in manifolds {
            match pdsc_crossing(n, delta_th, 1.0) {
                Ok(g) => table.push((n, g)),
                Err(Error::ThresholdTooLarge { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        let pdsc_fit = fit_pdsc_boundary(&midpoint_points(&table))?;
        Ok(Self {
            pusc_g_max: pusc_g_max(),
            pdsc_fit,
            delta_th,
            pdsc_g_min: pdsc_crossing(1, delta_th, 1.0)?,
            fitted_manifolds: table.iter().map(|&(n, _)| n).collect(),
        })
    }

    pub fn pdsc_boundary_energy(&self, g: f64) -> f64 {
        self.pdsc_fit.boundary_energy(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    PerturbativeUSC,
    NonPerturbative,
    PerturbativeDSC,
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Region::PerturbativeUSC => "PerturbativeUSC",
            Region::NonPerturbative => "NonPerturbative",
            Region::PerturbativeDSC => "PerturbativeDSC",
        })
    }
}

/// Signed distances (units of omega) to each boundary; positive means the
/// condition of that perturbative region holds with room to spare.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margins {
    pub pusc_coupling: f64,
    /// `None` when the coupling is past `1/sqrt(6)` and the curve is not evaluated.
    pub pusc_energy: Option<f64>,
    pub pdsc_coupling: f64,
    pub pdsc_energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeLabel {
    pub region: Region,
    pub margins: Margins,
}

/// Assign a region to the point `(g0/omega, E/omega)`. Points on a boundary
/// belong to the perturbative side.
pub fn classify(g: f64, mean_energy: f64, curves: &BoundaryCurves) -> Result<RegimeLabel> {
    if !(g >= 0.0 && g.is_finite()) || !mean_energy.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "classification needs finite g >= 0 and energy, got ({g}, {mean_energy})"
        )));
    }
    let pusc_coupling = curves.pusc_g_max - g;
    let pusc_energy = if pusc_coupling < 0.0 {
        None
    } else if g == 0.0 {
        Some(f64::INFINITY)
    } else {
        Some(pusc_boundary_energy(g)? - mean_energy)
    };
    let pdsc_coupling = g - curves.pdsc_g_min;
    let pdsc_energy = curves.pdsc_boundary_energy(g) - mean_energy;

    let in_pusc = pusc_energy.is_some_and(|m| m >= 0.0);
    let in_pdsc = pdsc_coupling >= 0.0 && pdsc_energy >= 0.0;
    let region = match (in_pusc, in_pdsc) {
        (true, true) => return Err(Error::InconsistentRegions { g, energy: mean_energy }),
        (true, false) => Region::PerturbativeUSC,
        (false, true) => Region::PerturbativeDSC,
        (false, false) => Region::NonPerturbative,
    };
    Ok(RegimeLabel {
        region,
        margins: Margins {
            pusc_coupling,
            pusc_energy,
            pdsc_coupling,
            pdsc_energy,
        },
    })
}

/// `<psi| H |psi>` through the dense Hamiltonian at cutoff `trunc`.
pub fn mean_energy(state: &JointState, params: &ModelParams, trunc: &Truncation) -> Result<f64> {
    let state = state.resized(trunc.n_max())?;
    let h = build_dense_hamiltonian(params, trunc);
    let re: Vec<f64> = state.amplitudes().iter().map(|a| a.re).collect();
    let im: Vec<f64> = state.amplitudes().iter().map(|a| a.im).collect();
    let quad = |v: &[f64]| -> f64 { h.matvec(v).iter().zip(v).map(|(a, b)| a * b).sum() };
    Ok(quad(&re) + quad(&im))
}
