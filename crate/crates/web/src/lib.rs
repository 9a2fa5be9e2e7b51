//! Browser bindings for the static demo in `www/`.
//!
//! Every export is a thin wrapper over a plain Rust function in [`api`], so
//! the same code runs (and is tested) natively.

use wasm_bindgen::prelude::*;

pub mod api {
    use std::cell::RefCell;

    use rabi_core::dynamics::{time_grid, EvolutionPlan};
    use rabi_core::eigensolve::converged_spectrum;
    use rabi_core::model::{Qubit, DEFAULT_TAIL_TOL};
    use rabi_core::regimes::{classify, mean_energy, BoundaryCurves};
    use rabi_core::{JointState, ModelParams, Truncation};

    pub const MAX_GRID: usize = 2000;
    pub const MAX_LEVELS: usize = 40;

    thread_local! {
        static CURVES: RefCell<Option<BoundaryCurves>> = const { RefCell::new(None) };
    }

    fn curves(delta_th: f64) -> Result<BoundaryCurves, String> {
        CURVES.with(|cell| {
            let mut slot = cell.borrow_mut();
            match slot.as_ref() {
                Some(c) if c.delta_th == delta_th => Ok(c.clone()),
                _ => {
                    let c = BoundaryCurves::build(delta_th).map_err(|e| e.to_string())?;
                    *slot = Some(c.clone());
                    Ok(c)
                }
            }
        })
    }

    fn ket(excited: bool, n: usize) -> Result<JointState, String> {
        let q = if excited { Qubit::Excited } else { Qubit::Ground };
        JointState::basis(q, n, n.max(1)).map_err(|e| e.to_string())
    }

    /// Rows of `[g, E_0, ..., E_{levels-1}]`, flattened.
    pub fn spectrum_curves(omega_q: f64, g_max: f64, steps: usize, levels: usize) -> Result<Vec<f64>, String> {
        if !(2..=MAX_GRID).contains(&steps) || !(1..=MAX_LEVELS).contains(&levels) {
            return Err(format!("need 2..={MAX_GRID} steps and 1..={MAX_LEVELS} levels"));
        }
        let mut out = Vec::with_capacity(steps * (levels + 1));
        for k in 0..steps {
            let g = g_max * k as f64 / (steps - 1) as f64;
            let p = ModelParams::new(1.0, omega_q, g).map_err(|e| e.to_string())?;
            let spec = converged_spectrum(&p, levels, 1e-8).map_err(|e| e.to_string())?;
            out.push(g);
            out.extend(spec.energies().into_iter().take(levels));
        }
        Ok(out)
    }

    /// Survival probability of a bare ket on `0, dt, ..., t_max`.
    pub fn survival_trace(
        omega_q: f64,
        g: f64,
        excited: bool,
        n: usize,
        t_max: f64,
        dt: f64,
    ) -> Result<Vec<f64>, String> {
        let times = time_grid(t_max, dt).map_err(|e| e.to_string())?;
        if times.len() > 50 * MAX_GRID {
            return Err("time grid too fine".into());
        }
        let p = ModelParams::new(1.0, omega_q, g).map_err(|e| e.to_string())?;
        let plan = EvolutionPlan::new(&p, &ket(excited, n)?, DEFAULT_TAIL_TOL).map_err(|e| e.to_string())?;
        Ok(plan.survival_trace(&times))
    }

    /// Region index (0 pUSC, 1 non-perturbative, 2 pDSC) of a point in the
    /// `(g, E)` plane.
    pub fn region_code(g: f64, energy: f64, delta_th: f64) -> Result<u8, String> {
        let label = classify(g, energy, &curves(delta_th)?).map_err(|e| e.to_string())?;
        Ok(label.region as u8)
    }

    /// Region codes over a `cols x rows` raster, row 0 at `e_max`.
    pub fn regime_map(
        g_max: f64,
        e_min: f64,
        e_max: f64,
        cols: usize,
        rows: usize,
        delta_th: f64,
    ) -> Result<Vec<u8>, String> {
        if cols * rows > MAX_GRID * MAX_GRID / 4 || cols < 2 || rows < 2 {
            return Err("raster size out of range".into());
        }
        let curves = curves(delta_th)?;
        let mut out = Vec::with_capacity(cols * rows);
        for r in 0..rows {
            let e = e_max - (e_max - e_min) * r as f64 / (rows - 1) as f64;
            for c in 0..cols {
                let g = g_max * c as f64 / (cols - 1) as f64;
                let region = classify(g, e, &curves).map_err(|e| e.to_string())?.region;
                out.push(region as u8);
            }
        }
        Ok(out)
    }

    /// Mean energy of a bare ket, its region and the margins to both
    /// boundaries: `[energy, region, pusc_coupling, pusc_energy, pdsc_coupling, pdsc_energy]`,
    /// with NaN where a margin is undefined.
    pub fn classify_ket(omega_q: f64, g: f64, excited: bool, n: usize, delta_th: f64) -> Result<Vec<f64>, String> {
        let p = ModelParams::new(1.0, omega_q, g).map_err(|e| e.to_string())?;
        let psi = ket(excited, n)?;
        let trunc = Truncation::with_nmax(p.default_nmax().max(n + 1)).map_err(|e| e.to_string())?;
        let energy = mean_energy(&psi, &p, &trunc).map_err(|e| e.to_string())?;
        let label = classify(g, energy, &curves(delta_th)?).map_err(|e| e.to_string())?;
        let m = label.margins;
        Ok(vec![
            energy,
            label.region as u8 as f64,
            m.pusc_coupling,
            m.pusc_energy.unwrap_or(f64::NAN),
            m.pdsc_coupling,
            m.pdsc_energy,
        ])
    }

}

fn js(r: Result<Vec<f64>, String>) -> Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = spectrumCurves)]
pub fn spectrum_curves(omega_q: f64, g_max: f64, steps: usize, levels: usize) -> Result<Vec<f64>, JsError> {
    js(api::spectrum_curves(omega_q, g_max, steps, levels))
}

#[wasm_bindgen(js_name = survivalTrace)]
pub fn survival_trace(omega_q: f64, g: f64, excited: bool, n: usize, t_max: f64, dt: f64) -> Result<Vec<f64>, JsError> {
    js(api::survival_trace(omega_q, g, excited, n, t_max, dt))
}

#[wasm_bindgen(js_name = regimeMap)]
pub fn regime_map(
    g_max: f64,
    e_min: f64,
    e_max: f64,
    cols: usize,
    rows: usize,
    delta_th: f64,
) -> Result<Vec<u8>, JsError> {
    api::regime_map(g_max, e_min, e_max, cols, rows, delta_th).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = classifyKet)]
pub fn classify_ket(omega_q: f64, g: f64, excited: bool, n: usize, delta_th: f64) -> Result<Vec<f64>, JsError> {
    js(api::classify_ket(omega_q, g, excited, n, delta_th))
}

#[wasm_bindgen(js_name = regionAt)]
pub fn region_at(g: f64, energy: f64, delta_th: f64) -> Result<u8, JsError> {
    api::region_code(g, energy, delta_th).map_err(|e| JsError::new(&e))
}
