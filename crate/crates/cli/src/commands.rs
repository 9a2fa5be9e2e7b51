use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use rabi_core::dynamics::{revival_profile, time_grid, EvolutionPlan, DEFAULT_DT};
use rabi_core::eigensolve::{converged_spectrum, spectrum_at, Level, Spectrum};
use rabi_core::model::DEFAULT_TAIL_TOL;
use rabi_core::observables::{
    adiabatic_photon_distribution, count_modes, distribution_center, fano_mandel, photon_distribution,
    reduced_qubit_density, total_excitations, total_variation_distance, von_neumann_entropy, MODE_PROMINENCE_FLOOR,
};
use rabi_core::perturbative::{adiabatic_energy, adiabatic_label_from_chain, bs3_energy, bs_energy, BsLabel};
use rabi_core::regimes::{
    classify as classify_point, mean_energy, pdsc_crossing, pusc_boundary_energy, BoundaryCurves, JuddianPoint,
    DEFAULT_DELTA_TH,
};
use rabi_core::{ModelParams, Parity, Truncation};

use crate::output::{json_num, Cell, Table};
use crate::{state_spec, CliError, Common, Outcome};

const ENERGY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Args, Serialize)]
pub struct Scan {
    /// Smallest coupling g0/omega.
    #[arg(long, default_value_t = 0.0)]
    pub g_min: f64,
    /// Largest coupling g0/omega.
    #[arg(long, default_value_t = 1.0)]
    pub g_max: f64,
    /// Number of grid points (one point uses g-min only).
    #[arg(long, default_value_t = 11)]
    pub g_steps: usize,
    /// Lowest levels reported per grid point.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
}

impl Scan {
    fn grid(&self) -> Result<Vec<f64>, CliError> {
        if !(self.g_min >= 0.0 && self.g_min.is_finite() && self.g_max.is_finite()) {
            return Err(CliError::Usage("couplings must be finite and non-negative".into()));
        }
        if self.g_min > self.g_max {
            return Err(CliError::Usage(format!(
                "g-min {} exceeds g-max {}",
                self.g_min, self.g_max
            )));
        }
        if self.g_steps == 0 || self.levels == 0 {
            return Err(CliError::Usage("g-steps and levels must be at least 1".into()));
        }
        Ok(linspace(self.g_min, self.g_max, self.g_steps))
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn params(common: &Common, g: f64) -> Result<ModelParams, CliError> {
    ModelParams::new(1.0, common.omega_q, g).map_err(|e| CliError::Usage(e.to_string()))
}

fn config_json<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("arguments serialize")
}

/// Lowest `levels` levels, converged or at the fixed cutoff.
fn lowest_levels(p: &ModelParams, levels: usize, nmax: Option<usize>) -> rabi_core::Result<Spectrum> {
    let mut spec = match nmax {
        Some(n) => spectrum_at(p, &Truncation::with_nmax(n)?)?,
        None => converged_spectrum(p, levels, ENERGY_TOL)?,
    };
    spec.levels.truncate(levels);
    Ok(spec)
}

fn parity_text(p: Parity) -> Cell {
    Cell::Text(p.to_string())
}

fn error_row(width: usize, g: f64, status: String) -> Vec<Cell> {
    let mut row = vec![Cell::Num(g)];
    row.extend((1..width - 1).map(|_| Cell::Empty));
    row.push(Cell::Text(status));
    row
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub scan: Scan,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

pub fn spectrum(args: &SpectrumArgs) -> Result<Outcome, CliError> {
    let grid = args.scan.grid()?;
    for &g in &grid {
        params(&args.common, g)?;
    }
    let columns = vec![
        "g",
        "level",
        "parity",
        "chain_index",
        "energy",
        "energy_over_g2",
        "bs_label",
        "energy_bs",
        "energy_bs3",
        "adiabatic_label",
        "energy_adiabatic",
        "status",
    ];
    let width = columns.len();
    let blocks: Vec<(Vec<Vec<Cell>>, bool)> = grid
        .par_iter()
        .map(|&g| {
            let p = params(&args.common, g).expect("validated");
            match lowest_levels(&p, args.scan.levels, args.common.nmax) {
                Ok(spec) => (
                    spec.levels
                        .iter()
                        .enumerate()
                        .map(|(i, l)| spectrum_row(&p, g, i, l))
                        .collect(),
                    false,
                ),
                Err(e) => (vec![error_row(width, g, format!("error: {e}"))], true),
            }
        })
        .collect();
    let mut table = Table::new("spectrum", config_json(args), columns);
    let mut failed = false;
    for (rows, bad) in blocks {
        failed |= bad;
        rows.into_iter().for_each(|r| table.push(r));
    }
    Ok(Outcome { table, failed })
}

fn spectrum_row(p: &ModelParams, g: f64, index: usize, level: &Level) -> Vec<Cell> {
    let bs = BsLabel::from_chain(level.parity, level.chain_index);
    let (an, ab) = adiabatic_label_from_chain(level.parity, level.chain_index);
    vec![
        g.into(),
        index.into(),
        parity_text(level.parity),
        level.chain_index.into(),
        level.energy.into(),
        (g > 0.0).then(|| level.energy / (g * g)).into(),
        bs.to_string().into(),
        bs_energy(p, bs).into(),
        bs3_energy(p, bs).into(),
        format!("{an},{ab}").into(),
        adiabatic_energy(p, an, ab).into(),
        "ok".into(),
    ]
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundariesArgs {
    /// Degeneracy threshold delta of the deep-strong boundary.
    #[arg(long, default_value_t = DEFAULT_DELTA_TH)]
    pub delta_th: f64,
    /// Samples per boundary curve.
    #[arg(long, default_value_t = 50)]
    pub g_steps: usize,
    /// Upper end of the sampled deep-strong curve.
    #[arg(long, default_value_t = 6.0)]
    pub g_max: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

pub fn boundaries(args: &BoundariesArgs) -> Result<Outcome, CliError> {
    if !(args.delta_th > 0.0 && args.delta_th < 1.0) {
        return Err(CliError::Usage(format!("delta-th {} outside (0, 1)", args.delta_th)));
    }
    if args.g_steps < 2 {
        return Err(CliError::Usage("g-steps must be at least 2".into()));
    }
    let mut table = Table::new(
        "boundaries",
        config_json(args),
        vec!["section", "key", "g", "value", "status"],
    );
    let mut failed = false;
    let resonant = ModelParams::resonant(0.0)?;

    for n in 1..=12u32 {
        match JuddianPoint::approximate(&resonant, n) {
            Ok(pt) => table.push(vec![
                "juddian_approx".into(),
                n.into(),
                pt.g_cross.into(),
                pt.energy.into(),
                "ok".into(),
            ]),
            Err(e) => {
                failed = true;
                table.push(vec![
                    "juddian_approx".into(),
                    n.into(),
                    Cell::Empty,
                    Cell::Empty,
                    format!("error: {e}").into(),
                ]);
            }
        }
    }
    for n in 1..=12u32 {
        match pdsc_crossing(n, args.delta_th, args.common.omega_q) {
            Ok(g) => table.push(vec![
                "crossings".into(),
                n.into(),
                g.into(),
                (n as f64 - g * g).into(),
                "ok".into(),
            ]),
            Err(e) => {
                failed = true;
                table.push(vec![
                    "crossings".into(),
                    n.into(),
                    Cell::Empty,
                    Cell::Empty,
                    format!("error: {e}").into(),
                ]);
            }
        }
    }

    match BoundaryCurves::build(args.delta_th) {
        Ok(curves) => {
            let fit = curves.pdsc_fit;
            let points: Vec<(f64, f64)> = curves
                .fitted_manifolds
                .iter()
                .filter_map(|&n| pdsc_crossing(n, args.delta_th, 1.0).ok().map(|g| (g, n as f64 - g * g)))
                .collect();
            let scalars = [
                ("a", fit.a),
                ("b", fit.b),
                ("c", fit.c),
                ("residual_rms", fit.residual_rms(&points)),
                ("fitted_manifolds", curves.fitted_manifolds.len() as f64),
                ("pdsc_g_min", curves.pdsc_g_min),
                ("pusc_g_max", curves.pusc_g_max),
                ("delta_th", curves.delta_th),
            ];
            for (key, value) in scalars {
                table.push(vec!["fit".into(), key.into(), Cell::Empty, value.into(), "ok".into()]);
            }
            for (k, g) in linspace(curves.pusc_g_max / args.g_steps as f64, curves.pusc_g_max, args.g_steps)
                .into_iter()
                .enumerate()
            {
                let e = pusc_boundary_energy(g)?;
                table.push(vec!["pusc_curve".into(), k.into(), g.into(), e.into(), "ok".into()]);
            }
            let hi = args.g_max.max(curves.pdsc_g_min);
            for (k, g) in linspace(curves.pdsc_g_min, hi, args.g_steps).into_iter().enumerate() {
                table.push(vec![
                    "pdsc_curve".into(),
                    k.into(),
                    g.into(),
                    curves.pdsc_boundary_energy(g).into(),
                    "ok".into(),
                ]);
            }
        }
        Err(e) => {
            failed = true;
            table.push(vec![
                "fit".into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                format!("error: {e}").into(),
            ]);
        }
    }
    Ok(Outcome { table, failed })
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["state", "energy"])))]
pub struct ClassifyArgs {
    /// Coupling g0/omega.
    #[arg(long)]
    pub g: f64,
    /// Basis ket (g0, e3, ...) or amplitude file whose mean energy is classified.
    #[arg(long)]
    pub state: Option<String>,
    /// Mean energy E/omega to classify directly.
    #[arg(long, allow_hyphen_values = true)]
    pub energy: Option<f64>,
    /// Degeneracy threshold delta of the deep-strong boundary.
    #[arg(long, default_value_t = DEFAULT_DELTA_TH)]
    pub delta_th: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

pub fn classify(args: &ClassifyArgs) -> Result<Outcome, CliError> {
    if !(args.g >= 0.0 && args.g.is_finite()) {
        return Err(CliError::Usage(format!(
            "g must be finite and non-negative, got {}",
            args.g
        )));
    }
    if !(args.delta_th > 0.0 && args.delta_th < 1.0) {
        return Err(CliError::Usage(format!("delta-th {} outside (0, 1)", args.delta_th)));
    }
    let p = params(&args.common, args.g)?;
    let (energy, n_max) = match (&args.state, args.energy) {
        (Some(spec), _) => {
            let psi = state_spec::resolve(spec).map_err(CliError::Usage)?;
            let n_max = args.common.nmax.unwrap_or_else(|| p.default_nmax().max(psi.n_max()));
            let trunc = Truncation::with_nmax(n_max).map_err(|e| CliError::Usage(e.to_string()))?;
            (mean_energy(&psi, &p, &trunc)?, Some(n_max))
        }
        (None, Some(e)) if e.is_finite() => (e, None),
        (None, Some(e)) => return Err(CliError::Usage(format!("energy must be finite, got {e}"))),
        (None, None) => unreachable!("clap requires one input"),
    };
    let curves = BoundaryCurves::build(args.delta_th)?;
    let label = classify_point(args.g, energy, &curves)?;
    let m = label.margins;
    let pusc_curve = (args.g > 0.0 && args.g <= curves.pusc_g_max)
        .then(|| pusc_boundary_energy(args.g))
        .transpose()?;
    let pdsc_curve = curves.pdsc_boundary_energy(args.g);

    let mut table = Table::new(
        "classify",
        config_json(args),
        vec![
            "region",
            "g",
            "mean_energy",
            "pusc_coupling_margin",
            "pusc_energy_margin",
            "pdsc_coupling_margin",
            "pdsc_energy_margin",
            "pusc_boundary_energy",
            "pdsc_boundary_energy",
        ],
    );
    table.push(vec![
        label.region.to_string().into(),
        args.g.into(),
        energy.into(),
        m.pusc_coupling.into(),
        m.pusc_energy.into(),
        m.pdsc_coupling.into(),
        m.pdsc_energy.into(),
        pusc_curve.into(),
        pdsc_curve.into(),
    ]);
    let opt = |x: Option<f64>| x.map_or(Value::Null, json_num);
    table.body = Some(json!({
        "region": label.region.to_string(),
        "g": json_num(args.g),
        "mean_energy": json_num(energy),
        "n_max": n_max,
        "margins": {
            "pusc_coupling": json_num(m.pusc_coupling),
            "pusc_energy": opt(m.pusc_energy),
            "pdsc_coupling": json_num(m.pdsc_coupling),
            "pdsc_energy": json_num(m.pdsc_energy),
        },
        "boundaries": {
            "pusc_g_max": json_num(curves.pusc_g_max),
            "pusc_energy_at_g": opt(pusc_curve),
            "pdsc_g_min": json_num(curves.pdsc_g_min),
            "pdsc_energy_at_g": json_num(pdsc_curve),
            "pdsc_fit": [json_num(curves.pdsc_fit.a), json_num(curves.pdsc_fit.b), json_num(curves.pdsc_fit.c)],
            "delta_th": json_num(curves.delta_th),
            "rule": "points on a boundary belong to the perturbative region",
        },
        "resonant": p.is_resonant(),
    }));
    Ok(Outcome { table, failed: false })
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ObservablesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub scan: Scan,
    /// Dump the photon distribution of one level instead of a sweep.
    #[arg(long)]
    pub dump_distribution: bool,
    /// Coupling of the dumped level.
    #[arg(long, requires = "dump_distribution")]
    pub g: Option<f64>,
    /// Energy-ordered index of the dumped level.
    #[arg(long, default_value_t = 0)]
    pub level: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

pub fn observables(args: &ObservablesArgs) -> Result<Outcome, CliError> {
    if args.dump_distribution {
        return dump_distribution(args);
    }
    let grid = args.scan.grid()?;
    for &g in &grid {
        params(&args.common, g)?;
    }
    let columns = vec![
        "g",
        "level",
        "parity",
        "chain_index",
        "energy",
        "excitations",
        "fano_mandel",
        "entropy",
        "status",
    ];
    let width = columns.len();
    let blocks: Vec<(Vec<Vec<Cell>>, bool)> = grid
        .par_iter()
        .map(|&g| {
            let p = params(&args.common, g).expect("validated");
            match lowest_levels(&p, args.scan.levels, args.common.nmax) {
                Ok(spec) => {
                    let rows = spec
                        .levels
                        .iter()
                        .enumerate()
                        .map(|(i, l)| {
                            vec![
                                g.into(),
                                i.into(),
                                parity_text(l.parity),
                                l.chain_index.into(),
                                l.energy.into(),
                                total_excitations(&l.state).into(),
                                fano_mandel(&l.state).into(),
                                von_neumann_entropy(&reduced_qubit_density(&l.state)).into(),
                                "ok".into(),
                            ]
                        })
                        .collect();
                    (rows, false)
                }
                Err(e) => (vec![error_row(width, g, format!("error: {e}"))], true),
            }
        })
        .collect();
    let mut table = Table::new("observables", config_json(args), columns);
    let mut failed = false;
    for (rows, bad) in blocks {
        failed |= bad;
        rows.into_iter().for_each(|r| table.push(r));
    }
    Ok(Outcome { table, failed })
}

fn dump_distribution(args: &ObservablesArgs) -> Result<Outcome, CliError> {
    let g = args
        .g
        .ok_or_else(|| CliError::Usage("--dump-distribution needs --g".into()))?;
    let p = params(&args.common, g)?;
    let spec = lowest_levels(&p, args.level + 1, args.common.nmax)?;
    let level = spec
        .levels
        .get(args.level)
        .ok_or_else(|| CliError::Usage(format!("level {} not available", args.level)))?;
    let dist = photon_distribution(&level.state);
    let (an, ab) = adiabatic_label_from_chain(level.parity, level.chain_index);
    let model = adiabatic_photon_distribution(an, p.alpha(), dist.len() - 1);

    let mut table = Table::new(
        "observables-distribution",
        config_json(args),
        vec!["m", "p_exact", "p_adiabatic"],
    );
    for (m, (pe, pa)) in dist.iter().zip(&model).enumerate() {
        table.push(vec![m.into(), (*pe).into(), (*pa).into()]);
    }
    table.summary = Some(json!({
        "g": json_num(g),
        "level": args.level,
        "parity": level.parity.to_string(),
        "chain_index": level.chain_index,
        "energy": json_num(level.energy),
        "adiabatic_label": format!("{an},{ab}"),
        "modes": count_modes(&dist),
        "center": distribution_center(&dist).map_or(Value::Null, json_num),
        "prominence_floor": json_num(MODE_PROMINENCE_FLOOR),
        "tvd_to_adiabatic": json_num(total_variation_distance(&dist, &model)),
        "n_max": spec.trunc.n_max(),
    }));
    Ok(Outcome { table, failed: false })
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DynamicsArgs {
    /// Coupling g0/omega.
    #[arg(long)]
    pub g: f64,
    /// Initial state: basis ket (g0, e3, ...) or amplitude file.
    #[arg(long, default_value = "g0")]
    pub state: String,
    /// Final time omega t.
    #[arg(long, default_value_t = 20.0)]
    pub t_max: f64,
    /// Sampling step in units of 1/omega.
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

pub fn dynamics(args: &DynamicsArgs) -> Result<Outcome, CliError> {
    if !(args.g >= 0.0 && args.g.is_finite()) {
        return Err(CliError::Usage(format!(
            "g must be finite and non-negative, got {}",
            args.g
        )));
    }
    let times = time_grid(args.t_max, args.dt).map_err(|e| CliError::Usage(e.to_string()))?;
    let p = params(&args.common, args.g)?;
    let psi = state_spec::resolve(&args.state).map_err(CliError::Usage)?;
    let parity = psi.definite_parity(1e-12).ok_or_else(|| {
        let (a, b) = psi.parity_weights();
        CliError::Usage(format!(
            "initial state mixes parities (weights {a:.3e} and {b:.3e}); dynamics needs a definite parity"
        ))
    })?;
    let start = args.common.nmax.unwrap_or_else(|| p.default_nmax());
    let plan = EvolutionPlan::starting_at(&p, &psi, DEFAULT_TAIL_TOL, start)?;

    let rows: Vec<rabi_core::Result<(f64, f64, f64)>> = times
        .par_iter()
        .map(|&t| {
            let (wp, wm) = plan.evolve(t)?.parity_weights();
            let leak = if parity == Parity::Plus { wm } else { wp };
            Ok((t, plan.survival_probability(t), leak))
        })
        .collect();
    let mut table = Table::new("dynamics", config_json(args), vec!["t", "survival", "leakage"]);
    let mut min_survival = 1.0f64;
    let mut max_leak = 0.0f64;
    for row in rows {
        let (t, s, l) = row?;
        min_survival = min_survival.min(s);
        max_leak = max_leak.max(l);
        table.push(vec![t.into(), s.into(), l.into()]);
    }
    let revivals = match revival_profile(&plan, &times) {
        Ok(peaks) => json!(peaks
            .iter()
            .map(|&(t, h)| [json_num(t), json_num(h)])
            .collect::<Vec<_>>()),
        Err(_) => Value::Null,
    };
    table.summary = Some(json!({
        "revivals": revivals,
        "revival_rule": "local maxima >= 0.2 with prominence >= 0.1 after t = 0; needs samples over [0, 4 pi] with step <= 0.01",
        "min_survival": json_num(min_survival),
        "max_leakage": json_num(max_leak),
        "captured_weight": json_num(plan.captured_weight()),
        "n_max": plan.truncation().n_max(),
        "parity": parity.to_string(),
    }));
    Ok(Outcome { table, failed: false })
}
