//! Acceptance criteria 1-11. Runs without the libtest harness so that every
//! criterion prints one `PASS`/`FAIL` line with its measured quantities; the
//! process exits non-zero when any criterion fails.

use std::cell::Cell;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rabi_core::dynamics::{parity_confinement, revival_profile, time_grid, EvolutionPlan};
use rabi_core::eigensolve::{
    converged_spectrum, converged_spectrum_with, dense_sym_eigen, spectrum_at, ConvergenceOptions, Spectrum,
};
use rabi_core::matrix::Matrix;
use rabi_core::model::{build_dense_hamiltonian, parity_of_basis_state, Qubit, DEFAULT_TAIL_TOL};
use rabi_core::observables::{
    adiabatic_photon_distribution, distribution_center, fano_mandel, fidelity, photon_distribution, photon_moments,
    pusc_entropy_validator, reduced_qubit_density, total_excitations, total_variation_distance, von_neumann_entropy,
};
use rabi_core::perturbative::{
    adiabatic_energy, adiabatic_parity, adiabatic_state, bs3_energy, bs_eigenstate, bs_energy, Branch, BsLabel,
};
use rabi_core::regimes::{
    classify, crossing_table, first_juddian_approx, first_juddian_numeric, fit_pdsc_boundary, mean_energy,
    midpoint_points, pdsc_crossing, BoundaryCurves,
};
use rabi_core::special::displacement_element;
use rabi_core::{JointState, ModelParams, Truncation};

thread_local! {
    static VERDICT: Cell<Option<bool>> = const { Cell::new(None) };
}

fn report(id: u32, pass: bool, started: Instant, detail: &str) {
    println!(
        "{} criterion {id}: {detail} [{:.2} s]",
        if pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    VERDICT.with(|v| v.set(Some(pass)));
}

fn resonant(g: f64) -> ModelParams {
    ModelParams::resonant(g).unwrap()
}

/// Converged spectrum whose cutoff also leaves room for displaced states.
fn spectrum_with_room(params: &ModelParams, k: usize, room: usize) -> Spectrum {
    let opts = ConvergenceOptions {
        start_nmax: Some(params.default_nmax().max(room)),
        ..Default::default()
    };
    converged_spectrum_with(params, k, &opts).unwrap()
}

fn displaced_room(alpha: f64, n: u32) -> usize {
    (alpha * alpha + 6.0 * alpha + n as f64).ceil() as usize + 8
}

/// The exact level continued from the adiabatic label `(n, branch)`.
fn exact_adiabatic_level(spec: &Spectrum, n: u32, b: Branch) -> &rabi_core::eigensolve::Level {
    spec.chain_level(adiabatic_parity(n, b), n as usize).unwrap()
}

const TABULATED_CROSSINGS: [f64; 12] = [
    1.473, 1.778, 2.035, 2.261, 2.466, 2.656, 2.832, 2.998, 3.155, 3.304, 3.447, 3.584,
];

fn criterion_01_crossing_table() {
    let t0 = Instant::now();
    let table = crossing_table(1..=12, 0.1).unwrap();
    let worst = table
        .iter()
        .zip(TABULATED_CROSSINGS)
        .map(|(&(_, g), want)| (g - want).abs())
        .fold(0.0, f64::max);
    let pass = worst <= 1e-3 + 1e-12 && t0.elapsed().as_secs_f64() < 1.0;
    report(1, pass, t0, &format!("max |g_cross - table| = {worst:.2e} (tol 1e-3)"));
}

fn criterion_02_fit_coefficients() {
    let t0 = Instant::now();
    let table = crossing_table(1..=32, 0.1).unwrap();
    let fit = fit_pdsc_boundary(&midpoint_points(&table)).unwrap();
    let (da, db, dc) = ((fit.a - 1.0425).abs(), (fit.b + 0.054478).abs(), (fit.c + 1.1987).abs());
    let pass = da <= 0.02 && db <= 0.02 && dc <= 0.05 && t0.elapsed().as_secs_f64() < 1.0;
    report(
        2,
        pass,
        t0,
        &format!(
            "a = {:.5}, b = {:.5}, c = {:.5} over n = 1..32 (|da| {da:.4} <= 0.02, |db| {db:.4} <= 0.02, |dc| {dc:.4} <= 0.05)",
            fit.a, fit.b, fit.c
        ),
    );
}

fn criterion_03_first_juddian_points() {
    let t0 = Instant::now();
    let base = resonant(0.0);
    let grid: Vec<f64> = (0..=120).map(|k| 0.05 + 0.005 * k as f64).collect();
    let trunc = Truncation::with_nmax(60).unwrap();
    let points: Vec<f64> = (1..=4)
        .map(|n| {
            first_juddian_numeric(&base, n, &grid, &trunc)
                .unwrap()
                .expect("crossing in range")
                .g_cross
        })
        .collect();
    let rel = (points[0] - first_juddian_approx(1).unwrap()).abs() / first_juddian_approx(1).unwrap();
    let decreasing = points.windows(2).all(|w| w[1] < w[0]);
    let pass = rel <= 0.10 && decreasing && t0.elapsed().as_secs_f64() < 30.0;
    report(
        3,
        pass,
        t0,
        &format!(
            "crossings n=1..4 at {:.4} {:.4} {:.4} {:.4}; first is {:.1}% from 1/sqrt(6); decreasing = {decreasing}",
            points[0],
            points[1],
            points[2],
            points[3],
            100.0 * rel
        ),
    );
}

fn criterion_04_bloch_siegert_validity() {
    let t0 = Instant::now();
    let mut worst = (0.0f64, 0.0f64);
    let mut last_ok_g = 0.0;
    let (mut better, mut total) = (0usize, 0usize);
    for k in 1..=15 {
        let g = 0.02 * k as f64;
        let p = resonant(g);
        let spec = converged_spectrum(&p, 6, 1e-10).unwrap();
        let mut err_here = 0.0f64;
        for level in spec.levels.iter().take(8) {
            let label = BsLabel::from_chain(level.parity, level.chain_index);
            let e2 = (bs_energy(&p, label) - level.energy).abs();
            let e3 = (bs3_energy(&p, label) - level.energy).abs();
            err_here = err_here.max(e2);
            total += 1;
            if e3 <= e2 + 1e-12 {
                better += 1;
            }
        }
        if err_here > worst.1 {
            worst = (g, err_here);
        }
        if err_here <= 2e-2 {
            last_ok_g = g;
        }
    }
    let frac = better as f64 / total as f64;
    let energies_ok = worst.1 <= 2e-2;
    let pass = energies_ok && frac >= 0.8 && t0.elapsed().as_secs_f64() < 30.0;
    report(
        4,
        pass,
        t0,
        &format!(
            "second-order max error {:.4} at g = {:.2} (tol 2e-2, holds up to g = {last_ok_g:.2}); third order at least as accurate for {:.0}% of {total} pairs (need 80%)",
            worst.1,
            worst.0,
            100.0 * frac
        ),
    );
}

fn criterion_05_adiabatic_validity() {
    let t0 = Instant::now();
    let mut worst_fid = (1.0f64, String::new());
    let mut worst_energy = 0.0f64;
    for n in 1..=3u32 {
        let cross = pdsc_crossing(n, 0.1, 1.0).unwrap();
        for g in [cross, cross + 0.25, cross + 0.5, 5.0] {
            let p = resonant(g);
            let spec = spectrum_with_room(&p, 6, displaced_room(g, 3));
            for m in 0..=3u32.min(n) {
                for b in Branch::BOTH {
                    let level = exact_adiabatic_level(&spec, m, b);
                    let approx = adiabatic_state(&p, m, b, &spec.trunc).unwrap();
                    let f = fidelity(&level.state, &approx).unwrap();
                    if f < worst_fid.0 {
                        worst_fid = (f, format!("(n={m},{b}) at g={g:.3}"));
                    }
                    worst_energy = worst_energy.max((adiabatic_energy(&p, m, b) - level.energy).abs());
                }
            }
        }
    }
    let pass = worst_fid.0 >= 0.99 && worst_energy <= 0.05 && t0.elapsed().as_secs_f64() < 60.0;
    report(
        5,
        pass,
        t0,
        &format!(
            "min fidelity {:.4} for {} (need 0.99); max energy error {worst_energy:.4} (tol 0.05)",
            worst_fid.0, worst_fid.1
        ),
    );
}

fn criterion_06_excitation_count() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for alpha in [3.0, 4.0, 5.0] {
        let p = resonant(alpha);
        let spec = converged_spectrum(&p, 5, 1e-10).unwrap();
        for n in 0..=3u32 {
            for b in Branch::BOTH {
                let level = exact_adiabatic_level(&spec, n, b);
                let dev = (total_excitations(&level.state) - alpha * alpha - (n as f64 + 0.5)).abs();
                worst = worst.max(dev);
            }
        }
    }
    let pass = worst <= 0.1 && t0.elapsed().as_secs_f64() < 30.0;
    report(
        6,
        pass,
        t0,
        &format!("max |n_e - alpha^2 - (n + 1/2)| = {worst:.4} (tol 0.1)"),
    );
}

fn criterion_07_fano_mandel_signs() {
    let t0 = Instant::now();
    let mut max_q_usc = f64::NEG_INFINITY;
    for n in 1..=4u32 {
        let g = 0.8 * first_juddian_approx(n).unwrap();
        let p = resonant(g);
        let spec = converged_spectrum(&p, 6, 1e-10).unwrap();
        for b in Branch::BOTH {
            let label = BsLabel::doublet(n, b).unwrap();
            let level = spec.chain_level(label.parity(), label.chain_index()).unwrap();
            max_q_usc = max_q_usc.max(fano_mandel(&level.state).unwrap());
        }
    }
    let p = resonant(3.0);
    let spec = converged_spectrum(&p, 6, 1e-10).unwrap();
    let mut min_q_dsc = f64::INFINITY;
    for n in 1..=4u32 {
        for b in Branch::BOTH {
            min_q_dsc = min_q_dsc.min(fano_mandel(&exact_adiabatic_level(&spec, n, b).state).unwrap());
        }
    }
    let alpha = 3.0;
    let trunc = Truncation::with_nmax(120).unwrap();
    let mut worst_rel = 0.0f64;
    for n in 1..=4u32 {
        for b in Branch::BOTH {
            let s = adiabatic_state(&p, n, b, &trunc).unwrap();
            let (m1, m2) = photon_moments(&s);
            let want = n as f64 * (2.0 * alpha * alpha - 1.0);
            worst_rel = worst_rel.max(((m2 - m1 * m1 - m1) - want).abs() / want);
        }
    }
    let pass = max_q_usc < 0.0 && min_q_dsc > 0.0 && worst_rel <= 1e-6 && t0.elapsed().as_secs_f64() < 30.0;
    report(
        7,
        pass,
        t0,
        &format!(
            "pUSC max Q = {max_q_usc:.4} (< 0); pDSC min Q = {min_q_dsc:.4} (> 0); adiabatic variance-mean rel error {worst_rel:.1e}"
        ),
    );
}

fn criterion_08_entanglement_entropy() {
    let t0 = Instant::now();
    let mut worst_bs = 0.0f64;
    for n in 1..=3u32 {
        let half = 0.5 * first_juddian_approx(n).unwrap();
        for frac in [0.25, 0.5, 0.75, 1.0] {
            let alpha = frac * half;
            let p = resonant(alpha);
            let trunc = Truncation::with_nmax(40).unwrap();
            let want = pusc_entropy_validator(n, alpha).unwrap();
            for b in Branch::BOTH {
                let s = bs_eigenstate(&p, BsLabel::doublet(n, b).unwrap(), &trunc).unwrap();
                let got = von_neumann_entropy(&reduced_qubit_density(&s));
                worst_bs = worst_bs.max((got - want).abs());
            }
        }
    }
    // pDSC half: the adiabatic states, sampled from 0.1 above each crossing
    // outward; exact eigenstates are reported alongside
    let mut min_dsc = (f64::INFINITY, String::new());
    let mut at_crossing = f64::INFINITY;
    let mut exact_min = f64::INFINITY;
    for n in 1..=3u32 {
        let cross = pdsc_crossing(n, 0.1, 1.0).unwrap();
        for (shift, counted) in [(0.0, false), (0.1, true), (0.3, true), (0.6, true)] {
            let g = cross + shift;
            let p = resonant(g);
            let spec = spectrum_with_room(&p, 5, displaced_room(g, n));
            for b in Branch::BOTH {
                let approx = adiabatic_state(&p, n, b, &spec.trunc).unwrap();
                let s = von_neumann_entropy(&reduced_qubit_density(&approx));
                let exact = von_neumann_entropy(&reduced_qubit_density(&exact_adiabatic_level(&spec, n, b).state));
                if counted {
                    exact_min = exact_min.min(exact);
                    if s < min_dsc.0 {
                        min_dsc = (s, format!("(n={n},{b}) at g={g:.3}"));
                    }
                } else {
                    at_crossing = at_crossing.min(s);
                }
            }
        }
    }
    let pass = worst_bs <= 5e-3 && min_dsc.0 >= 0.995 && t0.elapsed().as_secs_f64() < 30.0;
    report(
        8,
        pass,
        t0,
        &format!(
            "BS-state entropy max deviation from 1 - n a^2/8 {worst_bs:.2e} bits (tol 5e-3); adiabatic-state min entropy past the crossings {:.5} bits for {} (need 0.995; {at_crossing:.5} exactly at the crossings; exact eigenstates past them reach {exact_min:.5})",
            min_dsc.0, min_dsc.1
        ),
    );
}

fn criterion_09_photon_distribution() {
    let t0 = Instant::now();
    let alpha = 5.0;
    let p = resonant(alpha);
    let spec = converged_spectrum(&p, 5, 1e-10).unwrap();
    let mut worst_tvd = 0.0f64;
    let mut worst_center = 0.0f64;
    let mut centers = Vec::new();
    for n in 0..=3u32 {
        for b in Branch::BOTH {
            let dist = photon_distribution(&exact_adiabatic_level(&spec, n, b).state);
            let model = adiabatic_photon_distribution(n, alpha, dist.len() - 1);
            worst_tvd = worst_tvd.max(total_variation_distance(&dist, &model));
            let c = distribution_center(&dist).unwrap();
            worst_center = worst_center.max((c - alpha * alpha).abs());
            if b == Branch::Plus {
                centers.push(c);
            }
        }
    }
    let pass = worst_tvd <= 0.05 && worst_center <= 2.0 && t0.elapsed().as_secs_f64() < 60.0;
    report(
        9,
        pass,
        t0,
        &format!(
            "max TVD {worst_tvd:.2e} (tol 0.05); centers {centers:?}, max offset from 25 = {worst_center} (tol 2)"
        ),
    );
}

fn criterion_10_dynamics() {
    let t0 = Instant::now();
    let tail = DEFAULT_TAIL_TOL;

    let weak = resonant(0.1);
    let times = time_grid(100.0, 0.005).unwrap();
    let plan_g0 = EvolutionPlan::new(&weak, &JointState::basis(Qubit::Ground, 0, 4).unwrap(), tail).unwrap();
    let min_g0 = plan_g0.survival_trace(&times).into_iter().fold(1.0, f64::min);

    let plan_g1 = EvolutionPlan::new(&weak, &JointState::basis(Qubit::Ground, 1, 4).unwrap(), tail).unwrap();
    let trace = plan_g1.survival_trace(&times);
    let rms = (times
        .iter()
        .zip(&trace)
        .map(|(&t, &s)| (s - (0.1 * t).cos().powi(2)).powi(2))
        .sum::<f64>()
        / times.len() as f64)
        .sqrt();

    let deep = resonant(5.0);
    let plan_deep = EvolutionPlan::new(&deep, &JointState::basis(Qubit::Ground, 0, 4).unwrap(), tail).unwrap();
    let short = time_grid(4.0 * PI + 0.01, 0.005).unwrap();
    let peaks = revival_profile(&plan_deep, &short).unwrap();
    let first = peaks.first().copied();
    let revival_ok = first.is_some_and(|(t, h)| (t - 2.0 * PI).abs() <= 0.3 && h >= 0.5);

    let sparse: Vec<f64> = short.iter().step_by(10).copied().collect();
    let leak = [&plan_g0, &plan_g1, &plan_deep]
        .iter()
        .map(|pl| parity_confinement(pl, &sparse).unwrap())
        .fold(0.0, f64::max);

    let pass = min_g0 >= 0.98 && rms <= 0.02 && revival_ok && leak <= 1e-8 && t0.elapsed().as_secs_f64() < 120.0;
    report(
        10,
        pass,
        t0,
        &format!(
            "g=0.1 |g,0> min survival {min_g0:.4} (>= 0.98); g=0.1 |g,1> cos^2 RMS {rms:.4} (<= 0.02); g=5 |g,0> first revival {first:?} (2 pi +- 0.3, height >= 0.5); leakage {leak:.1e}"
        ),
    );
}

fn dense_displacement(alpha: f64, dim: usize) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..dim)
        .map(|m| (0..dim).map(|n| displacement_element(m, n, alpha)).collect())
        .collect();
    Matrix::from_rows(&rows).unwrap()
}

fn criterion_11_structural_properties() {
    let t0 = Instant::now();
    let mut notes = Vec::new();

    // parity block structure
    let p = resonant(1.3);
    let trunc = Truncation::with_nmax(40).unwrap();
    let h = build_dense_hamiltonian(&p, &trunc);
    let mut block_ok = true;
    for i in 0..trunc.dim() {
        for j in 0..trunc.dim() {
            let (qi, ni) = (if i % 2 == 0 { Qubit::Ground } else { Qubit::Excited }, i / 2);
            let (qj, nj) = (if j % 2 == 0 { Qubit::Ground } else { Qubit::Excited }, j / 2);
            if parity_of_basis_state(qi, ni) != parity_of_basis_state(qj, nj) && h[(i, j)] != 0.0 {
                block_ok = false;
            }
        }
    }
    notes.push(format!("parity blocks exact = {block_ok}"));

    // chain spectra against the dense solver, plus eigenvector quality
    let mut worst_union = 0.0f64;
    let mut worst_orth = 0.0f64;
    let mut worst_resid = 0.0f64;
    for (g, n_max) in [(0.3, 60), (1.0, 120), (2.5, 200)] {
        let p = resonant(g);
        let trunc = Truncation::with_nmax(n_max).unwrap();
        let chains = spectrum_at(&p, &trunc).unwrap().energies();
        let h = build_dense_hamiltonian(&p, &trunc);
        let dense = dense_sym_eigen(&h, true).unwrap();
        for (a, b) in chains.iter().zip(&dense.values) {
            worst_union = worst_union.max((a - b).abs());
        }
        let vecs = dense.vectors.unwrap();
        for (k, v) in vecs.iter().enumerate().step_by(7) {
            let hv = h.matvec(v);
            let r = hv
                .iter()
                .zip(v)
                .map(|(x, y)| (x - dense.values[k] * y).powi(2))
                .sum::<f64>()
                .sqrt();
            worst_resid = worst_resid.max(r / h.norm_inf());
            for w in vecs.iter().step_by(5) {
                let dot: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
                let want = if std::ptr::eq(v, w) { 1.0 } else { 0.0 };
                worst_orth = worst_orth.max((dot - want).abs());
            }
        }
    }
    notes.push(format!(
        "chain-vs-dense {worst_union:.1e}, orthonormality {worst_orth:.1e}, residual {worst_resid:.1e}"
    ));

    // displacement matrix: unitarity on the low block and agreement with exp(alpha (a^dag - a))
    let (alpha, dim) = (1.7, 80);
    let d = dense_displacement(alpha, dim);
    let dtd = d.transpose().matmul(&d);
    let mut worst_unit = 0.0f64;
    for i in 0..20 {
        for j in 0..20 {
            let want = if i == j { 1.0 } else { 0.0 };
            worst_unit = worst_unit.max((dtd[(i, j)] - want).abs());
        }
    }
    let mut gen = Matrix::zeros(dim);
    for n in 0..dim - 1 {
        let r = ((n + 1) as f64).sqrt();
        gen[(n + 1, n)] = alpha * r;
        gen[(n, n + 1)] = -alpha * r;
    }
    let mut worst_expm = 0.0f64;
    for n in 0..6 {
        let mut e = vec![0.0; dim];
        e[n] = 1.0;
        let col = gen.expm_apply(&e);
        for m in 0..30 {
            worst_expm = worst_expm.max((col[m] - d[(m, n)]).abs());
        }
    }
    notes.push(format!(
        "displacement unitarity {worst_unit:.1e}, expm agreement {worst_expm:.1e}"
    ));

    // classification is unchanged under a common rescaling
    let curves = BoundaryCurves::build(0.1).unwrap();
    let mut invariant = true;
    for (g, q, n) in [
        (0.1, Qubit::Ground, 0),
        (1.0, Qubit::Ground, 1),
        (5.0, Qubit::Ground, 0),
        (0.3, Qubit::Excited, 2),
    ] {
        let base = resonant(g);
        let trunc = Truncation::with_nmax(30).unwrap();
        let psi = JointState::basis(q, n, 30).unwrap();
        let reference = classify(g, mean_energy(&psi, &base, &trunc).unwrap(), &curves)
            .unwrap()
            .region;
        for factor in [0.01, 3.0, 250.0] {
            let scaled = base.scaled(factor).unwrap();
            let e = mean_energy(&psi, &scaled, &trunc).unwrap() / scaled.omega();
            let label = classify(scaled.g0() / scaled.omega(), e, &curves).unwrap().region;
            invariant &= label == reference;
        }
    }
    notes.push(format!("classification scale-invariant = {invariant}"));

    let pass = block_ok
        && worst_union <= 1e-9
        && worst_orth <= 1e-10
        && worst_resid <= 1e-12
        && worst_unit <= 1e-8
        && worst_expm <= 1e-8
        && invariant
        && t0.elapsed().as_secs_f64() < 60.0;
    report(11, pass, t0, &notes.join("; "));
}

fn informational_fit_over_twelve_rows() {
    // the twelve tabulated rows alone give a visibly different quadratic
    let table = crossing_table(1..=12, 0.1).unwrap();
    let fit = fit_pdsc_boundary(&midpoint_points(&table)).unwrap();
    println!(
        "INFO fit over n = 1..12: a = {:.5}, b = {:.5}, c = {:.5}",
        fit.a, fit.b, fit.c
    );
}

fn main() -> ExitCode {
    let criteria: [(u32, fn()); 11] = [
        (1, criterion_01_crossing_table),
        (2, criterion_02_fit_coefficients),
        (3, criterion_03_first_juddian_points),
        (4, criterion_04_bloch_siegert_validity),
        (5, criterion_05_adiabatic_validity),
        (6, criterion_06_excitation_count),
        (7, criterion_07_fano_mandel_signs),
        (8, criterion_08_entanglement_entropy),
        (9, criterion_09_photon_distribution),
        (10, criterion_10_dynamics),
        (11, criterion_11_structural_properties),
    ];
    let mut failed = Vec::new();
    for (id, run) in criteria {
        VERDICT.with(|v| v.set(None));
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run));
        match (outcome, VERDICT.with(Cell::get)) {
            (Ok(()), Some(true)) => {}
            (Ok(()), Some(false)) => failed.push(id),
            (Ok(()), None) => report(id, false, started, "no verdict reported"),
            (Err(_), _) => {
                report(id, false, started, "panicked before reporting");
                failed.push(id);
            }
        }
    }
    informational_fit_over_twelve_rows();
    println!(
        "acceptance: {} of 11 criteria pass; failing: {failed:?}",
        11 - failed.len()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
