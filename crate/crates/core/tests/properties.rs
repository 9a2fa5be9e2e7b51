use proptest::prelude::*;

use rabi_core::dynamics::EvolutionPlan;
use rabi_core::eigensolve::{converged_spectrum, dense_sym_eigen, spectrum_at};
use rabi_core::matrix::Matrix;
use rabi_core::model::{build_dense_hamiltonian, Qubit, DEFAULT_TAIL_TOL};
use rabi_core::observables::{
    fidelity, photon_distribution, reduced_qubit_density, total_variation_distance, von_neumann_entropy,
};
use rabi_core::perturbative::{bs_eigenstate, bs_generator, Branch, BsLabel};
use rabi_core::regimes::{classify, mean_energy, BoundaryCurves, Region};
use rabi_core::special::{displacement_element, laguerre};
use rabi_core::{JointState, ModelParams, Truncation};

fn params() -> impl Strategy<Value = ModelParams> {
    (0.3f64..3.0, 0.1f64..3.0, 0.0f64..3.0).prop_map(|(w, q, g)| ModelParams::new(w, q, g).unwrap())
}

fn state(n_max: usize) -> impl Strategy<Value = JointState> {
    prop::collection::vec(-1.0f64..1.0, 2 * (n_max + 1))
        .prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
        .prop_map(|v| JointState::from_real(&v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chains_reproduce_dense_spectrum(p in params(), n_max in 3usize..24) {
        let trunc = Truncation::with_nmax(n_max).unwrap();
        let chains = spectrum_at(&p, &trunc).unwrap().energies();
        let dense = dense_sym_eigen(&build_dense_hamiltonian(&p, &trunc), false).unwrap().values;
        let scale = 1.0 + dense.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (a, b) in chains.iter().zip(&dense) {
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn eigenstates_have_definite_parity(p in params()) {
        let spec = converged_spectrum(&p, 3, 1e-8).unwrap();
        for level in &spec.levels {
            prop_assert_eq!(level.state.definite_parity(1e-20), Some(level.parity));
            prop_assert!((level.state.norm_sqr() - 1.0).abs() < 1e-12);
        }
        let e = spec.energies();
        prop_assert!(e.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn entropy_is_bounded(s in state(6)) {
        let rho = reduced_qubit_density(&s);
        let [l0, l1] = rho.eigenvalues();
        prop_assert!(l0 >= -1e-12 && l1 <= 1.0 + 1e-12 && (l0 + l1 - 1.0).abs() < 1e-10);
        let e = von_neumann_entropy(&rho);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&e));
    }

    #[test]
    fn distributions_are_normalized(s in state(9)) {
        let p = photon_distribution(&s);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(total_variation_distance(&p, &p) == 0.0);
    }

    #[test]
    fn fidelity_is_a_probability(a in state(5), b in state(5)) {
        let f = fidelity(&a, &b).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
        prop_assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn displacement_columns_are_normalized(alpha in -2.5f64..2.5, n in 0usize..6) {
        let upper = (alpha * alpha + 12.0 * alpha.abs() + 30.0) as usize;
        let s: f64 = (0..=upper).map(|m| displacement_element(m, n, alpha).powi(2)).sum();
        prop_assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn laguerre_matches_explicit_sum(n in 0u32..10, x in 0.0f64..12.0) {
        let mut sum = 0.0;
        let mut binom = 1.0;
        let mut fact = 1.0;
        for k in 0..=n {
            if k > 0 {
                binom *= (n - k + 1) as f64 / k as f64;
                fact *= k as f64;
            }
            sum += binom * (-x).powi(k as i32) / fact;
        }
        prop_assert!((laguerre(n, x) - sum).abs() <= 1e-9 * (1.0 + sum.abs()) * 10f64.powi(n as i32 / 3));
    }

    #[test]
    fn bs_generator_has_zero_expectation(g in 0.0f64..0.4, n in 1u32..5, plus in any::<bool>()) {
        let p = ModelParams::resonant(g).unwrap();
        let trunc = Truncation::with_nmax(30).unwrap();
        let b = if plus { Branch::Plus } else { Branch::Minus };
        let s = bs_eigenstate(&p, BsLabel::doublet(n, b).unwrap(), &trunc).unwrap();
        let raw = bs_generator(&p, &trunc);
        let v: Vec<f64> = s.amplitudes().iter().map(|a| a.re).collect();
        prop_assert!((raw.matvec(&v).iter().zip(&v).map(|(a, b)| a * b).sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn survival_is_bounded_and_even(g in 0.0f64..2.0, n in 0usize..3, t in 0.0f64..40.0) {
        let p = ModelParams::resonant(g).unwrap();
        let plan = EvolutionPlan::new(&p, &JointState::basis(Qubit::Excited, n, 4).unwrap(), DEFAULT_TAIL_TOL).unwrap();
        let s = plan.survival_probability(t);
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert!((s - plan.survival_probability(-t)).abs() < 1e-12);
    }

    #[test]
    fn classification_ignores_common_scale(g in 0.0f64..6.0, q in 0usize..2, n in 0usize..4, f in 0.01f64..100.0) {
        let curves = BoundaryCurves::build(0.1).unwrap();
        let qubit = if q == 0 { Qubit::Ground } else { Qubit::Excited };
        let psi = JointState::basis(qubit, n, 12).unwrap();
        let trunc = Truncation::with_nmax(12).unwrap();
        let base = ModelParams::resonant(g).unwrap();
        let scaled = base.scaled(f).unwrap();
        let e0 = mean_energy(&psi, &base, &trunc).unwrap();
        let e1 = mean_energy(&psi, &scaled, &trunc).unwrap() / scaled.omega();
        let direct = classify(g, e0, &curves).unwrap().region;
        prop_assert_eq!(direct, classify(scaled.g0() / scaled.omega(), e1, &curves).unwrap().region);
        if direct == Region::PerturbativeUSC {
            prop_assert!(g <= curves.pusc_g_max);
        }
    }

    #[test]
    fn matrix_exponential_of_antisymmetric_is_orthogonal(entries in prop::collection::vec(-1.5f64..1.5, 15)) {
        let n = 6;
        let mut a = Matrix::zeros(n);
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                a[(i, j)] = entries[k];
                a[(j, i)] = -entries[k];
                k += 1;
            }
        }
        for col in 0..n {
            let mut e = vec![0.0; n];
            e[col] = 1.0;
            let v = a.expm_apply(&e);
            prop_assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
