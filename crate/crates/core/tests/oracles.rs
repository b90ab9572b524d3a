use holopt::metrics::{bloch_average_fidelity, schedule_for, BlochGrid};
use holopt::optimizer::{crowding_distance, dominates, pareto_rank, Objectives};
use holopt::systems::{gate_catalog, preset, table1_coefficients, GateName, SystemName};
use holopt::{
    evolve_final, hz_to_angular, qubit_state_fidelity, target_state, DensityMatrix, IntegrationMethod,
    IntegratorConfig, QubitState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn bloch_average_matches_brute_force() {
    let sys = preset(SystemName::EnsembleRei);
    let gate = gate_catalog(GateName::Hadamard);
    let coeffs = table1_coefficients(sys.name);
    let cfg = IntegratorConfig::default();
    let grid = BlochGrid { n_polar: 5, n_azimuth: 4 };
    let fast = bloch_average_fidelity(&sys, &gate, &coeffs, 80e3, grid, &cfg).unwrap();

    let sched = schedule_for(&sys, &gate, &coeffs).unwrap();
    let mut total = 0.0;
    for i in 0..5 {
        for j in 0..4 {
            let polar = std::f64::consts::PI * i as f64 / 4.0;
            let az = std::f64::consts::TAU * j as f64 / 4.0;
            let psi = QubitState::from_bloch(polar, az);
            let rho = evolve_final(&DensityMatrix::from_qubit(&psi), &sched, hz_to_angular(80e3), &sys.profile, &cfg)
                .unwrap();
            total += qubit_state_fidelity(&rho, &target_state(&gate.params, &psi));
        }
    }
    assert!((fast - total / 20.0).abs() < 1e-9, "{fast} vs {}", total / 20.0);
}

#[test]
fn adaptive_agrees_with_fine_rk4() {
    let sys = preset(SystemName::Transmon);
    let gate = gate_catalog(GateName::Not);
    let sched = schedule_for(&sys, &gate, &table1_coefficients(sys.name)).unwrap();
    let rho0 = DensityMatrix::from_qubit(&QubitState::one());
    let rk4 = IntegratorConfig { method: IntegrationMethod::FixedRk4 { steps_per_segment: 4000 }, ..Default::default() };
    let a = evolve_final(&rho0, &sched, hz_to_angular(5e6), &sys.profile, &IntegratorConfig::default()).unwrap();
    let b = evolve_final(&rho0, &sched, hz_to_angular(5e6), &sys.profile, &rk4).unwrap();
    assert!((*a.matrix() - *b.matrix()).max_abs() < 1e-7);
}

fn oracle_ranks(pop: &[Objectives]) -> Vec<usize> {
    // Rank = length of the longest chain of dominators above each point.
    let n = pop.len();
    let mut rank = vec![0; n];
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            for j in 0..n {
                if dominates(&pop[j], &pop[i]) && rank[i] < rank[j] + 1 {
                    rank[i] = rank[j] + 1;
                    changed = true;
                }
            }
        }
    }
    rank
}

#[test]
fn ranking_matches_pairwise_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..200 {
        let n = 1 + trial % 30;
        let pop: Vec<Objectives> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    [rng.gen_range(0..5) as f64, rng.gen_range(0..5) as f64]
                } else {
                    [rng.gen::<f64>(), rng.gen::<f64>()]
                }
            })
            .collect();
        let expect = oracle_ranks(&pop);
        let fronts = pareto_rank(&pop);
        assert_eq!(fronts.iter().map(Vec::len).sum::<usize>(), n);
        for (r, front) in fronts.iter().enumerate() {
            for &i in front {
                assert_eq!(expect[i], r);
            }
            let objs: Vec<Objectives> = front.iter().map(|&i| pop[i]).collect();
            let d = crowding_distance(&objs);
            assert!(d.iter().all(|x| *x >= 0.0));
            assert!(d.iter().filter(|x| x.is_infinite()).count() >= front.len().min(2));
        }
    }
}
