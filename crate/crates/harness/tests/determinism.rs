use std::collections::HashSet;

use pilotguard_harness::{parse_spec, run_experiment, run_experiment_with, substream_id, to_csv_string, Execution, ExperimentKind};

fn spec_text(kind: ExperimentKind) -> String {
    format!(
        "kind = {kind}\nm_antennas = 4\nn_pilot = 32\np_b = 5\np_e = 0.5\np_er = 5\nrandom_phase_attack = random_bits\nsweep = n_both: 16, 32\npfa_targets = 0.01, 0.001\ntrials = 300\nmaster_seed = 77\n"
    )
}

#[test]
fn reruns_are_byte_identical() {
    for kind in ExperimentKind::ALL {
        let spec = parse_spec(&spec_text(kind)).unwrap();
        let a = to_csv_string(&run_experiment(&spec).unwrap());
        let b = to_csv_string(&run_experiment(&spec).unwrap());
        assert_eq!(a, b, "{kind}");
    }
}

#[test]
fn sequential_equals_parallel() {
    for kind in ExperimentKind::ALL {
        let spec = parse_spec(&spec_text(kind)).unwrap();
        assert_eq!(
            run_experiment_with(&spec, Execution::Sequential).unwrap(),
            run_experiment_with(&spec, Execution::Parallel).unwrap(),
            "{kind}"
        );
    }
}

#[test]
fn substreams_never_collide() {
    let mut ids = HashSet::new();
    for sweep in 0..64 {
        for trial in (0..1000).chain([(1 << 39) - 1, 1 << 39, (1 << 40) - 1]) {
            assert!(ids.insert(substream_id(sweep, trial)), "sweep {sweep} trial {trial}");
        }
    }
    assert!(!ids.contains(&u64::MAX));
}

#[test]
fn single_trial_runs_everywhere() {
    for kind in ExperimentKind::ALL {
        let mut spec = parse_spec(&spec_text(kind)).unwrap();
        spec.trials = 1;
        let rows = run_experiment(&spec).unwrap();
        assert!(!rows.is_empty());
        assert!(rows.iter().all(|r| r.stderr == 0.0 && r.empirical.is_finite()), "{kind}");
    }
}

#[test]
fn every_row_has_a_known_sweep_value() {
    let spec = parse_spec(&spec_text(ExperimentKind::Roc)).unwrap();
    let rows = run_experiment(&spec).unwrap();
    assert!(rows.iter().all(|r| spec.sweep.values.contains(&r.sweep_value)));
    assert_eq!(rows.iter().filter(|r| r.sweep_value == 16.0).count(), 6);
}
