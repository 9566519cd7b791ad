use proptest::prelude::*;
use sccnn_logic::decode::XNOR_BAND_HALF_WIDTH;
use sccnn_logic::experiments::{calibrate_xnor_band, wilson_interval};
use sccnn_logic::*;

fn or_at(bias: f64) -> (GateSpec, CircuitParams) {
    let gate = GateSpec {
        operating_bias: bias,
        ..GateSpec::canonical(GateKind::Or)
    };
    (gate, gate.at_operating_point(&CircuitParams::default()))
}

fn small_plan() -> RunPlan {
    RunPlan {
        n_sets: 4,
        n_runs_per_set: 2,
        bits_per_run: 8,
    }
}

#[test]
fn desk_scale_or_estimate_is_one() {
    let (gate, p) = or_at(0.05);
    let e = estimate_plogic(&gate, &p, &RunPlan::default(), &TrialSettings::default(), 1, Execution::default()).unwrap();
    assert_eq!(e.trials, 100);
    assert_eq!(e.successes, 100);
    assert_eq!(e.p_logic, 1.0);
    assert_eq!(e.program_seeds.len(), 20);
}

#[test]
fn strong_noise_destroys_the_or_response() {
    let (gate, p) = or_at(0.01);
    let p = CircuitParams { noise_d: 1.0, ..p };
    let e = estimate_plogic(&gate, &p, &small_plan(), &TrialSettings::default(), 2, Execution::default()).unwrap();
    assert!(e.p_logic < 0.9);
    assert!(e.successes <= e.trials);
}

#[test]
fn no_successes_give_zero() {
    let (gate, p) = or_at(0.05);
    let p = CircuitParams { noise_d: 1.0, ..p };
    let plan = RunPlan {
        bits_per_run: 20,
        ..small_plan()
    };
    let e = estimate_plogic(&gate, &p, &plan, &TrialSettings::default(), 3, Execution::default()).unwrap();
    assert_eq!(e.successes, 0);
    assert_eq!(e.p_logic, 0.0);
}

#[test]
fn divergence_counts_as_failure() {
    let (gate, p) = or_at(0.05);
    let p = CircuitParams { noise_d: 1e9, ..p };
    let e = estimate_plogic(&gate, &p, &small_plan(), &TrialSettings::default(), 4, Execution::default()).unwrap();
    assert_eq!(e.diverged, e.trials);
    assert_eq!(e.successes, 0);
}

#[test]
fn invalid_plans_are_rejected() {
    let (gate, p) = or_at(0.05);
    for plan in [
        RunPlan { n_sets: 0, ..small_plan() },
        RunPlan { n_runs_per_set: 0, ..small_plan() },
        RunPlan { bits_per_run: 0, ..small_plan() },
    ] {
        assert!(estimate_plogic(&gate, &p, &plan, &TrialSettings::default(), 0, Execution::default()).is_err());
    }
}

#[test]
fn single_point_sweep_equals_direct_estimate() {
    let (gate, p) = or_at(0.01);
    let settings = TrialSettings::default();
    let grid = SweepGrid::linspace(experiments::Axis::Noise, 0.0, 0.0, 1, p, small_plan()).unwrap();
    let report = sweep(&grid, &gate, &settings, 9, Execution::default()).unwrap();
    let direct = estimate_plogic(&gate, &p, &small_plan(), &settings, 9, Execution::default()).unwrap();
    assert_eq!(report.points.len(), 1);
    assert_eq!(report.points[0].estimate, direct);
}

#[test]
fn parallel_and_sequential_reports_are_identical() {
    let (gate, p) = or_at(0.05);
    let settings = TrialSettings::default();
    let grid = SweepGrid::linspace(experiments::Axis::Noise, 0.0, 0.01, 3, p, small_plan()).unwrap();
    let a = sweep(&grid, &gate, &settings, 17, Execution::Sequential).unwrap();
    let b = sweep(&grid, &gate, &settings, 17, Execution::Parallel).unwrap();
    let c = sweep(&grid, &gate, &settings, 17, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_json(), c.to_json());
}

#[test]
fn report_exports() {
    let (gate, p) = or_at(0.05);
    let grid = SweepGrid::linspace(experiments::Axis::Forcing, 0.05, 0.15, 3, p, small_plan()).unwrap();
    let report = sweep(&grid, &gate, &TrialSettings::default(), 5, Execution::default()).unwrap();
    let mut csv = Vec::new();
    report.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "axis_value,trials,successes,p_logic,ci_lo,ci_hi");
    assert_eq!(lines.len(), 4);
    for (line, point) in lines[1..].iter().zip(&report.points) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols[0], point.axis_value);
        assert_eq!(cols[1] as usize, point.estimate.trials);
        assert!(cols[4] <= cols[3] && cols[3] <= cols[5]);
    }
    let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(json["base_seed"], 5);
    assert_eq!(json["grid"]["axis"], "f");
    assert_eq!(json["points"][0]["program_seeds"].as_array().unwrap().len(), 4);
    assert!(json["settings"]["integrator"]["dt"].is_number());
    assert!(json["grid"]["params"]["bias"].is_number());
}

#[test]
fn noise_degrades_the_or_response_on_average() {
    let (gate, p) = or_at(0.05);
    let values = vec![0.0, 0.1, 0.2, 0.8, 0.9, 1.0];
    let grid = SweepGrid {
        axis: experiments::Axis::Noise,
        values,
        params: p,
        plan: small_plan(),
    };
    let report = sweep(&grid, &gate, &TrialSettings::default(), 6, Execution::default()).unwrap();
    let p_logic = report.p_logic();
    let low = p_logic[..3].iter().sum::<f64>() / 3.0;
    let high = p_logic[3..].iter().sum::<f64>() / 3.0;
    assert!(low - high >= 0.3, "{p_logic:?}");
}

#[test]
fn quadrupling_trials_halves_the_interval_in_practice() {
    let (gate, p) = or_at(0.05);
    let p = CircuitParams { noise_d: 0.005, ..p };
    let settings = TrialSettings::default();
    let plan = RunPlan {
        n_sets: 5,
        n_runs_per_set: 2,
        bits_per_run: 10,
    };
    let small = estimate_plogic(&gate, &p, &plan, &settings, 8, Execution::default()).unwrap();
    let large = estimate_plogic(&gate, &p, &RunPlan { n_sets: 20, ..plan }, &settings, 8, Execution::default()).unwrap();
    let ratio = (large.ci_hi - large.ci_lo) / (small.ci_hi - small.ci_lo);
    assert!(ratio <= 0.55, "ratio {ratio}, {small:?} vs {large:?}");
}

#[test]
fn xnor_band_calibration_reproduces_the_default() {
    let gate = GateSpec::canonical(GateKind::Xor);
    let p = gate.at_operating_point(&CircuitParams::default());
    let plan = RunPlan {
        n_sets: 20,
        n_runs_per_set: 1,
        bits_per_run: 20,
    };
    let candidates: Vec<f64> = (0..=60).map(|i| 1.0 + 0.01 * i as f64).collect();
    let cal = calibrate_xnor_band(&p, &plan, &TrialSettings::default(), 1, &candidates, Execution::default()).unwrap();
    assert!((cal.half_width - XNOR_BAND_HALF_WIDTH).abs() < 0.015, "{cal:?}");
    let best = cal.agreement.iter().cloned().fold(0.0, f64::max);
    assert!(best > 0.95);
}

proptest! {
    #[test]
    fn wilson_width_shrinks_as_one_over_root_n(p in 0.05..0.95f64, n in 50usize..2000) {
        let width = |n: usize| {
            let k = (p * n as f64).round() as usize;
            let (lo, hi) = wilson_interval(k, n);
            hi - lo
        };
        prop_assert!(width(4 * n) <= 0.55 * width(n));
    }

    #[test]
    fn wilson_contains_the_point_estimate(n in 1usize..500, frac in 0.0..=1.0f64) {
        let k = (frac * n as f64).floor() as usize;
        let (lo, hi) = wilson_interval(k, n);
        let p = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12 && p <= hi + 1e-12 && hi <= 1.0);
    }
}
