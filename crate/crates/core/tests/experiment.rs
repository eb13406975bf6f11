use proptest::prelude::*;
use silver_rgd::experiment::{percentile, run_experiment, summary_from_rows_csv, Arm, ExperimentConfig, RestartCycles, ROWS_HEADER};
use silver_rgd::Error;

const BASE: &str = "experiment = custom\ndimension = 4\nalpha = 0.01\niterations = 40\nseeds = 0..3\narm = silver\narm = constant(1)\narm = restart(auto)\n";

proptest! {
    #[test]
    fn arm_labels_roundtrip(eta in 1e-3f64..10.0, l in 1usize..64) {
        for arm in [Arm::Silver, Arm::Constant(eta), Arm::Restart(RestartCycles::Fixed(l)), Arm::Restart(RestartCycles::Auto)] {
            prop_assert_eq!(Arm::parse(&arm.label()).unwrap(), arm);
        }
    }

    #[test]
    fn seed_lists_parse(a in 0u64..100, len in 1u64..20) {
        let text = format!("experiment = custom\nseeds = {}..{}\n", a, a + len);
        prop_assert_eq!(ExperimentConfig::parse(&text).unwrap().seeds, (a..a + len).collect::<Vec<_>>());
        let list: Vec<String> = (a..a + len).map(|s| s.to_string()).collect();
        let text = format!("experiment = custom\nseeds = {}\n", list.join(", "));
        prop_assert_eq!(ExperimentConfig::parse(&text).unwrap().seeds.len() as u64, len);
    }

    #[test]
    fn percentiles_are_monotone(mut v in prop::collection::vec(-1e3f64..1e3, 1..50), p in 0.0f64..1.0, q in 0.0f64..1.0) {
        v.sort_by(f64::total_cmp);
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        prop_assert!(percentile(&v, lo) <= percentile(&v, hi));
        prop_assert!(percentile(&v, 0.0) == v[0] && percentile(&v, 1.0) == v[v.len() - 1]);
    }
}

#[test]
fn config_errors_carry_line_numbers() {
    let cases = [
        ("experiment = custom\niterations = 0\n", 0),
        ("experiment = custom\n\n# note\nbogus line\n", 4),
        ("experiment = custom\narm = constant(-1)\n", 2),
        ("experiment = custom\nseeds = 1,x\n", 2),
        ("experiment = custom\nname = a\nname = b\n", 3),
        ("dimension = 3\n", 0),
    ];
    for (text, line) in cases {
        match ExperimentConfig::parse(text) {
            Err(Error::Config { line: l, .. }) => assert_eq!(l, line, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn rows_are_deterministic_and_ordered() {
    let cfg = ExperimentConfig::parse(BASE).unwrap();
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    let rows = a.rows_csv();
    assert_eq!(rows, b.rows_csv());
    assert!(rows.starts_with(ROWS_HEADER));
    assert!(!rows.contains('\r'));
    let order: Vec<(u64, String)> = a.runs.iter().map(|r| (r.seed, r.arm.clone())).collect();
    assert_eq!(order[0], (0, "silver".to_string()));
    assert_eq!(order[1], (0, "constant(1)".to_string()));
    assert_eq!(order[3], (1, "silver".to_string()));
    for run in &a.runs {
        assert!(run.records.windows(2).all(|w| w[0].iteration < w[1].iteration));
        assert_eq!(run.records.last().unwrap().iteration, 40);
    }
    assert_eq!(summary_from_rows_csv(&rows).unwrap(), a.summary_csv());
}

#[test]
fn write_emits_files_and_svg_only_when_asked() {
    let dir = std::env::temp_dir().join(format!("silver-rgd-write-{}", std::process::id()));
    let mut cfg = ExperimentConfig::parse(BASE).unwrap();
    cfg.name = "t".into();
    let res = run_experiment(&cfg).unwrap();
    assert_eq!(res.write(&dir).unwrap().len(), 2);
    cfg.plot = true;
    let res_plot = run_experiment(&cfg).unwrap();
    let files = res_plot.write(&dir).unwrap();
    assert_eq!(files.len(), 3);
    assert_eq!(res.rows_csv(), res_plot.rows_csv());
    assert!(std::fs::read_to_string(&files[2]).unwrap().contains("<polyline"));
    std::fs::remove_dir_all(&dir).unwrap();
}
