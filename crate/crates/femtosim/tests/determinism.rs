//! Reproducibility of the sweep pipeline across runs, thread pools, and
//! the file system boundary.

use femtosim::config::ScenarioConfig;
use femtosim::schemes::SchemeKind;
use femtosim::sweep::{run_sweep, CSV_HEADER};

/// A sweep small enough to run many times in one test.
fn small_config() -> ScenarioConfig {
    let mut config = ScenarioConfig::default();
    config.femtocell_counts = vec![30, 60];
    config.trials = 300;
    config
}

#[test]
fn identical_configs_produce_identical_csv() {
    let config = small_config();
    let first = run_sweep(&config).unwrap().to_csv();
    let second = run_sweep(&config).unwrap().to_csv();
    assert_eq!(first, second);
}

#[test]
fn thread_pool_size_does_not_change_the_output() {
    let config = small_config();
    let reference = run_sweep(&config).unwrap().to_csv();
    for threads in [1, 2, 5] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let csv = pool.install(|| run_sweep(&config)).unwrap().to_csv();
        assert_eq!(csv, reference, "output drifted with {threads} threads");
    }
}

#[test]
fn written_files_match_the_in_memory_rendering() {
    let config = small_config();
    let result = run_sweep(&config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    result.write_csv(&path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(String::from_utf8(bytes).unwrap(), result.to_csv());
}

#[test]
fn csv_layout_matches_the_documented_schema() {
    let config = small_config();
    let csv = run_sweep(&config).unwrap().to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let expected_rows = config.schemes.len() * config.femtocell_counts.len();
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), expected_rows);
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 8, "row {row}");
        assert!(SchemeKind::ALL.iter().any(|s| s.as_str() == fields[0]));
        let count: u64 = fields[1].parse().unwrap();
        assert!(config.femtocell_counts.contains(&count));
        for field in &fields[2..7] {
            let value: f64 = field.parse().unwrap();
            assert!(value.is_finite());
            // Scientific notation with six significant digits.
            assert!(field.contains('e'), "field {field} not scientific");
            let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.len(), 7, "field {field}");
        }
        let _: u64 = fields[7].parse().unwrap();
    }
    // Scheme-major ordering, counts ascending inside each scheme block.
    let labels: Vec<&str> = rows.iter().map(|r| r.split(',').next().unwrap()).collect();
    let expected: Vec<&str> = config
        .schemes
        .iter()
        .flat_map(|s| std::iter::repeat_n(s.as_str(), config.femtocell_counts.len()))
        .collect();
    assert_eq!(labels, expected);
}

#[test]
fn the_seed_steers_every_statistic() {
    let mut config = small_config();
    let first = run_sweep(&config).unwrap().to_csv();
    config.seed = 2;
    let second = run_sweep(&config).unwrap().to_csv();
    assert_ne!(first, second);
}
