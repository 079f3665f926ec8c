use std::path::Path;

use ergoclust_cli::config::ExperimentConfig;
use ergoclust_cli::experiment::run;

const CONFIG: &str = r#"
seed = 2718
lengths = [500, 2000, 8000]
trials = 20

[coupling]
mode = "independent"

[[coupling.clusters]]
count = 3
process = { kind = "markov2", p01 = 0.2, p10 = 0.8, emit0 = 0.0, emit1 = 1.0 }

[[coupling.clusters]]
count = 3
process = { kind = "markov2", p01 = 0.8, p10 = 0.2, emit0 = 0.0, emit1 = 1.0 }

[algorithm]
mode = "threshold"
mixing = { form = "exponential", c = 1.0, r = 0.5 }
"#;

#[test]
fn threshold_rates_do_not_decrease() {
    let config = ExperimentConfig::parse(CONFIG, Path::new("markov.toml")).unwrap();
    let rows = run(&config).unwrap();
    let rates: Vec<f64> = rows.iter().map(|r| r.rate).collect();
    assert!(rates.windows(2).all(|w| w[0] <= w[1]), "{rates:?}");
    assert_eq!(rates[2], 1.0);
}

#[test]
fn between_cluster_distances_dominate_at_5000() {
    let mut config = ExperimentConfig::parse(CONFIG, Path::new("markov.toml")).unwrap();
    config.lengths = vec![5000];
    config.trials = 5;
    config.algorithm = Default::default();
    let row = &run(&config).unwrap()[0];
    assert!(row.mean_between_distance.unwrap() > row.mean_within_distance.unwrap());
    assert_eq!(row.exact_recovery_count, 5);
}
