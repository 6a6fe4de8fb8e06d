//! Seeded scenario streams frozen as text. Set `UPDATE_GOLDEN=1` to rewrite.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use opinion_merge_core::scenarios::{gen_forecast_pair, gen_timid_pair, FirstForecaster, Regime, SecondForecaster};
use opinion_merge_core::{ForecastView, Forecaster};

const ROUNDS: usize = 20;

fn render(mut fi: FirstForecaster, mut fii: SecondForecaster) -> String {
    let mut out = String::new();
    for n in 1..=ROUNDS {
        let p = fi.forecast(&ForecastView { round: n, first: None }).unwrap();
        let q = fii.forecast(&ForecastView { round: n, first: Some(&p) }).unwrap();
        let row: Vec<String> = p.probs().iter().chain(q.probs()).map(|x| format!("{x:.16e}")).collect();
        writeln!(out, "{n} {}", row.join(" ")).unwrap();
    }
    out
}

fn compare(name: &str, got: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, got).unwrap();
        return;
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|e| panic!("missing golden file {}: {e}", path.display()));
    assert_eq!(got, want, "scenario stream drifted from {name}");
}

#[test]
fn drift_seed_7_two_outcomes() {
    let (fi, fii) = gen_forecast_pair(7, 2, Regime::Drift).unwrap();
    compare("drift_seed7_m2.txt", &render(fi, fii));
}

#[test]
fn timid_seed_11_three_outcomes() {
    let (fi, fii) = gen_timid_pair(11, 3, 3.0).unwrap();
    compare("timid_seed11_m3_c3.txt", &render(fi, fii));
}
