use std::collections::BTreeMap;

use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use connected_cm::confmodel::sample_configuration;
use connected_cm::experiments::{connected_exact, connected_fraction, simple_fraction};
use connected_cm::oracle::{count_connected_recursive, enumerate_counts};
use connected_cm::par::{replicate_seed, rng_from_seed, Execution};
use connected_cm::{DegreeDistribution, TypeSequence};

#[test]
fn matchings_are_uniform() {
    let t = TypeSequence::from_pairs(&[(1, 2), (2, 2)]).unwrap();
    let draws = 60_000u64;
    let mut freq: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    for i in 0..draws {
        *freq.entry(sample_configuration(&t, replicate_seed(8, i)).unwrap().matching().to_vec()).or_insert(0) += 1;
    }
    assert_eq!(freq.len(), 15);
    let expected = draws as f64 / 15.0;
    let chi2: f64 = freq.values().map(|&f| (f as f64 - expected).powi(2) / expected).sum();
    let p_value = 1.0 - ChiSquared::new(14.0).unwrap().cdf(chi2);
    assert!(p_value > 1e-3, "chi2 = {chi2}, p = {p_value}");
}

#[test]
fn monte_carlo_fractions_match_oracle() {
    let mut rng = rng_from_seed(21);
    let mut checked = 0;
    while checked < 10 {
        let counts: BTreeMap<u32, u64> = (1..=4u32).map(|k| (k, rng.gen_range(0..4u64))).collect();
        let t = TypeSequence::with_parity_repair(counts);
        if t.total_degree() < 4 || t.total_degree() > 14 {
            continue;
        }
        checked += 1;
        let exact = enumerate_counts(&t).unwrap();
        let draws = 100_000;
        for (label, observed, hits) in [
            ("connected", connected_fraction(&t, draws, rng.gen(), Execution::Parallel).unwrap(), exact.connected),
            ("simple", simple_fraction(&t, draws, rng.gen(), Execution::Parallel).unwrap(), exact.simple),
        ] {
            let p = hits as f64 / exact.total as f64;
            let se = (p * (1.0 - p) / draws as f64).sqrt();
            let diff = (observed.fraction() - p).abs();
            assert!(diff <= 3.0 * se + 1e-12, "{label} {t:?}: {} vs {p}", observed.fraction());
        }
    }
}

#[test]
fn recursion_agrees_with_monte_carlo_beyond_enumeration() {
    let t = TypeSequence::from_pairs(&[(1, 20), (3, 20)]).unwrap();
    let exact = count_connected_recursive(&t).unwrap();
    let p = exact.ln_fraction().exp();
    let h = connected_fraction(&t, 200_000, 4, Execution::Parallel).unwrap();
    let se = (p * (1.0 - p) / 200_000.0).sqrt();
    assert!((h.fraction() - p).abs() < 3.0 * se, "{} vs {p}", h.fraction());
}

#[test]
fn exact_rate_approaches_k_from_below() {
    let p = DegreeDistribution::from_pairs(&[(1, 0.5), (4, 0.5)]).unwrap();
    let rates: Vec<f64> = [20, 40, 60, 80].iter().map(|&n| connected_exact(&p, n).unwrap().rate().unwrap()).collect();
    assert!(rates.windows(2).all(|w| w[0] < w[1]), "{rates:?}");
    assert!(rates.iter().all(|&x| x < 0.06540601797056848));
}
