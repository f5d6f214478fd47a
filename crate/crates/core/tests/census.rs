use std::collections::BTreeSet;

use connected_cm::census::{
    empirical_census, enumerate_bp_trees, giant_rejection_sample, CensusHistogram, NON_TREE,
};
use connected_cm::confmodel::{components, Sampler};
use connected_cm::embedding::build_embedding;
use connected_cm::experiments::uniform_connected_batch;
use connected_cm::par::{replicate_seed, rng_from_seed, Execution};
use connected_cm::rate::rate_k;
use connected_cm::DegreeDistribution;

fn two_four() -> DegreeDistribution {
    DegreeDistribution::from_pairs(&[(1, 0.5), (4, 0.5)]).unwrap()
}

#[test]
fn giant_census_matches_tree_law_at_large_n() {
    let p = two_four();
    let rate = rate_k(&p).unwrap();
    let plan = build_embedding(&p, 1e-3, 100_000).unwrap();
    let mut sampler = Sampler::new(&plan.big).unwrap();
    sampler.sample_giant(&mut rng_from_seed(3));
    let g = sampler.current_graph();
    let view = components(&g);
    let giant = g.induced(&view.members(view.giant));
    for r in [1, 2] {
        let hist = empirical_census(&giant, r);
        assert!(hist.fraction(NON_TREE) < 0.01);
        for t in enumerate_bp_trees(&rate.q, rate.beta, r, 0.01).unwrap() {
            let x = hist.fraction(&t.tree.code);
            assert!((x - t.mu).abs() < 0.006, "r={r} {}: {x} vs {}", t.tree.code, t.mu);
        }
    }
}

fn mean_fractions(hists: &[CensusHistogram], key: &str) -> (f64, f64) {
    let xs: Vec<f64> = hists.iter().map(|h| h.fraction(key)).collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var / n)
}

#[test]
fn giant_rejection_agrees_with_direct_rejection() {
    let p = two_four();
    let target = p.integerize(10);
    let draws = 2_000;
    let direct = uniform_connected_batch(&target, draws, 1, 1_000_000, Execution::Parallel).unwrap();
    let giant: Vec<_> = (0..draws)
        .map(|i| giant_rejection_sample(&p, 0.05, 10, replicate_seed(2, i), 1_000_000).unwrap().into_result().unwrap())
        .collect();
    let a: Vec<CensusHistogram> = direct.iter().map(|s| empirical_census(&s.graph, 2)).collect();
    let b: Vec<CensusHistogram> = giant.iter().map(|s| empirical_census(&s.graph, 2)).collect();
    let keys: BTreeSet<String> = a.iter().chain(&b).flat_map(|h| h.counts.keys().cloned()).collect();
    for key in keys {
        let (ma, va) = mean_fractions(&a, &key);
        let (mb, vb) = mean_fractions(&b, &key);
        assert!((ma - mb).abs() <= 3.0 * (va + vb).sqrt() + 1e-12, "{key}: {ma} vs {mb}");
    }
}

#[test]
fn short_cycles_thin_out_with_n() {
    let p = two_four();
    let non_tree: Vec<f64> = [20u64, 40, 80]
        .iter()
        .map(|&n| {
            let samples = uniform_connected_batch(&p.integerize(n), 200, n, 100_000_000, Execution::Parallel).unwrap();
            let hists: Vec<CensusHistogram> = samples.iter().map(|s| empirical_census(&s.graph, 1)).collect();
            mean_fractions(&hists, NON_TREE).0
        })
        .collect();
    assert!(non_tree.windows(2).all(|w| w[1] < w[0]), "{non_tree:?}");
}
