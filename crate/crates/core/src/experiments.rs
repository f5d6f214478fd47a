//! Seeded Monte Carlo runners shared by the CLI and the acceptance suite.
//!
//! Replicate `i` of every runner draws from `rng_from_seed(replicate_seed(seed, i))`
//! and results are reduced with order-independent sums, so output does not
//! depend on the execution mode or thread count.

use serde::Serialize;

use crate::census::{sample_uniform_connected, UniformSample};
use crate::confmodel::Sampler;
use crate::degrees::{DegreeDistribution, TypeSequence};
use crate::embedding::build_embedding;
use crate::error::{Error, Result};
use crate::oracle::{count_configurations, count_connected_recursive, ln_biguint};
use crate::par::{fold_replicates, map_replicates, replicate_seed, rng_from_seed, Execution};

/// Formats with 15 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.14e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HitCount {
    pub hits: u64,
    pub replicates: u64,
}

impl HitCount {
    pub fn fraction(&self) -> f64 {
        self.hits as f64 / self.replicates as f64
    }

    /// Binomial standard error of [`HitCount::fraction`].
    pub fn standard_error(&self) -> f64 {
        let f = self.fraction();
        (f * (1.0 - f) / self.replicates as f64).sqrt()
    }
}

fn count_hits<F>(t: &TypeSequence, replicates: u64, seed: u64, exec: Execution, hit: F) -> Result<HitCount>
where
    F: Fn(&mut Sampler, &mut rand_chacha::ChaCha8Rng) -> bool + Sync + Send,
{
    let sampler = Sampler::new(t)?;
    let (_, hits) = fold_replicates(
        exec,
        replicates,
        (sampler, 0u64),
        |(s, h), i| {
            let mut rng = rng_from_seed(replicate_seed(seed, i));
            *h += hit(s, &mut rng) as u64;
        },
        |a, b| (a.0, a.1 + b.1),
    );
    Ok(HitCount { hits, replicates })
}

/// Fraction of configurations of `t` that are connected.
pub fn connected_fraction(t: &TypeSequence, replicates: u64, seed: u64, exec: Execution) -> Result<HitCount> {
    count_hits(t, replicates, seed, exec, |s, rng| s.sample_connected(rng))
}

/// Fraction of configurations of `t` that project to simple graphs.
pub fn simple_fraction(t: &TypeSequence, replicates: u64, seed: u64, exec: Execution) -> Result<HitCount> {
    count_hits(t, replicates, seed, exec, |s, rng| s.sample_simple(rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    Exact,
    Direct,
    Embedding,
}

/// One point of the connectivity-rate curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectedEstimate {
    pub n: u64,
    pub method: EstimateMethod,
    pub target: TypeSequence,
    pub replicates: u64,
    pub hits: u64,
    /// `ln p_conn`, absent when no replicate hit.
    pub ln_p: Option<f64>,
    /// Standard error of `ln_p` (delta method).
    pub ln_p_se: Option<f64>,
}

impl ConnectedEstimate {
    /// `-ln p_conn / n`.
    pub fn rate(&self) -> Option<f64> {
        self.ln_p.map(|l| -l / self.n as f64)
    }

    fn from_hits(n: u64, method: EstimateMethod, target: TypeSequence, h: HitCount, ln_weight: f64) -> Self {
        let (ln_p, ln_p_se) = if h.hits == 0 {
            (None, None)
        } else {
            let f = h.fraction();
            (Some(f.ln() + ln_weight), Some(((1.0 - f) / h.hits as f64).sqrt()))
        };
        ConnectedEstimate { n, method, target, replicates: h.replicates, hits: h.hits, ln_p, ln_p_se }
    }
}

/// Exact `ln p_conn` for `p.integerize(n)`.
pub fn connected_exact(p: &DegreeDistribution, n: u64) -> Result<ConnectedEstimate> {
    let target = p.integerize(n);
    let exact = count_connected_recursive(&target)?;
    Ok(ConnectedEstimate {
        n,
        method: EstimateMethod::Exact,
        target,
        replicates: 0,
        hits: 0,
        ln_p: Some(exact.ln_fraction()),
        ln_p_se: Some(0.0),
    })
}

/// Plain Monte Carlo over configurations of `p.integerize(n)`.
pub fn connected_direct(p: &DegreeDistribution, n: u64, replicates: u64, seed: u64, exec: Execution) -> Result<ConnectedEstimate> {
    let target = p.integerize(n);
    let h = connected_fraction(&target, replicates, seed, exec)?;
    Ok(ConnectedEstimate::from_hits(n, EstimateMethod::Direct, target, h, 0.0))
}

/// Estimates `p_conn(n)` through the enlarged sequence `N`. When the target
/// holds more than half of the vertices and half-edges of `N`, at most one
/// component can have type `n`, so
/// `P(giant type = n) = binom(N, n) |C^conn_n| |C_{N-n}| / |C_N|`
/// and `p_conn = P(giant type = n) |C_N| / (binom(N, n) |C_{N-n}| |C_n|)`.
pub fn connected_embedding(
    p: &DegreeDistribution,
    eps: f64,
    n: u64,
    replicates: u64,
    seed: u64,
    exec: Execution,
) -> Result<ConnectedEstimate> {
    let target = p.integerize(n);
    let plan = build_embedding(p, eps, n)?;
    let big = &plan.big;
    let rest = target.complement_in(big)?;
    if 2 * target.vertices() <= big.vertices() || 2 * target.total_degree() <= big.total_degree() {
        return Err(Error::Domain("target does not dominate the enlarged sequence".into()));
    }
    let ln_weight = ln_biguint(&count_configurations(big)?)
        - ln_biguint(&target.placements_in(big)?)
        - ln_biguint(&count_configurations(&rest)?)
        - ln_biguint(&count_configurations(&target)?);
    let sampler = Sampler::new(big)?;
    let wanted: Vec<u64> = sampler.classes().iter().map(|&k| target.count(k)).collect();
    let h = count_hits(big, replicates, seed, exec, |s, rng| s.sample_giant(rng).counts == wanted)?;
    Ok(ConnectedEstimate::from_hits(n, EstimateMethod::Embedding, target, h, ln_weight))
}

/// Settings for the connectivity-rate curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateKConfig {
    pub sizes: Vec<u64>,
    pub replicates: u64,
    pub seed: u64,
    /// Sizes up to this use plain Monte Carlo.
    pub direct_max_n: u64,
    pub eps: f64,
}

pub fn estimate_k(p: &DegreeDistribution, config: &EstimateKConfig, exec: Execution) -> Result<Vec<ConnectedEstimate>> {
    config
        .sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let seed = replicate_seed(config.seed, i as u64);
            if n <= config.direct_max_n {
                connected_direct(p, n, config.replicates, seed, exec)
            } else {
                connected_embedding(p, config.eps, n, config.replicates, seed, exec)
            }
        })
        .collect()
}

/// CSV with columns `n,method,replicates,hits,ln_p,ln_p_se,rate`.
pub fn estimates_csv(rows: &[ConnectedEstimate]) -> String {
    let mut out = String::from("n,method,replicates,hits,ln_p,ln_p_se,rate\n");
    let opt = |x: Option<f64>| x.map(fmt_sig).unwrap_or_else(|| "NA".into());
    for r in rows {
        let method = serde_json::to_value(r.method).expect("serializable");
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            method.as_str().expect("string"),
            r.replicates,
            r.hits,
            opt(r.ln_p),
            opt(r.ln_p_se),
            opt(r.rate())
        ));
    }
    out
}

/// Giant of one configuration on the enlarged sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GiantRecord {
    pub giant: TypeSequence,
    pub components: usize,
    /// `|E| - (|V| - 1)` of the giant.
    pub surplus: i64,
}

pub fn giant_samples(
    p: &DegreeDistribution,
    eps: f64,
    n: u64,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<Vec<GiantRecord>> {
    let plan = build_embedding(p, eps, n)?;
    let sampler = Sampler::new(&plan.big)?;
    Ok(map_replicates(exec, samples, |i| {
        let mut s = sampler.clone();
        let summary = s.sample_giant(&mut rng_from_seed(replicate_seed(seed, i)));
        let giant = s.summary_type(&summary);
        let surplus = (giant.total_degree() / 2) as i64 - (giant.vertices() as i64 - 1);
        GiantRecord { giant, components: summary.components, surplus }
    }))
}

/// Independent uniform connected simple graphs with type `t`.
pub fn uniform_connected_batch(
    t: &TypeSequence,
    count: u64,
    seed: u64,
    budget: u64,
    exec: Execution,
) -> Result<Vec<UniformSample>> {
    map_replicates(exec, count, |i| sample_uniform_connected(t, replicate_seed(seed, i), budget)).into_iter().collect()
}
