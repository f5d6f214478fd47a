//! Truncation `p -> p^eps` and the enlarged type sequence `N` whose
//! configuration-model giant approximates `n p` from below.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::degrees::{DegreeDistribution, TypeSequence};
use crate::error::{Error, Result};
use crate::rate::{giant_degree_distribution, one_minus_pow, solve_beta, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationResult {
    pub p_eps: DegreeDistribution,
    /// Normaliser `sum_{i<=M} (1 - eps/(i 2^{i+2})) p_i`.
    pub rho: f64,
    /// Truncation degree `M`.
    pub max_degree: u32,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingPlan {
    /// The enlarged type sequence.
    #[serde(rename = "N")]
    pub big: TypeSequence,
    pub q_eps: DegreeDistribution,
    pub p_eps: DegreeDistribution,
    pub beta_eps: f64,
    pub gamma: f64,
    pub rho: f64,
    pub max_degree: u32,
    pub n_target: u64,
    pub eps: f64,
}

/// Per-degree damping `1 - eps / (i 2^{i+2})`.
pub fn damping(eps: f64, i: u32) -> f64 {
    1.0 - eps / (i as f64 * 2f64.powi(i as i32 + 2))
}

/// Largest admissible epsilon, `(mu_p - 2) / 4`.
pub fn epsilon_limit(p: &DegreeDistribution) -> f64 {
    (p.mean() - 2.0) / 4.0
}

pub fn truncate_p(p: &DegreeDistribution, eps: f64) -> Result<TruncationResult> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps = {eps} is not positive")));
    }
    let limit = epsilon_limit(p);
    if eps >= limit {
        return Err(Error::EpsilonTooLarge { eps, limit });
    }
    if eps >= 1.0 {
        return Err(Error::Domain(format!("eps = {eps} is not below 1")));
    }
    // Smallest M with sum_{k>M} k p_k < eps/2.
    let mut tail: f64 = p.mean();
    let mut max_degree = 0;
    for (k, w) in p.iter() {
        if tail < eps / 2.0 {
            break;
        }
        tail -= k as f64 * w;
        max_degree = k;
    }
    let damped: BTreeMap<u32, f64> = p
        .iter()
        .take_while(|&(k, _)| k <= max_degree)
        .map(|(k, w)| (k, damping(eps, k) * w))
        .collect();
    let rho: f64 = damped.values().sum();
    let p_eps = DegreeDistribution::new(damped.into_iter().map(|(k, w)| (k, w / rho)).collect())?;
    if p_eps.mean() <= 2.0 {
        return Err(Error::EpsilonTooLarge { eps, limit });
    }
    Ok(TruncationResult { p_eps, rho, max_degree, eps })
}

/// Builds `N_i = floor(rho gamma q^eps_i n)`, then removes one degree-1 vertex
/// if the total degree is odd.
pub fn build_embedding(p: &DegreeDistribution, eps: f64, n: u64) -> Result<EmbeddingPlan> {
    let trunc = truncate_p(p, eps)?;
    let beta = solve_beta(&trunc.p_eps, DEFAULT_TOLERANCE)?.beta;
    let (q_eps, gamma) = giant_degree_distribution(&trunc.p_eps, beta)?;
    let counts: BTreeMap<u32, u64> = q_eps
        .iter()
        .map(|(k, q)| (k, (trunc.rho * gamma * q * n as f64).floor() as u64))
        .collect();
    Ok(EmbeddingPlan {
        big: TypeSequence::with_parity_repair(counts),
        q_eps,
        p_eps: trunc.p_eps,
        beta_eps: beta,
        gamma,
        rho: trunc.rho,
        max_degree: trunc.max_degree,
        n_target: n,
        eps,
    })
}

/// Membership in the set of sequences approximating `n` from below:
/// `m <= n` elementwise and `l_m > (1 - eps) l_n`.
pub fn in_nps(m: &TypeSequence, n: &TypeSequence, eps: f64) -> bool {
    m.is_bounded_by(n) && (m.total_degree() as f64) > (1.0 - eps) * n.total_degree() as f64
}

impl EmbeddingPlan {
    /// Limit of `v_k(giant) / n` for each retained degree.
    pub fn expected_giant_fraction(&self, k: u32) -> f64 {
        self.rho * self.gamma * self.q_eps.weight(k) * one_minus_pow(self.beta_eps, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate::rate_k;

    fn two_four() -> DegreeDistribution {
        DegreeDistribution::from_pairs(&[(1, 0.5), (4, 0.5)]).unwrap()
    }

    #[test]
    fn truncation_reweights_finite_support() {
        let t = truncate_p(&two_four(), 0.1).unwrap();
        assert_eq!(t.max_degree, 4);
        let rho = 0.5 * (1.0 - 0.1 / 8.0) + 0.5 * (1.0 - 0.1 / 256.0);
        assert!((t.rho - rho).abs() < 1e-15);
        assert!((t.p_eps.weight(1) - (1.0 - 0.1 / 8.0) * 0.5 / rho).abs() < 1e-15);
        assert!((t.p_eps.weight(4) - (1.0 - 0.1 / 256.0) * 0.5 / rho).abs() < 1e-15);
        assert!(t.rho > 1.0 - 0.1 / 4.0 && t.rho < 1.0);
        assert_eq!(t.p_eps.weights().len(), 2);
    }

    #[test]
    fn truncation_drops_tail() {
        let mut w = BTreeMap::new();
        w.insert(1, 0.5);
        w.insert(4, 0.4999);
        w.insert(50, 0.0001);
        let p = DegreeDistribution::new(w).unwrap();
        // tail beyond 4 carries 50 * 1e-4 = 5e-3 < eps/2
        let t = truncate_p(&p, 0.05).unwrap();
        assert_eq!(t.max_degree, 4);
        assert_eq!(t.p_eps.max_degree(), 4);
        let t = truncate_p(&p, 0.005).unwrap();
        assert_eq!(t.max_degree, 50);
    }

    #[test]
    fn epsilon_too_large() {
        let marginal = DegreeDistribution::from_pairs(&[(1, 0.49), (4, 0.51)]).unwrap();
        let eps = 4.0 * (marginal.mean() - 2.0);
        assert!(matches!(truncate_p(&marginal, eps), Err(Error::EpsilonTooLarge { .. })));
        assert!(matches!(truncate_p(&two_four(), 0.125), Err(Error::EpsilonTooLarge { .. })));
        assert!(truncate_p(&two_four(), 0.124).is_ok());
        assert!(matches!(truncate_p(&two_four(), 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn embedding_approaches_rate_module() {
        let p = two_four();
        let rate = rate_k(&p).unwrap();
        let plan = build_embedding(&p, 1e-3, 1_000_000).unwrap();
        for k in [1, 4] {
            assert!((plan.q_eps.weight(k) - rate.q.weight(k)).abs() < 1e-2);
            let ratio = plan.big.count(k) as f64 / 1e6;
            assert!((ratio - rate.gamma * rate.q.weight(k)).abs() < 1e-2);
        }
        let big_n = plan.big.vertices() as f64 / 1e6;
        assert!((big_n - plan.gamma * plan.rho).abs() < 1e-5);
    }

    #[test]
    fn embedding_identities() {
        let plan = build_embedding(&two_four(), 0.05, 100_000).unwrap();
        for (k, pk) in plan.p_eps.iter() {
            let back = plan.gamma * plan.q_eps.weight(k) * one_minus_pow(plan.beta_eps, k);
            assert!((back - pk).abs() < 1e-15);
            // rho gamma q_k (1 - beta^k) = (1 - eps/(k 2^{k+2})) p_k
            assert!((plan.expected_giant_fraction(k) - damping(0.05, k) * 0.5).abs() < 1e-14);
            let expected = (plan.rho * plan.gamma * plan.q_eps.weight(k) * 1e5).floor() as u64;
            assert!(plan.big.count(k) == expected || (k == 1 && plan.big.count(k) + 1 == expected));
        }
        assert_eq!(plan.big.total_degree() % 2, 0);
    }

    #[test]
    fn empty_target() {
        let plan = build_embedding(&two_four(), 0.05, 0).unwrap();
        assert!(plan.big.is_empty());
    }

    #[test]
    fn nps_membership() {
        let n = TypeSequence::from_pairs(&[(1, 2), (2, 1)]).unwrap();
        assert!(in_nps(&n, &n, 0.01));
        let m = TypeSequence::from_pairs(&[(1, 2)]).unwrap();
        assert!(!in_nps(&m, &n, 0.4));
        assert!(in_nps(&m, &n, 0.6));
        let over = TypeSequence::from_pairs(&[(1, 2), (2, 2)]).unwrap();
        assert!(!in_nps(&over, &n, 0.99));
    }
}
