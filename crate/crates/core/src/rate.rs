//! The extinction root `beta(p)`, the rate functional `K(p)` and the
//! giant-component degree law `q`.
//!
//! `beta` is found on the reduced function
//! `F(p, b) = sum_{k>=2} (b - b^k)/(1 - b^{k+1}) p*_k - p*_0`, which is strictly
//! increasing on `[0, 1)` and does not vanish at the trivial root `b = 0` of the
//! raw fixed-point equation.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::degrees::{size_biased, DegreeDistribution, SizeBiasedDistribution};
use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Bound on `dF/db` over `(0, 1)`.
const DERIVATIVE_BOUND: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaSolution {
    pub beta: f64,
    /// `|F(p, beta)|` at return.
    pub residual: f64,
    /// A-priori bound `1 - a/A` with `a = 1 - 2/mu`, `A = 2`.
    pub upper_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateResult {
    #[serde(rename = "K")]
    pub k: f64,
    pub beta: f64,
    pub q: DegreeDistribution,
    pub gamma: f64,
    pub residuals: Residuals,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// `|F(p, beta)|`.
    pub reduced: f64,
    /// `|sum_k q*_k beta^k - beta|`.
    pub survival: f64,
    /// `|mu_p - (1 - beta^2) sum_k k p_k / (1 - beta^k)|`.
    pub mean_identity: f64,
}

/// `1 - b^k` without cancellation for `b` close to 1.
pub(crate) fn one_minus_pow(b: f64, k: u32) -> f64 {
    if b == 0.0 {
        return 1.0;
    }
    if k == 0 {
        return 0.0;
    }
    -(k as f64 * b.ln()).exp_m1()
}

/// `ln(1 - b^k)`.
fn ln_one_minus_pow(b: f64, k: u32) -> f64 {
    let x = b.powi(k as i32);
    if x < 0.5 {
        (-x).ln_1p()
    } else {
        one_minus_pow(b, k).ln()
    }
}

fn reduced_with(star: &SizeBiasedDistribution, beta: f64) -> f64 {
    let mut acc = 0.0;
    for (k, w) in star.iter() {
        if k < 2 {
            continue;
        }
        // (b - b^k) / (1 - b^{k+1}) = b (1 - b^{k-1}) / (1 - b^{k+1})
        acc += beta * one_minus_pow(beta, k - 1) / one_minus_pow(beta, k + 1) * w;
    }
    acc - star.weight(0)
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::Domain(format!("beta = {beta} outside [0, 1)")));
    }
    Ok(())
}

/// The reduced fixed-point function `F(p, beta)`.
pub fn reduced_fixed_point(p: &DegreeDistribution, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(reduced_with(&size_biased(p), beta))
}

/// Solves `F(p, beta) = 0` by bisection on `[0, 1 - a/A]`.
///
/// When `p_1 = 0` the unique root is `beta = 0`.
pub fn solve_beta(p: &DegreeDistribution, tol: f64) -> Result<BetaSolution> {
    let mean = p.mean();
    if mean <= 2.0 {
        return Err(Error::SubcriticalDistribution { mean });
    }
    let star = size_biased(p);
    let a = 1.0 - 2.0 / mean;
    let upper_bound = 1.0 - a / DERIVATIVE_BOUND;
    let f0 = -star.weight(0);
    if f0 == 0.0 {
        return Ok(BetaSolution { beta: 0.0, residual: 0.0, upper_bound });
    }

    let (mut lo, mut hi) = (0.0f64, upper_bound);
    // F(lo) < 0 < F(hi); halve until the bracket stops shrinking.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = reduced_with(&star, mid);
        if f == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (f_lo, f_hi) = (reduced_with(&star, lo), reduced_with(&star, hi));
    let (beta, residual) = if f_lo.abs() <= f_hi.abs() { (lo, f_lo.abs()) } else { (hi, f_hi.abs()) };
    if residual > tol {
        return Err(Error::NoConvergence { residual });
    }
    Ok(BetaSolution { beta, residual, upper_bound })
}

/// `q_k = p_k / (1 - beta^k) / gamma` with `gamma = sum_i p_i / (1 - beta^i)`.
pub fn giant_degree_distribution(p: &DegreeDistribution, beta: f64) -> Result<(DegreeDistribution, f64)> {
    check_beta(beta)?;
    let raw: BTreeMap<u32, f64> = p.iter().map(|(k, w)| (k, w / one_minus_pow(beta, k))).collect();
    let gamma: f64 = raw.values().sum();
    let q = DegreeDistribution::new(raw.into_iter().map(|(k, w)| (k, w / gamma)).collect())?;
    Ok((q, gamma))
}

/// Offspring law `q*` of every non-root individual of the unimodular
/// branching process with root law `q`.
pub fn unimodular_offspring(q: &DegreeDistribution) -> SizeBiasedDistribution {
    size_biased(q)
}

/// `|sum_k q*_k beta^k - beta|`: zero exactly when `beta` is a fixed point of
/// the offspring generating function.
pub fn survival_residual(q: &DegreeDistribution, beta: f64) -> f64 {
    (unimodular_offspring(q).pgf(beta) - beta).abs()
}

fn mean_identity_residual(p: &DegreeDistribution, beta: f64) -> f64 {
    let rhs: f64 = p.iter().map(|(k, w)| k as f64 * w / one_minus_pow(beta, k)).sum();
    (p.mean() - one_minus_pow(beta, 2) * rhs).abs()
}

/// `K(p) = (mu/2) ln(1 - beta^2) - sum_k p_k ln(1 - beta^k)` in nats per vertex.
pub fn rate_functional(p: &DegreeDistribution, beta: f64) -> f64 {
    0.5 * p.mean() * ln_one_minus_pow(beta, 2) - p.iter().map(|(k, w)| w * ln_one_minus_pow(beta, k)).sum::<f64>()
}

pub fn rate_k(p: &DegreeDistribution) -> Result<RateResult> {
    rate_k_with_tol(p, DEFAULT_TOLERANCE)
}

pub fn rate_k_with_tol(p: &DegreeDistribution, tol: f64) -> Result<RateResult> {
    let solution = solve_beta(p, tol)?;
    if p.weight(1) == 0.0 {
        return Err(Error::Degree1Required);
    }
    let beta = solution.beta;
    let (q, gamma) = giant_degree_distribution(p, beta)?;
    let residuals = Residuals {
        reduced: solution.residual,
        survival: survival_residual(&q, beta),
        mean_identity: mean_identity_residual(p, beta),
    };
    Ok(RateResult { k: rate_functional(p, beta), beta, q, gamma, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_four() -> DegreeDistribution {
        DegreeDistribution::from_pairs(&[(1, 0.5), (4, 0.5)]).unwrap()
    }

    fn root() -> f64 {
        2.0 - 3f64.sqrt()
    }

    #[test]
    fn reduced_function_endpoints() {
        let p = two_four();
        assert!((reduced_fixed_point(&p, 0.0).unwrap() + 0.2).abs() < 1e-15);
        assert!((reduced_fixed_point(&p, 1.0 - 1e-9).unwrap() - 0.2).abs() < 1e-8);
        assert!(reduced_fixed_point(&p, root()).unwrap().abs() < 1e-12);
        assert!(matches!(reduced_fixed_point(&p, 1.0), Err(Error::Domain(_))));
        assert!(matches!(reduced_fixed_point(&p, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn reduced_function_closed_form() {
        // For p = {1: 1/2, 4: 1/2} the reduced function is 0.8 b / (1 + b^2) - 0.2.
        let p = two_four();
        for i in 0..100 {
            let b = i as f64 / 100.0;
            let closed = 0.8 * b / (1.0 + b * b) - 0.2;
            assert!((reduced_fixed_point(&p, b).unwrap() - closed).abs() < 1e-14);
        }
    }

    #[test]
    fn solve_two_four() {
        let s = solve_beta(&two_four(), 1e-12).unwrap();
        assert!((s.beta - root()).abs() < 1e-10);
        assert!(s.residual <= 1e-12);
        assert!((s.upper_bound - 0.9).abs() < 1e-15);
    }

    #[test]
    fn solve_subcritical() {
        let p = DegreeDistribution::from_pairs(&[(2, 1.0)]).unwrap();
        assert!(matches!(solve_beta(&p, 1e-12), Err(Error::SubcriticalDistribution { .. })));
        assert!(matches!(rate_k(&p), Err(Error::SubcriticalDistribution { .. })));
    }

    #[test]
    fn solve_matches_grid_scan() {
        let p = DegreeDistribution::from_pairs(&[(1, 0.4), (3, 0.6)]).unwrap();
        let s = solve_beta(&p, 1e-10).unwrap();
        // Independent oracle: sign change of F on a grid of step 1e-6.
        let star = size_biased(&p);
        let f = |b: f64| -> f64 {
            star.iter()
                .filter(|&(k, _)| k >= 2)
                .map(|(k, w)| (b - b.powi(k as i32)) / (1.0 - b.powi(k as i32 + 1)) * w)
                .sum::<f64>()
                - star.weight(0)
        };
        let step = 1e-6;
        let mut i = 0u64;
        while f((i + 1) as f64 * step) < 0.0 {
            i += 1;
        }
        let (lo, hi) = (i as f64 * step, (i + 1) as f64 * step);
        assert!(f(lo) < 0.0 && f(hi) >= 0.0);
        assert!(s.beta >= lo - 1e-12 && s.beta <= hi + 1e-12, "{} not in [{lo}, {hi}]", s.beta);
    }

    #[test]
    fn solve_without_degree_one() {
        let p = DegreeDistribution::from_pairs(&[(2, 0.5), (3, 0.5)]).unwrap();
        assert_eq!(solve_beta(&p, 1e-12).unwrap().beta, 0.0);
        assert_eq!(rate_k(&p), Err(Error::Degree1Required));
    }

    #[test]
    fn rate_two_four() {
        let r = rate_k(&two_four()).unwrap();
        // 40-digit evaluation at beta = 2 - sqrt(3).
        assert!((r.k - 0.065_406_017_970_568_48).abs() < 1e-12);
        assert!((r.k - 0.06544).abs() < 1e-4);
        assert!((r.gamma - 1.185_603_444_662_680_6).abs() < 1e-10);
        assert!((r.q.weight(1) - 0.576_088_661_826_168_4).abs() < 1e-10);
        assert!((r.q.weight(4) - 0.423_911_338_173_831_6).abs() < 1e-10);
        assert!(r.residuals.survival < 1e-9);
        assert!(r.residuals.mean_identity < 1e-10);
    }

    #[test]
    fn giant_law_identities() {
        let p = two_four();
        let (q, gamma) = giant_degree_distribution(&p, root()).unwrap();
        assert!((q.weight(1) - 0.576088).abs() < 1e-6);
        assert!((q.weight(4) - 0.423912).abs() < 1e-6);
        assert!((gamma - 1.185604).abs() < 1e-6);
        for (k, pk) in p.iter() {
            assert!((gamma * q.weight(k) * one_minus_pow(root(), k) - pk).abs() < 1e-15);
        }
        let total: f64 = q.weights().values().sum();
        assert!((total - 1.0).abs() < 1e-12);

        let (q0, gamma0) = giant_degree_distribution(&p, 1e-9).unwrap();
        assert!((q0.weight(1) - 0.5).abs() < 1e-8);
        assert!((gamma0 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn unimodular_offspring_examples() {
        let two = DegreeDistribution::from_pairs(&[(2, 1.0)]).unwrap();
        assert_eq!(unimodular_offspring(&two).weight(1), 1.0);
        let one = DegreeDistribution::from_pairs(&[(1, 1.0)]).unwrap();
        assert_eq!(unimodular_offspring(&one).weight(0), 1.0);

        let (q, _) = giant_degree_distribution(&two_four(), root()).unwrap();
        let star = unimodular_offspring(&q);
        assert!((star.weight(0) - 0.253_589_838_486_224_5).abs() < 1e-10);
        assert!((star.weight(3) - 0.746_410_161_513_775_5).abs() < 1e-10);
    }

    #[test]
    fn survival_residual_examples() {
        let (q, _) = giant_degree_distribution(&two_four(), root()).unwrap();
        assert!(survival_residual(&q, root()) < 1e-9);
        assert!(survival_residual(&q, root() + 0.01) > 0.0);

        let one = DegreeDistribution::from_pairs(&[(1, 1.0)]).unwrap();
        for b in [0.1, 0.5, 0.9] {
            assert!((survival_residual(&one, b) - (1.0 - b)).abs() < 1e-15);
        }
    }

    fn arb_supercritical() -> impl Strategy<Value = DegreeDistribution> {
        (0.05f64..0.6, prop::collection::btree_map(2u32..15, 0.01f64..1.0, 1..6)).prop_filter_map(
            "supercritical",
            |(p1, rest)| {
                let total: f64 = rest.values().sum();
                let mut w: BTreeMap<u32, f64> = rest.into_iter().map(|(k, v)| (k, v / total * (1.0 - p1))).collect();
                w.insert(1, p1);
                let p = DegreeDistribution::normalized(w).ok()?;
                (p.mean() > 2.05).then_some(p)
            },
        )
    }

    proptest! {
        #[test]
        fn reduced_function_is_increasing(p in arb_supercritical(), a in 0.0f64..0.999, b in 0.0f64..0.999) {
            prop_assume!((a - b).abs() > 1e-6);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(reduced_fixed_point(&p, lo).unwrap() < reduced_fixed_point(&p, hi).unwrap());
        }

        #[test]
        fn beta_lies_in_bracket(p in arb_supercritical()) {
            let s = solve_beta(&p, 1e-12).unwrap();
            let star = size_biased(&p);
            prop_assert!(s.beta > star.weight(0) / 2.0);
            prop_assert!(s.beta < 1.0 - 0.5 * (1.0 - 2.0 / p.mean()));
            prop_assert!(s.beta < s.upper_bound && s.upper_bound <= 1.0);
        }

        #[test]
        fn consistency_chain(p in arb_supercritical()) {
            let tol = 1e-12;
            let s = solve_beta(&p, tol).unwrap();
            let (q, _) = giant_degree_distribution(&p, s.beta).unwrap();
            prop_assert!(survival_residual(&q, s.beta) <= 10.0 * tol);
            prop_assert!(mean_identity_residual(&p, s.beta) <= 1e-10 * p.mean());
            prop_assert!(rate_k(&p).unwrap().k > 0.0);
        }

        #[test]
        fn rate_moves_continuously(p in arb_supercritical(), shift in 1e-6f64..1e-3) {
            // move mass from the top degree to degree 1
            let top = p.max_degree();
            let moved = shift.min(p.weight(top) / 2.0);
            let mut w = p.weights().clone();
            *w.get_mut(&top).unwrap() -= moved;
            *w.entry(1).or_insert(0.0) += moved;
            let near = DegreeDistribution::new(w).unwrap();
            prop_assume!(near.mean() > 2.05 && p.mean() > 2.05);
            let (a, b) = (rate_k(&p).unwrap().k, rate_k(&near).unwrap().k);
            prop_assert!((a - b).abs() <= 50.0 * p.distance(&near));
        }
    }
}
