//! Deterministic random instance generators shared by the test suites.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use frontier_pricing::distribution::{MixtureComponent, PreferenceCdf};
use frontier_pricing::market::{MarketSnapshot, NormalizedItem};
use frontier_pricing::pricing::PricingProblem;

pub fn gen_market(rng: &mut ChaCha8Rng, n: usize) -> MarketSnapshot {
    let items = (0..n)
        .map(|i| {
            let p = rng.gen_range(0.01..=1.0);
            let r = rng.gen_range(0.01..=1.0);
            NormalizedItem::new(format!("s{i:03}"), p, r)
        })
        .collect();
    MarketSnapshot::new(items, None).unwrap()
}

pub fn gen_cdf(rng: &mut ChaCha8Rng) -> PreferenceCdf {
    match rng.gen_range(0..3) {
        0 => PreferenceCdf::Uniform01,
        1 => {
            let k = rng.gen_range(1..=4);
            let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let components = raw
                .iter()
                .map(|w| {
                    let a = rng.gen_range(0.0..0.9);
                    let b = rng.gen_range(a + 0.05..1.0_f64.min(a + 0.95));
                    MixtureComponent {
                        lo: a,
                        hi: b,
                        weight: w / total,
                    }
                })
                .collect();
            PreferenceCdf::MixtureOfUniforms { components }
        }
        _ => {
            let k = rng.gen_range(2..=6);
            let mut alphas: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..0.99)).collect();
            alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
            alphas.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
            let mut values: Vec<f64> = alphas.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut knots = vec![(0.0, 0.0)];
            knots.extend(alphas.into_iter().zip(values));
            knots.push((1.0, 1.0));
            PreferenceCdf::PiecewiseLinear { knots }
        }
    }
}

pub fn gen_problem(rng: &mut ChaCha8Rng) -> PricingProblem {
    let n = rng.gen_range(2..=30);
    let competitors = gen_market(rng, n);
    let r_i = rng.gen_range(0.05..=1.0);
    let ceiling = rng.gen_range(0.5..3.0);
    let cdf = gen_cdf(rng);
    PricingProblem::new(Some(competitors), r_i, ceiling, cdf).unwrap()
}
