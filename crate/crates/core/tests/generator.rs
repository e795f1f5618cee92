use mgnn_core::generator::{random_circulant, ring_distance, GeneratorParams};
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

/// Probability that `|round(N(0, r))| = k` given it is non-zero.
fn offset_pmf(r: f64, kmax: usize) -> Vec<f64> {
    let z = Normal::new(0.0, r).unwrap();
    let mut p: Vec<f64> = (0..=kmax)
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                2.0 * (z.cdf(k as f64 + 0.5) - z.cdf(k as f64 - 0.5))
            }
        })
        .collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    p
}

#[test]
fn head_offsets_follow_rounded_half_normal() {
    let r = 11.1;
    let g = random_circulant(&GeneratorParams::new(8192, 6.0, r, 7));
    let kmax = 60;
    let pmf = offset_pmf(r, kmax);
    let mut counts = vec![0usize; kmax + 1];
    for e in g.edges() {
        let k = ring_distance(e.src, e.dst, g.num_nodes());
        counts[k.min(kmax)] += 1;
    }
    let m = g.num_edges() as f64;
    let mean: f64 = g
        .edges()
        .iter()
        .map(|e| ring_distance(e.src, e.dst, g.num_nodes()) as f64)
        .sum::<f64>()
        / m;
    let expected: f64 = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
    assert!(
        (mean - expected).abs() / expected < 0.02,
        "mean {mean:.3} vs {expected:.3}"
    );
    // continuous half-normal mean, for scale
    assert!((expected / (r * (2.0 / std::f64::consts::PI).sqrt()) - 1.0).abs() < 0.05);
    // chi-square over bins 1..=35 (each expected count > 5), 34 dof, 0.999 quantile ~ 65.2
    let chi2: f64 = (1..=35)
        .map(|k| {
            let e = pmf[k] * m;
            (counts[k] as f64 - e).powi(2) / e
        })
        .sum();
    assert!(chi2 < 65.2, "chi2 {chi2:.1}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn structural_invariants(n in 2usize..300, d in 0.5f64..8.0, r in 0.3f64..20.0, seed in any::<u64>()) {
        let p = GeneratorParams::new(n, d, r, seed);
        let g = random_circulant(&p);
        prop_assert_eq!(g.num_nodes(), n);
        prop_assert_eq!(g.num_edges(), (n as f64 * d / 2.0).floor() as usize);
        for (i, e) in g.edges().iter().enumerate() {
            prop_assert!(e.src != e.dst);
            prop_assert!(e.src < n && e.dst < n);
            prop_assert_eq!(e.timestamp, i as i64);
        }
        prop_assert_eq!(&random_circulant(&p), &g);
    }
}

#[test]
fn different_seeds_differ() {
    let a = random_circulant(&GeneratorParams::new(500, 6.0, 11.1, 1));
    let b = random_circulant(&GeneratorParams::new(500, 6.0, 11.1, 2));
    assert_ne!(a, b);
}
