//! Statistics against straightforward reference implementations.

use balancemkt::stats::{histogram, histogram_auto, quantile, skewness, summarize, tail_prob};
use balancemkt::fluctuations::sample_truncated_normal;
use balancemkt::rng::RngStream;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

/// Quantile by 1-based rank `1 + p (n - 1)`, interpolating between the two
/// neighbouring order statistics.
fn ref_quantile(xs: &[f64], p: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = 1.0 + p * (v.len() - 1) as f64;
    let k = rank.trunc() as usize;
    let frac = rank - k as f64;
    if k >= v.len() {
        v[v.len() - 1]
    } else {
        v[k - 1] * (1.0 - frac) + v[k] * frac
    }
}

/// Skewness from raw power sums.
fn ref_skewness(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let s1: f64 = xs.iter().sum::<f64>() / n;
    let s2: f64 = xs.iter().map(|x| x * x).sum::<f64>() / n;
    let s3: f64 = xs.iter().map(|x| x * x * x).sum::<f64>() / n;
    let var = s2 - s1 * s1;
    (s3 - 3.0 * s1 * s2 + 2.0 * s1.powi(3)) / var.powf(1.5)
}

fn random_vector(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = rng.random_range(3..200);
    let spread = rng.random_range(0.5..50.0);
    let heavy = rng.random_bool(0.3);
    (0..n)
        .map(|_| {
            let x: f64 = rng.random_range(-spread..spread);
            if heavy && rng.random_bool(0.05) { x * 20.0 } else { x }
        })
        .collect()
}

#[test]
fn summaries_match_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..100 {
        let xs = random_vector(&mut rng);
        let s = summarize(&xs).unwrap();
        let (q1, q2, q3) = (ref_quantile(&xs, 0.25), ref_quantile(&xs, 0.5), ref_quantile(&xs, 0.75));
        assert!((s.q1 - q1).abs() < 1e-9 && (s.median - q2).abs() < 1e-9 && (s.q3 - q3).abs() < 1e-9);
        assert!((quantile(&xs, 0.9).unwrap() - ref_quantile(&xs, 0.9)).abs() < 1e-9);

        let iqr = q3 - q1;
        let inside: Vec<f64> = xs.iter().copied().filter(|&x| x >= q1 - 1.5 * iqr && x <= q3 + 1.5 * iqr).collect();
        let mut outliers: Vec<f64> = xs.iter().copied().filter(|&x| x < q1 - 1.5 * iqr || x > q3 + 1.5 * iqr).collect();
        outliers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(s.outliers, outliers);
        assert_eq!(s.whisker_low, inside.iter().copied().fold(f64::INFINITY, f64::min));
        assert_eq!(s.whisker_high, inside.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        assert!(s.q1 <= s.median && s.median <= s.q3);
        assert!(s.min <= s.whisker_low && s.whisker_high <= s.max);

        let sk = skewness(&xs).unwrap();
        assert!((sk - ref_skewness(&xs)).abs() < 1e-6 * (1.0 + sk.abs()), "{sk}");
    }
}

#[test]
fn histograms_match_brute_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..100 {
        let xs = random_vector(&mut rng);
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let bins = rng.random_range(1..15);
        let mut edges: Vec<f64> = (0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect();
        edges[bins] = hi;
        let h = histogram(&xs, &edges).unwrap();
        for b in 0..bins {
            let last = b == bins - 1;
            let count = xs
                .iter()
                .filter(|&&x| x >= edges[b] && (x < edges[b + 1] || (last && x <= edges[b + 1])))
                .count();
            assert_eq!(h.frequencies[b], count as f64 / xs.len() as f64);
        }
        let auto = histogram_auto(&xs).unwrap();
        assert!((auto.frequencies.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert_eq!(tail_prob(&xs, lo - 1.0).unwrap(), 1.0);
        assert_eq!(tail_prob(&xs, hi).unwrap(), 0.0);
    }
}

#[test]
fn truncated_normal_volumes_normalize() {
    let mut rng = RngStream::new(12).rng();
    let xs: Vec<f64> = (0..10_000)
        .map(|_| sample_truncated_normal(10.0, 0.1, 5.0, 15.0, &mut rng).unwrap())
        .collect();
    let h = histogram_auto(&xs).unwrap();
    assert!((h.frequencies.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    assert!(h.frequencies.iter().all(|&f| f >= 0.0));
    assert!(h.edges.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn exponential_skewness_is_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let exp = Exp::new(1.0).unwrap();
    let xs: Vec<f64> = (0..100_000).map(|_| exp.sample(&mut rng)).collect();
    let s = skewness(&xs).unwrap();
    assert!((s - 2.0).abs() <= 0.1, "{s}");
}
