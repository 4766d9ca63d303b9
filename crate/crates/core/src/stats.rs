//! Descriptive statistics for ensemble samples.
//!
//! Quantiles use linear interpolation between closest ranks: for sorted data
//! `x[0..n]` the `p`-quantile is read at fractional rank `(n - 1) * p`.
//! Histogram bins are half-open `[lo, hi)` except the last, which also holds
//! its upper edge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn non_empty(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::invalid("statistic of an empty sample"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("sample contains non-finite values"));
    }
    Ok(())
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantile(values: &[f64], p: f64) -> Result<f64> {
    non_empty(values)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("quantile level {p} outside [0, 1]")));
    }
    Ok(quantile_sorted(&sorted(values), p))
}

pub fn mean(values: &[f64]) -> Result<f64> {
    non_empty(values)?;
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Tukey boxplot summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxplotStats {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Most extreme data points within 1.5 IQR of the box.
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

impl BoxplotStats {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

pub fn summarize(values: &[f64]) -> Result<BoxplotStats> {
    non_empty(values)?;
    let v = sorted(values);
    let q1 = quantile_sorted(&v, 0.25);
    let median = quantile_sorted(&v, 0.5);
    let q3 = quantile_sorted(&v, 0.75);
    let iqr = q3 - q1;
    let (fence_lo, fence_hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside = || v.iter().copied().filter(|x| (fence_lo..=fence_hi).contains(x));
    Ok(BoxplotStats {
        n: v.len(),
        min: v[0],
        q1,
        median,
        q3,
        max: v[v.len() - 1],
        whisker_low: inside().next().unwrap_or(q1),
        whisker_high: inside().next_back().unwrap_or(q3),
        outliers: v.iter().copied().filter(|x| *x < fence_lo || *x > fence_hi).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    /// Fraction of the sample in each bin.
    pub frequencies: Vec<f64>,
    pub count: usize,
}

impl Histogram {
    /// Center of the most populated bin (the first one on ties).
    pub fn mode(&self) -> f64 {
        let best = self
            .frequencies
            .iter()
            .enumerate()
            .fold(0, |b, (i, &f)| if f > self.frequencies[b] { i } else { b });
        0.5 * (self.edges[best] + self.edges[best + 1])
    }
}

pub fn histogram(values: &[f64], edges: &[f64]) -> Result<Histogram> {
    non_empty(values)?;
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("histogram edges must be strictly increasing"));
    }
    let last = edges.len() - 2;
    let mut counts = vec![0usize; edges.len() - 1];
    for &x in values {
        if x < edges[0] || x > edges[edges.len() - 1] {
            return Err(Error::invalid(format!("value {x} outside histogram range")));
        }
        // index of the last edge <= x
        let bin = edges.partition_point(|&e| e <= x).saturating_sub(1).min(last);
        counts[bin] += 1;
    }
    let n = values.len() as f64;
    Ok(Histogram {
        edges: edges.to_vec(),
        frequencies: counts.iter().map(|&c| c as f64 / n).collect(),
        count: values.len(),
    })
}

/// Bins of width `width` starting at the sample minimum.
pub fn histogram_with_width(values: &[f64], width: f64) -> Result<Histogram> {
    non_empty(values)?;
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::invalid("bin width must be positive"));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bins = (((hi - lo) / width).floor() as usize + 1).max(1);
    let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
    histogram(values, &edges)
}

/// Freedman-Diaconis bin width `2 IQR / n^(1/3)`; falls back to a range-based
/// width when the IQR vanishes.
pub fn freedman_diaconis_width(values: &[f64]) -> Result<f64> {
    let s = summarize(values)?;
    let n = values.len() as f64;
    let w = 2.0 * s.iqr() / n.cbrt();
    if w > 0.0 {
        Ok(w)
    } else if s.max > s.min {
        Ok((s.max - s.min) / n.sqrt().ceil())
    } else {
        Ok(1.0)
    }
}

pub fn histogram_auto(values: &[f64]) -> Result<Histogram> {
    histogram_with_width(values, freedman_diaconis_width(values)?)
}

/// Fraction of the sample strictly above `threshold`.
pub fn tail_prob(values: &[f64], threshold: f64) -> Result<f64> {
    non_empty(values)?;
    Ok(values.iter().filter(|&&x| x > threshold).count() as f64 / values.len() as f64)
}

/// Moment skewness `m3 / m2^(3/2)` (population moments).
pub fn skewness(values: &[f64]) -> Result<f64> {
    non_empty(values)?;
    if values.len() < 3 {
        return Err(Error::invalid("skewness needs at least 3 values"));
    }
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    let (m2, m3) = values.iter().fold((0.0, 0.0), |(a, b), &x| {
        let d = x - m;
        (a + d * d, b + d * d * d)
    });
    let (m2, m3) = (m2 / n, m3 / n);
    let scale = values.iter().fold(0.0_f64, |s, x| s.max(x.abs()));
    if m2.sqrt() <= 1e-12 * scale || m2 == 0.0 {
        return Err(Error::invalid("skewness of a sample with zero variance"));
    }
    Ok(m3 / m2.powf(1.5))
}
