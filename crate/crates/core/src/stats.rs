//! Order statistics and correlation coefficients.

use alloc::vec::Vec;
use core::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CorrelationMethod {
    Pearson,
    /// Pearson on average ranks.
    Spearman,
    /// `(C - D) / (n (n - 1) / 2)`; tied pairs count in neither C nor D.
    KendallA,
    /// `(C - D) / sqrt((n0 - n1) (n0 - n2))`.
    KendallB,
    /// Lin's concordance correlation coefficient, population moments.
    LinCcc,
}

impl CorrelationMethod {
    pub const ALL: [CorrelationMethod; 5] = [
        CorrelationMethod::Pearson,
        CorrelationMethod::Spearman,
        CorrelationMethod::KendallA,
        CorrelationMethod::KendallB,
        CorrelationMethod::LinCcc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CorrelationMethod::Pearson => "pearson",
            CorrelationMethod::Spearman => "spearman",
            CorrelationMethod::KendallA => "kendall_a",
            CorrelationMethod::KendallB => "kendall_b",
            CorrelationMethod::LinCcc => "lin_ccc",
        }
    }

    pub fn parse(s: &str) -> Option<CorrelationMethod> {
        CorrelationMethod::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum CorrelationError {
    #[error("need at least 2 pairs, got {0}")]
    TooFewPairs(usize),
    #[error("coordinate lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("zero variance")]
    ZeroVariance,
}

/// Total order on reals in which `-0.0 == 0.0`.
#[inline]
pub fn cmp_f64(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or_else(|| a.total_cmp(&b))
}

/// 1-based position of the nearest-rank `q`-quantile in a sample of `n`:
/// `ceil(q * n)`, at least 1. Products within `1e-9` of an integer are
/// snapped so that e.g. `0.7 * 10` selects the 7th element.
pub fn nearest_rank(n: usize, q: f64) -> usize {
    let x = q * n as f64;
    let snapped = libm::round(x);
    let k = if (x - snapped).abs() <= 1e-9 * x.abs().max(1.0) { snapped } else { libm::ceil(x) };
    (k as usize).clamp(1, n.max(1))
}

/// Nearest-rank quantile of an ascending slice.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        None
    } else {
        Some(sorted[nearest_rank(sorted.len(), q) - 1])
    }
}

/// Nearest-rank quantile; always a member of `values`.
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| cmp_f64(*a, *b));
    quantile_sorted(&sorted, q)
}

/// Arithmetic mean, summed left to right.
pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// 1-based ranks, ties sharing the average of the positions they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| cmp_f64(values[a], values[b]));
    let mut ranks = alloc::vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && cmp_f64(values[order[end]], values[order[start]]) == Ordering::Equal {
            end += 1;
        }
        // positions start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    ranks
}

pub fn correlation(x: &[f64], y: &[f64], method: CorrelationMethod) -> Result<f64, CorrelationError> {
    if x.len() != y.len() {
        return Err(CorrelationError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(CorrelationError::TooFewPairs(x.len()));
    }
    match method {
        CorrelationMethod::Pearson => {
            let m = Moments::of(x, y);
            if m.var_x == 0.0 || m.var_y == 0.0 {
                return Err(CorrelationError::ZeroVariance);
            }
            Ok(clamp_unit(m.cov / libm::sqrt(m.var_x * m.var_y)))
        }
        CorrelationMethod::Spearman => correlation(&average_ranks(x), &average_ranks(y), CorrelationMethod::Pearson),
        CorrelationMethod::KendallA => {
            let k = KendallCounts::of(x, y);
            Ok(k.s as f64 / k.n0 as f64)
        }
        CorrelationMethod::KendallB => {
            let k = KendallCounts::of(x, y);
            let (dx, dy) = (k.n0 - k.n1, k.n0 - k.n2);
            if dx == 0 || dy == 0 {
                return Err(CorrelationError::ZeroVariance);
            }
            Ok(clamp_unit(k.s as f64 / libm::sqrt(dx as f64 * dy as f64)))
        }
        CorrelationMethod::LinCcc => {
            let m = Moments::of(x, y);
            if m.var_x == 0.0 || m.var_y == 0.0 {
                return Err(CorrelationError::ZeroVariance);
            }
            let d = m.mean_x - m.mean_y;
            Ok(clamp_unit(2.0 * m.cov / (m.var_x + m.var_y + d * d)))
        }
    }
}

/// Correlation over `(x, y)` pairs.
pub fn correlation_pairs(pairs: &[(f64, f64)], method: CorrelationMethod) -> Result<f64, CorrelationError> {
    let (x, y): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
    correlation(&x, &y, method)
}

fn clamp_unit(v: f64) -> f64 {
    v.clamp(-1.0, 1.0)
}

/// Population moments accumulated in one pass (Welford).
struct Moments {
    mean_x: f64,
    mean_y: f64,
    var_x: f64,
    var_y: f64,
    cov: f64,
}

impl Moments {
    fn of(x: &[f64], y: &[f64]) -> Moments {
        let (mut mx, mut my, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (k, (&a, &b)) in x.iter().zip(y).enumerate() {
            let n = (k + 1) as f64;
            let dx = a - mx;
            let dy = b - my;
            mx += dx / n;
            my += dy / n;
            sxx += dx * (a - mx);
            syy += dy * (b - my);
            sxy += dx * (b - my);
        }
        let n = x.len() as f64;
        Moments { mean_x: mx, mean_y: my, var_x: sxx / n, var_y: syy / n, cov: sxy / n }
    }
}

/// Pair counts for Kendall's tau in `O(n log n)` (Knight's algorithm).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KendallCounts {
    /// `n (n - 1) / 2`.
    pub n0: i64,
    /// Pairs tied in x.
    pub n1: i64,
    /// Pairs tied in y.
    pub n2: i64,
    /// Concordant minus discordant.
    pub s: i64,
}

impl KendallCounts {
    pub fn of(x: &[f64], y: &[f64]) -> KendallCounts {
        let n = x.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_unstable_by(|&a, &b| cmp_f64(x[a], x[b]).then(cmp_f64(y[a], y[b])));

        let mut n1 = 0i64;
        let mut n3 = 0i64;
        let mut i = 0;
        while i < n {
            let mut j = i + 1;
            while j < n && cmp_f64(x[order[j]], x[order[i]]) == Ordering::Equal {
                j += 1;
            }
            n1 += pairs(j - i);
            // joint ties inside this x-run
            let mut k = i;
            while k < j {
                let mut l = k + 1;
                while l < j && cmp_f64(y[order[l]], y[order[k]]) == Ordering::Equal {
                    l += 1;
                }
                n3 += pairs(l - k);
                k = l;
            }
            i = j;
        }

        let mut ys: Vec<f64> = order.iter().map(|&k| y[k]).collect();
        let mut buf = ys.clone();
        let swaps = merge_count(&mut ys, &mut buf);

        let mut n2 = 0i64;
        let mut i = 0;
        while i < n {
            let mut j = i + 1;
            while j < n && cmp_f64(ys[j], ys[i]) == Ordering::Equal {
                j += 1;
            }
            n2 += pairs(j - i);
            i = j;
        }
        let n0 = pairs(n);
        KendallCounts { n0, n1, n2, s: n0 - n1 - n2 + n3 - 2 * swaps }
    }
}

fn pairs(k: usize) -> i64 {
    (k as i64) * (k as i64 - 1) / 2
}

/// Stable merge sort of `v` ascending, returning the number of strictly
/// inverted pairs.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> i64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (lv, rv) = v.split_at_mut(mid);
        let (lb, rb) = buf.split_at_mut(mid);
        merge_count(lv, lb) + merge_count(rv, rb)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if cmp_f64(v[j], v[i]) == Ordering::Less {
            buf[k] = v[j];
            swaps += (mid - i) as i64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}
