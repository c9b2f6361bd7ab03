//! Univariate robust building blocks: median, the Qn scale estimator, ranks,
//! normal scores and the standard-normal quantile function.

use crate::error::{Error, Result};

/// Consistency constant making Qn unbiased for the standard deviation at the
/// normal model. No finite-sample correction is applied.
pub const QN_CONSISTENCY: f64 = 2.2219;

/// A validated univariate sample: non-empty, every value finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample(Vec<f64>);

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        check_finite(&values)?;
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn summary(&self) -> Result<RobustSummary> {
        RobustSummary::robust(&self.0)
    }
}

/// Location and scale of one column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustSummary {
    pub location: f64,
    pub scale: f64,
}

impl RobustSummary {
    /// Median and Qn.
    pub fn robust(x: &[f64]) -> Result<Self> {
        Ok(Self {
            location: median(x)?,
            scale: qn_scale(x)?,
        })
    }

    /// Mean and sample standard deviation (n − 1 denominator); the
    /// non-robust counterpart used by the Pearson baseline.
    pub fn classical(x: &[f64]) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::TooFewObservations);
        }
        check_finite(x)?;
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let ss = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
        Ok(Self {
            location: mean,
            scale: (ss / (n - 1.0)).sqrt(),
        })
    }
}

fn check_finite(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(row) => Err(Error::NonFinite {
            column: "<sample>".into(),
            row,
        }),
        None => Ok(()),
    }
}

fn sorted_copy(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

pub fn median(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_finite(x)?;
    let v = sorted_copy(x);
    let m = v.len() / 2;
    Ok(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

/// The order statistic index `k = C(h, 2)` with `h = ⌊n/2⌋ + 1`.
pub fn qn_order(n: usize) -> usize {
    let h = n / 2 + 1;
    h * (h - 1) / 2
}

/// Qn scale: `2.2219 ·` the `k`-th smallest of `{|x_i − x_j| : i < j}`.
///
/// The order statistic is found by bisection on the difference value with an
/// O(n) two-pointer pair count, then by explicit selection among the few
/// pairs left in the final bracket. The result is bit-identical to full
/// enumeration of all pairs.
pub fn qn_scale(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::TooFewObservations);
    }
    check_finite(x)?;
    let sorted = sorted_copy(x);
    Ok(QN_CONSISTENCY * kth_pairwise_difference(&sorted, qn_order(x.len())))
}

/// Number of pairs `i < j` of a sorted slice with `x[j] − x[i] <= t`.
fn count_at_most(sorted: &[f64], t: f64) -> usize {
    let mut i = 0;
    let mut count = 0;
    for j in 0..sorted.len() {
        while sorted[j] - sorted[i] > t {
            i += 1;
        }
        count += j - i;
    }
    count
}

/// `k`-th smallest (1-based) pairwise difference of a sorted slice.
fn kth_pairwise_difference(sorted: &[f64], k: usize) -> f64 {
    let n = sorted.len();
    debug_assert!(k >= 1 && k <= n * (n - 1) / 2);
    if count_at_most(sorted, 0.0) >= k {
        return 0.0;
    }
    // invariant: count(lo) < k <= count(hi)
    let mut lo = 0.0_f64;
    let mut hi = sorted[n - 1] - sorted[0];
    let mut count_lo = count_at_most(sorted, lo);
    let mut count_hi = count_at_most(sorted, hi);
    let budget = n.max(64);
    while count_hi - count_lo > budget {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            // no representable value strictly inside: every candidate is `hi`
            return hi;
        }
        let c = count_at_most(sorted, mid);
        if c >= k {
            hi = mid;
            count_hi = c;
        } else {
            lo = mid;
            count_lo = c;
        }
    }
    let mut window = Vec::with_capacity(count_hi - count_lo);
    let (mut a, mut b) = (0, 0);
    for j in 0..n {
        // pairs (i, j) with lo < x[j] - x[i] <= hi are i in [a, b)
        while sorted[j] - sorted[a] > hi {
            a += 1;
        }
        if b < a {
            b = a;
        }
        while b < j && sorted[j] - sorted[b] > lo {
            b += 1;
        }
        window.extend((a..b).map(|i| sorted[j] - sorted[i]));
    }
    let r = k - count_lo - 1;
    *window.select_nth_unstable_by(r, f64::total_cmp).1
}

/// How tied values share rank positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Tied values all receive the average of the positions they occupy.
    #[default]
    MidRank,
    /// Ties are broken by order of appearance.
    Ordinal,
}

/// Ranks in `1..=n`.
pub fn ranks(x: &[f64], ties: TiePolicy) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_finite(x)?;
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let mut out = vec![0.0; n];
    match ties {
        TiePolicy::Ordinal => {
            for (pos, &i) in order.iter().enumerate() {
                out[i] = (pos + 1) as f64;
            }
        }
        TiePolicy::MidRank => {
            let mut start = 0;
            while start < n {
                let mut end = start + 1;
                while end < n && x[order[end]] == x[order[start]] {
                    end += 1;
                }
                // positions start+1 ..= end
                let avg = (start + 1 + end) as f64 / 2.0;
                for &i in &order[start..end] {
                    out[i] = avg;
                }
                start = end;
            }
        }
    }
    Ok(out)
}

/// `Φ⁻¹(rank / (n + 1))` with mid-ranks.
pub fn normal_scores(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::TooFewObservations);
    }
    let denom = (x.len() + 1) as f64;
    ranks(x, TiePolicy::MidRank)?
        .into_iter()
        .map(|r| std_normal_quantile(r / denom))
        .collect()
}

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal quantile function.
///
/// Acklam's rational approximation (relative error about 1e-9) followed by
/// one Halley step on `Φ(x) − p`, which brings the error to near machine
/// precision across the open unit interval.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let x = if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    };

    // Halley refinement of Φ(x) − p. Above the median the residual is formed
    // from the survival function; 1 − p is exact there.
    let e = if p > 0.5 {
        (1.0 - p) - 0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
    } else {
        std_normal_cdf(x) - p
    };
    let u = e / std_normal_pdf(x);
    Ok(x - u / (1.0 + 0.5 * x * u))
}
