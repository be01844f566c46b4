//! Log-space and regression helpers.

use crate::Real;

/// `log(sum(exp(x)))`, `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp<S: Real>(values: impl IntoIterator<Item = S>) -> S {
    let mut acc = LogSumExp::new();
    for v in values {
        acc.push(v);
    }
    acc.value()
}

/// Streaming log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp<S> {
    max: S,
    sum: S,
}

impl<S: Real> LogSumExp<S> {
    pub fn new() -> Self {
        Self {
            max: S::neg_infinity(),
            sum: S::zero(),
        }
    }

    pub fn push(&mut self, x: S) {
        if x == S::neg_infinity() {
            return;
        }
        if x > self.max {
            self.sum = self.sum * (self.max - x).exp() + S::one();
            self.max = x;
        } else {
            self.sum = self.sum + (x - self.max).exp();
        }
    }

    pub fn value(&self) -> S {
        if self.max == S::neg_infinity() {
            S::neg_infinity()
        } else {
            self.max + self.sum.ln()
        }
    }
}

impl<S: Real> Default for LogSumExp<S> {
    fn default() -> Self {
        Self::new()
    }
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ls_slope<S: Real>(xs: &[S], ys: &[S]) -> S {
    let n = S::count(xs.len());
    let mx = xs.iter().copied().sum::<S>() / n;
    let my = ys.iter().copied().sum::<S>() / n;
    let mut num = S::zero();
    let mut den = S::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        num = num + (x - mx) * (y - my);
        den = den + (x - mx) * (x - mx);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_matches_naive() {
        let xs = [0.1f64, -2.0, 3.5, 1.0];
        let naive = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(xs) - naive).abs() < 1e-14);
        assert_eq!(log_sum_exp(Vec::<f64>::new()), f64::NEG_INFINITY);
        assert!((log_sum_exp([1000.0f64, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn slope_of_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        assert!((ls_slope(&xs, &ys) - 3.0).abs() < 1e-12);
    }
}
