//! Chernoff-type tail bounds and the explicit finite-`n` deviation bound
//! for the card-based game.
//!
//! For a sum `X` of independent 0/1 variables with mean `μ`:
//!
//! * `P(X ≥ (1+η)μ) ≤ exp(−η²μ/(2+η))`  ([`chernoff_upper`])
//! * `P(X ≤ (1−η)μ) ≤ exp(−η²μ/2)`      ([`chernoff_lower`])
//! * `P(|X−μ| ≥ γ) ≤ 2·exp(−γ²/(2μ+γ))` ([`chernoff_abs`])
//!
//! [`BinomialTails`] computes exact binomial tails in log space so the
//! bounds can be checked for domination.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::partition::Neumaier;

fn check_nonneg(name: &'static str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(name, x, "finite and >= 0"))
    }
}

/// Upper-tail bound `exp(−η²μ/(2+η))`.
pub fn chernoff_upper(mu: f64, eta: f64) -> Result<f64> {
    check_nonneg("mu", mu)?;
    check_nonneg("eta", eta)?;
    Ok((-eta * eta * mu / (2.0 + eta)).exp())
}

/// Lower-tail bound `exp(−η²μ/2)`.
pub fn chernoff_lower(mu: f64, eta: f64) -> Result<f64> {
    check_nonneg("mu", mu)?;
    check_nonneg("eta", eta)?;
    Ok((-eta * eta * mu / 2.0).exp())
}

/// Two-sided bound in absolute terms, `2·exp(−γ²/(2μ+γ))`.
///
/// At `μ = 0, γ > 0` this is the formula's limit `2e^{−γ}`; at `γ = 0` the
/// bound is the vacuous value 2.
pub fn chernoff_abs(mu: f64, gamma: f64) -> Result<f64> {
    check_nonneg("mu", mu)?;
    check_nonneg("gamma", gamma)?;
    if gamma == 0.0 {
        return Ok(2.0);
    }
    Ok(2.0 * (-gamma * gamma / (2.0 * mu + gamma)).exp())
}

/// The rate function `f(ε) = ε²/(2+ε)`.
pub fn theorem_rate(epsilon: f64) -> Result<f64> {
    check_nonneg("epsilon", epsilon)?;
    Ok(epsilon * epsilon / (2.0 + epsilon))
}

/// Default number of rounds for a run at tolerance `ε`: `⌈f(ε)·n⌉ + 1`.
pub fn theorem_rounds(epsilon: f64, n: u64) -> Result<u64> {
    let rate = theorem_rate(epsilon)?;
    Ok((rate * n as f64).ceil() as u64 + 1)
}

/// Failure-probability bounds for one `(n, p, ε₁, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationBound {
    pub epsilon: f64,
    pub n: u64,
    pub p: f64,
    pub m: u64,
    /// Some tracked bowl `k ≤ m` deviates from its mean by `≥ ε·np`.
    pub regime1: f64,
    /// Some bowl `k > m` is still nonempty.
    pub regime2: f64,
    /// `min(1, regime1 + regime2)`.
    pub combined: f64,
    /// `f(ε)·n·p`, the exponent of the asymptotic bound.
    pub asymptotic_rate: f64,
}

/// Explicit bounds behind the limit-shape result at finite `n`:
///
/// * `regime1 = min(1, 2m·exp(−f(ε₁)np))`
/// * `regime2 = min(1, n·exp(−mp))`
pub fn finite_n_bound(n: u64, p: f64, epsilon: f64, m: u64) -> Result<DeviationBound> {
    if n == 0 {
        return Err(domain("n", n, "n >= 1"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("p", p, "0 < p < 1"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(domain("epsilon", epsilon, "epsilon > 0"));
    }
    if m == 0 {
        return Err(domain("m", m, "m >= 1"));
    }
    let rate = theorem_rate(epsilon)?;
    let np = n as f64 * p;
    let regime1 = (2.0 * m as f64 * (-rate * np).exp()).min(1.0);
    let regime2 = (n as f64 * (-(m as f64) * p).exp()).min(1.0);
    Ok(DeviationBound {
        epsilon,
        n,
        p,
        m,
        regime1,
        regime2,
        combined: (regime1 + regime2).min(1.0),
        asymptotic_rate: rate * np,
    })
}

/// Grid estimate of `sup_{x≥0} (e^{−x} − (1−p)^{x/p})`.
///
/// Evaluated on `[0, 40]` with step `1e−4`; beyond 40 the difference is at
/// most `e^{−40}`, which is folded in as a floor.
pub fn uniform_conv_gap(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("p", p, "0 < p < 1"));
    }
    const X_MAX: f64 = 40.0;
    const STEPS: u32 = 400_000;
    let log_base = (-p).ln_1p() / p;
    let mut gap = (-X_MAX).exp();
    for i in 0..=STEPS {
        let x = X_MAX * f64::from(i) / f64::from(STEPS);
        gap = gap.max((-x).exp() - (x * log_base).exp());
    }
    Ok(gap)
}

/// `(1−p)^{1/p}`.
pub fn one_minus_p_root(p: f64) -> f64 {
    ((-p).ln_1p() / p).exp()
}

/// Exact `Binomial(n, p)` probabilities, stored as log-pmf values.
#[derive(Clone, Debug)]
pub struct BinomialTails {
    n: u64,
    p: f64,
    log_pmf: Vec<f64>,
}

impl BinomialTails {
    pub fn new(n: u64, p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain("p", p, "0 < p < 1"));
        }
        let mut ln_fact = Vec::with_capacity(n as usize + 1);
        let mut acc = Neumaier::default();
        ln_fact.push(0.0);
        for i in 1..=n {
            acc.add((i as f64).ln());
            ln_fact.push(acc.sum());
        }
        let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
        let nn = n as usize;
        let log_pmf = (0..=nn)
            .map(|k| {
                ln_fact[nn] - ln_fact[k] - ln_fact[nn - k]
                    + k as f64 * ln_p
                    + (nn - k) as f64 * ln_q
            })
            .collect();
        Ok(BinomialTails { n, p, log_pmf })
    }

    pub fn mean(&self) -> f64 {
        self.n as f64 * self.p
    }

    pub fn pmf(&self, k: u64) -> f64 {
        self.log_pmf.get(k as usize).map_or(0.0, |l| l.exp())
    }

    fn sum_range(&self, lo: usize, hi: usize) -> f64 {
        if lo > hi || lo > self.n as usize {
            return 0.0;
        }
        let hi = hi.min(self.n as usize);
        let terms = &self.log_pmf[lo..=hi];
        let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut acc = Neumaier::default();
        for &l in terms {
            acc.add((l - max).exp());
        }
        (max + acc.sum().ln()).exp().min(1.0)
    }

    /// `P(X ≥ k)`.
    pub fn upper(&self, k: u64) -> f64 {
        self.sum_range(k as usize, self.n as usize)
    }

    /// `P(X ≤ k)`.
    pub fn lower(&self, k: u64) -> f64 {
        self.sum_range(0, k as usize)
    }

    /// `P(X ≥ t)` for real `t`.
    pub fn upper_real(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        self.upper(snap_ceil(t) as u64)
    }

    /// `P(X ≤ t)` for real `t`.
    pub fn lower_real(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        self.lower(snap_floor(t) as u64)
    }

    /// `P(|X − μ| ≥ γ)`.
    pub fn abs_deviation(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 1.0;
        }
        let mu = self.mean();
        (self.upper_real(mu + gamma) + self.lower_real(mu - gamma)).min(1.0)
    }
}

// Thresholds like (1+η)μ come out of float products; a value within 1e-9
// of an integer is taken to be that integer.
fn snap_ceil(t: f64) -> f64 {
    let r = t.round();
    if (t - r).abs() <= 1e-9 * t.abs().max(1.0) {
        r
    } else {
        t.ceil()
    }
}

fn snap_floor(t: f64) -> f64 {
    let r = t.round();
    if (t - r).abs() <= 1e-9 * t.abs().max(1.0) {
        r
    } else {
        t.floor()
    }
}
