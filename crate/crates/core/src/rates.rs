//! Rate structure of the Beta(2 - alpha, alpha)-coalescent.
//!
//! With `m` blocks, `k` of them merge (leaving `m - k + 1`) at rate
//!
//! ```text
//! rho_{m, m-k+1} = C(m, k) B(k - alpha, m - k + alpha) / (Gamma(2 - alpha) Gamma(alpha)).
//! ```
//!
//! The block-counting chain therefore jumps down by `U = k - 1` with
//! probability `P_{m, m-U} = rho_{m, m-U} / rho_m`. Writing
//! `P_{m, m-k} = d_{mk} Gamma(k + 1 - alpha) / Gamma(k + 2)` ties the jump law
//! to the m-free law `P(V = k) = d Gamma(k + 1 - alpha) / Gamma(k + 2)` with
//! `d = alpha / Gamma(2 - alpha)`; the ratio `d_{mk} / d` drives the coupling
//! of `U` and `V`.
//!
//! Everything is evaluated through log-Gamma ratios. The total rate has the
//! closed form `rho_m = (m - 1) Gamma(m + alpha - 1) / (alpha Gamma(alpha) Gamma(m))`,
//! which follows from integrating the Beta density against the merger
//! weights; [`total_rate_by_sum`] keeps the literal sum as a second route.

use crate::error::{domain, Result};
use crate::numerics::{ln_gamma_ratio, AlphaParams};

/// An integer-valued law with a closed-form or cheaply summed tail.
pub trait DiscreteLaw {
    /// Smallest value with positive mass.
    fn support_start(&self) -> u64;
    /// Largest value with positive mass, `None` for unbounded support.
    fn support_end(&self) -> Option<u64>;
    /// `P(X = k)`.
    fn pmf(&self, k: u64) -> f64;
    /// `P(X >= k)`.
    fn tail(&self, k: u64) -> f64;
    /// `E(X)`, `None` if infinite.
    fn mean(&self) -> Option<f64>;

    /// `P(X <= k)`.
    fn cdf(&self, k: u64) -> f64 {
        1.0 - self.tail(k + 1)
    }
}

fn check_m(m: u64) -> Result<()> {
    if m < 2 {
        return Err(domain(format!("block count m must be >= 2, got {m}")));
    }
    Ok(())
}

/// `ln Gamma(m + alpha - 1) - ln Gamma(m)`.
#[inline]
pub(crate) fn ln_rate_growth(m: u64, p: &AlphaParams) -> f64 {
    ln_gamma_ratio(m as f64, p.alpha() - 1.0)
}

/// Rate at which `k` of `m` blocks merge into one, `rho_{m, m-k+1}`.
pub fn merge_rate(m: u64, k: u64, p: &AlphaParams) -> Result<f64> {
    check_m(m)?;
    if k < 2 || k > m {
        return Err(domain(format!("merger size k must lie in [2, {m}], got {k}")));
    }
    let a = p.alpha();
    let ln = (m as f64).ln()
        + ln_gamma_ratio((k + 1) as f64, -1.0 - a)
        + ln_gamma_ratio((m - k + 1) as f64, a - 1.0)
        - p.ln_gamma_two_minus_alpha()
        - p.ln_gamma_alpha();
    Ok(ln.exp())
}

/// Total merger rate `rho_m`, in closed form.
pub fn total_rate(m: u64, p: &AlphaParams) -> Result<f64> {
    check_m(m)?;
    Ok(total_rate_unchecked(m, p))
}

#[inline]
pub(crate) fn total_rate_unchecked(m: u64, p: &AlphaParams) -> f64 {
    total_rate_from_growth(m, ln_rate_growth(m, p), p)
}

#[inline]
pub(crate) fn total_rate_from_growth(m: u64, ln_growth: f64, p: &AlphaParams) -> f64 {
    let a = p.alpha();
    (m - 1) as f64 * (ln_growth - a.ln() - p.ln_gamma_alpha()).exp()
}

/// `rho_m` as the literal sum of [`merge_rate`] over all merger sizes. O(m).
pub fn total_rate_by_sum(m: u64, p: &AlphaParams) -> Result<f64> {
    check_m(m)?;
    let mut terms = Vec::with_capacity((m - 1) as usize);
    for k in 2..=m {
        terms.push(merge_rate(m, k, p)?);
    }
    // Smallest first.
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(terms.iter().sum())
}

/// The m-independent jump law `P(V = k) = d Gamma(k + 1 - a) / Gamma(k + 2)`,
/// `k >= 1`, with `P(V >= k) = Gamma(k + 1 - a) / (Gamma(2 - a) Gamma(k + 1))`
/// and mean `1 / (a - 1)`.
#[derive(Debug, Clone, Copy)]
pub struct VLaw {
    alpha: f64,
    ln_d: f64,
    ln_gamma_two_minus_alpha: f64,
}

pub fn v_law(p: &AlphaParams) -> VLaw {
    VLaw {
        alpha: p.alpha(),
        ln_d: p.d_norm().ln(),
        ln_gamma_two_minus_alpha: p.ln_gamma_two_minus_alpha(),
    }
}

impl VLaw {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Tail evaluated at a real argument `x >= 1`, used when inverting the
    /// tail beyond the range of exactly representable integers of interest.
    pub(crate) fn tail_real(&self, x: f64) -> f64 {
        if x <= 1.0 {
            return 1.0;
        }
        (ln_gamma_ratio(x + 1.0, -self.alpha) - self.ln_gamma_two_minus_alpha).exp()
    }
}

impl DiscreteLaw for VLaw {
    fn support_start(&self) -> u64 {
        1
    }

    fn support_end(&self) -> Option<u64> {
        None
    }

    fn pmf(&self, k: u64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        (self.ln_d + ln_gamma_ratio((k + 2) as f64, -1.0 - self.alpha)).exp()
    }

    fn tail(&self, k: u64) -> f64 {
        if k <= 1 {
            return 1.0;
        }
        self.tail_real(k as f64)
    }

    fn mean(&self) -> Option<f64> {
        Some(1.0 / (self.alpha - 1.0))
    }
}

/// Law of `W = R_1 - 1` for the stationary renewal process with V-distributed
/// gaps: `P(W = w) = P(V >= w) / E(V)`, `w >= 1`. Summing the V tail in closed
/// form gives `P(W >= w) = w P(V >= w) = Gamma(w + 1 - a) / (Gamma(2 - a) Gamma(w))`.
#[derive(Debug, Clone, Copy)]
pub struct DelayLaw {
    v: VLaw,
}

pub fn delay_law(p: &AlphaParams) -> DelayLaw {
    DelayLaw { v: v_law(p) }
}

impl DiscreteLaw for DelayLaw {
    fn support_start(&self) -> u64 {
        1
    }

    fn support_end(&self) -> Option<u64> {
        None
    }

    fn pmf(&self, w: u64) -> f64 {
        if w == 0 {
            return 0.0;
        }
        (self.v.alpha - 1.0) * self.v.tail(w)
    }

    fn tail(&self, w: u64) -> f64 {
        if w <= 1 {
            return 1.0;
        }
        (ln_gamma_ratio(w as f64, 1.0 - self.v.alpha) - self.v.ln_gamma_two_minus_alpha).exp()
    }

    /// Infinite: the delay has tail of order `w^(1 - alpha)`.
    fn mean(&self) -> Option<f64> {
        None
    }
}

/// `d_{mk} / d` for `1 <= k <= m - 1`: the ratio `P_{m, m-k} / P(V = k)`.
/// Returns 0 for `k >= m`.
pub fn d_ratio(m: u64, k: u64, p: &AlphaParams) -> f64 {
    if k >= m {
        return 0.0;
    }
    ln_d_ratio(m, k, ln_rate_growth(m, p), p).exp()
}

/// Below this jump size `ln(d_{mk} / d)` is summed factor by factor.
const PRODUCT_FORM_MAX_K: u64 = 32;

/// `ln(d_{mk} / d)` given the precomputed `ln Gamma(m + a - 1) - ln Gamma(m)`.
///
/// `d_{mk} / d = m / (m - 1) * prod_{i=1}^{k} (m - i) / (m - i + a - 1)`. Every
/// factor is `1 - O(1/m)`, so for small `k` the product form keeps full
/// relative precision in `d_{mk} / d - 1`, which the Gamma-ratio form would
/// lose for large `m`.
#[inline]
pub(crate) fn ln_d_ratio(m: u64, k: u64, ln_growth: f64, p: &AlphaParams) -> f64 {
    debug_assert!(k >= 1 && k < m);
    let mf = m as f64;
    let am1 = p.alpha() - 1.0;
    let head = -(-1.0 / mf).ln_1p();
    if k <= PRODUCT_FORM_MAX_K {
        let mut acc = head;
        for i in 1..=k {
            acc += (-am1 / ((m - i) as f64 + am1)).ln_1p();
        }
        acc
    } else {
        head + ln_gamma_ratio((m - k) as f64, am1) - ln_growth
    }
}

/// Law of the downward jump `U = X_0 - X_1` given `X_0 = m`, on `{1, ..., m-1}`.
#[derive(Debug, Clone, Copy)]
pub struct JumpLaw {
    m: u64,
    params: AlphaParams,
    v: VLaw,
    ln_growth: f64,
}

pub fn jump_law(m: u64, p: &AlphaParams) -> Result<JumpLaw> {
    check_m(m)?;
    Ok(JumpLaw { m, params: *p, v: v_law(p), ln_growth: ln_rate_growth(m, p) })
}

impl JumpLaw {
    pub fn m(&self) -> u64 {
        self.m
    }

    /// `d_{mk} / d`, the acceptance ratio against the V law.
    pub fn ratio(&self, k: u64) -> f64 {
        if k == 0 || k >= self.m {
            return 0.0;
        }
        ln_d_ratio(self.m, k, self.ln_growth, &self.params).exp()
    }

    /// `d_{mk} / d - 1`, computed without cancellation.
    pub fn ratio_minus_one(&self, k: u64) -> f64 {
        if k == 0 || k >= self.m {
            return -1.0;
        }
        ln_d_ratio(self.m, k, self.ln_growth, &self.params).exp_m1()
    }

    /// The full pmf table, index `k - 1` for `k = 1..m-1`. O(m).
    pub fn pmf_table(&self) -> Vec<f64> {
        (1..self.m).map(|k| self.pmf(k)).collect()
    }

    /// `P(U >= k)` for `k = 1..m-1`, summed from the top so that small tails
    /// keep their relative precision. O(m).
    pub fn tail_table(&self) -> Vec<f64> {
        let pmf = self.pmf_table();
        let mut tails = vec![0.0; pmf.len()];
        let mut acc = 0.0;
        for (i, p) in pmf.iter().enumerate().rev() {
            acc += p;
            tails[i] = acc;
        }
        tails
    }

    /// `k_m = min{k >= 1 : P_{m, m-k} <= P(V = k)}`; equals `m` when the
    /// jump law dominates the V pmf on its whole support.
    pub fn crossover(&self) -> u64 {
        (1..self.m).find(|&k| self.ratio(k) <= 1.0).unwrap_or(self.m)
    }

    /// Exact `P(U != V) = sum_k (P(V = k) - P_{m,m-k})^+` under the maximal
    /// coupling, evaluated as the equal mass `sum_{k < k_m} (P_{m,m-k} - P(V = k))`.
    /// O(k_m), and `k_m` is of order `1 / (alpha - 1)`.
    pub fn mismatch_probability(&self) -> f64 {
        let km = self.crossover();
        (1..km).map(|k| self.v.pmf(k) * self.ratio_minus_one(k)).sum()
    }

    /// The same mismatch mass summed over the side where the V pmf exceeds
    /// the jump pmf, closing with the exact V tail beyond `m - 1`. O(m).
    pub fn mismatch_probability_by_tail(&self) -> f64 {
        let mut acc = self.v.tail(self.m);
        for k in (1..self.m).rev() {
            let r = self.ratio_minus_one(k);
            if r < 0.0 {
                acc += -r * self.v.pmf(k);
            }
        }
        acc
    }
}

impl DiscreteLaw for JumpLaw {
    fn support_start(&self) -> u64 {
        1
    }

    fn support_end(&self) -> Option<u64> {
        Some(self.m - 1)
    }

    fn pmf(&self, k: u64) -> f64 {
        if k == 0 || k >= self.m {
            return 0.0;
        }
        self.ratio(k) * self.v.pmf(k)
    }

    fn tail(&self, k: u64) -> f64 {
        if k <= 1 {
            return 1.0;
        }
        (k..self.m).rev().map(|j| self.pmf(j)).sum()
    }

    fn mean(&self) -> Option<f64> {
        Some((1..self.m).map(|k| k as f64 * self.pmf(k)).sum())
    }
}

/// Coupling weights of the jump law against the V law at a fixed `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingWeights {
    pub m: u64,
    /// `d_{mk}` for `k = 1..m-1` (index `k - 1`).
    pub d_mk: Vec<f64>,
    /// Normalizing constant `d_m = d m / (m - 1)`.
    pub d_m: f64,
    /// `1 ∧ P_{m,m-k} / P(V = k)` for `k = 1..m-1` (index `k - 1`).
    pub accept_prob: Vec<f64>,
}

pub fn coupling_weights(m: u64, p: &AlphaParams) -> Result<CouplingWeights> {
    let law = jump_law(m, p)?;
    let d = p.d_norm();
    let ratios: Vec<f64> = (1..m).map(|k| law.ratio(k)).collect();
    Ok(CouplingWeights {
        m,
        d_mk: ratios.iter().map(|r| r * d).collect(),
        d_m: d * m as f64 / (m - 1) as f64,
        accept_prob: ratios.iter().map(|r| r.min(1.0)).collect(),
    })
}

/// Relative slack allowed when comparing two tails that agree exactly in
/// exact arithmetic (both equal 1 at `k = 1`).
const DOMINANCE_SLACK: f64 = 1e-12;

/// Whether `P(U >= k | X_0 = m) <= P(V >= k)` for every `k` in `[1, m - 1]`,
/// from exact tails.
pub fn dominance_check(m: u64, p: &AlphaParams) -> Result<bool> {
    let law = jump_law(m, p)?;
    let v = v_law(p);
    let tails = law.tail_table();
    Ok(tails
        .iter()
        .enumerate()
        .all(|(i, &tu)| tu <= v.tail(i as u64 + 1) * (1.0 + DOMINANCE_SLACK)))
}
