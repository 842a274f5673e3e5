//! Seeded random generation.
//!
//! Every sampler draws from a [`RandomStream`], a ChaCha8 generator keyed by
//! a user seed and a stream id. Replicate `i` of an experiment always uses
//! stream id `i` (offset by an experiment-specific salt), so results do not
//! depend on how replicates are scheduled across threads.
//!
//! The jump sampler is the performance core of chain simulation: it draws
//! `V` from the m-free law and accepts it as the jump `U` with probability
//! `1 ∧ P_{m,m-V} / P(V)`. Rejections happen with probability at most
//! `1 / ((alpha - 1) m)` and fall back to a residual law supported on
//! `j < k_m`, which is O(1/(alpha - 1)) wide.

use std::f64::consts::PI;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, Result};
use crate::numerics::{ln_gamma, AlphaParams};
use crate::rates::{
    delay_law, jump_law, ln_d_ratio, ln_rate_growth, v_law, DelayLaw, DiscreteLaw, JumpLaw,
    VLaw,
};

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// The 256-bit ChaCha key is expanded from `splitmix64(seed)` and the stream
/// id selects one of ChaCha's 2^64 independent streams, so distinct ids never
/// share state. Output is identical on every platform.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut key = [0u8; 32];
        let mut s = seed;
        for chunk in key.chunks_exact_mut(8) {
            s = splitmix64(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream_id);
        RandomStream { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on the open interval (0, 1), 53 bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw.
    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(self)
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Cap on the precomputed tail table; the rest is inverted in closed form.
const TAIL_TABLE_MAX: u64 = 4096;
/// The table also stops once the tail has dropped below this.
const TAIL_TABLE_FLOOR: f64 = 1e-12;
/// Largest value returned; beyond 2^53 integers stop being exact in f64.
const MAX_EXACT: u64 = 1 << 53;

/// Inverse-CDF sampler for an unbounded integer law on `{1, 2, ...}` from its
/// tail `P(X >= k)`: a table for small `k`, then exponential search and
/// bisection on the closed-form tail. Exact for every uniform.
#[derive(Debug, Clone)]
pub struct InversionSampler<L> {
    law: L,
    /// `table[i] = P(X >= i + 2)`.
    table: Vec<f64>,
}

pub type VSampler = InversionSampler<VLaw>;
pub type DelaySampler = InversionSampler<DelayLaw>;

impl VSampler {
    pub fn for_params(p: &AlphaParams) -> Self {
        InversionSampler::new(v_law(p))
    }
}

impl DelaySampler {
    pub fn for_params(p: &AlphaParams) -> Self {
        InversionSampler::new(delay_law(p))
    }
}

impl<L: DiscreteLaw> InversionSampler<L> {
    pub fn new(law: L) -> Self {
        debug_assert_eq!(law.support_start(), 1);
        let mut table = Vec::new();
        for k in 2..=TAIL_TABLE_MAX + 1 {
            let t = law.tail(k);
            table.push(t);
            if t < TAIL_TABLE_FLOOR {
                break;
            }
        }
        InversionSampler { law, table }
    }

    pub fn law(&self) -> &L {
        &self.law
    }

    #[inline]
    pub fn sample(&self, stream: &mut RandomStream) -> u64 {
        self.invert(stream.uniform())
    }

    /// Smallest `k >= 1` with `P(X >= k + 1) <= u`. For `u` uniform on (0, 1)
    /// this has the law of `X`.
    pub fn invert(&self, u: f64) -> u64 {
        if u >= self.table[0] {
            return 1;
        }
        let last = *self.table.last().unwrap();
        if u >= last {
            return self.table.partition_point(|&t| t > u) as u64 + 1;
        }
        // tail(lo + 1) > u holds for lo = table length.
        let mut lo = self.table.len() as u64;
        let mut hi = lo * 2;
        while self.law.tail(hi + 1) > u {
            if hi >= MAX_EXACT / 2 {
                return MAX_EXACT;
            }
            lo = hi;
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.law.tail(mid + 1) > u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// One draw of the coupled pair `(U, V)` at block count `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoupledDraw {
    pub u: u64,
    pub v: u64,
    /// A residual table was built for this draw (only on rejection).
    pub residual_built: bool,
    /// The residual mass underflowed and the jump was drawn by direct
    /// inversion of the jump law instead.
    pub fallback: bool,
}

/// Sampler for the coupling of the jump `U` given `X_0 = m` with the m-free
/// V law, and hence an O(1)-amortized exact sampler of the jump law.
///
/// `P(U = k | V = k) = 1 ∧ P_{m,m-k} / P(V = k)`; on rejection `U` is drawn
/// from the law proportional to `(P_{m,m-j} - P(V = j))^+`, supported on
/// `j < k_m`. So `U <= V` always and the `U`-marginal is the jump law.
#[derive(Debug, Clone)]
pub struct JumpSampler {
    params: AlphaParams,
    v: VSampler,
}

impl JumpSampler {
    pub fn new(params: &AlphaParams) -> Self {
        JumpSampler { params: *params, v: VSampler::for_params(params) }
    }

    pub fn params(&self) -> &AlphaParams {
        &self.params
    }

    pub fn v_sampler(&self) -> &VSampler {
        &self.v
    }

    /// Joint draw of `(U, V)` at block count `m >= 2`.
    pub fn pair(&self, m: u64, stream: &mut RandomStream) -> CoupledDraw {
        debug_assert!(m >= 2);
        let v = self.v.sample(stream);
        // d_{m1} / d = m / (m + alpha - 2) > 1, so V = 1 is always accepted.
        if v == 1 {
            return CoupledDraw { u: 1, v, residual_built: false, fallback: false };
        }
        if v < m {
            let ln_growth = if v > 32 { ln_rate_growth(m, &self.params) } else { 0.0 };
            let ln_ratio = ln_d_ratio(m, v, ln_growth, &self.params);
            if ln_ratio >= 0.0 || stream.uniform() < ln_ratio.exp() {
                return CoupledDraw { u: v, v, residual_built: false, fallback: false };
            }
        }
        let (u, fallback) = self.residual(m, stream);
        CoupledDraw { u, v, residual_built: true, fallback }
    }

    /// Exact draw from the jump law at `m >= 2`.
    #[inline]
    pub fn jump(&self, m: u64, stream: &mut RandomStream) -> u64 {
        self.pair(m, stream).u
    }

    fn residual(&self, m: u64, stream: &mut RandomStream) -> (u64, bool) {
        let law = jump_law(m, &self.params).expect("m >= 2");
        let km = law.crossover();
        let vl = self.v.law();
        let weights: Vec<f64> =
            (1..km).map(|j| (law.ratio_minus_one(j) * vl.pmf(j)).max(0.0)).collect();
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return (JumpInversion::from_law(&law).sample(stream), true);
        }
        let mut target = stream.uniform() * total;
        for (i, w) in weights.iter().enumerate() {
            if target < *w {
                return (i as u64 + 1, false);
            }
            target -= w;
        }
        // Rounding left a sliver of mass past the last weight.
        (weights.len() as u64, false)
    }
}

/// One draw of V. Builds the inversion table on every call; hot loops should
/// hold a [`VSampler`].
pub fn sample_v(stream: &mut RandomStream, params: &AlphaParams) -> u64 {
    VSampler::for_params(params).sample(stream)
}

/// One exact draw from the jump law at `m`. Hot loops should hold a
/// [`JumpSampler`].
pub fn sample_jump(m: u64, stream: &mut RandomStream, params: &AlphaParams) -> Result<u64> {
    Ok(sample_uv_pair(m, stream, params)?.0)
}

/// One coupled draw `(U, V)` at `m`.
pub fn sample_uv_pair(m: u64, stream: &mut RandomStream, params: &AlphaParams) -> Result<(u64, u64)> {
    if m < 2 {
        return Err(domain(format!("block count m must be >= 2, got {m}")));
    }
    let d = JumpSampler::new(params).pair(m, stream);
    Ok((d.u, d.v))
}

/// Direct inverse-CDF sampler of the jump law at one fixed `m`. Building it
/// costs O(m).
#[derive(Debug, Clone)]
pub struct JumpInversion {
    cdf: Vec<f64>,
}

impl JumpInversion {
    pub fn new(m: u64, params: &AlphaParams) -> Result<Self> {
        Ok(Self::from_law(&jump_law(m, params)?))
    }

    fn from_law(law: &JumpLaw) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = law
            .pmf_table()
            .into_iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let total = acc;
        for c in &mut cdf {
            *c /= total;
        }
        JumpInversion { cdf }
    }

    pub fn sample(&self, stream: &mut RandomStream) -> u64 {
        let u = stream.uniform();
        let idx = self.cdf.partition_point(|&c| c < u);
        (idx.min(self.cdf.len() - 1)) as u64 + 1
    }
}

/// Standard exponential by inversion.
#[inline]
pub fn exp1(stream: &mut RandomStream) -> f64 {
    -stream.uniform().ln()
}

/// Exponential with the given rate (mean `1 / rate`), by inversion.
pub fn sample_exponential(rate: f64, stream: &mut RandomStream) -> Result<f64> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(domain(format!("exponential rate must be positive and finite, got {rate}")));
    }
    Ok(exp1(stream) / rate)
}

/// Means below this are sampled by sequential inversion.
const POISSON_INVERSION_MAX: f64 = 30.0;

/// Exact Poisson draw: sequential inversion for small means, Hörmann's
/// transformed rejection (PTRS) otherwise.
pub fn sample_poisson(mean: f64, stream: &mut RandomStream) -> Result<u64> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(domain(format!("Poisson mean must be finite and >= 0, got {mean}")));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    if mean < POISSON_INVERSION_MAX {
        return Ok(poisson_inversion(mean, stream));
    }
    Ok(poisson_ptrs(mean, stream))
}

fn poisson_inversion(mean: f64, stream: &mut RandomStream) -> u64 {
    let u = stream.uniform();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= mean / k as f64;
        let next = cdf + p;
        if next == cdf {
            // Floating-point exhaustion deep in the tail.
            break;
        }
        cdf = next;
    }
    k
}

fn poisson_ptrs(mean: f64, stream: &mut RandomStream) -> u64 {
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = stream.uniform() - 0.5;
        let v = stream.uniform();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -mean + k * loglam - ln_gamma(k + 1.0);
        if lhs <= rhs {
            return k as u64;
        }
    }
}

/// Chambers–Mallows–Stuck sampler of the maximally skewed stable law with
/// index alpha, skewness -1, location 0 and the scale fixed in
/// [`AlphaParams::sigma_alpha`], so that `P(ς < -x) ~ x^(-alpha)`.
#[derive(Debug, Clone, Copy)]
pub struct StableSampler {
    alpha: f64,
    shift: f64,
    scale: f64,
}

impl StableSampler {
    pub fn new(params: &AlphaParams) -> Self {
        let a = params.alpha();
        // With beta = -1: arctan(-tan(pi a / 2)) = pi (2 - a) / 2.
        let shift = PI * (2.0 - a) / (2.0 * a);
        let s = (1.0 / (PI * a / 2.0).cos().abs()).powf(1.0 / a);
        StableSampler { alpha: a, shift, scale: s * params.sigma() }
    }

    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        let a = self.alpha;
        let v = PI * (stream.uniform() - 0.5);
        let w = exp1(stream);
        let t = a * (v + self.shift);
        let x = t.sin() / v.cos().powf(1.0 / a) * ((v - t).cos() / w).powf((1.0 - a) / a);
        self.scale * x
    }
}

pub fn sample_stable(stream: &mut RandomStream, params: &AlphaParams) -> f64 {
    StableSampler::new(params).sample(stream)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64) -> AlphaParams {
        AlphaParams::new(a).unwrap()
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = RandomStream::new(42, 7);
        let mut b = RandomStream::new(42, 7);
        let mut c = RandomStream::new(42, 8);
        let mut d = RandomStream::new(43, 7);
        let xa: Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        let xc: Vec<u64> = (0..16).map(|_| c.next_u64()).collect();
        let xd: Vec<u64> = (0..16).map(|_| d.next_u64()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
        assert_ne!(xa, xd);
    }

    #[test]
    fn stream_output_is_pinned() {
        // Guards the cross-platform reproducibility contract.
        let mut s = RandomStream::new(1, 0);
        let first = s.next_u64();
        let mut t = RandomStream::new(1, 0);
        assert_eq!(first, t.next_u64());
        let u = RandomStream::new(0xC0A1_E5CE, 3).uniform();
        assert!(u > 0.0 && u < 1.0);
    }

    #[test]
    fn uniform_is_open_interval() {
        let mut s = RandomStream::new(5, 5);
        for _ in 0..100_000 {
            let u = s.uniform();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn inversion_matches_tail_boundaries() {
        let p = params(1.5);
        let vs = VSampler::for_params(&p);
        let law = v_law(&p);
        for k in [1u64, 2, 3, 10, 100, 4000, 4097, 5000, 100_000, 10_000_000] {
            // Just inside each atom's interval [tail(k+1), tail(k)).
            let hi = law.tail(k);
            let lo = law.tail(k + 1);
            assert_eq!(vs.invert(lo), k, "k={k} at lower edge");
            let mid = lo + 0.5 * (hi - lo);
            assert_eq!(vs.invert(mid), k, "k={k} mid");
        }
    }

    #[test]
    fn v_sampler_first_moments() {
        let p = params(1.5);
        let vs = VSampler::for_params(&p);
        let mut s = RandomStream::new(11, 0);
        let n = 1_000_000;
        let mut ones = 0u64;
        let mut ge100 = 0u64;
        let mut draws: Vec<f64> = Vec::with_capacity(n);
        for _ in 0..n {
            let v = vs.sample(&mut s);
            ones += (v == 1) as u64;
            ge100 += (v >= 100) as u64;
            draws.push(v as f64);
        }
        let f1 = ones as f64 / n as f64;
        assert!((0.7485..=0.7515).contains(&f1), "{f1}");
        // Infinite variance: the median of 20 batch means is the stable summary.
        let mean = crate::stats::median_of_batches(&draws, 20);
        assert!((1.90..=2.10).contains(&mean), "{mean}");
        let scaled = ge100 as f64 / n as f64 * 100f64.powf(1.5);
        let lead = 1.0 / std::f64::consts::PI.sqrt();
        assert!(scaled >= 0.8 * lead && scaled <= 1.2 * lead, "{scaled}");
    }

    #[test]
    fn jump_sampler_small_m() {
        let p = params(1.5);
        let js = JumpSampler::new(&p);
        let mut s = RandomStream::new(3, 1);
        for _ in 0..1000 {
            assert_eq!(js.jump(2, &mut s), 1);
        }
        let n = 1_000_000;
        let ones = (0..n).filter(|_| js.jump(3, &mut s) == 1).count();
        let f = ones as f64 / n as f64;
        assert!((0.897..=0.903).contains(&f), "{f}");
    }

    #[test]
    fn coupled_pairs_are_ordered() {
        let p = params(1.3);
        let js = JumpSampler::new(&p);
        let mut s = RandomStream::new(9, 0);
        for m in [2u64, 3, 5, 20, 1000] {
            for _ in 0..20_000 {
                let d = js.pair(m, &mut s);
                assert!(d.u <= d.v && d.u >= 1 && d.u < m);
                if m == 2 {
                    assert_eq!(d.u, 1);
                    assert_eq!(d.u == d.v, d.v == 1);
                }
            }
        }
    }

    #[test]
    fn jump_sampler_matches_exact_pmf() {
        let p = params(1.5);
        let js = JumpSampler::new(&p);
        let law = jump_law(50, &p).unwrap();
        let mut s = RandomStream::new(17, 2);
        let n = 400_000;
        let mut counts = vec![0u64; 50];
        for _ in 0..n {
            counts[js.jump(50, &mut s) as usize] += 1;
        }
        // Chi-square over the cells with expected count >= 20, rest pooled.
        let mut chi2 = 0.0;
        let mut cells = 0;
        let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
        for k in 1..50u64 {
            let e = law.pmf(k) * n as f64;
            let o = counts[k as usize] as f64;
            if e >= 20.0 {
                chi2 += (o - e).powi(2) / e;
                cells += 1;
            } else {
                pooled_obs += o;
                pooled_exp += e;
            }
        }
        chi2 += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
        // 99.9% quantile of chi-square with <= 49 dof is below 86.
        assert!(chi2 < 86.0, "chi2={chi2} over {cells} cells");
    }

    #[test]
    fn residual_builds_are_rare() {
        let p = params(1.5);
        let js = JumpSampler::new(&p);
        let mut s = RandomStream::new(21, 0);
        let m = 200u64;
        let n = 1_000_000;
        let builds = (0..n).filter(|_| js.pair(m, &mut s).residual_built).count();
        let per_call = builds as f64 / n as f64;
        assert!(per_call <= 2.0 / ((p.alpha() - 1.0) * m as f64), "{per_call}");
    }

    #[test]
    fn exponential_moments_and_scaling() {
        let mut s = RandomStream::new(1, 1);
        let n = 1_000_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_exponential(1.0, &mut s).unwrap()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        assert!((0.997..=1.003).contains(&mean), "{mean}");
        let tail = draws.iter().filter(|&&x| x > 3.0).count() as f64 / n as f64;
        let e3 = (-3.0f64).exp();
        assert!(tail >= 0.94 * e3 && tail <= 1.06 * e3);

        let mut a = RandomStream::new(8, 8);
        let mut b = RandomStream::new(8, 8);
        for _ in 0..100 {
            let x1 = sample_exponential(1.0, &mut a).unwrap();
            let x2 = sample_exponential(2.0, &mut b).unwrap();
            assert_eq!(x2, x1 / 2.0);
        }
        assert!(sample_exponential(0.0, &mut a).is_err());
        assert!(sample_exponential(-1.0, &mut a).is_err());
    }

    #[test]
    fn poisson_moments() {
        let mut s = RandomStream::new(4, 4);
        assert_eq!(sample_poisson(0.0, &mut s).unwrap(), 0);
        assert!(sample_poisson(-1.0, &mut s).is_err());
        assert!(sample_poisson(f64::NAN, &mut s).is_err());
        assert!(sample_poisson(f64::INFINITY, &mut s).is_err());

        let n = 1_000_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_poisson(100.0, &mut s).unwrap() as f64).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((99.7..=100.3).contains(&mean), "{mean}");
        assert!((97.0..=103.0).contains(&var), "{var}");

        let zeros = (0..n).filter(|_| sample_poisson(4.0, &mut s).unwrap() == 0).count();
        let f0 = zeros as f64 / n as f64;
        let e4 = (-4.0f64).exp();
        assert!(f0 >= 0.95 * e4 && f0 <= 1.05 * e4, "{f0}");
    }

    #[test]
    fn poisson_large_mean() {
        let mut s = RandomStream::new(6, 0);
        let mean = 2.5e6;
        let n = 20_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_poisson(mean, &mut s).unwrap() as f64).collect();
        let m = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((m - mean).abs() < 4.0 * (mean / n as f64).sqrt(), "{m}");
        assert!((var / mean - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn poisson_pmf_near_switch_point() {
        // Frequencies at mean 30 (rejection branch) against the exact pmf.
        let mut s = RandomStream::new(10, 3);
        let n = 500_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..n {
            *counts.entry(sample_poisson(30.0, &mut s).unwrap()).or_insert(0u64) += 1;
        }
        for k in [20u64, 25, 30, 35, 40] {
            let p = (-30.0 + k as f64 * 30f64.ln() - ln_gamma(k as f64 + 1.0)).exp();
            let f = *counts.get(&k).unwrap_or(&0) as f64 / n as f64;
            let sd = (p * (1.0 - p) / n as f64).sqrt();
            assert!((f - p).abs() < 5.0 * sd, "k={k}: {f} vs {p}");
        }
    }

    #[test]
    fn stable_tails_and_location() {
        let p = params(1.5);
        let st = StableSampler::new(&p);
        let mut s = RandomStream::new(12, 0);
        let n = 1_000_000;
        let draws: Vec<f64> = (0..n).map(|_| st.sample(&mut s)).collect();
        let loc = crate::stats::median_of_batches(&draws, 20);
        assert!((-0.1..=0.1).contains(&loc), "{loc}");
        let left = draws.iter().filter(|&&x| x < -10.0).count() as f64 / n as f64;
        let scaled = left * 10f64.powf(1.5);
        assert!((0.8..=1.2).contains(&scaled), "{scaled}");
        let right = draws.iter().filter(|&&x| x > 10.0).count() as f64 / n as f64;
        assert!(right < 0.5 * 10f64.powf(-1.5));
    }

    #[test]
    fn samplers_reproduce_bit_for_bit() {
        let p = params(1.7);
        let js = JumpSampler::new(&p);
        let st = StableSampler::new(&p);
        let run = || {
            let mut s = RandomStream::new(99, 3);
            let mut out = Vec::new();
            for m in 2..200u64 {
                out.push(js.jump(m, &mut s) as f64);
                out.push(st.sample(&mut s));
                out.push(sample_poisson(m as f64 * 0.7, &mut s).unwrap() as f64);
                out.push(s.normal());
            }
            out.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
