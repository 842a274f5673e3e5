//! Renewal process, dyadic block coupling and the coupling diagnostics.

use crate::coalescent::{ChainSimulator, DEFAULT_START_FACTOR};
use crate::error::{domain, Error, Result};
use crate::numerics::AlphaParams;
use crate::rates::{jump_law, v_law, DiscreteLaw};
use crate::sampling::{DelaySampler, JumpSampler, RandomStream, VSampler};
use crate::stats::report::json_f64;

/// Points `2 <= R_1 < R_2 < ... <= n` of the stationary renewal process
/// with V-distributed gaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenewalProcess {
    points: Vec<u64>,
    window_end: u64,
}

impl RenewalProcess {
    pub fn points(&self) -> &[u64] {
        &self.points
    }

    pub fn window_end(&self) -> u64 {
        self.window_end
    }

    /// Largest point `<= b`, or 1 if there is none.
    pub fn max_at_most(&self, b: u64) -> u64 {
        let i = self.points.partition_point(|&x| x <= b);
        if i == 0 { 1 } else { self.points[i - 1] }
    }

    /// `(R_1 - 1, n + 1 - R_last)`: the gaps from each end of `[2, n]` to the
    /// nearest point, measured from the virtual points 1 and n + 1. By
    /// reversibility both have the same law. `None` if there are no points.
    pub fn boundary_gaps(&self) -> Option<(u64, u64)> {
        let first = *self.points.first()?;
        let last = *self.points.last()?;
        Some((first - 1, self.window_end + 1 - last))
    }
}

/// Sampler of the stationary renewal process: delay `R_1 - 1` with
/// `P(R_1 = r) = P(V >= r - 1) / E(V)`, then i.i.d. V gaps.
#[derive(Debug, Clone)]
pub struct RenewalSampler {
    delay: DelaySampler,
    gaps: VSampler,
}

impl RenewalSampler {
    pub fn new(params: &AlphaParams) -> Self {
        RenewalSampler {
            delay: DelaySampler::for_params(params),
            gaps: VSampler::for_params(params),
        }
    }

    pub fn sample(&self, n: u64, stream: &mut RandomStream) -> Result<RenewalProcess> {
        if n < 2 {
            return Err(domain(format!("renewal window end must be >= 2, got {n}")));
        }
        let mut points = Vec::new();
        let mut x = 1 + self.delay.sample(stream);
        while x <= n {
            points.push(x);
            x += self.gaps.sample(stream);
        }
        Ok(RenewalProcess { points, window_end: n })
    }
}

pub fn stationary_renewal(n: u64, stream: &mut RandomStream, params: &AlphaParams) -> Result<RenewalProcess> {
    RenewalSampler::new(params).sample(n, stream)
}

/// How the two chains of a block draw their jumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingMode {
    /// `(U_i, V_i)` from the joint construction at `m = X_{i-1}`.
    Coupled,
    /// `U_i` and `V_i` drawn independently with the same marginals.
    Independent,
}

/// Outcome of one dyadic block `(2^(r-1), 2^r]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCouplingResult {
    pub r: u32,
    /// `X_0, ..., X_{N-1}`, decreasing.
    pub mu_atoms: Vec<u64>,
    /// `Y_0, ..., Y_{N'-1}`, decreasing.
    pub nu_atoms: Vec<u64>,
    /// `(X_N, Y_{N'} ∨ 1)`.
    pub end_states: (u64, u64),
    /// `max_{i <= N ∧ N'} |X_i - Y_i|`.
    pub d_r: u64,
    /// `(N, N')`.
    pub n_steps: (u64, u64),
}

impl BlockCouplingResult {
    /// `|N - N'| <= D_r`.
    pub fn step_gap_bounded(&self) -> bool {
        self.n_steps.0.abs_diff(self.n_steps.1) <= self.d_r
    }
}

/// Holds the samplers needed for repeated block runs.
#[derive(Debug, Clone)]
pub struct BlockCoupler {
    jumps: JumpSampler,
}

impl BlockCoupler {
    pub fn new(params: &AlphaParams) -> Self {
        BlockCoupler { jumps: JumpSampler::new(params) }
    }

    /// Runs `X_i = M - U_1 - ... - U_i` and `Y_i = M' - V_1 - ... - V_i` until
    /// both have entered `[.., 2^(r-1)]`. Once one chain has stopped, the
    /// other keeps drawing from its own marginal.
    pub fn run(
        &self,
        r: u32,
        m_start: u64,
        m_prime_start: u64,
        mode: CouplingMode,
        stream: &mut RandomStream,
    ) -> Result<BlockCouplingResult> {
        if !(1..=62).contains(&r) {
            return Err(domain(format!("dyadic level r must lie in [1, 62], got {r}")));
        }
        let top = 1u64 << r;
        let half = top / 2;
        if m_start < 1 || m_prime_start < 1 || m_start > top || m_prime_start > top {
            return Err(domain(format!(
                "block starts must lie in [1, {top}], got ({m_start}, {m_prime_start})"
            )));
        }
        let vs = self.jumps.v_sampler();
        let (mut x, mut y) = (m_start as i64, m_prime_start as i64);
        let half_i = half as i64;
        let mut mu_atoms = Vec::new();
        let mut nu_atoms = Vec::new();
        let mut d_r = x.abs_diff(y);
        let (mut x_done, mut y_done) = (x <= half_i, y <= half_i);
        while !(x_done && y_done) {
            let (u, v) = if !x_done {
                let m = x as u64;
                match mode {
                    CouplingMode::Coupled => {
                        let d = self.jumps.pair(m, stream);
                        (d.u, d.v)
                    }
                    CouplingMode::Independent => {
                        let u = self.jumps.jump(m, stream);
                        (u, vs.sample(stream))
                    }
                }
            } else {
                (0, vs.sample(stream))
            };
            if !x_done {
                mu_atoms.push(x as u64);
                x -= u as i64;
                x_done = x <= half_i;
            }
            if !y_done {
                nu_atoms.push(y as u64);
                y -= v as i64;
                y_done = y <= half_i;
            }
            // The maximum runs over i <= N ∧ N', so it includes the first
            // index at which either chain stops.
            if mu_atoms.len() == nu_atoms.len() {
                d_r = d_r.max(x.abs_diff(y));
            }
        }
        Ok(BlockCouplingResult {
            r,
            end_states: (x as u64, y.max(1) as u64),
            n_steps: (mu_atoms.len() as u64, nu_atoms.len() as u64),
            mu_atoms,
            nu_atoms,
            d_r,
        })
    }
}

pub fn big_coupling_block(
    r: u32,
    m_start: u64,
    m_prime_start: u64,
    stream: &mut RandomStream,
    params: &AlphaParams,
) -> Result<BlockCouplingResult> {
    BlockCoupler::new(params).run(r, m_start, m_prime_start, CouplingMode::Coupled, stream)
}

/// Largest CPP(∞) atom `<= b`, approximated from a chain started at
/// `start_n`; 1 if the window is empty.
pub fn window_max_mu(sim: &ChainSimulator, b: u64, start_n: u64, stream: &mut RandomStream) -> Result<u64> {
    Ok(sim.cpp_window(2, b, start_n, stream)?.max_atom().unwrap_or(1))
}

/// Largest point `<= b` of the stationary renewal process; 1 if none.
pub fn window_max_nu(renewal: &RenewalSampler, b: u64, stream: &mut RandomStream) -> Result<u64> {
    Ok(renewal.sample(b, stream)?.max_at_most(b))
}

/// Empirical draws of `(M, M')`, the largest atoms `<= b` of CPP(∞) and of
/// the renewal process. CPP(∞) uses the default start `100 b`.
pub fn window_max_laws(
    b: u64,
    trials: usize,
    stream: &mut RandomStream,
    params: &AlphaParams,
) -> Result<(Vec<u64>, Vec<u64>)> {
    if b < 2 {
        return Err(domain(format!("window end b must be >= 2, got {b}")));
    }
    let sim = ChainSimulator::new(params);
    let renewal = RenewalSampler::new(params);
    let start_n = DEFAULT_START_FACTOR * b;
    let mut mu = Vec::with_capacity(trials);
    let mut nu = Vec::with_capacity(trials);
    for _ in 0..trials {
        mu.push(window_max_mu(&sim, b, start_n, stream)?);
        nu.push(window_max_nu(&renewal, b, stream)?);
    }
    Ok((mu, nu))
}

/// Fewest trials accepted by [`mismatch_rate`].
pub const MIN_MISMATCH_TRIALS: usize = 1000;

/// Empirical `P(U != V)` with a 3-sigma binomial half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MismatchEstimate {
    pub m: u64,
    pub trials: usize,
    pub rate: f64,
    pub ci_halfwidth: f64,
    /// `1 / ((alpha - 1) m)`.
    pub bound: f64,
    /// `sum_k (P(V = k) - P_{m, m-k})^+`.
    pub exact: f64,
}

impl MismatchEstimate {
    pub fn within_bound(&self) -> bool {
        self.rate <= self.bound + self.ci_halfwidth
    }
}

pub fn mismatch_rate(m: u64, trials: usize, stream: &mut RandomStream, params: &AlphaParams) -> Result<MismatchEstimate> {
    if trials < MIN_MISMATCH_TRIALS {
        return Err(domain(format!("need at least {MIN_MISMATCH_TRIALS} trials, got {trials}")));
    }
    let law = jump_law(m, params)?;
    let js = JumpSampler::new(params);
    let hits = (0..trials).filter(|_| {
        let d = js.pair(m, stream);
        d.u != d.v
    });
    let rate = hits.count() as f64 / trials as f64;
    Ok(MismatchEstimate {
        m,
        trials,
        rate,
        ci_halfwidth: 3.0 * (rate * (1.0 - rate) / trials as f64).sqrt(),
        bound: 1.0 / ((params.alpha() - 1.0) * m as f64),
        exact: law.mismatch_probability(),
    })
}

/// Fewest mismatches for a usable conditional tail.
pub const MIN_MISMATCHES: usize = 100;

/// Grid on which conditional tails are reported.
pub const TAIL_GRID: [u64; 9] = [1, 2, 4, 8, 16, 32, 64, 128, 256];

/// Empirical `P(V >= k | U != V)` on [`TAIL_GRID`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTail {
    pub m: u64,
    pub mismatches: usize,
    pub ks: Vec<u64>,
    pub tail: Vec<f64>,
    /// Least-squares slope of `ln tail` against `ln k` over `k in [4, 256]`.
    pub fitted_exponent: f64,
    /// `max_k tail(k) k^(alpha - 1)`: the smallest `c` with
    /// `tail(k) <= c k^(1 - alpha)` on the grid.
    pub fitted_constant: f64,
}

pub fn conditional_tail_given_mismatch(
    m: u64,
    trials: usize,
    stream: &mut RandomStream,
    params: &AlphaParams,
) -> Result<ConditionalTail> {
    if m < 2 {
        return Err(domain(format!("block count m must be >= 2, got {m}")));
    }
    let js = JumpSampler::new(params);
    let mut vs = Vec::new();
    for _ in 0..trials {
        let d = js.pair(m, stream);
        if d.u != d.v {
            vs.push(d.v);
        }
    }
    if vs.len() < MIN_MISMATCHES {
        return Err(Error::InsufficientData(format!(
            "{} mismatches, need {MIN_MISMATCHES}",
            vs.len()
        )));
    }
    let n = vs.len() as f64;
    let tail: Vec<f64> =
        TAIL_GRID.iter().map(|&k| vs.iter().filter(|&&v| v >= k).count() as f64 / n).collect();
    Ok(summarize_tail(m, vs.len(), tail, params))
}

/// The same curve computed from the coupling weights, without sampling.
pub fn exact_conditional_tail(m: u64, params: &AlphaParams) -> Result<ConditionalTail> {
    let law = jump_law(m, params)?;
    let v = v_law(params);
    let total = law.mismatch_probability_by_tail();
    // Mass of {V = j, U != V} for j < m; every V >= m is a mismatch.
    let excess = |j: u64| ((1.0 - law.ratio(j)).max(0.0)) * v.pmf(j);
    let tail = TAIL_GRID
        .iter()
        .map(|&k| {
            let below: f64 = (k..m).map(excess).sum();
            (below + v.tail(k.max(m))) / total
        })
        .collect();
    Ok(summarize_tail(m, 0, tail, params))
}

fn summarize_tail(m: u64, mismatches: usize, tail: Vec<f64>, params: &AlphaParams) -> ConditionalTail {
    let am1 = params.alpha() - 1.0;
    let fit: Vec<(f64, f64)> = TAIL_GRID
        .iter()
        .zip(&tail)
        .filter(|(&k, &t)| k >= 4 && t > 0.0)
        .map(|(&k, &t)| ((k as f64).ln(), t.ln()))
        .collect();
    let fitted_exponent = slope(&fit);
    let fitted_constant = TAIL_GRID
        .iter()
        .zip(&tail)
        .map(|(&k, &t)| t * (k as f64).powf(am1))
        .fold(0.0, f64::max);
    ConditionalTail { m, mismatches, ks: TAIL_GRID.to_vec(), tail, fitted_exponent, fitted_constant }
}

/// Ordinary least-squares slope; NaN with fewer than two points.
pub(crate) fn slope(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 {
        return f64::NAN;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Level at which a coupling diagnostic was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticLevel {
    M(u64),
    R(u32),
}

/// A bound check against an empirical value, serializable as JSON.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingDiagnostic {
    pub alpha: f64,
    pub level: DiagnosticLevel,
    pub trials: usize,
    pub bound: f64,
    pub empirical: f64,
    pub ci: f64,
    pub pass: bool,
}

impl CouplingDiagnostic {
    pub fn from_mismatch(params: &AlphaParams, e: &MismatchEstimate) -> Self {
        CouplingDiagnostic {
            alpha: params.alpha(),
            level: DiagnosticLevel::M(e.m),
            trials: e.trials,
            bound: e.bound,
            empirical: e.rate,
            ci: e.ci_halfwidth,
            pass: e.within_bound(),
        }
    }

    pub fn to_json(&self) -> String {
        let level = match self.level {
            DiagnosticLevel::M(m) => format!("\"m\":{m}"),
            DiagnosticLevel::R(r) => format!("\"r\":{r}"),
        };
        format!(
            "{{\"alpha\":{},{level},\"trials\":{},\"bound\":{},\"empirical\":{},\"ci\":{},\"pass\":{}}}",
            json_f64(self.alpha),
            self.trials,
            json_f64(self.bound),
            json_f64(self.empirical),
            json_f64(self.ci),
            self.pass
        )
    }
}
