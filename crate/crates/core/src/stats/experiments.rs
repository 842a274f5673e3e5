//! Registry of verification experiments.
//!
//! Every experiment derives its random streams from `(seed, experiment id,
//! purpose, replicate index)` alone, and replicate results are collected in
//! index order, so a report does not depend on the thread count.

use std::time::Instant;

use rayon::prelude::*;
use rayon::ThreadPoolBuilder;

use crate::coalescent::{cpp_of_path, length_functional, segregating_sites, tree_length, ChainSimulator};
use crate::coupling_lab::{
    window_max_mu, window_max_nu, BlockCoupler, CouplingMode, RenewalSampler,
};
use crate::error::{Error, Result};
use crate::limits::{
    classify_regime, lemma52_reference, normalize_length, normalize_sites, reference_sample,
    Lemma52Harness, LimitKind,
};
use crate::numerics::{stable_cf_exponent, AlphaParams, AlphaSpec};
use crate::rates::{dominance_check, jump_law, total_rate, total_rate_by_sum};
use crate::sampling::{splitmix64, JumpInversion, JumpSampler, RandomStream, StableSampler};
use crate::stats::report::ExperimentReport;
use crate::stats::{ks_two_sample, median_of_batches};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0xC0A1_E5CE;

/// Registered experiment ids, in suite order.
pub const EXPERIMENT_IDS: [&str; 15] = [
    "rho2-exact",
    "jump-normalization",
    "rate-asymptotics",
    "dominance",
    "mismatch-bound",
    "coupled-sampler-ks",
    "stable-sampler",
    "lemma52-ks",
    "thm1-lln",
    "thm1-case1-ks",
    "thm1-case3-stability",
    "corollary-case3-ks",
    "length-reordering",
    "big-coupling",
    "cpp-infinity-uniqueness",
];

pub fn experiment_ids() -> &'static [&'static str] {
    &EXPERIMENT_IDS
}

/// Parameters of a run. `alpha`, `n` and `replicates` override an
/// experiment's defaults where the experiment has a single such parameter;
/// grid experiments ignore them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    pub threads: usize,
    pub alpha: Option<AlphaSpec>,
    pub n: Option<u64>,
    pub replicates: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: DEFAULT_SEED, threads: 1, alpha: None, n: None, replicates: None }
    }
}

impl RunOptions {
    pub fn with_seed(seed: u64) -> Self {
        RunOptions { seed, ..Default::default() }
    }
}

/// Runs one registered experiment.
pub fn run_experiment(id: &str, opts: &RunOptions) -> Result<ExperimentReport> {
    if opts.threads == 0 {
        return Err(Error::InvalidParameter("threads must be >= 1".into()));
    }
    if opts.n == Some(0) || opts.replicates == Some(0) {
        return Err(Error::InvalidParameter("n and replicates must be >= 1".into()));
    }
    let id = EXPERIMENT_IDS
        .iter()
        .find(|&&e| e == id)
        .ok_or_else(|| Error::UnknownExperiment(id.to_string()))?;
    let ctx = Ctx::new(id, opts)?;
    let start = Instant::now();
    let mut report = match *id {
        "rho2-exact" => rho2_exact(&ctx),
        "jump-normalization" => jump_normalization(&ctx),
        "rate-asymptotics" => rate_asymptotics(&ctx),
        "dominance" => dominance(&ctx),
        "mismatch-bound" => mismatch_bound(&ctx),
        "coupled-sampler-ks" => coupled_sampler_ks(&ctx),
        "stable-sampler" => stable_sampler(&ctx),
        "lemma52-ks" => lemma52_ks(&ctx),
        "thm1-lln" => thm1_lln(&ctx),
        "thm1-case1-ks" => thm1_case1_ks(&ctx),
        "thm1-case3-stability" => thm1_case3_stability(&ctx),
        "corollary-case3-ks" => corollary_case3_ks(&ctx),
        "length-reordering" => length_reordering(&ctx),
        "big-coupling" => big_coupling(&ctx),
        "cpp-infinity-uniqueness" => cpp_infinity_uniqueness(&ctx),
        _ => unreachable!(),
    }?;
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Runs every registered experiment in suite order.
pub fn run_all(opts: &RunOptions) -> Result<Vec<ExperimentReport>> {
    EXPERIMENT_IDS.iter().map(|id| run_experiment(id, opts)).collect()
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

struct Ctx {
    id: &'static str,
    seed: u64,
    salt: u64,
    opts: RunOptions,
    pool: Option<rayon::ThreadPool>,
}

impl Ctx {
    fn new(id: &'static str, opts: &RunOptions) -> Result<Self> {
        let pool = if opts.threads > 1 {
            Some(
                ThreadPoolBuilder::new()
                    .num_threads(opts.threads)
                    .build()
                    .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?,
            )
        } else {
            None
        };
        Ok(Ctx { id, seed: opts.seed, salt: splitmix64(fnv1a(id)), opts: *opts, pool })
    }

    /// Stream for replicate `index` of a given purpose. Purposes are spaced
    /// 2^40 apart in stream-id space.
    fn stream(&self, purpose: u64, index: u64) -> RandomStream {
        RandomStream::new(self.seed, self.salt.wrapping_add(purpose << 40).wrapping_add(index))
    }

    /// `f(stream, i)` for `i in 0..count`, in index order.
    fn map<T, F>(&self, purpose: u64, count: u64, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&mut RandomStream, u64) -> Result<T> + Sync + Send,
    {
        let g = |i: u64| f(&mut self.stream(purpose, i), i);
        match &self.pool {
            None => (0..count).map(g).collect(),
            Some(pool) => pool.install(|| (0..count).into_par_iter().map(g).collect()),
        }
    }

    fn params(&self, default: f64) -> Result<AlphaParams> {
        AlphaParams::new(self.opts.alpha.unwrap_or(AlphaSpec::Value(default)))
    }

    fn n(&self, default: u64) -> u64 {
        self.opts.n.unwrap_or(default)
    }

    fn reps(&self, default: u64) -> u64 {
        self.opts.replicates.unwrap_or(default)
    }

    fn report(&self, alpha: f64, n: u64, reps: u64) -> ExperimentReport {
        ExperimentReport::new(self.id, alpha, self.seed, n, reps)
    }
}

fn alpha_grid() -> Vec<f64> {
    (0..19).map(|i| (105 + 5 * i) as f64 / 100.0).collect()
}

/// Two-sample KS at significance 0.01 critical value, recorded with the
/// threshold actually applied.
fn record_ks(r: &mut ExperimentReport, name: &str, a: &[f64], b: &[f64], threshold: f64) -> Result<f64> {
    let ks = ks_two_sample(a, b)?;
    r.stat(format!("{name}_critical_01"), ks.critical_01);
    r.at_most(name, &format!("{name}_distance"), ks.statistic, threshold);
    Ok(ks.statistic)
}

fn rho2_exact(ctx: &Ctx) -> Result<ExperimentReport> {
    let mut r = ctx.report(f64::NAN, 2, 0);
    let mut worst: f64 = 0.0;
    for a in alpha_grid() {
        let p = AlphaParams::new(a)?;
        worst = worst.max((total_rate(2, &p)? - 1.0).abs());
        worst = worst.max((total_rate_by_sum(2, &p)? - 1.0).abs());
    }
    r.at_most("rho2", "max_abs_error", worst, 1e-12);
    Ok(r)
}

fn jump_normalization(ctx: &Ctx) -> Result<ExperimentReport> {
    let mut r = ctx.report(f64::NAN, 10_000, 0);
    let mut worst: f64 = 0.0;
    for a in alpha_grid() {
        let p = AlphaParams::new(a)?;
        for m in [2u64, 10, 100, 1_000, 10_000] {
            let mut pmf = jump_law(m, &p)?.pmf_table();
            pmf.sort_by(f64::total_cmp);
            worst = worst.max((pmf.iter().sum::<f64>() - 1.0).abs());
        }
    }
    r.at_most("normalization", "max_abs_error", worst, 1e-10);
    Ok(r)
}

fn rate_asymptotics(ctx: &Ctx) -> Result<ExperimentReport> {
    let m = 10_000u64;
    let mut r = ctx.report(f64::NAN, m, 0);
    for a in [1.2, 1.5, 1.8] {
        let p = AlphaParams::new(a)?;
        let lead = (m as f64).powf(a) / (a * p.ln_gamma_alpha().exp());
        let closed = total_rate(m, &p)? / lead;
        let summed = total_rate_by_sum(m, &p)? / lead;
        r.within(&format!("alpha={a}"), &format!("ratio_alpha_{a}"), closed, 0.999, 1.001);
        r.at_most(
            &format!("alpha={a}/routes"),
            &format!("route_gap_alpha_{a}"),
            (closed - summed).abs(),
            1e-9,
        );
    }
    Ok(r)
}

fn dominance(ctx: &Ctx) -> Result<ExperimentReport> {
    let mut r = ctx.report(f64::NAN, 200, 0);
    for a in [1.1, 1.5, 1.9] {
        let p = AlphaParams::new(a)?;
        let mut failures = 0u64;
        for m in 2..=200u64 {
            failures += !dominance_check(m, &p)? as u64;
        }
        r.at_most(&format!("alpha={a}"), &format!("failing_m_alpha_{a}"), failures as f64, 0.0);
    }
    Ok(r)
}

/// Log-spaced integers in `[lo, hi]`, deduplicated.
fn log_grid(lo: u64, hi: u64, points: usize) -> Vec<u64> {
    let (l, h) = ((lo as f64).ln(), (hi as f64).ln());
    let mut g: Vec<u64> = (0..points)
        .map(|i| (l + (h - l) * i as f64 / (points - 1) as f64).exp().round() as u64)
        .collect();
    g.dedup();
    g
}

fn mismatch_bound(ctx: &Ctx) -> Result<ExperimentReport> {
    let mut r = ctx.report(f64::NAN, 10_000, 0);
    let grid = log_grid(2, 10_000, 60);
    for a in [1.1, 1.5, 1.9] {
        let p = AlphaParams::new(a)?;
        let mut worst_ratio: f64 = 0.0;
        let mut route_gap: f64 = 0.0;
        for &m in &grid {
            let law = jump_law(m, &p)?;
            let by_tail = law.mismatch_probability_by_tail();
            let short = law.mismatch_probability();
            worst_ratio = worst_ratio.max(by_tail * (a - 1.0) * m as f64);
            route_gap = route_gap.max((by_tail - short).abs());
        }
        r.at_most(&format!("alpha={a}"), &format!("max_mismatch_over_bound_alpha_{a}"), worst_ratio, 1.0);
        r.stat(format!("route_gap_alpha_{a}"), route_gap);
    }
    Ok(r)
}

/// Splits `total` draws into chunks with their own streams.
const CHUNK: u64 = 10_000;

fn coupled_sampler_ks(ctx: &Ctx) -> Result<ExperimentReport> {
    let p = ctx.params(1.5)?;
    let draws = ctx.reps(1_000_000);
    let mut r = ctx.report(p.alpha(), 1000, draws);
    let js = JumpSampler::new(&p);
    let chunks = draws.div_ceil(CHUNK);
    for (j, m) in [3u64, 50, 1000].into_iter().enumerate() {
        let inv = JumpInversion::new(m, &p)?;
        let size = |c: u64| CHUNK.min(draws - c * CHUNK);
        let coupled: Vec<f64> = ctx
            .map(2 * j as u64, chunks, |s, c| Ok((0..size(c)).map(|_| js.jump(m, s) as f64).collect::<Vec<_>>()))?
            .concat();
        let exact: Vec<f64> = ctx
            .map(2 * j as u64 + 1, chunks, |s, c| Ok((0..size(c)).map(|_| inv.sample(s) as f64).collect::<Vec<_>>()))?
            .concat();
        let ks = ks_two_sample(&coupled, &exact)?;
        r.at_most(&format!("m={m}"), &format!("ks_m_{m}"), ks.statistic, ks.critical_01);
    }
    Ok(r)
}

fn stable_sampler(ctx: &Ctx) -> Result<ExperimentReport> {
    let p = ctx.params(1.5)?;
    let a = p.alpha();
    let cf_draws = 100_000u64;
    let tail_draws = ctx.reps(1_000_000).max(cf_draws);
    let mut r = ctx.report(a, 0, tail_draws);
    let st = StableSampler::new(&p);
    let chunks = tail_draws.div_ceil(CHUNK);
    let xs: Vec<f64> = ctx
        .map(0, chunks, |s, c| {
            Ok((0..CHUNK.min(tail_draws - c * CHUNK)).map(|_| st.sample(s)).collect::<Vec<_>>())
        })?
        .concat();
    for u in [0.5, 1.0, 2.0] {
        let (mut re, mut im) = (0.0, 0.0);
        for x in &xs[..cf_draws as usize] {
            re += (u * x).cos();
            im += (u * x).sin();
        }
        let n = cf_draws as f64;
        let target = stable_cf_exponent(u, &p).exp();
        let err = ((re / n - target.re).powi(2) + (im / n - target.im).powi(2)).sqrt();
        r.at_most(&format!("cf u={u}"), &format!("cf_error_u_{u}"), err, 0.02);
    }
    let n = xs.len() as f64;
    let left = xs.iter().filter(|&&x| x < -10.0).count() as f64 / n;
    let right = xs.iter().filter(|&&x| x > 10.0).count() as f64 / n;
    r.within("left tail", "left_tail_scaled", left * 10f64.powf(a), 0.8, 1.2);
    r.at_most("right tail", "right_tail", right, 0.5 * 10f64.powf(-a));
    Ok(r)
}

fn lemma52_ks(ctx: &Ctx) -> Result<ExperimentReport> {
    let p = ctx.params(1.5)?;
    let n = ctx.n(10_000);
    let m = ctx.reps(2000);
    let mut r = ctx.report(p.alpha(), n, m);
    let h = Lemma52Harness::new(n, &p)?;
    let xs = ctx.map(0, m, |s, _| Ok(h.sample(s)))?;
    let reference = lemma52_reference(m as usize, &mut ctx.stream(1, 0), &p)?;
    record_ks(&mut r, "ks", &xs, &reference, 0.08)?;
    r.stat("median_of_batches", median_of_batches(&xs, 20));
    r.stat("reference_median_of_batches", median_of_batches(&reference, 20));
    r.raw = xs.iter().enumerate().map(|(i, &x)| (i as u64, "statistic".to_string(), x)).collect();
    Ok(r)
}

fn thm1_lln(ctx: &Ctx) -> Result<ExperimentReport> {
    let p = ctx.params(1.5)?;
    let n = ctx.n(100_000);
    let m = ctx.reps(200);
    let mut r = ctx.report(p.alpha(), n, m);
    let sim = ChainSimulator::new(&p);
    let lead = p.c1() * (n as f64).powf(2.0 - p.alpha());
    let ratios = ctx.map(0, m, |s, _| Ok(tree_length(&sim.path(n, s)?) / lead))?;
    r.stat("mean", crate::stats::mean(&ratios));
    r.within("lln", "median_of_batches", median_of_batches(&ratios, 20.min(ratios.len())), 0.95, 1.05);
    r.raw = ratios.iter().enumerate().map(|(i, &x)| (i as u64, "length_ratio".to_string(), x)).collect();
    Ok(r)
}

fn normalized_lengths(ctx: &Ctx, sim: &ChainSimulator, n: u64, m: u64, purpose: u64) -> Result<Vec<f64>> {
    let p = *sim.params();
    ctx.map(purpose, m, |s, _| normalize_length(tree_length(&sim.path(n, s)?), n, &p))
}

fn thm1_case1_ks(ctx: &Ctx) -> Result<ExperimentReport> {
    let p = ctx.params(1.4)?;
    let n = ctx.n(10_000);
    let small_n = 100;
    let m = ctx.reps(1000);
    let mut r = ctx.report(p.alpha(), n, m);
    let regime = classify_regime(&p);
    let sim = ChainSimulator::new(&p);
    let reference = reference_sample(&regime, LimitKind::Length, 1.0, m as usize, &mut ctx.stream(1, 0), &p)?;
    // Same replicate streams at both sizes.
    let big = normalized_lengths(ctx, &sim, n, m, 0)?;
    let small = normalized_lengths(ctx, &sim, small_n, m, 0)?;
    let ks_big = record_ks(&mut r, "ks", &big, &reference, 0.12)?;
    let ks_small = ks_two_sample(&small, &reference)?.statistic;
    r.at_most("convergence", "ks_large_minus_small", ks_big - ks_small, 0.0);
    r.stat("ks_small_n", ks_small);
    r.raw = big.iter().enumerate().map(|(i, &x)| (i as u64, "normalized_length".to_string(), x)).collect();
    Ok(r)
}

fn thm1_case3_stability(ctx: &Ctx) -> Result<ExperimentReport> {
    let p = ctx.params(1.8)?;
    let n = ctx.n(10_000);
    let small_n = (n / 10).max(2);
    let m = ctx.reps(1000);
    let mut r = ctx.report(p.alpha(), n, m);
    let sim = ChainSimulator::new(&p);
    let centered = |n: u64, purpose| -> Result<Vec<f64>> {
        let c = p.c1() * (n as f64).powf(2.0 - p.alpha());
        ctx.map(purpose, m, |s, _| Ok(tree_length(&sim.path(n, s)?) - c))
    };
    let big = centered(n, 0)?;
    let small = centered(small_n, 1)?;
    record_ks(&mut r, "ks", &small, &big, 0.08)?;
    r.stat("median_large_n", crate::stats::median(&mut big.clone()));
    r.stat("median_small_n", crate::stats::median(&mut small.clone()));
    r.raw = big.iter().enumerate().map(|(i, &x)| (i as u64, "centered_length".to_string(), x)).collect();
    Ok(r)
}

fn corollary_case3_ks(ctx: &Ctx) -> Result<ExperimentReport> {
    let p = ctx.params(1.7)?;
    let theta = 1.0;
    let n = ctx.n(10_000);
    let m = ctx.reps(1000);
    let mut r = ctx.report(p.alpha(), n, m);
    let regime = classify_regime(&p);
    let sim = ChainSimulator::new(&p);
    let xs = ctx.map(0, m, |s, _| {
        let l = tree_length(&sim.path(n, s)?);
        normalize_sites(segregating_sites(l, theta, s)?, n, theta, &p)
    })?;
    let reference = reference_sample(&regime, LimitKind::Sites, theta, m as usize, &mut ctx.stream(1, 0), &p)?;
    record_ks(&mut r, "ks", &xs, &reference, 0.08)?;
    r.stat("variance", crate::stats::variance(&xs));
    r.stat("limit_variance", theta * p.c1());
    r.raw = xs.iter().enumerate().map(|(i, &x)| (i as u64, "normalized_sites".to_string(), x)).collect();
    Ok(r)
}

fn length_reordering(ctx: &Ctx) -> Result<ExperimentReport> {
    let p = ctx.params(1.5)?;
    let n = ctx.n(1000);
    let m = ctx.reps(2000);
    let mut r = ctx.report(p.alpha(), n, m);
    let sim = ChainSimulator::new(&p);
    let direct = ctx.map(0, m, |s, _| Ok(tree_length(&sim.path(n, s)?)))?;
    let reordered = ctx.map(1, m, |s, _| {
        let pp = cpp_of_path(&sim.path(n, s)?);
        Ok(length_functional(&pp, s, &p))
    })?;
    record_ks(&mut r, "ks", &direct, &reordered, 0.05)?;
    Ok(r)
}

fn big_coupling(ctx: &Ctx) -> Result<ExperimentReport> {
    let p = ctx.params(1.5)?;
    let a = p.alpha();
    let level = 10u32;
    let b = 1u64 << level;
    let blocks = ctx.reps(100_000);
    let law_trials = 1000u64;
    let mut r = ctx.report(a, b, blocks);

    // Window-max laws at b = 2^r.
    let sim = ChainSimulator::new(&p);
    let renewal = RenewalSampler::new(&p);
    let start_n = crate::coalescent::DEFAULT_START_FACTOR * b;
    let mu_max = ctx.map(0, law_trials, |s, _| window_max_mu(&sim, b, start_n, s))?;
    let nu_max = ctx.map(1, law_trials, |s, _| window_max_nu(&renewal, b, s))?;
    r.require("window maxima at most b", mu_max.iter().chain(&nu_max).all(|&x| (1..=b).contains(&x)));

    // Blocks from independent draws of the two empirical laws.
    let coupler = BlockCoupler::new(&p);
    let pick = |s: &mut RandomStream, xs: &[u64]| xs[((s.uniform() * xs.len() as f64) as usize).min(xs.len() - 1)];
    let results = ctx.map(2, blocks, |s, _| {
        let (m0, m1) = (pick(s, &mu_max), pick(s, &nu_max));
        let res = coupler.run(level, m0, m1, CouplingMode::Coupled, s)?;
        Ok((res.d_r, res.step_gap_bounded()))
    })?;
    let violations = results.iter().filter(|x| !x.1).count();
    r.at_most("steps bounded by discrepancy", "step_gap_violations", violations as f64, 0.0);

    let mut envelope: f64 = 0.0;
    for t in [1u64, 2, 4, 8, 16, 32, 64, 128, 256] {
        let tail = results.iter().filter(|x| x.0 > t).count() as f64 / results.len() as f64;
        r.stat(format!("p_dr_gt_{t}"), tail);
        envelope = envelope.max(tail * (t as f64).powf(a - 1.0));
    }
    r.at_most("discrepancy envelope", "fitted_constant", envelope, 50.0);

    // Coupling vs independent draws from the same starts.
    let indep = ctx.map(3, 2000, |s, _| {
        let (m0, m1) = (pick(s, &mu_max), pick(s, &nu_max));
        Ok(coupler.run(level, m0, m1, CouplingMode::Independent, s)?.d_r as f64)
    })?;
    let mut coupled: Vec<f64> = results.iter().take(2000).map(|x| x.0 as f64).collect();
    r.stat("median_dr_coupled", crate::stats::median(&mut coupled));
    r.stat("median_dr_independent", crate::stats::median(&mut indep.clone()));

    // Renewal occupancy of [100, 10^4].
    let (lo, hi) = (100u64, 10_000u64);
    let occupancy = ctx.map(4, 2000, |s, _| {
        let rp = renewal.sample(hi, s)?;
        Ok(rp.points().iter().filter(|&&x| x >= lo).count() as f64 / (hi - lo + 1) as f64)
    })?;
    let occ = crate::stats::mean(&occupancy) / (a - 1.0);
    r.within("renewal occupancy", "occupancy_over_alpha_minus_one", occ, 0.98, 1.02);
    Ok(r)
}

fn cpp_infinity_uniqueness(ctx: &Ctx) -> Result<ExperimentReport> {
    let p = ctx.params(1.5)?;
    let (a, b) = (2u64, 1000u64);
    let start = ctx.n(100_000);
    let m = ctx.reps(1000);
    let mut r = ctx.report(p.alpha(), start, m);
    let sim = ChainSimulator::new(&p);
    let counts = |start_n: u64, purpose| {
        ctx.map(purpose, m, |s, _| Ok(sim.cpp_window(a, b, start_n, s)?.len() as f64))
    };
    let from_start = counts(start, 0)?;
    let from_double = counts(2 * start, 1)?;
    record_ks(&mut r, "ks", &from_start, &from_double, 0.05)?;
    r.stat("mean_count", crate::stats::mean(&from_start));
    r.stat("mean_count_double_start", crate::stats::mean(&from_double));
    r.raw = from_start.iter().enumerate().map(|(i, &x)| (i as u64, "atom_count".to_string(), x)).collect();
    Ok(r)
}
