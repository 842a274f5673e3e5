//! The block-counting chain and the tree functionals built on it.
//!
//! A path stores only the visited states and the jump times, never a length-n
//! array, so `n` in the tens of millions fits comfortably in memory.

use std::io::{self, Write};

use crate::error::{domain, Result};
use crate::numerics::{AlphaParams, AlphaSpec};
use crate::rates::total_rate_unchecked;
use crate::sampling::{exp1, sample_poisson, JumpSampler, RandomStream};

/// Default `start_n / b` ratio for the windowed CPP(∞) approximation.
pub const DEFAULT_START_FACTOR: u64 = 100;

/// One run of the block-counting chain from `n` blocks down to one.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCountingPath {
    n: u64,
    states: Vec<u64>,
    times: Vec<f64>,
}

impl BlockCountingPath {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `X_0 = n > X_1 > ... > X_tau = 1`.
    pub fn states(&self) -> &[u64] {
        &self.states
    }

    /// `T_0 = 0 < T_1 < ... < T_tau`.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of collisions.
    pub fn tau(&self) -> usize {
        self.states.len() - 1
    }

    /// Writes the path as CSV: a comment header, then rows `i,X_i,T_i`.
    pub fn write_csv<W: Write>(
        &self,
        mut w: W,
        seed: u64,
        stream_id: u64,
        alpha: AlphaSpec,
    ) -> io::Result<()> {
        writeln!(w, "# seed={seed} stream={stream_id} alpha={alpha} n={}", self.n)?;
        for (i, (x, t)) in self.states.iter().zip(&self.times).enumerate() {
            writeln!(w, "{i},{x},{t:?}")?;
        }
        Ok(())
    }
}

/// Chain simulator holding the jump sampler's tables for reuse across
/// replicates. Cheap to clone and safe to share between threads.
#[derive(Debug, Clone)]
pub struct ChainSimulator {
    jumps: JumpSampler,
}

impl ChainSimulator {
    pub fn new(params: &AlphaParams) -> Self {
        ChainSimulator { jumps: JumpSampler::new(params) }
    }

    pub fn params(&self) -> &AlphaParams {
        self.jumps.params()
    }

    pub fn jump_sampler(&self) -> &JumpSampler {
        &self.jumps
    }

    /// Full path from `n`. Each step draws the holding time, then the jump.
    pub fn path(&self, n: u64, stream: &mut RandomStream) -> Result<BlockCountingPath> {
        if n < 1 {
            return Err(domain("initial block count n must be >= 1"));
        }
        let p = self.params();
        let mut states = vec![n];
        let mut times = vec![0.0];
        let mut m = n;
        let mut t = 0.0;
        while m > 1 {
            t += exp1(stream) / total_rate_unchecked(m, p);
            m -= self.jumps.jump(m, stream);
            states.push(m);
            times.push(t);
        }
        Ok(BlockCountingPath { n, states, times })
    }

    /// States visited from `start`, stopping at the first state below
    /// `stop_below`. No holding times are drawn.
    pub fn states_until(&self, start: u64, stop_below: u64, stream: &mut RandomStream) -> Vec<u64> {
        let mut out = vec![start];
        let mut m = start;
        while m >= stop_below && m > 1 {
            m -= self.jumps.jump(m, stream);
            out.push(m);
        }
        out
    }

    /// Atoms of a chain started at `start_n`, restricted to `[a, b]`.
    pub fn cpp_window(
        &self,
        a: u64,
        b: u64,
        start_n: u64,
        stream: &mut RandomStream,
    ) -> Result<IntegerPointProcess> {
        if a < 2 || a > b {
            return Err(domain(format!("window must satisfy 2 <= a <= b, got [{a}, {b}]")));
        }
        if start_n <= b {
            return Err(domain(format!("start_n = {start_n} must exceed the window end b = {b}")));
        }
        let mut atoms: Vec<u64> = self
            .states_until(start_n, a, stream)
            .into_iter()
            .filter(|&x| x >= a && x <= b)
            .collect();
        atoms.reverse();
        Ok(IntegerPointProcess { atoms, window: (a, b) })
    }
}

/// Simulates one path from `n`.
pub fn simulate_path(n: u64, stream: &mut RandomStream, params: &AlphaParams) -> Result<BlockCountingPath> {
    ChainSimulator::new(params).path(n, stream)
}

/// Total branch length `sum_i X_i (T_{i+1} - T_i)`.
pub fn tree_length(path: &BlockCountingPath) -> f64 {
    path.states
        .iter()
        .zip(path.times.windows(2))
        .map(|(&x, w)| x as f64 * (w[1] - w[0]))
        .sum()
}

/// Number of segregating sites: Poisson with mean `theta * length`.
pub fn segregating_sites(length: f64, theta: f64, stream: &mut RandomStream) -> Result<u64> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(domain(format!("theta must be positive and finite, got {theta}")));
    }
    if !(length >= 0.0) {
        return Err(domain(format!("length must be >= 0, got {length}")));
    }
    sample_poisson(theta * length, stream)
}

/// `s_n / (c1 n^(2 - alpha))`, the mutation-rate estimate matching the
/// leading order of the tree length.
pub fn watterson_theta(s_n: u64, n: u64, params: &AlphaParams) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!("n must be >= 2, got {n}")));
    }
    Ok(s_n as f64 / (params.c1() * (n as f64).powf(2.0 - params.alpha())))
}

/// A 0/1-multiplicity point process on the integers, valid on a window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerPointProcess {
    /// Strictly increasing.
    atoms: Vec<u64>,
    window: (u64, u64),
}

impl IntegerPointProcess {
    pub fn new(mut atoms: Vec<u64>, window: (u64, u64)) -> Result<Self> {
        atoms.sort_unstable();
        atoms.dedup();
        if atoms.iter().any(|&x| x < window.0 || x > window.1) {
            return Err(domain(format!("atoms must lie in [{}, {}]", window.0, window.1)));
        }
        Ok(IntegerPointProcess { atoms, window })
    }

    pub fn atoms(&self) -> &[u64] {
        &self.atoms
    }

    pub fn window(&self) -> (u64, u64) {
        self.window
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.atoms.binary_search(&x).is_ok()
    }

    /// Largest atom, if any.
    pub fn max_atom(&self) -> Option<u64> {
        self.atoms.last().copied()
    }
}

/// States visited before absorption, `{X_0, ..., X_{tau-1}}`, on `[2, n]`.
pub fn cpp_of_path(path: &BlockCountingPath) -> IntegerPointProcess {
    let mut atoms: Vec<u64> = path.states[..path.tau()].to_vec();
    atoms.reverse();
    IntegerPointProcess { atoms, window: (2, path.n) }
}

/// Windowed approximation of CPP(∞) on `[a, b]`: the atoms of a chain
/// started at `start_n`.
pub fn cpp_infinity_window(
    a: u64,
    b: u64,
    start_n: u64,
    stream: &mut RandomStream,
    params: &AlphaParams,
) -> Result<IntegerPointProcess> {
    ChainSimulator::new(params).cpp_window(a, b, start_n, stream)
}

/// `sum_x x E_x / rho_x` over the atoms, with fresh unit exponentials drawn
/// lazily in increasing atom order.
pub fn length_functional(pp: &IntegerPointProcess, stream: &mut RandomStream, params: &AlphaParams) -> f64 {
    pp.atoms
        .iter()
        .map(|&x| x as f64 * exp1(stream) / total_rate_unchecked(x, params))
        .sum()
}
