//! Regime logic and normalizations for the tree-length and
//! segregating-sites limit laws, reference limit samplers, and weighted sums
//! of i.i.d. V variables.

use crate::error::{domain, Error, Result};
use crate::numerics::{AlphaParams, BoundaryTag};
use crate::sampling::{RandomStream, StableSampler, VSampler};

/// The three cases of a limit theorem: below, at and above the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    I,
    II,
    III,
}

/// Normalizing scale as a function of `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    /// `n^e`.
    Power(f64),
    /// `(ln n)^e`.
    LogPower(f64),
    /// No rescaling.
    Unit,
}

impl Scale {
    pub fn at(self, n: u64) -> f64 {
        let x = n as f64;
        match self {
            Scale::Power(e) => x.powf(e),
            Scale::LogPower(e) => x.ln().powf(e),
            Scale::Unit => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeClassification {
    /// Tree-length case, split at the golden ratio.
    pub length_case: Case,
    /// Segregating-sites case, split at `sqrt 2`.
    pub sites_case: Case,
    /// Both statistics are centered at order `n^(2 - alpha)`.
    pub centering_exponent: f64,
    pub length_scale: Scale,
    pub sites_scale: Scale,
}

fn case_for(p: &AlphaParams, tag: BoundaryTag) -> Case {
    if p.boundary() == Some(tag) {
        Case::II
    } else if p.alpha() < tag.value() {
        Case::I
    } else {
        Case::III
    }
}

/// Boundary cases are recognized only through the symbolic tags; a plain
/// numeric alpha is never treated as lying on a boundary.
pub fn classify_regime(params: &AlphaParams) -> RegimeClassification {
    let a = params.alpha();
    let length_case = case_for(params, BoundaryTag::Golden);
    let sites_case = case_for(params, BoundaryTag::Sqrt2);
    let stable_exp = 1.0 / a + 1.0 - a;
    let length_scale = match length_case {
        Case::I => Scale::Power(stable_exp),
        Case::II => Scale::LogPower(1.0 / a),
        Case::III => Scale::Unit,
    };
    let sites_scale = match sites_case {
        Case::I => Scale::Power(stable_exp),
        Case::II | Case::III => Scale::Power(1.0 - a / 2.0),
    };
    RegimeClassification { length_case, sites_case, centering_exponent: 2.0 - a, length_scale, sites_scale }
}

fn centering(n: u64, params: &AlphaParams) -> f64 {
    params.c1() * (n as f64).powf(2.0 - params.alpha())
}

/// `(L_n - c1 n^(2 - alpha)) / scale(n)` for the tree-length case of alpha.
pub fn normalize_length(l_n: f64, n: u64, params: &AlphaParams) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!("n must be >= 2, got {n}")));
    }
    let r = classify_regime(params);
    Ok((l_n - centering(n, params)) / r.length_scale.at(n))
}

/// `(S_n - theta c1 n^(2 - alpha)) / scale(n)` for the sites case of alpha.
pub fn normalize_sites(s_n: u64, n: u64, theta: f64, params: &AlphaParams) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!("n must be >= 2, got {n}")));
    }
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(domain(format!("theta must be positive and finite, got {theta}")));
    }
    let r = classify_regime(params);
    Ok((s_n as f64 - theta * centering(n, params)) / r.sites_scale.at(n))
}

/// Which normalized statistic a reference sample stands in for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    Length,
    Sites,
}

/// Samples the stable part `c2 ς / (1 + alpha - alpha^2)^(1/alpha)` of the
/// case-I length limit.
fn length_limit_case_one(st: &StableSampler, stream: &mut RandomStream, p: &AlphaParams) -> f64 {
    let a = p.alpha();
    let quad = 1.0 + a - a * a;
    p.c2() * st.sample(stream) / quad.powf(1.0 / a)
}

/// `m` i.i.d. draws of the limit law. The tree-length limit in case III has
/// no closed form and is rejected.
pub fn reference_sample(
    regime: &RegimeClassification,
    which: LimitKind,
    theta: f64,
    m: usize,
    stream: &mut RandomStream,
    params: &AlphaParams,
) -> Result<Vec<f64>> {
    if which == LimitKind::Sites && !(theta > 0.0 && theta.is_finite()) {
        return Err(domain(format!("theta must be positive and finite, got {theta}")));
    }
    let st = StableSampler::new(params);
    let normal_sd = (theta * params.c1()).sqrt();
    let draw: Box<dyn Fn(&mut RandomStream) -> f64> = match (which, regime.length_case, regime.sites_case) {
        (LimitKind::Length, Case::I, _) => Box::new(|s| length_limit_case_one(&st, s, params)),
        (LimitKind::Length, Case::II, _) => Box::new(|s| params.c2() * st.sample(s)),
        (LimitKind::Length, Case::III, _) => {
            return Err(Error::UnsupportedRegime(
                "the tree-length limit above the golden ratio has no closed form; \
                 compare runs at different n instead"
                    .into(),
            ))
        }
        (LimitKind::Sites, lc, sc) if lc != Case::I && sc != Case::III => {
            return Err(Error::UnsupportedRegime(format!(
                "inconsistent regime: length case {lc:?} with sites case {sc:?}"
            )))
        }
        (LimitKind::Sites, _, Case::I) => Box::new(|s| theta * length_limit_case_one(&st, s, params)),
        (LimitKind::Sites, _, Case::II) => Box::new(|s| {
            let z = s.normal();
            normal_sd * z + theta * length_limit_case_one(&st, s, params)
        }),
        (LimitKind::Sites, _, Case::III) => Box::new(|s| normal_sd * s.normal()),
    };
    Ok((0..m).map(|_| draw(stream)).collect())
}

fn check_lemma52(params: &AlphaParams) -> Result<f64> {
    params.c_l52().ok_or_else(|| {
        Error::UnsupportedRegime(format!(
            "weighted V sums need alpha at or below the golden ratio, got {}",
            params.alpha()
        ))
    })
}

/// Normalizer of `sum_{k<=n} k^(1-alpha) (V_k - gamma)`: `n^(1/alpha + 1 - alpha)`
/// below the golden ratio, `(ln n)^(1/alpha)` at it.
fn lemma52_scale(n: u64, params: &AlphaParams) -> Result<f64> {
    check_lemma52(params)?;
    match classify_regime(params).length_case {
        Case::II if n < 2 => Err(domain("the logarithmic normalizer needs n >= 2")),
        Case::II => Ok((n as f64).ln().powf(1.0 / params.alpha())),
        _ => Ok(Scale::Power(1.0 / params.alpha() + 1.0 - params.alpha()).at(n)),
    }
}

/// Repeated draws of the normalized weighted sum at a fixed `n`, sharing the
/// weight table and the V sampler.
#[derive(Debug, Clone)]
pub struct Lemma52Harness {
    weights: Vec<f64>,
    scale: f64,
    gamma: f64,
    v: VSampler,
}

impl Lemma52Harness {
    pub fn new(n: u64, params: &AlphaParams) -> Result<Self> {
        if n < 1 {
            return Err(domain("n must be >= 1"));
        }
        let scale = lemma52_scale(n, params)?;
        let e = 1.0 - params.alpha();
        Ok(Lemma52Harness {
            weights: (1..=n).map(|k| (k as f64).powf(e)).collect(),
            scale,
            gamma: params.gamma_const(),
            v: VSampler::for_params(params),
        })
    }

    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        let sum: f64 =
            self.weights.iter().map(|w| w * (self.v.sample(stream) as f64 - self.gamma)).sum();
        sum / self.scale
    }

    /// The statistic for given values of `V_1, ..., V_n`.
    pub fn from_values(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.weights.len() {
            return Err(domain(format!("expected {} values, got {}", self.weights.len(), values.len())));
        }
        let sum: f64 = self.weights.iter().zip(values).map(|(w, v)| w * (v - self.gamma)).sum();
        Ok(sum / self.scale)
    }
}

/// One draw of the normalized weighted sum.
pub fn lemma52_statistic(n: u64, stream: &mut RandomStream, params: &AlphaParams) -> Result<f64> {
    Ok(Lemma52Harness::new(n, params)?.sample(stream))
}

/// Reference draws of the weighted-sum limit `-c ς`.
pub fn lemma52_reference(m: usize, stream: &mut RandomStream, params: &AlphaParams) -> Result<Vec<f64>> {
    let c = check_lemma52(params)?;
    let st = StableSampler::new(params);
    Ok((0..m).map(|_| -c * st.sample(stream)).collect())
}

/// Trajectory `j -> sum_{k<=j} k^(-beta) (V_k - gamma)`, `j = 1..n`.
pub fn lemma51_partial_sums(beta: f64, n: u64, stream: &mut RandomStream, params: &AlphaParams) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(domain("n must be >= 1"));
    }
    let v = VSampler::for_params(params);
    let values: Vec<f64> = (0..n).map(|_| v.sample(stream) as f64).collect();
    lemma51_partial_sums_from(beta, &values, params)
}

/// The same trajectory for given values of `V_1, ..., V_n`.
pub fn lemma51_partial_sums_from(beta: f64, values: &[f64], params: &AlphaParams) -> Result<Vec<f64>> {
    if !beta.is_finite() {
        return Err(domain(format!("beta must be finite, got {beta}")));
    }
    let gamma = params.gamma_const();
    let mut acc = 0.0;
    Ok(values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            acc += ((i + 1) as f64).powf(-beta) * (v - gamma);
            acc
        })
        .collect())
}

/// `max - min` of a trajectory over indices `j in [n/2, n]` (1-based).
pub fn tail_oscillation(trajectory: &[f64]) -> f64 {
    let n = trajectory.len();
    if n == 0 {
        return 0.0;
    }
    let tail = &trajectory[(n / 2).saturating_sub(1)..];
    let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}
