//! Special functions and the closed-form constants attached to a stability
//! index `alpha` in (1, 2).
//!
//! Every Gamma-function ratio used elsewhere in the crate goes through
//! [`log_gamma`] or [`ln_gamma_ratio`]. The latter keeps full relative
//! accuracy for ratios like `Gamma(k + 1 - alpha) / Gamma(k + 2)` at very large
//! `k`, where subtracting two independently computed `ln Gamma` values would
//! lose about `log10(ln Gamma(k))` digits.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_741_78;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

/// `zeta(k) - 1` for `k = 2, 3, ...`; coefficients of the Taylor series of
/// `ln Gamma(2 + z)` around `z = 0`.
const ZETA_MINUS_ONE: [f64; 40] = [
    0.644_934_066_848_226_436_47,
    0.202_056_903_159_594_285_4,
    0.082_323_233_711_138_191_516,
    0.036_927_755_143_369_926_331,
    0.017_343_061_984_449_139_715,
    0.008_349_277_381_922_826_839_8,
    0.004_077_356_197_944_339_378_7,
    0.002_008_392_826_082_214_417_9,
    0.000_994_575_127_818_085_337_15,
    0.000_494_188_604_119_464_558_7,
    0.000_246_086_553_308_048_298_64,
    0.000_122_713_347_578_489_146_75,
    6.124_813_505_870_482_925_9e-5,
    3.058_823_630_702_049_355_2e-5,
    1.528_225_940_865_187_173_3e-5,
    7.637_197_637_899_762_273_6e-6,
    3.817_293_264_999_839_856_5e-6,
    1.908_212_716_553_938_925_7e-6,
    9.539_620_338_727_961_131_5e-7,
    4.769_329_867_878_064_631_2e-7,
    2.384_505_027_277_329_9e-7,
    1.192_199_259_653_110_730_7e-7,
    5.960_818_905_125_947_961_2e-8,
    2.980_350_351_465_228_018_6e-8,
    1.490_155_482_836_504_123_5e-8,
    7.450_711_789_835_429_492e-9,
    3.725_334_024_788_457_054_8e-9,
    1.862_659_723_513_049_006_4e-9,
    9.313_274_324_196_681_828_7e-10,
    4.656_629_065_033_784_073e-10,
    2.328_311_833_676_505_492e-10,
    1.164_155_017_270_051_977_6e-10,
    5.820_772_087_902_700_889_2e-11,
    2.910_385_044_497_099_686_9e-11,
    1.455_192_189_104_198_423_6e-11,
    7.275_959_835_057_481_014_5e-12,
    3.637_979_547_378_651_190_2e-12,
    1.818_989_650_307_065_947_6e-12,
    9.094_947_840_263_889_282_5e-13,
    4.547_473_783_042_154_026_8e-13,
];

/// Arguments at or above this use the Stirling series directly.
const STIRLING_MIN: f64 = 12.0;

/// `ln Gamma(x)` for `x > 0`.
///
/// Accurate to about 1e-15 relative away from the zeros at 1 and 2, and to
/// about 1e-16 absolute near them.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires finite x > 0, got {x}")));
    }
    Ok(ln_gamma(x))
}

/// Unchecked `ln Gamma` for positive finite `x`.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // Gamma(x) = Gamma(x + 2) / (x (x + 1))
        ln_gamma_near_two(x) - x.ln() - x.ln_1p()
    } else if x < 1.5 {
        let z = x - 1.0;
        ln_gamma_near_two(z) - z.ln_1p()
    } else if x <= 2.5 {
        ln_gamma_near_two(x - 2.0)
    } else if x < STIRLING_MIN {
        let mut y = x;
        let mut prod = 1.0;
        while y > 2.5 {
            y -= 1.0;
            prod *= y;
        }
        ln_gamma_near_two(y - 2.0) + prod.ln()
    } else {
        (x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_tail(x)
    }
}

/// Taylor series of `ln Gamma(2 + z)`, valid for `|z| <= 0.5`.
fn ln_gamma_near_two(z: f64) -> f64 {
    let mut acc = 0.0;
    // zk runs through (-1)^k z^k for k = 2, 3, ...
    let mut zk = -z;
    for (i, c) in ZETA_MINUS_ONE.iter().enumerate() {
        zk *= -z;
        acc += c * zk / (i + 2) as f64;
    }
    (1.0 - EULER_GAMMA) * z + acc
}

/// `sum_k B_{2k} / (2k (2k - 1) x^{2k - 1})`, the correction term of
/// Stirling's series.
fn stirling_tail(x: f64) -> f64 {
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in C.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

/// `ln Gamma(y + d) - ln Gamma(y)` for `y > 0`, `y + d > 0`.
///
/// For large arguments this uses the difference of Stirling expansions
/// arranged so that no large terms cancel, which keeps the ratio accurate to
/// machine precision even at `y ~ 1e12`.
pub fn ln_gamma_ratio(y: f64, d: f64) -> f64 {
    let z = y + d;
    debug_assert!(y > 0.0 && z > 0.0);
    if d == 0.0 {
        return 0.0;
    }
    if y < STIRLING_MIN || z < STIRLING_MIN {
        return ln_gamma(z) - ln_gamma(y);
    }
    (y - 0.5) * (d / y).ln_1p() + d * (z.ln() - 1.0) + (stirling_tail(z) - stirling_tail(y))
}

/// Symbolic boundary values of alpha at which the limit theorems change
/// form. They are never detected by floating-point comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// `(1 + sqrt 5) / 2`, the tree-length phase boundary.
    Golden,
    /// `sqrt 2`, the segregating-sites phase boundary.
    Sqrt2,
}

impl BoundaryTag {
    pub fn value(self) -> f64 {
        match self {
            BoundaryTag::Golden => (1.0 + 5f64.sqrt()) / 2.0,
            BoundaryTag::Sqrt2 => std::f64::consts::SQRT_2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundaryTag::Golden => "golden",
            BoundaryTag::Sqrt2 => "sqrt2",
        }
    }
}

/// An alpha as supplied by a user: either a number or a boundary tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSpec {
    Value(f64),
    Boundary(BoundaryTag),
}

impl AlphaSpec {
    pub fn value(self) -> f64 {
        match self {
            AlphaSpec::Value(a) => a,
            AlphaSpec::Boundary(t) => t.value(),
        }
    }
}

impl From<f64> for AlphaSpec {
    fn from(a: f64) -> Self {
        AlphaSpec::Value(a)
    }
}

impl From<BoundaryTag> for AlphaSpec {
    fn from(t: BoundaryTag) -> Self {
        AlphaSpec::Boundary(t)
    }
}

impl FromStr for AlphaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "golden" => return Ok(AlphaSpec::Boundary(BoundaryTag::Golden)),
            "sqrt2" => return Ok(AlphaSpec::Boundary(BoundaryTag::Sqrt2)),
            _ => {}
        }
        let a: f64 = t
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("cannot parse alpha `{s}`")))?;
        Ok(AlphaSpec::Value(a))
    }
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Value(a) => write!(f, "{a}"),
            AlphaSpec::Boundary(t) => f.write_str(t.name()),
        }
    }
}

/// A validated alpha with every derived constant the crate needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaParams {
    alpha: f64,
    boundary: Option<BoundaryTag>,
    gamma_const: f64,
    c1: f64,
    c2: f64,
    c_l52: Option<f64>,
    d_norm: f64,
    sigma_alpha: f64,
    ln_gamma_alpha: f64,
    ln_gamma_two_minus_alpha: f64,
}

impl AlphaParams {
    pub fn new(spec: impl Into<AlphaSpec>) -> Result<Self> {
        let spec = spec.into();
        let boundary = match spec {
            AlphaSpec::Boundary(t) => Some(t),
            AlphaSpec::Value(_) => None,
        };
        let alpha = spec.value();
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must be finite, got {alpha}")));
        }
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::AlphaOutOfRange(alpha));
        }

        let lg_a = ln_gamma(alpha);
        let lg_2ma = ln_gamma(2.0 - alpha);
        let gamma_a = lg_a.exp();
        let gamma_2ma = lg_2ma.exp();
        let am1 = alpha - 1.0;

        let c1 = gamma_a * alpha * am1 / (2.0 - alpha);
        let c2 = (lg_a + alpha.ln() + (1.0 + 1.0 / alpha) * am1.ln() - lg_2ma / alpha).exp();
        let quad = 1.0 + alpha - alpha * alpha;
        let c_l52 = match boundary {
            Some(BoundaryTag::Golden) => Some((-lg_2ma / alpha).exp()),
            _ if quad > 0.0 => Some(((quad.ln() + lg_2ma) * (-1.0 / alpha)).exp()),
            _ => None,
        };
        let sigma_alpha = gamma_2ma * (PI * alpha / 2.0).cos() / (1.0 - alpha);

        Ok(AlphaParams {
            alpha,
            boundary,
            gamma_const: 1.0 / am1,
            c1,
            c2,
            c_l52,
            d_norm: alpha / gamma_2ma,
            sigma_alpha,
            ln_gamma_alpha: lg_a,
            ln_gamma_two_minus_alpha: lg_2ma,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn boundary(&self) -> Option<BoundaryTag> {
        self.boundary
    }

    pub fn spec(&self) -> AlphaSpec {
        match self.boundary {
            Some(t) => AlphaSpec::Boundary(t),
            None => AlphaSpec::Value(self.alpha),
        }
    }

    /// `1 / (alpha - 1)`, the mean of the V law.
    pub fn gamma_const(&self) -> f64 {
        self.gamma_const
    }

    /// Centering constant of the tree length: `E L_n ~ c1 n^(2 - alpha)`.
    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// Scale constant of the stable fluctuations of the tree length.
    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// Scale of the stable limit of the weighted V sums, `c` with
    /// `c = ((1 + a - a^2) Gamma(2 - a))^(-1/a)` below the golden ratio and
    /// `Gamma(2 - a)^(-1/a)` at the golden tag. `None` above the golden ratio.
    pub fn c_l52(&self) -> Option<f64> {
        self.c_l52
    }

    /// `d = alpha / Gamma(2 - alpha)`.
    pub fn d_norm(&self) -> f64 {
        self.d_norm
    }

    /// `sigma^alpha` of the normalized maximally skewed stable law.
    pub fn sigma_alpha(&self) -> f64 {
        self.sigma_alpha
    }

    /// Stable scale `sigma`.
    pub fn sigma(&self) -> f64 {
        self.sigma_alpha.powf(1.0 / self.alpha)
    }

    pub fn ln_gamma_alpha(&self) -> f64 {
        self.ln_gamma_alpha
    }

    pub fn ln_gamma_two_minus_alpha(&self) -> f64 {
        self.ln_gamma_two_minus_alpha
    }

    /// `1 + alpha - alpha^2`; positive exactly below the golden ratio.
    pub fn golden_quadratic(&self) -> f64 {
        1.0 + self.alpha - self.alpha * self.alpha
    }
}

/// Convenience constructor mirroring [`AlphaParams::new`].
pub fn make_alpha_params(spec: impl Into<AlphaSpec>) -> Result<AlphaParams> {
    AlphaParams::new(spec)
}

/// Log characteristic function of the normalized maximally skewed stable
/// law: `psi(u) = -sigma^a |u|^a (1 + i sign(u) tan(pi a / 2))`.
pub fn stable_cf_exponent(u: f64, params: &AlphaParams) -> Complex64 {
    if u == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let a = params.alpha();
    let mag = params.sigma_alpha() * u.abs().powf(a);
    let skew = u.signum() * (PI * a / 2.0).tan();
    Complex64::new(-mag, -mag * skew)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // Reference values from a 40-digit evaluation at the exact binary
    // value of each argument.
    const LGAMMA_TABLE: &[(f64, f64)] = &[
        (0.05, 2.968_879_201_051_730_825_4),
        (0.1, 2.252_712_651_734_205_959_9),
        (0.3, 1.095_797_994_818_075_521_7),
        (0.5, 0.572_364_942_924_700_087_07),
        (0.75, 0.203_280_951_431_295_371_48),
        (0.9, 0.066_376_239_734_742_954_426),
        (0.999, 0.000_578_038_532_891_380_238_17),
        (1.001, -0.000_576_393_598_283_306_151_52),
        (1.25, -0.098_271_836_421_813_161_464),
        (1.5, -0.120_782_237_635_245_222_35),
        (1.9, -0.038_984_275_923_083_361_674),
        (1.999, -0.000_422_461_800_692_107_284_18),
        (2.001, 0.000_423_106_734_800_116_991_19),
        (2.3, 0.154_189_454_959_630_581_09),
        (2.5, 0.284_682_870_472_919_159_63),
        (2.75, 0.475_214_666_914_937_130_31),
        (3.3, 0.987_098_577_894_734_587_88),
        (5.0, 3.178_053_830_347_945_619_6),
        (7.2, 6.956_848_079_888_339_973_1),
        (11.5, 16.292_000_476_567_241_32),
        (12.5, 18.734_347_511_936_445_702),
        (25.5, 56.389_167_643_719_946_744),
        (100.5, 361.435_540_467_777_621_56),
        (1234.567, 7551.027_809_984_276_039_8),
        (1e5, 1_051_287.708_973_656_894_9),
        (9_999_999.5, 151_180_941.310_426_125_96),
        (1e7, 151_180_949.369_473_913_94),
    ];

    #[test]
    fn log_gamma_matches_high_precision_table() {
        for &(x, want) in LGAMMA_TABLE {
            let got = log_gamma(x).unwrap();
            assert!(rel(got, want) < 1e-13, "x={x}: got {got}, want {want}");
        }
    }

    #[test]
    fn log_gamma_simple_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-16);
        assert!(rel(log_gamma(5.0).unwrap(), 24f64.ln()) < 1e-15);
        assert!(rel(log_gamma(0.5).unwrap(), 0.5 * PI.ln()) < 1e-15);
    }

    #[test]
    fn log_gamma_rejects_nonpositive() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
        assert!(log_gamma(f64::INFINITY).is_err());
    }

    #[test]
    fn log_gamma_recurrence() {
        for &x in &[0.3, 0.5, 1.5, 7.2, 100.5] {
            let lhs = ln_gamma(x + 1.0).exp();
            let rhs = x * ln_gamma(x).exp();
            assert!(rel(lhs, rhs) < 1e-12, "x={x}");
        }
    }

    #[test]
    fn ratio_agrees_with_difference_at_moderate_arguments() {
        for &(y, d) in &[(3.0, 0.5), (12.5, -1.5), (40.0, 2.7), (200.0, -2.5), (13.0, 0.0)] {
            let want = ln_gamma(y + d) - ln_gamma(y);
            assert!((ln_gamma_ratio(y, d) - want).abs() < 1e-12, "y={y} d={d}");
        }
    }

    #[test]
    fn ratio_keeps_precision_at_large_arguments() {
        // Gamma(k + 1 - a) / Gamma(k + 1) / Gamma(2 - a) at a = 1.5, 40-digit reference.
        let a: f64 = 1.5;
        let lg = ln_gamma(2.0 - a);
        for &(k, want) in &[
            (10.0, 0.018_547_058_105_468_75),
            (1000.0, 1.784_793_511_341_102_624_3e-5),
            (1e6, 5.641_897_951_189_603_106_9e-10),
        ] {
            let got = (ln_gamma_ratio(k + 1.0, -a) - lg).exp();
            assert!(rel(got, want) < 1e-13, "k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn alpha_params_at_three_halves() {
        let p = AlphaParams::new(1.5).unwrap();
        assert_eq!(p.gamma_const(), 2.0);
        assert!(rel(p.c1(), 1.329_340_388_179_137_020_5) < 1e-13);
        assert!(rel(p.c2(), 0.285_892_601_168_726_665_53) < 1e-13);
        assert!(rel(p.c_l52().unwrap(), 1.720_508_027_656_199_250_7) < 1e-13);
        assert!(rel(p.d_norm(), 0.846_284_375_321_634_430_42) < 1e-13);
        assert!(rel(p.sigma_alpha(), 2.506_628_274_631_000_502_4) < 1e-13);
    }

    #[test]
    fn alpha_params_other_alphas() {
        for &(a, c1, c2) in &[
            (1.2, 0.275_450_622_719_928_183_19, 0.050_772_261_617_846_789_297),
            (1.4, 0.828_112_896_336_203_603_28, 0.194_295_021_611_947_893_88),
            (1.7, 3.604_266_973_651_385_451_6, 0.460_128_152_176_154_598_44),
            (1.8, 6.705_963_151_057_747_432_1, 0.508_082_459_605_630_926_26),
        ] {
            let p = AlphaParams::new(a).unwrap();
            assert!(rel(p.c1(), c1) < 1e-13, "c1 at {a}");
            assert!(rel(p.c2(), c2) < 1e-13, "c2 at {a}");
        }
    }

    #[test]
    fn alpha_params_reject_out_of_range() {
        for &a in &[1.0, 2.0, 0.5, 2.5, -1.0] {
            assert_eq!(AlphaParams::new(a), Err(Error::AlphaOutOfRange(a)));
        }
        assert!(matches!(AlphaParams::new(f64::NAN), Err(Error::InvalidParameter(_))));
        assert!(matches!(AlphaParams::new(f64::INFINITY), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn constants_agree_with_direct_gamma_products() {
        for i in 0..17 {
            let a = 1.05 + 0.9 * i as f64 / 16.0;
            let p = AlphaParams::new(a).unwrap();
            let ga = ln_gamma(a).exp();
            let g2 = ln_gamma(2.0 - a).exp();
            let c1 = ga * a * (a - 1.0) / (2.0 - a);
            let c2 = ga * a * (a - 1.0).powf(1.0 + 1.0 / a) / g2.powf(1.0 / a);
            let d = a / g2;
            assert!(rel(p.c1(), c1) < 1e-12);
            assert!(rel(p.c2(), c2) < 1e-12);
            assert!(rel(p.d_norm(), d) < 1e-12);
            assert!((p.gamma_const() * (a - 1.0) - 1.0).abs() < 1e-14);
            let quad = 1.0 + a - a * a;
            if quad > 0.0 {
                let c = (quad * g2).powf(-1.0 / a);
                assert!(rel(p.c_l52().unwrap(), c) < 1e-12);
            } else {
                assert!(p.c_l52().is_none());
            }
            assert!(p.sigma_alpha() > 0.0);
        }
    }

    #[test]
    fn boundary_tags_parse_and_resolve() {
        let g: AlphaSpec = "golden".parse().unwrap();
        assert_eq!(g, AlphaSpec::Boundary(BoundaryTag::Golden));
        let p = AlphaParams::new(g).unwrap();
        assert_eq!(p.boundary(), Some(BoundaryTag::Golden));
        let want = (-ln_gamma(2.0 - p.alpha()) / p.alpha()).exp();
        assert!(rel(p.c_l52().unwrap(), want) < 1e-14);

        let s: AlphaSpec = "SQRT2".parse().unwrap();
        assert_eq!(AlphaParams::new(s).unwrap().boundary(), Some(BoundaryTag::Sqrt2));

        let v: AlphaSpec = "1.5".parse().unwrap();
        assert_eq!(v, AlphaSpec::Value(1.5));
        assert!("abc".parse::<AlphaSpec>().is_err());
        // A decimal that happens to equal sqrt 2 to double precision is not a tag.
        let near = AlphaParams::new(std::f64::consts::SQRT_2).unwrap();
        assert_eq!(near.boundary(), None);
    }

    #[test]
    fn cf_exponent_basic_properties() {
        let p = AlphaParams::new(1.5).unwrap();
        assert_eq!(stable_cf_exponent(0.0, &p), Complex64::new(0.0, 0.0));
        let a = stable_cf_exponent(1.7, &p);
        let b = stable_cf_exponent(-1.7, &p);
        assert!((a.conj() - b).norm() < 1e-15);
        let one = stable_cf_exponent(1.0, &p);
        let sa = p.sigma_alpha();
        assert!((one.re + sa).abs() < 1e-14);
        assert!((one.im + sa * (0.75 * PI).tan()).abs() < 1e-14);
        for &u in &[-3.0, -0.1, 0.01, 2.0, 50.0] {
            assert!(stable_cf_exponent(u, &p).re < 0.0);
        }
    }
}
