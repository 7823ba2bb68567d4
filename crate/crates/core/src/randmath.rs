//! Standard-normal special functions and the seeded random stream shared by
//! every sampler in the crate.
//!
//! Tail probabilities go through the complementary error function so that
//! values near `1e-10` keep full relative accuracy. The quantile is Wichura's
//! AS 241 rational approximation followed by one Newton step.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::{ChaCha20Rng, ChaCha8Rng};
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_94;

/// Standard Gaussian density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Natural log of the standard Gaussian density.
#[inline]
pub fn normal_ln_pdf(x: f64) -> f64 {
    -0.5 * x * x - 0.918_938_533_204_672_741_78
}

/// Standard Gaussian CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Upper tail `1 - Φ(x)`, computed without cancellation.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of the standard Gaussian CDF.
pub fn normal_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!(
            "normal quantile requires 0 < q < 1, got {q}"
        )));
    }
    let x = ppnd16(q);
    // One Newton step, residual taken on whichever tail is small.
    let resid = if q < 0.5 {
        normal_cdf(x) - q
    } else {
        (1.0 - q) - normal_sf(x)
    };
    let pdf = normal_pdf(x);
    if pdf > 0.0 {
        Ok(x - resid / pdf)
    } else {
        Ok(x)
    }
}

/// Inverse upper tail: the `x` with `1 - Φ(x) = p`. Accurate for tiny `p`
/// where forming `1 - p` first would lose digits.
pub fn normal_isf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!(
            "inverse survival function requires 0 < p < 1, got {p}"
        )));
    }
    let x = -ppnd16(p);
    let resid = normal_sf(x) - p;
    let pdf = normal_pdf(x);
    if pdf > 0.0 {
        Ok(x + resid / pdf)
    } else {
        Ok(x)
    }
}

#[inline]
fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

// AS 241 (PPND16), Wichura 1988. Relative accuracy about 1e-16.
const A: [f64; 8] = [
    3.387_132_872_796_366_608,
    1.331_416_678_917_843_774_5e2,
    1.971_590_950_306_551_442_7e3,
    1.373_169_376_550_946_112_5e4,
    4.592_195_393_154_987_145_7e4,
    6.726_577_092_700_870_085_3e4,
    3.343_057_558_358_812_810_5e4,
    2.509_080_928_730_122_672_7e3,
];
const B: [f64; 8] = [
    1.0,
    4.231_333_070_160_091_125_2e1,
    6.871_870_074_920_579_083e2,
    5.394_196_021_424_751_107_7e3,
    2.121_379_430_158_659_586_7e4,
    3.930_789_580_009_271_061e4,
    2.872_908_573_572_194_267_4e4,
    5.226_495_278_852_854_561e3,
];
const C: [f64; 8] = [
    1.423_437_110_749_683_577_34,
    4.630_337_846_156_545_295_9,
    5.769_497_221_460_691_405_5,
    3.647_848_324_763_204_605_04,
    1.270_458_252_452_368_382_58,
    2.417_807_251_774_506_117_7e-1,
    2.272_384_498_926_918_458_33e-2,
    7.745_450_142_783_414_076_4e-4,
];
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87,
    1.676_384_830_183_803_849_4,
    6.897_673_349_851_000_045_5e-1,
    1.481_039_764_274_800_745_9e-1,
    1.519_866_656_361_645_719_66e-2,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
const E: [f64; 8] = [
    6.657_904_643_501_103_777_2,
    5.463_784_911_164_114_369_9,
    1.784_826_539_917_291_335_8,
    2.965_605_718_285_048_912_3e-1,
    2.653_218_952_657_612_309_3e-2,
    1.242_660_947_388_078_438_6e-3,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const F: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_376_9e-1,
    1.369_298_809_227_358_053_1e-1,
    1.487_536_129_085_061_485_25e-2,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];

fn ppnd16(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        r -= 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

/// Seeded, reproducible source of randomness.
///
/// Backed by ChaCha8. A stream remembers the key it was created with, so
/// [`RandomStream::substream`] is a pure function of `(key, label)` and does
/// not depend on how many draws the parent has already made.
#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    key: [u8; 32],
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut key);
        Self::from_key(seed, key)
    }

    fn from_key(seed: u64, key: [u8; 32]) -> Self {
        Self {
            seed,
            key,
            rng: ChaCha8Rng::from_seed(key),
        }
    }

    /// Root seed this stream (or its ancestor) was created from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream. The child key is ChaCha20 keystream output
    /// under the parent key with the label as stream id.
    pub fn substream(&self, label: u64) -> Self {
        let mut prf = ChaCha20Rng::from_seed(self.key);
        prf.set_stream(label);
        let mut key = [0u8; 32];
        prf.fill_bytes(&mut key);
        Self::from_key(self.seed, key)
    }

    /// Nested substream, equivalent to chaining [`RandomStream::substream`].
    pub fn substream_path(&self, labels: &[u64]) -> Self {
        labels
            .iter()
            .fold(self.clone_fresh(), |s, &l| s.substream(l))
    }

    fn clone_fresh(&self) -> Self {
        Self::from_key(self.seed, self.key)
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform01(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn uniform(&mut self, a: f64, b: f64) -> Result<f64> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::domain(format!(
                "uniform draw requires finite a < b, got [{a}, {b}]"
            )));
        }
        Ok(a + (b - a) * self.uniform01())
    }
}

/// Free-function form of [`RandomStream::standard_normal`].
pub fn draw_standard_normal(stream: &mut RandomStream) -> f64 {
    stream.standard_normal()
}

/// Free-function form of [`RandomStream::uniform`].
pub fn draw_uniform(stream: &mut RandomStream, a: f64, b: f64) -> Result<f64> {
    stream.uniform(a, b)
}

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against `cdf`.
/// Sorts `samples` in place.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let lo = f - i as f64 / n;
            let hi = (i + 1) as f64 / n - f;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic two-sided KS critical value at the 1% level.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.627_61 / (n as f64).sqrt()
}
