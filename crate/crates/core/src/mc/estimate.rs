use num_bigint::{BigInt, Sign};
use num_traits::{ToPrimitive, Zero};

/// Every finite f64 is an integer multiple of 2^-1074.
const SCALE_BITS: u32 = 1074;

/// Exact sum of f64 values, held as an integer count of 2^-1074 units.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExactSum(BigInt);

impl ExactSum {
    pub fn zero() -> Self {
        ExactSum(BigInt::zero())
    }

    pub fn add_f64(&mut self, x: f64) {
        self.0 += scaled(x);
    }

    pub fn add(&mut self, other: &ExactSum) {
        self.0 += &other.0;
    }

    pub fn to_f64(&self) -> f64 {
        to_f64_scaled(&self.0, SCALE_BITS as i64)
    }
}

fn scaled(x: f64) -> BigInt {
    assert!(x.is_finite(), "cannot accumulate non-finite value {x}");
    if x == 0.0 {
        return BigInt::zero();
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { Sign::Minus } else { Sign::Plus };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    // x = mant * 2^(shift - 1074)
    let (mant, shift) = if exp == 0 { (frac, 0) } else { (frac | (1u64 << 52), exp - 1) };
    let mag = BigInt::from(mant) << shift as usize;
    if sign == Sign::Minus {
        -mag
    } else {
        mag
    }
}

/// `v * 2^-scale_bits` rounded to f64.
fn to_f64_scaled(v: &BigInt, scale_bits: i64) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let n = v.bits() as i64;
    let drop = (n - 120).max(0);
    let top = (v >> drop as usize).to_i128().expect("at most 121 significant bits") as f64;
    ldexp(top, drop - scale_bits)
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// Monte Carlo mean with a normal-approximation confidence interval.
///
/// Sums are exact, so [`merge`](Estimate::merge) is associative and the
/// result does not depend on how samples were partitioned.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Estimate {
    sum: ExactSum,
    /// Exact sum of squares in 2^-2148 units.
    sum_sq: BigInt,
    n: u64,
}

impl Estimate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        let v = scaled(x);
        self.sum_sq += &v * &v;
        self.sum.0 += v;
        self.n += 1;
    }

    pub fn merge(&self, other: &Estimate) -> Estimate {
        let mut out = self.clone();
        out.sum.add(&other.sum);
        out.sum_sq += &other.sum_sq;
        out.n += other.n;
        out
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn sum(&self) -> &ExactSum {
        &self.sum
    }

    pub fn sum_sq(&self) -> f64 {
        to_f64_scaled(&self.sum_sq, 2 * SCALE_BITS as i64)
    }

    /// NaN when empty.
    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        self.sum.to_f64() / self.n as f64
    }

    /// Unbiased sample variance from the exact sums; NaN below two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        let n = BigInt::from(self.n);
        // (n S2 - S1^2) / (n (n-1)), both terms in 2^-2148 units
        let num = &n * &self.sum_sq - &self.sum.0 * &self.sum.0;
        let num = to_f64_scaled(&num, 2 * SCALE_BITS as i64);
        let nf = self.n as f64;
        (num / (nf * (nf - 1.0))).max(0.0)
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// `std_dev / sqrt(n)`.
    pub fn stderr(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }

    pub fn ci95(&self) -> (f64, f64) {
        let m = self.mean();
        let h = 1.96 * self.stderr();
        (m - h, m + h)
    }

    pub fn ci95_low(&self) -> f64 {
        self.ci95().0
    }

    pub fn ci95_high(&self) -> f64 {
        self.ci95().1
    }
}

impl FromIterator<f64> for Estimate {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut e = Estimate::new();
        for x in iter {
            e.push(x);
        }
        e
    }
}

impl Extend<f64> for Estimate {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

/// Whether two estimates agree within `k` combined standard errors.
pub fn agree_within(a: &Estimate, b: &Estimate, k: f64) -> bool {
    let combined = (a.stderr().powi(2) + b.stderr().powi(2)).sqrt();
    (a.mean() - b.mean()).abs() <= k * combined
}
