//! Simulated normalized floating-point system (SPF): exact integer-mantissa
//! values, rounded dot products in single and double accumulation, exponent
//! statistics over the nonzeros, and the four matrix-equilibration methods.

use crate::dense::DenseMat;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundMode {
    Truncation,
    Rounding,
}

/// Normalized base-b, t-digit floating-point system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpSystem {
    pub base: u32,
    pub digits: u32,
    pub mode: RoundMode,
    pub emax: i32,
}

impl FpSystem {
    pub fn new(base: u32, digits: u32, mode: RoundMode) -> Self {
        assert!(base >= 2 && digits >= 1);
        FpSystem { base, digits, mode, emax: 99 }
    }

    /// Unit roundoff u = b^(1-t), halved under rounding.
    pub fn unit_roundoff(&self) -> f64 {
        let u = (self.base as f64).powi(1 - self.digits as i32);
        match self.mode {
            RoundMode::Truncation => u,
            RoundMode::Rounding => u / 2.0,
        }
    }

    /// Unit roundoff of the companion 2t-digit double-precision system.
    pub fn unit_roundoff_double(&self) -> f64 {
        let u = (self.base as f64).powi(1 - 2 * (self.digits as i32));
        match self.mode {
            RoundMode::Truncation => u,
            RoundMode::Rounding => u / 2.0,
        }
    }

    /// Normalized-form exponent: the unique e with b^(e-1) <= |x| < b^e.
    pub fn exponent(&self, x: f64) -> i32 {
        assert!(x != 0.0 && x.is_finite());
        let b = self.base as f64;
        let mut e = x.abs().log(b).floor() as i32 + 1;
        // guard against log rounding at powers of the base
        while x.abs() >= b.powi(e) {
            e += 1;
        }
        while x.abs() < b.powi(e - 1) {
            e -= 1;
        }
        e
    }

    /// Rounds a real to the t-digit system.
    pub fn fl(&self, x: f64) -> Result<Spf> {
        Spf::from_f64(x, self, self.digits)
    }

    /// Rounds a real to the 2t-digit double-precision companion.
    pub fn fld(&self, x: f64) -> Result<Spf> {
        Spf::from_f64(x, self, 2 * self.digits)
    }
}

/// An SPF value: `sign · mant · b^(expo - digits)` with the integer
/// mantissa normalized to `b^(digits-1) <= mant < b^digits` (or zero).
/// Arithmetic on mantissas is exact; rounding happens once per operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Spf {
    pub mant: i64,
    pub expo: i32,
    pub digits: u32,
}

fn pow_i128(b: u32, k: u32) -> i128 {
    (0..k).fold(1i128, |acc, _| acc * b as i128)
}

impl Spf {
    pub fn zero(digits: u32) -> Self {
        Spf { mant: 0, expo: 0, digits }
    }

    pub fn is_zero(&self) -> bool {
        self.mant == 0
    }

    pub fn to_f64(&self, sys: &FpSystem) -> f64 {
        self.mant as f64 * (sys.base as f64).powi(self.expo - self.digits as i32)
    }

    /// Builds from an exact integer mantissa at scale `b^(unit_expo)`:
    /// value = m · b^unit_expo, normalized and rounded to `digits`.
    fn from_int(
        m: i128,
        unit_expo: i32,
        sys: &FpSystem,
        digits: u32,
        exact_input: bool,
    ) -> Result<Spf> {
        if m == 0 {
            return Ok(Spf::zero(digits));
        }
        let b = sys.base as i128;
        let neg = m < 0;
        let mut mag = m.unsigned_abs();
        // digit count of mag
        let mut ndigits = 0u32;
        let mut probe = mag;
        while probe > 0 {
            probe /= b as u128;
            ndigits += 1;
        }
        let expo;
        let mant: i64;
        if ndigits <= digits {
            let shift = digits - ndigits;
            mag *= pow_i128(sys.base, shift) as u128;
            expo = unit_expo + ndigits as i32;
            mant = mag as i64;
        } else {
            let drop = ndigits - digits;
            let div = pow_i128(sys.base, drop) as u128;
            let q = mag / div;
            let r = mag % div;
            let rounded = match sys.mode {
                _ if exact_input && r == 0 => q,
                RoundMode::Truncation => q,
                RoundMode::Rounding => {
                    if 2 * r >= div {
                        q + 1
                    } else {
                        q
                    }
                }
            };
            if rounded == pow_i128(sys.base, digits) as u128 {
                // carry ripple: mantissa grew a digit
                return Spf::from_int(
                    if neg { -(rounded as i128) } else { rounded as i128 },
                    unit_expo + drop as i32,
                    sys,
                    digits,
                    true,
                );
            }
            expo = unit_expo + ndigits as i32;
            mant = rounded as i64;
        }
        if expo > sys.emax {
            return Err(Error::Overflow { exponent: expo });
        }
        Ok(Spf { mant: if neg { -mant } else { mant }, expo, digits })
    }

    /// Rounds an f64 into the system. Binary representation noise far below
    /// the target resolution is snapped away first, so decimal literals
    /// behave as the exact SPF values they denote.
    pub fn from_f64(x: f64, sys: &FpSystem, digits: u32) -> Result<Spf> {
        if x == 0.0 {
            return Ok(Spf::zero(digits));
        }
        let b = sys.base as f64;
        let e = sys.exponent(x);
        let scaled = x.abs() * b.powi(digits as i32 - e);
        let nearest = scaled.round();
        let mant = if (scaled - nearest).abs() <= scaled * 1e-12 {
            // exactly representable up to f64 noise
            nearest
        } else {
            match sys.mode {
                RoundMode::Truncation => scaled.trunc(),
                RoundMode::Rounding => scaled.round(),
            }
        };
        let m = if x < 0.0 { -(mant as i128) } else { mant as i128 };
        Spf::from_int(m, e - digits as i32, sys, digits, true)
    }

    /// Exact product, rounded once to `target` digits.
    pub fn mul(&self, other: &Spf, sys: &FpSystem, target: u32) -> Result<Spf> {
        if self.is_zero() || other.is_zero() {
            return Ok(Spf::zero(target));
        }
        let m = self.mant as i128 * other.mant as i128;
        let unit = (self.expo - self.digits as i32) + (other.expo - other.digits as i32);
        Spf::from_int(m, unit, sys, target, true)
    }

    /// Exact sum, rounded once to `target` digits.
    pub fn add(&self, other: &Spf, sys: &FpSystem, target: u32) -> Result<Spf> {
        if self.is_zero() {
            return Spf::from_int(
                other.mant as i128,
                other.expo - other.digits as i32,
                sys,
                target,
                true,
            );
        }
        if other.is_zero() {
            return Spf::from_int(
                self.mant as i128,
                self.expo - self.digits as i32,
                sys,
                target,
                true,
            );
        }
        let ua = self.expo - self.digits as i32;
        let ub = other.expo - other.digits as i32;
        let unit = ua.min(ub);
        let (da, db) = ((ua - unit) as u32, (ub - unit) as u32);
        if da > 36 || db > 36 {
            // the smaller addend is far below one unit of the larger
            let big = if da > db { self } else { other };
            return Spf::from_int(
                big.mant as i128,
                if da > db { ua } else { ub },
                sys,
                target,
                false,
            );
        }
        let m = self.mant as i128 * pow_i128(sys.base, da)
            + other.mant as i128 * pow_i128(sys.base, db);
        Spf::from_int(m, unit, sys, target, true)
    }
}

/// fl-accumulated inner product: products and running sums are rounded to
/// t digits, nested from i = 1 upward.
pub fn dot_fl(x: &[f64], y: &[f64], sys: &FpSystem) -> Result<Spf> {
    dot_impl(x, y, sys, sys.digits, sys.digits)
}

/// fld accumulation: exact 2t-digit products, sums rounded to 2t digits.
pub fn dot_fld(x: &[f64], y: &[f64], sys: &FpSystem) -> Result<Spf> {
    dot_impl(x, y, sys, 2 * sys.digits, 2 * sys.digits)
}

/// fl(fld(x·y)): double accumulation with one final rounding to t digits.
pub fn fl_of_fld(x: &[f64], y: &[f64], sys: &FpSystem) -> Result<Spf> {
    let d = dot_fld(x, y, sys)?;
    Spf::from_int(d.mant as i128, d.expo - d.digits as i32, sys, sys.digits, true)
}

fn dot_impl(x: &[f64], y: &[f64], sys: &FpSystem, prod_digits: u32, sum_digits: u32) -> Result<Spf> {
    assert_eq!(x.len(), y.len());
    let mut acc = Spf::zero(sum_digits);
    for i in 0..x.len() {
        let xi = Spf::from_f64(x[i], sys, sys.digits)?;
        let yi = Spf::from_f64(y[i], sys, sys.digits)?;
        let p = xi.mul(&yi, sys, prod_digits)?;
        acc = if i == 0 { p } else { acc.add(&p, sys, sum_digits)? };
    }
    if acc.digits != sum_digits {
        acc = Spf::from_int(acc.mant as i128, acc.expo - acc.digits as i32, sys, sum_digits, true)?;
    }
    Ok(acc)
}

/// Exponent statistics over the nonzeros.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpoStats {
    /// Mean exponent.
    pub mex: f64,
    /// Variance of the exponents (sum of squared deviations / enn).
    pub vex: f64,
    /// Sum of squared deviations (the variant the worked tables print).
    pub vex_sum: f64,
    /// max - min exponent.
    pub diam: i32,
}

pub fn expo_stats(a: &DenseMat<f64>, sys: &FpSystem) -> Result<ExpoStats> {
    let exps: Vec<i32> =
        a.iter_nonzero().map(|(_, _, v)| sys.exponent(v)).collect();
    if exps.is_empty() {
        return Err(Error::Invalid("expo_stats of a zero matrix".into()));
    }
    let n = exps.len() as f64;
    let mex = exps.iter().map(|&e| e as f64).sum::<f64>() / n;
    let vex_sum = exps.iter().map(|&e| (e as f64 - mex).powi(2)).sum::<f64>();
    let diam = exps.iter().max().unwrap() - exps.iter().min().unwrap();
    Ok(ExpoStats { mex, vex: vex_sum / n, vex_sum, diam })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleMethod {
    VarReduce,
    GeoMean,
    MaxMin,
    InfNorm,
}

impl ScaleMethod {
    pub fn parse(s: &str) -> Option<ScaleMethod> {
        match s.to_ascii_lowercase().as_str() {
            "var_reduce" | "var-reduce" | "varreduce" => Some(ScaleMethod::VarReduce),
            "geo_mean" | "geo-mean" | "geomean" => Some(ScaleMethod::GeoMean),
            "maxmin" | "max-min" | "max_min" => Some(ScaleMethod::MaxMin),
            "infnorm" | "inf-norm" | "inf_norm" => Some(ScaleMethod::InfNorm),
            _ => None,
        }
    }
}

/// Integer base-power scaling: row factors b^e_i, column factors b^d_j;
/// mantissas are untouched, exponents shift by e_i + d_j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scaling {
    pub row_exponents: Vec<i32>,
    pub col_exponents: Vec<i32>,
}

impl Scaling {
    /// The scaled matrix EAD (in working precision).
    pub fn apply(&self, a: &DenseMat<f64>, sys: &FpSystem) -> DenseMat<f64> {
        let b = sys.base as f64;
        let mut out = a.clone();
        for i in 1..=a.rows() {
            for j in 1..=a.cols() {
                let v = a.get(i, j);
                if v != 0.0 {
                    out.set(i, j, v * b.powi(self.row_exponents[i - 1] + self.col_exponents[j - 1]));
                }
            }
        }
        out
    }

    /// The scaled exponent grid (None at zeros): expo(A) + e_i + d_j.
    pub fn exponent_grid(&self, a: &DenseMat<f64>, sys: &FpSystem) -> Vec<Vec<Option<i32>>> {
        (1..=a.rows())
            .map(|i| {
                (1..=a.cols())
                    .map(|j| {
                        let v = a.get(i, j);
                        (v != 0.0).then(|| {
                            sys.exponent(v) + self.row_exponents[i - 1] + self.col_exponents[j - 1]
                        })
                    })
                    .collect()
            })
            .collect()
    }
}

/// int() of the scaling formulas: round half away from zero.
pub fn int_round(x: f64) -> i32 {
    if x >= 0.0 {
        (x + 0.5).floor() as i32
    } else {
        (x - 0.5).ceil() as i32
    }
}

/// Computes one of the four equilibration methods. All statistics run over
/// the nonzeros; rows/columns must each carry at least one entry.
pub fn scale(a: &DenseMat<f64>, method: ScaleMethod, sys: &FpSystem) -> Result<Scaling> {
    let (m, n) = (a.rows(), a.cols());
    let expo = |i: usize, j: usize| -> Option<i32> {
        let v = a.get(i, j);
        (v != 0.0).then(|| sys.exponent(v))
    };
    for i in 1..=m {
        if (1..=n).all(|j| a.get(i, j) == 0.0) {
            return Err(Error::EmptyLine { row: true, index: i });
        }
    }
    for j in 1..=n {
        if (1..=m).all(|i| a.get(i, j) == 0.0) {
            return Err(Error::EmptyLine { row: false, index: j });
        }
    }

    let mut e = vec![0i32; m];
    let mut d = vec![0i32; n];
    match method {
        ScaleMethod::VarReduce => {
            // dense approximation of the variance-reduction optimum; zero
            // entries enter the row/column averages with exponent 0
            let mex = expo_stats(a, sys)?.mex;
            for i in 1..=m {
                let s: i32 = (1..=n).filter_map(|j| expo(i, j)).sum();
                e[i - 1] = int_round((n as f64 * mex - s as f64) / n as f64);
            }
            for j in 1..=n {
                let s: i32 = (1..=m).filter_map(|i| expo(i, j)).sum();
                d[j - 1] = int_round((m as f64 * mex - s as f64) / m as f64);
            }
        }
        ScaleMethod::GeoMean => {
            for j in 1..=n {
                let exps: Vec<i32> = (1..=m).filter_map(|i| expo(i, j)).collect();
                d[j - 1] = -int_round(exps.iter().sum::<i32>() as f64 / exps.len() as f64);
            }
            for i in 1..=m {
                let exps: Vec<i32> =
                    (1..=n).filter_map(|j| expo(i, j).map(|x| x + d[j - 1])).collect();
                e[i - 1] = -int_round(exps.iter().sum::<i32>() as f64 / exps.len() as f64);
            }
        }
        ScaleMethod::MaxMin => {
            for j in 1..=n {
                let exps: Vec<i32> = (1..=m).filter_map(|i| expo(i, j)).collect();
                let (mx, mn) = (*exps.iter().max().unwrap(), *exps.iter().min().unwrap());
                d[j - 1] = -int_round((mx + mn) as f64 / 2.0);
            }
            for i in 1..=m {
                let exps: Vec<i32> =
                    (1..=n).filter_map(|j| expo(i, j).map(|x| x + d[j - 1])).collect();
                let (mx, mn) = (*exps.iter().max().unwrap(), *exps.iter().min().unwrap());
                e[i - 1] = -int_round((mx + mn) as f64 / 2.0);
            }
        }
        ScaleMethod::InfNorm => {
            // columns first, then rows, matching the worked-example grids
            for j in 1..=n {
                d[j - 1] = -(1..=m).filter_map(|i| expo(i, j)).max().unwrap();
            }
            for i in 1..=m {
                e[i - 1] = -(1..=n).filter_map(|j| expo(i, j).map(|x| x + d[j - 1])).max().unwrap();
            }
        }
    }
    Ok(Scaling { row_exponents: e, col_exponents: d })
}
