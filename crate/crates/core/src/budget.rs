//! Closed-form operation budgets and per-call checks against them.
//!
//! Instrumented routines push a [`CallRecord`] (tag, parameters, measured
//! operations) onto the field's call log when logging is enabled. [`check`]
//! turns a log into [`BoundReport`]s.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `sum_{i=b+1}^{a} i`.
pub fn s1(a: i64, b: i64) -> Result<BigInt> {
    if a < b {
        return Err(Error::InvalidBoundParams(format!(
            "s1 requires a >= b, got a={a}, b={b}"
        )));
    }
    let tri = |x: i64| BigInt::from(x) * BigInt::from(x + 1) / 2;
    Ok(tri(a) - tri(b))
}

/// `sum_{i=b+1}^{a} i^2`.
pub fn s2(a: i64, b: i64) -> Result<BigInt> {
    if a < b {
        return Err(Error::InvalidBoundParams(format!(
            "s2 requires a >= b, got a={a}, b={b}"
        )));
    }
    let sq = |x: i64| {
        let x = BigInt::from(x);
        &x * (&x + 1) * (2 * &x + 1) / 6
    };
    Ok(sq(a) - sq(b))
}

/// Which algorithm a bound belongs to.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundTag {
    /// `2(m+1)(n-m+1)` for dividing degree `n` by degree `m`.
    Divmod,
    /// `2(m+1)(n+1)`.
    Gcd,
    /// Clean step that finds the vector in the row space: `2mn`.
    CleanFound,
    /// Clean step that extends the sequence: `(2m+1)n + (m+1)^2 + 1`.
    CleanExtend,
    RelativeOrdPoly,
    /// `(33/6)n^3 + 4n^2 + (3/2)n`.
    CharPoly,
    /// `2mn` for a length-`m` vector times an `m x n` matrix (`m = n` when absent).
    MatVec,
    /// `2n^3`.
    MatMul,
    /// `sum_r 2 s_r`.
    SparseApply,
    /// `n^3`.
    NullspaceDim,
    /// Exact per-block sum `sum_j 4d_j^2 + 3d_j s_j + 2d_j sum_{r<=j} s_r`.
    OrdPoly,
    /// `(z/2 + 9) s_z^2`.
    OrdPolySimple,
    /// Spin and order-polynomial phases of the Monte Carlo algorithm:
    /// charpoly bound plus `sum_{i<=u} (i/2 + 9) s_i^2`.
    MinPolyMc,
    /// Extra `k - u` fold steps: `s_k^2 (k-u)(k+u+37)/4`.
    VerifyLoop,
    /// All `k` fold steps when `k <= sqrt(n)`: `n^3/4 + (37/4) n^(5/2)`.
    LoopSmallK,
    /// `d n (k-u)(k+u+4)`.
    VerifyEval,
    /// `2 d n^3`.
    EvalAtMatrix,
    /// `2 d n^3 + 2 n^3 ceil(log2 e)`.
    EvalAtMatrixPower,
    /// `n^3 sum_i (2 deg q_i + 2 ceil(log2 f_i) + 1)`.
    VerifyNullspace,
}

impl BoundTag {
    pub const ALL: [BoundTag; 19] = [
        BoundTag::Divmod,
        BoundTag::Gcd,
        BoundTag::CleanFound,
        BoundTag::CleanExtend,
        BoundTag::RelativeOrdPoly,
        BoundTag::CharPoly,
        BoundTag::MatVec,
        BoundTag::MatMul,
        BoundTag::SparseApply,
        BoundTag::NullspaceDim,
        BoundTag::OrdPoly,
        BoundTag::OrdPolySimple,
        BoundTag::MinPolyMc,
        BoundTag::VerifyLoop,
        BoundTag::LoopSmallK,
        BoundTag::VerifyEval,
        BoundTag::EvalAtMatrix,
        BoundTag::EvalAtMatrixPower,
        BoundTag::VerifyNullspace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundTag::Divmod => "divmod",
            BoundTag::Gcd => "gcd",
            BoundTag::CleanFound => "clean_found",
            BoundTag::CleanExtend => "clean_extend",
            BoundTag::RelativeOrdPoly => "relative_ord_poly",
            BoundTag::CharPoly => "char_poly",
            BoundTag::MatVec => "mat_vec",
            BoundTag::MatMul => "mat_mul",
            BoundTag::SparseApply => "sparse_apply",
            BoundTag::NullspaceDim => "nullspace_dim",
            BoundTag::OrdPoly => "ord_poly",
            BoundTag::OrdPolySimple => "ord_poly_simple",
            BoundTag::MinPolyMc => "min_poly_mc",
            BoundTag::VerifyLoop => "verify_loop",
            BoundTag::LoopSmallK => "loop_small_k",
            BoundTag::VerifyEval => "verify_eval",
            BoundTag::EvalAtMatrix => "eval_at_matrix",
            BoundTag::EvalAtMatrixPower => "eval_at_matrix_power",
            BoundTag::VerifyNullspace => "verify_nullspace",
        }
    }
}

impl fmt::Display for BoundTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<BoundTag> {
        BoundTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::UnknownBoundTag(s.to_string()))
    }
}

/// Parameters for a bound; each tag reads the subset it needs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<u64>,
    /// Block degrees `d_1, d_2, ...`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<u64>>,
    /// Partial sums `s_1, s_2, ...`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sums: Option<Vec<u64>>,
    /// `(deg q_i, f_i)` pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<(u64, u64)>>,
}

impl BoundParams {
    pub fn new() -> BoundParams {
        BoundParams::default()
    }

    pub fn n(mut self, v: u64) -> Self {
        self.n = Some(v);
        self
    }

    pub fn m(mut self, v: u64) -> Self {
        self.m = Some(v);
        self
    }

    pub fn d(mut self, v: u64) -> Self {
        self.d = Some(v);
        self
    }

    pub fn e(mut self, v: u64) -> Self {
        self.e = Some(v);
        self
    }

    pub fn k(mut self, v: u64) -> Self {
        self.k = Some(v);
        self
    }

    pub fn u(mut self, v: u64) -> Self {
        self.u = Some(v);
        self
    }

    pub fn degrees(mut self, v: Vec<u64>) -> Self {
        self.degrees = Some(v);
        self
    }

    pub fn sums(mut self, v: Vec<u64>) -> Self {
        self.sums = Some(v);
        self
    }

    pub fn factors(mut self, v: Vec<(u64, u64)>) -> Self {
        self.factors = Some(v);
        self
    }
}

/// One instrumented call.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallRecord {
    pub tag: BoundTag,
    pub params: BoundParams,
    pub measured: u64,
}

fn need<T: Clone>(v: &Option<T>, tag: BoundTag, param: &'static str) -> Result<T> {
    v.clone().ok_or(Error::MissingBoundParam {
        tag: tag.name(),
        param,
    })
}

fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

/// `ceil(num / den)` for non-negative `num`, positive `den`.
fn ceil_div(num: BigInt, den: u64) -> BigInt {
    let den = big(den);
    (num + &den - 1) / den
}

pub fn ceil_log2(e: u64) -> u64 {
    if e <= 1 {
        0
    } else {
        64 - (e - 1).leading_zeros() as u64
    }
}

fn partial_sums(degrees: &[u64]) -> Vec<u64> {
    degrees
        .iter()
        .scan(0u64, |acc, &d| {
            *acc += d;
            Some(*acc)
        })
        .collect()
}

/// `(33/6)n^3 + 4n^2 + (3/2)n`, rounded up.
pub fn char_poly_bound(n: u64) -> BigInt {
    let n = big(n);
    ceil_div(33 * n.pow(3) + 24 * n.pow(2) + 9 * &n, 6)
}

/// `ceil((z/2 + 9) s^2)` summed over `z = 1..=sums.len()` with `s = s_z`.
fn ord_poly_simple_sum(sums: &[u64]) -> BigInt {
    sums.iter()
        .enumerate()
        .map(|(i, &s)| ceil_div(big(i as u64 + 1 + 18) * big(s).pow(2), 2))
        .fold(BigInt::zero(), |a, b| a + b)
}

/// Exact value of the bound, rounded up where fractional.
pub fn bound_for(tag: BoundTag, p: &BoundParams) -> Result<BigInt> {
    let n = || need(&p.n, tag, "n");
    let m = || need(&p.m, tag, "m");
    let d = || need(&p.d, tag, "d");
    Ok(match tag {
        BoundTag::Divmod => {
            let (m, n) = (m()?, n()?);
            if n < m {
                BigInt::zero()
            } else {
                2 * big(m + 1) * big(n - m + 1)
            }
        }
        BoundTag::Gcd => 2 * big(m()? + 1) * big(n()? + 1),
        BoundTag::CleanFound => 2 * big(m()?) * big(n()?),
        BoundTag::CleanExtend => {
            let (m, n) = (m()?, n()?);
            big(2 * m + 1) * big(n) + big(m + 1).pow(2) + 1
        }
        BoundTag::RelativeOrdPoly => {
            let (n, m, d) = (n()? as i64, m()? as i64, d()? as i64);
            let (bn, bd) = (BigInt::from(n), BigInt::from(d));
            2 * &bd * &bn * &bn
                + (&bn + 2) * &bd
                + 2 * BigInt::from(m + d) * &bn
                + 2 * (&bn + 1) * s1(m + d - 1, m - 1)?
                + s2(m + d - 1, m - 1)?
                + 2 * s1(m + d, 0)?
        }
        BoundTag::CharPoly => char_poly_bound(n()?),
        BoundTag::MatVec => {
            let n = n()?;
            2 * big(p.m.unwrap_or(n)) * big(n)
        }
        BoundTag::MatMul => 2 * big(n()?).pow(3),
        BoundTag::SparseApply => {
            let sums = need(&p.sums, tag, "sums")?;
            sums.iter()
                .map(|&s| 2 * big(s))
                .fold(BigInt::zero(), |a, b| a + b)
        }
        BoundTag::NullspaceDim => big(n()?).pow(3),
        BoundTag::OrdPoly => {
            let degrees = need(&p.degrees, tag, "degrees")?;
            let sums = partial_sums(&degrees);
            let mut total = BigInt::zero();
            let mut sum_s = BigInt::zero();
            for (&dj, &sj) in degrees.iter().zip(&sums) {
                sum_s += big(sj);
                total += 4 * big(dj).pow(2) + 3 * big(dj) * big(sj) + 2 * big(dj) * &sum_s;
            }
            total
        }
        BoundTag::OrdPolySimple => {
            let degrees = need(&p.degrees, tag, "degrees")?;
            let z = degrees.len() as u64;
            let sz: u64 = degrees.iter().sum();
            ceil_div(big(z + 18) * big(sz).pow(2), 2)
        }
        BoundTag::MinPolyMc => {
            let n = n()?;
            let u = need(&p.u, tag, "u")? as usize;
            let degrees = need(&p.degrees, tag, "degrees")?;
            if u > degrees.len() {
                return Err(Error::InvalidBoundParams(format!(
                    "u = {u} exceeds k = {}",
                    degrees.len()
                )));
            }
            let sums = partial_sums(&degrees);
            char_poly_bound(n) + ord_poly_simple_sum(&sums[..u])
        }
        BoundTag::VerifyLoop => {
            let (k, u) = (need(&p.k, tag, "k")?, need(&p.u, tag, "u")?);
            let degrees = need(&p.degrees, tag, "degrees")?;
            if u > k {
                return Err(Error::InvalidBoundParams(format!(
                    "u = {u} exceeds k = {k}"
                )));
            }
            let sk: u64 = degrees.iter().sum();
            ceil_div(big(sk).pow(2) * big(k - u) * big(k + u + 37), 4)
        }
        BoundTag::LoopSmallK => {
            let n = big(n()?);
            // 37 n^(5/2) = sqrt(1369 n^5), rounded up
            let rad: BigInt = n.pow(5) * 1369u32;
            let mut root = rad.sqrt();
            if &root * &root < rad {
                root += 1;
            }
            ceil_div(n.pow(3) + root, 4)
        }
        BoundTag::VerifyEval => {
            let (n, d) = (n()?, d()?);
            let (k, u) = (need(&p.k, tag, "k")?, need(&p.u, tag, "u")?);
            if u > k {
                return Err(Error::InvalidBoundParams(format!(
                    "u = {u} exceeds k = {k}"
                )));
            }
            big(d) * big(n) * big(k - u) * big(k + u + 4)
        }
        BoundTag::EvalAtMatrix => 2 * big(d()?) * big(n()?).pow(3),
        BoundTag::EvalAtMatrixPower => {
            let n3 = big(n()?).pow(3);
            let e = need(&p.e, tag, "e")?;
            2 * big(d()?) * &n3 + 2 * &n3 * big(ceil_log2(e))
        }
        BoundTag::VerifyNullspace => {
            let n3 = big(n()?).pow(3);
            let factors = need(&p.factors, tag, "factors")?;
            let s: u64 = factors
                .iter()
                .map(|&(deg, f)| 2 * deg + 2 * ceil_log2(f) + 1)
                .sum();
            n3 * big(s)
        }
    })
}

/// A measured call compared against its bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub tag: BoundTag,
    pub params: BoundParams,
    #[serde(serialize_with = "ser_big")]
    pub bound: BigInt,
    pub measured: u64,
    #[serde(serialize_with = "ser_big")]
    pub slack: BigInt,
}

fn ser_big<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match i64::try_from(v) {
        Ok(x) => s.serialize_i64(x),
        Err(_) => s.serialize_str(&v.to_string()),
    }
}

impl BoundReport {
    pub fn new(tag: BoundTag, params: BoundParams, measured: u64) -> Result<BoundReport> {
        let bound = bound_for(tag, &params)?;
        let slack = &bound - big(measured);
        Ok(BoundReport {
            tag,
            params,
            bound,
            measured,
            slack,
        })
    }

    pub fn passed(&self) -> bool {
        !self.slack.is_negative()
    }
}

/// Tags checked in addition to the one recorded; an order-polynomial call is
/// held to both the exact per-block sum and the simplified form.
fn companions(tag: BoundTag) -> &'static [BoundTag] {
    match tag {
        BoundTag::OrdPoly => &[BoundTag::OrdPoly, BoundTag::OrdPolySimple],
        BoundTag::Divmod => &[BoundTag::Divmod],
        BoundTag::Gcd => &[BoundTag::Gcd],
        BoundTag::CleanFound => &[BoundTag::CleanFound],
        BoundTag::CleanExtend => &[BoundTag::CleanExtend],
        BoundTag::RelativeOrdPoly => &[BoundTag::RelativeOrdPoly],
        BoundTag::CharPoly => &[BoundTag::CharPoly],
        BoundTag::MatVec => &[BoundTag::MatVec],
        BoundTag::MatMul => &[BoundTag::MatMul],
        BoundTag::SparseApply => &[BoundTag::SparseApply],
        BoundTag::NullspaceDim => &[BoundTag::NullspaceDim],
        BoundTag::OrdPolySimple => &[BoundTag::OrdPolySimple],
        BoundTag::MinPolyMc => &[BoundTag::MinPolyMc],
        BoundTag::VerifyLoop => &[BoundTag::VerifyLoop],
        BoundTag::LoopSmallK => &[BoundTag::LoopSmallK],
        BoundTag::VerifyEval => &[BoundTag::VerifyEval],
        BoundTag::EvalAtMatrix => &[BoundTag::EvalAtMatrix],
        BoundTag::EvalAtMatrixPower => &[BoundTag::EvalAtMatrixPower],
        BoundTag::VerifyNullspace => &[BoundTag::VerifyNullspace],
    }
}

/// Evaluates every record against its bound(s).
pub fn check(records: &[CallRecord]) -> Result<Vec<BoundReport>> {
    let mut out = Vec::with_capacity(records.len());
    for r in records {
        for &tag in companions(r.tag) {
            out.push(BoundReport::new(tag, r.params.clone(), r.measured)?);
        }
    }
    Ok(out)
}

/// Per-tag totals over a set of reports.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BoundSummary {
    pub tag: String,
    pub calls: u64,
    pub violations: u64,
    pub min_slack: Option<i64>,
}

pub fn summarize(reports: &[BoundReport]) -> Vec<BoundSummary> {
    let mut out: Vec<BoundSummary> = Vec::new();
    for tag in BoundTag::ALL {
        let mine: Vec<&BoundReport> = reports.iter().filter(|r| r.tag == tag).collect();
        if mine.is_empty() {
            continue;
        }
        let violations = mine.iter().filter(|r| !r.passed()).count() as u64;
        let min_slack = mine
            .iter()
            .map(|r| &r.slack)
            .min()
            .and_then(|s| i64::try_from(s).ok());
        out.push(BoundSummary {
            tag: tag.name().to_string(),
            calls: mine.len() as u64,
            violations,
            min_slack,
        });
    }
    out
}

/// Least `n` from which `(33/6)n^3 + 4n^2 + (3/2)n < 6n^3` holds for all larger `n`.
pub fn char_poly_crossover() -> u64 {
    let below = |n: u64| char_poly_bound(n) < 6 * big(n).pow(3);
    // 33n^3 + 24n^2 + 9n < 36n^3  <=>  3n^2 > 24n + 9, monotone once true
    let mut n = 1;
    while !below(n) {
        n += 1;
    }
    n
}

/// Whether `sum s_j <= n(n+1)/2` and `sum s_j(s_j+1) <= n(n+1)(n+2)/3` for the
/// partial sums of a composition of `n`.
pub fn composition_estimates_hold(degrees: &[u64]) -> bool {
    let n: u64 = degrees.iter().sum();
    let sums = partial_sums(degrees);
    let a: BigInt = sums
        .iter()
        .map(|&s| big(s))
        .fold(BigInt::zero(), |x, y| x + y);
    let b: BigInt = sums
        .iter()
        .map(|&s| big(s) * big(s + 1))
        .fold(BigInt::zero(), |x, y| x + y);
    a <= big(n) * big(n + 1) / 2 && 3 * b <= big(n) * big(n + 1) * big(n + 2)
}
