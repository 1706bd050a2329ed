//! Absolute order polynomials over the sparse conjugate, the Monte Carlo
//! minimal polynomial, and its failure-probability calculator.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::budget::{BoundParams, BoundTag};
use crate::error::{Error, Result};
use crate::gf::{Elem, Field, OpCounts};
use crate::linalg::{unit_vector, Matrix, SparseConjugate};
use crate::poly::{
    factorize, gcd, pow, FactorOptions, FactoredPoly, Poly, DEFAULT_BERLEKAMP_LIMIT,
};
use crate::rng::SeededRng;
use crate::spin::{char_poly, CharPolyData};

/// A failure probability `0 < eps < 1/2`, kept exact.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Epsilon(BigRational);

impl Epsilon {
    pub fn new(r: BigRational) -> Result<Epsilon> {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        if r <= BigRational::zero() || r >= half {
            return Err(Error::EpsilonOutOfRange(r.to_string()));
        }
        Ok(Epsilon(r))
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Epsilon> {
        if den == 0 {
            return Err(Error::EpsilonOutOfRange(format!("{num}/{den}")));
        }
        Epsilon::new(BigRational::new(num.into(), den.into()))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    /// `eps / k` for a positive integer `k`.
    pub fn divided(&self, k: u64) -> BigRational {
        &self.0 / BigRational::from_integer(BigInt::from(k.max(1)))
    }
}

impl Default for Epsilon {
    fn default() -> Self {
        Epsilon(BigRational::new(1.into(), 100.into()))
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Accepts `a/b` or a decimal such as `0.01`.
impl FromStr for Epsilon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Epsilon> {
        let s = s.trim();
        let bad = || Error::EpsilonOutOfRange(s.to_string());
        let r = if let Some((a, b)) = s.split_once('/') {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            BigRational::new(a, b)
        } else {
            let (int, frac) = s.split_once('.').unwrap_or((s, ""));
            if (int.is_empty() && frac.is_empty())
                || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
            {
                return Err(bad());
            }
            let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
            BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32))
        };
        Epsilon::new(r)
    }
}

impl Serialize for Epsilon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `sum_i q^(-u deg_i)`, exactly.
pub fn failure_bound(degrees: &[u32], u: u32, q: u32) -> BigRational {
    let q = BigInt::from(q);
    degrees.iter().fold(BigRational::zero(), |acc, &d| {
        acc + BigRational::new(BigInt::one(), q.pow(u * d))
    })
}

/// Least `u >= 1` with `sum_i q^(-u deg_i) <= eps`.
pub fn required_u(degrees: &[u32], q: u32, eps: &BigRational) -> Result<u32> {
    if degrees.is_empty() || degrees.contains(&0) {
        return Err(Error::InvalidBoundParams(
            "required_u needs at least one factor of positive degree".into(),
        ));
    }
    if q < 2 || *eps <= BigRational::zero() {
        return Err(Error::EpsilonOutOfRange(eps.to_string()));
    }
    let mut u = 1;
    while failure_bound(degrees, u, q) > *eps {
        u += 1;
    }
    Ok(u)
}

/// Factorizations of every `p^(i)` together with the prime powers
/// `q_j^(e_ij)` used by the gcd step.
#[derive(Clone, Debug)]
pub struct FactoredBlocks {
    blocks: Vec<FactoredPoly>,
    powers: Vec<Vec<Poly>>,
}

impl FactoredBlocks {
    pub fn new(f: &Field, blocks: Vec<FactoredPoly>) -> FactoredBlocks {
        let powers = blocks
            .iter()
            .map(|b| {
                b.factors()
                    .iter()
                    .map(|(q, e)| pow(f, q, *e as u64))
                    .collect()
            })
            .collect();
        FactoredBlocks { blocks, powers }
    }

    /// Factorization of `p^(i)`, one-based.
    pub fn block(&self, i: usize) -> &FactoredPoly {
        &self.blocks[i - 1]
    }

    pub fn blocks(&self) -> &[FactoredPoly] {
        &self.blocks
    }

    /// lcm of all blocks.
    pub fn lcm(&self) -> FactoredPoly {
        self.blocks
            .iter()
            .fold(FactoredPoly::one(), |acc, b| acc.lcm(b))
    }

    /// Product of all blocks: the factored characteristic polynomial.
    pub fn product(&self) -> FactoredPoly {
        self.blocks
            .iter()
            .fold(FactoredPoly::one(), |acc, b| acc.product(b))
    }

    /// Degrees of the distinct irreducible factors across all blocks.
    pub fn distinct_degrees(&self) -> Vec<u32> {
        self.product().irreducible_degrees()
    }
}

/// Factors every `p^(i)`; `eps` is the total failure budget for the
/// randomized path.
pub fn factor_blocks(
    f: &Field,
    data: &CharPolyData,
    berlekamp_limit: u32,
    eps: &BigRational,
    rng: &mut SeededRng,
) -> Result<FactoredBlocks> {
    let per = eps / BigRational::from_integer(BigInt::from(data.k().max(1)));
    let opts = FactorOptions {
        berlekamp_limit,
        epsilon: per,
    };
    let blocks = data
        .factors
        .iter()
        .map(|p| factorize(f, p, &opts, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(FactoredBlocks::new(f, blocks))
}

/// `w g(M')` for monic `g`, with `w` and the result supported on the first
/// `s_i` coordinates. Horner form, one sparse product per degree.
pub(crate) fn apply_poly_prefix(
    f: &Field,
    conj: &SparseConjugate,
    w: &[Elem],
    g: &Poly,
    i: usize,
) -> Vec<Elem> {
    let c = g.coeffs();
    let mut acc = w.to_vec();
    for r in (0..c.len() - 1).rev() {
        let mut next = vec![Elem::ZERO; w.len()];
        conj.apply_prefix(f, &acc, &mut next, i);
        f.axpy(&mut next, c[r], w);
        acc = next;
    }
    acc
}

/// Order polynomial of `v` with respect to `Y M Y^-1`, as a list of factored
/// relative orders whose product is the answer. `v` must vanish past `s_z`.
pub fn ord_poly(
    f: &Field,
    data: &CharPolyData,
    blocks: &FactoredBlocks,
    z: usize,
    v: &[Elem],
) -> Result<Vec<FactoredPoly>> {
    let k = data.k();
    if z == 0 || z > k {
        return Err(Error::InvalidBoundParams(format!(
            "block index {z} outside 1..={k}"
        )));
    }
    let n = data.n();
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    let sums = data.partial_sums();
    if v[sums[z]..].iter().any(|e| !e.is_zero()) {
        return Err(Error::SupportViolation { bound: sums[z] });
    }
    let start = f.ops();
    let mut w = v[..sums[z]].to_vec();
    let mut out = Vec::new();
    for i in (1..=z).rev() {
        let (lo, hi) = (sums[i - 1], sums[i]);
        let h = Poly::new(w[lo..hi].to_vec());
        if !h.is_zero() {
            let block = blocks.block(i);
            let ghat = if h.is_constant() {
                block.clone()
            } else {
                let mut pairs = Vec::with_capacity(block.len());
                for ((q, e), qe) in block.factors().iter().zip(&blocks.powers[i - 1]) {
                    let g = gcd(f, &h, qe)?;
                    let common = (g.deg0() / q.deg0()) as u32;
                    pairs.push((q.clone(), e - common));
                }
                FactoredPoly::from_pairs(pairs)
            };
            if i > 1 {
                for (q, mult) in ghat.factors() {
                    for _ in 0..*mult {
                        w = apply_poly_prefix(f, &data.conjugate, &w, q, i);
                    }
                }
                debug_assert!(w[lo..].iter().all(|e| e.is_zero()));
            }
            out.push(ghat);
        }
        w.truncate(lo);
    }
    f.record(
        BoundTag::OrdPoly,
        || BoundParams::new().degrees(data.degrees()[..z].iter().map(|&d| d as u64).collect()),
        f.ops() - start,
    );
    Ok(out)
}

/// `ord(e^(s_{i-1}+1))` under `Y M Y^-1`, i.e. the order of `v^(i)` under `M`.
pub fn spun_order(
    f: &Field,
    data: &CharPolyData,
    blocks: &FactoredBlocks,
    i: usize,
) -> Result<FactoredPoly> {
    let e = unit_vector(data.n(), data.partial_sums()[i - 1]);
    let parts = ord_poly(f, data, blocks, i, &e)?;
    Ok(parts
        .iter()
        .fold(FactoredPoly::one(), |acc, p| acc.product(p)))
}

/// Folds the orders of `v^(i)` for `i` in `range` into `acc` by lcm.
pub fn fold_orders(
    f: &Field,
    data: &CharPolyData,
    blocks: &FactoredBlocks,
    range: std::ops::RangeInclusive<usize>,
    mut acc: FactoredPoly,
) -> Result<FactoredPoly> {
    for i in range {
        acc = acc.lcm(&spun_order(f, data, blocks, i)?);
    }
    Ok(acc)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    True,
    Uncertain,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::True => "True",
            Status::Uncertain => "Uncertain",
        })
    }
}

/// Operation counts per phase.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PhaseOps {
    pub spin: OpCounts,
    pub factor: OpCounts,
    pub ordpoly: OpCounts,
}

#[derive(Clone, Debug)]
pub struct MinPolyOptions {
    pub epsilon: Epsilon,
    /// Fields up to this order factor deterministically.
    pub berlekamp_limit: u32,
}

impl Default for MinPolyOptions {
    fn default() -> Self {
        MinPolyOptions {
            epsilon: Epsilon::default(),
            berlekamp_limit: DEFAULT_BERLEKAMP_LIMIT,
        }
    }
}

impl MinPolyOptions {
    pub fn new(epsilon: Epsilon) -> MinPolyOptions {
        MinPolyOptions {
            epsilon,
            ..Default::default()
        }
    }

    fn randomized_factoring(&self, q: u32) -> bool {
        q > self.berlekamp_limit
    }

    /// Budgets for the multiplicity argument and for factoring.
    pub fn split(&self, q: u32) -> (BigRational, BigRational) {
        if self.randomized_factoring(q) {
            let half = self.epsilon.divided(2);
            (half.clone(), half)
        } else {
            (self.epsilon.value().clone(), BigRational::zero())
        }
    }
}

#[derive(Clone, Debug)]
pub struct MinPolyResult {
    pub status: Status,
    /// Candidate minimal polynomial.
    pub minpoly: FactoredPoly,
    /// Number of spun vectors whose orders were folded in.
    pub u: usize,
    pub epsilon: Epsilon,
    /// `sum q^(-u deg q_i)` when `u < k`, else zero.
    pub failure_bound: BigRational,
    pub ops: PhaseOps,
    pub data: CharPolyData,
    pub blocks: FactoredBlocks,
}

impl MinPolyResult {
    pub fn k(&self) -> usize {
        self.data.k()
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    pub fn seed(&self) -> u64 {
        self.data.seed
    }

    pub fn degrees(&self) -> &[usize] {
        self.data.degrees()
    }

    /// Factored characteristic polynomial.
    pub fn char_poly(&self) -> FactoredPoly {
        self.blocks.product()
    }
}

fn measured<T>(f: &Field, run: impl FnOnce() -> Result<T>) -> Result<(T, OpCounts)> {
    let start = f.ops();
    let out = run()?;
    Ok((out, f.ops() - start))
}

struct Prepared {
    data: CharPolyData,
    blocks: FactoredBlocks,
    spin: OpCounts,
    factor: OpCounts,
    u_eps: BigRational,
}

fn prepare(f: &Field, m: &Matrix, opts: &MinPolyOptions, rng: &mut SeededRng) -> Result<Prepared> {
    m.check_square()?;
    let (data, spin) = measured(f, || char_poly(f, m, rng))?;
    let (u_eps, fact_eps) = opts.split(f.order());
    let (blocks, factor) = measured(f, || {
        factor_blocks(f, &data, opts.berlekamp_limit, &fact_eps, rng)
    })?;
    Ok(Prepared {
        data,
        blocks,
        spin,
        factor,
        u_eps,
    })
}

fn finish(
    f: &Field,
    prep: Prepared,
    u: usize,
    minpoly: FactoredPoly,
    ordpoly: OpCounts,
    eps: &Epsilon,
) -> MinPolyResult {
    let Prepared {
        data,
        blocks,
        spin,
        factor,
        ..
    } = prep;
    let k = data.k();
    let n = data.n();
    let status = if u == k || minpoly.degree() == n {
        Status::True
    } else {
        Status::Uncertain
    };
    let failure_bound = if u < k {
        failure_bound(&blocks.distinct_degrees(), u as u32, f.order())
    } else {
        BigRational::zero()
    };
    MinPolyResult {
        status,
        minpoly,
        u,
        epsilon: eps.clone(),
        failure_bound,
        ops: PhaseOps {
            spin,
            factor,
            ordpoly,
        },
        data,
        blocks,
    }
}

fn mc_u(f: &Field, prep: &Prepared) -> Result<usize> {
    let k = prep.data.k();
    if k == 0 {
        return Ok(0);
    }
    let u = required_u(&prep.blocks.distinct_degrees(), f.order(), &prep.u_eps)? as usize;
    Ok(u.min(k))
}

fn record_mc(f: &Field, prep: &Prepared, u: usize, ordpoly: OpCounts) {
    f.record(
        BoundTag::MinPolyMc,
        || {
            BoundParams::new()
                .n(prep.data.n() as u64)
                .u(u as u64)
                .degrees(prep.data.degrees().iter().map(|&d| d as u64).collect())
        },
        prep.spin + ordpoly,
    );
}

/// Monte Carlo minimal polynomial: correct with probability at least `1 - eps`,
/// always a divisor of the true one with the same irreducible factors.
pub fn min_poly_mc(
    f: &Field,
    m: &Matrix,
    opts: &MinPolyOptions,
    rng: &mut SeededRng,
) -> Result<MinPolyResult> {
    let prep = prepare(f, m, opts, rng)?;
    let u = mc_u(f, &prep)?;
    let (fpoly, ordpoly) = measured(f, || {
        fold_orders(f, &prep.data, &prep.blocks, 2..=u, prep.blocks.lcm())
    })?;
    record_mc(f, &prep, u, ordpoly);
    Ok(finish(f, prep, u, fpoly, ordpoly, &opts.epsilon))
}

/// Runs the fold over every spun vector; the result is the minimal polynomial.
pub fn min_poly_deterministic(
    f: &Field,
    m: &Matrix,
    opts: &MinPolyOptions,
    rng: &mut SeededRng,
) -> Result<MinPolyResult> {
    let prep = prepare(f, m, opts, rng)?;
    let k = prep.data.k();
    let u = mc_u(f, &prep)?;
    let (partial, first) = measured(f, || {
        fold_orders(f, &prep.data, &prep.blocks, 2..=u, prep.blocks.lcm())
    })?;
    record_mc(f, &prep, u, first);
    let (fpoly, extra) = measured(f, || {
        fold_orders(f, &prep.data, &prep.blocks, u + 1..=k, partial)
    })?;
    let degrees: Vec<u64> = prep.data.degrees().iter().map(|&d| d as u64).collect();
    f.record(
        BoundTag::VerifyLoop,
        || {
            BoundParams::new()
                .k(k as u64)
                .u(u as u64)
                .degrees(degrees.clone())
        },
        extra,
    );
    let n = prep.data.n();
    if k * k <= n {
        f.record(
            BoundTag::LoopSmallK,
            || BoundParams::new().n(n as u64),
            first + extra,
        );
    }
    Ok(finish(f, prep, k, fpoly, first + extra, &opts.epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;
    use crate::linalg::companion;

    fn gf(q: u64) -> Field {
        Field::new(FieldSpec::from_order(q).unwrap())
    }

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn required_u_examples() {
        let eps = r(1, 100);
        assert_eq!(required_u(&[1], 2, &eps).unwrap(), 7);
        assert_eq!(required_u(&[1; 5], 2, &eps).unwrap(), 9);
        assert_eq!(required_u(&[1; 200], 251, &eps).unwrap(), 2);
        assert!(required_u(&[], 2, &eps).is_err());
    }

    #[test]
    fn failure_bound_examples() {
        assert_eq!(failure_bound(&[5], 1, 2), r(1, 32));
        assert_eq!(failure_bound(&[1, 1], 1, 3), r(2, 3));
        assert_eq!(failure_bound(&[1, 2, 3], 2, 2), r(21, 64));
    }

    #[test]
    fn epsilon_parsing() {
        assert_eq!("1/100".parse::<Epsilon>().unwrap(), Epsilon::default());
        assert_eq!("0.01".parse::<Epsilon>().unwrap(), Epsilon::default());
        assert_eq!(".25".parse::<Epsilon>().unwrap().value(), &r(1, 4));
        for bad in ["0", "1/2", "0.5", "2/3", "-1/4", "x", "1/0", ""] {
            assert!(bad.parse::<Epsilon>().is_err(), "{bad}");
        }
        assert_eq!(Epsilon::from_ratio(3, 30).unwrap().to_string(), "1/10");
    }

    #[test]
    fn identity_and_irreducible_cyclic() {
        let f = gf(5);
        let opts = MinPolyOptions::default();
        let mut rng = SeededRng::new(1);
        // 5^-3 <= 1/100 < 5^-2, so u = 3
        for n in 1..6 {
            let res = min_poly_mc(&f, &Matrix::identity(n), &opts, &mut rng).unwrap();
            assert_eq!(
                res.minpoly,
                FactoredPoly::from_pairs([(Poly::from_u32(5, &[4, 1]).unwrap(), 1)])
            );
            assert_eq!(res.k(), n);
            assert_eq!(res.u, n.min(3));
            let want = if n <= 3 {
                Status::True
            } else {
                Status::Uncertain
            };
            assert_eq!(res.status, want);
        }
        let f2 = gf(2);
        let c = companion(&f2, &[Elem(1), Elem(1), Elem(0)]);
        let res = min_poly_mc(&f2, &c, &opts, &mut rng).unwrap();
        assert_eq!(res.k(), 1);
        assert_eq!(res.u, 1);
        assert_eq!(res.status, Status::True);
        assert_eq!(
            res.minpoly.expand(&f2),
            Poly::from_u32(2, &[1, 1, 0, 1]).unwrap()
        );
    }

    #[test]
    fn deterministic_on_zero_and_jordan() {
        let f = gf(3);
        let opts = MinPolyOptions::default();
        let mut rng = SeededRng::new(2);
        let res = min_poly_deterministic(&f, &Matrix::zero(4, 4), &opts, &mut rng).unwrap();
        assert_eq!(res.minpoly, FactoredPoly::from_pairs([(Poly::x(), 1)]));
        let mut j = Matrix::zero(5, 5);
        for i in 0..4 {
            j[(i, i + 1)] = Elem::ONE;
        }
        let res = min_poly_deterministic(&f, &j, &opts, &mut rng).unwrap();
        assert_eq!(res.minpoly, FactoredPoly::from_pairs([(Poly::x(), 5)]));
        assert_eq!(res.status, Status::True);
    }

    #[test]
    fn ord_poly_zero_and_first_block() {
        let f = gf(5);
        let mut rng = SeededRng::new(3);
        let m = Matrix::from_u32_rows(5, &[vec![1, 0], vec![0, 2]]).unwrap();
        let res = min_poly_mc(&f, &m, &MinPolyOptions::default(), &mut rng).unwrap();
        let data = &res.data;
        assert!(ord_poly(&f, data, &res.blocks, data.k(), &[Elem::ZERO; 2])
            .unwrap()
            .is_empty());
        let first = ord_poly(&f, data, &res.blocks, 1, &unit_vector(2, 0)).unwrap();
        assert_eq!(first, vec![res.blocks.block(1).clone()]);
        if data.k() == 1 {
            assert!(matches!(
                ord_poly(&f, data, &res.blocks, 2, &unit_vector(2, 0)),
                Err(Error::InvalidBoundParams(_))
            ));
        } else {
            assert!(matches!(
                ord_poly(&f, data, &res.blocks, 1, &unit_vector(2, 1)),
                Err(Error::SupportViolation { .. })
            ));
        }
    }
}
