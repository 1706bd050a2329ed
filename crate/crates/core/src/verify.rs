//! Deterministic checks of a Monte Carlo minimal polynomial: finishing the
//! loop, evaluation on the spun generators, and kernel dimensions.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::budget::{bound_for, ceil_log2, BoundParams, BoundTag};
use crate::error::{Error, Result};
use crate::gf::{Field, OpCounts};
use crate::linalg::{mat_mul, nullspace_dim, unit_vector, Matrix, SparseConjugate};
use crate::minpoly::{apply_poly_prefix, fold_orders, spun_order, FactoredBlocks, MinPolyResult};
use crate::poly::{eval_at_matrix, matrix_power_with, FactoredPoly, Poly};
use crate::spin::CharPolyData;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Loop,
    Eval,
    Nullspace,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Loop => "loop",
            Strategy::Eval => "eval",
            Strategy::Nullspace => "nullspace",
        })
    }
}

/// What the caller asked for; `Auto` picks a strategy per instance.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub enum VerifyPolicy {
    #[default]
    None,
    Loop,
    Eval,
    Nullspace,
    Auto,
}

impl FromStr for VerifyPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<VerifyPolicy> {
        Ok(match s {
            "none" => VerifyPolicy::None,
            "loop" => VerifyPolicy::Loop,
            "eval" => VerifyPolicy::Eval,
            "nullspace" => VerifyPolicy::Nullspace,
            "auto" => VerifyPolicy::Auto,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown verify policy `{other}`"
                )))
            }
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "refuted_index")]
pub enum Verdict {
    Verified,
    /// One-based index into the factored characteristic polynomial of an
    /// irreducible whose multiplicity the candidate understates.
    Refuted(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub strategy: Strategy,
    pub verdict: Verdict,
    pub ops: OpCounts,
    /// The minimal polynomial itself, when the strategy produces it.
    pub minpoly: Option<FactoredPoly>,
}

impl VerifyOutcome {
    pub fn verified(&self) -> bool {
        self.verdict == Verdict::Verified
    }
}

/// First factor of `chi` (one-based) whose multiplicity in `truth` exceeds the one in `candidate`.
fn understated(
    chi: &FactoredPoly,
    candidate: &FactoredPoly,
    truth: &FactoredPoly,
) -> Option<usize> {
    chi.factors()
        .iter()
        .position(|(q, _)| truth.multiplicity(q) > candidate.multiplicity(q))
        .map(|i| i + 1)
}

fn check_candidate(chi: &FactoredPoly, candidate: &FactoredPoly) -> Result<()> {
    for (q, fi) in candidate.factors() {
        let e = chi.multiplicity(q);
        if e == 0 {
            return Err(Error::InvalidCandidate(format!(
                "{q} does not divide the characteristic polynomial"
            )));
        }
        if *fi > e {
            return Err(Error::InvalidCandidate(format!(
                "multiplicity {fi} of {q} exceeds {e}"
            )));
        }
    }
    Ok(())
}

fn degrees_u64(data: &CharPolyData) -> Vec<u64> {
    data.degrees().iter().map(|&d| d as u64).collect()
}

/// Folds the orders of the remaining generators `u+1..=k` into `candidate`.
pub fn verify_by_loop(
    f: &Field,
    data: &CharPolyData,
    blocks: &FactoredBlocks,
    candidate: &FactoredPoly,
    u: usize,
) -> Result<VerifyOutcome> {
    let k = data.k();
    let chi = blocks.product();
    check_candidate(&chi, candidate)?;
    let start = f.ops();
    let truth = if candidate.degree() == data.n() || u >= k {
        candidate.clone()
    } else {
        fold_orders(f, data, blocks, u + 1..=k, candidate.clone())?
    };
    let ops = f.ops() - start;
    f.record(
        BoundTag::VerifyLoop,
        || {
            BoundParams::new()
                .k(k as u64)
                .u(u.min(k) as u64)
                .degrees(degrees_u64(data))
        },
        ops,
    );
    let verdict = match understated(&chi, candidate, &truth) {
        Some(j) => Verdict::Refuted(j),
        None => Verdict::Verified,
    };
    Ok(VerifyOutcome {
        strategy: Strategy::Loop,
        verdict,
        ops,
        minpoly: Some(truth),
    })
}

/// Checks that the candidate annihilates every remaining generator.
pub fn verify_by_eval(
    f: &Field,
    data: &CharPolyData,
    blocks: &FactoredBlocks,
    candidate: &FactoredPoly,
    u: usize,
) -> Result<VerifyOutcome> {
    let k = data.k();
    let n = data.n();
    let chi = blocks.product();
    check_candidate(&chi, candidate)?;
    let sums = data.partial_sums();
    let start = f.ops();
    let mut failed = None;
    if candidate.degree() < n {
        for i in u + 1..=k {
            let mut w = unit_vector(sums[i], sums[i - 1]);
            for (q, e) in candidate.factors() {
                for _ in 0..*e {
                    w = apply_poly_prefix(f, &data.conjugate, &w, q, i);
                }
            }
            if w.iter().any(|x| !x.is_zero()) {
                failed = Some(i);
                break;
            }
        }
    }
    let ops = f.ops() - start;
    f.record(
        BoundTag::VerifyEval,
        || {
            BoundParams::new()
                .n(n as u64)
                .d(candidate.degree() as u64)
                .k(k as u64)
                .u(u.min(k) as u64)
        },
        ops,
    );
    let verdict = match failed {
        None => Verdict::Verified,
        Some(i) => {
            // locate the understated factor from the failing generator's order, uncounted
            let g = f.fork();
            let order = spun_order(&g, data, blocks, i)?;
            let j = understated(&chi, candidate, &candidate.lcm(&order)).ok_or_else(|| {
                Error::InvalidCandidate("candidate is not the lcm of the first u orders".into())
            })?;
            Verdict::Refuted(j)
        }
    };
    Ok(VerifyOutcome {
        strategy: Strategy::Eval,
        verdict,
        ops,
        minpoly: None,
    })
}

/// `X q(M')` row by row through the sparse conjugate.
fn mul_poly_sparse(f: &Field, x: &Matrix, conj: &SparseConjugate, q: &Poly) -> Matrix {
    let n = x.rows();
    let k = conj.k();
    let mut out = Matrix::zero(n, x.cols());
    for r in 0..n {
        let row = apply_poly_prefix(f, conj, x.row(r), q, k);
        out.row_mut(r).copy_from_slice(&row);
    }
    out
}

/// Kernel dimensions of `q_i(M')^(f_i)` for every understated-looking factor.
/// With `skip`, factors dividing no `p^(j)` for `j > u` are not examined.
pub fn verify_by_nullspace(
    f: &Field,
    data: &CharPolyData,
    blocks: &FactoredBlocks,
    candidate: &FactoredPoly,
    u: usize,
    skip: bool,
) -> Result<VerifyOutcome> {
    let n = data.n();
    let k = data.k();
    let chi = blocks.product();
    check_candidate(&chi, candidate)?;
    let conj = &data.conjugate;
    let dense = conj.to_dense();
    let sparse_row: u64 = conj.partial_sums()[1..]
        .iter()
        .map(|&s| 2 * s as u64)
        .sum::<u64>()
        + 2 * n as u64;
    let start = f.ops();
    let mut verdict = Verdict::Verified;
    for (idx, (q, e)) in chi.factors().iter().enumerate() {
        let fi = candidate.multiplicity(q);
        if fi >= *e {
            continue;
        }
        if fi == 0 {
            verdict = Verdict::Refuted(idx + 1);
            break;
        }
        if skip && !(u + 1..=k).any(|j| blocks.block(j).multiplicity(q) > 0) {
            continue;
        }
        let a = eval_at_matrix(f, q, &dense)?;
        let n64 = n as u64;
        let dense_cost = 2 * n64 * n64 * n64 - n64 * n64;
        let sparse_cost = n64 * q.deg0() as u64 * sparse_row;
        let power = matrix_power_with(f, &a, fi as u64, |f, x| {
            if sparse_cost < dense_cost {
                Ok(mul_poly_sparse(f, x, conj, q))
            } else {
                mat_mul(f, x, &a)
            }
        })?;
        let dim = nullspace_dim(f, &power)?;
        if dim < q.deg0() * *e as usize {
            verdict = Verdict::Refuted(idx + 1);
            break;
        }
    }
    let ops = f.ops() - start;
    let factors: Vec<(u64, u64)> = chi
        .factors()
        .iter()
        .map(|(q, _)| (q.deg0() as u64, candidate.multiplicity(q) as u64))
        .collect();
    f.record(
        BoundTag::VerifyNullspace,
        || BoundParams::new().n(n as u64).factors(factors.clone()),
        ops,
    );
    Ok(VerifyOutcome {
        strategy: Strategy::Nullspace,
        verdict,
        ops,
        minpoly: None,
    })
}

/// Strategy chosen by `Auto`: the loop when `k <= sqrt(n)`, otherwise
/// whichever of evaluation and kernel checks has the smaller bound.
pub fn choose_strategy(
    data: &CharPolyData,
    blocks: &FactoredBlocks,
    candidate: &FactoredPoly,
    u: usize,
) -> Strategy {
    let n = data.n() as u64;
    let k = data.k() as u64;
    let u = (u as u64).min(k);
    if k * k <= n {
        return Strategy::Loop;
    }
    let eval = bound_for(
        BoundTag::VerifyEval,
        &BoundParams::new()
            .n(n)
            .d(candidate.degree() as u64)
            .k(k)
            .u(u),
    );
    let chi = blocks.product();
    let factors = chi
        .factors()
        .iter()
        .map(|(q, _)| (q.deg0() as u64, candidate.multiplicity(q) as u64))
        .collect();
    let null = bound_for(
        BoundTag::VerifyNullspace,
        &BoundParams::new().n(n).factors(factors),
    );
    match (eval, null) {
        (Ok(a), Ok(b)) if b < a => Strategy::Nullspace,
        _ => Strategy::Eval,
    }
}

/// Runs `strategy` on a Monte Carlo result.
pub fn verify(
    f: &Field,
    result: &MinPolyResult,
    strategy: Strategy,
    skip: bool,
) -> Result<VerifyOutcome> {
    let (data, blocks, cand, u) = (&result.data, &result.blocks, &result.minpoly, result.u);
    match strategy {
        Strategy::Loop => verify_by_loop(f, data, blocks, cand, u),
        Strategy::Eval => verify_by_eval(f, data, blocks, cand, u),
        Strategy::Nullspace => verify_by_nullspace(f, data, blocks, cand, u, skip),
    }
}

/// Resolves a policy; `None` yields no outcome.
pub fn verify_with_policy(
    f: &Field,
    result: &MinPolyResult,
    policy: VerifyPolicy,
    skip: bool,
) -> Result<Option<VerifyOutcome>> {
    let strategy = match policy {
        VerifyPolicy::None => return Ok(None),
        VerifyPolicy::Loop => Strategy::Loop,
        VerifyPolicy::Eval => Strategy::Eval,
        VerifyPolicy::Nullspace => Strategy::Nullspace,
        VerifyPolicy::Auto => {
            choose_strategy(&result.data, &result.blocks, &result.minpoly, result.u)
        }
    };
    verify(f, result, strategy, skip).map(Some)
}

/// `true` when plain repeated squaring needs at most `ceil(log2 f) + 1`
/// products for every multiplicity `f`.
pub fn squaring_fits(factors: &[(u64, u64)]) -> bool {
    factors.iter().all(|&(_, f)| {
        f <= 1 || {
            let l = 63 - f.leading_zeros() as u64 + f.count_ones() as u64 - 1;
            l <= ceil_log2(f) + 1
        }
    })
}
