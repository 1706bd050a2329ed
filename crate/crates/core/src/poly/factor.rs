//! Factorization into monic irreducibles: squarefree decomposition, then
//! distinct-degree, then equal-degree splitting. Small fields split with
//! Berlekamp's subalgebra; larger ones with Cantor-Zassenhaus.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::{add, derivative, div_exact, gcd, monic, mul, pow_mod, rem, sub, FactoredPoly, Poly};
use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::linalg::{left_kernel, Matrix};
use crate::rng::SeededRng;

/// Fields up to this order use the deterministic splitting path.
pub const DEFAULT_BERLEKAMP_LIMIT: u32 = 32;

#[derive(Clone, Debug)]
pub struct FactorOptions {
    pub berlekamp_limit: u32,
    /// Failure budget for the randomized path.
    pub epsilon: BigRational,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions {
            berlekamp_limit: DEFAULT_BERLEKAMP_LIMIT,
            epsilon: BigRational::new(1.into(), 100.into()),
        }
    }
}

impl FactorOptions {
    pub fn randomized(&self, q: u32) -> bool {
        q > self.berlekamp_limit
    }
}

/// Factors `monic(a)`. The leading coefficient is dropped.
pub fn factorize(
    f: &Field,
    a: &Poly,
    opts: &FactorOptions,
    rng: &mut SeededRng,
) -> Result<FactoredPoly> {
    if a.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if a.is_constant() {
        return Ok(FactoredPoly::one());
    }
    let a = monic(f, a);
    let cap = attempt_cap(a.deg0(), &opts.epsilon);
    let mut pairs = Vec::new();
    for (s, mult) in squarefree(f, &a) {
        for (g, d) in distinct_degree(f, &s)? {
            let parts = if opts.randomized(f.order()) {
                cantor_zassenhaus(f, &g, d, rng, cap)?
            } else {
                berlekamp(f, &g, d)?
            };
            pairs.extend(parts.into_iter().map(|p| (p, mult)));
        }
    }
    Ok(FactoredPoly::from_pairs(pairs))
}

/// Attempts per split so that at most `n` split events each failing with
/// probability below 2/3 give overall failure at most `eps`.
fn attempt_cap(n: usize, eps: &BigRational) -> u32 {
    let eps = eps.to_f64().filter(|e| *e > 0.0).unwrap_or(1e-9);
    let x = ((n.max(2) as f64) / eps).ln() / 1.5f64.ln();
    x.ceil().max(1.0) as u32 + 1
}

/// `(squarefree part, multiplicity)` pairs of a monic polynomial.
fn squarefree(f: &Field, a: &Poly) -> Vec<(Poly, u32)> {
    let p = f.spec().p();
    let mut out = Vec::new();
    let da = derivative(f, a);
    if da.is_zero() {
        for (g, m) in squarefree(f, &pth_root(f, a)) {
            out.push((g, m * p));
        }
        return out;
    }
    let mut c = gcd(f, a, &da).expect("a is non-zero");
    let mut w = div_exact(f, a, &c).expect("gcd divides");
    let mut i = 1;
    while !w.is_one() {
        let y = gcd(f, &w, &c).expect("w is non-zero");
        let fac = div_exact(f, &w, &y).expect("gcd divides");
        if !fac.is_one() {
            out.push((fac, i));
        }
        i += 1;
        c = div_exact(f, &c, &y).expect("gcd divides");
        w = y;
    }
    if !c.is_one() {
        for (g, m) in squarefree(f, &pth_root(f, &c)) {
            out.push((g, m * p));
        }
    }
    out
}

/// `b` with `b^p = a`, for `a` a polynomial in `x^p`.
fn pth_root(f: &Field, a: &Poly) -> Poly {
    let p = f.spec().p() as usize;
    let e = (f.order() / f.spec().p()) as u64;
    let c = a
        .coeffs()
        .iter()
        .step_by(p)
        .map(|&c| if e == 1 { c } else { f.pow(c, e) })
        .collect();
    Poly::new(c)
}

/// Splits a squarefree monic polynomial into products of irreducibles of equal degree.
fn distinct_degree(f: &Field, a: &Poly) -> Result<Vec<(Poly, usize)>> {
    let q = BigUint::from(f.order());
    let mut out = Vec::new();
    let mut rest = a.clone();
    let mut h = rem(f, &Poly::x(), &rest)?;
    let mut d = 1;
    while rest.deg0() >= 2 * d {
        h = pow_mod(f, &h, &q, &rest)?;
        let g = gcd(f, &sub(f, &h, &Poly::x()), &rest)?;
        if !g.is_one() {
            rest = div_exact(f, &rest, &g)?;
            h = rem(f, &h, &rest)?;
            out.push((g, d));
        }
        d += 1;
    }
    if rest.deg0() > 0 {
        let d = rest.deg0();
        out.push((rest, d));
    }
    Ok(out)
}

/// Deterministic equal-degree splitting via the kernel of `Q - I`.
fn berlekamp(f: &Field, g: &Poly, d: usize) -> Result<Vec<Poly>> {
    let n = g.deg0();
    let r = n / d;
    if r <= 1 {
        return Ok(vec![g.clone()]);
    }
    let xq = pow_mod(f, &Poly::x(), &BigUint::from(f.order()), g)?;
    let mut q_minus_i = Matrix::zero(n, n);
    let mut row = Poly::one();
    for i in 0..n {
        for (j, &c) in row.coeffs().iter().enumerate() {
            q_minus_i[(i, j)] = c;
        }
        q_minus_i[(i, i)] = f.sub(q_minus_i[(i, i)], Elem::ONE);
        row = rem(f, &mul(f, &row, &xq), g)?;
    }
    let kernel = left_kernel(f, &q_minus_i);
    let mut parts = vec![g.clone()];
    for v in kernel.row_iter() {
        if parts.len() == r {
            break;
        }
        let h = Poly::new(v.to_vec());
        if h.is_constant() {
            continue;
        }
        let mut next = Vec::with_capacity(r);
        for u in parts {
            if u.deg0() == d {
                next.push(u);
                continue;
            }
            let mut left = u;
            for s in f.spec().elements() {
                if left.is_one() {
                    break;
                }
                let shifted = sub(f, &h, &Poly::constant(s));
                let gg = gcd(f, &left, &shifted)?;
                if !gg.is_one() {
                    left = div_exact(f, &left, &gg)?;
                    next.push(gg);
                }
            }
        }
        parts = next;
    }
    debug_assert_eq!(parts.len(), r);
    Ok(parts)
}

fn random_poly(f: &Field, deg_below: usize, rng: &mut SeededRng) -> Poly {
    Poly::new((0..deg_below).map(|_| rng.elem(f.spec())).collect())
}

/// Randomized equal-degree splitting; gives up after `cap` failed attempts on
/// any single split.
fn cantor_zassenhaus(
    f: &Field,
    g: &Poly,
    d: usize,
    rng: &mut SeededRng,
    cap: u32,
) -> Result<Vec<Poly>> {
    let n = g.deg0();
    if n <= d {
        return Ok(vec![g.clone()]);
    }
    let spec = f.spec();
    let odd = spec.p() != 2;
    let exponent = if odd {
        (BigUint::from(f.order()).pow(d as u32) - BigUint::one()) / BigUint::from(2u32)
    } else {
        BigUint::one()
    };
    for _ in 0..cap {
        let a = random_poly(f, n, rng);
        if a.is_constant() {
            continue;
        }
        let b = if odd {
            sub(f, &pow_mod(f, &a, &exponent, g)?, &Poly::one())
        } else {
            // absolute trace to GF(2)
            let steps = spec.k() as usize * d;
            let mut t = a.clone();
            let mut s = a;
            for _ in 1..steps {
                s = rem(f, &mul(f, &s, &s), g)?;
                t = add(f, &t, &s);
            }
            t
        };
        if b.is_zero() {
            continue;
        }
        let h = gcd(f, &b, g)?;
        if !h.is_one() && h.deg0() < n {
            let other = div_exact(f, g, &h)?;
            let mut out = cantor_zassenhaus(f, &h, d, rng, cap)?;
            out.extend(cantor_zassenhaus(f, &other, d, rng, cap)?);
            return Ok(out);
        }
    }
    Err(Error::FactorizationFailed)
}

/// Rabin's test: `x^(q^n) = x mod a` and `gcd(x^(q^(n/r)) - x, a) = 1` for
/// every prime `r | n`.
pub fn is_irreducible(f: &Field, a: &Poly) -> Result<bool> {
    let n = match a.degree() {
        None | Some(0) => return Ok(false),
        Some(1) => return Ok(true),
        Some(n) => n,
    };
    let a = monic(f, a);
    let q = BigUint::from(f.order());
    let mut frob = vec![rem(f, &Poly::x(), &a)?];
    for _ in 0..n {
        let next = pow_mod(f, frob.last().unwrap(), &q, &a)?;
        frob.push(next);
    }
    if frob[n] != rem(f, &Poly::x(), &a)? {
        return Ok(false);
    }
    let mut m = n;
    let mut r = 2;
    let mut primes = Vec::new();
    while r * r <= m {
        if m % r == 0 {
            primes.push(r);
            while m % r == 0 {
                m /= r;
            }
        }
        r += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    for r in primes {
        let g = gcd(f, &sub(f, &frob[n / r], &Poly::x()), &a)?;
        if !g.is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}
