//! Dense univariate polynomials over GF(q), in factored and expanded form.

mod factor;

pub use factor::{factorize, is_irreducible, FactorOptions, DEFAULT_BERLEKAMP_LIMIT};

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::budget::{BoundParams, BoundTag};
use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::linalg::{add_scalar_diag, mat_mul, Matrix};

/// A polynomial with coefficients `c_0..c_d`, low to high, never with a zero
/// leading coefficient. The zero polynomial has no coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    c: Vec<Elem>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.c)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let coef = c.value();
            match (i, coef) {
                (0, _) => write!(f, "{coef}")?,
                (1, 1) => f.write_str("x")?,
                (1, _) => write!(f, "{coef}*x")?,
                (_, 1) => write!(f, "x^{i}")?,
                _ => write!(f, "{coef}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly { c: vec![Elem::ONE] }
    }

    pub fn x() -> Poly {
        Poly::monomial(1)
    }

    pub fn constant(c: Elem) -> Poly {
        Poly::new(vec![c])
    }

    /// `x^d`.
    pub fn monomial(d: usize) -> Poly {
        let mut c = vec![Elem::ZERO; d + 1];
        c[d] = Elem::ONE;
        Poly { c }
    }

    /// Trailing zeros are stripped.
    pub fn new(mut c: Vec<Elem>) -> Poly {
        while c.last().is_some_and(|e| e.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    /// From raw encodings, validated against the field order.
    pub fn from_u32(q: u32, coeffs: &[u32]) -> Result<Poly> {
        let mut c = Vec::with_capacity(coeffs.len());
        for &v in coeffs {
            if v >= q {
                return Err(Error::ElementOutOfRange { value: v as u64, q });
            }
            c.push(Elem(v));
        }
        Ok(Poly::new(c))
    }

    /// `x - a`.
    pub fn linear(f: &Field, a: Elem) -> Poly {
        Poly::new(vec![f.spec().raw_neg(a), Elem::ONE])
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.c
    }

    pub fn to_u32(&self) -> Vec<u32> {
        self.c.iter().map(|e| e.value()).collect()
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.c.get(i).copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == Elem::ONE
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree, with the zero polynomial mapped to 0.
    pub fn deg0(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lead(&self) -> Option<Elem> {
        self.c.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Some(Elem::ONE)
    }

    /// Canonical order: degree first, then coefficients low to high.
    pub fn canonical_cmp(&self, other: &Poly) -> Ordering {
        self.c
            .len()
            .cmp(&other.c.len())
            .then_with(|| self.to_u32().cmp(&other.to_u32()))
    }
}

pub fn add(f: &Field, a: &Poly, b: &Poly) -> Poly {
    let (long, short) = if a.c.len() >= b.c.len() {
        (a, b)
    } else {
        (b, a)
    };
    let mut c = long.c.clone();
    f.add_assign(&mut c[..short.c.len()], &short.c);
    Poly::new(c)
}

pub fn sub(f: &Field, a: &Poly, b: &Poly) -> Poly {
    let n = a.c.len().max(b.c.len());
    let mut c = a.c.clone();
    c.resize(n, Elem::ZERO);
    for (i, &y) in b.c.iter().enumerate() {
        c[i] = f.sub(c[i], y);
    }
    Poly::new(c)
}

pub fn scale(f: &Field, a: &Poly, s: Elem) -> Poly {
    if s.is_zero() {
        return Poly::zero();
    }
    Poly::new(f.scaled(s, &a.c))
}

pub fn mul(f: &Field, a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let mut c = vec![Elem::ZERO; a.c.len() + b.c.len() - 1];
    for (i, &x) in a.c.iter().enumerate() {
        f.axpy(&mut c[i..i + b.c.len()], x, &b.c);
    }
    Poly::new(c)
}

pub fn pow(f: &Field, a: &Poly, mut e: u64) -> Poly {
    let mut base = a.clone();
    let mut acc = Poly::one();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(f, &acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(f, &base, &base);
        }
    }
    acc
}

/// Monic associate; the zero polynomial stays zero.
pub fn monic(f: &Field, a: &Poly) -> Poly {
    match a.lead() {
        None => Poly::zero(),
        Some(l) if l == Elem::ONE => a.clone(),
        Some(l) => {
            let inv = f.inv(l).expect("lead is non-zero");
            monic_with_inverse(f, a, inv)
        }
    }
}

fn monic_with_inverse(f: &Field, a: &Poly, inv: Elem) -> Poly {
    let d = a.c.len() - 1;
    let mut c = a.c.clone();
    f.scale(&mut c[..d], inv);
    c[d] = Elem::ONE;
    Poly { c }
}

pub fn derivative(f: &Field, a: &Poly) -> Poly {
    let spec = f.spec();
    let c =
        a.c.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &x)| {
                let k = spec.from_int(i as i64);
                if k.is_zero() {
                    Elem::ZERO
                } else {
                    f.mul(k, x)
                }
            })
            .collect();
    Poly::new(c)
}

/// Horner evaluation at a scalar.
pub fn eval(f: &Field, a: &Poly, x: Elem) -> Elem {
    a.c.iter()
        .rev()
        .fold(Elem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
}

/// Remainder of `a` by `b`, in place. Returns the quotient when asked. With a
/// monic divisor no inversion is needed; `inv` is the inverse of `lead(b)`.
fn divmod_core(
    f: &Field,
    a: &mut Vec<Elem>,
    b: &[Elem],
    inv: Option<Elem>,
    want_q: bool,
) -> Vec<Elem> {
    let m = b.len() - 1;
    if a.len() <= m {
        return Vec::new();
    }
    let n = a.len() - 1;
    let mut q = if want_q {
        vec![Elem::ZERO; n - m + 1]
    } else {
        Vec::new()
    };
    for top in (m..=n).rev() {
        let lead = a[top];
        let qc = match inv {
            Some(i) => f.mul(lead, i),
            None => lead,
        };
        if want_q {
            q[top - m] = qc;
        }
        f.sub_scaled(&mut a[top - m..top], qc, &b[..m]);
        a[top] = Elem::ZERO;
    }
    a.truncate(m);
    while a.last().is_some_and(|e| e.is_zero()) {
        a.pop();
    }
    q
}

/// `a = q b + r` with `deg r < deg b`. At most `2(m+1)(n-m+1)` operations.
pub fn divmod(f: &Field, a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
    let lead = b.lead().ok_or(Error::ZeroPolynomial)?;
    let start = f.ops();
    let (n, m) = (a.deg0(), b.deg0());
    let inv = if lead == Elem::ONE {
        None
    } else {
        Some(f.inv(lead)?)
    };
    let mut r = a.c.clone();
    let q = if a.c.len() < b.c.len() {
        Vec::new()
    } else {
        divmod_core(f, &mut r, &b.c, inv, true)
    };
    f.record(
        BoundTag::Divmod,
        || BoundParams::new().m(m as u64).n(n as u64),
        f.ops() - start,
    );
    Ok((Poly::new(q), Poly::new(r)))
}

pub fn rem(f: &Field, a: &Poly, b: &Poly) -> Result<Poly> {
    let lead = b.lead().ok_or(Error::ZeroPolynomial)?;
    let inv = if lead == Elem::ONE {
        None
    } else {
        Some(f.inv(lead)?)
    };
    let mut r = a.c.clone();
    if r.len() >= b.c.len() {
        divmod_core(f, &mut r, &b.c, inv, false);
    }
    Ok(Poly::new(r))
}

/// Exact quotient; errors if `b` does not divide `a`.
pub fn div_exact(f: &Field, a: &Poly, b: &Poly) -> Result<Poly> {
    let (q, r) = divmod(f, a, b)?;
    if !r.is_zero() {
        return Err(Error::InvalidCandidate(format!("{b} does not divide {a}")));
    }
    Ok(q)
}

/// Monic gcd by the Euclidean algorithm, at most `2(m+1)(n+1)` operations.
///
/// The inverse of each divisor's leading coefficient is kept, so making the
/// final remainder monic costs only its lower coefficients.
pub fn gcd(f: &Field, a: &Poly, b: &Poly) -> Result<Poly> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::GcdOfZeros);
    }
    let start = f.ops();
    let (mut x, mut y) = if a.c.len() >= b.c.len() {
        (a.c.clone(), b.c.clone())
    } else {
        (b.c.clone(), a.c.clone())
    };
    let (n, m) = (x.len().saturating_sub(1), y.len().saturating_sub(1));
    let g = if y.is_empty() {
        monic(f, &Poly { c: x })
    } else {
        loop {
            if y.len() == 1 {
                break Poly::one();
            }
            let lead = *y.last().unwrap();
            let inv = if lead == Elem::ONE {
                None
            } else {
                Some(f.inv(lead)?)
            };
            divmod_core(f, &mut x, &y, inv, false);
            if x.is_empty() {
                let p = Poly { c: y };
                break match inv {
                    None => p,
                    Some(i) => monic_with_inverse(f, &p, i),
                };
            }
            std::mem::swap(&mut x, &mut y);
        }
    };
    f.record(
        BoundTag::Gcd,
        || BoundParams::new().m(m as u64).n(n as u64),
        f.ops() - start,
    );
    Ok(g)
}

/// `a b / gcd(a, b)`, monic.
pub fn lcm(f: &Field, a: &Poly, b: &Poly) -> Result<Poly> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let g = gcd(f, a, b)?;
    let q = div_exact(f, a, &g)?;
    Ok(monic(f, &mul(f, &q, b)))
}

/// `a^e mod m` by square and multiply.
pub fn pow_mod(f: &Field, a: &Poly, e: &num_bigint::BigUint, m: &Poly) -> Result<Poly> {
    let mut acc = Poly::one();
    let base = rem(f, a, m)?;
    for i in (0..e.bits()).rev() {
        acc = rem(f, &mul(f, &acc, &acc), m)?;
        if e.bit(i) {
            acc = rem(f, &mul(f, &acc, &base), m)?;
        }
    }
    rem(f, &acc, m)
}

/// `g(M)` by Horner's rule. A constant is placed on the diagonal for free; a
/// polynomial of degree `d >= 1` costs at most `2 d n^3`.
pub fn eval_at_matrix(f: &Field, g: &Poly, m: &Matrix) -> Result<Matrix> {
    let n = m.check_square()?;
    let start = f.ops();
    let out = match g.degree() {
        None => Matrix::zero(n, n),
        Some(0) => Matrix::scalar(n, g.c[0]),
        Some(d) => {
            let mut acc = m.clone();
            if g.c[d] != Elem::ONE {
                for r in 0..n {
                    f.scale(acc.row_mut(r), g.c[d]);
                }
            }
            add_scalar_diag(f, &mut acc, g.c[d - 1]);
            for j in (0..d - 1).rev() {
                acc = mat_mul(f, &acc, m)?;
                add_scalar_diag(f, &mut acc, g.c[j]);
            }
            acc
        }
    };
    f.record(
        BoundTag::EvalAtMatrix,
        || BoundParams::new().n(n as u64).d(g.deg0() as u64),
        f.ops() - start,
    );
    Ok(out)
}

/// `A^e` for `e >= 1`, left-to-right binary powering. `mul_base` computes
/// `X * A`, so callers with a cheap structured `A` can supply their own product.
pub(crate) fn matrix_power_with(
    f: &Field,
    a: &Matrix,
    e: u64,
    mut mul_base: impl FnMut(&Field, &Matrix) -> Result<Matrix>,
) -> Result<Matrix> {
    if e == 0 {
        return Err(Error::ZeroExponent);
    }
    let mut acc = a.clone();
    for i in (0..63 - e.leading_zeros()).rev() {
        acc = mat_mul(f, &acc, &acc)?;
        if (e >> i) & 1 == 1 {
            acc = mul_base(f, &acc)?;
        }
    }
    Ok(acc)
}

/// `g(M)^e` by Horner evaluation followed by repeated squaring.
pub fn eval_at_matrix_power(f: &Field, g: &Poly, m: &Matrix, e: u64) -> Result<Matrix> {
    if e == 0 {
        return Err(Error::ZeroExponent);
    }
    let n = m.check_square()?;
    let start = f.ops();
    let b = eval_at_matrix(f, g, m)?;
    let out = matrix_power_with(f, &b, e, |f, x| mat_mul(f, x, &b))?;
    f.record(
        BoundTag::EvalAtMatrixPower,
        || BoundParams::new().n(n as u64).d(g.deg0() as u64).e(e),
        f.ops() - start,
    );
    Ok(out)
}

/// Product of powers of distinct monic irreducibles, kept in canonical order
/// (degree, then coefficients). The empty product is 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FactoredPoly {
    factors: Vec<(Poly, u32)>,
}

impl FactoredPoly {
    pub fn one() -> FactoredPoly {
        FactoredPoly::default()
    }

    /// Merges repeated factors and drops zero multiplicities. Factors are
    /// trusted to be monic irreducible.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Poly, u32)>) -> FactoredPoly {
        let mut factors: Vec<(Poly, u32)> = Vec::new();
        for (p, e) in pairs {
            if e == 0 {
                continue;
            }
            match factors.iter_mut().find(|(q, _)| *q == p) {
                Some(slot) => slot.1 += e,
                None => factors.push((p, e)),
            }
        }
        factors.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        FactoredPoly { factors }
    }

    pub fn factors(&self) -> &[(Poly, u32)] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.factors
            .iter()
            .map(|(p, e)| p.deg0() * *e as usize)
            .sum()
    }

    pub fn multiplicity(&self, q: &Poly) -> u32 {
        self.factors
            .iter()
            .find(|(p, _)| p == q)
            .map_or(0, |(_, e)| *e)
    }

    /// Distinct irreducible factors.
    pub fn support(&self) -> impl Iterator<Item = &Poly> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn irreducible_degrees(&self) -> Vec<u32> {
        self.factors.iter().map(|(p, _)| p.deg0() as u32).collect()
    }

    /// Maximum of multiplicities, no arithmetic.
    pub fn lcm(&self, other: &FactoredPoly) -> FactoredPoly {
        let mut pairs = self.factors.clone();
        for (p, e) in &other.factors {
            match pairs.iter_mut().find(|(q, _)| q == p) {
                Some(slot) => slot.1 = slot.1.max(*e),
                None => pairs.push((p.clone(), *e)),
            }
        }
        FactoredPoly::from_pairs(pairs)
    }

    /// Sum of multiplicities.
    pub fn product(&self, other: &FactoredPoly) -> FactoredPoly {
        FactoredPoly::from_pairs(self.factors.iter().chain(&other.factors).cloned())
    }

    pub fn divides(&self, other: &FactoredPoly) -> bool {
        self.factors
            .iter()
            .all(|(p, e)| other.multiplicity(p) >= *e)
    }

    pub fn same_support(&self, other: &FactoredPoly) -> bool {
        self.factors.len() == other.factors.len()
            && self.support().all(|p| other.multiplicity(p) > 0)
    }

    /// Expanded monic product.
    pub fn expand(&self, f: &Field) -> Poly {
        self.factors.iter().fold(Poly::one(), |acc, (p, e)| {
            mul(f, &acc, &pow(f, p, *e as u64))
        })
    }

    /// Copy with the multiplicity of `q` replaced (removed when zero).
    pub fn with_multiplicity(&self, q: &Poly, e: u32) -> FactoredPoly {
        let rest = self.factors.iter().filter(|(p, _)| p != q).cloned();
        FactoredPoly::from_pairs(rest.chain(std::iter::once((q.clone(), e))))
    }
}

/// Serialized as a list of `{factor, multiplicity}` in canonical order.
impl Serialize for FactoredPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            factor: &'a Poly,
            multiplicity: u32,
        }
        s.collect_seq(self.factors.iter().map(|(p, e)| Entry {
            factor: p,
            multiplicity: *e,
        }))
    }
}

impl fmt::Display for FactoredPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            let simple = p.c.len() == 2 && p.c[0].is_zero();
            match (simple, *e) {
                (true, 1) => write!(f, "{p}")?,
                (true, e) => write!(f, "{p}^{e}")?,
                (false, 1) => write!(f, "({p})")?,
                (false, e) => write!(f, "({p})^{e}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;

    fn gf(q: u64) -> Field {
        Field::new(FieldSpec::from_order(q).unwrap())
    }

    fn p(f: &Field, c: &[u32]) -> Poly {
        Poly::from_u32(f.order(), c).unwrap()
    }

    #[test]
    fn divmod_examples() {
        let f = gf(5);
        let (q, r) = divmod(&f, &p(&f, &[4, 0, 1]), &p(&f, &[4, 1])).unwrap();
        assert_eq!((q, r), (p(&f, &[1, 1]), Poly::zero()));
        let a = p(&f, &[1, 2, 3]);
        assert_eq!(
            divmod(&f, &a, &Poly::one()).unwrap(),
            (a.clone(), Poly::zero())
        );
        let f2 = gf(2);
        let (q, r) = divmod(&f2, &p(&f2, &[1, 1, 0, 1]), &p(&f2, &[1, 0, 1])).unwrap();
        assert_eq!((q, r), (Poly::x(), Poly::one()));
        assert_eq!(divmod(&f, &a, &Poly::zero()), Err(Error::ZeroPolynomial));
        let (q, r) = divmod(&f, &Poly::x(), &a).unwrap();
        assert_eq!((q, r), (Poly::zero(), Poly::x()));
    }

    #[test]
    fn gcd_examples() {
        let f = gf(5);
        let a = p(&f, &[2, 4, 3]);
        assert_eq!(gcd(&f, &a, &Poly::zero()).unwrap(), monic(&f, &a));
        assert_eq!(gcd(&f, &a, &Poly::one()).unwrap(), Poly::one());
        // (x-1)(x-2) = x^2 - 3x + 2, (x-1)(x-3) = x^2 - 4x + 3
        let g = gcd(&f, &p(&f, &[2, 2, 1]), &p(&f, &[3, 1, 1])).unwrap();
        assert_eq!(g, p(&f, &[4, 1]));
        assert_eq!(
            gcd(&f, &Poly::zero(), &Poly::zero()),
            Err(Error::GcdOfZeros)
        );
    }

    #[test]
    fn gcd_within_budget_in_scope() {
        let f = gf(7);
        let a = p(&f, &[3, 1, 4, 1, 5, 2]);
        let b = p(&f, &[2, 6, 1]);
        f.counter().begin_scope();
        gcd(&f, &a, &b).unwrap();
        let used = f.counter().end_scope().unwrap().total();
        assert!(used <= 2 * 3 * 6, "{used}");
    }

    #[test]
    fn lcm_examples() {
        let f = gf(5);
        let a = p(&f, &[2, 4]);
        assert_eq!(lcm(&f, &a, &a).unwrap(), monic(&f, &a));
        let x1 = p(&f, &[4, 1]);
        let x2 = p(&f, &[3, 1]);
        assert_eq!(lcm(&f, &x1, &x2).unwrap(), mul(&f, &x1, &x2));
        let a = FactoredPoly::from_pairs([(x1.clone(), 2)]);
        let b = FactoredPoly::from_pairs([(x1.clone(), 1), (x2.clone(), 1)]);
        assert_eq!(a.lcm(&b), FactoredPoly::from_pairs([(x1, 2), (x2, 1)]));
    }

    #[test]
    fn matrix_evaluation() {
        let f = gf(5);
        let m = Matrix::from_u32_rows(5, &[vec![0, 1], vec![4, 0]]).unwrap();
        assert_eq!(eval_at_matrix(&f, &Poly::x(), &m).unwrap(), m);
        assert!(eval_at_matrix(&f, &p(&f, &[1, 0, 1]), &m)
            .unwrap()
            .is_zero());
        let nil = Matrix::from_u32_rows(5, &[vec![0, 1], vec![0, 0]]).unwrap();
        assert!(eval_at_matrix_power(&f, &Poly::x(), &nil, 2)
            .unwrap()
            .is_zero());
        assert_eq!(eval_at_matrix_power(&f, &Poly::x(), &m, 1).unwrap(), m);
        let id = Matrix::identity(3);
        assert!(eval_at_matrix_power(&f, &p(&f, &[4, 1]), &id, 2)
            .unwrap()
            .is_zero());
        assert_eq!(
            eval_at_matrix_power(&f, &Poly::x(), &m, 0),
            Err(Error::ZeroExponent)
        );
    }

    #[test]
    fn matrix_power_agrees_with_repeated_products() {
        let f = gf(7);
        let m = Matrix::from_u32_rows(7, &[vec![1, 2, 0], vec![3, 0, 1], vec![5, 5, 6]]).unwrap();
        let mut want = m.clone();
        for e in 1..20u64 {
            let got = matrix_power_with(&f, &m, e, |f, x| mat_mul(f, x, &m)).unwrap();
            assert_eq!(got, want, "e={e}");
            want = mat_mul(&f, &want, &m).unwrap();
        }
    }

    #[test]
    fn factored_ordering_and_display() {
        let f = gf(3);
        let fp =
            FactoredPoly::from_pairs([(p(&f, &[1, 0, 1]), 1), (Poly::x(), 2), (p(&f, &[1, 1]), 1)]);
        assert_eq!(fp.factors()[0].0, Poly::x());
        assert_eq!(fp.factors()[1].0, p(&f, &[1, 1]));
        assert_eq!(fp.degree(), 5);
        assert_eq!(fp.to_string(), "x^2 * (x + 1) * (x^2 + 1)");
        assert_eq!(FactoredPoly::one().expand(&f), Poly::one());
    }

    #[test]
    fn derivative_in_characteristic() {
        let f = gf(3);
        // d/dx (x^3 + 2x^2 + x) = 4x + 1 = x + 1
        assert_eq!(derivative(&f, &p(&f, &[0, 1, 2, 1])), p(&f, &[1, 1]));
    }
}
