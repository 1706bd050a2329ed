//! Spinning vectors: relative order polynomials and the randomized
//! characteristic polynomial.

use crate::budget::{BoundParams, BoundTag};
use crate::echelon::SemiEchelonDataSequence;
use crate::error::{Error, Result};
use crate::gf::{Elem, Field, FieldSpec};
use crate::linalg::{mat_vec, Matrix, SparseConjugate};
use crate::poly::Poly;
use crate::rng::SeededRng;

/// Uniform vector in `F^dim`.
pub fn random_vector(spec: &FieldSpec, dim: usize, rng: &mut SeededRng) -> Vec<Elem> {
    (0..dim).map(|_| rng.elem(spec)).collect()
}

/// Uniform non-zero vector of `F^n` vanishing on the positions in `excluded`.
pub fn random_vector_star(
    spec: &FieldSpec,
    n: usize,
    excluded: &[usize],
    rng: &mut SeededRng,
) -> Result<Vec<Elem>> {
    let mut blocked = vec![false; n];
    for &i in excluded {
        if i < n {
            blocked[i] = true;
        }
    }
    let free: Vec<usize> = (0..n).filter(|&i| !blocked[i]).collect();
    if free.is_empty() {
        return Err(Error::EmptyVectorSpace { n, excluded: n });
    }
    let mut v = vec![Elem::ZERO; n];
    loop {
        let mut nonzero = false;
        for &i in &free {
            let e = rng.elem(spec);
            nonzero |= !e.is_zero();
            v[i] = e;
        }
        if nonzero {
            return Ok(v);
        }
    }
}

/// Output of [`relative_ord_poly`]: `p = ord(v + W)` and `b` with `v M^d = b Y'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeOrder {
    pub p: Poly,
    pub b: Vec<Elem>,
}

impl RelativeOrder {
    pub fn degree(&self) -> usize {
        self.p.deg0()
    }
}

/// Extends `seds` by `v, vM, ..., vM^(d-1)` and returns the relative order
/// polynomial of `v` modulo the row space, which must be `M`-invariant.
pub fn relative_ord_poly(
    f: &Field,
    seds: &mut SemiEchelonDataSequence,
    v: &[Elem],
    m: &Matrix,
) -> Result<RelativeOrder> {
    let n = m.check_square()?;
    if seds.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: seds.n(),
        });
    }
    let m0 = seds.len();
    let start = f.ops();
    let mut cur = v.to_vec();
    let a = loop {
        let c = seds.clean_and_extend(f, &cur)?;
        if c.found {
            break c.a;
        }
        cur = mat_vec(f, &cur, m)?;
    };
    let d = seds.len() - m0;
    let b = seds.times_t(f, &a);
    let mut coeffs: Vec<Elem> = b[m0..].iter().map(|&x| f.neg(x)).collect();
    coeffs.push(Elem::ONE);
    f.record(
        BoundTag::RelativeOrdPoly,
        || BoundParams::new().n(n as u64).m(m0 as u64).d(d as u64),
        f.ops() - start,
    );
    Ok(RelativeOrder {
        p: Poly::new(coeffs),
        b,
    })
}

/// Everything the characteristic polynomial run produces.
#[derive(Clone, Debug)]
pub struct CharPolyData {
    /// `p^(1), ..., p^(k)`; their product is the characteristic polynomial.
    pub factors: Vec<Poly>,
    /// Full-length data sequence; `Y` rows are the spun vectors.
    pub seds: SemiEchelonDataSequence,
    /// `b^(i)` zero-padded to length `n`.
    pub b: Vec<Vec<Elem>>,
    /// `Y M Y^-1` in sparse form.
    pub conjugate: SparseConjugate,
    pub seed: u64,
}

impl CharPolyData {
    pub fn k(&self) -> usize {
        self.factors.len()
    }

    pub fn n(&self) -> usize {
        self.seds.n()
    }

    pub fn degrees(&self) -> &[usize] {
        self.conjugate.degrees()
    }

    /// `s_0 = 0, ..., s_k`.
    pub fn partial_sums(&self) -> &[usize] {
        self.conjugate.partial_sums()
    }

    /// The `i`-th spun vector `v^(i)` (one-based).
    pub fn spun_vector(&self, i: usize) -> &[Elem] {
        self.seds.y_row(self.partial_sums()[i - 1])
    }

    /// Expanded product of the factors.
    pub fn char_poly(&self, f: &Field) -> Poly {
        let g = f.fork();
        self.factors
            .iter()
            .fold(Poly::one(), |acc, p| crate::poly::mul(&g, &acc, p))
    }
}

/// Randomized characteristic polynomial by repeated spinning of vectors
/// outside the current invariant subspace.
pub fn char_poly(f: &Field, m: &Matrix, rng: &mut SeededRng) -> Result<CharPolyData> {
    let n = m.check_square()?;
    let spec = f.spec().clone();
    let mut seds = SemiEchelonDataSequence::trivial(n);
    let mut factors = Vec::new();
    let mut bs = Vec::new();
    let mut degrees = Vec::new();
    let start = f.ops();
    while seds.len() < n {
        let len = seds.len();
        let a = random_vector(&spec, len, rng);
        let mut v = random_vector_star(&spec, n, seds.leading(), rng)?;
        for (i, &ai) in a.iter().enumerate() {
            f.axpy(&mut v, ai, seds.s_row(i));
        }
        let r = relative_ord_poly(f, &mut seds, &v, m)?;
        degrees.push(r.degree());
        let mut b = r.b;
        b.resize(n, Elem::ZERO);
        bs.push(b);
        factors.push(r.p);
    }
    f.record(
        BoundTag::CharPoly,
        || BoundParams::new().n(n as u64),
        f.ops() - start,
    );
    let conjugate = SparseConjugate::new(degrees, bs.clone())?;
    Ok(CharPolyData {
        factors,
        seds,
        b: bs,
        conjugate,
        seed: rng.seed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{companion, mat_inverse, mat_mul, unit_vector};

    fn gf(q: u64) -> Field {
        Field::new(FieldSpec::from_order(q).unwrap())
    }

    fn v(xs: &[u32]) -> Vec<Elem> {
        xs.iter().map(|&x| Elem(x)).collect()
    }

    #[test]
    fn random_vectors() {
        let spec = FieldSpec::from_order(2).unwrap();
        let mut rng = SeededRng::new(3);
        assert!(random_vector(&spec, 0, &mut rng).is_empty());
        for _ in 0..20 {
            assert_eq!(
                random_vector_star(&spec, 1, &[], &mut rng).unwrap(),
                v(&[1])
            );
        }
        let w = random_vector_star(&spec, 4, &[0, 2], &mut rng).unwrap();
        assert!(w[0].is_zero() && w[2].is_zero() && !(w[1].is_zero() && w[3].is_zero()));
        assert!(matches!(
            random_vector_star(&spec, 2, &[0, 1], &mut rng),
            Err(Error::EmptyVectorSpace { .. })
        ));
    }

    #[test]
    fn relative_order_examples() {
        let f = gf(5);
        let mut s = SemiEchelonDataSequence::trivial(2);
        let r = relative_ord_poly(&f, &mut s, &unit_vector(2, 0), &Matrix::identity(2)).unwrap();
        assert_eq!(r.p, Poly::from_u32(5, &[4, 1]).unwrap());
        assert_eq!(r.b, v(&[1]));
        let again = relative_ord_poly(&f, &mut s, &v(&[3, 0]), &Matrix::identity(2)).unwrap();
        assert!(again.p.is_one());
        assert_eq!(s.len(), 1);

        let f3 = gf(3);
        let c = companion(&f3, &v(&[1, 0]));
        let mut s = SemiEchelonDataSequence::trivial(2);
        let r = relative_ord_poly(&f3, &mut s, &unit_vector(2, 0), &c).unwrap();
        assert_eq!(r.p, Poly::from_u32(3, &[1, 0, 1]).unwrap());
        assert_eq!(r.b, v(&[2, 0]));
    }

    #[test]
    fn zero_and_irreducible_companion() {
        let f = gf(3);
        let mut rng = SeededRng::new(11);
        let data = char_poly(&f, &Matrix::zero(4, 4), &mut rng).unwrap();
        assert_eq!(data.k(), 4);
        assert!(data.factors.iter().all(|p| *p == Poly::x()));
        let f2 = gf(2);
        // x^3 + x + 1
        let c = companion(&f2, &v(&[1, 1, 0]));
        let data = char_poly(&f2, &c, &mut rng).unwrap();
        assert_eq!(data.k(), 1);
        assert_eq!(data.factors[0], Poly::from_u32(2, &[1, 1, 0, 1]).unwrap());
    }

    #[test]
    fn conjugate_matches_dense_expansion() {
        let f = gf(7);
        let mut rng = SeededRng::new(5);
        for n in [1usize, 3, 6, 9] {
            let rows: Vec<Vec<u32>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| ((i * i + 3 * j + (i ^ j)) % 7) as u32 * ((i + j) % 3 != 0) as u32)
                        .collect()
                })
                .collect();
            let m = Matrix::from_u32_rows(7, &rows).unwrap();
            let data = char_poly(&f, &m, &mut rng).unwrap();
            let y = data.seds.y();
            let ymy = mat_mul(
                &f,
                &mat_mul(&f, &y, &m).unwrap(),
                &mat_inverse(&f, &y).unwrap(),
            )
            .unwrap();
            assert_eq!(ymy, data.conjugate.to_dense());
            assert!(data.seds.check_invariants(&f));
            assert_eq!(data.degrees().iter().sum::<usize>(), n);
        }
    }

    #[test]
    fn same_seed_same_output() {
        let f = gf(5);
        let m = companion(&f, &v(&[1, 2, 3, 4]));
        let a = char_poly(&f, &m, &mut SeededRng::new(42)).unwrap();
        let b = char_poly(&f, &m, &mut SeededRng::new(42)).unwrap();
        assert_eq!(a.factors, b.factors);
        assert_eq!(a.b, b.b);
        assert_eq!(a.seds, b.seds);
        assert_eq!(a.seed, 42);
    }
}
