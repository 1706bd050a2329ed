//! Slow reference computations for small matrices. Nothing here is counted
//! and nothing is shared with the main pipeline beyond raw field arithmetic.

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldSpec};
use crate::linalg::Matrix;
use crate::poly::Poly;

pub const ORACLE_LIMIT: usize = 64;

fn check(m: &Matrix) -> Result<usize> {
    if m.rows() != m.cols() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if m.rows() > ORACLE_LIMIT {
        return Err(Error::OracleLimit {
            n: m.rows(),
            limit: ORACLE_LIMIT,
        });
    }
    Ok(m.rows())
}

/// Reduced row echelon basis that remembers how each row was built from the
/// inserted vectors.
struct Tracker<'a> {
    spec: &'a FieldSpec,
    /// `(pivot, row, combination)` sorted by pivot.
    rows: Vec<(usize, Vec<Elem>, Vec<Elem>)>,
    inserted: usize,
}

impl<'a> Tracker<'a> {
    fn new(spec: &'a FieldSpec) -> Self {
        Tracker {
            spec,
            rows: Vec::new(),
            inserted: 0,
        }
    }

    /// Inserts `v`; on dependency returns `c` with `v = sum c_i v_i` over earlier inserts.
    fn insert(&mut self, v: Vec<Elem>) -> Option<Vec<Elem>> {
        let s = self.spec;
        let idx = self.inserted;
        self.inserted += 1;
        let mut w = v;
        let mut comb = vec![Elem::ZERO; idx + 1];
        comb[idx] = Elem::ONE;
        for (p, row, rc) in &self.rows {
            let c = w[*p];
            if c.is_zero() {
                continue;
            }
            for (x, y) in w.iter_mut().zip(row) {
                *x = s.raw_sub(*x, s.raw_mul(c, *y));
            }
            for (x, y) in comb.iter_mut().zip(rc) {
                *x = s.raw_sub(*x, s.raw_mul(c, *y));
            }
        }
        match w.iter().position(|x| !x.is_zero()) {
            None => {
                // 0 = comb . inserted, with comb[idx] = 1
                Some(comb[..idx].iter().map(|&c| s.raw_neg(c)).collect())
            }
            Some(p) => {
                let inv = s.raw_inv(w[p]).expect("non-zero pivot");
                for x in w.iter_mut() {
                    *x = s.raw_mul(inv, *x);
                }
                for x in comb.iter_mut() {
                    *x = s.raw_mul(inv, *x);
                }
                // clear column p from existing rows to stay fully reduced
                for (_, row, rc) in self.rows.iter_mut() {
                    let c = row[p];
                    if c.is_zero() {
                        continue;
                    }
                    for (x, y) in row.iter_mut().zip(&w) {
                        *x = s.raw_sub(*x, s.raw_mul(c, *y));
                    }
                    rc.resize(idx + 1, Elem::ZERO);
                    for (x, y) in rc.iter_mut().zip(&comb) {
                        *x = s.raw_sub(*x, s.raw_mul(c, *y));
                    }
                }
                let at = self.rows.partition_point(|(q, _, _)| *q < p);
                self.rows.insert(at, (p, w, comb));
                None
            }
        }
    }
}

fn times(spec: &FieldSpec, v: &[Elem], m: &Matrix) -> Vec<Elem> {
    let n = m.cols();
    (0..n)
        .map(|j| {
            v.iter().enumerate().fold(Elem::ZERO, |acc, (i, &x)| {
                spec.raw_add(acc, spec.raw_mul(x, m[(i, j)]))
            })
        })
        .collect()
}

fn monic_from_dependency(spec: &FieldSpec, c: Vec<Elem>) -> Poly {
    let mut coeffs: Vec<Elem> = c.into_iter().map(|x| spec.raw_neg(x)).collect();
    coeffs.push(Elem::ONE);
    Poly::new(coeffs)
}

/// Least monic `p` with `v p(M) = 0`, from the Krylov sequence.
pub fn ord_poly_bruteforce(spec: &FieldSpec, m: &Matrix, v: &[Elem]) -> Result<Poly> {
    let n = check(m)?;
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    let mut t = Tracker::new(spec);
    let mut cur = v.to_vec();
    loop {
        if let Some(c) = t.insert(cur.clone()) {
            return Ok(monic_from_dependency(spec, c));
        }
        cur = times(spec, &cur, m);
    }
}

/// Least monic `p` with `p(M) = 0`, from the flattened powers of `M`.
pub fn min_poly_bruteforce(spec: &FieldSpec, m: &Matrix) -> Result<Poly> {
    let n = check(m)?;
    let mut t = Tracker::new(spec);
    let mut power = Matrix::identity(n);
    loop {
        let flat: Vec<Elem> = power.row_iter().flatten().copied().collect();
        if let Some(c) = t.insert(flat) {
            return Ok(monic_from_dependency(spec, c));
        }
        let rows: Vec<Vec<Elem>> = power.row_iter().map(|r| times(spec, r, m)).collect();
        power = Matrix::from_rows(rows)?;
    }
}

type P = Vec<Elem>;

fn trim(mut a: P) -> P {
    while a.last().is_some_and(|x| x.is_zero()) {
        a.pop();
    }
    a
}

fn pmul(s: &FieldSpec, a: &P, b: &P) -> P {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Elem::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = s.raw_add(out[i + j], s.raw_mul(x, y));
        }
    }
    trim(out)
}

fn psub(s: &FieldSpec, a: &P, b: &P) -> P {
    let mut out = vec![Elem::ZERO; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(Elem::ZERO);
        let y = b.get(i).copied().unwrap_or(Elem::ZERO);
        *o = s.raw_sub(x, y);
    }
    trim(out)
}

/// `a / b` where the division is known to be exact.
fn pdiv_exact(s: &FieldSpec, a: &P, b: &P) -> P {
    let mut r = a.clone();
    if r.is_empty() {
        return r;
    }
    let db = b.len() - 1;
    let inv = s.raw_inv(b[db]).expect("non-zero divisor");
    let mut q = vec![Elem::ZERO; r.len().saturating_sub(db)];
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let c = s.raw_mul(*r.last().unwrap(), inv);
        q[shift] = c;
        for (i, &y) in b.iter().enumerate() {
            r[shift + i] = s.raw_sub(r[shift + i], s.raw_mul(c, y));
        }
        r = trim(r);
    }
    debug_assert!(r.is_empty(), "inexact division in the determinant");
    trim(q)
}

/// `det(xI - M)` by fraction-free elimination over `F[x]`.
pub fn char_poly_bruteforce(spec: &FieldSpec, m: &Matrix) -> Result<Poly> {
    let n = check(m)?;
    if n == 0 {
        return Ok(Poly::one());
    }
    let mut a: Vec<Vec<P>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = spec.raw_neg(m[(i, j)]);
                    if i == j {
                        trim(vec![c, Elem::ONE])
                    } else {
                        trim(vec![c])
                    }
                })
                .collect()
        })
        .collect();
    let mut prev: P = vec![Elem::ONE];
    let mut negate = false;
    for k in 0..n - 1 {
        if a[k][k].is_empty() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_empty()) else {
                return Ok(Poly::zero());
            };
            a.swap(k, r);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = psub(
                    spec,
                    &pmul(spec, &a[i][j], &a[k][k]),
                    &pmul(spec, &a[i][k], &a[k][j]),
                );
                a[i][j] = pdiv_exact(spec, &num, &prev);
            }
            a[i][k] = Vec::new();
        }
        prev = a[k][k].clone();
    }
    let mut det = a[n - 1][n - 1].clone();
    if negate {
        det = det.into_iter().map(|x| spec.raw_neg(x)).collect();
    }
    Ok(Poly::new(det))
}
