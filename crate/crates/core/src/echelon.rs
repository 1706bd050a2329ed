//! Semi echelon data sequences and the clean-and-extend step.

use serde::Serialize;

use crate::budget::{BoundParams, BoundTag};
use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::linalg::Matrix;

/// `(Y, S, T, l)` with `T Y = S`, `S` in row semi echelon form with leading
/// columns `l`, and `T` lower triangular.
///
/// `T` keeps only its lower triangle: row `i` has length `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemiEchelonDataSequence {
    n: usize,
    y: Vec<Vec<Elem>>,
    s: Vec<Vec<Elem>>,
    t: Vec<Vec<Elem>>,
    l: Vec<usize>,
}

/// Result of one clean step: whether `v` was already in the row space, and
/// coefficients `a` with `v = a S'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cleaned {
    pub found: bool,
    pub a: Vec<Elem>,
}

impl SemiEchelonDataSequence {
    /// The length-0 sequence in dimension `n`.
    pub fn trivial(n: usize) -> SemiEchelonDataSequence {
        SemiEchelonDataSequence {
            n,
            y: Vec::new(),
            s: Vec::new(),
            t: Vec::new(),
            l: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.l.len()
    }

    pub fn is_empty(&self) -> bool {
        self.l.is_empty()
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn leading(&self) -> &[usize] {
        &self.l
    }

    pub fn y_row(&self, i: usize) -> &[Elem] {
        &self.y[i]
    }

    pub fn s_row(&self, i: usize) -> &[Elem] {
        &self.s[i]
    }

    /// Row `i` of `T` up to and including the diagonal.
    pub fn t_row(&self, i: usize) -> &[Elem] {
        &self.t[i]
    }

    pub fn y(&self) -> Matrix {
        self.dense(&self.y, self.n)
    }

    pub fn s(&self) -> Matrix {
        self.dense(&self.s, self.n)
    }

    /// `T` as a full `m x m` matrix.
    pub fn t_dense(&self) -> Matrix {
        let m = self.len();
        let mut out = Matrix::zero(m, m);
        for (i, row) in self.t.iter().enumerate() {
            out.row_mut(i)[..row.len()].copy_from_slice(row);
        }
        out
    }

    fn dense(&self, rows: &[Vec<Elem>], cols: usize) -> Matrix {
        let mut out = Matrix::zero(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            out.row_mut(i).copy_from_slice(r);
        }
        out
    }

    /// Reduces `v` against `S`. Returns `a` and the residue `w = v - a S`.
    fn reduce(&self, f: &Field, v: &[Elem]) -> (Vec<Elem>, Vec<Elem>) {
        let mut w = v.to_vec();
        let mut a = Vec::with_capacity(self.len() + 1);
        for (row, &lc) in self.s.iter().zip(&self.l) {
            let c = w[lc];
            a.push(c);
            f.sub_scaled(&mut w, c, row);
        }
        (a, w)
    }

    /// Whether `v` lies in the row space, without extending.
    pub fn contains(&self, f: &Field, v: &[Elem]) -> Result<bool> {
        self.check_len(v)?;
        Ok(self.reduce(f, v).1.iter().all(|e| e.is_zero()))
    }

    fn check_len(&self, v: &[Elem]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Writes `v` in terms of `S`, appending a new row if `v` is not in the span.
    pub fn clean_and_extend(&mut self, f: &Field, v: &[Elem]) -> Result<Cleaned> {
        self.check_len(v)?;
        let m = self.len();
        let start = f.ops();
        let (mut a, mut w) = self.reduce(f, v);
        let Some(j) = w.iter().position(|e| !e.is_zero()) else {
            f.record(
                BoundTag::CleanFound,
                || BoundParams::new().m(m as u64).n(self.n as u64),
                f.ops() - start,
            );
            return Ok(Cleaned { found: true, a });
        };
        let wj = w[j];
        let inv = f.inv(wj)?;
        // a T over the lower triangle
        let mut at = vec![Elem::ZERO; m + 1];
        for (i, row) in self.t.iter().enumerate() {
            f.axpy(&mut at[..i + 1], a[i], row);
        }
        let neg_inv = f.neg(inv);
        f.scale(&mut at[..m], neg_inv);
        at[m] = inv;
        f.scale(&mut w, inv);
        a.push(wj);
        self.y.push(v.to_vec());
        self.s.push(w);
        self.t.push(at);
        self.l.push(j);
        f.record(
            BoundTag::CleanExtend,
            || BoundParams::new().m(m as u64).n(self.n as u64),
            f.ops() - start,
        );
        Ok(Cleaned { found: false, a })
    }

    /// `a T` computed column by column over the lower triangle, `m^2` operations.
    pub(crate) fn times_t(&self, f: &Field, a: &[Elem]) -> Vec<Elem> {
        let m = self.len();
        let mut out = vec![Elem::ZERO; m];
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = f.mul(a[j], self.t[j][j]);
            for (ai, ti) in a[j + 1..m].iter().zip(&self.t[j + 1..m]) {
                acc = f.add(acc, f.mul(*ai, ti[j]));
            }
            *o = acc;
        }
        out
    }

    /// Checks `T Y = S`, the triangular shape of `T`, and the echelon conditions.
    pub fn check_invariants(&self, f: &Field) -> bool {
        let m = self.len();
        let g = f.fork();
        let ty = self.t_dense();
        for i in 0..m {
            let mut row = vec![Elem::ZERO; self.n];
            for (k, yk) in self.y.iter().enumerate().take(i + 1) {
                g.axpy(&mut row, ty[(i, k)], yk);
            }
            if row != self.s[i] || self.t[i].len() != i + 1 || self.t[i][i].is_zero() {
                return false;
            }
            let lc = self.l[i];
            if self.s[i][lc] != Elem::ONE {
                return false;
            }
            if self.s[i + 1..].iter().any(|r| !r[lc].is_zero()) {
                return false;
            }
            if self.l[..i].contains(&lc) {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;
    use crate::linalg::unit_vector;

    fn gf(q: u64) -> Field {
        Field::new(FieldSpec::from_order(q).unwrap())
    }

    fn v(xs: &[u32]) -> Vec<Elem> {
        xs.iter().map(|&x| Elem(x)).collect()
    }

    #[test]
    fn trivial_sequence() {
        let f = gf(5);
        let mut s = SemiEchelonDataSequence::trivial(5);
        assert_eq!(s.len(), 0);
        let c = s.clean_and_extend(&f, &[Elem::ZERO; 5]).unwrap();
        assert!(c.found && c.a.is_empty());
        let c = s.clean_and_extend(&f, &unit_vector(5, 0)).unwrap();
        assert!(!c.found);
        assert_eq!(s.len(), 1);
        assert_eq!(c.a, v(&[1]));
        assert_eq!(s.t_dense(), Matrix::identity(1));
        assert_eq!(s.leading(), &[0]);
    }

    #[test]
    fn found_and_extend_examples() {
        let f = gf(5);
        let mut s = SemiEchelonDataSequence::trivial(4);
        s.clean_and_extend(&f, &unit_vector(4, 0)).unwrap();
        let c = s.clean_and_extend(&f, &v(&[2, 0, 0, 0])).unwrap();
        assert!(c.found);
        assert_eq!(c.a, v(&[2]));
        let c = s.clean_and_extend(&f, &v(&[1, 2, 0, 0])).unwrap();
        assert!(!c.found);
        assert_eq!(s.s_row(1), &v(&[0, 1, 0, 0])[..]);
        assert_eq!(c.a, v(&[1, 2]));
        assert_eq!(s.t_dense().to_u32_rows(), vec![vec![1, 0], vec![2, 3]]);
        assert!(s.check_invariants(&f));
    }

    #[test]
    fn dimension_mismatch() {
        let f = gf(3);
        let mut s = SemiEchelonDataSequence::trivial(3);
        assert!(matches!(
            s.clean_and_extend(&f, &v(&[1, 0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn costs_meet_bounds_exactly_on_dense_inputs() {
        let f = gf(7);
        f.enable_call_log();
        let mut s = SemiEchelonDataSequence::trivial(6);
        for i in 0..6u32 {
            let row: Vec<Elem> = (0..6u32).map(|j| Elem((i * 3 + j * j + 1) % 7)).collect();
            s.clean_and_extend(&f, &row).unwrap();
            assert!(s.check_invariants(&f));
        }
        for rec in f.take_call_log() {
            let bound = crate::budget::bound_for(rec.tag, &rec.params).unwrap();
            assert!(num_bigint::BigInt::from(rec.measured) <= bound, "{rec:?}");
        }
    }

    #[test]
    fn times_t_matches_dense_product() {
        let f = gf(11);
        let mut s = SemiEchelonDataSequence::trivial(4);
        for row in [[3u32, 1, 4, 1], [5, 9, 2, 6], [5, 3, 5, 8], [9, 7, 9, 3]] {
            s.clean_and_extend(&f, &v(&row)).unwrap();
        }
        let a = v(&[2, 7, 1, 8]);
        let t = s.t_dense();
        let want: Vec<Elem> = (0..4)
            .map(|j| (0..4).fold(Elem::ZERO, |acc, i| f.add(acc, f.mul(a[i], t[(i, j)]))))
            .collect();
        let before = f.ops().total();
        assert_eq!(s.times_t(&f, &a), want);
        assert_eq!(f.ops().total() - before, 16);
    }
}
