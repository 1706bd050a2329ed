//! Dense row-major matrices, row-vector products, elimination, and the sparse
//! block-companion form of a conjugated matrix.

use std::fmt;

use crate::budget::{BoundParams, BoundTag};
use crate::error::{Error, Result};
use crate::gf::{Elem, Field};

/// A dense `rows x cols` matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![Elem::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        Self::scalar(n, Elem::ONE)
    }

    /// `c * I`.
    pub fn scalar(n: usize, c: Elem) -> Matrix {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = c;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Elem>>) -> Result<Matrix> {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r);
        }
        Ok(Matrix {
            rows: nrows,
            cols,
            data,
        })
    }

    /// Builds a matrix from raw encodings, checking each against the field order.
    pub fn from_u32_rows(q: u32, rows: &[Vec<u32>]) -> Result<Matrix> {
        let mut out = Vec::with_capacity(rows.len());
        for r in rows {
            let mut row = Vec::with_capacity(r.len());
            for &v in r {
                if v >= q {
                    return Err(Error::ElementOutOfRange { value: v as u64, q });
                }
                row.push(Elem(v));
            }
            out.push(row);
        }
        Matrix::from_rows(out)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Elem] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Elem]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        self.row_iter().map(<[Elem]>::to_vec).collect()
    }

    pub fn to_u32_rows(&self) -> Vec<Vec<u32>> {
        self.row_iter()
            .map(|r| r.iter().map(|e| e.value()).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Block-diagonal sum of square blocks.
    pub fn block_diag(blocks: &[Matrix]) -> Matrix {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut m = Matrix::zero(n, n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.rows {
                m.row_mut(off + i)[off..off + b.cols].copy_from_slice(b.row(i));
            }
            off += b.rows;
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub(crate) fn check_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Elem;
    fn index(&self, (i, j): (usize, usize)) -> &Elem {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Elem {
        &mut self.data[i * self.cols + j]
    }
}

/// `e_i` of length `n` (zero-based `i`).
pub fn unit_vector(n: usize, i: usize) -> Vec<Elem> {
    let mut v = vec![Elem::ZERO; n];
    v[i] = Elem::ONE;
    v
}

/// Row vector times matrix, `v * M`.
pub fn mat_vec(f: &Field, v: &[Elem], m: &Matrix) -> Result<Vec<Elem>> {
    if v.len() != m.rows {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            found: v.len(),
        });
    }
    let mut out = vec![Elem::ZERO; m.cols];
    for (i, &c) in v.iter().enumerate() {
        f.axpy(&mut out, c, m.row(i));
    }
    Ok(out)
}

/// `A * B`. The first term of each output row is a plain scaling, so a square
/// product costs `2n^3 - n^2`.
pub fn mat_mul(f: &Field, a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            expected: a.cols,
            found: b.rows,
        });
    }
    let start = f.ops();
    let mut out = Matrix::zero(a.rows, b.cols);
    if a.cols > 0 {
        for i in 0..a.rows {
            let arow = a.row(i);
            let orow = out.row_mut(i);
            orow.copy_from_slice(b.row(0));
            f.scale(orow, arow[0]);
            for (j, &c) in arow.iter().enumerate().skip(1) {
                f.axpy(orow, c, b.row(j));
            }
        }
    }
    if a.rows == a.cols && a.cols == b.cols {
        f.record(
            BoundTag::MatMul,
            || BoundParams::new().n(a.rows as u64),
            f.ops() - start,
        );
    }
    Ok(out)
}

/// `A + c * I` in place, `n` additions.
pub(crate) fn add_scalar_diag(f: &Field, a: &mut Matrix, c: Elem) {
    for i in 0..a.rows.min(a.cols) {
        a[(i, i)] = f.add(a[(i, i)], c);
    }
}

/// Forward elimination in place; returns the rank. Rows of `a` are combined,
/// never columns. One inversion per pivot, then a multiplier and a row update
/// for every row below with a non-zero entry in the pivot column.
fn eliminate_rank(f: &Field, a: &mut Matrix) -> usize {
    let (rows, cols) = (a.rows, a.cols);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[(r, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(rank, p);
        let inv = f.inv(a[(rank, c)]).expect("pivot is non-zero");
        let pivot: Vec<Elem> = a.row(rank)[c + 1..].to_vec();
        for r in rank + 1..rows {
            let x = a[(r, c)];
            if x.is_zero() {
                continue;
            }
            let factor = f.mul(x, inv);
            a[(r, c)] = Elem::ZERO;
            f.sub_scaled(&mut a.row_mut(r)[c + 1..], factor, &pivot);
        }
        rank += 1;
    }
    rank
}

pub fn rank(f: &Field, m: &Matrix) -> usize {
    let mut a = m.clone();
    eliminate_rank(f, &mut a)
}

/// Dimension of `{v : vM = 0}`, computed as `n - rank`. Costs at most `n^3`.
pub fn nullspace_dim(f: &Field, m: &Matrix) -> Result<usize> {
    let n = m.check_square()?;
    let start = f.ops();
    let r = rank(f, m);
    f.record(
        BoundTag::NullspaceDim,
        || BoundParams::new().n(n as u64),
        f.ops() - start,
    );
    Ok(n - r)
}

/// Basis (as rows) of the left kernel `{v : vM = 0}`, by reducing `[M | I]`.
pub fn left_kernel(f: &Field, m: &Matrix) -> Matrix {
    let (rows, cols) = (m.rows, m.cols);
    let mut aug = Matrix::zero(rows, cols + rows);
    for i in 0..rows {
        aug.row_mut(i)[..cols].copy_from_slice(m.row(i));
        aug[(i, cols + i)] = Elem::ONE;
    }
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !aug[(r, c)].is_zero()) else {
            continue;
        };
        aug.swap_rows(rank, p);
        let inv = f.inv(aug[(rank, c)]).expect("pivot is non-zero");
        let pivot: Vec<Elem> = aug.row(rank).to_vec();
        for r in rank + 1..rows {
            let x = aug[(r, c)];
            if !x.is_zero() {
                let factor = f.mul(x, inv);
                f.sub_scaled(aug.row_mut(r), factor, &pivot);
            }
        }
        rank += 1;
    }
    let basis: Vec<Vec<Elem>> = (rank..rows).map(|r| aug.row(r)[cols..].to_vec()).collect();
    Matrix {
        rows: basis.len(),
        cols: rows,
        data: basis.into_iter().flatten().collect(),
    }
}

/// Inverse by Gauss-Jordan on `[M | I]`.
pub fn mat_inverse(f: &Field, m: &Matrix) -> Result<Matrix> {
    let n = m.check_square()?;
    let mut aug = Matrix::zero(n, 2 * n);
    for i in 0..n {
        aug.row_mut(i)[..n].copy_from_slice(m.row(i));
        aug[(i, n + i)] = Elem::ONE;
    }
    for c in 0..n {
        let p = (c..n)
            .find(|&r| !aug[(r, c)].is_zero())
            .ok_or(Error::Singular)?;
        aug.swap_rows(c, p);
        let inv = f.inv(aug[(c, c)])?;
        f.scale(aug.row_mut(c), inv);
        let pivot: Vec<Elem> = aug.row(c).to_vec();
        for r in 0..n {
            let x = aug[(r, c)];
            if r != c && !x.is_zero() {
                f.sub_scaled(aug.row_mut(r), x, &pivot);
            }
        }
    }
    let mut out = Matrix::zero(n, n);
    for i in 0..n {
        out.row_mut(i).copy_from_slice(&aug.row(i)[n..]);
    }
    Ok(out)
}

/// Companion matrix of a monic polynomial given by its coefficients
/// `c_0..c_{d-1}` (the leading 1 omitted). Row convention: `e_i M = e_{i+1}`
/// for `i < d-1`, and the last row is `(-c_0, ..., -c_{d-1})`.
pub fn companion(f: &Field, lower_coeffs: &[Elem]) -> Matrix {
    let d = lower_coeffs.len();
    let mut m = Matrix::zero(d, d);
    for i in 0..d.saturating_sub(1) {
        m[(i, i + 1)] = Elem::ONE;
    }
    if d > 0 {
        for (j, &c) in lower_coeffs.iter().enumerate() {
            m[(d - 1, j)] = f.spec().raw_neg(c);
        }
    }
    m
}

/// The conjugate `Y M Y^{-1}` of a spun matrix in block-companion form.
///
/// Block `i` occupies rows `s_{i-1}..s_i`; inside a block each row maps to the
/// next, and the last row of block `i` is `b^(i)`, supported on the first `s_i`
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseConjugate {
    degrees: Vec<usize>,
    sums: Vec<usize>,
    b: Vec<Vec<Elem>>,
}

impl SparseConjugate {
    /// `b[i]` must have length `s_{i+1}`; longer inputs must be zero past it.
    pub fn new(degrees: Vec<usize>, mut b: Vec<Vec<Elem>>) -> Result<SparseConjugate> {
        if degrees.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: degrees.len(),
                found: b.len(),
            });
        }
        let mut sums = vec![0];
        for &d in &degrees {
            if d == 0 {
                return Err(Error::InvalidSpec("block of degree 0".into()));
            }
            sums.push(sums.last().unwrap() + d);
        }
        for (i, row) in b.iter_mut().enumerate() {
            let s = sums[i + 1];
            if row.len() < s {
                return Err(Error::DimensionMismatch {
                    expected: s,
                    found: row.len(),
                });
            }
            if row[s..].iter().any(|e| !e.is_zero()) {
                return Err(Error::SupportViolation { bound: s });
            }
            row.truncate(s);
        }
        Ok(SparseConjugate { degrees, sums, b })
    }

    pub fn n(&self) -> usize {
        *self.sums.last().unwrap()
    }

    /// Number of blocks.
    pub fn k(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// `s_0 = 0, s_1, ..., s_k`.
    pub fn partial_sums(&self) -> &[usize] {
        &self.sums
    }

    /// `b^(i)` for one-based `i`, truncated to its support.
    pub fn b(&self, i: usize) -> &[Elem] {
        &self.b[i - 1]
    }

    /// Negated trailing coefficients of `p^(i)`, i.e. the companion row of block `i`.
    pub fn companion_row(&self, i: usize) -> &[Elem] {
        &self.b[i - 1][self.sums[i - 1]..self.sums[i]]
    }

    pub fn to_dense(&self) -> Matrix {
        let n = self.n();
        let mut m = Matrix::zero(n, n);
        for i in 1..=self.k() {
            let (lo, hi) = (self.sums[i - 1], self.sums[i]);
            for r in lo..hi - 1 {
                m[(r, r + 1)] = Elem::ONE;
            }
            m.row_mut(hi - 1)[..hi].copy_from_slice(&self.b[i - 1]);
        }
        m
    }

    /// `w * M'` for `w` supported on the first `s_i` coordinates (one-based block
    /// bound `i`). The shift within blocks is free; each block's last row adds a
    /// multiple of `b^(r)`, `2 s_r` operations.
    pub fn apply(&self, f: &Field, w: &[Elem], i: usize) -> Result<Vec<Elem>> {
        let n = self.n();
        if w.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: w.len(),
            });
        }
        let bound = self.sums[i];
        if w[bound..].iter().any(|e| !e.is_zero()) {
            return Err(Error::SupportViolation { bound });
        }
        let start = f.ops();
        let mut out = vec![Elem::ZERO; n];
        self.apply_prefix(f, &w[..bound], &mut out[..bound], i);
        f.record(
            BoundTag::SparseApply,
            || BoundParams::new().sums(self.sums[1..=i].iter().map(|&s| s as u64).collect()),
            f.ops() - start,
        );
        Ok(out)
    }

    /// Core of [`apply`](Self::apply) on prefixes of length `s_i`; `out` must be zero.
    pub(crate) fn apply_prefix(&self, f: &Field, w: &[Elem], out: &mut [Elem], i: usize) {
        for r in 1..=i {
            let (lo, hi) = (self.sums[r - 1], self.sums[r]);
            out[lo + 1..hi].copy_from_slice(&w[lo..hi - 1]);
        }
        for r in 1..=i {
            let hi = self.sums[r];
            f.axpy(&mut out[..hi], w[hi - 1], &self.b[r - 1]);
        }
    }
}
