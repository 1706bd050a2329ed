//! Test matrix generators: uniform random matrices, random invertible
//! matrices, and matrices with a prescribed primary cyclic decomposition.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Elem, Field, FieldSpec};
use crate::linalg::{companion, mat_inverse, mat_mul, rank, Matrix};
use crate::poly::{self, is_irreducible, FactoredPoly, Poly};
use crate::rng::SeededRng;
use crate::spin::random_vector;

/// Uniform i.i.d. entries.
pub fn gen_random(n: usize, spec: &FieldSpec, rng: &mut SeededRng) -> Matrix {
    let rows = (0..n).map(|_| random_vector(spec, n, rng)).collect();
    Matrix::from_rows(rows).expect("rows have equal length")
}

/// Uniform invertible matrix by rejection, together with the number of draws used.
pub fn gen_invertible_counted(n: usize, f: &Field, rng: &mut SeededRng) -> (Matrix, u64) {
    let g = f.fork();
    let mut attempts = 0;
    loop {
        attempts += 1;
        let m = gen_random(n, f.spec(), rng);
        if rank(&g, &m) == n {
            return (m, attempts);
        }
    }
}

/// Uniform invertible matrix by rejection.
pub fn gen_invertible(n: usize, f: &Field, rng: &mut SeededRng) -> Matrix {
    gen_invertible_counted(n, f, rng).0
}

/// One irreducible with the sizes of its primary cyclic summands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimaryComponent {
    pub factor: Poly,
    /// Non-increasing.
    pub exponents: Vec<u32>,
}

/// Direct sum of primary cyclic modules, grouped by irreducible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimaryCyclicSpec {
    components: Vec<PrimaryComponent>,
}

impl PrimaryCyclicSpec {
    /// Validates the factors (monic, irreducible, distinct) and exponents (all at least 1).
    pub fn new(f: &Field, parts: Vec<(Poly, Vec<u32>)>) -> Result<PrimaryCyclicSpec> {
        let g = f.fork();
        let mut components: Vec<PrimaryComponent> = Vec::with_capacity(parts.len());
        for (factor, mut exponents) in parts {
            if factor.is_constant() || !factor.is_monic() {
                return Err(Error::InvalidSpec(format!(
                    "{factor} is not a monic non-constant polynomial"
                )));
            }
            if factor.coeffs().iter().any(|c| c.value() >= f.order()) {
                return Err(Error::InvalidSpec(format!(
                    "{factor} has coefficients outside the field"
                )));
            }
            if !is_irreducible(&g, &factor)? {
                return Err(Error::InvalidSpec(format!("{factor} is reducible")));
            }
            if exponents.is_empty() || exponents.contains(&0) {
                return Err(Error::InvalidSpec(format!(
                    "exponents for {factor} must be non-empty and positive"
                )));
            }
            if components.iter().any(|c| c.factor == factor) {
                return Err(Error::InvalidSpec(format!("{factor} appears twice")));
            }
            exponents.sort_unstable_by(|a, b| b.cmp(a));
            components.push(PrimaryComponent { factor, exponents });
        }
        if components.is_empty() {
            return Err(Error::InvalidSpec("no components".into()));
        }
        Ok(PrimaryCyclicSpec { components })
    }

    pub fn components(&self) -> &[PrimaryComponent] {
        &self.components
    }

    /// Dimension of the module.
    pub fn n(&self) -> usize {
        self.components
            .iter()
            .map(|c| c.factor.deg0() * c.exponents.iter().map(|&e| e as usize).sum::<usize>())
            .sum()
    }

    pub fn known_min(&self) -> FactoredPoly {
        FactoredPoly::from_pairs(
            self.components
                .iter()
                .map(|c| (c.factor.clone(), c.exponents[0])),
        )
    }

    pub fn known_char(&self) -> FactoredPoly {
        FactoredPoly::from_pairs(
            self.components
                .iter()
                .map(|c| (c.factor.clone(), c.exponents.iter().sum())),
        )
    }
}

/// A generated matrix with its minimal and characteristic polynomials.
#[derive(Clone, Debug)]
pub struct Generated {
    pub matrix: Matrix,
    pub known_min: FactoredPoly,
    pub known_char: FactoredPoly,
}

/// Block diagonal of the companion matrices of every `q^e`, conjugated by a
/// random invertible `g` when asked.
pub fn gen_from_spec(
    spec: &PrimaryCyclicSpec,
    f: &Field,
    rng: &mut SeededRng,
    conjugate: bool,
) -> Result<Generated> {
    let g = f.fork();
    let mut blocks = Vec::new();
    for c in spec.components() {
        for &e in &c.exponents {
            let power = poly::pow(&g, &c.factor, e as u64);
            let d = power.deg0();
            blocks.push(companion(&g, &power.coeffs()[..d]));
        }
    }
    let mut matrix = Matrix::block_diag(&blocks);
    if conjugate {
        let n = matrix.rows();
        let c = gen_invertible(n, f, rng);
        let ci = mat_inverse(&g, &c)?;
        matrix = mat_mul(&g, &mat_mul(&g, &c, &matrix)?, &ci)?;
    }
    Ok(Generated {
        matrix,
        known_min: spec.known_min(),
        known_char: spec.known_char(),
    })
}

/// Least monic irreducible of degree `d` under the coefficient ordering.
pub fn least_irreducible(f: &Field, d: usize) -> Result<Poly> {
    if d == 0 {
        return Err(Error::ZeroDegree);
    }
    let g = f.fork();
    let q = f.order() as u64;
    let mut digits = vec![0u64; d];
    loop {
        let mut c: Vec<Elem> = digits.iter().map(|&x| Elem(x as u32)).collect();
        c.push(Elem::ONE);
        let p = Poly::new(c);
        if is_irreducible(&g, &p)? {
            return Ok(p);
        }
        // odometer, low coefficient fastest
        let mut i = 0;
        loop {
            if i == d {
                return Err(Error::InvalidSpec(format!("no irreducible of degree {d}")));
            }
            digits[i] += 1;
            if digits[i] < q {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Named families. `M1` is a uniform random matrix of size `N`; the others
/// are primary cyclic constructions scaled by `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    M1,
    M3,
    M4,
    M5,
    M6,
    M7,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::M1,
        Family::M3,
        Family::M4,
        Family::M5,
        Family::M6,
        Family::M7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::M1 => "m1",
            Family::M3 => "m3",
            Family::M4 => "m4",
            Family::M5 => "m5",
            Family::M6 => "m6",
            Family::M7 => "m7",
        }
    }

    /// Structure of the family at scale `n`; `None` for `M1`.
    pub fn spec(self, f: &Field, n: u32) -> Result<Option<PrimaryCyclicSpec>> {
        if n == 0 {
            return Err(Error::InvalidSpec("scale must be positive".into()));
        }
        let zeta = f.spec().primitive_element();
        let lin = |a: Elem| Poly::linear(f, a);
        let parts = match self {
            Family::M1 => return Ok(None),
            Family::M3 => {
                let mut e = vec![n];
                e.extend(std::iter::repeat_n(1, n as usize));
                vec![(lin(zeta), e)]
            }
            Family::M4 => {
                let mut e = vec![2; n as usize];
                e.extend(std::iter::repeat_n(1, n as usize));
                vec![(lin(zeta), e)]
            }
            Family::M5 => {
                if n > f.order() {
                    return Err(Error::InvalidSpec(format!(
                        "m5 needs {n} distinct elements, field has {}",
                        f.order()
                    )));
                }
                f.spec()
                    .elements()
                    .take(n as usize)
                    .map(|a| (lin(a), vec![2, 1]))
                    .collect()
            }
            Family::M6 => {
                let q = if f.order() == 2 {
                    Poly::from_u32(2, &[1, 0, 1, 1])?
                } else {
                    least_irreducible(f, 3)?
                };
                let mut ladder = Vec::new();
                let mut e = n;
                while e >= 1 {
                    ladder.push(e);
                    e /= 2;
                }
                vec![(q, ladder)]
            }
            Family::M7 => {
                let q = least_irreducible(f, 10)?;
                vec![(q, vec![n, 1, 2, 3, 1, 2, 3])]
            }
        };
        PrimaryCyclicSpec::new(f, parts).map(Some)
    }

    /// Dimension at scale `n`.
    pub fn dimension(self, f: &Field, n: u32) -> Result<usize> {
        Ok(match self.spec(f, n)? {
            None => n as usize,
            Some(s) => s.n(),
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family {s:?}")))
    }
}

/// A family member, conjugated for the structured families. Random
/// matrices carry no known polynomials.
pub fn gen_family(
    family: Family,
    n: u32,
    f: &Field,
    rng: &mut SeededRng,
) -> Result<(Matrix, Option<(PrimaryCyclicSpec, Generated)>)> {
    match family.spec(f, n)? {
        None => Ok((gen_random(n as usize, f.spec(), rng), None)),
        Some(spec) => {
            let g = gen_from_spec(&spec, f, rng, true)?;
            Ok((g.matrix.clone(), Some((spec, g))))
        }
    }
}
