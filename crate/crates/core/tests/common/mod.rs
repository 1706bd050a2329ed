//! Corpus builders shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use minpoly_core::matgen::{gen_from_spec, gen_random, Generated, PrimaryCyclicSpec};
use minpoly_core::poly::{is_irreducible, Poly};
use minpoly_core::{Elem, Field, FieldSpec, Matrix, SeededRng};
use rand::Rng;

pub const CORPUS_FIELDS: [u64; 6] = [2, 3, 4, 5, 9, 25];

pub fn field(q: u64) -> Field {
    Field::new(FieldSpec::from_order(q).unwrap())
}

pub fn spec_of(q: u64) -> Arc<FieldSpec> {
    FieldSpec::from_order(q).unwrap()
}

/// Uniform monic polynomial of degree `d`.
pub fn random_monic(f: &Field, d: usize, rng: &mut SeededRng) -> Poly {
    let q = f.order();
    let mut c: Vec<Elem> = (0..d)
        .map(|_| f.spec().elem(rng.gen_range(0..q) as u64).unwrap())
        .collect();
    c.push(Elem::ONE);
    Poly::new(c)
}

/// Random irreducible of degree `d`, by rejection.
pub fn random_irreducible(f: &Field, d: usize, rng: &mut SeededRng) -> Poly {
    let g = f.fork();
    loop {
        let p = random_monic(f, d, rng);
        if is_irreducible(&g, &p).unwrap() {
            return p;
        }
    }
}

/// Random primary cyclic structure of dimension exactly `n`, using
/// irreducibles of degree at most `max_deg`.
pub fn random_spec(f: &Field, n: usize, max_deg: usize, rng: &mut SeededRng) -> PrimaryCyclicSpec {
    let mut parts: Vec<(Poly, Vec<u32>)> = Vec::new();
    let mut rem = n;
    while rem > 0 {
        let reuse: Vec<usize> = (0..parts.len())
            .filter(|&i| parts[i].0.deg0() <= rem)
            .collect();
        if !reuse.is_empty() && rng.gen_bool(0.5) {
            let i = reuse[rng.gen_range(0..reuse.len())];
            let d = parts[i].0.deg0();
            let e = rng.gen_range(1..=(rem / d).min(4));
            parts[i].1.push(e as u32);
            rem -= d * e;
            continue;
        }
        let d = rng.gen_range(1..=rem.min(max_deg));
        let p = random_irreducible(f, d, rng);
        let e = rng.gen_range(1..=(rem / d).min(5));
        match parts.iter_mut().find(|(q, _)| *q == p) {
            Some(slot) => slot.1.push(e as u32),
            None => parts.push((p, vec![e as u32])),
        }
        rem -= d * e;
    }
    PrimaryCyclicSpec::new(f, parts).unwrap()
}

/// A random matrix with roughly `density` non-zero entries.
pub fn sparse_random(n: usize, f: &Field, density: f64, rng: &mut SeededRng) -> Matrix {
    let mut m = gen_random(n, f.spec(), rng);
    for i in 0..n {
        for j in 0..n {
            if !rng.gen_bool(density) {
                m[(i, j)] = Elem::ZERO;
            }
        }
    }
    m
}

/// One member of the small-matrix corpus, `n <= 12`.
pub struct CorpusItem {
    pub q: u64,
    pub matrix: Matrix,
    pub known: Option<Generated>,
}

pub fn corpus_item(idx: usize, base_seed: u64) -> CorpusItem {
    let q = CORPUS_FIELDS[idx % CORPUS_FIELDS.len()];
    let n = 1 + (idx / CORPUS_FIELDS.len()) % 12;
    let f = field(q);
    let mut rng = SeededRng::new(base_seed).split(idx as u64);
    let kind = (idx / (CORPUS_FIELDS.len() * 12)) % 5;
    let (matrix, known) = match kind {
        0 => (gen_random(n, f.spec(), &mut rng), None),
        1 => (sparse_random(n, &f, 0.25, &mut rng), None),
        2 | 3 => {
            let spec = random_spec(&f, n, 3, &mut rng);
            let g = gen_from_spec(&spec, &f, &mut rng, kind == 2).unwrap();
            (g.matrix.clone(), Some(g))
        }
        _ => {
            // repeated small blocks: many spun vectors
            let spec = random_spec(&f, n, 1, &mut rng);
            let g = gen_from_spec(&spec, &f, &mut rng, true).unwrap();
            (g.matrix.clone(), Some(g))
        }
    };
    CorpusItem { q, matrix, known }
}
