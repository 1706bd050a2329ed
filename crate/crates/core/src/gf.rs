//! Arithmetic in GF(p^k) for small prime powers.
//!
//! A [`FieldSpec`] is an immutable description of the field together with the
//! lookup tables used for arithmetic. All counted arithmetic goes through a
//! [`Field`], which pairs a shared spec with its own [`OpCounter`]. One `Field`
//! belongs to one computation; use [`Field::fork`] to get a second context with
//! a fresh counter.
//!
//! Elements are stored as their integer encoding: the base-`p` evaluation of
//! the coefficient vector over the polynomial basis. For `k = 1` this is just
//! the residue.

use std::cell::{Cell, RefCell};
use std::fmt;
use std::ops::{Add, AddAssign, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::budget::{BoundParams, BoundTag, CallRecord};
use crate::error::{Error, Result};

/// Largest field order accepted by [`FieldSpec::new`].
pub const DEFAULT_MAX_ORDER: u64 = 1 << 20;

/// Fields of at most this order use full addition and multiplication tables.
const TABLE_LIMIT: u32 = 256;

/// An element of some GF(q), in its integer encoding.
#[derive(Copy, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub(crate) u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    q: usize,
    add: Vec<u16>,
    sub: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

/// Log/antilog tables plus the Zech logarithm `Z(d) = log(1 + g^d)`.
struct Zech {
    order: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    minus_one: u32,
}

const ZECH_NONE: u32 = u32::MAX;

enum Arith {
    Table(Tables),
    Prime { p: u64 },
    Zech(Zech),
}

/// Immutable description of GF(p^k).
pub struct FieldSpec {
    p: u32,
    k: u32,
    q: u32,
    defining_poly: Option<Vec<u32>>,
    primitive: Elem,
    arith: Arith,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("q", &self.q)
            .field("defining_poly", &self.defining_poly)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.defining_poly == other.defining_poly
    }
}

impl Eq for FieldSpec {}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn digits(mut v: u32, p: u32, k: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(k as usize);
    for _ in 0..k {
        d.push(v % p);
        v /= p;
    }
    d
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Remainder of `a` modulo the monic polynomial `m` over GF(p), coefficients low to high.
fn rem_mod_p(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let p64 = p as u64;
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let base = r.len() - dm;
            for (i, &c) in m[..dm].iter().enumerate() {
                let t = lead * c as u64 % p64;
                r[base + i] = (r[base + i] + p64 - t) % p64;
            }
        }
    }
    r.into_iter().map(|c| c as u32).collect()
}

fn is_irreducible_mod_p(f: &[u32], p: u32) -> bool {
    let k = f.len() - 1;
    if k <= 1 {
        return true;
    }
    for d in 1..=k / 2 {
        let count = (p as u64).pow(d as u32);
        for t in 0..count {
            let mut g = digits(t as u32, p, d as u32);
            g.push(1);
            if rem_mod_p(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Least monic irreducible polynomial of degree `k` over GF(p), ordered by the
/// integer encoding of its lower coefficients.
fn least_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = (p as u64).pow(k);
    for t in 0..count {
        let mut f = digits(t as u32, p, k);
        f.push(1);
        if f[0] != 0 && is_irreducible_mod_p(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Uncounted arithmetic on the polynomial basis, used to build tables.
struct Slow<'a> {
    p: u32,
    k: u32,
    modulus: &'a [u32],
}

impl Slow<'_> {
    fn add(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (digits(a, self.p, self.k), digits(b, self.p, self.k));
        let s: Vec<u32> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        undigits(&s, self.p)
    }

    fn neg(&self, a: u32) -> u32 {
        let x = digits(a, self.p, self.k);
        let s: Vec<u32> = x.iter().map(|&u| (self.p - u) % self.p).collect();
        undigits(&s, self.p)
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (digits(a, self.p, self.k), digits(b, self.p, self.k));
        let p = self.p as u64;
        let mut prod = vec![0u32; 2 * self.k as usize - 1];
        for (i, &u) in x.iter().enumerate() {
            for (j, &v) in y.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + u as u64 * v as u64) % p) as u32;
            }
        }
        let r = rem_mod_p(&prod, self.modulus, self.p);
        let mut d = r;
        d.resize(self.k as usize, 0);
        undigits(&d, self.p)
    }

    fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

fn prime_pow(a: u64, mut e: u64, p: u64) -> u64 {
    let mut base = a % p;
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

impl FieldSpec {
    /// GF(p^k) with the default size limit.
    pub fn new(p: u64, k: u32) -> Result<Arc<FieldSpec>> {
        Self::with_limit(p, k, DEFAULT_MAX_ORDER)
    }

    pub fn with_limit(p: u64, k: u32, limit: u64) -> Result<Arc<FieldSpec>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k < 1 {
            return Err(Error::ZeroDegree);
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= limit.min(u32::MAX as u64));
        let Some(q) = q else {
            return Err(Error::OrderTooLarge { p, k, limit });
        };
        let (p, q) = (p as u32, q as u32);
        let defining_poly = (k > 1).then(|| least_irreducible(p, k));
        let modulus: Vec<u32> = defining_poly.clone().unwrap_or_else(|| vec![0, 1]);
        let slow = Slow {
            p,
            k,
            modulus: &modulus,
        };

        let group_primes = prime_factors(q as u64 - 1);
        let is_generator = |g: u32| {
            group_primes
                .iter()
                .all(|&r| slow.pow(g, (q as u64 - 1) / r) != 1)
        };
        let primitive = if q == 2 {
            1
        } else {
            (2..q)
                .find(|&g| is_generator(g))
                .expect("multiplicative group is cyclic")
        };

        let arith = if q <= TABLE_LIMIT {
            let qs = q as usize;
            let mut t = Tables {
                q: qs,
                add: vec![0; qs * qs],
                sub: vec![0; qs * qs],
                mul: vec![0; qs * qs],
                neg: vec![0; qs],
                inv: vec![0; qs],
            };
            for a in 0..q {
                t.neg[a as usize] = slow.neg(a) as u16;
            }
            for a in 0..q {
                for b in 0..q {
                    let idx = a as usize * qs + b as usize;
                    t.add[idx] = slow.add(a, b) as u16;
                    t.sub[idx] = slow.add(a, t.neg[b as usize] as u32) as u16;
                    t.mul[idx] = slow.mul(a, b) as u16;
                }
            }
            for a in 1..qs {
                let b = (1..qs).find(|&b| t.mul[a * qs + b] == 1).unwrap();
                t.inv[a] = b as u16;
            }
            Arith::Table(t)
        } else if k == 1 {
            Arith::Prime { p: p as u64 }
        } else {
            let order = q - 1;
            let mut exp = Vec::with_capacity(order as usize);
            let mut log = vec![0u32; q as usize];
            let mut x = 1u32;
            for i in 0..order {
                exp.push(x);
                log[x as usize] = i;
                x = slow.mul(x, primitive);
            }
            let zech = (0..order)
                .map(|d| {
                    let s = slow.add(1, exp[d as usize]);
                    if s == 0 {
                        ZECH_NONE
                    } else {
                        log[s as usize]
                    }
                })
                .collect();
            let minus_one = if p == 2 { 0 } else { order / 2 };
            Arith::Zech(Zech {
                order,
                exp,
                log,
                zech,
                minus_one,
            })
        };

        Ok(Arc::new(FieldSpec {
            p,
            k,
            q,
            defining_poly,
            primitive: Elem(primitive),
            arith,
        }))
    }

    /// Field of order `q`, which must be a prime power.
    pub fn from_order(q: u64) -> Result<Arc<FieldSpec>> {
        let (p, k) = split_prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, k)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Monic defining polynomial over GF(p), coefficients low to high. `None` for prime fields.
    pub fn defining_poly(&self) -> Option<&[u32]> {
        self.defining_poly.as_deref()
    }

    /// The least primitive element under the integer encoding.
    pub fn primitive_element(&self) -> Elem {
        self.primitive
    }

    /// The element with integer encoding `v`.
    pub fn elem(&self, v: u64) -> Result<Elem> {
        if v < self.q as u64 {
            Ok(Elem(v as u32))
        } else {
            Err(Error::ElementOutOfRange {
                value: v,
                q: self.q,
            })
        }
    }

    pub fn elems(&self, vs: &[u64]) -> Result<Vec<Elem>> {
        vs.iter().map(|&v| self.elem(v)).collect()
    }

    /// Embeds an integer via its residue modulo p.
    pub fn from_int(&self, v: i64) -> Elem {
        Elem(v.rem_euclid(self.p as i64) as u32)
    }

    /// All field elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(Elem)
    }

    #[inline]
    pub(crate) fn raw_add(&self, a: Elem, b: Elem) -> Elem {
        match &self.arith {
            Arith::Table(t) => Elem(t.add[a.0 as usize * t.q + b.0 as usize] as u32),
            Arith::Prime { p } => {
                let s = a.0 as u64 + b.0 as u64;
                Elem(if s >= *p { s - p } else { s } as u32)
            }
            Arith::Zech(z) => z.add(a.0, b.0),
        }
    }

    #[inline]
    pub(crate) fn raw_neg(&self, a: Elem) -> Elem {
        match &self.arith {
            Arith::Table(t) => Elem(t.neg[a.0 as usize] as u32),
            Arith::Prime { p } => Elem(if a.0 == 0 {
                0
            } else {
                (*p - a.0 as u64) as u32
            }),
            Arith::Zech(z) => {
                if a.0 == 0 {
                    a
                } else {
                    Elem(z.exp[((z.log[a.0 as usize] + z.minus_one) % z.order) as usize])
                }
            }
        }
    }

    #[inline]
    pub(crate) fn raw_sub(&self, a: Elem, b: Elem) -> Elem {
        match &self.arith {
            Arith::Table(t) => Elem(t.sub[a.0 as usize * t.q + b.0 as usize] as u32),
            Arith::Prime { p } => {
                let (x, y) = (a.0 as u64, b.0 as u64);
                Elem(if x >= y { x - y } else { x + p - y } as u32)
            }
            Arith::Zech(_) => self.raw_add(a, self.raw_neg(b)),
        }
    }

    #[inline]
    pub(crate) fn raw_mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.arith {
            Arith::Table(t) => Elem(t.mul[a.0 as usize * t.q + b.0 as usize] as u32),
            Arith::Prime { p } => Elem((a.0 as u64 * b.0 as u64 % p) as u32),
            Arith::Zech(z) => z.mul(a.0, b.0),
        }
    }

    pub(crate) fn raw_inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.arith {
            Arith::Table(t) => Elem(t.inv[a.0 as usize] as u32),
            Arith::Prime { p } => Elem(prime_pow(a.0 as u64, p - 2, *p) as u32),
            Arith::Zech(z) => Elem(z.exp[((z.order - z.log[a.0 as usize]) % z.order) as usize]),
        })
    }

    pub(crate) fn raw_pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.raw_mul(acc, base);
            }
            base = self.raw_mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order of a non-zero element.
    pub fn multiplicative_order(&self, a: Elem) -> Option<u64> {
        if a.is_zero() {
            return None;
        }
        let mut ord = self.q as u64 - 1;
        for r in prime_factors(ord) {
            while ord.is_multiple_of(r) && self.raw_pow(a, ord / r) == Elem::ONE {
                ord /= r;
            }
        }
        Some(ord)
    }
}

impl Zech {
    #[inline]
    fn mul(&self, a: u32, b: u32) -> Elem {
        if a == 0 || b == 0 {
            return Elem(0);
        }
        let s = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % self.order as u64;
        Elem(self.exp[s as usize])
    }

    #[inline]
    fn add(&self, a: u32, b: u32) -> Elem {
        if a == 0 {
            return Elem(b);
        }
        if b == 0 {
            return Elem(a);
        }
        let (la, lb) = (self.log[a as usize], self.log[b as usize]);
        let d = (lb + self.order - la) % self.order;
        match self.zech[d as usize] {
            ZECH_NONE => Elem(0),
            z => Elem(self.exp[((la as u64 + z as u64) % self.order as u64) as usize]),
        }
    }
}

/// Splits `q = p^k` with `p` prime.
pub fn split_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut r, mut k) = (q, 0);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

/// Tallies of elementary field operations.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub adds: u64,
    pub subs: u64,
    pub muls: u64,
    pub divs: u64,
}

impl OpCounts {
    pub fn total(&self) -> u64 {
        self.adds + self.subs + self.muls + self.divs
    }
}

impl Sub for OpCounts {
    type Output = OpCounts;
    fn sub(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            adds: self.adds - rhs.adds,
            subs: self.subs - rhs.subs,
            muls: self.muls - rhs.muls,
            divs: self.divs - rhs.divs,
        }
    }
}

impl Add for OpCounts {
    type Output = OpCounts;
    fn add(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            adds: self.adds + rhs.adds,
            subs: self.subs + rhs.subs,
            muls: self.muls + rhs.muls,
            divs: self.divs + rhs.divs,
        }
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, rhs: OpCounts) {
        *self = *self + rhs;
    }
}

/// Running tallies for one computation, plus nested measurement scopes and an
/// optional log of per-call measurements.
#[derive(Default)]
pub struct OpCounter {
    adds: Cell<u64>,
    subs: Cell<u64>,
    muls: Cell<u64>,
    divs: Cell<u64>,
    scopes: RefCell<Vec<OpCounts>>,
    log: RefCell<Option<Vec<CallRecord>>>,
}

impl fmt::Debug for OpCounter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("OpCounter").field(&self.snapshot()).finish()
    }
}

impl OpCounter {
    pub fn snapshot(&self) -> OpCounts {
        OpCounts {
            adds: self.adds.get(),
            subs: self.subs.get(),
            muls: self.muls.get(),
            divs: self.divs.get(),
        }
    }

    pub fn begin_scope(&self) {
        self.scopes.borrow_mut().push(self.snapshot());
    }

    /// Closes the innermost scope and returns the operations performed inside it.
    pub fn end_scope(&self) -> Result<OpCounts> {
        let start = self
            .scopes
            .borrow_mut()
            .pop()
            .ok_or(Error::UnbalancedScope)?;
        Ok(self.snapshot() - start)
    }

    pub fn scope_depth(&self) -> usize {
        self.scopes.borrow().len()
    }

    #[inline]
    fn bump(cell: &Cell<u64>, n: usize) {
        cell.set(cell.get() + n as u64);
    }
}

/// A counting arithmetic context over one field.
pub struct Field {
    spec: Arc<FieldSpec>,
    counter: OpCounter,
    sparse_skip: bool,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("q", &self.spec.q)
            .field("ops", &self.counter.snapshot())
            .finish()
    }
}

impl Field {
    pub fn new(spec: Arc<FieldSpec>) -> Field {
        Field {
            spec,
            counter: OpCounter::default(),
            sparse_skip: false,
        }
    }

    /// Same field and options, fresh counter.
    pub fn fork(&self) -> Field {
        Field {
            spec: self.spec.clone(),
            counter: OpCounter::default(),
            sparse_skip: self.sparse_skip,
        }
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn order(&self) -> u32 {
        self.spec.q
    }

    pub fn counter(&self) -> &OpCounter {
        &self.counter
    }

    pub fn ops(&self) -> OpCounts {
        self.counter.snapshot()
    }

    /// Skip vector updates whose scalar is zero (off by default).
    pub fn set_sparse_skip(&mut self, on: bool) {
        self.sparse_skip = on;
    }

    pub fn sparse_skip(&self) -> bool {
        self.sparse_skip
    }

    /// Starts recording one [`CallRecord`] per instrumented call.
    pub fn enable_call_log(&self) {
        let mut log = self.counter.log.borrow_mut();
        if log.is_none() {
            *log = Some(Vec::new());
        }
    }

    pub fn take_call_log(&self) -> Vec<CallRecord> {
        self.counter
            .log
            .borrow_mut()
            .as_mut()
            .map(std::mem::take)
            .unwrap_or_default()
    }

    pub fn call_log_enabled(&self) -> bool {
        self.counter.log.borrow().is_some()
    }

    pub(crate) fn record(
        &self,
        tag: BoundTag,
        params: impl FnOnce() -> BoundParams,
        measured: OpCounts,
    ) {
        if let Some(log) = self.counter.log.borrow_mut().as_mut() {
            log.push(CallRecord {
                tag,
                params: params(),
                measured: measured.total(),
            });
        }
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        OpCounter::bump(&self.counter.adds, 1);
        self.spec.raw_add(a, b)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        OpCounter::bump(&self.counter.subs, 1);
        self.spec.raw_sub(a, b)
    }

    /// Counted as one subtraction.
    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        OpCounter::bump(&self.counter.subs, 1);
        self.spec.raw_neg(a)
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        OpCounter::bump(&self.counter.muls, 1);
        self.spec.raw_mul(a, b)
    }

    /// Counted as one division.
    pub fn inv(&self, a: Elem) -> Result<Elem> {
        let r = self.spec.raw_inv(a)?;
        OpCounter::bump(&self.counter.divs, 1);
        Ok(r)
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        let r = self.spec.raw_mul(a, self.spec.raw_inv(b)?);
        OpCounter::bump(&self.counter.divs, 1);
        Ok(r)
    }

    /// `a^e` by square and multiply, counting each multiplication.
    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut acc: Option<Elem> = None;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base,
                    Some(x) => self.mul(x, base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        acc.unwrap_or(Elem::ONE)
    }

    /// `y += a * x`, one multiplication and one addition per entry.
    pub fn axpy(&self, y: &mut [Elem], a: Elem, x: &[Elem]) {
        debug_assert_eq!(y.len(), x.len());
        if self.sparse_skip && a.is_zero() {
            return;
        }
        OpCounter::bump(&self.counter.muls, x.len());
        OpCounter::bump(&self.counter.adds, x.len());
        match &self.spec.arith {
            Arith::Table(t) => {
                let row = &t.mul[a.0 as usize * t.q..(a.0 as usize + 1) * t.q];
                for (yi, xi) in y.iter_mut().zip(x) {
                    yi.0 = t.add[yi.0 as usize * t.q + row[xi.0 as usize] as usize] as u32;
                }
            }
            Arith::Prime { p } => {
                let a = a.0 as u64;
                for (yi, xi) in y.iter_mut().zip(x) {
                    yi.0 = ((yi.0 as u64 + a * xi.0 as u64) % p) as u32;
                }
            }
            Arith::Zech(_) => {
                for (yi, xi) in y.iter_mut().zip(x) {
                    *yi = self.spec.raw_add(*yi, self.spec.raw_mul(a, *xi));
                }
            }
        }
    }

    /// `y -= a * x`, one multiplication and one subtraction per entry.
    pub fn sub_scaled(&self, y: &mut [Elem], a: Elem, x: &[Elem]) {
        debug_assert_eq!(y.len(), x.len());
        if self.sparse_skip && a.is_zero() {
            return;
        }
        OpCounter::bump(&self.counter.muls, x.len());
        OpCounter::bump(&self.counter.subs, x.len());
        match &self.spec.arith {
            Arith::Table(t) => {
                let row = &t.mul[a.0 as usize * t.q..(a.0 as usize + 1) * t.q];
                for (yi, xi) in y.iter_mut().zip(x) {
                    yi.0 = t.sub[yi.0 as usize * t.q + row[xi.0 as usize] as usize] as u32;
                }
            }
            Arith::Prime { p } => {
                let a = a.0 as u64;
                for (yi, xi) in y.iter_mut().zip(x) {
                    let t = a * xi.0 as u64 % p;
                    let v = yi.0 as u64;
                    yi.0 = if v >= t { v - t } else { v + p - t } as u32;
                }
            }
            Arith::Zech(_) => {
                for (yi, xi) in y.iter_mut().zip(x) {
                    *yi = self.spec.raw_sub(*yi, self.spec.raw_mul(a, *xi));
                }
            }
        }
    }

    /// `y *= a` entrywise.
    pub fn scale(&self, y: &mut [Elem], a: Elem) {
        OpCounter::bump(&self.counter.muls, y.len());
        for yi in y.iter_mut() {
            *yi = self.spec.raw_mul(a, *yi);
        }
    }

    /// `a * x` as a fresh vector.
    pub fn scaled(&self, a: Elem, x: &[Elem]) -> Vec<Elem> {
        let mut y = x.to_vec();
        self.scale(&mut y, a);
        y
    }

    /// `y += x` entrywise.
    pub fn add_assign(&self, y: &mut [Elem], x: &[Elem]) {
        OpCounter::bump(&self.counter.adds, x.len());
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = self.spec.raw_add(*yi, *xi);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_elems(spec: &FieldSpec) -> Vec<Elem> {
        spec.elements().collect()
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FieldSpec::new(4, 1).unwrap_err(), Error::NotPrime(4));
        assert_eq!(FieldSpec::new(3, 0).unwrap_err(), Error::ZeroDegree);
        assert!(matches!(
            FieldSpec::new(2, 21),
            Err(Error::OrderTooLarge { .. })
        ));
        assert!(FieldSpec::new(2, 20).is_ok());
    }

    #[test]
    fn small_orders() {
        assert_eq!(FieldSpec::new(3, 1).unwrap().order(), 3);
        assert_eq!(FieldSpec::new(2, 1).unwrap().order(), 2);
        let f81 = FieldSpec::new(3, 4).unwrap();
        assert_eq!(f81.order(), 81);
        assert_eq!(f81.defining_poly().unwrap().len(), 5);
        assert_eq!(FieldSpec::from_order(243).unwrap().k(), 5);
        assert_eq!(
            FieldSpec::from_order(12).unwrap_err(),
            Error::NotPrimePower(12)
        );
    }

    #[test]
    fn defining_polynomials_are_least() {
        assert_eq!(
            FieldSpec::new(2, 2).unwrap().defining_poly().unwrap(),
            &[1, 1, 1]
        );
        assert_eq!(
            FieldSpec::new(2, 3).unwrap().defining_poly().unwrap(),
            &[1, 1, 0, 1]
        );
        assert_eq!(
            FieldSpec::new(3, 2).unwrap().defining_poly().unwrap(),
            &[1, 0, 1]
        );
        assert_eq!(
            FieldSpec::new(5, 2).unwrap().defining_poly().unwrap(),
            &[2, 0, 1]
        );
    }

    #[test]
    fn gf3_examples() {
        let f = Field::new(FieldSpec::new(3, 1).unwrap());
        assert_eq!(f.add(Elem(2), Elem(2)), Elem(1));
        assert_eq!(f.inv(Elem(2)).unwrap(), Elem(2));
        assert_eq!(f.inv(Elem(0)), Err(Error::DivisionByZero));
        assert_eq!(f.div(Elem(1), Elem(0)), Err(Error::DivisionByZero));
    }

    #[test]
    fn gf4_generator_squared() {
        // Brute-force multiplication table of GF(2)[x]/(x^2+x+1) on coefficient pairs.
        let mul = |a: (u32, u32), b: (u32, u32)| {
            let c0 = a.0 * b.0;
            let c1 = a.0 * b.1 + a.1 * b.0;
            let c2 = a.1 * b.1;
            // x^2 = x + 1
            ((c0 + c2) % 2, (c1 + c2) % 2)
        };
        let f = Field::new(FieldSpec::new(2, 2).unwrap());
        for a in 0..4u32 {
            for b in 0..4u32 {
                let (x, y) = mul((a % 2, a / 2), (b % 2, b / 2));
                assert_eq!(f.mul(Elem(a), Elem(b)), Elem(x + 2 * y));
            }
        }
        let g = Elem(2);
        assert_eq!(f.mul(g, g), f.add(g, Elem::ONE));
    }

    fn check_axioms(spec: Arc<FieldSpec>, sample: Option<usize>) {
        let f = Field::new(spec.clone());
        let elems = all_elems(&spec);
        let q = spec.order() as u64;
        let picks: Vec<Elem> = match sample {
            None => elems.clone(),
            Some(s) => (0..s)
                .map(|i| Elem(((i as u64 * 2654435761) % q) as u32))
                .collect(),
        };
        for &a in &picks {
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
                assert_eq!(f.pow(a, q - 1), Elem::ONE);
            }
            assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
            for &b in &picks {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.sub(f.add(a, b), b), a);
                for &c in picks.iter().take(16) {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn axioms_exhaustive_small() {
        for (p, k) in [
            (2, 1),
            (3, 1),
            (2, 2),
            (5, 1),
            (2, 3),
            (3, 2),
            (7, 1),
            (2, 4),
            (5, 2),
            (3, 4),
        ] {
            check_axioms(FieldSpec::new(p, k).unwrap(), None);
        }
    }

    #[test]
    fn axioms_sampled_large() {
        // prime backend and Zech backend
        check_axioms(FieldSpec::new(257, 1).unwrap(), Some(40));
        check_axioms(FieldSpec::new(3, 6).unwrap(), Some(40));
        check_axioms(FieldSpec::new(2, 10).unwrap(), Some(40));
        check_axioms(FieldSpec::new(65521, 1).unwrap(), Some(30));
    }

    #[test]
    fn zech_backend_matches_slow_arithmetic() {
        let spec = FieldSpec::new(3, 6).unwrap();
        let m = spec.defining_poly().unwrap().to_vec();
        let slow = Slow {
            p: 3,
            k: 6,
            modulus: &m,
        };
        for a in (0..729).step_by(7) {
            for b in (0..729).step_by(11) {
                assert_eq!(spec.raw_mul(Elem(a), Elem(b)).0, slow.mul(a, b));
                assert_eq!(spec.raw_add(Elem(a), Elem(b)).0, slow.add(a, b));
            }
        }
    }

    #[test]
    fn primitive_element_has_full_order() {
        for q in [2u64, 3, 4, 5, 9, 25, 81, 251, 1024] {
            let spec = FieldSpec::from_order(q).unwrap();
            let g = spec.primitive_element();
            assert_eq!(spec.multiplicative_order(g), Some(q - 1));
            for smaller in 1..g.value() {
                assert_ne!(spec.multiplicative_order(Elem(smaller)), Some(q - 1));
            }
        }
        assert_eq!(FieldSpec::new(5, 1).unwrap().primitive_element(), Elem(2));
        assert_eq!(FieldSpec::new(3, 1).unwrap().primitive_element(), Elem(2));
    }

    #[test]
    fn each_operation_counts_once() {
        let f = Field::new(FieldSpec::new(5, 1).unwrap());
        f.add(Elem(1), Elem(2));
        f.sub(Elem(1), Elem(2));
        f.neg(Elem(1));
        f.mul(Elem(3), Elem(2));
        f.inv(Elem(3)).unwrap();
        f.div(Elem(3), Elem(2)).unwrap();
        assert_eq!(
            f.ops(),
            OpCounts {
                adds: 1,
                subs: 2,
                muls: 1,
                divs: 2
            }
        );
    }

    #[test]
    fn table_and_generic_paths_count_identically() {
        let small = Field::new(FieldSpec::new(5, 1).unwrap());
        let big = Field::new(FieldSpec::new(257, 1).unwrap());
        for f in [&small, &big] {
            let mut y = vec![Elem(1); 7];
            let x = vec![Elem(2); 7];
            f.axpy(&mut y, Elem(3), &x);
            f.sub_scaled(&mut y, Elem(0), &x);
            f.scale(&mut y, Elem(2));
        }
        assert_eq!(small.ops(), big.ops());
        assert_eq!(
            small.ops(),
            OpCounts {
                adds: 7,
                subs: 7,
                muls: 21,
                divs: 0
            }
        );
    }

    #[test]
    fn sparse_skip_drops_zero_scalar_updates() {
        let mut f = Field::new(FieldSpec::new(5, 1).unwrap());
        f.set_sparse_skip(true);
        let mut y = vec![Elem(1); 4];
        f.axpy(&mut y, Elem::ZERO, &[Elem(2); 4]);
        assert_eq!(f.ops().total(), 0);
        f.axpy(&mut y, Elem(1), &[Elem(2); 4]);
        assert_eq!(y, vec![Elem(3); 4]);
        assert_eq!(f.ops().total(), 8);
    }

    #[test]
    fn scopes() {
        let f = Field::new(FieldSpec::new(3, 1).unwrap());
        f.counter().begin_scope();
        assert_eq!(f.counter().end_scope().unwrap(), OpCounts::default());
        f.counter().begin_scope();
        f.mul(Elem(2), Elem(2));
        f.counter().begin_scope();
        f.add(Elem(2), Elem(2));
        assert_eq!(f.counter().end_scope().unwrap().total(), 1);
        assert_eq!(
            f.counter().end_scope().unwrap(),
            OpCounts {
                adds: 1,
                subs: 0,
                muls: 1,
                divs: 0
            }
        );
        assert_eq!(f.counter().end_scope(), Err(Error::UnbalancedScope));
    }

    #[test]
    fn element_encoding_range() {
        let spec = FieldSpec::new(3, 2).unwrap();
        assert_eq!(spec.elem(8).unwrap(), Elem(8));
        assert!(spec.elem(9).is_err());
        assert_eq!(spec.from_int(-1), Elem(2));
    }
}
