//! Arithmetic in `F_q = F_p[w]/(modulus)`.
//!
//! Elements are stored as their coordinate vector `(c0, …, c(n-1))` over `F_p`
//! packed into a single integer `c0 + c1·p + … + c(n-1)·p^(n-1)`. A
//! [`GaloisField`] handle owns the modulus and the log/exp tables; elements
//! themselves are plain `Copy` values and every operation goes through the
//! handle.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest field order we are willing to tabulate.
pub const MAX_ORDER: u64 = 1 << 20;

/// Fields up to this order also get a full addition table.
const ADD_TABLE_LIMIT: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {0} exceeds the supported maximum")]
    TooLarge(u64),
    #[error("modulus must be monic of degree {expected} (got {got} coefficients)")]
    BadModulus { expected: usize, got: usize },
    #[error("modulus is reducible over F_{0}")]
    Reducible(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse field element {0:?}")]
    Parse(String),
}

/// Characteristic, degree and defining polynomial of `F_{p^n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldParams {
    pub p: u32,
    pub n: usize,
    /// Monic modulus, lowest degree first; `modulus.len() == n + 1`.
    pub modulus: Vec<u32>,
}

impl FieldParams {
    pub fn new(p: u32, n: usize, modulus: Vec<u32>) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if n == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order = (p as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
        if order > MAX_ORDER {
            return Err(FieldError::TooLarge(order));
        }
        if modulus.len() != n + 1 || modulus[n] % p != 1 {
            return Err(FieldError::BadModulus { expected: n, got: modulus.len() });
        }
        let modulus: Vec<u32> = modulus.into_iter().map(|c| c % p).collect();
        if !is_irreducible(p, &modulus) {
            return Err(FieldError::Reducible(p));
        }
        Ok(FieldParams { p, n, modulus })
    }

    /// The shipped modulus for `(p, n)`, or else the first monic irreducible
    /// polynomial of degree `n` in coefficient order.
    pub fn default_for(p: u32, n: usize) -> Result<Self, FieldError> {
        let shipped: Option<Vec<u32>> = match (p, n) {
            (2, 2) => Some(vec![1, 1, 1]),
            (3, 2) => Some(vec![1, 0, 1]),
            (5, 2) => Some(vec![3, 0, 1]),
            _ => None,
        };
        if let Some(m) = shipped {
            return Self::new(p, n, m);
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if n == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order = (p as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
        if order > MAX_ORDER {
            return Err(FieldError::TooLarge(order));
        }
        for idx in 0..order {
            let mut m = digits(idx as u32, p, n);
            m.push(1);
            if is_irreducible(p, &m) {
                return Self::new(p, n, m);
            }
        }
        unreachable!("an irreducible polynomial of every degree exists")
    }

    pub fn order(&self) -> u32 {
        self.p.pow(self.n as u32)
    }
}

/// An element of `F_q`; coordinates are only meaningful relative to a
/// [`GaloisField`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FqElem(u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Packed coordinate index `c0 + c1·p + …`.
    pub fn index(self) -> u32 {
        self.0
    }
}

struct Tables {
    params: FieldParams,
    q: u32,
    /// `exp[k] = g^k` for `0 <= k < 2(q-1)`.
    exp: Vec<u32>,
    /// `log[x]` for `x != 0`; `log[0]` unused.
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

/// Shared handle on `F_{p^n}`; cloning is cheap.
#[derive(Clone)]
pub struct GaloisField {
    inner: Arc<Tables>,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaloisField")
            .field("p", &self.inner.params.p)
            .field("n", &self.inner.params.n)
            .field("modulus", &self.inner.params.modulus)
            .finish()
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.params == other.inner.params
    }
}

impl Eq for GaloisField {}

impl GaloisField {
    pub fn new(params: FieldParams) -> Self {
        let p = params.p;
        let n = params.n;
        let q = params.order();

        let gen = find_generator(&params);
        let mut exp = Vec::with_capacity(2 * (q as usize - 1).max(1));
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for k in 0..(q - 1) {
            exp.push(cur);
            log[cur as usize] = k;
            cur = mul_by_reduction(&params, cur, gen);
        }
        let doubled: Vec<u32> = exp.clone();
        exp.extend(doubled);

        let neg = (0..q).map(|x| pack(&digits(x, p, n).iter().map(|&c| (p - c) % p).collect::<Vec<_>>(), p)).collect();

        let add = (q <= ADD_TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity((q * q) as usize);
            for x in 0..q {
                for y in 0..q {
                    t.push(add_digitwise(x, y, p, n));
                }
            }
            t
        });

        GaloisField { inner: Arc::new(Tables { params, q, exp, log, neg, add }) }
    }

    /// Field for `(p, n)` with the default modulus.
    pub fn with_default_modulus(p: u32, n: usize) -> Result<Self, FieldError> {
        Ok(Self::new(FieldParams::default_for(p, n)?))
    }

    pub fn params(&self) -> &FieldParams {
        &self.inner.params
    }

    pub fn p(&self) -> u32 {
        self.inner.params.p
    }

    pub fn n(&self) -> usize {
        self.inner.params.n
    }

    pub fn order(&self) -> u32 {
        self.inner.q
    }

    pub fn zero(&self) -> FqElem {
        FqElem(0)
    }

    pub fn one(&self) -> FqElem {
        FqElem(1)
    }

    /// The class `w` of the indeterminate, i.e. a root of the modulus.
    pub fn generator(&self) -> FqElem {
        if self.n() == 1 {
            self.neg(FqElem(self.inner.params.modulus[0]))
        } else {
            FqElem(self.p())
        }
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, k: i64) -> FqElem {
        FqElem(k.rem_euclid(self.p() as i64) as u32)
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<FqElem, FieldError> {
        let p = self.p();
        if coords.len() != self.n() || coords.iter().any(|&c| c >= p) {
            return Err(FieldError::Parse(format!("{coords:?}")));
        }
        Ok(FqElem(pack(coords, p)))
    }

    pub fn coords(&self, x: FqElem) -> Vec<u32> {
        digits(x.0, self.p(), self.n())
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.inner.q).map(FqElem)
    }

    pub fn add(&self, x: FqElem, y: FqElem) -> FqElem {
        match &self.inner.add {
            Some(t) => FqElem(t[(x.0 * self.inner.q + y.0) as usize]),
            None => FqElem(add_digitwise(x.0, y.0, self.p(), self.n())),
        }
    }

    pub fn neg(&self, x: FqElem) -> FqElem {
        FqElem(self.inner.neg[x.0 as usize])
    }

    pub fn sub(&self, x: FqElem, y: FqElem) -> FqElem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FqElem, y: FqElem) -> FqElem {
        if x.0 == 0 || y.0 == 0 {
            return FqElem(0);
        }
        let t = &self.inner;
        FqElem(t.exp[(t.log[x.0 as usize] + t.log[y.0 as usize]) as usize])
    }

    pub fn inv(&self, x: FqElem) -> Result<FqElem, FieldError> {
        if x.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let t = &self.inner;
        let l = t.log[x.0 as usize];
        Ok(FqElem(t.exp[((t.q - 1 - l) % (t.q - 1)) as usize]))
    }

    pub fn div(&self, x: FqElem, y: FqElem) -> Result<FqElem, FieldError> {
        Ok(self.mul(x, self.inv(y)?))
    }

    pub fn pow(&self, x: FqElem, e: u64) -> FqElem {
        if e == 0 {
            return self.one();
        }
        if x.0 == 0 {
            return x;
        }
        let t = &self.inner;
        let m = (t.q - 1) as u64;
        let k = (t.log[x.0 as usize] as u64 * (e % m)) % m;
        FqElem(t.exp[k as usize])
    }

    /// `x^e` for any integer `e`; negative powers of zero fail.
    pub fn powi(&self, x: FqElem, e: i64) -> Result<FqElem, FieldError> {
        if e >= 0 {
            Ok(self.pow(x, e as u64))
        } else {
            Ok(self.pow(self.inv(x)?, e.unsigned_abs()))
        }
    }

    pub fn frobenius(&self, x: FqElem) -> FqElem {
        self.pow(x, self.p() as u64)
    }

    /// Inverse of Frobenius, `x^(p^(n-1))`.
    pub fn pth_root(&self, x: FqElem) -> FqElem {
        let mut y = x;
        for _ in 1..self.n() {
            y = self.frobenius(y);
        }
        y
    }

    /// Absolute trace to `F_p`, as a residue in `[0, p)`.
    pub fn abs_trace(&self, x: FqElem) -> u32 {
        let mut acc = self.zero();
        let mut y = x;
        for _ in 0..self.n() {
            acc = self.add(acc, y);
            y = self.frobenius(y);
        }
        debug_assert!(self.is_in_prime_field(acc));
        acc.0
    }

    /// A root of `x^p - x = c` in `F_q`, the one with lexicographically
    /// smallest coordinate vector, or `None` when `c` has nonzero trace.
    pub fn artin_schreier_solve(&self, c: FqElem) -> Option<FqElem> {
        self.elements().filter(|&x| self.sub(self.frobenius(x), x) == c).min_by_key(|&x| self.coords(x))
    }

    pub fn is_in_prime_field(&self, x: FqElem) -> bool {
        x.0 < self.p()
    }

    /// Comma-separated coordinates, `"c0,c1,…"`.
    pub fn format(&self, x: FqElem) -> String {
        self.coords(x).iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }

    pub fn parse(&self, s: &str) -> Result<FqElem, FieldError> {
        let coords = s
            .split(',')
            .map(|c| c.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| FieldError::Parse(s.to_string()))?;
        self.from_coords(&coords).map_err(|_| FieldError::Parse(s.to_string()))
    }
}

pub(crate) fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn digits(mut x: u32, p: u32, n: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(x % p);
        x /= p;
    }
    out
}

fn pack(coords: &[u32], p: u32) -> u32 {
    coords.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn add_digitwise(mut x: u32, mut y: u32, p: u32, n: usize) -> u32 {
    let mut out = 0;
    let mut scale = 1;
    for _ in 0..n {
        out += ((x % p + y % p) % p) * scale;
        x /= p;
        y /= p;
        scale *= p;
    }
    out
}

/// Schoolbook product of packed elements followed by reduction modulo the
/// modulus. Used to build the log tables and as a test reference.
pub(crate) fn mul_by_reduction(params: &FieldParams, x: u32, y: u32) -> u32 {
    let p = params.p as u64;
    let n = params.n;
    let a = digits(x, params.p, n);
    let b = digits(y, params.p, n);
    let mut prod = vec![0u64; 2 * n - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai as u64 * bj as u64) % p;
        }
    }
    for k in (n..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &m) in params.modulus[..n].iter().enumerate() {
            prod[k - n + i] = (prod[k - n + i] + c * (p - m as u64)) % p;
        }
    }
    pack(&prod[..n].iter().map(|&c| c as u32).collect::<Vec<_>>(), params.p)
}

/// Remainder of `f` modulo the monic `g`, both lowest degree first.
fn poly_rem(p: u32, f: &[u32], g: &[u32]) -> Vec<u32> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        if c != 0 {
            for (i, &gi) in g.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - c) * gi) % p;
            }
        }
        r.pop();
    }
    r
}

/// Brute-force check: no monic factor of degree `1..=n/2` divides `f`.
fn is_irreducible(p: u32, f: &[u32]) -> bool {
    let n = f.len() - 1;
    for d in 1..=n / 2 {
        for idx in 0..p.pow(d as u32) {
            let mut g = digits(idx, p, d);
            g.push(1);
            if poly_rem(p, f, &g).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn find_generator(params: &FieldParams) -> u32 {
    let q = params.order();
    if q == 2 {
        return 1;
    }
    let m = q - 1;
    let factors = prime_factors(m);
    let pow = |x: u32, mut e: u32| {
        let mut acc = 1u32;
        let mut base = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_by_reduction(params, acc, base);
            }
            base = mul_by_reduction(params, base, base);
            e >>= 1;
        }
        acc
    };
    (1..q)
        .find(|&g| factors.iter().all(|&r| pow(g, m / r) != 1))
        .expect("multiplicative group of a finite field is cyclic")
}

fn prime_factors(mut m: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}
