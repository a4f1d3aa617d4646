//! Laurent polynomials over `F_q`, i.e. finite-support elements of
//! `K = F_q((t))`, together with the valuation `v_K` and reduction modulo
//! `℘(K) = {x^p - x}` onto the representative space
//! `J = ⊕_{p∤j, j>0} F_q·t^{-j}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::finite_field::{FieldError, FqElem, GaloisField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    /// The constant term left after reduction has nonzero absolute trace, so
    /// `x^p - x = g` has an unramified component over this coefficient field.
    #[error("constant term {0} has nonzero trace; enlarge F_q")]
    NontrivialUnramifiedPart(String),
    #[error("cannot parse Laurent polynomial: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A value of `v_K`, `v_L` or `v_{L^σ}`; `Infinity` is reserved for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinity
    }

    /// Multiply by a positive integer; `Infinity` is absorbing.
    pub fn scale(self, k: i64) -> Valuation {
        debug_assert!(k > 0);
        match self {
            Valuation::Finite(v) => Valuation::Finite(v * k),
            Valuation::Infinity => Valuation::Infinity,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => f.write_str("inf"),
        }
    }
}

/// `Σ c_e t^e` with finitely many nonzero `c_e`.
///
/// Stored densely from the lowest exponent; the first and last stored
/// coefficients are nonzero, and zero is the empty vector with `low == 0`.
#[derive(Clone)]
pub struct LaurentPoly {
    field: GaloisField,
    low: i64,
    coeffs: Vec<FqElem>,
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        self.low == other.low && self.coeffs == other.coeffs && self.field == other.field
    }
}

impl Eq for LaurentPoly {}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let c = self.field.format(c);
            match e {
                0 => write!(f, "[{c}]")?,
                _ => write!(f, "[{c}]t^{e}")?,
            }
        }
        Ok(())
    }
}

/// Output of [`LaurentPoly::reduce_to_j`]: `g - rep - ℘(witness)` has
/// strictly positive support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JReduction {
    pub rep: LaurentPoly,
    pub witness: LaurentPoly,
}

impl LaurentPoly {
    fn from_dense(field: GaloisField, low: i64, mut coeffs: Vec<FqElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => LaurentPoly { field, low: 0, coeffs: Vec::new() },
            Some(k) => {
                coeffs.drain(..k);
                LaurentPoly { field, low: low + k as i64, coeffs }
            }
        }
    }

    pub fn zero(field: &GaloisField) -> Self {
        LaurentPoly { field: field.clone(), low: 0, coeffs: Vec::new() }
    }

    pub fn one(field: &GaloisField) -> Self {
        Self::constant(field, field.one())
    }

    pub fn constant(field: &GaloisField, c: FqElem) -> Self {
        Self::monomial(field, c, 0)
    }

    /// `c · t^e`.
    pub fn monomial(field: &GaloisField, c: FqElem, e: i64) -> Self {
        Self::from_dense(field.clone(), e, vec![c])
    }

    /// `t^e`.
    pub fn t_pow(field: &GaloisField, e: i64) -> Self {
        Self::monomial(field, field.one(), e)
    }

    /// Sum of `c·t^e` over the given terms; repeated exponents accumulate.
    pub fn from_terms<I: IntoIterator<Item = (i64, FqElem)>>(field: &GaloisField, terms: I) -> Self {
        let terms: Vec<(i64, FqElem)> = terms.into_iter().collect();
        let Some(low) = terms.iter().map(|t| t.0).min() else {
            return Self::zero(field);
        };
        let high = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![FqElem::ZERO; (high - low + 1) as usize];
        for (e, c) in terms {
            let slot = &mut coeffs[(e - low) as usize];
            *slot = field.add(*slot, c);
        }
        Self::from_dense(field.clone(), low, coeffs)
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.coeffs == [self.field.one()]
    }

    /// `v_K`: the lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Valuation {
        if self.is_zero() {
            Valuation::Infinity
        } else {
            Valuation::Finite(self.low)
        }
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn degree(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.low + self.coeffs.len() as i64 - 1)
    }

    /// Coefficient of the lowest-order term.
    pub fn leading_coeff(&self) -> FqElem {
        self.coeffs.first().copied().unwrap_or(FqElem::ZERO)
    }

    pub fn coeff(&self, e: i64) -> FqElem {
        if e < self.low {
            return FqElem::ZERO;
        }
        self.coeffs.get((e - self.low) as usize).copied().unwrap_or(FqElem::ZERO)
    }

    /// Nonzero terms `(e, c)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, FqElem)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, &c)| (self.low + i as i64, c))
    }

    pub fn is_monomial(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// Whether the support lies in `[lo, hi]` (either bound optional).
    pub fn support_within(&self, lo: Option<i64>, hi: Option<i64>) -> bool {
        match self.degree() {
            None => true,
            Some(d) => lo.is_none_or(|lo| self.low >= lo) && hi.is_none_or(|hi| d <= hi),
        }
    }

    /// Terms with exponent `<= bound`.
    pub fn truncate_above(&self, bound: i64) -> Self {
        let keep = self.terms().filter(|&(e, _)| e <= bound);
        Self::from_terms(&self.field, keep)
    }

    /// Terms with exponent `>= bound`.
    pub fn truncate_below(&self, bound: i64) -> Self {
        let keep = self.terms().filter(|&(e, _)| e >= bound);
        Self::from_terms(&self.field, keep)
    }

    pub fn scalar_mul(&self, c: FqElem) -> Self {
        if c.is_zero() {
            return Self::zero(&self.field);
        }
        let coeffs = self.coeffs.iter().map(|&x| self.field.mul(c, x)).collect();
        LaurentPoly { field: self.field.clone(), low: self.low, coeffs }
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        LaurentPoly { field: self.field.clone(), low: self.low + k, coeffs: self.coeffs.clone() }
    }

    fn check_field(&self, other: &Self) {
        assert!(self.field == other.field, "Laurent polynomials over different fields");
    }

    fn add_impl(&self, other: &Self, negate: bool) -> Self {
        self.check_field(other);
        let f = &self.field;
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { other.neg_impl() } else { other.clone() };
        }
        let low = self.low.min(other.low);
        let high = self.degree().unwrap().max(other.degree().unwrap());
        let mut coeffs = vec![FqElem::ZERO; (high - low + 1) as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[(self.low - low) as usize + i] = c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            let slot = &mut coeffs[(other.low - low) as usize + i];
            *slot = if negate { f.sub(*slot, c) } else { f.add(*slot, c) };
        }
        Self::from_dense(f.clone(), low, coeffs)
    }

    fn neg_impl(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|&c| self.field.neg(c)).collect();
        LaurentPoly { field: self.field.clone(), low: self.low, coeffs }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        self.check_field(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field);
        }
        let f = &self.field;
        let mut coeffs = vec![FqElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
            }
        }
        Self::from_dense(f.clone(), self.low + other.low, coeffs)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one(&self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// `f^p = Σ frobenius(c)·t^{p·e}`.
    pub fn frobenius_series(&self) -> Self {
        let p = self.field.p() as i64;
        Self::from_terms(&self.field, self.terms().map(|(e, c)| (p * e, self.field.frobenius(c))))
    }

    /// `℘(f) = f^p - f`.
    pub fn artin_schreier(&self) -> Self {
        &self.frobenius_series() - self
    }

    /// Membership in `J`: every exponent is negative and prime to `p`.
    pub fn is_in_j(&self) -> bool {
        let p = self.field.p() as i64;
        self.terms().all(|(e, _)| e < 0 && e % p != 0)
    }

    /// Reduce modulo `℘(K)` onto `J`.
    ///
    /// Terms `c·t^{-jp}` are rewritten as `c^{1/p}·t^{-j}` until every pole
    /// order is prime to `p`; the constant term is absorbed by a root of
    /// `x^p - x = c0`, and positive powers are dropped (they lie in
    /// `℘(t·O_K)`). The witness collects the nonpositive part of the
    /// element whose `℘` was subtracted.
    pub fn reduce_to_j(&self) -> Result<JReduction, LaurentError> {
        let f = &self.field;
        let p = f.p() as i64;
        let zero = Self::zero(f);
        let Some(low) = self.valuation().finite().filter(|&v| v <= 0) else {
            return Ok(JReduction { rep: zero.clone(), witness: zero });
        };
        // work[k] holds the coefficient of t^{low + k} for exponents up to 0
        let mut work: Vec<FqElem> = (low..=0).map(|e| self.coeff(e)).collect();
        let mut witness = Vec::new();
        for e in low..0 {
            let c = work[(e - low) as usize];
            if c.is_zero() || e % p != 0 {
                continue;
            }
            let root = f.pth_root(c);
            work[(e - low) as usize] = FqElem::ZERO;
            let slot = &mut work[(e / p - low) as usize];
            *slot = f.add(*slot, root);
            witness.push((e / p, root));
        }
        let c0 = work[(-low) as usize];
        if !c0.is_zero() {
            match f.artin_schreier_solve(c0) {
                Some(x0) => witness.push((0, x0)),
                None => return Err(LaurentError::NontrivialUnramifiedPart(f.format(c0))),
            }
            work[(-low) as usize] = FqElem::ZERO;
        }
        Ok(JReduction { rep: Self::from_dense(f.clone(), low, work), witness: Self::from_terms(f, witness) })
    }

    /// `self / d` when the quotient lies in `F_q[t, t^{-1}]`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        self.check_field(d);
        assert!(!d.is_zero(), "division by the zero Laurent polynomial");
        if self.is_zero() {
            return Some(self.clone());
        }
        // both operands have a nonzero constant term after shifting, so any
        // Laurent quotient is an honest polynomial quotient
        let (q, r) = poly_divrem(&self.field, &self.coeffs, &d.coeffs);
        if r.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::from_dense(self.field.clone(), self.low - d.low, q))
    }

    /// Greatest common divisor in `F_q[t, t^{-1}]`, normalised to a
    /// polynomial with constant term 1 (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        self.check_field(other);
        let f = &self.field;
        let mut a = self.coeffs.clone();
        let mut b = other.coeffs.clone();
        while b.iter().any(|c| !c.is_zero()) {
            let (_, r) = poly_divrem(f, &a, &b);
            a = std::mem::replace(&mut b, r);
        }
        let g = Self::from_dense(f.clone(), 0, a);
        if g.is_zero() {
            return g;
        }
        let g = g.shift(-g.low);
        let inv = f.inv(g.leading_coeff()).expect("nonzero lead");
        g.scalar_mul(inv)
    }

    /// Encoding as `(exponent, "c0,c1,…")` pairs with increasing exponents.
    pub fn to_encoded(&self) -> Vec<(i64, String)> {
        self.terms().map(|(e, c)| (e, self.field.format(c))).collect()
    }

    /// Inverse of [`Self::to_encoded`]; exponents must be strictly increasing.
    pub fn from_encoded(field: &GaloisField, terms: &[(i64, String)]) -> Result<Self, LaurentError> {
        if terms.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(LaurentError::Parse("exponents must be strictly increasing".into()));
        }
        let parsed = terms.iter().map(|(e, c)| Ok((*e, field.parse(c)?))).collect::<Result<Vec<_>, FieldError>>()?;
        Ok(Self::from_terms(field, parsed))
    }
}

/// Quotient and remainder of dense polynomials (lowest degree first).
fn poly_divrem(f: &GaloisField, num: &[FqElem], den: &[FqElem]) -> (Vec<FqElem>, Vec<FqElem>) {
    let mut den = den.to_vec();
    while den.last().is_some_and(|c| c.is_zero()) {
        den.pop();
    }
    let dd = den.len() - 1;
    let lead_inv = f.inv(den[dd]).expect("nonzero divisor");
    let mut r = num.to_vec();
    while r.last().is_some_and(|c| c.is_zero()) {
        r.pop();
    }
    if r.len() <= dd {
        return (Vec::new(), r);
    }
    let mut q = vec![FqElem::ZERO; r.len() - dd];
    for k in (0..q.len()).rev() {
        let c = r[k + dd];
        if c.is_zero() {
            continue;
        }
        let m = f.mul(c, lead_inv);
        q[k] = m;
        for (i, &di) in den.iter().enumerate() {
            r[k + i] = f.sub(r[k + i], f.mul(m, di));
        }
    }
    r.truncate(dd);
    (q, r)
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                $body(self, rhs)
            }
        }
        impl $tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                $body(&self, &rhs)
            }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                $body(&self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &LaurentPoly, b: &LaurentPoly| a.add_impl(b, false));
forward_binop!(Sub, sub, |a: &LaurentPoly, b: &LaurentPoly| a.add_impl(b, true));
forward_binop!(Mul, mul, |a: &LaurentPoly, b: &LaurentPoly| a.mul_impl(b));

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.neg_impl()
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.neg_impl()
    }
}
