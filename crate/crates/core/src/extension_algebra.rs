//! The bicyclic extension `L = K[α, β]` with `α^p - α = g1`, `β^p - β = g2`.
//!
//! Elements are stored on the monomial basis `α^i β^j` (`0 <= i, j < p`) with
//! Laurent polynomial coefficients. The Galois group `G = ⟨σ, τ⟩ ≅ (Z/p)²`
//! acts by `σ: β ↦ β + 1` (fixing `α`) and `τ: α ↦ α + 1` (fixing `β`).
//! Since `L/K` is totally ramified of degree `p²`, `v_L = v_K ∘ N_{L/K}` with
//! the norm computed as the determinant of the multiplication matrix.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::exact_linalg::LaurentMatrix;
use crate::finite_field::{FqElem, GaloisField};
use crate::laurent::{LaurentPoly, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtensionError {
    #[error("a lies in the prime field F_p")]
    AInPrimeField,
    #[error("{0} is not in J (exponents must be negative and prime to p)")]
    NotInJ(&'static str),
    #[error("g1 is zero")]
    G1Zero,
    #[error("g2 lies in F_p·g1")]
    G2DependentOnG1,
    #[error("inputs are defined over different coefficient fields")]
    FieldMismatch,
    #[error("elements belong to different extensions")]
    MixedExtensions,
}

impl ExtensionError {
    /// Stable identifier used in CLI output.
    pub fn name(&self) -> &'static str {
        match self {
            ExtensionError::AInPrimeField => "AInPrimeField",
            ExtensionError::NotInJ(_) => "NotInJ",
            ExtensionError::G1Zero => "G1Zero",
            ExtensionError::G2DependentOnG1 => "G2DependentOnG1",
            ExtensionError::FieldMismatch => "FieldMismatch",
            ExtensionError::MixedExtensions => "MixedExtensions",
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
struct PairData {
    field: GaloisField,
    a: FqElem,
    g1: LaurentPoly,
    g2: LaurentPoly,
}

/// A validated `(a, g1, g2)` with `a ∉ F_p` and `(g1, g2) ∈ J⁽²⁾`; it
/// determines both the group `G ⊂ SL₂` and the extension `L_{g1,g2}`.
#[derive(Clone)]
pub struct ExtensionPair {
    inner: Arc<PairData>,
}

impl PartialEq for ExtensionPair {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner == other.inner
    }
}

impl Eq for ExtensionPair {}

impl fmt::Debug for ExtensionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtensionPair")
            .field("a", &self.field().format(self.a()))
            .field("g1", &self.g1())
            .field("g2", &self.g2())
            .finish()
    }
}

/// Check the hypotheses on `(a, g1, g2)` and build the extension.
pub fn validate_pair(
    field: &GaloisField,
    a: FqElem,
    g1: LaurentPoly,
    g2: LaurentPoly,
) -> Result<ExtensionPair, ExtensionError> {
    if g1.field() != field || g2.field() != field || a.index() >= field.order() {
        return Err(ExtensionError::FieldMismatch);
    }
    if field.is_in_prime_field(a) {
        return Err(ExtensionError::AInPrimeField);
    }
    if !g1.is_in_j() {
        return Err(ExtensionError::NotInJ("g1"));
    }
    if !g2.is_in_j() {
        return Err(ExtensionError::NotInJ("g2"));
    }
    if g1.is_zero() {
        return Err(ExtensionError::G1Zero);
    }
    if (0..field.p() as i64).any(|s| g1.scalar_mul(field.from_int(s)) == g2) {
        return Err(ExtensionError::G2DependentOnG1);
    }
    Ok(ExtensionPair { inner: Arc::new(PairData { field: field.clone(), a, g1, g2 }) })
}

/// `σ^i τ^j` with exponents reduced mod `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub i: u32,
    pub j: u32,
}

impl GroupElement {
    pub fn new(i: i64, j: i64, p: u32) -> Self {
        GroupElement { i: i.rem_euclid(p as i64) as u32, j: j.rem_euclid(p as i64) as u32 }
    }

    pub fn identity() -> Self {
        GroupElement { i: 0, j: 0 }
    }

    pub fn sigma() -> Self {
        GroupElement { i: 1, j: 0 }
    }

    pub fn tau() -> Self {
        GroupElement { i: 0, j: 1 }
    }

    pub fn compose(self, other: GroupElement, p: u32) -> Self {
        GroupElement::new((self.i + other.i) as i64, (self.j + other.j) as i64, p)
    }

    /// All `p²` elements, `σ`-exponent major.
    pub fn all(p: u32) -> impl Iterator<Item = GroupElement> {
        (0..p).flat_map(move |i| (0..p).map(move |j| GroupElement { i, j }))
    }
}

/// An element of `L`, `Σ c_{ij} α^i β^j` with `c_{ij} ∈ K`.
#[derive(Clone, PartialEq, Eq)]
pub struct LElement {
    pair: ExtensionPair,
    coeffs: Vec<LaurentPoly>,
}

impl fmt::Debug for LElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.pair.p() as usize;
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                parts.push(format!("({c})·α^{}β^{}", k / p, k % p));
            }
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "LElement({})", parts.join(" + "))
    }
}

impl ExtensionPair {
    pub fn field(&self) -> &GaloisField {
        &self.inner.field
    }

    pub fn p(&self) -> u32 {
        self.inner.field.p()
    }

    /// `[L : K] = p²`.
    pub fn degree(&self) -> usize {
        (self.p() * self.p()) as usize
    }

    pub fn a(&self) -> FqElem {
        self.inner.a
    }

    pub fn g1(&self) -> &LaurentPoly {
        &self.inner.g1
    }

    pub fn g2(&self) -> &LaurentPoly {
        &self.inner.g2
    }

    /// `f = a^p·g1 + g2`.
    pub fn f(&self) -> LaurentPoly {
        self.g1().scalar_mul(self.field().frobenius(self.a())) + self.g2()
    }

    fn index(&self, i: usize, j: usize) -> usize {
        i * self.p() as usize + j
    }

    pub fn element(&self, coeffs: Vec<LaurentPoly>) -> Result<LElement, ExtensionError> {
        if coeffs.len() != self.degree() || coeffs.iter().any(|c| c.field() != self.field()) {
            return Err(ExtensionError::FieldMismatch);
        }
        Ok(LElement { pair: self.clone(), coeffs })
    }

    pub fn zero(&self) -> LElement {
        LElement { pair: self.clone(), coeffs: vec![LaurentPoly::zero(self.field()); self.degree()] }
    }

    /// Embedding of `K` into `L`.
    pub fn from_k(&self, c: LaurentPoly) -> LElement {
        self.monomial(0, 0, c)
    }

    pub fn one(&self) -> LElement {
        self.from_k(LaurentPoly::one(self.field()))
    }

    /// `c · α^i β^j` for `i, j < p`.
    pub fn monomial(&self, i: usize, j: usize, c: LaurentPoly) -> LElement {
        let mut x = self.zero();
        x.coeffs[self.index(i, j)] = c;
        x
    }

    pub fn alpha(&self) -> LElement {
        self.monomial(1, 0, LaurentPoly::one(self.field()))
    }

    pub fn beta(&self) -> LElement {
        self.monomial(0, 1, LaurentPoly::one(self.field()))
    }

    /// `γ = aα + β`.
    pub fn gamma(&self) -> LElement {
        let a = LaurentPoly::constant(self.field(), self.a());
        &self.alpha().scale(&a) + &self.beta()
    }

    /// `(A_i)` and `(B_j)` with `A_i = α(α-1)…(α-i+1)/i!` and likewise for
    /// `β`, so that `A_i(τ-1) = A_{i-1}` and `B_j(σ-1) = B_{j-1}`.
    pub fn binomial_basis(&self) -> (Vec<LElement>, Vec<LElement>) {
        let p = self.p();
        let field = self.field();
        let chain = |gen: LElement| {
            let mut out = vec![self.one()];
            let mut falling = self.one();
            let mut fact = 1u64;
            for i in 1..p as usize {
                let shift = self.from_k(LaurentPoly::constant(field, field.from_int(i as i64 - 1)));
                falling = &falling * &(&gen - &shift);
                fact = fact * i as u64 % p as u64;
                let inv = field.inv(field.from_int(fact as i64)).expect("i! is a unit for i < p");
                out.push(falling.scale(&LaurentPoly::constant(field, inv)));
            }
            out
        };
        (chain(self.alpha()), chain(self.beta()))
    }
}

impl LElement {
    pub fn pair(&self) -> &ExtensionPair {
        &self.pair
    }

    /// Coefficient of `α^i β^j`.
    pub fn coeff(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.coeffs[self.pair.index(i, j)]
    }

    /// Coordinates on the monomial basis, index `i·p + j` for `α^i β^j`.
    pub fn coeffs(&self) -> &[LaurentPoly] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(LaurentPoly::is_zero)
    }

    fn same_pair(&self, other: &LElement) -> Result<(), ExtensionError> {
        if self.pair == other.pair {
            Ok(())
        } else {
            Err(ExtensionError::MixedExtensions)
        }
    }

    pub fn checked_add(&self, other: &LElement) -> Result<LElement, ExtensionError> {
        self.same_pair(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(LElement { pair: self.pair.clone(), coeffs })
    }

    pub fn checked_sub(&self, other: &LElement) -> Result<LElement, ExtensionError> {
        self.same_pair(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(LElement { pair: self.pair.clone(), coeffs })
    }

    /// Product in `L`, reducing with `α^p = α + g1` and `β^p = β + g2`.
    pub fn checked_mul(&self, other: &LElement) -> Result<LElement, ExtensionError> {
        self.same_pair(other)?;
        let field = self.pair.field();
        let p = self.pair.p() as usize;
        let w = 2 * p - 1;
        let zero = LaurentPoly::zero(field);
        let mut grid = vec![zero.clone(); w * w];
        for (x, cx) in self.coeffs.iter().enumerate() {
            if cx.is_zero() {
                continue;
            }
            let (i, j) = (x / p, x % p);
            for (y, cy) in other.coeffs.iter().enumerate() {
                if cy.is_zero() {
                    continue;
                }
                let (k, l) = (y / p, y % p);
                let slot = &mut grid[(i + k) * w + j + l];
                *slot = &*slot + &(cx * cy);
            }
        }
        // α^{p+r} = α^{r+1} + g1·α^r, highest powers first
        let g1 = self.pair.g1();
        for e in (p..w).rev() {
            for b in 0..w {
                let c = std::mem::replace(&mut grid[e * w + b], zero.clone());
                if c.is_zero() {
                    continue;
                }
                let hi = (e - p + 1) * w + b;
                let lo = (e - p) * w + b;
                grid[hi] = &grid[hi] + &c;
                grid[lo] = &grid[lo] + &(&c * g1);
            }
        }
        let g2 = self.pair.g2();
        for e in (p..w).rev() {
            for a in 0..p {
                let c = std::mem::replace(&mut grid[a * w + e], zero.clone());
                if c.is_zero() {
                    continue;
                }
                let hi = a * w + e - p + 1;
                let lo = a * w + e - p;
                grid[hi] = &grid[hi] + &c;
                grid[lo] = &grid[lo] + &(&c * g2);
            }
        }
        let coeffs = (0..p * p).map(|x| grid[(x / p) * w + x % p].clone()).collect();
        Ok(LElement { pair: self.pair.clone(), coeffs })
    }

    /// Multiply by a scalar from `K`.
    pub fn scale(&self, c: &LaurentPoly) -> LElement {
        let coeffs = self.coeffs.iter().map(|x| x * c).collect();
        LElement { pair: self.pair.clone(), coeffs }
    }

    pub fn pow(&self, mut e: u32) -> LElement {
        let mut acc = self.pair.one();
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

    /// Image under `σ^i τ^j`: `α ↦ α + j`, `β ↦ β + i`.
    pub fn act(&self, g: GroupElement) -> LElement {
        let field = self.pair.field();
        let p = self.pair.p() as usize;
        let binom = binomial_table(p);
        // powers of the shifts as residues mod p
        let shift_pows = |s: u32| -> Vec<u64> {
            let mut v = vec![1u64; p];
            for k in 1..p {
                v[k] = v[k - 1] * s as u64 % p as u64;
            }
            v
        };
        let jp = shift_pows(g.j);
        let ip = shift_pows(g.i);
        let mut out = vec![LaurentPoly::zero(field); p * p];
        for (x, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (a, b) = (x / p, x % p);
            for r in 0..=a {
                let ca = binom[a][r] * jp[a - r] % p as u64;
                if ca == 0 {
                    continue;
                }
                for s in 0..=b {
                    let k = ca * binom[b][s] % p as u64 * ip[b - s] % p as u64;
                    if k == 0 {
                        continue;
                    }
                    let slot = &mut out[r * p + s];
                    *slot = &*slot + &c.scalar_mul(field.from_int(k as i64));
                }
            }
        }
        LElement { pair: self.pair.clone(), coeffs: out }
    }

    /// `x(g - 1) = act(g, x) - x`.
    pub fn difference(&self, g: GroupElement) -> LElement {
        &self.act(g) - self
    }

    /// Matrix of `y ↦ x·y` on the monomial basis (column `k` is `x·e_k`).
    pub fn mult_matrix(&self) -> LaurentMatrix {
        let n = self.pair.degree();
        let p = self.pair.p() as usize;
        let one = LaurentPoly::one(self.pair.field());
        let mut m = LaurentMatrix::zeros(self.pair.field(), n, n);
        for k in 0..n {
            let col = self * &self.pair.monomial(k / p, k % p, one.clone());
            for (r, c) in col.coeffs.into_iter().enumerate() {
                m.set(r, k, c);
            }
        }
        m
    }

    /// `N_{L/K}(x) = det(mult_matrix(x))`.
    pub fn norm(&self) -> LaurentPoly {
        self.mult_matrix().det().expect("multiplication matrix is square")
    }

    /// `v_L(x) = v_K(N_{L/K}(x))`, normalised so that `v_L(t) = p²`.
    pub fn valuation(&self) -> Valuation {
        if self.is_zero() {
            return Valuation::Infinity;
        }
        self.norm().valuation()
    }
}

fn binomial_table(p: usize) -> Vec<Vec<u64>> {
    let mut t = vec![vec![0u64; p]; p];
    for n in 0..p {
        t[n][0] = 1;
        for k in 1..=n {
            t[n][k] = (t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 }) % p as u64;
        }
    }
    t
}

macro_rules! forward_l_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&LElement> for &LElement {
            type Output = LElement;
            fn $method(self, rhs: &LElement) -> LElement {
                self.$checked(rhs).expect("elements of different extensions")
            }
        }
        impl $tr<LElement> for LElement {
            type Output = LElement;
            fn $method(self, rhs: LElement) -> LElement {
                self.$checked(&rhs).expect("elements of different extensions")
            }
        }
    };
}

forward_l_binop!(Add, add, checked_add);
forward_l_binop!(Sub, sub, checked_sub);
forward_l_binop!(Mul, mul, checked_mul);

impl Neg for &LElement {
    type Output = LElement;
    fn neg(self) -> LElement {
        LElement { pair: self.pair.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> GaloisField {
        GaloisField::with_default_modulus(2, 2).unwrap()
    }

    fn mono(f: &GaloisField, c: FqElem, e: i64) -> LaurentPoly {
        LaurentPoly::monomial(f, c, e)
    }

    fn example_pair() -> ExtensionPair {
        let f = f4();
        let w = f.generator();
        let g1 = mono(&f, f.one(), -3);
        let g2 = mono(&f, w, -3) + mono(&f, f.one(), -1);
        validate_pair(&f, w, g1, g2).unwrap()
    }

    #[test]
    fn validation_errors() {
        let f = f4();
        let w = f.generator();
        let g1 = mono(&f, f.one(), -3);
        assert!(validate_pair(&f, w, g1.clone(), mono(&f, w, -3) + mono(&f, f.one(), -1)).is_ok());
        assert_eq!(validate_pair(&f, w, g1.clone(), g1.clone()), Err(ExtensionError::G2DependentOnG1));
        assert_eq!(validate_pair(&f, w, g1.clone(), LaurentPoly::zero(&f)), Err(ExtensionError::G2DependentOnG1));
        assert_eq!(validate_pair(&f, f.one(), g1.clone(), mono(&f, w, -1)), Err(ExtensionError::AInPrimeField));
        assert_eq!(validate_pair(&f, w, LaurentPoly::zero(&f), mono(&f, w, -1)), Err(ExtensionError::G1Zero));
        assert_eq!(validate_pair(&f, w, mono(&f, f.one(), -2), mono(&f, w, -1)), Err(ExtensionError::NotInJ("g1")));
        assert_eq!(validate_pair(&f, w, g1, LaurentPoly::one(&f)), Err(ExtensionError::NotInJ("g2")));
    }

    #[test]
    fn defining_relation() {
        let pair = example_pair();
        let f = pair.field().clone();
        // p = 2: α^{p-1} · α = α + g1
        let prod = &pair.alpha() * &pair.alpha();
        let expected = &pair.alpha() + &pair.from_k(pair.g1().clone());
        assert_eq!(prod, expected);
        let prod = &pair.beta() * &pair.beta();
        assert_eq!(prod, &pair.beta() + &pair.from_k(pair.g2().clone()));
        assert_eq!(pair.alpha().act(GroupElement::tau()), &pair.alpha() + &pair.one());
        assert_eq!(pair.gamma().act(GroupElement::sigma()), &pair.gamma() + &pair.one());
        assert_eq!(pair.alpha().act(GroupElement::sigma()), pair.alpha());
        let _ = f;
    }

    #[test]
    fn mixed_extensions_rejected() {
        let pair = example_pair();
        let f = pair.field().clone();
        let other = validate_pair(&f, f.generator(), mono(&f, f.one(), -1), mono(&f, f.generator(), -3)).unwrap();
        assert_eq!(pair.one().checked_mul(&other.one()), Err(ExtensionError::MixedExtensions));
        assert_eq!(pair.one().checked_add(&other.one()), Err(ExtensionError::MixedExtensions));
    }

    #[test]
    fn valuations() {
        let pair = example_pair();
        let f = pair.field().clone();
        let t = pair.from_k(LaurentPoly::t_pow(&f, 1));
        assert_eq!(t.valuation(), Valuation::Finite(4));
        // v_L(α) = p·v_K(g1) = -6
        assert_eq!(pair.alpha().valuation(), Valuation::Finite(-6));
        assert_eq!(pair.zero().valuation(), Valuation::Infinity);
    }

    #[test]
    fn binomial_chain_p3() {
        let f = GaloisField::with_default_modulus(3, 2).unwrap();
        let w = f.generator();
        let pair = validate_pair(&f, w, mono(&f, f.one(), -1), mono(&f, w, -2)).unwrap();
        let (a, b) = pair.binomial_basis();
        assert_eq!(a[1], pair.alpha());
        assert!(b[0] == pair.one());
        // A_2 = 2(α² − α)
        let two = LaurentPoly::constant(&f, f.from_int(2));
        let a2 = (&pair.alpha().pow(2) - &pair.alpha()).scale(&two);
        assert_eq!(a[2], a2);
        assert_eq!(a[2].difference(GroupElement::tau()), a[1]);
    }

    #[test]
    fn binomial_mod_p() {
        assert_eq!(binomial_table(5)[4], vec![1, 4, 1, 4, 1]);
        assert_eq!(binomial_table(3)[2], vec![1, 2, 1]);
    }
}
