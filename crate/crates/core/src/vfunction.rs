//! The v-function of the natural 2-dimensional representation of
//! `G = ⟨σ, τ⟩ ⊂ SL₂`, evaluated on `L_{g1,g2}` in two independent ways.
//!
//! * [`v_formula`]: `⌈-min{v_K(g1), p·v_K(a^p g1 + g2)} / p²⌉`.
//! * [`v_oracle`]: solve the linear conditions cutting out
//!   `Θ_L = {m : m(σ-1)² = 0, m(τ-1) = a·m(σ-1)}` on the monomial basis of
//!   `L`, scale the kernel basis into `O_L`, transport it to the tuning
//!   module and take `v_L` of the determinant `det(φ_i(x_j))` divided by
//!   `♯G = p²`.
//!
//! The oracle never looks at `f`: its only shared input with the formula is
//! the pair itself.

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::exact_linalg::LaurentMatrix;
use crate::extension_algebra::{ExtensionPair, GroupElement, LElement};
use crate::laurent::{LaurentPoly, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VFunctionError {
    /// The kernel did not have the shape required to split the lattice.
    /// Never expected for validated pairs.
    #[error("lattice assertion failed: {0}")]
    LatticeAssertionFailed(String),
    #[error("element does not satisfy the Θ conditions")]
    NotInTheta,
    #[error("v_L of the tuning determinant ({0}) is not divisible by p²")]
    NonIntegral(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    Formula,
    Oracle,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Formula => "formula",
            Route::Oracle => "oracle",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VResult {
    /// `v_V(g1, g2)`; its denominator divides `p²`.
    pub value: Ratio<i64>,
    /// `-v_L(γ)` for the formula route, `-v_L(m2)` for the oracle.
    pub s: i64,
    pub route: Route,
}

impl VResult {
    /// Integer value, if the denominator is 1.
    pub fn as_integer(&self) -> Option<i64> {
        self.value.is_integer().then(|| self.value.to_integer())
    }
}

/// `O_K`-basis `{t^{e1}·m1, t^{e2}·m2}` of `Θ_L`.
#[derive(Debug, Clone)]
pub struct ThetaBasis {
    pub m1: LElement,
    pub m2: LElement,
    pub e1: i64,
    pub e2: i64,
    /// `-v_L(m2)`.
    pub s: i64,
}

pub fn v_formula(pair: &ExtensionPair) -> VResult {
    let p = pair.p() as i64;
    let v_g1 = pair.g1().valuation();
    let v_f = pair.f().valuation().scale(p);
    let s = -v_g1.min(v_f).finite().expect("g1 is nonzero");
    VResult { value: Ratio::new(s, p * p).ceil(), s, route: Route::Formula }
}

/// Stack of the two `K`-linear maps `m ↦ m(σ-1)²` and
/// `m ↦ m(τ-1) - a·m(σ-1)` as a `2p² × p²` matrix on the monomial basis.
pub fn theta_conditions_matrix(pair: &ExtensionPair) -> LaurentMatrix {
    let n = pair.degree();
    let p = pair.p() as usize;
    let field = pair.field();
    let a = LaurentPoly::constant(field, pair.a());
    let mut m = LaurentMatrix::zeros(field, 2 * n, n);
    for k in 0..n {
        let e = pair.monomial(k / p, k % p, LaurentPoly::one(field));
        let d_sigma = e.difference(GroupElement::sigma());
        let first = d_sigma.difference(GroupElement::sigma());
        let second = &e.difference(GroupElement::tau()) - &d_sigma.scale(&a);
        for (r, c) in first.coeffs().iter().chain(second.coeffs()).enumerate() {
            m.set(r, k, c.clone());
        }
    }
    m
}

pub fn is_in_theta(m: &LElement) -> bool {
    let a = LaurentPoly::constant(m.pair().field(), m.pair().a());
    let d_sigma = m.difference(GroupElement::sigma());
    d_sigma.difference(GroupElement::sigma()).is_zero()
        && (&m.difference(GroupElement::tau()) - &d_sigma.scale(&a)).is_zero()
}

pub fn theta_lattice(pair: &ExtensionPair) -> Result<ThetaBasis, VFunctionError> {
    let fail = |msg: String| Err(VFunctionError::LatticeAssertionFailed(msg));
    // natural order puts the constant monomial first
    let kernel = theta_conditions_matrix(pair).kernel();
    if kernel.len() != 2 {
        return fail(format!("Θ has dimension {} over K, expected 2", kernel.len()));
    }
    let mut it = kernel.into_iter();
    let m1 = pair.element(it.next().unwrap()).expect("kernel vector has p² entries");
    let m2 = pair.element(it.next().unwrap()).expect("kernel vector has p² entries");
    if m1 != pair.one() {
        return fail(format!("first kernel vector {m1:?} is not 1"));
    }
    if !m2.coeff(0, 0).is_zero() {
        return fail("second kernel vector has a constant coordinate".into());
    }
    let p2 = pair.degree() as i64;
    let s = match m2.valuation() {
        Valuation::Finite(v) => -v,
        Valuation::Infinity => return fail("second kernel vector is zero".into()),
    };
    // v_L(K) = p²Z, so s ∉ p²Z keeps the two directions from cancelling
    if s % p2 == 0 {
        return fail(format!("s = {s} is divisible by p² = {p2}"));
    }
    Ok(ThetaBasis { m1, m2, e1: 0, e2: Ratio::new(s, p2).ceil().to_integer(), s })
}

/// `m ↦ φ` with `φ(x1) = m(σ-1)`, `φ(x2) = m`; returns `(φ(x1), φ(x2))`.
pub fn theta_to_xi(m: &LElement) -> Result<(LElement, LElement), VFunctionError> {
    if !is_in_theta(m) {
        return Err(VFunctionError::NotInTheta);
    }
    Ok((m.difference(GroupElement::sigma()), m.clone()))
}

/// Whether `x1 ↦ phi1`, `x2 ↦ phi2` is `G`-equivariant, using
/// `x1·σ = x1`, `x2·σ = x1 + x2`, `x1·τ = x1`, `x2·τ = a·x1 + x2`.
pub fn is_equivariant(phi1: &LElement, phi2: &LElement) -> bool {
    let pair = phi1.pair();
    let a = LaurentPoly::constant(pair.field(), pair.a());
    let (s, t) = (GroupElement::sigma(), GroupElement::tau());
    phi1.act(s) == *phi1 && phi2.act(s) == phi1 + phi2 && phi1.act(t) == *phi1 && phi2.act(t) == &phi1.scale(&a) + phi2
}

pub fn v_oracle(pair: &ExtensionPair) -> Result<VResult, VFunctionError> {
    let basis = theta_lattice(pair)?;
    let field = pair.field();
    let b1 = basis.m1.scale(&LaurentPoly::t_pow(field, basis.e1));
    let b2 = basis.m2.scale(&LaurentPoly::t_pow(field, basis.e2));
    let (x11, x12) = theta_to_xi(&b1)?;
    let (x21, x22) = theta_to_xi(&b2)?;
    let det = &(&x11 * &x22) - &(&x12 * &x21);
    let p2 = pair.degree() as i64;
    let v = det
        .valuation()
        .finite()
        .ok_or_else(|| VFunctionError::LatticeAssertionFailed("tuning determinant vanishes".into()))?;
    if v % p2 != 0 {
        return Err(VFunctionError::NonIntegral(v));
    }
    Ok(VResult { value: Ratio::new(v, p2), s: basis.s, route: Route::Oracle })
}
