//! Generators for test and sweep inputs.

use rand::Rng;

use crate::extension_algebra::{validate_pair, ExtensionError, ExtensionPair};
use crate::finite_field::{FqElem, GaloisField};
use crate::laurent::LaurentPoly;

pub fn random_elem<R: Rng + ?Sized>(field: &GaloisField, rng: &mut R) -> FqElem {
    field.elements().nth(rng.gen_range(0..field.order() as usize)).expect("in range")
}

/// Uniform element of `F_q ∖ F_p`; the field must have degree at least 2.
pub fn random_non_prime<R: Rng + ?Sized>(field: &GaloisField, rng: &mut R) -> FqElem {
    assert!(field.n() >= 2, "F_p has no elements outside F_p");
    loop {
        let x = random_elem(field, rng);
        if !field.is_in_prime_field(x) {
            return x;
        }
    }
}

/// Random element of `J` supported on exponents `-max_degree..=-1`.
pub fn random_j<R: Rng + ?Sized>(field: &GaloisField, max_degree: i64, rng: &mut R) -> LaurentPoly {
    let p = field.p() as i64;
    let terms: Vec<(i64, FqElem)> =
        (1..=max_degree).filter(|e| e % p != 0).map(|e| (-e, random_elem(field, rng))).collect();
    LaurentPoly::from_terms(field, terms)
}

/// Random valid pair, resampling until the hypotheses hold.
pub fn random_pair<R: Rng + ?Sized>(field: &GaloisField, max_degree: i64, rng: &mut R) -> ExtensionPair {
    assert!(max_degree >= 2, "J⁽²⁾ needs two independent exponents or coefficients");
    loop {
        let a = random_non_prime(field, rng);
        let g1 = random_j(field, max_degree, rng);
        let g2 = random_j(field, max_degree, rng);
        if let Ok(pair) = validate_pair(field, a, g1, g2) {
            return pair;
        }
    }
}

/// `g1 = t^{-(p²-1)}`, `g2 = c·t^{-(p²-1)} + t^{-1}`: every member of this
/// family has the same ramification filtration.
pub fn counterexample_pair(field: &GaloisField, a: FqElem, c: FqElem) -> Result<ExtensionPair, ExtensionError> {
    let p = field.p() as i64;
    let e = -(p * p - 1);
    let g1 = LaurentPoly::t_pow(field, e);
    let g2 = LaurentPoly::monomial(field, c, e) + LaurentPoly::t_pow(field, -1);
    validate_pair(field, a, g1, g2)
}
