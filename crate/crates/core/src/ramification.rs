//! Upper and lower ramification filtrations of `G = Gal(L_{g1,g2}/K)`.
//!
//! Each `F_p`-line `ℓ = F_p·(λ g1 + μ g2)` cuts out a degree-`p`
//! subextension `K[x]/(x^p - x - (λ g1 + μ g2))` whose single upper jump is
//! `-v_K` of the reduced representative. Its fixing group is the
//! annihilator of `ℓ` under `⟨σ^i τ^j, λ g1 + μ g2⟩ = iμ + jλ`. Because the
//! upper numbering passes to quotients, `G^v` is the intersection of the
//! annihilators of all lines whose jump is `< v`. The lower numbering is
//! obtained by pushing the upper breaks through the Herbrand function `ψ`.

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::extension_algebra::{ExtensionPair, GroupElement};
use crate::laurent::{LaurentError, LaurentPoly};

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RamificationError {
    #[error("expected a filtration in {expected} numbering")]
    NumberingMismatch { expected: Numbering },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// A point `(λ : μ)` of `P¹(F_p)` with its Artin-Schreier data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub lambda: u32,
    pub mu: u32,
    /// Reduced representative of `λ g1 + μ g2` in `J`.
    pub rep: LaurentPoly,
    /// `-v_K(rep)`.
    pub jump: i64,
}

/// A subgroup of `(Z/p)²`, kept as a reduced echelon basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    p: u32,
    basis: Vec<GroupElement>,
}

impl Subgroup {
    pub fn trivial(p: u32) -> Self {
        Subgroup { p, basis: Vec::new() }
    }

    pub fn whole(p: u32) -> Self {
        Subgroup { p, basis: vec![GroupElement::sigma(), GroupElement::tau()] }
    }

    /// Subgroup generated by `gens`.
    pub fn generated_by(p: u32, gens: &[GroupElement]) -> Self {
        let nonzero: Vec<GroupElement> = gens.iter().copied().filter(|g| *g != GroupElement::identity()).collect();
        let Some(&first) = nonzero.first() else {
            return Self::trivial(p);
        };
        let normalized = normalize_vector(p, first);
        // a second generator off the line spanned by the first spans everything
        if nonzero.iter().any(|&g| normalize_vector(p, g) != normalized) {
            return Self::whole(p);
        }
        Subgroup { p, basis: vec![normalized] }
    }

    pub fn basis(&self) -> &[GroupElement] {
        &self.basis
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.basis.len() as u32)
    }

    pub fn contains(&self, g: GroupElement) -> bool {
        match self.basis.len() {
            0 => g == GroupElement::identity(),
            2 => true,
            _ => g == GroupElement::identity() || normalize_vector(self.p, g) == self.basis[0],
        }
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        GroupElement::all(self.p).filter(|&g| self.contains(g)).collect()
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        let common: Vec<GroupElement> = self.elements().into_iter().filter(|&g| other.contains(g)).collect();
        Self::generated_by(self.p, &common)
    }

    /// The product `self · other`.
    pub fn join(&self, other: &Subgroup) -> Subgroup {
        let gens: Vec<GroupElement> = self.basis.iter().chain(&other.basis).copied().collect();
        Self::generated_by(self.p, &gens)
    }

    fn encode(&self) -> String {
        let parts: Vec<String> = self.basis.iter().map(|g| format!("{}.{}", g.i, g.j)).collect();
        format!("[{}]", parts.join(";"))
    }
}

/// Scale so the first nonzero coordinate is 1.
fn normalize_vector(p: u32, g: GroupElement) -> GroupElement {
    let lead = if g.i != 0 { g.i } else { g.j };
    debug_assert!(lead != 0);
    let inv = (1..p).find(|&x| x * lead % p == 1).expect("p is prime");
    GroupElement::new((g.i * inv) as i64, (g.j * inv) as i64, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Numbering {
    Upper,
    Lower,
}

impl fmt::Display for Numbering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Numbering::Upper => "upper",
            Numbering::Lower => "lower",
        })
    }
}

/// Step function `v ↦ G^v` (or `G_v`): the value at `v` is the subgroup
/// attached to the largest break `< v`, and `G` before the first break.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    pub numbering: Numbering,
    pub p: u32,
    pub breaks: Vec<(Rational, Subgroup)>,
}

impl Filtration {
    pub fn at(&self, v: Rational) -> Subgroup {
        self.breaks
            .iter()
            .rev()
            .find(|(u, _)| *u < v)
            .map(|(_, h)| h.clone())
            .unwrap_or_else(|| Subgroup::whole(self.p))
    }

    pub fn break_values(&self) -> Vec<Rational> {
        self.breaks.iter().map(|(u, _)| *u).collect()
    }

    /// Break values and subgroup orders only, `"upper|u1:o1,u2:o2"`.
    pub fn shape_fingerprint(&self) -> String {
        let parts: Vec<String> = self.breaks.iter().map(|(u, h)| format!("{u}:{}", h.order())).collect();
        format!("{}|{}", self.numbering, parts.join(","))
    }
}

/// Canonical string for a filtration: `"upper|u1:o1[b],u2:o2[b]"`, where
/// `u` is a reduced fraction, `o` the order of the subgroup after the break
/// and `[b]` its echelon basis written as `i.j` pairs for `σ^i τ^j`.
pub fn filtration_fingerprint(filt: &Filtration) -> String {
    let parts: Vec<String> = filt.breaks.iter().map(|(u, h)| format!("{u}:{}{}", h.order(), h.encode())).collect();
    format!("{}|{}", filt.numbering, parts.join(","))
}

/// The `p + 1` lines: `(1 : 0)` first, then `(λ : 1)` for `λ = 0, …, p-1`.
pub fn lines(pair: &ExtensionPair) -> Result<Vec<Line>, RamificationError> {
    let p = pair.p();
    let field = pair.field();
    let coords = std::iter::once((1, 0)).chain((0..p).map(|l| (l, 1)));
    coords
        .map(|(lambda, mu)| {
            let g =
                pair.g1().scalar_mul(field.from_int(lambda as i64)) + pair.g2().scalar_mul(field.from_int(mu as i64));
            let rep = g.reduce_to_j()?.rep;
            let jump = -rep.valuation().finite().expect("J⁽²⁾ makes every combination nonzero");
            Ok(Line { lambda, mu, rep, jump })
        })
        .collect()
}

/// `{σ^i τ^j : iμ + jλ = 0}`, the group fixing the line's subextension.
pub fn annihilator(line: &Line, p: u32) -> Subgroup {
    Subgroup::generated_by(p, &[GroupElement::new(line.lambda as i64, -(line.mu as i64), p)])
}

pub fn upper_filtration(pair: &ExtensionPair) -> Result<Filtration, RamificationError> {
    let p = pair.p();
    let ls = lines(pair)?;
    let mut jumps: Vec<i64> = ls.iter().map(|l| l.jump).collect();
    jumps.sort_unstable();
    jumps.dedup();
    let mut breaks: Vec<(Rational, Subgroup)> = Vec::new();
    let mut current = Subgroup::whole(p);
    for u in jumps {
        let next =
            ls.iter().filter(|l| l.jump <= u).fold(Subgroup::whole(p), |acc, l| acc.intersect(&annihilator(l, p)));
        if next != current {
            breaks.push((Rational::from(u), next.clone()));
            current = next;
        }
    }
    debug_assert_eq!(current, Subgroup::trivial(p));
    Ok(Filtration { numbering: Numbering::Upper, p, breaks })
}

/// Continuous increasing piecewise-linear map on `[0, ∞)` with `h(0) = 0`.
/// Negative arguments are mapped by the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HerbrandFn {
    /// Knots `(x_k, h(x_k))`, starting at `(0, 0)`.
    pub knots: Vec<(Rational, Rational)>,
    /// `slopes[k]` applies from `x_k` up to the next knot (the last forever).
    pub slopes: Vec<Rational>,
}

impl HerbrandFn {
    fn from_breaks(breaks: &[Rational], slopes_after: &[Rational]) -> Self {
        let mut knots = vec![(Rational::from(0), Rational::from(0))];
        let mut slopes = vec![Rational::from(1)];
        for (&b, &s) in breaks.iter().zip(slopes_after) {
            let &(x, y) = knots.last().unwrap();
            let slope = *slopes.last().unwrap();
            knots.push((b, y + slope * (b - x)));
            slopes.push(s);
        }
        HerbrandFn { knots, slopes }
    }

    pub fn eval(&self, x: Rational) -> Rational {
        if x < Rational::from(0) {
            return x;
        }
        let k = self.knots.iter().rposition(|&(xk, _)| xk <= x).unwrap_or(0);
        let (xk, yk) = self.knots[k];
        yk + self.slopes[k] * (x - xk)
    }

    pub fn inverse(&self) -> HerbrandFn {
        HerbrandFn {
            knots: self.knots.iter().map(|&(x, y)| (y, x)).collect(),
            slopes: self.slopes.iter().map(|s| s.recip()).collect(),
        }
    }
}

/// `φ(x) = ∫_0^x dt / (G_0 : G_t)` from a lower filtration.
pub fn herbrand_phi(filt: &Filtration) -> Result<HerbrandFn, RamificationError> {
    if filt.numbering != Numbering::Lower {
        return Err(RamificationError::NumberingMismatch { expected: Numbering::Lower });
    }
    let g0 = Subgroup::whole(filt.p).order() as i64;
    let slopes: Vec<Rational> = filt.breaks.iter().map(|(_, h)| Rational::new(h.order() as i64, g0)).collect();
    Ok(HerbrandFn::from_breaks(&filt.break_values(), &slopes))
}

/// `ψ = φ^{-1}`, built from an upper filtration with slope `(G^0 : G^v)`.
pub fn herbrand_psi(filt: &Filtration) -> Result<HerbrandFn, RamificationError> {
    if filt.numbering != Numbering::Upper {
        return Err(RamificationError::NumberingMismatch { expected: Numbering::Upper });
    }
    let g0 = Subgroup::whole(filt.p).order() as i64;
    let slopes: Vec<Rational> = filt.breaks.iter().map(|(_, h)| Rational::new(g0, h.order() as i64)).collect();
    Ok(HerbrandFn::from_breaks(&filt.break_values(), &slopes))
}

/// Transport an upper filtration to lower numbering through `ψ`.
pub fn upper_to_lower(upper: &Filtration) -> Result<Filtration, RamificationError> {
    let psi = herbrand_psi(upper)?;
    Ok(Filtration {
        numbering: Numbering::Lower,
        p: upper.p,
        breaks: upper.breaks.iter().map(|(u, h)| (psi.eval(*u), h.clone())).collect(),
    })
}

pub fn lower_filtration(pair: &ExtensionPair) -> Result<Filtration, RamificationError> {
    upper_to_lower(&upper_filtration(pair)?)
}

/// Check `(G/H)^v = G^v H / H` for every order-`p` subgroup `H` on a grid
/// of points around each break. The left side comes from the line's own
/// jump: the whole quotient up to the jump, trivial after it.
pub fn quotient_compat_check(pair: &ExtensionPair) -> Result<bool, RamificationError> {
    let p = pair.p();
    let upper = upper_filtration(pair)?;
    let ls = lines(pair)?;
    let half = Rational::new(1, 2);
    let mut marks: Vec<Rational> = upper.break_values();
    marks.extend(ls.iter().map(|l| Rational::from(l.jump)));
    marks.sort();
    marks.dedup();
    let mut points = vec![Rational::from(0)];
    for w in marks.windows(2) {
        points.push((w[0] + w[1]) / 2);
    }
    for &u in &marks {
        points.extend([u - half, u, u + half]);
    }
    points.push(marks.last().copied().unwrap_or_default() + 1);

    let whole = Subgroup::whole(p);
    for line in &ls {
        let h = annihilator(line, p);
        for &v in &points {
            let image = upper.at(v).join(&h);
            let expected = if v <= Rational::from(line.jump) { &whole } else { &h };
            if image != *expected {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
