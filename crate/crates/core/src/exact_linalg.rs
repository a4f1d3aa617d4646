//! Fraction-free linear algebra with entries in `F_q[t, t^{-1}]`.
//!
//! Elimination follows Bareiss: after `k` pivots every remaining entry is a
//! `(k+1)`-minor of the input, so each update divides exactly by the
//! previous pivot and no fractions ever appear. Pivots are chosen by
//! smallest `v_K`, ties going to the lowest row.

use thiserror::Error;

use crate::finite_field::GaloisField;
use crate::laurent::LaurentPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("column order is not a permutation of 0..{0}")]
    BadOrder(usize),
}

#[derive(Clone, PartialEq, Eq)]
pub struct LaurentMatrix {
    field: GaloisField,
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPoly>,
}

impl std::fmt::Debug for LaurentMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "LaurentMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|e| e.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Row echelon form produced by fraction-free elimination.
struct Echelon {
    rows: Vec<Vec<LaurentPoly>>,
    /// `(row, column)` of each pivot, in elimination order.
    pivots: Vec<(usize, usize)>,
    swaps: usize,
}

impl LaurentMatrix {
    pub fn zeros(field: &GaloisField, rows: usize, cols: usize) -> Self {
        LaurentMatrix { field: field.clone(), rows, cols, entries: vec![LaurentPoly::zero(field); rows * cols] }
    }

    pub fn identity(field: &GaloisField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, LaurentPoly::one(field));
        }
        m
    }

    pub fn from_rows(field: &GaloisField, rows: Vec<Vec<LaurentPoly>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Ok(LaurentMatrix { field: field.clone(), rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn get(&self, r: usize, c: usize) -> &LaurentPoly {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: LaurentPoly) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[LaurentPoly] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, other: &LaurentMatrix) -> Result<LaurentMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = LaurentPoly::zero(&self.field);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if !a.is_zero() {
                        acc = acc + a * other.get(k, j);
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[LaurentPoly]) -> Result<Vec<LaurentPoly>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!("vector of length {}", v.len())));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(LaurentPoly::zero(&self.field), |acc, (a, x)| acc + a * x)
            })
            .collect())
    }

    fn echelon(&self, col_order: &[usize]) -> Echelon {
        let mut m: Vec<Vec<LaurentPoly>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        let mut prev = LaurentPoly::one(&self.field);
        let mut pivots = Vec::new();
        let mut swaps = 0;
        let mut r = 0;
        for (pos, &c) in col_order.iter().enumerate() {
            if r == self.rows {
                break;
            }
            let Some(best) = (r..self.rows).filter(|&i| !m[i][c].is_zero()).min_by_key(|&i| (m[i][c].valuation(), i))
            else {
                continue;
            };
            if best != r {
                m.swap(best, r);
                swaps += 1;
            }
            let later = &col_order[pos + 1..];
            let (top, bottom) = m.split_at_mut(r + 1);
            let pivot_row = &top[r];
            let piv = &pivot_row[c];
            for row in bottom.iter_mut() {
                let factor = row[c].clone();
                for &j in later {
                    let mut v = piv * &row[j];
                    if !factor.is_zero() && !pivot_row[j].is_zero() {
                        v = v - &factor * &pivot_row[j];
                    }
                    row[j] = v.div_exact(&prev).expect("Bareiss division is exact");
                }
                row[c] = LaurentPoly::zero(&self.field);
            }
            prev = m[r][c].clone();
            pivots.push((r, c));
            r += 1;
        }
        Echelon { rows: m, pivots, swaps }
    }

    pub fn rank(&self) -> usize {
        let order: Vec<usize> = (0..self.cols).collect();
        self.echelon(&order).pivots.len()
    }

    pub fn det(&self) -> Result<LaurentPoly, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(LaurentPoly::one(&self.field));
        }
        let order: Vec<usize> = (0..n).collect();
        let e = self.echelon(&order);
        if e.pivots.len() < n {
            return Ok(LaurentPoly::zero(&self.field));
        }
        let (r, c) = e.pivots[n - 1];
        let d = e.rows[r][c].clone();
        Ok(if e.swaps % 2 == 1 { -d } else { d })
    }

    /// Right kernel in the natural coordinate order; see
    /// [`Self::kernel_with_order`].
    pub fn kernel(&self) -> Vec<Vec<LaurentPoly>> {
        let order: Vec<usize> = (0..self.cols).collect();
        self.kernel_with_order(&order).expect("identity order is valid")
    }

    /// Basis of the right kernel over `F_q(t)`, with denominators cleared.
    ///
    /// The basis is in reduced echelon shape relative to `order`: the
    /// vectors are sorted by the position of their leading coordinate
    /// (first nonzero entry in `order`), and every other vector vanishes
    /// there. Each vector is primitive over `F_q[t, t^{-1}]` and scaled so
    /// its leading coordinate has lowest term exactly `1·t^0`.
    pub fn kernel_with_order(&self, order: &[usize]) -> Result<Vec<Vec<LaurentPoly>>, LinalgError> {
        let mut seen = vec![false; self.cols];
        if order.len() != self.cols || order.iter().any(|&c| c >= self.cols || std::mem::replace(&mut seen[c], true)) {
            return Err(LinalgError::BadOrder(self.cols));
        }
        // eliminating in reverse order makes each free column the leading
        // coordinate of its kernel vector with respect to `order`
        let reversed: Vec<usize> = order.iter().rev().copied().collect();
        let e = self.echelon(&reversed);
        let mut is_pivot = vec![false; self.cols];
        for &(_, c) in &e.pivots {
            is_pivot[c] = true;
        }
        let zero = LaurentPoly::zero(&self.field);
        let denom = e.pivots.iter().fold(LaurentPoly::one(&self.field), |acc, &(r, c)| acc * &e.rows[r][c]);

        let mut basis = Vec::new();
        for &free in order.iter().filter(|&&c| !is_pivot[c]) {
            let mut x = vec![zero.clone(); self.cols];
            x[free] = denom.clone();
            for &(r, c) in e.pivots.iter().rev() {
                let row = &e.rows[r];
                let mut acc = zero.clone();
                for j in 0..self.cols {
                    if j != c && !row[j].is_zero() && !x[j].is_zero() {
                        acc = acc + &row[j] * &x[j];
                    }
                }
                x[c] = (-acc).div_exact(&row[c]).expect("back substitution is exact");
            }
            basis.push(normalize(x, free));
        }
        Ok(basis)
    }
}

/// Divide out the content and scale so `v[lead]` has lowest term `1·t^0`.
fn normalize(mut v: Vec<LaurentPoly>, lead: usize) -> Vec<LaurentPoly> {
    let field = v[lead].field().clone();
    let content = v.iter().fold(LaurentPoly::zero(&field), |g, x| g.gcd(x));
    if !content.is_one() {
        for x in v.iter_mut() {
            *x = x.div_exact(&content).expect("content divides every entry");
        }
    }
    let lead_val = v[lead].valuation().finite().expect("leading coordinate is nonzero");
    let inv = field.inv(v[lead].leading_coeff()).expect("nonzero");
    v.into_iter().map(|x| x.scalar_mul(inv).shift(-lead_val)).collect()
}
