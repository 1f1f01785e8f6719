use crate::error::Error;
use crate::field::{FieldSpec, Scalar};
use serde_json::{json, Value};

/// Dense matrix over an exact field, row major. Small sizes only (tens of
/// rows/columns), so plain Gaussian elimination with exact division is the
/// right tool; there is no pivoting subtlety over an exact field beyond
/// finding any nonzero entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl ScalarMatrix {
    pub fn zero(field: FieldSpec, rows: usize, cols: usize) -> Self {
        ScalarMatrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Result<Self, Error> {
        let nrows = rows.len();
        let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(Error::ArityMismatch {
                    expected: ncols,
                    got: row.len(),
                });
            }
            for s in &row {
                if !field.owns(s) {
                    return Err(Error::FieldMismatch);
                }
            }
            data.extend(row);
        }
        Ok(ScalarMatrix {
            field,
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        debug_assert!(self.field.owns(&v));
        self.data[r * self.cols + c] = v;
    }

    /// Rank by row reduction. The matrix is copied; self is untouched.
    pub fn rank(&self) -> usize {
        let f = self.field;
        let mut m = self.data.clone();
        let (nr, nc) = (self.rows, self.cols);
        let at = |m: &Vec<Scalar>, r: usize, c: usize| m[r * nc + c].clone();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..nc {
            // find a pivot at or below `row`
            let Some(p) = (row..nr).find(|&r| !f.is_zero(&at(&m, r, col))) else {
                continue;
            };
            if p != row {
                for c in 0..nc {
                    m.swap(row * nc + c, p * nc + c);
                }
            }
            let inv = f.inv(&at(&m, row, col)).expect("pivot is nonzero");
            for r in (row + 1)..nr {
                let lead = at(&m, r, col);
                if f.is_zero(&lead) {
                    continue;
                }
                let factor = f.mul(&lead, &inv);
                for c in col..nc {
                    let v = f.sub(&at(&m, r, c), &f.mul(&factor, &at(&m, row, c)));
                    m[r * nc + c] = v;
                }
            }
            rank += 1;
            row += 1;
            if row == nr {
                break;
            }
        }
        rank
    }

    pub fn mul(&self, other: &ScalarMatrix) -> Result<ScalarMatrix, Error> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::ArityMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let f = self.field;
        let mut out = ScalarMatrix::zero(f, self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = f.zero();
                for i in 0..self.cols {
                    acc = f.add(&acc, &f.mul(self.get(r, i), other.get(i, c)));
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// Gauss-Jordan inverse of a square matrix; None when singular.
    pub fn inverse(&self) -> Option<ScalarMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let f = self.field;
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = ScalarMatrix::zero(f, n, n);
        for i in 0..n {
            inv.set(i, i, f.one());
        }
        for col in 0..n {
            let p = (col..n).find(|&r| !f.is_zero(a.get(r, col)))?;
            if p != col {
                for c in 0..n {
                    let (x, y) = (a.get(p, c).clone(), a.get(col, c).clone());
                    a.set(p, c, y);
                    a.set(col, c, x);
                    let (x, y) = (inv.get(p, c).clone(), inv.get(col, c).clone());
                    inv.set(p, c, y);
                    inv.set(col, c, x);
                }
            }
            let scale = f.inv(a.get(col, col)).expect("pivot is nonzero");
            for c in 0..n {
                a.set(col, c, f.mul(a.get(col, c), &scale));
                inv.set(col, c, f.mul(inv.get(col, c), &scale));
            }
            for r in 0..n {
                if r == col || f.is_zero(a.get(r, col)) {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for c in 0..n {
                    let v = f.sub(a.get(r, c), &f.mul(&factor, a.get(col, c)));
                    a.set(r, c, v);
                    let w = f.sub(inv.get(r, c), &f.mul(&factor, inv.get(col, c)));
                    inv.set(r, c, w);
                }
            }
        }
        Some(inv)
    }

    /// Entries as exact JSON values: prime-field residues and integral
    /// rationals become numbers, proper fractions become "a/b" strings.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Vec<Value>> = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).to_json()).collect())
            .collect();
        json!({
            "rows": self.rows,
            "cols": self.cols,
            "entries": rows,
        })
    }
}
