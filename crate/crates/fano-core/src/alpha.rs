use crate::combi::MultiDegree;
use crate::error::Error;
use crate::fano::{fano_contains, restrict_to_plane};
use crate::field::{FieldSpec, Scalar};
use crate::grassmann::PlaneCoords;
use crate::matrix::ScalarMatrix;
use crate::monomial::{basis, Monomial};
use crate::poly::FormTuple;
use serde_json::{json, Value};
use std::collections::BTreeMap;

/// The multiplication-by-partials map at a contained plane, as an explicit
/// matrix.
///
/// Rows run over the degree bases of the plane's parameter ring, one block
/// per component in order (block i has C(d_i + k, k) rows). Columns are the
/// pairs (j, a): ambient non-pivot column j ascending, then plane variable
/// index a; column (j, a) holds the block-stacked coefficients of
/// l_a * (df_i/dz_j restricted to the plane). This is exactly the column
/// layout of the local system's Jacobian, entry for entry.
#[derive(Clone, Debug)]
pub struct AlphaMatrix {
    matrix: ScalarMatrix,
    /// (component, monomial) per row.
    row_labels: Vec<(usize, Monomial)>,
    /// (ambient column, plane variable) per column.
    col_labels: Vec<(usize, usize)>,
}

impl AlphaMatrix {
    pub fn matrix(&self) -> &ScalarMatrix {
        &self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn row_labels(&self) -> &[(usize, Monomial)] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[(usize, usize)] {
        &self.col_labels
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// Surjectivity onto the full block space: rank equals the row count
    /// C(d + k, k). Failure is the non-smoothness criterion.
    pub fn is_surjective(&self) -> bool {
        self.rank() == self.rows()
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<String> = self
            .row_labels
            .iter()
            .map(|(i, m)| format!("{}[{}]", m.display_with(&|v| format!("z{v}")), i))
            .collect();
        let cols: Vec<Value> = self
            .col_labels
            .iter()
            .map(|(j, a)| json!({ "j": j, "a": a }))
            .collect();
        json!({
            "rows": self.rows(),
            "cols": self.cols(),
            "row_labels": rows,
            "col_labels": cols,
            "matrix": self.matrix.to_json(),
            "rank": self.rank(),
            "surjective": self.is_surjective(),
        })
    }
}

/// Build the multiplication matrix at a plane contained in the vanishing
/// locus of the tuple.
pub fn alpha_matrix(f_tuple: &FormTuple, p: &PlaneCoords) -> Result<AlphaMatrix, Error> {
    if !fano_contains(f_tuple, p)? {
        return Err(Error::NotOnFano);
    }
    let chart = p.chart();
    let (k, n) = (chart.k(), chart.n());
    let field = f_tuple.field();

    let mut row_labels = Vec::new();
    let mut block_offsets = Vec::with_capacity(f_tuple.len());
    for (i, &d) in f_tuple.degrees().iter().enumerate() {
        block_offsets.push(row_labels.len());
        for m in basis(d, k + 1) {
            row_labels.push((i, m));
        }
    }

    let mut col_labels = Vec::with_capacity((n - k) * (k + 1));
    for b in chart.nonpivots() {
        for a in 0..=k {
            col_labels.push((b, a));
        }
    }

    let mut matrix = ScalarMatrix::zero(field, row_labels.len(), col_labels.len());
    for (i, f) in f_tuple.components().iter().enumerate() {
        let offset = block_offsets[i];
        for (jj, &b) in chart.nonpivots().iter().enumerate() {
            let restricted = restrict_to_plane(&f.differentiate(b)?, p)?;
            for a in 0..=k {
                let col = jj * (k + 1) + a;
                for (m, c) in restricted.terms() {
                    let row = offset + m.times_var(a).basis_position();
                    matrix.set(row, col, c.clone());
                }
            }
        }
    }
    Ok(AlphaMatrix {
        matrix,
        row_labels,
        col_labels,
    })
}

/// True iff the multiplication map at p hits the whole block space.
pub fn alpha_surjective(f_tuple: &FormTuple, p: &PlaneCoords) -> Result<bool, Error> {
    Ok(alpha_matrix(f_tuple, p)?.is_surjective())
}

/// The symbolic matrix of the multiplication pairing for a degree tuple:
/// k+1 rows labelled z_0..z_k, one column per basis monomial z^J of each
/// degree-(d_j - 1) block, entry (i, (j, J)) = z^(J + e_i) placed in
/// block j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MMuMatrix {
    k: usize,
    degrees: Vec<u32>,
    /// (block, J) per column, blocks in order, J ascending in basis order.
    cols: Vec<(usize, Monomial)>,
}

impl MMuMatrix {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn rows(&self) -> usize {
        self.k + 1
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn col_label(&self, c: usize) -> &(usize, Monomial) {
        &self.cols[c]
    }

    /// Entry (i, c) as (block, monomial): the c-th column's label monomial
    /// times z_i, in the column's block.
    pub fn entry(&self, i: usize, c: usize) -> (usize, Monomial) {
        let (block, j) = &self.cols[c];
        (*block, j.times_var(i))
    }

    fn tuple_string(&self, block: usize, m: &Monomial) -> String {
        let s = self.degrees.len();
        if s == 1 {
            return m.display_with(&|v| format!("z{v}"));
        }
        (0..s)
            .map(|b| {
                if b == block {
                    m.display_with(&|v| format!("z{v}"))
                } else {
                    "0".to_string()
                }
            })
            .collect::<Vec<_>>()
            .join("(+)")
    }

    pub fn entry_string(&self, i: usize, c: usize) -> String {
        let (block, m) = self.entry(i, c);
        self.tuple_string(block, &m)
    }

    pub fn col_label_string(&self, c: usize) -> String {
        let (block, m) = &self.cols[c];
        self.tuple_string(*block, m)
    }

    /// Block-annotated text layout: a header of column labels, then one
    /// line per row z_i, columns padded to equal width.
    pub fn pretty(&self) -> String {
        let labels: Vec<String> = (0..self.cols()).map(|c| self.col_label_string(c)).collect();
        let mut grid: Vec<Vec<String>> = Vec::with_capacity(self.rows());
        for i in 0..self.rows() {
            grid.push((0..self.cols()).map(|c| self.entry_string(i, c)).collect());
        }
        let widths: Vec<usize> = (0..self.cols())
            .map(|c| {
                grid.iter()
                    .map(|row| row[c].len())
                    .chain(std::iter::once(labels[c].len()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let row_label_width = format!("z{}:", self.rows() - 1).len() + 1;
        let pad_row = |cells: &[String]| {
            cells
                .iter()
                .enumerate()
                .map(|(c, e)| format!("{:<w$}", e, w = widths[c]))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let mut lines = Vec::with_capacity(self.rows() + 1);
        lines.push(format!(
            "{}{}",
            " ".repeat(row_label_width + 2),
            pad_row(&labels)
        ));
        for (i, row) in grid.iter().enumerate() {
            lines.push(format!(
                "{:<w$}[ {} ]",
                format!("z{i}:"),
                pad_row(row),
                w = row_label_width
            ));
        }
        let mut out = String::new();
        for l in &lines {
            out.push_str(l.trim_end());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Vec<String>> = (0..self.rows())
            .map(|i| (0..self.cols()).map(|c| self.entry_string(i, c)).collect())
            .collect();
        json!({
            "k": self.k,
            "d": self.degrees,
            "rows": self.rows(),
            "cols": self.cols(),
            "col_labels": (0..self.cols()).map(|c| self.col_label_string(c)).collect::<Vec<_>>(),
            "entries": entries,
        })
    }
}

/// The symbolic multiplication matrix for a degree tuple in k+1 plane
/// variables.
pub fn m_mu(d: &MultiDegree, k: usize) -> MMuMatrix {
    let degrees: Vec<u32> = d.degrees().iter().map(|&x| x as u32).collect();
    let mut cols = Vec::new();
    for (block, &deg) in degrees.iter().enumerate() {
        for m in basis(deg - 1, k + 1) {
            cols.push((block, m));
        }
    }
    MMuMatrix { k, degrees, cols }
}

/// A sparse linear functional on the block space: one coefficient per
/// basis monomial per block, almost all zero.
#[derive(Clone, Debug, PartialEq)]
pub struct HFunctional {
    field: FieldSpec,
    k: usize,
    degrees: Vec<u32>,
    blocks: Vec<BTreeMap<Monomial, Scalar>>,
}

impl HFunctional {
    pub fn zero(field: FieldSpec, k: usize, degrees: Vec<u32>) -> HFunctional {
        let blocks = vec![BTreeMap::new(); degrees.len()];
        HFunctional {
            field,
            k,
            degrees,
            blocks,
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Add coeff * (z^mono)* in the given block, accumulating into any
    /// existing coefficient there.
    pub fn add_term(&mut self, block: usize, mono: Monomial, coeff: Scalar) -> Result<(), Error> {
        if block >= self.degrees.len() {
            return Err(Error::IndexOutOfRange {
                index: block,
                bound: self.degrees.len(),
            });
        }
        if mono.nvars() != self.k + 1 || mono.degree() != self.degrees[block] {
            return Err(Error::BasisMismatch(format!(
                "functional term {} does not lie in the degree-{} basis of block {} in {} variables",
                mono.display_with(&|v| format!("z{v}")),
                self.degrees[block],
                block,
                self.k + 1,
            )));
        }
        if !self.field.owns(&coeff) {
            return Err(Error::FieldMismatch);
        }
        let map = &mut self.blocks[block];
        let total = match map.get(&mono) {
            Some(old) => self.field.add(old, &coeff),
            None => coeff,
        };
        if self.field.is_zero(&total) {
            map.remove(&mono);
        } else {
            map.insert(mono, total);
        }
        Ok(())
    }

    pub fn coefficient(&self, block: usize, mono: &Monomial) -> Scalar {
        self.blocks[block]
            .get(mono)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn block_is_zero(&self, block: usize) -> bool {
        self.blocks[block].is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.is_empty())
    }
}

/// The scalar matrix h(M) together with its rank.
#[derive(Clone, Debug)]
pub struct HEvaluation {
    pub matrix: ScalarMatrix,
    pub rank: usize,
}

impl HEvaluation {
    pub fn to_json(&self) -> Value {
        json!({
            "matrix": self.matrix.to_json(),
            "rank": self.rank,
        })
    }
}

/// Apply the functional to every entry of the symbolic matrix. The shapes
/// must agree: h's blocks and degrees are those of m's entries (degree d_j
/// in block j).
pub fn apply_h(m: &MMuMatrix, h: &HFunctional) -> Result<HEvaluation, Error> {
    if h.k() != m.k() || h.degrees() != m.degrees() {
        return Err(Error::BasisMismatch(format!(
            "functional indexed by degrees {:?} in {} variables; matrix entries have degrees {:?} in {}",
            h.degrees(),
            h.k() + 1,
            m.degrees(),
            m.k() + 1,
        )));
    }
    let mut matrix = ScalarMatrix::zero(h.field(), m.rows(), m.cols());
    for i in 0..m.rows() {
        for c in 0..m.cols() {
            let (block, mono) = m.entry(i, c);
            matrix.set(i, c, h.coefficient(block, &mono));
        }
    }
    let rank = matrix.rank();
    Ok(HEvaluation { matrix, rank })
}
