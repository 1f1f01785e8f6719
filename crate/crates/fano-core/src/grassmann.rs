use crate::error::Error;
use crate::field::{FieldSpec, Scalar};
use crate::matrix::ScalarMatrix;
use num_bigint::BigUint;
use serde_json::{json, Value};

/// An affine chart on the space of k-planes in P^n: the planes whose
/// row-reduced spanning matrix has identity columns exactly at `pivots`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    k: usize,
    n: usize,
    pivots: Vec<usize>,
}

impl Chart {
    pub fn new(k: usize, n: usize, pivots: Vec<usize>) -> Result<Self, Error> {
        if k >= n {
            return Err(Error::InvalidRange(format!(
                "need k < n, got k = {k}, n = {n}"
            )));
        }
        if pivots.len() != k + 1 {
            return Err(Error::ArityMismatch {
                expected: k + 1,
                got: pivots.len(),
            });
        }
        if pivots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidRange(
                "pivot columns must be strictly increasing".into(),
            ));
        }
        if let Some(&last) = pivots.last() {
            if last > n {
                return Err(Error::IndexOutOfRange {
                    index: last,
                    bound: n + 1,
                });
            }
        }
        Ok(Chart { k, n, pivots })
    }

    /// The standard chart with pivots {0, ..., k}.
    pub fn standard(k: usize, n: usize) -> Result<Self, Error> {
        Chart::new(k, n, (0..=k).collect())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Ambient columns outside the pivot set, ascending. These index the
    /// entry columns of a PlaneCoords.
    pub fn nonpivots(&self) -> Vec<usize> {
        (0..=self.n).filter(|c| !self.pivots.contains(c)).collect()
    }
}

/// A k-plane given by chart coordinates: entry (a, j) is the coefficient of
/// the j-th non-pivot column in the a-th spanning row (x_{a,b} with
/// b = nonpivots[j]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneCoords {
    chart: Chart,
    field: FieldSpec,
    entries: Vec<Scalar>, // row-major (k+1) x (n-k)
}

impl PlaneCoords {
    pub fn new(chart: Chart, field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Result<Self, Error> {
        let (k, n) = (chart.k(), chart.n());
        if rows.len() != k + 1 {
            return Err(Error::ArityMismatch {
                expected: k + 1,
                got: rows.len(),
            });
        }
        let mut entries = Vec::with_capacity((k + 1) * (n - k));
        for row in rows {
            if row.len() != n - k {
                return Err(Error::ArityMismatch {
                    expected: n - k,
                    got: row.len(),
                });
            }
            for s in &row {
                if !field.owns(s) {
                    return Err(Error::FieldMismatch);
                }
            }
            entries.extend(row);
        }
        Ok(PlaneCoords {
            chart,
            field,
            entries,
        })
    }

    /// The origin of a chart (all entries zero).
    pub fn chart_origin(chart: Chart, field: FieldSpec) -> Self {
        let (k, n) = (chart.k(), chart.n());
        PlaneCoords {
            chart,
            field,
            entries: vec![field.zero(); (k + 1) * (n - k)],
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// Entry (a, j) with j indexing non-pivot columns in ascending order.
    pub fn entry(&self, a: usize, j: usize) -> &Scalar {
        &self.entries[a * (self.chart.n() - self.chart.k()) + j]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    /// The (k+1) x (n+1) spanning matrix: identity in pivot columns, chart
    /// entries elsewhere. Its rows span the plane.
    pub fn chart_matrix(&self) -> ScalarMatrix {
        let (k, n) = (self.chart.k(), self.chart.n());
        let mut m = ScalarMatrix::zero(self.field, k + 1, n + 1);
        for (a, &p) in self.chart.pivots().iter().enumerate() {
            m.set(a, p, self.field.one());
        }
        for (j, &b) in self.chart.nonpivots().iter().enumerate() {
            for a in 0..=k {
                m.set(a, b, self.entry(a, j).clone());
            }
        }
        m
    }

    /// True iff the point lies on the plane: adding its row to the spanning
    /// matrix must not raise the rank above k+1.
    pub fn contains_point(&self, q: &ProjPoint) -> Result<bool, Error> {
        if self.field != q.field() {
            return Err(Error::FieldMismatch);
        }
        if q.coords().len() != self.chart.n() + 1 {
            return Err(Error::ArityMismatch {
                expected: self.chart.n() + 1,
                got: q.coords().len(),
            });
        }
        let base = self.chart_matrix();
        let mut rows: Vec<Vec<Scalar>> = (0..base.rows())
            .map(|r| (0..base.cols()).map(|c| base.get(r, c).clone()).collect())
            .collect();
        rows.push(q.coords().to_vec());
        let stacked = ScalarMatrix::from_rows(self.field, rows)?;
        Ok(stacked.rank() == self.chart.k() + 1)
    }

    /// Rewrite this plane in another chart of the same Grassmannian: None
    /// when the plane does not lie in that chart (the pivot minor is
    /// singular).
    pub fn reexpress(&self, new_chart: &Chart) -> Result<Option<PlaneCoords>, Error> {
        if new_chart.k() != self.chart.k() || new_chart.n() != self.chart.n() {
            return Err(Error::ArityMismatch {
                expected: self.chart.k(),
                got: new_chart.k(),
            });
        }
        let m = self.chart_matrix();
        let k = self.chart.k();
        let mut minor = ScalarMatrix::zero(self.field, k + 1, k + 1);
        for (ci, &c) in new_chart.pivots().iter().enumerate() {
            for r in 0..=k {
                minor.set(r, ci, m.get(r, c).clone());
            }
        }
        let Some(inv) = minor.inverse() else {
            return Ok(None);
        };
        let reduced = inv.mul(&m)?;
        let rows: Vec<Vec<Scalar>> = (0..=k)
            .map(|a| {
                new_chart
                    .nonpivots()
                    .iter()
                    .map(|&b| reduced.get(a, b).clone())
                    .collect()
            })
            .collect();
        Ok(Some(PlaneCoords::new(new_chart.clone(), self.field, rows)?))
    }

    pub fn to_json(&self) -> Value {
        let (k, n) = (self.chart.k(), self.chart.n());
        let entries: Vec<Vec<Value>> = (0..=k)
            .map(|a| (0..n - k).map(|j| self.entry(a, j).to_json()).collect())
            .collect();
        json!({
            "pivots": self.chart.pivots(),
            "entries": entries,
            "q": self.field.modulus(),
        })
    }
}

/// A point of P^n, stored as the canonical representative whose first
/// nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjPoint {
    field: FieldSpec,
    coords: Vec<Scalar>,
}

impl ProjPoint {
    pub fn new(field: FieldSpec, coords: Vec<Scalar>) -> Result<Self, Error> {
        for c in &coords {
            if !field.owns(c) {
                return Err(Error::FieldMismatch);
            }
        }
        let Some(first) = coords.iter().position(|c| !field.is_zero(c)) else {
            return Err(Error::InvalidRange(
                "projective point must have a nonzero coordinate".into(),
            ));
        };
        let inv = field.inv(&coords[first]).expect("nonzero scalar");
        let coords = coords.iter().map(|c| field.mul(c, &inv)).collect();
        Ok(ProjPoint { field, coords })
    }

    pub fn from_integers(field: FieldSpec, coords: &[i64]) -> Result<Self, Error> {
        Self::new(field, coords.iter().map(|&x| field.integer(x)).collect())
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }
}

/// Number of k-planes in P^n over F_q: the Gaussian binomial
/// prod_{i=0}^{k} (q^{n+1-i} - 1) / (q^{i+1} - 1).
pub fn gaussian_count(k: usize, n: usize, q: u64) -> Result<BigUint, Error> {
    if k >= n {
        return Err(Error::InvalidRange(format!(
            "need k < n, got k = {k}, n = {n}"
        )));
    }
    FieldSpec::prime_field(q)?;
    let q = BigUint::from(q);
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for i in 0..=k {
        num *= q.pow((n + 1 - i) as u32) - 1u32;
        den *= q.pow((i + 1) as u32) - 1u32;
    }
    Ok(num / den)
}

/// All (k+1)-subsets of {0..=n} in colexicographic order; the first is the
/// standard pivot set {0..=k}.
pub fn pivot_sets(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut sets = Vec::new();
    let mut cur = Vec::with_capacity(k + 1);
    fn rec(
        next: usize,
        remaining: usize,
        bound: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        for c in next..=bound {
            cur.push(c);
            rec(c + 1, remaining - 1, bound, cur, out);
            cur.pop();
        }
    }
    rec(0, k + 1, n, &mut cur, &mut sets);
    sets.sort_by(|a, b| {
        for i in (0..a.len()).rev() {
            match a[i].cmp(&b[i]) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    });
    sets
}

/// One unit of enumeration work: a single chart cell, optionally restricted
/// to a fixed value of the first free entry. Shards in list order
/// concatenate to the full canonical enumeration order.
#[derive(Clone, Debug)]
pub struct EnumerationShard {
    chart: Chart,
    field: FieldSpec,
    q: u64,
    /// Free entry slots (a, j) in row-major order; non-free slots are 0 in
    /// every canonical form of this cell.
    free: Vec<(usize, usize)>,
    /// Fixed value of free[0]; None when the cell has no free slot or the
    /// cell is emitted unsplit.
    first_value: Option<u64>,
}

impl EnumerationShard {
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// Number of planes this shard yields.
    pub fn len(&self) -> u64 {
        let digits = match self.first_value {
            Some(_) => self.free.len() - 1,
            None => self.free.len(),
        };
        self.q.pow(digits as u32)
    }

    pub fn is_empty(&self) -> bool {
        false // every shard yields at least one plane
    }

    /// Visit every plane of the shard in odometer order (last free slot
    /// varies fastest).
    pub fn for_each_plane(&self, mut visit: impl FnMut(&PlaneCoords)) {
        let (k, n) = (self.chart.k(), self.chart.n());
        let width = n - k;
        let mut plane = PlaneCoords {
            chart: self.chart.clone(),
            field: self.field,
            entries: vec![self.field.zero(); (k + 1) * width],
        };
        let digits: &[(usize, usize)] = match self.first_value {
            Some(v) => {
                let (a, j) = self.free[0];
                plane.entries[a * width + j] = Scalar::Fp(v);
                &self.free[1..]
            }
            None => &self.free[..],
        };
        let mut counters = vec![0u64; digits.len()];
        loop {
            visit(&plane);
            // odometer increment, rightmost digit fastest
            let mut pos = digits.len();
            loop {
                if pos == 0 {
                    return;
                }
                pos -= 1;
                counters[pos] += 1;
                if counters[pos] < self.q {
                    let (a, j) = digits[pos];
                    plane.entries[a * width + j] = Scalar::Fp(counters[pos]);
                    break;
                }
                counters[pos] = 0;
                let (a, j) = digits[pos];
                plane.entries[a * width + j] = Scalar::Fp(0);
            }
        }
    }
}

/// Deterministic shard list covering every k-plane of P^n(F_q) exactly
/// once: chart cells in colex pivot order, large cells split by the value
/// of their first free entry.
pub fn enumeration_shards(k: usize, n: usize, q: u64) -> Result<Vec<EnumerationShard>, Error> {
    let field = FieldSpec::prime_field(q)?;
    if k >= n {
        return Err(Error::InvalidRange(format!(
            "need k < n, got k = {k}, n = {n}"
        )));
    }
    let mut shards = Vec::new();
    for pivots in pivot_sets(k, n) {
        let chart = Chart::new(k, n, pivots)?;
        let nonpivots = chart.nonpivots();
        let mut free = Vec::new();
        for a in 0..=k {
            for (j, &b) in nonpivots.iter().enumerate() {
                if b > chart.pivots()[a] {
                    free.push((a, j));
                }
            }
        }
        if free.is_empty() {
            shards.push(EnumerationShard {
                chart,
                field,
                q,
                free,
                first_value: None,
            });
        } else {
            for v in 0..q {
                shards.push(EnumerationShard {
                    chart: chart.clone(),
                    field,
                    q,
                    free: free.clone(),
                    first_value: Some(v),
                });
            }
        }
    }
    Ok(shards)
}

/// Iterator over every k-plane of P^n(F_q), each exactly once, in the
/// documented canonical order.
pub fn enumerate_planes(
    k: usize,
    n: usize,
    q: u64,
) -> Result<impl Iterator<Item = PlaneCoords>, Error> {
    let shards = enumeration_shards(k, n, q)?;
    let mut buffer: Vec<PlaneCoords> = Vec::new();
    let mut shard_iter = shards.into_iter();
    Ok(std::iter::from_fn(move || loop {
        if let Some(p) = buffer.pop() {
            return Some(p);
        }
        let shard = shard_iter.next()?;
        let mut collected = Vec::with_capacity(shard.len().min(1 << 16) as usize);
        shard.for_each_plane(|p| collected.push(p.clone()));
        collected.reverse();
        buffer = collected;
    }))
}
