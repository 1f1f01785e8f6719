use crate::error::Error;
use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

/// Binomial coefficient with the boundary convention C(a, b) = 0 for b < 0
/// or a < b. Exact at every intermediate step.
pub fn binom_big(a: i64, b: i64) -> BigInt {
    if b < 0 || a < b {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigInt::from(1);
    for j in 1..=b {
        acc = acc * BigInt::from(a - b + j) / BigInt::from(j);
    }
    acc
}

/// Degree tuple (d_1, ..., d_s). Public construction requires every entry
/// to be at least 2; `shift` may carry entries down to 0, which the binomial
/// bookkeeping (psi, minor sizes, basis dimensions) needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiDegree {
    degrees: Vec<i64>,
}

impl MultiDegree {
    pub fn new(degrees: Vec<i64>) -> Result<Self, Error> {
        if degrees.is_empty() {
            return Err(Error::InvalidRange("degree tuple must be nonempty".into()));
        }
        if degrees.iter().any(|&d| d < 2) {
            return Err(Error::InvalidDegree("every degree must be >= 2".into()));
        }
        Ok(MultiDegree { degrees })
    }

    pub fn from_u32(degrees: &[u32]) -> Result<Self, Error> {
        Self::new(degrees.iter().map(|&d| d as i64).collect())
    }

    /// Number of components s.
    pub fn s(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    /// Componentwise d_i + m; entries may drop below 2 but not below 0.
    pub fn shift(&self, m: i64) -> Result<MultiDegree, Error> {
        let degrees: Vec<i64> = self.degrees.iter().map(|d| d + m).collect();
        if degrees.iter().any(|&d| d < 0) {
            return Err(Error::NegativeDegree);
        }
        Ok(MultiDegree { degrees })
    }

    /// C(d, m) = sum_i C(d_i, m).
    pub fn binom(&self, m: i64) -> BigInt {
        self.degrees.iter().map(|&d| binom_big(d, m)).sum()
    }

    pub fn to_json(&self) -> Value {
        json!(self.degrees)
    }
}

/// Generic-regime prediction per the dimension count: which of empty /
/// smooth of expected dimension / additionally connected applies for a
/// generic form tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    EmptyGeneric,
    NonemptySmooth,
    NonemptySmoothConnected,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::EmptyGeneric => "EmptyGeneric",
            Regime::NonemptySmooth => "NonemptySmooth",
            Regime::NonemptySmoothConnected => "NonemptySmoothConnected",
        }
    }
}

/// The numerology of k-planes on an intersection of type d in P^n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionReport {
    pub n: usize,
    pub k: usize,
    pub d: MultiDegree,
    /// Expected dimension: (k+1)(n-k) - C(d+k, k).
    pub delta: BigInt,
    /// min(delta, n - 2k - s); the regime discriminant.
    pub delta_minus: BigInt,
    /// dim of the projective space of form tuples: C(d+n, n) - 1.
    pub sym_dim: BigInt,
    /// Dimension of the incidence variety {(plane, tuple) : plane on V}.
    pub incidence_dim: BigInt,
    /// Number of coefficient equations cutting the local chart: C(d+k, k).
    pub num_local_equations: BigInt,
    pub regime: Regime,
}

pub fn dimension_report(n: usize, k: usize, d: &MultiDegree) -> Result<DimensionReport, Error> {
    if n < 1 || k >= n {
        return Err(Error::InvalidRange(format!(
            "need 0 <= k < n, got k = {k}, n = {n}"
        )));
    }
    let (ni, ki) = (n as i64, k as i64);
    let chart_dim = BigInt::from((ki + 1) * (ni - ki));
    let num_local_equations = d.shift(ki)?.binom(ki);
    let delta = &chart_dim - &num_local_equations;
    let line_bound = BigInt::from(ni - 2 * ki - d.s() as i64);
    let delta_minus = delta.clone().min(line_bound);
    let sym_dim = d.shift(ni)?.binom(ni) - 1;
    let incidence_dim = &chart_dim + &sym_dim - &num_local_equations;
    let regime = if delta_minus < BigInt::zero() {
        Regime::EmptyGeneric
    } else if delta_minus.is_zero() {
        Regime::NonemptySmooth
    } else {
        Regime::NonemptySmoothConnected
    };
    Ok(DimensionReport {
        n,
        k,
        d: d.clone(),
        delta,
        delta_minus,
        sym_dim,
        incidence_dim,
        num_local_equations,
        regime,
    })
}

impl DimensionReport {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "k": self.k,
            "d": self.d.to_json(),
            "delta": big_to_value(&self.delta),
            "delta_minus": big_to_value(&self.delta_minus),
            "sym_dim": big_to_value(&self.sym_dim),
            "incidence_dim": big_to_value(&self.incidence_dim),
            "num_local_equations": big_to_value(&self.num_local_equations),
            "regime": self.regime.as_str(),
        })
    }
}

/// psi(t) = t(n - 2k + t - 1) - C(d+t-1, t-1), tabulated for t = 1..=t_max
/// together with its forward differences. psi(1) = n - 2k - s and
/// psi(k+1) = delta, so min{psi(1), psi(k+1)} is delta_minus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiProfile {
    pub t_max: usize,
    /// values[t-1] = psi(t).
    pub values: Vec<BigInt>,
    /// first_diff[t-1] = psi(t+1) - psi(t).
    pub first_diff: Vec<BigInt>,
    /// second_diff[t-1] = first_diff(t+1) - first_diff(t).
    pub second_diff: Vec<BigInt>,
    /// min of psi over t in [1, k+1].
    pub min_over_range: BigInt,
    /// min{psi(1), psi(k+1)} + 1.
    pub codim_bound: BigInt,
}

fn psi_value(n: i64, k: i64, d: &MultiDegree, t: i64) -> Result<BigInt, Error> {
    Ok(BigInt::from(t * (n - 2 * k + t - 1)) - d.shift(t - 1)?.binom(t - 1))
}

pub fn psi_profile(n: usize, k: usize, d: &MultiDegree, t_max: usize) -> Result<PsiProfile, Error> {
    if n < 1 || k >= n {
        return Err(Error::InvalidRange(format!(
            "need 0 <= k < n, got k = {k}, n = {n}"
        )));
    }
    if t_max < k + 1 {
        return Err(Error::InvalidRange(format!(
            "t_max = {t_max} must be at least k+1 = {}",
            k + 1
        )));
    }
    let (ni, ki) = (n as i64, k as i64);
    let values = (1..=t_max as i64)
        .map(|t| psi_value(ni, ki, d, t))
        .collect::<Result<Vec<_>, _>>()?;
    let first_diff: Vec<BigInt> = values.windows(2).map(|w| &w[1] - &w[0]).collect();
    let second_diff: Vec<BigInt> = first_diff.windows(2).map(|w| &w[1] - &w[0]).collect();
    let min_over_range = values[..=k].iter().min().cloned().expect("nonempty range");
    let codim_bound = values[0].clone().min(values[k].clone()) + 1;
    Ok(PsiProfile {
        t_max,
        values,
        first_diff,
        second_diff,
        min_over_range,
        codim_bound,
    })
}

impl PsiProfile {
    pub fn to_json(&self) -> Value {
        json!({
            "psi": self.values.iter().map(big_to_value).collect::<Vec<_>>(),
            "first_diff": self.first_diff.iter().map(big_to_value).collect::<Vec<_>>(),
            "second_diff": self.second_diff.iter().map(big_to_value).collect::<Vec<_>>(),
            "min_over_range": big_to_value(&self.min_over_range),
            "codim_bound": big_to_value(&self.codim_bound),
        })
    }
}

/// Size of the minor family cut out at level t, computed two independent
/// ways that provably agree (hockey-stick identity); callers can check
/// `closed_form == direct_sum` as a self-test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorSize {
    /// C(d+k, k) - C(d+t-1, t-1).
    pub closed_form: BigInt,
    /// sum_{j=0}^{k-t} C(k-j+(d-1), k-j).
    pub direct_sum: BigInt,
}

impl MinorSize {
    pub fn value(&self) -> &BigInt {
        debug_assert_eq!(self.closed_form, self.direct_sum);
        &self.closed_form
    }
}

pub fn minor_size(d: &MultiDegree, k: usize, t: usize) -> Result<MinorSize, Error> {
    if t < 1 || t > k + 1 {
        return Err(Error::InvalidRange(format!(
            "need 1 <= t <= k+1, got t = {t}, k = {k}"
        )));
    }
    let (ki, ti) = (k as i64, t as i64);
    let closed_form = d.shift(ki)?.binom(ki) - d.shift(ti - 1)?.binom(ti - 1);
    let mut direct_sum = BigInt::zero();
    for j in 0..=(ki - ti) {
        direct_sum += d.shift(ki - j - 1)?.binom(ki - j);
    }
    Ok(MinorSize {
        closed_form,
        direct_sum,
    })
}

/// BigInt as a full-precision JSON number.
pub fn big_to_value(n: &BigInt) -> Value {
    serde_json::from_str(&n.to_string()).expect("integer literal is valid JSON")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn md(ds: &[i64]) -> MultiDegree {
        MultiDegree::new(ds.to_vec()).unwrap()
    }

    #[test]
    fn shift_and_binom() {
        assert_eq!(md(&[2, 2]).shift(1).unwrap().degrees(), &[3, 3]);
        assert_eq!(md(&[3, 3]).shift(0).unwrap().degrees(), &[3, 3]);
        assert_eq!(md(&[2]).shift(-1).unwrap().degrees(), &[1]);
        assert_eq!(md(&[2]).shift(-3), Err(Error::NegativeDegree));
        assert_eq!(md(&[3, 3]).binom(1), BigInt::from(6));
        assert_eq!(md(&[2, 2]).shift(1).unwrap().binom(1), BigInt::from(6));
        assert_eq!(md(&[4]).binom(2), BigInt::from(6));
        // boundary convention
        assert_eq!(binom_big(2, 3), BigInt::zero());
        assert_eq!(binom_big(5, -1), BigInt::zero());
        assert_eq!(binom_big(0, 0), BigInt::from(1));
    }

    #[test]
    fn multidegree_validation() {
        assert!(MultiDegree::new(vec![]).is_err());
        assert!(matches!(
            MultiDegree::new(vec![2, 1]),
            Err(Error::InvalidDegree(_))
        ));
    }

    #[test]
    fn quadric_in_p3() {
        let r = dimension_report(3, 1, &md(&[2])).unwrap();
        assert_eq!(r.delta, BigInt::from(1));
        assert_eq!(r.delta_minus, BigInt::zero());
        assert_eq!(r.regime, Regime::NonemptySmooth);
        assert_eq!(r.num_local_equations, BigInt::from(3));
    }

    #[test]
    fn cubic_surface_lines() {
        let r = dimension_report(3, 1, &md(&[3])).unwrap();
        assert_eq!(r.delta, BigInt::zero());
        assert_eq!(r.delta_minus, BigInt::zero());
        assert_eq!(r.regime, Regime::NonemptySmooth);
    }

    #[test]
    fn quartic_surface_has_no_lines_generically() {
        let r = dimension_report(3, 1, &md(&[4])).unwrap();
        assert_eq!(r.delta, BigInt::from(-1));
        assert_eq!(r.delta_minus, BigInt::from(-1));
        assert_eq!(r.regime, Regime::EmptyGeneric);
    }

    #[test]
    fn connected_regime_and_incidence() {
        // two quadrics in P^4, lines: delta = 6 - 6 = 0 but n-2k-s = 0 too
        let r = dimension_report(4, 1, &md(&[2, 2])).unwrap();
        assert_eq!(r.delta, BigInt::zero());
        assert_eq!(r.regime, Regime::NonemptySmooth);
        // lines on a quadric threefold in P^4: delta = 6 - 3 = 3, n-2k-s = 1
        let r2 = dimension_report(4, 1, &md(&[2])).unwrap();
        assert_eq!(r2.delta, BigInt::from(3));
        assert_eq!(r2.delta_minus, BigInt::from(1));
        assert_eq!(r2.regime, Regime::NonemptySmoothConnected);
        // incidence_dim = chart + sym - equations
        let sym = BigInt::from(14); // C(2+4, 4) - 1
        assert_eq!(r2.sym_dim, sym);
        assert_eq!(r2.incidence_dim, BigInt::from(6) + sym - BigInt::from(3));
    }

    #[test]
    fn dimension_report_rejects_bad_range() {
        assert!(matches!(
            dimension_report(3, 3, &md(&[2])),
            Err(Error::InvalidRange(_))
        ));
        assert!(matches!(
            dimension_report(0, 0, &md(&[2])),
            Err(Error::InvalidRange(_))
        ));
    }

    #[test]
    fn psi_identities_on_examples() {
        // cubic surface: psi(1) = n-2k-s = 0, psi(2) = delta = 0
        let p = psi_profile(3, 1, &md(&[3]), 5).unwrap();
        assert_eq!(p.values[0], BigInt::zero());
        assert_eq!(p.values[1], BigInt::zero());
        assert_eq!(p.codim_bound, BigInt::from(1));
        assert_eq!(p.min_over_range, BigInt::zero());
        // quadric: first_diff(t) = t + n - 2k - 1 = t
        let q = psi_profile(3, 1, &md(&[2]), 6).unwrap();
        for (i, fd) in q.first_diff.iter().enumerate() {
            assert_eq!(*fd, BigInt::from(i as i64 + 1));
        }
    }

    #[test]
    fn second_difference_of_a_cubic() {
        // For d = (3), direct differencing of psi gives
        // second_diff(1) = 2 - C(3, 2) = -1 regardless of (n, k).
        for (n, k) in [(3usize, 1usize), (5, 2), (9, 3)] {
            let p = psi_profile(n, k, &md(&[3]), k + 3).unwrap();
            assert_eq!(p.second_diff[0], BigInt::from(-1), "n={n} k={k}");
        }
    }

    #[test]
    fn psi_profile_requires_room() {
        assert!(matches!(
            psi_profile(3, 1, &md(&[3]), 1),
            Err(Error::InvalidRange(_))
        ));
    }

    #[test]
    fn minor_sizes() {
        let m = minor_size(&md(&[3, 3]), 3, 1).unwrap();
        assert_eq!(m.closed_form, BigInt::from(38));
        assert_eq!(m.direct_sum, BigInt::from(38));
        let z = minor_size(&md(&[2]), 1, 2).unwrap();
        assert_eq!(z.closed_form, BigInt::zero());
        assert_eq!(z.direct_sum, BigInt::zero());
        let t1 = minor_size(&md(&[2]), 1, 1).unwrap();
        assert_eq!(t1.closed_form, BigInt::from(2));
        assert_eq!(t1.direct_sum, BigInt::from(2));
        assert!(matches!(
            minor_size(&md(&[2]), 1, 0),
            Err(Error::InvalidRange(_))
        ));
        assert!(matches!(
            minor_size(&md(&[2]), 1, 3),
            Err(Error::InvalidRange(_))
        ));
    }

    #[test]
    fn json_shape() {
        let r = dimension_report(3, 1, &md(&[3])).unwrap();
        let v = r.to_json();
        assert_eq!(v["regime"], "NonemptySmooth");
        assert_eq!(v["delta"], json!(0));
        assert_eq!(v["d"], json!([3]));
        let p = psi_profile(3, 1, &md(&[3]), 2).unwrap();
        let pv = p.to_json();
        assert_eq!(pv["psi"], json!([0, 0]));
        assert_eq!(pv["codim_bound"], json!(1));
    }
}
