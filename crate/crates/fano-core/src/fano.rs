use crate::combi::big_to_value;
use crate::error::Error;
use crate::field::{FieldSpec, Scalar};
use crate::grassmann::{enumeration_shards, gaussian_count, Chart, PlaneCoords};
use crate::matrix::ScalarMatrix;
use crate::monomial::{basis, Monomial};
use crate::poly::{FormTuple, Polynomial};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Value};

/// The defining equations of the k-plane variety inside one chart.
///
/// For component i of degree d_i, substituting the chart's parametrization
/// into f_i and collecting by monomials in the plane parameters yields
/// exactly C(d_i + k, k) coefficient polynomials in the chart variables
/// x_{a,b}; those are the local equations. Zero coefficients are kept so
/// the count is always the predicted one.
#[derive(Clone, Debug)]
pub struct LocalFanoSystem {
    chart: Chart,
    field: FieldSpec,
    degrees: Vec<u32>,
    /// groups[i] lists (lambda-monomial, coefficient in x) for component i,
    /// ascending in the lambda basis order.
    groups: Vec<Vec<(Monomial, Polynomial)>>,
}

impl LocalFanoSystem {
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Per-component equation groups.
    pub fn groups(&self) -> &[Vec<(Monomial, Polynomial)>] {
        &self.groups
    }

    /// All equations flattened: blocks in component order, each in lambda
    /// basis order. This is also the early-exit evaluation order.
    pub fn equations(&self) -> Vec<&Polynomial> {
        self.groups.iter().flatten().map(|(_, p)| p).collect()
    }

    pub fn num_equations(&self) -> usize {
        self.groups.iter().map(|g| g.len()).sum()
    }

    /// Number of chart variables, (k+1)(n-k).
    pub fn num_chart_vars(&self) -> usize {
        let (k, n) = (self.chart.k(), self.chart.n());
        (k + 1) * (n - k)
    }

    /// Chart variable name for flat index a*(n-k) + j: "x_{a,b}" with b the
    /// ambient column.
    pub fn var_name(&self, idx: usize) -> String {
        let width = self.chart.n() - self.chart.k();
        let (a, j) = (idx / width, idx % width);
        format!("x_{{{},{}}}", a, self.chart.nonpivots()[j])
    }

    /// Equations rendered with x_{a,b} variable names, flattened order.
    pub fn equation_strings(&self) -> Vec<String> {
        let namer = |i: usize| self.var_name(i);
        self.equations()
            .into_iter()
            .map(|p| p.display_with(&namer))
            .collect()
    }

    /// Jacobian of the system at a numeric point of this chart, columns
    /// grouped by non-pivot column j, then by row index a (column-for-column
    /// the layout of the alpha matrix).
    pub fn jacobian_at(&self, entries: &[Scalar]) -> Result<ScalarMatrix, Error> {
        let nvars = self.num_chart_vars();
        if entries.len() != nvars {
            return Err(Error::ArityMismatch {
                expected: nvars,
                got: entries.len(),
            });
        }
        for s in entries {
            if !self.field.owns(s) {
                return Err(Error::FieldMismatch);
            }
        }
        let (k, n) = (self.chart.k(), self.chart.n());
        let width = n - k;
        let eqs = self.equations();
        let mut m = ScalarMatrix::zero(self.field, eqs.len(), nvars);
        for (r, eq) in eqs.iter().enumerate() {
            for j in 0..width {
                for a in 0..=k {
                    let var = a * width + j;
                    let d = eq.differentiate(var)?;
                    let v = d.evaluate(entries)?;
                    m.set(r, j * (k + 1) + a, v);
                }
            }
        }
        Ok(m)
    }

    pub fn to_json(&self) -> Value {
        let groups: Vec<Value> = self
            .groups
            .iter()
            .map(|g| {
                let eqs: Vec<Value> = g
                    .iter()
                    .map(|(lm, p)| {
                        json!({
                            "lambda": lm.display_with(&|i| format!("l{i}")),
                            "coefficient": p.display_with(&|i| self.var_name(i)),
                        })
                    })
                    .collect();
                json!(eqs)
            })
            .collect();
        json!({
            "n": self.chart.n(),
            "k": self.chart.k(),
            "pivots": self.chart.pivots(),
            "d": self.degrees,
            "num_equations": self.num_equations(),
            "equations": self.equation_strings(),
            "groups": groups,
        })
    }
}

/// Substitution images for a symbolic chart, in the combined ring whose
/// variables are l_0..l_k followed by the (k+1)(n-k) chart entries.
fn symbolic_images(chart: &Chart, field: FieldSpec) -> Vec<Polynomial> {
    let (k, n) = (chart.k(), chart.n());
    let width = n - k;
    let nv = (k + 1) + (k + 1) * width;
    let mut images = vec![Polynomial::zero(field, nv); n + 1];
    for (a, &p) in chart.pivots().iter().enumerate() {
        images[p] = Polynomial::variable(field, nv, a).expect("lambda var in range");
    }
    for (j, &b) in chart.nonpivots().iter().enumerate() {
        let mut acc = Polynomial::zero(field, nv);
        for a in 0..=k {
            let lambda = Polynomial::variable(field, nv, a).expect("in range");
            let x = Polynomial::variable(field, nv, (k + 1) + a * width + j).expect("in range");
            acc = acc
                .add(&lambda.mul(&x).expect("same ring"))
                .expect("same ring");
        }
        images[b] = acc;
    }
    images
}

/// Restrict one form to a symbolic chart: the composite collected by
/// lambda-monomial, each coefficient a polynomial in the chart variables.
/// Every lambda monomial of the form's degree appears, zero or not,
/// ascending in basis order.
pub fn restrict_symbolic(
    f: &Polynomial,
    chart: &Chart,
) -> Result<Vec<(Monomial, Polynomial)>, Error> {
    if f.nvars() != chart.n() + 1 {
        return Err(Error::ArityMismatch {
            expected: chart.n() + 1,
            got: f.nvars(),
        });
    }
    let d = f.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
    let (k, n) = (chart.k(), chart.n());
    let width = n - k;
    let xvars = (k + 1) * width;
    let composite = f.substitute(&symbolic_images(chart, f.field()))?;
    // split each combined term into lambda part (first k+1 slots) and x part
    let mut buckets: Vec<Vec<(Monomial, Scalar)>> = vec![Vec::new(); basis(d, k + 1).len()];
    let lambda_basis = basis(d, k + 1);
    for (m, c) in composite.terms() {
        let lm = Monomial::new(m.exps()[..=k].to_vec());
        let xm = Monomial::new(m.exps()[k + 1..].to_vec());
        let pos = lambda_basis
            .iter()
            .position(|b| *b == lm)
            .expect("composite is homogeneous of degree d in lambda");
        buckets[pos].push((xm, c.clone()));
    }
    lambda_basis
        .into_iter()
        .zip(buckets)
        .map(|(lm, raw)| Ok((lm, Polynomial::from_terms(f.field(), xvars, raw)?)))
        .collect()
}

/// Restrict one form to a numeric plane: the composite as a polynomial in
/// the plane parameters l_0..l_k.
pub fn restrict_to_plane(f: &Polynomial, p: &PlaneCoords) -> Result<Polynomial, Error> {
    if f.field() != p.field() {
        return Err(Error::FieldMismatch);
    }
    let chart = p.chart();
    if f.nvars() != chart.n() + 1 {
        return Err(Error::ArityMismatch {
            expected: chart.n() + 1,
            got: f.nvars(),
        });
    }
    let (k, n) = (chart.k(), chart.n());
    let field = f.field();
    let nv = k + 1;
    let mut images = vec![Polynomial::zero(field, nv); n + 1];
    for (a, &pv) in chart.pivots().iter().enumerate() {
        images[pv] = Polynomial::variable(field, nv, a)?;
    }
    for (j, &b) in chart.nonpivots().iter().enumerate() {
        let mut raw = Vec::with_capacity(k + 1);
        for a in 0..=k {
            raw.push((Monomial::variable(a, nv), p.entry(a, j).clone()));
        }
        images[b] = Polynomial::from_terms(field, nv, raw)?;
    }
    f.substitute(&images)
}

/// Builds the local system without the degree floor; shared by the public
/// constructor (which enforces d_i >= 2) and by the counting/tangent paths
/// (where degree-1 components are legitimate: they cut the plane variety of
/// a hyperplane section).
fn build_local_system(f_tuple: &FormTuple, chart: &Chart) -> Result<LocalFanoSystem, Error> {
    if f_tuple.ambient_dim() != chart.n() {
        return Err(Error::ArityMismatch {
            expected: chart.n() + 1,
            got: f_tuple.nvars(),
        });
    }
    let groups = f_tuple
        .components()
        .iter()
        .map(|f| restrict_symbolic(f, chart))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LocalFanoSystem {
        chart: chart.clone(),
        field: f_tuple.field(),
        degrees: f_tuple.degrees().to_vec(),
        groups,
    })
}

/// The local equations of the k-plane variety in the given chart. Requires
/// every component degree >= 2; the total equation count is C(d+k, k).
pub fn fano_local_system(f_tuple: &FormTuple, chart: &Chart) -> Result<LocalFanoSystem, Error> {
    if f_tuple.degrees().iter().any(|&d| d < 2) {
        return Err(Error::InvalidDegree(
            "local system requires every component degree >= 2".into(),
        ));
    }
    build_local_system(f_tuple, chart)
}

/// True iff the plane lies on the common vanishing locus: every component
/// restricts to the zero polynomial in the plane parameters.
pub fn fano_contains(f_tuple: &FormTuple, p: &PlaneCoords) -> Result<bool, Error> {
    if f_tuple.field() != p.field() {
        return Err(Error::FieldMismatch);
    }
    for f in f_tuple.components() {
        if !restrict_to_plane(f, p)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Zariski tangent data of the plane variety at a contained plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentReport {
    pub jacobian_rank: usize,
    /// (k+1)(n-k) - jacobian_rank.
    pub tangent_dim: usize,
    /// The expected dimension (k+1)(n-k) - C(d+k, k); may be negative.
    pub expected_dim: BigInt,
    /// Full Jacobian rank, i.e. rank = C(d+k, k).
    pub smooth_for_p: bool,
}

impl TangentReport {
    pub fn to_json(&self) -> Value {
        json!({
            "jacobian_rank": self.jacobian_rank,
            "tangent_dim": self.tangent_dim,
            "expected_dim": big_to_value(&self.expected_dim),
            "smooth_for_p": self.smooth_for_p,
        })
    }
}

/// Expected dimension delta = (k+1)(n-k) - sum_i C(d_i+k, k), valid for any
/// positive degrees.
pub fn expected_dim(n: usize, k: usize, degrees: &[u32]) -> BigInt {
    let (ni, ki) = (n as i64, k as i64);
    let eqs: BigInt = degrees
        .iter()
        .map(|&d| crate::combi::binom_big(d as i64 + ki, ki))
        .sum();
    BigInt::from((ki + 1) * (ni - ki)) - eqs
}

pub fn tangent_profile(f_tuple: &FormTuple, p: &PlaneCoords) -> Result<TangentReport, Error> {
    if !fano_contains(f_tuple, p)? {
        return Err(Error::NotOnFano);
    }
    let system = build_local_system(f_tuple, p.chart())?;
    let jac = system.jacobian_at(p.entries())?;
    let rank = jac.rank();
    let chart_dim = system.num_chart_vars();
    Ok(TangentReport {
        jacobian_rank: rank,
        tangent_dim: chart_dim - rank,
        expected_dim: expected_dim(p.chart().n(), p.chart().k(), f_tuple.degrees()),
        smooth_for_p: rank == system.num_equations(),
    })
}

/// A polynomial compiled to residue arithmetic for the enumeration loop:
/// coefficient plus (slot, exponent) pairs per term. p < 2^31 keeps every
/// product inside u64.
struct CompiledPoly {
    terms: Vec<(u64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    fn compile(p: &Polynomial) -> CompiledPoly {
        let terms = p
            .terms()
            .iter()
            .map(|(m, c)| {
                let coeff = c.residue().expect("compiled polynomials live over F_p");
                let exps: Vec<(usize, u32)> = m
                    .exps()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e))
                    .collect();
                (coeff, exps)
            })
            .collect();
        CompiledPoly { terms }
    }

    fn eval(&self, vals: &[u64], q: u64) -> u64 {
        let mut acc = 0u64;
        for (coeff, exps) in &self.terms {
            let mut t = *coeff;
            for &(slot, e) in exps {
                let v = vals[slot];
                if v == 0 {
                    t = 0;
                    break;
                }
                for _ in 0..e {
                    t = t * v % q;
                }
            }
            acc = (acc + t) % q;
        }
        acc
    }
}

/// All equations of one chart's local system, compiled, in early-exit order
/// (component blocks in order, lambda basis ascending within each).
struct CompiledSystem {
    equations: Vec<CompiledPoly>,
}

impl CompiledSystem {
    fn compile(system: &LocalFanoSystem) -> CompiledSystem {
        CompiledSystem {
            equations: system
                .equations()
                .into_iter()
                .map(CompiledPoly::compile)
                .collect(),
        }
    }

    fn vanishes_at(&self, vals: &[u64], q: u64) -> bool {
        self.equations.iter().all(|eq| eq.eval(vals, q) == 0)
    }
}

/// Per-chart tally of an exhaustive count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartCount {
    pub pivots: Vec<usize>,
    pub planes: u64,
    pub fano_points: u64,
}

/// Result of exhaustively scanning every k-plane over F_q.
#[derive(Clone, Debug)]
pub struct CountReport {
    pub q: u64,
    pub n: usize,
    pub k: usize,
    pub total_planes: u64,
    pub fano_points: u64,
    pub per_chart: Vec<ChartCount>,
    pub witnesses: Option<Vec<PlaneCoords>>,
}

impl CountReport {
    pub fn to_json(&self) -> Value {
        let per_chart: Vec<Value> = self
            .per_chart
            .iter()
            .map(|c| {
                json!({
                    "pivots": c.pivots,
                    "planes": c.planes,
                    "fano_points": c.fano_points,
                })
            })
            .collect();
        let mut v = json!({
            "q": self.q,
            "n": self.n,
            "k": self.k,
            "total_planes": self.total_planes,
            "fano_points": self.fano_points,
            "per_chart": per_chart,
        });
        if let Some(ws) = &self.witnesses {
            v["witnesses"] = json!(ws.iter().map(|w| w.to_json()).collect::<Vec<_>>());
        }
        v
    }
}

/// Exhaustive count of k-planes on the vanishing locus of the tuple over
/// its prime field. Shards are scanned independently (in parallel when a
/// rayon pool is active) and merged in deterministic shard order.
pub fn count_fano_points(
    f_tuple: &FormTuple,
    k: usize,
    collect_witnesses: bool,
) -> Result<CountReport, Error> {
    let q = f_tuple
        .field()
        .modulus()
        .ok_or_else(|| Error::InvalidRange("counting requires a prime field".into()))?;
    let n = f_tuple.ambient_dim();
    if k >= n {
        return Err(Error::InvalidRange(format!(
            "need k < n, got k = {k}, n = {n}"
        )));
    }
    let total_planes = gaussian_count(k, n, q)?.to_u64().ok_or_else(|| {
        Error::InvalidRange("plane count exceeds u64; enumeration infeasible".into())
    })?;

    let shards = enumeration_shards(k, n, q)?;
    // one compiled system per distinct chart, looked up by pivot set
    let mut charts: Vec<Chart> = Vec::new();
    for s in &shards {
        if charts.last() != Some(s.chart()) {
            charts.push(s.chart().clone());
        }
    }
    let systems = charts
        .iter()
        .map(|c| Ok(CompiledSystem::compile(&build_local_system(f_tuple, c)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let chart_of = |s: &crate::grassmann::EnumerationShard| {
        charts
            .iter()
            .position(|c| c == s.chart())
            .expect("shard chart is in the chart list")
    };

    struct ShardTally {
        chart_idx: usize,
        planes: u64,
        fano: u64,
        witnesses: Vec<PlaneCoords>,
    }

    let tallies: Vec<ShardTally> = shards
        .par_iter()
        .map(|shard| {
            let chart_idx = chart_of(shard);
            let system = &systems[chart_idx];
            let mut vals: Vec<u64> = Vec::new();
            let mut tally = ShardTally {
                chart_idx,
                planes: 0,
                fano: 0,
                witnesses: Vec::new(),
            };
            shard.for_each_plane(|plane| {
                tally.planes += 1;
                vals.clear();
                vals.extend(
                    plane
                        .entries()
                        .iter()
                        .map(|s| s.residue().expect("F_q plane")),
                );
                if system.vanishes_at(&vals, q) {
                    tally.fano += 1;
                    if collect_witnesses {
                        tally.witnesses.push(plane.clone());
                    }
                }
            });
            tally
        })
        .collect();

    let mut per_chart: Vec<ChartCount> = charts
        .iter()
        .map(|c| ChartCount {
            pivots: c.pivots().to_vec(),
            planes: 0,
            fano_points: 0,
        })
        .collect();
    let mut fano_points = 0u64;
    let mut seen_planes = 0u64;
    let mut witnesses = collect_witnesses.then(Vec::new);
    for t in tallies {
        per_chart[t.chart_idx].planes += t.planes;
        per_chart[t.chart_idx].fano_points += t.fano;
        fano_points += t.fano;
        seen_planes += t.planes;
        if let Some(ws) = witnesses.as_mut() {
            ws.extend(t.witnesses);
        }
    }
    debug_assert_eq!(seen_planes, total_planes);
    Ok(CountReport {
        q,
        n,
        k,
        total_planes,
        fano_points,
        per_chart,
        witnesses,
    })
}

/// Log-log regression of plane counts against field size for a fixed
/// rational pattern tuple.
#[derive(Clone, Debug)]
pub struct DimensionEstimate {
    pub primes: Vec<u64>,
    pub counts: Vec<u64>,
    /// Least-squares slope of log(count) against log(q).
    pub slope: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

impl DimensionEstimate {
    pub fn to_json(&self) -> Value {
        json!({
            "primes": self.primes,
            "counts": self.counts,
            "slope": self.slope,
            "residual": self.residual,
        })
    }
}

/// Reduce the rational pattern mod each prime, count exhaustively, and fit
/// log(count) = slope * log(q) + c. At least two primes; every count must
/// be positive (a zero count has no logarithm and means the pattern's
/// variety has no rational planes at that prime).
pub fn estimate_dimension(
    pattern: &FormTuple,
    k: usize,
    primes: &[u64],
) -> Result<DimensionEstimate, Error> {
    if pattern.field() != FieldSpec::Rationals {
        return Err(Error::FieldMismatch);
    }
    if primes.len() < 2 {
        return Err(Error::InvalidRange(
            "need at least two primes for a slope".into(),
        ));
    }
    let mut counts = Vec::with_capacity(primes.len());
    for &p in primes {
        let reduced = pattern.to_prime_field(p)?;
        counts.push(count_fano_points(&reduced, k, false)?.fano_points);
    }
    if counts.contains(&0) {
        return Err(Error::ZeroCount);
    }
    let xs: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let m = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / m;
    let mean_y = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let residual = (sse / m).sqrt();
    Ok(DimensionEstimate {
        primes: primes.to_vec(),
        counts,
        slope,
        residual,
    })
}
