//! Command-line surface and experiment harness over the core geometry
//! library: seeded random form sampling, whole-Grassmannian scans with
//! tangent statistics, and report emission as JSON or CSV.
//!
//! Exit codes: 0 success, 1 domain error (an [`Error`] from the core
//! library, including expression syntax errors), 2 usage error (bad flags,
//! malformed flag values, `--trials 0`).

use fano_core::fano::{count_fano_points, expected_dim, tangent_profile};
use fano_core::monomial::basis;
use fano_core::{Error, FieldSpec, FormTuple, Polynomial, Scalar};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::collections::BTreeMap;

mod cli;

pub use cli::run_cli;

/// Parameters of a randomized scan over the form space.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub degrees: Vec<u32>,
    pub q: u64,
    pub trials: u64,
    pub seed: u64,
}

/// Aggregated outcome of a scan: per-trial plane counts plus tangent
/// statistics over every plane found in any trial.
#[derive(Clone, Debug)]
pub struct ScanReport {
    pub config: ExperimentConfig,
    /// Expected dimension (k+1)(n-k) - C(d+k, k).
    pub delta: BigInt,
    pub per_trial_counts: Vec<u64>,
    pub fraction_empty: f64,
    pub mean_count: f64,
    pub total_found_points: u64,
    /// tangent_dim -> number of found planes with that tangent dimension.
    pub tangent_dim_histogram: BTreeMap<usize, u64>,
    /// Fraction of found planes where the Jacobian has full rank; absent
    /// when no plane was found in any trial.
    pub fraction_smooth: Option<f64>,
}

impl ScanReport {
    pub fn to_json(&self) -> Value {
        let hist: serde_json::Map<String, Value> = self
            .tangent_dim_histogram
            .iter()
            .map(|(dim, count)| (dim.to_string(), json!(count)))
            .collect();
        json!({
            "n": self.config.n,
            "k": self.config.k,
            "d": self.config.degrees,
            "q": self.config.q,
            "trials": self.config.trials,
            "seed": self.config.seed,
            "delta": fano_core::combi::big_to_value(&self.delta),
            "per_trial_counts": self.per_trial_counts,
            "fraction_empty": self.fraction_empty,
            "mean_count": self.mean_count,
            "total_found_points": self.total_found_points,
            "tangent_dim_histogram": hist,
            "fraction_smooth": self.fraction_smooth,
        })
    }
}

/// Draw a tuple of forms of the given degrees with coefficients uniform
/// over F_q, in basis order within each component. A component whose draw
/// comes out identically zero is redrawn whole, so every f_i is nonzero.
/// Deterministic in the rng state.
pub fn random_form_tuple(
    n: usize,
    degrees: &[u32],
    q: u64,
    rng: &mut ChaCha8Rng,
) -> Result<FormTuple, Error> {
    let field = FieldSpec::prime_field(q)?;
    let mut comps = Vec::with_capacity(degrees.len());
    for &d in degrees {
        loop {
            let terms: Vec<_> = basis(d, n + 1)
                .into_iter()
                .map(|m| (m, field.integer(rng.gen_range(0..q) as i64)))
                .collect();
            let f = Polynomial::from_terms(field, n + 1, terms)?;
            if !f.is_zero() {
                comps.push(f);
                break;
            }
        }
    }
    FormTuple::new(comps)
}

struct TrialOutcome {
    count: u64,
    tangent_dims: Vec<usize>,
    smooth: u64,
}

/// Run the full experiment: per trial, draw a random tuple, count its
/// planes exhaustively, and profile the tangent space at every plane
/// found. Trials use independent, trial-indexed rng streams of one seed,
/// so results do not depend on the worker pool size.
pub fn scan(config: &ExperimentConfig) -> Result<ScanReport, Error> {
    if config.trials == 0 {
        return Err(Error::InvalidRange("need at least one trial".into()));
    }
    if config.k >= config.n {
        return Err(Error::InvalidRange(format!(
            "need k < n, got k = {}, n = {}",
            config.k, config.n
        )));
    }
    FieldSpec::prime_field(config.q)?;

    let outcomes: Vec<TrialOutcome> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(trial);
            let tuple = random_form_tuple(config.n, &config.degrees, config.q, &mut rng)?;
            let report = count_fano_points(&tuple, config.k, true)?;
            let witnesses = report.witnesses.expect("requested witnesses");
            let mut tangent_dims = Vec::with_capacity(witnesses.len());
            let mut smooth = 0u64;
            for w in &witnesses {
                let t = tangent_profile(&tuple, w)?;
                tangent_dims.push(t.tangent_dim);
                smooth += t.smooth_for_p as u64;
            }
            Ok(TrialOutcome {
                count: report.fano_points,
                tangent_dims,
                smooth,
            })
        })
        .collect::<Result<_, Error>>()?;

    let per_trial_counts: Vec<u64> = outcomes.iter().map(|o| o.count).collect();
    let empty = per_trial_counts.iter().filter(|&&c| c == 0).count() as f64;
    let total: u64 = per_trial_counts.iter().sum();
    let mut hist = BTreeMap::new();
    let mut smooth_total = 0u64;
    for o in &outcomes {
        for &d in &o.tangent_dims {
            *hist.entry(d).or_insert(0u64) += 1;
        }
        smooth_total += o.smooth;
    }
    let trials = config.trials as f64;
    Ok(ScanReport {
        config: config.clone(),
        delta: expected_dim(config.n, config.k, &config.degrees),
        fraction_empty: empty / trials,
        mean_count: total as f64 / trials,
        total_found_points: total,
        fraction_smooth: (total > 0).then(|| smooth_total as f64 / total as f64),
        tangent_dim_histogram: hist,
        per_trial_counts,
    })
}

/// Largest variable index appearing as `z<digits>` in the text, for
/// inferring the ambient dimension when no explicit flag is given.
fn max_var_index(text: &str) -> Option<usize> {
    let b = text.as_bytes();
    let mut best = None;
    let mut i = 0;
    while i < b.len() {
        if b[i] == b'z' {
            let mut j = i + 1;
            let mut v = 0usize;
            while j < b.len() && b[j].is_ascii_digit() {
                v = v * 10 + (b[j] - b'0') as usize;
                j += 1;
            }
            if j > i + 1 {
                best = Some(best.map_or(v, |x: usize| x.max(v)));
            }
            i = j;
        } else {
            i += 1;
        }
    }
    best
}

/// Parse a scalar out of a plane-JSON entry: an integer number, or a
/// string holding an integer or a fraction "a/b".
fn scalar_from_json(field: FieldSpec, v: &Value) -> Result<Scalar, String> {
    match v {
        Value::Number(n) => {
            let i = n
                .as_i64()
                .ok_or_else(|| format!("entry {n} is not an integer"))?;
            Ok(field.integer(i))
        }
        Value::String(s) => {
            let parse_int = |t: &str| {
                t.parse::<BigInt>()
                    .map_err(|_| format!("entry \"{s}\" is not an integer or fraction"))
            };
            match s.split_once('/') {
                Some((num, den)) => field
                    .fraction(&parse_int(num.trim())?, &parse_int(den.trim())?)
                    .map_err(|e| e.to_string()),
                None => Ok(field.from_bigint(&parse_int(s.trim())?)),
            }
        }
        other => Err(format!("entry {other} must be a number or string")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_tuples_are_deterministic_and_sized() {
        let mut a = ChaCha8Rng::seed_from_u64(1);
        let mut b = ChaCha8Rng::seed_from_u64(1);
        let ta = random_form_tuple(3, &[3], 7, &mut a).unwrap();
        let tb = random_form_tuple(3, &[3], 7, &mut b).unwrap();
        assert_eq!(ta.components(), tb.components());
        assert_eq!(ta.degrees(), &[3]);
        // 20 basis monomials for a cubic in four variables
        assert!(ta.components()[0].terms().len() <= 20);
        assert_eq!(basis(3, 4).len(), 20);

        let mut c = ChaCha8Rng::seed_from_u64(2);
        let tc = random_form_tuple(3, &[2, 2], 5, &mut c).unwrap();
        assert_eq!(tc.degrees(), &[2, 2]);
        assert_eq!(basis(2, 4).len(), 10);
    }

    #[test]
    fn different_streams_give_different_draws() {
        let mut a = ChaCha8Rng::seed_from_u64(9);
        a.set_stream(0);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        b.set_stream(1);
        let ta = random_form_tuple(3, &[2], 7, &mut a).unwrap();
        let tb = random_form_tuple(3, &[2], 7, &mut b).unwrap();
        assert_ne!(ta.components(), tb.components());
    }

    #[test]
    fn scan_on_quadrics_finds_ruling_patterns() {
        let config = ExperimentConfig {
            n: 3,
            k: 1,
            degrees: vec![2],
            q: 7,
            trials: 50,
            seed: 3,
        };
        let rep = scan(&config).unwrap();
        assert_eq!(rep.per_trial_counts.len(), 50);
        let hist_total: u64 = rep.tangent_dim_histogram.values().sum();
        assert_eq!(hist_total, rep.total_found_points);
        assert_eq!(
            rep.per_trial_counts.iter().sum::<u64>(),
            rep.total_found_points
        );
        // smooth quadric rulings: 0, q+1 or 2(q+1) rational lines; a few
        // singular draws may fall outside, but most trials land in the set
        let expected = [0u64, 8, 16];
        let typical = rep
            .per_trial_counts
            .iter()
            .filter(|c| expected.contains(c))
            .count();
        assert!(typical >= 40, "only {typical}/50 trials in the ruling set");
        assert_eq!(rep.delta, BigInt::from(1));
    }

    #[test]
    fn scan_rejects_empty_trial_budgets() {
        let config = ExperimentConfig {
            n: 3,
            k: 1,
            degrees: vec![2],
            q: 7,
            trials: 0,
            seed: 0,
        };
        assert!(scan(&config).is_err());
    }

    #[test]
    fn scan_is_stream_split_deterministic() {
        let config = ExperimentConfig {
            n: 3,
            k: 1,
            degrees: vec![3],
            q: 5,
            trials: 8,
            seed: 42,
        };
        let a = scan(&config).unwrap();
        let b = scan(&config).unwrap();
        assert_eq!(a.per_trial_counts, b.per_trial_counts);
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn variable_inference_scans_every_component() {
        assert_eq!(max_var_index("z0^3 + z3*z1^2"), Some(3));
        assert_eq!(max_var_index("z12 + z4"), Some(12));
        assert_eq!(max_var_index("3 + 4"), None);
        assert_eq!(max_var_index(""), None);
    }

    #[test]
    fn plane_entry_scalars_parse_from_json() {
        let f7 = FieldSpec::prime_field(7).unwrap();
        assert_eq!(scalar_from_json(f7, &json!(3)).unwrap(), f7.integer(3));
        assert_eq!(scalar_from_json(f7, &json!("10")).unwrap(), f7.integer(3));
        let q = FieldSpec::Rationals;
        assert_eq!(
            scalar_from_json(q, &json!("1/2")).unwrap(),
            q.fraction(&BigInt::from(1), &BigInt::from(2)).unwrap()
        );
        assert!(scalar_from_json(q, &json!(0.5)).is_err());
        assert!(scalar_from_json(q, &json!("x")).is_err());
        assert!(scalar_from_json(q, &json!([1])).is_err());
    }
}
