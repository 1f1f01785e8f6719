use crate::{max_var_index, scalar_from_json, scan, ExperimentConfig};
use clap::{Parser, Subcommand, ValueEnum};
use fano_core::alpha::{alpha_matrix, apply_h, m_mu};
use fano_core::combi::{dimension_report, MultiDegree};
use fano_core::fano::{count_fano_points, estimate_dimension, fano_local_system, tangent_profile};
use fano_core::grassmann::{Chart, PlaneCoords};
use fano_core::parse::{parse_h_functional, parse_polynomial};
use fano_core::{Error, FieldSpec, FormTuple, Polynomial, Scalar};
use serde_json::{json, Value};
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "fano",
    version,
    about = "Exact computations on the variety of k-planes inside projective hypersurface intersections"
)]
struct Cli {
    /// Report format on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker pool size; FANO_THREADS is the fallback, default all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dimension bookkeeping for the plane variety of a generic tuple.
    Predict {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Component degrees, comma-separated, each >= 2.
        #[arg(long)]
        d: String,
    },
    /// Local defining equations of the plane variety in one chart.
    Equations {
        /// Form expressions in z0..zn, comma-separated components.
        #[arg(long)]
        f: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Chart pivot columns, comma-separated; default 0..k.
        #[arg(long)]
        chart: Option<String>,
    },
    /// Tangent-space profile at a plane contained in the vanishing locus.
    Tangent {
        #[arg(long)]
        f: String,
        /// Plane JSON: {"pivots": [...], "entries": [[...]], "q": prime or null}.
        #[arg(long)]
        plane: String,
    },
    /// The multiplication-map matrix at a contained plane, with its rank.
    Alpha {
        #[arg(long)]
        f: String,
        #[arg(long)]
        plane: String,
    },
    /// Symbolic multiplication matrix for a degree tuple; optionally apply
    /// a dual functional and report the scalar matrix and rank.
    Mmu {
        #[arg(long)]
        d: String,
        #[arg(long)]
        k: usize,
        /// Functional such as "(z0^2)* + (z0^2)*", one block per component.
        #[arg(long)]
        h: Option<String>,
    },
    /// Exhaustively count k-planes on the vanishing locus over F_q.
    Count {
        #[arg(long)]
        f: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: u64,
        /// Ambient dimension; inferred from the largest z-index if omitted.
        #[arg(long)]
        n: Option<usize>,
        /// Include the planes found in the report.
        #[arg(long)]
        witnesses: bool,
    },
    /// Repeatedly draw random tuples and aggregate plane counts and
    /// tangent statistics.
    Scan {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        trials: u64,
    },
    /// Fit log(count) against log(q) over several primes for a rational
    /// pattern tuple.
    Dimest {
        #[arg(long)]
        f: String,
        #[arg(long)]
        k: usize,
        /// Primes, comma-separated, at least two.
        #[arg(long)]
        primes: String,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

struct Report {
    json: Value,
    csv: String,
}

/// Parse arguments, run one subcommand, print the report. Returns the
/// process exit code: 0 success, 1 domain error, 2 usage error.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads(cli.threads);
    match dispatch(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&report.json).expect("report serializes")
                ),
                Format::Csv => print!("{}", report.csv),
            }
            0
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn configure_threads(flag: Option<usize>) {
    let n = flag.or_else(|| {
        std::env::var("FANO_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = n {
        // a pool may already exist when called twice in-process; that run
        // keeps the first size
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    match &cli.cmd {
        Cmd::Predict { n, k, d } => predict(*n, *k, d),
        Cmd::Equations { f, n, k, chart } => equations(f, *n, *k, chart.as_deref()),
        Cmd::Tangent { f, plane } => tangent(f, plane),
        Cmd::Alpha { f, plane } => alpha(f, plane),
        Cmd::Mmu { d, k, h } => mmu(d, *k, h.as_deref()),
        Cmd::Count {
            f,
            k,
            q,
            n,
            witnesses,
        } => count(f, *k, *q, *n, *witnesses),
        Cmd::Scan { n, k, d, q, trials } => scan_cmd(*n, *k, d, *q, *trials, cli.seed),
        Cmd::Dimest { f, k, primes, n } => dimest(f, *k, primes, *n),
    }
}

fn with_header(mode: &str, payload: Value) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(1));
    m.insert("mode".into(), json!(mode));
    if let Value::Object(o) = payload {
        m.extend(o);
    }
    Value::Object(m)
}

fn parse_csv<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<T>()
                .map_err(|_| CliError::Usage(format!("invalid {what} value {t:?}")))
        })
        .collect()
}

fn multidegree(text: &str) -> Result<MultiDegree, CliError> {
    let degrees: Vec<u32> = parse_csv(text, "degree")?;
    Ok(MultiDegree::from_u32(&degrees)?)
}

/// Split a --f value on commas and parse each component over the field.
fn parse_tuple(text: &str, nvars: usize, field: FieldSpec) -> Result<FormTuple, CliError> {
    let comps: Vec<Polynomial> = text
        .split(',')
        .map(|part| parse_polynomial(part, nvars, field))
        .collect::<Result<_, Error>>()?;
    Ok(FormTuple::new(comps)?)
}

/// Ambient dimension for a --f flag: explicit when given, otherwise the
/// largest variable index mentioned.
fn ambient_dim(f_text: &str, flag: Option<usize>) -> Result<usize, CliError> {
    match flag.or_else(|| max_var_index(f_text)) {
        Some(n) => Ok(n),
        None => Err(CliError::Usage(
            "cannot infer the ambient dimension: no variables in --f and no --n given".into(),
        )),
    }
}

fn parse_plane(text: &str) -> Result<PlaneCoords, CliError> {
    let usage = |msg: String| CliError::Usage(format!("--plane: {msg}"));
    let v: Value = serde_json::from_str(text).map_err(|e| usage(format!("not valid JSON: {e}")))?;
    let pivots: Vec<usize> = v
        .get("pivots")
        .and_then(Value::as_array)
        .ok_or_else(|| usage("needs a \"pivots\" array".into()))?
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|u| u as usize)
                .ok_or_else(|| usage(format!("pivot {x} is not a nonnegative integer")))
        })
        .collect::<Result<_, _>>()?;
    if pivots.is_empty() {
        return Err(usage("pivot set is empty".into()));
    }
    let field = match v.get("q") {
        None | Some(Value::Null) => FieldSpec::Rationals,
        Some(x) => {
            let q = x
                .as_u64()
                .ok_or_else(|| usage(format!("q must be a prime number, got {x}")))?;
            FieldSpec::prime_field(q)?
        }
    };
    let entries = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| usage("needs an \"entries\" array of rows".into()))?;
    let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(entries.len());
    let mut width = None;
    for row in entries {
        let row = row
            .as_array()
            .ok_or_else(|| usage("entries must be an array of arrays".into()))?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(usage("entry rows have unequal lengths".into()))
            }
            _ => {}
        }
        rows.push(
            row.iter()
                .map(|x| scalar_from_json(field, x).map_err(&usage))
                .collect::<Result<_, _>>()?,
        );
    }
    let width = width.unwrap_or(0);
    let k = pivots.len() - 1;
    let n = pivots.len() + width - 1;
    let chart = Chart::new(k, n, pivots)?;
    Ok(PlaneCoords::new(chart, field, rows)?)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One value per line, object fields flattened key,value; arrays joined
/// with '|'.
fn kv_csv(v: &Value) -> String {
    fn flat(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            Value::Array(a) => a.iter().map(flat).collect::<Vec<_>>().join("|"),
            Value::Object(m) => m
                .iter()
                .map(|(k, x)| format!("{k}:{}", flat(x)))
                .collect::<Vec<_>>()
                .join("|"),
            other => other.to_string(),
        }
    }
    let mut out = String::from("key,value\n");
    if let Value::Object(m) = v {
        for (k, val) in m {
            out.push_str(&csv_field(k));
            out.push(',');
            out.push_str(&csv_field(&flat(val)));
            out.push('\n');
        }
    }
    out
}

fn predict(n: usize, k: usize, d: &str) -> Result<Report, CliError> {
    let md = multidegree(d)?;
    let rep = dimension_report(n, k, &md)?;
    let json = with_header("predict", rep.to_json());
    let csv = kv_csv(&json);
    Ok(Report { json, csv })
}

fn equations(f: &str, n: usize, k: usize, chart: Option<&str>) -> Result<Report, CliError> {
    let tuple = parse_tuple(f, n + 1, FieldSpec::Rationals)?;
    let chart = match chart {
        Some(text) => Chart::new(k, n, parse_csv(text, "pivot")?)?,
        None => Chart::standard(k, n)?,
    };
    let system = fano_local_system(&tuple, &chart)?;
    let json = with_header("equations", system.to_json());
    let mut csv = String::from("index,equation\n");
    for (i, eq) in system.equation_strings().iter().enumerate() {
        csv.push_str(&format!("{i},{}\n", csv_field(eq)));
    }
    Ok(Report { json, csv })
}

fn tangent(f: &str, plane: &str) -> Result<Report, CliError> {
    let p = parse_plane(plane)?;
    let tuple = parse_tuple(f, p.chart().n() + 1, p.field())?;
    let rep = tangent_profile(&tuple, &p)?;
    let json = with_header("tangent", rep.to_json());
    let csv = kv_csv(&json);
    Ok(Report { json, csv })
}

fn alpha(f: &str, plane: &str) -> Result<Report, CliError> {
    let p = parse_plane(plane)?;
    let tuple = parse_tuple(f, p.chart().n() + 1, p.field())?;
    let am = alpha_matrix(&tuple, &p)?;
    let json = with_header("alpha", am.to_json());
    let csv = kv_csv(&json!({
        "rows": am.rows(),
        "cols": am.cols(),
        "rank": am.rank(),
        "surjective": am.is_surjective(),
    }));
    Ok(Report { json, csv })
}

fn mmu(d: &str, k: usize, h: Option<&str>) -> Result<Report, CliError> {
    let md = multidegree(d)?;
    let m = m_mu(&md, k);
    let mut payload = m.to_json();
    payload["pretty"] = json!(m.pretty());
    let mut csv = String::new();
    match h {
        Some(text) => {
            let degrees: Vec<u32> = md.degrees().iter().map(|&x| x as u32).collect();
            let func = parse_h_functional(text, k, &degrees, FieldSpec::Rationals)?;
            let ev = apply_h(&m, &func)?;
            payload["h"] = json!(text);
            payload["h_matrix"] = ev.matrix.to_json();
            payload["h_rank"] = json!(ev.rank);
            let entries = &ev.matrix.to_json()["entries"];
            if let Value::Array(rows) = entries {
                for row in rows {
                    if let Value::Array(cells) = row {
                        let line: Vec<String> =
                            cells.iter().map(|c| csv_field(&c.to_string())).collect();
                        csv.push_str(&line.join(","));
                        csv.push('\n');
                    }
                }
            }
            csv.push_str(&format!("rank,{}\n", ev.rank));
        }
        None => {
            for i in 0..m.rows() {
                let line: Vec<String> = (0..m.cols())
                    .map(|c| csv_field(&m.entry_string(i, c)))
                    .collect();
                csv.push_str(&line.join(","));
                csv.push('\n');
            }
        }
    }
    Ok(Report {
        json: with_header("mmu", payload),
        csv,
    })
}

fn count(f: &str, k: usize, q: u64, n: Option<usize>, witnesses: bool) -> Result<Report, CliError> {
    let n = ambient_dim(f, n)?;
    let field = FieldSpec::prime_field(q)?;
    let tuple = parse_tuple(f, n + 1, field)?;
    let rep = count_fano_points(&tuple, k, witnesses)?;
    let mut csv = String::from("q,pivots,planes,fano_points\n");
    for chart in &rep.per_chart {
        let pivots: Vec<String> = chart.pivots.iter().map(|p| p.to_string()).collect();
        csv.push_str(&format!(
            "{},{},{},{}\n",
            rep.q,
            pivots.join("|"),
            chart.planes,
            chart.fano_points
        ));
    }
    Ok(Report {
        json: with_header("count", rep.to_json()),
        csv,
    })
}

fn scan_cmd(
    n: usize,
    k: usize,
    d: &str,
    q: u64,
    trials: u64,
    seed: u64,
) -> Result<Report, CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let md = multidegree(d)?;
    let config = ExperimentConfig {
        n,
        k,
        degrees: md.degrees().iter().map(|&x| x as u32).collect(),
        q,
        trials,
        seed,
    };
    let rep = scan(&config)?;
    let json = with_header("scan", rep.to_json());
    let csv = kv_csv(&json);
    Ok(Report { json, csv })
}

fn dimest(f: &str, k: usize, primes: &str, n: Option<usize>) -> Result<Report, CliError> {
    let n = ambient_dim(f, n)?;
    let tuple = parse_tuple(f, n + 1, FieldSpec::Rationals)?;
    let primes: Vec<u64> = parse_csv(primes, "prime")?;
    let est = estimate_dimension(&tuple, k, &primes)?;
    let json = with_header("dimest", est.to_json());
    let csv = kv_csv(&json);
    Ok(Report { json, csv })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_json_parses_both_fields() {
        let p = parse_plane(r#"{"pivots": [0, 1], "entries": [[1, 2], [3, 4]], "q": 7}"#).unwrap();
        assert_eq!(p.chart().pivots(), &[0, 1]);
        assert_eq!(p.chart().n(), 3);
        assert_eq!(p.field().modulus(), Some(7));
        assert_eq!(*p.entry(1, 0), p.field().integer(3));

        let r =
            parse_plane(r#"{"pivots": [0, 2], "entries": [["1/2", "0"], ["-1", "3"]]}"#).unwrap();
        assert_eq!(r.field(), FieldSpec::Rationals);
        assert_eq!(
            *r.entry(0, 0),
            FieldSpec::Rationals
                .fraction(&num_bigint::BigInt::from(1), &num_bigint::BigInt::from(2))
                .unwrap()
        );
    }

    #[test]
    fn plane_json_rejects_malformed_inputs() {
        for bad in [
            "not json",
            r#"{"entries": [[1]]}"#,
            r#"{"pivots": [], "entries": []}"#,
            r#"{"pivots": [0, 1], "entries": [[1, 2], [3]]}"#,
            r#"{"pivots": [0, 1], "entries": [[0.5, 0], [0, 0]], "q": 7}"#,
        ] {
            assert!(
                matches!(parse_plane(bad), Err(CliError::Usage(_))),
                "accepted {bad:?}"
            );
        }
        // non-prime q is a domain error, not a usage error
        assert!(matches!(
            parse_plane(r#"{"pivots": [0, 1], "entries": [[1, 2], [3, 4]], "q": 6}"#),
            Err(CliError::Domain(Error::NotPrime(6)))
        ));
    }

    #[test]
    fn csv_fields_quote_commas_and_quotes() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("x_{0,2}"), "\"x_{0,2}\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn header_precedes_payload_fields() {
        let v = with_header("predict", json!({"delta": 1}));
        assert_eq!(v["schema"], json!(1));
        assert_eq!(v["mode"], json!("predict"));
        assert_eq!(v["delta"], json!(1));
    }
}
