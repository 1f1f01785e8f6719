//! End-to-end acceptance checks. Each test covers one numbered criterion,
//! prints a single [PASS]/[FAIL] line (visible with --nocapture), and
//! enforces the criterion's wall-clock budget.

use fano_core::alpha::{alpha_matrix, alpha_surjective};
use fano_core::combi::{dimension_report, minor_size, psi_profile, MultiDegree};
use fano_core::fano::{count_fano_points, estimate_dimension, tangent_profile};
use fano_core::grassmann::{enumerate_planes, gaussian_count, pivot_sets, Chart, PlaneCoords};
use fano_core::monomial::basis;
use fano_core::parse::parse_polynomial;
use fano_core::{FieldSpec, FormTuple, Monomial, Polynomial, Scalar};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::HashSet;
use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

fn criterion(num: u32, what: &str, budget: Duration, body: impl FnOnce() + UnwindSafe) {
    let start = Instant::now();
    let result = catch_unwind(body);
    let elapsed = start.elapsed();
    let ok = result.is_ok() && elapsed <= budget;
    println!(
        "[{}] criterion {num} ({elapsed:.2?}): {what}",
        if ok { "PASS" } else { "FAIL" }
    );
    if let Err(e) = result {
        resume_unwind(e);
    }
    assert!(
        elapsed <= budget,
        "criterion {num} took {elapsed:?}, budget {budget:?}"
    );
}

fn fano_bin(args: &[&str]) -> (Option<i32>, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fano"))
        .args(args)
        .output()
        .expect("binary spawns");
    (
        out.status.code(),
        String::from_utf8(out.stdout).expect("stdout is utf-8"),
        String::from_utf8(out.stderr).expect("stderr is utf-8"),
    )
}

fn fano_json(args: &[&str]) -> Value {
    let (code, stdout, stderr) = fano_bin(args);
    assert_eq!(code, Some(0), "args {args:?} failed: {stderr}");
    serde_json::from_str(&stdout).expect("report is valid JSON")
}

#[test]
fn criterion_1_quadric_local_equations() {
    criterion(
        1,
        "quadric local system in the standard chart",
        Duration::from_secs(1),
        || {
            let report = fano_json(&["equations", "--f", "z0*z2 - z1*z3", "--n", "3", "--k", "1"]);
            let eqs: Vec<&str> = report["equations"]
                .as_array()
                .expect("equations array")
                .iter()
                .map(|v| v.as_str().expect("equation string"))
                .collect();
            assert_eq!(eqs.len(), 3, "got {eqs:?}");
            // the target zero set, each equation up to a global sign
            let classes: [&[&str]; 3] = [
                &["x_{0,2}", "-x_{0,2}"],
                &["x_{1,3}", "-x_{1,3}"],
                &["-x_{0,3} + x_{1,2}", "x_{0,3} - x_{1,2}"],
            ];
            let mut seen = [false; 3];
            for eq in &eqs {
                let hit = classes.iter().position(|c| c.contains(eq));
                let hit = hit.unwrap_or_else(|| panic!("unexpected equation {eq:?}"));
                assert!(!seen[hit], "equation class repeated in {eqs:?}");
                seen[hit] = true;
            }
            assert_eq!(seen, [true; 3], "missing classes in {eqs:?}");
        },
    );
}

#[test]
fn criterion_2_multiplication_matrix_goldens() {
    criterion(
        2,
        "symbolic 2x4 multiplication matrix and both functional evaluations",
        Duration::from_secs(1),
        || {
            let symbolic = fano_json(&["mmu", "--d", "2,2", "--k", "1"]);
            assert_eq!(
                symbolic["entries"],
                json!([
                    ["z0^2(+)0", "z0*z1(+)0", "0(+)z0^2", "0(+)z0*z1"],
                    ["z0*z1(+)0", "z1^2(+)0", "0(+)z0*z1", "0(+)z1^2"],
                ])
            );
            assert_eq!(
                symbolic["col_labels"],
                json!(["z0(+)0", "z1(+)0", "0(+)z0", "0(+)z1"])
            );

            let first = fano_json(&["mmu", "--d", "2,2", "--k", "1", "--h", "(z0^2)* + (z0^2)*"]);
            assert_eq!(
                first["h_matrix"]["entries"],
                json!([[1, 0, 1, 0], [0, 0, 0, 0]])
            );
            assert_eq!(first["h_rank"], json!(1));

            let second = fano_json(&["mmu", "--d", "2,2", "--k", "1", "--h", "(z0*z1)* + 0"]);
            assert_eq!(
                second["h_matrix"]["entries"],
                json!([[0, 1, 0, 0], [1, 0, 0, 0]])
            );
            assert_eq!(second["h_rank"], json!(2));
        },
    );
}

#[test]
fn criterion_3_twenty_seven_lines() {
    criterion(
        3,
        "27 lines on the Fermat cubic over F_7, all smooth with surjective alpha",
        Duration::from_secs(10),
        || {
            let field = FieldSpec::prime_field(7).unwrap();
            let f = parse_polynomial("z0^3 + z1^3 + z2^3 + z3^3", 4, field).unwrap();
            let tuple = FormTuple::new(vec![f]).unwrap();
            let report = count_fano_points(&tuple, 1, true).unwrap();
            assert_eq!(report.total_planes, 2850);
            assert_eq!(report.fano_points, 27);
            let witnesses = report.witnesses.as_ref().expect("witnesses requested");
            assert_eq!(witnesses.len(), 27);
            for line in witnesses {
                let profile = tangent_profile(&tuple, line).unwrap();
                assert_eq!(profile.tangent_dim, 0, "at {}", line.to_json());
                assert!(profile.smooth_for_p, "at {}", line.to_json());
                assert!(
                    alpha_surjective(&tuple, line).unwrap(),
                    "at {}",
                    line.to_json()
                );
            }
        },
    );
}

#[test]
fn criterion_4_quadric_counts_and_slope() {
    criterion(
        4,
        "quadric line counts {12, 16, 24} and fitted dimension near 1",
        Duration::from_secs(30),
        || {
            for (q, want) in [(5u64, 12u64), (7, 16), (11, 24)] {
                let field = FieldSpec::prime_field(q).unwrap();
                let f = parse_polynomial("z0*z3 - z1*z2", 4, field).unwrap();
                let tuple = FormTuple::new(vec![f]).unwrap();
                let report = count_fano_points(&tuple, 1, false).unwrap();
                assert_eq!(report.fano_points, want, "q = {q}");
            }
            let pattern = FormTuple::new(vec![parse_polynomial(
                "z0*z3 - z1*z2",
                4,
                FieldSpec::Rationals,
            )
            .unwrap()])
            .unwrap();
            let est = estimate_dimension(&pattern, 1, &[5, 7, 11]).unwrap();
            assert_eq!(est.counts, vec![12, 16, 24]);
            assert!(
                (est.slope - 1.0).abs() <= 0.25,
                "slope {} outside 1.0 +/- 0.25",
                est.slope
            );
        },
    );
}

#[test]
fn criterion_5_random_quartics_are_mostly_lineless() {
    criterion(
        5,
        "scan of 200 random quartic surfaces over F_11 finds few lines",
        Duration::from_secs(300),
        || {
            let report = fano_json(&[
                "scan", "--n", "3", "--k", "1", "--d", "4", "--q", "11", "--trials", "200",
                "--seed", "7",
            ]);
            let fraction_empty = report["fraction_empty"].as_f64().unwrap();
            let mean_count = report["mean_count"].as_f64().unwrap();
            assert!(fraction_empty >= 0.70, "fraction_empty = {fraction_empty}");
            assert!(mean_count <= 0.5, "mean_count = {mean_count}");
        },
    );
}

fn rand_scalar(field: FieldSpec, rng: &mut ChaCha8Rng) -> Scalar {
    let p = field.modulus().expect("prime field");
    field.integer(rng.gen_range(0..p) as i64)
}

fn random_form(field: FieldSpec, nvars: usize, d: u32, rng: &mut ChaCha8Rng) -> Polynomial {
    loop {
        let terms: Vec<(Monomial, Scalar)> = basis(d, nvars)
            .into_iter()
            .map(|m| (m, rand_scalar(field, rng)))
            .collect();
        let f = Polynomial::from_terms(field, nvars, terms).unwrap();
        if !f.is_zero() {
            return f;
        }
    }
}

/// Random plane plus a random tuple vanishing on it: each component is a
/// combination of the plane's linear ideal generators with random cofactors.
fn incidence_pair(
    n: usize,
    k: usize,
    degrees: &[u32],
    q: u64,
    rng: &mut ChaCha8Rng,
) -> (FormTuple, PlaneCoords) {
    let field = FieldSpec::prime_field(q).unwrap();
    let sets = pivot_sets(k, n);
    let pivots = sets[rng.gen_range(0..sets.len())].clone();
    let chart = Chart::new(k, n, pivots).unwrap();
    let rows: Vec<Vec<Scalar>> = (0..=k)
        .map(|_| (0..n - k).map(|_| rand_scalar(field, rng)).collect())
        .collect();
    let plane = PlaneCoords::new(chart.clone(), field, rows).unwrap();

    let ideal_gens: Vec<Polynomial> = chart
        .nonpivots()
        .into_iter()
        .enumerate()
        .map(|(j, b)| {
            let mut lin = Polynomial::variable(field, n + 1, b).unwrap();
            for (a, &pv) in chart.pivots().iter().enumerate() {
                let t = Polynomial::variable(field, n + 1, pv)
                    .unwrap()
                    .scale(plane.entry(a, j))
                    .unwrap();
                lin = lin.sub(&t).unwrap();
            }
            lin
        })
        .collect();

    let mut comps = Vec::with_capacity(degrees.len());
    for &d in degrees {
        loop {
            let mut f = Polynomial::zero(field, n + 1);
            for gen in &ideal_gens {
                let g = random_form(field, n + 1, d - 1, rng);
                f = f.add(&g.mul(gen).unwrap()).unwrap();
            }
            if !f.is_zero() {
                comps.push(f);
                break;
            }
        }
    }
    (FormTuple::new(comps).unwrap(), plane)
}

#[test]
fn criterion_6_alpha_rank_equals_jacobian_rank() {
    criterion(
        6,
        "alpha rank matches the Jacobian rank on 1000 random incidence pairs",
        Duration::from_secs(120),
        || {
            let grid: [(usize, usize, &[u32]); 4] =
                [(3, 1, &[2]), (3, 1, &[3]), (4, 1, &[2, 2]), (4, 2, &[2])];
            let mut checked = 0u32;
            for (cell, &(n, k, degrees)) in grid.iter().enumerate() {
                for (qi, &q) in [101u64, 32749].iter().enumerate() {
                    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + (cell * 2 + qi) as u64);
                    for trial in 0..125 {
                        let (tuple, plane) = incidence_pair(n, k, degrees, q, &mut rng);
                        let alpha = alpha_matrix(&tuple, &plane).unwrap();
                        let profile = tangent_profile(&tuple, &plane).unwrap();
                        assert_eq!(
                            alpha.rank(),
                            profile.jacobian_rank,
                            "n={n} k={k} d={degrees:?} q={q} trial={trial}"
                        );
                        checked += 1;
                    }
                }
            }
            assert_eq!(checked, 1000);
        },
    );
}

#[test]
fn criterion_7_psi_identities_on_the_full_grid() {
    criterion(
        7,
        "psi endpoints, minor sizes, and concavity over the n <= 12 grid \
         (the all-quadric pair (2,2) is exactly linear)",
        Duration::from_secs(10),
        || {
            let mut tuples: Vec<Vec<i64>> = Vec::new();
            for s in 1..=3usize {
                let mut stack = vec![Vec::new()];
                for _ in 0..s {
                    stack = stack
                        .into_iter()
                        .flat_map(|t: Vec<i64>| {
                            (2..=5i64).map(move |d| {
                                let mut u = t.clone();
                                u.push(d);
                                u
                            })
                        })
                        .collect();
                }
                tuples.extend(stack);
            }
            assert_eq!(tuples.len(), 4 + 16 + 64);

            for n in 1..=12usize {
                for k in 0..n {
                    for degrees in &tuples {
                        let d = MultiDegree::new(degrees.clone()).unwrap();
                        let s = degrees.len();
                        let profile = psi_profile(n, k, &d, 52).unwrap();
                        let report = dimension_report(n, k, &d).unwrap();

                        let endpoint = BigInt::from(n as i64 - 2 * k as i64 - s as i64);
                        assert_eq!(
                            profile.values[0], endpoint,
                            "psi(1) at n={n} k={k} d={degrees:?}"
                        );
                        assert_eq!(
                            profile.values[k], report.delta,
                            "psi(k+1) at n={n} k={k} d={degrees:?}"
                        );

                        for t in 1..=k + 1 {
                            let m = minor_size(&d, k, t).unwrap();
                            assert_eq!(
                                m.closed_form, m.direct_sum,
                                "minor size at n={n} k={k} d={degrees:?} t={t}"
                            );
                        }

                        let second = &profile.second_diff[..50];
                        if degrees == &vec![2] {
                            if n as i64 - 2 * k as i64 > 0 {
                                for (i, v) in profile.first_diff.iter().enumerate() {
                                    assert!(
                                        v.to_i64().unwrap() > 0,
                                        "first diff at t={} for n={n} k={k} d=(2): {v}",
                                        i + 1
                                    );
                                }
                            }
                        } else if degrees == &vec![2, 2] {
                            for (i, v) in second.iter().enumerate() {
                                assert_eq!(
                                    v.to_i64().unwrap(),
                                    0,
                                    "second diff at t={} for d=(2,2)",
                                    i + 1
                                );
                            }
                        } else {
                            for (i, v) in second.iter().enumerate() {
                                assert!(
                                    v.to_i64().unwrap() < 0,
                                    "second diff at t={} for n={n} k={k} d={degrees:?}: {v}",
                                    i + 1
                                );
                            }
                        }
                    }
                }
            }
        },
    );
}

#[test]
fn criterion_8_enumeration_matches_gaussian_counts() {
    criterion(
        8,
        "plane enumeration agrees with Gaussian binomials, no duplicates",
        Duration::from_secs(60),
        || {
            for n in 1..=4usize {
                for k in 0..n {
                    for q in [2u64, 3, 5, 7] {
                        let expected = gaussian_count(k, n, q)
                            .unwrap()
                            .to_u64()
                            .expect("count fits u64");
                        let mut seen = HashSet::new();
                        let mut count = 0u64;
                        for plane in enumerate_planes(k, n, q).unwrap() {
                            count += 1;
                            let key = format!("{:?}|{:?}", plane.chart().pivots(), plane.entries());
                            assert!(seen.insert(key), "duplicate plane in Gr({k},{n})(F_{q})");
                        }
                        assert_eq!(count, expected, "Gr({k},{n}) over F_{q}");
                        if (k, n, q) == (1, 3, 2) {
                            assert_eq!(count, 35);
                        }
                    }
                }
            }
        },
    );
}

#[test]
fn criterion_9_reports_do_not_depend_on_thread_count() {
    criterion(
        9,
        "scan and count reports are byte-identical across thread counts",
        Duration::from_secs(600),
        || {
            let scan_args = [
                "scan", "--n", "3", "--k", "1", "--d", "3", "--q", "5", "--trials", "30", "--seed",
                "99",
            ];
            let count_args = [
                "count",
                "--f",
                "z0^3 + z1^3 + z2^3 + z3^3",
                "--k",
                "1",
                "--q",
                "7",
                "--witnesses",
            ];
            for (label, args) in [("scan", &scan_args[..]), ("count", &count_args[..])] {
                for format in ["json", "csv"] {
                    let mut one = args.to_vec();
                    one.extend(["--format", format, "--threads", "1"]);
                    let mut four = args.to_vec();
                    four.extend(["--format", format, "--threads", "4"]);
                    let (c1, out1, err1) = fano_bin(&one);
                    let (c4, out4, err4) = fano_bin(&four);
                    assert_eq!(c1, Some(0), "{label} --threads 1: {err1}");
                    assert_eq!(c4, Some(0), "{label} --threads 4: {err4}");
                    assert!(!out1.is_empty());
                    assert_eq!(
                        out1, out4,
                        "{label} ({format}) differs across thread counts"
                    );
                }
            }
        },
    );
}
