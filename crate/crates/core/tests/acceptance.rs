//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero when a criterion fails unexpectedly.

use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use nodal_core::cli::{self, Command, FitParams, RunConfig};
use nodal_core::cobordism::{self, AltPairClass, Descriptor, DoublePointData, PairClass, STANDARD_BASIS};
use nodal_core::multipoly::MultiPoly;
use nodal_core::quasimodular::{dg2_over_q, k3_denominator};
use nodal_core::rational::{frac, int, Rational};
use nodal_core::series::{PowerSeries, Variable};
use nodal_core::severi::{self, SeveriTable};
use nodal_core::universal::{self, genus_series, FitConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn fit_config(order: usize, degrees: (u32, u32), k3: (i64, i64)) -> FitConfig {
    FitConfig { order, degrees, k3, unsafe_thresholds: false }
}

fn discriminant(table: &SeveriTable) -> Outcome {
    let t = Instant::now();
    let bad: Vec<u32> = (2..=12u32)
        .filter(|&d| table.severi(d, 1).unwrap() != (3 * (d - 1) * (d - 1)).into())
        .collect();
    let el = t.elapsed();
    outcome(
        bad.is_empty() && el < Duration::from_secs(5),
        format!("severi(d,1) = 3(d-1)^2 for d=2..12, mismatches {bad:?}, {el:.2?}"),
    )
}

fn fixtures(table: &SeveriTable) -> Outcome {
    let got: Vec<String> = [2, 3, 4].iter().map(|&d| table.severi(d, 1).unwrap().to_string()).collect();
    outcome(got == ["3", "12", "27"], format!("severi(2..4,1) = {}", got.join(", ")))
}

fn node_polynomials(table: &SeveriTable) -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for delta in [2u32, 3] {
        let lo = 2 * delta;
        let hi = lo + 2 * delta + 3;
        let r = severi::node_poly_check(table, delta, lo..=hi).unwrap();
        ok &= r.fits && r.polynomial.len() == 2 * delta as usize + 1;
        parts.push(format!("delta={delta} on d={lo}..{hi} fits={}", r.fits));
    }
    let el = t.elapsed();
    outcome(ok && el < Duration::from_secs(120), format!("{}, {el:.2?}", parts.join("; ")))
}

fn universal_t1(table: &SeveriTable) -> Outcome {
    let fit = universal::fit_a(&FitConfig::for_order(1), table).unwrap();
    let t1 = fit.universal_t(1).unwrap();
    let mut want = MultiPoly::linear(0, int(3));
    want = &want + &MultiPoly::linear(1, int(2));
    want = &want + &MultiPoly::linear(3, int(1));
    let vals: Vec<Rational> = [2, 3, 4]
        .iter()
        .map(|&d| t1.eval(&Descriptor::Plane { d }.class().unwrap()))
        .collect();
    outcome(
        t1.poly == want && vals == [int(3), int(12), int(27)],
        format!("T1 = {}, planes 2..4 -> {}, {}, {}", t1.poly, vals[0], vals[1], vals[2]),
    )
}

fn held_out(table: &SeveriTable) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (order, degrees, targets, budget) in [
        (2, (9, 10), vec![11, 12], Duration::from_secs(30)),
        (3, (14, 15), vec![16], Duration::from_secs(300)),
    ] {
        let t = Instant::now();
        let fit = universal::fit_a(&fit_config(order, degrees, (2, 4)), table).unwrap();
        for d in targets {
            let r = universal::validate_p2(d, &fit, order, table).unwrap();
            ok &= r.matches && r.held_out;
            parts.push(format!("M={order} d={d} {}", if r.matches { "exact" } else { "mismatch" }));
        }
        let el = t.elapsed();
        ok &= el < budget;
        parts.push(format!("{el:.2?}"));
    }
    outcome(ok, parts.join(", "))
}

fn basis_independence(table: &SeveriTable) -> Outcome {
    let a = universal::fit_a(&fit_config(2, (9, 10), (2, 4)), table).unwrap();
    let b = universal::fit_a(&fit_config(2, (10, 11), (2, 6)), table).unwrap();
    let c = universal::fit_a(&fit_config(2, (10, 11), (2, 4)), table).unwrap();
    let d = universal::fit_a(&fit_config(2, (9, 10), (2, 6)), table).unwrap();
    let same = a.a == b.a && a.a == c.a && a.a == d.a;
    outcome(same, "A1..A4 equal for planes (9,10)/(10,11) x K3 (2,4)/(2,6)")
}

/// Returns the literal check and whether the corrected form holds.
fn gyz_residuals(table: &SeveriTable) -> (Outcome, bool) {
    let order = 2;
    let fit = universal::fit_a(&fit_config(order, (9, 10), (2, 4)), table).unwrap();
    let gyz = universal::fit_b(&fit, order).unwrap();
    let [a1, _, _, a4] = &gyz.a_hat;
    let two_a1 = a1.scale(&int(2));
    let first = two_a1.exp().unwrap().first_difference(&dg2_over_q(order));
    let lhs = (&a4.scale(&int(12)) - &two_a1).exp().unwrap();
    let denom = k3_denominator(order);
    let literal = lhs.first_difference(&denom);
    let corrected = lhs.first_difference(&denom.pow(&frac(-1, 2)).unwrap());
    let detail = match literal {
        None => format!("exp(2a1) = DG2/q {}, exp(12a4-2a1) = Delta D2G2/q^2 through q^{order}", first.is_none()),
        Some(k) => format!(
            "exp(2a1) = DG2/q {}; exp(12a4-2a1) = {lhs} but Delta D2G2/q^2 = {denom}, first differ at q^{k}; \
             (Delta D2G2/q^2)^(-1/2) matches: {}",
            first.is_none(),
            corrected.is_none()
        ),
    };
    let pass = first.is_none() && literal.is_none();
    (outcome(pass, detail), first.is_none() && corrected.is_none() && gyz.residuals.consistent())
}

fn yau_zaslow() -> Outcome {
    let n = 20;
    let mut p = vec![0i128; n + 1];
    p[0] = 1;
    for k in 1..=n {
        for _ in 0..24 {
            for i in k..=n {
                p[i] += p[i - k];
            }
        }
    }
    let s = genus_series(0, 0, 0, 2, n, None).unwrap();
    let want: Vec<Rational> = p.iter().map(|&c| Rational::from_integer(c.into())).collect();
    let ok = s.unit.coeffs() == want.as_slice() && s.valuation == 1;
    outcome(ok, format!("unit part matches prod (1-q^k)^-24 through q^{n}: {ok}, q^20 coeff {}", p[n]))
}

fn alt_class() -> impl Strategy<Value = PairClass> {
    (-40i64..=40, -40i64..=40, -10i64..=10, -40i64..=40)
        .prop_map(|(lk, chi_l, chi_o, ksq)| PairClass::from_alt(&AltPairClass { lk, chi_l, chi_o, ksq }))
}

fn homomorphism(table: &SeveriTable) -> Outcome {
    let fit = universal::fit_a(&fit_config(2, (9, 10), (2, 4)), table).unwrap();
    let strat = (alt_class(), alt_class(), 0u32..=6, -12i64..=12);
    let res = runner(100).run(&strat, |(v1, v2, g_d, deg_ld)| {
        let (v3, v0) = cobordism::close_relation(v1, v2, DoublePointData { g_d, deg_ld });
        let e = |v: &PairClass| fit.evaluate(v, 2).unwrap();
        prop_assert_eq!(&e(&v0) * &e(&v3), &e(&v1) * &e(&v2));
        Ok(())
    });
    outcome(res.is_ok(), format!("100 random relations: {}", describe(&res)))
}

fn flat<T: std::fmt::Debug>(r: Result<(), T>) -> Result<(), String> {
    r.map_err(|e| format!("{e:?}"))
}

fn describe<T: std::fmt::Debug>(res: &Result<(), T>) -> String {
    match res {
        Ok(()) => "all exact".into(),
        Err(e) => format!("{e:?}"),
    }
}

fn cobordism_suite() -> Outcome {
    let roundtrip = runner(1000).run(&alt_class(), |v| {
        prop_assert!(v.validate().is_ok());
        let a = v.decompose().map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(a.reconstruct(), v);
        Ok(())
    });
    let raw = (-60i64..=60, -60i64..=60, -30i64..=30, -60i64..=60);
    let integrality = runner(1000).run(&raw, |(l2, lk, c1sq, c2)| {
        let v = PairClass::new(l2, lk, c1sq, c2);
        if v.validate().is_ok() {
            prop_assert!(v.decompose().is_ok());
        } else {
            let fixed = PairClass::new(l2 + (l2 + lk).rem_euclid(2), lk, c1sq, c2 + 12 - (c1sq + c2).rem_euclid(12));
            prop_assert!(fixed.validate().is_ok());
            prop_assert!(fixed.decompose().is_ok());
        }
        Ok(())
    });
    let units = STANDARD_BASIS.iter().enumerate().all(|(i, v)| {
        let a = v.decompose().unwrap();
        let got = [a.a1, a.a2, a.a3, a.a4];
        got.iter().enumerate().all(|(j, &x)| x == i64::from(i == j))
    });
    let plane = |d| Descriptor::Plane { d }.class().unwrap();
    let k3 = |l2| Descriptor::K3 { l2 }.class().unwrap();
    let mut family_ok = true;
    let mut checked = 0;
    for d1 in 1..=5 {
        for d2 in d1 + 1..=6 {
            for s1 in (2..=14).step_by(2) {
                for s2 in (2..=14).step_by(2) {
                    family_ok &= cobordism::is_basis(&[plane(d1), plane(d2), k3(s1), k3(s2)]) == (s1 != s2);
                    checked += 1;
                }
            }
        }
    }
    let ok = roundtrip.is_ok() && integrality.is_ok() && units && family_ok;
    outcome(
        ok,
        format!(
            "roundtrip {}, integrality {}, unit vectors {units}, K3 criterion on {checked} families {family_ok}",
            describe(&roundtrip),
            describe(&integrality)
        ),
    )
}

fn coeff() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| frac(p, q))
}

fn series_with(c0: Option<Rational>) -> impl Strategy<Value = PowerSeries> {
    (1usize..=7).prop_flat_map(move |m| {
        let c0 = c0.clone();
        prop::collection::vec(coeff(), m + 1).prop_map(move |mut cs| {
            if let Some(c) = &c0 {
                cs[0] = c.clone();
            }
            PowerSeries::new(Variable::Q, cs)
        })
    })
}

fn series_suite() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    let mut record = |name: &str, res: Result<(), String>| {
        ok &= res.is_ok();
        parts.push(format!("{name} {}", describe(&res)));
    };

    record(
        "exp/log",
        flat(runner(1000).run(&(series_with(Some(int(0)))), |f| {
            prop_assert_eq!(f.exp().unwrap().log().unwrap(), f.clone());
            let g = &f + &PowerSeries::one(Variable::Q, f.order());
            prop_assert_eq!(g.log().unwrap().exp().unwrap(), g);
            Ok(())
        })),
    );
    record(
        "pow",
        flat(runner(1000).run(&(series_with(Some(int(1))), coeff(), coeff()), |(f, a, b)| {
            let lhs = &f.pow(&a).unwrap() * &f.pow(&b).unwrap();
            prop_assert_eq!(lhs, f.pow(&(a + b)).unwrap());
            Ok(())
        })),
    );
    let reversible = (series_with(Some(int(0))), coeff().prop_filter("unit", |c| c != &int(0)))
        .prop_map(|(mut f, c)| {
            let mut cs = f.coeffs().to_vec();
            cs[1] = c;
            f = PowerSeries::new(Variable::Q, cs);
            f
        });
    record(
        "revert/compose",
        flat(runner(1000).run(&reversible, |f| {
            let g = f.revert().unwrap();
            let id = PowerSeries::identity(Variable::Q, f.order());
            prop_assert_eq!(f.compose(&g).unwrap(), id.clone());
            prop_assert_eq!(g.compose(&f).unwrap(), id);
            Ok(())
        })),
    );
    record(
        "leibniz",
        flat(runner(1000).run(&(series_with(None), series_with(None)), |(f, g)| {
            let lhs = (&f * &g).diff_d();
            let rhs = &(&f.diff_d() * &g) + &(&f * &g.diff_d());
            prop_assert_eq!(lhs, rhs);
            Ok(())
        })),
    );
    outcome(ok, format!("1000 cases each: {}", parts.join(", ")))
}

fn determinism() -> Outcome {
    let cmd = Command::Fit { order: 2, fit: FitParams::default() };
    let mut seq = RunConfig::new(cmd.clone());
    seq.threads = Some(1);
    let par = RunConfig::new(cmd);
    let a = cli::run(&seq);
    let b = cli::run(&par);
    let ok = a.exit_code == 0 && b.exit_code == 0 && a.document.as_bytes() == b.document.as_bytes();
    outcome(ok, format!("1 thread vs all cores: {} bytes, identical {}", a.document.len(), a.document == b.document))
}

fn main() {
    let table = SeveriTable::new();
    let (gyz, gyz_corrected) = gyz_residuals(&table);
    let results = [
        ("discriminant oracle", discriminant(&table)),
        ("classical fixtures", fixtures(&table)),
        ("node polynomials", node_polynomials(&table)),
        ("universal T1", universal_t1(&table)),
        ("held-out validation", held_out(&table)),
        ("basis independence", basis_independence(&table)),
        ("residual identities", gyz),
        ("Yau-Zaslow series", yau_zaslow()),
        ("homomorphism", homomorphism(&table)),
        ("cobordism suite", cobordism_suite()),
        ("series properties", series_suite()),
        ("determinism", determinism()),
    ];
    let mut unexpected = false;
    for (i, (name, o)) in results.iter().enumerate() {
        let n = i + 1;
        println!("{} {n:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        // the literal form of 7 cannot hold; the corrected identity must
        unexpected |= !o.pass && !(n == 7 && gyz_corrected);
    }
    if unexpected {
        std::process::exit(1);
    }
}
