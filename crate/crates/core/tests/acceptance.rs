//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use cremona_core::algebra::rational::{int, rat};
use cremona_core::algebra::{same_point, Rational};
use cremona_core::cluster::Threshold;
use cremona_core::links::{compose_quadratic, factorize, recompose, Center, FreshPoint, Link, LinkTrace};
use cremona_core::marked::{fano3_classify, noether_inequality, validate_homaloidal, Fano3Data, Surface};
use cremona_core::marked::{Classification, HomaloidalType, MarkedSystem};
use cremona_core::realization::{
    compose, compose_with_quadratic, factor_by_quadratics, homaloidal_type_of, quadratic_from_points,
    random_corpus, residual_linear, CorpusEntry,
};
use num_traits::{One, Signed, Zero};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

struct Combinatorial {
    types: Vec<HomaloidalType>,
    elapsed: Duration,
}

/// Chains with k = 1..=10 quadratic steps; every entry after the identity is
/// a corpus type.
fn combinatorial_corpus() -> Combinatorial {
    let start = Instant::now();
    let mut types = Vec::new();
    for seed in 0..40u64 {
        let k = 1 + (seed % 10) as usize;
        let chain = random_corpus(seed, k, 5, Some(20)).expect("corpus generation");
        types.extend(chain.into_iter().skip(1).map(|e| e.ty));
    }
    Combinatorial {
        types,
        elapsed: start.elapsed(),
    }
}

/// Shorter chains whose maps are small enough for the polynomial oracle.
fn polynomial_corpus() -> Vec<Vec<CorpusEntry>> {
    (0..50u64)
        .map(|i| {
            let k = 2 + (i % 5) as usize;
            random_corpus(1000 + i, k, 3, Some(20)).expect("corpus generation")
        })
        .collect()
}

fn traces(types: &[HomaloidalType]) -> Result<Vec<(LinkTrace, Duration)>, String> {
    types
        .iter()
        .map(|t| {
            let start = Instant::now();
            let trace = factorize(t).map_err(|e| format!("factorize({t}) failed: {e}"))?;
            Ok((trace, start.elapsed()))
        })
        .collect()
}

fn criterion_1(c: &Combinatorial) -> Outcome {
    let start = Instant::now();
    ensure!(c.types.len() >= 200, "only {} corpus types", c.types.len());
    for t in &c.types {
        ensure!(validate_homaloidal(t), "identities fail for {t}");
    }
    let total = c.elapsed + start.elapsed();
    ensure!(total < Duration::from_secs(10), "took {total:?}");
    Ok(format!("{} types, generation and validation {total:.2?}", c.types.len()))
}

fn criterion_2(c: &Combinatorial) -> Outcome {
    let mut checked = 0;
    for t in c.types.iter().filter(|t| t.n > 1) {
        let ok = noether_inequality(t).map_err(|e| e.to_string())?;
        ensure!(ok, "Noether inequality fails for {t}");
        checked += 1;
    }
    Ok(format!("{checked} types with n > 1, no counterexample"))
}

fn identity_state() -> MarkedSystem {
    MarkedSystem::from_homaloidal(&HomaloidalType::identity()).unwrap()
}

fn criterion_3(c: &Combinatorial, traces: &[(LinkTrace, Duration)]) -> Outcome {
    let mut slowest = Duration::ZERO;
    for (t, (trace, took)) in c.types.iter().zip(traces) {
        slowest = slowest.max(*took);
        ensure!(*took < Duration::from_secs(1), "factorize({t}) took {took:?}");
        let last = trace.steps.last().map_or_else(identity_state, |s| s.state_after.clone());
        ensure!(
            last.surface() == Surface::P2 && last.a() == &rat(1, 3) && last.cluster().is_empty(),
            "trace of {t} ends at {}",
            last.summary()
        );
        let mut prev = MarkedSystem::from_homaloidal(t).unwrap().sarkisov_degree();
        for step in &trace.steps {
            ensure!(step.degree < prev, "degree {} -> {} in trace of {t}", prev, step.degree);
            prev = step.degree.clone();
        }
        let back = recompose(trace).map_err(|e| format!("recompose({t}): {e}"))?;
        ensure!(&back == t, "recompose({t}) gave {back}");
    }
    let q = factorize(&"2;1,1,1".parse().unwrap()).map_err(|e| e.to_string())?;
    ensure!(
        q.link_names() == ["A", "B", "B", "AInv"],
        "(2;1,1,1) gave {:?}",
        q.link_names()
    );
    Ok(format!("{} traces, slowest {slowest:.2?}, (2;1,1,1) -> A B B AInv", traces.len()))
}

fn criterion_4(traces: &[(LinkTrace, Duration)]) -> Outcome {
    let mut links = 0;
    for (trace, _) in traces {
        for step in &trace.steps {
            let (sq, lin) = step.state_after.identity_residuals();
            ensure!(
                sq.is_zero() && lin.is_zero(),
                "identities off by ({sq}, {lin}) after {} at {}",
                step.link.name(),
                step.state_after.summary()
            );
            links += 1;
        }
    }
    Ok(format!("{links} links, zero violations"))
}

fn criterion_5(traces: &[(LinkTrace, Duration)]) -> Outcome {
    let mut checks = 0;
    for (trace, _) in traces {
        for step in &trace.steps {
            if !matches!(step.link, Link::AInv { .. } | Link::C) {
                continue;
            }
            let s = &step.state_before;
            let n = s.surface().twist().expect("ruled surface");
            ensure!(n <= 1, "contraction or swap on F{n}");
            let two_minus_n = Rational::from_integer((2 - i64::from(n)).into());
            let s_dot_h = &two_minus_n * s.a() + s.b();
            ensure!(
                !s_dot_h.is_negative() && s_dot_h < &two_minus_n * s.a(),
                "index bound fails at {}",
                s.summary()
            );
            checks += 1;
        }
    }
    Ok(format!("{checks} checks of 0 <= s.H < (2 - N) a, all hold"))
}

fn criterion_6(corpus: &[Vec<CorpusEntry>]) -> Outcome {
    let start = Instant::now();
    let mut maps = 0;
    for chain in corpus {
        let e = chain.last().unwrap();
        ensure!(e.map.degree() <= 20, "degree {} above 20", e.map.degree());
        let t = homaloidal_type_of(&e.map).map_err(|err| format!("{}: {err}", e.ty))?;
        ensure!(
            t.n == e.ty.n && t.multiplicity_profile() == e.ty.multiplicity_profile(),
            "extracted {t}, tracked {}",
            e.ty
        );
        let factors = factor_by_quadratics(&e.map).map_err(|err| format!("{}: {err}", e.ty))?;
        let linear = residual_linear(&e.map, &factors).map_err(|err| err.to_string())?;
        ensure!(linear.is_some(), "factors of {} do not compose to a linear map", e.ty);
        maps += 1;
    }
    let took = start.elapsed();
    ensure!(maps >= 50, "only {maps} maps");
    ensure!(took < Duration::from_secs(60), "took {took:?}");
    Ok(format!("{maps} maps up to degree 20, {took:.2?}"))
}

fn criterion_7(corpus: &[Vec<CorpusEntry>]) -> Outcome {
    let mut steps = 0;
    let mut cross_checked = 0;
    for chain in corpus {
        for w in chain.windows(2) {
            let (prev, next) = (&w[0], &w[1]);
            let centers = next.centers.clone().expect("steps record their centers");
            let mut fresh = 0;
            let cs: [Center; 3] = std::array::from_fn(|i| {
                match prev.points.iter().find(|(_, p)| same_point(p, &centers[i])) {
                    Some((id, _)) => Center::Point(id.clone()),
                    None => {
                        fresh += 1;
                        Center::Fresh(FreshPoint::general(format!("new{fresh}")))
                    }
                }
            });
            let predicted = compose_quadratic(&prev.ty, &cs).map_err(|e| e.to_string())?;
            let poly = compose_with_quadratic(&prev.map, &centers).map_err(|e| e.to_string())?;
            // The general composition with gcd removal must agree with the
            // structured one where it is affordable.
            if prev.map.degree() <= 6 {
                let q = quadratic_from_points(&centers[0], &centers[1], &centers[2])
                    .map_err(|e| e.to_string())?;
                let general = compose(&prev.map, &q).map_err(|e| e.to_string())?;
                ensure!(general == poly, "general and structured composition differ");
                cross_checked += 1;
            }
            ensure!(
                poly.degree() == predicted.n,
                "degree {} but predicted {}",
                poly.degree(),
                predicted.n
            );
            let t = homaloidal_type_of(&poly).map_err(|e| format!("{predicted}: {e}"))?;
            ensure!(
                t.multiplicity_profile() == predicted.multiplicity_profile(),
                "multiplicities {:?} but predicted {:?}",
                t.multiplicity_profile(),
                predicted.multiplicity_profile()
            );
            steps += 1;
        }
    }
    Ok(format!(
        "{steps} steps agree, {cross_checked} also checked against general composition"
    ))
}

fn criterion_8(traces: &[(LinkTrace, Duration)]) -> Outcome {
    let mut clusters = 0;
    let mut states = 0;
    for (trace, _) in traces {
        let mut visited = vec![];
        if let Some(first) = trace.steps.first() {
            visited.push(&first.state_before);
        }
        visited.extend(trace.steps.iter().map(|s| &s.state_after));
        for s in visited {
            let cl = s.cluster();
            if cl.multiplicities().iter().any(|&m| m > 0) {
                let (lambda, _) = cl.lambda_e();
                match cl.canonical_threshold() {
                    Threshold::Finite(c) => {
                        ensure!((lambda * c).is_one(), "lambda * c != 1 at {}", s.summary())
                    }
                    Threshold::Infinite => return Err(format!("infinite threshold at {}", s.summary())),
                }
                clusters += 1;
            }
            let iso = s.classify().map_err(|e| e.to_string())? == Classification::Isomorphism;
            ensure!(iso == s.noether_fano_certificate(), "certificate mismatch at {}", s.summary());
            states += 1;
        }
    }
    Ok(format!("{clusters} clusters with lambda * c = 1, {states} states with matching certificate"))
}

fn criterion_9() -> Outcome {
    // n, curves (deg, mult), points, infinitely near (curve mult, point mult),
    // then the expected verdicts for curves, points and infinitely near curves.
    type Row = (u64, Vec<(u64, i64)>, Vec<i64>, Vec<(i64, i64)>, Vec<bool>, Vec<bool>, Vec<bool>);
    let table: Vec<Row> = vec![
        (
            4,
            vec![(15, 2), (16, 2), (1, 1)],
            vec![3, 2],
            vec![(2, 2), (2, 1)],
            vec![true, false, false],
            vec![true, false],
            vec![true, false],
        ),
        (8, vec![(3, 3), (15, 2)], vec![5, 4], vec![(3, 3)], vec![true, false], vec![true, false], vec![true]),
        (12, vec![(14, 4), (2, 3)], vec![7, 6], vec![], vec![true, false], vec![true, false], vec![]),
        (2, vec![(1, 1)], vec![1], vec![], vec![true], vec![false], vec![]),
    ];
    for (n, curves, points, near, want_c, want_p, want_near) in table {
        let d = Fano3Data::new(
            n,
            4,
            1,
            curves.iter().map(|(deg, m)| (*deg, int(*m))).collect(),
            points.iter().map(|m| int(*m)).collect(),
            near.iter().map(|(c, p)| (int(*c), int(*p))).collect(),
        )
        .map_err(|e| e.to_string())?;
        let r = fano3_classify(&d);
        let nq = Rational::from_integer(n.into());
        ensure!(r.curve_threshold == &nq / int(4), "curve threshold {} for n = {n}", r.curve_threshold);
        ensure!(r.point_threshold == &nq / int(2), "point threshold {} for n = {n}", r.point_threshold);
        ensure!(r.curve_degree_bound == 16, "degree bound {}", r.curve_degree_bound);
        let got_c: Vec<bool> = r.curves.iter().map(|c| c.open).collect();
        let got_p: Vec<bool> = r.points.iter().map(|p| p.open).collect();
        ensure!(got_c == want_c, "n = {n}: curve verdicts {got_c:?}");
        ensure!(got_p == want_p, "n = {n}: point verdicts {got_p:?}");
        let got_near: Vec<bool> = r.infinitely_near.iter().map(|c| c.open).collect();
        ensure!(got_near == want_near, "n = {n}: infinitely near verdicts {got_near:?}");
    }
    Ok("thresholds n/4, n/2 and degree bound 16 on 4 inputs".into())
}

fn criterion_10() -> Outcome {
    let render = || -> Result<String, String> {
        let mut out = String::new();
        for seed in [3u64, 17, 99] {
            for e in random_corpus(seed, 6, 4, Some(16)).map_err(|e| e.to_string())? {
                out += &serde_json::to_string(&e.to_json()).unwrap();
                out.push('\n');
                let trace = factorize(&e.ty).map_err(|e| e.to_string())?;
                out += &serde_json::to_string(&trace.to_json()).unwrap();
                out.push('\n');
            }
        }
        Ok(out)
    };
    let a = render()?;
    let b = render()?;
    ensure!(a == b, "outputs differ between runs");
    Ok(format!("{} bytes identical across two runs", a.len()))
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    let took = start.elapsed();
    match result {
        Ok(detail) => {
            println!("PASS {name}: {detail} [{took:.2?}]");
            true
        }
        Err(detail) => {
            println!("FAIL {name}: {detail} [{took:.2?}]");
            false
        }
    }
}

fn main() {
    let comb = combinatorial_corpus();
    let traced = traces(&comb.types);
    let poly = polynomial_corpus();
    let traced_ref = || traced.as_ref().map_err(Clone::clone);
    let results = [
        run("criterion 1, homaloidal identities", || criterion_1(&comb)),
        run("criterion 2, Noether inequality", || criterion_2(&comb)),
        run("criterion 3, factorization", || criterion_3(&comb, traced_ref()?)),
        run("criterion 4, conservation laws", || criterion_4(traced_ref()?)),
        run("criterion 5, index bound", || criterion_5(traced_ref()?)),
        run("criterion 6, polynomial oracle", || criterion_6(&poly)),
        run("criterion 7, quadratic action", || criterion_7(&poly)),
        run("criterion 8, reciprocity and certificate", || criterion_8(traced_ref()?)),
        run("criterion 9, Fano thresholds", criterion_9),
        run("criterion 10, determinism", criterion_10),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
