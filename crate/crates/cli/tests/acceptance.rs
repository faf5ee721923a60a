//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always show.

use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lietp_core::catalog::{catalog, random_connected_poset};
use lietp_core::golden::two_chain_report;
use lietp_core::halfder::{phi_sigma, phi_sigma_diagonal_along};
use lietp_core::oracle::{extreme_pairs_by_cycles, pair_classes_by_cycles};
use lietp_core::poset::{extreme_pairs, pair_classes, random_walk};
use lietp_core::rational::is_zero_or_one;
use lietp_core::tpstruct::MuFamily;
use lietp_core::{
    decompose_tp, half_derivation_dimension, lambda_structure, mutational, normalize_nu, poisson_type,
    predicted_dimension, verify_tp, Poset, RandomTpConfig, SigmaMap, TPDecomposition, Q, DEFAULT_ORACLE_CAP,
};

const CASES: u64 = 500;
const CYCLE_CAP: usize = 1_000_000;

struct Outcome {
    passed: bool,
    detail: String,
}

fn ok(detail: impl Into<String>) -> Outcome {
    Outcome {
        passed: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        passed: false,
        detail: detail.into(),
    }
}

fn within(o: Outcome, elapsed: Duration, limit: Duration) -> Outcome {
    if o.passed && elapsed >= limit {
        fail(format!("{}; took {:.2?}, limit {:.0?}", o.detail, elapsed, limit))
    } else {
        o
    }
}

fn golden_examples() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_lietp"))
        .arg("examples")
        .output()
        .expect("spawn lietp");
    let text = String::from_utf8_lossy(&out.stdout);
    let checks = text.lines().filter(|l| l.starts_with("  ok") || l.starts_with("  FAIL")).count();
    if let Some(bad) = text.lines().find(|l| l.contains("FAIL")) {
        return fail(bad.trim().to_string());
    }
    if !out.status.success() || !text.ends_with("result: PASS\n") {
        return fail(format!("exit status {:?}", out.status.code()));
    }
    ok(format!("{checks} exact comparisons"))
}

fn two_chain_example() -> Outcome {
    let r = two_chain_report();
    match r.checks.iter().find(|c| !c.passed) {
        Some(c) => fail(format!("{}: {}", c.name, c.detail)),
        None => ok(format!("{} checks", r.checks.len())),
    }
}

fn dimension_law() -> Outcome {
    let mut posets = catalog(2..=5);
    let exhaustive = posets.len();
    for seed in 0..200u64 {
        posets.push(Arc::new(random_connected_poset(6 + (seed % 2) as usize, 1000 + seed)));
    }
    for p in &posets {
        let want = predicted_dimension(p);
        match half_derivation_dimension(p, DEFAULT_ORACLE_CAP) {
            Ok(d) if d == want => {}
            Ok(d) => return fail(format!("oracle {d} vs law {want} on\n{}", p.to_text())),
            Err(e) => return fail(e.to_string()),
        }
    }
    ok(format!("{exhaustive} catalog + 200 random posets"))
}

/// Catalog posets on 2..=5 elements, reused by the random-structure criteria.
fn tp_cases() -> Vec<(Arc<Poset>, u64, TPDecomposition)> {
    let posets = catalog(2..=5);
    (0..CASES)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = posets[rng.gen_range(0..posets.len())].clone();
            let cfg = RandomTpConfig {
                family: Some(if seed % 2 == 0 { MuFamily::RankOne } else { MuFamily::ZeroRowSum }),
                u0: rng.gen_range(0..p.len()),
                ..RandomTpConfig::default()
            };
            let d = lietp_core::random_tp_params(&p, seed, cfg);
            (p, seed, d)
        })
        .collect()
}

fn constructor_soundness(cases: &[(Arc<Poset>, u64, TPDecomposition)]) -> Outcome {
    for (p, seed, d) in cases {
        let poisson = match poisson_type(p, &d.mu) {
            Ok(t) => t,
            Err(e) => return fail(format!("seed {seed}: {e}")),
        };
        let parts = [
            ("poisson", poisson),
            ("mutational", mutational(&d.nu)),
            ("lambda", lambda_structure(p, &d.lambda, d.u0).unwrap()),
            ("sum", d.reconstruct()),
        ];
        for (name, prod) in &parts {
            let r = verify_tp(prod);
            if !r.passed() {
                return fail(format!("seed {seed}: {name} fails: {:?}", r.witness));
            }
        }
    }
    ok(format!("{} cases x 4 products", cases.len()))
}

fn round_trip(cases: &[(Arc<Poset>, u64, TPDecomposition)]) -> Outcome {
    for (p, seed, d) in cases {
        let prod = d.reconstruct();
        match decompose_tp(&prod, d.u0) {
            Ok(back) if back == *d => {}
            Ok(_) => return fail(format!("seed {seed}: parameters differ")),
            Err(e) => return fail(format!("seed {seed}: {e}")),
        }
        let u1 = (d.u0 + 1) % p.len();
        match decompose_tp(&prod, u1) {
            Ok(other) if other.reconstruct() == prod => {}
            Ok(_) => return fail(format!("seed {seed}: u0 = {u1} reconstructs a different table")),
            Err(e) => return fail(format!("seed {seed}, u0 = {u1}: {e}")),
        }
    }
    ok(format!("{} cases, two base points each", cases.len()))
}

fn combinatorics() -> Outcome {
    let mut posets = catalog(2..=7);
    let exhaustive = posets.len();
    for seed in 0..300u64 {
        posets.push(Arc::new(random_connected_poset(8 + (seed % 2) as usize, 5000 + seed)));
    }
    for p in &posets {
        let ext = match extreme_pairs_by_cycles(p, CYCLE_CAP) {
            Ok(e) => e,
            Err(e) => return fail(e.to_string()),
        };
        if ext != extreme_pairs(p) {
            return fail(format!("extreme pairs differ on\n{}", p.to_text()));
        }
        if pair_classes_by_cycles(p, CYCLE_CAP).unwrap() != pair_classes(p) {
            return fail(format!("pair classes differ on\n{}", p.to_text()));
        }
    }
    ok(format!("{exhaustive} catalog (2..=7) + 300 random (8..=9)"))
}

fn walk_independence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..200 {
        let n = rng.gen_range(4..=7);
        let p = Arc::new(random_connected_poset(n, 9000 + case));
        let k = pair_classes(&p).len();
        let sigma = SigmaMap::new(
            &p,
            (0..k).map(|_| Q::new(rng.gen_range(-5..=5).into(), rng.gen_range(1..=3).into())).collect(),
        );
        let u0 = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        let reference = phi_sigma(&sigma, u0).unwrap();
        let want: Vec<Q> = (0..n).map(|x| reference.image(x, x).unwrap().coeff(v, v)).collect();
        for _ in 0..5 {
            let w = random_walk(&p, u0, v, 12, &mut rng);
            let got: Vec<Q> = (0..n)
                .map(|x| phi_sigma_diagonal_along(&sigma, &w, x).unwrap())
                .collect();
            if got != want {
                return fail(format!("case {case}: walk {} disagrees", w.display(&p)));
            }
        }
    }
    ok("200 sigma, 5 walks each")
}

fn normalization(cases: &[(Arc<Poset>, u64, TPDecomposition)]) -> Outcome {
    let mut count = 0;
    for (_, seed, d) in cases.iter().filter(|(_, _, d)| !d.nu.is_zero()) {
        count += 1;
        let (n, phi) = normalize_nu(d);
        if !n.nu.values().iter().all(|(_, v)| is_zero_or_one(v)) {
            return fail(format!("seed {seed}: nu not in {{0,1}}"));
        }
        if n.mu != d.mu || n.lambda != d.lambda {
            return fail(format!("seed {seed}: mu or lambda changed"));
        }
        let moved = phi.transport(&d.reconstruct());
        if moved != n.reconstruct() {
            return fail(format!("seed {seed}: transported product is not the normalized one"));
        }
        if !verify_tp(&moved).passed() {
            return fail(format!("seed {seed}: transported product fails verification"));
        }
    }
    ok(format!("{count} cases with nonzero nu"))
}

fn main() -> ExitCode {
    // libtest flags such as --nocapture are accepted and ignored
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let cases = std::cell::OnceCell::new();
    let cases = || cases.get_or_init(tp_cases);
    let limit = |s: f64| Some(Duration::from_secs_f64(s));
    type Criterion<'a> = (&'a str, Option<Duration>, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("golden examples", limit(1.0), Box::new(golden_examples)),
        ("two-chains half-derivation", limit(0.1), Box::new(two_chain_example)),
        ("dimension law vs oracle", limit(120.0), Box::new(dimension_law)),
        ("constructor soundness", limit(120.0), Box::new(|| constructor_soundness(cases()))),
        ("decomposition round trip", None, Box::new(|| round_trip(cases()))),
        ("extreme pairs and classes vs cycles", None, Box::new(combinatorics)),
        ("walk formula well-defined", None, Box::new(walk_independence)),
        ("nu normalization", None, Box::new(|| normalization(cases()))),
    ];
    let mut all = true;
    for (i, (name, lim, f)) in criteria.iter().enumerate() {
        let label = format!("criterion {} {}", i + 1, name);
        if filter.as_ref().is_some_and(|f| !label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let mut o = f();
        let elapsed = start.elapsed();
        if let Some(l) = lim {
            o = within(o, elapsed, *l);
        }
        all &= o.passed;
        println!(
            "{} {label}: {} [{:.2?}]",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            elapsed
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
