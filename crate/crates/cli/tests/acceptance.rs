// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

//! One pass/fail line per acceptance criterion. Exits non-zero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use basm::checks::{behaviorally_equivalent, cache_law_violations, check_bounded_exploration, check_iso_all};
use basm::corpus::{self, liar_rate, Overrides, ENTRIES};
use basm::geometry::{Circle, Point};
use basm::oracles::SplitMix64;
use basm::{replay, run, Bijection, Location, OraclePolicy, Outcome, Program, State, Trace, UpdateSet, Value};
use num_rational::Ratio;

const EUCLID_PAIRS: usize = 200;
const EUCLID_MAX: i64 = 10_000;
const EUCLID_BUDGET: Duration = Duration::from_secs(1);

const TANGENT_CONFIGS: usize = 100;
const TANGENT_TOL: f64 = 1e-6;
const TANGENT_BUDGET: Duration = Duration::from_secs(1);

const PRIMALITY_RUNS: u64 = 10_000;
const PRIMALITY_TOL: f64 = 0.02;
const PRIMALITY_BUDGET: Duration = Duration::from_secs(10);

const REPLAY_TRACES: usize = 100;
const BEXP_TRIALS: u64 = 1000;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn within(budget: Duration, start: Instant) -> Result<Duration, String> {
    let spent = start.elapsed();
    if spent < budget {
        Ok(spent)
    } else {
        Err(format!("took {spent:?}, budget {budget:?}"))
    }
}

fn euclid() -> Verdict {
    let start = Instant::now();
    let t = corpus::corpus_run("euclid", &Overrides::new().set("a", 12).set("b", 8)).map_err(|e| e.to_string())?;
    if t.outcome != Outcome::Halted || t.final_var("d") != Value::Int(4) || t.steps.len() != 3 {
        return Err(format!("a=12 b=8 gave d={} after {} steps", t.final_var("d"), t.steps.len()));
    }
    let mut rng = SplitMix64::new(2026);
    for _ in 0..EUCLID_PAIRS {
        let a = rng.next_in_range(1, EUCLID_MAX);
        let b = rng.next_in_range(1, EUCLID_MAX);
        let t = corpus::corpus_run("euclid", &Overrides::new().set("a", a).set("b", b)).map_err(|e| e.to_string())?;
        if t.final_var("d") != Value::Int(gcd(a, b)) {
            return Err(format!("gcd({a}, {b}) disagrees: {}", t.final_var("d")));
        }
    }
    let spent = within(EUCLID_BUDGET, start)?;
    Ok(format!("d=4 in 3 steps, {EUCLID_PAIRS}/{EUCLID_PAIRS} pairs agree, {spent:?}"))
}

/// The two tangent points from `q` to the circle of radius `r` about `p`,
/// from the right triangle with legs `r` and the tangent length.
fn tangent_points(p: Point, r: f64, q: Point) -> [Point; 2] {
    let (dx, dy) = (q.x - p.x, q.y - p.y);
    let d = dx.hypot(dy);
    let base = dy.atan2(dx);
    let alpha = (r / d).acos();
    [base - alpha, base + alpha].map(|t| Point::new(p.x + r * t.cos(), p.y + r * t.sin()))
}

fn dist_to_line(x: Point, a: Point, b: Point) -> f64 {
    let (ux, uy) = (b.x - a.x, b.y - a.y);
    (ux * (x.y - a.y) - uy * (x.x - a.x)).abs() / ux.hypot(uy)
}

fn check_tangent(p: Point, c: Circle, q: Point) -> Result<(), String> {
    let r = c.radius();
    let m = Point::new((p.x + q.x) / 2.0, (p.y + q.y) / 2.0);
    let expected = tangent_points(p, r, q);
    let mut hit = [false; 2];
    for choice in [0, 1] {
        let o = Overrides::new()
            .set("p", p)
            .set("C", c)
            .set("q", q)
            .choice(choice);
        let t = corpus::corpus_run("tangent", &o).map_err(|e| e.to_string())?;
        if t.outcome != Outcome::Halted {
            return Err(format!("choice {choice}: {}", t.outcome.label()));
        }
        let s = t.final_var("s").as_point().ok_or("s is not a point")?;
        let line = t.final_var("T").as_line().ok_or("T is not a line")?;
        let gap = (dist_to_line(p, line.p1, line.p2) - r).abs();
        if gap >= TANGENT_TOL {
            return Err(format!("choice {choice}: |dist(p, T) - r| = {gap:e}"));
        }
        let on_c = (s.dist(p) - r).abs() < TANGENT_TOL;
        let on_d = (s.dist(m) - m.dist(q)).abs() < TANGENT_TOL;
        if !(on_c && on_d) {
            return Err(format!("choice {choice}: s = {s:?} is off C or D"));
        }
        match expected.iter().position(|e| e.dist(s) < TANGENT_TOL) {
            Some(i) => hit[i] = true,
            None => return Err(format!("choice {choice}: s = {s:?} is not a tangent point")),
        }
    }
    if hit != [true, true] {
        return Err("both choices picked the same point".into());
    }
    Ok(())
}

fn tangent() -> Verdict {
    let start = Instant::now();
    let p = Point::new(0.0, 0.0);
    let c = Circle::new(p, Point::new(5.0, 0.0)).map_err(|e| e.to_string())?;
    check_tangent(p, c, Point::new(10.0, 0.0)).map_err(|e| format!("fixed configuration: {e}"))?;
    let mut rng = SplitMix64::new(11);
    for i in 0..TANGENT_CONFIGS {
        let (p, c, q) = corpus::sample_tangent_config(&mut rng);
        check_tangent(p, c, q).map_err(|e| format!("configuration {i}: {e}"))?;
    }
    let spent = within(TANGENT_BUDGET, start)?;
    Ok(format!("fixed configuration and {TANGENT_CONFIGS} random ones, both choices, {spent:?}"))
}

fn enumerated_liar_rate(n: i64) -> Ratio<i64> {
    let liars = (2..=n - 2)
        .filter(|&a| (0..n - 1).fold(1i64, |x, _| x * a % n) == 1)
        .count() as i64;
    Ratio::new(liars, n - 3)
}

struct Fermat {
    program: Program,
    init: State,
}

impl Fermat {
    fn new() -> Result<Fermat, String> {
        let entry = corpus::entry("primality").map_err(|e| e.to_string())?;
        let program = entry.parse_program().map_err(|e| e.to_string())?;
        let init = entry.init_state(&program, entry.default_init).map_err(|e| e.to_string())?;
        Ok(Fermat { program, init })
    }

    fn says_prime(&self, n: i64, k: i64, seed: u64) -> Result<bool, String> {
        let inputs: UpdateSet = [(Location::var("n"), Value::Int(n)), (Location::var("k"), Value::Int(k))]
            .into_iter()
            .collect();
        let init = self.init.apply_updates(&inputs).map_err(|e| e.to_string())?;
        let t = run(&self.program, &init, OraclePolicy::UniformRandom { seed }, 1000);
        if t.outcome != Outcome::Halted {
            return Err(format!("n={n} k={k} seed={seed}: {}", t.outcome.label()));
        }
        t.final_var("prime").as_bool().ok_or_else(|| "prime is not boolean".into())
    }
}

fn primality() -> Verdict {
    let start = Instant::now();
    let rate = liar_rate(15).map_err(|e| e.to_string())?;
    if rate != Ratio::new(1, 6) || rate != enumerated_liar_rate(15) {
        return Err(format!("liar_rate(15) = {rate}"));
    }
    let fermat = Fermat::new()?;
    let mut rates = Vec::new();
    for k in 1..=3i64 {
        let mut fooled = 0u64;
        for seed in 0..PRIMALITY_RUNS {
            if fermat.says_prime(15, k, seed)? {
                fooled += 1;
            }
        }
        let observed = fooled as f64 / PRIMALITY_RUNS as f64;
        let expected = (1.0f64 / 6.0).powi(k as i32);
        if (observed - expected).abs() > PRIMALITY_TOL {
            return Err(format!("k={k}: false-positive rate {observed:.4}, expected {expected:.4}"));
        }
        rates.push(format!("k={k} {observed:.4}"));
    }
    let primes: Vec<i64> = (2..=200).filter(|&n| (2..n).all(|d| n % d != 0)).collect();
    if primes.len() != 46 {
        return Err(format!("{} primes below 200", primes.len()));
    }
    for &n in &primes {
        if !fermat.says_prime(n, 3, n as u64)? {
            return Err(format!("{n} reported composite"));
        }
    }
    let spent = within(PRIMALITY_BUDGET, start)?;
    Ok(format!("liar_rate(15) = 1/6, {}, 46 primes accepted, {spent:?}", rates.join(", ")))
}

fn properties() -> Verdict {
    let mut rng = SplitMix64::new(404);
    let mut replayed = 0;
    for i in 0..REPLAY_TRACES {
        let entry = &ENTRIES[i % ENTRIES.len()];
        let program = entry.parse_program().map_err(|e| e.to_string())?;
        let init = entry.sample_init(&program, &mut rng);
        let t = run(&program, &init, OraclePolicy::UniformRandom { seed: rng.next_u64() }, 10_000);
        let back = Trace::from_jsonl(&t.to_jsonl()).map_err(|e| e.to_string())?;
        if replay(&back, &program).map_err(|e| e.to_string())? {
            replayed += 1;
        }
    }
    if replayed != REPLAY_TRACES {
        return Err(format!("replay {replayed}/{REPLAY_TRACES}"));
    }

    let mut goldens = 0;
    for entry in ENTRIES {
        for g in entry.goldens {
            let t = Trace::from_jsonl(g.file.text).map_err(|e| e.to_string())?;
            let bad = cache_law_violations(&t);
            if !bad.is_empty() {
                return Err(format!("{}/{}: repeated query in steps {bad:?}", entry.name, g.file.name));
            }
            goldens += 1;
        }
    }

    for entry in ENTRIES {
        let program = entry.parse_program().map_err(|e| e.to_string())?;
        let sampler = |rng: &mut SplitMix64| corpus::sample_reachable(entry, &program, rng);
        let r = check_bounded_exploration(&program, &sampler, BEXP_TRIALS, 1);
        if !r.passed() || r.trials != BEXP_TRIALS {
            return Err(format!("bexp on {}: {:?}", entry.name, r.failures));
        }
    }

    let entry = corpus::entry("enum-graph").map_err(|e| e.to_string())?;
    let program = entry.parse_program().map_err(|e| e.to_string())?;
    let bijections = Bijection::all(program.vocab()).len();
    if bijections != 2 {
        return Err(format!("{bijections} bijections of the enum universe"));
    }
    for init in entry.inits {
        let state = entry.init_state(&program, init.name).map_err(|e| e.to_string())?;
        let r = check_iso_all(&program, &state, OraclePolicy::Builtin).map_err(|e| e.to_string())?;
        if !r.passed() {
            return Err(format!("iso on {}: {:?}", init.name, r.failures));
        }
    }
    Ok(format!(
        "replay {replayed}/{REPLAY_TRACES}, cache law on {goldens} goldens, bexp {BEXP_TRIALS} trials x {} programs, iso 2/2",
        ENTRIES.len()
    ))
}

fn negative_controls() -> Verdict {
    let run = |name: &str, o: Overrides| corpus::corpus_run(name, &o).map_err(|e| e.to_string());
    let until = run("euclid", Overrides::new())?;
    let while_ = run("euclid-while", Overrides::new())?;
    if behaviorally_equivalent(&until, &while_).map_err(|e| e.to_string())? {
        return Err("do-until and while Euclid reported equivalent".into());
    }
    let t0 = run("tangent", Overrides::new().choice(0))?;
    let t1 = run("tangent", Overrides::new().choice(1))?;
    if behaviorally_equivalent(&t0, &t1).map_err(|e| e.to_string())? {
        return Err("tangent choices reported equivalent".into());
    }
    if !behaviorally_equivalent(&t0, &t0).map_err(|e| e.to_string())? {
        return Err("a trace is not equivalent to itself".into());
    }
    Ok(format!(
        "euclid {} vs {} steps not equivalent, tangent choices not equivalent",
        until.steps.len(),
        while_.steps.len()
    ))
}

fn artifact_determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut bytes = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("run{i}.jsonl"));
        let status = Command::new(env!("CARGO_BIN_EXE_basm"))
            .args(["run", "--program", "primality", "--init", "init/n15k3.state"])
            .args(["--policy", "uniform", "--seed", "42", "--trace"])
            .arg(&path)
            .env_remove("ASM_MAX_STEPS")
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("run {i} exited with {status}"));
        }
        bytes.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    if bytes[0] != bytes[1] {
        return Err("trace files differ".into());
    }
    Ok(format!("two seeded runs wrote identical {}-byte traces", bytes[0].len()))
}

fn main() {
    let criteria: [Criterion; 6] = [
        ("euclid", euclid),
        ("tangent", tangent),
        ("primality", primality),
        ("properties", properties),
        ("equivalence negatives", negative_controls),
        ("artifact determinism", artifact_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
