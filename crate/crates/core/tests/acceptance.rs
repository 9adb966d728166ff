//! Acceptance run: one PASS/FAIL line per criterion, with its limits.
//!
//! Exits 0 after printing unless `ACCEPTANCE_STRICT=1`, in which case any
//! FAIL exits 1. Pipeline errors always abort with a panic.

use std::time::{Duration, Instant};

use num_bigint::BigUint;

use dnftaut::bounds::{density_bound, density_feasible};
use dnftaut::oracle::{exists_bruteforce, OracleOptions};
use dnftaut::sat::{solve_embedded, Budget, Heuristic, Restarts, SolverConfig, Status};
use dnftaut::search::{exact_k, max_k, solve_instance, SearchConfig};
use dnftaut::table::{
    reference, reproduce_table, TableKind, TableOptions, Tier, Verdict, FIRST_TABLE, SECOND_TABLE,
};
use dnftaut::{build_instance, Dnf, EncodeOptions, GroupKind, GroupSpec, Instance};

struct Run {
    failures: usize,
    witnesses: Vec<(Dnf, u32, u32, GroupSpec)>,
}

impl Run {
    fn report(
        &mut self,
        id: &str,
        pass: bool,
        summary: String,
        elapsed: Duration,
        limit: Duration,
    ) {
        let within = elapsed <= limit;
        let ok = pass && within;
        if !ok {
            self.failures += 1;
        }
        println!(
            "criterion {id:<3} {}  {summary}  [{:.2}s, limit {:.0}s{}]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs_f64(),
            if within { "" } else { ", exceeded" }
        );
    }

    fn keep(&mut self, w: Option<Dnf>, k: u32, u: u32, g: GroupSpec) {
        if let Some(w) = w {
            self.witnesses.push((w, k, u, g));
        }
    }
}

fn detail(s: impl AsRef<str>) {
    println!("    {}", s.as_ref());
}

fn config() -> SearchConfig {
    SearchConfig::default()
}

// C(n, k) / 2^k >= 1, by direct big-integer comparison
fn exact_length_bound(n: u32) -> u32 {
    let binom = |n: u32, k: u32| -> BigUint {
        (0..k).fold(BigUint::from(1u32), |acc, i| acc * (n - i) / (i + 1))
    };
    (0..=n)
        .filter(|&k| binom(n, k) >= BigUint::from(1u32) << k)
        .max()
        .unwrap()
}

fn c1(run: &mut Run) {
    let t = Instant::now();
    let mut bad = Vec::new();
    for n in 1..=14u32 {
        for u in 1..=n {
            let b = density_bound(n, u).unwrap();
            if b.per_k_feasible.windows(2).any(|w| !w[0] && w[1]) {
                bad.push(format!("({n},{u}) feasibility not monotone"));
            }
            if let Some(r) = reference(TableKind::Plain, n, u) {
                let ok = if r.boxed {
                    (r.k as i32) < b.k_max_bound
                } else {
                    r.k as i32 == b.k_max_bound
                };
                if !ok {
                    bad.push(format!(
                        "plain ({n},{u}) ref {} boxed={} bound {}",
                        r.k, r.boxed, b.k_max_bound
                    ));
                }
            }
            if let Some(r) = reference(TableKind::AlternatingSymmetric, n, u) {
                if r.k as i32 > b.k_max_bound {
                    bad.push(format!(
                        "A/S ({n},{u}) ref {} above bound {}",
                        r.k, b.k_max_bound
                    ));
                }
            }
        }
        let (k, open) = FIRST_TABLE[n as usize - 1];
        let b = density_bound(n, n).unwrap().k_max_bound;
        let expected = if open { b - 1 } else { b };
        if k as i32 != expected {
            bad.push(format!("first table n={n}: {k} vs bound {b}"));
        }
        let (k, open) = SECOND_TABLE[n as usize - 1];
        let eb = exact_length_bound(n);
        let window = density_feasible(n, eb, eb).unwrap()
            && (eb == n || !density_feasible(n, eb + 1, eb + 1).unwrap());
        if !window || k > eb || (open && k >= eb) {
            bad.push(format!(
                "second table n={n}: {k} vs exact-length bound {eb}"
            ));
        }
    }
    for b in &bad {
        detail(b);
    }
    run.report(
        "1",
        bad.is_empty(),
        format!(
            "density bound vs grids, 1 <= u <= n <= 14: {} mismatches",
            bad.len()
        ),
        t.elapsed(),
        Duration::from_secs(1),
    );
}

fn c2(run: &mut Run) {
    let t = Instant::now();
    let expected = [0, 1, 1, 2, 3, 4];
    let mut got = Vec::new();
    let mut ok = true;
    for n in 1..=6u32 {
        let g = GroupSpec::trivial(n);
        let r = max_k(n, n, &g, &config()).unwrap();
        let k = r.k_found;
        got.push(k);
        let refuted_above = (k.unwrap_or(0) + 1) as i32 > r.k_density_bound
            || r.status_at(k.unwrap_or(0) + 1) == Some(Status::Unsatisfiable);
        ok &= k == Some(expected[n as usize - 1]) && r.proven_optimal && refuted_above;
        run.keep(r.witness, k.unwrap_or(0), n, g);
    }
    run.report(
        "2",
        ok,
        format!("max_k(n, n) for n = 1..6: {got:?}, expected {expected:?}, all proven optimal"),
        t.elapsed(),
        Duration::from_secs(600),
    );
}

fn c3(run: &mut Run) {
    let t = Instant::now();
    let cases = [
        (4, 2, Status::Satisfiable),
        (6, 3, Status::Satisfiable),
        (7, 4, Status::Satisfiable),
        (3, 1, Status::Unsatisfiable),
        (5, 3, Status::Unsatisfiable),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, k, want) in cases {
        let g = GroupSpec::trivial(n);
        let (a, w) = exact_k(n, k, &g, &config()).unwrap();
        ok &= a.status == want;
        parts.push(format!("({n},{k})={}", a.status.short()));
        run.keep(w, k, k, g);
    }
    run.report(
        "3",
        ok,
        format!("exact lengths: {}", parts.join(" ")),
        t.elapsed(),
        Duration::from_secs(600),
    );
}

fn c4(run: &mut Run) {
    let t = Instant::now();
    let g = GroupSpec::trivial(5);
    let r = max_k(5, 3, &g, &config()).unwrap();
    let ok = r.status_at(3) == Some(Status::Unsatisfiable)
        && r.status_at(2) == Some(Status::Satisfiable)
        && r.k_found == Some(2);
    run.report(
        "4",
        ok,
        format!(
            "(5,3): k=3 {:?}, k=2 {:?}",
            r.status_at(3).map(|s| s.short()),
            r.status_at(2).map(|s| s.short())
        ),
        t.elapsed(),
        Duration::from_secs(1800),
    );
    run.keep(r.witness, 2, 3, g);
}

fn c5(run: &mut Run) {
    let t = Instant::now();
    let mut opts = TableOptions::new(6, config());
    opts.workers = std::thread::available_parallelism().map_or(1, |p| p.get());
    let cd = reproduce_table(TableKind::CyclicDihedral, &opts).unwrap();
    opts.n_max = 8;
    opts.u_max = 8;
    opts.tier = Tier::Extended;
    let asym = reproduce_table(TableKind::AlternatingSymmetric, &opts).unwrap();

    for rep in [&cd, &asym] {
        for c in &rep.cells {
            if let Some(r) = &c.result {
                let g = GroupSpec::new(c.group, c.n).unwrap();
                run.keep(r.witness.clone(), r.k_found.unwrap_or(0), c.u, g);
            }
        }
    }

    let cd_agree = cd.count(Verdict::Agree);
    let cd_total = cd.cells.len();
    let as_agree = asym.count(Verdict::Agree);
    let as_total = asym.cells.len();
    detail(format!(
        "C/D grid vs reference: {cd_agree}/{cd_total} agree"
    ));
    for line in cd.diff_report().lines() {
        detail(format!("  {line}"));
    }
    detail(format!(
        "A/S grid vs min(u-1, n/2): {as_agree}/{as_total} agree"
    ));
    if as_agree != as_total {
        for line in asym.diff_report().lines() {
            detail(format!("  {line}"));
        }
    }
    detail(format!(
        "C vs D mismatches: {}; A vs S mismatches: {}",
        cd.cross_mismatches.len(),
        asym.cross_mismatches.len()
    ));
    for rep in [&cd, &asym] {
        print!(
            "{}",
            rep.render()
                .lines()
                .map(|l| format!("      {l}\n"))
                .collect::<String>()
        );
    }

    // the same grid with symmetry-breaking clauses kept under the group
    let mut restricted = TableOptions::new(6, config());
    restricted.workers = opts.workers;
    restricted.config.options = EncodeOptions {
        symmetry_with_group: true,
        ..EncodeOptions::default()
    };
    let cd_restricted = reproduce_table(TableKind::CyclicDihedral, &restricted).unwrap();
    for c in &cd_restricted.cells {
        if let Some(r) = &c.result {
            let g = GroupSpec::new(c.group, c.n).unwrap();
            run.keep(r.witness.clone(), r.k_found.unwrap_or(0), c.u, g);
        }
    }
    detail(format!(
        "note: with symmetry-breaking clauses kept under the group (not a valid refutation), the C/D grid agrees in {}/{} cells",
        cd_restricted.count(Verdict::Agree),
        cd_restricted.cells.len()
    ));

    let ok = cd_agree == cd_total
        && as_agree == as_total
        && cd.cross_mismatches.is_empty()
        && asym.cross_mismatches.is_empty();
    run.report(
        "5",
        ok,
        format!(
            "group grids: C/D n<=6 {cd_agree}/{cd_total}, A/S n<=8 {as_agree}/{as_total}, cross mismatches {}",
            cd.cross_mismatches.len() + asym.cross_mismatches.len()
        ),
        t.elapsed(),
        Duration::from_secs(3600),
    );
}

fn c6(run: &mut Run) {
    let t = Instant::now();
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for n in 1..=3u32 {
        for kind in GroupKind::ALL {
            let g = GroupSpec::new(kind, n).unwrap();
            for u in 1..=n {
                for k in 1..=u {
                    let (a, w) = solve_instance(n, u, k, &g, &config()).unwrap();
                    let o = exists_bruteforce(n, u, k, &g, OracleOptions::default()).unwrap();
                    checked += 1;
                    if (a.status == Status::Satisfiable) != o.exists
                        || !matches!(a.status, Status::Satisfiable | Status::Unsatisfiable)
                    {
                        mismatches.push(format!(
                            "n={n} u={u} k={k} {kind}: {} vs {}",
                            a.status.short(),
                            o.exists
                        ));
                    }
                    run.keep(w, k, u, g);
                    run.keep(o.witness, k, u, g);
                }
            }
        }
    }
    for m in &mismatches {
        detail(m);
    }
    run.report(
        "6",
        mismatches.is_empty(),
        format!(
            "pipeline vs brute force, n <= 3: {checked} instances, {} mismatches",
            mismatches.len()
        ),
        t.elapsed(),
        Duration::from_secs(300),
    );
}

fn c8(run: &mut Run) {
    let t = Instant::now();
    let mut checked = 0;
    let mut mismatches = Vec::new();
    let off = SearchConfig {
        options: EncodeOptions {
            symmetry_breaking: false,
            ..EncodeOptions::default()
        },
        ..config()
    };
    for n in 1..=4u32 {
        let g = GroupSpec::trivial(n);
        for u in 1..=n {
            for k in 1..=u {
                let (a, wa) = solve_instance(n, u, k, &g, &config()).unwrap();
                let (b, wb) = solve_instance(n, u, k, &g, &off).unwrap();
                checked += 1;
                let decided = |s: Status| matches!(s, Status::Satisfiable | Status::Unsatisfiable);
                if a.status != b.status || !decided(a.status) {
                    mismatches.push(format!(
                        "n={n} u={u} k={k}: on {} off {}",
                        a.status.short(),
                        b.status.short()
                    ));
                }
                run.keep(wa, k, u, g);
                run.keep(wb, k, u, g);
            }
        }
    }
    for m in &mismatches {
        detail(m);
    }
    run.report(
        "8",
        mismatches.is_empty(),
        format!(
            "symmetry breaking on vs off, n <= 4: {checked} instances, {} mismatches",
            mismatches.len()
        ),
        t.elapsed(),
        Duration::from_secs(1800),
    );
}

fn c7(run: &mut Run) {
    let t = Instant::now();
    let total = run.witnesses.len();
    let mut failed = Vec::new();
    for (w, k, u, g) in &run.witnesses {
        let report = w.verify(*k, *u, Some(g)).unwrap();
        // counting route, independent of the scan inside verify
        let counted = w.covered_count().unwrap() == 1u64 << w.n();
        let invariant = g
            .elements()
            .iter()
            .all(|p| w.map_cubes(|c| p.apply(c).unwrap()).unwrap() == *w);
        if !(report.passed() && counted && invariant) {
            failed.push(format!("{} k={k} u={u} {}: {report:?}", w, g.kind));
        }
    }
    for f in &failed {
        detail(f);
    }
    run.report(
        "7",
        failed.is_empty() && total > 0,
        format!(
            "witnesses from criteria 2-6 and 8: {}/{total} verified",
            total - failed.len()
        ),
        t.elapsed(),
        Duration::from_secs(300),
    );
}

fn c9(run: &mut Run) {
    let t = Instant::now();
    let enc = build_instance(10, 10, 7, &GroupSpec::trivial(10), EncodeOptions::default()).unwrap();
    let expected: u64 = (7..=10u32)
        .map(|i| {
            let c = (0..i).fold(1u64, |acc, j| acc * (10 - j as u64) / (j as u64 + 1));
            c << i
        })
        .sum();
    let got = enc.var_map.num_cube_vars();
    run.report(
        "9",
        got as u64 == 33024 && expected == 33024 && matches!(enc.instance, Instance::Cnf(_)),
        format!("(10,10,7) cube variables: {got} (sum formula {expected}); not solved"),
        t.elapsed(),
        Duration::from_secs(10),
    );
}

fn c10(run: &mut Run) {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, u, k, kind, sym) in [
        (5, 5, 3, GroupKind::Trivial, true),
        (6, 4, 3, GroupKind::Trivial, false),
        (6, 6, 4, GroupKind::Cyclic, false),
        (7, 4, 2, GroupKind::Symmetric, false),
    ] {
        let g = GroupSpec::new(kind, n).unwrap();
        let opts = EncodeOptions {
            symmetry_breaking: sym,
            ..EncodeOptions::default()
        };
        let a = build_instance(n, u, k, &g, opts).unwrap().to_dimacs();
        let b = build_instance(n, u, k, &g, opts).unwrap().to_dimacs();
        ok &= a == b;
        parts.push(format!("({n},{u},{k},{kind}) {} bytes", a.len()));
    }
    let enc = build_instance(5, 5, 3, &GroupSpec::trivial(5), EncodeOptions::default()).unwrap();
    let Instance::Cnf(f) = &enc.instance else {
        unreachable!()
    };
    for cfg in [
        SolverConfig::default(),
        SolverConfig {
            heuristic: Heuristic::Vsids,
            seed: 42,
            restarts: Restarts::Luby(50),
        },
        SolverConfig::lowest_index(),
    ] {
        let budget = Budget {
            time: None,
            conflicts: Some(200_000),
        };
        let x = solve_embedded(f, &budget, &cfg);
        let y = solve_embedded(f, &budget, &cfg);
        let same =
            x.status == y.status && x.model == y.model && x.stats.counters() == y.stats.counters();
        ok &= same;
        parts.push(format!(
            "{:?}/{:?}/seed {}: {} {:?} identical={same}",
            cfg.heuristic,
            cfg.restarts,
            cfg.seed,
            x.status.short(),
            x.stats.counters()
        ));
    }
    for p in &parts {
        detail(p);
    }
    run.report(
        "10",
        ok,
        "identical DIMACS and identical solver outcomes and counters on repeat".into(),
        t.elapsed(),
        Duration::from_secs(300),
    );
}

fn main() {
    let started = Instant::now();
    let mut run = Run {
        failures: 0,
        witnesses: Vec::new(),
    };
    c1(&mut run);
    c2(&mut run);
    c3(&mut run);
    c4(&mut run);
    c5(&mut run);
    c6(&mut run);
    c8(&mut run);
    c7(&mut run);
    c9(&mut run);
    c10(&mut run);
    println!(
        "acceptance: {} of 10 criteria failed ({:.1}s)",
        run.failures,
        started.elapsed().as_secs_f64()
    );
    if run.failures > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
