//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! A few checks ask for something that cannot hold. Those are marked as
//! known failures with the reason, still run, and still print FAIL. The
//! binary exits non-zero when any other check fails, or when a known failure
//! starts to pass.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use cyclex::catalog::{build_gadget, GadgetSpec};
use cyclex::census::{brute_force_count, enumerate_two_connected, verify_characterization};
use cyclex::constructions::{
    double_count_ratio, reconstruct, transform, RatioParams, TransformParams, TransformRecord, TransformVariant,
};
use cyclex::counting::{class_count_table, entropy_check};
use cyclex::experiments::{pendant_bound_check, sample_stats, summarize, Normalizer};
use cyclex::graph::{max_degree, named, LabelledGraph};
use cyclex::minors::{circumference, has_cycle_minor, has_minor, in_class, GraphClass};
use cyclex::sampling::{mcmc_chain, rng_for, sampler_for, McmcRunner};

struct Check {
    what: String,
    ok: bool,
    /// Set when the check cannot pass; the text says why.
    known: Option<&'static str>,
}

#[derive(Default)]
struct Report {
    checks: Vec<Check>,
}

impl Report {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.checks.push(Check { what: what.into(), ok, known: None });
    }

    fn known(&mut self, ok: bool, what: impl Into<String>, why: &'static str) {
        self.checks.push(Check { what: what.into(), ok, known: Some(why) });
    }
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn census_ex_c5(r: &mut Report) {
    let want: BTreeSet<String> = ["K2m", "K2m+"].map(String::from).into();
    for n in 5..=7 {
        let start = Instant::now();
        let rep = single_threaded(|| verify_characterization(5, n, false)).unwrap();
        let took = start.elapsed();
        let list: Vec<&str> = rep.exceptions.iter().map(|e| e.graph6.as_str()).collect();
        r.check(list.is_empty(), format!("n={n} exceptions {list:?}"));
        r.check(rep.families() == want, format!("n={n} families {:?}", rep.families()));
        if n == 7 {
            r.check(took < Duration::from_secs(300), format!("n=7 single-threaded in {}", secs(took)));
        }
    }
    let rep = verify_characterization(5, 4, false).unwrap();
    let list: Vec<&str> = rep.exceptions.iter().map(|e| e.graph6.as_str()).collect();
    r.check(list == ["C~"], format!("n=4 exceptions {list:?} (K4 is C~)"));
}

fn census_ex_c6_c7(r: &mut Report) {
    let golden = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/census_exceptions.txt")).unwrap();
    let listed: BTreeSet<&str> = golden.lines().collect();
    let mut fresh = String::new();
    for k in [6, 7] {
        for n in 5..=7 {
            let rep = verify_characterization(k, n, false).unwrap();
            let members = enumerate_two_connected(n, Some(GraphClass::ExCycle(k))).unwrap().len();
            let covered = rep.matched.len() + rep.exceptions.len() == members;
            let mut unlisted = 0;
            for e in &rep.exceptions {
                let line = format!("{k} {n} {}", e.graph6);
                unlisted += usize::from(!listed.contains(line.as_str()));
                writeln!(fresh, "{line}").unwrap();
            }
            r.check(
                covered && unlisted == 0,
                format!("k={k} n={n}: {} matched, {} golden exceptions of {members}", rep.matched.len(), rep.exceptions.len()),
            );
        }
    }
    r.check(fresh == golden, "golden file reproduced byte for byte");
}

fn exact_counting(r: &mut Report) {
    let mut bad = Vec::new();
    for k in 3..=7 {
        let class = GraphClass::ExCycle(k);
        let table = class_count_table(class, 7).unwrap();
        for n in 1..=7 {
            if table.g[n] != brute_force_count(class, n).unwrap() {
                bad.push(format!("{class} n={n}"));
            }
        }
    }
    r.check(bad.is_empty(), format!("ExCycle(3..7), n <= 7 against brute force; mismatches {bad:?}"));
    for (class, n, want) in [
        (GraphClass::Forest, 3, 7u32),
        (GraphClass::Forest, 4, 38),
        (GraphClass::ExCycle(4), 4, 54),
        (GraphClass::ExCycle(5), 4, 64),
    ] {
        let got = class_count_table(class, n).unwrap().g[n].clone();
        r.check(got == BigUint::from(want), format!("g_{n}({class}) = {got}"));
    }
}

fn mask_of(g: &LabelledGraph) -> u64 {
    g.edges().iter().map(|&(a, b)| 1u64 << (b * (b - 1) / 2 + a)).sum()
}

/// Edge masks of the members on four vertices, by checking every edge set.
fn members4(class: GraphClass) -> Vec<u64> {
    let pairs: Vec<(usize, usize)> = (0..4).flat_map(|b| (0..b).map(move |a| (a, b))).collect();
    (0..1u64 << pairs.len())
        .filter(|&m| {
            let edges = pairs.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &p)| p);
            in_class(&LabelledGraph::from_edges(4, edges).unwrap(), class)
        })
        .collect()
}

fn sampler_uniformity(r: &mut Report) {
    for (class, size, seed) in [(GraphClass::ExCycle(4), 54, 1), (GraphClass::Forest, 38, 2)] {
        let support = members4(class);
        let samples = 54_000u64;
        let sampler = sampler_for(class, 4).unwrap();
        let mut rng = rng_for(seed, 0);
        let mut exact: HashMap<u64, u64> = HashMap::new();
        for _ in 0..samples {
            *exact.entry(mask_of(&sampler.sample(4, &mut rng).unwrap())).or_default() += 1;
        }
        let expected = samples as f64 / support.len() as f64;
        let stat: f64 = support
            .iter()
            .map(|m| (*exact.get(m).unwrap_or(&0) as f64 - expected).powi(2) / expected)
            .sum();
        let p = 1.0 - ChiSquared::new((support.len() - 1) as f64).unwrap().cdf(stat);
        let inside = exact.keys().all(|m| support.contains(m));
        r.check(
            support.len() == size && inside && p > 0.001,
            format!("exact {class} n=4: {} members, chi-square p = {p:.3}", support.len()),
        );

        let mut runner = McmcRunner::new(class, 4);
        let mut chains: HashMap<u64, u64> = HashMap::new();
        for c in 0..samples {
            *chains.entry(mask_of(&runner.run(10_000, &mut rng_for(seed + 100, c)))).or_default() += 1;
        }
        let u = 1.0 / support.len() as f64;
        let tv = support
            .iter()
            .map(|m| (*chains.get(m).unwrap_or(&0) as f64 / samples as f64 - u).abs())
            .sum::<f64>()
            / 2.0;
        let inside = chains.keys().all(|m| support.contains(m));
        r.check(inside && tv <= 0.05, format!("mcmc {class} n=4, 10^4 steps/chain: total variation {tv:.4}"));
    }
}

fn gadgets(r: &mut Report) {
    let start = Instant::now();
    let mut bad = Vec::new();
    for rr in 3..=10 {
        for m in 1..=10 {
            if circumference(&build_gadget(&GadgetSpec::Fnm { r: rr, m }).unwrap()) != 4 {
                bad.push((rr, m));
            }
        }
    }
    r.check(bad.is_empty(), format!("circumference(Fnm(r,m)) = 4 for r in 3..=10, m in 1..=10; bad {bad:?}"));
    let twos: Vec<usize> = (1..=10)
        .map(|m| circumference(&build_gadget(&GadgetSpec::Fnm { r: 2, m }).unwrap()))
        .collect();
    r.known(
        twos.iter().all(|&c| c == 4),
        format!("circumference(Fnm(2,m)) = 4 for m in 1..=10; got {twos:?}"),
        "Fnm(2,m) is m triangles at a vertex, since K+_{2,1} is a triangle",
    );
    r.check(start.elapsed() < Duration::from_secs(60), format!("Fnm suite in {}", secs(start.elapsed())));

    let start = Instant::now();
    let mut bad = Vec::new();
    for l in 2..=4 {
        for s in 10..=200 {
            let c = circumference(&build_gadget(&GadgetSpec::Hierarchical { s, l, sizes: None }).unwrap());
            if c > 2 * l {
                bad.push((s, l, c));
            }
        }
    }
    let took = start.elapsed();
    r.check(bad.is_empty() && took < Duration::from_secs(60), format!("Hierarchical(s,l) <= 2l in {}; bad {bad:?}", secs(took)));

    let start = Instant::now();
    let bad: Vec<usize> = (2..=100)
        .filter(|&s| circumference(&build_gadget(&GadgetSpec::StarMatching { s }).unwrap()) != 3)
        .collect();
    let took = start.elapsed();
    r.check(bad.is_empty() && took < Duration::from_secs(60), format!("StarMatching(s) = 3 in {}; bad {bad:?}", secs(took)));
}

const N: usize = 500;
const RUNS: u64 = 100;

/// Random members at n = 500: exact samples, or states of ten MCMC chains
/// where no exact sampler reaches that far.
fn base_graphs(class: GraphClass) -> Vec<LabelledGraph> {
    match class {
        GraphClass::Outerplanar | GraphClass::ExCycle(7) => {
            let chains: Vec<LabelledGraph> =
                (0..10).map(|i| mcmc_chain(class, N, 20_000, &mut rng_for(500 + i, 7))).collect();
            (0..RUNS as usize).map(|i| chains[i % 10].clone()).collect()
        }
        _ => {
            let sampler = sampler_for(class, N).unwrap();
            (0..RUNS).map(|i| sampler.sample(N, &mut rng_for(500 + i, 7)).unwrap()).collect()
        }
    }
}

fn round_trip_ok(rec: &TransformRecord, g: &LabelledGraph, variant: TransformVariant) -> bool {
    let h = &rec.result;
    let argmax_ok = !variant.is_lower() || max_degree(h).unwrap().1 == [rec.v1];
    h.n() == g.n() && in_class(h, variant.class()) && argmax_ok && reconstruct(rec).as_ref() == Ok(g)
}

/// Ex(C5) member whose vertex 0 carries `K_{2,t}` blocks (the first with
/// `t >= 16`, past the threshold at n = 500), a triangle and a few pendants.
fn hub_graph<R: Rng>(base: &LabelledGraph, rng: &mut R) -> LabelledGraph {
    let mut edges = Vec::new();
    let mut next = 1;
    let mut ts = vec![rng.gen_range(16..=40)];
    ts.extend((0..rng.gen_range(0..=2)).map(|_| rng.gen_range(3..=30)));
    for t in ts {
        let z0 = next;
        for m in z0 + 1..=z0 + t {
            edges.extend([(0, m), (z0, m)]);
        }
        if rng.gen_bool(0.3) {
            edges.push((0, z0));
        }
        next = z0 + t + 1;
    }
    edges.extend([(0, next), (0, next + 1), (next, next + 1)]);
    next += 2;
    let hub = LabelledGraph::from_edges(next, edges).unwrap();
    hub.disjoint_union(&base.induced(&(0..N - next).collect::<Vec<_>>()))
}

fn transform_round_trips(r: &mut Report) {
    let mut variants = TransformVariant::ALL_BASIC.to_vec();
    variants.push(TransformVariant::LowerC2l1(3));
    for variant in variants {
        let start = Instant::now();
        let mut failures = 0;
        let mut record = |ok: bool| failures += usize::from(!ok);
        match variant {
            TransformVariant::UpperTree | TransformVariant::UpperExC4 => {
                let (class, lower) = if variant == TransformVariant::UpperTree {
                    (GraphClass::Forest, TransformVariant::LowerTree)
                } else {
                    (GraphClass::ExCycle(4), TransformVariant::LowerC4)
                };
                for (i, g) in base_graphs(class).iter().enumerate() {
                    // a high-degree vertex first, so that there is something to undo
                    let p = TransformParams { size: Some(12 + i % 20), ..Default::default() };
                    let g = transform(g, lower, &p, i as u64).unwrap().result;
                    let ok = transform(&g, variant, &TransformParams::default(), i as u64)
                        .is_ok_and(|rec| round_trip_ok(&rec, &g, variant));
                    record(ok);
                }
            }
            TransformVariant::UpperExC5 => {
                for (i, base) in base_graphs(GraphClass::ExCycle(5)).iter().enumerate() {
                    let g = hub_graph(base, &mut rng_for(i as u64, 8));
                    let ok = in_class(&g, GraphClass::ExCycle(5))
                        && transform(&g, variant, &TransformParams::default(), i as u64)
                            .is_ok_and(|rec| round_trip_ok(&rec, &g, variant));
                    record(ok);
                }
            }
            _ => {
                for (i, g) in base_graphs(variant.class()).iter().enumerate() {
                    let delta = max_degree(g).unwrap().0;
                    let mut p = TransformParams::default();
                    match variant {
                        TransformVariant::LowerFan => p.size = Some(delta + 2),
                        TransformVariant::LowerC5 => {
                            p.r = Some(3);
                            p.size = Some(3 * (delta / 3 + 1));
                        }
                        _ => p.size = Some(delta + 1),
                    }
                    let ok = transform(g, variant, &p, i as u64).is_ok_and(|rec| round_trip_ok(&rec, g, variant));
                    record(ok);
                }
            }
        }
        r.check(failures == 0, format!("{variant}: {failures}/{RUNS} failures, {}", secs(start.elapsed())));
    }
}

fn ratio(r: &mut Report) {
    let p = RatioParams::default();
    let x: Vec<f64> = [1e4, 1e5, 1e6, 1e7]
        .iter()
        .map(|&n| double_count_ratio(n, TransformVariant::LowerTree, &p).unwrap().log_ratio)
        .collect();
    r.check(x[2] > 0.0, format!("log ratio at 10^6 = {:.4}", x[2]));
    r.check(x.windows(2).all(|w| w[1] > w[0]), format!("increasing over 10^4..10^7: {x:.4?}"));
}

/// Tree samples at 10^3, 10^4 and 10^5, shared by the scaling and pendant checks.
fn tree_samples() -> Vec<Vec<cyclex::experiments::SampleStats>> {
    sample_stats(GraphClass::Tree, &[1_000, 10_000, 100_000], 500, 2024).unwrap()
}

fn tree_scaling(r: &mut Report, stats: &[Vec<cyclex::experiments::SampleStats>], took: Duration) {
    let m = Normalizer::LOG_OVER_LOG_LOG;
    let ratio = |i: usize, n: usize| summarize(GraphClass::Tree, n, 2024, &stats[i]).unwrap().delta_mean / m.eval(n).unwrap();
    let (small, large) = (ratio(0, 1_000), ratio(2, 100_000));
    r.check((0.5..=2.5).contains(&large), format!("mean delta / (log n / log log n) at 10^5 = {large:.4}"));
    r.known(
        (large - 1.0).abs() < (small - 1.0).abs(),
        format!("ratio at 10^5 closer to 1 than at 10^3: {large:.4} vs {small:.4}"),
        "the exact expectation gives 1.819 at 10^3 and 1.859 at 10^5; the ratio only turns back towards 1 past 10^6",
    );
    r.check(took < Duration::from_secs(600), format!("500 trees at each n in {}", secs(took)));
}

fn pendants(r: &mut Report, stats: &[Vec<cyclex::experiments::SampleStats>]) {
    for (i, n) in [1_000, 10_000, 100_000].into_iter().enumerate() {
        let f = summarize(GraphClass::Tree, n, 2024, &stats[i]).unwrap().pendant_fraction_mean;
        r.check((0.30..=0.45).contains(&f), format!("pendant fraction at n={n}: {f:.4}"));
    }
    let v = pendant_bound_check(&stats[1]).violation_fraction;
    r.check(v <= 0.02, format!("pendants per vertex bound violated in {v:.4} of samples at 10^4"));
}

fn entropy(r: &mut Report) {
    let mut rng = rng_for(10, 0);
    let mut failures = 0;
    for _ in 0..10_000 {
        let parts = rng.gen_range(1..=50);
        let top = *[10i64, 1_000, 1_000_000].choose(&mut rng).unwrap();
        let values: Vec<i64> = (0..parts).map(|_| rng.gen_range(1..=top)).collect();
        failures += usize::from(!entropy_check(&values).unwrap().ok);
    }
    r.check(failures == 0, format!("10^4 random partitions, {failures} failures"));
    let equal = (1..=50).all(|r| {
        [1i64, 7, 1_000_000].iter().all(|&v| {
            let rep = entropy_check(&vec![v; r]).unwrap();
            rep.ok && (rep.sum - rep.lower_bound).abs() <= 1e-9 * rep.sum.abs().max(1.0)
        })
    });
    r.check(equal, "equal parts meet the bound with equality");
}

fn minor_oracle(r: &mut Report) {
    let mut rng = rng_for(11, 0);
    for k in 3..=7 {
        let cycle = named::cycle(k);
        let (mut disagree, mut found) = (0, 0);
        for _ in 0..200 {
            let n = rng.gen_range(k.max(4)..=12);
            let p = rng.gen_range(0.1..0.5);
            let edges: Vec<(usize, usize)> =
                (0..n).flat_map(|b| (0..b).map(move |a| (a, b))).filter(|_| rng.gen_bool(p)).collect();
            let g = LabelledGraph::from_edges(n, edges).unwrap();
            let fast = has_cycle_minor(&g, k).unwrap();
            disagree += usize::from(fast != has_minor(&g, &cycle).unwrap());
            found += usize::from(fast);
        }
        r.check(disagree == 0, format!("k={k}: {disagree}/200 disagreements, {found} graphs with the minor"));
    }
}

fn main() {
    let stats = std::cell::OnceCell::new();
    let tree_time = std::cell::Cell::new(Duration::ZERO);
    let shared = || {
        stats.get_or_init(|| {
            let start = Instant::now();
            let s = tree_samples();
            tree_time.set(start.elapsed());
            s
        })
    };
    let criteria: Vec<(&str, Box<dyn Fn(&mut Report) + '_>)> = vec![
        ("census of Ex(C5) blocks", Box::new(census_ex_c5)),
        ("census of Ex(C6) and Ex(C7) blocks", Box::new(census_ex_c6_c7)),
        ("exact counting", Box::new(exact_counting)),
        ("sampler uniformity", Box::new(sampler_uniformity)),
        ("gadget invariants", Box::new(gadgets)),
        ("transform round trips", Box::new(transform_round_trips)),
        ("double counting ratio", Box::new(ratio)),
        ("tree scaling band", Box::new(|r: &mut Report| {
            let s = shared();
            tree_scaling(r, s, tree_time.get())
        })),
        ("pendant statistics", Box::new(|r: &mut Report| pendants(r, shared()))),
        ("entropy inequality", Box::new(entropy)),
        ("cycle minor oracle", Box::new(minor_oracle)),
    ];
    let mut unexpected = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut report = Report::default();
        if let Err(e) = catch_unwind(AssertUnwindSafe(|| run(&mut report))) {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            report.check(false, format!("panicked: {}", msg.unwrap_or_default()));
        }
        let pass = report.checks.iter().all(|c| c.ok);
        println!("{} criterion {:>2} {name} ({})", if pass { "PASS" } else { "FAIL" }, i + 1, secs(start.elapsed()));
        for c in &report.checks {
            let mark = match (c.ok, c.known) {
                (true, None) => "ok  ",
                (true, Some(_)) => "ok (was known to fail; revisit)",
                (false, None) => "FAIL",
                (false, Some(_)) => "FAIL (known)",
            };
            println!("       {mark} {}", c.what);
            if let (false, Some(why)) = (c.ok, c.known) {
                println!("            cannot hold: {why}");
            }
            unexpected += usize::from(c.ok == c.known.is_some());
        }
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}
