//! Acceptance suite: one PASS/FAIL line per criterion, exact tolerances.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use amd_core::amd::{AmdEngine, AmdOptions, PolytopeContext};
use amd_core::cayley::enumerate_fine_coherent_subdivisions;
use amd_core::fan::{classify_cone, refine_by_amd};
use amd_core::geometry::LatticePolygon;
use amd_core::invariants::{invariant_report, node_count_edge, pullback_space};
use amd_core::minkowski::{enumerate_admissible_decompositions, AdmissibleDecomposition};
use amd_core::period::{classical_period, LaurentPoly3};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::oracles;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn all_amd(ctx: &PolytopeContext) -> Vec<amd_core::amd::Amd> {
    AmdEngine::new(ctx).enumerate(&AmdOptions::default()).unwrap()
}

fn hexagon_decompositions() -> Outcome {
    let ds = enumerate_admissible_decompositions(&common::hexagon());
    let got: BTreeSet<Vec<oracles::Shape>> = ds.iter().map(oracles::canonical).collect();
    let expected: BTreeSet<Vec<oracles::Shape>> = [
        vec![vec![[0, 0], [0, 1]], vec![[0, 0], [1, 0]], vec![[0, 0], [1, 1]]],
        vec![vec![[0, 0], [0, 1], [1, 1]], vec![[0, 0], [1, 0], [1, 1]]],
    ]
    .into_iter()
    .collect();
    ensure(ds.len() == 2, format!("{} decompositions", ds.len()))?;
    ensure(got == expected, format!("decompositions {got:?}"))?;
    Ok("2 decompositions: three segments, two A0 triangles".into())
}

fn no_amd() -> Outcome {
    for t in common::no_amd_triangles() {
        let n = enumerate_admissible_decompositions(&t).len();
        ensure(n == 0, format!("{:?} has {n} decompositions", t.vertices()))?;
    }
    let ctx = PolytopeContext::new(&common::no_amd_polytope(), 0).unwrap();
    ensure(!AmdEngine::new(&ctx).exists().unwrap(), "amd found")?;
    Ok("both triangles 0 decompositions; amd_exists = false".into())
}

fn suite_facet_polygons() -> Vec<LatticePolygon> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (_, p) in common::suite20() {
        for f in 0..p.facets().len() {
            let poly = p.facet_chart(f).unwrap().polygon;
            if poly.num_boundary_points() <= 12 && seen.insert(poly.normal_form()) {
                out.push(poly);
            }
        }
    }
    // Random polygons widen coverage beyond the shapes occurring as facets.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut extra = 0;
    while extra < 60 {
        let pts: Vec<[i64; 2]> = (0..rng.gen_range(3..7))
            .map(|_| [rng.gen_range(0..5), rng.gen_range(0..5)])
            .collect();
        let Ok(poly) = LatticePolygon::hull(&pts) else { continue };
        if poly.dim() == 2 && poly.num_boundary_points() <= 12 && seen.insert(poly.normal_form()) {
            out.push(poly);
            extra += 1;
        }
    }
    out
}

fn decomposition_oracle() -> Outcome {
    let polys = suite_facet_polygons();
    let mut total = 0;
    for f in &polys {
        let ds = enumerate_admissible_decompositions(f);
        let got: BTreeSet<Vec<oracles::Shape>> = ds.iter().map(oracles::canonical).collect();
        ensure(
            got.len() == ds.len(),
            format!("duplicate decompositions for {:?}", f.vertices()),
        )?;
        let want = oracles::brute_force_decompositions(f);
        ensure(got == want, format!("{:?}: {got:?} vs oracle {want:?}", f.vertices()))?;
        total += ds.len();
    }
    Ok(format!("{} polygons, {total} decompositions agree", polys.len()))
}

fn cayley_size(d: &AdmissibleDecomposition) -> usize {
    d.summands().iter().map(|s| s.polygon().lattice_points().len()).sum()
}

fn random_small_decompositions(count: usize, seed: u64) -> Vec<AdmissibleDecomposition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < count {
        let pts: Vec<[i64; 2]> = (0..rng.gen_range(3..7))
            .map(|_| [rng.gen_range(0..4), rng.gen_range(0..4)])
            .collect();
        let Ok(f) = LatticePolygon::hull(&pts) else { continue };
        if f.dim() < 2 {
            continue;
        }
        for d in enumerate_admissible_decompositions(&f) {
            if d.num_summands() >= 2 && cayley_size(&d) <= 9 && seen.insert(oracles::canonical(&d)) {
                out.push(d);
                break;
            }
        }
    }
    out
}

fn cayley_bijection() -> Outcome {
    let hex = enumerate_admissible_decompositions(&common::hexagon());
    let mut cases: Vec<AdmissibleDecomposition> = hex.clone();
    cases.extend(random_small_decompositions(10, 17));
    let mut counts = Vec::new();
    for d in &cases {
        let subs = enumerate_fine_coherent_subdivisions(d, 5).unwrap();
        let ours: BTreeSet<Vec<u128>> = subs.iter().map(|s| s.triangulation.cells().to_vec()).collect();
        let oracle = oracles::triangulations_by_heights(d, 20_000, 11);
        ensure(
            ours == oracle,
            format!("{:?}: {} vs oracle {}", oracles::canonical(d), ours.len(), oracle.len()),
        )?;
        counts.push(subs.len());
    }
    let three = hex.iter().find(|d| d.num_summands() == 3).unwrap();
    let n3 = enumerate_fine_coherent_subdivisions(three, 0).unwrap().len();
    ensure(n3 == 2, format!("three-segment hexagon gives {n3}"))?;
    Ok(format!(
        "{} cases, counts {counts:?}; three-segment hexagon 2",
        cases.len()
    ))
}

fn cone_classification() -> Outcome {
    let mut amds = 0;
    let mut cones = 0;
    for (id, p) in common::suite20() {
        let ctx = PolytopeContext::new(&p, 0).unwrap();
        let boundary: BTreeSet<_> = p.boundary_lattice_points().into_iter().collect();
        for a in all_amd(&ctx) {
            let fan = refine_by_amd(&ctx, &a).map_err(|e| format!("{id}: {e}"))?;
            for c in 0..fan.cones.len() {
                ensure(
                    classify_cone(&fan.cone_rays(c)).is_some(),
                    format!("{id}: cone {c} unclassified"),
                )?;
            }
            ensure(
                fan.rays.iter().all(|r| boundary.contains(r)),
                format!("{id}: ray off the boundary"),
            )?;
            ensure(fan.is_complete(20, amds as u64), format!("{id}: fan not complete"))?;
            amds += 1;
            cones += fan.cones.len();
        }
    }
    Ok(format!("{amds} amd, {cones} maximal cones classified"))
}

fn node_count_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut matched = 0;
    for _ in 0..10_000 {
        let l = rng.gen_range(1..=8usize);
        let k = rng.gen_range(1..=4i64);
        let f: Vec<usize> = (0..l).map(|_| rng.gen_range(0..l)).collect();
        let g: Vec<usize> = (0..l).map(|_| rng.gen_range(0..l)).collect();
        let mut pairs = 0;
        let mut min_m = i64::MAX;
        for j in 0..l {
            for i in 0..j {
                let m = k - i64::from(f[i] == f[j]) - i64::from(g[i] == g[j]);
                pairs += m;
                min_m = min_m.min(m);
            }
        }
        match node_count_edge(k, &f, &g) {
            Ok(n) => ensure(n == pairs, format!("{f:?} {g:?} k={k}: {n} vs {pairs}"))?,
            Err(_) => ensure(pairs < 0, format!("{f:?} {g:?} k={k}: rejected but pair sum {pairs}"))?,
        }
        let matching = (0..l).all(|j| (0..j).all(|i| !(f[i] == f[j] && g[i] == g[j])));
        if matching {
            matched += 1;
            ensure(l < 2 || min_m >= 0, format!("{f:?} {g:?}: negative multiplicity"))?;
        }
    }
    Ok(format!("10000 instances ({matched} satisfying matching)"))
}

fn smooth_baseline() -> Outcome {
    let ctx = PolytopeContext::new(&common::simplex64(), 0).unwrap();
    let amds = all_amd(&ctx);
    ensure(amds.len() == 1, format!("{} amd", amds.len()))?;
    let inv = invariant_report(&ctx, &amds[0]).map_err(|e| e.to_string())?.invariants;
    let got = (inv.n, inv.b2, inv.b3, inv.degree, inv.h0, inv.t1_dim);
    ensure(got == (0, 1, 0, 64, 35, 22), format!("{got:?}"))?;
    Ok("n=0 b2=1 b3=0 degree=64 h0=35 t1=22".into())
}

fn betti_double_entry() -> Outcome {
    let mut checked = 0;
    for (id, p) in common::suite20() {
        let ctx = PolytopeContext::new(&p, 0).unwrap();
        let mut anticanonical = BTreeSet::new();
        for a in all_amd(&ctx) {
            let r = invariant_report(&ctx, &a).map_err(|e| format!("{id}: {e}"))?;
            let i = &r.invariants;
            let lhs = r.b3_yt + 2 * (i.n - i.sigma);
            ensure(
                i.b3 == lhs && lhs == 2 + 2 * i.b2 - i.e_xeta,
                format!("{id}: double entry {i:?}"),
            )?;
            ensure(i.b3 % 2 == 0 && i.b3 >= 0, format!("{id}: b3 = {}", i.b3))?;
            for phi in pullback_space(&ctx, &r.fan) {
                for node in &r.nodes {
                    let s: amd_core::arith::Q = node
                        .class
                        .iter()
                        .zip(&phi)
                        .map(|(&c, x)| amd_core::arith::q(c) * x)
                        .sum();
                    ensure(s.is_zero(), format!("{id}: node class pairs nontrivially"))?;
                }
            }
            anticanonical.insert((i.degree, i.h0));
            checked += 1;
        }
        ensure(
            anticanonical.len() <= 1,
            format!("{id}: degree/h0 vary {anticanonical:?}"),
        )?;
    }
    Ok(format!("{checked} amd"))
}

fn arrangement_independence() -> Outcome {
    let mut polytopes = Vec::new();
    for (id, p) in common::suite20() {
        let ctx = PolytopeContext::new(&p, 0).unwrap();
        let mut groups: BTreeMap<Vec<usize>, BTreeSet<(i64, i64)>> = BTreeMap::new();
        let mut sizes: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for a in all_amd(&ctx) {
            let key: Vec<usize> = a.choices.iter().map(|c| c.option.decomposition).collect();
            let i = invariant_report(&ctx, &a).map_err(|e| format!("{id}: {e}"))?.invariants;
            groups.entry(key.clone()).or_default().insert((i.b2, i.b3));
            *sizes.entry(key).or_default() += 1;
        }
        for (key, set) in &groups {
            ensure(
                set.len() == 1,
                format!("{id}: decomposition choice {key:?} gives {set:?}"),
            )?;
        }
        if sizes.values().any(|&n| n >= 2) {
            polytopes.push(id);
        }
        if polytopes.len() == 5 {
            break;
        }
    }
    ensure(
        polytopes.len() == 5,
        format!("only {} polytopes with several arrangements", polytopes.len()),
    )?;
    Ok(format!("constant (b2, b3) on {}", polytopes.join(", ")))
}

fn period_sanity() -> Outcome {
    let terms = [([1, 0, 0], 1), ([0, 1, 0], 1), ([0, 0, 1], 1), ([-1, -1, -1], 1)];
    let w = LaurentPoly3::from_terms(terms);
    let c = classical_period(&w, 8).map_err(|e| e.to_string())?;
    let brute: Vec<BigInt> = oracles::brute_force_period(&terms, 8)
        .into_iter()
        .map(BigInt::from)
        .collect();
    let expected: Vec<BigInt> = [1, 0, 0, 0, 24, 0, 0, 0, 2520].into_iter().map(BigInt::from).collect();
    ensure(c == brute, format!("{c:?} vs brute force {brute:?}"))?;
    ensure(c == expected, format!("{c:?}"))?;
    Ok("c4 = 24, c8 = 2520, zeros elsewhere".into())
}

fn read_lines(path: &std::path::Path) -> BTreeSet<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

fn batch_resume() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let input = common::suite_path("suite50.json");
    let bin = env!("CARGO_BIN_EXE_amd");
    let args = |out: &std::path::Path| {
        let mut c = Command::new(bin);
        c.arg("batch")
            .arg("--format")
            .arg("batch-json")
            .arg("--input")
            .arg(&input)
            .arg("--output")
            .arg(out)
            .args(["--limit", "100"]);
        c
    };
    let full = dir.path().join("full.jsonl");
    let start = Instant::now();
    let status = args(&full).status().unwrap();
    let elapsed = start.elapsed();
    ensure(status.code() == Some(0), format!("batch exit {status:?}"))?;
    let records = read_lines(&full);
    ensure(records.len() == 50, format!("{} records", records.len()))?;
    for line in &records {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        ensure(v["status"] == "ok", format!("record {line}"))?;
    }

    let part = dir.path().join("part.jsonl");
    let mut child = args(&part).stdout(Stdio::null()).stderr(Stdio::null()).spawn().unwrap();
    let ledger = amd_core::cli::ledger_path(&part);
    let wait = Instant::now();
    loop {
        let done = std::fs::File::open(&ledger)
            .map(|f| BufReader::new(f).lines().count())
            .unwrap_or(0);
        if done >= 10 || wait.elapsed() > Duration::from_secs(300) {
            break;
        }
        std::thread::sleep(Duration::from_millis(5));
    }
    child.kill().ok();
    child.wait().unwrap();
    let before = read_lines(&part).len();
    let status = args(&part).arg("--resume").status().unwrap();
    ensure(status.code() == Some(0), format!("resume exit {status:?}"))?;
    ensure(
        read_lines(&part) == records,
        "resumed output differs from uninterrupted run",
    )?;
    Ok(format!(
        "50 polytopes in {:.1} s; killed after {before} records, resume matches",
        elapsed.as_secs_f64()
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("hexagon decompositions", hexagon_decompositions, Duration::from_secs(1)),
        ("no-amd polygons and polytope", no_amd, Duration::from_secs(1)),
        (
            "decomposition oracle equivalence",
            decomposition_oracle,
            Duration::from_secs(300),
        ),
        ("Cayley trick bijection", cayley_bijection, Duration::from_secs(600)),
        ("cone classification", cone_classification, Duration::from_secs(600)),
        ("node count identity", node_count_identity, Duration::from_secs(10)),
        ("smooth baseline", smooth_baseline, Duration::from_secs(1)),
        ("Betti double entry", betti_double_entry, Duration::from_secs(600)),
        (
            "arrangement independence",
            arrangement_independence,
            Duration::from_secs(600),
        ),
        ("period sanity", period_sanity, Duration::from_secs(5)),
        ("batch with resume", batch_resume, Duration::from_secs(1800)),
    ];
    let mut failed = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if t <= *budget {
                Ok(detail)
            } else {
                Err(format!("{detail}; exceeded {:.0} s budget", budget.as_secs_f64()))
            }
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{:.2} s]", k + 1, t.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{:.2} s]", k + 1, t.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
