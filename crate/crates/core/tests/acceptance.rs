//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if
//! any criterion fails.

use std::collections::{BTreeSet, HashSet};
use std::panic;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use torsys::admissible::{
    augment, canonical_form, classify_cyclic_strong, classify_length_le5, is_admissible, AdmissibleConfig,
};
use torsys::catalog::{catalog, catalog_surface};
use torsys::pseudoheight::{evaluate_chain, has_effective_segment, pseudoheight, pseudoheight_with_chain, Height};
use torsys::surface::enumerate_r_classes;
use torsys::tables::{verify_table, GoldenSource, TableId};
use torsys::toric::{cyclic_segments, exceptionality_fast, exceptionality_naive};
use torsys::twist::{reduce, verify_trace};
use torsys::{DivisorClass, LatticeId, PicardLattice, SurfaceModel, ToricSystem};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    if t > limit {
        Err(format!("{what} took {t:.2?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

/// (surface, system) pairs listed in the cyclic strong systems table.
fn listed_pairs() -> Vec<(SurfaceModel, ToricSystem)> {
    let golden: Value = serde_json::from_str(include_str!("../data/golden/cyclic_strong_systems.json")).unwrap();
    let mut out = Vec::new();
    for row in golden["rows"].as_array().unwrap() {
        let entries: Vec<&str> = golden["systems"][row["system"].as_str().unwrap()]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e.as_str().unwrap())
            .collect();
        for name in row["surfaces"].as_array().unwrap() {
            let x = catalog_surface(name.as_str().unwrap()).unwrap();
            let ts = ToricSystem::parse(x.lattice(), &entries).unwrap();
            out.push((x, ts));
        }
    }
    out
}

fn surfaces_on(id: LatticeId) -> Vec<&'static SurfaceModel> {
    catalog().unwrap().iter().filter(|x| x.lattice().id() == id).collect()
}

fn root_counts() -> Outcome {
    let start = Instant::now();
    let roots = [2, 8, 20, 40, 72, 126, 240];
    let lines = [3, 6, 10, 16, 27, 56, 240];
    for (i, d) in (1..=7).rev().enumerate() {
        let lat = PicardLattice::blowup(9 - d).unwrap();
        let r = enumerate_r_classes(&lat, -2).len();
        let m = enumerate_r_classes(&lat, -1).len();
        ensure!(r == roots[i] && m == lines[i], "degree {d}: {r} roots, {m} (-1)-classes");
    }
    within(start, Duration::from_secs(10), "enumeration")?;
    Ok("degrees 7..1 match".into())
}

fn cyclic_strong_table() -> Outcome {
    let start = Instant::now();
    let listed: Vec<Vec<i64>> = vec![
        vec![0, 0, 0, 0],
        vec![0, 1, 0, -1],
        vec![0, 2, 0, -2],
        vec![0, 0, -1, -1, -1],
        vec![0, -2, -1, -1, 1],
        vec![-1, -1, -1, -1, -1, -1],
        vec![-1, -1, -2, -1, -1, 0],
        vec![-2, -1, -2, -1, 0, 0],
        vec![-2, -1, -2, -2, 0, 1],
        vec![-1, -1, -2, -1, -2, -1, -1],
        vec![-2, -1, -2, -2, -1, -1, 0],
        vec![-2, -1, -2, -1, -2, -1, -2, -1],
        vec![-2, -1, -1, -2, -1, -2, -2, -1],
        vec![-2, -1, -2, -2, -2, -1, -2, 0],
        vec![-2, -2, -1, -2, -2, -1, -2, -2, -1],
    ];
    let expected: BTreeSet<Vec<i64>> = listed.iter().map(|s| canonical_form(s)).collect();
    ensure!(expected.len() == 15, "listed sequences are not pairwise inequivalent");
    let off: BTreeSet<Vec<i64>> =
        classify_cyclic_strong(AdmissibleConfig { length3_base: false }).all().into_iter().collect();
    ensure!(off == expected, "without (1,1,1): extra {:?} missing {:?}", diff(&off, &expected), diff(&expected, &off));
    let on: BTreeSet<Vec<i64>> = classify_cyclic_strong(AdmissibleConfig::default()).all().into_iter().collect();
    let mut with3 = expected.clone();
    with3.insert(vec![1, 1, 1]);
    ensure!(on == with3, "with (1,1,1): extra {:?} missing {:?}", diff(&on, &with3), diff(&with3, &on));
    within(start, Duration::from_secs(5), "classification")?;
    Ok("15 sequences, 16 with (1,1,1)".into())
}

fn diff(a: &BTreeSet<Vec<i64>>, b: &BTreeSet<Vec<i64>>) -> Vec<Vec<i64>> {
    a.difference(b).cloned().collect()
}

fn length_le5() -> Outcome {
    let bound = 10;
    let (lo, hi) = (-bound - 2, bound + 2);
    let t = classify_length_le5(bound).map_err(|e| e.to_string())?;
    let generated: BTreeSet<Vec<i64>> = t.generated.values().flatten().cloned().collect();
    let mut families = BTreeSet::new();
    families.insert(vec![1, 1, 1]);
    for m in -40..=40 {
        for s in [vec![m, 0, -m, 0], vec![-1, m, 0, -m - 1, -1]] {
            if s.iter().all(|a| (lo..=hi).contains(a)) {
                families.insert(canonical_form(&s));
            }
        }
    }
    ensure!(
        generated == families,
        "extra {:?} missing {:?}",
        diff(&generated, &families),
        diff(&families, &generated)
    );
    Ok(format!("{} classes in [{lo}, {hi}]", generated.len()))
}

fn sum_invariant() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut checked = 0;
    for chain in 0..10_000 {
        let k = rng.gen_range(-6..=6);
        let mut seq = if chain % 10 == 0 { vec![1, 1, 1] } else { vec![0, k, 0, -k] };
        let steps = rng.gen_range(0..=8);
        for _ in 0..=steps {
            let n = seq.len() as i64;
            ensure!(seq.iter().sum::<i64>() == 12 - 3 * n, "{seq:?} breaks the sum invariant");
            checked += 1;
            let m = rng.gen_range(1..=seq.len() + 1);
            seq = augment(&seq, m).map_err(|e| e.to_string())?;
        }
        if chain % 100 == 0 {
            ensure!(is_admissible(&seq), "{seq:?} built by augmentation is not recognised");
        }
    }
    Ok(format!("10000 chains, {checked} sequences"))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut compared = 0;
    let mut exceptional = 0;
    let mut cyclic = 0;
    let mut compare = |x: &SurfaceModel, ts: &ToricSystem| -> Result<(), String> {
        let f = exceptionality_fast(x, ts).map_err(|e| e.to_string())?;
        let n = exceptionality_naive(x, ts).map_err(|e| e.to_string())?;
        ensure!(
            f.flags() == n.flags(),
            "{:?} {:?}: fast {:?} naive {:?}",
            x.name(),
            ts.entries().iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            f.flags(),
            n.flags()
        );
        compared += 1;
        exceptional += f.exceptional as usize;
        cyclic += f.cyclic_strong as usize;
        Ok(())
    };
    let seeds = listed_pairs();
    for (x, ts) in &seeds {
        compare(x, ts)?;
    }
    let mut level1: Vec<ToricSystem> = Vec::new();
    let mut seen = HashSet::new();
    for (_, ts) in &seeds {
        let points = ts.lattice().blown_up_points();
        if !matches!(points, Some(p) if p <= 5) {
            continue;
        }
        for s in 0..ts.len() {
            let shifted = ts.cyclic_shift(s);
            for m in 1..=ts.len() + 1 {
                let aug = shifted.augment_blowup(m).map_err(|e| e.to_string())?;
                if seen.insert(aug.clone()) {
                    for x in surfaces_on(aug.lattice().id()) {
                        compare(x, &aug)?;
                    }
                    level1.push(aug);
                }
            }
        }
    }
    level1.shuffle(&mut rng);
    let mut second = 0;
    for ts in level1.iter().filter(|t| t.lattice().blown_up_points().unwrap() <= 5).take(150) {
        let m = rng.gen_range(1..=ts.len() + 1);
        let aug = ts.reverse_symmetry().augment_blowup(m).map_err(|e| e.to_string())?;
        if seen.insert(aug.clone()) {
            for x in surfaces_on(aug.lattice().id()) {
                compare(x, &aug)?;
            }
            second += 1;
        }
    }
    ensure!(compared >= 1000 + seeds.len(), "only {compared} comparisons");
    Ok(format!(
        "{} listed pairs and {} generated pairs agree ({second} from two blow-ups; {exceptional} exceptional, {cyclic} cyclic strong)",
        seeds.len(),
        compared - seeds.len()
    ))
}

fn listed_systems() -> Outcome {
    let mut rows = 0;
    for id in [TableId::CyclicStrongSystems, TableId::DelPezzoSystems] {
        let r = verify_table(id, &GoldenSource::Embedded, AdmissibleConfig::default()).map_err(|e| e.to_string())?;
        ensure!(r.passed(), "{id}: {:?}", r.diffs);
        rows += r.rows.len();
    }
    for (x, ts) in listed_pairs() {
        ensure!(ts.is_valid(), "{:?}: invalid", x.name());
        let r = exceptionality_fast(&x, &ts).map_err(|e| e.to_string())?;
        ensure!(r.cyclic_strong, "{:?}: not cyclic strong", x.name());
    }
    Ok(format!("{rows} surface/system rows"))
}

fn root_partition() -> Outcome {
    let mut roots = 0;
    for x in catalog().map_err(|e| e.to_string())? {
        let p = x.verify_root_partition().map_err(|e| e.to_string())?;
        ensure!(p.holds(), "{:?}: offenders {:?}", x.name(), p.offenders);
        // R^lo = R^eff + R^slo, checked directly on the lo/slo dispatch
        for c in x.root_system() {
            let s = x.lo_slo_status(c).map_err(|e| e.to_string())?;
            let eff = x.is_effective(c);
            let anti = x.is_effective(&-c);
            ensure!(
                [eff, anti, s.slo].iter().filter(|&&b| b).count() == 1 && s.lo == (eff || s.slo),
                "{:?}: root {c} eff {eff} anti {anti} {s:?}",
                x.name()
            );
        }
        roots += p.roots;
    }
    Ok(format!("{} surfaces, {roots} roots", catalog().unwrap().len()))
}

fn segment_bounds() -> Outcome {
    let mut segments = 0;
    for (x, ts) in listed_pairs() {
        let d = x.degree();
        for seg in cyclic_segments(ts.len()) {
            let sq = ts.segment_sum(seg.start, seg.end).map_err(|e| e.to_string())?.square();
            ensure!((-2..=d - 2).contains(&sq), "{:?} segment {seg}: square {sq} outside [-2, {}]", x.name(), d - 2);
            segments += 1;
        }
    }
    Ok(format!("{segments} segments"))
}

fn pseudoheight_bounds() -> Outcome {
    let p2 = PicardLattice::blowup(0).unwrap();
    let x = catalog_surface("P2").unwrap();
    let lll = ToricSystem::parse(&p2, &["L", "L", "L"]).unwrap();
    let h = pseudoheight(&x, &lll, 1).map_err(|e| e.to_string())?;
    ensure!(h == Height::Finite(-2), "(L,L,L) gives {h}");
    let mut slowest = Duration::ZERO;
    let mut systems = 0;
    for (x, ts) in listed_pairs() {
        let start = Instant::now();
        let r = pseudoheight_with_chain(&x, &ts, 1).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        ensure!(r.value <= Height::Finite(-2), "{:?}: pseudoheight {}", x.name(), r.value);
        ensure!(has_effective_segment(&x, &ts).map_err(|e| e.to_string())?, "{:?}: no effective segment", x.name());
        systems += 1;
    }
    ensure!(slowest < Duration::from_secs(1), "slowest system took {slowest:?}");
    // The no-effective-segment bound (a chain whose terms are all
    // non-effective totals >= 1) never fires on a valid system: the p + 1
    // terms of a chain have squares summing to d - 2(p + 1), so one of them
    // has square >= -1 and is effective. Checked here in that stronger form,
    // together with the implication itself.
    let mut chains = 0;
    let mut inputs: Vec<(SurfaceModel, ToricSystem)> = Vec::new();
    for (x, ts) in listed_pairs() {
        if x.degree() >= 5 && ts.lattice().blown_up_points().is_some() {
            for m in 1..=ts.len() + 1 {
                let aug = ts.augment_blowup(m).map_err(|e| e.to_string())?;
                for y in surfaces_on(aug.lattice().id()) {
                    inputs.push((y.clone(), aug.clone()));
                }
            }
        }
        inputs.push((x, ts));
    }
    for (x, ts) in &inputs {
        ensure!(ts.self_intersections().iter().any(|&a| a >= -1), "{:?}: every entry below -1", x.name());
        ensure!(has_effective_segment(x, ts).map_err(|e| e.to_string())?, "{:?}: no effective segment", x.name());
        let n = ts.len();
        if n > 7 {
            continue;
        }
        for mask in 1usize..(1 << n) {
            if mask.count_ones() < 2 {
                continue;
            }
            let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
            let c = evaluate_chain(x, ts, &idx).map_err(|e| e.to_string())?;
            chains += 1;
            if c.term_values.iter().all(|e| e.value() != Some(0)) {
                ensure!(c.total >= Height::Finite(1), "{:?} chain {idx:?}: {}", x.name(), c.total);
                return Err(format!("{:?} chain {idx:?} has no effective term", x.name()));
            }
        }
    }
    Ok(format!(
        "{systems} systems <= -2, slowest {slowest:.2?}; {} systems with an effective segment; each of {chains} chains has an effective term",
        inputs.len()
    ))
}

fn twist_reduction() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut longest = 0;
    for x in catalog().map_err(|e| e.to_string())?.iter().filter(|x| x.degree() >= 2) {
        for d in x.minus1_classes() {
            if !x.is_effective(d) {
                continue;
            }
            let t = reduce(x, d).map_err(|e| format!("{:?} {d}: {e}", x.name()))?;
            let mut cur = t.start.clone();
            for c in &t.steps {
                ensure!(x.simple_roots().contains(c) && c.dot(&cur) == -1, "{:?} {d}: bad step {c}", x.name());
                cur = &cur - c;
                let s = x.lo_slo_status(&cur).map_err(|e| e.to_string())?;
                ensure!(cur.square() == -1 && s.slo, "{:?} {d}: intermediate {cur} {s:?}", x.name());
            }
            ensure!(cur == t.result && x.irreducible_minus1().contains(&t.result), "{:?} {d}: result", x.name());
            ensure!(verify_trace(x, &t), "{:?} {d}: trace rejected", x.name());
            longest = longest.max(t.steps.len());
            cases += 1;
        }
    }
    within(start, Duration::from_secs(5), "reduction")?;
    Ok(format!("{cases} classes, longest trace {longest}"))
}

fn twist_preserves_status() -> Outcome {
    let mut pairs: Vec<(&SurfaceModel, DivisorClass, DivisorClass)> = Vec::new();
    for x in catalog().map_err(|e| e.to_string())?.iter().filter(|x| !x.simple_roots().is_empty()) {
        for r in -3..=2 {
            for d in enumerate_r_classes(x.lattice(), r) {
                for c in x.simple_roots() {
                    if c.dot(&d) == 1 {
                        pairs.push((x, d.clone(), c.clone()));
                    }
                }
            }
        }
    }
    let total = pairs.len();
    ensure!(total >= 1000, "only {total} pairs available");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0011);
    pairs.shuffle(&mut rng);
    for (x, d, c) in pairs.iter().take(1000) {
        let before = x.lo_slo_status(d).map_err(|e| e.to_string())?;
        let after = x.lo_slo_status(&(d + c)).map_err(|e| e.to_string())?;
        ensure!(before == after, "{:?}: {d} {before:?} vs {d} + {c} {after:?}", x.name());
    }
    Ok(format!("1000 of {total} pairs"))
}

fn riemann_roch() -> Outcome {
    let mut singles = 0;
    let mut pairs = 0;
    let mut lattices: Vec<Arc<PicardLattice>> = catalog().unwrap().iter().map(|x| x.lattice().clone()).collect();
    lattices.dedup_by_key(|l| l.id());
    let lattices: Vec<Arc<PicardLattice>> = {
        let mut seen = HashSet::new();
        lattices.into_iter().filter(|l| seen.insert(l.id())).collect()
    };
    for lat in &lattices {
        let mut classes = enumerate_r_classes(lat, -2);
        classes.extend(enumerate_r_classes(lat, -1));
        for d in &classes {
            let chi = d.euler_char().map_err(|e| e.to_string())?;
            ensure!(chi == d.square() + 2 && chi == -d.dot_canonical(), "{}: chi({d}) = {chi}", lat.id());
            ensure!((-d).euler_char().unwrap() == 0, "{}: chi(-{d}) != 0", lat.id());
            singles += 1;
        }
        for (i, a) in classes.iter().enumerate() {
            for b in &classes[i..] {
                let s = a + b;
                let lo = s.is_numerically_lo();
                ensure!(lo == (a.dot(b) == 1), "{}: {a} + {b}", lat.id());
                if lo {
                    ensure!(
                        s.euler_char().unwrap() == a.euler_char().unwrap() + b.euler_char().unwrap()
                            && s.square() == a.square() + b.square() + 2,
                        "{}: {a} + {b}",
                        lat.id()
                    );
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("{} lattices, {singles} classes, {pairs} pairs", lattices.len()))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("root and (-1)-class counts", root_counts),
        ("cyclic strong admissible classification", cyclic_strong_table),
        ("length <= 5 admissible families", length_le5),
        ("sum invariant on random augmentation chains", sum_invariant),
        ("fast and naive exceptionality agree", oracle_equivalence),
        ("listed systems are cyclic strong", listed_systems),
        ("root partition on every catalog surface", root_partition),
        ("segment square bounds", segment_bounds),
        ("pseudoheight bounds", pseudoheight_bounds),
        ("twist reduction", twist_reduction),
        ("twisting preserves lo/slo status", twist_preserves_status),
        ("Riemann-Roch identities", riemann_roch),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(check);
        let elapsed = start.elapsed();
        match result {
            Ok(Ok(detail)) => println!("PASS {:>2} {name}: {detail} [{elapsed:.2?}]", i + 1),
            Ok(Err(msg)) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {msg} [{elapsed:.2?}]", i + 1);
            }
            Err(_) => {
                failures += 1;
                println!("FAIL {:>2} {name}: panicked [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
