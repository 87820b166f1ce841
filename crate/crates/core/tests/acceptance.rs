//! End-to-end acceptance suite. Runs every criterion, prints one line per
//! criterion and exits non-zero if any fails.

use std::time::{Duration, Instant};

use kproj_core::complex::{first_non_exact, ChainMap, Complex};
use kproj_core::duality::{decompose_resolution, dual_composition_check, duality_roundtrip_check, rebuild_verify, RightResolution};
use kproj_core::flatness::{check_certificate, cycle_flatness_probe, flat_certificate, pd_bound_collapse, CycleProbe, EngineConfig, FlatRelation, PdCollapse};
use kproj_core::generator::{build_generator, h0_hom_equivalence, verify_generator_quasi_iso, ResolutionEnd, DEFAULT_RESOLUTION_DEPTH};
use kproj_core::graded::Window;
use kproj_core::homotopy::{split_exactness_check, SplitVerdict};
use kproj_core::module::FPModule;
use kproj_core::sample::{self, Sampler};
use kproj_core::{Ring, RingMatrix, Side};
use kproj_core::cli::{run_texts, Flags, EXIT_USAGE};
use kproj_core::io::{emit, parse_document, Document, Payload, Value};

/// Zero tolerance everywhere: all checks are exact identities.
const TOLERANCE: i128 = 0;

fn rings() -> Vec<Ring> {
    vec![Ring::Integers, Ring::prime_field(5).unwrap(), Ring::modulo(4).unwrap()]
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn ok(detail: impl Into<String>) -> Outcome {
    Outcome { passed: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { passed: false, detail: detail.into() }
}

fn generators_resolve() -> Outcome {
    let mut rng = sample::sampler(1);
    let mut count = 0;
    for ring in rings() {
        for k in 0..200 {
            let m = sample::module(&mut rng, ring, Side::Left, 3, 5);
            let pkg = match build_generator(&m, DEFAULT_RESOLUTION_DEPTH) {
                Ok(p) => p,
                Err(e) => return fail(format!("{ring} sample {k}: {e}")),
            };
            if pkg.end.is_truncated() {
                return fail(format!("{ring} sample {k}: resolution did not close"));
            }
            if let Some(j) = pkg.check_augmentation(Window::new(-6, 0)) {
                return fail(format!("{ring} sample {k}: augmentation fails in degree {j}"));
            }
            match pkg.double_dual_is_isomorphism() {
                Ok(true) => {}
                Ok(false) => return fail(format!("{ring} sample {k}: P -> P** not invertible")),
                Err(e) => return fail(format!("{ring} sample {k}: {e}")),
            }
            count += 1;
        }
    }
    ok(format!("{count} packages"))
}

fn random_q(rng: &mut Sampler, ring: Ring) -> Complex {
    use rand::Rng;
    let len = rng.gen_range(1..=3);
    let lo = rng.gen_range(-2..=0);
    sample::complex(rng, ring, Side::Left, lo, len, 3, 5)
}

fn cone_hom_exact() -> Outcome {
    let mut rng = sample::sampler(2);
    let rings = rings();
    for k in 0..100 {
        let ring = rings[k % rings.len()];
        let m = sample::module(&mut rng, ring, Side::Left, 3, 5);
        let q = random_q(&mut rng, ring);
        let pkg = match build_generator(&m, DEFAULT_RESOLUTION_DEPTH) {
            Ok(p) => p,
            Err(e) => return fail(format!("pair {k}: {e}")),
        };
        match verify_generator_quasi_iso(&pkg, &q, Window::new(-4, 4)) {
            Ok(r) if r.passed() => {}
            Ok(r) => return fail(format!("pair {k} over {ring}: {r:?}")),
            Err(e) => return fail(format!("pair {k} over {ring}: {e}")),
        }
    }
    ok("100 pairs")
}

fn homology_chain() -> Outcome {
    let mut rng = sample::sampler(3);
    let mut checks = 0;
    for ring in rings() {
        let pkg = build_generator(&FPModule::free(ring, Side::Left, 1), DEFAULT_RESOLUTION_DEPTH).unwrap();
        for k in 0..50 {
            let q = random_q(&mut rng, ring);
            match h0_hom_equivalence(&pkg, &q, Window::new(-3, 3)) {
                Ok(r) if r.is_isomorphism && r.suspensions.len() == 7 && r.suspensions.iter().all(|s| s.1) => checks += 7,
                Ok(r) => return fail(format!("{ring} sample {k}: {:?}", r.suspensions)),
                Err(e) => return fail(format!("{ring} sample {k}: {e}")),
            }
        }
    }
    ok(format!("{checks} isomorphisms"))
}

fn flat_certificates() -> Outcome {
    use rand::Rng;
    let mut rng = sample::sampler(4);
    let mut verified = 0;
    for ring in rings() {
        for k in 0..500 {
            let m = rng.gen_range(1..=4);
            let rank = rng.gen_range(0..=3);
            let rel = sample::relation(&mut rng, ring, m, rank, 5);
            let cert = match flat_certificate(&rel) {
                Ok(c) => c,
                Err(e) => return fail(format!("{ring} relation {k}: {e}")),
            };
            if let Err(e) = independent_check(&rel, &cert) {
                return fail(format!("{ring} relation {k}: {e}"));
            }
            if check_certificate(&rel, &cert, None, None).is_err() {
                return fail(format!("{ring} relation {k}: library checker disagrees"));
            }
            verified += 1;
        }
    }
    ok(format!("{verified}/1500 verified"))
}

/// Entrywise recomputation of `Σ_s a_s ast[s][t]` and `Σ_t ast[s][t] q_t`.
fn independent_check(rel: &FlatRelation, cert: &kproj_core::flatness::FlatCertificate) -> Result<(), String> {
    let ring = rel.ring();
    let (m, n) = (rel.a.len(), cert.ast.cols());
    for t in 0..n {
        let s: i128 = (0..m).fold(0, |acc, s| ring.add(acc, ring.mul(rel.a[s], cert.ast.get(s, t))));
        if s.abs() > TOLERANCE {
            return Err(format!("column {t} of ast is not annihilated"));
        }
    }
    for s in 0..m {
        for r in 0..rel.z.rows() {
            let v = (0..n).fold(0, |acc, t| ring.add(acc, ring.mul(cert.ast.get(s, t), cert.q.get(r, t))));
            if ring.sub(v, rel.z.get(r, s)).abs() > TOLERANCE {
                return Err(format!("z_{s} is not recovered"));
            }
        }
    }
    Ok(())
}

fn split_exact() -> Outcome {
    use rand::Rng;
    let mut rng = sample::sampler(5);
    for k in 0..50 {
        let len = rng.gen_range(2..=5);
        let lo = rng.gen_range(-3..=0);
        let c = sample::contractible(&mut rng, Ring::Integers, Side::Left, lo, len, 6);
        let window = Window::new(lo - 2, lo + len as i64 + 1);
        match pd_bound_collapse(&c, EngineConfig::for_ring(Ring::Integers), window) {
            Ok(PdCollapse::Collapsed { verdict: SplitVerdict::SplitExact { homotopy, .. }, .. }) => {
                let id = ChainMap::identity(&c);
                let zero = ChainMap::zero(&c, &c);
                if !homotopy.failures(&id, &zero, window).is_empty() {
                    return fail(format!("complex {k}: homotopy identity fails"));
                }
            }
            Ok(v) => return fail(format!("complex {k}: {v:?}")),
            Err(e) => return fail(format!("complex {k}: {e}")),
        }
    }
    ok("50 complexes")
}

fn negative_control() -> Outcome {
    let r = Ring::modulo(4).unwrap();
    let two = RingMatrix::from_vec(r, vec![vec![2]]);
    let q = Complex::periodic(r, Side::Left, two.clone()).unwrap();
    if let Some(j) = first_non_exact(&q, Window::new(-20, 20)) {
        return fail(format!("not exact in degree {j}"));
    }
    match split_exactness_check(&q, Window::new(-3, 3)) {
        Ok(SplitVerdict::ExactNotSplit { cycle, .. }) if cycle.order() == Some(2) => {}
        v => return fail(format!("split check: {v:?}")),
    }
    let rel = FlatRelation::new(vec![2], RingMatrix::from_vec(r, vec![vec![2]])).unwrap();
    match cycle_flatness_probe(&q, 0, &rel, 16) {
        Ok(CycleProbe::HomNonVanishing { hom, .. }) if !hom.is_zero() => ok("exact, cycle Z/2 not projective, Hom hypothesis fails"),
        v => fail(format!("probe: {v:?}")),
    }
}

fn decomposition() -> Outcome {
    let mut rng = sample::sampler(7);
    let mut made = 0;
    while made < 100 {
        let m = sample::module(&mut rng, Ring::Integers, Side::Right, 3, 5);
        if m.rank0() == 0 {
            continue;
        }
        let (res, end) = RightResolution::of(&m, 16).unwrap();
        let ResolutionEnd::Finite { length } = end else {
            return fail(format!("Z resolution did not terminate: {end:?}"));
        };
        let tree = decompose_resolution(&res.complex, length + 1).unwrap();
        match rebuild_verify(&tree, Window::new(-(length as i64) - 2, 1)) {
            Ok(r) if r.leaves == length + 1 && !r.window_relative => {}
            Ok(r) => return fail(format!("length {length} gave {} leaves", r.leaves)),
            Err(e) => return fail(format!("Z module {made}: {e}")),
        }
        made += 1;
    }
    let z4 = Ring::modulo(4).unwrap();
    for k in 0..100 {
        let m = sample::module(&mut rng, z4, Side::Right, 3, 5);
        let (res, _) = RightResolution::of(&m, 16).unwrap();
        let tree = decompose_resolution(&res.complex, 4).unwrap();
        if let Err(e) = rebuild_verify(&tree, Window::new(-6, 0)) {
            return fail(format!("Z/4 module {k}: {e}"));
        }
    }
    ok("100 Z modules, 100 Z/4 modules at depth 4")
}

fn duality() -> Outcome {
    use rand::Rng;
    let mut rng = sample::sampler(8);
    let rings = rings();
    for k in 0..300 {
        let ring = rings[k % 3];
        let len = rng.gen_range(1..=4);
        let g = sample::complex(&mut rng, ring, Side::Left, -1, len, 4, 5);
        let f = sample::chain_map(&mut rng, &g, &g, 3);
        match duality_roundtrip_check(&g, Window::new(-4, 4), Some(&f)) {
            Ok(r) if r.passed() => {}
            v => return fail(format!("complex {k}: {v:?}")),
        }
    }
    for k in 0..100 {
        let ring = rings[k % 3];
        let x = sample::complex(&mut rng, ring, Side::Left, -1, 3, 3, 5);
        let y = sample::complex(&mut rng, ring, Side::Left, -1, 3, 3, 5);
        let z = sample::complex(&mut rng, ring, Side::Left, -1, 3, 3, 5);
        let f = sample::chain_map(&mut rng, &x, &y, 3);
        let g = sample::chain_map(&mut rng, &y, &z, 3);
        match dual_composition_check(&f, &g, Window::new(-4, 4)) {
            Ok(true) => {}
            v => return fail(format!("pair {k}: {v:?}")),
        }
    }
    ok("300 roundtrips, 100 compositions")
}

#[derive(serde::Deserialize)]
struct Case {
    command: String,
    inputs: Vec<String>,
    flags: Vec<String>,
    status: u8,
}

fn fixture_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn parse_flags(args: &[String]) -> Result<Flags, String> {
    let mut f = Flags::default();
    for a in args {
        let (k, v) = a.split_once('=').ok_or(format!("flag `{a}` needs a value"))?;
        match k {
            "--window" => f.window = Some(v.parse().map_err(|e| format!("{e}"))?),
            "--depth" => f.depth = Some(v.parse().map_err(|_| "bad depth")?),
            "--bound" => f.bound = Some(v.parse().map_err(|_| "bad bound")?),
            "--seed" => f.seed = Some(v.parse().map_err(|_| "bad seed")?),
            "--format" => f.format = v.parse()?,
            _ => return Err(format!("unknown flag `{k}`")),
        }
    }
    Ok(f)
}

/// `d^{j-1} s^j + s^{j+1} d^j = id` on the verdict's window, from the
/// embedded complex and homotopy alone.
fn recheck_split(doc: &Document) -> Result<(), String> {
    let Some(Payload::Verdict(v)) = &doc.payload else { return Ok(()) };
    if v.command != "split-check" || !v.holds {
        return Ok(());
    }
    let (Some(Value::Complex(c)), Some(Value::List(hs))) = (v.field("complex"), v.field("homotopy")) else {
        return Err("split verdict lacks its witnesses".into());
    };
    let window = v.window.ok_or("split verdict lacks a window")?;
    let s = |j: i64| -> Option<RingMatrix> {
        hs.iter().find(|h| h.get("degree") == Some(&Value::Int(j as i128))).and_then(|h| match h.get("matrix") {
            Some(Value::Matrix(m)) => Some(m.clone()),
            _ => None,
        })
    };
    for j in window.degrees() {
        let (sj, sj1) = (s(j).ok_or(format!("no s^{j}"))?, s(j + 1).ok_or(format!("no s^{}", j + 1))?);
        let lhs = &(&c.differential(j - 1) * &sj) + &(&sj1 * &c.differential(j));
        if !lhs.is_identity() || lhs.rows() != c.rank(j) {
            return Err(format!("homotopy identity fails in degree {j}"));
        }
    }
    Ok(())
}

fn cli_contract() -> Outcome {
    let dir = fixture_dir();
    let manifest = std::fs::read_to_string(dir.join("manifest.json")).expect("manifest");
    let cases: Vec<Case> = serde_json::from_str(&manifest).expect("manifest parses");
    let mut documents = std::collections::BTreeSet::new();
    let mut commands = std::collections::BTreeSet::new();
    let mut emitted = 0;
    for case in &cases {
        let label = format!("{} {} {}", case.command, case.inputs.join(" "), case.flags.join(" "));
        let texts: Vec<String> = case.inputs.iter().map(|i| std::fs::read_to_string(dir.join(i)).expect("fixture")).collect();
        for (name, t) in case.inputs.iter().zip(&texts) {
            documents.insert(name.clone());
            if let Ok(d) = parse_document(t) {
                if emit(&d) != *t {
                    return fail(format!("{name} is not in emitted form"));
                }
            }
        }
        commands.insert(case.command.clone());
        let first = match parse_flags(&case.flags) {
            Ok(flags) => run_texts(&case.command, &texts, &flags),
            Err(_) if case.status == EXIT_USAGE => continue,
            Err(e) => return fail(format!("{label}: {e}")),
        };
        if first.status != case.status {
            return fail(format!("{label}: exit {} expected {} ({:?})", first.status, case.status, first.message));
        }
        match (&first.document, first.status) {
            (None, EXIT_USAGE) => continue,
            (Some(d), _) if first.status != EXIT_USAGE => {
                let text = emit(d);
                let again = parse_document(&text).map(|d| emit(&d));
                if again.as_ref() != Ok(&text) {
                    return fail(format!("{label}: output does not round-trip"));
                }
                let second = run_texts(&case.command, &texts, &parse_flags(&case.flags).unwrap());
                if second.document.as_ref().map(emit) != Some(text) {
                    return fail(format!("{label}: output is not deterministic"));
                }
                if let Some(Payload::Verdict(v)) = &d.payload {
                    let windowed = ["generator", "check-qiso", "homology", "split-check"].contains(&v.command.as_str());
                    if windowed && v.window.is_none() {
                        return fail(format!("{label}: window-relative verdict without a window"));
                    }
                }
                if let Some(Payload::Certificate(c)) = &d.payload {
                    if let (Some(cert), None) = (&c.certificate, &c.target) {
                        if let Err(e) = independent_check(&c.relation, cert) {
                            return fail(format!("{label}: {e}"));
                        }
                    }
                }
                if let Err(e) = recheck_split(d) {
                    return fail(format!("{label}: {e}"));
                }
                emitted += 1;
            }
            _ => return fail(format!("{label}: status {} with document {:?}", first.status, first.document.is_some())),
        }
    }
    if documents.len() < 30 || commands.len() < 8 {
        return fail(format!("corpus covers {} documents and {} commands", documents.len(), commands.len()));
    }
    ok(format!("{} cases, {} documents, {} commands, {emitted} outputs re-parsed", cases.len(), documents.len(), commands.len()))
}

fn main() {
    let criteria: Vec<(&str, Duration, fn() -> Outcome)> = vec![
        ("1 generator construction", Duration::from_secs(30), generators_resolve),
        ("2 cone Hom exactness", Duration::from_secs(60), cone_hom_exact),
        ("3 Hom(Σ^i P*, Q) = H^-i Q", Duration::from_secs(30), homology_chain),
        ("4 flat certificates", Duration::from_secs(10), flat_certificates),
        ("5 split exactness", Duration::from_secs(60), split_exact),
        ("6 negative control", Duration::from_secs(60), negative_control),
        ("7 decomposition", Duration::from_secs(60), decomposition),
        ("8 duality roundtrip", Duration::from_secs(20), duality),
        ("9 CLI contract", Duration::from_secs(60), cli_contract),
    ];
    let mut failures = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        let slow = if elapsed > budget { format!(" (over the {budget:?} budget)") } else { String::new() };
        println!("criterion {name}: {status} in {elapsed:.2?}{slow}: {}", outcome.detail);
        if !outcome.passed {
            failures += 1;
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
