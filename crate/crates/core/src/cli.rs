//! Commands behind the `kproj` binary: each takes parsed documents and
//! flags and returns a document plus an exit status.
//!
//! Status 0: the check holds (or the requested object was produced).
//! Status 1: a property failed; the document is a verdict carrying the
//! counterexample. Status 2: usage, input or evaluation errors; no document.

use std::fmt;

use rand::Rng;

use crate::complex::{cone, homology, is_quasi_isomorphism_on, Complex};
use crate::duality::{decompose_resolution, rebuild_verify, RightResolution};
use crate::error::Error;
use crate::flatness::{check_certificate, flat_certificate_in, pd_bound_collapse, EngineConfig, PdCollapse};
use crate::generator::{build_generator, free_resolution, verify_generator_quasi_iso, ResolutionEnd, DEFAULT_RESOLUTION_DEPTH};
use crate::graded::Window;
use crate::hom::hom_homology;
use crate::homotopy::{split_exactness_check, SplitVerdict};
use crate::io::{emit, parse_document, render_text, CertificateDoc, Document, Payload, TreeDoc, Value, Verdict};
use crate::module::{dualize_module, FPModule, ProjectiveDimension};
use crate::ring::{Ring, Side};
use crate::{sample, Degree};

pub const EXIT_OK: u8 = 0;
pub const EXIT_PROPERTY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

pub const COMMANDS: [&str; 8] =
    ["resolve", "dualize", "generator", "check-qiso", "homology", "flat-cert", "decompose", "split-check"];

/// Random complexes tried by `check-qiso` when only a module is given.
const SAMPLED_TARGETS: usize = 5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    Text,
    #[default]
    Machine,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Format, String> {
        match s {
            "text" => Ok(Format::Text),
            "machine" => Ok(Format::Machine),
            other => Err(format!("unknown format `{other}`, expected text or machine")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    pub window: Option<Window>,
    pub depth: Option<usize>,
    pub bound: Option<usize>,
    pub seed: Option<u64>,
    pub format: Format,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: u8,
    pub document: Option<Document>,
    /// Diagnostic for status 2.
    pub message: Option<String>,
}

impl Outcome {
    fn done(doc: Document, holds: bool) -> Outcome {
        Outcome { status: if holds { EXIT_OK } else { EXIT_PROPERTY }, document: Some(doc), message: None }
    }

    fn usage(message: impl fmt::Display) -> Outcome {
        Outcome { status: EXIT_USAGE, document: None, message: Some(message.to_string()) }
    }

    /// What goes to stdout.
    pub fn render(&self, format: Format) -> String {
        match (&self.document, format) {
            (Some(d), Format::Machine) => emit(d),
            (Some(d), Format::Text) => render_text(d),
            (None, _) => String::new(),
        }
    }
}

type Step = Result<Outcome, Outcome>;

impl From<Error> for Outcome {
    fn from(e: Error) -> Outcome {
        Outcome::usage(e)
    }
}

/// Parses the input texts, then runs the command.
pub fn run_texts(name: &str, texts: &[String], flags: &Flags) -> Outcome {
    let mut docs = Vec::with_capacity(texts.len());
    for (i, t) in texts.iter().enumerate() {
        match parse_document(t) {
            Ok(d) => docs.push(d),
            Err(e) => return Outcome::usage(format!("input {}: {e}", i + 1)),
        }
    }
    run_command(name, &docs, flags)
}

pub fn run_command(name: &str, inputs: &[Document], flags: &Flags) -> Outcome {
    let Some(ring) = inputs.first().map(|d| d.ring) else {
        return Outcome::usage(format!("`{name}` needs at least one input document"));
    };
    if let Some(d) = inputs.iter().find(|d| d.ring != ring) {
        return Outcome::usage(format!("inputs mix the rings {ring} and {}", d.ring));
    }
    let payloads: Vec<&Payload> = match inputs.iter().map(|d| d.payload.as_ref()).collect::<Option<Vec<_>>>() {
        Some(p) => p,
        None => return Outcome::usage("an input document has no payload"),
    };
    let step = match name {
        "resolve" => resolve(ring, &payloads, flags),
        "dualize" => dualize(ring, &payloads),
        "generator" => generator(ring, &payloads, flags),
        "check-qiso" => check_qiso(ring, &payloads, flags),
        "homology" => homology_cmd(ring, &payloads, flags),
        "flat-cert" => flat_cert(ring, &payloads),
        "decompose" => decompose(ring, &payloads, flags),
        "split-check" => split_check(ring, &payloads, flags),
        other => Err(Outcome::usage(format!("unknown command `{other}`; expected one of {}", COMMANDS.join(", ")))),
    };
    step.unwrap_or_else(|o| o)
}

fn kinds(payloads: &[&Payload]) -> String {
    payloads.iter().map(|p| p.kind()).collect::<Vec<_>>().join(", ")
}

fn wrong_inputs(command: &str, expected: &str, payloads: &[&Payload]) -> Outcome {
    Outcome::usage(format!("`{command}` expects {expected}, got [{}]", kinds(payloads)))
}

fn verdict(ring: Ring, command: &str, holds: bool, window: Option<Window>, witness: Vec<(&str, Value)>) -> Outcome {
    let v = Verdict {
        command: command.to_string(),
        holds,
        window,
        witness: witness.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
    };
    Outcome::done(Document::new(ring, Payload::Verdict(v)), holds)
}

fn int(x: impl TryInto<i128>) -> Value {
    Value::Int(x.try_into().unwrap_or(i128::MAX))
}

fn end_value(end: ResolutionEnd) -> Value {
    match end {
        ResolutionEnd::Finite { length } => Value::record(vec![("type", Value::Text("finite".into())), ("length", int(length))]),
        ResolutionEnd::Periodic { start, period } => Value::record(vec![
            ("type", Value::Text("periodic".into())),
            ("start", int(start)),
            ("period", int(period)),
        ]),
        ResolutionEnd::Truncated { depth } => Value::record(vec![("type", Value::Text("truncated".into())), ("depth", int(depth))]),
    }
}

fn module_value(m: &FPModule) -> Value {
    Value::record(vec![
        ("invariants", Value::List(m.invariants().into_iter().map(Value::Int).collect())),
        ("module", Value::Module(m.clone())),
    ])
}

fn depth(flags: &Flags) -> usize {
    flags.depth.unwrap_or(DEFAULT_RESOLUTION_DEPTH)
}

fn default_window(c: &Complex) -> Window {
    let (a, b) = c.shape().check_range(0);
    Window::new(a, b)
}

fn resolve(ring: Ring, payloads: &[&Payload], flags: &Flags) -> Step {
    let [Payload::Module(m)] = payloads else {
        return Err(wrong_inputs("resolve", "one module", payloads));
    };
    let d = depth(flags);
    let (p, end) = free_resolution(m.presentation(), m.rank0(), m.side(), d)?;
    // A truncated resolution is exact only above the cut.
    let window = end.is_truncated().then(|| Window::new(1 - d as Degree, 0));
    Ok(verdict(
        ring,
        "resolve",
        true,
        window,
        vec![("module", Value::Module(m.clone())), ("end", end_value(end)), ("resolution", Value::Complex(p))],
    ))
}

fn dualize(ring: Ring, payloads: &[&Payload]) -> Step {
    let out = match payloads {
        [Payload::Matrix(m)] => Payload::Matrix(m.transpose()),
        [Payload::Module(m)] => Payload::Module(dualize_module(m)),
        [Payload::Complex(c)] => Payload::Complex(c.dualize()?),
        [Payload::ChainMap(f)] => Payload::ChainMap(f.dualize()?),
        _ => return Err(wrong_inputs("dualize", "one matrix, module, complex or chain map", payloads)),
    };
    Ok(Outcome::done(Document::new(ring, out), true))
}

fn generator(ring: Ring, payloads: &[&Payload], flags: &Flags) -> Step {
    let [Payload::Module(m)] = payloads else {
        return Err(wrong_inputs("generator", "one left module", payloads));
    };
    let pkg = build_generator(m, depth(flags))?;
    let window = flags.window.unwrap_or(Window::new(-6, 0));
    let failure = pkg.check_augmentation(window);
    let iso = pkg.double_dual_is_isomorphism()?;
    let mut witness = vec![
        ("module", Value::Module(pkg.module.clone())),
        ("dual", Value::Module(pkg.dual.clone())),
        ("embedding", Value::Matrix(pkg.embedding.clone())),
        ("end", end_value(pkg.end)),
        ("resolution", Value::Complex(pkg.resolution.clone())),
        ("augmentation", Value::ChainMap(pkg.augmentation.clone())),
        ("generator", Value::Complex(pkg.dual_resolution.clone())),
        ("comparison", Value::ChainMap(pkg.comparison.clone())),
        ("double_dual_invertible", Value::Bool(iso)),
    ];
    if let Some(j) = failure {
        witness.push(("augmentation_failure", int(j)));
        witness.push(("cone_homology", module_value(&homology(&cone(&pkg.augmentation)?.complex, j))));
    }
    Ok(verdict(ring, "generator", failure.is_none() && iso, Some(window), witness))
}

fn check_qiso(ring: Ring, payloads: &[&Payload], flags: &Flags) -> Step {
    match payloads {
        [Payload::ChainMap(f)] => {
            let window = flags.window.unwrap_or_else(|| {
                let (s, t) = (default_window(f.source()), default_window(f.target()));
                Window::new(s.lo.min(t.lo), s.hi.max(t.hi))
            });
            let failure = is_quasi_isomorphism_on(f, window);
            let mut witness = vec![("map", Value::ChainMap(f.clone()))];
            if let Some(j) = failure {
                witness.push(("degree", int(j)));
                witness.push(("cone_homology", module_value(&homology(&cone(f)?.complex, j))));
            }
            Ok(verdict(ring, "check-qiso", failure.is_none(), Some(window), witness))
        }
        [Payload::Module(m), Payload::Complex(q)] => qiso_against(ring, m, std::slice::from_ref(q), flags),
        [Payload::Module(m)] => {
            let seed = flags.seed.unwrap_or(0);
            let mut rng = sample::sampler(seed);
            let bound = flags.bound.unwrap_or(5) as i128;
            let qs: Vec<Complex> = (0..SAMPLED_TARGETS)
                .map(|_| {
                    let lo = rng.gen_range(-2..=0);
                    let len = rng.gen_range(1..=3);
                    sample::complex(&mut rng, ring, Side::Left, lo, len, 3, bound)
                })
                .collect();
            qiso_against(ring, m, &qs, flags)
        }
        _ => Err(wrong_inputs("check-qiso", "a chain map, a module, or a module and a complex", payloads)),
    }
}

fn qiso_against(ring: Ring, m: &FPModule, qs: &[Complex], flags: &Flags) -> Step {
    let pkg = build_generator(m, depth(flags))?;
    let window = flags.window.unwrap_or(Window::new(-4, 4));
    let mut relative = false;
    for (i, q) in qs.iter().enumerate() {
        let report = verify_generator_quasi_iso(&pkg, q, window)?;
        relative |= report.window_relative;
        if !report.passed() {
            let mut witness = vec![("target", Value::Complex(q.clone())), ("sample", int(i))];
            if let Some(j) = report.cone_failure {
                witness.push(("degree", int(j)));
                let c = cone(&pkg.comparison)?.complex;
                witness.push(("hom_homology", module_value(&hom_homology(&c, q, j)?)));
            }
            if let Some(b) = report.double_dual_iso {
                witness.push(("double_dual_invertible", Value::Bool(b)));
            }
            if let Some(b) = report.dual_comparison_qiso {
                witness.push(("dual_comparison_qiso", Value::Bool(b)));
            }
            return Ok(verdict(ring, "check-qiso", false, Some(window), witness));
        }
    }
    let mut witness = vec![
        ("generator", Value::Complex(pkg.dual_resolution.clone())),
        ("comparison", Value::ChainMap(pkg.comparison.clone())),
        ("targets", int(qs.len())),
        ("window_relative", Value::Bool(relative)),
    ];
    if let Some(s) = flags.seed {
        witness.push(("seed", int(s)));
    }
    Ok(verdict(ring, "check-qiso", true, Some(window), witness))
}

fn homology_cmd(ring: Ring, payloads: &[&Payload], flags: &Flags) -> Step {
    let [Payload::Complex(c)] = payloads else {
        return Err(wrong_inputs("homology", "one complex", payloads));
    };
    let window = flags.window.unwrap_or_else(|| default_window(c));
    let mut exact = true;
    let groups = window
        .degrees()
        .map(|j| {
            let h = homology(c, j);
            exact &= h.is_zero();
            let Value::Record(mut f) = module_value(&h) else { unreachable!() };
            f.insert(0, ("degree".into(), int(j)));
            Value::Record(f)
        })
        .collect();
    Ok(verdict(ring, "homology", true, Some(window), vec![("exact", Value::Bool(exact)), ("groups", Value::List(groups))]))
}

fn flat_cert(ring: Ring, payloads: &[&Payload]) -> Step {
    let [Payload::Certificate(doc)] = payloads else {
        return Err(wrong_inputs("flat-cert", "one certificate document", payloads));
    };
    let target = doc.target.clone().unwrap_or_else(|| FPModule::free(ring, Side::Left, doc.relation.z.rows()));
    let relations = (target.rank1() > 0).then(|| target.presentation());
    match &doc.certificate {
        Some(cert) => match check_certificate(&doc.relation, cert, None, relations) {
            Ok(()) => Ok(Outcome::done(Document::new(ring, Payload::Certificate(doc.clone())), true)),
            Err(why) => Ok(verdict(ring, "flat-cert", false, None, vec![("failure", Value::Text(why))])),
        },
        None => match flat_certificate_in(&target, &doc.relation)? {
            Some(cert) => {
                let out = CertificateDoc { certificate: Some(cert), ..doc.clone() };
                Ok(Outcome::done(Document::new(ring, Payload::Certificate(out)), true))
            }
            None => Ok(verdict(
                ring,
                "flat-cert",
                false,
                None,
                vec![("failure", Value::Text("the relation is not trivial in the target".into()))],
            )),
        },
    }
}

fn decompose(ring: Ring, payloads: &[&Payload], flags: &Flags) -> Step {
    let (q, levels, window) = match payloads {
        [Payload::Module(m)] => {
            if m.side() != Side::Right {
                return Err(Outcome::usage("`decompose` resolves right modules"));
            }
            let (res, end) = RightResolution::of(m, DEFAULT_RESOLUTION_DEPTH)?;
            match end {
                ResolutionEnd::Finite { length } => {
                    let w = Window::new(-(length as Degree) - 2, 1);
                    (res.complex, flags.depth.unwrap_or(length + 1), flags.window.unwrap_or(w))
                }
                _ => (res.complex, flags.depth.unwrap_or(4), flags.window.unwrap_or(Window::new(-6, 0))),
            }
        }
        [Payload::Complex(c)] => (c.clone(), flags.depth.unwrap_or(4), flags.window.unwrap_or(Window::new(-6, 0))),
        _ => return Err(wrong_inputs("decompose", "one right module or one complex", payloads)),
    };
    let tree = decompose_resolution(&q, levels)?;
    match rebuild_verify(&tree, window) {
        Ok(report) => Ok(Outcome::done(Document::new(ring, Payload::BuildTree(TreeDoc::from_tree(&tree, Some(&report)))), true)),
        Err(Error::Invariant(why)) => Ok(verdict(
            ring,
            "decompose",
            false,
            Some(window),
            vec![("target", Value::Complex(q)), ("failure", Value::Text(why))],
        )),
        Err(e) => Err(e.into()),
    }
}

fn split_check(ring: Ring, payloads: &[&Payload], flags: &Flags) -> Step {
    let [Payload::Complex(c)] = payloads else {
        return Err(wrong_inputs("split-check", "one complex", payloads));
    };
    let window = flags.window.unwrap_or_else(|| default_window(c));
    let complex = ("complex", Value::Complex(c.clone()));
    let Some(bound) = flags.bound else {
        return Ok(split_verdict(ring, window, split_exactness_check(c, window)?, vec![complex]));
    };
    Ok(match pd_bound_collapse(c, EngineConfig { bound }, window)? {
        PdCollapse::Collapsed { dimensions, verdict: v } => {
            let dims = dimensions
                .iter()
                .map(|&(j, d)| Value::record(vec![("degree", int(j)), ("dimension", int(d))]))
                .collect();
            split_verdict(ring, window, v, vec![complex, ("projective_dimensions", Value::List(dims))])
        }
        PdCollapse::NotExact { degree, homology } => verdict(
            ring,
            "split-check",
            false,
            Some(window),
            vec![complex, ("degree", int(degree)), ("homology", module_value(&homology))],
        ),
        PdCollapse::NotProjective { degree, cycle, dimension } => {
            let dim = match dimension {
                ProjectiveDimension::Exactly(d) => Value::record(vec![("exactly", int(d))]),
                ProjectiveDimension::Exceeds(d) => Value::record(vec![("exceeds", int(d))]),
            };
            verdict(
                ring,
                "split-check",
                false,
                Some(window),
                vec![complex, ("degree", int(degree)), ("cycle", module_value(&cycle)), ("dimension", dim)],
            )
        }
        PdCollapse::WindowTooNarrow { needed, width } => {
            return Err(Outcome::usage(format!("window {window} has width {width}; the bound needs at least {needed}")))
        }
    })
}

fn split_verdict(ring: Ring, window: Window, v: SplitVerdict, mut witness: Vec<(&'static str, Value)>) -> Outcome {
    match v {
        SplitVerdict::SplitExact { window, homotopy, sections } => {
            let wide = Window::new(window.lo - 1, window.hi + 1);
            witness.push(("homotopy", Value::matrices(&homotopy.components_in(wide))));
            let sections: Vec<_> = sections.into_iter().map(|(j, s)| (j, s.matrix().clone())).collect();
            witness.push(("sections", Value::matrices(&sections)));
            verdict(ring, "split-check", true, Some(window), witness)
        }
        SplitVerdict::ExactNotSplit { degree, cycle } => {
            witness.push(("degree", int(degree)));
            witness.push(("cycle", module_value(&cycle)));
            verdict(ring, "split-check", false, Some(window), witness)
        }
        SplitVerdict::NotExact { degree, homology } => {
            witness.push(("degree", int(degree)));
            witness.push(("homology", module_value(&homology)));
            verdict(ring, "split-check", false, Some(window), witness)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatness::FlatRelation;
    use crate::matrix::RingMatrix;

    fn z() -> Ring {
        Ring::Integers
    }

    fn doc(p: Payload) -> Document {
        Document::new(p_ring(&p), p)
    }

    fn p_ring(p: &Payload) -> Ring {
        match p {
            Payload::Module(m) => m.ring(),
            Payload::Complex(c) => c.ring(),
            Payload::Certificate(c) => c.relation.ring(),
            _ => z(),
        }
    }

    fn verdict_of(o: &Outcome) -> &Verdict {
        match o.document.as_ref().and_then(|d| d.payload.as_ref()) {
            Some(Payload::Verdict(v)) => v,
            other => panic!("{other:?}"),
        }
    }

    fn times_two() -> Complex {
        Complex::bounded(z(), Side::Left, -1, vec![1, 1], vec![RingMatrix::from_vec(z(), vec![vec![2]])]).unwrap()
    }

    #[test]
    fn generator_of_torsion_module_has_zero_generator() {
        let out = run_command("generator", &[doc(Payload::Module(FPModule::cyclic(z(), Side::Left, 2)))], &Flags::default());
        assert_eq!(out.status, EXIT_OK);
        let v = verdict_of(&out);
        let Some(Value::Complex(p)) = v.field("generator") else { panic!() };
        assert!(p.support().is_none());
        let Some(Value::Module(dual)) = v.field("dual") else { panic!() };
        assert!(dual.is_zero());
    }

    #[test]
    fn homology_of_times_two() {
        let flags = Flags { window: Some(Window::new(-1, 0)), ..Flags::default() };
        let out = run_command("homology", &[doc(Payload::Complex(times_two()))], &flags);
        assert_eq!(out.status, EXIT_OK);
        let v = verdict_of(&out);
        assert_eq!(v.window, Some(Window::new(-1, 0)));
        let Some(Value::List(groups)) = v.field("groups") else { panic!() };
        let inv = |g: &Value| g.get("invariants").cloned();
        assert_eq!(inv(&groups[0]), Some(Value::List(vec![])));
        assert_eq!(inv(&groups[1]), Some(Value::List(vec![Value::Int(2)])));
    }

    #[test]
    fn flat_cert_example() {
        let rel = FlatRelation::new(vec![2, 3], RingMatrix::from_vec(z(), vec![vec![3, -2]])).unwrap();
        let input = CertificateDoc { relation: rel, target: None, certificate: None };
        let out = run_command("flat-cert", &[doc(Payload::Certificate(input))], &Flags::default());
        assert_eq!(out.status, EXIT_OK);
        let Some(Payload::Certificate(c)) = out.document.as_ref().and_then(|d| d.payload.as_ref()) else { panic!() };
        let cert = c.certificate.as_ref().unwrap();
        assert_eq!(cert.ast, RingMatrix::from_vec(z(), vec![vec![3], vec![-2]]));
        assert_eq!(cert.q, RingMatrix::from_vec(z(), vec![vec![1]]));
        // A tampered witness is a property failure.
        let mut bad = c.clone();
        bad.certificate.as_mut().unwrap().q = RingMatrix::from_vec(z(), vec![vec![2]]);
        let out = run_command("flat-cert", &[doc(Payload::Certificate(bad))], &Flags::default());
        assert_eq!(out.status, EXIT_PROPERTY);
    }

    #[test]
    fn split_check_statuses() {
        let r = Ring::modulo(4).unwrap();
        let q = Complex::periodic(r, Side::Left, RingMatrix::from_vec(r, vec![vec![2]])).unwrap();
        let out = run_command("split-check", &[doc(Payload::Complex(q))], &Flags::default());
        assert_eq!(out.status, EXIT_PROPERTY);
        let out = run_command("split-check", &[doc(Payload::Complex(times_two()))], &Flags::default());
        assert_eq!(out.status, EXIT_PROPERTY);
        let id = Complex::bounded(z(), Side::Left, 0, vec![1, 1], vec![RingMatrix::identity(z(), 1)]).unwrap();
        let out = run_command("split-check", &[doc(Payload::Complex(id))], &Flags::default());
        assert_eq!(out.status, EXIT_OK);
        assert!(verdict_of(&out).window.is_some());
    }

    #[test]
    fn usage_errors() {
        let m = doc(Payload::Module(FPModule::cyclic(z(), Side::Left, 2)));
        assert_eq!(run_command("frobnicate", &[m.clone()], &Flags::default()).status, EXIT_USAGE);
        assert_eq!(run_command("homology", &[m.clone()], &Flags::default()).status, EXIT_USAGE);
        assert_eq!(run_command("homology", &[], &Flags::default()).status, EXIT_USAGE);
        assert_eq!(run_texts("resolve", &["{".to_string()], &Flags::default()).status, EXIT_USAGE);
        let right = doc(Payload::Module(FPModule::cyclic(z(), Side::Right, 2)));
        assert_eq!(run_command("generator", &[right], &Flags::default()).status, EXIT_USAGE);
    }

    #[test]
    fn sampled_qiso_is_deterministic() {
        let m = doc(Payload::Module(FPModule::cyclic(z(), Side::Left, 3)));
        let flags = Flags { seed: Some(9), ..Flags::default() };
        let a = run_command("check-qiso", &[m.clone()], &flags);
        let b = run_command("check-qiso", &[m], &flags);
        assert_eq!(a.status, EXIT_OK);
        assert_eq!(a.render(Format::Machine), b.render(Format::Machine));
    }

    #[test]
    fn decompose_module() {
        let m = FPModule::cyclic(z(), Side::Right, 2);
        let out = run_command("decompose", &[doc(Payload::Module(m))], &Flags::default());
        assert_eq!(out.status, EXIT_OK, "{:?}", out.message);
        let Some(Payload::BuildTree(t)) = out.document.as_ref().and_then(|d| d.payload.as_ref()) else { panic!() };
        assert_eq!(t.check.unwrap().leaves, 2);
    }
}
