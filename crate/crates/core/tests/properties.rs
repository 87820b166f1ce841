use proptest::prelude::*;
use rand::Rng as _;

use kproj_core::complex::{cone, homology, induced_on_homology, Complex};
use kproj_core::duality::{decompose_resolution, duality_roundtrip_check, kernel_as_dual, rebuild_verify, RightResolution};
use kproj_core::flatness::{check_certificate, flat_certificate, flat_certificate_in, pd_bound_collapse, EngineConfig, FlatRelation, PdCollapse};
use kproj_core::generator::{build_generator, ResolutionEnd};
use kproj_core::graded::Window;
use kproj_core::hom::{hom_map_source, hom_map_target};
use kproj_core::homotopy::{null_homotopy_witness, SplitVerdict};
use kproj_core::io::{emit, parse_document, Document, Payload};
use kproj_core::linalg::{kernel, solve_linear, SolveSide};
use kproj_core::module::{
    canonical_double_dual_map, dualize_map, is_projective, projective_dimension, FPModule, ModuleMap,
};
use kproj_core::sample::{self, Sampler};
use kproj_core::{Elem, Ring, RingMatrix, Side};

const RINGS: [Ring; 3] = [Ring::Integers, Ring::PrimeField(5), Ring::IntegersModulo(4)];

fn ring_and_seed() -> impl Strategy<Value = (Ring, u64)> {
    (0..RINGS.len(), any::<u64>()).prop_map(|(i, s)| (RINGS[i], s))
}

fn matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Elem>> {
    proptest::collection::vec(-5i128..=5, rows * cols)
}

fn reduced(ring: Ring, rows: usize, cols: usize, data: Vec<Elem>) -> RingMatrix {
    RingMatrix::new(ring, rows, cols, data).unwrap()
}

/// All vectors over a finite ring, or with entries in `-2..=2` over `Z`.
fn small_vectors(ring: Ring, n: usize) -> Vec<Vec<Elem>> {
    let values = ring.elements().unwrap_or_else(|| (-2..=2).collect());
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| values.iter().map(move |&x| [v.clone(), vec![x]].concat()))
            .collect();
    }
    out
}

fn random_bounded(rng: &mut Sampler, ring: Ring, side: Side) -> Complex {
    let lo = rng.gen_range(-2..=0);
    let len = rng.gen_range(1..=3);
    sample::complex(rng, ring, side, lo, len, 3, 5)
}

fn field_dimension(m: &FPModule) -> usize {
    m.invariants().iter().filter(|&&x| x == 0).count()
}

/// Rank of a linear map between vector spaces presented as cokernels.
fn image_dimension(f: &ModuleMap) -> usize {
    let n = f.target();
    let quotient = FPModule::new(n.side(), n.presentation().hstack(f.matrix()).unwrap());
    field_dimension(n) - field_dimension(&quotient)
}

fn exact_at(f: &ModuleMap, g: &ModuleMap) -> bool {
    f.then(g).is_zero() && field_dimension(g.source()) - image_dimension(g) == image_dimension(f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solutions_substitute_back((ring, _) in ring_and_seed(), a in matrix_strategy(3, 4), x in matrix_strategy(4, 2)) {
        let a = reduced(ring, 3, 4, a);
        let b = &a * &reduced(ring, 4, 2, x);
        let sol = solve_linear(&a, &b, SolveSide::Right).unwrap().expect("consistent system");
        prop_assert_eq!(&a * &sol, b.clone());
        // Repeated calls agree bit for bit.
        prop_assert_eq!(solve_linear(&a, &b, SolveSide::Right).unwrap(), Some(sol));
        prop_assert_eq!(kernel(&a), kernel(&a));
    }

    #[test]
    fn left_solutions_substitute_back((ring, _) in ring_and_seed(), a in matrix_strategy(3, 2), x in matrix_strategy(2, 3)) {
        let a = reduced(ring, 3, 2, a);
        let b = &reduced(ring, 2, 3, x) * &a;
        let sol = solve_linear(&a, &b, SolveSide::Left).unwrap().expect("consistent system");
        prop_assert_eq!(&sol * &a, b);
    }

    #[test]
    fn kernels_are_complete((ring, _) in ring_and_seed(), a in matrix_strategy(2, 3)) {
        let a = reduced(ring, 2, 3, a);
        let k = kernel(&a);
        prop_assert!((&a * &k).is_zero());
        for v in small_vectors(ring, 3) {
            let v = RingMatrix::column_vector(ring, &v);
            if (&a * &v).is_zero() {
                prop_assert!(solve_linear(&k, &v, SolveSide::Right).unwrap().is_some(), "{v} escapes the kernel");
            }
        }
    }

    #[test]
    fn dualizing_maps_is_contravariant((ring, seed) in ring_and_seed()) {
        let mut rng = sample::sampler(seed);
        let m = sample::module(&mut rng, ring, Side::Left, 3, 5);
        let f = sample::matrix(&mut rng, ring, 2, m.rank0(), 5);
        let extra = sample::matrix(&mut rng, ring, 2, 1, 5);
        let n = FPModule::new(Side::Left, (&f * m.presentation()).hstack(&extra).unwrap());
        let f = ModuleMap::new(m.clone(), n, f).unwrap();
        let l = FPModule::free(ring, Side::Left, 2);
        let g = ModuleMap::new(l, m.clone(), sample::matrix(&mut rng, ring, m.rank0(), 2, 5)).unwrap();
        let lhs = dualize_map(&g.then(&f));
        let rhs = dualize_map(&f).then(&dualize_map(&g));
        prop_assert!(lhs.equals(&rhs));
    }

    #[test]
    fn triple_dual_splits((ring, seed) in ring_and_seed()) {
        let mut rng = sample::sampler(seed);
        let m = sample::module(&mut rng, ring, Side::Left, 4, 5);
        let mu = canonical_double_dual_map(&m);
        let mu_dual = dualize_map(&mu);
        let mu_of_dual = canonical_double_dual_map(mu_dual.target());
        let round = mu_of_dual.then(&mu_dual);
        prop_assert!(round.equals(&ModuleMap::identity(mu_dual.target())));
    }

    #[test]
    fn projective_sections_split((ring, seed) in ring_and_seed()) {
        let mut rng = sample::sampler(seed);
        let m = sample::module(&mut rng, ring, Side::Left, 3, 5);
        if let Some(s) = is_projective(&m) {
            let proj = ModuleMap::new(s.target().clone(), m.clone(), RingMatrix::identity(ring, m.rank0())).unwrap();
            prop_assert!(s.then(&proj).equals(&ModuleMap::identity(&m)));
        }
    }

    #[test]
    fn projective_dimension_ignores_presentation((ring, seed) in ring_and_seed()) {
        let mut rng = sample::sampler(seed);
        let m = sample::module(&mut rng, ring, Side::Left, 3, 5);
        let r = m.presentation();
        // A redundant generator killed by its own relation, and a repeated relation.
        let mut bigger = r.block_diag(&RingMatrix::identity(ring, 1));
        if r.cols() > 0 {
            let repeat = bigger.select_columns(&[0]);
            bigger = bigger.hstack(&repeat).unwrap();
        }
        let other = FPModule::new(Side::Left, bigger);
        prop_assert_eq!(projective_dimension(&m, 4), projective_dimension(&other, 4));
    }

    #[test]
    fn derived_complexes_square_to_zero((ring, seed) in ring_and_seed()) {
        let mut rng = sample::sampler(seed);
        let x = random_bounded(&mut rng, ring, Side::Left);
        let y = random_bounded(&mut rng, ring, Side::Left);
        let f = sample::chain_map(&mut rng, &x, &y, 3);
        let c = cone(&f).unwrap().complex;
        for k in [c.clone(), c.suspend(3), c.dualize().unwrap(), x.suspend(-1)] {
            let (a, b) = k.shape().check_range(2);
            for j in a..b {
                let dd = &k.differential(j + 1) * &k.differential(j);
                prop_assert!(k.term(j + 2).vanishes(&dd));
            }
        }
    }

    #[test]
    fn suspension_shifts_homology((ring, seed) in ring_and_seed(), i in -3i64..=3) {
        let mut rng = sample::sampler(seed);
        let c = random_bounded(&mut rng, ring, Side::Left);
        let s = c.suspend(i);
        for j in -5..=5 {
            prop_assert_eq!(homology(&s, j).invariants(), homology(&c, j + i).invariants());
        }
    }

    #[test]
    fn cone_sequence_is_exact(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 5])) {
        let ring = Ring::PrimeField(p);
        let mut rng = sample::sampler(seed);
        let x = random_bounded(&mut rng, ring, Side::Left);
        let y = random_bounded(&mut rng, ring, Side::Left);
        let f = sample::chain_map(&mut rng, &x, &y, 3);
        let c = cone(&f).unwrap();
        let sf = f.suspend(1);
        for j in -5..=4 {
            let hf = induced_on_homology(&f, j);
            let hi = induced_on_homology(&c.inclusion, j);
            let hp = induced_on_homology(&c.projection, j);
            let hsf = induced_on_homology(&sf, j);
            prop_assert!(exact_at(&hf, &hi), "at Y in degree {}", j);
            prop_assert!(exact_at(&hi, &hp), "at the cone in degree {}", j);
            prop_assert!(exact_at(&hp, &hsf), "at ΣX in degree {}", j);
        }
    }

    #[test]
    fn null_homotopies_verify((ring, seed) in ring_and_seed()) {
        let mut rng = sample::sampler(seed);
        let x = random_bounded(&mut rng, ring, Side::Left);
        let y = random_bounded(&mut rng, ring, Side::Left);
        prop_assume!(!x.same_as(&y));
        let f = sample::chain_map(&mut rng, &x, &y, 3);
        let s = null_homotopy_witness(&f).unwrap().expect("boundaries are null-homotopic");
        let zero = kproj_core::complex::ChainMap::zero(&x, &y);
        prop_assert!(s.verify(&f, &zero, Window::new(-6, 6)).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generator_packages_are_sound((ring, seed) in ring_and_seed()) {
        let mut rng = sample::sampler(seed);
        let m = sample::module(&mut rng, ring, Side::Left, 3, 5);
        let pkg = build_generator(&m, 16).unwrap();
        prop_assert_eq!(pkg.check_augmentation(Window::new(-8, 0)), None);
        prop_assert!(pkg.double_dual_is_isomorphism().unwrap());
    }

    #[test]
    fn h0_equivalence_is_natural((ring, seed) in ring_and_seed()) {
        let mut rng = sample::sampler(seed);
        let m = sample::module(&mut rng, ring, Side::Left, 2, 5);
        let pkg = build_generator(&m, 16).unwrap();
        let x = random_bounded(&mut rng, ring, Side::Left);
        let y = random_bounded(&mut rng, ring, Side::Left);
        let f = sample::chain_map(&mut rng, &x, &y, 3);
        let g = cone(&f).unwrap().inclusion;
        let w = Window::new(0, 0);
        let top = induced_on_homology(&hom_map_source(&pkg.comparison, g.source(), w).unwrap().2, 0);
        let bottom = induced_on_homology(&hom_map_source(&pkg.comparison, g.target(), w).unwrap().2, 0);
        let left = induced_on_homology(&hom_map_target(&pkg.dual_resolution, &g, w).unwrap().2, 0);
        let right = induced_on_homology(&hom_map_target(pkg.comparison.source(), &g, w).unwrap().2, 0);
        prop_assert!(top.then(&right).equals(&left.then(&bottom)));
    }

    #[test]
    fn certificates_verify_by_multiplication((ring, seed) in ring_and_seed()) {
        let mut rng = sample::sampler(seed);
        let m = rng.gen_range(1..=4);
        let rank = rng.gen_range(0..=3);
        let rel = sample::relation(&mut rng, ring, m, rank, 5);
        let cert = flat_certificate(&rel).unwrap();
        prop_assert!(check_certificate(&rel, &cert, None, None).is_ok());
    }

    #[test]
    fn every_relation_certifies_over_a_field(seed in any::<u64>()) {
        let ring = Ring::PrimeField(5);
        let mut rng = sample::sampler(seed);
        let target = sample::module(&mut rng, ring, Side::Left, 3, 4);
        let n = rng.gen_range(1..=3);
        // Relations `Σ a_s z_s = R y` in the target: make `z` hit the relations.
        let a: Vec<Elem> = (0..n).map(|_| rng.gen_range(0..5)).collect();
        let mut z = sample::matrix(&mut rng, ring, target.rank0(), n, 4);
        if let Some(s) = a.iter().position(|&x| x != 0) {
            let inv = (1..5).find(|&u| (u * a[s]) % 5 == 1).unwrap();
            let rel_part = if target.rank1() > 0 {
                target.presentation() * &sample::matrix(&mut rng, ring, target.rank1(), 1, 4)
            } else {
                RingMatrix::zeros(ring, target.rank0(), 1)
            };
            let others = &z * &RingMatrix::column_vector(ring, &a);
            let zs = z.select_columns(&[s]);
            let fix = &(&rel_part - &others) + &(&zs * &RingMatrix::column_vector(ring, &[a[s]]));
            let col = fix.scale(inv);
            for r in 0..z.rows() {
                z.set(r, s, col.get(r, 0));
            }
        } else {
            return Ok(());
        }
        let rel = FlatRelation::new(a, z).unwrap();
        let cert = flat_certificate_in(&target, &rel).unwrap().expect("modules over a field are flat");
        let relations = (target.rank1() > 0).then(|| target.presentation());
        prop_assert!(check_certificate(&rel, &cert, None, relations).is_ok());
    }

    #[test]
    fn pd_collapse_homotopies_verify(seed in any::<u64>()) {
        let ring = Ring::Integers;
        let mut rng = sample::sampler(seed);
        let len = rng.gen_range(2..=4);
        let c = sample::contractible(&mut rng, ring, Side::Left, -1, len, 4);
        let window = Window::new(-3, len as i64 + 1);
        let verdict = pd_bound_collapse(&c, EngineConfig::for_ring(ring), window).unwrap();
        let PdCollapse::Collapsed { verdict: SplitVerdict::SplitExact { homotopy, .. }, .. } = verdict else {
            return Err(TestCaseError::fail(format!("{verdict:?}")));
        };
        let id = kproj_core::complex::ChainMap::identity(&c);
        let zero = kproj_core::complex::ChainMap::zero(&c, &c);
        prop_assert!(homotopy.failures(&id, &zero, window).is_empty());
    }

    #[test]
    fn duality_roundtrips((ring, seed) in ring_and_seed()) {
        let mut rng = sample::sampler(seed);
        let len = rng.gen_range(1..=4);
        let g = sample::complex(&mut rng, ring, Side::Left, -2, len, 4, 5);
        let report = duality_roundtrip_check(&g, Window::new(-5, 5), None).unwrap();
        prop_assert!(report.passed());
    }

    #[test]
    fn kernel_as_dual_matches_inclusion((ring, seed) in ring_and_seed()) {
        let mut rng = sample::sampler(seed);
        let m = sample::module(&mut rng, ring, Side::Right, 3, 5);
        prop_assume!(m.rank0() > 0);
        let (res, _) = RightResolution::of(&m, 6).unwrap();
        let k = kernel_as_dual(&res.complex).unwrap();
        // Generators of M* land on the embedded functionals.
        prop_assert_eq!(&k.inclusion * k.iso.matrix(), k.embedding.clone());
    }

    #[test]
    fn decomposition_counts_leaves(seed in any::<u64>()) {
        let mut rng = sample::sampler(seed);
        let m = sample::module(&mut rng, Ring::Integers, Side::Right, 3, 5);
        prop_assume!(m.rank0() > 0);
        let (res, end) = RightResolution::of(&m, 8).unwrap();
        let ResolutionEnd::Finite { length } = end else {
            return Err(TestCaseError::fail(format!("{end:?}")));
        };
        let tree = decompose_resolution(&res.complex, length + 1).unwrap();
        let report = rebuild_verify(&tree, Window::new(-(length as i64) - 2, 1)).unwrap();
        prop_assert_eq!(report.leaves, length + 1);
        prop_assert!(!report.window_relative);
    }

    #[test]
    fn documents_roundtrip((ring, seed) in ring_and_seed()) {
        let mut rng = sample::sampler(seed);
        let c = random_bounded(&mut rng, ring, Side::Left);
        let f = sample::chain_map(&mut rng, &c, &c, 3);
        let m = sample::module(&mut rng, ring, Side::Right, 3, 5);
        for p in [Payload::Complex(c), Payload::ChainMap(f), Payload::Module(m)] {
            let text = emit(&Document::new(ring, p));
            let back = parse_document(&text).unwrap();
            prop_assert_eq!(emit(&back), text);
        }
    }
}
