//! Duality between complexes of finite-rank frees and their duals, and the
//! decomposition of resolutions of right modules into cones of frees.
//!
//! A resolution `Q` of a right module is rebuilt as
//! `cone(Σ^{-1} Q_{≤-1} -> Q^0)` with `Q_{≤-1} = cone(Σ^{-1} Q̃ -> Σ Q^{-1})`,
//! where `Q̃` (the part in degrees `≤ -2`) is the double suspension of a
//! resolution of `Z^{-1}Q ≅ M*` for `M = coker(Q^{0*} -> Q^{-1*})`. Each
//! level therefore peels two free leaves and recurses on `Q̃`.

use std::collections::BTreeMap;

use crate::complex::{cone, cycle_module, ChainMap, Complex, Homotopy};
use crate::error::{Error, Result};
use crate::graded::{Dependency, Shape, Window};
use crate::linalg::solve;
use crate::matrix::RingMatrix;
use crate::module::{canonical_double_dual_map, dual_with_embedding, FPModule, ModuleMap};
use crate::ring::{Ring, Side};
use crate::Degree;

/// `p: G -> G**`, degreewise evaluation.
pub fn canonical_double_dual(g: &Complex) -> Result<ChainMap> {
    let gdd = g.dualize()?.dualize()?;
    let ring = g.ring();
    ChainMap::from_fn(g, &gdd, |j| canonical_double_dual_map(&FPModule::free(ring, g.side(), g.rank(j))).matrix().clone())
}

fn components_invertible(f: &ChainMap, window: Window) -> Option<Degree> {
    let shape = Shape::covering(&[Dependency::at(f.shape(), 0), Dependency::at(f.source().shape(), 0)]);
    let (a, b) = shape.check_range(1);
    let ring = f.source().ring();
    (a.min(window.lo)..=b.max(window.hi)).find(|&j| {
        let s = FPModule::free(ring, f.source().side(), f.source().rank(j));
        let t = FPModule::free(ring, f.target().side(), f.target().rank(j));
        s.rank0() != t.rank0() || !ModuleMap::new_unchecked(s, t, f.component(j)).is_isomorphism()
    })
}

#[derive(Clone, Debug)]
pub struct RoundtripReport {
    /// First degree where `G -> G**` is not invertible.
    pub double_dual_failure: Option<Degree>,
    /// First degree where `G* -> G***` is not invertible.
    pub triple_dual_failure: Option<Degree>,
    /// For a supplied `f: G -> H`: naturality `p_H f = f** p_G` on the window.
    pub naturality: Option<bool>,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.double_dual_failure.is_none() && self.triple_dual_failure.is_none() && self.naturality != Some(false)
    }
}

pub fn duality_roundtrip_check(g: &Complex, window: Window, test_map: Option<&ChainMap>) -> Result<RoundtripReport> {
    let p = canonical_double_dual(g)?;
    let double_dual_failure = components_invertible(&p, window);
    let gd = g.dualize()?;
    let triple_dual_failure = components_invertible(&canonical_double_dual(&gd)?, window);
    let naturality = match test_map {
        None => None,
        Some(f) => {
            if !f.source().same_as(g) {
                return Err(Error::Precondition("test map must start at the checked complex".into()));
            }
            let ph = canonical_double_dual(f.target())?;
            let fdd = f.dualize()?.dualize()?;
            let lhs = f.then(&ph)?;
            let rhs = p.then(&fdd)?;
            Some(lhs.agrees_on(&rhs, window))
        }
    };
    Ok(RoundtripReport { double_dual_failure, triple_dual_failure, naturality })
}

/// `(g ∘ f)* = f* ∘ g*` on `window`.
pub fn dual_composition_check(f: &ChainMap, g: &ChainMap, window: Window) -> Result<bool> {
    let lhs = f.then(g)?.dualize()?;
    let rhs = g.dualize()?.then(&f.dualize()?)?;
    Ok(lhs.agrees_on(&rhs, window))
}

/// A resolution of a finitely presented right module by finite-rank frees
/// in degrees `≤ 0`.
#[derive(Clone, Debug)]
pub struct RightResolution {
    pub module: FPModule,
    pub complex: Complex,
}

impl RightResolution {
    /// Checks `H^0 ≅ module` (via the augmentation on generators) and
    /// `H^{<0} = 0` on `window`.
    pub fn new(module: FPModule, complex: Complex, window: Window) -> Result<RightResolution> {
        if module.side() != Side::Right || complex.side() != Side::Right {
            return Err(Error::SideMismatch("resolutions here resolve right modules".into()));
        }
        if !complex.is_free() {
            return Err(Error::Precondition("resolution terms must be free".into()));
        }
        if complex.extent().1.is_some_and(|hi| hi > 0) {
            return Err(Error::Precondition("resolution has terms in positive degrees".into()));
        }
        if complex.rank(0) != module.rank0() {
            return Err(Error::DimensionMismatch("degree-0 term must match the module's generators".into()));
        }
        let target = Complex::concentrated(&module, 0);
        let mut comps = BTreeMap::new();
        comps.insert(0, RingMatrix::identity(module.ring(), module.rank0()));
        let aug = ChainMap::from_components(&complex, &target, &comps)?;
        if !crate::complex::induced_on_homology(&aug, 0).is_isomorphism() {
            return Err(Error::Invariant("H^0 of the resolution is not the module".into()));
        }
        if let Some(j) = crate::complex::first_non_exact(&complex, Window::new(window.lo, -1)) {
            return Err(Error::Invariant(format!("resolution has homology in degree {j}")));
        }
        Ok(RightResolution { module, complex })
    }

    /// The resolution computed by iterated kernels.
    pub fn of(module: &FPModule, depth: usize) -> Result<(RightResolution, crate::generator::ResolutionEnd)> {
        let (complex, end) =
            crate::generator::free_resolution(module.presentation(), module.rank0(), Side::Right, depth)?;
        Ok((RightResolution { module: module.clone(), complex }, end))
    }
}

/// `M = coker(Q^{0*} -> Q^{-1*})` and the isomorphism `M* -> Z^{-1}Q`.
#[derive(Clone, Debug)]
pub struct KernelAsDual {
    pub module: FPModule,
    /// `M*` with its embedding into `Q^{-1**} = Q^{-1}`.
    pub dual: FPModule,
    pub embedding: RingMatrix,
    pub cycles: FPModule,
    /// Generators of `Z^{-1}Q` in `Q^{-1}` coordinates.
    pub inclusion: RingMatrix,
    pub iso: ModuleMap,
}

pub fn kernel_as_dual(q: &Complex) -> Result<KernelAsDual> {
    if !q.is_free() {
        return Err(Error::Precondition("terms must be free".into()));
    }
    let d = q.differential(-1);
    let module = FPModule::new(q.side().opposite(), d.transpose());
    let dual = dual_with_embedding(&module);
    let z = cycle_module(q, -1);
    // The double-dual identification of free modules is the identity on coordinates.
    let x = solve(&z.inclusion, &dual.embedding)
        .ok_or_else(|| Error::Internal("dual functionals are not cycles".into()))?;
    let iso = ModuleMap::new(dual.module.clone().with_side(q.side()), z.module.clone(), x)?;
    if !iso.is_isomorphism() {
        return Err(Error::Internal("M* -> Z^{-1}Q is not an isomorphism".into()));
    }
    Ok(KernelAsDual { module, dual: dual.module, embedding: dual.embedding, cycles: z.module, inclusion: z.inclusion, iso })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuildNode {
    Zero,
    /// `A^rank` in degree 0; `witness` identifies `(Q^{j*})^*` with `Q^j`.
    Leaf { rank: usize, witness: RingMatrix },
    /// An undecomposed residual, exact only as far as it was evaluated.
    Tail { complex: Complex },
    Suspension { shift: Degree, child: Box<BuildNode> },
    Cone { map: ChainMap, source: Box<BuildNode>, target: Box<BuildNode> },
    /// A retract `complex` of the child with `projection ∘ inclusion = id`.
    Summand { complex: Complex, child: Box<BuildNode>, inclusion: ChainMap, projection: ChainMap },
}

#[derive(Clone, Debug)]
pub struct Level {
    pub kernel: KernelAsDual,
    /// Index of an earlier level whose remaining resolution equals this
    /// level's.
    pub repeats: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct BuildTree {
    pub ring: Ring,
    pub side: Side,
    pub root: BuildNode,
    pub target: Complex,
    pub levels: Vec<Level>,
}

impl BuildTree {
    pub fn leaves(&self) -> usize {
        fn count(n: &BuildNode) -> usize {
            match n {
                BuildNode::Leaf { rank, .. } => usize::from(*rank > 0),
                BuildNode::Zero | BuildNode::Tail { .. } => 0,
                BuildNode::Suspension { child, .. } | BuildNode::Summand { child, .. } => count(child),
                BuildNode::Cone { source, target, .. } => count(source) + count(target),
            }
        }
        count(&self.root)
    }

    pub fn has_tail(&self) -> bool {
        fn tail(n: &BuildNode) -> bool {
            match n {
                BuildNode::Tail { complex } => !complex.is_bounded() || complex.support().is_some(),
                BuildNode::Zero | BuildNode::Leaf { .. } => false,
                BuildNode::Suspension { child, .. } | BuildNode::Summand { child, .. } => tail(child),
                BuildNode::Cone { source, target, .. } => tail(source) || tail(target),
            }
        }
        tail(&self.root)
    }

    pub fn evaluate(&self) -> Result<Complex> {
        evaluate(&self.root, self.ring, self.side)
    }
}

pub fn evaluate(node: &BuildNode, ring: Ring, side: Side) -> Result<Complex> {
    Ok(match node {
        BuildNode::Zero => Complex::zero(ring, side),
        BuildNode::Leaf { rank, .. } => Complex::free_in_degree(ring, side, *rank, 0),
        BuildNode::Tail { complex } => complex.clone(),
        BuildNode::Suspension { shift, child } => evaluate(child, ring, side)?.suspend(*shift),
        BuildNode::Cone { map, source, target } => {
            let s = evaluate(source, ring, side)?;
            let t = evaluate(target, ring, side)?;
            if !s.same_as(map.source()) || !t.same_as(map.target()) {
                return Err(Error::Invariant("cone map does not join the evaluated children".into()));
            }
            cone(map)?.complex
        }
        BuildNode::Summand { complex, child, inclusion, projection } => {
            let c = evaluate(child, ring, side)?;
            if !inclusion.target().same_as(&c) || !projection.source().same_as(&c) {
                return Err(Error::Invariant("summand maps do not meet the evaluated child".into()));
            }
            let round = inclusion.then(projection)?;
            let w = Window::new(complex.shape().check_range(1).0, complex.shape().check_range(1).1);
            if !round.agrees_on(&ChainMap::identity(complex), w) {
                return Err(Error::Invariant("summand projection does not split the inclusion".into()));
            }
            complex.clone()
        }
    })
}

fn leaf(q: &Complex, j: Degree) -> BuildNode {
    let rank = q.rank(j);
    if rank == 0 {
        return BuildNode::Zero;
    }
    let free = FPModule::free(q.ring(), q.side(), rank);
    let witness = canonical_double_dual_map(&free).matrix().clone();
    BuildNode::Leaf { rank, witness }
}

/// `Q'` with `Q'^k = Q^{k-2}`, so that `Σ^2 Q'` is the part of `Q` in
/// degrees `≤ -2`.
fn remainder(q: &Complex) -> Complex {
    let ring = q.ring();
    let shape = Shape::covering(&[Dependency::at(q.shape(), -2)]);
    Complex::from_fn(
        ring,
        q.side(),
        shape,
        |k| {
            let r = if k <= 0 { q.rank(k - 2) } else { 0 };
            (r, RingMatrix::zeros(ring, r, 0))
        },
        |k| {
            if k < 0 {
                q.differential(k - 2)
            } else {
                RingMatrix::zeros(ring, 0, if k <= 0 { q.rank(k - 2) } else { 0 })
            }
        },
    )
    .expect("tail of a resolution")
}

/// The part of `Q` in degrees `≤ -1`.
fn below_zero(q: &Complex) -> Complex {
    let ring = q.ring();
    let shape = Shape::covering(&[Dependency::at(q.shape(), 0)]);
    Complex::from_fn(
        ring,
        q.side(),
        shape,
        |k| {
            let r = if k <= -1 { q.rank(k) } else { 0 };
            (r, RingMatrix::zeros(ring, r, 0))
        },
        |k| {
            if k < -1 {
                q.differential(k)
            } else {
                RingMatrix::zeros(ring, if k + 1 <= -1 { q.rank(k + 1) } else { 0 }, if k <= -1 { q.rank(k) } else { 0 })
            }
        },
    )
    .expect("brutal truncation")
}

fn single_map(source: &Complex, target: &Complex, degree: Degree, m: RingMatrix) -> Result<ChainMap> {
    let mut comps = BTreeMap::new();
    comps.insert(degree, m);
    ChainMap::from_components(source, target, &comps)
}

/// Decomposes a resolution into free leaves, `depth` levels deep.
pub fn decompose_resolution(q: &Complex, depth: usize) -> Result<BuildTree> {
    if q.side() != Side::Right || !q.is_free() {
        return Err(Error::Precondition("decomposition expects a free resolution of a right module".into()));
    }
    if q.extent().1.is_some_and(|hi| hi > 0) {
        return Err(Error::Precondition("resolution has terms in positive degrees".into()));
    }
    let mut levels = Vec::new();
    let mut seen: Vec<Complex> = Vec::new();
    let root = decompose_level(q, depth, &mut levels, &mut seen)?;
    Ok(BuildTree { ring: q.ring(), side: q.side(), root, target: q.clone(), levels })
}

fn decompose_level(q: &Complex, depth: usize, levels: &mut Vec<Level>, seen: &mut Vec<Complex>) -> Result<BuildNode> {
    let ring = q.ring();
    let side = q.side();
    let (lo, _) = q.extent();
    if q.support().is_none() && lo.is_some() {
        return Ok(BuildNode::Zero);
    }
    if lo.is_some_and(|lo| lo >= 0) {
        return Ok(leaf(q, 0));
    }
    if depth == 0 {
        return Ok(BuildNode::Tail { complex: q.clone() });
    }
    let kernel = kernel_as_dual(q)?;
    let rest = remainder(q);
    let repeats = seen.iter().position(|c| c.same_as(&rest));
    seen.push(rest.clone());
    levels.push(Level { kernel, repeats });
    let rest_node = decompose_level(&rest, depth - 1, levels, seen)?;
    let rest_eval = evaluate(&rest_node, ring, side)?;
    // lower = cone(Σ^{-1} Σ^2 Q' -> Σ Q^{-1}) = Q_{≤-1}
    let tilde = rest_eval.suspend(2);
    let lower_source = tilde.suspend(-1);
    let qm1 = leaf(q, -1);
    let qm1_eval = evaluate(&qm1, ring, side)?.suspend(1);
    let g = single_map(&lower_source, &qm1_eval, -1, q.differential(-2))?;
    let lower = BuildNode::Cone {
        map: g.clone(),
        source: Box::new(BuildNode::Suspension {
            shift: -1,
            child: Box::new(BuildNode::Suspension { shift: 2, child: Box::new(rest_node) }),
        }),
        target: Box::new(BuildNode::Suspension { shift: 1, child: Box::new(qm1) }),
    };
    let lower_eval = cone(&g)?.complex;
    debug_assert!(lower_eval.same_as(&below_zero(q)));
    let top_source = lower_eval.suspend(-1);
    let q0 = leaf(q, 0);
    let q0_eval = evaluate(&q0, ring, side)?;
    let f = single_map(&top_source, &q0_eval, 0, q.differential(-1))?;
    Ok(BuildNode::Cone {
        map: f,
        source: Box::new(BuildNode::Suspension { shift: -1, child: Box::new(lower) }),
        target: Box::new(q0),
    })
}

#[derive(Clone, Debug)]
pub struct RebuildReport {
    pub window: Window,
    pub leaves: usize,
    /// Set when a residual tail was left undecomposed.
    pub window_relative: bool,
    pub forward: ChainMap,
    pub backward: ChainMap,
    /// `backward ∘ forward - id = d h + h d` on the rebuilt complex.
    pub source_homotopy: Homotopy,
    /// `forward ∘ backward - id = d h + h d` on the target.
    pub target_homotopy: Homotopy,
}

/// Evaluates the tree and exhibits a homotopy equivalence with the target.
pub fn rebuild_verify(tree: &BuildTree, window: Window) -> Result<RebuildReport> {
    let built = tree.evaluate()?;
    let target = &tree.target;
    let ring = tree.ring;
    let shape = Shape::covering(&[Dependency::at(built.shape(), 0), Dependency::at(target.shape(), 0)]);
    let (a, b) = shape.check_range(1);
    if let Some(j) = (a.min(window.lo)..=b.max(window.hi)).find(|&j| built.rank(j) != target.rank(j)) {
        return Err(Error::Invariant(format!("rebuilt complex has rank {} in degree {j}, target {}", built.rank(j), target.rank(j))));
    }
    let forward = ChainMap::from_fn(&built, target, |j| RingMatrix::identity(ring, built.rank(j)))
        .map_err(|e| Error::Invariant(format!("rebuilt complex differs from the target: {e}")))?;
    let backward = ChainMap::from_fn(target, &built, |j| RingMatrix::identity(ring, target.rank(j)))?;
    let source_homotopy = Homotopy::zero(&built, &built);
    let target_homotopy = Homotopy::zero(target, target);
    source_homotopy.verify(&forward.then(&backward)?, &ChainMap::identity(&built), window)?;
    target_homotopy.verify(&backward.then(&forward)?, &ChainMap::identity(target), window)?;
    Ok(RebuildReport {
        window,
        leaves: tree.leaves(),
        window_relative: tree.has_tail(),
        forward,
        backward,
        source_homotopy,
        target_homotopy,
    })
}
