//! Finitely presented modules and the maps between them.
//!
//! A module is the cokernel of its presentation matrix `R: A^{rank1} -> A^{rank0}`;
//! its elements are column vectors of length `rank0` modulo the column span of
//! `R`. This column convention is used for both sides internally (all rings
//! here are commutative); the document format transposes right-module
//! presentations.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{cokernel_invariants, kernel, solve};
use crate::matrix::RingMatrix;
use crate::ring::{Elem, Ring, Side};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FPModule {
    side: Side,
    presentation: RingMatrix,
}

impl FPModule {
    pub fn new(side: Side, presentation: RingMatrix) -> FPModule {
        FPModule { side, presentation }
    }

    pub fn free(ring: Ring, side: Side, rank: usize) -> FPModule {
        FPModule::new(side, RingMatrix::zeros(ring, rank, 0))
    }

    pub fn zero(ring: Ring, side: Side) -> FPModule {
        FPModule::free(ring, side, 0)
    }

    /// `A / (a)`.
    pub fn cyclic(ring: Ring, side: Side, a: Elem) -> FPModule {
        FPModule::new(side, RingMatrix::from_vec(ring, vec![vec![a]]))
    }

    /// The submodule of `A^n` generated by the columns of `gens`, presented
    /// on those generators.
    pub fn generated_by(side: Side, gens: &RingMatrix) -> FPModule {
        FPModule::new(side, kernel(gens))
    }

    pub fn ring(&self) -> Ring {
        self.presentation.ring()
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn with_side(mut self, side: Side) -> FPModule {
        self.side = side;
        self
    }

    pub fn presentation(&self) -> &RingMatrix {
        &self.presentation
    }

    /// Number of generators.
    pub fn rank0(&self) -> usize {
        self.presentation.rows()
    }

    /// Number of relations.
    pub fn rank1(&self) -> usize {
        self.presentation.cols()
    }

    /// Whether the column vector(s) `v` vanish in the module.
    pub fn vanishes(&self, v: &RingMatrix) -> bool {
        solve(&self.presentation, v).is_some()
    }

    pub fn is_zero(&self) -> bool {
        self.vanishes(&RingMatrix::identity(self.ring(), self.rank0()))
    }

    pub fn is_free_presentation(&self) -> bool {
        self.presentation.is_zero()
    }

    /// Invariant factors of the underlying abelian group (`0` = copy of `Z`).
    pub fn invariants(&self) -> Vec<Elem> {
        cokernel_invariants(&self.presentation)
    }

    /// Number of elements, `None` if infinite.
    pub fn order(&self) -> Option<u128> {
        self.invariants().iter().try_fold(1u128, |acc, &d| (d != 0).then(|| acc * d as u128))
    }

    pub fn direct_sum(&self, other: &FPModule) -> FPModule {
        FPModule::new(self.side, self.presentation.block_diag(&other.presentation))
    }

    /// `im R`, presented as `coker(ker R)` on the columns of `R`.
    pub fn syzygy(&self) -> FPModule {
        FPModule::new(self.side, kernel(&self.presentation))
    }
}

impl fmt::Display for FPModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ring = self.ring();
        let parts: Vec<String> = self
            .invariants()
            .iter()
            .map(|&d| match (d, ring.modulus()) {
                (0, _) => "Z".to_string(),
                (d, Some(n)) if d == n => ring.to_string(),
                (d, _) => format!("Z/{d}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// A homomorphism given by its action on generators: column `i` of `matrix`
/// is the image of source generator `i` in target generator coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    source: FPModule,
    target: FPModule,
    matrix: RingMatrix,
}

impl ModuleMap {
    /// Checks shape and that relations map into relations.
    pub fn new(source: FPModule, target: FPModule, matrix: RingMatrix) -> Result<ModuleMap> {
        if matrix.shape() != (target.rank0(), source.rank0()) {
            return Err(Error::DimensionMismatch(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank0(),
                source.rank0()
            )));
        }
        let images = &matrix * source.presentation();
        if !target.vanishes(&images) {
            return Err(Error::Invariant(format!("map does not respect relations: images {images}")));
        }
        Ok(ModuleMap { source, target, matrix })
    }

    pub(crate) fn new_unchecked(source: FPModule, target: FPModule, matrix: RingMatrix) -> ModuleMap {
        debug_assert_eq!(matrix.shape(), (target.rank0(), source.rank0()));
        ModuleMap { source, target, matrix }
    }

    pub fn identity(m: &FPModule) -> ModuleMap {
        ModuleMap::new_unchecked(m.clone(), m.clone(), RingMatrix::identity(m.ring(), m.rank0()))
    }

    pub fn zero(source: &FPModule, target: &FPModule) -> ModuleMap {
        let z = RingMatrix::zeros(source.ring(), target.rank0(), source.rank0());
        ModuleMap::new_unchecked(source.clone(), target.clone(), z)
    }

    pub fn source(&self) -> &FPModule {
        &self.source
    }

    pub fn target(&self) -> &FPModule {
        &self.target
    }

    pub fn matrix(&self) -> &RingMatrix {
        &self.matrix
    }

    /// `other ∘ self`
    pub fn then(&self, other: &ModuleMap) -> ModuleMap {
        ModuleMap::new_unchecked(self.source.clone(), other.target.clone(), &other.matrix * &self.matrix)
    }

    pub fn is_zero(&self) -> bool {
        self.target.vanishes(&self.matrix)
    }

    /// Equality as homomorphisms (matrices agree modulo target relations).
    pub fn equals(&self, other: &ModuleMap) -> bool {
        self.matrix.shape() == other.matrix.shape() && self.target.vanishes(&(&self.matrix - &other.matrix))
    }

    /// Returns the inverse when `self` is an isomorphism.
    pub fn inverse(&self) -> Option<ModuleMap> {
        let ring = self.source.ring();
        let (s, t) = (self.source.rank0(), self.target.rank0());
        let system = self.matrix.hstack(self.target.presentation()).ok()?;
        let x = solve(&system, &RingMatrix::identity(ring, t))?;
        let g = x.submatrix(0..s, 0..t);
        let back = &(&g * &self.matrix) - &RingMatrix::identity(ring, s);
        if !self.source.vanishes(&back) {
            return None;
        }
        ModuleMap::new(self.target.clone(), self.source.clone(), g).ok()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.inverse().is_some()
    }
}

/// `M*` with the generators recorded as functionals on the generators of
/// `M`: column `j` of `embedding` lists the values of the `j`-th generator
/// of `M*` on the generators of `M`, i.e. its coordinates in `Q0*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualModule {
    pub module: FPModule,
    pub embedding: RingMatrix,
}

/// `M* = Hom(M, A) = ker(R^T) ⊆ Q0*`, presented by one further kernel step.
/// The side flips.
pub fn dual_with_embedding(m: &FPModule) -> DualModule {
    let k = kernel(&m.presentation.transpose());
    let module = FPModule::generated_by(m.side.opposite(), &k);
    DualModule { module, embedding: k }
}

pub fn dualize_module(m: &FPModule) -> FPModule {
    dual_with_embedding(m).module
}

/// `f*: N* -> M*` for `f: M -> N`, precomposition with `f`.
pub fn dualize_map(f: &ModuleMap) -> ModuleMap {
    let src_dual = dual_with_embedding(&f.source);
    let tgt_dual = dual_with_embedding(&f.target);
    let pulled = &f.matrix.transpose() * &tgt_dual.embedding;
    let x = solve(&src_dual.embedding, &pulled).expect("precomposition lands in the dual");
    ModuleMap::new_unchecked(tgt_dual.module, src_dual.module, x)
}

/// The evaluation map `μ: M -> M**`, `m ↦ (φ ↦ φ(m))`.
pub fn canonical_double_dual_map(m: &FPModule) -> ModuleMap {
    let dual = dual_with_embedding(m);
    let double = dual_with_embedding(&dual.module);
    // Generator i of M evaluates the generators of M* to row i of the embedding.
    let evaluations = dual.embedding.transpose();
    let x = solve(&double.embedding, &evaluations).expect("evaluation is a functional on M*");
    ModuleMap::new_unchecked(m.clone(), double.module, x)
}

/// A section of `Q0 -> M` when `M` is projective: a map `s: M -> Q0` with
/// `π s = id_M`. Found by solving `R Y R = -R`; then `s = I + R Y`.
pub fn is_projective(m: &FPModule) -> Option<ModuleMap> {
    let ring = m.ring();
    let r = &m.presentation;
    let (r0, r1) = r.shape();
    let free = FPModule::free(ring, m.side, r0);
    if r1 == 0 || r.is_zero() {
        return Some(ModuleMap::new_unchecked(m.clone(), free, RingMatrix::identity(ring, r0)));
    }
    // vec(R Y R) = (R ⊗ R^T) vec(Y) with row-major vectorization.
    let system = r.kron(&r.transpose());
    let y = solve(&system, &r.neg().vectorize())?;
    let y = RingMatrix::unvectorize(&y.column(0), ring, r1, r0);
    let s = &RingMatrix::identity(ring, r0) + &(r * &y);
    Some(ModuleMap::new_unchecked(m.clone(), free, s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectiveDimension {
    Exactly(usize),
    Exceeds(usize),
}

/// Tests successive syzygies for projectivity, up to `bound` steps.
pub fn projective_dimension(m: &FPModule, bound: usize) -> ProjectiveDimension {
    let mut current = m.clone();
    for k in 0..=bound {
        if is_projective(&current).is_some() {
            return ProjectiveDimension::Exactly(k);
        }
        current = current.syzygy();
    }
    ProjectiveDimension::Exceeds(bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Ring {
        Ring::Integers
    }

    fn zn(n: u64) -> Ring {
        Ring::modulo(n).unwrap()
    }

    /// All homomorphisms Z/n -> Z/n from a cyclic module Z/n / (a): the
    /// image of the generator must be killed by a.
    fn enumerate_cyclic_duals(n: i128, a: i128) -> Vec<i128> {
        (0..n).filter(|x| (a * x).rem_euclid(n) == 0).collect()
    }

    #[test]
    fn torsion_over_z_has_zero_dual() {
        let m = FPModule::cyclic(z(), Side::Left, 2);
        let d = dualize_module(&m);
        assert!(d.is_zero());
        assert_eq!(d.side(), Side::Right);
    }

    #[test]
    fn free_dual_is_free() {
        for r in 0..4 {
            let d = dualize_module(&FPModule::free(z(), Side::Left, r));
            assert_eq!(d.rank0(), r);
            assert!(d.is_free_presentation());
        }
    }

    #[test]
    fn dual_of_z2_over_z4() {
        // Oracle: the maps Z/4 -> Z/4 killing 2 are {0, 2}, a group of order 2.
        let maps = enumerate_cyclic_duals(4, 2);
        assert_eq!(maps, vec![0, 2]);
        let d = dualize_module(&FPModule::cyclic(zn(4), Side::Left, 2));
        assert_eq!(d.order(), Some(maps.len() as u128));
        assert_eq!(d.invariants(), vec![2]);
    }

    #[test]
    fn double_dual_maps() {
        let mu = canonical_double_dual_map(&FPModule::free(z(), Side::Left, 3));
        assert!(mu.is_isomorphism());
        let mu = canonical_double_dual_map(&FPModule::cyclic(z(), Side::Left, 2));
        assert!(mu.target().is_zero());
        assert!(mu.is_zero());
        let mu = canonical_double_dual_map(&FPModule::cyclic(zn(4), Side::Left, 2));
        assert_eq!(mu.target().order(), Some(2));
        assert!(mu.is_isomorphism());
        assert_eq!(mu.target().side(), Side::Left);
    }

    #[test]
    fn projectivity_examples() {
        let s = is_projective(&FPModule::free(z(), Side::Left, 1)).unwrap();
        assert!(s.matrix().is_identity());
        assert!(is_projective(&FPModule::cyclic(z(), Side::Left, 2)).is_none());
        // Oracle: residues s with s ≡ 1 (mod 2) in Z/6 and 2s ≡ 0: s = 3.
        let oracle: Vec<i128> = (0..6).filter(|s| s % 2 == 1 && (2 * s) % 6 == 0).collect();
        assert_eq!(oracle, vec![3]);
        let m = FPModule::cyclic(zn(6), Side::Left, 2);
        let s = is_projective(&m).unwrap();
        assert_eq!(s.matrix().get(0, 0), 3);
        // π ∘ s = id on M.
        let back = ModuleMap::new_unchecked(m.clone(), m.clone(), s.matrix().clone());
        assert!(back.equals(&ModuleMap::identity(&m)));
    }

    #[test]
    fn projective_dimension_examples() {
        let pd = |m: &FPModule, n| projective_dimension(m, n);
        assert_eq!(pd(&FPModule::cyclic(z(), Side::Left, 2), 16), ProjectiveDimension::Exactly(1));
        assert_eq!(pd(&FPModule::free(z(), Side::Left, 2), 16), ProjectiveDimension::Exactly(0));
        let m = FPModule::cyclic(zn(4), Side::Left, 2);
        assert_eq!(pd(&m, 10), ProjectiveDimension::Exceeds(10));
        // The syzygies are periodic: each is Z/2 and not projective.
        let mut cur = m;
        for _ in 0..10 {
            cur = cur.syzygy();
            assert_eq!(cur.invariants(), vec![2]);
            assert!(is_projective(&cur).is_none());
        }
    }

    #[test]
    fn map_well_definedness_is_checked() {
        let m = FPModule::cyclic(z(), Side::Left, 2);
        let free = FPModule::free(z(), Side::Left, 1);
        assert!(ModuleMap::new(m.clone(), free.clone(), RingMatrix::from_vec(z(), vec![vec![1]])).is_err());
        assert!(ModuleMap::new(free, m, RingMatrix::from_vec(z(), vec![vec![1]])).is_ok());
    }

    #[test]
    fn dual_map_is_contravariant_on_example() {
        let ring = zn(4);
        let a = FPModule::free(ring, Side::Left, 2);
        let b = FPModule::cyclic(ring, Side::Left, 2);
        let c = FPModule::free(ring, Side::Left, 1);
        let f = ModuleMap::new(a, b.clone(), RingMatrix::from_vec(ring, vec![vec![1, 3]])).unwrap();
        let g = ModuleMap::new(b, c, RingMatrix::from_vec(ring, vec![vec![2]])).unwrap();
        let lhs = dualize_map(&f.then(&g));
        let rhs = dualize_map(&g).then(&dualize_map(&f));
        assert!(lhs.equals(&rhs));
    }
}
