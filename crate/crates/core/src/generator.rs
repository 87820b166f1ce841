//! Generators of the homotopy category of complexes of projectives.
//!
//! For a finitely presented left module `M` with presentation
//! `Q1 -R-> Q0 -> M -> 0`, the dual `M* = ker(R^T)` is a finitely presented
//! right module. A projective resolution `P -> M*` by finite-rank frees is
//! dualized to `P*`, and `M -μ-> M** -π*-> P*` is the comparison map. Hom
//! out of `P*` into a complex of projectives then agrees with Hom out of `M`.

use std::collections::BTreeMap;

use crate::complex::{cone, first_non_exact, homology, induced_by_matrix, induced_on_homology, ChainMap, Complex};
use crate::error::{Error, Result};
use crate::graded::{Shape, Tail, Window};
use crate::hom::{hom_complex, hom_map_source, hom_map_target};
use crate::linalg::{kernel, solve};
use crate::matrix::RingMatrix;
use crate::module::{canonical_double_dual_map, dual_with_embedding, FPModule, ModuleMap};
use crate::ring::Side;
use crate::Degree;

/// Depth used when the caller does not bound the resolution search.
pub const DEFAULT_RESOLUTION_DEPTH: usize = 64;

/// How the resolution `P` ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolutionEnd {
    /// `P^j = 0` for `j < -length`.
    Finite { length: usize },
    /// `d^{j} = d^{j+period}` for `j < -start`.
    Periodic { start: usize, period: usize },
    /// Cut off at `-depth`; answers are exact only away from the cut.
    Truncated { depth: usize },
}

impl ResolutionEnd {
    pub fn is_truncated(&self) -> bool {
        matches!(self, ResolutionEnd::Truncated { .. })
    }
}

#[derive(Clone, Debug)]
pub struct GeneratorPackage {
    pub module: FPModule,
    /// `M*` on generators given by `embedding`.
    pub dual: FPModule,
    /// Column `k` lists the values of the `k`-th generator of `M*` on the
    /// generators of `M`.
    pub embedding: RingMatrix,
    pub resolution: Complex,
    pub end: ResolutionEnd,
    /// `π: P -> M*`, with `M*` concentrated in degree 0.
    pub augmentation: ChainMap,
    pub double_dual: ModuleMap,
    pub dual_resolution: Complex,
    /// `π* μ: M -> P*`, with `M` concentrated in degree 0.
    pub comparison: ChainMap,
}

/// Kernel steps `d^{-1} = presentation`, `d^{-m-1} = ker d^{-m}` until the
/// kernel vanishes, a differential repeats, or `depth` steps are taken.
fn resolve_differentials(presentation: &RingMatrix, depth: usize) -> (Vec<RingMatrix>, ResolutionEnd) {
    let mut diffs: Vec<RingMatrix> = Vec::new();
    let mut current = presentation.clone();
    loop {
        if current.cols() == 0 {
            return (diffs.clone(), ResolutionEnd::Finite { length: diffs.len() });
        }
        if let Some(l) = diffs.iter().position(|d| *d == current) {
            // d^{-m-1} equals d^{-l-1}.
            let m = diffs.len();
            return (diffs, ResolutionEnd::Periodic { start: m, period: m - l });
        }
        if diffs.len() == depth {
            return (diffs, ResolutionEnd::Truncated { depth });
        }
        diffs.push(current.clone());
        current = kernel(&current);
    }
}

/// The resolution of a module presented on `rank` generators by
/// `presentation` (columns are relations), with `P^0 = A^rank`.
pub fn free_resolution(
    presentation: &RingMatrix,
    rank: usize,
    side: Side,
    depth: usize,
) -> Result<(Complex, ResolutionEnd)> {
    let ring = presentation.ring();
    if rank == 0 {
        return Ok((Complex::zero(ring, side), ResolutionEnd::Finite { length: 0 }));
    }
    let (diffs, end) = resolve_differentials(presentation, depth);
    // diffs[k] = d^{-k-1}: P^{-k-1} -> P^{-k}.
    let lo = -(diffs.len() as Degree);
    let below = match end {
        ResolutionEnd::Periodic { period, .. } => Tail::Periodic(period),
        _ => Tail::Zero,
    };
    let shape = Shape { lo, hi: 0, below, above: Tail::Zero };
    let rank_at = |j: Degree| if j == 0 { rank } else { diffs[(-j - 1) as usize].cols() };
    let p = Complex::from_fn(
        ring,
        side,
        shape,
        |j| (rank_at(j), RingMatrix::zeros(ring, rank_at(j), 0)),
        |j| if j == 0 { RingMatrix::zeros(ring, 0, rank) } else { diffs[(-j - 1) as usize].clone() },
    )?;
    Ok((p, end))
}

pub fn build_generator(m: &FPModule, depth: usize) -> Result<GeneratorPackage> {
    if m.side() != Side::Left {
        return Err(Error::SideMismatch("generators are built from left modules".into()));
    }
    let ring = m.ring();
    let dual = dual_with_embedding(m);
    let k = dual.embedding.cols();
    let (resolution, end) = free_resolution(dual.module.presentation(), k, Side::Right, depth)?;
    let dual_conc = Complex::concentrated(&dual.module, 0);
    let mut comps = BTreeMap::new();
    comps.insert(0, RingMatrix::identity(ring, k));
    let augmentation = ChainMap::from_components(&resolution, &dual_conc, &comps)?;
    let dual_resolution = resolution.dualize()?;
    let m_conc = Complex::concentrated(m, 0);
    let mut comps = BTreeMap::new();
    comps.insert(0, dual.embedding.transpose());
    let comparison = ChainMap::from_components(&m_conc, &dual_resolution, &comps)?;
    Ok(GeneratorPackage {
        module: m.clone(),
        dual: dual.module,
        embedding: dual.embedding,
        resolution,
        end,
        augmentation,
        double_dual: canonical_double_dual_map(m),
        dual_resolution,
        comparison,
    })
}

impl GeneratorPackage {
    pub fn module_complex(&self) -> Complex {
        Complex::concentrated(&self.module, 0)
    }

    /// `π` is a quasi-isomorphism: `H^0 P -> M*` is an isomorphism and
    /// `H^j P = 0` for `j < 0` in `window` (all `j < 0` when `P` is finite or
    /// periodic, certified on one period). Returns the first failing degree.
    pub fn check_augmentation(&self, window: Window) -> Option<Degree> {
        if !induced_on_homology(&self.augmentation, 0).is_isomorphism() {
            return Some(0);
        }
        let lo = match self.end {
            ResolutionEnd::Truncated { depth } => window.lo.max(-(depth as Degree) + 1),
            _ => window.lo.min(self.resolution.shape().check_range(1).0),
        };
        if lo > -1 {
            return None;
        }
        first_non_exact(&self.resolution, Window::new(lo, -1))
    }

    /// The canonical `p: P -> P**`, computed degreewise from evaluation maps.
    pub fn double_dual_map(&self) -> Result<ChainMap> {
        let p = &self.resolution;
        let pdd = self.dual_resolution.dualize()?;
        let ring = p.ring();
        ChainMap::from_fn(p, &pdd, |j| {
            let free = FPModule::free(ring, Side::Right, p.rank(j));
            canonical_double_dual_map(&free).matrix().clone()
        })
    }

    /// Whether every component of `p: P -> P**` is invertible.
    pub fn double_dual_is_isomorphism(&self) -> Result<bool> {
        let p = self.double_dual_map()?;
        let (a, b) = p.shape().check_range(1);
        let side = Side::Right;
        Ok((a..=b).all(|j| {
            let f = FPModule::free(p.source().ring(), side, p.source().rank(j));
            let g = FPModule::free(p.source().ring(), side, p.target().rank(j));
            ModuleMap::new_unchecked(f, g, p.component(j)).is_isomorphism()
        }))
    }

    /// `(π* μ)*: P** -> M*`; its degree-0 component sends a functional on
    /// `P*^0` to its composite with the comparison map, in `M*` coordinates.
    pub fn dual_comparison(&self) -> Result<ChainMap> {
        let pdd = self.dual_resolution.dualize()?;
        let ring = self.module.ring();
        let k = self.embedding.cols();
        let images = &self.embedding * &RingMatrix::identity(ring, k);
        let coords = solve(&self.embedding, &images).ok_or_else(|| Error::Internal("dual comparison".into()))?;
        let mut comps = BTreeMap::new();
        comps.insert(0, coords);
        ChainMap::from_components(&pdd, &Complex::concentrated(&self.dual, 0), &comps)
    }

    fn truncation_limit(&self) -> Option<Degree> {
        match self.end {
            ResolutionEnd::Truncated { depth } => Some(depth as Degree),
            _ => None,
        }
    }

    /// Errors when Hom out of `P*` in total degrees `window` would read
    /// `P*` at or beyond a truncation.
    fn check_depth(&self, q: &Complex, window: Window) -> Result<()> {
        let Some(limit) = self.truncation_limit() else {
            return Ok(());
        };
        let qhi = q.extent().1.ok_or(Error::InfiniteHom(window.hi))?;
        let needed = qhi - (window.lo - 1) + 1;
        if needed >= limit {
            return Err(Error::Window {
                degree: window.lo,
                reason: format!("needs the dual resolution up to degree {needed}, truncated at {limit}"),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct QisoReport {
    pub window: Window,
    /// First degree where `Hom(cone(π*μ), Q)` has homology.
    pub cone_failure: Option<Degree>,
    /// For `Q` a single module: `p: P -> P**` invertible.
    pub double_dual_iso: Option<bool>,
    /// For `Q` a single module: `(π*μ)*` a quasi-isomorphism on the window.
    pub dual_comparison_qiso: Option<bool>,
    /// Set when the package was truncated.
    pub window_relative: bool,
}

impl QisoReport {
    pub fn passed(&self) -> bool {
        self.cone_failure.is_none() && self.double_dual_iso != Some(false) && self.dual_comparison_qiso != Some(false)
    }
}

/// `Hom(π*μ, Q)` is a quasi-isomorphism on `window` iff `Hom(cone(π*μ), Q)`
/// is exact there.
pub fn verify_generator_quasi_iso(pkg: &GeneratorPackage, q: &Complex, window: Window) -> Result<QisoReport> {
    pkg.check_depth(q, window)?;
    let c = cone(&pkg.comparison)?.complex;
    let h = hom_complex(&c, q, window)?;
    let cone_failure = window.degrees().find(|&n| !homology(&h.complex, n).is_zero());
    let single = q.is_bounded() && q.support().is_some_and(|(a, b)| a == b);
    let (double_dual_iso, dual_comparison_qiso) = if single {
        let dd = pkg.double_dual_is_isomorphism()?;
        let f = pkg.dual_comparison()?;
        let lo = match pkg.end {
            ResolutionEnd::Truncated { depth } => window.lo.max(-(depth as Degree) + 1),
            _ => window.lo.min(f.source().shape().check_range(1).0),
        };
        let qiso = crate::complex::is_quasi_isomorphism_on(&f, Window::new(lo.min(0), 0)).is_none()
            && (lo..=window.hi.max(0)).filter(|&j| j != 0).all(|j| homology(f.source(), j).is_zero());
        (Some(dd), Some(qiso))
    } else {
        (None, None)
    };
    Ok(QisoReport {
        window,
        cone_failure,
        double_dual_iso,
        dual_comparison_qiso,
        window_relative: pkg.end.is_truncated(),
    })
}

#[derive(Clone, Debug)]
pub struct H0Report {
    /// `H^0 Hom(P*, Q)`.
    pub classes: FPModule,
    /// `H^0 Hom(M, Q)`.
    pub module_side: FPModule,
    /// The map induced by precomposition with `π*μ`.
    pub induced: ModuleMap,
    pub is_isomorphism: bool,
    /// For `M = A`: per `i`, whether `H^0 Hom(Σ^i P*, Q) ≅ H^{-i} Q` via
    /// the evaluation at the generator.
    pub suspensions: Vec<(Degree, bool)>,
}

pub fn h0_hom_equivalence(pkg: &GeneratorPackage, q: &Complex, window: Window) -> Result<H0Report> {
    let zero = Window::new(0, 0);
    pkg.check_depth(q, zero)?;
    let (_, _, map) = hom_map_source(&pkg.comparison, q, zero)?;
    let induced = induced_on_homology(&map, 0);
    let is_isomorphism = induced.is_isomorphism();
    let mut suspensions = Vec::new();
    let is_ring = pkg.module.rank0() == 1 && pkg.module.is_free_presentation();
    if is_ring {
        for i in window.degrees() {
            let x = pkg.dual_resolution.suspend(i);
            let h = hom_complex(&x, q, zero)?;
            let to_vectors = h.vector_coordinates(0)?;
            let f = induced_by_matrix(&h.complex, 0, q, -i, &to_vectors);
            suspensions.push((i, f.is_isomorphism()));
        }
    }
    Ok(H0Report {
        classes: induced.source().clone(),
        module_side: induced.target().clone(),
        induced,
        is_isomorphism,
        suspensions,
    })
}

#[derive(Clone, Debug)]
pub struct CompactnessReport {
    /// Per total degree `n`: whether `⊕ H^n Hom(P*, Q_k) -> H^n Hom(P*, ⊕ Q_k)`
    /// is an isomorphism.
    pub degrees: Vec<(Degree, bool)>,
    pub summands: Vec<FPModule>,
    pub total: FPModule,
}

impl CompactnessReport {
    pub fn passed(&self) -> bool {
        self.degrees.iter().all(|d| d.1)
    }
}

/// Finite-family check that Hom out of `P*` commutes with the coproduct.
/// Infinite families are out of reach of any finite computation.
pub fn compactness_probe(pkg: &GeneratorPackage, qs: &[Complex], window: Window) -> Result<CompactnessReport> {
    let sum = Complex::direct_sum(qs)?;
    let ring = sum.ring();
    let x = &pkg.dual_resolution;
    let mut degrees = Vec::new();
    let mut summands = Vec::new();
    let mut total = FPModule::zero(ring, sum.side());
    for n in window.degrees() {
        let w = Window::new(n, n);
        pkg.check_depth(&sum, w)?;
        let mut modules = Vec::new();
        let mut blocks = Vec::new();
        for (k, q) in qs.iter().enumerate() {
            let inclusion = ChainMap::from_fn(q, &sum, |j| {
                let before: usize = qs[..k].iter().map(|p| p.rank(j)).sum();
                let mut m = RingMatrix::zeros(ring, sum.rank(j), q.rank(j));
                m.paste(before, 0, &RingMatrix::identity(ring, q.rank(j)));
                m
            })?;
            let (_, _, map) = hom_map_target(x, &inclusion, w)?;
            let f = induced_on_homology(&map, n);
            modules.push(f.source().clone());
            blocks.push(f);
        }
        let target = blocks[0].target().clone();
        let source = modules.iter().skip(1).fold(modules[0].clone(), |a, b| a.direct_sum(b));
        let matrix = blocks
            .iter()
            .skip(1)
            .fold(blocks[0].matrix().clone(), |a, b| a.hstack(b.matrix()).expect("same target"));
        let combined = ModuleMap::new(source, target.clone(), matrix)?;
        degrees.push((n, combined.is_isomorphism()));
        if n == window.lo {
            summands = modules;
            total = target;
        }
    }
    Ok(CompactnessReport { degrees, summands, total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;

    fn z() -> Ring {
        Ring::Integers
    }

    fn z4() -> Ring {
        Ring::modulo(4).unwrap()
    }

    fn two(ring: Ring) -> Complex {
        Complex::bounded(ring, Side::Left, -1, vec![1, 1], vec![RingMatrix::from_vec(ring, vec![vec![2]])]).unwrap()
    }

    #[test]
    fn ring_itself() {
        let pkg = build_generator(&FPModule::free(z(), Side::Left, 1), 8).unwrap();
        assert_eq!(pkg.resolution.support(), Some((0, 0)));
        assert_eq!(pkg.dual_resolution.support(), Some((0, 0)));
        assert!(pkg.comparison.component(0).is_identity());
        assert_eq!(pkg.end, ResolutionEnd::Finite { length: 0 });
        let r = verify_generator_quasi_iso(&pkg, &two(z()), Window::new(-3, 3)).unwrap();
        assert!(r.passed());
        let h = h0_hom_equivalence(&pkg, &two(z()), Window::new(-3, 3)).unwrap();
        assert!(h.is_isomorphism);
        assert_eq!(h.classes.invariants(), vec![2]);
        assert!(h.suspensions.iter().all(|s| s.1));
    }

    #[test]
    fn torsion_over_z() {
        let pkg = build_generator(&FPModule::cyclic(z(), Side::Left, 2), 8).unwrap();
        assert!(pkg.dual.is_zero());
        assert_eq!(pkg.dual_resolution.support(), None);
        let r = verify_generator_quasi_iso(&pkg, &two(z()), Window::new(-3, 3)).unwrap();
        assert!(r.passed());
        let h = h0_hom_equivalence(&pkg, &two(z()), Window::new(0, 0)).unwrap();
        assert!(h.classes.is_zero() && h.module_side.is_zero());
    }

    #[test]
    fn z2_over_z4_is_periodic() {
        let pkg = build_generator(&FPModule::cyclic(z4(), Side::Left, 2), 8).unwrap();
        assert_eq!(pkg.end, ResolutionEnd::Periodic { start: 1, period: 1 });
        let two = RingMatrix::from_vec(z4(), vec![vec![2]]);
        for j in -12..0 {
            assert_eq!(pkg.resolution.differential(j), two);
        }
        for j in 0..12 {
            assert_eq!(pkg.dual_resolution.differential(j), two);
        }
        assert_eq!(pkg.check_augmentation(Window::new(-6, 0)), None);
        assert!(pkg.double_dual_is_isomorphism().unwrap());
        let q = Complex::free_in_degree(z4(), Side::Left, 1, 0);
        let r = verify_generator_quasi_iso(&pkg, &q, Window::new(-2, 4)).unwrap();
        assert!(r.passed(), "{r:?}");
        let h = h0_hom_equivalence(&pkg, &q, Window::new(0, 0)).unwrap();
        // Oracle: Hom(Z/2, Z/4) = {x : 2x = 0} has two elements.
        let oracle = (0..4).filter(|x| (2 * x) % 4 == 0).count() as u128;
        assert_eq!(h.classes.order(), Some(oracle));
        assert_eq!(h.module_side.order(), Some(oracle));
        assert!(h.is_isomorphism);
        let probe = compactness_probe(&pkg, &[q.clone(), q.clone(), q], Window::new(0, 0)).unwrap();
        assert!(probe.passed());
        assert_eq!(probe.total.order(), Some(oracle.pow(3)));
    }

    #[test]
    fn truncated_package_reports_window() {
        let pkg = build_generator(&FPModule::cyclic(z4(), Side::Left, 2), 0).unwrap();
        assert_eq!(pkg.end, ResolutionEnd::Truncated { depth: 0 });
        let q = Complex::free_in_degree(z4(), Side::Left, 1, 0);
        assert!(matches!(verify_generator_quasi_iso(&pkg, &q, Window::new(-2, 4)), Err(Error::Window { .. })));
    }

    #[test]
    fn compactness_with_zero_summands() {
        let pkg = build_generator(&FPModule::cyclic(z(), Side::Left, 3), 8).unwrap();
        let zero = Complex::zero(z(), Side::Left);
        let probe = compactness_probe(&pkg, &[two(z()), zero.clone(), zero], Window::new(-1, 1)).unwrap();
        assert!(probe.passed());
    }
}
