//! The equational flatness criterion as a certificate-producing solver.
//!
//! A relation `Σ_s a_s z_s = 0` in a module `F` is certified by a matrix
//! `ast` with `Σ_s a_s ast[s][t] = 0` and elements `q_t` with
//! `z_s = Σ_t ast[s][t] q_t`. A module is flat iff every relation admits a
//! certificate; the solver handles one relation at a time.

use crate::complex::{cycle_module, homology, Complex};
use crate::error::{Error, Result};
use crate::generator::{build_generator, ResolutionEnd};
use crate::graded::Window;
use crate::hom::hom_complex;
use crate::homotopy::{split_exactness_check, SplitVerdict};
use crate::linalg::{kernel, solve};
use crate::matrix::RingMatrix;
use crate::module::{projective_dimension, FPModule, ModuleMap, ProjectiveDimension};
use crate::ring::{Ring, Side};
use crate::{Degree, Elem};

/// `Σ_s a_s z_s = 0`; column `s` of `z` is `z_s` in generator coordinates
/// of the target module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatRelation {
    pub a: Vec<Elem>,
    pub z: RingMatrix,
}

impl FlatRelation {
    pub fn new(a: Vec<Elem>, z: RingMatrix) -> Result<FlatRelation> {
        if a.len() != z.cols() {
            return Err(Error::DimensionMismatch(format!("{} coefficients for {} elements", a.len(), z.cols())));
        }
        let ring = z.ring();
        Ok(FlatRelation { a: a.into_iter().map(|x| ring.reduce(x)).collect(), z })
    }

    pub fn ring(&self) -> Ring {
        self.z.ring()
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    fn row(&self) -> RingMatrix {
        RingMatrix::new(self.ring(), 1, self.a.len(), self.a.clone()).expect("coefficient row")
    }

    /// `Σ_s a_s z_s` as a column.
    pub fn combination(&self) -> RingMatrix {
        &self.z * &self.row().transpose()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatCertificate {
    /// `m x n`, columns annihilated by the coefficient row.
    pub ast: RingMatrix,
    /// Column `t` is `q_t`.
    pub q: RingMatrix,
    /// For targets with relations `R`: `z - q ast^T = R slack`.
    pub slack: Option<RingMatrix>,
}

/// Re-verifies a certificate by matrix multiplication only. `push` maps the
/// coordinates of the `q_t` into those of the `z_s` (the identity when
/// omitted); `relations` are the target's relations, paired with `slack`.
pub fn check_certificate(
    rel: &FlatRelation,
    cert: &FlatCertificate,
    push: Option<&RingMatrix>,
    relations: Option<&RingMatrix>,
) -> std::result::Result<(), String> {
    let m = rel.len();
    if cert.ast.rows() != m {
        return Err(format!("ast has {} rows, relation has {m} terms", cert.ast.rows()));
    }
    let annihilated = rel.row().try_mul(&cert.ast).map_err(|e| e.to_string())?;
    if !annihilated.is_zero() {
        return Err(format!("a * ast = {annihilated} is not zero"));
    }
    let q = match push {
        Some(p) => p.try_mul(&cert.q).map_err(|e| e.to_string())?,
        None => cert.q.clone(),
    };
    let expressed = q.try_mul(&cert.ast.transpose()).map_err(|e| e.to_string())?;
    let mut residual = rel.z.try_sub(&expressed).map_err(|e| e.to_string())?;
    if let (Some(r), Some(y)) = (relations, &cert.slack) {
        residual = residual.try_sub(&r.try_mul(y).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    }
    if !residual.is_zero() {
        return Err(format!("z differs from q * ast^T by {residual}"));
    }
    Ok(())
}

/// Certificate for a relation in the module `target`, or `None` when the
/// relation has none. Using a generating set of `ker(a)` for `ast` loses
/// nothing: any admissible `ast` factors through it.
pub fn flat_certificate_in(target: &FPModule, rel: &FlatRelation) -> Result<Option<FlatCertificate>> {
    let ring = rel.ring();
    if target.ring() != ring {
        return Err(Error::RingMismatch(target.ring(), ring));
    }
    if rel.z.rows() != target.rank0() {
        return Err(Error::DimensionMismatch("relation elements do not live in the target".into()));
    }
    if !target.vanishes(&rel.combination()) {
        return Err(Error::Precondition("Σ a_s z_s is not zero in the target".into()));
    }
    let ast = kernel(&rel.row());
    let r = target.presentation();
    let (n, k) = (ast.cols(), r.cols());
    // q ast^T + R Y = z in row-major vector form.
    let rows = target.rank0();
    let lhs_q = RingMatrix::identity(ring, rows).kron(&ast); // vec(q ast^T) = (I ⊗ ast) vec(q)
    let lhs_y = r.kron(&RingMatrix::identity(ring, rel.len())); // vec(R Y) = (R ⊗ I) vec(Y)
    let system = lhs_q.hstack(&lhs_y)?;
    let Some(sol) = solve(&system, &rel.z.vectorize()) else {
        return Ok(None);
    };
    let v = sol.column(0);
    let q = RingMatrix::unvectorize(&v[..rows * n], ring, rows, n);
    let slack = (k > 0).then(|| RingMatrix::unvectorize(&v[rows * n..], ring, k, rel.len()));
    let cert = FlatCertificate { ast, q, slack };
    check_certificate(rel, &cert, None, Some(r)).map_err(Error::Internal)?;
    Ok(Some(cert))
}

/// Certificate for a relation in a free module; always exists.
pub fn flat_certificate(rel: &FlatRelation) -> Result<FlatCertificate> {
    let free = FPModule::free(rel.ring(), Side::Left, rel.z.rows());
    flat_certificate_in(&free, rel)?.ok_or_else(|| Error::Internal("free module relation without certificate".into()))
}

/// Uniform bound on projective dimensions of flat modules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub bound: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { bound: 16 }
    }
}

impl EngineConfig {
    /// Known bounds: `Z` is hereditary, `Z/n` and fields are perfect.
    pub fn for_ring(ring: Ring) -> EngineConfig {
        match ring {
            Ring::Integers => EngineConfig { bound: 1 },
            Ring::IntegersModulo(_) | Ring::PrimeField(_) => EngineConfig { bound: 0 },
        }
    }
}

#[derive(Clone, Debug)]
pub enum CycleProbe {
    /// `z_s = Σ_t ast[s][t] σ(q_t)` with `q_t ∈ Q^{j-1}` and `σ = d^{j-1}`;
    /// `lift` is the factorization `M -> Q^{j-1}` on the `z_s`.
    Certified { certificate: FlatCertificate, lift: RingMatrix, sigma: RingMatrix },
    /// `H^j Hom(M, Q) ≠ 0` for the span `M` of the `z_s`: the hypothesis of
    /// the factorization fails. `generator_side` repeats the computation
    /// through the dual resolution when that Hom complex is finite.
    HomNonVanishing { module: FPModule, hom: FPModule, generator_side: Option<FPModule> },
    NotExact { homology: FPModule },
}

/// Certifies a relation among cycles of `Q^j` by lifting it along
/// `σ: Q^{j-1} -> Z^j`. `depth` bounds the resolution used for the
/// cross-check through the generator built from the span of the `z_s`.
pub fn cycle_flatness_probe(q: &Complex, j: Degree, rel: &FlatRelation, depth: usize) -> Result<CycleProbe> {
    if !q.is_free() {
        return Err(Error::Precondition("cycle probes need a complex of free modules".into()));
    }
    let ring = q.ring();
    let d = q.differential(j);
    if rel.z.rows() != q.rank(j) {
        return Err(Error::DimensionMismatch(format!("elements must lie in degree {j} of rank {}", q.rank(j))));
    }
    if !(&d * &rel.z).is_zero() {
        return Err(Error::Precondition(format!("the elements are not cycles in degree {j}")));
    }
    if !rel.combination().is_zero() {
        return Err(Error::Precondition("Σ a_s z_s is not zero".into()));
    }
    let h = homology(q, j);
    if !h.is_zero() {
        return Ok(CycleProbe::NotExact { homology: h });
    }
    let module = FPModule::generated_by(Side::Left, &rel.z);
    let m_conc = Complex::concentrated(&module, 0);
    let hom = hom_complex(&m_conc, q, Window::new(j, j))?.homology(j)?;
    if !hom.is_zero() {
        let pkg = build_generator(&module, depth)?;
        let generator_side = match pkg.end {
            ResolutionEnd::Truncated { .. } => None,
            _ => hom_complex(&pkg.dual_resolution, q, Window::new(j, j)).ok().and_then(|h| h.homology(j).ok()),
        };
        return Ok(CycleProbe::HomNonVanishing { module, hom, generator_side });
    }
    // f: M -> Q^{j-1} with d^{j-1} f = z and f killing the relations of M.
    let sigma = q.differential(j - 1);
    let (r, m) = (q.rank(j - 1), rel.len());
    let rels = module.presentation();
    let top = sigma.kron(&RingMatrix::identity(ring, m));
    let bottom = RingMatrix::identity(ring, r).kron(&rels.transpose());
    let system = top.vstack(&bottom)?;
    let rhs = rel.z.vectorize().vstack(&RingMatrix::zeros(ring, bottom.rows(), 1))?;
    let sol = solve(&system, &rhs)
        .ok_or_else(|| Error::Internal("vanishing Hom class without a lift".into()))?;
    let lift = RingMatrix::unvectorize(&sol.column(0), ring, r, m);
    let pushed = FlatRelation::new(rel.a.clone(), lift.clone())?;
    let certificate = flat_certificate(&pushed)?;
    check_certificate(rel, &certificate, Some(&sigma), None).map_err(Error::Internal)?;
    Ok(CycleProbe::Certified { certificate, lift, sigma })
}

#[derive(Clone, Debug)]
pub enum PdCollapse {
    /// Every cycle module in the window is projective; the split-exactness
    /// witness follows.
    Collapsed { dimensions: Vec<(Degree, usize)>, verdict: SplitVerdict },
    NotExact { degree: Degree, homology: FPModule },
    NotProjective { degree: Degree, cycle: FPModule, dimension: ProjectiveDimension },
    WindowTooNarrow { needed: usize, width: usize },
}

/// Exactness of `0 -> Z^j -> Q^j -> ... -> Q^{j+N-1} -> Z^{j+N} -> 0` with
/// `pd Z^{j+N} ≤ N` forces `Z^j` projective; this runs that argument on the
/// cycles of `window` and hands over to [`split_exactness_check`].
pub fn pd_bound_collapse(q: &Complex, config: EngineConfig, window: Window) -> Result<PdCollapse> {
    let needed = config.bound + 2;
    if window.width() < needed {
        return Ok(PdCollapse::WindowTooNarrow { needed, width: window.width() });
    }
    for j in window.lo..=window.hi + 2 {
        let h = homology(q, j);
        if !h.is_zero() {
            return Ok(PdCollapse::NotExact { degree: j, homology: h });
        }
    }
    let mut dimensions = Vec::new();
    for j in window.lo..=window.hi + 2 {
        let z = cycle_module(q, j).module;
        match projective_dimension(&z, config.bound) {
            ProjectiveDimension::Exactly(0) => dimensions.push((j, 0)),
            dimension => return Ok(PdCollapse::NotProjective { degree: j, cycle: z, dimension }),
        }
    }
    let verdict = split_exactness_check(q, window)?;
    Ok(PdCollapse::Collapsed { dimensions, verdict })
}

/// Whether `section` splits the presentation of its source.
pub fn is_splitting(section: &ModuleMap) -> bool {
    let m = section.source();
    let back = section.matrix() - &RingMatrix::identity(m.ring(), m.rank0());
    m.vanishes(&back)
}
