//! Seeded random instances: matrices, modules, complexes, chain maps and
//! relations. Every sampler is a pure function of the RNG state, so a seed
//! reproduces an instance exactly.

use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{ChainMap, Complex};
use crate::flatness::FlatRelation;
use crate::graded::Graded;
use crate::linalg::kernel;
use crate::matrix::RingMatrix;
use crate::module::FPModule;
use crate::ring::{Ring, Side};
use crate::{Degree, Elem};

pub type Sampler = ChaCha8Rng;

pub fn sampler(seed: u64) -> Sampler {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `[-bound, bound]` before reduction.
pub fn matrix(rng: &mut Sampler, ring: Ring, rows: usize, cols: usize, bound: Elem) -> RingMatrix {
    let data = (0..rows * cols).map(|_| rng.gen_range(-bound..=bound)).collect();
    RingMatrix::new(ring, rows, cols, data).expect("sampled matrix")
}

/// A module with at most `max_rank` generators and relations.
pub fn module(rng: &mut Sampler, ring: Ring, side: Side, max_rank: usize, bound: Elem) -> FPModule {
    let r0 = rng.gen_range(0..=max_rank);
    let r1 = rng.gen_range(0..=max_rank);
    FPModule::new(side, matrix(rng, ring, r0, r1, bound))
}

/// A bounded complex on `lo ..= lo + len - 1` whose differentials are
/// random combinations of the left kernel of the previous one.
pub fn complex(rng: &mut Sampler, ring: Ring, side: Side, lo: Degree, len: usize, max_rank: usize, bound: Elem) -> Complex {
    if len == 0 {
        return Complex::zero(ring, side);
    }
    let ranks: Vec<usize> = (0..len).map(|_| rng.gen_range(0..=max_rank)).collect();
    let mut diffs: Vec<RingMatrix> = Vec::new();
    for k in 0..len - 1 {
        let d = match diffs.last() {
            None => matrix(rng, ring, ranks[k + 1], ranks[k], bound),
            Some(prev) => {
                let left_kernel = kernel(&prev.transpose()).transpose();
                let mix = matrix(rng, ring, ranks[k + 1], left_kernel.rows(), bound.min(3));
                &mix * &left_kernel
            }
        };
        diffs.push(d);
    }
    Complex::bounded(ring, side, lo, ranks, diffs).expect("sampled differentials square to zero")
}

/// A product of elementary matrices and its inverse.
pub fn automorphism(rng: &mut Sampler, ring: Ring, n: usize, steps: usize, bound: Elem) -> (RingMatrix, RingMatrix) {
    let mut u = RingMatrix::identity(ring, n);
    let mut inv = RingMatrix::identity(ring, n);
    if n < 2 {
        return (u, inv);
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = rng.gen_range(-bound..=bound);
        let mut e = RingMatrix::identity(ring, n);
        e.set(i, j, ring.reduce(c));
        let mut e_inv = RingMatrix::identity(ring, n);
        e_inv.set(i, j, ring.reduce(-c));
        u = &e * &u;
        inv = &inv * &e_inv;
    }
    (u, inv)
}

/// A direct sum of `A --1--> A` pieces spread over `lo ..= lo + len - 1`,
/// with every term scrambled by a random automorphism.
pub fn contractible(rng: &mut Sampler, ring: Ring, side: Side, lo: Degree, len: usize, max_pieces: usize) -> Complex {
    let len = len.max(2);
    let mut ranks = vec![0usize; len];
    let mut pieces: Vec<usize> = Vec::new();
    for _ in 0..rng.gen_range(1..=max_pieces.max(1)) {
        let k = rng.gen_range(0..len - 1);
        pieces.push(k);
        ranks[k] += 1;
        ranks[k + 1] += 1;
    }
    let mut fill = vec![0usize; len];
    let mut diffs: Vec<RingMatrix> = (0..len - 1).map(|k| RingMatrix::zeros(ring, ranks[k + 1], ranks[k])).collect();
    for &k in &pieces {
        let (src, dst) = (fill[k], fill[k + 1]);
        diffs[k].set(dst, src, 1);
        fill[k] += 1;
        fill[k + 1] += 1;
    }
    let autos: Vec<(RingMatrix, RingMatrix)> = ranks.iter().map(|&r| automorphism(rng, ring, r, 3 * r, 3)).collect();
    let diffs = diffs
        .iter()
        .enumerate()
        .map(|(k, d)| &(&autos[k + 1].0 * d) * &autos[k].1)
        .collect();
    Complex::bounded(ring, side, lo, ranks, diffs).expect("scrambled contractible complex")
}

/// `d_Y s + s d_X` for a random `s`, plus a random multiple of the identity
/// when `x` and `y` coincide.
pub fn chain_map(rng: &mut Sampler, x: &Complex, y: &Complex, bound: Elem) -> ChainMap {
    let ring = x.ring();
    let (a, b) = x.shape().check_range(1);
    let (c, d) = y.shape().check_range(1);
    let lo = a.min(c) - 1;
    let hi = b.max(d) + 1;
    let s: Vec<RingMatrix> = (lo..=hi + 1).map(|j| matrix(rng, ring, y.rank(j - 1), x.rank(j), bound)).collect();
    let s_at = |j: Degree| -> RingMatrix {
        if j < lo || j > hi + 1 {
            RingMatrix::zeros(ring, y.rank(j - 1), x.rank(j))
        } else {
            s[(j - lo) as usize].clone()
        }
    };
    let scale = if x.same_as(y) { rng.gen_range(-bound..=bound) } else { 0 };
    let comps = Graded::from_fn(crate::graded::Shape::bounded(lo, hi), |j| {
        let h = &(&y.differential(j - 1) * &s_at(j)) + &(&s_at(j + 1) * &x.differential(j));
        if scale != 0 {
            &h + &RingMatrix::identity(ring, x.rank(j)).scale(scale)
        } else {
            h
        }
    });
    ChainMap::new(x.clone(), y.clone(), comps).expect("sampled chain map")
}

/// `Σ_s a_s z_s = 0` in `A^rank` with `m` terms.
pub fn relation(rng: &mut Sampler, ring: Ring, m: usize, rank: usize, bound: Elem) -> FlatRelation {
    let a: Vec<Elem> = (0..m).map(|_| ring.reduce(rng.gen_range(-bound..=bound))).collect();
    let row = RingMatrix::new(ring, 1, m, a.clone()).expect("coefficient row");
    let ker = kernel(&row);
    let mix = matrix(rng, ring, rank, ker.cols(), bound);
    let z = &mix * &ker.transpose();
    FlatRelation::new(a, z).expect("sampled relation")
}
