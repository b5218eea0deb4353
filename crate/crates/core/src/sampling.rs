//! Seeded generators for test points and symplectic matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::siegel::{reduce_to_fundamental_domain, SiegelPoint, SymplecticMatrix, DEFAULT_REDUCTION_TOL};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_symmetric<R: Rng>(rng: &mut R, scale: i64) -> [[i64; 2]; 2] {
    let mut pick = || scale * rng.random_range(-1i64..=1);
    let (a, b, c) = (pick(), pick(), pick());
    [[a, b], [b, c]]
}

const BASES: [[[i64; 2]; 2]; 6] = [
    [[1, 1], [0, 1]],
    [[1, 0], [1, 1]],
    [[1, -1], [0, 1]],
    [[0, 1], [1, 0]],
    [[1, 0], [0, -1]],
    [[0, -1], [1, 0]],
];

/// A word of `len` generators of `Sp₄(ℤ)`: translations by symmetric
/// matrices with entries in `{−1, 0, 1}`, small changes of basis and `J`.
pub fn random_symplectic<R: Rng>(rng: &mut R, len: usize) -> SymplecticMatrix {
    let mut g = SymplecticMatrix::identity();
    for _ in 0..len {
        let step = match rng.random_range(0..3) {
            0 => SymplecticMatrix::translation(small_symmetric(rng, 1)).expect("symmetric"),
            1 => SymplecticMatrix::change_of_basis(BASES[rng.random_range(0..BASES.len())])
                .expect("unimodular"),
            _ => SymplecticMatrix::j(),
        };
        g = step * g;
    }
    g
}

/// A random element of `Γ₂(2)` built from at most `max_len` translations by
/// `2S` and their `J`-conjugates `[[I, 0], [2S, I]]`.
pub fn random_level2<R: Rng>(rng: &mut R, max_len: usize) -> SymplecticMatrix {
    loop {
        let len = rng.random_range(1..=max_len.max(1));
        let mut g = SymplecticMatrix::identity();
        for _ in 0..len {
            let s = small_symmetric(rng, 2);
            let step = if rng.random_bool(0.5) {
                SymplecticMatrix::translation(s)
            } else {
                SymplecticMatrix::lower_translation(s)
            }
            .expect("symmetric");
            g = step * g;
        }
        if g.is_level2() {
            return g;
        }
    }
}

/// A point with `Im τ = I₂ + P` and `Re τ` uniform in `[−½, ½]³`, where the
/// perturbation `P` has diagonal entries in `[0.1, 0.2]` and off-diagonal
/// entry in `[0.2, 0.3]`.
///
/// The off-diagonal floor keeps samples away from the diagonal locus
/// `τ₂ = 0`, where one theta constant vanishes.
pub fn random_generic_point<R: Rng>(rng: &mut R) -> SiegelPoint {
    let re = [rng.random_range(-0.5..=0.5), rng.random_range(-0.5..=0.5), rng.random_range(-0.5..=0.5)];
    let im =
        [1.0 + rng.random_range(0.1..=0.2), rng.random_range(0.2..=0.3), 1.0 + rng.random_range(0.1..=0.2)];
    SiegelPoint::from_parts(re, im).expect("perturbation keeps Im τ positive definite")
}

/// An arbitrary point of `H₂` with `Im τ = LLᵗ + 0.3·I` for a random lower
/// triangular `L` and `Re τ` uniform in `[−2, 2]³`.
pub fn random_point_in_h2<R: Rng>(rng: &mut R) -> SiegelPoint {
    let l11: f64 = rng.random_range(0.0..1.2);
    let l21: f64 = rng.random_range(-1.0..1.0);
    let l22: f64 = rng.random_range(0.0..1.2);
    let im = [l11 * l11 + 0.3, l11 * l21, l21 * l21 + l22 * l22 + 0.3];
    let re = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
    SiegelPoint::from_parts(re, im).expect("LLᵗ + 0.3·I is positive definite")
}

/// A random diagonal point `diag(τ₁, τ₄)` with `Im τⱼ ∈ [0.3, 2]`.
pub fn random_diagonal_point<R: Rng>(rng: &mut R) -> SiegelPoint {
    let re = [rng.random_range(-1.0..1.0), 0.0, rng.random_range(-1.0..1.0)];
    let im = [rng.random_range(0.3..2.0), 0.0, rng.random_range(0.3..2.0)];
    SiegelPoint::from_parts(re, im).expect("diagonal with positive imaginary parts")
}

/// `n` reduced points drawn with [`random_generic_point`] from `seed`.
/// The same seed always gives the same list.
pub fn sample_reduced_points(n: usize, seed: u64) -> Result<Vec<SiegelPoint>> {
    if n == 0 {
        return Err(Error::InvalidInput("sample size must be at least 1".into()));
    }
    let mut rng = seeded_rng(seed);
    (0..n)
        .map(|_| {
            let p = random_generic_point(&mut rng);
            reduce_to_fundamental_domain(&p, DEFAULT_REDUCTION_TOL).map(|r| r.reduced)
        })
        .collect()
}
