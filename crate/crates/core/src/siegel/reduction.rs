use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::point::SiegelPoint;
use super::symplectic::{act, automorphy_factor, SymplecticMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_REDUCTION_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITERATIONS: usize = 1000;

// Cap on the inner Gauss loop; each pass at least halves |b| or swaps a and c.
const GAUSS_STEP_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReductionConfig {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        Self { tol: DEFAULT_REDUCTION_TOL, max_iterations: DEFAULT_MAX_ITERATIONS }
    }
}

/// Output of the reduction: `reduced = transform·original`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionResult {
    pub reduced: SiegelPoint,
    pub transform: SymplecticMatrix,
    pub iterations: usize,
}

/// The moves tried in the third step of the reduction loop.
///
/// Each move `γ` is a full symplectic matrix whose bottom row `(C, D)` gives a
/// condition `|det(Cτ + D)| ≥ 1` of the fundamental domain:
///
/// * `C = I`, `D = S` for the 27 symmetric `S` with entries in `{−1, 0, 1}`,
///   realised as `[[0, −I], [I, S]]`;
/// * `|uᵗτu + d| ≥ 1` for `u ∈ {(1,0), (0,1), (1,1), (1,−1)}` and
///   `d ∈ {−1, 0, 1}`, realised as an embedded `SL₂(ℤ)` inversion after the
///   change of basis `τ ↦ Uᵗ τ U`.
///
/// These 39 conditions contain Gottschling's 19 pairs.
pub fn candidate_moves() -> &'static [SymplecticMatrix] {
    static MOVES: OnceLock<Vec<SymplecticMatrix>> = OnceLock::new();
    MOVES.get_or_init(|| {
        let mut moves = Vec::with_capacity(39);
        let units = [-1i64, 0, 1];
        for &s11 in &units {
            for &s12 in &units {
                for &s22 in &units {
                    let s = [[s11, s12], [s12, s22]];
                    let m = SymplecticMatrix::from_blocks(
                        [[0, 0], [0, 0]],
                        [[-1, 0], [0, -1]],
                        [[1, 0], [0, 1]],
                        s,
                    )
                    .expect("[[0,-I],[I,S]] is symplectic for symmetric S");
                    moves.push(m);
                }
            }
        }
        let bases = [[[1, 0], [0, 1]], [[0, 1], [1, 0]], [[1, 0], [1, 1]], [[1, 0], [-1, 1]]];
        for u in bases {
            let basis = SymplecticMatrix::change_of_basis(u).expect("unimodular");
            for &d in &units {
                let inversion = SymplecticMatrix::from_blocks(
                    [[0, 0], [0, 1]],
                    [[-1, 0], [0, 0]],
                    [[1, 0], [0, 0]],
                    [[d, 0], [0, 1]],
                )
                .expect("embedded SL₂ inversion is symplectic");
                moves.push(inversion * basis);
            }
        }
        moves
    })
}

/// Gauss reduction of the binary form `Y = [[a, b], [b, c]]`.
///
/// Returns `U ∈ GL₂(ℤ)` with `Uᵗ Y U` satisfying `0 ≤ 2b ≤ a ≤ c`.
fn minkowski_basis(y: [f64; 3], tol: f64) -> [[i64; 2]; 2] {
    let [mut a, mut b, mut c] = y;
    let mut u = [[1i64, 0], [0, 1]];
    // u ← u·v
    let compose = |u: &mut [[i64; 2]; 2], v: [[i64; 2]; 2]| {
        *u = [
            [u[0][0] * v[0][0] + u[0][1] * v[1][0], u[0][0] * v[0][1] + u[0][1] * v[1][1]],
            [u[1][0] * v[0][0] + u[1][1] * v[1][0], u[1][0] * v[0][1] + u[1][1] * v[1][1]],
        ];
    };
    for _ in 0..GAUSS_STEP_CAP {
        if 2.0 * b.abs() > a * (1.0 + tol) {
            let k = (b / a).round();
            compose(&mut u, [[1, -(k as i64)], [0, 1]]);
            c = c - 2.0 * k * b + k * k * a;
            b -= k * a;
        }
        if c < a * (1.0 - tol) {
            compose(&mut u, [[0, 1], [1, 0]]);
            std::mem::swap(&mut a, &mut c);
        } else {
            break;
        }
    }
    if b < 0.0 {
        compose(&mut u, [[1, 0], [0, -1]]);
    }
    u
}

fn translation_to_unit_box(tau: &SiegelPoint, tol: f64) -> Option<SymplecticMatrix> {
    let shift = |x: f64| -> i64 {
        if x.abs() > 0.5 + tol {
            -(x.round() as i64)
        } else {
            0
        }
    };
    let [x1, x2, x4] = tau.real_parts();
    let s = [[shift(x1), shift(x2)], [shift(x2), shift(x4)]];
    if s == [[0, 0], [0, 0]] {
        None
    } else {
        Some(SymplecticMatrix::translation(s).expect("symmetric shift"))
    }
}

/// Candidate move with the smallest `|det(Cτ + D)|`.
fn best_move(tau: &SiegelPoint) -> (SymplecticMatrix, f64) {
    candidate_moves()
        .iter()
        .map(|g| (*g, automorphy_factor(g, tau).norm()))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("candidate set is nonempty")
}

/// Whether `tau` satisfies the fundamental-domain inequalities up to `tol`.
pub fn is_reduced(tau: &SiegelPoint, tol: f64) -> bool {
    let [y1, y2, y4] = tau.imag_parts();
    let minkowski = y2 >= -tol && 2.0 * y2 <= y1 + tol && y1 <= y4 + tol;
    let real_box = tau.real_parts().iter().all(|x| x.abs() <= 0.5 + tol);
    minkowski && real_box && best_move(tau).1 >= 1.0 - tol
}

/// Reduce with the default iteration cap.
pub fn reduce_to_fundamental_domain(tau: &SiegelPoint, tol: f64) -> Result<ReductionResult> {
    reduce_with(tau, &ReductionConfig { tol, ..ReductionConfig::default() })
}

/// Moves `tau` into the fundamental domain of `Sp₄(ℤ)`.
///
/// Each pass Minkowski-reduces `Im τ`, translates `Re τ` into `[−½, ½]³` and
/// applies the candidate move with the smallest `|det(Cτ + D)|` if it is below
/// `1 − tol`. That move multiplies `det Im τ` by `|det(Cτ + D)|⁻² > 1`.
pub fn reduce_with(tau: &SiegelPoint, config: &ReductionConfig) -> Result<ReductionResult> {
    if !(config.tol > 0.0 && config.tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "reduction tolerance {} must lie in (0, 1)",
            config.tol
        )));
    }
    let tol = config.tol;
    let mut current = *tau;
    let mut transform = SymplecticMatrix::identity();
    let apply = |g: SymplecticMatrix, cur: &mut SiegelPoint, tr: &mut SymplecticMatrix| -> Result<()> {
        *cur = act(&g, cur)?;
        *tr = g * *tr;
        Ok(())
    };

    for iteration in 1..=config.max_iterations {
        let u = minkowski_basis(current.imag_parts(), tol);
        if u != [[1, 0], [0, 1]] {
            let g = SymplecticMatrix::change_of_basis(u).expect("Gauss reduction stays in GL₂(ℤ)");
            apply(g, &mut current, &mut transform)?;
        }
        if let Some(g) = translation_to_unit_box(&current, tol) {
            apply(g, &mut current, &mut transform)?;
        }
        let (g, det_abs) = best_move(&current);
        if det_abs >= 1.0 - tol {
            return Ok(ReductionResult { reduced: current, transform, iterations: iteration });
        }
        apply(g, &mut current, &mut transform)?;
    }
    Err(Error::NonConvergence {
        best: Box::new(ReductionResult { reduced: current, transform, iterations: config.max_iterations }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::siegel::is_symplectic;

    #[test]
    fn moves_are_symplectic_and_distinct() {
        let moves = candidate_moves();
        assert_eq!(moves.len(), 39);
        for m in moves {
            assert!(is_symplectic(m.entries()));
        }
        let mut sorted: Vec<_> = moves.iter().map(|m| *m.entries()).collect();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 39);
    }

    #[test]
    fn rank_one_moves_measure_shifted_entries() {
        let tau = SiegelPoint::from_parts([0.1, 0.2, -0.3], [1.1, 0.4, 1.3]).unwrap();
        let [t1, t2, t4] = tau.entries();
        let values: Vec<f64> =
            candidate_moves()[27..].iter().map(|g| automorphy_factor(g, &tau).norm()).collect();
        let expected = [t1, t4, t1 + t2 * 2.0 + t4, t1 - t2 * 2.0 + t4];
        for (k, e) in expected.iter().enumerate() {
            for (j, d) in [-1.0, 0.0, 1.0].iter().enumerate() {
                assert!((values[3 * k + j] - (e + d).norm()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn gauss_reduction_orders_form() {
        let u = minkowski_basis([5.0, 3.0, 2.0], 1e-12);
        let (a, b, c) = (5.0, 3.0, 2.0);
        let f = |x: f64, y: f64| a * x * x + 2.0 * b * x * y + c * y * y;
        let u0 = (u[0][0] as f64, u[1][0] as f64);
        let u1 = (u[0][1] as f64, u[1][1] as f64);
        let a2 = f(u0.0, u0.1);
        let c2 = f(u1.0, u1.1);
        let b2 = a * u0.0 * u1.0 + b * (u0.0 * u1.1 + u0.1 * u1.0) + c * u0.1 * u1.1;
        assert!(0.0 <= 2.0 * b2 && 2.0 * b2 <= a2 && a2 <= c2, "{a2} {b2} {c2}");
    }

    #[test]
    fn identity_point_is_fixed() {
        let r = reduce_to_fundamental_domain(&SiegelPoint::i_identity(), DEFAULT_REDUCTION_TOL).unwrap();
        assert!(r.transform.is_plus_minus_identity());
        assert_eq!(r.reduced, SiegelPoint::i_identity());
    }

    #[test]
    fn integer_translations_are_removed() {
        let tau = SiegelPoint::from_parts([3.0, -2.0, 5.0], [1.0, 0.0, 1.0]).unwrap();
        let r = reduce_to_fundamental_domain(&tau, DEFAULT_REDUCTION_TOL).unwrap();
        assert!(r.reduced.max_entry_distance(&SiegelPoint::i_identity()) < 1e-12);
    }

    #[test]
    fn witness_maps_input_to_output() {
        let tau = SiegelPoint::from_parts([2.3, -0.7, 0.4], [0.05, 0.01, 0.3]).unwrap();
        let r = reduce_to_fundamental_domain(&tau, DEFAULT_REDUCTION_TOL).unwrap();
        let direct = act(&r.transform, &tau).unwrap();
        assert!(direct.max_entry_distance(&r.reduced) < 1e-8);
        assert!(is_reduced(&r.reduced, 1e-8));
        assert!(r.reduced.det_imag() > tau.det_imag());
    }

    #[test]
    fn iteration_cap_reports_best_iterate() {
        let tau = SiegelPoint::from_parts([0.3, 0.1, 0.2], [0.01, 0.001, 0.02]).unwrap();
        let cfg = ReductionConfig { tol: 1e-9, max_iterations: 1 };
        match reduce_with(&tau, &cfg) {
            Err(Error::NonConvergence { best }) => {
                assert_eq!(best.iterations, 1);
                assert!(best.reduced.det_imag() >= tau.det_imag());
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
