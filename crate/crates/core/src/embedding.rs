//! The theta embedding `ψ : A₂(2) → P⁹`, `τ ↦ (Θ_m(τ)⁴)_{m even}`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::siegel::{reduce_to_fundamental_domain, SiegelPoint, DEFAULT_REDUCTION_TOL};
use crate::theta::{theta_fourth_vector_with, Normalization, DEFAULT_FOURTH_POWER_TOL};

/// Order tag carried by the JSON encoding of [`ProjectivePoint`].
pub const COORDINATE_ORDER: &str = "lex(a1,a2,b1,b2)";

/// Relative singular-value cutoff used by [`relation_rank`].
pub const RANK_THRESHOLD: f64 = 1e-6;

/// Default relative threshold below which a coordinate counts as vanishing.
pub const DEFAULT_VANISHING_REL_TOL: f64 = 1e-6;

/// Default tube height beyond which the product-locus detector abstains.
pub const DEFAULT_TUBE_CUTOFF: f64 = 2.0;

/// Minimum samples accepted by [`relation_rank`].
pub const MIN_RANK_SAMPLES: usize = 10;

/// `√3/2`, the smallest admissible tube parameter.
pub fn min_tube_parameter() -> f64 {
    3f64.sqrt() / 2.0
}

/// A point of `P⁹` with coordinates indexed by the even characteristics.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivePoint {
    coords: [Complex64; 10],
    tol: f64,
}

#[derive(Serialize, Deserialize)]
struct ProjectiveRepr {
    coords: [[f64; 2]; 10],
    order: String,
    #[serde(default = "default_tol")]
    tol: f64,
}

fn default_tol() -> f64 {
    DEFAULT_FOURTH_POWER_TOL
}

impl Serialize for ProjectivePoint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ProjectiveRepr {
            coords: self.coords.map(|z| [z.re, z.im]),
            order: COORDINATE_ORDER.to_string(),
            tol: self.tol,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProjectivePoint {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = ProjectiveRepr::deserialize(deserializer)?;
        if repr.order != COORDINATE_ORDER {
            return Err(serde::de::Error::custom(format!("unsupported coordinate order {:?}", repr.order)));
        }
        ProjectivePoint::new(repr.coords.map(|p| Complex64::new(p[0], p[1])), repr.tol)
            .map_err(serde::de::Error::custom)
    }
}

impl ProjectivePoint {
    /// Rejects coordinate vectors whose largest entry does not exceed `10·tol`.
    pub fn new(coords: [Complex64; 10], tol: f64) -> Result<Self> {
        if !(tol > 0.0) || coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput(
                "projective point needs finite coordinates and a positive tolerance".into(),
            ));
        }
        let p = Self { coords, tol };
        if p.max_modulus() <= 10.0 * tol {
            return Err(Error::InvalidInput(format!(
                "all coordinates are within 10·tol = {:e} of zero",
                10.0 * tol
            )));
        }
        Ok(p)
    }

    pub fn coords(&self) -> &[Complex64; 10] {
        &self.coords
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_modulus(&self) -> f64 {
        self.coords.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Coordinates scaled to unit max-norm.
    pub fn normalized(&self) -> [Complex64; 10] {
        let m = self.max_modulus();
        self.coords.map(|z| z / m)
    }

    /// `σ₂/σ₁` for the 2×10 matrix whose rows are `self` and `other`, each
    /// scaled to unit Euclidean norm. Zero iff the points coincide in `P⁹`.
    pub fn distance(&self, other: &ProjectivePoint) -> f64 {
        let unit = |c: &[Complex64; 10]| {
            let n = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            c.map(|z| z / n)
        };
        let (p, q) = (unit(&self.coords), unit(&other.coords));
        // det of the Gram matrix, via Lagrange's identity: Σ_{i<j} |pᵢqⱼ − pⱼqᵢ|²
        let mut gram_det = 0.0;
        for i in 0..10 {
            for j in (i + 1)..10 {
                gram_det += (p[i] * q[j] - p[j] * q[i]).norm_sqr();
            }
        }
        // σ₁² + σ₂² = 2 and σ₁²σ₂² = gram_det
        let root = (1.0 - gram_det).max(0.0).sqrt();
        let s1_sq = 1.0 + root;
        let s2_sq = gram_det / s1_sq;
        (s2_sq / s1_sq).sqrt()
    }

    /// Projective equality: `σ₂ ≤ tol·σ₁`, with the larger of the two tolerances.
    pub fn approx_eq(&self, other: &ProjectivePoint) -> bool {
        self.distance(other) <= self.tol.max(other.tol)
    }
}

/// `ψ(τ)` with the classical normalization and absolute tolerance `tol` per coordinate.
pub fn psi(tau: &SiegelPoint, tol: f64) -> Result<ProjectivePoint> {
    psi_with(tau, tol, Normalization::Classical)
}

pub fn psi_with(tau: &SiegelPoint, tol: f64, normalization: Normalization) -> Result<ProjectivePoint> {
    let values = theta_fourth_vector_with(tau, tol, normalization)?;
    let coords = values.map(|v| v.value);
    ProjectivePoint::new(coords, tol)
        .map_err(|_| Error::Inconsistency(format!("all theta fourth powers vanish at {tau}")))
}

/// Indices `i` with `|coords[i]| ≤ rel_tol·max|coords|`, in increasing order.
pub fn near_zero_coordinates(p: &ProjectivePoint, rel_tol: f64) -> Vec<usize> {
    let cutoff = rel_tol * p.max_modulus();
    (0..10).filter(|&i| p.coords[i].norm() <= cutoff).collect()
}

/// `t ≥ √3/2`, the height of the tube `U_t = {τ ∈ F : Im τ₄ ≥ t}`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct TubeParameter(f64);

impl TubeParameter {
    pub fn new(t: f64) -> Result<Self> {
        if t.is_nan() || t < min_tube_parameter() {
            return Err(Error::InvalidParameter(format!(
                "tube parameter {t} is below √3/2 ≈ {:.6}",
                min_tube_parameter()
            )));
        }
        Ok(Self(t))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Membership of a reduced point in `U_t`: `Im τ₄ ≥ t`.
///
/// The tube is defined inside the fundamental domain; pass the output of
/// [`reduce_to_fundamental_domain`].
pub fn in_tube(reduced_tau: &SiegelPoint, t: TubeParameter) -> bool {
    reduced_tau.tau4().im >= t.value()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductLocusVerdict {
    Product,
    NotProduct,
    /// The reduced point lies in the tube, where several coordinates decay.
    Indeterminate,
}

/// Detects the product locus (the ten divisors `D_{2,a,b}`) by counting
/// vanishing coordinates of `ψ` at the reduced point.
pub fn is_product_locus(
    tau: &SiegelPoint,
    rel_tol: f64,
    cutoff: TubeParameter,
    tol: f64,
) -> Result<ProductLocusVerdict> {
    let reduced = reduce_to_fundamental_domain(tau, DEFAULT_REDUCTION_TOL)?.reduced;
    if in_tube(&reduced, cutoff) {
        return Ok(ProductLocusVerdict::Indeterminate);
    }
    let p = psi(&reduced, tol)?;
    Ok(if near_zero_coordinates(&p, rel_tol).len() == 1 {
        ProductLocusVerdict::Product
    } else {
        ProductLocusVerdict::NotProduct
    })
}

/// Numerical rank of the sample matrix together with its singular values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    /// Descending singular values of the max-normalized sample matrix.
    pub singular_values: Vec<f64>,
}

impl RankReport {
    /// `σ_rank / σ_{rank+1}`, or infinity when no further singular value is positive.
    pub fn gap(&self) -> f64 {
        gap_at(&self.singular_values, self.rank)
    }
}

/// `σ_k / σ_{k+1}` (1-based `k`).
pub fn gap_at(singular_values: &[f64], k: usize) -> f64 {
    match (singular_values.get(k.wrapping_sub(1)), singular_values.get(k)) {
        (Some(&a), Some(&b)) if b > 0.0 => a / b,
        (Some(_), _) => f64::INFINITY,
        _ => 0.0,
    }
}

/// Rank of the linear span of the samples: the number of singular values of
/// the `N × 10` matrix of max-normalized rows above [`RANK_THRESHOLD`] times the largest.
pub fn relation_rank(samples: &[ProjectivePoint]) -> Result<RankReport> {
    if samples.len() < MIN_RANK_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "relation rank needs at least {MIN_RANK_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let rows: Vec<[Complex64; 10]> = samples.iter().map(|p| p.normalized()).collect();
    let m = DMatrix::from_fn(rows.len(), 10, |i, j| rows[i][j]);
    let mut singular_values: Vec<f64> = m.singular_values().iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let largest = singular_values.first().copied().unwrap_or(0.0);
    let rank = singular_values.iter().filter(|&&s| s > RANK_THRESHOLD * largest).count();
    Ok(RankReport { rank, singular_values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::{even_characteristics, Characteristic};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn tube_membership() {
        let t = |x| TubeParameter::new(x).unwrap();
        assert!(in_tube(&SiegelPoint::i_identity(), t(0.9)));
        assert!(!in_tube(&SiegelPoint::i_identity(), t(1.1)));
        assert!(matches!(TubeParameter::new(0.5), Err(Error::InvalidParameter(_))));
        assert!(TubeParameter::new(min_tube_parameter()).is_ok());
        assert!(TubeParameter::new(f64::NAN).is_err());
    }

    #[test]
    fn projective_distance_ignores_scale() {
        let base = [c(1.0), c(2.0), c(0.0), c(-1.0), c(0.5), c(3.0), c(0.0), c(1.0), c(1.0), c(2.0)];
        let p = ProjectivePoint::new(base, 1e-12).unwrap();
        let scale = Complex64::new(-3.0, 4.0);
        let q = ProjectivePoint::new(base.map(|z| z * scale), 1e-12).unwrap();
        assert!(p.distance(&q) < 1e-15);
        assert!(p.approx_eq(&q));
        let mut other = base;
        other[2] = c(0.1);
        let r = ProjectivePoint::new(other, 1e-12).unwrap();
        assert!(p.distance(&r) > 1e-3);
        assert!(!p.approx_eq(&r));
    }

    #[test]
    fn all_zero_point_is_rejected() {
        assert!(ProjectivePoint::new([c(1e-12); 10], 1e-10).is_err());
    }

    #[test]
    fn psi_at_identity_vanishes_only_at_odd_times_odd() {
        let p = psi(&SiegelPoint::i_identity(), 1e-10).unwrap();
        let zeros = near_zero_coordinates(&p, DEFAULT_VANISHING_REL_TOL);
        assert_eq!(zeros.len(), 1);
        assert_eq!(even_characteristics()[zeros[0]], Characteristic::from_halves(1, 1, 1, 1).unwrap());
    }

    #[test]
    fn rank_needs_enough_samples() {
        let p = psi(&SiegelPoint::i_identity(), 1e-10).unwrap();
        let few = vec![p.clone(); MIN_RANK_SAMPLES - 1];
        assert!(matches!(relation_rank(&few), Err(Error::InvalidInput(_))));
        let same = vec![p; 50];
        assert_eq!(relation_rank(&same).unwrap().rank, 1);
    }

    #[test]
    fn json_shape() {
        let p = psi(&SiegelPoint::i_identity(), 1e-10).unwrap();
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["order"], COORDINATE_ORDER);
        assert_eq!(v["coords"].as_array().unwrap().len(), 10);
        let back: ProjectivePoint = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn gap_helper() {
        assert_eq!(gap_at(&[4.0, 2.0, 0.0], 2), f64::INFINITY);
        assert_eq!(gap_at(&[4.0, 2.0, 1.0], 2), 2.0);
        assert_eq!(gap_at(&[4.0], 3), 0.0);
    }
}
