//! Weil heights over `ℚ` and `ℚ(i)` and the explicit height bounds.
//!
//! All logarithms are natural. At archimedean places the max-norm is used.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::embedding::{ProjectivePoint, TubeParameter};
use crate::error::{Error, Result};

/// A Gaussian integer `re + i·im`.
pub type GaussianInt = Complex<i64>;

/// Bound on `h(ψ(P))` in case (a).
pub const CASE_A_PSI_BOUND: f64 = 10.75;
/// Bound on the stable Faltings height in case (a).
pub const CASE_A_FALTINGS_BOUND: f64 = 1070.0;
/// `s_P` must stay below this in case (a).
pub const CASE_A_MAX_SP: u32 = 4;
/// `s_P + #archimedean places` must stay below this in case (b).
pub const CASE_B_MAX_SUM: u32 = 10;

fn all_zero<T: PartialEq + Default>(coords: &[T]) -> bool {
    coords.iter().all(|x| *x == T::default())
}

/// `log max|x|` of the primitive representative, computed as
/// `½·log(max |x|²)` so that rational and Gaussian inputs share one path.
fn half_log(max_sq: u128) -> f64 {
    0.5 * (max_sq as f64).ln()
}

/// Weil height of `(x₀ : … : xₙ) ∈ Pⁿ(ℚ)` with integer coordinates.
pub fn weil_height_rational(coords: &[i64]) -> Result<f64> {
    if coords.is_empty() || all_zero(coords) {
        return Err(Error::InvalidInput("a projective point needs a nonzero coordinate".into()));
    }
    let g = coords.iter().fold(0i64, |g, &x| g.gcd(&x)) as i128;
    let max_sq = coords
        .iter()
        .map(|&x| {
            let y = (x as i128 / g).unsigned_abs();
            y * y
        })
        .max()
        .unwrap_or(0);
    Ok(half_log(max_sq))
}

fn norm(z: Complex<i128>) -> i128 {
    z.re * z.re + z.im * z.im
}

/// Nearest integer to `n / d` for `d > 0`.
fn div_round(n: i128, d: i128) -> i128 {
    Integer::div_floor(&(2 * n + d), &(2 * d))
}

/// `a / b` rounded to the nearest Gaussian integer.
fn gaussian_quotient(a: Complex<i128>, b: Complex<i128>) -> Complex<i128> {
    let num = a * b.conj();
    let d = norm(b);
    Complex::new(div_round(num.re, d), div_round(num.im, d))
}

/// A greatest common divisor in `ℤ[i]`, defined up to a unit.
pub fn gaussian_gcd(a: GaussianInt, b: GaussianInt) -> GaussianInt {
    let (mut a, mut b) = (widen(a), widen(b));
    while b != Complex::new(0, 0) {
        let r = a - b * gaussian_quotient(a, b);
        a = b;
        b = r;
    }
    Complex::new(a.re as i64, a.im as i64)
}

fn widen(z: GaussianInt) -> Complex<i128> {
    Complex::new(z.re as i128, z.im as i128)
}

/// Weil height of a point of `Pⁿ(ℚ(i))` with Gaussian-integer coordinates.
///
/// `ℤ[i]` is a principal ideal domain, so dividing by the gcd leaves a
/// primitive representative whose only contribution is the complex place.
pub fn weil_height_gaussian(coords: &[GaussianInt]) -> Result<f64> {
    if coords.is_empty() || all_zero(coords) {
        return Err(Error::InvalidInput("a projective point needs a nonzero coordinate".into()));
    }
    let g = widen(coords.iter().fold(Complex::new(0, 0), |g, &x| gaussian_gcd(g, x)));
    let ng = norm(g);
    let max_sq = coords
        .iter()
        .map(|&x| {
            let num = widen(x) * g.conj();
            let y = Complex::new(num.re / ng, num.im / ng);
            norm(y) as u128
        })
        .max()
        .unwrap_or(0);
    Ok(half_log(max_sq))
}

/// Archimedean contribution `(1/degree)·Σ_σ log max_j |x_j^σ|` to the height
/// of a point of `P⁹`, from one image per complex embedding `σ`.
///
/// Complex places are counted through both conjugate embeddings, which
/// gives them multiplicity 2. The value is an estimate of the height only
/// when the coordinates are algebraic integers with unit content; a point
/// scaled to max-norm 1 contributes 0.
pub fn archimedean_height_estimate(points: &[ProjectivePoint], degree: usize) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidInput("at least one embedding is required".into()));
    }
    if points.len() != degree {
        return Err(Error::InvalidInput(format!(
            "{} embeddings given for a field of degree {degree}",
            points.len()
        )));
    }
    let total: f64 = points.iter().map(|p| p.max_modulus().ln()).sum();
    Ok(total / degree as f64)
}

/// The field of definition accepted by case (a).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Rational,
    ImaginaryQuadratic,
}

impl FromStr for FieldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Q" | "rational" => Ok(Self::Rational),
            "K" | "imaginary_quadratic" | "imaginary-quadratic" => Ok(Self::ImaginaryQuadratic),
            _ => Err(Error::InvalidInput(format!(
                "unknown field kind {s:?} (expected Q or imaginary_quadratic)"
            ))),
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Rational => "rational",
            Self::ImaginaryQuadratic => "imaginary_quadratic",
        })
    }
}

/// Outcome of a bound evaluation with its inputs echoed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(rename = "holds")]
    pub condition_holds: bool,
    #[serde(rename = "h_psi")]
    pub h_psi_bound: Option<f64>,
    #[serde(rename = "h_faltings")]
    pub h_faltings_bound: Option<f64>,
    pub s_p: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub archimedean_places: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

/// Case (a): over `ℚ` or an imaginary quadratic field with `s_P < 4`.
pub fn bound_case_a(s_p: u32, field: FieldKind) -> BoundReport {
    let holds = s_p < CASE_A_MAX_SP;
    BoundReport {
        condition_holds: holds,
        h_psi_bound: holds.then_some(CASE_A_PSI_BOUND),
        h_faltings_bound: holds.then_some(CASE_A_FALTINGS_BOUND),
        s_p,
        field: Some(field),
        archimedean_places: None,
        t: None,
    }
}

/// `4πt + 6.14`.
pub fn case_b_psi_bound(t: TubeParameter) -> f64 {
    4.0 * PI * t.value() + 6.14
}

/// `2πt + 535·log(2πt + 9)`.
pub fn case_b_faltings_bound(t: TubeParameter) -> f64 {
    let x = 2.0 * PI * t.value();
    x + 535.0 * (x + 9.0).ln()
}

/// Case (b): any number field with `s_P + #archimedean places < 10`, for
/// points outside the tube `U_t`.
pub fn bound_case_b(s_p: u32, archimedean_places: u32, t: TubeParameter) -> Result<BoundReport> {
    if archimedean_places == 0 {
        return Err(Error::InvalidInput("a number field has at least one archimedean place".into()));
    }
    let holds = s_p.saturating_add(archimedean_places) < CASE_B_MAX_SUM;
    Ok(BoundReport {
        condition_holds: holds,
        h_psi_bound: holds.then(|| case_b_psi_bound(t)),
        h_faltings_bound: holds.then(|| case_b_faltings_bound(t)),
        s_p,
        field: None,
        archimedean_places: Some(archimedean_places),
        t: Some(t.value()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{min_tube_parameter, psi};
    use crate::siegel::SiegelPoint;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn gi(re: i64, im: i64) -> GaussianInt {
        Complex::new(re, im)
    }

    /// `N(content)` as the index in `ℤ²` of the lattice spanned by every
    /// `x` and `i·x`: the gcd of all 2×2 minors.
    fn content_norm(coords: &[GaussianInt]) -> i128 {
        let rows: Vec<(i128, i128)> = coords
            .iter()
            .flat_map(|z| [(z.re as i128, z.im as i128), (-(z.im as i128), z.re as i128)])
            .collect();
        let mut g = 0i128;
        for (i, a) in rows.iter().enumerate() {
            for b in &rows[i + 1..] {
                g = g.gcd(&(a.0 * b.1 - a.1 * b.0));
            }
        }
        g
    }

    /// `log max|x| − ½·log N(content)`, without dividing anything out.
    fn height_oracle(coords: &[GaussianInt]) -> f64 {
        let max = coords.iter().map(|z| Complex64::new(z.re as f64, z.im as f64).norm()).fold(0.0, f64::max);
        max.ln() - 0.5 * (content_norm(coords) as f64).ln()
    }

    #[test]
    fn rational_examples() {
        assert_eq!(weil_height_rational(&[1, 1]).unwrap(), 0.0);
        assert!((weil_height_rational(&[2, 4, 8]).unwrap() - 4f64.ln()).abs() < 1e-15);
        assert_eq!(weil_height_rational(&[3, 5]).unwrap(), weil_height_rational(&[6, 10]).unwrap());
        assert_eq!(weil_height_rational(&[-7, 0]).unwrap(), 0.0);
        assert!(matches!(weil_height_rational(&[0, 0]), Err(Error::InvalidInput(_))));
        assert!(weil_height_rational(&[]).is_err());
    }

    #[test]
    fn gaussian_examples() {
        assert_eq!(weil_height_gaussian(&[gi(1, 0), gi(0, 1)]).unwrap(), 0.0);
        let h = weil_height_gaussian(&[gi(1, 1), gi(2, 0)]).unwrap();
        assert!((h - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((h - height_oracle(&[gi(1, 1), gi(2, 0)])).abs() < 1e-12);
        assert!(weil_height_gaussian(&[gi(0, 0)]).is_err());
    }

    #[test]
    fn gcd_divides_both() {
        let g = gaussian_gcd(gi(11, 3), gi(1, 8));
        assert_eq!(norm(widen(g)), content_norm(&[gi(11, 3), gi(1, 8)]));
        assert_eq!(gaussian_gcd(gi(0, 0), gi(0, 0)), gi(0, 0));
    }

    #[test]
    fn archimedean_estimate() {
        let p = psi(&SiegelPoint::i_identity(), 1e-10).unwrap();
        let unit = ProjectivePoint::new(p.normalized(), 1e-10).unwrap();
        assert!(archimedean_height_estimate(std::slice::from_ref(&unit), 1).unwrap().abs() < 1e-15);
        let one = archimedean_height_estimate(std::slice::from_ref(&p), 1).unwrap();
        let two = archimedean_height_estimate(&[p.clone(), p.clone()], 2).unwrap();
        assert!((one - two).abs() < 1e-15);
        let again =
            archimedean_height_estimate(&[psi(&SiegelPoint::i_identity(), 1e-10).unwrap()], 1).unwrap();
        assert!(one.is_finite() && (one - again).abs() < 1e-8);
        assert!(archimedean_height_estimate(&[], 1).is_err());
        assert!(archimedean_height_estimate(&[p], 2).is_err());
    }

    #[test]
    fn case_a() {
        let r = bound_case_a(3, FieldKind::Rational);
        assert!(r.condition_holds);
        assert_eq!((r.h_psi_bound, r.h_faltings_bound), (Some(10.75), Some(1070.0)));
        let r = bound_case_a(4, FieldKind::Rational);
        assert!(!r.condition_holds && r.h_psi_bound.is_none() && r.h_faltings_bound.is_none());
        assert!(bound_case_a(0, FieldKind::ImaginaryQuadratic).condition_holds);
    }

    #[test]
    fn case_b() {
        let t = TubeParameter::new(1.0).unwrap();
        let r = bound_case_b(3, 1, t).unwrap();
        assert!((r.h_psi_bound.unwrap() - 18.706370614359172).abs() < 1e-12);
        assert!(!bound_case_b(9, 1, t).unwrap().condition_holds);
        let r = bound_case_b(0, 1, TubeParameter::new(min_tube_parameter()).unwrap()).unwrap();
        assert!((r.h_psi_bound.unwrap() - 17.022796185405305).abs() < 1e-12);
        assert!(matches!(bound_case_b(0, 0, t), Err(Error::InvalidInput(_))));
        assert!(matches!(TubeParameter::new(0.5), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn report_json_omits_absent_inputs() {
        let json = serde_json::to_string(&bound_case_a(3, FieldKind::Rational)).unwrap();
        assert_eq!(json, r#"{"holds":true,"h_psi":10.75,"h_faltings":1070.0,"s_p":3,"field":"rational"}"#);
        let back: BoundReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, bound_case_a(3, FieldKind::Rational));
    }

    proptest! {
        #[test]
        fn rational_height_is_scale_invariant(
            coords in prop::collection::vec(-10_000i64..10_000, 1..6),
            lambda in prop::sample::select(vec![-97i64, -6, -1, 2, 3, 1000, 65_536]),
        ) {
            prop_assume!(coords.iter().any(|&x| x != 0));
            let scaled: Vec<i64> = coords.iter().map(|x| x * lambda).collect();
            prop_assert_eq!(weil_height_rational(&coords).unwrap(), weil_height_rational(&scaled).unwrap());
        }

        #[test]
        fn heights_are_nonnegative_and_consistent(coords in prop::collection::vec(-1000i64..1000, 1..6)) {
            prop_assume!(coords.iter().any(|&x| x != 0));
            let h = weil_height_rational(&coords).unwrap();
            let as_gaussian: Vec<GaussianInt> = coords.iter().map(|&x| gi(x, 0)).collect();
            prop_assert!(h >= 0.0);
            prop_assert_eq!(h, weil_height_gaussian(&as_gaussian).unwrap());
        }

        #[test]
        fn gaussian_height_matches_content_oracle(
            parts in prop::collection::vec((-300i64..300, -300i64..300), 1..5),
            unit in 0usize..4,
            scale in (-20i64..20, -20i64..20),
        ) {
            let coords: Vec<GaussianInt> = parts.iter().map(|&(a, b)| gi(a, b)).collect();
            prop_assume!(coords.iter().any(|z| *z != gi(0, 0)) && scale != (0, 0));
            let h = weil_height_gaussian(&coords).unwrap();
            prop_assert!(h >= 0.0);
            prop_assert!((h - height_oracle(&coords)).abs() < 1e-12);
            let u = [gi(1, 0), gi(0, 1), gi(-1, 0), gi(0, -1)][unit];
            let moved: Vec<GaussianInt> = coords.iter().map(|&z| z * u * gi(scale.0, scale.1)).collect();
            prop_assert!((h - weil_height_gaussian(&moved).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn case_b_bounds_increase_with_t(t1 in 0.8661f64..50.0, dt in 1e-3f64..10.0) {
            let a = bound_case_b(0, 1, TubeParameter::new(t1).unwrap()).unwrap();
            let b = bound_case_b(0, 1, TubeParameter::new(t1 + dt).unwrap()).unwrap();
            prop_assert!(b.h_psi_bound.unwrap() > a.h_psi_bound.unwrap());
            prop_assert!(b.h_faltings_bound.unwrap() > a.h_faltings_bound.unwrap());
        }
    }
}
