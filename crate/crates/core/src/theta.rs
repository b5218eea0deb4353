//! Genus-2 theta constants with half-integral characteristics.
//!
//! For `m = (a, b) ∈ {0, ½}⁴` the constant is the lattice sum
//!
//! ```text
//! Θ_m(τ) = Σ_{n ∈ ℤ²} exp(κ·iπ·(n+a)ᵗ τ (n+a) + 2iπ·nᵗb)
//! ```
//!
//! with `κ = 1` for [`Normalization::Classical`] and `κ = 2` for
//! [`Normalization::Doubled`]. The doubled series at `τ` equals the classical one
//! at `2τ` times the constant `e^{−2iπ·aᵗb}`.
//!
//! The sum runs over a box containing `max(|n₁|, |n₂|) ≤ R`, shell by shell, and the
//! reported error bound covers the discarded tail plus a first-order rounding
//! estimate.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::siegel::SiegelPoint;

/// Largest admissible truncation radius. The box has (2R+1)⁴ points, so
/// this keeps a single evaluation to a few times 10⁷ terms.
pub const MAX_RADIUS: usize = 40;
pub const DEFAULT_THETA_TOL: f64 = 1e-10;
pub const DEFAULT_FOURTH_POWER_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Scale of the quadratic term in the exponent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `exp(iπ·(n+a)ᵗτ(n+a) + 2iπ·nᵗb)`. Fourth powers are modular of weight 2 for `Γ₂(2)`.
    #[default]
    Classical,
    /// `exp(2iπ·(n+a)ᵗτ(n+a) + 2iπ·nᵗb)`.
    Doubled,
}

impl Normalization {
    fn kappa(self) -> f64 {
        match self {
            Normalization::Classical => 1.0,
            Normalization::Doubled => 2.0,
        }
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Normalization::Classical),
            "doubled" => Ok(Normalization::Doubled),
            other => Err(Error::InvalidInput(format!("unknown normalization {other:?}"))),
        }
    }
}

/// A characteristic `m = (a, b)` with `a, b ∈ {0, ½}²`.
///
/// Stored as four half-flags `(a₁, a₂, b₁, b₂)`; a set flag means `½`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Characteristic {
    halves: [u8; 4],
}

impl Characteristic {
    /// From half-flags `(a₁, a₂, b₁, b₂)`, each 0 or 1.
    pub fn from_halves(a1: u8, a2: u8, b1: u8, b2: u8) -> Result<Self> {
        let halves = [a1, a2, b1, b2];
        if halves.iter().any(|&h| h > 1) {
            return Err(Error::InvalidInput(format!("characteristic flags {halves:?} must be 0 or 1")));
        }
        Ok(Self { halves })
    }

    /// The characteristic whose bit pattern `a₁a₂b₁b₂` reads `bits` in binary.
    pub fn from_bits(bits: u8) -> Result<Self> {
        if bits > 15 {
            return Err(Error::InvalidInput(format!("characteristic index {bits} exceeds 15")));
        }
        Self::from_halves((bits >> 3) & 1, (bits >> 2) & 1, (bits >> 1) & 1, bits & 1)
    }

    pub fn bits(&self) -> u8 {
        let [a1, a2, b1, b2] = self.halves;
        (a1 << 3) | (a2 << 2) | (b1 << 1) | b2
    }

    pub fn a(&self) -> [f64; 2] {
        [0.5 * f64::from(self.halves[0]), 0.5 * f64::from(self.halves[1])]
    }

    pub fn b(&self) -> [f64; 2] {
        [0.5 * f64::from(self.halves[2]), 0.5 * f64::from(self.halves[3])]
    }

    /// Half-flags `(a₁, a₂, b₁, b₂)`.
    pub fn halves(&self) -> [u8; 4] {
        self.halves
    }

    /// Even iff `4·aᵗb` is even.
    pub fn parity(&self) -> Parity {
        let [a1, a2, b1, b2] = self.halves;
        if (a1 * b1 + a2 * b2) % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// All 16 characteristics in lexicographic order of `(a₁, a₂, b₁, b₂)`.
    pub fn all() -> impl Iterator<Item = Characteristic> {
        (0u8..16).map(|bits| Characteristic::from_bits(bits).expect("bits below 16"))
    }
}

impl fmt::Debug for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Characteristic({})", self)
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = |x: u8| if x == 1 { "½" } else { "0" };
        let [a1, a2, b1, b2] = self.halves;
        write!(f, "(({},{}),({},{}))", h(a1), h(a2), h(b1), h(b2))
    }
}

impl FromStr for Characteristic {
    type Err = Error;

    /// Parses the four-digit bit pattern `a₁a₂b₁b₂`, e.g. `"1010"`.
    fn from_str(s: &str) -> Result<Self> {
        let digits: Vec<u8> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidInput(format!("bad characteristic {s:?}"))),
            })
            .collect::<Result<_>>()?;
        match digits.as_slice() {
            &[a1, a2, b1, b2] => Self::from_halves(a1, a2, b1, b2),
            _ => Err(Error::InvalidInput(format!(
                "characteristic {s:?} must have four binary digits a1a2b1b2"
            ))),
        }
    }
}

pub fn parity(m: &Characteristic) -> Parity {
    m.parity()
}

/// The ten even characteristics in lexicographic order of `(a₁, a₂, b₁, b₂)`.
pub fn even_characteristics() -> [Characteristic; 10] {
    let mut out = [Characteristic { halves: [0; 4] }; 10];
    let evens = Characteristic::all().filter(|m| m.parity() == Parity::Even);
    for (slot, m) in out.iter_mut().zip(evens) {
        *slot = m;
    }
    out
}

/// A computed value with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaValue {
    pub value: Complex64,
    pub error_bound: f64,
}

/// Bound on `Σ_{max(|n₁|,|n₂|) > R} exp(−decay·‖n+a‖²)`, valid for every `a ∈ {0, ½}²`.
///
/// Shell `k` holds `8k` lattice points, each with `‖n+a‖ ≥ k − ½`, so the tail
/// is at most `Σ_{k>R} 8k·e^{−decay(k−½)²}`. The ratio of consecutive terms is
/// `(k+1)/k · e^{−2·decay·k}`, decreasing in `k`; the tail is then bounded by
/// the geometric series started at `k = R + 1`. Returns `None` when that ratio
/// is not below 1.
pub fn tail_bound(decay: f64, radius: usize) -> Option<f64> {
    let k = radius as f64 + 1.0;
    let ratio = (k + 1.0) / k * (-2.0 * decay * k).exp();
    if ratio >= 1.0 {
        return None;
    }
    let first = 8.0 * k * (-decay * (k - 0.5) * (k - 0.5)).exp();
    Some(first / (1.0 - ratio))
}

fn radius_for_decay(decay: f64, tol: f64) -> Result<usize> {
    if !(decay > 0.0) || !decay.is_finite() {
        return Err(Error::InvalidInput(format!("decay rate {decay} must be positive")));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidInput(format!("tolerance {tol} must lie in (0, 1)")));
    }
    (0..=MAX_RADIUS).find(|&r| tail_bound(decay, r).is_some_and(|t| t <= tol)).ok_or_else(|| {
        Error::Resource(format!(
            "tolerance {tol:e} needs a truncation radius above {MAX_RADIUS} (decay {decay:e})"
        ))
    })
}

/// Smallest `R` whose tail bound for `Σ exp(−2π·y_min·‖n+a‖²)` is at most `tol`.
///
/// `y_min` is the smallest eigenvalue of `Im τ`; this is the decay of the
/// [`Normalization::Doubled`] series. The classical series decays like `y_min/2`.
pub fn truncation_radius(y_min: f64, tol: f64) -> Result<usize> {
    if !(y_min > 0.0) {
        return Err(Error::InvalidInput(format!("smallest eigenvalue {y_min} of Im τ must be positive")));
    }
    radius_for_decay(2.0 * PI * y_min, tol)
}

/// Partial sum over the box `B_R = {n : |nᵢ + aᵢ| ≤ R + aᵢ}`, which contains
/// `max(|n₁|, |n₂|) ≤ R` and is stable under `n ↦ −n − 2a`.
///
/// Shells are visited by increasing `R`; inside a shell each term is added
/// together with its partner `−n − 2a`. Returns the sum, the number of terms,
/// the sum of term moduli and the largest `|(n+a)ᵗτ(n+a)|`.
pub fn box_sum(m: &Characteristic, tau: &SiegelPoint, radius: usize, normalization: Normalization) -> BoxSum {
    let scale = PI * normalization.kappa();
    let [t1, t2, t4] = tau.entries();
    let [a1, a2] = m.a();
    let [h1, h2, b1, b2] = m.halves().map(i64::from);
    let r = radius as i64;

    let term = |n1: i64, n2: i64| -> (Complex64, f64, f64) {
        let v1 = n1 as f64 + a1;
        let v2 = n2 as f64 + a2;
        let quad = t1 * (v1 * v1) + t2 * (2.0 * v1 * v2) + t4 * (v2 * v2);
        let modulus = (-scale * quad.im).exp();
        if modulus == 0.0 {
            return (Complex64::new(0.0, 0.0), 0.0, 0.0);
        }
        let (sin, cos) = (scale * quad.re).sin_cos();
        // e^{2iπ n·b} = ±1 since n·b ∈ ½ℤ
        let sign = if (n1 * b1 + n2 * b2).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
        (Complex64::new(sign * modulus * cos, sign * modulus * sin), modulus, quad.norm())
    };

    let mut out = BoxSum { sum: Complex64::new(0.0, 0.0), terms: 0, abs_sum: 0.0, max_quad: 0.0 };
    // coordinate range of shell ≤ s is [−s − hᵢ, s]
    let in_shell = |x: i64, h: i64, s: i64| x >= -s - h && x <= s;
    for s in 0..=r {
        for n1 in (-s - h1)..=s {
            for n2 in (-s - h2)..=s {
                if s > 0 && in_shell(n1, h1, s - 1) && in_shell(n2, h2, s - 1) {
                    continue;
                }
                let (p1, p2) = (-n1 - h1, -n2 - h2);
                if (p1, p2) < (n1, n2) {
                    continue;
                }
                let (t, modulus, quad) = term(n1, n2);
                let mut pair_sum = t;
                out.terms += 1;
                out.abs_sum += modulus;
                out.max_quad = out.max_quad.max(quad);
                if (p1, p2) != (n1, n2) {
                    let (tp, modulus_p, quad_p) = term(p1, p2);
                    pair_sum += tp;
                    out.terms += 1;
                    out.abs_sum += modulus_p;
                    out.max_quad = out.max_quad.max(quad_p);
                }
                out.sum += pair_sum;
            }
        }
    }
    out
}

/// Result of [`box_sum`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxSum {
    pub sum: Complex64,
    pub terms: usize,
    pub abs_sum: f64,
    pub max_quad: f64,
}

/// `Θ_m(τ)` in the classical normalization.
pub fn theta_constant(m: &Characteristic, tau: &SiegelPoint, tol: f64) -> Result<ThetaValue> {
    theta_constant_with(m, tau, tol, Normalization::Classical)
}

pub fn theta_constant_with(
    m: &Characteristic,
    tau: &SiegelPoint,
    tol: f64,
    normalization: Normalization,
) -> Result<ThetaValue> {
    let y_min = tau.min_imag_eigenvalue();
    let decay = PI * normalization.kappa() * y_min;
    let radius = radius_for_decay(decay, 0.5 * tol)?;
    let tail = tail_bound(decay, radius).expect("radius_for_decay checked the ratio");
    let partial = box_sum(m, tau, radius, normalization);
    let value = partial.sum;
    let rounding = (partial.terms as f64 + 8.0 + PI * normalization.kappa() * partial.max_quad)
        * f64::EPSILON
        * partial.abs_sum;
    let error_bound = tail + rounding;
    if error_bound > tol {
        return Err(Error::Resource(format!(
            "tolerance {tol:e} is below the attainable accuracy {error_bound:e} in double precision"
        )));
    }
    Ok(ThetaValue { value, error_bound })
}

/// `(|z| + δ)⁴ − |z|⁴`, the exact worst case of `|(z+e)⁴ − z⁴|` over `|e| ≤ δ`.
pub fn fourth_power_error(modulus: f64, delta: f64) -> f64 {
    let d2 = delta * delta;
    delta * (4.0 * modulus.powi(3) + 6.0 * modulus * modulus * delta + 4.0 * modulus * d2 + d2 * delta)
}

fn fourth_power(
    m: &Characteristic,
    tau: &SiegelPoint,
    tol: f64,
    normalization: Normalization,
) -> Result<ThetaValue> {
    let mut theta_tol = tol;
    for _ in 0..8 {
        let t = theta_constant_with(m, tau, theta_tol, normalization)?;
        let bound = fourth_power_error(t.value.norm(), t.error_bound);
        if bound <= tol {
            return Ok(ThetaValue { value: t.value.powi(4), error_bound: bound });
        }
        theta_tol = (t.error_bound * 0.5 * tol / bound).min(0.5 * theta_tol);
    }
    Err(Error::Resource(format!("could not reach tolerance {tol:e} for Θ_{m}⁴ at {tau}")))
}

/// `(Θ_m(τ)⁴)` for the ten even `m`, ordered as [`even_characteristics`],
/// each with absolute error at most `tol`.
pub fn theta_fourth_vector(tau: &SiegelPoint, tol: f64) -> Result<[ThetaValue; 10]> {
    theta_fourth_vector_with(tau, tol, Normalization::Classical)
}

pub fn theta_fourth_vector_with(
    tau: &SiegelPoint,
    tol: f64,
    normalization: Normalization,
) -> Result<[ThetaValue; 10]> {
    let mut out = [ThetaValue { value: Complex64::new(0.0, 0.0), error_bound: 0.0 }; 10];
    for (slot, m) in out.iter_mut().zip(even_characteristics().iter()) {
        *slot = fourth_power(m, tau, tol, normalization)?;
    }
    Ok(out)
}
