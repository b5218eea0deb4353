use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `τ = [[τ₁, τ₂], [τ₂, τ₄]]` of the Siegel upper half-space `H₂`.
///
/// Only the three independent entries are stored, so `τ` is symmetric by
/// construction. Every constructor checks that `Im τ` is positive definite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub struct SiegelPoint {
    tau1: Complex64,
    tau2: Complex64,
    tau4: Complex64,
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    tau1: [f64; 2],
    tau2: [f64; 2],
    tau4: [f64; 2],
}

impl TryFrom<PointRepr> for SiegelPoint {
    type Error = Error;

    fn try_from(r: PointRepr) -> Result<Self> {
        let c = |p: [f64; 2]| Complex64::new(p[0], p[1]);
        SiegelPoint::new(c(r.tau1), c(r.tau2), c(r.tau4))
    }
}

impl From<SiegelPoint> for PointRepr {
    fn from(p: SiegelPoint) -> Self {
        let c = |z: Complex64| [z.re, z.im];
        PointRepr { tau1: c(p.tau1), tau2: c(p.tau2), tau4: c(p.tau4) }
    }
}

fn im_positive_definite(y1: f64, y2: f64, y4: f64) -> bool {
    y1 > 0.0 && y1 * y4 - y2 * y2 > 0.0
}

/// Whether `tau` lies in `H₂`: `Im τ` symmetric with positive leading minors.
pub fn is_in_h2(tau: &Matrix2<Complex64>) -> Result<bool> {
    if tau.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    if tau[(0, 1)].im != tau[(1, 0)].im {
        return Ok(false);
    }
    Ok(im_positive_definite(tau[(0, 0)].im, tau[(0, 1)].im, tau[(1, 1)].im))
}

impl SiegelPoint {
    pub fn new(tau1: Complex64, tau2: Complex64, tau4: Complex64) -> Result<Self> {
        let finite = [tau1, tau2, tau4].iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(Error::InvalidInput("entries of τ must be finite".into()));
        }
        if !im_positive_definite(tau1.im, tau2.im, tau4.im) {
            return Err(Error::InvalidInput(format!(
                "Im τ = [[{}, {}], [{}, {}]] is not positive definite",
                tau1.im, tau2.im, tau2.im, tau4.im
            )));
        }
        Ok(Self { tau1, tau2, tau4 })
    }

    /// Builds a point from a full matrix after replacing it by `(X + Xᵗ)/2`.
    pub fn from_matrix(m: &Matrix2<Complex64>) -> Result<Self> {
        let off = (m[(0, 1)] + m[(1, 0)]) * 0.5;
        Self::new(m[(0, 0)], off, m[(1, 1)])
    }

    /// `i·I₂`.
    pub fn i_identity() -> Self {
        Self::diagonal(Complex64::i(), Complex64::i()).expect("i·I₂ lies in H₂")
    }

    pub fn diagonal(tau1: Complex64, tau4: Complex64) -> Result<Self> {
        Self::new(tau1, Complex64::new(0.0, 0.0), tau4)
    }

    /// The point `X + iY` from real and imaginary parts given as `(x₁, x₂, x₄)`.
    pub fn from_parts(re: [f64; 3], im: [f64; 3]) -> Result<Self> {
        Self::new(Complex64::new(re[0], im[0]), Complex64::new(re[1], im[1]), Complex64::new(re[2], im[2]))
    }

    pub fn tau1(&self) -> Complex64 {
        self.tau1
    }

    pub fn tau2(&self) -> Complex64 {
        self.tau2
    }

    pub fn tau4(&self) -> Complex64 {
        self.tau4
    }

    pub fn entries(&self) -> [Complex64; 3] {
        [self.tau1, self.tau2, self.tau4]
    }

    pub fn matrix(&self) -> Matrix2<Complex64> {
        Matrix2::new(self.tau1, self.tau2, self.tau2, self.tau4)
    }

    /// `(Re τ₁, Re τ₂, Re τ₄)`.
    pub fn real_parts(&self) -> [f64; 3] {
        [self.tau1.re, self.tau2.re, self.tau4.re]
    }

    /// `(Im τ₁, Im τ₂, Im τ₄)`.
    pub fn imag_parts(&self) -> [f64; 3] {
        [self.tau1.im, self.tau2.im, self.tau4.im]
    }

    pub fn det_imag(&self) -> f64 {
        self.tau1.im * self.tau4.im - self.tau2.im * self.tau2.im
    }

    /// Smallest eigenvalue of `Im τ`.
    pub fn min_imag_eigenvalue(&self) -> f64 {
        let [a, b, c] = self.imag_parts();
        let half_trace = 0.5 * (a + c);
        let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        // det / λ_max avoids the cancellation in half_trace - disc.
        self.det_imag() / (half_trace + disc)
    }

    /// Largest entrywise distance to `other`.
    pub fn max_entry_distance(&self, other: &SiegelPoint) -> f64 {
        self.entries().iter().zip(other.entries().iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl fmt::Display for SiegelPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.tau1, self.tau2, self.tau2, self.tau4)
    }
}
