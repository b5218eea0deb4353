use std::fmt;
use std::ops::Mul;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::point::SiegelPoint;
use crate::error::{Error, Result};

/// Below this value of `|det(Cτ + D)|` the action is treated as singular.
pub const DEFAULT_ACT_EPSILON: f64 = 1e-12;

type Block = [[i64; 2]; 2];

const J: [[i64; 4]; 4] = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]];

fn mul4(a: &[[i64; 4]; 4], b: &[[i64; 4]; 4]) -> [[i64; 4]; 4] {
    let mut out = [[0i64; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn transpose4(a: &[[i64; 4]; 4]) -> [[i64; 4]; 4] {
    let mut out = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i];
        }
    }
    out
}

/// Exact check of `Mᵗ J M = J` with `J = [[0, I₂], [−I₂, 0]]`.
pub fn is_symplectic(m: &[[i64; 4]; 4]) -> bool {
    mul4(&mul4(&transpose4(m), &J), m) == J
}

/// An element of `Sp₄(ℤ)` in block form `[[A, B], [C, D]]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[[i64; 4]; 4]", into = "[[i64; 4]; 4]")]
pub struct SymplecticMatrix([[i64; 4]; 4]);

impl TryFrom<[[i64; 4]; 4]> for SymplecticMatrix {
    type Error = Error;

    fn try_from(entries: [[i64; 4]; 4]) -> Result<Self> {
        Self::new(entries)
    }
}

impl From<SymplecticMatrix> for [[i64; 4]; 4] {
    fn from(m: SymplecticMatrix) -> Self {
        m.0
    }
}

impl SymplecticMatrix {
    pub fn new(entries: [[i64; 4]; 4]) -> Result<Self> {
        if is_symplectic(&entries) {
            Ok(Self(entries))
        } else {
            Err(Error::InvalidInput(format!("matrix {entries:?} does not preserve the symplectic form")))
        }
    }

    pub fn from_blocks(a: Block, b: Block, c: Block, d: Block) -> Result<Self> {
        let mut m = [[0i64; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][j];
                m[i][j + 2] = b[i][j];
                m[i + 2][j] = c[i][j];
                m[i + 2][j + 2] = d[i][j];
            }
        }
        Self::new(m)
    }

    pub fn identity() -> Self {
        Self([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    }

    pub fn j() -> Self {
        Self(J)
    }

    /// `[[I, S], [0, I]]`, acting as `τ ↦ τ + S`. `S` must be symmetric.
    pub fn translation(s: Block) -> Result<Self> {
        if s[0][1] != s[1][0] {
            return Err(Error::InvalidInput(format!("translation {s:?} is not symmetric")));
        }
        Self::from_blocks([[1, 0], [0, 1]], s, [[0, 0], [0, 0]], [[1, 0], [0, 1]])
    }

    /// `[[I, 0], [S, I]]`, the conjugate of a translation by `J`.
    pub fn lower_translation(s: Block) -> Result<Self> {
        if s[0][1] != s[1][0] {
            return Err(Error::InvalidInput(format!("translation {s:?} is not symmetric")));
        }
        Self::from_blocks([[1, 0], [0, 1]], [[0, 0], [0, 0]], s, [[1, 0], [0, 1]])
    }

    /// `[[Uᵗ, 0], [0, U⁻¹]]` for `U ∈ GL₂(ℤ)`, acting as `τ ↦ Uᵗ τ U`.
    pub fn change_of_basis(u: Block) -> Result<Self> {
        let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
        if det.abs() != 1 {
            return Err(Error::InvalidInput(format!("{u:?} is not in GL₂(ℤ)")));
        }
        let ut = [[u[0][0], u[1][0]], [u[0][1], u[1][1]]];
        let uinv = [[det * u[1][1], -det * u[0][1]], [-det * u[1][0], det * u[0][0]]];
        Self::from_blocks(ut, [[0, 0], [0, 0]], [[0, 0], [0, 0]], uinv)
    }

    pub fn entries(&self) -> &[[i64; 4]; 4] {
        &self.0
    }

    /// Blocks `(A, B, C, D)`.
    pub fn blocks(&self) -> (Block, Block, Block, Block) {
        let m = &self.0;
        let blk = |r: usize, c: usize| [[m[r][c], m[r][c + 1]], [m[r + 1][c], m[r + 1][c + 1]]];
        (blk(0, 0), blk(0, 2), blk(2, 0), blk(2, 2))
    }

    /// `M⁻¹ = [[Dᵗ, −Bᵗ], [−Cᵗ, Aᵗ]]`.
    pub fn inverse(&self) -> Self {
        let (a, b, c, d) = self.blocks();
        let t = |x: Block| [[x[0][0], x[1][0]], [x[0][1], x[1][1]]];
        let neg = |x: Block| [[-x[0][0], -x[0][1]], [-x[1][0], -x[1][1]]];
        Self::from_blocks(t(d), neg(t(b)), neg(t(c)), t(a)).expect("inverse of a symplectic matrix")
    }

    /// Membership in the principal congruence subgroup `Γ₂(2)`: `M ≡ I₄ (mod 2)`.
    pub fn is_level2(&self) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, &x)| (x - i64::from(i == j)).rem_euclid(2) == 0))
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.0.iter().flatten().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn is_plus_minus_identity(&self) -> bool {
        let id = Self::identity().0;
        let neg = id.map(|r| r.map(|x| -x));
        self.0 == id || self.0 == neg
    }

    fn block_matrix(x: Block) -> Matrix2<Complex64> {
        Matrix2::new(
            Complex64::from(x[0][0] as f64),
            Complex64::from(x[0][1] as f64),
            Complex64::from(x[1][0] as f64),
            Complex64::from(x[1][1] as f64),
        )
    }
}

impl Mul for SymplecticMatrix {
    type Output = SymplecticMatrix;

    fn mul(self, rhs: SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix(mul4(&self.0, &rhs.0))
    }
}

impl fmt::Debug for SymplecticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymplecticMatrix({:?})", self.0)
    }
}

/// `det(Cτ + D)`.
pub fn automorphy_factor(gamma: &SymplecticMatrix, tau: &SiegelPoint) -> Complex64 {
    let (_, _, c, d) = gamma.blocks();
    let m = SymplecticMatrix::block_matrix(c) * tau.matrix() + SymplecticMatrix::block_matrix(d);
    m.determinant()
}

/// `γ·τ = (Aτ + B)(Cτ + D)⁻¹` with the default conditioning threshold.
pub fn act(gamma: &SymplecticMatrix, tau: &SiegelPoint) -> Result<SiegelPoint> {
    act_with_epsilon(gamma, tau, DEFAULT_ACT_EPSILON)
}

pub fn act_with_epsilon(gamma: &SymplecticMatrix, tau: &SiegelPoint, epsilon: f64) -> Result<SiegelPoint> {
    let (a, b, c, d) = gamma.blocks();
    let t = tau.matrix();
    let bm = SymplecticMatrix::block_matrix;
    let denom = bm(c) * t + bm(d);
    let det_abs = denom.determinant().norm();
    if det_abs.is_nan() || det_abs <= epsilon {
        return Err(Error::Conditioning { det_abs, epsilon });
    }
    let inv = denom.try_inverse().ok_or(Error::Conditioning { det_abs, epsilon })?;
    let image = (bm(a) * t + bm(b)) * inv;
    SiegelPoint::from_matrix(&image)
        .map_err(|_| Error::Inconsistency(format!("image of {tau} under {gamma:?} left H₂")))
}
