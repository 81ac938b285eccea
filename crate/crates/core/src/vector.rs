//! Pseudo-Galilean linear algebra on 4-vectors.
//!
//! The scalar product is branchy: whenever either operand has a non-zero
//! first component only the first components interact, otherwise the
//! remaining three coordinates are paired with signature `(-, +, +)`.
//! Branch selection compares the first component against [`ISO_TOL`].

use std::fmt;
use std::ops::{Add, Div, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Isotropy tolerance on the first component.
pub const ISO_TOL: f64 = 1e-12;

/// A vector `(x, y, z, w)` in the affine chart of pseudo-Galilean 4-space.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PgVec4 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

/// Causal character of a vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CausalCharacter {
    NonIsotropic,
    SpacelikeIsotropic,
    TimelikeIsotropic,
    Lightlike,
}

impl PgVec4 {
    pub const ZERO: PgVec4 = PgVec4::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64, w: f64) -> Self {
        Self { x, y, z, w }
    }

    /// Checked constructor; rejects NaN and infinities.
    pub fn try_new(x: f64, y: f64, z: f64, w: f64) -> Result<Self> {
        let v = Self::new(x, y, z, w);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::InvalidInput(format!(
                "non-finite vector component in {v}"
            )))
        }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.z, self.w]
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && self.w.is_finite()
    }

    /// `true` when the first component is zero within [`ISO_TOL`].
    pub fn is_isotropic(&self) -> bool {
        self.x.abs() <= ISO_TOL
    }

    /// The signature `(-, +, +)` quadratic form of the isotropic part.
    pub fn isotropic_square(&self) -> f64 {
        -self.y * self.y + self.z * self.z + self.w * self.w
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.x
            .abs()
            .max(self.y.abs())
            .max(self.z.abs())
            .max(self.w.abs())
    }

    pub fn dot(&self, other: &PgVec4) -> f64 {
        pg_dot(*self, *other)
    }

    pub fn norm(&self) -> f64 {
        pg_norm(*self)
    }
}

impl fmt::Display for PgVec4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.x, self.y, self.z, self.w)
    }
}

impl Index<usize> for PgVec4 {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            3 => &self.w,
            _ => panic!("PgVec4 index {i} out of range"),
        }
    }
}

impl Add for PgVec4 {
    type Output = PgVec4;
    fn add(self, o: PgVec4) -> PgVec4 {
        PgVec4::new(self.x + o.x, self.y + o.y, self.z + o.z, self.w + o.w)
    }
}

impl Sub for PgVec4 {
    type Output = PgVec4;
    fn sub(self, o: PgVec4) -> PgVec4 {
        PgVec4::new(self.x - o.x, self.y - o.y, self.z - o.z, self.w - o.w)
    }
}

impl Neg for PgVec4 {
    type Output = PgVec4;
    fn neg(self) -> PgVec4 {
        PgVec4::new(-self.x, -self.y, -self.z, -self.w)
    }
}

impl Mul<f64> for PgVec4 {
    type Output = PgVec4;
    fn mul(self, k: f64) -> PgVec4 {
        PgVec4::new(self.x * k, self.y * k, self.z * k, self.w * k)
    }
}

impl Mul<PgVec4> for f64 {
    type Output = PgVec4;
    fn mul(self, v: PgVec4) -> PgVec4 {
        v * self
    }
}

impl Div<f64> for PgVec4 {
    type Output = PgVec4;
    fn div(self, k: f64) -> PgVec4 {
        PgVec4::new(self.x / k, self.y / k, self.z / k, self.w / k)
    }
}

/// Pseudo-Galilean scalar product.
///
/// Mixed pairs (one isotropic, one not) evaluate `u₁v₁`, which is zero.
pub fn pg_dot(u: PgVec4, v: PgVec4) -> f64 {
    if u.is_isotropic() && v.is_isotropic() {
        -u.y * v.y + u.z * v.z + u.w * v.w
    } else {
        u.x * v.x
    }
}

/// `sqrt(|<u, u>|)`.
pub fn pg_norm(u: PgVec4) -> f64 {
    pg_dot(u, u).abs().sqrt()
}

pub fn classify(u: PgVec4, tol: f64) -> CausalCharacter {
    if u.x.abs() > tol {
        return CausalCharacter::NonIsotropic;
    }
    let q = u.isotropic_square();
    if q > tol {
        CausalCharacter::SpacelikeIsotropic
    } else if q < -tol {
        CausalCharacter::TimelikeIsotropic
    } else {
        CausalCharacter::Lightlike
    }
}

fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Minor of the 3x4 block `[u; v; w]` with column `skip` removed.
pub(crate) fn minor3(rows: [[f64; 4]; 3], skip: usize) -> f64 {
    let pick = |r: [f64; 4]| {
        let mut out = [0.0; 3];
        let mut k = 0;
        for (j, x) in r.iter().enumerate() {
            if j != skip {
                out[k] = *x;
                k += 1;
            }
        }
        out
    };
    det3(pick(rows[0]), pick(rows[1]), pick(rows[2]))
}

/// Triple cross product `u ∧ v ∧ w`.
///
/// Formal 4x4 determinant expanded along its symbolic first row, which is
/// `(0, -e₂, e₃, e₄)` if any operand is non-isotropic and `(-e₁, e₂, e₃, e₄)`
/// otherwise.
pub fn pg_cross(u: PgVec4, v: PgVec4, w: PgVec4) -> PgVec4 {
    let rows = [u.to_array(), v.to_array(), w.to_array()];
    let cof = |j: usize| {
        let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * minor3(rows, j)
    };
    let head = if u.is_isotropic() && v.is_isotropic() && w.is_isotropic() {
        [-1.0, 1.0, 1.0, 1.0]
    } else {
        [0.0, -1.0, 1.0, 1.0]
    };
    let mut out = [0.0; 4];
    for (j, slot) in out.iter_mut().enumerate() {
        if head[j] != 0.0 {
            *slot = head[j] * cof(j);
        }
    }
    PgVec4::from_array(out)
}

/// Pseudo-Galilean distance between two points.
pub fn pg_distance(p1: PgVec4, p2: PgVec4) -> f64 {
    let dx = p2.x - p1.x;
    if dx.abs() > ISO_TOL {
        dx.abs()
    } else {
        (p2 - p1).isotropic_square().abs().sqrt()
    }
}
