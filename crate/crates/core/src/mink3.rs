//! Vector algebra of ℝ^{2,1} in the null basis (e₁, e₂, e₃).
//!
//! The metric pairs e₁ with e₃: ⟨v, w⟩ = −(v¹w³ + v³w¹) + v²w². The cross
//! product is the metric dual of the determinant, ⟨v × w, u⟩ = det(v, w, u).

use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::{Matrix3, Vector3};

/// Absolute tolerance used by [`causal_class`] when none is supplied.
pub const NULL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MinkVector {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl MinkVector {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);
    pub const E1: Self = Self::new(1.0, 0.0, 0.0);
    pub const E2: Self = Self::new(0.0, 1.0, 0.0);
    pub const E3: Self = Self::new(0.0, 0.0, 1.0);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.x1, self.x2, self.x3)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    /// Largest absolute component.
    pub fn norm_inf(self) -> f64 {
        self.x1.abs().max(self.x2.abs()).max(self.x3.abs())
    }

    /// Lorentzian square ⟨v, v⟩.
    pub fn square(self) -> f64 {
        mink_inner(self, self)
    }
}

impl Add for MinkVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl AddAssign for MinkVector {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for MinkVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl SubAssign for MinkVector {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for MinkVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x1, -self.x2, -self.x3)
    }
}

impl Mul<MinkVector> for f64 {
    type Output = MinkVector;
    fn mul(self, v: MinkVector) -> MinkVector {
        MinkVector::new(self * v.x1, self * v.x2, self * v.x3)
    }
}

impl Mul<f64> for MinkVector {
    type Output = MinkVector;
    fn mul(self, s: f64) -> MinkVector {
        s * self
    }
}

/// The metric matrix g_{ij} in the null basis.
pub fn metric() -> Matrix3<f64> {
    Matrix3::new(0.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0)
}

pub fn mink_inner(v: MinkVector, w: MinkVector) -> f64 {
    -(v.x1 * w.x3 + v.x3 * w.x1) + v.x2 * w.x2
}

/// Determinant of the matrix with rows v, w, u.
pub fn det3(v: MinkVector, w: MinkVector, u: MinkVector) -> f64 {
    v.x1 * (w.x2 * u.x3 - w.x3 * u.x2) - v.x2 * (w.x1 * u.x3 - w.x3 * u.x1)
        + v.x3 * (w.x1 * u.x2 - w.x2 * u.x1)
}

/// The Lorentzian cross product: G applied to the Euclidean cross product.
pub fn mink_cross(v: MinkVector, w: MinkVector) -> MinkVector {
    let c1 = v.x2 * w.x3 - v.x3 * w.x2;
    let c2 = v.x3 * w.x1 - v.x1 * w.x3;
    let c3 = v.x1 * w.x2 - v.x2 * w.x1;
    MinkVector::new(-c3, c2, -c1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalKind {
    Timelike,
    Spacelike,
    Null,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Future,
    Past,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CausalClass {
    pub kind: CausalKind,
    pub orientation: Orientation,
}

/// Time orientation test ⟨v, e₁ + e₃⟩ < 0 for the future cone.
pub fn is_future(v: MinkVector) -> bool {
    mink_inner(v, MinkVector::E1 + MinkVector::E3) < 0.0
}

/// Classify `v` by the sign of ⟨v,v⟩ with |⟨v,v⟩| ≤ tol treated as null.
///
/// A vector whose components are all within `tol` of zero is `Zero`.
pub fn causal_class(v: MinkVector, tol: f64) -> CausalClass {
    if v.norm_inf() <= tol {
        return CausalClass { kind: CausalKind::Zero, orientation: Orientation::None };
    }
    let s = v.square();
    let kind = if s.abs() <= tol {
        CausalKind::Null
    } else if s < 0.0 {
        CausalKind::Timelike
    } else {
        CausalKind::Spacelike
    };
    let orientation = match kind {
        CausalKind::Timelike | CausalKind::Null => {
            if is_future(v) {
                Orientation::Future
            } else {
                Orientation::Past
            }
        }
        _ => Orientation::None,
    };
    CausalClass { kind, orientation }
}

#[cfg(test)]
mod tests {
    use super::*;

    const E1: MinkVector = MinkVector::E1;
    const E2: MinkVector = MinkVector::E2;
    const E3: MinkVector = MinkVector::E3;

    #[test]
    fn inner_examples() {
        assert_eq!(mink_inner(E1, E3), -1.0);
        assert_eq!(mink_inner(E2, E2), 1.0);
        assert_eq!(mink_inner(E1 + E3, E1 + E3), -2.0);
    }

    #[test]
    fn cross_examples() {
        assert_eq!(mink_cross(E1, E2), -E1);
        assert_eq!(mink_cross(E2, E3), -E3);
        assert_eq!(mink_cross(E2, E1), E1);
        assert_eq!(mink_cross(E3, E1), E2);
        let v = MinkVector::new(0.3, -2.0, 5.0);
        assert_eq!(mink_cross(v, v), MinkVector::ZERO);
    }

    #[test]
    fn causal_examples() {
        let c = causal_class(E1 + E3, NULL_TOL);
        assert_eq!((c.kind, c.orientation), (CausalKind::Timelike, Orientation::Future));
        let c = causal_class(E2, NULL_TOL);
        assert_eq!((c.kind, c.orientation), (CausalKind::Spacelike, Orientation::None));
        let c = causal_class(E1, NULL_TOL);
        assert_eq!((c.kind, c.orientation), (CausalKind::Null, Orientation::Future));
        let c = causal_class(-E3, NULL_TOL);
        assert_eq!((c.kind, c.orientation), (CausalKind::Null, Orientation::Past));
        assert_eq!(causal_class(MinkVector::ZERO, NULL_TOL).kind, CausalKind::Zero);
    }
}
