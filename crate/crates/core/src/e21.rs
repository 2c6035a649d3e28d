//! The restricted Poincaré group E(2,1) in its 4×4 homogeneous representation
//! [[1, 0], [q, A]], its Lie algebra, and the (co)adjoint actions.

use nalgebra::{Matrix3, Matrix4, SMatrix};
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mink3::{det3, is_future, metric, mink_cross, mink_inner, MinkVector};

/// Group element (q, A); the columns of `a` are the frame vectors A₁, A₂, A₃.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub q: MinkVector,
    pub a: Matrix3<f64>,
}

/// Lie algebra element: translation velocity and the three rotation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AlgebraElement {
    pub qdot: MinkVector,
    pub w11: f64,
    pub w21: f64,
    pub w12: f64,
}

/// Dual element (p, v).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoalgebraElement {
    pub p: MinkVector,
    pub v: MinkVector,
}

impl GroupElement {
    pub fn identity() -> Self {
        Self { q: MinkVector::ZERO, a: Matrix3::identity() }
    }

    pub fn translation(q: MinkVector) -> Self {
        Self { q, a: Matrix3::identity() }
    }

    pub fn from_frame(q: MinkVector, a1: MinkVector, a2: MinkVector, a3: MinkVector) -> Self {
        let a = Matrix3::from_columns(&[a1.to_vector(), a2.to_vector(), a3.to_vector()]);
        Self { q, a }
    }

    pub fn column(&self, j: usize) -> MinkVector {
        MinkVector::from_vector(&self.a.column(j).into_owned())
    }

    pub fn to_matrix4(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m[(1, 0)] = self.q.x1;
        m[(2, 0)] = self.q.x2;
        m[(3, 0)] = self.q.x3;
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(&self.a);
        m
    }

    /// Reads the q column and A block; the first row is assumed to be (1, 0, 0, 0).
    pub fn from_matrix4(m: &Matrix4<f64>) -> Self {
        Self {
            q: MinkVector::new(m[(1, 0)], m[(2, 0)], m[(3, 0)]),
            a: m.fixed_view::<3, 3>(1, 1).into_owned(),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        group_compose(self, other)
    }

    pub fn inverse(&self) -> Self {
        group_inverse(self)
    }

    /// Image of a vector under the linear part.
    pub fn rotate(&self, v: MinkVector) -> MinkVector {
        MinkVector::from_vector(&(self.a * v.to_vector()))
    }

    /// Largest violation of det A = 1 and AᵀGA = G.
    pub fn invariant_defect(&self) -> f64 {
        let g = metric();
        let gram = (self.a.transpose() * g * self.a - g).abs().max();
        let det = (det3(self.column(0), self.column(1), self.column(2)) - 1.0).abs();
        gram.max(det)
    }

    /// True when the group invariants hold to `tol` and A₁, A₃ are future-directed.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.q.is_finite()
            && self.invariant_defect() <= tol
            && is_future(self.column(0))
            && is_future(self.column(2))
    }

    /// Largest entrywise difference of the 4×4 embeddings.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.to_matrix4() - other.to_matrix4()).abs().max()
    }
}

pub fn group_compose(a: &GroupElement, b: &GroupElement) -> GroupElement {
    GroupElement::from_matrix4(&(a.to_matrix4() * b.to_matrix4()))
}

/// Inverse using A⁻¹ = G Aᵀ G, exact on the group.
pub fn group_inverse(a: &GroupElement) -> GroupElement {
    let g = metric();
    let ai = g * a.a.transpose() * g;
    let q = -(ai * a.q.to_vector());
    GroupElement { q: MinkVector::from_vector(&q), a: ai }
}

impl AlgebraElement {
    pub const ZERO: Self =
        Self { qdot: MinkVector::ZERO, w11: 0.0, w21: 0.0, w12: 0.0 };

    pub fn new(qdot: MinkVector, w11: f64, w21: f64, w12: f64) -> Self {
        Self { qdot, w11, w21, w12 }
    }

    /// Coefficients in the order (q̇¹, q̇², q̇³, ω¹₁, ω²₁, ω¹₂).
    pub fn coeffs(&self) -> [f64; 6] {
        [self.qdot.x1, self.qdot.x2, self.qdot.x3, self.w11, self.w21, self.w12]
    }

    pub fn from_coeffs(c: &[f64]) -> Self {
        Self::new(MinkVector::new(c[0], c[1], c[2]), c[3], c[4], c[5])
    }

    pub fn rotation_block(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.w11, self.w12, 0.0, //
            self.w21, 0.0, self.w12, //
            0.0, self.w21, -self.w11,
        )
    }

    pub fn to_matrix4(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m[(1, 0)] = self.qdot.x1;
        m[(2, 0)] = self.qdot.x2;
        m[(3, 0)] = self.qdot.x3;
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(&self.rotation_block());
        m
    }

    /// Projects a 4×4 matrix onto the algebra by reading the defining entries.
    pub fn from_matrix4(m: &Matrix4<f64>) -> Self {
        Self::new(
            MinkVector::new(m[(1, 0)], m[(2, 0)], m[(3, 0)]),
            m[(1, 1)],
            m[(2, 1)],
            m[(1, 2)],
        )
    }

    /// Distance of a 4×4 matrix from the algebra (entries not captured by the parameters).
    pub fn embedding_defect(m: &Matrix4<f64>) -> f64 {
        (m - Self::from_matrix4(m).to_matrix4()).abs().max()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.qdot, s * self.w11, s * self.w21, s * self.w12)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.qdot + o.qdot, self.w11 + o.w11, self.w21 + o.w21, self.w12 + o.w12)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs().iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// Matrix commutator [X, Y] = XY − YX.
pub fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
    let (a, b) = (x.to_matrix4(), y.to_matrix4());
    AlgebraElement::from_matrix4(&(a * b - b * a))
}

/// Ad(g)X = g X g⁻¹.
pub fn adjoint(g: &GroupElement, x: &AlgebraElement) -> AlgebraElement {
    let m = g.to_matrix4() * x.to_matrix4() * g.inverse().to_matrix4();
    AlgebraElement::from_matrix4(&m)
}

const PADE6: [f64; 7] = [
    1.0,
    1.0 / 2.0,
    5.0 / 44.0,
    1.0 / 66.0,
    1.0 / 792.0,
    1.0 / 15840.0,
    1.0 / 665280.0,
];

/// Matrix exponential by diagonal Padé [6/6] with scaling and squaring.
pub fn expm4(a: &Matrix4<f64>) -> Matrix4<f64> {
    let norm = (0..4)
        .map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut s = 0i32;
    if norm > 0.5 {
        s = (norm / 0.5).log2().ceil() as i32;
    }
    let x = a * 0.5.powi(s);
    let mut num = Matrix4::identity() * PADE6[0];
    let mut den = Matrix4::identity() * PADE6[0];
    let mut pow = Matrix4::identity();
    for (j, c) in PADE6.iter().enumerate().skip(1) {
        pow *= x;
        num += pow * *c;
        den += pow * (if j % 2 == 0 { *c } else { -*c });
    }
    let mut r = den.lu().solve(&num).unwrap_or_else(Matrix4::identity);
    for _ in 0..s {
        r = r * r;
    }
    r
}

pub fn exp_algebra(x: &AlgebraElement, t: f64) -> GroupElement {
    GroupElement::from_matrix4(&expm4(&(x.to_matrix4() * t)))
}

/// ⟨(p, v); X⟩ = ⟨p, q̇⟩ − v¹ω²₁ + v²ω¹₁ + v³ω¹₂.
pub fn pairing(eta: &CoalgebraElement, x: &AlgebraElement) -> f64 {
    mink_inner(eta.p, x.qdot) - eta.v.x1 * x.w21 + eta.v.x2 * x.w11 + eta.v.x3 * x.w12
}

/// Ad*(g)(p, v) = (Ap, Av − (Ap) × q).
pub fn coadjoint(g: &GroupElement, eta: &CoalgebraElement) -> CoalgebraElement {
    let ap = g.rotate(eta.p);
    CoalgebraElement { p: ap, v: g.rotate(eta.v) - mink_cross(ap, g.q) }
}

/// Derivative of `coadjoint(exp(tX), η)` at t = 0.
pub fn ad_star(x: &AlgebraElement, eta: &CoalgebraElement) -> CoalgebraElement {
    let w = x.rotation_block();
    let rot = |u: MinkVector| MinkVector::from_vector(&(w * u.to_vector()));
    CoalgebraElement { p: rot(eta.p), v: rot(eta.v) - mink_cross(eta.p, x.qdot) }
}

/// (C₁, C₂) = (⟨p,p⟩, ⟨p,v⟩).
pub fn casimirs(eta: &CoalgebraElement) -> (f64, f64) {
    (mink_inner(eta.p, eta.p), mink_inner(eta.p, eta.v))
}

impl CoalgebraElement {
    pub fn new(p: MinkVector, v: MinkVector) -> Self {
        Self { p, v }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.p.x1, self.p.x2, self.p.x3, self.v.x1, self.v.x2, self.v.x3]
    }

    pub fn from_array(a: &[f64]) -> Self {
        Self::new(MinkVector::new(a[0], a[1], a[2]), MinkVector::new(a[3], a[4], a[5]))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.p - o.p, self.v - o.v)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.p, s * self.v)
    }

    pub fn norm_inf(&self) -> f64 {
        self.p.norm_inf().max(self.v.norm_inf())
    }
}

/// Matrix of X ↦ ad*(X)μ in coefficient coordinates (columns indexed by X).
pub fn ad_star_matrix(mu: &CoalgebraElement) -> SMatrix<f64, 6, 6> {
    let mut m = SMatrix::<f64, 6, 6>::zeros();
    for j in 0..6 {
        let mut c = [0.0; 6];
        c[j] = 1.0;
        let col = ad_star(&AlgebraElement::from_coeffs(&c), mu).to_array();
        for i in 0..6 {
            m[(i, j)] = col[i];
        }
    }
    m
}

/// Orthonormal basis of the numeric nullspace of `mat` (singular values ≤ rel_tol·σ_max).
pub(crate) fn nullspace6(mat: &SMatrix<f64, 6, 6>, rel_tol: f64) -> Vec<[f64; 6]> {
    let svd = mat.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.max();
    let cut = rel_tol * smax.max(1.0);
    let mut out = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= cut {
            let row = vt.row(i);
            out.push([row[0], row[1], row[2], row[3], row[4], row[5]]);
        }
    }
    out
}

/// Basis of the isotropy algebra 𝔤_μ = {X : ad*(X)μ = 0}.
pub fn isotropy_basis(mu: &CoalgebraElement, tol: f64) -> Result<Vec<AlgebraElement>> {
    if mu.p.norm_inf() <= tol {
        return Err(Error::SingularElement);
    }
    let basis = nullspace6(&ad_star_matrix(mu), 1e-10);
    Ok(basis.iter().map(|c| AlgebraElement::from_coeffs(c)).collect())
}

/// Restore AᵀGA = G by Gram–Schmidt in the orthonormal frame
/// T = (A₁+A₃)/√2, A₂, X = (A₁−A₃)/√2 of signature (−, +, +).
pub fn lorentz_orthonormalize(a: &Matrix3<f64>) -> Matrix3<f64> {
    let col = |j: usize| MinkVector::from_vector(&a.column(j).into_owned());
    let r2 = core::f64::consts::SQRT_2;
    let (a1, a2, a3) = (col(0), col(1), col(2));
    let mut t = (1.0 / r2) * (a1 + a3);
    t = (1.0 / (-t.square()).sqrt()) * t;
    let mut y = a2 + mink_inner(a2, t) * t;
    y = (1.0 / y.square().sqrt()) * y;
    let mut x = (1.0 / r2) * (a1 - a3);
    x = x + mink_inner(x, t) * t - mink_inner(x, y) * y;
    x = (1.0 / x.square().sqrt()) * x;
    let b1 = (1.0 / r2) * (t + x);
    let b3 = (1.0 / r2) * (t - x);
    Matrix3::from_columns(&[b1.to_vector(), y.to_vector(), b3.to_vector()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nilpotent_exponential() {
        let h = AlgebraElement::new(MinkVector::E1, 0.0, 1.0, 0.0);
        let t = 1.7;
        let g = exp_algebra(&h, t);
        let want = MinkVector::new(t, t * t / 2.0, t * t * t / 6.0);
        assert!((g.q - want).norm_inf() < 1e-14);
        assert!(g.invariant_defect() < 1e-13);
        let tr = exp_algebra(&AlgebraElement::new(MinkVector::E1, 0.0, 0.0, 0.0), t);
        assert!((tr.q - t * MinkVector::E1).norm_inf() < 1e-15);
        assert!((tr.a - Matrix3::identity()).abs().max() < 1e-15);
        assert_eq!(exp_algebra(&h, 0.0), GroupElement::identity());
    }

    #[test]
    fn pairing_example() {
        let eta = CoalgebraElement::new(MinkVector::E2, MinkVector::ZERO);
        let x = AlgebraElement::new(MinkVector::E2, 0.0, 0.0, 0.0);
        assert_eq!(pairing(&eta, &x), 1.0);
        assert_eq!(pairing(&eta, &AlgebraElement::ZERO), 0.0);
    }

    #[test]
    fn translation_coadjoint() {
        let q = MinkVector::new(0.5, -1.0, 2.0);
        let eta = CoalgebraElement::new(MinkVector::new(1.0, 2.0, 3.0), MinkVector::new(-1.0, 0.0, 4.0));
        let out = coadjoint(&GroupElement::translation(q), &eta);
        assert_eq!(out.p, eta.p);
        assert!((out.v - (eta.v - mink_cross(eta.p, q))).norm_inf() < 1e-15);
    }

    #[test]
    fn casimir_examples() {
        let eta = CoalgebraElement::new(MinkVector::E2, MinkVector::ZERO);
        assert_eq!(casimirs(&eta), (1.0, 0.0));
        let eta = CoalgebraElement::new(MinkVector::new(0.0, 1.0, -0.5), MinkVector::new(-0.5, 0.0, 1.0));
        assert_eq!(casimirs(&eta), (1.0, -0.25));
    }

    #[test]
    fn isotropy_examples() {
        let mu = CoalgebraElement::new(MinkVector::E2, MinkVector::ZERO);
        let b = isotropy_basis(&mu, 1e-12).unwrap();
        assert_eq!(b.len(), 2);
        for x in &b {
            assert!(ad_star(x, &mu).norm_inf() < 1e-10);
        }
        assert!(bracket(&b[0], &b[1]).norm() < 1e-10);
        let sing = CoalgebraElement::new(MinkVector::ZERO, MinkVector::E1);
        assert_eq!(isotropy_basis(&sing, 1e-12), Err(Error::SingularElement));
    }
}
