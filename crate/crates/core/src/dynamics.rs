//! Momentum space Y = G × ℝ³ of the functional ∫(1 + mk)ω: phase embedding,
//! Euler–Lagrange flow, Lax pair, canonical 2-form and moment map.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Matrix4, SMatrix};
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::e21::{
    ad_star, ad_star_matrix, casimirs, coadjoint, isotropy_basis, lorentz_orthonormalize,
    AlgebraElement, CoalgebraElement, GroupElement,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::mink3::MinkVector;
use crate::ode::{cf4_step, dopri5_step, step_factor, GAUSS2};

/// Fiber coordinates (k, λ₄, λ₅) together with the coupling constant m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub m: f64,
    pub k: f64,
    pub l4: f64,
    pub l5: f64,
}

impl PhaseState {
    pub fn new(m: f64, k: f64, l4: f64, l5: f64) -> Result<Self> {
        if m == 0.0 || !m.is_finite() {
            return Err(Error::InvalidInput("m must be finite and nonzero"));
        }
        Ok(Self { m, k, l4, l5 })
    }

    /// The eliminated momenta (λ₁, λ₂, λ₃) = (m, 0, ½(1 + mk)).
    pub fn eliminated(&self) -> (f64, f64, f64) {
        (self.m, 0.0, 0.5 * (1.0 + self.m * self.k))
    }

    pub fn fiber(&self) -> [f64; 3] {
        [self.k, self.l4, self.l5]
    }

    pub fn with_fiber(&self, y: &[f64; 3]) -> Self {
        Self { m: self.m, k: y[0], l4: y[1], l5: y[2] }
    }

    /// (C₁, C₂) written in fiber coordinates.
    pub fn casimirs(&self) -> (f64, f64) {
        let (m, k) = (self.m, self.k);
        (self.l4 * self.l4 - self.l5 * (1.0 - m * k), m * self.l5 - 0.25 * (1.0 - m * m * k * k))
    }

    pub fn is_bifurcation(&self, tol: f64) -> bool {
        self.l4.abs() <= tol && (self.l5 + 0.5 * self.k * (1.0 - self.m * self.k)).abs() <= tol
    }

    /// The fixed point of the flow at curvature k.
    pub fn bifurcation(m: f64, k: f64) -> Result<Self> {
        Self::new(m, k, 0.0, -0.5 * k * (1.0 - m * k))
    }
}

pub fn phase_embed(s: &PhaseState) -> CoalgebraElement {
    let mk = s.m * s.k;
    CoalgebraElement::new(
        MinkVector::new(-s.l5, s.l4, -0.5 * (1.0 - mk)),
        MinkVector::new(-0.5 * (1.0 + mk), 0.0, s.m),
    )
}

/// Inverse of [`phase_embed`] on its image, reading k from v¹.
pub fn phase_from_coalgebra(m: f64, eta: &CoalgebraElement) -> PhaseState {
    PhaseState { m, k: (-2.0 * eta.v.x1 - 1.0) / m, l4: eta.p.x2, l5: -eta.p.x1 }
}

/// H(k) = e₀ + k e₁: q̇ = e₁, ω²₁ = 1, ω¹₂ = k.
pub fn hamiltonian_k(k: f64) -> AlgebraElement {
    AlgebraElement::new(MinkVector::E1, 0.0, 1.0, k)
}

pub fn hamiltonian(s: &PhaseState) -> AlgebraElement {
    hamiltonian_k(s.k)
}

pub fn el_field(s: &PhaseState) -> [f64; 3] {
    let (m, k) = (s.m, s.k);
    [-2.0 * s.l4 / m, s.l5 + 0.5 * k * (1.0 - m * k), k * s.l4]
}

/// Right-hand side of (k′)² = k³ − k²/m − (4C₂+1)k/m² + (4mC₁+4C₂+1)/m³.
pub fn first_integral_rhs(m: f64, c1: f64, c2: f64, k: f64) -> f64 {
    k * k * k - k * k / m - (4.0 * c2 + 1.0) * k / (m * m)
        + (4.0 * m * c1 + 4.0 * c2 + 1.0) / (m * m * m)
}

/// (k′)² with k′ = −2λ₄/m, minus the cubic on the right.
pub fn first_integral_residual(s: &PhaseState) -> f64 {
    let (c1, c2) = s.casimirs();
    let kp = -2.0 * s.l4 / s.m;
    kp * kp - first_integral_rhs(s.m, c1, c2, s.k)
}

/// The Lax matrix L(k, λ₄, λ₅), satisfying L′ = [L, H] along the flow.
pub fn lax_matrix(s: &PhaseState) -> Matrix4<f64> {
    let (m, k) = (s.m, s.k);
    Matrix4::new(
        0.0, 0.0, 0.0, 0.0, //
        0.5 * (1.0 + m * k), -s.l4, -s.l5, 0.0, //
        0.0, 0.5 * (1.0 - m * k), 0.0, -s.l5, //
        -m, 0.0, 0.5 * (1.0 - m * k), s.l4,
    )
}

/// Coefficients (c₃, c₂, c₁, c₀) of det(L − zI) = z⁴ + c₃z³ + c₂z² + c₁z + c₀
/// by the Faddeev–LeVerrier recursion.
pub fn charpoly4(l: &Matrix4<f64>) -> [f64; 4] {
    let mut c = [0.0; 4];
    let mut mk = Matrix4::<f64>::zeros();
    let mut ck = 1.0;
    for k in 1..=4 {
        mk = l * mk + Matrix4::identity() * ck;
        ck = -(l * mk).trace() / k as f64;
        c[k - 1] = ck;
    }
    c
}

pub fn lax_data(s: &PhaseState) -> (Matrix4<f64>, [f64; 4]) {
    let l = lax_matrix(s);
    (l, charpoly4(&l))
}

pub fn moment_map(g: &GroupElement, s: &PhaseState) -> CoalgebraElement {
    coadjoint(g, &phase_embed(s))
}

// Coframe order (ω, η¹, …, η⁵, dk, dλ₄, dλ₅).
const OM: usize = 0;
const DK: usize = 6;
const DL4: usize = 7;
const DL5: usize = 8;

/// One term c(k)·θᵃ∧θᵇ of a structure equation, c(k) = c₀ + c₁k + c₂k².
type Term = ([f64; 3], usize, usize);

/// Exterior derivatives of the coframe (ω, η¹, …, η⁵) with π = dk + k²η⁴.
const STRUCTURE: [&[Term]; 6] = [
    // dω = (kη⁴ − η²)∧ω − η¹∧η⁴
    &[([0.0, 1.0, 0.0], 4, OM), ([-1.0, 0.0, 0.0], 2, OM), ([-1.0, 0.0, 0.0], 1, 4)],
    // dη¹ = −π∧ω + η¹∧η² + kη¹∧η⁴
    &[
        ([-1.0, 0.0, 0.0], DK, OM),
        ([0.0, 0.0, -1.0], 4, OM),
        ([1.0, 0.0, 0.0], 1, 2),
        ([0.0, 1.0, 0.0], 1, 4),
    ],
    // dη² = (kη³ − η¹)∧ω − η¹∧η³
    &[([0.0, 1.0, 0.0], 3, OM), ([-1.0, 0.0, 0.0], 1, OM), ([-1.0, 0.0, 0.0], 1, 3)],
    // dη³ = (2η² − kη⁴)∧ω + η¹∧η⁴ + η²∧η³
    &[
        ([2.0, 0.0, 0.0], 2, OM),
        ([0.0, -1.0, 0.0], 4, OM),
        ([1.0, 0.0, 0.0], 1, 4),
        ([1.0, 0.0, 0.0], 2, 3),
    ],
    // dη⁴ = (kη⁵ − η³)∧ω − η¹∧η⁵
    &[([0.0, 1.0, 0.0], 5, OM), ([-1.0, 0.0, 0.0], 3, OM), ([-1.0, 0.0, 0.0], 1, 5)],
    // dη⁵ = η⁴∧ω + η²∧η⁵ − η³∧η⁴
    &[([1.0, 0.0, 0.0], 4, OM), ([1.0, 0.0, 0.0], 2, 5), ([-1.0, 0.0, 0.0], 3, 4)],
];

/// Ψ stored as Σ_{a<b} M_ab θᵃ∧θᵇ with M antisymmetric, so Ψ(X, Y) = XᵀMY.
#[derive(Debug, Clone, PartialEq)]
pub struct CoframeTwoForm {
    pub matrix: SMatrix<f64, 9, 9>,
}

impl CoframeTwoForm {
    fn zero() -> Self {
        Self { matrix: SMatrix::zeros() }
    }

    fn add_wedge(&mut self, c: f64, a: usize, b: usize) {
        self.matrix[(a, b)] += c;
        self.matrix[(b, a)] -= c;
    }

    /// Coefficient matrix of dθ for a coframe index in 0..6.
    pub fn structure(i: usize, k: f64) -> Self {
        let mut f = Self::zero();
        for (c, a, b) in STRUCTURE[i] {
            f.add_wedge(c[0] + c[1] * k + c[2] * k * k, *a, *b);
        }
        f
    }

    pub fn eval(&self, x: &[f64; 9], y: &[f64; 9]) -> f64 {
        let (xv, yv) = (SMatrix::<f64, 9, 1>::from(*x), SMatrix::<f64, 9, 1>::from(*y));
        (xv.transpose() * self.matrix * yv)[0]
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(9, 9, |i, j| self.matrix[(i, j)])
    }

    pub fn rank(&self, tol: f64) -> usize {
        linalg::rank(&self.to_dmatrix(), tol)
    }

    /// Kernel vectors (numeric nullspace).
    pub fn kernel(&self, tol: f64) -> Vec<[f64; 9]> {
        linalg::nullspace(&self.to_dmatrix(), tol)
            .iter()
            .map(|v| core::array::from_fn(|i| v[i]))
            .collect()
    }

    /// Coefficient of ω∧Ψ⁴ against ω∧dk∧dλ₄∧dλ₅∧η¹∧⋯∧η⁵.
    ///
    /// In the coframe order the coefficient is 4!·Pf of the block without ω; moving
    /// the three differentials in front of η¹…η⁵ contributes the sign (−1)^{15}.
    pub fn top_coefficient(&self) -> f64 {
        let sub = DMatrix::from_fn(8, 8, |i, j| self.matrix[(i + 1, j + 1)]);
        -24.0 * linalg::pfaffian(&sub)
    }
}

/// Ψ_Y = dψ_Y with ψ_Y = (1+mk)ω + mη¹ + ½(1+mk)η³ + λ₄η⁴ + λ₅η⁵.
pub fn canonical_two_form(s: &PhaseState) -> CoframeTwoForm {
    let (m, k) = (s.m, s.k);
    let coeffs = [1.0 + m * k, m, 0.0, 0.5 * (1.0 + m * k), s.l4, s.l5];
    let mut psi = CoframeTwoForm::zero();
    for (i, c) in coeffs.iter().enumerate() {
        if *c != 0.0 {
            psi.matrix += CoframeTwoForm::structure(i, k).matrix * *c;
        }
    }
    psi.add_wedge(m, DK, OM);
    psi.add_wedge(0.5 * m, DK, 3);
    psi.add_wedge(1.0, DL4, 4);
    psi.add_wedge(1.0, DL5, 5);
    psi
}

/// Coefficients of ξ = ∂_ω − (2λ₄/m)∂_k + (λ₅ + ½k(1−mk))∂_{λ₄} + kλ₄∂_{λ₅}.
pub fn characteristic_vector(s: &PhaseState) -> [f64; 9] {
    let f = el_field(s);
    [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, f[0], f[1], f[2]]
}

/// Kernel of Ψ_Y normalized to unit ω-component.
pub fn characteristic_from_kernel(s: &PhaseState) -> Option<[f64; 9]> {
    let ker = canonical_two_form(s).kernel(1e-9);
    if ker.len() != 1 || ker[0][0].abs() < 1e-12 {
        return None;
    }
    let w = ker[0][0];
    Some(core::array::from_fn(|i| ker[0][i] / w))
}

/// Converts Maurer–Cartan components (ω¹, ω², ω³, ω¹₁, ω²₁, ω¹₂) of a group
/// direction to coframe components.
pub fn mc_to_coframe(k: f64, x: &[f64; 6]) -> [f64; 9] {
    [x[0], x[5] - k * x[0], x[3], x[4] - x[0], x[1], x[2], 0.0, 0.0, 0.0]
}

/// Isotropy generators of η in Maurer–Cartan components: S₁ (translation part −v)
/// and S₂ (translation part −p).
pub fn isotropy_generators(s: &PhaseState) -> ([f64; 6], [f64; 6]) {
    let (m, k) = (s.m, s.k);
    let s1 = [0.5 * (1.0 + m * k), 0.0, -m, -s.l4, 0.5 * (1.0 - m * k), -s.l5];
    let s2 = [s.l5, -s.l4, 0.5 * (1.0 - m * k), 0.0, 0.0, 0.0];
    (s1, s2)
}

/// The S₁ generator without its ω¹ component, as it is usually displayed.
pub fn displayed_s1(s: &PhaseState) -> [f64; 6] {
    let (mut s1, _) = isotropy_generators(s);
    s1[0] = 0.0;
    s1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoisotropyReport {
    pub polar_dim: usize,
    pub polar_matches_span: bool,
    /// Largest residual Ψ(V, 𝔤) over V ∈ {ξ, S₁, S₂}.
    pub span_residual: f64,
    /// Residual of the displayed S₁ (without the ω¹ term); nonzero away from λ₄(1+mk) = 0.
    pub displayed_s1_residual: f64,
    pub linearized_portrait_dim: usize,
    /// Distance from the normalized ad*(H)η to Π(η).
    pub portrait_direction_residual: f64,
    pub is_bifurcation: bool,
    pub dim_identity: bool,
}

fn polar_rows(psi: &CoframeTwoForm) -> DMatrix<f64> {
    DMatrix::from_fn(6, 9, |i, j| psi.matrix[(i, j)])
}

fn g_residual(rows: &DMatrix<f64>, v: &[f64; 9]) -> f64 {
    let x = DVector::from_column_slice(v);
    (rows * &x).norm() / x.norm().max(1e-300)
}

/// Linearized phase portrait Π(η) = F(η) ∩ O(η) as an orthonormal basis in ℝ⁶.
pub fn linearized_portrait(s: &PhaseState, tol: f64) -> Vec<DVector<f64>> {
    let m = s.m;
    let f = [
        [0.0, 0.0, 0.5 * m, -0.5 * m, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ];
    let ad = ad_star_matrix(&phase_embed(s));
    let o_basis: Vec<DVector<f64>> = {
        let a = DMatrix::from_fn(6, 6, |i, j| ad[(i, j)]);
        let svd = a.svd(true, false);
        let u = svd.u.expect("requested U");
        let cut = tol * svd.singular_values.max().max(1.0);
        (0..6).filter(|&i| svd.singular_values[i] > cut).map(|i| u.column(i).into_owned()).collect()
    };
    // Solve Σ aᵢFᵢ = Σ bⱼOⱼ; each solution gives a vector of the intersection.
    let cols = 3 + o_basis.len();
    let sys = DMatrix::from_fn(6, cols, |i, j| if j < 3 { f[j][i] } else { -o_basis[j - 3][i] });
    let mut out: Vec<DVector<f64>> = Vec::new();
    for sol in linalg::nullspace(&sys, tol) {
        let mut v = DVector::zeros(6);
        for j in 0..3 {
            for i in 0..6 {
                v[i] += sol[j] * f[j][i];
            }
        }
        for b in &out {
            let c = b.dot(&v);
            v -= b * c;
        }
        let n = v.norm();
        if n > tol {
            out.push(v / n);
        }
    }
    out
}

pub fn coisotropy_report(s: &PhaseState) -> CoisotropyReport {
    let psi = canonical_two_form(s);
    let rows = polar_rows(&psi);
    let polar = linalg::nullspace(&rows, 1e-10);
    let (s1, s2) = isotropy_generators(s);
    let cands = [characteristic_vector(s), mc_to_coframe(s.k, &s1), mc_to_coframe(s.k, &s2)];
    let span_residual = cands.iter().map(|c| g_residual(&rows, c)).fold(0.0, f64::max);
    let cmat = DMatrix::from_fn(9, 3, |i, j| cands[j][i]);
    let independent = linalg::rank(&cmat, 1e-8) == 3;
    let polar_matches_span = polar.len() == 3 && independent && span_residual <= 1e-8;
    let displayed_s1_residual = g_residual(&rows, &mc_to_coframe(s.k, &displayed_s1(s)));

    let portrait = linearized_portrait(s, 1e-9);
    let eta = phase_embed(s);
    let flow = ad_star(&hamiltonian(s), &eta).to_array();
    let fv = DVector::from_column_slice(&flow);
    let portrait_direction_residual = if fv.norm() > 0.0 {
        linalg::distance_to_span(&(fv.clone() / fv.norm()), &portrait)
    } else {
        0.0
    };

    let rank_g = isotropy_basis(&eta, 1e-12).map(|b| b.len()).unwrap_or(0);
    CoisotropyReport {
        polar_dim: polar.len(),
        polar_matches_span,
        span_residual,
        displayed_s1_residual,
        linearized_portrait_dim: portrait.len(),
        portrait_direction_residual,
        is_bifurcation: s.is_bifurcation(1e-10),
        dim_identity: 9 == 6 + rank_g + 1,
    }
}

/// One output sample of an extremal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub g: GroupElement,
    pub state: PhaseState,
    pub j: CoalgebraElement,
    pub casimirs: (f64, f64),
    pub charpoly: [f64; 4],
}

impl Sample {
    pub fn new(t: f64, g: GroupElement, state: PhaseState) -> Self {
        let j = moment_map(&g, &state);
        let (_, charpoly) = lax_data(&state);
        Self { t, g, state, j, casimirs: casimirs(&phase_embed(&state)), charpoly }
    }

    /// The base curve point α(t), the translation part of g.
    pub fn alpha(&self) -> MinkVector {
        self.g.q
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

/// Largest drift of the conserved quantities relative to the first sample.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Drift {
    pub c1: f64,
    pub c2: f64,
    pub j: f64,
    pub charpoly: f64,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn drift(&self) -> Drift {
        let mut d = Drift::default();
        let Some(first) = self.samples.first() else { return d };
        for s in &self.samples {
            d.c1 = d.c1.max((s.casimirs.0 - first.casimirs.0).abs());
            d.c2 = d.c2.max((s.casimirs.1 - first.casimirs.1).abs());
            d.j = d.j.max(s.j.sub(&first.j).norm_inf());
            let cp = (0..4).map(|i| (s.charpoly[i] - first.charpoly[i]).abs()).fold(0.0, f64::max);
            d.charpoly = d.charpoly.max(cp);
        }
        d
    }

    /// sup |m k‴ − 3mk k′ + k′| with k′ = −2λ₄/m and k‴ from a five-point
    /// second difference of k′ (uniform grids only; interior nodes).
    pub fn third_order_residual(&self) -> f64 {
        let s = &self.samples;
        if s.len() < 5 {
            return 0.0;
        }
        let h = s[1].t - s[0].t;
        let kp: Vec<f64> = s.iter().map(|x| -2.0 * x.state.l4 / x.state.m).collect();
        let mut worst: f64 = 0.0;
        for i in 2..s.len() - 2 {
            let k3 = (-kp[i - 2] + 16.0 * kp[i - 1] - 30.0 * kp[i] + 16.0 * kp[i + 1] - kp[i + 2])
                / (12.0 * h * h);
            let st = s[i].state;
            worst = worst.max((st.m * k3 - 3.0 * st.m * st.k * kp[i] + kp[i]).abs());
        }
        worst
    }

    pub fn first_integral_residual(&self) -> f64 {
        self.samples.iter().map(|s| first_integral_residual(&s.state).abs()).fold(0.0, f64::max)
    }

    /// sup over interior nodes of ‖g⁻¹g′ − H‖ (five-point g′) and ‖η′ + ad*(H)η‖ (five-point η′).
    pub fn characteristic_residual(&self) -> (f64, f64) {
        let s = &self.samples;
        if s.len() < 5 {
            return (0.0, 0.0);
        }
        let h = s[1].t - s[0].t;
        let d5 = |a: f64, b: f64, c: f64, d: f64| (a - 8.0 * b + 8.0 * c - d) / (12.0 * h);
        let (mut rg, mut rf) = (0.0f64, 0.0f64);
        for i in 2..s.len() - 2 {
            let mats: Vec<Matrix4<f64>> = (i - 2..=i + 2).map(|j| s[j].g.to_matrix4()).collect();
            let dg = (mats[0] - mats[1] * 8.0 + mats[3] * 8.0 - mats[4]) / (12.0 * h);
            let x = s[i].g.inverse().to_matrix4() * dg;
            rg = rg.max((x - hamiltonian(&s[i].state).to_matrix4()).abs().max());
            let e: Vec<[f64; 6]> = (i - 2..=i + 2).map(|j| phase_embed(&s[j].state).to_array()).collect();
            let de: [f64; 6] = core::array::from_fn(|c| d5(e[0][c], e[1][c], e[3][c], e[4][c]));
            let rhs = ad_star(&hamiltonian(&s[i].state), &phase_embed(&s[i].state)).to_array();
            for c in 0..6 {
                rf = rf.max((de[c] + rhs[c]).abs());
            }
        }
        (rg, rf)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    /// Absolute and relative tolerance of the phase-variable step control.
    pub tol: f64,
    /// Output spacing; steps are clipped to land on output nodes.
    pub dt_out: f64,
    pub dt_max: f64,
    /// Abort when |k| + |λ₄| + |λ₅| exceeds this bound.
    pub blowup: f64,
}

impl IntegrateOptions {
    pub fn new(tol: f64) -> Self {
        Self { tol, dt_out: 0.01, dt_max: 0.01, blowup: 1e8 }
    }
}

/// Re-orthonormalizes A when its defect exceeds the roundoff floor of a frame of
/// its size; projecting below that floor only injects error on boosted frames.
pub(crate) fn project_frame(g: &mut GroupElement) {
    let size = g.a.abs().max();
    let floor = 64.0 * f64::EPSILON * (1.0 + size).powi(3);
    if g.invariant_defect() > floor {
        g.a = lorentz_orthonormalize(&g.a);
    }
}

pub fn integrate_extremal(s0: &PhaseState, g0: &GroupElement, t_end: f64, tol: f64) -> Result<Trajectory> {
    integrate_extremal_with(s0, g0, t_end, &IntegrateOptions::new(tol))
}

/// Integrates the Euler–Lagrange field together with g′ = g·H(k).
///
/// Dormand–Prince 5(4) advances (k, λ₄, λ₅); its dense output supplies k at the
/// Gauss nodes for the commutator-free frame step, after which A is
/// re-orthonormalized against the metric when it has drifted.
pub fn integrate_extremal_with(
    s0: &PhaseState,
    g0: &GroupElement,
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    if !(opts.tol > 0.0) || !(t_end > 0.0) || !(opts.dt_out > 0.0) || !(opts.dt_max > 0.0) {
        return Err(Error::InvalidInput("tolerance, horizon and step sizes must be positive"));
    }
    let m = s0.m;
    let f = |_t: f64, y: &[f64; 3]| el_field(&PhaseState { m, k: y[0], l4: y[1], l5: y[2] });
    let n_out = (t_end / opts.dt_out).round().max(1.0) as usize;
    let t_node = |i: usize| if i == n_out { t_end } else { i as f64 * t_end / n_out as f64 };

    let mut y = s0.fiber();
    let mut fy = f(0.0, &y);
    let mut g = *g0;
    let mut t = 0.0;
    let mut h = opts.dt_max.min(t_end / n_out as f64);
    let mut traj = Trajectory { samples: Vec::with_capacity(n_out + 1) };
    traj.samples.push(Sample::new(0.0, g, *s0));
    let h_min = 1e-12 * t_end.max(1.0);

    for i in 1..=n_out {
        let target = t_node(i);
        while t < target {
            let mut last = false;
            let mut step_h = h.min(opts.dt_max);
            if t + step_h >= target - 1e-12 * target.abs().max(1.0) {
                step_h = target - t;
                last = true;
            }
            let st = dopri5_step(&f, t, &y, &fy, step_h);
            let err = st.error_norm(&y, opts.tol, opts.tol);
            if !err.is_finite() || err > 1.0 {
                h = step_h * step_factor(err).min(0.9);
                if !err.is_finite() {
                    h = step_h * 0.2;
                }
                if h < h_min {
                    return Err(Error::IntegrationFailure { t, reason: "step size underflow" });
                }
                continue;
            }
            let k1 = st.interpolate(GAUSS2[0])[0];
            let k2 = st.interpolate(GAUSS2[1])[0];
            g = cf4_step(&g, step_h, &hamiltonian_k(k1), &hamiltonian_k(k2));
            project_frame(&mut g);
            y = st.y_new;
            fy = st.f_new;
            t = if last { target } else { t + step_h };
            if !last || step_h >= h {
                h = step_h * step_factor(err);
            }
            let size = y[0].abs() + y[1].abs() + y[2].abs();
            if !(size <= opts.blowup) || !g.q.is_finite() {
                return Err(Error::NonFiniteState(t));
            }
        }
        traj.samples.push(Sample::new(target, g, s0.with_fiber(&y)));
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::e21::{exp_algebra, pairing};

    fn st(m: f64, k: f64, l4: f64, l5: f64) -> PhaseState {
        PhaseState::new(m, k, l4, l5).unwrap()
    }

    #[test]
    fn embed_examples() {
        let e = phase_embed(&st(1.0, 0.0, 0.0, 0.0));
        assert_eq!(e.p, MinkVector::new(0.0, 0.0, -0.5));
        assert_eq!(e.v, MinkVector::new(-0.5, 0.0, 1.0));
        let e = phase_embed(&st(1.0, 1.0, 0.0, 0.0));
        assert_eq!(e.p, MinkVector::ZERO);
        assert_eq!(e.v, MinkVector::new(-1.0, 0.0, 1.0));
        let e = phase_embed(&st(2.0, 0.0, 1.0, 1.0));
        assert_eq!(e.p, MinkVector::new(-1.0, 1.0, -0.5));
        assert_eq!(e.v, MinkVector::new(-0.5, 0.0, 2.0));
        assert!(PhaseState::new(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn hamiltonian_pairs_to_lagrangian() {
        let s = st(1.3, -0.7, 0.4, 2.0);
        let val = pairing(&phase_embed(&s), &hamiltonian(&s));
        assert!((val - (1.0 + s.m * s.k)).abs() < 1e-14);
        let h2 = hamiltonian_k(2.0);
        assert_eq!((h2.qdot, h2.w11, h2.w21, h2.w12), (MinkVector::E1, 0.0, 1.0, 2.0));
    }

    #[test]
    fn field_examples() {
        assert_eq!(el_field(&st(1.0, 0.0, 0.0, 0.0)), [0.0, 0.0, 0.0]);
        assert_eq!(el_field(&st(1.0, 1.0, 1.0, 1.0)), [-2.0, 1.0, 1.0]);
    }

    #[test]
    fn first_integral_spot_value() {
        let s = st(1.0, 0.0, 1.0, 0.0);
        let (c1, c2) = s.casimirs();
        assert_eq!((c1, c2), (1.0, -0.25));
        assert_eq!(first_integral_rhs(1.0, c1, c2, 0.0), 4.0);
        assert_eq!((2.0 * s.l4 / s.m).powi(2), 4.0);
    }

    #[test]
    fn lax_example() {
        let (l, cp) = lax_data(&st(1.0, 0.0, 0.0, 0.0));
        assert_eq!(l[(1, 0)], 0.5);
        assert_eq!(l[(2, 1)], 0.5);
        assert_eq!(l[(3, 0)], -1.0);
        assert_eq!(l[(3, 2)], 0.5);
        assert_eq!(l.trace(), 0.0);
        assert_eq!(cp[0], 0.0);
    }

    #[test]
    fn bifurcation_orbit_is_one_parameter_subgroup() {
        let s0 = st(1.0, 2.0, 0.0, 1.0);
        assert!(s0.is_bifurcation(0.0));
        let tr = integrate_extremal(&s0, &GroupElement::identity(), 8.0, 1e-10).unwrap();
        for smp in &tr.samples {
            assert!((smp.state.k - 2.0).abs() < 1e-12);
            let exact = exp_algebra(&hamiltonian_k(2.0), smp.t);
            let scale = exact.to_matrix4().abs().max().max(1.0);
            assert!(smp.g.distance(&exact) < 1e-12 * scale, "t={} {:e}", smp.t, smp.g.distance(&exact) / scale);
        }
    }

    #[test]
    fn two_form_kernel_and_top_coefficient() {
        let s = st(2.0, 0.3, -0.8, 0.45);
        let psi = canonical_two_form(&s);
        assert_eq!(psi.rank(1e-9), 8);
        assert!((psi.top_coefficient() + 48.0).abs() < 1e-10);
        let xi = characteristic_from_kernel(&s).unwrap();
        let want = characteristic_vector(&s);
        for i in 0..9 {
            assert!((xi[i] - want[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn coisotropy_at_regular_and_singular_states() {
        let r = coisotropy_report(&st(1.3, 0.4, 0.7, -0.2));
        assert_eq!(r.polar_dim, 3);
        assert!(r.polar_matches_span, "{r:?}");
        assert_eq!(r.linearized_portrait_dim, 1);
        assert!(r.portrait_direction_residual < 1e-8);
        assert!(r.displayed_s1_residual > 1e-3);
        assert!(r.dim_identity);
        assert!(!r.is_bifurcation);
        let b = PhaseState::bifurcation(1.0, 0.6).unwrap();
        assert!(coisotropy_report(&b).is_bifurcation);
    }
}
