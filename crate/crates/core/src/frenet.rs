//! Frenet frames of normalized null curves, curvature extraction, and
//! reconstruction of a curve from its curvature.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::Matrix4;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::dynamics::{hamiltonian_k, project_frame};
use crate::e21::{AlgebraElement, GroupElement};
use crate::error::{Error, Result};
use crate::mink3::{causal_class, mink_inner, CausalKind, MinkVector, Orientation};
use crate::ode::{cf4_step, GAUSS2};

/// A sampled curve α on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NullCurveSamples {
    pub t: Vec<f64>,
    pub alpha: Vec<MinkVector>,
}

/// Frenet lift (α; A₁, A₂, A₃) and curvature at each grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameField {
    pub t: Vec<f64>,
    pub frames: Vec<GroupElement>,
    pub k: Vec<f64>,
}

/// A curve given with its first three derivatives.
pub trait CurveJets {
    /// (α, α′, α″, α‴) at t.
    fn jets(&self, t: f64) -> [MinkVector; 4];
}

impl<F: Fn(f64) -> [MinkVector; 4]> CurveJets for F {
    fn jets(&self, t: f64) -> [MinkVector; 4] {
        self(t)
    }
}

/// Frame and curvature from the jets at one point.
pub fn frame_from_jets(j: &[MinkVector; 4], tol: f64) -> Result<(GroupElement, f64)> {
    let [alpha, d1, d2, d3] = *j;
    let c = causal_class(d1, tol);
    if c.kind != CausalKind::Null || c.orientation != Orientation::Future {
        return Err(Error::NotNull);
    }
    let cross = d1.to_vector().cross(&d2.to_vector()).norm();
    if cross <= tol {
        return Err(Error::FlexPoint);
    }
    let n2 = mink_inner(d2, d2);
    let dev = (n2.max(0.0).sqrt() - 1.0).abs();
    if dev > tol {
        return Err(Error::NotNormalized(dev));
    }
    let s3 = mink_inner(d3, d3);
    let k = -0.5 * s3;
    let a3 = d3 + (0.5 * s3) * d1;
    Ok((GroupElement::from_frame(alpha, d1, d2, a3), k))
}

/// Analyzes an analytic curve on a grid.
pub fn analyze_curve<C: CurveJets + ?Sized>(curve: &C, grid: &[f64], tol: f64) -> Result<FrameField> {
    let mut out = FrameField { t: grid.to_vec(), frames: Vec::with_capacity(grid.len()), k: Vec::with_capacity(grid.len()) };
    for &t in grid {
        let (g, k) = frame_from_jets(&curve.jets(t), tol)?;
        out.frames.push(g);
        out.k.push(k);
    }
    Ok(out)
}

/// Finite-difference weights (Fornberg) for derivatives 0..=order at z on nodes x.
pub fn fd_weights(z: f64, x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Stencil width: eleven nodes give eighth-order α‴ (central or one-sided).
const STENCIL: usize = 11;

/// Jets of a sampled curve at node i from the nearest eleven nodes.
pub fn sampled_jets(curve: &NullCurveSamples, i: usize) -> [MinkVector; 4] {
    let n = curve.t.len();
    let start = i.saturating_sub(STENCIL / 2).min(n - STENCIL);
    let nodes = &curve.t[start..start + STENCIL];
    let w = fd_weights(curve.t[i], nodes, 3);
    let mut out = [MinkVector::ZERO; 4];
    out[0] = curve.alpha[i];
    for (d, o) in out.iter_mut().enumerate().skip(1) {
        for (j, wj) in w[d].iter().enumerate() {
            *o += *wj * (curve.alpha[start + j] - curve.alpha[i]);
        }
    }
    out
}

/// Analyzes a sampled curve using eighth-order finite differences.
pub fn analyze_samples(curve: &NullCurveSamples, tol: f64) -> Result<FrameField> {
    let n = curve.t.len();
    if n < STENCIL || curve.alpha.len() != n {
        return Err(Error::InvalidInput("need at least eleven samples"));
    }
    if curve.t.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("grid must be strictly increasing"));
    }
    let mut out = FrameField { t: curve.t.clone(), frames: Vec::with_capacity(n), k: Vec::with_capacity(n) };
    for i in 0..n {
        let (g, k) = frame_from_jets(&sampled_jets(curve, i), tol)?;
        out.frames.push(g);
        out.k.push(k);
    }
    Ok(out)
}

impl FrameField {
    pub fn curve(&self) -> NullCurveSamples {
        NullCurveSamples { t: self.t.clone(), alpha: self.frames.iter().map(|g| g.q).collect() }
    }

    /// sup over nodes of ‖g⁻¹g′ − H(k)‖, with g′ from the eleven-node stencil.
    pub fn frenet_residual(&self) -> f64 {
        let n = self.t.len();
        if n < STENCIL {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let start = i.saturating_sub(STENCIL / 2).min(n - STENCIL);
            let w = fd_weights(self.t[i], &self.t[start..start + STENCIL], 1);
            let mut dg = Matrix4::zeros();
            for (j, wj) in w[1].iter().enumerate() {
                dg += self.frames[start + j].to_matrix4() * *wj;
            }
            let x = self.frames[i].inverse().to_matrix4() * dg;
            worst = worst.max((x - hamiltonian_k(self.k[i]).to_matrix4()).abs().max());
        }
        worst
    }

    /// sup |⟨α′, α′⟩| and sup |‖α″‖ − 1| read from the frame (A₁ = α′, A₂ = α″).
    pub fn normalization_defect(&self) -> (f64, f64) {
        let mut null: f64 = 0.0;
        let mut norm: f64 = 0.0;
        for g in &self.frames {
            let (a1, a2) = (g.column(0), g.column(1));
            null = null.max(mink_inner(a1, a1).abs());
            norm = norm.max((mink_inner(a2, a2).sqrt() - 1.0).abs());
        }
        (null, norm)
    }

    /// Left translate every frame by g.
    pub fn translate(&self, g: &GroupElement) -> Self {
        Self { t: self.t.clone(), frames: self.frames.iter().map(|f| g.compose(f)).collect(), k: self.k.clone() }
    }
}

/// Integrates g′ = g·H(k(t)) from g(grid₀) = g0, sampling on `grid`.
///
/// Each grid interval is covered by commutator-free steps whose size is
/// controlled by step doubling against `tol`.
pub fn synthesize_curve<K: Fn(f64) -> f64 + ?Sized>(
    k: &K,
    g0: &GroupElement,
    grid: &[f64],
    tol: f64,
) -> Result<FrameField> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("grid must be nonempty and strictly increasing"));
    }
    let step = |g: &GroupElement, t: f64, h: f64| -> GroupElement {
        let x = |c: f64| -> AlgebraElement { hamiltonian_k(k(t + c * h)) };
        cf4_step(g, h, &x(GAUSS2[0]), &x(GAUSS2[1]))
    };
    let mut g = *g0;
    let mut out = FrameField { t: grid.to_vec(), frames: vec![g], k: vec![k(grid[0])] };
    let mut h = (grid.get(1).copied().unwrap_or(grid[0]) - grid[0]).max(1e-3);
    for w in grid.windows(2) {
        let (mut t, end) = (w[0], w[1]);
        while t < end {
            let hh = h.min(end - t);
            let full = step(&g, t, hh);
            let half = step(&step(&g, t, 0.5 * hh), t + 0.5 * hh, 0.5 * hh);
            let scale = 1.0 + half.to_matrix4().abs().max();
            let err = full.distance(&half) / (15.0 * scale);
            if !err.is_finite() {
                return Err(Error::IntegrationFailure { t, reason: "non-finite frame" });
            }
            if err > tol {
                h = 0.5 * hh;
                if h < 1e-12 {
                    return Err(Error::IntegrationFailure { t, reason: "step size underflow" });
                }
                continue;
            }
            g = half;
            project_frame(&mut g);
            t = if hh == end - t { end } else { t + hh };
            if err < tol / 64.0 && hh == h {
                h *= 2.0;
            }
        }
        out.frames.push(g);
        out.k.push(k(end));
    }
    Ok(out)
}

/// Cumulative arc element ∫‖α″‖^{1/2} dt (trapezoid rule) from sampled α.
pub fn arc_parameter(curve: &NullCurveSamples) -> Vec<f64> {
    let n = curve.t.len();
    let mut out = vec![0.0; n];
    if n < STENCIL {
        return out;
    }
    let rate: Vec<f64> = (0..n)
        .map(|i| {
            let d2 = sampled_jets(curve, i)[2];
            mink_inner(d2, d2).max(0.0).powf(0.25)
        })
        .collect();
    for i in 1..n {
        out[i] = out[i - 1] + 0.5 * (rate[i] + rate[i - 1]) * (curve.t[i] - curve.t[i - 1]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::e21::exp_algebra;

    fn cubic(t: f64) -> [MinkVector; 4] {
        [
            MinkVector::new(t, t * t / 2.0, t * t * t / 6.0),
            MinkVector::new(1.0, t, t * t / 2.0),
            MinkVector::new(0.0, 1.0, t),
            MinkVector::new(0.0, 0.0, 1.0),
        ]
    }

    #[test]
    fn twisted_cubic_has_zero_curvature() {
        let grid: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
        let ff = analyze_curve(&cubic, &grid, 1e-10).unwrap();
        for (g, k) in ff.frames.iter().zip(&ff.k) {
            assert_eq!(*k, 0.0);
            assert_eq!(g.column(2), MinkVector::E3);
        }
        assert!(ff.frenet_residual() < 1e-9);
    }

    #[test]
    fn unnormalized_curve_rejected() {
        let bad = |t: f64| {
            [
                MinkVector::new(t, t * t, t * t * t),
                MinkVector::new(1.0, 2.0 * t, 3.0 * t * t),
                MinkVector::new(0.0, 2.0, 6.0 * t),
                MinkVector::new(0.0, 0.0, 6.0),
            ]
        };
        assert!(matches!(analyze_curve(&bad, &[0.0], 1e-8), Err(Error::NotNormalized(_))));
        let spacelike = |_t: f64| [MinkVector::ZERO, MinkVector::E2, MinkVector::E1, MinkVector::ZERO];
        assert_eq!(analyze_curve(&spacelike, &[0.0], 1e-8), Err(Error::NotNull));
        let flex = |_t: f64| [MinkVector::ZERO, MinkVector::E1, 2.0 * MinkVector::E1, MinkVector::ZERO];
        assert_eq!(analyze_curve(&flex, &[0.0], 1e-8), Err(Error::FlexPoint));
    }

    #[test]
    fn synthesis_of_zero_curvature() {
        let grid: Vec<f64> = (0..=50).map(|i| 0.1 * i as f64).collect();
        let ff = synthesize_curve(&|_t: f64| 0.0, &GroupElement::identity(), &grid, 1e-12).unwrap();
        for (t, g) in grid.iter().zip(&ff.frames) {
            assert!((g.q - cubic(*t)[0]).norm_inf() < 1e-10 * (1.0 + t * t * t));
        }
    }

    #[test]
    fn constant_curvature_is_subgroup_orbit() {
        let grid: Vec<f64> = (0..=200).map(|i| 0.01 * i as f64).collect();
        let g0 = exp_algebra(&AlgebraElement::new(MinkVector::new(0.2, -0.1, 0.3), 0.1, -0.2, 0.3), 1.0);
        let ff = synthesize_curve(&|_t: f64| 0.7, &g0, &grid, 1e-12).unwrap();
        for (t, g) in grid.iter().zip(&ff.frames) {
            let want = g0.compose(&exp_algebra(&hamiltonian_k(0.7), *t));
            assert!(g.distance(&want) < 1e-8);
        }
        let coarse: Vec<f64> = (0..=40).map(|i| 0.05 * i as f64).collect();
        let ff = synthesize_curve(&|_t: f64| 0.7, &g0, &coarse, 1e-12).unwrap();
        let back = analyze_samples(&ff.curve(), 1e-6).unwrap();
        for k in back.k {
            assert!((k - 0.7).abs() < 1e-6, "{k}");
        }
    }

    #[test]
    fn fornberg_weights_exact_on_polynomials() {
        let x = [0.0, 0.1, 0.25, 0.3, 0.5, 0.6, 0.8];
        let w = fd_weights(0.33, &x, 3);
        let f = |t: f64| t.powi(5) - 2.0 * t.powi(3) + t;
        let d3 = |t: f64| 60.0 * t * t - 12.0;
        let approx: f64 = w[3].iter().zip(&x).map(|(wi, xi)| wi * f(*xi)).sum();
        assert!((approx - d3(0.33)).abs() < 1e-8);
    }
}
