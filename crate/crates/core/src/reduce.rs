//! Coadjoint-orbit classification, cross-sections of the reduced fibration,
//! the gauge quadrature, and reconstruction of horizontal curves.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::Matrix4;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::dynamics::{hamiltonian, phase_embed, phase_from_coalgebra, PhaseState, Sample, Trajectory};
use crate::e21::{
    adjoint, ad_star, casimirs, coadjoint, exp_algebra, isotropy_basis, AlgebraElement, CoalgebraElement,
    GroupElement,
};
use crate::elliptic::{closed_form_state, ClosedFormPath};
use crate::error::{Error, Result};
use crate::mink3::{is_future, mink_cross, mink_inner, MinkVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrbitKind {
    Positive,
    NegativeFuture,
    NegativePast,
    NullFuture,
    NullPast,
    Singular,
}

impl OrbitKind {
    pub fn label(&self) -> &'static str {
        match self {
            OrbitKind::Positive => "positive",
            OrbitKind::NegativeFuture => "negative-future",
            OrbitKind::NegativePast => "negative-past",
            OrbitKind::NullFuture => "null-future",
            OrbitKind::NullPast => "null-past",
            OrbitKind::Singular => "singular",
        }
    }

    fn is_past(&self) -> bool {
        matches!(self, OrbitKind::NegativePast | OrbitKind::NullPast)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitClass {
    pub kind: OrbitKind,
    pub c1: f64,
    pub c2: f64,
}

/// g with coadjoint(g, μ) = η, and the standard form μ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionResult {
    pub g: GroupElement,
    pub mu_std: CoalgebraElement,
}

/// Frame-completion recipe used by a section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectionRecipe {
    Positive,
    Negative,
    /// A₁ = p, completion through e₁ (needs p³ ≠ 0).
    Null,
    /// A₁ = p, completion through e₃ (needs p¹ ≠ 0).
    NullMirrored,
    /// A₁ = p, A₃ the null vector of span(p, e₁+e₃) with ⟨A₁, A₃⟩ = −1.
    /// Smooth on the whole null cone; used along trajectories.
    NullBoosted,
}

/// Tolerance of the coadjoint check performed by every section.
pub const SECTION_CHECK_TOL: f64 = 1e-9;

pub fn classify_orbit(eta: &CoalgebraElement, tol: f64) -> OrbitClass {
    let (c1, c2) = casimirs(eta);
    let kind = if eta.p.norm_inf() <= tol {
        OrbitKind::Singular
    } else if c1.abs() <= tol {
        if is_future(eta.p) { OrbitKind::NullFuture } else { OrbitKind::NullPast }
    } else if c1 > 0.0 {
        OrbitKind::Positive
    } else if is_future(eta.p) {
        OrbitKind::NegativeFuture
    } else {
        OrbitKind::NegativePast
    };
    OrbitClass { kind, c1, c2 }
}

pub fn standard_form(cls: &OrbitClass) -> Result<CoalgebraElement> {
    let d = MinkVector::new(1.0, 0.0, 1.0);
    let (c1, c2) = (cls.c1, cls.c2);
    Ok(match cls.kind {
        OrbitKind::Singular => return Err(Error::SingularOrbit),
        OrbitKind::Positive => {
            let r = c1.sqrt();
            CoalgebraElement::new(r * MinkVector::E2, (c2 / r) * MinkVector::E2)
        }
        OrbitKind::NegativeFuture | OrbitKind::NegativePast => {
            let s = if cls.kind.is_past() { -1.0 } else { 1.0 };
            let a = c1.abs();
            CoalgebraElement::new((s * (0.5 * a).sqrt()) * d, (-s * c2 / (2.0 * a).sqrt()) * d)
        }
        OrbitKind::NullFuture => CoalgebraElement::new(MinkVector::E1, (-c2) * MinkVector::E3),
        OrbitKind::NullPast => CoalgebraElement::new(-MinkVector::E1, c2 * MinkVector::E3),
    })
}

fn default_recipe(kind: OrbitKind, p: MinkVector) -> Result<SectionRecipe> {
    Ok(match kind {
        OrbitKind::Singular => return Err(Error::SingularOrbit),
        OrbitKind::Positive => SectionRecipe::Positive,
        OrbitKind::NegativeFuture | OrbitKind::NegativePast => SectionRecipe::Negative,
        OrbitKind::NullFuture | OrbitKind::NullPast => {
            if p.x3.abs() >= p.x1.abs() {
                SectionRecipe::Null
            } else {
                SectionRecipe::NullMirrored
            }
        }
    })
}

fn recipes_for(kind: OrbitKind) -> &'static [SectionRecipe] {
    match kind {
        OrbitKind::Positive => &[SectionRecipe::Positive],
        OrbitKind::NegativeFuture | OrbitKind::NegativePast => &[SectionRecipe::Negative],
        OrbitKind::NullFuture | OrbitKind::NullPast => &[SectionRecipe::NullBoosted],
        OrbitKind::Singular => &[],
    }
}

/// Builds g for η on an orbit of the given kind with a fixed recipe, and
/// checks coadjoint(g, μ) = η before returning.
pub fn section_with(eta: &CoalgebraElement, kind: OrbitKind, recipe: SectionRecipe) -> Result<SectionResult> {
    let (c1, c2) = casimirs(eta);
    let mu_std = standard_form(&OrbitClass { kind, c1, c2 })?;
    let (p, v) = (eta.p, eta.v);
    // Past-directed orbits reuse the future recipe on −p.
    let pf = if kind.is_past() { -p } else { p };
    let degenerate = |x: f64| x.abs() <= 1e-12 * (1.0 + p.norm_inf());
    let g = match (recipe, kind) {
        (SectionRecipe::Positive, OrbitKind::Positive) => {
            let s = MinkVector::new(p.x2, p.x3 - p.x1, -p.x2);
            let ss = mink_inner(s, s);
            if !(ss > 0.0) || degenerate(ss) {
                return Err(Error::FrameDegenerate("auxiliary vector S is not spacelike"));
            }
            let s = (1.0 / ss.sqrt()) * s;
            let a2 = (1.0 / c1.sqrt()) * p;
            let r = core::f64::consts::FRAC_1_SQRT_2;
            let a1 = r * (mink_cross(a2, s) + s);
            let a3 = r * (mink_cross(a2, s) - s);
            GroupElement::from_frame((-1.0 / c1.sqrt()) * mink_cross(a2, v), a1, a2, a3)
        }
        (SectionRecipe::Negative, OrbitKind::NegativeFuture | OrbitKind::NegativePast) => {
            if degenerate(pf.x3) {
                return Err(Error::FrameDegenerate("p³ vanishes"));
            }
            let s = MinkVector::E2 + (pf.x2 / pf.x3) * MinkVector::E1;
            let n = 1.0 / (2.0 * c1.abs()).sqrt();
            let ps = mink_cross(pf, s);
            let q = (1.0 / c1.abs()) * mink_cross(p, v);
            GroupElement::from_frame(q, n * (pf - ps), s, n * (pf + ps))
        }
        (SectionRecipe::NullBoosted, OrbitKind::NullFuture | OrbitKind::NullPast) => {
            let tau = mink_inner(pf, MinkVector::E1 + MinkVector::E3);
            if !(tau < 0.0) || degenerate(tau) {
                return Err(Error::FrameDegenerate("p is not future-directed"));
            }
            let a3 = (-1.0 / tau) * (MinkVector::E1 + MinkVector::E3) - (1.0 / (tau * tau)) * pf;
            let q = mink_cross(a3, v);
            let q = if kind.is_past() { -q } else { q };
            GroupElement::from_frame(q, pf, mink_cross(a3, pf), a3)
        }
        (SectionRecipe::Null | SectionRecipe::NullMirrored, OrbitKind::NullFuture | OrbitKind::NullPast) => {
            let (a2, a3) = if recipe == SectionRecipe::Null {
                if degenerate(pf.x3) {
                    return Err(Error::FrameDegenerate("p³ vanishes"));
                }
                (-(MinkVector::E2 + (pf.x2 / pf.x3) * MinkVector::E1), (1.0 / pf.x3) * MinkVector::E1)
            } else {
                if degenerate(pf.x1) {
                    return Err(Error::FrameDegenerate("p¹ vanishes"));
                }
                (MinkVector::E2 + (pf.x2 / pf.x1) * MinkVector::E3, (1.0 / pf.x1) * MinkVector::E3)
            };
            let q = mink_cross(a3, v);
            let q = if kind.is_past() { -q } else { q };
            GroupElement::from_frame(q, pf, a2, a3)
        }
        _ => return Err(Error::InvalidInput("recipe does not match orbit kind")),
    };
    let err = coadjoint(&g, &mu_std).sub(eta).norm_inf();
    if !(err <= SECTION_CHECK_TOL * (1.0 + eta.norm_inf())) {
        return Err(Error::FrameDegenerate("section fails the coadjoint check"));
    }
    Ok(SectionResult { g, mu_std })
}

/// Tolerance for the null stratum used by [`cross_section`]: |C₁| small
/// relative to ‖p‖².
pub fn classification_tol(eta: &CoalgebraElement) -> f64 {
    1e-9 * (1.0 + eta.p.norm_inf()).powi(2)
}

/// Cross-section at η with the recipe chosen automatically.
pub fn cross_section(eta: &CoalgebraElement) -> Result<SectionResult> {
    let cls = classify_orbit(eta, classification_tol(eta));
    section_with(eta, cls.kind, default_recipe(cls.kind, eta.p)?)
}

/// A section along one orbit: the kind and recipe are frozen at
/// construction so that nearby points get nearby frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionMap {
    pub kind: OrbitKind,
    pub recipe: SectionRecipe,
}

impl SectionMap {
    pub fn for_orbit(eta: &CoalgebraElement) -> Result<Self> {
        let kind = classify_orbit(eta, classification_tol(eta)).kind;
        let recipe = match kind {
            OrbitKind::NullFuture | OrbitKind::NullPast => SectionRecipe::NullBoosted,
            _ => default_recipe(kind, eta.p)?,
        };
        Ok(Self { kind, recipe })
    }

    pub fn at(&self, eta: &CoalgebraElement) -> Result<SectionResult> {
        section_with(eta, self.kind, self.recipe)
    }
}

/// Sections at successive points, picking at each point the candidate
/// frame closest to the previous one.
pub fn continuous_sections(etas: &[CoalgebraElement]) -> Result<Vec<SectionResult>> {
    let Some(first) = etas.first() else { return Ok(Vec::new()) };
    let map = SectionMap::for_orbit(first)?;
    let mut out: Vec<SectionResult> = Vec::with_capacity(etas.len());
    out.push(map.at(first)?);
    for eta in &etas[1..] {
        let prev = out[out.len() - 1].g;
        let best = recipes_for(map.kind)
            .iter()
            .filter_map(|r| section_with(eta, map.kind, *r).ok())
            .min_by(|a, b| a.g.distance(&prev).total_cmp(&b.g.distance(&prev)));
        out.push(best.ok_or(Error::FrameDegenerate("no valid section candidate"))?);
    }
    Ok(out)
}

/// H[η] with k and m read back from η.
fn hamiltonian_of(eta: &CoalgebraElement) -> AlgebraElement {
    hamiltonian(&phase_from_coalgebra(eta.v.x3, eta))
}

/// Finite-difference step for g′ in the gauge integrand.
const FD_STEP: f64 = 1e-3;

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// The isotropy algebra of a fixed μ, with an orthonormal coefficient basis.
struct Isotropy {
    basis: Vec<[f64; 6]>,
}

impl Isotropy {
    fn new(mu: &CoalgebraElement) -> Result<Self> {
        let basis = isotropy_basis(mu, 0.0)?.iter().map(|b| b.coeffs()).collect();
        Ok(Self { basis })
    }

    /// Orthogonal projection and the residual norm.
    fn project(&self, x: &[f64; 6]) -> ([f64; 6], f64) {
        let mut proj = [0.0; 6];
        for b in &self.basis {
            let c: f64 = b.iter().zip(x).map(|(bi, xi)| bi * xi).sum();
            for i in 0..6 {
                proj[i] += c * b[i];
            }
        }
        let res = (0..6).map(|i| (x[i] - proj[i]).powi(2)).sum::<f64>().sqrt();
        (proj, res)
    }
}

/// ζ(u) = g⁻¹H[η]g·vμ + g⁻¹g′ with g′ from a sixth-order central difference.
pub fn gauge_integrand<S, E>(section: &S, eta: &E, vmu: f64, u: f64) -> Result<AlgebraElement>
where
    S: Fn(f64) -> Result<SectionResult> + ?Sized,
    E: Fn(f64) -> Result<CoalgebraElement> + ?Sized,
{
    let g = section(u)?.g;
    let gm = |d: f64| -> Result<Matrix4<f64>> { Ok(section(u + d)?.g.to_matrix4()) };
    let h = FD_STEP;
    let dg = ((gm(h)? - gm(-h)?) * 45.0 - (gm(2.0 * h)? - gm(-2.0 * h)?) * 9.0 + (gm(3.0 * h)? - gm(-3.0 * h)?))
        / (60.0 * h);
    let ginv = g.inverse();
    let x = adjoint(&ginv, &hamiltonian_of(&eta(u)?)).scale(vmu);
    Ok(x.add(&AlgebraElement::from_matrix4(&(ginv.to_matrix4() * dg))))
}

/// Gauge transformations h on a grid together with the largest isotropy
/// projection residual met by the integrand.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugePath {
    pub t: Vec<f64>,
    pub h: Vec<GroupElement>,
    pub max_residual: f64,
}

/// h(tᵢ) = Exp ∫_{t₀}^{tᵢ} ζ on every node of `grid` (t₀ = grid₀), using one
/// five-point Gauss–Legendre panel per grid interval.
pub fn gauge_path<S, E>(section: &S, eta: &E, vmu: f64, grid: &[f64], tol: f64) -> Result<GaugePath>
where
    S: Fn(f64) -> Result<SectionResult> + ?Sized,
    E: Fn(f64) -> Result<CoalgebraElement> + ?Sized,
{
    let Some(&t0) = grid.first() else { return Err(Error::InvalidInput("empty grid")) };
    let iso = Isotropy::new(&section(t0)?.mu_std)?;
    let mut acc = [0.0; 6];
    let mut out = GaugePath { t: grid.to_vec(), h: vec![GroupElement::identity()], max_residual: 0.0 };
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        for (x, wt) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
            let u = mid + half * x;
            let zeta = gauge_integrand(section, eta, vmu, u)?.coeffs();
            if !zeta.iter().all(|z| z.is_finite()) {
                return Err(Error::IntegrationFailure { t: u, reason: "non-finite gauge integrand" });
            }
            let (proj, res) = iso.project(&zeta);
            out.max_residual = out.max_residual.max(res);
            if res > tol {
                return Err(Error::NotInIsotropy(res));
            }
            for i in 0..6 {
                acc[i] += wt * half * proj[i];
            }
        }
        out.h.push(exp_algebra(&AlgebraElement::from_coeffs(&acc), 1.0));
    }
    Ok(out)
}

/// Panel width used by [`gauge_quadrature`].
const PANEL: f64 = 0.05;

/// h(t) = Exp ∫_{t₀}^{t} ζ(u) du.
pub fn gauge_quadrature<S, E>(section: &S, eta: &E, vmu: f64, t0: f64, t: f64, tol: f64) -> Result<GroupElement>
where
    S: Fn(f64) -> Result<SectionResult> + ?Sized,
    E: Fn(f64) -> Result<CoalgebraElement> + ?Sized,
{
    if t == t0 {
        return Ok(GroupElement::identity());
    }
    let n = ((t - t0).abs() / PANEL).ceil().max(1.0) as usize;
    let grid: Vec<f64> = (0..=n).map(|i| t0 + (t - t0) * i as f64 / n as f64).collect();
    let path = gauge_path(section, eta, vmu, &grid, tol)?;
    Ok(path.h[n])
}

/// Γ(t) = (h(t)g(t)⁻¹, η(t)) sampled on the grid.
pub fn reconstruct_horizontal(
    t: &[f64],
    h: &[GroupElement],
    sections: &[SectionResult],
    etas: &[CoalgebraElement],
) -> Result<Trajectory> {
    if h.len() != t.len() || sections.len() != t.len() || etas.len() != t.len() {
        return Err(Error::InvalidInput("inputs must share one grid"));
    }
    let mut samples = Vec::with_capacity(t.len());
    for i in 0..t.len() {
        let state = phase_from_coalgebra(etas[i].v.x3, &etas[i]);
        samples.push(Sample::new(t[i], h[i].compose(&sections[i].g.inverse()), state));
    }
    Ok(Trajectory { samples })
}

/// vμ(s) with η′(s) = vμ·(−ad*(H[η])η): least-squares ratio, η′ by a
/// fourth-order central difference.
pub fn measure_vmu<E>(eta: &E, s: f64) -> Result<f64>
where
    E: Fn(f64) -> Result<CoalgebraElement> + ?Sized,
{
    let h = FD_STEP;
    let e = |d: f64| -> Result<[f64; 6]> { Ok(eta(s + d)?.to_array()) };
    let (a, b, c, d) = (e(-2.0 * h)?, e(-h)?, e(h)?, e(2.0 * h)?);
    let here = eta(s)?;
    let flow = ad_star(&hamiltonian_of(&here), &here).scale(-1.0).to_array();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..6 {
        let de = (a[i] - 8.0 * b[i] + 8.0 * c[i] - d[i]) / (12.0 * h);
        num += de * flow[i];
        den += flow[i] * flow[i];
    }
    if den == 0.0 {
        return Err(Error::InvalidInput("η is an equilibrium; vμ is undefined"));
    }
    Ok(num / den)
}

/// Result of the quadrature pipeline along a closed-form phase path.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRun {
    pub trajectory: Trajectory,
    pub kind: OrbitKind,
    pub recipe: SectionRecipe,
    pub max_isotropy_residual: f64,
    /// sup ‖coadjoint(h, μ) − μ‖∞ over the grid.
    pub isotropy_drift: f64,
}

/// Extremal through (g₀, s₀) on [0, T] by the reduction pipeline: closed-form
/// η(t) in true time (vμ = 1), frozen section, gauge quadrature, Γ = h g⁻¹,
/// then one left translation so that Γ(0) = g₀.
pub fn quadrature_extremal(
    s0: &PhaseState,
    g0: &GroupElement,
    t_end: f64,
    dt: f64,
    tol: f64,
) -> Result<QuadratureRun> {
    if !(t_end > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidInput("T and dt must be positive"));
    }
    let path = ClosedFormPath::from_state(s0)?;
    let eta = |t: f64| -> Result<CoalgebraElement> { Ok(phase_embed(&closed_form_state(&path, t)?)) };
    let map = SectionMap::for_orbit(&phase_embed(s0))?;
    let section = |t: f64| map.at(&eta(t)?);
    let n = (t_end / dt).round().max(1.0) as usize;
    let grid: Vec<f64> = (0..=n).map(|i| t_end * i as f64 / n as f64).collect();
    let gp = gauge_path(&section, &eta, 1.0, &grid, tol)?;
    let etas = grid.iter().map(|t| eta(*t)).collect::<Result<Vec<_>>>()?;
    let sections = grid.iter().map(|t| section(*t)).collect::<Result<Vec<_>>>()?;
    let mu = sections[0].mu_std;
    let isotropy_drift = gp.h.iter().map(|h| coadjoint(h, &mu).sub(&mu).norm_inf()).fold(0.0, f64::max);
    let raw = reconstruct_horizontal(&grid, &gp.h, &sections, &etas)?;
    let c = g0.compose(&sections[0].g);
    let samples = raw.samples.iter().map(|s| Sample::new(s.t, c.compose(&s.g), s.state)).collect();
    Ok(QuadratureRun {
        trajectory: Trajectory { samples },
        kind: map.kind,
        recipe: map.recipe,
        max_isotropy_residual: gp.max_residual,
        isotropy_drift,
    })
}

/// Deviation between two trajectories on the same grid after aligning the
/// second to the first by the single left translation C = g_a(t₀) g_b(t₀)⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alignment {
    pub c: GroupElement,
    pub group: f64,
    pub fiber: f64,
}

pub fn align_left(a: &Trajectory, b: &Trajectory) -> Result<Alignment> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::InvalidInput("trajectories must share a nonempty grid"));
    }
    let c = a.samples[0].g.compose(&b.samples[0].g.inverse());
    let mut out = Alignment { c, group: 0.0, fiber: 0.0 };
    for (x, y) in a.samples.iter().zip(&b.samples) {
        if (x.t - y.t).abs() > 1e-12 * (1.0 + x.t.abs()) {
            return Err(Error::InvalidInput("trajectories must share a grid"));
        }
        out.group = out.group.max(x.g.distance(&c.compose(&y.g)));
        let (fx, fy) = (x.state.fiber(), y.state.fiber());
        out.fiber = out.fiber.max((0..3).map(|i| (fx[i] - fy[i]).abs()).fold(0.0, f64::max));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate_extremal, moment_map};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn eta(p: [f64; 3], v: [f64; 3]) -> CoalgebraElement {
        CoalgebraElement::new(MinkVector::from_array(p), MinkVector::from_array(v))
    }

    #[test]
    fn classification_examples() {
        let c = classify_orbit(&eta([0.0, 1.0, 0.0], [0.0; 3]), 1e-12);
        assert_eq!((c.kind, c.c1), (OrbitKind::Positive, 1.0));
        let c = classify_orbit(&eta([1.0, 0.0, 1.0], [0.0; 3]), 1e-12);
        assert_eq!((c.kind, c.c1), (OrbitKind::NegativeFuture, -2.0));
        let c = classify_orbit(&eta([1.0, 0.0, 0.0], [0.3, -2.0, 5.0]), 1e-12);
        assert_eq!(c.kind, OrbitKind::NullFuture);
        assert_eq!(classify_orbit(&eta([0.0; 3], [1.0; 3]), 1e-12).kind, OrbitKind::Singular);
        assert_eq!(classify_orbit(&eta([-1.0, 0.0, -1.0], [0.0; 3]), 1e-12).kind, OrbitKind::NegativePast);
    }

    #[test]
    fn standard_form_examples() {
        let sf = |kind, c1, c2| standard_form(&OrbitClass { kind, c1, c2 }).unwrap();
        assert_eq!(sf(OrbitKind::Positive, 1.0, 0.0), eta([0.0, 1.0, 0.0], [0.0; 3]));
        let n = sf(OrbitKind::NegativeFuture, -2.0, 4.0);
        assert!(n.sub(&eta([1.0, 0.0, 1.0], [-2.0, 0.0, -2.0])).norm_inf() < 1e-15);
        assert_eq!(sf(OrbitKind::NullFuture, 0.0, 3.0), eta([1.0, 0.0, 0.0], [0.0, 0.0, -3.0]));
        for kind in [OrbitKind::NegativePast, OrbitKind::NullPast, OrbitKind::Positive] {
            let c1 = match kind {
                OrbitKind::Positive => 2.5,
                OrbitKind::NullPast => 0.0,
                _ => -1.5,
            };
            let (a, b) = casimirs(&sf(kind, c1, -0.7));
            assert!((a - c1).abs() < 1e-12 && (b + 0.7).abs() < 1e-12);
        }
        assert_eq!(standard_form(&OrbitClass { kind: OrbitKind::Singular, c1: 0.0, c2: 0.0 }), Err(Error::SingularOrbit));
    }

    #[test]
    fn standard_points_map_to_identity() {
        for e in [eta([0.0, 1.0, 0.0], [0.0; 3]), eta([1.0, 0.0, 1.0], [0.0; 3]), eta([1.0, 0.0, 0.0], [0.0; 3])] {
            let s = cross_section(&e).unwrap();
            assert!(s.g.distance(&GroupElement::identity()) < 1e-15, "{e:?}");
        }
    }

    #[test]
    fn null_printed_recipe_degenerates_at_p3_zero() {
        let e = eta([1.0, 0.0, 0.0], [0.2, 0.4, -1.0]);
        assert!(matches!(section_with(&e, OrbitKind::NullFuture, SectionRecipe::Null), Err(Error::FrameDegenerate(_))));
        let s = section_with(&e, OrbitKind::NullFuture, SectionRecipe::NullMirrored).unwrap();
        assert!(coadjoint(&s.g, &s.mu_std).sub(&e).norm_inf() < 1e-12);
    }

    fn random_point(kind: OrbitKind, rng: &mut ChaCha8Rng) -> CoalgebraElement {
        let v = MinkVector::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let p = loop {
            let p = match kind {
                OrbitKind::NullFuture | OrbitKind::NullPast => {
                    let (a, b) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
                    let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    MinkVector::new(a, s * (2.0 * a * b).sqrt(), b)
                }
                _ => MinkVector::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
            };
            if p.norm_inf() > 0.1 && classify_orbit(&CoalgebraElement::new(p, v), 1e-9).kind.is_past() == kind.is_past() {
                break p;
            }
            if matches!(kind, OrbitKind::NullPast | OrbitKind::NegativePast) && p.norm_inf() > 0.1 {
                break -p;
            }
        };
        CoalgebraElement::new(p, v)
    }

    #[test]
    fn sections_reproduce_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in [
            OrbitKind::Positive,
            OrbitKind::NegativeFuture,
            OrbitKind::NegativePast,
            OrbitKind::NullFuture,
            OrbitKind::NullPast,
        ] {
            let mut seen = 0;
            while seen < 50 {
                let e = random_point(kind, &mut rng);
                if classify_orbit(&e, 1e-9 * (1.0 + e.p.norm_inf()).powi(2)).kind != kind {
                    continue;
                }
                seen += 1;
                let s = cross_section(&e).unwrap();
                assert!(s.g.is_valid(1e-10));
                assert!(coadjoint(&s.g, &s.mu_std).sub(&e).norm_inf() < 1e-9);
                let s = SectionMap::for_orbit(&e).unwrap().at(&e).unwrap();
                assert!(s.g.is_valid(1e-10));
            }
        }
    }

    #[test]
    fn positive_auxiliary_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut n = 0;
        while n < 100 {
            let s = PhaseState::new(rng.gen_range(0.5..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)).unwrap();
            let e = phase_embed(&s);
            if casimirs(&e).0 <= 0.0 {
                continue;
            }
            n += 1;
            let aux = MinkVector::new(s.l4, s.l5 - 0.5 * (1.0 - s.m * s.k), -s.l4);
            assert!(mink_inner(e.p, aux).abs() < 1e-12);
            assert!(mink_inner(aux, aux) > 0.0);
        }
    }

    #[test]
    fn empty_and_constant_quadrature() {
        let s0 = PhaseState::bifurcation(1.0, 2.0).unwrap();
        let e0 = phase_embed(&s0);
        let sec = cross_section(&e0).unwrap();
        let section = |_t: f64| Ok(sec);
        let eta = |_t: f64| Ok(e0);
        let h = gauge_quadrature(&section, &eta, 1.0, 0.3, 0.3, 1e-10).unwrap();
        assert_eq!(h, GroupElement::identity());
        let zeta = adjoint(&sec.g.inverse(), &hamiltonian(&s0));
        let h = gauge_quadrature(&section, &eta, 1.0, 0.0, 1.7, 1e-10).unwrap();
        assert!(h.distance(&exp_algebra(&zeta, 1.7)) < 1e-12);
    }

    fn compact_states() -> [PhaseState; 5] {
        let null = |m: f64, k: f64, l4: f64| PhaseState::new(m, k, l4, l4 * l4 / (1.0 - m * k)).unwrap();
        [
            PhaseState::new(1.0, 0.0, 0.1, 0.0).unwrap(),
            PhaseState::new(1.0, -0.3, 0.05, 0.195).unwrap(),
            PhaseState::new(-2.0, -2.00288, -0.154626, -2.25430).unwrap(),
            null(0.1, 1.70624, 0.294379),
            null(-2.0, -4.93591, 0.545298),
        ]
    }

    #[test]
    fn quadrature_matches_direct_integration() {
        let g0 = GroupElement::identity();
        for s0 in compact_states() {
            let path = ClosedFormPath::from_state(&s0).unwrap();
            let t_end = path.period().unwrap();
            let run = quadrature_extremal(&s0, &g0, t_end, 0.01, 1e-8).unwrap();
            let direct = integrate_extremal(&s0, &g0, t_end, 1e-12);
            let direct = direct.unwrap();
            assert_eq!(direct.len(), run.trajectory.len());
            let al = align_left(&direct, &run.trajectory).unwrap();
            assert!(al.group < 1e-5 && al.fiber < 1e-5, "{:?} {al:?}", run.kind);
            assert!(run.isotropy_drift < 1e-8, "{}", run.isotropy_drift);
            let (rg, rf) = run.trajectory.characteristic_residual();
            assert!(rg < 1e-5 && rf < 1e-5, "{rg} {rf}");
            let j0 = run.trajectory.samples[0].j;
            for s in &run.trajectory.samples {
                assert!(moment_map(&s.g, &s.state).sub(&j0).norm_inf() < 1e-7);
            }
        }
    }

    #[test]
    fn quadrature_kinds_cover_reachable_types() {
        let kinds: Vec<OrbitKind> =
            compact_states().iter().map(|s| SectionMap::for_orbit(&phase_embed(s)).unwrap().kind).collect();
        assert_eq!(
            kinds,
            [
                OrbitKind::Positive,
                OrbitKind::NegativePast,
                OrbitKind::NegativeFuture,
                OrbitKind::NullPast,
                OrbitKind::NullFuture
            ]
        );
    }

    #[test]
    fn true_time_vmu_is_one() {
        let s0 = compact_states()[0];
        let path = ClosedFormPath::from_state(&s0).unwrap();
        let eta = |t: f64| -> Result<CoalgebraElement> { Ok(phase_embed(&closed_form_state(&path, t)?)) };
        for i in 0..20 {
            let v = measure_vmu(&eta, 0.3 * i as f64).unwrap();
            assert!((v - 1.0).abs() < 1e-8, "{v}");
        }
    }
}
