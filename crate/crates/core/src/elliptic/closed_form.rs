#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use super::weierstrass::{wp_branch, CubicCase, WeierstrassInvariants, WpBranch, POLE_TOL};
use super::{chi_from_k, invariants_from_casimirs};
use crate::dynamics::PhaseState;
use crate::error::{Error, Result};

/// Which real component of the phase portrait carries the path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// D > 0: single unbounded component.
    CaseI,
    /// D < 0: the oval, h ∈ [e₃, e₂].
    CaseIICompact,
    /// D < 0: the unbounded component, h ≥ e₁.
    CaseIIUnbounded,
    /// D = 0, unbounded component of the rational curve.
    DegenerateUnbounded,
    /// D = 0, the separatrix approaching the saddle.
    DegenerateHomoclinic,
    /// A fixed point of the flow (constant curvature).
    Equilibrium,
}

impl Branch {
    pub fn label(&self) -> &'static str {
        match self {
            Branch::CaseI => "CaseI",
            Branch::CaseIICompact => "CaseII_compact",
            Branch::CaseIIUnbounded => "CaseII_unbounded",
            Branch::DegenerateUnbounded => "degenerate_unbounded",
            Branch::DegenerateHomoclinic => "degenerate_homoclinic",
            Branch::Equilibrium => "equilibrium",
        }
    }

    fn wp_branch(&self) -> WpBranch {
        match self {
            Branch::CaseIICompact => WpBranch::Shifted,
            Branch::DegenerateHomoclinic => WpBranch::Homoclinic,
            _ => WpBranch::Real,
        }
    }
}

/// An extremal in closed form: k(t) = 4℘(t − t₀; g₂ʰ, g₃ʰ) + 1/(3m) on a branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormPath {
    pub m: f64,
    pub c1: f64,
    pub c2: f64,
    pub t0: f64,
    pub branch: Branch,
    pub true_time: WeierstrassInvariants,
    pub portrait: WeierstrassInvariants,
    /// Curvature of an equilibrium path.
    k_eq: f64,
}

impl ClosedFormPath {
    /// The path through `s` at t = 0.
    pub fn from_state(s: &PhaseState) -> Result<Self> {
        let (c1, c2) = s.casimirs();
        let (portrait, true_time) = invariants_from_casimirs(s.m, c1, c2);
        let mut path =
            Self { m: s.m, c1, c2, t0: 0.0, branch: Branch::Equilibrium, true_time, portrait, k_eq: s.k };
        if s.is_bifurcation(1e-12) {
            return Ok(path);
        }
        let h0 = (s.k - 1.0 / (3.0 * s.m)) / 4.0;
        let hp0 = -s.l4 / (2.0 * s.m);
        let inv = &path.true_time;
        let (branch, tau) = match inv.case {
            CubicCase::OneReal => {
                let w = inv.omega1.unwrap_or(f64::INFINITY);
                (Branch::CaseI, solve_monotone(inv, WpBranch::Real, h0, 2.0 * POLE_TOL, w, false))
            }
            CubicCase::ThreeReal => {
                let w = inv.omega1.unwrap_or(f64::INFINITY);
                let e2 = inv.roots[1].re;
                if h0 <= e2 + 1e-9 * (1.0 + e2.abs()) {
                    (Branch::CaseIICompact, solve_monotone(inv, WpBranch::Shifted, h0, 0.0, w, true))
                } else {
                    (Branch::CaseIIUnbounded, solve_monotone(inv, WpBranch::Real, h0, 2.0 * POLE_TOL, w, false))
                }
            }
            CubicCase::Degenerate => degenerate_tau(inv, h0)?,
        };
        path.branch = branch;
        let increasing = matches!(branch, Branch::CaseIICompact | Branch::DegenerateHomoclinic);
        // On the solved half-interval ℘′ ≥ 0 (increasing) or ≤ 0; reflect when λ₄ says otherwise.
        let tau = if (increasing && hp0 < 0.0) || (!increasing && hp0 > 0.0) { -tau } else { tau };
        let tau = refine(inv, branch.wp_branch(), tau, h0, hp0);
        path.t0 = -tau;
        Ok(path)
    }

    pub fn from_casimirs_branch(m: f64, c1: f64, c2: f64, t0: f64, branch: Branch) -> Result<Self> {
        let (portrait, true_time) = invariants_from_casimirs(m, c1, c2);
        let ok = match branch {
            Branch::CaseI => true_time.case == CubicCase::OneReal,
            Branch::CaseIICompact | Branch::CaseIIUnbounded => true_time.case == CubicCase::ThreeReal,
            Branch::DegenerateUnbounded => true_time.case == CubicCase::Degenerate,
            Branch::DegenerateHomoclinic => {
                true_time.case == CubicCase::Degenerate && true_time.roots[0].re > 0.0
            }
            Branch::Equilibrium => false,
        };
        if !ok {
            return Err(Error::WrongBranch);
        }
        Ok(Self { m, c1, c2, t0, branch, true_time, portrait, k_eq: 0.0 })
    }

    /// Real period of k, when the branch is periodic.
    pub fn period(&self) -> Option<f64> {
        match self.branch {
            Branch::DegenerateHomoclinic | Branch::Equilibrium => None,
            _ => self.true_time.omega1.map(|w| 2.0 * w),
        }
    }

    /// (h, h′) at time t.
    pub fn h(&self, t: f64) -> Result<(f64, f64)> {
        if self.branch == Branch::Equilibrium {
            return Ok(((self.k_eq - 1.0 / (3.0 * self.m)) / 4.0, 0.0));
        }
        wp_branch(t - self.t0, &self.true_time, self.branch.wp_branch())
    }

    /// Portrait coordinate χ at time t.
    pub fn chi(&self, t: f64) -> Result<f64> {
        Ok(chi_from_k(self.m, closed_form_state(self, t)?.k))
    }
}

/// Solves ℘_b(τ) = h0 on [lo, hi] where ℘_b is monotone (increasing if `inc`).
fn solve_monotone(inv: &WeierstrassInvariants, b: WpBranch, h0: f64, lo: f64, hi: f64, inc: bool) -> f64 {
    let f = |t: f64| wp_branch(t, inv, b).map(|v| v.0 - h0).unwrap_or(if inc { f64::NEG_INFINITY } else { f64::INFINITY });
    let (mut a, mut c) = (lo, hi);
    let (fa, fc) = (f(a), f(c));
    let sign_ok = |v: f64| if inc { v <= 0.0 } else { v >= 0.0 };
    if !sign_ok(fa) {
        return a;
    }
    if sign_ok(fc) {
        return c;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + c);
        if mid <= a || mid >= c {
            break;
        }
        if sign_ok(f(mid)) {
            a = mid;
        } else {
            c = mid;
        }
    }
    0.5 * (a + c)
}

/// Gauss–Newton on (℘(τ) − h0, ℘′(τ) − hp0); near turning points the ℘′ equation dominates.
fn refine(inv: &WeierstrassInvariants, b: WpBranch, mut tau: f64, h0: f64, hp0: f64) -> f64 {
    let resid = |t: f64| -> Option<(f64, f64, f64)> {
        let (p, dp) = wp_branch(t, inv, b).ok()?;
        Some((p - h0, dp - hp0, 6.0 * p * p - inv.g2 / 2.0))
    };
    let Some((mut r1, mut r2, _)) = resid(tau) else { return tau };
    for _ in 0..8 {
        let Some((_, _, ddp)) = resid(tau) else { break };
        let dp = r2 + hp0;
        let den = dp * dp + ddp * ddp;
        if den == 0.0 {
            break;
        }
        let cand = tau - (r1 * dp + r2 * ddp) / den;
        match resid(cand) {
            Some((n1, n2, _)) if n1.abs() + n2.abs() < r1.abs() + r2.abs() => {
                tau = cand;
                r1 = n1;
                r2 = n2;
            }
            _ => break,
        }
    }
    tau
}

/// τ ≥ 0 with ℘(τ) = h0 for the elementary (D = 0) forms.
fn degenerate_tau(inv: &WeierstrassInvariants, h0: f64) -> Result<(Branch, f64)> {
    let a = inv.roots[0].re;
    if a == 0.0 {
        if h0 <= 0.0 {
            return Err(Error::WrongBranch);
        }
        return Ok((Branch::DegenerateUnbounded, 1.0 / h0.sqrt()));
    }
    if a > 0.0 {
        let r = (3.0 * a).sqrt();
        if h0 > a {
            let s = (3.0 * a / (h0 - a)).sqrt();
            return Ok((Branch::DegenerateUnbounded, s.asinh() / r));
        }
        if h0 < a && h0 >= -2.0 * a - 1e-12 * a {
            let c = (3.0 * a / (a - h0)).sqrt().max(1.0);
            return Ok((Branch::DegenerateHomoclinic, c.acosh() / r));
        }
        return Err(Error::WrongBranch);
    }
    let r = (-3.0 * a).sqrt();
    if h0 > a {
        let s = (-3.0 * a / (h0 - a)).sqrt().min(1.0);
        return Ok((Branch::DegenerateUnbounded, s.asin() / r));
    }
    Err(Error::WrongBranch)
}

/// Phase state on the path at time t.
pub fn closed_form_state(path: &ClosedFormPath, t: f64) -> Result<PhaseState> {
    let m = path.m;
    let (h, hp) = path.h(t)?;
    let k = 4.0 * h + 1.0 / (3.0 * m);
    let l4 = -2.0 * m * hp;
    let l5 = (path.c2 + 0.25 * (1.0 - m * m * k * k)) / m;
    Ok(PhaseState { m, k, l4, l5 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{el_field, integrate_extremal};
    use crate::e21::GroupElement;

    fn check_through(s: PhaseState, want: Branch) -> ClosedFormPath {
        let path = ClosedFormPath::from_state(&s).unwrap();
        assert_eq!(path.branch, want);
        let s0 = closed_form_state(&path, 0.0).unwrap();
        assert!((s0.k - s.k).abs() < 1e-9 && (s0.l4 - s.l4).abs() < 1e-9 && (s0.l5 - s.l5).abs() < 1e-9, "{s0:?} vs {s:?}");
        path
    }

    #[test]
    fn compact_orbit_matches_flow() {
        let s = PhaseState::new(1.0, 0.0, 0.1, 0.0).unwrap();
        let path = check_through(s, Branch::CaseIICompact);
        let period = path.period().unwrap();
        let tr = integrate_extremal(&s, &GroupElement::identity(), period, 1e-12).unwrap();
        let mut worst: f64 = 0.0;
        for smp in &tr.samples {
            let c = closed_form_state(&path, smp.t).unwrap();
            worst = worst.max((c.k - smp.state.k).abs()).max((c.l4 - smp.state.l4).abs()).max((c.l5 - smp.state.l5).abs());
        }
        assert!(worst < 1e-8, "{worst:e}");
        let a = closed_form_state(&path, 0.37).unwrap();
        let b = closed_form_state(&path, 0.37 + period).unwrap();
        assert!((a.k - b.k).abs() < 1e-9);
    }

    #[test]
    fn field_consistency_and_turning_points() {
        for s in [
            PhaseState::new(1.0, -0.3, 0.05, 0.195).unwrap(),
            PhaseState::new(1.0, -0.3, -0.05, 0.195).unwrap(),
            PhaseState::new(1.0, 0.0, 1.0, 0.0).unwrap(),
            PhaseState::new(-2.0, -2.00288, -0.154626, -2.25430).unwrap(),
        ] {
            let path = ClosedFormPath::from_state(&s).unwrap();
            let s0 = closed_form_state(&path, 0.0).unwrap();
            assert!((s0.l4 - s.l4).abs() < 1e-9 && (s0.k - s.k).abs() < 1e-9, "{:?} {s0:?} {s:?}", path.branch);
            for i in 0..20 {
                let t = 0.05 * i as f64;
                let h = 1e-4;
                let (Ok(a), Ok(b), Ok(c)) = (
                    closed_form_state(&path, t - h),
                    closed_form_state(&path, t),
                    closed_form_state(&path, t + h),
                ) else { continue };
                let f = el_field(&b);
                let scale = 1.0 + f.iter().map(|x| x.abs()).fold(0.0, f64::max);
                assert!(((c.l4 - a.l4) / (2.0 * h) - f[1]).abs() < 1e-6 * scale);
                assert!(((c.l5 - a.l5) / (2.0 * h) - f[2]).abs() < 1e-6 * scale);
                assert!(((c.k - a.k) / (2.0 * h) - f[0]).abs() < 1e-6 * scale);
            }
        }
        // A turning point: λ₄ = 0 off the fixed point.
        let s = PhaseState::new(1.0, -0.3, 0.0, 0.1).unwrap();
        let path = ClosedFormPath::from_state(&s).unwrap();
        let s0 = closed_form_state(&path, 0.0).unwrap();
        assert!((s0.k - s.k).abs() < 1e-10 && s0.l4.abs() < 1e-10);
        let s1 = closed_form_state(&path, 1e-3).unwrap();
        assert!(s1.l4.signum() == el_field(&s)[1].signum());
    }

    #[test]
    fn equilibrium_and_wrong_branch() {
        let s = PhaseState::bifurcation(1.0, 2.0).unwrap();
        let path = ClosedFormPath::from_state(&s).unwrap();
        assert_eq!(path.branch, Branch::Equilibrium);
        assert_eq!(closed_form_state(&path, 3.0).unwrap().k, 2.0);
        assert_eq!(ClosedFormPath::from_casimirs_branch(1.0, 1.0, -0.25, 0.0, Branch::CaseIICompact), Err(Error::WrongBranch));
    }
}
