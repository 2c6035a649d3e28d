//! Weierstrass ℘ with real invariants: cubic roots, half-periods, evaluation.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use super::jacobi::{ellipk, sncndn};
use crate::error::{Error, Result};

/// Relative threshold below which the discriminant is treated as zero.
pub const DEGENERATE_TOL: f64 = 1e-12;

/// Distance to a lattice pole below which evaluation is refused.
pub const POLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubicCase {
    /// D > 0: one real root e₂ and a complex-conjugate pair.
    OneReal,
    /// D < 0: three real roots e₁ > e₂ > e₃.
    ThreeReal,
    /// D = 0: a repeated root; ℘ reduces to elementary functions.
    Degenerate,
}

/// Invariants of ℘ together with the root and lattice data of 4z³ − g₂z − g₃.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassInvariants {
    pub g2: f64,
    pub g3: f64,
    /// D = 27g₃² − g₂³.
    pub d: f64,
    pub case: CubicCase,
    /// ThreeReal: e₁ > e₂ > e₃. OneReal: the real root, then the pair with Im > 0, Im < 0.
    /// Degenerate: the double root twice, then the simple root.
    pub roots: [Complex64; 3],
    /// Real half-period: ℘(ω₁) is the largest real root (absent when the lattice degenerates).
    pub omega1: Option<f64>,
    /// Second half-period: iK′/√(e₁−e₃) for three real roots, (K + iK′)/(2√H₂) otherwise.
    pub omega3: Option<Complex64>,
}

/// Which real solution of ℘′² = 4℘³ − g₂℘ − g₃ to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpBranch {
    /// ℘(t) on the real line, with a pole at t = 0.
    Real,
    /// ℘(t + ω₃) for three real roots: oscillates in [e₃, e₂].
    Shifted,
    /// Degenerate cubic with positive double root a: a − 3a/cosh²(√(3a)t), in [−2a, a).
    Homoclinic,
}

fn cubic(g2: f64, g3: f64, z: f64) -> f64 {
    4.0 * z * z * z - g2 * z - g3
}

fn newton_polish(g2: f64, g3: f64, mut z: f64) -> f64 {
    for _ in 0..3 {
        let d = 12.0 * z * z - g2;
        if d == 0.0 {
            break;
        }
        let step = cubic(g2, g3, z) / d;
        if !step.is_finite() {
            break;
        }
        z -= step;
    }
    z
}

fn discriminant_is_zero(g2: f64, g3: f64, d: f64) -> bool {
    let scale = (27.0 * g3 * g3).max(g2.abs().powi(3));
    d.abs() <= DEGENERATE_TOL * scale || (g2 == 0.0 && g3 == 0.0)
}

impl WeierstrassInvariants {
    /// Classifies the cubic and computes roots and half-periods for any real invariants.
    pub fn new(g2: f64, g3: f64) -> Self {
        let d = 27.0 * g3 * g3 - g2 * g2 * g2;
        let re = |x: f64| Complex64::new(x, 0.0);
        if discriminant_is_zero(g2, g3, d) {
            let a = if g2 == 0.0 { 0.0 } else { -1.5 * g3 / g2 };
            let omega1 = if a < 0.0 { Some(PI / (2.0 * (-3.0 * a).sqrt())) } else { None };
            return Self {
                g2,
                g3,
                d,
                case: CubicCase::Degenerate,
                roots: [re(a), re(a), re(-2.0 * a)],
                omega1,
                omega3: None,
            };
        }
        if d < 0.0 {
            // Trigonometric form of the three real roots, then Newton polish.
            let r = (g2 / 12.0).sqrt();
            let arg = (1.5 * g3 / g2 * (12.0 / g2).sqrt()).clamp(-1.0, 1.0);
            let theta = arg.acos() / 3.0;
            let mut e: [f64; 3] = core::array::from_fn(|j| {
                newton_polish(g2, g3, 2.0 * r * (theta - 2.0 * PI * j as f64 / 3.0).cos())
            });
            e.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
            let lam = (e[0] - e[2]).sqrt();
            let m = (e[1] - e[2]) / (e[0] - e[2]);
            Self {
                g2,
                g3,
                d,
                case: CubicCase::ThreeReal,
                roots: [re(e[0]), re(e[1]), re(e[2])],
                omega1: Some(ellipk(m) / lam),
                omega3: Some(Complex64::new(0.0, ellipk(1.0 - m) / lam)),
            }
        } else {
            // Cardano for the single real root.
            let q = -g3 / 4.0;
            let delta = (d / 1728.0).sqrt();
            let z = (-q / 2.0 + delta).cbrt() + (-q / 2.0 - delta).cbrt();
            let er = newton_polish(g2, g3, z);
            let im = 0.5 * (3.0 * er * er - g2).max(0.0).sqrt();
            let h2 = (3.0 * er * er - g2 / 4.0).sqrt();
            let m = 0.5 - 0.75 * er / h2;
            let (k, kp) = (ellipk(m), ellipk(1.0 - m));
            let sq = h2.sqrt();
            Self {
                g2,
                g3,
                d,
                case: CubicCase::OneReal,
                roots: [re(er), Complex64::new(-er / 2.0, im), Complex64::new(-er / 2.0, -im)],
                omega1: Some(k / sq),
                omega3: Some(Complex64::new(k / (2.0 * sq), kp / (2.0 * sq))),
            }
        }
    }

    /// Largest real root.
    pub fn max_real_root(&self) -> f64 {
        match self.case {
            CubicCase::ThreeReal | CubicCase::OneReal => self.roots[0].re,
            CubicCase::Degenerate => self.roots[0].re.max(self.roots[2].re),
        }
    }

    /// Residual |4z³ − g₂z − g₃| of the stored roots, relative to the root scale.
    pub fn root_residual(&self) -> f64 {
        let scale = self.roots.iter().map(|r| r.norm()).fold(1.0, f64::max).powi(3);
        self.roots
            .iter()
            .map(|z| (z * z * z * 4.0 - z * self.g2 - self.g3).norm() / scale)
            .fold(0.0, f64::max)
    }
}

/// Strict form of [`WeierstrassInvariants::new`]: the rational case is an error.
pub fn cubic_analysis(g2: f64, g3: f64) -> Result<WeierstrassInvariants> {
    let inv = WeierstrassInvariants::new(g2, g3);
    if inv.case == CubicCase::Degenerate {
        return Err(Error::DegenerateCubic(inv.d));
    }
    Ok(inv)
}

fn pole_check(t: f64, period: Option<f64>) -> Result<()> {
    let dist = match period {
        Some(p) => (t - p * (t / p).round()).abs(),
        None => t.abs(),
    };
    if dist < POLE_TOL {
        return Err(Error::NearPole(dist));
    }
    Ok(())
}

/// (℘(t), ℘′(t)) for real t on the requested branch.
pub fn wp_branch(t: f64, inv: &WeierstrassInvariants, branch: WpBranch) -> Result<(f64, f64)> {
    match (inv.case, branch) {
        (CubicCase::ThreeReal, WpBranch::Real) => {
            let (e1, e3) = (inv.roots[0].re, inv.roots[2].re);
            let w = e1 - e3;
            let lam = w.sqrt();
            pole_check(t, inv.omega1.map(|w| 2.0 * w))?;
            let m = (inv.roots[1].re - e3) / w;
            let (sn, cn, dn) = sncndn(lam * t, m);
            Ok((e3 + w / (sn * sn), -2.0 * w * lam * cn * dn / (sn * sn * sn)))
        }
        (CubicCase::ThreeReal, WpBranch::Shifted) => {
            let (e1, e2, e3) = (inv.roots[0].re, inv.roots[1].re, inv.roots[2].re);
            let lam = (e1 - e3).sqrt();
            let m = (e2 - e3) / (e1 - e3);
            let (sn, cn, dn) = sncndn(lam * t, m);
            Ok((e3 + (e2 - e3) * sn * sn, 2.0 * (e2 - e3) * lam * sn * cn * dn))
        }
        (CubicCase::OneReal, WpBranch::Real) => {
            let er = inv.roots[0].re;
            let h2 = (3.0 * er * er - inv.g2 / 4.0).sqrt();
            let m = 0.5 - 0.75 * er / h2;
            pole_check(t, inv.omega1.map(|w| 2.0 * w))?;
            let (sn, cn, dn) = sncndn(2.0 * h2.sqrt() * t, m);
            let one_minus = if cn > 0.0 { sn * sn / (1.0 + cn) } else { 1.0 - cn };
            let p = er + h2 * (1.0 + cn) / one_minus;
            let dp = -4.0 * h2 * h2.sqrt() * sn * dn / (one_minus * one_minus);
            Ok((p, dp))
        }
        (CubicCase::Degenerate, WpBranch::Real) => {
            let a = inv.roots[0].re;
            if a == 0.0 {
                pole_check(t, None)?;
                return Ok((1.0 / (t * t), -2.0 / (t * t * t)));
            }
            if a > 0.0 {
                pole_check(t, None)?;
                let r = (3.0 * a).sqrt();
                let (s, c) = ((r * t).sinh(), (r * t).cosh());
                Ok((a + 3.0 * a / (s * s), -6.0 * a * r * c / (s * s * s)))
            } else {
                let r = (-3.0 * a).sqrt();
                pole_check(t, Some(PI / r))?;
                let (s, c) = ((r * t).sin(), (r * t).cos());
                Ok((a - 3.0 * a / (s * s), 6.0 * a * r * c / (s * s * s)))
            }
        }
        (CubicCase::Degenerate, WpBranch::Homoclinic) => {
            let a = inv.roots[0].re;
            if a <= 0.0 {
                return Err(Error::WrongBranch);
            }
            let r = (3.0 * a).sqrt();
            let (s, c) = ((r * t).sinh(), (r * t).cosh());
            Ok((a - 3.0 * a / (c * c), 6.0 * a * r * s / (c * c * c)))
        }
        _ => Err(Error::WrongBranch),
    }
}

/// (℘(t), ℘′(t)) for real t.
pub fn wp(t: f64, inv: &WeierstrassInvariants) -> Result<(f64, f64)> {
    wp_branch(t, inv, WpBranch::Real)
}

/// ℘ and ℘′ at a complex argument via the addition theorem and
/// ℘(iy; g₂, g₃) = −℘(y; g₂, −g₃), ℘′(iy; g₂, g₃) = i℘′(y; g₂, −g₃).
///
/// When ℘(x) and ℘(iy) nearly coincide the addition formula cancels; the value
/// is then taken from z/2 by the duplication formula.
pub fn wp_complex(z: Complex64, inv: &WeierstrassInvariants) -> Result<(Complex64, Complex64)> {
    wp_complex_depth(z, inv, 0)
}

fn wp_complex_depth(z: Complex64, inv: &WeierstrassInvariants, depth: u32) -> Result<(Complex64, Complex64)> {
    let (x, y) = (z.re, z.im);
    let tiny = POLE_TOL * 1e-3;
    let imag_part = |y: f64| -> Result<(Complex64, Complex64)> {
        let conj = WeierstrassInvariants::new(inv.g2, -inv.g3);
        let (p, dp) = wp(y, &conj)?;
        Ok((Complex64::new(-p, 0.0), Complex64::new(0.0, dp)))
    };
    if y.abs() < tiny {
        let (p, dp) = wp(x, inv)?;
        return Ok((Complex64::new(p, 0.0), Complex64::new(dp, 0.0)));
    }
    if x.abs() < tiny {
        return imag_part(y);
    }
    let (pu, dpu) = wp(x, inv)?;
    let (pv, dpv) = imag_part(y)?;
    let pu = Complex64::new(pu, 0.0);
    let dpu = Complex64::new(dpu, 0.0);
    let den = pu - pv;
    if den.norm() < 1e-3 * (pu.norm() + pv.norm()) {
        if depth >= 4 {
            return Err(Error::NearPole(den.norm()));
        }
        let (p, dp) = wp_complex_depth(z * 0.5, inv, depth + 1)?;
        if dp.norm() == 0.0 {
            return Err(Error::NearPole(0.0));
        }
        let ddp = p * p * 6.0 - inv.g2 / 2.0;
        let dddp = p * dp * 12.0;
        let s = ddp / dp;
        let w = s * s * 0.25 - p * 2.0;
        // d/dw of ¼(℘″/℘′)² − 2℘ at w = z/2, halved for the chain rule.
        let dw = (s * (dddp * dp - ddp * ddp) / (dp * dp) * 0.5 - dp * 2.0) * 0.5;
        return Ok((w, dw));
    }
    let s = (dpu - dpv) / den;
    let w = s * s * 0.25 - pu - pv;
    let dw = -(dpu + s * (w - pu));
    Ok((w, dw))
}
