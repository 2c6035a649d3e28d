//! Integration kernels: one Dormand–Prince 5(4) step with its continuous
//! extension, and the fourth-order commutator-free step for g′ = g·X(t).

#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::e21::{exp_algebra, AlgebraElement, GroupElement};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Result of one Dormand–Prince step from (t, y) with step h.
#[derive(Debug, Clone, Copy)]
pub struct DpStep<const N: usize> {
    pub h: f64,
    pub y_new: [f64; N],
    /// Derivative at the new point (first stage of the next step).
    pub f_new: [f64; N],
    /// Embedded error estimate y₅ − y₄.
    pub err: [f64; N],
    rcont: [[f64; N]; 5],
}

impl<const N: usize> DpStep<N> {
    /// Fourth-order dense output at t + θh, θ ∈ [0, 1].
    pub fn interpolate(&self, theta: f64) -> [f64; N] {
        let r = &self.rcont;
        let th1 = 1.0 - theta;
        core::array::from_fn(|i| {
            r[0][i] + theta * (r[1][i] + th1 * (r[2][i] + theta * (r[3][i] + th1 * r[4][i])))
        })
    }

    /// Max-norm of the scaled error: max |errᵢ| / (atol + rtol·max(|yᵢ|, |y_newᵢ|)).
    pub fn error_norm(&self, y: &[f64; N], atol: f64, rtol: f64) -> f64 {
        (0..N)
            .map(|i| {
                let sc = atol + rtol * y[i].abs().max(self.y_new[i].abs());
                self.err[i].abs() / sc
            })
            .fold(0.0, f64::max)
    }
}

fn comb<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    core::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

/// One Dormand–Prince 5(4) step; `f0` is f(t, y).
pub fn dopri5_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], f0: &[f64; N], h: f64) -> DpStep<N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = *f0;
    let k2 = f(t + C2 * h, &comb(y, h, &[(A21, &k1)]));
    let k3 = f(t + C3 * h, &comb(y, h, &[(A31, &k1), (A32, &k2)]));
    let k4 = f(t + C4 * h, &comb(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(t + C5 * h, &comb(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = f(
        t + h,
        &comb(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y_new = comb(y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = f(t + h, &y_new);
    let err = core::array::from_fn(|i| {
        h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
    });
    let mut rcont = [[0.0; N]; 5];
    for i in 0..N {
        let dy = y_new[i] - y[i];
        let bspl = h * k1[i] - dy;
        rcont[0][i] = y[i];
        rcont[1][i] = dy;
        rcont[2][i] = bspl;
        rcont[3][i] = dy - h * k7[i] - bspl;
        rcont[4][i] = h
            * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    DpStep { h, y_new, f_new: k7, err, rcont }
}

/// Step-size factor from a scaled error norm (order-5 controller).
pub fn step_factor(err: f64) -> f64 {
    if err == 0.0 {
        5.0
    } else {
        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
    }
}

/// Gauss–Legendre nodes on [0, 1] for the two-stage Lie-group step.
pub const GAUSS2: [f64; 2] = [0.5 - 0.288_675_134_594_812_9, 0.5 + 0.288_675_134_594_812_9];

/// Fourth-order commutator-free step for g′ = g·X(t):
/// g·exp(h(α₁X₁ + α₂X₂))·exp(h(α₂X₁ + α₁X₂)) with Xᵢ at the Gauss nodes.
pub fn cf4_step(g: &GroupElement, h: f64, x1: &AlgebraElement, x2: &AlgebraElement) -> GroupElement {
    let s = 3.0.sqrt() / 6.0;
    let (a1, a2) = (0.25 + s, 0.25 - s);
    let first = x1.scale(a1).add(&x2.scale(a2));
    let second = x1.scale(a2).add(&x2.scale(a1));
    g.compose(&exp_algebra(&first, h)).compose(&exp_algebra(&second, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mink3::MinkVector;

    #[test]
    fn dense_output_is_fourth_order() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let y0 = [1.0, 0.0];
        let worst = |h: f64| {
            let st = dopri5_step(&f, 0.0, &y0, &f(0.0, &y0), h);
            (0..=10)
                .map(|i| {
                    let th = i as f64 / 10.0;
                    let y = st.interpolate(th);
                    (y[0] - (th * h).cos()).abs().max((y[1] + (th * h).sin()).abs())
                })
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (worst(0.2), worst(0.1));
        assert!(e2 < 1e-8);
        assert!((e1 / e2).log2() > 4.5, "{e1:e} {e2:e}");
    }

    fn ref_solution(t_end: f64) -> GroupElement {
        // g′ = g·H(k(t)) with k(t) = sin t, fine classical RK4 on the 4×4 matrix.
        use crate::e21::AlgebraElement as A;
        let hm = |t: f64| A::new(MinkVector::E1, 0.0, 1.0, t.sin()).to_matrix4();
        let n = 20000;
        let dt = t_end / n as f64;
        let mut g = GroupElement::identity().to_matrix4();
        for i in 0..n {
            let t = i as f64 * dt;
            let k1 = g * hm(t);
            let k2 = (g + k1 * (dt / 2.0)) * hm(t + dt / 2.0);
            let k3 = (g + k2 * (dt / 2.0)) * hm(t + dt / 2.0);
            let k4 = (g + k3 * dt) * hm(t + dt);
            g += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        }
        GroupElement::from_matrix4(&g)
    }

    #[test]
    fn cf4_is_fourth_order() {
        let t_end = 2.0;
        let reference = ref_solution(t_end);
        let run = |n: usize| {
            let h = t_end / n as f64;
            let mut g = GroupElement::identity();
            for i in 0..n {
                let t = i as f64 * h;
                let x = |c: f64| AlgebraElement::new(MinkVector::E1, 0.0, 1.0, (t + c * h).sin());
                g = cf4_step(&g, h, &x(GAUSS2[0]), &x(GAUSS2[1]));
            }
            g.distance(&reference)
        };
        let (e1, e2) = (run(20), run(40));
        let order = (e1 / e2).log2();
        assert!(order > 3.7, "observed order {order}, errors {e1:e} {e2:e}");
    }
}
