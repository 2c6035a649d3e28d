//! Complete elliptic integral K and the Jacobi functions sn, cn, dn for a
//! parameter 0 ≤ m ≤ 1, by the arithmetic–geometric mean.

use core::f64::consts::FRAC_PI_2;

#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a.abs() {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    0.5 * (a + b)
}

/// K(m) = π / (2·AGM(1, √(1−m))), parameter m = k² ∈ [0, 1).
pub fn ellipk(m: f64) -> f64 {
    FRAC_PI_2 / agm(1.0, (1.0 - m).sqrt())
}

/// (sn, cn, dn)(u | m) by descending Landen transformation (AGM scale).
pub fn sncndn(u: f64, m: f64) -> (f64, f64, f64) {
    if m <= 0.0 {
        return (u.sin(), u.cos(), 1.0);
    }
    if m >= 1.0 {
        let s = 1.0 / u.cosh();
        return (u.tanh(), s, s);
    }
    // Reduce u modulo the real period 4K of sn and cn.
    let k = ellipk(m);
    let four_k = 4.0 * k;
    let u = u - four_k * (u / four_k).round();

    let mut a = [0.0f64; 32];
    let mut c = [0.0f64; 32];
    a[0] = 1.0;
    let mut b = (1.0 - m).sqrt();
    c[0] = m.sqrt();
    let mut n = 0;
    while n < 31 && c[n].abs() > 1e-17 {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] * phi.sin() / a[j]).asin());
    }
    let (sn, cn) = (phi.sin(), phi.cos());
    // 1 − m·sn² written without cancellation near sn = ±1.
    let dn = ((1.0 - m) + m * cn * cn).sqrt();
    (sn, cn, dn)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_reference_values() {
        assert!((ellipk(0.0) - FRAC_PI_2).abs() < 1e-15);
        // K(1/2) = Γ(1/4)² / (4√π)
        assert!((ellipk(0.5) - 1.854_074_677_301_372).abs() < 1e-14);
        assert!((ellipk(0.9) - 2.578_092_113_348_173).abs() < 1e-13);
    }

    #[test]
    fn jacobi_identities() {
        for &m in &[0.0, 1e-9, 0.1, 0.5, 0.9, 0.999_999, 1.0] {
            for i in 0..50 {
                let u = -7.0 + 0.29 * i as f64;
                let (sn, cn, dn) = sncndn(u, m);
                assert!((sn * sn + cn * cn - 1.0).abs() < 1e-14, "m={m} u={u}");
                assert!((dn * dn + m * sn * sn - 1.0).abs() < 1e-13, "m={m} u={u}");
            }
        }
        let k = ellipk(0.7);
        let (sn, cn, dn) = sncndn(k, 0.7);
        assert!((sn - 1.0).abs() < 1e-14 && cn.abs() < 1e-14 && (dn - 0.3f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn derivative_of_sn() {
        let (m, u, h) = (0.6, 0.83, 1e-5);
        let d = (sncndn(u + h, m).0 - sncndn(u - h, m).0) / (2.0 * h);
        let (_, cn, dn) = sncndn(u, m);
        assert!((d - cn * dn).abs() < 1e-9);
    }
}
