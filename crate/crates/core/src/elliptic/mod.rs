//! Weierstrass ℘ toolkit and the closed-form extremals.
//!
//! Along an extremal, h = ¼(k − 1/(3m)) solves (h′)² = 4h³ − g₂ʰh − g₃ʰ in true
//! flow time, so k(t) = 4℘(t − t₀; g₂ʰ, g₃ʰ) + 1/(3m). The portrait variable
//! χ = (m/4)^{2/3}(k − 1/(3m)) satisfies λ₄² = 4χ³ − ĝ₂χ − ĝ₃ instead.

mod closed_form;
pub mod jacobi;
mod weierstrass;

pub use closed_form::{closed_form_state, Branch, ClosedFormPath};
pub use weierstrass::{
    cubic_analysis, wp, wp_branch, wp_complex, CubicCase, WeierstrassInvariants, WpBranch,
    DEGENERATE_TOL, POLE_TOL,
};

#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

/// σ = (4/m)^{2/3}, the factor in k = σχ + 1/(3m).
pub fn sigma(m: f64) -> f64 {
    let c = (4.0 / m).cbrt();
    c * c
}

/// Portrait (χ-form) invariants (ĝ₂, ĝ₃).
pub fn portrait_invariants(m: f64, c1: f64, c2: f64) -> (f64, f64) {
    (sigma(m) * (1.0 / 3.0 + c2), -(c1 + 2.0 * c2 / (3.0 * m) + 4.0 / (27.0 * m)))
}

/// True-time (h-form) invariants (g₂ʰ, g₃ʰ).
pub fn true_time_invariants(m: f64, c1: f64, c2: f64) -> (f64, f64) {
    ((c2 + 1.0 / 3.0) / (m * m), -(m * c1 / 4.0 + c2 / 6.0 + 1.0 / 27.0) / (m * m * m))
}

/// Returns (portrait, true_time) invariant sets.
pub fn invariants_from_casimirs(
    m: f64,
    c1: f64,
    c2: f64,
) -> (WeierstrassInvariants, WeierstrassInvariants) {
    let (pg2, pg3) = portrait_invariants(m, c1, c2);
    let (hg2, hg3) = true_time_invariants(m, c1, c2);
    (WeierstrassInvariants::new(pg2, pg3), WeierstrassInvariants::new(hg2, hg3))
}

/// χ = (m/4)^{2/3}(k − 1/(3m)).
pub fn chi_from_k(m: f64, k: f64) -> f64 {
    (k - 1.0 / (3.0 * m)) / sigma(m)
}

pub fn k_from_chi(m: f64, chi: f64) -> f64 {
    sigma(m) * chi + 1.0 / (3.0 * m)
}

/// dt/ds when the portrait is traced as (χ, λ₄) = (℘(s; ĝ₂, ĝ₃), ℘′(s; ĝ₂, ĝ₃)).
pub fn portrait_time_scale(m: f64) -> f64 {
    -0.5 * m * sigma(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_examples() {
        let (g2, g3) = true_time_invariants(1.0, 1.0, -0.25);
        assert!((g2 - 1.0 / 12.0).abs() < 1e-16);
        assert!((g3 + 53.0 / 216.0).abs() < 1e-16);
        let (pg2, pg3) = portrait_invariants(1.0, 0.0, 0.0);
        assert!((pg2 - 4f64.powf(2.0 / 3.0) / 3.0).abs() < 1e-15);
        assert!((pg3 + 4.0 / 27.0).abs() < 1e-16);
    }

    #[test]
    fn scale_relations() {
        for &(m, c1, c2) in &[(1.0, 1.0, -0.25), (-2.0, 0.3, 1.7), (0.1, -4.0, 0.2)] {
            let (p, h) = invariants_from_casimirs(m, c1, c2);
            assert!((p.g2 - m * m * sigma(m) * h.g2).abs() <= 1e-12 * p.g2.abs());
            assert!((p.g3 - 4.0 * m * m * h.g3).abs() <= 1e-12 * p.g3.abs());
        }
    }
}
