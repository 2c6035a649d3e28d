//! The `solve`, `portrait` and `classify` pipelines.

use std::path::Path;

use nullcurve::dynamics::{integrate_extremal_with, phase_embed, IntegrateOptions, Trajectory};
use nullcurve::e21::{casimirs, CoalgebraElement, GroupElement};
use nullcurve::elliptic::{
    invariants_from_casimirs, portrait_invariants, wp_branch, ClosedFormPath, CubicCase, WeierstrassInvariants,
    WpBranch,
};
use nullcurve::mink3::MinkVector;
use nullcurve::reduce::{
    align_left, classification_tol, classify_orbit, cross_section, quadrature_extremal, standard_form,
};
use serde::Serialize;

use crate::config::{Initial, Method, RunConfig};
use crate::error::{LabError, LabResult};
use crate::output::{csv_row, to_json, trajectory_csv, write_file};
use crate::svg::{Plot, Series, Style};

/// Isotropy-projection tolerance of the quadrature pipeline.
pub const QUADRATURE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftReport {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub charpoly: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupFiber {
    pub group: f64,
    pub fiber: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureReport {
    pub orbit_kind: String,
    pub recipe: String,
    pub max_isotropy_residual: f64,
    pub isotropy_drift: f64,
}

/// Contents of invariants.json.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Invariants {
    pub m: f64,
    pub initial: Initial,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub tol: f64,
    pub method: Method,
    pub samples: usize,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub orbit_class: String,
    pub g2_true_time: f64,
    pub g3_true_time: f64,
    pub g2_portrait: f64,
    pub g3_portrait: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub cubic_case: String,
    pub branch: String,
    pub max_drift: DriftReport,
    pub characteristic_residual: GroupFiber,
    pub first_integral_residual: f64,
    pub third_order_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureReport>,
    /// method = both: sup deviation after aligning by one left translation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paths_deviation: Option<GroupFiber>,
}

pub fn case_label(c: CubicCase) -> &'static str {
    match c {
        CubicCase::OneReal => "one_real_root",
        CubicCase::ThreeReal => "three_real_roots",
        CubicCase::Degenerate => "degenerate",
    }
}

pub fn run_direct(cfg: &RunConfig) -> LabResult<Trajectory> {
    let opts = IntegrateOptions { tol: cfg.tol, dt_out: cfg.dt_max, dt_max: cfg.dt_max, ..IntegrateOptions::new(cfg.tol) };
    Ok(integrate_extremal_with(&cfg.state(), &cfg.g0(), cfg.t_end, &opts)?)
}

/// Runs the configured method(s) and returns the summary together with the
/// trajectory written to trajectory.csv (the direct one when both run).
pub fn solve(cfg: &RunConfig) -> LabResult<(Invariants, Trajectory)> {
    let s0 = cfg.state();
    let eta0 = phase_embed(&s0);
    let (c1, c2) = casimirs(&eta0);
    let cls = classify_orbit(&eta0, classification_tol(&eta0));
    let (portrait, true_time) = invariants_from_casimirs(cfg.m, c1, c2);
    let branch = ClosedFormPath::from_state(&s0).map(|p| p.branch.label()).unwrap_or("unavailable");

    let direct = match cfg.method {
        Method::Direct | Method::Both => Some(run_direct(cfg)?),
        Method::Quadrature => None,
    };
    let quad = match cfg.method {
        Method::Quadrature | Method::Both => {
            Some(quadrature_extremal(&s0, &cfg.g0(), cfg.t_end, cfg.dt_max, QUADRATURE_TOL)?)
        }
        Method::Direct => None,
    };
    let paths_deviation = match (&direct, &quad) {
        (Some(d), Some(q)) => {
            let al = align_left(d, &q.trajectory)?;
            Some(GroupFiber { group: al.group, fiber: al.fiber })
        }
        _ => None,
    };
    let quadrature = quad.as_ref().map(|q| QuadratureReport {
        orbit_kind: q.kind.label().to_string(),
        recipe: format!("{:?}", q.recipe),
        max_isotropy_residual: q.max_isotropy_residual,
        isotropy_drift: q.isotropy_drift,
    });
    let traj = match (direct, quad) {
        (Some(d), _) => d,
        (None, Some(q)) => q.trajectory,
        (None, None) => unreachable!("every method runs at least one path"),
    };
    let drift = traj.drift();
    let (rg, rf) = traj.characteristic_residual();
    let inv = Invariants {
        m: cfg.m,
        initial: cfg.initial,
        t_end: cfg.t_end,
        tol: cfg.tol,
        method: cfg.method,
        samples: traj.len(),
        c1,
        c2,
        orbit_class: cls.kind.label().to_string(),
        g2_true_time: true_time.g2,
        g3_true_time: true_time.g3,
        g2_portrait: portrait.g2,
        g3_portrait: portrait.g3,
        d: true_time.d,
        cubic_case: case_label(true_time.case).to_string(),
        branch: branch.to_string(),
        max_drift: DriftReport { c1: drift.c1, c2: drift.c2, j: drift.j, charpoly: drift.charpoly },
        characteristic_residual: GroupFiber { group: rg, fiber: rf },
        first_integral_residual: traj.first_integral_residual(),
        third_order_residual: traj.third_order_residual(),
        quadrature,
        paths_deviation,
    };
    Ok((inv, traj))
}

fn curve_plot(traj: &Trajectory) -> Plot {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let pts = traj.samples.iter().map(|s| {
        let a = s.alpha();
        (r * (a.x1 - a.x3), a.x2)
    });
    Plot {
        title: "Null curve, spatial projection".into(),
        x_label: "(alpha1 - alpha3)/sqrt2".into(),
        y_label: "alpha2".into(),
        notes: vec![],
        series: vec![Series { label: "alpha(t)".into(), color: "#1f77b4", style: Style::Line, pieces: vec![pts.collect()] }],
    }
}

fn state_portrait_plot(traj: &Trajectory, inv: &Invariants) -> Plot {
    let pts = traj.samples.iter().map(|s| (s.state.k, s.state.l4)).collect();
    Plot {
        title: "Phase portrait along the run".into(),
        x_label: "k".into(),
        y_label: "lambda4".into(),
        notes: vec![format!("C1 = {:.6}, C2 = {:.6}, branch {}", inv.c1, inv.c2, inv.branch)],
        series: vec![Series { label: "(k, lambda4)".into(), color: "#d62728", style: Style::Line, pieces: vec![pts] }],
    }
}

pub fn cmd_solve(cfg: &RunConfig) -> LabResult<Invariants> {
    let (inv, traj) = solve(cfg)?;
    let dir = cfg.outputs.as_path();
    write_file(dir, "trajectory.csv", &trajectory_csv(&traj))?;
    write_file(dir, "invariants.json", &to_json(&inv))?;
    write_file(dir, "curve.svg", &curve_plot(&traj).render())?;
    write_file(dir, "portrait.svg", &state_portrait_plot(&traj, &inv).render())?;
    Ok(inv)
}

/// One sampled real component of the portrait.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortraitComponent {
    pub name: String,
    #[serde(skip)]
    pub samples: Vec<(f64, f64, f64)>,
    pub count: usize,
    pub max_level_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortraitSummary {
    pub m: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub g2: f64,
    pub g3: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub cubic_case: String,
    pub components: Vec<PortraitComponent>,
}

/// Relative residual of λ₄² = 4χ³ − ĝ₂χ − ĝ₃.
pub fn level_residual(g2: f64, g3: f64, chi: f64, l4: f64) -> f64 {
    let rhs = 4.0 * chi * chi * chi - g2 * chi - g3;
    (l4 * l4 - rhs).abs() / (1.0 + (4.0 * chi * chi * chi).abs() + (g2 * chi).abs() + g3.abs())
}

const PORTRAIT_SAMPLES: usize = 2000;

fn sample_branch(
    inv: &WeierstrassInvariants,
    branch: WpBranch,
    s_range: (f64, f64),
    chi_max: f64,
) -> Vec<(f64, f64, f64)> {
    let n = PORTRAIT_SAMPLES;
    (0..=n)
        .filter_map(|i| {
            let s = s_range.0 + (s_range.1 - s_range.0) * i as f64 / n as f64;
            let (chi, l4) = wp_branch(s, inv, branch).ok()?;
            (chi.abs() <= chi_max && l4.is_finite()).then_some((s, chi, l4))
        })
        .collect()
}

/// Samples the real components of the portrait from the ℘ parametrization.
pub fn portrait(m: f64, c1: f64, c2: f64) -> LabResult<PortraitSummary> {
    if m == 0.0 || !m.is_finite() || !c1.is_finite() || !c2.is_finite() {
        return Err(LabError::Usage("m must be nonzero and all inputs finite".into()));
    }
    let (g2, g3) = portrait_invariants(m, c1, c2);
    let inv = WeierstrassInvariants::new(g2, g3);
    let root_scale = inv.roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let chi_max = 3.0 * (1.0 + root_scale);
    let mut comps: Vec<(String, Vec<(f64, f64, f64)>)> = Vec::new();
    let mut both_halves = |name: &str, v: Vec<(f64, f64, f64)>| {
        let mut full: Vec<(f64, f64, f64)> = v.iter().rev().map(|(s, c, l)| (-s, *c, -l)).collect();
        full.extend(v);
        comps.push((name.to_string(), full));
    };
    match inv.case {
        CubicCase::ThreeReal => {
            let p = 2.0 * inv.omega1.expect("three real roots have a real period");
            comps.push(("compact".into(), sample_branch(&inv, WpBranch::Shifted, (0.0, p), f64::INFINITY)));
            comps.push(("unbounded".into(), sample_branch(&inv, WpBranch::Real, (0.0, p), chi_max)));
        }
        CubicCase::OneReal => {
            let p = 2.0 * inv.omega1.expect("one real root has a real period");
            comps.push(("single".into(), sample_branch(&inv, WpBranch::Real, (0.0, p), chi_max)));
        }
        CubicCase::Degenerate => {
            let a = inv.roots[0].re;
            match inv.omega1 {
                Some(w) => {
                    comps.push(("degenerate".into(), sample_branch(&inv, WpBranch::Real, (0.0, 2.0 * w), chi_max)));
                    comps.push(("degenerate_isolated_point".into(), vec![(0.0, a, 0.0)]));
                }
                None => {
                    let span = 40.0 / (1.0 + root_scale).sqrt();
                    both_halves("degenerate", sample_branch(&inv, WpBranch::Real, (0.0, span), chi_max));
                    if a > 0.0 {
                        comps.push((
                            "degenerate_homoclinic".into(),
                            sample_branch(&inv, WpBranch::Homoclinic, (-span, span), f64::INFINITY),
                        ));
                    }
                }
            }
        }
    }
    let components = comps
        .into_iter()
        .map(|(name, samples)| {
            let max_level_residual =
                samples.iter().map(|(_, c, l)| level_residual(g2, g3, *c, *l)).fold(0.0, f64::max);
            PortraitComponent { name, count: samples.len(), samples, max_level_residual }
        })
        .collect();
    Ok(PortraitSummary { m, c1, c2, g2, g3, d: inv.d, cubic_case: case_label(inv.case).into(), components })
}

fn portrait_plot(sum: &PortraitSummary) -> Plot {
    let colors = ["#1f77b4", "#2ca02c", "#9467bd"];
    let mut series: Vec<Series> = sum
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| Series {
            label: format!("{} (wp samples)", c.name),
            color: colors[i % colors.len()],
            style: if c.samples.len() == 1 { Style::Dots } else { Style::Line },
            pieces: vec![c.samples.iter().map(|(_, x, y)| (*x, *y)).collect()],
        })
        .collect();
    let (lo, hi) = sum
        .components
        .iter()
        .flat_map(|c| c.samples.iter().map(|s| s.1))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let mut level = Vec::new();
    if lo.is_finite() {
        let n = 600;
        for i in 0..=n {
            let chi = lo + (hi - lo) * i as f64 / n as f64;
            let f = 4.0 * chi * chi * chi - sum.g2 * chi - sum.g3;
            if f >= 0.0 {
                level.push((chi, f.sqrt()));
                level.push((chi, -f.sqrt()));
            }
        }
    }
    series.push(Series {
        label: "level set by resubstitution".into(),
        color: "#ff7f0e",
        style: Style::Dots,
        pieces: vec![level],
    });
    Plot {
        title: format!("Phase portrait, m = {}, C1 = {}, C2 = {}", sum.m, sum.c1, sum.c2),
        x_label: "chi".into(),
        y_label: "lambda4".into(),
        notes: vec![
            format!("D = {:.6e} ({})", sum.d, sum.cubic_case),
            format!("{} component(s)", sum.components.iter().filter(|c| c.count > 1).count()),
        ],
        series,
    }
}

pub fn cmd_portrait(m: f64, c1: f64, c2: f64, out: &Path) -> LabResult<PortraitSummary> {
    let sum = portrait(m, c1, c2)?;
    let mut csv = String::from("component,s,chi,l4\n");
    for c in &sum.components {
        for (s, chi, l4) in &c.samples {
            csv.push_str(&format!("{},{}\n", c.name, csv_row(&[*s, *chi, *l4])));
        }
    }
    write_file(out, "portrait.csv", &csv)?;
    write_file(out, "portrait.svg", &portrait_plot(&sum).render())?;
    Ok(sum)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionJson {
    pub q: [f64; 3],
    pub a: [[f64; 3]; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub kind: String,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standard_form: Option<CoalgebraJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub section: Option<SectionJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoalgebraJson {
    pub p: [f64; 3],
    pub v: [f64; 3],
}

fn group_json(g: &GroupElement) -> SectionJson {
    SectionJson { q: g.q.to_array(), a: std::array::from_fn(|i| std::array::from_fn(|j| g.a[(i, j)])) }
}

pub fn cmd_classify(p: [f64; 3], v: [f64; 3]) -> LabResult<Classification> {
    let eta = CoalgebraElement::new(MinkVector::from_array(p), MinkVector::from_array(v));
    if !eta.to_array().iter().all(|x| x.is_finite()) {
        return Err(LabError::Usage("components must be finite".into()));
    }
    let cls = classify_orbit(&eta, classification_tol(&eta));
    let standard = standard_form(&cls).ok();
    let section = cross_section(&eta).ok();
    Ok(Classification {
        kind: cls.kind.label().into(),
        c1: cls.c1,
        c2: cls.c2,
        standard_form: standard.map(|s| CoalgebraJson { p: s.p.to_array(), v: s.v.to_array() }),
        section: section.map(|s| group_json(&s.g)),
    })
}
