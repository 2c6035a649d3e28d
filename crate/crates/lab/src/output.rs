//! CSV and JSON emission. Numbers are written with 17 significant digits in
//! scientific notation, independent of locale.

use std::fmt::Write as _;
use std::path::Path;

use nullcurve::dynamics::Trajectory;
use serde::Serialize;

use crate::error::LabResult;

pub const TRAJECTORY_HEADER: &str = "t,k,l4,l5,C1,C2,alpha1,alpha2,alpha3,J_p1,J_p2,J_p3,J_v1,J_v2,J_v3";

/// One number in the CSV format.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_row(values: &[f64]) -> String {
    values.iter().map(|x| num(*x)).collect::<Vec<_>>().join(",")
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(traj.len() * 400);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for s in &traj.samples {
        let a = s.alpha();
        let j = s.j;
        let row = [
            s.t, s.state.k, s.state.l4, s.state.l5, s.casimirs.0, s.casimirs.1, a.x1, a.x2, a.x3, j.p.x1, j.p.x2,
            j.p.x3, j.v.x1, j.v.x2, j.v.x3,
        ];
        let _ = writeln!(out, "{}", csv_row(&row));
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> LabResult<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
        let x = 1.0 / 3.0;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }
}
