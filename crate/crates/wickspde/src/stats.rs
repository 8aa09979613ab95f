//! CSV exports of moments and pathwise trajectories.

use std::fmt::Write as _;

use wickspde_core::grid::{GridFunction, GridSpec};
use wickspde_core::hermite::hermite_fn_table;
use wickspde_core::solvers::{kpz_views, kpz::PathTrajectory, History};
use wickspde_core::Scalar;

/// Shortest round-tripping decimal.
fn num(x: f64) -> String {
    format!("{x:e}")
}

fn coords<S: Scalar>(u: &GridFunction<S>, flat: usize, out: &mut String) {
    let g = u.grid();
    let c = g.coordinates(flat);
    for x in &c[..g.dim()] {
        out.push_str(&num(*x));
        out.push(',');
    }
}

fn axis_header<S: Scalar>(u: &GridFunction<S>) -> &'static str {
    if u.grid().dim() == 2 { "x,y" } else { "x" }
}

/// `t,x[,y],mean,variance`, with `mean_re,mean_im` for complex solutions.
pub fn stats_csv<S: Scalar>(h: &History<S>) -> String {
    let complex = h.equation.is_complex();
    let mut out = String::new();
    let Some(first) = h.snapshots.first() else { return out };
    let sample = first.field.coeff_or_zero(&wickspde_core::MultiIndex::zero());
    let means = if complex { "mean_re,mean_im" } else { "mean" };
    let _ = writeln!(out, "t,{},{means},variance", axis_header(&sample));
    for s in &h.snapshots {
        let (mean, var) = s.field.mean_variance();
        for (i, (m, v)) in mean.data().iter().zip(var.data()).enumerate() {
            out.push_str(&num(s.time));
            out.push(',');
            coords(&mean, i, &mut out);
            let m = m.to_complex();
            if complex {
                let _ = writeln!(out, "{},{},{}", num(m.re), num(m.im), num(*v));
            } else {
                let _ = writeln!(out, "{},{}", num(m.re), num(*v));
            }
        }
    }
    out
}

/// `t,x[,y],h,exp_h,burgers` for every stored state of a KPZ path
/// (`burgers` is the first component of `∇h`).
pub fn kpz_csv(path: &PathTrajectory, sigma: f64) -> wickspde_core::Result<String> {
    let mut out = String::new();
    let Some(first) = path.states.first() else { return Ok(out) };
    let _ = writeln!(out, "t,{},h,exp_h,burgers", axis_header(first));
    for (t, h) in path.times.iter().zip(&path.states) {
        let views = kpz_views(h, sigma)?;
        for i in 0..h.data().len() {
            out.push_str(&num(*t));
            out.push(',');
            coords(h, i, &mut out);
            let _ = writeln!(
                out,
                "{},{},{}",
                num(h.data()[i]),
                num(views.hopf_cole.data()[i]),
                num(views.burgers[0].data()[i])
            );
        }
    }
    Ok(out)
}

/// A single real grid function as `x[,y][,t],name`.
pub fn grid_csv(u: &GridFunction<f64>, name: &str) -> String {
    let g = u.grid();
    let labels = ["x", "y", "t"];
    let mut head: Vec<&str> = (0..g.dim())
        .map(|i| if Some(i) == g.time_axis() { "t" } else { labels[i] })
        .collect();
    head.push(name);
    let mut out = head.join(",");
    out.push('\n');
    for (i, v) in u.data().iter().enumerate() {
        coords(u, i, &mut out);
        out.push_str(&num(*v));
        out.push('\n');
    }
    out
}

/// `x,zeta_1,…,zeta_n` at the nodes of a 1-D grid, in chart-free coordinates.
pub fn hermite_table_csv(grid: &GridSpec, count: usize) -> String {
    let mut out = String::from("x");
    for k in 1..=count {
        let _ = write!(out, ",zeta_{k}");
    }
    out.push('\n');
    let axis = grid.axis(0);
    for i in 0..axis.nodes {
        let x = axis.coordinate(i);
        out.push_str(&num(x));
        for v in hermite_fn_table(count, x) {
            out.push(',');
            out.push_str(&num(v));
        }
        out.push('\n');
    }
    out
}
