use num_complex::Complex64;

use super::OracleReport;
use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// `‖u‖_{L^q_t L^r_x} / ‖u(t₀)‖_{L²}` over the sampled window, with the
/// time integral by the trapezoid rule. `r = ∞` is allowed.
pub fn strichartz_ratio(times: &[f64], states: &[GridFunction<Complex64>], q: f64, r: f64) -> Result<f64> {
    let d = states.first().map(|s| s.grid().dim()).unwrap_or(1);
    check_admissible(q, r, d)?;
    if times.len() != states.len() || times.len() < 2 {
        return Err(Error::InvalidParameter("need at least two snapshots with matching times".into()));
    }
    let lr = |u: &GridFunction<Complex64>| -> f64 {
        if r.is_infinite() {
            u.sup_norm()
        } else {
            let vol = u.grid().cell_volume();
            libm::pow(u.data().iter().map(|v| libm::pow(v.norm(), r)).sum::<f64>() * vol, 1.0 / r)
        }
    };
    let l2 = states[0].l2_norm();
    if l2 == 0.0 {
        return Ok(0.0);
    }
    if q.is_infinite() {
        return Ok(states.iter().map(lr).fold(0.0, f64::max) / l2);
    }
    let f: alloc::vec::Vec<f64> = states.iter().map(|u| libm::pow(lr(u), q)).collect();
    let integral: f64 = times.windows(2).zip(f.windows(2)).map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1])).sum();
    Ok(libm::pow(integral, 1.0 / q) / l2)
}

/// Compares the ratios of a refinement sweep (coarse first); passes when
/// every ratio is within `tol` relative of the finest one.
pub fn strichartz_diagnostic(ratios: &[f64], tol: f64) -> OracleReport {
    let finest = *ratios.last().unwrap_or(&0.0);
    let coarsest = *ratios.first().unwrap_or(&0.0);
    let spread = ratios.iter().map(|&v| (v - finest).abs()).fold(0.0, f64::max);
    let mut report = OracleReport::scalar("strichartz-ratio", coarsest, finest, tol);
    report.abs_discrepancy = spread;
    report.rel_discrepancy = if finest > 0.0 { spread / finest } else { spread };
    report.pass = report.rel_discrepancy <= tol;
    report
}

fn check_admissible(q: f64, r: f64, d: usize) -> Result<()> {
    let bad = || Err(Error::InadmissiblePair { q, r, d });
    if !(q >= 2.0) || !(r >= 2.0) {
        return bad();
    }
    let inv_r = if r.is_infinite() { 0.0 } else { 1.0 / r };
    if (1.0 / q - 0.5 * d as f64 * (0.5 - inv_r)).abs() > 1e-12 {
        return bad();
    }
    if q == 2.0 && r.is_infinite() && d == 2 {
        return bad();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn admissibility() {
        assert!(check_admissible(8.0, 4.0, 1).is_ok());
        assert!(check_admissible(4.0, f64::INFINITY, 1).is_ok());
        assert!(check_admissible(f64::INFINITY, 2.0, 1).is_ok());
        assert!(check_admissible(2.0, f64::INFINITY, 2).is_err());
        assert!(check_admissible(4.0, 4.0, 1).is_err());
    }

    #[test]
    fn zero_data_and_unitary_endpoint() {
        let g = GridSpec::line(16, 4.0).unwrap();
        let z = GridFunction::<Complex64>::zeros(g);
        assert_eq!(strichartz_ratio(&[0.0, 1.0], &[z.clone(), z], 8.0, 4.0).unwrap(), 0.0);
        let u = GridFunction::from_fn(g, |x| Complex64::new(libm::exp(-x[0] * x[0]), 0.0));
        let ratio = strichartz_ratio(&[0.0, 1.0, 2.0], &[u.clone(), u.clone(), u], f64::INFINITY, 2.0).unwrap();
        assert!((ratio - 1.0).abs() < 1e-15);
    }
}
