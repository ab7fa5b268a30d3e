use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Number of arc points used by [`hausdorff_to_arc`].
pub const ARC_GRID: usize = 10_000;

fn chord(angle: f64) -> f64 {
    2.0 * (0.5 * angle.min(PI)).sin()
}

// Angular distance on the circle between two arguments.
fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % TAU;
    d.min(TAU - d)
}

/// Chordal Hausdorff distance between the points `e^{i angles}` and the arc
/// `{e^{i phi} : |phi| <= half_width}`. The direction arc-to-points is
/// sampled at [`ARC_GRID`] equally spaced arc points.
pub fn hausdorff_to_arc(angles: &[f64], half_width: f64) -> Result<f64> {
    if angles.is_empty() {
        return Err(Error::contract("Hausdorff distance of an empty point set"));
    }
    if let Some(bad) = angles.iter().find(|a| !(a.abs() <= PI)) {
        return Err(Error::contract(format!("angle {bad} outside (-pi, pi]")));
    }
    if !(half_width >= 0.0) {
        return Err(Error::domain(format!("half width {half_width} is negative")));
    }
    let hw = half_width.min(PI);
    let to_arc = angles
        .iter()
        .map(|&a| {
            if a.abs() <= hw {
                0.0
            } else {
                chord(circular_gap(a, hw).min(circular_gap(a, -hw)))
            }
        })
        .fold(0.0, f64::max);

    let mut sorted = angles.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nearest = |phi: f64| {
        let k = sorted.partition_point(|&a| a < phi);
        let mut best = f64::INFINITY;
        for idx in [k.wrapping_sub(1), k, 0, sorted.len() - 1] {
            if let Some(&a) = sorted.get(idx) {
                best = best.min(circular_gap(a, phi));
            }
        }
        chord(best)
    };
    let from_arc = (0..ARC_GRID)
        .map(|j| {
            let phi = if hw == 0.0 {
                0.0
            } else {
                -hw + 2.0 * hw * j as f64 / (ARC_GRID - 1) as f64
            };
            nearest(phi)
        })
        .fold(0.0, f64::max);
    Ok(to_arc.max(from_arc))
}

/// `max_k |a_k - b_k|` after sorting `a` by argument and pairing with `b`
/// in the given order.
pub fn sorted_coupling_distance(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::contract("coupled spectra differ in length"));
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}
