//! Geometric-mean equilibration. Row and column scales are rounded to
//! powers of two, so scaling and unscaling introduce no floating-point
//! rounding; the solved problem is exactly equivalent to the original.

use super::{LinearProgram, LpSolution};

/// Nearest power of two to 1/sqrt(min*max) of the given magnitudes;
/// 1.0 for an empty set.
fn balance(min: f64, max: f64) -> f64 {
    if max <= 0.0 || !max.is_finite() {
        return 1.0;
    }
    let g = (min * max).sqrt();
    let exp = (-g.log2()).round();
    // Clamp so pathological entries cannot push scales to inf/0.
    2f64.powi(exp.clamp(-512.0, 512.0) as i32)
}

/// Two rounds of alternating row/column geometric-mean scaling.
pub fn equilibrate(lp: &LinearProgram) -> (LinearProgram, Vec<f64>, Vec<f64>) {
    let m = lp.rows.len();
    let n = lp.num_vars;
    let mut row_scale = vec![1.0; m];
    let mut col_scale = vec![1.0; n];

    for _ in 0..2 {
        for (i, row) in lp.rows.iter().enumerate() {
            let mut min = f64::INFINITY;
            let mut max = 0.0f64;
            for &(j, a) in &row.entries {
                let v = (a * col_scale[j]).abs();
                if v > 0.0 {
                    min = min.min(v);
                    max = max.max(v);
                }
            }
            row_scale[i] = balance(min, max);
        }
        let mut col_min = vec![f64::INFINITY; n];
        let mut col_max = vec![0.0f64; n];
        for (i, row) in lp.rows.iter().enumerate() {
            for &(j, a) in &row.entries {
                let v = (a * row_scale[i]).abs();
                if v > 0.0 {
                    col_min[j] = col_min[j].min(v);
                    col_max[j] = col_max[j].max(v);
                }
            }
        }
        for j in 0..n {
            col_scale[j] = balance(col_min[j], col_max[j]);
        }
    }

    let mut scaled = lp.clone();
    for (i, row) in scaled.rows.iter_mut().enumerate() {
        for (j, a) in row.entries.iter_mut() {
            *a *= row_scale[i] * col_scale[*j];
        }
        row.rhs *= row_scale[i];
    }
    for j in 0..n {
        scaled.objective[j] *= col_scale[j];
        scaled.lower[j] /= col_scale[j];
        scaled.upper[j] /= col_scale[j];
    }
    (scaled, row_scale, col_scale)
}

/// Map a solution of the scaled problem back to the original:
/// x = C x', y = R y', reduced costs and bound duals divide by C.
pub fn unscale(sol: &mut LpSolution, row_scale: &[f64], col_scale: &[f64]) {
    for (x, &c) in sol.x.iter_mut().zip(col_scale) {
        *x *= c;
    }
    for (y, &r) in sol.row_duals.iter_mut().zip(row_scale) {
        *y *= r;
    }
    for (d, &c) in sol.reduced_costs.iter_mut().zip(col_scale) {
        *d /= c;
    }
    for (l, &c) in sol.bound_duals.iter_mut().zip(col_scale) {
        *l /= c;
    }
}
