//! Phase-one simplex for tiny feasibility problems `A x = b, x ≥ 0`.

/// Pivot magnitudes below this count as zero.
const PIVOT_EPS: f64 = 1e-12;
/// Phase-one objectives below this count as feasible.
const FEAS_EPS: f64 = 1e-10;

/// Returns some `x ≥ 0` with `A x = b` when one exists. `a` is row-major
/// with `cols` columns; `b` must be nonnegative. Bland's rule keeps the
/// pivoting finite on degenerate problems.
pub(crate) fn feasible_point(a: &[Vec<f64>], b: &[f64], cols: usize) -> Option<Vec<f64>> {
    let rows = a.len();
    debug_assert!(b.iter().all(|&x| x >= 0.0));
    let width = cols + rows;
    // Tableau columns: structural, then one artificial per row, then rhs.
    let mut tab: Vec<Vec<f64>> = (0..rows)
        .map(|i| {
            let mut r = a[i].clone();
            r.resize(width + 1, 0.0);
            r[cols + i] = 1.0;
            r[width] = b[i];
            r
        })
        .collect();
    let mut basis: Vec<usize> = (cols..width).collect();
    // Reduced costs of the phase-one objective `Σ artificials`.
    let mut cost = vec![0.0; width + 1];
    for r in &tab {
        for j in 0..cols {
            cost[j] -= r[j];
        }
        cost[width] -= r[width];
    }

    loop {
        let Some(enter) = (0..width).find(|&j| cost[j] < -PIVOT_EPS) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for (i, r) in tab.iter().enumerate() {
            if r[enter] > PIVOT_EPS {
                let ratio = r[width] / r[enter];
                let better = match leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < best - PIVOT_EPS
                            || (ratio <= best + PIVOT_EPS && basis[i] < basis[l])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // Phase one is bounded below by zero, so some row always qualifies.
        let (l, _) = leave?;
        let p = tab[l][enter];
        for x in tab[l].iter_mut() {
            *x /= p;
        }
        let pivot_row = tab[l].clone();
        for (i, r) in tab.iter_mut().enumerate() {
            if i != l && r[enter] != 0.0 {
                let f = r[enter];
                for (x, y) in r.iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
            }
        }
        let f = cost[enter];
        for (x, y) in cost.iter_mut().zip(&pivot_row) {
            *x -= f * y;
        }
        basis[l] = enter;
    }

    if -cost[width] > FEAS_EPS {
        return None;
    }
    let mut x = vec![0.0; cols];
    for (i, &j) in basis.iter().enumerate() {
        if j < cols {
            x[j] = tab[i][width].max(0.0);
        }
    }
    Some(x)
}
