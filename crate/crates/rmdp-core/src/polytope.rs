//! Vertex enumeration for low-dimensional polytopes `{x : A x ≤ b}`.
//!
//! The grid oracle evaluates metric-type ball memberships millions of times;
//! precomputing the vertices of the dual function polytope turns each
//! membership test into a handful of dot products.

const FEAS_TOL: f64 = 1e-9;

/// Enumerates the vertices of `{x ∈ R^dim : rows[i]·x ≤ rhs[i]}` by solving
/// all `dim`-subsets of active constraints. Intended for `dim ≤ 6` on
/// bounded polytopes.
pub fn enumerate_vertices(rows: &[Vec<f64>], rhs: &[f64], dim: usize) -> Vec<Vec<f64>> {
    let m = rows.len();
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let mut subset = vec![0usize; dim];
    enumerate_subsets(m, dim, 0, 0, &mut subset, &mut |chosen| {
        if let Some(x) = solve_square(rows, rhs, chosen, dim) {
            if is_feasible(rows, rhs, &x) && !vertices.iter().any(|v| close(v, &x)) {
                vertices.push(x);
            }
        }
    });
    vertices
}

fn enumerate_subsets(
    m: usize,
    k: usize,
    start: usize,
    depth: usize,
    buf: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if depth == k {
        visit(buf);
        return;
    }
    for i in start..m {
        buf[depth] = i;
        enumerate_subsets(m, k, i + 1, depth + 1, buf, visit);
    }
}

/// Gaussian elimination with partial pivoting on the chosen constraint rows.
fn solve_square(rows: &[Vec<f64>], rhs: &[f64], chosen: &[usize], dim: usize) -> Option<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = chosen.iter().map(|&i| rows[i].clone()).collect();
    let mut b: Vec<f64> = chosen.iter().map(|&i| rhs[i]).collect();
    for col in 0..dim {
        let pivot = (col..dim).max_by(|&p, &q| {
            a[p][col]
                .abs()
                .partial_cmp(&a[q][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..dim {
            let f = a[row][col] / a[col][col];
            for k in col..dim {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; dim];
    for row in (0..dim).rev() {
        let mut acc = b[row];
        for k in row + 1..dim {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn is_feasible(rows: &[Vec<f64>], rhs: &[f64], x: &[f64]) -> bool {
    rows.iter().zip(rhs).all(|(row, &b)| {
        row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() <= b + FEAS_TOL
    })
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
}
