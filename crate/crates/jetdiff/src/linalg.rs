//! Exact rational linear algebra: reduced row echelon form, nullspace
//! bases and linear solves. Pivoting is fixed (first nonzero entry in
//! column order) so outputs are reproducible.

use num::{One, Zero};

use crate::poly::Q;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(rows: &mut Vec<Vec<Q>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = Q::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                for j in 0..ncols {
                    let d = &rows[r][j] * &factor;
                    rows[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub fn rank(rows: &[Vec<Q>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of {x : Ax = 0}, one vector per free column of the reduced
/// echelon form. Each basis vector is scaled so its first nonzero
/// coordinate is 1.
pub fn exact_nullspace(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let is_pivot = {
        let mut v = vec![None; ncols];
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = Some(i);
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..ncols {
        if is_pivot[free].is_some() {
            continue;
        }
        let mut v = vec![Q::zero(); ncols];
        v[free] = Q::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[row][free].clone();
        }
        // first nonzero coordinate normalized to 1
        if let Some(lead) = v.iter().find(|x| !x.is_zero()).cloned() {
            for x in v.iter_mut() {
                *x /= &lead;
            }
        }
        basis.push(v);
    }
    basis
}

/// Exact solve of Ax = b; `None` when inconsistent. Free variables are
/// set to zero, so the answer is deterministic.
pub fn solve(rows: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut aug: Vec<Vec<Q>> = rows
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1);
    if pivots.contains(&ncols) {
        return None; // a pivot in the augmented column: inconsistent
    }
    let mut x = vec![Q::zero(); ncols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row][ncols].clone();
    }
    Some(x)
}
