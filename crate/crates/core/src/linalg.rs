//! Dense Gaussian elimination over GF(q).

use crate::gf::{Fe, Field};

/// Row-reduces `rows` in place to reduced row echelon form and returns the pivot columns.
pub fn rref(f: &Field, rows: &mut Vec<Vec<Fe>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = f.inv(rows[r][c]).expect("pivot is nonzero");
        for v in rows[r].iter_mut() {
            *v = f.mul(*v, inv);
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let factor = rows[i][c];
            for j in c..ncols {
                let t = f.mul(factor, rows[r][j]);
                rows[i][j] = f.sub(rows[i][j], t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank(f: &Field, rows: &[Vec<Fe>]) -> usize {
    let mut m = rows.to_vec();
    rref(f, &mut m).len()
}

/// Basis of `{v : A v = 0}` where `A` has `ncols` columns.
pub fn nullspace(f: &Field, rows: &[Vec<Fe>], ncols: usize) -> Vec<Vec<Fe>> {
    let mut m = rows.to_vec();
    let pivots = rref(f, &mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Fe::ZERO; ncols];
            v[fc] = Fe::ONE;
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = f.neg(row[fc]);
            }
            v
        })
        .collect()
}

/// Intersection of the row space of `basis` with the nullspace of `rows`,
/// returned as a basis in the ambient coordinates.
pub fn restrict_nullspace(f: &Field, basis: &[Vec<Fe>], rows: &[Vec<Fe>]) -> Vec<Vec<Fe>> {
    if basis.is_empty() {
        return Vec::new();
    }
    // coefficients c with rows * (sum c_k basis_k) = 0
    let reduced: Vec<Vec<Fe>> = rows
        .iter()
        .map(|row| {
            basis
                .iter()
                .map(|b| {
                    row.iter()
                        .zip(b)
                        .fold(Fe::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
                })
                .collect()
        })
        .collect();
    nullspace(f, &reduced, basis.len())
        .into_iter()
        .map(|c| {
            let mut v = vec![Fe::ZERO; basis[0].len()];
            for (ck, b) in c.iter().zip(basis) {
                if ck.is_zero() {
                    continue;
                }
                for (vi, &bi) in v.iter_mut().zip(b) {
                    *vi = f.add(*vi, f.mul(*ck, bi));
                }
            }
            v
        })
        .collect()
}

/// Calls `visit` on one representative of every 1-dimensional subspace of the
/// span of `basis` (coefficient vectors normalized so the first nonzero is 1).
/// Stops early when `visit` returns `true`.
pub fn for_each_projective_combination(
    f: &Field,
    basis: &[Vec<Fe>],
    mut visit: impl FnMut(&[Fe]) -> bool,
) -> bool {
    let d = basis.len();
    if d == 0 {
        return false;
    }
    let len = basis[0].len();
    let q = f.q() as u64;
    let mut v = vec![Fe::ZERO; len];
    for lead in 0..d {
        // coefficients: c_lead = 1, c_j free for j > lead, zero before
        let tail = d - lead - 1;
        let total = q.pow(tail as u32);
        for code in 0..total {
            v.iter_mut().for_each(|x| *x = Fe::ZERO);
            let mut rest = code;
            for (k, b) in basis.iter().enumerate().skip(lead) {
                let c = if k == lead {
                    Fe::ONE
                } else {
                    let c = f.elem((rest % q) as u32).expect("in range");
                    rest /= q;
                    c
                };
                if c.is_zero() {
                    continue;
                }
                for (vi, &bi) in v.iter_mut().zip(b) {
                    *vi = f.add(*vi, f.mul(c, bi));
                }
            }
            if visit(&v) {
                return true;
            }
        }
    }
    false
}
