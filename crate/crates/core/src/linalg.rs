//! Exact integer and rational linear algebra: Hermite/Smith normal forms,
//! determinants, membership solves. Everything here works on small dense
//! matrices (rank <= 10), so clarity beats asymptotics.

use num_rational::Ratio;
use num_traits::Zero;

pub type Rat = Ratio<i64>;

pub fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(n, d)
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Row Hermite normal form with positive pivots, computed over i128 to avoid
/// intermediate overflow. Returns the nonzero rows (rank many), in echelon
/// order with pivot columns strictly increasing and entries above each pivot
/// reduced to `0 <= x < pivot`.
pub fn hnf(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut pivot_row = 0usize;
    for col in 0..ncols {
        // Euclidean elimination in this column below pivot_row.
        loop {
            let mut idx: Option<usize> = None;
            let mut best: i128 = 0;
            for (i, row) in m.iter().enumerate().skip(pivot_row) {
                let v = row[col].abs();
                if v != 0 && (idx.is_none() || v < best) {
                    idx = Some(i);
                    best = v;
                }
            }
            let Some(i) = idx else { break };
            m.swap(pivot_row, i);
            let p = m[pivot_row][col];
            let mut done = true;
            for i in (pivot_row + 1)..m.len() {
                let q = div_floor_i128(m[i][col], p);
                if q != 0 {
                    for c in 0..ncols {
                        m[i][c] -= q * m[pivot_row][c];
                    }
                }
                if m[i][col] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m.get(pivot_row).map(|r| r[col] != 0) == Some(true) {
            if m[pivot_row][col] < 0 {
                for c in 0..ncols {
                    m[pivot_row][c] = -m[pivot_row][c];
                }
            }
            let p = m[pivot_row][col];
            for i in 0..pivot_row {
                let q = div_floor_i128(m[i][col], p);
                if q != 0 {
                    for c in 0..ncols {
                        m[i][c] -= q * m[pivot_row][c];
                    }
                }
            }
            pivot_row += 1;
        }
    }
    m.truncate(pivot_row);
    m.iter()
        .map(|r| r.iter().map(|&x| i128_to_i64(x)).collect())
        .collect()
}

fn div_floor_i128(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn i128_to_i64(x: i128) -> i64 {
    i64::try_from(x).expect("HNF entry exceeds i64")
}

/// Solve x * basis = target over the integers where `basis` is in row HNF.
/// Returns the coefficient vector when target lies in the lattice.
pub fn hnf_solve(basis: &[Vec<i64>], target: &[i64]) -> Option<Vec<i64>> {
    let mut rem: Vec<i128> = target.iter().map(|&x| x as i128).collect();
    let mut coeffs = vec![0i64; basis.len()];
    for (i, row) in basis.iter().enumerate() {
        let pivot_col = row.iter().position(|&x| x != 0)?;
        // Columns before this pivot must already be cleared.
        let val = rem[pivot_col];
        let p = row[pivot_col] as i128;
        if val % p != 0 {
            return None;
        }
        let q = val / p;
        coeffs[i] = i128_to_i64(q);
        for c in 0..rem.len() {
            rem[c] -= q * row[c] as i128;
        }
    }
    if rem.iter().all(|&x| x == 0) {
        Some(coeffs)
    } else {
        None
    }
}

/// Determinant of a square integer matrix via fraction-free (Bareiss)
/// elimination over i128.
pub fn det_i64(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Determinant of a square rational matrix (fraction arithmetic).
pub fn det_rat(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    if n == 0 {
        return Rat::from_integer(1);
    }
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let mut det = Rat::from_integer(1);
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Rat::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        let inv = a[k][k];
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k] / inv;
            for j in k..n {
                let sub = f * a[k][j];
                a[i][j] -= sub;
            }
        }
    }
    det
}

/// Smith normal form diagonal (invariant factors) of an integer matrix.
pub fn snf_diagonal(m: &[Vec<i64>]) -> Vec<i64> {
    if m.is_empty() {
        return Vec::new();
    }
    let rows = m.len();
    let cols = m[0].len();
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut t = 0usize;
    let dim = rows.min(cols);
    while t < dim {
        // Find a nonzero entry in the remaining block.
        let mut found = None;
        'outer: for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0 {
                    found = Some((i, j));
                    break 'outer;
                }
            }
        }
        let Some((pi, pj)) = found else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t] != 0 {
                    let q = a[i][t] / a[t][t];
                    for j in t..cols {
                        a[i][j] -= q * a[t][j];
                    }
                    if a[i][t] != 0 {
                        a.swap(t, i);
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if a[t][j] != 0 {
                    let q = a[t][j] / a[t][t];
                    for row in a.iter_mut().take(rows).skip(t) {
                        row[j] -= q * row[t];
                    }
                    if a[t][j] != 0 {
                        for row in a.iter_mut() {
                            row.swap(t, j);
                        }
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        t += 1;
    }
    let mut d: Vec<i128> = (0..t).map(|i| a[i][i].abs()).collect();
    // Enforce divisibility chain.
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..d.len().saturating_sub(1) {
            if d[i + 1] % d[i] != 0 {
                let g = gcd_i128(d[i], d[i + 1]);
                let l = d[i] / g * d[i + 1];
                d[i] = g;
                d[i + 1] = l;
                changed = true;
            }
        }
    }
    d.iter().map(|&x| i128_to_i64(x)).collect()
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Rank of a rational matrix.
pub fn rank_rat(m: &[Vec<Rat>]) -> usize {
    if m.is_empty() {
        return 0;
    }
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let cols = a[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let inv = a[rank][col];
        for i in 0..a.len() {
            if i != rank && !a[i][col].is_zero() {
                let f = a[i][col] / inv;
                for j in col..cols {
                    let sub = f * a[rank][j];
                    a[i][j] -= sub;
                }
            }
        }
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    rank
}

/// Gram/Cartan pairing helpers over a rational symmetric form.
pub fn form_ip(form: &[Vec<Rat>], u: &[i64], v: &[i64]) -> Rat {
    let mut acc = Rat::zero();
    for (i, &ui) in u.iter().enumerate() {
        if ui == 0 {
            continue;
        }
        for (j, &vj) in v.iter().enumerate() {
            if vj == 0 {
                continue;
            }
            acc += form[i][j] * Rat::from_integer(ui) * Rat::from_integer(vj);
        }
    }
    acc
}

pub fn form_ip_rat(form: &[Vec<Rat>], u: &[Rat], v: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for (i, &ui) in u.iter().enumerate() {
        if ui.is_zero() {
            continue;
        }
        for (j, &vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            acc += form[i][j] * ui * vj;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_of_identity_is_identity() {
        let id = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(hnf(&id), id);
    }

    #[test]
    fn hnf_canonicalizes_redundant_generators() {
        let rows = vec![vec![2, 0], vec![0, 2], vec![1, 1]];
        let h = hnf(&rows);
        assert_eq!(h, vec![vec![1, 1], vec![0, 2]]);
        // index of this lattice in Z^2 is 2
        let d: i128 = h.iter().enumerate().map(|(i, r)| r[i] as i128).product();
        assert_eq!(d, 2);
    }

    #[test]
    fn solve_detects_membership() {
        let h = hnf(&[vec![1, 1], vec![0, 2]]);
        assert!(hnf_solve(&h, &[1, 3]).is_some());
        assert!(hnf_solve(&h, &[0, 1]).is_none());
    }

    #[test]
    fn snf_invariant_factors() {
        let d = snf_diagonal(&[vec![2, 0], vec![0, 4]]);
        assert_eq!(d, vec![2, 4]);
        let d = snf_diagonal(&[vec![2, 4], vec![4, 2]]);
        assert_eq!(d, vec![2, 6]);
    }

    #[test]
    fn bareiss_determinant() {
        assert_eq!(det_i64(&[vec![2, -1], vec![-1, 2]]), 3);
        assert_eq!(det_i64(&[vec![2, -2], vec![-2, 2]]), 0);
        assert_eq!(det_i64(&[vec![2, -3], vec![-3, 2]]), -5);
    }
}
