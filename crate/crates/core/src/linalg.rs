//! Dense stationary-distribution solvers for small row-stochastic matrices.

use crate::num::Scalar;

/// Solves `pi P = pi`, `sum(pi) = 1`.
///
/// Uses GTH state reduction, which never subtracts and so keeps full relative
/// accuracy on states with tiny mass. If some state cannot reach any
/// lower-indexed state (a transient block below a closed one), falls back to
/// [`stationary_gauss`].
pub fn stationary_direct<T: Scalar>(p: &[Vec<T>]) -> Option<Vec<T>> {
    stationary_gth(p).or_else(|| stationary_gauss(p))
}

/// GTH elimination. Returns `None` on breakdown.
#[allow(clippy::needless_range_loop)]
pub fn stationary_gth<T: Scalar>(p: &[Vec<T>]) -> Option<Vec<T>> {
    let n = p.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let mut a: Vec<Vec<T>> = p.to_vec();
    for k in (1..n).rev() {
        let s = a[k][..k].iter().fold(T::zero(), |acc, x| acc + x.clone());
        if s.is_zero() {
            return None;
        }
        for i in 0..k {
            a[i][k] = a[i][k].clone() / s.clone();
        }
        for i in 0..k {
            if a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone();
            for j in 0..k {
                let add = f.clone() * a[k][j].clone();
                a[i][j] = a[i][j].clone() + add;
            }
        }
    }
    let mut pi = vec![T::zero(); n];
    pi[0] = T::one();
    for k in 1..n {
        pi[k] = (0..k).fold(T::zero(), |acc, i| acc + pi[i].clone() * a[i][k].clone());
    }
    let total = pi.iter().fold(T::zero(), |acc, x| acc + x.clone());
    Some(pi.into_iter().map(|x| x / total.clone()).collect())
}

/// Gaussian elimination with partial pivoting on `(P^T - I)` with the last
/// equation replaced by the normalization. Returns `None` if the system is
/// singular, which happens exactly when the chain has more than one closed
/// class.
#[allow(clippy::needless_range_loop)]
pub fn stationary_gauss<T: Scalar>(p: &[Vec<T>]) -> Option<Vec<T>> {
    let n = p.len();
    if n == 0 {
        return Some(Vec::new());
    }
    // Augmented matrix, row i is equation i.
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut row: Vec<T> = (0..n)
                .map(|j| {
                    let v = p[j][i].clone();
                    if i == j {
                        v - T::one()
                    } else {
                        v
                    }
                })
                .collect();
            row.push(T::zero());
            row
        })
        .collect();
    a[n - 1] = vec![T::one(); n + 1];

    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| {
            a[x][col]
                .abs()
                .partial_cmp(&a[y][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].is_zero() {
            return None;
        }
        a.swap(col, pivot);
        let lead = a[col][col].clone();
        for k in col..=n {
            a[col][k] = a[col][k].clone() / lead.clone();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for k in col..=n {
                let sub = factor.clone() * a[col][k].clone();
                a[r][k] = a[r][k].clone() - sub;
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

/// Power iteration from the uniform distribution until the L1 change of one
/// step falls to `tol`. Returns the iterate and the number of steps, or
/// `None` if `max_iter` is exhausted.
pub fn stationary_power<T: Scalar>(
    p: &[Vec<T>],
    tol: &T,
    max_iter: usize,
) -> Option<(Vec<T>, usize)> {
    let n = p.len();
    let start = T::one() / T::from_count(n);
    let mut pi = vec![start; n];
    for it in 1..=max_iter {
        let mut next = vec![T::zero(); n];
        for (i, row) in p.iter().enumerate() {
            if pi[i].is_zero() {
                continue;
            }
            for (j, pij) in row.iter().enumerate() {
                if !pij.is_zero() {
                    next[j] = next[j].clone() + pi[i].clone() * pij.clone();
                }
            }
        }
        let total = next.iter().fold(T::zero(), |acc, x| acc + x.clone());
        for x in &mut next {
            *x = x.clone() / total.clone();
        }
        let residual = next
            .iter()
            .zip(&pi)
            .fold(T::zero(), |acc, (a, b)| acc + (a.clone() - b.clone()).abs());
        pi = next;
        if residual <= *tol {
            return Some((pi, it));
        }
    }
    None
}
