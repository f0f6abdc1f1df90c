//! Integer lattices in row Hermite normal form.
//!
//! A basis is a list of integer rows in echelon form: every pivot is
//! positive, lies strictly right of the pivot above it, and entries above a
//! pivot are reduced into `[0, pivot)`. Two generating sets span the same
//! lattice iff their normal forms are equal.

use crate::error::{GcaError, Result};

/// Row-style Hermite normal form of the lattice spanned by `rows`.
pub fn hermite_normal_form(rows: &[Vec<i64>], dim: usize) -> Vec<Vec<i64>> {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), dim, "lattice generator has the wrong dimension");
            r.iter().map(|&x| x as i128).collect()
        })
        .collect();
    let m = a.len();
    let mut r = 0;
    for col in 0..dim {
        if r == m {
            break;
        }
        loop {
            let pivot = (r..m).filter(|&i| a[i][col] != 0).min_by_key(|&i| a[i][col].abs());
            let Some(pivot) = pivot else { break };
            a.swap(r, pivot);
            let mut done = true;
            for i in r + 1..m {
                if a[i][col] != 0 {
                    let q = a[i][col].div_euclid(a[r][col]);
                    let (head, tail) = a.split_at_mut(i);
                    for (x, y) in tail[0].iter_mut().zip(&head[r]) {
                        *x -= q * y;
                    }
                    if tail[0][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[r][col] == 0 {
            continue;
        }
        if a[r][col] < 0 {
            for x in a[r].iter_mut() {
                *x = -*x;
            }
        }
        for i in 0..r {
            let q = a[i][col].div_euclid(a[r][col]);
            if q != 0 {
                let (head, tail) = a.split_at_mut(r);
                for (x, y) in head[i].iter_mut().zip(&tail[0]) {
                    *x -= q * y;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a.into_iter().map(|row| row.into_iter().map(|x| x as i64).collect()).collect()
}

fn pivot_column(row: &[i64]) -> usize {
    row.iter().position(|&x| x != 0).expect("normal form rows are nonzero")
}

/// Coordinates of `v` in the basis, or `None` when `v` is outside the lattice.
pub fn coordinates(basis: &[Vec<i64>], v: &[i64]) -> Option<Vec<i64>> {
    let mut rest = v.to_vec();
    let mut coords = Vec::with_capacity(basis.len());
    for row in basis {
        let c = pivot_column(row);
        if rest[c] % row[c] != 0 {
            return None;
        }
        let q = rest[c] / row[c];
        for (x, y) in rest.iter_mut().zip(row) {
            *x -= q * y;
        }
        coords.push(q);
    }
    rest.iter().all(|&x| x == 0).then_some(coords)
}

pub fn combine(basis: &[Vec<i64>], coords: &[i64], dim: usize) -> Vec<i64> {
    let mut v = vec![0i64; dim];
    for (row, &c) in basis.iter().zip(coords) {
        for (x, y) in v.iter_mut().zip(row) {
            *x += c * y;
        }
    }
    v
}

/// Checks that a normal form basis has full rank in dimension `dim`.
pub fn require_full_rank(basis: &[Vec<i64>], dim: usize) -> Result<()> {
    if basis.len() == dim {
        Ok(())
    } else {
        Err(GcaError::RankDeficientLattice)
    }
}

/// Index `[Z^d : L]` of a full-rank lattice.
pub fn index(basis: &[Vec<i64>]) -> u64 {
    basis.iter().enumerate().map(|(i, r)| r[i] as u64).product()
}

/// Canonical coset representative of `v` modulo a full-rank normal form basis:
/// the unique `w = v - l` with `0 <= w[i] < basis[i][i]`.
pub fn reduce(basis: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    let mut w = v.to_vec();
    for (i, row) in basis.iter().enumerate() {
        let q = w[i].div_euclid(row[i]);
        if q != 0 {
            for (x, y) in w.iter_mut().zip(row) {
                *x -= q * y;
            }
        }
    }
    w
}

/// All full-rank lattices of the given index in dimension `dim`, as normal
/// forms, in a deterministic order.
pub fn lattices_of_index(dim: usize, det: u64) -> Vec<Vec<Vec<i64>>> {
    fn diagonals(dim: usize, det: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if prefix.len() + 1 == dim {
            prefix.push(det);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for d in 1..=det {
            if det % d == 0 {
                prefix.push(d);
                diagonals(dim, det / d, prefix, out);
                prefix.pop();
            }
        }
    }
    if dim == 0 {
        return if det == 1 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut diags = Vec::new();
    diagonals(dim, det, &mut Vec::new(), &mut diags);
    let mut out = Vec::new();
    for diag in diags {
        // free entries: (i, j) with i < j, ranging over [0, diag[j])
        let slots: Vec<(usize, usize)> =
            (0..dim).flat_map(|i| (i + 1..dim).map(move |j| (i, j))).collect();
        let mut counter = vec![0u64; slots.len()];
        'next: loop {
            let mut h = vec![vec![0i64; dim]; dim];
            for i in 0..dim {
                h[i][i] = diag[i] as i64;
            }
            for (k, &(i, j)) in slots.iter().enumerate() {
                h[i][j] = counter[k] as i64;
            }
            out.push(h);
            let mut k = slots.len();
            loop {
                if k == 0 {
                    break 'next;
                }
                k -= 1;
                counter[k] += 1;
                if counter[k] < diag[slots[k].1] {
                    continue 'next;
                }
                counter[k] = 0;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_lattice() {
        let h = hermite_normal_form(&[vec![2, 0], vec![0, 3]], 2);
        assert_eq!(h, vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(index(&h), 6);
    }

    #[test]
    fn normal_form_is_canonical() {
        let a = hermite_normal_form(&[vec![2, 4], vec![1, 1]], 2);
        let b = hermite_normal_form(&[vec![3, 5], vec![1, 1], vec![0, 2]], 2);
        assert_eq!(a, vec![vec![1, 1], vec![0, 2]]);
        assert_eq!(a, b);
    }

    #[test]
    fn rank_deficient_span() {
        let h = hermite_normal_form(&[vec![-1, 0], vec![1, 0], vec![0, 0]], 2);
        assert_eq!(h, vec![vec![1, 0]]);
        assert!(require_full_rank(&h, 2).is_err());
        assert_eq!(coordinates(&h, &[5, 0]), Some(vec![5]));
        assert_eq!(coordinates(&h, &[5, 1]), None);
    }

    #[test]
    fn reduction_lands_in_fundamental_domain() {
        let h = vec![vec![2, 1], vec![0, 3]];
        for x in -5..5 {
            for y in -5..5 {
                let w = reduce(&h, &[x, y]);
                assert!((0..2).contains(&w[0]) && (0..3).contains(&w[1]));
                let diff = [x - w[0], y - w[1]];
                assert!(coordinates(&h, &diff).is_some());
            }
        }
    }

    #[test]
    fn lattice_counts_match_divisor_sums() {
        // number of index-n sublattices of Z^2 is sigma(n)
        assert_eq!(lattices_of_index(2, 1).len(), 1);
        assert_eq!(lattices_of_index(2, 4).len(), 7);
        assert_eq!(lattices_of_index(2, 6).len(), 12);
        assert_eq!(lattices_of_index(1, 5), vec![vec![vec![5]]]);
    }
}
