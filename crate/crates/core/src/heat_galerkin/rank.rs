//! Exact rank over Q by fraction-free (Bareiss) elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::sparse::SparseMatrix;
use crate::scalar::Rational;

/// Scales each row by the lcm of its denominators so the rank problem lives over Z.
fn integer_rows(m: &SparseMatrix<Rational>) -> Vec<Vec<BigInt>> {
    let dense = m.to_dense();
    dense
        .into_iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
        })
        .collect()
}

pub fn rank_exact(m: &SparseMatrix<Rational>) -> usize {
    let mut a = integer_rows(m);
    let (rows, cols) = (m.rows(), m.cols());
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for i in rank + 1..rows {
            let factor = a[i][col].clone();
            for j in col + 1..cols {
                let v = &a[i][j] * &a[rank][col] - &factor * &a[rank][j];
                debug_assert!((&v % &prev).is_zero());
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rational};
    use proptest::prelude::*;

    fn from_dense(rows: &[Vec<Rational>]) -> SparseMatrix<Rational> {
        let mut m = SparseMatrix::new(rows.len(), rows.first().map_or(0, Vec::len));
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.add(i, j, v.clone());
            }
        }
        m
    }

    /// Textbook elimination over Q, used as the oracle.
    fn rank_gauss(rows: &[Vec<Rational>]) -> usize {
        let mut a = rows.to_vec();
        let cols = a.first().map_or(0, Vec::len);
        let mut rank = 0;
        for col in 0..cols {
            let Some(p) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            let pivot = a[rank][col].clone();
            for i in 0..a.len() {
                if i != rank && !a[i][col].is_zero() {
                    let f = a[i][col].clone() / pivot.clone();
                    let pivot_row = a[rank].clone();
                    for (x, y) in a[i].iter_mut().zip(pivot_row) {
                        *x -= f.clone() * y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn small_cases() {
        let m = from_dense(&[vec![int(1), int(2)], vec![int(2), int(4)], vec![int(0), int(0)]]);
        assert_eq!(rank_exact(&m), 1);
        let m = from_dense(&[
            vec![rational(1, 2), int(0), int(3)],
            vec![int(0), rational(-2, 3), int(1)],
        ]);
        assert_eq!(rank_exact(&m), 2);
        assert_eq!(rank_exact(&SparseMatrix::new(0, 4)), 0);
    }

    proptest! {
        #[test]
        fn agrees_with_gaussian_elimination(
            rows in 1usize..6,
            cols in 1usize..6,
            seed in prop::collection::vec((-3i64..=3, 1i64..4), 36),
        ) {
            let dense: Vec<Vec<Rational>> = (0..rows)
                .map(|i| (0..cols).map(|j| {
                    let (n, d) = seed[i * 6 + j];
                    rational(n, d)
                }).collect())
                .collect();
            prop_assert_eq!(rank_exact(&from_dense(&dense)), rank_gauss(&dense));
        }
    }
}
