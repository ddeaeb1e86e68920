//! Tiny dense linear algebra over exact rationals: just enough for the
//! block coordinate changes (matrix inverse) used by linear normalization.

use crate::poly::Rat;
use num::Zero;

/// Dense square matrix of rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    pub n: usize,
    pub rows: Vec<Vec<Rat>>,
}

impl QMatrix {
    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rat::from_integer(1.into()) } else { Rat::zero() })
                    .collect()
            })
            .collect();
        QMatrix { n, rows }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n));
        QMatrix { n, rows }
    }

    /// Gauss–Jordan inverse; `None` if singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        let n = self.n;
        let mut a = self.rows.clone();
        let mut b = QMatrix::identity(n).rows;
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, pivot);
            b.swap(col, pivot);
            let inv = {
                let p = a[col][col].clone();
                Rat::from_integer(1.into()) / p
            };
            for j in 0..n {
                a[col][j] = &a[col][j] * &inv;
                b[col][j] = &b[col][j] * &inv;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for j in 0..n {
                        let av = &a[r][j] - &(&a[col][j] * &f);
                        a[r][j] = av;
                        let bv = &b[r][j] - &(&b[col][j] * &f);
                        b[r][j] = bv;
                    }
                }
            }
        }
        Some(QMatrix::from_rows(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn inverse_roundtrip() {
        let m = QMatrix::from_rows(vec![
            vec![rat(1), rat(2)],
            vec![rat(3), rat(4)],
        ]);
        let inv = m.inverse().unwrap();
        // m * inv = identity
        let id = QMatrix::identity(2);
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = rat(0);
                for k in 0..2 {
                    acc += &m.rows[i][k] * &inv.rows[k][j];
                }
                assert_eq!(acc, id.rows[i][j]);
            }
        }
    }

    #[test]
    fn singular_matrix() {
        let m = QMatrix::from_rows(vec![
            vec![rat(1), rat(2)],
            vec![rat(2), rat(4)],
        ]);
        assert!(m.inverse().is_none());
    }
}
