//! Small integer matrices: K0 maps between free abelian groups.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged integer matrix");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "integer matrix shapes");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let v = (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum();
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|k| self.get(i, k) * v[k]).sum())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Whether this is a permutation matrix.
    pub fn is_permutation(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).filter(|&j| self.get(i, j) == 1).count() == 1
                    && (0..self.cols).all(|j| matches!(self.get(i, j), 0 | 1))
            })
            && (0..self.cols).all(|j| (0..self.rows).filter(|&i| self.get(i, j) == 1).count() == 1)
    }

    /// Smith normal form `P A Q = D` with unimodular `P`, `Q`.
    pub fn smith(&self) -> Smith {
        let (m, n) = (self.rows, self.cols);
        let mut a: Vec<Vec<i128>> = (0..m)
            .map(|i| (0..n).map(|j| self.get(i, j) as i128).collect())
            .collect();
        let mut p: Vec<Vec<i128>> = ident128(m);
        let mut q: Vec<Vec<i128>> = ident128(n);
        let mut t = 0;
        while t < m.min(n) {
            // pivot: smallest nonzero |entry| in the remaining block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            p.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in q.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..m {
                let f = a[i][t] / a[t][t];
                if f != 0 {
                    for j in 0..n {
                        a[i][j] -= f * a[t][j];
                    }
                    for j in 0..m {
                        p[i][j] -= f * p[t][j];
                    }
                }
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let f = a[t][j] / a[t][t];
                if f != 0 {
                    for row in a.iter_mut() {
                        row[j] -= f * row[t];
                    }
                    for row in q.iter_mut() {
                        row[j] -= f * row[t];
                    }
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold any non-multiple into the pivot row
            let mut fixed = true;
            'outer: for i in t + 1..m {
                for j in t + 1..n {
                    if a[i][j] % a[t][t] != 0 {
                        for k in 0..n {
                            a[t][k] += a[i][k];
                        }
                        for k in 0..m {
                            p[t][k] += p[i][k];
                        }
                        fixed = false;
                        break 'outer;
                    }
                }
            }
            if !fixed {
                continue;
            }
            if a[t][t] < 0 {
                for k in 0..n {
                    a[t][k] = -a[t][k];
                }
                for k in 0..m {
                    p[t][k] = -p[t][k];
                }
            }
            t += 1;
        }
        let diag = (0..m.min(n)).map(|i| a[i][i] as i64).collect();
        Smith {
            diag,
            p: to_int(&p),
            q: to_int(&q),
        }
    }

    pub fn rank(&self) -> usize {
        self.smith().diag.iter().filter(|&&d| d != 0).count()
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }

    /// Surjective as a map of free abelian groups.
    pub fn is_surjective(&self) -> bool {
        let s = self.smith();
        s.diag.iter().filter(|&&d| d != 0).count() == self.rows
            && s.diag.iter().filter(|&&d| d != 0).all(|&d| d == 1)
    }

    pub fn is_isomorphism(&self) -> bool {
        self.rows == self.cols && self.is_surjective()
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse(&self) -> Option<IntMatrix> {
        if !self.is_isomorphism() {
            return None;
        }
        let s = self.smith();
        // P A Q = I  =>  A^{-1} = Q P
        Some(s.q.mul(&s.p))
    }
}

fn ident128(n: usize) -> Vec<Vec<i128>> {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

fn to_int(m: &[Vec<i128>]) -> IntMatrix {
    let rows: Vec<Vec<i64>> = m
        .iter()
        .map(|r| r.iter().map(|&v| i64::try_from(v).expect("Smith transform overflow")).collect())
        .collect();
    if rows.is_empty() {
        return IntMatrix::zeros(0, 0);
    }
    IntMatrix::from_rows(&rows)
}

#[derive(Debug, Clone)]
pub struct Smith {
    pub diag: Vec<i64>,
    pub p: IntMatrix,
    pub q: IntMatrix,
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smith_of_known_matrices() {
        let a = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        let s = a.smith();
        assert_eq!(s.diag, vec![2, 4]);
        assert!(!a.is_surjective());
        assert!(a.is_injective());
        let b = IntMatrix::from_rows(&[vec![1], vec![1]]);
        assert!(b.is_injective() && !b.is_surjective());
        let c = IntMatrix::from_rows(&[vec![1, 1]]);
        assert!(c.is_surjective() && !c.is_injective());
        let u = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]);
        let inv = u.inverse().unwrap();
        assert_eq!(u.mul(&inv), IntMatrix::identity(2));
        assert!(IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).is_permutation());
        assert!(IntMatrix::zeros(0, 0).is_isomorphism());
    }

    proptest! {
        #[test]
        fn smith_transforms_reproduce_diagonal(entries in proptest::collection::vec(-6i64..7, 12)) {
            let a = IntMatrix::from_rows(&[entries[0..4].to_vec(), entries[4..8].to_vec(), entries[8..12].to_vec()]);
            let s = a.smith();
            let d = s.p.mul(&a).mul(&s.q);
            for i in 0..3 {
                for j in 0..4 {
                    let expected = if i == j { s.diag[i] } else { 0 };
                    prop_assert_eq!(d.get(i, j), expected);
                }
            }
            for w in s.diag.windows(2) {
                if w[1] != 0 {
                    prop_assert!(w[0] != 0 && w[1] % w[0] == 0);
                }
            }
        }
    }
}
