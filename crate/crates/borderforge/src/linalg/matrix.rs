use std::ops::{Index, IndexMut};

use crate::algebra::{FieldElement, PrimeField};

/// Dense row-major matrix over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFp {
    rows: usize,
    cols: usize,
    dat: Vec<FieldElement>,
}

impl MatrixFp {
    pub fn zeros(rows: usize, cols: usize) -> MatrixFp {
        MatrixFp { rows, cols, dat: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> MatrixFp {
        let mut m = MatrixFp::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows(rows: &[Vec<FieldElement>]) -> MatrixFp {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut dat = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            dat.extend_from_slice(r);
        }
        MatrixFp { rows: rows.len(), cols, dat }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.dat[i * self.cols..(i + 1) * self.cols]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.dat.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn mul_vec(&self, f: &PrimeField, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(0, |acc, (&a, &b)| f.mul_add(acc, a, b)))
            .collect()
    }

    pub fn mul(&self, f: &PrimeField, other: &MatrixFp) -> MatrixFp {
        assert_eq!(self.cols, other.rows);
        let mut out = MatrixFp::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other[(k, j)];
                    if b != 0 {
                        out[(i, j)] = f.mul_add(out[(i, j)], a, b);
                    }
                }
            }
        }
        out
    }

    /// Reduced row echelon form by Gauss-Jordan elimination, pivoting on the
    /// lowest available column. Returns the pivot columns.
    pub fn rref(&mut self, f: &PrimeField) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self[(i, c)] != 0) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = f.inv(self[(r, c)]).expect("pivot is nonzero");
            for j in c..self.cols {
                self[(r, j)] = f.mul(self[(r, j)], inv);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self[(i, c)];
                if factor == 0 {
                    continue;
                }
                let neg = f.neg(factor);
                for j in c..self.cols {
                    let v = self[(r, j)];
                    if v != 0 {
                        self[(i, j)] = f.mul_add(self[(i, j)], neg, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, f: &PrimeField) -> usize {
        self.clone().rref(f).len()
    }
}

impl Index<(usize, usize)> for MatrixFp {
    type Output = FieldElement;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &FieldElement {
        &self.dat[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for MatrixFp {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut FieldElement {
        &mut self.dat[i * self.cols + j]
    }
}

/// Basis of `{v : M v = 0}`, one vector per free column in column order,
/// each scaled so that its first nonzero entry is 1.
pub fn nullspace(f: &PrimeField, m: &MatrixFp) -> Vec<Vec<FieldElement>> {
    let mut r = m.clone();
    let pivots = r.rref(f);
    let mut is_pivot = vec![None; m.cols];
    for (row, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(row);
    }
    let mut out = Vec::new();
    for free in 0..m.cols {
        if is_pivot[free].is_some() {
            continue;
        }
        let mut v = vec![0; m.cols];
        v[free] = 1;
        for (row, &c) in pivots.iter().enumerate() {
            v[c] = f.neg(r[(row, free)]);
        }
        let lead = *v.iter().find(|&&x| x != 0).expect("free entry is 1");
        if lead != 1 {
            let inv = f.inv(lead).expect("nonzero");
            v.iter_mut().for_each(|x| *x = f.mul(*x, inv));
        }
        out.push(v);
    }
    out
}
