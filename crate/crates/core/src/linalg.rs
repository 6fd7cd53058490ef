//! Exact linear algebra over a [`FieldSpec`]: row reduction, rank, kernels,
//! and an incremental echelon basis used for rank pruning.

use crate::ff_tower::{Fe, FieldSpec};

/// Dense row-major matrix of field elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Fe::ZERO; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<Fe>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[&[Fe]]) -> Self {
        let rows = columns.first().map_or(0, |c| c.len());
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
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

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Fe> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Fe>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, field: &FieldSpec, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Fe::ZERO, |acc, (&a, &b)| field.add(acc, field.mul(a, b)))
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Fe;
    fn index(&self, (i, j): (usize, usize)) -> &Fe {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Fe {
        &mut self.data[i * self.cols + j]
    }
}

/// Reduces `m` to reduced row-echelon form in place and returns the pivot
/// columns.
pub fn rref(field: &FieldSpec, m: &mut Matrix) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(pr) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        m.swap_rows(r, pr);
        let inv = field.inv(m[(r, c)]).expect("pivot is nonzero");
        for j in c..m.cols {
            m[(r, j)] = field.mul(m[(r, j)], inv);
        }
        for i in 0..m.rows {
            let f = m[(i, c)];
            if i != r && !f.is_zero() {
                for j in c..m.cols {
                    let t = field.mul(f, m[(r, j)]);
                    m[(i, j)] = field.sub(m[(i, j)], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(field: &FieldSpec, m: &Matrix) -> usize {
    let mut basis = EchelonBasis::new(m.cols);
    (0..m.rows).filter(|&i| basis.insert(field, m.row(i))).count()
}

/// Basis of the right kernel `{v : m v = 0}`, one vector per free column.
pub fn kernel_basis(field: &FieldSpec, m: &Matrix) -> Vec<Vec<Fe>> {
    let mut red = m.clone();
    let pivots = rref(field, &mut red);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Fe::ZERO; m.cols];
            v[f] = Fe::ONE;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = field.neg(red[(r, f)]);
            }
            v
        })
        .collect()
}

/// Semi-reduced echelon basis supporting incremental insertion and removal
/// of the most recent vector.
///
/// Each stored vector has a leading 1 at its pivot and zeros at the pivots
/// of all earlier vectors.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    len: usize,
    vectors: Vec<(usize, Vec<Fe>)>,
}

impl EchelonBasis {
    pub fn new(len: usize) -> Self {
        EchelonBasis {
            len,
            vectors: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    /// Reduces `v` against the basis.
    pub fn reduce(&self, field: &FieldSpec, v: &[Fe]) -> Vec<Fe> {
        debug_assert_eq!(v.len(), self.len);
        let mut w = v.to_vec();
        for (piv, b) in &self.vectors {
            let f = w[*piv];
            if !f.is_zero() {
                for (x, &y) in w.iter_mut().zip(b) {
                    if !y.is_zero() {
                        *x = field.sub(*x, field.mul(f, y));
                    }
                }
            }
        }
        w
    }

    /// Inserts `v`; returns false (leaving the basis unchanged) when `v`
    /// already lies in the span.
    pub fn insert(&mut self, field: &FieldSpec, v: &[Fe]) -> bool {
        let mut w = self.reduce(field, v);
        let Some(piv) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = field.inv(w[piv]).expect("nonzero");
        for x in w.iter_mut() {
            *x = field.mul(*x, inv);
        }
        self.vectors.push((piv, w));
        true
    }

    /// Removes the most recently inserted vector.
    pub fn pop(&mut self) {
        self.vectors.pop();
    }
}

/// Rank of the span of the given vectors.
pub fn rank_of_vectors(field: &FieldSpec, vectors: &[&[Fe]]) -> usize {
    let Some(first) = vectors.first() else {
        return 0;
    };
    let mut basis = EchelonBasis::new(first.len());
    vectors.iter().filter(|v| basis.insert(field, v)).count()
}
