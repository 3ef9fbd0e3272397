//! Exact linear algebra over the rationals.
//!
//! Subspaces are kept as reduced row echelon bases, which makes equality,
//! membership and dimension checks canonical. No floating point here.

use crate::rat::Rat;
use num_traits::{One, Zero};

/// Dense rational matrix, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .fold(Rat::zero(), |acc, t| acc + t)
            })
            .collect()
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows);
        let mut out = RatMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)].clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = &a * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> RatMat {
        let mut out = RatMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// In-place reduced row echelon form; returns pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].clone();
            for j in c..self.cols {
                let t = &self[(r, j)] / &inv;
                self[(r, j)] = t;
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    for j in c..self.cols {
                        let t = &self[(i, j)] - &f * &self[(r, j)];
                        self[(i, j)] = t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right nullspace `{v : M v = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![Rat::zero(); self.cols];
            v[fc] = Rat::one();
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[(ri, fc)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of `M x = b`, if any.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = RatMat::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = aug[(ri, self.cols)].clone();
        }
        Some(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for RatMat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// Linear subspace of `Q^dim`, stored as a reduced row echelon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    pub dim_ambient: usize,
    basis: Vec<Vec<Rat>>,
}

impl Subspace {
    pub fn zero(dim_ambient: usize) -> Self {
        Self {
            dim_ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(dim_ambient: usize) -> Self {
        Self::span(dim_ambient, RatMat::identity(dim_ambient).row_vecs())
    }

    /// Span of the given vectors, canonicalized.
    pub fn span(dim_ambient: usize, vectors: Vec<Vec<Rat>>) -> Self {
        assert!(vectors.iter().all(|v| v.len() == dim_ambient));
        if vectors.is_empty() {
            return Self::zero(dim_ambient);
        }
        let mut m = RatMat::from_rows(vectors);
        let pivots = m.rref();
        let basis = (0..pivots.len()).map(|i| m.row(i).to_vec()).collect();
        Self { dim_ambient, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.basis
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.dim_ambient);
        // Reduce v against the echelon basis.
        let mut w = v.to_vec();
        for row in &self.basis {
            let pc = row.iter().position(|x| !x.is_zero()).unwrap();
            if !w[pc].is_zero() {
                let f = w[pc].clone();
                for j in 0..self.dim_ambient {
                    let t = &w[j] - &f * &row[j];
                    w[j] = t;
                }
            }
        }
        w.iter().all(Zero::is_zero)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut vecs = self.basis.clone();
        vecs.extend(other.basis.iter().cloned());
        Subspace::span(self.dim_ambient, vecs)
    }

    /// Intersection, via the kernel of the stacked coefficient system.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(self.dim_ambient);
        }
        // v = A^T x = B^T y  <=>  [A^T | -B^T] (x,y)^T = 0.
        let a = self.dim();
        let b = other.dim();
        let mut m = RatMat::zero(self.dim_ambient, a + b);
        for (k, row) in self.basis.iter().enumerate() {
            for i in 0..self.dim_ambient {
                m[(i, k)] = row[i].clone();
            }
        }
        for (k, row) in other.basis.iter().enumerate() {
            for i in 0..self.dim_ambient {
                m[(i, a + k)] = -row[i].clone();
            }
        }
        let vecs = m
            .nullspace()
            .into_iter()
            .map(|xy| {
                let mut v = vec![Rat::zero(); self.dim_ambient];
                for (k, row) in self.basis.iter().enumerate() {
                    for i in 0..self.dim_ambient {
                        let t = &v[i] + &xy[k] * &row[i];
                        v[i] = t;
                    }
                }
                v
            })
            .collect();
        Subspace::span(self.dim_ambient, vecs)
    }
}
