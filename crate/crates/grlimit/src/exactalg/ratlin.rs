//! Dense linear algebra over the rationals for fiberwise computations:
//! reduced echelon forms, kernels, spans, intersections and annihilators.

use super::Rat;

/// Row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn new(rows: usize, cols: usize, data: Vec<Rat>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count mismatch");
        RatMat { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMat::new(rows, cols, vec![Rat::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMat::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_cols(cols: Vec<Vec<Rat>>) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        assert!(cols.iter().all(|col| col.len() == r), "ragged columns");
        let mut m = RatMat::zero(r, c);
        for (j, col) in cols.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> Vec<Rat> {
        (0..self.cols).map(|j| self[(i, j)].clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> RatMat {
        let mut m = RatMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn mul(&self, rhs: &RatMat) -> RatMat {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = RatMat::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let upd = &self[(i, k)] * &rhs[(k, j)];
                    out[(i, j)] += &upd;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    pub fn hstack(&self, rhs: &RatMat) -> RatMat {
        assert_eq!(self.rows, rhs.rows, "row mismatch");
        let mut m = RatMat::zero(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..rhs.cols {
                m[(i, self.cols + j)] = rhs[(i, j)].clone();
            }
        }
        m
    }

    pub fn vstack(&self, rhs: &RatMat) -> RatMat {
        assert_eq!(self.cols, rhs.cols, "column mismatch");
        let mut data = self.data.clone();
        data.extend(rhs.data.iter().cloned());
        RatMat::new(self.rows + rhs.rows, self.cols, data)
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(piv) = (row..self.rows).find(|&i| !self[(i, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(row, piv);
            let inv = self[(row, col)].recip();
            for j in col..self.cols {
                self[(row, j)] = &self[(row, j)] * &inv;
            }
            for i in 0..self.rows {
                if i != row && !self[(i, col)].is_zero() {
                    let f = self[(i, col)].clone();
                    for j in col..self.cols {
                        let upd = &f * &self[(row, j)];
                        self[(i, j)] -= &upd;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel, one vector per non-pivot column.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut basis = Vec::new();
        let piv_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        for free in 0..self.cols {
            if piv_set[free].is_some() {
                continue;
            }
            let mut vec = vec![Rat::zero(); self.cols];
            vec[free] = Rat::one();
            for (col, r) in piv_set.iter().enumerate() {
                if let Some(r) = r {
                    vec[col] = -&m[(*r, free)];
                }
            }
            basis.push(vec);
        }
        basis
    }

    /// Solve `self * x = b`; `None` when inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows, "dimension mismatch");
        let mut aug = RatMat::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    /// Inverse of a square matrix; `None` when singular.
    pub fn inverse(&self) -> Option<RatMat> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = self.hstack(&RatMat::identity(n));
        let pivots = aug.rref();
        // singular input pushes pivots into the identity block
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        let mut inv = RatMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
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

/// Dimension of the span of the given vectors.
pub fn span_dim(vectors: &[Vec<Rat>], ambient: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    assert!(vectors.iter().all(|v| v.len() == ambient));
    RatMat::from_rows(vectors.to_vec()).rank()
}

/// Whether `v` lies in the span of `span`.
pub fn span_contains(span: &[Vec<Rat>], v: &[Rat]) -> bool {
    if v.iter().all(Rat::is_zero) {
        return true;
    }
    if span.is_empty() {
        return false;
    }
    RatMat::from_cols(span.to_vec()).solve(v).is_some()
}

/// Basis of the intersection of two column spans in the same ambient space.
pub fn intersect_spans(a: &[Vec<Rat>], b: &[Vec<Rat>], ambient: usize) -> Vec<Vec<Rat>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let ma = RatMat::from_cols(a.to_vec());
    let mb = RatMat::from_cols(b.to_vec());
    // x in both spans: ma * u = mb * w; kernel of [ma | -mb]
    let neg = RatMat::new(
        ambient,
        mb.cols,
        (0..ambient)
            .flat_map(|i| (0..mb.cols).map(move |j| (i, j)))
            .map(|(i, j)| -&mb[(i, j)])
            .collect(),
    );
    let stacked = ma.hstack(&neg);
    let mut out = Vec::new();
    for kv in stacked.kernel_basis() {
        let u = &kv[..ma.cols];
        let x = ma.mul_vec(u);
        if !x.iter().all(Rat::is_zero) {
            out.push(x);
        }
    }
    // reduce to an independent set
    independent_subset(out, ambient)
}

/// Rows spanning the annihilator (left kernel) of the given column span.
pub fn annihilator(span: &[Vec<Rat>], ambient: usize) -> Vec<Vec<Rat>> {
    if span.is_empty() {
        return (0..ambient)
            .map(|i| {
                let mut v = vec![Rat::zero(); ambient];
                v[i] = Rat::one();
                v
            })
            .collect();
    }
    // functionals f with f . s = 0 for every spanning vector s
    RatMat::from_rows(span.to_vec()).kernel_basis()
}

/// Maximal linearly independent subset, keeping first occurrences.
pub fn independent_subset(vectors: Vec<Vec<Rat>>, ambient: usize) -> Vec<Vec<Rat>> {
    let mut kept: Vec<Vec<Rat>> = Vec::new();
    for v in vectors {
        if v.iter().all(Rat::is_zero) {
            continue;
        }
        let mut trial = kept.clone();
        trial.push(v.clone());
        if span_dim(&trial, ambient) > kept.len() {
            kept.push(v);
        }
    }
    kept
}
