use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ratlin::RatMat;
use super::{poly_gcd, Poly, Rat};
use crate::{Error, Result};

/// Dense matrix over [`Poly`], row-major.
///
/// Rank over the rational-function field is recomputed on demand; values are
/// immutable in practice, so no cache is kept.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Poly>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Poly>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count mismatch");
        PolyMatrix { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        PolyMatrix::new(rows, cols, vec![Poly::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = PolyMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Poly::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Poly) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        PolyMatrix::new(rows, cols, data)
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        PolyMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_cols(cols: Vec<Vec<Poly>>) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        assert!(cols.iter().all(|col| col.len() == r), "ragged columns");
        PolyMatrix::from_fn(r, c, |i, j| cols[j][i].clone())
    }

    /// Constant matrix from a rational matrix.
    pub fn from_ratmat(m: &RatMat) -> Self {
        PolyMatrix::from_fn(m.rows, m.cols, |i, j| Poly::constant(m[(i, j)].clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Poly::is_zero)
    }

    pub fn col(&self, j: usize) -> Vec<Poly> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> PolyMatrix {
        PolyMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = PolyMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    if rhs[(k, j)].is_zero() {
                        continue;
                    }
                    out[(i, j)] = &out[(i, j)] + &(&self[(i, k)] * &rhs[(k, j)]);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Poly]) -> Vec<Poly> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Poly::zero(), |acc, j| &acc + &(&self[(i, j)] * &v[j]))
            })
            .collect()
    }

    pub fn add(&self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        PolyMatrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &rhs[(i, j)])
    }

    pub fn sub(&self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        PolyMatrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &rhs[(i, j)])
    }

    pub fn scale(&self, c: &Poly) -> PolyMatrix {
        PolyMatrix::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] * c)
    }

    pub fn hstack(&self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.rows, rhs.rows, "row mismatch");
        PolyMatrix::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                rhs[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, rhs.cols, "column mismatch");
        let mut data = self.data.clone();
        data.extend(rhs.data.iter().cloned());
        PolyMatrix::new(self.rows + rhs.rows, self.cols, data)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        PolyMatrix::from_fn(rows.len(), cols.len(), |i, j| {
            self[(rows[i], cols[j])].clone()
        })
    }

    pub fn select_rows(&self, rows: &[usize]) -> PolyMatrix {
        let all: Vec<usize> = (0..self.cols).collect();
        self.submatrix(rows, &all)
    }

    pub fn eval(&self, x: &Rat) -> RatMat {
        let mut m = RatMat::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].eval(x);
            }
        }
        m
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// col[dst] += f * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, f: &Poly) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let upd = &self[(i, src)] * f;
            self[(i, dst)] = &self[(i, dst)] + &upd;
        }
    }

    fn scale_col(&mut self, j: usize, c: &Rat) {
        for i in 0..self.rows {
            self[(i, j)] = self[(i, j)].scale(c);
        }
    }

    /// Determinant by fraction-free Bareiss elimination. Panics if not square.
    pub fn determinant(&self) -> Poly {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Poly::one();
        }
        let mut a = self.clone();
        let mut sign = false;
        let mut prev = Poly::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        for j in 0..n {
                            let tmp = a[(k, j)].clone();
                            a[(k, j)] = a[(i, j)].clone();
                            a[(i, j)] = tmp;
                        }
                        sign = !sign;
                    }
                    None => return Poly::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[(k, k)] * &a[(i, j)]) - &(&a[(i, k)] * &a[(k, j)]);
                    a[(i, j)] = num
                        .exact_div(&prev)
                        .expect("Bareiss division is always exact");
                }
            }
            for i in k + 1..n {
                a[(i, k)] = Poly::zero();
            }
            prev = a[(k, k)].clone();
        }
        let det = a[(n - 1, n - 1)].clone();
        if sign {
            -&det
        } else {
            det
        }
    }

    /// Rank over the rational-function field.
    pub fn rank(&self) -> usize {
        self.hermite_column_form().1
    }

    /// Monic gcd of all `s x s` minors; zero when every minor vanishes.
    pub fn minor_gcd(&self, s: usize) -> Result<Poly> {
        if s == 0 || s > self.rows.min(self.cols) {
            return Err(Error::OutOfRange(format!(
                "minor size {s} for a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let mut g = Poly::zero();
        for rows in combinations(self.rows, s) {
            for cols in combinations(self.cols, s) {
                let d = self.submatrix(&rows, &cols).determinant();
                g = poly_gcd(&g, &d);
                if g.degree() == Some(0) {
                    return Ok(Poly::one());
                }
            }
        }
        Ok(g)
    }

    /// Unimodular column reduction to column echelon form. Returns the
    /// transformed pair `(u, rank)` where the columns of `u` beyond `rank`
    /// form a basis of the right kernel module.
    fn hermite_column_form(&self) -> (PolyMatrix, usize) {
        let n = self.cols;
        let mut a = self.clone();
        let mut u = PolyMatrix::identity(n);
        let mut pivot = 0;
        for row in 0..self.rows {
            if pivot >= n {
                break;
            }
            loop {
                let nonzero: Vec<usize> =
                    (pivot..n).filter(|&j| !a[(row, j)].is_zero()).collect();
                if nonzero.is_empty() {
                    break;
                }
                let &jmin = nonzero
                    .iter()
                    .min_by_key(|&&j| a[(row, j)].degree().unwrap())
                    .unwrap();
                a.swap_cols(pivot, jmin);
                u.swap_cols(pivot, jmin);
                let mut clean = true;
                for j in pivot + 1..n {
                    if a[(row, j)].is_zero() {
                        continue;
                    }
                    let (q, r) = a[(row, j)].divmod(&a[(row, pivot)]);
                    let negq = -&q;
                    a.col_axpy(j, pivot, &negq);
                    u.col_axpy(j, pivot, &negq);
                    if !r.is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    pivot += 1;
                    break;
                }
            }
        }
        (u, pivot)
    }

    /// Basis of the right kernel module, without the minimality guarantee.
    pub fn kernel_basis_raw(&self) -> PolyMatrix {
        let (u, rank) = self.hermite_column_form();
        let kernel_cols: Vec<Vec<Poly>> = (rank..self.cols).map(|j| u.col(j)).collect();
        if kernel_cols.is_empty() {
            PolyMatrix::zero(self.cols, 0)
        } else {
            PolyMatrix::from_cols(kernel_cols)
        }
    }

    /// Serialized canonical form, used as a deterministic total order key.
    pub fn canonical_key(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization is infallible")
    }
}

impl std::ops::Index<(usize, usize)> for PolyMatrix {
    type Output = Poly;
    fn index(&self, (i, j): (usize, usize)) -> &Poly {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for PolyMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Poly {
        &mut self.data[i * self.cols + j]
    }
}

impl std::fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "PolyMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for PolyMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<&Poly>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PolyMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Poly>>::deserialize(deserializer)?;
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(PolyMatrix::new(r, c, rows.into_iter().flatten().collect()))
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - (k - i) {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Weighted column degree: `max_i (deg m[i][j] - shifts[i])`, `None` for a
/// zero column.
pub fn weighted_col_degree(m: &PolyMatrix, j: usize, shifts: &[i64]) -> Option<i64> {
    (0..m.rows())
        .filter_map(|i| m[(i, j)].degree().map(|d| d as i64 - shifts[i]))
        .max()
}

/// Leading coefficient matrix with respect to the weighted degrees: entry
/// `(i, j)` is the coefficient of `t^(wdeg_j + shifts[i])` in `m[i][j]`.
pub(crate) fn weighted_leading_matrix(
    m: &PolyMatrix,
    shifts: &[i64],
    wdegs: &[Option<i64>],
) -> RatMat {
    let mut l = RatMat::zero(m.rows(), m.cols());
    for j in 0..m.cols() {
        let Some(w) = wdegs[j] else { continue };
        for i in 0..m.rows() {
            let target = w + shifts[i];
            if target < 0 {
                continue;
            }
            l[(i, j)] = m[(i, j)].coeff(target as usize);
        }
    }
    l
}

/// Reduce the columns of a full-column-rank matrix until the weighted leading
/// coefficient matrix has full column rank, then normalize deterministically.
fn column_reduce_shifted(mut k: PolyMatrix, shifts: &[i64]) -> PolyMatrix {
    assert_eq!(k.rows(), shifts.len());
    loop {
        let wdegs: Vec<Option<i64>> = (0..k.cols())
            .map(|j| weighted_col_degree(&k, j, shifts))
            .collect();
        assert!(
            wdegs.iter().all(Option::is_some),
            "zero column in a kernel basis"
        );
        let lead = weighted_leading_matrix(&k, shifts, &wdegs);
        let Some(dep) = lead.kernel_basis().into_iter().next() else {
            break;
        };
        // cancel the top weighted term of the involved column of largest
        // weighted degree
        let jstar = (0..k.cols())
            .filter(|&j| !dep[j].is_zero())
            .max_by_key(|&j| (wdegs[j], j))
            .expect("kernel vector is nonzero");
        let wstar = wdegs[jstar].unwrap();
        let pivot_coeff = dep[jstar].clone();
        for j in 0..k.cols() {
            if j == jstar || dep[j].is_zero() {
                continue;
            }
            let ratio = &dep[j] / &pivot_coeff;
            let gap = (wstar - wdegs[j].unwrap()) as usize;
            let f = Poly::monomial(ratio, gap);
            k.col_axpy(jstar, j, &f);
        }
        debug_assert!(
            weighted_col_degree(&k, jstar, shifts).is_none_or(|w| w < wstar),
            "column reduction must strictly drop the weighted degree"
        );
    }
    // canonical normalization: monic first nonzero entry, columns sorted by
    // weighted degree then canonical entry order
    for j in 0..k.cols() {
        let lead = (0..k.rows()).find(|&i| !k[(i, j)].is_zero()).unwrap();
        let lc = k[(lead, j)].leading_coeff().unwrap().clone();
        k.scale_col(j, &lc.recip());
    }
    let mut order: Vec<usize> = (0..k.cols()).collect();
    order.sort_by(|&a, &b| {
        let wa = weighted_col_degree(&k, a, shifts);
        let wb = weighted_col_degree(&k, b, shifts);
        wa.cmp(&wb).then_with(|| {
            for i in 0..k.rows() {
                let c = k[(i, a)].cmp_canonical(&k[(i, b)]);
                if c != std::cmp::Ordering::Equal {
                    return c;
                }
            }
            std::cmp::Ordering::Equal
        })
    });
    let cols: Vec<Vec<Poly>> = order.iter().map(|&j| k.col(j)).collect();
    if cols.is_empty() {
        PolyMatrix::zero(k.rows(), 0)
    } else {
        PolyMatrix::from_cols(cols)
    }
}

/// Minimal polynomial basis of the right kernel module of `m`, minimality
/// being measured against per-row degree shifts: the sorted vector of weighted
/// column degrees is minimal among all bases. The output has full column rank,
/// unit minor gcd, and a full-rank weighted leading coefficient matrix; it is
/// empty when the kernel is zero.
pub fn minimal_kernel_basis_shifted(m: &PolyMatrix, shifts: &[i64]) -> PolyMatrix {
    assert_eq!(m.cols(), shifts.len(), "one shift per kernel coordinate");
    let raw = m.kernel_basis_raw();
    if raw.cols() == 0 {
        return raw;
    }
    column_reduce_shifted(raw, shifts)
}

/// Minimal kernel basis with all shifts zero (plain column degrees).
pub fn minimal_kernel_basis(m: &PolyMatrix) -> PolyMatrix {
    minimal_kernel_basis_shifted(m, &vec![0; m.cols()])
}

/// Solve `a * x = b` over the rational-function field, returning numerators
/// and a common denominator with `a * nums = b * den` verified exactly;
/// `None` when the system is inconsistent.
pub fn solve_rational(a: &PolyMatrix, b: &PolyMatrix) -> Option<(PolyMatrix, Poly)> {
    assert_eq!(a.rows(), b.rows(), "dimension mismatch");
    if a.cols() == 0 {
        return b.is_zero().then(|| (PolyMatrix::zero(0, b.cols()), Poly::one()));
    }
    // x must lie in the kernel of [a | -b_col] per column; use column-wise
    // kernel computations on the augmented system.
    let mut sol_cols: Vec<Vec<Poly>> = Vec::with_capacity(b.cols());
    let mut den = Poly::one();
    for jb in 0..b.cols() {
        let aug = a.hstack(&PolyMatrix::from_cols(vec![b
            .col(jb)
            .iter()
            .map(|p| -p)
            .collect()]));
        let kern = aug.kernel_basis_raw();
        // find a kernel column whose last coordinate is nonzero
        let mut found: Option<(Vec<Poly>, Poly)> = None;
        for j in 0..kern.cols() {
            let last = kern[(a.cols(), j)].clone();
            if !last.is_zero() {
                let x: Vec<Poly> = (0..a.cols()).map(|i| kern[(i, j)].clone()).collect();
                found = Some((x, last));
                break;
            }
        }
        let (x, d) = found?;
        // bring all columns to the least common denominator
        let g = poly_gcd(&den, &d);
        let new_den = (&den * &d).exact_div(&g).expect("gcd divides the product");
        let scale_old = new_den.exact_div(&den).expect("den divides lcm");
        let scale_new = new_den.exact_div(&d).expect("d divides lcm");
        for col in sol_cols.iter_mut() {
            for p in col.iter_mut() {
                *p = &*p * &scale_old;
            }
        }
        sol_cols.push(x.iter().map(|p| p * &scale_new).collect());
        den = new_den;
    }
    let nums = if sol_cols.is_empty() {
        PolyMatrix::zero(a.cols(), 0)
    } else {
        PolyMatrix::from_cols(sol_cols)
    };
    debug_assert_eq!(a.mul(&nums), b.scale(&den));
    Some((nums, den))
}

/// Solve `a * x = b` demanding a polynomial solution; `None` when the system
/// is inconsistent or the solution has a true denominator.
pub fn solve_polynomial(a: &PolyMatrix, b: &PolyMatrix) -> Option<PolyMatrix> {
    let (nums, den) = solve_rational(a, b)?;
    let mut out = PolyMatrix::zero(nums.rows(), nums.cols());
    for i in 0..nums.rows() {
        for j in 0..nums.cols() {
            out[(i, j)] = nums[(i, j)].exact_div(&den)?;
        }
    }
    // a may have a nontrivial kernel, in which case the particular solution
    // found rationally need not be the polynomial one; verify.
    (a.mul(&out) == *b).then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&c| Rat::from_int(c)).collect())
    }

    #[test]
    fn determinant_matches_cofactor_on_small() {
        let m = PolyMatrix::from_rows(vec![
            vec![p(&[1, 1]), p(&[0, 0, 1]), p(&[2])],
            vec![p(&[3]), p(&[1]), p(&[0, 1])],
            vec![p(&[0]), p(&[5, 1]), p(&[1])],
        ]);
        let det = m.determinant();
        // cofactor expansion along the first row
        let minor = |r: &[usize], c: &[usize]| m.submatrix(r, c).determinant();
        let want = &(&m[(0, 0)] * &minor(&[1, 2], &[1, 2]))
            - &(&(&m[(0, 1)] * &minor(&[1, 2], &[0, 2]))
                - &(&m[(0, 2)] * &minor(&[1, 2], &[0, 1])));
        assert_eq!(det, want);
    }

    #[test]
    fn minor_gcd_examples() {
        // 2x1 column (t, t^2): common factor t
        let m = PolyMatrix::from_cols(vec![vec![p(&[0, 1]), p(&[0, 0, 1])]]);
        assert_eq!(m.minor_gcd(1).unwrap(), p(&[0, 1]));
        // identity: unimodular
        assert_eq!(PolyMatrix::identity(2).minor_gcd(2).unwrap(), Poly::one());
        // coprime entries
        let m = PolyMatrix::from_cols(vec![vec![p(&[-1, 1]), p(&[1, 1])]]);
        assert_eq!(m.minor_gcd(1).unwrap(), Poly::one());
        // out of range
        assert!(PolyMatrix::identity(2).minor_gcd(3).is_err());
        assert!(PolyMatrix::identity(2).minor_gcd(0).is_err());
    }

    #[test]
    fn kernel_of_row_vector() {
        // (t, -1) has kernel spanned by (1, t)
        let m = PolyMatrix::from_rows(vec![vec![p(&[0, 1]), p(&[-1])]]);
        let k = minimal_kernel_basis(&m);
        assert_eq!(k.cols(), 1);
        assert!(m.mul(&k).is_zero());
        assert_eq!(k.col(0), vec![p(&[1]), p(&[0, 1])]);
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        let k = minimal_kernel_basis(&PolyMatrix::identity(2));
        assert_eq!(k.cols(), 0);
        assert_eq!(k.rows(), 2);
    }

    #[test]
    fn kernel_degrees_match_bruteforce() {
        // (t^2 - t, -t + 1): kernel spanned by (1, t) since
        // (t^2-t)*1 + (1-t)*t = 0
        let m = PolyMatrix::from_rows(vec![vec![p(&[0, -1, 1]), p(&[1, -1])]]);
        let k = minimal_kernel_basis(&m);
        assert!(m.mul(&k).is_zero());
        assert_eq!(k.cols(), 1);
        assert_eq!(k.minor_gcd(1).unwrap(), Poly::one());
        // brute force: dimension of degree-bounded kernels determines the
        // minimal column degree
        let dim_at = |bound: usize| brute_kernel_dim(&m, bound);
        // a single minimal generator of degree 1: dim at bound D is D
        assert_eq!(dim_at(0), 0);
        assert_eq!(dim_at(1), 1);
        assert_eq!(dim_at(2), 2);
        let basis_deg = weighted_col_degree(&k, 0, &[0, 0]).unwrap();
        assert_eq!(basis_deg, 1);
    }

    /// Dimension over the rationals of kernel vectors with all entry degrees
    /// bounded by `bound`, via one large scalar linear system.
    fn brute_kernel_dim(m: &PolyMatrix, bound: usize) -> usize {
        let vars = m.cols() * (bound + 1);
        let max_deg = bound
            + m.data
                .iter()
                .filter_map(Poly::degree)
                .max()
                .unwrap_or(0);
        let mut rows = Vec::new();
        for i in 0..m.rows() {
            for d in 0..=max_deg {
                let mut row = vec![Rat::zero(); vars];
                for j in 0..m.cols() {
                    for e in 0..=bound {
                        if d >= e {
                            row[j * (bound + 1) + e] = m[(i, j)].coeff(d - e);
                        }
                    }
                }
                rows.push(row);
            }
        }
        RatMat::from_rows(rows).kernel_basis().len()
    }

    #[test]
    fn solve_polynomial_roundtrip() {
        let a = PolyMatrix::from_rows(vec![
            vec![p(&[1]), p(&[0, 1])],
            vec![p(&[0]), p(&[1])],
        ]);
        let x = PolyMatrix::from_cols(vec![vec![p(&[1, 2]), p(&[3])]]);
        let b = a.mul(&x);
        let got = solve_polynomial(&a, &b).unwrap();
        assert_eq!(a.mul(&got), b);
    }

    #[test]
    fn solve_detects_inconsistency() {
        let a = PolyMatrix::from_rows(vec![vec![p(&[0, 1])], vec![p(&[0, 1])]]);
        let b = PolyMatrix::from_cols(vec![vec![p(&[1]), p(&[2])]]);
        assert!(solve_rational(&a, &b).is_none());
    }
}
