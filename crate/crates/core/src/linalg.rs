//! Dense linear algebra over a [`Scalar`] field.
//!
//! Everything downstream (quotient bimodules, junk computations, solvers)
//! depends on two contracts fixed here:
//!
//! * Elimination scans columns left to right and never permutes columns, so
//!   pivot columns are always the first-fit choice and derived bases are
//!   canonical. Within a column the pivot row maximizes
//!   [`Scalar::pivot_size`], which means "first nonzero" in exact mode and
//!   max-magnitude partial pivoting in float mode.
//! * Affine solution sets use the canonical base point (free variables set to
//!   zero) and the standard kernel basis (one vector per free column).

use crate::scalar::Scalar;
use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Mat<S> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Build from row vectors; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Build from column vectors; `ambient` fixes the row count even when
    /// there are no columns.
    pub fn from_cols(ambient: usize, cols: &[Vec<S>]) -> Self {
        let c = cols.len();
        assert!(cols.iter().all(|col| col.len() == ambient), "ragged cols");
        Mat::from_fn(ambient, c, |i, j| cols[j][i].clone())
    }

    pub fn at(&self, i: usize, j: usize) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    /// Row-major flattening; for a matrix viewed as a linear map this is the
    /// `vec` convention used throughout: `vec(AXB) = (A ⊗ Bᵀ)·vec(X)`.
    pub fn to_vec(&self) -> Vec<S> {
        self.data.clone()
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols, "flat data length");
        Mat { rows, cols, data }
    }

    pub fn mul(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, rhs.rows, "matmul shapes");
        let mut out: Mat<S> = Mat::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.at(i, j).clone() + a.clone() * rhs.at(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "matvec shapes");
        let mut out = vec![S::zero(); self.rows];
        for i in 0..self.rows {
            let mut acc = S::zero();
            for j in 0..self.cols {
                let a = self.at(i, j);
                if !a.is_zero() {
                    acc = acc + a.clone() * v[j].clone();
                }
            }
            out[i] = acc;
        }
        out
    }

    /// Antilinear application: `self · conj(v)`.
    pub fn apply_antilinear(&self, v: &[S]) -> Vec<S> {
        self.mul_vec(&conj_vec(v))
    }

    pub fn add(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| {
            self.at(i, j).clone() + rhs.at(i, j).clone()
        })
    }

    pub fn sub(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| {
            self.at(i, j).clone() - rhs.at(i, j).clone()
        })
    }

    pub fn neg(&self) -> Mat<S> {
        Mat::from_fn(self.rows, self.cols, |i, j| -self.at(i, j).clone())
    }

    pub fn scale(&self, c: &S) -> Mat<S> {
        Mat::from_fn(self.rows, self.cols, |i, j| {
            c.clone() * self.at(i, j).clone()
        })
    }

    pub fn transpose(&self) -> Mat<S> {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Mat<S> {
        Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j).conj())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Mat<S> {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).conj())
    }

    /// Kronecker product with index convention `(i,j),(k,l) ↦ A[i][k]·B[j][l]`
    /// at row `i·B.rows + j`, column `k·B.cols + l`.
    pub fn kron(&self, rhs: &Mat<S>) -> Mat<S> {
        Mat::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |r, c| {
            let (i, j) = (r / rhs.rows, r % rhs.rows);
            let (k, l) = (c / rhs.cols, c % rhs.cols);
            self.at(i, k).clone() * rhs.at(j, l).clone()
        })
    }

    pub fn hstack(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!(self.rows, rhs.rows, "hstack rows");
        Mat::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else {
                rhs.at(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, rhs.cols, "vstack cols");
        Mat::from_fn(self.rows + rhs.rows, self.cols, |i, j| {
            if i < self.rows {
                self.at(i, j).clone()
            } else {
                rhs.at(i - self.rows, j).clone()
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    /// Largest approximate entry modulus; diagnostic for reports.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(S::abs_approx).fold(0.0, f64::max)
    }

    /// Entrywise real part.
    pub fn re(&self) -> Mat<S> {
        Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j).re_part())
    }

    /// Entrywise imaginary part (coefficient of i, as a real scalar).
    pub fn im(&self) -> Mat<S> {
        Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j).im_part())
    }
}

// ---------------------------------------------------------------------------
// vector helpers

pub fn zero_vec<S: Scalar>(n: usize) -> Vec<S> {
    vec![S::zero(); n]
}

pub fn unit_vec<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    let mut v = zero_vec(n);
    v[i] = S::one();
    v
}

pub fn add_vec<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn sub_vec<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn scale_vec<S: Scalar>(c: &S, v: &[S]) -> Vec<S> {
    v.iter().map(|x| c.clone() * x.clone()).collect()
}

/// y += c · x
pub fn axpy_vec<S: Scalar>(y: &mut [S], c: &S, x: &[S]) {
    assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = yi.clone() + c.clone() * xi.clone();
    }
}

pub fn conj_vec<S: Scalar>(v: &[S]) -> Vec<S> {
    v.iter().map(S::conj).collect()
}

pub fn is_zero_vec<S: Scalar>(v: &[S]) -> bool {
    v.iter().all(S::is_zero)
}

pub fn max_abs_vec<S: Scalar>(v: &[S]) -> f64 {
    v.iter().map(S::abs_approx).fold(0.0, f64::max)
}

/// Kronecker product of coordinate vectors, index `i·b.len() + j`.
pub fn kron_vec<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x.clone() * y.clone());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// elimination

/// Result of Gauss-Jordan elimination: the reduced matrix and its pivot
/// positions `(row, col)` in increasing row and column order.
#[derive(Clone, Debug)]
pub struct Rref<S> {
    pub mat: Mat<S>,
    pub pivots: Vec<(usize, usize)>,
}

impl<S: Scalar> Rref<S> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_cols(&self) -> Vec<usize> {
        self.pivots.iter().map(|&(_, c)| c).collect()
    }

    /// Columns that carry no pivot, ascending. `limit` bounds the column
    /// range considered (used to exclude augmented columns).
    pub fn free_cols_up_to(&self, limit: usize) -> Vec<usize> {
        let piv = self.pivot_cols();
        (0..limit).filter(|c| !piv.contains(c)).collect()
    }
}

/// Reduced row echelon form with pivots restricted to columns
/// `< pivot_col_limit` (pass `m.cols` for a plain RREF).
pub fn rref_limited<S: Scalar>(m: &Mat<S>, pivot_col_limit: usize) -> Rref<S> {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..pivot_col_limit.min(a.cols) {
        if r == a.rows {
            break;
        }
        // Pivot row: strictly greatest pivot_size wins, ties keep the first.
        // Exact scalars report 1.0 for any nonzero entry, so this is
        // first-nonzero there and max-magnitude in float mode.
        let mut best_row = None;
        let mut best_size = 0.0f64;
        for i in r..a.rows {
            let size = a.at(i, col).pivot_size();
            if size > best_size {
                best_size = size;
                best_row = Some(i);
            }
        }
        let Some(p) = best_row else { continue };
        if a.at(p, col).is_zero() {
            continue;
        }
        if p != r {
            for j in 0..a.cols {
                let x = a.at(r, j).clone();
                let y = a.at(p, j).clone();
                a.set(r, j, y);
                a.set(p, j, x);
            }
        }
        let inv = a.at(r, col).inv().expect("nonzero pivot");
        for j in 0..a.cols {
            let v = a.at(r, j).clone() * inv.clone();
            a.set(r, j, v);
        }
        a.set(r, col, S::one());
        for i in 0..a.rows {
            if i == r || a.at(i, col).is_zero() {
                continue;
            }
            let f = a.at(i, col).clone();
            for j in 0..a.cols {
                let v = a.at(i, j).clone() - f.clone() * a.at(r, j).clone();
                a.set(i, j, v);
            }
            a.set(i, col, S::zero());
        }
        pivots.push((r, col));
        r += 1;
    }
    Rref { mat: a, pivots }
}

pub fn rref<S: Scalar>(m: &Mat<S>) -> Rref<S> {
    rref_limited(m, m.cols)
}

pub fn rank<S: Scalar>(m: &Mat<S>) -> usize {
    rref(m).rank()
}

/// Basis of `ker m`: one vector per free column `f`, with `x[f] = 1` and
/// `x[pivot_i] = −R[i][f]`.
pub fn kernel_basis<S: Scalar>(m: &Mat<S>) -> Vec<Vec<S>> {
    kernel_from_rref(&rref(m), m.cols)
}

fn kernel_from_rref<S: Scalar>(r: &Rref<S>, ncols: usize) -> Vec<Vec<S>> {
    let free = r.free_cols_up_to(ncols);
    free.iter()
        .map(|&f| {
            let mut v = zero_vec(ncols);
            v[f] = S::one();
            for &(ri, ci) in &r.pivots {
                v[ci] = -r.mat.at(ri, f).clone();
            }
            v
        })
        .collect()
}

/// Affine solution set of a linear system, in the ambient coordinates of the
/// unknowns. The base point is canonical (free variables zero) and the
/// directions are the canonical kernel basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSubspace<S> {
    pub base: Vec<S>,
    pub directions: Vec<Vec<S>>,
}

impl<S: Scalar> AffineSubspace<S> {
    pub fn point(base: Vec<S>) -> Self {
        AffineSubspace {
            base,
            directions: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.len()
    }

    /// base + Σ coeffs[k]·directions[k]
    pub fn member(&self, coeffs: &[S]) -> Vec<S> {
        assert_eq!(coeffs.len(), self.directions.len());
        let mut v = self.base.clone();
        for (c, d) in coeffs.iter().zip(&self.directions) {
            axpy_vec(&mut v, c, d);
        }
        v
    }

    pub fn contains(&self, v: &[S]) -> bool {
        if v.len() != self.base.len() {
            return false;
        }
        let diff = sub_vec(v, &self.base);
        if self.directions.is_empty() {
            return is_zero_vec(&diff);
        }
        let a = Mat::from_cols(self.base.len(), &self.directions);
        solve_affine(&a, &diff).is_some()
    }

    /// Set equality: same span of directions and base difference inside it.
    pub fn same_set(&self, other: &AffineSubspace<S>) -> bool {
        if self.ambient_dim() != other.ambient_dim() {
            return false;
        }
        let mine = Subspace::span(self.ambient_dim(), &self.directions);
        let theirs = Subspace::span(other.ambient_dim(), &other.directions);
        mine.eq_subspace(&theirs) && mine.contains(&sub_vec(&other.base, &self.base))
    }
}

/// Solve `a·x = rhs`; `None` when infeasible.
pub fn solve_affine<S: Scalar>(a: &Mat<S>, rhs: &[S]) -> Option<AffineSubspace<S>> {
    assert_eq!(a.rows, rhs.len(), "solve shapes");
    let aug = a.hstack(&Mat::from_cols(rhs.len(), &[rhs.to_vec()]));
    let r = rref_limited(&aug, a.cols);
    // Inconsistent row: zero coefficients, nonzero rhs.
    for i in 0..aug.rows {
        let coeff_zero = (0..a.cols).all(|j| r.mat.at(i, j).is_zero());
        if coeff_zero && !r.mat.at(i, a.cols).is_zero() {
            return None;
        }
    }
    let mut base = zero_vec(a.cols);
    for &(ri, ci) in &r.pivots {
        base[ci] = r.mat.at(ri, a.cols).clone();
    }
    let directions = kernel_from_rref(&r, a.cols);
    Some(AffineSubspace { base, directions })
}

/// Solve expecting a unique solution; errors on infeasible or underdetermined.
pub fn solve_unique<S: Scalar>(a: &Mat<S>, rhs: &[S]) -> Result<Vec<S>> {
    let sol = solve_affine(a, rhs)
        .ok_or_else(|| Error::Infeasible("no solution to linear system".into()))?;
    if sol.dim() != 0 {
        return Err(Error::Infeasible(format!(
            "solution not unique: {} free directions",
            sol.dim()
        )));
    }
    Ok(sol.base)
}

/// Columnwise canonical particular solutions of `a·X = rhs`; `None` if any
/// column is infeasible. One elimination pass for all columns.
pub fn solve_matrix<S: Scalar>(a: &Mat<S>, rhs: &Mat<S>) -> Option<Mat<S>> {
    assert_eq!(a.rows, rhs.rows, "solve shapes");
    let aug = a.hstack(rhs);
    let r = rref_limited(&aug, a.cols);
    for i in 0..aug.rows {
        let coeff_zero = (0..a.cols).all(|j| r.mat.at(i, j).is_zero());
        if coeff_zero && (0..rhs.cols).any(|j| !r.mat.at(i, a.cols + j).is_zero()) {
            return None;
        }
    }
    let mut x = Mat::zero(a.cols, rhs.cols);
    for &(ri, ci) in &r.pivots {
        for j in 0..rhs.cols {
            x.set(ci, j, r.mat.at(ri, a.cols + j).clone());
        }
    }
    Some(x)
}

pub fn invert<S: Scalar>(m: &Mat<S>) -> Option<Mat<S>> {
    if m.rows != m.cols {
        return None;
    }
    let x = solve_matrix(m, &Mat::identity(m.rows))?;
    // solve_matrix returns the canonical particular solution; for a bijection
    // it is the two-sided inverse, which we confirm to reject rank-deficient
    // square systems that happened to be feasible.
    if x.mul(m).eq(&Mat::identity(m.rows)) || rank(m) == m.rows {
        Some(x)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// subspaces and quotients

/// A linear subspace in canonical form: basis vectors are the nonzero rows of
/// the RREF of the input span, so equal subspaces have identical bases.
#[derive(Clone, Debug)]
pub struct Subspace<S> {
    pub ambient: usize,
    /// Canonical basis vectors (RREF rows), with `pivots[k]` the pivot
    /// coordinate of `basis[k]`.
    pub basis: Vec<Vec<S>>,
    pivots: Vec<usize>,
}

impl<S: Scalar> Subspace<S> {
    pub fn span(ambient: usize, vectors: &[Vec<S>]) -> Self {
        let m = Mat::from_rows(vectors.to_vec());
        let m = if vectors.is_empty() {
            Mat::zero(0, ambient)
        } else {
            m
        };
        let r = rref(&m);
        let basis = r
            .pivots
            .iter()
            .map(|&(ri, _)| r.mat.row(ri).to_vec())
            .collect();
        let pivots = r.pivot_cols();
        Subspace {
            ambient,
            basis,
            pivots,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Residual of reducing `v` against the basis; zero iff `v` is in the
    /// span.
    pub fn reduce(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.ambient);
        let mut w = v.to_vec();
        for (k, b) in self.basis.iter().enumerate() {
            let c = w[self.pivots[k]].clone();
            if !c.is_zero() {
                axpy_vec(&mut w, &(-c), b);
            }
        }
        w
    }

    pub fn contains(&self, v: &[S]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the span.
    pub fn coords_of(&self, v: &[S]) -> Option<Vec<S>> {
        let coords: Vec<S> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut w = v.to_vec();
        for (k, b) in self.basis.iter().enumerate() {
            axpy_vec(&mut w, &(-coords[k].clone()), b);
        }
        if is_zero_vec(&w) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn eq_subspace(&self, other: &Subspace<S>) -> bool {
        self.ambient == other.ambient
            && self.dim() == other.dim()
            && other.basis.iter().all(|b| self.contains(b))
    }
}

/// A quotient of a coordinate space by the span of relation vectors, with the
/// canonical projector/section pair (`projector · section = id`).
#[derive(Clone, Debug)]
pub struct Quotient<S> {
    pub ambient: usize,
    pub dim: usize,
    /// dim × ambient
    pub projector: Mat<S>,
    /// ambient × dim; the section embeds quotient basis vectors as the free
    /// coordinates of the relation RREF.
    pub section: Mat<S>,
    /// Ambient indices of the free columns (the chosen representatives).
    pub free_cols: Vec<usize>,
}

impl<S: Scalar> Quotient<S> {
    pub fn by_relations(ambient: usize, relations: &[Vec<S>]) -> Self {
        let m = if relations.is_empty() {
            Mat::zero(0, ambient)
        } else {
            Mat::from_rows(relations.to_vec())
        };
        let r = rref(&m);
        let free = r.free_cols_up_to(ambient);
        let dim = free.len();
        let mut projector = Mat::zero(dim, ambient);
        for (k, &f) in free.iter().enumerate() {
            projector.set(k, f, S::one());
        }
        for &(ri, ci) in &r.pivots {
            for (k, &f) in free.iter().enumerate() {
                projector.set(k, ci, -r.mat.at(ri, f).clone());
            }
        }
        let mut section = Mat::zero(ambient, dim);
        for (k, &f) in free.iter().enumerate() {
            section.set(f, k, S::one());
        }
        Quotient {
            ambient,
            dim,
            projector,
            section,
            free_cols: free,
        }
    }

    /// Quotient with no relations: identity on the ambient space.
    pub fn trivial(ambient: usize) -> Self {
        Quotient::by_relations(ambient, &[])
    }

    pub fn project(&self, v: &[S]) -> Vec<S> {
        self.projector.mul_vec(v)
    }

    pub fn lift(&self, v: &[S]) -> Vec<S> {
        self.section.mul_vec(v)
    }
}

// ---------------------------------------------------------------------------
// realification

/// Realify `A·x + B·conj(x) = rhs` over complex unknowns `x` into a real
/// system over `[Re x; Im x]`. Entries of the output are real scalars of the
/// same backend.
pub fn realify_system<S: Scalar>(a: &Mat<S>, b: &Mat<S>, rhs: &[S]) -> (Mat<S>, Vec<S>) {
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.cols, b.cols);
    assert_eq!(a.rows, rhs.len());
    let (ra, ia) = (a.re(), a.im());
    let (rb, ib) = (b.re(), b.im());
    let top = ra.add(&rb).hstack(&ib.sub(&ia));
    let bot = ia.add(&ib).hstack(&ra.sub(&rb));
    let mat = top.vstack(&bot);
    let mut r = Vec::with_capacity(2 * rhs.len());
    for x in rhs {
        r.push(x.re_part());
    }
    for x in rhs {
        r.push(x.im_part());
    }
    (mat, r)
}

/// `[Re v; Im v]` of a complex vector.
pub fn complex_to_real_vec<S: Scalar>(v: &[S]) -> Vec<S> {
    let mut out = Vec::with_capacity(2 * v.len());
    for x in v {
        out.push(x.re_part());
    }
    for x in v {
        out.push(x.im_part());
    }
    out
}

/// Inverse of [`complex_to_real_vec`].
pub fn real_to_complex_vec<S: Scalar>(v: &[S]) -> Vec<S> {
    assert_eq!(v.len() % 2, 0);
    let k = v.len() / 2;
    (0..k)
        .map(|j| v[j].clone() + S::i() * v[k + j].clone())
        .collect()
}

/// Realified block matrix `[[Re M, −Im M],[Im M, Re M]]` of a complex-linear
/// map, acting on `[Re x; Im x]` coordinates.
pub fn complex_map_to_real<S: Scalar>(m: &Mat<S>) -> Mat<S> {
    let (re, im) = (m.re(), m.im());
    re.hstack(&im.neg()).vstack(&im.hstack(&re))
}

/// Positive-semidefiniteness of a Hermitian matrix, by diagonally pivoted
/// LDLᴴ elimination. Decidable in both backends: a Hermitian PSD matrix
/// attains its largest-modulus entry on the diagonal and has PSD Schur
/// complements, so a negative real pivot or a nonzero block with vanishing
/// diagonal refutes positivity.
pub fn is_psd_hermitian<S: Scalar>(m: &Mat<S>) -> Result<bool> {
    if m.rows != m.cols {
        return Err(Error::Shape(format!(
            "psd check needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    if !m.sub(&m.dagger()).is_zero() {
        return Err(Error::Validation("psd check needs a Hermitian matrix".into()));
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let &k = active
            .iter()
            .max_by(|&&i, &&j| {
                a.at(i, i)
                    .pivot_size()
                    .total_cmp(&a.at(j, j).pivot_size())
            })
            .unwrap();
        let d = a.at(k, k).clone();
        if d.is_zero() {
            // Zero diagonal on a PSD matrix forces the whole remaining
            // block to vanish.
            let clean = active
                .iter()
                .all(|&i| active.iter().all(|&j| a.at(i, j).is_zero()));
            return Ok(clean);
        }
        if d.re_sign() < 0 {
            return Ok(false);
        }
        active.retain(|&i| i != k);
        for &i in &active {
            for &j in &active {
                let upd = a.at(i, j).clone() - a.at(i, k).clone() * a.at(k, j).div(&d);
                a.set(i, j, upd);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Approx, Exact};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_mat<S: Scalar>(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat<S> {
        Mat::from_fn(rows, cols, |_, _| S::random_small(rng))
    }

    /// RREF structural oracle: staircase pivots, unit pivot columns, zero
    /// tail rows, and rowspace preservation via rank of the stacked matrix.
    fn check_rref_contract<S: Scalar>(m: &Mat<S>) {
        let r = rref(m);
        let mut last_col = None;
        for (k, &(ri, ci)) in r.pivots.iter().enumerate() {
            assert_eq!(ri, k);
            if let Some(lc) = last_col {
                assert!(ci > lc, "pivot columns must increase");
            }
            last_col = Some(ci);
            for i in 0..m.rows {
                let want = if i == ri { S::one() } else { S::zero() };
                assert!(r.mat.at(i, ci).approx_eq(&want), "pivot column not unit");
            }
        }
        for i in r.rank()..m.rows {
            assert!(is_zero_vec(r.mat.row(i)), "nonzero row below rank");
        }
        let stacked = m.vstack(&r.mat);
        assert_eq!(rank(&stacked), r.rank(), "rowspace changed");
        assert_eq!(rank(m), r.rank());
    }

    #[test]
    fn rref_contract_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (rows, cols) in [(3, 5), (5, 3), (4, 4), (1, 6), (6, 1)] {
            let m: Mat<Exact> = random_mat(&mut rng, rows, cols);
            check_rref_contract(&m);
        }
        // Rank-deficient by construction: duplicate rows.
        let a: Mat<Exact> = random_mat(&mut rng, 2, 4);
        let m = a.vstack(&a);
        check_rref_contract(&m);
        assert_eq!(rank(&m), rank(&a));
    }

    #[test]
    fn rref_contract_float() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let m: Mat<Approx> = random_mat(&mut rng, 4, 6);
            check_rref_contract(&m);
        }
    }

    #[test]
    fn float_pivoting_picks_max_magnitude() {
        // First column entries 1e-12 (numerically zero) and 1.0: the pivot
        // must come from the second row, and the tiny entry must not poison
        // the elimination.
        let m = Mat::from_rows(vec![
            vec![Approx(Complex64::new(1e-12, 0.0)), Approx(Complex64::new(1.0, 0.0))],
            vec![Approx(Complex64::new(1.0, 0.0)), Approx(Complex64::new(1.0, 0.0))],
        ]);
        let r = rref(&m);
        assert_eq!(r.rank(), 2);
    }

    #[test]
    fn exact_pivoting_is_first_nonzero() {
        // Both rows nonzero in column 0; exact mode must keep the first row
        // as pivot (1.0 ties are won by the earliest row).
        let m: Mat<Exact> = Mat::from_rows(vec![
            vec![Exact::from_i64(2), Exact::from_i64(1)],
            vec![Exact::from_i64(1000), Exact::from_i64(3)],
        ]);
        let r = rref(&m);
        assert_eq!(r.pivots, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn solve_affine_resubstitution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a: Mat<Exact> = random_mat(&mut rng, 4, 6);
            let x0: Vec<Exact> = (0..6).map(|_| Exact::random_small(&mut rng)).collect();
            let b = a.mul_vec(&x0);
            let sol = solve_affine(&a, &b).expect("constructed to be feasible");
            assert!(is_zero_vec(&sub_vec(&a.mul_vec(&sol.base), &b)));
            for d in &sol.directions {
                assert!(is_zero_vec(&a.mul_vec(d)));
            }
            assert!(sol.contains(&x0), "solution set must contain the seed");
            assert_eq!(sol.dim(), 6 - rank(&a));
        }
    }

    #[test]
    fn solve_affine_infeasible() {
        let a: Mat<Exact> = Mat::from_rows(vec![
            vec![Exact::one(), Exact::one()],
            vec![Exact::one(), Exact::one()],
        ]);
        let b = vec![Exact::one(), Exact::zero()];
        assert!(solve_affine(&a, &b).is_none());
    }

    #[test]
    fn solve_unique_detects_freedom() {
        let a: Mat<Exact> = Mat::from_rows(vec![vec![Exact::one(), Exact::one()]]);
        assert!(solve_unique(&a, &[Exact::one()]).is_err());
        let b: Mat<Exact> = Mat::identity(2);
        let x = solve_unique(&b, &[Exact::from_i64(4), Exact::from_i64(-2)]).unwrap();
        assert_eq!(x, vec![Exact::from_i64(4), Exact::from_i64(-2)]);
    }

    #[test]
    fn kernel_annihilates() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a: Mat<Exact> = random_mat(&mut rng, 3, 7);
        let ker = kernel_basis(&a);
        assert_eq!(ker.len(), 7 - rank(&a));
        for v in &ker {
            assert!(is_zero_vec(&a.mul_vec(v)));
        }
        // Kernel vectors are linearly independent.
        let km = Mat::from_rows(ker.clone());
        assert_eq!(rank(&km), ker.len());
    }

    #[test]
    fn quotient_projector_section_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rels: Vec<Vec<Exact>> = (0..3)
            .map(|_| (0..6).map(|_| Exact::random_small(&mut rng)).collect())
            .collect();
        let q = Quotient::by_relations(6, &rels);
        assert_eq!(q.dim, 6 - rank(&Mat::from_rows(rels.clone())));
        let ps = q.projector.mul(&q.section);
        assert_eq!(ps, Mat::identity(q.dim));
        for r in &rels {
            assert!(is_zero_vec(&q.project(r)), "projector must kill relations");
        }
        // project ∘ lift ∘ project = project on arbitrary vectors
        let v: Vec<Exact> = (0..6).map(|_| Exact::random_small(&mut rng)).collect();
        let p1 = q.project(&v);
        let p2 = q.project(&q.lift(&p1));
        assert_eq!(p1, p2);
    }

    #[test]
    fn quotient_trivial_and_full() {
        let q: Quotient<Exact> = Quotient::trivial(4);
        assert_eq!(q.dim, 4);
        assert_eq!(q.projector, Mat::identity(4));
        let full = Quotient::by_relations(3, &[
            unit_vec::<Exact>(3, 0),
            unit_vec::<Exact>(3, 1),
            unit_vec::<Exact>(3, 2),
        ]);
        assert_eq!(full.dim, 0);
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a: Mat<Exact> = random_mat(&mut rng, 2, 3);
        let b: Mat<Exact> = random_mat(&mut rng, 3, 2);
        let x: Vec<Exact> = (0..3).map(|_| Exact::random_small(&mut rng)).collect();
        let y: Vec<Exact> = (0..2).map(|_| Exact::random_small(&mut rng)).collect();
        let lhs = a.kron(&b).mul_vec(&kron_vec(&x, &y));
        let rhs = kron_vec(&a.mul_vec(&x), &b.mul_vec(&y));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn vec_convention() {
        // vec(AXB) = (A ⊗ Bᵀ)·vec(X) with row-major vec.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a: Mat<Exact> = random_mat(&mut rng, 2, 3);
        let x: Mat<Exact> = random_mat(&mut rng, 3, 2);
        let b: Mat<Exact> = random_mat(&mut rng, 2, 4);
        let lhs = a.mul(&x).mul(&b).to_vec();
        let rhs = a.kron(&b.transpose()).mul_vec(&x.to_vec());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn invert_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        loop {
            let m: Mat<Exact> = random_mat(&mut rng, 3, 3);
            if rank(&m) < 3 {
                continue;
            }
            let inv = invert(&m).unwrap();
            assert_eq!(m.mul(&inv), Mat::identity(3));
            assert_eq!(inv.mul(&m), Mat::identity(3));
            break;
        }
        let singular: Mat<Exact> = Mat::zero(2, 2);
        assert!(invert(&singular).is_none());
    }

    #[test]
    fn subspace_membership_and_equality() {
        let v1 = vec![Exact::one(), Exact::zero(), Exact::one()];
        let v2 = vec![Exact::zero(), Exact::one(), Exact::one()];
        let s = Subspace::span(3, &[v1.clone(), v2.clone()]);
        assert_eq!(s.dim(), 2);
        let inside = add_vec(&scale_vec(&Exact::from_i64(2), &v1), &v2);
        assert!(s.contains(&inside));
        let coords = s.coords_of(&inside).unwrap();
        // Reconstruct from canonical coordinates.
        let mut rec = zero_vec::<Exact>(3);
        for (c, b) in coords.iter().zip(&s.basis) {
            axpy_vec(&mut rec, c, b);
        }
        assert_eq!(rec, inside);
        assert!(!s.contains(&unit_vec(3, 0)));
        // Same span, different presentation.
        let t = Subspace::span(3, &[add_vec(&v1, &v2), sub_vec(&v1, &v2)]);
        assert!(s.eq_subspace(&t));
        let u = Subspace::span(3, &[v1]);
        assert!(!s.eq_subspace(&u));
    }

    #[test]
    fn affine_same_set() {
        let base1 = vec![Exact::one(), Exact::zero()];
        let base2 = vec![Exact::from_i64(3), Exact::zero()];
        let d = vec![vec![Exact::one(), Exact::zero()]];
        let s1 = AffineSubspace { base: base1, directions: d.clone() };
        let s2 = AffineSubspace { base: base2, directions: vec![scale_vec(&Exact::from_i64(-2), &d[0])] };
        assert!(s1.same_set(&s2));
        let s3 = AffineSubspace { base: vec![Exact::zero(), Exact::one()], directions: d };
        assert!(!s1.same_set(&s3));
    }

    #[test]
    fn realify_solves_conjugate_systems() {
        // x + conj(x) = 4, x - conj(x) = 2i  =>  x = 2 + i
        let a: Mat<Exact> = Mat::from_rows(vec![vec![Exact::one()], vec![Exact::one()]]);
        let b: Mat<Exact> = Mat::from_rows(vec![vec![Exact::one()], vec![-Exact::one()]]);
        let rhs = vec![Exact::from_i64(4), Exact::i() * Exact::from_i64(2)];
        let (ra, rr) = realify_system(&a, &b, &rhs);
        let sol = solve_affine(&ra, &rr).unwrap();
        assert_eq!(sol.dim(), 0);
        let x = real_to_complex_vec(&sol.base);
        assert_eq!(x[0], Exact::from_i64(2) + Exact::i());
    }

    #[test]
    fn realified_complex_map_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m: Mat<Exact> = random_mat(&mut rng, 3, 3);
        let v: Vec<Exact> = (0..3).map(|_| Exact::random_small(&mut rng)).collect();
        let direct = m.mul_vec(&v);
        let real = complex_map_to_real(&m).mul_vec(&complex_to_real_vec(&v));
        assert_eq!(complex_to_real_vec(&direct), real);
        assert_eq!(real_to_complex_vec(&complex_to_real_vec(&v)), v);
    }

    #[test]
    fn psd_detection() {
        let r = Exact::from_i64;
        let diag = |a: i64, b: i64| {
            Mat::from_rows(vec![vec![r(a), Exact::zero()], vec![Exact::zero(), r(b)]])
        };
        assert!(is_psd_hermitian(&diag(1, 0)).unwrap());
        assert!(!is_psd_hermitian(&diag(1, -1)).unwrap());
        // Indefinite despite a positive diagonal: eigenvalues 3 and -1.
        let m = Mat::from_rows(vec![vec![r(1), r(2)], vec![r(2), r(1)]]);
        assert!(!is_psd_hermitian(&m).unwrap());
        // Complex PSD: eigenvalues 1 and 3.
        let m = Mat::from_rows(vec![
            vec![r(2), Exact::i()],
            vec![-Exact::i(), r(2)],
        ]);
        assert!(is_psd_hermitian(&m).unwrap());
        // Zero diagonal with a nonzero off-diagonal entry.
        let m = Mat::from_rows(vec![
            vec![Exact::zero(), Exact::i()],
            vec![-Exact::i(), Exact::zero()],
        ]);
        assert!(!is_psd_hermitian(&m).unwrap());
        // Non-Hermitian input is rejected rather than classified.
        let m = Mat::from_rows(vec![vec![r(1), r(1)], vec![r(0), r(1)]]);
        assert!(is_psd_hermitian(&m).is_err());
    }
}
