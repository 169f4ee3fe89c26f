//! Finite-dimensional unital star-algebras given by structure constants.

use std::fmt;

use crate::error::{Error, Result};
use crate::exec;
use crate::linalg::{conj_vec, is_zero_vec, sub_vec, unit_vec, Mat};
use crate::scalar::Scalar;
use crate::validate::ValidationReport;
use crate::ExecMode;

/// A unital associative algebra over the scalar field with an antilinear
/// involution, presented by structure constants on a fixed basis:
/// `e_i · e_j = Σ_k c[i][j][k] e_k`.
///
/// The star is stored as a matrix acting on conjugated coordinates:
/// `(Σ x_i e_i)* = star_mat · conj(x)`.
#[derive(Clone, Debug)]
pub struct StarAlgebra<S> {
    pub dim: usize,
    mult: Vec<S>,
    pub unit: Vec<S>,
    pub star_mat: Mat<S>,
    left_mult: Vec<Mat<S>>,
    right_mult: Vec<Mat<S>>,
}

impl<S: Scalar> StarAlgebra<S> {
    /// `mult` is flattened as `c[(i·n + j)·n + k]`.
    pub fn new(dim: usize, mult: Vec<S>, unit: Vec<S>, star_mat: Mat<S>) -> Result<Self> {
        if mult.len() != dim * dim * dim {
            return Err(Error::Shape(format!(
                "structure constants: expected {} entries, got {}",
                dim * dim * dim,
                mult.len()
            )));
        }
        if unit.len() != dim {
            return Err(Error::Shape(format!(
                "unit: expected {} coords, got {}",
                dim,
                unit.len()
            )));
        }
        if star_mat.rows != dim || star_mat.cols != dim {
            return Err(Error::Shape(format!(
                "star matrix: expected {dim}×{dim}, got {}×{}",
                star_mat.rows, star_mat.cols
            )));
        }
        let left_mult = (0..dim)
            .map(|i| {
                Mat::from_fn(dim, dim, |k, j| mult[(i * dim + j) * dim + k].clone())
            })
            .collect();
        let right_mult = (0..dim)
            .map(|i| {
                Mat::from_fn(dim, dim, |k, j| mult[(j * dim + i) * dim + k].clone())
            })
            .collect();
        Ok(StarAlgebra {
            dim,
            mult,
            unit,
            star_mat,
            left_mult,
            right_mult,
        })
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> &S {
        &self.mult[(i * self.dim + j) * self.dim + k]
    }

    pub fn structure_constants(&self) -> &[S] {
        &self.mult
    }

    /// Matrix of left multiplication by basis element `e_i`.
    pub fn left_mult(&self, i: usize) -> &Mat<S> {
        &self.left_mult[i]
    }

    /// Matrix of right multiplication by basis element `e_i`.
    pub fn right_mult(&self, i: usize) -> &Mat<S> {
        &self.right_mult[i]
    }

    /// Matrix of left multiplication by an arbitrary element.
    pub fn left_mult_of(&self, x: &[S]) -> Mat<S> {
        let mut m: Mat<S> = Mat::zero(self.dim, self.dim);
        for (i, xi) in x.iter().enumerate() {
            if !xi.is_zero() {
                m = m.add(&self.left_mult[i].scale(xi));
            }
        }
        m
    }

    pub fn right_mult_of(&self, x: &[S]) -> Mat<S> {
        let mut m: Mat<S> = Mat::zero(self.dim, self.dim);
        for (i, xi) in x.iter().enumerate() {
            if !xi.is_zero() {
                m = m.add(&self.right_mult[i].scale(xi));
            }
        }
        m
    }

    pub fn mul_elts(&self, x: &[S], y: &[S]) -> Vec<S> {
        self.left_mult_of(x).mul_vec(y)
    }

    pub fn star_elt(&self, x: &[S]) -> Vec<S> {
        self.star_mat.mul_vec(&conj_vec(x))
    }

    pub fn validate(&self) -> ValidationReport {
        self.validate_with(ExecMode::Auto)
    }

    pub fn validate_with(&self, mode: ExecMode) -> ValidationReport {
        let n = self.dim;
        let mut report = ValidationReport::new();

        // Associativity as matrix identities: Σ_k c[i][j][k] L_k = L_i · L_j
        // pins (e_i e_j) e_l = e_i (e_j e_l) for every l at once.
        let violations = exec::run_indexed(mode, n, |i| {
            let mut out = Vec::new();
            for j in 0..n {
                let mut lhs: Mat<S> = Mat::zero(n, n);
                for k in 0..n {
                    let c = self.c(i, j, k);
                    if !c.is_zero() {
                        lhs = lhs.add(&self.left_mult[k].scale(c));
                    }
                }
                let rhs = self.left_mult[i].mul(&self.left_mult[j]);
                let res = lhs.sub(&rhs);
                if !res.is_zero() {
                    out.push((format!("(i,j)=({i},{j})"), res.max_abs()));
                }
            }
            out
        });
        for (witness, mag) in violations {
            report.push("associativity", witness, mag);
        }

        let id = Mat::identity(n);
        report.check_zero(
            "left unit",
            "1·x = x",
            &self.left_mult_of(&self.unit).sub(&id),
        );
        report.check_zero(
            "right unit",
            "x·1 = x",
            &self.right_mult_of(&self.unit).sub(&id),
        );

        // star ∘ star = id on coordinates: S · conj(S) = I.
        report.check_zero(
            "star involution",
            "x** = x",
            &self.star_mat.mul(&self.star_mat.conj()).sub(&id),
        );
        // unit is self-adjoint
        let unit_res = sub_vec(&self.star_elt(&self.unit), &self.unit);
        if !is_zero_vec(&unit_res) {
            report.push("star unital", "1* = 1", crate::linalg::max_abs_vec(&unit_res));
        }
        // antimultiplicativity: (e_i e_j)* = e_j* e_i*
        let star_viol = exec::run_indexed(mode, n, |i| {
            let mut out = Vec::new();
            let ei_star = self.star_elt(&unit_vec(n, i));
            for j in 0..n {
                let ej_star = self.star_elt(&unit_vec(n, j));
                let lhs = self.star_elt(&self.mul_elts(&unit_vec(n, i), &unit_vec(n, j)));
                let rhs = self.mul_elts(&ej_star, &ei_star);
                let res = sub_vec(&lhs, &rhs);
                if !is_zero_vec(&res) {
                    out.push((format!("(i,j)=({i},{j})"), crate::linalg::max_abs_vec(&res)));
                }
            }
            out
        });
        for (witness, mag) in star_viol {
            report.push("star antimultiplicative", witness, mag);
        }
        report
    }
}

impl<S: Scalar> fmt::Display for StarAlgebra<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "star-algebra of dimension {}", self.dim)
    }
}

/// ℂᵏ with pointwise product; basis of minimal idempotents, star is
/// entrywise conjugation.
pub fn function_algebra<S: Scalar>(k: usize) -> StarAlgebra<S> {
    let mut mult = vec![S::zero(); k * k * k];
    for i in 0..k {
        mult[(i * k + i) * k + i] = S::one();
    }
    let unit = vec![S::one(); k];
    StarAlgebra::new(k, mult, unit, Mat::identity(k)).expect("shapes by construction")
}

/// Full matrix algebra M_N(ℂ) on the basis `E_{rc}` with index `r·N + c`;
/// star is the conjugate transpose.
pub fn matrix_algebra<S: Scalar>(n: usize) -> StarAlgebra<S> {
    let dim = n * n;
    let mut mult = vec![S::zero(); dim * dim * dim];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if b == c {
                        let i = a * n + b;
                        let j = c * n + d;
                        let k = a * n + d;
                        mult[(i * dim + j) * dim + k] = S::one();
                    }
                }
            }
        }
    }
    let mut unit = vec![S::zero(); dim];
    for a in 0..n {
        unit[a * n + a] = S::one();
    }
    let star = Mat::from_fn(dim, dim, |i, j| {
        let (r, c) = (i / n, i % n);
        if j == c * n + r {
            S::one()
        } else {
            S::zero()
        }
    });
    StarAlgebra::new(dim, mult, unit, star).expect("shapes by construction")
}

/// Group algebra ℂ[ℤ_n] on the basis `g^0, …, g^{n−1}`; star sends `g^a` to
/// `g^{−a}`.
pub fn cyclic_group_algebra<S: Scalar>(n: usize) -> StarAlgebra<S> {
    assert!(n >= 1);
    let mut mult = vec![S::zero(); n * n * n];
    for a in 0..n {
        for b in 0..n {
            mult[(a * n + b) * n + (a + b) % n] = S::one();
        }
    }
    let unit = unit_vec(n, 0);
    let star = Mat::from_fn(n, n, |i, j| {
        if i == (n - j % n) % n {
            S::one()
        } else {
            S::zero()
        }
    });
    StarAlgebra::new(n, mult, unit, star).expect("shapes by construction")
}
