//! First-order differential calculi and the universal calculus.

use std::sync::{Arc, OnceLock};

use crate::algebra::StarAlgebra;
use crate::bimodule::{balanced_tensor, Balanced3, BalancedTensor, Bimodule, BimoduleMap};
use crate::error::{Error, Result};
use crate::linalg::{
    is_zero_vec, kernel_basis, kron_vec, max_abs_vec, sub_vec, unit_vec, Mat, Subspace,
};
use crate::scalar::Scalar;
use crate::validate::ValidationReport;

/// A first-order differential calculus (Ω¹, d) over a star-algebra, with an
/// optional star structure making it a ∗-calculus.
///
/// Caches the degree-two scaffolding every second-order construction needs:
/// the tensor square T = Ω¹ ⊗_B Ω¹, the triple product Ω¹ ⊗_B Ω¹ ⊗_B Ω¹, and
/// the three maps out of B ⊗ B (multiplication, a⊗b ↦ a·db, and
/// a⊗b ↦ da ⊗ db into T).
#[derive(Clone, Debug)]
pub struct FirstOrderCalculus<S> {
    pub algebra: Arc<StarAlgebra<S>>,
    pub one_forms: Bimodule<S>,
    /// m × n: column j holds the coordinates of d(e_j).
    pub d: Mat<S>,
    /// Antilinear star on Ω¹ (matrix applied to conjugated coordinates).
    pub star: Option<Mat<S>>,
    /// T = Ω¹ ⊗_B Ω¹.
    pub tensor_square: BalancedTensor<S>,
    /// Ω¹ ⊗_B Ω¹ ⊗_B Ω¹, built on first use (shared across clones).
    triple: Arc<OnceLock<Balanced3<S>>>,
    /// n × n²: multiplication B ⊗ B → B on coordinates.
    pub mult_map: Mat<S>,
    /// m × n²: a ⊗ b ↦ a·db.
    pub pihat1: Mat<S>,
    /// t × n²: a ⊗ b ↦ class(da ⊗ db) in T.
    pub d2t: Mat<S>,
}

impl<S: Scalar> FirstOrderCalculus<S> {
    pub fn new(
        algebra: Arc<StarAlgebra<S>>,
        one_forms: Bimodule<S>,
        d: Mat<S>,
        star: Option<Mat<S>>,
    ) -> Result<Self> {
        let n = algebra.dim;
        let m = one_forms.dim;
        if d.rows != m || d.cols != n {
            return Err(Error::Shape(format!(
                "differential: expected {m}×{n}, got {}×{}",
                d.rows, d.cols
            )));
        }
        if let Some(st) = &star {
            if st.rows != m || st.cols != m {
                return Err(Error::Shape(format!(
                    "star on one-forms: expected {m}×{m}, got {}×{}",
                    st.rows, st.cols
                )));
            }
        }
        let tensor_square = balanced_tensor(&one_forms, &one_forms);
        let mult_map = Mat::from_fn(n, n * n, |k, c| {
            let (i, j) = (c / n, c % n);
            algebra.c(i, j, k).clone()
        });
        let mut pihat1 = Mat::zero(m, n * n);
        for i in 0..n {
            let li = one_forms.left_basis_action(i);
            for j in 0..n {
                let v = li.mul_vec(&d.col(j));
                for r in 0..m {
                    pihat1.set(r, i * n + j, v[r].clone());
                }
            }
        }
        let mut d2t = Mat::zero(tensor_square.module.dim, n * n);
        for i in 0..n {
            for j in 0..n {
                let v = tensor_square.pure(&d.col(i), &d.col(j));
                for r in 0..tensor_square.module.dim {
                    d2t.set(r, i * n + j, v[r].clone());
                }
            }
        }
        Ok(FirstOrderCalculus {
            algebra,
            one_forms,
            d,
            star,
            tensor_square,
            triple: Arc::new(OnceLock::new()),
            mult_map,
            pihat1,
            d2t,
        })
    }

    /// The triple tensor product Ω¹ ⊗_B Ω¹ ⊗_B Ω¹ (lazily built).
    pub fn triple(&self) -> &Balanced3<S> {
        self.triple
            .get_or_init(|| Balanced3::new(&self.one_forms, &self.one_forms, &self.one_forms))
    }

    pub fn one_dim(&self) -> usize {
        self.one_forms.dim
    }

    pub fn tensor_dim(&self) -> usize {
        self.tensor_square.module.dim
    }

    /// d applied to an algebra element in coordinates.
    pub fn d_of(&self, b: &[S]) -> Vec<S> {
        self.d.mul_vec(b)
    }

    /// Star applied to a one-form; errors when the calculus carries none.
    pub fn star_one(&self, w: &[S]) -> Result<Vec<S>> {
        let st = self
            .star
            .as_ref()
            .ok_or_else(|| Error::IllDefined("calculus carries no star structure".into()))?;
        Ok(st.apply_antilinear(w))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = self.one_forms.validate();
        let n = self.algebra.dim;
        let m = self.one_dim();

        // d(1) = 0
        let d1 = self.d_of(&self.algebra.unit);
        if !is_zero_vec(&d1) {
            report.push("differential of unit", "d(1) = 0", max_abs_vec(&d1));
        }
        // Leibniz: d(e_i e_j) = e_i·d(e_j) + d(e_i)·e_j
        for i in 0..n {
            for j in 0..n {
                let mut lhs = vec![S::zero(); m];
                for k in 0..n {
                    let c = self.algebra.c(i, j, k);
                    if !c.is_zero() {
                        crate::linalg::axpy_vec(&mut lhs, c, &self.d.col(k));
                    }
                }
                let rhs = crate::linalg::add_vec(
                    &self.one_forms.left_basis_action(i).mul_vec(&self.d.col(j)),
                    &self.one_forms.right_basis_action(j).mul_vec(&self.d.col(i)),
                );
                let res = sub_vec(&lhs, &rhs);
                if !is_zero_vec(&res) {
                    report.push("Leibniz", format!("(i,j)=({i},{j})"), max_abs_vec(&res));
                }
            }
        }
        // Surjectivity: Ω¹ = span{a·db} = column span of pihat1.
        let r = crate::linalg::rank(&self.pihat1);
        if r != m {
            report.push(
                "surjectivity",
                format!("span of a·db has dimension {r} < {m}"),
                1.0,
            );
        }
        if let Some(st) = &self.star {
            let map = BimoduleMap {
                matrix: st.clone(),
                antilinear: true,
            };
            report.merge(map.validate(&self.one_forms, &self.one_forms));
            // involution
            report.check_zero(
                "star involution on one-forms",
                "ω** = ω",
                &st.mul(&st.conj()).sub(&Mat::identity(m)),
            );
            // (db)* = d(b*)
            report.check_zero(
                "star compatibility with d",
                "(db)* = d(b*)",
                &st.mul(&self.d.conj()).sub(&self.d.mul(&self.algebra.star_mat)),
            );
        }
        report
    }
}

/// The universal calculus Ω¹_u = ker(mult) ⊂ B ⊗ B with δb = 1⊗b − b⊗1.
#[derive(Clone, Debug)]
pub struct UniversalCalculus<S> {
    pub foc: FirstOrderCalculus<S>,
    /// n² × u embedding of the kernel basis into B ⊗ B.
    pub embedding: Mat<S>,
}

pub fn universal_calculus<S: Scalar>(algebra: Arc<StarAlgebra<S>>) -> Result<UniversalCalculus<S>> {
    let n = algebra.dim;
    let mult_map = Mat::from_fn(n, n * n, |k, c| {
        let (i, j) = (c / n, c % n);
        algebra.c(i, j, k).clone()
    });
    let span = Subspace::span(n * n, &kernel_basis(&mult_map));
    let kernel = span.basis.clone();
    let u = kernel.len();
    let embedding = Mat::from_cols(n * n, &kernel);
    let coords = |v: &[S]| -> Result<Vec<S>> {
        span.coords_of(v)
            .ok_or_else(|| Error::IllDefined("vector escapes ker(mult)".into()))
    };

    // Bimodule actions: restrictions of L_i ⊗ I and I ⊗ R_i.
    let idn = Mat::identity(n);
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for i in 0..n {
        let l_amb = algebra.left_mult(i).kron(&idn);
        let r_amb = idn.kron(algebra.right_mult(i));
        let mut li = Mat::zero(u, u);
        let mut ri = Mat::zero(u, u);
        for (a, k) in kernel.iter().enumerate() {
            let lc = coords(&l_amb.mul_vec(k))?;
            let rc = coords(&r_amb.mul_vec(k))?;
            for b in 0..u {
                li.set(b, a, lc[b].clone());
                ri.set(b, a, rc[b].clone());
            }
        }
        left.push(li);
        right.push(ri);
    }
    let one_forms = Bimodule::new(algebra.clone(), u, left, right)?;

    // δ(e_j) = 1 ⊗ e_j − e_j ⊗ 1
    let mut d = Mat::zero(u, n);
    for j in 0..n {
        let lhs = kron_vec(&algebra.unit, &unit_vec(n, j));
        let rhs = kron_vec(&unit_vec(n, j), &algebra.unit);
        let dj = coords(&sub_vec(&lhs, &rhs))?;
        for r in 0..u {
            d.set(r, j, dj[r].clone());
        }
    }

    // Universal star: (Σ x_{ij} e_i⊗e_j)* = Σ conj(x_{ij}) [1⊗(e_j* e_i*) − e_j*⊗e_i*]
    let mut star_amb = Mat::zero(n * n, n * n);
    for i in 0..n {
        let si = algebra.star_elt(&unit_vec(n, i));
        for j in 0..n {
            let sj = algebra.star_elt(&unit_vec(n, j));
            let prod = algebra.mul_elts(&sj, &si);
            let v = sub_vec(&kron_vec(&algebra.unit, &prod), &kron_vec(&sj, &si));
            for r in 0..n * n {
                star_amb.set(r, i * n + j, v[r].clone());
            }
        }
    }
    let mut star = Mat::zero(u, u);
    for (a, k) in kernel.iter().enumerate() {
        let sv = coords(&star_amb.mul_vec(&crate::linalg::conj_vec(k)))?;
        // as an antilinear matrix: column a is star(bar coords of basis a),
        // and basis vectors have real coordinates here (kernel of a real
        // solve need not be real in general, but star_amb∘conj is what we
        // apply; absorb the conj of the basis into the column).
        for b in 0..u {
            star.set(b, a, sv[b].clone());
        }
    }
    let foc = FirstOrderCalculus::new(algebra, one_forms, d, Some(star))?;
    Ok(UniversalCalculus { foc, embedding })
}

/// The canonical surjection Ω¹_u → Ω¹ of any calculus, `a ⊗ b ↦ a·db`,
/// as a matrix on universal coordinates.
pub fn universal_projection<S: Scalar>(
    universal: &UniversalCalculus<S>,
    target: &FirstOrderCalculus<S>,
) -> Mat<S> {
    target.pihat1.mul(&universal.embedding)
}
