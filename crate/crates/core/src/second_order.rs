//! Second-order structures over a first-order calculus: full differential
//! graded data at degree two, junk tensors, weak second-order projectors,
//! quasi-tame splittings, and the degree-two prolongation induced by an
//! ambient product.

use std::sync::Arc;

use crate::algebra::StarAlgebra;
use crate::bimodule::{BimoduleMap, Bimodule};
use crate::calculus::FirstOrderCalculus;
use crate::error::{Error, Result};
use crate::linalg::{
    is_zero_vec, kernel_basis, kron_vec, solve_affine, unit_vec, Mat, Quotient, Subspace,
};
use crate::scalar::Scalar;
use crate::validate::ValidationReport;

/// A second-order differential structure: two-forms with a surjective wedge
/// T = Ω¹ ⊗_B Ω¹ → Ω² and a degree-one differential satisfying d² = 0 and
/// the graded Leibniz rule.
#[derive(Clone, Debug)]
pub struct Dga2<S> {
    pub foc: Arc<FirstOrderCalculus<S>>,
    pub two_forms: Bimodule<S>,
    /// w × t
    pub wedge: Mat<S>,
    /// w × m
    pub d1: Mat<S>,
}

impl<S: Scalar> Dga2<S> {
    pub fn new(
        foc: Arc<FirstOrderCalculus<S>>,
        two_forms: Bimodule<S>,
        wedge: Mat<S>,
        d1: Mat<S>,
    ) -> Result<Self> {
        let (t, m, w) = (foc.tensor_dim(), foc.one_dim(), two_forms.dim);
        if wedge.rows != w || wedge.cols != t {
            return Err(Error::Shape(format!(
                "wedge: expected {w}×{t}, got {}×{}",
                wedge.rows, wedge.cols
            )));
        }
        if d1.rows != w || d1.cols != m {
            return Err(Error::Shape(format!(
                "d1: expected {w}×{m}, got {}×{}",
                d1.rows, d1.cols
            )));
        }
        Ok(Dga2 {
            foc,
            two_forms,
            wedge,
            d1,
        })
    }

    pub fn two_dim(&self) -> usize {
        self.two_forms.dim
    }

    /// ω ∧ η for one-forms in coordinates.
    pub fn wedge_of(&self, w1: &[S], w2: &[S]) -> Vec<S> {
        self.wedge.mul_vec(&self.foc.tensor_square.pure(w1, w2))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = self.two_forms.validate();
        let foc = &self.foc;
        let n = foc.algebra.dim;
        let m = foc.one_dim();
        let w = self.two_dim();

        let map = BimoduleMap {
            matrix: self.wedge.clone(),
            antilinear: false,
        };
        report.merge(map.validate(&foc.tensor_square.module, &self.two_forms));
        let r = crate::linalg::rank(&self.wedge);
        if r != w {
            report.push("wedge surjectivity", format!("rank {r} < {w}"), 1.0);
        }
        report.check_zero("d squared zero", "d1∘d = 0", &self.d1.mul(&foc.d));
        // graded Leibniz, both sides, on basis elements:
        //   d1(e_i·ω_a) = de_i ∧ ω_a + e_i·d1(ω_a)
        //   d1(ω_a·e_i) = d1(ω_a)·e_i − ω_a ∧ de_i
        for i in 0..n {
            let di = foc.d.col(i);
            let mut wedge_d_left = Mat::zero(w, m);
            let mut wedge_d_right = Mat::zero(w, m);
            for a in 0..m {
                let left = self.wedge_of(&di, &unit_vec(m, a));
                let right = self.wedge_of(&unit_vec(m, a), &di);
                for rr in 0..w {
                    wedge_d_left.set(rr, a, left[rr].clone());
                    wedge_d_right.set(rr, a, right[rr].clone());
                }
            }
            report.check_zero(
                "graded Leibniz (left)",
                format!("i={i}"),
                &self
                    .d1
                    .mul(foc.one_forms.left_basis_action(i))
                    .sub(&wedge_d_left)
                    .sub(&self.two_forms.left_basis_action(i).mul(&self.d1)),
            );
            report.check_zero(
                "graded Leibniz (right)",
                format!("i={i}"),
                &self
                    .d1
                    .mul(foc.one_forms.right_basis_action(i))
                    .sub(&self.two_forms.right_basis_action(i).mul(&self.d1))
                    .add(&wedge_d_right),
            );
        }
        report
    }
}

/// Structural equality of two second-order structures on the same calculus:
/// same dimensions and identical matrices in the canonical bases.
pub fn dga_equal<S: Scalar>(a: &Dga2<S>, b: &Dga2<S>) -> bool {
    a.two_dim() == b.two_dim()
        && a.wedge.sub(&b.wedge).is_zero()
        && a.d1.sub(&b.d1).is_zero()
        && (0..a.foc.algebra.dim).all(|i| {
            a.two_forms
                .left_basis_action(i)
                .sub(b.two_forms.left_basis_action(i))
                .is_zero()
                && a.two_forms
                    .right_basis_action(i)
                    .sub(b.two_forms.right_basis_action(i))
                    .is_zero()
        })
}

/// Presentations of zero: basis of W = ker(mult) ∩ ker(π̂₁) inside B ⊗ B.
pub fn zero_presentations<S: Scalar>(foc: &FirstOrderCalculus<S>) -> Vec<Vec<S>> {
    kernel_basis(&foc.mult_map.vstack(&foc.pihat1))
}

/// Canonical basis of the junk tensors JT² ⊂ T: images da ⊗ db of
/// presentations of zero.
pub fn junk_tensors<S: Scalar>(foc: &FirstOrderCalculus<S>) -> Vec<Vec<S>> {
    let images: Vec<Vec<S>> = zero_presentations(foc)
        .iter()
        .map(|x| foc.d2t.mul_vec(x))
        .collect();
    Subspace::span(foc.tensor_dim(), &images).basis
}

/// A weak second-order structure: an idempotent bimodule projector ψ on T
/// whose range contains the junk tensors, together with the induced
/// differential d_ψ: Ω¹ → T.
#[derive(Clone, Debug)]
pub struct WeakSecondOrder<S> {
    pub foc: Arc<FirstOrderCalculus<S>>,
    pub psi: Mat<S>,
    /// t × m: d_ψ(ω_a) = (1 − ψ)(da ⊗ db) over any presentation ω_a = Σ a·db.
    pub d_psi: Mat<S>,
}

impl<S: Scalar> WeakSecondOrder<S> {
    /// Fails when ψ has the wrong shape or its range misses a junk tensor,
    /// in which case d_ψ is not well defined.
    pub fn new(foc: Arc<FirstOrderCalculus<S>>, psi: Mat<S>) -> Result<Self> {
        let t = foc.tensor_dim();
        if psi.rows != t || psi.cols != t {
            return Err(Error::Shape(format!(
                "psi: expected {t}×{t}, got {}×{}",
                psi.rows, psi.cols
            )));
        }
        let ran = Subspace::span(t, &(0..t).map(|j| psi.col(j)).collect::<Vec<_>>());
        for (k, j) in junk_tensors(&foc).iter().enumerate() {
            if !ran.contains(j) {
                return Err(Error::IllDefined(format!(
                    "junk tensor {k} escapes Ran(ψ): d_ψ is not well defined"
                )));
            }
        }
        let d_psi = induced_d_tensor(&foc, Some(&psi))?;
        Ok(WeakSecondOrder { foc, psi, d_psi })
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let t = self.foc.tensor_dim();
        report.check_zero(
            "psi idempotent",
            "ψ² = ψ",
            &self.psi.mul(&self.psi).sub(&self.psi),
        );
        let map = BimoduleMap {
            matrix: self.psi.clone(),
            antilinear: false,
        };
        let tm = &self.foc.tensor_square.module;
        report.merge(map.validate(tm, tm));
        let ran = Subspace::span(t, &(0..t).map(|j| self.psi.col(j)).collect::<Vec<_>>());
        for (k, j) in junk_tensors(&self.foc).iter().enumerate() {
            if !ran.contains(j) {
                report.push("junk containment", format!("junk tensor {k}"), 1.0);
            }
        }
        // d_ψ Leibniz: d_ψ(b·ω) = b·d_ψ(ω) + (1−ψ)(db ⊗ ω)
        let m = self.foc.one_dim();
        let one_minus = Mat::identity(t).sub(&self.psi);
        for i in 0..self.foc.algebra.dim {
            let di = self.foc.d.col(i);
            let mut db_tensor = Mat::zero(t, m);
            for a in 0..m {
                let v = self.foc.tensor_square.pure(&di, &unit_vec(m, a));
                for r in 0..t {
                    db_tensor.set(r, a, v[r].clone());
                }
            }
            report.check_zero(
                "d_psi Leibniz",
                format!("i={i}"),
                &self
                    .d_psi
                    .mul(self.foc.one_forms.left_basis_action(i))
                    .sub(&self.foc.tensor_square.module.left_basis_action(i).mul(&self.d_psi))
                    .sub(&one_minus.mul(&db_tensor)),
            );
        }
        report
    }
}

/// Solve the presentation problem for every basis one-form and push through
/// da ⊗ db, applying `1 − ψ` when a projector is given.
fn induced_d_tensor<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    psi: Option<&Mat<S>>,
) -> Result<Mat<S>> {
    let (t, m, n) = (foc.tensor_dim(), foc.one_dim(), foc.algebra.dim);
    let stacked = foc.mult_map.vstack(&foc.pihat1);
    let mut rhs = Mat::zero(n + m, m);
    for a in 0..m {
        rhs.set(n + a, a, S::one());
    }
    let x = crate::linalg::solve_matrix(&stacked, &rhs).ok_or_else(|| {
        Error::Infeasible("one-form has no presentation Σ a·db with Σ a·b = 0".into())
    })?;
    let mut d2x = foc.d2t.mul(&x);
    if let Some(p) = psi {
        d2x = Mat::identity(t).sub(p).mul(&d2x);
    }
    Ok(d2x)
}

/// The prolongation differential d_T: Ω¹ → T with no projector applied
/// (equivalently d_ψ for ψ = 0; only well defined when junk vanishes, which
/// the caller is responsible for).
pub fn prolongation_d<S: Scalar>(foc: &FirstOrderCalculus<S>) -> Result<Mat<S>> {
    induced_d_tensor(foc, None)
}

/// Left-and-right-linear splitting s: Ω² → T with ∧∘s = id, if one exists.
/// Returns the canonical solution of the linear system.
pub fn quasi_tame_splitting<S: Scalar>(dga: &Dga2<S>) -> Option<Mat<S>> {
    let foc = &dga.foc;
    let (t, w, n) = (foc.tensor_dim(), dga.two_dim(), foc.algebra.dim);
    let idt = Mat::identity(t);
    let idw = Mat::identity(w);
    let mut rows: Vec<Mat<S>> = Vec::new();
    let mut rhs: Vec<S> = Vec::new();
    for i in 0..n {
        // s·L^{Ω²}_i − L^T_i·s = 0
        let a = idt.kron(&dga.two_forms.left_basis_action(i).transpose()).sub(
            &foc.tensor_square
                .module
                .left_basis_action(i)
                .kron(&idw),
        );
        rows.push(a);
        rhs.extend(std::iter::repeat_n(S::zero(), t * w));
        let b = idt.kron(&dga.two_forms.right_basis_action(i).transpose()).sub(
            &foc.tensor_square
                .module
                .right_basis_action(i)
                .kron(&idw),
        );
        rows.push(b);
        rhs.extend(std::iter::repeat_n(S::zero(), t * w));
    }
    // ∧·s = id
    rows.push(dga.wedge.kron(&idw));
    rhs.extend(Mat::<S>::identity(w).to_vec());
    let system = rows
        .into_iter()
        .reduce(|acc, blk| acc.vstack(&blk))
        .expect("at least the identity row block");
    let sol = solve_affine(&system, &rhs)?;
    Some(Mat::from_flat(t, w, sol.base))
}

/// ψ_s = 1 − s∘∧ from a quasi-tame splitting.
pub fn psi_from_splitting<S: Scalar>(dga: &Dga2<S>, s: &Mat<S>) -> Mat<S> {
    Mat::identity(dga.foc.tensor_dim()).sub(&s.mul(&dga.wedge))
}

/// Recover the splitting from a weak second-order projector of splitting
/// type: the unique s with ∧∘s = id and s∘∧ = 1 − ψ.
pub fn splitting_from_psi<S: Scalar>(dga: &Dga2<S>, psi: &Mat<S>) -> Result<Mat<S>> {
    let foc = &dga.foc;
    let (t, w) = (foc.tensor_dim(), dga.two_dim());
    let idt = Mat::identity(t);
    let idw = Mat::identity(w);
    let top = dga.wedge.kron(&idw);
    let bot = idt.kron(&dga.wedge.transpose());
    let system = top.vstack(&bot);
    let mut rhs = Mat::<S>::identity(w).to_vec();
    rhs.extend(idt.sub(psi).to_vec());
    let sol = solve_affine(&system, &rhs).ok_or_else(|| {
        Error::IllDefined("ψ is not of splitting type for this wedge".into())
    })?;
    Ok(Mat::from_flat(t, w, sol.base))
}

/// Ambient degree-two data for the induced-product construction: either the
/// calculus' own second-order structure, or a represented picture where
/// one-forms embed into an auxiliary algebra and multiply there.
pub enum ConnesAmbient<'a, S: Scalar> {
    SelfDga(&'a Dga2<S>),
    Matrix {
        ambient: &'a StarAlgebra<S>,
        /// ambient-coords of ρ(e_i), as columns (amb_dim × n).
        rep: &'a Mat<S>,
        /// ambient-coords of the embedded one-form basis (amb_dim × m).
        embed: &'a Mat<S>,
    },
}

/// Output of the induced second-order construction.
pub struct ConnesSecondOrder<S> {
    pub dga: Dga2<S>,
    /// Dimension of the junk space J² inside the ambient product range.
    pub junk_dim: usize,
    /// Dimension of the span of products of two one-forms.
    pub range_dim: usize,
    /// Ambient coordinates of the chosen range basis (ambient² × range_dim).
    pub range_basis: Mat<S>,
    /// Ambient lift of the two-form basis (ambient² × two_dim).
    pub lift: Mat<S>,
    /// Projection from range coordinates onto two-form coordinates
    /// (two_dim × range_dim), killing junk.
    pub junk_projector: Mat<S>,
}

/// Degree-2 ambient data: dimension, product map, and module actions.
type AmbientDegree2<S> = (usize, Mat<S>, Vec<Mat<S>>, Vec<Mat<S>>);

/// Build the second-order calculus induced by an ambient product:
/// Ω² = span(ω·η) / J², with J² generated by products over presentations of
/// zero, and the differential defined through presentations. Errors when the
/// differential fails to descend (presentations differing by non-junk).
pub fn connes_second_order<S: Scalar>(
    foc: &Arc<FirstOrderCalculus<S>>,
    ambient: ConnesAmbient<'_, S>,
) -> Result<ConnesSecondOrder<S>> {
    let n = foc.algebra.dim;
    let m = foc.one_dim();

    // Ambient product and module actions on ambient-degree-2 coordinates.
    let (amb2, mul2, left2, right2): AmbientDegree2<S> = match ambient {
        ConnesAmbient::SelfDga(dga) => {
            let w = dga.two_dim();
            let mul2 = dga.wedge.mul(&foc.tensor_square.quot.projector);
            let left2 = (0..n)
                .map(|i| dga.two_forms.left_basis_action(i).clone())
                .collect();
            let right2 = (0..n)
                .map(|i| dga.two_forms.right_basis_action(i).clone())
                .collect();
            (w, mul2, left2, right2)
        }
        ConnesAmbient::Matrix { ambient, rep, embed } => {
            let ad = ambient.dim;
            if rep.rows != ad || rep.cols != n {
                return Err(Error::Shape(format!(
                    "rep: expected {ad}×{n}, got {}×{}",
                    rep.rows, rep.cols
                )));
            }
            if embed.rows != ad || embed.cols != m {
                return Err(Error::Shape(format!(
                    "embed: expected {ad}×{m}, got {}×{}",
                    embed.rows, embed.cols
                )));
            }
            if crate::linalg::rank(embed) != m {
                return Err(Error::IllDefined(
                    "one-form embedding is not injective".into(),
                ));
            }
            let mut mul2 = Mat::zero(ad, m * m);
            for a in 0..m {
                let ea = embed.col(a);
                let la = ambient.left_mult_of(&ea);
                for b in 0..m {
                    let prod = la.mul_vec(&embed.col(b));
                    for r in 0..ad {
                        mul2.set(r, a * m + b, prod[r].clone());
                    }
                }
            }
            let left2 = (0..n)
                .map(|i| ambient.left_mult_of(&rep.col(i)))
                .collect();
            let right2 = (0..n)
                .map(|i| ambient.right_mult_of(&rep.col(i)))
                .collect();
            (ad, mul2, left2, right2)
        }
    };

    // Range of the product map.
    let ran = Subspace::span(amb2, &(0..m * m).map(|j| mul2.col(j)).collect::<Vec<_>>());
    let range_dim = ran.dim();
    let c_basis = Mat::from_cols(amb2, &ran.basis);
    let ran_coords = |v: &[S]| -> Result<Vec<S>> {
        ran.coords_of(v).ok_or_else(|| {
            Error::IllDefined("product of one-forms escapes its own span".into())
        })
    };

    // D2: B⊗B → ambient², x ↦ Σ x_ij (de_i)(de_j).
    let mut d2amb = Mat::zero(amb2, n * n);
    for i in 0..n {
        for j in 0..n {
            let v = mul2.mul_vec(&kron_vec(&foc.d.col(i), &foc.d.col(j)));
            for r in 0..amb2 {
                d2amb.set(r, i * n + j, v[r].clone());
            }
        }
    }

    // Junk: images of presentations of zero, in range coordinates.
    let mut junk_in_ran: Vec<Vec<S>> = Vec::new();
    for wv in zero_presentations(foc) {
        junk_in_ran.push(ran_coords(&d2amb.mul_vec(&wv))?);
    }
    let quot = Quotient::by_relations(range_dim, &junk_in_ran);
    let junk_dim = range_dim - quot.dim;

    // Well-definedness of the induced differential: presentations of the
    // same one-form differ by ker(π̂₁), whose image must be junk.
    for k in kernel_basis(&foc.pihat1) {
        let v = ran_coords(&d2amb.mul_vec(&k))?;
        if !is_zero_vec(&quot.project(&v)) {
            return Err(Error::IllDefined(
                "induced differential does not descend: presentations of the same \
                 one-form differ by a non-junk product"
                    .into(),
            ));
        }
    }

    // Two-forms bimodule on quotient coordinates.
    let lift_amb = c_basis.mul(&quot.section);
    let act = |amb_act: &Mat<S>| -> Result<Mat<S>> {
        let moved = amb_act.mul(&lift_amb);
        let mut out = Mat::zero(quot.dim, quot.dim);
        for j in 0..quot.dim {
            let rc = ran_coords(&moved.col(j))?;
            let qc = quot.project(&rc);
            for r in 0..quot.dim {
                out.set(r, j, qc[r].clone());
            }
        }
        Ok(out)
    };
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for i in 0..n {
        left.push(act(&left2[i])?);
        right.push(act(&right2[i])?);
    }
    let two_forms = Bimodule::new(foc.algebra.clone(), quot.dim, left, right)?;

    // Wedge: T → Ω²; and the differential via presentations.
    let mul2_t = mul2.mul(&foc.tensor_square.quot.section);
    let mut wedge = Mat::zero(quot.dim, foc.tensor_dim());
    for j in 0..foc.tensor_dim() {
        let qc = quot.project(&ran_coords(&mul2_t.col(j))?);
        for r in 0..quot.dim {
            wedge.set(r, j, qc[r].clone());
        }
    }
    let mut rhs = Mat::zero(m, m);
    for a in 0..m {
        rhs.set(a, a, S::one());
    }
    let x = crate::linalg::solve_matrix(&foc.pihat1, &rhs).ok_or_else(|| {
        Error::Infeasible("calculus is not surjective: some one-form has no presentation".into())
    })?;
    let d2x = d2amb.mul(&x);
    let mut d1 = Mat::zero(quot.dim, m);
    for a in 0..m {
        let qc = quot.project(&ran_coords(&d2x.col(a))?);
        for r in 0..quot.dim {
            d1.set(r, a, qc[r].clone());
        }
    }

    let dga = Dga2::new(foc.clone(), two_forms, wedge, d1)?;
    Ok(ConnesSecondOrder {
        dga,
        junk_dim,
        range_dim,
        range_basis: c_basis,
        lift: lift_amb,
        junk_projector: quot.projector,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{function_algebra, matrix_algebra};
    use crate::calculus::universal_calculus;
    use crate::scalar::Exact;
    use crate::linalg::sub_vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Two-point calculus with the junk-free prolongation Ω² = T, ∧ = id.
    fn two_point_dga() -> Dga2<Exact> {
        let u = universal_calculus(Arc::new(function_algebra::<Exact>(2))).unwrap();
        let foc = Arc::new(u.foc);
        let t = foc.tensor_dim();
        let d1 = prolongation_d(&foc).unwrap();
        Dga2::new(
            foc.clone(),
            foc.tensor_square.module.clone(),
            Mat::identity(t),
            d1,
        )
        .unwrap()
    }

    #[test]
    fn universal_calculi_have_no_junk() {
        for alg in [
            function_algebra::<Exact>(2),
            function_algebra::<Exact>(3),
            matrix_algebra::<Exact>(2),
        ] {
            let u = universal_calculus(Arc::new(alg)).unwrap();
            assert!(junk_tensors(&u.foc).is_empty());
        }
    }

    #[test]
    fn two_point_prolongation_is_valid_dga() {
        let dga = two_point_dga();
        let rep = dga.validate();
        assert!(rep.ok(), "{rep}");
        assert_eq!(dga.two_dim(), 2);
    }

    /// Diagonal calculus on ℂ³ from the chain graph 1—2—3: Ω¹ has basis
    /// E₁₂, E₂₁, E₂₃, E₃₂ inside M₃ and d(b) = i[D, ρ(b)] with D the chain
    /// adjacency matrix. Junk in degree two is the span of the two paths
    /// 1→2→3 and 3→2→1.
    fn chain_foc() -> (Arc<FirstOrderCalculus<Exact>>, Mat<Exact>, Mat<Exact>) {
        let alg = Arc::new(function_algebra::<Exact>(3));
        // ω₁=E₁₂, ω₂=E₂₁, ω₃=E₂₃, ω₄=E₃₂; left index r, right index c of E_rc
        let rows_of = [0usize, 1, 1, 2];
        let cols_of = [1usize, 0, 2, 1];
        let m = 4;
        let mk_diag = |sel: &dyn Fn(usize) -> usize, i: usize| {
            Mat::from_fn(m, m, |r, c| {
                if r == c && sel(r) == i {
                    Exact::one()
                } else {
                    Exact::zero()
                }
            })
        };
        let left: Vec<Mat<Exact>> = (0..3).map(|i| mk_diag(&|k| rows_of[k], i)).collect();
        let right: Vec<Mat<Exact>> = (0..3).map(|i| mk_diag(&|k| cols_of[k], i)).collect();
        let one_forms = Bimodule::new(alg.clone(), m, left, right).unwrap();
        // d(e₁) = i(ω₂ − ω₁), d(e₂) = i(ω₁ − ω₂ − ω₃ + ω₄), d(e₃) = i(ω₃ − ω₄)
        let i = Exact::i();
        let d = Mat::from_cols(
            4,
            &[
                vec![-i.clone(), i.clone(), Exact::zero(), Exact::zero()],
                vec![i.clone(), -i.clone(), -i.clone(), i.clone()],
                vec![Exact::zero(), Exact::zero(), i.clone(), -i.clone()],
            ],
        );
        let foc = Arc::new(FirstOrderCalculus::new(alg, one_forms, d, None).unwrap());
        // ambient picture in M₃
        let rep = Mat::from_cols(
            9,
            &[
                crate::linalg::unit_vec(9, 0),
                crate::linalg::unit_vec(9, 4),
                crate::linalg::unit_vec(9, 8),
            ],
        );
        let embed = Mat::from_cols(
            9,
            &[
                crate::linalg::unit_vec(9, 1), // E₁₂
                crate::linalg::unit_vec(9, 3), // E₂₁
                crate::linalg::unit_vec(9, 5), // E₂₃
                crate::linalg::unit_vec(9, 7), // E₃₂
            ],
        );
        (foc, rep, embed)
    }

    #[test]
    fn chain_calculus_junk_dimension() {
        let (foc, _, _) = chain_foc();
        assert!(foc.validate().ok());
        // T has dimension 6 (composable pairs); junk is 2-dimensional:
        // the images of e₁⊗e₃ and e₃⊗e₁.
        assert_eq!(foc.tensor_dim(), 6);
        let junk = junk_tensors(&foc);
        assert_eq!(junk.len(), 2);
        // the junk tensors are the classes of E₁₂⊗E₂₃ and E₃₂⊗E₂₁
        let t12_23 = foc
            .tensor_square
            .pure(&unit_vec(4, 0), &unit_vec(4, 2));
        let t32_21 = foc
            .tensor_square
            .pure(&unit_vec(4, 3), &unit_vec(4, 1));
        let js = Subspace::span(6, &junk);
        assert!(js.contains(&t12_23));
        assert!(js.contains(&t32_21));
    }

    #[test]
    fn junk_matches_random_sampling_oracle() {
        // Independent route: random elements of W = ker[mult; π̂₁] must map
        // into the junk span and generically fill it.
        let (foc, _, _) = chain_foc();
        let junk = junk_tensors(&foc);
        let js = Subspace::span(foc.tensor_dim(), &junk);
        let w = zero_presentations(&foc);
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let mut sampled: Vec<Vec<Exact>> = Vec::new();
        for _ in 0..20 {
            let mut v = crate::linalg::zero_vec(9);
            for b in &w {
                crate::linalg::axpy_vec(&mut v, &Exact::random_small(&mut rng), b);
            }
            let img = foc.d2t.mul_vec(&v);
            assert!(js.contains(&img));
            sampled.push(img);
        }
        let ss = Subspace::span(foc.tensor_dim(), &sampled);
        assert!(ss.eq_subspace(&js), "sampled span must equal junk span");
    }

    #[test]
    fn wso_rejects_psi_missing_junk() {
        let (foc, _, _) = chain_foc();
        let t = foc.tensor_dim();
        // ψ = 0 has zero range; junk is nonzero here.
        let r = WeakSecondOrder::new(foc.clone(), Mat::zero(t, t));
        assert!(r.is_err());
        // ψ = id always works, with d_ψ = 0.
        let w = WeakSecondOrder::new(foc.clone(), Mat::identity(t)).unwrap();
        assert!(w.d_psi.is_zero());
        assert!(w.validate().ok());
    }

    #[test]
    fn wso_on_junk_projector_validates() {
        let (foc, _, _) = chain_foc();
        let t = foc.tensor_dim();
        // project onto the junk coordinates (diagonal actions make every
        // coordinate subspace a subbimodule)
        let junk = junk_tensors(&foc);
        let mut psi = Mat::zero(t, t);
        for j in &junk {
            // junk basis vectors are coordinate vectors here
            let nz: Vec<usize> = (0..t).filter(|&k| !j[k].is_zero()).collect();
            assert_eq!(nz.len(), 1);
            psi.set(nz[0], nz[0], Exact::one());
        }
        let w = WeakSecondOrder::new(foc.clone(), psi).unwrap();
        let rep = w.validate();
        assert!(rep.ok(), "{rep}");
        // non-idempotent ψ is caught
        let bad = WeakSecondOrder::new(foc.clone(), w.psi.scale(&Exact::from_i64(2)));
        if let Ok(b) = bad {
            assert!(!b.validate().ok());
        }
    }

    #[test]
    fn two_point_psi_zero_and_dpsi() {
        let u = universal_calculus(Arc::new(function_algebra::<Exact>(2))).unwrap();
        let foc = Arc::new(u.foc);
        let t = foc.tensor_dim();
        // no junk: ψ = 0 is allowed and d_ψ is the full prolongation
        let w = WeakSecondOrder::new(foc.clone(), Mat::zero(t, t)).unwrap();
        assert!(w.validate().ok());
        assert_eq!(w.d_psi, prolongation_d(&foc).unwrap());
        // d_ψ ∘ d = 0: db has the presentation 1⊗b − b⊗1, whose image under
        // da ⊗ db vanishes
        assert!(w.d_psi.mul(&foc.d).is_zero());
    }

    #[test]
    fn quasi_tame_roundtrips_on_two_point() {
        let dga = two_point_dga();
        let s = quasi_tame_splitting(&dga).expect("wedge is an iso here");
        // ∧s = id and the induced ψ vanishes (wedge is injective)
        assert_eq!(dga.wedge.mul(&s), Mat::identity(2));
        let psi = psi_from_splitting(&dga, &s);
        assert!(psi.is_zero());
        let s2 = splitting_from_psi(&dga, &psi).unwrap();
        assert_eq!(s, s2);
        let psi2 = psi_from_splitting(&dga, &s2);
        assert!(psi2.is_zero());
    }

    #[test]
    fn connes_fixed_point_on_two_point() {
        let dga = two_point_dga();
        let out = connes_second_order(&dga.foc, ConnesAmbient::SelfDga(&dga)).unwrap();
        assert_eq!(out.junk_dim, 0);
        assert_eq!(out.range_dim, 2);
        assert!(dga_equal(&out.dga, &dga), "induced structure must reproduce the input");
    }

    #[test]
    fn connes_matrix_ambient_chain() {
        let (foc, rep, embed) = chain_foc();
        let amb = matrix_algebra::<Exact>(3);
        let out = connes_second_order(
            &foc,
            ConnesAmbient::Matrix {
                ambient: &amb,
                rep: &rep,
                embed: &embed,
            },
        )
        .unwrap();
        // products span {E₁₁, E₂₂, E₃₃, E₁₃, E₃₁}; junk kills the two paths
        assert_eq!(out.range_dim, 5);
        assert_eq!(out.junk_dim, 2);
        assert_eq!(out.dga.two_dim(), 3);
        let rep2 = out.dga.validate();
        assert!(rep2.ok(), "{rep2}");
        // d² = 0 comes with the construction
        assert!(out.dga.d1.mul(&foc.d).is_zero());
    }

    #[test]
    fn connes_fixed_point_on_chain_quotient() {
        // The chain calculus with Ω² := T/JT² and the induced differential is
        // a valid second-order structure, and the induced-product
        // construction on it reproduces it.
        let (foc, _, _) = chain_foc();
        let t = foc.tensor_dim();
        let quot = Quotient::by_relations(t, &junk_tensors(&foc));
        let left = (0..3)
            .map(|i| {
                quot.projector
                    .mul(foc.tensor_square.module.left_basis_action(i))
                    .mul(&quot.section)
            })
            .collect();
        let right = (0..3)
            .map(|i| {
                quot.projector
                    .mul(foc.tensor_square.module.right_basis_action(i))
                    .mul(&quot.section)
            })
            .collect();
        let two_forms = Bimodule::new(foc.algebra.clone(), quot.dim, left, right).unwrap();
        // ψ = projection onto junk along the coordinate complement
        let junk = junk_tensors(&foc);
        let mut psi = Mat::zero(t, t);
        for j in &junk {
            let nz: Vec<usize> = (0..t).filter(|&k| !j[k].is_zero()).collect();
            psi.set(nz[0], nz[0], Exact::one());
        }
        let wso = WeakSecondOrder::new(foc.clone(), psi).unwrap();
        let d1 = quot.projector.mul(&wso.d_psi);
        let dga = Dga2::new(foc.clone(), two_forms, quot.projector.clone(), d1).unwrap();
        let rep = dga.validate();
        assert!(rep.ok(), "{rep}");
        // in the self-ambient picture the wedge already kills the junk, so
        // the induced construction sees none and reproduces the structure
        let out = connes_second_order(&foc, ConnesAmbient::SelfDga(&dga)).unwrap();
        assert_eq!(out.junk_dim, 0);
        assert_eq!(out.range_dim, 4);
        assert!(dga_equal(&out.dga, &dga));
    }

    #[test]
    fn connes_errors_on_nonsurjective_calculus() {
        // Add a dead one-form direction: no presentation exists for it.
        let alg = Arc::new(function_algebra::<Exact>(2));
        let u = universal_calculus(alg.clone()).unwrap();
        let m = u.foc.one_dim();
        let extend = |base: &Mat<Exact>, i: usize| {
            Mat::from_fn(m + 1, m + 1, |r, c| {
                if r < m && c < m {
                    base.at(r, c).clone()
                } else if r == m && c == m && i == 0 {
                    // the extra direction is the rank-one module where e₁
                    // acts as the identity and e₂ as zero
                    Exact::one()
                } else {
                    Exact::zero()
                }
            })
        };
        let left: Vec<Mat<Exact>> = (0..2)
            .map(|i| extend(u.foc.one_forms.left_basis_action(i), i))
            .collect();
        let right: Vec<Mat<Exact>> = (0..2)
            .map(|i| extend(u.foc.one_forms.right_basis_action(i), i))
            .collect();
        let one_forms = Bimodule::new(alg.clone(), m + 1, left, right).unwrap();
        let d = u.foc.d.vstack(&Mat::zero(1, 2));
        let foc = Arc::new(FirstOrderCalculus::new(alg, one_forms, d, None).unwrap());
        assert!(!foc.validate().ok(), "surjectivity must fail");
        let t = foc.tensor_dim();
        let dga = Dga2::new(
            foc.clone(),
            foc.tensor_square.module.clone(),
            Mat::identity(t),
            Mat::zero(t, m + 1),
        )
        .unwrap();
        let r = connes_second_order(&foc, ConnesAmbient::SelfDga(&dga));
        assert!(r.is_err());
    }

    #[test]
    fn dga_validator_catches_broken_leibniz() {
        let dga = two_point_dga();
        let mut bad = dga.d1.clone();
        bad.set(0, 0, bad.at(0, 0).clone() + Exact::one());
        let broken = Dga2::new(
            dga.foc.clone(),
            dga.two_forms.clone(),
            dga.wedge.clone(),
            bad,
        )
        .unwrap();
        let rep = broken.validate();
        assert!(rep
            .violations
            .iter()
            .any(|v| v.rule.contains("Leibniz") || v.rule.contains("squared")));
    }

    #[test]
    fn prolongation_presentation_identity() {
        // For any presentation ω = Σ a·db with Σ ab = 0, the prolongation
        // satisfies d_T(ω) = Σ da⊗db exactly.
        let u = universal_calculus(Arc::new(function_algebra::<Exact>(2))).unwrap();
        let foc = Arc::new(u.foc);
        let dt = prolongation_d(&foc).unwrap();
        for w in zero_presentations(&foc) {
            // shifting a presentation by W must not change da⊗db mod junk,
            // and junk vanishes here
            assert!(is_zero_vec(&foc.d2t.mul_vec(&w)));
        }
        // explicit check: ω = e₁·d(e₂) has presentation e₁⊗e₂ − e₁e₂⊗1
        let pres = {
            let mut v = crate::linalg::zero_vec::<Exact>(4);
            v[1] = Exact::one(); // e₁⊗e₂ in row-major pair coordinates
            v
        };
        // e₁e₂ = 0 in ℂ², so the presentation is just e₁⊗e₂
        let omega = foc.pihat1.mul_vec(&pres);
        let got = dt.mul_vec(&omega);
        let want = foc.d2t.mul_vec(&pres);
        assert!(is_zero_vec(&sub_vec(&got, &want)));
    }
}
