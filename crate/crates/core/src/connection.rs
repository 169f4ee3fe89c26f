//! Left connections on one-forms: the Leibniz solution space, the induced
//! braiding σ, the tensor-square connection, torsion in both conventions,
//! and star-preservation.

use crate::bimodule::{swap_mat, BalancedTensor, BimoduleMap};
use crate::calculus::FirstOrderCalculus;
use crate::error::{Error, Result};
use crate::linalg::{
    is_zero_vec, kernel_basis, solve_affine, unit_vec, AffineSubspace, Mat,
};
use crate::scalar::Scalar;
use crate::second_order::{Dga2, WeakSecondOrder};
use crate::validate::ValidationReport;

/// The affine system A·vec(∇) = rhs expressing the left Leibniz rule
/// ∇(b·ω) = db ⊗ ω + b·∇ω for a map ∇: Ω¹ → Ω¹ ⊗ Ω¹ (a t×m matrix,
/// flattened row-major).
pub fn leibniz_system<S: Scalar>(foc: &FirstOrderCalculus<S>) -> (Mat<S>, Vec<S>) {
    let (t, m, n) = (foc.tensor_dim(), foc.one_dim(), foc.algebra.dim);
    let idt = Mat::identity(t);
    let idm = Mat::identity(m);
    let mut blocks: Vec<Mat<S>> = Vec::with_capacity(n);
    let mut rhs: Vec<S> = Vec::with_capacity(n * t * m);
    for i in 0..n {
        let di = foc.d.col(i);
        blocks.push(
            idt.kron(&foc.one_forms.left_basis_action(i).transpose()).sub(
                &foc.tensor_square
                    .module
                    .left_basis_action(i)
                    .kron(&idm),
            ),
        );
        let mut k = Mat::zero(t, m);
        for a in 0..m {
            let v = foc.tensor_square.pure(&di, &unit_vec(m, a));
            for r in 0..t {
                k.set(r, a, v[r].clone());
            }
        }
        rhs.extend(k.to_vec());
    }
    let a = blocks
        .into_iter()
        .reduce(|acc, b| acc.vstack(&b))
        .expect("algebra has at least the unit direction");
    (a, rhs)
}

/// All left connections on Ω¹, as an affine space of flattened t×m matrices.
/// `None` when no connection exists.
pub fn connection_space<S: Scalar>(foc: &FirstOrderCalculus<S>) -> Option<AffineSubspace<S>> {
    let (a, rhs) = leibniz_system(foc);
    solve_affine(&a, &rhs)
}

/// Residuals of the left Leibniz rule for a candidate connection.
pub fn leibniz_residuals<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    nabla: &Mat<S>,
) -> ValidationReport {
    let mut report = ValidationReport::new();
    let (t, m) = (foc.tensor_dim(), foc.one_dim());
    for i in 0..foc.algebra.dim {
        let di = foc.d.col(i);
        let mut k = Mat::zero(t, m);
        for a in 0..m {
            let v = foc.tensor_square.pure(&di, &unit_vec(m, a));
            for r in 0..t {
                k.set(r, a, v[r].clone());
            }
        }
        report.check_zero(
            "connection Leibniz",
            format!("i={i}"),
            &nabla
                .mul(foc.one_forms.left_basis_action(i))
                .sub(&k)
                .sub(&foc.tensor_square.module.left_basis_action(i).mul(nabla)),
        );
    }
    report
}

/// Outcome of deriving the braiding σ: T → T of a left connection from
/// the right Leibniz defect ∇(ω·b) − (∇ω)·b = σ(ω ⊗ db).
pub enum SigmaResult<S> {
    Unique(Mat<S>),
    Family { base: Mat<S>, directions: Vec<Mat<S>> },
    NotBimodule,
}

impl<S: Scalar> SigmaResult<S> {
    /// The canonical representative, when one exists.
    pub fn canonical(&self) -> Option<&Mat<S>> {
        match self {
            SigmaResult::Unique(s) => Some(s),
            SigmaResult::Family { base, .. } => Some(base),
            SigmaResult::NotBimodule => None,
        }
    }
}

/// Solve for a bimodule map σ: T → T with σ(ω ⊗ db) = ∇(ω·b) − (∇ω)·b.
pub fn derive_sigma<S: Scalar>(foc: &FirstOrderCalculus<S>, nabla: &Mat<S>) -> SigmaResult<S> {
    let (t, m, n) = (foc.tensor_dim(), foc.one_dim(), foc.algebra.dim);
    let idt = Mat::identity(t);
    let mut blocks: Vec<Mat<S>> = Vec::new();
    let mut rhs: Vec<S> = Vec::new();
    let tm = &foc.tensor_square.module;
    for i in 0..n {
        // bilinearity: σ commutes with both actions
        blocks.push(
            idt.kron(&tm.left_basis_action(i).transpose())
                .sub(&tm.left_basis_action(i).kron(&idt)),
        );
        rhs.extend(std::iter::repeat_n(S::zero(), t * t));
        blocks.push(
            idt.kron(&tm.right_basis_action(i).transpose())
                .sub(&tm.right_basis_action(i).kron(&idt)),
        );
        rhs.extend(std::iter::repeat_n(S::zero(), t * t));
        // defining values: σ·V_i = W_i with V_i col a = ω_a ⊗ de_i
        let di = foc.d.col(i);
        let mut v = Mat::zero(t, m);
        for a in 0..m {
            let p = foc.tensor_square.pure(&unit_vec(m, a), &di);
            for r in 0..t {
                v.set(r, a, p[r].clone());
            }
        }
        blocks.push(idt.kron(&v.transpose()));
        let w = nabla
            .mul(foc.one_forms.right_basis_action(i))
            .sub(&tm.right_basis_action(i).mul(nabla));
        rhs.extend(w.to_vec());
    }
    let a = blocks
        .into_iter()
        .reduce(|acc, b| acc.vstack(&b))
        .expect("nonempty system");
    match solve_affine(&a, &rhs) {
        None => SigmaResult::NotBimodule,
        Some(sol) => {
            let base = Mat::from_flat(t, t, sol.base);
            if sol.directions.is_empty() {
                SigmaResult::Unique(base)
            } else {
                SigmaResult::Family {
                    base,
                    directions: sol
                        .directions
                        .into_iter()
                        .map(|d| Mat::from_flat(t, t, d))
                        .collect(),
                }
            }
        }
    }
}

/// The flip ω ⊗ η ↦ η ⊗ ω on a balanced tensor square, when it descends.
pub fn flip_sigma<S: Scalar>(square: &BalancedTensor<S>) -> Result<Mat<S>> {
    let m = square.e_dim;
    if square.f_dim != m {
        return Err(Error::Shape("flip needs a tensor square".into()));
    }
    let sw = swap_mat::<S>(m, m);
    let proj = &square.quot.projector;
    for k in kernel_basis(proj) {
        if !is_zero_vec(&proj.mul_vec(&sw.mul_vec(&k))) {
            return Err(Error::NotBimodule(
                "the flip does not descend to the balanced tensor square".into(),
            ));
        }
    }
    let sigma = proj.mul(&sw).mul(&square.quot.section);
    let map = BimoduleMap {
        matrix: sigma.clone(),
        antilinear: false,
    };
    map.validate(&square.module, &square.module)
        .require("flip braiding")
        .map_err(|e| Error::NotBimodule(e.to_string()))?;
    Ok(sigma)
}

/// The tensor-square connection ∇_T = ∇ ⊗ id + (σ ⊗ id)(id ⊗ ∇) as a map
/// T → Ω¹ ⊗ Ω¹ ⊗ Ω¹. Errors when σ is not a braiding of ∇, in which case
/// the combination does not descend to T.
pub fn tensor_connection<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    nabla: &Mat<S>,
    sigma: &Mat<S>,
) -> Result<Mat<S>> {
    let m = foc.one_dim();
    for i in 0..foc.algebra.dim {
        let di = foc.d.col(i);
        let mut v = Mat::zero(foc.tensor_dim(), m);
        for a in 0..m {
            let p = foc.tensor_square.pure(&unit_vec(m, a), &di);
            for r in 0..foc.tensor_dim() {
                v.set(r, a, p[r].clone());
            }
        }
        let w = nabla
            .mul(foc.one_forms.right_basis_action(i))
            .sub(&foc.tensor_square.module.right_basis_action(i).mul(nabla));
        if !sigma.mul(&v).sub(&w).is_zero() {
            return Err(Error::IllDefined(
                "σ is not a braiding of ∇: the right Leibniz defect disagrees".into(),
            ));
        }
    }
    let proj = &foc.tensor_square.quot.projector;
    let amb = tensor_connection_ambient(foc, nabla, sigma);
    for k in kernel_basis(proj) {
        if !is_zero_vec(&amb.mul_vec(&k)) {
            return Err(Error::IllDefined(
                "∇ ⊗ id + (σ ⊗ id)(id ⊗ ∇) does not descend: σ is not the braiding of ∇"
                    .into(),
            ));
        }
    }
    Ok(amb.mul(&foc.tensor_square.quot.section))
}

/// The ambient assembly ∇ ⊗ id + (σ ⊗ id)(id ⊗ ∇) of [`tensor_connection`],
/// with no braiding or descent checks. Linear in ∇ for fixed σ, which lets
/// solvers build constraint columns from unit matrices; calling it with a σ
/// that is not the braiding of ∇ produces a map with no meaning on the
/// balanced tensor square.
pub fn tensor_connection_ambient<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    nabla: &Mat<S>,
    sigma: &Mat<S>,
) -> Mat<S> {
    let m = foc.one_dim();
    let idm = Mat::identity(m);
    let triple = foc.triple();
    let fl = triple.from_left_map(&foc.tensor_square);
    let proj = &foc.tensor_square.quot.projector;
    let lift = &foc.tensor_square.quot.section;
    let term1 = fl.mul(&nabla.kron(&idm));
    let term2 = fl
        .mul(&sigma.kron(&idm))
        .mul(&proj.kron(&idm))
        .mul(&idm.kron(&lift.mul(nabla)));
    term1.add(&term2)
}

/// Torsion in the wedge convention: ∧∘∇ − d as a map Ω¹ → Ω².
pub fn bm_torsion<S: Scalar>(dga: &Dga2<S>, nabla: &Mat<S>) -> Mat<S> {
    dga.wedge.mul(nabla).sub(&dga.d1)
}

/// Torsion in the projector convention: (1 − ψ)∘∇ − d_ψ as a map Ω¹ → T.
pub fn mr_torsion<S: Scalar>(wso: &WeakSecondOrder<S>, nabla: &Mat<S>) -> Mat<S> {
    let t = wso.foc.tensor_dim();
    Mat::identity(t)
        .sub(&wso.psi)
        .mul(nabla)
        .sub(&wso.d_psi)
}

/// The antilinear involution (ω ⊗ η)† = η* ⊗ ω* on T, as a matrix applied
/// to conjugated coordinates. Requires a star structure on one-forms.
pub fn dagger_t<S: Scalar>(foc: &FirstOrderCalculus<S>) -> Result<Mat<S>> {
    let st = foc
        .star
        .as_ref()
        .ok_or_else(|| Error::Validation("calculus has no star structure".into()))?;
    let m = foc.one_dim();
    let sw = swap_mat::<S>(m, m);
    Ok(foc
        .tensor_square
        .quot
        .projector
        .mul(&st.kron(st))
        .mul(&sw)
        .mul(&foc.tensor_square.quot.section.conj()))
}

/// Star-preservation residual ∇(ω*) − σ((∇ω)†), reported as the matrix
/// pair acting on conjugated coordinates: ∇·St − σ·†·conj(∇).
pub fn star_preserving_residual<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    nabla: &Mat<S>,
    sigma: &Mat<S>,
) -> Result<Mat<S>> {
    let st = foc
        .star
        .as_ref()
        .ok_or_else(|| Error::Validation("calculus has no star structure".into()))?;
    let dag = dagger_t(foc)?;
    Ok(nabla.mul(st).sub(&sigma.mul(&dag).mul(&nabla.conj())))
}

/// The star-preservation condition as a homogeneous antilinear system
/// A·vec(∇) + B·conj(vec(∇)) = 0.
pub fn star_preserving_blocks<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    sigma: &Mat<S>,
) -> Result<(Mat<S>, Mat<S>)> {
    let st = foc
        .star
        .as_ref()
        .ok_or_else(|| Error::Validation("calculus has no star structure".into()))?;
    let dag = dagger_t(foc)?;
    let t = foc.tensor_dim();
    let m = foc.one_dim();
    let a = Mat::identity(t).kron(&st.transpose());
    let b = sigma.mul(&dag).kron(&Mat::identity(m)).neg();
    Ok((a, b))
}
