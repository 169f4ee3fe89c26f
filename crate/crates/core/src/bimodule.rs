//! Bimodules over a star-algebra, balanced tensor products, bar modules,
//! and inner hom modules.
//!
//! Coordinates of `bar(m)` are the conjugated coordinates of `m`, which makes
//! every antilinear structure map (star, Υ, metric conjugates) an ordinary
//! matrix on bar coordinates.

use std::sync::Arc;

use crate::algebra::StarAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{
    is_zero_vec, kron_vec, sub_vec, unit_vec, kernel_basis, Mat, Quotient, Subspace,
};
use crate::scalar::Scalar;
use crate::validate::ValidationReport;

/// A finite-dimensional B-bimodule given by its left and right action
/// matrices per algebra basis element.
#[derive(Clone, Debug)]
pub struct Bimodule<S> {
    pub algebra: Arc<StarAlgebra<S>>,
    pub dim: usize,
    left: Vec<Mat<S>>,
    right: Vec<Mat<S>>,
}

impl<S: Scalar> Bimodule<S> {
    pub fn new(
        algebra: Arc<StarAlgebra<S>>,
        dim: usize,
        left: Vec<Mat<S>>,
        right: Vec<Mat<S>>,
    ) -> Result<Self> {
        let n = algebra.dim;
        if left.len() != n || right.len() != n {
            return Err(Error::Shape(format!(
                "expected {n} left and right action matrices, got {} and {}",
                left.len(),
                right.len()
            )));
        }
        for m in left.iter().chain(&right) {
            if m.rows != dim || m.cols != dim {
                return Err(Error::Shape(format!(
                    "action matrix {}×{} does not match module dimension {dim}",
                    m.rows, m.cols
                )));
            }
        }
        Ok(Bimodule {
            algebra,
            dim,
            left,
            right,
        })
    }

    /// The regular bimodule: B acting on itself by multiplication.
    pub fn regular(algebra: Arc<StarAlgebra<S>>) -> Self {
        let n = algebra.dim;
        let left = (0..n).map(|i| algebra.left_mult(i).clone()).collect();
        let right = (0..n).map(|i| algebra.right_mult(i).clone()).collect();
        Bimodule {
            algebra,
            dim: n,
            left,
            right,
        }
    }

    /// The zero bimodule.
    pub fn zero(algebra: Arc<StarAlgebra<S>>) -> Self {
        let n = algebra.dim;
        Bimodule {
            algebra,
            dim: 0,
            left: vec![Mat::zero(0, 0); n],
            right: vec![Mat::zero(0, 0); n],
        }
    }

    pub fn left_basis_action(&self, i: usize) -> &Mat<S> {
        &self.left[i]
    }

    pub fn right_basis_action(&self, i: usize) -> &Mat<S> {
        &self.right[i]
    }

    /// Matrix of `b · (−)` for an algebra element in coordinates.
    pub fn left_action_of(&self, b: &[S]) -> Mat<S> {
        let mut m: Mat<S> = Mat::zero(self.dim, self.dim);
        for (i, c) in b.iter().enumerate() {
            if !c.is_zero() {
                m = m.add(&self.left[i].scale(c));
            }
        }
        m
    }

    /// Matrix of `(−) · b`.
    pub fn right_action_of(&self, b: &[S]) -> Mat<S> {
        let mut m: Mat<S> = Mat::zero(self.dim, self.dim);
        for (i, c) in b.iter().enumerate() {
            if !c.is_zero() {
                m = m.add(&self.right[i].scale(c));
            }
        }
        m
    }

    pub fn left_act(&self, b: &[S], v: &[S]) -> Vec<S> {
        self.left_action_of(b).mul_vec(v)
    }

    pub fn right_act(&self, v: &[S], b: &[S]) -> Vec<S> {
        self.right_action_of(b).mul_vec(v)
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.algebra.dim;
        let mut report = ValidationReport::new();
        let id = Mat::identity(self.dim);
        report.check_zero(
            "left unit action",
            "1·v = v",
            &self.left_action_of(&self.algebra.unit).sub(&id),
        );
        report.check_zero(
            "right unit action",
            "v·1 = v",
            &self.right_action_of(&self.algebra.unit).sub(&id),
        );
        for i in 0..n {
            for j in 0..n {
                // (e_i e_j)·v = e_i·(e_j·v)
                let mut prod_left: Mat<S> = Mat::zero(self.dim, self.dim);
                let mut prod_right: Mat<S> = Mat::zero(self.dim, self.dim);
                for k in 0..n {
                    let c = self.algebra.c(i, j, k);
                    if !c.is_zero() {
                        prod_left = prod_left.add(&self.left[k].scale(c));
                        prod_right = prod_right.add(&self.right[k].scale(c));
                    }
                }
                report.check_zero(
                    "left action multiplicative",
                    format!("(i,j)=({i},{j})"),
                    &prod_left.sub(&self.left[i].mul(&self.left[j])),
                );
                // v·(e_i e_j) = (v·e_i)·e_j
                report.check_zero(
                    "right action multiplicative",
                    format!("(i,j)=({i},{j})"),
                    &prod_right.sub(&self.right[j].mul(&self.right[i])),
                );
                report.check_zero(
                    "actions commute",
                    format!("(i,j)=({i},{j})"),
                    &self.left[i].mul(&self.right[j]).sub(&self.right[j].mul(&self.left[i])),
                );
            }
        }
        report
    }
}

/// A (possibly antilinear) bimodule map in coordinates. Linear maps satisfy
/// `f(b·v·c) = b·f(v)·c`; antilinear maps apply `matrix` to conjugated
/// coordinates and satisfy `f(b·v·c) = c*·f(v)·b*`.
#[derive(Clone, Debug)]
pub struct BimoduleMap<S> {
    pub matrix: Mat<S>,
    pub antilinear: bool,
}

impl<S: Scalar> BimoduleMap<S> {
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        if self.antilinear {
            self.matrix.apply_antilinear(v)
        } else {
            self.matrix.mul_vec(v)
        }
    }

    pub fn validate(&self, src: &Bimodule<S>, dst: &Bimodule<S>) -> ValidationReport {
        let mut report = ValidationReport::new();
        let n = src.algebra.dim;
        if self.matrix.rows != dst.dim || self.matrix.cols != src.dim {
            report.push(
                "map shape",
                format!(
                    "expected {}×{}, got {}×{}",
                    dst.dim, src.dim, self.matrix.rows, self.matrix.cols
                ),
                1.0,
            );
            return report;
        }
        let m = &self.matrix;
        for i in 0..n {
            let star_i = src.algebra.star_elt(&unit_vec(n, i));
            if self.antilinear {
                // f(e_i·v) = f(v)·e_i*  and  f(v·e_i) = e_i*·f(v)
                report.check_zero(
                    "antilinear left compatibility",
                    format!("i={i}"),
                    &m.mul(&src.left_basis_action(i).conj())
                        .sub(&dst.right_action_of(&star_i).mul(m)),
                );
                report.check_zero(
                    "antilinear right compatibility",
                    format!("i={i}"),
                    &m.mul(&src.right_basis_action(i).conj())
                        .sub(&dst.left_action_of(&star_i).mul(m)),
                );
            } else {
                report.check_zero(
                    "left equivariance",
                    format!("i={i}"),
                    &m.mul(src.left_basis_action(i))
                        .sub(&dst.left_basis_action(i).mul(m)),
                );
                report.check_zero(
                    "right equivariance",
                    format!("i={i}"),
                    &m.mul(src.right_basis_action(i))
                        .sub(&dst.right_basis_action(i).mul(m)),
                );
            }
        }
        report
    }
}

/// The balanced tensor product E ⊗_B F as a quotient of the coordinate
/// tensor product, with the canonical projector/section pair.
#[derive(Clone, Debug)]
pub struct BalancedTensor<S> {
    pub module: Bimodule<S>,
    pub quot: Quotient<S>,
    pub e_dim: usize,
    pub f_dim: usize,
}

impl<S: Scalar> BalancedTensor<S> {
    pub fn project(&self, ambient: &[S]) -> Vec<S> {
        self.quot.project(ambient)
    }

    pub fn lift(&self, v: &[S]) -> Vec<S> {
        self.quot.lift(v)
    }

    /// Class of the pure tensor v ⊗ w.
    pub fn pure(&self, v: &[S], w: &[S]) -> Vec<S> {
        self.project(&kron_vec(v, w))
    }
}

/// Build E ⊗_B F by quotienting `ambient = E ⊗ F` (dimension e·f, index
/// `a·f + b`) by the balancing relations `(v_a·e_i) ⊗ w_b − v_a ⊗ (e_i·w_b)`.
pub fn balanced_tensor<S: Scalar>(e: &Bimodule<S>, f: &Bimodule<S>) -> BalancedTensor<S> {
    assert_eq!(
        e.algebra.dim, f.algebra.dim,
        "tensor factors over different algebras"
    );
    let n = e.algebra.dim;
    let (ed, fd) = (e.dim, f.dim);
    let ambient = ed * fd;
    let mut relations = Vec::with_capacity(ed * n * fd);
    for a in 0..ed {
        for i in 0..n {
            let va_ei = e.right_basis_action(i).col(a);
            for b in 0..fd {
                let ei_wb = f.left_basis_action(i).col(b);
                let lhs = kron_vec(&va_ei, &unit_vec(fd, b));
                let rhs = kron_vec(&unit_vec(ed, a), &ei_wb);
                let rel = sub_vec(&lhs, &rhs);
                if !is_zero_vec(&rel) {
                    relations.push(rel);
                }
            }
        }
    }
    let quot = Quotient::by_relations(ambient, &relations);
    let left: Vec<Mat<S>> = (0..n)
        .map(|i| {
            let amb = e.left_basis_action(i).kron(&Mat::identity(fd));
            quot.projector.mul(&amb).mul(&quot.section)
        })
        .collect();
    let right: Vec<Mat<S>> = (0..n)
        .map(|i| {
            let amb = Mat::identity(ed).kron(f.right_basis_action(i));
            quot.projector.mul(&amb).mul(&quot.section)
        })
        .collect();
    let module = Bimodule::new(e.algebra.clone(), quot.dim, left, right)
        .expect("shapes by construction");
    BalancedTensor {
        module,
        quot,
        e_dim: ed,
        f_dim: fd,
    }
}

/// The conjugate bimodule Ē: coordinates of `bar(m)` are `conj(coords(m))`,
/// actions `b·m̄ = bar(m·b*)` and `m̄·b = bar(b*·m)`.
pub fn bar_bimodule<S: Scalar>(e: &Bimodule<S>) -> Bimodule<S> {
    let n = e.algebra.dim;
    let left = (0..n)
        .map(|i| {
            let star_i = e.algebra.star_elt(&unit_vec(n, i));
            e.right_action_of(&star_i).conj()
        })
        .collect();
    let right = (0..n)
        .map(|i| {
            let star_i = e.algebra.star_elt(&unit_vec(n, i));
            e.left_action_of(&star_i).conj()
        })
        .collect();
    Bimodule {
        algebra: e.algebra.clone(),
        dim: e.dim,
        left,
        right,
    }
}

/// Swap matrix (E ⊗ F ambient) → (F ⊗ E ambient): `a·f + b ↦ b·e + a`.
pub fn swap_mat<S: Scalar>(e_dim: usize, f_dim: usize) -> Mat<S> {
    Mat::from_fn(f_dim * e_dim, e_dim * f_dim, |r, c| {
        let (b, a) = (r / e_dim, r % e_dim);
        if c == a * f_dim + b {
            S::one()
        } else {
            S::zero()
        }
    })
}

/// The canonical identification Υ: bar(E ⊗_B F) → bar(F) ⊗_B bar(E),
/// `Υ(bar(v ⊗ w)) = bar(w) ⊗ bar(v)`, as a linear matrix on bar
/// coordinates.
pub fn upsilon<S: Scalar>(
    ef: &BalancedTensor<S>,
    bar_f_bar_e: &BalancedTensor<S>,
) -> Mat<S> {
    assert_eq!(ef.e_dim, bar_f_bar_e.f_dim);
    assert_eq!(ef.f_dim, bar_f_bar_e.e_dim);
    let swap = swap_mat::<S>(ef.e_dim, ef.f_dim);
    bar_f_bar_e
        .quot
        .projector
        .mul(&swap)
        .mul(&ef.quot.section.conj())
}

/// The left-module hom bimodule ᴮHom(E, B): all left B-linear maps E → B,
/// with actions `(a·φ)(v) = φ(v·a)` and `(φ·c)(v) = φ(v)·c`.
///
/// Returns the hom bimodule together with the basis maps as matrices
/// (each `n × e`, mapping module coordinates to algebra coordinates).
pub fn left_hom<S: Scalar>(e: &Bimodule<S>) -> (Bimodule<S>, Vec<Mat<S>>) {
    let n = e.algebra.dim;
    let ed = e.dim;
    // Unknown F (n×e) with F·L^E_i = L^B_i·F for all i.
    // vec convention: vec(F·L) = (I ⊗ Lᵀ)vec(F), vec(L·F) = (L ⊗ I)vec(F).
    let mut rows: Vec<Mat<S>> = Vec::new();
    let idn = Mat::identity(n);
    let ide = Mat::identity(ed);
    for i in 0..n {
        let lhs = idn.kron(&e.left_basis_action(i).transpose());
        let rhs = e.algebra.left_mult(i).kron(&ide);
        rows.push(lhs.sub(&rhs));
    }
    let system = rows
        .into_iter()
        .reduce(|acc, m| acc.vstack(&m))
        .unwrap_or_else(|| Mat::zero(0, n * ed));
    let basis_vecs = kernel_basis(&system);
    let h = basis_vecs.len();
    let basis_mats: Vec<Mat<S>> = basis_vecs
        .iter()
        .map(|v| Mat::from_flat(n, ed, v.clone()))
        .collect();
    let span = Subspace::span(n * ed, &basis_vecs);
    let coords = |m: &Mat<S>| -> Vec<S> {
        span.coords_of(&m.to_vec())
            .expect("action must preserve the hom space")
    };
    let mut left: Vec<Mat<S>> = Vec::with_capacity(n);
    let mut right: Vec<Mat<S>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut li = Mat::zero(h, h);
        let mut ri = Mat::zero(h, h);
        for (alpha, f) in basis_mats.iter().enumerate() {
            // (e_i·φ)(v) = φ(v·e_i) : F ↦ F·R^E_i
            let lf = coords(&f.mul(e.right_basis_action(i)));
            // (φ·e_i)(v) = φ(v)·e_i : F ↦ R^B_i·F
            let rf = coords(&e.algebra.right_mult(i).mul(f));
            for beta in 0..h {
                li.set(beta, alpha, lf[beta].clone());
                ri.set(beta, alpha, rf[beta].clone());
            }
        }
        left.push(li);
        right.push(ri);
    }
    let module = Bimodule::new(e.algebra.clone(), h, left, right).expect("shapes by construction");
    (module, basis_mats)
}

/// Validate that a candidate map on quotient coordinates descends from an
/// ambient map: `q_map · P(rel) = 0` is automatic, so instead check
/// `map ∘ P = P' ∘ amb` on all ambient basis vectors.
pub fn descends<S: Scalar>(
    map: &Mat<S>,
    src: &Quotient<S>,
    dst: &Quotient<S>,
    ambient_map: &Mat<S>,
) -> bool {
    let lhs = map.mul(&src.projector);
    let rhs = dst.projector.mul(ambient_map);
    lhs.sub(&rhs).is_zero()
}

/// E ⊗_B F ⊗_B G, built associatively as E ⊗_B (F ⊗_B G) to keep the
/// ambient spaces small, with a canonical comparison map from the
/// (E ⊗_B F) ⊗ G side.
#[derive(Clone, Debug)]
pub struct Balanced3<S> {
    /// F ⊗_B G
    pub inner: BalancedTensor<S>,
    /// E ⊗_B (F ⊗_B G); its module is the triple tensor product.
    pub outer: BalancedTensor<S>,
    pub e_dim: usize,
    pub f_dim: usize,
    pub g_dim: usize,
}

impl<S: Scalar> Balanced3<S> {
    pub fn new(e: &Bimodule<S>, f: &Bimodule<S>, g: &Bimodule<S>) -> Self {
        let inner = balanced_tensor(f, g);
        let outer = balanced_tensor(e, &inner.module);
        Balanced3 {
            inner,
            outer,
            e_dim: e.dim,
            f_dim: f.dim,
            g_dim: g.dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.outer.module.dim
    }

    /// Map (E ⊗_B F)-coords ⊗ G-coords into the triple product. Uses the
    /// flat-index associativity of the Kronecker convention: the ambient
    /// index `(a·f + b)·g + c` equals `a·(f·g) + (b·g + c)`.
    pub fn from_left_map(&self, ef: &BalancedTensor<S>) -> Mat<S> {
        assert_eq!(ef.e_dim, self.e_dim);
        assert_eq!(ef.f_dim, self.f_dim);
        let lift = ef.quot.section.kron(&Mat::identity(self.g_dim));
        let inner_proj = Mat::identity(self.e_dim).kron(&self.inner.quot.projector);
        self.outer.quot.projector.mul(&inner_proj).mul(&lift)
    }

    /// Map E-coords ⊗ (F ⊗_B G)-coords into the triple product.
    pub fn from_right_map(&self) -> &Mat<S> {
        &self.outer.quot.projector
    }

    /// Class of the pure tensor v ⊗ w ⊗ x.
    pub fn pure(&self, v: &[S], w: &[S], x: &[S]) -> Vec<S> {
        self.outer.pure(v, &self.inner.pure(w, x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{cyclic_group_algebra, function_algebra, matrix_algebra};
    use crate::scalar::Exact;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn arc<S: Scalar>(a: StarAlgebra<S>) -> Arc<StarAlgebra<S>> {
        Arc::new(a)
    }

    #[test]
    fn regular_bimodule_validates() {
        let b = Bimodule::regular(arc(matrix_algebra::<Exact>(2)));
        assert!(b.validate().ok());
        let b2 = Bimodule::regular(arc(cyclic_group_algebra::<Exact>(4)));
        assert!(b2.validate().ok());
    }

    #[test]
    fn validator_catches_noncommuting_actions() {
        let alg = arc(function_algebra::<Exact>(2));
        // left action of e_0 swaps coordinates: breaks multiplicativity
        let bad_left = vec![
            Mat::from_rows(vec![
                vec![Exact::zero(), Exact::one()],
                vec![Exact::one(), Exact::zero()],
            ]),
            Mat::identity(2),
        ];
        let right = vec![Mat::identity(2), Mat::zero(2, 2)];
        let b = Bimodule::new(alg, 2, bad_left, right).unwrap();
        assert!(!b.validate().ok());
    }

    #[test]
    fn balanced_tensor_of_regular_is_algebra() {
        // B ⊗_B B ≅ B for any unital algebra.
        for alg in [matrix_algebra::<Exact>(2), function_algebra::<Exact>(3)] {
            let a = arc(alg);
            let reg = Bimodule::regular(a.clone());
            let t = balanced_tensor(&reg, &reg);
            assert_eq!(t.module.dim, a.dim);
            assert!(t.module.validate().ok());
            // x ⊗ y and xy ⊗ 1 agree in the quotient
            let mut rng = ChaCha8Rng::seed_from_u64(20);
            let x: Vec<Exact> = (0..a.dim).map(|_| Exact::random_small(&mut rng)).collect();
            let y: Vec<Exact> = (0..a.dim).map(|_| Exact::random_small(&mut rng)).collect();
            let xy = a.mul_elts(&x, &y);
            assert_eq!(t.pure(&x, &y), t.pure(&xy, &a.unit));
        }
    }

    #[test]
    fn balancing_relations_hold_in_quotient() {
        let a = arc(matrix_algebra::<Exact>(2));
        let reg = Bimodule::regular(a.clone());
        let t = balanced_tensor(&reg, &reg);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let v: Vec<Exact> = (0..4).map(|_| Exact::random_small(&mut rng)).collect();
        let w: Vec<Exact> = (0..4).map(|_| Exact::random_small(&mut rng)).collect();
        let b: Vec<Exact> = (0..4).map(|_| Exact::random_small(&mut rng)).collect();
        let vb = reg.right_act(&v, &b);
        let bw = reg.left_act(&b, &w);
        assert_eq!(t.pure(&vb, &w), t.pure(&v, &bw));
    }

    #[test]
    fn bar_is_involutive_and_valid() {
        let a = arc(matrix_algebra::<Exact>(2));
        let reg = Bimodule::regular(a);
        let bar = bar_bimodule(&reg);
        assert!(bar.validate().ok());
        let barbar = bar_bimodule(&bar);
        for i in 0..reg.algebra.dim {
            assert_eq!(barbar.left_basis_action(i), reg.left_basis_action(i));
            assert_eq!(barbar.right_basis_action(i), reg.right_basis_action(i));
        }
    }

    #[test]
    fn star_map_is_antilinear_bimodule_map() {
        // On the regular bimodule, x ↦ x* is an antilinear bimodule map.
        let a = arc(matrix_algebra::<Exact>(2));
        let reg = Bimodule::regular(a.clone());
        let f = BimoduleMap {
            matrix: a.star_mat.clone(),
            antilinear: true,
        };
        assert!(f.validate(&reg, &reg).ok());
        // and the identity is a linear one
        let id = BimoduleMap {
            matrix: Mat::identity(4),
            antilinear: false,
        };
        assert!(id.validate(&reg, &reg).ok());
        // but conjugation alone (star without the transpose) is not
        let g = BimoduleMap {
            matrix: Mat::identity(4),
            antilinear: true,
        };
        assert!(!g.validate(&reg, &reg).ok());
    }

    #[test]
    fn upsilon_is_linear_bimodule_iso() {
        let a = arc(matrix_algebra::<Exact>(2));
        let reg = Bimodule::regular(a.clone());
        let ef = balanced_tensor(&reg, &reg);
        let bar = bar_bimodule(&reg);
        let fe_bar = balanced_tensor(&bar, &bar);
        let bar_ef = bar_bimodule(&ef.module);
        let y = upsilon(&ef, &fe_bar);
        // bimodule map bar(E⊗F) → barF ⊗ barE
        let f = BimoduleMap {
            matrix: y.clone(),
            antilinear: false,
        };
        assert!(f.validate(&bar_ef, &fe_bar.module).ok());
        // iso
        assert!(crate::linalg::invert(&y).is_some());
        // pure tensor: Υ(bar(v⊗w)) = bar(w)⊗bar(v)
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let v: Vec<Exact> = (0..4).map(|_| Exact::random_small(&mut rng)).collect();
        let w: Vec<Exact> = (0..4).map(|_| Exact::random_small(&mut rng)).collect();
        let bar_vw = crate::linalg::conj_vec(&ef.pure(&v, &w));
        let want = fe_bar.pure(&crate::linalg::conj_vec(&w), &crate::linalg::conj_vec(&v));
        assert_eq!(y.mul_vec(&bar_vw), want);
    }

    #[test]
    fn left_hom_of_regular_is_algebra() {
        // ᴮHom(B, B) ≅ B via right multiplications.
        let a = arc(matrix_algebra::<Exact>(2));
        let reg = Bimodule::regular(a.clone());
        let (hom, basis) = left_hom(&reg);
        assert_eq!(hom.dim, 4);
        assert!(hom.validate().ok());
        // every basis map is left-linear: F·L_i = L_i·F
        for f in &basis {
            for i in 0..4 {
                assert_eq!(
                    f.mul(reg.left_basis_action(i)),
                    a.left_mult(i).mul(f)
                );
            }
        }
    }

    #[test]
    fn triple_tensor_two_routes_agree() {
        let a = arc(matrix_algebra::<Exact>(2));
        let reg = Bimodule::regular(a.clone());
        let t3 = Balanced3::new(&reg, &reg, &reg);
        // B⊗B⊗B over B collapses to B
        assert_eq!(t3.dim(), 4);
        let ef = balanced_tensor(&reg, &reg);
        let from_left = t3.from_left_map(&ef);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let v: Vec<Exact> = (0..4).map(|_| Exact::random_small(&mut rng)).collect();
        let w: Vec<Exact> = (0..4).map(|_| Exact::random_small(&mut rng)).collect();
        let x: Vec<Exact> = (0..4).map(|_| Exact::random_small(&mut rng)).collect();
        // (v⊗w)⊗x through the left route equals v⊗(w⊗x) through pure()
        let left_side = from_left.mul_vec(&kron_vec(&ef.pure(&v, &w), &x));
        assert_eq!(left_side, t3.pure(&v, &w, &x));
        // balancing in the middle slot holds across the two factors
        let b: Vec<Exact> = (0..4).map(|_| Exact::random_small(&mut rng)).collect();
        let wb = reg.right_act(&w, &b);
        let bx = reg.left_act(&b, &x);
        assert_eq!(t3.pure(&v, &wb, &x), t3.pure(&v, &w, &bx));
    }

    #[test]
    fn zero_module_edge_cases() {
        let a = arc(function_algebra::<Exact>(2));
        let z = Bimodule::zero(a.clone());
        assert!(z.validate().ok());
        let reg = Bimodule::regular(a);
        let t = balanced_tensor(&z, &reg);
        assert_eq!(t.module.dim, 0);
    }
}
