//! Metrics on one-forms: duality pairings and their snake identities, the
//! reality condition, Hermitian structures with weak adjointability and
//! positivity, and metric compatibility of connections in both styles.

use crate::bimodule::{swap_mat, Bimodule, BimoduleMap};
use crate::calculus::FirstOrderCalculus;
use crate::connection::{dagger_t, tensor_connection};
use crate::error::{Error, Result};
use crate::linalg::{
    axpy_vec, is_psd_hermitian, is_zero_vec, rank, solve_affine, sub_vec, unit_vec, zero_vec, Mat,
};
use crate::scalar::Scalar;
use crate::validate::ValidationReport;

/// A metric: a central tensor g in the tensor square together with an
/// inverse pairing ⟨·,·⟩: Ω¹ ⊗ Ω¹ → B, tied by the two snake
/// identities `(⟨,⟩⊗id)(ω⊗g) = ω = (id⊗⟨,⟩)(g⊗ω)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric<S> {
    /// Coordinates of g in the tensor-square basis (length t).
    pub g: Vec<S>,
    /// The pairing as an n×t matrix on tensor-square coordinates.
    pub pairing: Mat<S>,
}

/// The two snake evaluation maps Ω¹ → Ω¹ determined by (g, ⟨,⟩):
/// `ω ↦ (⟨,⟩⊗id)(ω⊗g)` and `ω ↦ (id⊗⟨,⟩)(g⊗ω)`.
pub fn snake_maps<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    metric: &Metric<S>,
) -> (Mat<S>, Mat<S>) {
    let m = foc.one_dim();
    let lift = foc.tensor_square.quot.section.mul_vec(&metric.g);
    let mut s1 = Mat::zero(m, m);
    let mut s2 = Mat::zero(m, m);
    for a in 0..m {
        let ua = unit_vec::<S>(m, a);
        let mut col1 = zero_vec::<S>(m);
        let mut col2 = zero_vec::<S>(m);
        for b in 0..m {
            // first leg of the lifted g, paired against ω on the left
            let vb: Vec<S> = (0..m).map(|c| lift[b * m + c].clone()).collect();
            let pab = metric
                .pairing
                .mul_vec(&foc.tensor_square.pure(&ua, &unit_vec(m, b)));
            let acted = foc.one_forms.left_action_of(&pab).mul_vec(&vb);
            for r in 0..m {
                col1[r] = col1[r].clone() + acted[r].clone();
            }
            // second leg, paired against ω on the right (b plays the
            // role of the surviving first leg here)
            let wb: Vec<S> = (0..m).map(|c| lift[c * m + b].clone()).collect();
            let pba = metric
                .pairing
                .mul_vec(&foc.tensor_square.pure(&unit_vec(m, b), &ua));
            let acted = foc.one_forms.right_action_of(&pba).mul_vec(&wb);
            for r in 0..m {
                col2[r] = col2[r].clone() + acted[r].clone();
            }
        }
        for r in 0..m {
            s1.set(r, a, col1[r].clone());
            s2.set(r, a, col2[r].clone());
        }
    }
    (s1, s2)
}

impl<S: Scalar> Metric<S> {
    pub fn validate(&self, foc: &FirstOrderCalculus<S>) -> ValidationReport {
        let mut report = ValidationReport::new();
        let t = foc.tensor_dim();
        let n = foc.algebra.dim;
        if self.g.len() != t || self.pairing.rows != n || self.pairing.cols != t {
            report.push(
                "metric shape",
                format!(
                    "g has length {} (want {t}), pairing is {}x{} (want {n}x{t})",
                    self.g.len(),
                    self.pairing.rows,
                    self.pairing.cols
                ),
                1.0,
            );
            return report;
        }
        let map = BimoduleMap {
            matrix: self.pairing.clone(),
            antilinear: false,
        };
        report.merge(map.validate(
            &foc.tensor_square.module,
            &Bimodule::regular(foc.algebra.clone()),
        ));
        for i in 0..n {
            let tm = &foc.tensor_square.module;
            let resid = sub_vec(
                &tm.left_basis_action(i).mul_vec(&self.g),
                &tm.right_basis_action(i).mul_vec(&self.g),
            );
            report.check_zero(
                "metric centrality",
                format!("basis element {i}"),
                &Mat::from_cols(t, &[resid]),
            );
        }
        let (s1, s2) = snake_maps(foc, self);
        let id = Mat::identity(foc.one_dim());
        report.check_zero("metric duality", "left snake", &s1.sub(&id));
        report.check_zero("metric duality", "right snake", &s2.sub(&id));
        report
    }
}

/// Residual of the reality condition g† = g, with † the antilinear flip
/// involution on the tensor square. Needs a star structure.
pub fn reality_residual<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    metric: &Metric<S>,
) -> Result<Vec<S>> {
    let dag = dagger_t(foc)?;
    Ok(sub_vec(&dag.apply_antilinear(&metric.g), &metric.g))
}

/// Solve the snake identities and bimodule-map laws for a pairing dual to
/// the given central tensor. `None` when g admits no inverse pairing.
pub fn solve_pairing<S: Scalar>(foc: &FirstOrderCalculus<S>, g: &[S]) -> Option<Mat<S>> {
    let m = foc.one_dim();
    let t = foc.tensor_dim();
    let n = foc.algebra.dim;
    let lift = foc.tensor_square.quot.section.mul_vec(g);
    // Unknown P (n×t), vec index k·t + j.
    let mut rows: Vec<Mat<S>> = Vec::new();
    let mut rhs: Vec<S> = Vec::new();
    // Snakes: for each a the two evaluations must return δ_a.
    let mut snake1: Mat<S> = Mat::zero(m * m, n * t);
    let mut snake2: Mat<S> = Mat::zero(m * m, n * t);
    for a in 0..m {
        let ua = unit_vec::<S>(m, a);
        for b in 0..m {
            let tau_ab = foc.tensor_square.pure(&ua, &unit_vec(m, b));
            let tau_ba = foc.tensor_square.pure(&unit_vec(m, b), &ua);
            let vb: Vec<S> = (0..m).map(|c| lift[b * m + c].clone()).collect();
            let wb: Vec<S> = (0..m).map(|c| lift[c * m + b].clone()).collect();
            for k in 0..n {
                let lv = foc.one_forms.left_basis_action(k).mul_vec(&vb);
                let rv = foc.one_forms.right_basis_action(k).mul_vec(&wb);
                for j in 0..t {
                    if tau_ab[j].is_zero() && tau_ba[j].is_zero() {
                        continue;
                    }
                    for r in 0..m {
                        let cur = snake1.at(a * m + r, k * t + j).clone();
                        snake1.set(
                            a * m + r,
                            k * t + j,
                            cur + tau_ab[j].clone() * lv[r].clone(),
                        );
                        let cur = snake2.at(a * m + r, k * t + j).clone();
                        snake2.set(
                            a * m + r,
                            k * t + j,
                            cur + tau_ba[j].clone() * rv[r].clone(),
                        );
                    }
                }
            }
        }
    }
    for mat in [snake1, snake2] {
        rows.push(mat);
        for a in 0..m {
            rhs.extend(unit_vec::<S>(m, a));
        }
    }
    // Bimodule-map laws P·L^T_i = L^B_i·P (and the right versions), via
    // vec(P·L) = (I⊗Lᵀ)vecP, vec(L·P) = (L⊗I)vecP.
    let idn = Mat::identity(n);
    let idt = Mat::identity(t);
    let tm = &foc.tensor_square.module;
    for i in 0..n {
        let left = idn
            .kron(&tm.left_basis_action(i).transpose())
            .sub(&foc.algebra.left_mult(i).kron(&idt));
        let right = idn
            .kron(&tm.right_basis_action(i).transpose())
            .sub(&foc.algebra.right_mult(i).kron(&idt));
        rows.push(left);
        rows.push(right);
        rhs.extend(zero_vec::<S>(2 * n * t));
    }
    let system = rows
        .into_iter()
        .reduce(|acc, r| acc.vstack(&r))
        .expect("snake rows are always present");
    let sol = solve_affine(&system, &rhs)?;
    Some(Mat::from_flat(n, t, sol.base))
}

/// A sesquilinear form ⟨⟨·,·⟩⟩: Ω¹ × Ω¹ → B, left linear in the first
/// argument and antilinear in the second:
/// ⟨⟨b·ω, η⟩⟩ = b·⟨⟨ω,η⟩⟩, ⟨⟨ω, b·η⟩⟩ = ⟨⟨ω,η⟩⟩·b*,
/// ⟨⟨ω,η⟩⟩* = ⟨⟨η,ω⟩⟩. Stored as an n × m² matrix over kron(ω, conj η)
/// coordinates; column u·m+v holds ⟨⟨δ_u, δ_v⟩⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian<S> {
    pub mat: Mat<S>,
}

impl<S: Scalar> Hermitian<S> {
    pub fn validate(&self, foc: &FirstOrderCalculus<S>) -> ValidationReport {
        let mut report = ValidationReport::new();
        let m = foc.one_dim();
        let n = foc.algebra.dim;
        if self.mat.rows != n || self.mat.cols != m * m {
            report.push(
                "hermitian shape",
                format!(
                    "matrix is {}x{}, want {n}x{}",
                    self.mat.rows,
                    self.mat.cols,
                    m * m
                ),
                1.0,
            );
            return report;
        }
        let idm = Mat::identity(m);
        for i in 0..n {
            let li = foc.one_forms.left_basis_action(i);
            report.check_zero(
                "hermitian left linearity",
                format!("basis element {i}"),
                &self
                    .mat
                    .mul(&li.kron(&idm))
                    .sub(&foc.algebra.left_mult(i).mul(&self.mat)),
            );
            let star_i = foc.algebra.star_mat.col(i);
            report.check_zero(
                "hermitian conjugate linearity",
                format!("basis element {i}"),
                &self
                    .mat
                    .mul(&idm.kron(&li.conj()))
                    .sub(&foc.algebra.right_mult_of(&star_i).mul(&self.mat)),
            );
        }
        report.check_zero(
            "hermitian symmetry",
            "⟨⟨ω,η⟩⟩* = ⟨⟨η,ω⟩⟩",
            &foc.algebra
                .star_mat
                .mul(&self.mat.conj())
                .sub(&self.mat.mul(&swap_mat(m, m))),
        );
        for (slot, reshape) in [
            (1usize, self.slot_matrix(m, n, true)),
            (2usize, self.slot_matrix(m, n, false)),
        ] {
            let r = rank(&reshape);
            if r < m {
                report.push(
                    "hermitian nondegeneracy",
                    format!("slot {slot} map has rank {r} < {m}"),
                    (m - r) as f64,
                );
            }
        }
        report
    }

    /// The (n·m)×m matrix of the map δ ↦ ⟨⟨δ, ·⟩⟩ (first slot) or
    /// δ ↦ ⟨⟨·, δ⟩⟩ (second slot).
    fn slot_matrix(&self, m: usize, n: usize, first: bool) -> Mat<S> {
        Mat::from_fn(n * m, m, |row, j| {
            let (k, other) = (row % n, row / n);
            let col = if first { j * m + other } else { other * m + j };
            self.mat.at(k, col).clone()
        })
    }
}

/// Adjointability of the right action for ⟨⟨·,·⟩⟩:
/// ⟨⟨ω·b, η⟩⟩ = ⟨⟨ω, η·b*⟩⟩ for all b.
pub fn weak_dagger_report<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    h: &Hermitian<S>,
) -> ValidationReport {
    let mut report = ValidationReport::new();
    let m = foc.one_dim();
    let idm = Mat::identity(m);
    for i in 0..foc.algebra.dim {
        let ri = foc.one_forms.right_basis_action(i);
        let star_i = foc.algebra.star_mat.col(i);
        let r_star = foc.one_forms.right_action_of(&star_i);
        report.check_zero(
            "weak dagger adjointability",
            format!("basis element {i}"),
            &h.mat
                .mul(&ri.kron(&idm))
                .sub(&h.mat.mul(&idm.kron(&r_star.conj()))),
        );
    }
    report
}

/// The Hermitian structure induced by a metric: ⟨⟨ω,η⟩⟩ = ⟨ω ⊗ η*⟩.
/// Needs the star on one-forms.
pub fn hermitian_from_metric<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    metric: &Metric<S>,
) -> Result<Hermitian<S>> {
    let st = foc
        .star
        .as_ref()
        .ok_or_else(|| Error::Validation("hermitian structure needs a star calculus".into()))?;
    if !is_zero_vec(&reality_residual(foc, metric)?) {
        return Err(Error::Validation(
            "metric is not real: g† ≠ g, so it induces no hermitian structure".into(),
        ));
    }
    let m = foc.one_dim();
    let mat = metric
        .pairing
        .mul(&foc.tensor_square.quot.projector)
        .mul(&Mat::identity(m).kron(st));
    Ok(Hermitian { mat })
}

/// Invert [`hermitian_from_metric`]: recover the pairing from
/// ⟨ω⊗η⟩ = ⟨⟨ω, η*⟩⟩ and solve the snake identities for g.
pub fn metric_from_hermitian<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    h: &Hermitian<S>,
) -> Result<Metric<S>> {
    let st = foc
        .star
        .as_ref()
        .ok_or_else(|| Error::Validation("hermitian structure needs a star calculus".into()))?;
    let m = foc.one_dim();
    if !foc
        .algebra
        .star_mat
        .mul(&h.mat.conj())
        .sub(&h.mat.mul(&swap_mat(m, m)))
        .is_zero()
    {
        return Err(Error::Validation(
            "hermitian structure is not symmetric: ⟨⟨ω,η⟩⟩* ≠ ⟨⟨η,ω⟩⟩, so it induces no real metric"
                .into(),
        ));
    }
    // Star is an involution, so the linear matrix St has inverse conj(St).
    let pairing_amb = h.mat.mul(&Mat::identity(m).kron(&st.conj()));
    for k in crate::linalg::kernel_basis(&foc.tensor_square.quot.projector) {
        if !crate::linalg::is_zero_vec(&pairing_amb.mul_vec(&k)) {
            return Err(Error::IllDefined(
                "pairing does not descend to the balanced tensor square".into(),
            ));
        }
    }
    let pairing = pairing_amb.mul(&foc.tensor_square.quot.section);
    // The snake identities are linear in g once the pairing is fixed.
    let lift = &foc.tensor_square.quot.section;
    let mut a1 = Mat::zero(m * m, m * m);
    let mut a2 = Mat::zero(m * m, m * m);
    for a in 0..m {
        let ua = unit_vec::<S>(m, a);
        for b in 0..m {
            let pab = pairing.mul_vec(&foc.tensor_square.pure(&ua, &unit_vec(m, b)));
            let pba = pairing.mul_vec(&foc.tensor_square.pure(&unit_vec(m, b), &ua));
            let lact = foc.one_forms.left_action_of(&pab);
            let ract = foc.one_forms.right_action_of(&pba);
            for c in 0..m {
                for r in 0..m {
                    a1.set(a * m + r, b * m + c, lact.at(r, c).clone());
                    a2.set(a * m + r, c * m + b, ract.at(r, c).clone());
                }
            }
        }
    }
    let mut rhs: Vec<S> = Vec::with_capacity(2 * m * m);
    for _ in 0..2 {
        for a in 0..m {
            rhs.extend(unit_vec::<S>(m, a));
        }
    }
    let system = a1.vstack(&a2).mul(lift);
    let sol = solve_affine(&system, &rhs).ok_or_else(|| {
        Error::Infeasible("hermitian structure has no coevaluation tensor".into())
    })?;
    Ok(Metric {
        g: sol.base,
        pairing,
    })
}

/// Gram matrix of ⟨⟨·,·⟩⟩ in the left regular representation, tested for
/// positive semidefiniteness. Errors when that representation is not a
/// ∗-homomorphism for the chosen basis (the Gram matrix then fails to be
/// Hermitian and positivity is not decidable this way).
pub fn gram_psd<S: Scalar>(foc: &FirstOrderCalculus<S>, h: &Hermitian<S>) -> Result<bool> {
    let m = foc.one_dim();
    let n = foc.algebra.dim;
    let mut gram = Mat::zero(m * n, m * n);
    for u in 0..m {
        for v in 0..m {
            let block = foc.algebra.left_mult_of(&h.mat.col(u * m + v));
            for r in 0..n {
                for c in 0..n {
                    gram.set(u * n + r, v * n + c, block.at(r, c).clone());
                }
            }
        }
    }
    is_psd_hermitian(&gram).map_err(|_| {
        Error::Validation(
            "Gram matrix is not Hermitian in the regular representation".into(),
        )
    })
}

fn compat_m1<S: Scalar>(foc: &FirstOrderCalculus<S>, h: &Hermitian<S>, b: usize) -> Mat<S> {
    let m = foc.one_dim();
    let mut m1 = Mat::zero(m, m * m);
    for v in 0..m {
        let act = foc.one_forms.right_action_of(&h.mat.col(v * m + b));
        for u in 0..m {
            for r in 0..m {
                m1.set(r, u * m + v, act.at(r, u).clone());
            }
        }
    }
    m1
}

fn compat_m2<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    h: &Hermitian<S>,
    st: &Mat<S>,
    a: usize,
) -> Mat<S> {
    let m = foc.one_dim();
    let mut m2 = Mat::zero(m, m * m);
    for v in 0..m {
        let act = foc.one_forms.left_action_of(&h.mat.col(a * m + v));
        for u in 0..m {
            let col = act.mul_vec(&st.col(u));
            for r in 0..m {
                m2.set(r, u * m + v, col[r].clone());
            }
        }
    }
    m2
}

/// Residual of Hermitian compatibility for a left connection ∇: for every
/// basis pair (a, b),
/// `d⟨⟨δ_a,δ_b⟩⟩ = Σ x^a_{uv} δ_u·⟨⟨δ_v,δ_b⟩⟩ + Σ conj(x^b_{uv}) ⟨⟨δ_a,δ_v⟩⟩·δ_u*`
/// where x^a = lift of ∇δ_a. Column a·m+b of the result is the defect of
/// that equation, an Ω¹ coordinate vector.
pub fn hermitian_compat_residual<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    h: &Hermitian<S>,
    nabla: &Mat<S>,
) -> Result<Mat<S>> {
    let st = foc
        .star
        .as_ref()
        .ok_or_else(|| Error::Validation("hermitian compatibility needs a star calculus".into()))?;
    let m = foc.one_dim();
    let lift = &foc.tensor_square.quot.section;
    let x = lift.mul(nabla);
    let mut resid = Mat::zero(m, m * m);
    for a in 0..m {
        for b in 0..m {
            let mut col = compat_m1(foc, h, b).mul_vec(&x.col(a));
            let conj_xb: Vec<S> = x.col(b).iter().map(|z| z.conj()).collect();
            axpy_vec(&mut col, &S::one(), &compat_m2(foc, h, st, a).mul_vec(&conj_xb));
            axpy_vec(&mut col, &-S::one(), &foc.d.mul_vec(&h.mat.col(a * m + b)));
            for r in 0..m {
                resid.set(r, a * m + b, col[r].clone());
            }
        }
    }
    Ok(resid)
}

/// The compatibility equations of [`hermitian_compat_residual`] as an
/// affine-antilinear system `A·vec(∇) + B·conj(vec(∇)) = rhs`, with m rows
/// per basis pair (a, b) and vec taken row-major over the t×m matrix ∇.
pub fn hermitian_compat_system<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    h: &Hermitian<S>,
) -> Result<(Mat<S>, Mat<S>, Vec<S>)> {
    let st = foc
        .star
        .as_ref()
        .ok_or_else(|| Error::Validation("hermitian compatibility needs a star calculus".into()))?;
    let m = foc.one_dim();
    let t = foc.tensor_dim();
    let lift = &foc.tensor_square.quot.section;
    let mut a_mat = Mat::zero(m * m * m, t * m);
    let mut b_mat = Mat::zero(m * m * m, t * m);
    let mut rhs: Vec<S> = Vec::with_capacity(m * m * m);
    for a in 0..m {
        for b in 0..m {
            let row0 = (a * m + b) * m;
            let lin = compat_m1(foc, h, b).mul(lift);
            let conj_lin = compat_m2(foc, h, st, a).mul(&lift.conj());
            for r in 0..m {
                for k in 0..t {
                    a_mat.set(row0 + r, k * m + a, lin.at(r, k).clone());
                    b_mat.set(row0 + r, k * m + b, conj_lin.at(r, k).clone());
                }
            }
            rhs.extend(foc.d.mul_vec(&h.mat.col(a * m + b)));
        }
    }
    Ok((a_mat, b_mat, rhs))
}

/// Metric compatibility in the braided style: the tensor-square connection
/// built from (∇, σ) annihilates g.
pub fn braided_compat_residual<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    nabla: &Mat<S>,
    sigma: &Mat<S>,
    metric: &Metric<S>,
) -> Result<Vec<S>> {
    Ok(tensor_connection(foc, nabla, sigma)?.mul_vec(&metric.g))
}
