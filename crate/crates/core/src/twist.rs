//! Cocycle deformation along a finite abelian group grading. A unitary
//! 2-cocycle γ rescales every product, action, and tensor factor by scalars
//! γ(deg, deg); the deformed calculus is rebuilt from the rescaled data and
//! the monoidal coordinate change φ on the tensor square carries metrics,
//! braidings, and connections across.

use crate::algebra::StarAlgebra;
use crate::bimodule::Bimodule;
use crate::calculus::FirstOrderCalculus;
use crate::error::{Error, Result};
use crate::linalg::{is_zero_vec, kernel_basis, Mat};
use crate::metric::Metric;
use crate::scalar::Scalar;
use crate::second_order::Dga2;
use crate::validate::ValidationReport;
use std::sync::Arc;

/// A finite abelian group as a product of cyclic factors ℤ_{n₁} × … × ℤ_{n_r}.
/// Elements are tuples reduced componentwise, indexed in mixed radix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    pub factors: Vec<u32>,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<u32>) -> Result<Self> {
        if factors.contains(&0) {
            return Err(Error::Validation("group factors must be positive".into()));
        }
        Ok(FiniteAbelianGroup { factors })
    }

    pub fn cyclic(n: u32) -> Self {
        FiniteAbelianGroup { factors: vec![n] }
    }

    pub fn order(&self) -> usize {
        self.factors.iter().map(|&f| f as usize).product()
    }

    pub fn zero(&self) -> Vec<u32> {
        vec![0; self.factors.len()]
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        self.factors
            .iter()
            .zip(a.iter().zip(b))
            .map(|(&f, (&x, &y))| (x + y) % f)
            .collect()
    }

    pub fn neg(&self, a: &[u32]) -> Vec<u32> {
        self.factors
            .iter()
            .zip(a)
            .map(|(&f, &x)| (f - x % f) % f)
            .collect()
    }

    /// Mixed-radix index; the zero element has index 0.
    pub fn index_of(&self, a: &[u32]) -> usize {
        assert_eq!(a.len(), self.factors.len(), "element arity");
        self.factors
            .iter()
            .zip(a)
            .fold(0usize, |acc, (&f, &x)| acc * f as usize + (x % f) as usize)
    }

    pub fn element(&self, mut idx: usize) -> Vec<u32> {
        let mut out = vec![0; self.factors.len()];
        for (k, &f) in self.factors.iter().enumerate().rev() {
            out[k] = (idx % f as usize) as u32;
            idx /= f as usize;
        }
        out
    }

    pub fn elements(&self) -> Vec<Vec<u32>> {
        (0..self.order()).map(|i| self.element(i)).collect()
    }
}

/// A 2-cocycle on a finite abelian group, as a full value table indexed by
/// element index: `table[g][h] = γ(g, h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle<S> {
    pub group: FiniteAbelianGroup,
    pub table: Mat<S>,
}

/// A primitive n-th root of unity: exact for n ∈ {1, 2, 4}, floating point
/// otherwise.
pub fn primitive_root<S: Scalar>(n: u32) -> Result<S> {
    match n {
        1 => Ok(S::one()),
        2 => Ok(-S::one()),
        4 => Ok(S::i()),
        _ => S::from_f64_parts(
            (std::f64::consts::TAU / f64::from(n)).cos(),
            (std::f64::consts::TAU / f64::from(n)).sin(),
        )
        .ok_or_else(|| Error::ExactUnsupported(format!("no exact primitive root of order {n}"))),
    }
}

impl<S: Scalar> Cocycle<S> {
    pub fn trivial(group: FiniteAbelianGroup) -> Self {
        let o = group.order();
        Cocycle {
            group,
            table: Mat::from_fn(o, o, |_, _| S::one()),
        }
    }

    /// The bicharacter γ(a, b) = ζ^{ab} on ℤ_n for a primitive n-th root ζ,
    /// exact for n ∈ {1, 2, 4}.
    pub fn cyclic_bicharacter(n: u32) -> Result<Self> {
        let zeta: S = primitive_root(n)?;
        let group = FiniteAbelianGroup::cyclic(n);
        let o = group.order();
        let mut pow = vec![S::one()];
        for _ in 1..o {
            pow.push(pow.last().unwrap().clone() * zeta.clone());
        }
        let table = Mat::from_fn(o, o, |a, b| pow[(a * b) % o].clone());
        Ok(Cocycle { group, table })
    }

    pub fn at(&self, g: &[u32], h: &[u32]) -> &S {
        self.table
            .at(self.group.index_of(g), self.group.index_of(h))
    }

    /// V̄(g) = conj γ(g, −g), the scalar twisting the involution.
    pub fn vbar(&self, g: &[u32]) -> S {
        self.at(g, &self.group.neg(g)).conj()
    }

    /// Cocycle identity on all triples, normalization against the unit, and
    /// pointwise unitarity |γ| = 1.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let o = self.group.order();
        if self.table.rows != o || self.table.cols != o {
            report.push(
                "cocycle table shape",
                format!("expected {o}×{o}, got {}×{}", self.table.rows, self.table.cols),
                1.0,
            );
            return report;
        }
        let one = Mat::<S>::identity(1);
        let scalar = |s: S| Mat::from_flat(1, 1, vec![s]);
        let els = self.group.elements();
        for g in &els {
            for h in &els {
                let v = self.at(g, h);
                if v.is_zero() {
                    report.push(
                        "cocycle invertibility",
                        format!("γ({g:?},{h:?}) = 0"),
                        1.0,
                    );
                    continue;
                }
                report.check_zero(
                    "cocycle unitarity",
                    format!("|γ({g:?},{h:?})| = 1"),
                    &scalar(v.clone() * v.conj()).sub(&one),
                );
                for k in &els {
                    let lhs = self.at(g, h).clone() * self.at(&self.group.add(g, h), k).clone();
                    let rhs = self.at(h, k).clone() * self.at(g, &self.group.add(h, k)).clone();
                    report.check_zero(
                        "cocycle identity",
                        format!("({g:?},{h:?},{k:?})"),
                        &scalar(lhs - rhs),
                    );
                }
            }
            let z = self.group.zero();
            report.check_zero(
                "cocycle normalization",
                format!("γ({g:?},0) = γ(0,{g:?}) = 1"),
                &scalar(self.at(g, &z).clone() - S::one())
                    .vstack(&scalar(self.at(&z, g).clone() - S::one())),
            );
        }
        report
    }

    /// Pointwise reciprocal; on group cocycles this is the convolution
    /// inverse, and it is again a unitary 2-cocycle.
    pub fn convolution_inverse(&self) -> Result<Cocycle<S>> {
        let mut table = self.table.clone();
        for i in 0..table.rows {
            for j in 0..table.cols {
                let v = self
                    .table
                    .at(i, j)
                    .inv()
                    .ok_or_else(|| Error::Validation("cocycle has a zero value".into()))?;
                table.set(i, j, v);
            }
        }
        Ok(Cocycle {
            group: self.group.clone(),
            table,
        })
    }
}

/// Degree assignments making an instance graded: one group element per basis
/// vector of the algebra, the one-forms, and optionally the two-forms.
#[derive(Clone, Debug, PartialEq)]
pub struct Grading {
    pub group: FiniteAbelianGroup,
    pub algebra: Vec<Vec<u32>>,
    pub one_forms: Vec<Vec<u32>>,
    pub two_forms: Option<Vec<Vec<u32>>>,
}

impl Grading {
    /// Degree-compatibility of the multiplication, unit, and star.
    pub fn validate_algebra<S: Scalar>(&self, alg: &StarAlgebra<S>) -> ValidationReport {
        let mut report = ValidationReport::new();
        let n = alg.dim;
        if self.algebra.len() != n {
            report.push(
                "grading arity",
                format!("expected {n} algebra degrees, got {}", self.algebra.len()),
                1.0,
            );
            return report;
        }
        let d = &self.algebra;
        for i in 0..n {
            for j in 0..n {
                let sum = self.group.add(&d[i], &d[j]);
                for k in 0..n {
                    if !alg.c(i, j, k).is_zero() && d[k] != sum {
                        report.push(
                            "graded multiplication",
                            format!("e{i}·e{j} hits e{k} of degree {:?} ≠ {sum:?}", d[k]),
                            alg.c(i, j, k).abs_approx(),
                        );
                    }
                }
            }
            if !alg.unit[i].is_zero() && d[i] != self.group.zero() {
                report.push(
                    "graded unit",
                    format!("unit has weight on e{i} of degree {:?}", d[i]),
                    alg.unit[i].abs_approx(),
                );
            }
            let neg = self.group.neg(&d[i]);
            for k in 0..n {
                if !alg.star_mat.at(k, i).is_zero() && d[k] != neg {
                    report.push(
                        "graded star",
                        format!("e{i}* hits e{k} of degree {:?} ≠ {neg:?}", d[k]),
                        alg.star_mat.at(k, i).abs_approx(),
                    );
                }
            }
        }
        report
    }

    /// Degree-compatibility of the full first-order data: algebra, module
    /// actions, differential, and the one-form star.
    pub fn validate_foc<S: Scalar>(&self, foc: &FirstOrderCalculus<S>) -> ValidationReport {
        let mut report = self.validate_algebra(&foc.algebra);
        let (n, m) = (foc.algebra.dim, foc.one_dim());
        if self.one_forms.len() != m {
            report.push(
                "grading arity",
                format!("expected {m} one-form degrees, got {}", self.one_forms.len()),
                1.0,
            );
            return report;
        }
        let (db, dw) = (&self.algebra, &self.one_forms);
        for i in 0..n {
            let li = foc.one_forms.left_basis_action(i);
            let ri = foc.one_forms.right_basis_action(i);
            for c in 0..m {
                let lsum = self.group.add(&db[i], &dw[c]);
                let rsum = self.group.add(&dw[c], &db[i]);
                for r in 0..m {
                    if !li.at(r, c).is_zero() && dw[r] != lsum {
                        report.push(
                            "graded left action",
                            format!("e{i}·ω{c} hits ω{r}"),
                            li.at(r, c).abs_approx(),
                        );
                    }
                    if !ri.at(r, c).is_zero() && dw[r] != rsum {
                        report.push(
                            "graded right action",
                            format!("ω{c}·e{i} hits ω{r}"),
                            ri.at(r, c).abs_approx(),
                        );
                    }
                }
            }
            for r in 0..m {
                if !foc.d.at(r, i).is_zero() && dw[r] != db[i] {
                    report.push(
                        "graded differential",
                        format!("d(e{i}) hits ω{r} of degree {:?} ≠ {:?}", dw[r], db[i]),
                        foc.d.at(r, i).abs_approx(),
                    );
                }
            }
        }
        if let Some(st) = &foc.star {
            for c in 0..m {
                let neg = self.group.neg(&dw[c]);
                for r in 0..m {
                    if !st.at(r, c).is_zero() && dw[r] != neg {
                        report.push(
                            "graded one-form star",
                            format!("ω{c}* hits ω{r}"),
                            st.at(r, c).abs_approx(),
                        );
                    }
                }
            }
        }
        report
    }

    /// Degree-compatibility of a second-order structure on top of the
    /// first-order data; requires two-form degrees.
    pub fn validate_dga<S: Scalar>(&self, dga: &Dga2<S>) -> Result<ValidationReport> {
        let mut report = self.validate_foc(&dga.foc);
        let d2 = self
            .two_forms
            .as_ref()
            .ok_or_else(|| Error::Validation("grading carries no two-form degrees".into()))?;
        let w = dga.two_dim();
        if d2.len() != w {
            report.push(
                "grading arity",
                format!("expected {w} two-form degrees, got {}", d2.len()),
                1.0,
            );
            return Ok(report);
        }
        let dt = tensor_degrees(&dga.foc, self)?;
        let (n, m) = (dga.foc.algebra.dim, dga.foc.one_dim());
        for k in 0..dga.foc.tensor_dim() {
            for r in 0..w {
                if !dga.wedge.at(r, k).is_zero() && d2[r] != dt[k] {
                    report.push(
                        "graded wedge",
                        format!("∧(τ{k}) hits Ω²-basis {r}"),
                        dga.wedge.at(r, k).abs_approx(),
                    );
                }
            }
        }
        for c in 0..m {
            for r in 0..w {
                if !dga.d1.at(r, c).is_zero() && d2[r] != self.one_forms[c] {
                    report.push(
                        "graded d1",
                        format!("d(ω{c}) hits Ω²-basis {r}"),
                        dga.d1.at(r, c).abs_approx(),
                    );
                }
            }
        }
        for i in 0..n {
            let li = dga.two_forms.left_basis_action(i);
            let ri = dga.two_forms.right_basis_action(i);
            for c in 0..w {
                let lsum = self.group.add(&self.algebra[i], &d2[c]);
                let rsum = self.group.add(&d2[c], &self.algebra[i]);
                for r in 0..w {
                    if !li.at(r, c).is_zero() && d2[r] != lsum {
                        report.push(
                            "graded left action on two-forms",
                            format!("e{i}·Ω²{c} hits Ω²{r}"),
                            li.at(r, c).abs_approx(),
                        );
                    }
                    if !ri.at(r, c).is_zero() && d2[r] != rsum {
                        report.push(
                            "graded right action on two-forms",
                            format!("Ω²{c}·e{i} hits Ω²{r}"),
                            ri.at(r, c).abs_approx(),
                        );
                    }
                }
            }
        }
        Ok(report)
    }
}

/// Degree of each tensor-square basis vector, read off its canonical ambient
/// representative; errors when a representative is not homogeneous.
pub fn tensor_degrees<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    grading: &Grading,
) -> Result<Vec<Vec<u32>>> {
    let (m, t) = (foc.one_dim(), foc.tensor_dim());
    let dw = &grading.one_forms;
    let mut out = Vec::with_capacity(t);
    for k in 0..t {
        let col = foc.tensor_square.quot.section.col(k);
        let mut deg: Option<Vec<u32>> = None;
        for a in 0..m {
            for b in 0..m {
                if col[a * m + b].is_zero() {
                    continue;
                }
                let d = grading.group.add(&dw[a], &dw[b]);
                match &deg {
                    None => deg = Some(d),
                    Some(e) if *e == d => {}
                    Some(e) => {
                        return Err(Error::IllDefined(format!(
                            "tensor basis {k} mixes degrees {e:?} and {d:?}; \
                             the grading does not descend to the tensor square"
                        )))
                    }
                }
            }
        }
        out.push(deg.ok_or_else(|| {
            Error::IllDefined(format!("tensor basis {k} has an empty representative"))
        })?);
    }
    Ok(out)
}

/// Deform the product and involution: e_i ·_γ e_j = γ(|i|,|j|) e_i e_j and
/// e_i^{*_γ} = V̄(−|i|) e_i^*. The unit and all degree-0 products are
/// untouched by normalization.
pub fn twist_algebra<S: Scalar>(
    alg: &StarAlgebra<S>,
    grading: &Grading,
    gamma: &Cocycle<S>,
) -> Result<StarAlgebra<S>> {
    gamma.validate().require("cocycle")?;
    grading.validate_algebra(alg).require("grading")?;
    let n = alg.dim;
    let d = &grading.algebra;
    let mut mult = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            let f = gamma.at(&d[i], &d[j]).clone();
            for k in 0..n {
                mult.push(alg.c(i, j, k).clone() * f.clone());
            }
        }
    }
    let mut star = alg.star_mat.clone();
    for i in 0..n {
        let f = gamma.vbar(&grading.group.neg(&d[i]));
        for r in 0..n {
            star.set(r, i, alg.star_mat.at(r, i).clone() * f.clone());
        }
    }
    StarAlgebra::new(n, mult, alg.unit.clone(), star)
}

/// A twisted first-order calculus together with the monoidal coordinate
/// change on the balanced tensor square.
pub struct TwistedCalculus<S> {
    pub foc: Arc<FirstOrderCalculus<S>>,
    /// φ: T_γ → T, the isomorphism v ⊗_γ w ↦ γ(|v|,|w|) v ⊗ w in quotient
    /// coordinates.
    pub phi_t: Mat<S>,
    /// φ⁻¹: T → T_γ.
    pub phi_t_inv: Mat<S>,
}

/// Deform a first-order calculus: the algebra and both actions pick up
/// γ-factors, the differential is unchanged as a linear map, and the
/// one-form star is rescaled by V̄. The twisted calculus is rebuilt from
/// scratch, so its tensor square and junk structure are canonical.
pub fn twist_calculus<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    grading: &Grading,
    gamma: &Cocycle<S>,
) -> Result<TwistedCalculus<S>> {
    grading.validate_foc(foc).require("grading")?;
    let alg = Arc::new(twist_algebra(&foc.algebra, grading, gamma)?);
    let (n, m) = (foc.algebra.dim, foc.one_dim());
    let (db, dw) = (&grading.algebra, &grading.one_forms);
    let left: Vec<Mat<S>> = (0..n)
        .map(|i| {
            let li = foc.one_forms.left_basis_action(i);
            Mat::from_fn(m, m, |r, c| li.at(r, c).clone() * gamma.at(&db[i], &dw[c]).clone())
        })
        .collect();
    let right: Vec<Mat<S>> = (0..n)
        .map(|i| {
            let ri = foc.one_forms.right_basis_action(i);
            Mat::from_fn(m, m, |r, c| ri.at(r, c).clone() * gamma.at(&dw[c], &db[i]).clone())
        })
        .collect();
    let one_forms = Bimodule::new(Arc::clone(&alg), m, left, right)?;
    let star = foc.star.as_ref().map(|st| {
        let mut s = st.clone();
        for c in 0..m {
            let f = gamma.vbar(&grading.group.neg(&dw[c]));
            for r in 0..m {
                s.set(r, c, st.at(r, c).clone() * f.clone());
            }
        }
        s
    });
    let new_foc = Arc::new(FirstOrderCalculus::new(
        alg,
        one_forms,
        foc.d.clone(),
        star,
    )?);

    let mm = m * m;
    let mut fwd = Mat::zero(mm, mm);
    let mut inv = Mat::zero(mm, mm);
    for a in 0..m {
        for b in 0..m {
            let f = gamma.at(&dw[a], &dw[b]).clone();
            let fi = f
                .inv()
                .ok_or_else(|| Error::Validation("cocycle has a zero value".into()))?;
            fwd.set(a * m + b, a * m + b, f);
            inv.set(a * m + b, a * m + b, fi);
        }
    }
    let old_q = &foc.tensor_square.quot;
    let new_q = &new_foc.tensor_square.quot;
    for k in kernel_basis(&new_q.projector) {
        if !is_zero_vec(&old_q.projector.mul_vec(&fwd.mul_vec(&k))) {
            return Err(Error::IllDefined(
                "the monoidal isomorphism does not respect the twisted tensor relations".into(),
            ));
        }
    }
    let phi_t = old_q.projector.mul(&fwd).mul(&new_q.section);
    let phi_t_inv = new_q.projector.mul(&inv).mul(&old_q.section);
    let t = foc.tensor_dim();
    if !phi_t.mul(&phi_t_inv).sub(&Mat::identity(t)).is_zero()
        || !phi_t_inv.mul(&phi_t).sub(&Mat::identity(t)).is_zero()
    {
        return Err(Error::IllDefined(
            "the monoidal isomorphism is not invertible on the tensor square".into(),
        ));
    }
    Ok(TwistedCalculus {
        foc: new_foc,
        phi_t,
        phi_t_inv,
    })
}

/// Deform a second-order structure over an already-twisted calculus: the
/// two-form actions pick up γ-factors, ∧_γ = ∧ ∘ φ, and d is unchanged.
pub fn twist_dga<S: Scalar>(
    tw: &TwistedCalculus<S>,
    dga: &Dga2<S>,
    grading: &Grading,
    gamma: &Cocycle<S>,
) -> Result<Dga2<S>> {
    grading.validate_dga(dga)?.require("grading")?;
    let d2 = grading.two_forms.as_ref().expect("validated above");
    let (n, w) = (dga.foc.algebra.dim, dga.two_dim());
    let db = &grading.algebra;
    let left: Vec<Mat<S>> = (0..n)
        .map(|i| {
            let li = dga.two_forms.left_basis_action(i);
            Mat::from_fn(w, w, |r, c| li.at(r, c).clone() * gamma.at(&db[i], &d2[c]).clone())
        })
        .collect();
    let right: Vec<Mat<S>> = (0..n)
        .map(|i| {
            let ri = dga.two_forms.right_basis_action(i);
            Mat::from_fn(w, w, |r, c| ri.at(r, c).clone() * gamma.at(&d2[c], &db[i]).clone())
        })
        .collect();
    let two_forms = Bimodule::new(Arc::clone(&tw.foc.algebra), w, left, right)?;
    Dga2::new(
        Arc::clone(&tw.foc),
        two_forms,
        dga.wedge.mul(&tw.phi_t),
        dga.d1.clone(),
    )
}

/// Deform a metric: g_γ = φ⁻¹(g) and (,)_γ = (,) ∘ φ. The tensor must be
/// homogeneous of degree zero, the graded analogue of covariance.
pub fn twist_metric<S: Scalar>(
    tw: &TwistedCalculus<S>,
    foc: &FirstOrderCalculus<S>,
    grading: &Grading,
    metric: &Metric<S>,
) -> Result<Metric<S>> {
    let dt = tensor_degrees(foc, grading)?;
    let zero = grading.group.zero();
    for (k, v) in metric.g.iter().enumerate() {
        if !v.is_zero() && dt[k] != zero {
            return Err(Error::Validation(format!(
                "metric has weight on tensor basis {k} of degree {:?}; \
                 only degree-zero metrics twist",
                dt[k]
            )));
        }
    }
    Ok(Metric {
        g: tw.phi_t_inv.mul_vec(&metric.g),
        pairing: metric.pairing.mul(&tw.phi_t),
    })
}

/// Deform a connection: ∇_γ = φ⁻¹ ∘ ∇. The connection must be homogeneous
/// of degree zero as a map Ω¹ → T (the graded analogue of covariance).
pub fn twist_connection<S: Scalar>(
    tw: &TwistedCalculus<S>,
    foc: &FirstOrderCalculus<S>,
    grading: &Grading,
    nabla: &Mat<S>,
) -> Result<Mat<S>> {
    let dt = tensor_degrees(foc, grading)?;
    for c in 0..nabla.cols {
        for r in 0..nabla.rows {
            if !nabla.at(r, c).is_zero() && dt[r] != grading.one_forms[c] {
                return Err(Error::Validation(format!(
                    "connection is not degree-homogeneous: ∇(ω{c}) has weight on \
                     tensor basis {r}"
                )));
            }
        }
    }
    Ok(tw.phi_t_inv.mul(nabla))
}

/// Deform a braiding: σ_γ = φ⁻¹ ∘ σ ∘ φ.
pub fn twist_sigma<S: Scalar>(tw: &TwistedCalculus<S>, sigma: &Mat<S>) -> Mat<S> {
    tw.phi_t_inv.mul(sigma).mul(&tw.phi_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::cyclic_group_algebra;
    use crate::calculus::universal_calculus;
    use crate::connection::{dagger_t, star_preserving_residual};
    use crate::lc::{sample_star_preserving, solve_mr, LcProblem};
    use crate::linalg::{add_vec, axpy_vec, complex_to_real_vec, scale_vec, sub_vec, Subspace};
    use crate::metric::{reality_residual, solve_pairing};
    use crate::scalar::Exact;
    use crate::second_order::prolongation_d;

    fn z2() -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(2)
    }

    /// Universal calculus on ℂ[ℤ₂] with its canonical ℤ₂ grading, derived
    /// from the embedding Ω¹ ⊂ B ⊗ B.
    fn graded_z2_calculus() -> (Arc<FirstOrderCalculus<Exact>>, Grading) {
        let alg = Arc::new(cyclic_group_algebra::<Exact>(2));
        let u = universal_calculus(alg).unwrap();
        let n = 2;
        let mut one_forms = Vec::new();
        for c in 0..u.foc.one_dim() {
            let col = u.embedding.col(c);
            let mut deg = None;
            for i in 0..n {
                for j in 0..n {
                    if !col[i * n + j].is_zero() {
                        let d = vec![((i + j) % 2) as u32];
                        assert!(deg.is_none() || deg == Some(d.clone()));
                        deg = Some(d);
                    }
                }
            }
            one_forms.push(deg.unwrap());
        }
        let grading = Grading {
            group: z2(),
            algebra: vec![vec![0], vec![1]],
            one_forms,
            two_forms: None,
        };
        (Arc::new(u.foc), grading)
    }

    fn sign_cocycle() -> Cocycle<Exact> {
        Cocycle::cyclic_bicharacter(2).unwrap()
    }

    /// All real central invertible metrics on the ℤ₂ universal calculus
    /// reachable by small integer combinations: symmetrize the central
    /// tensors under the dagger involution, keep a real-independent basis,
    /// and sweep coefficient tuples.
    fn z2_metrics(foc: &Arc<FirstOrderCalculus<Exact>>) -> Vec<Metric<Exact>> {
        let t = foc.tensor_dim();
        let tm = &foc.tensor_square.module;
        let mut rows: Option<Mat<Exact>> = None;
        for i in 0..foc.algebra.dim {
            let diff = tm.left_basis_action(i).sub(tm.right_basis_action(i));
            rows = Some(match rows {
                None => diff,
                Some(r) => r.vstack(&diff),
            });
        }
        let central = kernel_basis(&rows.unwrap());
        assert!(!central.is_empty());
        let dag = dagger_t(foc).unwrap();
        let mut real: Vec<Vec<Exact>> = Vec::new();
        let mut span = Subspace::span(2 * t, &[]);
        for v in &central {
            let rv = dag.apply_antilinear(v);
            for w in [add_vec(v, &rv), scale_vec(&Exact::i(), &sub_vec(v, &rv))] {
                if !span.contains(&complex_to_real_vec(&w)) {
                    span = Subspace::span(
                        2 * t,
                        &real
                            .iter()
                            .chain(std::iter::once(&w))
                            .map(|x| complex_to_real_vec(x))
                            .collect::<Vec<_>>(),
                    );
                    real.push(w);
                }
            }
        }
        let mut out = Vec::new();
        let mut coeffs = vec![-3i64; real.len()];
        loop {
            let mut g = vec![Exact::zero(); t];
            for (c, w) in coeffs.iter().zip(&real) {
                axpy_vec(&mut g, &Exact::from_i64(*c), w);
            }
            if !is_zero_vec(&g) {
                if let Some(pairing) = solve_pairing(foc, &g) {
                    let metric = Metric { g, pairing };
                    if metric.validate(foc).ok()
                        && is_zero_vec(&reality_residual(foc, &metric).unwrap())
                    {
                        out.push(metric);
                    }
                }
            }
            let mut k = 0;
            while k < coeffs.len() {
                coeffs[k] += 1;
                if coeffs[k] <= 3 {
                    break;
                }
                coeffs[k] = -3;
                k += 1;
            }
            if k == coeffs.len() {
                break;
            }
        }
        assert!(!out.is_empty(), "no central real metric found");
        out
    }

    /// The first sweep hit that is homogeneous of degree zero, so it twists.
    fn z2_metric(
        foc: &Arc<FirstOrderCalculus<Exact>>,
        grading: &Grading,
    ) -> Metric<Exact> {
        let dt = tensor_degrees(foc, grading).unwrap();
        let zero = grading.group.zero();
        z2_metrics(foc)
            .into_iter()
            .find(|m| {
                m.g.iter()
                    .zip(&dt)
                    .all(|(v, d)| v.is_zero() || *d == zero)
            })
            .expect("no degree-zero metric in the sweep")
    }

    #[test]
    fn bicharacter_tables_validate() {
        sign_cocycle().validate().require("sign cocycle").unwrap();
        Cocycle::<Exact>::cyclic_bicharacter(4)
            .unwrap()
            .validate()
            .require("z4 bicharacter")
            .unwrap();
        assert!(Cocycle::<Exact>::cyclic_bicharacter(3).is_err());

        let mut broken = sign_cocycle();
        broken.table.set(1, 1, Exact::from_i64(2));
        let report = broken.validate();
        assert!(!report.ok());
    }

    #[test]
    fn trivial_cocycle_twists_identically() {
        let (foc, grading) = graded_z2_calculus();
        let gamma = Cocycle::trivial(z2());
        let tw = twist_calculus(&foc, &grading, &gamma).unwrap();
        assert_eq!(tw.phi_t, Mat::identity(foc.tensor_dim()));
        for i in 0..2 {
            assert_eq!(
                tw.foc.one_forms.left_basis_action(i),
                foc.one_forms.left_basis_action(i)
            );
            assert_eq!(tw.foc.algebra.left_mult(i), foc.algebra.left_mult(i));
        }
        assert_eq!(tw.foc.star, foc.star);
    }

    #[test]
    fn twisted_instance_passes_validators() {
        let (foc, grading) = graded_z2_calculus();
        let tw = twist_calculus(&foc, &grading, &sign_cocycle()).unwrap();
        tw.foc.algebra.validate().require("twisted algebra").unwrap();
        tw.foc.validate().require("twisted calculus").unwrap();
        // the same grading still grades the twisted instance
        grading
            .validate_foc(&tw.foc)
            .require("twisted grading")
            .unwrap();
    }

    #[test]
    fn inverse_twist_roundtrips() {
        let (foc, grading) = graded_z2_calculus();
        let gamma = sign_cocycle();
        let tw = twist_calculus(&foc, &grading, &gamma).unwrap();
        let back = twist_calculus(&tw.foc, &grading, &gamma.convolution_inverse().unwrap())
            .unwrap();
        for i in 0..2 {
            assert_eq!(back.foc.algebra.left_mult(i), foc.algebra.left_mult(i));
            assert_eq!(
                back.foc.one_forms.left_basis_action(i),
                foc.one_forms.left_basis_action(i)
            );
            assert_eq!(
                back.foc.one_forms.right_basis_action(i),
                foc.one_forms.right_basis_action(i)
            );
        }
        assert_eq!(back.foc.algebra.star_mat, foc.algebra.star_mat);
        assert_eq!(back.foc.star, foc.star);
        assert_eq!(back.foc.d, foc.d);

        // metrics and connections ride the composed isomorphisms back
        let metric = z2_metric(&foc, &grading);
        let twisted = twist_metric(&tw, &foc, &grading, &metric).unwrap();
        let restored = twist_metric(&back, &tw.foc, &grading, &twisted).unwrap();
        assert_eq!(restored, metric);
    }

    #[test]
    fn twisting_commutes_with_lc_solving() {
        let (foc, grading) = graded_z2_calculus();
        let t = foc.tensor_dim();
        let dga = Dga2::new(
            Arc::clone(&foc),
            foc.tensor_square.module.clone(),
            Mat::identity(t),
            prolongation_d(&foc).unwrap(),
        )
        .unwrap();
        let gamma = sign_cocycle();
        let tw = twist_calculus(&foc, &grading, &gamma).unwrap();
        let dt = tensor_degrees(&foc, &grading).unwrap();
        let grading2 = Grading {
            two_forms: Some(dt),
            ..grading.clone()
        };
        let dga_g = twist_dga(&tw, &dga, &grading2, &gamma).unwrap();
        dga_g.validate().require("twisted dga").unwrap();

        let mut feasible = 0;
        for metric in z2_metrics(&foc) {
            // metrics with weight outside degree zero do not twist; skip them
            let metric_g = match twist_metric(&tw, &foc, &grading, &metric) {
                Ok(m) => m,
                Err(_) => continue,
            };
            metric_g.validate(&tw.foc).require("twisted metric").unwrap();
            assert!(is_zero_vec(&reality_residual(&tw.foc, &metric_g).unwrap()));

            let p = LcProblem::quasi_tame(Arc::clone(&foc), dga.clone(), metric).unwrap();
            let p2 =
                LcProblem::quasi_tame(Arc::clone(&tw.foc), dga_g.clone(), metric_g).unwrap();
            let lc = solve_mr(&p.foc, p.wso.as_ref().unwrap(), &p.metric);
            let lc_g = solve_mr(&p2.foc, p2.wso.as_ref().unwrap(), &p2.metric);
            match (lc, lc_g) {
                (Ok(fam), Ok(fam_g)) => {
                    assert!(fam_g.same_set(&fam.left_compose(&tw.phi_t_inv)));
                    feasible += 1;
                }
                (Err(_), Err(_)) => {}
                (a, b) => panic!(
                    "twisting changed solvability: untwisted {:?}, twisted {:?}",
                    a.is_ok(),
                    b.is_ok()
                ),
            }
        }
        assert!(feasible > 0, "no metric admitted an LC connection");
    }

    #[test]
    fn star_preservation_survives_twisting() {
        let (foc, grading) = graded_z2_calculus();
        let gamma = sign_cocycle();
        let tw = twist_calculus(&foc, &grading, &gamma).unwrap();
        let pairs = sample_star_preserving(&foc, 4, 11).unwrap();
        let mut twisted_any = false;
        for (nabla, sigma) in &pairs {
            let n_g = match twist_connection(&tw, &foc, &grading, nabla) {
                Ok(n) => n,
                // the sampler does not constrain degrees; skip inhomogeneous draws
                Err(_) => continue,
            };
            let s_g = twist_sigma(&tw, sigma);
            assert!(star_preserving_residual(&tw.foc, &n_g, &s_g)
                .unwrap()
                .is_zero());
            twisted_any = true;
        }
        assert!(twisted_any, "no homogeneous star-preserving sample");
    }
}
