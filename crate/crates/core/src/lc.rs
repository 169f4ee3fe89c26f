//! Levi-Civita solvers. The MR side (projector torsion plus hermitian
//! compatibility) is a genuinely affine problem once the complex unknowns
//! are split into real and imaginary parts, because hermitian compatibility
//! is antilinear in ∇. The BM side (wedge torsion plus braided metric
//! compatibility) is quadratic in ∇ through the derived braiding, so it is
//! solved only at a fixed σ and otherwise verified pointwise.

use crate::calculus::FirstOrderCalculus;
use crate::connection::{
    bm_torsion, connection_space, derive_sigma, flip_sigma, leibniz_residuals, leibniz_system,
    mr_torsion, star_preserving_blocks, star_preserving_residual, tensor_connection,
    tensor_connection_ambient, SigmaResult,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::linalg::{
    add_vec, complex_to_real_vec, is_zero_vec, max_abs_vec, rank, real_to_complex_vec,
    realify_system, solve_affine, unit_vec, zero_vec, AffineSubspace, Mat,
};
use crate::metric::{
    hermitian_compat_residual, hermitian_compat_system, hermitian_from_metric, Hermitian, Metric,
};
use crate::scalar::Scalar;
use crate::second_order::{psi_from_splitting, quasi_tame_splitting, Dga2, WeakSecondOrder};
use crate::validate::ValidationReport;
use crate::ExecMode;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Which Levi-Civita formulation a problem targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Framework {
    /// Wedge torsion and braided metric compatibility.
    Bm,
    /// Projector torsion and hermitian compatibility.
    Mr,
}

/// Where the braiding of a BM-side solve comes from.
#[derive(Clone, Debug)]
pub enum SigmaMode<S> {
    /// Derive σ from each connection. Verification only: with σ a function
    /// of ∇ the compatibility equation is quadratic.
    Derive,
    /// The flip ω ⊗ η ↦ η ⊗ ω, when it descends.
    Flip,
    /// A caller-supplied braiding.
    Given(Mat<S>),
}

/// A Levi-Civita problem: a calculus with second-order data and a metric.
#[derive(Clone)]
pub struct LcProblem<S> {
    pub foc: Arc<FirstOrderCalculus<S>>,
    pub dga: Option<Dga2<S>>,
    pub wso: Option<WeakSecondOrder<S>>,
    pub metric: Metric<S>,
    pub framework: Framework,
    pub sigma_mode: SigmaMode<S>,
}

impl<S: Scalar> LcProblem<S> {
    /// MR problem on a quasi-tame exterior algebra: ψ is induced by a
    /// bimodule splitting of the wedge, so both torsion conventions are
    /// available and agree on their zero sets.
    pub fn quasi_tame(
        foc: Arc<FirstOrderCalculus<S>>,
        dga: Dga2<S>,
        metric: Metric<S>,
    ) -> Result<Self> {
        let s = quasi_tame_splitting(&dga).ok_or_else(|| {
            Error::Infeasible("the wedge admits no bimodule splitting: not quasi-tame".into())
        })?;
        let psi = psi_from_splitting(&dga, &s);
        let wso = WeakSecondOrder::new(Arc::clone(&foc), psi)?;
        Ok(LcProblem {
            foc,
            dga: Some(dga),
            wso: Some(wso),
            metric,
            framework: Framework::Mr,
            sigma_mode: SigmaMode::Derive,
        })
    }
}

/// An affine family of connections. Coordinates are the realified flattening
/// of the t×m matrix of ∇ (all real parts, then all imaginary parts), so the
/// parameters are real: antilinear constraints like hermitian compatibility
/// cut out real-affine sets that are not complex subspaces.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionFamily<S> {
    pub rows: usize,
    pub cols: usize,
    pub set: AffineSubspace<S>,
}

impl<S: Scalar> ConnectionFamily<S> {
    /// Real dimension of the family.
    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    fn to_mat(&self, v: &[S]) -> Mat<S> {
        Mat::from_flat(self.rows, self.cols, real_to_complex_vec(v))
    }

    pub fn base(&self) -> Mat<S> {
        self.to_mat(&self.set.base)
    }

    pub fn direction(&self, k: usize) -> Mat<S> {
        self.to_mat(&self.set.directions[k])
    }

    /// The base point followed by its shift along each direction.
    pub fn representatives(&self) -> Vec<Mat<S>> {
        let mut out = vec![self.base()];
        for d in &self.set.directions {
            out.push(self.to_mat(&add_vec(&self.set.base, d)));
        }
        out
    }

    /// A random member: base plus small real multiples of the directions.
    pub fn member<R: rand::Rng>(&self, rng: &mut R) -> Mat<S> {
        let coeffs: Vec<S> = (0..self.dim()).map(|_| S::random_small_real(rng)).collect();
        self.to_mat(&self.set.member(&coeffs))
    }

    pub fn contains(&self, nabla: &Mat<S>) -> bool {
        nabla.rows == self.rows
            && nabla.cols == self.cols
            && self.set.contains(&complex_to_real_vec(&nabla.to_vec()))
    }

    /// Equality as sets of matrices, independent of the presentation.
    pub fn same_set(&self, other: &ConnectionFamily<S>) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.set.same_set(&other.set)
    }

    /// The image family {M·∇ : ∇ ∈ self} under a complex matrix M.
    pub fn left_compose(&self, m: &Mat<S>) -> ConnectionFamily<S> {
        let push = |v: &[S]| complex_to_real_vec(&m.mul(&self.to_mat(v)).to_vec());
        ConnectionFamily {
            rows: m.rows,
            cols: self.cols,
            set: AffineSubspace {
                base: push(&self.set.base),
                directions: self.set.directions.iter().map(|d| push(d)).collect(),
            },
        }
    }
}

/// One named constraint block, already realified.
struct RealBlock<S> {
    name: &'static str,
    a: Mat<S>,
    rhs: Vec<S>,
}

impl<S: Scalar> RealBlock<S> {
    /// Realify A·x + B·conj(x) = rhs; `None` for a complex-linear block.
    fn new(name: &'static str, a: &Mat<S>, b: Option<&Mat<S>>, rhs: &[S]) -> Self {
        let zero;
        let b = match b {
            Some(b) => b,
            None => {
                zero = Mat::zero(a.rows, a.cols);
                &zero
            }
        };
        let (a, rhs) = realify_system(a, b, rhs);
        RealBlock { name, a, rhs }
    }
}

/// Solve the stacked blocks; on inconsistency, re-solve cumulative prefixes
/// to name the first block that destroys feasibility.
fn solve_blocks<S: Scalar>(
    rows: usize,
    cols: usize,
    blocks: &[RealBlock<S>],
) -> Result<ConnectionFamily<S>> {
    let mut a = blocks[0].a.clone();
    let mut rhs = blocks[0].rhs.clone();
    for b in &blocks[1..] {
        a = a.vstack(&b.a);
        rhs.extend(b.rhs.iter().cloned());
    }
    if let Some(set) = solve_affine(&a, &rhs) {
        return Ok(ConnectionFamily { rows, cols, set });
    }
    let mut a = blocks[0].a.clone();
    let mut rhs = blocks[0].rhs.clone();
    for (k, b) in blocks.iter().enumerate() {
        if k > 0 {
            a = a.vstack(&b.a);
            rhs.extend(b.rhs.iter().cloned());
        }
        if solve_affine(&a, &rhs).is_none() {
            return Err(Error::Infeasible(format!(
                "no connection satisfies the {} equations jointly with the blocks before them",
                b.name
            )));
        }
    }
    unreachable!("full stack infeasible but every prefix feasible");
}

/// V_i: column a is ω_a ⊗ de_i, the right-defect values a braiding acts on.
fn sigma_values<S: Scalar>(foc: &FirstOrderCalculus<S>, i: usize) -> Mat<S> {
    let (t, m) = (foc.tensor_dim(), foc.one_dim());
    let di = foc.d.col(i);
    let mut v = Mat::zero(t, m);
    for a in 0..m {
        let p = foc.tensor_square.pure(&unit_vec(m, a), &di);
        for r in 0..t {
            v.set(r, a, p[r].clone());
        }
    }
    v
}

/// The linear system making σ the braiding of ∇:
/// ∇(ω·e_i) − (∇ω)·e_i = σ(ω ⊗ de_i) for every algebra basis element.
fn braiding_system<S: Scalar>(foc: &FirstOrderCalculus<S>, sigma: &Mat<S>) -> (Mat<S>, Vec<S>) {
    let (t, m) = (foc.tensor_dim(), foc.one_dim());
    let idt = Mat::identity(t);
    let idm = Mat::identity(m);
    let tm = &foc.tensor_square.module;
    let mut blocks: Vec<Mat<S>> = Vec::new();
    let mut rhs: Vec<S> = Vec::new();
    for i in 0..foc.algebra.dim {
        blocks.push(
            idt.kron(&foc.one_forms.right_basis_action(i).transpose())
                .sub(&tm.right_basis_action(i).kron(&idm)),
        );
        rhs.extend(sigma.mul(&sigma_values(foc, i)).to_vec());
    }
    let a = blocks
        .into_iter()
        .reduce(|acc, b| acc.vstack(&b))
        .expect("algebra is nonempty");
    (a, rhs)
}

/// Solve the MR Levi-Civita system for the hermitian structure induced by a
/// real metric: left Leibniz, projector torsion (1 − ψ)∇ = d_ψ, and
/// hermitian compatibility, stacked over the reals.
pub fn solve_mr<S: Scalar>(
    foc: &Arc<FirstOrderCalculus<S>>,
    wso: &WeakSecondOrder<S>,
    metric: &Metric<S>,
) -> Result<ConnectionFamily<S>> {
    let h = hermitian_from_metric(foc, metric)?;
    solve_mr_with(foc, wso, &h)
}

/// As [`solve_mr`], for an already-built hermitian structure.
pub fn solve_mr_with<S: Scalar>(
    foc: &Arc<FirstOrderCalculus<S>>,
    wso: &WeakSecondOrder<S>,
    h: &Hermitian<S>,
) -> Result<ConnectionFamily<S>> {
    let (t, m) = (foc.tensor_dim(), foc.one_dim());
    let (la, lrhs) = leibniz_system(foc);
    let tor_a = Mat::identity(t).sub(&wso.psi).kron(&Mat::identity(m));
    let tor_rhs = wso.d_psi.to_vec();
    let (ha, hb, hrhs) = hermitian_compat_system(foc, h)?;
    let blocks = [
        RealBlock::new("left Leibniz", &la, None, &lrhs),
        RealBlock::new("projector torsion", &tor_a, None, &tor_rhs),
        RealBlock::new("hermitian compatibility", &ha, Some(&hb), &hrhs),
    ];
    solve_blocks(t, m, &blocks)
}

/// Solve the BM Levi-Civita system at a fixed braiding: left Leibniz, the
/// equations making σ the braiding of ∇, wedge torsion ∧∇ = d, and braided
/// compatibility ∇_T(g) = 0. The last block is linear in ∇ exactly because
/// σ is held fixed.
pub fn solve_bm<S: Scalar>(
    foc: &Arc<FirstOrderCalculus<S>>,
    dga: &Dga2<S>,
    metric: &Metric<S>,
    sigma: &Mat<S>,
) -> Result<ConnectionFamily<S>> {
    let (t, m) = (foc.tensor_dim(), foc.one_dim());
    let (la, lrhs) = leibniz_system(foc);
    let (ba, brhs) = braiding_system(foc, sigma);
    let tor_a = dga.wedge.kron(&Mat::identity(m));
    let tor_rhs = dga.d1.to_vec();
    let lift_g = foc.tensor_square.quot.section.mul_vec(&metric.g);
    let mut compat_cols: Vec<Vec<S>> = Vec::with_capacity(t * m);
    for k in 0..t {
        for a in 0..m {
            let mut e = Mat::zero(t, m);
            e.set(k, a, S::one());
            compat_cols.push(tensor_connection_ambient(foc, &e, sigma).mul_vec(&lift_g));
        }
    }
    let compat_a = Mat::from_cols(compat_cols[0].len(), &compat_cols);
    let compat_rhs = zero_vec(compat_a.rows);
    let blocks = [
        RealBlock::new("left Leibniz", &la, None, &lrhs),
        RealBlock::new("braiding", &ba, None, &brhs),
        RealBlock::new("wedge torsion", &tor_a, None, &tor_rhs),
        RealBlock::new("metric compatibility", &compat_a, None, &compat_rhs),
    ];
    solve_blocks(t, m, &blocks)
}

/// Certificates for a candidate connection against the BM definition.
#[derive(Clone, Debug)]
pub struct BmCertificate<S> {
    pub sigma: Mat<S>,
    pub sigma_invertible: bool,
    /// ∧∇ − d as a map Ω¹ → Ω².
    pub torsion: Mat<S>,
    /// ∇_T(g) in ambient triple-tensor coordinates.
    pub compat: Vec<S>,
    /// ∇(ω*) − σ((∇ω)†); `None` without a star structure.
    pub star_preserving: Option<Mat<S>>,
}

impl<S: Scalar> BmCertificate<S> {
    /// All residuals vanish (star-preservation only where defined).
    pub fn is_lc(&self) -> bool {
        self.torsion.is_zero()
            && is_zero_vec(&self.compat)
            && self.star_preserving.as_ref().is_none_or(Mat::is_zero)
    }
}

/// Verify a connection against the BM definition: derive its braiding, then
/// evaluate wedge torsion, braided compatibility, and star-preservation.
pub fn verify_bm<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    dga: &Dga2<S>,
    metric: &Metric<S>,
    nabla: &Mat<S>,
) -> Result<BmCertificate<S>> {
    let sigma = match derive_sigma(foc, nabla) {
        SigmaResult::NotBimodule => {
            return Err(Error::NotBimodule(
                "the connection has no braiding: its right Leibniz defect is not a bimodule map"
                    .into(),
            ))
        }
        r => r.canonical().expect("canonical exists").clone(),
    };
    let torsion = bm_torsion(dga, nabla);
    let compat = tensor_connection(foc, nabla, &sigma)?.mul_vec(&metric.g);
    let star_preserving = match foc.star {
        Some(_) => Some(star_preserving_residual(foc, nabla, &sigma)?),
        None => None,
    };
    let sigma_invertible = rank(&sigma) == foc.tensor_dim();
    Ok(BmCertificate {
        sigma,
        sigma_invertible,
        torsion,
        compat,
        star_preserving,
    })
}

/// Residual report for a candidate connection against the MR definition.
pub fn verify_mr<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    wso: &WeakSecondOrder<S>,
    metric: &Metric<S>,
    nabla: &Mat<S>,
) -> Result<ValidationReport> {
    let h = hermitian_from_metric(foc, metric)?;
    let mut report = leibniz_residuals(foc, nabla);
    report.check_zero(
        "projector torsion",
        "(1 − ψ)∇ = d_ψ",
        &mr_torsion(wso, nabla),
    );
    report.check_zero(
        "hermitian compatibility",
        "d⟨⟨ω,η⟩⟩ matches ∇",
        &hermitian_compat_residual(foc, &h, nabla)?,
    );
    Ok(report)
}

/// Every MR residual as one complex vector, in the fixed order: Leibniz by
/// algebra index, projector torsion, hermitian compatibility. Affine in ∇
/// over the reals; tests difference it against unit connections to rebuild
/// the solver's system independently.
pub fn mr_residual_stack<S: Scalar>(
    foc: &FirstOrderCalculus<S>,
    wso: &WeakSecondOrder<S>,
    h: &Hermitian<S>,
    nabla: &Mat<S>,
) -> Result<Vec<S>> {
    let (t, m) = (foc.tensor_dim(), foc.one_dim());
    let mut out = Vec::new();
    for i in 0..foc.algebra.dim {
        let di = foc.d.col(i);
        let mut k = Mat::zero(t, m);
        for a in 0..m {
            let v = foc.tensor_square.pure(&di, &unit_vec(m, a));
            for r in 0..t {
                k.set(r, a, v[r].clone());
            }
        }
        out.extend(
            nabla
                .mul(foc.one_forms.left_basis_action(i))
                .sub(&k)
                .sub(&foc.tensor_square.module.left_basis_action(i).mul(nabla))
                .to_vec(),
        );
    }
    out.extend(mr_torsion(wso, nabla).to_vec());
    out.extend(hermitian_compat_residual(foc, h, nabla)?.to_vec());
    Ok(out)
}

/// Candidate braidings for sampling star-preserving connections: unit
/// multiples of the flip (when it descends) and of the identity.
fn candidate_sigmas<S: Scalar>(foc: &FirstOrderCalculus<S>) -> Vec<Mat<S>> {
    let t = foc.tensor_dim();
    let units = [S::one(), -S::one(), S::i(), -S::i()];
    let mut out: Vec<Mat<S>> = Vec::new();
    if let Ok(fl) = flip_sigma(&foc.tensor_square) {
        for u in &units {
            out.push(fl.scale(u));
        }
    }
    for u in &units {
        let cand = Mat::identity(t).scale(u);
        if !out.contains(&cand) {
            out.push(cand);
        }
    }
    out
}

/// The star-preserving bimodule connections with braiding σ, when any
/// exist: Leibniz, the σ-braiding equations, and ∇(ω*) = σ((∇ω)†) as one
/// realified system.
pub fn star_preserving_family<S: Scalar>(
    foc: &Arc<FirstOrderCalculus<S>>,
    sigma: &Mat<S>,
) -> Result<Option<ConnectionFamily<S>>> {
    let (t, m) = (foc.tensor_dim(), foc.one_dim());
    let (la, lrhs) = leibniz_system(foc);
    let (ba, brhs) = braiding_system(foc, sigma);
    let (sa, sb) = star_preserving_blocks(foc, sigma)?;
    let srhs = zero_vec(sa.rows);
    let blocks = [
        RealBlock::new("left Leibniz", &la, None, &lrhs),
        RealBlock::new("braiding", &ba, None, &brhs),
        RealBlock::new("star-preservation", &sa, Some(&sb), &srhs),
    ];
    match solve_blocks(t, m, &blocks) {
        Ok(fam) => Ok(Some(fam)),
        Err(Error::Infeasible(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Draw `n` star-preserving bimodule connections with their braidings,
/// round-robin over the feasible candidate braidings. Errors when no
/// candidate admits any, rather than silently under-sampling.
pub fn sample_star_preserving<S: Scalar>(
    foc: &Arc<FirstOrderCalculus<S>>,
    n: usize,
    seed: u64,
) -> Result<Vec<(Mat<S>, Mat<S>)>> {
    let mut fams: Vec<(Mat<S>, ConnectionFamily<S>)> = Vec::new();
    for sig in candidate_sigmas(foc) {
        if let Some(fam) = star_preserving_family(foc, &sig)? {
            fams.push((sig, fam));
        }
    }
    if fams.is_empty() {
        return Err(Error::Infeasible(
            "no star-preserving bimodule connections among the candidate braidings".into(),
        ));
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let (sig, fam) = &fams[k % fams.len()];
        let mut rng = rng_for(seed ^ 0xA5A5_5A5A, k as u64);
        out.push((fam.member(&mut rng), sig.clone()));
    }
    Ok(out)
}

/// One sampled comparison in an equivalence report.
#[derive(Clone, Debug)]
pub struct EquivRecord<S> {
    pub index: usize,
    pub from_solver: bool,
    pub lhs_zero: bool,
    pub rhs_zero: bool,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    /// Populated exactly when the two sides disagree about vanishing.
    pub witness: Option<EquivWitness<S>>,
}

/// Full data for a failed biconditional.
#[derive(Clone, Debug)]
pub struct EquivWitness<S> {
    pub nabla: Mat<S>,
    pub sigma: Option<Mat<S>>,
    pub lhs: Mat<S>,
    pub rhs: Mat<S>,
}

/// Seeded comparison of the two torsion conventions, and of the two metric
/// compatibility conventions on star-preserving bimodule connections.
#[derive(Clone, Debug)]
pub struct EquivalenceReport<S> {
    pub samples: usize,
    pub seed: u64,
    pub torsion: Vec<EquivRecord<S>>,
    pub compat: Vec<EquivRecord<S>>,
    /// False when the calculus has no star structure, in which case the
    /// hermitian side of the compatibility biconditional does not exist.
    pub compat_applicable: bool,
    /// Real dimension of the MR solution family, when the solve is feasible.
    pub solver_dim: Option<usize>,
}

impl<S> EquivalenceReport<S> {
    pub fn counterexamples(&self) -> usize {
        self.torsion
            .iter()
            .chain(&self.compat)
            .filter(|r| r.witness.is_some())
            .count()
    }
}

fn record<S: Scalar>(
    index: usize,
    from_solver: bool,
    nabla: &Mat<S>,
    sigma: Option<&Mat<S>>,
    lhs: Mat<S>,
    rhs: Mat<S>,
) -> EquivRecord<S> {
    let lhs_zero = lhs.is_zero();
    let rhs_zero = rhs.is_zero();
    let witness = (lhs_zero != rhs_zero).then(|| EquivWitness {
        nabla: nabla.clone(),
        sigma: sigma.cloned(),
        lhs: lhs.clone(),
        rhs: rhs.clone(),
    });
    EquivRecord {
        index,
        from_solver,
        lhs_zero,
        rhs_zero,
        lhs_norm: lhs.max_abs(),
        rhs_norm: rhs.max_abs(),
        witness,
    }
}

/// Sample seeded connections plus every solver representative and compare:
/// wedge torsion vanishes iff projector torsion does, and braided metric
/// compatibility vanishes iff hermitian compatibility does. Needs both
/// second-order structures; a broken ψ or wedge is refused up front.
pub fn equivalence_report<S: Scalar>(
    p: &LcProblem<S>,
    samples: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<EquivalenceReport<S>> {
    let foc = &p.foc;
    let dga = p
        .dga
        .as_ref()
        .ok_or_else(|| Error::Validation("equivalence needs an exterior algebra".into()))?;
    let wso = p
        .wso
        .as_ref()
        .ok_or_else(|| Error::Validation("equivalence needs a torsion projector".into()))?;
    dga.validate().require("exterior algebra")?;
    wso.validate().require("torsion projector")?;
    let (t, m) = (foc.tensor_dim(), foc.one_dim());

    let space = connection_space(foc)
        .ok_or_else(|| Error::Infeasible("the calculus admits no connection".into()))?;
    let h = match foc.star {
        Some(_) => Some(hermitian_from_metric(foc, &p.metric)?),
        None => None,
    };
    let (solver_reps, solver_dim) = match &h {
        Some(h) => match solve_mr_with(foc, wso, h) {
            Ok(fam) => (fam.representatives(), Some(fam.dim())),
            Err(Error::Infeasible(_)) => (Vec::new(), None),
            Err(e) => return Err(e),
        },
        None => (Vec::new(), None),
    };

    let mut torsion_inputs: Vec<(bool, Mat<S>)> = exec::map_indexed(mode, samples, |i| {
        let mut rng = rng_for(seed, i as u64);
        let coeffs: Vec<S> = (0..space.dim()).map(|_| S::random_small(&mut rng)).collect();
        (false, Mat::from_flat(t, m, space.member(&coeffs)))
    });
    torsion_inputs.extend(solver_reps.iter().map(|r| (true, r.clone())));
    let torsion = exec::map_indexed(mode, torsion_inputs.len(), |k| {
        let (from_solver, nabla) = &torsion_inputs[k];
        record(
            k,
            *from_solver,
            nabla,
            None,
            bm_torsion(dga, nabla),
            mr_torsion(wso, nabla),
        )
    });

    let (compat, compat_applicable) = match &h {
        None => (Vec::new(), false),
        Some(h) => {
            let mut inputs: Vec<(bool, Mat<S>, Mat<S>)> =
                sample_star_preserving(foc, samples, seed)?
                    .into_iter()
                    .map(|(n, s)| (false, n, s))
                    .collect();
            for rep in &solver_reps {
                if let Some(sig) = derive_sigma(foc, rep).canonical() {
                    if star_preserving_residual(foc, rep, sig)?.is_zero() {
                        inputs.push((true, rep.clone(), sig.clone()));
                    }
                }
            }
            let recs = exec::map_indexed(mode, inputs.len(), |k| {
                let (from_solver, nabla, sigma) = &inputs[k];
                let braided = tensor_connection(foc, nabla, sigma)
                    .expect("sampled braiding descends")
                    .mul_vec(&p.metric.g);
                let lhs = Mat::from_flat(braided.len(), 1, braided);
                let rhs = hermitian_compat_residual(foc, h, nabla)
                    .expect("star structure exists");
                record(k, *from_solver, nabla, Some(sigma), lhs, rhs)
            });
            (recs, true)
        }
    };

    Ok(EquivalenceReport {
        samples,
        seed,
        torsion,
        compat,
        compat_applicable,
        solver_dim,
    })
}

/// Residual norms for one connection, over everything the problem's data
/// can express. `None` marks residuals whose defining structure is absent.
#[derive(Clone, Debug)]
pub struct LcCertificate<S> {
    pub nabla: Mat<S>,
    /// Canonical derived braiding, when the right Leibniz defect is a
    /// bimodule map.
    pub sigma: Option<Mat<S>>,
    pub sigma_invertible: Option<bool>,
    pub bm_torsion_norm: Option<f64>,
    pub mr_torsion_norm: Option<f64>,
    pub bm_compat_norm: Option<f64>,
    pub hermitian_norm: Option<f64>,
    pub star_preserving_norm: Option<f64>,
}

/// A solved Levi-Civita problem: the family plus certificates for its
/// representatives (base point first, then each direction shift).
#[derive(Clone, Debug)]
pub struct LcSolution<S> {
    pub family: ConnectionFamily<S>,
    pub certificates: Vec<LcCertificate<S>>,
}

/// Evaluate every expressible residual for one connection.
pub fn certify<S: Scalar>(p: &LcProblem<S>, nabla: &Mat<S>) -> Result<LcCertificate<S>> {
    let foc = &p.foc;
    let sigma = derive_sigma(foc, nabla).canonical().cloned();
    let sigma_invertible = sigma.as_ref().map(|s| rank(s) == foc.tensor_dim());
    let bm_torsion_norm = p.dga.as_ref().map(|dga| bm_torsion(dga, nabla).max_abs());
    let mr_torsion_norm = p.wso.as_ref().map(|wso| mr_torsion(wso, nabla).max_abs());
    let bm_compat_norm = sigma.as_ref().and_then(|s| {
        tensor_connection(foc, nabla, s)
            .ok()
            .map(|tc| max_abs_vec(&tc.mul_vec(&p.metric.g)))
    });
    let hermitian_norm = match foc.star {
        Some(_) => match hermitian_from_metric(foc, &p.metric) {
            Ok(h) => Some(hermitian_compat_residual(foc, &h, nabla)?.max_abs()),
            Err(_) => None,
        },
        None => None,
    };
    let star_preserving_norm = match (&sigma, &foc.star) {
        (Some(s), Some(_)) => Some(star_preserving_residual(foc, nabla, s)?.max_abs()),
        _ => None,
    };
    Ok(LcCertificate {
        nabla: nabla.clone(),
        sigma,
        sigma_invertible,
        bm_torsion_norm,
        mr_torsion_norm,
        bm_compat_norm,
        hermitian_norm,
        star_preserving_norm,
    })
}

/// Solve a Levi-Civita problem in its declared framework and certify every
/// representative of the result.
pub fn solve_lc<S: Scalar>(p: &LcProblem<S>) -> Result<LcSolution<S>> {
    let foc = &p.foc;
    let family = match p.framework {
        Framework::Mr => {
            let wso = p.wso.as_ref().ok_or_else(|| {
                Error::Validation("the MR solve needs a torsion projector".into())
            })?;
            solve_mr(foc, wso, &p.metric)?
        }
        Framework::Bm => {
            let dga = p.dga.as_ref().ok_or_else(|| {
                Error::Validation("the BM solve needs an exterior algebra".into())
            })?;
            let sigma = match &p.sigma_mode {
                SigmaMode::Derive => {
                    return Err(Error::Validation(
                        "BM compatibility is quadratic in ∇ when σ is derived; \
                         fix a braiding or use the MR framework"
                            .into(),
                    ))
                }
                SigmaMode::Flip => flip_sigma(&foc.tensor_square)?,
                SigmaMode::Given(s) => s.clone(),
            };
            solve_bm(foc, dga, &p.metric, &sigma)?
        }
    };
    let certificates = family
        .representatives()
        .iter()
        .map(|n| certify(p, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(LcSolution {
        family,
        certificates,
    })
}
