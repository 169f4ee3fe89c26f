//! Instance files: a JSON surface for every structure the library handles.
//!
//! Index conventions: `mult[i][j][k]` is the coefficient of basis vector k in
//! eᵢ·eⱼ; all matrices are row-major nested arrays; complex numbers are
//! `[re, im]` pairs of decimal strings, with exact mode accepting and
//! emitting rationals `"p/q"`. One instance per file; cocycles live in their
//! own files so they can be reused across instances.

use crate::algebra::StarAlgebra;
use crate::bimodule::Bimodule;
use crate::calculus::FirstOrderCalculus;
use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, solve_matrix, Mat};
use crate::metric::Metric;
use crate::scalar::Scalar;
use crate::second_order::Dga2;
use crate::spectral::FiniteSpectralTriple;
use crate::twist::{Cocycle, FiniteAbelianGroup, Grading};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// One complex number as `[re, im]` strings.
pub type Cx = [String; 2];

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InstanceFile {
    pub mode: String,
    pub algebra: AlgebraBlock,
    pub omega1: OmegaOneBlock,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub omega2: Option<OmegaTwoBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub metric: Option<MetricBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub connection: Option<ConnectionBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grading: Option<GradingBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spectral: Option<SpectralBlock>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AlgebraBlock {
    pub dim: usize,
    /// mult[i][j][k] = coefficient of eₖ in eᵢ·eⱼ.
    pub mult: Vec<Vec<Vec<Cx>>>,
    pub unit: Vec<Cx>,
    pub star: Vec<Vec<Cx>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OmegaOneBlock {
    pub dim: usize,
    /// One m×m matrix per algebra basis vector: the left action of eᵢ.
    pub left: Vec<Vec<Vec<Cx>>>,
    pub right: Vec<Vec<Vec<Cx>>>,
    /// m×n: d(eᵢ) in one-form coordinates, column i.
    pub d: Vec<Vec<Cx>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub star: Option<Vec<Vec<Cx>>>,
}

/// Second order data. Module actions on two-forms are not stored: they
/// descend from the tensor square through the wedge, which is checked on
/// load.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OmegaTwoBlock {
    pub dim: usize,
    /// w×t on tensor-square coordinates.
    pub wedge: Vec<Vec<Cx>>,
    /// w×m.
    pub d1: Vec<Vec<Cx>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MetricBlock {
    pub g: Vec<Cx>,
    /// n×t.
    pub pairing: Vec<Vec<Cx>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConnectionBlock {
    /// t×m.
    pub nabla: Vec<Vec<Cx>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sigma: Option<Vec<Vec<Cx>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GradingBlock {
    /// Invariant factors of the grading group.
    pub group: Vec<u32>,
    pub algebra: Vec<Vec<u32>>,
    pub omega1: Vec<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub omega2: Option<Vec<Vec<u32>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpectralBlock {
    pub hilbert_dim: usize,
    /// N²×n: row-major N×N representative of each basis vector, column i.
    pub rep: Vec<Vec<Cx>>,
    /// N×N.
    pub dirac: Vec<Vec<Cx>>,
}

/// A 2-cocycle in its own file, reusable across instances.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CocycleFile {
    pub mode: String,
    pub group: Vec<u32>,
    pub table: Vec<Vec<Cx>>,
}

/// The in-memory, validated form of an instance file.
#[derive(Debug)]
pub struct Instance<S: Scalar> {
    pub foc: Arc<FirstOrderCalculus<S>>,
    pub dga: Option<Dga2<S>>,
    pub metric: Option<Metric<S>>,
    pub nabla: Option<Mat<S>>,
    pub sigma: Option<Mat<S>>,
    pub grading: Option<Grading>,
    pub spectral: Option<FiniteSpectralTriple<S>>,
}

pub fn scalar_to_cx<S: Scalar>(z: &S) -> Cx {
    [S::format_real(&z.re_part()), S::format_real(&z.im_part())]
}

pub fn cx_to_scalar<S: Scalar>(c: &Cx) -> Result<S> {
    Ok(S::parse_real(&c[0])? + S::i() * S::parse_real(&c[1])?)
}

pub fn vec_to_json<S: Scalar>(v: &[S]) -> Vec<Cx> {
    v.iter().map(scalar_to_cx).collect()
}

pub fn vec_from_json<S: Scalar>(len: usize, v: &[Cx], what: &str) -> Result<Vec<S>> {
    if v.len() != len {
        return Err(Error::Parse(format!(
            "{what}: expected {len} entries, got {}",
            v.len()
        )));
    }
    v.iter().map(cx_to_scalar).collect()
}

pub fn mat_to_json<S: Scalar>(m: &Mat<S>) -> Vec<Vec<Cx>> {
    (0..m.rows).map(|r| vec_to_json(&m.row(r))).collect()
}

pub fn mat_from_json<S: Scalar>(
    rows: usize,
    cols: usize,
    m: &[Vec<Cx>],
    what: &str,
) -> Result<Mat<S>> {
    if m.len() != rows {
        return Err(Error::Parse(format!(
            "{what}: expected {rows} rows, got {}",
            m.len()
        )));
    }
    let mut flat = Vec::with_capacity(rows * cols);
    for (r, row) in m.iter().enumerate() {
        flat.extend(vec_from_json::<S>(cols, row, &format!("{what} row {r}"))?);
    }
    Ok(Mat::from_flat(rows, cols, flat))
}

fn action_stack_to_json<S: Scalar>(bm: &Bimodule<S>, left: bool) -> Vec<Vec<Vec<Cx>>> {
    (0..bm.algebra.dim)
        .map(|i| {
            mat_to_json(if left {
                bm.left_basis_action(i)
            } else {
                bm.right_basis_action(i)
            })
        })
        .collect()
}

fn action_stack_from_json<S: Scalar>(
    n: usize,
    m: usize,
    stack: &[Vec<Vec<Cx>>],
    what: &str,
) -> Result<Vec<Mat<S>>> {
    if stack.len() != n {
        return Err(Error::Parse(format!(
            "{what}: expected {n} action matrices, got {}",
            stack.len()
        )));
    }
    stack
        .iter()
        .enumerate()
        .map(|(i, a)| mat_from_json(m, m, a, &format!("{what}[{i}]")))
        .collect()
}

impl InstanceFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serialization");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<InstanceFile> {
        Ok(serde_json::from_str(text)?)
    }

    /// Convert and validate; the first failing validator aborts the load.
    pub fn to_instance<S: Scalar>(&self) -> Result<Instance<S>> {
        let n = self.algebra.dim;
        if self.algebra.mult.len() != n {
            return Err(Error::Parse(format!(
                "algebra.mult: expected {n} rows, got {}",
                self.algebra.mult.len()
            )));
        }
        let mut mult: Vec<S> = Vec::with_capacity(n * n * n);
        for (i, bi) in self.algebra.mult.iter().enumerate() {
            if bi.len() != n {
                return Err(Error::Parse(format!(
                    "algebra.mult[{i}]: expected {n} rows, got {}",
                    bi.len()
                )));
            }
            for (j, bij) in bi.iter().enumerate() {
                mult.extend(vec_from_json::<S>(
                    n,
                    bij,
                    &format!("algebra.mult[{i}][{j}]"),
                )?);
            }
        }
        let unit = vec_from_json::<S>(n, &self.algebra.unit, "algebra.unit")?;
        let star = mat_from_json::<S>(n, n, &self.algebra.star, "algebra.star")?;
        let algebra = Arc::new(StarAlgebra::new(n, mult, unit, star)?);
        algebra.validate().require("algebra")?;

        let m = self.omega1.dim;
        let left = action_stack_from_json::<S>(n, m, &self.omega1.left, "omega1.left")?;
        let right = action_stack_from_json::<S>(n, m, &self.omega1.right, "omega1.right")?;
        let one_forms = Bimodule::new(Arc::clone(&algebra), m, left, right)?;
        let d = mat_from_json::<S>(m, n, &self.omega1.d, "omega1.d")?;
        let star1 = self
            .omega1
            .star
            .as_ref()
            .map(|s| mat_from_json::<S>(m, m, s, "omega1.star"))
            .transpose()?;
        let foc = Arc::new(FirstOrderCalculus::new(algebra, one_forms, d, star1)?);
        foc.validate().require("omega1")?;

        let dga = self
            .omega2
            .as_ref()
            .map(|blk| dga_from_block(&foc, blk))
            .transpose()?;
        if let Some(dga) = &dga {
            dga.validate().require("omega2")?;
        }

        let metric = self
            .metric
            .as_ref()
            .map(|blk| -> Result<Metric<S>> {
                let t = foc.tensor_dim();
                let metric = Metric {
                    g: vec_from_json::<S>(t, &blk.g, "metric.g")?,
                    pairing: mat_from_json::<S>(foc.algebra.dim, t, &blk.pairing, "metric.pairing")?,
                };
                metric.validate(&foc).require("metric")?;
                Ok(metric)
            })
            .transpose()?;

        let (nabla, sigma) = match &self.connection {
            None => (None, None),
            Some(blk) => {
                let t = foc.tensor_dim();
                let nabla = mat_from_json::<S>(t, m, &blk.nabla, "connection.nabla")?;
                let sigma = blk
                    .sigma
                    .as_ref()
                    .map(|s| mat_from_json::<S>(t, t, s, "connection.sigma"))
                    .transpose()?;
                (Some(nabla), sigma)
            }
        };

        let grading = self
            .grading
            .as_ref()
            .map(|blk| -> Result<Grading> {
                let grading = Grading {
                    group: FiniteAbelianGroup::new(blk.group.clone())?,
                    algebra: blk.algebra.clone(),
                    one_forms: blk.omega1.clone(),
                    two_forms: blk.omega2.clone(),
                };
                match (&dga, &grading.two_forms) {
                    (Some(dga), Some(_)) => grading.validate_dga(dga)?.require("grading")?,
                    _ => grading.validate_foc(&foc).require("grading")?,
                }
                Ok(grading)
            })
            .transpose()?;

        let spectral = self
            .spectral
            .as_ref()
            .map(|blk| -> Result<FiniteSpectralTriple<S>> {
                let nn = blk.hilbert_dim;
                let triple = FiniteSpectralTriple {
                    algebra: Arc::clone(&foc.algebra),
                    hilbert_dim: nn,
                    rep: mat_from_json::<S>(nn * nn, foc.algebra.dim, &blk.rep, "spectral.rep")?,
                    dirac: mat_from_json::<S>(nn, nn, &blk.dirac, "spectral.dirac")?,
                };
                triple.validate().require("spectral")?;
                Ok(triple)
            })
            .transpose()?;

        Ok(Instance {
            foc,
            dga,
            metric,
            nabla,
            sigma,
            grading,
            spectral,
        })
    }
}

/// Rebuild a second-order structure from its wedge and d1: the two-form
/// actions descend from the tensor square through the wedge, provided the
/// wedge kernel is stable under both actions.
pub fn dga_from_block<S: Scalar>(
    foc: &Arc<FirstOrderCalculus<S>>,
    blk: &OmegaTwoBlock,
) -> Result<Dga2<S>> {
    let (t, m, n) = (foc.tensor_dim(), foc.one_dim(), foc.algebra.dim);
    let w = blk.dim;
    let wedge = mat_from_json::<S>(w, t, &blk.wedge, "omega2.wedge")?;
    let d1 = mat_from_json::<S>(w, m, &blk.d1, "omega2.d1")?;
    let section = solve_matrix(&wedge, &Mat::identity(w)).ok_or_else(|| {
        Error::IllDefined("omega2.wedge is not surjective onto the declared two-forms".into())
    })?;
    let kernel = kernel_basis(&wedge);
    let tm = &foc.tensor_square.module;
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for i in 0..n {
        for (acts, out) in [
            (tm.left_basis_action(i), &mut left),
            (tm.right_basis_action(i), &mut right),
        ] {
            for k in &kernel {
                if !crate::linalg::is_zero_vec(&wedge.mul_vec(&acts.mul_vec(k))) {
                    return Err(Error::IllDefined(format!(
                        "omega2.wedge kernel is not a sub-bimodule: basis vector {i} \
                         moves a kernel element out"
                    )));
                }
            }
            out.push(wedge.mul(&acts.mul(&section)));
        }
    }
    let two_forms = Bimodule::new(Arc::clone(&foc.algebra), w, left, right)?;
    Dga2::new(Arc::clone(foc), two_forms, wedge, d1)
}

/// Serialize core structures back into file blocks.
pub fn file_from_parts<S: Scalar>(
    mode: &str,
    foc: &FirstOrderCalculus<S>,
    dga: Option<&Dga2<S>>,
    metric: Option<&Metric<S>>,
    connection: Option<(&Mat<S>, Option<&Mat<S>>)>,
    grading: Option<&Grading>,
    spectral: Option<&FiniteSpectralTriple<S>>,
) -> InstanceFile {
    let n = foc.algebra.dim;
    let mult = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| scalar_to_cx(foc.algebra.c(i, j, k))).collect())
                .collect()
        })
        .collect();
    InstanceFile {
        mode: mode.to_string(),
        algebra: AlgebraBlock {
            dim: n,
            mult,
            unit: vec_to_json(&foc.algebra.unit),
            star: mat_to_json(&foc.algebra.star_mat),
        },
        omega1: OmegaOneBlock {
            dim: foc.one_dim(),
            left: action_stack_to_json(&foc.one_forms, true),
            right: action_stack_to_json(&foc.one_forms, false),
            d: mat_to_json(&foc.d),
            star: foc.star.as_ref().map(mat_to_json),
        },
        omega2: dga.map(|dga| OmegaTwoBlock {
            dim: dga.two_dim(),
            wedge: mat_to_json(&dga.wedge),
            d1: mat_to_json(&dga.d1),
        }),
        metric: metric.map(|metric| MetricBlock {
            g: vec_to_json(&metric.g),
            pairing: mat_to_json(&metric.pairing),
        }),
        connection: connection.map(|(nabla, sigma)| ConnectionBlock {
            nabla: mat_to_json(nabla),
            sigma: sigma.map(mat_to_json),
        }),
        grading: grading.map(|g| GradingBlock {
            group: g.group.factors.clone(),
            algebra: g.algebra.clone(),
            omega1: g.one_forms.clone(),
            omega2: g.two_forms.clone(),
        }),
        spectral: spectral.map(|t| SpectralBlock {
            hilbert_dim: t.hilbert_dim,
            rep: mat_to_json(&t.rep),
            dirac: mat_to_json(&t.dirac),
        }),
    }
}

impl CocycleFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("cocycle serialization");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<CocycleFile> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_cocycle<S: Scalar>(&self) -> Result<Cocycle<S>> {
        let group = FiniteAbelianGroup::new(self.group.clone())?;
        let o = group.order();
        let table = mat_from_json::<S>(o, o, &self.table, "cocycle.table")?;
        let gamma = Cocycle { group, table };
        gamma.validate().require("cocycle")?;
        Ok(gamma)
    }

    pub fn from_cocycle<S: Scalar>(mode: &str, gamma: &Cocycle<S>) -> CocycleFile {
        CocycleFile {
            mode: mode.to_string(),
            group: gamma.group.factors.clone(),
            table: mat_to_json(&gamma.table),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::function_algebra;
    use crate::calculus::universal_calculus;
    use crate::scalar::{Approx, Exact};
    use crate::second_order::prolongation_d;

    fn two_point_file() -> InstanceFile {
        let u = universal_calculus(Arc::new(function_algebra::<Exact>(2))).unwrap();
        let foc = Arc::new(u.foc);
        let t = foc.tensor_dim();
        let dga = Dga2::new(
            Arc::clone(&foc),
            foc.tensor_square.module.clone(),
            Mat::identity(t),
            prolongation_d(&foc).unwrap(),
        )
        .unwrap();
        file_from_parts(
            "exact",
            &foc,
            Some(&dga),
            None,
            None,
            None,
            None,
        )
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let file = two_point_file();
        let text = file.to_json();
        let reparsed = InstanceFile::parse(&text).unwrap();
        let inst = reparsed.to_instance::<Exact>().unwrap();
        let again = file_from_parts(
            "exact",
            &inst.foc,
            inst.dga.as_ref(),
            None,
            None,
            None,
            None,
        );
        assert_eq!(text, again.to_json());
    }

    #[test]
    fn two_form_actions_descend_through_the_wedge() {
        let file = two_point_file();
        let inst = file.to_instance::<Exact>().unwrap();
        let dga = inst.dga.unwrap();
        // wedge = id here, so the derived actions are the tensor actions
        for i in 0..2 {
            assert_eq!(
                dga.two_forms.left_basis_action(i),
                inst.foc.tensor_square.module.left_basis_action(i)
            );
        }
    }

    #[test]
    fn non_associative_mult_is_rejected_with_a_witness() {
        let mut file = two_point_file();
        file.algebra.mult[0][0][1] = scalar_to_cx(&Exact::one());
        let err = file.to_instance::<Exact>().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("algebra"), "unexpected error: {msg}");
    }

    #[test]
    fn shape_mismatch_is_a_parse_error() {
        let mut file = two_point_file();
        file.omega1.d.pop();
        assert!(matches!(
            file.to_instance::<Exact>().unwrap_err(),
            Error::Parse(_)
        ));
    }

    #[test]
    fn float_mode_parses_the_same_file() {
        let file = two_point_file();
        let inst = file.to_instance::<Approx>().unwrap();
        assert_eq!(inst.foc.one_dim(), 2);
    }

    #[test]
    fn exact_scalars_round_trip_through_strings() {
        let z = Exact::from_ratio(-3, 7) + Exact::i() * Exact::from_ratio(1, 2);
        let back: Exact = cx_to_scalar(&scalar_to_cx(&z)).unwrap();
        assert_eq!(z, back);
    }
}
