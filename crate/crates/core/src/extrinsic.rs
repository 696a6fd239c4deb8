//! Extrinsic means on products of projective spaces, their covariance and
//! the associated chi-squared and bootstrap tests.
//!
//! Every axis `[x]` is embedded as the projection matrix `x xᵀ`; the mean of
//! a sample is the axis of the top eigenvector of each component's moment
//! matrix.

use std::borrow::Borrow;

use nalgebra::{DMatrix, DVector};

use crate::bootstrap::{self, BootstrapDistribution};
use crate::error::{Error, Result};
use crate::linalg::{self, SymEigen};
use crate::projective::AxialPoint;
use crate::report::{chi2_sf, Reference, TestReport};
use crate::shape::{check_common_dims, moment_matrix, ProjectiveShape};
use crate::tolerance;

/// Embedding `[z] ↦ z zᵀ`.
pub fn veronese_embed(z: &AxialPoint) -> DMatrix<f64> {
    z.unit() * z.unit().transpose()
}

/// Per-component eigen-decompositions of the moment matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSummary {
    pub components: Vec<SymEigen>,
}

impl EigenSummary {
    pub fn q(&self) -> usize {
        self.components.len()
    }

    /// m, the projective dimension.
    pub fn m(&self) -> usize {
        self.components[0].dim() - 1
    }

    /// Difference between the two largest eigenvalues of component `s`.
    pub fn gap(&self, s: usize) -> f64 {
        let v = &self.components[s].values;
        v[v.len() - 1] - v[v.len() - 2]
    }

    /// Top eigenvector of component `s`.
    pub fn top(&self, s: usize) -> DVector<f64> {
        self.components[s].top_vector()
    }

    /// Remaining eigenvectors of component `s`, as columns.
    pub fn lower(&self, s: usize) -> DMatrix<f64> {
        let m = self.m();
        self.components[s].vectors.columns(0, m).into_owned()
    }

    fn check_gaps(&self) -> Result<()> {
        for s in 0..self.q() {
            let trace: f64 = self.components[s].values.iter().sum();
            let gap = self.gap(s);
            if !(gap > tolerance::SPECTRAL_GAP * trace.abs().max(f64::MIN_POSITIVE)) {
                return Err(Error::MeanNotUnique { component: s, gap });
            }
        }
        Ok(())
    }
}

/// Decomposes every component moment matrix. Checks the spectral gaps.
pub fn eigen_summary<S: Borrow<ProjectiveShape>>(shapes: &[S]) -> Result<EigenSummary> {
    let (_, q) = check_common_dims(shapes)?;
    let components = (0..q).map(|s| linalg::jacobi_eigen(&moment_matrix(shapes, s))).collect::<Result<Vec<_>>>()?;
    let e = EigenSummary { components };
    e.check_gaps()?;
    Ok(e)
}

#[derive(Debug, Clone)]
pub struct ExtrinsicMean {
    pub axes: Vec<AxialPoint>,
    pub eigen: EigenSummary,
    pub n: usize,
}

pub fn extrinsic_mean<S: Borrow<ProjectiveShape>>(shapes: &[S]) -> Result<ExtrinsicMean> {
    let eigen = eigen_summary(shapes)?;
    let axes = (0..eigen.q()).map(|s| AxialPoint::from_vector(eigen.top(s))).collect::<Result<Vec<_>>>()?;
    Ok(ExtrinsicMean { axes, eigen, n: shapes.len() })
}

/// Mean squared chord distance from the sample to `candidate`.
pub fn frechet_function<S: Borrow<ProjectiveShape>>(shapes: &[S], candidate: &[AxialPoint]) -> Result<f64> {
    let (m, q) = check_common_dims(shapes)?;
    if candidate.len() != q || candidate.iter().any(|c| c.dim() != m) {
        return Err(Error::Argument("candidate does not match the sample dimensions".into()));
    }
    let js: Vec<DMatrix<f64>> = candidate.iter().map(veronese_embed).collect();
    let total: f64 = shapes
        .iter()
        .map(|sh| sh.borrow().axes().iter().zip(&js).map(|(x, j)| (veronese_embed(x) - j).norm_squared()).sum::<f64>())
        .sum();
    Ok(total / shapes.len() as f64)
}

/// Covariance of the tangential coordinates of the extrinsic mean, M = mq.
#[derive(Debug, Clone, PartialEq)]
pub struct GMatrix {
    pub entries: DMatrix<f64>,
}

/// G with rows and columns indexed by `(s, a)`, s over components and a over
/// the m lower eigenvectors.
pub fn covariance_g<S: Borrow<ProjectiveShape>>(shapes: &[S], eigen: &EigenSummary) -> Result<GMatrix> {
    eigen.check_gaps()?;
    let (m, q) = (eigen.m(), eigen.q());
    let big_m = m * q;
    let n = shapes.len();
    let tops: Vec<DVector<f64>> = (0..q).map(|s| eigen.top(s)).collect();
    let lowers: Vec<DMatrix<f64>> = (0..q).map(|s| eigen.lower(s)).collect();
    let weights: Vec<f64> = (0..q)
        .flat_map(|s| {
            let v = &eigen.components[s].values;
            (0..m).map(move |a| 1.0 / (v[m] - v[a]))
        })
        .collect();

    let mut g = DMatrix::<f64>::zeros(big_m, big_m);
    let mut u = DVector::<f64>::zeros(big_m);
    for sh in shapes {
        let axes = sh.borrow().axes();
        for s in 0..q {
            let x = axes[s].unit();
            let t = tops[s].dot(x);
            for a in 0..m {
                u[s * m + a] = lowers[s].column(a).dot(x) * t;
            }
        }
        g += &u * u.transpose();
    }
    let w = DVector::from_vec(weights);
    let g = DMatrix::from_fn(big_m, big_m, |i, j| g[(i, j)] * w[i] * w[j] / n as f64);
    Ok(GMatrix { entries: g })
}

/// `n · v G⁻¹ vᵀ` with `v = (γ_sᵀ D_s)_s`.
fn t_squared(n: usize, eigen: &EigenSummary, g: &GMatrix, gamma: &[DVector<f64>]) -> Result<f64> {
    let (m, q) = (eigen.m(), eigen.q());
    let mut v = DVector::<f64>::zeros(m * q);
    for s in 0..q {
        let proj = eigen.lower(s).transpose() * &gamma[s];
        v.rows_mut(s * m, m).copy_from(&proj);
    }
    let ginv = linalg::sym_inverse_checked(&g.entries, tolerance::COVARIANCE_RANK)?;
    Ok(n as f64 * linalg::quad_form(&ginv, &v))
}

fn check_mu0(m: usize, q: usize, mu0: &[AxialPoint]) -> Result<()> {
    if mu0.len() != q || mu0.iter().any(|a| a.dim() != m) {
        return Err(Error::Argument("hypothesized mean does not match the sample dimensions".into()));
    }
    Ok(())
}

/// Chi-squared test of `H₀: extrinsic mean = mu0`, with M = mq degrees of freedom.
pub fn one_sample_extrinsic_test<S: Borrow<ProjectiveShape>>(shapes: &[S], mu0: &[AxialPoint]) -> Result<TestReport> {
    let mean = extrinsic_mean(shapes)?;
    let (m, q) = (mean.eigen.m(), mean.eigen.q());
    check_mu0(m, q, mu0)?;
    let g = covariance_g(shapes, &mean.eigen)?;
    let gamma: Vec<DVector<f64>> = (0..q).map(|s| mu0[s].aligned_to(&mean.eigen.top(s))).collect();
    let t2 = t_squared(shapes.len(), &mean.eigen, &g, &gamma)?;
    let df = (m * q) as f64;
    let p = chi2_sf(t2, df)?;
    let mut r = TestReport::new("extrinsic one-sample T2", t2, Reference::ChiSquared { df }).with_p(p);
    r.chi2_p_value = Some(p);
    Ok(r)
}

/// Bootstrap distribution of the resampled T² pivot, centred at the sample
/// extrinsic mean. Degenerate resamples are redrawn.
pub fn bootstrap_extrinsic_test<S: Borrow<ProjectiveShape> + Sync>(
    shapes: &[S],
    b: usize,
    seed: u64,
) -> Result<BootstrapDistribution> {
    if b == 0 {
        return Err(Error::Argument("bootstrap needs B >= 1 resamples".into()));
    }
    let n = shapes.len();
    if n < 2 {
        return Err(Error::InsufficientData("bootstrap needs at least 2 observations".into()));
    }
    let eigen = eigen_summary(shapes)?;
    let tops: Vec<DVector<f64>> = (0..eigen.q()).map(|s| eigen.top(s)).collect();
    let run = bootstrap::run(b, seed, |rng| {
        let idx = bootstrap::resample_indices(rng, n);
        let star: Vec<&ProjectiveShape> = idx.iter().map(|&i| shapes[i].borrow()).collect();
        let Ok(e) = eigen_summary(&star) else { return Ok(None) };
        let g = covariance_g(&star, &e)?;
        match t_squared(n, &e, &g, &tops) {
            Ok(t) => Ok(Some(t)),
            Err(Error::SingularCovariance { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    })?;
    Ok(BootstrapDistribution::from_run(run, seed))
}

/// Bootstrap p-value of `H₀: extrinsic mean = mu0`: the fraction of resampled
/// pivots at or above the observed statistic.
pub fn bootstrap_extrinsic_p_value<S: Borrow<ProjectiveShape> + Sync>(
    shapes: &[S],
    mu0: &[AxialPoint],
    b: usize,
    seed: u64,
) -> Result<TestReport> {
    let observed = one_sample_extrinsic_test(shapes, mu0)?;
    let dist = bootstrap_extrinsic_test(shapes, b, seed)?;
    let p = dist.tail_probability(observed.statistic);
    let mut r = TestReport::new("extrinsic one-sample T2 (bootstrap)", observed.statistic, Reference::Bootstrap { b })
        .with_p(p)
        .detail("rejected resamples", dist.rejected as f64);
    r.chi2_p_value = observed.p_value;
    r.seed = Some(seed);
    r.b = Some(b);
    Ok(r)
}
