//! Tangent-space statistics for concentrated directional data: mean
//! directions, tangent coordinates, Hotelling-type tests, the Watson–Williams
//! test and bootstrap confidence regions for the mean direction.

use nalgebra::{DMatrix, DVector};

use crate::bootstrap::{self, BootstrapDistribution};
use crate::error::{Error, Result};
use crate::linalg;
use crate::projective::InvariantVector;
use crate::report::{chi2_sf, f_sf, Reference, TestReport};
use crate::shape::DirectionalSample;
use crate::tolerance;

/// Normalized mean vector and mean resultant length of each component.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanDirections {
    pub mu: Vec<DVector<f64>>,
    pub rbar: Vec<f64>,
}

pub fn mean_directions(sample: &DirectionalSample) -> Result<MeanDirections> {
    let n = sample.n() as f64;
    let mut mu = Vec::with_capacity(sample.q());
    let mut rbar = Vec::with_capacity(sample.q());
    for s in 0..sample.q() {
        let sum = sample.component(s).into_iter().fold(DVector::zeros(sample.m() + 1), |acc, x| acc + x);
        let mean = sum / n;
        let r = mean.norm();
        if r <= tolerance::DEGENERATE {
            return Err(Error::UndefinedMeanDirection);
        }
        mu.push(mean / r);
        rbar.push(r);
    }
    Ok(MeanDirections { mu, rbar })
}

/// Orthonormal basis of the tangent space at unit vector `mu`, as columns.
///
/// Gram–Schmidt on the canonical basis vectors, skipping the one most
/// parallel to `mu`.
pub fn tangent_frame(mu: &DVector<f64>) -> DMatrix<f64> {
    let d = mu.len();
    let skip = mu.iamax();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(d - 1);
    for j in (0..d).filter(|&j| j != skip) {
        let mut e = DVector::<f64>::zeros(d);
        e[j] = 1.0;
        e -= mu * mu.dot(&e);
        for b in &basis {
            let c = b.dot(&e);
            e -= b * c;
        }
        let nrm = e.norm();
        basis.push(e / nrm);
    }
    DMatrix::from_columns(&basis)
}

/// `(I − μμᵀ) x`.
pub fn tangent_projection(x: &DVector<f64>, mu: &DVector<f64>) -> DVector<f64> {
    x - mu * mu.dot(x)
}

fn frames(mu: &MeanDirections) -> Vec<DMatrix<f64>> {
    mu.mu.iter().map(tangent_frame).collect()
}

fn flat_coords(row: &[DVector<f64>], frames: &[DMatrix<f64>]) -> DVector<f64> {
    let m = frames[0].ncols();
    let mut v = DVector::<f64>::zeros(m * frames.len());
    for (s, (x, e)) in row.iter().zip(frames).enumerate() {
        v.rows_mut(s * m, m).copy_from(&(e.transpose() * x));
    }
    v
}

/// Tangent coordinates of every observation in the frames at `mu`, each
/// flattened to length M = mq.
pub fn tangent_coords(sample: &DirectionalSample, mu: &MeanDirections) -> Vec<DVector<f64>> {
    let fr = frames(mu);
    sample.rows().iter().map(|row| flat_coords(row, &fr)).collect()
}

/// Covariance with its Moore–Penrose inverse and effective rank.
#[derive(Debug, Clone)]
pub struct PooledCovariance {
    pub s: DMatrix<f64>,
    pub rank: usize,
    pub pinv: DMatrix<f64>,
}

impl PooledCovariance {
    pub fn new(s: DMatrix<f64>) -> Result<Self> {
        let p = linalg::sym_pinv(&s, tolerance::PINV_RANK)?;
        Ok(Self { s, rank: p.rank, pinv: p.pinv })
    }
}

fn mean_vec(vs: &[DVector<f64>]) -> DVector<f64> {
    let sum = vs.iter().skip(1).fold(vs[0].clone(), |acc, v| acc + v);
    sum / vs.len() as f64
}

/// Covariance dividing by n.
fn mle_cov(vs: &[DVector<f64>], mean: &DVector<f64>) -> DMatrix<f64> {
    let d = mean.len();
    let mut s = DMatrix::<f64>::zeros(d, d);
    for v in vs {
        let c = v - mean;
        s += &c * c.transpose();
    }
    s / vs.len() as f64
}

fn concentration_warnings(rbar: &[f64]) -> Vec<String> {
    rbar.iter()
        .enumerate()
        .filter(|(_, &r)| r < tolerance::CONCENTRATION_WARNING)
        .map(|(s, r)| format!("component {s} has mean resultant length {r:.4}; the tangent approximation may be poor"))
        .collect()
}

fn check_directions(sample: &DirectionalSample, mu0: &[DVector<f64>]) -> Result<()> {
    if mu0.len() != sample.q() || mu0.iter().any(|v| v.len() != sample.m() + 1) {
        return Err(Error::Argument("hypothesized mean directions do not match the sample dimensions".into()));
    }
    if mu0.iter().any(|v| (v.norm() - 1.0).abs() > tolerance::UNIT) {
        return Err(Error::Argument("hypothesized mean directions must be unit vectors".into()));
    }
    Ok(())
}

/// One-sample test of the mean direction against `mu0`, referenced to
/// `F_{M, n−M}`. Tangent coordinates are taken at the sample mean directions.
pub fn one_sample_hotelling(sample: &DirectionalSample, mu0: &[DVector<f64>]) -> Result<TestReport> {
    check_directions(sample, mu0)?;
    let (n, big_m) = (sample.n(), sample.big_m());
    if n <= big_m {
        return Err(Error::InsufficientData(format!("one-sample test needs n > {big_m}, got n = {n}")));
    }
    let md = mean_directions(sample)?;
    let fr = frames(&md);
    let vs: Vec<DVector<f64>> = sample.rows().iter().map(|r| flat_coords(r, &fr)).collect();
    let vbar = mean_vec(&vs);
    let cov = PooledCovariance::new(mle_cov(&vs, &vbar))?;
    let diff = vbar - flat_coords(mu0, &fr);
    let d2 = linalg::quad_form(&cov.pinv, &diff);
    let mut r = rank_adjusted_report("tangent one-sample T2", cov.rank, big_m, |k| (k as f64, (n - k) as f64), |k| {
        (n - k) as f64 / k as f64 * d2
    })?;
    r.chi2_p_value = Some(chi2_sf((n - 1) as f64 * d2, big_m as f64)?);
    r.warnings.extend(concentration_warnings(&md.rbar));
    r.df_convention = Some("S divides by n; F = (n-M)/M * D2 on F(M, n-M)".into());
    Ok(r.detail("D2", d2).detail("rank", cov.rank as f64))
}

fn rank_adjusted_report(
    name: &str,
    rank: usize,
    big_m: usize,
    dfs: impl Fn(usize) -> (f64, f64),
    stat: impl Fn(usize) -> f64,
) -> Result<TestReport> {
    if rank == 0 {
        return Err(Error::SingularCovariance { rank, dim: big_m });
    }
    let k = rank.min(big_m);
    let (d1, d2) = dfs(k);
    if d2 <= 0.0 {
        return Err(Error::InsufficientData(format!("{name}: no residual degrees of freedom")));
    }
    let f = stat(k);
    let mut r = TestReport::new(name, f, Reference::F { d1, d2 }).with_p(f_sf(f, d1, d2)?);
    if rank < big_m {
        r.flags.push(format!("covariance rank {rank} < {big_m}: pseudo-inverse with reduced degrees of freedom"));
    }
    Ok(r)
}

fn two_sample_core(name: &str, v: &[DVector<f64>], w: &[DVector<f64>], big_m: usize) -> Result<TestReport> {
    let (n1, n2) = (v.len(), w.len());
    let n = n1 + n2;
    if n1 == 0 || n2 == 0 || n <= big_m + 1 {
        return Err(Error::InsufficientData(format!("two-sample test needs n1 + n2 > {}, got {n}", big_m + 1)));
    }
    let (vbar, wbar) = (mean_vec(v), mean_vec(w));
    let s = (mle_cov(v, &vbar) * n1 as f64 + mle_cov(w, &wbar) * n2 as f64) / (n - 2) as f64;
    let cov = PooledCovariance::new(s)?;
    let diff = &vbar - &wbar;
    let d2 = linalg::quad_form(&cov.pinv, &diff);
    let (n1f, n2f, nf) = (n1 as f64, n2 as f64, n as f64);
    let mut r = rank_adjusted_report(name, cov.rank, big_m, |k| (k as f64, (n - k - 1) as f64), |k| {
        n1f * n2f * (nf - k as f64 - 1.0) * d2 / (nf * (nf - 2.0) * k as f64)
    })?;
    r.chi2_p_value = Some(chi2_sf(n1f * n2f / nf * d2, big_m as f64)?);
    r.df_convention = Some("S = (n1 S1 + n2 S2)/(n1 + n2 - 2), S_i divide by n_i; F on F(M, n1 + n2 - M - 1)".into());
    Ok(r.detail("D2", d2).detail("rank", cov.rank as f64))
}

/// Two-sample test of equal mean directions in the tangent space at the
/// pooled mean directions.
pub fn two_sample_hotelling(sample1: &DirectionalSample, sample2: &DirectionalSample) -> Result<TestReport> {
    let pooled = sample1.concat(sample2)?;
    let md = mean_directions(&pooled)?;
    let fr = frames(&md);
    let v: Vec<DVector<f64>> = sample1.rows().iter().map(|r| flat_coords(r, &fr)).collect();
    let w: Vec<DVector<f64>> = sample2.rows().iter().map(|r| flat_coords(r, &fr)).collect();
    let mut r = two_sample_core("tangent two-sample T2", &v, &w, pooled.big_m())?;
    r.warnings.extend(concentration_warnings(&md.rbar));
    Ok(r)
}

/// Classical two-sample Hotelling test on Euclidean vectors.
pub fn euclidean_two_sample_hotelling(inv1: &[InvariantVector], inv2: &[InvariantVector]) -> Result<TestReport> {
    let dim = inv1.first().or(inv2.first()).map(|v| v.iota.len()).ok_or_else(|| Error::InsufficientData("empty samples".into()))?;
    if dim == 0 || inv1.iter().chain(inv2).any(|v| v.iota.len() != dim) {
        return Err(Error::Argument("invariant vectors have mixed dimensions".into()));
    }
    let to_vecs = |xs: &[InvariantVector]| xs.iter().map(|v| DVector::from_column_slice(&v.iota)).collect::<Vec<_>>();
    two_sample_core("invariant two-sample T2", &to_vecs(inv1), &to_vecs(inv2), dim)
}

/// Watson–Williams test of `H₀: mean direction = θ₀` on the circle, on `F_{1,n−1}`.
pub fn watson_williams(angles: &[f64], theta0: f64) -> Result<TestReport> {
    let n = angles.len();
    if n < 2 {
        return Err(Error::InsufficientData("Watson-Williams test needs n >= 2".into()));
    }
    let (c, s0) = angles.iter().fold((0.0, 0.0), |(c, s), t| (c + (t - theta0).cos(), s + (t - theta0).sin()));
    let r = c.hypot(s0);
    let nf = n as f64;
    if r <= tolerance::DEGENERATE * nf {
        return Err(Error::UndefinedMeanDirection);
    }
    // Both differences are formed without cancellation.
    let r_minus_c = if c > 0.0 { s0 * s0 / (r + c) } else { r - c };
    let spread: f64 = angles.iter().flat_map(|a| angles.iter().map(move |b| 2.0 * ((a - b) / 2.0).sin().powi(2))).sum();
    let n_minus_r = spread / (nf + r);
    let d2 = (n - 1) as f64;
    let mut rep;
    if n_minus_r <= 0.0 {
        let f = if r_minus_c <= 0.0 { 0.0 } else { f64::INFINITY };
        rep = TestReport::new("Watson-Williams", f, Reference::F { d1: 1.0, d2 }).with_p(if f == 0.0 { 1.0 } else { 0.0 });
        rep.flags.push("sample has zero dispersion".into());
    } else {
        let f = d2 * r_minus_c / n_minus_r;
        rep = TestReport::new("Watson-Williams", f, Reference::F { d1: 1.0, d2 }).with_p(f_sf(f, 1.0, d2)?);
    }
    if r / nf < tolerance::CONCENTRATION_WARNING {
        rep.warnings.push(format!("mean resultant length {:.4}; the F approximation needs concentrated data", r / nf));
    }
    Ok(rep.detail("R", r).detail("Rbar", r / nf))
}

/// Tangential and normal parts of `ȳ_D − μ` in the frames at the sample mean
/// directions.
#[derive(Debug, Clone)]
pub struct TangentDecomposition {
    pub d: DVector<f64>,
    pub nu: Vec<DVector<f64>>,
    pub frames: Vec<DMatrix<f64>>,
}

/// Studentized directional statistic `T² = n dᵀ G⁻¹ d` for `H₀: μ_D = mu0`,
/// referenced to χ²_M.
pub fn directional_t_squared(sample: &DirectionalSample, mu0: &[DVector<f64>]) -> Result<(TestReport, TangentDecomposition)> {
    let md = mean_directions(sample)?;
    let fr = frames(&md);
    directional_with_frames(sample, mu0, &md, fr)
}

fn directional_with_frames(
    sample: &DirectionalSample,
    mu0: &[DVector<f64>],
    md: &MeanDirections,
    fr: Vec<DMatrix<f64>>,
) -> Result<(TestReport, TangentDecomposition)> {
    check_directions(sample, mu0)?;
    let (m, q, n) = (sample.m(), sample.q(), sample.n());
    let big_m = m * q;
    let mut d = DVector::<f64>::zeros(big_m);
    let mut nu = Vec::with_capacity(q);
    for s in 0..q {
        let delta = &md.mu[s] - &mu0[s];
        let ds = fr[s].transpose() * &delta;
        nu.push(&delta - &fr[s] * &ds);
        d.rows_mut(s * m, m).copy_from(&ds);
    }
    let mut g = DMatrix::<f64>::zeros(big_m, big_m);
    for row in sample.rows() {
        let u = flat_coords(row, &fr);
        g += &u * u.transpose();
    }
    let scale = DVector::from_fn(big_m, |i, _| 1.0 / md.rbar[i / m]);
    let g = DMatrix::from_fn(big_m, big_m, |i, j| g[(i, j)] * scale[i] * scale[j] / n as f64);
    let ginv = linalg::sym_inverse_checked(&g, tolerance::COVARIANCE_RANK)?;
    let t2 = n as f64 * linalg::quad_form(&ginv, &d);
    let p = chi2_sf(t2, big_m as f64)?;
    let mut r = TestReport::new("directional T2", t2, Reference::ChiSquared { df: big_m as f64 }).with_p(p);
    r.chi2_p_value = Some(p);
    r.warnings.extend(concentration_warnings(&md.rbar));
    Ok((r, TangentDecomposition { d, nu, frames: fr }))
}

/// The single-component sample made of column `s`.
pub fn component_sample(sample: &DirectionalSample, s: usize) -> Result<DirectionalSample> {
    DirectionalSample::new(sample.rows().iter().map(|r| vec![r[s].clone()]).collect())
}

/// Per-component directional statistics `T_s²` for `H₀: μ_s = mu0_s`.
pub fn componentwise_t_squared(sample: &DirectionalSample, mu0: &[DVector<f64>]) -> Result<Vec<f64>> {
    check_directions(sample, mu0)?;
    (0..sample.q())
        .map(|s| Ok(directional_t_squared(&component_sample(sample, s)?, std::slice::from_ref(&mu0[s]))?.0.statistic))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionMode {
    /// One threshold on the joint statistic at level 1 − α.
    Joint,
    /// One threshold per component at level 1 − α/q.
    Bonferroni,
}

/// Bootstrap confidence region for the mean directions.
#[derive(Debug, Clone)]
pub struct ConfidenceRegion {
    pub mode: RegionMode,
    pub alpha: f64,
    /// One threshold (joint) or one per component (Bonferroni).
    pub thresholds: Vec<f64>,
    pub distributions: Vec<BootstrapDistribution>,
    pub center: Vec<DVector<f64>>,
    pub rejected: usize,
    sample: DirectionalSample,
}

impl ConfidenceRegion {
    /// Statistics of the original sample at `mu`: the joint T² or the
    /// per-component T_s².
    pub fn statistics(&self, mu: &[DVector<f64>]) -> Result<Vec<f64>> {
        match self.mode {
            RegionMode::Joint => Ok(vec![directional_t_squared(&self.sample, mu)?.0.statistic]),
            RegionMode::Bonferroni => componentwise_t_squared(&self.sample, mu),
        }
    }

    pub fn contains(&self, mu: &[DVector<f64>]) -> Result<bool> {
        Ok(self.statistics(mu)?.iter().zip(&self.thresholds).all(|(t, c)| t <= c))
    }
}

fn pivot(star: &DirectionalSample, center: &[DVector<f64>], mode: RegionMode) -> Result<Option<Vec<f64>>> {
    let res = match mode {
        RegionMode::Joint => directional_t_squared(star, center).map(|(r, _)| vec![r.statistic]),
        RegionMode::Bonferroni => componentwise_t_squared(star, center),
    };
    match res {
        Ok(v) => Ok(Some(v)),
        Err(Error::SingularCovariance { .. }) | Err(Error::UndefinedMeanDirection) => Ok(None),
        Err(e) => Err(e),
    }
}

fn pivot_distributions(sample: &DirectionalSample, b: usize, seed: u64, mode: RegionMode) -> Result<(Vec<BootstrapDistribution>, Vec<DVector<f64>>, usize)> {
    if sample.n() < 2 {
        return Err(Error::InsufficientData("bootstrap needs at least 2 observations".into()));
    }
    let center = mean_directions(sample)?.mu;
    let run = bootstrap::run(b, seed, |rng| {
        let idx = bootstrap::resample_indices(rng, sample.n());
        pivot(&sample.select(&idx), &center, mode)
    })?;
    let k = match mode {
        RegionMode::Joint => 1,
        RegionMode::Bonferroni => sample.q(),
    };
    let dists = (0..k)
        .map(|j| {
            BootstrapDistribution::from_run(
                bootstrap::BootstrapRun { values: run.values.iter().map(|v| v[j]).collect(), rejected: run.rejected },
                seed,
            )
        })
        .collect();
    Ok((dists, center, run.rejected))
}

/// Region `{μ : T²(Y, μ) ≤ T*²}` with thresholds from the bootstrap pivot
/// `T²(Y*, Ȳ_D)`.
pub fn bootstrap_confidence_region(sample: &DirectionalSample, b: usize, seed: u64, alpha: f64, mode: RegionMode) -> Result<ConfidenceRegion> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Argument(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let (distributions, center, rejected) = pivot_distributions(sample, b, seed, mode)?;
    let level = match mode {
        RegionMode::Joint => 1.0 - alpha,
        RegionMode::Bonferroni => 1.0 - alpha / sample.q() as f64,
    };
    let thresholds = distributions.iter().map(|d| d.quantile(level)).collect();
    Ok(ConfidenceRegion { mode, alpha, thresholds, distributions, center, rejected, sample: sample.clone() })
}

/// Bootstrap p-value of `H₀: μ_D = mu0`: the fraction of pivots at or above
/// the observed directional statistic.
pub fn bootstrap_directional_p_value(sample: &DirectionalSample, mu0: &[DVector<f64>], b: usize, seed: u64) -> Result<TestReport> {
    let (observed, _) = directional_t_squared(sample, mu0)?;
    let (dists, _, rejected) = pivot_distributions(sample, b, seed, RegionMode::Joint)?;
    let p = dists[0].tail_probability(observed.statistic);
    let mut r = TestReport::new("directional T2 (bootstrap)", observed.statistic, Reference::Bootstrap { b })
        .with_p(p)
        .detail("rejected resamples", rejected as f64);
    r.chi2_p_value = observed.p_value;
    r.seed = Some(seed);
    r.b = Some(b);
    Ok(r)
}
