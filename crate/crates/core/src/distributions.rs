//! Circular and axial model families, samplers, and the Monte Carlo harness
//! that checks the chi-squared and F reference distributions of the tests.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bootstrap::substream;
use crate::error::{Error, Result};
use crate::extrinsic::one_sample_extrinsic_test;
use crate::projective::AxialPoint;
use crate::report::{Reference, TestReport};
use crate::shape::{DirectionalSample, ProjectiveShape};
use crate::tangent::{directional_t_squared, one_sample_hotelling};

/// Largest κ handled by the ascending series for I₀.
pub const BESSEL_SERIES_MAX: f64 = 15.0;

fn log_i0_series(kappa: f64) -> f64 {
    let x = kappa * kappa / 4.0;
    let (mut sum, mut term, mut j) = (1.0, 1.0, 1.0);
    while term > sum * 1e-18 {
        term *= x / (j * j);
        sum += term;
        j += 1.0;
    }
    sum.ln()
}

fn log_i0_asymptotic(kappa: f64) -> f64 {
    let (mut sum, mut term) = (1.0, 1.0);
    for k in 1..200 {
        let next = term * ((2 * k - 1) as f64).powi(2) / (8.0 * k as f64 * kappa);
        if next >= term || next < sum * 1e-18 {
            break;
        }
        term = next;
        sum += term;
    }
    kappa - 0.5 * (2.0 * PI * kappa).ln() + sum.ln()
}

/// log I₀(κ) for κ ≥ 0.
pub fn log_bessel_i0(kappa: f64) -> f64 {
    if kappa <= BESSEL_SERIES_MAX {
        log_i0_series(kappa)
    } else {
        log_i0_asymptotic(kappa)
    }
}

pub fn bessel_i0(kappa: f64) -> f64 {
    log_bessel_i0(kappa).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VonMisesParams {
    pub mu: f64,
    pub kappa: f64,
}

impl VonMisesParams {
    pub fn new(mu: f64, kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0) || !mu.is_finite() {
            return Err(Error::Argument(format!("von Mises needs finite mu and kappa >= 0, got mu = {mu}, kappa = {kappa}")));
        }
        Ok(Self { mu, kappa })
    }
}

pub fn von_mises_logpdf(theta: f64, p: &VonMisesParams) -> f64 {
    p.kappa * (theta - p.mu).cos() - (2.0 * PI).ln() - log_bessel_i0(p.kappa)
}

fn wrap_angle(t: f64) -> f64 {
    let w = (t + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// One von Mises draw in (−π, π] (Best and Fisher's wrapped-Cauchy envelope).
pub fn von_mises_draw<R: Rng + ?Sized>(rng: &mut R, p: &VonMisesParams) -> f64 {
    let k = p.kappa;
    if k < 1e-8 {
        return wrap_angle(p.mu + rng.random_range(-PI..PI));
    }
    if k.is_infinite() {
        return wrap_angle(p.mu);
    }
    let tau = 1.0 + (1.0 + 4.0 * k * k).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * k);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        let u3: f64 = rng.random();
        let z = (PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = k * (r - f);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let d = f.clamp(-1.0, 1.0).acos();
            return wrap_angle(if u3 > 0.5 { p.mu + d } else { p.mu - d });
        }
    }
}

pub fn von_mises_sample(p: &VonMisesParams, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = substream(seed, 0);
    (0..n).map(|_| von_mises_draw(&mut rng, p)).collect()
}

/// von Mises–Fisher draw on the unit sphere around `mu` (Wood's algorithm;
/// the circle uses the von Mises sampler).
pub fn vmf_draw<R: Rng + ?Sized>(rng: &mut R, mu: &DVector<f64>, kappa: f64) -> DVector<f64> {
    let d = mu.len();
    if kappa.is_infinite() {
        return mu.clone();
    }
    if d == 2 {
        let t = von_mises_draw(rng, &VonMisesParams { mu: mu[1].atan2(mu[0]), kappa });
        return DVector::from_vec(vec![t.cos(), t.sin()]);
    }
    let normal = |rng: &mut R, k: usize| -> DVector<f64> {
        loop {
            let v = DVector::from_fn(k, |_, _| -> f64 { StandardNormal.sample(&mut *rng) });
            let n = v.norm();
            if n > 1e-12 {
                return v / n;
            }
        }
    };
    if kappa < 1e-8 {
        return normal(rng, d);
    }
    let dm1 = (d - 1) as f64;
    let b = dm1 / (2.0 * kappa + (4.0 * kappa * kappa + dm1 * dm1).sqrt());
    let x0 = (1.0 - b) / (1.0 + b);
    let c = kappa * x0 + dm1 * (1.0 - x0 * x0).ln();
    let beta = Beta::new(dm1 / 2.0, dm1 / 2.0).expect("valid beta parameters");
    let w = loop {
        let z: f64 = beta.sample(rng);
        let w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
        let u: f64 = rng.random();
        if kappa * w + dm1 * (1.0 - x0 * w).ln() - c >= u.ln() {
            break w;
        }
    };
    let v = normal(rng, d - 1);
    let s = (1.0 - w * w).max(0.0).sqrt();
    let mut x = DVector::zeros(d);
    x[0] = w;
    x.rows_mut(1, d - 1).copy_from(&(v * s));
    // Householder reflection taking e₁ to mu.
    let mut u = -mu.clone();
    u[0] += 1.0;
    let un = u.norm();
    if un < 1e-12 {
        return x;
    }
    u /= un;
    let proj = u.dot(&x);
    x - u * (2.0 * proj)
}

/// Coefficients of the multivariate von Mises exponent
/// `Σ a_s cos θ_s + Σ b_s sin θ_s + Σ_{s≠t} (A_st cos θ_s cos θ_t + B_st cos θ_s sin θ_t + C_st sin θ_s sin θ_t)`,
/// summed over ordered pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct MultivariateVonMisesParams {
    pub a: DVector<f64>,
    pub b: DVector<f64>,
    pub a_st: DMatrix<f64>,
    pub b_st: DMatrix<f64>,
    pub c_st: DMatrix<f64>,
}

impl MultivariateVonMisesParams {
    pub fn new(a: DVector<f64>, b: DVector<f64>, a_st: DMatrix<f64>, b_st: DMatrix<f64>, c_st: DMatrix<f64>) -> Result<Self> {
        let q = a.len();
        if b.len() != q || [&a_st, &b_st, &c_st].iter().any(|m| m.shape() != (q, q)) {
            return Err(Error::Argument("multivariate von Mises coefficients have mismatched sizes".into()));
        }
        if (0..q).any(|s| a_st[(s, s)] != 0.0 || b_st[(s, s)] != 0.0 || c_st[(s, s)] != 0.0) {
            return Err(Error::Argument("coupling matrices must have zero diagonals".into()));
        }
        Ok(Self { a, b, a_st, b_st, c_st })
    }

    /// Independent components: `a_s = κ_s cos μ_s`, `b_s = κ_s sin μ_s`.
    pub fn independent(components: &[VonMisesParams]) -> Self {
        let q = components.len();
        Self {
            a: DVector::from_iterator(q, components.iter().map(|p| p.kappa * p.mu.cos())),
            b: DVector::from_iterator(q, components.iter().map(|p| p.kappa * p.mu.sin())),
            a_st: DMatrix::zeros(q, q),
            b_st: DMatrix::zeros(q, q),
            c_st: DMatrix::zeros(q, q),
        }
    }

    /// Bivariate density `κ₁cos(θ₁−μ) + κ₂cos(θ₂−ν) − κ₃cos(θ₁−μ−θ₂+ν)`.
    ///
    /// With δ = μ − ν the coupling expands to
    /// `−κ₃[cos δ (c₁c₂ + s₁s₂) + sin δ (s₁c₂ − c₁s₂)]`, which over ordered
    /// pairs gives `A₁₂ = A₂₁ = C₁₂ = C₂₁ = −κ₃cos δ / 2`, `B₁₂ = κ₃ sin δ`
    /// and `B₂₁ = −κ₃ sin δ`. Only κ₁, κ₂ ≥ 0 is enforced.
    pub fn bivariate_cosine_coupled(k1: f64, k2: f64, k3: f64, mu: f64, nu: f64) -> Result<Self> {
        if !(k1 >= 0.0 && k2 >= 0.0) {
            return Err(Error::Argument("kappa1 and kappa2 must be nonnegative".into()));
        }
        let mut p = Self::independent(&[VonMisesParams { mu, kappa: k1 }, VonMisesParams { mu: nu, kappa: k2 }]);
        let d = mu - nu;
        let sym = -k3 * d.cos() / 2.0;
        p.a_st = DMatrix::from_row_slice(2, 2, &[0.0, sym, sym, 0.0]);
        p.c_st = p.a_st.clone();
        p.b_st = DMatrix::from_row_slice(2, 2, &[0.0, k3 * d.sin(), -k3 * d.sin(), 0.0]);
        Ok(p)
    }

    pub fn q(&self) -> usize {
        self.a.len()
    }
}

/// Exponent of the multivariate von Mises density. The normalizing constant
/// is not available in closed form for q > 1 and is omitted.
pub fn multivariate_vm_logdensity_unnormalized(thetas: &[f64], p: &MultivariateVonMisesParams) -> Result<f64> {
    let q = p.q();
    if thetas.len() != q {
        return Err(Error::Argument(format!("expected {q} angles, got {}", thetas.len())));
    }
    let (c, s): (Vec<f64>, Vec<f64>) = thetas.iter().map(|t| (t.cos(), t.sin())).unzip();
    let mut e = 0.0;
    for i in 0..q {
        e += p.a[i] * c[i] + p.b[i] * s[i];
        for j in 0..q {
            e += p.a_st[(i, j)] * c[i] * c[j] + p.b_st[(i, j)] * c[i] * s[j] + p.c_st[(i, j)] * s[i] * s[j];
        }
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimrothWatsonParams {
    pub mu: DVector<f64>,
    pub k: f64,
}

impl DimrothWatsonParams {
    pub fn new(mu: DVector<f64>, k: f64) -> Result<Self> {
        if (mu.norm() - 1.0).abs() > crate::tolerance::UNIT {
            return Err(Error::Argument("Dimroth-Watson axis must be a unit vector".into()));
        }
        Ok(Self { mu, k })
    }
}

/// `k (μ·z)²`.
pub fn dimroth_watson_logdensity_unnormalized(z: &AxialPoint, p: &DimrothWatsonParams) -> Result<f64> {
    if z.dim() + 1 != p.mu.len() {
        return Err(Error::Argument("axis dimensions differ".into()));
    }
    Ok(p.k * p.mu.dot(z.unit()).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CalibrationStatistic {
    Extrinsic,
    Tangent,
    Directional,
}

/// A generator (independent von Mises–Fisher noise of concentration κ on
/// each of q spheres Sᵐ) paired with a one-sample statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    pub statistic: CalibrationStatistic,
    pub m: usize,
    pub q: usize,
    pub kappa: f64,
    /// Sample size used when none is given.
    pub default_n: usize,
}

impl Scenario {
    pub const NAMES: [&'static str; 3] = ["extrinsic", "tangent", "directional"];

    pub fn named(name: &str) -> Result<Self> {
        let (statistic, m, q, kappa, default_n) = match name {
            "extrinsic" => (CalibrationStatistic::Extrinsic, 1, 1, 100.0, 50),
            "tangent" => (CalibrationStatistic::Tangent, 2, 2, 200.0, 100),
            "directional" => (CalibrationStatistic::Directional, 1, 1, 100.0, 50),
            _ => return Err(Error::Argument(format!("unknown scenario '{name}' (expected one of {})", Self::NAMES.join(", ")))),
        };
        Ok(Self { statistic, m, q, kappa, default_n })
    }

    pub fn name(&self) -> &'static str {
        match self.statistic {
            CalibrationStatistic::Extrinsic => "extrinsic",
            CalibrationStatistic::Tangent => "tangent",
            CalibrationStatistic::Directional => "directional",
        }
    }

    fn reference(&self, n: usize) -> Reference {
        let big_m = (self.m * self.q) as f64;
        match self.statistic {
            CalibrationStatistic::Tangent => Reference::F { d1: big_m, d2: n as f64 - big_m },
            _ => Reference::ChiSquared { df: big_m },
        }
    }

    fn evaluate(&self, rows: Vec<Vec<DVector<f64>>>, mus: &[DVector<f64>]) -> Result<TestReport> {
        match self.statistic {
            CalibrationStatistic::Extrinsic => {
                let shapes = rows
                    .into_iter()
                    .map(|r| ProjectiveShape::from_axes(r.into_iter().map(AxialPoint::from_unit).collect::<Result<_>>()?))
                    .collect::<Result<Vec<_>>>()?;
                let mu0 = mus.iter().map(|m| AxialPoint::from_unit(m.clone())).collect::<Result<Vec<_>>>()?;
                one_sample_extrinsic_test(&shapes, &mu0)
            }
            CalibrationStatistic::Tangent => one_sample_hotelling(&DirectionalSample::new(rows)?, mus),
            CalibrationStatistic::Directional => Ok(directional_t_squared(&DirectionalSample::new(rows)?, mus)?.0),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Exceedance {
    /// Nominal level of the reference quantile (0.95 or 0.99).
    pub level: f64,
    pub rate: f64,
    pub se: f64,
}

impl Exceedance {
    fn new(level: f64, hits: usize, valid: usize) -> Self {
        if valid == 0 {
            return Self { level, rate: 0.0, se: 0.0 };
        }
        let rate = hits as f64 / valid as f64;
        Self { level, rate, se: (rate * (1.0 - rate) / valid as f64).sqrt() }
    }

    /// Normal-approximation 95% interval for the rate.
    pub fn interval(&self) -> (f64, f64) {
        (self.rate - 1.96 * self.se, self.rate + 1.96 * self.se)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationReport {
    pub scenario: Scenario,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    #[serde(skip)]
    pub reference: Reference,
    pub reference_label: String,
    /// Replications whose statistic could not be formed (degenerate
    /// covariance, undefined mean) or was exactly 0.
    pub degenerate: usize,
    pub valid: usize,
    pub exceedance: Vec<Exceedance>,
    /// Per-replication statistic, `None` for failed replications.
    pub statistics: Vec<Option<f64>>,
    pub flags: Vec<String>,
}

impl CalibrationReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "calibration: {} T2 (m = {}, q = {}, kappa = {})", self.scenario.name(), self.scenario.m, self.scenario.q, self.scenario.kappa);
        let _ = writeln!(s, "n = {}, reps = {}, seed = {}", self.n, self.reps, self.seed);
        let _ = writeln!(s, "reference: {}", self.reference_label);
        let _ = writeln!(s, "valid = {}, degenerate = {}", self.valid, self.degenerate);
        for e in &self.exceedance {
            let (lo, hi) = e.interval();
            let _ = writeln!(s, "exceedance of {:.0}% point: {:.4} (se {:.4}, nominal {:.2}, 95% CI [{:.4}, {:.4}])", e.level * 100.0, e.rate, e.se, 1.0 - e.level, lo, hi);
        }
        for f in &self.flags {
            let _ = writeln!(s, "flag: {f}");
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let _ = w.write_record(["scenario", "statistic", "reference", "n", "reps", "valid", "degenerate", "level", "exceedance", "se", "ci_lower", "ci_upper"]);
        for e in &self.exceedance {
            let (lo, hi) = e.interval();
            let _ = w.write_record([
                self.scenario.name().to_string(),
                format!("{}_t2", self.scenario.name()),
                self.reference_label.clone(),
                self.n.to_string(),
                self.reps.to_string(),
                self.valid.to_string(),
                self.degenerate.to_string(),
                format!("{}", e.level),
                format!("{:.6}", e.rate),
                format!("{:.6}", e.se),
                format!("{lo:.6}"),
                format!("{hi:.6}"),
            ]);
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }

    pub fn rate(&self, level: f64) -> Option<f64> {
        self.exceedance.iter().find(|e| (e.level - level).abs() < 1e-12).map(|e| e.rate)
    }
}

fn true_means(seed: u64, m: usize, q: usize) -> Vec<DVector<f64>> {
    let mut rng = substream(seed, u64::MAX);
    let e1 = DVector::from_fn(m + 1, |i, _| if i == 0 { 1.0 } else { 0.0 });
    (0..q).map(|_| vmf_draw(&mut rng, &e1, 0.0)).collect()
}

/// Simulates `reps` samples of size `n` at a random but fixed true mean and
/// records how often the statistic exceeds the 95% and 99% points of its
/// reference distribution. Replication `r` draws from substream `(seed, r)`.
pub fn calibration_harness(scenario: &Scenario, n: usize, reps: usize, seed: u64) -> Result<CalibrationReport> {
    if reps == 0 || n < 2 {
        return Err(Error::Argument("calibration needs reps >= 1 and n >= 2".into()));
    }
    let (m, q) = (scenario.m, scenario.q);
    if m == 0 || q == 0 {
        return Err(Error::Argument("scenario needs m >= 1 and q >= 1".into()));
    }
    let mus = true_means(seed, m, q);
    let outcomes: Vec<Result<Option<(f64, f64)>>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng: ChaCha8Rng = substream(seed, r as u64);
            let rows: Vec<Vec<DVector<f64>>> = (0..n).map(|_| mus.iter().map(|mu| vmf_draw(&mut rng, mu, scenario.kappa)).collect()).collect();
            match scenario.evaluate(rows, &mus) {
                Ok(rep) if rep.statistic > 0.0 && rep.statistic.is_finite() => Ok(Some((rep.statistic, rep.p_value.unwrap_or(1.0)))),
                Ok(_) => Ok(None),
                Err(
                    Error::SingularCovariance { .. }
                    | Error::MeanNotUnique { .. }
                    | Error::UndefinedMeanDirection
                    | Error::NotConcentrated { .. }
                    | Error::InsufficientData(_),
                ) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut statistics = Vec::with_capacity(reps);
    let (mut hits95, mut hits99, mut valid) = (0, 0, 0);
    for o in outcomes {
        match o? {
            Some((t, p)) => {
                valid += 1;
                hits95 += usize::from(p < 0.05);
                hits99 += usize::from(p < 0.01);
                statistics.push(Some(t));
            }
            None => statistics.push(None),
        }
    }
    let degenerate = reps - valid;
    let mut flags = Vec::new();
    if degenerate > 0 {
        flags.push(format!("{degenerate} degenerate replications excluded"));
    }
    if valid == 0 {
        flags.push("no valid replications".into());
    }
    let reference = scenario.reference(n);
    Ok(CalibrationReport {
        scenario: *scenario,
        n,
        reps,
        seed,
        reference_label: reference.to_string(),
        reference,
        degenerate,
        valid,
        exceedance: vec![Exceedance::new(0.95, hits95, valid), Exceedance::new(0.99, hits99, valid)],
        statistics,
        flags,
    })
}
