//! End-to-end analyses of the embedded datasets, shared by the CLI
//! `reproduce` command and the acceptance suite.

use std::fmt::Write as _;

use nalgebra::DVector;
use serde::Serialize;

use crate::dataset::LandmarkDataset;
use crate::error::Result;
use crate::extrinsic::{bootstrap_extrinsic_p_value, extrinsic_mean, one_sample_extrinsic_test};
use crate::fixtures;
use crate::projective::{axial_angle_and_double, cross_ratio, invariants_from_axial, AxialPoint, InvariantVector};
use crate::report::TestReport;
use crate::rotation::two_sample_axis_test;
use crate::shape::{DirectionalSample, ProjectiveShape};
use crate::tangent::{
    bootstrap_confidence_region, bootstrap_directional_p_value, componentwise_t_squared, euclidean_two_sample_hotelling, mean_directions,
    one_sample_hotelling, two_sample_hotelling, watson_williams, RegionMode,
};

pub const WINDOWS_B: usize = 5000;
pub const BUILDINGS_B: usize = 250;
pub const BUILDINGS_ALPHA: f64 = 0.07;
pub const FACES_B: usize = 1500;
pub const FACES_ALPHA: f64 = 0.05;

fn fmt_vec(v: &[f64], digits: usize) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.digits$}")).collect();
    format!("({})", parts.join(", "))
}

fn section(s: &mut String, title: &str, r: &TestReport) {
    let _ = writeln!(s, "\n[{title}]");
    s.push_str(&r.to_text());
}

fn canonical(v: &DVector<f64>) -> Vec<f64> {
    AxialPoint::from_unit(v.clone()).map(|a| a.canonical().iter().copied().collect()).unwrap_or_else(|_| v.iter().copied().collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct LineView {
    pub c: f64,
    pub phi: f64,
    pub theta: f64,
}

/// One-sample analyses of the collinear window data against equal spacing.
#[derive(Debug, Clone, Serialize)]
pub struct WindowsAnalysis {
    pub views: Vec<LineView>,
    pub published: Vec<LineView>,
    /// Doubled angle of the equally spaced configuration, 2·atan(3/4).
    pub theta0: f64,
    pub rbar: f64,
    pub watson_williams: TestReport,
    pub tangent: TestReport,
    pub extrinsic: TestReport,
    pub bootstrap_directional: TestReport,
    pub bootstrap_extrinsic: TestReport,
}

pub fn windows_analysis(b: usize, seed: u64) -> Result<WindowsAnalysis> {
    let ds = fixtures::windows();
    let shapes = ds.shapes("education", None)?;
    let mut views = Vec::new();
    for (v, s) in ds.group("education")?.views.iter().zip(&shapes) {
        let x: Vec<f64> = v.landmarks.iter().map(|p| p[0]).collect();
        let c = cross_ratio(x[0], x[1], x[2], x[3])?.finite().unwrap_or(f64::INFINITY);
        let (phi, theta) = axial_angle_and_double(&s.axes()[0])?;
        views.push(LineView { c, phi, theta });
    }
    let published = fixtures::windows_reference().into_iter().map(|p| LineView { c: p.c, phi: p.phi, theta: p.theta }).collect();
    let phi0 = 0.75_f64.atan();
    let theta0 = 2.0 * phi0;
    let thetas: Vec<f64> = views.iter().map(|v| v.theta).collect();
    let sample = DirectionalSample::from_angles(&thetas.iter().map(|&t| vec![t]).collect::<Vec<_>>())?;
    let mu0 = [DVector::from_vec(vec![theta0.cos(), theta0.sin()])];
    let rbar = mean_directions(&sample)?.rbar[0];
    let axis0 = [AxialPoint::from_slice(&[phi0.cos(), phi0.sin()])?];
    Ok(WindowsAnalysis {
        views,
        published,
        theta0,
        rbar,
        watson_williams: watson_williams(&thetas, theta0)?,
        tangent: one_sample_hotelling(&sample, &mu0)?,
        extrinsic: one_sample_extrinsic_test(&shapes, &axis0)?,
        bootstrap_directional: bootstrap_directional_p_value(&sample, &mu0, b, seed)?,
        bootstrap_extrinsic: bootstrap_extrinsic_p_value(&shapes, &axis0, b, seed)?,
    })
}

impl WindowsAnalysis {
    pub fn to_text(&self) -> String {
        let mut s = String::from("collinear windows: H0 equal spacing\n");
        let _ = writeln!(s, "view  c       phi     theta   | ref c      phi    theta");
        for (i, (v, p)) in self.views.iter().zip(&self.published).enumerate() {
            let _ = writeln!(s, "{}     {:.4}  {:.4}  {:.4}  | {:.3}      {:.3}  {:.3}", i + 1, v.c, v.phi, v.theta, p.c, p.phi, p.theta);
        }
        let _ = writeln!(s, "theta0: {:.6}", self.theta0);
        let _ = writeln!(s, "Rbar: {:.6}", self.rbar);
        section(&mut s, "Watson-Williams", &self.watson_williams);
        section(&mut s, "tangent one-sample", &self.tangent);
        section(&mut s, "extrinsic chi-squared", &self.extrinsic);
        section(&mut s, "bootstrap directional T2", &self.bootstrap_directional);
        section(&mut s, "bootstrap extrinsic T2", &self.bootstrap_extrinsic);
        s
    }
}

/// Two-sample comparison of the two buildings.
#[derive(Debug, Clone, Serialize)]
pub struct BuildingsAnalysis {
    pub rbar_education: f64,
    pub rbar_careers: f64,
    pub rbar_pooled: f64,
    pub pooled_mean: Vec<f64>,
    pub hotelling: TestReport,
    pub mean_education: Vec<f64>,
    pub mean_careers: Vec<f64>,
    pub h: Vec<f64>,
    pub axis_test: TestReport,
    pub intervals: [(f64, f64); 3],
    pub accept: bool,
    #[serde(skip)]
    pub cloud: Vec<[f64; 3]>,
    pub scale: f64,
    pub invariants_education: Vec<InvariantVector>,
    pub invariants_careers: Vec<InvariantVector>,
    pub invariant_test: TestReport,
}

fn invariants(shapes: &[ProjectiveShape]) -> Result<Vec<InvariantVector>> {
    shapes.iter().map(|s| invariants_from_axial(&s.axes()[0])).collect()
}

pub fn buildings_analysis(b: usize, seed: u64) -> Result<BuildingsAnalysis> {
    let ds = fixtures::buildings();
    let (edu, car) = (ds.shapes("education", None)?, ds.shapes("careers", None)?);
    let (se, sc) = (ds.directional_sample("education", None)?, ds.directional_sample("careers", None)?);
    let pooled = mean_directions(&se.concat(&sc)?)?;
    let axis = two_sample_axis_test(&edu, &car, b, seed, BUILDINGS_ALPHA, None)?;
    let (ie, ic) = (invariants(&edu)?, invariants(&car)?);
    let mean = |s: &[ProjectiveShape]| -> Result<Vec<f64>> { Ok(extrinsic_mean(s)?.axes[0].canonical().iter().copied().collect()) };
    let h = if axis.h.h[0] < 0.0 { -axis.h.h } else { axis.h.h };
    Ok(BuildingsAnalysis {
        rbar_education: mean_directions(&se)?.rbar[0],
        rbar_careers: mean_directions(&sc)?.rbar[0],
        rbar_pooled: pooled.rbar[0],
        pooled_mean: canonical(&pooled.mu[0]),
        hotelling: two_sample_hotelling(&se, &sc)?,
        mean_education: mean(&edu)?,
        mean_careers: mean(&car)?,
        h: h.iter().copied().collect(),
        axis_test: axis.report,
        intervals: axis.intervals,
        accept: axis.accept,
        cloud: axis.cloud,
        scale: axis.scale,
        invariant_test: euclidean_two_sample_hotelling(&ie, &ic)?,
        invariants_education: ie,
        invariants_careers: ic,
    })
}

impl BuildingsAnalysis {
    pub fn to_text(&self) -> String {
        let mut s = String::from("two buildings: H0 equal mean projective shape\n");
        let _ = writeln!(s, "Rbar education: {:.4}", self.rbar_education);
        let _ = writeln!(s, "Rbar careers: {:.4}", self.rbar_careers);
        let _ = writeln!(s, "Rbar pooled: {:.4}", self.rbar_pooled);
        let _ = writeln!(s, "pooled mean direction: {}", fmt_vec(&self.pooled_mean, 4));
        section(&mut s, "tangent two-sample", &self.hotelling);
        let _ = writeln!(s, "\n[extrinsic means]");
        let _ = writeln!(s, "education: {}", fmt_vec(&self.mean_education, 4));
        let _ = writeln!(s, "careers: {}", fmt_vec(&self.mean_careers, 4));
        let _ = writeln!(s, "H(r): {}", fmt_vec(&self.h, 4));
        section(&mut s, "rotation axis bootstrap", &self.axis_test);
        for (i, (lo, hi)) in self.intervals.iter().enumerate() {
            let _ = writeln!(s, "{}G{} interval: [{lo:.4}, {hi:.4}]", self.scale, i + 1);
        }
        let _ = writeln!(s, "identity in region: {}", if self.accept { "yes" } else { "no" });
        let _ = writeln!(s, "\n[invariants]");
        for (name, inv) in [("education", &self.invariants_education), ("careers", &self.invariants_careers)] {
            let list: Vec<String> = inv.iter().map(|v| fmt_vec(&v.iota, 3)).collect();
            let _ = writeln!(s, "{name}: {}", list.join(", "));
        }
        section(&mut s, "invariant two-sample", &self.invariant_test);
        s
    }
}

/// Frontal versus side face views, q = 2 axes in ℝP².
#[derive(Debug, Clone, Serialize)]
pub struct FacesAnalysis {
    pub rbar_frontal: Vec<f64>,
    pub rbar_side: Vec<f64>,
    pub rbar_combined: Vec<f64>,
    pub combined_means: Vec<Vec<f64>>,
    pub hotelling: TestReport,
    pub thresholds: Vec<f64>,
    /// Componentwise T² of the side sample at the frontal mean directions.
    pub side_at_frontal_mean: Vec<f64>,
    /// Componentwise T² of the frontal sample at the side mean directions.
    pub frontal_at_side_mean: Vec<f64>,
    pub side_inside: bool,
    pub frontal_region_contains_side_mean: bool,
    pub seed: u64,
    pub b: usize,
}

pub fn faces_analysis(b: usize, seed: u64) -> Result<FacesAnalysis> {
    faces_analysis_on(&fixtures::faces(), b, seed)
}

fn faces_analysis_on(ds: &LandmarkDataset, b: usize, seed: u64) -> Result<FacesAnalysis> {
    let (fr, si) = (ds.directional_sample("frontal", None)?, ds.directional_sample("side", None)?);
    let (mf, ms) = (mean_directions(&fr)?, mean_directions(&si)?);
    let combined = mean_directions(&fr.concat(&si)?)?;
    let region = bootstrap_confidence_region(&fr, b, seed, FACES_ALPHA, RegionMode::Bonferroni)?;
    let side_at_frontal_mean = componentwise_t_squared(&si, &mf.mu)?;
    let frontal_at_side_mean = region.statistics(&ms.mu)?;
    let side_inside = side_at_frontal_mean.iter().zip(&region.thresholds).all(|(t, c)| t <= c);
    Ok(FacesAnalysis {
        rbar_frontal: mf.rbar,
        rbar_side: ms.rbar,
        rbar_combined: combined.rbar.clone(),
        combined_means: combined.mu.iter().map(canonical).collect(),
        hotelling: two_sample_hotelling(&fr, &si)?,
        thresholds: region.thresholds.clone(),
        side_at_frontal_mean,
        frontal_region_contains_side_mean: region.contains(&ms.mu)?,
        frontal_at_side_mean,
        side_inside,
        seed,
        b,
    })
}

impl FacesAnalysis {
    pub fn to_text(&self) -> String {
        let mut s = String::from("frontal vs side views: H0 equal mean projective shape\n");
        let _ = writeln!(s, "Rbar frontal: {}", fmt_vec(&self.rbar_frontal, 4));
        let _ = writeln!(s, "Rbar side: {}", fmt_vec(&self.rbar_side, 4));
        let _ = writeln!(s, "Rbar combined: {}", fmt_vec(&self.rbar_combined, 4));
        for (i, m) in self.combined_means.iter().enumerate() {
            let _ = writeln!(s, "combined mean direction {}: {}", i + 1, fmt_vec(m, 4));
        }
        section(&mut s, "tangent two-sample", &self.hotelling);
        let _ = writeln!(s, "\n[frontal pivotal bootstrap region, Bonferroni]");
        let _ = writeln!(s, "alpha: {FACES_ALPHA}");
        let _ = writeln!(s, "B: {}", self.b);
        let _ = writeln!(s, "seed: {}", self.seed);
        let _ = writeln!(s, "thresholds: {}", fmt_vec(&self.thresholds, 4));
        let _ = writeln!(s, "side sample T2 at frontal mean: {}", fmt_vec(&self.side_at_frontal_mean, 4));
        let _ = writeln!(s, "  inside thresholds: {}", if self.side_inside { "yes" } else { "no" });
        let _ = writeln!(s, "frontal sample T2 at side mean: {}", fmt_vec(&self.frontal_at_side_mean, 4));
        let _ = writeln!(s, "  side mean in frontal region: {}", if self.frontal_region_contains_side_mean { "yes" } else { "no" });
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_analysis_core_values() {
        let r = windows_analysis(200, 1).unwrap();
        for (v, p) in r.views.iter().zip(&r.published) {
            assert!((v.c - p.c).abs() < 5e-3 && (v.phi - p.phi).abs() < 5e-3 && (v.theta - p.theta).abs() < 5e-3);
        }
        assert!((r.extrinsic.statistic - 6.154623).abs() < 1e-5);
        assert!(r.to_text().contains("Watson-Williams"));
    }

    #[test]
    fn buildings_analysis_means() {
        let r = buildings_analysis(50, 1).unwrap();
        for (a, b) in r.mean_education.iter().zip([0.8037, 0.5632, 0.1922]) {
            assert!((a - b).abs() < 5e-4);
        }
        for (a, b) in r.mean_careers.iter().zip([0.7907, 0.5834, 0.1855]) {
            assert!((a - b).abs() < 5e-4);
        }
        assert!((r.hotelling.statistic - 2.6075).abs() < 5e-3);
        assert_eq!(r.cloud.len(), 50);
    }

    #[test]
    fn faces_analysis_runs() {
        let r = faces_analysis(100, 1).unwrap();
        assert_eq!(r.thresholds.len(), 2);
        assert_eq!(r.to_text(), faces_analysis(100, 1).unwrap().to_text());
    }
}
