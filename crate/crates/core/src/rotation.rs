//! Comparison of two mean axes on ℝP² through the rotation that carries one
//! onto the other, its image in ℝP³ and a nonpivotal bootstrap.

use std::borrow::Borrow;

use nalgebra::{Matrix3, Vector3, Vector4};

use crate::bootstrap::{self, quantile_sorted};
use crate::error::{Error, Result};
use crate::extrinsic::extrinsic_mean;
use crate::report::{Reference, TestReport};
use crate::shape::{check_common_dims, ProjectiveShape};
use crate::tolerance;

/// A proper rotation of ℝ³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3 {
    r: Matrix3<f64>,
}

impl Rotation3 {
    pub fn identity() -> Self {
        Self { r: Matrix3::identity() }
    }

    pub fn new(r: Matrix3<f64>) -> Result<Self> {
        if (r.transpose() * r - Matrix3::identity()).amax() > 1e-10 || (r.determinant() - 1.0).abs() > 1e-10 {
            return Err(Error::Argument("matrix is not a proper rotation".into()));
        }
        Ok(Self { r })
    }

    /// Rotation by `angle` about the unit axis `n` (Rodrigues).
    pub fn from_axis_angle(n: &Vector3<f64>, angle: f64) -> Self {
        let n = n.normalize();
        let k = n.cross_matrix();
        Self { r: Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos()) }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.r
    }

    /// Rotation angle in [0, π].
    pub fn angle(&self) -> f64 {
        ((self.r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
    }
}

/// Rotation taking `a` to `b` in the plane they span and fixing its
/// orthogonal complement. `b` is negated first when `a·b < 0`.
pub fn aligning_rotation(a: &Vector3<f64>, b: &Vector3<f64>) -> Result<Rotation3> {
    let (na, nb) = (a.norm(), b.norm());
    if (na - 1.0).abs() > tolerance::UNIT || (nb - 1.0).abs() > tolerance::UNIT {
        return Err(Error::Argument("aligning rotation needs unit vectors".into()));
    }
    let b = if a.dot(b) < 0.0 { -b } else { *b };
    let k = a.cross(&b);
    let s2 = k.norm_squared();
    let c = a.dot(&b);
    if s2.sqrt() <= tolerance::NONZERO {
        return Ok(Rotation3::identity());
    }
    let kx = k.cross_matrix();
    Ok(Rotation3 { r: Matrix3::identity() + kx + kx * kx * ((1.0 - c) / s2) })
}

/// Image of a rotation in ℝP³: `[cos θ : sin θ · n]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationAxis4 {
    pub h: Vector4<f64>,
    /// The angle was within tolerance of π and the axis came from `R + I`.
    pub near_pi: bool,
}

impl RotationAxis4 {
    /// Equality modulo sign.
    pub fn same_axis(&self, other: &Self) -> bool {
        (self.h.dot(&other.h).abs() - 1.0).abs() <= tolerance::UNIT
    }
}

pub fn rotation_axis_h(rot: &Rotation3) -> RotationAxis4 {
    let r = rot.matrix();
    let theta = rot.angle();
    if theta <= tolerance::ROTATION_ANGLE {
        return RotationAxis4 { h: Vector4::new(1.0, 0.0, 0.0, 0.0), near_pi: false };
    }
    let w = Vector3::new(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]) / 2.0;
    if std::f64::consts::PI - theta <= tolerance::ROTATION_ANGLE {
        // R + I = 2 n nᵀ here; take its largest column.
        let p = r + Matrix3::identity();
        let j = (0..3).max_by(|&i, &j| p.column(i).norm().total_cmp(&p.column(j).norm())).unwrap_or(0);
        let n = p.column(j).normalize();
        return RotationAxis4 { h: Vector4::new(theta.cos(), theta.sin() * n[0], theta.sin() * n[1], theta.sin() * n[2]), near_pi: true };
    }
    let h = Vector4::new(theta.cos(), w[0], w[1], w[2]);
    RotationAxis4 { h: h.normalize(), near_pi: false }
}

/// Affine chart `(h₁, h₂, h₃)/h₀`.
pub fn affine_rot_coords(h: &RotationAxis4) -> Result<Vector3<f64>> {
    let h0 = h.h[0];
    if h0.abs() <= tolerance::DEGENERATE {
        return Err(Error::AtInfinity);
    }
    Ok(Vector3::new(h.h[1] / h0, h.h[2] / h0, h.h[3] / h0))
}

/// Outcome of the two-sample mean-axis comparison.
#[derive(Debug, Clone)]
pub struct AxisTest {
    pub report: TestReport,
    /// Observed H(r) and its affine coordinates G(r).
    pub h: RotationAxis4,
    pub g: Vector3<f64>,
    /// Simultaneous percentile intervals for `scale · G(r*)`, per coordinate.
    pub intervals: [(f64, f64); 3],
    /// Tail fraction trimmed at each end of each coordinate.
    pub trim: f64,
    pub scale: f64,
    /// The bootstrap cloud `scale · G(r*)`, in resample order.
    pub cloud: Vec<[f64; 3]>,
    pub accept: bool,
}

fn mean_axis<S: Borrow<ProjectiveShape>>(shapes: &[S]) -> Result<Vector3<f64>> {
    let u = extrinsic_mean(shapes)?.axes[0].unit().clone();
    Ok(Vector3::new(u[0], u[1], u[2]))
}

fn g_between<S: Borrow<ProjectiveShape>>(s1: &[S], s2: &[S]) -> Result<(RotationAxis4, Vector3<f64>)> {
    let r = aligning_rotation(&mean_axis(s1)?, &mean_axis(s2)?)?;
    let h = rotation_axis_h(&r);
    Ok((h, affine_rot_coords(&h)?))
}

/// Nonpivotal bootstrap comparison of the extrinsic mean axes of two samples
/// on ℝP² (one axis per shape). `scale` defaults to √(n₁ + n₂).
pub fn two_sample_axis_test<S: Borrow<ProjectiveShape> + Sync>(
    sample1: &[S],
    sample2: &[S],
    b: usize,
    seed: u64,
    alpha: f64,
    scale: Option<f64>,
) -> Result<AxisTest> {
    let (m1, q1) = check_common_dims(sample1)?;
    let (m2, q2) = check_common_dims(sample2)?;
    if m1 != 2 || m2 != 2 || q1 != 1 || q2 != 1 {
        return Err(Error::Argument("axis comparison needs shapes with m = 2 and a single axis".into()));
    }
    let (n1, n2) = (sample1.len(), sample2.len());
    if n1 < 2 || n2 < 2 {
        return Err(Error::InsufficientData("each sample needs at least 2 shapes".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Argument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let scale = scale.unwrap_or(((n1 + n2) as f64).sqrt());
    let (h, g) = g_between(sample1, sample2)?;

    let run = bootstrap::run(b, seed, |rng| {
        let i1 = bootstrap::resample_indices(rng, n1);
        let i2 = bootstrap::resample_indices(rng, n2);
        let a: Vec<&ProjectiveShape> = i1.iter().map(|&i| sample1[i].borrow()).collect();
        let c: Vec<&ProjectiveShape> = i2.iter().map(|&i| sample2[i].borrow()).collect();
        match g_between(&a, &c) {
            Ok((_, g)) => Ok(Some([scale * g[0], scale * g[1], scale * g[2]])),
            Err(Error::MeanNotUnique { .. }) | Err(Error::AtInfinity) => Ok(None),
            Err(e) => Err(e),
        }
    })?;

    let trim = (1.0 - (1.0 - alpha).powf(1.0 / 3.0)) / 2.0;
    let mut intervals = [(0.0, 0.0); 3];
    for (c, iv) in intervals.iter_mut().enumerate() {
        let mut col: Vec<f64> = run.values.iter().map(|p| p[c]).collect();
        col.sort_by(f64::total_cmp);
        let lo = col[((trim * col.len() as f64).floor() as usize).min(col.len() - 1)];
        *iv = (lo, quantile_sorted(&col, 1.0 - trim));
    }
    let accept = intervals.iter().all(|&(lo, hi)| lo <= 0.0 && 0.0 <= hi);

    let mut report = TestReport::new("mean axis rotation (nonpivotal bootstrap)", scale * g.norm(), Reference::Bootstrap { b })
        .detail("G1", g[0])
        .detail("G2", g[1])
        .detail("G3", g[2])
        .detail("scale", scale)
        .detail("trim per tail", trim);
    for (c, (lo, hi)) in intervals.iter().enumerate() {
        report = report.detail(format!("interval {} lower", c + 1), *lo).detail(format!("interval {} upper", c + 1), *hi);
    }
    report = report.detail("reject", if accept { 0.0 } else { 1.0 }).detail("rejected resamples", run.rejected as f64);
    report.seed = Some(seed);
    report.b = Some(b);
    report.df_convention = Some(format!("equal-tail trim (1 - (1 - alpha)^(1/3))/2 = {trim:.6} per coordinate"));
    if h.near_pi {
        report.flags.push("rotation angle near pi; axis recovered from R + I".into());
    }
    Ok(AxisTest { report, h, g, intervals, trim, scale, cloud: run.values, accept })
}
