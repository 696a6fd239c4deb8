//! Projective-geometry kernel: homogeneous and axial points, projective
//! frames, axial registration of a point against a frame, cross-ratios and
//! projective invariants.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::tolerance;

/// A point of ℝPᵐ given by homogeneous coordinates (length m+1).
#[derive(Debug, Clone)]
pub struct HomogeneousPoint {
    coords: DVector<f64>,
}

impl HomogeneousPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Argument("homogeneous coordinates need at least 2 entries".into()));
        }
        let coords = DVector::from_vec(coords);
        if !coords.iter().all(|x| x.is_finite()) || coords.norm() <= tolerance::NONZERO {
            return Err(Error::Argument("homogeneous coordinates must be finite and nonzero".into()));
        }
        Ok(Self { coords })
    }

    /// Dimension m of the projective space.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    /// Scale-invariant equality: the representatives are proportional.
    pub fn same_point(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && match (AxialPoint::from_vector(self.coords.clone()), AxialPoint::from_vector(other.coords.clone())) {
                (Ok(a), Ok(b)) => a.same_axis(&b),
                _ => false,
            }
    }
}

/// Standard affine embedding `x ↦ [x¹ : … : xᵐ : 1]`.
pub fn affine_embed(x: &[f64]) -> Result<HomogeneousPoint> {
    let mut c = x.to_vec();
    c.push(1.0);
    HomogeneousPoint::new(c)
}

/// A point of ℝPᵐ as a unit vector, identified with its negative.
#[derive(Debug, Clone)]
pub struct AxialPoint {
    unit: DVector<f64>,
}

impl AxialPoint {
    /// Normalizes `v`; fails on a zero or non-finite vector.
    pub fn from_vector(v: DVector<f64>) -> Result<Self> {
        let n = v.norm();
        if !n.is_finite() || n <= tolerance::NONZERO {
            return Err(Error::Argument("axial point needs a nonzero finite vector".into()));
        }
        Ok(Self { unit: v / n })
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        Self::from_vector(DVector::from_column_slice(v))
    }

    /// Wraps an already-normalized vector, checking the norm.
    pub fn from_unit(v: DVector<f64>) -> Result<Self> {
        if ((v.norm() - 1.0).abs()) > tolerance::UNIT {
            return Err(Error::Argument(format!("vector is not unit norm (|v| = {})", v.norm())));
        }
        Ok(Self { unit: v })
    }

    pub fn dim(&self) -> usize {
        self.unit.len() - 1
    }

    /// The stored representative. Its sign carries no meaning.
    pub fn unit(&self) -> &DVector<f64> {
        &self.unit
    }

    /// Representative whose last nonzero coordinate is positive.
    pub fn canonical(&self) -> DVector<f64> {
        let last = self.unit.iter().rev().find(|x| x.abs() > tolerance::NONZERO).copied().unwrap_or(1.0);
        if last < 0.0 {
            -self.unit.clone()
        } else {
            self.unit.clone()
        }
    }

    /// Representative with nonnegative dot product against `reference`.
    pub fn aligned_to(&self, reference: &DVector<f64>) -> DVector<f64> {
        if self.unit.dot(reference) < 0.0 {
            -self.unit.clone()
        } else {
            self.unit.clone()
        }
    }

    /// Equality modulo sign.
    pub fn same_axis(&self, other: &Self) -> bool {
        self.dim() == other.dim() && (self.unit.dot(&other.unit).abs() - 1.0).abs() <= tolerance::UNIT
    }

    /// Largest coordinate difference to `other` after sign alignment.
    pub fn distance_mod_sign(&self, other: &[f64]) -> f64 {
        let o = DVector::from_column_slice(other);
        let aligned = self.aligned_to(&o);
        (aligned - o).amax()
    }
}

impl PartialEq for AxialPoint {
    fn eq(&self, other: &Self) -> bool {
        self.same_axis(other)
    }
}

impl fmt::Display for AxialPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = f.precision().unwrap_or(4);
        let parts: Vec<String> = self.canonical().iter().map(|x| format!("{x:.prec$}")).collect();
        write!(f, "[{}]", parts.join(" : "))
    }
}

/// Outcome of a general-position test.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralPosition {
    pub ok: bool,
    /// Indices of the first (m+1)-subset found to be linearly dependent.
    pub failing_subset: Option<Vec<usize>>,
}

/// Checks that every (m+1)-subset of the m+2 points spans ℝ^{m+1}.
///
/// Each column is scaled to unit length before taking the determinant, so
/// the test does not depend on the chosen representatives.
pub fn general_position_check(points: &[HomogeneousPoint]) -> Result<GeneralPosition> {
    let Some(first) = points.first() else {
        return Err(Error::Argument("no points given".into()));
    };
    let m = first.dim();
    if points.len() != m + 2 {
        return Err(Error::Argument(format!("a frame in ℝP^{m} needs {} points, got {}", m + 2, points.len())));
    }
    if points.iter().any(|p| p.dim() != m) {
        return Err(Error::Argument("frame points have mixed dimensions".into()));
    }
    for omit in (0..m + 2).rev() {
        let subset: Vec<usize> = (0..m + 2).filter(|&i| i != omit).collect();
        let cols: Vec<DVector<f64>> = subset.iter().map(|&i| points[i].coords().normalize()).collect();
        let mat = DMatrix::from_columns(&cols);
        if mat.determinant().abs() <= tolerance::DEGENERATE {
            return Ok(GeneralPosition { ok: false, failing_subset: Some(subset) });
        }
    }
    Ok(GeneralPosition { ok: true, failing_subset: None })
}

/// An ordered projective frame of m+2 points with its cached frame matrix
/// (columns are the first m+1 representatives) and the coefficients expressing
/// the last point in that basis.
#[derive(Debug, Clone)]
pub struct ProjectiveFrame {
    points: Vec<HomogeneousPoint>,
    u: DMatrix<f64>,
    beta: DVector<f64>,
}

/// Registration of one point: the intermediate coordinates and its axis.
#[derive(Debug, Clone)]
pub struct Registered {
    /// Coordinates of the point in the basis of the frame matrix.
    pub v: DVector<f64>,
    /// `v` divided componentwise by the frame coefficients.
    pub y: DVector<f64>,
    pub z: AxialPoint,
}

impl ProjectiveFrame {
    /// Builds a frame from m+2 points given in ℝᵐ (affine chart).
    pub fn from_affine(points: &[Vec<f64>]) -> Result<Self> {
        let pts = points.iter().map(|p| affine_embed(p)).collect::<Result<Vec<_>>>()?;
        Self::from_homogeneous(pts)
    }

    pub fn from_homogeneous(points: Vec<HomogeneousPoint>) -> Result<Self> {
        let gp = general_position_check(&points)?;
        if let Some(subset) = gp.failing_subset {
            return Err(Error::DegenerateFrame(format!("points {subset:?} are linearly dependent")));
        }
        let m = points[0].dim();
        let cols: Vec<DVector<f64>> = points[..=m].iter().map(|p| p.coords().clone()).collect();
        let u = DMatrix::from_columns(&cols);
        let unit_point = points[m + 1].coords();
        let beta = linalg::lu_solve(&u, unit_point)
            .ok_or_else(|| Error::DegenerateFrame("frame matrix is singular".into()))?;
        for (i, b) in beta.iter().enumerate() {
            let scaled = b.abs() * cols[i].norm() / unit_point.norm();
            if scaled <= tolerance::DEGENERATE {
                return Err(Error::DegenerateFrame(format!(
                    "unit point lies on a face of the simplex (coefficient {i} vanishes)"
                )));
            }
        }
        Ok(Self { points, u, beta })
    }

    pub fn dim(&self) -> usize {
        self.u.nrows() - 1
    }

    pub fn points(&self) -> &[HomogeneousPoint] {
        &self.points
    }

    /// Frame matrix whose columns are the first m+1 representatives.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// Coefficients of the unit point in the basis of [`Self::matrix`].
    pub fn beta(&self) -> &DVector<f64> {
        &self.beta
    }

    /// Axial coordinate of a point given in the affine chart.
    pub fn coordinate(&self, x: &[f64]) -> Result<Registered> {
        if x.len() != self.dim() {
            return Err(Error::Argument(format!("point has dimension {}, frame has {}", x.len(), self.dim())));
        }
        self.coordinate_homogeneous(&affine_embed(x)?)
    }

    pub fn coordinate_homogeneous(&self, p: &HomogeneousPoint) -> Result<Registered> {
        if p.dim() != self.dim() {
            return Err(Error::Argument("point and frame dimensions differ".into()));
        }
        let v = linalg::lu_solve(&self.u, p.coords())
            .ok_or_else(|| Error::DegenerateFrame("frame matrix is singular".into()))?;
        let y = v.component_div(&self.beta);
        if y.norm() <= tolerance::DEGENERATE * p.coords().norm() / self.beta.amax().max(1.0) {
            return Err(Error::Internal("registered coordinates vanished for a nonzero point".into()));
        }
        let z = AxialPoint::from_vector(y.clone())?;
        Ok(Registered { v, y, z })
    }
}

/// Axis of `x` with respect to the frame built from `frame_points`.
pub fn projective_coordinate(x: &[f64], frame: &ProjectiveFrame) -> Result<AxialPoint> {
    Ok(frame.coordinate(x)?.z)
}

/// Cross-ratio value. Infinity is tagged, never stored as a float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrossRatio {
    Finite(f64),
    /// The fourth point coincides with the first frame point. `sign` is the
    /// sign of the finite numerator over the frame spacing, ±1.
    Infinite { sign: f64 },
}

impl CrossRatio {
    pub fn finite(self) -> Option<f64> {
        match self {
            CrossRatio::Finite(c) => Some(c),
            CrossRatio::Infinite { .. } => None,
        }
    }
}

/// Cross-ratio `(x − x₂)(x₁ − x₃) / ((x₃ − x₂)(x₁ − x))` of four points on a line.
///
/// With `x₁, x₂, x₃` as frame this equals the first projective invariant of
/// `x`, i.e. `z¹/z²` of its axis.
pub fn cross_ratio(x1: f64, x2: f64, x3: f64, x: f64) -> Result<CrossRatio> {
    let scale = x1.abs().max(x2.abs()).max(x3.abs()).max(1.0);
    let tol = tolerance::DEGENERATE * scale;
    if (x1 - x2).abs() <= tol || (x1 - x3).abs() <= tol || (x2 - x3).abs() <= tol {
        return Err(Error::Argument("cross-ratio frame points coincide".into()));
    }
    let num = (x - x2) * (x1 - x3);
    let den = (x3 - x2) * (x1 - x);
    if (x1 - x).abs() <= tol {
        let sign = (num / (x3 - x2)).signum();
        return Ok(CrossRatio::Infinite { sign });
    }
    Ok(CrossRatio::Finite(num / den))
}

/// Chart value ψ_ijk for four collinear points: the cross-ratio of the point
/// outside `{i, j, k}` against the frame `(x_j, x_i, x_k)`.
///
/// With this ordering the transition identities between the four charts are
/// ψ₁₂₄ = 1/ψ₁₂₃, ψ₁₃₄ = 1 − ψ₁₂₄ and ψ₂₃₄ = ψ₁₃₄/(ψ₁₃₄ − 1). Indices are
/// zero-based.
pub fn chart_cross_ratio(x: [f64; 4], i: usize, j: usize, k: usize) -> Result<CrossRatio> {
    if i >= 4 || j >= 4 || k >= 4 || i == j || j == k || i == k {
        return Err(Error::Argument("chart indices must be three distinct values in 0..4".into()));
    }
    let l = (0..4).find(|&l| l != i && l != j && l != k).expect("one index remains");
    cross_ratio(x[j], x[i], x[k], x[l])
}

/// Axial angle φ ∈ [0, π) of a point of ℝP¹ and its doubled angle θ = 2φ.
pub fn axial_angle_and_double(z: &AxialPoint) -> Result<(f64, f64)> {
    if z.dim() != 1 {
        return Err(Error::Argument(format!("axial angle needs ℝP¹, got ℝP^{}", z.dim())));
    }
    let u = z.unit();
    let mut phi = u[1].atan2(u[0]).rem_euclid(PI);
    if phi >= PI {
        phi = 0.0;
    }
    Ok((phi, 2.0 * phi))
}

/// Projective invariants `ι_j = z^j / z^{m+1}`, j = 1..m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantVector {
    pub iota: Vec<f64>,
}

pub fn invariants_from_axial(z: &AxialPoint) -> Result<InvariantVector> {
    let u = z.unit();
    let last = u[u.len() - 1];
    if last.abs() <= tolerance::DEGENERATE {
        return Err(Error::PointAtInfinity);
    }
    Ok(InvariantVector { iota: u.iter().take(u.len() - 1).map(|x| x / last).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sheet_frame() -> ProjectiveFrame {
        ProjectiveFrame::from_affine(&[vec![69.0, 53.0], vec![591.0, 33.0], vec![626.0, 402.0], vec![69.0, 430.0]])
            .unwrap()
    }

    fn hp(v: &[f64]) -> HomogeneousPoint {
        HomogeneousPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn embedding() {
        assert_eq!(affine_embed(&[0.0, 0.0]).unwrap().coords().as_slice(), &[0.0, 0.0, 1.0]);
        assert_eq!(affine_embed(&[344.0, 322.0]).unwrap().coords().as_slice(), &[344.0, 322.0, 1.0]);
        assert_eq!(affine_embed(&[3.0]).unwrap().coords().as_slice(), &[3.0, 1.0]);
    }

    #[test]
    fn homogeneous_equality_is_projective() {
        assert!(hp(&[1.0, 2.0, 3.0]).same_point(&hp(&[-2.0, -4.0, -6.0])));
        assert!(!hp(&[1.0, 2.0, 3.0]).same_point(&hp(&[1.0, 2.0, 3.1])));
        assert!(HomogeneousPoint::new(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn general_position_cases() {
        let std = [hp(&[1., 0., 0.]), hp(&[0., 1., 0.]), hp(&[0., 0., 1.]), hp(&[1., 1., 1.])];
        assert!(general_position_check(&std).unwrap().ok);

        let bad = [hp(&[1., 0., 0.]), hp(&[0., 1., 0.]), hp(&[1., 1., 0.]), hp(&[0., 0., 1.])];
        let gp = general_position_check(&bad).unwrap();
        assert!(!gp.ok);
        assert_eq!(gp.failing_subset, Some(vec![0, 1, 2]));

        assert!(general_position_check(&std[..3]).is_err());
    }

    #[test]
    fn sheet_points_in_general_position() {
        // Hand-computed determinants of the four 3x3 minors of the embedded
        // points (unnormalized): all nonzero.
        let pts = [hp(&[69., 53., 1.]), hp(&[591., 33., 1.]), hp(&[626., 402., 1.]), hp(&[69., 430., 1.])];
        let minors = [(1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)];
        for (a, b, c) in minors {
            let m = DMatrix::from_columns(&[pts[a].coords().clone(), pts[b].coords().clone(), pts[c].coords().clone()]);
            assert!(m.determinant().abs() > 1e3);
        }
        assert!(general_position_check(&pts).unwrap().ok);
    }

    #[test]
    fn sheet_frame_coefficients() {
        let f = sheet_frame();
        let u = f.matrix();
        assert_eq!(u.row(0).iter().copied().collect::<Vec<_>>(), vec![69.0, 591.0, 626.0]);
        assert_eq!(u.row(1).iter().copied().collect::<Vec<_>>(), vec![53.0, 33.0, 402.0]);
        for (b, want) in f.beta().iter().zip([1.0683, -1.0862, 1.0180]) {
            assert_abs_diff_eq!(*b, want, epsilon = 1e-4);
        }
    }

    #[test]
    fn simplex_frame_coefficients() {
        // Solving [[0,1,0],[0,0,1],[1,1,1]] b = (1/3, 1/3, 1) by hand gives b = (1/3, 1/3, 1/3).
        let f = ProjectiveFrame::from_affine(&[vec![0., 0.], vec![1., 0.], vec![0., 1.], vec![1. / 3., 1. / 3.]]).unwrap();
        for b in f.beta().iter() {
            assert_abs_diff_eq!(*b, 1.0 / 3.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn collinear_frame_rejected() {
        let r = ProjectiveFrame::from_affine(&[vec![0., 0.], vec![1., 1.], vec![2., 2.], vec![0., 1.]]);
        assert!(matches!(r, Err(Error::DegenerateFrame(_))));
    }

    #[test]
    fn sheet_center_point() {
        let f = sheet_frame();
        // The centre must be (344, 222): it is the point whose frame
        // coordinates are (0.5057, 0.0095, 0.4848).
        let r = f.coordinate(&[344.0, 222.0]).unwrap();
        for (v, want) in r.v.iter().zip([0.5057, 0.0095, 0.4848]) {
            assert_abs_diff_eq!(*v, want, epsilon = 1e-4);
        }
        assert!(r.z.distance_mod_sign(&[0.7050, -0.0131, 0.7092]) < 5e-4);
        assert_eq!(format!("{:.3}", r.z), "[0.705 : -0.013 : 0.709]");

        let f = ProjectiveFrame::from_affine(&[vec![334., 69.], vec![732., 290.], vec![428., 504.], vec![43., 200.]]).unwrap();
        let z = projective_coordinate(&[373.0, 243.0], &f).unwrap();
        assert!(z.distance_mod_sign(&[0.7074, -0.0060, 0.7067]) < 5e-4);
    }

    #[test]
    fn frame_points_map_to_basis_and_diagonal() {
        let f = sheet_frame();
        let pts = [[69.0, 53.0], [591.0, 33.0], [626.0, 402.0]];
        for (i, p) in pts.iter().enumerate() {
            let r = f.coordinate(p).unwrap();
            let mut e = DVector::zeros(3);
            e[i] = 1.0;
            assert!((r.v.clone() - &e).amax() < 1e-9);
            assert!(r.z.distance_mod_sign(e.as_slice()) < 1e-9);
        }
        let r = f.coordinate(&[69.0, 430.0]).unwrap();
        assert!((r.y.clone() - DVector::from_element(3, 1.0)).amax() < 1e-9);
        let d = 1.0 / 3f64.sqrt();
        assert!(r.z.distance_mod_sign(&[d, d, d]) < 1e-9);
    }

    #[test]
    fn cross_ratio_values() {
        let c = cross_ratio(22.90, 35.7, 48.3, 61.10).unwrap().finite().unwrap();
        assert_abs_diff_eq!(c, 1.340, epsilon = 5e-4);
        let c = cross_ratio(0.0, 1.0, 2.0, 3.0).unwrap().finite().unwrap();
        assert_abs_diff_eq!(c, 4.0 / 3.0, epsilon = 1e-15);
        let c = cross_ratio(41.40, 44.3, 47.3, 50.70).unwrap().finite().unwrap();
        assert_abs_diff_eq!(c, 1.353, epsilon = 5e-4);
    }

    #[test]
    fn cross_ratio_edge_cases() {
        assert!(matches!(cross_ratio(1.0, 2.0, 3.0, 1.0).unwrap(), CrossRatio::Infinite { .. }));
        assert!(cross_ratio(1.0, 1.0, 3.0, 5.0).is_err());
    }

    #[test]
    fn chart_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        while checked < 500 {
            let x: [f64; 4] = std::array::from_fn(|_| rng.random_range(-10.0..10.0));
            let min_gap = (0..4)
                .flat_map(|a| (0..4).filter(move |&b| b != a).map(move |b| (a, b)))
                .map(|(a, b)| (x[a] - x[b]).abs())
                .fold(f64::INFINITY, f64::min);
            if min_gap < 0.05 {
                continue;
            }
            let psi = |i, j, k| chart_cross_ratio(x, i, j, k).unwrap().finite().unwrap();
            let (p123, p124, p134, p234) = (psi(0, 1, 2), psi(0, 1, 3), psi(0, 2, 3), psi(1, 2, 3));
            let tol = 1e-10 * (1.0 + p123.abs() + p124.abs() + p134.abs() + p234.abs());
            assert!((p124 - 1.0 / p123).abs() < tol);
            assert!((p134 - (1.0 - p124)).abs() < tol);
            assert!((p234 - p134 / (p134 - 1.0)).abs() < tol);
            checked += 1;
        }
    }

    #[test]
    fn cross_ratio_matches_registration_on_line() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..500 {
            let x: [f64; 4] = std::array::from_fn(|_| rng.random_range(-10.0..10.0));
            let f = match ProjectiveFrame::from_affine(&[vec![x[0]], vec![x[1]], vec![x[2]]]) {
                Ok(f) => f,
                Err(_) => continue,
            };
            if (x[3] - x[0]).abs() < 0.05 || (x[0] - x[1]).abs() < 0.05 || (x[1] - x[2]).abs() < 0.05 || (x[0] - x[2]).abs() < 0.05 {
                continue;
            }
            let z = projective_coordinate(&[x[3]], &f).unwrap();
            let iota = invariants_from_axial(&z).unwrap().iota[0];
            let c = cross_ratio(x[0], x[1], x[2], x[3]).unwrap().finite().unwrap();
            assert!((iota - c).abs() < 1e-9 * (1.0 + c.abs()), "{iota} vs {c}");
        }
    }

    #[test]
    fn axial_angles() {
        let z = AxialPoint::from_slice(&[1.0, 0.0]).unwrap();
        assert_eq!(axial_angle_and_double(&z).unwrap(), (0.0, 0.0));
        let s = -1.0 / 2f64.sqrt();
        let z = AxialPoint::from_slice(&[s, s]).unwrap();
        let (phi, theta) = axial_angle_and_double(&z).unwrap();
        assert_abs_diff_eq!(phi, PI / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(theta, PI / 2.0, epsilon = 1e-15);
        let z = AxialPoint::from_slice(&[-1.0, 0.0]).unwrap();
        assert_eq!(axial_angle_and_double(&z).unwrap().0, 0.0);
    }

    #[test]
    fn windows_view1_angles() {
        let f = ProjectiveFrame::from_affine(&[vec![22.90], vec![35.7], vec![48.3]]).unwrap();
        let z = projective_coordinate(&[61.10], &f).unwrap();
        let (phi, theta) = axial_angle_and_double(&z).unwrap();
        assert_abs_diff_eq!(phi, 0.641, epsilon = 5e-4);
        assert_abs_diff_eq!(theta, 1.282, epsilon = 5e-4);
    }

    #[test]
    fn invariants() {
        let z = AxialPoint::from_slice(&[0.8142, 0.5547, 0.1718]).unwrap();
        let iota = invariants_from_axial(&z).unwrap().iota;
        assert_abs_diff_eq!(iota[0], 4.739, epsilon = 5e-4);
        assert_abs_diff_eq!(iota[1], 3.229, epsilon = 5e-4);
        let z = AxialPoint::from_slice(&[0.7639, 0.6041, 0.2268]).unwrap();
        let iota = invariants_from_axial(&z).unwrap().iota;
        // inputs are rounded to 4 decimals, which moves the ratio by up to 1e-3
        assert_abs_diff_eq!(iota[0], 3.369, epsilon = 1e-3);
        assert_abs_diff_eq!(iota[1], 2.664, epsilon = 1e-3);
        let z = AxialPoint::from_slice(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(invariants_from_axial(&z).unwrap().iota, vec![0.0, 0.0]);
        let z = AxialPoint::from_slice(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(invariants_from_axial(&z), Err(Error::PointAtInfinity));
    }

    #[test]
    fn canonical_sign() {
        let z = AxialPoint::from_slice(&[0.6, 0.8, -0.0]).unwrap();
        assert!(z.canonical()[1] > 0.0);
        let z = AxialPoint::from_slice(&[-0.6, 0.0, -0.8]).unwrap();
        assert_eq!(z.canonical().as_slice(), &[0.6, -0.0, 0.8]);
    }
}
