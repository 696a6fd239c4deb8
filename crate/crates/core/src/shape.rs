//! Registration of landmark configurations into products of projective
//! spaces, and assembly of sign-aligned samples.

use std::borrow::Borrow;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::projective::{axial_angle_and_double, AxialPoint, ProjectiveFrame};
use crate::tolerance;

/// An ordered list of k landmarks in ℝᵐ.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    points: Vec<Vec<f64>>,
    m: usize,
}

impl Configuration {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let m = points.first().map(Vec::len).ok_or_else(|| Error::Argument("empty configuration".into()))?;
        if m == 0 {
            return Err(Error::Argument("landmarks must have at least one coordinate".into()));
        }
        if points.iter().any(|p| p.len() != m) {
            return Err(Error::Argument("landmarks have mixed dimensions".into()));
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Argument("landmark coordinates must be finite".into()));
        }
        Ok(Self { points, m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
}

/// Registered shape: q = k − m − 2 axes, one per non-frame landmark.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveShape {
    axes: Vec<AxialPoint>,
    m: usize,
    k: usize,
    frame_indices: Vec<usize>,
}

impl ProjectiveShape {
    /// Wraps axes that were registered elsewhere, with the default frame
    /// (first m+2 landmarks).
    pub fn from_axes(axes: Vec<AxialPoint>) -> Result<Self> {
        let m = axes.first().map(AxialPoint::dim).ok_or_else(|| Error::Argument("shape needs at least one axis".into()))?;
        if axes.iter().any(|a| a.dim() != m) {
            return Err(Error::Argument("axes have mixed dimensions".into()));
        }
        let k = axes.len() + m + 2;
        Ok(Self { axes, m, k, frame_indices: (0..m + 2).collect() })
    }

    pub fn axes(&self) -> &[AxialPoint] {
        &self.axes
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> usize {
        self.axes.len()
    }

    /// Zero-based landmark indices used as the frame.
    pub fn frame_indices(&self) -> &[usize] {
        &self.frame_indices
    }
}

/// Registers a configuration against the frame given by `frame_indices`
/// (zero-based, default the first m+2 landmarks).
///
/// The remaining landmarks keep their original relative order.
pub fn register(config: &Configuration, frame_indices: Option<&[usize]>) -> Result<ProjectiveShape> {
    let (m, k) = (config.m(), config.k());
    if k < m + 3 {
        return Err(Error::Argument(format!("registration in dimension {m} needs at least {} landmarks, got {k}", m + 3)));
    }
    let frame_indices: Vec<usize> = match frame_indices {
        Some(idx) => idx.to_vec(),
        None => (0..m + 2).collect(),
    };
    if frame_indices.len() != m + 2 {
        return Err(Error::Argument(format!("frame needs {} indices, got {}", m + 2, frame_indices.len())));
    }
    for (i, &a) in frame_indices.iter().enumerate() {
        if a >= k {
            return Err(Error::Argument(format!("frame index {a} out of range for {k} landmarks")));
        }
        if frame_indices[..i].contains(&a) {
            return Err(Error::Argument(format!("frame index {a} repeated")));
        }
    }
    let frame_points: Vec<Vec<f64>> = frame_indices.iter().map(|&i| config.points[i].clone()).collect();
    let frame = ProjectiveFrame::from_affine(&frame_points)?;
    let axes = (0..k)
        .filter(|i| !frame_indices.contains(i))
        .map(|i| frame.coordinate(&config.points[i]).map(|r| r.z))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProjectiveShape { axes, m, k, frame_indices })
}

/// Doubled axial angles θ_s ∈ [0, 2π) of a shape on the line.
pub fn torus_representation(shape: &ProjectiveShape) -> Result<Vec<f64>> {
    if shape.m() != 1 {
        return Err(Error::Argument(format!("torus representation needs m = 1, got m = {}", shape.m())));
    }
    shape.axes().iter().map(|z| axial_angle_and_double(z).map(|(_, theta)| theta)).collect()
}

/// n observations of q unit vectors in ℝ^{m+1}, each component sign-aligned
/// to a common reference.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalSample {
    rows: Vec<Vec<DVector<f64>>>,
    m: usize,
    q: usize,
}

impl DirectionalSample {
    /// Builds a sample from unit vectors as given (no sign alignment).
    pub fn new(rows: Vec<Vec<DVector<f64>>>) -> Result<Self> {
        let first = rows.first().ok_or_else(|| Error::InsufficientData("empty sample".into()))?;
        let q = first.len();
        let m = first.first().map(|v| v.len()).ok_or_else(|| Error::Argument("observation has no components".into()))?;
        if m < 2 {
            return Err(Error::Argument("unit vectors need at least 2 coordinates".into()));
        }
        for row in &rows {
            if row.len() != q || row.iter().any(|v| v.len() != m) {
                return Err(Error::Argument("observations have mixed dimensions".into()));
            }
            if row.iter().any(|v| (v.norm() - 1.0).abs() > tolerance::UNIT) {
                return Err(Error::Argument("observation components must be unit vectors".into()));
            }
        }
        Ok(Self { rows, m: m - 1, q })
    }

    /// Directions on the circle, `(cos θ, sin θ)` per component.
    pub fn from_angles(angles: &[Vec<f64>]) -> Result<Self> {
        let rows = angles
            .iter()
            .map(|row| row.iter().map(|t| DVector::from_vec(vec![t.cos(), t.sin()])).collect())
            .collect();
        Self::new(rows)
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Dimension mq of the tangent space.
    pub fn big_m(&self) -> usize {
        self.m * self.q
    }

    pub fn rows(&self) -> &[Vec<DVector<f64>>] {
        &self.rows
    }

    /// All observations of component `s`.
    pub fn component(&self, s: usize) -> Vec<&DVector<f64>> {
        self.rows.iter().map(|r| &r[s]).collect()
    }

    /// Sub-sample with the given row indices (repeats allowed).
    pub fn select(&self, idx: &[usize]) -> Self {
        Self { rows: idx.iter().map(|&i| self.rows[i].clone()).collect(), m: self.m, q: self.q }
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.m != other.m || self.q != other.q {
            return Err(Error::Argument("samples have different dimensions".into()));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Self { rows, m: self.m, q: self.q })
    }

    /// Reads the sample back as axial shapes.
    pub fn to_shapes(&self) -> Result<Vec<ProjectiveShape>> {
        self.rows
            .iter()
            .map(|r| ProjectiveShape::from_axes(r.iter().map(|v| AxialPoint::from_unit(v.clone())).collect::<Result<_>>()?))
            .collect()
    }
}

/// Moment matrix `(1/n) Σ x xᵀ` of component `s`.
pub(crate) fn moment_matrix<S: Borrow<ProjectiveShape>>(shapes: &[S], s: usize) -> DMatrix<f64> {
    let d = shapes[0].borrow().m() + 1;
    let mut j = DMatrix::<f64>::zeros(d, d);
    for sh in shapes {
        let x = sh.borrow().axes()[s].unit();
        j += x * x.transpose();
    }
    j / shapes.len() as f64
}

pub(crate) fn check_common_dims<S: Borrow<ProjectiveShape>>(shapes: &[S]) -> Result<(usize, usize)> {
    let first = shapes.first().ok_or_else(|| Error::InsufficientData("empty sample".into()))?.borrow();
    let (m, q) = (first.m(), first.q());
    if shapes.iter().any(|s| s.borrow().m() != m || s.borrow().q() != q) {
        return Err(Error::Argument("shapes have mixed dimensions".into()));
    }
    Ok((m, q))
}

/// Sign-aligns every component to the top eigenvector of its moment matrix.
///
/// The reference eigenvector itself gets the canonical sign (last nonzero
/// coordinate positive), so the result does not depend on input signs or order.
pub fn assemble_sample<S: Borrow<ProjectiveShape>>(shapes: &[S]) -> Result<DirectionalSample> {
    let (_, q) = check_common_dims(shapes)?;
    let first = shapes[0].borrow();
    if shapes.iter().any(|s| s.borrow().frame_indices() != first.frame_indices() || s.borrow().k() != first.k()) {
        return Err(Error::Argument("shapes were registered with different frames".into()));
    }
    let mut rows: Vec<Vec<DVector<f64>>> = vec![Vec::with_capacity(q); shapes.len()];
    for s in 0..q {
        let eig = linalg::jacobi_eigen(&moment_matrix(shapes, s))?;
        let reference = AxialPoint::from_vector(eig.top_vector())?.canonical();
        for (r, sh) in shapes.iter().enumerate() {
            let x = sh.borrow().axes()[s].unit();
            let dot = x.dot(&reference);
            if dot.abs() <= tolerance::ALIGNMENT_FLOOR {
                return Err(Error::NotConcentrated { component: s, dot: dot.abs() });
            }
            rows[r].push(if dot < 0.0 { -x } else { x.clone() });
        }
    }
    DirectionalSample::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn ax(v: &[f64]) -> AxialPoint {
        AxialPoint::from_slice(v).unwrap()
    }

    #[test]
    fn sheet_images() {
        let c1 = Configuration::new(vec![vec![69., 53.], vec![591., 33.], vec![626., 402.], vec![69., 430.], vec![344., 222.]]).unwrap();
        let s = register(&c1, None).unwrap();
        assert_eq!((s.q(), s.m(), s.k()), (1, 2, 5));
        assert!(s.axes()[0].distance_mod_sign(&[0.7050, -0.0131, 0.7092]) < 5e-4);
        let c2 = Configuration::new(vec![vec![334., 69.], vec![732., 290.], vec![428., 504.], vec![43., 200.], vec![373., 243.]]).unwrap();
        let s = register(&c2, None).unwrap();
        assert!(s.axes()[0].distance_mod_sign(&[0.7074, -0.0060, 0.7067]) < 5e-4);
    }

    #[test]
    fn windows_rows() {
        let rows = [
            ([23.10, 29.1, 35.5, 42.50], 0.642, 1.284),
            ([39.00, 47.0, 53.9, 60.00], 0.642, 1.285),
        ];
        for (x, phi, theta) in rows {
            let c = Configuration::new(x.iter().map(|&v| vec![v]).collect()).unwrap();
            let s = register(&c, None).unwrap();
            assert_abs_diff_eq!(axial_angle_and_double(&s.axes()[0]).unwrap().0, phi, epsilon = 5e-3);
            assert_abs_diff_eq!(torus_representation(&s).unwrap()[0], theta, epsilon = 5e-3);
        }
    }

    #[test]
    fn torus_cases() {
        let s = ProjectiveShape::from_axes(vec![ax(&[1.0, 0.0])]).unwrap();
        assert_eq!(torus_representation(&s).unwrap(), vec![0.0]);
        let s = ProjectiveShape::from_axes(vec![ax(&[1.0, 1.0]), ax(&[0.0, 1.0])]).unwrap();
        let t = torus_representation(&s).unwrap();
        assert_abs_diff_eq!(t[0], PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t[1], PI, epsilon = 1e-15);
        let s = ProjectiveShape::from_axes(vec![ax(&[1.0, 0.0, 0.0])]).unwrap();
        assert!(torus_representation(&s).is_err());
    }

    #[test]
    fn custom_frame_keeps_order() {
        let pts = vec![vec![0.0], vec![5.0], vec![1.0], vec![2.0], vec![7.0]];
        let c = Configuration::new(pts).unwrap();
        let s = register(&c, Some(&[2, 3, 4])).unwrap();
        assert_eq!(s.q(), 2);
        let f = ProjectiveFrame::from_affine(&[vec![1.0], vec![2.0], vec![7.0]]).unwrap();
        assert!(s.axes()[0].same_axis(&f.coordinate(&[0.0]).unwrap().z));
        assert!(s.axes()[1].same_axis(&f.coordinate(&[5.0]).unwrap().z));
        assert!(register(&c, Some(&[0, 0, 1])).is_err());
        assert!(register(&c, Some(&[0, 1])).is_err());
    }

    #[test]
    fn too_few_landmarks() {
        let c = Configuration::new(vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        assert!(matches!(register(&c, None), Err(Error::Argument(_))));
    }

    #[test]
    fn simplex_frame_is_direct_formula() {
        // With the standard simplex frame (0,0), (1,0), (0,1), (1/3,1/3) the
        // registered axis is the normalized barycentric vector.
        let x = [0.2, 0.5];
        let c = Configuration::new(vec![vec![0., 0.], vec![1., 0.], vec![0., 1.], vec![1. / 3., 1. / 3.], x.to_vec()]).unwrap();
        let s = register(&c, None).unwrap();
        let bary = [1.0 - x[0] - x[1], x[0], x[1]];
        assert!(s.axes()[0].same_axis(&ax(&bary)));
    }

    #[test]
    fn assemble_aligns_signs() {
        let a = ProjectiveShape::from_axes(vec![ax(&[0.6, 0.8])]).unwrap();
        let b = ProjectiveShape::from_axes(vec![ax(&[-0.6, -0.8])]).unwrap();
        let d = assemble_sample(&[a.clone(), b]).unwrap();
        assert_eq!(d.rows()[0][0], d.rows()[1][0]);
        assert!(d.rows()[0][0][1] > 0.0);

        let single = assemble_sample(&[ProjectiveShape::from_axes(vec![ax(&[0.6, -0.8])]).unwrap()]).unwrap();
        assert_eq!(single.rows()[0][0].as_slice(), &[-0.6, 0.8]);
    }

    #[test]
    fn assemble_is_idempotent() {
        let shapes: Vec<ProjectiveShape> = [[0.81, 0.55, -0.17], [-0.80, -0.56, -0.19], [0.78, 0.59, 0.22]]
            .iter()
            .map(|v| ProjectiveShape::from_axes(vec![ax(v)]).unwrap())
            .collect();
        let once = assemble_sample(&shapes).unwrap();
        let twice = assemble_sample(&once.to_shapes().unwrap()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn assemble_rejects_spread_data() {
        let shapes: Vec<ProjectiveShape> = [[1.0, 0.0], [0.0, 1.0], [1.0, 0.05]]
            .iter()
            .map(|v| ProjectiveShape::from_axes(vec![ax(v)]).unwrap())
            .collect();
        assert!(matches!(assemble_sample(&shapes), Err(Error::NotConcentrated { component: 0, .. })));
    }

    #[test]
    fn sample_from_angles() {
        let d = DirectionalSample::from_angles(&[vec![0.0], vec![PI / 2.0]]).unwrap();
        assert_eq!((d.n(), d.m(), d.q(), d.big_m()), (2, 1, 1, 1));
        assert_abs_diff_eq!(d.rows()[1][0][1], 1.0);
        assert_eq!(d.component(0).len(), 2);
    }
}
