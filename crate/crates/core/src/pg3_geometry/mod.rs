//! Incidence geometry of `PG(3, q)` relative to the GK curve.
//!
//! Homogeneous coordinates are `(X : Y : Z : W)`; the affine point
//! `(x, y, z)` is `(x : y : z : 1)` and the curve's point at infinity is
//! `(1 : 0 : 0 : 0)`. Lines parallel to the z-axis all pass through
//! `(0 : 0 : 1 : 0)`.

mod conics;
mod cubic;
mod secants;

pub use conics::{
    conic_census, conic_is_reducible, eval_conic, reducible_conic_witness, ConicReport,
    ConicWitness, ReducibleConicWitness,
};
pub use cubic::{cubic_configuration, first_generic_y, CubicConfiguration};
pub use secants::{secant_census, vertical_secant, FullSecant, SecantCensus, SecantChecks};

pub(crate) use conics::Combinations;

use crate::error::{Error, Result};
use crate::ff_tower::{Fe, FieldSpec};
use crate::gk_curve::{on_curve, secant_size, CurveCtx, CurvePoint};
use crate::linalg::{kernel_basis, rref, Matrix};

/// A point of `PG(3, q)` whose first nonzero coordinate is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint([Fe; 4]);

impl ProjPoint {
    pub fn new(field: &FieldSpec, coords: [Fe; 4]) -> Result<Self> {
        let lead = coords
            .iter()
            .find(|c| !c.is_zero())
            .ok_or(Error::DegenerateSpan)?;
        let inv = field.inv(*lead)?;
        Ok(ProjPoint(coords.map(|c| field.mul(c, inv))))
    }

    pub fn from_curve_point(field: &FieldSpec, p: &CurvePoint) -> Self {
        match p.coords() {
            Some([x, y, z]) => ProjPoint::new(field, [x, y, z, Fe::ONE]).expect("W = 1"),
            None => ProjPoint([Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ZERO]),
        }
    }

    pub fn coords(&self) -> [Fe; 4] {
        self.0
    }

    /// Affine coordinates when `W != 0`.
    pub fn affine(&self, field: &FieldSpec) -> Option<[Fe; 3]> {
        let w = self.0[3];
        if w.is_zero() {
            return None;
        }
        let inv = field.inv(w).expect("nonzero");
        Some([0, 1, 2].map(|i| field.mul(self.0[i], inv)))
    }

    pub fn record(&self, field: &FieldSpec) -> Vec<Vec<u32>> {
        self.0.iter().map(|&c| field.coeffs(c)).collect()
    }
}

/// The direction point shared by every line parallel to the z-axis.
pub fn z_direction() -> ProjPoint {
    ProjPoint([Fe::ZERO, Fe::ZERO, Fe::ONE, Fe::ZERO])
}

/// Whether a projective point lies on the closure of the GK curve.
pub fn proj_on_curve(ctx: &CurveCtx, p: &ProjPoint) -> bool {
    match p.affine(ctx.field()) {
        Some([x, y, z]) => on_curve(ctx.field(), ctx.ell(), x, y, z),
        None => p.0 == [Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ZERO],
    }
}

/// A line, stored as the reduced row-echelon basis of its 2-dimensional span.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line {
    rows: [[Fe; 4]; 2],
    pivots: [usize; 2],
}

impl Line {
    pub fn rows(&self) -> [[Fe; 4]; 2] {
        self.rows
    }

    pub fn contains(&self, field: &FieldSpec, p: &ProjPoint) -> bool {
        let [a, b] = [p.0[self.pivots[0]], p.0[self.pivots[1]]];
        (0..4).all(|i| {
            let v = field.add(field.mul(a, self.rows[0][i]), field.mul(b, self.rows[1][i]));
            v == p.0[i]
        })
    }

    /// All `q + 1` points of the line.
    pub fn points(&self, field: &FieldSpec) -> Vec<ProjPoint> {
        let mut out = vec![ProjPoint::new(field, self.rows[1]).expect("row is nonzero")];
        for t in field.elements() {
            let v = [0, 1, 2, 3].map(|i| field.add(self.rows[0][i], field.mul(t, self.rows[1][i])));
            out.push(ProjPoint::new(field, v).expect("independent rows"));
        }
        out
    }

    /// Common point of two distinct coplanar lines.
    pub fn meet(&self, field: &FieldSpec, other: &Line) -> Option<ProjPoint> {
        let cols: Vec<Vec<Fe>> = vec![
            self.rows[0].to_vec(),
            self.rows[1].to_vec(),
            other.rows[0].iter().map(|&c| field.neg(c)).collect(),
            other.rows[1].iter().map(|&c| field.neg(c)).collect(),
        ];
        let refs: Vec<&[Fe]> = cols.iter().map(Vec::as_slice).collect();
        let kernel = kernel_basis(field, &Matrix::from_columns(&refs));
        if kernel.len() != 1 {
            return None;
        }
        let k = &kernel[0];
        let v = [0, 1, 2, 3].map(|i| field.add(field.mul(k[0], self.rows[0][i]), field.mul(k[1], self.rows[1][i])));
        ProjPoint::new(field, v).ok()
    }

    pub fn record(&self, field: &FieldSpec) -> Vec<Vec<Vec<u32>>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&c| field.coeffs(c)).collect())
            .collect()
    }
}

pub fn line_through(field: &FieldSpec, p: &ProjPoint, q: &ProjPoint) -> Result<Line> {
    let mut m = Matrix::from_rows(&[p.0.to_vec(), q.0.to_vec()]);
    let pivots = rref(field, &mut m);
    if pivots.len() != 2 {
        return Err(Error::DegenerateSpan);
    }
    let row = |i: usize| -> [Fe; 4] { [m[(i, 0)], m[(i, 1)], m[(i, 2)], m[(i, 3)]] };
    Ok(Line {
        rows: [row(0), row(1)],
        pivots: [pivots[0], pivots[1]],
    })
}

/// The plane `a X + b Y + c Z + d W = 0` with first nonzero coefficient 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Plane([Fe; 4]);

impl Plane {
    pub fn new(field: &FieldSpec, coeffs: [Fe; 4]) -> Result<Self> {
        Ok(Plane(ProjPoint::new(field, coeffs)?.0))
    }

    pub fn coeffs(&self) -> [Fe; 4] {
        self.0
    }

    pub fn contains(&self, field: &FieldSpec, p: &ProjPoint) -> bool {
        dot(field, &self.0, &p.0).is_zero()
    }

    pub fn contains_line(&self, field: &FieldSpec, l: &Line) -> bool {
        l.rows.iter().all(|r| dot(field, &self.0, r).is_zero())
    }

    /// Index of the coordinate that is eliminated when passing to plane
    /// coordinates.
    pub fn eliminated_coordinate(&self) -> usize {
        self.0.iter().position(|c| !c.is_zero()).expect("nonzero plane")
    }

    /// The three homogeneous plane coordinates of a point on the plane.
    pub fn plane_coords(&self, p: &ProjPoint) -> [Fe; 3] {
        let c = self.eliminated_coordinate();
        let mut out = [Fe::ZERO; 3];
        let mut k = 0;
        for i in 0..4 {
            if i != c {
                out[k] = p.0[i];
                k += 1;
            }
        }
        out
    }

    pub fn record(&self, field: &FieldSpec) -> Vec<Vec<u32>> {
        self.0.iter().map(|&c| field.coeffs(c)).collect()
    }
}

fn dot(field: &FieldSpec, a: &[Fe; 4], b: &[Fe; 4]) -> Fe {
    field.sum((0..4).map(|i| field.mul(a[i], b[i])))
}

fn det3(field: &FieldSpec, m: [[Fe; 3]; 3]) -> Fe {
    let t = |a: Fe, b: Fe, c: Fe, d: Fe| field.sub(field.mul(a, b), field.mul(c, d));
    let a = field.mul(m[0][0], t(m[1][1], m[2][2], m[1][2], m[2][1]));
    let b = field.mul(m[0][1], t(m[1][0], m[2][2], m[1][2], m[2][0]));
    let c = field.mul(m[0][2], t(m[1][0], m[2][1], m[1][1], m[2][0]));
    field.add(field.sub(a, b), c)
}

/// Unnormalised normal vector of the span of three points (all-zero when
/// they are collinear).
pub(crate) fn plane_normal(field: &FieldSpec, p: &[Fe; 4], q: &[Fe; 4], r: &[Fe; 4]) -> [Fe; 4] {
    let mut n = [Fe::ZERO; 4];
    for (i, slot) in n.iter_mut().enumerate() {
        let cols: Vec<usize> = (0..4).filter(|&c| c != i).collect();
        let minor = [p, q, r].map(|v| [v[cols[0]], v[cols[1]], v[cols[2]]]);
        let d = det3(field, minor);
        *slot = if i % 2 == 0 { d } else { field.neg(d) };
    }
    n
}

pub fn plane_through(field: &FieldSpec, p: &ProjPoint, q: &ProjPoint, r: &ProjPoint) -> Result<Plane> {
    let n = plane_normal(field, &p.0, &q.0, &r.0);
    Plane::new(field, n)
}

/// Plane containing two distinct coplanar lines.
pub fn plane_of_lines(field: &FieldSpec, a: &Line, b: &Line) -> Result<Plane> {
    let pa = ProjPoint::new(field, a.rows[0])?;
    let qa = ProjPoint::new(field, a.rows[1])?;
    let third = b
        .points(field)
        .into_iter()
        .find(|p| !a.contains(field, p))
        .ok_or(Error::DegenerateSpan)?;
    let plane = plane_through(field, &pa, &qa, &third)?;
    if !plane.contains_line(field, b) {
        return Err(Error::DegenerateSpan);
    }
    Ok(plane)
}

/// Upper bound on `|X ∩ GK|` for a plane curve `X` of degree `alpha <= l`.
pub fn intersection_bound(alpha: u64, reducible: bool, ell: u64) -> Result<u64> {
    if alpha == 0 || alpha > ell {
        return Err(Error::DegreeOutOfRange { alpha, ell });
    }
    if alpha == 1 || reducible {
        Ok(alpha * secant_size(ell))
    } else {
        Ok(alpha * (ell + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff_tower::make_field;
    use proptest::prelude::*;

    fn pt(field: &FieldSpec, v: [u32; 4]) -> ProjPoint {
        ProjPoint::new(field, v.map(|x| field.from_packed(x).unwrap())).unwrap()
    }

    #[test]
    fn line_and_plane_incidence() {
        let f = make_field(2, 6, None).unwrap();
        let p = pt(&f, [0, 0, 0, 1]);
        let q = pt(&f, [1, 0, 0, 1]);
        let l = line_through(&f, &p, &q).unwrap();
        assert!(l.contains(&f, &p) && l.contains(&f, &q));
        let pts = l.points(&f);
        assert_eq!(pts.len(), 65);
        let mut dedup = pts.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 65);
        assert!(pts.iter().all(|x| l.contains(&f, x)));
        assert_eq!(line_through(&f, &p, &p), Err(Error::DegenerateSpan));

        let r = pts[7];
        assert_eq!(plane_through(&f, &p, &q, &r), Err(Error::DegenerateSpan));
        let s = pt(&f, [0, 1, 0, 1]);
        let plane = plane_through(&f, &p, &q, &s).unwrap();
        assert!(plane.contains(&f, &p) && plane.contains(&f, &q) && plane.contains(&f, &s));
        assert!(plane.contains_line(&f, &l));
    }

    #[test]
    fn vertical_lines_meet_at_the_z_direction() {
        let f = make_field(3, 6, None).unwrap();
        let a = line_through(&f, &pt(&f, [5, 7, 0, 1]), &pt(&f, [5, 7, 1, 1])).unwrap();
        let b = line_through(&f, &pt(&f, [9, 7, 3, 1]), &pt(&f, [9, 7, 4, 1])).unwrap();
        assert_eq!(a.meet(&f, &b), Some(z_direction()));
        let plane = plane_of_lines(&f, &a, &b).unwrap();
        assert!(plane.contains_line(&f, &a) && plane.contains_line(&f, &b));
    }

    #[test]
    fn bounds() {
        assert_eq!(intersection_bound(1, false, 3).unwrap(), 7);
        assert_eq!(intersection_bound(1, true, 3).unwrap(), 7);
        assert_eq!(intersection_bound(2, true, 3).unwrap(), 14);
        assert_eq!(intersection_bound(2, false, 2).unwrap(), 6);
        assert_eq!(intersection_bound(3, false, 3).unwrap(), 12);
        assert_eq!(
            intersection_bound(3, true, 2),
            Err(Error::DegreeOutOfRange { alpha: 3, ell: 2 })
        );
    }

    proptest! {
        #[test]
        fn line_canonical_form_is_independent_of_spanning_pair(
            a in prop::array::uniform4(0u32..64),
            b in prop::array::uniform4(0u32..64),
            s in 0u32..64, t in 1u32..64, u in 0u32..64,
        ) {
            let f = make_field(2, 6, None).unwrap();
            let (Ok(p), Ok(q)) = (
                ProjPoint::new(&f, a.map(|x| f.from_packed(x).unwrap())),
                ProjPoint::new(&f, b.map(|x| f.from_packed(x).unwrap())),
            ) else { return Ok(()); };
            prop_assume!(p != q);
            let l = line_through(&f, &p, &q).unwrap();
            prop_assert_eq!(l, line_through(&f, &q, &p).unwrap());
            // two other points of the same line
            let (s, t, u) = (f.from_packed(s).unwrap(), f.from_packed(t).unwrap(), f.from_packed(u).unwrap());
            let comb = |x: Fe, y: Fe| [0, 1, 2, 3].map(|i| f.add(f.mul(x, p.coords()[i]), f.mul(y, q.coords()[i])));
            let p2 = ProjPoint::new(&f, comb(Fe::ONE, s));
            let q2 = ProjPoint::new(&f, comb(t, u));
            if let (Ok(p2), Ok(q2)) = (p2, q2) {
                if p2 != q2 {
                    prop_assert_eq!(l, line_through(&f, &p2, &q2).unwrap());
                }
            }
        }
    }
}
