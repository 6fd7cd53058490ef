//! The GK curve over `F_{l^6}`:
//!
//! ```text
//! Z^(l^2 - l + 1) = Y^(l^2) - Y,    Y^(l + 1) = X^l + X
//! ```
//!
//! Point enumeration, orbit split, genus/maximality bookkeeping and the zero
//! sets of the coordinate functions.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff_tower::{is_prime, make_field, Fe, FieldSpec};

/// Writes `ell = p^h`; fails unless `ell` is a prime power `>= 2`.
pub fn prime_power(ell: u64) -> Result<(u32, u32)> {
    if ell < 2 {
        return Err(Error::InvalidEll(ell));
    }
    let p = (2..=ell).find(|d| ell.is_multiple_of(*d)).expect("ell >= 2");
    if !is_prime(p) {
        return Err(Error::InvalidEll(ell));
    }
    let (mut rest, mut h) = (ell, 0u32);
    while rest % p == 0 {
        rest /= p;
        h += 1;
    }
    if rest != 1 {
        return Err(Error::InvalidEll(ell));
    }
    Ok((p as u32, h))
}

pub fn genus(ell: u64) -> u64 {
    (ell.pow(3) + 1) * (ell * ell - 2) / 2 + 1
}

/// `l^8 - l^6 + l^5 + 1`, including the point at infinity.
pub fn expected_point_count(ell: u64) -> u64 {
    ell.pow(8) - ell.pow(6) + ell.pow(5) + 1
}

/// Number of curve points on a full secant, `l^2 - l + 1`.
pub fn secant_size(ell: u64) -> u64 {
    ell * ell - ell + 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Orbit {
    O1,
    O2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointKind {
    Affine { x: Fe, y: Fe, z: Fe },
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CurvePoint {
    pub kind: PointKind,
    pub orbit: Orbit,
}

impl CurvePoint {
    pub fn affine(x: Fe, y: Fe, z: Fe) -> Self {
        let kind = PointKind::Affine { x, y, z };
        CurvePoint {
            kind,
            orbit: classify_kind(&kind),
        }
    }

    pub fn infinity() -> Self {
        CurvePoint {
            kind: PointKind::Infinity,
            orbit: Orbit::O1,
        }
    }

    pub fn coords(&self) -> Option<[Fe; 3]> {
        match self.kind {
            PointKind::Affine { x, y, z } => Some([x, y, z]),
            PointKind::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.kind == PointKind::Infinity
    }

    pub fn record(&self, field: &FieldSpec) -> PointRecord {
        PointRecord {
            coords: self.coords().map(|c| c.map(|a| field.coeffs(a))),
            orbit: self.orbit,
        }
    }
}

/// Serialized point: `coords` is `null` for the point at infinity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointRecord {
    pub coords: Option<[Vec<u32>; 3]>,
    pub orbit: Orbit,
}

fn classify_kind(kind: &PointKind) -> Orbit {
    match kind {
        PointKind::Infinity => Orbit::O1,
        PointKind::Affine { z, .. } if z.is_zero() => Orbit::O1,
        PointKind::Affine { .. } => Orbit::O2,
    }
}

/// O1 for the point at infinity and the affine points on the plane `Z = 0`.
pub fn classify_orbit(point: &CurvePoint) -> Orbit {
    classify_kind(&point.kind)
}

/// Exponents appearing in the curve equations for a given `l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GkExponents {
    pub ell: u64,
    pub ell_sq: u64,
    pub norm: u64,
    pub secant: u64,
}

impl GkExponents {
    pub fn new(ell: u64) -> Self {
        GkExponents {
            ell,
            ell_sq: ell * ell,
            norm: ell + 1,
            secant: secant_size(ell),
        }
    }
}

/// `x^l + x`.
pub fn trace_like(field: &FieldSpec, ell: u64, x: Fe) -> Fe {
    field.add(field.pow(x, ell), x)
}

/// `y^(l^2) - y`.
pub fn z_target(field: &FieldSpec, ell: u64, y: Fe) -> Fe {
    field.sub(field.pow(y, ell * ell), y)
}

pub fn on_curve(field: &FieldSpec, ell: u64, x: Fe, y: Fe, z: Fe) -> bool {
    let e = GkExponents::new(ell);
    field.pow(z, e.secant) == z_target(field, ell, y)
        && field.pow(y, e.norm) == trace_like(field, ell, x)
}

/// For each `c`, all `v` with `v^e = c`, in canonical order.
fn power_preimages(field: &FieldSpec, e: u64) -> Vec<Vec<Fe>> {
    let mut out = vec![Vec::new(); field.order() as usize];
    for v in field.elements() {
        out[field.pow(v, e).packed() as usize].push(v);
    }
    out
}

/// All `F_{l^6}`-rational points: affine points in lexicographic `(x, y, z)`
/// order followed by the point at infinity.
pub fn enumerate_points(field: &FieldSpec, ell: u64) -> Vec<CurvePoint> {
    let e = GkExponents::new(ell);
    let y_roots = power_preimages(field, e.norm);
    let z_roots = power_preimages(field, e.secant);
    let xs: Vec<Fe> = field.elements().collect();
    let mut points: Vec<CurvePoint> = xs
        .par_iter()
        .flat_map_iter(|&x| {
            let c = trace_like(field, ell, x);
            let mut local = Vec::new();
            for &y in &y_roots[c.packed() as usize] {
                for &z in &z_roots[z_target(field, ell, y).packed() as usize] {
                    local.push(CurvePoint::affine(x, y, z));
                }
            }
            local
        })
        .collect();
    points.push(CurvePoint::infinity());
    points
}

/// Curve data for a fixed `l`: the field `F_{l^6}` and its rational points.
#[derive(Clone, Debug)]
pub struct CurveCtx {
    ell: u64,
    field: Arc<FieldSpec>,
    points: Vec<CurvePoint>,
}

impl CurveCtx {
    /// Uses the built-in modulus for `F_{l^6}`.
    pub fn new(ell: u64) -> Result<Self> {
        Self::with_modulus(ell, None)
    }

    pub fn with_modulus(ell: u64, modulus: Option<&[u32]>) -> Result<Self> {
        let (p, h) = prime_power(ell)?;
        let field = make_field(p, 6 * h, modulus)?;
        Ok(Self::with_field(ell, Arc::new(field)))
    }

    /// `field` must be `F_{l^6}`.
    pub fn with_field(ell: u64, field: Arc<FieldSpec>) -> Self {
        let points = enumerate_points(&field, ell);
        CurveCtx { ell, field, points }
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn field_arc(&self) -> Arc<FieldSpec> {
        Arc::clone(&self.field)
    }

    /// All rational points; the last one is the point at infinity.
    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    /// Affine points only. Their indices are the code coordinates.
    pub fn affine_points(&self) -> &[CurvePoint] {
        &self.points[..self.points.len() - 1]
    }

    pub fn infinity_index(&self) -> usize {
        self.points.len() - 1
    }

    pub fn exponents(&self) -> GkExponents {
        GkExponents::new(self.ell)
    }

    pub fn census(&self) -> CurveCensus {
        let n_o1 = self.points.iter().filter(|p| p.orbit == Orbit::O1).count() as u64;
        let n_points = self.points.len() as u64;
        let g = genus(self.ell);
        CurveCensus {
            ell: self.ell,
            genus: g,
            n_points,
            n_o1,
            n_o2: n_points - n_o1,
            maximality: n_points == self.ell.pow(6) + 1 + 2 * g * self.ell.pow(3),
        }
    }

    /// Zero set of a coordinate function together with the multiplicities
    /// and pole order the divisor formulas assign to it.
    pub fn divisor_zero_support(&self, function: CoordinateFunction) -> DivisorZeros {
        let f = self.field();
        let ell = self.ell;
        let axis = function as usize;
        let support: Vec<usize> = self
            .affine_points()
            .iter()
            .enumerate()
            .filter(|(_, p)| p.coords().expect("affine")[axis].is_zero())
            .map(|(i, _)| i)
            .collect();

        // Independent characterisations of the expected zero sets.
        let expected: Vec<[Fe; 3]> = match function {
            CoordinateFunction::X => vec![[Fe::ZERO; 3]],
            CoordinateFunction::Y => f
                .elements()
                .filter(|&a| trace_like(f, ell, a).is_zero())
                .map(|a| [a, Fe::ZERO, Fe::ZERO])
                .collect(),
            CoordinateFunction::Z => self
                .affine_points()
                .iter()
                .filter_map(|p| {
                    let [x, y, z] = p.coords()?;
                    (f.in_subfield(x, 2 * self.h()).ok()? && f.in_subfield(y, 2 * self.h()).ok()?)
                        .then_some([x, y, z])
                })
                .collect(),
        };
        let found: Vec<[Fe; 3]> = support
            .iter()
            .map(|&i| self.points[i].coords().expect("affine"))
            .collect();

        let multiplicity = match function {
            CoordinateFunction::X => ell.pow(3) + 1,
            CoordinateFunction::Y => secant_size(ell),
            CoordinateFunction::Z => 1,
        };
        let declared_pole_order = match function {
            CoordinateFunction::X => ell.pow(3) + 1,
            CoordinateFunction::Y => ell.pow(3) - ell * ell + ell,
            CoordinateFunction::Z => ell,
        };
        let total_degree = multiplicity * support.len() as u64;
        DivisorZeros {
            function,
            zeros: support
                .iter()
                .map(|&i| ZeroEntry {
                    index: i,
                    point: self.points[i].record(f),
                    multiplicity,
                })
                .collect(),
            total_degree,
            support_matches_expected: found == expected,
            declared_pole_order,
            pole_order_from_balance: total_degree,
            balanced: total_degree == declared_pole_order,
        }
    }

    fn h(&self) -> u32 {
        self.field.ext_degree() / 6
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveCensus {
    pub ell: u64,
    pub genus: u64,
    pub n_points: u64,
    #[serde(rename = "n_O1")]
    pub n_o1: u64,
    #[serde(rename = "n_O2")]
    pub n_o2: u64,
    pub maximality: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordinateFunction {
    X = 0,
    Y = 1,
    Z = 2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZeroEntry {
    pub index: usize,
    pub point: PointRecord,
    pub multiplicity: u64,
}

/// Affine zeros of a coordinate function.
///
/// `declared_pole_order` is the pole order at infinity as written in the
/// divisor formulas; `pole_order_from_balance` is what a degree-zero divisor
/// forces given the verified zeros. `balanced` is false where they disagree
/// (the `z` function: `l` is declared, `l^3` is forced).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorZeros {
    pub function: CoordinateFunction,
    pub zeros: Vec<ZeroEntry>,
    pub total_degree: u64,
    pub support_matches_expected: bool,
    pub declared_pole_order: u64,
    pub pole_order_from_balance: u64,
    pub balanced: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_and_counts() {
        assert_eq!(genus(2), 10);
        assert_eq!(genus(3), 99);
        assert_eq!(expected_point_count(2), 225);
        assert_eq!(expected_point_count(3), 6076);
        assert_eq!(225, 64 + 1 + 2 * 10 * 8);
        assert_eq!(prime_power(9).unwrap(), (3, 2));
        assert_eq!(prime_power(8).unwrap(), (2, 3));
        assert!(prime_power(6).is_err());
        assert!(prime_power(1).is_err());
    }

    #[test]
    fn on_curve_examples() {
        let ctx = CurveCtx::new(2).unwrap();
        let f = ctx.field();
        assert!(on_curve(f, 2, Fe::ZERO, Fe::ZERO, Fe::ZERO));
        assert!(on_curve(f, 2, Fe::ONE, Fe::ZERO, Fe::ZERO));
        let brute = f
            .elements()
            .flat_map(|x| f.elements().map(move |y| (x, y)))
            .map(|(x, y)| f.elements().filter(|&z| on_curve(f, 2, x, y, z)).count())
            .sum::<usize>();
        assert_eq!(brute, 224);
    }

    #[test]
    fn enumeration_is_sorted_and_complete() {
        for ell in [2u64, 3] {
            let ctx = CurveCtx::new(ell).unwrap();
            let pts = ctx.points();
            assert_eq!(pts.len() as u64, expected_point_count(ell));
            assert!(pts.last().unwrap().is_infinity());
            let affine: Vec<[Fe; 3]> = ctx.affine_points().iter().map(|p| p.coords().unwrap()).collect();
            assert!(affine.windows(2).all(|w| w[0] < w[1]));
            assert!(affine.iter().all(|&[x, y, z]| on_curve(ctx.field(), ell, x, y, z)));
            assert_eq!(affine[0], [Fe::ZERO; 3]);
        }
    }

    #[test]
    fn orbit_sizes() {
        let c2 = CurveCtx::new(2).unwrap().census();
        assert_eq!((c2.n_points, c2.n_o1, c2.n_o2, c2.genus), (225, 9, 216, 10));
        assert!(c2.maximality);
        let c3 = CurveCtx::new(3).unwrap().census();
        assert_eq!((c3.n_points, c3.n_o1, c3.n_o2, c3.genus), (6076, 28, 6048, 99));
        assert!(c3.maximality);
    }

    #[test]
    fn o1_is_the_f_l2_rational_part() {
        for ell in [2u64, 3] {
            let ctx = CurveCtx::new(ell).unwrap();
            let f = ctx.field();
            for p in ctx.affine_points() {
                let [x, y, z] = p.coords().unwrap();
                let rational = f.in_subfield(x, 2).unwrap()
                    && f.in_subfield(y, 2).unwrap()
                    && f.in_subfield(z, 2).unwrap();
                assert_eq!(z.is_zero(), rational);
                assert_eq!(classify_orbit(p) == Orbit::O1, rational);
            }
        }
    }

    #[test]
    fn fibre_sizes() {
        for ell in [2u64, 3] {
            let ctx = CurveCtx::new(ell).unwrap();
            let f = ctx.field();
            let s = secant_size(ell);
            let mut by_trace = vec![0usize; f.order() as usize];
            for x in f.elements() {
                by_trace[trace_like(f, ell, x).packed() as usize] += 1;
            }
            let z_pre = power_preimages(f, s);
            for y in f.elements() {
                let nx = by_trace[f.pow(y, ell + 1).packed() as usize];
                assert!(nx == 0 || nx as u64 == ell);
                let nz = z_pre[z_target(f, ell, y).packed() as usize].len() as u64;
                let in_small = f.in_subfield(y, 2).unwrap();
                assert!(nz == 0 || nz == 1 || nz == s);
                assert_eq!(nz == 1, in_small);
            }
        }
    }

    #[test]
    fn coordinate_zero_sets() {
        let ctx = CurveCtx::new(2).unwrap();
        let x = ctx.divisor_zero_support(CoordinateFunction::X);
        assert_eq!(x.zeros.len(), 1);
        assert_eq!(x.zeros[0].index, 0);
        assert_eq!(x.total_degree, 9);
        assert!(x.support_matches_expected && x.balanced);

        let y = ctx.divisor_zero_support(CoordinateFunction::Y);
        let idx: Vec<[Fe; 3]> = y.zeros.iter().map(|z| ctx.points()[z.index].coords().unwrap()).collect();
        assert_eq!(idx, vec![[Fe::ZERO; 3], [Fe::ONE, Fe::ZERO, Fe::ZERO]]);
        assert_eq!(y.total_degree, 6);
        assert!(y.support_matches_expected && y.balanced);

        let z = ctx.divisor_zero_support(CoordinateFunction::Z);
        assert_eq!(z.zeros.len(), 8);
        assert_eq!(z.total_degree, 8);
        assert!(z.support_matches_expected);
        assert_eq!(z.declared_pole_order, 2);
        assert!(!z.balanced);
    }
}
