//! Plane conics through curve points.
//!
//! Planes are enumerated through pairs of curve points: for a pair `(i, j)`
//! every other point either lies on the joining line or determines a plane
//! through it. A plane is processed once, by the pair of its two smallest
//! point indices. Inside a plane, every 5-subset of curve points determines
//! the conics through it (a 6-coefficient linear system); each solution is
//! evaluated on all curve points of the plane.

use rayon::prelude::*;
use serde::Serialize;

use super::{
    line_through, plane_normal, plane_of_lines, proj_on_curve, Line, Plane, ProjPoint,
};
use crate::error::{Error, Result};
use crate::ff_tower::{Fe, FieldSpec};
use crate::gk_curve::{secant_size, CurveCtx};
use crate::linalg::{kernel_basis, Matrix};

/// Conic coefficients `[a, b, c, f, g, h]` of
/// `a u^2 + b v^2 + c w^2 + f v w + g u w + h u v` in plane coordinates.
pub type ConicCoeffs = [Fe; 6];

pub fn eval_conic(field: &FieldSpec, q: &ConicCoeffs, [u, v, w]: [Fe; 3]) -> Fe {
    field.sum(
        monomials(field, [u, v, w])
            .iter()
            .zip(q)
            .map(|(&m, &c)| field.mul(m, c)),
    )
}

fn monomials(field: &FieldSpec, [u, v, w]: [Fe; 3]) -> [Fe; 6] {
    [
        field.mul(u, u),
        field.mul(v, v),
        field.mul(w, w),
        field.mul(v, w),
        field.mul(u, w),
        field.mul(u, v),
    ]
}

/// Whether the conic splits into two lines over the algebraic closure,
/// i.e. whether it is singular.
///
/// Odd characteristic: the symmetric matrix is singular. Characteristic 2:
/// the partial derivatives vanish together exactly at the nucleus
/// `(f, g, h)`, so the conic is singular iff it passes through it (or the
/// form is a square when `f = g = h = 0`).
pub fn conic_is_reducible(field: &FieldSpec, q: &ConicCoeffs) -> bool {
    let [a, b, c, f, g, h] = *q;
    if field.characteristic() == 2 {
        if f.is_zero() && g.is_zero() && h.is_zero() {
            return true;
        }
        return eval_conic(field, q, [f, g, h]).is_zero();
    }
    let two = field.from_int(2);
    let m = [
        [field.mul(two, a), h, g],
        [h, field.mul(two, b), f],
        [g, f, field.mul(two, c)],
    ];
    super::det3(field, m).is_zero()
}

#[derive(Clone, Debug, Serialize)]
pub struct ConicWitness {
    pub plane: Vec<Vec<u32>>,
    pub coefficients: Vec<Vec<u32>>,
    pub reducible: bool,
    /// Indices of the curve points on the conic.
    pub points: Vec<usize>,
}

/// Two coplanar full secants: a reducible conic through
/// `2(l^2 - l + 1)` curve points.
#[derive(Clone, Debug, Serialize)]
pub struct ReducibleConicWitness {
    pub lines: Vec<Vec<Vec<Vec<u32>>>>,
    pub plane: Vec<Vec<u32>>,
    pub curve_points: Vec<usize>,
    pub n_points: u64,
    pub expected: u64,
    pub common_point: Vec<Vec<u32>>,
    pub common_point_on_curve: bool,
    pub conic_is_reducible: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConicReport {
    pub ell: u64,
    pub exhaustive: bool,
    pub budget: Option<u64>,
    pub work_done: u64,
    pub pairs_processed: u64,
    pub planes_examined: u64,
    pub max_plane_points: u64,
    pub max_conic_points: u64,
    pub max_reducible_conic_points: u64,
    pub max_irreducible_conic_points: u64,
    pub bound_reducible: u64,
    pub bound_irreducible: u64,
    /// No conic exceeds `max(2(l^2 - l + 1), 2(l + 1))`, and no absolutely
    /// irreducible conic exceeds `2(l + 1)`.
    pub bound_holds: bool,
    pub witness: Option<ConicWitness>,
    pub reducible_construction: ReducibleConicWitness,
}

#[derive(Default)]
struct PlaneStats {
    planes: u64,
    work: u64,
    max_plane: u64,
    max_any: u64,
    max_red: u64,
    max_irred: u64,
    witness: Option<(u64, Plane, ConicCoeffs, bool, Vec<usize>)>,
}

impl PlaneStats {
    fn merge(mut self, other: PlaneStats) -> PlaneStats {
        self.planes += other.planes;
        self.work += other.work;
        self.max_plane = self.max_plane.max(other.max_plane);
        self.max_any = self.max_any.max(other.max_any);
        self.max_red = self.max_red.max(other.max_red);
        self.max_irred = self.max_irred.max(other.max_irred);
        // keep the earliest witness among equals
        self.witness = match (self.witness.take(), other.witness) {
            (Some(a), Some(b)) => Some(if b.0 > a.0 { b } else { a }),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Planes with fewer points than this cannot carry a conic beyond the
/// trivial five-point one.
const MIN_PLANE_POINTS: usize = 6;

/// Largest number of curve points on a plane conic.
///
/// With `budget = None` the search is exhaustive. Otherwise it stops after
/// roughly `budget` units of work (plane normals plus conic solves) and the
/// report is flagged non-exhaustive.
pub fn conic_census(ctx: &CurveCtx, budget: Option<u64>) -> Result<ConicReport> {
    let field = ctx.field();
    let ell = ctx.ell();
    let proj: Vec<ProjPoint> = ctx
        .points()
        .iter()
        .map(|p| ProjPoint::from_curve_point(field, p))
        .collect();
    let n = proj.len();

    let mut total = PlaneStats::default();
    let mut pairs = 0u64;
    let mut exhaustive = true;
    'outer: for i in 0..n {
        let stats = (i + 1..n)
            .into_par_iter()
            .map(|j| planes_through_pair(field, &proj, i, j))
            .reduce(PlaneStats::default, PlaneStats::merge);
        total = total.merge(stats);
        pairs += (n - i - 1) as u64;
        if let Some(b) = budget {
            if total.work > b && i + 1 < n {
                exhaustive = false;
                break 'outer;
            }
        }
    }

    let bound_red = 2 * secant_size(ell);
    let bound_irred = 2 * (ell + 1);
    let witness = total.witness.map(|(_, plane, q, reducible, points)| ConicWitness {
        plane: plane.record(field),
        coefficients: q.iter().map(|&c| field.coeffs(c)).collect(),
        reducible,
        points,
    });
    Ok(ConicReport {
        ell,
        exhaustive,
        budget,
        work_done: total.work,
        pairs_processed: pairs,
        planes_examined: total.planes,
        max_plane_points: total.max_plane,
        max_conic_points: total.max_any,
        max_reducible_conic_points: total.max_red,
        max_irreducible_conic_points: total.max_irred,
        bound_reducible: bound_red,
        bound_irreducible: bound_irred,
        bound_holds: total.max_any <= bound_red.max(bound_irred) && total.max_irred <= bound_irred,
        witness,
        reducible_construction: reducible_conic_witness(ctx)?,
    })
}

fn planes_through_pair(field: &FieldSpec, proj: &[ProjPoint], i: usize, j: usize) -> PlaneStats {
    let mut stats = PlaneStats::default();
    let a = proj[i].coords();
    let b = proj[j].coords();
    let mut on_line = Vec::new();
    let mut keyed: Vec<([u32; 4], usize)> = Vec::with_capacity(proj.len());
    for (k, p) in proj.iter().enumerate() {
        if k == i || k == j {
            continue;
        }
        let normal = plane_normal(field, &a, &b, &p.coords());
        stats.work += 1;
        match Plane::new(field, normal) {
            Ok(plane) => keyed.push((plane.coeffs().map(Fe::packed), k)),
            Err(_) => on_line.push(k),
        }
    }
    if on_line.iter().any(|&k| k < j) {
        return stats;
    }
    keyed.sort_unstable();
    for run in keyed.chunk_by(|x, y| x.0 == y.0) {
        if run[0].1 < j {
            continue;
        }
        let mut members: Vec<usize> = vec![i, j];
        members.extend(on_line.iter().copied());
        members.extend(run.iter().map(|&(_, k)| k));
        members.sort_unstable();
        stats.planes += 1;
        stats.max_plane = stats.max_plane.max(members.len() as u64);
        if members.len() < MIN_PLANE_POINTS {
            stats.max_any = stats.max_any.max(members.len().min(5) as u64);
            continue;
        }
        let plane = Plane::new(field, run[0].0.map(|x| field.from_packed(x).expect("packed"))).expect("nonzero");
        analyse_plane(field, proj, &plane, &members, &mut stats);
    }
    stats
}

fn analyse_plane(field: &FieldSpec, proj: &[ProjPoint], plane: &Plane, members: &[usize], stats: &mut PlaneStats) {
    let coords: Vec<[Fe; 3]> = members.iter().map(|&k| plane.plane_coords(&proj[k])).collect();
    let monos: Vec<[Fe; 6]> = coords.iter().map(|&c| monomials(field, c)).collect();
    let m = members.len();
    let mut seen: Vec<ConicCoeffs> = Vec::new();
    for combo in Combinations::new(m, 5) {
        stats.work += 1;
        let rows: Vec<Vec<Fe>> = combo.iter().map(|&t| monos[t].to_vec()).collect();
        let kernel = kernel_basis(field, &Matrix::from_rows(&rows));
        for q in projective_span(field, &kernel) {
            let q = normalize_conic(field, q);
            if seen.contains(&q) {
                continue;
            }
            seen.push(q);
            let on: Vec<usize> = (0..m)
                .filter(|&t| eval_conic(field, &q, coords[t]).is_zero())
                .map(|t| members[t])
                .collect();
            let count = on.len() as u64;
            let reducible = conic_is_reducible(field, &q);
            stats.max_any = stats.max_any.max(count);
            if reducible {
                stats.max_red = stats.max_red.max(count);
            } else {
                stats.max_irred = stats.max_irred.max(count);
            }
            let better = stats.witness.as_ref().is_none_or(|w| count > w.0);
            if better {
                stats.witness = Some((count, *plane, q, reducible, on));
            }
        }
    }
}

fn normalize_conic(field: &FieldSpec, q: ConicCoeffs) -> ConicCoeffs {
    let lead = *q.iter().find(|c| !c.is_zero()).expect("nonzero conic");
    let inv = field.inv(lead).expect("nonzero");
    q.map(|c| field.mul(c, inv))
}

/// One representative of every projective point of the span of `basis`.
fn projective_span(field: &FieldSpec, basis: &[Vec<Fe>]) -> Vec<ConicCoeffs> {
    let d = basis.len();
    let mut out = Vec::new();
    // coefficient vectors whose first nonzero entry is 1
    for lead in 0..d {
        let free = d - lead - 1;
        let q = field.order() as u64;
        for idx in 0..q.pow(free as u32) {
            let mut coef = vec![Fe::ZERO; d];
            coef[lead] = Fe::ONE;
            let mut r = idx;
            for slot in coef.iter_mut().skip(lead + 1) {
                *slot = field.from_packed((r % q) as u32).expect("in range");
                r /= q;
            }
            let mut v = [Fe::ZERO; 6];
            for (c, b) in coef.iter().zip(basis) {
                for t in 0..6 {
                    v[t] = field.add(v[t], field.mul(*c, b[t]));
                }
            }
            out.push(v);
        }
    }
    out
}

/// Lexicographic `k`-subsets of `0..n`.
pub(crate) struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let cur = self.current.as_mut().expect("checked");
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if cur[i] < self.n - k + i {
                cur[i] += 1;
                for t in i + 1..k {
                    cur[t] = cur[t - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// The union of the first two full secants sharing a `y`-value, or of the
/// first two full secants overall when none share one.
pub fn reducible_conic_witness(ctx: &CurveCtx) -> Result<ReducibleConicWitness> {
    let field = ctx.field();
    let ell = ctx.ell();
    let full = secant_size(ell);
    let secants = full_secant_lines(ctx);
    let (a, b) = match (secants.first(), secants.get(1)) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Err(Error::DegenerateSpan),
    };
    let plane = plane_of_lines(field, &a, &b)?;
    let curve_points: Vec<usize> = ctx
        .points()
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            let pp = ProjPoint::from_curve_point(field, p);
            a.contains(field, &pp) || b.contains(field, &pp)
        })
        .map(|(i, _)| i)
        .collect();
    let common = a.meet(field, &b).ok_or(Error::DegenerateSpan)?;

    // the product of the two lines' equations inside the plane
    let la = line_form_in_plane(field, &plane, &a);
    let lb = line_form_in_plane(field, &plane, &b);
    let product: ConicCoeffs = [
        field.mul(la[0], lb[0]),
        field.mul(la[1], lb[1]),
        field.mul(la[2], lb[2]),
        field.add(field.mul(la[1], lb[2]), field.mul(la[2], lb[1])),
        field.add(field.mul(la[0], lb[2]), field.mul(la[2], lb[0])),
        field.add(field.mul(la[0], lb[1]), field.mul(la[1], lb[0])),
    ];

    Ok(ReducibleConicWitness {
        lines: vec![a.record(field), b.record(field)],
        plane: plane.record(field),
        n_points: curve_points.len() as u64,
        curve_points,
        expected: 2 * full,
        common_point: common.record(field),
        common_point_on_curve: proj_on_curve(ctx, &common),
        conic_is_reducible: conic_is_reducible(field, &product),
    })
}

/// Linear form (in plane coordinates) vanishing on a line of the plane.
fn line_form_in_plane(field: &FieldSpec, plane: &Plane, line: &Line) -> [Fe; 3] {
    let rows: Vec<Vec<Fe>> = line
        .rows()
        .iter()
        .map(|r| plane.plane_coords(&ProjPoint::new(field, *r).expect("nonzero")).to_vec())
        .collect();
    let k = kernel_basis(field, &Matrix::from_rows(&rows));
    [k[0][0], k[0][1], k[0][2]]
}

/// Full secants as lines, ordered by their base point: the first two share
/// a `y`-value when possible.
fn full_secant_lines(ctx: &CurveCtx) -> Vec<Line> {
    let field = ctx.field();
    let full = secant_size(ctx.ell());
    let mut fibres: Vec<(Fe, Fe)> = Vec::new();
    for p in ctx.affine_points() {
        let [x, y, _] = p.coords().expect("affine");
        if fibres.last() != Some(&(x, y)) {
            fibres.push((x, y));
        }
    }
    let count = |x: Fe, y: Fe| {
        ctx.affine_points()
            .iter()
            .filter(|p| matches!(p.coords(), Some([a, b, _]) if a == x && b == y))
            .count() as u64
    };
    let mut full_fibres: Vec<(Fe, Fe)> = fibres.into_iter().filter(|&(x, y)| count(x, y) == full).collect();
    full_fibres.sort_by_key(|&(x, y)| (y, x));
    full_fibres
        .into_iter()
        .map(|(x, y)| {
            let p = ProjPoint::new(field, [x, y, Fe::ZERO, Fe::ONE]).expect("W = 1");
            line_through(field, &p, &super::z_direction()).expect("distinct")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff_tower::make_field;

    #[test]
    fn combinations_enumerate_binomial_many() {
        assert_eq!(Combinations::new(9, 5).count(), 126);
        assert_eq!(Combinations::new(4, 0).count(), 1);
        assert_eq!(Combinations::new(3, 4).count(), 0);
        let all: Vec<Vec<usize>> = Combinations::new(4, 2).collect();
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
    }

    #[test]
    fn reducibility_of_line_pairs_and_smooth_conics() {
        for (p, n) in [(2u32, 6u32), (3, 6)] {
            let f = make_field(p, n, None).unwrap();
            let e = |x: u32| f.from_packed(x).unwrap();
            // product of two linear forms
            let (l1, l2) = ([e(3), e(1), e(0)], [e(0), e(5), e(7)]);
            let prod = [
                f.mul(l1[0], l2[0]),
                f.mul(l1[1], l2[1]),
                f.mul(l1[2], l2[2]),
                f.add(f.mul(l1[1], l2[2]), f.mul(l1[2], l2[1])),
                f.add(f.mul(l1[0], l2[2]), f.mul(l1[2], l2[0])),
                f.add(f.mul(l1[0], l2[1]), f.mul(l1[1], l2[0])),
            ];
            assert!(conic_is_reducible(&f, &prod));
            // v^2 - u w is smooth in every characteristic
            let smooth = [Fe::ZERO, Fe::ONE, Fe::ZERO, Fe::ZERO, f.neg(Fe::ONE), Fe::ZERO];
            assert!(!conic_is_reducible(&f, &smooth));
            // a square of a linear form
            let sq = [Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ZERO, Fe::ZERO, Fe::ZERO];
            assert!(conic_is_reducible(&f, &sq));
        }
    }

    /// A smooth conic has q + 1 rational points; a line pair has 2q + 1.
    #[test]
    fn point_counts_agree_with_reducibility() {
        let f = make_field(2, 6, None).unwrap();
        let q = f.order() as usize;
        let count = |c: &ConicCoeffs| {
            let mut n = 0;
            for u in f.elements() {
                for v in f.elements() {
                    if eval_conic(&f, c, [u, v, Fe::ONE]).is_zero() {
                        n += 1;
                    }
                }
                if eval_conic(&f, c, [u, Fe::ONE, Fe::ZERO]).is_zero() {
                    n += 1;
                }
            }
            if eval_conic(&f, c, [Fe::ONE, Fe::ZERO, Fe::ZERO]).is_zero() {
                n += 1;
            }
            n
        };
        let e = |x: u32| f.from_packed(x).unwrap();
        for seed in 1..40u32 {
            let c = [e(seed), e(seed * 7 % 64), e(seed * 13 % 64), e(seed * 3 % 64), e(seed * 5 % 64), e(seed * 11 % 64)];
            let n = count(&c);
            if conic_is_reducible(&f, &c) {
                assert!(n == 1 || n == q + 1 || n == 2 * q + 1, "seed {seed}: {n}");
            } else {
                assert_eq!(n, q + 1, "seed {seed}");
            }
        }
    }

    #[test]
    fn two_full_secants_form_a_reducible_conic() {
        for ell in [2u64, 3] {
            let ctx = CurveCtx::new(ell).unwrap();
            let w = reducible_conic_witness(&ctx).unwrap();
            assert_eq!(w.n_points, w.expected);
            assert!(!w.common_point_on_curve);
            assert!(w.conic_is_reducible);
            assert_eq!(w.common_point, super::super::z_direction().record(ctx.field()));
        }
    }

    #[test]
    fn budgeted_census_is_flagged_partial() {
        let ctx = CurveCtx::new(2).unwrap();
        let r = conic_census(&ctx, Some(1_000)).unwrap();
        assert!(!r.exhaustive);
        assert!(r.work_done >= 1_000);
    }
}
