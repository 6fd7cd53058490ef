//! Lines meeting the curve in at least two points.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{line_through, z_direction, Line, ProjPoint};
use crate::error::{Error, Result};
use crate::ff_tower::{Fe, FieldSpec};
use crate::gk_curve::{secant_size, trace_like, z_target, CurveCtx, CurvePoint, Orbit};

/// A line meeting the curve in the maximum `l^2 - l + 1` points.
///
/// For `l >= 3` every such line is `X = x, Y = y`. At `l = 2` the bound
/// coincides with `l + 1` and lines through `F_4`-rational points also
/// reach it; `vertical` tells the two kinds apart.
#[derive(Clone, Debug, Serialize)]
pub struct FullSecant {
    #[serde(skip)]
    pub line: Line,
    pub vertical: bool,
    /// Coordinates of the first point; `x` and `y` are constant along vertical lines.
    pub x: Vec<u32>,
    pub y: Vec<u32>,
    /// Indices into the curve's point list.
    pub points: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SecantChecks {
    pub max_equals_bound: bool,
    pub full_count_matches: bool,
    /// Count of vertical O2-only full secants against the same closed form.
    pub vertical_count_matches: bool,
    pub all_z_parallel: bool,
    pub all_o2_only: bool,
    pub each_o2_on_exactly_one: bool,
    pub o1_lines_bounded: bool,
    pub incidences_consistent: bool,
}

impl SecantChecks {
    pub fn all(&self) -> bool {
        self.max_equals_bound
            && self.full_count_matches
            && self.vertical_count_matches
            && self.all_z_parallel
            && self.all_o2_only
            && self.each_o2_on_exactly_one
            && self.o1_lines_bounded
            && self.incidences_consistent
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SecantCensus {
    pub ell: u64,
    pub max_secant_size: u64,
    pub expected_full_secants: u64,
    pub full_secants: Vec<FullSecant>,
    pub vertical_full_secants: u64,
    /// Number of lines meeting the curve in exactly `k` points, `k >= 2`.
    pub histogram: BTreeMap<u64, u64>,
    pub lines_through_two_or_more: u64,
    pub checks: SecantChecks,
}

/// Per-point view of the lines through one curve point.
#[derive(Default)]
struct Local {
    owned_hist: BTreeMap<u64, u64>,
    owned_full: Vec<Vec<usize>>,
    lines_through: u64,
    max_through: u64,
    full_through: u64,
    orbit_o1: bool,
    orbit_o2: bool,
}

fn normalize3(field: &FieldSpec, d: [Fe; 3]) -> [u32; 3] {
    let lead = d.iter().find(|c| !c.is_zero()).expect("distinct points");
    let inv = field.inv(*lead).expect("nonzero");
    d.map(|c| field.mul(c, inv).packed())
}

/// Direction key of the line through `points[i]` and `points[j]`, unique
/// among the lines through `points[i]`.
fn direction_key(field: &FieldSpec, a: &CurvePoint, b: &CurvePoint) -> [u32; 3] {
    match (a.coords(), b.coords()) {
        (Some(p), Some(q)) => normalize3(field, [0, 1, 2].map(|k| field.sub(q[k], p[k]))),
        (Some(_), None) => [1, 0, 0],
        // lines through infinity are {Y = y, Z = z}
        (None, Some(q)) => [u32::MAX, q[1].packed(), q[2].packed()],
        (None, None) => unreachable!("distinct points"),
    }
}

/// Exhaustive census of all lines through two or more curve points
/// (including the point at infinity).
pub fn secant_census(ctx: &CurveCtx) -> SecantCensus {
    let field = ctx.field();
    let ell = ctx.ell();
    let pts = ctx.points();
    let full = secant_size(ell);

    let locals: Vec<Local> = (0..pts.len())
        .into_par_iter()
        .map_init(Vec::new, |keys: &mut Vec<([u32; 3], u32)>, i| {
            keys.clear();
            keys.extend(
                (0..pts.len())
                    .filter(|&j| j != i)
                    .map(|j| (direction_key(field, &pts[i], &pts[j]), j as u32)),
            );
            keys.sort_unstable();
            let mut local = Local {
                orbit_o1: pts[i].orbit == Orbit::O1,
                orbit_o2: pts[i].orbit == Orbit::O2,
                ..Local::default()
            };
            for run in keys.chunk_by(|a, b| a.0 == b.0) {
                let size = run.len() as u64 + 1;
                local.lines_through += 1;
                local.max_through = local.max_through.max(size);
                if size == full {
                    local.full_through += 1;
                }
                if (i as u32) < run[0].1 {
                    *local.owned_hist.entry(size).or_default() += 1;
                    if size == full {
                        let mut members = vec![i];
                        members.extend(run.iter().map(|&(_, j)| j as usize));
                        local.owned_full.push(members);
                    }
                }
            }
            local
        })
        .collect();

    let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
    let mut incidences_from_points = 0u64;
    let mut full_members = Vec::new();
    for l in &locals {
        for (&k, &v) in &l.owned_hist {
            *histogram.entry(k).or_default() += v;
        }
        incidences_from_points += l.lines_through;
        full_members.extend(l.owned_full.iter().cloned());
    }
    let incidences_from_lines: u64 = histogram.iter().map(|(k, v)| k * v).sum();
    let max_secant_size = histogram.keys().copied().max().unwrap_or(0);

    let zdir = z_direction();
    let full_secants: Vec<FullSecant> = full_members
        .into_iter()
        .map(|members| {
            let a = ProjPoint::from_curve_point(field, &pts[members[0]]);
            let b = ProjPoint::from_curve_point(field, &pts[members[1]]);
            let line = line_through(field, &a, &b).expect("distinct points");
            let [x, y, _] = pts[members[0]].coords().unwrap_or([Fe::ZERO; 3]);
            FullSecant {
                vertical: line.contains(field, &zdir),
                line,
                x: field.coeffs(x),
                y: field.coeffs(y),
                points: members,
            }
        })
        .collect();

    let expected_full = (ell + 1) * (ell.pow(5) - ell.pow(3));
    let vertical_o2 = full_secants
        .iter()
        .filter(|s| s.vertical && s.points.iter().all(|&i| pts[i].orbit == Orbit::O2))
        .count() as u64;
    let checks = SecantChecks {
        max_equals_bound: max_secant_size == full,
        full_count_matches: full_secants.len() as u64 == expected_full,
        vertical_count_matches: vertical_o2 == expected_full,
        all_z_parallel: full_secants.iter().all(|s| s.vertical),
        all_o2_only: full_secants
            .iter()
            .all(|s| s.points.iter().all(|&i| pts[i].orbit == Orbit::O2)),
        each_o2_on_exactly_one: locals.iter().filter(|l| l.orbit_o2).all(|l| l.full_through == 1),
        o1_lines_bounded: locals.iter().filter(|l| l.orbit_o1).all(|l| l.max_through <= ell + 1),
        incidences_consistent: incidences_from_lines == incidences_from_points,
    };

    SecantCensus {
        ell,
        max_secant_size,
        expected_full_secants: expected_full,
        vertical_full_secants: vertical_o2,
        lines_through_two_or_more: histogram.values().sum(),
        full_secants,
        histogram,
        checks,
    }
}

impl SecantCensus {
    /// The vertical full secants `X = x, Y = y`.
    pub fn vertical_secants(&self) -> impl Iterator<Item = &FullSecant> {
        self.full_secants.iter().filter(|s| s.vertical)
    }
}

/// The line `X = x0, Y = y0` and the curve points on it.
pub fn vertical_secant(ctx: &CurveCtx, x0: Fe, y0: Fe) -> Result<(Line, Vec<CurvePoint>)> {
    let f = ctx.field();
    let ell = ctx.ell();
    if trace_like(f, ell, x0) != f.pow(y0, ell + 1) {
        return Err(Error::NotOnSurface {
            x: format!("{:?}", f.coeffs(x0)),
            y: format!("{:?}", f.coeffs(y0)),
        });
    }
    let target = z_target(f, ell, y0);
    let mut poly = vec![Fe::ZERO; secant_size(ell) as usize + 1];
    poly[0] = f.neg(target);
    *poly.last_mut().expect("nonempty") = Fe::ONE;
    let points: Vec<CurvePoint> = f
        .roots(&poly)?
        .into_iter()
        .map(|z| CurvePoint::affine(x0, y0, z))
        .collect();
    let base = ProjPoint::new(f, [x0, y0, Fe::ZERO, Fe::ONE])?;
    let line = line_through(f, &base, &z_direction())?;
    Ok((line, points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gk_curve::on_curve;

    #[test]
    fn census_at_ell_2() {
        let ctx = CurveCtx::new(2).unwrap();
        let c = secant_census(&ctx);
        assert_eq!(c.max_secant_size, 3);
        // 3 = l + 1: every line through an O1 point and another point is full
        assert_eq!(c.full_secants.len(), 1056);
        assert_eq!(c.vertical_full_secants, 72);
        assert_eq!(c.vertical_secants().count(), 72);
        assert!(c.checks.vertical_count_matches);
        assert!(c.checks.o1_lines_bounded && c.checks.incidences_consistent);
        assert!(!c.checks.full_count_matches && !c.checks.all_z_parallel);
        let non_vertical = c.full_secants.iter().filter(|s| !s.vertical);
        assert!(non_vertical
            .into_iter()
            .all(|s| s.points.iter().any(|&i| ctx.points()[i].orbit == Orbit::O1)));
        // every pair of points lies on exactly one line
        let n = ctx.points().len() as u64;
        let pairs: u64 = c.histogram.iter().map(|(k, v)| v * k * (k - 1) / 2).sum();
        assert_eq!(pairs, n * (n - 1) / 2);
    }

    /// Brute-force oracle: canonical line for every pair, grouped in a map.
    #[test]
    fn census_matches_pairwise_canonical_lines_at_ell_2() {
        let ctx = CurveCtx::new(2).unwrap();
        let f = ctx.field();
        let proj: Vec<ProjPoint> = ctx.points().iter().map(|p| ProjPoint::from_curve_point(f, p)).collect();
        let mut lines: std::collections::HashMap<Line, std::collections::BTreeSet<usize>> = Default::default();
        for i in 0..proj.len() {
            for j in i + 1..proj.len() {
                let l = line_through(f, &proj[i], &proj[j]).unwrap();
                let e = lines.entry(l).or_default();
                e.insert(i);
                e.insert(j);
            }
        }
        let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
        for s in lines.values() {
            *hist.entry(s.len() as u64).or_default() += 1;
        }
        let census = secant_census(&ctx);
        assert_eq!(hist, census.histogram);
        for s in &census.full_secants {
            let set: std::collections::BTreeSet<usize> = s.points.iter().copied().collect();
            assert_eq!(lines[&s.line], set);
        }
    }

    #[test]
    fn vertical_secant_examples() {
        let ctx = CurveCtx::new(2).unwrap();
        let (_, pts) = vertical_secant(&ctx, Fe::ZERO, Fe::ZERO).unwrap();
        assert_eq!(pts, vec![CurvePoint::affine(Fe::ZERO, Fe::ZERO, Fe::ZERO)]);
        assert!(matches!(
            vertical_secant(&ctx, Fe::ONE, Fe::ONE),
            Err(Error::NotOnSurface { .. })
        ));
        for ell in [2u64, 3] {
            let ctx = CurveCtx::new(ell).unwrap();
            let f = ctx.field();
            let mut fibres: Vec<(Fe, Fe)> = ctx
                .affine_points()
                .iter()
                .map(|p| {
                    let [x, y, _] = p.coords().unwrap();
                    (x, y)
                })
                .collect();
            fibres.dedup();
            for (x, y) in fibres {
                let (line, pts) = vertical_secant(&ctx, x, y).unwrap();
                let expected = if f.in_subfield(y, 2).unwrap() { 1 } else { secant_size(ell) };
                assert_eq!(pts.len() as u64, expected);
                for q in &pts {
                    let [a, b, c] = q.coords().unwrap();
                    assert!(on_curve(f, ell, a, b, c));
                    assert!(line.contains(f, &ProjPoint::from_curve_point(f, q)));
                }
            }
        }
    }
}
