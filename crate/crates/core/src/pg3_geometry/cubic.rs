//! Three coplanar full secants `X = x_i, Y = y` and the covering lines
//! `Y = y, Z = z_j`: `3(l^2 - l + 1)` curve points on a reducible plane
//! cubic that also lie on a plane curve of degree `l^2 - l + 1`.

use serde::Serialize;

use super::{line_through, z_direction, Line, Plane, ProjPoint};
use crate::error::{Error, Result};
use crate::ff_tower::Fe;
use crate::gk_curve::{on_curve, secant_size, trace_like, z_target, CurveCtx};

#[derive(Clone, Debug, Serialize)]
pub struct CubicConfiguration {
    pub ell: u64,
    pub y_bar: Vec<u32>,
    pub x_values: Vec<Vec<u32>>,
    pub z_values: Vec<Vec<u32>>,
    pub plane: Vec<Vec<u32>>,
    pub secant_lines: Vec<Vec<Vec<Vec<u32>>>>,
    pub cover_lines: Vec<Vec<Vec<Vec<u32>>>>,
    /// Indices into the curve's point list.
    pub points: Vec<usize>,
    pub all_on_curve: bool,
    pub all_on_plane: bool,
    pub lines_in_plane: bool,
    /// Every `(secant, cover line)` pair meets in exactly one configuration point.
    pub grid_incidences: u64,
    pub grid_complete: bool,
    pub no_common_component: bool,
}

impl CubicConfiguration {
    pub fn verified(&self) -> bool {
        let s = secant_size(self.ell) as usize;
        self.points.len() == 3 * s
            && self.all_on_curve
            && self.all_on_plane
            && self.lines_in_plane
            && self.grid_complete
            && self.no_common_component
    }
}

/// First `y` outside `F_{l^2}` carrying full secants, in canonical order.
pub fn first_generic_y(ctx: &CurveCtx) -> Option<Fe> {
    let f = ctx.field();
    let full = secant_size(ctx.ell()) as usize;
    let mut ys: Vec<Fe> = ctx.affine_points().iter().filter_map(|p| p.coords().map(|c| c[1])).collect();
    ys.sort_unstable();
    ys.dedup();
    ys.into_iter().find(|&y| {
        !f.in_subfield(y, 2 * (f.ext_degree() / 6)).unwrap_or(true)
            && ctx
                .affine_points()
                .iter()
                .filter(|p| p.coords().is_some_and(|c| c[1] == y))
                .count()
                >= 3 * full
    })
}

pub fn cubic_configuration(ctx: &CurveCtx, y_bar: Fe) -> Result<CubicConfiguration> {
    let f = ctx.field();
    let ell = ctx.ell();
    if ell < 3 {
        return Err(Error::NeedEllGe3 { ell });
    }
    let h = f.ext_degree() / 6;
    if f.in_subfield(y_bar, 2 * h)? {
        return Err(Error::NotGeneric);
    }
    let not_on_surface = || Error::NotOnSurface {
        x: "-".into(),
        y: format!("{:?}", f.coeffs(y_bar)),
    };
    let norm = f.pow(y_bar, ell + 1);
    let xs: Vec<Fe> = f.elements().filter(|&x| trace_like(f, ell, x) == norm).take(3).collect();
    if xs.len() < 3 {
        return Err(not_on_surface());
    }
    let target = z_target(f, ell, y_bar);
    let s = secant_size(ell);
    let zs: Vec<Fe> = f.elements().filter(|&z| f.pow(z, s) == target).collect();
    if zs.len() as u64 != s {
        return Err(not_on_surface());
    }

    let plane = Plane::new(f, [Fe::ZERO, Fe::ONE, Fe::ZERO, f.neg(y_bar)])?;
    let x_inf = ProjPoint::new(f, [Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ZERO])?;
    let secants: Vec<Line> = xs
        .iter()
        .map(|&x| {
            let p = ProjPoint::new(f, [x, y_bar, Fe::ZERO, Fe::ONE])?;
            line_through(f, &p, &z_direction())
        })
        .collect::<Result<_>>()?;
    let covers: Vec<Line> = zs
        .iter()
        .map(|&z| {
            let p = ProjPoint::new(f, [Fe::ZERO, y_bar, z, Fe::ONE])?;
            line_through(f, &p, &x_inf)
        })
        .collect::<Result<_>>()?;

    let grid: Vec<[Fe; 3]> = xs
        .iter()
        .flat_map(|&x| zs.iter().map(move |&z| [x, y_bar, z]))
        .collect();
    let proj: Vec<ProjPoint> = grid
        .iter()
        .map(|&[x, y, z]| ProjPoint::new(f, [x, y, z, Fe::ONE]))
        .collect::<Result<_>>()?;

    let index_of = |c: &[Fe; 3]| {
        ctx.affine_points()
            .binary_search_by(|p| p.coords().expect("affine").cmp(c))
            .ok()
    };
    let points: Vec<usize> = grid.iter().filter_map(index_of).collect();

    let mut incidences = 0u64;
    let mut complete = true;
    for r in &secants {
        for sj in &covers {
            let meets = proj.iter().filter(|p| r.contains(f, p) && sj.contains(f, p)).count();
            incidences += meets as u64;
            complete &= meets == 1;
        }
    }
    let no_common = secants.iter().all(|r| covers.iter().all(|sj| r != sj));

    let rec = |l: &Line| l.record(f);
    Ok(CubicConfiguration {
        ell,
        y_bar: f.coeffs(y_bar),
        x_values: xs.iter().map(|&x| f.coeffs(x)).collect(),
        z_values: zs.iter().map(|&z| f.coeffs(z)).collect(),
        plane: plane.record(f),
        secant_lines: secants.iter().map(rec).collect(),
        cover_lines: covers.iter().map(rec).collect(),
        all_on_curve: grid.iter().all(|&[x, y, z]| on_curve(f, ell, x, y, z)) && points.len() == grid.len(),
        all_on_plane: proj.iter().all(|p| plane.contains(f, p)),
        lines_in_plane: secants.iter().chain(&covers).all(|l| plane.contains_line(f, l)),
        grid_incidences: incidences,
        grid_complete: complete,
        no_common_component: no_common,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configuration_at_ell_3() {
        let ctx = CurveCtx::new(3).unwrap();
        let y = first_generic_y(&ctx).unwrap();
        let c = cubic_configuration(&ctx, y).unwrap();
        assert_eq!(c.points.len(), 21);
        assert_eq!(c.cover_lines.len(), 7);
        assert_eq!(c.grid_incidences, 21);
        assert!(c.verified());
    }

    #[test]
    fn rejects_small_ell_and_rational_y() {
        let ctx2 = CurveCtx::new(2).unwrap();
        let f = ctx2.field();
        assert_eq!(cubic_configuration(&ctx2, Fe::ONE).unwrap_err(), Error::NeedEllGe3 { ell: 2 });
        // at l = 2 each fibre x^2 + x = c has at most two solutions
        for c in f.elements() {
            assert!(f.elements().filter(|&x| trace_like(f, 2, x) == c).count() <= 2);
        }
        let ctx3 = CurveCtx::new(3).unwrap();
        assert_eq!(cubic_configuration(&ctx3, Fe::ZERO).unwrap_err(), Error::NotGeneric);
    }
}
