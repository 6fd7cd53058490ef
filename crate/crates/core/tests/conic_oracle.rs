//! Independent check of the conic census at l = 2: planes from all
//! non-collinear triples, then every 7-subset of a plane's curve points is
//! tested for lying on a conic via the rank of its monomial matrix.

use std::collections::HashMap;

use gk_core::linalg::{rank, Matrix};
use gk_core::pg3_geometry::{conic_census, plane_through, ProjPoint};
use gk_core::{CurveCtx, Fe};

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[test]
fn no_conic_through_seven_points_at_ell_2() {
    let ctx = CurveCtx::new(2).unwrap();
    let f = ctx.field();
    let proj: Vec<ProjPoint> = ctx.points().iter().map(|p| ProjPoint::from_curve_point(f, p)).collect();
    let n = proj.len();
    let mut planes: HashMap<_, Vec<usize>> = HashMap::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if let Ok(pl) = plane_through(f, &proj[i], &proj[j], &proj[k]) {
                    planes.entry(pl).or_default();
                }
            }
        }
    }
    for (pl, members) in planes.iter_mut() {
        members.extend((0..n).filter(|&i| pl.contains(f, &proj[i])));
    }
    let max_plane = planes.values().map(Vec::len).max().unwrap();

    let mut max_conic = 0usize;
    for (pl, members) in &planes {
        let coords: Vec<[Fe; 3]> = members.iter().map(|&i| pl.plane_coords(&proj[i])).collect();
        let row = |[u, v, w]: [Fe; 3]| vec![f.mul(u, u), f.mul(v, v), f.mul(w, w), f.mul(v, w), f.mul(u, w), f.mul(u, v)];
        let mut best = coords.len().min(5);
        for k in (6..=coords.len()).rev() {
            let hit = combinations(coords.len(), k).into_iter().any(|s| {
                let rows: Vec<Vec<Fe>> = s.iter().map(|&i| row(coords[i])).collect();
                rank(f, &Matrix::from_rows(&rows)) < 6
            });
            if hit {
                best = k;
                break;
            }
        }
        max_conic = max_conic.max(best);
    }

    let report = conic_census(&ctx, None).unwrap();
    assert!(report.exhaustive);
    assert_eq!(report.max_plane_points as usize, max_plane);
    assert_eq!(report.max_conic_points as usize, max_conic);
    assert_eq!(max_conic, 6);
}
