//! Affine-variety evaluation codes and the one-point GK specialization.
//!
//! A code is given by a finite point set and a list of monomials; its
//! evaluation matrix `H` (one row per monomial, one column per point) is a
//! generator matrix of `C(I, L)` and a parity-check matrix of the dual.
//! For the GK curve the monomials are `X^i Y^j Z^k` with
//! `i < l`, `j <= l^2 - l`, `k <= m`.

use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff_tower::{Fe, FieldSpec, FieldSummary};
use crate::gk_curve::{secant_size, CurveCtx};
use crate::linalg::{rank, Matrix};

/// Exponent vectors of a monomial basis, all of the same arity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialBasis {
    exponents: Vec<Vec<u32>>,
}

impl MonomialBasis {
    pub fn new(exponents: Vec<Vec<u32>>) -> Result<Self> {
        let arity = match exponents.first() {
            Some(e) => e.len(),
            None => return Err(Error::InvalidBasis("empty basis".into())),
        };
        if exponents.iter().any(|e| e.len() != arity) {
            return Err(Error::InvalidBasis("mixed arities".into()));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = exponents.iter().find(|e| !seen.insert(*e)) {
            return Err(Error::InvalidBasis(format!("repeated monomial {dup:?}")));
        }
        Ok(Self { exponents })
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.exponents[0].len()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    fn max_exponents(&self) -> Vec<u32> {
        (0..self.arity())
            .map(|v| self.exponents.iter().map(|e| e[v]).max().unwrap_or(0))
            .collect()
    }
}

/// `B_{l,m}` in lexicographic `(i, j, k)` order.
pub fn build_basis(ell: u64, m: u64) -> MonomialBasis {
    let (ell, m) = (ell as u32, m as u32);
    let mut exps = Vec::with_capacity((ell * (ell * ell - ell + 1) * (m + 1)) as usize);
    for i in 0..ell {
        for j in 0..=ell * ell - ell {
            for k in 0..=m {
                exps.push(vec![i, j, k]);
            }
        }
    }
    MonomialBasis { exponents: exps }
}

/// An evaluation code together with its evaluation matrix.
#[derive(Debug)]
pub struct EvaluationCode {
    field: Arc<FieldSpec>,
    points: Vec<Vec<Fe>>,
    basis: MonomialBasis,
    columns: Vec<Vec<Fe>>,
    rank: OnceLock<usize>,
}

pub fn build_code(field: Arc<FieldSpec>, points: Vec<Vec<Fe>>, basis: MonomialBasis) -> Result<EvaluationCode> {
    let arity = basis.arity();
    if let Some(bad) = points.iter().position(|p| p.len() != arity) {
        return Err(Error::InvalidBasis(format!(
            "point {bad} has {} coordinates, basis has arity {arity}",
            points[bad].len()
        )));
    }
    let mut seen = HashSet::new();
    if let Some(dup) = points.iter().position(|p| !seen.insert(p)) {
        return Err(Error::DuplicatePoints(dup));
    }
    let maxe = basis.max_exponents();
    let f = &*field;
    let columns: Vec<Vec<Fe>> = points
        .par_iter()
        .map(|p| {
            let powers: Vec<Vec<Fe>> = p
                .iter()
                .zip(&maxe)
                .map(|(&c, &e)| {
                    let mut v = Vec::with_capacity(e as usize + 1);
                    let mut acc = Fe::ONE;
                    for _ in 0..=e {
                        v.push(acc);
                        acc = f.mul(acc, c);
                    }
                    v
                })
                .collect();
            basis
                .exponents
                .iter()
                .map(|e| {
                    e.iter()
                        .enumerate()
                        .fold(Fe::ONE, |acc, (v, &k)| f.mul(acc, powers[v][k as usize]))
                })
                .collect()
        })
        .collect();
    Ok(EvaluationCode {
        field,
        points,
        basis,
        columns,
        rank: OnceLock::new(),
    })
}

/// The dual one-point code on the affine GK points, columns in curve order.
pub fn gk_code(ctx: &CurveCtx, m: u64) -> EvaluationCode {
    let points = ctx
        .affine_points()
        .iter()
        .map(|p| p.coords().expect("affine").to_vec())
        .collect();
    build_code(ctx.field_arc(), points, build_basis(ctx.ell(), m)).expect("curve points are distinct")
}

impl EvaluationCode {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn points(&self) -> &[Vec<Fe>] {
        &self.points
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    /// Code length.
    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Number of evaluated monomials (rows of `H`).
    pub fn r(&self) -> usize {
        self.basis.len()
    }

    pub fn column(&self, j: usize) -> &[Fe] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<Fe>] {
        &self.columns
    }

    /// The `r x n` evaluation matrix.
    pub fn h(&self) -> Matrix {
        let cols: Vec<&[Fe]> = self.columns.iter().map(Vec::as_slice).collect();
        Matrix::from_columns(&cols)
    }

    pub fn rank(&self) -> usize {
        *self.rank.get_or_init(|| rank(&self.field, &self.h()))
    }

    /// Dimension of the dual code.
    pub fn dual_dimension(&self) -> usize {
        self.n() - self.rank()
    }

    /// `H u`, computed row by row from the basis and points.
    pub fn syndrome(&self, u: &[Fe]) -> Result<Vec<Fe>> {
        if u.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: u.len(),
            });
        }
        let f = &*self.field;
        let mut s = vec![Fe::ZERO; self.r()];
        for (col, &c) in self.columns.iter().zip(u) {
            if c.is_zero() {
                continue;
            }
            for (acc, &h) in s.iter_mut().zip(col) {
                *acc = f.add(*acc, f.mul(h, c));
            }
        }
        Ok(s)
    }

    pub fn is_dual_codeword(&self, u: &[Fe]) -> Result<bool> {
        Ok(self.syndrome(u)?.iter().all(|c| c.is_zero()))
    }

    /// Serializable view with every field element as a coefficient tuple.
    pub fn container(&self, ell: Option<u64>, m: Option<u64>) -> CodeContainer {
        let f = &*self.field;
        let h = self.h();
        CodeContainer {
            field: f.summary(),
            ell,
            m,
            n: self.n(),
            r: self.r(),
            rank: self.rank(),
            basis: self.basis.exponents.clone(),
            points: self
                .points
                .iter()
                .map(|p| p.iter().map(|&c| f.coeffs(c)).collect())
                .collect(),
            h: (0..h.rows())
                .map(|i| h.row(i).iter().map(|&c| f.coeffs(c)).collect())
                .collect(),
        }
    }
}

/// JSON layout written by `code build`.
#[derive(Clone, Debug, Serialize)]
pub struct CodeContainer {
    pub field: FieldSummary,
    pub ell: Option<u64>,
    pub m: Option<u64>,
    pub n: usize,
    pub r: usize,
    pub rank: usize,
    pub basis: Vec<Vec<u32>>,
    pub points: Vec<Vec<Vec<u32>>>,
    /// Rows of `H`.
    pub h: Vec<Vec<Vec<u32>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DesignedDistance {
    pub value: i64,
    /// False when the bound is vacuous (`value < 1`).
    pub valid: bool,
}

/// `d* = m(l^3 + 1) - l^5 + 2 l^3 - l^2 + 2`.
pub fn designed_distance(ell: u64, m: u64) -> DesignedDistance {
    let (l, m) = (ell as i64, m as i64);
    let value = m * (l.pow(3) + 1) - l.pow(5) + 2 * l.pow(3) - l * l + 2;
    DesignedDistance { value, valid: value >= 1 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceCase {
    Collinear,
    Conic,
    Cubic,
    Beyond,
    Designed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceClassification {
    pub ell: u64,
    pub m: u64,
    pub case: DistanceCase,
    /// `d` itself when `exact`, otherwise a lower bound.
    pub d: i64,
    pub exact: bool,
    pub d_star: DesignedDistance,
    /// `3m + 1` whenever `m > l^2 - l + 1`.
    pub bound_3m_plus_1: Option<i64>,
    pub required_fact: String,
}

/// Geometric inputs the case split relies on.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GeometricFacts {
    pub max_collinear: u64,
    pub max_conic: u64,
    pub reducible_conic_witness: u64,
    /// Points of the three-secant cubic configuration, if it exists.
    pub cubic_witness: Option<u64>,
}

impl DistanceClassification {
    /// Whether the case chosen is the one the geometric facts force.
    pub fn consistent_with(&self, facts: &GeometricFacts) -> bool {
        let m = self.m;
        let line = facts.max_collinear >= m + 2;
        let conic = facts.max_conic >= 2 * m + 2;
        let cubic = facts.cubic_witness.is_some_and(|c| c >= 3 * m);
        match self.case {
            DistanceCase::Collinear => line,
            DistanceCase::Conic => !line && facts.reducible_conic_witness >= 2 * m + 2,
            DistanceCase::Cubic => !line && !conic && cubic,
            DistanceCase::Beyond | DistanceCase::Designed => !line && !conic && !cubic,
        }
    }
}

pub fn structural_min_distance(ell: u64, m: u64) -> Result<DistanceClassification> {
    if m < 2 {
        return Err(Error::MTooSmall(m));
    }
    let s = secant_size(ell);
    let d_star = designed_distance(ell, m);
    let mi = m as i64;
    let (case, d, exact, fact) = if m + 2 <= s {
        (DistanceCase::Collinear, mi + 2, true, format!("{} collinear curve points", m + 2))
    } else if m + 1 == s {
        (
            DistanceCase::Conic,
            2 * mi + 2,
            true,
            format!("no {} collinear points; {} points on a reducible conic", m + 2, 2 * m + 2),
        )
    } else if m == s {
        (
            DistanceCase::Cubic,
            3 * mi,
            true,
            format!("no {} collinear points, no {} on a conic; {} points on a plane cubic", m + 2, 2 * m + 2, 3 * m),
        )
    } else if m < ell * ell {
        (DistanceCase::Beyond, 3 * mi + 1, false, "none of the line, conic, cubic configurations".into())
    } else {
        (DistanceCase::Designed, d_star.value, false, "Goppa bound".into())
    };
    Ok(DistanceClassification {
        ell,
        m,
        case,
        d,
        exact,
        d_star,
        bound_3m_plus_1: (m > s).then_some(3 * mi + 1),
        required_fact: fact,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossoverRow {
    pub m: u64,
    pub three_m_plus_1: i64,
    pub d_star: i64,
    pub bound_dominates: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossoverScan {
    pub ell: u64,
    pub rows: Vec<CrossoverRow>,
    /// Largest `m` with `3m + 1 >= d*`.
    pub last_dominating_m: Option<u64>,
    /// The claimed threshold `l^2 - 1`.
    pub claimed_threshold: u64,
    /// `3m + 1 >= d*` holds exactly for `m <= l^2 - 1` over the scanned range.
    pub claim_holds: bool,
}

/// Compares `3m + 1` with `d*` for `m = 0..=m_max`.
pub fn crossover_scan(ell: u64, m_max: u64) -> CrossoverScan {
    let rows: Vec<CrossoverRow> = (0..=m_max)
        .map(|m| {
            let t = 3 * m as i64 + 1;
            let ds = designed_distance(ell, m).value;
            CrossoverRow {
                m,
                three_m_plus_1: t,
                d_star: ds,
                bound_dominates: t >= ds,
            }
        })
        .collect();
    let claimed = ell * ell - 1;
    CrossoverScan {
        ell,
        last_dominating_m: rows.iter().filter(|r| r.bound_dominates).map(|r| r.m).max(),
        claim_holds: rows.iter().all(|r| r.bound_dominates == (r.m <= claimed)),
        claimed_threshold: claimed,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff_tower::make_field;

    #[test]
    fn basis_sizes_and_order() {
        assert_eq!(build_basis(2, 2).len(), 18);
        let b = build_basis(3, 2);
        assert_eq!(b.len(), 63);
        assert_eq!(b.exponents()[0], vec![0, 0, 0]);
        assert_eq!(b.exponents().last().unwrap(), &vec![2, 6, 2]);
        assert!(b.exponents().windows(2).all(|w| w[0] < w[1]));
        assert!(MonomialBasis::new(vec![vec![0, 1], vec![0, 1]]).is_err());
        assert!(MonomialBasis::new(vec![]).is_err());
    }

    fn toy() -> EvaluationCode {
        let f = Arc::new(make_field(2, 2, None).unwrap());
        let pts: Vec<Vec<Fe>> = f
            .elements()
            .flat_map(|x| f.elements().map(move |y| (x, y)))
            .filter(|&(x, y)| f.pow(y, 3) == f.add(f.pow(x, 2), x))
            .map(|(x, y)| vec![x, y])
            .collect();
        let basis = MonomialBasis::new(vec![vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        build_code(f, pts, basis).unwrap()
    }

    #[test]
    fn toy_hermitian_code() {
        let c = toy();
        assert_eq!((c.r(), c.n()), (3, 8));
        assert_eq!(c.rank(), 3);
        let h = c.h();
        assert!((0..8).all(|j| h[(0, j)] == Fe::ONE));
        for (j, p) in c.points().iter().enumerate() {
            assert_eq!(h[(1, j)], p[0]);
            assert_eq!(h[(2, j)], p[1]);
        }
    }

    #[test]
    fn duplicate_points_rejected() {
        let f = Arc::new(make_field(2, 2, None).unwrap());
        let basis = MonomialBasis::new(vec![vec![0]]).unwrap();
        let err = build_code(f, vec![vec![Fe::ONE], vec![Fe::ONE]], basis).unwrap_err();
        assert_eq!(err, Error::DuplicatePoints(1));
    }

    #[test]
    fn dual_membership() {
        let c = toy();
        assert!(c.is_dual_codeword(&[Fe::ZERO; 8]).unwrap());
        for j in 0..8 {
            let mut u = vec![Fe::ZERO; 8];
            u[j] = Fe::ONE;
            assert!(!c.is_dual_codeword(&u).unwrap());
        }
        assert!(matches!(c.is_dual_codeword(&[Fe::ZERO; 3]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn gk_code_shape() {
        let ctx = CurveCtx::new(2).unwrap();
        let c = gk_code(&ctx, 2);
        assert_eq!((c.r(), c.n()), (18, 224));
        for (j, p) in ctx.affine_points().iter().enumerate() {
            let [x, y, z] = p.coords().unwrap();
            let f = ctx.field();
            for (row, e) in c.basis().exponents().iter().enumerate() {
                let v = f.mul(f.mul(f.pow(x, e[0] as u64), f.pow(y, e[1] as u64)), f.pow(z, e[2] as u64));
                assert_eq!(c.column(j)[row], v);
            }
        }
    }

    #[test]
    fn designed_distance_values() {
        assert_eq!(designed_distance(3, 2), DesignedDistance { value: -140, valid: false });
        assert_eq!(designed_distance(3, 9), DesignedDistance { value: 56, valid: true });
    }

    #[test]
    fn classification_at_ell_3() {
        let d = |m| structural_min_distance(3, m).unwrap();
        for m in 2..=5 {
            assert_eq!((d(m).case, d(m).d, d(m).exact), (DistanceCase::Collinear, m as i64 + 2, true));
        }
        assert_eq!((d(6).case, d(6).d), (DistanceCase::Conic, 14));
        assert_eq!((d(7).case, d(7).d), (DistanceCase::Cubic, 21));
        assert_eq!((d(8).case, d(8).d, d(8).exact), (DistanceCase::Beyond, 25, false));
        assert_eq!((d(9).case, d(9).d), (DistanceCase::Designed, 56));
        assert_eq!(d(9).bound_3m_plus_1, Some(28));
        assert_eq!(structural_min_distance(3, 1).unwrap_err(), Error::MTooSmall(1));
    }

    #[test]
    fn crossover_is_below_claim_at_ell_3() {
        // 3m + 1 >= 28m - 196 iff m <= 7
        let s = crossover_scan(3, 27);
        assert_eq!(s.last_dominating_m, Some(7));
        assert!(!s.claim_holds);
        let s2 = crossover_scan(2, 8);
        assert_eq!(s2.last_dominating_m, Some(3));
        assert!(s2.claim_holds);
    }
}
