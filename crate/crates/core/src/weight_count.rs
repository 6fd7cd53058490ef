//! Counting and searching low-weight dual codewords.
//!
//! A dual codeword of weight `w` is a kernel vector of the column submatrix
//! on its support with every coordinate nonzero. For a support `S` the number
//! of such vectors is, by inclusion–exclusion over the coordinates forced to
//! vanish,
//!
//! ```text
//! N_S = sum_{U ⊆ S} (-1)^{|S \ U|} q^{dim ker H_U}
//! ```
//!
//! Summing `N_S` over all `w`-subsets gives `A_w`; ordering the support
//! gives the `A_w · w!` solutions of the polynomial system `J_w`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::av_code::EvaluationCode;
use crate::error::{Error, Result};
use crate::ff_tower::{Fe, FieldSpec};
use crate::gk_curve::secant_size;
use crate::linalg::{kernel_basis, EchelonBasis, Matrix};
use crate::pg3_geometry::Combinations;

/// Largest support handled by [`full_support_kernel_count`].
pub const SUPPORT_CAP: usize = 16;

pub(crate) fn decimal<S: Serializer>(v: &u128, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn decimal_vec<S: Serializer>(v: &[u128], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(u128::to_string))
}

fn decimal_opt<S: Serializer>(v: &Option<u128>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&v.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportWitness {
    pub support: Vec<usize>,
    pub kernel_dim: usize,
    #[serde(serialize_with = "decimal")]
    pub full_support_count: u128,
    /// A full-support kernel vector, one entry per support index.
    #[serde(skip)]
    pub sample_vector: Option<Vec<Fe>>,
    pub sample_coefficients: Option<Vec<Vec<u32>>>,
}

impl SupportWitness {
    /// Embeds the sample vector into a length-`n` word.
    pub fn embedded(&self, n: usize) -> Option<Vec<Fe>> {
        let v = self.sample_vector.as_ref()?;
        let mut u = vec![Fe::ZERO; n];
        for (&i, &c) in self.support.iter().zip(v) {
            u[i] = c;
        }
        Some(u)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Constructive,
    BruteForce,
    DualEnumeration,
    MeetInMiddle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightReport {
    pub w: usize,
    #[serde(serialize_with = "decimal")]
    pub a_w: u128,
    pub method: Method,
    pub exhaustive: bool,
    pub supports_examined: u64,
}

fn validate_support(code: &EvaluationCode, support: &[usize]) -> Result<()> {
    if support.is_empty() {
        return Err(Error::InvalidSupport("empty support".into()));
    }
    if support.len() > SUPPORT_CAP {
        return Err(Error::SupportTooLarge {
            size: support.len(),
            cap: SUPPORT_CAP,
        });
    }
    if let Some(&bad) = support.iter().find(|&&i| i >= code.n()) {
        return Err(Error::InvalidSupport(format!("index {bad} out of range")));
    }
    let mut sorted = support.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidSupport("repeated index".into()));
    }
    Ok(())
}

/// Kernel dimension of every column subset, indexed by bit mask.
fn subset_kernel_dims(field: &FieldSpec, cols: &[&[Fe]]) -> Vec<u8> {
    fn walk(field: &FieldSpec, cols: &[&[Fe]], i: usize, mask: usize, basis: &mut EchelonBasis, out: &mut [u8]) {
        if i == cols.len() {
            out[mask] = (mask.count_ones() as usize - basis.rank()) as u8;
            return;
        }
        walk(field, cols, i + 1, mask, basis, out);
        let grew = basis.insert(field, cols[i]);
        walk(field, cols, i + 1, mask | 1 << i, basis, out);
        if grew {
            basis.pop();
        }
    }
    let mut out = vec![0u8; 1 << cols.len()];
    let mut basis = EchelonBasis::new(cols.first().map_or(0, |c| c.len()));
    walk(field, cols, 0, 0, &mut basis, &mut out);
    out
}

fn inclusion_exclusion(q: u128, k: usize, dims: &[u8]) -> Result<u128> {
    let full = (1usize << k) - 1;
    let mut total: i128 = 0;
    for (mask, &dim) in dims.iter().enumerate() {
        let term = (q as i128).checked_pow(dim as u32).ok_or(Error::CountOverflow)?;
        let sign_neg = (full ^ mask).count_ones() % 2 == 1;
        total = if sign_neg { total.checked_sub(term) } else { total.checked_add(term) }.ok_or(Error::CountOverflow)?;
    }
    u128::try_from(total).map_err(|_| Error::CountOverflow)
}

fn full_support_sample(field: &FieldSpec, cols: &[&[Fe]]) -> Option<Vec<Fe>> {
    let sub = Matrix::from_columns(cols);
    let basis = kernel_basis(field, &sub);
    let full = |v: &Vec<Fe>| v.iter().all(|c| !c.is_zero());
    if let Some(v) = basis.iter().find(|v| full(v)) {
        return Some(v.clone());
    }
    let q = field.order();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    (0..1024).find_map(|_| {
        let mut v = vec![Fe::ZERO; cols.len()];
        for b in &basis {
            let c = field.from_packed(rng.gen_range(0..q)).expect("in range");
            for (x, &y) in v.iter_mut().zip(b) {
                *x = field.add(*x, field.mul(c, y));
            }
        }
        full(&v).then_some(v)
    })
}

/// Number of kernel vectors of `H` restricted to `support` with every
/// coordinate nonzero, i.e. dual codewords with exactly this support.
pub fn full_support_kernel_count(code: &EvaluationCode, support: &[usize]) -> Result<SupportWitness> {
    validate_support(code, support)?;
    let field = code.field();
    let cols: Vec<&[Fe]> = support.iter().map(|&i| code.column(i)).collect();
    let mut basis = EchelonBasis::new(code.r());
    let independent = cols.iter().all(|c| basis.insert(field, c));
    if independent {
        return Ok(SupportWitness {
            support: support.to_vec(),
            kernel_dim: 0,
            full_support_count: 0,
            sample_vector: None,
            sample_coefficients: None,
        });
    }
    let dims = subset_kernel_dims(field, &cols);
    let count = inclusion_exclusion(field.order() as u128, cols.len(), &dims)?;
    let sample = if count > 0 { full_support_sample(field, &cols) } else { None };
    Ok(SupportWitness {
        support: support.to_vec(),
        kernel_dim: *dims.last().expect("nonempty") as usize,
        full_support_count: count,
        sample_coefficients: sample.as_ref().map(|v| v.iter().map(|&c| field.coeffs(c)).collect()),
        sample_vector: sample,
    })
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn factorial(n: u64) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, i| acc.checked_mul(i))
}

/// `(l + 1)(l^5 - l^3)(l^6 - 1) C(l^2 - l + 1, d)`; zero once `d` exceeds the secant size.
pub fn closed_form_ad(ell: u64, d: u64) -> u128 {
    let l = ell as u128;
    (l + 1) * (l.pow(5) - l.pow(3)) * (l.pow(6) - 1) * binomial(secant_size(ell), d)
}

/// Whether `l - 1 <= m <= 2(l - 1)`, the range of the exact count.
pub fn exact_count_range(ell: u64, m: u64) -> bool {
    ell - 1 <= m && m <= 2 * (ell - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBound {
    pub ell: u64,
    pub d: u64,
    #[serde(serialize_with = "decimal")]
    pub value: u128,
    /// `2(l - 1) < m < l^2 - l - 1` for `m = d - 2`.
    pub in_range: bool,
}

/// The same closed form read as a lower bound for `d = m + 2`.
pub fn lower_bound_ad(ell: u64, d: u64) -> LowerBound {
    let in_range = d >= 2 && {
        let m = d - 2;
        2 * (ell - 1) < m && m + 1 < ell * ell - ell
    };
    LowerBound {
        ell,
        d,
        value: closed_form_ad(ell, d),
        in_range,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructiveReport {
    pub report: WeightReport,
    pub secants: u64,
    pub subsets_per_secant: u64,
    /// The common per-subset count, if every subset gave the same value.
    #[serde(serialize_with = "decimal_opt")]
    pub uniform_contribution: Option<u128>,
    /// Every contributing kernel has dimension one and a full-support sample
    /// that passes an independent syndrome check.
    pub all_verified: bool,
}

/// Sums full-support counts over all `d`-subsets of the given secants
/// (column indices).
pub fn constructive_count(code: &EvaluationCode, secants: &[Vec<usize>], d: usize) -> Result<ConstructiveReport> {
    let per: Vec<Vec<(u128, bool)>> = secants
        .par_iter()
        .map(|line| {
            Combinations::new(line.len(), d)
                .map(|pick| {
                    let support: Vec<usize> = pick.iter().map(|&k| line[k]).collect();
                    let wit = full_support_kernel_count(code, &support)?;
                    let ok = wit.full_support_count == 0
                        || (wit.kernel_dim == 1
                            && wit
                                .embedded(code.n())
                                .is_some_and(|u| code.is_dual_codeword(&u).unwrap_or(false)));
                    Ok((wit.full_support_count, ok))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let counts: Vec<(u128, bool)> = per.into_iter().flatten().collect();
    let total = counts.iter().try_fold(0u128, |a, &(c, _)| a.checked_add(c)).ok_or(Error::CountOverflow)?;
    let uniform = match counts.first() {
        Some(&(c0, _)) if counts.iter().all(|&(c, _)| c == c0) => Some(c0),
        _ => None,
    };
    Ok(ConstructiveReport {
        report: WeightReport {
            w: d,
            a_w: total,
            method: Method::Constructive,
            exhaustive: true,
            supports_examined: counts.len() as u64,
        },
        secants: secants.len() as u64,
        subsets_per_secant: secants.first().map_or(0, |l| binomial(l.len() as u64, d as u64) as u64),
        uniform_contribution: uniform,
        all_verified: counts.iter().all(|&(_, ok)| ok),
    })
}

/// Exact `A_w` by summing over every `w`-subset of columns.
pub fn brute_force_aw(code: &EvaluationCode, w: usize, budget: u64) -> Result<WeightReport> {
    let n = code.n();
    let work = binomial(n as u64, w as u64).saturating_mul(1u128 << w.min(100));
    if work > budget as u128 {
        return Err(Error::BudgetExceeded { budget });
    }
    if w == 0 {
        return Ok(WeightReport {
            w,
            a_w: 1,
            method: Method::BruteForce,
            exhaustive: true,
            supports_examined: 1,
        });
    }
    if w > n {
        return Ok(WeightReport {
            w,
            a_w: 0,
            method: Method::BruteForce,
            exhaustive: true,
            supports_examined: 0,
        });
    }
    let parts: Vec<(u128, u64)> = (0..=n - w)
        .into_par_iter()
        .map(|first| {
            let mut total = 0u128;
            let mut seen = 0u64;
            let rest = n - first - 1;
            for pick in Combinations::new(rest, w - 1) {
                let mut support = Vec::with_capacity(w);
                support.push(first);
                support.extend(pick.iter().map(|&k| first + 1 + k));
                total += full_support_kernel_count(code, &support)?.full_support_count;
                seen += 1;
            }
            Ok((total, seen))
        })
        .collect::<Result<_>>()?;
    Ok(WeightReport {
        w,
        a_w: parts.iter().map(|p| p.0).sum(),
        method: Method::BruteForce,
        exhaustive: true,
        supports_examined: parts.iter().map(|p| p.1).sum(),
    })
}

/// `|V(J_w)| = A_w · w!`; zero for `w = 0`.
pub fn count_jw_solutions(code: &EvaluationCode, w: usize, budget: u64) -> Result<u128> {
    if w == 0 {
        return Ok(0);
    }
    let a = brute_force_aw(code, w, budget)?.a_w;
    a.checked_mul(factorial(w as u64).ok_or(Error::CountOverflow)?)
        .ok_or(Error::CountOverflow)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualDistribution {
    pub q: u32,
    pub dual_dimension: usize,
    #[serde(serialize_with = "decimal")]
    pub total: u128,
    /// `A_w` for `w = 0..=n`.
    #[serde(serialize_with = "decimal_vec")]
    pub distribution: Vec<u128>,
}

/// Weight distribution of the dual by listing all of its words.
pub fn dual_enumeration_aw(code: &EvaluationCode, budget: u64) -> Result<DualDistribution> {
    let field = code.field();
    let q = field.order();
    let basis = kernel_basis(field, &code.h());
    let k = basis.len();
    let total = (q as u128).checked_pow(k as u32).ok_or(Error::BudgetExceeded { budget })?;
    if total > budget as u128 {
        return Err(Error::BudgetExceeded { budget });
    }
    let elems: Vec<Fe> = field.elements().collect();
    let n = code.n();
    let mut dist = vec![0u128; n + 1];
    let mut digits = vec![0usize; k];
    for _ in 0..total {
        let mut word = vec![Fe::ZERO; n];
        for (b, &d) in basis.iter().zip(&digits) {
            let c = elems[d];
            if !c.is_zero() {
                for (x, &y) in word.iter_mut().zip(b) {
                    *x = field.add(*x, field.mul(c, y));
                }
            }
        }
        dist[word.iter().filter(|c| !c.is_zero()).count()] += 1;
        for d in digits.iter_mut() {
            *d += 1;
            if *d < elems.len() {
                break;
            }
            *d = 0;
        }
    }
    Ok(DualDistribution {
        q,
        dual_dimension: k,
        total,
        distribution: dist,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Exhaustive,
    MeetInMiddle,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub strategy: Strategy,
    pub w_max: usize,
    /// The first witness found for each achieved weight, plus seeded supports that carry words.
    pub witnesses: Vec<SupportWitness>,
    pub min_weight_found: Option<usize>,
    /// No dual word of weight at most this exists; set only after full coverage.
    pub absent_up_to: Option<usize>,
    pub budget_exhausted: bool,
    pub work: u64,
    /// Exact `A_w` per weight (meet-in-the-middle only).
    pub counts: BTreeMap<usize, String>,
}

/// Searches for dual codewords of weight at most `w_max`. Seeded supports
/// are checked first; absence is certified only by a complete search.
pub fn low_weight_search(
    code: &EvaluationCode,
    w_max: usize,
    strategy: Strategy,
    budget: Option<u64>,
    seeds: &[Vec<usize>],
) -> Result<SearchOutcome> {
    let mut witnesses = Vec::new();
    for s in seeds {
        let w = full_support_kernel_count(code, s)?;
        if w.full_support_count > 0 {
            witnesses.push(w);
        }
    }
    let budget = budget.unwrap_or(u64::MAX);
    let mut out = match strategy {
        Strategy::Exhaustive => circuit_search(code, w_max, budget)?,
        Strategy::MeetInMiddle => mitm_search(code, w_max, budget)?,
    };
    witnesses.append(&mut out.witnesses);
    let min_found = witnesses.iter().map(|w| w.support.len()).min();
    out.min_weight_found = min_found;
    out.witnesses = witnesses;
    if let (Some(a), Some(m)) = (out.absent_up_to, min_found) {
        out.absent_up_to = Some(a.min(m - 1));
    }
    Ok(out)
}

/// Depth-first search over independent column sets in increasing index
/// order. A column in the span of the current set closes a circuit; every
/// circuit of size `<= w_max` is reached this way.
fn circuit_search(code: &EvaluationCode, w_max: usize, budget: u64) -> Result<SearchOutcome> {
    use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
    let n = code.n();
    let field = code.field();
    let work = AtomicU64::new(0);
    let exhausted = AtomicBool::new(false);

    struct Walk<'a> {
        code: &'a EvaluationCode,
        field: &'a FieldSpec,
        w_max: usize,
        budget: u64,
        work: &'a AtomicU64,
        exhausted: &'a AtomicBool,
        stack: Vec<usize>,
        found: BTreeMap<usize, Vec<usize>>,
        local: u64,
    }

    impl Walk<'_> {
        fn tick(&mut self) -> bool {
            self.local += 1;
            let total = self.work.load(Ordering::Relaxed) + self.local;
            if total > self.budget {
                self.exhausted.store(true, Ordering::Relaxed);
            }
            if self.local == 4096 {
                self.work.fetch_add(self.local, Ordering::Relaxed);
                self.local = 0;
            }
            !self.exhausted.load(Ordering::Relaxed)
        }

        fn descend(&mut self, basis: &mut EchelonBasis) {
            let last = *self.stack.last().expect("nonempty");
            for j in last + 1..self.code.n() {
                if !self.tick() {
                    return;
                }
                let col = self.code.column(j);
                if basis.insert(self.field, col) {
                    if self.stack.len() + 1 < self.w_max {
                        self.stack.push(j);
                        self.descend(basis);
                        self.stack.pop();
                    }
                    basis.pop();
                } else {
                    let mut set = self.stack.clone();
                    set.push(j);
                    let circuit = circuit_in(self.code, &set);
                    self.found.entry(circuit.len()).or_insert(circuit);
                }
            }
        }
    }

    let per_first: Vec<BTreeMap<usize, Vec<usize>>> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut found = BTreeMap::new();
            let col = code.column(first);
            if col.iter().all(|c| c.is_zero()) {
                found.insert(1, vec![first]);
                return found;
            }
            if w_max < 2 {
                return found;
            }
            let mut basis = EchelonBasis::new(code.r());
            basis.insert(field, col);
            let mut walk = Walk {
                code,
                field,
                w_max,
                budget,
                work: &work,
                exhausted: &exhausted,
                stack: vec![first],
                found,
                local: 0,
            };
            walk.descend(&mut basis);
            work.fetch_add(walk.local, Ordering::Relaxed);
            walk.found
        })
        .collect();

    let mut first_per_weight: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for f in per_first {
        for (w, s) in f {
            first_per_weight.entry(w).or_insert(s);
        }
    }
    let witnesses = first_per_weight
        .values()
        .map(|s| full_support_kernel_count(code, s))
        .collect::<Result<Vec<_>>>()?;
    let exhausted = exhausted.load(Ordering::Relaxed);
    Ok(SearchOutcome {
        strategy: Strategy::Exhaustive,
        w_max,
        min_weight_found: first_per_weight.keys().next().copied(),
        absent_up_to: (!exhausted).then_some(w_max),
        witnesses,
        budget_exhausted: exhausted,
        work: work.load(Ordering::Relaxed),
        counts: BTreeMap::new(),
    })
}

/// The circuit inside a minimally dependent extension of an independent set.
fn circuit_in(code: &EvaluationCode, set: &[usize]) -> Vec<usize> {
    let cols: Vec<&[Fe]> = set.iter().map(|&i| code.column(i)).collect();
    let ker = kernel_basis(code.field(), &Matrix::from_columns(&cols));
    let v = &ker[0];
    set.iter().zip(v).filter(|(_, c)| !c.is_zero()).map(|(&i, _)| i).collect()
}

fn for_each_weighted_subset(
    code: &EvaluationCode,
    first: usize,
    size: usize,
    lead_is_one: bool,
    mut f: impl FnMut(&[usize], &[Fe], &[Fe]),
) {
    let field = code.field();
    let n = code.n();
    let units: Vec<Fe> = field.elements().filter(|c| !c.is_zero()).collect();
    let rest = n - first - 1;
    if size == 0 || size - 1 > rest {
        return;
    }
    for pick in Combinations::new(rest, size - 1) {
        let mut idx = Vec::with_capacity(size);
        idx.push(first);
        idx.extend(pick.iter().map(|&k| first + 1 + k));
        let free = if lead_is_one { size - 1 } else { size };
        let mut digits = vec![0usize; free];
        loop {
            let mut coeffs = Vec::with_capacity(size);
            if lead_is_one {
                coeffs.push(Fe::ONE);
            }
            coeffs.extend(digits.iter().map(|&d| units[d]));
            let mut s = vec![Fe::ZERO; code.r()];
            for (&i, &c) in idx.iter().zip(&coeffs) {
                for (acc, &h) in s.iter_mut().zip(code.column(i)) {
                    *acc = field.add(*acc, field.mul(h, c));
                }
            }
            f(&idx, &coeffs, &s);
            let mut k = 0;
            while k < free {
                digits[k] += 1;
                if digits[k] < units.len() {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
            if k == free {
                break;
            }
        }
    }
}

/// Exact `A_w / (q - 1)` for each `w <= w_max` by matching the syndromes of
/// the lower half of a support (leading coefficient one) against the
/// negated syndromes of the upper half.
fn mitm_search(code: &EvaluationCode, w_max: usize, budget: u64) -> Result<SearchOutcome> {
    let field = code.field();
    let n = code.n() as u128;
    let units = field.order() as u128 - 1;
    let mut counts = BTreeMap::new();
    let mut witnesses = Vec::new();
    let mut work = 0u64;
    let mut exhausted = false;
    let mut absent = Some(0usize);

    for w in 1..=w_max {
        let w1 = w / 2;
        let w2 = w - w1;
        let size = |k: usize, lead: bool| {
            binomial(n as u64, k as u64).saturating_mul(units.saturating_pow(k.saturating_sub(lead as usize) as u32))
        };
        let est = size(w1, true).saturating_add(size(w2, w1 == 0));
        if est > budget.saturating_sub(work) as u128 {
            exhausted = true;
            break;
        }
        work += est as u64;

        let (count, wit) = if w1 == 0 {
            let zero: Vec<usize> = (0..code.n())
                .filter(|&j| code.column(j).iter().all(|c| c.is_zero()))
                .collect();
            (zero.len() as u128, zero.first().map(|&j| vec![j]))
        } else {
            // lower halves sorted by (syndrome, max index)
            let mut left: Vec<(Vec<Fe>, usize, Vec<usize>)> = (0..code.n())
                .into_par_iter()
                .flat_map_iter(|first| {
                    let mut v = Vec::new();
                    for_each_weighted_subset(code, first, w1, true, |idx, _, s| {
                        v.push((s.to_vec(), *idx.last().expect("nonempty"), idx.to_vec()));
                    });
                    v
                })
                .collect();
            left.par_sort_unstable_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
            let per_first: Vec<(u128, Option<Vec<usize>>)> = (0..code.n())
                .into_par_iter()
                .map(|first| {
                    let mut total = 0u128;
                    let mut wit = None;
                    for_each_weighted_subset(code, first, w2, false, |idx, _, s| {
                        let target: Vec<Fe> = s.iter().map(|&c| field.neg(c)).collect();
                        let lo = left.partition_point(|e| e.0 < target);
                        let hi = left[lo..].partition_point(|e| e.0 == target) + lo;
                        let below = left[lo..hi].partition_point(|e| e.1 < first);
                        total += below as u128;
                        if below > 0 && wit.is_none() {
                            let mut support = left[lo].2.clone();
                            support.extend_from_slice(idx);
                            wit = Some(support);
                        }
                    });
                    (total, wit)
                })
                .collect();
            let total: u128 = per_first.iter().map(|p| p.0).sum();
            (total, per_first.into_iter().find_map(|p| p.1))
        };
        let a_w = count * units;
        counts.insert(w, a_w.to_string());
        if let Some(s) = wit {
            witnesses.push(full_support_kernel_count(code, &s)?);
        }
        if a_w == 0 && absent == Some(w - 1) {
            absent = Some(w);
        }
    }
    Ok(SearchOutcome {
        strategy: Strategy::MeetInMiddle,
        w_max,
        min_weight_found: witnesses.iter().map(|w| w.support.len()).min(),
        absent_up_to: absent.filter(|&a| a > 0),
        witnesses,
        budget_exhausted: exhausted,
        work,
        counts,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExclusionReport {
    pub d: usize,
    pub seed: u64,
    pub samples: u64,
    /// Samples drawn per mode: uniform, two y-values, three y-values, one y-value with distinct x.
    pub per_mode: [u64; 4],
    /// Supports whose columns were dependent and needed the full count.
    pub dependent_supports: u64,
    pub violations: Vec<Vec<usize>>,
}

const CHUNK: u64 = 10_000;

/// Samples supports of size `d` not contained in one vertical line
/// `X = x, Y = y` and records any that carry a full-support kernel vector.
/// Columns must be points `(x, y, z)`.
pub fn exclusion_sample(code: &EvaluationCode, d: usize, samples: u64, seed: u64) -> Result<ExclusionReport> {
    let pts = code.points();
    let mut by_y: BTreeMap<Fe, Vec<usize>> = BTreeMap::new();
    for (i, p) in pts.iter().enumerate() {
        by_y.entry(p[1]).or_default().push(i);
    }
    let fibres: Vec<&Vec<usize>> = by_y.values().filter(|v| !v.is_empty()).collect();
    let multi_x: Vec<&Vec<usize>> = fibres
        .iter()
        .copied()
        .filter(|v| v.iter().any(|&i| pts[i][0] != pts[v[0]][0]) && v.len() >= d)
        .collect();
    let mixed = |s: &[usize]| s.iter().any(|&i| pts[i][..2] != pts[s[0]][..2]);

    let draw = |rng: &mut ChaCha8Rng, mode: usize| -> Vec<usize> {
        loop {
            let s: Vec<usize> = match mode {
                0 => rand::seq::index::sample(rng, pts.len(), d).into_vec(),
                1 | 2 => {
                    let k = (mode + 1).min(d);
                    let chosen: Vec<&&Vec<usize>> = fibres.choose_multiple(rng, k).collect();
                    let mut s: Vec<usize> = chosen.iter().map(|f| *f.choose(rng).expect("nonempty")).collect();
                    let pool: Vec<usize> = chosen.iter().flat_map(|f| f.iter().copied()).filter(|i| !s.contains(i)).collect();
                    if pool.len() + s.len() < d {
                        continue;
                    }
                    s.extend(pool.choose_multiple(rng, d - s.len()));
                    s
                }
                _ => {
                    let f = multi_x.choose(rng).expect("a y-fibre with several x");
                    f.choose_multiple(rng, d).copied().collect()
                }
            };
            if mixed(&s) {
                let mut s = s;
                s.sort_unstable();
                return s;
            }
        }
    };

    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<([u64; 4], u64, Vec<Vec<usize>>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut per_mode = [0u64; 4];
            let mut dependent = 0u64;
            let mut bad = Vec::new();
            let count = CHUNK.min(samples - c * CHUNK);
            for t in 0..count {
                let mode = if multi_x.is_empty() { (t % 3) as usize } else { (t % 4) as usize };
                per_mode[mode] += 1;
                let s = draw(&mut rng, mode);
                let w = full_support_kernel_count(code, &s)?;
                if w.kernel_dim > 0 {
                    dependent += 1;
                }
                if w.full_support_count > 0 {
                    bad.push(s);
                }
            }
            Ok((per_mode, dependent, bad))
        })
        .collect::<Result<_>>()?;

    let mut per_mode = [0u64; 4];
    let mut dependent = 0;
    let mut violations = Vec::new();
    for (m, dep, bad) in parts {
        for k in 0..4 {
            per_mode[k] += m[k];
        }
        dependent += dep;
        violations.extend(bad);
    }
    Ok(ExclusionReport {
        d,
        seed,
        samples,
        per_mode,
        dependent_supports: dependent,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::av_code::{build_code, gk_code, MonomialBasis};
    use crate::ff_tower::make_field;
    use crate::gk_curve::CurveCtx;
    use crate::pg3_geometry::secant_census;
    use std::sync::Arc;

    fn toy() -> EvaluationCode {
        let f = Arc::new(make_field(2, 2, None).unwrap());
        let pts: Vec<Vec<Fe>> = f
            .elements()
            .flat_map(|x| f.elements().map(move |y| (x, y)))
            .filter(|&(x, y)| f.pow(y, 3) == f.add(f.pow(x, 2), x))
            .map(|(x, y)| vec![x, y])
            .collect();
        build_code(f, pts, MonomialBasis::new(vec![vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap()).unwrap()
    }

    /// Direct count: enumerate all vectors on the support with nonzero entries.
    fn naive_full_support(code: &EvaluationCode, support: &[usize]) -> u128 {
        let f = code.field();
        let units: Vec<Fe> = f.elements().filter(|c| !c.is_zero()).collect();
        let mut digits = vec![0usize; support.len()];
        let mut count = 0;
        loop {
            let mut u = vec![Fe::ZERO; code.n()];
            for (&i, &d) in support.iter().zip(&digits) {
                u[i] = units[d];
            }
            if code.is_dual_codeword(&u).unwrap() {
                count += 1;
            }
            let mut k = 0;
            while k < digits.len() {
                digits[k] += 1;
                if digits[k] < units.len() {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
            if k == digits.len() {
                return count;
            }
        }
    }

    #[test]
    fn inclusion_exclusion_matches_direct_count() {
        let c = toy();
        for w in 1..=6 {
            for s in Combinations::new(8, w) {
                let got = full_support_kernel_count(&c, &s).unwrap();
                assert_eq!(got.full_support_count, naive_full_support(&c, &s), "{s:?}");
                assert_eq!(got.full_support_count % 3, 0);
                if let Some(u) = got.embedded(8) {
                    assert!(c.is_dual_codeword(&u).unwrap());
                }
            }
        }
    }

    #[test]
    fn support_validation() {
        let c = toy();
        assert!(matches!(full_support_kernel_count(&c, &[]), Err(Error::InvalidSupport(_))));
        assert!(matches!(full_support_kernel_count(&c, &[0, 0]), Err(Error::InvalidSupport(_))));
        assert!(matches!(full_support_kernel_count(&c, &[8]), Err(Error::InvalidSupport(_))));
        let big: Vec<usize> = (0..17).collect();
        assert!(matches!(
            full_support_kernel_count(&c, &big),
            Err(Error::SupportTooLarge { size: 17, cap: 16 })
        ));
        assert_eq!(full_support_kernel_count(&c, &[3]).unwrap().full_support_count, 0);
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(closed_form_ad(3, 4), 22_014_720);
        assert_eq!(closed_form_ad(3, 5), 13_208_832);
        assert_eq!(closed_form_ad(3, 6), 4_402_944);
        assert_eq!(closed_form_ad(3, 8), 0);
        assert_eq!(closed_form_ad(4, 9), 5 * 960 * 4095 * 715);
        assert!(!lower_bound_ad(3, 7).in_range);
        assert!(lower_bound_ad(4, 9).in_range);
        assert_eq!(lower_bound_ad(3, 6).value, 4_402_944);
    }

    #[test]
    fn brute_force_agrees_with_dual_enumeration_on_toy() {
        let c = toy();
        let dist = dual_enumeration_aw(&c, 1 << 20).unwrap();
        assert_eq!(dist.total, 4u128.pow(5));
        assert_eq!(dist.distribution.iter().sum::<u128>(), dist.total);
        for w in 0..=8 {
            assert_eq!(brute_force_aw(&c, w, 1 << 20).unwrap().a_w, dist.distribution[w], "w = {w}");
            let jw = count_jw_solutions(&c, w, 1 << 20).unwrap();
            let expected = if w == 0 { 0 } else { dist.distribution[w] * factorial(w as u64).unwrap() };
            assert_eq!(jw, expected);
        }
        assert!(matches!(brute_force_aw(&c, 4, 10), Err(Error::BudgetExceeded { .. })));
    }

    fn random_code(seed: u64) -> EvaluationCode {
        let f = Arc::new(make_field(3, 2, None).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all: Vec<Vec<Fe>> = f
            .elements()
            .flat_map(|a| f.elements().map(move |b| vec![a, b]))
            .collect();
        let pts: Vec<Vec<Fe>> = all.choose_multiple(&mut rng, 9).cloned().collect();
        let basis = MonomialBasis::new(vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 1]]).unwrap();
        build_code(f, pts, basis).unwrap()
    }

    #[test]
    fn meet_in_middle_counts_match_enumeration() {
        for seed in 0..4 {
            let c = random_code(seed);
            let dist = dual_enumeration_aw(&c, 1 << 24).unwrap();
            let out = low_weight_search(&c, 6, Strategy::MeetInMiddle, None, &[]).unwrap();
            for w in 1..=6 {
                assert_eq!(out.counts[&w], dist.distribution[w].to_string(), "seed {seed} w {w}");
            }
            let first = (1..=6).find(|&w| dist.distribution[w] > 0);
            assert_eq!(out.min_weight_found, first);
            for wit in &out.witnesses {
                assert!(c.is_dual_codeword(&wit.embedded(c.n()).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn circuit_search_finds_minimum_distance() {
        for seed in 0..4 {
            let c = random_code(seed);
            let dist = dual_enumeration_aw(&c, 1 << 24).unwrap();
            let d = (1..=9).find(|&w| dist.distribution[w] > 0).unwrap();
            let out = low_weight_search(&c, 6, Strategy::Exhaustive, None, &[]).unwrap();
            assert_eq!(out.min_weight_found, Some(d));
            assert_eq!(out.absent_up_to, Some(d - 1));
            let short = low_weight_search(&c, d - 1, Strategy::Exhaustive, None, &[]).unwrap();
            assert!(short.witnesses.is_empty());
            assert_eq!(short.absent_up_to, Some(d - 1));
        }
        let c = random_code(0);
        let out = low_weight_search(&c, 6, Strategy::Exhaustive, Some(1), &[]).unwrap();
        assert!(out.budget_exhausted);
        assert_eq!(out.absent_up_to, None);
    }

    #[test]
    fn secant_subsets_at_ell_3() {
        let ctx = CurveCtx::new(3).unwrap();
        let census = secant_census(&ctx);
        let line = &census.vertical_secants().next().unwrap().points;
        for m in 2..=4u64 {
            let code = gk_code(&ctx, m);
            for size in 1..=m as usize + 2 {
                for pick in Combinations::new(line.len(), size) {
                    let s: Vec<usize> = pick.iter().map(|&k| line[k]).collect();
                    let w = full_support_kernel_count(&code, &s).unwrap();
                    let expected = if size == m as usize + 2 { 728 } else { 0 };
                    assert_eq!(w.full_support_count, expected);
                }
            }
        }
    }
}
