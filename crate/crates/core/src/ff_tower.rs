//! Exact arithmetic in a prime-power field `F_{p^n}`.
//!
//! The field is a single extension `F_p[t] / (f)` for a monic irreducible
//! `f` of degree `n`. Every subfield `F_{p^k}` (`k | n`) is handled as the
//! fixed set of the `k`-th Frobenius power rather than as a separate tower
//! level. Elements are packed base-`p` integers and arithmetic runs through
//! discrete-log tables, which is fine up to a few million elements.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const MAX_ORDER: u64 = 1 << 22;

const NO_LOG: u32 = u32::MAX;

/// A field element in polynomial basis, packed as `sum c_i p^i`.
///
/// The derived ordering compares packed values, i.e. coefficient tuples
/// lexicographically from the leading coefficient down to the constant term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fe(u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn packed(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Built-in moduli, constant term first.
pub fn default_modulus(p: u32, ext_degree: u32) -> Option<&'static [u32]> {
    match (p, ext_degree) {
        // t^2 + t + 1
        (2, 2) => Some(&[1, 1, 1]),
        // t^2 + 1
        (3, 2) => Some(&[1, 0, 1]),
        // t^6 + t^4 + t^3 + t + 1
        (2, 6) => Some(&[1, 1, 0, 1, 1, 0, 1]),
        // t^6 + 2t^4 + t^2 + 2t + 2
        (3, 6) => Some(&[2, 2, 1, 0, 2, 0, 1]),
        _ => None,
    }
}

/// Parses a comma-separated coefficient list, constant term first.
pub fn parse_modulus(text: &str) -> Result<Vec<u32>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| Error::InvalidField(format!("bad coefficient {s:?}")))
        })
        .collect()
}

/// Immutable description of `F_{p^n}` together with its arithmetic tables.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    ext_degree: u32,
    modulus: Vec<u32>,
    order: u32,
    /// `exp[k] = g^k`, stored twice over so that log sums need no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `zech[k] = log(1 + g^k)`.
    zech: Vec<u32>,
}

impl std::fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("ext_degree", &self.ext_degree)
            .field("modulus", &self.modulus)
            .finish()
    }
}

/// Serializable summary of a field: characteristic, degree, modulus, order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldSummary {
    pub p: u32,
    pub ext_degree: u32,
    pub modulus: Vec<u32>,
    pub order: u32,
}

/// Builds and validates `F_{p^ext_degree}`. Without an explicit modulus the
/// built-in default for `(p, ext_degree)` is used.
pub fn make_field(p: u32, ext_degree: u32, modulus: Option<&[u32]>) -> Result<FieldSpec> {
    if !is_prime(p as u64) {
        return Err(Error::InvalidField(format!("{p} is not prime")));
    }
    if ext_degree == 0 {
        return Err(Error::InvalidField("extension degree must be positive".into()));
    }
    let order = (p as u64)
        .checked_pow(ext_degree)
        .filter(|&q| q <= MAX_ORDER)
        .ok_or_else(|| Error::InvalidField(format!("order {p}^{ext_degree} is too large")))?;
    let modulus = match modulus {
        Some(m) => m.to_vec(),
        None => default_modulus(p, ext_degree)
            .ok_or(Error::UnsupportedSize { p, ext_degree })?
            .to_vec(),
    };
    if modulus.len() != ext_degree as usize + 1 {
        return Err(Error::InvalidField(format!(
            "modulus must have {} coefficients, got {}",
            ext_degree + 1,
            modulus.len()
        )));
    }
    if modulus.iter().any(|&c| c >= p) || modulus[ext_degree as usize] != 1 {
        return Err(Error::InvalidField(
            "modulus must be monic with coefficients reduced mod p".into(),
        ));
    }
    if !fp_poly::is_irreducible(&modulus, p) {
        return Err(Error::ReducibleModulus { p });
    }
    Ok(FieldSpec::with_tables(p, ext_degree, modulus, order as u32))
}

impl FieldSpec {
    fn with_tables(p: u32, ext_degree: u32, modulus: Vec<u32>, order: u32) -> Self {
        let n = ext_degree as usize;
        let q1 = order - 1;
        let gen = primitive_element(p, n, &modulus, order);

        let mut exp = vec![0u32; 2 * q1 as usize];
        let mut log = vec![NO_LOG; order as usize];
        let mut cur = vec![1u32];
        for k in 0..q1 {
            let packed = pack(&cur, p);
            exp[k as usize] = packed;
            exp[(k + q1) as usize] = packed;
            log[packed as usize] = k;
            cur = fp_poly::mul_mod(&cur, &gen, &modulus, p);
        }

        let mut zech = vec![NO_LOG; q1 as usize];
        for k in 0..q1 {
            let v = exp[k as usize];
            let c0 = v % p;
            let w = v - c0 + (c0 + 1) % p;
            if w != 0 {
                zech[k as usize] = log[w as usize];
            }
        }

        FieldSpec {
            p,
            ext_degree,
            modulus,
            order,
            exp,
            log,
            zech,
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn ext_degree(&self) -> u32 {
        self.ext_degree
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn summary(&self) -> FieldSummary {
        FieldSummary {
            p: self.p,
            ext_degree: self.ext_degree,
            modulus: self.modulus.clone(),
            order: self.order,
        }
    }

    pub fn zero(&self) -> Fe {
        Fe::ZERO
    }

    pub fn one(&self) -> Fe {
        Fe::ONE
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.order).map(Fe)
    }

    /// Element from a coefficient list, constant term first.
    pub fn element(&self, coeffs: &[u32]) -> Result<Fe> {
        if coeffs.len() > self.ext_degree as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidField(format!(
                "coefficients {coeffs:?} do not describe an element"
            )));
        }
        Ok(Fe(pack(coeffs, self.p)))
    }

    /// Element from its packed representation.
    pub fn from_packed(&self, packed: u32) -> Result<Fe> {
        if packed >= self.order {
            return Err(Error::InvalidField(format!("packed value {packed} out of range")));
        }
        Ok(Fe(packed))
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p as i64) as u32)
    }

    /// Coefficient tuple of length `ext_degree`, constant term first.
    pub fn coeffs(&self, a: Fe) -> Vec<u32> {
        let mut v = a.0;
        (0..self.ext_degree)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let q1 = self.order - 1;
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let diff = if lb >= la { lb - la } else { lb + q1 - la };
        match self.zech[diff as usize] {
            NO_LOG => Fe::ZERO,
            z => Fe(self.exp[(la + z) as usize]),
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if self.p == 2 || a.0 == 0 {
            return a;
        }
        let half = (self.order - 1) / 2;
        Fe(self.exp[(self.log[a.0 as usize] + half) as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        Fe(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let q1 = self.order - 1;
        Ok(Fe(self.exp[((q1 - self.log[a.0 as usize]) % q1) as usize]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`, with `a^0 = 1` for every `a` (including zero).
    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.0 == 0 {
            return Fe::ZERO;
        }
        let q1 = (self.order - 1) as u64;
        let l = self.log[a.0 as usize] as u64 * (e % q1) % q1;
        Fe(self.exp[l as usize])
    }

    /// `a^(p^k)`.
    pub fn frobenius(&self, a: Fe, k: u32) -> Fe {
        let q1 = (self.order - 1) as u64;
        self.pow(a, mod_pow(self.p as u64, k as u64, q1) + q1)
    }

    /// Whether `a` lies in the subfield `F_{p^k}`.
    pub fn in_subfield(&self, a: Fe, k: u32) -> Result<bool> {
        if k == 0 || !self.ext_degree.is_multiple_of(k) {
            return Err(Error::InvalidSubfield {
                p: self.p,
                k,
                ext_degree: self.ext_degree,
            });
        }
        Ok(self.frobenius(a, k) == a)
    }

    /// Evaluates a polynomial given by coefficients (constant term first).
    pub fn eval_poly(&self, poly: &[Fe], x: Fe) -> Fe {
        poly.iter()
            .rev()
            .fold(Fe::ZERO, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// All roots in the field, by exhaustive evaluation.
    pub fn roots(&self, poly: &[Fe]) -> Result<Vec<Fe>> {
        if poly.iter().all(|c| c.is_zero()) {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self
            .elements()
            .filter(|&x| self.eval_poly(poly, x).is_zero())
            .collect())
    }

    pub fn sum(&self, items: impl IntoIterator<Item = Fe>) -> Fe {
        items.into_iter().fold(Fe::ZERO, |acc, x| self.add(acc, x))
    }
}

fn pack(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn unpack(mut v: u32, p: u32, n: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(v % p);
        v /= p;
    }
    fp_poly::trim(&mut out);
    out
}

fn primitive_element(p: u32, n: usize, modulus: &[u32], order: u32) -> Vec<u32> {
    let q1 = (order - 1) as u64;
    let factors = prime_factors(q1);
    for candidate in 1..order {
        let g = unpack(candidate, p, n);
        let ok = factors.iter().all(|&r| {
            let h = fp_poly::pow_mod(&g, q1 / r, modulus, p);
            h != [1]
        });
        if ok {
            return g;
        }
    }
    unreachable!("the multiplicative group of a finite field is cyclic")
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn mod_pow(base: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut b = base % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Dense polynomials over `F_p`, constant term first, no trailing zeros.
pub(crate) mod fp_poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let mut out: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
        trim(&mut out);
        out
    }

    /// Remainder of `a` modulo a nonzero `b`.
    pub fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = inv_mod_p(b[db], p);
        while r.len() > db {
            let shift = r.len() - 1 - db;
            let c = (r[r.len() - 1] as u64 * lead_inv as u64 % p as u64) as u32;
            for (i, &bc) in b.iter().enumerate() {
                let t = (c as u64 * bc as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn pow_mod(a: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut acc = vec![1u32];
        let mut base = rem(a, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &base, m, p);
            }
            base = mul_mod(&base, &base, m, p);
            e >>= 1;
        }
        acc
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut out: Vec<u32> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    pub fn inv_mod_p(a: u32, p: u32) -> u32 {
        // Fermat; p is prime
        let mut acc = 1u64;
        let mut b = a as u64 % p as u64;
        let mut e = p as u64 - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        acc as u32
    }

    /// Rabin-style test: a monic `f` of degree `n` is irreducible iff
    /// `gcd(f, t^(p^i) - t) = 1` for every `i <= n/2`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let n = f.len() - 1;
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let t = vec![0, 1];
        let mut h = t.clone();
        for _ in 1..=n / 2 {
            h = pow_mod(&h, p as u64, f, p);
            let g = gcd(f, &sub(&h, &t, p), p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Trial division by every monic polynomial of degree 1..=n/2.
    fn irreducible_by_trial_division(f: &[u32], p: u32) -> bool {
        let n = f.len() - 1;
        for d in 1..=n / 2 {
            let count = (p as u64).pow(d as u32);
            for idx in 0..count {
                let mut g: Vec<u32> = (0..d)
                    .map(|i| ((idx / (p as u64).pow(i as u32)) % p as u64) as u32)
                    .collect();
                g.push(1);
                if fp_poly::rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    fn f64_field() -> FieldSpec {
        make_field(2, 6, None).unwrap()
    }

    #[test]
    fn default_moduli_are_irreducible_by_trial_division() {
        assert!(irreducible_by_trial_division(default_modulus(2, 6).unwrap(), 2));
        assert!(irreducible_by_trial_division(default_modulus(3, 6).unwrap(), 3));
        assert_eq!(f64_field().order(), 64);
        assert_eq!(make_field(3, 6, None).unwrap().order(), 729);
    }

    #[test]
    fn reducible_and_unsupported_moduli_are_rejected() {
        assert_eq!(
            make_field(2, 6, Some(&[1, 0, 0, 0, 0, 0, 1])).unwrap_err(),
            Error::ReducibleModulus { p: 2 }
        );
        assert_eq!(
            make_field(5, 3, None).unwrap_err(),
            Error::UnsupportedSize { p: 5, ext_degree: 3 }
        );
        assert!(matches!(make_field(4, 2, None), Err(Error::InvalidField(_))));
        assert!(make_field(2, 2, Some(&[1, 1, 1])).is_ok());
    }

    #[test]
    fn rabin_test_agrees_with_trial_division() {
        for &(p, max_deg) in &[(2u32, 8usize), (3, 5)] {
            for deg in 1..=max_deg {
                let count = (p as u64).pow(deg as u32);
                for idx in 0..count {
                    let mut f: Vec<u32> = (0..deg)
                        .map(|i| ((idx / (p as u64).pow(i as u32)) % p as u64) as u32)
                        .collect();
                    f.push(1);
                    assert_eq!(
                        fp_poly::is_irreducible(&f, p),
                        irreducible_by_trial_division(&f, p),
                        "{f:?} over F_{p}"
                    );
                }
            }
        }
    }

    #[test]
    fn table_multiplication_matches_polynomial_multiplication() {
        for (p, n) in [(2u32, 6u32), (3, 6)] {
            let f = make_field(p, n, None).unwrap();
            let step = if p == 2 { 1 } else { 7 };
            for a in f.elements().step_by(step) {
                for b in f.elements().step_by(step) {
                    let slow = fp_poly::mul_mod(
                        &unpack(a.packed(), p, n as usize),
                        &unpack(b.packed(), p, n as usize),
                        f.modulus(),
                        p,
                    );
                    assert_eq!(f.mul(a, b).packed(), pack(&slow, p));
                    let sum: Vec<u32> = f
                        .coeffs(a)
                        .iter()
                        .zip(f.coeffs(b))
                        .map(|(x, y)| (x + y) % p)
                        .collect();
                    assert_eq!(f.coeffs(f.add(a, b)), sum);
                }
            }
        }
    }

    #[test]
    fn identities_and_inverses() {
        let f = f64_field();
        for a in f.elements() {
            assert_eq!(f.add(a, Fe::ZERO), a);
            assert_eq!(f.sub(a, a), Fe::ZERO);
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
                assert_eq!(f.pow(a, 63), Fe::ONE);
            }
            assert_eq!(f.pow(a, 64), a);
        }
        assert_eq!(f.inv(Fe::ZERO), Err(Error::DivisionByZero));
        let g = make_field(3, 6, None).unwrap();
        for a in g.elements() {
            assert_eq!(g.add(a, g.neg(a)), Fe::ZERO);
            assert_eq!(g.pow(a, 729), a);
        }
    }

    #[test]
    fn field_axioms_on_all_pairs_and_sampled_triples() {
        let f = f64_field();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in f.elements().step_by(5) {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                }
            }
        }
    }

    #[test]
    fn frobenius_is_a_ring_homomorphism() {
        let f = f64_field();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.frobenius(f.add(a, b), 1), f.add(f.frobenius(a, 1), f.frobenius(b, 1)));
                assert_eq!(f.frobenius(f.mul(a, b), 1), f.mul(f.frobenius(a, 1), f.frobenius(b, 1)));
            }
            assert_eq!(f.frobenius(a, 1), f.mul(a, a));
        }
    }

    #[test]
    fn subfields_have_the_right_size_and_are_closed() {
        let f = f64_field();
        let count = |k| f.elements().filter(|&a| f.in_subfield(a, k).unwrap()).count();
        assert_eq!(count(1), 2);
        assert_eq!(count(2), 4);
        assert_eq!(count(3), 8);
        assert_eq!(count(6), 64);
        assert!(f.in_subfield(Fe::ZERO, 2).unwrap());
        assert!(matches!(f.in_subfield(Fe::ONE, 4), Err(Error::InvalidSubfield { .. })));

        let g = make_field(3, 6, None).unwrap();
        let f9: Vec<Fe> = g.elements().filter(|&a| g.in_subfield(a, 2).unwrap()).collect();
        assert_eq!(f9.len(), 9);
        for &a in &f9 {
            for &b in &f9 {
                assert!(f9.contains(&g.add(a, b)));
                assert!(f9.contains(&g.mul(a, b)));
            }
        }
    }

    #[test]
    fn root_finding() {
        let f = f64_field();
        let roots = f.roots(&[Fe::ZERO, Fe::ONE, Fe::ONE]).unwrap();
        assert_eq!(roots, vec![Fe::ZERO, Fe::ONE]);
        assert_eq!(f.roots(&[Fe::ZERO, Fe::ZERO]), Err(Error::ZeroPolynomial));

        // z^3 = c: 3 | 63, so each nonzero c has 0 or 3 cube roots
        for c in f.elements().skip(1) {
            let n = f.roots(&[f.neg(c), Fe::ZERO, Fe::ZERO, Fe::ONE]).unwrap().len();
            assert!(n == 0 || n == 3, "c = {c:?} has {n} cube roots");
        }
        // x^2 + x = c is additive with kernel {0, 1}
        for c in f.elements() {
            let n = f.roots(&[f.neg(c), Fe::ONE, Fe::ONE]).unwrap().len();
            assert!(n == 0 || n == 2);
        }
    }

    #[test]
    fn coefficient_round_trip_and_parsing() {
        let f = make_field(3, 6, None).unwrap();
        for a in f.elements().step_by(11) {
            assert_eq!(f.element(&f.coeffs(a)).unwrap(), a);
        }
        assert_eq!(parse_modulus("1, 1,0,1,1,0,1").unwrap(), vec![1, 1, 0, 1, 1, 0, 1]);
        assert!(parse_modulus("1,x").is_err());
        assert_eq!(f.from_int(-1), f.neg(Fe::ONE));
    }
}
