//! Exact arithmetic in GF(p^n).
//!
//! Elements are packed as integers: the coefficient vector `c0 + c1 X + ...`
//! of the polynomial representative is stored as `c0 + c1 p + c2 p^2 + ...`.
//! That integer is also the deterministic element order used whenever a
//! "smallest" element is requested.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported field order. Elements are packed into a `u16`.
pub const MAX_ORDER: u32 = 1 << 16;

/// Fields up to this order get a precomputed addition table.
const ADD_TABLE_LIMIT: u32 = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("field degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{n} exceeds the supported limit {MAX_ORDER}")]
    TooLarge { p: u32, n: u32 },
    #[error("operands belong to different fields")]
    Mismatch,
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("zero has no multiplicative order")]
    ZeroOrder,
    #[error("{0} does not encode an element of the field")]
    OutOfRange(u32),
    #[error("cannot parse field element `{0}`")]
    Parse(String),
}

/// A raw field element. Only meaningful together with the [`Field`] that produced it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe(u16);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    /// The packed integer encoding `sum c_i p^i`.
    #[inline]
    pub fn index(self) -> u32 {
        self.0 as u32
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    p: u32,
    n: u32,
    q: u32,
    /// Monic modulus, constant term first, length n + 1.
    modulus: Vec<u32>,
    /// exp[i] = g^i for i in 0..2(q-1), g the smallest primitive element.
    exp: Vec<u16>,
    /// log[a] for a != 0.
    log: Vec<u32>,
    add: Option<Vec<u16>>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    generator: Fe,
}

/// The field GF(p^n) with a fixed modulus (the `FieldSpec`).
///
/// Cloning is cheap; all clones share the same lookup tables.
#[derive(Clone)]
pub struct Field(Arc<Tables>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.n == other.0.n && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}; modulus {:?})", self.0.p, self.0.n, self.0.modulus)
    }
}

/// Serialized form of a field: `{p, n, modulus}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub n: u32,
    pub modulus: Vec<u32>,
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime divisors, ascending.
pub fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// Dense polynomial helpers over Z_p, constant term first. Used only while
// building tables, so clarity wins over speed here.

fn poly_trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let t = (lead as u64 * c as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
        }
        r.pop();
    }
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    poly_trim(poly_rem(&prod, m, p))
}

fn digits(mut v: u32, p: u32, n: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        out.push(v % p);
        v /= p;
    }
    out
}

fn undigits(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Monic polynomial of degree `deg` whose lower coefficients are the base-p digits of `code`.
fn monic_from_code(code: u32, p: u32, deg: u32) -> Vec<u32> {
    let mut c = digits(code, p, deg);
    c.push(1);
    c
}

/// Brute-force irreducibility: no monic factor of degree 1..=deg/2.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = (f.len() - 1) as u32;
    for d in 1..=deg / 2 {
        for code in 0..p.pow(d) {
            let g = monic_from_code(code, p, d);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Builds GF(p^n) with the smallest monic irreducible modulus of degree n,
/// where candidates are compared by their packed integer encoding.
/// For n = 1 the modulus is the placeholder `X`.
pub fn make_field(p: u32, n: u32) -> Result<Field, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if n == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let q = (p as u64).checked_pow(n).filter(|&q| q <= MAX_ORDER as u64);
    let q = q.ok_or(FieldError::TooLarge { p, n })? as u32;

    let modulus = if n == 1 {
        vec![0, 1]
    } else {
        (0..p.pow(n))
            .map(|code| monic_from_code(code, p, n))
            .find(|f| is_irreducible(f, p))
            .expect("an irreducible polynomial of every degree exists")
    };

    let mul_slow = |a: u32, b: u32| -> u32 {
        if n == 1 {
            (a as u64 * b as u64 % p as u64) as u32
        } else {
            let r = poly_mulmod(&digits(a, p, n), &digits(b, p, n), &modulus, p);
            undigits(&r, p)
        }
    };
    let pow_slow = |a: u32, mut e: u64| -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_slow(acc, base);
            }
            base = mul_slow(base, base);
            e >>= 1;
        }
        acc
    };

    let group = (q - 1) as u64;
    let factors = prime_factors(group);
    let generator = (1..q)
        .find(|&g| {
            if q == 2 {
                return true;
            }
            factors.iter().all(|&r| pow_slow(g, group / r) != 1)
        })
        .expect("the multiplicative group is cyclic");

    let mut exp = vec![0u16; 2 * (q as usize - 1).max(1)];
    let mut log = vec![0u32; q as usize];
    let mut cur = 1u32;
    for i in 0..(q - 1) as usize {
        exp[i] = cur as u16;
        log[cur as usize] = i as u32;
        cur = mul_slow(cur, generator);
    }
    for i in (q - 1) as usize..exp.len() {
        exp[i] = exp[i - (q - 1) as usize];
    }

    let add_digits = |a: u32, b: u32| -> u32 {
        let (da, db) = (digits(a, p, n), digits(b, p, n));
        let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
        undigits(&s, p)
    };
    let neg: Vec<u16> = (0..q)
        .map(|a| {
            let d: Vec<u32> = digits(a, p, n).iter().map(|&x| (p - x) % p).collect();
            undigits(&d, p) as u16
        })
        .collect();
    let add = (n > 1 && q <= ADD_TABLE_LIMIT).then(|| {
        let mut t = vec![0u16; (q * q) as usize];
        for a in 0..q {
            for b in 0..q {
                t[(a * q + b) as usize] = add_digits(a, b) as u16;
            }
        }
        t
    });

    let mut inv = vec![0u16; q as usize];
    for a in 1..q {
        inv[a as usize] = if n == 1 {
            inv_mod(a, p)
        } else {
            exp[((q - 1 - log[a as usize]) % (q - 1)) as usize]
        };
    }

    Ok(Field(Arc::new(Tables {
        p,
        n,
        q,
        modulus,
        exp,
        log,
        add,
        neg,
        inv,
        generator: Fe(generator as u16),
    })))
}

/// Extended Euclid on integers.
fn inv_mod(a: u32, p: u32) -> u16 {
    let (mut r0, mut r1) = (p as i64, a as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (s0, s1) = (s1, s0 - k * s1);
    }
    s0.rem_euclid(p as i64) as u16
}

impl Field {
    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.0.n
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { p: self.p(), n: self.n(), modulus: self.0.modulus.clone() }
    }

    /// Elements in the deterministic order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q()).map(|v| Fe(v as u16))
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Fe> {
        (1..self.q()).map(|v| Fe(v as u16))
    }

    pub fn elem(&self, index: u32) -> Result<Fe, FieldError> {
        if index < self.q() {
            Ok(Fe(index as u16))
        } else {
            Err(FieldError::OutOfRange(index))
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> Fe {
        Fe(v.rem_euclid(self.p() as i64) as u16)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fe, FieldError> {
        if coeffs.len() > self.n() as usize || coeffs.iter().any(|&c| c >= self.p()) {
            return Err(FieldError::Parse(format!("{coeffs:?}")));
        }
        Ok(Fe(undigits(coeffs, self.p()) as u16))
    }

    pub fn coeffs(&self, a: Fe) -> Vec<u32> {
        digits(a.index(), self.p(), self.n())
    }

    /// The polynomial variable `X` (equal to the integer `0` reduction when n = 1).
    pub fn x(&self) -> Fe {
        if self.n() == 1 {
            Fe(0)
        } else {
            Fe(self.p() as u16)
        }
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let t = &*self.0;
        if t.n == 1 {
            let s = a.0 as u32 + b.0 as u32;
            Fe(if s >= t.p { s - t.p } else { s } as u16)
        } else if t.p == 2 {
            Fe(a.0 ^ b.0)
        } else if let Some(add) = &t.add {
            Fe(add[(a.0 as u32 * t.q + b.0 as u32) as usize])
        } else {
            let (p, n) = (t.p, t.n);
            let (mut x, mut y, mut out, mut scale) = (a.0 as u32, b.0 as u32, 0u32, 1u32);
            for _ in 0..n {
                out += ((x % p + y % p) % p) * scale;
                x /= p;
                y /= p;
                scale *= p;
            }
            Fe(out as u16)
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.0.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        let t = &*self.0;
        if t.n == 1 {
            Fe((a.0 as u32 * b.0 as u32 % t.p) as u16)
        } else if a.0 == 0 || b.0 == 0 {
            Fe(0)
        } else {
            Fe(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
        }
    }

    /// `a0*b0 + a1*b1 + a2*b2`, the inner loop of every 3x3 product.
    #[inline]
    pub fn dot3(&self, a: [Fe; 3], b: [Fe; 3]) -> Fe {
        let t = &*self.0;
        if t.n == 1 {
            let s = a[0].0 as u64 * b[0].0 as u64
                + a[1].0 as u64 * b[1].0 as u64
                + a[2].0 as u64 * b[2].0 as u64;
            Fe((s % t.p as u64) as u16)
        } else {
            let s = self.add(self.mul(a[0], b[0]), self.mul(a[1], b[1]));
            self.add(s, self.mul(a[2], b[2]))
        }
    }

    #[inline]
    pub fn inv(&self, a: Fe) -> Result<Fe, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        Ok(Fe(self.0.inv[a.0 as usize]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Square-and-multiply power with a signed exponent. `0^0 = 1`; negative
    /// powers of zero are an error.
    pub fn pow(&self, a: Fe, e: i64) -> Result<Fe, FieldError> {
        let base = if e < 0 { self.inv(a)? } else { a };
        let mut e = e.unsigned_abs();
        let (mut acc, mut b) = (Fe::ONE, base);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        Ok(acc)
    }

    #[inline]
    pub fn pow_u(&self, a: Fe, e: u64) -> Fe {
        self.pow(a, e as i64).expect("non-negative exponent")
    }

    pub fn element_order(&self, a: Fe) -> Result<u64, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroOrder);
        }
        let mut order = (self.q() - 1) as u64;
        for r in prime_factors(order) {
            while order % r == 0 && self.pow_u(a, order / r) == Fe::ONE {
                order /= r;
            }
        }
        Ok(order)
    }

    /// Smallest element of multiplicative order q - 1.
    pub fn primitive_element(&self) -> Fe {
        self.0.generator
    }

    pub fn is_cube(&self, a: Fe) -> Result<bool, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroOrder);
        }
        let qm1 = (self.q() - 1) as u64;
        Ok(self.pow_u(a, qm1 / gcd(3, qm1)) == Fe::ONE)
    }

    /// Smallest element of multiplicative order exactly 3, if 3 | q - 1.
    pub fn primitive_cube_root(&self) -> Option<Fe> {
        if (self.q() - 1) % 3 != 0 {
            return None;
        }
        self.nonzero().find(|&a| self.element_order(a) == Ok(3))
    }

    /// `a^(p^k)`.
    pub fn frobenius(&self, a: Fe, k: u32) -> Fe {
        let k = k % self.n();
        let mut r = a;
        for _ in 0..k {
            r = self.pow_u(r, self.p() as u64);
        }
        r
    }

    /// Smallest `t` with `t^2 = a`.
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        self.elements().find(|&t| self.mul(t, t) == a)
    }

    /// Decimal for prime fields, `[c0,c1,...]` otherwise.
    pub fn format(&self, a: Fe) -> String {
        if self.n() == 1 {
            a.index().to_string()
        } else {
            let c: Vec<String> = self.coeffs(a).iter().map(|c| c.to_string()).collect();
            format!("[{}]", c.join(","))
        }
    }

    pub fn to_json(&self, a: Fe) -> serde_json::Value {
        if self.n() == 1 {
            serde_json::Value::from(a.index())
        } else {
            serde_json::Value::from(self.coeffs(a))
        }
    }

    /// Parses a decimal integer (reduced into the prime subfield, sign allowed)
    /// or a coefficient list `[c0,c1,...]`.
    pub fn parse(&self, s: &str) -> Result<Fe, FieldError> {
        let s = s.trim();
        let bad = || FieldError::Parse(s.to_string());
        if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let coeffs = inner
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<u32>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?;
            self.from_coeffs(&coeffs).map_err(|_| bad())
        } else {
            s.parse::<i64>().map(|v| self.from_int(v)).map_err(|_| bad())
        }
    }

    pub fn element(&self, value: Fe) -> FieldElement {
        FieldElement { field: self.clone(), value }
    }
}

/// A field element bundled with its field, for checked arithmetic across
/// values whose provenance is not statically known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    value: Fe,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn value(&self) -> Fe {
        self.value
    }

    fn same(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::Mismatch)
        }
    }

    fn wrap(&self, value: Fe) -> FieldElement {
        FieldElement { field: self.field.clone(), value }
    }

    pub fn add(&self, o: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same(o)?;
        Ok(self.wrap(self.field.add(self.value, o.value)))
    }

    pub fn sub(&self, o: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same(o)?;
        Ok(self.wrap(self.field.sub(self.value, o.value)))
    }

    pub fn mul(&self, o: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same(o)?;
        Ok(self.wrap(self.field.mul(self.value, o.value)))
    }

    pub fn neg(&self) -> FieldElement {
        self.wrap(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        Ok(self.wrap(self.field.inv(self.value)?))
    }

    pub fn pow(&self, e: i64) -> Result<FieldElement, FieldError> {
        Ok(self.wrap(self.field.pow(self.value, e)?))
    }

    pub fn order(&self) -> Result<u64, FieldError> {
        self.field.element_order(self.value)
    }

    pub fn is_cube(&self) -> Result<bool, FieldError> {
        self.field.is_cube(self.value)
    }

    pub fn frobenius(&self, k: u32) -> FieldElement {
        self.wrap(self.field.frobenius(self.value, k))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format(self.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32, n: u32) -> Field {
        make_field(p, n).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(make_field(6, 1).unwrap_err(), FieldError::NotPrime(6));
        assert_eq!(make_field(7, 0).unwrap_err(), FieldError::ZeroDegree);
        assert!(matches!(make_field(2, 17), Err(FieldError::TooLarge { .. })));
    }

    #[test]
    fn prime_field_basics() {
        let f = gf(7, 1);
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.inv(Fe(3)).unwrap(), Fe(5));
        assert_eq!(f.pow(Fe(3), 6).unwrap(), Fe::ONE);
        assert_eq!(f.inv(Fe::ZERO), Err(FieldError::ZeroInverse));
        assert_eq!(f.element_order(Fe(3)), Ok(6));
        assert_eq!(f.element_order(Fe(6)), Ok(2));
        assert_eq!(f.element_order(Fe::ZERO), Err(FieldError::ZeroOrder));
    }

    // Oracle: brute-force root test over every monic quadratic, candidates
    // visited in packed-integer order.
    fn smallest_irreducible_quadratic(p: u32) -> Vec<u32> {
        for c1 in 0..p {
            for c0 in 0..p {
                let has_root = (0..p).any(|t| (t * t + c1 * t + c0) % p == 0);
                if !has_root {
                    return vec![c0, c1, 1];
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn quadratic_moduli_match_brute_force() {
        assert_eq!(gf(2, 2).modulus(), &[1, 1, 1]);
        assert_eq!(gf(5, 2).modulus(), &[2, 0, 1]);
        for p in [2, 3, 5, 7, 11, 13] {
            assert_eq!(gf(p, 2).modulus(), smallest_irreducible_quadratic(p).as_slice());
        }
    }

    #[test]
    fn make_field_is_deterministic() {
        for (p, n) in [(2, 3), (3, 2), (5, 2), (2, 4), (3, 3)] {
            assert_eq!(gf(p, n).modulus(), gf(p, n).modulus());
            assert_eq!(gf(p, n), gf(p, n));
        }
    }

    #[test]
    fn gf4_products() {
        let f = gf(2, 2);
        let x = f.x();
        assert_eq!(f.mul(x, x), f.from_coeffs(&[1, 1]).unwrap());
        assert_eq!(f.element_order(x), Ok(3));
        assert_eq!(f.primitive_element(), x);
    }

    #[test]
    fn primitive_elements() {
        assert_eq!(gf(7, 1).primitive_element(), Fe(3));
        assert_eq!(gf(5, 1).primitive_element(), Fe(2));
        for (p, n) in [(5, 1), (7, 1), (2, 3), (3, 2), (5, 2), (13, 1)] {
            let f = gf(p, n);
            let g = f.primitive_element();
            assert_eq!(f.element_order(g), Ok((f.q() - 1) as u64));
            // nothing smaller is primitive
            for a in f.nonzero().take_while(|&a| a < g) {
                assert!(f.element_order(a).unwrap() < (f.q() - 1) as u64);
            }
        }
    }

    #[test]
    fn cubes_and_cube_roots() {
        let f = gf(7, 1);
        assert_eq!(f.is_cube(Fe(6)), Ok(true));
        assert_eq!(f.is_cube(Fe(3)), Ok(false));
        assert_eq!(f.primitive_cube_root(), Some(Fe(2)));
        assert_eq!(gf(13, 1).primitive_cube_root(), Some(Fe(3)));
        assert_eq!(gf(5, 1).primitive_cube_root(), None);
        let f5 = gf(5, 1);
        assert!(f5.nonzero().all(|a| f5.is_cube(a).unwrap()));
    }

    #[test]
    fn frobenius_closes_up() {
        let f = gf(5, 2);
        let x = f.x();
        assert_eq!(f.frobenius(x, 1), f.pow_u(x, 5));
        for a in f.elements() {
            assert_eq!(f.frobenius(f.frobenius(a, 1), 1), a);
            assert_eq!(f.frobenius(a, 2), a);
        }
        let g = gf(7, 1);
        assert!(g.elements().all(|a| g.frobenius(a, 3) == a));
    }

    // Exhaustive field laws for every q <= 49.
    #[test]
    fn exhaustive_small_field_laws() {
        for q in 2..=49u32 {
            let pf = prime_factors(q as u64);
            if pf.len() != 1 {
                continue;
            }
            let p = pf[0] as u32;
            let n = (q as f64).log(p as f64).round() as u32;
            let f = gf(p, n);
            let qm1 = (q - 1) as u64;
            let cubes: Vec<Fe> = f.nonzero().map(|y| f.pow_u(y, 3)).collect();
            for a in f.nonzero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
                assert_eq!(f.pow_u(a, qm1), Fe::ONE);
                assert_eq!(qm1 % f.element_order(a).unwrap(), 0);
                let by_power = f.pow_u(a, qm1 / gcd(3, qm1)) == Fe::ONE;
                assert_eq!(f.is_cube(a).unwrap(), by_power);
                assert_eq!(by_power, cubes.contains(&a));
            }
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
                for b in f.elements().step_by(3) {
                    assert_eq!(f.sub(f.add(a, b), b), a);
                    assert_eq!(f.dot3([a, b, a], [b, a, Fe::ONE]), {
                        let ab = f.mul(a, b);
                        f.add(f.add(ab, ab), a)
                    });
                }
            }
        }
    }

    #[test]
    fn checked_elements_reject_mixed_fields() {
        let a = gf(7, 1).element(Fe(3));
        let b = gf(5, 1).element(Fe(3));
        assert_eq!(a.add(&b), Err(FieldError::Mismatch));
        assert_eq!(a.mul(&a).unwrap().value(), Fe(2));
        assert_eq!(a.inv().unwrap().value(), Fe(5));
        assert_eq!(a.to_string(), "3");
    }

    #[test]
    fn parse_and_format() {
        let f = gf(5, 2);
        let a = f.from_coeffs(&[3, 4]).unwrap();
        assert_eq!(f.format(a), "[3,4]");
        assert_eq!(f.parse("[3,4]").unwrap(), a);
        assert_eq!(f.parse("-1").unwrap(), Fe(4));
        assert!(f.parse("[5]").is_err());
        assert_eq!(f.to_json(a), serde_json::json!([3, 4]));
        assert_eq!(gf(7, 1).to_json(Fe(3)), serde_json::json!(3));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn frobenius_is_multiplicative(a in 0u32..25, b in 0u32..25, k in 0u32..4) {
                let f = gf(5, 2);
                let (a, b) = (Fe(a as u16), Fe(b as u16));
                prop_assert_eq!(
                    f.frobenius(f.mul(a, b), k),
                    f.mul(f.frobenius(a, k), f.frobenius(b, k))
                );
                prop_assert_eq!(
                    f.frobenius(f.add(a, b), k),
                    f.add(f.frobenius(a, k), f.frobenius(b, k))
                );
            }

            #[test]
            fn gf8_distributes(a in 0u32..8, b in 0u32..8, c in 0u32..8) {
                let f = gf(2, 3);
                let (a, b, c) = (Fe(a as u16), Fe(b as u16), Fe(c as u16));
                prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            }
        }
    }
}
