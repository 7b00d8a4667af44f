//! Prime-field and quadratic-extension arithmetic.
//!
//! Everything here is small-characteristic arithmetic on `u64` residues: the
//! moduli the classification touches are well below `2^32`, so products fit in
//! `u64` without widening.
//!
//! Besides the plain field types this module houses the two number-theoretic
//! predicates the classification relies on:
//!
//! * [`s_set`]: residues `x` for which `M(x) = [[0, 1], [-1, x]]` has order
//!   dividing `n` but not `n / 2`;
//! * [`is_admissible`]: whether `4 - t_m^2 - t_n^2` is a square in `F_p`, where
//!   `t_m = xi + xi^-1` for a primitive `2 m_{p'}`-th root of unity `xi`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("matrix is singular over F_{p}")]
    SingularMatrix { p: u64 },
    #[error("S(n, p) is only defined for even n, got n = {0}")]
    OddExponent(u64),
    #[error("no element of order {k} in F_{p}^2: {k} does not divide p^2 - 1")]
    UnsupportedExtension { k: u64, p: u64 },
    #[error("xi + xi^-1 for m = {m} does not lie in F_{p}")]
    NotInPrimeField { m: u64, p: u64 },
    #[error("matrix order exceeded the bound {cap}")]
    OrderCapExceeded { cap: u64 },
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn ensure_odd_prime(p: u64) -> Result<(), FieldError> {
    if p > 2 && p < (1 << 31) && is_prime(p) {
        Ok(())
    } else {
        Err(FieldError::NotOddPrime(p))
    }
}

/// Prime factorisation as `(prime, exponent)` pairs in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Largest power of `p` dividing `m` (the `p`-part `m_p`).
pub fn p_part(m: u64, p: u64) -> u64 {
    m / p_prime_part(m, p)
}

/// Largest divisor of `m` coprime to `p` (the `p'`-part `m_{p'}`).
pub fn p_prime_part(mut m: u64, p: u64) -> u64 {
    if m == 0 {
        return 0;
    }
    while m % p == 0 {
        m /= p;
    }
    m
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Inverse modulo `p` by the extended Euclidean algorithm; `None` for zero.
pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let (mut old_r, mut r) = ((a % p) as i64, p as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(p as i64) as u64)
}

/// Element of the prime field `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpElement {
    value: u64,
    modulus: u64,
}

impl FpElement {
    /// Reduces `value` into `[0, p)`; negative inputs are taken modulo `p`.
    pub fn new(value: i64, p: u64) -> Self {
        Self {
            value: value.rem_euclid(p as i64) as u64,
            modulus: p,
        }
    }

    pub fn from_u64(value: u64, p: u64) -> Self {
        Self {
            value: value % p,
            modulus: p,
        }
    }

    pub fn zero(p: u64) -> Self {
        Self::from_u64(0, p)
    }

    pub fn one(p: u64) -> Self {
        Self::from_u64(1, p)
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, exp: u64) -> Self {
        Self::from_u64(pow_mod(self.value, exp, self.modulus), self.modulus)
    }

    pub fn inv(self) -> Option<Self> {
        inv_mod(self.value, self.modulus).map(|v| Self::from_u64(v, self.modulus))
    }
}

impl fmt::Display for FpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FpElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Self::from_u64(self.value + rhs.value, self.modulus)
    }
}

impl Sub for FpElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Self::from_u64(self.value + self.modulus - rhs.value, self.modulus)
    }
}

impl Mul for FpElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Self::from_u64(self.value * rhs.value, self.modulus)
    }
}

impl Neg for FpElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_u64(self.modulus - self.value, self.modulus)
    }
}

/// Euler's criterion; zero counts as a square.
pub fn quadratic_residue(x: FpElement) -> bool {
    x.is_zero() || x.pow((x.modulus - 1) / 2).value == 1
}

/// Smallest positive quadratic non-residue modulo an odd prime.
pub fn smallest_non_residue(p: u64) -> u64 {
    (2..p)
        .find(|&c| !quadratic_residue(FpElement::from_u64(c, p)))
        .expect("every odd prime has a non-residue")
}

/// Element `a + b*delta` of `F_{p^2}`, where `delta^2` is the smallest
/// non-residue mod `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp2Element {
    a: FpElement,
    b: FpElement,
    delta_sq: u64,
}

impl Fp2Element {
    pub fn new(a: u64, b: u64, p: u64) -> Self {
        Self {
            a: FpElement::from_u64(a, p),
            b: FpElement::from_u64(b, p),
            delta_sq: smallest_non_residue(p),
        }
    }

    fn with_parts(&self, a: FpElement, b: FpElement) -> Self {
        Self {
            a,
            b,
            delta_sq: self.delta_sq,
        }
    }

    pub fn one(p: u64) -> Self {
        Self::new(1, 0, p)
    }

    pub fn real(&self) -> FpElement {
        self.a
    }

    pub fn delta_part(&self) -> FpElement {
        self.b
    }

    pub fn modulus(&self) -> u64 {
        self.a.modulus()
    }

    pub fn non_residue(&self) -> u64 {
        self.delta_sq
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.value() == 1 && self.b.is_zero()
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let mut acc = Self::one(self.modulus());
        let mut base = self;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }

    /// `(a + b delta)^-1 = (a - b delta) / (a^2 - b^2 delta^2)`.
    pub fn inv(self) -> Option<Self> {
        let p = self.modulus();
        let norm = self.a * self.a - self.b * self.b * FpElement::from_u64(self.delta_sq, p);
        let n_inv = norm.inv()?;
        Some(self.with_parts(self.a * n_inv, -self.b * n_inv))
    }

    /// Multiplicative order; `None` for zero.
    pub fn order(self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let p = self.modulus();
        let mut ord = p * p - 1;
        for (prime, _) in prime_factors(ord) {
            while ord % prime == 0 && self.pow(ord / prime).is_one() {
                ord /= prime;
            }
        }
        Some(ord)
    }
}

impl Add for Fp2Element {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.with_parts(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Mul for Fp2Element {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let d = FpElement::from_u64(self.delta_sq, self.modulus());
        self.with_parts(
            self.a * rhs.a + self.b * rhs.b * d,
            self.a * rhs.b + self.b * rhs.a,
        )
    }
}

impl fmt::Display for Fp2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*d", self.a, self.b)
    }
}

/// First generator of `F_{p^2}^*` in the scan order `b = 0, 1, ...; a = 0, 1, ...`.
pub fn multiplicative_generator(p: u64) -> Fp2Element {
    let full = p * p - 1;
    for b in 0..p {
        for a in 0..p {
            let g = Fp2Element::new(a, b, p);
            if g.order() == Some(full) {
                return g;
            }
        }
    }
    unreachable!("F_(p^2)^* is cyclic")
}

/// An element of multiplicative order exactly `k` in `F_{p^2}`.
pub fn root_of_unity(k: u64, p: u64) -> Result<Fp2Element, FieldError> {
    ensure_odd_prime(p)?;
    let full = p * p - 1;
    if k == 0 || full % k != 0 {
        return Err(FieldError::UnsupportedExtension { k, p });
    }
    Ok(multiplicative_generator(p).pow(full / k))
}

fn trace_of_root(m: u64, p: u64) -> Result<Fp2Element, FieldError> {
    let k = 2 * p_prime_part(m, p);
    let xi = root_of_unity(k, p)?;
    let inv = xi.inv().expect("roots of unity are invertible");
    Ok(xi + inv)
}

/// `xi_m + xi_m^-1` for a primitive `2 m_{p'}`-th root `xi_m`, as an element of
/// `F_p`. Fails when the trace has a nonzero `delta` component, which happens
/// exactly when `2 m_{p'}` divides neither `p - 1` nor `p + 1`.
pub fn trace_term(m: u64, p: u64) -> Result<FpElement, FieldError> {
    let t = trace_of_root(m, p)?;
    if !t.delta_part().is_zero() {
        return Err(FieldError::NotInPrimeField { m, p });
    }
    Ok(t.real())
}

/// `(xi_m + xi_m^-1)^2`. Unlike [`trace_term`] this lies in `F_p` whenever
/// `m_{p'}` divides `p - 1` or `p + 1`, even if the trace itself does not.
pub fn trace_square(m: u64, p: u64) -> Result<FpElement, FieldError> {
    let t = trace_of_root(m, p)?;
    let sq = t * t;
    if !sq.delta_part().is_zero() {
        return Err(FieldError::NotInPrimeField { m, p });
    }
    Ok(sq.real())
}

/// Whether `{m, n}` is a `p`-admissible set.
pub fn is_admissible(m: u64, n: u64, p: u64) -> Result<bool, FieldError> {
    let four = FpElement::from_u64(4, p);
    let value = four - trace_square(m, p)? - trace_square(n, p)?;
    Ok(quadratic_residue(value))
}

/// Invertible 2x2 matrix over `F_p`, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gl2Matrix {
    entries: [u32; 4],
    p: u32,
}

impl Gl2Matrix {
    pub fn new(entries: [i64; 4], p: u64) -> Result<Self, FieldError> {
        let m = Self::from_raw(entries.map(|e| e.rem_euclid(p as i64) as u32), p as u32);
        if m.det() == 0 {
            return Err(FieldError::SingularMatrix { p });
        }
        Ok(m)
    }

    /// No determinant check; callers guarantee invertibility.
    pub(crate) fn from_raw(entries: [u32; 4], p: u32) -> Self {
        Self { entries, p }
    }

    pub fn identity(p: u64) -> Self {
        Self::from_raw([1, 0, 0, 1], p as u32)
    }

    /// `M(x) = [[0, 1], [-1, x]]`.
    pub fn companion(x: u64, p: u64) -> Self {
        Self::from_raw([0, 1, (p - 1) as u32, (x % p) as u32], p as u32)
    }

    pub fn entries(&self) -> [u32; 4] {
        self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> FpElement {
        FpElement::from_u64(self.entries[2 * row + col] as u64, self.p as u64)
    }

    pub fn modulus(&self) -> u64 {
        self.p as u64
    }

    pub fn det(&self) -> u64 {
        let p = self.p as u64;
        let [a, b, c, d] = self.entries.map(u64::from);
        (a * d + p * p - b * c) % p
    }

    pub fn trace(&self) -> u64 {
        (self.entries[0] as u64 + self.entries[3] as u64) % self.p as u64
    }

    pub fn is_identity(&self) -> bool {
        self.entries == [1, 0, 0, 1]
    }

    pub fn is_scalar(&self) -> bool {
        self.entries[1] == 0 && self.entries[2] == 0 && self.entries[0] == self.entries[3]
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let p = self.p as u64;
        let [a, b, c, d] = self.entries.map(u64::from);
        let [e, f, g, h] = rhs.entries.map(u64::from);
        Self::from_raw(
            [
                ((a * e + b * g) % p) as u32,
                ((a * f + b * h) % p) as u32,
                ((c * e + d * g) % p) as u32,
                ((c * f + d * h) % p) as u32,
            ],
            self.p,
        )
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut acc = Self::identity(self.p as u64);
        let mut base = *self;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    /// The adjugate, which is the inverse up to the scalar `det`.
    pub fn adjugate(&self) -> Self {
        let p = self.p;
        let [a, b, c, d] = self.entries;
        Self::from_raw([d, (p - b) % p, (p - c) % p, a], p)
    }

    pub fn inverse(&self) -> Self {
        let p = self.p as u64;
        let det_inv = inv_mod(self.det(), p).expect("invertible matrix");
        self.adjugate().scale(det_inv)
    }

    pub fn scale(&self, lambda: u64) -> Self {
        let p = self.p as u64;
        Self::from_raw(
            self.entries.map(|e| ((e as u64 * (lambda % p)) % p) as u32),
            self.p,
        )
    }

    /// Canonical representative of the scalar class: the first nonzero entry
    /// in row-major order is scaled to 1.
    pub fn normalized(&self) -> Self {
        let lead = self
            .entries
            .iter()
            .copied()
            .find(|&e| e != 0)
            .expect("invertible matrix has a nonzero entry");
        if lead == 1 {
            return *self;
        }
        let inv = inv_mod(lead as u64, self.p as u64).expect("nonzero residue");
        self.scale(inv)
    }
}

impl fmt::Display for Gl2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.entries;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

/// Smallest `e >= 1` with `M^e = I`, by repeated multiplication.
pub fn matrix_order(m: &Gl2Matrix) -> Result<u64, FieldError> {
    let p = m.modulus();
    if m.det() == 0 {
        return Err(FieldError::SingularMatrix { p });
    }
    let cap = p * (p * p - 1);
    let mut acc = *m;
    let mut e = 1;
    while !acc.is_identity() {
        acc = acc.mul(m);
        e += 1;
        if e > cap {
            return Err(FieldError::OrderCapExceeded { cap });
        }
    }
    Ok(e)
}

/// The residues `x` for which `M(x)` has order dividing `n` but not `n / 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnpResult {
    pub n: u64,
    pub p: u64,
    pub members: Vec<u64>,
}

impl SnpResult {
    pub fn contains(&self, x: u64) -> bool {
        self.members.binary_search(&x).is_ok()
    }
}

pub fn s_set(n: u64, p: u64) -> Result<SnpResult, FieldError> {
    ensure_odd_prime(p)?;
    if n == 0 || n % 2 == 1 {
        return Err(FieldError::OddExponent(n));
    }
    let mut members = Vec::new();
    for x in 0..p {
        let e = matrix_order(&Gl2Matrix::companion(x, p))?;
        if n % e == 0 && (n / 2) % e != 0 {
            members.push(x);
        }
    }
    Ok(SnpResult { n, p, members })
}
