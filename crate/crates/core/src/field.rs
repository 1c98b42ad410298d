//! Arithmetic in GF(2^n) for 2 <= n <= 32.
//!
//! Elements are stored in the polynomial basis `{1, x, ..., x^(n-1)}` of a
//! fixed irreducible modulus, little-endian: bit `i` is the coefficient of
//! `x^i`. A [`FieldCtx`] is immutable once built and cheap to clone.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::numtheory::{gcd_u64, mod_inverse_u64, prime_factors_u64};

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 32;

/// Lexicographically smallest irreducible polynomial of each degree 2..=32.
/// Entry `n - 2` holds the modulus for degree `n`, bit `n` included.
pub const DEFAULT_MODULI: [u64; 31] = [
    0x7,
    0xb,
    0x13,
    0x25,
    0x43,
    0x83,
    0x11b,
    0x203,
    0x409,
    0x805,
    0x1009,
    0x201b,
    0x4021,
    0x8003,
    0x1002b,
    0x20009,
    0x40009,
    0x80027,
    0x100009,
    0x200005,
    0x400003,
    0x800021,
    0x100001b,
    0x2000009,
    0x400001b,
    0x8000027,
    0x10000003,
    0x20000005,
    0x40000003,
    0x80000009,
    0x10000008d,
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("extension degree {0} outside supported range 2..=32")]
    DegreeOutOfRange(u32),
    #[error("modulus {modulus:#x} does not have degree {n} with constant term 1")]
    BadModulusShape { n: u32, modulus: u64 },
    #[error("modulus {0:#x} is reducible over GF(2)")]
    Reducible(u64),
    #[error("cannot parse modulus '{0}' as hex")]
    ParseModulus(String),
    #[error("{r} does not divide the extension degree {n}")]
    NotADivisor { r: u32, n: u32 },
    #[error("operation undefined for the zero element")]
    ZeroElement,
    #[error("exponent must be positive")]
    ZeroExponent,
}

/// An element of GF(2^n), as its coordinate vector in the polynomial basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub const fn from_bits(bits: u32) -> Self {
        FieldElement(bits)
    }

    #[inline]
    pub const fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl Add for FieldElement {
    type Output = FieldElement;

    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl AddAssign for FieldElement {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02x}", self.0)
    }
}

impl fmt::LowerHex for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

/// Cyclic-group data for GF(2^n)*, built on first use.
#[derive(Debug)]
struct GroupData {
    order: u64,
    primes: Vec<u64>,
    generator: FieldElement,
}

struct Inner {
    n: u32,
    modulus: u64,
    mask: u32,
    trace_mask: u32,
    /// `frob[k * n + b]` is `x^b` raised to `2^k`.
    frob: Vec<u32>,
    group: OnceLock<GroupData>,
}

/// The field GF(2^n) defined by an explicit irreducible modulus.
#[derive(Clone)]
pub struct FieldCtx {
    inner: Arc<Inner>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("n", &self.inner.n)
            .field("modulus", &format_args!("{:#x}", self.inner.modulus))
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n == other.inner.n && self.inner.modulus == other.inner.modulus
    }
}

impl Eq for FieldCtx {}

/// Default modulus for degree `n`, if `n` is in range.
pub fn default_modulus(n: u32) -> Option<u64> {
    if (2..=MAX_DEGREE).contains(&n) {
        Some(DEFAULT_MODULI[(n - 2) as usize])
    } else {
        None
    }
}

/// Parses a modulus written as a hex bit vector, with or without `0x`.
pub fn parse_modulus_hex(s: &str) -> Result<u64, FieldError> {
    let t = s.trim();
    let t = t
        .strip_prefix("0x")
        .or_else(|| t.strip_prefix("0X"))
        .unwrap_or(t);
    u64::from_str_radix(t, 16).map_err(|_| FieldError::ParseModulus(s.to_string()))
}

impl FieldCtx {
    /// GF(2^n) with the default modulus.
    pub fn new(n: u32) -> Result<Self, FieldError> {
        let modulus = default_modulus(n).ok_or(FieldError::DegreeOutOfRange(n))?;
        Self::with_modulus(n, modulus)
    }

    /// GF(2^n) with a caller-supplied modulus, checked for irreducibility.
    pub fn with_modulus(n: u32, modulus: u64) -> Result<Self, FieldError> {
        if !(2..=MAX_DEGREE).contains(&n) {
            return Err(FieldError::DegreeOutOfRange(n));
        }
        if poly::degree(modulus) != Some(n) || modulus & 1 == 0 {
            return Err(FieldError::BadModulusShape { n, modulus });
        }
        if !poly::is_irreducible(modulus) {
            return Err(FieldError::Reducible(modulus));
        }
        let mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let nu = n as usize;
        let mut frob = vec![0u32; nu * nu];
        for b in 0..nu {
            let mut v = 1u64 << b;
            for k in 0..nu {
                frob[k * nu + b] = v as u32;
                v = poly::mulmod(v, v, modulus);
            }
        }
        let mut trace_mask = 0u32;
        for b in 0..nu {
            let t = (0..nu).fold(0u32, |acc, k| acc ^ frob[k * nu + b]);
            debug_assert!(t <= 1);
            trace_mask |= (t & 1) << b;
        }
        Ok(FieldCtx {
            inner: Arc::new(Inner {
                n,
                modulus,
                mask,
                trace_mask,
                frob,
                group: OnceLock::new(),
            }),
        })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.inner.n
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.inner.modulus
    }

    /// Field size `2^n`.
    #[inline]
    pub fn size(&self) -> u64 {
        1u64 << self.inner.n
    }

    /// Order of the multiplicative group, `2^n - 1`.
    #[inline]
    pub fn group_order(&self) -> u64 {
        self.size() - 1
    }

    #[inline]
    pub fn mask(&self) -> u32 {
        self.inner.mask
    }

    /// Builds an element, rejecting bits at or above position `n`.
    pub fn element(&self, bits: u32) -> Option<FieldElement> {
        (bits & !self.inner.mask == 0).then_some(FieldElement(bits))
    }

    /// All field elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.size()).map(|v| FieldElement(v as u32))
    }

    /// The basis vector `x^b`.
    #[inline]
    pub fn basis(&self, b: u32) -> FieldElement {
        FieldElement(1 << b)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let prod = poly::clmul(a.0 as u64, b.0 as u64);
        FieldElement(poly::reduce(prod, self.inner.modulus, self.inner.n) as u32)
    }

    #[inline]
    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.frobenius(a, 1)
    }

    /// `a^(2^k)`; `k` may be negative and is taken mod `n`.
    #[inline]
    pub fn frobenius(&self, a: FieldElement, k: i64) -> FieldElement {
        let n = self.inner.n as usize;
        let k = k.rem_euclid(n as i64) as usize;
        if k == 0 {
            return a;
        }
        let row = &self.inner.frob[k * n..(k + 1) * n];
        let mut bits = a.0;
        let mut acc = 0u32;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            acc ^= row[b];
            bits &= bits - 1;
        }
        FieldElement(acc)
    }

    /// `a^e`, with `0^0 = 1` by convention.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let mut e = e % self.group_order();
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        Ok(self.pow(a, self.group_order() - 1))
    }

    /// Absolute trace to GF(2).
    #[inline]
    pub fn trace(&self, a: FieldElement) -> bool {
        (a.0 & self.inner.trace_mask).count_ones() & 1 == 1
    }

    /// The linear functional `x -> Tr(x)` as a mask over coordinates.
    #[inline]
    pub fn trace_mask(&self) -> u32 {
        self.inner.trace_mask
    }

    /// Relative trace from GF(2^n) down to GF(2^r).
    pub fn rel_trace(&self, r: u32, a: FieldElement) -> Result<FieldElement, FieldError> {
        let n = self.inner.n;
        if r == 0 || !n.is_multiple_of(r) {
            return Err(FieldError::NotADivisor { r, n });
        }
        Ok((0..n / r).fold(FieldElement::ZERO, |acc, i| {
            acc + self.frobenius(a, (i * r) as i64)
        }))
    }

    /// Whether `a = y^d` for some `y` in the field.
    pub fn is_dth_power(&self, a: FieldElement, d: u64) -> Result<bool, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        if d == 0 {
            return Err(FieldError::ZeroExponent);
        }
        let order = self.group_order();
        let g = gcd_u64(d, order);
        Ok(self.pow(a, order / g) == FieldElement::ONE)
    }

    /// Every `y` with `y^d = a`, sorted. Empty, or of size `gcd(d, 2^n - 1)`.
    pub fn dth_roots(&self, a: FieldElement, d: u64) -> Result<Vec<FieldElement>, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        if d == 0 {
            return Err(FieldError::ZeroExponent);
        }
        let order = self.group_order();
        let g = gcd_u64(d, order);
        let log = self.discrete_log(a);
        if !log.is_multiple_of(g) {
            return Ok(Vec::new());
        }
        let sub = order / g;
        let base = if sub == 1 {
            0
        } else {
            let inv = mod_inverse_u64((d / g) % sub, sub).expect("d/g is a unit mod order/g");
            mulmod_u64(log / g, inv, sub)
        };
        let gen = self.group().generator;
        let mut roots: Vec<FieldElement> = (0..g)
            .map(|t| self.pow(gen, base + t * sub))
            .collect();
        roots.sort_unstable();
        Ok(roots)
    }

    /// A fixed generator of GF(2^n)*.
    pub fn primitive_element(&self) -> FieldElement {
        self.group().generator
    }

    /// Discrete logarithm to the base [`primitive_element`](Self::primitive_element).
    ///
    /// Pohlig-Hellman over the prime factors of `2^n - 1` with baby-step
    /// giant-step in each prime-order subgroup.
    ///
    /// # Panics
    /// Panics if `a` is zero.
    pub fn discrete_log(&self, a: FieldElement) -> u64 {
        assert!(!a.is_zero(), "discrete log of zero");
        let group = self.group();
        let order = group.order;
        let mut residues = Vec::new();
        for &p in &group.primes {
            let mut pe = 1u64;
            let mut e = 0u32;
            while order.is_multiple_of(pe * p) {
                pe *= p;
                e += 1;
            }
            // Solve log mod p^e one base-p digit at a time.
            let gamma = self.pow(group.generator, order / p);
            let mut x = 0u64;
            let mut pk = 1u64;
            for _ in 0..e {
                let shifted = self.mul(a, self.pow(self.pow(group.generator, x), order - 1));
                let h = self.pow(shifted, order / (pk * p));
                let digit = self.bsgs(gamma, h, p);
                x += digit * pk;
                pk *= p;
            }
            residues.push((x, pe));
        }
        crt(&residues)
    }

    fn bsgs(&self, base: FieldElement, target: FieldElement, order: u64) -> u64 {
        let m = (order as f64).sqrt().ceil() as u64 + 1;
        let mut table = HashMap::with_capacity(m as usize);
        let mut cur = FieldElement::ONE;
        for j in 0..m {
            table.entry(cur).or_insert(j);
            cur = self.mul(cur, base);
        }
        let giant = self.inv(self.pow(base, m)).expect("nonzero");
        let mut gamma = target;
        for i in 0..=m {
            if let Some(&j) = table.get(&gamma) {
                return (i * m + j) % order;
            }
            gamma = self.mul(gamma, giant);
        }
        unreachable!("element outside the subgroup generated by base")
    }

    fn group(&self) -> &GroupData {
        self.inner.group.get_or_init(|| {
            let order = self.group_order();
            let primes = prime_factors_u64(order);
            let generator = (2..)
                .map(|bits: u32| FieldElement(bits & self.inner.mask))
                .find(|&g| {
                    !g.is_zero()
                        && primes
                            .iter()
                            .all(|&p| self.pow(g, order / p) != FieldElement::ONE)
                })
                .expect("GF(2^n)* is cyclic");
            GroupData {
                order,
                primes,
                generator,
            }
        })
    }
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn crt(residues: &[(u64, u64)]) -> u64 {
    let mut x = 0u64;
    let mut m = 1u64;
    for &(r, pe) in residues {
        // x' = x + m * t with x' = r (mod pe)
        let inv = mod_inverse_u64(m % pe, pe).unwrap_or(0);
        let diff = (r + pe - x % pe) % pe;
        let t = mulmod_u64(diff, inv, pe);
        x += m * t;
        m *= pe;
    }
    x
}

/// Polynomials over GF(2) packed into `u64`.
pub(crate) mod poly {
    pub fn degree(a: u64) -> Option<u32> {
        (a != 0).then(|| 63 - a.leading_zeros())
    }

    #[inline]
    pub fn clmul(a: u64, b: u64) -> u128 {
        let mut acc = 0u128;
        let mut b = b;
        let a = a as u128;
        while b != 0 {
            let i = b.trailing_zeros();
            acc ^= a << i;
            b &= b - 1;
        }
        acc
    }

    /// Reduces `a` modulo the degree-`n` polynomial `m`.
    #[inline]
    pub fn reduce(mut a: u128, m: u64, n: u32) -> u64 {
        let m = m as u128;
        while a >> n != 0 {
            let top = 127 - a.leading_zeros();
            a ^= m << (top - n);
        }
        a as u64
    }

    pub fn rem(a: u64, m: u64) -> u64 {
        let n = degree(m).expect("nonzero modulus");
        reduce(a as u128, m, n)
    }

    pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
        let n = degree(m).expect("nonzero modulus");
        reduce(clmul(a, b), m, n)
    }

    pub fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            let r = rem(a, b);
            a = b;
            b = r;
        }
        a
    }

    /// Rabin's test: `x^(2^n) = x mod m`, and `gcd(x^(2^(n/q)) - x, m) = 1`
    /// for every prime `q | n`.
    pub fn is_irreducible(m: u64) -> bool {
        let Some(n) = degree(m) else { return false };
        if n == 0 {
            return false;
        }
        let x = rem(2, m);
        let frob_power = |k: u32| {
            let mut v = x;
            for _ in 0..k {
                v = mulmod(v, v, m);
            }
            v
        };
        if frob_power(n) != x {
            return false;
        }
        crate::numtheory::prime_factors_u64(n as u64)
            .into_iter()
            .all(|q| gcd(m, frob_power(n / q as u32) ^ x) == 1)
    }
}
