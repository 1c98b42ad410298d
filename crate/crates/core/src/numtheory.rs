//! Integer machinery behind the V-search: valuations, `gg`, the
//! `(T_K, S_K, V_K)` quantities and the minimum-V search itself.

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumError {
    #[error("argument must be nonzero")]
    Zero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("exponent set is empty")]
    EmptyDelta,
    #[error("modulus n must be at least 2, got {0}")]
    SmallN(u32),
    #[error("shift vector has {got} entries, exponent set has {want}")]
    ShiftLength { got: usize, want: usize },
    #[error("shifted exponent {value} for i={exp} is negative; K is not in U")]
    NotInU { exp: i64, value: i64 },
    #[error("all shifted exponents are zero")]
    AllZero,
    #[error("every member of the exponent set is congruent mod {0}; no nonzero K exists")]
    DegenerateDelta(u32),
    #[error("exponent {0} has no shift in the pair list")]
    MissingShift(i64),
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse_u64(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(m as i128) as u64)
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime divisors of `m`, ascending.
pub fn prime_factors_u64(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Largest `r` with `p^r | A`. The norm is then `‖A‖_p = p^-r`.
pub fn p_valuation(a: i64, p: u64) -> Result<u32, NumError> {
    if a == 0 {
        return Err(NumError::Zero);
    }
    if !is_prime(p) {
        return Err(NumError::NotPrime(p));
    }
    let mut a = a.unsigned_abs();
    let mut r = 0;
    while a.is_multiple_of(p) {
        a /= p;
        r += 1;
    }
    Ok(r)
}

/// Product over primes `p | B` of `p^v_p(A)`.
pub fn gg(a: i64, b: i64) -> Result<u64, NumError> {
    if a == 0 || b == 0 {
        return Err(NumError::Zero);
    }
    let a = a.unsigned_abs();
    Ok(prime_factors_u64(b.unsigned_abs())
        .into_iter()
        .map(|p| {
            let mut pe = 1u64;
            while a.is_multiple_of(pe * p) {
                pe *= p;
            }
            pe
        })
        .product())
}

/// Largest divisor of `|A|` coprime to `B`, i.e. `|A| / gg(A, B)`.
pub fn coprime_part(a: i64, b: i64) -> Result<u64, NumError> {
    Ok(a.unsigned_abs() / gg(a, b)?)
}

/// `gcd(2^r + 1, 2^n - 1)` from the closed form.
///
/// # Panics
/// Panics if `r` or `n` is zero.
pub fn gcd_2r1_2n1(r: u32, n: u32) -> u64 {
    assert!(r >= 1 && n >= 1, "r and n must be positive");
    let g = r.gcd(&n);
    if (2 * r).gcd(&n) == g {
        1
    } else {
        (1u64 << g) + 1
    }
}

/// The signed exponent set Δ, normalized into `(-n, n)` and sorted descending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentSet {
    n: u32,
    exps: Vec<i64>,
}

impl ExponentSet {
    /// Each member is reduced by a truncating remainder mod `n`, so signs are
    /// kept, then duplicates are removed.
    pub fn new(n: u32, exps: impl IntoIterator<Item = i64>) -> Result<Self, NumError> {
        if n < 2 {
            return Err(NumError::SmallN(n));
        }
        let mut exps: Vec<i64> = exps.into_iter().map(|e| e % n as i64).collect();
        if exps.is_empty() {
            return Err(NumError::EmptyDelta);
        }
        exps.sort_unstable_by(|a, b| b.cmp(a));
        exps.dedup();
        Ok(ExponentSet { n, exps })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Members in descending order.
    pub fn exps(&self) -> &[i64] {
        &self.exps
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    /// The search's starting value `(i_0 - i_{t-1}) mod n`.
    pub fn initial_v(&self) -> u64 {
        let span = self.exps[0] - self.exps[self.exps.len() - 1];
        span.rem_euclid(self.n as i64) as u64
    }
}

/// `K = (k, k_0, ..., k_{t-1})`, with `k_j` aligned to [`ExponentSet::exps`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftVector {
    pub k: i64,
    pub shifts: Vec<i64>,
}

impl ShiftVector {
    /// Builds a shift vector from `(exponent, k_j)` pairs given in any order.
    pub fn from_pairs(delta: &ExponentSet, k: i64, pairs: &[(i64, i64)]) -> Result<Self, NumError> {
        let shifts = delta
            .exps()
            .iter()
            .map(|&e| {
                pairs
                    .iter()
                    .find(|&&(pe, _)| pe % delta.n as i64 == e)
                    .map(|&(_, s)| s)
                    .ok_or(NumError::MissingShift(e))
            })
            .collect::<Result<_, _>>()?;
        Ok(ShiftVector { k, shifts })
    }

    /// `i_j + k + k_j n` for each member of Δ.
    pub fn shifted(&self, delta: &ExponentSet) -> Vec<i64> {
        let n = delta.n as i64;
        delta
            .exps
            .iter()
            .zip(&self.shifts)
            .map(|(&i, &kj)| i + self.k + kj * n)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VkQuantities {
    pub t: u64,
    pub s: u64,
    pub v: u64,
}

pub fn vk_quantities(delta: &ExponentSet, key: &ShiftVector) -> Result<VkQuantities, NumError> {
    if key.shifts.len() != delta.len() {
        return Err(NumError::ShiftLength {
            got: key.shifts.len(),
            want: delta.len(),
        });
    }
    let shifted = key.shifted(delta);
    if let Some((&exp, &value)) = delta.exps.iter().zip(&shifted).find(|(_, &v)| v < 0) {
        return Err(NumError::NotInU { exp, value });
    }
    let t = shifted.iter().fold(0u64, |g, &e| g.gcd(&(e as u64)));
    if t == 0 {
        return Err(NumError::AllZero);
    }
    let s = coprime_part(t as i64, delta.n as i64)?;
    assert_eq!(gcd_u64(s, delta.n as u64), 1, "S_K must be coprime to n");
    let max = *shifted.iter().max().expect("nonempty") as u64;
    // s | t | max, so the quotient is exact.
    Ok(VkQuantities { t, s, v: max / s })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VResult {
    pub v: u64,
    pub witness: ShiftVector,
    pub tk: u64,
    pub sk: u64,
    /// The value `(i_0 - i_{t-1}) mod n` the search starts from.
    pub initial_v: u64,
}

/// Searches `k ∈ {(n - i_j) mod n}` and units `a` mod `n` for the smallest
/// `max_j a(k + i_j) mod n`.
///
/// Outer loop runs over Δ in descending order, inner loop over `a`
/// ascending; the first candidate attaining the minimum wins. Candidates
/// whose residues are all zero carry no information and are skipped.
pub fn minimize_v(delta: &ExponentSet) -> Result<VResult, NumError> {
    let n = delta.n as i64;
    let units: Vec<i64> = (1..n).filter(|a| a.gcd(&n) == 1).collect();
    let mut best: Option<(u64, i64, i64, Vec<i64>)> = None;
    for &ij in &delta.exps {
        let k = (n - ij).rem_euclid(n);
        for &a in &units {
            let residues: Vec<i64> = delta
                .exps
                .iter()
                .map(|&i| (a * (k + i)).rem_euclid(n))
                .collect();
            let m = *residues.iter().max().expect("nonempty") as u64;
            if m == 0 {
                continue;
            }
            if best.as_ref().is_none_or(|b| m < b.0) {
                best = Some((m, k, a, residues));
            }
        }
    }
    let (m, k, a, residues) = best.ok_or(NumError::DegenerateDelta(delta.n))?;
    let a_inv = mod_inverse_u64(a as u64, n as u64).expect("a is a unit") as i64;
    let shifts = delta
        .exps
        .iter()
        .zip(&residues)
        .map(|(&i, &l)| {
            let num = a_inv * l - k - i;
            assert!(
                num % n == 0,
                "witness reconstruction not integral: a'={a_inv} L={l} k={k} i={i} n={n}"
            );
            num / n
        })
        .collect();
    let witness = ShiftVector { k, shifts };
    let q = vk_quantities(delta, &witness)?;
    assert_eq!(q.v, m, "witness does not reproduce the search minimum");
    Ok(VResult {
        v: m,
        witness,
        tk: q.t,
        sk: q.s,
        initial_v: delta.initial_v(),
    })
}
