//! Lower bounds on the second-order nonlinearity of cubic functions.
//!
//! Almost every bound here has the shape `2^(n-1) - sqrt(R)/2` with an
//! exact rational radicand `R`. Radicands are kept exact; the real value is
//! a fixed-point number with [`FRAC_BITS`] fractional bits, and the integer
//! bound is the exact ceiling.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::boolfn::{BoolFnError, RadicalDistribution, TracePolynomial, MAX_NL2_N, MAX_SWEEP_N};
use crate::field::{FieldElement, FieldError};
use crate::numtheory::{p_valuation, ExponentSet, NumError, VResult};

/// Fractional bits of the fixed-point real values.
pub const FRAC_BITS: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    BoolFn(#[from] BoolFnError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("radical histogram is empty")]
    EmptyHistogram,
    #[error("radical dimension {r} has the wrong parity for n = {n}")]
    HistogramParity { r: u32, n: u32 },
    #[error("n = {0} is 3 mod 6; wt(Tr(x^7)) is required")]
    MissingWeight(u32),
    #[error("invalid parameters: {0}")]
    Params(String),
}

/// A nonnegative rational `num / den` in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Radicand {
    num: BigUint,
    den: BigUint,
}

impl Radicand {
    pub fn new(num: BigUint, den: BigUint) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let g = num.gcd(&den);
        if g.is_one() || g.is_zero() {
            Radicand { num, den }
        } else {
            Radicand { num: num / &g, den: den / g }
        }
    }

    pub fn integer(num: BigUint) -> Self {
        Radicand { num, den: BigUint::one() }
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn den(&self) -> &BigUint {
        &self.den
    }
}

impl fmt::Display for Radicand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Serialize for Radicand {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

fn ipow2(e: u64) -> BigInt {
    BigInt::one() << e
}

/// A fixed-point real, `value / 2^FRAC_BITS`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fixed(BigInt);

impl Fixed {
    pub fn raw(&self) -> &BigInt {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        // Split so values beyond f64's integer range still convert.
        let (int, frac) = self.0.div_mod_floor(&ipow2(FRAC_BITS as u64));
        int.to_f64().unwrap_or(f64::NAN) + frac.to_f64().unwrap_or(0.0) / 2f64.powi(FRAC_BITS as i32)
    }

    /// Round half up.
    pub fn nearest(&self) -> BigInt {
        (&self.0 + ipow2(FRAC_BITS as u64 - 1)).div_floor(&ipow2(FRAC_BITS as u64))
    }

    /// Fixed three-decimal rendering.
    pub fn display3(&self) -> String {
        let milli: BigInt = (&self.0 * BigInt::from(1000) + ipow2(FRAC_BITS as u64 - 1)).div_floor(&ipow2(FRAC_BITS as u64));
        let sign = if milli.sign() == Sign::Minus { "-" } else { "" };
        let mag = milli.magnitude();
        let (int, frac) = mag.div_rem(&BigUint::from(1000u32));
        format!("{sign}{int}.{:03}", frac.to_u32().expect("< 1000"))
    }
}

/// One named lower bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundEntry {
    pub name: String,
    pub provenance: String,
    /// `R` in `2^(n-1) - sqrt(R)/2`; for the two-branch bound, the
    /// radicand of the square-root branch.
    pub radicand: Option<Radicand>,
    pub real: Fixed,
    /// Smallest integer not below `real`; valid since nl2 is an integer.
    pub ceil: BigInt,
    pub applicable: bool,
    pub reason: Option<String>,
    pub caveat: Option<String>,
}

impl BoundEntry {
    fn from_radicand(n: u32, name: &str, provenance: &str, radicand: Radicand) -> Self {
        let half = ipow2(n as u64 - 1);
        // sqrt(R)/2 = sqrt(R/4)
        let scaled = (radicand.num() << (2 * FRAC_BITS as u64)) / (radicand.den() * 4u32);
        let root = BigInt::from(scaled.sqrt());
        let real = Fixed((&half << FRAC_BITS as u64) - root);
        let ceil = half - BigInt::from((radicand.num() / (radicand.den() * 4u32)).sqrt());
        BoundEntry {
            name: name.to_string(),
            provenance: provenance.to_string(),
            radicand: Some(radicand),
            real,
            ceil,
            applicable: true,
            reason: None,
            caveat: None,
        }
    }

    fn inapplicable(mut self, reason: impl Into<String>) -> Self {
        self.applicable = false;
        self.reason = Some(reason.into());
        self
    }

    fn not_defined(n: u32, name: &str, provenance: &str, reason: impl Into<String>) -> Self {
        let mut e = Self::from_radicand(n, name, provenance, Radicand::integer(pow2(2 * n as u64)));
        e.radicand = None;
        e.inapplicable(reason)
    }

    /// Round-half-up value of the real bound.
    pub fn nearest(&self) -> BigInt {
        self.real.nearest()
    }

    pub fn vacuous(&self) -> bool {
        self.real.0.sign() != Sign::Plus
    }

    pub fn ceil_i64(&self) -> i64 {
        self.ceil.to_i64().expect("bounds fit in i64 for n <= 32")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "name": self.name,
            "provenance": self.provenance,
            "radicand": self.radicand.as_ref().map(|r| r.to_string()),
            "real": self.real.display3(),
            "ceil": self.ceil.to_string(),
            "nearest": self.nearest().to_string(),
            "applicable": self.applicable,
            "reason": self.reason,
            "caveat": self.caveat,
            "vacuous": self.vacuous(),
        })
    }
}

/// `2^n + (2^n - 1) 2^e`.
fn standard_radicand(n: u32, e: u64) -> Radicand {
    Radicand::integer(pow2(n as u64) + (pow2(n as u64) - 1u32) * pow2(e))
}

fn standard(n: u32, e: u64, name: &str, provenance: &str) -> BoundEntry {
    BoundEntry::from_radicand(n, name, provenance, standard_radicand(n, e))
}

/// Generic cubic bound `2^(n-1) - 2^(n-3/2)` for functions without affine
/// derivatives.
pub fn bound_carlet_cubic(n: u32) -> BoundEntry {
    let mut e = BoundEntry::from_radicand(
        n,
        "carlet_cubic",
        "Carlet, cubic functions without affine derivatives",
        Radicand::integer(pow2(2 * n as u64 - 1)),
    );
    e.caveat = Some(if n < 5 {
        "generic form; exceeds nl2 of some cubics for n < 5".to_string()
    } else {
        "generic form; not used in soundness checks".to_string()
    });
    e
}

/// `max(2^(n-2) - min_a 2^((n+r_a)/2) / 4, 2^(n-1) - sqrt(2^n + Σ_a 2^((n+r_a)/2)) / 2)`.
///
/// `degenerate` counts `a ≠ 0` with affine derivative; each contributes
/// as `r_a = n` to the sum and nothing to the minimum.
pub fn bound_radical_sum(
    n: u32,
    histogram: &BTreeMap<u32, u64>,
    degenerate: u64,
) -> Result<BoundEntry, BoundsError> {
    let r_min = *histogram
        .iter()
        .find(|(_, &c)| c > 0)
        .ok_or(BoundsError::EmptyHistogram)?
        .0;
    let mut sum = pow2(n as u64) + BigUint::from(degenerate) * pow2(n as u64);
    for (&r, &c) in histogram {
        if !(n + r).is_multiple_of(2) || r > n {
            return Err(BoundsError::HistogramParity { r, n });
        }
        sum += BigUint::from(c) * pow2(((n + r) / 2) as u64);
    }
    let mut entry = BoundEntry::from_radicand(
        n,
        "radical_sum",
        "sum over derivative radical dimensions",
        Radicand::integer(sum),
    );
    // First branch: 2^(n-2) - 2^((n + r_min)/2 - 2), exponent >= -1.
    let e = (n + r_min) as i64 / 2 - 2 + FRAC_BITS as i64;
    let first = Fixed(ipow2(n as u64 - 2 + FRAC_BITS as u64) - ipow2(e as u64));
    let first_ceil = ipow2(n as u64 - 2)
        - if e >= FRAC_BITS as i64 { ipow2((e - FRAC_BITS as i64) as u64) } else { BigInt::zero() };
    if first > entry.real {
        entry.real = first;
    }
    if first_ceil > entry.ceil {
        entry.ceil = first_ceil;
    }
    Ok(entry)
}

/// Gode-Gangopadhyay for `Tr(μ x^(2^i + 2^j + 1))`, `n > 2i`.
pub fn bound_gode_f(n: u32, i: u32) -> BoundEntry {
    let name = "gode_f";
    let prov = "Gode-Gangopadhyay, cubic monomials";
    if n <= 2 * i {
        return BoundEntry::not_defined(n, name, prov, format!("requires n > 2i, got n = {n}, i = {i}"));
    }
    let e = if n.is_multiple_of(2) { (n + 2 * i) / 2 } else { (n + 2 * i - 1) / 2 };
    standard(n, e as u64, name, prov)
}

/// Gode-Gangopadhyay for `g_μ`, `gcd(n, r) = 1`, `n > 3`.
pub fn bound_gode_g(n: u32, r: u32) -> BoundEntry {
    let name = "gode_g";
    let prov = "Gode-Gangopadhyay, g_mu with gcd(n, r) = 1";
    let e = if n.is_multiple_of(2) { (n + 4) / 2 } else { (n + 3) / 2 };
    let entry = standard(n, e as u64, name, prov);
    if n <= 3 {
        entry.inapplicable("requires n > 3")
    } else if num_integer::gcd(n, r) != 1 {
        entry.inapplicable(format!("requires gcd(n, r) = 1, got {}", num_integer::gcd(n, r)))
    } else {
        entry
    }
}

/// Li-Hu-Gao for general cubics, from the smallest, largest and second
/// largest quadratic index `s`, `t`, `t1`.
pub fn bound_lihugao(n: u32, s: u32, t: u32, t1: Option<u32>) -> Result<BoundEntry, BoundsError> {
    if s == 0 || s > t || t >= n {
        return Err(BoundsError::Params(format!("need 1 <= s <= t < n, got s = {s}, t = {t}, n = {n}")));
    }
    let name = "lihugao_f";
    let (e, case) = if n < s + t {
        (t, "case 1")
    } else if 2 * t > n {
        (n - s, "case 2")
    } else if n == 2 * t {
        if s == t {
            return Ok(BoundEntry::not_defined(n, name, "Li-Hu-Gao, general cubic", "n = 2t with s = t is not covered"));
        }
        let t1 = t1.ok_or_else(|| BoundsError::Params("case n = 2t needs t1".to_string()))?;
        if t1 >= t || t1 < s {
            return Err(BoundsError::Params(format!("t1 = {t1} must lie in [s, t)")));
        }
        ((n + (n - 2 * s).min(2 * t1)) / 2, "case 3")
    } else if n.is_multiple_of(2) {
        ((n + (n - 2 * s).min(2 * t)) / 2, "case 4, n even")
    } else {
        ((n + (n - 2 * s).min(2 * t - 1)) / 2, "case 4, n odd")
    };
    Ok(standard(n, e as u64, name, &format!("Li-Hu-Gao, general cubic ({case})")))
}

/// Li-Hu-Gao for `G_μ = Tr(Σ μ_l x^(2^(i_l r) + 2^(j_l r) + 1))`, `n >= 2t`.
pub fn bound_lihugao_g(n: u32, t: u32) -> BoundEntry {
    let name = "lihugao_g";
    let prov = "Li-Hu-Gao, G_mu";
    if n < 2 * t {
        return BoundEntry::not_defined(n, name, prov, format!("requires n >= 2t, got n = {n}, t = {t}"));
    }
    let e = if n.is_multiple_of(2) { (n + 2 * t) / 2 } else { (n + 2 * t - 1) / 2 };
    standard(n, e as u64, name, prov)
}

/// `2^(n-1) - sqrt(2^(2n) - 2q(2^(n-1) - 2^(floor((n+V)/2) - 1)))/2`.
pub fn bound_main(n: u32, q_size: u64, v: u64) -> Result<BoundEntry, BoundsError> {
    if q_size > (1u64 << n) - 1 || v > n as u64 {
        return Err(BoundsError::Params(format!("need q <= 2^n - 1 and v <= n, got q = {q_size}, v = {v}")));
    }
    let e = (n as u64 + v) / 2;
    let q = BigUint::from(q_size);
    let rad = pow2(2 * n as u64) + &q * pow2(e) - q * pow2(n as u64);
    Ok(BoundEntry::from_radicand(
        n,
        "main",
        "minimum-V root bound with |Q_f|",
        Radicand::integer(rad),
    ))
}

/// The four `n mod 6` bounds for `g_μ` with `gcd(n, r) = 1`.
///
/// For `n = ±1 mod 6` the middle term is `3 * 2^((3n+1)/2)`, which is weaker
/// than what the radical distribution gives; [`bound_radical_sum`] is sharper.
pub fn bound_gmu_coprime(n: u32, wt_f7: Option<u64>) -> Result<BoundEntry, BoundsError> {
    let name = "gmu_coprime";
    if n < 4 {
        return Ok(BoundEntry::not_defined(n, name, "g_mu radical distribution", "requires n >= 4"));
    }
    let nn = n as u64;
    let (num, den, case) = match n % 6 {
        2 | 4 => (
            pow2(nn) * 3u32 + pow2(3 * nn / 2) * 7u32 - pow2(nn / 2) * 10u32,
            3u32,
            "n = 2, 4 mod 6",
        ),
        0 => (
            pow2(nn) * 3u32 + pow2(3 * nn / 2) * 8u32 - pow2(nn / 2) * 8u32,
            3,
            "n = 0 mod 6",
        ),
        1 | 5 => (
            pow2(nn) + pow2((3 * nn).div_ceil(2)) * 3u32 - pow2((nn + 3) / 2),
            1,
            "n = +-1 mod 6",
        ),
        _ => {
            let wt = wt_f7.ok_or(BoundsError::MissingWeight(n))?;
            (
                pow2(nn) + (pow2(nn) - 1u32) * pow2((nn + 3) / 2) - BigUint::from(wt) * pow2(nn.div_ceil(2)),
                1,
                "n = 3 mod 6",
            )
        }
    };
    Ok(BoundEntry::from_radicand(
        n,
        name,
        &format!("g_mu radical distribution ({case})"),
        Radicand::new(num, BigUint::from(den)),
    ))
}

/// Bounds for `g_μ` with `gcd(n, r) ≠ 1`, plus the `n = s r` family.
///
/// `trace_nonzero` is `Tr_r^n(μ) ≠ 0`, needed when `n = 3r`.
pub fn bound_gmu_noncoprime(
    n: u32,
    r: u32,
    trace_nonzero: Option<bool>,
) -> Result<Vec<BoundEntry>, BoundsError> {
    if r == 0 || n < 4 {
        return Err(BoundsError::Params(format!("need r >= 1 and n >= 4, got n = {n}, r = {r}")));
    }
    let g = num_integer::gcd(n, r);
    let nn = n as u64;
    let v2n = p_valuation(n as i64, 2)?;
    let v2r = p_valuation(r as i64, 2)?;
    let mut out = Vec::new();
    let main = if v2n <= v2r {
        standard(
            n,
            (nn + 3 * g as u64) / 2,
            "gmu_noncoprime",
            "g_mu with gcd(n, r) != 1, |n|_2 >= |r|_2",
        )
    } else {
        let gg = g as u64;
        let den = pow2(gg) + 1u32;
        let num = pow2(nn) * &den + (pow2(nn) - 1u32) * pow2(nn / 2 + 2 * gg + 1);
        BoundEntry::from_radicand(
            n,
            "gmu_noncoprime",
            "g_mu with gcd(n, r) != 1, |n|_2 < |r|_2",
            Radicand::new(num, den),
        )
    };
    let three_r = n == 3 * r;
    out.push(if g == 1 {
        main.inapplicable("requires gcd(n, r) != 1")
    } else if three_r && trace_nonzero != Some(true) {
        main.inapplicable("n = 3r requires Tr_r^n(mu) != 0")
    } else {
        main
    });
    if n.is_multiple_of(r) {
        let rr = r as u64;
        let family = match n / r {
            3 => Some((2 * rr, "family_3r", "n = 3r family")),
            4 => Some((3 * rr, "family_4r", "n = 4r family")),
            5 => Some((4 * rr, "family_5r", "n = 5r family")),
            6 => Some((5 * rr, "family_6r", "n = 6r family")),
            7 => Some((5 * rr, "family_7r", "n = 7r family")),
            _ => None,
        };
        if let Some((e, name, prov)) = family {
            let entry = standard(n, e, name, prov);
            out.push(if three_r && trace_nonzero != Some(true) {
                entry.inapplicable("requires Tr_r^n(mu) != 0")
            } else {
                entry
            });
        }
    }
    Ok(out)
}

/// Every bound that applies to `f`, with the inputs that produced them.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub n: u32,
    pub function: String,
    pub delta: ExponentSet,
    pub v: VResult,
    pub q_size: u64,
    pub radicals: Option<RadicalDistribution>,
    pub nl2: Option<u64>,
    pub entries: Vec<BoundEntry>,
    pub metadata: BTreeMap<String, String>,
    /// Applicable prior bounds that exceed the main bound.
    pub ordering_violations: Vec<String>,
    /// Applicable bounds above the exact nl2 (only when `n <= 6`).
    pub soundness_violations: Vec<String>,
}

impl BoundReport {
    pub fn entry(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Applicable entries taking part in ordering and soundness checks.
    pub fn checked_entries(&self) -> impl Iterator<Item = &BoundEntry> {
        self.entries.iter().filter(|e| e.applicable && e.caveat.is_none())
    }
}

fn rotate(d: u64, k: u32, n: u32) -> u64 {
    let mask = (1u64 << n) - 1;
    if k == 0 {
        d
    } else {
        ((d << k) | (d >> (n - k))) & mask
    }
}

/// Rotations of a weight-3 exponent with bit 0 set, as `(i, j)` with `i > j > 0`.
fn normal_forms(d: u64, n: u32) -> Vec<(u32, u32)> {
    (0..n)
        .map(|k| rotate(d, k, n))
        .filter(|&e| e & 1 == 1 && e.count_ones() == 3)
        .map(|e| {
            let rest = e & !1;
            let j = rest.trailing_zeros();
            let i = 63 - rest.leading_zeros();
            (i, j)
        })
        .collect()
}

/// `r` such that `d` is a rotation of `2^(2r) + 2^r + 1`, smallest first.
fn gmu_r(d: u64, n: u32) -> Option<u32> {
    (1..n).find(|&r| {
        let target = (1u64 << (2 * r % n)) | (1u64 << r) | 1;
        target.count_ones() == 3 && (0..n).any(|k| rotate(d, k, n) == target)
    })
}

/// Runs the V-search and `|Q_f|` and evaluates every bound that applies.
pub fn compare_report(f: &TracePolynomial) -> Result<BoundReport, BoundsError> {
    let ctx = f.ctx();
    let n = ctx.n();
    let full = ctx.group_order();
    let delta = f.delta_set()?;
    let v = crate::numtheory::minimize_v(&delta)?;
    let q_size = f.q_set_size()?;
    let q_full = q_size == full;
    let mut metadata = BTreeMap::new();
    let mut entries = vec![bound_main(n, q_size, v.v)?];

    let radicals = if n <= MAX_SWEEP_N {
        Some(f.radical_distribution()?)
    } else {
        None
    };
    if let Some(rd) = &radicals {
        if !rd.histogram.is_empty() {
            entries.push(bound_radical_sum(n, &rd.histogram, rd.degenerate)?);
        }
    }

    let need_full = "requires no affine derivative (|Q_f| = 2^n - 1)";
    let carlet = bound_carlet_cubic(n);
    entries.push(if q_full { carlet } else { carlet.inapplicable(need_full) });

    let pos: Vec<u32> = delta.exps().iter().filter(|&&e| e > 0).map(|&e| e as u32).collect();
    if let (Some(&t), Some(&s)) = (pos.first(), pos.last()) {
        let t1 = pos.get(1).copied();
        metadata.insert(
            "lihugao_t1".to_string(),
            "t1 is the largest index below t; a later restatement uses the smallest".to_string(),
        );
        metadata.insert("lihugao_params".to_string(), format!("s={s} t={t} t1={t1:?}"));
        let e = bound_lihugao(n, s, t, t1)?;
        entries.push(if q_full || !e.applicable { e } else { e.inapplicable(need_full) });
    }

    let cubic_terms: Vec<(FieldElement, u64)> = f.terms().to_vec();
    let all_cubic = !cubic_terms.is_empty() && cubic_terms.iter().all(|t| t.1.count_ones() == 3);

    if all_cubic {
        let mut best: Option<(u32, u32)> = None;
        for r in 2..n {
            if num_integer::gcd(n, r) != 1 {
                continue;
            }
            let t = cubic_terms.iter().try_fold(0u32, |acc, &(_, d)| {
                normal_forms(d, n)
                    .into_iter()
                    .filter(|&(i, j)| i % r == 0 && j % r == 0)
                    .map(|(i, _)| i / r)
                    .min()
                    .map(|i| acc.max(i))
            });
            if let Some(t) = t {
                if best.is_none_or(|(_, bt)| t < bt) {
                    best = Some((r, t));
                }
            }
        }
        if let Some((r, t)) = best {
            metadata.insert("lihugao_g_params".to_string(), format!("r={r} t={t}"));
            let e = bound_lihugao_g(n, t);
            entries.push(if q_full || !e.applicable { e } else { e.inapplicable(need_full) });
        }
    }

    if let [(mu, d)] = cubic_terms[..] {
        if d.count_ones() == 3 {
            let forms = normal_forms(d, n);
            let i = forms.iter().map(|&(i, _)| i).filter(|&i| n > 2 * i).min();
            entries.push(match i {
                Some(i) => bound_gode_f(n, i),
                None => {
                    let i = forms.iter().map(|&(i, _)| i).min().expect("weight 3");
                    bound_gode_f(n, i)
                }
            });
            if let Some(r) = gmu_r(d, n) {
                metadata.insert("gmu_r".to_string(), r.to_string());
                if num_integer::gcd(n, r) == 1 {
                    entries.push(bound_gode_g(n, r));
                    let wt = if n % 6 == 3 {
                        let f7 = TracePolynomial::monomial(ctx, FieldElement::ONE, 7)?;
                        Some(f7.truth_table()?.weight())
                    } else {
                        None
                    };
                    entries.push(bound_gmu_coprime(n, wt)?);
                } else if n >= 4 {
                    let cond = if n.is_multiple_of(r) {
                        Some(!ctx.rel_trace(r, mu)?.is_zero())
                    } else {
                        None
                    };
                    // The n = s r family plugs V into the main bound with
                    // |Q_f| = 2^n - 1.
                    entries.extend(bound_gmu_noncoprime(n, r, cond)?.into_iter().map(|e| {
                        if e.name == "gmu_noncoprime" || q_full || !e.applicable {
                            e
                        } else {
                            e.inapplicable(need_full)
                        }
                    }));
                }
            }
        }
    }

    let nl2 = if n <= MAX_NL2_N {
        Some(f.truth_table()?.nl2_exact()?)
    } else {
        None
    };

    let main = entries[0].clone();
    let ordering_violations = entries
        .iter()
        .filter(|e| e.applicable && e.caveat.is_none())
        .filter(|e| ["lihugao_f", "lihugao_g", "gode_f", "gode_g"].contains(&e.name.as_str()))
        .filter(|e| e.real > main.real)
        .map(|e| format!("{} ({}) exceeds main ({})", e.name, e.real.display3(), main.real.display3()))
        .collect();
    let soundness_violations = match nl2 {
        Some(nl2) => entries
            .iter()
            .filter(|e| e.applicable && e.caveat.is_none())
            .filter(|e| e.ceil > BigInt::from(nl2))
            .map(|e| format!("{} ceil {} exceeds nl2 {nl2}", e.name, e.ceil))
            .collect(),
        None => Vec::new(),
    };

    Ok(BoundReport {
        n,
        function: describe(f),
        delta,
        v,
        q_size,
        radicals,
        nl2,
        entries,
        metadata,
        ordering_violations,
        soundness_violations,
    })
}

/// `coeff:exp` terms in the input syntax.
pub fn describe(f: &TracePolynomial) -> String {
    let mut parts: Vec<String> = f.terms().iter().map(|(c, d)| format!("{c}:{d}")).collect();
    if f.constant() {
        parts.push("const:1".to_string());
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;

    /// Reference values are the ceilings; round-to-nearest stays within one.
    fn reference(e: &BoundEntry) -> i64 {
        let c = e.ceil_i64();
        assert!((e.nearest().to_i64().unwrap() - c).abs() <= 1);
        c
    }

    /// Independent float evaluation of `2^(n-1) - sqrt(R)/2`.
    fn float_bound(n: u32, radicand: f64) -> f64 {
        2f64.powi(n as i32 - 1) - radicand.sqrt() / 2.0
    }

    #[test]
    fn fixed_point_rendering() {
        let e = bound_main(20, (1 << 20) - 1, 10).unwrap();
        assert_eq!(e.real.display3(), "431604.730");
        assert_eq!(e.ceil_i64(), 431605);
        assert_eq!(e.nearest(), BigInt::from(431605));
        assert!((e.real.to_f64() - 431604.72997).abs() < 1e-4);
        let e = bound_gode_f(20, 9);
        assert_eq!(e.real.display3(), "153560.223");
        assert_eq!(e.nearest(), BigInt::from(153560));
        let neg = Fixed(-(BigInt::from(3) << (FRAC_BITS as u64 - 1)));
        assert_eq!(neg.display3(), "-1.500");
        assert_eq!(neg.nearest(), BigInt::from(-1));
    }

    #[test]
    fn carlet_values() {
        let e = bound_carlet_cubic(3);
        assert_eq!(e.real.display3(), "1.172");
        assert_eq!(e.ceil_i64(), 2);
        assert!(e.caveat.is_some());
        let e = bound_carlet_cubic(10);
        assert!((e.real.to_f64() - (512.0 - 2f64.powf(8.5))).abs() < 1e-9);
        for n in [20u32, 30] {
            let ratio = bound_carlet_cubic(n).real.to_f64() / 2f64.powi(n as i32 - 1);
            assert!((ratio - (1.0 - 0.5f64.sqrt())).abs() < 1e-9);
        }
    }

    #[test]
    fn radical_sum_values() {
        let h5 = BTreeMap::from([(1, 16), (3, 15)]);
        let e = bound_radical_sum(5, &h5, 0).unwrap();
        assert_eq!(e.radicand.as_ref().unwrap().to_string(), "400");
        assert_eq!(e.ceil_i64(), 6);
        let h7 = BTreeMap::from([(1, 64), (3, 63)]);
        let e = bound_radical_sum(7, &h7, 0).unwrap();
        assert_eq!(e.radicand.as_ref().unwrap().to_string(), "3168");
        assert_eq!(e.real.display3(), "35.858");
        assert_eq!(e.ceil_i64(), 36);
        // all-degenerate style histogram: both branches non-positive
        let e = bound_radical_sum(6, &BTreeMap::from([(6, 63)]), 0).unwrap();
        assert!(e.vacuous());
        assert_eq!(bound_radical_sum(6, &BTreeMap::new(), 0), Err(BoundsError::EmptyHistogram));
        assert!(matches!(
            bound_radical_sum(6, &BTreeMap::from([(1, 63)]), 0),
            Err(BoundsError::HistogramParity { .. })
        ));
    }

    #[test]
    fn radical_sum_first_branch_wins_when_sum_is_large() {
        // One a with r = 0 and the rest degenerate.
        let e = bound_radical_sum(4, &BTreeMap::from([(0, 1)]), 14).unwrap();
        // first branch: 4 - 2^(2-2) = 3; second: 8 - sqrt(16 + 4 + 14*16)/2 < 1
        assert_eq!(e.real.display3(), "3.000");
        assert_eq!(e.ceil_i64(), 3);
    }

    #[test]
    fn gode_values() {
        assert_eq!(reference(&bound_gode_f(20, 9)), 153561);
        assert_eq!(reference(&bound_gode_f(19, 9)), 76781);
        assert!(!bound_gode_f(18, 9).applicable);
        let g = bound_gode_g(20, 3);
        let want = float_bound(20, 2f64.powi(20) + (2f64.powi(20) - 1.0) * 2f64.powi(12));
        assert!((g.real.to_f64() - want).abs() < 1e-6);
        assert!(!bound_gode_g(3, 1).applicable);
        assert!(!bound_gode_g(20, 2).applicable);
    }

    #[test]
    fn lihugao_values() {
        let e = bound_lihugao(20, 4, 9, Some(5)).unwrap();
        assert_eq!(reference(&e), 393216);
        assert!(e.provenance.contains("case 4"));
        assert_eq!(reference(&bound_lihugao(19, 4, 9, Some(5)).unwrap()), 196608);
        assert_eq!(reference(&bound_lihugao_g(20, 9)), 153561);
        assert_eq!(reference(&bound_lihugao_g(19, 9)), 76781);
        assert!(bound_lihugao(10, 2, 5, Some(3)).unwrap().provenance.contains("case 3"));
        assert!(bound_lihugao(10, 4, 7, Some(5)).unwrap().provenance.contains("case 1"));
        assert!(bound_lihugao(12, 2, 7, Some(5)).unwrap().provenance.contains("case 2"));
        assert!(bound_lihugao(10, 5, 5, None).map(|e| !e.applicable).unwrap());
        assert!(bound_lihugao(10, 6, 5, None).is_err());
        assert!(bound_lihugao(10, 2, 5, None).is_err());
    }

    #[test]
    fn main_values() {
        assert_eq!(reference(&bound_main(20, (1 << 20) - 1, 10).unwrap()), 431605);
        assert_eq!(reference(&bound_main(19, (1 << 19) - 1, 6).unwrap()), 238971);
        assert_eq!(reference(&bound_main(20, (1 << 20) - 1, 12).unwrap()), 393216);
        let e = bound_main(4, 14, 2).unwrap();
        assert_eq!(e.radicand.as_ref().unwrap().to_string(), "144");
        assert_eq!(e.ceil_i64(), 2);
        assert_eq!(e.real.display3(), "2.000");
        assert!(bound_main(4, 16, 2).is_err());
        assert!(bound_main(4, 15, 5).is_err());
    }

    #[test]
    fn main_simplified_form_when_q_full() {
        for n in 3..=20u32 {
            for v in 0..=n as u64 {
                let e = bound_main(n, (1 << n) - 1, v).unwrap();
                assert_eq!(e.radicand.unwrap(), standard_radicand(n, (n as u64 + v) / 2));
            }
        }
    }

    #[test]
    fn main_monotone_in_v_and_q() {
        for n in [6u32, 9, 12] {
            let full = (1u64 << n) - 1;
            for q in [0, 1, full / 3, full - 1, full] {
                for v in 0..n as u64 {
                    let a = bound_main(n, q, v).unwrap();
                    let b = bound_main(n, q, v + 1).unwrap();
                    assert!(a.real >= b.real);
                }
            }
            for v in 0..=n as u64 {
                for q in 0..full.min(200) {
                    assert!(bound_main(n, q + 1, v).unwrap().real >= bound_main(n, q, v).unwrap().real);
                }
            }
        }
    }

    #[test]
    fn gmu_coprime_displays() {
        let e = bound_gmu_coprime(5, None).unwrap();
        assert_eq!(e.radicand.as_ref().unwrap().to_string(), "784");
        assert_eq!(e.ceil_i64(), 2);
        let e = bound_gmu_coprime(8, None).unwrap();
        let want = float_bound(8, 256.0 + 7.0 / 3.0 * 4096.0 - 10.0 / 3.0 * 16.0);
        assert!((e.real.to_f64() - want).abs() < 1e-9);
        assert_eq!(e.radicand.as_ref().unwrap().to_string(), "9760");
        let e = bound_gmu_coprime(6, None).unwrap();
        let want = float_bound(6, 64.0 + 8.0 / 3.0 * 512.0 - 8.0 / 3.0 * 8.0);
        assert!((e.real.to_f64() - want).abs() < 1e-9);
        assert_eq!(bound_gmu_coprime(9, None), Err(BoundsError::MissingWeight(9)));
        let ctx = FieldCtx::new(9).unwrap();
        let wt = TracePolynomial::monomial(&ctx, FieldElement::ONE, 7)
            .unwrap()
            .truth_table()
            .unwrap()
            .weight();
        let e = bound_gmu_coprime(9, Some(wt)).unwrap();
        let want = float_bound(9, 512.0 + 511.0 * 64.0 - wt as f64 * 32.0);
        assert!((e.real.to_f64() - want).abs() < 1e-9);
        assert!(!bound_gmu_coprime(3, None).unwrap().applicable);
    }

    #[test]
    fn gmu_noncoprime_displays() {
        let v = bound_gmu_noncoprime(12, 3, None).unwrap();
        assert_eq!(v[0].name, "gmu_noncoprime");
        let want = float_bound(12, 4096.0 + 4095.0 * 64.0 * 128.0 / 9.0);
        assert!((v[0].real.to_f64() - want).abs() < 1e-6);
        assert_eq!(v[1].name, "family_4r");
        let v = bound_gmu_noncoprime(15, 3, None).unwrap();
        assert_eq!(v[0].radicand, Some(standard_radicand(15, 12)));
        let v = bound_gmu_noncoprime(14, 2, None).unwrap();
        assert_eq!(v[0].radicand, Some(standard_radicand(14, 10)));
        assert_eq!(v[1].name, "family_7r");
        assert_eq!(v[1].radicand, Some(standard_radicand(14, 10)));
        let v = bound_gmu_noncoprime(9, 3, None).unwrap();
        assert!(!v[0].applicable && !v[1].applicable);
        let v = bound_gmu_noncoprime(9, 3, Some(true)).unwrap();
        assert_eq!(v[1].radicand, Some(standard_radicand(9, 6)));
        assert!(!bound_gmu_noncoprime(7, 2, None).unwrap()[0].applicable);
    }

    #[test]
    fn rounding_invariant() {
        for n in 3..=24u32 {
            for v in 0..=n as u64 {
                let e = bound_main(n, (1 << n) - 1, v).unwrap();
                let one = BigInt::one() << FRAC_BITS as u64;
                let ceil_fixed = &e.ceil << FRAC_BITS as u64;
                assert!(e.real.raw() <= &ceil_fixed);
                assert!(ceil_fixed < e.real.raw() + one);
            }
        }
    }

    #[test]
    fn welch_reports() {
        let ctx = FieldCtx::new(4).unwrap();
        let f = TracePolynomial::monomial(&ctx, FieldElement::ONE, 7).unwrap();
        let r = compare_report(&f).unwrap();
        assert_eq!(r.q_size, 14);
        assert_eq!(r.v.v, 2);
        assert_eq!(r.entry("main").unwrap().ceil_i64(), 2);
        assert_eq!(r.nl2, Some(2));
        assert!(r.soundness_violations.is_empty(), "{:?}", r.soundness_violations);
        let ctx = FieldCtx::new(3).unwrap();
        let f = TracePolynomial::monomial(&ctx, FieldElement::ONE, 7).unwrap();
        let r = compare_report(&f).unwrap();
        assert_eq!(r.entry("main").unwrap().ceil_i64(), 1);
        assert_eq!(r.nl2, Some(1));
        assert!(r.soundness_violations.is_empty(), "{:?}", r.soundness_violations);
    }

    #[test]
    fn family_entries_follow_q() {
        let ctx = FieldCtx::new(12).unwrap();
        let f = TracePolynomial::g_mu(&ctx, 3, FieldElement::ONE).unwrap();
        let r = compare_report(&f).unwrap();
        assert!(r.q_size < ctx.group_order());
        assert!(r.entry("gmu_noncoprime").unwrap().applicable);
        let s4 = r.entry("family_4r").unwrap();
        assert!(!s4.applicable);
        assert!(s4.real > r.entry("radical_sum").unwrap().real);
        let ctx = FieldCtx::new(10).unwrap();
        let f = TracePolynomial::g_mu(&ctx, 2, FieldElement::ONE).unwrap();
        let r = compare_report(&f).unwrap();
        let s5 = r.entry("family_5r").unwrap();
        assert_eq!(s5.applicable, r.q_size == ctx.group_order());
    }

    #[test]
    fn normal_forms_and_gmu_detection() {
        assert_eq!(normal_forms(7, 4), vec![(2, 1), (3, 2), (3, 1)]);
        assert_eq!(gmu_r(7, 5), Some(1));
        assert_eq!(gmu_r((1 << 4) + (1 << 2) + 1, 14), Some(2));
        assert_eq!(gmu_r((1 << 9) + (1 << 5) + 1, 20), None);
    }
}
