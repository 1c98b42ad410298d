//! Boolean functions on GF(2^n) given as trace polynomials.
//!
//! Covers truth tables, Walsh spectra, derivatives, the canonical quadratic
//! part of a cubic's derivative and its radical, and the exact
//! second-order nonlinearity for small `n`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldCtx, FieldElement, FieldError};
use crate::linpoly::LinearizedPoly;
use crate::numtheory::{ExponentSet, NumError};

/// Largest `n` for truth-table operations.
pub const MAX_TABLE_N: u32 = 24;
/// Largest `n` for materialized per-`a` sweeps.
pub const MAX_SWEEP_N: u32 = 16;
/// Largest `n` for counting-only per-`a` sweeps.
pub const MAX_COUNT_N: u32 = 24;
/// Largest `n` for the exhaustive RM(2, n) search.
pub const MAX_NL2_N: u32 = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoolFnError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("exponent {exp} outside [1, 2^{n} - 1]")]
    ExponentRange { exp: u64, n: u32 },
    #[error("{op} supports n <= {max}, got n = {n}")]
    TooLarge { op: &'static str, n: u32, max: u32 },
    #[error("exponent {0} has 2-weight above 3; derivatives are not quadratic")]
    NotCubic(u64),
    #[error("function has no term of 2-weight 3")]
    NoCubicTerm,
    #[error("cannot parse function term '{0}'")]
    Parse(String),
    #[error("coefficient {coeff:#x} does not fit in GF(2^{n})")]
    CoeffRange { coeff: u32, n: u32 },
}

fn check_cap(op: &'static str, n: u32, max: u32) -> Result<(), BoolFnError> {
    if n > max {
        Err(BoolFnError::TooLarge { op, n, max })
    } else {
        Ok(())
    }
}

/// `Tr(Σ c_l x^(d_l)) + constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TracePolynomial {
    ctx: FieldCtx,
    terms: Vec<(FieldElement, u64)>,
    constant: bool,
}

impl TracePolynomial {
    /// Terms with equal exponents are merged and zero coefficients dropped.
    pub fn new(
        ctx: &FieldCtx,
        terms: impl IntoIterator<Item = (FieldElement, u64)>,
        constant: bool,
    ) -> Result<Self, BoolFnError> {
        let top = ctx.group_order();
        let mut merged: BTreeMap<u64, FieldElement> = BTreeMap::new();
        for (c, d) in terms {
            if d == 0 || d > top {
                return Err(BoolFnError::ExponentRange { exp: d, n: ctx.n() });
            }
            if ctx.element(c.bits()).is_none() {
                return Err(BoolFnError::CoeffRange { coeff: c.bits(), n: ctx.n() });
            }
            *merged.entry(d).or_default() += c;
        }
        Ok(TracePolynomial {
            ctx: ctx.clone(),
            terms: merged
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(d, c)| (c, d))
                .collect(),
            constant,
        })
    }

    pub fn monomial(ctx: &FieldCtx, mu: FieldElement, d: u64) -> Result<Self, BoolFnError> {
        Self::new(ctx, [(mu, d)], false)
    }

    /// `Tr(μ x^(2^(2r) + 2^r + 1))`, exponent bits taken mod `n`.
    pub fn g_mu(ctx: &FieldCtx, r: u32, mu: FieldElement) -> Result<Self, BoolFnError> {
        let n = ctx.n();
        let d = (1u64 << (2 * r % n)) | (1u64 << (r % n)) | 1;
        Self::monomial(ctx, mu, d)
    }

    pub fn zero(ctx: &FieldCtx) -> Self {
        TracePolynomial {
            ctx: ctx.clone(),
            terms: Vec::new(),
            constant: false,
        }
    }

    /// Parses `coeff_hex:exponent_decimal` terms separated by commas, `+`
    /// or whitespace, e.g. `01:7` or `01:7, 1b:11`. Exponent 0 adds
    /// `Tr(coeff)` to the constant.
    pub fn parse(ctx: &FieldCtx, s: &str) -> Result<Self, BoolFnError> {
        let mut terms = Vec::new();
        let mut constant = false;
        let pieces = s
            .split(|c: char| c == ',' || c == '+' || c.is_whitespace())
            .filter(|p| !p.is_empty());
        for piece in pieces {
            let err = || BoolFnError::Parse(piece.to_string());
            let (c, d) = piece.split_once(':').ok_or_else(err)?;
            let c = c.trim_start_matches("0x");
            let c = u32::from_str_radix(c, 16).map_err(|_| err())?;
            let d: u64 = d.parse().map_err(|_| err())?;
            let c = ctx
                .element(c)
                .ok_or(BoolFnError::CoeffRange { coeff: c, n: ctx.n() })?;
            if d == 0 {
                constant ^= ctx.trace(c);
            } else {
                terms.push((c, d));
            }
        }
        if terms.is_empty() && !constant && s.trim().is_empty() {
            return Err(BoolFnError::Parse(s.to_string()));
        }
        Self::new(ctx, terms, constant)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn terms(&self) -> &[(FieldElement, u64)] {
        &self.terms
    }

    pub fn constant(&self) -> bool {
        self.constant
    }

    /// Maximum 2-weight over the terms.
    pub fn max_weight(&self) -> u32 {
        self.terms.iter().map(|t| t.1.count_ones()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: FieldElement) -> bool {
        self.terms.iter().fold(self.constant, |acc, &(c, d)| {
            acc ^ self.ctx.trace(self.ctx.mul(c, self.ctx.pow(x, d)))
        })
    }

    /// `f(x) + f(x + a)`, expanded with `(x+a)^d = Σ_{e ⊆ d} a^(d-e) x^e`.
    pub fn derivative(&self, a: FieldElement) -> TracePolynomial {
        let ctx = &self.ctx;
        if a.is_zero() {
            return Self::zero(ctx);
        }
        let mut terms = Vec::new();
        let mut constant = false;
        for &(c, d) in &self.terms {
            // proper submasks of d
            let mut e = (d - 1) & d;
            loop {
                let coeff = ctx.mul(c, ctx.pow(a, d ^ e));
                if e == 0 {
                    constant ^= ctx.trace(coeff);
                    break;
                }
                terms.push((coeff, e));
                e = (e - 1) & d;
            }
        }
        Self::new(ctx, terms, constant).expect("submask exponents stay in range")
    }

    fn cubic_guard(&self) -> Result<(), BoolFnError> {
        match self.terms.iter().find(|t| t.1.count_ones() > 3) {
            Some(&(_, d)) => Err(BoolFnError::NotCubic(d)),
            None => Ok(()),
        }
    }

    /// Canonical quadratic part of `D_a f`, affine terms discarded.
    pub fn quadratic_part(&self, a: FieldElement) -> Result<QuadraticForm, BoolFnError> {
        self.cubic_guard()?;
        let ctx = &self.ctx;
        let mut q = QuadraticForm::zero(ctx);
        if a.is_zero() {
            return Ok(q);
        }
        for &(c, d) in &self.terms {
            if d.count_ones() != 3 {
                continue;
            }
            let bits = set_bits(d);
            // Dropping bit w from d leaves x^(2^u + 2^v) with coefficient c a^(2^w).
            for drop in 0..3 {
                let w = bits[drop];
                let (u, v) = match drop {
                    0 => (bits[2], bits[1]),
                    1 => (bits[2], bits[0]),
                    _ => (bits[1], bits[0]),
                };
                let coeff = ctx.mul(c, ctx.frobenius(a, w as i64));
                q.add_weight_two(u, v, coeff);
            }
        }
        Ok(q)
    }

    /// Signed exponent set of the quadratic parts: the pairwise bit gaps of
    /// every weight-3 term, reduced to at most `n/2`, with negatives.
    pub fn delta_set(&self) -> Result<ExponentSet, BoolFnError> {
        self.cubic_guard()?;
        let n = self.ctx.n();
        let mut out = Vec::new();
        for &(_, d) in &self.terms {
            if d.count_ones() != 3 {
                continue;
            }
            let [w, v, u] = set_bits(d);
            for gap in [u - w, v - w, u - v] {
                let g = gap.min(n - gap) as i64;
                out.push(g);
                out.push(-g);
            }
        }
        if out.is_empty() {
            return Err(BoolFnError::NoCubicTerm);
        }
        Ok(ExponentSet::new(n, out)?)
    }

    /// `Q_f`: every `a` whose derivative is not affine, ascending.
    pub fn q_set(&self) -> Result<Vec<FieldElement>, BoolFnError> {
        check_cap("q_set", self.ctx.n(), MAX_SWEEP_N)?;
        self.cubic_guard()?;
        Ok(self
            .ctx
            .elements()
            .skip(1)
            .collect::<Vec<_>>()
            .into_par_iter()
            .filter(|&a| !self.quadratic_part(a).expect("guarded").is_zero())
            .collect())
    }

    /// `|Q_f|`, counted without materializing the set.
    pub fn q_set_size(&self) -> Result<u64, BoolFnError> {
        check_cap("q_set_size", self.ctx.n(), MAX_COUNT_N)?;
        self.cubic_guard()?;
        Ok((1..self.ctx.size())
            .into_par_iter()
            .filter(|&a| {
                !self
                    .quadratic_part(FieldElement::from_bits(a as u32))
                    .expect("guarded")
                    .is_zero()
            })
            .count() as u64)
    }

    /// Histogram of radical dimensions `r_a` over `a ≠ 0`, with the `a`
    /// whose quadratic part vanishes counted separately.
    pub fn radical_distribution(&self) -> Result<RadicalDistribution, BoolFnError> {
        let n = self.ctx.n();
        check_cap("radical_distribution", n, MAX_SWEEP_N)?;
        self.cubic_guard()?;
        let (counts, degenerate) = (1..self.ctx.size())
            .into_par_iter()
            .fold(
                || (vec![0u64; n as usize + 1], 0u64),
                |(mut counts, mut degenerate), a| {
                    let q = self
                        .quadratic_part(FieldElement::from_bits(a as u32))
                        .expect("guarded");
                    if q.is_zero() {
                        degenerate += 1;
                    } else {
                        counts[q.radical_dimension() as usize] += 1;
                    }
                    (counts, degenerate)
                },
            )
            .reduce(
                || (vec![0u64; n as usize + 1], 0u64),
                |(mut a, da), (b, db)| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    (a, da + db)
                },
            );
        Ok(RadicalDistribution {
            histogram: counts
                .into_iter()
                .enumerate()
                .filter(|&(_, c)| c > 0)
                .map(|(d, c)| (d as u32, c))
                .collect(),
            degenerate,
        })
    }

    pub fn truth_table(&self) -> Result<TruthTable, BoolFnError> {
        check_cap("truth_table", self.ctx.n(), MAX_TABLE_N)?;
        let ctx = &self.ctx;
        let mut tt = TruthTable::zeros(ctx);
        // Walk x = γ^k; each term's x^d advances by γ^d.
        let g = ctx.primitive_element();
        let steps: Vec<FieldElement> = self.terms.iter().map(|&(_, d)| ctx.pow(g, d)).collect();
        let mut cur: Vec<FieldElement> = self.terms.iter().map(|&(c, _)| c).collect();
        let mut x = FieldElement::ONE;
        for _ in 0..ctx.group_order() {
            let bit = cur.iter().fold(self.constant, |acc, &y| acc ^ ctx.trace(y));
            if bit {
                tt.set(x.bits() as usize, true);
            }
            for (y, s) in cur.iter_mut().zip(&steps) {
                *y = ctx.mul(*y, *s);
            }
            x = ctx.mul(x, g);
        }
        tt.set(0, self.eval(FieldElement::ZERO));
        Ok(tt)
    }
}

fn set_bits(d: u64) -> [u32; 3] {
    let w = d.trailing_zeros();
    let rest = d & (d - 1);
    let v = rest.trailing_zeros();
    let u = (rest & (rest - 1)).trailing_zeros();
    [w, v, u]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RadicalDistribution {
    pub histogram: BTreeMap<u32, u64>,
    pub degenerate: u64,
}

/// `Tr(Σ_{1 <= i <= n/2} c_i x^(2^i + 1))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    ctx: FieldCtx,
    /// Index 0 is unused and always zero.
    coeffs: Vec<FieldElement>,
}

impl QuadraticForm {
    pub fn zero(ctx: &FieldCtx) -> Self {
        QuadraticForm {
            ctx: ctx.clone(),
            coeffs: vec![FieldElement::ZERO; ctx.n() as usize / 2 + 1],
        }
    }

    /// Builds a form from `(i, c_i)` pairs with `1 <= i <= n - 1`;
    /// indices above `n/2` are folded onto `n - i`.
    pub fn from_terms(ctx: &FieldCtx, terms: impl IntoIterator<Item = (u32, FieldElement)>) -> Self {
        let mut q = Self::zero(ctx);
        for (i, c) in terms {
            assert!(i >= 1 && i < ctx.n(), "index {i} out of range");
            q.add_indexed(i, c);
        }
        q
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    /// `c_i` for `1 <= i <= n/2`.
    pub fn coeff(&self, i: u32) -> FieldElement {
        self.coeffs[i as usize]
    }

    fn add_indexed(&mut self, i: u32, c: FieldElement) {
        let n = self.ctx.n();
        // Tr(c x^(2^i+1)) = Tr(c^(2^(n-i)) x^(2^(n-i)+1))
        if 2 * i > n {
            self.coeffs[(n - i) as usize] += self.ctx.frobenius(c, (n - i) as i64);
        } else {
            self.coeffs[i as usize] += c;
        }
    }

    fn add_weight_two(&mut self, u: u32, v: u32, c: FieldElement) {
        // Tr(c x^(2^u+2^v)) = Tr(c^(2^-v) x^(2^(u-v)+1))
        self.add_indexed(u - v, self.ctx.frobenius(c, -(v as i64)));
    }

    /// Whether index `i` contributes; at `i = n/2` for even `n` the term
    /// vanishes exactly when `c + c^(2^(n/2)) = 0`.
    pub fn is_active(&self, i: u32) -> bool {
        let c = self.coeffs[i as usize];
        let n = self.ctx.n();
        if n.is_multiple_of(2) && 2 * i == n {
            !(c + self.ctx.frobenius(c, i as i64)).is_zero()
        } else {
            !c.is_zero()
        }
    }

    pub fn active_indices(&self) -> Vec<u32> {
        (1..self.coeffs.len() as u32).filter(|&i| self.is_active(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.active_indices().is_empty()
    }

    pub fn eval(&self, x: FieldElement) -> bool {
        let ctx = &self.ctx;
        let inner = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .fold(FieldElement::ZERO, |acc, (i, &c)| acc + ctx.mul(c, ctx.frobenius(x, i as i64)));
        ctx.trace(ctx.mul(inner, x))
    }

    pub fn truth_table(&self) -> Result<TruthTable, BoolFnError> {
        check_cap("truth_table", self.ctx.n(), MAX_TABLE_N)?;
        Ok(TruthTable::from_fn(&self.ctx, |x| self.eval(x)))
    }

    /// `Σ c_i x^(2^i) + (c_i x)^(2^-i)`, whose roots form the radical.
    pub fn polar_linpoly(&self) -> LinearizedPoly {
        let ctx = &self.ctx;
        let terms = self.coeffs.iter().enumerate().skip(1).flat_map(|(i, &c)| {
            let i = i as i64;
            [(c, i), (ctx.frobenius(c, -i), -i)]
        });
        LinearizedPoly::new(ctx, terms)
    }

    /// Dimension of the radical, `n` for the zero form.
    pub fn radical_dimension(&self) -> u32 {
        self.polar_linpoly().kernel_dimension().dim
    }
}

/// Ψ membership; `None` where the set is not defined for this parity of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PsiMembership {
    pub psi_e: Option<bool>,
    pub psi_o: Option<bool>,
}

/// Whether `a^p / μ` (with `p = 2^r`) is a `(p+1)`-th power and every root
/// `b` of `b^(p+1) = a^p / μ` has `Tr(b / a^(p+1)) = 0`.
///
/// For `r = 1`, `μ = 1` this is `Ψ_e` (even `n`) or `Ψ_o` (odd `n`).
pub fn psi_membership(
    ctx: &FieldCtx,
    r: u32,
    mu: FieldElement,
    a: FieldElement,
) -> Result<PsiMembership, BoolFnError> {
    if a.is_zero() || mu.is_zero() {
        return Err(FieldError::ZeroElement.into());
    }
    let ap = ctx.frobenius(a, r as i64);
    let target = ctx.mul(ap, ctx.inv(mu)?);
    let denom = ctx.inv(ctx.mul(ap, a))?;
    // p + 1 only matters mod 2^n - 1, and 2^r is periodic in r mod n there.
    let roots = ctx.dth_roots(target, (1u64 << (r % ctx.n())) + 1)?;
    let member = !roots.is_empty() && roots.iter().all(|&b| !ctx.trace(ctx.mul(b, denom)));
    Ok(if ctx.n().is_multiple_of(2) {
        PsiMembership { psi_e: Some(member), psi_o: None }
    } else {
        PsiMembership { psi_e: None, psi_o: Some(member) }
    })
}

/// Sizes of the three pieces `K_{a,1}, K_{a,2}, K_{a,3}` of the radical of
/// `D_a g_μ`, by direct counting over `x`, with `z = a x^p + a^p x`:
/// `z = 0`; `z^(p+1) = a^p/μ`; `z^(p^2) + (a^p/μ)^(p-1) z + 1/(μ^p a^p) = 0`.
pub fn radical_split(
    ctx: &FieldCtx,
    r: u32,
    mu: FieldElement,
    a: FieldElement,
) -> Result<[u64; 3], BoolFnError> {
    check_cap("radical_split", ctx.n(), MAX_SWEEP_N)?;
    if a.is_zero() || mu.is_zero() {
        return Err(FieldError::ZeroElement.into());
    }
    let r = r as i64;
    let ap = ctx.frobenius(a, r);
    let t = ctx.mul(ap, ctx.inv(mu)?);
    let p = 1u64 << r;
    let lin = ctx.pow(t, p - 1);
    let cst = ctx.inv(ctx.mul(ctx.frobenius(mu, r), ap))?;
    let mut out = [0u64; 3];
    for x in ctx.elements() {
        let z = ctx.mul(a, ctx.frobenius(x, r)) + ctx.mul(ap, x);
        if z.is_zero() {
            out[0] += 1;
        } else if ctx.pow(z, p + 1) == t {
            out[1] += 1;
        } else if (ctx.frobenius(z, 2 * r) + ctx.mul(lin, z) + cst).is_zero() {
            out[2] += 1;
        }
    }
    Ok(out)
}

/// A Boolean function as its packed truth table, indexed by element bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    n: u32,
    bits: Vec<u64>,
}

impl TruthTable {
    pub fn zeros(ctx: &FieldCtx) -> Self {
        Self::zeros_n(ctx.n())
    }

    fn zeros_n(n: u32) -> Self {
        let words = (1usize << n).div_ceil(64);
        TruthTable { n, bits: vec![0; words] }
    }

    pub fn from_fn(ctx: &FieldCtx, f: impl Fn(FieldElement) -> bool) -> Self {
        let mut tt = Self::zeros(ctx);
        for x in ctx.elements() {
            if f(x) {
                tt.set(x.bits() as usize, true);
            }
        }
        tt
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        let m = 1u64 << (i % 64);
        if v {
            self.bits[i / 64] |= m;
        } else {
            self.bits[i / 64] &= !m;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    pub fn weight(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn xor(&self, other: &TruthTable) -> TruthTable {
        assert_eq!(self.n, other.n);
        TruthTable {
            n: self.n,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// `Σ_x (-1)^(f(x) + w·x)` for every coordinate vector `w`.
    pub fn coordinate_spectrum(&self) -> Vec<i32> {
        let mut w: Vec<i32> = (0..self.len()).map(|i| 1 - 2 * self.get(i) as i32).collect();
        fwht(&mut w);
        w
    }

    /// `W_f(u) = Σ_x (-1)^(f(x) + Tr(ux))`, indexed by the bits of `u`.
    ///
    /// `Tr(ux) = m(u)·x` where bit `b` of `m(u)` is `Tr(u x^b)`, so the
    /// coordinate spectrum is read through that linear map.
    pub fn walsh_spectrum(&self, ctx: &FieldCtx) -> Vec<i32> {
        assert_eq!(ctx.n(), self.n, "table and field disagree on n");
        let hat = self.coordinate_spectrum();
        let n = self.n;
        let gram: Vec<u32> = (0..n)
            .map(|c| {
                (0..n).fold(0u32, |acc, b| {
                    acc | (ctx.trace(ctx.mul(ctx.basis(c), ctx.basis(b))) as u32) << b
                })
            })
            .collect();
        let mut out = vec![0i32; self.len()];
        // Gray-code walk so m(u) updates by one Gram column per step.
        let mut m = 0u32;
        out[0] = hat[0];
        for k in 1..self.len() {
            m ^= gram[k.trailing_zeros() as usize];
            let u = k ^ (k >> 1);
            out[u] = hat[m as usize];
        }
        out
    }

    /// `2^(n-1) - max|W_f| / 2`.
    pub fn nonlinearity(&self) -> u64 {
        let max = self
            .coordinate_spectrum()
            .iter()
            .map(|w| w.unsigned_abs())
            .max()
            .unwrap_or(0) as u64;
        (1u64 << (self.n - 1)) - max / 2
    }

    /// Algebraic normal form via the binary Möbius transform.
    pub fn anf(&self) -> TruthTable {
        let mut words = self.bits.clone();
        const MASKS: [u64; 6] = [
            0x5555_5555_5555_5555,
            0x3333_3333_3333_3333,
            0x0f0f_0f0f_0f0f_0f0f,
            0x00ff_00ff_00ff_00ff,
            0x0000_ffff_0000_ffff,
            0x0000_0000_ffff_ffff,
        ];
        for (i, mask) in MASKS.iter().enumerate().take(self.n.min(6) as usize) {
            for w in words.iter_mut() {
                *w ^= (*w & mask) << (1 << i);
            }
        }
        let mut stride = 1;
        while stride < words.len() {
            for block in words.chunks_mut(2 * stride) {
                let (lo, hi) = block.split_at_mut(stride);
                hi.iter_mut().zip(lo.iter()).for_each(|(h, l)| *h ^= l);
            }
            stride *= 2;
        }
        TruthTable { n: self.n, bits: words }
    }

    /// Largest monomial size in the ANF; 0 for constants.
    pub fn algebraic_degree(&self) -> u32 {
        let anf = self.anf();
        let mut deg = 0;
        for (wi, &w) in anf.bits.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                deg = deg.max((wi * 64 + b).count_ones());
                bits &= bits - 1;
            }
        }
        deg
    }

    /// Distance to the nearest function of degree at most 2.
    ///
    /// Walks every codeword of RM(2, n) in Gray-code order over the
    /// `1 + n + C(n,2)` ANF coefficients.
    pub fn nl2_exact(&self) -> Result<u64, BoolFnError> {
        check_cap("nl2_exact", self.n, MAX_NL2_N)?;
        let size = 1usize << self.n;
        let full = if size == 64 { u64::MAX } else { (1u64 << size) - 1 };
        let monomial = |m: usize| -> u64 {
            (0..size).fold(0u64, |acc, x| acc | (((x & m) == m) as u64) << x)
        };
        let mut gens = vec![monomial(0)];
        for i in 0..self.n as usize {
            gens.push(monomial(1 << i));
        }
        for i in 0..self.n as usize {
            for j in 0..i {
                gens.push(monomial((1 << i) | (1 << j)));
            }
        }
        let f = self.bits[0] & full;
        let mut cur = f;
        let mut best = cur.count_ones();
        for k in 1u64..(1u64 << gens.len()) {
            cur ^= gens[k.trailing_zeros() as usize];
            best = best.min(cur.count_ones());
        }
        Ok(best as u64)
    }
}

/// In-place unnormalized Walsh-Hadamard transform.
pub fn fwht(a: &mut [i32]) {
    let mut h = 1;
    while h < a.len() {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
        h *= 2;
    }
}
