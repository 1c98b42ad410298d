//! Linearized polynomials `Σ α_i x^(2^i)` over GF(2^n).

use std::fmt;

use thiserror::Error;

use crate::field::{FieldCtx, FieldElement, FieldError};
use crate::numtheory::p_valuation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinPolyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("{got} shifts given for {want} terms")]
    ShiftLength { got: usize, want: usize },
    #[error("r must be positive")]
    ZeroR,
    #[error("cannot parse term '{0}'")]
    ParseTerm(String),
    #[error("coefficient {coeff:#x} does not fit in GF(2^{n})")]
    CoeffRange { coeff: u32, n: u32 },
}

/// A linearized polynomial with signed Frobenius exponents, kept as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearizedPoly {
    ctx: FieldCtx,
    terms: Vec<(FieldElement, i64)>,
}

/// Kernel dimension together with the all-zero flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelDim {
    pub dim: u32,
    /// Set when the polynomial is identically zero on GF(2^n).
    pub degenerate: bool,
}

impl LinearizedPoly {
    /// Zero coefficients are dropped; exponents are stored unreduced.
    pub fn new(ctx: &FieldCtx, terms: impl IntoIterator<Item = (FieldElement, i64)>) -> Self {
        LinearizedPoly {
            ctx: ctx.clone(),
            terms: terms.into_iter().filter(|(c, _)| !c.is_zero()).collect(),
        }
    }

    /// The polynomial `x`.
    pub fn identity(ctx: &FieldCtx) -> Self {
        Self::new(ctx, [(FieldElement::ONE, 0)])
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    /// Terms as given, with signed exponents.
    pub fn terms(&self) -> &[(FieldElement, i64)] {
        &self.terms
    }

    /// Exponents reduced into `[0, n)`, like terms merged, zeros dropped;
    /// sorted by exponent.
    pub fn canonical(&self) -> Vec<(FieldElement, u32)> {
        let n = self.ctx.n() as usize;
        let mut acc = vec![FieldElement::ZERO; n];
        for &(c, e) in &self.terms {
            acc[e.rem_euclid(n as i64) as usize] += c;
        }
        acc.into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (c, e as u32))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().is_empty()
    }

    pub fn eval(&self, x: FieldElement) -> FieldElement {
        self.terms.iter().fold(FieldElement::ZERO, |acc, &(c, e)| {
            acc + self.ctx.mul(c, self.ctx.frobenius(x, e))
        })
    }

    /// Images of the basis vectors `x^0, ..., x^(n-1)`, i.e. the matrix columns.
    pub fn columns(&self) -> Vec<u32> {
        let canon = self.canonical();
        (0..self.ctx.n())
            .map(|b| {
                let e = self.ctx.basis(b);
                canon
                    .iter()
                    .fold(FieldElement::ZERO, |acc, &(c, k)| {
                        acc + self.ctx.mul(c, self.ctx.frobenius(e, k as i64))
                    })
                    .bits()
            })
            .collect()
    }

    pub fn kernel_dimension(&self) -> KernelDim {
        let dim = self.kernel_basis().len() as u32;
        KernelDim {
            dim,
            degenerate: self.is_zero(),
        }
    }

    /// A basis of the root space, found by elimination with tracked
    /// combinations of the input columns.
    pub fn kernel_basis(&self) -> Vec<FieldElement> {
        let n = self.ctx.n() as usize;
        // pivots[h] = (reduced column with leading bit h, combination mask)
        let mut pivots: Vec<Option<(u32, u32)>> = vec![None; n];
        let mut basis = Vec::new();
        for (b, col) in self.columns().into_iter().enumerate() {
            let mut v = col;
            let mut m = 1u32 << b;
            while v != 0 {
                let h = 31 - v.leading_zeros() as usize;
                match pivots[h] {
                    Some((pv, pm)) => {
                        v ^= pv;
                        m ^= pm;
                    }
                    None => {
                        pivots[h] = Some((v, m));
                        break;
                    }
                }
            }
            if v == 0 {
                basis.push(FieldElement::from_bits(m));
            }
        }
        basis
    }

    /// Every root, by span of the kernel basis. Size `2^dim`.
    pub fn roots(&self) -> Vec<FieldElement> {
        let basis = self.kernel_basis();
        let mut out = vec![FieldElement::ZERO];
        for v in basis {
            let extra: Vec<_> = out.iter().map(|&r| r + v).collect();
            out.extend(extra);
        }
        out.sort_unstable();
        out
    }

    /// Maps term `α_i x^(2^i)` to `α_i^(2^k) x^(2^(i + k + k_i n))`.
    ///
    /// This is the composition with the Frobenius `y -> y^(2^k)` term by term,
    /// so the root count is unchanged.
    pub fn frobenius_transform(&self, k: i64, shifts: &[i64]) -> Result<Self, LinPolyError> {
        if shifts.len() != self.terms.len() {
            return Err(LinPolyError::ShiftLength {
                got: shifts.len(),
                want: self.terms.len(),
            });
        }
        let n = self.ctx.n() as i64;
        let terms = self
            .terms
            .iter()
            .zip(shifts)
            .map(|(&(c, e), &ki)| (self.ctx.frobenius(c, k), e + k + ki * n));
        Ok(Self::new(&self.ctx, terms))
    }

    /// Parses `a3*X^2^5 + 01*X^2^-2`. A bare `X` is `X^2^0`; a missing
    /// coefficient is 1.
    pub fn parse(ctx: &FieldCtx, s: &str) -> Result<Self, LinPolyError> {
        let mut terms = Vec::new();
        for raw in s.split('+') {
            let t: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
            let err = || LinPolyError::ParseTerm(raw.trim().to_string());
            let (coeff, mono) = match t.split_once('*') {
                Some((c, m)) => (u32::from_str_radix(c, 16).map_err(|_| err())?, m),
                None => (1, t.as_str()),
            };
            let exp = match mono.strip_prefix('X').or_else(|| mono.strip_prefix('x')) {
                Some("") => 0,
                Some(rest) => rest
                    .strip_prefix("^2^")
                    .and_then(|e| e.parse::<i64>().ok())
                    .ok_or_else(err)?,
                None => return Err(err()),
            };
            let c = ctx.element(coeff).ok_or(LinPolyError::CoeffRange {
                coeff,
                n: ctx.n(),
            })?;
            terms.push((c, exp));
        }
        Ok(Self::new(ctx, terms))
    }
}

impl fmt::Display for LinearizedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (c, e)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*X^2^{e}")?;
        }
        Ok(())
    }
}

/// Number of roots of `z^(p^2) + b z` with `p = 2^r`.
///
/// With `g = gcd(n, r)`: if `v_2(n) <= v_2(r)` the count is `2^g` when `b`
/// is a `(p-1)`-th power; otherwise it is `2^(2g)` when `b` is a
/// `(p^2-1)`-th power. In every other case only `z = 0` is a root.
pub fn root_count_special(ctx: &FieldCtx, r: u32, b: FieldElement) -> Result<u64, LinPolyError> {
    if r == 0 {
        return Err(LinPolyError::ZeroR);
    }
    if b.is_zero() {
        return Err(FieldError::ZeroElement.into());
    }
    let n = ctx.n();
    let g = num_integer::gcd(n, r);
    let v2n = p_valuation(n as i64, 2).expect("n > 0");
    let v2r = p_valuation(r as i64, 2).expect("r > 0");
    // Only gcd(d, 2^n - 1) matters for the residue test, so use the
    // reduced exponents 2^g - 1 and 2^gcd(2r, n) - 1.
    if v2n <= v2r {
        if ctx.is_dth_power(b, (1u64 << g) - 1)? {
            return Ok(1 << g);
        }
    } else if ctx.is_dth_power(b, (1u64 << (2 * g)) - 1)? {
        return Ok(1 << (2 * g));
    }
    Ok(1)
}
