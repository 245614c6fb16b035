//! Truncated complex power series.
//!
//! A [`PowerSeries`] of order `N` stores `c_0..=c_N`. Binary operations insist
//! on equal orders; use [`PowerSeries::with_order`] to pad or cut first.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Threshold below which a leading coefficient counts as zero.
pub const EPS0: f64 = 1e-12;

/// Default evaluation radius for class-S semantics.
pub const R_MAX: f64 = 0.99;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries")]
pub struct PowerSeries {
    order: usize,
    coeffs: Vec<Complex>,
}

#[derive(Deserialize)]
struct RawSeries {
    order: usize,
    coeffs: Vec<Complex>,
}

impl TryFrom<RawSeries> for PowerSeries {
    type Error = Error;

    fn try_from(raw: RawSeries) -> Result<Self> {
        if raw.coeffs.len() != raw.order + 1 {
            return Err(Error::ParamOutOfRange(format!(
                "order {} needs {} coefficients, got {}",
                raw.order,
                raw.order + 1,
                raw.coeffs.len()
            )));
        }
        PowerSeries::new(raw.coeffs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transcendental {
    Exp,
    Log,
    Sqrt,
}

impl PowerSeries {
    /// Builds a series of order `coeffs.len() - 1`. Rejects empty or non-finite input.
    pub fn new(coeffs: Vec<Complex>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::ParamOutOfRange("a series needs at least c_0".into()));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(PowerSeries { order: coeffs.len() - 1, coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| Complex::new(x, 0.0)).collect())
    }

    pub fn zero(order: usize) -> Self {
        PowerSeries { order, coeffs: vec![Complex::new(0.0, 0.0); order + 1] }
    }

    pub fn constant(order: usize, c: Complex) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, Complex::new(1.0, 0.0))
    }

    /// The series `c z^k` (zero if `k > order`).
    pub fn monomial(order: usize, k: usize, c: Complex) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// The identity map `z`.
    pub fn identity(order: usize) -> Self {
        Self::monomial(order, 1, Complex::new(1.0, 0.0))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Pads with zeros or truncates to the given order.
    pub fn with_order(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Complex::new(0.0, 0.0));
        PowerSeries { order, coeffs }
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        Ok(())
    }

    fn map(&self, f: impl Fn(usize, Complex) -> Complex) -> Self {
        PowerSeries {
            order: self.order,
            coeffs: self.coeffs.iter().enumerate().map(|(i, &c)| f(i, c)).collect(),
        }
    }

    pub fn scale(&self, s: Complex) -> Self {
        self.map(|_, c| c * s)
    }

    pub fn conj(&self) -> Self {
        self.map(|_, c| c.conj())
    }

    /// `f(s z)`.
    pub fn dilate(&self, s: Complex) -> Self {
        let mut p = Complex::new(1.0, 0.0);
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c *= p;
            p *= s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.map(|i, c| c + other.coeffs[i]))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.map(|i, c| c - other.coeffs[i]))
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.order;
        let mut out = vec![Complex::new(0.0, 0.0); n + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == Complex::new(0.0, 0.0) {
                continue;
            }
            for (j, &b) in other.coeffs[..=n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PowerSeries { order: n, coeffs: out }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let b0 = other.coeffs[0];
        if b0.norm() < EPS0 {
            return Err(Error::DivisionByNonUnit(b0.norm()));
        }
        let mut d = vec![Complex::new(0.0, 0.0); self.order + 1];
        for n in 0..=self.order {
            let mut acc = self.coeffs[n];
            for k in 0..n {
                acc -= d[k] * other.coeffs[n - k];
            }
            d[n] = acc / b0;
        }
        Ok(PowerSeries { order: self.order, coeffs: d })
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one(self.order).div(self)
    }

    pub fn arith(&self, other: &Self, op: ArithOp) -> Result<Self> {
        match op {
            ArithOp::Add => self.add(other),
            ArithOp::Sub => self.sub(other),
            ArithOp::Mul => self.mul(other),
            ArithOp::Div => self.div(other),
        }
    }

    pub fn powi(&self, k: usize) -> Self {
        let mut out = Self::one(self.order);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        out
    }

    /// `exp(a)` for `a(0) = 0`, via `n b_n = sum_{k<n} (n-k) a_{n-k} b_k`.
    pub fn exp(&self) -> Result<Self> {
        if self.coeffs[0].norm() > EPS0 {
            return Err(Error::BranchPointAtOrigin { op: "exp", expected: "0" });
        }
        let a = &self.coeffs;
        let mut b = vec![Complex::new(0.0, 0.0); self.order + 1];
        b[0] = Complex::new(1.0, 0.0);
        for n in 1..=self.order {
            let mut acc = Complex::new(0.0, 0.0);
            for k in 0..n {
                acc += a[n - k] * b[k] * (n - k) as f64;
            }
            b[n] = acc / n as f64;
        }
        Ok(PowerSeries { order: self.order, coeffs: b })
    }

    /// Principal `log(a)` for `a(0) = 1`.
    pub fn log(&self) -> Result<Self> {
        if (self.coeffs[0] - 1.0).norm() > EPS0 {
            return Err(Error::BranchPointAtOrigin { op: "log", expected: "1" });
        }
        let a = &self.coeffs;
        let mut l = vec![Complex::new(0.0, 0.0); self.order + 1];
        for n in 1..=self.order {
            let mut acc = a[n] * n as f64;
            for k in 1..n {
                acc -= l[k] * a[n - k] * k as f64;
            }
            l[n] = acc / n as f64;
        }
        Ok(PowerSeries { order: self.order, coeffs: l })
    }

    /// Principal square root for `a(0) = 1`.
    pub fn sqrt(&self) -> Result<Self> {
        if (self.coeffs[0] - 1.0).norm() > EPS0 {
            return Err(Error::BranchPointAtOrigin { op: "sqrt", expected: "1" });
        }
        let a = &self.coeffs;
        let mut s = vec![Complex::new(0.0, 0.0); self.order + 1];
        s[0] = Complex::new(1.0, 0.0);
        for n in 1..=self.order {
            let mut acc = a[n];
            for k in 1..n {
                acc -= s[k] * s[n - k];
            }
            s[n] = acc * 0.5;
        }
        Ok(PowerSeries { order: self.order, coeffs: s })
    }

    pub fn transcendental(&self, f: Transcendental) -> Result<Self> {
        match f {
            Transcendental::Exp => self.exp(),
            Transcendental::Log => self.log(),
            Transcendental::Sqrt => self.sqrt(),
        }
    }

    /// `self ∘ inner`, requiring `inner(0) = 0`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.check_order(inner)?;
        if inner.coeffs[0].norm() > EPS0 {
            return Err(Error::InnerNotVanishing);
        }
        Ok(self.compose_polynomial(inner))
    }

    /// Horner substitution of the truncated polynomial into `inner`.
    ///
    /// No check on `inner(0)`: with a non-zero constant term this composes the
    /// polynomial, not the underlying function.
    pub(crate) fn compose_polynomial(&self, inner: &Self) -> Self {
        let n = self.order;
        let mut acc = Self::constant(n, self.coeffs[n]);
        for j in (0..n).rev() {
            acc = acc.mul_unchecked(inner);
            acc.coeffs[0] += self.coeffs[j];
        }
        acc
    }

    /// Compositional inverse, solved degree by degree.
    pub fn revert(&self) -> Result<Self> {
        let n = self.order;
        if n == 0 || self.coeffs[0].norm() > EPS0 || self.coeffs[1].norm() < EPS0 {
            return Err(Error::NotInvertibleAtOrigin);
        }
        let a = &self.coeffs;
        let zero = Complex::new(0.0, 0.0);
        // pw[j][m] = [z^m] b^j, filled column by column as b_m becomes known.
        let mut pw = vec![vec![zero; n + 1]; n + 1];
        let mut b = vec![zero; n + 1];
        b[1] = a[1].inv();
        pw[1][1] = b[1];
        for m in 2..=n {
            let mut acc = zero;
            for j in 2..=m {
                let mut c = zero;
                for k in 1..=m + 1 - j {
                    c += b[k] * pw[j - 1][m - k];
                }
                pw[j][m] = c;
                acc += a[j] * c;
            }
            b[m] = -acc / a[1];
            pw[1][m] = b[m];
        }
        Ok(PowerSeries { order: n, coeffs: b })
    }

    /// Term-wise derivative, kept at the same order (top coefficient becomes 0).
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero(self.order);
        for k in 1..=self.order {
            out.coeffs[k - 1] = self.coeffs[k] * k as f64;
        }
        out
    }

    /// Shift down by one degree: `(f(z) - f(0)) / z`, padded at the top.
    pub fn shift_down(&self) -> Self {
        let mut out = Self::zero(self.order);
        out.coeffs[..self.order].copy_from_slice(&self.coeffs[1..]);
        out
    }

    /// Multiply by `z`, dropping the top coefficient.
    pub fn shift_up(&self) -> Self {
        let mut out = Self::zero(self.order);
        out.coeffs[1..].copy_from_slice(&self.coeffs[..self.order]);
        out
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs.iter().rev().fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Evaluation restricted to `|z| <= r_max`.
    pub fn eval_in_disk(&self, z: Complex, r_max: f64) -> Result<Complex> {
        if z.norm() > r_max {
            return Err(Error::RadiusExceeded(z.norm(), r_max));
        }
        Ok(self.eval(z))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.order.max(other.order);
        (0..=n).map(|k| (self.coeff(k) - other.coeff(k)).norm()).fold(0.0, f64::max)
    }
}

pub fn ps_arith(a: &PowerSeries, b: &PowerSeries, op: ArithOp) -> Result<PowerSeries> {
    a.arith(b, op)
}

pub fn ps_transcendental(a: &PowerSeries, f: Transcendental) -> Result<PowerSeries> {
    a.transcendental(f)
}

pub fn ps_compose(outer: &PowerSeries, inner: &PowerSeries) -> Result<PowerSeries> {
    outer.compose(inner)
}

pub fn ps_revert(a: &PowerSeries) -> Result<PowerSeries> {
    a.revert()
}

pub fn ps_eval(a: &PowerSeries, z: Complex) -> Complex {
    a.eval(z)
}
