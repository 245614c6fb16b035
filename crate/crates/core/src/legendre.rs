//! Legendre polynomials with exact rational coefficients and associated
//! Legendre functions (Condon–Shortley phase).
//!
//! Coefficients are built by Bonnet's recurrence
//! `(n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}`; Rodrigues' formula and the
//! explicit sum are kept as independent constructions. Real arguments are
//! evaluated exactly (an `f64` is a dyadic rational) and rounded once.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::Complex;

pub const MAX_DEGREE: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegendrePoly {
    pub degree: usize,
    /// `coeffs[k]` multiplies `x^k`.
    pub coeffs: Vec<BigRational>,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn binomial(n: usize, k: usize) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `(n-m)!/(n+m)!` as a float, for `0 <= m <= n`.
pub fn factorial_ratio(n: usize, m: usize) -> f64 {
    ((n - m + 1)..=(n + m)).fold(1.0, |acc, k| acc / k as f64)
}

/// Polynomial with a common denominator, evaluated exactly at dyadic points.
#[derive(Debug, Clone)]
struct ExactPoly {
    num: Vec<BigInt>,
    den: BigInt,
}

impl ExactPoly {
    fn from_rationals(c: &[BigRational]) -> Self {
        let den = c
            .iter()
            .fold(BigInt::one(), |acc, r| num_integer_lcm(&acc, r.denom()));
        let num = c.iter().map(|r| r.numer() * (&den / r.denom())).collect();
        ExactPoly { num, den }
    }

    fn eval(&self, x: f64) -> f64 {
        if self.num.iter().all(Zero::is_zero) {
            return 0.0;
        }
        let xr = BigRational::from_float(x).expect("finite argument");
        let (xn, xd) = (xr.numer().clone(), xr.denom().clone());
        let d = self.num.len() - 1;
        let mut qpow = vec![BigInt::one(); d + 1];
        for k in 1..=d {
            qpow[k] = &qpow[k - 1] * &xd;
        }
        let mut acc = self.num[d].clone();
        for k in (0..d).rev() {
            acc = acc * &xn + &self.num[k] * &qpow[d - k];
        }
        let den = &self.den * &qpow[d];
        BigRational::new_raw(acc, den).to_f64().expect("representable")
    }
}

fn num_integer_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.lcm(b)
}

fn differentiate(c: &[BigRational]) -> Vec<BigRational> {
    if c.len() <= 1 {
        return vec![BigRational::zero()];
    }
    c.iter().enumerate().skip(1).map(|(k, v)| v * q(k as i64)).collect()
}

impl LegendrePoly {
    pub fn at_one(&self) -> BigRational {
        self.coeffs.iter().fold(BigRational::zero(), |acc, c| acc + c)
    }

    pub fn eval(&self, x: f64) -> f64 {
        ExactPoly::from_rationals(&self.coeffs).eval(x)
    }

    pub fn eval_complex(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, c| acc * z + c.to_f64().unwrap_or(f64::NAN))
    }

    /// `d^m/dx^m P_n` with exact coefficients.
    pub fn derivative(&self, m: usize) -> Vec<BigRational> {
        let mut c = self.coeffs.clone();
        for _ in 0..m {
            c = differentiate(&c);
        }
        c
    }
}

fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(Error::DegreeTooLarge(n, MAX_DEGREE));
    }
    Ok(())
}

/// `P_n` via Bonnet's recurrence.
pub fn legendre_poly(n: usize) -> Result<LegendrePoly> {
    check_degree(n)?;
    let mut prev = vec![q(1)];
    if n == 0 {
        return Ok(LegendrePoly { degree: 0, coeffs: prev });
    }
    let mut cur = vec![q(0), q(1)];
    for k in 1..n {
        let mut next = vec![BigRational::zero(); k + 2];
        let a = BigRational::new(BigInt::from(2 * k + 1), BigInt::from(k + 1));
        let b = BigRational::new(BigInt::from(k), BigInt::from(k + 1));
        for (j, c) in cur.iter().enumerate() {
            next[j + 1] += c * &a;
        }
        for (j, c) in prev.iter().enumerate() {
            next[j] -= c * &b;
        }
        prev = cur;
        cur = next;
    }
    Ok(LegendrePoly { degree: n, coeffs: cur })
}

/// `P_n = (1/(2^n n!)) d^n/dx^n (x^2-1)^n`, differentiated term by term.
pub fn legendre_rodrigues(n: usize) -> Result<LegendrePoly> {
    check_degree(n)?;
    let mut coeffs = vec![BigRational::zero(); n + 1];
    let scale = BigInt::from(2).pow(n as u32) * factorial(n);
    for j in 0..=n {
        if 2 * j < n {
            continue;
        }
        let sign = if (n - j) % 2 == 0 { 1 } else { -1 };
        let c = binomial(n, j) * factorial(2 * j) / factorial(2 * j - n) * sign;
        coeffs[2 * j - n] = BigRational::new(c, scale.clone());
    }
    Ok(LegendrePoly { degree: n, coeffs })
}

/// `P_n = Σ_s (-1)^s (2n-2s)! / (2^n s! (n-s)! (n-2s)!) x^{n-2s}`.
pub fn legendre_explicit(n: usize) -> Result<LegendrePoly> {
    check_degree(n)?;
    let mut coeffs = vec![BigRational::zero(); n + 1];
    let two_n = BigInt::from(2).pow(n as u32);
    for s in 0..=n / 2 {
        let sign = if s % 2 == 0 { 1 } else { -1 };
        let num = factorial(2 * n - 2 * s) * sign;
        let den = &two_n * factorial(s) * factorial(n - s) * factorial(n - 2 * s);
        coeffs[n - 2 * s] = BigRational::new(num, den);
    }
    Ok(LegendrePoly { degree: n, coeffs })
}

/// Exact derivatives `P_n^{(m)}`, `m = 0..=n`, built once per degree.
fn derivative_table(n: usize) -> &'static [ExactPoly] {
    static TABLES: OnceLock<Vec<OnceLock<Vec<ExactPoly>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| (0..=MAX_DEGREE).map(|_| OnceLock::new()).collect());
    tables[n].get_or_init(|| {
        let p = legendre_poly(n).expect("degree checked");
        let mut c = p.coeffs;
        let mut out = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            out.push(ExactPoly::from_rationals(&c));
            c = differentiate(&c);
        }
        out
    })
}

/// `P_n(x)` evaluated exactly and rounded once.
pub fn legendre_value(n: usize, x: f64) -> Result<f64> {
    check_degree(n)?;
    Ok(derivative_table(n)[0].eval(x))
}

/// `P_n(x)` by the three-term recurrence in floating point.
pub fn legendre_recurrence_value(n: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return 1.0;
    }
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `P_n^m(x) = (-1)^m (1-x^2)^{m/2} P_n^{(m)}(x)` for `m >= 0`, and
/// `P_n^{-m} = (-1)^m (n-m)!/(n+m)! P_n^m`.
pub fn assoc_legendre(n: usize, m: i64, x: f64) -> Result<f64> {
    check_degree(n)?;
    let am = m.unsigned_abs() as usize;
    if am > n {
        return Err(Error::OrderOutOfRange { n, m });
    }
    if !(x.abs() <= 1.0) {
        return Err(Error::ParamOutOfRange(format!("|x| <= 1 required, got {x}")));
    }
    let poly = derivative_table(n)[am].eval(x);
    let w = ((1.0 - x) * (1.0 + x)).powf(am as f64 / 2.0);
    let sign = if am % 2 == 0 { 1.0 } else { -1.0 };
    let pos = sign * w * poly;
    if m >= 0 {
        Ok(pos)
    } else {
        Ok(sign * factorial_ratio(n, am) * pos)
    }
}

/// General Rodrigues form `((-1)^m / (2^n n!)) (1-x^2)^{m/2} d^{n+m}/dx^{n+m} (x^2-1)^n`,
/// valid for `-n <= m <= n` without the negative-order identity.
pub fn assoc_legendre_rodrigues(n: usize, m: i64, x: f64) -> Result<f64> {
    check_degree(n)?;
    if m.unsigned_abs() as usize > n {
        return Err(Error::OrderOutOfRange { n, m });
    }
    let mut c = vec![BigRational::zero(); 2 * n + 1];
    for j in 0..=n {
        let sign = if (n - j) % 2 == 0 { 1 } else { -1 };
        c[2 * j] = BigRational::from_integer(binomial(n, j) * sign);
    }
    let order = (n as i64 + m) as usize;
    for _ in 0..order {
        c = differentiate(&c);
    }
    let scale = BigRational::from_integer(BigInt::from(2).pow(n as u32) * factorial(n));
    let c: Vec<BigRational> = c.iter().map(|v| v / &scale).collect();
    let poly = ExactPoly::from_rationals(&c).eval(x);
    let w = ((1.0 - x) * (1.0 + x)).powf(m as f64 / 2.0);
    let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(sign * w * poly)
}

/// `Σ_{n=0}^{N} P_n(x) t^n`.
pub fn generating_partial_sum(x: f64, t: f64, n: usize) -> f64 {
    let mut sum = 1.0;
    let (mut p0, mut p1) = (1.0, x);
    let mut tp = 1.0;
    for k in 1..=n {
        tp *= t;
        sum += p1 * tp;
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    sum
}

pub fn generating_closed_form(x: f64, t: f64) -> f64 {
    1.0 / (1.0 - 2.0 * x * t + t * t).sqrt()
}

/// Schläfli's contour integral `(1/2πi) ∮ (ξ^2-1)^n / (2^n (ξ-z)^{n+1}) dξ`
/// on the circle `|ξ - z| = rho`, by the trapezoid rule with `q` nodes.
pub fn schlafli_integral(n: usize, z: Complex, rho: f64, q: usize) -> Complex {
    let mut acc = Complex::new(0.0, 0.0);
    for j in 0..q {
        let u = Complex::from_polar(1.0, 2.0 * PI * j as f64 / q as f64);
        let xi = z + u * rho;
        let base = (xi * xi - 1.0) / (u * (2.0 * rho));
        acc += base.powi(n as i32);
    }
    acc / q as f64
}

/// Schläfli quadrature with `rho = 1`, cross-checked against the polynomial.
pub fn schlafli_coeff(n: usize, z: Complex, q: usize) -> Result<Complex> {
    if q < 512 {
        return Err(Error::ParamOutOfRange(format!("Schläfli quadrature needs Q >= 512, got {q}")));
    }
    let value = schlafli_integral(n, z, 1.0, q);
    let poly = legendre_poly(n)?.eval_complex(z);
    let gap = (value - poly).norm();
    if gap > 1e-6 {
        return Err(Error::QuadratureUnderresolved(gap));
    }
    Ok(value)
}

/// `(1-x^2) P_n'' - 2x P_n' + n(n+1) P_n` from exactly differentiated
/// coefficients, each term rounded separately.
pub fn ode_residual(n: usize, x: f64) -> Result<f64> {
    check_degree(n)?;
    let t = derivative_table(n);
    let p = t[0].eval(x);
    let d1 = if n >= 1 { t[1].eval(x) } else { 0.0 };
    let d2 = if n >= 2 { t[2].eval(x) } else { 0.0 };
    Ok((1.0 - x * x) * d2 - 2.0 * x * d1 + (n * (n + 1)) as f64 * p)
}

/// `|P_n(cos δ) - [P_n(cos θ1) P_n(cos θ2) + 2 Σ_k (-1)^k P_n^{-k}(cos θ1) P_n^k(cos θ2) cos kφ]|`
/// with `cos δ = cos θ1 cos θ2 + sin θ1 sin θ2 cos φ`.
pub fn addition_theorem_residual(theta1: f64, theta2: f64, phi: f64, n: usize) -> Result<f64> {
    let (c1, c2) = (theta1.cos(), theta2.cos());
    let cd = (c1 * c2 + theta1.sin() * theta2.sin() * phi.cos()).clamp(-1.0, 1.0);
    let lhs = legendre_value(n, cd)?;
    let mut rhs = legendre_value(n, c1)? * legendre_value(n, c2)?;
    for k in 1..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let ki = k as i64;
        rhs += 2.0
            * sign
            * assoc_legendre(n, -ki, c1)?
            * assoc_legendre(n, ki, c2)?
            * (k as f64 * phi).cos();
    }
    Ok((lhs - rhs).abs())
}

/// Cosine-harmonic weights of `P_n(c^2 + (1-c^2) cos φ)`: entry `a` multiplies `cos aφ`.
///
/// Entry 0 is `P_n(c)^2`, entry `a >= 1` is `2 (n-a)!/(n+a)! (P_n^a(c))^2`, so
/// every weight is a nonnegative multiple of a square.
pub fn equal_angle_weights(n: usize, c: f64) -> Result<Vec<f64>> {
    let mut w = Vec::with_capacity(n + 1);
    w.push(legendre_value(n, c)?.powi(2));
    for a in 1..=n {
        let p = assoc_legendre(n, a as i64, c)?;
        w.push(2.0 * factorial_ratio(n, a) * p * p);
    }
    Ok(w)
}

/// One row of the coefficient table, rationals printed as `p/q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub coeffs: Vec<String>,
}

pub fn legendre_table(max_n: usize) -> Result<Vec<TableRow>> {
    (0..=max_n)
        .map(|n| {
            let p = legendre_poly(n)?;
            Ok(TableRow { n, coeffs: p.coeffs.iter().map(|c| c.to_string()).collect() })
        })
        .collect()
}

/// `∫_{-1}^{1} P_n P_m dx`, exact.
pub fn inner_product(n: usize, m: usize) -> Result<BigRational> {
    let (a, b) = (legendre_poly(n)?, legendre_poly(m)?);
    let mut acc = BigRational::zero();
    for (i, x) in a.coeffs.iter().enumerate() {
        for (j, y) in b.coeffs.iter().enumerate() {
            if (i + j) % 2 == 0 && !(x.is_zero() || y.is_zero()) {
                acc += x * y * BigRational::new(BigInt::from(2), BigInt::from(i + j + 1));
            }
        }
    }
    Ok(acc)
}

pub fn is_parity_clean(p: &LegendrePoly) -> bool {
    p.coeffs.iter().enumerate().all(|(k, c)| (k + p.degree) % 2 == 0 || c.is_zero())
}

pub fn max_abs_coeff(p: &LegendrePoly) -> BigRational {
    p.coeffs.iter().map(|c| c.abs()).fold(BigRational::zero(), |a, b| if b > a { b } else { a })
}
