//! Coefficient functionals and the classical inequalities for S and Σ:
//! area sums, coefficient and integral-mean bounds, growth/distortion
//! envelopes, Robertson sums, logarithmic coefficients, the Milin functional
//! and the Lebedev-Milin inequality.

use std::f64::consts::{E, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schlicht::{odd_sqrt_transform, ClassSFunction, SigmaFunction};
use crate::series::{Complex, PowerSeries, R_MAX};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// A list of `lhs <= rhs` checks sharing one tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub tolerance: f64,
    pub cases: Vec<Case>,
}

impl BoundReport {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        BoundReport { name: name.into(), tolerance, cases: Vec::new() }
    }

    /// Records `lhs <= rhs + tolerance`. NaN on either side fails.
    pub fn check(&mut self, id: impl Into<String>, lhs: f64, rhs: f64) -> bool {
        let pass = lhs <= rhs + self.tolerance;
        self.cases.push(Case { id: id.into(), lhs, rhs, pass });
        pass
    }

    pub fn all_pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.pass)
    }

    /// Largest `lhs - rhs` over all cases.
    pub fn worst_margin(&self) -> f64 {
        self.cases.iter().map(|c| c.lhs - c.rhs).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn extend(&mut self, other: BoundReport) {
        self.cases.extend(other.cases);
    }
}

/// `γ_k` with `log(f(z)/z) = 2 Σ γ_k z^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogCoefficients {
    /// `gamma[k-1] = γ_k`.
    pub gamma: Vec<Complex>,
    pub source: String,
}

impl LogCoefficients {
    pub fn gamma(&self, k: usize) -> Complex {
        self.gamma[k - 1]
    }

    /// Loewner-chain normalization `c_k = 2 γ_k`.
    pub fn c(&self, k: usize) -> Complex {
        self.gamma[k - 1] * 2.0
    }
}

/// `Σ_{n=1}^{N} n |b_n|^2`.
pub fn area_sum(g: &SigmaFunction, n: usize) -> f64 {
    (1..=n.min(g.tail.len())).map(|k| k as f64 * g.b(k).norm_sqr()).sum()
}

/// `|a_n|` against `n` and against `e·n` for `2 <= n <= N`.
pub fn coefficient_report(f: &ClassSFunction, n: usize, tol: f64) -> BoundReport {
    let mut rep = BoundReport::new("coefficients", tol);
    for k in 2..=n.min(f.order()) {
        let a = f.a(k).norm();
        rep.check(format!("a{k}<=n"), a, k as f64);
        rep.check(format!("a{k}<=e*n"), a, E * k as f64);
    }
    rep
}

/// `M_p(r, f) = ((1/2π) ∫ |f(r e^{iθ})|^p dθ)^{1/p}` by the periodic trapezoid rule.
pub fn integral_mean(f: &ClassSFunction, p: f64, r: f64, q: usize) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::ParamOutOfRange(format!("p must be positive and finite, got {p}")));
    }
    if q < 256 {
        return Err(Error::ParamOutOfRange(format!("quadrature needs Q >= 256, got {q}")));
    }
    if !(r > 0.0) {
        return Err(Error::ParamOutOfRange(format!("radius must be positive, got {r}")));
    }
    if r > R_MAX {
        return Err(Error::RadiusExceeded(r, R_MAX));
    }
    let s = f.series();
    let sum: f64 = (0..q)
        .map(|j| s.eval(Complex::from_polar(r, 2.0 * PI * j as f64 / q as f64)).norm().powf(p))
        .sum();
    Ok((sum / q as f64).powf(1.0 / p))
}

/// One step of the Littlewood argument at `r = 1 - 1/n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LittlewoodChain {
    pub n: usize,
    pub r: f64,
    pub abs_a: f64,
    pub m1: f64,
    /// `r^{-n} M_1(r)`, the Cauchy estimate.
    pub cauchy: f64,
    /// `1 / ((1-r) r^{n-1})`.
    pub bound: f64,
    /// `n (1 + 1/(n-1))^{n-1}`.
    pub closed_form: f64,
    pub e_n: f64,
}

pub fn littlewood_chain(f: &ClassSFunction, n: usize, q: usize) -> Result<LittlewoodChain> {
    if n < 2 {
        return Err(Error::ParamOutOfRange("the Littlewood chain needs n >= 2".into()));
    }
    let r = 1.0 - 1.0 / n as f64;
    let m1 = integral_mean(f, 1.0, r, q)?;
    let nf = n as f64;
    Ok(LittlewoodChain {
        n,
        r,
        abs_a: f.a(n).norm(),
        m1,
        cauchy: m1 / r.powi(n as i32),
        bound: 1.0 / ((1.0 - r) * r.powi(n as i32 - 1)),
        closed_form: nf * (1.0 + 1.0 / (nf - 1.0)).powi(n as i32 - 1),
        e_n: E * nf,
    })
}

/// Growth, distortion and `|z f'/f|` envelopes plus the `z f''/f'` disk at each point.
pub fn pointwise_bounds_check(f: &ClassSFunction, grid: &[Complex], tol: f64) -> BoundReport {
    let mut rep = BoundReport::new("bounds", tol);
    let s = f.series();
    let d1 = s.derivative();
    let d2 = d1.derivative();
    for z in grid {
        let r = z.norm();
        let id = format!("z=({:.6},{:.6})", z.re, z.im);
        let fz = s.eval(*z);
        let f1 = d1.eval(*z);
        let f2 = d2.eval(*z);
        let (p, m) = (1.0 + r, 1.0 - r);
        rep.check(format!("{id}:|f'|>=lower"), m / p.powi(3), f1.norm());
        rep.check(format!("{id}:|f'|<=upper"), f1.norm(), p / m.powi(3));
        rep.check(format!("{id}:|f|>=lower"), r / (p * p), fz.norm());
        rep.check(format!("{id}:|f|<=upper"), fz.norm(), r / (m * m));
        if r > 0.0 {
            let q = (z * f1 / fz).norm();
            rep.check(format!("{id}:|zf'/f|>=lower"), m / p, q);
            rep.check(format!("{id}:|zf'/f|<=upper"), q, p / m);
        }
        let dev = (z * f2 / f1 - 2.0 * r * r / (1.0 - r * r)).norm();
        rep.check(format!("{id}:zf''/f'"), dev, 4.0 * r / (1.0 - r * r));
    }
    rep
}

/// Partial sums `S_m = Σ_{k<=m} |c_{2k-1}|^2` of the odd square-root transform.
pub fn robertson_sums(f: &ClassSFunction, n: usize) -> Result<Vec<f64>> {
    if 2 * n > f.order() + 1 {
        return Err(Error::ParamOutOfRange(format!("need 2n-1 <= order, got n = {n}")));
    }
    let h = odd_sqrt_transform(f);
    let mut acc = 0.0;
    Ok((1..=n)
        .map(|k| {
            acc += h.a(2 * k - 1).norm_sqr();
            acc
        })
        .collect())
}

/// `γ_1..γ_N`, requiring `N < f.order()`.
pub fn log_coefficients(f: &ClassSFunction, n: usize) -> Result<LogCoefficients> {
    if n >= f.order() {
        return Err(Error::ParamOutOfRange(format!(
            "log coefficients up to {n} need order > {n}, got {}",
            f.order()
        )));
    }
    let q = f.series().shift_down().with_order(n);
    let l = q.log()?;
    Ok(LogCoefficients {
        gamma: (1..=n).map(|k| l.coeff(k) * 0.5).collect(),
        source: f.label().to_string(),
    })
}

/// `M_n = Σ_{m=1}^{n} Σ_{k=1}^{m} (k|γ_k|^2 - 1/k)`.
pub fn milin_from_gamma(gamma: &[Complex], n: usize) -> f64 {
    let mut inner = 0.0;
    let mut total = 0.0;
    for k in 1..=n {
        inner += k as f64 * gamma[k - 1].norm_sqr() - 1.0 / k as f64;
        total += inner;
    }
    total
}

/// `Σ_{k=1}^{n} (4/k - k|c_k|^2)(n-k+1)` with `c_k = 2γ_k`.
pub fn weinstein_form_from_gamma(gamma: &[Complex], n: usize) -> f64 {
    (1..=n)
        .map(|k| {
            let kf = k as f64;
            let c2 = 4.0 * gamma[k - 1].norm_sqr();
            (4.0 / kf - kf * c2) * (n - k + 1) as f64
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MilinValue {
    pub m_n: f64,
    pub weinstein: f64,
}

impl MilinValue {
    /// `|weinstein + 4 M_n|`, zero in exact arithmetic.
    pub fn form_gap(&self) -> f64 {
        (self.weinstein + 4.0 * self.m_n).abs()
    }
}

pub fn milin_functional(f: &ClassSFunction, n: usize) -> Result<MilinValue> {
    let lc = log_coefficients(f, n)?;
    let v = MilinValue {
        m_n: milin_from_gamma(&lc.gamma, n),
        weinstein: weinstein_form_from_gamma(&lc.gamma, n),
    };
    debug_assert!(v.form_gap() <= 1e-10 * (1.0 + v.m_n.abs()));
    Ok(v)
}

/// Both sides of `Σ_{k=0}^{n} |β_k|^2 <= (n+1) exp{(1/(n+1)) Σ_{m=1}^{n} Σ_{k=1}^{m} (k|α_k|^2 - 1/k)}`
/// where `Σ β_k z^k = exp(Σ α_k z^k)`. `alpha[k-1] = α_k`.
pub fn lebedev_milin_check(alpha: &[Complex], n: usize) -> Result<(f64, f64)> {
    if n > alpha.len() {
        return Err(Error::ParamOutOfRange(format!("n = {n} exceeds {} given α", alpha.len())));
    }
    let mut c = vec![Complex::new(0.0, 0.0); n + 1];
    c[1..].copy_from_slice(&alpha[..n]);
    let beta = PowerSeries::new(c)?.exp()?;
    let lhs: f64 = beta.coeffs().iter().map(|b| b.norm_sqr()).sum();
    let exponent = milin_from_gamma(alpha, n);
    let rhs = (n + 1) as f64 * (exponent / (n + 1) as f64).exp();
    Ok((lhs, rhs))
}

/// The exponent in its weighted form `Σ_{k=1}^{n} (n+1-k)(k|α_k|^2 - 1/k)`.
pub fn lebedev_milin_weighted_exponent(alpha: &[Complex], n: usize) -> f64 {
    (1..=n)
        .map(|k| {
            let kf = k as f64;
            (n + 1 - k) as f64 * (kf * alpha[k - 1].norm_sqr() - 1.0 / kf)
        })
        .sum()
}
