//! Normalized univalent series (class S), the exterior class Σ and the
//! elementary transformations between them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{Complex, PowerSeries};

const NORMALIZATION_TOL: f64 = 1e-10;

/// `f(z) = z + a_2 z^2 + ...` with `a_0 = 0`, `a_1 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassSFunction {
    series: PowerSeries,
    label: String,
}

/// `g(z) = z + b_0 + b_1/z + b_2/z^2 + ...`, stored in descending powers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaFunction {
    pub b0: Complex,
    /// `tail[n-1] = b_n`.
    pub tail: Vec<Complex>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    Conjugation,
    Rotation(f64),
    Dilation(f64),
    DiskAutomorphism(Complex),
}

impl ClassSFunction {
    pub fn new(series: PowerSeries, label: impl Into<String>) -> Result<Self> {
        if series.order() < 1 {
            return Err(Error::ParamOutOfRange("class S series need order >= 1".into()));
        }
        let c0 = series.coeff(0);
        let c1 = series.coeff(1);
        if c0.norm() > NORMALIZATION_TOL || (c1 - 1.0).norm() > NORMALIZATION_TOL {
            return Err(Error::ParamOutOfRange(format!(
                "normalization needs c0 = 0, c1 = 1; got c0 = {c0}, c1 = {c1}"
            )));
        }
        Ok(ClassSFunction { series, label: label.into() })
    }

    pub fn series(&self) -> &PowerSeries {
        &self.series
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    /// `a_n`, zero beyond the truncation order.
    pub fn a(&self, n: usize) -> Complex {
        self.series.coeff(n)
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.series.eval(z)
    }

    pub fn with_order(&self, order: usize) -> Self {
        ClassSFunction { series: self.series.with_order(order), label: self.label.clone() }
    }

    pub fn transform(&self, kind: Transform) -> Result<Self> {
        transform(self, kind)
    }
}

/// The Koebe function `z/(1-z)^2 = sum n z^n`.
pub fn koebe(order: usize) -> ClassSFunction {
    let coeffs = (0..=order.max(1)).map(|n| Complex::new(n as f64, 0.0)).collect();
    ClassSFunction { series: PowerSeries::new(coeffs).expect("finite"), label: "koebe".into() }
}

pub fn identity(order: usize) -> ClassSFunction {
    ClassSFunction { series: PowerSeries::identity(order.max(1)), label: "identity".into() }
}

/// `e^{-iθ} k(e^{iθ} z)`.
pub fn koebe_rotated(theta: f64, order: usize) -> ClassSFunction {
    let mut f = koebe(order).transform(Transform::Rotation(theta)).expect("rotation is total");
    f.label = format!("koebe-rot:{theta}");
    f
}

pub fn transform(f: &ClassSFunction, kind: Transform) -> Result<ClassSFunction> {
    let s = &f.series;
    let (series, tag) = match kind {
        Transform::Conjugation => (s.conj(), "conj".to_string()),
        Transform::Rotation(theta) => {
            let u = Complex::from_polar(1.0, theta);
            (s.dilate(u).scale(u.conj()), format!("rot({theta})"))
        }
        Transform::Dilation(r) => {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::ParamOutOfRange(format!("dilation needs 0 < r < 1, got {r}")));
            }
            (s.dilate(Complex::new(r, 0.0)).scale(Complex::new(1.0 / r, 0.0)), format!("dil({r})"))
        }
        Transform::DiskAutomorphism(a) => {
            if a.norm() >= 1.0 {
                return Err(Error::ParamOutOfRange(format!("automorphism needs |a| < 1, got {a}")));
            }
            (disk_automorphism(s, a)?, format!("aut({},{})", a.re, a.im))
        }
    };
    ClassSFunction::new(series, format!("{}|{}", f.label, tag))
}

/// Largest degree whose coefficient in `f∘m`, `m(z) = (z+a)/(1+āz)`, is
/// determined to `eps` by the first `n` coefficients of `f`, assuming
/// `|a_k| <= k` beyond the truncation. Uses the Cauchy estimate
/// `|[z^j] m^k| <= μ(ρ)^k ρ^{-j}` with `μ(ρ) = (ρ+|a|)/(1+|a|ρ)`.
pub fn automorphism_reliable_order(n: usize, a: f64, eps: f64) -> usize {
    if a == 0.0 {
        return n;
    }
    let m = (n + 1) as f64;
    let err = |j: usize| {
        (1..200)
            .map(|i| {
                let rho = i as f64 / 200.0;
                let mu = (rho + a) / (1.0 + a * rho);
                let log_tail = m * mu.ln() + ((m * m + 2.0) / (1.0 - mu).powi(3)).ln();
                log_tail - j as f64 * rho.ln()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let bound = eps.ln();
    (0..=n).take_while(|&j| err(j) <= bound).last().unwrap_or(0)
}

/// `[f((z+a)/(1+āz)) - f(a)] / [(1-|a|^2) f'(a)]`, with the Möbius map expanded
/// to the working order. The result is cut at the degree where the omitted
/// tail of `f` could still matter (see [`automorphism_reliable_order`]).
fn disk_automorphism(s: &PowerSeries, a: Complex) -> Result<PowerSeries> {
    let n = s.order();
    let keep = automorphism_reliable_order(n, a.norm(), 1e-13);
    if keep < 2 {
        return Err(Error::ParamOutOfRange(format!("automorphism with |a| = {} leaves no reliable coefficients at order {n}", a.norm())));
    }
    let mut mobius = vec![Complex::new(0.0, 0.0); n + 1];
    // (z + a) * sum (-ā z)^k
    let q = -a.conj();
    let mut p = Complex::new(1.0, 0.0);
    for k in 0..=n {
        mobius[k] += a * p;
        if k < n {
            mobius[k + 1] += p;
        }
        p *= q;
    }
    let inner = PowerSeries::new(mobius).expect("finite");
    let g = s.compose_polynomial(&inner);
    let c0 = g.coeff(0);
    let c1 = g.coeff(1);
    let mut out = g.coeffs().to_vec();
    out[0] -= c0;
    for c in out.iter_mut() {
        *c /= c1;
    }
    Ok(PowerSeries::new(out)?.with_order(keep))
}

/// `g(z) = 1/f(1/z)`. With `f` of order `N` the tail holds `b_1..b_{N-2}`.
pub fn to_sigma(f: &ClassSFunction) -> SigmaFunction {
    let n = f.order();
    if n < 2 {
        return SigmaFunction { b0: Complex::new(0.0, 0.0), tail: Vec::new() };
    }
    let q = f.series.shift_down().with_order(n - 1);
    let r = q.recip().expect("q(0) = 1");
    SigmaFunction { b0: r.coeff(1), tail: (2..n).map(|k| r.coeff(k)).collect() }
}

impl SigmaFunction {
    pub fn b(&self, n: usize) -> Complex {
        if n == 0 {
            self.b0
        } else {
            self.tail.get(n - 1).copied().unwrap_or_default()
        }
    }

    /// Inverts back into class S at order `tail.len() + 2`.
    pub fn to_class_s(&self, label: &str) -> Result<ClassSFunction> {
        let m = self.tail.len() + 1;
        let mut r = vec![Complex::new(1.0, 0.0), self.b0];
        r.extend_from_slice(&self.tail);
        let q = PowerSeries::new(r)?.recip()?;
        let f = q.with_order(m + 1).shift_up();
        ClassSFunction::new(f, label)
    }

    /// Laurent evaluation for `|z| > 1`.
    pub fn eval(&self, z: Complex) -> Complex {
        let w = z.inv();
        let tail = self.tail.iter().rev().fold(Complex::new(0.0, 0.0), |acc, &b| (acc + b) * w);
        z + self.b0 + tail
    }
}

/// `h(z) = sqrt(f(z^2))`, an odd function with `h(z)^2 = f(z^2)`.
pub fn odd_sqrt_transform(f: &ClassSFunction) -> ClassSFunction {
    let n = f.order();
    let m = n - 1;
    let q = f.series.shift_down().with_order(m);
    let z2 = PowerSeries::monomial(m, 2, Complex::new(1.0, 0.0));
    let root = q
        .compose(&z2)
        .and_then(|s| s.sqrt())
        .expect("q(0) = 1 and z^2 vanishes at 0");
    ClassSFunction {
        series: root.with_order(n).shift_up(),
        label: format!("sqrt({})", f.label),
    }
}

/// Resolves a registry name: `koebe`, `identity`, `koebe-rot:<θ>`, `coeffs:<json>`.
///
/// `coeffs:` accepts either a series object `{"order":..,"coeffs":[[re,im],..]}`
/// or a bare array of reals or `[re,im]` pairs starting at `c_0`.
pub fn from_registry(spec: &str, order: usize) -> Result<ClassSFunction> {
    let spec = spec.trim();
    if spec == "koebe" {
        return Ok(koebe(order));
    }
    if spec == "identity" {
        return Ok(identity(order));
    }
    if let Some(theta) = spec.strip_prefix("koebe-rot:") {
        let theta: f64 = theta.parse().map_err(|_| Error::UnknownFunction(spec.into()))?;
        return Ok(koebe_rotated(theta, order));
    }
    if let Some(json) = spec.strip_prefix("coeffs:") {
        let series = parse_coeffs(json).ok_or_else(|| Error::UnknownFunction(spec.into()))?;
        return ClassSFunction::new(series.with_order(order.max(series.order())), "coeffs");
    }
    Err(Error::UnknownFunction(spec.into()))
}

fn parse_coeffs(json: &str) -> Option<PowerSeries> {
    if let Ok(s) = serde_json::from_str::<PowerSeries>(json) {
        return Some(s);
    }
    let v: serde_json::Value = serde_json::from_str(json).ok()?;
    let items = v.as_array()?;
    let coeffs = items
        .iter()
        .map(|it| match it {
            serde_json::Value::Number(x) => Some(Complex::new(x.as_f64()?, 0.0)),
            serde_json::Value::Array(p) if p.len() == 2 => {
                Some(Complex::new(p[0].as_f64()?, p[1].as_f64()?))
            }
            _ => None,
        })
        .collect::<Option<Vec<_>>>()?;
    PowerSeries::new(coeffs).ok()
}
