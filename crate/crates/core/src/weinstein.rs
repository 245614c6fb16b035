//! The weights `Λ_k^n(t)` and boundary integrals `A_k(t)` behind the
//! nonnegative decomposition of the Milin functional.
//!
//! `Λ_k^n(t)` is the coefficient of `z^{n+1}` in `e^t w_t^{k+1} / (1 - w_t^2)`,
//! where `w_t` is the Koebe transition. Three independent routes compute it:
//! power-series algebra, a Fourier integral of Chebyshev `U_n`, and a sum of
//! squared associated Legendre values.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::{log_coefficients, milin_functional, BoundReport};
use crate::legendre::equal_angle_weights;
use crate::loewner::{chain_log_coeffs_series, herglotz_p, koebe_transition_series, LoewnerChain};
use crate::schlicht::{koebe, ClassSFunction};
use crate::series::{Complex, PowerSeries};

fn cx(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

/// `Λ_k^0..Λ_k^N` at time `t`.
pub fn lambda_series(t: f64, k: usize, n: usize) -> Result<Vec<f64>> {
    let m = n + 1;
    let w = koebe_transition_series(t, m)?;
    let w2 = w.mul(&w)?;
    let den = PowerSeries::one(m).sub(&w2)?;
    let g = w.powi(k + 1).scale(cx(t.exp())).div(&den)?;
    let out: Vec<f64> = (0..=n).map(|j| g.coeff(j + 1).re).collect();
    debug_assert!((0..=n).all(|j| g.coeff(j + 1).im.abs() <= 1e-12 * (1.0 + g.coeff(j + 1).re.abs())));
    Ok(out)
}

/// Every `Λ_k^n(t)` with `k, n <= max_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaTable {
    pub t: f64,
    pub max_n: usize,
    /// `values[k][n] = Λ_k^n(t)`.
    pub values: Vec<Vec<f64>>,
}

impl LambdaTable {
    pub fn build(t: f64, max_n: usize) -> Result<Self> {
        let values = (0..=max_n)
            .into_par_iter()
            .map(|k| lambda_series(t, k, max_n))
            .collect::<Result<Vec<_>>>()?;
        Ok(LambdaTable { t, max_n, values })
    }

    pub fn get(&self, k: usize, n: usize) -> f64 {
        self.values[k][n]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `cos δ = 1 - e^{-t} + e^{-t} cos φ`, always in `[1 - 2e^{-t}, 1]`.
pub fn cos_delta(t: f64, phi: f64) -> f64 {
    let e = (-t).exp();
    let x = 1.0 - e + e * phi.cos();
    assert!((-1.0..=1.0).contains(&x) && x >= 1.0 - 2.0 * e - 1e-15, "cos δ out of range");
    x
}

/// `U_n(x)` with `Σ U_n(x) z^n = 1/(1 - 2xz + z^2)`.
pub fn chebyshev_u(n: usize, x: f64) -> f64 {
    let (mut u0, mut u1) = (1.0, 2.0 * x);
    if n == 0 {
        return u0;
    }
    for _ in 1..n {
        let u2 = 2.0 * x * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    u1
}

/// `(1/2π) ∫ U_n(cos δ) cos kφ dφ` by the trapezoid rule with `q` nodes.
pub fn lambda_fourier_oracle(t: f64, k: usize, n: usize, q: usize) -> Result<f64> {
    if q < 1024 {
        return Err(Error::ParamOutOfRange(format!("Fourier oracle needs Q >= 1024, got {q}")));
    }
    let sum: f64 = (0..q)
        .map(|j| {
            let phi = 2.0 * PI * j as f64 / q as f64;
            chebyshev_u(n, cos_delta(t, phi)) * (k as f64 * phi).cos()
        })
        .sum();
    Ok(sum / q as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LegendreRoute {
    pub value: f64,
    /// Smallest contributing summand; each is a product of squares times positive weights.
    pub min_summand: f64,
    pub summands: usize,
}

/// `Λ_k^n(t)` from `U_n = Σ_{i+j=n} P_i P_j` with each factor expanded in
/// `cos aφ` at `cos θ = sqrt(1 - e^{-t})`, products reduced by
/// `cos aφ cos bφ = (cos(a+b)φ + cos(a-b)φ)/2`.
pub fn legendre_route_check(t: f64, n: usize, k: usize) -> Result<LegendreRoute> {
    if n > 12 {
        return Err(Error::ParamOutOfRange(format!("Legendre route supports n <= 12, got {n}")));
    }
    let c = (-(-t).exp_m1()).sqrt();
    let weights = (0..=n).map(|i| equal_angle_weights(i, c)).collect::<Result<Vec<_>>>()?;
    // Λ_0 is the mean; Λ_k for k >= 1 is half the cos kφ coefficient.
    let scale = if k == 0 { 1.0 } else { 0.5 };
    let mut value = 0.0;
    let mut min_summand = f64::INFINITY;
    let mut summands = 0;
    for i in 0..=n {
        let (wi, wj) = (&weights[i], &weights[n - i]);
        for (a, &x) in wi.iter().enumerate() {
            for (b, &y) in wj.iter().enumerate() {
                let hits = usize::from(a + b == k) + usize::from(a.abs_diff(b) == k);
                if hits == 0 {
                    continue;
                }
                let s = 0.5 * x * y * scale;
                for _ in 0..hits {
                    value += s;
                    min_summand = min_summand.min(s);
                    summands += 1;
                }
            }
        }
    }
    if summands == 0 {
        min_summand = 0.0;
    }
    Ok(LegendreRoute { value, min_summand, summands })
}

/// Large-`t` asymptote `e^{-kt} [z^{n+1}] k(z)^{k+1}`.
pub fn lambda_asymptote(t: f64, k: usize, n: usize) -> f64 {
    let kz = koebe(n + 1);
    (-(k as f64) * t).exp() * kz.series().powi(k + 1).coeff(n + 1).re
}

/// `d_k = 4/k - k|c_k|^2` from the log coefficients of `f`.
pub fn milin_weights(f: &ClassSFunction, n: usize) -> Result<Vec<f64>> {
    let lc = log_coefficients(f, n)?;
    Ok((1..=n)
        .map(|k| {
            let kf = k as f64;
            4.0 / kf - kf * lc.c(k).norm_sqr()
        })
        .collect())
}

/// Compares `Σ_n (Σ_k d_k (n-k+1)) z^{n+1}` with `z/(1-z)^2 Σ_k d_k z^k` at
/// the sample points; each case passes when the gap is below the
/// truncation tail plus the report tolerance.
pub fn milin_generating_identity(
    f: &ClassSFunction,
    n: usize,
    samples: &[Complex],
    tol: f64,
) -> Result<BoundReport> {
    if n > 40 {
        return Err(Error::ParamOutOfRange(format!("identity check supports N <= 40, got {n}")));
    }
    let d = milin_weights(f, n)?;
    let mut rep = BoundReport::new("milin-generating", tol);
    for z in samples {
        if z.norm() > 0.5 {
            return Err(Error::ParamOutOfRange(format!("sample {z} outside |z| <= 0.5")));
        }
        let mut lhs = cx(0.0);
        for m in 1..=n {
            let inner: f64 = (1..=m).map(|k| d[k - 1] * (m - k + 1) as f64).sum();
            lhs += z.powu(m as u32 + 1) * inner;
        }
        let poly = d.iter().enumerate().fold(cx(0.0), |acc, (i, &dk)| acc + z.powu(i as u32 + 1) * dk);
        let rhs = z / ((1.0 - z) * (1.0 - z)) * poly;
        // Terms of degree > N+1 that the truncated left side omits.
        let r = z.norm();
        let dsum: f64 = d.iter().map(|x| x.abs()).sum();
        let mut tail = 0.0;
        let mut m = n + 1;
        loop {
            let term = r.powi(m as i32 + 1) * dsum * m as f64;
            tail += term;
            if term < 1e-18 || m > 10_000 {
                break;
            }
            m += 1;
        }
        rep.check(format!("z=({:.3},{:.3})", z.re, z.im), (lhs - rhs).norm(), tail);
    }
    Ok(rep)
}

/// `A_k(t) = (1/2π) ∫ Re p(z_1, t) |2 C_0^k - k c_k z_1^k|^2 dθ` on `|z_1| = r`,
/// with `C_0^k = 1 + Σ_{l<=k} l c_l z_1^l`.
pub fn a_k_integral(chain: &LoewnerChain, k: usize, t: f64, r: f64, q: usize) -> Result<f64> {
    let c = chain_log_coeffs_series(chain, t, k.max(1))?;
    a_k_with_coeffs(chain, &c, k, t, r, q)
}

fn a_k_with_coeffs(chain: &LoewnerChain, c: &[Complex], k: usize, t: f64, r: f64, q: usize) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::ParamOutOfRange(format!("radius must lie in (0, 1), got {r}")));
    }
    if k > 10 {
        return Err(Error::ParamOutOfRange(format!("A_k supports k <= 10, got {k}")));
    }
    let vals = (0..q)
        .into_par_iter()
        .map(|j| {
            let z = Complex::from_polar(r, 2.0 * PI * j as f64 / q as f64);
            let rp = herglotz_p(chain, z, t)?.re;
            Ok(rp * boundary_polynomial(c, k, z).norm_sqr())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(vals.iter().sum::<f64>() / q as f64)
}

/// `2 C_0^k - k c_k z^k`.
fn boundary_polynomial(c: &[Complex], k: usize, z: Complex) -> Complex {
    let mut c0 = cx(1.0);
    for l in 1..=k {
        c0 += c[l - 1] * z.powu(l as u32) * l as f64;
    }
    let last = if k == 0 { cx(0.0) } else { c[k - 1] * z.powu(k as u32) * k as f64 };
    c0 * 2.0 - last
}

/// Every quadrature-node integrand value is nonnegative.
pub fn a_k_integrand_min(chain: &LoewnerChain, k: usize, t: f64, r: f64, q: usize) -> Result<f64> {
    let c = chain_log_coeffs_series(chain, t, k.max(1))?;
    let mut m = f64::INFINITY;
    for j in 0..q {
        let z = Complex::from_polar(r, 2.0 * PI * j as f64 / q as f64);
        m = m.min(herglotz_p(chain, z, t)?.re * boundary_polynomial(&c, k, z).norm_sqr());
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionParams {
    pub n: usize,
    pub horizon: f64,
    pub radius: f64,
    pub quad: usize,
    pub dt: f64,
}

impl Default for DecompositionParams {
    fn default() -> Self {
        DecompositionParams { n: 6, horizon: 8.0, radius: 0.99, quad: 1024, dt: 0.02 }
    }
}

/// Outcome of comparing `Σ_k d_k (n-k+1)` with `∫_0^∞ g_n(t) dt`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeinsteinCase {
    pub label: String,
    pub n: usize,
    pub r: f64,
    pub horizon: f64,
    /// `Σ_k (4/k - k|c_k(0)|^2)(n-k+1)`.
    pub lhs: f64,
    /// `∫_0^T g_n(t) dt` by the trapezoid rule.
    pub rhs: f64,
    /// Estimated `∫_T^∞ g_n`, from the `e^{-kt}` decay of `Λ_k^n`.
    pub tail: f64,
    pub min_g: f64,
    pub min_lambda: f64,
    /// `(t, g_n(t))` samples.
    pub g: Vec<(f64, f64)>,
    /// `A_k` at `t = 0`, `k = 1..=n`.
    pub a_k0: Vec<f64>,
    pub report: BoundReport,
}

impl WeinsteinCase {
    pub fn discrepancy(&self) -> f64 {
        (self.rhs + self.tail - self.lhs).abs()
    }
}

/// `g_n(t) = Σ_{k=1}^{n} Λ_k^n(t) A_k(t)` integrated over `[0, T]` at radius `r`.
pub fn milin_decomposition_check(chain: &LoewnerChain, p: &DecompositionParams, tol: f64) -> Result<WeinsteinCase> {
    let n = p.n;
    if n == 0 || n > 8 || !(p.horizon > 0.0 && p.horizon <= 10.0) {
        return Err(Error::ParamOutOfRange(format!(
            "decomposition supports 1 <= n <= 8 and 0 < T <= 10, got n = {n}, T = {}",
            p.horizon
        )));
    }
    let f = chain.initial_function(n + 2)?;
    let lhs = milin_functional(&f, n)?.weinstein;
    let steps = (p.horizon / p.dt).round().max(1.0) as usize;
    let times: Vec<f64> = (0..=steps).map(|i| p.horizon * i as f64 / steps as f64).collect();
    let closed = matches!(chain, LoewnerChain::Koebe { .. } | LoewnerChain::Trivial);
    // Closed-form chains have t-independent log coefficients and p, hence A_k.
    let a_fixed = if closed {
        Some((1..=n).map(|k| a_k_integral(chain, k, 0.0, p.radius, p.quad)).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    let rows = times
        .iter()
        .map(|&t| {
            let lam = (1..=n).map(|k| lambda_series(t, k, n).map(|v| v[n])).collect::<Result<Vec<_>>>()?;
            let a = match &a_fixed {
                Some(a) => a.clone(),
                None => (1..=n).map(|k| a_k_integral(chain, k, t, p.radius, p.quad)).collect::<Result<Vec<_>>>()?,
            };
            let g: f64 = lam.iter().zip(&a).map(|(l, a)| l * a).sum();
            Ok((t, g, lam, a))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rhs = 0.0;
    for w in rows.windows(2) {
        rhs += 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1);
    }
    let (t_end, _, _, a_end) = rows.last().expect("non-empty");
    let tail: f64 = (1..=n)
        .map(|k| a_end[k - 1] * lambda_asymptote(*t_end, k, n) / k as f64)
        .sum::<f64>()
        .max(0.0);
    let min_g = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let min_lambda = rows.iter().flat_map(|r| r.2.iter().copied()).fold(f64::INFINITY, f64::min);
    // Bounds are spelled out per case, so the report itself carries no slack.
    let mut report = BoundReport::new("decomposition", 0.0);
    report.check("|rhs+tail-lhs|", (rhs + tail - lhs).abs(), tol * lhs.abs().max(1.0));
    for (t, g, _, _) in &rows {
        report.check(format!("g(t={t:.3})>=0"), -g, 1e-8);
    }
    Ok(WeinsteinCase {
        label: f.label().to_string(),
        n,
        r: p.radius,
        horizon: p.horizon,
        lhs,
        rhs,
        tail,
        min_g,
        min_lambda,
        g: rows.iter().map(|r| (r.0, r.1)).collect(),
        a_k0: rows[0].3.clone(),
        report,
    })
}

/// Richardson extrapolation of `A_k(r)` to `r → 1` in the variable `s = 1 - r^2`,
/// from three radii. A diagnostic for the boundary limit, not part of any check.
pub fn a_k_extrapolated(chain: &LoewnerChain, k: usize, t: f64, radii: [f64; 3], q: usize) -> Result<f64> {
    let s: Vec<f64> = radii.iter().map(|r| 1.0 - r * r).collect();
    let v = radii
        .iter()
        .map(|&r| a_k_integral(chain, k, t, r, q))
        .collect::<Result<Vec<_>>>()?;
    // Quadratic through the three points, evaluated at s = 0.
    let mut acc = 0.0;
    for i in 0..3 {
        let mut l = 1.0;
        for j in 0..3 {
            if i != j {
                l *= (0.0 - s[j]) / (s[i] - s[j]);
            }
        }
        acc += v[i] * l;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schlicht::identity;

    #[test]
    fn lambda_examples() {
        for &t in &[0.0, 0.5, 3.0] {
            assert!((lambda_series(t, 0, 4).unwrap()[0] - 1.0).abs() < 1e-12);
        }
        for k in 1..=6 {
            let v = lambda_series(0.5, k, 8).unwrap();
            assert!((v[k] - (-0.5 * k as f64).exp()).abs() < 1e-12);
            assert!(v[..k].iter().all(|x| x.abs() < 1e-12));
        }
        let v = lambda_series(0.0, 0, 9).unwrap();
        for (n, x) in v.iter().enumerate() {
            assert!((x - if n % 2 == 0 { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }

    #[test]
    fn fourier_examples() {
        assert!((lambda_fourier_oracle(0.0, 0, 2, 1024).unwrap() - 1.0).abs() < 1e-12);
        assert!((lambda_fourier_oracle(0.5, 3, 3, 1024).unwrap() - (-1.5f64).exp()).abs() < 1e-8);
        assert!(lambda_fourier_oracle(0.7, 5, 3, 1024).unwrap().abs() < 1e-10);
        assert!(lambda_fourier_oracle(0.7, 1, 3, 512).is_err());
    }

    #[test]
    fn legendre_route_examples() {
        let r = legendre_route_check(0.3, 0, 0).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        for &t in &[0.0, 1.0] {
            for n in 0..=5 {
                for k in 0..=5 {
                    let a = legendre_route_check(t, n, k).unwrap();
                    let b = lambda_series(t, k, n).unwrap()[n];
                    assert!((a.value - b).abs() < 1e-8, "t={t} n={n} k={k}");
                    assert!(a.min_summand >= 0.0);
                }
            }
        }
    }

    #[test]
    fn lambda_integrates_to_weight() {
        // ∫_0^∞ Λ_k^n dt = (n-k+1)/k.
        let (n, dt, t_max) = (5usize, 0.01, 40.0);
        for k in 1..=n {
            let steps = (t_max / dt) as usize;
            let vals: Vec<f64> = (0..=steps).map(|i| lambda_series(i as f64 * dt, k, n).unwrap()[n]).collect();
            // Simpson's rule; `steps` is even.
            let inner: f64 = vals[1..steps]
                .iter()
                .enumerate()
                .map(|(i, v)| if i % 2 == 0 { 4.0 * v } else { 2.0 * v })
                .sum();
            let integral = dt / 3.0 * (vals[0] + inner + vals[steps]);
            let want = (n - k + 1) as f64 / k as f64;
            assert!((integral - want).abs() < 1e-7 * want, "k={k}: {integral} vs {want}");
        }
    }

    #[test]
    fn asymptote_matches_large_t() {
        let v = lambda_series(12.0, 2, 6).unwrap()[6];
        let a = lambda_asymptote(12.0, 2, 6);
        assert!((v - a).abs() < 1e-4 * a);
    }

    #[test]
    fn generating_identity() {
        let zs = [cx(0.0), cx(0.3), Complex::new(-0.2, 0.4)];
        let rep = milin_generating_identity(&koebe(42), 40, &zs, 1e-10).unwrap();
        assert!(rep.all_pass() && rep.cases.iter().all(|c| c.lhs < 1e-12));
        let rep = milin_generating_identity(&identity(42), 40, &zs, 1e-10).unwrap();
        assert!(rep.all_pass());
        assert_eq!(rep.cases[0].lhs, 0.0);
    }

    #[test]
    fn a_k_closed_forms() {
        let triv = LoewnerChain::Trivial;
        assert!((a_k_integral(&triv, 1, 0.3, 0.95, 256).unwrap() - 4.0).abs() < 1e-12);
        let kc = LoewnerChain::koebe();
        for k in 1..=4 {
            for &r in &[0.9, 0.99] {
                let a = a_k_integral(&kc, k, 0.0, r, 4096).unwrap();
                let want = 4.0 * (1.0 - r.powi(2 * k as i32));
                assert!((a - want).abs() < 1e-9, "k={k} r={r}: {a} vs {want}");
            }
        }
        assert!(a_k_integrand_min(&kc, 3, 0.0, 0.99, 512).unwrap() >= 0.0);
    }

    #[test]
    fn decomposition_for_identity() {
        let p = DecompositionParams { n: 3, horizon: 8.0, radius: 0.99, quad: 256, dt: 0.02 };
        let case = milin_decomposition_check(&LoewnerChain::Trivial, &p, 1e-2).unwrap();
        let want: f64 = (1..=3).map(|k| 4.0 / k as f64 * (3 - k + 1) as f64).sum();
        assert!((case.lhs - want).abs() < 1e-12);
        assert!(case.report.all_pass(), "{case:?}");
        assert!(case.min_g >= 0.0);
    }
}
