//! Radial Loewner chains.
//!
//! Transition functions solve `∂φ/∂t = -φ (1 + κ(t) φ) / (1 - κ(t) φ)` with
//! `φ(z, s, s) = z`, and the chain is `f(z, s) = lim_{t→∞} e^t φ(z, s, t)`.
//! For `κ ≡ -1` the transitions are `w_t(z) = k^{-1}(e^{-t} k(z))` with `k`
//! the Koebe function.
//!
//! Numeric chains integrate with fixed-step RK4 up to a horizon `T` and close
//! the remaining flow exactly: once `κ` is frozen at `κ_T` the limit is
//! `-conj(κ_T) e^T k(-κ_T φ_T)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::BoundReport;
use crate::schlicht::{koebe, ClassSFunction};
use crate::series::{Complex, PowerSeries, EPS0};

const UNIT_TOL: f64 = 1e-12;
const STEP_GUARD: f64 = 1e-6;
/// Fitting radius and degree for numeric chain series.
pub const FIT_RADIUS: f64 = 0.4;
pub const FIT_ORDER: usize = 12;
const FIT_NODES: usize = 64;
/// Radius and node count of the Cauchy cross-check for `c_k`.
pub const CAUCHY_RADIUS: f64 = 0.5;
const CAUCHY_NODES: usize = 128;
/// Time offset for the central difference in `∂f/∂t`.
const DT_FD: f64 = 1e-4;

fn cx(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

pub fn koebe_value(z: Complex) -> Complex {
    z / ((1.0 - z) * (1.0 - z))
}

pub fn koebe_derivative(z: Complex) -> Complex {
    (1.0 + z) / ((1.0 - z) * (1.0 - z) * (1.0 - z))
}

/// `κ(t)` on the unit circle, piecewise constant between sample times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DrivingFunction {
    Constant(Complex),
    /// `values[i]` holds on `[times[i], times[i+1])` and the last value holds afterwards.
    Sampled { times: Vec<f64>, values: Vec<Complex> },
}

impl DrivingFunction {
    pub fn constant(kappa: Complex) -> Result<Self> {
        let d = DrivingFunction::Constant(kappa);
        d.validate()?;
        Ok(d)
    }

    pub fn sampled(times: Vec<f64>, values: Vec<Complex>) -> Result<Self> {
        let d = DrivingFunction::Sampled { times, values };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        let vals: &[Complex] = match self {
            DrivingFunction::Constant(k) => std::slice::from_ref(k),
            DrivingFunction::Sampled { times, values } => {
                if times.is_empty() || times.len() != values.len() {
                    return Err(Error::ParamOutOfRange("driving samples need matching times".into()));
                }
                if times.windows(2).any(|w| !(w[0] < w[1])) || !times.iter().all(|t| t.is_finite()) {
                    return Err(Error::ParamOutOfRange("driving times must increase".into()));
                }
                values
            }
        };
        if let Some(k) = vals.iter().find(|k| (k.norm() - 1.0).abs() > UNIT_TOL) {
            return Err(Error::ParamOutOfRange(format!("|κ| must be 1, got {}", k.norm())));
        }
        Ok(())
    }

    pub fn at(&self, t: f64) -> Complex {
        match self {
            DrivingFunction::Constant(k) => *k,
            DrivingFunction::Sampled { times, values } => {
                let i = times.partition_point(|&s| s <= t);
                values[i.saturating_sub(1)]
            }
        }
    }

    /// Switching times strictly inside `(a, b)`.
    pub fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        match self {
            DrivingFunction::Constant(_) => Vec::new(),
            DrivingFunction::Sampled { times, .. } => {
                times.iter().copied().filter(|&s| s > a && s < b).collect()
            }
        }
    }

    /// The value in force after every switching time.
    pub fn terminal(&self) -> Complex {
        match self {
            DrivingFunction::Constant(k) => *k,
            DrivingFunction::Sampled { values, .. } => *values.last().expect("validated"),
        }
    }

    pub fn last_switch(&self) -> f64 {
        match self {
            DrivingFunction::Constant(_) => 0.0,
            DrivingFunction::Sampled { times, .. } => *times.last().expect("validated"),
        }
    }

    /// Parses `const:<θ-free value>`: `const:-1`, `const:1`, `const:i`, `angle:<θ>`,
    /// or `steps:<t0>:<θ0>,<t1>:<θ1>,...` with angles in radians.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::ParamOutOfRange(format!("cannot parse driving function '{spec}'"));
        if let Some(v) = spec.strip_prefix("const:") {
            let k = match v.trim() {
                "i" => Complex::new(0.0, 1.0),
                "-i" => Complex::new(0.0, -1.0),
                s => cx(s.parse::<f64>().map_err(|_| bad())?),
            };
            return Self::constant(k);
        }
        if let Some(v) = spec.strip_prefix("angle:") {
            let th: f64 = v.trim().parse().map_err(|_| bad())?;
            return Self::constant(Complex::from_polar(1.0, th));
        }
        if let Some(v) = spec.strip_prefix("steps:") {
            let mut times = Vec::new();
            let mut values = Vec::new();
            for item in v.split(',') {
                let (t, th) = item.split_once(':').ok_or_else(bad)?;
                times.push(t.trim().parse::<f64>().map_err(|_| bad())?);
                values.push(Complex::from_polar(1.0, th.trim().parse::<f64>().map_err(|_| bad())?));
            }
            return Self::sampled(times, values);
        }
        Err(bad())
    }
}

/// `w_t(z) = k^{-1}(e^{-t} k(z))`, the root of `u w^2 - (2u+1) w + u = 0`
/// inside the disk. Written as `2u / ((2u+1) ± sqrt(4u+1))` to avoid cancellation.
pub fn koebe_transition(t: f64, z: Complex) -> Result<Complex> {
    if !(t >= 0.0) || !(z.norm() < 1.0) {
        return Err(Error::ParamOutOfRange(format!("need t >= 0 and |z| < 1, got t = {t}, z = {z}")));
    }
    let u = koebe_value(z) * (-t).exp();
    if u.norm() == 0.0 {
        return Ok(cx(0.0));
    }
    let s = (4.0 * u + 1.0).sqrt();
    let b = 2.0 * u + 1.0;
    let (d1, d2) = (b + s, b - s);
    let den = if d1.norm() >= d2.norm() { d1 } else { d2 };
    let w = 2.0 * u / den;
    if !(w.norm() < 1.0) {
        return Err(Error::BranchSelectionFailure);
    }
    Ok(w)
}

/// Power series of `w_t` at the given order, from
/// `w = 2u / ((1 + 2u) + sqrt(1 + 4u))` with `u = e^{-t} k(z)`; the
/// denominator starts at 2, so nothing cancels for any `t`.
pub fn koebe_transition_series(t: f64, order: usize) -> Result<PowerSeries> {
    let u = koebe(order).series().scale(cx((-t).exp()));
    let one = PowerSeries::one(order);
    let root = one.add(&u.scale(cx(4.0)))?.sqrt()?;
    let den = one.add(&u.scale(cx(2.0)))?.add(&root)?;
    u.scale(cx(2.0)).div(&den)
}

/// The same series as `revert(k) ∘ (e^{-t} k)`.
pub fn koebe_transition_series_by_reversion(t: f64, order: usize) -> Result<PowerSeries> {
    let k = koebe(order);
    let inv = k.series().revert()?;
    inv.compose(&k.series().scale(cx((-t).exp())))
}

/// `w' = (w^2 - w)/(1 + w)`.
pub fn transition_velocity(w: Complex) -> Result<Complex> {
    let d = 1.0 + w;
    if d.norm() < EPS0 {
        return Err(Error::PoleAtMinusOne);
    }
    Ok((w * w - w) / d)
}

fn field(kappa: Complex, f: Complex) -> Result<Complex> {
    let d = 1.0 - kappa * f;
    if d.norm() < STEP_GUARD {
        return Err(Error::StepRejected(d.norm()));
    }
    Ok(-f * (1.0 + kappa * f) / d)
}

fn field_derivative(kappa: Complex, f: Complex) -> Complex {
    let kf = kappa * f;
    let d = 1.0 - kf;
    -(1.0 + 2.0 * kf - kf * kf) / (d * d)
}

/// One classical RK4 step for the state and its `z`-derivative.
fn rk4_step(kappa: Complex, f: Complex, fz: Complex, h: f64) -> Result<(Complex, Complex)> {
    let g = |f: Complex, fz: Complex| -> Result<(Complex, Complex)> {
        Ok((field(kappa, f)?, field_derivative(kappa, f) * fz))
    };
    let (k1, l1) = g(f, fz)?;
    let (k2, l2) = g(f + k1 * (h / 2.0), fz + l1 * (h / 2.0))?;
    let (k3, l3) = g(f + k2 * (h / 2.0), fz + l2 * (h / 2.0))?;
    let (k4, l4) = g(f + k3 * h, fz + l3 * h)?;
    let nf = f + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    let nfz = fz + (l1 + l2 * 2.0 + l3 * 2.0 + l4) * (h / 6.0);
    if !(nf.norm() < 1.0) {
        return Err(Error::TrajectoryEscaped(nf.norm()));
    }
    Ok((nf, nfz))
}

/// Step grid on `[a, b]` aligned to the switching times, with steps at most `h`.
fn time_grid(driving: &DrivingFunction, a: f64, b: f64, h: f64) -> Vec<f64> {
    let mut knots = vec![a];
    knots.extend(driving.breakpoints(a, b));
    knots.push(b);
    let mut grid = vec![a];
    for w in knots.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        let n = ((len / h) - 1e-9).ceil().max(1.0) as usize;
        for i in 1..=n {
            grid.push(if i == n { w[1] } else { w[0] + len * i as f64 / n as f64 });
        }
    }
    grid
}

/// Transition `φ(z, s, t)` and `∂φ/∂z` by RK4 on the aligned grid.
pub fn flow(driving: &DrivingFunction, z: Complex, s: f64, t: f64, h: f64) -> Result<(Complex, Complex)> {
    let grid = time_grid(driving, s, t, h);
    let (mut f, mut fz) = (z, cx(1.0));
    for w in grid.windows(2) {
        let (nf, nfz) = rk4_step(driving.at(w[0]), f, fz, w[1] - w[0])?;
        f = nf;
        fz = nfz;
    }
    Ok((f, fz))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverMeta {
    pub horizon: f64,
    pub step: f64,
    pub steps: usize,
}

/// Trajectories `f_t(z)` sampled on a shared time grid; `states[i][j]` is at
/// `times[i]` and `grid[j]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evolution {
    pub times: Vec<f64>,
    pub grid: Vec<Complex>,
    pub states: Vec<Vec<Complex>>,
    pub meta: SolverMeta,
}

impl Evolution {
    pub fn final_states(&self) -> &[Complex] {
        self.states.last().expect("non-empty")
    }

    /// `e^t f_t` at time index `i`.
    pub fn scaled(&self, i: usize) -> Vec<Complex> {
        let e = self.times[i].exp();
        self.states[i].iter().map(|f| f * e).collect()
    }

    /// Least-squares fit of `e^t f_t(z) ≈ Σ_{k=0}^{order} a_k z^k` over the grid.
    pub fn fit_coefficients(&self, i: usize, order: usize) -> Result<Vec<Complex>> {
        fit_polynomial(&self.grid, &self.scaled(i), order)
    }
}

/// Integrates the Loewner ODE from `t = 0` to `horizon` for every grid point,
/// recording every `stride`-th step plus the final time.
pub fn loewner_solve_sampled(
    driving: &DrivingFunction,
    grid: &[Complex],
    horizon: f64,
    h: f64,
    stride: usize,
) -> Result<Evolution> {
    if !(h > 0.0 && h <= 1e-2) {
        return Err(Error::ParamOutOfRange(format!("step must lie in (0, 1e-2], got {h}")));
    }
    if !(0.0..=20.0).contains(&horizon) {
        return Err(Error::ParamOutOfRange(format!("horizon must lie in [0, 20], got {horizon}")));
    }
    if let Some(z) = grid.iter().find(|z| !(z.norm() < 1.0)) {
        return Err(Error::ParamOutOfRange(format!("grid point {z} is outside the disk")));
    }
    let stride = stride.max(1);
    let full = time_grid(driving, 0.0, horizon, h);
    let keep: Vec<usize> = (0..full.len()).filter(|&i| i % stride == 0 || i + 1 == full.len()).collect();
    let columns: Vec<Result<Vec<Complex>>> = grid
        .par_iter()
        .map(|&z| {
            let mut out = Vec::with_capacity(keep.len());
            let (mut f, mut fz) = (z, cx(1.0));
            out.push(f);
            for i in 1..full.len() {
                let (nf, nfz) = rk4_step(driving.at(full[i - 1]), f, fz, full[i] - full[i - 1])?;
                f = nf;
                fz = nfz;
                if i % stride == 0 || i + 1 == full.len() {
                    out.push(f);
                }
            }
            Ok(out)
        })
        .collect();
    let columns = columns.into_iter().collect::<Result<Vec<_>>>()?;
    let states = (0..keep.len()).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    Ok(Evolution {
        times: keep.iter().map(|&i| full[i]).collect(),
        grid: grid.to_vec(),
        states,
        meta: SolverMeta { horizon, step: h, steps: full.len() - 1 },
    })
}

pub fn loewner_solve(driving: &DrivingFunction, grid: &[Complex], horizon: f64, h: f64) -> Result<Evolution> {
    loewner_solve_sampled(driving, grid, horizon, h, 1)
}

/// Complex least squares for polynomial coefficients `0..=order`.
pub fn fit_polynomial(points: &[Complex], values: &[Complex], order: usize) -> Result<Vec<Complex>> {
    if points.len() <= order {
        return Err(Error::ParamOutOfRange(format!(
            "{} points cannot determine {} coefficients",
            points.len(),
            order + 1
        )));
    }
    let a = DMatrix::from_fn(points.len(), order + 1, |i, j| points[i].powu(j as u32));
    let b = DVector::from_column_slice(values);
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-13)
        .map_err(|e| Error::ParamOutOfRange(format!("least squares failed: {e}")))?;
    Ok(sol.iter().copied().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericChain {
    pub driving: DrivingFunction,
    /// Integration runs to `max(horizon, last switch)`; the rest is closed exactly.
    pub horizon: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum LoewnerChain {
    /// `f_t(z) = e^t e^{-iθ} k(e^{iθ} z)`, driven by `κ ≡ -e^{iθ}`.
    Koebe { theta: f64 },
    /// `f_t(z) = e^t z`, with `p ≡ 1`.
    Trivial,
    Numeric(NumericChain),
}

impl LoewnerChain {
    pub fn koebe() -> Self {
        LoewnerChain::Koebe { theta: 0.0 }
    }

    pub fn numeric(driving: DrivingFunction, horizon: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step <= 1e-2) {
            return Err(Error::ParamOutOfRange(format!("step must lie in (0, 1e-2], got {step}")));
        }
        Ok(LoewnerChain::Numeric(NumericChain { driving, horizon, step }))
    }

    /// Chain attached to a registry function, when one is known in closed form.
    pub fn for_function(f: &ClassSFunction) -> Result<Self> {
        let label = f.label();
        if label == "koebe" {
            return Ok(Self::koebe());
        }
        if label == "identity" {
            return Ok(LoewnerChain::Trivial);
        }
        if let Some(th) = label.strip_prefix("koebe-rot:") {
            if let Ok(theta) = th.parse() {
                return Ok(LoewnerChain::Koebe { theta });
            }
        }
        Err(Error::ChainUnavailable(label.to_string()))
    }

    /// The class-S function `f(z, 0)` at the given order.
    pub fn initial_function(&self, order: usize) -> Result<ClassSFunction> {
        match self {
            LoewnerChain::Koebe { theta } if *theta == 0.0 => Ok(koebe(order)),
            LoewnerChain::Koebe { theta } => Ok(crate::schlicht::koebe_rotated(*theta, order)),
            LoewnerChain::Trivial => Ok(crate::schlicht::identity(order)),
            LoewnerChain::Numeric(_) => {
                let s = self.normalized_series(0.0)?;
                let c1 = s.coeff(1);
                let mut c = s.scale(c1.inv()).with_order(order).coeffs().to_vec();
                c[0] = cx(0.0);
                ClassSFunction::new(PowerSeries::new(c)?, "loewner-numeric")
            }
        }
    }

    /// `f(z, t)`.
    pub fn value(&self, z: Complex, t: f64) -> Result<Complex> {
        Ok(self.value_and_dz(z, t)?.0)
    }

    /// `f(z, t)` and `∂f/∂z`.
    pub fn value_and_dz(&self, z: Complex, t: f64) -> Result<(Complex, Complex)> {
        if !(z.norm() < 1.0) {
            return Err(Error::ParamOutOfRange(format!("|z| < 1 required, got {z}")));
        }
        let et = t.exp();
        match self {
            LoewnerChain::Koebe { theta } => {
                let u = Complex::from_polar(1.0, *theta);
                Ok((koebe_value(u * z) * u.conj() * et, koebe_derivative(u * z) * et))
            }
            LoewnerChain::Trivial => Ok((z * et, cx(et))),
            LoewnerChain::Numeric(c) => {
                let end = c.horizon.max(c.driving.last_switch()).max(t);
                let (phi, dphi) = flow(&c.driving, z, t, end, c.step)?;
                let kappa = c.driving.terminal();
                let e = end.exp();
                let arg = -kappa * phi;
                Ok((-kappa.conj() * e * koebe_value(arg), e * koebe_derivative(arg) * dphi))
            }
        }
    }

    /// `∂f/∂t`: exact for closed forms, central differences for numeric chains.
    pub fn dt(&self, z: Complex, t: f64) -> Result<Complex> {
        match self {
            LoewnerChain::Koebe { .. } | LoewnerChain::Trivial => self.value(z, t),
            LoewnerChain::Numeric(_) => {
                if t >= DT_FD {
                    let a = self.value(z, t + DT_FD)?;
                    let b = self.value(z, t - DT_FD)?;
                    Ok((a - b) / (2.0 * DT_FD))
                } else {
                    let f0 = self.value(z, t)?;
                    let f1 = self.value(z, t + DT_FD)?;
                    let f2 = self.value(z, t + 2.0 * DT_FD)?;
                    Ok((f1 * 4.0 - f0 * 3.0 - f2) / (2.0 * DT_FD))
                }
            }
        }
    }

    /// Transition `φ(z, s, t)` with `f(z, s) = f(φ(z, s, t), t)`.
    pub fn transition(&self, z: Complex, s: f64, t: f64) -> Result<Complex> {
        if t < s {
            return Err(Error::ParamOutOfRange(format!("transition needs s <= t, got {s} > {t}")));
        }
        match self {
            LoewnerChain::Koebe { theta } => {
                let u = Complex::from_polar(1.0, *theta);
                Ok(koebe_transition(t - s, u * z)? * u.conj())
            }
            LoewnerChain::Trivial => Ok(z * (s - t).exp()),
            LoewnerChain::Numeric(c) => Ok(flow(&c.driving, z, s, t, c.step)?.0),
        }
    }

    /// Power series of `e^{-t} f_t`: exact for closed forms, a least-squares fit
    /// on `|z| = 0.4` of degree 12 for numeric chains.
    pub fn normalized_series(&self, t: f64) -> Result<PowerSeries> {
        match self {
            LoewnerChain::Koebe { .. } | LoewnerChain::Trivial => {
                Ok(self.initial_function(FIT_ORDER)?.series().clone())
            }
            LoewnerChain::Numeric(_) => {
                let pts: Vec<Complex> = (0..FIT_NODES)
                    .map(|j| Complex::from_polar(FIT_RADIUS, 2.0 * PI * j as f64 / FIT_NODES as f64))
                    .collect();
                let e = (-t).exp();
                let vals = pts
                    .par_iter()
                    .map(|&z| self.value(z, t).map(|v| v * e))
                    .collect::<Result<Vec<_>>>()?;
                PowerSeries::new(fit_polynomial(&pts, &vals, FIT_ORDER)?)
            }
        }
    }
}

/// `p(z, t) = (∂f/∂t) / (z ∂f/∂z)`; `p(0, t) = 1`.
pub fn herglotz_p(chain: &LoewnerChain, z: Complex, t: f64) -> Result<Complex> {
    if z.norm() == 0.0 {
        return Ok(cx(1.0));
    }
    let (_, fz) = chain.value_and_dz(z, t)?;
    let den = z * fz;
    if den.norm() < 1e-14 {
        return Err(Error::DerivativeUnderflow(den.norm()));
    }
    Ok(chain.dt(z, t)? / den)
}

/// `(1 + κ z)/(1 - κ z)`, the kernel the chain's `p` must equal at time `t`.
pub fn herglotz_kernel(kappa: Complex, z: Complex) -> Complex {
    (1.0 + kappa * z) / (1.0 - kappa * z)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainLogCoeffs {
    /// `series[k-1] = c_k` from the series logarithm.
    pub series: Vec<Complex>,
    /// The same coefficients from Cauchy's formula on `|z| = 0.5`.
    pub quadrature: Vec<Complex>,
}

impl ChainLogCoeffs {
    pub fn max_gap(&self) -> f64 {
        self.series
            .iter()
            .zip(&self.quadrature)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `c_1..c_N` of `log(f_t(z) / (e^t z))` by the series route only.
pub fn chain_log_coeffs_series(chain: &LoewnerChain, t: f64, n: usize) -> Result<Vec<Complex>> {
    let s = match chain {
        LoewnerChain::Numeric(_) => chain.normalized_series(t)?,
        _ => chain.initial_function(n + 1)?.series().clone(),
    };
    let q = s.shift_down().with_order(n.min(s.order().saturating_sub(1)));
    let q0 = q.coeff(0);
    let l = q.scale(q0.inv()).log()?;
    Ok((1..=n).map(|k| l.coeff(k)).collect())
}

/// `c_1..c_N` by Cauchy's formula on a circle, tracking the logarithm's branch.
pub fn chain_log_coeffs_quadrature(chain: &LoewnerChain, t: f64, n: usize) -> Result<Vec<Complex>> {
    let q = CAUCHY_NODES;
    let e = (-t).exp();
    let nodes: Vec<Complex> =
        (0..q).map(|j| Complex::from_polar(CAUCHY_RADIUS, 2.0 * PI * j as f64 / q as f64)).collect();
    let ratios = nodes
        .par_iter()
        .map(|&z| chain.value(z, t).map(|f| f * e / z))
        .collect::<Result<Vec<_>>>()?;
    let mut logs = Vec::with_capacity(q);
    let mut offset = 0.0;
    let mut prev = ratios[0].ln().im;
    for r in &ratios {
        let l = r.ln();
        let mut jump = l.im + offset - prev;
        while jump > PI {
            offset -= 2.0 * PI;
            jump -= 2.0 * PI;
        }
        while jump < -PI {
            offset += 2.0 * PI;
            jump += 2.0 * PI;
        }
        if jump.abs() > PI / 2.0 {
            return Err(Error::BranchTrackingFailure);
        }
        prev = l.im + offset;
        logs.push(Complex::new(l.re, prev));
    }
    // A net winding or a jump across the last gap means log(f/z) is not single valued here.
    if (ratios[0].ln().im - prev).abs() > PI / 2.0 {
        return Err(Error::BranchTrackingFailure);
    }
    Ok((1..=n)
        .map(|k| {
            let mut acc = cx(0.0);
            for (j, l) in logs.iter().enumerate() {
                acc += l * Complex::from_polar(1.0, -2.0 * PI * (j * k) as f64 / q as f64);
            }
            acc / (q as f64 * CAUCHY_RADIUS.powi(k as i32))
        })
        .collect())
}

pub fn chain_log_coeffs(chain: &LoewnerChain, t: f64, n: usize) -> Result<ChainLogCoeffs> {
    Ok(ChainLogCoeffs {
        series: chain_log_coeffs_series(chain, t, n)?,
        quadrature: chain_log_coeffs_quadrature(chain, t, n)?,
    })
}

/// Lipschitz-in-time estimates for the chain and its transitions:
/// `|f(z,t) - f(z,s)| <= 8|z| (e^t - e^s) / (1-|z|)^4` and
/// `|φ(z,t,u) - φ(z,s,u)| <= 2|z| (1 - e^{s-t}) / (1-|z|)^2`.
pub fn lipschitz_bound_check_at(
    chain: &LoewnerChain,
    z: Complex,
    s: f64,
    t: f64,
    u: f64,
    tol: f64,
) -> Result<BoundReport> {
    if !(0.0 <= s && s <= t && t <= u) || z.norm() > 0.9 {
        return Err(Error::ParamOutOfRange(format!(
            "need 0 <= s <= t <= u and |z| <= 0.9, got s={s} t={t} u={u} |z|={}",
            z.norm()
        )));
    }
    let r = z.norm();
    let mut rep = BoundReport::new("lipschitz", tol);
    let id = format!("z=({:.3},{:.3}) s={s} t={t}", z.re, z.im);
    let lhs = (chain.value(z, t)? - chain.value(z, s)?).norm();
    rep.check(format!("{id}:chain"), lhs, 8.0 * r * (t.exp() - s.exp()) / (1.0 - r).powi(4));
    let lhs = (chain.transition(z, t, u)? - chain.transition(z, s, u)?).norm();
    rep.check(format!("{id} u={u}:transition"), lhs, 2.0 * r * (1.0 - (s - t).exp()) / (1.0 - r).powi(2));
    Ok(rep)
}

pub fn lipschitz_bound_check(chain: &LoewnerChain, z: Complex, s: f64, t: f64, tol: f64) -> Result<BoundReport> {
    lipschitz_bound_check_at(chain, z, s, t, t, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transition_examples() {
        for &z in &[cx(0.5), Complex::new(-0.3, 0.6), cx(-0.9)] {
            assert!((koebe_transition(0.0, z).unwrap() - z).norm() < 1e-15);
        }
        let w = koebe_transition(2f64.ln(), cx(0.5)).unwrap();
        assert!((w.re - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15 && w.im == 0.0);
        assert!((koebe_value(w) - cx(1.0)).norm() < 1e-14);
        assert!(koebe_transition(40.0, cx(0.5)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn transition_is_a_koebe_preimage() {
        for &t in &[0.1, 1.0, 5.0] {
            for &z in &[Complex::new(0.2, 0.7), Complex::new(-0.95, 0.05), cx(0.97)] {
                let w = koebe_transition(t, z).unwrap();
                let rel = (koebe_value(w) - koebe_value(z) * (-t).exp()).norm() / koebe_value(z).norm();
                assert!(rel < 1e-10, "t={t} z={z}");
            }
        }
    }

    #[test]
    fn velocity_examples() {
        assert_eq!(transition_velocity(cx(0.0)).unwrap(), cx(0.0));
        assert!((transition_velocity(cx(0.5)).unwrap() - cx(-1.0 / 6.0)).norm() < 1e-15);
        assert!(matches!(transition_velocity(cx(-1.0)), Err(Error::PoleAtMinusOne)));
        let (t, h) = (0.3, 1e-5);
        let fd = (koebe_transition(t + h, cx(0.5)).unwrap() - koebe_transition(t - h, cx(0.5)).unwrap())
            / (2.0 * h);
        let v = transition_velocity(koebe_transition(t, cx(0.5)).unwrap()).unwrap();
        assert!((fd - v).norm() < 1e-8);
    }

    #[test]
    fn series_routes_agree() {
        let a = koebe_transition_series(0.0, 12).unwrap();
        assert!(a.max_abs_diff(&PowerSeries::identity(12)) < 1e-15);
        let a = koebe_transition_series(0.7, 12).unwrap();
        let b = koebe_transition_series_by_reversion(0.7, 12).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-8);
        assert!((a.coeff(1) - cx((-0.7f64).exp())).norm() < 1e-15);
        let z = Complex::new(0.1, 0.2);
        assert!((a.eval(z) - koebe_transition(0.7, z).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn driving_functions() {
        let d = DrivingFunction::parse("steps:0:0,1.5:2.5,3:1").unwrap();
        assert_eq!(d.at(0.2), cx(1.0));
        assert_eq!(d.at(1.5), Complex::from_polar(1.0, 2.5));
        assert_eq!(d.breakpoints(0.0, 2.0), vec![1.5]);
        assert_eq!(DrivingFunction::parse("const:-1").unwrap().terminal(), cx(-1.0));
        assert!(DrivingFunction::constant(cx(0.5)).is_err());
        assert!(DrivingFunction::parse("nonsense").is_err());
    }

    #[test]
    fn solver_tracks_closed_form() {
        let d = DrivingFunction::constant(cx(-1.0)).unwrap();
        let grid = [cx(0.5), Complex::new(0.1, -0.6)];
        let ev = loewner_solve_sampled(&d, &grid, 2.0, 1e-2, 50).unwrap();
        assert_eq!(ev.times.first(), Some(&0.0));
        assert_eq!(ev.times.last(), Some(&2.0));
        for (i, &t) in ev.times.iter().enumerate() {
            for (j, &z) in grid.iter().enumerate() {
                assert!((ev.states[i][j] - koebe_transition(t, z).unwrap()).norm() < 1e-8);
            }
        }
        let ev0 = loewner_solve(&d, &grid, 0.0, 1e-3).unwrap();
        assert_eq!(ev0.final_states(), &grid[..]);
    }

    #[test]
    fn solver_preconditions() {
        let d = DrivingFunction::constant(cx(-1.0)).unwrap();
        assert!(loewner_solve(&d, &[cx(0.5)], 1.0, 0.1).is_err());
        assert!(loewner_solve(&d, &[cx(1.0)], 1.0, 1e-3).is_err());
        assert!(loewner_solve(&d, &[cx(0.5)], 25.0, 1e-3).is_err());
    }

    #[test]
    fn closed_form_herglotz() {
        let c = LoewnerChain::koebe();
        assert!((herglotz_p(&c, cx(0.5), 0.4).unwrap() - cx(1.0 / 3.0)).norm() < 1e-15);
        assert_eq!(herglotz_p(&c, cx(0.0), 0.4).unwrap(), cx(1.0));
        let z = Complex::new(0.3, -0.2);
        let p = herglotz_p(&LoewnerChain::Koebe { theta: 1.0 }, z, 0.0).unwrap();
        assert!((p - herglotz_kernel(-Complex::from_polar(1.0, 1.0), z)).norm() < 1e-14);
        assert!((herglotz_p(&LoewnerChain::Trivial, z, 2.0).unwrap() - cx(1.0)).norm() < 1e-15);
    }

    #[test]
    fn numeric_chain_herglotz_matches_kernel() {
        let d = DrivingFunction::parse("steps:0:0.3,0.6:2.0").unwrap();
        let c = LoewnerChain::numeric(d.clone(), 1.0, 1e-3).unwrap();
        for &(z, t) in &[(Complex::new(0.3, 0.2), 0.2), (Complex::new(-0.4, 0.1), 0.9)] {
            let p = herglotz_p(&c, z, t).unwrap();
            assert!((p - herglotz_kernel(d.at(t), z)).norm() < 1e-6, "z={z} t={t}");
        }
    }

    #[test]
    fn log_coefficients_of_closed_forms() {
        let c = chain_log_coeffs(&LoewnerChain::koebe(), 1.3, 8).unwrap();
        for k in 1..=8 {
            assert!((c.series[k - 1] - cx(2.0 / k as f64)).norm() < 1e-13);
        }
        assert!(c.max_gap() < 1e-10);
        let c = chain_log_coeffs(&LoewnerChain::Trivial, 0.5, 5).unwrap();
        assert!(c.series.iter().chain(&c.quadrature).all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn numeric_log_coefficients() {
        let d = DrivingFunction::constant(cx(-1.0)).unwrap();
        let c = LoewnerChain::numeric(d, 3.0, 2e-3).unwrap();
        let lc = chain_log_coeffs(&c, 1.0, 6).unwrap();
        assert!((lc.series[0] - cx(2.0)).norm() < 1e-4);
        assert!(lc.max_gap() < 1e-8, "gap {}", lc.max_gap());
    }

    #[test]
    fn lipschitz_examples() {
        let c = LoewnerChain::koebe();
        let rep = lipschitz_bound_check(&c, cx(0.5), 0.0, 0.1, 0.0).unwrap();
        assert!(rep.all_pass());
        assert!((rep.cases[0].lhs - 0.1f64.exp_m1() * 2.0).abs() < 1e-12);
        assert!((rep.cases[0].rhs - 64.0 * 0.1f64.exp_m1()).abs() < 1e-12);
        let rep = lipschitz_bound_check(&c, cx(0.5), 0.4, 0.4, 0.0).unwrap();
        assert_eq!(rep.cases[0].lhs, 0.0);
        assert_eq!(rep.cases[0].rhs, 0.0);
    }
}
