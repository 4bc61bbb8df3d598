//! Drive-weighted time integrals over one period.
//!
//! With `f(t) = cos(Ωt)` and `T = 2π/Ω` the two kernels are
//!
//! * `A(ν) = (1/T) ∫₀ᵀ f(t) e^{iνt} dt`
//! * `W(ν1, ν2) = 1/(2iT) ∫₀ᵀ dt1 ∫₀^{t1} dt2 f(t1) f(t2) e^{iν1 t1} e^{iν2 t2}`
//!
//! `W` is evaluated with a cumulative composite Gauss-Legendre rule: the inner
//! integral up to an outer node is the sum of the completed panels plus one
//! mapped Gauss rule on the partial panel.

use std::f64::consts::PI;

use crate::error::{FloqError, Result};
use crate::linalg::{gauss_legendre, C64, I, ZERO};

pub const ORDER: usize = 8;
const MIN_PANELS: usize = 16;
const MAX_DOUBLINGS: usize = 8;
/// Accept once two successive refinements agree to this relative level.
const TARGET: f64 = 1e-13;
/// Hard failure threshold on the estimated error.
pub const FAIL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QuadratureReport {
    pub nodes: usize,
    pub error: f64,
}

impl QuadratureReport {
    pub fn merge(self, other: QuadratureReport) -> Self {
        Self {
            nodes: self.nodes.max(other.nodes),
            error: self.error.max(other.error),
        }
    }
}

fn segment(x: f64, t: f64, scale: f64) -> C64 {
    // ∫₀ᵗ e^{ixs} ds
    if x.abs() < 1e-12 * scale {
        C64::new(t, 0.0)
    } else {
        ((I * x * t).exp() - 1.0) / (I * x)
    }
}

/// Closed form of `A(ν)`; the resonant limits `ν = ±Ω` give exactly 1/2.
pub fn drive_average(omega: f64, nu: f64) -> C64 {
    let t = 2.0 * PI / omega;
    let scale = omega.max(nu.abs());
    (segment(nu + omega, t, scale) + segment(nu - omega, t, scale)) / (2.0 * t)
}

/// `A(ν)` by composite Gauss-Legendre on `[0, T]` with panel doubling.
pub fn drive_average_quadrature(omega: f64, nu: f64) -> Result<(C64, QuadratureReport)> {
    let t = 2.0 * PI / omega;
    let (x, w) = gauss_legendre(ORDER);
    let eval = |panels: usize| -> C64 {
        let h = t / panels as f64;
        let mut acc = ZERO;
        for p in 0..panels {
            let lo = p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                let s = lo + 0.5 * h * (xi + 1.0);
                acc += (omega * s).cos() * (I * nu * s).exp() * (0.5 * h * wi);
            }
        }
        acc / t
    };
    refine(panels_for(omega, &[nu]), eval)
}

fn panels_for(omega: f64, freqs: &[f64]) -> usize {
    let osc: f64 = freqs.iter().map(|f| f.abs()).sum::<f64>() / omega + freqs.len() as f64;
    MIN_PANELS.max((2.0 * osc).ceil() as usize)
}

fn refine(start: usize, eval: impl Fn(usize) -> C64) -> Result<(C64, QuadratureReport)> {
    let mut panels = start;
    let mut prev = eval(panels);
    let mut err = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let next = eval(panels);
        err = (next - prev).norm();
        prev = next;
        if err <= TARGET * prev.norm().max(1.0) {
            return Ok((
                prev,
                QuadratureReport {
                    nodes: panels * ORDER,
                    error: err,
                },
            ));
        }
    }
    let tol = FAIL_TOL * prev.norm().max(1.0);
    if err > tol {
        return Err(FloqError::QuadratureNotConverged { error: err, tolerance: tol });
    }
    Ok((
        prev,
        QuadratureReport {
            nodes: panels * ORDER,
            error: err,
        },
    ))
}

/// Nested kernel `W(ν1, ν2)` with panel-doubling error control.
pub fn nested_weight(omega: f64, nu1: f64, nu2: f64) -> Result<(C64, QuadratureReport)> {
    let t = 2.0 * PI / omega;
    let (x, w) = gauss_legendre(ORDER);
    let g1 = |s: f64| (omega * s).cos() * (I * nu1 * s).exp();
    let g2 = |s: f64| (omega * s).cos() * (I * nu2 * s).exp();
    let eval = |panels: usize| -> C64 {
        let h = t / panels as f64;
        let mut completed = ZERO;
        let mut acc = ZERO;
        for p in 0..panels {
            let lo = p as f64 * h;
            let mut panel_inner = ZERO;
            for (xi, wi) in x.iter().zip(&w) {
                let s1 = lo + 0.5 * h * (xi + 1.0);
                // inner integral over [lo, s1]
                let half = 0.5 * (s1 - lo);
                let mut partial = ZERO;
                for (xj, wj) in x.iter().zip(&w) {
                    partial += g2(lo + half * (xj + 1.0)) * (half * wj);
                }
                acc += g1(s1) * (completed + partial) * (0.5 * h * wi);
                panel_inner += g2(s1) * (0.5 * h * wi);
            }
            completed += panel_inner;
        }
        acc / (2.0 * I * t)
    };
    refine(panels_for(omega, &[nu1, nu2]), eval)
}
