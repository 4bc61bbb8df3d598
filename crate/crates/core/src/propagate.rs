//! Exact unitary time evolution.
//!
//! The default step is the fourth-order commutator Magnus integrator with two
//! Gauss points `c1,2 = 1/2 ∓ √3/6`. For `H(t) = S + f(t)K` its generator is
//!
//! `G = hS + (h/2)(f1 + f2)K + i(√3/12)h²(f2 − f1)[S, K]`
//!
//! and the step factor `exp(−iG)` is formed from a Hermitian eigendecomposition
//! (dense) or a Lanczos expansion (sparse), so every factor is unitary.

use rayon::prelude::*;

use crate::basis::BasisId;
use crate::error::{FloqError, Result};
use crate::linalg::{
    eigh_real, norm, operator_norm, unitary_exp_complex, unitary_exp_real, CMatrix, CsrMatrix,
    RMatrix, C64, I, ONE, ZERO,
};
use crate::models::{DriveSpec, DrivenModel};

/// Tolerance on `|‖ψ‖ − 1|` accepted for a state vector.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
    t: f64,
    basis: BasisId,
}

impl StateVector {
    pub fn new(amps: Vec<C64>, basis: BasisId, t: f64) -> Result<Self> {
        let n = norm(&amps);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(FloqError::param("state", format!("norm {n} is not 1")));
        }
        Ok(Self { amps, t, basis })
    }

    /// Normalizes `amps` first.
    pub fn normalized(amps: Vec<C64>, basis: BasisId, t: f64) -> Result<Self> {
        let n = norm(&amps);
        if n == 0.0 || !n.is_finite() {
            return Err(FloqError::param("state", "zero vector"));
        }
        Ok(Self {
            amps: amps.into_iter().map(|a| a / n).collect(),
            t,
            basis,
        })
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn basis(&self) -> BasisId {
        self.basis
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub(crate) fn with(&self, amps: Vec<C64>, t: f64) -> Self {
        Self {
            amps,
            t,
            basis: self.basis,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepScheme {
    /// Fourth-order commutator Magnus step.
    Magnus4,
    /// Exponential midpoint rule, second order.
    Midpoint,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagatorOptions {
    pub steps_per_period: usize,
    pub max_steps: usize,
    /// Operator-norm change allowed when the step count is doubled.
    pub tolerance: f64,
    pub scheme: StepScheme,
}

impl Default for PropagatorOptions {
    fn default() -> Self {
        Self {
            steps_per_period: 256,
            max_steps: 1 << 14,
            tolerance: 1e-8,
            scheme: StepScheme::Magnus4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PeriodPropagator {
    u: CMatrix,
    period: f64,
    steps: usize,
    defect: f64,
    basis: BasisId,
}

impl PeriodPropagator {
    pub fn matrix(&self) -> &CMatrix {
        &self.u
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// `‖U_{2n} − U_n‖` from the last doubling.
    pub fn defect(&self) -> f64 {
        self.defect
    }

    pub fn basis(&self) -> BasisId {
        self.basis
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.basis != self.basis {
            return Err(FloqError::BasisMismatch("state and propagator live in different bases".into()));
        }
        let v = &self.u * nalgebra::DVector::from_column_slice(&psi.amps);
        Ok(psi.with(v.iter().copied().collect(), psi.t + self.period))
    }
}

/// `S`, `K`, and `C = [S, K]` of a model, the ingredients of every step.
#[derive(Clone, Debug)]
pub(crate) struct Generator {
    s: CsrMatrix,
    k: CsrMatrix,
    c: CsrMatrix,
    drive: DriveSpec,
}

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // √3/6
const COMMUTATOR_WEIGHT: f64 = 0.144_337_567_297_406_44; // √3/12

impl Generator {
    pub(crate) fn new(model: &DrivenModel) -> Self {
        let s = model.h0().to_csr();
        let k = model.h_hop().clone();
        let c = s.commutator(&k).pruned(1e-15);
        Self {
            s,
            k,
            c,
            drive: *model.drive(),
        }
    }

    /// Coefficients `(a, b)` of `G = hS + aK + i·b·C` for the step `[t0, t0 + h]`.
    fn coefficients(&self, t0: f64, h: f64, scheme: StepScheme) -> (f64, f64) {
        match scheme {
            StepScheme::Midpoint => (h * self.drive.coefficient(t0 + 0.5 * h), 0.0),
            StepScheme::Magnus4 => {
                let f1 = self.drive.coefficient(t0 + (0.5 - GAUSS_OFFSET) * h);
                let f2 = self.drive.coefficient(t0 + (0.5 + GAUSS_OFFSET) * h);
                (0.5 * h * (f1 + f2), COMMUTATOR_WEIGHT * h * h * (f2 - f1))
            }
        }
    }

    fn dense_step(&self, t0: f64, h: f64, scheme: StepScheme) -> CMatrix {
        let (a, b) = self.coefficients(t0, h, scheme);
        let n = self.s.nrows();
        if b == 0.0 || self.c.nnz() == 0 {
            let mut g = RMatrix::zeros(n, n);
            for (r, c, v) in self.s.iter() {
                g[(r, c)] += h * v;
            }
            for (r, c, v) in self.k.iter() {
                g[(r, c)] += a * v;
            }
            return unitary_exp_real(&g);
        }
        let mut g = CMatrix::zeros(n, n);
        for (r, c, v) in self.s.iter() {
            g[(r, c)] += C64::new(h * v, 0.0);
        }
        for (r, c, v) in self.k.iter() {
            g[(r, c)] += C64::new(a * v, 0.0);
        }
        for (r, c, v) in self.c.iter() {
            g[(r, c)] += I * (b * v);
        }
        unitary_exp_complex(&g)
    }

    /// `y = (G − shift·h) x`.
    fn apply(&self, a: f64, b: f64, h: f64, shift: f64, x: &[C64], y: &mut [C64]) {
        self.s.apply_into(x, y, h, false);
        if shift != 0.0 {
            for (yi, xi) in y.iter_mut().zip(x) {
                *yi -= xi * (h * shift);
            }
        }
        self.k.apply_into(x, y, a, true);
        if b != 0.0 && self.c.nnz() > 0 {
            let cx = self.c.apply(x);
            for (yi, ci) in y.iter_mut().zip(cx) {
                *yi += I * ci * b;
            }
        }
    }
}

/// Dense product of `steps` equal steps over `[t0, t0 + duration]`.
pub fn propagator_over(model: &DrivenModel, t0: f64, duration: f64, steps: usize, scheme: StepScheme) -> CMatrix {
    let gen = Generator::new(model);
    product_of_steps(&gen, t0, duration, steps, scheme)
}

fn product_of_steps(gen: &Generator, t0: f64, duration: f64, steps: usize, scheme: StepScheme) -> CMatrix {
    let n = gen.s.nrows();
    let h = duration / steps as f64;
    let chunks = rayon::current_num_threads().max(1) * 4;
    let per = steps.div_ceil(chunks).max(1);
    let partials: Vec<CMatrix> = (0..steps.div_ceil(per))
        .into_par_iter()
        .map(|ch| {
            let lo = ch * per;
            let hi = ((ch + 1) * per).min(steps);
            let mut u = CMatrix::identity(n, n);
            for k in lo..hi {
                u = gen.dense_step(t0 + k as f64 * h, h, scheme) * u;
            }
            u
        })
        .collect();
    partials
        .into_iter()
        .fold(CMatrix::identity(n, n), |acc, p| p * acc)
}

/// One-period propagator with `steps` steps and no convergence check.
pub fn period_propagator_fixed(model: &DrivenModel, steps: usize, scheme: StepScheme) -> CMatrix {
    propagator_over(model, 0.0, model.drive().period_eff(), steps, scheme)
}

/// One-period propagator `U(T, 0)`, doubling the step count until two
/// successive results differ by less than `opts.tolerance` in operator norm.
pub fn period_propagator(model: &DrivenModel, opts: &PropagatorOptions) -> Result<PeriodPropagator> {
    let gen = Generator::new(model);
    let period = model.drive().period_eff();
    let mut steps = opts.steps_per_period.max(1);
    let mut coarse = product_of_steps(&gen, 0.0, period, steps, opts.scheme);
    loop {
        if 2 * steps > opts.max_steps {
            let fine = product_of_steps(&gen, 0.0, period, steps, opts.scheme);
            let defect = operator_norm(&(&fine - &coarse));
            return Err(FloqError::NotConverged { defect, steps });
        }
        let fine = product_of_steps(&gen, 0.0, period, 2 * steps, opts.scheme);
        let defect = operator_norm(&(&fine - &coarse));
        steps *= 2;
        if defect < opts.tolerance {
            return Ok(PeriodPropagator {
                u: fine,
                period,
                steps,
                defect,
                basis: model.basis().id(),
            });
        }
        coarse = fine;
    }
}

/// States at `t = 0, T, …, nT` by repeated matrix-vector products.
pub fn stroboscopic_evolve(prop: &PeriodPropagator, psi0: &StateVector, n_periods: usize) -> Result<Vec<StateVector>> {
    if psi0.basis != prop.basis {
        return Err(FloqError::BasisMismatch("initial state and propagator live in different bases".into()));
    }
    let mut out = Vec::with_capacity(n_periods + 1);
    out.push(psi0.clone());
    for _ in 0..n_periods {
        let next = prop.apply(out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

fn check_grid(model: &DrivenModel, psi0: &StateVector, t_grid: &[f64]) -> Result<()> {
    if psi0.basis != model.basis().id() {
        return Err(FloqError::BasisMismatch("initial state is not in the model basis".into()));
    }
    if t_grid.first().is_some_and(|&t| t.abs() > 0.0) {
        return Err(FloqError::param("t_grid", "must start at 0"));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(FloqError::param("t_grid", "must be ascending"));
    }
    Ok(())
}

fn substeps(t_a: f64, t_b: f64, h_max: f64) -> usize {
    (((t_b - t_a) / h_max) - 1e-9).ceil().max(1.0) as usize
}

/// Dense evolution landing exactly on every grid point, with step length at
/// most `T/steps_per_period`.
pub fn continuous_evolve(
    model: &DrivenModel,
    psi0: &StateVector,
    t_grid: &[f64],
    opts: &PropagatorOptions,
) -> Result<Vec<StateVector>> {
    check_grid(model, psi0, t_grid)?;
    let gen = Generator::new(model);
    let h_max = model.drive().period_eff() / opts.steps_per_period as f64;
    let mut out = Vec::with_capacity(t_grid.len());
    let mut psi = nalgebra::DVector::from_column_slice(psi0.amps());
    let mut t = 0.0;
    for &tb in t_grid {
        if tb > t {
            let k = substeps(t, tb, h_max);
            let h = (tb - t) / k as f64;
            for j in 0..k {
                psi = gen.dense_step(t + j as f64 * h, h, opts.scheme) * psi;
            }
            t = tb;
        }
        out.push(psi0.with(psi.iter().copied().collect(), tb));
    }
    Ok(out)
}

/// Krylov options of the sparse path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovOptions {
    pub max_dim: usize,
    pub tolerance: f64,
    pub max_halvings: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            max_dim: 40,
            tolerance: 1e-12,
            max_halvings: 6,
        }
    }
}

/// `exp(−iA)v` for Hermitian `A` by Lanczos with full reorthogonalization.
/// Returns the result and the a-posteriori residual estimate.
pub fn lanczos_expm(
    apply: impl Fn(&[C64], &mut [C64]),
    v: &[C64],
    opts: &KrylovOptions,
) -> Result<(Vec<C64>, f64)> {
    let n = v.len();
    let beta0 = norm(v);
    if beta0 == 0.0 {
        return Ok((v.to_vec(), 0.0));
    }
    let m_max = opts.max_dim.min(n);
    let mut q: Vec<Vec<C64>> = vec![v.iter().map(|x| x / beta0).collect()];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![ZERO; n];
    let mut residual = f64::INFINITY;
    for j in 0..m_max {
        apply(&q[j], &mut w);
        let a = crate::linalg::inner(&q[j], &w).re;
        alpha.push(a);
        for _ in 0..2 {
            for qi in &q {
                let c = crate::linalg::inner(qi, &w);
                for (wk, qk) in w.iter_mut().zip(qi) {
                    *wk -= c * qk;
                }
            }
        }
        let b = norm(&w);
        let m = j + 1;
        let (y, last) = tridiagonal_exp(&alpha, &beta, m);
        residual = b * last;
        if b < 1e-14 * (1.0 + a.abs()) || residual < opts.tolerance || m == n {
            let mut out = vec![ZERO; n];
            for (qi, yi) in q.iter().zip(&y) {
                for (o, x) in out.iter_mut().zip(qi) {
                    *o += x * yi * beta0;
                }
            }
            return Ok((out, residual));
        }
        beta.push(b);
        q.push(w.iter().map(|x| x / b).collect());
    }
    Err(FloqError::KrylovBreakdown { residual })
}

/// `exp(−iT)e1` for the Lanczos tridiagonal and the modulus of its last entry.
fn tridiagonal_exp(alpha: &[f64], beta: &[f64], m: usize) -> (Vec<C64>, f64) {
    let mut t = RMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let (vals, vecs) = eigh_real(&t);
    let y: Vec<C64> = (0..m)
        .map(|r| {
            (0..m)
                .map(|k| vecs[(r, k)] * vecs[(0, k)] * C64::from_polar(1.0, -vals[k]))
                .sum()
        })
        .collect();
    let last = y[m - 1].norm();
    (y, last)
}

/// Sparse evolution: Magnus steps applied through Lanczos exponentials. Steps
/// whose Krylov expansion does not converge are split in halves.
pub fn sparse_evolve(
    model: &DrivenModel,
    psi0: &StateVector,
    t_grid: &[f64],
    opts: &PropagatorOptions,
    kopts: &KrylovOptions,
) -> Result<Vec<StateVector>> {
    check_grid(model, psi0, t_grid)?;
    let gen = Generator::new(model);
    let diag: Vec<f64> = (0..gen.s.nrows()).map(|r| gen.s.get(r, r)).collect();
    let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shift = if diag.is_empty() { 0.0 } else { 0.5 * (lo + hi) };
    let h_max = model.drive().period_eff() / opts.steps_per_period as f64;
    let mut out = Vec::with_capacity(t_grid.len());
    let mut psi = psi0.amps().to_vec();
    let mut t = 0.0;
    for &tb in t_grid {
        if tb > t {
            let k = substeps(t, tb, h_max);
            let h = (tb - t) / k as f64;
            for j in 0..k {
                psi = sparse_step(&gen, t + j as f64 * h, h, shift, opts.scheme, &psi, kopts, 0)?;
            }
            t = tb;
        }
        out.push(psi0.with(psi.clone(), tb));
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn sparse_step(
    gen: &Generator,
    t0: f64,
    h: f64,
    shift: f64,
    scheme: StepScheme,
    psi: &[C64],
    kopts: &KrylovOptions,
    depth: usize,
) -> Result<Vec<C64>> {
    let (a, b) = gen.coefficients(t0, h, scheme);
    match lanczos_expm(|x, y| gen.apply(a, b, h, shift, x, y), psi, kopts) {
        Ok((v, _)) => {
            let phase = C64::from_polar(1.0, -shift * h);
            Ok(v.into_iter().map(|x| x * phase).collect())
        }
        Err(e) if depth >= kopts.max_halvings => Err(e),
        Err(_) => {
            let half = 0.5 * h;
            let mid = sparse_step(gen, t0, half, shift, scheme, psi, kopts, depth + 1)?;
            sparse_step(gen, t0 + half, half, shift, scheme, &mid, kopts, depth + 1)
        }
    }
}

/// Global phase-insensitive distance `min_φ ‖a − e^{iφ} b‖`.
pub fn state_distance(a: &[C64], b: &[C64]) -> f64 {
    let ov = crate::linalg::inner(b, a);
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { ONE };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y * phase).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
