//! Floating-point time stepping with the exact sub-flows.
//!
//! Every sub-flow is a shear, so a step is a handful of multiply-adds and
//! its Jacobian is a product of unit-determinant matrices.

use crate::error::{Error, Result};
use crate::poly::to_f64;
use crate::scheme::{Generator, SplitScheme};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowParams {
    pub m: f64,
    pub omega: f64,
    pub h: f64,
}

impl FlowParams {
    pub fn new(m: f64, omega: f64, h: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) || !(omega.is_finite() && omega > 0.0) {
            return Err(Error::DomainError(format!(
                "mass and frequency must be positive and finite (m = {m}, omega = {omega})"
            )));
        }
        if !h.is_finite() || h == 0.0 {
            return Err(Error::DomainError(format!("step size must be finite and nonzero, got {h}")));
        }
        Ok(FlowParams { m, omega, h })
    }

    pub fn with_h(&self, h: f64) -> Self {
        FlowParams { h, ..*self }
    }

    /// `omega * h`, the argument of the factor `F`.
    pub fn omega_h(&self) -> f64 {
        self.omega * self.h
    }
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            m: 1.0,
            omega: 1.0,
            h: 0.1,
        }
    }
}

/// A point `(x1, x2, x3)` at time `t`. `x3` is not forced to equal `x1^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct State {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub t: f64,
}

impl State {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        State { x1, x2, x3, t: 0.0 }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn from_coords(x: [f64; 3], t: f64) -> Self {
        State {
            x1: x[0],
            x2: x[1],
            x3: x[2],
            t,
        }
    }

    /// `(x1, x2, x3, h)` for polynomial evaluation.
    pub fn point(&self, h: f64) -> [f64; 4] {
        [self.x1, self.x2, self.x3, h]
    }

    /// `x3 - x1^2`, how far the composite variable has moved off its
    /// defining relation.
    pub fn constraint_defect(&self) -> f64 {
        self.x3 - self.x1 * self.x1
    }

    pub fn max_abs_diff(&self, other: &State) -> f64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Default for State {
    fn default() -> Self {
        State::new(1.0, 1.0, 1.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<State>,
    pub params: FlowParams,
    pub scheme_label: String,
}

impl Trajectory {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }
}

/// `exp(tau X1)`: `x1 += (tau/m) x2`.
pub fn flow1(s: State, tau: f64, p: &FlowParams) -> State {
    State {
        x1: s.x1 + tau / p.m * s.x2,
        ..s
    }
}

/// `exp(tau X2)`: `x2 -= m omega^2 tau x1`.
pub fn flow2(s: State, tau: f64, p: &FlowParams) -> State {
    State {
        x2: s.x2 - p.m * p.omega * p.omega * tau * s.x1,
        ..s
    }
}

/// `exp(tau X3)`: `x3 += (2 tau/m) x1 x2`.
pub fn flow3(s: State, tau: f64, p: &FlowParams) -> State {
    State {
        x3: s.x3 + 2.0 * tau / p.m * s.x1 * s.x2,
        ..s
    }
}

/// Exact flow of one generator. `XT` moves like `X1` and `XV` like `X2`.
pub fn sub_flow(g: Generator, s: State, tau: f64, p: &FlowParams) -> State {
    match g {
        Generator::X1 | Generator::T => flow1(s, tau, p),
        Generator::X2 | Generator::V => flow2(s, tau, p),
        Generator::X3 => flow3(s, tau, p),
    }
}

type Mat3 = [[f64; 3]; 3];

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

fn det3(a: &Mat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Jacobian of one sub-flow at `s`.
pub fn sub_flow_jacobian(g: Generator, s: &State, tau: f64, p: &FlowParams) -> Mat3 {
    let mut j = IDENTITY;
    match g {
        Generator::X1 | Generator::T => j[0][1] = tau / p.m,
        Generator::X2 | Generator::V => j[1][0] = -p.m * p.omega * p.omega * tau,
        Generator::X3 => {
            j[2][0] = 2.0 * tau / p.m * s.x2;
            j[2][1] = 2.0 * tau / p.m * s.x1;
        }
    }
    j
}

/// A scheme with float stage times, ready for repeated stepping.
#[derive(Clone, Debug)]
pub struct Integrator {
    /// Stages in application order (the stage list reversed).
    stages: Vec<(Generator, f64)>,
    pub params: FlowParams,
    pub label: String,
}

impl Integrator {
    pub fn new(scheme: &SplitScheme, params: &FlowParams) -> Self {
        Integrator {
            stages: scheme
                .stages
                .iter()
                .rev()
                .map(|s| (s.generator, to_f64(&s.fraction) * params.h))
                .collect(),
            params: *params,
            label: scheme.label.clone(),
        }
    }

    /// Applies the stages in list order instead of reversed. Only useful
    /// to show that the order does not matter for palindromes.
    pub fn left_to_right(mut self) -> Self {
        self.stages.reverse();
        self
    }

    pub fn step(&self, s: State) -> State {
        let mut out = s;
        for &(g, tau) in &self.stages {
            out = sub_flow(g, out, tau, &self.params);
        }
        out.t = s.t + self.params.h;
        out
    }

    pub fn jacobian(&self, s: &State) -> Mat3 {
        let mut j = IDENTITY;
        let mut cur = *s;
        for &(g, tau) in &self.stages {
            j = mat_mul(&sub_flow_jacobian(g, &cur, tau, &self.params), &j);
            cur = sub_flow(g, cur, tau, &self.params);
        }
        j
    }
}

/// One step of `scheme`: stage flows applied right-to-left through the
/// stage list with `tau = fraction * h`, then `t += h`.
pub fn step(scheme: &SplitScheme, s: State, p: &FlowParams) -> State {
    Integrator::new(scheme, p).step(s)
}

/// Runs `nsteps` steps and keeps every `stride`-th state, starting with
/// `s0`. Sample times are `t0 + k h` computed directly, not accumulated.
pub fn run(scheme: &SplitScheme, s0: State, p: &FlowParams, nsteps: usize, stride: usize) -> Result<Trajectory> {
    if stride < 1 {
        return Err(Error::InvalidArgument("stride must be at least 1".into()));
    }
    let integrator = Integrator::new(scheme, p);
    let mut samples = Vec::with_capacity(nsteps / stride + 1);
    samples.push(s0);
    let mut s = s0;
    for k in 1..=nsteps {
        s = integrator.step(s);
        s.t = s0.t + k as f64 * p.h;
        if k % stride == 0 {
            samples.push(s);
        }
    }
    Ok(Trajectory {
        samples,
        params: *p,
        scheme_label: scheme.label.clone(),
    })
}

/// Jacobian matrix of the one-step map at `s`, by the chain rule through
/// the shear stages.
pub fn step_jacobian(scheme: &SplitScheme, s: &State, p: &FlowParams) -> Mat3 {
    Integrator::new(scheme, p).jacobian(s)
}

/// Determinant of the one-step Jacobian as the product of the stage
/// determinants. Each stage is a shear, so this is 1.
pub fn jacobian_det(scheme: &SplitScheme, s: &State, p: &FlowParams) -> f64 {
    let integrator = Integrator::new(scheme, p);
    let mut cur = *s;
    let mut det = 1.0;
    for &(g, tau) in &integrator.stages {
        det *= det3(&sub_flow_jacobian(g, &cur, tau, p));
        cur = sub_flow(g, cur, tau, p);
    }
    det
}

/// Determinant of the central finite-difference Jacobian with spacing
/// `delta`.
pub fn jacobian_det_fd(scheme: &SplitScheme, s: &State, p: &FlowParams, delta: f64) -> f64 {
    let integrator = Integrator::new(scheme, p);
    let mut j = [[0.0; 3]; 3];
    for col in 0..3 {
        let mut plus = s.coords();
        let mut minus = s.coords();
        plus[col] += delta;
        minus[col] -= delta;
        let fp = integrator.step(State::from_coords(plus, s.t)).coords();
        let fm = integrator.step(State::from_coords(minus, s.t)).coords();
        for row in 0..3 {
            j[row][col] = (fp[row] - fm[row]) / (2.0 * delta);
        }
    }
    det3(&j)
}

/// The `(x1, x2)` block of the one-step map, read off by stepping the unit
/// vectors. For every built-in scheme this block is linear.
pub fn linear_block(scheme: &SplitScheme, p: &FlowParams) -> [[f64; 2]; 2] {
    let integrator = Integrator::new(scheme, p);
    let e1 = integrator.step(State::new(1.0, 0.0, 0.0));
    let e2 = integrator.step(State::new(0.0, 1.0, 0.0));
    [[e1.x1, e2.x1], [e1.x2, e2.x2]]
}

/// Per-step rotation angle of a unit-determinant 2x2 block, `acos(tr/2)`.
pub fn block_angle(block: &[[f64; 2]; 2]) -> Result<f64> {
    let half_trace = (block[0][0] + block[1][1]) / 2.0;
    if !(-1.0..1.0).contains(&half_trace) {
        return Err(Error::DomainError(format!(
            "half trace {half_trace} is outside (-1, 1): the step is not a rotation"
        )));
    }
    Ok(half_trace.acos())
}

/// Per-step rotation angle of the Verlet block, `acos(1 - omega^2 h^2 / 2)`,
/// taken from the trace of the composed stage matrices.
pub fn rotation_angle(p: &FlowParams) -> Result<f64> {
    let x = p.omega_h();
    if !(x.abs() < 2.0) {
        return Err(Error::DomainError(format!("|omega h| = {} must be below 2", x.abs())));
    }
    let half = p.h / 2.0;
    let kick = [[1.0, 0.0], [-p.m * p.omega * p.omega * p.h, 1.0]];
    let drift = [[1.0, half / p.m], [0.0, 1.0]];
    let mul = |a: [[f64; 2]; 2], b: [[f64; 2]; 2]| -> [[f64; 2]; 2] {
        std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
    };
    block_angle(&mul(drift, mul(kick, drift)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{NAMBU_SCHEMES, VERLET_SCHEMES};

    fn unit() -> FlowParams {
        FlowParams::default()
    }

    fn close(a: &State, b: &State, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn sub_flow_examples() {
        let p = unit();
        let s = State::default();
        assert!(close(&flow1(s, 0.1, &p), &State::new(1.1, 1.0, 1.0), 1e-15));
        assert!(close(&flow3(s, 0.1, &p), &State::new(1.0, 1.0, 1.2), 1e-15));
        assert_eq!(flow2(s, 0.0, &p), s);
        assert!(close(&flow2(s, 0.1, &p), &State::new(1.0, 0.9, 1.0), 1e-15));
    }

    #[test]
    fn one_step_of_12321() {
        let s = step(&SplitScheme::builtin("12321").unwrap(), State::default(), &unit());
        assert!(close(&s, &State::new(1.09475, 0.895, 1.198975), 1e-14), "{s:?}");
        assert!((s.t - 0.1).abs() < 1e-15);
    }

    #[test]
    fn palindromes_ignore_application_order() {
        let p = unit();
        let s0 = State::new(0.3, -1.2, 0.7);
        for l in NAMBU_SCHEMES.iter().chain(&VERLET_SCHEMES) {
            let scheme = SplitScheme::builtin(l).unwrap();
            let a = Integrator::new(&scheme, &p);
            let b = Integrator::new(&scheme, &p).left_to_right();
            assert!(close(&a.step(s0), &b.step(s0), 0.0), "{l}");
        }
    }

    #[test]
    fn reversibility() {
        let p = unit();
        let s0 = State::new(0.3, -1.2, 0.7);
        for l in NAMBU_SCHEMES.iter().chain(&VERLET_SCHEMES) {
            let scheme = SplitScheme::builtin(l).unwrap();
            let back = step(&scheme, step(&scheme, s0, &p), &p.with_h(-p.h));
            assert!(close(&back, &s0, 1e-12), "{l}");
        }
    }

    #[test]
    fn run_records_strided_samples() {
        let scheme = SplitScheme::builtin("32123").unwrap();
        let t = run(&scheme, State::default(), &unit(), 0, 1).unwrap();
        assert_eq!(t.samples, vec![State::default()]);
        let t = run(&scheme, State::default(), &unit(), 10, 3).unwrap();
        assert_eq!(t.samples.len(), 4);
        assert!((t.samples[3].t - 0.9).abs() < 1e-15);
        assert!(run(&scheme, State::default(), &unit(), 10, 0).is_err());
    }

    #[test]
    fn jacobians() {
        let p = unit();
        for l in NAMBU_SCHEMES {
            let scheme = SplitScheme::builtin(l).unwrap();
            assert_eq!(jacobian_det(&scheme, &State::default(), &p), 1.0);
            let fd = jacobian_det_fd(&scheme, &State::default(), &p, 1e-5);
            assert!((fd - 1.0).abs() < 1e-6, "{l}: {fd}");
            assert!((det3(&step_jacobian(&scheme, &State::default(), &p)) - 1.0).abs() < 1e-14);
        }
        let block = linear_block(&SplitScheme::builtin("TVT").unwrap(), &p);
        assert!((block[0][0] + block[1][1] - 1.99).abs() < 1e-15);
    }

    #[test]
    fn rotation_angle_values() {
        let a = rotation_angle(&unit()).unwrap();
        assert!((a - 0.10004171361154007).abs() < 1e-15);
        assert!((a - 2.0 * 0.05f64.asin()).abs() < 1e-15);
        let small = FlowParams::new(1.0, 1.0, 1e-4).unwrap();
        assert!((rotation_angle(&small).unwrap() / small.h - 1.0).abs() < 1e-6);
        assert!(rotation_angle(&FlowParams::new(1.0, 2.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(FlowParams::new(0.0, 1.0, 0.1).is_err());
        assert!(FlowParams::new(1.0, 1.0, 0.0).is_err());
        assert!(FlowParams::new(1.0, f64::INFINITY, 0.1).is_err());
    }
}
