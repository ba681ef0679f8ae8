//! The eleven acceptance criteria as runnable checks with pinned tolerances.

use std::time::Instant;

use ancf14_core::assembly::{assemble_energy, kinetic_energy, weld_disk};
use ancf14_core::element::{mass_matrix, pack, NodalState, ShapeEval};
use ancf14_core::frame::{bishop_march, numerical_twist_rate, sf_frame, CurveSample};
use ancf14_core::joint::AngleDriver;
use ancf14_core::solver::{check_gradients, modal_analysis, Integrator};
use ancf14_core::{
    Ancf14Element, Attachment, BeamSpec, CrossSection, DeformationMode, Driver, FrameTriad, Joint, Model, Node,
    QuadratureRule, ReferenceShape, RigidBody, SolverSettings, SystemState,
};
use nalgebra::{DVector, Matrix3, Rotation3, Unit, Vector3, Vector4};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::config::{BenchmarkConfig, BenchmarkName};
use crate::error::Result;
use crate::report::Outcome;
use crate::{buckling, princeton, shaft, spring};

/// Outcome of one numbered criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub number: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub runtime_s: f64,
}

impl Criterion {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!("{status} criterion {:>2} {}: {} [{:.2} s]", self.number, self.title, self.detail, self.runtime_s)
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed().as_secs_f64()))
}

fn check_passed(o: &Outcome, id: &str) -> bool {
    o.check(id).is_some_and(|c| c.passed)
}

fn measured(o: &Outcome, id: &str) -> String {
    o.check(id).and_then(|c| c.measured).map_or_else(|| "none".to_owned(), |v| format!("{v:.6}"))
}

fn preset(name: BenchmarkName) -> BenchmarkConfig {
    BenchmarkConfig::preset(name)
}

/// Criteria 1 and 2 from one spring run with 20 elements.
pub fn spring_criteria() -> Result<[Criterion; 2]> {
    let (o, t) = timed(|| spring::run_spring(&preset(BenchmarkName::Spring)))?;
    let k = measured(&o, "spring.k_reported");
    let c1 = Criterion {
        number: 1,
        title: "spring stiffness",
        passed: check_passed(&o, "spring.k_reported") && check_passed(&o, "spring.k_theory") && t < 60.0,
        detail: format!("k = {k} N/mm vs 1.674 (1%) and 1.6667 (1.5%), runtime < 60 s"),
        runtime_s: t,
    };
    let c2 = Criterion {
        number: 2,
        title: "spring convergence",
        passed: check_passed(&o, "spring.convergence_slope"),
        detail: format!("log-log error slope {} in [3.0, 4.5]", measured(&o, "spring.convergence_slope")),
        runtime_s: t,
    };
    Ok([c1, c2])
}

fn random_section(rng: &mut StdRng) -> CrossSection {
    if rng.gen_bool(0.5) {
        CrossSection::rectangle(rng.gen_range(1e-3..0.1), rng.gen_range(1e-3..0.1))
    } else {
        let outer = rng.gen_range(2e-3..0.1);
        CrossSection::tube(outer, outer * rng.gen_range(0.0..0.95))
    }
}

fn random_spec(rng: &mut StdRng) -> BeamSpec {
    BeamSpec::new(rng.gen_range(1e9..3e11), rng.gen_range(0.0..0.45), rng.gen_range(1e3..1e4), random_section(rng), rng.gen_range(0.05..3.0))
}

/// Criterion 3: closed-form mass matrix against Gauss quadrature of the shape functions.
pub fn mass_matrix_criterion() -> Result<Criterion> {
    let (worst, t) = timed(|| {
        let mut rng = StdRng::seed_from_u64(3);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let s = random_spec(&mut rng);
            let rule = QuadratureRule::gauss_legendre(10, s.length)?;
            let mut oracle = nalgebra::SMatrix::<f64, 14, 14>::zeros();
            for &(x, w) in &rule.points {
                let sh = ShapeEval::at(x, s.length)?;
                let (sm, sb) = (sh.s_matrix(), sh.sbar());
                oracle += (sm.transpose() * sm * (s.rho * s.area) + sb.transpose() * sb * (s.rho * s.j_polar)) * w;
            }
            worst = worst.max((mass_matrix(&s) - oracle).amax() / oracle.amax());
        }
        Ok(worst)
    })?;
    Ok(Criterion {
        number: 3,
        title: "mass matrix oracle",
        passed: worst <= 1e-12 && t < 1.0,
        detail: format!("max relative deviation {worst:.3e} <= 1e-12 over 100 specs, runtime < 1 s"),
        runtime_s: t,
    })
}

/// Two beams, two rigid bodies and one joint of every kind.
fn gradient_model() -> Result<Model> {
    let mut m = Model::new();
    let spec = BeamSpec::new(7e10, 0.33, 2700.0, CrossSection::rectangle(0.02, 0.01), 1.0);
    let a: Vec<usize> = (0..=3).map(|i| m.add_node(Node::new(Vector3::new(0.3 * i as f64, 0.0, 0.0), Vector3::x(), 0.0))).collect();
    let dir_b = Vector3::new(0.2, 1.0, 0.3).normalize();
    let start_b = Vector3::new(0.9, 0.05, 0.0);
    let b: Vec<usize> = (0..=2).map(|i| m.add_node(Node::new(start_b + dir_b * (0.25 * i as f64), dir_b, 0.1))).collect();
    m.add_beam(&a, &spec, Some(FrameTriad::from_tangent_and_hint(&Vector3::x(), &Vector3::y())?), ReferenceShape::Straight)?;
    m.add_beam(&b, &spec, None, ReferenceShape::Initial)?;
    let inertia = Matrix3::from_diagonal(&Vector3::new(0.02, 0.01, 0.015));
    let welded = m.add_body(RigidBody::new(1.5, inertia))?;
    let mut free = RigidBody::new(0.8, inertia);
    free.position = Vector3::new(0.2, 0.6, 0.1);
    let free = m.add_body(free)?;
    weld_disk(&mut m, a[2], Vector3::new(0.0, 0.01, 0.03), welded)?;
    let joints = [
        Joint::clamp_at(&m, a[0])?,
        Joint::Spherical { a: Attachment::Node(a[3]), offset_a: Vector3::new(0.0, 0.05, 0.0), b: Attachment::Node(b[0]), offset_b: Vector3::zeros() },
        Joint::Revolute {
            a: Attachment::Ground,
            offset_a: Vector3::new(1.3, 0.5, 0.2),
            axis_a: Vector3::z(),
            b: Attachment::Node(b[2]),
            offset_b: Vector3::new(0.0, 0.0, 0.02),
            axis_b: Vector3::y(),
            driver: Some(AngleDriver { reference_a: Vector3::x(), reference_b: Vector3::z(), angle: Driver::CrankHalfTurn { period: 0.4 } }),
        },
        Joint::Cylindrical {
            a: Attachment::Body(free),
            offset_a: Vector3::new(0.01, 0.0, 0.0),
            axis_a: Vector3::x(),
            b: Attachment::Node(b[1]),
            offset_b: Vector3::new(0.0, 0.01, 0.0),
            axis_b: Vector3::x(),
        },
        Joint::Prescribed { point: Attachment::Node(a[1]), offset: Vector3::new(0.0, 0.0, 0.01), direction: Vector3::z(), driver: Driver::Linear { start: 0.0, rate: 0.1 } },
        Joint::Orientation { a: Attachment::Body(free), vector_a: Vector3::x(), b: Attachment::Node(a[3]), vector_b: Vector3::y(), value: 0.0 },
        Joint::Twist { node: b[1], driver: Driver::ShaftSpinUp { omega: 10.0 } },
    ];
    for j in joints {
        m.add_joint(j)?;
    }
    Ok(m)
}

fn random_state(m: &Model, rng: &mut StdRng) -> Result<SystemState> {
    let mut s = m.initial_state()?;
    for k in 0..m.nodes.len() {
        let o = m.node_dof(k);
        for i in 0..7 {
            let amp = match i {
                0..=2 => 0.05,
                3..=5 => 0.2,
                _ => 0.5,
            };
            s.q[o + i] += amp * rng.gen_range(-1.0..1.0);
        }
    }
    for b in 0..m.bodies.len() {
        let o = m.body_dof(b);
        for i in 0..3 {
            s.q[o + i] += 0.05 * rng.gen_range(-1.0..1.0);
        }
        let quat = Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0)).normalize();
        s.q.fixed_rows_mut::<4>(o + 3).copy_from(&quat);
    }
    s.time = rng.gen_range(0.0..0.3);
    Ok(s)
}

/// Criterion 4: every analytic derivative surface against central differences.
pub fn gradient_criterion() -> Result<Criterion> {
    let (worst, t) = timed(|| {
        let m = gradient_model()?;
        let mut rng = StdRng::seed_from_u64(4);
        let mut worst = [0.0f64; 4];
        for _ in 0..20 {
            let s = random_state(&m, &mut rng)?;
            let r = check_gradients(&m, &s, &SolverSettings::default())?;
            for (w, v) in worst.iter_mut().zip([r.internal_small, r.internal_large, r.constraint_jacobian, r.bishop_sensitivities]) {
                *w = w.max(v);
            }
        }
        Ok(worst)
    })?;
    let max = worst.iter().copied().fold(0.0, f64::max);
    Ok(Criterion {
        number: 4,
        title: "gradient suite",
        passed: max < 1e-5 && t < 30.0,
        detail: format!(
            "max relative error small {:.2e}, large {:.2e}, constraints {:.2e}, Bishop {:.2e} < 1e-5 over 20 states, runtime < 30 s",
            worst[0], worst[1], worst[2], worst[3]
        ),
        runtime_s: t,
    })
}

/// Criterion 5: rigidly moved straight elements store no energy.
pub fn rigid_motion_criterion() -> Result<Criterion> {
    let (worst, t) = timed(|| {
        let mut rng = StdRng::seed_from_u64(5);
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let s = random_spec(&mut rng);
            let q0 = NodalState::straight(Vector3::zeros(), Vector3::x(), s.length, 0.0);
            let axis = Unit::new_normalize(Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0)));
            let r = Rotation3::from_axis_angle(&axis, rng.gen_range(-3.1..3.1)).into_inner();
            let shift = Vector3::from_fn(|_, _| rng.gen_range(-5.0..5.0));
            let theta = rng.gen_range(-3.0..3.0);
            let q = pack(&(r * q0.block(0) + shift), &(r * q0.block(1)), theta, &(r * q0.block(2) + shift), &(r * q0.block(3)), theta);
            let el = Ancf14Element::new(s)?.with_director(FrameTriad::canonical().rotated(&r));
            for mode in [DeformationMode::Small, DeformationMode::Large] {
                worst = worst.max(el.elastic_energy(&q, mode)?.abs() / (s.e * s.area * s.length));
            }
        }
        Ok(worst)
    })?;
    Ok(Criterion {
        number: 5,
        title: "rigid-motion zero energy",
        passed: worst < 1e-10,
        detail: format!("max |U| / (E A l) = {worst:.3e} < 1e-10 over 50 transforms, both energies"),
        runtime_s: t,
    })
}

type Deriv = fn(f64) -> Vector3<f64>;

struct TestCurve {
    r1: Deriv,
    r2: Deriv,
}

impl TestCurve {
    fn sample(&self, x: f64) -> CurveSample {
        CurveSample::new(x, (self.r1)(x), (self.r2)(x))
    }

    /// `t'` from `r'` and `r''`.
    fn t_prime(&self, x: f64) -> Vector3<f64> {
        let (a, b) = ((self.r1)(x), (self.r2)(x));
        let t = a.normalize();
        (b - t * t.dot(&b)) / a.norm()
    }
}

const HELIX: TestCurve = TestCurve { r1: |x| Vector3::new(-x.sin(), x.cos(), 1.0), r2: |x| Vector3::new(-x.cos(), -x.sin(), 0.0) };
const WAVY: TestCurve = TestCurve { r1: |x| Vector3::new(1.0, x.cos(), 0.6 * x), r2: |x| Vector3::new(0.0, -x.sin(), 0.6) };
const S_CURVE: TestCurve = TestCurve { r1: |x| Vector3::new(1.0, 3.0 * x * x, 0.0), r2: |x| Vector3::new(0.0, 6.0 * x, 0.0) };

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Parallel transport `w' = -(t'.w) t` by RK4 with `sub` substeps per station interval.
fn rk4_transport(c: &TestCurve, w0: Vector3<f64>, stations: &[f64], sub: usize) -> Vec<Vector3<f64>> {
    let f = |x: f64, w: &Vector3<f64>| -(c.r1)(x).normalize() * c.t_prime(x).dot(w);
    let mut w = w0;
    let mut out = vec![w0];
    for s in stations.windows(2) {
        let h = (s[1] - s[0]) / sub as f64;
        for k in 0..sub {
            let x = s[0] + k as f64 * h;
            let k1 = f(x, &w);
            let k2 = f(x + h / 2.0, &(w + k1 * (h / 2.0)));
            let k3 = f(x + h / 2.0, &(w + k2 * (h / 2.0)));
            let k4 = f(x + h, &(w + k3 * h));
            w += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        out.push(w);
    }
    out
}

fn max_discrete_twist(c: &TestCurve, n: usize) -> Result<f64> {
    let st = grid(0.0, 2.0, n);
    let dx = st[1] - st[0];
    let f = bishop_march(|x| c.sample(x), &FrameTriad::from_tangent(&(c.r1)(0.0))?, &st)?;
    Ok((1..n - 1).map(|i| numerical_twist_rate(&f[i - 1], &f[i], &f[i + 1], dx).abs()).fold(0.0, f64::max))
}

/// Criterion 6: Bishop frames are twist-free, match an RK4 transport oracle and stay
/// continuous through an inflection where the Frenet frame flips.
pub fn bishop_criterion() -> Result<Criterion> {
    let ((twist, order, rk4, flip, continuous), t) = timed(|| {
        let (mut twist, mut order, mut rk4) = (0.0f64, f64::INFINITY, 0.0f64);
        for c in [&HELIX, &WAVY] {
            let (coarse, fine) = (max_discrete_twist(c, 50)?, max_discrete_twist(c, 100)?);
            twist = twist.max(fine);
            order = order.min((coarse / fine).log2());
            let st = grid(0.0, 2.0, 1000);
            let init = FrameTriad::from_tangent(&(c.r1)(0.0))?;
            let frames = bishop_march(|x| c.sample(x), &init, &st)?;
            let (u, v) = (rk4_transport(c, init.a2, &st, 8), rk4_transport(c, init.a3, &st, 8));
            for (k, f) in frames.iter().enumerate() {
                rk4 = rk4.max((f.a2 - u[k]).amax()).max((f.a3 - v[k]).amax());
            }
        }
        let n = 100;
        let st: Vec<f64> = (0..n).map(|i| -1.0 + (i as f64 + 0.5) * 2.0 / n as f64).collect();
        let init = FrameTriad::from_tangent_and_hint(&(S_CURVE.r1)(st[0]), &Vector3::y())?;
        let frames = bishop_march(|x| S_CURVE.sample(x), &init, &st)?;
        let (before, after) = (sf_frame(&S_CURVE.sample(st[n / 2 - 1]))?, sf_frame(&S_CURVE.sample(st[n / 2]))?);
        let flip = before.a2.dot(&after.a2);
        let continuous = frames.windows(2).map(|w| w[0].a2.dot(&w[1].a2)).fold(1.0, f64::min);
        Ok((twist, order, rk4, flip, continuous))
    })?;
    Ok(Criterion {
        number: 6,
        title: "Bishop frame",
        passed: twist < 1e-3 && order >= 1.0 && rk4 < 1e-6 && flip < 0.0 && continuous > 0.99,
        detail: format!(
            "discrete twist {twist:.2e} (order {order:.2}), RK4 deviation {rk4:.2e} < 1e-6, Frenet normal dot across inflection {flip:.3}, min Bishop neighbour dot {continuous:.5}"
        ),
        runtime_s: t,
    })
}

fn shaft_rest_frequency() -> Result<f64> {
    let cfg = preset(BenchmarkName::Shaft);
    let (rest, _) = shaft::shaft_model(6, Driver::Constant { value: 0.0 })?;
    let s0 = shaft::equilibrium(&cfg, &rest, 1e-11)?;
    let modal = modal_analysis(&rest, &s0, &SolverSettings::default())?;
    Ok(modal.frequencies.first().copied().unwrap_or(f64::NAN))
}

/// Criterion 7: first bending frequency of the shaft with its disk at rest.
pub fn shaft_modal_criterion() -> Result<Criterion> {
    let (w, t) = timed(shaft_rest_frequency)?;
    Ok(Criterion {
        number: 7,
        title: "shaft modal check",
        passed: (w - 56.7).abs() <= 0.02 * 56.7 && t < 10.0,
        detail: format!("first frequency {w:.4} rad/s within 2% of 56.7, runtime < 10 s"),
        runtime_s: t,
    })
}

/// Criterion 8: spin-up run of the shaft.
pub fn shaft_dynamics_criterion() -> Result<Criterion> {
    let (o, t) = timed(|| shaft::run_shaft(&preset(BenchmarkName::Shaft)))?;
    Ok(Criterion {
        number: 8,
        title: "shaft dynamics",
        passed: check_passed(&o, "shaft.onset") && t < 600.0,
        detail: format!("amplitude-growth onset at {} s in [0.95, 1.25], runtime < 600 s", measured(&o, "shaft.onset")),
        runtime_s: t,
    })
}

/// Criterion 9: buckling onset and the twist-locked ablation.
pub fn buckling_criterion() -> Result<Criterion> {
    let (o, t) = timed(|| buckling::run_buckling(&preset(BenchmarkName::Buckling)))?;
    Ok(Criterion {
        number: 9,
        title: "lateral torsional buckling",
        passed: check_passed(&o, "buckling.onset") && check_passed(&o, "buckling.no_torsion") && t < 600.0,
        detail: format!(
            "onset at {} s in [0.09, 0.15]; twist-locked max |u_Y| {} m < 1e-6; runtime < 600 s",
            measured(&o, "buckling.onset"),
            o.check("buckling.no_torsion").and_then(|c| c.measured).map_or_else(|| "none".into(), |v| format!("{v:.3e}"))
        ),
        runtime_s: t,
    })
}

/// Criterion 10: rotated-section cantilever.
pub fn princeton_criterion() -> Result<Criterion> {
    let (o, t) = timed(|| princeton::run_princeton(&preset(BenchmarkName::Princeton)))?;
    let ids = ["princeton.twist_at_zero", "princeton.strong_axis", "princeton.all_converged"];
    Ok(Criterion {
        number: 10,
        title: "rotated-section cantilever",
        passed: ids.iter().all(|id| check_passed(&o, id)) && t < 300.0,
        detail: format!(
            "twist at 0 deg {} rad < 1e-4; strong-axis deflection {} m within 5% of {:.6}; converged {} of 21; runtime < 300 s",
            measured(&o, ids[0]),
            measured(&o, ids[1]),
            princeton::strong_axis_deflection(princeton::LOADS_N[0]),
            measured(&o, ids[2])
        ),
        runtime_s: t,
    })
}

fn test_beam(n: usize) -> Result<(Model, Vec<usize>)> {
    let mut m = Model::new();
    let ids: Vec<usize> = (0..=n).map(|i| m.add_node(Node::new(Vector3::new(i as f64 / n as f64, 0.0, 0.0), Vector3::x(), 0.0))).collect();
    let spec = BeamSpec::new(2.0e11, 0.3, 7800.0, CrossSection::rectangle(0.02, 0.03), 1.0);
    m.add_beam(&ids, &spec, None, ReferenceShape::Straight)?;
    Ok((m, ids))
}

fn perturbed(m: &Model, seed: u64, dq: f64, dv: f64) -> Result<SystemState> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut s = m.initial_state()?;
    s.q.iter_mut().for_each(|v| *v += dq * rng.gen_range(-1.0..1.0));
    s.q_dot.iter_mut().for_each(|v| *v = dv * rng.gen_range(-1.0..1.0));
    Ok(s)
}

/// Relative energy error bound and the change of its mean between the first and last tenth.
fn energy_drift() -> Result<(f64, f64)> {
    let (mut m, ids) = test_beam(2)?;
    m.add_joint(Joint::clamp_at(&m, ids[0])?)?;
    let mut s0 = m.initial_state()?;
    for k in 1..m.nodes.len() {
        let x = k as f64 / 2.0;
        s0.q_dot[7 * k + 2] = 0.05 * x * x;
        s0.q_dot[7 * k + 5] = 0.1 * x;
    }
    let settings = SolverSettings { dt: 2e-4, reuse_jacobian: true, ..SolverSettings::default() };
    let mut integ = Integrator::new(&m, &s0, &settings)?;
    let energy = |s: &SystemState| -> Result<f64> { Ok(kinetic_energy(&m, &s.q, &s.q_dot) + assemble_energy(&m, s, settings.mode)?) };
    let e0 = energy(&s0)?;
    let n = 10_000;
    let mut errors = Vec::with_capacity(n);
    for _ in 0..n {
        integ.step()?;
        errors.push((energy(integ.state())? - e0) / e0);
    }
    let bound = errors.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    let mean = |w: &[f64]| w.iter().sum::<f64>() / w.len() as f64;
    Ok((bound, (mean(&errors[n - n / 10..]) - mean(&errors[..n / 10])).abs()))
}

fn momentum_change() -> Result<f64> {
    let (m, _) = test_beam(3)?;
    let s0 = perturbed(&m, 11, 1e-3, 0.5)?;
    let mut integ = Integrator::new(&m, &s0, &SolverSettings { dt: 1e-4, reuse_jacobian: true, ..Default::default() })?;
    let total = |p: &DVector<f64>| -> Vector3<f64> { (0..m.nodes.len()).map(|k| p.fixed_rows::<3>(m.node_dof(k)).into_owned()).sum() };
    let mut prev = total(integ.momentum());
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        integ.step()?;
        let now = total(integ.momentum());
        worst = worst.max((now - prev).amax());
        prev = now;
    }
    Ok(worst)
}

/// Planar free motion run forward, reversed and run back.
fn reversal_error() -> Result<f64> {
    let (m, _) = test_beam(2)?;
    let mut s0 = perturbed(&m, 4, 0.002, 0.2)?;
    for k in 0..m.nodes.len() {
        for d in [2, 5, 6] {
            s0.q[m.node_dof(k) + d] = 0.0;
            s0.q_dot[m.node_dof(k) + d] = 0.0;
        }
    }
    let mut integ = Integrator::new(&m, &s0, &SolverSettings { dt: 1e-4, newton_tol: 1e-13, ..Default::default() })?;
    for _ in 0..50 {
        integ.step()?;
    }
    integ.reverse();
    for _ in 0..50 {
        integ.step()?;
    }
    Ok((&integ.state().q - &s0.q).amax())
}

/// Criterion 11: structure preservation of the integrator.
pub fn integrator_criterion() -> Result<Criterion> {
    let (((bound, drift), momentum, reversal), t) = timed(|| Ok((energy_drift()?, momentum_change()?, reversal_error()?)))?;
    Ok(Criterion {
        number: 11,
        title: "integrator properties",
        passed: bound < 1e-2 && drift < 1e-3 && momentum < 1e-10 && reversal < 1e-8,
        detail: format!(
            "energy error bound {bound:.2e} < 1e-2 with mean shift {drift:.2e} < 1e-3 over 1e4 steps; momentum change per step {momentum:.2e} < 1e-10; reversal closure {reversal:.2e} < 1e-8"
        ),
        runtime_s: t,
    })
}

/// All criteria in order.
pub fn run_all() -> Result<Vec<Criterion>> {
    let [c1, c2] = spring_criteria()?;
    Ok(vec![
        c1,
        c2,
        mass_matrix_criterion()?,
        gradient_criterion()?,
        rigid_motion_criterion()?,
        bishop_criterion()?,
        shaft_modal_criterion()?,
        shaft_dynamics_criterion()?,
        buckling_criterion()?,
        princeton_criterion()?,
        integrator_criterion()?,
    ])
}
