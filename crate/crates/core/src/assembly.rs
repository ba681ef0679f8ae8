//! Multibody model: nodes shared by beam chains, rigid bodies, joints and loads,
//! assembled into global mass, force and constraint quantities.
//!
//! Coordinates are ordered node by node (`[r, r', theta]`, 7 each), followed by
//! the rigid bodies (`[p, Q]`, 7 each).

use nalgebra::{DMatrix, DVector, Matrix3, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::chain::{evaluate_chain, ChainElement, ChainRequest, NodeFrame};
use crate::element::{gravity_force, mass_matrix, BeamSpec, DeformationMode, ReferenceStrain, NODE_DOFS};
use crate::error::{Error, Result};
use crate::frame::{bishop_step, unit_tangent, FrameTriad};
use crate::joint::{evaluate_joints, Attachment, Joint};
use crate::quadrature::QuadratureRule;
use crate::rigid::{self, RigidBody};

pub const BODY_DOFS: usize = 7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub position: Vector3<f64>,
    pub slope: Vector3<f64>,
    #[serde(default)]
    pub theta: f64,
    /// Initial rates of `[r, r', theta]`.
    #[serde(default)]
    pub velocity: [f64; NODE_DOFS],
}

impl Node {
    pub fn new(position: Vector3<f64>, slope: Vector3<f64>, theta: f64) -> Self {
        Self { position, slope, theta, velocity: [0.0; NODE_DOFS] }
    }

    pub fn coordinates(&self) -> [f64; NODE_DOFS] {
        let (r, s) = (self.position, self.slope);
        [r.x, r.y, r.z, s.x, s.y, s.z, self.theta]
    }
}

/// Stress-free shape of a beam.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceShape {
    /// Straight, unstretched and untwisted.
    #[default]
    Straight,
    /// The geometry of the nodes when the beam is added.
    Initial,
}

/// A chain of elements through consecutive `nodes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Beam {
    pub nodes: Vec<usize>,
    pub specs: Vec<BeamSpec>,
    /// Initial director at the first node.
    pub director: FrameTriad,
    /// Per element, per quadrature point.
    pub reference: Vec<Vec<ReferenceStrain>>,
}

impl Beam {
    pub fn n_elements(&self) -> usize {
        self.specs.len()
    }
}

/// Dead load at a node: a force on `r` and a generalized moment on `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodalLoad {
    pub node: usize,
    #[serde(default)]
    pub force: Vector3<f64>,
    #[serde(default)]
    pub torque: f64,
}

/// Offsets of every node and body in the global coordinate vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    pub nodes: Vec<usize>,
    pub bodies: Vec<usize>,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub q: DVector<f64>,
    pub q_dot: DVector<f64>,
    pub lambda: DVector<f64>,
    /// Drive parameter: time in dynamics, load factor in statics.
    pub time: f64,
    /// Current director per beam.
    pub directors: Vec<FrameTriad>,
}

#[derive(Debug, Clone)]
pub struct Model {
    pub nodes: Vec<Node>,
    pub beams: Vec<Beam>,
    pub bodies: Vec<RigidBody>,
    pub joints: Vec<Joint>,
    pub loads: Vec<NodalLoad>,
    pub gravity: Vector3<f64>,
    pub unit_rule: QuadratureRule,
    owner: Vec<Option<(usize, usize)>>,
}

impl Default for Model {
    fn default() -> Self {
        Self::new()
    }
}

impl Model {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            beams: Vec::new(),
            bodies: Vec::new(),
            joints: Vec::new(),
            loads: Vec::new(),
            gravity: Vector3::zeros(),
            unit_rule: QuadratureRule::gauss_legendre(QuadratureRule::DEFAULT_ORDER, 1.0)
                .expect("default rule is valid"),
            owner: Vec::new(),
        }
    }

    /// Changes the quadrature order. Must precede `add_beam`.
    pub fn with_quadrature(mut self, order: usize) -> Result<Self> {
        if !self.beams.is_empty() {
            return Err(Error::InvalidInput("quadrature must be set before beams are added".into()));
        }
        self.unit_rule = QuadratureRule::gauss_legendre(order, 1.0)?;
        Ok(self)
    }

    pub fn add_node(&mut self, node: Node) -> usize {
        self.nodes.push(node);
        self.owner.push(None);
        self.nodes.len() - 1
    }

    /// Adds a beam through `nodes` (at least two). Element lengths are the chord
    /// lengths between consecutive nodes unless `specs` already agree.
    pub fn add_beam(
        &mut self,
        nodes: &[usize],
        spec: &BeamSpec,
        director: Option<FrameTriad>,
        shape: ReferenceShape,
    ) -> Result<usize> {
        let lengths: Vec<f64> = nodes
            .windows(2)
            .map(|w| match (self.nodes.get(w[0]), self.nodes.get(w[1])) {
                (Some(a), Some(b)) => Ok((b.position - a.position).norm()),
                _ => Err(Error::InvalidInput(format!("beam references missing node {} or {}", w[0], w[1]))),
            })
            .collect::<Result<_>>()?;
        let specs = lengths.iter().map(|&l| spec.with_length(l)).collect();
        self.add_beam_with_specs(nodes, specs, director, shape)
    }

    /// Adds a beam with explicit per-element constants (including lengths).
    pub fn add_beam_with_specs(
        &mut self,
        nodes: &[usize],
        specs: Vec<BeamSpec>,
        director: Option<FrameTriad>,
        shape: ReferenceShape,
    ) -> Result<usize> {
        if nodes.len() < 2 || specs.len() + 1 != nodes.len() {
            return Err(Error::InvalidInput(format!(
                "beam needs N + 1 nodes for N elements (got {} nodes, {} elements)",
                nodes.len(),
                specs.len()
            )));
        }
        for &n in nodes {
            match self.owner.get(n) {
                None => return Err(Error::InvalidInput(format!("beam references missing node {n}"))),
                Some(Some((b, _))) => return Err(Error::InvalidInput(format!("node {n} already belongs to beam {b}"))),
                Some(None) => {}
            }
        }
        if nodes.iter().enumerate().any(|(i, n)| nodes[..i].contains(n)) {
            return Err(Error::InvalidInput("beam visits a node twice".into()));
        }
        for s in &specs {
            s.validate()?;
        }
        let first = &self.nodes[nodes[0]];
        let director = match director {
            Some(d) => {
                d.validate(1e-9)?;
                bishop_step(&d, &unit_tangent(&first.slope, 0.0)?, 0.0, 0.0)?.0
            }
            None => FrameTriad::from_tangent(&first.slope)?,
        };
        let order = self.unit_rule.order();
        let mut beam = Beam {
            nodes: nodes.to_vec(),
            specs,
            director,
            reference: vec![vec![ReferenceStrain::default(); order]; nodes.len() - 1],
        };
        if shape == ReferenceShape::Initial {
            let q: Vec<f64> = nodes.iter().flat_map(|&n| self.nodes[n].coordinates()).collect();
            let out = evaluate_chain(
                &chain_elements(&beam),
                &self.unit_rule,
                &director,
                &q,
                &ChainRequest { strains: true, ..Default::default() },
            )?;
            beam.reference = out
                .strains
                .iter()
                .map(|e| {
                    e.iter()
                        .map(|s| ReferenceStrain { stretch: s.stretch, gamma1: s.gamma1, gamma2: s.gamma2, tau: s.tau_m })
                        .collect()
                })
                .collect();
        }
        let b = self.beams.len();
        for (i, &n) in nodes.iter().enumerate() {
            self.owner[n] = Some((b, i));
        }
        self.beams.push(beam);
        Ok(b)
    }

    pub fn add_body(&mut self, body: RigidBody) -> Result<usize> {
        body.validate()?;
        self.bodies.push(body);
        Ok(self.bodies.len() - 1)
    }

    pub fn add_joint(&mut self, joint: Joint) -> Result<usize> {
        joint.validate(self, self.joints.len())?;
        self.joints.push(joint);
        Ok(self.joints.len() - 1)
    }

    pub fn add_load(&mut self, load: NodalLoad) -> Result<()> {
        if load.node >= self.nodes.len() {
            return Err(Error::InvalidInput(format!("load on missing node {}", load.node)));
        }
        self.loads.push(load);
        Ok(())
    }

    /// Beam and position within it of a node.
    pub fn node_owner(&self, node: usize) -> Option<(usize, usize)> {
        self.owner.get(node).copied().flatten()
    }

    pub fn n_dofs(&self) -> usize {
        NODE_DOFS * self.nodes.len() + BODY_DOFS * self.bodies.len()
    }

    pub fn node_dof(&self, node: usize) -> usize {
        NODE_DOFS * node
    }

    pub fn body_dof(&self, body: usize) -> usize {
        NODE_DOFS * self.nodes.len() + BODY_DOFS * body
    }

    pub fn dof_map(&self) -> DofMap {
        DofMap {
            nodes: (0..self.nodes.len()).map(|n| self.node_dof(n)).collect(),
            bodies: (0..self.bodies.len()).map(|b| self.body_dof(b)).collect(),
            len: self.n_dofs(),
        }
    }

    /// Joint rows followed by one quaternion-norm row per body.
    pub fn n_constraints(&self) -> usize {
        self.joints.iter().map(Joint::rows).sum::<usize>() + self.bodies.len()
    }

    /// Checks that every node belongs to a beam and every joint is well formed.
    pub fn validate(&self) -> Result<()> {
        if let Some(n) = self.owner.iter().position(Option::is_none) {
            return Err(Error::InvalidInput(format!("node {n} does not belong to any beam")));
        }
        for (i, j) in self.joints.iter().enumerate() {
            j.validate(self, i)?;
        }
        for l in &self.loads {
            if l.node >= self.nodes.len() {
                return Err(Error::InvalidInput(format!("load on missing node {}", l.node)));
            }
        }
        Ok(())
    }

    pub fn initial_state(&self) -> Result<SystemState> {
        self.validate()?;
        let n = self.n_dofs();
        let mut q = DVector::zeros(n);
        let mut q_dot = DVector::zeros(n);
        for (k, node) in self.nodes.iter().enumerate() {
            let o = self.node_dof(k);
            q.rows_mut(o, NODE_DOFS).copy_from_slice(&node.coordinates());
            q_dot.rows_mut(o, NODE_DOFS).copy_from_slice(&node.velocity);
        }
        for (b, body) in self.bodies.iter().enumerate() {
            let o = self.body_dof(b);
            let (v, qd) = body.coordinate_rates();
            q.fixed_rows_mut::<3>(o).copy_from(&body.position);
            q.fixed_rows_mut::<4>(o + 3).copy_from(&body.orientation);
            q_dot.fixed_rows_mut::<3>(o).copy_from(&v);
            q_dot.fixed_rows_mut::<4>(o + 3).copy_from(&qd);
        }
        Ok(SystemState {
            q,
            q_dot,
            lambda: DVector::zeros(self.n_constraints()),
            time: 0.0,
            directors: self.beams.iter().map(|b| b.director).collect(),
        })
    }

    pub(crate) fn beam_q(&self, beam: usize, q: &DVector<f64>) -> Vec<f64> {
        self.beams[beam]
            .nodes
            .iter()
            .flat_map(|&n| {
                let o = self.node_dof(n);
                q.rows(o, NODE_DOFS).iter().copied().collect::<Vec<_>>()
            })
            .collect()
    }

    /// Global index of chain coordinate `c` of `beam`.
    pub(crate) fn chain_to_global(&self, beam: usize, c: usize) -> usize {
        self.node_dof(self.beams[beam].nodes[c / NODE_DOFS]) + c % NODE_DOFS
    }

    pub fn body_pose(&self, body: usize, q: &DVector<f64>) -> (Vector3<f64>, Vector4<f64>) {
        let o = self.body_dof(body);
        (q.fixed_rows::<3>(o).into_owned(), q.fixed_rows::<4>(o + 3).into_owned())
    }
}

fn chain_elements(beam: &Beam) -> Vec<ChainElement<'_>> {
    beam.specs.iter().zip(&beam.reference).map(|(spec, reference)| ChainElement { spec, reference }).collect()
}

fn check_state(model: &Model, state: &SystemState) -> Result<()> {
    if state.q.len() != model.n_dofs() || state.directors.len() != model.beams.len() {
        return Err(Error::InvalidInput(format!(
            "state has {} coordinates and {} directors, model needs {} and {}",
            state.q.len(),
            state.directors.len(),
            model.n_dofs(),
            model.beams.len()
        )));
    }
    Ok(())
}

/// Evaluates one beam chain of the model.
pub(crate) fn beam_chain(
    model: &Model,
    state: &SystemState,
    beam: usize,
    req: &ChainRequest,
) -> Result<crate::chain::ChainOutput> {
    let b = &model.beams[beam];
    evaluate_chain(&chain_elements(b), &model.unit_rule, &state.directors[beam], &model.beam_q(beam, &state.q), req)
}

/// Consistent mass matrix; body blocks depend on the quaternion in `q`.
pub fn assemble_mass(model: &Model, q: &DVector<f64>) -> DMatrix<f64> {
    let n = model.n_dofs();
    let mut m = DMatrix::zeros(n, n);
    for beam in &model.beams {
        for (e, spec) in beam.specs.iter().enumerate() {
            let me = mass_matrix(spec);
            let dofs: Vec<usize> = (0..2 * NODE_DOFS)
                .map(|i| model.node_dof(beam.nodes[e + i / NODE_DOFS]) + i % NODE_DOFS)
                .collect();
            for (i, &gi) in dofs.iter().enumerate() {
                for (j, &gj) in dofs.iter().enumerate() {
                    m[(gi, gj)] += me[(i, j)];
                }
            }
        }
    }
    for (b, body) in model.bodies.iter().enumerate() {
        let o = model.body_dof(b);
        let (_, quat) = model.body_pose(b, q);
        m.view_mut((o, o), (3, 3)).copy_from(&(Matrix3::identity() * body.mass));
        m.view_mut((o + 3, o + 3), (4, 4)).copy_from(&rigid::quaternion_mass(&quat, &body.inertia));
    }
    m
}

/// `dT/dq` at fixed `q_dot` (nonzero only for rigid-body quaternions).
pub fn kinetic_gradient(model: &Model, q: &DVector<f64>, q_dot: &DVector<f64>) -> DVector<f64> {
    let mut g = DVector::zeros(model.n_dofs());
    for (b, body) in model.bodies.iter().enumerate() {
        let o = model.body_dof(b) + 3;
        let grad = rigid::kinetic_gradient(
            &q.fixed_rows::<4>(o).into_owned(),
            &q_dot.fixed_rows::<4>(o).into_owned(),
            &body.inertia,
        );
        g.fixed_rows_mut::<4>(o).copy_from(&grad);
    }
    g
}

pub fn kinetic_energy(model: &Model, q: &DVector<f64>, q_dot: &DVector<f64>) -> f64 {
    0.5 * q_dot.dot(&(assemble_mass(model, q) * q_dot))
}

/// Generalized gravity load (the force along `g`, not the potential gradient).
pub fn assemble_gravity(model: &Model) -> DVector<f64> {
    let mut f = DVector::zeros(model.n_dofs());
    if model.gravity == Vector3::zeros() {
        return f;
    }
    for beam in &model.beams {
        for (e, spec) in beam.specs.iter().enumerate() {
            let fe = gravity_force(spec, &model.gravity);
            for i in 0..2 * NODE_DOFS {
                f[model.node_dof(beam.nodes[e + i / NODE_DOFS]) + i % NODE_DOFS] += fe[i];
            }
        }
    }
    for (b, body) in model.bodies.iter().enumerate() {
        let o = model.body_dof(b);
        f.fixed_rows_mut::<3>(o).copy_from(&(model.gravity * body.mass));
    }
    f
}

/// Generalized nodal dead loads.
pub fn assemble_external(model: &Model) -> DVector<f64> {
    let mut f = DVector::zeros(model.n_dofs());
    for l in &model.loads {
        let o = model.node_dof(l.node);
        for k in 0..3 {
            f[o + k] += l.force[k];
        }
        f[o + 6] += l.torque;
    }
    f
}

/// Gradient of the elastic energy of all beams.
pub fn assemble_internal(model: &Model, state: &SystemState, mode: DeformationMode) -> Result<DVector<f64>> {
    check_state(model, state)?;
    let mut f = DVector::zeros(model.n_dofs());
    for b in 0..model.beams.len() {
        let out = beam_chain(model, state, b, &ChainRequest { energy: Some(mode), force: true, ..Default::default() })?;
        for (c, v) in out.force.iter().enumerate() {
            f[model.chain_to_global(b, c)] += v;
        }
    }
    Ok(f)
}

/// Gradient of the potential energy (elastic plus gravity).
pub fn assemble_forces(model: &Model, state: &SystemState, mode: DeformationMode) -> Result<DVector<f64>> {
    Ok(assemble_internal(model, state, mode)? - assemble_gravity(model))
}

pub fn elastic_energy(model: &Model, state: &SystemState, mode: DeformationMode) -> Result<f64> {
    check_state(model, state)?;
    let mut u = 0.0;
    for b in 0..model.beams.len() {
        u += beam_chain(model, state, b, &ChainRequest { energy: Some(mode), ..Default::default() })?.energy;
    }
    Ok(u)
}

/// Elastic plus gravitational potential energy.
pub fn assemble_energy(model: &Model, state: &SystemState, mode: DeformationMode) -> Result<f64> {
    Ok(elastic_energy(model, state, mode)? - assemble_gravity(model).dot(&state.q))
}

/// Material frames (with sensitivities when asked) at every node, indexed by node.
pub fn node_frames(model: &Model, state: &SystemState, sensitivities: bool) -> Result<Vec<NodeFrame>> {
    node_frames_for(model, state, &vec![true; model.beams.len()], sensitivities)
        .map(|v| v.into_iter().map(|f| f.expect("every node belongs to a beam")).collect())
}

pub(crate) fn node_frames_for(
    model: &Model,
    state: &SystemState,
    beams: &[bool],
    sensitivities: bool,
) -> Result<Vec<Option<NodeFrame>>> {
    check_state(model, state)?;
    let mut out = vec![None; model.nodes.len()];
    let req = ChainRequest { node_frames: true, frame_sensitivities: sensitivities, ..Default::default() };
    for (b, beam) in model.beams.iter().enumerate() {
        if !beams[b] {
            continue;
        }
        let frames = beam_chain(model, state, b, &req)?.node_frames;
        for (k, f) in frames.into_iter().enumerate() {
            out[beam.nodes[k]] = Some(f);
        }
    }
    Ok(out)
}

/// Constraint values `g(q, s)` and, when `jacobian` is set, `dg/dq`.
pub fn constraint_eval(model: &Model, state: &SystemState, jacobian: bool) -> Result<(DVector<f64>, DMatrix<f64>)> {
    check_state(model, state)?;
    let (mut g, mut jac) = evaluate_joints(model, state, jacobian)?;
    let base = g.len() - model.bodies.len();
    for b in 0..model.bodies.len() {
        let (_, quat) = model.body_pose(b, &state.q);
        g[base + b] = quat.norm_squared() - 1.0;
        if jacobian {
            let o = model.body_dof(b) + 3;
            for k in 0..4 {
                jac[(base + b, o + k)] = 2.0 * quat[k];
            }
        }
    }
    Ok((g, jac))
}

/// Carries each beam's director along the minimal rotation of its first-node tangent.
pub fn transport_directors(
    model: &Model,
    old_q: &DVector<f64>,
    new_q: &DVector<f64>,
    directors: &[FrameTriad],
) -> Result<Vec<FrameTriad>> {
    model
        .beams
        .iter()
        .zip(directors)
        .map(|(beam, d)| {
            let o = model.node_dof(beam.nodes[0]) + 3;
            let t_old = unit_tangent(&old_q.fixed_rows::<3>(o).into_owned(), 0.0)?;
            let t_new = unit_tangent(&new_q.fixed_rows::<3>(o).into_owned(), 0.0)?;
            let aligned = bishop_step(d, &t_old, 0.0, 0.0)?.0;
            Ok(bishop_step(&aligned, &t_new, 0.0, 0.0)?.0.reorthonormalized())
        })
        .collect()
}

/// Welds `body` to the material frame at `node`, with the body's centre at
/// `offset` (material coordinates). The body's initial pose is placed on the node.
pub fn weld_disk(model: &mut Model, node: usize, offset: Vector3<f64>, body: usize) -> Result<usize> {
    if body >= model.bodies.len() {
        return Err(Error::InvalidInput(format!("weld to missing body {body}")));
    }
    let (b, _) = model.node_owner(node).ok_or_else(|| Error::InvalidInput(format!("node {node} is not on a beam")))?;
    let mut state = SystemState {
        q: DVector::zeros(model.n_dofs()),
        q_dot: DVector::zeros(model.n_dofs()),
        lambda: DVector::zeros(0),
        time: 0.0,
        directors: model.beams.iter().map(|b| b.director).collect(),
    };
    for (k, n) in model.nodes.iter().enumerate() {
        state.q.rows_mut(model.node_dof(k), NODE_DOFS).copy_from_slice(&n.coordinates());
    }
    let mut mask = vec![false; model.beams.len()];
    mask[b] = true;
    let frame = node_frames_for(model, &state, &mask, false)?[node].clone().expect("owned node has a frame").material;
    let r = frame.matrix();
    let body_ref = &mut model.bodies[body];
    body_ref.position = model.nodes[node].position + r * offset;
    body_ref.orientation = rigid::quaternion_from_rotation(&r);
    model.add_joint(Joint::Weld { node, body, offset, relative: Matrix3::identity() })
}

/// Attachment point helper for tests and drivers.
pub fn attachment_point(model: &Model, state: &SystemState, a: Attachment, offset: &Vector3<f64>) -> Result<Vector3<f64>> {
    crate::joint::point_value(model, state, a, offset)
}
