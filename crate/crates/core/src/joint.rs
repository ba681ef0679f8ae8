//! Joint constraints between ground, beam nodes (through their material frames)
//! and rigid bodies, evaluated together with their Jacobians.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::assembly::{node_frames_for, Model, SystemState};
use crate::chain::NodeFrame;
use crate::driver::Driver;
use crate::element::NODE_DOFS;
use crate::error::{Error, Result};
use crate::frame::{FrameTriad, Jac3, JacRow};
use crate::rigid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attachment {
    Ground,
    /// Beam node; its frame is the material frame `(t, y, z)`.
    Node(usize),
    Body(usize),
}

/// Rotation of attachment `b` relative to `a` about the joint axis, prescribed by a driver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleDriver {
    /// Zero-angle direction in `a`, perpendicular to the joint axis.
    pub reference_a: Vector3<f64>,
    /// Direction in `b` that follows `reference_a` rotated by the angle.
    pub reference_b: Vector3<f64>,
    pub angle: Driver,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Joint {
    /// Coincident points.
    Spherical {
        a: Attachment,
        #[serde(default)]
        offset_a: Vector3<f64>,
        b: Attachment,
        #[serde(default)]
        offset_b: Vector3<f64>,
    },
    /// Coincident points and parallel axes, optionally with a driven angle.
    Revolute {
        a: Attachment,
        #[serde(default)]
        offset_a: Vector3<f64>,
        axis_a: Vector3<f64>,
        b: Attachment,
        #[serde(default)]
        offset_b: Vector3<f64>,
        axis_b: Vector3<f64>,
        #[serde(default)]
        driver: Option<AngleDriver>,
    },
    /// Point of `b` on the axis line of `a`, axes parallel.
    Cylindrical {
        a: Attachment,
        #[serde(default)]
        offset_a: Vector3<f64>,
        axis_a: Vector3<f64>,
        b: Attachment,
        #[serde(default)]
        offset_b: Vector3<f64>,
        axis_b: Vector3<f64>,
    },
    /// Position, slope direction and twist angle of a node fixed; the slope
    /// magnitude (axial stretch) stays free.
    Clamp { node: usize, target: [f64; NODE_DOFS] },
    /// Rigid body fixed to the material frame of a node.
    Weld { node: usize, body: usize, offset: Vector3<f64>, relative: Matrix3<f64> },
    /// `direction . P = driver(s)` for a point `P` and a fixed global direction.
    Prescribed {
        point: Attachment,
        #[serde(default)]
        offset: Vector3<f64>,
        direction: Vector3<f64>,
        driver: Driver,
    },
    /// `(R_a u) . (R_b v) = value`.
    Orientation { a: Attachment, vector_a: Vector3<f64>, b: Attachment, vector_b: Vector3<f64>, value: f64 },
    /// `theta = driver(s)` at a node.
    Twist { node: usize, driver: Driver },
}

impl Joint {
    /// Clamp at the node's current coordinates in `model`.
    pub fn clamp_at(model: &Model, node: usize) -> Result<Self> {
        let n = model.nodes.get(node).ok_or_else(|| Error::InvalidInput(format!("clamp on missing node {node}")))?;
        Ok(Joint::Clamp { node, target: n.coordinates() })
    }

    pub fn rows(&self) -> usize {
        match self {
            Joint::Spherical { .. } => 3,
            Joint::Revolute { driver, .. } => 5 + usize::from(driver.is_some()),
            Joint::Cylindrical { .. } => 4,
            Joint::Clamp { .. } => 6,
            Joint::Weld { .. } => 6,
            Joint::Prescribed { .. } | Joint::Orientation { .. } | Joint::Twist { .. } => 1,
        }
    }

    fn attachments(&self) -> Vec<Attachment> {
        match *self {
            Joint::Spherical { a, b, .. }
            | Joint::Revolute { a, b, .. }
            | Joint::Cylindrical { a, b, .. }
            | Joint::Orientation { a, b, .. } => vec![a, b],
            Joint::Clamp { node, .. } | Joint::Twist { node, .. } => vec![Attachment::Node(node)],
            Joint::Weld { node, body, .. } => vec![Attachment::Node(node), Attachment::Body(body)],
            Joint::Prescribed { point, .. } => vec![point],
        }
    }

    /// Attachments whose material frame (not just position) enters the constraint.
    fn framed_attachments(&self) -> Vec<Attachment> {
        let with_offset = |a: Attachment, o: &Vector3<f64>| (o.norm() > 0.0).then_some(a);
        match *self {
            Joint::Spherical { a, ref offset_a, b, ref offset_b } => {
                [with_offset(a, offset_a), with_offset(b, offset_b)].into_iter().flatten().collect()
            }
            Joint::Prescribed { point, ref offset, .. } => with_offset(point, offset).into_iter().collect(),
            Joint::Clamp { .. } | Joint::Twist { .. } => Vec::new(),
            _ => self.attachments(),
        }
    }

    pub fn validate(&self, model: &Model, index: usize) -> Result<()> {
        let bad = |reason: String| Err(Error::JointConfig { index, reason });
        for a in self.attachments() {
            match a {
                Attachment::Ground => {}
                Attachment::Node(n) if n >= model.nodes.len() => return bad(format!("missing node {n}")),
                Attachment::Body(b) if b >= model.bodies.len() => return bad(format!("missing body {b}")),
                _ => {}
            }
        }
        let nonzero = |v: &Vector3<f64>| v.norm() > 1e-12 && v.iter().all(|x| x.is_finite());
        match self {
            Joint::Spherical { a, b, .. } if a == b => bad("joint connects an attachment to itself".into()),
            Joint::Revolute { a, b, axis_a, axis_b, .. } | Joint::Cylindrical { a, b, axis_a, axis_b, .. } => {
                let driver = if let Joint::Revolute { driver, .. } = self { *driver } else { None };
                if a == b {
                    return bad("joint connects an attachment to itself".into());
                }
                if !nonzero(axis_a) || !nonzero(axis_b) {
                    return bad("joint axis must be nonzero".into());
                }
                if let Some(d) = driver {
                    let (ua, ub) = (axis_a.normalize(), axis_b.normalize());
                    let ra = d.reference_a - ua * ua.dot(&d.reference_a);
                    let rb = d.reference_b - ub * ub.dot(&d.reference_b);
                    if ra.norm() < 1e-9 * d.reference_a.norm().max(1.0) || rb.norm() < 1e-9 * d.reference_b.norm().max(1.0)
                    {
                        return bad("driver reference directions must not be parallel to the axis".into());
                    }
                }
                Ok(())
            }
            Joint::Weld { relative, .. } => {
                if (relative.transpose() * relative - Matrix3::identity()).amax() > 1e-9 || relative.determinant() < 0.0 {
                    return bad("weld relative orientation is not a rotation".into());
                }
                Ok(())
            }
            Joint::Prescribed { direction, .. } if !nonzero(direction) => bad("prescribed direction must be nonzero".into()),
            Joint::Orientation { vector_a, vector_b, .. } if !nonzero(vector_a) || !nonzero(vector_b) => {
                bad("orientation vectors must be nonzero".into())
            }
            Joint::Clamp { target, .. } => {
                if target.iter().any(|v| !v.is_finite()) {
                    return bad("clamp target is not finite".into());
                }
                if !nonzero(&Vector3::new(target[3], target[4], target[5])) {
                    return bad("clamp slope must be nonzero".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// 3-vector with its gradient.
#[derive(Clone)]
struct VJet {
    v: Vector3<f64>,
    d: Jac3,
}

/// Scalar with its gradient.
struct SJet {
    v: f64,
    d: JacRow,
}

impl VJet {
    fn constant(v: Vector3<f64>, n: usize) -> Self {
        Self { v, d: Jac3::zeros(n) }
    }

    fn add(&self, o: &VJet) -> VJet {
        VJet { v: self.v + o.v, d: &self.d + &o.d }
    }

    fn sub(&self, o: &VJet) -> VJet {
        VJet { v: self.v - o.v, d: &self.d - &o.d }
    }

    fn scale(&self, s: f64) -> VJet {
        VJet { v: self.v * s, d: &self.d * s }
    }

    fn dot(&self, o: &VJet) -> SJet {
        SJet { v: self.v.dot(&o.v), d: o.v.transpose() * &self.d + self.v.transpose() * &o.d }
    }

    fn component(&self, dir: &Vector3<f64>) -> SJet {
        SJet { v: self.v.dot(dir), d: dir.transpose() * &self.d }
    }
}

struct FrameJet {
    origin: VJet,
    axes: [VJet; 3],
}

impl FrameJet {
    fn vector(&self, local: &Vector3<f64>) -> VJet {
        let n = self.origin.d.ncols();
        (0..3).fold(VJet::constant(Vector3::zeros(), n), |acc, k| acc.add(&self.axes[k].scale(local[k])))
    }

    fn point(&self, local: &Vector3<f64>) -> VJet {
        self.origin.add(&self.vector(local))
    }
}

struct Context<'a> {
    model: &'a Model,
    state: &'a SystemState,
    frames: Vec<Option<NodeFrame>>,
    width: usize,
}

impl Context<'_> {
    fn frame(&self, a: Attachment) -> FrameJet {
        let (n, q) = (self.width, &self.state.q);
        match a {
            Attachment::Ground => FrameJet {
                origin: VJet::constant(Vector3::zeros(), n),
                axes: [0, 1, 2].map(|k| VJet::constant(Vector3::ith(k, 1.0), n)),
            },
            Attachment::Node(node) => {
                let o = self.model.node_dof(node);
                let mut origin = VJet::constant(q.fixed_rows::<3>(o).into_owned(), n);
                if n > 0 {
                    origin.d.fixed_view_mut::<3, 3>(0, o).fill_with_identity();
                }
                let axes = match &self.frames[node] {
                    Some(f) => {
                        let FrameTriad { t, a2, a3 } = f.material;
                        let mut axes = [t, a2, a3].map(|v| VJet::constant(v, n));
                        if let (Some(s), true) = (&f.sens, n > 0) {
                            let (b, _) = self.model.node_owner(node).expect("frames exist only for beam nodes");
                            for (k, d) in [&s.d_t, &s.d_a2, &s.d_a3].into_iter().enumerate() {
                                for c in 0..d.ncols() {
                                    let g = self.model.chain_to_global(b, c);
                                    for r in 0..3 {
                                        axes[k].d[(r, g)] += d[(r, c)];
                                    }
                                }
                            }
                        }
                        axes
                    }
                    None => [0, 1, 2].map(|k| VJet::constant(Vector3::ith(k, 1.0), n)),
                };
                FrameJet { origin, axes }
            }
            Attachment::Body(b) => {
                let o = self.model.body_dof(b);
                let (p, quat) = self.model.body_pose(b, q);
                let r = rigid::rotation(&quat);
                let mut origin = VJet::constant(p, n);
                let mut axes = [0, 1, 2].map(|k| VJet::constant(r.column(k).into_owned(), n));
                if n > 0 {
                    origin.d.fixed_view_mut::<3, 3>(0, o).fill_with_identity();
                    for (k, ax) in axes.iter_mut().enumerate() {
                        ax.d.fixed_view_mut::<3, 4>(0, o + 3)
                            .copy_from(&rigid::rotation_derivative(&quat, &Vector3::ith(k, 1.0)));
                    }
                }
                FrameJet { origin, axes }
            }
        }
    }
}

/// Two unit vectors spanning the plane normal to `axis`.
fn normal_pair(axis: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let f = FrameTriad::from_tangent(axis).expect("validated nonzero axis");
    (f.a2, f.a3)
}

/// All joint rows followed by zeroed slots for the body normalization rows.
pub(crate) fn evaluate_joints(
    model: &Model,
    state: &SystemState,
    jacobian: bool,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = if jacobian { model.n_dofs() } else { 0 };
    let m = model.n_constraints();
    let mut need = vec![false; model.beams.len()];
    for j in &model.joints {
        for a in j.framed_attachments() {
            if let Attachment::Node(node) = a {
                if let Some((b, _)) = model.node_owner(node) {
                    need[b] = true;
                }
            }
        }
    }
    let frames = node_frames_for(model, state, &need, jacobian)?;
    let ctx = Context { model, state, frames, width: n };
    let mut g = DVector::zeros(m);
    let mut jac = DMatrix::zeros(m, n);
    let mut row = 0;
    let mut push = |s: SJet| {
        g[row] = s.v;
        if n > 0 {
            jac.row_mut(row).copy_from(&s.d);
        }
        row += 1;
    };
    let s = state.time;
    for joint in &model.joints {
        match joint {
            Joint::Spherical { a, offset_a, b, offset_b } => {
                let d = ctx.frame(*b).point(offset_b).sub(&ctx.frame(*a).point(offset_a));
                for k in 0..3 {
                    push(d.component(&Vector3::ith(k, 1.0)));
                }
            }
            Joint::Revolute { a, offset_a, axis_a, b, offset_b, axis_b, driver } => {
                let (fa, fb) = (ctx.frame(*a), ctx.frame(*b));
                let d = fb.point(offset_b).sub(&fa.point(offset_a));
                for k in 0..3 {
                    push(d.component(&Vector3::ith(k, 1.0)));
                }
                let ua = axis_a.normalize();
                let (p1, p2) = normal_pair(&ua);
                let wb = fb.vector(&axis_b.normalize());
                push(wb.dot(&fa.vector(&p1)));
                push(wb.dot(&fa.vector(&p2)));
                if let Some(dr) = driver {
                    let ra = (dr.reference_a - ua * ua.dot(&dr.reference_a)).normalize();
                    let ub = axis_b.normalize();
                    let rb = (dr.reference_b - ub * ub.dot(&dr.reference_b)).normalize();
                    let (sn, cs) = dr.angle.value(s).sin_cos();
                    let normal = ua.cross(&ra) * cs - ra * sn;
                    push(fb.vector(&rb).dot(&fa.vector(&normal)));
                }
            }
            Joint::Cylindrical { a, offset_a, axis_a, b, offset_b, axis_b } => {
                let (fa, fb) = (ctx.frame(*a), ctx.frame(*b));
                let d = fb.point(offset_b).sub(&fa.point(offset_a));
                let (p1, p2) = normal_pair(&axis_a.normalize());
                let (n1, n2) = (fa.vector(&p1), fa.vector(&p2));
                push(d.dot(&n1));
                push(d.dot(&n2));
                let wb = fb.vector(&axis_b.normalize());
                push(wb.dot(&n1));
                push(wb.dot(&n2));
            }
            Joint::Clamp { node, target } => {
                let o = model.node_dof(*node);
                let unit = |k: usize| {
                    let mut d = JacRow::zeros(n);
                    if n > 0 {
                        d[o + k] = 1.0;
                    }
                    d
                };
                for (k, t) in target[..3].iter().enumerate() {
                    push(SJet { v: state.q[o + k] - t, d: unit(k) });
                }
                let slope = state.q.fixed_rows::<3>(o + 3).into_owned();
                let (p1, p2) = normal_pair(&Vector3::new(target[3], target[4], target[5]));
                for p in [p1, p2] {
                    let mut d = JacRow::zeros(n);
                    if n > 0 {
                        for k in 0..3 {
                            d[o + 3 + k] = p[k];
                        }
                    }
                    push(SJet { v: slope.dot(&p), d });
                }
                push(SJet { v: state.q[o + 6] - target[6], d: unit(6) });
            }
            Joint::Weld { node, body, offset, relative } => {
                let (fnode, fbody) = (ctx.frame(Attachment::Node(*node)), ctx.frame(Attachment::Body(*body)));
                let d = fbody.origin.sub(&fnode.point(offset));
                for k in 0..3 {
                    push(d.component(&Vector3::ith(k, 1.0)));
                }
                let c = [0, 1, 2].map(|k| fnode.vector(&relative.column(k).into_owned()));
                let bx = &fbody.axes;
                push(bx[1].dot(&c[2]));
                push(bx[2].dot(&c[0]));
                push(bx[0].dot(&c[1]));
            }
            Joint::Prescribed { point, offset, direction, driver } => {
                let mut r = ctx.frame(*point).point(offset).component(&direction.normalize());
                r.v -= driver.value(s);
                push(r);
            }
            Joint::Orientation { a, vector_a, b, vector_b, value } => {
                let mut r = ctx.frame(*a).vector(vector_a).dot(&ctx.frame(*b).vector(vector_b));
                r.v -= value;
                push(r);
            }
            Joint::Twist { node, driver } => {
                let o = model.node_dof(*node) + 6;
                let mut d = JacRow::zeros(n);
                if n > 0 {
                    d[o] = 1.0;
                }
                push(SJet { v: state.q[o] - driver.value(s), d });
            }
        }
    }
    Ok((g, jac))
}

/// Global position of a point fixed in an attachment.
pub(crate) fn point_value(model: &Model, state: &SystemState, a: Attachment, offset: &Vector3<f64>) -> Result<Vector3<f64>> {
    let frames = match a {
        Attachment::Node(node) if offset.norm() > 0.0 => {
            let (b, _) = model.node_owner(node).ok_or_else(|| Error::InvalidInput(format!("node {node} is not on a beam")))?;
            let mut need = vec![false; model.beams.len()];
            need[b] = true;
            node_frames_for(model, state, &need, false)?
        }
        _ => vec![None; model.nodes.len()],
    };
    let ctx = Context { model, state, frames, width: 0 };
    Ok(ctx.frame(a).point(offset).v)
}
