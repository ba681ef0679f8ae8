//! Torsion-deformable two-node spatial beam element (14 coordinates: position,
//! slope and twist angle per node) with Bishop-frame kinematics, plus model
//! assembly, joints, and static/dynamic/modal solvers.

pub mod assembly;
pub mod chain;
pub mod driver;
pub mod element;
pub mod error;
pub mod frame;
pub mod joint;
pub mod quadrature;
pub mod rigid;
pub mod solver;

pub use assembly::{Model, Node, NodalLoad, ReferenceShape, SystemState};
pub use driver::Driver;
pub use element::{Ancf14Element, BeamSpec, CrossSection, DeformationMode, NodalState, StrainState};
pub use error::{Error, Result};
pub use frame::{FrameSensitivity, FrameTriad};
pub use joint::{Attachment, Joint};
pub use quadrature::QuadratureRule;
pub use rigid::RigidBody;
pub use solver::SolverSettings;
