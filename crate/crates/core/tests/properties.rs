use ancf14_core::element::pack;
use ancf14_core::frame::{bishop_step, material_frame};
use ancf14_core::rigid::{quaternion_from_rotation, rotation};
use ancf14_core::{Ancf14Element, BeamSpec, CrossSection, DeformationMode, FrameTriad};
use nalgebra::{Rotation3, Unit, Vector3, Vector4};
use proptest::prelude::*;

fn vec3(range: f64) -> impl Strategy<Value = Vector3<f64>> {
    (-range..range, -range..range, -range..range).prop_map(|(x, y, z)| Vector3::new(x, y, z))
}

fn unit_vec() -> impl Strategy<Value = Vector3<f64>> {
    vec3(1.0).prop_filter("nonzero", |v| v.norm() > 0.1).prop_map(|v| v.normalize())
}

fn spec() -> BeamSpec {
    BeamSpec::new(2.0e11, 0.3, 7800.0, CrossSection::rectangle(0.02, 0.03), 0.5)
}

fn perturbed(d: [Vector3<f64>; 4], th: (f64, f64)) -> nalgebra::SVector<f64, 14> {
    let l = spec().length;
    pack(&d[0], &(Vector3::x() + d[1]), th.0, &(Vector3::new(l, 0.0, 0.0) + d[2]), &(Vector3::x() + d[3]), th.1)
}

fn rotate(q: &nalgebra::SVector<f64, 14>, r: &nalgebra::Matrix3<f64>) -> nalgebra::SVector<f64, 14> {
    let b = |i: usize| q.fixed_rows::<3>(i).into_owned();
    pack(&(r * b(0)), &(r * b(3)), q[6], &(r * b(7)), &(r * b(10)), q[13])
}

proptest! {
    #[test]
    fn transported_frames_stay_orthonormal(t0 in unit_vec(), steps in prop::collection::vec(unit_vec(), 1..20), theta in -6.0..6.0f64) {
        let mut frame = FrameTriad::from_tangent(&t0).unwrap();
        for (i, t) in steps.iter().enumerate() {
            prop_assume!(t.dot(&frame.t) > -0.99);
            frame = bishop_step(&frame, t, i as f64, i as f64 + 1.0).unwrap().0;
            prop_assert!(frame.orthonormality_defect() < 1e-12);
            prop_assert!((frame.t - t).norm() < 1e-12);
            prop_assert!(material_frame(&frame, theta).orthonormality_defect() < 1e-12);
        }
    }

    #[test]
    fn energy_is_invariant_under_rigid_rotation(
        d in prop::array::uniform4(vec3(0.02)),
        th in (-0.1..0.1f64, -0.1..0.1f64),
        axis in unit_vec(),
        angle in -3.0..3.0f64,
        shift in vec3(5.0),
    ) {
        let r = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle).into_inner();
        let q = perturbed(d, th);
        let mut qr = rotate(&q, &r);
        for k in [0, 7] {
            let p = qr.fixed_rows::<3>(k) + shift;
            qr.fixed_rows_mut::<3>(k).copy_from(&p);
        }
        let el = Ancf14Element::new(spec()).unwrap();
        let elr = el.clone().with_director(FrameTriad::canonical().rotated(&r));
        for mode in [DeformationMode::Small, DeformationMode::Large] {
            let (u, ur) = (el.elastic_energy(&q, mode).unwrap(), elr.elastic_energy(&qr, mode).unwrap());
            prop_assert!((u - ur).abs() <= 1e-8 * u.abs().max(1e-6), "{mode:?}: {u} vs {ur}");
        }
    }

    #[test]
    fn element_mass_is_positive_definite(width in 0.005..0.1f64, height in 0.005..0.1f64, length in 0.05..3.0f64) {
        let s = BeamSpec::new(7.0e10, 0.33, 2700.0, CrossSection::rectangle(width, height), length);
        let m = Ancf14Element::new(s).unwrap().mass_matrix();
        prop_assert!((m - m.transpose()).amax() <= 1e-14 * m.amax());
        prop_assert!(m.cholesky().is_some());
    }

    #[test]
    fn quaternions_give_proper_rotations(q in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)) {
        let q = Vector4::new(q.0, q.1, q.2, q.3);
        prop_assume!(q.norm() > 0.1);
        let q = q.normalize();
        let r = rotation(&q);
        prop_assert!((r.transpose() * r - nalgebra::Matrix3::identity()).amax() < 1e-14);
        prop_assert!((r.determinant() - 1.0).abs() < 1e-14);
        let back = quaternion_from_rotation(&r);
        prop_assert!((back - q).amax() < 1e-12 || (back + q).amax() < 1e-12);
    }
}
