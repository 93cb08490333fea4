mod support;

use pcsp_ep_core::complexes::{build_complex, build_spanning_tree, Cycle, FaceMode};
use pcsp_ep_core::mu::{
    build_mu_cycle, check_commutation, check_faces_preserved, check_fixed_point_free,
    cyclic_shift_mu, has_periodic_tuple, is_mu_connected, traversal_imbalance,
    CommutationFailure, CommutationSampleSpec, MuAction, MuError, MuProvenance,
};
use pcsp_ep_core::structures::Relation;
use support::{box_complex, structure};

#[test]
fn coordinate_shift_on_corpus_complexes() {
    let b4 = box_complex("b4", "R(w,x,y,z)");
    let mu = cyclic_shift_mu(&b4).unwrap();
    assert_eq!(mu.perm, vec![5, 0, 6, 1, 2, 3, 7, 4]);
    assert_eq!(mu.order, 4);
    assert_eq!(mu.provenance, MuProvenance::CyclicShift);

    let h2 = box_complex("h2", "R(x,y,z)");
    let mu = cyclic_shift_mu(&h2).unwrap();
    assert_eq!(mu.perm, vec![3, 0, 4, 1, 5, 2]);
    assert_eq!(mu.order, 3);

    let d4 = box_complex("d4", "R(w,x,y,z)");
    assert_eq!(cyclic_shift_mu(&d4).unwrap().order, 4);
}

#[test]
fn powers_and_prime_reduction() {
    let b4 = box_complex("b4", "R(w,x,y,z)");
    let mu = cyclic_shift_mu(&b4).unwrap();
    assert_eq!(mu.power(0), (0..8).collect::<Vec<_>>());
    assert_eq!(mu.power(2), vec![3, 5, 7, 0, 6, 1, 4, 2]);
    assert_eq!(mu.power(4), mu.power(0));
    let half = mu.reduce_to_prime();
    assert_eq!(half.order, 2);
    assert_eq!(half.perm, mu.power(2));
    assert_eq!(half.provenance, MuProvenance::CyclicShift);

    let h2 = box_complex("h2", "R(x,y,z)");
    let mu = cyclic_shift_mu(&h2).unwrap();
    assert_eq!(mu.reduce_to_prime(), mu);
}

#[test]
fn action_construction_rejects_bad_permutations() {
    assert!(matches!(
        MuAction::new(vec![1, 2], MuProvenance::Custom),
        Err(MuError::NotABijection(_))
    ));
    assert!(matches!(
        MuAction::new(vec![0, 0], MuProvenance::Custom),
        Err(MuError::NotABijection(_))
    ));
    assert_eq!(
        MuAction::new(vec![0, 1], MuProvenance::Custom),
        Err(MuError::TrivialAction)
    );
}

#[test]
fn shift_needs_arity_and_rotation_closure() {
    let unary = Relation::new("R", 1, vec![vec![0], vec![1]]);
    let h = build_complex(&unary, &FaceMode::Box, 1_000_000).unwrap();
    assert_eq!(cyclic_shift_mu(&h), Err(MuError::ArityTooSmall(1)));

    let lopsided = Relation::new("R", 2, vec![vec![0, 1]]);
    let h = build_complex(&lopsided, &FaceMode::Box, 1_000_000).unwrap();
    assert_eq!(
        cyclic_shift_mu(&h),
        Err(MuError::NotShiftClosed { tuple: vec![0, 1], image: vec![1, 0] })
    );
}

#[test]
fn periodic_tuple_detection() {
    assert_eq!(has_periodic_tuple(&[vec![0, 1, 0, 1]]), Some((vec![0, 1, 0, 1], 2)));
    assert_eq!(has_periodic_tuple(&[vec![0, 0, 0]]), Some((vec![0, 0, 0], 1)));
    assert_eq!(has_periodic_tuple(&[vec![0, 1, 2], vec![1, 2, 0]]), None);
}

#[test]
fn shift_preserves_faces_on_corpus() {
    for (name, pp, faces) in [
        ("d4", "R(w,x,y,z)", 4usize),
        ("h2", "R(x,y,z)", 6),
        ("b4", "R(w,x,y,z)", 8),
    ] {
        let h = box_complex(name, pp);
        assert_eq!(h.faces.len(), faces, "{name}");
        let mu = cyclic_shift_mu(&h).unwrap();
        let report = check_faces_preserved(&h, &mu);
        assert!(report.pass(), "{name}");
        assert_eq!(report.faces_checked, faces, "{name}");
    }
}

#[test]
fn face_preservation_violation_is_reported() {
    // Swapping two hexagon vertices tears one edge off the face set.
    let h = box_complex("h2", "R(x,y,z)");
    let mu = MuAction::new(vec![1, 0, 2, 3, 4, 5], MuProvenance::Custom).unwrap();
    let report = check_faces_preserved(&h, &mu);
    assert!(!report.pass());
    assert_eq!(report.faces_checked, 2);
    let v = report.violation.unwrap();
    assert_eq!(h.faces[v.face], vec![0, 4]);
    assert_eq!(v.image, vec![1, 4]);
}

#[test]
fn shift_is_fixed_point_free_on_corpus() {
    for (name, pp) in [("d4", "R(w,x,y,z)"), ("h2", "R(x,y,z)"), ("b4", "R(w,x,y,z)")] {
        let h = box_complex(name, pp);
        let mu = cyclic_shift_mu(&h).unwrap();
        let report = check_fixed_point_free(&h, &mu);
        assert!(report.pass(), "{name}");
        assert_eq!(report.order, mu.order, "{name}");
        assert_eq!(report.periodic_tuple, None, "{name}");
    }
}

#[test]
fn orbit_inside_a_box_is_a_fixed_simplex() {
    // One maximal face of this complex is the four-vertex box
    // {2} x {0,1} x {0,1}. A symmetry whose orbit stays inside it fixes
    // that simplex no matter how wildly it moves the other vertices.
    let h = box_complex("a3", "R(x,y,z)");
    assert_eq!(h.vertex_count(), 15);
    let mut perm: Vec<usize> = (0..15).map(|v| (v + 1) % 11).collect();
    perm[11] = 12;
    perm[12] = 11;
    perm[13] = 14;
    perm[14] = 13;
    let mu = MuAction::new(perm, MuProvenance::Custom).unwrap();
    assert_eq!(mu.order, 22);
    let report = check_fixed_point_free(&h, &mu);
    let v = report.violation.unwrap();
    assert_eq!(v.power, 1);
    assert_eq!(v.orbit, vec![11, 12]);
    assert_eq!(h.faces[v.face], vec![11, 12, 13, 14]);
}

#[test]
fn shifts_commute_with_every_small_polymorphism() {
    let k3 = structure("k3");
    let h = box_complex("k3", "E(x,y)");
    let mu = cyclic_shift_mu(&h).unwrap();
    let report =
        check_commutation(&k3, &k3, &h, &h, &mu, &mu, &CommutationSampleSpec::default()).unwrap();
    assert!(report.pass());
    assert!(report.by_symmetry);
    assert_eq!(report.checks.len(), 2);
    assert_eq!(
        (report.checks[0].arity, report.checks[0].polymorphisms, report.checks[0].exhaustive),
        (1, 6, true)
    );
    assert_eq!(
        (report.checks[1].arity, report.checks[1].polymorphisms, report.checks[1].exhaustive),
        (2, 12, true)
    );
}

#[test]
fn mismatched_target_symmetry_fails_commutation() {
    let k3 = structure("k3");
    let h = box_complex("k3", "E(x,y)");
    let mu_a = cyclic_shift_mu(&h).unwrap();
    let mu_b = MuAction::new(vec![1, 0, 3, 2, 5, 4], MuProvenance::Custom).unwrap();
    let spec = CommutationSampleSpec { max_arity: 1, enum_limit: 100, power_cap: 1_000_000 };
    let report = check_commutation(&k3, &k3, &h, &h, &mu_a, &mu_b, &spec).unwrap();
    assert!(!report.by_symmetry);
    // The identity operation sorts first and catches the mismatch at the
    // very first vertex.
    assert_eq!(
        report.failure,
        Some(CommutationFailure::Mismatch {
            arity: 1,
            poly: 0,
            inputs: vec![0],
            lhs: vec![1, 0],
            rhs: vec![0, 2],
        })
    );
}

#[test]
fn image_outside_target_fails_commutation() {
    // Target complex built on a strict sub-relation: the identity operation
    // lands outside its vertex set.
    let k3 = structure("k3");
    let h_a = box_complex("k3", "E(x,y)");
    let sub = Relation::new("S", 2, vec![vec![0, 1], vec![1, 0]]);
    let h_b = build_complex(&sub, &FaceMode::Box, 1_000_000).unwrap();
    let mu_a = cyclic_shift_mu(&h_a).unwrap();
    let mu_b = MuAction::new(vec![1, 0], MuProvenance::Custom).unwrap();
    let spec = CommutationSampleSpec { max_arity: 1, enum_limit: 100, power_cap: 1_000_000 };
    let report = check_commutation(&k3, &k3, &h_a, &h_b, &mu_a, &mu_b, &spec).unwrap();
    assert_eq!(
        report.failure,
        Some(CommutationFailure::ImageNotVertex {
            arity: 1,
            poly: 0,
            inputs: vec![1],
            image: vec![0, 2],
        })
    );
}

#[test]
fn connectivity_to_the_image_is_required() {
    let a2 = box_complex("a2", "R(x,y,z)");
    let mu = cyclic_shift_mu(&a2).unwrap();
    let conn = is_mu_connected(&a2, &mu);
    assert!(!conn.pass());
    assert_eq!(conn.vertices, 3);
    assert_eq!(conn.failure, Some((0, 2)));

    let h2 = box_complex("h2", "R(x,y,z)");
    let mu = cyclic_shift_mu(&h2).unwrap();
    let conn = is_mu_connected(&h2, &mu);
    assert!(conn.pass());
    assert_eq!(conn.vertices, 6);
}

#[test]
fn symmetric_cycle_chains_every_rotation() {
    let h = box_complex("b4", "R(w,x,y,z)");
    let tree = build_spanning_tree(&h, 0);
    let mu = cyclic_shift_mu(&h).unwrap();
    let mc = build_mu_cycle(&h, &tree, &mu, None).unwrap();
    assert_eq!(mc.anchor, 0);
    assert_eq!(mc.order, 4);
    assert_eq!(mc.prefix, vec![0]);
    assert_eq!(mc.segment, vec![0, 6, 5]);
    assert_eq!(mc.cycle, Cycle(vec![0, 6, 5, 7, 3, 4, 1, 2, 0]));
    assert_eq!(mc.core(), mc.cycle);
    assert!(mc.cycle.validate(&h).is_ok());

    let imb = traversal_imbalance(&mc.cycle).unwrap();
    assert_eq!((imb.u, imb.v, imb.forward, imb.backward), (0, 2, 0, 1));
}

#[test]
fn anchored_cycle_keeps_a_tree_prefix() {
    let h = box_complex("b4", "R(w,x,y,z)");
    let tree = build_spanning_tree(&h, 0);
    let mu = cyclic_shift_mu(&h).unwrap();
    let mc = build_mu_cycle(&h, &tree, &mu, Some(5)).unwrap();
    assert_eq!(mc.anchor, 5);
    assert_eq!(mc.prefix, vec![0, 6, 5]);
    assert_eq!(mc.cycle.base(), 0);
    assert_eq!(mc.core(), Cycle(vec![5, 7, 3, 4, 1, 2, 0, 6, 5]));
    assert!(mc.cycle.validate(&h).is_ok());
}

#[test]
fn hexagon_cycle_walks_once_around() {
    let h = box_complex("h2", "R(x,y,z)");
    let tree = build_spanning_tree(&h, 0);
    let mu = cyclic_shift_mu(&h).unwrap();
    let mc = build_mu_cycle(&h, &tree, &mu, None).unwrap();
    assert_eq!(mc.cycle, Cycle(vec![0, 4, 3, 5, 1, 2, 0]));
    assert!(traversal_imbalance(&mc.cycle).is_some());
}

#[test]
fn disconnected_complexes_cannot_build_the_cycle() {
    let h = box_complex("a2", "R(x,y,z)");
    let tree = build_spanning_tree(&h, 0);
    let mu = cyclic_shift_mu(&h).unwrap();
    assert_eq!(
        build_mu_cycle(&h, &tree, &mu, Some(1)).unwrap_err(),
        MuError::AnchorOutside(1)
    );
    assert_eq!(
        build_mu_cycle(&h, &tree, &mu, None).unwrap_err(),
        MuError::Disconnected { from: 0, to: 2 }
    );
}

#[test]
fn retraces_have_no_imbalance() {
    assert_eq!(traversal_imbalance(&Cycle(vec![0, 2, 0])), None);
    assert_eq!(traversal_imbalance(&Cycle(vec![0, 0])), None);
    let imb = traversal_imbalance(&Cycle(vec![0, 1, 2, 0])).unwrap();
    assert_eq!((imb.u, imb.v, imb.forward, imb.backward), (0, 1, 1, 0));
}
