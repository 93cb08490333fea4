mod support;

use pcsp_ep_core::complexes::{build_complex, build_spanning_tree, Cycle, FaceMode};
use pcsp_ep_core::groups::free_basis;
use pcsp_ep_core::mu::{build_mu_cycle, cyclic_shift_mu};
use pcsp_ep_core::polymorphisms::{
    analyze_xi_structure, check_minor_preservation, enumerate_polymorphisms, Polymorphism,
    PolyViolation, XiContext, XiError,
};
use pcsp_ep_core::structures::{direct_power, Relation, RelationalStructure};
use support::{box_complex, brute_homomorphisms, structure};

#[test]
fn projections_and_minors() {
    let p0 = Polymorphism::projection(2, 3, 0);
    let p1 = Polymorphism::projection(2, 3, 1);
    assert_eq!(p0.apply(&[1, 2]), 1);
    assert_eq!(p1.apply(&[1, 2]), 2);
    assert_eq!(p0.essential_coordinates(), vec![0]);
    assert_eq!(p1.essential_coordinates(), vec![1]);
    // Identifying both slots of a projection leaves the identity.
    assert_eq!(p0.minor(&[0, 0], 1).table, vec![0, 1, 2]);
    // Swapping slots twice is a no-op.
    let xor = Polymorphism::new(2, 2, vec![0, 1, 1, 0]);
    assert_eq!(xor.minor(&[1, 0], 2).minor(&[1, 0], 2), xor);
    assert_eq!(xor.essential_coordinates(), vec![0, 1]);
    // The defining identity of a minor, checked pointwise.
    let g = xor.minor(&[1, 1], 2);
    for y0 in 0..2 {
        for y1 in 0..2 {
            assert_eq!(g.apply(&[y0, y1]), xor.apply(&[y1, y1]));
        }
    }
    let constant = Polymorphism::new(2, 2, vec![1, 1, 1, 1]);
    assert!(constant.essential_coordinates().is_empty());
}

#[test]
fn enumeration_matches_brute_force_on_k3() {
    let k3 = structure("k3");
    let (unary, complete) = enumerate_polymorphisms(&k3, &k3, 1, 1_000_000, None).unwrap();
    assert!(complete);
    assert_eq!(unary.len(), 6);
    let (binary, complete) = enumerate_polymorphisms(&k3, &k3, 2, 1_000_000, None).unwrap();
    assert!(complete);
    assert_eq!(binary.len(), 12);
    let square = direct_power(&k3, 2, 1_000_000).unwrap();
    let brute = brute_homomorphisms(&square, &k3);
    assert_eq!(brute.len(), 12);
    for (f, h) in binary.iter().zip(&brute) {
        assert_eq!(&f.table, h);
        assert_eq!(f.arity, 2);
        assert_eq!(f.a_size, 3);
        f.validate(&k3, &k3).unwrap();
    }
}

/// Binary operations compatible with a cycle are the homomorphisms of its
/// tensor square. Group the square's vertices into rows by the first
/// coordinate: rows only constrain rows adjacent in the cycle, so the count
/// is the trace of the n-th power of the row-compatibility matrix.
fn cycle_tensor_square_hom_count(
    cycle: &RelationalStructure,
    target: &RelationalStructure,
) -> u64 {
    let edges = &cycle.relations[0];
    let n = cycle.size();
    let mut degree = vec![0usize; n];
    for t in &edges.tuples {
        degree[t[0]] += 1;
    }
    assert!(degree.iter().all(|&d| d == 2), "source must be a cycle");
    let k = target.size();
    let states = k.pow(n as u32);
    let decode = |mut s: usize| -> Vec<usize> {
        let mut row = vec![0usize; n];
        for slot in row.iter_mut().rev() {
            *slot = s % k;
            s /= k;
        }
        row
    };
    let rows: Vec<Vec<usize>> = (0..states).map(decode).collect();
    let target_edges = &target.relations[0];
    let mut a = vec![0u64; states * states];
    for (s, row_s) in rows.iter().enumerate() {
        for (t, row_t) in rows.iter().enumerate() {
            let ok = edges
                .tuples
                .iter()
                .all(|e| target_edges.contains(&vec![row_s[e[0]], row_t[e[1]]]));
            a[s * states + t] = ok as u64;
        }
    }
    let matmul = |x: &[u64], y: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; states * states];
        for i in 0..states {
            for l in 0..states {
                let v = x[i * states + l];
                if v == 0 {
                    continue;
                }
                for j in 0..states {
                    out[i * states + j] += v * y[l * states + j];
                }
            }
        }
        out
    };
    assert_eq!(n, 5, "power ladder below is for five rows");
    let a2 = matmul(&a, &a);
    let a4 = matmul(&a2, &a2);
    (0..states).map(|s| (0..states).map(|t| a4[s * states + t] * a[t * states + s]).sum::<u64>()).sum()
}

#[test]
fn pentagon_to_triangle_operation_counts() {
    let c5 = structure("c5");
    let k3 = structure("k3");
    let (unary, complete) = enumerate_polymorphisms(&c5, &k3, 1, 1_000_000, None).unwrap();
    assert!(complete);
    assert_eq!(unary.len(), 30);
    let brute = brute_homomorphisms(&c5, &k3);
    assert_eq!(unary.len(), brute.len());
    for (f, h) in unary.iter().zip(&brute) {
        assert_eq!(&f.table, h);
    }
    let (binary, complete) = enumerate_polymorphisms(&c5, &k3, 2, 10_000_000, None).unwrap();
    assert!(complete);
    assert_eq!(binary.len(), 7560);
    assert_eq!(binary.len() as u64, cycle_tensor_square_hom_count(&c5, &k3));
    // Slot-respecting copies of the thirty unary maps; constants are not
    // compatible, so the two families are disjoint.
    let unary_like = binary.iter().filter(|f| f.essential_coordinates().len() <= 1).count();
    assert_eq!(unary_like, 60);
}

#[test]
fn validation_pinpoints_the_broken_tuple() {
    let k3 = structure("k3");
    let constant = Polymorphism::new(1, 3, vec![0, 0, 0]);
    assert_eq!(
        constant.validate(&k3, &k3),
        Err(PolyViolation { relation: "E".into(), picks: vec![0], image: vec![0, 0] })
    );
    let identity = Polymorphism::new(1, 3, vec![0, 1, 2]);
    identity.validate(&k3, &k3).unwrap();
}

fn hexagon_context() -> (
    pcsp_ep_core::complexes::Complex,
    pcsp_ep_core::complexes::SpanningTree,
    pcsp_ep_core::groups::FreeBasis,
    Cycle,
) {
    let h = box_complex("k3", "E(x,y)");
    let tree = build_spanning_tree(&h, 0);
    let basis = free_basis(&h, &tree).unwrap();
    let mu = cyclic_shift_mu(&h).unwrap();
    let cycle = build_mu_cycle(&h, &tree, &mu, None).unwrap().cycle;
    (h, tree, basis, cycle)
}

#[test]
fn xi_reads_winding_exponents() {
    let (h, tree, basis, cycle) = hexagon_context();
    assert_eq!(cycle, Cycle(vec![0, 1, 3, 2, 4, 5, 0]));
    let ctx = XiContext { h_a: &h, h_b: &h, tree_b: &tree, basis_b: &basis, cycle_a: &cycle };

    let identity = Polymorphism::new(1, 3, vec![0, 1, 2]);
    let words = ctx.xi(&identity).unwrap();
    assert_eq!(words.len(), 1);
    assert_eq!(words[0].render(), "e4");

    // A reflection of the triangle walks the cycle backwards.
    let swap = Polymorphism::new(1, 3, vec![0, 2, 1]);
    let words = ctx.xi(&swap).unwrap();
    assert_eq!(words[0].render(), "e4^-1");

    // Projections track one slot and ignore the other.
    let p0 = Polymorphism::projection(2, 3, 0);
    let words = ctx.xi(&p0).unwrap();
    assert_eq!(words[0].render(), "e4");
    assert!(words[1].is_identity());
    let s = analyze_xi_structure(&words);
    assert!(s.commuting);
    assert_eq!(s.root.as_deref(), Some("e4"));
    assert_eq!(s.exponents, vec![1, 0]);
    assert_eq!(s.exponent_sum, 1);
    assert!(s.essential());

    // All twelve binary operations wind one slot exactly once.
    let k3 = structure("k3");
    let (binary, _) = enumerate_polymorphisms(&k3, &k3, 2, 1_000_000, None).unwrap();
    for f in &binary {
        let s = analyze_xi_structure(&ctx.xi(f).unwrap());
        assert!(s.essential());
        assert_eq!(s.exponent_sum.abs(), 1);
        assert_eq!(s.root.as_deref(), Some("e4"));
    }
}

#[test]
fn minors_become_slotwise_products() {
    let (h, tree, basis, cycle) = hexagon_context();
    let ctx = XiContext { h_a: &h, h_b: &h, tree_b: &tree, basis_b: &basis, cycle_a: &cycle };
    let p0 = Polymorphism::projection(2, 3, 0);
    let check = check_minor_preservation(&ctx, &p0, &[0, 0], 1).unwrap();
    assert!(check.holds);
    assert_eq!(check.minor_side.len(), 1);
    assert_eq!(check.minor_side[0].render(), "e4");
    assert_eq!(check.product_side, check.minor_side);
    let check = check_minor_preservation(&ctx, &p0, &[1, 0], 2).unwrap();
    assert!(check.holds);
    assert!(check.minor_side[0].is_identity());
    assert_eq!(check.minor_side[1].render(), "e4");
}

#[test]
fn xi_rejects_images_that_leave_the_complex() {
    let (h, tree, basis, cycle) = hexagon_context();
    let ctx = XiContext { h_a: &h, h_b: &h, tree_b: &tree, basis_b: &basis, cycle_a: &cycle };
    let collapse = Polymorphism::new(1, 3, vec![0, 0, 0]);
    assert_eq!(ctx.xi(&collapse), Err(XiError::ImageNotVertex(vec![0, 0])));
}

#[test]
fn xi_rejects_steps_and_base_points_off_the_target() {
    // Target with hand-picked faces: the image walk exists vertexwise but
    // one step has no common face, and one base point sits in a cut-off
    // component.
    let h_a = box_complex("k3", "E(x,y)");
    let tree_a = build_spanning_tree(&h_a, 0);
    let mu = cyclic_shift_mu(&h_a).unwrap();
    let cycle = build_mu_cycle(&h_a, &tree_a, &mu, None).unwrap().cycle;
    let sub = Relation::new(
        "S",
        2,
        vec![vec![0, 1], vec![0, 3], vec![1, 0], vec![1, 3], vec![3, 0], vec![3, 1]],
    );
    let faces = FaceMode::Custom(vec![vec![0, 1], vec![1, 3], vec![3, 2], vec![2, 4]]);
    let h_b = build_complex(&sub, &faces, 1_000_000).unwrap();
    let tree_b = build_spanning_tree(&h_b, 0);
    let basis_b = free_basis(&h_b, &tree_b).unwrap();
    let ctx =
        XiContext { h_a: &h_a, h_b: &h_b, tree_b: &tree_b, basis_b: &basis_b, cycle_a: &cycle };

    let rename = Polymorphism::new(1, 3, vec![0, 1, 3]);
    assert_eq!(
        ctx.xi(&rename),
        Err(XiError::ImageStepNotEdge { u: vec![3, 0], v: vec![3, 1] })
    );

    let displaced = Polymorphism::new(1, 3, vec![3, 1, 0]);
    assert_eq!(ctx.xi(&displaced), Err(XiError::ImageOutsideComponent(5)));
}

#[test]
fn xi_structure_of_degenerate_families() {
    let (h, tree, basis, cycle) = hexagon_context();
    let ctx = XiContext { h_a: &h, h_b: &h, tree_b: &tree, basis_b: &basis, cycle_a: &cycle };
    let identity = Polymorphism::new(1, 3, vec![0, 1, 2]);
    let swap = Polymorphism::new(1, 3, vec![0, 2, 1]);
    let forward = ctx.xi(&identity).unwrap().pop().unwrap();
    let backward = ctx.xi(&swap).unwrap().pop().unwrap();
    // Opposite windings cancel: commuting but not essential.
    let s = analyze_xi_structure(&[forward.clone(), backward.clone()]);
    assert!(s.commuting);
    assert_eq!(s.exponent_sum, 0);
    assert!(!s.essential());
    // The all-trivial family has the empty root.
    let s = analyze_xi_structure(&[pcsp_ep_core::groups::Word::identity()]);
    assert_eq!(s.root.as_deref(), Some("1"));
    assert!(!s.essential());
    // Distinct free generators do not commute.
    let tree_word = pcsp_ep_core::groups::Word(vec![pcsp_ep_core::groups::Letter {
        edge: 0,
        inv: false,
    }]);
    let s = analyze_xi_structure(&[tree_word, forward]);
    assert!(!s.commuting);
    assert!(!s.essential());
}
