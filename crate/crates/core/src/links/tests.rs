use super::*;
use crate::algebra::rational::{int, rat};
use crate::marked::from_homaloidal;
use proptest::prelude::*;

fn t(s: &str) -> HomaloidalType {
    s.parse().unwrap()
}

fn plane(s: &str) -> MarkedSystem {
    from_homaloidal(&t(s)).unwrap()
}

fn roots(mults: &[(&str, u32)]) -> Vec<PositionedPoint> {
    mults
        .iter()
        .map(|(id, m)| PositionedPoint::general(ClusterPoint::root(*id, *m)))
        .collect()
}

fn fresh(id: &str) -> Center {
    Center::Fresh(FreshPoint::general(id))
}

fn assert_conserved(ms: &MarkedSystem) {
    let (sq, lin) = ms.identity_residuals();
    assert!(sq.is_zero() && lin.is_zero(), "{}", ms.summary());
}

#[test]
fn a_link_examples() {
    let (f1, inv) = apply_a(&plane("2;1,1,1"), &"p1".into()).unwrap();
    assert_eq!(f1.surface(), Surface::hirzebruch(1));
    assert_eq!((f1.a(), f1.b()), (&rat(1, 2), &rat(1, 2)));
    assert_eq!(f1.cluster().multiplicities(), vec![1, 1]);
    assert_eq!(inv, Link::AInv { new_point: "p1".into() });

    let (f1, _) = apply_a(&plane("1;"), &fresh("q")).unwrap();
    assert_eq!((f1.a(), f1.b()), (&rat(1, 2), &rat(-1, 2)));
    assert_eq!(f1.self_intersection(), int(1));
    assert_eq!(f1.anticanonical_degree(), int(3));

    let (f1, _) = apply_a(&plane("5;2,2,2,2,2,2"), &"p3".into()).unwrap();
    assert_eq!((f1.a(), f1.b()), (&rat(3, 2), &rat(1, 2)));
}

#[test]
fn a_link_errors() {
    let f1 = MarkedSystem::new(Surface::hirzebruch(1), rat(1, 2), rat(-1, 2), vec![]).unwrap();
    assert!(matches!(apply_a(&f1, &fresh("q")), Err(Error::WrongSurface { .. })));
    let near = plane("3;2,1>1,1,1,1");
    assert!(matches!(apply_a(&near, &"p2".into()), Err(Error::NotProperPoint(_))));
    assert!(matches!(apply_a(&near, &"zz".into()), Err(Error::NotProperPoint(_))));
    assert!(matches!(apply_a(&near, &fresh("p1")), Err(Error::InvalidInput(_))));
}

#[test]
fn a_link_moves_neighbours_onto_the_section() {
    let (f1, _) = apply_a(&plane("3;2,1>1,1,1,1"), &"p1".into()).unwrap();
    assert!(f1.cluster().get(&"p2".into()).unwrap().is_root());
    assert!(f1.position(&"p2".into()).on_negative_section);
    assert!(!f1.position(&"p3".into()).on_negative_section);
}

#[test]
fn a_inverse_examples() {
    let f1 = MarkedSystem::new(Surface::hirzebruch(1), rat(1, 2), rat(-1, 2), vec![]).unwrap();
    let (p2, _) = apply_ainv(&f1, &"r".into()).unwrap();
    assert_eq!(p2, plane("1;"));

    let f1 = MarkedSystem::new(
        Surface::hirzebruch(1),
        rat(1, 2),
        rat(1, 2),
        roots(&[("p2", 1), ("p3", 1)]),
    )
    .unwrap();
    let (p2, inv) = apply_ainv(&f1, &"p1".into()).unwrap();
    assert_eq!(p2.to_homaloidal().unwrap(), t("2;1,1,1"));
    assert_eq!(inv, Link::A { center: "p1".into() });

    let (f1, _) = apply_a(&plane("5;2,2,2,2,2,2"), &"p6".into()).unwrap();
    let (back, _) = apply_ainv(&f1, &"r".into()).unwrap();
    assert_eq!(back.a(), &rat(5, 3));
    assert_eq!(back.cluster().get(&"r".into()).unwrap().multiplicity, 2);
}

#[test]
fn a_inverse_errors() {
    assert!(matches!(
        apply_ainv(&plane("1;"), &"r".into()),
        Err(Error::WrongSurface { .. })
    ));
    let pts = vec![
        PositionedPoint::general(ClusterPoint::root("p2", 1)),
        PositionedPoint {
            on_fiber_of: Some("p2".into()),
            ..PositionedPoint::general(ClusterPoint::root("p3", 1))
        },
    ];
    let f1 = MarkedSystem::new(Surface::hirzebruch(1), rat(1, 2), rat(1, 2), pts).unwrap();
    assert!(matches!(apply_ainv(&f1, &"r".into()), Err(Error::SpecialPosition(_))));
    let f1 = MarkedSystem::new(Surface::hirzebruch(1), rat(1, 2), rat(1, 2), roots(&[("p2", 1), ("p3", 1)])).unwrap();
    assert!(matches!(apply_ainv(&f1, &"p2".into()), Err(Error::InvalidInput(_))));
}

#[test]
fn b_link_examples() {
    let f1 = MarkedSystem::new(
        Surface::hirzebruch(1),
        rat(1, 2),
        rat(1, 2),
        roots(&[("p2", 1), ("p3", 1)]),
    )
    .unwrap();
    let (f0, inv) = apply_b(&f1, &"p2".into(), &"q".into(), None).unwrap();
    assert_eq!(f0.surface(), Surface::f0(Ruling::A));
    assert_eq!((f0.a(), f0.b()), (&rat(1, 2), &int(0)));
    assert_eq!(f0.cluster().multiplicities(), vec![1]);
    assert!(matches!(inv, Link::B { center: Center::Fresh(_), .. }));

    let (f1, _) = apply_b(&f0, &"p3".into(), &"q2".into(), None).unwrap();
    assert_eq!(f1.surface(), Surface::hirzebruch(1));
    assert_eq!((f1.a(), f1.b()), (&rat(1, 2), &rat(-1, 2)));
    assert!(f1.cluster().is_empty());

    // fresh center off the section of F1: b' = b + a, new point of multiplicity 2a
    let g = MarkedSystem::new(
        Surface::hirzebruch(1),
        rat(1, 2),
        rat(1, 2),
        roots(&[("p2", 1), ("p3", 1)]),
    )
    .unwrap();
    let (h, _) = apply_b(&g, &fresh("x"), &"q".into(), None).unwrap();
    assert_eq!(h.surface(), Surface::f0(Ruling::A));
    assert_eq!(h.b(), &int(1));
    assert_eq!(h.cluster().get(&"q".into()).unwrap().multiplicity, 1);
    assert_conserved(&h);
}

#[test]
fn b_link_twists_by_section_membership() {
    // Blowing up a point of the section of F1 lands on F2.
    let f1 = MarkedSystem::new(Surface::hirzebruch(1), rat(1, 2), rat(-1, 2), vec![]).unwrap();
    let on_section = Center::Fresh(FreshPoint {
        on_negative_section: true,
        ..FreshPoint::general("x")
    });
    let (f2, inv) = apply_b(&f1, &on_section, &"q".into(), None).unwrap();
    assert_eq!(f2.surface(), Surface::hirzebruch(2));
    assert_eq!(f2.a(), &rat(1, 2));
    assert_eq!(f2.b(), &int(0));
    let (back, _) = apply_link(&f2, &inv).unwrap();
    assert_eq!(back, f1);
}

#[test]
fn b_link_errors() {
    assert!(matches!(
        apply_b(&plane("1;"), &fresh("x"), &"q".into(), None),
        Err(Error::WrongSurface { .. })
    ));
    // a point of multiplicity above 2a
    let (f1, _) = apply_a(&plane("5;2,2,2,2,2,2"), &"p1".into()).unwrap();
    let (f0, _) = apply_b(&f1, &"p2".into(), &"q".into(), None).unwrap();
    assert!(f0.cluster().len() >= 4);
    let f1 = MarkedSystem::new(
        Surface::hirzebruch(1),
        rat(1, 2),
        rat(1, 2),
        roots(&[("p2", 1), ("p3", 1)]),
    )
    .unwrap();
    assert!(matches!(
        apply_b(&f1, &"p2".into(), &"p3".into(), None),
        Err(Error::InvalidInput(_))
    ));
    // two points of one fiber overload the contracted fiber
    let pts = vec![
        PositionedPoint::general(ClusterPoint::root("p2", 1)),
        PositionedPoint {
            on_fiber_of: Some("p2".into()),
            ..PositionedPoint::general(ClusterPoint::root("p3", 1))
        },
    ];
    let crowded = MarkedSystem::new(Surface::hirzebruch(1), rat(1, 2), rat(1, 2), pts).unwrap();
    assert!(matches!(
        apply_b(&crowded, &"p2".into(), &"q".into(), None),
        Err(Error::SpecialPosition(_))
    ));
}

#[test]
fn c_link_examples() {
    // H^2 = 4 and -K.H = 6: three simple points
    let f0 = MarkedSystem::new(Surface::f0(Ruling::A), int(1), int(-1), roots(&[("u", 1), ("v", 1), ("w", 1)])).unwrap();
    let (g, inv) = apply_c(&f0).unwrap();
    assert_eq!((g.a(), g.b()), (&rat(1, 2), &int(1)));
    assert_eq!(g.surface(), Surface::f0(Ruling::B));
    assert_eq!(inv, Link::C);
    let (back, _) = apply_c(&g).unwrap();
    assert_eq!(back, f0);

    let fixed = MarkedSystem::new(Surface::f0(Ruling::A), rat(1, 2), int(0), roots(&[("u", 1)])).unwrap();
    let (g, _) = apply_c(&fixed).unwrap();
    assert_eq!((g.a(), g.b()), (fixed.a(), fixed.b()));
    assert!(matches!(apply_c(&plane("1;")), Err(Error::WrongSurface { .. })));
}

#[test]
fn c_link_swaps_fiber_relations() {
    let pts = vec![
        PositionedPoint::general(ClusterPoint::root("u", 1)),
        PositionedPoint {
            on_fiber_of: Some("u".into()),
            ..PositionedPoint::general(ClusterPoint::root("v", 1))
        },
        PositionedPoint {
            on_cross_fiber_of: Some("u".into()),
            ..PositionedPoint::general(ClusterPoint::root("w", 1))
        },
    ];
    let f0 = MarkedSystem::new(Surface::f0(Ruling::A), int(1), int(-1), pts).unwrap();
    let (g, _) = apply_c(&f0).unwrap();
    assert_eq!(g.fiber_mates(&"w".into()), BTreeSet::from(["u".into()]));
    assert_eq!(g.cross_fiber_mates(&"v".into()), BTreeSet::from(["u".into()]));
}

#[test]
fn factorize_identity_is_empty() {
    let trace = factorize(&t("1;")).unwrap();
    assert!(trace.steps.is_empty());
    assert_eq!(recompose(&trace).unwrap(), t("1;"));
}

#[test]
fn factorize_quadratic_map() {
    let trace = factorize(&t("2;1,1,1")).unwrap();
    assert_eq!(trace.link_names(), vec!["A", "B", "B", "AInv"]);
    let last = &trace.steps.last().unwrap().state_after;
    assert_eq!(last, &plane("1;"));
    let json = serde_json::to_string(&trace.to_json()).unwrap();
    assert_eq!(
        json,
        concat!(
            r#"[{"link":"A","center":"p1","surface_after":"F1","a":"1/2","b":"1/2","degree":["1/2","1",2]},"#,
            r#"{"link":"B","center":"p2","surface_after":"F0a","a":"1/2","b":"0","degree":["1/2","1",1]},"#,
            r#"{"link":"B","center":"p3","surface_after":"F1","a":"1/2","b":"-1/2","degree":["1/2","0",0]},"#,
            r#"{"link":"AInv","center":null,"surface_after":"P2","a":"1/3","b":"0","degree":["1/3","0",0]}]"#
        )
    );
    assert_eq!(recompose(&trace).unwrap(), t("2;1,1,1"));
}

#[test]
fn factorize_sextic_type() {
    let ty = t("5;2,2,2,2,2,2");
    let trace = factorize(&ty).unwrap();
    let mut prev = plane("5;2,2,2,2,2,2").sarkisov_degree();
    for step in &trace.steps {
        assert!(step.degree < prev);
        assert_conserved(&step.state_after);
        prev = step.degree.clone();
    }
    assert_eq!(trace.steps.last().unwrap().state_after, plane("1;"));
    assert_eq!(recompose(&trace).unwrap(), ty);
}

#[test]
fn factorize_infinitely_near_types() {
    for s in ["3;2,1>1,1,1,1", "3;2,1>1,1>2,1,1", "4;3,1>1,1,1,1,1,1", "4;3,1>1,1>2,1>3,1,1,1"] {
        let ty = t(s);
        assert!(ty.validate(), "{s}");
        let trace = factorize(&ty).unwrap_or_else(|e| panic!("{s}: {e}"));
        assert_eq!(recompose(&trace).unwrap(), ty, "{s}");
    }
}

#[test]
fn factorize_rejects_invalid_types() {
    assert!(matches!(factorize(&t("3;1,1,1,1")), Err(Error::NotHomaloidal(_))));
}

#[test]
fn recompose_detects_tampering() {
    let mut trace = factorize(&t("2;1,1,1")).unwrap();
    trace.steps.remove(1);
    assert!(matches!(recompose(&trace), Err(Error::InvalidTrace(_))));
    let mut trace = factorize(&t("2;1,1,1")).unwrap();
    trace.steps.pop();
    assert!(matches!(recompose(&trace), Err(Error::InvalidTrace(_))));
}

#[test]
fn compose_quadratic_examples() {
    let centers = |a: &str, b: &str, c: &str| [a.into(), b.into(), c.into()];
    assert_eq!(
        compose_quadratic(&t("2;1,1,1"), &centers("p1", "p2", "p3")).unwrap(),
        t("1;")
    );
    let q = compose_quadratic(&t("1;"), &[fresh("p1"), fresh("p2"), fresh("p3")]).unwrap();
    assert_eq!(q, t("2;1,1,1"));
    let out = compose_quadratic(&t("5;2,2,2,2,2,2"), &centers("p1", "p2", "p3")).unwrap();
    assert_eq!(out.n, 4);
    assert_eq!(out.multiplicity_profile(), vec![2, 2, 2, 1, 1, 1]);
    assert!(out.validate());
}

#[test]
fn compose_quadratic_errors() {
    let ty = t("2;1,1,1");
    assert!(matches!(
        compose_quadratic(&ty, &["p1".into(), "p1".into(), "p2".into()]),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        compose_quadratic(&t("1;"), &[fresh("a"), fresh("b"), fresh("a")]),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        compose_quadratic(&t("3;2,1>1,1,1,1"), &["p1".into(), "p3".into(), "p4".into()]),
        Err(Error::SpecialPosition(_))
    ));
}

/// Random valid types built by composing quadratic maps at proper points
/// and fresh points.
fn arb_type() -> impl Strategy<Value = HomaloidalType> {
    prop::collection::vec(
        prop::array::uniform3((any::<bool>(), any::<prop::sample::Index>())),
        0..8,
    )
    .prop_map(|steps| {
        let mut ty = HomaloidalType::identity();
        let mut counter = 0;
        for picks in steps {
            let ids: Vec<PointId> = ty.cluster.points().iter().map(|p| p.id.clone()).collect();
            let centers: Vec<Center> = picks
                .iter()
                .map(|(use_old, idx)| {
                    if *use_old && !ids.is_empty() {
                        Center::Point(ids[idx.index(ids.len())].clone())
                    } else {
                        counter += 1;
                        Center::Fresh(FreshPoint::general(format!("c{counter}")))
                    }
                })
                .collect();
            let centers: [Center; 3] = centers.try_into().unwrap();
            if let Ok(next) = compose_quadratic(&ty, &centers) {
                ty = next;
            }
        }
        ty
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factorization_round_trips(ty in arb_type()) {
        prop_assert!(ty.validate());
        let trace = factorize(&ty).unwrap();
        let mut prev = MarkedSystem::from_homaloidal(&ty).unwrap().sarkisov_degree();
        for step in &trace.steps {
            prop_assert!(step.degree < prev);
            prev = step.degree.clone();
            let (sq, lin) = step.state_after.identity_residuals();
            prop_assert!(sq.is_zero() && lin.is_zero());
            if let Link::B { .. } = step.link {
                prop_assert_eq!(step.state_after.a(), step.state_before.a());
            }
        }
        prop_assert_eq!(recompose(&trace).unwrap(), ty);
    }

    #[test]
    fn every_link_is_undone_by_its_inverse(ty in arb_type(), pick in any::<prop::sample::Index>()) {
        let trace = factorize(&ty).unwrap();
        let mut states = vec![MarkedSystem::from_homaloidal(&ty).unwrap()];
        states.extend(trace.steps.iter().map(|s| s.state_after.clone()));
        let state = &states[pick.index(states.len())];
        let mut candidates: Vec<Link> = Vec::new();
        let centers: Vec<Center> = state
            .cluster()
            .roots()
            .map(|p| Center::Point(p.id.clone()))
            .chain([Center::Fresh(FreshPoint::general("zz"))])
            .collect();
        match state.surface() {
            Surface::P2 => candidates.extend(centers.into_iter().map(|center| Link::A { center })),
            Surface::Hirzebruch { n, .. } => {
                candidates.extend(centers.into_iter().map(|center| Link::B {
                    center,
                    new_point: "yy".into(),
                    landing: Some(Ruling::B),
                }));
                if n == 0 {
                    candidates.push(Link::C);
                }
                if n == 1 {
                    candidates.push(Link::AInv { new_point: "yy".into() });
                }
            }
        }
        for link in candidates {
            if let Ok((next, inverse)) = apply_link(state, &link) {
                let (sq, lin) = next.identity_residuals();
                prop_assert!(sq.is_zero() && lin.is_zero());
                let (back, _) = apply_link(&next, &inverse).unwrap();
                prop_assert_eq!(&back, state);
            }
        }
    }

    #[test]
    fn certificate_matches_classification(ty in arb_type()) {
        let trace = factorize(&ty).unwrap();
        for step in &trace.steps {
            let s = &step.state_after;
            let iso = s.classify().unwrap() == Classification::Isomorphism;
            prop_assert_eq!(iso, s.noether_fano_certificate());
        }
    }

    #[test]
    fn noether_inequality_on_generated_types(ty in arb_type()) {
        if ty.n > 1 {
            prop_assert!(ty.noether_inequality().unwrap());
        }
    }
}
