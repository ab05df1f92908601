use palmdt::geom::{AxisBox, DelaunayComplex, PointConfiguration, Vec2};
use palmdt::selftest::oracle_adjacent;
use proptest::prelude::*;

fn points(max: usize) -> impl Strategy<Value = Vec<Vec2>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..max).prop_map(|v| v.into_iter().map(|(x, y)| Vec2::new(x, y)).collect())
}

fn complex(pts: &[Vec2]) -> Option<DelaunayComplex> {
    let cfg = PointConfiguration::from_planar(AxisBox::centered(2, 1.0).unwrap(), pts).ok()?;
    DelaunayComplex::new(cfg).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjacency_matches_half_plane_oracle(pts in points(20)) {
        let Some(cx) = complex(&pts) else { return Ok(()) };
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                prop_assert_eq!(cx.are_adjacent(i as u32, j as u32), oracle_adjacent(&pts, i, j, cx.eps_face()));
            }
        }
    }

    #[test]
    fn every_edge_has_an_empty_disk(pts in points(50)) {
        let Some(cx) = complex(&pts) else { return Ok(()) };
        for e in cx.edges() {
            // the face midpoint is equidistant to both ends and no closer to any third point
            let (s, t) = e.face.truncated(10.0);
            let c = s.midpoint(t);
            let r = c.dist(cx.point(e.a));
            for (k, &q) in cx.points().iter().enumerate() {
                if k as u32 != e.a && k as u32 != e.b {
                    prop_assert!(c.dist(q) >= r * (1.0 - 1e-9));
                }
            }
        }
    }

    #[test]
    fn adjacency_is_symmetric_and_irreflexive(pts in points(40)) {
        let Some(cx) = complex(&pts) else { return Ok(()) };
        for v in 0..cx.len() as u32 {
            for u in cx.neighbors(v) {
                prop_assert!(u != v);
                prop_assert!(cx.are_adjacent(u, v));
            }
        }
    }
}
