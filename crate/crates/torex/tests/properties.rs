use proptest::prelude::*;

use torex::fixtures::{chorded_torus_grid, random_rotation_system, random_with_genus, torus_grid};
use torex::homology::{
    all_shortest_nonseparating, ewn, leap_report, shortest_nonseparating_cycle, stretch_exact,
    DEFAULT_EXACT_CAP,
};
use torex::lemmas::{check_lemma, CheckLimits, Lemma};
use torex::planarizer::{draw, validate_drawing};
use torex::surgery::{cut_along, good_planarizing_sequence};
use torex::RotationSystem;

fn small_system() -> impl Strategy<Value = RotationSystem> {
    (1usize..7, 0usize..10, any::<u64>()).prop_map(|(n, extra, seed)| {
        let m = (n - 1 + extra).max(1);
        random_rotation_system(n, m, seed)
    })
}

fn surface_system() -> impl Strategy<Value = RotationSystem> {
    (any::<u64>(), 1usize..3).prop_map(|(seed, g)| random_with_genus(14, g, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialize_parse_roundtrip(rs in small_system()) {
        let text = rs.serialize();
        let back = RotationSystem::parse(&text).unwrap();
        prop_assert_eq!(&back, &rs);
        prop_assert_eq!(back.serialize(), text);
    }

    #[test]
    fn dual_preserves_genus_and_counts(rs in small_system()) {
        let d = rs.dual();
        prop_assert_eq!(d.genus(), rs.genus());
        prop_assert_eq!(d.num_vertices(), rs.num_faces());
        prop_assert_eq!(d.num_faces(), rs.num_vertices());
        prop_assert_eq!(d.num_edges(), rs.num_edges());
        prop_assert!(d.dual().is_isomorphic(&rs));
    }

    #[test]
    fn euler_formula(rs in small_system()) {
        let chi = rs.num_vertices() as i64 - rs.num_edges() as i64 + rs.num_faces() as i64;
        prop_assert_eq!(chi, rs.euler_characteristic());
        prop_assert_eq!(chi, 2 - 2 * rs.genus() as i64);
    }

    #[test]
    fn cut_along_drops_genus_keeps_vertices(rs in surface_system()) {
        let dual = rs.dual();
        let gamma = shortest_nonseparating_cycle(&dual).unwrap();
        let cut = cut_along(&rs, &gamma).unwrap();
        prop_assert_eq!(cut.cut.num_vertices(), rs.num_vertices());
        prop_assert_eq!(cut.cut.genus() + 1, rs.genus());
        prop_assert_eq!(cut.cut.num_edges() + gamma.len(), rs.num_edges());
        for e in 0..cut.cut.num_edges() {
            let (a, b) = cut.cut.endpoints(e);
            let (x, y) = rs.endpoints(cut.edge_origin[e]);
            prop_assert_eq!((a, b), (x, y));
        }
    }

    #[test]
    fn planarizing_sequence_reaches_sphere(rs in surface_system()) {
        let seq = good_planarizing_sequence(&rs).unwrap();
        prop_assert_eq!(seq.steps.len(), rs.genus());
        prop_assert_eq!(seq.last().genus(), 0);
        for step in &seq.steps {
            prop_assert!(step.k >= 1 && step.l >= 1);
        }
    }

    #[test]
    fn drawings_are_valid_and_within_bound(rs in surface_system()) {
        let d = draw(&rs).unwrap();
        let check = validate_drawing(&d);
        prop_assert!(check.valid, "{:?}", check.problems);
        prop_assert!(d.total_crossings <= d.bound);
        prop_assert_eq!(d.planarization.genus(), 0);
    }

    #[test]
    fn leap_count_is_symmetric(seed in any::<u64>()) {
        let rs = random_with_genus(14, 1, seed);
        let cycles = all_shortest_nonseparating(&rs).unwrap();
        for a in cycles.iter().take(4) {
            for b in cycles.iter().take(4) {
                if a.canonical_key() == b.canonical_key() {
                    continue;
                }
                let ab = leap_report(&rs, a, b).unwrap();
                let ba = leap_report(&rs, b, a).unwrap();
                prop_assert_eq!(ab.leap_count, ba.leap_count);
                prop_assert_eq!(ab.algebraic, -ba.algebraic);
            }
        }
    }

    #[test]
    fn stretch_dominates_squared_edge_width(seed in any::<u64>()) {
        let rs = random_with_genus(14, 1, seed);
        let k = ewn(&rs).unwrap();
        let s = stretch_exact(&rs, DEFAULT_EXACT_CAP).unwrap();
        prop_assert!(s.lower >= k * k);
        prop_assert!(s.lower <= s.upper);
    }

    #[test]
    fn lemmas_hold_on_random_instances(seed in any::<u64>(), which in 0usize..Lemma::ALL.len()) {
        let lemma = Lemma::ALL[which];
        let rs = random_with_genus(16, lemma.min_genus(), seed);
        let r = check_lemma(&rs, lemma, CheckLimits::default()).unwrap();
        prop_assert_eq!(r.counterexamples.len(), 0, "{}: {}", lemma, rs.serialize());
    }

    #[test]
    fn generators_are_deterministic(seed in any::<u64>()) {
        prop_assert_eq!(random_with_genus(14, 1, seed), random_with_genus(14, 1, seed));
        prop_assert_eq!(chorded_torus_grid(4, 5, seed), chorded_torus_grid(4, 5, seed));
    }
}

#[test]
fn torus_grid_drawings_respect_lower_bound() {
    for p in 3..=5 {
        for q in p..=9 {
            let d = draw(&torus_grid(p, q)).unwrap();
            assert!(2 * d.total_crossings >= (p - 2) * q, "TG({p},{q})");
        }
    }
}
