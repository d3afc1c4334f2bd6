use ca_edge_core::baselines::{
    canny, gradient_operator, log_operator, CannyParams, GradientKind, LogParams,
};
use ca_edge_core::evaluation::{
    compare, localization_precision, search_rules, synthetic_shapes, CorpusPair, SearchConfig,
    Shape,
};
use ca_edge_core::imaging::{binarize_fixed, otsu_threshold, read_pnm, write_pnm, Threshold};
use ca_edge_core::rules::{basics, offset_of_basic, MAX_RULE};
use ca_edge_core::{
    step_naive, step_packed, BinaryGrid, BoundaryCondition, GrayImage, LinearRule, PnmFormat,
    PnmImage,
};
use proptest::prelude::*;

fn grid_strategy(max_h: usize, max_w: usize) -> impl Strategy<Value = BinaryGrid> {
    (1..=max_h, 1..=max_w).prop_flat_map(|(h, w)| {
        prop::collection::vec(any::<bool>(), h * w)
            .prop_map(move |bits| BinaryGrid::from_fn(h, w, |i, j| bits[i * w + j]).unwrap())
    })
}

fn grid_pair(
    max_h: usize,
    max_w: usize,
) -> impl Strategy<Value = (BinaryGrid, BinaryGrid, BinaryGrid)> {
    (1..=max_h, 1..=max_w).prop_flat_map(|(h, w)| {
        let one = move || {
            prop::collection::vec(any::<bool>(), h * w)
                .prop_map(move |bits| BinaryGrid::from_fn(h, w, |i, j| bits[i * w + j]).unwrap())
        };
        (one(), one(), one())
    })
}

fn gray_strategy(max_h: usize, max_w: usize, max_value: u8) -> impl Strategy<Value = GrayImage> {
    (1..=max_h, 1..=max_w).prop_flat_map(move |(h, w)| {
        prop::collection::vec(0..=max_value, h * w)
            .prop_map(move |px| GrayImage::new(h, w, px).unwrap())
    })
}

fn rule_strategy() -> impl Strategy<Value = LinearRule> {
    prop_oneof![
        (0..=MAX_RULE).prop_map(|n| LinearRule::new(n).unwrap()),
        prop::collection::btree_set(0u32..25, 1..=3)
            .prop_map(|bits| LinearRule::new(bits.iter().fold(0, |a, b| a | 1 << b)).unwrap()),
    ]
}

fn two_term_rule() -> impl Strategy<Value = LinearRule> {
    (0u32..25, 0u32..24).prop_map(|(a, b)| {
        let b = if b >= a { b + 1 } else { b };
        LinearRule::new((1 << a) | (1 << b)).unwrap()
    })
}

fn boundary() -> impl Strategy<Value = BoundaryCondition> {
    prop_oneof![
        Just(BoundaryCondition::Null),
        Just(BoundaryCondition::Periodic)
    ]
}

fn shape_strategy(side: usize) -> impl Strategy<Value = Shape> {
    prop_oneof![
        (1..side / 2, 1..side / 2, 0..side / 2, 0..side / 2).prop_map(|(h, w, t, l)| {
            Shape::FilledRectangle {
                top: t,
                left: l,
                height: h,
                width: w,
            }
        }),
        (0..side / 2 - 1).prop_flat_map(move |r| {
            (r..side - r, r..side - r).prop_map(move |(ci, cj)| Shape::FilledDisk {
                center_i: ci,
                center_j: cj,
                radius: r,
            })
        }),
        (1..side / 3).prop_map(|cell| Shape::Checkerboard { cell }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    // ---- grid ----

    #[test]
    fn grid_ops_stay_canonical((a, b, _) in grid_pair(12, 140), i in 0usize..12, j in 0usize..140) {
        prop_assert!(a.is_canonical());
        let x = a.xor(&b).unwrap();
        prop_assert!(x.is_canonical());
        let mut s = a.clone();
        let _ = s.set(i, j, true);
        prop_assert!(s.is_canonical());
        let count = (0..a.height()).flat_map(|i| (0..a.width()).map(move |j| (i, j))).filter(|&(i, j)| a.at(i, j)).count();
        prop_assert_eq!(a.popcount(), count);
    }

    #[test]
    fn null_reads_outside_are_zero(g in grid_strategy(10, 70), di in 1isize..200, j in -300isize..300) {
        let (h, w) = (g.height() as isize, g.width() as isize);
        prop_assert!(!g.get(-di, j, BoundaryCondition::Null));
        prop_assert!(!g.get(h - 1 + di, j, BoundaryCondition::Null));
        prop_assert!(!g.get(j.rem_euclid(h), -di, BoundaryCondition::Null));
        prop_assert!(!g.get(j.rem_euclid(h), w - 1 + di, BoundaryCondition::Null));
    }

    #[test]
    fn periodic_reads_wrap(g in grid_strategy(10, 70), i in -500isize..500, j in -500isize..500) {
        let (h, w) = (g.height() as isize, g.width() as isize);
        let p = BoundaryCondition::Periodic;
        prop_assert_eq!(g.get(i, j, p), g.get(i + h, j, p));
        prop_assert_eq!(g.get(i, j, p), g.get(i, j + w, p));
        prop_assert_eq!(g.get(i, j, p), g.at(i.rem_euclid(h) as usize, j.rem_euclid(w) as usize));
    }

    #[test]
    fn xor_group_laws((a, b, c) in grid_pair(20, 100)) {
        prop_assert_eq!(a.xor(&b).unwrap(), b.xor(&a).unwrap());
        prop_assert_eq!(a.xor(&b).unwrap().xor(&c).unwrap(), a.xor(&b.xor(&c).unwrap()).unwrap());
        prop_assert!(a.xor(&a).unwrap().is_empty());
        let hamming = a.ones().filter(|&(i, j)| !b.at(i, j)).count() + b.ones().filter(|&(i, j)| !a.at(i, j)).count();
        prop_assert_eq!(a.xor(&b).unwrap().popcount(), hamming);
    }

    // ---- rules ----

    #[test]
    fn compose_inverts_decompose(bits in prop::collection::btree_set(0u32..25, 0..=25)) {
        let set: Vec<u32> = bits.iter().rev().map(|b| 1u32 << b).collect();
        let rule = LinearRule::compose(&set).unwrap();
        prop_assert_eq!(rule.decompose(), set);
        let text = rule.decompose().iter().map(u32::to_string).collect::<Vec<_>>().join("+");
        if !text.is_empty() {
            prop_assert_eq!(text.parse::<LinearRule>().unwrap(), rule);
        }
        prop_assert_eq!(rule.to_string().parse::<LinearRule>().unwrap(), rule);
    }

    // ---- engine ----

    #[test]
    fn packed_equals_naive(g in grid_strategy(20, 200), rule in rule_strategy(), bc in boundary()) {
        prop_assert_eq!(step_packed(&g, rule, bc), step_naive(&g, rule, bc));
    }

    #[test]
    fn state_superposition((a, b, _) in grid_pair(16, 130), rule in rule_strategy(), bc in boundary()) {
        let lhs = step_packed(&a.xor(&b).unwrap(), rule, bc);
        let rhs = step_packed(&a, rule, bc).xor(&step_packed(&b, rule, bc)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rule_superposition(g in grid_strategy(16, 130), r1 in rule_strategy(), r2 in rule_strategy(), bc in boundary()) {
        let (r1, r2) = (r1.number(), r2.number() & !r1.number());
        let union = step_packed(&g, LinearRule::new(r1 | r2).unwrap(), bc);
        let split = step_packed(&g, LinearRule::new(r1).unwrap(), bc)
            .xor(&step_packed(&g, LinearRule::new(r2).unwrap(), bc)).unwrap();
        prop_assert_eq!(union, split);
    }

    #[test]
    fn basic_rule_translates(g in grid_strategy(12, 100), bit in 0u32..25) {
        let basic = 1u32 << bit;
        let o = offset_of_basic(basic).unwrap();
        let out = step_packed(&g, LinearRule::new(basic).unwrap(), BoundaryCondition::Null);
        for i in 0..g.height() {
            for j in 0..g.width() {
                let expect = g.get(i as isize + o.di as isize, j as isize + o.dj as isize, BoundaryCondition::Null);
                prop_assert_eq!(out.at(i, j), expect);
            }
        }
    }

    #[test]
    fn null_boundary_matches_zero_padding(g in grid_strategy(14, 90), rule in rule_strategy(), pad in 2usize..5) {
        let (h, w) = g.dims();
        let padded = BinaryGrid::from_fn(h + 2 * pad, w + 2 * pad, |i, j| {
            i >= pad && j >= pad && i < h + pad && j < w + pad && g.at(i - pad, j - pad)
        }).unwrap();
        let big = step_packed(&padded, rule, BoundaryCondition::Periodic);
        let out = step_packed(&g, rule, BoundaryCondition::Null);
        for i in 0..h {
            for j in 0..w {
                prop_assert_eq!(out.at(i, j), big.at(i + pad, j + pad));
            }
        }
    }

    #[test]
    fn even_rules_cancel_on_constant_image(rule in two_term_rule(), h in 5usize..30, w in 5usize..90) {
        let ones = BinaryGrid::new(h, w, true).unwrap();
        prop_assert!(step_packed(&ones, rule, BoundaryCondition::Periodic).is_empty());
        let null = step_packed(&ones, rule, BoundaryCondition::Null);
        prop_assert!(null.ones().all(|(i, j)| i < 2 || j < 2 || i + 2 >= h || j + 2 >= w));
    }

    // ---- imaging ----

    #[test]
    fn binarization_is_monotone(img in gray_strategy(10, 30, 255), t in 0u8..255) {
        let lo = binarize_fixed(&img, Threshold::fixed(t));
        let hi = binarize_fixed(&img, Threshold::fixed(t + 1));
        prop_assert!(hi.ones().all(|(i, j)| lo.at(i, j)));
    }

    #[test]
    fn otsu_ignores_pixel_order(img in gray_strategy(8, 30, 255), seed in any::<u64>()) {
        let mut px = img.pixels().to_vec();
        let mut s = seed | 1;
        for k in (1..px.len()).rev() {
            s ^= s << 13; s ^= s >> 7; s ^= s << 17;
            px.swap(k, (s % (k as u64 + 1)) as usize);
        }
        let shuffled = GrayImage::new(img.height(), img.width(), px).unwrap();
        prop_assert_eq!(otsu_threshold(&img), otsu_threshold(&shuffled));
    }

    #[test]
    fn pnm_round_trips(g in grid_strategy(20, 80), img in gray_strategy(20, 40, 255)) {
        for fmt in [PnmFormat::P1, PnmFormat::P4] {
            let bytes = write_pnm(&PnmImage::Binary(g.clone()), fmt).unwrap();
            prop_assert_eq!(read_pnm(&bytes).unwrap(), PnmImage::Binary(g.clone()));
        }
        let p2 = read_pnm(&write_pnm(&PnmImage::Gray(img.clone()), PnmFormat::P2).unwrap()).unwrap();
        let p5 = read_pnm(&write_pnm(&PnmImage::Gray(img.clone()), PnmFormat::P5).unwrap()).unwrap();
        prop_assert_eq!(&p2, &p5);
        prop_assert_eq!(p2, PnmImage::Gray(img));
    }

    // ---- baselines ----

    #[test]
    fn operators_ignore_constant_offset(img in gray_strategy(14, 14, 200), c in 1u8..=55) {
        prop_assume!(img.height() >= 3 && img.width() >= 3);
        let shifted = GrayImage::new(img.height(), img.width(), img.pixels().iter().map(|p| p + c).collect()).unwrap();
        for kind in [GradientKind::Sobel, GradientKind::Prewitt, GradientKind::Roberts] {
            prop_assert_eq!(gradient_operator(&img, kind).unwrap(), gradient_operator(&shifted, kind).unwrap());
        }
        let (a, b) = (log_operator(&img, LogParams::default()), log_operator(&shifted, LogParams::default()));
        prop_assert_eq!(a.response, b.response);
        prop_assert_eq!(a.edges, b.edges);
        prop_assert_eq!(canny(&img, CannyParams::default()), canny(&shifted, CannyParams::default()));
    }

    #[test]
    fn gradients_commute_with_transpose(img in gray_strategy(12, 12, 255)) {
        prop_assume!(img.height() >= 3 && img.width() >= 3);
        for kind in [GradientKind::Sobel, GradientKind::Prewitt] {
            let f = gradient_operator(&img, kind).unwrap();
            let t = gradient_operator(&img.transpose(), kind).unwrap();
            for i in 0..img.height() {
                for j in 0..img.width() {
                    prop_assert_eq!(f.gx[f.index(i, j)], t.gy[t.index(j, i)]);
                    prop_assert_eq!(f.gy[f.index(i, j)], t.gx[t.index(j, i)]);
                }
            }
        }
    }

    // ---- evaluation ----

    #[test]
    fn comparison_swap_and_bounds((a, b, _) in grid_pair(16, 40), tol in 0usize..3) {
        let ab = compare(&a, &b, tol).unwrap();
        let ba = compare(&b, &a, tol).unwrap();
        prop_assert_eq!(ab.precision, ba.recall);
        prop_assert_eq!(ab.recall, ba.precision);
        for v in [ab.precision, ab.recall, ab.f_measure] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert!(ab.f_measure <= ab.precision.max(ab.recall) + 1e-12);
    }

    #[test]
    fn two_term_rules_localize_on_shapes(shape in shape_strategy(48), rule in two_term_rule()) {
        let (img, boundary) = synthetic_shapes(shape, 48, 48).unwrap();
        let input = binarize_fixed(&img, otsu_threshold(&img));
        let out = step_packed(&input, rule, BoundaryCondition::Null);
        prop_assert_eq!(localization_precision(&out, &boundary, 2, 2).unwrap(), 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn planted_rule_wins(g in grid_strategy(20, 20), rule in two_term_rule()) {
        let reference = step_naive(&g, rule, BoundaryCondition::Null);
        prop_assume!(!reference.is_empty());
        let corpus = vec![CorpusPair { name: "random".into(), input: g.clone(), reference: reference.clone() }];
        let cfg = SearchConfig { max_terms: 2, tolerance: 0, ..SearchConfig::default() };
        let report = search_rules(&corpus, &cfg).unwrap();
        let pos = report.ranking.iter().position(|r| r.0 == rule.number()).unwrap();
        prop_assert_eq!(report.ranking[pos].1, 1.0);
        // anything ranked above the planted rule reproduces it exactly
        for &(r, score) in &report.ranking[..pos] {
            prop_assert_eq!(score, 1.0);
            prop_assert_eq!(step_packed(&g, LinearRule::new(r).unwrap(), BoundaryCondition::Null), reference.clone());
        }
    }
}

#[test]
fn basics_are_the_full_window() {
    let mut seen: Vec<(i8, i8)> = basics()
        .map(|b| offset_of_basic(b).unwrap())
        .map(|o| (o.di, o.dj))
        .collect();
    seen.sort();
    let all: Vec<(i8, i8)> = (-2..=2)
        .flat_map(|di| (-2..=2).map(move |dj| (di, dj)))
        .collect();
    assert_eq!(seen, all);
}
