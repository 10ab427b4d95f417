//! Relations between the recurrence notions, checked at finite scale.

use std::sync::Arc;

use multirec_core::generators::{gcd_word, presets, Morphism, ThueMorse};
use multirec_core::morphic::{
    check_cor1, check_hyperplane, check_main_morphic, check_non_recurrent_direction, check_power,
    SurdBoundClaim,
};
use multirec_core::recurrence::{
    check_ssurdo, check_surd, check_urd, gap_report, occurrence_indices, ur_window,
    RecurrenceBudget, Verdict,
};
use multirec_core::rotation::RotationWordSpec;
use multirec_core::{
    translate_origin, Direction, Letter, Position, Size, WordSource,
};

fn fixed(phi: Morphism) -> multirec_core::generators::FixedPoint {
    let a = if phi.is_prolongable(Letter(1)) { Letter(1) } else { phi.prolongable_letters()[0] };
    Arc::new(phi).fixed_point(a).unwrap()
}

fn budget(l: u64, q: u64, s: u64, p: u64) -> RecurrenceBudget {
    RecurrenceBudget::new(l, q, s, p, 64).unwrap()
}

fn samples() -> Vec<(&'static str, Box<dyn WordSource>)> {
    vec![
        ("surd-not-ssurdo", Box::new(fixed(presets::surd_not_ssurdo_2x2()))),
        ("ssurdo", Box::new(fixed(presets::ssurdo_3x3()))),
        ("cor1", Box::new(fixed(presets::cor1_example()))),
        ("thue-morse-gcd", Box::new(gcd_word(ThueMorse, 2).unwrap())),
        ("sturmian", Box::new(RotationWordSpec::default_sturmian())),
    ]
}

#[test]
fn translated_words_keep_bounded_recurrence() {
    let b = budget(600, 3, 2, 0);
    for (name, w) in samples() {
        for px in 0..=3u64 {
            for py in 0..=3u64 {
                let p = Position(vec![px, py]);
                let t = translate_origin(&w, &p).unwrap();
                for r in check_urd(&t, &b, None).unwrap() {
                    // An occurrence of the enlarged prefix at ℓq gives one of
                    // the translated prefix at ℓq.
                    let big = Size::new(vec![px + r.size.dims()[0], py + r.size.dims()[1]]).unwrap();
                    let orig = gap_report(&w, &r.direction, &big, &Position::origin(2), b.horizon, None).unwrap();
                    if orig.verdict == Verdict::BoundedWitnessed {
                        assert_eq!(r.verdict, Verdict::BoundedWitnessed, "{name} p={p} q={}", r.direction);
                        assert!(r.max_gap <= orig.max_gap, "{name} p={p} q={} s={}", r.direction, r.size);
                    }
                }
            }
        }
    }
}

#[test]
fn ssurdo_bound_controls_ur_window() {
    let w = fixed(presets::ssurdo_3x3());
    let sums = check_ssurdo(&w, &budget(500, 1, 3, 6), None).unwrap();
    for s in sums {
        let b = s.bound.expect("bounded from every origin");
        let m = s.size.max_extent();
        let win = ur_window(&w, &s.size, 128).unwrap().expect("window found");
        assert!(win < b + m, "size {}: window {win}, SSURDO bound {b}", s.size);
    }
}

#[test]
fn rows_and_columns_of_urd_words_recur_uniformly() {
    let w = fixed(presets::surd_not_ssurdo_2x2());
    let row = Direction::new(vec![1, 0]).unwrap();
    let col = Direction::new(vec![0, 1]).unwrap();
    for k in 0..6u64 {
        for n in 1..=4u64 {
            for start in 0..12u64 {
                let r = gap_report(&w, &row, &Size::new(vec![n, 1]).unwrap(), &Position(vec![start, k]), 800, None)
                    .unwrap();
                assert_eq!(r.verdict, Verdict::BoundedWitnessed, "row {k} from {start}, n={n}");
                let c = gap_report(&w, &col, &Size::new(vec![1, n]).unwrap(), &Position(vec![k, start]), 800, None)
                    .unwrap();
                assert_eq!(c.verdict, Verdict::BoundedWitnessed, "column {k} from {start}, n={n}");
            }
        }
    }
}

#[test]
fn sufficient_conditions_are_sound() {
    let named: Vec<(&str, Morphism)> = presets::NAMES
        .iter()
        .map(|n| (*n, presets::by_name(n).unwrap()))
        .chain([("hyperplane-psi", presets::hyperplane_psi(3, 1))])
        .collect();
    let b = budget(5000, 5, 3, 0);
    let mut checked = 0;
    for (name, phi) in named {
        let a = if phi.is_prolongable(Letter(1)) { Letter(1) } else { continue };
        let claims: Vec<SurdBoundClaim> = [
            check_main_morphic(&phi, a),
            check_cor1(&phi, a),
            check_power(&phi, a, 2),
            check_hyperplane(&phi, a),
        ]
        .into_iter()
        .filter_map(|r| r.ok().and_then(|(v, c)| v.holds.then_some(c).flatten()))
        .collect();
        let w = fixed(phi.clone());
        for c in claims {
            let f = move |s: &Size| c.bound(s);
            for s in check_surd(&w, &b, Some(&f)).unwrap() {
                assert_ne!(s.verdict, Verdict::GapExceedsClaim, "{name} {c:?} size {}", s.size);
            }
            checked += 1;
        }
        for q in multirec_core::recurrence::enumerate_directions(2, 5) {
            if let Ok(v) = check_non_recurrent_direction(&phi, a, &q) {
                if v.holds {
                    let occ = occurrence_indices(&w, &q, &Size::new(vec![1, 1]).unwrap(), &Position::origin(2), 5000)
                        .unwrap();
                    assert_eq!(occ, vec![0], "{name} along {q}");
                }
            }
        }
    }
    assert!(checked >= 3, "only {checked} claims exercised");
}

#[test]
fn surd_word_loses_its_bound_at_far_origins() {
    // The SURD word without SSURDO: bounded from the origin, unbounded growth
    // from the origins (2^{n+1}-1, 2^n-1) along (1,0).
    let w = fixed(presets::surd_not_ssurdo_2x2());
    let s = check_surd(&w, &budget(2000, 4, 2, 0), None).unwrap();
    assert!(s.iter().all(|x| x.verdict == Verdict::BoundedWitnessed));
    let row = Direction::new(vec![1, 0]).unwrap();
    let one = Size::new(vec![1, 1]).unwrap();
    let mut last = 0;
    for n in 1..=5u32 {
        let p = Position(vec![(1 << (n + 1)) - 1, (1 << n) - 1]);
        let r = gap_report(&w, &row, &one, &p, 2000, None).unwrap();
        let g = r.max_gap.unwrap();
        assert!(g > last, "gap from {p} is {g}");
        last = g;
    }
}
