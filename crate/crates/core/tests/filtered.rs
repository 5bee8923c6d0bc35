use padic_hodge::filtered::{
    FilteredDieudonneModule, FilteredIsocrystal, FilteredSpec, Filtration, Quotient, Verdict, WitnessKind,
};
use padic_hodge::fixtures::{random_admissible, random_positive_candidate, rank_one, unit_object};
use padic_hodge::isocrystal::{simple_isocrystal, Isocrystal, PMatrix};
use padic_hodge::linalg::Matrix;
use padic_hodge::padic::{make_context, Context, PadicScalar, Rational};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ctx(p: u64) -> Context {
    make_context(p, 1, 16).unwrap()
}

fn cols(c: &Context, dim: usize, vs: &[&[i64]]) -> PMatrix {
    let v: Vec<Vec<PadicScalar>> =
        vs.iter().map(|v| v.iter().map(|&a| PadicScalar::from_int(c, a)).collect()).collect();
    Matrix::from_columns(c, dim, &v)
}

/// t_H on W for a filtration with Fil^0 = N: sum over i >= 1 of dim(Fil^i cap W).
fn hodge_by_meets(f: &FilteredIsocrystal, w: &PMatrix) -> i64 {
    let (_, hi) = f.filtration().range();
    (1..=hi)
        .map(|i| {
            let fi = f.filtration().fil(i);
            if fi.cols() == 0 {
                0
            } else {
                (fi.cols() + w.cols() - fi.hstack(w).unwrap().rank()) as i64
            }
        })
        .sum()
}

/// t_N on an F-stable W from the slopes of the restricted Frobenius.
fn newton_by_slopes(f: &FilteredIsocrystal, w: &PMatrix) -> Rational {
    let image = f.base().apply_columns(w).unwrap();
    let a = w.solve(&image).unwrap().expect("witness is F-stable");
    Isocrystal::new(a).unwrap().slopes().unwrap().newton_number()
}

fn assert_witness(f: &FilteredIsocrystal) {
    match f.weak_admissibility().unwrap() {
        Verdict::NotAdmissible(w) => {
            let stable = f.frobenius_span(&w.basis).unwrap();
            assert_eq!(stable.cols(), w.basis.cols(), "witness must be F-stable");
            let t_n = newton_by_slopes(f, &w.basis);
            let t_h = hodge_by_meets(f, &w.basis);
            assert_eq!(t_n, w.newton_number);
            assert_eq!(t_h, w.hodge_number);
            match w.kind {
                WitnessKind::TotalMismatch => assert_ne!(t_n, Rational::from_integer(t_h)),
                WitnessKind::Subobject => assert!(t_n < Rational::from_integer(t_h)),
            }
        }
        v => panic!("expected a witness, got {v:?}"),
    }
}

#[test]
fn hodge_numbers_of_small_filtrations() {
    let c = ctx(5);
    assert_eq!(unit_object(&c).unwrap().hodge_number(), 0);
    assert_eq!(rank_one(&c, 1, true).unwrap().hodge_number(), 1);
    let fil = Filtration::new(
        &c,
        3,
        vec![
            (0, Matrix::identity(&c, 3)),
            (1, cols(&c, 3, &[&[1, 0, 0], &[0, 1, 0]])),
            (2, cols(&c, 3, &[&[1, 0, 0]])),
        ],
    )
    .unwrap();
    assert_eq!(fil.weights(), vec![0, 1, 2]);
    assert_eq!(fil.graded_dims(), vec![(0, 1), (1, 1), (2, 1)]);
    let f = FilteredIsocrystal::new(Isocrystal::diagonal_powers(&c, &[0, 1, 2]).unwrap(), fil).unwrap();
    assert_eq!(f.hodge_number(), 3);
    assert_eq!(f.hodge_polygon().render(), "(0,0),(1,0),(2,1),(3,3)");
}

#[test]
fn hodge_polygon_with_a_negative_jump() {
    let c = ctx(3);
    let fil = Filtration::new(&c, 2, vec![(-1, Matrix::identity(&c, 2)), (2, cols(&c, 2, &[&[0, 1]]))]).unwrap();
    assert_eq!(fil.weights(), vec![-1, 2]);
    let f = FilteredIsocrystal::new(Isocrystal::diagonal_powers(&c, &[0, 0]).unwrap(), fil).unwrap();
    assert_eq!(f.hodge_polygon().render(), "(0,0),(1,-1),(2,1)");
    assert_eq!(f.hodge_number(), 1);
}

#[test]
fn unit_object_is_admissible() {
    for p in [2, 3, 5, 7] {
        let c = ctx(p);
        assert!(unit_object(&c).unwrap().weak_admissibility().unwrap().is_admissible());
    }
}

#[test]
fn sigma_with_full_fil1_fails_with_a_checked_witness() {
    let c = ctx(5);
    let f = rank_one(&c, 0, true).unwrap();
    assert_witness(&f);
}

#[test]
fn p_sigma_with_full_fil1_is_admissible() {
    let c = ctx(5);
    assert!(rank_one(&c, 1, true).unwrap().weak_admissibility().unwrap().is_admissible());
    assert!(!rank_one(&c, 2, true).unwrap().weak_admissibility().unwrap().is_admissible());
}

#[test]
fn ordinary_line_witnesses() {
    let c = ctx(7);
    let n = Isocrystal::diagonal_powers(&c, &[0, 1]).unwrap();
    // Fil^1 on the unit-root line: that line is a sub-object with t_N = 0 < 1 = t_H
    let bad =
        FilteredIsocrystal::new(n.clone(), Filtration::two_step(&c, 2, cols(&c, 2, &[&[1, 0]])).unwrap()).unwrap();
    assert_witness(&bad);
    let good =
        FilteredIsocrystal::new(n.clone(), Filtration::two_step(&c, 2, cols(&c, 2, &[&[2, 3]])).unwrap()).unwrap();
    assert!(good.weak_admissibility().unwrap().is_admissible());
    let slope_one_line =
        FilteredIsocrystal::new(n, Filtration::two_step(&c, 2, cols(&c, 2, &[&[0, 1]])).unwrap()).unwrap();
    assert!(slope_one_line.weak_admissibility().unwrap().is_admissible());
}

#[test]
fn frobenius_span_examples() {
    let c = ctx(3);
    let s = simple_isocrystal(&c, 3, 1).unwrap();
    let f = FilteredIsocrystal::new(s, Filtration::two_step(&c, 3, cols(&c, 3, &[&[1, 0, 0]])).unwrap()).unwrap();
    assert!(f.frobenius_span_check().unwrap());
    let n = Isocrystal::diagonal_powers(&c, &[1, 1]).unwrap();
    let line = FilteredIsocrystal::new(n, Filtration::two_step(&c, 2, cols(&c, 2, &[&[1, 1]])).unwrap()).unwrap();
    assert!(!line.frobenius_span_check().unwrap());
    let wide = FilteredIsocrystal::new(
        Isocrystal::diagonal_powers(&c, &[0]).unwrap(),
        Filtration::new(&c, 1, vec![(2, Matrix::identity(&c, 1))]).unwrap(),
    )
    .unwrap();
    assert!(wide.frobenius_span_check().is_err());
}

#[test]
fn filtration_validation() {
    let c = ctx(5);
    assert!(Filtration::new(&c, 2, vec![(0, cols(&c, 2, &[&[1, 0]])), (1, cols(&c, 2, &[&[0, 1]]))]).is_err());
    assert!(Filtration::new(&c, 2, vec![(1, cols(&c, 2, &[&[1, 2], &[2, 4]]))]).is_err());
    assert!(Filtration::new(&c, 2, vec![(1, cols(&c, 3, &[&[1, 0, 0]]))]).is_err());
}

#[test]
fn spec_round_trip() {
    let json = r#"{"p": 5, "n": 1, "precision": 12, "dim": 2,
        "frobenius": [["1", "0"], ["0", "5"]],
        "filtration": {"0": [["1", "0"], ["0", "1"]], "1": [["1", "1"]]}}"#;
    let spec: FilteredSpec = serde_json::from_str(json).unwrap();
    let f = FilteredIsocrystal::from_spec(&spec).unwrap();
    assert!(f.weak_admissibility().unwrap().is_admissible());
    let again = FilteredSpec::from_parts(f.base(), f.filtration(), false);
    let g = FilteredIsocrystal::from_spec(&again).unwrap();
    assert_eq!(g.hodge_number(), 1);
    assert_eq!(g.filtration().weights(), vec![0, 1]);
    let bad = json.replace("\"dim\": 2", "\"dim\": 2, \"extra\": 0");
    assert!(serde_json::from_str::<FilteredSpec>(&bad).is_err());
    let ramified = json.replace("\"dim\": 2", "\"dim\": 2, \"ramification\": 2");
    assert!(FilteredIsocrystal::from_spec(&serde_json::from_str(&ramified).unwrap()).is_err());
}

fn module(c: &Context, exps: &[i64], d0: &[usize]) -> FilteredDieudonneModule {
    let d = exps.len();
    let fil = if d0.len() == d {
        Filtration::trivial(c, d)
    } else {
        let v: Vec<Vec<i64>> = d0.iter().map(|&i| (0..d).map(|r| (r == i) as i64).collect()).collect();
        let refs: Vec<&[i64]> = v.iter().map(|x| x.as_slice()).collect();
        Filtration::new(c, d, vec![(0, cols(c, d, &refs))]).unwrap()
    };
    FilteredDieudonneModule::new(Isocrystal::diagonal_powers(c, exps).unwrap(), fil).unwrap()
}

#[test]
fn h0_h1_examples() {
    let c = ctx(5);
    let unit = module(&c, &[0], &[0]);
    assert_eq!(unit.h0().unwrap(), Quotient { free_rank: 1, torsion: vec![] });
    assert_eq!(unit.h1().unwrap(), Quotient { free_rank: 1, torsion: vec![] });
    let tate = module(&c, &[1], &[0]);
    assert_eq!(tate.h0().unwrap(), Quotient { free_rank: 0, torsion: vec![] });
    assert_eq!(tate.h1().unwrap().to_string(), "0");
    // F = (1 + p) sigma: 1 - F = -p, so h^1 = Z/p
    let base = Isocrystal::from_rows(&c, vec![vec![PadicScalar::from_int(&c, 6)]]).unwrap();
    let m = FilteredDieudonneModule::new(base, Filtration::trivial(&c, 1)).unwrap();
    assert_eq!(m.h1().unwrap(), Quotient { free_rank: 0, torsion: vec![1] });
    assert_eq!(m.h1().unwrap().to_string(), "Z/p^1");
    // F = 10 sigma over W(F_9) with sigma(g) = -g: 1 - F is -9 on 1 and 11 on g
    let c2 = make_context(3, 2, 12).unwrap();
    let base = Isocrystal::from_rows(&c2, vec![vec![PadicScalar::from_int(&c2, 10)]]).unwrap();
    let m = FilteredDieudonneModule::new(base, Filtration::trivial(&c2, 1)).unwrap();
    assert_eq!(m.h1().unwrap(), Quotient { free_rank: 0, torsion: vec![2] });
}

#[test]
fn exp_d_kernel_for_ordinary_module() {
    let c = ctx(5);
    // F = diag(1, p) sigma, D^0 = span(e2)
    let x = module(&c, &[0, 1], &[1]).exp_d().unwrap();
    assert_eq!((x.source_dim, x.target_dim, x.rank, x.kernel_dim), (1, 1, 0, 1));
    assert!(!x.surjective);
}

#[test]
fn dieudonne_rejects_non_integral_frobenius() {
    let c = ctx(5);
    let base = Isocrystal::diagonal_powers(&c, &[-1]).unwrap();
    assert!(FilteredDieudonneModule::new(base, Filtration::trivial(&c, 1)).is_err());
}

/// exp_D dims for F = diag(p^k_i) sigma over Z_p with D^0 spanned by the
/// coordinate vectors in `d0`, by hand: (1 - F) e_j = (1 - p^k_j) e_j.
fn exp_d_oracle(exps: &[i64], d0: &[usize]) -> (usize, usize, usize) {
    let d = exps.len();
    let image: Vec<usize> = d0.iter().copied().filter(|&j| exps[j] != 0).collect();
    let source: Vec<usize> = (0..d).filter(|i| !d0.contains(i)).collect();
    let target: Vec<usize> = (0..d).filter(|i| !image.contains(i)).collect();
    let rank = source.iter().filter(|&&i| exps[i] != 0 && target.contains(&i)).count();
    (source.len(), target.len(), rank)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exp_d_matches_coordinate_oracle(exps in prop::collection::vec(0i64..3, 1..4), mask in 0usize..8) {
        let c = ctx(3);
        let d0: Vec<usize> = (0..exps.len()).filter(|i| mask >> i & 1 == 1).collect();
        let x = module(&c, &exps, &d0).exp_d().unwrap();
        let (s, t, r) = exp_d_oracle(&exps, &d0);
        prop_assert_eq!((x.source_dim, x.target_dim, x.rank), (s, t, r));
        prop_assert_eq!(x.kernel_dim, s - r);
        prop_assert_eq!(x.surjective, r == t);
    }

    #[test]
    fn hodge_and_newton_numbers_add(seed in any::<u64>()) {
        let c = ctx(5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_positive_candidate(&c, &mut rng, 3).unwrap();
        let b = random_positive_candidate(&c, &mut rng, 3).unwrap();
        let s = a.direct_sum(&b).unwrap();
        prop_assert_eq!(s.hodge_number(), a.hodge_number() + b.hodge_number());
        prop_assert_eq!(s.newton_number().unwrap(), a.newton_number().unwrap() + b.newton_number().unwrap());
        prop_assert_eq!(s.hodge_number(), hodge_by_meets(&s, &Matrix::identity(&c, s.dim())));
    }

    #[test]
    fn admissible_positive_instances_span(seed in any::<u64>()) {
        let c = ctx(3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for f in random_admissible(&c, &mut rng, 3, 4).unwrap() {
            prop_assert!(f.frobenius_span_check().unwrap());
        }
    }

    #[test]
    fn witnesses_are_genuine(seed in any::<u64>()) {
        let c = ctx(5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_positive_candidate(&c, &mut rng, 4).unwrap();
        if let Verdict::NotAdmissible(_) = f.weak_admissibility().unwrap() {
            assert_witness(&f);
        }
    }
}
