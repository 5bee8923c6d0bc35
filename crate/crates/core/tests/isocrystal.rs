use padic_hodge::fixtures;
use padic_hodge::isocrystal::{
    dieudonne_dual_slopes, newton_polygon_of_poly, simple_isocrystal, Isocrystal, NewtonPolygon, PMatrix, SlopeData,
};
use padic_hodge::linalg::Matrix;
use padic_hodge::padic::{make_context, Context, PadicScalar, Rational};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn s(ctx: &Context, a: i64) -> PadicScalar {
    PadicScalar::from_int(ctx, a)
}

fn poly(ctx: &Context, coeffs: &[i64]) -> Vec<PadicScalar> {
    coeffs.iter().map(|&c| s(ctx, c)).collect()
}

fn vertices(np: &NewtonPolygon) -> Vec<(Rational, Rational)> {
    np.vertices().to_vec()
}

fn int_vertices(v: &[(i64, i64)]) -> Vec<(Rational, Rational)> {
    v.iter().map(|&(x, y)| (q(x, 1), q(y, 1))).collect()
}

/// Gaussian integers a + b i as pairs, for an independent determinant.
fn gauss_mul(x: (i64, i64), y: (i64, i64)) -> (i64, i64) {
    (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0)
}

#[test]
fn katz_slopes_and_single_basis_charpoly() {
    for p in [3u64, 7, 11] {
        let n = fixtures::katz(p, 20).unwrap();
        assert_eq!(n.slopes().unwrap(), SlopeData::from_pairs([(q(0, 1), 1), (q(1, 1), 1)]));
        let pi = p as i64;
        // det of [[p-1, (p+1)i], [(p+1)i, -(p-1)]] with trace 0
        let ad = gauss_mul((pi - 1, 0), (-(pi - 1), 0));
        let bc = gauss_mul((0, pi + 1), (0, pi + 1));
        let det = (ad.0 - bc.0, ad.1 - bc.1);
        assert_eq!(det, (4 * pi, 0));
        let cp = n.matrix().charpoly().unwrap();
        assert_eq!(cp, poly(n.context(), &[1, 0, 4 * pi]));
        let np = newton_polygon_of_poly(&cp).unwrap();
        assert_eq!(np.slopes(), SlopeData::from_pairs([(q(1, 2), 2)]));
        // the polygon of the linearized Frobenius has slopes 0 and 2 before dividing by n = 2
        let phi = newton_polygon_of_poly(&n.charpoly().unwrap()).unwrap();
        assert_eq!(phi.slopes(), SlopeData::from_pairs([(q(0, 1), 1), (q(2, 1), 1)]));
        let parts = n.isoclinic_decomposition().unwrap();
        let got: Vec<(Rational, usize)> = parts.iter().map(|x| (x.slope, x.isocrystal.dim())).collect();
        assert_eq!(got, vec![(q(0, 1), 1), (q(1, 1), 1)]);
    }
}

#[test]
fn linearize_is_a_for_degree_one() {
    let ctx = make_context(5, 1, 10).unwrap();
    let n = Isocrystal::diagonal_powers(&ctx, &[1, 0]).unwrap();
    assert!(n.linearize().unwrap().sub(n.matrix()).unwrap().is_zero());
    assert_eq!(n.slopes().unwrap(), SlopeData::from_pairs([(q(0, 1), 1), (q(1, 1), 1)]));
}

#[test]
fn polynomial_polygons() {
    let ctx = make_context(3, 1, 12).unwrap();
    let katz = newton_polygon_of_poly(&poly(&ctx, &[1, 0, -12])).unwrap();
    assert_eq!(vertices(&katz), vec![(q(0, 1), q(0, 1)), (q(2, 1), q(1, 1))]);
    for d in 1..5 {
        let mut c = vec![0i64; d + 1];
        c[0] = 1;
        c[d] = -1;
        assert_eq!(newton_polygon_of_poly(&poly(&ctx, &c)).unwrap().slopes(), SlopeData::from_pairs([(q(0, 1), d)]));
    }
    // (x - 3)(x - 9) = x^2 - 12 x + 27
    assert_eq!(
        newton_polygon_of_poly(&poly(&ctx, &[1, -12, 27])).unwrap().slopes(),
        SlopeData::from_pairs([(q(1, 1), 1), (q(2, 1), 1)])
    );
}

#[test]
fn rank_one_slopes() {
    let ctx = make_context(7, 2, 10).unwrap();
    assert_eq!(
        Isocrystal::diagonal_powers(&ctx, &[0]).unwrap().slopes().unwrap(),
        SlopeData::from_pairs([(q(0, 1), 1)])
    );
    assert_eq!(
        Isocrystal::diagonal_powers(&ctx, &[1]).unwrap().slopes().unwrap(),
        SlopeData::from_pairs([(q(1, 1), 1)])
    );
}

/// Char poly of N_{3,2} is x^3 - p^2: companion matrix of F with n = 1.
#[test]
fn simple_isocrystal_examples() {
    let ctx = make_context(5, 1, 10).unwrap();
    assert_eq!(simple_isocrystal(&ctx, 1, 0).unwrap().slopes().unwrap(), SlopeData::from_pairs([(q(0, 1), 1)]));
    assert_eq!(simple_isocrystal(&ctx, 2, 1).unwrap().slopes().unwrap(), SlopeData::from_pairs([(q(1, 2), 2)]));
    let n32 = simple_isocrystal(&ctx, 3, 2).unwrap();
    assert_eq!(n32.charpoly().unwrap(), poly(&ctx, &[1, 0, 0, -25]));
    assert_eq!(n32.slopes().unwrap(), SlopeData::from_pairs([(q(2, 3), 3)]));
    assert_eq!(n32.newton_number().unwrap(), q(2, 1));
    assert!(simple_isocrystal(&ctx, 4, 2).is_err());
}

#[test]
fn sums_tensors_duals() {
    let ctx = make_context(3, 2, 12).unwrap();
    let ord = fixtures::ordinary_elliptic(&ctx).unwrap();
    assert_eq!(ord.slopes().unwrap(), SlopeData::from_pairs([(q(0, 1), 1), (q(1, 1), 1)]));
    assert_eq!(vertices(&ord.newton_polygon().unwrap()), int_vertices(&[(0, 0), (1, 0), (2, 1)]));
    assert_eq!(ord.newton_polygon().unwrap().render(), "(0,0),(1,0),(2,1)");
    let n21 = simple_isocrystal(&ctx, 2, 1).unwrap();
    assert_eq!(n21.dual().unwrap().dual().unwrap().slopes().unwrap(), n21.slopes().unwrap());
    assert_eq!(
        n21.tensor(&simple_isocrystal(&ctx, 1, 1).unwrap()).unwrap().slopes().unwrap(),
        SlopeData::from_pairs([(q(3, 2), 2)])
    );
    let id3 = Isocrystal::diagonal_powers(&ctx, &[0, 0, 0]).unwrap();
    assert_eq!(vertices(&id3.newton_polygon().unwrap()), int_vertices(&[(0, 0), (3, 0)]));
    let twice = n21.direct_sum(&n21).unwrap();
    assert_eq!(vertices(&twice.newton_polygon().unwrap()), int_vertices(&[(0, 0), (4, 2)]));
}

#[test]
fn zero_dimensional_polygon() {
    let ctx = make_context(3, 1, 5).unwrap();
    let z = Isocrystal::zero_dimensional(&ctx);
    assert_eq!(z.newton_polygon().unwrap().render(), "(0,0)");
}

#[test]
fn dual_slope_sequences() {
    let sym = SlopeData::from_pairs([(q(0, 1), 1), (q(1, 1), 1)]);
    assert_eq!(dieudonne_dual_slopes(&sym).unwrap(), sym);
    let ss = SlopeData::from_pairs([(q(1, 2), 2)]);
    assert_eq!(dieudonne_dual_slopes(&ss).unwrap(), ss);
    assert_eq!(
        dieudonne_dual_slopes(&SlopeData::from_pairs([(q(1, 3), 3)])).unwrap(),
        SlopeData::from_pairs([(q(2, 3), 3)])
    );
    assert!(dieudonne_dual_slopes(&SlopeData::from_pairs([(q(3, 2), 1)])).is_err());
}

#[test]
fn decomposition_shapes() {
    let ctx = make_context(5, 1, 12).unwrap();
    let iso = simple_isocrystal(&ctx, 2, 1).unwrap();
    let parts = iso.isoclinic_decomposition().unwrap();
    assert_eq!(parts.len(), 1);
    assert!(parts[0].isocrystal.matrix().sub(iso.matrix()).unwrap().is_zero());
    let n = Isocrystal::diagonal_powers(&ctx, &[0, 1, 1]).unwrap();
    let dims: Vec<usize> = n.isoclinic_decomposition().unwrap().iter().map(|x| x.isocrystal.dim()).collect();
    assert_eq!(dims, vec![1, 2]);
}

fn random_invertible(ctx: &Context, d: usize, seed: u64) -> PMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let m = Matrix::from_fn(ctx, d, d, |_, _| PadicScalar::random_integral(ctx, &mut rng));
        if m.det().unwrap().valuation() == Some(0) {
            return m;
        }
    }
}

/// Block sums of simple objects with distinct slopes.
fn simple_sum(ctx: &Context, pieces: &[(usize, i64)]) -> Isocrystal {
    pieces.iter().fold(Isocrystal::zero_dimensional(ctx), |acc, &(r, d)| {
        acc.direct_sum(&simple_isocrystal(ctx, r, d).unwrap()).unwrap()
    })
}

fn pieces() -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec(
        prop::sample::select(vec![(1usize, 0i64), (1, 1), (2, 1), (1, 2), (3, 1), (3, 2), (2, -1)]),
        1..=3,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn slopes_are_basis_invariant(pcs in pieces(), seed in any::<u64>(), n in 1usize..=2) {
        let ctx = make_context(3, n, 16).unwrap();
        let iso = simple_sum(&ctx, &pcs);
        let changed = iso.change_basis(&random_invertible(&ctx, iso.dim(), seed)).unwrap();
        let sl = iso.slopes().unwrap();
        prop_assert_eq!(changed.slopes().unwrap(), sl.clone());
        prop_assert_eq!(sl.dim(), iso.dim());
        prop_assert_eq!(*sl.newton_number().denom(), 1);
    }

    #[test]
    fn slope_laws(a in pieces(), b in pieces()) {
        let ctx = make_context(5, 1, 14).unwrap();
        let (x, y) = (simple_sum(&ctx, &a), simple_sum(&ctx, &b));
        prop_assert_eq!(x.direct_sum(&y).unwrap().slopes().unwrap(), x.slopes().unwrap().union(&y.slopes().unwrap()));
        prop_assert_eq!(x.dual().unwrap().slopes().unwrap(), x.slopes().unwrap().negate());
    }

    #[test]
    fn isoclinic_tensor_adds_slopes(i in 0usize..4, j in 0usize..4) {
        let simples = [(1usize, 0i64), (2, 1), (1, 1), (3, 1)];
        let ctx = make_context(3, 1, 16).unwrap();
        let (x, y) = (simple_sum(&ctx, &[simples[i]]), simple_sum(&ctx, &[simples[j]]));
        let t = x.tensor(&y).unwrap().slopes().unwrap();
        let expected = q(simples[i].1, simples[i].0 as i64) + q(simples[j].1, simples[j].0 as i64);
        prop_assert_eq!(t, SlopeData::from_pairs([(expected, x.dim() * y.dim())]));
    }

    #[test]
    fn decomposition_restricts_frobenius(pcs in pieces(), seed in any::<u64>()) {
        let ctx = make_context(3, 2, 80).unwrap();
        let iso = simple_sum(&ctx, &pcs).change_basis(&random_invertible(&ctx, simple_sum(&ctx, &pcs).dim(), seed)).unwrap();
        let parts = iso.isoclinic_decomposition().unwrap();
        let mut polygon = SlopeData::default();
        for part in &parts {
            let lhs = iso.apply_columns(&part.basis).unwrap();
            let rhs = part.basis.mul(part.isocrystal.matrix()).unwrap();
            prop_assert!(lhs.sub(&rhs).unwrap().is_zero());
            let sl = part.isocrystal.slopes().unwrap();
            prop_assert!(sl.is_isoclinic());
            polygon = polygon.union(&sl);
        }
        prop_assert_eq!(polygon, iso.slopes().unwrap());
    }
}
