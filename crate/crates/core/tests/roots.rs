use proptest::prelude::*;
use tiltalloc::poly::{
    buchberger, BuchbergerConfig, Monomial, MonomialOrder, PolySystem, Polynomial,
};
use tiltalloc::zerodim::{normal_set, solve_roots, Matrix, MultiplicationMatrices, SolveOptions};
use tiltalloc::Rational;

/// `a . x + c` with integer coefficients.
fn linear(a: &[i64], c: i64) -> Polynomial<Rational> {
    let n = a.len();
    let mut terms: Vec<(Monomial, Rational)> = a
        .iter()
        .enumerate()
        .map(|(i, &ai)| {
            let mut e = vec![0; n];
            e[i] = 1;
            (Monomial::new(e), Rational::from_integer(ai.into()))
        })
        .collect();
    terms.push((Monomial::new(vec![0; n]), Rational::from_integer(c.into())));
    Polynomial::from_terms(n, terms).unwrap()
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Cramer solution of `rows . x = -c`; `None` when nearly singular.
fn intersect(rows: &[(Vec<i64>, i64)]) -> Option<Vec<f64>> {
    let n = rows.len();
    let mut m = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for (i, (a, c)) in rows.iter().enumerate() {
        for j in 0..n {
            m[i][j] = a[j] as f64;
        }
        b[i] = -(*c as f64);
    }
    // pad to 3 x 3 with identity rows
    for (i, row) in m.iter_mut().enumerate().skip(n) {
        row[i] = 1.0;
    }
    let d = det3(m);
    if d.abs() < 0.5 {
        return None;
    }
    Some(
        (0..n)
            .map(|j| {
                let mut mj = m;
                for i in 0..3 {
                    mj[i][j] = if i < n { b[i] } else { 0.0 };
                }
                det3(mj) / d
            })
            .collect(),
    )
}

fn product(a: &Matrix<Rational>, b: &Matrix<Rational>) -> Vec<Vec<Rational>> {
    (0..a.rows())
        .map(|i| {
            (0..b.cols())
                .map(|j| (0..a.cols()).map(|k| &a[(i, k)] * &b[(k, j)]).sum())
                .collect()
        })
        .collect()
}

/// Solves `polys` and checks that every expected point is recovered and that
/// every returned root satisfies the system.
fn check(polys: Vec<Polynomial<Rational>>, expected: &[Vec<f64>]) -> Result<(), TestCaseError> {
    let n = polys[0].nvars();
    let names = (0..n).map(|i| format!("x{i}")).collect();
    let sys = PolySystem::new(polys, names).unwrap();
    let gb = buchberger(
        &sys,
        &MonomialOrder::grevlex(n),
        &BuchbergerConfig::default(),
    )
    .unwrap();
    let ns = normal_set(&gb).unwrap();
    prop_assert_eq!(ns.len(), expected.len());
    let mats = MultiplicationMatrices::build(&gb, &ns).unwrap();
    for a in &mats.matrices {
        for b in &mats.matrices {
            prop_assert!(
                product(a, b) == product(b, a),
                "multiplication matrices do not commute"
            );
        }
    }
    let float = sys.to_f64();
    let solved = solve_roots(&ns, &mats.to_f64(), &float, &SolveOptions::default()).unwrap();
    for r in &solved.roots {
        let bound = 1e-6
            * (1.0
                + float
                    .polys
                    .iter()
                    .map(|p| p.coeff_norm1())
                    .fold(0.0, f64::max));
        prop_assert!(
            r.residual <= bound,
            "residual {} above {}",
            r.residual,
            bound
        );
    }
    for p in expected {
        let hit = solved.roots.iter().any(|r| {
            r.coords
                .iter()
                .zip(p)
                .all(|(c, x)| (c.re - x).abs() <= 1e-8 * (1.0 + x.abs()) && c.im.abs() <= 1e-8)
        });
        prop_assert!(
            hit,
            "missing root {:?} in {:?}",
            p,
            solved.roots.iter().map(|r| &r.coords).collect::<Vec<_>>()
        );
    }
    Ok(())
}

fn well_separated(points: &[Vec<f64>]) -> bool {
    points.iter().enumerate().all(|(i, p)| {
        points[i + 1..].iter().all(|q| {
            p.iter()
                .zip(q)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                > 1e-2
        })
    })
}

fn form(n: usize) -> impl Strategy<Value = (Vec<i64>, i64)> {
    (prop::collection::vec(-5i64..=5, n), -6i64..=6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn two_products_in_the_plane(l in prop::collection::vec(form(2), 4)) {
        // (l0 l1, l2 l3) vanishes on the four pairwise intersections
        let pts: Option<Vec<Vec<f64>>> = [(0, 2), (0, 3), (1, 2), (1, 3)]
            .iter()
            .map(|&(i, j)| intersect(&[l[i].clone(), l[j].clone()]))
            .collect();
        let pts = pts.filter(|p| well_separated(p));
        prop_assume!(pts.is_some());
        let lin = |k: usize| linear(&l[k].0, l[k].1);
        check(vec![lin(0).mul(&lin(1)).unwrap(), lin(2).mul(&lin(3)).unwrap()], &pts.unwrap())?;
    }

    #[test]
    fn product_and_line_in_the_plane(l in prop::collection::vec(form(2), 3)) {
        let pts: Option<Vec<Vec<f64>>> =
            [(0, 2), (1, 2)].iter().map(|&(i, j)| intersect(&[l[i].clone(), l[j].clone()])).collect();
        let pts = pts.filter(|p| well_separated(p));
        prop_assume!(pts.is_some());
        let lin = |k: usize| linear(&l[k].0, l[k].1);
        check(vec![lin(0).mul(&lin(1)).unwrap(), lin(2)], &pts.unwrap())?;
    }

    #[test]
    fn products_in_space(l in prop::collection::vec(form(3), 5)) {
        // (l0 l1, l2 l3, l4): four points
        let pts: Option<Vec<Vec<f64>>> = [(0, 2), (0, 3), (1, 2), (1, 3)]
            .iter()
            .map(|&(i, j)| intersect(&[l[i].clone(), l[j].clone(), l[4].clone()]))
            .collect();
        let pts = pts.filter(|p| well_separated(p));
        prop_assume!(pts.is_some());
        let lin = |k: usize| linear(&l[k].0, l[k].1);
        check(vec![lin(0).mul(&lin(1)).unwrap(), lin(2).mul(&lin(3)).unwrap(), lin(4)], &pts.unwrap())?;
    }
}

#[test]
fn single_point() {
    check(
        vec![linear(&[1, 0], -3), linear(&[0, 1], 2)],
        &[vec![3.0, -2.0]],
    )
    .unwrap();
}
