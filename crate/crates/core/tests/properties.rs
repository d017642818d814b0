use proptest::prelude::*;
use quasifit_core::estimator::{fit, fit_isotonic, predict};
use quasifit_core::feasibility::{check, separation_certificate};
use quasifit_core::geometry::{hull_support, HullKind};
use quasifit_core::numeric::{project_order, solve_qp, QpProblem, Status};
use quasifit_core::oracle::brute_force;
use quasifit_core::synth::psi;
use quasifit_core::{in_hull, in_lower_hull, in_upper_hull, DataSet, Monotonicity, PointSet, ShapeSpec, SolverParams};

fn points(n: std::ops::RangeInclusive<usize>, d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-2.0f64..2.0, d), n)
}

fn dataset(n: std::ops::RangeInclusive<usize>, d: usize) -> impl Strategy<Value = DataSet> {
    points(n, d).prop_flat_map(|rows| {
        let n = rows.len();
        prop::collection::vec(-2.0f64..2.0, n).prop_map(move |y| DataSet::from_rows(&rows, y).unwrap())
    })
}

fn shape() -> impl Strategy<Value = ShapeSpec> {
    prop::sample::select(ShapeSpec::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qp_solution_beats_feasible_perturbations(
        target in prop::collection::vec(-3.0f64..3.0, 4),
        w in prop::collection::vec(0.5f64..2.0, 4),
        rows in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 0..4),
        steps in prop::collection::vec(prop::collection::vec(-0.3f64..0.3, 4), 20),
    ) {
        let mut qp = QpProblem::least_squares(&target, &w);
        for k in 0..4 {
            qp.bounds(k, -1.0, 1.0);
        }
        for r in &rows {
            qp.leq(r, 0.5);
        }
        // The origin is feasible, so the problem is too.
        let res = solve_qp(&qp).unwrap();
        prop_assert_eq!(res.status, Status::Optimal);
        prop_assert!(qp.max_violation(&res.x) < 1e-8);
        let best = qp.objective(&res.x);
        for s in &steps {
            let y: Vec<f64> = res.x.iter().zip(s).map(|(a, b)| a + b).collect();
            if qp.max_violation(&y) <= 0.0 {
                prop_assert!(qp.objective(&y) >= best - 1e-9);
            }
        }
    }

    #[test]
    fn upper_hull_is_upward_closed_and_nested(
        rows in points(1..=6, 2),
        p in prop::collection::vec(-2.0f64..2.0, 2),
        shift in prop::collection::vec(0.0f64..1.0, 2),
    ) {
        let s = PointSet::from_rows(&rows).unwrap();
        let q: Vec<f64> = p.iter().zip(&shift).map(|(a, b)| a + b).collect();
        if in_upper_hull(&p, &s).unwrap() {
            prop_assert!(in_upper_hull(&q, &s).unwrap());
        }
        let prefix = PointSet::from_rows(&rows[..rows.len().div_ceil(2)]).unwrap();
        if in_upper_hull(&p, &prefix).unwrap() {
            prop_assert!(in_upper_hull(&p, &s).unwrap());
        }
        if in_hull(&p, &s).unwrap() {
            prop_assert!(in_upper_hull(&p, &s).unwrap() && in_lower_hull(&p, &s).unwrap());
        }
    }

    #[test]
    fn lower_hull_mirrors_upper_hull(rows in points(1..=6, 3), p in prop::collection::vec(-2.0f64..2.0, 3)) {
        let s = PointSet::from_rows(&rows).unwrap();
        let neg: Vec<f64> = p.iter().map(|v| -v).collect();
        prop_assert_eq!(in_lower_hull(&p, &s).unwrap(), in_upper_hull(&neg, &s.negated()).unwrap());
    }

    #[test]
    fn convex_combinations_are_members(rows in points(2..=6, 2), raw in prop::collection::vec(0.01f64..1.0, 6)) {
        let s = PointSet::from_rows(&rows).unwrap();
        let lam: Vec<f64> = raw[..rows.len()].to_vec();
        let total: f64 = lam.iter().sum();
        let p: Vec<f64> = (0..2).map(|k| rows.iter().zip(&lam).map(|(r, l)| r[k] * l / total).sum()).collect();
        let all: Vec<usize> = (0..rows.len()).collect();
        let support = hull_support(&p, &s, &all, HullKind::Plain).unwrap();
        prop_assert!(support.is_some());
        prop_assert!(support.unwrap().len() <= 3);
    }

    #[test]
    fn membership_agrees_with_separation(
        rows in points(2..=6, 2),
        levels in prop::collection::vec(0u8..3, 6),
        s in shape(),
    ) {
        let x = PointSet::from_rows(&rows).unwrap();
        let z: Vec<f64> = levels[..rows.len()].iter().map(|&v| f64::from(v)).collect();
        let by_hull = check(&z, &x, s).unwrap().feasible;
        let by_sep = separation_certificate(&z, &x, s, 1e-9).unwrap().is_some();
        prop_assert_eq!(by_hull, by_sep);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fit_matches_oracle_and_is_feasible(data in dataset(1..=5, 2), s in shape()) {
        let m = fit(&data, s, &SolverParams::default()).unwrap();
        prop_assert!(check(&m.fitted, &data.x, s).unwrap().feasible);
        let o = brute_force(&data, s).unwrap();
        prop_assert!((m.stats.objective - o.objective).abs() < 1e-6,
            "solver {} oracle {}", m.stats.objective, o.objective);
        for (i, p) in data.x.iter().enumerate() {
            prop_assert_eq!(predict(&m, p).unwrap(), m.fitted[i]);
        }
    }

    #[test]
    fn oracle_is_permutation_invariant(data in dataset(2..=4, 2), s in shape(), rot in 1usize..4) {
        let n = data.len();
        let idx: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        let permuted = DataSet::weighted(
            data.x.select(&idx),
            idx.iter().map(|&i| data.y[i]).collect(),
            idx.iter().map(|&i| data.weights[i]).collect(),
        ).unwrap();
        let a = brute_force(&data, s).unwrap().objective;
        let b = brute_force(&permuted, s).unwrap().objective;
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn sign_flips_are_exact(data in dataset(2..=8, 2)) {
        let neg = DataSet { y: data.y.iter().map(|v| -v).collect(), ..data.clone() };
        let p = SolverParams::default();
        for (a, b) in [
            (ShapeSpec::QUASICONCAVE_INCREASING, ShapeSpec::QUASICONVEX_DECREASING),
            (ShapeSpec::QUASICONCAVE_DECREASING, ShapeSpec::QUASICONVEX_INCREASING),
            (ShapeSpec::QUASICONVEX_DECREASING, ShapeSpec::QUASICONCAVE_INCREASING),
            (ShapeSpec::QUASICONCAVE, ShapeSpec::QUASICONVEX),
        ] {
            let fa = fit(&data, a, &p).unwrap().fitted;
            let fb: Vec<f64> = fit(&neg, b, &p).unwrap().fitted.iter().map(|v| -v).collect();
            prop_assert_eq!(fa, fb);
        }
    }

    #[test]
    fn larger_gamma_is_inactive(data in dataset(2..=8, 2), s in shape()) {
        let a = fit(&data, s, &SolverParams::default()).unwrap();
        let g = 10.0 * data.y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let b = fit(&data, s, &SolverParams { gamma: Some(g), ..Default::default() }).unwrap();
        prop_assert!((a.stats.objective - b.stats.objective).abs() < 1e-7);
    }

    #[test]
    fn nested_shapes_order_the_sse(data in dataset(2..=9, 2)) {
        let p = SolverParams::default();
        let qd = data.sse(&fit(&data, ShapeSpec::QUASICONVEX_DECREASING, &p).unwrap().fitted);
        let q = data.sse(&fit(&data, ShapeSpec::QUASICONVEX, &p).unwrap().fitted);
        let iso = data.sse(&fit_isotonic(&data, Monotonicity::Decreasing).unwrap().fitted);
        prop_assert!(qd >= q - 1e-9);
        prop_assert!(qd >= iso - 1e-9);
        prop_assert!(iso >= 0.0);
    }

    #[test]
    fn duplicates_get_equal_values(data in dataset(2..=6, 2), s in shape()) {
        let mut rows: Vec<Vec<f64>> = data.x.iter().map(<[f64]>::to_vec).collect();
        rows.push(rows[0].clone());
        let mut y = data.y.clone();
        y.push(-data.y[0]);
        let dup = DataSet::from_rows(&rows, y).unwrap();
        let m = fit(&dup, s, &SolverParams::default()).unwrap();
        prop_assert_eq!(m.fitted[0], *m.fitted.last().unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn order_projection_matches_the_qp(
        y in prop::collection::vec(-2.0f64..2.0, 2..=12),
        w in prop::collection::vec(0.2f64..3.0, 12),
        raw in prop::collection::vec((0usize..12, 0usize..12), 0..30),
        bound in 0.5f64..3.0,
    ) {
        let n = y.len();
        let w = &w[..n];
        let arcs: Vec<(usize, usize)> = raw.iter().map(|&(a, b)| (a % n, b % n)).filter(|(a, b)| a != b).collect();
        let z = project_order(&y, w, &arcs, -bound, bound);
        let mut qp = QpProblem::least_squares(&y, w);
        for k in 0..n {
            qp.bounds(k, -bound, bound);
        }
        for &(a, b) in &arcs {
            let mut row = vec![0.0; n];
            row[a] = 1.0;
            row[b] = -1.0;
            qp.leq(&row, 0.0);
        }
        let res = solve_qp(&qp).unwrap();
        prop_assert_eq!(res.status, Status::Optimal);
        prop_assert!(qp.max_violation(&z) < 1e-12);
        for (a, b) in z.iter().zip(&res.x) {
            prop_assert!((a - b).abs() < 1e-7, "{:?} vs {:?}", z, res.x);
        }
    }
}

#[test]
fn psi_grid_is_feasible_for_its_shape() {
    let mut rows = Vec::new();
    for a in 0..6 {
        for b in 0..6 {
            rows.push(vec![a as f64 / 5.0, b as f64 / 5.0]);
        }
    }
    let x = PointSet::from_rows(&rows).unwrap();
    for xi in [0.0, 0.3, 1.0] {
        let z: Vec<f64> = x.iter().map(|p| psi(p, xi)).collect();
        assert!(check(&z, &x, ShapeSpec::QUASICONVEX_INCREASING).unwrap().feasible);
    }
}
