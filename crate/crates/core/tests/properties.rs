//! Property tests for mesh, basis, norms, operators and configuration.

use dbc_hdg::analysis::{l2_error_volume_exact, ProblemKind, VolumeField};
use dbc_hdg::cli::{parse_config, verify_identities, IdentitySettings};
use dbc_hdg::fem_basis::{eval_volume, project_volume, TriBasis};
use dbc_hdg::hdg::{DiscreteTuple, DofMap, HMode, OperatorContext};
use dbc_hdg::linalg::{factor_and_solve, SparseMatrix};
use dbc_hdg::mesh::Mesh;
use dbc_hdg::problem::ProblemData;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dim(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mesh_area_and_euler(n in 1usize..24, length in 0.01f64..10.0) {
        let mesh = Mesh::build_structured(length, n).unwrap();
        let area: f64 = (0..mesh.n_elements()).map(|e| mesh.area(e)).sum();
        prop_assert!((area - length * length).abs() <= 1e-14 * length * length * 4.0);
        let euler = mesh.vertices().len() as i64 - mesh.n_faces() as i64 + mesh.n_elements() as i64;
        prop_assert_eq!(euler, 1);
        for e in 0..mesh.n_elements() {
            prop_assert!((mesh.diameter(e) - std::f64::consts::SQRT_2 * length / n as f64).abs() < 1e-12 * length);
        }
    }

    #[test]
    fn dof_counts_match_formula(n in 1usize..20, k in 0usize..3) {
        let mesh = Mesh::build_structured(1.0, n).unwrap();
        let d = DofMap::new(&mesh, k).unwrap();
        let elems = 2 * n * n;
        let interior_faces = 3 * n * n - 2 * n;
        prop_assert_eq!(d.interior_dim(), elems * 2 * (2 * dim(k) + dim(k + 1)));
        prop_assert_eq!(d.skeleton_dim(), (2 * interior_faces + 4 * n) * (k + 2));
        prop_assert_eq!(d.monolithic_dim(), d.interior_dim() + d.skeleton_dim());
    }

    #[test]
    fn projection_is_idempotent(coeffs in prop::collection::vec(-1.0f64..1.0, 6), e in 0usize..8) {
        let mesh = Mesh::build_structured(0.5, 2).unwrap();
        let basis = TriBasis::new(2).unwrap();
        let map = mesh.element_map(e);
        let f = |x: [f64; 2]| coeffs[0] + coeffs[1] * x[0] + coeffs[2] * x[1] + coeffs[3] * x[0] * x[1]
            + coeffs[4] * x[0] * x[0] + coeffs[5] * (x[1] * 3.0).sin();
        let once = project_volume(&f, &mesh, e, 2, 12).unwrap();
        let g = |x: [f64; 2]| eval_volume(&basis, &map, &once, x);
        let twice = project_volume(&g, &mesh, e, 2, 12).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn volume_norm_is_homogeneous(seed in any::<u64>(), c in -5.0f64..5.0, k in 0usize..3) {
        let mesh = Mesh::build_structured(1.0, 3).unwrap();
        let n = mesh.n_elements() * dim(k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..n).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect();
        let cv: Vec<f64> = v.iter().map(|x| c * x).collect();
        let zero = |_: [f64; 2], o: &mut [f64]| o[0] = 0.0;
        let a = l2_error_volume_exact(&VolumeField::scalar(&mesh, k, &v), &zero).unwrap();
        let b = l2_error_volume_exact(&VolumeField::scalar(&mesh, k, &cv), &zero).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!((b - c.abs() * a).abs() <= 1e-13 * (1.0 + b));
        let z = vec![0.0; n];
        prop_assert_eq!(l2_error_volume_exact(&VolumeField::scalar(&mesh, k, &z), &zero).unwrap(), 0.0);
    }

    #[test]
    fn b1_and_b2_are_bilinear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0, k in 0usize..2) {
        let mesh = Mesh::build_structured(0.125, 2).unwrap();
        let data = ProblemData::paper_example(k);
        let ctx = OperatorContext::new(&mesh, &data, HMode::Local).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t1 = DiscreteTuple::random(ctx.dofs(), &mut rng);
        let t2 = DiscreteTuple::random(ctx.dofs(), &mut rng);
        let s = DiscreteTuple::random(ctx.dofs(), &mut rng);
        let mix = t1.combine(a, &t2, b);
        for form in [OperatorContext::b1, OperatorContext::b2] {
            let lhs = form(&ctx, &mix, &s).unwrap();
            let rhs = a * form(&ctx, &t1, &s).unwrap() + b * form(&ctx, &t2, &s).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs()));
            let lhs = form(&ctx, &s, &mix).unwrap();
            let rhs = a * form(&ctx, &s, &t1).unwrap() + b * form(&ctx, &s, &t2).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn energy_is_nonnegative(seed in any::<u64>(), k in 0usize..3) {
        let mesh = Mesh::build_structured(0.125, 2).unwrap();
        let data = ProblemData::paper_example(k);
        let ctx = OperatorContext::new(&mesh, &data, HMode::Local).unwrap();
        let t = DiscreteTuple::random(ctx.dofs(), &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(ctx.energy_b1(&t).unwrap() > 0.0);
        prop_assert!(ctx.energy_b2(&t).unwrap() > 0.0);
    }

    #[test]
    fn sparse_solve_inverts_spmv(seed in any::<u64>(), n in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = vec![vec![0.0; n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                if i == j || rand::Rng::gen_bool(&mut rng, 0.3) {
                    *v = rand::Rng::gen_range(&mut rng, -1.0..1.0);
                }
            }
            row[i] += 4.0 * n as f64;
        }
        let a = SparseMatrix::from_dense(&rows);
        let x: Vec<f64> = (0..n).map(|i| (i as f64 + 1.0).sqrt()).collect();
        let dense: Vec<f64> = rows.iter().map(|r| r.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
        let b = a.spmv(&x).unwrap();
        for (u, v) in b.iter().zip(&dense) {
            prop_assert!((u - v).abs() <= 1e-13 * (1.0 + v.abs()));
        }
        let y = factor_and_solve(&a, &b).unwrap();
        prop_assert_eq!(&y, &factor_and_solve(&a, &b).unwrap());
        for (u, v) in y.iter().zip(&x) {
            prop_assert!((u - v).abs() <= 1e-12 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn config_round_trip(
        problem in prop::sample::select(vec!["paper", "mms", "zero"]),
        k in 0usize..3,
        base in 1usize..5,
        nlev in 1u32..4,
        strategy in prop::sample::select(vec!["monolithic", "condensed"]),
        h_mode in prop::sample::select(vec!["local", "global"]),
        tau2 in 0.1f64..10.0,
        beta in prop::array::uniform2(-2.0f64..2.0),
        gamma in 0.1f64..10.0,
    ) {
        let levels: Vec<usize> = (0..nlev).map(|i| base << i).collect();
        let reference = *levels.last().unwrap() * 8;
        let list = levels.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ");
        let text = format!(
            "# study\nproblem = {problem}\nk = {k}\nstudy_levels = {list}\nreference_n = {reference}\n\
             strategy = {strategy}\nh_mode = {h_mode}\ntau2 = {tau2:e}\nbeta = {:e}, {:e}\ngamma = {gamma:e}\n\
             domain_length = 0.125\noutput_dir = /tmp/out\n",
            beta[0], beta[1]
        );
        let cfg = parse_config(&text, None).unwrap();
        prop_assert_eq!(cfg.k, k);
        prop_assert_eq!(&cfg.study_levels, &levels);
        prop_assert_eq!(cfg.reference_n, reference);
        prop_assert_eq!(cfg.tau2, tau2);
        prop_assert_eq!(cfg.beta, beta);
        prop_assert_eq!(cfg.gamma, gamma);
        prop_assert_eq!(format!("{:?}", cfg.strategy).to_lowercase(), strategy);
        prop_assert_eq!(format!("{:?}", cfg.h_mode).to_lowercase(), h_mode);
        let kind = match problem {
            "paper" => ProblemKind::Benchmark,
            "mms" => ProblemKind::Mms,
            _ => ProblemKind::Zero,
        };
        prop_assert_eq!(cfg.problem, kind);
        prop_assert_eq!(parse_config(&text, None).unwrap(), cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn identities_hold_for_any_seed(seed in any::<u64>(), k in 0usize..3, n in 1usize..5) {
        let r = verify_identities(&IdentitySettings { k, n, seed, samples: 3, ..Default::default() }).unwrap();
        prop_assert!(r.passed(), "{}", r);
    }
}
