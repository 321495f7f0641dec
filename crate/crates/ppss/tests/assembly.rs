use nalgebra::{DMatrix, DVector};
use ppss::assembly::{block_lu_solve, k0_matrix, k1_matrix, k2_matrix, GniOperator};
use ppss::error::PpssError;
use ppss::legendre::{build_grid, gauss_rule};
use ppss::problems::{problem_1a, problem_1b, smooth_exact};
use ppss::system::homogenize;
use rand::{Rng, SeedableRng};

/// Dense-quadrature oracle for the stiffness form with a coefficient that is
/// polynomial in x: integrate c(x) phi_j'(x) phi_k'(x) with a Gauss rule that
/// is exact for the integrand, evaluating cardinal derivatives in closed form.
#[test]
fn stiffness_matches_dense_quadrature() {
    let n = 8;
    let g = build_grid(n).unwrap();
    let c = |x: f64| 2.0 + x;
    let coeff: Vec<DMatrix<f64>> =
        g.nodes.iter().map(|&x| DMatrix::from_element(1, 1, c(x))).collect();
    let k2 = k2_matrix(&g, &coeff, 1);

    let (qx, qw) = gauss_rule(2 * n).unwrap();
    for j in 1..n {
        for k in 1..n {
            let mut want = 0.0;
            for (i, &x) in qx.iter().enumerate() {
                want += qw[i]
                    * c(x)
                    * g.cardinal_deriv(j, x).unwrap()
                    * g.cardinal_deriv(k, x).unwrap();
            }
            let got = k2[(j - 1, k - 1)];
            assert!((got - want).abs() < 1e-9 * (1.0 + want.abs()), "({j},{k}): {got} vs {want}");
        }
    }
}

#[test]
fn stiffness_block_structure_follows_coefficient_matrix() {
    let n = 6;
    let g = build_grid(n).unwrap();
    let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]);
    let coeff: Vec<DMatrix<f64>> = (0..=n).map(|_| a.clone()).collect();
    let k2 = k2_matrix(&g, &coeff, 2);
    let unit: Vec<DMatrix<f64>> = (0..=n).map(|_| DMatrix::identity(1, 1)).collect();
    let s = k2_matrix(&g, &unit, 1);
    let ni = n - 1;
    for j in 0..ni {
        for k in 0..ni {
            assert!((k2[(j, k)] - 2.0 * s[(j, k)]).abs() < 1e-12);
            assert!((k2[(j, ni + k)] - s[(j, k)]).abs() < 1e-12);
            assert!(k2[(ni + j, k)].abs() < 1e-15);
            assert!((k2[(ni + j, ni + k)] - 2.0 * s[(j, k)]).abs() < 1e-12);
        }
    }
}

/// For a constant flux Jacobian the advective form equals the quadrature of
/// phi_j g phi_k', which the dense Gauss oracle computes exactly.
#[test]
fn advective_form_matches_dense_quadrature() {
    let n = 7;
    let g = build_grid(n).unwrap();
    let jac_val = 1.7;
    let jac: Vec<DMatrix<f64>> = (0..=n).map(|_| DMatrix::from_element(1, 1, jac_val)).collect();
    let k1 = k1_matrix(&g, &jac, 1);

    let (qx, qw) = gauss_rule(2 * n).unwrap();
    // Cardinal function values from the modal projection of a unit impulse.
    let cardinals: Vec<_> = (0..=n)
        .map(|j| {
            let mut e = DVector::zeros(n + 1);
            e[j] = 1.0;
            g.project_l2(&e).unwrap()
        })
        .collect();
    for j in 1..n {
        for k in 1..n {
            let mut want = 0.0;
            for (i, &x) in qx.iter().enumerate() {
                want += qw[i]
                    * cardinals[j].eval(x).unwrap()
                    * jac_val
                    * g.cardinal_deriv(k, x).unwrap();
            }
            let got = k1[(j - 1, k - 1)];
            assert!((got - want).abs() < 1e-9, "({j},{k}): {got} vs {want}");
        }
    }
}

#[test]
fn lumped_mass_is_the_interior_weights() {
    let n = 5;
    let g = build_grid(n).unwrap();
    let k0 = k0_matrix(&g, 2);
    let ni = n - 1;
    for p in 0..2 {
        for k in 0..ni {
            for q in 0..2 {
                for l in 0..ni {
                    let want =
                        if p == q && k == l { g.weights[k + 1] } else { 0.0 };
                    assert_eq!(k0[(p * ni + k, q * ni + l)], want);
                }
            }
        }
    }
}

/// Discrete integration by parts: with unit coefficient, the lumped-mass
/// inverse of the stiffness form is minus the interior block of the
/// second-derivative collocation matrix.
#[test]
fn mass_inverse_stiffness_is_negative_interior_d2() {
    for n in [6, 12, 20] {
        let g = build_grid(n).unwrap();
        let unit: Vec<DMatrix<f64>> = (0..=n).map(|_| DMatrix::identity(1, 1)).collect();
        let s = k2_matrix(&g, &unit, 1);
        let ni = n - 1;
        for j in 0..ni {
            for k in 0..ni {
                let got = s[(j, k)] / g.weights[j + 1];
                let want = -g.d2[(j + 1, k + 1)];
                assert!(
                    (got - want).abs() < 1e-8 * (1.0 + want.abs()),
                    "N={n} ({j},{k}): {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn block_solver_matches_dense_factorization() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for m in [3usize, 6, 11] {
        // Diagonally dominant random block matrix so both routes are stable.
        let mut k = DMatrix::from_fn(2 * m, 2 * m, |_, _| rng.gen_range(-1.0..1.0));
        for i in 0..2 * m {
            k[(i, i)] += 2.0 * m as f64;
        }
        let r = DVector::from_fn(2 * m, |i, _| (i as f64 * 0.37).sin());
        let x = block_lu_solve(&k, &r, 2).unwrap();
        let x_dense = k.clone().lu().solve(&r).unwrap();
        assert!((&x - &x_dense).amax() < 1e-10, "m={m}: {:e}", (&x - &x_dense).amax());
        // Residual check, independent of any factorization.
        assert!((&k * &x - &r).amax() < 1e-10);
    }
}

#[test]
fn block_solver_reports_singular_leading_block() {
    let m = 4;
    let mut k = DMatrix::zeros(2 * m, 2 * m);
    // K11 = 0 is singular; fill the rest with the identity.
    for i in m..2 * m {
        k[(i, i)] = 1.0;
    }
    let r = DVector::from_element(2 * m, 1.0);
    assert!(matches!(block_lu_solve(&k, &r, 2), Err(PpssError::SingularK11)));
}

#[test]
fn dense_fallback_used_for_other_dimensions() {
    let k = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
    let r = DVector::from_column_slice(&[1.0, 2.0, 3.0]);
    let x = block_lu_solve(&k, &r, 3).unwrap();
    assert!((&k * &x - &r).amax() < 1e-12);
    let zero = DMatrix::zeros(3, 3);
    assert!(matches!(block_lu_solve(&zero, &r, 3), Err(PpssError::SingularMass)));
}

#[test]
fn mass_operator_is_symmetric_positive_definite() {
    // Diagonal coefficient matrix, so the mass operator is symmetric.
    let hs = homogenize(problem_1b().sys);
    let grid = build_grid(12).unwrap();
    let mut op = GniOperator::new(hs, grid);
    let v = op.initial_state();
    let k = op.mass(&v, 0.0);
    let sym = (&k - k.transpose()).amax();
    assert!(sym < 1e-10, "asymmetry {sym:e}");
    assert!(k.clone().cholesky().is_some(), "mass operator not positive definite");
}

#[test]
fn mass_operator_inherits_triangular_coefficient_structure() {
    // Upper-triangular coefficient matrix: the (2,1) block of the mass
    // operator must vanish.
    let hs = homogenize(problem_1a().sys);
    let grid = build_grid(10).unwrap();
    let mut op = GniOperator::new(hs, grid);
    let v = op.initial_state();
    let k = op.mass(&v, 0.0);
    let m = k.nrows() / 2;
    assert!(k.view((m, 0), (m, m)).amax() < 1e-15);
    assert!(k.view((0, m), (m, m)).amax() > 1e-3);
}

#[test]
fn initial_state_plus_lift_reproduces_initial_data() {
    let problem = problem_1a();
    let exact = smooth_exact();
    let hs = homogenize(problem.sys);
    let grid = build_grid(10).unwrap();
    let op = GniOperator::new(hs, grid);
    let v = op.initial_state();
    let states = op.node_states(&v, 0.0);
    for (j, u) in states.iter().enumerate() {
        let want = (exact.u)(op.hs.physical_x(op.grid.nodes[j]), 0.0);
        for p in 0..2 {
            assert!((u[p] - want[p]).abs() < 1e-12, "node {j}, comp {p}");
        }
    }
}

/// The semidiscrete residual K(v) v_t - F(v) at the exact solution decays
/// spectrally with the polynomial degree.
#[test]
fn semidiscrete_residual_decays_spectrally() {
    let exact = smooth_exact();
    let t = 0.3;
    let mut norms = Vec::new();
    for n in [8usize, 16] {
        let problem = problem_1a();
        let hs = homogenize(problem.sys);
        let grid = build_grid(n).unwrap();
        let mut op = GniOperator::new(hs, grid);
        let ni = n - 1;
        let mut v = DVector::zeros(2 * ni);
        let mut v_t = DVector::zeros(2 * ni);
        for j in 1..n {
            let xi = op.grid.nodes[j];
            let x = op.hs.physical_x(xi);
            let u = (exact.u)(x, t);
            let ut = (exact.u_t)(x, t);
            let lift = op.hs.lift(xi, t);
            let lift_t = op.hs.lift_t(xi, t);
            for p in 0..2 {
                v[p * ni + j - 1] = u[p] - lift[p];
                v_t[p * ni + j - 1] = ut[p] - lift_t[p];
            }
        }
        let k = op.mass(&v, t);
        let r = &k * &v_t - op.rhs(&v, t);
        norms.push(r.amax());
    }
    assert!(
        norms[1] < norms[0] / 100.0,
        "residuals {:.3e} -> {:.3e} did not decay",
        norms[0],
        norms[1]
    );
}
