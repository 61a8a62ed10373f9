//! Oracle correctness: hand-checkable solutions, first-order optimality of
//! the computed reference points, and gradient/sector validation across
//! all three objective families.

use eqopt_core::numkit::{Matrix, Vector};
use eqopt_core::oracle::oracle_solve;
use eqopt_core::problems::{
    gen_instance, sector_check, smoothl1_curvature, Constraint, GeneratedInstance, InstanceSpec,
    Objective, ObjectiveClass, ObjectiveKind,
};
use eqopt_core::rng::Rng;

/// Hand-built instance: min ||x||^2/2 subject to x_1 = 1 has solution e_1.
fn pinned_first_coordinate(n: usize) -> GeneratedInstance {
    let mut e = Matrix::zeros(1, n);
    e.set(0, 0, 1.0);
    let spec = InstanceSpec {
        kind: ObjectiveClass::Quadratic,
        n,
        c: 1,
        r: 1,
        m: 1.0,
        l: 1.0,
        sigma1: 1.0,
        sigmar: 1.0,
        seed: 0,
    };
    let decomposition = eqopt_core::numkit::svd(&e).unwrap();
    GeneratedInstance {
        spec,
        objective: Objective {
            kind: ObjectiveKind::Quadratic { q: Matrix::identity(n), b: Vector::zeros(n) },
            m: 1.0,
            l: 1.0,
        },
        constraint: Constraint {
            e,
            q: Vector::new({
                let mut q = vec![0.0; 1];
                q[0] = 1.0;
                q
            }),
            sigma1: 1.0,
            sigmar: 1.0,
            rank: 1,
        },
        x_bar: Vector::from_fn(n, |i| if i == 0 { 1.0 } else { 0.0 }),
        seed: 0,
        decomposition,
    }
}

#[test]
fn kkt_by_hand_pinned_coordinate() {
    let inst = pinned_first_coordinate(5);
    let sol = oracle_solve(&inst, 1e-12).unwrap();
    assert!((sol.x_star[0] - 1.0).abs() < 1e-12);
    for i in 1..5 {
        assert!(sol.x_star[i].abs() < 1e-12);
    }
}

#[test]
fn feasible_unconstrained_minimizer_is_returned_exactly() {
    // Quadratic with b = Q x_bar: the unconstrained minimizer x_bar is
    // feasible (q = E x_bar), so x* = x_bar.
    let spec = InstanceSpec {
        kind: ObjectiveClass::Quadratic,
        n: 14,
        c: 6,
        r: 4,
        m: 1.0,
        l: 8.0,
        sigma1: 4.0,
        sigmar: 0.5,
        seed: 7373,
    };
    let mut inst = gen_instance(&spec).unwrap();
    let q_mat = match &inst.objective.kind {
        ObjectiveKind::Quadratic { q, .. } => q.clone(),
        _ => unreachable!(),
    };
    let b = q_mat.matvec(&inst.x_bar).unwrap();
    inst.objective.kind = ObjectiveKind::Quadratic { q: q_mat, b };
    let sol = oracle_solve(&inst, 1e-12).unwrap();
    let dev = sol.x_star.sub(&inst.x_bar).norm() / inst.x_bar.norm();
    assert!(dev < 1e-9, "deviation {dev}");
}

#[test]
fn oracle_first_order_optimality_per_kind() {
    for (kind, seed) in [
        (ObjectiveClass::Quadratic, 41u64),
        (ObjectiveClass::Logistic, 42),
        (ObjectiveClass::SmoothL1, 43),
    ] {
        let spec = InstanceSpec {
            kind,
            n: 40,
            c: 16,
            r: 10,
            m: 0.1,
            l: 10.0,
            sigma1: 10.0,
            sigmar: 0.01,
            seed,
        };
        let inst = gen_instance(&spec).unwrap();
        let sol = oracle_solve(&inst, 1e-12).unwrap();
        let grad = inst.objective.gradient(&sol.x_star).unwrap();

        // grad f(x*) lies in range(V1).
        let v2t = inst.v2().matvec_t(&grad).unwrap();
        assert!(
            v2t.norm() <= 1e-10 * (1.0 + grad.norm()),
            "{kind:?}: null-space gradient {}",
            v2t.norm()
        );
        // And is reproduced by its V1 coefficients.
        let mut rebuilt = Vector::zeros(spec.n);
        let v1 = inst.v1();
        for k in 0..spec.r {
            rebuilt.axpy(sol.range_grad[k], &v1.column(k));
        }
        assert!(rebuilt.sub(&grad).norm() <= 1e-9 * (1.0 + grad.norm()));

        // Null-space coordinates reproduce x* together with x_par.
        let mut x_rebuilt = sol.x_par.clone();
        let v2 = inst.v2();
        for j in 0..spec.n - spec.r {
            x_rebuilt.axpy(sol.null_coords[j], &v2.column(j));
        }
        assert!(x_rebuilt.sub(&sol.x_star).norm() <= 1e-9 * (1.0 + sol.x_star.norm()));

        let (feas, nullgrad) = sol.kkt_residuals;
        assert!(feas.is_finite() && nullgrad.is_finite());
    }
}

#[test]
fn gradients_match_finite_differences_per_kind() {
    for (kind, seed) in [
        (ObjectiveClass::Quadratic, 11u64),
        (ObjectiveClass::Logistic, 12),
        (ObjectiveClass::SmoothL1, 13),
    ] {
        let spec = InstanceSpec {
            kind,
            n: 24,
            c: 10,
            r: 6,
            m: 0.5,
            l: 5.0,
            sigma1: 4.0,
            sigmar: 0.25,
            seed,
        };
        let inst = gen_instance(&spec).unwrap();
        let mut rng = Rng::seed_from(seed ^ 0xABCD);
        for _ in 0..100 {
            let x = Vector::from_fn(spec.n, |_| rng.next_gaussian());
            let g = inst.objective.gradient(&x).unwrap();
            let h = 1e-6;
            let fd = Vector::from_fn(spec.n, |i| {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let (fp, _) = inst.objective.value_grad(&xp).unwrap();
                let (fm, _) = inst.objective.value_grad(&xm).unwrap();
                (fp - fm) / (2.0 * h)
            });
            let err = g.sub(&fd).norm() / g.norm().max(1.0);
            assert!(err <= 1e-6, "{kind:?}: fd mismatch {err}");
        }
    }
}

#[test]
fn smoothl1_curvature_window_holds_on_samples() {
    let (m, l) = (0.1, 10.0);
    let mut rng = Rng::seed_from(314);
    assert!((smoothl1_curvature(m, l, 0.0).unwrap() - l).abs() <= 1e-10);
    for _ in 0..10_000 {
        let x = 100.0 * rng.next_gaussian();
        let c = smoothl1_curvature(m, l, x).unwrap();
        assert!(c >= m && c <= l + 1e-12, "curvature {c} at {x}");
    }
}

#[test]
fn sector_property_holds_for_every_generated_objective() {
    for (kind, seed) in [
        (ObjectiveClass::Quadratic, 21u64),
        (ObjectiveClass::Logistic, 22),
        (ObjectiveClass::SmoothL1, 23),
    ] {
        let spec = InstanceSpec {
            kind,
            n: 30,
            c: 12,
            r: 8,
            m: 0.2,
            l: 6.0,
            sigma1: 9.0,
            sigmar: 0.09,
            seed,
        };
        let inst = gen_instance(&spec).unwrap();
        let report = sector_check(&inst.objective, 10_000, seed ^ 0x5EC7).unwrap();
        assert!(report.pass, "{kind:?}: {report:?}");
    }
}

#[test]
fn logistic_hessian_rayleigh_quotient_attains_l_at_origin() {
    let spec = InstanceSpec {
        kind: ObjectiveClass::Logistic,
        n: 30,
        c: 10,
        r: 5,
        m: 0.5,
        l: 6.0,
        sigma1: 4.0,
        sigmar: 0.25,
        seed: 606,
    };
    let inst = gen_instance(&spec).unwrap();
    let x0 = Vector::zeros(spec.n);
    let h = 1e-5;
    // Power iteration on the finite-difference Hessian at the origin.
    let lambda = eqopt_core::numkit::power_iteration_sym(
        |v| {
            let mut xp = x0.clone();
            let mut xm = x0.clone();
            xp.axpy(h, v);
            xm.axpy(-h, v);
            let gp = inst.objective.gradient(&xp).unwrap();
            let gm = inst.objective.gradient(&xm).unwrap();
            gp.sub(&gm).scale(1.0 / (2.0 * h))
        },
        spec.n,
        50_000,
        1e-10,
    )
    .unwrap();
    assert!(
        (lambda - spec.l).abs() / spec.l <= 1e-4,
        "FD Hessian top eigenvalue {lambda} vs declared L {}",
        spec.l
    );
}
