//! Structural invariants of the discrete operators, checked on random data.

use fwlab::shock::{fv_step, godunov_flux, restrict_pairwise, stable_dt, FvConfig, Splitting};
use fwlab::{Domain, GridFn, KernelOp, Norm};
use proptest::prelude::*;

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n)
}

fn splitting() -> impl Strategy<Value = Splitting> {
    prop_oneof![Just(Splitting::Lie), Just(Splitting::Strang), Just(Splitting::Additive)]
}

proptest! {
    #[test]
    fn godunov_flux_is_consistent_and_monotone(a in -3.0f64..3.0, b in -3.0f64..3.0, d in 0.0f64..1.0) {
        prop_assert!((godunov_flux(a, a) - 0.5 * a * a).abs() < 1e-15);
        prop_assert!(godunov_flux(a + d, b) >= godunov_flux(a, b) - 1e-15);
        prop_assert!(godunov_flux(a, b + d) <= godunov_flux(a, b) + 1e-15);
    }

    #[test]
    fn line_kernel_obeys_maximum_principle(v in values(64)) {
        let w = GridFn::new(Domain::line(-5.0, 5.0).unwrap(), v).unwrap();
        let op = KernelOp::for_grid(&w).unwrap();
        let s = op.conv_k(&w).unwrap();
        prop_assert!(s.norm(Norm::Linf) <= w.norm(Norm::Linf) * (1.0 + 1e-12));
    }

    #[test]
    fn kernel_inverts_helmholtz(v in values(64)) {
        for domain in [Domain::Torus, Domain::line(-5.0, 5.0).unwrap()] {
            let w = GridFn::new(domain, v.clone()).unwrap();
            let op = KernelOp::for_grid(&w).unwrap();
            let back = op.helmholtz(&op.conv_k(&w).unwrap()).unwrap();
            prop_assert!(back.sub(&w).unwrap().norm(Norm::Linf) < 1e-9);
        }
    }

    #[test]
    fn kernel_operators_are_linear(v in values(32), w in values(32), alpha in -2.0f64..2.0) {
        for domain in [Domain::Torus, Domain::line(-3.0, 3.0).unwrap()] {
            let u = GridFn::new(domain, v.clone()).unwrap();
            let z = GridFn::new(domain, w.clone()).unwrap();
            let op = KernelOp::for_grid(&u).unwrap();
            let lhs = op.conv_k(&u.axpy(alpha, &z).unwrap()).unwrap();
            let rhs = op.conv_k(&u).unwrap().axpy(alpha, &op.conv_k(&z).unwrap()).unwrap();
            prop_assert!(lhs.sub(&rhs).unwrap().norm(Norm::Linf) < 1e-12);
        }
    }

    #[test]
    fn torus_kernel_preserves_mean(v in values(48)) {
        let u = GridFn::new(Domain::Torus, v).unwrap();
        let op = KernelOp::for_grid(&u).unwrap();
        prop_assert!((op.conv_k(&u).unwrap().mean() - u.mean()).abs() < 1e-13);
        prop_assert!(op.conv_kprime(&u).unwrap().mean().abs() < 1e-13);
    }

    #[test]
    fn torus_fv_step_conserves_mass(v in values(64), split in splitting(), frac in 0.1f64..1.0) {
        let u = GridFn::new(Domain::Torus, v).unwrap();
        let cfg = FvConfig { n: 64, splitting: split, ..FvConfig::default() };
        let op = KernelOp::for_grid(&u).unwrap();
        let next = fv_step(&u, frac * stable_dt(&u, &cfg), &op, &cfg).unwrap();
        prop_assert!((next.integral() - u.integral()).abs() < 1e-13);
    }

    #[test]
    fn burgers_step_is_l1_contractive(v in values(64), w in values(64), frac in 0.1f64..1.0) {
        let u = GridFn::new(Domain::Torus, v).unwrap();
        let z = GridFn::new(Domain::Torus, w).unwrap();
        let cfg = FvConfig { n: 64, with_source: false, ..FvConfig::default() };
        let op = KernelOp::for_grid(&u).unwrap();
        let dt = frac * stable_dt(&u, &cfg).min(stable_dt(&z, &cfg));
        let before = u.sub(&z).unwrap().norm(Norm::L1);
        let after = fv_step(&u, dt, &op, &cfg).unwrap().sub(&fv_step(&z, dt, &op, &cfg).unwrap()).unwrap().norm(Norm::L1);
        prop_assert!(after <= before * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn burgers_step_keeps_bounds(v in values(64), frac in 0.1f64..1.0) {
        let u = GridFn::new(Domain::line(-1.0, 1.0).unwrap(), v).unwrap();
        let cfg = FvConfig { n: 64, with_source: false, ..FvConfig::default() };
        let op = KernelOp::for_grid(&u).unwrap();
        let next = fv_step(&u, frac * stable_dt(&u, &cfg), &op, &cfg).unwrap();
        prop_assert!(next.max() <= u.max() + 1e-14 && next.min() >= u.min() - 1e-14);
    }

    #[test]
    fn pairwise_restriction_preserves_integral(v in values(40)) {
        let u = GridFn::new(Domain::line(-2.0, 2.0).unwrap(), v).unwrap();
        let c = restrict_pairwise(&u).unwrap();
        prop_assert_eq!(c.n(), 20);
        prop_assert!((c.integral() - u.integral()).abs() < 1e-13);
    }
}

#[test]
fn oversized_step_is_rejected() {
    let u = GridFn::constant(Domain::Torus, 32, 1.0);
    let cfg = FvConfig { n: 32, ..FvConfig::default() };
    let op = KernelOp::for_grid(&u).unwrap();
    assert!(fv_step(&u, 2.0 * stable_dt(&u, &cfg), &op, &cfg).is_err());
}
