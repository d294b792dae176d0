//! Property tests for the spec's structural invariants.

use proptest::prelude::*;

use cheegerlab::extrinsic::compute_profile;
use cheegerlab::generators::{generate_surface, SurfaceKind};
use cheegerlab::iso_comparison::{construct_w, BoundingFunction};
use cheegerlab::model_space::{ModelSpace, WarpingFunction};
use cheegerlab::numerics::log_grid;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Space-form models: K_w recovers b, w stays positive, and the
    /// isoperimetric quotient is increasing and bounded by its limit.
    #[test]
    fn space_form_quotient_monotone_and_bounded(
        b in -4.0f64..0.0,
        m in 2usize..5,
        lo in 0.05f64..0.5,
    ) {
        let ms = ModelSpace::new(m, WarpingFunction::space_form(b)).unwrap();
        let grid = log_grid(lo, 25.0, 24);
        let bound = 1.0 / ((m as f64 - 1.0) * (-b).sqrt());
        let mut prev = 0.0;
        for &r in &grid {
            prop_assert!(ms.eval_w(r).unwrap() > 0.0);
            prop_assert!((ms.curvature_k_w(r).unwrap() - b).abs() < 1e-7);
            let q = ms.isoperimetric_quotient(r).unwrap();
            prop_assert!(q > prev - 1e-12);
            prop_assert!(q <= bound + 1e-9);
            prev = q;
        }
    }

    /// Refining a balance grid (superset of radii) never flips a false
    /// verdict to true.
    #[test]
    fn balance_verdicts_are_grid_monotone(
        c in 0.5f64..3.0,
        seed_lo in -3.0f64..-2.0,
    ) {
        let sp = construct_w(
            2,
            WarpingFunction::space_form(seed_lo / 2.0),
            BoundingFunction::Constant(c),
            55.0,
        ).unwrap();
        let coarse = log_grid(1e-3, 50.0, 120);
        let mut fine = coarse.clone();
        for w in coarse.windows(2) {
            fine.push(0.5 * (w[0] + w[1]));
        }
        fine.sort_by(f64::total_cmp);
        let above_c = sp.check_balanced_above(&coarse).unwrap().holds;
        let above_f = sp.check_balanced_above(&fine).unwrap().holds;
        let below_c = sp.check_balanced_below(&coarse).unwrap().holds;
        let below_f = sp.check_balanced_below(&fine).unwrap().holds;
        prop_assert!(!(above_f && !above_c), "refinement flipped above false->true");
        prop_assert!(!(below_f && !below_c), "refinement flipped below false->true");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Sublevel measurements grow monotonically in t and are capped by the
    /// total mesh area; the top radius recovers (almost) the whole mesh.
    #[test]
    fn sublevel_volumes_are_monotone_and_capped(
        neck in 0.5f64..1.5,
        t_hi_frac in 0.7f64..0.98,
    ) {
        let t_max = 8.0 * neck;
        let mesh = generate_surface(SurfaceKind::Catenoid { neck }, t_max, 0.35).unwrap();
        let sp = construct_w(
            2,
            WarpingFunction::space_form(0.0),
            BoundingFunction::Zero,
            2.0 * t_max,
        ).unwrap();
        let grid = log_grid(1.4 * neck, t_hi_frac * t_max, 16);
        let p = compute_profile(&mesh, &sp, &grid).unwrap();
        let total = mesh.total_area();
        for k in 0..p.t_grid.len() {
            prop_assert!(p.vol_d[k] > 0.0);
            prop_assert!(p.vol_d[k] <= total * (1.0 + 1e-12));
            prop_assert!(p.vol_bdry[k] > 0.0);
            if k > 0 {
                prop_assert!(p.vol_d[k] >= p.vol_d[k - 1]);
            }
        }
    }
}
