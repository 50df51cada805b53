mod common;

use std::sync::OnceLock;

use gaudin_core::acsm::{
    acsm_system, arc_fit, arc_roots, axis_aligned_configuration, bath_couplings, bath_grid,
    build_acsm, classical_configuration_energy, classical_energy, classical_limit,
    continuation_step, excited_states, extrapolate, extrapolate_trace, fit_arc_or_vertical,
    fit_arc_points, ground_state_seed, matches_ground_state_pattern, root_layout, run_continuation,
    AcsmParams, ClassicalSpin, ContinuationOptions, ContinuationTrace, SeedOptions,
    DEFAULT_SCHEDULE,
};
use gaudin_core::bethe::{sector_is_even_block, Sector};
use gaudin_core::spinops::{eigensolve_lowest, parity_split};
use gaudin_core::{Complex64, EllipticContext, Error};
use proptest::prelude::*;

/// Frozen from a 30-digit direct summation.
const CLASSICAL_N12: f64 = -0.706318255393680;

fn params() -> AcsmParams {
    AcsmParams::default()
}

fn chain() -> &'static ContinuationTrace {
    static TRACE: OnceLock<ContinuationTrace> = OnceLock::new();
    TRACE.get_or_init(|| {
        run_continuation(
            &params(),
            &DEFAULT_SCHEDULE,
            &SeedOptions::default(),
            &ContinuationOptions::default(),
        )
        .unwrap()
    })
}

/// Lowest even-sector levels of the dense `N = 12` Hamiltonian.
fn ed_levels(count: usize) -> Vec<f64> {
    static LEVELS: OnceLock<Vec<f64>> = OnceLock::new();
    LEVELS
        .get_or_init(|| {
            let (sys, h) = build_acsm(&params()).unwrap();
            let blocks = parity_split(&h, &sys).unwrap();
            let block = if sector_is_even_block(&sys, Sector::Even) {
                blocks.even
            } else {
                blocks.odd
            };
            eigensolve_lowest(&block, 12).unwrap().values
        })
        .iter()
        .copied()
        .take(count)
        .collect()
}

fn jx_oracle(z: f64) -> f64 {
    let (sn, _, _) = common::sn_cn_dn_agm(z, 0.5);
    (1.0 + 0.5 * sn * sn) / sn
}

#[test]
fn bath_grids() {
    let grid = bath_grid(8, 0.2, 0.6);
    assert_eq!(grid.len(), 7);
    for (i, z) in grid.iter().enumerate() {
        assert!((z - (0.2 + i as f64 * 0.4 / 6.0)).abs() < 1e-15);
    }
    assert!((grid[1] - 0.266_666_666_666_666_7).abs() < 1e-15);
    assert_eq!(bath_grid(3, 0.2, 0.6), vec![0.2, 0.6]);

    let sys = acsm_system(&params()).unwrap();
    assert_eq!(sys.len(), 12);
    assert_eq!(sys.zs()[0], 0.0);
    assert!(sys.spins().iter().all(|&s| s == 0.5));
    assert_eq!(sys.root_count(), 6);
}

#[test]
fn parameter_domain() {
    let kk = EllipticContext::new(0.5).unwrap().kk;
    assert!(AcsmParams::new(11, 0.2, 0.6, 0.5).is_err());
    assert!(AcsmParams::new(2, 0.2, 0.6, 0.5).is_err());
    assert!(AcsmParams::new(12, 0.6, 0.2, 0.5).is_err());
    assert!(AcsmParams::new(12, 0.0, 0.6, 0.5).is_err());
    assert!(AcsmParams::new(12, 0.2, kk + 0.01, 0.5).is_err());
    assert!(AcsmParams::new(12, 0.2, kk, 0.5).is_ok());
    assert!(matches!(
        AcsmParams::new(12, 0.2, 0.6, 1.0),
        Err(Error::ModulusDomain(_))
    ));
}

#[test]
fn coupling_ordering_on_the_bath() {
    for p in [params(), params().with_n(100).unwrap()] {
        let js = bath_couplings(&p).unwrap();
        for [x, y, z] in &js {
            assert!(x > y && y > z && *z > 0.0, "{x} {y} {z}");
        }
        assert!(js.windows(2).all(|w| w[1][0] < w[0][0]));
    }
}

#[test]
fn classical_energy_by_direct_sum() {
    let p = params();
    let direct: f64 = -bath_grid(12, 0.2, 0.6)
        .iter()
        .map(|&z| jx_oracle(z))
        .sum::<f64>()
        / 48.0;
    let e = classical_energy(&p).unwrap();
    assert!((e - direct).abs() < 1e-13);
    assert!((e - CLASSICAL_N12).abs() < 1e-13);
    // every term at least as strong as the one at b
    assert!(e <= -jx_oracle(0.6) * 11.0 / 48.0);
}

#[test]
fn x_aligned_configuration_is_lowest() {
    let p = params();
    let energies: Vec<f64> = (0..3)
        .map(|axis| {
            classical_configuration_energy(&p, &axis_aligned_configuration(&p, axis)).unwrap()
        })
        .collect();
    assert!(energies[0] < energies[1] && energies[1] < energies[2]);
    assert!((energies[0] / 12.0 - classical_energy(&p).unwrap()).abs() < 1e-14);
    let wrong = vec![ClassicalSpin::new(0.0, 0.0); 5];
    assert!(classical_configuration_energy(&p, &wrong).is_err());
}

#[test]
fn classical_limit_closed_form() {
    let p = params();
    let limit = classical_limit(&p).unwrap();
    assert!((limit - common::CLASSICAL_LIMIT).abs() < 1e-7);
    let integral = common::adaptive_simpson(&jx_oracle, 0.2, 0.6, 1e-13);
    assert!(
        (limit + integral / 1.6).abs() < 1e-10,
        "{limit} vs {}",
        -integral / 1.6
    );
    // the finite sum approaches the limit as 1/N
    let big = classical_energy(&p.with_n(20_000).unwrap()).unwrap();
    assert!((big - limit).abs() < 1e-4);
}

#[test]
fn classical_limit_as_b_approaches_a() {
    let near = classical_limit(&AcsmParams::new(12, 0.2, 0.2 + 1e-7, 0.5).unwrap()).unwrap();
    let point = -jx_oracle(0.2) / 4.0;
    assert!((near - point).abs() < 1e-6, "{near} vs {point}");
}

#[test]
fn n12_seed_matches_reference_row_and_ed() {
    let p = params();
    let gs = ground_state_seed(&p, &SeedOptions::default()).unwrap();
    assert!(matches_ground_state_pattern(&gs, &p));
    let e = -gs.r[0].re;
    let ed = ed_levels(1)[0];
    assert!((e - ed).abs() < 1e-8, "{e} vs {ed}");

    let (n, l1n, lo, hi, epn) = common::TABLE_ACSM[0];
    let trace = ContinuationTrace::start(p, gs).unwrap();
    let pt = trace.last();
    assert_eq!(pt.n, n);
    assert!((pt.energy_per_spin - epn).abs() < 1e-6);
    assert!((pt.min_re - lo).abs() < 1e-6 && (pt.max_re - hi).abs() < 1e-6);
    // the printed 0.327300 is one digit off the computed 0.327400
    assert!((pt.lambda1_n() - 0.327400).abs() < 1e-6);
    assert!((pt.lambda1_n() - l1n).abs() < 1e-4);
    assert!(pt.lambda1 > 0.0 && pt.lambda1 < p.a);
}

#[test]
fn seed_is_rejected_for_large_n() {
    assert!(ground_state_seed(&params().with_n(40).unwrap(), &SeedOptions::default()).is_err());
}

#[test]
fn arc_fit_properties() {
    let ctx = EllipticContext::new(0.5).unwrap();
    let gs = &chain().points[0].solution;
    let fit = arc_fit(gs, &ctx).unwrap();
    assert!(!fit.vertical && fit.rms.is_finite());
    assert!(fit.relative_rms() < 1e-3);
    for y in [0.1, 0.3, 0.5] {
        assert!((fit.eval(y, &ctx) - fit.eval(-y, &ctx)).abs() < 1e-14);
    }
    for z in arc_roots(gs) {
        assert!((fit.eval(z.im, &ctx) - z.re).abs() < 1e-3 * fit.spread.max(1e-12) + 1e-9);
    }

    let flat: Vec<Complex64> = [-0.4, -0.2, 0.0, 0.2, 0.4]
        .iter()
        .map(|&y| Complex64::new(2.1, y))
        .collect();
    let fit = fit_arc_or_vertical(&flat, &ctx);
    for y in [-0.3, 0.0, 0.35] {
        assert!((fit.eval(y, &ctx) - 2.1).abs() < 1e-9);
    }
    assert!(fit.rms < 1e-9);

    assert!(matches!(
        fit_arc_points(&flat[..3], &ctx),
        Err(Error::InsufficientPoints { got: 3, need: 4 })
    ));
}

#[test]
fn arc_fit_quality_along_the_chain() {
    for pt in &chain().points {
        assert!(!pt.fit.vertical, "N = {}", pt.n);
        assert!(
            pt.fit.relative_rms() < 1e-3,
            "N = {}: {}",
            pt.n,
            pt.fit.relative_rms()
        );
    }
}

#[test]
fn single_step_twelve_to_twenty() {
    let p = params();
    let gs = ground_state_seed(&p, &SeedOptions::default()).unwrap();
    let mut trace = ContinuationTrace::start(p, gs).unwrap();
    continuation_step(&mut trace, 20, &ContinuationOptions::default()).unwrap();
    assert_eq!(trace.sizes(), vec![12, 20]);
    let (_, l1n, lo, hi, epn) = common::TABLE_ACSM[1];
    let pt = trace.last();
    assert!((pt.lambda1_n() - l1n).abs() < 1e-6);
    assert!((pt.min_re - lo).abs() < 1e-6 && (pt.max_re - hi).abs() < 1e-6);
    assert!((pt.energy_per_spin - epn).abs() < 1e-6);

    // same size is a no-op; shrinking or odd sizes are rejected
    continuation_step(&mut trace, 20, &ContinuationOptions::default()).unwrap();
    assert_eq!(trace.sizes(), vec![12, 20]);
    assert!(continuation_step(&mut trace, 16, &ContinuationOptions::default()).is_err());
    assert!(continuation_step(&mut trace, 25, &ContinuationOptions::default()).is_err());
}

#[test]
fn chain_reproduces_every_reference_row() {
    let trace = chain();
    for &(n, l1n, lo, hi, epn) in &common::TABLE_ACSM {
        let pt = trace.point(n).unwrap_or_else(|| panic!("missing N = {n}"));
        assert!((pt.lambda1_n() - l1n).abs() < 1e-4, "N = {n} lambda1 N");
        assert!((pt.min_re - lo).abs() < 1e-4, "N = {n} min Re");
        assert!((pt.max_re - hi).abs() < 1e-4, "N = {n} max Re");
        assert!((pt.energy_per_spin - epn).abs() < 1e-4, "N = {n} E/N");
        if n > 12 {
            // all other entries agree to the printed digits
            assert!((pt.lambda1_n() - l1n).abs() < 2e-6, "N = {n}");
            assert!((pt.energy_per_spin - epn).abs() < 2e-6, "N = {n}");
        }
    }
}

#[test]
fn chain_invariants() {
    let trace = chain();
    let p = trace.params;
    for w in trace.points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        assert!(b.n > a.n);
        assert!(
            b.energy_per_spin > a.energy_per_spin,
            "E/N not increasing at N = {}",
            b.n
        );
        assert!(
            b.max_re - b.min_re < a.max_re - a.min_re,
            "arc not narrowing at N = {}",
            b.n
        );
        assert!(b.lambda1_n() > a.lambda1_n());
    }
    for pt in &trace.points {
        let pn = p.with_n(pt.n).unwrap();
        assert!(pt.solution.converged);
        assert!(
            matches_ground_state_pattern(&pt.solution, &pn),
            "N = {}",
            pt.n
        );
        assert!(
            pt.energy_per_spin < classical_energy(&pn).unwrap(),
            "N = {}",
            pt.n
        );
        assert!(pt
            .solution
            .is_conjugation_closed(&EllipticContext::new(p.k).unwrap(), 1e-6));
        assert_eq!(pt.solution.roots().len(), pt.n / 2);
    }
}

#[test]
fn chain_extrapolates_to_the_classical_limit() {
    let ex = extrapolate_trace(chain()).unwrap();
    let (l1n, lo, hi, epn) = common::TABLE_ACSM_LIMIT;
    assert!((ex.energy_per_spin.limit_value - epn).abs() < 1e-3);
    assert!((ex.energy_per_spin.limit_value - epn).abs() < 1e-5);
    assert!((ex.energy_per_spin.limit_value - common::CLASSICAL_LIMIT).abs() < 1e-5);
    assert!((ex.lambda1_n.limit_value - l1n).abs() < 1e-5);
    assert!((ex.min_re.limit_value - lo).abs() < 1e-5);
    assert!((ex.max_re.limit_value - hi).abs() < 1e-5);
}

#[test]
fn extrapolating_the_reference_rows() {
    let ns: Vec<f64> = common::TABLE_ACSM.iter().map(|r| r.0 as f64).collect();
    let col = |f: fn(&(usize, f64, f64, f64, f64)) -> f64| -> Vec<f64> {
        common::TABLE_ACSM.iter().map(f).collect()
    };
    let (l1n, lo, hi, epn) = common::TABLE_ACSM_LIMIT;
    let e = extrapolate(&ns, &col(|r| r.4)).unwrap();
    assert!((e.limit_value - epn).abs() < 1e-5);
    assert!(e.residuals.iter().all(|r| r.abs() < 1e-5));
    assert!((extrapolate(&ns, &col(|r| r.1)).unwrap().limit_value - l1n).abs() < 1e-5);
    assert!((extrapolate(&ns, &col(|r| r.2)).unwrap().limit_value - lo).abs() < 2e-6);
    assert!((extrapolate(&ns, &col(|r| r.3)).unwrap().limit_value - hi).abs() < 2e-6);

    assert!(matches!(
        extrapolate(&ns[..3], &col(|r| r.4)[..3]),
        Err(Error::InsufficientPoints { got: 3, need: 4 })
    ));
}

#[test]
fn excited_states_keep_the_arc() {
    let p = params();
    let gs = &chain().points[0].solution;
    let states = excited_states(&p, gs, 3, 2000, 12).unwrap();
    assert_eq!(states.len(), 3);
    let ground = -gs.r[0].re;
    let ed = ed_levels(12);
    let mut last = ground;
    for s in &states {
        let e = -s.r[0].re;
        assert!(e > last + 1e-6, "levels must increase: {e}");
        last = e;
        let nearest = ed.iter().fold(f64::INFINITY, |m, x| m.min((x - e).abs()));
        assert!(nearest < 1e-8, "{e} is not an ED level");
        let layout = root_layout(s, &p);
        assert!(layout.arc >= 3 && layout.detached >= 1, "{layout:?}");
        assert_eq!(layout.near_centre + layout.arc + layout.detached, 6);
    }
    let gs_layout = root_layout(gs, &p);
    assert_eq!(
        (gs_layout.near_centre, gs_layout.arc, gs_layout.detached),
        (1, 5, 0)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// No classical configuration goes below the x-aligned energy.
    #[test]
    fn x_aligned_is_a_lower_bound(angles in prop::collection::vec((0.0f64..3.15, 0.0f64..6.3), 12)) {
        let p = params();
        let spins: Vec<ClassicalSpin> = angles.iter().map(|&(t, f)| ClassicalSpin::new(t, f)).collect();
        let e = classical_configuration_energy(&p, &spins).unwrap() / 12.0;
        prop_assert!(e >= classical_energy(&p).unwrap() - 1e-14);
    }

    /// Exactly cubic data in `1/N` is recovered.
    #[test]
    fn cubic_data_is_recovered(c in prop::collection::vec(-2.0f64..2.0, 4)) {
        let ns = [12.0, 20.0, 40.0, 80.0, 100.0, 200.0, 300.0];
        let ys: Vec<f64> = ns.iter().map(|n| {
            let x = 1.0 / n;
            c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x
        }).collect();
        let fit = extrapolate(&ns, &ys).unwrap();
        prop_assert!((fit.limit_value - c[0]).abs() < 1e-9);
        prop_assert!((fit.eval(50.0) - (c[0] + c[1] / 50.0 + c[2] / 2500.0 + c[3] / 125_000.0)).abs() < 1e-9);
    }
}
