mod common;

use anticross::hamiltonian::{eigenvalues, finite_difference_derivatives, Domain, TwoLevelModel};
use anticross::metrology::{qfi_fidelity_oracle_default, qfi_ground};
use anticross::zoo::{
    perturbation_qfi_closed_form, rabi_qfi_resonance, three_level_effective, three_level_qfi_first_order,
    DeltaConvention, PerturbationModel, PerturbationParams, RabiParams,
};
use common::*;
use std::f64::consts::FRAC_PI_4;

#[test]
fn closed_form_matches_fidelity_oracle_on_every_model() {
    for model in zoo() {
        for lambda in interior(model.domain(), 100) {
            let c = model.coefficients(lambda);
            let h = qfi_ground(&c, &model.derivatives(lambda).unwrap()).unwrap();
            let oracle = qfi_fidelity_oracle_default(&model, lambda).unwrap();
            assert!(
                (h - oracle).abs() <= 1e-5 * h.max(1e-12),
                "{} at {lambda}: {h} vs {oracle}",
                model.name()
            );
        }
    }
}

#[test]
fn analytic_derivatives_match_finite_differences() {
    for model in zoo() {
        for lambda in interior(model.domain(), 50) {
            let a = model.analytic_derivatives(lambda).unwrap();
            let f = finite_difference_derivatives(&model, lambda, 1e-5).unwrap();
            let scale = a.d_omega0.abs().max(a.d_delta.abs()).max(a.d_gamma.abs());
            for (x, y) in [(a.d_omega0, f.d_omega0), (a.d_delta, f.d_delta), (a.d_gamma, f.d_gamma)] {
                assert!((x - y).abs() <= 1e-6 * scale, "{} at {lambda}: {x} vs {y}", model.name());
            }
        }
    }
}

fn perturbation(phi: f64) -> PerturbationModel {
    PerturbationModel::new(PerturbationParams::new(0.0, 1.0, 1.0, phi).unwrap(), Domain::new(-3.0, 3.0).unwrap())
        .unwrap()
}

#[test]
fn perturbation_gap_closes_only_as_phi_vanishes() {
    let mut prev = f64::INFINITY;
    for k in (1..=20).rev() {
        let phi = FRAC_PI_4 * k as f64 / 20.0;
        let m = perturbation(phi);
        let min_gap = (0..=6000)
            .map(|i| eigenvalues(&m.coefficients(-3.0 + i as f64 * 1e-3)).gap)
            .fold(f64::INFINITY, f64::min);
        // minimum of δ²+2δλε·cos2φ+λ²ε² is δ²·sin²2φ
        assert!((min_gap - (2.0 * phi).sin()).abs() <= 1e-6);
        assert!(min_gap > 0.0 && min_gap < prev);
        prev = min_gap;
    }
}

#[test]
fn quarter_pi_qfi_is_even_and_peaked() {
    let p = PerturbationParams::new(0.0, 1.0, 1.0, FRAC_PI_4).unwrap();
    let mut prev = perturbation_qfi_closed_form(&p, 0.0).unwrap();
    for k in 1..=300 {
        let l = k as f64 * 0.01;
        let plus = perturbation_qfi_closed_form(&p, l).unwrap();
        let minus = perturbation_qfi_closed_form(&p, -l).unwrap();
        assert!((plus - minus).abs() <= 1e-15 * plus);
        assert!(plus < prev);
        prev = plus;
    }
}

#[test]
fn rabi_resonance_closed_form() {
    let p = RabiParams::new(1.0, 1.0, DeltaConvention::Paper).unwrap();
    for k in 1..400 {
        let y = k as f64 * 0.01;
        let expected = 1.0 / (64.0 * (1.0 - y + 17.0 * y * y / 64.0).powi(2));
        let h = rabi_qfi_resonance(&p, y).unwrap();
        assert!((h - expected).abs() <= 1e-10 * expected, "{y}: {h} vs {expected}");
    }
}

#[test]
fn three_level_expansion_is_second_order() {
    let base = linear_gamma(Domain::real_line());
    let c = base.coefficients(0.5);
    let d = base.derivatives(0.5).unwrap();
    let residual = |kappa: f64| {
        let exact = qfi_ground(&three_level_effective(&c, kappa), &d).unwrap();
        (three_level_qfi_first_order(&c, &d, kappa).unwrap() - exact).abs()
    };
    let ratio = residual(1e-3) / residual(5e-4);
    assert!((ratio - 4.0).abs() <= 0.8, "{ratio}");
    assert!(residual(1e-3) <= 10.0 * 1e-6 * qfi_ground(&c, &d).unwrap());
}
