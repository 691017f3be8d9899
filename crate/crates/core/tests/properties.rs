//! Property-based checks of the invariants the phase machinery is built
//! on: conjugation algebra, unitarity of the deformation operators, gauge
//! invariance and orientation covariance of the Wilson product, level
//! (in)dependence of the two phase families, parity closure of the pair
//! algebra, and affinity of the closed forms in the level index.

use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

use anholonomy::berry::{
    closed_form_phase, loop_states, wilson_loop, wilson_phase_from_states, Coord,
    LissajousComponent, ParamLoop,
};
use anholonomy::deform::{displace_op, eigenstate, squeeze_op, ParamPoint};
use anholonomy::multiphoton::{
    a1_operator, multiphoton_hamiltonian, pair_raising, weighted_pair_lowering, x_operator,
};
use anholonomy::ops::{adjoint, apply, inner, StateVector};
use anholonomy::{CMat, CVec};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Complex number drawn from a centered square of the given half-width.
fn complex_in(half_width: f64) -> impl Strategy<Value = Complex64> {
    (-half_width..half_width, -half_width..half_width).prop_map(|(re, im)| c(re, im))
}

/// Parameter point with moderate deformations, safely inside the region
/// the default truncation handles.
fn param_point() -> impl Strategy<Value = ParamPoint> {
    (complex_in(0.4), complex_in(0.3), -0.35..0.35f64).prop_map(|(alpha, beta, lambda)| {
        ParamPoint::reference()
            .with_alpha(alpha)
            .with_beta(beta)
            .with_lambda(lambda)
    })
}

/// Normalized Fock-basis state of dimension `dim` supported on the lowest
/// `support` indices, so that truncation plays no role.
fn low_state(dim: usize, support: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), support).prop_filter_map(
        "state must not be numerically null",
        move |entries| {
            let mut v = CVec::zeros(dim);
            for (i, (re, im)) in entries.iter().enumerate() {
                v[i] = c(*re, *im);
            }
            if v.norm() < 1e-3 {
                return None;
            }
            Some(StateVector::fock(v).normalized())
        },
    )
}

/// Circle loop in either the displacement or the squeeze plane, with an
/// optional offset of the untouched coordinates.
#[derive(Clone, Debug)]
struct LoopCase {
    lp: ParamLoop,
}

fn circle_case() -> impl Strategy<Value = LoopCase> {
    (
        any::<bool>(),
        0.08..0.3f64,
        complex_in(0.15),
        -0.2..0.2f64,
        any::<bool>(),
    )
        .prop_map(|(squeeze_plane, radius, offset, lambda, ccw)| {
            let (x, y, base) = if squeeze_plane {
                (
                    Coord::Beta1,
                    Coord::Beta2,
                    ParamPoint::reference()
                        .with_beta(offset)
                        .with_lambda(lambda),
                )
            } else {
                (
                    Coord::Alpha1,
                    Coord::Alpha2,
                    ParamPoint::reference()
                        .with_alpha(offset)
                        .with_lambda(lambda),
                )
            };
            LoopCase {
                lp: ParamLoop::circle(&base, x, y, radius, 24, ccw).unwrap(),
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Conjugate transposition is an involution, exactly.
    #[test]
    fn adjoint_is_an_involution(
        rows in 1usize..12,
        cols in 1usize..12,
        entries in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 144),
    ) {
        let m = CMat::from_fn(rows, cols, |i, j| {
            let (re, im) = entries[i * cols + j];
            c(re, im)
        });
        prop_assert_eq!(adjoint(&adjoint(&m)), m);
    }

    /// ⟨u|v⟩ = conj⟨v|u⟩ for any pair of same-length states.
    #[test]
    fn inner_product_conjugates_under_swap(
        u in low_state(16, 16),
        v in low_state(16, 16),
    ) {
        let uv = inner(&u, &v).unwrap();
        let vu = inner(&v, &u).unwrap();
        prop_assert!((uv - vu.conj()).norm() <= 1e-12 * (1.0 + uv.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The squeeze and displacement operators transport inner products
    /// faithfully on states that stay clear of the truncation boundary.
    #[test]
    fn deformation_operators_preserve_overlaps(
        point in param_point(),
        u in low_state(56, 10),
        v in low_state(56, 10),
    ) {
        let op = displace_op(point.alpha, &point, 56).unwrap()
            * squeeze_op(point.beta, &point, 56).unwrap();
        let (tu, tv) = (apply(&op, &u).unwrap(), apply(&op, &v).unwrap());
        prop_assert!((tu.norm() - 1.0).abs() < 1e-9, "norm drifted: {}", tu.norm());
        let before = inner(&u, &v).unwrap();
        let after = inner(&tu, &tv).unwrap();
        prop_assert!(
            (before - after).norm() < 1e-9,
            "overlap drifted by {:.3e}",
            (before - after).norm()
        );
    }

    /// Multiplying every vertex state by its own unit-modulus factor leaves
    /// the Wilson phase unchanged: with factors exp(iθ), θ ∈ (−1.2, 1.2),
    /// no segment argument can cross the branch cut, so the phase is
    /// reproduced exactly; unrestricted factors can only shift it by full
    /// turns.
    #[test]
    fn wilson_phase_is_gauge_invariant(
        case in circle_case(),
        n in 0usize..3,
        bounded in prop::collection::vec(-1.2..1.2f64, 24),
        unbounded in prop::collection::vec(-PI..PI, 24),
    ) {
        let states = loop_states(&case.lp, n, 48).unwrap();
        let reference = wilson_phase_from_states(&states).unwrap().phase;

        let gauged: Vec<StateVector> = states
            .iter()
            .zip(&bounded)
            .map(|(s, th)| StateVector::fock(&s.amplitudes * Complex64::from_polar(1.0, *th)))
            .collect();
        let phase = wilson_phase_from_states(&gauged).unwrap().phase;
        prop_assert!(
            (phase - reference).abs() < 1e-12,
            "bounded gauge shifted the phase by {:.3e}",
            (phase - reference).abs()
        );

        let wild: Vec<StateVector> = states
            .iter()
            .zip(&unbounded)
            .map(|(s, th)| StateVector::fock(&s.amplitudes * Complex64::from_polar(1.0, *th)))
            .collect();
        let phase = wilson_phase_from_states(&wild).unwrap().phase;
        let turns = (phase - reference) / (2.0 * PI);
        prop_assert!(
            (turns - turns.round()).abs() < 1e-10,
            "unrestricted gauge shifted the phase by a non-integer number of turns: {turns}"
        );
    }

    /// Traversing any loop backwards negates both phase routes.
    #[test]
    fn orientation_reversal_negates_the_phase(case in circle_case(), n in 0usize..3) {
        let forward = wilson_loop(&case.lp, n, 48).unwrap().phase;
        let backward = wilson_loop(&case.lp.reversed(), n, 48).unwrap().phase;
        prop_assert!(
            (forward + backward).abs() < 1e-10,
            "reversal failed: {forward} vs {backward}"
        );
        let closed_f = closed_form_phase(&case.lp, n);
        let closed_b = closed_form_phase(&case.lp.reversed(), n);
        prop_assert!((closed_f + closed_b).abs() < 1e-12);
    }

    /// Loops that move only α give level-independent phases; loops that
    /// move only β give phases proportional to n + ½.
    #[test]
    fn phase_families_scale_with_the_level_as_expected(
        radius in 0.08..0.3f64,
        offset in complex_in(0.15),
        segments in 24usize..40,
    ) {
        let alpha_loop = ParamLoop::circle(
            &ParamPoint::reference().with_alpha(offset),
            Coord::Alpha1,
            Coord::Alpha2,
            radius,
            segments,
            true,
        )
        .unwrap();
        let g0 = wilson_loop(&alpha_loop, 0, 48).unwrap().phase;
        for n in 1..=2 {
            let gn = wilson_loop(&alpha_loop, n, 48).unwrap().phase;
            prop_assert!((gn - g0).abs() < 1e-8, "displacement phase moved with n: {g0} vs {gn}");
        }

        let beta_loop = ParamLoop::circle(
            &ParamPoint::reference().with_beta(offset),
            Coord::Beta1,
            Coord::Beta2,
            radius,
            segments,
            true,
        )
        .unwrap();
        let s0 = wilson_loop(&beta_loop, 0, 48).unwrap().phase / 0.5;
        for n in 1..=2 {
            let sn = wilson_loop(&beta_loop, n, 48).unwrap().phase / (n as f64 + 0.5);
            prop_assert!(
                (sn - s0).abs() < 1e-8,
                "squeeze phase per (n+1/2) moved with n: {s0} vs {sn}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Every pair-algebra operator preserves the even subspace, and the
    /// eigenstates of undisplaced points have the parity of their level.
    #[test]
    fn pair_algebra_preserves_parity(
        state in low_state(40, 20),
        beta in complex_in(0.3),
        lambda in -0.3..0.3f64,
        n in 0usize..4,
    ) {
        // keep only even components
        let mut even = state.amplitudes.clone();
        for i in (1..even.len()).step_by(2) {
            even[i] = c(0.0, 0.0);
        }
        let even = StateVector::fock(even);
        prop_assume!(even.norm() > 1e-3);

        let point = ParamPoint::reference().with_beta(beta).with_lambda(lambda);
        let ops = [
            x_operator(40).unwrap(),
            pair_raising(40).unwrap(),
            weighted_pair_lowering(40).unwrap(),
            a1_operator(40).unwrap() * adjoint(&a1_operator(40).unwrap()),
            multiphoton_hamiltonian(&point, 40).unwrap(),
        ];
        for op in &ops {
            let image = apply(op, &even).unwrap();
            for i in (1..image.dim()).step_by(2) {
                prop_assert!(
                    image.amplitudes[i].norm() == 0.0,
                    "odd component {i} populated: {:.3e}",
                    image.amplitudes[i].norm()
                );
            }
        }

        let eig = eigenstate(n, &point, 40).unwrap();
        for i in 0..eig.dim() {
            if i % 2 != n % 2 {
                prop_assert!(eig.amplitudes[i].norm() == 0.0);
            }
        }
    }

    /// Both closed-form phase families are affine in the level index, so
    /// second differences over n vanish.
    #[test]
    fn closed_forms_are_affine_in_the_level(
        amp_a in 0.02..0.15f64,
        amp_b in 0.02..0.15f64,
        amp_l in 0.02..0.15f64,
        freq in 1u32..3,
        phase in -PI..PI,
    ) {
        let comps = [
            LissajousComponent { coord: Coord::Alpha1, amplitude: amp_a, frequency: 1, phase: 0.0 },
            LissajousComponent { coord: Coord::Alpha2, amplitude: amp_a, frequency: 1, phase: -PI / 2.0 },
            LissajousComponent { coord: Coord::Beta1, amplitude: amp_b, frequency: freq, phase },
            LissajousComponent { coord: Coord::Beta2, amplitude: amp_b, frequency: 1, phase: 0.3 },
            LissajousComponent { coord: Coord::Lambda, amplitude: amp_l, frequency: freq, phase: -phase },
        ];
        let lp = ParamLoop::lissajous(&ParamPoint::reference(), &comps, 48).unwrap();
        let phases: Vec<f64> = (0..4).map(|n| closed_form_phase(&lp, n)).collect();
        for w in phases.windows(3) {
            let second = w[2] - 2.0 * w[1] + w[0];
            prop_assert!(second.abs() < 1e-12, "second difference {second:.3e}");
        }
    }
}
