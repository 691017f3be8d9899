//! Photon-pair ladder algebra on the even Fock subspace.
//!
//! The pair operators G† = a†² and G = a² change the number of quanta by
//! two, but [G, G†] is not the identity, so they are not canonical by
//! themselves.  Weighting the lowering side with X = ½(1 + a†a)⁻¹ repairs
//! the algebra on the even subspace: [XG, G†] = 1 there, XG and G† ladder
//! through the states |2n⟩, and a hermitian two-photon Hamiltonian
//!
//! ```text
//! H_S = ½ ħω S(β) [ a†² (1 + a†a)⁻¹ a² + 1 ] S†(β)
//! ```
//!
//! has the squeezed pair states |2n; β⟩ = S(β)|2n⟩ as eigenstates with the
//! oscillator spectrum ω(n + ½).  Their geometric phases around β-loops
//! therefore reduce to the ordinary squeeze phases at level index 2n.
//!
//! A genuinely canonical pair ladder also exists: a₁ = 2^{-1/2}(1+a†a)^{-1/2}a²
//! satisfies [a₁, a₁†] = 1 with number operator a₁†a₁ = ½a†a, and iterating
//! the same square-root construction walks down the nested subspaces of
//! stride 2ᵏ.  The `ak_operator` recursion and `isomorphism_check` make that
//! hierarchy concrete.

use num_complex::Complex64;

use crate::berry::{
    closed_form_displacement_phase, closed_form_squeeze_phase, wilson_phase_from_states, ParamLoop,
    PhaseReport,
};
use crate::deform::{
    basis_rotation_op, crop, eigenstate, ladder_at, padded_dim, squeeze_op, ParamPoint, EXPM_TOL,
};
use crate::error::{Error, Result};
use crate::ops::{
    annihilator, apply, inner, leading_dim, matrix_exponential, number_function, CMat, StateVector,
    DEFAULT_TAIL_TOL,
};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn require_no_displacement(point: &ParamPoint) -> Result<()> {
    if point.alpha.norm() != 0.0 {
        return Err(Error::Precondition(format!(
            "the pair-ladder system carries no displacement; α must be zero, got {}",
            point.alpha
        )));
    }
    Ok(())
}

/// Index map embedding the stride-2ᵏ subspace into the full Fock basis:
/// sub-basis vector n sits at parent index 2ᵏ·n.
#[derive(Clone, Copy, Debug)]
pub struct SubspaceMap {
    pub level: u32,
    pub dim_parent: usize,
    pub dim_sub: usize,
}

impl SubspaceMap {
    /// Requires the parent space to hold at least eight sub-basis vectors.
    pub fn new(level: u32, dim_parent: usize) -> Result<Self> {
        let stride = 1usize
            .checked_shl(level)
            .ok_or_else(|| Error::Domain(format!("subspace level {level} overflows")))?;
        let min = stride * 8;
        if dim_parent < min {
            return Err(Error::DimensionTooSmall {
                dim: dim_parent,
                min,
            });
        }
        Ok(SubspaceMap {
            level,
            dim_parent,
            dim_sub: (dim_parent - 1) / stride + 1,
        })
    }

    pub fn stride(&self) -> usize {
        1usize << self.level
    }

    /// Parent-basis index of the n-th sub-basis vector.
    pub fn parent_index(&self, n: usize) -> usize {
        n * self.stride()
    }

    pub fn contains(&self, parent_index: usize) -> bool {
        parent_index < self.dim_parent && parent_index.is_multiple_of(self.stride())
    }
}

/// Largest |entry| over even-indexed columns below `col_limit` (all rows).
fn max_abs_even_columns(m: &CMat, col_limit: usize) -> f64 {
    let mut max = 0.0f64;
    for j in (0..col_limit.min(m.ncols())).step_by(2) {
        for i in 0..m.nrows() {
            max = max.max(m[(i, j)].norm());
        }
    }
    max
}

/// The diagonal weight X = ½(1 + a†a)⁻¹.
pub fn x_operator(dim: usize) -> Result<CMat> {
    number_function(|x| 0.5 / x, dim)
}

/// Pair lowering G = a² in the reference basis.
pub fn pair_lowering(dim: usize) -> Result<CMat> {
    let a = annihilator(dim)?;
    Ok(&a * &a)
}

/// Pair raising G† = a†².
pub fn pair_raising(dim: usize) -> Result<CMat> {
    Ok(pair_lowering(dim)?.adjoint())
}

/// The weighted lowering XG = ½(1 + a†a)⁻¹ a², canonical partner of G† on
/// the even subspace.
pub fn weighted_pair_lowering(dim: usize) -> Result<CMat> {
    Ok(x_operator(dim)? * pair_lowering(dim)?)
}

/// Max deviation of [XG, G†] from the identity on even-indexed columns
/// below the truncation band.
pub fn pair_commutator_check(dim: usize) -> Result<f64> {
    let xg = weighted_pair_lowering(dim)?;
    let gd = pair_raising(dim)?;
    let defect = &xg * &gd - &gd * &xg - CMat::identity(dim, dim);
    Ok(max_abs_even_columns(
        &defect,
        leading_dim(dim).saturating_sub(2),
    ))
}

/// Apply XG to the squeezed vacuum S(β)|0⟩ and fit the eigenvalue: returns
/// (fitted value, residual norm).  The analytic eigenvalue is
/// (β/2|β|)·tanh|β|; β = 0 returns (0, 0) since the vacuum is annihilated.
pub fn squeezed_vacuum_eigen_check(beta: Complex64, dim: usize) -> Result<(Complex64, f64)> {
    if beta.norm() == 0.0 {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let point = ParamPoint::reference().with_beta(beta);
    let vacuum = eigenstate(0, &point, dim)?;
    let image = apply(&weighted_pair_lowering(dim)?, &vacuum)?;
    let fitted = inner(&vacuum, &image)?;
    let residual = (&image.amplitudes - &vacuum.amplitudes * fitted).norm();
    Ok((fitted, residual))
}

/// The hermitian pair Hamiltonian H_S = ½ω S [a†²(1+a†a)⁻¹a² + 1] S†, built
/// on the ladder a(R) of the given parameter point (α must be zero).
pub fn multiphoton_hamiltonian(point: &ParamPoint, dim: usize) -> Result<CMat> {
    point.validate()?;
    require_no_displacement(point)?;
    // operator products spread past the nominal dimension, so assemble with
    // headroom and crop at the end
    let dp = padded_dim(dim);
    let a = ladder_at(point, dp)?;
    let a_dag = a.adjoint();
    // (1 + a(R)†a(R))⁻¹ = M (1 + a₀†a₀)⁻¹ M† through the basis rotation
    let rot = basis_rotation_op(point, dp)?;
    let inv_shifted = &rot * number_function(|x| 1.0 / x, dp)? * rot.adjoint();
    let core = &a_dag * &a_dag * inv_shifted * (&a * &a) + CMat::identity(dp, dp);
    let s = squeeze_op(point.beta, point, dp)?;
    Ok(crop(
        &(&s * core * s.adjoint() * re(0.5 * point.omega)),
        dim,
    ))
}

/// The n-th pair eigenstate |2n; β⟩ = S(β)|2n⟩ — identical to the ordinary
/// deformed eigenstate at level 2n with zero displacement.
pub fn multiphoton_eigenstate(n: usize, point: &ParamPoint, dim: usize) -> Result<StateVector> {
    require_no_displacement(point)?;
    eigenstate(2 * n, point, dim)
}

/// The same state built the other way around: squeeze the vacuum first,
/// then climb with the deformed pair raiser (S a†² S†)ⁿ.  Must land on the
/// same ray as [`multiphoton_eigenstate`].
pub fn multiphoton_eigenstate_by_raising(
    n: usize,
    point: &ParamPoint,
    dim: usize,
) -> Result<StateVector> {
    require_no_displacement(point)?;
    let mut state = eigenstate(0, point, dim)?;
    if n > 0 {
        let a = ladder_at(point, dim)?;
        let s = squeeze_op(point.beta, point, dim)?;
        let raiser = &s * (a.adjoint() * a.adjoint()) * s.adjoint();
        for _ in 0..n {
            state = apply(&raiser, &state)?;
        }
        state.check_tail(DEFAULT_TAIL_TOL)?;
        state = state.normalized();
    }
    Ok(state)
}

/// Geometric phase of |2n; β⟩ around a loop in (β, λ); the closed form is
/// the squeeze phase at level index 2n.  Every loop point must have α = 0.
pub fn multiphoton_phase(n: usize, lp: &ParamLoop, dim: usize) -> Result<PhaseReport> {
    for p in lp.points() {
        require_no_displacement(p)?;
    }
    let states: Vec<StateVector> = lp
        .points()
        .iter()
        .map(|p| multiphoton_eigenstate(n, p, dim))
        .collect::<Result<_>>()?;
    let wilson = wilson_phase_from_states(&states)?;
    let gamma_displacement = closed_form_displacement_phase(lp);
    let gamma_squeeze = closed_form_squeeze_phase(lp, 2 * n);
    let gamma_closed = gamma_displacement + gamma_squeeze;
    Ok(PhaseReport {
        n,
        gamma_wilson: wilson.phase,
        gamma_closed,
        gamma_displacement,
        gamma_squeeze,
        discrepancy: (wilson.phase - gamma_closed).abs(),
        dim,
        segments: lp.segments(),
        min_overlap: wilson.min_overlap,
    })
}

/// Defect of the naive pair displacement exp(ξG† − ξ*XG): the weighted
/// ladder is not the adjoint of G†, so this exponential is not unitary.
/// Returns ‖E†E − I‖_max on the leading even block.
pub fn naive_pair_displacement_defect(xi: Complex64, dim: usize) -> Result<f64> {
    // padded so the measured defect is the algebraic one, not a
    // truncation artifact
    let dp = padded_dim(dim);
    let gen = pair_raising(dp)? * xi - weighted_pair_lowering(dp)? * xi.conj();
    let e = matrix_exponential(&gen, EXPM_TOL)?;
    let defect = e.adjoint() * &e - CMat::identity(dp, dp);
    Ok(max_abs_even_columns(&defect, leading_dim(dim)))
}

/// The canonical pair ladder a₁ = 2^{-1/2}(1 + a†a)^{-1/2} a², with the
/// inverse square root taken exactly on the diagonal.
pub fn a1_operator(dim: usize) -> Result<CMat> {
    let a = annihilator(dim)?;
    let inv_sqrt = number_function(|x| x.powf(-0.5), dim)?;
    Ok(inv_sqrt * (&a * &a) * re(std::f64::consts::FRAC_1_SQRT_2))
}

/// Level-k ladder from the recursion a_k = 2^{-1/2}(1 + a_{k-1}†a_{k-1})^{-1/2} a_{k-1}².
/// Each number operator a_{k-1}†a_{k-1} stays diagonal in the reference
/// basis, so its inverse square root is taken entrywise.
pub fn ak_operator(level: u32, dim: usize) -> Result<CMat> {
    let _ = SubspaceMap::new(level, dim)?;
    let mut op = annihilator(dim)?;
    for step in 0..level {
        let n_op = op.adjoint() * &op;
        let mut inv_sqrt = CMat::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                if i != j && n_op[(i, j)].norm() > 1e-12 {
                    return Err(Error::Domain(format!(
                        "pair-number operator lost diagonality at recursion step {step}"
                    )));
                }
            }
            inv_sqrt[(i, i)] = re((1.0 + n_op[(i, i)].re).powf(-0.5));
        }
        op = inv_sqrt * (&op * &op) * re(std::f64::consts::FRAC_1_SQRT_2);
    }
    Ok(op)
}

/// Max deviation of ⟨2ᵏm| a_k |2ᵏn⟩ from the reference ladder elements
/// √n·δ_{m,n−1} over the whole embedded sub-basis.
pub fn isomorphism_check(level: u32, dim: usize) -> Result<f64> {
    let map = SubspaceMap::new(level, dim)?;
    let ak = ak_operator(level, dim)?;
    let mut worst = 0.0f64;
    for n in 0..map.dim_sub {
        for m in 0..map.dim_sub {
            let expected = if m + 1 == n { (n as f64).sqrt() } else { 0.0 };
            let got = ak[(map.parent_index(m), map.parent_index(n))];
            worst = worst.max((got - re(expected)).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::berry::ParamLoop;
    use crate::berry::{Coord, LissajousComponent};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn subspace_map_arithmetic() {
        let id = SubspaceMap::new(0, 16).unwrap();
        assert_eq!(id.dim_sub, 16);
        assert_eq!(id.parent_index(7), 7);

        let pairs = SubspaceMap::new(1, 40).unwrap();
        assert_eq!(pairs.dim_sub, 20);
        assert_eq!(pairs.parent_index(3), 6);
        assert!(pairs.contains(6) && !pairs.contains(7));

        assert!(matches!(
            SubspaceMap::new(3, 32),
            Err(Error::DimensionTooSmall { min: 64, .. })
        ));
    }

    #[test]
    fn x_operator_is_the_shifted_inverse() {
        let x = x_operator(5).unwrap();
        for n in 0..5 {
            assert!((x[(n, n)].re - 0.5 / (1.0 + n as f64)).abs() < 1e-15);
        }
    }

    #[test]
    fn weighted_pair_is_canonical_on_the_even_subspace() {
        let dev = pair_commutator_check(40).unwrap();
        assert!(dev < 1e-12, "deviation {dev}");
    }

    #[test]
    fn weighted_lowering_annihilates_the_vacuum() {
        let dim = 20;
        let xg = weighted_pair_lowering(dim).unwrap();
        let vac = StateVector::basis_state(0, dim).unwrap();
        assert!(apply(&xg, &vac).unwrap().norm() < 1e-15);
    }

    #[test]
    fn raising_then_weighted_lowering_counts_pairs() {
        let dim = 60;
        let number = pair_raising(dim).unwrap() * weighted_pair_lowering(dim).unwrap();
        for n in 0..=5usize {
            let state = StateVector::basis_state(2 * n, dim).unwrap();
            let image = apply(&number, &state).unwrap();
            let residual = (&image.amplitudes - &state.amplitudes * re(n as f64)).norm();
            assert!(residual < 1e-12, "n={n}: residual {residual}");
        }
    }

    #[test]
    fn squeezed_vacuum_is_an_eigenvector_of_the_weighted_lowering() {
        let dim = 80;
        for beta in [c(0.4, 0.0), c(0.0, 0.4), c(0.3, 0.2)] {
            let (fitted, residual) = squeezed_vacuum_eigen_check(beta, dim).unwrap();
            let b = beta.norm();
            let expected = beta * re(b.tanh() / (2.0 * b));
            assert!(
                (fitted - expected).norm() / expected.norm() < 1e-8,
                "β={beta}: {fitted} vs {expected}"
            );
            assert!(residual < 1e-8, "β={beta}: residual {residual}");
        }
        // the real-β value is ½·tanh 0.4 ≈ 0.18997
        let (fitted, _) = squeezed_vacuum_eigen_check(c(0.4, 0.0), dim).unwrap();
        assert!((fitted.re - 0.18997448).abs() < 1e-7 && fitted.im.abs() < 1e-12);
        assert_eq!(
            squeezed_vacuum_eigen_check(c(0.0, 0.0), dim).unwrap(),
            (c(0.0, 0.0), 0.0)
        );
    }

    #[test]
    fn pair_hamiltonian_is_diagonal_at_the_reference() {
        let dim = 30;
        let h = multiphoton_hamiltonian(&ParamPoint::reference(), dim).unwrap();
        for k in 0..dim / 2 {
            // even levels k + ½; odd levels k + 1 except |1⟩, which the pair
            // lowering annihilates, leaving only the constant ½ (here ω = 1)
            assert!(
                (h[(2 * k, 2 * k)].re - (k as f64 + 0.5)).abs() < 1e-12,
                "even level {k}"
            );
            if 2 * k + 1 < dim {
                let odd = if k == 0 { 0.5 } else { k as f64 + 1.0 };
                assert!(
                    (h[(2 * k + 1, 2 * k + 1)].re - odd).abs() < 1e-12,
                    "odd level {k}"
                );
            }
        }
        let off = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j)
            .map(|(i, j)| h[(i, j)].norm())
            .fold(0.0, f64::max);
        assert!(off < 1e-12, "off-diagonal leakage {off}");
    }

    #[test]
    fn pair_hamiltonian_keeps_its_spectrum_at_other_frequencies() {
        // at ω ≠ 1 the matrix lives in the rotated number basis and is no
        // longer diagonal, but the eigenvalues ω(k + ½) survive
        let dim = 80;
        let point = ParamPoint {
            omega: 2.0,
            ..ParamPoint::reference()
        };
        let h = multiphoton_hamiltonian(&point, dim).unwrap();
        for k in 0..5usize {
            let state = multiphoton_eigenstate(k, &point, dim).unwrap();
            let image = apply(&h, &state).unwrap();
            let expected = 2.0 * (k as f64 + 0.5);
            let residual = (&image.amplitudes - &state.amplitudes * re(expected)).norm();
            assert!(residual < 1e-8, "k={k}: residual {residual}");
        }
    }

    #[test]
    fn squeezed_pair_states_solve_the_eigenvalue_problem() {
        let dim = 100;
        let point = ParamPoint::reference().with_beta(c(0.3, 0.0));
        let h = multiphoton_hamiltonian(&point, dim).unwrap();
        let dev = crate::ops::max_abs_diff_block(&h, &h.adjoint(), leading_dim(dim));
        assert!(dev < 1e-9, "hermiticity {dev}");
        for n in 0..3usize {
            let state = multiphoton_eigenstate(n, &point, dim).unwrap();
            let image = apply(&h, &state).unwrap();
            let expected = point.omega * (n as f64 + 0.5);
            let residual = (&image.amplitudes - &state.amplitudes * re(expected)).norm();
            assert!(residual < 1e-7, "n={n}: residual {residual}");
        }
    }

    #[test]
    fn pair_hamiltonian_respects_the_bogoliubov_basis() {
        let dim = 100;
        let point = ParamPoint::reference()
            .with_beta(c(0.2, 0.1))
            .with_lambda(0.4);
        let h = multiphoton_hamiltonian(&point, dim).unwrap();
        let state = multiphoton_eigenstate(1, &point, dim).unwrap();
        let image = apply(&h, &state).unwrap();
        let expected = point.omega * 1.5;
        let residual = (&image.amplitudes - &state.amplitudes * re(expected)).norm();
        assert!(residual < 1e-7, "residual {residual}");
    }

    #[test]
    fn both_construction_orders_give_the_same_ray() {
        let dim = 100;
        let point = ParamPoint::reference().with_beta(c(0.3, 0.15));
        for n in [1usize, 2] {
            let direct = multiphoton_eigenstate(n, &point, dim).unwrap();
            let raised = multiphoton_eigenstate_by_raising(n, &point, dim).unwrap();
            let modulus = inner(&direct, &raised).unwrap().norm();
            assert!((modulus - 1.0).abs() < 1e-8, "n={n}: modulus {modulus}");
        }
    }

    #[test]
    fn displacement_is_rejected_everywhere() {
        let dim = 40;
        let point = ParamPoint::reference().with_alpha(c(0.2, 0.0));
        assert!(matches!(
            multiphoton_hamiltonian(&point, dim),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            multiphoton_eigenstate(0, &point, dim),
            Err(Error::Precondition(_))
        ));
        let lp = ParamLoop::circle(&point, Coord::Beta1, Coord::Beta2, 0.1, 20, true).unwrap();
        assert!(matches!(
            multiphoton_phase(0, &lp, dim),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn pair_phase_tracks_the_doubled_level_index() {
        let lp = ParamLoop::circle(
            &ParamPoint::reference(),
            Coord::Beta1,
            Coord::Beta2,
            0.25,
            400,
            true,
        )
        .unwrap();
        let report = multiphoton_phase(1, &lp, 120).unwrap();
        // closed form at level index 2: −(2+½)·2π sinh²(0.25)
        let expected = -2.5 * 2.0 * PI * 0.25f64.sinh().powi(2);
        assert!((report.gamma_closed - expected).abs() < 1e-4);
        assert!(
            report.discrepancy < 1e-3,
            "discrepancy {}",
            report.discrepancy
        );
        assert_eq!(report.gamma_displacement, 0.0);
    }

    #[test]
    fn pair_vacuum_phase_equals_the_oscillator_ground_phase() {
        let lp = ParamLoop::circle(
            &ParamPoint::reference(),
            Coord::Beta1,
            Coord::Beta2,
            0.2,
            48,
            true,
        )
        .unwrap();
        let pair = multiphoton_phase(0, &lp, 80).unwrap();
        let osc = crate::berry::wilson_loop(&lp, 0, 80).unwrap();
        assert_eq!(
            pair.gamma_wilson, osc.phase,
            "identical states, identical phase"
        );
    }

    #[test]
    fn frequency_only_pair_loops_carry_no_phase() {
        let base = ParamPoint::reference().with_beta(c(0.2, 0.0));
        let comps = [LissajousComponent {
            coord: Coord::Lambda,
            amplitude: 0.15,
            frequency: 1,
            phase: 0.0,
        }];
        let lp = ParamLoop::lissajous(&base, &comps, 32).unwrap();
        let report = multiphoton_phase(1, &lp, 100).unwrap();
        assert!(
            report.gamma_wilson.abs() < 1e-8,
            "γ = {}",
            report.gamma_wilson
        );
        assert_eq!(report.gamma_closed, 0.0);
    }

    #[test]
    fn naive_pair_displacement_is_visibly_non_unitary() {
        let defect = naive_pair_displacement_defect(c(0.5, 0.0), 80).unwrap();
        assert!(defect > 0.01, "defect {defect}");
    }

    #[test]
    fn canonical_pair_ladder_steps_with_root_n() {
        let dim = 40;
        let a1 = a1_operator(dim).unwrap();
        for n in 1..=5usize {
            let got = a1[(2 * (n - 1), 2 * n)];
            assert!((got - re((n as f64).sqrt())).norm() < 1e-12, "n={n}: {got}");
        }
        let comm = &a1 * a1.adjoint() - a1.adjoint() * &a1 - CMat::identity(dim, dim);
        let dev = max_abs_even_columns(&comm, leading_dim(dim).saturating_sub(2));
        assert!(dev < 1e-12, "deviation {dev}");
    }

    #[test]
    fn pair_number_operator_has_integer_spectrum() {
        let dim = 40;
        let a1 = a1_operator(dim).unwrap();
        let n_op = a1.adjoint() * &a1;
        for k in 0..(dim - 2) / 2 {
            assert!(
                (n_op[(2 * k, 2 * k)].re - k as f64).abs() < 1e-12,
                "level {k}"
            );
        }
    }

    #[test]
    fn parity_is_preserved_by_every_pair_operator() {
        let dim = 40;
        let ops: Vec<CMat> = vec![
            x_operator(dim).unwrap(),
            weighted_pair_lowering(dim).unwrap(),
            pair_raising(dim).unwrap(),
            multiphoton_hamiltonian(&ParamPoint::reference().with_beta(c(0.3, 0.1)), dim).unwrap(),
            a1_operator(dim).unwrap(),
        ];
        for (which, m) in ops.iter().enumerate() {
            let mut leak = 0.0f64;
            for j in (0..dim).step_by(2) {
                for i in (1..dim).step_by(2) {
                    leak = leak.max(m[(i, j)].norm());
                }
            }
            assert!(leak < 1e-12, "operator {which} leaks parity: {leak}");
        }
    }

    #[test]
    fn the_ladder_hierarchy_is_isomorphic_to_the_reference() {
        let level_one = ak_operator(1, 40).unwrap();
        let direct = a1_operator(40).unwrap();
        let dev = crate::ops::max_abs_diff_block(&level_one, &direct, 40);
        assert!(dev < 1e-13, "level-1 construction mismatch {dev}");
        let dev1 = isomorphism_check(1, 40).unwrap();
        assert!(dev1 < 1e-12, "level 1 deviation {dev1}");
        let dev2 = isomorphism_check(2, 128).unwrap();
        assert!(dev2 < 1e-10, "level 2 deviation {dev2}");
        assert!(matches!(
            ak_operator(4, 64),
            Err(Error::DimensionTooSmall { .. })
        ));
    }
}
