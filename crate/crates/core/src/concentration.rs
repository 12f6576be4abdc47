//! Time-band concentration operators and the dimension bound for
//! concentrated subspaces.
//!
//! For spectra `S` (band side) and `Q` (time side, same interval-union
//! representation), the operator `(A f)(x) = Int_Q K_S(x, y) f(y) dy` is
//! discretized by Gauss-Legendre quadrature per interval of `Q` and
//! symmetrized to `D^{1/2} K D^{1/2}`, which keeps the discrete problem
//! Hermitian with real spectrum in `[0, 1]` up to discretization error. Its
//! eigenvalues approximate those of the composition time-limit-then-band-limit,
//! and the trace approximates `mes Q * mes S / (2 pi)`.
//!
//! A subspace that keeps at least the fraction `c` of every member's `L^2`
//! mass on `Q` cannot have dimension beyond `mes Q * mes S / (2 pi c)`; the
//! check is exposed as [`landau_bound_check`].

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_part, CMatrix};
use crate::pwkernel::{kernel, Evaluate};
use crate::quad::Quadrature;
use crate::spectrum::Spectrum;

/// Minimum admissible quadrature resolution.
pub const MIN_NODES: usize = 32;

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub s: Spectrum,
    pub q: Spectrum,
    /// Nonincreasing; inside `[-tol, 1+tol]` for adequate resolutions.
    pub eigenvalues: Vec<f64>,
    pub trace: f64,
    pub expected_trace: f64,
    pub n_nodes: usize,
}

impl ConcentrationReport {
    /// Number of eigenvalues at least `c`.
    pub fn count_at_least(&self, c: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l >= c).count()
    }

    /// The dimension bound at concentration level `c`.
    pub fn level_bound(&self, c: f64) -> f64 {
        self.expected_trace / c
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().unwrap_or(&0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.first().unwrap_or(&0.0)
    }
}

/// Discretizes the concentration operator for `(S, Q)` and returns its
/// spectrum. `n_nodes` is the total quadrature resolution across the
/// intervals of `Q` (at least [`MIN_NODES`]).
pub fn concentration_operator(
    s: &Spectrum,
    q: &Spectrum,
    n_nodes: usize,
) -> Result<ConcentrationReport> {
    if n_nodes < MIN_NODES {
        return Err(Error::invalid_parameter(
            "n_nodes",
            format!("must be >= {MIN_NODES}, got {n_nodes}"),
        ));
    }
    let rule = Quadrature::on_intervals(q.intervals(), n_nodes, 16);
    let n = rule.len();
    let sqrt_w: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let mut b = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = kernel(s, rule.nodes[i], rule.nodes[j]) * (sqrt_w[i] * sqrt_w[j]);
            b[(i, j)] = v;
            b[(j, i)] = v.conj();
        }
    }
    let eig = hermitian_eigen(&b);
    let eigenvalues: Vec<f64> = eig.values.iter().copied().collect();
    let trace: f64 = eigenvalues.iter().sum();
    let expected = q.measure() * s.measure() / (2.0 * std::f64::consts::PI);

    // The clipped trace deviating from the identity indicates the rule does
    // not resolve the kernel yet.
    let clipped: f64 = eigenvalues.iter().map(|l| l.clamp(0.0, 1.0)).sum();
    if (clipped - expected).abs() > 0.05 * expected {
        return Err(Error::ResolutionTooCoarse {
            trace: clipped,
            expected,
            suggested: 2 * n_nodes,
        });
    }

    Ok(ConcentrationReport {
        s: s.clone(),
        q: q.clone(),
        eigenvalues,
        trace,
        expected_trace: expected,
        n_nodes: n,
    })
}

/// Concentration level of the span of `basis` on `Q`: the smallest
/// generalized Rayleigh quotient of mass-on-`Q` against total mass, where
/// "total" is quadrature over `domain` (which must contain `Q`). The two
/// Gram-type matrices share their `Q` nodes, so the quotient is always in
/// `[0, 1]`.
pub fn concentration_of_subspace(
    basis: &[&dyn Evaluate],
    q: &Spectrum,
    domain: &Spectrum,
    nodes_per_unit: f64,
) -> Result<f64> {
    if basis.is_empty() {
        return Err(Error::invalid_parameter("basis", "empty basis".into()));
    }
    if !domain.contains(q) {
        return Err(Error::invalid_parameter(
            "domain",
            "must contain the concentration region Q".into(),
        ));
    }
    let mass_q = mass_matrix(basis, &quad_for(q.intervals(), nodes_per_unit));
    let rest = domain.set_minus(q);
    let mass_total = if rest.is_empty() {
        mass_q.clone()
    } else {
        &mass_q + mass_matrix(basis, &quad_for(&rest, nodes_per_unit))
    };
    rayleigh_min(&mass_q, &mass_total, 0.0)
}

fn quad_for(intervals: &[(f64, f64)], nodes_per_unit: f64) -> Quadrature {
    // 12-node panels sized so the rule stays comfortably past the Nyquist
    // density of the integrands.
    let chunk = (12.0 / nodes_per_unit).min(4.0);
    Quadrature::chunked(intervals, chunk, 12)
}

/// Gram-type quadrature matrix `M[i][j] = Int conj(u_i) u_j` over the rule.
pub fn mass_matrix(basis: &[&dyn Evaluate], rule: &Quadrature) -> CMatrix {
    let k = basis.len();
    let mut vals = CMatrix::zeros(k, rule.len());
    for (i, f) in basis.iter().enumerate() {
        for (idx, &x) in rule.nodes.iter().enumerate() {
            vals[(i, idx)] = f.eval(x);
        }
    }
    weighted_gram(&vals, &rule.weights)
}

/// `V diag(w) V^H` for row-wise sample values `V` (`k x nodes`).
pub fn weighted_gram(vals: &CMatrix, weights: &[f64]) -> CMatrix {
    let k = vals.nrows();
    let mut scaled = vals.clone();
    for (idx, &w) in weights.iter().enumerate() {
        let sw = Complex64::new(w.sqrt(), 0.0);
        for i in 0..k {
            scaled[(i, idx)] *= sw;
        }
    }
    let m = &scaled * scaled.adjoint();
    hermitian_part(&m)
}

/// Smallest generalized Rayleigh quotient `x* A x / x* (B + tau I) x` over
/// the span, for Hermitian `0 <= A <= B`. `tau > 0` turns the result into a
/// certified lower bound when `B` under-counts the true total mass by at
/// most `tau` per unit coefficient norm.
pub fn rayleigh_min(a: &CMatrix, b: &CMatrix, tau: f64) -> Result<f64> {
    let n = b.nrows();
    let mut b_reg = b.clone();
    for i in 0..n {
        b_reg[(i, i)] += Complex64::new(tau, 0.0);
    }
    let eig_b = hermitian_eigen(&b_reg);
    let lam_max = eig_b.values[0].max(f64::MIN_POSITIVE);
    let lam_min = eig_b.values[n - 1];
    if lam_min <= 1e-12 * lam_max {
        return Err(Error::DegenerateSubspace);
    }
    // Whiten: W = U diag(lambda^{-1/2}); spectrum of W* A W is the quotient.
    let mut w = eig_b.vectors.clone();
    for j in 0..n {
        let scale = Complex64::new(1.0 / eig_b.values[j].sqrt(), 0.0);
        for i in 0..n {
            w[(i, j)] *= scale;
        }
    }
    let reduced = hermitian_part(&(w.adjoint() * a * &w));
    let eig = hermitian_eigen(&reduced);
    Ok(eig.values[eig.values.len() - 1].clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct LandauCheck {
    pub dim_x: usize,
    pub c: f64,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Checks `dim X <= mes Q * mes S / (2 pi c)` with the given concentration
/// level.
pub fn landau_bound_check(dim_x: usize, c: f64, s: &Spectrum, q: &Spectrum) -> Result<LandauCheck> {
    if !(c > 0.0 && c <= 1.0 + 1e-9) {
        return Err(Error::invalid_parameter(
            "c",
            format!("concentration level must lie in (0, 1], got {c}"),
        ));
    }
    let bound = q.measure() * s.measure() / (2.0 * std::f64::consts::PI * c);
    let slack = bound - dim_x as f64;
    Ok(LandauCheck {
        dim_x,
        c,
        bound,
        slack,
        pass: slack >= -1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CVector;
    use crate::pwkernel::PWFunction;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn unit_band() -> Spectrum {
        Spectrum::symmetric(PI).unwrap()
    }

    #[test]
    fn rejects_coarse_resolution() {
        let s = unit_band();
        let q = Spectrum::symmetric(5.0).unwrap();
        assert!(matches!(
            concentration_operator(&s, &q, 16),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn undersampled_kernel_trips_the_trace_guard() {
        // 32 nodes cannot resolve a bandwidth of 100 pi over [-5, 5]; the
        // clipped trace collapses and the guard suggests refinement.
        let s = Spectrum::symmetric(100.0 * PI).unwrap();
        let q = Spectrum::symmetric(5.0).unwrap();
        match concentration_operator(&s, &q, 32) {
            Err(Error::ResolutionTooCoarse { suggested, .. }) => assert_eq!(suggested, 64),
            other => panic!("expected resolution error, got {other:?}"),
        }
    }

    #[test]
    fn trace_equals_window_length_for_unit_band() {
        // K(y, y) = 1 for S = [-pi, pi], so the trace is mes Q = 2T.
        let s = unit_band();
        for t in [2.0, 5.0] {
            let q = Spectrum::symmetric(t).unwrap();
            let rep = concentration_operator(&s, &q, 128).unwrap();
            assert_relative_eq!(rep.trace, 2.0 * t, epsilon = 1e-8);
            assert_relative_eq!(rep.expected_trace, 2.0 * t, epsilon = 1e-12);
        }
    }

    #[test]
    fn eigenvalues_in_unit_interval() {
        let s = unit_band();
        let q = Spectrum::symmetric(5.0).unwrap();
        let rep = concentration_operator(&s, &q, 256).unwrap();
        assert!(rep.min_eigenvalue() >= -1e-6);
        assert!(rep.max_eigenvalue() <= 1.0 + 1e-6);
        // Spectrum is nonincreasing by construction.
        assert!(rep.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eigenvalue_counts_obey_level_bound() {
        let s = unit_band();
        let q = Spectrum::symmetric(5.0).unwrap();
        let rep = concentration_operator(&s, &q, 256).unwrap();
        for i in 1..10 {
            let c = i as f64 / 10.0;
            assert!(
                (rep.count_at_least(c) as f64) <= rep.level_bound(c) + 1e-9,
                "level {c}"
            );
        }
    }

    /// Quadrature convergence oracle: node-doubling keeps the plunge profile
    /// stable to many digits.
    #[test]
    fn spectrum_stable_under_node_doubling() {
        let s = unit_band();
        let q = Spectrum::symmetric(3.0).unwrap();
        let coarse = concentration_operator(&s, &q, 96).unwrap();
        let fine = concentration_operator(&s, &q, 192).unwrap();
        for k in 0..12 {
            assert!(
                (coarse.eigenvalues[k] - fine.eigenvalues[k]).abs() < 1e-9,
                "eigenvalue {k} moved under refinement"
            );
        }
    }

    /// Enlarging Q never decreases an ordered eigenvalue; checked at matched
    /// discretizations where the smaller rule's nodes are a subset, so Cauchy
    /// interlacing applies exactly.
    #[test]
    fn monotone_in_q() {
        let s = unit_band();
        let inner: &[(f64, f64)] = &[(-4.0, 4.0)];
        let outer: &[(f64, f64)] = &[(-5.0, -4.0), (-4.0, 4.0), (4.0, 5.0)];
        let rule_inner = Quadrature::chunked(inner, 0.5, 8);
        let rule_outer = Quadrature::chunked(outer, 0.5, 8);

        let build = |rule: &Quadrature| {
            let n = rule.len();
            let sw: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
            let mut b = CMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    b[(i, j)] = kernel(&s, rule.nodes[i], rule.nodes[j]) * (sw[i] * sw[j]);
                }
            }
            let eig = hermitian_eigen(&hermitian_part(&b));
            eig.values
        };
        let ev_inner = build(&rule_inner);
        let ev_outer = build(&rule_outer);
        for k in 0..ev_inner.len() {
            assert!(
                ev_outer[k] >= ev_inner[k] - 1e-10,
                "eigenvalue {k}: {} < {}",
                ev_outer[k],
                ev_inner[k]
            );
        }
    }

    fn single_sinc() -> PWFunction {
        let s = unit_band();
        PWFunction::new(
            s,
            vec![0.0],
            CVector::from_vec(vec![Complex64::new(1.0, 0.0)]),
        )
    }

    #[test]
    fn sinc_mass_concentration() {
        // Direct quadrature oracle: a unit sinc keeps >= 96% of its mass on
        // [-10, 10] (the tail is ~ 2/(pi^2 * 10)).
        let f = single_sinc();
        let q = Spectrum::symmetric(10.0).unwrap();
        let domain = Spectrum::symmetric(400.0).unwrap();
        let basis: Vec<&dyn Evaluate> = vec![&f];
        let c = concentration_of_subspace(&basis, &q, &domain, 6.0).unwrap();
        assert!(c >= 0.96, "c = {c}");
        assert!(c < 1.0);

        // Oracle: compute the same ratio by direct integration.
        let q_in = Quadrature::chunked(&[(-10.0, 10.0)], 0.5, 10);
        let q_out = Quadrature::chunked(&[(-400.0, -10.0), (10.0, 400.0)], 0.5, 10);
        let inner = q_in.integrate(|x| f.eval(x).norm_sqr());
        let outer = q_out.integrate(|x| f.eval(x).norm_sqr());
        let oracle = inner / (inner + outer);
        assert!((c - oracle).abs() < 1e-6, "c = {c}, oracle = {oracle}");
    }

    #[test]
    fn huge_q_concentration_tends_to_one() {
        let f = single_sinc();
        let q = Spectrum::symmetric(399.0).unwrap();
        let domain = Spectrum::symmetric(400.0).unwrap();
        let basis: Vec<&dyn Evaluate> = vec![&f];
        let c = concentration_of_subspace(&basis, &q, &domain, 6.0).unwrap();
        assert!(c > 0.999, "c = {c}");
    }

    #[test]
    fn disjoint_q_concentration_near_zero() {
        let f = single_sinc();
        let q = Spectrum::interval(200.0, 220.0).unwrap();
        let domain = Spectrum::normalize(&[(-300.0, 300.0)]).unwrap();
        let basis: Vec<&dyn Evaluate> = vec![&f];
        let c = concentration_of_subspace(&basis, &q, &domain, 6.0).unwrap();
        assert!(c < 1e-3, "c = {c}");
    }

    #[test]
    fn degenerate_basis_is_rejected() {
        let f = single_sinc();
        let g = single_sinc();
        let q = Spectrum::symmetric(10.0).unwrap();
        let domain = Spectrum::symmetric(50.0).unwrap();
        let basis: Vec<&dyn Evaluate> = vec![&f, &g];
        assert!(matches!(
            concentration_of_subspace(&basis, &q, &domain, 6.0),
            Err(Error::DegenerateSubspace)
        ));
    }

    #[test]
    fn landau_check_cases() {
        let s = unit_band();
        let q = Spectrum::symmetric(3.0).unwrap();
        // dim 0 always passes.
        assert!(landau_bound_check(0, 0.1, &s, &q).unwrap().pass);
        // Arithmetic: bound = mes Q * mes S / (2 pi c) = 2r * 2pi / (pi) = 4r.
        let chk = landau_bound_check(5, 0.5, &s, &q).unwrap();
        assert_relative_eq!(chk.bound, 12.0, epsilon = 1e-12);
        assert!(chk.pass);
        assert!(!landau_bound_check(13, 0.5, &s, &q).unwrap().pass);
        assert!(landau_bound_check(1, 0.0, &s, &q).is_err());
        assert!(landau_bound_check(1, 1.5, &s, &q).is_err());
    }
}
