//! Analytic upper bounds on Trotter errors.

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, HermitianMatrix, StateVector, C64};

/// Relative residual above which an eigenpair is not trusted.
pub const CERTIFICATE_RTOL: f64 = 1e-8;

/// Slack on `Σ|amplitude|² ≤ 1` in [`superposition_bound`].
const NORM_SLACK: f64 = 1e-12;

/// A claimed eigenpair `(H1 + H2)φ = hφ` together with its residual.
#[derive(Clone, Debug)]
pub struct EigenpairCertificate {
    phi: StateVector,
    h: f64,
    residual: f64,
}

fn eigen_residual(h1: &HermitianMatrix, h2: &HermitianMatrix, phi: &StateVector, h: f64) -> Result<f64> {
    let lhs = h1.matvec(phi)?.try_add(&h2.matvec(phi)?)?;
    lhs.distance(&phi.scale(C64::new(h, 0.0)))
}

impl EigenpairCertificate {
    /// Records `‖(H1 + H2)φ − hφ‖`. Acceptance is checked where the
    /// certificate is used.
    pub fn new(h1: &HermitianMatrix, h2: &HermitianMatrix, phi: StateVector, h: f64) -> Result<Self> {
        let residual = eigen_residual(h1, h2, &phi, h)?;
        Ok(EigenpairCertificate { phi, h, residual })
    }

    pub fn phi(&self) -> &StateVector {
        &self.phi
    }

    pub fn eigenvalue(&self) -> f64 {
        self.h
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn threshold(&self) -> f64 {
        CERTIFICATE_RTOL * self.h.abs().max(1.0)
    }

    pub fn is_accepted(&self) -> bool {
        self.residual <= self.threshold()
    }

    /// Rechecks the pair against `h1`, `h2`.
    fn validate(&self, h1: &HermitianMatrix, h2: &HermitianMatrix) -> Result<()> {
        let residual = eigen_residual(h1, h2, &self.phi, self.h)?;
        let threshold = self.threshold();
        if !(residual <= threshold) {
            return Err(Error::RejectedCertificate { residual, threshold });
        }
        Ok(())
    }
}

fn check_steps(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::usage("number of Trotter steps must be >= 1"));
    }
    Ok(())
}

/// `‖(H − c)²φ‖`
fn squared_shift_norm(h: &HermitianMatrix, c: f64, phi: &StateVector) -> Result<f64> {
    let shift = C64::new(c, 0.0);
    let w = h.matvec(phi)?.try_sub(&phi.scale(shift))?;
    Ok(h.matvec(&w)?.try_sub(&w.scale(shift))?.norm())
}

/// Bound as a function of the split `α`, before the `2t²/n` prefactor.
fn split_objective(h1: &HermitianMatrix, h2: &HermitianMatrix, cert: &EigenpairCertificate, alpha: f64) -> Result<f64> {
    let h = cert.h;
    let a = squared_shift_norm(h1, alpha * h, &cert.phi)?;
    let b = squared_shift_norm(h2, (1.0 - alpha) * h, &cert.phi)?;
    Ok(a.max(b))
}

/// `(2t²/n) · max(‖(H1 − h/2)²φ‖, ‖(H2 − h/2)²φ‖)` for an eigenpair of
/// `H1 + H2`.
pub fn eigenstate_bound(
    h1: &HermitianMatrix,
    h2: &HermitianMatrix,
    cert: &EigenpairCertificate,
    t: f64,
    n: usize,
) -> Result<f64> {
    check_steps(n)?;
    cert.validate(h1, h2)?;
    Ok(2.0 * t * t / n as f64 * split_objective(h1, h2, cert, 0.5)?)
}

/// Sample points and refinement tolerance for the split `α`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaSearchConfig {
    grid: Vec<f64>,
    tolerance: Option<f64>,
}

impl Default for AlphaSearchConfig {
    /// 501 points on `[-2, 3]`, golden-section refinement to `1e-12`.
    fn default() -> Self {
        Self::uniform(-2.0, 3.0, 501, Some(1e-12)).expect("valid default grid")
    }
}

impl AlphaSearchConfig {
    /// `points` evenly spaced values on `[lo, hi]`, plus `1/2`. With a
    /// tolerance, the best grid bracket is refined by golden-section search.
    pub fn uniform(lo: f64, hi: f64, points: usize, tolerance: Option<f64>) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) || points == 0 {
            return Err(Error::usage(format!("invalid alpha grid [{lo}, {hi}] with {points} points")));
        }
        if let Some(tol) = tolerance {
            if !(tol > 0.0) {
                return Err(Error::usage("alpha tolerance must be positive"));
            }
        }
        let grid = if points == 1 {
            vec![lo]
        } else {
            let step = (hi - lo) / (points - 1) as f64;
            (0..points).map(|k| lo + step * k as f64).collect()
        };
        Ok(Self::from_points(grid, tolerance))
    }

    /// Exactly the given points, plus `1/2`.
    pub fn from_points(mut grid: Vec<f64>, tolerance: Option<f64>) -> Self {
        grid.push(0.5);
        grid.retain(|a| a.is_finite());
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        AlphaSearchConfig { grid, tolerance }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn tolerance(&self) -> Option<f64> {
        self.tolerance
    }
}

/// Minimizes a function that is convex on `[a, b]`.
fn golden_section(mut a: f64, mut b: f64, tol: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}

/// The bound with `h` split as `αh + (1−α)h` between the two generators,
/// minimized over `α`. Returns `(bound, α*)`.
///
/// Both terms are convex in `α`, so their maximum is too and the refinement
/// stays inside the bracket around the best grid point.
pub fn eigenstate_bound_optimized(
    h1: &HermitianMatrix,
    h2: &HermitianMatrix,
    cert: &EigenpairCertificate,
    t: f64,
    n: usize,
    search: &AlphaSearchConfig,
) -> Result<(f64, f64)> {
    check_steps(n)?;
    cert.validate(h1, h2)?;
    let grid = search.grid();
    let mut best = (0usize, f64::INFINITY);
    for (k, &alpha) in grid.iter().enumerate() {
        let v = split_objective(h1, h2, cert, alpha)?;
        if v < best.1 {
            best = (k, v);
        }
    }
    let (k, mut value) = best;
    let mut alpha = grid[k];
    if let (Some(tol), true) = (search.tolerance(), grid.len() > 1) {
        let lo = grid[k.saturating_sub(1)];
        let hi = grid[(k + 1).min(grid.len() - 1)];
        let (a, v) = golden_section(lo, hi, tol, |x| split_objective(h1, h2, cert, x))?;
        if v < value {
            alpha = a;
            value = v;
        }
    }
    Ok((2.0 * t * t / n as f64 * value, alpha))
}

/// Closed form of the eigenstate bound for the Fock state `|m⟩` of
/// `½Q² + ½P²` split into its two halves.
pub fn ho_analytic_bound(m: u64, t: f64, n: usize) -> f64 {
    let m = m as f64;
    let poly = m * (m + 1.0) * (m * m + m + 14.0) + 10.0;
    t * t / (2.0 * n as f64) * (0.375 * poly).sqrt()
}

/// `sqrt(Σ |c_k|² b_k²)` for a superposition `Σ c_k |k⟩` whose components
/// have errors `b_k`.
pub fn superposition_bound(coeffs: &[(C64, f64)]) -> Result<f64> {
    let weight: f64 = coeffs.iter().map(|(c, _)| c.norm_sqr()).sum();
    if weight > 1.0 + NORM_SLACK {
        return Err(Error::usage(format!("squared amplitudes sum to {weight}, above 1")));
    }
    if let Some((_, b)) = coeffs.iter().find(|(_, b)| !(*b >= 0.0)) {
        return Err(Error::usage(format!("basis error {b} is not a nonnegative number")));
    }
    Ok(coeffs.iter().map(|(c, b)| c.norm_sqr() * b * b).sum::<f64>().sqrt())
}

/// `(t²/(2n)) ‖[H1, H2]‖`
pub fn commutator_uniform_bound(h1: &HermitianMatrix, h2: &HermitianMatrix, t: f64, n: usize) -> Result<f64> {
    check_steps(n)?;
    let comm = h1.commutator(h2)?;
    Ok(t * t / (2.0 * n as f64) * spectral_norm(&comm)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{builtin, fock_state, LadderPolynomial, truncate_polynomial, TruncationScheme};
    use crate::linalg::{eig_hermitian, ComplexMatrix};

    fn real(rows: &[&[f64]]) -> HermitianMatrix {
        HermitianMatrix::new(ComplexMatrix::from_real_rows(rows).unwrap()).unwrap()
    }

    fn sigma_x() -> HermitianMatrix {
        real(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    fn sigma_z() -> HermitianMatrix {
        real(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    fn pauli_cert() -> EigenpairCertificate {
        // eigenvector of σx + σz for √2: (cos π/8, sin π/8)
        let th = std::f64::consts::PI / 8.0;
        let phi = StateVector::from_real(&[th.cos(), th.sin()]);
        EigenpairCertificate::new(&sigma_x(), &sigma_z(), phi, 2f64.sqrt()).unwrap()
    }

    fn ho_pair(d: usize) -> (HermitianMatrix, HermitianMatrix) {
        let s = TruncationScheme::fock(d).unwrap();
        (
            truncate_polynomial(&builtin("half_q2").unwrap(), s).unwrap(),
            truncate_polynomial(&builtin("half_p2").unwrap(), s).unwrap(),
        )
    }

    #[test]
    fn split_halves_of_an_eigenproblem_give_zero() {
        let h = real(&[&[2.0, 1.0, 0.0], &[1.0, -1.0, 0.5], &[0.0, 0.5, 0.3]]);
        let half = h.scaled(0.5);
        let s = eig_hermitian(&h).unwrap();
        for k in 0..3 {
            let cert = EigenpairCertificate::new(&half, &half, s.eigenvector(k), s.eigenvalues()[k]).unwrap();
            assert!(cert.is_accepted());
            assert!(eigenstate_bound(&half, &half, &cert, 1.3, 4).unwrap() < 1e-12);
        }
    }

    #[test]
    fn pauli_example() {
        let cert = pauli_cert();
        assert!(cert.residual() < 1e-15);
        // ‖(σx − (√2/2)I)²φ‖ = √5/2 by hand
        let direct = squared_shift_norm(&sigma_x(), 2f64.sqrt() / 2.0, cert.phi()).unwrap();
        assert!((direct - 5f64.sqrt() / 2.0).abs() < 1e-15);
        let b = eigenstate_bound(&sigma_x(), &sigma_z(), &cert, 0.5, 10).unwrap();
        assert!((b - 0.25 * 5f64.sqrt() / 10.0).abs() < 1e-15);
        assert!((b - 5.5902e-2).abs() < 1e-6);
        let (opt, alpha) =
            eigenstate_bound_optimized(&sigma_x(), &sigma_z(), &cert, 0.5, 10, &AlphaSearchConfig::default()).unwrap();
        assert!(opt <= b + 1e-12);
        assert!((-2.0..=3.0).contains(&alpha));
    }

    #[test]
    fn rejects_non_eigenvector() {
        let phi = StateVector::basis(0, 2).unwrap();
        let cert = EigenpairCertificate::new(&sigma_x(), &sigma_z(), phi, 1.0).unwrap();
        assert!(!cert.is_accepted());
        let r = eigenstate_bound(&sigma_x(), &sigma_z(), &cert, 1.0, 1);
        assert!(matches!(r, Err(Error::RejectedCertificate { residual, .. }) if residual > 0.9));
        assert!(eigenstate_bound(&sigma_x(), &sigma_z(), &pauli_cert(), 1.0, 0).is_err());
    }

    #[test]
    fn degenerate_search_reproduces_plain_bound() {
        let cert = pauli_cert();
        let only_half = AlphaSearchConfig::from_points(vec![], Some(1e-12));
        assert_eq!(only_half.grid(), &[0.5]);
        let (b, alpha) = eigenstate_bound_optimized(&sigma_x(), &sigma_z(), &cert, 0.5, 10, &only_half).unwrap();
        assert_eq!(alpha, 0.5);
        assert_eq!(b, eigenstate_bound(&sigma_x(), &sigma_z(), &cert, 0.5, 10).unwrap());
    }

    #[test]
    fn whole_hamiltonian_on_one_side() {
        let h = real(&[&[1.0, 0.4], &[0.4, 3.0]]);
        let zero = HermitianMatrix::zeros(2).unwrap();
        let s = eig_hermitian(&h).unwrap();
        let cert = EigenpairCertificate::new(&h, &zero, s.eigenvector(1), s.eigenvalues()[1]).unwrap();
        let search = AlphaSearchConfig::uniform(-2.0, 3.0, 501, None).unwrap();
        assert!(search.grid().contains(&1.0));
        let (b, alpha) = eigenstate_bound_optimized(&h, &zero, &cert, 1.0, 1, &search).unwrap();
        assert!(b < 1e-12, "{b}");
        assert!((alpha - 1.0).abs() < 1e-12);
        assert!(eigenstate_bound(&h, &zero, &cert, 1.0, 1).unwrap() > 0.1);
    }

    #[test]
    fn ho_closed_form_values() {
        assert!((ho_analytic_bound(0, 1.0, 1000) - (0.6f64).sqrt() / 800.0).abs() < 1e-18);
        assert!((ho_analytic_bound(1, 1.0, 1000) - 3.0 * 7f64.sqrt() / 4000.0).abs() < 1e-18);
        assert!((ho_analytic_bound(0, 1.0, 1000) - 9.68246e-4).abs() < 1e-9);
        assert_eq!(ho_analytic_bound(3, 0.0, 7), 0.0);
    }

    #[test]
    fn ho_closed_form_matches_truncated_bound() {
        for m in 0..=10u64 {
            for extra in [5usize, 6, 9] {
                let d = m as usize + extra;
                let (h1, h2) = ho_pair(d);
                let cert = EigenpairCertificate::new(&h1, &h2, fock_state(m as usize, d).unwrap(), m as f64 + 0.5).unwrap();
                assert!(cert.residual() < 1e-14);
                let b = eigenstate_bound(&h1, &h2, &cert, 1.0, 1000).unwrap();
                let exact = ho_analytic_bound(m, 1.0, 1000);
                assert!((b - exact).abs() < 1e-10 * exact.max(1.0), "m={m} d={d}: {b} vs {exact}");
            }
        }
    }

    #[test]
    fn superposition_examples() {
        let one = C64::new(1.0, 0.0);
        assert_eq!(superposition_bound(&[(one, 0.37)]).unwrap(), 0.37);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let b = superposition_bound(&[(C64::new(r, 0.0), 0.3), (C64::new(0.0, r), 0.4)]).unwrap();
        assert!((b - 0.125f64.sqrt()).abs() < 1e-15);
        assert_eq!(superposition_bound(&[(C64::new(0.6, 0.0), 0.0), (C64::new(0.8, 0.0), 0.0)]).unwrap(), 0.0);
        assert!(superposition_bound(&[(one, 0.1), (one, 0.1)]).is_err());
    }

    #[test]
    fn commutator_examples() {
        assert!(commutator_uniform_bound(&sigma_x(), &sigma_x().scaled(2.0), 1.0, 1).unwrap() < 1e-12);
        let b = commutator_uniform_bound(&sigma_x(), &sigma_z(), 0.5, 10).unwrap();
        assert!((b - 0.025).abs() < 1e-15);
        let s = |d| TruncationScheme::fock(d).unwrap();
        let q = LadderPolynomial::position();
        let p = LadderPolynomial::momentum();
        let mut last = 0.0;
        for d in [10, 50, 100] {
            let b = commutator_uniform_bound(
                &truncate_polynomial(&q, s(d)).unwrap(),
                &truncate_polynomial(&p, s(d)).unwrap(),
                1.0,
                1,
            )
            .unwrap();
            assert!(b > last);
            last = b;
        }
    }
}
