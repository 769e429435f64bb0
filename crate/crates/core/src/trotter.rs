//! Trotterized and exact evolution on a pair of Hermitian generators, and
//! the error functionals built from them.

use crate::error::{Error, Result};
use crate::fock::{fock_state, truncate_polynomial, LadderPolynomial, TruncationScheme};
use crate::linalg::{eig_hermitian, BlockOperator, spectral_norm, ComplexMatrix, HermitianMatrix, SpectralDecomposition, StateVector, C64};

/// Upper edge for any distance between two unit vectors, with slack for
/// rounding.
pub const MAX_DISTANCE: f64 = 2.0 + 1e-9;

/// Two generators `H1`, `H2` of one dimension, with spectral decompositions
/// of `H1`, `H2` and `H1 + H2` computed once.
#[derive(Clone, Debug)]
pub struct TrotterProblem {
    h1: HermitianMatrix,
    h2: HermitianMatrix,
    spec1: SpectralDecomposition,
    spec2: SpectralDecomposition,
    spec_sum: SpectralDecomposition,
}

fn check_steps(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::usage("number of Trotter steps must be >= 1"));
    }
    Ok(())
}

impl TrotterProblem {
    pub fn new(h1: HermitianMatrix, h2: HermitianMatrix) -> Result<Self> {
        if h1.dim() != h2.dim() {
            return Err(Error::DimensionMismatch {
                op: "TrotterProblem::new",
                expected: h1.dim(),
                found: h2.dim(),
            });
        }
        let sum = h1.try_add(&h2)?;
        let spec1 = eig_hermitian(&h1)?;
        let spec2 = eig_hermitian(&h2)?;
        let spec_sum = eig_hermitian(&sum)?;
        Ok(TrotterProblem {
            h1,
            h2,
            spec1,
            spec2,
            spec_sum,
        })
    }

    /// Truncates two polynomials to the same Fock dimension.
    pub fn from_polynomials(p1: &LadderPolynomial, p2: &LadderPolynomial, scheme: TruncationScheme) -> Result<Self> {
        Self::new(truncate_polynomial(p1, scheme)?, truncate_polynomial(p2, scheme)?)
    }

    pub fn dim(&self) -> usize {
        self.h1.dim()
    }

    pub fn h1(&self) -> &HermitianMatrix {
        &self.h1
    }

    pub fn h2(&self) -> &HermitianMatrix {
        &self.h2
    }

    pub fn sum_spectrum(&self) -> &SpectralDecomposition {
        &self.spec_sum
    }

    /// `(e^{-i(t/n)H1}, e^{-i(t/n)H2})`
    pub fn step_unitaries(&self, t: f64, n: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
        check_steps(n)?;
        let dt = t / n as f64;
        Ok((self.spec1.propagator(dt), self.spec2.propagator(dt)))
    }

    /// Step unitaries in the block structure of `H1` and `H2`.
    pub fn step_operators(&self, t: f64, n: usize) -> Result<(BlockOperator, BlockOperator)> {
        check_steps(n)?;
        let dt = t / n as f64;
        let phase = |l: f64| C64::from_polar(1.0, -dt * l);
        Ok((self.spec1.block_function(phase), self.spec2.block_function(phase)))
    }

    /// `e^{-it(H1+H2)} ψ`
    pub fn exact_state(&self, t: f64, psi: &StateVector) -> Result<StateVector> {
        self.spec_sum.evolve_state(t, psi)
    }

    /// `(e^{-i(t/n)H1} e^{-i(t/n)H2})^n ψ`, applying the `H2` factor first.
    pub fn trotter_state(&self, t: f64, n: usize, psi: &StateVector) -> Result<StateVector> {
        Ok(self.trotter_states(t, n, std::slice::from_ref(psi))?.pop().expect("one state in, one out"))
    }

    /// Batched [`trotter_state`](Self::trotter_state): the step unitaries
    /// are formed once and each row of them is streamed once per step.
    pub fn trotter_states(&self, t: f64, n: usize, states: &[StateVector]) -> Result<Vec<StateVector>> {
        check_steps(n)?;
        let d = self.dim();
        for psi in states {
            if psi.dim() != d {
                return Err(Error::DimensionMismatch {
                    op: "trotter_state",
                    expected: d,
                    found: psi.dim(),
                });
            }
        }
        if t == 0.0 {
            return Ok(states.to_vec());
        }
        let (u1, u2) = self.step_operators(t, n)?;
        let mut cur: Vec<Vec<C64>> = states.iter().map(|s| s.amplitudes().to_vec()).collect();
        let mut tmp: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); d]; states.len()];
        for _ in 0..n {
            u2.apply_many(&cur, &mut tmp);
            u1.apply_many(&tmp, &mut cur);
        }
        Ok(cur.into_iter().map(StateVector::from_amplitudes).collect())
    }

    /// `‖W^{(n)}(t)ψ − U(t)ψ‖`
    pub fn state_error(&self, t: f64, n: usize, psi: &StateVector) -> Result<f64> {
        Ok(self.state_errors(t, n, std::slice::from_ref(psi))?[0])
    }

    pub fn state_errors(&self, t: f64, n: usize, states: &[StateVector]) -> Result<Vec<f64>> {
        let trotterized = self.trotter_states(t, n, states)?;
        states
            .iter()
            .zip(&trotterized)
            .map(|(psi, w)| w.distance(&self.exact_state(t, psi)?))
            .collect()
    }

    /// Operator-norm distance `‖(U1 U2)^n − U(t)‖`.
    pub fn uniform_error(&self, t: f64, n: usize) -> Result<f64> {
        check_steps(n)?;
        let (u1, u2) = self.step_unitaries(t, n)?;
        let product = u1.matmul(&u2)?.pow(n as u64)?;
        let exact = self.spec_sum.propagator(t);
        spectral_norm(&product.try_sub(&exact)?)
    }
}

/// Error values of one state over a range of truncation dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorSeries {
    state_label: String,
    trotter_steps: usize,
    time: f64,
    rows: Vec<(usize, f64)>,
}

impl ErrorSeries {
    /// Rows must be strictly increasing in `d` with values in `[0, 2]`.
    pub fn new(state_label: impl Into<String>, trotter_steps: usize, time: f64, rows: Vec<(usize, f64)>) -> Result<Self> {
        if let Some(w) = rows.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::usage(format!(
                "series dimensions must be strictly increasing ({} then {})",
                w[0].0, w[1].0
            )));
        }
        if let Some(&(d, v)) = rows.iter().find(|(_, v)| !(0.0..=MAX_DISTANCE).contains(v)) {
            return Err(Error::usage(format!("series value {v} at d = {d} outside [0, 2]")));
        }
        Ok(ErrorSeries {
            state_label: state_label.into(),
            trotter_steps,
            time,
            rows,
        })
    }

    pub fn state_label(&self) -> &str {
        &self.state_label
    }

    pub fn trotter_steps(&self) -> usize {
        self.trotter_steps
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn rows(&self) -> &[(usize, f64)] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|&(_, v)| v).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.rows.iter().map(|&(d, _)| d).collect()
    }
}

/// State-dependent error of the Fock state `|m⟩` for each truncation
/// dimension in `dims`.
pub fn error_series(
    h1: &LadderPolynomial,
    h2: &LadderPolynomial,
    m: usize,
    t: f64,
    n: usize,
    dims: &[usize],
) -> Result<ErrorSeries> {
    check_steps(n)?;
    let mut rows = Vec::with_capacity(dims.len());
    for &d in dims {
        let scheme = TruncationScheme::fock(d)?;
        let psi = fock_state(m, d)?;
        let err = TrotterProblem::from_polynomials(h1, h2, scheme)
            .and_then(|p| p.state_error(t, n, &psi))
            .map_err(|e| Error::AtDimension {
                dim: d,
                source: Box::new(e),
            })?;
        rows.push((d, err));
    }
    ErrorSeries::new(format!("m{m}"), n, t, rows)
}

/// Maximum over the last `window` rows: a finite stand-in for the limsup
/// over `d`.
pub fn tail_error_estimate(series: &ErrorSeries, window: usize) -> Result<f64> {
    if window == 0 || window > series.len() {
        return Err(Error::usage(format!(
            "tail window {window} does not fit a series of {} rows",
            series.len()
        )));
    }
    Ok(series.rows[series.len() - window..]
        .iter()
        .map(|&(_, v)| v)
        .fold(0.0, f64::max))
}
