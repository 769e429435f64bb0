use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bounds::{eigenstate_bound, eigenstate_bound_optimized, AlphaSearchConfig, EigenpairCertificate};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix, C64};
use crate::trotter::TrotterProblem;

pub const VERIFY_TIMES: [f64; 4] = [0.1, 0.5, 1.0, 2.0];
pub const VERIFY_STEPS: [usize; 5] = [1, 2, 5, 10, 100];

/// Absolute slack on `error ≤ bound`.
const DOMINANCE_TOL: f64 = 1e-10;
/// Slack on `optimized ≤ plain`.
const OPTIMIZED_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Largest dimension; each trial draws its own dimension in `1..=dim`.
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub trials: usize,
    /// Number of (eigenvector, t, n) comparisons.
    pub checks: usize,
    /// Comparisons with `error > bound + 1e-10`.
    pub violations: usize,
    /// Eigenvectors where the optimized bound exceeded the plain one.
    pub optimized_violations: usize,
    /// Largest `error / bound` over comparisons with a nonzero bound.
    pub max_ratio: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.optimized_violations == 0
    }
}

/// Hermitian matrix with independent complex Gaussian entries, symmetrized.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> Result<HermitianMatrix> {
    let m = ComplexMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    HermitianMatrix::new(m)
}

/// Checks the eigenstate bound against the actual state error on random
/// pairs, for every eigenvector of the sum and every (t, n) on the fixed
/// grid.
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.dim == 0 {
        return Err(Error::usage("verify dimension must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let search = AlphaSearchConfig::default();
    let mut report = VerifyReport {
        trials: cfg.trials,
        ..VerifyReport::default()
    };
    for _ in 0..cfg.trials {
        let dim = rng.gen_range(1..=cfg.dim);
        let h1 = random_hermitian(&mut rng, dim)?;
        let h2 = random_hermitian(&mut rng, dim)?;
        let problem = TrotterProblem::new(h1.clone(), h2.clone())?;
        let spectrum = problem.sum_spectrum();
        let phis: Vec<_> = (0..dim).map(|k| spectrum.eigenvector(k)).collect();
        let certs = phis
            .iter()
            .zip(spectrum.eigenvalues())
            .map(|(phi, &h)| EigenpairCertificate::new(&h1, &h2, phi.clone(), h))
            .collect::<Result<Vec<_>>>()?;
        for cert in &certs {
            let plain = eigenstate_bound(&h1, &h2, cert, 1.0, 1)?;
            let (opt, _) = eigenstate_bound_optimized(&h1, &h2, cert, 1.0, 1, &search)?;
            if opt > plain + OPTIMIZED_TOL {
                report.optimized_violations += 1;
            }
        }
        for &t in &VERIFY_TIMES {
            for &n in &VERIFY_STEPS {
                let errors = problem.state_errors(t, n, &phis)?;
                for (cert, err) in certs.iter().zip(errors) {
                    let bound = eigenstate_bound(&h1, &h2, cert, t, n)?;
                    report.checks += 1;
                    if err > bound + DOMINANCE_TOL {
                        report.violations += 1;
                    }
                    if bound > 0.0 {
                        report.max_ratio = report.max_ratio.max(err / bound);
                    }
                }
            }
        }
    }
    Ok(report)
}
