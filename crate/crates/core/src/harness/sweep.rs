use std::time::Instant;

use rayon::prelude::*;

use super::{SweepConfig, SweepMode};
use crate::bounds::ho_analytic_bound;
use crate::diagnostics::{classify_verdicts, detect_plateau, PlateauVerdict, ProblemVerdict};
use crate::error::{Error, Result};
use crate::fock::{fock_state, resolve, LadderPolynomial, TruncationScheme};
use crate::linalg::StateVector;
use crate::trotter::{ErrorSeries, TrotterProblem};

/// Caps the number of worker threads used by [`run_sweep`].
pub const THREADS_ENV: &str = "TROTTERLAB_THREADS";

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub config: SweepConfig,
    /// One series per requested state, or a single `beta` series in
    /// uniform mode.
    pub series: Vec<ErrorSeries>,
    /// `None` where the series is too short for the configured window.
    pub verdicts: Vec<Option<PlateauVerdict>>,
    /// `None` unless every series has a verdict.
    pub overall: Option<ProblemVerdict>,
    /// Analytic bound per state when `bound_overlay` is set.
    pub bounds: Option<Vec<f64>>,
    pub wall_seconds: f64,
}

fn thread_count() -> Result<usize> {
    let default = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(default),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k),
            _ => Err(Error::usage(format!("{THREADS_ENV} must be a positive integer, got `{raw}`"))),
        },
    }
}

fn evaluate_dimension(
    cfg: &SweepConfig,
    p1: &LadderPolynomial,
    p2: &LadderPolynomial,
    d: usize,
) -> Result<Vec<f64>> {
    let problem = TrotterProblem::from_polynomials(p1, p2, TruncationScheme::fock(d)?)?;
    match cfg.mode {
        SweepMode::StateError => {
            let states = cfg
                .states
                .iter()
                .map(|&m| fock_state(m, d))
                .collect::<Result<Vec<StateVector>>>()?;
            problem.state_errors(cfg.t, cfg.trotter_steps, &states)
        }
        SweepMode::UniformError => Ok(vec![problem.uniform_error(cfg.t, cfg.trotter_steps)?]),
    }
}

/// Evaluates every grid dimension. Dimensions run in parallel, with the
/// worker count taken from [`THREADS_ENV`] when set; results are assembled
/// in ascending `d`, so the output does not depend on scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    run_sweep_with_threads(cfg, thread_count()?)
}

pub fn run_sweep_with_threads(cfg: &SweepConfig, threads: usize) -> Result<SweepResult> {
    cfg.validate()?;
    let start = Instant::now();
    let p1 = resolve(&cfg.h1_expr)?;
    let p2 = resolve(&cfg.h2_expr)?;
    let dims = cfg.dims();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::usage(format!("cannot start worker threads: {e}")))?;
    // large dimensions first, for better load balance
    let mut order: Vec<usize> = (0..dims.len()).collect();
    order.reverse();
    let mut rows: Vec<(usize, Vec<f64>)> = pool.install(|| {
        order
            .par_iter()
            .map(|&k| {
                let d = dims[k];
                evaluate_dimension(cfg, &p1, &p2, d)
                    .map(|v| (k, v))
                    .map_err(|e| Error::AtDimension {
                        dim: d,
                        source: Box::new(e),
                    })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    rows.sort_by_key(|r| r.0);

    let labels: Vec<String> = match cfg.mode {
        SweepMode::StateError => cfg.states.iter().map(|m| format!("m{m}")).collect(),
        SweepMode::UniformError => vec!["beta".to_string()],
    };
    let series = labels
        .iter()
        .enumerate()
        .map(|(j, label)| {
            let col = rows.iter().map(|(k, v)| (dims[*k], v[j])).collect();
            ErrorSeries::new(label.clone(), cfg.trotter_steps, cfg.t, col)
        })
        .collect::<Result<Vec<_>>>()?;

    let verdicts: Vec<Option<PlateauVerdict>> = series
        .iter()
        .map(|s| {
            if s.len() < 2 * cfg.window {
                None
            } else {
                detect_plateau(s, cfg.window, cfg.rtol).ok()
            }
        })
        .collect();
    let overall = if verdicts.iter().all(Option::is_some) {
        Some(classify_verdicts(
            series
                .iter()
                .map(ErrorSeries::state_label)
                .zip(verdicts.iter().map(|v| v.as_ref().expect("checked"))),
        ))
    } else {
        None
    };
    let bounds = cfg.bound_overlay.then(|| {
        cfg.states
            .iter()
            .map(|&m| ho_analytic_bound(m as u64, cfg.t, cfg.trotter_steps))
            .collect()
    });
    Ok(SweepResult {
        config: cfg.clone(),
        series,
        verdicts,
        overall,
        bounds,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::preset;

    fn small(states: &[usize], d_min: usize, d_max: usize) -> SweepConfig {
        SweepConfig {
            states: states.to_vec(),
            d_min,
            d_max,
            trotter_steps: 50,
            window: 3,
            ..preset("fig4").unwrap().1
        }
    }

    #[test]
    fn single_dimension_grid() {
        let r = run_sweep(&small(&[0, 2], 6, 6)).unwrap();
        assert_eq!(r.series.len(), 2);
        assert!(r.series.iter().all(|s| s.len() == 1 && s.dims() == vec![6]));
        assert_eq!(r.verdicts, vec![None, None]);
        assert_eq!(r.overall, None);
    }

    #[test]
    fn matches_direct_series_and_bounds() {
        let cfg = small(&[0, 1], 2, 12);
        let r = run_sweep(&cfg).unwrap();
        let p1 = resolve("half_q2").unwrap();
        let p2 = resolve("half_p2").unwrap();
        let direct = crate::trotter::error_series(&p1, &p2, 1, 1.0, 50, &cfg.dims()).unwrap();
        assert_eq!(r.series[1], direct);
        let bounds = r.bounds.as_ref().unwrap();
        for (s, b) in r.series.iter().zip(bounds) {
            assert!(s.values().iter().all(|v| *v <= b + 1e-10));
        }
        assert!(r.verdicts.iter().all(Option::is_some));
        assert!(r.overall.is_some());
    }

    #[test]
    fn uniform_mode_produces_beta_series() {
        let cfg = SweepConfig {
            d_max: 8,
            ..preset("figS1").unwrap().1
        };
        let r = run_sweep(&cfg).unwrap();
        assert_eq!(r.series.len(), 1);
        assert_eq!(r.series[0].state_label(), "beta");
        assert_eq!(r.series[0].len(), 8);
        assert!(r.bounds.is_none());
    }
}
