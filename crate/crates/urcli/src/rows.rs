//! Shared one-point model evaluation for the sweep and figure verbs.

use crate::parse;
use crate::CliError;
use rayon::prelude::*;
use urlab::bounds::{conditional_reverse_report, BoundMode, MMode, ObservablePair, PhaseChoice};
use urlab::dmmodel::{concurrence_closed, mixedness_closed, thermal_state, DmParams};

/// Observable channels plus bound configuration, fixed across a run.
pub struct Probe {
    /// (system, control) channels, in flag order.
    pub pairs: Vec<ObservablePair>,
    /// Raw `--q` text, echoed in headers.
    pub q_label: String,
    /// Raw `--o` text (or the `--q` text it defaulted to).
    pub o_label: String,
    /// Selected reverse bound.
    pub mode: BoundMode,
    /// The `--bound` token, echoed in headers.
    pub mode_token: String,
    /// Overlap-term handling for the phase family.
    pub m_mode: MMode,
    /// The `--m-mode` token, echoed in headers.
    pub m_mode_token: String,
    /// Grid points per free phase for phase optimization.
    pub theta_grid: usize,
}

impl Probe {
    /// Resolve flag text into a probe; `o` defaults to the system list.
    pub fn from_flags(
        q: &str,
        o: Option<&str>,
        bound: &str,
        m_mode: &str,
        theta_grid: usize,
    ) -> Result<Probe, CliError> {
        if theta_grid == 0 {
            return Err(CliError::Usage("--theta-grid must be ≥ 1".into()));
        }
        let qs = parse::parse_observables("q", q)?;
        let o_text = o.unwrap_or(q);
        let os = parse::parse_observables("o", o_text)?;
        if qs.len() != os.len() {
            return Err(CliError::Usage(format!(
                "--q lists {} observables but --o lists {}",
                qs.len(),
                os.len()
            )));
        }
        let mode = parse::parse_bound(bound)?;
        if mode != BoundMode::PhaseFamily && qs.len() % 2 != 0 {
            return Err(CliError::Usage(format!(
                "--bound {bound} consumes observables in consecutive pairs and needs an even count; got {}",
                qs.len()
            )));
        }
        let pairs = qs
            .into_iter()
            .zip(os)
            .map(|(system, control)| ObservablePair { system, control })
            .collect();
        Ok(Probe {
            pairs,
            q_label: q.to_string(),
            o_label: o_text.to_string(),
            mode,
            mode_token: bound.to_string(),
            m_mode: parse::parse_m_mode(m_mode)?,
            m_mode_token: m_mode.to_string(),
            theta_grid,
        })
    }

    /// Header line echoing the probe configuration.
    pub fn header_line(&self, seed: u64) -> String {
        format!(
            "# q={} o={} bound={} m_mode={} theta_grid={} seed={}",
            self.q_label, self.o_label, self.mode_token, self.m_mode_token, self.theta_grid, seed
        )
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone)]
pub struct RowValues {
    pub j: f64,
    pub d: f64,
    pub t: f64,
    /// Closed-form concurrence of the thermal state.
    pub concurrence: f64,
    /// Closed-form mixedness 1 − Tr ρ².
    pub gamma: f64,
    /// L = Σ_k E[V(Q_k|O_k)].
    pub l_value: f64,
    /// W = U_tra − Σ_k V[E(Q_k|O_k)].
    pub w_value: f64,
    /// Tightness U = W / L, absent when L is numerically zero.
    pub u_value: Option<f64>,
    /// The unconditional reverse bound on the system marginal.
    pub u_tra: f64,
    /// Tr ρ_A² of the system marginal.
    pub purity_marginal: f64,
    /// Certified invariant W ≥ L − tolerance.
    pub valid: bool,
}

impl RowValues {
    /// Slack W − L of the conditional relation at this point.
    pub fn slack(&self) -> f64 {
        self.w_value - self.l_value
    }
}

/// Evaluate one model point under the probe.
pub fn eval_point(j: f64, d: f64, t: f64, probe: &Probe) -> Result<RowValues, String> {
    let go = || -> urlab::Result<RowValues> {
        let p = DmParams::new(j, d, t)?;
        let rho = thermal_state(&p)?;
        let phases = PhaseChoice::Optimize {
            grid: probe.theta_grid,
        };
        let rep = conditional_reverse_report(&rho, &probe.pairs, probe.mode, &phases, probe.m_mode)?;
        Ok(RowValues {
            j,
            d,
            t,
            concurrence: concurrence_closed(&p),
            gamma: mixedness_closed(&p),
            l_value: rep.l_value(),
            w_value: rep.w_value(),
            u_value: rep.u_value,
            u_tra: rep.u_tra,
            purity_marginal: rep.marginal_purity,
            valid: rep.report.valid,
        })
    };
    go().map_err(|e| e.to_string())
}

/// Lexicographic (j, d, t) grid, j slowest, t fastest.
pub fn grid3(js: &[f64], ds: &[f64], ts: &[f64]) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::with_capacity(js.len() * ds.len() * ts.len());
    for &j in js {
        for &d in ds {
            for &t in ts {
                out.push((j, d, t));
            }
        }
    }
    out
}

/// Evaluate a grid in parallel, preserving input order.
pub fn eval_grid(grid: &[(f64, f64, f64)], probe: &Probe) -> Vec<Result<RowValues, String>> {
    grid.par_iter()
        .map(|&(j, d, t)| eval_point(j, d, t, probe))
        .collect()
}

/// Run `f` on a dedicated pool of `workers` threads (current pool when None).
pub fn with_pool<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("--workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
