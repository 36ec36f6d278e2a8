//! Runtime configuration shared by every subcommand. Each flag can also be
//! set through the environment variable named next to it.

use clap::Args;
use vibronic_core::doktorov::Units;
use vibronic_core::fock::FockBudget;
use vibronic_core::spectrum::SpectrumParams;

#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    /// Per-mode Fock cutoff of the readout grid
    #[arg(long, env = "VIBRONIC_CUTOFF", default_value_t = 8)]
    pub cutoff: usize,

    /// Thermal truncation: kept initial states cover at least 1 - epsilon
    #[arg(long, env = "VIBRONIC_EPSILON", default_value_t = 1e-4)]
    pub epsilon: f64,

    /// Histogram bin width; defaults to 10 (cm-1) or 0.01 (dimensionless)
    #[arg(long, env = "VIBRONIC_BIN_WIDTH")]
    pub bin_width: Option<f64>,

    /// Frobenius tolerance for constraint and unitarity checks
    #[arg(long, env = "VIBRONIC_TOLERANCE", default_value_t = 1e-9)]
    pub tolerance: f64,

    /// Largest basis-state allocation any single step may make
    #[arg(long, env = "VIBRONIC_BASIS_BUDGET", default_value_t = 2_000_000)]
    pub basis_budget: usize,

    /// Largest photon total routed through the permanent kernel
    #[arg(long, env = "VIBRONIC_PERMANENT_LIMIT", default_value_t = 14)]
    pub permanent_limit: usize,

    /// Worker threads (default: one per core)
    #[arg(long, env = "VIBRONIC_THREADS")]
    pub threads: Option<usize>,
}

impl ConfigArgs {
    pub fn budget(&self) -> FockBudget {
        FockBudget {
            basis_states: self.basis_budget,
            permanent_limit: self.permanent_limit,
        }
    }

    pub fn bin_width_for(&self, units: Units) -> f64 {
        self.bin_width.unwrap_or(match units {
            Units::Wavenumber => 10.0,
            Units::Dimensionless => 0.01,
        })
    }

    pub fn spectrum_params(&self, units: Units) -> SpectrumParams {
        SpectrumParams {
            cutoff: self.cutoff,
            epsilon: self.epsilon,
            bin_width: self.bin_width_for(units),
            tolerance: self.tolerance,
            budget: self.budget(),
        }
    }

    /// Install the requested thread pool; a later repeated call is a no-op.
    pub fn init_threads(&self) {
        if let Some(n) = self.threads {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}
