use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable consulted for the default node budget.
pub const BUDGET_ENV: &str = "GROUPSPAN_BUDGET";

/// Default upper bound on the number of leaves an exhaustive search may visit.
pub const DEFAULT_BUDGET: u64 = 2_000_000_000;

/// Upper bound on the number of nodes an exhaustive enumeration may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget(pub u64);

impl Budget {
    pub const UNLIMITED: Budget = Budget(u64::MAX);

    /// Fails with [`Error::BudgetExceeded`] if `needed` nodes don't fit.
    pub fn check(self, needed: u128) -> Result<()> {
        if needed > u128::from(self.0) {
            Err(Error::BudgetExceeded { needed, budget: self.0 })
        } else {
            Ok(())
        }
    }

    /// Budget from [`BUDGET_ENV`], falling back to [`DEFAULT_BUDGET`].
    pub fn from_env() -> Budget {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&v| v > 0)
            .map(Budget)
            .unwrap_or(Budget(DEFAULT_BUDGET))
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(Error::InvalidArgument(format!("unknown output format `{other}`"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Svg => "svg",
        })
    }
}

/// Settings shared by every search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub node_budget: u64,
    pub worker_count: usize,
    pub window_radius: u32,
    pub seed: u64,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            node_budget: DEFAULT_BUDGET,
            worker_count: 1,
            window_radius: 3,
            seed: 0,
            output_format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.node_budget == 0 {
            return Err(Error::InvalidArgument("node budget must be positive".into()));
        }
        if self.worker_count == 0 {
            return Err(Error::InvalidArgument("worker count must be positive".into()));
        }
        if self.window_radius == 0 {
            return Err(Error::InvalidArgument("window radius must be positive".into()));
        }
        Ok(())
    }

    pub fn budget(&self) -> Budget {
        Budget(self.node_budget)
    }

    /// Runs `f` inside a rayon pool with `worker_count` threads. Every parallel
    /// reduction in this crate is order-independent, so the result does not
    /// depend on the worker count.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> Result<R> {
        self.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.worker_count)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}

/// `n choose k` without overflow for the sizes used in budget checks.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}
