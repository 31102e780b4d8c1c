//! Swap analytics, CMS par rates and LSMC Bermudan swaptions.

mod bermudan;
mod cms;
mod swaps;

pub use bermudan::{lsmc_bermudan, BermudanResult, BermudanSpec, LsmcOptions, RegressionBasis, PAYOFF_CONVENTION};
pub use cms::{cms_par_rate, CmsResult, CmsSpec};
pub use swaps::{annuity, par_rate, swap_value};
