//! Gram-Charlier swaption pricing.
//!
//! The swap value at expiry `S = sum_i a_i P(T_0, T_i)` has moments under the
//! `T_0`-forward measure that are affine in the bond moments, and every bond
//! moment is one Riccati solve with terminal values collected from the
//! multi-index. Cumulants of `S` then feed the truncated expansion
//!
//! ```text
//! V = P(t,T_0) [c_1 N(d) + sqrt(c_2) phi(d) (1 + sum_{l=3}^L (-1)^l q_l H_{l-2}(d))],  d = c_1/sqrt(c_2)
//! ```

mod cumulants;
mod expansion;
mod hermite;
mod moments;
mod multiindex;

pub use cumulants::{cumulants_from_moments, expansion_coefficients, MAX_ORDER};
pub use expansion::{gc_price, gc_price_from_cumulants, GcPrice, DEFAULT_ORDERS};
pub use hermite::{hermite, hermite_all};
pub use moments::{bond_moment, riccati_terminal, swap_coefficients, swap_moments};
pub use multiindex::{enumerate_multiindices, multiindex_count, MultiIndex, MAX_PAYMENTS};
