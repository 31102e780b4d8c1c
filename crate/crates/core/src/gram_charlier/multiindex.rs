use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::cumulants::MAX_ORDER;
use crate::error::{Error, Result};

/// Largest number of payments `N` the enumeration accepts.
pub const MAX_PAYMENTS: usize = 30;

/// Exponents `(k_0, ..., k_N)` summing to `m`, with the multinomial
/// coefficient `m! / (k_0! ... k_N!)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    pub k: Vec<u8>,
    pub multiplicity: u64,
}

impl MultiIndex {
    pub fn order(&self) -> usize {
        self.k.iter().map(|&k| k as usize).sum()
    }
}

pub(crate) const FACTORIAL: [u64; MAX_ORDER + 1] = [1, 1, 2, 6, 24, 120, 720, 5040];

/// `C(N + m, m)`, the number of multi-indices of order `m` over `N + 1` slots.
pub fn multiindex_count(m: usize, payments: usize) -> u64 {
    let mut c: u64 = 1;
    for i in 1..=m as u64 {
        c = c * (payments as u64 + i) / i;
    }
    c
}

type Cache = Mutex<HashMap<(usize, usize), Arc<[MultiIndex]>>>;

/// All multi-indices of order `m` over slots `0..=payments`, in reverse
/// lexicographic order of `k`. Results are cached per `(m, payments)`.
pub fn enumerate_multiindices(m: usize, payments: usize) -> Result<Arc<[MultiIndex]>> {
    if m > MAX_ORDER || payments > MAX_PAYMENTS {
        return Err(Error::Validation(format!(
            "multi-index enumeration limited to m <= {MAX_ORDER}, N <= {MAX_PAYMENTS}; got m = {m}, N = {payments}"
        )));
    }
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("cache poisoned").get(&(m, payments)) {
        return Ok(hit.clone());
    }
    let mut out = Vec::with_capacity(multiindex_count(m, payments) as usize);
    let mut k = vec![0u8; payments + 1];
    fill(&mut k, 0, m, m, &mut out);
    let list: Arc<[MultiIndex]> = out.into();
    cache
        .lock()
        .expect("cache poisoned")
        .insert((m, payments), list.clone());
    Ok(list)
}

fn fill(k: &mut [u8], slot: usize, remaining: usize, m: usize, out: &mut Vec<MultiIndex>) {
    if slot == k.len() - 1 {
        k[slot] = remaining as u8;
        let denom: u64 = k.iter().map(|&v| FACTORIAL[v as usize]).product();
        out.push(MultiIndex {
            k: k.to_vec(),
            multiplicity: FACTORIAL[m] / denom,
        });
        return;
    }
    for v in (0..=remaining).rev() {
        k[slot] = v as u8;
        fill(k, slot + 1, remaining - v, m, out);
    }
    k[slot] = 0;
}
