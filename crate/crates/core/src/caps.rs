use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Capacity caps for the combinatorial constructions.
///
/// The response-pair space grows as n^l·m^n and the inequality row space as
/// n·l^m; the caps make oversized requests fail fast with a capacity error
/// instead of exhausting memory.
#[derive(Clone, Debug)]
pub struct Caps {
    /// Largest allowed number of response pairs (columns of the response matrix).
    pub pairs: u64,
    /// Largest allowed number of instrumental-inequality rows.
    pub rows: u64,
    /// Largest allowed relabeling-orbit size (n!·m!·l!).
    pub orbit: u64,
    /// Largest allowed intermediate ray count in double description.
    pub rays: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            pairs: 1_000_000,
            rows: 1_000_000,
            orbit: 1_000_000,
            rays: 1_000_000,
        }
    }
}

impl Caps {
    /// Check `needed` against `cap` and hand back a usable `usize`.
    pub(crate) fn admit(what: &'static str, needed: &BigUint, cap: u64) -> Result<usize> {
        if *needed > BigUint::from(cap) {
            return Err(Error::Capacity {
                what,
                needed: needed.to_string(),
                cap,
            });
        }
        // needed <= cap <= u64::MAX, so the conversion cannot fail on 64-bit
        // targets; go through u64 to keep 32-bit builds honest.
        let as_u64: u64 = needed.try_into().map_err(|_| Error::Capacity {
            what,
            needed: needed.to_string(),
            cap,
        })?;
        usize::try_from(as_u64).map_err(|_| Error::Capacity {
            what,
            needed: needed.to_string(),
            cap,
        })
    }
}
