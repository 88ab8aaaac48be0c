use super::ArithError;

/// Largest bound accepted by [`sieve`].
pub const SIEVE_CEILING: u64 = 1_000_000_000;

/// Odd numbers covered by one segment (one bit each).
const SEGMENT_ODDS: usize = 1 << 18;

/// All primes up to a bound, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    bound: u64,
    primes: Vec<u32>,
}

impl PrimeTable {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().map(|&p| p as u64)
    }

    /// Membership test; only meaningful for `n <= bound`.
    pub fn contains(&self, n: u64) -> bool {
        n <= u32::MAX as u64 && self.primes.binary_search(&(n as u32)).is_ok()
    }

    /// Number of primes `<= x` (capped at the table bound).
    pub fn count_up_to(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| (p as u64) <= x)
    }

    /// The primes `<= x` as a slice.
    pub fn up_to(&self, x: u64) -> &[u32] {
        &self.primes[..self.count_up_to(x)]
    }
}

/// Segmented sieve of Eratosthenes over odd numbers.
///
/// Memory is one bitmap segment plus the base primes up to `sqrt(bound)`,
/// on top of the output table itself.
pub fn sieve(bound: u64) -> Result<PrimeTable, ArithError> {
    if !(2..=SIEVE_CEILING).contains(&bound) {
        return Err(ArithError::BoundOutOfRange(bound));
    }
    let estimate = (bound as f64 / (bound as f64).ln() * 1.15) as usize + 16;
    let mut primes = Vec::with_capacity(estimate);
    primes.push(2u32);

    let root = isqrt(bound);
    let base = small_odd_primes(root);

    // Bit i of the segment starting at `low` stands for the odd number low + 2i.
    let mut words = vec![0u64; SEGMENT_ODDS / 64];
    let mut low = 3u64;
    while low <= bound {
        let span = (((bound - low) / 2 + 1) as usize).min(SEGMENT_ODDS);
        words.iter_mut().for_each(|w| *w = 0);
        let high = low + 2 * (span as u64 - 1);
        for &p in &base {
            let p = p as u64;
            if p * p > high {
                break;
            }
            // first odd multiple of p that is >= max(p*p, low)
            let mut start = (p * p).max(low.div_ceil(p) * p);
            if start % 2 == 0 {
                start += p;
            }
            let mut i = ((start - low) / 2) as usize;
            let step = p as usize;
            while i < span {
                words[i / 64] |= 1 << (i % 64);
                i += step;
            }
        }
        for (wi, &w) in words.iter().enumerate().take(span.div_ceil(64)) {
            let mut free = !w;
            while free != 0 {
                let bit = free.trailing_zeros() as usize;
                let i = wi * 64 + bit;
                if i >= span {
                    break;
                }
                primes.push((low + 2 * i as u64) as u32);
                free &= free - 1;
            }
        }
        low = high + 2;
    }
    Ok(PrimeTable { bound, primes })
}

fn small_odd_primes(limit: u64) -> Vec<u32> {
    let limit = limit as usize;
    if limit < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    let mut n = 3;
    while n <= limit {
        if !composite[n] {
            out.push(n as u32);
            let mut m = n * n;
            while m <= limit {
                composite[m] = true;
                m += 2 * n;
            }
        }
        n += 2;
    }
    out
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_primes(limit: u64) -> Vec<u32> {
        (2..=limit)
            .filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .map(|n| n as u32)
            .collect()
    }

    #[test]
    fn first_primes() {
        assert_eq!(sieve(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(sieve(2).unwrap().primes(), &[2]);
        assert_eq!(sieve(3).unwrap().primes(), &[2, 3]);
    }

    #[test]
    fn rejects_out_of_range() {
        assert_eq!(sieve(1), Err(ArithError::BoundOutOfRange(1)));
        assert!(sieve(SIEVE_CEILING + 1).is_err());
    }

    #[test]
    fn agrees_with_trial_division_across_segments() {
        // crosses a segment boundary (2^18 odd numbers ~ 524288)
        let limit = 600_000;
        assert_eq!(sieve(limit).unwrap().primes(), trial_division_primes(limit).as_slice());
    }

    #[test]
    fn prime_count_to_one_million() {
        let t = sieve(1_000_000).unwrap();
        assert_eq!(t.len(), 78_498);
        assert_eq!(t.count_up_to(100), 25);
        assert!(t.contains(999_983));
        assert!(!t.contains(999_981));
    }

    #[test]
    fn isqrt_edges() {
        for n in [0u64, 1, 3, 4, 15, 16, 17, u32::MAX as u64, (1 << 52) + 1] {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n, "{n}");
        }
    }
}
