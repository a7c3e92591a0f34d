//! Small integer-arithmetic helpers: prime sieves, factorization tables,
//! divisor counts.

/// Primes up to and including `n`, by Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2usize;
    while p * p <= n {
        if sieve[p] {
            let mut m = p * p;
            while m <= n {
                sieve[m] = false;
                m += p;
            }
        }
        p += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| if b { Some(i as u64) } else { None })
        .collect()
}

/// Smallest-prime-factor table for 0..=n (spf[0] = spf[1] = 0).
pub fn spf_table(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut m = i;
            while m <= n {
                if spf[m] == 0 {
                    spf[m] = i as u32;
                }
                m += i;
            }
        }
    }
    spf
}

/// Factor `n` using a smallest-prime-factor table: returns (p, v) pairs.
pub fn factorize(mut n: usize, spf: &[u32]) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    while n > 1 {
        let p = spf[n] as usize;
        let mut v = 0u32;
        while n % p == 0 {
            n /= p;
            v += 1;
        }
        out.push((p as u64, v));
    }
    out
}

/// Number of divisors of n (n >= 1), by trial division; for occasional use.
pub fn divisor_count(n: u64) -> u64 {
    let mut d = 1u64;
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut v = 0;
            while m % p == 0 {
                m /= p;
                v += 1;
            }
            d *= v + 1;
        }
        p += 1 + (p & 1);
    }
    if m > 1 {
        d *= 2;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_small() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
    }

    #[test]
    fn spf_factorize() {
        let spf = spf_table(100);
        assert_eq!(factorize(84, &spf), vec![(2, 2), (3, 1), (7, 1)]);
        assert_eq!(factorize(97, &spf), vec![(97, 1)]);
    }

    #[test]
    fn divisor_counts() {
        assert_eq!(divisor_count(1), 1);
        assert_eq!(divisor_count(12), 6);
        assert_eq!(divisor_count(97), 2);
    }
}
