//! Exact q-expansion arithmetic and integral bases of modular forms for the
//! full modular group.
//!
//! A [`QExpansion`] holds the coefficients a(0)..a(N) of a weight-k form as
//! exact rationals; everything in this module is exact (no rounding).
//! Construction entry points:
//! - [`eisenstein_qexp`]: E_k = 1 − (2k/B_k) Σ σ_{k−1}(n) qⁿ,
//! - [`delta_qexp`]: Δ = q Π (1−qⁿ)²⁴, built from the sparse cube of Euler's
//!   product and three squarings,
//! - [`miller_basis`]: the echelonized integral basis g_i = q^i + O(q^{d+1})
//!   of the cusp space S_k.
//!
//! Dense integer series are multiplied by Kronecker substitution (pack the
//! coefficients into one big integer, one GMP multiply, balanced-digit
//! unpack); rational series fall back to schoolbook.

use std::collections::HashMap;
use std::sync::Mutex;

use once_cell::sync::Lazy;
use rug::integer::Order;
use rug::ops::Pow;
use rug::{Assign, Integer, Rational};

use crate::error::{Error, Result};

/// Truncated q-expansion with exact rational coefficients a(0)..a(N).
#[derive(Clone, Debug, PartialEq)]
pub struct QExpansion {
    weight: i64,
    coeffs: Vec<Rational>,
}

impl QExpansion {
    pub fn new(weight: i64, coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "QExpansion needs at least a(0)");
        QExpansion { weight, coeffs }
    }

    pub fn from_integers(weight: i64, coeffs: Vec<Integer>) -> Self {
        Self::new(weight, coeffs.into_iter().map(Rational::from).collect())
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    /// Truncation order N: coefficients a(0)..a(N) are stored.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_cusp_expansion(&self) -> bool {
        self.coeffs[0] == 0
    }

    /// Order of vanishing at q = 0, i.e. the index of the first nonzero
    /// coefficient; None for the zero series (to stored truncation).
    pub fn q_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| *c != 0)
    }

    /// True if every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom() == &1)
    }

    pub fn truncate(&self, n: usize) -> QExpansion {
        let n = n.min(self.truncation());
        QExpansion::new(self.weight, self.coeffs[..=n].to_vec())
    }

    /// Sum; both operands must have equal weight. Valid to the smaller
    /// truncation.
    pub fn add(&self, other: &QExpansion) -> QExpansion {
        assert_eq!(self.weight, other.weight, "weights differ in add");
        let n = self.truncation().min(other.truncation());
        let coeffs = (0..=n)
            .map(|i| Rational::from(&self.coeffs[i] + &other.coeffs[i]))
            .collect();
        QExpansion::new(self.weight, coeffs)
    }

    pub fn scale(&self, c: &Rational) -> QExpansion {
        QExpansion::new(
            self.weight,
            self.coeffs.iter().map(|a| Rational::from(a * c)).collect(),
        )
    }

    /// Product; weights add. Valid to the smaller truncation.
    pub fn mul(&self, other: &QExpansion) -> QExpansion {
        let n_out = self.truncation().min(other.truncation());
        let w = self.weight + other.weight;
        if self.is_integral() && other.is_integral() {
            let a: Vec<Integer> = self.coeffs.iter().map(|c| c.numer().clone()).collect();
            let b: Vec<Integer> = other.coeffs.iter().map(|c| c.numer().clone()).collect();
            let prod = mul_integer_series(&a, &b, n_out + 1);
            QExpansion::from_integers(w, prod)
        } else {
            let prod = schoolbook_rational(&self.coeffs, &other.coeffs, n_out + 1);
            QExpansion::new(w, prod)
        }
    }

    /// Integer power by repeated squaring (exponent ≥ 0).
    pub fn power(&self, e: u32) -> QExpansion {
        if e == 0 {
            let mut c = vec![Rational::new(); self.coeffs.len()];
            c[0] = Rational::from(1);
            return QExpansion::new(0, c);
        }
        let mut base = self.clone();
        let mut acc: Option<QExpansion> = None;
        let mut e = e;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base);
        }
        acc.unwrap()
    }
}

fn schoolbook_rational(a: &[Rational], b: &[Rational], out_len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::new(); out_len];
    for (i, ai) in a.iter().enumerate() {
        if i >= out_len || *ai == 0 {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j >= out_len {
                break;
            }
            if *bj != 0 {
                out[i + j] += Rational::from(ai * bj);
            }
        }
    }
    out
}

fn schoolbook_integer(a: &[Integer], b: &[Integer], out_len: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); out_len];
    for (i, ai) in a.iter().enumerate() {
        if i >= out_len || *ai == 0 {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j >= out_len {
                break;
            }
            out[i + j] += Integer::from(ai * bj);
        }
    }
    out
}

/// Exact product of two integer coefficient series, truncated to `out_len`
/// terms. Kronecker substitution above a small size cutoff.
pub fn mul_integer_series(a: &[Integer], b: &[Integer], out_len: usize) -> Vec<Integer> {
    if a.len().min(b.len()) < 64 || out_len < 64 {
        return schoolbook_integer(a, b, out_len);
    }
    kronecker_mul(a, b, out_len)
}

/// Kronecker-substitution product: evaluate both series at 2^s for a slot
/// width s large enough that the product's coefficients cannot interact,
/// multiply once in GMP, then read the balanced digits back.
fn kronecker_mul(a: &[Integer], b: &[Integer], out_len: usize) -> Vec<Integer> {
    let bits_a = a.iter().map(|x| x.significant_bits()).max().unwrap_or(0);
    let bits_b = b.iter().map(|x| x.significant_bits()).max().unwrap_or(0);
    if bits_a == 0 || bits_b == 0 {
        return vec![Integer::new(); out_len];
    }
    let conv_len = a.len().min(b.len()) as u64;
    let slot_bits = bits_a + bits_b + (64 - conv_len.leading_zeros()) + 2;
    let limbs = ((slot_bits + 63) / 64) as usize;
    let slot_bits = (limbs * 64) as u32;

    let pack = |s: &[Integer], negative: bool| -> Integer {
        let mut buf = vec![0u64; s.len() * limbs];
        for (i, c) in s.iter().enumerate() {
            let take = if negative { *c < 0 } else { *c > 0 };
            if take {
                let abs = Integer::from(c.abs_ref());
                let nd = abs.significant_digits::<u64>();
                debug_assert!(nd <= limbs);
                abs.write_digits(&mut buf[i * limbs..i * limbs + nd], Order::Lsf);
            }
        }
        Integer::from_digits(&buf, Order::Lsf)
    };

    let pa = Integer::from(pack(a, false) - pack(a, true));
    let pb = Integer::from(pack(b, false) - pack(b, true));
    let prod = pa * pb;

    // Add 2^(s−1) to every slot: digits become nonnegative with no carries,
    // since |c_k| <= 2^(s−1) − 1 by the slot-width choice.
    let total_slots = a.len() + b.len() - 1;
    let mut offset_buf = vec![0u64; total_slots * limbs];
    for k in 0..total_slots {
        offset_buf[k * limbs + limbs - 1] = 1u64 << 63;
    }
    let shifted = prod + Integer::from_digits(&offset_buf, Order::Lsf);
    debug_assert!(shifted >= 0);

    let mut digits = vec![0u64; shifted.significant_digits::<u64>()];
    shifted.write_digits(&mut digits, Order::Lsf);
    let half = Integer::from(1) << (slot_bits - 1);
    let mut out = Vec::with_capacity(out_len);
    let mut slot = Integer::new();
    for k in 0..out_len {
        if k >= total_slots {
            out.push(Integer::new());
            continue;
        }
        let lo = k * limbs;
        let hi = ((k + 1) * limbs).min(digits.len());
        if lo >= digits.len() {
            // Slot holds exactly the offset; coefficient is zero.
            out.push(Integer::new());
            continue;
        }
        slot.assign(Integer::from_digits(&digits[lo..hi], Order::Lsf));
        out.push(Integer::from(&slot - &half));
    }
    out
}

/// dim S_k for even k ≥ 0 (level one).
pub fn dim_cusp_forms(k: i64) -> usize {
    if k < 12 || k % 2 != 0 {
        return 0;
    }
    let d = k / 12;
    if k % 12 == 2 {
        (d - 1) as usize
    } else {
        d as usize
    }
}

static BERNOULLI: Lazy<Mutex<Vec<Rational>>> = Lazy::new(|| Mutex::new(vec![Rational::from(1)]));

/// Exact Bernoulli number B_n (B_1 = −1/2 convention), cached per process.
pub fn bernoulli(n: usize) -> Rational {
    let mut cache = BERNOULLI.lock().unwrap();
    while cache.len() <= n {
        let m = cache.len();
        // B_m = −1/(m+1) Σ_{j<m} C(m+1, j) B_j
        let mut acc = Rational::new();
        let mut binom = Integer::from(1); // C(m+1, 0)
        for (j, bj) in cache.iter().enumerate() {
            acc += Rational::from(bj * &binom);
            // C(m+1, j+1) = C(m+1, j) * (m+1−j)/(j+1)
            binom *= (m + 1 - j) as u64;
            binom /= (j + 1) as u64;
        }
        acc /= -Rational::from((m + 1) as u64);
        cache.push(acc);
    }
    cache[n].clone()
}

/// Normalized Eisenstein series E_k to truncation N, exact rationals,
/// a(0) = 1.
pub fn eisenstein_qexp(k: i64, n: usize) -> Result<QExpansion> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::InvalidWeight(k));
    }
    let factor = Rational::from((-2 * k, 1)) / bernoulli(k as usize);
    let mut coeffs = vec![Rational::new(); n + 1];
    coeffs[0] = Rational::from(1);
    if n >= 1 {
        // sigma_{k−1} by sieving multiples of each d.
        let mut sigma = vec![Integer::new(); n + 1];
        for d in 1..=n {
            let dp = Integer::from(d as u64).pow((k - 1) as u32);
            let mut m = d;
            while m <= n {
                sigma[m] += &dp;
                m += d;
            }
        }
        for m in 1..=n {
            coeffs[m] = Rational::from(&factor * &sigma[m]);
        }
    }
    Ok(QExpansion::new(k, coeffs))
}

/// Coefficients of Π(1−qⁿ)³ = Σ_{m≥0} (−1)^m (2m+1) q^{m(m+1)/2}, to `len`
/// terms.
fn euler_cube(len: usize) -> Vec<Integer> {
    let mut c = vec![Integer::new(); len];
    let mut m = 0u64;
    loop {
        let idx = (m * (m + 1) / 2) as usize;
        if idx >= len {
            break;
        }
        let v = Integer::from(2 * m + 1);
        c[idx] = if m % 2 == 0 { v } else { -v };
        m += 1;
    }
    c
}

/// Δ = q Π(1−qⁿ)²⁴ to truncation N (integer coefficients τ(n), τ(1) = 1).
pub fn delta_qexp(n: usize) -> Result<QExpansion> {
    if n < 1 {
        return Err(Error::InvalidTruncation(format!(
            "delta_qexp needs N >= 1, got {n}"
        )));
    }
    let p24 = eta24(n - 1);
    let mut coeffs = vec![Integer::new(); n + 1];
    for (i, c) in p24.into_iter().enumerate() {
        coeffs[i + 1] = c;
    }
    Ok(QExpansion::from_integers(12, coeffs))
}

/// Π(1−qⁿ)²⁴ to `trunc` (inclusive), by squaring the sparse cube three times.
fn eta24(trunc: usize) -> Vec<Integer> {
    let len = trunc + 1;
    let p3 = euler_cube(len);
    let p6 = mul_integer_series(&p3, &p3, len);
    let p12 = mul_integer_series(&p6, &p6, len);
    mul_integer_series(&p12, &p12, len)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum SeriesKind {
    E4,
    E6,
    Delta,
}

/// Cache of powers of E₄, E₆, Δ (integer series); grown on demand, sliced on
/// shorter requests. Shared across weights so the acceptance sweeps reuse
/// the expensive products.
static POWER_CACHE: Lazy<Mutex<HashMap<(SeriesKind, u32), Vec<Integer>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn base_series(kind: SeriesKind, n: usize) -> Vec<Integer> {
    match kind {
        SeriesKind::E4 => eisenstein_qexp(4, n)
            .unwrap()
            .coeffs()
            .iter()
            .map(|c| c.numer().clone())
            .collect(),
        SeriesKind::E6 => eisenstein_qexp(6, n)
            .unwrap()
            .coeffs()
            .iter()
            .map(|c| c.numer().clone())
            .collect(),
        SeriesKind::Delta => delta_qexp(n.max(1))
            .unwrap()
            .coeffs()
            .iter()
            .take(n + 1)
            .map(|c| c.numer().clone())
            .collect(),
    }
}

fn cached_power(kind: SeriesKind, e: u32, n: usize) -> Vec<Integer> {
    if e == 0 {
        let mut c = vec![Integer::new(); n + 1];
        c[0] = Integer::from(1);
        return c;
    }
    let mut cache = POWER_CACHE.lock().unwrap();
    if let Some(v) = cache.get(&(kind, e)) {
        if v.len() > n {
            return v[..=n].to_vec();
        }
    }
    // Build the ladder up to e at length n+1.
    let base = base_series(kind, n);
    if cache
        .get(&(kind, 1))
        .map(|v| v.len() <= n)
        .unwrap_or(true)
    {
        cache.insert((kind, 1), base.clone());
    }
    for j in 2..=e {
        let need = match cache.get(&(kind, j)) {
            Some(v) => v.len() <= n,
            None => true,
        };
        if need {
            let prev = cache.get(&(kind, j - 1)).unwrap().clone();
            let prev = if prev.len() > n + 1 {
                prev[..=n].to_vec()
            } else {
                prev
            };
            let next = mul_integer_series(&prev, &base, n + 1);
            cache.insert((kind, j), next);
        }
    }
    let v = cache.get(&(kind, e)).unwrap();
    v[..=n.min(v.len() - 1)].to_vec()
}

/// Victor Miller basis of S_k to truncation N: d = dim S_k integral series
/// g_i = q^i + O(q^{d+1}), echelonized with ascending q-power pivots.
pub fn miller_basis(k: i64, n: usize) -> Result<Vec<QExpansion>> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::InvalidWeight(k));
    }
    let d = dim_cusp_forms(k);
    if d == 0 {
        return Ok(Vec::new());
    }
    if n < d + 1 {
        return Err(Error::InsufficientTruncation {
            needed: d + 1,
            have: n,
        });
    }
    // Raw spanning set Δ^i E₄^a E₆^b of weight k, i = 1..d.
    let mut raw: Vec<Vec<Integer>> = Vec::with_capacity(d);
    for i in 1..=d {
        let w = k - 12 * i as i64;
        debug_assert!(w >= 0 && w % 2 == 0 && w != 2);
        let (a, b) = if w % 4 == 0 {
            (w / 4, 0)
        } else {
            ((w - 6) / 4, 1)
        };
        let mut s = cached_power(SeriesKind::Delta, i as u32, n);
        if a > 0 {
            s = mul_integer_series(&s, &cached_power(SeriesKind::E4, a as u32, n), n + 1);
        }
        if b > 0 {
            s = mul_integer_series(&s, &cached_power(SeriesKind::E6, 1, n), n + 1);
        }
        debug_assert!(s[i] == 1, "leading coefficient of Δ^i E₄^a E₆^b");
        raw.push(s);
    }
    // Echelonize: clear column j from every other row; pivots are already 1,
    // so the elimination is integral.
    for j in 1..=d {
        let pivot = raw[j - 1].clone();
        for (idx, row) in raw.iter_mut().enumerate() {
            if idx == j - 1 {
                continue;
            }
            let c = row[j].clone();
            if c != 0 {
                for (r, p) in row.iter_mut().zip(pivot.iter()) {
                    *r -= Integer::from(&c * p);
                }
            }
        }
    }
    Ok(raw
        .into_iter()
        .map(|coeffs| QExpansion::from_integers(k, coeffs))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::RemRounding;

    /// Brute-force divisor-power sum, independent of the sieve.
    fn sigma_oracle(n: u64, e: u32) -> Integer {
        let mut s = Integer::new();
        for d in 1..=n {
            if n % d == 0 {
                s += Integer::from(d).pow(e);
            }
        }
        s
    }

    /// Brute-force expansion of q Π_{m≤N}(1−q^m)²⁴, naive polynomial products.
    fn delta_oracle(n: usize) -> Vec<Integer> {
        let mut poly = vec![Integer::new(); n + 1];
        poly[0] = Integer::from(1);
        for m in 1..=n {
            for _ in 0..24 {
                // poly *= (1 − q^m)
                let snapshot = poly.clone();
                for (i, c) in snapshot.iter().enumerate() {
                    if i + m <= n && *c != 0 {
                        poly[i + m] -= c;
                    }
                }
            }
        }
        // shift by one power of q
        let mut out = vec![Integer::new(); n + 1];
        for i in 0..n {
            out[i + 1] = poly[i].clone();
        }
        out
    }

    #[test]
    fn eisenstein_small_weights() {
        let e4 = eisenstein_qexp(4, 2).unwrap();
        assert_eq!(*e4.coeff(0), 1);
        assert_eq!(
            *e4.coeff(1),
            Rational::from(240) * Rational::from(sigma_oracle(1, 3))
        );
        assert_eq!(*e4.coeff(1), 240);
        assert_eq!(*e4.coeff(2), Rational::from(240) * Rational::from(sigma_oracle(2, 3)));
        assert_eq!(*e4.coeff(2), 2160);
    }

    #[test]
    fn eisenstein_constant_series() {
        for k in [4i64, 6, 12, 26] {
            let e = eisenstein_qexp(k, 0).unwrap();
            assert_eq!(e.truncation(), 0);
            assert_eq!(*e.coeff(0), 1);
        }
    }

    #[test]
    fn eisenstein_rejects_bad_weight() {
        assert!(matches!(eisenstein_qexp(5, 3), Err(Error::InvalidWeight(5))));
        assert!(matches!(eisenstein_qexp(2, 3), Err(Error::InvalidWeight(2))));
    }

    #[test]
    fn discriminant_identity_e4_e6() {
        // E₄³ − E₆² = 1728 Δ, exactly, to order 10.
        let n = 10;
        let e4 = eisenstein_qexp(4, n).unwrap();
        let e6 = eisenstein_qexp(6, n).unwrap();
        let lhs = e4.power(3).add(&e6.power(2).scale(&Rational::from(-1)));
        let delta = delta_qexp(n).unwrap();
        for i in 0..=n {
            assert_eq!(
                *lhs.coeff(i),
                Rational::from(delta.coeff(i) * &Rational::from(1728)),
                "coefficient {i}"
            );
        }
    }

    #[test]
    fn delta_examples() {
        assert!(matches!(delta_qexp(0), Err(Error::InvalidTruncation(_))));
        let d1 = delta_qexp(1).unwrap();
        assert_eq!(*d1.coeff(0), 0);
        assert_eq!(*d1.coeff(1), 1);
        let d3 = delta_qexp(3).unwrap();
        assert_eq!(*d3.coeff(2), -24);
        assert_eq!(*d3.coeff(3), 252);
        let d5 = delta_qexp(5).unwrap();
        assert_eq!(*d5.coeff(5), 4830);
    }

    #[test]
    fn delta_matches_product_oracle_to_50() {
        let n = 50;
        let oracle = delta_oracle(n);
        let d = delta_qexp(n).unwrap();
        for i in 0..=n {
            assert_eq!(d.coeff(i).numer(), &oracle[i], "tau({i})");
        }
    }

    #[test]
    fn ramanujan_congruence_mod_691() {
        // τ(n) ≡ σ₁₁(n) mod 691 for n ≤ 50, exact arithmetic.
        let d = delta_qexp(50).unwrap();
        let m = Integer::from(691);
        for n in 1..=50u64 {
            let tau = d.coeff(n as usize).numer().clone();
            let diff = tau - sigma_oracle(n, 11);
            assert_eq!(diff.rem_euc(&m), 0, "n = {n}");
        }
    }

    #[test]
    fn miller_basis_examples() {
        // dim S₁₂ = 1 and echelon normalization forces Δ.
        let b12 = miller_basis(12, 10).unwrap();
        assert_eq!(b12.len(), 1);
        let d = delta_qexp(10).unwrap();
        for i in 0..=10 {
            assert_eq!(b12[0].coeff(i), d.coeff(i));
        }
        // dim S₁₀ = 0.
        assert!(miller_basis(10, 10).unwrap().is_empty());
        // dim S₂₄ = 2, echelon leading terms forced.
        let b24 = miller_basis(24, 10).unwrap();
        assert_eq!(b24.len(), 2);
        assert_eq!(*b24[0].coeff(0), 0);
        assert_eq!(*b24[0].coeff(1), 1);
        assert_eq!(*b24[0].coeff(2), 0);
        assert_eq!(*b24[1].coeff(0), 0);
        assert_eq!(*b24[1].coeff(1), 0);
        assert_eq!(*b24[1].coeff(2), 1);
    }

    #[test]
    fn miller_basis_insufficient_truncation_detected() {
        assert!(matches!(
            miller_basis(24, 2),
            Err(Error::InsufficientTruncation { needed: 3, have: 2 })
        ));
    }

    #[test]
    fn miller_dimensions_match_formula_oracle() {
        // Independent statement of the classical dimension formula.
        fn dim_oracle(k: i64) -> usize {
            if k % 12 == 2 {
                (k / 12 - 1).max(0) as usize
            } else if k >= 12 {
                (k / 12) as usize
            } else {
                0
            }
        }
        for k in (12..=60).step_by(2) {
            let d = miller_basis(k, dim_oracle(k) + 2).unwrap().len();
            assert_eq!(d, dim_oracle(k), "k = {k}");
        }
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(2), Rational::from((1, 6)));
        assert_eq!(bernoulli(4), Rational::from((-1, 30)));
        assert_eq!(bernoulli(12), Rational::from((-691, 2730)));
        assert_eq!(bernoulli(3), Rational::new());
    }

    #[test]
    fn kronecker_matches_schoolbook_on_signed_series() {
        // Deterministic pseudo-random signed inputs, large enough to take the
        // Kronecker path.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let a: Vec<Integer> = (0..80)
            .map(|_| Integer::from(next() as i64 % 1_000_000))
            .collect();
        let b: Vec<Integer> = (0..97)
            .map(|_| Integer::from(next() as i64 % 1_000_000))
            .collect();
        let fast = kronecker_mul(&a, &b, 80);
        let slow = schoolbook_integer(&a, &b, 80);
        assert_eq!(fast, slow);
    }

    #[test]
    fn power_zero_is_one() {
        let d = delta_qexp(5).unwrap();
        let one = d.power(0);
        assert_eq!(*one.coeff(0), 1);
        assert!(one.coeffs()[1..].iter().all(|c| *c == 0));
    }
}
