//! Hecke operators on the Miller basis, eigenbasis extraction with exact
//! characteristic polynomials, normalized eigenvalues λ_f(n), the symmetric
//! square value L(1, sym²f), and the Euler-product functionals used by the
//! mass-equidistribution error terms.
//!
//! Eigenvalue extraction is deliberately exact-first: the T₂ matrix is an
//! exact integer matrix, its characteristic polynomial is computed over the
//! rationals, real roots are isolated with a Sturm chain and only then
//! refined by Newton iteration at the requested precision. Dimensions stay
//! tiny (≤ 13 for k ≤ 160), so none of this costs anything measurable.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::{Lazy, OnceCell};
use rug::ops::Pow;
use rug::{Assign, Float, Integer, Rational};

use crate::arith::primes_up_to;
use crate::error::{Error, Result};
use crate::qseries::{dim_cusp_forms, miller_basis, QExpansion};

/// A normalized Hecke cusp eigenform: a_f(1) = 1, coefficients and
/// normalized eigenvalues to the stored truncation at `prec_bits` precision.
#[derive(Debug)]
pub struct HeckeEigenform {
    weight: i64,
    truncation: usize,
    prec_bits: u32,
    /// a_f(0..N); a_f(0) = 0, a_f(1) = 1.
    a: Vec<Float>,
    /// λ_f(n) = a_f(n) / n^{(k−1)/2}; λ(0) stored as 0 for indexing comfort.
    lambda: Vec<Float>,
    /// T₂ eigenvalue (= a_f(2)), refined from the exact characteristic
    /// polynomial; kept separately as the deterministic sort key.
    t2: Float,
    /// Eigenvector coordinates in the Miller basis (v₁ = 1).
    coords: Vec<Float>,
    /// |a_f(1)| under the Petersson normalization ⟨F,F⟩ = 1, set by the
    /// evaluation module from the quadrature norm.
    norm_const: OnceCell<Float>,
    /// (value, tail estimate) of L(1, sym²f), set on first computation.
    l1sym2: OnceCell<L1Sym2>,
}

#[derive(Clone, Copy, Debug)]
pub struct L1Sym2 {
    pub value: f64,
    /// Heuristic O(1/P) tail scale; the truncation standard is unproven and
    /// recorded rather than asserted.
    pub tail_estimate: f64,
    pub prime_cutoff: u64,
}

impl HeckeEigenform {
    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn prec_bits(&self) -> u32 {
        self.prec_bits
    }

    pub fn coeff(&self, n: usize) -> &Float {
        &self.a[n]
    }

    pub fn coeffs(&self) -> &[Float] {
        &self.a
    }

    pub fn lambda(&self, n: usize) -> &Float {
        &self.lambda[n]
    }

    pub fn lambda_f64(&self, n: usize) -> f64 {
        self.lambda[n].to_f64()
    }

    pub fn t2_eigenvalue(&self) -> &Float {
        &self.t2
    }

    pub fn basis_coords(&self) -> &[Float] {
        &self.coords
    }

    /// λ_f(p^v) from λ_f(p) by the Hecke recursion
    /// λ(p^{v+1}) = λ(p)λ(p^v) − λ(p^{v−1}); avoids needing a(n) beyond the
    /// truncation.
    pub fn lambda_prime_power(&self, p: u64, v: u32) -> f64 {
        let lp = self.lambda_f64(p as usize);
        let mut prev = 1.0f64;
        let mut cur = lp;
        if v == 0 {
            return 1.0;
        }
        for _ in 1..v {
            let next = lp * cur - prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// λ_f(n) for arbitrary n via multiplicativity and the prime-power
    /// recursion; needs only λ(p) for p | n within the truncation.
    pub fn lambda_multiplicative(&self, n: u64, spf: &[u32]) -> f64 {
        let mut out = 1.0f64;
        let mut m = n as usize;
        while m > 1 {
            let p = spf[m] as usize;
            let mut v = 0u32;
            while m % p == 0 {
                m /= p;
                v += 1;
            }
            out *= self.lambda_prime_power(p as u64, v);
        }
        out
    }

    pub fn norm_const(&self) -> Option<&Float> {
        self.norm_const.get()
    }

    /// Fill the Petersson normalization constant (first write wins; the
    /// value is deterministic for fixed inputs so later writes agree).
    pub fn set_norm_const(&self, c: Float) {
        let _ = self.norm_const.set(c);
    }

    pub fn l1sym2_cached(&self) -> Option<L1Sym2> {
        self.l1sym2.get().copied()
    }
}

/// Shared handle; eigenforms are immutable after construction and safe to
/// share across workers.
pub type FormRef = Arc<HeckeEigenform>;

/// Exact matrix of T_p on the Miller basis of S_k: column j holds the
/// coefficients 1..d of T_p g_j, which are its coordinates in the echelon
/// basis. b(n) = a(pn) + p^{k−1} a(n/p).
pub fn hecke_matrix(k: i64, p: u64, basis: &[QExpansion]) -> Result<Vec<Vec<Integer>>> {
    let d = basis.len();
    if d == 0 {
        return Ok(Vec::new());
    }
    let need = (p as usize) * (d + 1);
    if basis.iter().any(|g| g.truncation() < need) {
        return Err(Error::InsufficientTruncation {
            needed: need,
            have: basis.iter().map(|g| g.truncation()).min().unwrap(),
        });
    }
    let pk = Integer::from(p).pow((k - 1) as u32);
    let mut m = vec![vec![Integer::new(); d]; d];
    for (j, g) in basis.iter().enumerate() {
        for i in 1..=d {
            let mut b = g.coeff(p as usize * i).numer().clone();
            if i % p as usize == 0 {
                b += Integer::from(&pk * g.coeff(i / p as usize).numer());
            }
            m[i - 1][j] = b;
        }
    }
    Ok(m)
}

/// Characteristic polynomial det(xI − M) of an exact integer matrix, via
/// Faddeev–LeVerrier over the rationals. Returns monic integer
/// coefficients c₀..c_d (ascending).
pub fn char_poly(m: &[Vec<Integer>]) -> Vec<Integer> {
    let d = m.len();
    let q = |x: &Integer| Rational::from(x);
    let mut coeffs = vec![Rational::new(); d + 1];
    coeffs[d] = Rational::from(1);
    let mut aux: Vec<Vec<Rational>> = (0..d)
        .map(|i| (0..d).map(|j| q(&m[i][j])).collect())
        .collect();
    for step in 1..=d {
        let mut tr = Rational::new();
        for i in 0..d {
            tr += &aux[i][i];
        }
        let c = -(tr / Rational::from(step as u64));
        coeffs[d - step] = c.clone();
        if step == d {
            break;
        }
        // aux = M (aux + c I)
        for i in 0..d {
            aux[i][i] += &c;
        }
        let mut next = vec![vec![Rational::new(); d]; d];
        for i in 0..d {
            for jj in 0..d {
                let mut s = Rational::new();
                for l in 0..d {
                    s += Rational::from(&q(&m[i][l]) * &aux[l][jj]);
                }
                next[i][jj] = s;
            }
        }
        aux = next;
    }
    coeffs
        .into_iter()
        .map(|c| {
            debug_assert_eq!(*c.denom(), 1, "char poly of integer matrix is integral");
            c.numer().clone()
        })
        .collect()
}

fn poly_eval_rational(p: &[Integer], x: &Rational) -> Rational {
    let mut acc = Rational::new();
    for c in p.iter().rev() {
        acc *= x;
        acc += Rational::from(c);
    }
    acc
}

fn poly_derivative(p: &[Integer]) -> Vec<Integer> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| Integer::from(c * Integer::from(i as u64)))
        .collect()
}

/// Sturm chain of a squarefree integer polynomial, over rationals.
fn sturm_chain(p: &[Integer]) -> Vec<Vec<Rational>> {
    let to_rat = |v: &[Integer]| -> Vec<Rational> { v.iter().map(Rational::from).collect() };
    let mut chain = vec![to_rat(p), to_rat(&poly_derivative(p))];
    loop {
        let n = chain.len();
        let (a, b) = (&chain[n - 2], &chain[n - 1]);
        if b.iter().all(|c| *c == 0) {
            chain.pop();
            break;
        }
        let rem = poly_rem_neg(a, b);
        if rem.iter().all(|c| *c == 0) {
            break;
        }
        chain.push(rem);
    }
    chain
}

/// −(a mod b) for rational polynomials (ascending coefficients).
fn poly_rem_neg(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r: Vec<Rational> = a.to_vec();
    let db = b.iter().rposition(|c| *c != 0).unwrap();
    loop {
        let dr = match r.iter().rposition(|c| *c != 0) {
            Some(d) if d >= db => d,
            _ => break,
        };
        let factor = Rational::from(&r[dr] / &b[db]);
        let shift = dr - db;
        for i in 0..=db {
            let t = Rational::from(&factor * &b[i]);
            r[i + shift] -= t;
        }
        r[dr] = Rational::new();
    }
    for c in r.iter_mut() {
        *c = Rational::from(-c.clone());
    }
    r
}

fn sign_changes_at(chain: &[Vec<Rational>], x: &Rational) -> usize {
    let mut count = 0usize;
    let mut last = 0i32;
    for p in chain {
        let v = {
            let mut acc = Rational::new();
            for c in p.iter().rev() {
                acc *= x;
                acc += c;
            }
            acc
        };
        let s = if v > 0 {
            1
        } else if v < 0 {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Isolate the real roots of a monic squarefree integer polynomial into
/// disjoint rational intervals by Sturm bisection.
fn isolate_real_roots(p: &[Integer]) -> Vec<(Rational, Rational)> {
    let chain = sturm_chain(p);
    // Cauchy bound: 1 + max |c_i| (monic).
    let mut maxc = Rational::from(0);
    let deg = p.len() - 1;
    for c in &p[..deg] {
        let a = Rational::from(c.clone().abs());
        if a > maxc {
            maxc = a;
        }
    }
    let bound = maxc + Rational::from(1);
    let lo = -bound.clone();
    let hi = bound;
    let total = sign_changes_at(&chain, &lo) - sign_changes_at(&chain, &hi);
    let mut out = Vec::new();
    let mut stack = vec![(lo, hi, total)];
    while let Some((a, b, count)) = stack.pop() {
        match count {
            0 => {}
            1 => out.push((a, b)),
            _ => {
                let mut mid = Rational::from(&a + &b);
                mid /= 2;
                // Nudge off a root if the midpoint hits one.
                if poly_eval_rational(p, &mid) == 0 {
                    mid += &b;
                    mid /= 2;
                }
                let ca = sign_changes_at(&chain, &a) - sign_changes_at(&chain, &mid);
                stack.push((a, mid.clone(), ca));
                stack.push((mid, b, count - ca));
            }
        }
    }
    out.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    out
}

fn poly_eval_float(p: &[Integer], x: &Float, prec: u32) -> Float {
    let mut acc = Float::with_val(prec, 0);
    for c in p.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

fn midpoint(a: &Float, b: &Float, prec: u32) -> Float {
    let mut m = Float::with_val(prec, a);
    m += b;
    m /= 2u32;
    m
}

/// Newton refinement of a root isolated in (lo, hi), with bisection safety.
fn refine_root(p: &[Integer], lo: &Rational, hi: &Rational, prec: u32) -> Float {
    let dp = poly_derivative(p);
    let work = prec + 64;
    let mut a = Float::with_val(work, lo);
    let mut b = Float::with_val(work, hi);
    let sa = poly_eval_rational(p, lo) > 0;
    let mut x = midpoint(&a, &b, work);
    let eps = Float::with_val(work, Float::i_exp(1, -((prec + 16) as i32)));
    for _ in 0..200 {
        let fx = poly_eval_float(p, &x, work);
        if fx == 0 {
            break;
        }
        // Maintain the bracket.
        if (fx > 0) == sa {
            a.assign(&x);
        } else {
            b.assign(&x);
        }
        let dfx = poly_eval_float(&dp, &x, work);
        let mut next = if dfx != 0 {
            let mut step = Float::with_val(work, &fx / &dfx);
            step = Float::with_val(work, &x - &step);
            step
        } else {
            midpoint(&a, &b, work)
        };
        if next <= a || next >= b {
            next = midpoint(&a, &b, work);
        }
        let step = Float::with_val(work, &next - &x).abs();
        x = next;
        let scale = Float::with_val(work, x.abs_ref()).max(&Float::with_val(work, 1));
        if step < scale * eps.clone() {
            break;
        }
    }
    Float::with_val(prec, &x)
}

/// Solve (M − θI)v = 0 for the eigenvector at an isolated eigenvalue θ, by
/// Gaussian elimination with partial pivoting; the last free column is set
/// to 1 and the system back-substituted.
fn eigenvector(m: &[Vec<Integer>], theta: &Float, prec: u32) -> Vec<Float> {
    let d = m.len();
    let work = prec + 64;
    let mut a: Vec<Vec<Float>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut v = Float::with_val(work, &m[i][j]);
                    if i == j {
                        v -= theta;
                    }
                    v
                })
                .collect()
        })
        .collect();
    // Forward elimination on the first d−1 pivots.
    let mut row_of_col = vec![usize::MAX; d];
    let mut used = vec![false; d];
    for col in 0..d - 1 {
        let mut best = usize::MAX;
        let mut best_abs = Float::with_val(work, -1);
        for (r, row) in a.iter().enumerate() {
            if used[r] {
                continue;
            }
            let v = Float::with_val(work, row[col].clone().abs());
            if v > best_abs {
                best_abs = v;
                best = r;
            }
        }
        if best == usize::MAX || best_abs == 0 {
            continue;
        }
        used[best] = true;
        row_of_col[col] = best;
        let pivot_row = a[best].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if used[r] || r == best {
                continue;
            }
            if row[col] == 0 {
                continue;
            }
            let factor = Float::with_val(work, &row[col] / &pivot_row[col]);
            for j in col..d {
                let t = Float::with_val(work, &factor * &pivot_row[j]);
                row[j] -= t;
            }
        }
    }
    // Back-substitution with v[d−1] = 1.
    let mut v = vec![Float::with_val(work, 0); d];
    v[d - 1] = Float::with_val(work, 1);
    for col in (0..d - 1).rev() {
        let r = row_of_col[col];
        if r == usize::MAX {
            v[col] = Float::with_val(work, 1);
            continue;
        }
        let mut s = Float::with_val(work, 0);
        for j in col + 1..d {
            s += Float::with_val(work, &a[r][j] * &v[j]);
        }
        v[col] = Float::with_val(work, -s / &a[r][col]);
    }
    v.into_iter().map(|x| Float::with_val(prec + 32, &x)).collect()
}

type BasisKey = (i64, usize);
static EIGEN_CACHE: Lazy<Mutex<HashMap<(i64, usize, u32), Arc<Vec<FormRef>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));
static BASIS_CACHE: Lazy<Mutex<HashMap<BasisKey, Arc<Vec<QExpansion>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Miller basis with process-level caching (construction dominates the
/// acceptance sweeps; results are immutable).
pub fn cached_basis(k: i64, n: usize) -> Result<Arc<Vec<QExpansion>>> {
    let mut cache = BASIS_CACHE.lock().unwrap();
    // Reuse any cached basis with truncation >= n.
    if let Some(best) = cache
        .iter()
        .filter(|((kk, nn), _)| *kk == k && *nn >= n)
        .min_by_key(|((_, nn), _)| *nn)
    {
        return Ok(best.1.clone());
    }
    let b = Arc::new(miller_basis(k, n)?);
    cache.insert((k, n), b.clone());
    Ok(b)
}

/// The Hecke eigenbasis of S_k at truncation N and precision `prec_bits`:
/// d eigenforms ordered by ascending T₂ eigenvalue, each with a_f(1) = 1.
pub fn eigenbasis(k: i64, n: usize, prec_bits: u32) -> Result<Arc<Vec<FormRef>>> {
    {
        let cache = EIGEN_CACHE.lock().unwrap();
        if let Some(v) = cache.get(&(k, n, prec_bits)) {
            return Ok(v.clone());
        }
    }
    let d = dim_cusp_forms(k);
    if d == 0 {
        return Err(Error::NoCuspForms(k));
    }
    let basis_n = n.max(3 * (d + 1));
    let basis = cached_basis(k, basis_n)?;
    let t2 = hecke_matrix(k, 2, &basis)?;
    let poly = char_poly(&t2);

    // Simple spectrum check: gcd(p, p') must be constant.
    let dp = poly_derivative(&poly);
    if polynomial_gcd_degree(&poly, &dp) > 0 {
        return Err(Error::DegenerateSpectrum {
            weight: k,
            detail: "characteristic polynomial of T₂ is not squarefree".into(),
        });
    }

    let intervals = isolate_real_roots(&poly);
    if intervals.len() != d {
        return Err(Error::DegenerateSpectrum {
            weight: k,
            detail: format!(
                "T₂ has {} isolated real eigenvalues, expected {d}",
                intervals.len()
            ),
        });
    }
    let roots: Vec<Float> = intervals
        .iter()
        .map(|(lo, hi)| refine_root(&poly, lo, hi, prec_bits + 32))
        .collect();
    // Separation tolerance: abort rather than guess.
    let sep = Float::with_val(prec_bits, Float::i_exp(1, -((prec_bits / 2) as i32)));
    for i in 1..roots.len() {
        if Float::with_val(prec_bits, &roots[i] - &roots[i - 1]).abs() < sep {
            return Err(Error::DegenerateSpectrum {
                weight: k,
                detail: "T₂ eigenvalues closer than the separation tolerance".into(),
            });
        }
    }

    let t3 = hecke_matrix(k, 3, &basis)?;
    let work = prec_bits + 32;
    // Residual tolerances are relative to ‖T‖·‖v‖: matrix entries scale
    // like p^{k−1} and eigenvector coordinates like d^{(k−1)/2}.
    let max_entry = |m: &[Vec<Integer>]| -> Float {
        let mut best = Float::with_val(work, 1);
        for row in m {
            for e in row {
                let a = Float::with_val(work, e).abs();
                if a > best {
                    best = a;
                }
            }
        }
        best
    };
    let t2_scale = max_entry(&t2);
    let t3_scale = max_entry(&t3);
    let eps = Float::with_val(work, Float::i_exp(1, -((prec_bits / 2) as i32)));
    let eigen_residual = |m: &[Vec<Integer>], v: &[Float], lam: &Float| -> Float {
        let mut resid = Float::with_val(work, 0);
        for i in 0..d {
            let mut s = Float::with_val(work, 0);
            for (j, vj) in v.iter().enumerate() {
                s += Float::with_val(work, &m[i][j] * vj);
            }
            s -= Float::with_val(work, lam * &v[i]);
            let sa = s.abs();
            if sa > resid {
                resid = sa;
            }
        }
        resid
    };
    let mut forms = Vec::with_capacity(d);
    for theta in &roots {
        let mut v = eigenvector(&t2, theta, prec_bits);
        // Normalize a_f(1) = v₁ = 1.
        if v[0] == 0 {
            return Err(Error::DegenerateSpectrum {
                weight: k,
                detail: "eigenvector has vanishing first coordinate".into(),
            });
        }
        let v1 = v[0].clone();
        for x in v.iter_mut() {
            *x /= &v1;
        }
        let v_scale = v
            .iter()
            .fold(Float::with_val(work, 1), |acc, x| {
                let a = Float::with_val(work, x.abs_ref());
                if a > acc {
                    a
                } else {
                    acc
                }
            });
        // Residual of the T₂ eigen-equation (guards against cancellation
        // in the normalization).
        let r2 = eigen_residual(&t2, &v, theta);
        let theta_abs = Float::with_val(work, theta.abs_ref());
        let s2 = Float::with_val(work, &t2_scale + &theta_abs);
        if r2 > Float::with_val(work, &s2 * &v_scale) * eps.clone() {
            return Err(Error::DegenerateSpectrum {
                weight: k,
                detail: "T₂ eigenvector residual above tolerance".into(),
            });
        }
        // Cross-check simultaneous diagonalization against T₃.
        let a3 = {
            let mut s = Float::with_val(work, 0);
            for (j, vj) in v.iter().enumerate() {
                s += Float::with_val(work, &t3[0][j] * vj);
            }
            s
        };
        let r3 = eigen_residual(&t3, &v, &a3);
        let a3_abs = Float::with_val(work, a3.abs_ref());
        let s3 = Float::with_val(work, &t3_scale + &a3_abs);
        if r3 > Float::with_val(work, &s3 * &v_scale) * eps.clone() {
            return Err(Error::DegenerateSpectrum {
                weight: k,
                detail: "T₃ does not diagonalize in the T₂ eigenbasis within tolerance".into(),
            });
        }

        // a_f(n) = Σ_j v_j g_j(n); exact integers times Float coordinates.
        let mut a = Vec::with_capacity(n + 1);
        for idx in 0..=n {
            let mut s = Float::with_val(work, 0);
            for (j, vj) in v.iter().enumerate() {
                let c = basis[j].coeff(idx).numer();
                if *c != 0 {
                    s += Float::with_val(work, c * vj);
                }
            }
            a.push(Float::with_val(prec_bits, &s));
        }
        // λ(n) = a(n) / sqrt(n^{k−1}).
        let mut lambda = Vec::with_capacity(n + 1);
        lambda.push(Float::with_val(prec_bits, 0));
        for idx in 1..=n {
            let nk = Float::with_val(work, Integer::from(idx as u64).pow((k - 1) as u32));
            let den = nk.sqrt();
            lambda.push(Float::with_val(prec_bits, &a[idx] / &den));
        }
        forms.push(Arc::new(HeckeEigenform {
            weight: k,
            truncation: n,
            prec_bits,
            a,
            lambda,
            t2: theta.clone(),
            coords: v,
            norm_const: OnceCell::new(),
            l1sym2: OnceCell::new(),
        }));
    }
    forms.sort_by(|x, y| x.t2.partial_cmp(&y.t2).unwrap());
    let arc = Arc::new(forms);
    EIGEN_CACHE
        .lock()
        .unwrap()
        .insert((k, n, prec_bits), arc.clone());
    Ok(arc)
}

fn polynomial_gcd_degree(p: &[Integer], q: &[Integer]) -> usize {
    let to_rat = |v: &[Integer]| -> Vec<Rational> { v.iter().map(Rational::from).collect() };
    let mut a = to_rat(p);
    let mut b = to_rat(q);
    loop {
        let db = b.iter().rposition(|c| *c != 0);
        match db {
            None => {
                return a.iter().rposition(|c| *c != 0).unwrap_or(0);
            }
            Some(_) => {
                let r = poly_rem_neg(&a, &b);
                a = b;
                b = r;
            }
        }
    }
}

/// Truncated Euler product for L(1, sym²f) with the heuristic O(1/P) tail.
/// Local factor: [(1 − 1/p)(1 − (λ(p²)−1)/p + 1/p²)]⁻¹ with λ(p²) = λ(p)²−1.
pub fn l1_sym2(f: &HeckeEigenform, prime_cutoff: u64) -> Result<L1Sym2> {
    if prime_cutoff < 100 {
        return Err(Error::CutoffTooSmall(prime_cutoff));
    }
    if let Some(v) = f.l1sym2.get() {
        if v.prime_cutoff == prime_cutoff {
            return Ok(*v);
        }
    }
    if f.truncation() < prime_cutoff as usize {
        return Err(Error::InsufficientTruncation {
            needed: prime_cutoff as usize,
            have: f.truncation(),
        });
    }
    let mut log_val = 0.0f64;
    for p in primes_up_to(prime_cutoff) {
        let lp = f.lambda_f64(p as usize);
        let lp2 = lp * lp - 1.0;
        let pf = p as f64;
        let local = (1.0 - 1.0 / pf) * (1.0 - (lp2 - 1.0) / pf + 1.0 / (pf * pf));
        log_val -= local.ln();
    }
    let value = log_val.exp();
    assert!(value > 0.0, "L(1, sym²f) must be positive");
    let out = L1Sym2 {
        value,
        tail_estimate: value / prime_cutoff as f64,
        prime_cutoff,
    };
    let _ = f.l1sym2.set(out);
    Ok(out)
}

/// The four §4 Euler products over p ≤ P. Factors are recorded as-is; any
/// nonpositive factor is listed and the affected product excluded from the
/// (0,1] assertion rather than clamped.
#[derive(Clone, Debug)]
pub struct EulerProducts {
    pub prime_cutoff: u64,
    /// Π (1 − n(p)/p), n(p) = λ(p²) + ¼(1 − λ(p²)²).
    pub prod_n: f64,
    /// Π (1 − (λ(p²)+1)/p).
    pub prod_eis: f64,
    /// Π (1 − (|λ(p)|−1)²/p).
    pub prod_hol: f64,
    /// Π (1 − ½(|λ(p)|−1)²/p).
    pub prod_hol_half: f64,
    /// Primes where a factor of the named product was ≤ 0.
    pub degenerate: Vec<(&'static str, u64, f64)>,
    /// (min, max) factor seen per product, in declaration order.
    pub factor_range: [(f64, f64); 4],
}

impl EulerProducts {
    pub fn product_in_unit_interval(&self, which: &str, value: f64) -> bool {
        if self.degenerate.iter().any(|(name, _, _)| *name == which) {
            return true; // excluded from the assertion by contract
        }
        value > 0.0 && value <= 1.0
    }
}

pub fn euler_products(f: &HeckeEigenform, prime_cutoff: u64) -> Result<EulerProducts> {
    if f.truncation() < prime_cutoff as usize {
        return Err(Error::InsufficientTruncation {
            needed: prime_cutoff as usize,
            have: f.truncation(),
        });
    }
    let mut prods = [1.0f64; 4];
    let names = ["prod_n", "prod_eis", "prod_hol", "prod_hol_half"];
    let mut degenerate = Vec::new();
    let mut range = [(f64::INFINITY, f64::NEG_INFINITY); 4];
    for p in primes_up_to(prime_cutoff) {
        let pf = p as f64;
        let lp = f.lambda_f64(p as usize).abs();
        let lp2 = f.lambda_f64(p as usize).powi(2) - 1.0;
        let np = lp2 + 0.25 * (1.0 - lp2 * lp2);
        let factors = [
            1.0 - np / pf,
            1.0 - (lp2 + 1.0) / pf,
            1.0 - (lp - 1.0).powi(2) / pf,
            1.0 - 0.5 * (lp - 1.0).powi(2) / pf,
        ];
        for (i, &fac) in factors.iter().enumerate() {
            if fac <= 0.0 {
                degenerate.push((names[i], p, fac));
            }
            prods[i] *= fac;
            range[i].0 = range[i].0.min(fac);
            range[i].1 = range[i].1.max(fac);
        }
    }
    Ok(EulerProducts {
        prime_cutoff,
        prod_n: prods[0],
        prod_eis: prods[1],
        prod_hol: prods[2],
        prod_hol_half: prods[3],
        degenerate,
        factor_range: range,
    })
}

/// Formal Euler-product inputs for the test vectors with constant λ(p).
pub fn euler_products_constant_lambda(lambda: f64, prime_cutoff: u64) -> f64 {
    let mut prod = 1.0;
    for p in primes_up_to(prime_cutoff) {
        prod *= 1.0 - (lambda.abs() - 1.0).powi(2) / p as f64;
    }
    prod
}

/// Family statistic Σ_f |Σ_{P<p≤Q} λ_f(p^v)/p|² over the weight-k eigenbasis,
/// with the per-form contributions. The lemma's regime 2 ≤ P < Q ≤ 2P is
/// enforced.
#[derive(Clone, Debug)]
pub struct FamilyPrimeSum {
    pub weight: i64,
    pub p_low: u64,
    pub p_high: u64,
    pub power: u32,
    pub per_form: Vec<f64>,
    pub family_sum: f64,
}

pub fn family_prime_sum_stats(
    k: i64,
    p_low: u64,
    p_high: u64,
    power: u32,
    prec_bits: u32,
) -> Result<FamilyPrimeSum> {
    if !(2 <= p_low && p_low < p_high && p_high <= 2 * p_low) {
        return Err(Error::RangeError(format!(
            "need 2 <= P < Q <= 2P, got P={p_low}, Q={p_high}"
        )));
    }
    let d = dim_cusp_forms(k);
    if d == 0 {
        return Ok(FamilyPrimeSum {
            weight: k,
            p_low,
            p_high,
            power,
            per_form: Vec::new(),
            family_sum: 0.0,
        });
    }
    let n = (p_high as usize) + 1;
    let basis = eigenbasis(k, n.max(3 * (d + 1)), prec_bits)?;
    let mut per_form = Vec::with_capacity(basis.len());
    let mut family = 0.0;
    for f in basis.iter() {
        let mut s = 0.0;
        for p in primes_up_to(p_high) {
            if p > p_low {
                s += f.lambda_prime_power(p, power) / p as f64;
            }
        }
        per_form.push(s);
        family += s * s;
    }
    Ok(FamilyPrimeSum {
        weight: k,
        p_low,
        p_high,
        power,
        per_form,
        family_sum: family,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::delta_qexp;

    #[test]
    fn hecke_matrix_on_delta() {
        let basis = miller_basis(12, 10).unwrap();
        let t2 = hecke_matrix(12, 2, &basis).unwrap();
        assert_eq!(t2, vec![vec![Integer::from(-24)]]);
        let t3 = hecke_matrix(12, 3, &basis).unwrap();
        assert_eq!(t3, vec![vec![Integer::from(252)]]);
    }

    #[test]
    fn hecke_matrix_truncation_guard() {
        let basis = miller_basis(12, 3).unwrap();
        assert!(matches!(
            hecke_matrix(12, 2, &basis),
            Err(Error::InsufficientTruncation { needed: 4, .. })
        ));
    }

    #[test]
    fn hecke_matrix_weight24_trace_matches_brute_force() {
        // Trace of T₂ on S₂₄ from the echelon-basis bookkeeping equals the
        // brute-force coefficient extraction.
        let basis = miller_basis(24, 20).unwrap();
        let t2 = hecke_matrix(24, 2, &basis).unwrap();
        let trace = Integer::from(&t2[0][0] + &t2[1][1]);
        let p23 = Integer::from(2).pow(23);
        let mut brute = Integer::new();
        for (j, g) in basis.iter().enumerate() {
            let i = j + 1;
            let mut b = g.coeff(2 * i).numer().clone();
            if i % 2 == 0 {
                b += Integer::from(&p23 * g.coeff(i / 2).numer());
            }
            brute += b;
        }
        assert_eq!(trace, brute);
    }

    #[test]
    fn char_poly_2x2() {
        let m = vec![
            vec![Integer::from(1), Integer::from(2)],
            vec![Integer::from(3), Integer::from(4)],
        ];
        // det(xI − M) = x² − 5x − 2
        assert_eq!(
            char_poly(&m),
            vec![Integer::from(-2), Integer::from(-5), Integer::from(1)]
        );
    }

    #[test]
    fn eigenbasis_weight12_lambda2() {
        let forms = eigenbasis(12, 50, 128).unwrap();
        assert_eq!(forms.len(), 1);
        let f = &forms[0];
        // λ(2) = −24 / 2^{11/2}
        let expected = -24.0 / (2.0f64).powf(5.5);
        assert!((f.lambda_f64(2) - expected).abs() < 1e-12);
        assert!((f.lambda_f64(2) + 0.5303300859).abs() < 1e-9);
        // Hecke relation at p = 2, v = 1: λ(2)² = λ(4) + 1.
        let l2 = f.lambda_f64(2);
        let l4 = f.lambda_f64(4);
        assert!((l2 * l2 - (l4 + 1.0)).abs() < 1e-12);
        // Coefficients are the exact τ values for the one-dimensional space.
        let delta = delta_qexp(50).unwrap();
        for n in 0..=50 {
            let exact = Float::with_val(128, delta.coeff(n).numer());
            assert_eq!(*f.coeff(n), exact, "tau({n})");
        }
    }

    #[test]
    fn eigenbasis_weight24_distinct_real_spectrum() {
        let forms = eigenbasis(24, 60, 128).unwrap();
        assert_eq!(forms.len(), 2);
        assert!(forms[0].t2_eigenvalue() < forms[1].t2_eigenvalue());
        // Deligne check at accessible primes.
        for f in forms.iter() {
            for p in [2usize, 3, 5, 7, 11, 13] {
                assert!(f.lambda_f64(p).abs() <= 2.0 + 1e-9, "p = {p}");
            }
        }
        // T₂ eigenvalues are the roots of x² − 1080x − 20468736.
        let sum = forms[0].t2_eigenvalue().to_f64() + forms[1].t2_eigenvalue().to_f64();
        let prod = forms[0].t2_eigenvalue().to_f64() * forms[1].t2_eigenvalue().to_f64();
        let basis = miller_basis(24, 10).unwrap();
        let t2 = hecke_matrix(24, 2, &basis).unwrap();
        let trace = Integer::from(&t2[0][0] + &t2[1][1]);
        let det = Integer::from(&t2[0][0] * &t2[1][1]) - Integer::from(&t2[0][1] * &t2[1][0]);
        assert!((sum - trace.to_f64()).abs() < 1e-6 * trace.to_f64().abs());
        assert!((prod - det.to_f64()).abs() < 1e-6 * det.to_f64().abs());
    }

    #[test]
    fn eigenbasis_rejects_dimension_zero() {
        assert!(matches!(eigenbasis(10, 30, 128), Err(Error::NoCuspForms(10))));
        assert!(matches!(eigenbasis(14, 30, 128), Err(Error::NoCuspForms(14))));
    }

    #[test]
    fn multiplicativity_and_recursion_weight12() {
        let forms = eigenbasis(12, 200, 128).unwrap();
        let f = &forms[0];
        // Multiplicativity for coprime pairs.
        for (m, n) in [(2usize, 3usize), (3, 4), (4, 5), (5, 6), (2, 9), (8, 9)] {
            let lhs = f.lambda_f64(m * n);
            let rhs = f.lambda_f64(m) * f.lambda_f64(n);
            assert!((lhs - rhs).abs() < 1e-12, "({m},{n})");
        }
        // Recursion λ(p)λ(p^v) = λ(p^{v+1}) + λ(p^{v−1}).
        for (p, v) in [(2usize, 1u32), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)] {
            let pv = (p as u64).pow(v) as usize;
            let lhs = f.lambda_f64(p) * f.lambda_f64(pv);
            let rhs = f.lambda_f64(pv * p) + if v >= 1 { f.lambda_f64(pv / p) } else { 0.0 };
            assert!((lhs - rhs).abs() < 1e-12, "({p},{v})");
        }
    }

    #[test]
    fn l1_sym2_cutoff_guard_and_stability() {
        let forms = eigenbasis(12, 10_000, 128).unwrap();
        let f = &forms[0];
        assert!(matches!(l1_sym2(f, 50), Err(Error::CutoffTooSmall(50))));
        let v3 = l1_sym2(f, 1_000).unwrap();
        let v4 = l1_sym2(f, 10_000).unwrap();
        assert!(v4.value > 0.0);
        // Monotone stabilization between cutoffs.
        assert!((v4.value - v3.value).abs() < 1e-2);
    }

    #[test]
    fn l1_sym2_all_lambda_zero_gives_zeta2_inverse_pattern() {
        // With λ(p²) = 0 every local factor is [(1−1/p)(1+1/p+1/p²)]⁻¹;
        // the product against (1−1/p²)⁻¹-type factors tends to a finite
        // limit; check the forced algebra of a single local factor instead.
        let p = 7.0f64;
        let lp2 = 0.0f64;
        let local = (1.0 - 1.0 / p) * (1.0 - (lp2 - 1.0) / p + 1.0 / (p * p));
        // (1−1/p)(1+1/p+1/p²) = 1 − 1/p³... times... expand directly:
        let expanded = 1.0 - 1.0 / p.powi(3);
        assert!((local - expanded).abs() < 1e-15);
        // So Π local⁻¹ → ζ(3)-free... the n ≡ squares Dirichlet series
        // collapses to Σ 1/n at the λ ≡ 0 degeneration; the informative
        // check is the positive finite value:
        assert!(local > 0.0);
    }

    #[test]
    fn euler_products_delta_and_formal_vectors() {
        let forms = eigenbasis(12, 10_000, 128).unwrap();
        let f = &forms[0];
        let ep = euler_products(f, 10_000).unwrap();
        assert!(ep.prod_n > 0.0);
        assert!(ep.prod_hol > 0.0 && ep.prod_hol <= 1.0);
        assert!(ep.prod_hol_half > 0.0 && ep.prod_hol_half <= 1.0);
        // Termwise ½x < x forces the ordering.
        assert!(ep.prod_hol < ep.prod_hol_half);
        // Formal test vectors: λ ≡ 2 and λ ≡ 0 both give (|λ|−1)² = 1, so
        // prod_hol degenerates to Π(1−1/p) exactly.
        let direct: f64 = primes_up_to(1000)
            .iter()
            .map(|&p| 1.0 - 1.0 / p as f64)
            .product();
        assert!((euler_products_constant_lambda(2.0, 1000) - direct).abs() < 1e-15);
        assert!((euler_products_constant_lambda(0.0, 1000) - direct).abs() < 1e-15);
    }

    #[test]
    fn family_prime_sum_examples() {
        // k = 12, P = 2, Q = 3, v = 1: single form, value (λ(3)/3)².
        let s = family_prime_sum_stats(12, 2, 3, 1, 128).unwrap();
        assert_eq!(s.per_form.len(), 1);
        let l3 = 252.0 / (3.0f64).powf(5.5);
        assert!((s.family_sum - (l3 / 3.0).powi(2)).abs() < 1e-12);
        // Regime violation.
        assert!(matches!(
            family_prime_sum_stats(12, 2, 5, 1, 128),
            Err(Error::RangeError(_))
        ));
        // Dimension-zero weight: empty report.
        let empty = family_prime_sum_stats(10, 10, 19, 2, 128).unwrap();
        assert!(empty.per_form.is_empty());
        assert_eq!(empty.family_sum, 0.0);
        // k = 24, P = 10, Q = 19, v = 2: two-form family sum, direct eval.
        let s24 = family_prime_sum_stats(24, 10, 19, 2, 128).unwrap();
        assert_eq!(s24.per_form.len(), 2);
        let forms = eigenbasis(24, 20, 128).unwrap();
        let mut expect = 0.0;
        for f in forms.iter() {
            let mut acc = 0.0;
            for p in [11u64, 13, 17, 19] {
                acc += f.lambda_prime_power(p, 2) / p as f64;
            }
            expect += acc * acc;
        }
        assert!((s24.family_sum - expect).abs() < 1e-12);
    }
}
