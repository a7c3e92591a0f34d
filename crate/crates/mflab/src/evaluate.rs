//! Point evaluation of F_k(z) = y^{k/2} f(z) in log/phase form with explicit
//! truncation-tail majorants, fundamental-domain reduction, and the
//! two-method Petersson normalization.
//!
//! All magnitudes live in natural-log space. The precise path sums the
//! q-expansion in MPFR at the form's working precision (unbounded exponents,
//! so y^{k/2} and n^{(k−1)/2} never overflow); the f64 fast path rescales by
//! the dominant term before summing and is used by quadrature and grid
//! statistics, where 1e-13 relative accuracy is ample. Every Float→f64
//! crossing goes through log magnitudes.

use rug::ops::Pow;
use rug::Float;

use crate::eigenforms::{l1_sym2, HeckeEigenform, L1Sym2};
use crate::error::{Error, Result};
use crate::qseries::QExpansion;
use crate::quadrature::Adaptive2d;

/// A point x + iy in the upper half-plane; construction rejects y ≤ 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HPoint {
    x: f64,
    y: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64) -> Result<HPoint> {
        if !(y > 0.0) || !y.is_finite() || !x.is_finite() {
            return Err(Error::InvalidPoint(y));
        }
        Ok(HPoint { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn modulus_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Hyperbolic distance d(z, w) = arccosh(1 + |z−w|²/(2 Im z Im w)).
    pub fn hyperbolic_distance(&self, other: &HPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let t = 1.0 + (dx * dx + dy * dy) / (2.0 * self.y * other.y);
        t.acosh()
    }

    /// Membership in the standard fundamental domain (closure).
    pub fn in_fundamental_closure(&self, slack: f64) -> bool {
        self.x >= -0.5 - slack && self.x <= 0.5 + slack && self.modulus_sq() >= 1.0 - slack
    }
}

/// Integer Möbius transformation with determinant one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mobius {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Mobius {
    pub fn identity() -> Mobius {
        Mobius {
            a: 1,
            b: 0,
            c: 0,
            d: 1,
        }
    }

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Mobius {
        let m = Mobius { a, b, c, d };
        assert_eq!(m.det(), 1, "Mobius determinant must be 1");
        m
    }

    pub fn det(&self) -> i64 {
        self.a
            .checked_mul(self.d)
            .and_then(|ad| self.b.checked_mul(self.c).map(|bc| ad - bc))
            .expect("Mobius entry overflow")
    }

    pub fn translation(n: i64) -> Mobius {
        Mobius {
            a: 1,
            b: n,
            c: 0,
            d: 1,
        }
    }

    pub fn inversion() -> Mobius {
        Mobius {
            a: 0,
            b: -1,
            c: 1,
            d: 0,
        }
    }

    pub fn compose(&self, other: &Mobius) -> Mobius {
        let m = Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        };
        debug_assert_eq!(m.det(), 1);
        m
    }

    pub fn apply(&self, z: &HPoint) -> HPoint {
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        let den = (c * z.x + d) * (c * z.x + d) + c * c * z.y * z.y;
        let x = ((a * z.x + b) * (c * z.x + d) + a * c * z.y * z.y) / den;
        let y = z.y / den;
        HPoint { x, y }
    }

    /// Action at full precision: γ(x + iy) componentwise in MPFR.
    pub fn apply_precise(&self, x: &Float, y: &Float, prec: u32) -> (Float, Float) {
        let cx_d = Float::with_val(prec, self.c * x.clone() + self.d);
        let cy = Float::with_val(prec, self.c * y.clone());
        let den = Float::with_val(prec, cx_d.clone().square() + cy.clone().square());
        let ax_b = Float::with_val(prec, self.a * x.clone() + self.b);
        let ay = Float::with_val(prec, self.a * y.clone());
        let re = Float::with_val(prec, &ax_b * &cx_d) + Float::with_val(prec, &ay * &cy);
        let re = Float::with_val(prec, re / &den);
        let im = Float::with_val(prec, y / &den);
        (re, im)
    }
}

/// Reduce z to the standard fundamental domain; returns (z′, γ) with
/// γ z = z′. Boundary ties follow the half-open convention: Re = +1/2 maps
/// to −1/2, and |z| = 1 with Re > 0 maps to the Re < 0 arc.
pub fn reduce_to_fundamental(z: &HPoint) -> Result<(HPoint, Mobius)> {
    let mut x = z.x;
    let mut y = z.y;
    let mut gamma = Mobius::identity();
    for _ in 0..10_000 {
        // Translate to Re ∈ [−1/2, 1/2).
        let n = x.round();
        if n != 0.0 {
            if n.abs() > 9e18 {
                return Err(Error::ReductionError);
            }
            x -= n;
            gamma = Mobius::translation(-(n as i64)).compose(&gamma);
        }
        if x == 0.5 {
            x = -0.5;
            gamma = Mobius::translation(-1).compose(&gamma);
        }
        let m2 = x * x + y * y;
        if m2 < 1.0 - 1e-15 {
            // Invert.
            let nx = -x / m2;
            let ny = y / m2;
            x = nx;
            y = ny;
            gamma = Mobius::inversion().compose(&gamma);
        } else {
            // Arc tie: |z| = 1 (to float resolution) with Re > 0.
            if m2 <= 1.0 + 1e-15 && x > 0.0 {
                let nx = -x / m2;
                let ny = y / m2;
                x = nx;
                y = ny;
                gamma = Mobius::inversion().compose(&gamma);
                if x == 0.5 {
                    x = -0.5;
                    gamma = Mobius::translation(-1).compose(&gamma);
                }
            }
            return Ok((HPoint { x, y }, gamma));
        }
    }
    Err(Error::ReductionError)
}

/// log(y^{k/2}|f(z)|) with phase and a rigorous truncation tail bound.
/// The numerical roundoff floor of the summation is folded into
/// `tail_bound`, so indeterminate-sign detection covers both effects.
#[derive(Clone, Debug)]
pub struct LogValue {
    pub log_mag: Float,
    /// Phase in [0, 2π).
    pub phase: Float,
    /// Bound on the absolute error of y^{k/2} f(z) (analytic tail plus
    /// roundoff floor), as a natural log: the absolute bound is
    /// exp(log_tail_bound).
    pub log_tail_bound: f64,
}

impl LogValue {
    /// Indeterminate sign: the error bound reaches the magnitude.
    pub fn is_indeterminate(&self) -> bool {
        !(self.log_mag.to_f64() > self.log_tail_bound)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.log_mag.is_infinite() && self.log_mag < 0
    }
}

/// Tail majorant parameters: |a(n)| ≤ exp(log_coef) · n^exponent.
#[derive(Clone, Copy, Debug)]
struct TailShape {
    log_coef: f64,
    exponent: f64,
}

/// Evaluation-ready real-coefficient q-series (eigenform or Eisenstein).
#[derive(Clone)]
pub struct EvalForm {
    weight: i64,
    prec: u32,
    is_cusp: bool,
    coeffs: Vec<Float>,
    /// ln|a(n)| and sign(a(n)), for the f64 fast path.
    log_abs: Vec<f64>,
    signs: Vec<f64>,
    tail: TailShape,
}

impl EvalForm {
    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_cusp(&self) -> bool {
        self.is_cusp
    }

    /// Order of vanishing at the cusp, read off the stored coefficients.
    pub fn cusp_order(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| *c != 0)
            .unwrap_or(self.coeffs.len())
    }

    pub fn from_eigenform(f: &HeckeEigenform) -> EvalForm {
        let coeffs: Vec<Float> = f.coeffs().to_vec();
        let (log_abs, signs) = log_sign_tables(&coeffs);
        // Deligne: |a(n)| ≤ d(n) n^{(k−1)/2} ≤ n^{(k+1)/2}.
        EvalForm {
            weight: f.weight(),
            prec: f.prec_bits(),
            is_cusp: true,
            coeffs,
            log_abs,
            signs,
            tail: TailShape {
                log_coef: 0.0,
                exponent: (f.weight() as f64 + 1.0) / 2.0,
            },
        }
    }

    /// Wrap an exact expansion (used for Eisenstein series). The tail
    /// majorant is |a(n)| ≤ |2k/B_k| ζ(k−1) n^{k−1} for the Eisenstein
    /// shape; cusp expansions take the Deligne-shape bound scaled to the
    /// stored coefficients.
    pub fn from_qexpansion(q: &QExpansion, prec: u32) -> EvalForm {
        let coeffs: Vec<Float> = q
            .coeffs()
            .iter()
            .map(|c| Float::with_val(prec, c))
            .collect();
        let (log_abs, signs) = log_sign_tables(&coeffs);
        let k = q.weight();
        let tail = if q.is_cusp_expansion() {
            let s = (k as f64 + 1.0) / 2.0;
            // Scale the Deligne shape to cover the stored coefficients
            // (exact for eigenforms; a safety factor 2 otherwise).
            let mut c = 0.0f64;
            for (n, la) in log_abs.iter().enumerate().skip(1) {
                if la.is_finite() {
                    c = c.max(la - s * (n as f64).ln());
                }
            }
            TailShape {
                log_coef: c + std::f64::consts::LN_2,
                exponent: s,
            }
        } else {
            // ζ(k−1) by direct summation; k ≥ 4 so this converges fast.
            let zeta: f64 = (1..2000).map(|j: u64| (j as f64).powi(-(k as i32 - 1))).sum();
            let factor = q.coeff(1).to_f64().abs(); // |2k/B_k| σ_{k−1}(1)
            TailShape {
                log_coef: (factor * zeta).ln(),
                exponent: k as f64 - 1.0,
            }
        };
        EvalForm {
            weight: k,
            prec,
            is_cusp: q.is_cusp_expansion(),
            coeffs,
            log_abs,
            signs,
            tail,
        }
    }

    /// ln of the tail majorant Σ_{n>N} |a(n)| e^{−2πny} plus the y^{k/2}
    /// prefactor; +∞ when the geometric ratio bound fails.
    pub fn log_tail(&self, n_trunc: usize, y: f64) -> f64 {
        log_tail_majorant(
            self.weight,
            self.tail.log_coef,
            self.tail.exponent,
            n_trunc,
            y,
        )
    }

    /// Estimate of log max-term of y^{k/2}|f|: used by the truncation policy
    /// and the roundoff floor.
    fn log_peak_estimate(&self, y: f64) -> f64 {
        let ky = 0.5 * self.weight as f64 * y.ln();
        let mut m = f64::NEG_INFINITY;
        for (n, la) in self.log_abs.iter().enumerate() {
            if la.is_finite() {
                let t = la - 2.0 * std::f64::consts::PI * n as f64 * y;
                if t > m {
                    m = t;
                }
            }
        }
        ky + m
    }

    /// Precise evaluation at x + iy (MPFR at the form's precision).
    pub fn eval_log(&self, x: &Float, y: &Float) -> Result<LogValue> {
        let prec = self.prec;
        let yf = y.to_f64();
        if !(yf > 0.0) {
            return Err(Error::InvalidPoint(yf));
        }
        let n = self.truncation();
        let log_tail = self.log_tail(n, yf);
        let peak = self.log_peak_estimate(yf);
        if !(log_tail < peak - (prec as f64) * 0.5 * std::f64::consts::LN_2) {
            let needed = required_truncation(
                self.weight,
                self.tail.log_coef,
                self.tail.exponent,
                yf,
                prec,
            );
            return Err(Error::InsufficientTruncation {
                needed,
                have: n,
            });
        }

        // e(nx) by incremental complex rotation, e^{−2πny} by incremental
        // real scaling.
        let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
        let angle = Float::with_val(prec, &two_pi * x);
        let (sin1, cos1) = angle.sin_cos(Float::new(prec));
        let r1 = Float::with_val(prec, &two_pi * y);
        let r1 = Float::with_val(prec, -r1).exp();

        let mut re = Float::with_val(prec, 0);
        let mut im = Float::with_val(prec, 0);
        let mut er = Float::with_val(prec, 1); // e(nx) real part
        let mut ei = Float::with_val(prec, 0); // e(nx) imag part
        let mut rn = Float::with_val(prec, 1); // e^{−2πny}
        let mut max_term = Float::with_val(prec, 0);
        for a in self.coeffs.iter() {
            // Rotate first so that index n uses e(nx), r^n.
            let nr = Float::with_val(prec, &er * &cos1) - Float::with_val(prec, &ei * &sin1);
            let ni = Float::with_val(prec, &er * &sin1) + Float::with_val(prec, &ei * &cos1);
            // (applied after the n = 0 term below)
            if !a.is_zero() {
                let t = Float::with_val(prec, a * &rn);
                let ta = Float::with_val(prec, t.abs_ref());
                if ta > max_term {
                    max_term = ta;
                }
                re += Float::with_val(prec, &t * &er);
                im += Float::with_val(prec, &t * &ei);
            }
            er = nr;
            ei = ni;
            rn *= &r1;
        }

        let ky = Float::with_val(prec, 0.5 * self.weight as f64) * Float::with_val(prec, y.ln_ref());
        let mag2 = Float::with_val(prec, re.clone().square() + im.clone().square());
        // Roundoff floor: |S| below max_term · 2^(10−prec) is not resolved.
        // log_tail already includes the y^{k/2} prefactor; the floor needs it.
        let floor_log = if max_term.is_zero() {
            f64::NEG_INFINITY
        } else {
            let lm = Float::with_val(64, max_term.ln_ref()).to_f64();
            lm + ((10i64 - prec as i64) as f64) * std::f64::consts::LN_2
        };
        let log_tail_bound = log_add(log_tail, floor_log + ky.to_f64());

        if mag2.is_zero() {
            return Ok(LogValue {
                log_mag: Float::with_val(prec, rug::float::Special::NegInfinity),
                phase: Float::with_val(prec, 0),
                log_tail_bound,
            });
        }
        let mut log_mag = Float::with_val(prec, mag2.ln_ref());
        log_mag /= 2u32;
        log_mag += &ky;
        let mut phase = Float::with_val(prec, im.atan2_ref(&re));
        if phase < 0 {
            phase += two_pi;
        }
        Ok(LogValue {
            log_mag,
            phase,
            log_tail_bound,
        })
    }

    pub fn eval_log_point(&self, z: &HPoint) -> Result<LogValue> {
        let x = Float::with_val(self.prec, z.x);
        let y = Float::with_val(self.prec, z.y);
        self.eval_log(&x, &y)
    }

    /// Trim to the truncation that certifies evaluations at heights
    /// ≥ y_min for `prec`-bit tail targets.
    pub fn trim_for_height(self, y_min: f64, prec: u32) -> EvalForm {
        let n = required_truncation(
            self.weight,
            self.tail.log_coef,
            self.tail.exponent,
            y_min,
            prec,
        ) + 16;
        self.trim(n)
    }

    /// Restrict the stored expansion to `n` terms (tail bounds shift
    /// accordingly); used to keep the fast path short when evaluating in
    /// regions of larger y.
    pub fn trim(mut self, n: usize) -> EvalForm {
        let keep = (n + 1).clamp(2, self.coeffs.len());
        self.coeffs.truncate(keep);
        self.log_abs.truncate(keep);
        self.signs.truncate(keep);
        self
    }

    /// Fast f64 evaluation: log-magnitude of y^{k/2} f, phase, and the log
    /// tail bound (analytic + f64 roundoff floor).
    pub fn eval_f64(&self, x: f64, y: f64) -> F64Value {
        let n = self.truncation();
        let log_tail = self.log_tail(n, y);
        let two_pi = 2.0 * std::f64::consts::PI;
        // Dominant-term rescaling.
        let mut m = f64::NEG_INFINITY;
        for (i, la) in self.log_abs.iter().enumerate() {
            if la.is_finite() {
                let t = la - two_pi * i as f64 * y;
                if t > m {
                    m = t;
                }
            }
        }
        if m == f64::NEG_INFINITY {
            return F64Value {
                log_mag: f64::NEG_INFINITY,
                phase: 0.0,
                log_tail_bound: log_tail,
                indeterminate: false,
            };
        }
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for (i, la) in self.log_abs.iter().enumerate() {
            if !la.is_finite() {
                continue;
            }
            let lt = la - two_pi * i as f64 * y - m;
            if lt < -45.0 {
                continue;
            }
            let t = lt.exp() * self.signs[i];
            let (s, c) = (two_pi * i as f64 * x).sin_cos();
            re += t * c;
            im += t * s;
        }
        let ky = 0.5 * self.weight as f64 * y.ln();
        let mag = (re * re + im * im).sqrt();
        let floor = m + ky + (1e-13f64 * self.coeffs.len() as f64).ln();
        let log_tail_bound = log_add(log_tail, floor);
        let log_mag = if mag == 0.0 {
            f64::NEG_INFINITY
        } else {
            ky + m + mag.ln()
        };
        let mut phase = im.atan2(re);
        if phase < 0.0 {
            phase += two_pi;
        }
        F64Value {
            log_mag,
            phase,
            log_tail_bound,
            indeterminate: !(log_mag > log_tail_bound),
        }
    }

    /// f(z) and f′(z) at full precision, as complex pairs. Used by Newton
    /// refinement; magnitudes are fine in MPFR at any weight.
    pub fn eval_f_fprime(&self, x: &Float, y: &Float) -> ((Float, Float), (Float, Float)) {
        let prec = self.prec;
        let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
        let angle = Float::with_val(prec, &two_pi * x);
        let (sin1, cos1) = angle.sin_cos(Float::new(prec));
        let r1 = Float::with_val(prec, &two_pi * y);
        let r1 = Float::with_val(prec, -r1).exp();

        let mut fre = Float::with_val(prec, 0);
        let mut fim = Float::with_val(prec, 0);
        let mut dre = Float::with_val(prec, 0);
        let mut dim = Float::with_val(prec, 0);
        let mut er = Float::with_val(prec, 1);
        let mut ei = Float::with_val(prec, 0);
        let mut rn = Float::with_val(prec, 1);
        for (idx, a) in self.coeffs.iter().enumerate() {
            if !a.is_zero() {
                let t = Float::with_val(prec, a * &rn);
                let tre = Float::with_val(prec, &t * &er);
                let tim = Float::with_val(prec, &t * &ei);
                fre += &tre;
                fim += &tim;
                // f′ term: 2πi n · a(n) e(nz): i·(tre + i tim)·2πn = 2πn(−tim + i tre)
                let factor = Float::with_val(prec, &two_pi * Float::with_val(prec, idx as u64));
                dre -= Float::with_val(prec, &factor * &tim);
                dim += Float::with_val(prec, &factor * &tre);
            }
            let nr = Float::with_val(prec, &er * &cos1) - Float::with_val(prec, &ei * &sin1);
            let ni = Float::with_val(prec, &er * &sin1) + Float::with_val(prec, &ei * &cos1);
            er = nr;
            ei = ni;
            rn *= &r1;
        }
        ((fre, fim), (dre, dim))
    }
}

/// Fast-path value; `indeterminate` when the magnitude is below the tail
/// plus roundoff floor.
#[derive(Clone, Copy, Debug)]
pub struct F64Value {
    pub log_mag: f64,
    pub phase: f64,
    pub log_tail_bound: f64,
    pub indeterminate: bool,
}

fn log_sign_tables(coeffs: &[Float]) -> (Vec<f64>, Vec<f64>) {
    let mut log_abs = Vec::with_capacity(coeffs.len());
    let mut signs = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        if c.is_zero() {
            log_abs.push(f64::NEG_INFINITY);
            signs.push(0.0);
        } else {
            // ln|c| via MPFR to keep huge coefficients in range.
            let l = Float::with_val(64, c.abs_ref());
            log_abs.push(l.ln().to_f64());
            signs.push(if *c > 0 { 1.0 } else { -1.0 });
        }
    }
    (log_abs, signs)
}

/// ln(e^a + e^b), safe with −∞.
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// ln of y^{k/2} Σ_{n>N} C n^s e^{−2πny} via the geometric-ratio majorant;
/// +∞ if the ratio test fails at N+1 (truncation unusable at this height).
fn log_tail_majorant(weight: i64, log_coef: f64, s: f64, n_trunc: usize, y: f64) -> f64 {
    let two_pi_y = 2.0 * std::f64::consts::PI * y;
    let n1 = (n_trunc + 1) as f64;
    let log_ratio = s / n1 - two_pi_y;
    if log_ratio >= -1e-12 {
        return f64::INFINITY;
    }
    let r = log_ratio.exp();
    let log_t1 = log_coef + s * n1.ln() - two_pi_y * n1;
    0.5 * weight as f64 * y.ln() + log_t1 - (1.0 - r).ln()
}

/// Explicit upper bound for y^{k/2} Σ_{n>N} d(n) n^{(k−1)/2} e^{−2πny}
/// (Deligne-shape cusp tail), monotone decreasing in N and in y.
pub fn truncation_bound(weight: i64, n_trunc: usize, y: f64) -> f64 {
    log_tail_majorant(weight, 0.0, (weight as f64 + 1.0) / 2.0, n_trunc, y).exp()
}

/// Smallest truncation at which the tail clears the policy threshold
/// 2^{−prec/2}·(peak estimate) at height y, doubling then bisecting; capped
/// at 10·k (the policy cap) — returns the cap when unreachable.
pub fn required_truncation(weight: i64, log_coef: f64, s: f64, y: f64, prec: u32) -> usize {
    let peak = {
        // n = 1 term as the scale anchor.
        0.5 * weight as f64 * y.ln() + log_coef - 2.0 * std::f64::consts::PI * y
    };
    let target = peak - (prec as f64) * 0.5 * std::f64::consts::LN_2;
    let cap = (10 * weight.max(16)) as usize;
    let ok = |n: usize| log_tail_majorant(weight, log_coef, s, n, y) < target;
    if ok(1) {
        // Even a single term suffices; still keep a couple.
        return 4;
    }
    let mut hi = 2usize;
    while hi < cap && !ok(hi) {
        hi *= 2;
    }
    if !ok(hi) {
        return cap;
    }
    let mut lo = hi / 2;
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Two-method Petersson norm of y^{k/2} f with a_f(1) = 1:
/// (i) strip part y ≥ 1 termwise by incomplete gamma, bulk by adaptive 2D
/// quadrature; (ii) Γ(k) L(1, sym²f) / (2π² (4π)^{k−1}).
#[derive(Clone, Debug)]
pub struct PeterssonNorm {
    pub quadrature: f64,
    pub quadrature_err: f64,
    pub via_l1sym2: f64,
    pub via_l1sym2_err: f64,
    pub l1sym2: L1Sym2,
}

/// Unnormalized Siegel-strip integral Σ a(n)² (4πn)^{1−k} Γ(k−1, 4πn·y0),
/// i.e. ∬_{y>y0, |x|≤1/2} y^k |f|² dμ; exact termwise (no quadrature).
pub fn strip_integral(f: &HeckeEigenform, y0: f64) -> Float {
    let prec = f.prec_bits() + 32;
    let k = f.weight();
    let mut sum = Float::with_val(prec, 0);
    let four_pi = Float::with_val(prec, rug::float::Constant::Pi) * 4u32;
    // Γ(k−1, x) = (k−2)! e^{−x} Σ_{j=0}^{k−2} x^j/j!
    let mut fact_km2 = Float::with_val(prec, 1);
    for j in 2..=(k - 2) {
        fact_km2 *= Float::with_val(prec, j);
    }
    for n in 1..=f.truncation() {
        let a = f.coeff(n);
        if a.is_zero() {
            continue;
        }
        let x = Float::with_val(prec, &four_pi * Float::with_val(prec, n as f64 * y0));
        // Σ_{j≤k−2} x^j / j!
        let mut term = Float::with_val(prec, 1);
        let mut acc = Float::with_val(prec, 1);
        for j in 1..=(k - 2) {
            term *= &x;
            term /= Float::with_val(prec, j);
            acc += &term;
        }
        let expx = Float::with_val(prec, x.exp_ref());
        let gamma_inc = Float::with_val(prec, &fact_km2 * &acc) / expx;
        let fourpin = Float::with_val(prec, &four_pi * Float::with_val(prec, n as u64));
        let scale = Float::with_val(prec, (&fourpin).pow(-(k as i32 - 1)));
        let t = Float::with_val(prec, a.clone().square()) * gamma_inc * scale;
        let done = n > 4 * (k as usize) / 3 + 8 && {
            let lt = Float::with_val(64, t.ln_ref()).to_f64();
            let ls = Float::with_val(64, sum.ln_ref()).to_f64();
            lt < ls - 95.0
        };
        sum += t;
        if done {
            break;
        }
    }
    sum
}

pub fn petersson_norm(
    f: &HeckeEigenform,
    quad_tol: f64,
    prime_cutoff: u64,
) -> Result<PeterssonNorm> {
    let k = f.weight();
    let strip = strip_integral(f, 1.0);
    // Bulk: the region between the unit arc and y = 1, |x| ≤ 1/2, mapped to
    // a rectangle via y = c(x) + t (1 − c(x)), t ∈ [0, 1].
    let n_bulk = required_truncation(k, 0.0, (k as f64 + 1.0) / 2.0, 0.85, 80) + 8;
    let ev = EvalForm::from_eigenform(f).trim(n_bulk);
    let integrand = move |x: f64, t: f64| {
        let c = (1.0 - x * x).sqrt();
        let y = c + t * (1.0 - c);
        let jac = 1.0 - c;
        if jac <= 0.0 {
            return 0.0;
        }
        let v = ev.eval_f64(x, y);
        if v.log_mag == f64::NEG_INFINITY {
            return 0.0;
        }
        (2.0 * v.log_mag - 2.0 * y.ln()).exp() * jac
    };
    let scale = strip.to_f64();
    let q = Adaptive2d {
        tol: quad_tol * scale.max(1e-300),
        max_depth: 22,
        accept_at_cap: false,
    };
    let (bulk, bulk_err) = q.integrate(&integrand, -0.5, 0.5, 0.0, 1.0)?;
    let quadrature = strip.to_f64() + bulk;
    if !quadrature.is_finite() || quadrature <= 0.0 {
        return Err(Error::QuadratureError(
            "Petersson norm quadrature produced a nonpositive value".into(),
        ));
    }

    let l1 = l1_sym2(f, prime_cutoff)?;
    let prec = f.prec_bits();
    let mut gamma_k = Float::with_val(prec, 1);
    for j in 2..k {
        gamma_k *= Float::with_val(prec, j);
    }
    let four_pi = Float::with_val(prec, rug::float::Constant::Pi) * 4u32;
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let denom = Float::with_val(prec, 2u32) * pi.square() * Float::with_val(prec, (&four_pi).pow((k - 1) as i32));
    let via = Float::with_val(prec, &gamma_k / &denom).to_f64() * l1.value;
    let via_err = via * (l1.tail_estimate / l1.value);

    // Fill norm_const from method (i).
    let nc = Float::with_val(f.prec_bits(), quadrature).sqrt().recip();
    f.set_norm_const(nc);

    Ok(PeterssonNorm {
        quadrature,
        quadrature_err: bulk_err,
        via_l1sym2: via,
        via_l1sym2_err: via_err,
        l1sym2: l1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenforms::eigenbasis;

    #[test]
    fn hpoint_rejects_lower_half_plane() {
        assert!(HPoint::new(0.0, -1.0).is_err());
        assert!(HPoint::new(0.0, 0.0).is_err());
        assert!(HPoint::new(0.3, 0.4).is_ok());
    }

    #[test]
    fn reduction_examples() {
        // 5 + i → (i, translation by −5).
        let (z, g) = reduce_to_fundamental(&HPoint::new(5.0, 1.0).unwrap()).unwrap();
        assert_eq!(g, Mobius::translation(-5));
        assert!((z.x()).abs() < 1e-15 && (z.y() - 1.0).abs() < 1e-15);
        // 0.1i → (10i, inversion).
        let (z, g) = reduce_to_fundamental(&HPoint::new(0.0, 0.1).unwrap()).unwrap();
        assert_eq!(g, Mobius::inversion());
        assert!((z.y() - 10.0).abs() < 1e-12);
        // Interior landing with γz = z′ verified.
        let z0 = HPoint::new(0.3, 0.4).unwrap();
        let (z, g) = reduce_to_fundamental(&z0).unwrap();
        assert!(z.in_fundamental_closure(1e-12));
        let back = g.apply(&z0);
        assert!((back.x() - z.x()).abs() < 1e-12 && (back.y() - z.y()).abs() < 1e-12);
    }

    #[test]
    fn reduction_boundary_conventions() {
        // Re = +1/2 maps to −1/2.
        let (z, _) = reduce_to_fundamental(&HPoint::new(0.5, 2.0).unwrap()).unwrap();
        assert_eq!(z.x(), -0.5);
        // |z| = 1 with Re > 0 maps to the Re < 0 arc.
        let th = std::f64::consts::PI / 3.0;
        let (z, _) = reduce_to_fundamental(&HPoint::new(th.cos(), th.sin()).unwrap()).unwrap();
        assert!(z.x() < 0.0);
        assert!((z.modulus_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_dominant_term_at_large_y() {
        let forms = eigenbasis(12, 60, 128).unwrap();
        let ev = EvalForm::from_eigenform(&forms[0]);
        let v = ev.eval_log_point(&HPoint::new(0.0, 10.0).unwrap()).unwrap();
        // log_mag ≈ 6 ln 10 − 20π (high precision), remainder below the
        // explicit n ≥ 2 ratio-sum majorant.
        let prec = 128u32;
        let pi = Float::with_val(prec, rug::float::Constant::Pi);
        let main = Float::with_val(prec, 10).ln() * 6u32 - pi * 20u32;
        let ratio_bound: f64 = (2..=60)
            .map(|n| {
                let n = n as f64;
                (6.5 * n.ln() - 2.0 * std::f64::consts::PI * 10.0 * (n - 1.0)).exp()
            })
            .sum();
        let diff = Float::with_val(prec, &v.log_mag - &main).to_f64().abs();
        assert!(diff < ratio_bound, "diff {diff} vs bound {ratio_bound}");
    }

    #[test]
    fn eval_matches_quadruple_precision_oracle() {
        // Independent summation oracle at 4× the precision, near the mass
        // peak y = 11/(4π).
        let forms = eigenbasis(12, 80, 512).unwrap();
        let f = &forms[0];
        let ev = EvalForm::from_eigenform(f);
        let y = 11.0 / (4.0 * std::f64::consts::PI);
        let v = ev.eval_log_point(&HPoint::new(0.0, y).unwrap()).unwrap();
        // Oracle: plain Horner-free Float sum, separate code path.
        let prec = 2048u32;
        let yy = Float::with_val(prec, y);
        let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
        let mut s = Float::with_val(prec, 0);
        for n in 1..=80usize {
            let a = Float::with_val(prec, f.coeff(n));
            let e = Float::with_val(prec, &two_pi * &yy) * Float::with_val(prec, n as u64);
            s += a * Float::with_val(prec, -e).exp();
        }
        let sa = Float::with_val(prec, s.abs_ref());
        let oracle = Float::with_val(prec, yy.ln_ref()) * 6u32 + Float::with_val(prec, sa.ln_ref());
        let diff = Float::with_val(prec, &v.log_mag - &oracle).to_f64().abs();
        let rel = diff / oracle.to_f64().abs();
        assert!(rel < 1e-25, "relative deviation {rel}");
    }

    #[test]
    fn automorphy_invariance_high_precision() {
        let forms = eigenbasis(12, 400, 128).unwrap();
        let ev = EvalForm::from_eigenform(&forms[0]);
        let prec = 128u32;
        // Deterministic pseudo-random points and group words.
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let x = next() - 0.5;
            let y = 0.9 + 1.5 * next();
            // Random word in S, T of moderate length.
            let mut g = Mobius::identity();
            for _ in 0..4 {
                let t = Mobius::translation(if next() < 0.5 { 1 } else { -1 });
                g = t.compose(&g);
                if next() < 0.7 {
                    g = Mobius::inversion().compose(&g);
                }
            }
            let xf = Float::with_val(prec, x);
            let yf = Float::with_val(prec, y);
            let (gx, gy) = g.apply_precise(&xf, &yf, prec);
            if gy.to_f64() < 0.3 {
                // The stored truncation cannot certify this far down; the
                // word mix still leaves plenty of cases.
                continue;
            }
            let v1 = ev.eval_log(&xf, &yf).unwrap();
            let v2 = ev.eval_log(&gx, &gy).unwrap();
            let d = (v1.log_mag.to_f64() - v2.log_mag.to_f64()).abs();
            let tol = 1e-20 * v1.log_mag.to_f64().abs() + 1e-20;
            assert!(d < tol.max(1e-18), "automorphy defect {d}");
        }
    }

    #[test]
    fn conjugate_reflection_symmetry() {
        // |F(−x + iy)| = |F(x + iy)| for real coefficients.
        let forms = eigenbasis(24, 200, 128).unwrap();
        for f in forms.iter() {
            let ev = EvalForm::from_eigenform(f);
            for (x, y) in [(0.17, 1.3), (0.41, 0.97), (0.05, 2.2)] {
                let a = ev.eval_log_point(&HPoint::new(x, y).unwrap()).unwrap();
                let b = ev.eval_log_point(&HPoint::new(-x, y).unwrap()).unwrap();
                let d = (a.log_mag.to_f64() - b.log_mag.to_f64()).abs();
                assert!(d < 1e-20 * a.log_mag.to_f64().abs() + 1e-20);
            }
        }
    }

    #[test]
    fn truncation_bound_properties() {
        // Below 1e−30 for N ≥ 20 at k = 12, y = 10.
        assert!(truncation_bound(12, 20, 10.0) < 1e-30);
        // Monotone in N.
        for n in [5usize, 10, 20, 40] {
            assert!(truncation_bound(12, n + 1, 2.0) <= truncation_bound(12, n, 2.0));
        }
        // Monotone in y (within the finite regime).
        for y in [1.0f64, 2.0, 4.0] {
            assert!(truncation_bound(12, 30, 2.0 * y) <= truncation_bound(12, 30, y));
        }
    }

    #[test]
    fn insufficient_truncation_reports_requirement() {
        let forms = eigenbasis(12, 12, 128).unwrap();
        let ev = EvalForm::from_eigenform(&forms[0]);
        // At y = 0.6 twelve terms cannot clear a 128-bit tail threshold.
        let err = ev.eval_log_point(&HPoint::new(0.1, 0.6).unwrap());
        match err {
            Err(Error::InsufficientTruncation { needed, have }) => {
                assert_eq!(have, 12);
                assert!(needed > 12);
            }
            other => panic!("expected InsufficientTruncation, got {other:?}"),
        }
    }

    #[test]
    fn petersson_two_methods_agree_for_delta() {
        // At P = 1e4 the Euler-product tail measures 1.31e-3 (it shrinks
        // like P^{−1/2}: 2.8e-4 at P = 1e5, which the acceptance run uses);
        // the quadrature side matches the classical ⟨Δ,Δ⟩ to 1e-8.
        let forms = eigenbasis(12, 10_000, 128).unwrap();
        let f = &forms[0];
        let norm = petersson_norm(f, 1e-8, 10_000).unwrap();
        assert!(norm.quadrature > 0.0 && norm.via_l1sym2 > 0.0);
        assert!((norm.quadrature - 1.0353620568e-6).abs() < 1e-14);
        let rel = (norm.quadrature - norm.via_l1sym2).abs() / norm.quadrature;
        assert!(rel < 2e-3, "two-method relative gap {rel}");
        assert!(f.norm_const().is_some());
    }

    #[test]
    fn petersson_two_methods_within_criterion_at_larger_cutoff() {
        let forms = eigenbasis(12, 100_000, 128).unwrap();
        let f = &forms[0];
        let norm = petersson_norm(f, 1e-8, 100_000).unwrap();
        let rel = (norm.quadrature - norm.via_l1sym2).abs() / norm.quadrature;
        assert!(rel < 1e-3, "two-method relative gap {rel}");
    }
}
