//! Acceptance suite: ten criteria, each printing one pass/fail line. The
//! canonical report text is timing-free so a repeated run must reproduce it
//! byte-for-byte (criterion 10).

use std::fmt::Write as _;
use std::time::Instant;

use rug::Integer;
use serde::Serialize;

use crate::cuspzone::{
    certified_window, cusp_approx_error, sign_changes, verify_pair_bracket, window_top,
    GeodesicLine, Parity,
};
use crate::eigenforms::eigenbasis;
use crate::error::Result;
use crate::evaluate::{petersson_norm, EvalForm};
use crate::exponents::{derived_exponents, exact_alpha_objective_report};
use crate::massmap::{mass_region, que_discrepancy, NormalizedForm, Region};
use crate::qseries::{delta_qexp, dim_cusp_forms, miller_basis};
use crate::zerofind::{rsd_eisenstein_zeros, rudnick_check, valence_check, Bump};

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    pub seconds: f64,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:2}: {} — {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.details
        )
    }
}

const PREC: u32 = 128;
const EIGEN_N: usize = 10_001;
const L1_CUTOFF: u64 = 100_000;

fn weights() -> Vec<i64> {
    (12..=60).step_by(2).filter(|k| dim_cusp_forms(*k) > 0).collect()
}

/// Criterion 1: exact τ agreement with the brute-force product expansion
/// and the dimension formula across 12 ≤ k ≤ 60.
pub fn criterion1() -> CriterionOutcome {
    let t0 = Instant::now();
    let mut ok = true;
    let mut details = String::new();
    // Brute force q Π(1−q^n)^24, naive multiplication (independent oracle).
    let n = 20usize;
    let mut poly = vec![Integer::new(); n + 1];
    poly[0] = Integer::from(1);
    for m in 1..=n {
        for _ in 0..24 {
            let snap = poly.clone();
            for (i, c) in snap.iter().enumerate() {
                if i + m <= n && *c != 0 {
                    poly[i + m] -= c;
                }
            }
        }
    }
    let forms = eigenbasis(12, n, PREC).expect("weight 12 eigenbasis");
    for m in 1..=n {
        let tau_pipeline = forms[0].coeff(m);
        let tau_oracle = rug::Float::with_val(PREC, &poly[m - 1]);
        if *tau_pipeline != tau_oracle {
            ok = false;
            let _ = write!(details, "tau({m}) mismatch; ");
        }
    }
    // Independent dimension-formula oracle.
    let dim_oracle = |k: i64| -> usize {
        if k < 12 {
            0
        } else if k % 12 == 2 {
            (k / 12 - 1) as usize
        } else {
            (k / 12) as usize
        }
    };
    for k in (12..=60i64).step_by(2) {
        let d = miller_basis(k, dim_oracle(k) + 2).map(|b| b.len()).unwrap_or(usize::MAX);
        if d != dim_oracle(k) {
            ok = false;
            let _ = write!(details, "dim S_{k} = {d} ≠ {}; ", dim_oracle(k));
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    if ok {
        details = format!(
            "tau(n) n≤20 exact vs product oracle; dim S_k matches formula for even 12..=60"
        );
    }
    let passed = ok && secs < 10.0;
    if secs >= 10.0 {
        let _ = write!(details, " [runtime {secs:.1}s over 10s budget]");
    }
    CriterionOutcome {
        id: 1,
        name: "exact algebra",
        passed,
        details,
        seconds: secs,
    }
}

/// Criterion 2: Hecke multiplicativity/recursion to 1e−12 (n ≤ 200) and the
/// |λ(p)| ≤ 2 + 1e−9 bound for p ≤ 1e4, all forms k ≤ 60.
pub fn criterion2() -> CriterionOutcome {
    let t0 = Instant::now();
    let mut ok = true;
    let mut worst_mult = 0.0f64;
    let mut worst_rec = 0.0f64;
    let mut worst_deligne = 0.0f64;
    let primes = crate::arith::primes_up_to(10_000);
    for k in weights() {
        let forms = match eigenbasis(k, EIGEN_N, PREC) {
            Ok(f) => f,
            Err(e) => {
                return CriterionOutcome {
                    id: 2,
                    name: "Hecke structure",
                    passed: false,
                    details: format!("eigenbasis failed at k={k}: {e}"),
                    seconds: t0.elapsed().as_secs_f64(),
                }
            }
        };
        for f in forms.iter() {
            // Multiplicativity over coprime pairs with mn ≤ 200.
            for m in 2..=200usize {
                for nn in m + 1..=200 / m {
                    if gcd(m, nn) != 1 {
                        continue;
                    }
                    let lhs = f.lambda_f64(m * nn);
                    let rhs = f.lambda_f64(m) * f.lambda_f64(nn);
                    let d = (lhs - rhs).abs();
                    if d > worst_mult {
                        worst_mult = d;
                    }
                }
            }
            // Recursion λ(p)λ(p^v) = λ(p^{v+1}) + λ(p^{v−1}) for p^{v+1} ≤ 200.
            for &p in &[2usize, 3, 5, 7, 11, 13] {
                let mut pv = p;
                let mut v = 1u32;
                while pv * p <= 200 {
                    let lhs = f.lambda_f64(p) * f.lambda_f64(pv);
                    let rhs = f.lambda_f64(pv * p) + f.lambda_f64(pv / p);
                    let d = (lhs - rhs).abs();
                    if d > worst_rec {
                        worst_rec = d;
                    }
                    pv *= p;
                    v += 1;
                }
                let _ = v;
            }
            for &p in &primes {
                let l = f.lambda_f64(p as usize).abs();
                if l - 2.0 > worst_deligne {
                    worst_deligne = l - 2.0;
                }
            }
        }
    }
    if worst_mult >= 1e-12 || worst_rec >= 1e-12 || worst_deligne > 1e-9 {
        ok = false;
    }
    let secs = t0.elapsed().as_secs_f64();
    let mut details = format!(
        "max |λ(mn)−λ(m)λ(n)| = {worst_mult:.2e}, max recursion residual = {worst_rec:.2e}, max |λ(p)|−2 = {worst_deligne:.2e}"
    );
    let passed = ok && secs < 60.0;
    if secs >= 60.0 {
        let _ = write!(details, " [runtime {secs:.1}s over 60s budget]");
    }
    CriterionOutcome {
        id: 2,
        name: "Hecke structure",
        passed,
        details,
        seconds: secs,
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Criterion 3: exact valence identity for every eigenform and Eisenstein
/// series, k ≤ 60.
pub fn criterion3() -> CriterionOutcome {
    let t0 = Instant::now();
    let mut ok = true;
    let mut details = String::new();
    let mut checked = 0usize;
    for k in weights() {
        let forms = eigenbasis(k, EIGEN_N, PREC).expect("eigenbasis");
        for (i, f) in forms.iter().enumerate() {
            let ev = EvalForm::from_eigenform(f);
            match valence_check(&ev) {
                Ok(v) if v.pass => checked += 1,
                Ok(v) => {
                    ok = false;
                    let _ = write!(details, "k={k} form {i}: {} ≠ {}; ", v.total, v.target);
                }
                Err(e) => {
                    ok = false;
                    let _ = write!(details, "k={k} form {i}: {e}; ");
                }
            }
        }
    }
    for k in (4..=60i64).step_by(2) {
        let e = crate::qseries::eisenstein_qexp(k, 400).expect("eisenstein");
        let ev = EvalForm::from_qexpansion(&e, PREC);
        match valence_check(&ev) {
            Ok(v) if v.pass => checked += 1,
            Ok(v) => {
                ok = false;
                let _ = write!(details, "E_{k}: {} ≠ {}; ", v.total, v.target);
            }
            Err(e) => {
                ok = false;
                let _ = write!(details, "E_{k}: {e}; ");
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    if ok {
        details = format!("exact k/12 identity for {checked} forms (eigenforms + Eisenstein)");
    }
    let passed = ok && secs < 300.0;
    if secs >= 300.0 {
        let _ = write!(details, " [runtime {secs:.1}s over 300s budget]");
    }
    CriterionOutcome {
        id: 3,
        name: "valence",
        passed,
        details,
        seconds: secs,
    }
}

/// Criterion 4: all located zeros of E_k lie on the unit arc to 1e−8,
/// even 4 ≤ k ≤ 60.
pub fn criterion4() -> CriterionOutcome {
    let t0 = Instant::now();
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut details = String::new();
    for k in (4..=60i64).step_by(2) {
        match rsd_eisenstein_zeros(k, PREC) {
            Ok(r) => {
                if !r.valence.pass {
                    ok = false;
                    let _ = write!(details, "E_{k} valence failed; ");
                }
                if r.max_arc_deviation > worst {
                    worst = r.max_arc_deviation;
                }
                if r.max_arc_deviation >= 1e-8 {
                    ok = false;
                    let _ = write!(details, "E_{k} deviation {:.2e}; ", r.max_arc_deviation);
                }
            }
            Err(e) => {
                ok = false;
                let _ = write!(details, "E_{k}: {e}; ");
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    if ok {
        details = format!("max ||z|−1| over all located E_k zeros = {worst:.2e}");
    }
    let passed = ok && secs < 300.0;
    if secs >= 300.0 {
        let _ = write!(details, " [runtime {secs:.1}s over 300s budget]");
    }
    CriterionOutcome {
        id: 4,
        name: "Rankin–Swinnerton-Dyer arc",
        passed,
        details,
        seconds: secs,
    }
}

/// The fixed bump suite for criterion 5 (supports verified inside F).
pub fn bump_suite() -> Vec<Bump> {
    vec![
        Bump::new(0.0, 1.6, 0.3, 0.42).unwrap(),
        Bump::new(0.0, 1.32, 0.15, 0.18).unwrap(),
        Bump::new(0.13, 1.57, 0.12, 0.2).unwrap(),
        Bump::new(-0.25, 1.3, 0.2, 0.25).unwrap(),
        Bump::new(0.0, 2.6, 0.4, 0.8).unwrap(),
    ]
}

/// Criterion 5: the zero-counting integral identity to 1e−4·k over the
/// bump suite at weights {12, 16, 24, 36}.
pub fn criterion5() -> CriterionOutcome {
    let t0 = Instant::now();
    let mut ok = true;
    let mut details = String::new();
    let mut worst_scaled = 0.0f64;
    let mut nonzero_lhs = 0usize;
    for k in [12i64, 16, 24, 36] {
        let forms = eigenbasis(k, EIGEN_N, PREC).expect("eigenbasis");
        for (i, f) in forms.iter().enumerate() {
            let ev = EvalForm::from_eigenform(f).trim_for_height(0.8, 140);
            for (bi, bump) in bump_suite().iter().enumerate() {
                match rudnick_check(&ev, bump, 1e-8) {
                    Ok(r) => {
                        if r.lhs > 0.0 {
                            nonzero_lhs += 1;
                        }
                        let scaled = r.defect / k as f64;
                        if scaled > worst_scaled {
                            worst_scaled = scaled;
                        }
                        if r.defect >= 1e-4 * k as f64 {
                            ok = false;
                            let _ = write!(
                                details,
                                "k={k} form {i} bump {bi}: defect {:.2e}; ",
                                r.defect
                            );
                        }
                    }
                    Err(e) => {
                        ok = false;
                        let _ = write!(details, "k={k} form {i} bump {bi}: {e}; ");
                    }
                }
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    if ok {
        details = format!(
            "max defect/k = {worst_scaled:.2e} over 35 checks ({nonzero_lhs} with zeros inside the bump)"
        );
    }
    let passed = ok && secs < 600.0;
    if secs >= 600.0 {
        let _ = write!(details, " [runtime {secs:.1}s over 600s budget]");
    }
    CriterionOutcome {
        id: 5,
        name: "zero-counting identity",
        passed,
        details,
        seconds: secs,
    }
}

/// Criterion 6: the four minimax constants to their stated tolerances plus
/// the closed-form cross-check at 1e−9.
pub fn criterion6() -> CriterionOutcome {
    let t0 = Instant::now();
    let e = derived_exponents();
    let beta_ref = 2.0 - (2.0f64).sqrt();
    let alpha_ref = 3.0 - 8.0 / (15.0f64).sqrt();
    let kappa_ref = 31.0 / 2.0 - 4.0 * (15.0f64).sqrt();
    let delta_ref = kappa_ref / 7.0;
    let mut ok = true;
    let mut details = String::new();
    for (name, got, want, tol) in [
        ("beta", e.beta, beta_ref, 1e-6),
        ("alpha", e.alpha, alpha_ref, 1e-6),
        ("kappa", e.kappa, kappa_ref, 1e-8),
        ("delta", e.delta, delta_ref, 1e-6),
    ] {
        if (got - want).abs() >= tol {
            ok = false;
            let _ = write!(details, "{name} = {got:.10} vs {want:.10}; ");
        }
    }
    // Closed-form cross-check on a grid to 1e−9.
    let mut worst_cf = 0.0f64;
    for i in 0..=100 {
        let alpha = 1.0 / 3.0 + (2.0 / 3.0) * i as f64 / 100.0;
        let inner = crate::exponents::golden_max(
            |l| crate::exponents::alpha_objective_simplified(alpha, l),
            0.0,
            1.0,
            1e-13,
        )
        .1;
        let cf = crate::exponents::alpha_inner_max_closed_form(alpha);
        let dev = ((inner - cf) / cf.abs().max(1e-3)).abs();
        if dev > worst_cf {
            worst_cf = dev;
        }
    }
    if worst_cf >= 1e-9 {
        ok = false;
        let _ = write!(details, "closed-form deviation {worst_cf:.2e}; ");
    }
    let secs = t0.elapsed().as_secs_f64();
    if ok {
        details = format!(
            "beta={:.9} alpha={:.9} kappa={:.9} delta={:.9} eta1={:.9} eta2={:.9}; closed-form grid deviation {:.1e}",
            e.beta, e.alpha, e.kappa, e.delta, e.eta1, e.eta2, worst_cf
        );
    }
    let passed = ok && secs < 1.0;
    if secs >= 1.0 {
        let _ = write!(details, " [runtime {secs:.2}s over 1s budget]");
    }
    CriterionOutcome {
        id: 6,
        name: "minimax exponents",
        passed,
        details,
        seconds: secs,
    }
}

/// Criterion 7: μ_f(F) = 1 ± 1e−6 for all k ≤ 60 and the two-method
/// Petersson agreement within 1e−3 relative (Euler cutoff 1e5).
pub fn criterion7() -> CriterionOutcome {
    let t0 = Instant::now();
    let mut ok = true;
    let mut details = String::new();
    let mut worst_mass = 0.0f64;
    let mut worst_gap = 0.0f64;
    for k in weights() {
        let forms = match eigenbasis(k, (L1_CUTOFF + 1) as usize, PREC) {
            Ok(f) => f,
            Err(e) => {
                return CriterionOutcome {
                    id: 7,
                    name: "normalization",
                    passed: false,
                    details: format!("eigenbasis failed at k={k}: {e}"),
                    seconds: t0.elapsed().as_secs_f64(),
                }
            }
        };
        for (i, f) in forms.iter().enumerate() {
            match petersson_norm(f, 1e-8, L1_CUTOFF) {
                Ok(n) => {
                    let gap = (n.quadrature - n.via_l1sym2).abs() / n.quadrature;
                    if gap > worst_gap {
                        worst_gap = gap;
                    }
                    if gap >= 1e-3 {
                        ok = false;
                        let _ = write!(details, "k={k} form {i}: method gap {gap:.2e}; ");
                    }
                }
                Err(e) => {
                    ok = false;
                    let _ = write!(details, "k={k} form {i}: {e}; ");
                    continue;
                }
            }
            let nf = NormalizedForm::new(f, L1_CUTOFF).expect("normalized");
            match mass_region(&nf, &Region::FundamentalDomain, 1e-8) {
                Ok(m) => {
                    let d = (m - 1.0).abs();
                    if d > worst_mass {
                        worst_mass = d;
                    }
                    if d >= 1e-6 {
                        ok = false;
                        let _ = write!(details, "k={k} form {i}: mass {m:.9}; ");
                    }
                }
                Err(e) => {
                    ok = false;
                    let _ = write!(details, "k={k} form {i}: {e}; ");
                }
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    if ok {
        details = format!(
            "max |μ_f(F)−1| = {worst_mass:.2e}; max two-method relative gap = {worst_gap:.2e} (cutoff 1e5)"
        );
    }
    CriterionOutcome {
        id: 7,
        name: "normalization",
        passed: ok,
        details,
        seconds: secs,
    }
}

/// Criterion 8: every certified sign-change pair at thr = 0.1 brackets a
/// verified geodesic zero, k ∈ {80, 100}.
pub fn criterion8() -> CriterionOutcome {
    let t0 = Instant::now();
    let mut ok = true;
    let mut details = String::new();
    let mut pairs_total = 0usize;
    let mut pairs_verified = 0usize;
    for k in [80i64, 100] {
        let forms = eigenbasis(k, 600, PREC).expect("eigenbasis");
        for (i, f) in forms.iter().enumerate() {
            let window = certified_window(f, 0.1);
            if window.len() < 2 {
                continue;
            }
            let (lo, hi) = (window[0], *window.last().unwrap());
            for (line, parity) in [(GeodesicLine::Re0, Parity::All), (GeodesicLine::ReHalf, Parity::Odd)] {
                for pair in sign_changes(f, (lo, hi), parity, 0.1) {
                    if !window.contains(&pair.l_neg) || !window.contains(&pair.l_pos) {
                        continue;
                    }
                    pairs_total += 1;
                    match verify_pair_bracket(f, &pair, line) {
                        Ok(_) => pairs_verified += 1,
                        Err(e) => {
                            ok = false;
                            let _ = write!(
                                details,
                                "k={k} form {i} pair ({}, {}) on {line:?}: {e}; ",
                                pair.l_neg, pair.l_pos
                            );
                        }
                    }
                }
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    if ok {
        details = format!(
            "{pairs_verified}/{pairs_total} certified pairs bracket-verified (windows per form per line)"
        );
    }
    let passed = ok && pairs_verified == pairs_total && secs < 300.0;
    if secs >= 300.0 {
        let _ = write!(details, " [runtime {secs:.1}s over 300s budget]");
    }
    CriterionOutcome {
        id: 8,
        name: "cusp detectors",
        passed,
        details,
        seconds: secs,
    }
}

/// Criterion 9: trend reports (produced, with monotonicity summarized).
pub fn criterion9() -> CriterionOutcome {
    let t0 = Instant::now();
    let mut details = String::new();
    let mut produced = true;
    // QUE rectangle discrepancy across the weight grid (first eigenform).
    let mut que: Vec<(i64, f64)> = Vec::new();
    for k in [12i64, 24, 36, 48, 60] {
        let forms = eigenbasis(k, EIGEN_N, PREC).expect("eigenbasis");
        let f = &forms[0];
        match NormalizedForm::new(f, 10_000)
            .and_then(|nf| que_discrepancy(&nf, 16, 4.0, 1e-6, false))
        {
            Ok(rep) => que.push((k, rep.sup_discrepancy)),
            Err(e) => {
                produced = false;
                let _ = write!(details, "QUE k={k}: {e}; ");
            }
        }
    }
    let que_steps_down = que
        .windows(2)
        .filter(|w| w[1].1 <= w[0].1 + 1e-12)
        .count();
    // Cusp one-term approximation max error across {40, 80, 160}.
    let mut cusp: Vec<(i64, f64)> = Vec::new();
    for k in [40i64, 80, 160] {
        let forms = eigenbasis(k, 600, PREC).expect("eigenbasis");
        let f = &forms[0];
        let top = window_top(k).floor() as u64;
        let mut worst = 0.0f64;
        for l in 1..=top {
            for x in [0.0f64, 0.25, -0.5] {
                match cusp_approx_error(f, l, x) {
                    Ok(a) => {
                        if a.error > worst {
                            worst = a.error;
                        }
                    }
                    Err(e) => {
                        produced = false;
                        let _ = write!(details, "cusp k={k} l={l}: {e}; ");
                    }
                }
            }
        }
        cusp.push((k, worst));
    }
    let cusp_steps_down = cusp
        .windows(2)
        .filter(|w| w[1].1 <= w[0].1 + 1e-12)
        .count();
    let secs = t0.elapsed().as_secs_f64();
    let que_str: Vec<String> = que.iter().map(|(k, v)| format!("k{k}:{v:.4}")).collect();
    let cusp_str: Vec<String> = cusp.iter().map(|(k, v)| format!("k{k}:{v:.4}")).collect();
    let _ = write!(
        details,
        "QUE sup-discrepancy [{}] nonincreasing on {}/4 steps; cusp max one-term error [{}] nonincreasing on {}/2 steps; asymptotic exponents (log k)^(−0.00115…) are not desk-verifiable and are replaced by these trends plus criteria 1–8",
        que_str.join(" "),
        que_steps_down,
        cusp_str.join(" "),
        cusp_steps_down
    );
    CriterionOutcome {
        id: 9,
        name: "trend reports",
        passed: produced,
        details,
        seconds: secs,
    }
}

/// Everything criterion 10 byte-compares: the canonical (timing-free)
/// report of criteria 1..9.
pub fn canonical_report(seed: u64) -> (Vec<CriterionOutcome>, String) {
    let outcomes = vec![
        criterion1(),
        criterion2(),
        criterion3(),
        criterion4(),
        criterion5(),
        criterion6(),
        criterion7(),
        criterion8(),
        criterion9(),
    ];
    let mut text = String::new();
    let _ = writeln!(text, "mflab acceptance report (seed {seed})");
    for o in &outcomes {
        let _ = writeln!(text, "{}", o.line());
    }
    // Seeded statistics digest (exercises every RNG consumer).
    let forms = eigenbasis(12, 25_000, PREC).expect("eigenbasis");
    let f = &forms[0];
    let (s1, s2) =
        crate::cuspzone::short_interval_stats(f, 10_000.0, 100.0, 200, seed).expect("intervals");
    let g = crate::cuspzone::g_interval_stats(f, 0.1, 10_000.0, 100.0, 200, seed).expect("g stats");
    let _ = writeln!(
        text,
        "seeded digest: short mean {:.12e} meansq {:.12e}; centered |λ|² mean {:.12e}; g long {:.12e} gapmax {:.12e} viol {:.6}",
        s1.mean, s1.mean_square, s2.mean, g.long_avg_g, g.max_gap, g.violating_fraction
    );
    (outcomes, text)
}

/// Criterion 10: regenerate the canonical report and byte-compare.
pub fn criterion10(seed: u64, first_report: &str) -> CriterionOutcome {
    let t0 = Instant::now();
    let (_, second) = canonical_report(seed);
    let identical = second == first_report;
    CriterionOutcome {
        id: 10,
        name: "determinism",
        passed: identical,
        details: if identical {
            format!(
                "repeated canonical report is byte-identical ({} bytes)",
                first_report.len()
            )
        } else {
            "repeated canonical report differs".into()
        },
        seconds: t0.elapsed().as_secs_f64(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub outcomes: Vec<CriterionOutcome>,
    pub all_passed: bool,
}

/// Run the full acceptance suite, printing one line per criterion.
pub fn run_all(seed: u64, out_dir: Option<&std::path::Path>) -> Result<VerifyReport> {
    let (mut outcomes, report) = canonical_report(seed);
    for o in &outcomes {
        println!("{}  ({:.1}s)", o.line(), o.seconds);
    }
    let c10 = criterion10(seed, &report);
    println!("{}  ({:.1}s)", c10.line(), c10.seconds);
    outcomes.push(c10);
    let all_passed = outcomes.iter().all(|o| o.passed);
    let rep = VerifyReport {
        seed,
        outcomes,
        all_passed,
    };
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.txt"), &report)?;
        let json = serde_json::to_string_pretty(&rep)
            .map_err(|e| crate::error::Error::CacheError(e.to_string()))?;
        std::fs::write(dir.join("criteria.json"), json)?;
    }
    Ok(rep)
}
