//! Tensor Gauss–Legendre quadrature with dyadic adaptive subdivision.
//!
//! 16 nodes per axis; a cell is accepted when the 2×2-child refinement
//! agrees with the parent estimate within the cell's share of the error
//! budget. Subdivision order is deterministic, and parallel cell maps reduce
//! in index order, so results are bit-stable for a fixed build.

use once_cell::sync::Lazy;

use crate::error::{Error, Result};

const GL_N: usize = 16;

/// Nodes and weights of the 16-point rule on [−1, 1], computed once by
/// Newton iteration on the Legendre polynomial.
static GL16: Lazy<([f64; GL_N], [f64; GL_N])> = Lazy::new(|| {
    let n = GL_N;
    let mut nodes = [0.0; GL_N];
    let mut weights = [0.0; GL_N];
    for i in 0..n {
        // Initial guess: Chebyshev-like.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Legendre P_n and P_n' by the recurrence.
            let (mut p0, mut p1) = (1.0f64, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for j in 2..=n {
            let jf = j as f64;
            let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
            p0 = p1;
            p1 = p2;
        }
        let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
});

/// Fixed 16-point estimate on [a, b].
pub fn gl16_1d(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = &*GL16;
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = 0.0;
    for i in 0..GL_N {
        s += weights[i] * f(mid + half * nodes[i]);
    }
    s * half
}

/// Adaptive 1D integral to absolute tolerance `tol`.
pub fn adaptive_1d(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    fn rec(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        tol: f64,
        whole: f64,
        depth: u32,
    ) -> Result<(f64, f64)> {
        let mid = 0.5 * (a + b);
        let left = gl16_1d(f, a, mid);
        let right = gl16_1d(f, mid, b);
        let err = (left + right - whole).abs();
        if err <= tol || depth >= 40 {
            if depth >= 40 && err > tol * 64.0 {
                return Err(Error::QuadratureError(format!(
                    "1d cell [{a}, {b}] error {err:.3e} at depth cap"
                )));
            }
            return Ok((left + right, err));
        }
        let (vl, el) = rec(f, a, mid, 0.5 * tol, left, depth + 1)?;
        let (vr, er) = rec(f, mid, b, 0.5 * tol, right, depth + 1)?;
        Ok((vl + vr, el + er))
    }
    let whole = gl16_1d(f, a, b);
    rec(f, a, b, tol, whole, 0)
}

/// Fixed tensor estimate on a rectangle.
pub fn gl16_2d(f: &impl Fn(f64, f64) -> f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let (nodes, weights) = &*GL16;
    let hx = 0.5 * (x1 - x0);
    let mx = 0.5 * (x0 + x1);
    let hy = 0.5 * (y1 - y0);
    let my = 0.5 * (y0 + y1);
    let mut s = 0.0;
    for i in 0..GL_N {
        let x = mx + hx * nodes[i];
        let mut row = 0.0;
        for j in 0..GL_N {
            row += weights[j] * f(x, my + hy * nodes[j]);
        }
        s += weights[i] * row;
    }
    s * hx * hy
}

/// Adaptive 2D integral over a rectangle to absolute tolerance `tol`.
/// `max_depth` caps dyadic subdivision; cells still disagreeing there fail
/// unless `accept_at_cap` is set (used for integrable log singularities,
/// where the residual is accounted by the caller).
pub struct Adaptive2d {
    pub tol: f64,
    pub max_depth: u32,
    pub accept_at_cap: bool,
}

impl Default for Adaptive2d {
    fn default() -> Self {
        Adaptive2d {
            tol: 1e-8,
            max_depth: 24,
            accept_at_cap: false,
        }
    }
}

impl Adaptive2d {
    pub fn integrate(
        &self,
        f: &(impl Fn(f64, f64) -> f64 + Sync),
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
    ) -> Result<(f64, f64)> {
        let whole = gl16_2d(f, x0, x1, y0, y1);
        self.rec(f, x0, x1, y0, y1, self.tol, whole, 0)
    }

    #[allow(clippy::too_many_arguments)]
    fn rec(
        &self,
        f: &(impl Fn(f64, f64) -> f64 + Sync),
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
        tol: f64,
        whole: f64,
        depth: u32,
    ) -> Result<(f64, f64)> {
        let mx = 0.5 * (x0 + x1);
        let my = 0.5 * (y0 + y1);
        let quads = [
            (x0, mx, y0, my),
            (mx, x1, y0, my),
            (x0, mx, my, y1),
            (mx, x1, my, y1),
        ];
        let kids: Vec<f64> = quads
            .iter()
            .map(|&(a, b, c, d)| gl16_2d(f, a, b, c, d))
            .collect();
        let refined: f64 = kids.iter().sum();
        let err = (refined - whole).abs();
        if err <= tol {
            return Ok((refined, err));
        }
        if depth >= self.max_depth {
            if self.accept_at_cap {
                return Ok((refined, err));
            }
            return Err(Error::QuadratureError(format!(
                "2d cell [{x0}, {x1}]×[{y0}, {y1}] error {err:.3e} at depth cap"
            )));
        }
        let mut v = 0.0;
        let mut e = 0.0;
        for (i, &(a, b, c, d)) in quads.iter().enumerate() {
            let (vi, ei) = self.rec(f, a, b, c, d, 0.25 * tol, kids[i], depth + 1)?;
            v += vi;
            e += ei;
        }
        Ok((v, e))
    }
}
