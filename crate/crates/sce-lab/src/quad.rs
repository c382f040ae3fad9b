//! Adaptive panel quadrature with fixed-order Gauss–Legendre rules, used for
//! the oscillatory Bessel-kernel integrals. Panels are split worst-first by
//! an embedded low/high-order error estimate; everything is deterministic.

use num_complex::Complex64;

use crate::{Error, Result};

/// Gauss–Legendre nodes/weights on [-1, 1], computed once by Newton
/// iteration on the Legendre recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    for i in 0..(n + 1) / 2 {
        // Chebyshev-based initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Legendre P_n(x) and derivative by recurrence.
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rules() -> &'static ((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>)) {
    static RULES: std::sync::OnceLock<((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>))> =
        std::sync::OnceLock::new();
    RULES.get_or_init(|| (gauss_legendre(16), gauss_legendre(32)))
}

/// Controls for one adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureBudget {
    /// Target relative error (against the result magnitude, with an L1
    /// fallback scale under heavy cancellation).
    pub rel_tol: f64,
    /// Panel cap; exceeding it with the target unmet is a hard error.
    pub max_panels: usize,
}

impl Default for QuadratureBudget {
    fn default() -> Self {
        QuadratureBudget {
            rel_tol: 1e-9,
            max_panels: 4096,
        }
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    /// Error estimate relative to the reporting scale; `<= rel_tol` on success.
    pub error_estimate: f64,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    low: Complex64,
    high: Complex64,
}

impl Panel {
    fn err(&self) -> f64 {
        (self.high - self.low).norm()
    }
}

fn eval_panel(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> Panel {
    let ((n16, w16), (n32, w32)) = rules();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut low = Complex64::new(0.0, 0.0);
    for (x, w) in n16.iter().zip(w16) {
        low += f(mid + half * x) * *w;
    }
    let mut high = Complex64::new(0.0, 0.0);
    for (x, w) in n32.iter().zip(w32) {
        high += f(mid + half * x) * *w;
    }
    Panel {
        a,
        b,
        low: low * half,
        high: high * half,
    }
}

/// Integrate `f` over [a, b] to the budget's relative tolerance.
pub fn integrate(
    f: &dyn Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    budget: &QuadratureBudget,
) -> Result<QuadResult> {
    if a >= b {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
            panels: 0,
        });
    }
    let mut panels = vec![eval_panel(f, a, b)];
    loop {
        let total: Complex64 = panels.iter().map(|p| p.high).sum();
        let err: f64 = panels.iter().map(|p| p.err()).sum();
        let l1: f64 = panels.iter().map(|p| p.high.norm()).sum();
        // Reporting scale: the result magnitude, with a cancellation floor.
        let scale = total.norm().max(1e-3 * l1).max(f64::MIN_POSITIVE);
        let rel = err / scale;
        if rel <= budget.rel_tol {
            return Ok(QuadResult {
                value: total,
                error_estimate: rel,
                panels: panels.len(),
            });
        }
        if panels.len() >= budget.max_panels {
            return Err(Error::QuadratureFailure {
                estimate: rel,
                budget: budget.rel_tol,
            });
        }
        // split the worst panel (first max for determinism)
        let mut worst = 0;
        let mut worst_err = -1.0;
        for (i, p) in panels.iter().enumerate() {
            let e = p.err();
            if e > worst_err {
                worst_err = e;
                worst = i;
            }
        }
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        let left = eval_panel(f, a, mid);
        let right = eval_panel(f, mid, b);
        panels[worst] = left;
        panels.push(right);
    }
}

/// Real-valued convenience wrapper.
pub fn integrate_real(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    budget: &QuadratureBudget,
) -> Result<QuadResult> {
    integrate(&|x| Complex64::new(f(x), 0.0), a, b, budget)
}
