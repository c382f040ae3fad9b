//! Smooth compactly supported cutoffs: the plateau/annulus pair driving the
//! delta decomposition, and general plateau windows for summation weights.

/// C^∞ step: 0 for s <= 0, 1 for s >= 1, strictly increasing in between.
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let f = (-1.0 / s).exp();
        let g = (-1.0 / (1.0 - s)).exp();
        f / (f + g)
    }
}

/// The two fixed kernels of the delta decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bump {
    /// Even plateau: 1 on [-2, 2], supported in [-3, 3], C^∞.
    PlateauU,
    /// Even annulus: nonnegative, supported in [-2,-1] ∪ [1,2], vanishing at 0.
    AnnulusW,
}

impl Bump {
    pub fn eval(self, x: f64) -> f64 {
        let a = x.abs();
        match self {
            Bump::PlateauU => {
                if a <= 2.0 {
                    1.0
                } else if a < 3.0 {
                    smooth_step(3.0 - a)
                } else {
                    0.0
                }
            }
            Bump::AnnulusW => {
                if a > 1.0 && a < 2.0 {
                    let u = 2.0 * a - 3.0; // in (-1, 1)
                    (-1.0 / (1.0 - u * u)).exp()
                } else {
                    0.0
                }
            }
        }
    }
}

/// Evaluate a bump kernel; exact 0 outside its support.
pub fn eval_bump(f: Bump, x: f64) -> f64 {
    f.eval(x)
}

/// Smooth compactly supported window on the half line.
#[derive(Debug, Clone, PartialEq)]
pub enum Window {
    /// 0 outside (lo, hi), exactly 1 on [one_lo, one_hi], C^∞ transitions.
    Plateau {
        lo: f64,
        one_lo: f64,
        one_hi: f64,
        hi: f64,
    },
    /// The plateau kernel restricted to x >= 0: 1 on [0, 2], support [0, 3).
    PlateauURight,
}

impl Window {
    pub fn plateau(lo: f64, one_lo: f64, one_hi: f64, hi: f64) -> Window {
        assert!(
            lo < one_lo && one_lo <= one_hi && one_hi < hi,
            "plateau window needs lo < one_lo <= one_hi < hi"
        );
        Window::Plateau {
            lo,
            one_lo,
            one_hi,
            hi,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Window::Plateau {
                lo,
                one_lo,
                one_hi,
                hi,
            } => {
                if x <= lo || x >= hi {
                    0.0
                } else if x < one_lo {
                    smooth_step((x - lo) / (one_lo - lo))
                } else if x <= one_hi {
                    1.0
                } else {
                    smooth_step((hi - x) / (hi - one_hi))
                }
            }
            Window::PlateauURight => {
                if x < 0.0 {
                    0.0
                } else {
                    Bump::PlateauU.eval(x)
                }
            }
        }
    }

    /// Closed support interval.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Window::Plateau { lo, hi, .. } => (lo, hi),
            Window::PlateauURight => (0.0, 3.0),
        }
    }

    /// Interval on which the window is exactly 1.
    pub fn plateau_range(&self) -> (f64, f64) {
        match *self {
            Window::Plateau { one_lo, one_hi, .. } => (one_lo, one_hi),
            Window::PlateauURight => (0.0, 2.0),
        }
    }

    /// Measured inertness scale: max over derivative orders j ≤ 4 of
    /// sup_x |x^j F^(j)(x)|^(1/j), probed by grid differencing. This is the
    /// Z for which the window is Z-inert through the orders that drive
    /// dual-sum truncation.
    pub fn z_scale(&self) -> f64 {
        let (lo, hi) = self.support();
        let n = 4096usize;
        let h = (hi - lo) / n as f64;
        let mut vals: Vec<f64> = (0..=n).map(|i| self.eval(lo + i as f64 * h)).collect();
        let mut z: f64 = 1.0;
        for j in 1..=4u32 {
            // forward difference once per order
            for i in 0..vals.len() - 1 {
                vals[i] = (vals[i + 1] - vals[i]) / h;
            }
            vals.pop();
            let mut sup: f64 = 0.0;
            for (i, v) in vals.iter().enumerate() {
                let x = lo + (i as f64 + 0.5 * j as f64) * h;
                sup = sup.max((x.powi(j as i32) * v).abs());
            }
            z = z.max(sup.powf(1.0 / j as f64));
        }
        z
    }
}

/// Default weight for the m-sum: supported in [1, 2] so that shifted
/// arguments r·m + h land inside the transparent part of `phi_window`.
pub fn direct_window() -> Window {
    Window::plateau(1.0, 1.25, 1.75, 2.0)
}

/// Default transparent factor on the dual sum: 1 on [1, 2], support [1/2, 5/2].
pub fn phi_window() -> Window {
    Window::plateau(0.5, 1.0, 2.0, 2.5)
}

/// Test weight for the summation-formula checks: a plateau kernel scaled and
/// shifted so its support sits strictly inside the positive axis (a support
/// touching 0 breaks the formula's hypothesis and visibly stalls the dual
/// sum's convergence).
pub fn voronoi_window() -> Window {
    Window::plateau(0.25, 1.0, 1.5, 2.25)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_values() {
        assert_eq!(Bump::PlateauU.eval(0.0), 1.0);
        assert_eq!(Bump::PlateauU.eval(2.0), 1.0);
        assert_eq!(Bump::PlateauU.eval(-2.0), 1.0);
        assert_eq!(Bump::PlateauU.eval(3.0), 0.0);
        let v = Bump::PlateauU.eval(2.5);
        assert!(v > 0.0 && v < 1.0);
        assert_eq!(v, Bump::PlateauU.eval(-2.5));
    }

    #[test]
    fn annulus_values() {
        assert_eq!(Bump::AnnulusW.eval(0.0), 0.0);
        assert_eq!(Bump::AnnulusW.eval(1.0), 0.0);
        assert_eq!(Bump::AnnulusW.eval(2.0), 0.0);
        let v = Bump::AnnulusW.eval(1.5);
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        for x in [1.1, 1.3, 1.9] {
            assert!(Bump::AnnulusW.eval(x) > 0.0);
            assert_eq!(Bump::AnnulusW.eval(x), Bump::AnnulusW.eval(-x));
        }
    }

    /// Finite-difference smoothness probes at the seams: first and second
    /// divided differences stay bounded and the function values match from
    /// both sides.
    #[test]
    fn seam_smoothness_probes() {
        let probe = |f: &dyn Fn(f64) -> f64, x0: f64| {
            let h = 1e-4;
            // one-sided first and second differences from each side
            let d1l = (f(x0) - f(x0 - h)) / h;
            let d1r = (f(x0 + h) - f(x0)) / h;
            let d2l = (f(x0) - 2.0 * f(x0 - h) + f(x0 - 2.0 * h)) / (h * h);
            let d2r = (f(x0 + 2.0 * h) - 2.0 * f(x0 + h) + f(x0)) / (h * h);
            // C^2 seams: derivative mismatches vanish as h -> 0; at h = 1e-4
            // a C^2 function keeps them below ~1e-3 for these kernels.
            assert!((d1l - d1r).abs() < 1e-3, "first derivative jump at {x0}");
            assert!((d2l - d2r).abs() < 1e-2, "second derivative jump at {x0}");
        };
        let u = |x: f64| Bump::PlateauU.eval(x);
        for seam in [2.0, 3.0, -2.0, -3.0] {
            probe(&u, seam);
        }
        let w = |x: f64| Bump::AnnulusW.eval(x);
        for seam in [1.0, 2.0, -1.0, -2.0] {
            probe(&w, seam);
        }
        let win = direct_window();
        let wf = |x: f64| win.eval(x);
        for seam in [1.0, 1.25, 1.75, 2.0] {
            probe(&wf, seam);
        }
    }

    #[test]
    fn window_plateau_is_exact() {
        let v = direct_window();
        assert_eq!(v.eval(1.25), 1.0);
        assert_eq!(v.eval(1.5), 1.0);
        assert_eq!(v.eval(1.75), 1.0);
        assert_eq!(v.eval(1.0), 0.0);
        assert_eq!(v.eval(2.0), 0.0);
        let phi = phi_window();
        assert_eq!(phi.eval(1.0), 1.0);
        assert_eq!(phi.eval(2.0), 1.0);
        assert!(phi.eval(0.75) > 0.0 && phi.eval(0.75) < 1.0);
    }
}
