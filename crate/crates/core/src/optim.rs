//! Box-constrained BFGS minimization with a backtracking line search.
//!
//! Coordinates sitting on a bound whose gradient pushes further out are
//! frozen for the step; convergence is measured on the projected gradient.

use serde::Serialize;

/// Settings shared by the maximum-likelihood fits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimizerSettings {
    /// Tolerance on the max-norm of the projected gradient.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 500,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Max-norm of the projected gradient at `x`.
    pub gradient_norm: f64,
}

const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
const NOISE_REL: f64 = 1e-14;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn projected(x: &[f64], g: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(g)
        .zip(lower.iter().zip(upper))
        .map(|((&xi, &gi), (&lo, &hi))| {
            if (xi <= lo && gi > 0.0) || (xi >= hi && gi < 0.0) {
                0.0
            } else {
                gi
            }
        })
        .collect()
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Minimizes `f` over the box `[lower, upper]`. `f` writes its gradient into
/// the second argument and returns the value.
pub fn minimize<F>(
    mut f: F,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    settings: &OptimizerSettings,
) -> Minimum
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    assert!(lower.len() == n && upper.len() == n, "bounds must match dimension");
    let clamp = |x: &mut [f64]| {
        for i in 0..n {
            x[i] = x[i].clamp(lower[i], upper[i]);
        }
    };

    let mut x = x0.to_vec();
    clamp(&mut x);
    let mut g = vec![0.0; n];
    let mut fx = f(&x, &mut g);

    // inverse Hessian approximation, row-major
    let identity = |h: &mut Vec<f64>| {
        h.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            h[i * n + i] = 1.0;
        }
    };
    let mut h = vec![0.0; n * n];
    identity(&mut h);
    let mut scaled = false;

    let mut iterations = 0;
    let mut pg = projected(&x, &g, lower, upper);
    while iterations < settings.max_iter && max_norm(&pg) > settings.tol {
        iterations += 1;

        let free: Vec<bool> = pg.iter().zip(&g).map(|(p, gi)| *p != 0.0 || *gi == 0.0).collect();
        let mut d: Vec<f64> = (0..n)
            .map(|i| {
                if !free[i] {
                    return 0.0;
                }
                -(0..n).filter(|&j| free[j]).map(|j| h[i * n + j] * g[j]).sum::<f64>()
            })
            .collect();
        if dot(&d, &pg) >= 0.0 {
            identity(&mut h);
            d = pg.iter().map(|v| -v).collect();
        }

        let mut t = 1.0;
        let mut accepted = None;
        let mut g_new = vec![0.0; n];
        for _ in 0..MAX_BACKTRACKS {
            let mut x_new: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + t * di).collect();
            clamp(&mut x_new);
            let step: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            let decrease = dot(&g, &step);
            let f_new = f(&x_new, &mut g_new);
            // near the optimum the predicted decrease drops below the rounding
            // noise of f, so allow a few ulps of slack
            let slack = NOISE_REL * (1.0 + fx.abs());
            if f_new.is_finite() && f_new <= fx + ARMIJO_C1 * decrease + slack {
                accepted = Some((x_new, f_new, step));
                break;
            }
            t *= 0.5;
        }
        let Some((x_new, f_new, s)) = accepted else {
            if scaled {
                // retry once from steepest descent before giving up
                identity(&mut h);
                scaled = false;
                continue;
            }
            break;
        };

        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if !scaled {
                let gamma = sy / dot(&y, &y);
                h.iter_mut().for_each(|v| *v *= gamma);
                scaled = true;
            }
            // H <- (I - rho s y') H (I - rho y s') + rho s s'
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j])
                        + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }

        x = x_new;
        fx = f_new;
        g = g_new;
        pg = projected(&x, &g, lower, upper);
    }

    let gradient_norm = max_norm(&pg);
    Minimum {
        converged: gradient_norm <= settings.tol,
        x,
        value: fx,
        gradient: g,
        iterations,
        gradient_norm,
    }
}

/// Central finite-difference gradient.
pub fn numeric_gradient<F>(mut f: F, x: &[f64], step: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = step * (1.0 + x[i].abs());
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64], g: &mut [f64]) -> f64 {
        let (a, b) = (x[0], x[1]);
        g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
        g[1] = 200.0 * (b - a * a);
        (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
    }

    #[test]
    fn solves_rosenbrock() {
        let inf = f64::INFINITY;
        let m = minimize(
            rosenbrock,
            &[-1.2, 1.0],
            &[-inf, -inf],
            &[inf, inf],
            &OptimizerSettings::default(),
        );
        assert!(m.converged, "{m:?}");
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn respects_bounds() {
        // minimum of (x - 3)^2 + (y + 1)^2 on [0, 2] x [0, 2] is (2, 0)
        let f = |x: &[f64], g: &mut [f64]| {
            g[0] = 2.0 * (x[0] - 3.0);
            g[1] = 2.0 * (x[1] + 1.0);
            (x[0] - 3.0).powi(2) + (x[1] + 1.0).powi(2)
        };
        let m = minimize(f, &[1.0, 1.0], &[0.0, 0.0], &[2.0, 2.0], &OptimizerSettings::default());
        assert!(m.converged);
        assert_eq!(m.x, vec![2.0, 0.0]);
    }

    #[test]
    fn reports_iteration_cap() {
        let inf = f64::INFINITY;
        let settings = OptimizerSettings { tol: 1e-12, max_iter: 2 };
        let m = minimize(rosenbrock, &[-1.2, 1.0], &[-inf; 2], &[inf; 2], &settings);
        assert_eq!(m.iterations, 2);
        assert!(!m.converged);
        assert!(m.gradient_norm > settings.tol);
    }

    #[test]
    fn finite_differences_match_analytic() {
        let x = [0.3, -0.7];
        let mut g = [0.0; 2];
        rosenbrock(&x, &mut g);
        let num = numeric_gradient(|x| rosenbrock(x, &mut [0.0; 2]), &x, 1e-6);
        for i in 0..2 {
            assert!((g[i] - num[i]).abs() < 1e-6 * g[i].abs().max(1.0));
        }
    }
}
