//! Two-point boundary value problem for the self-similar temperature profile
//!
//! `kappa (Theta' / f(Theta))' + (xi / 2) g(Theta) Theta' = 0` on `[0, xi_max]`,
//! `Theta(0) = theta_-`, `Theta(xi_max) = theta_+`.

use super::closure::{ClosurePoint, QuasineutralClosure};
use crate::error::{NspError, Result};
use crate::fd::derivative4;
use crate::linalg::Tridiagonal;

/// Smallest damping factor tried before a Newton step is accepted regardless.
const DAMPING_FLOOR: f64 = 1.0 / 1024.0;

/// Discretization and solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfSimilarNumerics {
    pub xi_max: f64,
    pub n_nodes: usize,
    /// Max-norm target for the discrete residual.
    pub newton_tol: f64,
    pub max_iter: usize,
    /// Largest admissible wave strength.
    pub delta_cap: f64,
    /// Deferred-correction sweeps applied after the second-order solve.
    /// Zero leaves the plain second-order solution.
    pub correction_sweeps: usize,
}

impl Default for SelfSimilarNumerics {
    fn default() -> Self {
        Self {
            xi_max: 20.0,
            n_nodes: 4001,
            newton_tol: 1e-10,
            max_iter: 50,
            delta_cap: 0.3,
            correction_sweeps: 2,
        }
    }
}

impl SelfSimilarNumerics {
    pub fn validate(&self) -> Result<()> {
        if !(self.xi_max > 0.0) {
            return Err(NspError::InvalidInput(format!("xi_max must be positive, got {}", self.xi_max)));
        }
        if self.n_nodes < 9 {
            return Err(NspError::InvalidInput(format!(
                "profile needs at least 9 nodes, got {}",
                self.n_nodes
            )));
        }
        if !(self.newton_tol > 0.0) || self.max_iter == 0 {
            return Err(NspError::InvalidInput("newton_tol and max_iter must be positive".into()));
        }
        if !(self.delta_cap >= 0.0) {
            return Err(NspError::InvalidInput(format!("delta_cap must be nonnegative, got {}", self.delta_cap)));
        }
        Ok(())
    }
}

/// Converged node table of the self-similar profile.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimilarProfile {
    pub xi_grid: Vec<f64>,
    pub theta: Vec<f64>,
    pub dtheta: Vec<f64>,
    pub kappa: f64,
    /// Max-norm residual of the last discrete system solved.
    pub residual_norm: f64,
    /// Newton iterations summed over all solves.
    pub newton_iterations: usize,
}

impl SelfSimilarProfile {
    pub fn spacing(&self) -> f64 {
        self.xi_grid[1] - self.xi_grid[0]
    }

    pub fn xi_max(&self) -> f64 {
        *self.xi_grid.last().expect("profile grid is nonempty")
    }
}

struct Discretization<'a> {
    closure: &'a QuasineutralClosure,
    kappa: f64,
    h: f64,
    xi: Vec<f64>,
}

impl Discretization<'_> {
    /// Closure data at every node, warm-started from `prev` when available.
    fn points(&self, theta: &[f64], prev: Option<&[ClosurePoint]>) -> Result<Vec<ClosurePoint>> {
        theta
            .iter()
            .enumerate()
            .map(|(j, &th)| match prev {
                Some(p) => self.closure.point_from(th, p[j].v),
                None => self.closure.point(th),
            })
            .collect()
    }

    /// Second-order operator at interior nodes; boundary entries are zero.
    fn operator(&self, theta: &[f64], pts: &[ClosurePoint]) -> Vec<f64> {
        let n = theta.len();
        let k = self.kappa / (self.h * self.h);
        let mut out = vec![0.0; n];
        for j in 1..n - 1 {
            let b = |i: usize| 1.0 / pts[i].v;
            let ap = 0.5 * (b(j) + b(j + 1));
            let am = 0.5 * (b(j) + b(j - 1));
            let diffusion = k * (ap * (theta[j + 1] - theta[j]) - am * (theta[j] - theta[j - 1]));
            let advection = self.xi[j] / (4.0 * self.h) * pts[j].g * (theta[j + 1] - theta[j - 1]);
            out[j] = diffusion + advection;
        }
        out
    }

    /// Fourth-order evaluation of the continuous operator at interior nodes.
    fn operator4(&self, theta: &[f64], pts: &[ClosurePoint]) -> Vec<f64> {
        let d1 = derivative4(theta, self.h);
        let flux: Vec<f64> = d1.iter().zip(pts).map(|(d, p)| d / p.v).collect();
        let dflux = derivative4(&flux, self.h);
        let n = theta.len();
        let mut out = vec![0.0; n];
        for j in 1..n - 1 {
            out[j] = self.kappa * dflux[j] + 0.5 * self.xi[j] * pts[j].g * d1[j];
        }
        out
    }

    fn jacobian(&self, theta: &[f64], pts: &[ClosurePoint]) -> Tridiagonal {
        let n = theta.len();
        let k = self.kappa / (self.h * self.h);
        let mut jac = Tridiagonal::zeros(n);
        let b = |i: usize| 1.0 / pts[i].v;
        let db = |i: usize| -pts[i].f_prime / (pts[i].v * pts[i].v);
        for j in 1..n - 1 {
            let ap = 0.5 * (b(j) + b(j + 1));
            let am = 0.5 * (b(j) + b(j - 1));
            let fwd = theta[j + 1] - theta[j];
            let bwd = theta[j] - theta[j - 1];
            let c = self.xi[j] / (4.0 * self.h);
            jac.upper[j] = k * (ap + 0.5 * db(j + 1) * fwd) + c * pts[j].g;
            jac.lower[j] = k * (am - 0.5 * db(j - 1) * bwd) - c * pts[j].g;
            jac.diag[j] = k * (-ap - am + 0.5 * db(j) * (fwd - bwd))
                + c * pts[j].g_prime * (theta[j + 1] - theta[j - 1]);
        }
        jac.diag[0] = 1.0;
        jac.diag[n - 1] = 1.0;
        jac
    }

    fn residual(&self, theta: &[f64], pts: &[ClosurePoint], rhs: &[f64]) -> Vec<f64> {
        let mut r = self.operator(theta, pts);
        for (rj, bj) in r.iter_mut().zip(rhs) {
            *rj -= bj;
        }
        r
    }

    /// Damped Newton for `operator(theta) = rhs` with fixed boundary values.
    fn newton(
        &self,
        theta: &mut Vec<f64>,
        rhs: &[f64],
        tol: f64,
        max_iter: usize,
    ) -> Result<(f64, usize, Vec<ClosurePoint>)> {
        let mut pts = self.points(theta, None)?;
        let mut res = self.residual(theta, &pts, rhs);
        let mut norm = max_abs(&res);
        let mut iterations = 0;
        while norm > tol {
            if iterations == max_iter {
                return Err(NspError::NewtonDivergence {
                    context: "self-similar profile (try a larger xi_max or more nodes)".into(),
                    iterations,
                    residual: norm,
                });
            }
            iterations += 1;
            let jac = self.jacobian(theta, &pts);
            let mut neg: Vec<f64> = res.iter().map(|r| -r).collect();
            neg[0] = 0.0;
            let last = neg.len() - 1;
            neg[last] = 0.0;
            let step = jac.solve(&neg)?;
            let mut lambda = 1.0;
            loop {
                let trial: Vec<f64> = theta.iter().zip(&step).map(|(t, s)| t + lambda * s).collect();
                let evaluated = self
                    .points(&trial, Some(&pts))
                    .map(|p| {
                        let r = self.residual(&trial, &p, rhs);
                        (p, r)
                    });
                match evaluated {
                    Ok((p, r)) => {
                        let trial_norm = max_abs(&r);
                        if trial_norm < norm || lambda <= DAMPING_FLOOR {
                            *theta = trial;
                            pts = p;
                            res = r;
                            norm = trial_norm;
                            break;
                        }
                    }
                    Err(e) if lambda <= DAMPING_FLOOR => return Err(e),
                    Err(_) => {}
                }
                lambda *= 0.5;
            }
        }
        Ok((norm, iterations, pts))
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves the self-similar profile problem for the closure's end states.
///
/// Errors on Newton divergence and on a converged iterate that fails to be
/// monotone or leaves the interval spanned by the end temperatures.
pub fn solve_self_similar(
    closure: &QuasineutralClosure,
    kappa: f64,
    numerics: &SelfSimilarNumerics,
) -> Result<SelfSimilarProfile> {
    numerics.validate()?;
    if !(kappa > 0.0) {
        return Err(NspError::InvalidInput(format!("kappa must be positive, got {kappa}")));
    }
    let ends = closure.ends;
    if ends.delta > numerics.delta_cap {
        return Err(NspError::InvalidInput(format!(
            "wave strength {} exceeds the cap {}",
            ends.delta, numerics.delta_cap
        )));
    }
    let n = numerics.n_nodes;
    let h = numerics.xi_max / (n - 1) as f64;
    let xi: Vec<f64> = (0..n).map(|j| j as f64 * h).collect();
    let (tm, tp) = (ends.theta_minus, ends.theta_plus);
    if ends.delta == 0.0 {
        return Ok(SelfSimilarProfile {
            xi_grid: xi,
            theta: vec![tm; n],
            dtheta: vec![0.0; n],
            kappa,
            residual_norm: 0.0,
            newton_iterations: 0,
        });
    }
    let xi0 = 0.25 * numerics.xi_max;
    let mut theta: Vec<f64> = xi
        .iter()
        .map(|&x| tm + (tp - tm) * 0.5 * (1.0 + libm::erf(x - xi0)))
        .collect();
    theta[0] = tm;
    theta[n - 1] = tp;

    let disc = Discretization { closure, kappa, h, xi };
    let zero = vec![0.0; n];
    let (mut norm, mut iterations, mut pts) =
        disc.newton(&mut theta, &zero, numerics.newton_tol, numerics.max_iter)?;
    for _ in 0..numerics.correction_sweeps {
        let low = disc.operator(&theta, &pts);
        let high = disc.operator4(&theta, &pts);
        let rhs: Vec<f64> = low.iter().zip(&high).map(|(l, hi)| l - hi).collect();
        let (nn, it, p) = disc.newton(&mut theta, &rhs, numerics.newton_tol, numerics.max_iter)?;
        norm = nn;
        iterations += it;
        pts = p;
    }
    drop(pts);

    enforce_shape(&mut theta, tm, tp)?;
    let dtheta = derivative4(&theta, h);
    Ok(SelfSimilarProfile {
        xi_grid: disc.xi,
        theta,
        dtheta,
        kappa,
        residual_norm: norm,
        newton_iterations: iterations,
    })
}

/// Checks monotonicity and range up to rounding, then removes rounding-level
/// excursions outside the closed end-state interval.
fn enforce_shape(theta: &mut [f64], tm: f64, tp: f64) -> Result<()> {
    let delta = (tp - tm).abs();
    let slack = 1e-12 * delta.max(f64::MIN_POSITIVE) + 4.0 * f64::EPSILON * tm.abs().max(tp.abs());
    let dir = (tp - tm).signum();
    for (j, w) in theta.windows(2).enumerate() {
        if dir * (w[1] - w[0]) < -slack {
            return Err(NspError::Invariant(format!(
                "self-similar profile is not monotone between nodes {j} and {}",
                j + 1
            )));
        }
    }
    let (lo, hi) = (tm.min(tp), tm.max(tp));
    for (j, t) in theta.iter_mut().enumerate() {
        if *t < lo - slack || *t > hi + slack {
            return Err(NspError::Invariant(format!("profile value {t} at node {j} leaves [{lo}, {hi}]")));
        }
        *t = t.clamp(lo, hi);
    }
    // Rounding-level reversals are flattened so the stored profile is monotone.
    for j in 1..theta.len() {
        if dir * (theta[j] - theta[j - 1]) < 0.0 {
            theta[j] = theta[j - 1];
        }
    }
    Ok(())
}
