//! Leader and follower dynamics, the follower observer and its reset, the
//! consensus control law, and bounded disturbances.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;

pub use crate::linalg::zoh as discretize_zoh;

#[derive(Debug, Error, PartialEq)]
pub enum PlantError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("input matrix cannot cancel the drift: ‖(I - B B⁺) A‖ = {0:.3e}")]
    Unactuated(f64),
    #[error("goal error has a component outside the actuated subspace ({0:.3e})")]
    UnreachableGoal(f64),
}

/// `ẋ = A x + B u`, `y = C x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LtiModel {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
}

impl LtiModel {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>) -> Result<Self, PlantError> {
        let n = a.nrows();
        if !a.is_square() || b.nrows() != n || c.ncols() != n {
            return Err(PlantError::Dimension(format!(
                "A {}x{}, B {}x{}, C {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols()
            )));
        }
        Ok(LtiModel { a, b, c })
    }

    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn discretize(&self, ts: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        linalg::zoh(&self.a, &self.b, ts)
    }
}

/// Small-angle hover linearisation of a quadrotor. State
/// `[x1, x2, x3, v1, v2, α, β, γ]`, input `[vertical velocity, α̇, β̇, γ̇]`,
/// output the position `(x1, x2, x3)`.
pub fn quadrotor_leader(g: f64) -> LtiModel {
    let mut a = DMatrix::zeros(8, 8);
    a[(0, 3)] = 1.0;
    a[(1, 4)] = 1.0;
    a[(3, 6)] = g;
    a[(4, 5)] = -g;
    let mut b = DMatrix::zeros(8, 4);
    b[(2, 0)] = 1.0;
    b[(5, 1)] = 1.0;
    b[(6, 2)] = 1.0;
    b[(7, 3)] = 1.0;
    let mut c = DMatrix::zeros(3, 8);
    for k in 0..3 {
        c[(k, k)] = 1.0;
    }
    LtiModel { a, b, c }
}

/// Case-study follower: `ẋ = diag(1,1,0) x + B u + d` with a planar input
/// selector `B` and full position output.
pub fn planar_follower() -> LtiModel {
    let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.0]));
    let b = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    LtiModel {
        a,
        b,
        c: DMatrix::identity(3, 3),
    }
}

/// Follower model with the quantities the control law and the dwell-time
/// bounds need, precomputed once.
#[derive(Debug, Clone, PartialEq)]
pub struct FollowerModel {
    pub lti: LtiModel,
    pub b_pinv: DMatrix<f64>,
    /// Largest singular value of `A`.
    pub lambda_a: f64,
    /// Largest singular value of `C`.
    pub lambda_c: f64,
    /// State coordinates the disturbance can enter (rows of `B` that are not
    /// identically zero).
    pub active: Vec<bool>,
}

impl FollowerModel {
    /// Validates that `B B⁺` acts as the identity on the range of `A`, which
    /// is what the control law needs when `B` is not of full row rank.
    pub fn new(lti: LtiModel) -> Result<Self, PlantError> {
        let b_pinv = linalg::pinv(&lti.b);
        let n = lti.states();
        let proj = &lti.b * &b_pinv;
        let resid = ((DMatrix::identity(n, n) - &proj) * &lti.a).abs().max();
        if resid > 1e-9 {
            return Err(PlantError::Unactuated(resid));
        }
        let active = (0..n)
            .map(|r| lti.b.row(r).iter().any(|v| *v != 0.0))
            .collect();
        Ok(FollowerModel {
            lambda_a: linalg::max_singular_value(&lti.a),
            lambda_c: linalg::max_singular_value(&lti.c),
            b_pinv,
            lti,
            active,
        })
    }

    /// Checks that `x_g − x` has no component the input cannot steer.
    pub fn check_goal(&self, x: &DVector<f64>, xg: &DVector<f64>) -> Result<(), PlantError> {
        let n = self.lti.states();
        let proj = &self.lti.b * &self.b_pinv;
        let e = xg - x;
        let off = ((DMatrix::identity(n, n) - proj) * e).abs().max();
        if off > 1e-9 {
            return Err(PlantError::UnreachableGoal(off));
        }
        Ok(())
    }

    pub fn control(&self, xhat: &DVector<f64>, xg: &DVector<f64>, k: f64) -> DVector<f64> {
        -(&self.b_pinv * (&self.lti.a * xhat)) + &self.b_pinv * (xg - xhat) * k
    }
}

/// `u = −B⁺A x̂ + k B⁺ (x_g − x̂)`.
pub fn follower_control(
    xhat: &DVector<f64>,
    xg: &DVector<f64>,
    k: f64,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
) -> DVector<f64> {
    let bp = linalg::pinv(b);
    -(&bp * (a * xhat)) + &bp * (xg - xhat) * k
}

fn rk4(f: impl Fn(&DVector<f64>) -> DVector<f64>, x: &DVector<f64>, h: f64) -> DVector<f64> {
    let k1 = f(x);
    let k2 = f(&(x + &k1 * (h / 2.0)));
    let k3 = f(&(x + &k2 * (h / 2.0)));
    let k4 = f(&(x + &k3 * h));
    x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Integrates `ẋ = A x + B u + d` over `h` with `u`, `d` held, in
/// `substeps` RK4 steps.
pub fn step_true(
    model: &LtiModel,
    x: &DVector<f64>,
    u: &DVector<f64>,
    d: &DVector<f64>,
    h: f64,
    substeps: usize,
) -> DVector<f64> {
    let drive = &model.b * u + d;
    let dt = h / substeps as f64;
    let mut x = x.clone();
    for _ in 0..substeps {
        x = rk4(|s| &model.a * s + &drive, &x, dt);
    }
    x
}

/// Disturbance-free observer step with `u` held.
pub fn step_observer(
    model: &LtiModel,
    xhat: &DVector<f64>,
    u: &DVector<f64>,
    h: f64,
    substeps: usize,
) -> DVector<f64> {
    step_true(model, xhat, u, &DVector::zeros(xhat.len()), h, substeps)
}

/// How follower disturbances are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisturbanceMode {
    /// Uniform in the `d̄`-ball over the active coordinates, redrawn every
    /// integration substep.
    #[default]
    UniformBall,
    /// Magnitude `d̄` along the first active coordinate, always.
    WorstCase,
}

/// Uniform sample from the ball of radius `dbar` in the coordinates marked
/// `active`; other coordinates are zero.
pub fn sample_disturbance(rng: &mut impl Rng, dbar: f64, active: &[bool]) -> DVector<f64> {
    let mut d = DVector::zeros(active.len());
    let dims = active.iter().filter(|a| **a).count();
    if dbar == 0.0 || dims == 0 {
        return d;
    }
    let dir: Vec<f64> = (0..dims).map(|_| StandardNormal.sample(rng)).collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return d;
    }
    let r: f64 = dbar * rng.random::<f64>().powf(1.0 / dims as f64);
    let mut it = dir.into_iter();
    for (k, on) in active.iter().enumerate() {
        if *on {
            d[k] = it.next().unwrap() / norm * r;
        }
    }
    d
}

/// `e1 = x̂ − x`, `e2 = x_g − x̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorPair {
    pub e1: DVector<f64>,
    pub e2: DVector<f64>,
}

/// True state, observer estimate and per-follower constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Follower {
    pub x: DVector<f64>,
    pub xhat: DVector<f64>,
    pub k: f64,
    pub dbar: f64,
    pub last_service: f64,
}

impl Follower {
    /// The observer starts at the true state.
    pub fn new(x: DVector<f64>, k: f64, dbar: f64) -> Self {
        Follower {
            xhat: x.clone(),
            x,
            k,
            dbar,
            last_service: 0.0,
        }
    }

    pub fn errors(&self, xg: &DVector<f64>) -> ErrorPair {
        ErrorPair {
            e1: &self.xhat - &self.x,
            e2: xg - &self.xhat,
        }
    }

    /// Closed-loop step of length `h`: the control law is evaluated on the
    /// running estimate inside each RK4 stage, the disturbance is redrawn by
    /// `disturbance` once per substep.
    pub fn advance(
        &mut self,
        model: &FollowerModel,
        xg: &DVector<f64>,
        h: f64,
        substeps: usize,
        mut disturbance: impl FnMut() -> DVector<f64>,
    ) {
        let n = self.x.len();
        let dt = h / substeps as f64;
        let k = self.k;
        let mut z = DVector::zeros(2 * n);
        z.rows_mut(0, n).copy_from(&self.x);
        z.rows_mut(n, n).copy_from(&self.xhat);
        for _ in 0..substeps {
            let d = disturbance();
            z = rk4(
                |s| {
                    let x = s.rows(0, n).into_owned();
                    let xh = s.rows(n, n).into_owned();
                    let bu = &model.lti.b * model.control(&xh, xg, k);
                    let mut out = DVector::zeros(2 * n);
                    out.rows_mut(0, n).copy_from(&(&model.lti.a * &x + &bu + &d));
                    out.rows_mut(n, n).copy_from(&(&model.lti.a * &xh + &bu));
                    out
                },
                &z,
                dt,
            );
        }
        self.x = z.rows(0, n).into_owned();
        self.xhat = z.rows(n, n).into_owned();
    }

    /// Observer reset on service: `x̂ ← x`.
    pub fn service_reset(&mut self, t: f64) {
        self.xhat = self.x.clone();
        self.last_service = t;
    }
}

/// Closed-form estimate under the consensus law:
/// `x̂(t+h) = x_g + e^{−k h} (x̂(t) − x_g)`.
pub fn predict_estimate(xhat: &DVector<f64>, xg: &DVector<f64>, k: f64, h: f64) -> DVector<f64> {
    xg + (xhat - xg) * (-k * h).exp()
}
