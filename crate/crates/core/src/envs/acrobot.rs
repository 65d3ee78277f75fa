//! Two-link underactuated pendulum ("book" dynamics), one RK4 step of 0.2 s
//! per action.
//!
//! State `[theta1, theta2, dtheta1, dtheta2]`; observation
//! `[cos t1, sin t1, cos t2, sin t2, dt1, dt2]`. Reward -1 per step, 0 on the
//! step reaching the goal height.

use std::f64::consts::PI;

use crate::rng::RngStream;

pub const DT: f64 = 0.2;
pub const LINK_LENGTH_1: f64 = 1.0;
pub const LINK_MASS_1: f64 = 1.0;
pub const LINK_MASS_2: f64 = 1.0;
pub const LINK_COM_POS_1: f64 = 0.5;
pub const LINK_COM_POS_2: f64 = 0.5;
pub const LINK_MOI: f64 = 1.0;
pub const MAX_VEL_1: f64 = 4.0 * PI;
pub const MAX_VEL_2: f64 = 9.0 * PI;
pub const AVAIL_TORQUE: [f64; 3] = [-1.0, 0.0, 1.0];
const G: f64 = 9.8;

#[derive(Debug, Clone, Default)]
pub struct Acrobot {
    pub state: [f64; 4],
}

fn derivs(s: [f64; 5]) -> [f64; 5] {
    let (m1, m2, l1, lc1, lc2, i1, i2) = (
        LINK_MASS_1,
        LINK_MASS_2,
        LINK_LENGTH_1,
        LINK_COM_POS_1,
        LINK_COM_POS_2,
        LINK_MOI,
        LINK_MOI,
    );
    let [theta1, theta2, dtheta1, dtheta2, a] = s;
    let d1 = m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * theta2.cos()) + i1 + i2;
    let d2 = m2 * (lc2 * lc2 + l1 * lc2 * theta2.cos()) + i2;
    let phi2 = m2 * lc2 * G * (theta1 + theta2 - PI / 2.0).cos();
    let phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * theta2.sin()
        - 2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * theta2.sin()
        + (m1 * lc1 + m2 * l1) * G * (theta1 - PI / 2.0).cos()
        + phi2;
    let ddtheta2 = (a + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * theta2.sin() - phi2)
        / (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
    let ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
    [dtheta1, dtheta2, ddtheta1, ddtheta2, 0.0]
}

fn axpy(y: [f64; 5], h: f64, k: [f64; 5]) -> [f64; 5] {
    std::array::from_fn(|i| y[i] + h * k[i])
}

fn rk4(y0: [f64; 5], dt: f64) -> [f64; 5] {
    let dt2 = dt / 2.0;
    let k1 = derivs(y0);
    let k2 = derivs(axpy(y0, dt2, k1));
    let k3 = derivs(axpy(y0, dt2, k2));
    let k4 = derivs(axpy(y0, dt, k3));
    std::array::from_fn(|i| y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

fn wrap(mut x: f64, m: f64, big_m: f64) -> f64 {
    let diff = big_m - m;
    while x > big_m {
        x -= diff;
    }
    while x < m {
        x += diff;
    }
    x
}

impl Acrobot {
    pub fn reset(&mut self, rng: &mut RngStream) {
        for s in &mut self.state {
            *s = rng.uniform(-0.1, 0.1);
        }
    }

    pub fn step(&mut self, action: usize) -> (f64, bool) {
        let [t1, t2, d1, d2] = self.state;
        let ns = rk4([t1, t2, d1, d2, AVAIL_TORQUE[action]], DT);
        self.state = [
            wrap(ns[0], -PI, PI),
            wrap(ns[1], -PI, PI),
            ns[2].clamp(-MAX_VEL_1, MAX_VEL_1),
            ns[3].clamp(-MAX_VEL_2, MAX_VEL_2),
        ];
        let terminated = self.at_goal();
        (if terminated { 0.0 } else { -1.0 }, terminated)
    }

    fn at_goal(&self) -> bool {
        let [t1, t2, ..] = self.state;
        -t1.cos() - (t2 + t1).cos() > 1.0
    }

    pub fn observe(&self, out: &mut [f64]) {
        let [t1, t2, d1, d2] = self.state;
        out.copy_from_slice(&[t1.cos(), t1.sin(), t2.cos(), t2.sin(), d1, d2]);
    }
}
