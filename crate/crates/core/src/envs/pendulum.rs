//! Torque-limited pendulum swing-up. No termination; the episode ends at the
//! step limit.
//!
//! State `[theta, theta_dot]`; observation `[cos theta, sin theta, theta_dot]`.
//! Reward `-(angle_normalize(theta)^2 + 0.1 theta_dot^2 + 0.001 u^2)`.

use std::f64::consts::PI;

use crate::rng::RngStream;

pub const MAX_SPEED: f64 = 8.0;
pub const MAX_TORQUE: f64 = 2.0;
pub const DT: f64 = 0.05;
pub const G: f64 = 10.0;
pub const MASS: f64 = 1.0;
pub const LENGTH: f64 = 1.0;

pub fn angle_normalize(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

#[derive(Debug, Clone, Default)]
pub struct Pendulum {
    pub state: [f64; 2],
}

impl Pendulum {
    pub fn reset(&mut self, rng: &mut RngStream) {
        self.state = [rng.uniform(-PI, PI), rng.uniform(-1.0, 1.0)];
    }

    pub fn step(&mut self, torque: f64) -> (f64, bool) {
        let [th, thdot] = self.state;
        let u = torque.clamp(-MAX_TORQUE, MAX_TORQUE);
        let costs = angle_normalize(th).powi(2) + 0.1 * thdot * thdot + 0.001 * (u * u);
        let newthdot =
            thdot + (3.0 * G / (2.0 * LENGTH) * th.sin() + 3.0 / (MASS * LENGTH * LENGTH) * u) * DT;
        let newthdot = newthdot.clamp(-MAX_SPEED, MAX_SPEED);
        let newth = th + newthdot * DT;
        self.state = [newth, newthdot];
        (-costs, false)
    }

    pub fn observe(&self, out: &mut [f64]) {
        let [th, thdot] = self.state;
        out.copy_from_slice(&[th.cos(), th.sin(), thdot]);
    }
}
