//! Under-powered car in a valley, discrete and continuous variants.
//!
//! State `[position, velocity]`. The continuous variant stores its state in
//! single precision after every step, as the reference implementation does.

use crate::rng::RngStream;

pub const MIN_POSITION: f64 = -1.2;
pub const MAX_POSITION: f64 = 0.6;
pub const MAX_SPEED: f64 = 0.07;
pub const GOAL_POSITION: f64 = 0.5;
pub const CONTINUOUS_GOAL_POSITION: f64 = 0.45;
pub const GOAL_VELOCITY: f64 = 0.0;
pub const FORCE: f64 = 0.001;
pub const GRAVITY: f64 = 0.0025;
pub const POWER: f64 = 0.0015;

fn reset_state(rng: &mut RngStream) -> [f64; 2] {
    [rng.uniform(-0.6, -0.4), 0.0]
}

fn integrate(position: f64, velocity: f64) -> (f64, f64) {
    let velocity = velocity.clamp(-MAX_SPEED, MAX_SPEED);
    let position = (position + velocity).clamp(MIN_POSITION, MAX_POSITION);
    let velocity = if position == MIN_POSITION && velocity < 0.0 {
        0.0
    } else {
        velocity
    };
    (position, velocity)
}

/// Actions: 0 push left, 1 no push, 2 push right. Reward -1 per step.
#[derive(Debug, Clone, Default)]
pub struct MountainCar {
    pub state: [f64; 2],
}

impl MountainCar {
    pub fn reset(&mut self, rng: &mut RngStream) {
        self.state = reset_state(rng);
    }

    pub fn step(&mut self, action: usize) -> (f64, bool) {
        let [position, velocity] = self.state;
        let velocity =
            velocity + (action as f64 - 1.0) * FORCE + (3.0 * position).cos() * (-GRAVITY);
        let (position, velocity) = integrate(position, velocity);
        self.state = [position, velocity];
        let terminated = position >= GOAL_POSITION && velocity >= GOAL_VELOCITY;
        (-1.0, terminated)
    }

    pub fn observe(&self, out: &mut [f64]) {
        out.copy_from_slice(&self.state);
    }
}

/// Force in `[-1, 1]`. Reward `-0.1 * force^2` per step plus 100 on reaching the goal.
#[derive(Debug, Clone, Default)]
pub struct MountainCarContinuous {
    pub state: [f64; 2],
}

impl MountainCarContinuous {
    pub fn reset(&mut self, rng: &mut RngStream) {
        self.state = reset_state(rng);
    }

    pub fn step(&mut self, action: f64) -> (f64, bool) {
        let [position, velocity] = self.state;
        let force = action.clamp(-1.0, 1.0);
        let velocity = velocity + force * POWER - GRAVITY * (3.0 * position).cos();
        let (position, velocity) = integrate(position, velocity);
        self.state = [position as f32 as f64, velocity as f32 as f64];
        let [position, velocity] = self.state;
        let terminated = position >= CONTINUOUS_GOAL_POSITION && velocity >= GOAL_VELOCITY;
        let mut reward = if terminated { 100.0 } else { 0.0 };
        reward -= action * action * 0.1;
        (reward, terminated)
    }

    pub fn observe(&self, out: &mut [f64]) {
        out.copy_from_slice(&self.state);
    }
}
