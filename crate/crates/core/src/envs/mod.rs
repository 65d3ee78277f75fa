//! Classic-control tasks, action decoding, input standardization and the
//! episode runner that turns a network into a fitness value.

mod acrobot;
mod cartpole;
mod episode;
mod mountain_car;
mod pendulum;
mod standardizer;

use crate::error::{Error, Result};
use crate::rng::RngStream;

pub use acrobot::Acrobot;
pub use cartpole::CartPole;
pub use episode::{decode_action, run_episode, run_episode_set};
pub use mountain_car::{MountainCar, MountainCarContinuous};
pub use pendulum::{angle_normalize, Pendulum};
pub use standardizer::{RunningStandardizer, STANDARDIZE_EPSILON};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    CartPole,
    Acrobot,
    MountainCar,
    MountainCarContinuous,
    Pendulum,
}

impl Task {
    pub const ALL: [Task; 5] = [
        Task::CartPole,
        Task::Acrobot,
        Task::MountainCar,
        Task::MountainCarContinuous,
        Task::Pendulum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::CartPole => "CartPole-v1",
            Task::Acrobot => "Acrobot-v1",
            Task::MountainCar => "MountainCar-v0",
            Task::MountainCarContinuous => "MountainCarContinuous-v0",
            Task::Pendulum => "Pendulum-v1",
        }
    }

    pub fn supported_names() -> Vec<&'static str> {
        Self::ALL.iter().map(|t| t.name()).collect()
    }

    pub fn from_name(name: &str) -> Result<Task> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == name)
            .ok_or_else(|| Error::UnknownTask {
                name: name.to_string(),
                supported: Self::supported_names(),
            })
    }

    pub fn spec(self) -> EnvSpec {
        let (obs_dim, action_space, max_steps) = match self {
            Task::CartPole => (4, ActionSpace::Discrete(2), 500),
            Task::Acrobot => (6, ActionSpace::Discrete(3), 500),
            Task::MountainCar => (2, ActionSpace::Discrete(3), 200),
            Task::MountainCarContinuous => (2, ActionSpace::continuous(vec![-1.0], vec![1.0]), 999),
            Task::Pendulum => (3, ActionSpace::continuous(vec![-2.0], vec![2.0]), 200),
        };
        let pendulum = self == Task::Pendulum;
        EnvSpec {
            task: self,
            obs_dim,
            action_space,
            max_steps,
            episodes_per_eval: if pendulum { 5 } else { 1 },
            standardize_inputs: pendulum,
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ActionSpace {
    Discrete(usize),
    Continuous { low: Vec<f64>, high: Vec<f64> },
}

impl ActionSpace {
    fn continuous(low: Vec<f64>, high: Vec<f64>) -> Self {
        debug_assert!(low.iter().zip(&high).all(|(l, h)| l < h));
        ActionSpace::Continuous { low, high }
    }

    /// Number of network outputs needed to drive this space.
    pub fn arity(&self) -> usize {
        match self {
            ActionSpace::Discrete(n) => *n,
            ActionSpace::Continuous { low, .. } => low.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Discrete(usize),
    Continuous(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvSpec {
    pub task: Task,
    pub obs_dim: usize,
    pub action_space: ActionSpace,
    pub max_steps: usize,
    pub episodes_per_eval: usize,
    pub standardize_inputs: bool,
}

impl EnvSpec {
    pub fn for_task(name: &str) -> Result<Self> {
        Ok(Task::from_name(name)?.spec())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Vec<f64>,
    pub reward: f64,
    pub done: bool,
}

#[derive(Debug, Clone)]
enum Physics {
    CartPole(CartPole),
    Acrobot(Acrobot),
    MountainCar(MountainCar),
    MountainCarContinuous(MountainCarContinuous),
    Pendulum(Pendulum),
}

/// One environment with its step counter. All dynamics are deterministic;
/// randomness enters only through [`EnvInstance::reset`].
#[derive(Debug, Clone)]
pub struct EnvInstance {
    spec: EnvSpec,
    physics: Physics,
    steps: usize,
    done: bool,
}

/// Builds the named task and resets it with `seed`.
pub fn make_env(name: &str, seed: u64) -> Result<EnvInstance> {
    let mut env = EnvInstance::new(Task::from_name(name)?);
    env.reset(seed);
    Ok(env)
}

impl EnvInstance {
    pub fn new(task: Task) -> Self {
        let physics = match task {
            Task::CartPole => Physics::CartPole(CartPole::default()),
            Task::Acrobot => Physics::Acrobot(Acrobot::default()),
            Task::MountainCar => Physics::MountainCar(MountainCar::default()),
            Task::MountainCarContinuous => {
                Physics::MountainCarContinuous(MountainCarContinuous::default())
            }
            Task::Pendulum => Physics::Pendulum(Pendulum::default()),
        };
        Self {
            spec: task.spec(),
            physics,
            steps: 0,
            done: false,
        }
    }

    pub fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    /// Samples a fresh initial state from `seed` and returns the first observation.
    pub fn reset(&mut self, seed: u64) -> Vec<f64> {
        let mut rng = RngStream::from_seed(seed);
        match &mut self.physics {
            Physics::CartPole(p) => p.reset(&mut rng),
            Physics::Acrobot(p) => p.reset(&mut rng),
            Physics::MountainCar(p) => p.reset(&mut rng),
            Physics::MountainCarContinuous(p) => p.reset(&mut rng),
            Physics::Pendulum(p) => p.reset(&mut rng),
        }
        self.steps = 0;
        self.done = false;
        self.observation()
    }

    /// Raw physics state (not the observation).
    pub fn state(&self) -> Vec<f64> {
        match &self.physics {
            Physics::CartPole(p) => p.state.to_vec(),
            Physics::Acrobot(p) => p.state.to_vec(),
            Physics::MountainCar(p) => p.state.to_vec(),
            Physics::MountainCarContinuous(p) => p.state.to_vec(),
            Physics::Pendulum(p) => p.state.to_vec(),
        }
    }

    /// Overwrites the physics state and starts a new episode from it.
    pub fn set_state(&mut self, state: &[f64]) -> Result<()> {
        fn fill<const N: usize>(dst: &mut [f64; N], src: &[f64]) -> Result<()> {
            *dst = src.try_into().map_err(|_| Error::DimensionMismatch {
                expected: N,
                actual: src.len(),
            })?;
            Ok(())
        }
        match &mut self.physics {
            Physics::CartPole(p) => fill(&mut p.state, state)?,
            Physics::Acrobot(p) => fill(&mut p.state, state)?,
            Physics::MountainCar(p) => fill(&mut p.state, state)?,
            Physics::MountainCarContinuous(p) => fill(&mut p.state, state)?,
            Physics::Pendulum(p) => fill(&mut p.state, state)?,
        }
        self.steps = 0;
        self.done = false;
        Ok(())
    }

    pub fn observation(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.spec.obs_dim];
        self.observe_into(&mut out);
        out
    }

    pub fn observe_into(&self, out: &mut [f64]) {
        match &self.physics {
            Physics::CartPole(p) => p.observe(out),
            Physics::Acrobot(p) => p.observe(out),
            Physics::MountainCar(p) => p.observe(out),
            Physics::MountainCarContinuous(p) => p.observe(out),
            Physics::Pendulum(p) => p.observe(out),
        }
    }

    pub fn step(&mut self, action: &Action) -> Result<StepResult> {
        let (reward, done) = self.advance(action)?;
        Ok(StepResult {
            observation: self.observation(),
            reward,
            done,
        })
    }

    /// Advances one timestep; returns `(reward, done)` without building an
    /// observation vector.
    pub fn advance(&mut self, action: &Action) -> Result<(f64, bool)> {
        if self.done {
            return Err(Error::EpisodeDone);
        }
        let task = self.spec.task.name();
        let bad = |reason: String| Error::InvalidAction { task, reason };
        let (reward, terminated) = match (&mut self.physics, action) {
            (Physics::CartPole(p), &Action::Discrete(a)) if a < 2 => p.step(a),
            (Physics::Acrobot(p), &Action::Discrete(a)) if a < 3 => p.step(a),
            (Physics::MountainCar(p), &Action::Discrete(a)) if a < 3 => p.step(a),
            (Physics::MountainCarContinuous(p), Action::Continuous(a)) if a.len() == 1 => {
                p.step(a[0])
            }
            (Physics::Pendulum(p), Action::Continuous(a)) if a.len() == 1 => p.step(a[0]),
            (_, a) => {
                return Err(bad(format!(
                    "{a:?} does not fit {:?}",
                    self.spec.action_space
                )))
            }
        };
        self.steps += 1;
        self.done = terminated || self.steps >= self.spec.max_steps;
        Ok((reward, self.done))
    }
}
