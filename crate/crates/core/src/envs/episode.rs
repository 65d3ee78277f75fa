use super::{Action, ActionSpace, EnvInstance, EnvSpec, RunningStandardizer};
use crate::error::{Error, Result};
use crate::netgraph::{ActivationState, DynamicNet, ForwardPlan};

/// Maps non-negative network outputs to an action.
///
/// Discrete spaces take the index of the largest output (lowest index on
/// ties). Continuous spaces clip each output to `[0, 1]` and scale it
/// affinely onto `[low, high]`.
pub fn decode_action(raw: &[f64], space: &ActionSpace) -> Result<Action> {
    if raw.len() != space.arity() {
        return Err(Error::DimensionMismatch {
            expected: space.arity(),
            actual: raw.len(),
        });
    }
    Ok(match space {
        ActionSpace::Discrete(_) => {
            let mut best = 0;
            for (i, &v) in raw.iter().enumerate().skip(1) {
                if v > raw[best] {
                    best = i;
                }
            }
            Action::Discrete(best)
        }
        ActionSpace::Continuous { low, high } => Action::Continuous(
            raw.iter()
                .zip(low.iter().zip(high))
                // max/min rather than clamp: a NaN output maps to `low` instead of propagating
                .map(|(&r, (&lo, &hi))| {
                    #[allow(clippy::manual_clamp)]
                    let unit = r.max(0.0).min(1.0);
                    unit * (hi - lo) + lo
                })
                .collect(),
        ),
    })
}

fn check_dims(net: &DynamicNet, spec: &EnvSpec) -> Result<()> {
    if net.d_input() != spec.obs_dim {
        return Err(Error::DimensionMismatch {
            expected: spec.obs_dim,
            actual: net.d_input(),
        });
    }
    if net.d_output() != spec.action_space.arity() {
        return Err(Error::DimensionMismatch {
            expected: spec.action_space.arity(),
            actual: net.d_output(),
        });
    }
    Ok(())
}

/// Runs one episode from `seed` and returns the summed reward. The
/// activation state is reset first; when `standardizer` is given every
/// observation updates it and is then standardized.
pub fn run_episode(
    plan: &ForwardPlan,
    activations: &mut ActivationState,
    env: &mut EnvInstance,
    mut standardizer: Option<&mut RunningStandardizer>,
    seed: u64,
) -> Result<f64> {
    let space = env.spec().action_space.clone();
    let mut obs = vec![0.0; env.spec().obs_dim];
    let mut raw = vec![0.0; space.arity()];
    activations.reset();
    env.reset(seed);
    let mut total = 0.0;
    loop {
        env.observe_into(&mut obs);
        if let Some(s) = standardizer.as_deref_mut() {
            s.update(&obs)?;
            s.apply_in_place(&mut obs);
        }
        plan.forward_into(activations, &obs, &mut raw);
        let action = decode_action(&raw, &space)?;
        let (reward, done) = env.advance(&action)?;
        total += reward;
        if done {
            return Ok(total);
        }
    }
}

/// Mean episode return over `seeds`, one episode per seed.
pub fn run_episode_set(
    net: &DynamicNet,
    spec: &EnvSpec,
    standardizer: &mut RunningStandardizer,
    seeds: &[u64],
) -> Result<f64> {
    check_dims(net, spec)?;
    if seeds.len() != spec.episodes_per_eval {
        return Err(Error::DimensionMismatch {
            expected: spec.episodes_per_eval,
            actual: seeds.len(),
        });
    }
    let plan = ForwardPlan::new(net);
    let mut activations = plan.new_state();
    let mut env = EnvInstance::new(spec.task);
    let mut sum = 0.0;
    for &seed in seeds {
        let std = spec.standardize_inputs.then_some(&mut *standardizer);
        sum += run_episode(&plan, &mut activations, &mut env, std, seed)?;
    }
    Ok(sum / seeds.len() as f64)
}
