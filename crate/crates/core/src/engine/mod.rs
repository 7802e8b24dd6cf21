//! Time-ordered propagation and end-to-end gate experiments.

mod experiment;
mod propagate;

pub use experiment::{
    average_cardinal_fidelity, cardinal_states, cardinal_states_1q, gate_state_fidelity, reduced_state,
    run_1q_experiment, run_2q_experiment, system_propagator_2q, SimulationOutcome, TrajectoryPoint,
};
pub use propagate::{propagate, propagate_steps, Integrator, Propagation, SimulationConfig, MIN_STEPS};
