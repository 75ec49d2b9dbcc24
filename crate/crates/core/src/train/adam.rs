//! Adam over the flat parameter buffer.

#[derive(Debug, Clone)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 5e-5,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        AdamState {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }
}

/// One update: moment updates, bias correction, parameter step.
pub fn adam_step(params: &mut [f64], grads: &[f64], state: &mut AdamState, cfg: &AdamConfig) {
    assert_eq!(params.len(), grads.len());
    assert_eq!(params.len(), state.m.len());
    state.t += 1;
    let t = state.t as i32;
    let bc1 = 1.0 - cfg.beta1.powi(t);
    let bc2 = 1.0 - cfg.beta2.powi(t);
    for i in 0..params.len() {
        let g = grads[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        params[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_fresh_state_leaves_params_alone() {
        let mut params = vec![1.0, -2.0, 0.5];
        let grads = vec![0.0; 3];
        let mut state = AdamState::new(3);
        adam_step(&mut params, &grads, &mut state, &AdamConfig::default());
        assert_eq!(params, vec![1.0, -2.0, 0.5]);
        assert_eq!(state.step_count(), 1);
    }

    #[test]
    fn first_step_moves_by_lr_toward_minus_sign() {
        // Bias correction makes m_hat = g and v_hat = g^2 on step one, so
        // the update is lr * g / (|g| + eps) = lr * sign(g) up to epsilon.
        let cfg = AdamConfig {
            learning_rate: 0.01,
            ..AdamConfig::default()
        };
        let mut params = vec![0.0];
        let mut state = AdamState::new(1);
        adam_step(&mut params, &[3.7], &mut state, &cfg);
        assert!((params[0] + cfg.learning_rate).abs() < 1e-8);
    }

    #[test]
    fn quadratic_loss_trajectory_matches_scalar_oracle() {
        // Oracle: an independent scalar recurrence straight from the
        // update equations, driven by the gradient of 0.5 * theta^2.
        let cfg = AdamConfig {
            learning_rate: 0.005,
            ..AdamConfig::default()
        };
        let mut oracle_theta = 1.0f64;
        let (mut m, mut v) = (0.0f64, 0.0f64);
        let mut oracle_path = Vec::new();
        for t in 1..=100 {
            let g = oracle_theta;
            m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
            v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
            let m_hat = m / (1.0 - cfg.beta1.powi(t));
            let v_hat = v / (1.0 - cfg.beta2.powi(t));
            oracle_theta -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
            oracle_path.push(oracle_theta);
        }

        let mut params = vec![1.0f64];
        let mut state = AdamState::new(1);
        let mut prev = params[0].abs();
        for step in 0..100 {
            let grads = vec![params[0]];
            adam_step(&mut params, &grads, &mut state, &cfg);
            assert_eq!(params[0], oracle_path[step]);
            assert!(
                params[0].abs() < prev,
                "|theta| must strictly decrease (step {step})"
            );
            prev = params[0].abs();
        }
    }
}
