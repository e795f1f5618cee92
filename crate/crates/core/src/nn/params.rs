//! Named parameter storage and the Adam optimizer.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::NnError;
use crate::nn::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId(usize);

impl ParamId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Parameters keyed by stable dotted paths such as `layers.0.upd.0.w`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamStore {
    names: Vec<String>,
    values: Vec<Matrix>,
    index: BTreeMap<String, ParamId>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a parameter; re-registering a path replaces its value.
    pub fn insert(&mut self, name: impl Into<String>, value: Matrix) -> ParamId {
        let name = name.into();
        if let Some(&id) = self.index.get(&name) {
            self.values[id.0] = value;
            return id;
        }
        let id = ParamId(self.values.len());
        self.index.insert(name.clone(), id);
        self.names.push(name);
        self.values.push(value);
        id
    }

    pub fn id(&self, name: &str) -> Result<ParamId, NnError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| NnError::UnknownParameter(name.to_string()))
    }

    pub fn value(&self, id: ParamId) -> &Matrix {
        &self.values[id.0]
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut Matrix {
        &mut self.values[id.0]
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> {
        (0..self.values.len()).map(ParamId)
    }

    /// Total scalar count.
    pub fn num_scalars(&self) -> usize {
        self.values.iter().map(Matrix::len).sum()
    }

    /// Parameters in path order, for serialization.
    pub fn to_map(&self) -> BTreeMap<String, Matrix> {
        self.index
            .iter()
            .map(|(k, &id)| (k.clone(), self.values[id.0].clone()))
            .collect()
    }
}

/// Uniform `U(-1/sqrt(fan_in), 1/sqrt(fan_in))` initialization.
pub fn init_uniform<R: Rng>(rng: &mut R, rows: usize, cols: usize, fan_in: usize) -> Matrix {
    let bound = 1.0 / (fan_in.max(1) as f64).sqrt();
    Matrix::from_vec(
        rows,
        cols,
        (0..rows * cols)
            .map(|_| rng.gen_range(-bound..bound))
            .collect(),
    )
}

/// Adam hyper-parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment estimates for every parameter.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub config: AdamConfig,
    m: Vec<Matrix>,
    v: Vec<Matrix>,
    t: u64,
}

impl AdamState {
    pub fn new(store: &ParamStore, config: AdamConfig) -> Self {
        let zeros: Vec<Matrix> = store
            .ids()
            .map(|id| {
                let (r, c) = store.value(id).shape();
                Matrix::zeros(r, c)
            })
            .collect();
        Self {
            config,
            m: zeros.clone(),
            v: zeros,
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// One bias-corrected Adam update of every parameter.
    pub fn step(
        &mut self,
        store: &mut ParamStore,
        grads: &[Matrix],
        lr: f64,
    ) -> Result<(), NnError> {
        if grads.len() != store.len() || self.m.len() != store.len() {
            return Err(NnError::Shape {
                op: "adam",
                detail: format!("{} grads for {} params", grads.len(), store.len()),
            });
        }
        for (id, g) in store.ids().zip(grads) {
            if !g.all_finite() {
                return Err(NnError::NonFiniteGradient(store.name(id).to_string()));
            }
        }
        self.t += 1;
        let AdamConfig { beta1, beta2, eps } = self.config;
        let c1 = 1.0 - beta1.powi(self.t as i32);
        let c2 = 1.0 - beta2.powi(self.t as i32);
        for (i, g) in grads.iter().enumerate() {
            let w = store.values[i].data_mut();
            let m = self.m[i].data_mut();
            let v = self.v[i].data_mut();
            for j in 0..w.len() {
                let gj = g.data()[j];
                m[j] = beta1 * m[j] + (1.0 - beta1) * gj;
                v[j] = beta2 * v[j] + (1.0 - beta2) * gj * gj;
                let mhat = m[j] / c1;
                let vhat = v[j] / c2;
                w[j] -= lr * mhat / (vhat.sqrt() + eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_store(w: f64) -> (ParamStore, ParamId) {
        let mut s = ParamStore::new();
        let id = s.insert("w", Matrix::from_vec(1, 1, vec![w]));
        (s, id)
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let (mut s, id) = scalar_store(1.25);
        let mut adam = AdamState::new(&s, AdamConfig::default());
        adam.step(&mut s, &[Matrix::zeros(1, 1)], 0.1).unwrap();
        assert_eq!(s.value(id).get(0, 0), 1.25);
    }

    #[test]
    fn first_step_moves_by_lr_against_sign() {
        for g in [0.3, -7.0] {
            let (mut s, id) = scalar_store(0.0);
            let mut adam = AdamState::new(&s, AdamConfig::default());
            adam.step(&mut s, &[Matrix::from_vec(1, 1, vec![g])], 0.01)
                .unwrap();
            let moved = s.value(id).get(0, 0);
            assert!((moved + 0.01 * g.signum()).abs() < 1e-8, "{moved}");
        }
    }

    #[test]
    fn converges_on_quadratic() {
        let (mut s, id) = scalar_store(0.0);
        let mut adam = AdamState::new(&s, AdamConfig::default());
        for _ in 0..100 {
            let w = s.value(id).get(0, 0);
            adam.step(
                &mut s,
                &[Matrix::from_vec(1, 1, vec![2.0 * (w - 3.0)])],
                0.3,
            )
            .unwrap();
        }
        assert!(
            (s.value(id).get(0, 0) - 3.0).abs() < 1e-2,
            "{}",
            s.value(id).get(0, 0)
        );
    }

    #[test]
    fn non_finite_gradient_names_parameter() {
        let (mut s, _) = scalar_store(0.0);
        let mut adam = AdamState::new(&s, AdamConfig::default());
        let err = adam
            .step(&mut s, &[Matrix::from_vec(1, 1, vec![f64::INFINITY])], 0.1)
            .unwrap_err();
        assert_eq!(err, NnError::NonFiniteGradient("w".into()));
    }

    #[test]
    fn reinsert_replaces() {
        let mut s = ParamStore::new();
        let a = s.insert("a", Matrix::zeros(1, 1));
        let b = s.insert("a", Matrix::filled(1, 1, 2.0));
        assert_eq!(a, b);
        assert_eq!(s.len(), 1);
        assert!(s.id("missing").is_err());
    }
}
