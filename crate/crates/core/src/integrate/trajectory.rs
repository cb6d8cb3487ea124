use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Scalar;
use crate::autodiff::Jet;
use crate::error::{Error, Result};

/// Uniform time grid with one state vector per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T = f64> {
    pub times: Vec<f64>,
    pub states: Vec<Vec<T>>,
}

impl<T> Trajectory<T> {
    pub fn with_capacity(n_steps: usize) -> Self {
        Trajectory {
            times: Vec::with_capacity(n_steps + 1),
            states: Vec::with_capacity(n_steps + 1),
        }
    }

    pub fn push(&mut self, t: f64, state: Vec<T>) {
        self.times.push(t);
        self.states.push(state);
    }

    pub fn n_steps(&self) -> usize {
        self.times.len().saturating_sub(1)
    }

    pub fn state_dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn last(&self) -> &[T] {
        self.states.last().expect("trajectory has at least one state")
    }

    pub fn dt(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    /// Applies `f` to every state.
    pub fn map<U>(&self, mut f: impl FnMut(&[T]) -> Vec<U>) -> Trajectory<U> {
        Trajectory {
            times: self.times.clone(),
            states: self.states.iter().map(|s| f(s)).collect(),
        }
    }

    /// Keeps components `range` of every state.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Trajectory<T>
    where
        T: Clone,
    {
        self.map(|s| s[range.clone()].to_vec())
    }
}

impl<T: Scalar> Trajectory<T> {
    /// Drops derivative information.
    pub fn values(&self) -> Trajectory<f64> {
        self.map(|s| s.iter().map(Scalar::value).collect())
    }
}

impl Trajectory<Jet> {
    /// Final state as jets.
    pub fn final_jets(&self) -> &[Jet] {
        self.last()
    }
}

impl Trajectory<f64> {
    /// CSV with header `t,s0,s1,...`, one row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for i in 0..self.state_dim() {
            let _ = write!(out, ",s{i}");
        }
        out.push('\n');
        for (t, s) in self.times.iter().zip(&self.states) {
            let _ = write!(out, "{t:e}");
            for v in s {
                let _ = write!(out, ",{v:e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty csv".into()))?;
        let cols = header.split(',').count();
        if !header.starts_with('t') {
            return Err(Error::Parse("csv header must start with t".into()));
        }
        let mut traj = Trajectory::with_capacity(0);
        for (ln, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let vals = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("row {}: {e}", ln + 1)))?;
            if vals.len() != cols {
                return Err(Error::Parse(format!("row {} has {} fields", ln + 1, vals.len())));
            }
            traj.push(vals[0], vals[1..].to_vec());
        }
        Ok(traj)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Writes CSV or JSON depending on the file extension.
    pub fn write(&self, path: &Path) -> Result<()> {
        let text = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => self.to_json()?,
            _ => self.to_csv(),
        };
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Largest deviation of the grid from `t_k = k T / n`.
    pub fn grid_error(&self) -> f64 {
        let n = self.n_steps();
        let t_end = *self.times.last().unwrap_or(&0.0);
        self.times
            .iter()
            .enumerate()
            .map(|(k, t)| (t - t_end * k as f64 / n.max(1) as f64).abs())
            .fold(0.0, f64::max)
    }
}
