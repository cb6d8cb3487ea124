use crate::error::{Error, Result};

/// Dense row-major tensor of arbitrary rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Tensor {
        Tensor {
            shape: shape.to_vec(),
            data: vec![0.0; shape.iter().product()],
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Result<Tensor> {
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(Error::DimensionMismatch {
                what: "tensor data length",
                expected: n,
                got: data.len(),
            });
        }
        Ok(Tensor {
            shape: shape.to_vec(),
            data,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &n)| {
                debug_assert!(i < n);
                acc * n + i
            })
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.shape, other.shape);
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.shape, other.shape);
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Permutes axes: output axis `k` is input axis `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Tensor {
        assert_eq!(perm.len(), self.rank());
        let shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let mut out = Tensor::zeros(&shape);
        let mut src = vec![0; self.rank()];
        for_each_index(&shape, |idx| {
            for (k, &p) in perm.iter().enumerate() {
                src[p] = idx[k];
            }
            let v = self.get(&src);
            out.set(idx, v);
        });
        out
    }
}

/// Visits every multi-index of `shape` in row-major order.
pub fn for_each_index(shape: &[usize], mut f: impl FnMut(&[usize])) {
    if shape.contains(&0) {
        return;
    }
    let mut idx = vec![0; shape.len()];
    loop {
        f(&idx);
        let mut k = shape.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < shape[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Sums over paired axes `(axis of a, axis of b)`. The result carries the
/// free axes of `a` followed by the free axes of `b`.
pub fn contract(a: &Tensor, b: &Tensor, axes: &[(usize, usize)]) -> Result<Tensor> {
    for &(i, j) in axes {
        if i >= a.rank() || j >= b.rank() {
            return Err(Error::InvalidArgument(format!(
                "contraction axis ({i},{j}) out of range"
            )));
        }
        if a.shape[i] != b.shape[j] {
            return Err(Error::DimensionMismatch {
                what: "contracted axis length",
                expected: a.shape[i],
                got: b.shape[j],
            });
        }
    }
    let a_free: Vec<usize> = (0..a.rank()).filter(|k| !axes.iter().any(|p| p.0 == *k)).collect();
    let b_free: Vec<usize> = (0..b.rank()).filter(|k| !axes.iter().any(|p| p.1 == *k)).collect();
    let sum_shape: Vec<usize> = axes.iter().map(|&(i, _)| a.shape[i]).collect();
    let out_shape: Vec<usize> = a_free
        .iter()
        .map(|&k| a.shape[k])
        .chain(b_free.iter().map(|&k| b.shape[k]))
        .collect();

    let mut out = Tensor::zeros(&out_shape);
    let mut ai = vec![0; a.rank()];
    let mut bi = vec![0; b.rank()];
    let nfa = a_free.len();
    for_each_index(&out_shape, |oidx| {
        for (k, &ax) in a_free.iter().enumerate() {
            ai[ax] = oidx[k];
        }
        for (k, &ax) in b_free.iter().enumerate() {
            bi[ax] = oidx[nfa + k];
        }
        let mut s = 0.0;
        if sum_shape.is_empty() {
            s = a.get(&ai) * b.get(&bi);
        } else {
            for_each_index(&sum_shape, |sidx| {
                for (k, &(ia, ib)) in axes.iter().enumerate() {
                    ai[ia] = sidx[k];
                    bi[ib] = sidx[k];
                }
                s += a.get(&ai) * b.get(&bi);
            });
        }
        out.set(oidx, s);
    });
    Ok(out)
}
