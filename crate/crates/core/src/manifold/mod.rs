//! Chart-based manifolds and the geometry derived from them.
//!
//! A [`Manifold`] is built from exactly one of an embedding `F`, a metric
//! `g(x)` or a cometric `g*(x)`, each given as a [`SmoothMap`]. Everything
//! else (connection, curvature, Hamiltonian) is obtained by evaluating that
//! map on jets. Quantities can also be evaluated at jet-valued points, which
//! is how sensitivities flow through geodesic integrators.

mod builtin;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::autodiff::{linalg, max_order, Composer, Jet, SmoothMap};
use crate::error::{Error, Result};
use crate::numkernel::{DenseMatrix, Tensor};

pub use builtin::{ellipsoid, euclidean, from_id, sphere_stereographic};

/// Where the Riemannian structure comes from.
#[derive(Clone, Debug)]
pub enum MetricSource {
    /// `F: R^d → R^D`, with `g = dFᵀ dF`.
    Embedding(SmoothMap),
    /// `x ↦ g(x)`, row-major `d×d` output.
    Metric(SmoothMap),
    /// `x ↦ g*(x)`, row-major `d×d` output.
    Cometric(SmoothMap),
}

type Validity = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;
type Field = Arc<dyn Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync>;

/// A `d`-dimensional manifold in a single chart.
#[derive(Clone)]
pub struct Manifold {
    id: String,
    dim: usize,
    source: MetricSource,
    validity: Validity,
    hamiltonian_field: Option<Field>,
}

impl fmt::Debug for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Manifold")
            .field("id", &self.id)
            .field("dim", &self.dim)
            .field("source", &self.source)
            .finish()
    }
}

/// A tangent vector with its base point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tangent {
    pub base: Vec<f64>,
    pub components: Vec<f64>,
}

/// A cotangent vector (momentum) with its base point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cotangent {
    pub base: Vec<f64>,
    pub components: Vec<f64>,
}

fn index3(d: usize, a: usize, b: usize, c: usize) -> usize {
    (a * d + b) * d + c
}

impl Manifold {
    fn with_source(id: impl Into<String>, dim: usize, source: MetricSource) -> Result<Manifold> {
        let (din, dout) = match &source {
            MetricSource::Embedding(f) => (f.domain_dim(), None),
            MetricSource::Metric(f) | MetricSource::Cometric(f) => {
                (f.domain_dim(), Some(f.codomain_dim()))
            }
        };
        if din != dim {
            return Err(Error::DimensionMismatch {
                what: "chart dimension",
                expected: dim,
                got: din,
            });
        }
        if let Some(n) = dout {
            if n != dim * dim {
                return Err(Error::DimensionMismatch {
                    what: "(co)metric output",
                    expected: dim * dim,
                    got: n,
                });
            }
        }
        Ok(Manifold {
            id: id.into(),
            dim,
            source,
            validity: Arc::new(|x: &[f64]| x.iter().all(|v| v.is_finite())),
            hamiltonian_field: None,
        })
    }

    /// Manifold with the metric pulled back through the embedding `f`.
    pub fn from_embedding(id: impl Into<String>, f: SmoothMap) -> Result<Manifold> {
        let d = f.domain_dim();
        Manifold::with_source(id, d, MetricSource::Embedding(f))
    }

    pub fn from_metric(id: impl Into<String>, dim: usize, g: SmoothMap) -> Result<Manifold> {
        Manifold::with_source(id, dim, MetricSource::Metric(g))
    }

    pub fn from_cometric(id: impl Into<String>, dim: usize, gstar: SmoothMap) -> Result<Manifold> {
        Manifold::with_source(id, dim, MetricSource::Cometric(gstar))
    }

    /// Restricts the chart to points where `pred` holds (finite points only
    /// by default).
    pub fn with_validity<P>(mut self, pred: P) -> Manifold
    where
        P: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        self.validity = Arc::new(pred);
        self
    }

    /// Installs a closed-form Hamiltonian vector field on `(q, p)` states,
    /// used instead of differentiating `½ pᵀ g*(q) p` by jets. It must agree
    /// with that Hamiltonian.
    pub fn with_hamiltonian_field<F>(mut self, field: F) -> Manifold
    where
        F: Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync + 'static,
    {
        self.hamiltonian_field = Some(Arc::new(field));
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source(&self) -> &MetricSource {
        &self.source
    }

    pub fn embedding(&self) -> Option<&SmoothMap> {
        match &self.source {
            MetricSource::Embedding(f) => Some(f),
            _ => None,
        }
    }

    pub fn is_valid(&self, x: &[f64]) -> bool {
        x.len() == self.dim && (self.validity)(x)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                what: "chart point",
                expected: self.dim,
                got: x.len(),
            });
        }
        if !(self.validity)(x) {
            return Err(Error::InvalidArgument(format!(
                "point {x:?} is outside the chart of {}",
                self.id
            )));
        }
        Ok(())
    }

    /// `F(x)` for embedded manifolds.
    pub fn embed(&self, x: &[f64]) -> Result<Option<Vec<f64>>> {
        match self.embedding() {
            Some(f) => Ok(Some(f.eval_f64(x)?)),
            None => Ok(None),
        }
    }

    /// Pushes a chart tangent vector forward to the ambient space, `dF(x) v`.
    pub fn push_forward(&self, x: &[f64], v: &[f64]) -> Result<Option<Vec<f64>>> {
        match self.embedding() {
            Some(f) => Ok(Some(crate::autodiff::jacobian(f, x)?.matvec(v)?)),
            None => Ok(None),
        }
    }

    /// Local expansion of `g_ij` around `x` to the given order, one jet in the
    /// chart variables per entry (row-major).
    pub fn metric_expansion(&self, x: &[f64], order: usize) -> Result<Vec<Jet>> {
        self.check_point(x)?;
        let d = self.dim;
        match &self.source {
            MetricSource::Embedding(f) => {
                let fx = full_taylor(f, x, order + 1)?;
                let df: Vec<Vec<Jet>> = fx
                    .iter()
                    .map(|fa| (0..d).map(|i| fa.partial(i)).collect())
                    .collect();
                let mut g: Vec<Jet> = Vec::with_capacity(d * d);
                for i in 0..d {
                    for j in 0..d {
                        if j < i {
                            let gji: Jet = g[j * d + i].clone();
                            g.push(gji);
                            continue;
                        }
                        let mut acc = &df[0][i] * &df[0][j];
                        for row in &df[1..] {
                            acc.add_product(&row[i], &row[j]);
                        }
                        g.push(acc);
                    }
                }
                Ok(g)
            }
            MetricSource::Metric(m) => full_taylor(m, x, order),
            MetricSource::Cometric(c) => linalg::inverse(&full_taylor(c, x, order)?, d),
        }
    }

    /// Local expansion of `g^ij` around `x`.
    pub fn cometric_expansion(&self, x: &[f64], order: usize) -> Result<Vec<Jet>> {
        match &self.source {
            MetricSource::Cometric(c) => {
                self.check_point(x)?;
                full_taylor(c, x, order)
            }
            _ => linalg::inverse(&self.metric_expansion(x, order)?, self.dim),
        }
    }

    /// Local expansion of `Γ^k_ij` around `x`, flattened as `(k, i, j)`.
    pub fn christoffel_expansion(&self, x: &[f64], order: usize) -> Result<Vec<Jet>> {
        let d = self.dim;
        let g = self.metric_expansion(x, order + 1)?;
        let g_low: Vec<Jet> = g.iter().map(|e| e.truncate(order)).collect();
        let ginv = linalg::inverse(&g_low, d)?;
        // dg[(l, i, j)] = ∂_l g_ij
        let mut dg = Vec::with_capacity(d * d * d);
        for l in 0..d {
            for e in &g {
                dg.push(e.partial(l));
            }
        }
        // c[(l, i, j)] = ∂_i g_jl + ∂_j g_il − ∂_l g_ij
        let mut c = Vec::with_capacity(d * d * d);
        for l in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let t = &dg[index3(d, i, j, l)] + &dg[index3(d, j, i, l)];
                    c.push(t - &dg[index3(d, l, i, j)]);
                }
            }
        }
        let mut gamma: Vec<Jet> = Vec::with_capacity(d * d * d);
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    if j < i {
                        let s: Jet = gamma[index3(d, k, j, i)].clone();
                        gamma.push(s);
                        continue;
                    }
                    let mut acc = &ginv[k * d] * &c[index3(d, 0, i, j)];
                    for l in 1..d {
                        acc.add_product(&ginv[k * d + l], &c[index3(d, l, i, j)]);
                    }
                    gamma.push(acc * 0.5);
                }
            }
        }
        Ok(gamma)
    }

    fn values_to_matrix(&self, jets: &[Jet]) -> DenseMatrix {
        DenseMatrix::from_vec(self.dim, self.dim, jets.iter().map(Jet::value).collect())
            .expect("square (co)metric")
    }

    pub fn metric(&self, x: &[f64]) -> Result<DenseMatrix> {
        Ok(self.values_to_matrix(&self.metric_expansion(x, 0)?))
    }

    pub fn cometric(&self, x: &[f64]) -> Result<DenseMatrix> {
        Ok(self.values_to_matrix(&self.cometric_expansion(x, 0)?))
    }

    /// `Γ^k_ij` at `x` as a tensor of shape `[d, d, d]` indexed `(k, i, j)`.
    pub fn christoffel(&self, x: &[f64]) -> Result<Tensor> {
        let d = self.dim;
        let v = self.christoffel_expansion(x, 0)?.iter().map(Jet::value).collect();
        Tensor::from_vec(&[d, d, d], v)
    }

    fn at_jets(
        &self,
        xs: &[Jet],
        expansion: impl Fn(&[f64], usize) -> Result<Vec<Jet>>,
    ) -> Result<Vec<Jet>> {
        let point: Vec<f64> = xs.iter().map(Jet::value).collect();
        let k = max_order(xs);
        let local = expansion(&point, k)?;
        if k == 0 {
            return Ok(local.iter().map(|j| Jet::scalar(j.value())).collect());
        }
        Ok(Composer::new(xs, k).apply_all(&local))
    }

    /// `g_ij` at a jet-valued point, exact to the point's order.
    pub fn metric_at(&self, xs: &[Jet]) -> Result<Vec<Jet>> {
        self.at_jets(xs, |x, k| self.metric_expansion(x, k))
    }

    /// `g^ij` at a jet-valued point.
    pub fn cometric_at(&self, xs: &[Jet]) -> Result<Vec<Jet>> {
        self.at_jets(xs, |x, k| self.cometric_expansion(x, k))
    }

    /// `Γ^k_ij` at a jet-valued point, flattened as `(k, i, j)`.
    pub fn christoffel_at(&self, xs: &[Jet]) -> Result<Vec<Jet>> {
        self.at_jets(xs, |x, k| self.christoffel_expansion(x, k))
    }

    /// `H(q, p) = ½ pᵀ g*(q) p`.
    pub fn hamiltonian(&self, q: &[Jet], p: &[Jet]) -> Result<Jet> {
        let gs = self.cometric_at(q)?;
        Ok(linalg::quadratic_form(&gs, p) * 0.5)
    }

    /// Hamilton's equations at `(q, p)`, carrying the state's sensitivities.
    pub fn hamiltonian_vector_field(&self, state: &[Jet]) -> Result<Vec<Jet>> {
        if state.len() != 2 * self.dim {
            return Err(Error::DimensionMismatch {
                what: "hamiltonian state",
                expected: 2 * self.dim,
                got: state.len(),
            });
        }
        match &self.hamiltonian_field {
            Some(f) => f(state),
            None => crate::autodiff::hamiltonian_field(state, |q, p| self.hamiltonian(q, p)),
        }
    }

    /// `R_ijk^m` at `x`, shape `[d, d, d, d]` indexed `(i, j, k, m)`.
    pub fn riemann(&self, x: &[f64]) -> Result<Tensor> {
        let d = self.dim;
        let ge = self.christoffel_expansion(x, 1)?;
        let gv: Vec<f64> = ge.iter().map(Jet::value).collect();
        let dgam = |a: usize, m: usize, j: usize, k: usize| ge[index3(d, m, j, k)].d(a);
        let mut r = Tensor::zeros(&[d, d, d, d]);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for m in 0..d {
                        let mut s = dgam(i, m, j, k) - dgam(j, m, i, k);
                        for l in 0..d {
                            s += gv[index3(d, l, j, k)] * gv[index3(d, m, i, l)]
                                - gv[index3(d, l, i, k)] * gv[index3(d, m, j, l)];
                        }
                        r.set(&[i, j, k, m], s);
                    }
                }
            }
        }
        Ok(r)
    }

    /// `R_ij = R_kij^k`.
    pub fn ricci(&self, x: &[f64]) -> Result<DenseMatrix> {
        let r = self.riemann(x)?;
        Ok(ricci_from(&r, self.dim))
    }

    /// `S = g^ij R_ij`.
    pub fn scalar_curvature(&self, x: &[f64]) -> Result<f64> {
        let ric = self.ricci(x)?;
        let gi = self.cometric(x)?;
        Ok(ric.data().iter().zip(gi.data()).map(|(a, b)| a * b).sum())
    }

    /// Sectional curvature of the plane spanned by `e1, e2` at `x`.
    pub fn sectional(&self, x: &[f64], e1: &[f64], e2: &[f64]) -> Result<f64> {
        let d = self.dim;
        if e1.len() != d || e2.len() != d {
            return Err(Error::DimensionMismatch {
                what: "tangent vector",
                expected: d,
                got: e1.len().min(e2.len()),
            });
        }
        let g = self.metric(x)?;
        let den = g.bilinear(e1, e1) * g.bilinear(e2, e2) - g.bilinear(e1, e2).powi(2);
        if den.abs() < 1e-12 {
            return Err(Error::InvalidArgument(
                "sectional curvature needs linearly independent vectors".into(),
            ));
        }
        let r = self.riemann(x)?;
        let mut rv = vec![0.0; d];
        for_each4(d, |i, j, k, m| {
            rv[m] += r.get(&[i, j, k, m]) * e1[i] * e2[j] * e2[k];
        });
        Ok(g.bilinear(&rv, e1) / den)
    }

    /// Lowers an index: `p = g v`.
    pub fn flat(&self, v: &Tangent) -> Result<Cotangent> {
        let g = self.metric(&v.base)?;
        Ok(Cotangent {
            base: v.base.clone(),
            components: g.matvec(&v.components)?,
        })
    }

    /// Raises an index: `v = g⁻¹ p`.
    pub fn sharp(&self, p: &Cotangent) -> Result<Tangent> {
        let gi = self.cometric(&p.base)?;
        Ok(Tangent {
            base: p.base.clone(),
            components: gi.matvec(&p.components)?,
        })
    }

    /// `‖v‖_g` at `x`.
    pub fn norm(&self, x: &[f64], v: &[f64]) -> Result<f64> {
        Ok(self.metric(x)?.bilinear(v, v).max(0.0).sqrt())
    }
}

/// Taylor expansion with every output lifted into the full jet space, so
/// that outputs the user wrote as plain constants can still be differentiated.
fn full_taylor(f: &SmoothMap, x: &[f64], order: usize) -> Result<Vec<Jet>> {
    let space = crate::autodiff::JetSpace::get(x.len(), order);
    Ok(f.taylor(x, order)?.iter().map(|j| j.promote(&space)).collect())
}

pub(crate) fn ricci_from(r: &Tensor, d: usize) -> DenseMatrix {
    let mut ric = DenseMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            ric[(i, j)] = (0..d).map(|k| r.get(&[k, i, j, k])).sum();
        }
    }
    ric
}

fn for_each4(d: usize, mut f: impl FnMut(usize, usize, usize, usize)) {
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for m in 0..d {
                    f(i, j, k, m);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests;
