//! Dense linear algebra on jet-valued matrices (row-major `Vec<Jet>`).

use super::jet::Jet;
use crate::error::{Error, Result};

/// `A⁻¹` by Gauss–Jordan elimination with partial pivoting on the values.
pub fn inverse(a: &[Jet], n: usize) -> Result<Vec<Jet>> {
    if a.len() != n * n {
        return Err(Error::DimensionMismatch {
            what: "jet matrix",
            expected: n * n,
            got: a.len(),
        });
    }
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.value().abs()));
    let mut m = a.to_vec();
    let mut inv: Vec<Jet> = (0..n * n)
        .map(|k| Jet::scalar(if k / n == k % n { 1.0 } else { 0.0 }))
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                m[i * n + col]
                    .value()
                    .abs()
                    .total_cmp(&m[j * n + col].value().abs())
            })
            .unwrap();
        let pv = m[piv * n + col].value();
        if !(pv.abs() > 1e-13 * scale) {
            return Err(Error::SingularMatrix { pivot: pv.abs() });
        }
        if piv != col {
            for k in 0..n {
                m.swap(piv * n + k, col * n + k);
                inv.swap(piv * n + k, col * n + k);
            }
        }
        let r = m[col * n + col].recip()?;
        for k in 0..n {
            m[col * n + k] = &m[col * n + k] * &r;
            inv[col * n + k] = &inv[col * n + k] * &r;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = m[row * n + col].clone();
            if f.coeffs().iter().all(|&c| c == 0.0) {
                continue;
            }
            for k in 0..n {
                let t = &f * &m[col * n + k];
                m[row * n + k] -= &t;
                let t = &f * &inv[col * n + k];
                inv[row * n + k] -= &t;
            }
        }
    }
    Ok(inv)
}

/// `A x` for a row-major `rows × x.len()` jet matrix.
pub fn matvec(a: &[Jet], x: &[Jet]) -> Vec<Jet> {
    let n = x.len();
    a.chunks(n)
        .map(|row| {
            let mut acc = &row[0] * &x[0];
            for (r, v) in row.iter().zip(x).skip(1) {
                acc.add_product(r, v);
            }
            acc
        })
        .collect()
}

/// Quadratic form `xᵀ A x`.
pub fn quadratic_form(a: &[Jet], x: &[Jet]) -> Jet {
    let ax = matvec(a, x);
    let mut acc = &ax[0] * &x[0];
    for (u, v) in ax.iter().zip(x).skip(1) {
        acc.add_product(u, v);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::JetSpace;

    #[test]
    fn inverse_of_parametric_matrix() {
        // A(t) = [[2+t, 1], [1, 3]]; d/dt A⁻¹ = -A⁻¹ A' A⁻¹
        let s = JetSpace::get(1, 2);
        let t = Jet::variable(&s, 0, 0.5);
        let a = vec![&t + 2.0, Jet::scalar(1.0), Jet::scalar(1.0), Jet::scalar(3.0)];
        let inv = inverse(&a, 2).unwrap();
        let det: f64 = 2.5 * 3.0 - 1.0;
        assert!((inv[0].value() - 3.0 / det).abs() < 1e-15);
        // d(3/det)/dt with det = 3t + 5
        assert!((inv[0].d(0) + 9.0 / (det * det)).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a: Vec<Jet> = [1.0, 2.0, 2.0, 4.0].iter().map(|&v| Jet::scalar(v)).collect();
        assert!(matches!(inverse(&a, 2), Err(Error::SingularMatrix { .. })));
    }
}
