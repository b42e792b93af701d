//! Dense complex linear algebra at desk scale: a cyclic Jacobi
//! eigendecomposition for Hermitian matrices and a singular value
//! decomposition derived from it.
//!
//! Hand-rolled rather than pulled in: the matrices here are tiny (`N <= 64`),
//! and byte-stable results across toolchain updates matter for the
//! reproducibility guarantees of the report formats.

use num_complex::Complex64;

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// `vectors[i]` is the unit eigenvector for `values[i]`.
    pub vectors: Vec<Vec<Complex64>>,
}

const MAX_SWEEPS: usize = 64;
const OFF_DIAGONAL_TOL: f64 = 1e-30;

fn frobenius(matrix: &[Complex64]) -> f64 {
    matrix.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Cyclic Jacobi iteration on a Hermitian matrix given row-major.
///
/// Only the Hermitian part of the input is used; callers are expected to
/// check Hermitian-ness to their own tolerance beforehand.
pub fn hermitian_eigen(matrix: &[Complex64], n: usize) -> HermitianEigen {
    assert_eq!(matrix.len(), n * n, "matrix must be square");
    let mut a = matrix.to_vec();
    // Work on the exact Hermitian part so roundoff in the input cannot leak
    // asymmetry into the iteration.
    for p in 0..n {
        a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
        for q in (p + 1)..n {
            let avg = (a[p * n + q] + a[q * n + p].conj()) * 0.5;
            a[p * n + q] = avg;
            a[q * n + p] = avg.conj();
        }
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let scale = frobenius(&a).max(f64::MIN_POSITIVE);

    for _sweep in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r <= OFF_DIAGONAL_TOL * scale {
                    continue;
                }
                let phase = apq / r;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Unitary plane rotation G with
                //   G[p][p] = c           G[p][q] = s
                //   G[q][p] = -s conj(ph) G[q][q] = c conj(ph)
                // chosen to zero the (p, q) entry of G^H A G.
                let gqp = -s * phase.conj();
                let gqq = c * phase.conj();

                // A <- A G (columns p and q).
                for i in 0..n {
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    a[i * n + p] = aip * c + aiq * gqp;
                    a[i * n + q] = aip * s + aiq * gqq;
                }
                // A <- G^H A (rows p and q).
                for j in 0..n {
                    let apj = a[p * n + j];
                    let aqj = a[q * n + j];
                    a[p * n + j] = apj * c + aqj * gqp.conj();
                    a[q * n + j] = apj * s + aqj * gqq.conj();
                }
                // The rotation annihilates the pivot; write the zero exactly
                // and keep the diagonal real.
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
                a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);

                // V <- V G.
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = vip * c + viq * gqp;
                    v[i * n + q] = vip * s + viq * gqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .re
            .partial_cmp(&a[i * n + i].re)
            .expect("eigenvalues are finite")
    });
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();
    HermitianEigen { values, vectors }
}

/// Thin singular value decomposition, singular values descending.
///
/// Triples with `sigma <= rel_cutoff * sigma_max` are dropped.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    /// Right singular vectors (the window-side factors).
    pub right: Vec<Vec<Complex64>>,
    /// Left singular vectors, `A v / sigma`.
    pub left: Vec<Vec<Complex64>>,
}

/// SVD through the Hermitian eigendecomposition of `A^H A`.
///
/// Singular values are recomputed as `||A v||` rather than as square roots of
/// Gram eigenvalues, which keeps noise modes of an exactly low-rank matrix at
/// the `1e-16 sigma_max` level where the cutoff removes them.
pub fn svd(matrix: &[Complex64], n: usize, rel_cutoff: f64) -> Svd {
    assert_eq!(matrix.len(), n * n, "matrix must be square");
    let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += matrix[k * n + i].conj() * matrix[k * n + j];
            }
            gram[i * n + j] = acc;
        }
    }
    let eigen = hermitian_eigen(&gram, n);

    let mut triples: Vec<(f64, Vec<Complex64>, Vec<Complex64>)> = Vec::new();
    for vector in eigen.vectors {
        let image: Vec<Complex64> = (0..n)
            .map(|row| (0..n).map(|col| matrix[row * n + col] * vector[col]).sum())
            .collect();
        let sigma = image.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        triples.push((sigma, vector, image));
    }
    triples.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("singular values are finite"));

    let sigma_max = triples.first().map(|t| t.0).unwrap_or(0.0);
    let mut out = Svd {
        singular_values: Vec::new(),
        right: Vec::new(),
        left: Vec::new(),
    };
    if sigma_max == 0.0 {
        return out;
    }
    for (sigma, right, image) in triples {
        if sigma <= rel_cutoff * sigma_max {
            break;
        }
        out.left.push(image.iter().map(|v| v / sigma).collect());
        out.singular_values.push(sigma);
        out.right.push(right);
    }
    out
}
