//! Jacobian of the evolution operator, eigenvalues of 4x4 real matrices, and
//! the hyperbolic classification of fixed points.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{force_of_infection, validate_params, ModelParams, SimplexPoint};

pub type Matrix4 = [[f64; 4]; 4];

/// An eigenvalue within this distance of the unit circle makes a fixed point
/// nonhyperbolic.
pub const UNIT_CIRCLE_TOL: f64 = 1e-10;

/// Equalities in the parameter-level rule for `lambda1` use this slack.
pub const PARAM_EQ_TOL: f64 = 1e-12;

const MAX_QR_SWEEPS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobianMatrix(pub Matrix4);

impl JacobianMatrix {
    pub fn entries(&self) -> &Matrix4 {
        &self.0
    }
}

/// Partial derivatives of `(x', u', y', v')` with respect to `(x, u, y, v)`.
pub fn jacobian(s: &SimplexPoint, p: &ModelParams) -> JacobianMatrix {
    let a = force_of_infection(s, p).value();
    let [x, _, y, _] = s.coords();
    let ModelParams {
        b,
        alpha,
        beta1,
        beta2,
        k1,
        k2,
    } = *p;
    JacobianMatrix([
        [1.0 - b - beta1 * a, -beta1 * k1 * x, 0.0, -beta1 * k2 * x],
        [beta1 * a, 1.0 - b - alpha + beta1 * k1 * x, 0.0, beta1 * k2 * x],
        [0.0, alpha - beta2 * k1 * y, 1.0 - b - beta2 * a, -beta2 * k2 * y],
        [0.0, beta2 * k1 * y, beta2 * a, 1.0 - b + beta2 * k2 * y],
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityClass {
    Attracting,
    Repelling,
    Saddle,
    Nonhyperbolic,
}

impl fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StabilityClass::Attracting => "attracting",
            StabilityClass::Repelling => "repelling",
            StabilityClass::Saddle => "saddle",
            StabilityClass::Nonhyperbolic => "nonhyperbolic",
        })
    }
}

/// Any modulus within `1e-10` of one is nonhyperbolic; otherwise all inside
/// is attracting, all outside repelling, and a mix is a saddle.
pub fn classify(eigenvalues: &[Complex64]) -> StabilityClass {
    let moduli: Vec<f64> = eigenvalues.iter().map(|z| z.norm()).collect();
    if moduli.iter().any(|m| (m - 1.0).abs() <= UNIT_CIRCLE_TOL) {
        StabilityClass::Nonhyperbolic
    } else if moduli.iter().all(|&m| m < 1.0) {
        StabilityClass::Attracting
    } else if moduli.iter().all(|&m| m > 1.0) {
        StabilityClass::Repelling
    } else {
        StabilityClass::Saddle
    }
}

/// Coefficients `[1, c3, c2, c1, c0]` of `det(z I - M)`, highest degree
/// first, by the Faddeev-LeVerrier recursion.
pub fn characteristic_polynomial(m: &Matrix4) -> [f64; 5] {
    let mut coeffs = [0.0; 5];
    coeffs[0] = 1.0;
    let mut mk = [[0.0; 4]; 4];
    for k in 1..=4 {
        // M_k = A M_{k-1} + c_{k-1} I
        let mut next = mat_mul(m, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += coeffs[k - 1];
        }
        let am = mat_mul(m, &next);
        let trace: f64 = (0..4).map(|i| am[i][i]).sum();
        coeffs[k] = -trace / k as f64;
        mk = next;
    }
    coeffs
}

/// `|p(z)| / sum_i |c_i| |z|^i`, the characteristic polynomial residual
/// scaled by the size of its terms.
pub fn charpoly_residual(coeffs: &[f64; 5], z: Complex64) -> f64 {
    let mut value = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    let r = z.norm();
    for (i, &c) in coeffs.iter().enumerate() {
        value = value * z + c;
        scale += c.abs() * r.powi(4 - i as i32);
    }
    if scale == 0.0 {
        value.norm()
    } else {
        value.norm() / scale
    }
}

fn mat_mul(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Eigenvalues of a 4x4 real matrix: Householder reduction to upper
/// Hessenberg form, then Francis double-shift QR with deflation on
/// negligible subdiagonal entries. Columns that are already reduced are left
/// untouched, so block-triangular inputs deflate exactly.
pub fn eigenvalues_of(m: &Matrix4) -> Result<[Complex64; 4]> {
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("matrix has non-finite entries".into()));
    }
    let mut a = *m;
    reduce_to_hessenberg(&mut a);
    let mut eig = hessenberg_qr(&mut a)?;
    eig.sort_by(|p, q| {
        q.re.total_cmp(&p.re)
            .then(q.im.total_cmp(&p.im))
    });
    Ok(eig)
}

pub fn eigenvalues(j: &JacobianMatrix) -> Result<[Complex64; 4]> {
    eigenvalues_of(&j.0)
}

fn reduce_to_hessenberg(a: &mut Matrix4) {
    const N: usize = 4;
    for k in 0..N - 2 {
        let tail_norm: f64 = (k + 2..N).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if tail_norm == 0.0 {
            continue;
        }
        let x0 = a[k + 1][k];
        let norm = (x0 * x0 + tail_norm * tail_norm).sqrt();
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        let mut v = [0.0; N];
        v[k + 1] = x0 - alpha;
        for i in k + 2..N {
            v[i] = a[i][k];
        }
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // A <- H A H with H = I - 2 v v^T / (v^T v)
        for j in 0..N {
            let s: f64 = (k + 1..N).map(|i| v[i] * a[i][j]).sum::<f64>() * 2.0 / vnorm2;
            for i in k + 1..N {
                a[i][j] -= s * v[i];
            }
        }
        for row in a.iter_mut() {
            let s: f64 = (k + 1..N).map(|j| row[j] * v[j]).sum::<f64>() * 2.0 / vnorm2;
            for j in k + 1..N {
                row[j] -= s * v[j];
            }
        }
        for i in k + 2..N {
            a[i][k] = 0.0;
        }
    }
}

fn with_sign(magnitude: f64, sign_of: f64) -> f64 {
    if sign_of >= 0.0 {
        magnitude.abs()
    } else {
        -magnitude.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (destroys `a`).
fn hessenberg_qr(a: &mut Matrix4) -> Result<[Complex64; 4]> {
    const N: usize = 4;
    let mut wr = [0.0; N];
    let mut wi = [0.0; N];
    let mut anorm = 0.0;
    for i in 0..N {
        for j in i.saturating_sub(1)..N {
            anorm += a[i][j].abs();
        }
    }
    let mut nn: isize = N as isize - 1;
    let mut shift = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let n = nn as usize;
            // find the lowest negligible subdiagonal entry
            let mut l = n;
            while l >= 1 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[n][n];
            if l == n {
                // one root
                wr[n] = x + shift;
                wi[n] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[n - 1][n - 1];
            let mut w = a[n][n - 1] * a[n - 1][n];
            if l == n - 1 {
                // two roots from the trailing 2x2 block
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += shift;
                if q >= 0.0 {
                    let z = p + with_sign(z, p);
                    wr[n - 1] = x + z;
                    wr[n] = if z != 0.0 { x - w / z } else { x + z };
                    wi[n - 1] = 0.0;
                    wi[n] = 0.0;
                } else {
                    wr[n - 1] = x + p;
                    wr[n] = x + p;
                    wi[n - 1] = -z;
                    wi[n] = z;
                }
                nn -= 2;
                break;
            }
            if its == MAX_QR_SWEEPS {
                return Err(Error::NonConvergence { iterations: its });
            }
            if its == 10 || its == 20 {
                // exceptional shift
                shift += x;
                for (i, row) in a.iter_mut().enumerate().take(n + 1) {
                    row[i] -= x;
                }
                let s = a[n][n - 1].abs() + a[n - 1][n - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            // look for two consecutive small subdiagonal entries
            let mut m = n - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=n {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            // double QR step on rows l..=n, columns m..=n
            let mut k = m;
            while k < n {
                let mut scale = 0.0;
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k != n - 1 { a[k + 2][k - 1] } else { 0.0 };
                    scale = p.abs() + q.abs() + r.abs();
                    if scale != 0.0 {
                        p /= scale;
                        q /= scale;
                        r /= scale;
                    }
                }
                let s = with_sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * scale;
                    }
                    p += s;
                    let xk = p / s;
                    let yk = q / s;
                    let zk = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=n {
                        let mut pp = a[k][j] + q * a[k + 1][j];
                        if k != n - 1 {
                            pp += r * a[k + 2][j];
                            a[k + 2][j] -= pp * zk;
                        }
                        a[k + 1][j] -= pp * yk;
                        a[k][j] -= pp * xk;
                    }
                    let last = n.min(k + 3);
                    for row in a.iter_mut().take(last + 1).skip(l) {
                        let mut pp = xk * row[k] + yk * row[k + 1];
                        if k != n - 1 {
                            pp += zk * row[k + 2];
                            row[k + 2] -= pp * r;
                        }
                        row[k + 1] -= pp * q;
                        row[k] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(std::array::from_fn(|i| Complex64::new(wr[i], wi[i])))
}

/// Which result the classification is backed by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    /// `lambda1`, whose type has a closed-form rule.
    Lambda1,
    /// Any other point: classified from the eigenvalues alone.
    EigenvaluesOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub point: SimplexPoint,
    pub class: StabilityClass,
    pub eigenvalues: Vec<Complex64>,
    pub spectral_radius: f64,
    pub scope: Scope,
}

/// Generic classification at any point via the eigenvalues of the Jacobian.
pub fn classify_point(s: &SimplexPoint, p: &ModelParams) -> Result<StabilityReport> {
    let eig = eigenvalues(&jacobian(s, p))?;
    let scope = if s.dist_inf(&SimplexPoint::vertex(0)) == 0.0 {
        Scope::Lambda1
    } else {
        Scope::EigenvaluesOnly
    };
    Ok(StabilityReport {
        point: *s,
        class: classify(&eig),
        spectral_radius: eig.iter().map(|z| z.norm()).fold(0.0, f64::max),
        eigenvalues: eig.to_vec(),
        scope,
    })
}

/// Type of `lambda1 = (1,0,0,0)` from the parameters alone: nonhyperbolic
/// if `b = 0` or `beta1 k1 = b + alpha`, attracting if `beta1 k1 < b + alpha`,
/// saddle if `beta1 k1 > b + alpha`.
pub fn classify_lambda1(p: &ModelParams) -> Result<StabilityClass> {
    let report = validate_params(p)?;
    if !report.is_admissible() {
        return Err(Error::InadmissibleParams(report));
    }
    let gap = p.beta1_k1() - (p.b + p.alpha);
    Ok(if p.b <= PARAM_EQ_TOL || gap.abs() <= PARAM_EQ_TOL {
        StabilityClass::Nonhyperbolic
    } else if gap < 0.0 {
        StabilityClass::Attracting
    } else {
        StabilityClass::Saddle
    })
}
