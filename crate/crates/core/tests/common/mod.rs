//! Reference solvers that share no code with the library's allocators.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use papc::channel::generate_channel;
use papc::precoding::zf_spc;
use papc::RMatrix;

/// ZF-SPC power matrix of a fresh `m×k` channel.
pub fn zf_power(m: usize, k: usize, seed: u64) -> RMatrix {
    zf_spc(&generate_channel(m, k, seed).unwrap()).unwrap().power()
}

/// Exact MPU optimum: the problem splits per antenna and its minimizer rescales each row of `r` to `1/M`.
pub fn mpu_closed_form(r: &RMatrix) -> RMatrix {
    let m = r.nrows() as f64;
    let mut x = r.clone();
    for mut row in x.row_iter_mut() {
        let s = row.sum();
        row /= m * s;
    }
    x
}

/// Dense barrier method for `min ‖√x − √r‖²` s.t. `Σ_k x_mk = 1/M`, `x > 0`.
///
/// Full `(MK+M)` KKT system solved by LU at every Newton step; starts from the uniform point.
pub fn dense_mpu_barrier(r: &RMatrix) -> RMatrix {
    let (m, k) = r.shape();
    let n = m * k;
    let rv: Vec<f64> = r.iter().copied().collect();
    let mut a = DMatrix::<f64>::zeros(m, n);
    for u in 0..k {
        for i in 0..m {
            a[(i, u * m + i)] = 1.0;
        }
    }
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let scaled = |x: &DVector<f64>, t: f64| -> f64 {
        x.iter().zip(&rv).map(|(xi, ri)| (xi.sqrt() - ri.sqrt()).powi(2) - xi.ln() / t).sum()
    };
    let mut t = 1.0;
    while (n as f64) / t > 1e-12 {
        for _ in 0..200 {
            let g = DVector::from_iterator(n, x.iter().zip(&rv).map(|(xi, ri)| 1.0 - (ri / xi).sqrt() - 1.0 / (t * xi)));
            let h = DVector::from_iterator(n, x.iter().zip(&rv).map(|(xi, ri)| 0.5 * ri.sqrt() * xi.powf(-1.5) + 1.0 / (t * xi * xi)));
            let mut kkt = DMatrix::<f64>::zeros(n + m, n + m);
            for i in 0..n {
                kkt[(i, i)] = h[i];
            }
            kkt.view_mut((0, n), (n, m)).copy_from(&a.transpose());
            kkt.view_mut((n, 0), (m, n)).copy_from(&a);
            let mut rhs = DVector::zeros(n + m);
            rhs.rows_mut(0, n).copy_from(&(-&g));
            let sol = kkt.lu().solve(&rhs).expect("nonsingular KKT");
            let dx = sol.rows(0, n).into_owned();
            let dec = dx.dot(&dx.component_mul(&h));
            if dec / 2.0 < 1e-14 {
                break;
            }
            let mut s = 1.0;
            while (&x + &dx * s).iter().any(|v| *v <= 0.0) {
                s *= 0.5;
            }
            let f0 = scaled(&x, t);
            let slope = g.dot(&dx);
            while scaled(&(&x + &dx * s), t) > f0 + 0.25 * s * slope && s > 1e-14 {
                s *= 0.5;
            }
            x += &dx * s;
        }
        t *= 10.0;
    }
    RMatrix::from_vec(m, k, x.iter().copied().collect())
}

/// Dense barrier method for `min φ(x)` s.t. `Ax ⪯ cap`, `x ⪰ 0` with `A` of size `M×K`.
///
/// `phi` returns `(value, gradient, Hessian)`. Starts from a small uniform interior point.
pub fn dense_polytope_barrier(
    a: &RMatrix,
    cap: f64,
    phi: &dyn Fn(&DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>),
) -> DVector<f64> {
    let (m, k) = a.shape();
    let row_max = a.row_iter().map(|r| r.sum()).fold(0.0, f64::max);
    let mut x = DVector::from_element(k, 0.5 * cap / row_max);
    let n_con = (m + k) as f64;
    let barrier = |x: &DVector<f64>, t: f64| -> Option<f64> {
        let s = DVector::from_element(m, cap) - a * x;
        if s.iter().any(|v| *v <= 0.0) || x.iter().any(|v| *v <= 0.0) {
            return None;
        }
        Some(phi(x).0 - (s.iter().map(|v| v.ln()).sum::<f64>() + x.iter().map(|v| v.ln()).sum::<f64>()) / t)
    };
    let mut t = 1.0;
    while n_con / t > 1e-12 {
        for _ in 0..200 {
            let (_, g0, h0) = phi(&x);
            let s = DVector::from_element(m, cap) - a * &x;
            let mut g = g0;
            let mut h = h0;
            for i in 0..m {
                let row = a.row(i).transpose();
                g += &row / (t * s[i]);
                h += &row * row.transpose() / (t * s[i] * s[i]);
            }
            for j in 0..k {
                g[j] -= 1.0 / (t * x[j]);
                h[(j, j)] += 1.0 / (t * x[j] * x[j]);
            }
            let dx = h.clone().lu().solve(&(-&g)).expect("nonsingular Hessian");
            let dec = dx.dot(&(&h * &dx));
            if dec / 2.0 < 1e-14 {
                break;
            }
            let f0 = barrier(&x, t).unwrap();
            let slope = g.dot(&dx);
            let mut step = 1.0;
            loop {
                let cand = &x + &dx * step;
                if let Some(f) = barrier(&cand, t) {
                    if f <= f0 + 0.25 * step * slope || step < 1e-14 {
                        x = cand;
                        break;
                    }
                }
                step *= 0.5;
                if step < 1e-16 {
                    break;
                }
            }
        }
        t *= 10.0;
    }
    x
}

/// MMI objective `Σ_k (x_k − 2√(α_k x_k) + α_k)` with its derivatives.
pub fn mmi_distance(alpha: Vec<f64>) -> impl Fn(&DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
    move |x| {
        let k = x.len();
        let v = (0..k).map(|j| (x[j].sqrt() - alpha[j].sqrt()).powi(2)).sum();
        let g = DVector::from_fn(k, |j, _| 1.0 - (alpha[j] / x[j]).sqrt());
        let h = DMatrix::from_fn(k, k, |i, j| if i == j { 0.5 * alpha[j].sqrt() * x[j].powf(-1.5) } else { 0.0 });
        (v, g, h)
    }
}

/// Negated sum rate `−Σ log₂(1 + c_k x_k)` with its derivatives.
pub fn neg_rate(c: Vec<f64>) -> impl Fn(&DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
    let ln2 = std::f64::consts::LN_2;
    move |x| {
        let k = x.len();
        let v = -(0..k).map(|j| (1.0 + c[j] * x[j]).log2()).sum::<f64>();
        let g = DVector::from_fn(k, |j, _| -c[j] / ((1.0 + c[j] * x[j]) * ln2));
        let h = DMatrix::from_fn(k, k, |i, j| if i == j { (c[j] / (1.0 + c[j] * x[j])).powi(2) / ln2 } else { 0.0 });
        (v, g, h)
    }
}

/// Central-difference derivative of `f` along coordinate `i`.
pub fn central_diff(f: &dyn Fn(&[f64]) -> f64, x: &[f64], i: usize, h: f64) -> f64 {
    let mut p = x.to_vec();
    let mut q = x.to_vec();
    p[i] += h;
    q[i] -= h;
    (f(&p) - f(&q)) / (2.0 * h)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
