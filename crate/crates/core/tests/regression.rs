mod common;

use common::{dense, normals, rng};
use mlqmc::ortho::{HouseholderChain, HouseholderReflection};
use mlqmc::regress::{build_chain, RegressionSpec};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `R` of the thin QR factorization of the columns `a` by modified
/// Gram-Schmidt; `r[k][i]` is entry `(i, k)`.
fn gram_schmidt_r(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = Vec::new();
    let mut r = Vec::new();
    for col in a {
        let mut v = col.clone();
        let mut rk = Vec::new();
        for qi in &q {
            let c = dot(qi, &v);
            v.iter_mut().zip(qi).for_each(|(x, y)| *x -= c * y);
            rk.push(c);
        }
        let norm = dot(&v, &v).sqrt();
        rk.push(norm);
        q.push(v.iter().map(|x| x / norm).collect());
        r.push(rk);
    }
    r
}

fn transposed(chain: &HouseholderChain, a: &[f64]) -> Vec<f64> {
    let mut y = a.to_vec();
    chain.apply_transpose_in_place(&mut y).unwrap();
    y
}

#[test]
fn chain_matches_householder_qr() {
    let mut r = rng(10);
    for _ in 0..200 {
        let a: Vec<Vec<f64>> = (0..3).map(|_| normals(&mut r, 8)).collect();
        let chain = build_chain(&RegressionSpec::new(a.clone()).unwrap()).unwrap();
        let reference = gram_schmidt_r(&a);
        for (k, ak) in a.iter().enumerate() {
            let y = transposed(&chain, ak);
            let scale = dot(ak, ak).sqrt();
            for (i, yi) in y.iter().enumerate().skip(k + 1) {
                assert!(yi.abs() <= 1e-10 * scale, "column {k}, row {i}: {yi:e}");
            }
            for i in 0..=k {
                let err = (y[i].abs() - reference[k][i].abs()).abs();
                assert!(err < 1e-10, "R({i},{k}): {} vs {}", y[i], reference[k][i]);
            }
        }
    }
}

/// Builds the chain by evaluating `E(X_j h_k(U X)) = sum_i w_ki U_ij` from
/// the dense matrix of the current `U` at every step.
fn chain_from_expectations(w: &[Vec<f64>]) -> HouseholderChain {
    let n = w[0].len();
    let mut chain = HouseholderChain::identity(n);
    let mut pivot = 0;
    for wk in w {
        let u = dense(n, |x| chain.apply(x).unwrap());
        let mut b: Vec<f64> = (0..n).map(|j| (0..n).map(|i| wk[i] * u[i * n + j]).sum()).collect();
        b[..pivot].fill(0.0);
        if dot(&b, &b).sqrt() <= 1e-12 * dot(wk, wk).sqrt() {
            continue;
        }
        let reflection = HouseholderReflection::mapping_pivot_to(&b, pivot).unwrap();
        if !reflection.is_identity() {
            chain.push(reflection).unwrap();
        }
        pivot += 1;
    }
    chain
}

#[test]
fn update_identity_reproduces_reestimated_chain() {
    let mut r = rng(11);
    for m in 1..=4 {
        let mut w: Vec<Vec<f64>> = (0..m).map(|_| normals(&mut r, 6)).collect();
        if m == 4 {
            // dependent vector: skipped by both constructions
            w[2] = w[0].iter().zip(&w[1]).map(|(a, b)| 2.0 * a - b).collect();
        }
        let fast = build_chain(&RegressionSpec::new(w.clone()).unwrap()).unwrap();
        let slow = chain_from_expectations(&w);
        assert_eq!(fast.len(), slow.len());
        for (p, q) in fast.reflections().iter().zip(slow.reflections()) {
            assert_eq!(p.pivot(), q.pivot());
            for (a, b) in p.vector().iter().zip(q.vector()) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn transformed_function_depends_on_leading_coordinates_only() {
    let mut r = rng(12);
    let n = 32;
    for m in [1, 2, 3, 5] {
        let w: Vec<Vec<f64>> = (0..m).map(|_| normals(&mut r, n)).collect();
        let chain = build_chain(&RegressionSpec::new(w.clone()).unwrap()).unwrap();
        let f = |x: &[f64]| -> f64 {
            let y = chain.apply(x).unwrap();
            w.iter().enumerate().map(|(k, wk)| ((k + 1) as f64 * dot(wk, &y)).sin()).sum()
        };
        let x = normals(&mut r, n);
        let base = f(&x);
        for _ in 0..20 {
            let mut z = x.clone();
            z[m..].copy_from_slice(&normals(&mut r, n - m));
            let err = (f(&z) - base).abs();
            assert!(err < 1e-10, "m = {m}: {err:e}");
        }
    }
}
