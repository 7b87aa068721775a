//! Reference implementations used only by tests. They work on raw
//! mixed-radix indices and share no code with the library beyond decoding
//! group descriptions.

#![allow(dead_code)]

use std::f64::consts::TAU;

/// Coordinates of `index`, least-significant factor first.
pub fn coords(factors: &[u32], mut index: usize) -> Vec<usize> {
    factors
        .iter()
        .map(|&n| {
            let c = index % n as usize;
            index /= n as usize;
            c
        })
        .collect()
}

pub fn index(factors: &[u32], coords: &[usize]) -> usize {
    factors.iter().zip(coords).rev().fold(0, |acc, (&n, &c)| acc * n as usize + c)
}

pub fn add(factors: &[u32], a: usize, b: usize) -> usize {
    let (ca, cb) = (coords(factors, a), coords(factors, b));
    let sum: Vec<usize> = factors.iter().zip(ca.iter().zip(&cb)).map(|(&n, (x, y))| (x + y) % n as usize).collect();
    index(factors, &sum)
}

pub fn order(factors: &[u32]) -> usize {
    factors.iter().map(|&n| n as usize).product()
}

/// Largest `B ⊆ A` with no two distinct elements summing into `A`, by
/// checking every subset.
pub fn phi(factors: &[u32], a: &[usize]) -> usize {
    let n = a.len();
    assert!(n <= 24, "oracle limited to 24 elements");
    let member = |x: usize| a.contains(&x);
    let mut clash = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            clash[i * n + j] = i != j && member(add(factors, a[i], a[j]));
        }
    }
    let mut best = 0;
    for mask in 0u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let picked: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if picked.iter().all(|&i| picked.iter().all(|&j| !clash[i * n + j])) {
            best = size;
        }
    }
    best
}

/// `|G|^-1 Σ_x f(x) e^{-2πi ξ·x}` as `(re, im)`.
pub fn fourier_coeff(factors: &[u32], xi: &[u64], f: &[f64]) -> (f64, f64) {
    let (mut re, mut im) = (0.0, 0.0);
    for (x, &v) in f.iter().enumerate() {
        let c = coords(factors, x);
        let phase: f64 = factors
            .iter()
            .zip(xi)
            .zip(&c)
            .map(|((&n, &k), &cx)| (k as usize * cx % n as usize) as f64 / n as f64)
            .sum();
        re += v * (TAU * phase).cos();
        im -= v * (TAU * phase).sin();
    }
    let n = f.len() as f64;
    (re / n, im / n)
}

/// Every tuple `x_0..x_{k-1}` of group indices, in odometer order.
fn tuples(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(k as u32);
    (0..total).map(move |mut t| {
        (0..k)
            .map(|_| {
                let x = t % n;
                t /= n;
                x
            })
            .collect()
    })
}

/// `Λ` summed tuple by tuple; pair functions in lexicographic `(i, j)` order.
pub fn lambda(factors: &[u32], fs: &[Vec<f64>], fijs: &[Vec<f64>]) -> f64 {
    let n = order(factors);
    let k = fs.len();
    let mut total = 0.0;
    for xs in tuples(n, k) {
        let mut v: f64 = (0..k).map(|i| fs[i][xs[i]]).product();
        let mut p = 0;
        for i in 0..k {
            for j in i + 1..k {
                v *= fijs[p][add(factors, xs[i], xs[j])];
                p += 1;
            }
        }
        total += v;
    }
    total / (n as f64).powi(k as i32)
}

/// Tuples in `A^k` whose pairwise sums of distinct positions all land in `B`.
pub fn count_solutions(factors: &[u32], a: &[usize], b: &[usize], k: usize) -> u64 {
    let mut count = 0;
    for pos in tuples(a.len(), k) {
        let xs: Vec<usize> = pos.iter().map(|&p| a[p]).collect();
        let ok = (0..k).all(|i| (i + 1..k).all(|j| b.contains(&add(factors, xs[i], xs[j]))));
        count += ok as u64;
    }
    count
}
