use num_complex::Complex64;
use rayon::prelude::*;

use super::profile::CosineTable;
use super::spectrum::{checked_order, enumerate_spectrum, Spectrum};
use crate::error::Result;

/// How the inverse Fourier transform is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inversion {
    /// `O(|G|^2)` direct character sums.
    Direct,
    /// Length-`q` transforms along each of the `(n-1)^2` axes.
    Iterated,
    /// `Direct` for `|G| <= DIRECT_LIMIT`, otherwise `Iterated`.
    Auto,
}

pub const DIRECT_LIMIT: usize = 1024;

/// `P^t_0(g)` for every `g` in index order, from a precomputed spectrum.
pub fn distribution_from_spectrum(spec: &Spectrum, t: u64, method: Inversion) -> Vec<f64> {
    let order = spec.len();
    let method = match method {
        Inversion::Auto if order <= DIRECT_LIMIT => Inversion::Direct,
        Inversion::Auto => Inversion::Iterated,
        m => m,
    };
    let powers: Vec<f64> = spec.eigenvalues().iter().map(|&l| pow(l, t)).collect();
    match method {
        Inversion::Direct => direct(spec.n, spec.q, &powers),
        _ => iterated(spec.n, spec.q, &powers),
    }
}

fn pow(l: f64, t: u64) -> f64 {
    match i32::try_from(t) {
        Ok(e) => l.powi(e),
        Err(_) => l.powf(t as f64),
    }
}

fn digits(mut index: usize, len: usize, q: u32) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let v = (index % q as usize) as u32;
            index /= q as usize;
            v
        })
        .collect()
}

fn direct(n: usize, q: u32, powers: &[f64]) -> Vec<f64> {
    let len = (n - 1) * (n - 1);
    let order = powers.len();
    let cos = CosineTable::new(q);
    let all: Vec<Vec<u32>> = (0..order).map(|i| digits(i, len, q)).collect();
    (0..order)
        .into_par_iter()
        .map(|g| {
            let gd = &all[g];
            let s: f64 = all
                .iter()
                .zip(powers)
                .map(|(yd, &p)| {
                    let dot = gd.iter().zip(yd).map(|(&a, &b)| a as u64 * b as u64).sum::<u64>() % q as u64;
                    p * cos.get(dot as u32)
                })
                .sum();
            s / order as f64
        })
        .collect()
}

fn iterated(n: usize, q: u32, powers: &[f64]) -> Vec<f64> {
    let len = (n - 1) * (n - 1);
    let order = powers.len();
    let qu = q as usize;
    let roots: Vec<Complex64> = (0..qu)
        .map(|a| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * a as f64 / q as f64))
        .collect();
    let mut f: Vec<Complex64> = powers.iter().map(|&p| Complex64::new(p, 0.0)).collect();
    let mut line = vec![Complex64::new(0.0, 0.0); qu];
    let mut stride = 1usize;
    for _ in 0..len {
        let block = stride * qu;
        for base in (0..order).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (y, slot) in line.iter_mut().enumerate() {
                    *slot = f[start + y * stride];
                }
                for g in 0..qu {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (y, v) in line.iter().enumerate() {
                        acc += v * roots[(g * y) % qu];
                    }
                    f[start + g * stride] = acc;
                }
            }
        }
        stride = block;
    }
    f.into_iter().map(|c| c.re / order as f64).collect()
}

/// Exact law of `C_t` started at 0, over `G` in index order.
pub fn exact_distribution(n: usize, q: u32, t: u64, cap: u128) -> Result<Vec<f64>> {
    checked_order(n, q, cap)?;
    let spec = enumerate_spectrum(n, q, cap)?;
    Ok(distribution_from_spectrum(&spec, t, Inversion::Auto))
}

/// `(1/2) sum_g |p(g) - 1/|G||`.
pub fn tv_to_uniform(p: &[f64]) -> f64 {
    let u = 1.0 / p.len() as f64;
    0.5 * p.iter().map(|&v| (v - u).abs()).sum::<f64>()
}

/// `(1/2) sum |p - r|`.
pub fn tv_between(p: &[f64], r: &[f64]) -> f64 {
    0.5 * p.iter().zip(r).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Exact `d(t)`; by vertex transitivity the start does not matter.
pub fn exact_tv(n: usize, q: u32, t: u64, cap: u128) -> Result<f64> {
    Ok(tv_to_uniform(&exact_distribution(n, q, t, cap)?))
}

pub fn exact_tv_from_spectrum(spec: &Spectrum, t: u64) -> f64 {
    tv_to_uniform(&distribution_from_spectrum(spec, t, Inversion::Auto))
}

/// First `t <= t_max` with `d(t) <= eps`.
pub fn mixing_time(spec: &Spectrum, eps: f64, t_max: u64) -> Option<u64> {
    (0..=t_max).find(|&t| exact_tv_from_spectrum(spec, t) <= eps)
}
