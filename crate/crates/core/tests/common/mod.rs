#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use usable_speech::synth::{vowel, VOWELS};
use usable_speech::Signal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn tone(freq: f64, phase: f64, amp: f64, len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| amp * (2.0 * PI * freq * i as f64 / 8000.0 + phase).sin())
        .collect()
}

/// Sustained 8 kHz vowel at `f0`, scaled to `rms`.
pub fn steady_vowel(f0: f64, formants: [f64; 3], secs: f64, rms: f64, seed: u64) -> Signal {
    let len = (secs * 8000.0) as usize;
    let mut v = vowel(f0, f0 * 0.97, formants, len, 8000, &mut rng(seed));
    let cur = (v.iter().map(|x| x * x).sum::<f64>() / len as f64).sqrt();
    v.iter_mut().for_each(|x| *x *= rms / cur);
    Signal::new(v, 8000).unwrap()
}

/// Every (pitch, vowel) combination used by the single-talker checks.
pub fn vowel_set() -> Vec<(f64, [f64; 3])> {
    let mut out = Vec::new();
    for f0 in [100.0, 130.0, 160.0, 190.0, 220.0] {
        for v in VOWELS {
            out.push((f0, v));
        }
    }
    out
}

pub fn white_noise(len: usize, rms: f64, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..len)
        .map(|_| rms * r.sample::<f64, _>(StandardNormal))
        .collect()
}

/// White noise through a one-pole low-pass (coefficient `a`).
pub fn lowpass_noise(len: usize, a: f64, seed: u64) -> Vec<f64> {
    let mut y = 0.0;
    white_noise(len, 0.05, seed)
        .into_iter()
        .map(|x| {
            y = a * y + (1.0 - a) * x;
            y
        })
        .collect()
}

pub fn random_vec(len: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..len).map(|_| r.random_range(-1.0..1.0)).collect()
}
