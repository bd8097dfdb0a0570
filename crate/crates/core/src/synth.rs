//! Deterministic synthetic talkers for tests, benchmarks and the bundled
//! evaluation corpus.
//!
//! Each talker produces syllables: a glottal pulse train (Rosenberg pulse,
//! with jitter and shimmer) shaped by three formant resonators, separated by
//! pauses and occasional unvoiced noise bursts. Pitch declines slowly across
//! each syllable. Nothing here models a real speaker; the point is a signal
//! with the voiced/unvoiced/silent structure and pitch range of speech.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use rayon::prelude::*;

use crate::cochannel::{mix_at_tir, Category, Mixture};
use crate::{downsample_to_8k, Result, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gender {
    Male,
    Female,
}

/// Formant frequencies (Hz) of a few steady vowels.
pub const VOWELS: [[f64; 3]; 5] = [
    [730.0, 1090.0, 2440.0], // a
    [530.0, 1840.0, 2480.0], // e
    [270.0, 2290.0, 3010.0], // i
    [570.0, 840.0, 2410.0],  // o
    [300.0, 870.0, 2240.0],  // u
];
const FORMANT_BANDWIDTHS: [f64; 3] = [80.0, 100.0, 140.0];
const FORMANT_GAINS: [f64; 3] = [1.0, 0.5, 0.25];
const NOISE_FLOOR_RMS: f64 = 5e-4;

/// Two-pole resonator with unit gain at DC; coefficients may be retuned per sample.
struct Resonator {
    y1: f64,
    y2: f64,
}

impl Resonator {
    fn new() -> Self {
        Resonator { y1: 0.0, y2: 0.0 }
    }

    fn process(&mut self, x: f64, freq: f64, bandwidth: f64, rate: f64) -> f64 {
        let r = (-PI * bandwidth / rate).exp();
        let a1 = 2.0 * r * (2.0 * PI * freq / rate).cos();
        let a2 = -r * r;
        let y = (1.0 - a1 - a2) * x + a1 * self.y1 + a2 * self.y2;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

/// Rosenberg glottal flow pulse at phase `t` in [0, 1) of one period.
fn rosenberg(t: f64) -> f64 {
    const OPEN: f64 = 0.4;
    const CLOSE: f64 = 0.16;
    if t < OPEN {
        0.5 * (1.0 - (PI * t / OPEN).cos())
    } else if t < OPEN + CLOSE {
        (PI / 2.0 * (t - OPEN) / CLOSE).cos()
    } else {
        0.0
    }
}

/// Glottal excitation (with lip radiation) whose pitch follows `f0(progress)`,
/// `progress` running from 0 to 1 over the `len` samples.
fn glottal_source(f0: impl Fn(f64) -> f64, len: usize, rate: f64, rng: &mut impl Rng) -> Vec<f64> {
    let mut source = Vec::with_capacity(len);
    let mut phase = 0.0;
    let mut period_f0 = f0(0.0);
    let mut amp = 1.0;
    let mut prev = 0.0;
    for i in 0..len {
        let flow = amp * rosenberg(phase);
        // lip radiation: leaky first difference
        source.push(flow - 0.7 * prev);
        prev = flow;
        phase += period_f0 / rate;
        if phase >= 1.0 {
            phase -= 1.0;
            // jitter and shimmer are drawn once per glottal cycle
            period_f0 = f0(i as f64 / len.max(1) as f64)
                * (1.0 + 0.005 * rng.sample::<f64, _>(StandardNormal));
            amp = 1.0 + 0.03 * rng.sample::<f64, _>(StandardNormal);
        }
    }
    source
}

/// Run `source` through the three formant resonators, whose frequencies
/// follow `formants(i)` sample by sample.
fn vocal_tract(source: &[f64], formants: impl Fn(usize) -> [f64; 3], rate: f64) -> Vec<f64> {
    let mut tract = [Resonator::new(), Resonator::new(), Resonator::new()];
    source
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = formants(i);
            (0..3)
                .filter(|&k| f[k] < rate / 2.0)
                .map(|k| FORMANT_GAINS[k] * tract[k].process(x, f[k], FORMANT_BANDWIDTHS[k], rate))
                .sum()
        })
        .collect()
}

/// A sustained vowel whose pitch moves linearly from `f0_start` to `f0_end`.
pub fn vowel(
    f0_start: f64,
    f0_end: f64,
    formants: [f64; 3],
    len: usize,
    rate: u32,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let rate = rate as f64;
    let source = glottal_source(|p| f0_start + (f0_end - f0_start) * p, len, rate, rng);
    vocal_tract(&source, |_| formants, rate)
}

/// A continuous voiced stretch gliding through `targets` (formant sets held
/// for `seg_len` samples each, with linear transitions between neighbours).
fn voiced_run(
    f0_start: f64,
    f0_end: f64,
    targets: &[[f64; 3]],
    seg_len: usize,
    rate: f64,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let len = seg_len * targets.len();
    let source = glottal_source(|p| f0_start + (f0_end - f0_start) * p, len, rate, rng);
    let glide = seg_len / 3;
    vocal_tract(
        &source,
        |i| {
            let seg = i / seg_len;
            let pos = i % seg_len;
            let here = targets[seg];
            if pos >= glide || seg == 0 {
                return here;
            }
            let prev = targets[seg - 1];
            let w = pos as f64 / glide as f64;
            [0, 1, 2].map(|k| prev[k] + (here[k] - prev[k]) * w)
        },
        rate,
    )
}

fn envelope(len: usize, ramp: usize) -> impl Iterator<Item = f64> {
    let ramp = ramp.min(len / 2).max(1);
    (0..len).map(move |i| {
        let edge = i.min(len - 1 - i);
        if edge >= ramp {
            1.0
        } else {
            0.5 * (1.0 - (PI * edge as f64 / ramp as f64).cos())
        }
    })
}

fn normalize_rms(x: &mut [f64], rms: f64) {
    let cur = (crate::energy(x) / x.len().max(1) as f64).sqrt();
    if cur > 0.0 {
        x.iter_mut().for_each(|v| *v *= rms / cur);
    }
}

/// Parameters of a synthetic talker.
#[derive(Debug, Clone, PartialEq)]
pub struct Talker {
    pub id: String,
    pub gender: Gender,
    /// Mean fundamental frequency, Hz.
    pub pitch_hz: f64,
    pub seed: u64,
}

impl Talker {
    /// A continuous utterance of roughly `duration_secs` seconds at `rate` Hz.
    ///
    /// Voiced stretches of two to four vowels alternate with pauses; some
    /// pauses carry an unvoiced burst. A white recording-noise floor sits
    /// about 46 dB under the speech level.
    pub fn utterance(&self, duration_secs: f64, rate: u32) -> Result<Signal> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let rate_f = rate as f64;
        let total = (duration_secs * rate_f) as usize;
        let ms = |v: f64| (v * rate_f / 1000.0) as usize;
        let mut out = Vec::with_capacity(total);
        while out.len() < total {
            let pause = ms(rng.random_range(80.0..350.0));
            if rng.random_bool(0.5) {
                let burst = pause.min(ms(rng.random_range(40.0..100.0)));
                out.extend(std::iter::repeat_n(0.0, pause - burst));
                let mut noise: Vec<f64> = (0..burst)
                    .map(|_| rng.sample::<f64, _>(StandardNormal))
                    .collect();
                // first difference pushes the noise to high frequencies
                for k in (1..noise.len()).rev() {
                    noise[k] -= noise[k - 1];
                }
                normalize_rms(&mut noise, 0.01);
                out.extend(
                    noise
                        .iter()
                        .zip(envelope(burst, ms(10.0)))
                        .map(|(n, e)| n * e),
                );
            } else {
                out.extend(std::iter::repeat_n(0.0, pause));
            }
            let targets: Vec<[f64; 3]> = (0..rng.random_range(2..=4))
                .map(|_| VOWELS[rng.random_range(0..VOWELS.len())])
                .collect();
            let seg_len = ms(rng.random_range(120.0..220.0));
            let start = self.pitch_hz * rng.random_range(0.95..1.10);
            let end = start * rng.random_range(0.82..0.98);
            let mut v = voiced_run(start, end, &targets, seg_len, rate_f, &mut rng);
            let level = 0.1 * 10f64.powf(rng.random_range(-4.0..4.0) / 20.0);
            normalize_rms(&mut v, level);
            let len = v.len();
            out.extend(v.iter().zip(envelope(len, ms(25.0))).map(|(s, e)| s * e));
        }
        out.truncate(total);
        for s in out.iter_mut() {
            *s += NOISE_FLOOR_RMS * rng.sample::<f64, _>(StandardNormal);
        }
        Signal::new(out, rate)
    }
}

/// The bundled evaluation corpus: three male and three female talkers with
/// mean pitch between 100 and 220 Hz.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub talkers: Vec<Talker>,
    pub duration_secs: f64,
    pub sample_rate: u32,
}

/// One target/interferer pairing from the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pairing {
    pub target: usize,
    pub interferer: usize,
    pub category: Category,
}

impl SyntheticCorpus {
    pub fn standard() -> Self {
        let roster = [
            ("m1", Gender::Male, 100.0),
            ("m2", Gender::Male, 118.0),
            ("m3", Gender::Male, 135.0),
            ("f1", Gender::Female, 185.0),
            ("f2", Gender::Female, 200.0),
            ("f3", Gender::Female, 220.0),
        ];
        let talkers = roster
            .iter()
            .enumerate()
            .map(|(i, &(id, gender, pitch_hz))| Talker {
                id: id.to_string(),
                gender,
                pitch_hz,
                seed: 0x5eed + i as u64,
            })
            .collect();
        SyntheticCorpus {
            talkers,
            duration_secs: 6.0,
            sample_rate: 16000,
        }
    }

    pub fn utterance(&self, talker: usize) -> Result<Signal> {
        self.talkers[talker].utterance(self.duration_secs, self.sample_rate)
    }

    /// Every ordered pair of distinct talkers, tagged with its category.
    pub fn pairings(&self) -> Vec<Pairing> {
        let mut out = Vec::new();
        for (t, a) in self.talkers.iter().enumerate() {
            for (i, b) in self.talkers.iter().enumerate() {
                if t == i {
                    continue;
                }
                let category = match (a.gender, b.gender) {
                    (Gender::Male, Gender::Male) => Category::MaleMale,
                    (Gender::Female, Gender::Female) => Category::FemaleFemale,
                    _ => Category::MaleFemale,
                };
                out.push(Pairing {
                    target: t,
                    interferer: i,
                    category,
                });
            }
        }
        out
    }

    /// Every pairing decimated to 8 kHz and mixed at `tir_db`, in pairing order.
    pub fn mixtures(&self, tir_db: f64) -> Result<Vec<(Pairing, Mixture)>> {
        let utterances = (0..self.talkers.len())
            .into_par_iter()
            .map(|t| downsample_to_8k(&self.utterance(t)?))
            .collect::<Result<Vec<_>>>()?;
        self.pairings()
            .into_par_iter()
            .map(|p| {
                let mut m = mix_at_tir(&utterances[p.target], &utterances[p.interferer], tir_db)?;
                m.category = Some(p.category);
                Ok((p, m))
            })
            .collect()
    }
}
