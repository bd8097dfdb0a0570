//! Non-overlapping fixed-length analysis frames.

use crate::{Error, Result, Signal};

/// A borrowed window of `frame_len` samples starting at `start_sample`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame<'a> {
    pub index: usize,
    pub start_sample: usize,
    pub samples: &'a [f64],
}

/// Number of samples in a frame of `frame_ms` milliseconds at `sample_rate`.
pub fn frame_len(sample_rate: u32, frame_ms: u32) -> Result<usize> {
    let product = sample_rate as u64 * frame_ms as u64;
    if product == 0 || !product.is_multiple_of(1000) {
        return Err(Error::Config(format!(
            "{frame_ms} ms at {sample_rate} Hz is not a positive whole number of samples"
        )));
    }
    Ok((product / 1000) as usize)
}

/// Tile `signal` into `floor(n / frame_len)` frames; the trailing partial frame is dropped.
pub fn make_frames(signal: &Signal, frame_ms: u32) -> Result<Vec<Frame<'_>>> {
    let len = frame_len(signal.sample_rate(), frame_ms)?;
    Ok(frames_of(signal.samples(), len))
}

pub(crate) fn frames_of(samples: &[f64], len: usize) -> Vec<Frame<'_>> {
    samples
        .chunks_exact(len)
        .enumerate()
        .map(|(index, samples)| Frame {
            index,
            start_sample: index * len,
            samples,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn sig(n: usize) -> Signal {
        Signal::new((0..n).map(|i| i as f64 * 1e-4).collect(), 8000).unwrap()
    }

    #[test]
    fn standard_frame_is_512() {
        assert_eq!(frame_len(8000, 64).unwrap(), 512);
        assert_eq!(frame_len(16000, 64).unwrap(), 1024);
    }

    #[test]
    fn rejects_fractional_length() {
        assert!(frame_len(8000, 0).is_err());
        assert!(frame_len(11025, 64).is_err());
    }

    #[test]
    fn exact_and_partial_tiling() {
        let s = sig(1024);
        let f = make_frames(&s, 64).unwrap();
        assert_eq!(
            f.iter().map(|f| f.start_sample).collect::<Vec<_>>(),
            vec![0, 512]
        );
        let s = sig(1100);
        assert_eq!(make_frames(&s, 64).unwrap().len(), 2);
        let s = sig(100);
        assert!(make_frames(&s, 64).unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn frames_reassemble_prefix(n in 0usize..3000) {
            let s = sig(n);
            let frames = make_frames(&s, 64).unwrap();
            prop_assert_eq!(frames.len(), n / 512);
            let joined: Vec<f64> = frames.iter().flat_map(|f| f.samples.iter().copied()).collect();
            prop_assert_eq!(joined.as_slice(), &s.samples()[..frames.len() * 512]);
            for f in &frames {
                prop_assert_eq!(f.start_sample, f.index * 512);
            }
        }
    }
}
