//! Krumhansl–Schmuckler key finding.

use num_traits::Zero;

use crate::model::{Key, Letter, Mode, PitchName, Rational, Voice};

/// Krumhansl–Kessler probe-tone profiles, indexed by semitones above the tonic.
pub const MAJOR_PROFILE: [f64; 12] = [
    6.35, 2.23, 3.48, 2.33, 4.38, 4.09, 2.52, 5.19, 2.39, 3.66, 2.29, 2.88,
];
pub const MINOR_PROFILE: [f64; 12] = [
    6.33, 2.68, 3.52, 5.38, 2.60, 3.53, 2.54, 4.75, 3.98, 2.69, 3.34, 3.17,
];

fn pearson(x: &[f64; 12], y: &[f64; 12]) -> f64 {
    let mx = x.iter().sum::<f64>() / 12.0;
    let my = y.iter().sum::<f64>() / 12.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..12 {
        let (dx, dy) = (x[i] - mx, y[i] - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Duration-weighted pitch-class distribution, normalized exactly before
/// conversion so that uniformly scaled durations give identical weights.
pub fn pitch_class_weights(voices: &[Voice]) -> [f64; 12] {
    let mut totals = [Rational::zero(); 12];
    for v in voices {
        for e in v.events() {
            totals[e.pitch.pitch_class() as usize] += e.duration;
        }
    }
    let sum: Rational = totals.iter().sum();
    if sum.is_zero() {
        return [0.0; 12];
    }
    totals.map(|t| {
        let r = t / sum;
        *r.numer() as f64 / *r.denom() as f64
    })
}

/// Correlation of the weights with the profile of every key, as
/// (tonic pitch class, mode, r), majors first.
pub fn key_correlations(weights: &[f64; 12]) -> Vec<(i32, Mode, f64)> {
    let mut out = Vec::with_capacity(24);
    for (mode, profile) in [(Mode::Major, &MAJOR_PROFILE), (Mode::Minor, &MINOR_PROFILE)] {
        for tonic in 0..12 {
            let rotated: [f64; 12] = std::array::from_fn(|pc| profile[(pc + 12 - tonic) % 12]);
            out.push((tonic as i32, mode, pearson(weights, &rotated)));
        }
    }
    out
}

/// Spells a tonic pitch class with at most one accidental, choosing the
/// spelling whose key signature is closest to `signature` (or to no
/// accidentals). Remaining ties go to the sharp side.
pub fn spell_tonic(pc: i32, mode: Mode, signature: Option<i32>) -> Key {
    let target = signature.unwrap_or(0);
    let mut best: Option<(i32, i32, Key)> = None;
    for letter in Letter::ALL {
        for alter in -1i8..=1 {
            let name = PitchName { letter, alter };
            if name.pitch_class() != pc.rem_euclid(12) {
                continue;
            }
            let key = Key { tonic: name, mode };
            let fifths = key.fifths();
            let score = ((fifths - target).abs(), -fifths);
            if best.is_none_or(|(d, f, _)| score < (d, f)) {
                best = Some((score.0, score.1, key));
            }
        }
    }
    best.expect("every pitch class has a spelling").2
}

/// Finds the key whose profile best correlates with the duration-weighted
/// pitch-class content. Exact ties prefer major, then the lower tonic pitch
/// class. `signature` (sharps positive, flats negative) only steers spelling.
pub fn detect_key(voices: &[Voice], signature: Option<i32>) -> Key {
    let weights = pitch_class_weights(voices);
    let mut best = (0, Mode::Major, f64::NEG_INFINITY);
    for cand in key_correlations(&weights) {
        if cand.2 > best.2 {
            best = cand;
        }
    }
    spell_tonic(best.0, best.1, signature)
}
