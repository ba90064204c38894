//! Independent reference implementations shared by the integration and
//! acceptance tests. Nothing here calls into the code under test except to
//! build inputs.
#![allow(dead_code)]

use chorale_grader::model::parse_rational;
use chorale_grader::{Chorale, Key, Mode, NoteEvent, Rational, Voice, VoiceLabel};
use minilp::{ComparisonOp, OptimizationDirection, Problem};

/// Minimum-cost transport between mass vectors `p` and `q` under `cost`,
/// solved as a linear program.
pub fn transport_lp(p: &[f64], q: &[f64], cost: impl Fn(usize, usize) -> f64) -> f64 {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Vec<_>> = (0..p.len())
        .map(|i| {
            (0..q.len())
                .map(|j| lp.add_var(cost(i, j), (0.0, f64::INFINITY)))
                .collect()
        })
        .collect();
    for (i, &pi) in p.iter().enumerate() {
        let row: Vec<_> = vars[i].iter().map(|&v| (v, 1.0)).collect();
        lp.add_constraint(&row, ComparisonOp::Eq, pi);
    }
    // The last column constraint is implied by the others; leaving it out
    // keeps the program feasible under floating-point mass sums.
    for (j, &qj) in q.iter().enumerate().take(q.len().saturating_sub(1)) {
        let col: Vec<_> = vars.iter().map(|r| (r[j], 1.0)).collect();
        lp.add_constraint(&col, ComparisonOp::Eq, qj);
    }
    lp.solve().expect("transport LP is feasible").objective()
}

/// Every repeated substring of at least two tokens, counted by scanning all
/// start positions, with the same non-overlap and containment rules as the
/// miner. Returns `(length, occurrence starts)` ordered by first start, then
/// length.
pub fn brute_force_repeats<K: PartialEq>(tokens: &[K]) -> Vec<(usize, Vec<usize>)> {
    let n = tokens.len();
    let mut found: Vec<(usize, Vec<usize>)> = Vec::new();
    for len in 2..=n {
        for first in 0..=n - len {
            let sub = &tokens[first..first + len];
            let all: Vec<usize> = (0..=n - len)
                .filter(|&s| &tokens[s..s + len] == sub)
                .collect();
            if all[0] != first {
                continue; // already seen from its first occurrence
            }
            let mut starts = Vec::new();
            for s in all {
                if starts.last().is_none_or(|&l: &usize| s >= l + len) {
                    starts.push(s);
                }
            }
            if starts.len() >= 2 {
                found.push((len, starts));
            }
        }
    }
    let text = |(len, starts): &(usize, Vec<usize>)| &tokens[starts[0]..starts[0] + len];
    let mut kept: Vec<(usize, Vec<usize>)> = found
        .iter()
        .filter(|p| {
            !found.iter().any(|q| {
                q.0 > p.0
                    && q.1.len() == p.1.len()
                    && (0..=q.0 - p.0).any(|o| &text(q)[o..o + p.0] == text(p))
            })
        })
        .cloned()
        .collect();
    kept.sort_by_key(|(len, starts)| (starts[0], *len));
    kept
}

/// Builds a chorale from four lines of `PITCH:DUR` tokens (`r` is a rest).
pub fn chorale(id: &str, lines: [&str; 4]) -> Chorale {
    let voices = VoiceLabel::ALL
        .iter()
        .zip(lines)
        .map(|(&label, line)| {
            let mut t = Rational::from_integer(0);
            let mut events = Vec::new();
            for tok in line.split_whitespace() {
                let (p, d) = tok.split_once(':').unwrap();
                let d = parse_rational(d).unwrap();
                if p != "r" {
                    events.push(NoteEvent::new(t, d, p.parse().unwrap()));
                }
                t += d;
            }
            Voice::new(label, events).unwrap()
        })
        .collect();
    let key = Key::new("C".parse().unwrap(), Mode::Major).unwrap();
    Chorale::new(id, voices, key).unwrap()
}

/// A four-part snippet with its hand-annotated parallel errors as
/// `(kind, upper voice, lower voice)`.
pub struct ParallelCase {
    pub name: &'static str,
    pub lines: [&'static str; 4],
    pub expected: Vec<(&'static str, VoiceLabel, VoiceLabel)>,
}

/// Hand-checked snippets. Interval arithmetic for each is in the comments
/// (MIDI numbers, upper minus lower).
pub fn parallel_cases() -> Vec<ParallelCase> {
    use VoiceLabel::{Alto as A, Bass as B, Soprano as S, Tenor as T};
    vec![
        ParallelCase {
            // S-A 72-65=7 -> 74-67=7, both up; bass holds F3
            name: "fifths between soprano and alto",
            lines: ["C5:1 D5:1", "F4:1 G4:1", "A3:1 B3:1", "F3:1 F3:1"],
            expected: vec![("P5-similar", S, A)],
        },
        ParallelCase {
            // T-B 60-48=12 -> 67-43=24, tenor up, bass down
            name: "octave to double octave in contrary motion",
            lines: ["E5:1 D5:1", "G4:1 B4:1", "C4:1 G4:1", "C3:1 G2:1"],
            expected: vec![("P8-contrary", T, B)],
        },
        ParallelCase {
            // S-A 0 -> 0, both up a step
            name: "unisons moving together",
            lines: ["G4:1 A4:1", "G4:1 A4:1", "C4:1 C4:1", "C3:1 F3:1"],
            expected: vec![("P1-similar", S, A)],
        },
        ParallelCase {
            // S-B 72-48=24 -> 74-50=24, both up
            name: "outer voices in octaves",
            lines: ["C5:1 D5:1", "G4:1 F4:1", "E4:1 A3:1", "C3:1 D3:1"],
            expected: vec![("P8-similar", S, B)],
        },
        ParallelCase {
            // T-B 55-48=7 -> 62-43=19, tenor up, bass down
            name: "fifth to twelfth in contrary motion",
            lines: ["E5:1 D5:1", "C5:1 B4:1", "G3:1 D4:1", "C3:1 G2:1"],
            expected: vec![("P5-contrary", T, B)],
        },
        ParallelCase {
            // S-B 67-48=19 -> 67-36=31, soprano holds G4
            name: "oblique motion between compound fifths",
            lines: ["G4:1 G4:1", "E4:1 D4:1", "C4:1 B3:1", "C3:1 C2:1"],
            expected: vec![],
        },
        ParallelCase {
            // every interval repeats but no voice moves
            name: "repeated chord without motion",
            lines: ["G4:1 G4:1", "E4:1 E4:1", "C4:1 C4:1", "C3:1 C3:1"],
            expected: vec![],
        },
        ParallelCase {
            // T-B 60-48=12 -> 60-36=24, tenor holds C4
            name: "oblique motion between octaves",
            lines: ["E5:1 F5:1", "G4:1 A4:1", "C4:1 C4:1", "C3:1 C2:1"],
            expected: vec![],
        },
        ParallelCase {
            // S-A 7 -> 3, S-B 31 -> 32, A-B 24 -> 29: no residue repeats
            name: "perfect intervals resolving to imperfect ones",
            lines: ["D5:1 C5:1", "G4:1 A4:1", "B3:1 C4:1", "G2:1 E2:1"],
            expected: vec![],
        },
        ParallelCase {
            // S-A 7->7, S-B 19->19, A-B 12->12, all up a step
            name: "block chord moved by step",
            lines: ["C5:1 D5:1", "F4:1 G4:1", "A3:1 B3:1", "F3:1 G3:1"],
            expected: vec![
                ("P5-similar", S, A),
                ("P5-similar", S, B),
                ("P8-similar", A, B),
            ],
        },
        ParallelCase {
            // A-T 60-60=0 -> 62-50=12, alto up, tenor down
            name: "unison opening to octave",
            lines: ["E5:1 F5:1", "C4:1 D4:1", "C4:1 D3:1", "C3:1 B2:1"],
            expected: vec![("P8-contrary", A, T)],
        },
        ParallelCase {
            // A below T: |60-67|=7 -> |62-69|=7, both up
            name: "fifths between crossed inner voices",
            lines: ["E5:1 F5:1", "C4:1 D4:1", "G4:1 A4:1", "C3:1 B2:1"],
            expected: vec![("P5-similar", A, T)],
        },
        ParallelCase {
            // S-A 72-65=7 -> 74-67=7 at beats 0 -> 1; the half-beat slice
            // at 3/2 moves only the soprano
            name: "fifths followed by a soprano passing note",
            lines: ["C5:1 D5:1/2 E5:1/2", "F4:1 G4:2", "A3:1 B3:2", "F3:3"],
            expected: vec![("P5-similar", S, A)],
        },
        ParallelCase {
            // S-A 72-67=5 -> 74-69=5: parallel fourths are allowed
            name: "parallel fourths",
            lines: ["C5:1 D5:1", "G4:1 A4:1", "E4:1 F4:1", "C3:1 B2:1"],
            expected: vec![],
        },
    ]
}
