//! Closed-form distances against a transport linear program.

mod oracles;

use chorale_grader::features::Distribution;
use chorale_grader::{wasserstein_categorical, wasserstein_numeric, Histogram, Rational};
use oracles::transport_lp;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_numeric(rng: &mut ChaCha8Rng) -> Distribution<f64> {
    let mut h = Histogram::numeric();
    for _ in 0..rng.gen_range(1..=8) {
        let x = Rational::new(rng.gen_range(-24..=24), rng.gen_range(1..=4));
        h.add_value(x, rng.gen_range(1..=50));
    }
    h.normalize()
}

fn random_categorical(rng: &mut ChaCha8Rng) -> Distribution<f64> {
    let mut h = Histogram::categorical();
    for _ in 0..rng.gen_range(1..=8) {
        let label = [
            "1",
            "#4",
            "b5",
            "2",
            "major",
            "minor",
            "other",
            "P5-similar",
            "x",
        ][rng.gen_range(0..9)];
        h.add_label(label, rng.gen_range(1..=50));
    }
    h.normalize()
}

fn numeric_lp(p: &Distribution<f64>, q: &Distribution<f64>) -> f64 {
    let (Distribution::Numeric(a), Distribution::Numeric(b)) = (p, q) else {
        unreachable!()
    };
    let x = |r: Rational| *r.numer() as f64 / *r.denom() as f64;
    let pm: Vec<f64> = a.iter().map(|e| e.1).collect();
    let qm: Vec<f64> = b.iter().map(|e| e.1).collect();
    transport_lp(&pm, &qm, |i, j| (x(a[i].0) - x(b[j].0)).abs())
}

fn categorical_lp(p: &Distribution<f64>, q: &Distribution<f64>) -> f64 {
    let (Distribution::Categorical(a), Distribution::Categorical(b)) = (p, q) else {
        unreachable!()
    };
    let pm: Vec<f64> = a.iter().map(|e| e.1).collect();
    let qm: Vec<f64> = b.iter().map(|e| e.1).collect();
    transport_lp(&pm, &qm, |i, j| if a[i].0 == b[j].0 { 0.0 } else { 1.0 })
}

#[test]
fn numeric_matches_transport_lp() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..200 {
        let (p, q) = (random_numeric(&mut rng), random_numeric(&mut rng));
        let w = wasserstein_numeric(&p, &q).unwrap();
        let lp = numeric_lp(&p, &q);
        assert!((w - lp).abs() < 1e-9, "{p:?} {q:?}: {w} vs {lp}");
    }
}

#[test]
fn categorical_matches_transport_lp() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xca7);
    for _ in 0..200 {
        let (p, q) = (random_categorical(&mut rng), random_categorical(&mut rng));
        let w = wasserstein_categorical(&p, &q).unwrap();
        let lp = categorical_lp(&p, &q);
        assert!((w - lp).abs() < 1e-9, "{p:?} {q:?}: {w} vs {lp}");
    }
}

#[test]
fn worked_categorical_example() {
    let p = Distribution::categorical(vec![("a".into(), 0.6), ("b".into(), 0.4)]).unwrap();
    let q = Distribution::categorical(vec![
        ("a".into(), 0.25),
        ("b".into(), 0.15),
        ("c".into(), 0.6),
    ])
    .unwrap();
    // ½(|.6-.25| + |.4-.15| + |0-.6|)
    let expected: f64 = 0.5 * (0.35 + 0.25 + 0.6);
    assert!((wasserstein_categorical(&p, &q).unwrap() - expected).abs() < 1e-12);
    assert!((categorical_lp(&p, &q) - expected).abs() < 1e-9);
}
