//! Microbenchmarks for the hot paths: disjoint-copy counting, cyclic
//! density, defect sweeps, Britton normal forms, and the amalgam twist DP.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sclcert_core::amalgam::{counting_value_amalgam, modular_group_spec, Side, Syllable};
use sclcert_core::brooks::{defect_lower_bound, homogeneous_value, BrooksPattern};
use sclcert_core::freewords::cyclic_copy_density;
use sclcert_core::scl::{scl_report, ReportOptions};
use sclcert_core::{Alphabet, AmalgamSpec, AmalgamWord, FreeWord, NormalForm};

fn random_reduced_word(rng: &mut ChaCha8Rng, alphabet: &Alphabet, len: usize) -> FreeWord {
    let rank = alphabet.rank() as i32;
    let mut letters: Vec<i32> = Vec::with_capacity(len);
    while letters.len() < len {
        let mut l = rng.gen_range(1..=rank);
        if rng.gen_bool(0.5) {
            l = -l;
        }
        if letters.last() == Some(&-l) {
            continue;
        }
        letters.push(l);
    }
    alphabet.reduce(&letters).expect("letters are in range")
}

fn random_amalgam_word(rng: &mut ChaCha8Rng, spec: &AmalgamSpec, len: usize) -> AmalgamWord {
    let mut syllables = Vec::with_capacity(len);
    let mut side = if rng.gen_bool(0.5) { Side::A } else { Side::B };
    for _ in 0..len {
        let order = spec.factor(side).order();
        let element = loop {
            let x = rng.gen_range(1..order);
            if spec.edge_preimage(side, x).is_none() {
                break x;
            }
        };
        syllables.push(Syllable { side, element });
        side = side.other();
    }
    AmalgamWord::new(spec, syllables).expect("syllables avoid the edge subgroup")
}

fn bench_count_copies(c: &mut Criterion) {
    let alphabet = Alphabet::new(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xbe9c_0001);
    let host = random_reduced_word(&mut rng, &alphabet, 4096);
    let short = alphabet.parse_word("ab").unwrap();
    let long = alphabet.parse_word("abAB").unwrap();
    c.bench_function("count_copies/4096/ab", |b| {
        b.iter(|| black_box(&host).count_copies(&short).unwrap())
    });
    c.bench_function("count_copies/4096/abAB", |b| {
        b.iter(|| black_box(&host).count_copies(&long).unwrap())
    });
}

fn bench_homogenization(c: &mut Criterion) {
    let alphabet = Alphabet::new(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xbe9c_0002);
    let core_word = random_reduced_word(&mut rng, &alphabet, 96);
    let (core, _) = core_word.cyclic_reduce().unwrap();
    let pattern_word = alphabet.parse_word("ab").unwrap();
    let pattern = BrooksPattern::new(pattern_word.clone()).unwrap();
    c.bench_function("cyclic_copy_density/96", |b| {
        b.iter(|| cyclic_copy_density(black_box(&core), &pattern_word).unwrap())
    });
    c.bench_function("homogeneous_value/96", |b| {
        b.iter(|| homogeneous_value(&pattern, black_box(&core_word)))
    });
}

fn bench_defect_sweep(c: &mut Criterion) {
    let alphabet = Alphabet::new(2).unwrap();
    let pattern = BrooksPattern::new(alphabet.parse_word("ab").unwrap()).unwrap();
    c.bench_function("defect_lower_bound/radius-3", |b| {
        b.iter(|| defect_lower_bound(&alphabet, &pattern, 3, 1_000).unwrap())
    });
}

fn bench_normal_form(c: &mut Criterion) {
    let spec = modular_group_spec();
    let mut rng = ChaCha8Rng::seed_from_u64(0xbe9c_0003);
    let x = NormalForm::from_word(&spec, &random_amalgam_word(&mut rng, &spec, 64));
    let y = NormalForm::from_word(&spec, &random_amalgam_word(&mut rng, &spec, 64));
    c.bench_function("normal_form_multiply/64x64", |b| {
        b.iter(|| black_box(&x).multiply(&spec, &y))
    });
}

fn bench_amalgam_counting(c: &mut Criterion) {
    let spec = modular_group_spec();
    let pattern = AmalgamWord::parse_str(&spec, "A:1 B:1").unwrap();
    let host = pattern.power(64).unwrap();
    c.bench_function("counting_value_amalgam/128-syllable-host", |b| {
        b.iter(|| counting_value_amalgam(&spec, black_box(&host), &pattern).unwrap())
    });
}

fn bench_scl_report(c: &mut Criterion) {
    let alphabet = Alphabet::new(2).unwrap();
    let word = alphabet.parse_word("abAB").unwrap();
    let options = ReportOptions::default();
    c.bench_function("scl_report/commutator", |b| {
        b.iter(|| scl_report(&alphabet, black_box(&word), &options).unwrap())
    });
}

criterion_group!(
    benches,
    bench_count_copies,
    bench_homogenization,
    bench_defect_sweep,
    bench_normal_form,
    bench_amalgam_counting,
    bench_scl_report
);
criterion_main!(benches);
