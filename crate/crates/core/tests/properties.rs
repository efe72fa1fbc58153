use std::collections::HashSet;

use negdep::integrands::{g2, h1, SanNetwork};
use negdep::negdep::{c_value, criterion_with, gamma, m_count, net_closed_form, CriterionBase, CriterionConfig, Gamma, KVector};
use negdep::numth::{mod_mat_vec, pascal_power, DigitVector, ModMatrix};
use negdep::permute::{factors_method1, factors_method2, faure92_permutations, offset_permutation};
use negdep::randomize::{derive_stream, randomize, RandomizerKind, RandomizerSpec, SplitMix64};
use negdep::sequences::{
    faure_set, halton_set, packed_value, Family, FaureGeneralization, IndexOrder, PointSet, SequenceSpec,
};
use negdep::permute::FactorVector;
use negdep::Exec;
use proptest::prelude::*;

const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(PRIMES.to_vec())
}

fn lower_triangular(b: u32, k: usize, seed: u64) -> ModMatrix {
    let mut rng = SplitMix64::new(seed);
    let rows = (0..k)
        .map(|r| {
            (0..k)
                .map(|c| match c.cmp(&r) {
                    std::cmp::Ordering::Less => rng.below(b as u64) as u32,
                    std::cmp::Ordering::Equal => 1 + rng.below(b as u64 - 1) as u32,
                    std::cmp::Ordering::Greater => 0,
                })
                .collect()
        })
        .collect();
    ModMatrix::from_rows(b, rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pascal_powers_compose(b in prime(), c1 in 0u32..40, c2 in 0u32..40, k in 1usize..8) {
        let (c1, c2) = (c1 % b, c2 % b);
        let lhs = pascal_power(b, c1, k).unwrap().mul(&pascal_power(b, c2, k).unwrap()).unwrap();
        // P^b is the identity mod b
        prop_assert_eq!(lhs, pascal_power(b, (c1 + c2) % b, k).unwrap());
    }

    #[test]
    fn nonsingular_maps_are_injective(b in prime(), k in 1usize..6, seed: u64, x in any::<u64>(), y in any::<u64>()) {
        let m = lower_triangular(b, k, seed);
        let digits = |mut v: u64| -> DigitVector {
            let d = (0..k).map(|_| { let r = (v % b as u64) as u32; v /= b as u64; r }).collect();
            DigitVector::new(b, d).unwrap()
        };
        let (dx, dy) = (digits(x), digits(y));
        let (ix, iy) = (mod_mat_vec(&m, &dx).unwrap(), mod_mat_vec(&m, &dy).unwrap());
        prop_assert_eq!(dx == dy, ix == iy);
    }

    #[test]
    fn gamma_symmetric_and_prefix(b in prime(), x in prop::collection::vec(0u32..64, 6), y in prop::collection::vec(0u32..64, 6)) {
        let dx = DigitVector::new(b, x.iter().map(|v| v % b).collect()).unwrap();
        let dy = DigitVector::new(b, y.iter().map(|v| v % b).collect()).unwrap();
        let g = gamma(&dx, &dy).unwrap();
        prop_assert_eq!(g, gamma(&dy, &dx).unwrap());
        for t in 0..=6usize {
            let shares = dx.digits[..t] == dy.digits[..t];
            prop_assert_eq!(shares, g >= Gamma::Digits(t));
        }
    }

    #[test]
    fn m_count_matches_pair_loop(s in 1usize..4, n in 1usize..40, seed: u64, k in prop::collection::vec(0u32..6, 3)) {
        let mut rng = SplitMix64::new(seed);
        let bases: Vec<u32> = (0..s).map(|_| [2, 3, 5][rng.below(3) as usize]).collect();
        let reals: Vec<f64> = (0..n * s).map(|_| (rng.below(16) as f64) / 16.0).collect();
        let p = PointSet::from_reals(bases.clone(), &reals).unwrap();
        let k = KVector(k[..s].to_vec());
        let cell = |i: usize, j: usize| (p.value(i, j) * (bases[j] as f64).powi(k.0[j] as i32)).floor() as u64;
        let mut brute = 0u64;
        for i in 0..n {
            for l in 0..n {
                if i != l && (0..s).all(|j| cell(i, j) == cell(l, j)) {
                    brute += 1;
                }
            }
        }
        prop_assert_eq!(m_count(&p, &k, &CriterionBase::PerCoordinate(bases)).unwrap(), brute);
    }

    #[test]
    fn randomizers_keep_gamma(seed: u64, kind in prop::sample::select(vec![
        RandomizerKind::DigitalShift, RandomizerKind::OwenScramble, RandomizerKind::LinearScramble,
    ])) {
        let p = faure_set(40, 3, 5, &FaureGeneralization::None, 1).unwrap();
        let q = randomize(&p, &RandomizerSpec::new(kind, seed, 3)).unwrap();
        for i in 0..40 {
            for l in (i + 1)..40 {
                for j in 0..3 {
                    prop_assert_eq!(gamma(&p.digits(i, j), &p.digits(l, j)).unwrap(), gamma(&q.digits(i, j), &q.digits(l, j)).unwrap());
                }
            }
        }
    }

    #[test]
    fn gray_prefixes_are_nets(b in prop::sample::select(vec![2u32, 3, 5, 7]), m in 1u32..4) {
        let n = (b as usize).pow(m);
        let rows = |o| {
            let p = SequenceSpec::new(Family::Faure, b as usize).with_base(b).with_order(o).generate(n).unwrap();
            let mut v: Vec<Vec<u64>> = (0..n).map(|i| p.row(i).to_vec()).collect();
            v.sort();
            v
        };
        prop_assert_eq!(rows(IndexOrder::Natural), rows(IndexOrder::Gray));
    }

    #[test]
    fn packed_values_round_once(y: u64, b in prop::sample::select(vec![3u32, 5, 53])) {
        let k = negdep::numth::digit_precision(b);
        let scale = negdep::numth::checked_pow(b, k).unwrap();
        let y = y % scale;
        let v = packed_value(y, scale);
        prop_assume!(y > 0 && v < 0.5);
        // v = m / 2^e exactly, with a 53-bit mantissa
        let bits = v.to_bits();
        let e = 1075 - ((bits >> 52) & 0x7ff) as i32;
        let m = (bits & ((1 << 52) - 1)) | (1 << 52);
        let lhs = (y as i128) << e;
        let rhs = m as i128 * scale as i128;
        prop_assert!(2 * (lhs - rhs).abs() <= (scale as i128), "y={y} scale={scale} v={v}");
    }

    #[test]
    fn g2_factorizes(x in prop::collection::vec(0.0f64..1.0, 1..8), y in prop::collection::vec(0.0f64..1.0, 1..8), c in 0.0f64..1.0) {
        let joined: Vec<f64> = x.iter().chain(&y).copied().collect();
        let lhs = g2(&joined, c);
        let rhs = g2(&x, c) * g2(&y, c);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn san_is_monotone(x in prop::collection::vec(0.0f64..1.0, 12), arc in 0usize..12, bump in 0.0f64..1.0) {
        let net = SanNetwork::default_network();
        let mut y = x.clone();
        y[arc] = x[arc] + (1.0 - x[arc]) * bump * 0.999;
        prop_assert!(net.longest_path(&y).unwrap() >= net.longest_path(&x).unwrap());
    }
}

#[test]
fn faure92_bijections_and_offsets() {
    for p in faure92_permutations(199).unwrap() {
        let b = p.base;
        let mut seen = p.map.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..b).collect::<Vec<_>>(), "base {b}");
        assert_eq!(p.map[0], 0);
        if b % 2 == 1 {
            assert_eq!(p.map[(b / 2) as usize], b / 2, "middle entry of base {b}");
        }
        assert_eq!(offset_permutation(&p).map[(b / 2) as usize], 0, "offset of base {b}");
        for f in [factors_method1(&p).unwrap(), factors_method2(&p).unwrap()] {
            let mut v = f.factors.clone();
            v.sort_unstable();
            assert_eq!(v, (1..b).collect::<Vec<_>>(), "factors of base {b}");
        }
    }
}

#[test]
fn halton_strata() {
    let p = halton_set(243, 5, None, 1).unwrap();
    for (j, &b) in p.bases().iter().enumerate() {
        let mut m = 0;
        while (b as usize).pow(m + 1) <= p.n() {
            m += 1;
        }
        let n = (b as usize).pow(m);
        let width = p.scale()[j] / n as u64;
        let mut cells: Vec<u64> = (0..n).map(|i| p.raw(i, j) / width).collect();
        cells.sort_unstable();
        assert_eq!(cells, (0..n as u64).collect::<Vec<_>>(), "coordinate {j}");
    }
}

#[test]
fn unit_factors_give_faure() {
    let plain = faure_set(300, 6, 7, &FaureGeneralization::None, 1).unwrap();
    let ones = faure_set(300, 6, 7, &FaureGeneralization::Factors(FactorVector::ones(7, 6)), 1).unwrap();
    assert_eq!(plain, ones);
}

#[test]
fn faure_nets_meet_closed_form() {
    for (b, s, m) in [(5u32, 4usize, 3u32), (13, 12, 2)] {
        let p = faure_set((b as usize).pow(m), s, b, &FaureGeneralization::None, 1).unwrap();
        let base = CriterionBase::Uniform(b);
        let mut rng = SplitMix64::new(b as u64);
        for _ in 0..60 {
            let mut k = vec![0u32; s];
            for _ in 0..rng.below(m as u64 + 1) {
                k[rng.below(s as u64) as usize] += 1;
            }
            let k = KVector(k);
            let want = net_closed_form(b, m, k.norm()).unwrap();
            assert!((c_value(&p, &k, &base).unwrap() - want).abs() < 1e-12, "b={b} k={k}");
        }
    }
}

#[test]
fn owen_marginals_are_uniform() {
    // one fixed point, many scramblings: first digit should hit each of 5 values about equally
    let p = faure_set(7, 2, 5, &FaureGeneralization::None, 1).unwrap();
    let trials = 5000;
    let mut counts = [0usize; 5];
    for seed in 0..trials {
        let q = randomize(&p, &RandomizerSpec::new(RandomizerKind::OwenScramble, seed, 0)).unwrap();
        counts[q.digits(6, 1).digits[0] as usize] += 1;
    }
    let expect = trials as f64 / 5.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
    assert!(chi2 < 20.0, "counts {counts:?}");
}

#[test]
fn sequential_and_parallel_agree() {
    let spec = SequenceSpec::new(Family::Halton, 9);
    let a = spec.generate_with(3000, Exec::Sequential).unwrap();
    let b = spec.generate_with(3000, Exec::Parallel).unwrap();
    assert_eq!(a, b);
    let r = negdep::randomize::Randomization::for_points(&RandomizerSpec::new(RandomizerKind::LinearScramble, 4, 1), &a).unwrap();
    assert_eq!(r.apply(&a, Exec::Sequential).unwrap(), r.apply(&a, Exec::Parallel).unwrap());
    let cfg = CriterionConfig::new(2, 9, Some(10));
    let base = CriterionBase::Uniform(2);
    assert_eq!(criterion_with(&a, &base, &cfg, Exec::Sequential).unwrap(), criterion_with(&a, &base, &cfg, Exec::Parallel).unwrap());
    let cfg3 = CriterionConfig::new(3, 4, Some(5));
    assert_eq!(criterion_with(&a, &base, &cfg3, Exec::Sequential).unwrap(), criterion_with(&a, &base, &cfg3, Exec::Parallel).unwrap());
}

#[test]
fn h1_monte_carlo_mean() {
    let s = 5;
    let mut rng = SplitMix64::new(77);
    let n = 400_000;
    let mut x = vec![0.0; s];
    let mut sum = 0.0;
    for _ in 0..n {
        x.iter_mut().for_each(|v| *v = rng.next_f64());
        sum += h1(&x);
    }
    let mu = s as f64 / 3.0 + (s * (s - 1)) as f64 / 4.0;
    assert!((sum / n as f64 - mu).abs() < 0.02, "{}", sum / n as f64);
}

#[test]
fn stream_seeds_do_not_collide() {
    let mut seen = HashSet::new();
    for v in 0..1000u64 {
        for c in 0..100u64 {
            assert!(seen.insert(derive_stream(42, v, c)), "collision at v={v} c={c}");
        }
    }
}
