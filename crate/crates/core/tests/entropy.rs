use anosov_core::classical::{HyperbolicToralMap, TrigPolynomial};
use anosov_core::entropy::*;
use anosov_core::measures::{gof_eigenbasis, gof_random, TimeWeights};
use anosov_core::quantum::*;
use anosov_core::{Error, C64};
use anosov_linalg::vector::norm_sqr;
use anosov_linalg::{operator_norm, ComplexMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn plk(n: usize) -> PlanckData {
    PlanckData::new(n).unwrap()
}

fn cat_prop(n: usize) -> CatPropagator {
    CatPropagator::new(&HyperbolicToralMap::cat(), plk(n)).unwrap()
}

fn strips() -> SmoothPartition {
    build_partition(3, 0.055, 31).unwrap()
}

fn random_states(n: usize, count: usize, seed: u64) -> Vec<QuantumState> {
    gof_random(plk(n), count, seed)
        .unwrap()
        .states
        .into_iter()
        .map(|s| QuantumState::new(plk(n), s).unwrap())
        .collect()
}

/// sin⁸(πx) = ((1 − cos 2πx)/2)⁴, vanishing to eighth order at x = 0.
fn sin8(k: (i64, i64)) -> TrigPolynomial {
    let half = TrigPolynomial::constant(0.5).sub(&TrigPolynomial::cosine(k, 0.5));
    let sq = half.mul(&half);
    sq.mul(&sq)
}

#[test]
fn single_atom_partition_is_one() {
    let p = build_partition(1, 0.1, 8).unwrap();
    assert_eq!(p.atoms().len(), 1);
    for x in [0.0, 0.3, 0.77] {
        assert_eq!(p.eval(0, x), 1.0);
    }
}

#[test]
fn partition_sum_of_squares() {
    for (k, w, b) in [(3, 0.055, 31), (3, 0.03, 127), (4, 0.05, 40), (5, 0.04, 50)] {
        let p = build_partition(k, w, b).unwrap();
        assert!(p.defect() <= 1e-10);
        assert!(p.atoms().iter().all(|a| a.is_real() && a.is_x_only()));
        for points in [4 * k * k, 3001] {
            for i in 0..points {
                let x = i as f64 / points as f64;
                let s: f64 = (0..k).map(|j| p.eval(j, x).powi(2)).sum();
                assert!((s - 1.0).abs() <= 1e-10, "K = {k}: {s} at {x}");
            }
        }
    }
}

#[test]
fn partition_atoms_are_localized() {
    let (k, w) = (3, 0.03);
    let p = build_partition(k, w, 127).unwrap();
    let margin = 6.0 * w;
    for atom in 0..k {
        let lo = atom as f64 / k as f64 - margin;
        let hi = (atom + 1) as f64 / k as f64 + margin;
        let mut worst: f64 = 0.0;
        for i in 0..4000 {
            let x = i as f64 / 4000.0;
            let inside = [x - 1.0, x, x + 1.0].iter().any(|y| *y >= lo && *y <= hi);
            if !inside {
                worst = worst.max(p.eval(atom, x).abs());
            }
        }
        assert!(worst <= 1e-8, "atom {atom}: {worst:e}");
        let centre = (atom as f64 + 0.5) / k as f64;
        assert!((p.eval(atom, centre) - 1.0).abs() < 1e-8);
    }
}

#[test]
fn two_strip_partition_reports_its_defect() {
    // Real band-limited translates h(x), h(x − ½) cannot satisfy h² + h(·−½)² ≡ 1.
    match build_partition(2, 0.06, 31) {
        Err(Error::PartitionDefect { defect }) => assert!(defect > 1e-10),
        other => panic!("{other:?}"),
    }
    assert!(build_partition(3, 0.2, 31).is_err());
    assert!(build_partition(0, 0.05, 31).is_err());
}

#[test]
fn partition_aliasing_is_rejected() {
    let p = strips();
    let prop = cat_prop(32);
    assert!(QuantumPartition::new(&p, &prop).is_err());
}

#[test]
fn length_one_element_is_the_multiplication_operator() {
    let p = strips();
    let n = 64;
    let prop = cat_prop(n);
    let qp = QuantumPartition::new(&p, &prop).unwrap();
    for k in 0..3 {
        let e = qp.element(&[k]).unwrap();
        let expect = ComplexMatrix::from_diag(
            &(0..n)
                .map(|j| C64::new(p.eval(k, j as f64 / n as f64), 0.0))
                .collect::<Vec<_>>(),
        );
        assert!(e.matrix.max_abs_diff(&expect) < 1e-13);
    }
}

#[test]
fn refined_elements_are_contractions() {
    let p = strips();
    let prop = cat_prop(64);
    let qp = QuantumPartition::new(&p, &prop).unwrap();
    for w in [vec![0, 1, 2], vec![2, 2], vec![1, 0, 0, 1]] {
        assert!(qp.element(&w).unwrap().norm().unwrap() <= 1.0 + 1e-9);
    }
}

#[test]
fn refined_element_matches_conjugation_formula() {
    // π_α = U^{-2} P̂_{α2} U^{2} · U^{-1} P̂_{α1} U · P̂_{α0}
    let p = strips();
    let n = 64;
    let prop = cat_prop(n);
    let qp = QuantumPartition::new(&p, &prop).unwrap();
    let u = prop.matrix();
    let ud = u.adjoint();
    let diag = |k: usize| {
        ComplexMatrix::from_diag(
            &(0..n)
                .map(|j| C64::new(p.eval(k, j as f64 / n as f64), 0.0))
                .collect::<Vec<_>>(),
        )
    };
    let word = [2, 0, 1];
    let p1 = ud.matmul(&diag(0)).matmul(&u);
    let p2 = ud.matmul(&ud).matmul(&diag(1)).matmul(&u).matmul(&u);
    let expect = p2.matmul(&p1).matmul(&diag(2));
    let got = qp.element(&word).unwrap().matrix;
    assert!(got.max_abs_diff(&expect) < 1e-12);
}

#[test]
fn dual_resolutions_of_identity() {
    let p = strips();
    let n = 64;
    let prop = cat_prop(n);
    let qp = QuantumPartition::new(&p, &prop).unwrap();
    let len = 4;
    let mut left = ComplexMatrix::zeros(n, n);
    let mut right = ComplexMatrix::zeros(n, n);
    for idx in 0..81 {
        let e = qp.element(&qp.word(len, idx)).unwrap().matrix;
        left = left.add(&e.matmul(&e.adjoint()));
        right = right.add(&e.adjoint_matmul(&e));
    }
    let id = ComplexMatrix::identity(n);
    assert!(left.max_abs_diff(&id) < 1e-9);
    assert!(right.max_abs_diff(&id) < 1e-9);
}

#[test]
fn weight_tables_match_dense_elements() {
    let p = strips();
    let n = 64;
    let prop = cat_prop(n);
    let qp = QuantumPartition::new(&p, &prop).unwrap();
    let u = &random_states(n, 1, 3)[0];
    let len = 3;
    let plus = qp.plus_weights(u.amplitudes(), len).unwrap();
    let minus = qp.minus_weights(u.amplitudes(), len).unwrap();
    for idx in 0..27 {
        let e = qp.element(&qp.word(len, idx)).unwrap().matrix;
        let a = norm_sqr(&e.matvec(u.amplitudes()));
        let b = norm_sqr(&e.adjoint_matvec(u.amplitudes()));
        assert!((plus[idx] - a).abs() < 1e-13);
        assert!((minus[idx] - b).abs() < 1e-13);
    }
}

#[test]
fn entropy_bounds_and_totals() {
    let p = strips();
    let prop = cat_prop(64);
    let qp = QuantumPartition::new(&p, &prop).unwrap();
    for u in random_states(64, 4, 8) {
        for len in 1..=4 {
            let e = quantum_entropies(&u, len, &qp).unwrap();
            assert!((e.plus_total() - 1.0).abs() < 1e-8);
            assert!((e.minus_total() - 1.0).abs() < 1e-8);
            assert!(e
                .plus_weights
                .iter()
                .chain(&e.minus_weights)
                .all(|w| *w >= 0.0 && *w <= 1.0 + 1e-9));
            for h in [e.h_plus, e.h_minus] {
                assert!(h >= 0.0 && h <= e.max_entropy() + 1e-6);
            }
        }
    }
    let one = build_partition(1, 0.1, 4).unwrap();
    let qp1 = QuantumPartition::new(&one, &prop).unwrap();
    let e = quantum_entropies(&random_states(64, 1, 1)[0], 3, &qp1).unwrap();
    assert!(e.h_plus.abs() < 1e-12 && e.h_minus.abs() < 1e-12);
}

#[test]
fn position_state_inside_an_atom_has_low_entropy() {
    let p = strips();
    let n = 64;
    let prop = cat_prop(n);
    let qp = QuantumPartition::new(&p, &prop).unwrap();
    // site 32 sits at x = 1/2, the centre of the middle strip
    let u = QuantumState::position(plk(n), 32);
    let e = quantum_entropies(&u, 1, &qp).unwrap();
    assert!(e.h_plus <= 0.05, "{}", e.h_plus);
    assert!(e.plus_weights[1] > 0.99);
}

#[test]
fn averaged_entropies_properties() {
    let p = strips();
    let prop = cat_prop(64);
    let qp = QuantumPartition::new(&p, &prop).unwrap();
    let u = &random_states(64, 1, 21)[0];
    let single = quantum_entropies(u, 3, &qp).unwrap();
    let delta = averaged_entropies(u, &TimeWeights::delta(0), 3, &qp).unwrap();
    assert!((single.h_plus - delta.h_plus).abs() < 1e-14);
    assert!((single.h_minus - delta.h_minus).abs() < 1e-14);

    let theta = TimeWeights::new(vec![0.1, 0.3, 0.2, 0.4], 1).unwrap();
    let avg = averaged_entropies(u, &theta, 3, &qp).unwrap();
    let (mut hp, mut hm) = (0.0, 0.0);
    for (t, w) in theta.iter() {
        let mut v = u.amplitudes().to_vec();
        prop.apply_power(&mut v, t);
        let e = quantum_entropies(&QuantumState::new(plk(64), v).unwrap(), 3, &qp).unwrap();
        hp += w * e.h_plus;
        hm += w * e.h_minus;
    }
    assert!(avg.h_plus >= hp - 1e-8);
    assert!(avg.h_minus >= hm - 1e-8);

    let fam = gof_eigenbasis(&prop.operator()).unwrap();
    let v = QuantumState::new(plk(64), fam.states[5].clone()).unwrap();
    let a = averaged_entropies(&v, &TimeWeights::uniform(2).unwrap(), 3, &qp).unwrap();
    let b = quantum_entropies(&v, 3, &qp).unwrap();
    assert!((a.h_plus - b.h_plus).abs() < 1e-9);
    assert!((a.h_minus - b.h_minus).abs() < 1e-9);
}

#[test]
fn word_search_matches_brute_force() {
    let p = strips();
    let prop = cat_prop(64);
    let qp = QuantumPartition::new(&p, &prop).unwrap();
    for n in 1..=2 {
        let s = uncertainty_constant(&qp, n).unwrap();
        let mut brute: f64 = 0.0;
        for idx in 0..3usize.pow(2 * n as u32) {
            let w = qp.word(2 * n, idx);
            brute = brute.max(operator_norm(&qp.element(&w).unwrap().matrix).unwrap());
        }
        assert!(
            (s.value - brute).abs() < 1e-9,
            "n = {n}: {} vs {brute}",
            s.value
        );
        let at = operator_norm(&qp.element(&s.word).unwrap().matrix).unwrap();
        assert!((at - s.value).abs() < 1e-9);
    }
}

#[test]
fn uncertainty_inequality_holds() {
    let p = strips();
    let prop = cat_prop(64);
    let qp = QuantumPartition::new(&p, &prop).unwrap();
    let fam = gof_eigenbasis(&prop.operator()).unwrap();
    let eig: Vec<QuantumState> = fam.states[..5]
        .iter()
        .map(|s| QuantumState::new(plk(64), s.clone()).unwrap())
        .collect();
    for n in 1..=3 {
        let c = uncertainty_constant(&qp, n).unwrap();
        assert!(c.value > 0.0 && c.value <= 1.0 + 1e-9);
        for u in random_states(64, 5, 40 + n as u64).iter().chain(&eig) {
            let r = uncertainty_check(u, &qp, &c).unwrap();
            assert!(r.holds, "n = {n}: {} < {}", r.lhs, r.bound);
            assert!(r.energy_cutoff_identity);
            assert!((r.gap - (r.lhs - r.bound)).abs() < 1e-15);
        }
    }
    let one = build_partition(1, 0.1, 4).unwrap();
    let qp1 = QuantumPartition::new(&one, &prop).unwrap();
    let c = uncertainty_constant(&qp1, 2).unwrap();
    assert!((c.value - 1.0).abs() < 1e-12);
    let r = uncertainty_check(&random_states(64, 1, 2)[0], &qp1, &c).unwrap();
    assert!(r.holds && r.lhs.abs() < 1e-12);
}

#[test]
fn norm_decay_is_monotone() {
    let p = strips();
    let prop = cat_prop(128);
    let qp = QuantumPartition::new(&p, &prop).unwrap();
    let rep = norm_decay_scan(&qp, 0..=3).unwrap();
    assert_eq!(rep.ehrenfest, 5);
    assert!(rep.rows[0].value <= 1.0);
    for w in rep.rows.windows(2) {
        assert!(w[1].value <= w[0].value * 1.1);
    }
    assert!(rep.fitted_rate.unwrap() > 0.0);
    assert!((rep.predicted_rate - HyperbolicToralMap::cat().log_lambda() / 2.0).abs() < 1e-15);
    assert!(norm_decay_scan(&qp, 0..=10).is_err());

    let one = build_partition(1, 0.1, 4).unwrap();
    let qp1 = QuantumPartition::new(&one, &prop).unwrap();
    let flat = norm_decay_scan(&qp1, 0..=3).unwrap();
    assert!(flat.rows.iter().all(|r| (r.value - 1.0).abs() < 1e-12));
}

#[test]
fn ehrenfest_time() {
    let cat = HyperbolicToralMap::cat();
    assert_eq!(ehrenfest(plk(256), 0.0, &cat).unwrap(), 5);
    assert_eq!(ehrenfest(plk(256), 0.999, &cat).unwrap(), 0);
    assert!(ehrenfest(plk(256), 1.0, &cat).is_err());
    let mut prev = 0;
    for n in 2..2000 {
        let e = ehrenfest(plk(n), 0.1, &cat).unwrap();
        assert!(e >= prev);
        prev = e;
    }
}

#[test]
fn subadditivity_defects() {
    let p = strips();
    let prop = cat_prop(256);
    let qp = QuantumPartition::new(&p, &prop).unwrap();
    let mut worst: f64 = 0.0;
    for u in random_states(256, 10, 77) {
        let r = subadditivity_check(&u, 2, 3, &qp).unwrap();
        assert!(r.defect >= 0.0);
        assert!(r.defect >= r.r_plus && r.defect >= r.r_minus);
        worst = worst.max(r.defect);
    }
    println!("max subadditivity defect at N = 256: {worst:.4}");
    assert!(worst <= 0.15, "{worst}");
    assert!(subadditivity_check(&random_states(256, 1, 1)[0], 3, 3, &qp).is_err());

    let one = build_partition(1, 0.1, 4).unwrap();
    let qp1 = QuantumPartition::new(&one, &prop).unwrap();
    let r = subadditivity_check(&random_states(256, 1, 5)[0], 2, 3, &qp1).unwrap();
    assert!(r.defect.abs() < 1e-12);
}

#[test]
fn classical_cylinder_subadditivity_is_exact() {
    // Empirical cylinder measure of a non-invariant sample: the joint
    // entropy of (first n symbols, next m symbols) is at most the sum.
    use std::collections::HashMap;
    let cat = HyperbolicToralMap::cat();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let k = 3usize;
    let (n, m) = (3usize, 2usize);
    let codes: Vec<Vec<usize>> = (0..20_000)
        .map(|_| {
            let mut p = (0.2 * rng.random::<f64>(), 0.5 * rng.random::<f64>());
            (0..n + m)
                .map(|_| {
                    let s = ((p.0 * k as f64) as usize).min(k - 1);
                    p = cat.apply(p);
                    s
                })
                .collect()
        })
        .collect();
    let entropy = |range: std::ops::Range<usize>| {
        let mut counts: HashMap<&[usize], usize> = HashMap::new();
        for c in &codes {
            *counts.entry(&c[range.clone()]).or_default() += 1;
        }
        let total = codes.len() as f64;
        counts
            .values()
            .map(|&c| {
                let q = c as f64 / total;
                -q * q.ln()
            })
            .sum::<f64>()
    };
    let joint = entropy(0..n + m);
    let split = entropy(0..n) + entropy(n..n + m);
    assert!(joint <= split + 1e-12, "{joint} > {split}");
}

#[test]
fn observability_trivial_symbols() {
    let prop = cat_prop(32);
    for t in [1, 3, 8] {
        let r = observability_constant(&TrigPolynomial::constant(1.0), t, &prop).unwrap();
        assert!((r.constant - 1.0 / t as f64).abs() < 1e-10);
        assert!(r.observable);
    }
    let r = observability_constant(&TrigPolynomial::zero(), 4, &prop).unwrap();
    assert!(!r.observable);
    assert!(r.constant.is_infinite());
    assert!(observability_constant(&TrigPolynomial::cosine((1, 1), 1.0), 4, &prop).is_err());
}

#[test]
fn observability_monotone_and_psd() {
    let prop = cat_prop(64);
    let a = sin8((1, 0));
    let mut prev = f64::INFINITY;
    for t in 1..=8 {
        let r = observability_constant(&a, t, &prop).unwrap();
        assert!(r.gram_hermitian_defect < 1e-12);
        assert!(r.lambda_min >= -1e-10);
        assert!(r.constant <= prev + 1e-10, "T = {t}");
        // Gram ≤ T·Id when |a| ≤ 1
        assert!(r.constant >= 1.0 / t as f64);
        let g = r.gram.matvec(&r.minimizer);
        let rq: C64 = r.minimizer.iter().zip(&g).map(|(x, y)| x.conj() * y).sum();
        assert!((rq.re - r.lambda_min).abs() < 1e-9);
        prev = r.constant;
    }
    assert!(prev.is_finite());
}

#[test]
fn survivor_set_examples() {
    let cat = HyperbolicToralMap::cat();
    let positive = TrigPolynomial::constant(2.0).add(&TrigPolynomial::cosine((1, 0), 1.0));
    let r = survivor_set(&positive, 4, 64, &cat).unwrap();
    assert_eq!(r.count(), 0);
    assert_eq!(r.dimension, 0.0);

    let r = survivor_set(&TrigPolynomial::zero(), 4, 64, &cat).unwrap();
    assert_eq!(r.count(), 64 * 64);
    assert!((r.dimension - 2.0).abs() < 1e-12);
    assert!(!r.hypothesis_holds);

    let origin = sin8((1, 0)).add(&sin8((0, 1)));
    let r = survivor_set(&origin, 8, 512, &cat).unwrap();
    assert!(r.points.contains(&(0, 0)));
    assert!(r.dimension <= 1.2, "{}", r.dimension);
    assert!(r.hypothesis_holds);
    let shallow = survivor_set(&origin, 1, 512, &cat).unwrap();
    assert!(shallow.count() >= r.count());
    assert!(r.to_csv().contains("# n,count,dimension_estimate"));
    assert!(survivor_set(&origin, 8, 4096, &cat).is_err());
}

#[test]
fn limit_entropy_examples() {
    let p = strips();
    let n = 256;
    let prop = cat_prop(n);
    let qp = QuantumPartition::new(&p, &prop).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let spread: Vec<C64> = (0..n)
        .map(|_| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * rng.random::<f64>()))
        .collect();
    let states = vec![
        QuantumState::new(plk(n), spread).unwrap(),
        QuantumState::position(plk(n), 128),
    ];
    let rep = limit_entropy_estimate(&[(&qp, &states)], 4).unwrap();
    let log3 = 3f64.ln();
    assert!((rep.max_rate - log3).abs() < 1e-15);
    let h = rep.rows[0].h_plus_rate;
    assert!(h >= 0.8 * log3 && h <= log3 + 1e-9, "{h}");

    let low = limit_entropy_estimate(&[(&qp, &states[1..])], 1).unwrap();
    let high = limit_entropy_estimate(&[(&qp, &states[1..])], 4).unwrap();
    assert!(low.rows[0].h_plus_rate < 0.05);
    assert!(high.rows[0].h_plus_rate > low.rows[0].h_plus_rate);

    let one = build_partition(1, 0.1, 4).unwrap();
    let qp1 = QuantumPartition::new(&one, &prop).unwrap();
    let z = limit_entropy_estimate(&[(&qp1, &states)], 3).unwrap();
    assert!(z
        .rows
        .iter()
        .all(|r| r.h_plus_rate.abs() < 1e-12 && r.h_minus_rate.abs() < 1e-12));
}
