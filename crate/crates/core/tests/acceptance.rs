//! Acceptance suite: one test per shipped guarantee, each printing a PASS
//! line with its elapsed time (visible under --nocapture or on failure).

use std::collections::HashSet;
use std::time::Instant;

use detsense_core::galois::{additive_character, character_sum};
use detsense_core::{
    coherence, compare_vs_kronecker, compose_codebooks, construct_example1, construct_example2,
    construct_example3, construct_example4, coset_reduce, enumerate_codewords, exponentiate,
    gaussian_matrix, generate_sparse_signal, kronecker, measure, omp, run_experiment,
    rs2_generator, sampled_coherence, verify_gfp_closure, Codebook, ExperimentAxis,
    ExperimentConfig, FieldSpec, MatrixSource, OmpStop, RowSelection, SensingMatrix,
};
use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Criterion {
    n: usize,
    start: Instant,
}

impl Criterion {
    fn begin(n: usize) -> Self {
        Criterion { n, start: Instant::now() }
    }

    fn pass(self, msg: &str) {
        println!(
            "PASS criterion {}: {} ({:.1}s)",
            self.n,
            msg,
            self.start.elapsed().as_secs_f64()
        );
    }
}

fn rs2_codebook(order: u64, num_points: u64) -> Codebook {
    let field = FieldSpec::of_order(order).unwrap();
    let points: Vec<_> = (0..num_points)
        .map(|i| field.element_from_index(i).unwrap())
        .collect();
    enumerate_codewords(&rs2_generator(&field, &points).unwrap()).unwrap()
}

fn composed_matrix(p: u64, pattern_points: u64) -> Array2<u64> {
    let base = rs2_codebook(p, p);
    let pattern = rs2_codebook(p * p, pattern_points);
    compose_codebooks(&base, &pattern).unwrap().matrix
}

#[test]
fn criterion_01_constructed_coherences_match_closed_forms() {
    let c = Criterion::begin(1);
    for p in [3u64, 5, 7] {
        let mat = construct_example1(p).unwrap();
        assert_eq!((mat.m(), mat.n()), ((p * p) as usize, (p * p * p) as usize));
        let report = coherence(&mat).unwrap();
        let expected = 1.0 / p as f64;
        assert!(
            (report.exact - expected).abs() <= 1e-9,
            "p = {p}: coherence {} vs expected {expected}",
            report.exact
        );

        let mat2 = construct_example2(p).unwrap();
        assert_eq!(
            (mat2.m(), mat2.n()),
            ((p * (p - 1)) as usize, (p * p * p) as usize)
        );
        let report2 = coherence(&mat2).unwrap();
        let expected2 = 1.0 / (p as f64 - 1.0);
        assert!(
            (report2.exact - expected2).abs() <= 1e-9,
            "p = {p}: coherence {} vs expected {expected2}",
            report2.exact
        );
    }
    c.pass("coherence equals 1/p and 1/(p-1) for p in {3, 5, 7}");
}

#[test]
fn criterion_02_composed_code_distances_match_the_formula() {
    let c = Criterion::begin(2);
    let brute = |m: &Array2<u64>| -> usize {
        let n = m.ncols();
        let mut best = usize::MAX;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = m
                    .column(i)
                    .iter()
                    .zip(m.column(j).iter())
                    .filter(|(a, b)| a != b)
                    .count();
                best = best.min(d);
            }
        }
        best
    };
    // (base points, pattern points, expected distance) per prime.
    for (p, pattern_points, expected) in [(2u64, 2u64, 1usize), (3, 3, 4), (3, 2, 2)] {
        let base = rs2_codebook(p, p);
        let pattern = rs2_codebook(p * p, pattern_points);
        let comp = compose_codebooks(&base, &pattern).unwrap();
        assert_eq!(comp.predicted_min_distance, expected, "p = {p}");
        assert_eq!(comp.exact_min_distance, expected, "p = {p}");
        assert_eq!(brute(&comp.matrix), expected, "p = {p} brute force");
    }
    c.pass("composed distances equal the guarantee and an all-pairs oracle for p in {2, 3}");
}

#[test]
fn criterion_03_composed_codes_are_linear_with_the_all_one_column() {
    let c = Criterion::begin(3);
    for (p, pattern_points) in [(2u64, 2u64), (3, 3), (3, 2), (5, 5), (5, 4)] {
        let matrix = composed_matrix(p, pattern_points);
        assert!(matrix.ncols() <= 729, "p = {p} stays in exhaustive range");
        verify_gfp_closure(&matrix, p).unwrap();
        let ones = vec![1u64; matrix.nrows()];
        assert!(
            (0..matrix.ncols()).any(|j| matrix.column(j).iter().eq(ones.iter())),
            "p = {p}: all-one column missing"
        );
    }
    c.pass("composed codes are exhaustively closed mod p and keep the all-one column");
}

#[test]
fn criterion_04_welch_ratio_of_the_25x125_matrix() {
    let c = Criterion::begin(4);
    let mat = construct_example1(5).unwrap();
    let report = coherence(&mat).unwrap();
    let ratio = report.ratio_to_welch.unwrap();
    assert!(
        (ratio - 1.1135).abs() <= 1e-3,
        "ratio {ratio} vs expected 1.1135"
    );
    c.pass("the 25x125 coherence sits 1.1135x above the Welch floor");
}

#[test]
fn criterion_05_character_sums_and_inner_products_agree_with_oracles() {
    let c = Criterion::begin(5);
    // Closed form: sum over x of chi(tau x + beta) is 0 unless tau = 0,
    // where it is p chi(beta).
    for p in [2u64, 3, 5, 7] {
        for tau in 0..p {
            for beta in 0..p {
                let got = character_sum(p, tau, beta).unwrap();
                let want = if tau == 0 {
                    p as f64 * additive_character(p, beta).unwrap()
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert!(
                    (got - want).norm() <= 1e-12,
                    "p = {p}, tau = {tau}, beta = {beta}: {got} vs {want}"
                );
            }
        }
    }

    // Inner products of the 25x125 construction, checked entry-by-entry
    // against characters of residue differences.
    let p = 5u64;
    let composed = composed_matrix(p, p);
    let reduced = coset_reduce(&composed, p).unwrap();
    let entries = exponentiate(&reduced, p).unwrap();
    let mat = construct_example1(p).unwrap();
    assert_eq!(entries, *mat.entries(), "construction pipeline consistency");

    let m = reduced.nrows();
    let n = reduced.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let direct: Complex64 = mat
            .entries()
            .column(i)
            .iter()
            .zip(mat.entries().column(j).iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let oracle: Complex64 = (0..m)
            .map(|r| {
                let diff = (reduced[(r, j)] + p - reduced[(r, i)]) % p;
                additive_character(p, diff).unwrap()
            })
            .sum::<Complex64>()
            / m as f64;
        assert!(
            (direct - oracle).norm() <= 1e-10,
            "pair ({i}, {j}): {direct} vs {oracle}"
        );
    }
    c.pass("character sums match the closed form; 200 inner products match the character oracle");
}

#[test]
fn criterion_06_resized_constructions_meet_their_ceilings() {
    let c = Criterion::begin(6);
    for (q, k) in [(4u64, 2usize), (5, 3)] {
        let mat = construct_example3(q, k, RowSelection::Leading).unwrap();
        let report = coherence(&mat).unwrap();
        let expected = 1.0 / k as f64;
        assert!(
            (report.exact - expected).abs() <= 1e-12,
            "q = {q}, k = {k}: {} vs {expected}",
            report.exact
        );
    }

    let tall3 = construct_example4(3).unwrap();
    assert_eq!((tall3.m(), tall3.n()), (27, 729));
    let report = coherence(&tall3).unwrap();
    assert!(
        report.exact <= 5.0 / 9.0 + 1e-10,
        "p = 3 coherence {} above 5/9",
        report.exact
    );

    let tall5 = construct_example4(5).unwrap();
    assert_eq!((tall5.m(), tall5.n()), (125, 15625));
    let estimate = sampled_coherence(&tall5, 1_000_000, 1).unwrap();
    assert!(
        estimate.value <= 0.36 + 1e-10,
        "p = 5 sampled coherence {} above 0.36",
        estimate.value
    );
    c.pass("sparse and tall resizes stay under 1/k, 5/9, and 0.36");
}

#[test]
fn criterion_07_kronecker_growth_and_the_crossover() {
    let c = Criterion::begin(7);
    let base = construct_example1(3).unwrap();
    let grown = kronecker(&base, &base).unwrap();
    assert_eq!((grown.m(), grown.n()), (81, 729));
    let report = coherence(&grown).unwrap();
    assert!(
        (report.exact - 1.0 / 3.0).abs() <= 1e-9,
        "kronecker coherence {} vs 1/3",
        report.exact
    );

    let cmp = compare_vs_kronecker(5).unwrap();
    assert!(
        cmp.column_replacement_coherence < cmp.kronecker_coherence,
        "column replacement should win at p = 5"
    );
    assert!((cmp.column_replacement_coherence - 0.36).abs() <= 1e-12);
    assert!((cmp.kronecker_coherence - (6.0f64 / 31.0).sqrt()).abs() <= 1e-12);
    assert_eq!(cmp.winner, "column_replacement");
    c.pass("kronecker squares keep coherence 1/3; replacement beats kronecker at p = 5");
}

#[test]
fn criterion_08_noiseless_pursuit_recovers_every_trial() {
    let c = Criterion::begin(8);
    for mat in [construct_example1(5).unwrap(), construct_example2(7).unwrap()] {
        for k in [1usize, 2] {
            for trial in 0..1000u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(800_000 + trial);
                let signal = generate_sparse_signal(mat.n(), k, &mut rng).unwrap();
                let y = measure(&mat, &signal, None, &mut rng).unwrap();
                let res = omp(mat.entries(), &y, k, OmpStop::ExactSparsity).unwrap();
                assert_eq!(
                    res.support,
                    signal.support(),
                    "support mismatch at k = {k}, trial {trial}"
                );
                for (got, want) in res.coefficients.iter().zip(signal.values()) {
                    assert!(
                        (got - want).norm() <= 1e-8,
                        "coefficient off at k = {k}, trial {trial}: {got} vs {want}"
                    );
                }
            }
        }
    }
    c.pass("1000/1000 noiseless recoveries at k = 1 and k = 2 on both constructions");
}

#[test]
fn criterion_09_deterministic_matrices_keep_up_with_gaussian_ones() {
    let c = Criterion::begin(9);
    let ks: Vec<usize> = (2..=12).collect();
    let trials = 500usize;
    let run = |matrix: MatrixSource| {
        run_experiment(&ExperimentConfig {
            matrix,
            trials,
            master_seed: 9,
            success_threshold: 1e-3,
            omp_stop: OmpStop::ExactSparsity,
            axis: ExperimentAxis::Sparsity { ks: ks.clone(), input_snr_db: None },
        })
        .unwrap()
    };
    let det = run(MatrixSource::Example1 { p: 5 });
    let gauss = run(MatrixSource::Gaussian { m: 25, n: 125, seed: 77 });

    for (d, g) in det.points.iter().zip(gauss.points.iter()) {
        // Two-sided 5% binomial tolerance on the difference of two
        // proportions, with the variance pooled across both arms.
        let pooled = (d.recovery_pct + g.recovery_pct) / 200.0;
        let margin = 1.96 * (pooled * (1.0 - pooled) * 2.0 / trials as f64).sqrt() * 100.0;
        assert!(
            d.recovery_pct >= g.recovery_pct - margin,
            "k = {}: deterministic {}% vs gaussian {}% (margin {margin:.2})",
            d.x,
            d.recovery_pct,
            g.recovery_pct
        );
    }
    for w in det.points.windows(2) {
        assert!(
            w[1].recovery_pct <= w[0].recovery_pct,
            "recovery must not improve as sparsity grows: {} -> {} at k = {}",
            w[0].recovery_pct,
            w[1].recovery_pct,
            w[1].x
        );
    }
    c.pass("deterministic recovery matches gaussian at every k in 2..=12 and degrades monotonically");
}

#[test]
fn criterion_10_everything_reruns_byte_identically() {
    let c = Criterion::begin(10);
    let dir = tempfile::tempdir().unwrap();

    let mat_a = construct_example1(5).unwrap();
    let mat_b = construct_example1(5).unwrap();
    let path_a = dir.path().join("a.json");
    let path_b = dir.path().join("b.json");
    mat_a.write_json(&path_a).unwrap();
    mat_b.write_json(&path_b).unwrap();
    assert_eq!(
        std::fs::read(&path_a).unwrap(),
        std::fs::read(&path_b).unwrap()
    );
    assert_eq!(mat_a.to_csv_string(), mat_b.to_csv_string());

    let seeded_a = construct_example3(5, 3, RowSelection::Seeded(13)).unwrap();
    let seeded_b = construct_example3(5, 3, RowSelection::Seeded(13)).unwrap();
    assert_eq!(
        seeded_a.to_json_string().unwrap(),
        seeded_b.to_json_string().unwrap()
    );

    let gauss_a = gaussian_matrix(10, 40, 3).unwrap();
    let gauss_b = gaussian_matrix(10, 40, 3).unwrap();
    assert_eq!(
        gauss_a.to_json_string().unwrap(),
        gauss_b.to_json_string().unwrap()
    );

    // A noisy parallel experiment reruns identically because every trial
    // derives its own generator.
    let config = ExperimentConfig {
        matrix: MatrixSource::Example2 { p: 5 },
        trials: 200,
        master_seed: 31,
        success_threshold: 1e-3,
        omp_stop: OmpStop::ExactSparsity,
        axis: ExperimentAxis::InputSnr { k: 2, snrs_db: vec![0.0, 10.0, 20.0] },
    };
    let run_a = run_experiment(&config).unwrap();
    let run_b = run_experiment(&config).unwrap();
    assert_eq!(run_a.to_csv_string(), run_b.to_csv_string());
    assert_eq!(
        run_a.to_json_string().unwrap(),
        run_b.to_json_string().unwrap()
    );

    // Round-trip through disk preserves the matrix bit for bit.
    let reloaded = SensingMatrix::read_json(&path_a).unwrap();
    assert_eq!(
        reloaded.to_json_string().unwrap(),
        mat_a.to_json_string().unwrap()
    );
    let verify: HashSet<u64> = reloaded
        .entries()
        .iter()
        .zip(mat_a.entries().iter())
        .map(|(x, y)| (x.re.to_bits() ^ y.re.to_bits()) | (x.im.to_bits() ^ y.im.to_bits()))
        .collect();
    assert_eq!(verify, HashSet::from([0]));
    c.pass("matrices, seeded resizes, and noisy experiments rerun byte-identically");
}
