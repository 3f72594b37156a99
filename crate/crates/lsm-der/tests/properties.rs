//! Property tests for the cross-cutting invariants: kernel positivity and
//! superposition, readout output bounds and symmetries, unit-norm weight
//! maintenance, and text-format round trips.

use lsm_der::dendrite::{branch_nl, DendriticCell, NonlinearityParams, ReadoutPair, Squash};
use lsm_der::perceptron::{pdelta_update_with_output, PDeltaParams, PerceptronBank};
use lsm_der::spike::{
    poisson_train, psc_value, read_trains, sample_states, write_trains, KernelParams, SpikeTrain,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn kernel_strategy() -> impl Strategy<Value = KernelParams> {
    // decay in (2 ms, 100 ms), rise strictly smaller
    (2e-3..0.1f64, 0.05..0.9f64)
        .prop_map(|(decay, frac)| KernelParams::peak_normalized(decay, decay * frac).unwrap())
}

fn train_strategy() -> impl Strategy<Value = SpikeTrain> {
    (1u64..5000).prop_map(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        poisson_train(25.0, 0.5, &mut rng).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_stays_non_negative(kernel in kernel_strategy(), t in 0.0..0.5f64) {
        prop_assert!(kernel.value(t) >= 0.0);
    }

    #[test]
    fn states_are_non_negative(kernel in kernel_strategy(), train in train_strategy()) {
        let states = sample_states(std::slice::from_ref(&train), &kernel, 0.025).unwrap();
        prop_assert!(states.rows().all(|row| row.iter().all(|&v| v >= 0.0)));
    }

    #[test]
    fn merged_train_superposes(kernel in kernel_strategy(), a in train_strategy(), b in train_strategy()) {
        let merged = a.merge(&b).unwrap();
        for i in 0..10 {
            let t = i as f64 * 0.05;
            let parts = psc_value(&a, &kernel, t) + psc_value(&b, &kernel, t);
            let whole = psc_value(&merged, &kernel, t);
            let denom = parts.abs().max(1e-12);
            prop_assert!(((whole - parts) / denom).abs() < 1e-9);
        }
    }

    #[test]
    fn sampling_matches_pointwise_evaluation(kernel in kernel_strategy(), train in train_strategy()) {
        let states = sample_states(std::slice::from_ref(&train), &kernel, 0.025).unwrap();
        for i in 0..states.num_samples() {
            let direct = psc_value(&train, &kernel, i as f64 * 0.025);
            prop_assert!((states.get(i, 0) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn train_file_round_trips(seed in 0u64..2000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trains: Vec<SpikeTrain> = (0..3)
            .map(|_| poisson_train(15.0, 0.4, &mut rng).unwrap())
            .collect();
        let mut buf = Vec::new();
        write_trains(&mut buf, &trains).unwrap();
        let back = read_trains(std::io::Cursor::new(&buf)).unwrap();
        prop_assert_eq!(back, trains);
    }

    #[test]
    fn cell_output_bounded_and_monotone(
        seed in 0u64..5000,
        x_thr in 0.3..3.0f64,
        x_sat in 0.5..20.0f64,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nl = NonlinearityParams::new(x_thr, x_sat).unwrap();
        let cell = DendriticCell::random(4, 3, 8, &mut rng).unwrap();
        let x: Vec<f64> = (0..8).map(|_| rand::Rng::gen::<f64>(&mut rng) * 5.0).collect();
        let y = cell.output(&x, &nl);
        prop_assert!(y >= 0.0);
        prop_assert!(y <= 4.0 * x_sat + 1e-12);
        // raising any entry never lowers the output
        for i in 0..8 {
            let mut bumped = x.clone();
            bumped[i] += 1.0;
            prop_assert!(cell.output(&bumped, &nl) >= y - 1e-12);
        }
    }

    #[test]
    fn branch_nonlinearity_crossover(x_thr in 0.2..5.0f64) {
        let nl = NonlinearityParams::new(x_thr, f64::INFINITY).unwrap();
        // below the threshold it is sub-linear, above supra-linear
        prop_assert!(branch_nl(x_thr * 0.5, &nl) < x_thr * 0.5);
        prop_assert!(branch_nl(x_thr * 1.5, &nl) > x_thr * 1.5);
        prop_assert!((branch_nl(x_thr, &nl) - x_thr).abs() < 1e-9 * x_thr.max(1.0));
    }

    #[test]
    fn squash_outputs_lie_in_range(z in -500.0..500.0f64) {
        let s = Squash::SigmoidHalf.apply(z);
        prop_assert!((0.0..=1.0).contains(&s));
        let b = Squash::Signum01.apply(z);
        prop_assert!(b == 0.0 || b == 1.0);
        prop_assert!((Squash::SigmoidHalf.apply(z) + Squash::SigmoidHalf.apply(-z) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn branch_permutation_leaves_outputs_unchanged(seed in 0u64..5000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nl = NonlinearityParams::new(1.0, 10.0).unwrap();
        let cell = DendriticCell::random(3, 4, 9, &mut rng).unwrap();
        let x: Vec<f64> = (0..9).map(|_| rand::Rng::gen::<f64>(&mut rng) * 2.0).collect();
        // reverse slots within branches and swap branch order
        let mut wiring = Vec::new();
        for j in (0..3).rev() {
            let mut b: Vec<usize> = cell.branch_afferents(j).to_vec();
            b.reverse();
            wiring.extend(b);
        }
        let permuted = DendriticCell::new(3, 4, 9, wiring).unwrap();
        prop_assert!((cell.output(&x, &nl) - permuted.output(&x, &nl)).abs() < 1e-12);
    }

    #[test]
    fn pdelta_keeps_unit_norms(seed in 0u64..5000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bank = PerceptronBank::random(3, 4, &mut rng).unwrap();
        let params = PDeltaParams::default();
        for _ in 0..20 {
            let mut x: Vec<f64> = (0..4).map(|_| rand::Rng::gen::<f64>(&mut rng) - 0.5).collect();
            x.push(1.0);
            let o_hat = rand::Rng::gen::<f64>(&mut rng) * 2.0 - 1.0;
            let o = rand::Rng::gen::<f64>(&mut rng) * 2.0 - 1.0;
            pdelta_update_with_output(&mut bank, &x, o_hat, o, &params);
        }
        for i in 0..bank.n() {
            let norm: f64 = bank.weight_row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn wiring_round_trip_preserves_outputs(seed in 0u64..5000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nl = NonlinearityParams::new(1.2, 8.0).unwrap();
        let pair = ReadoutPair::random(3, 4, 10, nl, Squash::SigmoidHalf, &mut rng).unwrap();
        let mut buf = Vec::new();
        pair.write_wiring(&mut buf).unwrap();
        let back = ReadoutPair::read_wiring(std::io::Cursor::new(&buf), 3, 10, nl, Squash::SigmoidHalf).unwrap();
        let x: Vec<f64> = (0..10).map(|_| rand::Rng::gen::<f64>(&mut rng)).collect();
        prop_assert_eq!(pair.output(&x).to_bits(), back.output(&x).to_bits());
    }
}
