mod common;

use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use common::{params_for, random_input, random_stack, register_state};
use proptest::prelude::*;
use qenc_core::data::make_synthetic_dataset;
use qenc_core::encoders::{amplitude_encode, EncodedInput};
use qenc_core::model::{
    class_probabilities, predict_from_fidelities, swap_test, Backend, ClassLabel, ClassModel,
    LayerSpec,
};
use qenc_core::train::{
    ascend_epoch, bce_loss, entropy, evaluate, fidelity, gradient, train_class, GradientMethod,
    Phase, TrainConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn learned(model: &ClassModel) -> qenc_core::sim::StateVector {
    let ops: Vec<_> = model.learning_ops([0, 1]).into_iter().map(|(op, _)| op).collect();
    register_state(&ops)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ancilla_p0_matches_overlap_of_separate_registers(
        (stack, params) in random_stack().prop_flat_map(|s| (Just(s.clone()), params_for(&s))),
        x in prop::array::uniform4(-1.0f64..1.0)
            .prop_filter("nonzero", |x| x.iter().map(|v| v * v).sum::<f64>() > 1e-4),
    ) {
        let model = ClassModel::new(ClassLabel::Three, stack, params).unwrap();
        let psi = learned(&model);
        let phi = register_state(&amplitude_encode(&x, [0, 1]).unwrap());
        let overlap = psi.fidelity(&phi).unwrap();
        let r = swap_test(&model, &EncodedInput::Amplitude(x), &Backend::Pure).unwrap();
        prop_assert!((r.p0 - (1.0 + overlap) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn ancilla_p0_never_drops_below_half(
        (stack, params) in random_stack().prop_flat_map(|s| (Just(s.clone()), params_for(&s))),
        input in random_input(),
    ) {
        let model = ClassModel::new(ClassLabel::Six, stack, params).unwrap();
        let r = swap_test(&model, &input, &Backend::Pure).unwrap();
        prop_assert!(r.p0 >= 0.5 - 1e-9 && r.p0 <= 1.0 + 1e-9);
        prop_assert!((0.0..=1.0).contains(&r.fidelity));
    }

    #[test]
    fn shifting_a_parameter_by_four_pi_changes_nothing(
        (stack, params) in random_stack().prop_flat_map(|s| (Just(s.clone()), params_for(&s))),
        input in random_input(),
        which in any::<prop::sample::Index>(),
    ) {
        let model = ClassModel::new(ClassLabel::Three, stack.clone(), params.clone()).unwrap();
        let mut shifted = params;
        let k = which.index(shifted.len());
        shifted[k] += 4.0 * PI;
        let moved = ClassModel::new(ClassLabel::Three, stack, shifted).unwrap();
        let (a, b) = (fidelity(&model, &input).unwrap(), fidelity(&moved, &input).unwrap());
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn prediction_survives_common_rescaling(
        f3 in 0.0f64..1.0,
        f6 in 0.0f64..1.0,
        c in 1e-3f64..1e3,
    ) {
        prop_assume!((f3 - f6).abs() > 1e-6);
        prop_assert_eq!(predict_from_fidelities(f3, f6), predict_from_fidelities(c * f3, c * f6));
        let (p, q) = (class_probabilities(f3, f6), class_probabilities(c * f3, c * f6));
        prop_assert!((p.0 - q.0).abs() < 1e-12 && (p.1 - q.1).abs() < 1e-12);
    }

    #[test]
    fn bce_for_positive_label_strictly_decreases(p in 1e-9f64..0.999, step in 1e-6f64..0.5) {
        let q = (p + step).min(1.0 - 1e-9);
        prop_assume!(q > p);
        prop_assert!(bce_loss(1, p) > bce_loss(1, q));
    }

    #[test]
    fn binary_entropy_is_symmetric_and_peaks_at_half(p in 0.0f64..=1.0) {
        let (a, b) = (entropy(&[p, 1.0 - p]).unwrap(), entropy(&[1.0 - p, p]).unwrap());
        prop_assert!((a - b).abs() < 1e-15);
        prop_assert!(a <= entropy(&[0.5, 0.5]).unwrap() + 1e-15);
        prop_assert!(a <= LN_2 + 1e-9);
    }

    #[test]
    fn parameter_shift_matches_finite_difference(
        (stack, params) in random_stack().prop_flat_map(|s| (Just(s.clone()), params_for(&s))),
        input in random_input(),
    ) {
        let model = ClassModel::new(ClassLabel::Three, stack, params).unwrap();
        let ps = gradient(&model, &input, GradientMethod::ParameterShift).unwrap();
        let fd = gradient(&model, &input, GradientMethod::FiniteDifference).unwrap();
        for (a, b) in ps.iter().zip(&fd) {
            prop_assert!((a - b).abs() < 1e-5);
        }
    }
}

fn single_sample(seed: u64) -> (ClassModel, EncodedInput, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = ClassModel::random(ClassLabel::Three, LayerSpec::default_stack(), &mut rng);
    let input = if seed.is_multiple_of(2) {
        EncodedInput::Rotation(std::array::from_fn(|_| rng.random_range(0.0..PI)))
    } else {
        EncodedInput::Amplitude(std::array::from_fn(|_| rng.random_range(0.0..1.0)))
    };
    (model, input, rng)
}

#[test]
fn single_sample_fidelity_rises_every_step_until_converged() {
    let cfg = TrainConfig::default();
    assert_eq!(cfg.learning_rate, 0.01);
    for seed in 0..8 {
        let (mut model, input, mut rng) = single_sample(seed);
        let mut prev = fidelity(&model, &input).unwrap();
        let mut steps = 0;
        while prev < 0.99 {
            assert!(steps < 10_000, "seed {seed}: stuck at {prev}");
            ascend_epoch(&mut model, &[input], &cfg, &mut rng).unwrap();
            let f = fidelity(&model, &input).unwrap();
            assert!(f > prev, "seed {seed}, step {steps}: {f} <= {prev}");
            prev = f;
            steps += 1;
        }
    }
}

#[test]
fn untrained_models_score_near_chance() {
    let pool = make_synthetic_dataset(3, 200).unwrap();
    let test: Vec<(EncodedInput, ClassLabel)> = pool
        .iter()
        .map(|s| {
            // first quarter-block mean is the class-separating coordinate
            let mean = s.pixels[..196].iter().sum::<f64>() / 196.0;
            let angles = [mean * PI, 0.3, 1.1, 0.2];
            (EncodedInput::Rotation(angles), ClassLabel::from_digit(s.label).unwrap())
        })
        .collect();
    let mut total = 0.0;
    let runs = 20;
    for seed in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m3 = ClassModel::random(ClassLabel::Three, LayerSpec::default_stack(), &mut rng);
        let m6 = ClassModel::random(ClassLabel::Six, LayerSpec::default_stack(), &mut rng);
        total += evaluate(&m3, &m6, &test, &Backend::Pure).unwrap().accuracy;
    }
    let mean = total / runs as f64;
    assert!((mean - 0.5).abs() <= 0.15, "{mean}");
}

#[test]
fn perfectly_separating_models_have_zero_loss_and_entropy() {
    let stack = vec![LayerSpec::SingleQubitUnitary];
    let m3 = ClassModel::new(ClassLabel::Three, stack.clone(), vec![0.0; 4]).unwrap();
    let m6 = ClassModel::new(ClassLabel::Six, stack, vec![PI, 0.0, PI, 0.0]).unwrap();
    assert!((m6.learned_state().unwrap().probability(0, 1).unwrap() - 1.0).abs() < 1e-12);
    let test = vec![
        (EncodedInput::Basis(0), ClassLabel::Three),
        (EncodedInput::Basis(3), ClassLabel::Six),
    ];
    let e = evaluate(&m3, &m6, &test, &Backend::Pure).unwrap();
    assert_eq!(e.accuracy, 1.0);
    assert!(e.loss < 1e-6 && e.entropy < 1e-6, "{e:?}");
}

fn synthetic_rotation_split(seed: u64) -> (Vec<EncodedInput>, Vec<(EncodedInput, ClassLabel)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |label: ClassLabel| {
        let centre = if label == ClassLabel::Three { 0.8 } else { 2.3 };
        EncodedInput::Rotation(std::array::from_fn(|k| {
            if k == 0 {
                centre + rng.random_range(-0.3..0.3)
            } else {
                rng.random_range(0.0..PI)
            }
        }))
    };
    let train: Vec<_> = (0..40).map(|_| draw(ClassLabel::Three)).collect();
    let test: Vec<_> = (0..20)
        .map(|i| {
            let l = ClassLabel::BOTH[i % 2];
            (draw(l), l)
        })
        .collect();
    (train, test)
}

#[test]
fn training_is_bit_reproducible_and_metrics_stay_in_range() {
    let (train, test) = synthetic_rotation_split(9);
    let cfg = TrainConfig {
        epochs_per_class: 3,
        batch_size: 4,
        ..TrainConfig::default()
    };
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut m3 = ClassModel::random(ClassLabel::Three, LayerSpec::default_stack(), &mut rng);
        let m6 = ClassModel::random(ClassLabel::Six, LayerSpec::default_stack(), &mut rng);
        let phase = Phase {
            samples: &train,
            test: &test,
            backend: &Backend::Pure,
            cfg: &cfg,
            first_epoch: 1,
            started: Instant::now(),
        };
        let records = train_class(&mut m3, &m6, &phase, &mut rng).unwrap();
        (m3, records)
    };
    let (a, ra) = run();
    let (b, rb) = run();
    assert_eq!(a.params(), b.params());
    assert_eq!(ra.len(), 3);
    for (x, y) in ra.iter().zip(&rb) {
        assert_eq!(
            (x.epoch, x.accuracy, x.loss, x.entropy, x.train_fidelity),
            (y.epoch, y.accuracy, y.loss, y.entropy, y.train_fidelity)
        );
        assert!((0.0..=1.0).contains(&x.accuracy));
        assert!(x.loss.is_finite() && x.loss >= 0.0);
        assert!(x.entropy >= 0.0 && x.entropy <= LN_2 + 1e-9);
    }
}
