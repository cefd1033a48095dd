//! Cross-module checks: the cepstral pipeline and the network must agree on
//! shared quantities, and the WAV-to-features chain must hold together.

use fbcc_core::audio::AudioBuffer;
use fbcc_core::cepstral::{
    cepstra, extract_utterance, log_dct, CepstralConfig, PipelineConfig,
};
use fbcc_core::fbnn::{train_fbnn, FbnnModel, TrainConfig};
use fbcc_core::filterbank::{build_filter_bank, BankKind, BankSpec};
use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mask_512() -> fbcc_core::filterbank::FilterBankMatrix {
    build_filter_bank(&BankSpec::with_default_band(
        BankKind::Triangular,
        20,
        512,
        16000,
    ))
    .unwrap()
}

/// Feeding power spectra through `cepstra` with the network's effective
/// bank must match log-DCT applied to the network's own first-layer output.
#[test]
fn cepstra_agree_with_network_first_layer() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let model = FbnnModel::new_random(mask_512(), 10, 2, &mut rng).unwrap();
    let power = Array2::from_shape_fn((7, 257), |_| rng.random_range(0.0..5.0));

    let bank = model.effective_filter_bank();
    let cfg = CepstralConfig::new(bank, 20);
    let via_pipeline = cepstra(&power, &cfg).unwrap();

    let h1 = model.hidden1(&power).unwrap();
    let via_network = log_dct(&h1, 20, cfg.log_floor).unwrap();

    assert_eq!(via_pipeline.data.shape(), via_network.data.shape());
    for (a, b) in via_pipeline.data.iter().zip(via_network.data.iter()) {
        assert!(
            (a - b).abs() < 1e-12,
            "pipeline {a} vs network {b}: paths disagree"
        );
    }
}

/// A learned bank coming out of training is a usable drop-in extractor.
#[test]
fn learned_bank_runs_through_the_extractor() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 40;
    let mut inputs = Array2::<f64>::zeros((n, 257));
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 2;
        for k in 0..257 {
            let band = if class == 0 { k < 128 } else { k >= 128 };
            inputs[[i, k]] = if band { rng.random_range(0.5..1.5) } else { 0.01 };
        }
        labels.push(class);
    }
    let cfg = TrainConfig {
        epochs: 2,
        batch_size: 8,
        h2_nodes: 6,
        seed: 3,
        ..TrainConfig::default()
    };
    let trained = train_fbnn(&inputs, &labels, mask_512(), &cfg).unwrap();
    let learned = trained.model.effective_filter_bank();
    learned.validate().expect("learned bank violates bank invariants");

    let samples: Vec<f64> = (0..16000)
        .map(|n| (2.0 * std::f64::consts::PI * 440.0 * n as f64 / 16000.0).sin() * 0.3)
        .collect();
    let audio = AudioBuffer::new(samples, 16000).unwrap();
    let pipeline = PipelineConfig::new(512, CepstralConfig::new(learned, 20));
    let features = extract_utterance(&audio, &pipeline).unwrap();
    assert_eq!(features.dim(), 40);
    assert_eq!(features.num_frames(), 99);
}

/// WAV write, WAV read, feature extraction: identical bytes in, identical
/// features out.
#[test]
fn wav_round_trip_extraction_is_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let samples: Vec<f64> = (0..8000)
        .map(|_| (rng.random_range(-16384..16384) as f64) / 32768.0)
        .collect();
    let audio = AudioBuffer::new(samples, 16000).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("utt.wav");
    fbcc_core::audio::write_wav_mono16(&path, &audio).unwrap();
    let back = fbcc_core::audio::read_wav_mono16(&path).unwrap();
    assert_eq!(back.samples, audio.samples);

    let pipeline = PipelineConfig::new(512, CepstralConfig::new(mask_512(), 20));
    let a = extract_utterance(&audio, &pipeline).unwrap();
    let b = extract_utterance(&back, &pipeline).unwrap();
    assert_eq!(a.data, b.data);
}
