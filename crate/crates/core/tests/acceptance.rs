//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any failed.

use std::io::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use radar_ood::ae::{
    read_weights, train_variant, write_weights, Autoencoder, Encoder, TrainConfig, Variant,
};
use radar_ood::dsp::{chebyshev_window, mti_filter, Preprocessor, RangeDopplerImage};
use radar_ood::metrics::{aupr, auroc};
use radar_ood::nn::{bce_grad, bce_loss, Layer, LayerSpec, Network, Tensor};
use radar_ood::pipeline::{self, PipelineConfig};
use radar_ood::radar::{
    build_dataset, simulate_frame, DatasetSpec, Motion, RadarConfig, Scatterer, ScattererKind,
    Scene, SceneLabel, Split, SPEED_OF_LIGHT,
};
use radar_ood::score::{
    calibrate_from_records, classify, energy_from_latents, score_dataset, score_energy,
    score_energy_pixels, score_rec_pixels, Decision, ScoreKind, ScoreRecord,
};

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            pass: true,
            summary: String::new(),
            details: Vec::new(),
        }
    }

    /// Records one sub-check; any failing check fails the criterion.
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        self.details
            .push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
        self.pass &= ok;
    }

    fn note(&mut self, what: impl Into<String>) {
        self.details.push(format!("     {}", what.into()));
    }
}

fn within(limit: Duration, took: Duration) -> bool {
    took <= limit
}

// ---------------------------------------------------------------- 1

/// Quadrant `z` of a row-major 64×64 map, row-major 32×32.
fn quadrant(image: &[f64], z: usize) -> Vec<f64> {
    let (r0, c0) = ((z / 2) * 32, (z % 2) * 32);
    let mut out = Vec::with_capacity(1024);
    for i in 0..32 {
        for j in 0..32 {
            out.push(image[(r0 + i) * 64 + c0 + j]);
        }
    }
    out
}

fn naive_lse(sum: &[f64]) -> f64 {
    sum.iter().map(|v| v.exp()).sum::<f64>().ln()
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut worst_rec, mut worst_energy) = (0.0f64, 0.0f64);
    for draw in 0..50u64 {
        let ae = Autoencoder::<f64>::init(Variant::Patch, 1000 + draw).unwrap();
        let image: Vec<f64> = (0..4096).map(|_| rng.random::<f64>()).collect();

        // S_r by explicit loops over patches and pixels
        let mut direct = 0.0;
        let mut latents = Vec::new();
        for z in 0..4 {
            let p = quadrant(&image, z);
            let code = ae.encoder.encode_pixels(&p).unwrap();
            let rec = ae.decoder.decode_values(&code).unwrap();
            let mut patch_sum = 0.0;
            for i in 0..32 {
                for j in 0..32 {
                    let d = rec[i * 32 + j] - p[i * 32 + j];
                    patch_sum += d * d;
                }
            }
            direct += patch_sum / 1024.0;
            latents.push(code);
        }
        direct /= 4.0;
        let got = score_rec_pixels(&image, &ae).unwrap();
        worst_rec = worst_rec.max((got - direct).abs());

        let summed: Vec<f64> = (0..128)
            .map(|j| latents.iter().map(|z| z[j]).sum())
            .collect();
        let energy = score_energy_pixels(&image, &ae.encoder).unwrap();
        if summed.iter().all(|v| v.abs() <= 10.0) {
            worst_energy = worst_energy.max((energy - naive_lse(&summed)).abs());
        }
    }
    o.check(
        worst_rec <= 1e-12,
        format!("S_r vs direct loops, 50 draws: max |diff| = {worst_rec:.2e}"),
    );

    // bounded latents against the naive formula
    let mut worst_naive = 0.0f64;
    for _ in 0..200 {
        let latents: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..128).map(|_| rng.random_range(-2.5..2.5)).collect())
            .collect();
        let summed: Vec<f64> = (0..128)
            .map(|j| latents.iter().map(|z| z[j]).sum())
            .collect();
        let got = energy_from_latents(&latents).unwrap();
        worst_naive = worst_naive.max((got - naive_lse(&summed)).abs());
    }
    o.check(
        worst_naive <= 1e-9 && worst_energy <= 1e-9,
        format!("S_e vs naive LSE: random latents {worst_naive:.2e}, encoder latents {worst_energy:.2e}"),
    );
    let mut big = vec![vec![0.0; 128]; 4];
    big[0][5] = 1e4;
    let e = energy_from_latents(&big).unwrap();
    o.check(
        e.is_finite() && (e - 1e4).abs() < 1e-6,
        format!("coordinate 1e4 gives finite S_e = {e}"),
    );
    let took = t0.elapsed();
    o.check(
        within(Duration::from_secs(10), took),
        format!("runtime {took:.2?} < 10 s"),
    );
    o.summary = format!(
        "S_r max err {worst_rec:.1e}, S_e max err {:.1e}",
        worst_naive.max(worst_energy)
    );
    o
}

// ---------------------------------------------------------------- 2

const FD_STEP: f64 = 1e-5;

fn rel_err(a: &[f64], n: &[f64]) -> f64 {
    let diff: f64 = a
        .iter()
        .zip(n)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale: f64 =
        a.iter().map(|x| x * x).sum::<f64>().sqrt() + n.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

fn random_tensor(rng: &mut ChaCha8Rng, shape: &[usize], scale: f64) -> Tensor<f64> {
    Tensor::from_fn(shape, |_| rng.random_range(-scale..scale))
}

/// Worst relative error over the input gradient and every parameter
/// tensor of `net`, for the loss `Σ c ⊙ net(x)`.
fn check_network(net: &Network<f64>, x: &Tensor<f64>, rng: &mut ChaCha8Rng) -> f64 {
    let y = net.forward(x).unwrap();
    let c = random_tensor(rng, y.shape(), 1.0);
    let loss = |n: &Network<f64>, input: &Tensor<f64>| n.forward(input).unwrap().dot(&c);
    let cache = net.forward_cached(x).unwrap();
    let (grads, gx) = net.backward(&cache, &c, true).unwrap();

    let gx = gx.unwrap();
    let mut numeric = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let mut xp = x.clone();
        xp.data_mut()[i] += FD_STEP;
        let mut xm = x.clone();
        xm.data_mut()[i] -= FD_STEP;
        numeric.push((loss(net, &xp) - loss(net, &xm)) / (2.0 * FD_STEP));
    }
    let mut worst = rel_err(gx.data(), &numeric);

    for (k, analytic) in grads.tensors().enumerate() {
        let len = analytic.len();
        let mut numeric = Vec::with_capacity(len);
        for i in 0..len {
            let mut plus = net.clone();
            plus.params_mut().nth(k).unwrap().data_mut()[i] += FD_STEP;
            let mut minus = net.clone();
            minus.params_mut().nth(k).unwrap().data_mut()[i] -= FD_STEP;
            numeric.push((loss(&plus, x) - loss(&minus, x)) / (2.0 * FD_STEP));
        }
        worst = worst.max(rel_err(analytic.data(), &numeric));
    }
    worst
}

fn param_layer(spec: LayerSpec, input: &[usize], rng: &mut ChaCha8Rng) -> Layer<f64> {
    let shape = Layer::<f64>::weight_shape(spec, input).unwrap();
    let units = *shape.last().unwrap();
    Layer::with_params(
        spec,
        "l",
        random_tensor(rng, &shape, 0.5),
        random_tensor(rng, &[units], 0.5),
    )
}

/// Values spaced at least 0.01 apart, shuffled, so no max-pool window has
/// a near tie.
fn distinct_tensor(rng: &mut ChaCha8Rng, shape: &[usize]) -> Tensor<f64> {
    let n: usize = shape.iter().product();
    let mut v: Vec<f64> = (0..n)
        .map(|i| i as f64 * 0.01 - 0.5 * n as f64 * 0.01)
        .collect();
    v.shuffle(rng);
    Tensor::new(shape.to_vec(), v).unwrap()
}

/// Values with |x| ≥ 0.05, away from the ReLU kink.
fn off_kink_tensor(rng: &mut ChaCha8Rng, shape: &[usize]) -> Tensor<f64> {
    Tensor::from_fn(shape, |_| {
        let m = rng.random_range(0.05..1.0);
        if rng.random::<bool>() {
            m
        } else {
            -m
        }
    })
}

fn criterion_2() -> Outcome {
    let t0 = Instant::now();
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    const DRAWS: usize = 20;
    let kinds = [
        "conv2d",
        "tconv2d",
        "maxpool2d",
        "upsample2d",
        "dense",
        "flatten",
        "reshape",
        "relu",
        "sigmoid",
        "bce",
        "stack",
    ];
    let mut worst_all = 0.0f64;
    for kind in kinds {
        let mut worst = 0.0f64;
        for _ in 0..DRAWS {
            let n = rng.random_range(1..=2);
            let (h, w) = (rng.random_range(1..=5), rng.random_range(1..=5));
            let (ci, co) = (rng.random_range(1..=4), rng.random_range(1..=4));
            let err = match kind {
                "conv2d" | "tconv2d" => {
                    let spec = if kind == "conv2d" {
                        LayerSpec::Conv2d { filters: co }
                    } else {
                        LayerSpec::TConv2d { filters: co }
                    };
                    let net = Network::new(vec![param_layer(spec, &[h, w, ci], &mut rng)]);
                    let x = random_tensor(&mut rng, &[n, h, w, ci], 1.0);
                    check_network(&net, &x, &mut rng)
                }
                "maxpool2d" => {
                    let (h, w) = (2 * rng.random_range(1..=3), 2 * rng.random_range(1..=3));
                    let net = Network::new(vec![Layer::plain(LayerSpec::MaxPool2d)]);
                    let x = distinct_tensor(&mut rng, &[n, h, w, ci]);
                    check_network(&net, &x, &mut rng)
                }
                "upsample2d" => {
                    let net = Network::new(vec![Layer::plain(LayerSpec::Upsample2d)]);
                    let x = random_tensor(&mut rng, &[n, h, w, ci], 1.0);
                    check_network(&net, &x, &mut rng)
                }
                "dense" => {
                    let (f, m) = (rng.random_range(1..=12), rng.random_range(1..=8));
                    let net = Network::new(vec![param_layer(
                        LayerSpec::Dense { units: m },
                        &[f],
                        &mut rng,
                    )]);
                    let x = random_tensor(&mut rng, &[n, f], 1.0);
                    check_network(&net, &x, &mut rng)
                }
                "flatten" => {
                    let net = Network::new(vec![Layer::plain(LayerSpec::Flatten)]);
                    let x = random_tensor(&mut rng, &[n, h, w, ci], 1.0);
                    check_network(&net, &x, &mut rng)
                }
                "reshape" => {
                    let net =
                        Network::new(vec![Layer::plain(LayerSpec::Reshape { shape: [h, w, ci] })]);
                    let x = random_tensor(&mut rng, &[n, h * w * ci], 1.0);
                    check_network(&net, &x, &mut rng)
                }
                "relu" => {
                    let net = Network::new(vec![Layer::plain(LayerSpec::Relu)]);
                    let x = off_kink_tensor(&mut rng, &[n, h, w, ci]);
                    check_network(&net, &x, &mut rng)
                }
                "sigmoid" => {
                    let net = Network::new(vec![Layer::plain(LayerSpec::Sigmoid)]);
                    let x = random_tensor(&mut rng, &[n, h, w, ci], 4.0);
                    check_network(&net, &x, &mut rng)
                }
                "bce" => {
                    let shape = [n, h, w, 1];
                    let p = Tensor::from_fn(&shape, |_| rng.random_range(0.05..0.95));
                    let t = Tensor::from_fn(&shape, |_| rng.random::<f64>());
                    let analytic = bce_grad(&p, &t).unwrap();
                    let numeric: Vec<f64> = (0..p.len())
                        .map(|i| {
                            let mut pp = p.clone();
                            pp.data_mut()[i] += FD_STEP;
                            let mut pm = p.clone();
                            pm.data_mut()[i] -= FD_STEP;
                            (bce_loss(&pp, &t).unwrap() - bce_loss(&pm, &t).unwrap())
                                / (2.0 * FD_STEP)
                        })
                        .collect();
                    rel_err(analytic.data(), &numeric)
                }
                _ => {
                    // encoder/decoder-shaped stack on a 4×4 map
                    let c1 = rng.random_range(1..=3);
                    let mut layers = vec![
                        param_layer(LayerSpec::Conv2d { filters: c1 }, &[4, 4, 1], &mut rng),
                        Layer::plain(LayerSpec::Relu),
                        Layer::plain(LayerSpec::MaxPool2d),
                        Layer::plain(LayerSpec::Flatten),
                    ];
                    layers.push(param_layer(
                        LayerSpec::Dense { units: 3 },
                        &[4 * c1],
                        &mut rng,
                    ));
                    layers.push(param_layer(
                        LayerSpec::Dense { units: 4 * c1 },
                        &[3],
                        &mut rng,
                    ));
                    layers.push(Layer::plain(LayerSpec::Reshape { shape: [2, 2, c1] }));
                    layers.push(param_layer(
                        LayerSpec::TConv2d { filters: 2 },
                        &[2, 2, c1],
                        &mut rng,
                    ));
                    layers.push(Layer::plain(LayerSpec::Upsample2d));
                    layers.push(param_layer(
                        LayerSpec::TConv2d { filters: 1 },
                        &[4, 4, 2],
                        &mut rng,
                    ));
                    layers.push(Layer::plain(LayerSpec::Sigmoid));
                    let net = Network::new(layers);
                    let x = random_tensor(&mut rng, &[n, 4, 4, 1], 1.0);
                    check_network(&net, &x, &mut rng)
                }
            };
            worst = worst.max(err);
        }
        o.check(
            worst < 1e-4,
            format!("{kind:<10} {DRAWS} draws, max relative error {worst:.2e}"),
        );
        worst_all = worst_all.max(worst);
    }
    let took = t0.elapsed();
    o.check(
        within(Duration::from_secs(60), took),
        format!("runtime {took:.2?} < 60 s"),
    );
    o.summary = format!(
        "{} layer kinds x {DRAWS} draws, max relative error {worst_all:.1e}",
        kinds.len()
    );
    o
}

// ---------------------------------------------------------------- 3

/// Largest sidelobe of `w` in dB below the mainlobe, from an `nfft`-point
/// zero-padded DFT; the mainlobe ends at the first local minimum.
fn max_sidelobe_db(w: &[f64], nfft: usize) -> f64 {
    let mut buf: Vec<Complex64> = (0..nfft)
        .map(|i| Complex64::new(w.get(i).copied().unwrap_or(0.0), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(nfft).process(&mut buf);
    let mag: Vec<f64> = buf[..nfft / 2].iter().map(|c| c.norm()).collect();
    let mut edge = 1;
    while edge + 1 < mag.len() && mag[edge + 1] < mag[edge] {
        edge += 1;
    }
    let side = mag[edge..].iter().copied().fold(0.0, f64::max);
    20.0 * (side / mag[0]).log10()
}

fn mover(range: f64, velocity: f64, amplitude: f64) -> Scatterer {
    Scatterer::point(
        ScattererKind::Object,
        Motion::Linear {
            start: range,
            velocity,
        },
        amplitude,
    )
}

fn scene(scatterers: Vec<Scatterer>) -> Scene {
    Scene {
        label: SceneLabel::OodToyCar,
        scatterers,
        noise_std: 0.0,
        seed: 3,
    }
}

fn criterion_3() -> Outcome {
    let t0 = Instant::now();
    let mut o = Outcome::new();
    let cfg = RadarConfig::default();
    let pre = Preprocessor::new(&cfg).unwrap();

    for n in [64, 128] {
        let side = max_sidelobe_db(&chebyshev_window(n, 100.0).unwrap(), 8192);
        o.check(
            side <= -99.5,
            format!("Chebyshev({n}, 100 dB) max sidelobe {side:.2} dB"),
        );
    }

    // range bin k ⇔ r = k·c/(2B); Doppler bin d ⇔ v = d·c/(2·f_min·t_c·n_c)
    let range_of = |k: f64| k * SPEED_OF_LIGHT / (2.0 * cfg.bandwidth);
    let vel_of = |d: f64| d * SPEED_OF_LIGHT / (2.0 * cfg.f_min * cfg.t_c * cfg.n_c as f64);
    for (k, d) in [(20usize, 5i64), (9, -11), (55, 17)] {
        let s = scene(vec![mover(range_of(k as f64), vel_of(d as f64), 1.0)]);
        let frame = simulate_frame(&s, &cfg, 0).unwrap();
        let rdi = pre.frame_to_rdi(&frame, s.label, 0).unwrap();
        let (best, _) = rdi
            .pixels
            .iter()
            .enumerate()
            .fold((0, f32::MIN), |b, (i, &p)| if p > b.1 { (i, p) } else { b });
        let want = ((32 + d) as usize, k);
        let got = (best / 64, best % 64);
        o.check(
            got == want && rdi.get(want.0, want.1) == 1.0,
            format!("mover at range bin {k}, Doppler bin {d:+}: peak at (row, col) {got:?}, expected {want:?}"),
        );
    }

    // static wall plus a mover, with and without MTI
    let (k_wall, k_mov, d_mov) = (12usize, 30usize, 7i64);
    let s = scene(vec![
        Scatterer::point(
            ScattererKind::Clutter,
            Motion::Static {
                range: range_of(k_wall as f64),
            },
            5.0,
        ),
        mover(range_of(k_mov as f64), vel_of(d_mov as f64), 1.0),
    ]);
    let frame = simulate_frame(&s, &cfg, 0).unwrap();
    let spectrum = pre.range_fft(&frame).unwrap();
    let before = pre.doppler_fft(&spectrum).unwrap();
    let after = pre.doppler_fft(&mti_filter(&spectrum)).unwrap();
    let at = |m: &[Complex64], row: usize, col: usize| m[row * 64 + col].norm();
    let suppression = 20.0 * (at(&before, 32, k_wall) / at(&after, 32, k_wall).max(1e-300)).log10();
    let row_mov = (32 + d_mov) as usize;
    let kept = 20.0 * (at(&after, row_mov, k_mov) / at(&before, row_mov, k_mov)).log10();
    o.check(
        suppression >= 60.0,
        format!("MTI suppresses the wall's zero-Doppler bin by {suppression:.1} dB"),
    );
    o.check(
        kept.abs() <= 0.1,
        format!("mover bin changes by {kept:+.4} dB"),
    );

    // amplitude scaling (powers of two keep float arithmetic exact)
    let s = scene(vec![mover(2.1, 0.7, 1.0), mover(3.3, -0.4, 0.3)]);
    let frame = simulate_frame(&s, &cfg, 2).unwrap();
    let base = pre.frame_to_rdi(&frame, s.label, 0).unwrap();
    for alpha in [0.25f32, 2.0, 64.0] {
        let scaled: Vec<f32> = frame.iter().map(|x| x * alpha).collect();
        let rdi = pre.frame_to_rdi(&scaled, s.label, 0).unwrap();
        let same = rdi
            .pixels
            .iter()
            .zip(&base.pixels)
            .all(|(a, b)| a.to_bits() == b.to_bits());
        o.check(same, format!("ADC scaled by {alpha}: RDI bit-identical"));
    }
    let took = t0.elapsed();
    o.check(
        within(Duration::from_secs(30), took),
        format!("runtime {took:.2?} < 30 s"),
    );
    o.summary = format!("MTI {suppression:.0} dB, peaks on analytic bins");
    o
}

// ---------------------------------------------------------------- 4

fn pairwise_auroc(id: &[f64], ood: &[f64]) -> f64 {
    let mut s = 0.0;
    for &o in ood {
        for &i in id {
            s += if o > i {
                1.0
            } else if o == i {
                0.5
            } else {
                0.0
            };
        }
    }
    s / (id.len() * ood.len()) as f64
}

fn trapezoid_auroc(id: &[f64], ood: &[f64]) -> f64 {
    let mut thresholds: Vec<f64> = id.iter().chain(ood).copied().collect();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let rate = |v: &[f64], t: f64| v.iter().filter(|&&x| x >= t).count() as f64 / v.len() as f64;
    let (mut area, mut prev) = (0.0, (0.0, 0.0));
    for t in thresholds {
        let p = (rate(id, t), rate(ood, t));
        area += (p.0 - prev.0) * (p.1 + prev.1) / 2.0;
        prev = p;
    }
    area
}

fn brute_ap(pos: &[f64], neg: &[f64]) -> f64 {
    let mut thresholds: Vec<f64> = pos.iter().chain(neg).copied().collect();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let (mut ap, mut prev_recall) = (0.0, 0.0);
    for t in thresholds {
        let tp = pos.iter().filter(|&&x| x >= t).count() as f64;
        let fp = neg.iter().filter(|&&x| x >= t).count() as f64;
        let recall = tp / pos.len() as f64;
        if tp > 0.0 {
            ap += (recall - prev_recall) * tp / (tp + fp);
        }
        prev_recall = recall;
    }
    ap
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (mut e_pair, mut e_trap, mut e_ap) = (0.0f64, 0.0f64, 0.0f64);
    for draw in 0..100 {
        let (n_id, n_ood) = (rng.random_range(1..40), rng.random_range(1..40));
        // every other draw uses a coarse grid so ties are common
        let mut sample = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|_| {
                    if draw % 2 == 0 {
                        rng.random_range(0..6) as f64
                    } else {
                        rng.random::<f64>()
                    }
                })
                .collect()
        };
        let (id, ood) = (sample(n_id), sample(n_ood));
        let a = auroc(&id, &ood).unwrap();
        e_pair = e_pair.max((a - pairwise_auroc(&id, &ood)).abs());
        e_trap = e_trap.max((a - trapezoid_auroc(&id, &ood)).abs());
        e_ap = e_ap.max((aupr(&ood, &id).unwrap() - brute_ap(&ood, &id)).abs());
        e_ap = e_ap.max((aupr(&id, &ood).unwrap() - brute_ap(&id, &ood)).abs());
    }
    o.check(
        e_pair <= 1e-12,
        format!("AUROC vs pairwise statistic: max |diff| {e_pair:.2e}"),
    );
    o.check(
        e_trap <= 1e-9,
        format!("AUROC vs trapezoidal ROC area: max |diff| {e_trap:.2e}"),
    );
    o.check(
        e_ap <= 1e-9,
        format!("AUPR vs brute-force average precision: max |diff| {e_ap:.2e}"),
    );
    o.summary = format!(
        "100 draws with ties, worst error {:.1e}",
        e_pair.max(e_trap).max(e_ap)
    );
    o
}

// ---------------------------------------------------------------- 5

fn small_rdis(n_frames: usize, seed: u64) -> Vec<RangeDopplerImage> {
    let cfg = RadarConfig::default();
    let spec = DatasetSpec {
        id_test_frames: n_frames,
        ood_test_frames: n_frames,
        frames_per_scene: 4,
        ..DatasetSpec::default()
    };
    let frames = build_dataset(&spec.recipe(Split::Test, &cfg, seed).unwrap(), &cfg, seed).unwrap();
    Preprocessor::new(&cfg)
        .unwrap()
        .preprocess(&frames)
        .unwrap()
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let weights = Autoencoder::<f32>::init(Variant::Patch, 5)
        .unwrap()
        .to_weights(5, None);
    let enc = weights.encoder_only();
    let expected = (9 + 1) * 16 + (9 * 16 + 1) * 32 + (9 * 32 + 1) * 64 + (1024 + 1) * 128;
    o.check(
        enc.param_count() == 154_496 && expected == 154_496,
        format!(
            "encoder parameters {} (hand count {expected})",
            enc.param_count()
        ),
    );

    let mut file = Vec::new();
    write_weights(&weights, true, &mut file).unwrap();
    let back = read_weights(&file[..]).unwrap();
    let payload: usize = back.tensors.iter().map(|(_, t)| 4 * t.len()).sum();
    o.check(
        payload == 617_984,
        format!("encoder-only payload {payload} bytes"),
    );
    o.check(
        (560_000..=700_000).contains(&payload) && (560_000..=700_000).contains(&file.len()),
        format!(
            "payload and file ({} bytes) inside [560 kB, 700 kB]",
            file.len()
        ),
    );
    o.check(
        !back.has_decoder(),
        "encoder-only file holds no dec.* tensors",
    );

    let rdis = small_rdis(8, 55);
    let full = Encoder::from_weights(&weights).unwrap();
    let stripped = Encoder::from_weights(&back).unwrap();
    let same = rdis.iter().all(|r| {
        score_energy(r, &full).unwrap().to_bits() == score_energy(r, &stripped).unwrap().to_bits()
    });
    o.check(
        same,
        format!(
            "S_e bit-identical without decoder tensors on {} maps",
            rdis.len()
        ),
    );
    o.summary = format!(
        "{} encoder parameters, {payload} byte payload",
        enc.param_count()
    );
    o
}

// ---------------------------------------------------------------- 6

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

fn class_scores(records: &[ScoreRecord], kind: ScoreKind) -> (Vec<f64>, Vec<f64>) {
    let id = records
        .iter()
        .filter(|r| r.label.is_id())
        .map(|r| r.score(kind))
        .collect();
    let ood = records
        .iter()
        .filter(|r| !r.label.is_id())
        .map(|r| r.score(kind))
        .collect();
    (id, ood)
}

fn criterion_6() -> Outcome {
    let t0 = Instant::now();
    let mut o = Outcome::new();
    let cfg = RadarConfig::default();
    let spec = DatasetSpec::default();
    let pre = Preprocessor::new(&cfg).unwrap();
    let data = |split| {
        let frames = build_dataset(&spec.recipe(split, &cfg, 0).unwrap(), &cfg, 0).unwrap();
        pre.preprocess(&frames).unwrap()
    };
    let (train, val, test) = (data(Split::Train), data(Split::Val), data(Split::Test));
    let n_id_test = test.iter().filter(|r| r.label.is_id()).count();
    o.note(format!(
        "data: {} train / {} val / {} ID test / {} OOD test",
        train.len(),
        val.len(),
        n_id_test,
        test.len() - n_id_test
    ));

    let seeds = [0u64, 1, 2];
    let (mut rec_auc, mut lse_auc, mut base_auc) = (Vec::new(), Vec::new(), Vec::new());
    for &seed in &seeds {
        let tc = TrainConfig {
            seed,
            ..TrainConfig::default()
        };
        let patch = train_variant(&train, Variant::Patch, &tc, |_, _| {}).unwrap();
        let base = train_variant(&train, Variant::FullImage, &tc, |_, _| {}).unwrap();
        for (name, h) in [
            ("patch", &patch.loss_history),
            ("baseline", &base.loss_history),
        ] {
            let (first, last) = (h[0], *h.last().unwrap());
            o.check(
                last < first,
                format!(
                    "(a) seed {seed} {name}: loss {first:.6} -> {last:.6} over {} epochs",
                    h.len()
                ),
            );
        }

        let ae = Autoencoder::from_weights(&patch.weights).unwrap();
        let scores = score_dataset(&test, &ae).unwrap();
        let val_scores = score_dataset(&val, &ae).unwrap();
        let base_ae = Autoencoder::from_weights(&base.weights).unwrap();
        let base_scores = score_dataset(&test, &base_ae).unwrap();

        for kind in [ScoreKind::Rec, ScoreKind::Energy] {
            let (id, ood) = class_scores(&scores, kind);
            let (mi, mo) = (mean(id.iter().copied()), mean(ood.iter().copied()));
            o.check(
                mi < mo,
                format!("(b) seed {seed} {kind}: mean ID {mi:.6} < mean OOD {mo:.6}"),
            );
            let auc = auroc(&id, &ood).unwrap();
            match kind {
                ScoreKind::Rec => rec_auc.push(auc),
                ScoreKind::Energy => lse_auc.push(auc),
            }

            let tau = calibrate_from_records(&val_scores, 0.95, kind).unwrap();
            let accepted = val_scores
                .iter()
                .filter(|r| classify(r.score(kind), &tau) == Decision::Id)
                .count() as f64
                / val_scores.len() as f64;
            o.check(
                (accepted - 0.95).abs() <= 0.02,
                format!(
                    "(d) seed {seed} {kind}: ID validation acceptance {:.2}% at quantile 0.95",
                    100.0 * accepted
                ),
            );
            let test_acc = id.iter().filter(|&&s| s < tau.value).count() as f64 / id.len() as f64;
            o.note(format!(
                "    seed {seed} {kind}: ID test acceptance {:.2}%",
                100.0 * test_acc
            ));
        }
        let (id, ood) = class_scores(&base_scores, ScoreKind::Rec);
        base_auc.push(auroc(&id, &ood).unwrap());
        o.note(format!(
            "    seed {seed}: AUROC PB-REC {:.2}  PB-LSE {:.2}  Baseline-REC {:.2}  ({:.0?} elapsed)",
            100.0 * rec_auc.last().unwrap(),
            100.0 * lse_auc.last().unwrap(),
            100.0 * base_auc.last().unwrap(),
            t0.elapsed()
        ));
    }
    let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (r, l, b) = (avg(&rec_auc), avg(&lse_auc), avg(&base_auc));
    o.check(
        r >= b,
        format!(
            "(c) mean AUROC PB-REC {:.2} >= Baseline-REC {:.2}",
            100.0 * r,
            100.0 * b
        ),
    );
    o.check(
        l >= b,
        format!(
            "(c) mean AUROC PB-LSE {:.2} >= Baseline-REC {:.2}",
            100.0 * l,
            100.0 * b
        ),
    );
    let took = t0.elapsed();
    o.note(format!(
        "wall clock {took:.0?} on this machine (target < 30 min on a laptop core)"
    ));
    o.summary = format!(
        "3 seeds: AUROC PB-REC {:.2}, PB-LSE {:.2}, Baseline-REC {:.2}",
        100.0 * r,
        100.0 * l,
        100.0 * b
    );
    o
}

// ---------------------------------------------------------------- 7

fn reduced_config(dir: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig::with_dir(7, dir);
    cfg.dataset = DatasetSpec {
        id_train_frames: 60,
        id_test_frames: 20,
        ood_test_frames: 20,
        frames_per_scene: 5,
        ..DatasetSpec::default()
    };
    cfg.train.epochs = 3;
    cfg
}

fn run_pipeline(cfg: &PipelineConfig) {
    pipeline::cmd_simulate(cfg).unwrap();
    pipeline::cmd_preprocess(cfg).unwrap();
    pipeline::cmd_train(cfg, false, |_, _| {}).unwrap();
    pipeline::cmd_train(cfg, true, |_, _| {}).unwrap();
    pipeline::cmd_score(cfg, false).unwrap();
    pipeline::cmd_score(cfg, true).unwrap();
    pipeline::cmd_calibrate(cfg).unwrap();
    pipeline::cmd_evaluate(cfg).unwrap();
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (ca, cb) = (reduced_config(a.path()), reduced_config(b.path()));
    run_pipeline(&ca);
    run_pipeline(&cb);
    let mut files: Vec<_> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    files.sort();
    for name in &files {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        o.check(
            x == y,
            format!("{:<26} {} bytes", name.to_string_lossy(), x.len()),
        );
    }
    o.check(
        files.len() == 16,
        format!("{} artifacts compared", files.len()),
    );

    // rerunning in place regenerates the same bytes
    let before = std::fs::read(&ca.paths.report_json).unwrap();
    std::fs::remove_file(&ca.paths.rdi_test).unwrap();
    pipeline::cmd_preprocess(&ca).unwrap();
    pipeline::cmd_score(&ca, false).unwrap();
    pipeline::cmd_evaluate(&ca).unwrap();
    let same_rdi =
        std::fs::read(&ca.paths.rdi_test).unwrap() == std::fs::read(&cb.paths.rdi_test).unwrap();
    o.check(
        same_rdi && before == std::fs::read(&ca.paths.report_json).unwrap(),
        "deleted intermediate regenerated byte-identical",
    );
    o.summary = format!(
        "{} artifacts byte-identical across two runs (reduced dataset)",
        files.len()
    );
    o
}

// ---------------------------------------------------------------- main

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        (1, "score oracles", criterion_1),
        (2, "gradient suite", criterion_2),
        (3, "DSP suite", criterion_3),
        (4, "metric oracles", criterion_4),
        (5, "structural consistency", criterion_5),
        (7, "determinism", criterion_7),
        (6, "desk-scale experiment", criterion_6),
    ];
    // optional criterion numbers on the command line select a subset
    let only: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut results = Vec::new();
    for (n, name, run) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let out = run();
        println!(
            "criterion {n} {name}: {} ({:.1?}) {}",
            if out.pass { "PASS" } else { "FAIL" },
            t.elapsed(),
            out.summary
        );
        for d in &out.details {
            println!("    {d}");
        }
        std::io::stdout().flush().unwrap();
        results.push((n, name, out.pass));
    }
    results.sort_by_key(|r| r.0);
    println!("\nacceptance summary");
    for (n, name, pass) in &results {
        println!(
            "  criterion {n} {:<24} {}",
            name,
            if *pass { "PASS" } else { "FAIL" }
        );
    }
    if results.iter().any(|r| !r.2) {
        std::process::exit(1);
    }
}
