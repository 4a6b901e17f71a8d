use rand::{Rng as _, SeedableRng};
use wordbench::corpus::Vocabulary;
use wordbench::embedding::{CharWordVocab, ContextRef, EmbeddingModel, Gradients, ModelKind, ModelShape, OutputLayer};
use wordbench::optim::gradient_check;
use wordbench::rng::Rng;
use wordbench::segment::{SegGradients, SegmenterNet, Tag};
use wordbench::textclass::{DocModel, DocVocab, RcnnModel, RcnnShape, WindowCnnModel};

use crate::{ensure, Outcome};

const EPS: f64 = 1e-5;
const TOLERANCE: f64 = 1e-4;
const CONFIGS: usize = 60;

fn randomize(flat_len: usize, rng: &mut Rng) -> Vec<f64> {
    (0..flat_len).map(|_| rng.gen_range(-0.6..0.6)).collect()
}

fn embedding_model(kind: ModelKind, vocab: usize, input_rows: usize, rng: &mut Rng) -> EmbeddingModel {
    let mut shape = ModelShape::new(kind, vocab, rng.gen_range(2..5), [3, 5][rng.gen_range(0..2)]);
    shape.hidden = rng.gen_range(2..5);
    shape.input_rows = input_rows;
    let mut m = EmbeddingModel::new(shape, rng).unwrap();
    let p = randomize(m.flat_params().len(), rng);
    m.set_flat_params(&p);
    m
}

fn negatives(rng: &mut Rng, vocab: usize, target: usize, k: usize) -> Vec<usize> {
    (0..k)
        .map(|_| loop {
            let n = rng.gen_range(0..vocab);
            if n != target {
                break n;
            }
        })
        .collect()
}

fn window_context(rng: &mut Rng, vocab: usize, win: usize) -> Vec<(i32, usize)> {
    let half = (win / 2) as i32;
    let mut ctx = Vec::new();
    for o in (-half..=half).filter(|&o| o != 0) {
        if rng.gen_bool(0.8) {
            ctx.push((o, rng.gen_range(0..vocab)));
        }
    }
    if ctx.is_empty() {
        ctx.push((1, rng.gen_range(0..vocab)));
    }
    ctx
}

fn check_embedding<F>(model: &EmbeddingModel, loss: F) -> f64
where
    F: Fn(&EmbeddingModel, &mut Gradients) -> f64,
{
    let mut g = Gradients::for_model(model);
    loss(model, &mut g);
    let analytic = model.dense_gradient(&g);
    let mut probe = model.clone();
    gradient_check(
        |p| {
            probe.set_flat_params(p);
            loss(&probe, &mut Gradients::for_model(&probe))
        },
        &model.flat_params(),
        &analytic,
        EPS,
    )
}

fn predictive(kind: ModelKind, full_softmax: bool) -> f64 {
    let vocab = 6;
    let mut worst: f64 = 0.0;
    for seed in 0..CONFIGS as u64 {
        let mut rng = Rng::seed_from_u64(seed);
        let mut model = embedding_model(kind, vocab, vocab, &mut rng);
        if full_softmax {
            model.shape.output_layer = OutputLayer::FullSoftmax;
        }
        let target = rng.gen_range(0..vocab);
        let k = rng.gen_range(1..5);
        let negs = if full_softmax { Vec::new() } else { negatives(&mut rng, vocab, target, k) };
        let ctx = window_context(&mut rng, vocab, model.shape.win);
        let err = check_embedding(&model, |m, g| {
            let c = if kind == ModelKind::SkipGram { ContextRef::Word(ctx[0].1) } else { ContextRef::Window(&ctx) };
            m.unit_loss_grad(c, target, &negs, 1.0, g).unwrap()
        });
        worst = worst.max(err);
    }
    worst
}

fn cw() -> (f64, usize) {
    let vocab = 6;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut seed = 0;
    while checked < CONFIGS {
        let mut rng = Rng::seed_from_u64(10_000 + seed);
        seed += 1;
        let model = embedding_model(ModelKind::Cw, vocab, vocab, &mut rng);
        let win = model.shape.win;
        let window: Vec<Option<usize>> = (0..win)
            .map(|i| (i == win / 2 || rng.gen_bool(0.8)).then(|| rng.gen_range(0..vocab)))
            .collect();
        let neg = (window[win / 2].unwrap() + rng.gen_range(1..vocab)) % vocab;
        let loss = |m: &EmbeddingModel, g: &mut Gradients| m.cw_loss_grad(&window, neg, g).unwrap();
        // the hinge is flat outside the margin; only active points carry a gradient to check
        if loss(&model, &mut Gradients::for_model(&model)) < 1e-3 {
            continue;
        }
        worst = worst.max(check_embedding(&model, loss));
        checked += 1;
    }
    (worst, checked)
}

fn charword(beta: f64) -> f64 {
    let words = Vocabulary::build(["星期天", "星期", "天", "江", "江口", "口", "天", "大学生"], 1).unwrap();
    let cw = CharWordVocab::new(words);
    let nw = cw.n_words();
    let mut worst: f64 = 0.0;
    for seed in 0..CONFIGS as u64 {
        let mut rng = Rng::seed_from_u64(20_000 + seed);
        let model = embedding_model(ModelKind::SkipGram, nw, cw.joint_size(), &mut rng);
        let ctx_word = rng.gen_range(0..nw);
        let target = rng.gen_range(0..nw);
        let char_context = seed % 2 == 1;
        let negs: Vec<Vec<usize>> = (0..8).map(|_| negatives(&mut rng, nw, target, 2)).collect();
        let err = check_embedding(&model, |m, g| {
            let chars = cw.chars_of(ctx_word);
            let n = chars.len() as f64;
            let mut loss = m.unit_loss_grad(ContextRef::Word(ctx_word), target, &negs[0], 1.0 - beta, g).unwrap();
            for (i, &ch) in chars.iter().enumerate() {
                loss += m.unit_loss_grad(ContextRef::Word(ch), target, &negs[1 + i], beta / n, g).unwrap();
                if char_context {
                    loss += m.unit_loss_grad(ContextRef::Word(ch), target, &negs[4 + i], 1.0, g).unwrap();
                }
            }
            loss
        });
        worst = worst.max(err);
    }
    worst
}

fn segmenter() -> f64 {
    let chars: Vec<String> = "中国人民大学北京".chars().map(String::from).collect();
    let mut worst: f64 = 0.0;
    for seed in 0..CONFIGS as u64 {
        let mut rng = Rng::seed_from_u64(30_000 + seed);
        let win = [1, 3, 5][rng.gen_range(0..3)];
        let mut net = SegmenterNet::new(&chars, rng.gen_range(2..5), rng.gen_range(2..5), win, &mut rng).unwrap();
        let p = randomize(net.flat_params().len(), &mut rng);
        net.set_flat_params(&p);
        let len = rng.gen_range(1..7);
        let units: Vec<String> = (0..len).map(|_| chars[rng.gen_range(0..chars.len())].clone()).collect();
        let ids = net.encode(&units);
        let i = rng.gen_range(0..len);
        let gold = Tag::from_index(rng.gen_range(0..4));
        let mut g = SegGradients::for_net(&net);
        net.loss_grad(&ids, i, gold, &mut g);
        let analytic = net.dense_gradient(&g);
        let mut probe = net.clone();
        let err = gradient_check(
            |p| {
                probe.set_flat_params(p);
                probe.loss_grad(&ids, i, gold, &mut SegGradients::for_net(&probe))
            },
            &net.flat_params(),
            &analytic,
            EPS,
        );
        worst = worst.max(err);
    }
    worst
}

fn doc_model<M: DocModel>(model: &M, ids: &[usize], class: usize) -> f64 {
    let mut g = model.new_grads();
    model.loss_grad(ids, class, &mut g).unwrap();
    let analytic = model.dense_gradient(&g);
    let mut probe = model.clone();
    gradient_check(
        |p| {
            probe.set_flat_params(p);
            -probe.log_probs(ids).unwrap()[class]
        },
        &model.flat_params(),
        &analytic,
        EPS,
    )
}

fn classifiers() -> (f64, f64) {
    let vocab = DocVocab::build([["a", "b", "c", "d", "e"]]);
    let (mut rcnn, mut cnn): (f64, f64) = (0.0, 0.0);
    for seed in 0..CONFIGS as u64 {
        let mut rng = Rng::seed_from_u64(40_000 + seed);
        let classes = rng.gen_range(2..4);
        let ids: Vec<usize> = (0..3).map(|_| rng.gen_range(1..vocab.len())).collect();
        let class = rng.gen_range(0..classes);
        let shape = RcnnShape {
            word_dim: rng.gen_range(1..5),
            context_dim: rng.gen_range(1..5),
            hidden: rng.gen_range(1..6),
            classes,
        };
        let model = RcnnModel::new(vocab.clone(), shape, &mut rng).unwrap();
        rcnn = rcnn.max(doc_model(&model, &ids, class));
        let win = [1, 3, 5][seed as usize % 3];
        let model = WindowCnnModel::new(vocab.clone(), win, rng.gen_range(1..5), rng.gen_range(1..6), classes, &mut rng)
            .unwrap();
        cnn = cnn.max(doc_model(&model, &ids, class));
    }
    (rcnn, cnn)
}

pub fn all_gradient_checks() -> Outcome {
    let mut results: Vec<(String, f64)> = Vec::new();
    for kind in [ModelKind::SkipGram, ModelKind::Cbow, ModelKind::Order, ModelKind::Lbl, ModelKind::Nnlm] {
        results.push((kind.to_string(), predictive(kind, false)));
    }
    results.push(("skipgram-softmax".into(), predictive(ModelKind::SkipGram, true)));
    let (cw_worst, cw_checked) = cw();
    ensure!(cw_checked >= 50, "only {cw_checked} active C&W configurations");
    results.push(("cw".into(), cw_worst));
    for beta in [0.0, 0.5, 1.0] {
        results.push((format!("charword(beta={beta})"), charword(beta)));
    }
    results.push(("segmenter".into(), segmenter()));
    let (rcnn, cnn) = classifiers();
    results.push(("rcnn".into(), rcnn));
    results.push(("window-cnn".into(), cnn));
    let summary = results
        .iter()
        .map(|(n, e)| format!("{n} {e:.1e}"))
        .collect::<Vec<_>>()
        .join(", ");
    for (name, err) in &results {
        ensure!(*err < TOLERANCE, "{name}: max relative error {err:.3e} (all: {summary})");
    }
    Ok(format!("{CONFIGS} configurations each; worst errors: {summary}"))
}
