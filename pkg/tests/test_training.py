import math
import random

import numpy as np
import pytest
import torch

from sdm.checkpoint import restore_net
from sdm.encoding import EncoderConfig
from sdm.generation.attention import fuse_batch, pointer_logits
from sdm.geometry import build_random_model, normalize_model
from sdm.net import SdmNet
from sdm.training import (
    LabelError,
    MetricsReport,
    TrainConfig,
    TrainingError,
    build_labels,
    evaluate,
    iou,
    label_length_for,
    masked_weighted_bce,
    split_dataset,
    teacher_forcing_inputs,
    train,
)

torch.set_num_threads(1)


class _Pick:
    """rng stub whose randrange always lands on a chosen index."""

    def __init__(self, k):
        self.k = k

    def randrange(self, n):
        return self.k % n


class _Faces:
    def __init__(self, n):
        self.num_faces = n


def test_build_labels_hand_expansion():
    seq = build_labels(_Faces(12), {3, 7, 9}, _Pick(1), length=6, feature_type="step")
    assert seq.tokens == [7, 3, 9, 0, 0, 0]
    assert seq.valid_length == 3
    assert seq.feature_type == "step"


def test_build_labels_singleton():
    seq = build_labels(_Faces(5), {4}, random.Random(0), length=4)
    assert seq.tokens == [4, 0, 0, 0]
    assert seq.valid_length == 1


def test_build_labels_largest_feature_no_padding():
    seq = build_labels(_Faces(9), {2, 5, 6}, _Pick(0), length=4)
    assert seq.tokens == [2, 5, 6, 0]
    assert len(seq.tokens) == 4


def test_build_labels_errors():
    with pytest.raises(LabelError):
        build_labels(_Faces(5), set(), random.Random(0), length=4)
    with pytest.raises(LabelError):
        build_labels(_Faces(5), {1, 9}, random.Random(0), length=6)
    with pytest.raises(LabelError):
        build_labels(_Faces(9), {1, 2, 3, 4}, random.Random(0), length=4)


def test_teacher_forcing_rows():
    e_f = torch.randn(6, 8, dtype=torch.float64)
    fused = torch.randn(8, dtype=torch.float64)
    seq = build_labels(_Faces(6), {2, 4, 5}, _Pick(2), length=6)
    rows = teacher_forcing_inputs(seq, fused, e_f)
    assert rows.shape == (5, 8)
    assert torch.equal(rows[0], e_f[4])   # SOS face 5
    assert torch.equal(rows[1], e_f[1])
    assert torch.equal(rows[2], e_f[3])
    assert torch.equal(rows[3], torch.zeros(8, dtype=torch.float64))
    with pytest.raises(LabelError):
        teacher_forcing_inputs(seq, torch.randn(4), e_f)


def _tiny_net(seed=0, d=16):
    torch.manual_seed(seed)
    cfg = EncoderConfig(d_model=d, encoder_layers=1, heads=2,
                        feed_forward_dim=2 * d, dropout=0.0)
    return SdmNet(cfg).double()


def test_causal_hidden_states_ignore_future():
    net = _tiny_net(1)
    gen = net.generator
    inputs = torch.randn(1, 5, 16, dtype=torch.float64)
    memory = torch.randn(1, 1, 16, dtype=torch.float64)
    net.eval()
    with torch.no_grad():
        h1 = gen.hidden_states(inputs, memory)
        tampered = inputs.clone()
        tampered[0, 3:] = 99.0
        h2 = gen.hidden_states(tampered, memory)
    assert torch.allclose(h1[0, :3], h2[0, :3], atol=1e-12)


def test_one_pass_logits_match_stepwise():
    net = _tiny_net(2)
    net.eval()
    m = build_random_model("tf", random.Random(4), ["rect_through_slot"])
    from sdm.encoding import encode_model

    w = net.generator.weights
    with torch.no_grad():
        e_f = torch.tensor(encode_model(normalize_model(m), net.encoder).values,
                           dtype=torch.float64)
        e_s = net.text_provider.embed("rect_through_slot").double()
        fused = fuse_batch(e_s.view(1, -1), e_f.unsqueeze(0), None, w)[0]
        label = m.feature_labels[0]
        seq = build_labels(m, label.face_ids, _Pick(0), length=len(label.face_ids) + 2)
        rows = teacher_forcing_inputs(seq, fused, e_f)
        cands = net.generator.candidate_matrix(e_f)

        one_pass = net.generator.hidden_states(rows.unsqueeze(0),
                                               fused.view(1, 1, -1))[0]
        for tau in range(seq.valid_length):
            h_step = net.generator.hidden_states(rows[: tau + 1].unsqueeze(0),
                                                 fused.view(1, 1, -1))[0, -1]
            la = pointer_logits(cands, one_pass[tau], w)
            lb = pointer_logits(cands, h_step, w)
            assert torch.max(torch.abs(la - lb)).item() <= 1e-6


def _oracle_loss(p, t, m, alpha):
    tot = 0.0
    denom = 0
    B, P = len(t), len(t[0])
    for i in range(B):
        for j in range(P):
            if m[i][j]:
                denom += 1
                q = p[i][j][t[i][j]]
                q = min(max(q, 1e-7), 1.0 - 1e-7)
                w = alpha if t[i][j] == 0 else 1.0
                tot += -math.log(q) * w
    return tot / denom


def test_loss_matches_scalar_oracle():
    rng = np.random.default_rng(31)
    for _ in range(50):
        B = int(rng.integers(1, 5))
        P = int(rng.integers(1, 7))
        C = int(rng.integers(2, 10))
        raw = rng.uniform(0.01, 1.0, size=(B, P, C))
        p = raw / raw.sum(axis=-1, keepdims=True)
        t = rng.integers(0, C, size=(B, P))
        m = rng.uniform(size=(B, P)) < 0.7
        if not m.any():
            m[0, 0] = True
        alpha = float(rng.uniform(1.0, 8.0))
        got = masked_weighted_bce(torch.tensor(p), torch.tensor(t),
                                  torch.tensor(m), alpha).item()
        want = _oracle_loss(p.tolist(), t.tolist(), m.tolist(), alpha)
        assert abs(got - want) <= 1e-9


def test_loss_perfect_predictions_near_zero():
    p = torch.zeros(1, 3, 4, dtype=torch.float64)
    t = torch.tensor([[2, 1, 0]])
    for j, c in enumerate(t[0]):
        p[0, j, c] = 1.0
    m = torch.ones(1, 3, dtype=torch.bool)
    loss = masked_weighted_bce(p, t, m, 5.0).item()
    assert 0.0 <= loss <= 1e-6


def test_loss_alpha_one_is_plain_mean_nll():
    rng = np.random.default_rng(5)
    raw = rng.uniform(0.05, 1.0, size=(2, 4, 5))
    p = raw / raw.sum(axis=-1, keepdims=True)
    t = rng.integers(1, 5, size=(2, 4))   # no EOS targets
    m = np.ones((2, 4), dtype=bool)
    got = masked_weighted_bce(torch.tensor(p), torch.tensor(t),
                              torch.tensor(m), 1.0).item()
    want = -np.mean(np.log(np.take_along_axis(p, t[..., None], axis=-1)))
    assert abs(got - want) <= 1e-12


def test_loss_rejects_bad_inputs():
    p = torch.full((1, 2, 3), 1.0 / 3.0)
    t = torch.zeros(1, 2, dtype=torch.long)
    m = torch.ones(1, 2, dtype=torch.bool)
    with pytest.raises(TrainingError):
        masked_weighted_bce(p, t, m, 0.5)
    with pytest.raises(TrainingError):
        masked_weighted_bce(p * 4.0, t, m, 2.0)
    with pytest.raises(TrainingError):
        masked_weighted_bce(p, t, torch.zeros(1, 2, dtype=torch.bool), 2.0)
    with pytest.raises(TrainingError):
        masked_weighted_bce(p, torch.zeros(1, 3, dtype=torch.long), m, 2.0)


def test_loss_gradient_matches_finite_differences():
    rng = np.random.default_rng(41)
    logits = torch.tensor(rng.normal(size=(2, 3, 5)), requires_grad=True)
    t = torch.tensor(rng.integers(0, 5, size=(2, 3)))
    m = torch.tensor(rng.uniform(size=(2, 3)) < 0.8)
    if not m.any():
        m[0, 0] = True

    def f():
        return masked_weighted_bce(torch.softmax(logits, dim=-1), t, m, 3.0)

    loss = f()
    (grad,) = torch.autograd.grad(loss, logits)
    eps = 1e-4
    flat = logits.data.view(-1)
    for i in rng.choice(flat.numel(), size=8, replace=False):
        orig = flat[i].item()
        flat[i] = orig + eps
        hi = f().item()
        flat[i] = orig - eps
        lo = f().item()
        flat[i] = orig
        fd = (hi - lo) / (2 * eps)
        an = grad.view(-1)[i].item()
        assert abs(fd - an) / max(abs(fd), abs(an), 1e-8) <= 1e-3


def test_iou_arithmetic():
    assert iou({2, 5, 7}, {2, 5, 8}) == 0.5
    assert iou({1, 2}, {1, 2}) == 1.0
    assert iou(set(), {1}) == 0.0
    # one exact + one half-overlap feature
    vals = [iou({1, 2}, {1, 2}), iou({2, 5, 7}, {2, 5, 8})]
    assert sum(vals) / 2 == 0.75
    assert abs(sum(v == 1.0 for v in vals) / 2 - 0.5) < 1e-12


def test_metrics_report_validation():
    with pytest.raises(ValueError):
        MetricsReport(iou_mean=1.2, em_rate=0.0, ordered_em_rate=0.0, n_samples=1)
    r = MetricsReport(iou_mean=0.9, em_rate=0.5, ordered_em_rate=0.25, n_samples=4)
    assert MetricsReport.from_dict(r.to_dict()) == r


def _dataset(count, seed):
    out = []
    for i in range(count):
        n = (i % 3) + 1
        types = ["rect_through_slot", "step", "circular_through_hole"][:n]
        out.append(build_random_model(f"m{seed}_{i}", random.Random(seed + i), types))
    return out


def test_split_dataset_disjoint_and_stratified():
    models = _dataset(30, 100)
    tr, va, te = split_dataset(models, seed=3)
    ids = lambda part: {m.model_id for m in part}
    assert not (ids(tr) & ids(va)) and not (ids(tr) & ids(te)) and not (ids(va) & ids(te))
    assert len(tr) + len(va) + len(te) == 30
    assert len(tr) >= 22
    sig = lambda m: tuple(sorted(l.feature_type for l in m.feature_labels))
    assert {sig(m) for m in tr} == {sig(m) for m in models}


def test_label_length_from_dataset():
    models = _dataset(3, 200)
    biggest = max(len(l.face_ids) for m in models for l in m.feature_labels)
    assert label_length_for(models) == biggest + 2


def test_training_deterministic_and_checkpointable(tmp_path):
    models = _dataset(4, 300)
    cfg = EncoderConfig(d_model=32, encoder_layers=1, heads=2,
                        feed_forward_dim=64, dropout=0.0)
    tc = TrainConfig(batch_size=4, epochs=2, seed=11, patience=50)
    ckpt = tmp_path / "net.npz"
    _, rep1 = train(models, [], tc, cfg, checkpoint_path=ckpt)
    _, rep2 = train(models, [], tc, cfg)
    assert rep1.loss_curve == rep2.loss_curve
    assert all(math.isfinite(x) for x in rep1.loss_curve)
    assert 0.0 <= rep1.iou_mean <= 1.0
    assert rep1.em_rate <= rep1.iou_mean + 1e-12 or rep1.em_rate <= 1.0

    net, meta = restore_net(ckpt)
    assert meta["train_config"]["seed"] == 11
    rep3 = evaluate(net, models)
    assert abs(rep3.iou_mean - rep1.iou_mean) <= 1e-12


def test_train_rejects_overlapping_splits():
    models = _dataset(3, 400)
    tc = TrainConfig(batch_size=2, epochs=1)
    with pytest.raises(TrainingError):
        train(models, models[:1], tc,
              EncoderConfig(d_model=16, encoder_layers=1, heads=2,
                            feed_forward_dim=32, dropout=0.0))


def test_em_implies_full_iou_in_evaluate():
    models = _dataset(2, 500)
    net = _tiny_net(9, d=16).float()
    rep = evaluate(net, models)
    assert rep.n_samples == 3
    for t, row in rep.per_type.items():
        if row["em_rate"] == 1.0:
            assert row["iou_mean"] == 1.0
