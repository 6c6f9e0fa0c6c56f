"""Secondary acceptance: split discipline, loss correctness, end-to-end smoke.

Run with ``pytest trainer/tests/test_trainer_acceptance.py -v -s``. The smoke
test drives the full loop: toy dataset -> forge-generated training pools ->
split training -> exported score maps -> forge eval, and must clear pixel
AUROC >= 0.90 where an untrained model stays <= 0.6.
"""

import json
import time

import pytest
import torch
import torch.nn.functional as F

import forgefit as fg
from forgefit.pools import run_forge


def _report(name, detail=""):
    print(f"[PASS] {name}" + (f" ({detail})" if detail else ""))


def test_split_discipline_criterion(small_pools):
    half_x, half_y, pool_x, pool_y = small_pools

    # R parameters bit-unchanged when the batch_X losses are masked to zero
    trainer = fg.SplitTrainer(fg.TrainConfig(seed=100, batch_size=3))
    pair = trainer.pair_from_entries(
        list(pool_x.all_entries())[:3], list(pool_y.all_entries())[:3]
    )
    trainer.train_step(pair)  # accumulate optimizer state first
    before = [p.detach().clone() for p in trainer.recon.parameters()]
    trainer.train_step(pair, recon_loss_scale=0.0)
    assert all(torch.equal(a, b) for a, b in zip(before, trainer.recon.parameters()))

    # epoch-level file sets seen by the two loss groups = the split halves
    seen_recon, seen_focal = set(), set()
    x_entries, y_entries = list(pool_x.all_entries()), list(pool_y.all_entries())
    n = max(len(x_entries), len(y_entries))
    for start in range(0, n, 3):
        px = [x_entries[(start + i) % len(x_entries)] for i in range(3)]
        py = [y_entries[(start + i) % len(y_entries)] for i in range(3)]
        batch = trainer.pair_from_entries(px, py)
        trainer.train_step(batch)
        seen_recon.update(batch.x_origins)
        seen_focal.update(batch.y_origins)
    assert seen_recon == set(half_x)
    assert seen_focal == set(half_y)
    assert seen_recon.isdisjoint(seen_focal)
    _report("split discipline", "R bit-stable under zeroed recon loss; halves disjoint")


def test_loss_correctness_criterion():
    torch.manual_seed(42)

    # focal gradient vs central finite differences, relative 1e-4
    pred = (torch.rand(4, 4, dtype=torch.float64) * 0.8 + 0.1).requires_grad_(True)
    gt = (torch.rand(4, 4) > 0.5).double()
    fg.focal_loss(pred, gt, gamma=2.0).backward()
    h = 1e-6
    fd = torch.zeros_like(pred)
    with torch.no_grad():
        for i in range(4):
            for j in range(4):
                plus, minus = pred.detach().clone(), pred.detach().clone()
                plus[i, j] += h
                minus[i, j] -= h
                fd[i, j] = (fg.focal_loss(plus, gt, 2.0) - fg.focal_loss(minus, gt, 2.0)) / (2 * h)
    rel = float((pred.grad - fd).abs().max() / fd.abs().max())
    assert rel <= 1e-4

    # focal(gamma=0) == BCE within 1e-10
    p2 = torch.rand(8, 8, dtype=torch.float64) * 0.9 + 0.05
    g2 = (torch.rand(8, 8) > 0.5).double()
    bce = float(F.binary_cross_entropy(p2.clamp(1e-7, 1 - 1e-7), g2))
    assert float(fg.focal_loss(p2, g2, gamma=0.0)) == pytest.approx(bce, abs=1e-10)

    # ssim_loss(a, a) = 0 and symmetry within 1e-10
    a = torch.rand(2, 3, 32, 32, dtype=torch.float64)
    b = torch.rand(2, 3, 32, 32, dtype=torch.float64)
    assert float(fg.ssim_loss(a, a)) == pytest.approx(0.0, abs=1e-10)
    assert abs(float(fg.ssim_loss(a, b)) - float(fg.ssim_loss(b, a))) <= 1e-10
    _report("loss correctness", f"focal FD rel err {rel:.2e}")


def test_end_to_end_smoke(tmp_path):
    start = time.perf_counter()
    root = tmp_path

    # toy data: stripes, 64x64, 40 normals
    fg.make_toy_dataset("stripes", n=40, size=64, seed=7, root=root / "toy")
    half_x, half_y = fg.parity_split(root / "toy" / fg.TOY_CLASS / "train" / "good")

    # training pools through the forge CLI (opaque + transparent)
    categories = ["opaque", "transparent"]
    pool_x = fg.build_half_pool(half_x, root / "stage_x", fg.TOY_CLASS, categories, 40, master_seed=101)
    pool_y = fg.build_half_pool(half_y, root / "stage_y", fg.TOY_CLASS, categories, 40, master_seed=202)

    # held-out simulated anomalies from the toy test split
    fg.forge_generate(
        dataset_root=root / "toy",
        class_name=fg.TOY_CLASS,
        out_dir=root / "evalbench",
        categories=categories,
        per_category_count=20,
        master_seed=999,
        work_dir=root,
    )
    images, gts = root / "eval_imgs", root / "eval_gts"
    fg.flatten_benchmark(root / "evalbench", categories, images, gts)

    def evaluate(model, tag):
        scores = root / f"scores_{tag}"
        fg.export_scoremaps(model, images, scores)
        report_path = root / f"report_{tag}.json"
        run_forge(["eval", "--scores", str(scores), "--gt", str(gts), "--out", str(report_path)])
        return json.loads(report_path.read_text())

    untrained = fg.SplitTrainer(fg.TrainConfig(seed=55))
    baseline = evaluate(untrained, "untrained")
    assert baseline["pixel"]["auroc"] <= 0.6, f"untrained baseline {baseline['pixel']['auroc']:.3f}"

    trainer = fg.SplitTrainer(fg.TrainConfig(steps=500, batch_size=8, seed=3))
    assert trainer.config.steps <= 2000
    history = trainer.fit(pool_x, pool_y, log_path=root / "train_log.jsonl")
    assert len(history) == 500
    assert (root / "train_log.jsonl").read_text().count("\n") == 500

    report = evaluate(trainer, "trained")
    auroc = report["pixel"]["auroc"]
    assert auroc >= 0.90, f"trained pixel AUROC {auroc:.3f} below 0.90"

    elapsed = time.perf_counter() - start
    assert elapsed <= 900.0, f"smoke took {elapsed:.0f}s (budget 900s)"
    _report(
        "end-to-end smoke",
        f"pixel AUROC {auroc:.3f} (untrained {baseline['pixel']['auroc']:.3f}), {elapsed:.0f}s",
    )
