import numpy as np
import pytest
from PIL import Image

import forgefit as fg


class TestMakeToyDataset:
    def test_counts(self, tmp_path):
        fg.make_toy_dataset("stripes", n=8, size=48, seed=0, root=tmp_path)
        train = list((tmp_path / fg.TOY_CLASS / "train" / "good").glob("*.png"))
        test = list((tmp_path / fg.TOY_CLASS / "test" / "good").glob("*.png"))
        assert len(train) == 8
        assert len(test) == 8

    def test_deterministic(self, tmp_path):
        fg.make_toy_dataset("checker", n=3, size=48, seed=9, root=tmp_path / "a")
        fg.make_toy_dataset("checker", n=3, size=48, seed=9, root=tmp_path / "b")
        for rel in ("train/good/000.png", "test/good/002.png"):
            a = (tmp_path / "a" / fg.TOY_CLASS / rel).read_bytes()
            b = (tmp_path / "b" / fg.TOY_CLASS / rel).read_bytes()
            assert a == b

    def test_images_are_8bit_rgb(self, tmp_path):
        fg.make_toy_dataset("stripes", n=1, size=64, seed=1, root=tmp_path)
        with Image.open(tmp_path / fg.TOY_CLASS / "train" / "good" / "000.png") as img:
            assert img.mode == "RGB"
            assert img.size == (64, 64)

    def test_patterns_differ_per_image(self, tmp_path):
        fg.make_toy_dataset("stripes", n=2, size=48, seed=2, root=tmp_path)
        a = np.asarray(Image.open(tmp_path / fg.TOY_CLASS / "train" / "good" / "000.png"))
        b = np.asarray(Image.open(tmp_path / fg.TOY_CLASS / "train" / "good" / "001.png"))
        assert not np.array_equal(a, b)

    def test_unknown_pattern(self, tmp_path):
        with pytest.raises(ValueError):
            fg.make_toy_dataset("plaid", n=1, size=48, seed=0, root=tmp_path)

    def test_too_small(self, tmp_path):
        with pytest.raises(ValueError):
            fg.make_toy_dataset("stripes", n=1, size=16, seed=0, root=tmp_path)

    def test_forge_cli_accepts_layout(self, toy_root, tmp_path):
        # layout contract: the primary CLI must ingest and augment the tree
        entries = fg.forge_generate(
            dataset_root=toy_root,
            class_name=fg.TOY_CLASS,
            out_dir=tmp_path / "bench",
            categories=["cutpaste"],
            per_category_count=2,
            master_seed=0,
            work_dir=tmp_path,
        )
        assert len(entries) == 2


class TestParitySplit:
    def test_even_odd(self, tmp_path):
        fg.make_toy_dataset("stripes", n=5, size=48, seed=3, root=tmp_path)
        half_x, half_y = fg.parity_split(tmp_path / fg.TOY_CLASS / "train" / "good")
        assert [p.name for p in half_x] == ["000.png", "002.png", "004.png"]
        assert [p.name for p in half_y] == ["001.png", "003.png"]
