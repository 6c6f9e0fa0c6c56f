import pytest

from ff_testlib import build_mvtec_tree


@pytest.fixture
def mvtec_tree(tmp_path):
    """Tiny MVTec-layout class with textured train/test images and one defect kind."""
    return build_mvtec_tree(tmp_path / "data", "toycls", n_train=6, n_test=4, size=64)
