import pytest

import forgefit as fg


@pytest.fixture(scope="session")
def toy_root(tmp_path_factory):
    """Small stripes dataset shared by the fast tests (48x48, 6+6 images)."""
    root = tmp_path_factory.mktemp("toy")
    fg.make_toy_dataset("stripes", n=6, size=48, seed=11, root=root)
    return root


@pytest.fixture(scope="session")
def small_pools(toy_root, tmp_path_factory):
    """Pools for the two parity halves, built through the forge CLI."""
    work = tmp_path_factory.mktemp("pools")
    half_x, half_y = fg.parity_split(toy_root / fg.TOY_CLASS / "train" / "good")
    pool_x = fg.build_half_pool(
        half_x, work / "stage_x", fg.TOY_CLASS, ["opaque"], per_category_count=6, master_seed=21
    )
    pool_y = fg.build_half_pool(
        half_y, work / "stage_y", fg.TOY_CLASS, ["opaque"], per_category_count=6, master_seed=22
    )
    return half_x, half_y, pool_x, pool_y
