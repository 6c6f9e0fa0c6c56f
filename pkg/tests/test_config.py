import pytest

from flawforge import ConfigError
from flawforge.config import parse_generation_config

from ff_testlib import build_mvtec_tree


@pytest.fixture
def base_config(tmp_path):
    tree = build_mvtec_tree(tmp_path / "data", "toycls", n_train=2, n_test=2, size=64, n_defect=0)
    return {
        "dataset_root": str(tree),
        "class_name": "toycls",
        "out_dir": str(tmp_path / "out"),
        "categories": ["opaque"],
    }


class TestSchema:
    def test_minimal_config_with_defaults(self, base_config):
        cfg = parse_generation_config(base_config)
        assert cfg.per_category_count == 100
        assert cfg.master_seed == 0
        assert cfg.source_pool.mode == "self-patch"

    def test_unknown_root_key_pointer(self, base_config):
        base_config["master_sead"] = 7
        with pytest.raises(ConfigError) as exc:
            parse_generation_config(base_config)
        assert exc.value.pointer == "/master_sead"

    def test_unknown_nested_key_pointer(self, base_config):
        base_config["operator_params"] = {"betta_range": [0.1, 0.9]}
        with pytest.raises(ConfigError) as exc:
            parse_generation_config(base_config)
        assert exc.value.pointer == "/operator_params/betta_range"

    def test_bad_category_pointer(self, base_config):
        base_config["categories"] = ["opaque", "sparkle"]
        with pytest.raises(ConfigError) as exc:
            parse_generation_config(base_config)
        assert exc.value.pointer == "/categories/1"

    def test_category_alias_accepted(self, base_config):
        base_config["categories"] = ["ndaa"]
        assert parse_generation_config(base_config).categories == ("nda",)

    def test_missing_required_key(self, base_config):
        del base_config["class_name"]
        with pytest.raises(ConfigError, match="class_name"):
            parse_generation_config(base_config)

    def test_missing_dataset_root(self, base_config):
        base_config["dataset_root"] = base_config["dataset_root"] + "_nope"
        with pytest.raises(ConfigError) as exc:
            parse_generation_config(base_config)
        assert exc.value.pointer == "/dataset_root"

    def test_external_pool_requires_existing_dir(self, base_config, tmp_path):
        base_config["source_pool"] = {"mode": "external", "path": str(tmp_path / "nope")}
        with pytest.raises(ConfigError) as exc:
            parse_generation_config(base_config)
        assert exc.value.pointer == "/source_pool/path"

    def test_external_pool_lists_images(self, base_config, tmp_path):
        pool_dir = tmp_path / "textures"
        pool_dir.mkdir()
        from ff_testlib import texture_image
        from flawforge import save_png

        save_png(texture_image(5, 32), pool_dir / "t0.png")
        save_png(texture_image(6, 32), pool_dir / "t1.png")
        (pool_dir / "notes.txt").write_text("ignored")
        base_config["source_pool"] = {"mode": "external", "path": str(pool_dir)}
        cfg = parse_generation_config(base_config)
        assert len(cfg.source_pool.paths) == 2

    def test_invalid_ndaa_param_pointer(self, base_config):
        base_config["operator_params"] = {"ndaa_params": {"block_size": 1}}
        with pytest.raises(ConfigError) as exc:
            parse_generation_config(base_config)
        assert "block_size" in str(exc.value)

    def test_bad_master_seed(self, base_config):
        base_config["master_seed"] = -1
        with pytest.raises(ConfigError) as exc:
            parse_generation_config(base_config)
        assert exc.value.pointer == "/master_seed"

    def test_bool_not_accepted_as_int(self, base_config):
        base_config["per_category_count"] = True
        with pytest.raises(ConfigError):
            parse_generation_config(base_config)

    def test_profile_overrides_typed(self, base_config):
        base_config["profile_overrides"] = {"rotation_tolerant": "yes"}
        with pytest.raises(ConfigError) as exc:
            parse_generation_config(base_config)
        assert exc.value.pointer == "/profile_overrides/rotation_tolerant"

    def test_operator_params_roundtrip(self, base_config):
        base_config["operator_params"] = {
            "beta_range": [0.2, 0.7],
            "mask_params": {"min_area_frac": 0.01, "max_area_frac": 0.5},
            "poisson_tol": 1e-5,
        }
        cfg = parse_generation_config(base_config)
        assert cfg.operator_params.beta_range == (0.2, 0.7)
        assert cfg.operator_params.mask_params.min_area_frac == 0.01
        assert cfg.operator_params.poisson_tol == 1e-5
