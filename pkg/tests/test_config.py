import pytest
import yaml

from dualgap.config import CONFIG_FILENAME, find_config_file, load_config, parse_config, save_config
from dualgap.errors import ConfigError

MINIMAL = {"problem": {"family": "quadratic", "dim": 3}, "solver": "amd"}


def test_load_explicit_path(write_config):
    path = write_config(MINIMAL, name="experiment.yaml")
    assert load_config(str(path)) == MINIMAL


def test_config_is_found_in_parent_directories(tmp_path, monkeypatch, write_config):
    write_config(MINIMAL)
    nested = tmp_path / "runs" / "today"
    nested.mkdir(parents=True)
    monkeypatch.chdir(nested)
    assert find_config_file() == (tmp_path / CONFIG_FILENAME).resolve()
    assert load_config()["solver"] == "amd"


def test_missing_config(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "absent.yaml"))


def test_unreadable_and_non_mapping_documents(tmp_path):
    broken = tmp_path / "broken.yaml"
    broken.write_text("problem: [unclosed\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(broken))
    listing = tmp_path / "list.yaml"
    listing.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(listing))


def test_short_suffix_is_found(tmp_path, write_config):
    write_config(MINIMAL, name="dualgap.yml")
    assert find_config_file(tmp_path) == (tmp_path / "dualgap.yml").resolve()


def test_nearest_config_wins(tmp_path, write_config):
    write_config(MINIMAL)
    nested = tmp_path / "sweep"
    nested.mkdir()
    (nested / CONFIG_FILENAME).write_text(yaml.dump({**MINIMAL, "solver": "gd"}), encoding="utf-8")
    assert find_config_file(nested) == (nested / CONFIG_FILENAME).resolve()


def test_both_spellings_are_ambiguous(tmp_path, write_config):
    write_config(MINIMAL)
    write_config(MINIMAL, name="dualgap.yml")
    with pytest.raises(ConfigError):
        find_config_file(tmp_path)


def test_directory_named_like_a_config_is_skipped(tmp_path, write_config):
    (tmp_path / CONFIG_FILENAME).mkdir()
    write_config(MINIMAL, name="dualgap.yml")
    assert find_config_file(tmp_path) == (tmp_path / "dualgap.yml").resolve()


def test_save_then_load(tmp_path):
    path = save_config(MINIMAL, str(tmp_path / "configs" / CONFIG_FILENAME))
    assert yaml.safe_load(path.read_text(encoding="utf-8")) == MINIMAL
    assert parse_config(load_config(str(path))) == parse_config(MINIMAL)


def test_save_writes_the_raw_form_of_a_parsed_config(tmp_path):
    raw = {**MINIMAL, "k_max": 25}
    path = save_config(parse_config(raw), str(tmp_path / CONFIG_FILENAME))
    assert load_config(str(path)) == raw


def test_save_rejects_invalid_documents(tmp_path):
    target = tmp_path / CONFIG_FILENAME
    with pytest.raises(ConfigError):
        save_config({**MINIMAL, "solver": "adam"}, str(target))
    assert not target.exists()


def test_defaults():
    config = parse_config(MINIMAL)
    assert config.mode == "discrete"
    assert config.method == "amd"
    assert config.k_max == 100
    assert config.seed == 0
    assert config.tracker and config.strict
    assert config.map is None and config.schedule is None
    assert (config.trace, config.summary) == ("trace.csv", "summary.json")


def test_full_document():
    config = parse_config({
        "problem": {"family": "simplex-quadratic", "dim": 4, "seed": 11},
        "solver": "FW",
        "map": {"kind": "entropy"},
        "schedule": {"kind": "fw"},
        "k_max": 25,
        "tracker": {"enabled": True, "strict": False},
        "initial_point": [1, 0, 0, 0],
        "output": {"trace": "out/fw.csv", "summary": "out/fw.json"},
    })
    assert config.solver == "fw"
    assert config.seed == 11
    assert config.initial_point == (1.0, 0.0, 0.0, 0.0)
    assert not config.strict
    assert config.trace == "out/fw.csv"


@pytest.mark.parametrize("solver,mode,method", [("ct-amd", "continuous", "ct-amd"), ("vi-mp", "vi", "mp")])
def test_modes(solver, mode, method):
    config = parse_config({**MINIMAL, "solver": solver})
    assert config.mode == mode
    assert config.method == method


def test_tracker_may_be_a_boolean():
    assert not parse_config({**MINIMAL, "tracker": False}).tracker


@pytest.mark.parametrize("override", [
    {"problem": {"family": "rosenbrock"}},
    {"problem": "quadratic"},
    {"solver": "adam"},
    {"map": {"kind": "hyperbolic"}},
    {"map": {"kind": "euclidean", "scale": -1.0}},
    {"schedule": {"kind": "cosine"}},
    {"k_max": -3},
    {"k_max": "many"},
    {"h": 0.0},
    {"tracker": "yes"},
    {"initial_point": ["a", "b"]},
])
def test_malformed_documents(override):
    with pytest.raises(ConfigError):
        parse_config({**MINIMAL, **override})
