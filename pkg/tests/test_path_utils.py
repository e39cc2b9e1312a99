import pytest

from project.src.utils.env_utils import get_default_seed, get_default_threads
from project.src.utils.path_utils import (
    get_reference_table_path,
    looks_like_file_path,
    parse_reference_table,
    resolve_output_path,
)


def test_shipped_reference_table():
    rows = parse_reference_table(get_reference_table_path("composite2d"))
    assert len(rows) == 5
    assert rows[0]["point"] == (0.0, 0.0)
    assert rows[2] == {
        "point": (1.0, 0.0), "gda_stable": True, "ogda_stable": True, "local_minmax": True,
        "f_value": 0.0, "prob_gda": 78.0, "prob_ogda": 35.4,
    }


@pytest.mark.parametrize(
    "text,message",
    [
        ("point|gda_stable\n0,0|NO\n", "header"),
        ("point|gda_stable|ogda_stable|local_minmax|f_value|prob_gda|prob_ogda\n0,0|NO|YES\n", "Row 2"),
        ("point|gda_stable|ogda_stable|local_minmax|f_value|prob_gda|prob_ogda\n0,0|MAYBE|YES|NO|0|0|0\n", "YES or NO"),
        ("# only a comment\n", "at least one row"),
    ],
)
def test_malformed_reference_tables(tmp_path, text, message):
    path = tmp_path / "table.txt"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ValueError, match=message):
        parse_reference_table(str(path))


def test_missing_reference_table(tmp_path):
    with pytest.raises(FileNotFoundError):
        parse_reference_table(str(tmp_path / "nope.txt"))


@pytest.mark.parametrize(
    "source,is_file",
    [("f1", False), ("planted10d:3", False), ("missing.json", True), ("fns/f.txt", True)],
)
def test_looks_like_file_path(source, is_file):
    assert looks_like_file_path(source) is is_file


def test_resolve_output_path():
    assert resolve_output_path(None) is None
    assert resolve_output_path("-") is None
    assert resolve_output_path("out.csv").endswith("out.csv")


def test_env_defaults(monkeypatch):
    monkeypatch.delenv("MINMAX_SEED", raising=False)
    monkeypatch.setenv("MINMAX_THREADS", "0")
    assert get_default_seed() == 0
    assert get_default_threads() == 1
    monkeypatch.setenv("MINMAX_SEED", "42")
    assert get_default_seed() == 42
    monkeypatch.setenv("MINMAX_SEED", "forty")
    with pytest.raises(ValueError, match="MINMAX_SEED"):
        get_default_seed()
