import json
import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mhtype.corpus import BUILTINS, builtin, fuzz_general, fuzz_mht
from mhtype.fileio import FileParseError, dump_algebra, load_algebra, loads, payload, write_atomic


def good():
    return {
        "name": "t",
        "center_dim": 2,
        "v_dim": 2,
        "brackets": [{"i": 1, "j": 2, "z": [0, "1/2"]}],
        "metric_center": [[1, 0], [0, 1]],
        "metric_v": [[1, 0], [0, -1]],
    }


@pytest.mark.parametrize("name", BUILTINS)
def test_builtin_round_trip(name):
    alg, met = builtin(name)
    text = dump_algebra(alg, met)
    f = loads(text)
    assert f.alg == alg and f.metric == met
    assert dump_algebra(f.alg, f.metric) == text


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.booleans())
def test_fuzz_round_trip(seed, general):
    alg, met = (fuzz_general if general else fuzz_mht)(seed)
    f = loads(dump_algebra(alg, met))
    assert f.alg.C == alg.C and f.metric == met


def test_numbers_and_strings():
    d = good()
    d["metric_v"] = [["1", 0.5], [0.5, "-sqrt(2)"]]
    f = loads(json.dumps(d))
    assert str(f.metric.G_v[0][1]) == "1/2"
    assert str(f.metric.G_v[1][1]) == "-sqrt(2)"


def parse_error(d):
    with pytest.raises(FileParseError) as exc:
        loads(json.dumps(d))
    return exc.value


def test_unknown_field():
    d = good()
    d["colour"] = "red"
    assert parse_error(d).path == "colour"
    d = good()
    d["brackets"][0]["k"] = 1
    assert parse_error(d).path == "brackets[0].k"


def test_missing_field():
    d = good()
    del d["metric_v"]
    assert parse_error(d).path == "metric_v"


@pytest.mark.parametrize(
    "edit, path",
    [
        (lambda d: d["brackets"][0].update(z=[1]), "brackets[0].z"),
        (lambda d: d["brackets"][0].update(i=2, j=1), "brackets[0]"),
        (lambda d: d["brackets"][0].update(j=3), "brackets[0].j"),
        (lambda d: d["brackets"][0].update(z=[0, "x/y"]), "brackets[0].z[1]"),
        (lambda d: d.update(metric_center=[[1, 0]]), "metric_center"),
        (lambda d: d.update(metric_v=[[1, 0], [0]]), "metric_v[1]"),
        (lambda d: d.update(center_dim="2"), "center_dim"),
        (lambda d: d.update(center_labels=["a", "a"]), "center_labels"),
    ],
)
def test_field_paths(edit, path):
    d = good()
    edit(d)
    assert parse_error(d).path == path


def test_duplicate_bracket():
    d = good()
    d["brackets"].append({"i": 1, "j": 2, "z": [1, 0]})
    e = parse_error(d)
    assert e.path == "brackets[1]" and "duplicate" in e.message


def test_bad_json_location():
    with pytest.raises(FileParseError) as exc:
        loads('{"name": "t",\n  "center_dim": }')
    assert exc.value.path.startswith("line 2 column")


def test_missing_file(tmp_path):
    with pytest.raises(FileParseError, match="cannot read"):
        load_algebra(str(tmp_path / "nope.json"))


def test_labels_optional():
    alg, met = builtin("teh0")
    d = payload(alg, met, labels=False)
    assert "center_labels" not in d
    f = loads(json.dumps(d))
    assert f.alg.C == alg.C


def test_write_atomic(tmp_path):
    target = tmp_path / "out.txt"
    write_atomic(str(target), "one\n")
    write_atomic(str(target), "two\n")
    assert target.read_text() == "two\n"
    assert os.listdir(tmp_path) == ["out.txt"]


def test_write_atomic_keeps_old_on_failure(tmp_path):
    target = tmp_path / "out.txt"
    target.write_text("keep\n")

    class Boom:
        def __str__(self):
            raise RuntimeError

    with pytest.raises(TypeError):
        write_atomic(str(target), Boom())
    assert target.read_text() == "keep\n"
    assert os.listdir(tmp_path) == ["out.txt"]
