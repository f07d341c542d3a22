import json

import pytest

from mhtype.checks import SuiteReport, corpus_instances, exact_checks, fuzz_instances, run_suite
from mhtype.corpus import BUILTINS, builtin
from mhtype.report import analyze, encode, render_text


def leaves(obj, path=()):
    if isinstance(obj, dict) and set(obj) in ({"exact"}, {"float"}):
        yield path, obj
    elif isinstance(obj, dict):
        for k, v in obj.items():
            yield from leaves(v, path + (k,))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from leaves(v, path + (i,))
    else:
        yield path, obj


@pytest.mark.parametrize("name", BUILTINS)
def test_report_byte_stable(name):
    alg, met = builtin(name)
    a, b = analyze(alg, met), analyze(*builtin(name))
    assert a.to_json() == b.to_json() and a.to_text() == b.to_text()


@pytest.mark.parametrize("name", ["teh0", "teh2", "quat"])
def test_text_and_json_agree(name):
    rep = analyze(*builtin(name))
    data = json.loads(rep.to_json())
    text = rep.to_text()
    for path, leaf in leaves(data):
        if isinstance(leaf, dict) and "exact" in leaf:
            assert leaf["exact"] in text, path


def test_provenance_tags():
    data = json.loads(analyze(*builtin("teh0")).to_json())
    assert data["curvature"]["xi"] == {"exact": "1"}  # Ric(e1, e1) = -1/2 = -xi/2
    assert data["input"]["center_dim"] == 2
    for _, leaf in leaves(data):
        assert not isinstance(leaf, float)  # every float is tagged


def test_encode_rejects_unknown():
    with pytest.raises(TypeError):
        encode({"x": object()})


def test_render_text_nesting():
    assert render_text({"a": {"b": [1, 2]}, "c": True}) == "a:\n  b: [1, 2]\nc: true"


def test_non_mht_report_has_counterexample():
    from mhtype.corpus import two_block

    data = json.loads(analyze(*two_block()).to_json())
    assert data["mht"]["verdict"] is False
    assert "J(z1)^2" in data["mht"]["counterexample"]
    assert data["cross_checks"]["riemann_vs_oracle"] == {"exact": "0"}


def test_corpus_exact_checks_pass():
    for label, alg, met, phi in corpus_instances():
        results, _ = exact_checks(alg, met, phi, seed=1, tuples=20)
        assert all(r.status != "fail" for r in results), (label, [r for r in results if r.status == "fail"])


def test_suite_deterministic():
    inst = fuzz_instances(6, seed=3)
    opts = dict(seed=3, steps=1000, tuples=10)
    a, b = run_suite(inst, **opts), run_suite(fuzz_instances(6, seed=3), **opts)
    assert a.to_text() == b.to_text() and a.to_json() == b.to_json()
    assert a.ok
    assert json.loads(a.to_json())["counts"] == a.counts()


def test_fuzz_mix():
    inst = fuzz_instances(8, seed=0)
    gen = [i for i, x in enumerate(inst) if x[0].startswith("fuzz_general")]
    assert gen == [3, 7]
    assert all(x[3] is not None for i, x in enumerate(inst) if i not in gen)


def test_empty_suite():
    rep = SuiteReport([])
    assert rep.ok and rep.to_text() == "summary: 0 passed, 0 failed, 0 skipped\n"
