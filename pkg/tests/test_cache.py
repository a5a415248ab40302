from __future__ import annotations

import json

import pytest

from torusblocks.cache import CACHE_VERSION, CacheError, ResultCache, dumps, resolve_cache_dir
from torusblocks.macdonald import SymLaurentPoly, macdonald_at_root, macdonald_via_shift
from torusblocks.modular import ModularData, s_matrix
from torusblocks.qcore import QContext


def _smatrix(cache, kappa=8, p=2):
    return cache.get_or_compute(
        f"smatrix_kappa{kappa}_p{p}",
        lambda: s_matrix(QContext(kappa, p)),
        lambda d: d.to_json(),
        ModularData.from_json,
    )


def test_roundtrip_is_exact(tmp_path):
    cache = ResultCache(tmp_path)
    fresh = _smatrix(cache)
    assert cache.events == [("smatrix_kappa8_p2", "miss")]
    again = _smatrix(cache)
    assert cache.events[-1] == ("smatrix_kappa8_p2", "hit")
    assert again == fresh


@pytest.mark.parametrize("poly", [macdonald_via_shift(4, 2), macdonald_at_root(4, 2, QContext(7))])
def test_macdonald_roundtrip(tmp_path, poly):
    cache = ResultCache(tmp_path)
    cache.store("m", poly.to_json())
    assert cache.load("m", SymLaurentPoly.from_json) == poly


def test_corrupt_entry_recomputes(tmp_path):
    cache = ResultCache(tmp_path)
    fresh = _smatrix(cache)
    cache.path("smatrix_kappa8_p2").write_text("{not json")
    assert _smatrix(cache) == fresh
    assert cache.events[-1] == ("smatrix_kappa8_p2", "recompute")
    json.loads(cache.path("smatrix_kappa8_p2").read_text())  # overwritten with a valid entry


def test_version_mismatch_recomputes(tmp_path):
    cache = ResultCache(tmp_path)
    _smatrix(cache)
    path = cache.path("smatrix_kappa8_p2")
    doc = json.loads(path.read_text())
    doc["version"] = CACHE_VERSION + 1
    path.write_text(json.dumps(doc))
    with pytest.raises(CacheError):
        cache.load("smatrix_kappa8_p2", ModularData.from_json)
    _smatrix(cache)
    assert cache.events[-1] == ("smatrix_kappa8_p2", "recompute")
    assert json.loads(path.read_text())["version"] == CACHE_VERSION


def test_undecodable_entry(tmp_path):
    cache = ResultCache(tmp_path)
    cache.store("x", {"wrong": 1})
    with pytest.raises(CacheError):
        cache.load("x", ModularData.from_json)


def test_disabled_cache_always_computes():
    cache = ResultCache(None)
    calls = []
    for _ in range(2):
        cache.get_or_compute("k", lambda: calls.append(1) or 5, lambda v: v, lambda v: v)
    assert len(calls) == 2 and cache.events == []


def test_list_and_clear(tmp_path):
    cache = ResultCache(tmp_path)
    cache.store("b", 1)
    cache.store("a", 2)
    assert cache.keys() == ["a", "b"]
    assert cache.clear() == 2 and cache.keys() == []


def test_resolve_precedence(monkeypatch, tmp_path):
    monkeypatch.setenv("TORUSBLOCKS_CACHE", str(tmp_path / "env"))
    assert resolve_cache_dir(None) == tmp_path / "env"
    assert resolve_cache_dir(str(tmp_path / "flag")) == tmp_path / "flag"
    monkeypatch.delenv("TORUSBLOCKS_CACHE")
    assert resolve_cache_dir(None) is None


def test_dumps_canonical():
    assert dumps({"b": 1, "a": [1, 2]}) == dumps({"a": [1, 2], "b": 1})
    assert dumps({}).endswith("\n")
