import importlib
import random
from array import array

import pytest

from declat import _pykernels, kernels
from oracles import brute_linear_extensions, brute_lower_ideals, random_poset

compiled = pytest.importorskip("declat._ckernels") if kernels.BACKEND == "cython" else None
backends = [pytest.param(_pykernels, id="python")]
if compiled is not None:
    backends.append(pytest.param(compiled, id="cython"))


@pytest.mark.parametrize("K", backends)
def test_closure(K):
    assert list(K.transitive_closure(3, [(0, 1), (1, 2)])) == [1, 3, 7]
    assert list(K.transitive_closure(0, [])) == []


@pytest.mark.parametrize("K", backends)
def test_against_brute_force(K):
    rng = random.Random(17)
    for _ in range(80):
        P = random_poset(rng, rng.randint(0, 6))
        down = list(P.down_masks)
        ideals = {frozenset(P.labels_of(m)) for m in K.lower_ideals(down)}
        assert ideals == brute_lower_ideals(P)
        exts = [tuple(P.elements[i] for i in e) for e in K.linear_extensions(down)]
        assert exts == brute_linear_extensions(P)
        assert K.count_linear_extensions(down) == len(exts)


@pytest.mark.parametrize("K", backends)
def test_aisle_signature_layout(K):
    E_LO, E_HI = _pykernels.EMPTY_LO, _pykernels.EMPTY_HI
    # one object, two slots: degrees {0,2} on slot 0, empty on slot 1
    lows, highs = [0, E_LO], [2, E_HI]
    assert list(_sig(K, lows, highs, [0, 0], [0, 2])) == [0, 1, 1, 0]


def _sig(K, *bufs):
    if K is _pykernels:
        return K.aisle_signature(*bufs)
    return K.aisle_signature(*(array("q", b) for b in bufs))


def test_backends_agree_on_signatures():
    if compiled is None:
        pytest.skip("extension not built")
    rng = random.Random(4)
    for _ in range(50):
        n_obj, n_slot = rng.randint(0, 20), rng.randint(1, 6)
        lows = [rng.randint(-3, 3) for _ in range(n_obj * n_slot)]
        highs = [lo + rng.randint(0, 3) for lo in lows]
        th = [rng.randint(-1, 1) for _ in range(n_slot)]
        ms = [-1, 0, 1]
        a = _pykernels.aisle_signature(lows, highs, th, ms)
        b = _sig(compiled, lows, highs, th, ms)
        assert bytes(a) == bytes(b)


def test_backends_agree_on_posets():
    if compiled is None:
        pytest.skip("extension not built")
    rng = random.Random(9)
    for _ in range(200):
        n = rng.randint(0, 9)
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.3]
        d1 = list(_pykernels.transitive_closure(n, pairs))
        assert d1 == list(compiled.transitive_closure(n, pairs))
        assert sorted(_pykernels.lower_ideals(d1)) == sorted(compiled.lower_ideals(d1))
        assert _pykernels.count_linear_extensions(d1) == compiled.count_linear_extensions(d1)


def test_wide_posets_use_fallback():
    down = [1 << i for i in range(70)]
    assert kernels.count_linear_extensions(down[:5]) == 120
    assert len(kernels.transitive_closure(70, [])) == 70


def test_pure_python_switch(monkeypatch):
    monkeypatch.setenv("DECLAT_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("DECLAT_PURE_PYTHON")
        importlib.reload(kernels)
