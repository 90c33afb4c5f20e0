import json
import warnings

import pytest

from qekr import cache
from qekr.grassmann import grassmannian


def test_build_and_load_roundtrip(tmp_path):
    path = cache.build(7, 3, 2, tmp_path)
    info = cache.inspect(path)
    assert info["count"] == 11811 and info["digest_ok"] and info["modulus"] == []
    assert info["payload_bytes"] == 11811 * 3 * 7
    G = cache.load(7, 3, 2, tmp_path)
    assert G.subspaces == grassmannian(7, 3, 2).subspaces


def test_extension_field_roundtrip(tmp_path):
    cache.build(4, 2, 9, tmp_path)
    assert cache.load(4, 2, 9, tmp_path).subspaces == grassmannian(4, 2, 9).subspaces
    assert cache.inspect(cache.cache_path(4, 2, 9, tmp_path))["modulus"] == [1, 0, 1]


def test_bytes_are_deterministic(tmp_path):
    a = cache.build(5, 2, 3, tmp_path / "a").read_bytes()
    b = cache.build(5, 2, 3, tmp_path / "b").read_bytes()
    assert a == b


def _corrupt_payload(data: bytes) -> bytes:
    b = bytearray(data)
    b[-1] ^= 1
    return bytes(b)


def _bump_version(data: bytes) -> bytes:
    line, _, payload = data.partition(b"\n")
    head = json.loads(line)
    head["format_version"] = 0
    return json.dumps(head).encode() + b"\n" + payload


@pytest.mark.parametrize("damage", [_corrupt_payload, _bump_version, lambda d: d[:40], lambda d: b"garbage"])
def test_damaged_cache_is_rebuilt(tmp_path, damage):
    path = cache.build(4, 2, 2, tmp_path)
    path.write_bytes(damage(path.read_bytes()))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        G = cache.load(4, 2, 2, tmp_path)
    assert any(issubclass(w.category, cache.CacheWarning) for w in caught)
    assert len(G) == 35
    assert cache.inspect(path)["digest_ok"]


def test_decode_rejects_wrong_parameters(tmp_path):
    data = cache.build(4, 2, 2, tmp_path).read_bytes()
    with pytest.raises(cache.CacheError):
        cache.decode(data, 4, 2, 3)


def test_env_override_and_clear(tmp_path, monkeypatch):
    monkeypatch.setenv(cache.CACHE_ENV, str(tmp_path))
    assert cache.cache_dir() == tmp_path
    cache.build(3, 1, 2)
    cache.build(4, 2, 2)
    assert len(cache.entries()) == 2
    assert cache.clear() == 2 and cache.entries() == []
