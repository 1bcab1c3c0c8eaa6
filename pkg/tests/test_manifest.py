"""Run manifests: digests, CSV rendering, and the sidecar files."""

import time

from fockfusion import manifest


def _manifest(**kw):
    defaults = dict(
        command=["fockfusion", "simulate", "--d", "4"],
        config_text="steps=100\n",
        seed=7,
    )
    defaults.update(kw)
    return manifest.build_manifest(**defaults)


def test_digest_is_stable_across_time_and_outputs():
    a = _manifest(outputs=["x.csv"])
    time.sleep(0.01)
    b = _manifest(outputs=["elsewhere/y.csv"])
    assert a.timestamp != b.timestamp or a.outputs != b.outputs
    # neither the clock nor the destination participates in the digest
    assert manifest.manifest_digest(a) == manifest.manifest_digest(b)


def test_digest_tracks_inputs():
    base = manifest.manifest_digest(_manifest())
    assert manifest.manifest_digest(_manifest(seed=8)) != base
    assert manifest.manifest_digest(_manifest(config_text="steps=200\n")) != base
    assert (
        manifest.manifest_digest(_manifest(command=["fockfusion", "simulate"])) != base
    )
    assert len(base) == 16
    int(base, 16)  # hex


def test_versions_recorded():
    m = _manifest()
    assert set(m.versions) >= {"fockfusion", "python", "numpy"}


def test_render_csv_layout():
    m = _manifest()
    text = manifest.render_csv(
        ("d", "rate"), [(4, 0.125), (8, 0.5)], m, extra_comments=("note: hi",)
    )
    lines = text.splitlines()
    assert lines[0] == f"# manifest-digest: {manifest.manifest_digest(m)}"
    assert lines[1].startswith("# command: fockfusion simulate")
    assert "# note: hi" in lines
    assert "d,rate" in lines
    assert lines[-1] == "8,0.5"


def test_floats_render_round_trip_exactly():
    value = 0.1 + 0.2  # 0.30000000000000004, repr must survive
    m = _manifest()
    text = manifest.render_csv(("x",), [(value,)], m)
    cell = text.splitlines()[-1]
    assert float(cell) == value
    assert cell == repr(value)


def test_write_and_read_csv(tmp_path):
    path = str(tmp_path / "out.csv")
    m = _manifest(outputs=[path])
    manifest.write_csv(path, ("d", "rate"), [(4, 0.125)], m)

    comments, header, rows = manifest.read_csv(path)
    assert header == ["d", "rate"]
    assert rows == [["4", "0.125"]]
    assert any("manifest-digest" in c for c in comments)

    sidecar = (tmp_path / "out.csv.manifest.txt").read_text()
    assert manifest.manifest_digest(m) in sidecar
    assert "timestamp" in sidecar
    assert "seed" in sidecar


def test_rendered_bytes_identical_for_identical_inputs():
    a = manifest.render_csv(("x",), [(1, )], _manifest())
    b = manifest.render_csv(("x",), [(1, )], _manifest())
    assert a == b
