"""Run manifests and self-describing CSV output.

Every CSV the command-line tool writes starts with a `#`-prefixed comment
carrying the manifest digest, so any data file can be traced back to the
exact command, configuration, and library versions that produced it.
"""

from __future__ import annotations

import csv
import hashlib
import io
import os
import platform
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "PACKAGE_VERSION",
    "RunManifest",
    "build_manifest",
    "manifest_digest",
    "format_value",
    "render_csv",
    "write_csv",
    "read_csv",
]

PACKAGE_VERSION = "0.1.0"


def _versions() -> dict[str, str]:
    return {
        "fockfusion": PACKAGE_VERSION,
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


@dataclass(frozen=True)
class RunManifest:
    """Provenance record for one command invocation."""

    command: tuple[str, ...]
    config_digest: str
    seed: int | None
    versions: dict[str, str] = field(default_factory=_versions)
    timestamp: str = ""
    outputs: tuple[str, ...] = ()


def build_manifest(
    command: Sequence[str] | None = None,
    *,
    config_text: str = "",
    seed: int | None = None,
    outputs: Sequence[str] = (),
) -> RunManifest:
    if command is None:
        command = sys.argv
    config_digest = hashlib.sha256(config_text.encode("utf-8")).hexdigest()[:16]
    return RunManifest(
        command=tuple(str(c) for c in command),
        config_digest=config_digest,
        seed=seed,
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        outputs=tuple(str(p) for p in outputs),
    )


def manifest_digest(m: RunManifest) -> str:
    """Short digest identifying the run.

    Hashes the command, config digest, seed, and versions. Timestamps and
    output paths are deliberately excluded so that re-running the same
    command produces byte-identical CSV files.
    """
    h = hashlib.sha256()
    for part in m.command:
        h.update(part.encode("utf-8"))
        h.update(b"\x00")
    h.update(m.config_digest.encode("ascii"))
    h.update(repr(m.seed).encode("ascii"))
    for key in sorted(m.versions):
        h.update(f"{key}={m.versions[key]}".encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()[:16]


def format_value(value: object) -> str:
    """Render one CSV cell deterministically.

    Floats use repr (shortest round-trip form), so identical numbers always
    serialize to identical bytes.
    """
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (np.floating,)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def render_csv(
    header: Sequence[str],
    rows: Iterable[Sequence[object]],
    manifest: RunManifest,
    extra_comments: Sequence[str] = (),
) -> str:
    """Render a self-describing CSV as text.

    The text starts with `# manifest-digest: <hex>` and `# command: ...`
    comment lines; timestamps never appear, so identical runs render
    identical bytes.
    """
    buf = io.StringIO()
    buf.write(f"# manifest-digest: {manifest_digest(manifest)}\n")
    buf.write(f"# command: {' '.join(manifest.command)}\n")
    for comment in extra_comments:
        buf.write(f"# {comment}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(
    path: str,
    header: Sequence[str],
    rows: Iterable[Sequence[object]],
    manifest: RunManifest,
    extra_comments: Sequence[str] = (),
) -> str:
    """Write a self-describing CSV plus a `.manifest.txt` sidecar.

    Returns the manifest digest.
    """
    digest = manifest_digest(manifest)
    text = render_csv(header, rows, manifest, extra_comments)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    sidecar = path + ".manifest.txt"
    with open(sidecar, "w", encoding="utf-8") as fh:
        fh.write(f"digest: {digest}\n")
        fh.write(f"command: {' '.join(manifest.command)}\n")
        fh.write(f"config-digest: {manifest.config_digest}\n")
        fh.write(f"seed: {manifest.seed}\n")
        for key in sorted(manifest.versions):
            fh.write(f"version.{key}: {manifest.versions[key]}\n")
        fh.write(f"timestamp: {manifest.timestamp}\n")
        for out in manifest.outputs or (path,):
            fh.write(f"output: {out}\n")
    return digest


def read_csv(path: str) -> tuple[list[str], list[str], list[list[str]]]:
    """Read a self-describing CSV: (comment lines, header, rows)."""
    comments: list[str] = []
    data_lines: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                comments.append(line.rstrip("\n"))
            elif line.strip():
                data_lines.append(line)
    rows = list(csv.reader(data_lines))
    if not rows:
        return comments, [], []
    return comments, rows[0], rows[1:]
