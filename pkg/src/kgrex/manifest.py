"""Stage manifests and atomic artifact writes.

Every pipeline stage writes its artifact plus ``<artifact>.manifest.json``
recording input hashes, the effective config and tool versions, so a rerun
can be checked bit-exactly.  Artifacts are written to a temp file and
renamed into place; a failing stage leaves no partial output behind.
"""

from __future__ import annotations

import contextlib
import hashlib
import json
import os
import platform
from pathlib import Path
from typing import Iterator, Mapping

from . import __version__


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@contextlib.contextmanager
def atomic_output(path: str | Path) -> Iterator[Path]:
    """Yield a temp path to write; rename over ``path`` only on success."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        yield tmp
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            tmp.unlink()
        raise


def manifest_path(artifact: str | Path) -> Path:
    artifact = Path(artifact)
    return artifact.with_name(artifact.name + ".manifest.json")


def write_manifest(stage: str, artifact: str | Path,
                   inputs: Mapping[str, str | Path], config: Mapping) -> Path:
    """Record the stage run next to its artifact.

    Input files are identified by role, base name and content hash; absolute
    paths are deliberately left out so identical runs in different
    directories produce identical manifests.
    """
    artifact = Path(artifact)
    payload = {
        "stage": stage,
        "inputs": {
            role: {"file": Path(p).name, "sha256": sha256_file(p)}
            for role, p in sorted(inputs.items())
        },
        "output": {"file": artifact.name, "sha256": sha256_file(artifact)},
        "config": dict(config),
        "versions": {"kgrex": __version__, "python": platform.python_version()},
    }
    out = manifest_path(artifact)
    with atomic_output(out) as tmp:
        tmp.write_text(json.dumps(payload, ensure_ascii=False, indent=2,
                                  sort_keys=True) + "\n", encoding="utf-8")
    return out
