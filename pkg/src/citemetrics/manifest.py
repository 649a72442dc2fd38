"""Run manifests: inputs, parameters and a checksum for every emitted file.

Manifests carry no timestamps or host details, so identical inputs give
byte-identical manifests.
"""
import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__


def sha256_file(path, block=1 << 20):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(block), b""):
            h.update(chunk)
    return h.hexdigest()


def sha256_files(paths):
    """One digest over several files, each prefixed by its length."""
    h = hashlib.sha256()
    for p in paths:
        data = Path(p).read_bytes()
        h.update(len(data).to_bytes(8, "little"))
        h.update(data)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    corpus_hash: str = None
    window: list = None
    filters: dict = None
    cuts: dict = None
    seeds: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    tool_version: str = __version__
    outputs: dict = field(default_factory=dict)

    def add_output(self, path, base=None):
        path = Path(path)
        key = path.name if base is None else path.relative_to(base).as_posix()
        self.outputs[key] = sha256_file(path)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True, allow_nan=False) + "\n"

    def write(self, path):
        path = Path(path)
        path.write_text(self.to_json(), encoding="utf-8")
        return path

    @classmethod
    def read(cls, path):
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))

    def verify(self, base):
        """Names of listed outputs under ``base`` whose checksum no longer matches."""
        base = Path(base)
        return sorted(name for name, digest in self.outputs.items()
                      if not (base / name).is_file() or sha256_file(base / name) != digest)
