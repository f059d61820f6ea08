"""Deterministic file output and run manifests."""
from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__

# extensions whose bytes must survive a replay unchanged
REPLAYABLE = (".csv", ".json", ".txt")
MANIFEST_NAME = "manifest.json"


def _cell(x):
    if isinstance(x, float):
        return repr(x)
    return x


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(x) for x in row])
    return path


def read_csv(path: Path) -> list[dict]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    command: str
    argv: list
    config: dict
    seed: int
    version: str = __version__
    wall_time_s: float = 0.0
    outputs: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "command": self.command,
            "argv": self.argv,
            "config": self.config,
            "seed": self.seed,
            "version": self.version,
            "wall_time_s": self.wall_time_s,
            "outputs": self.outputs,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "RunManifest":
        return cls(d["command"], list(d.get("argv", [])), d["config"], int(d["seed"]),
                   d.get("version", ""), float(d.get("wall_time_s", 0.0)),
                   list(d.get("outputs", [])))

    @classmethod
    def load(cls, path: Path) -> "RunManifest":
        return cls.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


class RunRecorder:
    """Collects output files of one command and writes the manifest last."""

    def __init__(self, out_dir: Path, command: str, argv: list, config: dict, seed: int):
        self.out = Path(out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.manifest = RunManifest(command, list(argv), config, seed)
        self._files: list[Path] = []
        self._t0 = time.perf_counter()

    def path(self, name: str) -> Path:
        p = self.out / name
        self._files.append(p)
        return p

    def csv(self, name: str, header, rows) -> Path:
        return write_csv(self.path(name), header, rows)

    def json(self, name: str, obj) -> Path:
        return write_json(self.path(name), obj)

    def text(self, name: str, text: str) -> Path:
        p = self.path(name)
        p.write_text(text, encoding="utf-8")
        return p

    def finish(self) -> Path:
        self.manifest.wall_time_s = round(time.perf_counter() - self._t0, 3)
        self.manifest.outputs = [{"path": p.name, "sha256": sha256(p)}
                                 for p in self._files if p.exists()]
        return write_json(self.out / MANIFEST_NAME, self.manifest.to_json_dict())


def compare_outputs(manifest: RunManifest, new_dir: Path) -> list[str]:
    """Names of replayable outputs whose bytes differ (or are missing) in ``new_dir``."""
    bad = []
    for entry in manifest.outputs:
        name = entry["path"]
        if not name.endswith(REPLAYABLE):
            continue
        p = Path(new_dir) / name
        if not p.exists() or sha256(p) != entry["sha256"]:
            bad.append(name)
    return bad
