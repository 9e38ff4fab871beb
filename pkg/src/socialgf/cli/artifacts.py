"""Artifact directory layout, config-hash gating, and the run lock.

Layout under the --out directory mirrors the pipeline stages:

    datasets/   example sets
    fields/     gradient-field checkpoints (+ training curves)
    policies/   policy checkpoints and representation manifests
    reports/    evaluation tables and machine-readable records
    frames/     rendered episodes

Every producing command checks its target first: an artifact written under
the same config hash makes the command an "up to date" no-op, a different
hash is an error unless --force, so nothing gets silently overwritten.
"""

import json
import os
from pathlib import Path

from socialgf.container import read_container
from socialgf.errors import ArtifactError

STAGE_DIRS = ("datasets", "fields", "policies", "reports", "frames")


class ArtifactDir:
    def __init__(self, root):
        self.root = Path(root)

    def prepare(self):
        self.root.mkdir(parents=True, exist_ok=True)
        for d in STAGE_DIRS:
            (self.root / d).mkdir(exist_ok=True)
        return self

    def path(self, stage, name):
        return self.root / stage / name

    def dataset(self, name="dataset.sgfd"):
        return self.path("datasets", name)

    def field(self, category):
        return self.path("fields", f"{category}.sgff")

    def policy(self, name):
        return self.path("policies", name)

    def report(self, name):
        return self.path("reports", name)


class RunLock:
    """Exclusive-create lock file guarding concurrent commands on one
    artifact directory."""

    def __init__(self, root):
        self.path = Path(root) / ".sgf.lock"
        self._fd = None

    def __enter__(self):
        try:
            self._fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise ArtifactError(
                f"another command holds {self.path}; remove the lock file if "
                f"it is stale") from None
        os.write(self._fd, str(os.getpid()).encode())
        return self

    def __exit__(self, *exc):
        if self._fd is not None:
            os.close(self._fd)
            self.path.unlink(missing_ok=True)
        return False


def container_hash(path):
    meta, _, header = read_container(path)
    return meta.get("config_hash"), header.get("tool_version")


def check_target(path, config_hash, force):
    """Returns "fresh" (build it), "up_to_date" (skip), or raises on a
    hash conflict without --force."""
    path = Path(path)
    if not path.exists():
        return "fresh"
    if force:
        return "fresh"
    try:
        if path.suffix in (".sgfd", ".sgff", ".sgfp"):
            existing, _ = container_hash(path)
        else:
            with open(path, encoding="utf-8") as f:
                existing = json.load(f).get("config_hash")
    except (ArtifactError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ArtifactError(
            f"{path} exists but cannot be inspected ({exc}); use --force to "
            f"overwrite") from exc
    if existing == config_hash:
        return "up_to_date"
    raise ArtifactError(
        f"{path} was produced under config hash {existing}, current config "
        f"hashes to {config_hash}; rerun with --force to overwrite")


def write_json(path, payload):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, sort_keys=True) + "\n")
