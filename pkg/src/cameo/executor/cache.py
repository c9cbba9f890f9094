"""Content-addressed task cache over the work directory tree.

Every task owns ``work/<2-hex>/<62-hex>/`` named by its cache key.  A
completed task stores its outputs (outputs.json) first and then commits
by atomically writing the ``.outcome`` manifest; an entry exists exactly
when a complete manifest does, so interrupted runs can never leave a
half-written entry behind.
"""

import json
import os
import threading
import time
from dataclasses import dataclass
from typing import Optional

from ..payload import canonical_json, payload_digest
from ..registry import ComponentContract
from .task import TaskInstance

OUTCOME_NAME = ".outcome"
OUTPUTS_NAME = "outputs.json"


def cache_key(task: TaskInstance, contract_version: str) -> str:
    """Digest of (process, contract version, canonical payload).

    Attempt number, tag, timestamps and retry policy deliberately do not
    participate: retries and re-runs of the same work share one key.
    """
    return payload_digest({"process": task.process,
                           "version": contract_version,
                           "payload": task.payload})


def contract_cache_key(task: TaskInstance, contract: Optional[ComponentContract]) -> str:
    version = contract.version if contract is not None else "exec"
    return cache_key(task, version)


def task_workdir(root, key: str) -> str:
    return os.path.join(str(root), "work", key[:2], key[2:])


@dataclass(frozen=True)
class CacheEntry:
    key: str
    version: str
    outputs: dict
    completed_at: float
    workdir: str


class CacheStore:
    """Stores and looks up task outcomes under one run root."""

    def __init__(self, root):
        self.root = str(root)
        self._write_lock = threading.Lock()

    def workdir(self, key: str) -> str:
        return task_workdir(self.root, key)

    def prepare_workdir(self, key: str) -> str:
        path = self.workdir(key)
        os.makedirs(path, exist_ok=True)
        return path

    def store(self, key: str, version: str, outputs: dict, timing: dict,
              process: str = "", task_id: str = "") -> CacheEntry:
        """Persist a Succeeded outcome; the manifest write is the commit."""
        with self._write_lock:
            workdir = self.prepare_workdir(key)
            outputs_text = canonical_json(outputs)
            with open(os.path.join(workdir, OUTPUTS_NAME), "w", encoding="utf-8") as fh:
                fh.write(outputs_text)
            completed_at = time.time()
            manifest = {
                "status": "Succeeded",
                "key": key,
                "version": version,
                "process": process,
                "task_id": task_id,
                "output_digests": {port: payload_digest(value)
                                   for port, value in outputs.items()},
                "timing": timing,
                "completed_at": completed_at,
            }
            tmp = os.path.join(workdir, OUTCOME_NAME + ".tmp")
            with open(tmp, "w", encoding="utf-8") as fh:
                fh.write(json.dumps(manifest, sort_keys=True, indent=1))
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, os.path.join(workdir, OUTCOME_NAME))
        return CacheEntry(key=key, version=version, outputs=outputs,
                          completed_at=completed_at, workdir=workdir)

    def lookup(self, key: str) -> Optional[CacheEntry]:
        """Return the Succeeded entry for `key`, or None.

        Output bytes are digest-checked against the manifest so a
        corrupted entry reads as a miss, never as wrong data.
        """
        workdir = self.workdir(key)
        outcome_path = os.path.join(workdir, OUTCOME_NAME)
        outputs_path = os.path.join(workdir, OUTPUTS_NAME)
        try:
            with open(outcome_path, "r", encoding="utf-8") as fh:
                manifest = json.load(fh)
            if manifest.get("status") != "Succeeded":
                return None
            with open(outputs_path, "r", encoding="utf-8") as fh:
                outputs = json.load(fh)
        except (OSError, json.JSONDecodeError):
            return None
        digests = manifest.get("output_digests", {})
        if set(digests) != set(outputs) or any(
                payload_digest(v) != digests[k] for k, v in outputs.items()):
            return None
        return CacheEntry(key=key, version=manifest.get("version", ""),
                          outputs=outputs,
                          completed_at=manifest.get("completed_at", 0.0),
                          workdir=workdir)

    def count_entries(self, process: Optional[str] = None) -> int:
        """Completed entries under the root (optionally for one process)."""
        n = 0
        work = os.path.join(self.root, "work")
        if not os.path.isdir(work):
            return 0
        for prefix in os.listdir(work):
            sub = os.path.join(work, prefix)
            if not os.path.isdir(sub):
                continue
            for rest in os.listdir(sub):
                path = os.path.join(sub, rest, OUTCOME_NAME)
                if not os.path.isfile(path):
                    continue
                if process is not None:
                    try:
                        with open(path, "r", encoding="utf-8") as fh:
                            if json.load(fh).get("process") != process:
                                continue
                    except (OSError, json.JSONDecodeError):
                        continue
                n += 1
        return n
