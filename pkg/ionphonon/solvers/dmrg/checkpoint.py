"""Resumable DMRG checkpoints stored as a versioned ``.npz`` container."""

import json
import logging
from pathlib import Path
from typing import Any, Dict

import numpy as np
from scipy.sparse import csr_matrix

from ...core.errors import InvalidInputError
from .blocks import Block

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "ionphonon-dmrg-checkpoint"
CHECKPOINT_VERSION = 1


def _put_sparse(arrays: Dict[str, np.ndarray], prefix: str, matrix: csr_matrix) -> None:
    matrix = csr_matrix(matrix)
    arrays[f"{prefix}/data"] = matrix.data
    arrays[f"{prefix}/indices"] = matrix.indices
    arrays[f"{prefix}/indptr"] = matrix.indptr
    arrays[f"{prefix}/shape"] = np.array(matrix.shape)


def _get_sparse(arrays, prefix: str) -> csr_matrix:
    shape = tuple(int(v) for v in arrays[f"{prefix}/shape"])
    return csr_matrix((arrays[f"{prefix}/data"], arrays[f"{prefix}/indices"], arrays[f"{prefix}/indptr"]),
                      shape=shape)


def save_checkpoint(path: str, snapshot: Dict[str, Any]) -> Path:
    """Write block bases, operators and sweep counters to ``path`` (``.npz``)."""
    path = Path(path)
    if path.suffix != ".npz":
        path = path.with_name(path.name + ".npz")
    path.parent.mkdir(parents=True, exist_ok=True)

    meta = dict(snapshot["meta"], format=CHECKPOINT_FORMAT, version=CHECKPOINT_VERSION)
    arrays: Dict[str, np.ndarray] = {"meta": np.array(json.dumps(meta))}
    for side in ("left", "right"):
        for length, block in snapshot[side].items():
            prefix = f"{side}/{length}"
            arrays[f"{prefix}/sites"] = np.array(block.sites, dtype=np.int64)
            arrays[f"{prefix}/numbers"] = block.numbers
            _put_sparse(arrays, f"{prefix}/hamiltonian", block.hamiltonian)
            for site, operator in block.annihilators.items():
                _put_sparse(arrays, f"{prefix}/a/{site}", operator)
            if block.trmat is not None:
                arrays[f"{prefix}/trmat"] = block.trmat

    tmp = path.with_name(path.stem + ".tmp.npz")
    np.savez_compressed(tmp, **arrays)
    tmp.replace(path)
    logger.debug("checkpoint written to %s", path)
    return path


def load_checkpoint(path: str) -> Dict[str, Any]:
    """Read a checkpoint written by :func:`save_checkpoint`."""
    path = Path(path)
    if not path.exists() and path.with_name(path.name + ".npz").exists():
        path = path.with_name(path.name + ".npz")
    if not path.exists():
        raise InvalidInputError(f"checkpoint not found: {path}")

    with np.load(path, allow_pickle=False) as arrays:
        meta = json.loads(str(arrays["meta"]))
        if meta.get("format") != CHECKPOINT_FORMAT:
            raise InvalidInputError(f"{path} is not a DMRG checkpoint")
        if meta.get("version") != CHECKPOINT_VERSION:
            raise InvalidInputError(f"unsupported checkpoint version {meta.get('version')}")

        blocks: Dict[str, Dict[int, Block]] = {"left": {}, "right": {}}
        keys = list(arrays.keys())
        for key in keys:
            parts = key.split("/")
            if len(parts) == 3 and parts[2] == "sites":
                side, length = parts[0], int(parts[1])
                prefix = f"{side}/{length}"
                operator_sites = sorted({int(k.split("/")[3]) for k in keys if k.startswith(f"{prefix}/a/")})
                blocks[side][length] = Block(
                    sites=tuple(int(s) for s in arrays[key]),
                    numbers=arrays[f"{prefix}/numbers"],
                    hamiltonian=_get_sparse(arrays, f"{prefix}/hamiltonian"),
                    annihilators={site: _get_sparse(arrays, f"{prefix}/a/{site}") for site in operator_sites},
                    trmat=arrays[f"{prefix}/trmat"] if f"{prefix}/trmat" in keys else None,
                )
    return {"meta": meta, "left": blocks["left"], "right": blocks["right"]}
