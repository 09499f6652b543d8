"""Replication fan-out over processes with deterministic ordering.

Workers receive (fn, payload) once via the pool initializer and then map
over replication indices; outputs are collected in index order, so results
cannot depend on scheduling.  n_jobs <= 1 runs inline.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

_FN = None
_PAYLOAD = None


def _init(fn, payload):
    global _FN, _PAYLOAD
    _FN = fn
    _PAYLOAD = payload


def _run(i):
    return _FN(_PAYLOAD, i)


def resolve_n_jobs(n_jobs=None) -> int:
    """Explicit value wins; else the PMTEST_THREADS env var; else 1."""
    if n_jobs is not None:
        return max(1, int(n_jobs))
    env = os.environ.get("PMTEST_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return 1


def replication_map(fn, payload, n_items: int, n_jobs=None) -> list:
    """fn(payload, i) for i in range(n_items), in order.

    fn must be a module-level function when n_jobs > 1.
    """
    n_jobs = resolve_n_jobs(n_jobs)
    if n_jobs <= 1 or n_items <= 1:
        # no globals here: the inline path may be nested (a replication
        # worker that itself fans out bootstrap draws)
        return [fn(payload, i) for i in range(n_items)]
    chunk = max(1, n_items // (4 * n_jobs))
    with ProcessPoolExecutor(
        max_workers=n_jobs, initializer=_init, initargs=(fn, payload)
    ) as ex:
        return list(ex.map(_run, range(n_items), chunksize=chunk))
