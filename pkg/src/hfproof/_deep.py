"""Run recursion-heavy entry points on a thread with a large stack.

Quoted formulas are deep trees; plain recursion over them overflows the
default C stack long before Python's recursion limit would be useful.  The
``deep`` decorator moves the outermost call onto a worker thread with a big
stack and a high recursion limit; nested calls run inline.
"""

from __future__ import annotations

import functools
import sys
import threading

STACK_BYTES = 512 * 1024 * 1024
RECURSION_LIMIT = 1_000_000

_local = threading.local()


def in_deep() -> bool:
    return getattr(_local, "active", False)


def run_deep(fn, *args, **kwargs):
    if in_deep():
        return fn(*args, **kwargs)
    box: dict = {}

    def target():
        _local.active = True
        try:
            box["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # re-raised on the caller's thread
            box["error"] = exc

    old_size = threading.stack_size()
    threading.stack_size(STACK_BYTES)
    if sys.getrecursionlimit() < RECURSION_LIMIT:
        sys.setrecursionlimit(RECURSION_LIMIT)
    try:
        worker = threading.Thread(target=target, name="hfproof-deep")
        worker.start()
    finally:
        threading.stack_size(old_size)
    worker.join()
    if "error" in box:
        raise box["error"]
    return box.get("value")


def deep(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        if in_deep():
            return fn(*args, **kwargs)
        return run_deep(fn, *args, **kwargs)

    return wrapper
