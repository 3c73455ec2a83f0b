from __future__ import annotations

import sys
from pathlib import Path

import pytest

from hfproof._deep import run_deep

sys.path.insert(0, str(Path(__file__).parent))


@pytest.hookimpl(tryfirst=True)
def pytest_pyfunc_call(pyfuncitem):
    # quoted formulas recurse deeply; run every test on the big-stack thread
    fn = pyfuncitem.obj
    kwargs = {name: pyfuncitem.funcargs[name] for name in pyfuncitem._fixtureinfo.argnames}
    run_deep(fn, **kwargs)
    return True
