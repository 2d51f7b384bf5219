from __future__ import annotations

import pytest

from telic.elaborate import Processor
from telic.kernel import Kernel
from telic.prelude import load_prelude


@pytest.fixture
def kernel() -> Kernel:
    return Kernel()


@pytest.fixture
def bare_processor() -> Processor:
    """A processor with an empty signature."""
    return Processor()


@pytest.fixture
def loaded_processor() -> Processor:
    """A processor with the full prelude already in its signature."""
    proc, reports = load_prelude()
    bad = [r for r in reports if not r.ok]
    assert not bad, f"prelude failed to load: {bad[0].render()}"
    return proc
