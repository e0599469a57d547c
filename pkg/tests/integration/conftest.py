# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

import logging
import time
from typing import Iterator

import pytest

logger = logging.getLogger(__name__)


@pytest.fixture(autouse=True)
def log_elapsed(request: pytest.FixtureRequest) -> Iterator[None]:
    start = time.monotonic()
    yield
    logger.info(f"{request.node.name} took {time.monotonic() - start:.2f} s")
