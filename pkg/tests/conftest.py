from __future__ import annotations

from fractions import Fraction

import pytest

from orn.schedules import EbsParams, VbsParams, ebs_schedule, vbs_schedule


@pytest.fixture(scope="session")
def ebs_4():
    """Single round robin among four nodes (order 1)."""
    return ebs_schedule(EbsParams(l=1, n=4))


@pytest.fixture(scope="session")
def ebs_9():
    """Order-2 elementary-basis schedule on 9 nodes."""
    return ebs_schedule(EbsParams(l=2, n=3))


@pytest.fixture(scope="session")
def vbs_25():
    """Vandermonde-bases schedule on 25 nodes, delta at its cap."""
    return vbs_schedule(VbsParams(h=1, n=5, delta=Fraction(1, 18)))
