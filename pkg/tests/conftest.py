import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def default_trace():
    from vlsvitals import synthesize_trace

    return synthesize_trace()
