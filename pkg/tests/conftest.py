import json

import pytest

from swaporder import PathSpec


@pytest.fixture
def example1_path() -> PathSpec:
    """5-node path: caps 100..400, p=0.2, q=0.5."""
    return PathSpec.from_params([100, 200, 300, 400], [0.2] * 4, [0.5] * 3)


@pytest.fixture
def example2_path() -> PathSpec:
    """Near-homogeneous 5-node path where greedy is suboptimal."""
    return PathSpec.from_params([100, 101, 101, 100], [0.2] * 4, [0.5] * 3)


@pytest.fixture
def example1_doc(tmp_path):
    doc = {
        "schema": 1,
        "links": [
            {"capacity": c, "success": 0.2} for c in (100, 200, 300, 400)
        ],
        "swap_probs": [0.5, 0.5, 0.5],
    }
    target = tmp_path / "example1.json"
    target.write_text(json.dumps(doc))
    return str(target)


@pytest.fixture
def example2_doc(tmp_path):
    doc = {
        "schema": 1,
        "links": [
            {"capacity": c, "success": 0.2} for c in (100, 101, 101, 100)
        ],
        "swap_probs": [0.5, 0.5, 0.5],
    }
    target = tmp_path / "example2.json"
    target.write_text(json.dumps(doc))
    return str(target)
