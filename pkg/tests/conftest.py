from __future__ import annotations

import numpy as np
import pytest

from posepaste import synthetic
from posepaste.pose import Orientation, PoseDescriptor, quantize


def random_descriptor(rng: np.random.Generator, bin_size: float = 15.0) -> PoseDescriptor:
    """Random but internally consistent pose descriptor."""
    hip = (float(rng.uniform(20, 200)), float(rng.uniform(50, 200)))
    slope = float(rng.uniform(-180.0, 180.0))
    if slope == -180.0:
        slope = 180.0
    height = float(rng.uniform(10.0, 120.0))
    th = np.radians(slope)
    neck = (hip[0] + height * np.sin(th), hip[1] - height * np.cos(th))
    return PoseDescriptor(
        orientation=Orientation(rng.choice(["up", "down", "left", "right"])),
        slope_raw=slope,
        slope_q=quantize(slope, bin_size),
        height_raw=height,
        height_q=quantize(height, bin_size),
        mid_hip=hip,
        neck=(float(neck[0]), float(neck[1])),
    )


@pytest.fixture
def dataset_dirs(tmp_path):
    """On-disk toy dataset: 6 persons, 3 donors, with annotations and masks."""
    persons = tmp_path / "persons"
    donors = tmp_path / "donors"
    synthetic.write_person_dataset(persons, 6, seed=11)
    synthetic.write_donor_dataset(donors, 3, seed=11)
    return persons, donors
