import random

import pytest

from cqscore import DetectionBox
from cqscore.lexicon import default_lexicon


@pytest.fixture(scope="session")
def lex():
    return default_lexicon()


def person_skis_boxes():
    """Non-overlapping boxes reproducing the person/skis summary:
    4 person boxes summing to 3.921 confidence, 1 skis box at 0.903."""
    confidences = [0.99, 0.991, 0.98, 0.96]
    boxes = [
        DetectionBox("person", c, (100.0 * i, 0.0, 100.0 * i + 50.0, 120.0))
        for i, c in enumerate(confidences)
    ]
    boxes.append(DetectionBox("skis", 0.903, (0.0, 200.0, 400.0, 240.0)))
    return boxes


@pytest.fixture
def person_skis():
    return person_skis_boxes()


def random_boxes(rng: random.Random, n_max: int = 20, n_labels: int = 3):
    labels = ["cat", "dog", "bird"][:n_labels]
    boxes = []
    for _ in range(rng.randint(0, n_max)):
        x1 = rng.uniform(0, 80)
        y1 = rng.uniform(0, 80)
        boxes.append(
            DetectionBox(
                rng.choice(labels),
                round(rng.uniform(0.0, 1.0), 3),
                (x1, y1, x1 + rng.uniform(1, 40), y1 + rng.uniform(1, 40)),
            )
        )
    return boxes
