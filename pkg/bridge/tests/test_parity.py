import json
import random

import pytest

from cqscore import InvalidInputError, score_pair
from cqscore.cli import main as cqscore_main
from cqscore.lexicon import default_lexicon
from cqscore.parsing import CategoryCountMap

from cqscore_bridge import BridgeOptions, bridge_reward_loss, bridge_score

LEX = default_lexicon()
LABELS = ["dog", "cat", "person", "sheep", "bird"]


def person_skis_fixture():
    boxes = [
        ("person", c, (100.0 * i, 0.0, 100.0 * i + 50.0, 120.0))
        for i, c in enumerate([0.99, 0.991, 0.98, 0.96])
    ]
    boxes.append(("skis", 0.903, (0.0, 200.0, 400.0, 240.0)))
    return boxes, "four person and one skis"


def random_fixture(rng):
    boxes = []
    for _ in range(rng.randint(0, 12)):
        x1, y1 = rng.uniform(0, 80), rng.uniform(0, 80)
        boxes.append(
            (
                rng.choice(LABELS),
                round(rng.uniform(0.5, 1.0), 3),
                (x1, y1, x1 + rng.uniform(1, 40), y1 + rng.uniform(1, 40)),
            )
        )
    entries = {l: rng.randint(1, 5) for l in rng.sample(LABELS, rng.randint(1, 4))}
    prompt = CategoryCountMap(entries).canonical_text(LEX)
    return boxes, prompt


def as_core_boxes(raw):
    from cqscore import DetectionBox

    return [DetectionBox(l, c, b) for l, c, b in raw]


class TestBridgeScore:
    def test_worked_example_parity(self):
        boxes, prompt = person_skis_fixture()
        bridged = bridge_score(boxes, prompt)
        core = score_pair(as_core_boxes(boxes), prompt, lex=LEX)
        assert abs(bridged.cq - core.cq) <= 1e-12
        assert bridged.cq == pytest.approx(0.751316, abs=1e-5)
        labels = {b.label: b for b in bridged.classes}
        assert labels["person"].count == 4
        assert labels["person"].matched
        assert labels["skis"].total_confidence == pytest.approx(0.903)

    def test_random_parity_500(self):
        rng = random.Random(8080)
        for _ in range(500):
            boxes, prompt = random_fixture(rng)
            bridged = bridge_score(boxes, prompt)
            core = score_pair(as_core_boxes(boxes), prompt, lex=LEX)
            assert abs(bridged.acc - core.acc) <= 1e-12
            assert abs(bridged.aqc - core.aqc) <= 1e-12
            assert abs(bridged.cq - core.cq) <= 1e-12

    def test_empty_boxes(self):
        bridged = bridge_score([], "a dog")
        assert (bridged.acc, bridged.aqc, bridged.cq) == (0.0, 0.0, 0.0)
        assert bridged.classes == []

    def test_invalid_box_raises(self):
        with pytest.raises(InvalidInputError):
            bridge_score([("dog", 0.9, (5.0, 0.0, 1.0, 1.0))], "a dog")

    def test_options_forwarded(self):
        boxes = [("dog", 0.7, (0.0, 0.0, 10.0, 10.0))]
        assert bridge_score(boxes, "a dog").cq == 0.0  # below default 0.8 cutoff
        relaxed = bridge_score(boxes, "a dog", BridgeOptions(confidence_cutoff=0.5))
        assert relaxed.cq > 0.0

    def test_cli_parity(self, tmp_path):
        """The bridge and the CLI score path agree on the same inputs."""
        rng = random.Random(99)
        fixtures = [person_skis_fixture()] + [random_fixture(rng) for _ in range(24)]
        det_payload = []
        prompt_lines = []
        for i, (boxes, prompt) in enumerate(fixtures):
            det_payload.append(
                {
                    "image_id": f"f{i}",
                    "boxes": [
                        {"label": l, "confidence": c, "bbox": list(b)} for l, c, b in boxes
                    ],
                }
            )
            prompt_lines.append(json.dumps({"image_id": f"f{i}", "prompt": prompt}))
        det_path = tmp_path / "d.json"
        det_path.write_text(json.dumps(det_payload))
        prompts_path = tmp_path / "p.jsonl"
        prompts_path.write_text("\n".join(prompt_lines) + "\n")
        out = tmp_path / "scores.jsonl"
        assert cqscore_main(
            ["score", "--detections", str(det_path), "--prompts", str(prompts_path), "-o", str(out)]
        ) == 0
        rows = [json.loads(l) for l in out.read_text().splitlines()]
        for row, (boxes, prompt) in zip(rows, fixtures):
            bridged = bridge_score(boxes, prompt)
            assert abs(bridged.acc - row["acc"]) <= 1e-12
            assert abs(bridged.aqc - row["aqc"]) <= 1e-12
            assert abs(bridged.cq - row["cq"]) <= 1e-12


class TestBridgeRewardLoss:
    def test_values(self):
        assert bridge_reward_loss(0.75, 1.0) == -0.75
        assert bridge_reward_loss(0.3, 0.0) == 0.0
        assert bridge_reward_loss(1.0, 2.0) == -2.0

    def test_negative_weight_rejected(self):
        with pytest.raises(InvalidInputError):
            bridge_reward_loss(0.5, -1.0)
