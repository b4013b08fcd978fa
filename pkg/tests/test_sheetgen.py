import math

import numpy as np
import pytest

from classcode import codec, detector, sheetgen
from classcode.errors import BadOrdinal

QUARTER_TURN_ERR = 2 * math.pi / 26


def angle_error(a, b):
    return abs((a - b + math.pi) % (2 * math.pi) - math.pi)


def card_px_for_code_px(spec: sheetgen.CardSpec, code_px: float) -> int:
    return int(round(code_px * spec.card_size_mm / spec.code_diameter_mm))


class TestPrintScanLoop:
    # 300 dpi on the default 120 mm code is ~1417 px; 240 px exercises the
    # same path at a fraction of the cost, alongside the spec's 64 and 32 px
    @pytest.mark.parametrize("code_px", [240, 64, 32])
    def test_sampled_cards_decode(self, code_px):
        for ordinal in (1, 23, 50, 76, 99):
            spec = sheetgen.CardSpec(ordinal)
            img = sheetgen.rasterize_card(spec, card_px_for_code_px(spec, code_px))
            dets = detector.scan_frame(img).detections
            assert [d.id.ordinal for d in dets] == [ordinal], (ordinal, code_px)
            assert angle_error(dets[0].orientation, 0.0) <= QUARTER_TURN_ERR

    def test_rotated_card_steps_answers(self):
        spec = sheetgen.CardSpec(7)
        img = sheetgen.rasterize_card(spec, 160)
        for k, expected in enumerate("ABCD"):
            rotated = np.rot90(img, k).copy()  # k CCW quarter turns
            dets = detector.scan_frame(rotated).detections
            assert dets[0].id.ordinal == 7
            assert codec.orientation_to_answer(dets[0].orientation).value == expected


class TestCardSvg:
    def test_document_structure(self):
        svg = sheetgen.render_card(sheetgen.CardSpec(3))
        assert svg.startswith("<svg")
        assert svg.count("<path") == 8  # 13 - 5 black sectors
        assert svg.count("<circle") == 1
        for letter in "ABCD":
            assert f">{letter}</text>" in svg

    def test_all_99_cards_distinct(self):
        bodies = set()
        for n in range(1, 100):
            parts = sheetgen.marker_svg_elements(120.0, codec.code_for_ordinal(n).canonical)
            bodies.add("".join(parts))
        assert len(bodies) == 99

    def test_bad_ordinal(self):
        with pytest.raises(BadOrdinal):
            sheetgen.render_card(sheetgen.CardSpec(0))


class TestSheets:
    def test_99_at_6_per_page_is_17_pages(self):
        pages, index = sheetgen.render_sheet(list(range(1, 100)), per_page=6)
        assert len(pages) == 17
        assert len(index) == 99

    def test_single_card_single_page(self):
        pages, index = sheetgen.render_sheet([42])
        assert len(pages) == 1
        assert index == [(42, 1, 0)]

    def test_duplicates_rendered(self):
        pages, index = sheetgen.render_sheet([5, 5, 5], per_page=2)
        assert len(pages) == 2
        assert [row[0] for row in index] == [5, 5, 5]

    def test_bad_ordinal_rejected(self):
        with pytest.raises(BadOrdinal):
            sheetgen.render_sheet([0, 1])
        with pytest.raises(BadOrdinal):
            sheetgen.render_sheet([])

    def test_crop_marks_present(self):
        pages, _ = sheetgen.render_sheet([1], per_page=1)
        assert "<line" in pages[0]
