"""classcode: camera-based classroom polling with printed circular codes.

Submodules:
    codec      13-sector ring code ID space and orientation arithmetic
    imaging    grayscale, adaptive binarization, hairline repair
    detector   per-frame candidate search and decoding
    temporal   contiguous-frame validation of detections across a take
    session    roster, questions, merges, summaries, answer log
    sheetgen   printable card generation (SVG + raster twin)
    synth      ground-truth scene generator for tests and benchmarks
    engine     the shared take pipeline used by both fronts
    server     websocket poll service (wire protocol v1)
    cli        command line: cards, scan, serve, report
"""

from .codec import Answer, CodeId, enumerate_valid_codes, orientation_to_answer
from .config import DetectorConfig, ServiceConfig, TemporalConfig, load_config
from .detector import Candidate, Detection, FrameResult, scan_frame

__version__ = "0.1.0"

__all__ = [
    "Answer",
    "CodeId",
    "Candidate",
    "Detection",
    "DetectorConfig",
    "FrameResult",
    "ServiceConfig",
    "TemporalConfig",
    "enumerate_valid_codes",
    "load_config",
    "orientation_to_answer",
    "scan_frame",
    "__version__",
]
