"""Command-line front: card generation, offline scanning, live service.

Subcommands: cards, scan, serve, report. Every option can also be set via
the CLASSCODE_* environment (see classcode.config).
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import engine, imaging, sheetgen
from . import session as sess
from .config import load_config
from .errors import BadOrdinal, ClasscodeError

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"}


@click.group(context_settings={"auto_envvar_prefix": "CLASSCODE"})
def main() -> None:
    """Classroom polling with printed circular response cards."""


def _parse_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(p) for p in text.split(",") if p.strip()]


@main.command()
@click.option("--range", "range_", default="1..99", show_default=True,
              help="Ordinals, as LO..HI or a comma list.")
@click.option("--per-page", default=6, show_default=True)
@click.option("--card-size", default=140.0, show_default=True, help="Card side, mm.")
@click.option("--code-diameter", default=120.0, show_default=True, help="Code diameter, mm.")
@click.option("--out", "out_dir", default="cards", show_default=True,
              type=click.Path(file_okay=False, path_type=Path))
def cards(range_: str, per_page: int, card_size: float, code_diameter: float,
          out_dir: Path) -> None:
    """Render printable card sheets plus an index CSV."""
    try:
        ordinals = _parse_range(range_)
        pages, index = sheetgen.render_sheet(
            ordinals, per_page=per_page, card_size_mm=card_size,
            code_diameter_mm=code_diameter)
    except (BadOrdinal, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for i, svg in enumerate(pages):
        name = f"page-{i + 1:03d}.svg"
        (out_dir / name).write_text(svg, encoding="utf-8")
        files.append(name)
    with open(out_dir / "index.csv", "w", encoding="utf-8") as fh:
        fh.write("ordinal,file,page,slot\n")
        for ordinal, page, slot in index:
            fh.write(f"{ordinal},{files[page - 1]},{page},{slot}\n")
    click.echo(f"wrote {len(pages)} page(s) and index.csv to {out_dir}")


def _load_roster(path: Path | None):
    if path is None:
        return []
    doc = json.loads(path.read_text(encoding="utf-8"))
    return [(int(r["ordinal"]), r.get("name")) for r in doc.get("students", [])]


def _iter_frames(source: Path):
    """Grayscale frames from a video file or an ordered image directory."""
    if source.is_dir():
        files = sorted(p for p in source.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
        for p in files:
            from PIL import Image

            img = Image.open(p)
            if img.mode == "L":
                yield np.asarray(img, dtype=np.uint8)
            else:
                yield imaging.to_grayscale(np.asarray(img.convert("RGB"), dtype=np.uint8))
        return
    import cv2

    cap = cv2.VideoCapture(str(source))
    if not cap.isOpened():
        raise OSError(f"cannot open video {source}")
    while True:
        ok, frame = cap.read()
        if not ok:
            break
        yield imaging.to_grayscale(frame[:, :, ::-1])  # BGR to RGB
    cap.release()


@main.command()
@click.argument("source", type=click.Path(exists=True, path_type=Path))
@click.option("--class-id", default="class", show_default=True)
@click.option("--roster", "roster_path", type=click.Path(exists=True, path_type=Path),
              default=None, help="JSON roster: {\"students\": [{\"ordinal\", \"name\"}]}.")
@click.option("--question", "question_number", default=None, type=int,
              help="Question number (default: auto-increment from 1).")
@click.option("--tag", default=None, help="Question tag for the log.")
@click.option("--single-shot", is_flag=True,
              help="Bypass the temporal filter (for still photos).")
@click.option("--rollcall", "mode_rollcall", is_flag=True, help="Roll-call take.")
@click.option("--repair-hairlines", is_flag=True, default=None,
              help="Enable the 3x3 close/open repair pass.")
@click.option("--out", "out_dir", default="scan-out", show_default=True,
              type=click.Path(file_okay=False, path_type=Path))
def scan(source: Path, class_id: str, roster_path: Path | None,
         question_number: int | None, tag: str | None, single_shot: bool,
         mode_rollcall: bool, repair_hairlines: bool | None, out_dir: Path) -> None:
    """Scan a video file or an ordered image directory as one take.

    Exit status: 2 unreadable input, 3 zero frames; zero detections is a
    valid outcome.
    """
    cfg = load_config()
    if repair_hairlines is not None:
        cfg.detector.repair_hairlines = repair_hairlines
    try:
        frames = list(_iter_frames(source))
    except Exception as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    if not frames:
        click.echo("error: no frames decoded", err=True)
        sys.exit(3)
    if len(frames) == 1 and not single_shot:
        click.echo("warning: single frame and --single-shot not set; the temporal "
                   "filter will reject everything (try --single-shot)", err=True)

    session = sess.start_session(class_id, _load_roster(roster_path))
    mode = "rollcall" if mode_rollcall else "answers"
    question = None
    if mode == "answers":
        question = sess.start_question(session, tag=tag, number=question_number)

    t0 = time.perf_counter()
    accepted, run = engine.run_take(frames, session, question, cfg, mode=mode,
                                    single_shot=single_shot)
    elapsed = time.perf_counter() - t0

    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "answers.log").write_text(
        "\n".join(sess.export_log(session)) + "\n", encoding="utf-8")
    (out_dir / "summary.csv").write_text(
        sess.export_summary_csv(session), encoding="utf-8")

    fps = len(frames) / elapsed if elapsed > 0 else float("inf")
    click.echo(f"frames: {len(frames)}  accepted ids: {len(accepted)}  "
               f"fps: {fps:.2f}")
    if run.last_result is not None:
        for name, us in run.last_result.timings.items():
            click.echo(f"  {name}: {us} us (last frame)")
    click.echo(f"wrote {out_dir / 'answers.log'} and {out_dir / 'summary.csv'}")


@main.command()
@click.option("--host", default=None)
@click.option("--port", default=None, type=int)
@click.option("--log-path", default=None, type=click.Path(path_type=Path),
              help="Event log; replayed on start if present.")
def serve(host: str | None, port: int | None, log_path: Path | None) -> None:
    """Run the live frame-streaming poll service (wire protocol v1)."""
    from . import server

    cfg = load_config()
    if host:
        cfg.host = host
    if port is not None:
        cfg.port = port
    if log_path is not None:
        cfg.log_path = str(log_path)
    click.echo(f"serving on ws://{cfg.host}:{cfg.port} (log: {cfg.log_path})")
    try:
        server.serve(cfg)
    except KeyboardInterrupt:
        click.echo("stopped")


@main.command()
@click.argument("log_file", type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_path", default=None, type=click.Path(path_type=Path),
              help="Summary CSV path (default: stdout).")
def report(log_file: Path, out_path: Path | None) -> None:
    """Rebuild a session from an answer log and export its summary CSV."""
    try:
        session = sess.replay_log(log_file.read_text(encoding="utf-8").splitlines())
    except (ValueError, ClasscodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    csv_text = sess.export_summary_csv(session)
    if out_path is None:
        click.echo(csv_text, nl=False)
    else:
        out_path.write_text(csv_text, encoding="utf-8")
        click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
