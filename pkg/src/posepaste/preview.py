"""Contact sheet: grid of (original pedestrian, composited) thumbnail pairs."""
from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

from .ingest import load_image
from .pipeline import SynthesisManifest

CELL_H = 256
PAD = 4


def _thumb(img: np.ndarray, height: int) -> np.ndarray:
    h, w = img.shape[:2]
    new_w = max(1, round(w * height / h))
    return cv2.resize(img, (new_w, height), interpolation=cv2.INTER_AREA)


def contact_sheet(
    run_dir: str | Path, cols: int, rows: int, cell_height: int = CELL_H
) -> np.ndarray:
    """Build a cols x rows grid of side-by-side (pedestrian, fake) pairs from
    a synthesis run directory."""
    run_dir = Path(run_dir)
    manifest = SynthesisManifest.from_tsv((run_dir / "manifest.tsv").read_text())
    pairs = [r for r in manifest.rows if not r.skip_reason][: cols * rows]
    if not pairs:
        raise ValueError(f"no composited images in {run_dir}")
    cells = []
    for r in pairs:
        orig = _thumb(load_image(r.pedestrian_path), cell_height)
        fake = _thumb(load_image(run_dir / r.output_path), cell_height)
        cells.append(np.hstack([orig, np.zeros((cell_height, PAD, 3), np.uint8), fake]))
    cell_w = max(c.shape[1] for c in cells)
    cells = [
        np.pad(c, ((0, 0), (0, cell_w - c.shape[1]), (0, 0))) for c in cells
    ]
    blank = np.zeros((cell_height, cell_w, 3), np.uint8)
    grid_rows = []
    for r in range(rows):
        row_cells = [
            cells[r * cols + c] if r * cols + c < len(cells) else blank
            for c in range(cols)
        ]
        strips = []
        for c in row_cells:
            strips.extend([c, np.zeros((cell_height, PAD, 3), np.uint8)])
        grid_rows.append(np.hstack(strips[:-1]))
        grid_rows.append(np.zeros((PAD, grid_rows[0].shape[1], 3), np.uint8))
    return np.vstack(grid_rows[:-1])
