"""Whole-dataset synthesis: match, warp, composite, write outputs + manifest.

Output tree:
  output_dir/images/<stem>_fake<ext>   composited images
  output_dir/images/<original name>    pass-through copies (include_originals)
  output_dir/manifest.tsv              one row per attempted composite
  output_dir/stats.txt                 human-readable run statistics

The manifest is written last, atomically, and contains no timestamps: a run
is reproducible byte-for-byte from (inputs, config).
"""
from __future__ import annotations

import hashlib
import os
import shutil
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np

from . import __version__, pose
from .compositor import compose_fake
from .geometry import affine_from_match
from .ingest import DonorRecord, PersonRecord
from .matcher import match_one, substream
from .pose import DegeneratePoseError, wrap_angle

MANIFEST_COLUMNS = [
    "pedestrian_index", "output_path", "pedestrian_path", "donor_path",
    "identity", "camera", "orientation", "theta_deg", "scale",
    "pivot_x", "pivot_y", "orientation_matched", "slope_residual_q",
    "height_residual_q", "relaxation_level", "changed_pixels",
    "image_sha256", "skip_reason",
]


class SynthesisError(RuntimeError):
    pass


@dataclass
class SynthesisConfig:
    seed: int
    output_dir: str
    bin_size: float = 15.0
    scale_correct: bool = True
    include_originals: bool = True
    strict: bool = False
    jobs: int = 1

    def __post_init__(self):
        if self.bin_size <= 0:
            raise ValueError(f"bin must be > 0, got {self.bin_size}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")


@dataclass
class ManifestRow:
    pedestrian_index: int
    output_path: str
    pedestrian_path: str
    donor_path: str
    identity: int
    camera: int
    orientation: str
    theta_deg: float
    scale: float
    pivot_x: float
    pivot_y: float
    orientation_matched: bool
    slope_residual_q: float
    height_residual_q: float
    relaxation_level: int
    changed_pixels: int
    image_sha256: str
    skip_reason: str = ""


@dataclass
class SynthesisManifest:
    header: dict[str, str]
    rows: list[ManifestRow] = field(default_factory=list)

    def to_tsv(self) -> str:
        lines = [f"# {k}={v}" for k, v in self.header.items()]
        lines.append("\t".join(MANIFEST_COLUMNS))
        for r in self.rows:
            lines.append("\t".join(_format_field(getattr(r, c)) for c in MANIFEST_COLUMNS))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_tsv(text: str) -> "SynthesisManifest":
        header: dict[str, str] = {}
        rows: list[ManifestRow] = []
        columns = None
        for ln in text.splitlines():
            if not ln.strip():
                continue
            if ln.startswith("#"):
                k, _, v = ln[1:].strip().partition("=")
                header[k] = v
            elif columns is None:
                columns = ln.split("\t")
                if columns != MANIFEST_COLUMNS:
                    raise ValueError("unrecognized manifest columns")
            else:
                vals = ln.split("\t")
                rec = dict(zip(columns, vals))
                rows.append(ManifestRow(
                    pedestrian_index=int(rec["pedestrian_index"]),
                    output_path=rec["output_path"],
                    pedestrian_path=rec["pedestrian_path"],
                    donor_path=rec["donor_path"],
                    identity=int(rec["identity"]),
                    camera=int(rec["camera"]),
                    orientation=rec["orientation"],
                    theta_deg=float(rec["theta_deg"]),
                    scale=float(rec["scale"]),
                    pivot_x=float(rec["pivot_x"]),
                    pivot_y=float(rec["pivot_y"]),
                    orientation_matched=rec["orientation_matched"] == "1",
                    slope_residual_q=float(rec["slope_residual_q"]),
                    height_residual_q=float(rec["height_residual_q"]),
                    relaxation_level=int(rec["relaxation_level"]),
                    changed_pixels=int(rec["changed_pixels"]),
                    image_sha256=rec["image_sha256"],
                    skip_reason=rec["skip_reason"],
                ))
        return SynthesisManifest(header=header, rows=rows)


def _format_field(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _input_digest(persons: list[PersonRecord], donors: list[DonorRecord]) -> str:
    h = hashlib.sha256()
    for r in persons:
        h.update(r.source_path.encode())
        h.update(r.image.tobytes())
    for r in donors:
        h.update(r.source_path.encode())
        h.update(r.image.tobytes())
        h.update(r.mask.tobytes())
    return h.hexdigest()


def _write_image(path: Path, img: np.ndarray) -> bytes:
    """Encode RGB image per the path's extension; returns the encoded bytes."""
    ok, buf = cv2.imencode(path.suffix, cv2.cvtColor(img, cv2.COLOR_RGB2BGR))
    if not ok:
        raise SynthesisError(f"could not encode {path}")
    data = buf.tobytes()
    path.write_bytes(data)
    return data


def synthesize(
    persons: list[PersonRecord],
    donors: list[DonorRecord],
    cfg: SynthesisConfig,
) -> SynthesisManifest:
    """Run the full composite pipeline and write the output dataset."""
    if not donors:
        raise SynthesisError("donor list is empty")
    out_dir = Path(cfg.output_dir)
    images_dir = out_dir / "images"
    images_dir.mkdir(parents=True, exist_ok=True)

    donor_desc = []
    donor_ok: list[int] = []
    for i, d in enumerate(donors):
        try:
            donor_desc.append(pose.describe(d.keypoints, cfg.bin_size))
            donor_ok.append(i)
        except DegeneratePoseError:
            if cfg.strict:
                raise
            donor_desc.append(None)
    valid_donor_desc = [donor_desc[i] for i in donor_ok]
    if not valid_donor_desc:
        raise SynthesisError("no donor has a usable pose")

    def one(i: int) -> tuple[ManifestRow, np.ndarray | None, Path | None]:
        p = persons[i]
        src = Path(p.source_path)
        out_name = src.stem + "_fake" + src.suffix
        blank = dict(
            pedestrian_index=i,
            output_path=f"images/{out_name}",
            pedestrian_path=p.source_path,
            donor_path="",
            identity=p.identity,
            camera=p.camera,
            orientation="",
            theta_deg=0.0, scale=1.0, pivot_x=0.0, pivot_y=0.0,
            orientation_matched=False,
            slope_residual_q=0.0, height_residual_q=0.0,
            relaxation_level=0, changed_pixels=0, image_sha256="",
        )
        try:
            pd = pose.describe(p.keypoints, cfg.bin_size)
        except DegeneratePoseError as exc:
            if cfg.strict:
                raise
            return ManifestRow(**blank, skip_reason=f"degenerate_pose:{exc}"), None, None
        m = match_one(pd, valid_donor_desc, substream(cfg.seed, i), pedestrian_index=i)
        donor = donors[donor_ok[m.donor_index]]
        dd = valid_donor_desc[m.donor_index]
        t = affine_from_match(pd, dd, scale_correct=cfg.scale_correct)
        img, meta = compose_fake(p, donor, t)
        theta = wrap_angle(pd.slope_raw - dd.slope_raw)
        s = pd.height_raw / dd.height_raw if cfg.scale_correct else 1.0
        blank.update(
            donor_path=donor.source_path,
            orientation=pd.orientation.value,
            theta_deg=theta, scale=s,
            pivot_x=dd.mid_hip[0], pivot_y=dd.mid_hip[1],
            orientation_matched=m.orientation_matched,
            slope_residual_q=m.slope_residual_q,
            height_residual_q=m.height_residual_q,
            relaxation_level=m.relaxation_level,
            changed_pixels=meta.changed_pixels,
        )
        if meta.skip_reason is not None:
            if cfg.strict:
                raise SynthesisError(f"{p.source_path}: {meta.skip_reason}")
            return ManifestRow(**blank, skip_reason=meta.skip_reason), None, None
        return ManifestRow(**blank), img, images_dir / out_name

    indices = range(len(persons))
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(one, indices))
    else:
        results = [one(i) for i in indices]

    rows: list[ManifestRow] = []
    for row, img, out_path in results:
        if img is not None and out_path is not None:
            row.image_sha256 = _sha256_bytes(_write_image(out_path, img))
        rows.append(row)

    if cfg.include_originals:
        for p in persons:
            shutil.copyfile(p.source_path, images_dir / Path(p.source_path).name)

    manifest = SynthesisManifest(
        header={
            "manifest_version": "1",
            "tool_version": __version__,
            "seed": str(cfg.seed),
            "bin": repr(float(cfg.bin_size)),
            "scale_correct": "1" if cfg.scale_correct else "0",
            "include_originals": "1" if cfg.include_originals else "0",
            "input_digest": _input_digest(persons, donors),
        },
        rows=rows,
    )
    tmp = out_dir / "manifest.tsv.tmp"
    tmp.write_text(manifest.to_tsv())
    os.replace(tmp, out_dir / "manifest.tsv")
    (out_dir / "stats.txt").write_text(stats(manifest).to_text())
    return manifest


@dataclass
class StatsReport:
    n_rows: int
    n_skips: int
    orientation_hist: dict[str, int]
    slope_residual_hist: dict[float, int]
    height_residual_hist: dict[float, int]
    relaxation_hist: dict[int, int]
    donor_reuse: dict[str, int]

    def to_text(self) -> str:
        lines = [
            f"composites attempted: {self.n_rows}",
            f"skipped: {self.n_skips}",
            "orientation:",
        ]
        for k in sorted(self.orientation_hist):
            lines.append(f"  {k}: {self.orientation_hist[k]}")
        lines.append("slope residual (quantized):")
        for k in sorted(self.slope_residual_hist):
            lines.append(f"  {k:g}: {self.slope_residual_hist[k]}")
        lines.append("height residual (quantized):")
        for k in sorted(self.height_residual_hist):
            lines.append(f"  {k:g}: {self.height_residual_hist[k]}")
        lines.append("relaxation level:")
        for k in sorted(self.relaxation_hist):
            lines.append(f"  {k}: {self.relaxation_hist[k]}")
        lines.append("donor reuse:")
        for k in sorted(self.donor_reuse):
            lines.append(f"  {k}: {self.donor_reuse[k]}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "n_rows": self.n_rows,
            "n_skips": self.n_skips,
            "orientation_hist": self.orientation_hist,
            "slope_residual_hist": {str(k): v for k, v in self.slope_residual_hist.items()},
            "height_residual_hist": {str(k): v for k, v in self.height_residual_hist.items()},
            "relaxation_hist": {str(k): v for k, v in self.relaxation_hist.items()},
            "donor_reuse": self.donor_reuse,
        }


def stats(manifest: SynthesisManifest) -> StatsReport:
    ok = [r for r in manifest.rows if not r.skip_reason]
    return StatsReport(
        n_rows=len(manifest.rows),
        n_skips=len(manifest.rows) - len(ok),
        orientation_hist=dict(Counter(r.orientation for r in ok)),
        slope_residual_hist=dict(Counter(r.slope_residual_q for r in ok)),
        height_residual_hist=dict(Counter(r.height_residual_q for r in ok)),
        relaxation_hist=dict(Counter(r.relaxation_level for r in ok)),
        donor_reuse=dict(Counter(r.donor_path for r in ok)),
    )
