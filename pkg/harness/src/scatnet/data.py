"""Dataset access: manifest parsing, per-sample tensors, train/test split.

Complex grid arrays become 2-channel float32 tensors (Re, Im). The
incident field is synthesized from the manifest's grid/frequency/angle
metadata: exp(-j k0 (x cos t + y sin t)) at cell centers, matching the
solver's e^{+j omega t} convention.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from torch.utils.data import Dataset

from . import vsf

EPS0 = 8.8541878128e-12
MU0 = 1.25663706212e-6


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    dx: float
    dy: float
    center: tuple[float, float]

    def cell_centers(self) -> np.ndarray:
        cx, cy = self.center
        xs = cx + (np.arange(self.nx) - (self.nx - 1) / 2.0) * self.dx
        ys = cy + (np.arange(self.ny) - (self.ny - 1) / 2.0) * self.dy
        xg, yg = np.meshgrid(xs, ys)
        return np.column_stack([xg.ravel(), yg.ravel()])


@dataclass(frozen=True)
class DatasetInfo:
    root: Path
    grid: GridSpec
    frequency_hz: float
    n_receivers: int
    sample_ids: list[str]
    angles: dict[str, float]

    @property
    def k0(self) -> float:
        return 2.0 * math.pi * self.frequency_hz * math.sqrt(EPS0 * MU0)


def load_info(dataset_dir: str | Path) -> DatasetInfo:
    root = Path(dataset_dir)
    manifest = json.loads((root / "manifest.json").read_text())
    if manifest["format_version"] != 1:
        raise ValueError(f"unsupported manifest version {manifest['format_version']}")
    g = manifest["config"]["grid"]
    grid = GridSpec(g["nx"], g["ny"], g["dx"], g["dy"], tuple(g["center"]))
    ids = [e["id"] for e in manifest["samples"]]
    angles = {e["id"]: float(e["angle_deg"]) for e in manifest["samples"]}
    return DatasetInfo(
        root=root,
        grid=grid,
        frequency_hz=manifest["config"]["frequency_hz"],
        n_receivers=manifest["config"]["ring"]["count"],
        sample_ids=ids,
        angles=angles,
    )


def incident_plane_wave(info: DatasetInfo, angle_deg: float) -> np.ndarray:
    theta = math.radians(angle_deg)
    pts = info.grid.cell_centers()
    phase = info.k0 * (pts[:, 0] * math.cos(theta) + pts[:, 1] * math.sin(theta))
    return np.exp(-1j * phase)


def complex_to_channels(arr: np.ndarray, ny: int, nx: int) -> torch.Tensor:
    img = arr.reshape(ny, nx)
    return torch.from_numpy(
        np.stack([img.real, img.imag]).astype(np.float32)
    )


def load_sample_arrays(info: DatasetInfo, sample_id: str) -> dict[str, np.ndarray]:
    d = info.root / "samples" / sample_id
    out = {name: vsf.read_array(d / f"{name}.vsf") for name in
           ("chi_p1", "mask_p2", "chi_p2", "esca0", "ep1", "etot")}
    return out


def sample_tensors(info: DatasetInfo, sample_id: str) -> dict[str, torch.Tensor]:
    """All per-sample tensors a cascade pair might need."""
    arrs = load_sample_arrays(info, sample_id)
    ny, nx = info.grid.ny, info.grid.nx
    einc = incident_plane_wave(info, info.angles[sample_id])
    esca = arrs["esca0"].ravel()
    chi_full = arrs["chi_p1"] + arrs["chi_p2"]
    return {
        "chi_p1": complex_to_channels(arrs["chi_p1"].ravel(), ny, nx),
        "ep1": complex_to_channels(arrs["ep1"].ravel(), ny, nx),
        "einc": complex_to_channels(einc, ny, nx),
        "mask": torch.from_numpy(
            (arrs["mask_p2"].real.reshape(ny, nx) >= 0.5).astype(np.float32)
        )[None, :, :],
        "esca": torch.from_numpy(
            np.concatenate([esca.real, esca.imag]).astype(np.float32)
        ),
        "chi_label": complex_to_channels(chi_full.ravel(), ny, nx),
        "chi_p2_label": complex_to_channels(arrs["chi_p2"].ravel(), ny, nx),
        "etot_label": complex_to_channels(arrs["etot"].ravel(), ny, nx),
    }


class ScatterDataset(Dataset):
    """Lazily loads sample tensors by id."""

    def __init__(self, info: DatasetInfo, ids: list[str]):
        self.info = info
        self.ids = list(ids)

    def __len__(self) -> int:
        return len(self.ids)

    def __getitem__(self, idx: int) -> dict[str, torch.Tensor]:
        return sample_tensors(self.info, self.ids[idx])


def train_test_split(info: DatasetInfo, n_test: int) -> tuple[list[str], list[str]]:
    ids = sorted(info.sample_ids)
    if not 0 < n_test < len(ids):
        raise ValueError(f"n_test={n_test} out of range for {len(ids)} samples")
    return ids[:-n_test], ids[-n_test:]


def channels_to_complex(t: torch.Tensor) -> np.ndarray:
    """(2, H, W) float tensor -> complex128 (H, W)."""
    arr = t.detach().cpu().numpy().astype(np.float64)
    return arr[0] + 1j * arr[1]
