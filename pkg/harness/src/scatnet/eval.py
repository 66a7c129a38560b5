"""Prediction and metric evaluation against the solver's conventions.

The scattered field is reconstructed from the exported receiver matrix:
E_sca = Gs @ (chi_pred * etot_pred), all in complex float64. Predictions
are written back in the solver's array format so its own metrics command
reproduces the numbers file-for-file.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch

from . import vsf
from .data import (
    DatasetInfo,
    channels_to_complex,
    load_info,
    load_sample_arrays,
    sample_tensors,
)
from .train import load_checkpoint


def relative_error(pred: np.ndarray, label: np.ndarray) -> float:
    return float(np.linalg.norm((pred - label).ravel()) / np.linalg.norm(label.ravel()))


def predict_sample(model, info: DatasetInfo, sample_id: str,
                   gs: np.ndarray) -> dict[str, np.ndarray]:
    sample = sample_tensors(info, sample_id)
    batch = {k: v[None, ...] for k, v in sample.items()}
    with torch.no_grad():
        out = model(batch)
    chi_pred = channels_to_complex(out["chi_pred"][0])
    etot_pred = channels_to_complex(out["etot_pred"][0])
    esca_pred = gs @ (chi_pred.ravel() * etot_pred.ravel())
    # labels at full precision straight from the files (the float32
    # training tensors would perturb the metrics)
    arrs = load_sample_arrays(info, sample_id)
    return {
        "chi": chi_pred,
        "etot": etot_pred,
        "esca": esca_pred,
        "chi_label": arrs["chi_p1"] + arrs["chi_p2"],
        "etot_label": arrs["etot"],
        "esca_label": arrs["esca0"].ravel(),
    }


def predict_and_eval(checkpoint: str | Path, dataset_dir: str | Path,
                     ids: list[str], out_dir: str | Path) -> dict:
    """MRE report over `ids`; writes per-sample predictions as .vsf files.

    Requires operators/gs.vsf (exported by the solver) under the dataset.
    """
    info = load_info(dataset_dir)
    gs_path = info.root / "operators" / "gs.vsf"
    if not gs_path.exists():
        raise FileNotFoundError(
            f"{gs_path} missing; run the solver's export-operators first"
        )
    gs = vsf.read_array(gs_path)
    m = info.grid.nx * info.grid.ny
    if gs.shape != (info.n_receivers, m):
        raise ValueError(f"gs shape {gs.shape} != ({info.n_receivers}, {m})")

    model, _ = load_checkpoint(checkpoint, info)
    out_root = Path(out_dir)
    res = {"chi": [], "etot": [], "esca": []}
    for sid in ids:
        p = predict_sample(model, info, sid, gs)
        d = out_root / sid
        d.mkdir(parents=True, exist_ok=True)
        vsf.write_array(d / "chi.vsf", p["chi"])
        vsf.write_array(d / "etot.vsf", p["etot"])
        vsf.write_array(d / "esca.vsf", p["esca"])
        res["chi"].append(relative_error(p["chi"].ravel(), p["chi_label"].ravel()))
        res["etot"].append(relative_error(p["etot"].ravel(), p["etot_label"].ravel()))
        res["esca"].append(relative_error(p["esca"], p["esca_label"]))

    report = {
        "samples": len(ids),
        "mre_mean": {k: float(np.mean(v)) for k, v in res.items()},
        "mre_sum": {k: float(np.sum(v)) for k, v in res.items()},
        "per_sample": {k: dict(zip(ids, map(float, v))) for k, v in res.items()},
    }
    (out_root / "report.json").write_text(json.dumps(report, indent=1))
    return report
