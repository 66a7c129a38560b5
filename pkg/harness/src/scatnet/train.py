"""Training loop for the cascade: joint loss over both networks.

Per batch, with M the number of grid cells,

    loss_I  = (1/B) sum_b ||chi_pred_b  - chi_label_b ||_F / M
    loss_II = (1/B) sum_b ||etot_pred_b - etot_label_b||_F / M
    loss    = beta1 * loss_I + beta2 * loss_II,  beta1 = beta2 = 1/2

where the Frobenius norm runs over the (Re, Im) channels, i.e. it equals
the complex Frobenius norm. The learning rate starts at 1e-3 and halves
every 50 epochs.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch
from torch.utils.data import DataLoader

from .data import DatasetInfo, ScatterDataset, load_info
from .model import CascadeModel, zero_predictor_outputs
from .pairs import PairConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 60
    batch_size: int = 16
    lr_init: float = 1e-3
    lr_halve_every: int = 50
    beta1: float = 0.5
    beta2: float = 0.5
    base_channels: int = 16
    depth: int = 3
    seed: int = 0
    mask_loss_i: bool = False  # restrict loss_I to the p2 region
    deterministic: bool = True


def set_determinism(seed: int, deterministic: bool = True) -> None:
    random.seed(seed)
    np.random.seed(seed & 0xFFFFFFFF)
    torch.manual_seed(seed)
    if deterministic:
        torch.use_deterministic_algorithms(True)


def frobenius_batch_loss(pred: torch.Tensor, label: torch.Tensor,
                         m_cells: int, mask: torch.Tensor | None = None) -> torch.Tensor:
    """(1/B) sum_b ||pred_b - label_b||_F / M over (2, H, W) samples."""
    diff = pred - label
    if mask is not None:
        diff = diff * mask
    return diff.flatten(1).norm(dim=1).div(m_cells).mean()


def cascade_losses(out: dict, batch: dict, m_cells: int,
                   cfg: TrainConfig) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    mask = batch["mask"] if cfg.mask_loss_i else None
    loss_i = frobenius_batch_loss(out["chi_pred"], batch["chi_label"], m_cells, mask)
    loss_ii = frobenius_batch_loss(out["etot_pred"], batch["etot_label"], m_cells)
    return cfg.beta1 * loss_i + cfg.beta2 * loss_ii, loss_i, loss_ii


def build_model(pair_id: str, info: DatasetInfo, cfg: TrainConfig) -> CascadeModel:
    pair = PairConfig.of(pair_id)
    return CascadeModel(
        pair, info.grid.ny, info.grid.nx, info.n_receivers,
        base_channels=cfg.base_channels, depth=cfg.depth,
    )


def train(pair_id: str, dataset_dir: str | Path, ids: list[str],
          cfg: TrainConfig, out_dir: str | Path) -> dict:
    """Train one pair's cascade; writes checkpoint.pt and losses.json.

    Returns the training summary (per-epoch losses, final lr).
    """
    info = load_info(dataset_dir)
    set_determinism(cfg.seed, cfg.deterministic)
    model = build_model(pair_id, info, cfg)
    m_cells = info.grid.nx * info.grid.ny

    loader = DataLoader(
        ScatterDataset(info, ids),
        batch_size=cfg.batch_size,
        shuffle=True,
        generator=torch.Generator().manual_seed(cfg.seed),
        num_workers=0,
    )
    opt = torch.optim.Adam(model.parameters(), lr=cfg.lr_init)
    sched = torch.optim.lr_scheduler.StepLR(opt, step_size=cfg.lr_halve_every, gamma=0.5)

    # reference points on the first batch: untrained-model loss and the
    # zero-output baseline ("networks predict nothing new")
    first_batch = next(iter(DataLoader(ScatterDataset(info, ids[: cfg.batch_size]),
                                       batch_size=cfg.batch_size)))
    with torch.no_grad():
        model.eval()
        init_loss = cascade_losses(model(first_batch), first_batch, m_cells, cfg)[0].item()
        pair = PairConfig.of(pair_id)
        zero_loss = cascade_losses(
            zero_predictor_outputs(pair, first_batch), first_batch, m_cells, cfg
        )[0].item()
    logger.info("pair %s: init loss %.3e, zero-predictor baseline %.3e",
                pair_id, init_loss, zero_loss)

    history = {"total": [], "loss_i": [], "loss_ii": [], "lr": []}
    model.train()
    for epoch in range(cfg.epochs):
        tot = li = lii = 0.0
        batches = 0
        for batch in loader:
            opt.zero_grad()
            out = model(batch)
            loss, loss_i, loss_ii = cascade_losses(out, batch, m_cells, cfg)
            if not torch.isfinite(loss):
                raise RuntimeError(
                    f"non-finite loss at epoch {epoch} (loss_I={loss_i.item()}, "
                    f"loss_II={loss_ii.item()})"
                )
            loss.backward()
            opt.step()
            tot += loss.item()
            li += loss_i.item()
            lii += loss_ii.item()
            batches += 1
        sched.step()
        history["total"].append(tot / batches)
        history["loss_i"].append(li / batches)
        history["loss_ii"].append(lii / batches)
        history["lr"].append(opt.param_groups[0]["lr"])
        logger.info("pair %s epoch %d: loss %.3e (lr %.2e)", pair_id, epoch,
                    tot / batches, opt.param_groups[0]["lr"])

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    torch.save(
        {
            "pair_id": pair_id,
            "config": asdict(cfg),
            "grid": {"ny": info.grid.ny, "nx": info.grid.nx},
            "n_receivers": info.n_receivers,
            "state_dict": model.state_dict(),
        },
        out / "checkpoint.pt",
    )
    summary = {
        "pair_id": pair_id,
        "epochs": cfg.epochs,
        "init_loss": init_loss,
        "zero_predictor_loss": zero_loss,
        "history": history,
    }
    (out / "losses.json").write_text(json.dumps(summary, indent=1))
    return summary


def load_checkpoint(path: str | Path, info: DatasetInfo) -> tuple[CascadeModel, TrainConfig]:
    blob = torch.load(path, map_location="cpu", weights_only=False)
    cfg = TrainConfig(**blob["config"])
    if blob["grid"] != {"ny": info.grid.ny, "nx": info.grid.nx}:
        raise ValueError(f"checkpoint grid {blob['grid']} != dataset grid")
    if blob["n_receivers"] != info.n_receivers:
        raise ValueError("checkpoint receiver count != dataset")
    model = build_model(blob["pair_id"], info, cfg)
    model.load_state_dict(blob["state_dict"])
    model.eval()
    return model, cfg


def overfit_single_sample(pair_id: str, dataset_dir: str | Path, sample_id: str,
                          steps: int, cfg: TrainConfig) -> dict:
    """Drive the cascade onto one sample; returns the loss trajectory.

    Uses cosine-annealed lr over `steps` (a fixed lr floors the achievable
    loss; the epoch-based halving schedule is for full training runs).
    """
    info = load_info(dataset_dir)
    set_determinism(cfg.seed, cfg.deterministic)
    model = build_model(pair_id, info, cfg)
    m_cells = info.grid.nx * info.grid.ny
    sample = ScatterDataset(info, [sample_id])[0]
    batch = {k: v[None, ...] for k, v in sample.items()}
    opt = torch.optim.Adam(model.parameters(), lr=cfg.lr_init)
    sched = torch.optim.lr_scheduler.CosineAnnealingLR(
        opt, T_max=steps, eta_min=cfg.lr_init * 1e-4
    )
    losses = []
    model.train()
    for _ in range(steps):
        opt.zero_grad()
        out = model(batch)
        loss, _, _ = cascade_losses(out, batch, m_cells, cfg)
        loss.backward()
        opt.step()
        sched.step()
        losses.append(loss.item())
    return {"losses": losses, "initial": losses[0], "best": min(losses)}
