"""Network blocks: scattering-vector lift, 2-D U-Net, and the two-network cascade."""

from __future__ import annotations

import warnings

import torch
import torch.nn as nn

from .pairs import PairConfig


class ScatteringLift(nn.Module):
    """Learned map from the 2*N_s scattering reals to a 2-channel grid image.

    A single fully connected layer followed by a rectifier, reshaped to
    (2, ny, nx). Dimensions come from the dataset manifest; a mismatched
    input length is rejected.
    """

    def __init__(self, n_receivers: int, ny: int, nx: int):
        super().__init__()
        self.n_receivers = n_receivers
        self.ny = ny
        self.nx = nx
        self.linear = nn.Linear(2 * n_receivers, 2 * ny * nx)

    def forward(self, esca: torch.Tensor) -> torch.Tensor:
        if esca.shape[-1] != 2 * self.n_receivers:
            raise ValueError(
                f"scattering vector length {esca.shape[-1]} != 2*N_s = {2 * self.n_receivers}"
            )
        out = torch.relu(self.linear(esca))
        return out.view(*esca.shape[:-1], 2, self.ny, self.nx)


def _double_conv(c_in: int, c_out: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(c_in, c_out, 3, stride=1, padding=1),
        nn.BatchNorm2d(c_out),
        nn.ReLU(inplace=True),
        nn.Conv2d(c_out, c_out, 3, stride=1, padding=1),
        nn.BatchNorm2d(c_out),
        nn.ReLU(inplace=True),
    )


class UNet2d(nn.Module):
    """Contracting/expansive U-Net with skips; output size equals input size.

    depth = number of 2x2 max-pool downsamplings; channels double on the
    way down and halve on the way up; final 1x1 convolution maps to
    out_channels.
    """

    def __init__(self, in_channels: int, out_channels: int, ny: int, nx: int,
                 base_channels: int = 16, depth: int = 3):
        super().__init__()
        max_depth = 0
        while max_depth < depth and ny % (2 ** (max_depth + 1)) == 0 and nx % (2 ** (max_depth + 1)) == 0:
            max_depth += 1
        if max_depth < depth:
            warnings.warn(
                f"grid {ny}x{nx} not divisible by 2^{depth}; reducing depth to {max_depth}",
                stacklevel=2,
            )
            depth = max_depth
        self.depth = depth

        self.encoders = nn.ModuleList()
        c = in_channels
        widths = [base_channels * 2**k for k in range(depth + 1)]
        for w in widths[:-1]:
            self.encoders.append(_double_conv(c, w))
            c = w
        self.pool = nn.MaxPool2d(2, stride=2)
        self.bottleneck = _double_conv(c, widths[-1])

        self.upconvs = nn.ModuleList()
        self.decoders = nn.ModuleList()
        for w in reversed(widths[:-1]):
            self.upconvs.append(nn.ConvTranspose2d(2 * w, w, 2, stride=2))
            self.decoders.append(_double_conv(2 * w, w))
        self.head = nn.Conv2d(widths[0], out_channels, 1, stride=1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        skips = []
        for enc in self.encoders:
            x = enc(x)
            skips.append(x)
            x = self.pool(x)
        x = self.bottleneck(x)
        for up, dec, skip in zip(self.upconvs, self.decoders, reversed(skips)):
            x = up(x)
            x = dec(torch.cat([x, skip], dim=1))
        return self.head(x)


class CascadeModel(nn.Module):
    """Network-I -> (mask / fix known part) -> Network-II.

    Network-II always consumes Network-I's prediction; the p2 mask is
    enforced on the predicted chi_p2 (never learned), and in the pair
    that predicts the complete chi the known part's values are fixed
    before the prediction is used anywhere.
    """

    def __init__(self, pair: PairConfig, ny: int, nx: int, n_receivers: int,
                 base_channels: int = 16, depth: int = 3):
        super().__init__()
        self.pair = pair
        self.lift = ScatteringLift(n_receivers, ny, nx) if pair.uses_lift else None
        self.net1 = UNet2d(pair.net1_in_channels, 2, ny, nx, base_channels, depth)
        self.net2 = UNet2d(pair.net2_in_channels, 2, ny, nx, base_channels, depth)

    def _gather(self, names, batch, computed):
        parts = []
        for name in names:
            parts.append(computed[name] if name in computed else batch[name])
        return torch.cat(parts, dim=1)

    def forward(self, batch: dict[str, torch.Tensor]) -> dict[str, torch.Tensor]:
        computed: dict[str, torch.Tensor] = {}
        if self.lift is not None:
            computed["lift"] = self.lift(batch["esca"])

        raw1 = self.net1(self._gather(self.pair.net1_inputs, batch, computed))
        mask = batch["mask"]
        if self.pair.predicts_full_chi:
            # fix the known part's values inside the predicted complete chi
            p1_support = (batch["chi_p1"].abs().sum(dim=1, keepdim=True) > 0).float()
            chi_pred = batch["chi_p1"] * p1_support + raw1 * (1.0 - p1_support)
            computed["chi"] = chi_pred
        else:
            chi2_hat = raw1 * mask  # enforced, not learned
            computed["chi_p2"] = chi2_hat
            chi_pred = batch["chi_p1"] + chi2_hat
            computed["chi"] = chi_pred

        raw2 = self.net2(self._gather(self.pair.net2_inputs, batch, computed))
        etot_pred = batch["ep1"] + raw2 if self.pair.predicts_delta else raw2
        return {"chi_pred": chi_pred, "etot_pred": etot_pred, "net1_raw": raw1, "net2_raw": raw2}


def zero_predictor_outputs(pair: PairConfig, batch: dict) -> dict:
    """Cascade outputs if both networks emitted zeros (baseline for losses)."""
    if pair.predicts_full_chi:
        support = (batch["chi_p1"].abs().sum(dim=1, keepdim=True) > 0).float()
        chi_pred = batch["chi_p1"] * support
    else:
        chi_pred = batch["chi_p1"]
    etot_pred = batch["ep1"] if pair.predicts_delta else torch.zeros_like(batch["ep1"])
    return {"chi_pred": chi_pred, "etot_pred": etot_pred}
