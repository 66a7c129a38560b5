"""Input/output wiring for the four studied network pairs.

Every complex map or field contributes two channels (Re, Im). The
scattering vector enters through a learned lift (see model.ScatteringLift)
wherever "lift" appears. Network-I predicts either the unknown part
chi_p2 (pairs II-IV) or the complete chi (pair I, with the known part's
values fixed before further use). Network-II predicts either the
unknown-part field contribution (pairs II-III) or the total field
directly (pairs I and IV).
"""

from __future__ import annotations

from dataclasses import dataclass

_PAIR_TABLE = {
    "I": (("lift", "einc"), "chi", ("chi", "einc"), "etot"),
    "II": (("chi_p1", "ep1"), "chi_p2", ("chi_p1", "chi_p2", "ep1"), "delta_etot"),
    "III": (("chi_p1", "lift", "ep1"), "chi_p2", ("chi_p1", "chi_p2", "ep1"), "delta_etot"),
    "IV": (("chi_p1", "lift", "einc"), "chi_p2", ("chi", "einc"), "etot"),
}


@dataclass(frozen=True)
class PairConfig:
    pair_id: str
    net1_inputs: tuple[str, ...]
    net1_output: str
    net2_inputs: tuple[str, ...]
    net2_output: str

    @classmethod
    def of(cls, pair_id: str) -> "PairConfig":
        if pair_id not in _PAIR_TABLE:
            raise ValueError(f"unknown pair {pair_id!r}; valid: {sorted(_PAIR_TABLE)}")
        n1_in, n1_out, n2_in, n2_out = _PAIR_TABLE[pair_id]
        return cls(pair_id, n1_in, n1_out, n2_in, n2_out)

    @property
    def net1_in_channels(self) -> int:
        return 2 * len(self.net1_inputs)

    @property
    def net2_in_channels(self) -> int:
        return 2 * len(self.net2_inputs)

    @property
    def uses_lift(self) -> bool:
        return "lift" in self.net1_inputs

    @property
    def predicts_delta(self) -> bool:
        return self.net2_output == "delta_etot"

    @property
    def predicts_full_chi(self) -> bool:
        return self.net1_output == "chi"
