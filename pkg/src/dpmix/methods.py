"""Initialization methods by name, and the init -> EM fitting pipeline."""
from __future__ import annotations

from dataclasses import dataclass

from .em import SIMULATION_PROFILE, EmConfig, run_em
from .model import BlockPartition, FitResult, WeightedSample, blocks_to_params
from .partition import PartitionTable, dp_partition
from .refinit import hierarchical_partition, quantile_partition
from .scoring import ScoringSpec

METHOD_NAMES = ("eq", "hclu-c", "hclu-a", "dp-q1", "dp-q2", "dp-q3", "dp-q4")


@dataclass(frozen=True)
class Method:
    """An initialization method: ``eq``, ``hclu-c``, ``hclu-a`` or ``dp-q1`` .. ``dp-q4``.

    ``delta`` is used by ``dp-q4`` only and is in data units.
    """

    name: str
    delta: float = 0.0

    def __post_init__(self):
        name = self.name.lower().replace("_", "-")
        if name not in METHOD_NAMES:
            raise ValueError(f"unknown method {self.name!r}; expected one of {METHOD_NAMES}")
        object.__setattr__(self, "name", name)
        if name == "dp-q4" and not self.delta > 0:
            raise ValueError("dp-q4 needs delta > 0")

    @classmethod
    def parse(cls, text: str) -> "Method":
        """Accepts ``dp-q4``-style names, with ``dp-q4(0.1)`` or ``dp-q4:0.1`` for delta."""
        text = text.strip()
        for sep in ("(", ":"):
            if sep in text:
                name, arg = text.split(sep, 1)
                return cls(name, float(arg.rstrip(")")))
        return cls(text)

    @property
    def is_dp(self) -> bool:
        return self.name.startswith("dp-")

    @property
    def scoring(self) -> ScoringSpec:
        return ScoringSpec(self.name[3:], self.delta if self.name == "dp-q4" else 0.0)

    @property
    def label(self) -> str:
        up = self.name.upper()
        return f"{up}({self.delta:g})" if self.name == "dp-q4" else up

    def __str__(self):
        return self.label


def initial_partition(data: WeightedSample, K: int, method: Method) -> BlockPartition:
    if method.name == "eq":
        return quantile_partition(data, K)
    if method.name == "hclu-c":
        return hierarchical_partition(data, K, "complete")
    if method.name == "hclu-a":
        return hierarchical_partition(data, K, "average")
    return dp_partition(data, K, method.scoring)[0]


def fit(data: WeightedSample, K: int, method: Method, config: EmConfig = SIMULATION_PROFILE) -> FitResult:
    """Partition with ``method``, convert blocks to initial parameters, run EM."""
    part = initial_partition(data, K, method)
    init = blocks_to_params(data, part, config.sigma_min)
    return run_em(data, init, config)


def partitions_for_range(data: WeightedSample, ks, method: Method) -> dict:
    """Initial partitions for several K; DP methods share one Bellman table.

    Values are partitions or the exception raised for that K.
    """
    ks = sorted(set(int(k) for k in ks))
    out = {}
    table = None
    if method.is_dp:
        try:
            table = PartitionTable(data, max(ks), method.scoring)
        except Exception as exc:  # noqa: BLE001 - reported per K
            return {k: exc for k in ks}
    for k in ks:
        try:
            out[k] = table.partition(k)[0] if table is not None else initial_partition(data, k, method)
        except Exception as exc:  # noqa: BLE001
            out[k] = exc
    return out
