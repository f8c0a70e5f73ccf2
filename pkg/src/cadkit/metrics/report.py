"""Per-sample metric records and benchmark-table aggregation."""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import asdict, dataclass, field
from typing import Optional

from ..errors import AllInvalidError


@dataclass(frozen=True)
class SampleMetrics:
    sample_id: str
    valid: bool
    cd: Optional[float] = None
    f1: Optional[float] = None
    iou: Optional[float] = None


@dataclass(frozen=True)
class AggregateMetrics:
    cd_median_x1e3: float
    cd_mean_x1e3: float
    f1_median: float
    iou_median: float
    invalid_rate_percent: float
    valid_count: int
    total_count: int

    def format_lines(self) -> list[str]:
        """Benchmark-table style: CD x10^3 to 3 decimals, IR to 2 decimals."""
        return [
            f"Median CD x10^3: {self.cd_median_x1e3:.3f}",
            f"Mean CD x10^3:   {self.cd_mean_x1e3:.3f}",
            f"Median F1:       {self.f1_median:.4f}",
            f"Median IoU:      {self.iou_median:.4f}",
            f"Invalid Rate:    {self.invalid_rate_percent:.2f}",
        ]


@dataclass(frozen=True)
class MetricsReport:
    per_sample: tuple[SampleMetrics, ...]
    aggregate: AggregateMetrics
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "per_sample": [asdict(s) for s in self.per_sample],
            "aggregate": asdict(self.aggregate),
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["sample_id", "valid", "cd", "f1", "iou"])
        writer.writeheader()
        for sample in self.per_sample:
            writer.writerow(asdict(sample))
        return buf.getvalue()


def invalid_rate(results) -> float:
    """Percentage of samples that failed to execute.

    Accepts booleans (executed?) or mappings/objects with an `executed` flag.
    """
    flags = [_executed(r) for r in results]
    if not flags:
        raise ValueError("empty result list")
    failures = sum(1 for ok in flags if not ok)
    return 100.0 * failures / len(flags)


def _executed(result) -> bool:
    if isinstance(result, bool):
        return result
    if isinstance(result, dict):
        return bool(result["executed"])
    return bool(result.executed)


def aggregate(per_sample, config: Optional[dict] = None) -> MetricsReport:
    """Median/mean CD (x10^3), median F1/IoU over valid samples; IR over all.

    Medians of even-length lists are the mean of the two central values.
    """
    samples = tuple(per_sample)
    if not samples:
        raise ValueError("empty sample list")
    valid = [s for s in samples if s.valid]
    if not valid:
        raise AllInvalidError("no valid samples; geometric aggregates undefined")
    cds = [s.cd for s in valid]
    f1s = [s.f1 for s in valid]
    ious = [s.iou for s in valid]
    if any(v is None for v in cds + f1s + ious):
        raise ValueError("valid samples must carry cd, f1 and iou")
    agg = AggregateMetrics(
        cd_median_x1e3=statistics.median(cds) * 1e3,
        cd_mean_x1e3=statistics.fmean(cds) * 1e3,
        f1_median=statistics.median(f1s),
        iou_median=statistics.median(ious),
        invalid_rate_percent=100.0 * (len(samples) - len(valid)) / len(samples),
        valid_count=len(valid),
        total_count=len(samples),
    )
    return MetricsReport(per_sample=samples, aggregate=agg, config=dict(config or {}))
