"""Run results and their JSON / CSV forms."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

SCHEMA_VERSION = 1
CSV_FIELDS = ("theta", "T", "fidelity_sim", "fidelity_pred", "q_estimate")


@dataclass
class SeriesPoint:
    T: int
    fidelity_sim: float
    fidelity_pred: float | None = None
    theta: float | None = None
    q_estimate: float | None = None
    stderr: float | None = None

    def __post_init__(self):
        # plain Python numbers so repr() round-trips through CSV and JSON
        self.T = int(self.T)
        for name in ("fidelity_sim", "fidelity_pred", "theta", "q_estimate", "stderr"):
            v = getattr(self, name)
            if v is not None:
                setattr(self, name, float(v))

    def as_dict(self) -> dict:
        d = {"theta": self.theta, "T": self.T, "fidelity_sim": self.fidelity_sim,
             "fidelity_pred": self.fidelity_pred, "q_estimate": self.q_estimate}
        if self.stderr is not None:
            d["stderr"] = self.stderr
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SeriesPoint":
        return cls(
            T=int(d["T"]),
            fidelity_sim=d["fidelity_sim"],
            fidelity_pred=d.get("fidelity_pred"),
            theta=d.get("theta"),
            q_estimate=d.get("q_estimate"),
            stderr=d.get("stderr"),
        )


@dataclass
class RunResult:
    experiment: str
    config: dict
    seed: int | None
    series: list[SeriesPoint] = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    shots: int | None = None
    wall_time: float = 0.0
    # final reduced states keyed by (theta, T); kept in memory only
    states: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.sort()

    def sort(self) -> None:
        # grid order: by theta (when present), then T
        self.series.sort(key=lambda p: (-math.inf if p.theta is None else p.theta, p.T))

    def validate(self) -> None:
        for p in self.series:
            if not -1e-12 <= p.fidelity_sim <= 1 + 1e-12:
                raise ValueError(f"fidelity {p.fidelity_sim} outside [0, 1]")

    @property
    def fidelities(self) -> list[float]:
        return [p.fidelity_sim for p in self.series]

    @property
    def predictions(self) -> list[float | None]:
        return [p.fidelity_pred for p in self.series]

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "config": self.config,
            "seed": self.seed,
            "series": [p.as_dict() for p in self.series],
            "counts": self.counts,
            "shots": self.shots,
            "wall_time": self.wall_time,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunResult":
        d = json.loads(text)
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {d.get('schema_version')!r}")
        return cls(
            experiment=d["experiment"],
            config=d["config"],
            seed=d["seed"],
            series=[SeriesPoint.from_dict(p) for p in d["series"]],
            counts=d.get("counts", {}),
            shots=d.get("shots"),
            wall_time=d.get("wall_time", 0.0),
        )

    def to_csv(self) -> str:
        return write_csv_rows([p.as_dict() for p in self.series])

    def write(self, out_dir, stem: str | None = None) -> tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = stem or self.experiment
        jp, cp = out / f"{stem}.json", out / f"{stem}.csv"
        jp.write_text(self.to_json())
        cp.write_text(self.to_csv())
        return jp, cp


def read_csv(text: str) -> list[dict]:
    """Parse a series CSV back into dicts (empty cells become ``None``)."""
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for r in rows:
        d = {}
        for k in CSV_FIELDS:
            v = r[k]
            if v == "":
                d[k] = None
            elif k == "T":
                d[k] = int(v)
            else:
                d[k] = float(v)
        out.append(d)
    return out


def write_csv_rows(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for d in rows:
        w.writerow(["" if d[k] is None else repr(d[k]) for k in CSV_FIELDS])
    return buf.getvalue()
