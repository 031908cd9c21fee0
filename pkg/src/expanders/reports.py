"""Result containers: residual ladders, annulus tables, JSON/CSV round trips.

All serialization is deterministic: dictionaries are dumped with sorted keys
and floats keep full repr precision, so identical inputs produce identical
bytes and parse back to identical values.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np


def fit_loglog_slope(x, y, floor: float = 1e-300) -> float:
    """Least-squares slope of log(y) against log(x).

    Values of y below the floor are clipped so identically-zero ladders stay
    finite (they fit to slope 0).
    """
    x = np.asarray(x, dtype=float)
    y = np.maximum(np.asarray(y, dtype=float), floor)
    if x.size < 2:
        raise ValueError("slope fit needs at least two points")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def dyadic_annuli(r_min: float, count: int) -> list[tuple[float, float]]:
    """Annuli [r_min 2^k, r_min 2^(k+1)) for k = 0..count-1."""
    if r_min <= 0 or count < 1:
        raise ValueError("need r_min > 0 and count >= 1")
    return [(r_min * 2.0**k, r_min * 2.0 ** (k + 1)) for k in range(count)]


@dataclass
class ResidualSample:
    """Residual norms of one quantity on one grid."""

    name: str
    spacing: float
    sup: float
    l2: float
    field: np.ndarray | None = None

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "spacing": float(self.spacing),
            "sup": float(self.sup),
            "l2": float(self.l2),
        }


@dataclass
class ResidualReport:
    """Residual norms of one identity across a refinement ladder.

    ``resolutions`` lists grid spacings, coarsest first.  ``fitted_order`` is
    the least-squares slope of log(sup) against log(spacing);
    ``fitted_order_l2`` the same for the root-mean-square norm.
    """

    identity_name: str
    resolutions: list[float]
    sup_residuals: list[float]
    l2_residuals: list[float]
    fitted_order: float
    fitted_order_l2: float

    @classmethod
    def from_samples(cls, name: str, samples: list[ResidualSample]) -> "ResidualReport":
        if len(samples) < 2:
            raise ValueError("a residual report needs at least two resolutions")
        samples = sorted(samples, key=lambda s: -s.spacing)
        spacings = [float(s.spacing) for s in samples]
        sups = [float(s.sup) for s in samples]
        l2s = [float(s.l2) for s in samples]
        return cls(
            identity_name=name,
            resolutions=spacings,
            sup_residuals=sups,
            l2_residuals=l2s,
            fitted_order=fit_loglog_slope(spacings, sups),
            fitted_order_l2=fit_loglog_slope(spacings, l2s),
        )

    def validate(self) -> None:
        k = len(self.resolutions)
        if k < 2 or len(self.sup_residuals) != k or len(self.l2_residuals) != k:
            raise ValueError("report lists must have equal length >= 2")
        if not (math.isfinite(self.fitted_order) and math.isfinite(self.fitted_order_l2)):
            raise ValueError("fitted orders must be finite")

    def to_json_dict(self) -> dict:
        return {
            "identity_name": self.identity_name,
            "resolutions": [float(v) for v in self.resolutions],
            "sup_residuals": [float(v) for v in self.sup_residuals],
            "l2_residuals": [float(v) for v in self.l2_residuals],
            "fitted_order": float(self.fitted_order),
            "fitted_order_l2": float(self.fitted_order_l2),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ResidualReport":
        rep = cls(
            identity_name=d["identity_name"],
            resolutions=list(d["resolutions"]),
            sup_residuals=list(d["sup_residuals"]),
            l2_residuals=list(d["l2_residuals"]),
            fitted_order=float(d["fitted_order"]),
            fitted_order_l2=float(d["fitted_order_l2"]),
        )
        rep.validate()
        return rep

    def csv_rows(self) -> list[list]:
        return [
            [self.identity_name, h, s, l]
            for h, s, l in zip(self.resolutions, self.sup_residuals, self.l2_residuals)
        ]


RESIDUAL_CSV_HEADER = ["identity", "spacing", "sup", "l2"]


@dataclass
class AnnulusRow:
    quantity: str
    r_min: float
    r_max: float
    sup: float
    l2: float


@dataclass
class AnnulusReport:
    """Per-annulus sup/l2 of several quantities plus log-log slope fits."""

    rows: list[AnnulusRow]
    fitted_slopes: dict[str, float] = field(default_factory=dict)

    def quantities(self) -> list[str]:
        seen: list[str] = []
        for row in self.rows:
            if row.quantity not in seen:
                seen.append(row.quantity)
        return seen

    def sups(self, quantity: str) -> list[float]:
        return [r.sup for r in self.rows if r.quantity == quantity]

    def monotone_nonincreasing(self, quantity: str, slack: float = 1e-12) -> bool:
        vals = self.sups(quantity)
        return all(b <= a * (1 + 1e-9) + slack for a, b in zip(vals, vals[1:]))

    @classmethod
    def build(cls, quantity_sups: dict[str, list[tuple[tuple[float, float], float, float]]]):
        """Assemble from {quantity: [((r0, r1), sup, l2), ...]} and fit slopes."""
        rows = []
        slopes = {}
        for q, entries in quantity_sups.items():
            mids = []
            sups = []
            for (r0, r1), sup, l2 in entries:
                rows.append(AnnulusRow(q, float(r0), float(r1), float(sup), float(l2)))
                mids.append(math.sqrt(r0 * r1))
                sups.append(sup)
            if len(mids) >= 2:
                slopes[q] = fit_loglog_slope(mids, sups)
        return cls(rows=rows, fitted_slopes=slopes)

    def to_json_list(self) -> list[dict]:
        return [
            {
                "annulus": [row.r_min, row.r_max],
                "quantity": row.quantity,
                "sup": row.sup,
                "l2": row.l2,
                "fitted_slope": self.fitted_slopes.get(row.quantity, float("nan")),
            }
            for row in self.rows
        ]

    @classmethod
    def from_json_list(cls, items: list[dict]) -> "AnnulusReport":
        rows = [
            AnnulusRow(d["quantity"], d["annulus"][0], d["annulus"][1], d["sup"], d["l2"])
            for d in items
        ]
        slopes = {}
        for d in items:
            if math.isfinite(d.get("fitted_slope", float("nan"))):
                slopes[d["quantity"]] = d["fitted_slope"]
        return cls(rows=rows, fitted_slopes=slopes)


def dumps_json(obj) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def write_csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def read_csv_text(text: str) -> tuple[list[str], list[list[str]]]:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    return rows[0], rows[1:]
