"""Output files of a run: summary.csv, verdicts.txt, membership.csv, profile_*.dat."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .seminorms import ConvergenceReport, Verdict, _fmt

SUMMARY_COLUMNS = ["suite", "seminorm_family", "gamma", "k", "L", "M", "distance", "verdict"]
MEMBERSHIP_COLUMNS = ["operator_id", "alpha_star", "theta_hat", "n_max", "bound", "passed"]


@dataclass
class RunResults:
    """Everything a run produces, in emission order."""

    summary: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)   # (suite tag, Verdict)
    membership: list = field(default_factory=list)
    profiles: dict = field(default_factory=dict)   # name -> [(x, y)]

    def add_report(self, suite, rep: ConvergenceReport, profile=True):
        self.summary.extend([suite] + row for row in rep.csv_rows())
        if profile:
            name = f"{suite}_{rep.label or rep.family}"
            self.profiles[name] = rep.adjacent_profile()

    def add_verdict(self, suite, v: Verdict):
        self.verdicts.append((suite, v))

    @property
    def failures(self) -> list:
        return [(s, v) for s, v in self.verdicts if v.asserted and not v.passed]

    def extend(self, other: "RunResults"):
        self.summary.extend(other.summary)
        self.verdicts.extend(other.verdicts)
        self.membership.extend(other.membership)
        self.profiles.update(other.profiles)


def _stamp(command) -> str:
    now = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return f"# regdyn {command} generated {now}\n"


def safe_name(name) -> str:
    return re.sub(r"[^A-Za-z0-9_.=+-]+", "_", name).strip("_")


def write_all(results: RunResults, out_dir, command="run") -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}

    p = out / "summary.csv"
    with p.open("w", newline="") as fh:
        fh.write(_stamp(command))
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        w.writerows(results.summary)
    paths["summary"] = p

    p = out / "verdicts.txt"
    with p.open("w") as fh:
        for suite, v in results.verdicts:
            fh.write(f"{suite} {v.line()}\n")
    paths["verdicts"] = p

    if results.membership:
        p = out / "membership.csv"
        with p.open("w", newline="") as fh:
            fh.write(_stamp(command))
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(MEMBERSHIP_COLUMNS)
            w.writerows(results.membership)
        paths["membership"] = p

    for name, series in results.profiles.items():
        p = out / f"profile_{safe_name(name)}.dat"
        with p.open("w") as fh:
            for x, y in series:
                fh.write(f"{x} {_fmt(y)}\n")
        paths[f"profile:{name}"] = p
    return paths


def membership_row(rec, n_max, bound, passed):
    return [rec.operator_id, _fmt(rec.alpha_star), _fmt(rec.theta_hat), str(n_max), _fmt(bound),
            "true" if passed else "false"]


def csv_body(path) -> str:
    """File contents without the timestamp header line."""
    lines = Path(path).read_text().splitlines(keepends=True)
    return "".join(line for line in lines if not line.startswith("# regdyn "))
