"""CSV, plot and manifest output."""

from __future__ import annotations

import datetime as _dt
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import __version__
from .params import FlowParameters

TIMESTAMP_PREFIX = "# generated: "


def _num(x: float) -> str:
    # repr of a Python float is the shortest string that round-trips
    return repr(float(x))


def header_lines(params: FlowParameters | None = None, meta: Mapping[str, object] | None = None,
                 timestamp: bool = True) -> list[str]:
    lines = [f"# peristaltic {__version__}"]
    if timestamp:
        now = _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0)
        lines.append(TIMESTAMP_PREFIX + now.isoformat())
    for key, value in (meta or {}).items():
        lines.append(f"# {key}: {value}")
    if params is not None:
        for key, value in params.as_config().items():
            lines.append(f"# {key} = {_num(value)}")
    return lines


def write_csv(path: str | Path, columns: Sequence[str], rows: Iterable[Sequence[float]],
              params: FlowParameters | None = None, meta: Mapping[str, object] | None = None,
              timestamp: bool = True) -> Path:
    """Header comments, a column line, then full-precision rows, ``\\n`` terminated."""
    path = Path(path)
    lines = header_lines(params, meta, timestamp)
    lines.append(",".join(columns))
    lines.extend(",".join(_num(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", newline="\n")
    return path


def read_csv(path: str | Path) -> tuple[dict[str, str], list[str], list[list[float]]]:
    """Inverse of :func:`write_csv`: (header metadata, column names, rows)."""
    meta: dict[str, str] = {}
    columns: list[str] = []
    rows: list[list[float]] = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            for sep in (" = ", ": "):
                if sep in body:
                    key, value = body.split(sep, 1)
                    meta[key.strip()] = value.strip()
                    break
        elif not columns:
            columns = line.split(",")
        elif line:
            rows.append([float(v) for v in line.split(",")])
    return meta, columns, rows


def strip_timestamp(text: str) -> str:
    return "".join(line for line in text.splitlines(keepends=True)
                   if not line.startswith(TIMESTAMP_PREFIX))


def safe_name(label: str) -> str:
    """File-name fragment for a curve label: ``dp2=-2.5`` -> ``dp2m2.5``."""
    text = label.replace("=", "").replace("-", "m")
    return re.sub(r"[^A-Za-z0-9_.+]+", "_", text).strip("_")


def write_line_plot(path: str | Path, curves: Sequence[tuple[str, Sequence[float], Sequence[float]]],
                    xlabel: str, ylabel: str, title: str = "") -> Path:
    """Static SVG line plot; no display needed."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    with matplotlib.rc_context({"svg.hashsalt": "peristaltic", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.0, 4.2))
        for label, x, y in curves:
            ax.plot(x, y, label=label, linewidth=1.4)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title, fontsize=9)
        if len(curves) > 1:
            ax.legend(fontsize=8)
        ax.grid(True, linewidth=0.3, alpha=0.6)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path


@dataclass
class OutputBundle:
    outdir: Path
    csv_paths: list[Path] = field(default_factory=list)
    plot_paths: list[Path] = field(default_factory=list)
    report_path: Path | None = None
    run_metadata: dict = field(default_factory=dict)

    def write_manifest(self) -> Path:
        rel = lambda p: str(Path(p).relative_to(self.outdir))  # noqa: E731
        manifest = {
            "csv": [rel(p) for p in self.csv_paths],
            "plots": [rel(p) for p in self.plot_paths],
            "report": rel(self.report_path) if self.report_path else None,
            "metadata": self.run_metadata,
        }
        path = self.outdir / "manifest.json"
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
        return path
