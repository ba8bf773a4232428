"""Gantt charts as SVG 1.1 documents and as aligned plain text."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple
from xml.sax.saxutils import escape

from .instance import Instance
from .solver.schedule import Schedule

PALETTE = ("#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1", "#9c755f")


@dataclass(frozen=True)
class Bar:
    activity: int
    start: int
    end: int
    level: int = 0  # stacking position inside a resource row


@dataclass(frozen=True)
class Row:
    label: str
    bars: Tuple[Bar, ...]


def _present(sched: Schedule, inst: Optional[Instance]):
    skip = set()
    if inst is not None:
        skip = {inst.network.source_id, inst.network.sink_id}
        skip |= {j for j in sched.slots if j not in inst.network.activities}
    for j, s in sorted(sched.slots.items()):
        if s.present and j not in skip and s.start is not None and s.end is not None:
            yield j, s


def rows_by_lot(sched: Schedule, inst: Optional[Instance] = None) -> List[Row]:
    """One row per lot; without an instance one row per activity."""
    if inst is None:
        return [Row(f"act {j}", (Bar(j, s.start, s.end),)) for j, s in _present(sched, None)]
    groups: Dict[int, List[Bar]] = {}
    acts = inst.network.activities
    for j, s in _present(sched, inst):
        lot = acts[j].lot if acts[j].lot is not None else 0
        groups.setdefault(lot, []).append(Bar(j, s.start, s.end))
    return [Row(f"lot {l}", tuple(sorted(b, key=lambda x: (x.start, x.activity))))
            for l, b in sorted(groups.items())]


def rows_by_resource(sched: Schedule, inst: Instance) -> List[Row]:
    """One row per renewable resource; overlapping bars are stacked on free levels."""
    acts = inst.network.activities
    out = []
    for r in inst.renewable_ids:
        users = sorted((s.start, s.end, j) for j, s in _present(sched, inst)
                       if acts[j].demands.get(r, 0) > 0)
        level_end: List[int] = []
        bars = []
        for start, end, j in users:
            lvl = next((k for k, e in enumerate(level_end) if e <= start), len(level_end))
            if lvl == len(level_end):
                level_end.append(end)
            else:
                level_end[lvl] = end
            bars.append(Bar(j, start, end, lvl))
        out.append(Row(f"r{r} (C={inst.capacities[r]})", tuple(bars)))
    return out


def _span(rows: List[Row]) -> int:
    return max((b.end for row in rows for b in row.bars), default=0)


def render_text(rows: List[Row], width: int = 72) -> str:
    """Bars drawn with alternating fill characters, followed by an id legend per row."""
    if not rows:
        return "(empty schedule)\n"
    horizon = max(_span(rows), 1)
    scale = min(1.0, width / horizon)
    label_w = max(len(r.label) for r in rows)
    cols = max(1, int(round(horizon * scale)))
    lines = [f"{'':{label_w}} |0{'':{max(0, cols - len(str(horizon)) - 1)}}{horizon}"]
    for row in rows:
        depth = max((b.level for b in row.bars), default=0) + 1
        for lvl in range(depth):
            cells = [" "] * cols
            mine = [b for b in row.bars if b.level == lvl]
            for k, b in enumerate(mine):
                lo = int(b.start * scale)
                hi = max(lo + 1, int(round(b.end * scale))) if b.end > b.start else lo
                for c in range(lo, min(hi, cols)):
                    cells[c] = "#=" [k % 2]
                if b.end == b.start and lo < cols:
                    cells[lo] = "|"
            name = row.label if lvl == 0 else ""
            lines.append(f"{name:{label_w}} |{''.join(cells)}|")
        legend = " ".join(f"{b.activity}[{b.start},{b.end})" for b in sorted(row.bars, key=lambda x: (x.start, x.activity)))
        lines.append(f"{'':{label_w}}  {legend}")
    return "\n".join(lines) + "\n"


def render_svg(rows: List[Row], title: str = "", px_per_unit: Optional[float] = None) -> str:
    horizon = max(_span(rows), 1)
    unit = px_per_unit or max(0.2, min(24.0, 960.0 / horizon))
    label_w, bar_h, pad, top = 110, 18, 4, 34
    heights = [(max((b.level for b in r.bars), default=0) + 1) * (bar_h + pad) + pad for r in rows]
    width = int(label_w + horizon * unit + 20)
    height = int(top + sum(heights) + 24)
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="11">',
        f'<title>{escape(title or "schedule")}</title>',
        f'<text x="4" y="16" font-size="13">{escape(title)}</text>',
    ]
    y = top
    for row, h in zip(rows, heights):
        out.append(f'<text x="4" y="{y + bar_h - 4}">{escape(row.label)}</text>')
        out.append(f'<line x1="{label_w}" y1="{y + h}" x2="{width - 10}" y2="{y + h}" stroke="#ccc"/>')
        for b in row.bars:
            x = label_w + b.start * unit
            w = max(1.0, (b.end - b.start) * unit)
            by = y + pad + b.level * (bar_h + pad)
            color = PALETTE[b.activity % len(PALETTE)]
            out.append(f'<rect x="{x:.2f}" y="{by}" width="{w:.2f}" height="{bar_h}" fill="{color}" '
                       f'stroke="#333" stroke-width="0.5"><title>{b.activity}: [{b.start}, {b.end})</title></rect>')
            if w >= 7 * len(str(b.activity)):
                out.append(f'<text x="{x + 2:.2f}" y="{by + bar_h - 5}" fill="#fff">{b.activity}</text>')
        y += h
    axis_y = y + 14
    step = max(1, _nice_step(horizon))
    for t in range(0, horizon + 1, step):
        out.append(f'<text x="{label_w + t * unit:.2f}" y="{axis_y}" font-size="9">{t}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _nice_step(horizon: int) -> int:
    for step in (1, 2, 5, 10, 20, 50, 100, 200, 500, 1000):
        if horizon / step <= 12:
            return step
    return 2000
