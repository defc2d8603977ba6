"""Deterministic report serialization.

All floating-point values are printed with 17 significant digits in
lowercase scientific notation so that repeated runs of the same
configuration produce byte-identical output.  JSON is emitted by a small
writer that preserves insertion order and uses the same float format;
CSV quoting is delegated to the standard library with a fixed dialect.
"""

from __future__ import annotations

import csv
import io
import json as _json
import math
from xml.sax.saxutils import escape as _xml_escape

SCHEMA = "so4lab/1"

__all__ = ["SCHEMA", "fmt_float", "emit_json", "emit_csv", "levels_svg"]


def fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return '"nan"' if math.isnan(x) else ('"inf"' if x > 0 else '"-inf"')
    return f"{x:.16e}"


def _emit(value, out: list[str], indent: int) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        items = list(value.items())
        for i, (k, v) in enumerate(items):
            out.append(f'{pad}  {_json.dumps(str(k))}: ')
            _emit(v, out, indent + 1)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not len(value):
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(value):
            out.append(pad + "  ")
            _emit(v, out, indent + 1)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(value, bool):
        out.append("true" if value else "false")
    elif value is None:
        out.append("null")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(fmt_float(value))
    else:
        out.append(_json.dumps(str(value)))


def emit_json(payload: dict) -> str:
    out: list[str] = []
    _emit(payload, out, 0)
    out.append("\n")
    return "".join(out)


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, float):
        return fmt_float(value)
    return str(value)


def emit_csv(columns: list[str], rows: list[list], footer_comments: list[str] | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    text = buf.getvalue()
    for line in footer_comments or []:
        text += f"# {line}\n"
    return text


def levels_svg(
    point_rows: list[dict],
    monopole_rows: list[dict],
    q: float,
    title: str = "",
) -> str:
    """Two-column level diagram as a standalone SVG document.

    Each row dict needs keys `label`, `energy` (E/M) and, for the
    monopolar column, `depression`.  Slots are rank-ordered by energy so
    nearly degenerate fine-structure levels remain visually separated;
    the printed values carry the actual numbers.
    """
    width, height = 720.0, 120.0 + 44.0 * max(len(point_rows), len(monopole_rows), 1)
    top, bottom = 70.0, height - 40.0
    nslots = max(len(point_rows), len(monopole_rows), 1)

    def slot_y(rank: int) -> float:
        if nslots == 1:
            return bottom
        return bottom - rank * (bottom - top) / (nslots - 1)

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">'
    )
    parts.append('<rect width="100%" height="100%" fill="white"/>')
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="28" text-anchor="middle" '
            f'font-family="monospace" font-size="15">{_xml_escape(title)}</text>'
        )
    columns = (
        (180.0, "q = 0", point_rows),
        (540.0, f"q = {q:g}", monopole_rows),
    )
    for x, head, rows in columns:
        parts.append(
            f'<text x="{x:.1f}" y="50" text-anchor="middle" '
            f'font-family="monospace" font-size="13">{_xml_escape(head)}</text>'
        )
        ordered = sorted(rows, key=lambda r: r["energy"])
        for rank, row in enumerate(ordered):
            y = slot_y(rank)
            parts.append(
                f'<line x1="{x - 70:.1f}" y1="{y:.1f}" x2="{x + 70:.1f}" y2="{y:.1f}" '
                f'stroke="black" stroke-width="1.5"/>'
            )
            parts.append(
                f'<text x="{x - 78:.1f}" y="{y + 4:.1f}" text-anchor="end" '
                f'font-family="monospace" font-size="12">{_xml_escape(str(row["label"]))}</text>'
            )
            note = f'E/M = {fmt_float(float(row["energy"]))}'
            if "depression" in row:
                note += f'  depression = {fmt_float(float(row["depression"]))}'
            parts.append(
                f'<text x="{x + 78:.1f}" y="{y + 4:.1f}" text-anchor="start" '
                f'font-family="monospace" font-size="10">{_xml_escape(note)}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
