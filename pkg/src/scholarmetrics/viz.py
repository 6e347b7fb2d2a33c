"""Chart-spec construction and deterministic SVG rendering for any
AnalysisResult, plus CSV export.

build_chart_spec resolves options against a result (year window, gap or
decade re-binning, top-count truncation, log-scale row dropping) into a
self-contained ChartSpec; render_svg turns a spec into a byte-stable SVG
1.1 document on a fixed 1200x800 canvas. PNG/JPEG rasterization is the
browser UI's job.
"""

import csv
import io
import math
import re
from dataclasses import dataclass, field, replace
from xml.sax.saxutils import escape

import numpy as np

from . import _data
from .errors import IncompatibleChartType, InvalidOptions
from .result import AnalysisResult, format_cell, parse_cell

CHART_TYPES = ("bar", "line", "pie", "doughnut", "box", "violin", "swarm",
               "scatter", "stack", "wordcloud", "network", "worldmap")

CANVAS_W, CANVAS_H = 1200, 800

_HEX_RE = re.compile(r"^#?([0-9a-fA-F]{6})$")

# swatch palette for multi-series charts; options colors take the lead slots
_EXTRA_PALETTE = ("#8172b3", "#937860", "#da8bc3", "#8c8c8c", "#ccb974",
                  "#64b5cd", "#4c72b0", "#dd8452", "#55a868", "#c44e52")


@dataclass(frozen=True)
class LabelOptions:
    x_label: str | None = None
    y_label: str | None = None
    fontsize: int = 14


@dataclass(frozen=True)
class TitleOptions:
    text: str | None = None
    fontsize: int = 18
    visible: bool = True


@dataclass(frozen=True)
class TickOptions:
    fontsize: int = 11
    rotation_degrees: int = 0


@dataclass(frozen=True)
class ColorOptions:
    bar: str = "#4c72b0"
    border: str = "#2a3f5f"
    line: str = "#dd8452"
    marker: str = "#55a868"


@dataclass(frozen=True)
class ChartOptions:
    chart_type: str
    start_year: int | None = None
    end_year: int | None = None
    year_gap: int = 1
    orientation: str = "vertical"
    x_scale: str = "linear"
    y_scale: str = "linear"
    top_count: int | None = None
    period: str = "yearwise"
    labels: LabelOptions = field(default_factory=LabelOptions)
    title: TitleOptions = field(default_factory=TitleOptions)
    ticks: TickOptions = field(default_factory=TickOptions)
    colors: ColorOptions = field(default_factory=ColorOptions)
    grid_visible: bool = True
    legend_visible: bool = True

    def validate(self):
        if self.chart_type not in CHART_TYPES:
            raise InvalidOptions(f"unknown chart_type {self.chart_type!r}")
        if self.start_year is not None and self.end_year is not None \
                and self.start_year > self.end_year:
            raise InvalidOptions("start_year must be <= end_year")
        if not 1 <= self.year_gap <= 5:
            raise InvalidOptions("year_gap must be in 1..5")
        if self.orientation not in ("vertical", "horizontal"):
            raise InvalidOptions(f"bad orientation {self.orientation!r}")
        if self.x_scale not in ("linear", "log") or self.y_scale not in ("linear", "log"):
            raise InvalidOptions("scales must be linear or log")
        if self.top_count is not None and self.top_count < 1:
            raise InvalidOptions("top_count must be >= 1")
        if self.period not in ("yearwise", "decadewise"):
            raise InvalidOptions(f"bad period {self.period!r}")
        for name in ("bar", "border", "line", "marker"):
            if not _HEX_RE.match(getattr(self.colors, name)):
                raise InvalidOptions(f"color {name} must be a 6-digit hex string")
        for fs in (self.labels.fontsize, self.title.fontsize, self.ticks.fontsize):
            if fs <= 0:
                raise InvalidOptions("font sizes must be positive")

    def normalized_colors(self) -> "ColorOptions":
        def norm(c):
            return "#" + _HEX_RE.match(c).group(1).lower()
        return ColorOptions(bar=norm(self.colors.bar), border=norm(self.colors.border),
                            line=norm(self.colors.line), marker=norm(self.colors.marker))

    def to_dict(self) -> dict:
        return {
            "chart_type": self.chart_type,
            "start_year": self.start_year,
            "end_year": self.end_year,
            "year_gap": self.year_gap,
            "orientation": self.orientation,
            "x_scale": self.x_scale,
            "y_scale": self.y_scale,
            "top_count": self.top_count,
            "period": self.period,
            "labels": {"x_label": self.labels.x_label, "y_label": self.labels.y_label,
                       "fontsize": self.labels.fontsize},
            "title": {"text": self.title.text, "fontsize": self.title.fontsize,
                      "visible": self.title.visible},
            "ticks": {"fontsize": self.ticks.fontsize,
                      "rotation_degrees": self.ticks.rotation_degrees},
            "colors": {"bar": self.colors.bar, "border": self.colors.border,
                       "line": self.colors.line, "marker": self.colors.marker},
            "grid_visible": self.grid_visible,
            "legend_visible": self.legend_visible,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ChartOptions":
        def sub(cls_, key):
            return cls_(**d[key]) if isinstance(d.get(key), dict) else cls_()
        known = {"chart_type", "start_year", "end_year", "year_gap", "orientation",
                 "x_scale", "y_scale", "top_count", "period", "grid_visible",
                 "legend_visible"}
        kwargs = {k: v for k, v in d.items() if k in known}
        if "chart_type" not in kwargs:
            raise InvalidOptions("chart_type is required")
        return cls(labels=sub(LabelOptions, "labels"), title=sub(TitleOptions, "title"),
                   ticks=sub(TickOptions, "ticks"), colors=sub(ColorOptions, "colors"),
                   **kwargs)


@dataclass(frozen=True)
class ChartSpec:
    options: ChartOptions
    data: AnalysisResult
    warnings: tuple = ()

    def to_json_dict(self) -> dict:
        return {
            "type": "chart_spec",
            "options": self.options.to_dict(),
            "data": self.data.to_dict(),
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ChartSpec":
        return cls(options=ChartOptions.from_dict(d["options"]),
                   data=AnalysisResult.from_dict(d["data"]),
                   warnings=tuple(d.get("warnings", ())))


def chart_compatibility(kind: str) -> tuple:
    return _data.chart_compatibility().get(kind, ())


# ---------------------------------------------------------------------------
# spec building

def build_chart_spec(result: AnalysisResult, options: ChartOptions) -> ChartSpec:
    """Resolve options against a result into a self-contained spec. The
    input result is never mutated."""
    options.validate()
    allowed = chart_compatibility(result.kind)
    if options.chart_type not in allowed:
        raise IncompatibleChartType(
            f"chart type {options.chart_type!r} not valid for {result.kind!r} "
            f"(allowed: {', '.join(allowed) or 'none'})")

    options = replace(options, colors=options.normalized_colors())
    rows = [tuple(list(v) if isinstance(v, list) else v for v in row)
            for row in result.rows]
    meta = dict(result.meta)
    warnings = []
    label_kind = meta.get("label_kind")

    if label_kind in ("year", "year_bin", "decade") and \
            (options.start_year is not None or options.end_year is not None):
        lo = options.start_year if options.start_year is not None else -10**9
        hi = options.end_year if options.end_year is not None else 10**9
        before = len(rows)
        rows = [r for r in rows if _bin_inside(r[0], lo, hi)]
        if len(rows) < before:
            warnings.append(f"year window [{lo}, {hi}] dropped {before - len(rows)} row(s)")

    rebin = meta.get("rebin", "sum")
    if label_kind == "year" and options.period == "decadewise":
        rows = _rebin_years(rows, rebin, lambda y: (y // 10) * 10, str, warnings)
        meta["label_kind"] = "decade"
    elif label_kind == "year" and options.year_gap > 1:
        if rows:
            gap = options.year_gap
            lo = min(int(r[0]) for r in rows)
            rows = _rebin_years(
                rows, rebin,
                lambda y: lo + ((y - lo) // gap) * gap,
                lambda s: f"{s}-{s + gap - 1}",
                warnings)
            meta["label_kind"] = "year_bin"
            meta["year_gap"] = gap

    if options.top_count is not None and len(rows) > options.top_count:
        rows = rows[:options.top_count]

    if options.y_scale == "log" or (options.x_scale == "log"
                                    and options.chart_type == "scatter"):
        before = len(rows)
        rows = [r for r in rows if _all_positive(r[1:])]
        if len(rows) < before:
            warnings.append(f"log scale dropped {before - len(rows)} non-positive row(s)")
    if options.chart_type in ("pie", "doughnut"):
        before = len(rows)
        rows = [r for r in rows if all(v >= 0 for v in r[1:] if isinstance(v, (int, float)))]
        if len(rows) < before:
            warnings.append(f"pie charts dropped {before - len(rows)} negative row(s)")

    options = replace(
        options,
        labels=replace(options.labels,
                       x_label=options.labels.x_label or result.label_name,
                       y_label=options.labels.y_label or (result.columns[0] if result.columns else "value")),
        title=replace(options.title,
                      text=options.title.text if options.title.text is not None
                      else result.kind.replace("_", " ").title()),
    )
    data = AnalysisResult(kind=result.kind, columns=list(result.columns), rows=rows,
                          label_name=result.label_name, meta=meta)
    return ChartSpec(options=options, data=data, warnings=tuple(warnings))


def _bin_inside(label, lo, hi):
    m = re.match(r"^(\d{1,4})(?:-(\d{1,4}))?$", str(label))
    if not m:
        return True
    a = int(m.group(1))
    b = int(m.group(2)) if m.group(2) else a
    return lo <= a and b <= hi


def _all_positive(values):
    for v in values:
        if isinstance(v, list):
            if any(x <= 0 for x in v):
                return False
        elif v <= 0:
            return False
    return True


def _rebin_years(rows, rebin, bin_of, label_of, warnings):
    if not rows:
        return rows
    bins = {}
    order = []
    for row in rows:
        start = bin_of(int(row[0]))
        if start not in bins:
            bins[start] = []
            order.append(start)
        bins[start].append(row)
    if rebin == "mean":
        warnings.append("re-binning averaged already-aggregated values")
    out = []
    for start in order:
        group = bins[start]
        values = []
        for col in range(1, len(group[0])):
            cells = [r[col] for r in group]
            if isinstance(cells[0], list):
                merged = sorted(x for cell in cells for x in cell)
                values.append(merged)
            elif rebin == "last":
                values.append(cells[-1])
            elif rebin == "mean":
                values.append(sum(cells) / len(cells))
            else:
                values.append(sum(cells))
        out.append((label_of(start), *values))
    return out


# ---------------------------------------------------------------------------
# CSV export

def export_csv(result: AnalysisResult) -> bytes:
    """RFC-4180 CSV: header = label column + value columns, row order
    preserved, floats in shortest round-tripping form."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow([result.label_name, *result.columns])
    for row in result.rows:
        writer.writerow([row[0], *[format_cell(v) for v in row[1:]]])
    return buf.getvalue().encode("utf-8")


def result_from_csv(data: bytes, kind: str = "table", meta: dict | None = None) -> AnalysisResult:
    """Inverse of export_csv. meta['list_valued'] forces list cells so
    single-element lists survive the round trip."""
    meta = dict(meta or {})
    text = data.decode("utf-8-sig")
    reader = csv.reader(io.StringIO(text))
    table = [row for row in reader if row]
    if not table:
        return AnalysisResult(kind, [], [], "label", meta)
    header = table[0]
    list_valued = bool(meta.get("list_valued"))
    rows = []
    for raw in table[1:]:
        values = []
        for cell in raw[1:]:
            v = parse_cell(cell)
            if list_valued and not isinstance(v, list):
                v = [float(v)] if cell != "" else []
            values.append(v)
        rows.append((raw[0], *values))
    return AnalysisResult(kind, header[1:], rows, header[0] or "label", meta)


# ---------------------------------------------------------------------------
# SVG rendering

MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 120, 70, 90, 120
LEGEND_W = 230


def render_svg(spec: ChartSpec, background: str = "white") -> bytes:
    """Well-formed SVG 1.1, byte-identical for identical input. Transparent
    background simply omits the backdrop rect."""
    if background not in ("white", "transparent"):
        raise InvalidOptions("background must be white or transparent")
    opts = spec.options
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{CANVAS_W}" height="{CANVAS_H}" viewBox="0 0 {CANVAS_W} {CANVAS_H}">',
    ]
    if background == "white":
        parts.append(f'<rect x="0" y="0" width="{CANVAS_W}" height="{CANVAS_H}" fill="#ffffff"/>')
    if opts.title.visible and opts.title.text:
        parts.append(_text(CANVAS_W / 2, 50, opts.title.text, opts.title.fontsize,
                           anchor="middle", weight="bold"))

    legend = _legend_entries(spec)
    plot = _PlotArea(
        x=MARGIN_L, y=MARGIN_T,
        w=CANVAS_W - MARGIN_L - MARGIN_R - (LEGEND_W if legend and opts.legend_visible else 0),
        h=CANVAS_H - MARGIN_T - MARGIN_B,
    )

    if not spec.data.rows:
        parts.append(_frame(plot, opts))
        parts.append(_text(plot.x + plot.w / 2, plot.y + plot.h / 2, "no data",
                           20, anchor="middle", fill="#888888"))
    else:
        draw = _DRAWERS[opts.chart_type]
        parts.extend(draw(spec, plot))

    if legend and opts.legend_visible:
        parts.extend(_draw_legend(legend, plot, opts))
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode("utf-8")


@dataclass(frozen=True)
class _PlotArea:
    x: float
    y: float
    w: float
    h: float


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".") if isinstance(v, float) else str(v)


def _tick_label(v: float) -> str:
    return f"{v:g}"


def _text(x, y, content, fontsize, anchor="start", fill="#222222", weight="normal",
          rotate=None):
    transform = f' transform="rotate({rotate} {_fmt(x)} {_fmt(y)})"' if rotate else ""
    bold = ' font-weight="bold"' if weight == "bold" else ""
    return (f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{fontsize}" '
            f'font-family="Helvetica, Arial, sans-serif" text-anchor="{anchor}" '
            f'fill="{fill}"{bold}{transform}>{escape(str(content))}</text>')


def _frame(plot: _PlotArea, opts: ChartOptions):
    return (f'<rect x="{_fmt(plot.x)}" y="{_fmt(plot.y)}" width="{_fmt(plot.w)}" '
            f'height="{_fmt(plot.h)}" fill="none" stroke="{opts.colors.border}" '
            f'stroke-width="1"/>')


def _nice_ticks(lo: float, hi: float, target: int = 5):
    if hi <= lo:
        hi = lo + 1
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / target)) if span > 0 else 1
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= target:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9:
        ticks.append(round(t, 10))
        t += step
    return ticks


def _log_ticks(lo: float, hi: float):
    lo_e = math.floor(math.log10(lo))
    hi_e = math.ceil(math.log10(hi))
    return [10.0 ** e for e in range(lo_e, hi_e + 1)]


class _ValueScale:
    """Maps data values onto one pixel axis, linear or log10."""

    def __init__(self, lo, hi, pix_lo, pix_hi, log: bool):
        self.log = log
        if log:
            lo = max(lo, 1e-12)
            hi = max(hi, lo * 10)
            self.lo, self.hi = math.log10(lo), math.log10(hi)
        else:
            if hi <= lo:
                hi = lo + 1
            self.lo, self.hi = lo, hi
        self.pix_lo, self.pix_hi = pix_lo, pix_hi

    def __call__(self, v):
        x = math.log10(max(v, 1e-12)) if self.log else v
        frac = (x - self.lo) / (self.hi - self.lo)
        return self.pix_lo + frac * (self.pix_hi - self.pix_lo)

    def ticks(self):
        if self.log:
            return _log_ticks(10 ** self.lo, 10 ** self.hi)
        return _nice_ticks(self.lo, self.hi)


def _numeric_cells(rows):
    out = []
    for row in rows:
        for v in row[1:]:
            if isinstance(v, list):
                out.extend(v)
            else:
                out.append(v)
    return out


def _axes_categorical(spec, plot, labels, scale, opts, value_axis="y"):
    """Frame, grid, value-axis ticks and category labels for bar-family
    charts. value_axis names where the numbers go."""
    parts = [_frame(plot, opts)]
    rotation = opts.ticks.rotation_degrees or None
    if value_axis == "y":
        for tv in scale.ticks():
            y = scale(tv)
            if plot.y - 1 <= y <= plot.y + plot.h + 1:
                if opts.grid_visible:
                    parts.append(f'<line x1="{_fmt(plot.x)}" y1="{_fmt(y)}" '
                                 f'x2="{_fmt(plot.x + plot.w)}" y2="{_fmt(y)}" '
                                 f'stroke="#dddddd" stroke-width="1"/>')
                parts.append(_text(plot.x - 8, y + 4, _tick_label(tv), opts.ticks.fontsize,
                                   anchor="end"))
        band = plot.w / max(len(labels), 1)
        for i, label in enumerate(labels):
            cx = plot.x + (i + 0.5) * band
            parts.append(_text(cx, plot.y + plot.h + 22, label, opts.ticks.fontsize,
                               anchor="middle" if not rotation else "end",
                               rotate=-abs(rotation) if rotation else None))
        parts.append(_text(plot.x + plot.w / 2, CANVAS_H - 28, opts.labels.x_label,
                           opts.labels.fontsize, anchor="middle"))
        parts.append(_text(34, plot.y + plot.h / 2, opts.labels.y_label,
                           opts.labels.fontsize, anchor="middle", rotate=-90))
    else:
        for tv in scale.ticks():
            x = scale(tv)
            if plot.x - 1 <= x <= plot.x + plot.w + 1:
                if opts.grid_visible:
                    parts.append(f'<line x1="{_fmt(x)}" y1="{_fmt(plot.y)}" '
                                 f'x2="{_fmt(x)}" y2="{_fmt(plot.y + plot.h)}" '
                                 f'stroke="#dddddd" stroke-width="1"/>')
                parts.append(_text(x, plot.y + plot.h + 22, _tick_label(tv),
                                   opts.ticks.fontsize, anchor="middle"))
        band = plot.h / max(len(labels), 1)
        for i, label in enumerate(labels):
            cy = plot.y + (i + 0.5) * band
            parts.append(_text(plot.x - 8, cy + 4, label, opts.ticks.fontsize, anchor="end"))
        parts.append(_text(plot.x + plot.w / 2, CANVAS_H - 28, opts.labels.y_label,
                           opts.labels.fontsize, anchor="middle"))
        parts.append(_text(34, plot.y + plot.h / 2, opts.labels.x_label,
                           opts.labels.fontsize, anchor="middle", rotate=-90))
    return parts


def _first_values(rows):
    return [row[1] if not isinstance(row[1], list) else (row[1][0] if row[1] else 0)
            for row in rows]


def _draw_bar(spec, plot):
    opts = spec.options
    rows = spec.data.rows
    labels = [str(r[0]) for r in rows]
    values = _first_values(rows)
    vmax = max(values + [0])
    vmin = min(values + [0])
    horizontal = opts.orientation == "horizontal"
    log = opts.y_scale == "log"
    if horizontal:
        scale = _ValueScale(min(vmin, 0) if not log else min(values), vmax,
                            plot.x, plot.x + plot.w, log)
        parts = _axes_categorical(spec, plot, labels, scale, opts, value_axis="x")
        band = plot.h / len(rows)
        zero = scale(0) if not log else plot.x
        for i, v in enumerate(values):
            y = plot.y + i * band + band * 0.125
            x1 = min(zero, scale(v))
            parts.append(f'<rect x="{_fmt(x1)}" y="{_fmt(y)}" '
                         f'width="{_fmt(abs(scale(v) - zero))}" height="{_fmt(band * 0.75)}" '
                         f'fill="{opts.colors.bar}" stroke="{opts.colors.border}"/>')
        return parts
    scale = _ValueScale(min(vmin, 0) if not log else min(values), vmax,
                        plot.y + plot.h, plot.y, log)
    parts = _axes_categorical(spec, plot, labels, scale, opts)
    band = plot.w / len(rows)
    zero = scale(0) if not log else plot.y + plot.h
    for i, v in enumerate(values):
        x = plot.x + i * band + band * 0.125
        y1 = min(zero, scale(v))
        parts.append(f'<rect x="{_fmt(x)}" y="{_fmt(y1)}" width="{_fmt(band * 0.75)}" '
                     f'height="{_fmt(abs(zero - scale(v)))}" '
                     f'fill="{opts.colors.bar}" stroke="{opts.colors.border}"/>')
    return parts


def _draw_line(spec, plot):
    opts = spec.options
    rows = spec.data.rows
    labels = [str(r[0]) for r in rows]
    values = _first_values(rows)
    log = opts.y_scale == "log"
    scale = _ValueScale(min(values + ([0] if not log else [])), max(values),
                        plot.y + plot.h, plot.y, log)
    parts = _axes_categorical(spec, plot, labels, scale, opts)
    band = plot.w / len(rows)
    points = " ".join(
        f"{_fmt(plot.x + (i + 0.5) * band)},{_fmt(scale(v))}" for i, v in enumerate(values))
    parts.append(f'<polyline points="{points}" fill="none" '
                 f'stroke="{opts.colors.line}" stroke-width="2"/>')
    for i, v in enumerate(values):
        parts.append(f'<circle cx="{_fmt(plot.x + (i + 0.5) * band)}" cy="{_fmt(scale(v))}" '
                     f'r="4" fill="{opts.colors.marker}"/>')
    return parts


def _palette(opts):
    return (opts.colors.bar, opts.colors.line, opts.colors.marker) + _EXTRA_PALETTE


def _draw_pie(spec, plot, inner_frac=0.0):
    opts = spec.options
    rows = spec.data.rows
    values = _first_values(rows)
    total = sum(values)
    cx, cy = plot.x + plot.w / 2, plot.y + plot.h / 2
    radius = min(plot.w, plot.h) / 2 - 10
    inner = radius * inner_frac
    palette = _palette(opts)
    parts = []
    if total <= 0:
        parts.append(_text(cx, cy, "no positive values", 16, anchor="middle"))
        return parts
    angle = -math.pi / 2
    for i, v in enumerate(values):
        frac = v / total
        a0, a1 = angle, angle + frac * 2 * math.pi
        angle = a1
        if frac <= 0:
            continue
        color = palette[i % len(palette)]
        large = 1 if (a1 - a0) > math.pi else 0
        x0, y0 = cx + radius * math.cos(a0), cy + radius * math.sin(a0)
        x1, y1 = cx + radius * math.cos(a1), cy + radius * math.sin(a1)
        if frac >= 0.999999:
            parts.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(radius)}" '
                         f'fill="{color}" stroke="{opts.colors.border}"/>')
            continue
        if inner > 0:
            xi0, yi0 = cx + inner * math.cos(a1), cy + inner * math.sin(a1)
            xi1, yi1 = cx + inner * math.cos(a0), cy + inner * math.sin(a0)
            d = (f"M {_fmt(x0)} {_fmt(y0)} "
                 f"A {_fmt(radius)} {_fmt(radius)} 0 {large} 1 {_fmt(x1)} {_fmt(y1)} "
                 f"L {_fmt(xi0)} {_fmt(yi0)} "
                 f"A {_fmt(inner)} {_fmt(inner)} 0 {large} 0 {_fmt(xi1)} {_fmt(yi1)} Z")
        else:
            d = (f"M {_fmt(cx)} {_fmt(cy)} L {_fmt(x0)} {_fmt(y0)} "
                 f"A {_fmt(radius)} {_fmt(radius)} 0 {large} 1 {_fmt(x1)} {_fmt(y1)} Z")
        parts.append(f'<path d="{d}" fill="{color}" stroke="{opts.colors.border}"/>')
    return parts


def _draw_doughnut(spec, plot):
    return _draw_pie(spec, plot, inner_frac=0.55)


def _list_rows(spec):
    """(label, values list) rows for distribution charts."""
    out = []
    for row in spec.data.rows:
        values = row[1] if isinstance(row[1], list) else [v for v in row[1:]]
        out.append((str(row[0]), [float(v) for v in values]))
    return out


def _dist_scale(spec, plot):
    rows = _list_rows(spec)
    all_values = [v for _, vs in rows for v in vs]
    log = spec.options.y_scale == "log"
    lo = min(all_values) if all_values else 0
    hi = max(all_values) if all_values else 1
    if not log:
        lo = min(lo, 0)
    return rows, _ValueScale(lo, hi, plot.y + plot.h, plot.y, log)


def _draw_box(spec, plot):
    opts = spec.options
    rows, scale = _dist_scale(spec, plot)
    parts = _axes_categorical(spec, plot, [l for l, _ in rows], scale, opts)
    band = plot.w / len(rows)
    for i, (_, values) in enumerate(rows):
        if not values:
            continue
        cx = plot.x + (i + 0.5) * band
        half = band * 0.3
        q1, q2, q3 = (float(np.percentile(values, p)) for p in (25, 50, 75))
        lo, hi = min(values), max(values)
        parts.append(f'<line x1="{_fmt(cx)}" y1="{_fmt(scale(lo))}" x2="{_fmt(cx)}" '
                     f'y2="{_fmt(scale(hi))}" stroke="{opts.colors.border}" stroke-width="1"/>')
        parts.append(f'<rect x="{_fmt(cx - half)}" y="{_fmt(scale(q3))}" '
                     f'width="{_fmt(2 * half)}" height="{_fmt(abs(scale(q1) - scale(q3)))}" '
                     f'fill="{opts.colors.bar}" stroke="{opts.colors.border}"/>')
        parts.append(f'<line x1="{_fmt(cx - half)}" y1="{_fmt(scale(q2))}" '
                     f'x2="{_fmt(cx + half)}" y2="{_fmt(scale(q2))}" '
                     f'stroke="{opts.colors.border}" stroke-width="2"/>')
        for edge in (lo, hi):
            parts.append(f'<line x1="{_fmt(cx - half / 2)}" y1="{_fmt(scale(edge))}" '
                         f'x2="{_fmt(cx + half / 2)}" y2="{_fmt(scale(edge))}" '
                         f'stroke="{opts.colors.border}" stroke-width="1"/>')
    return parts


def _silverman_bandwidth(values) -> float:
    n = len(values)
    if n < 2:
        return 1.0
    std = float(np.std(values, ddof=1))
    iqr = float(np.percentile(values, 75) - np.percentile(values, 25))
    spread = min(std, iqr / 1.34) if iqr > 0 else std
    if spread <= 0:
        return 1.0
    return 0.9 * spread * n ** (-0.2)


def _draw_violin(spec, plot):
    opts = spec.options
    rows, scale = _dist_scale(spec, plot)
    parts = _axes_categorical(spec, plot, [l for l, _ in rows], scale, opts)
    band = plot.w / len(rows)
    for i, (_, values) in enumerate(rows):
        if not values:
            continue
        cx = plot.x + (i + 0.5) * band
        if max(values) == min(values):
            y = scale(values[0])
            parts.append(f'<rect x="{_fmt(cx - band * 0.3)}" y="{_fmt(y - 2)}" '
                         f'width="{_fmt(band * 0.6)}" height="4" fill="{opts.colors.bar}"/>')
            continue
        bw = _silverman_bandwidth(values)
        grid = np.linspace(min(values) - 3 * bw, max(values) + 3 * bw, 41)
        arr = np.array(values)
        dens = np.exp(-0.5 * ((grid[:, None] - arr[None, :]) / bw) ** 2).sum(axis=1)
        dens /= dens.max()
        half = band * 0.38
        left = [(cx - dens[j] * half, scale(float(grid[j]))) for j in range(len(grid))]
        right = [(cx + dens[j] * half, scale(float(grid[j]))) for j in reversed(range(len(grid)))]
        points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in left + right)
        parts.append(f'<polygon points="{points}" fill="{opts.colors.bar}" '
                     f'fill-opacity="0.7" stroke="{opts.colors.border}"/>')
    return parts


def _draw_swarm(spec, plot):
    opts = spec.options
    rows, scale = _dist_scale(spec, plot)
    parts = _axes_categorical(spec, plot, [l for l, _ in rows], scale, opts)
    band = plot.w / len(rows)
    r = 4.0
    for i, (_, values) in enumerate(rows):
        cx = plot.x + (i + 0.5) * band
        placed = []
        for v in sorted(values):
            y = scale(v)
            offset = 0.0
            step = 0
            while True:
                candidate = cx + offset
                if all((candidate - px) ** 2 + (y - py) ** 2 >= (2 * r) ** 2
                       for px, py in placed):
                    break
                step += 1
                offset = (step + 1) // 2 * 2 * r * (1 if step % 2 else -1)
                if abs(offset) > band / 2 - r:
                    break
            placed.append((cx + offset if abs(offset) <= band / 2 - r else cx, y))
            px, py = placed[-1]
            parts.append(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="{_fmt(r)}" '
                         f'fill="{opts.colors.marker}" fill-opacity="0.85"/>')
    return parts


def _scatter_points(spec):
    """(x, y, series id) triples. Cluster results use their x/y columns;
    two-value rows use (v1, v2); single-value rows use (numeric label, v)."""
    data = spec.data
    points = []
    if data.kind == "document_clusters":
        ci = data.columns.index("cluster") + 1
        xi = data.columns.index("x") + 1
        yi = data.columns.index("y") + 1
        for row in data.rows:
            points.append((float(row[xi]), float(row[yi]), int(row[ci])))
        return points
    for row in data.rows:
        scalars = [v for v in row[1:] if isinstance(v, (int, float))]
        if len(scalars) >= 2:
            points.append((float(scalars[0]), float(scalars[1]), 0))
        elif scalars:
            try:
                x = float(str(row[0]))
            except ValueError:
                x = float(len(points))
            points.append((x, float(scalars[0]), 0))
    return points


def _draw_scatter(spec, plot):
    opts = spec.options
    points = _scatter_points(spec)
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    xscale = _ValueScale(min(xs), max(xs), plot.x, plot.x + plot.w,
                         opts.x_scale == "log")
    yscale = _ValueScale(min(ys), max(ys), plot.y + plot.h, plot.y,
                         opts.y_scale == "log")
    parts = [_frame(plot, opts)]
    for tv in yscale.ticks():
        y = yscale(tv)
        if plot.y - 1 <= y <= plot.y + plot.h + 1:
            if opts.grid_visible:
                parts.append(f'<line x1="{_fmt(plot.x)}" y1="{_fmt(y)}" '
                             f'x2="{_fmt(plot.x + plot.w)}" y2="{_fmt(y)}" '
                             f'stroke="#dddddd" stroke-width="1"/>')
            parts.append(_text(plot.x - 8, y + 4, _tick_label(tv),
                               opts.ticks.fontsize, anchor="end"))
    for tv in xscale.ticks():
        x = xscale(tv)
        if plot.x - 1 <= x <= plot.x + plot.w + 1:
            if opts.grid_visible:
                parts.append(f'<line x1="{_fmt(x)}" y1="{_fmt(plot.y)}" '
                             f'x2="{_fmt(x)}" y2="{_fmt(plot.y + plot.h)}" '
                             f'stroke="#dddddd" stroke-width="1"/>')
            parts.append(_text(x, plot.y + plot.h + 22, _tick_label(tv),
                               opts.ticks.fontsize, anchor="middle"))
    parts.append(_text(plot.x + plot.w / 2, CANVAS_H - 28, opts.labels.x_label,
                       opts.labels.fontsize, anchor="middle"))
    parts.append(_text(34, plot.y + plot.h / 2, opts.labels.y_label,
                       opts.labels.fontsize, anchor="middle", rotate=-90))
    palette = _palette(opts)
    for x, y, series in points:
        color = opts.colors.marker if series == 0 and spec.data.kind != "document_clusters" \
            else palette[series % len(palette)]
        parts.append(f'<circle cx="{_fmt(xscale(x))}" cy="{_fmt(yscale(y))}" r="5" '
                     f'fill="{color}" fill-opacity="0.85" stroke="{opts.colors.border}"/>')
    return parts


def _draw_stack(spec, plot):
    opts = spec.options
    data = spec.data
    rows = data.rows
    labels = [str(r[0]) for r in rows]
    totals = [sum(v for v in r[1:] if isinstance(v, (int, float))) for r in rows]
    scale = _ValueScale(0, max(totals + [1]), plot.y + plot.h, plot.y,
                        opts.y_scale == "log")
    parts = _axes_categorical(spec, plot, labels, scale, opts)
    band = plot.w / len(rows)
    palette = _palette(opts)
    for i, row in enumerate(rows):
        x = plot.x + i * band + band * 0.125
        running = 0.0
        for s, v in enumerate(row[1:]):
            if not isinstance(v, (int, float)) or v <= 0:
                continue
            y0 = scale(running)
            running += v
            y1 = scale(running)
            parts.append(f'<rect x="{_fmt(x)}" y="{_fmt(y1)}" width="{_fmt(band * 0.75)}" '
                         f'height="{_fmt(abs(y0 - y1))}" fill="{palette[s % len(palette)]}" '
                         f'stroke="{opts.colors.border}"/>')
    return parts


def _draw_wordcloud(spec, plot):
    opts = spec.options
    rows = spec.data.rows
    values = _first_values(rows)
    vmin, vmax = min(values), max(values)
    span = (vmax - vmin) or 1
    parts = []
    x, y = plot.x, plot.y + 50
    row_height = 0.0
    palette = _palette(opts)
    for i, row in enumerate(rows):
        size = 14 + 44 * (values[i] - vmin) / span
        width = 0.62 * size * len(str(row[0])) + 14
        if x + width > plot.x + plot.w and x > plot.x:
            x = plot.x
            y += row_height + 10
            row_height = 0.0
        if y > plot.y + plot.h:
            break
        parts.append(_text(x, y, row[0], int(size), fill=palette[i % len(palette)]))
        x += width
        row_height = max(row_height, size)
    return parts


def _network_edges(spec):
    """Edges from an edge-labelled result, or bipartite edges from a matrix
    result (row label x column)."""
    data = spec.data
    sep = data.meta.get("edge_separator")
    nodes = list(data.meta.get("nodes", []))
    edges = []
    if sep:
        for row in data.rows:
            u, _, v = str(row[0]).partition(sep)
            w = row[1] if isinstance(row[1], (int, float)) else 1
            edges.append((u, v, float(w)))
            for n in (u, v):
                if n not in nodes:
                    nodes.append(n)
    else:
        for row in data.rows:
            if str(row[0]) not in nodes:
                nodes.append(str(row[0]))
        for col in data.columns:
            name = f"[{col}]"
            if name not in nodes:
                nodes.append(name)
        for row in data.rows:
            for ci, col in enumerate(data.columns):
                v = row[ci + 1]
                if isinstance(v, (int, float)) and v > 0:
                    edges.append((str(row[0]), f"[{col}]", float(v)))
    return nodes, edges


def _draw_network(spec, plot):
    opts = spec.options
    nodes, edges = _network_edges(spec)
    nodes = sorted(set(nodes))
    cx, cy = plot.x + plot.w / 2, plot.y + plot.h / 2
    radius = min(plot.w, plot.h) / 2 - 50
    pos = {}
    for i, n in enumerate(nodes):
        a = -math.pi / 2 + 2 * math.pi * i / max(len(nodes), 1)
        pos[n] = (cx + radius * math.cos(a), cy + radius * math.sin(a))
    parts = []
    wmax = max((w for _, _, w in edges), default=1.0)
    for u, v, w in edges:
        if u not in pos or v not in pos:
            continue
        (x1, y1), (x2, y2) = pos[u], pos[v]
        parts.append(f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
                     f'stroke="{opts.colors.line}" stroke-opacity="0.6" '
                     f'stroke-width="{_fmt(1 + 3 * w / wmax)}"/>')
    communities = spec.data.meta.get("communities") or {}
    palette = _palette(opts)
    for n in nodes:
        x, y = pos[n]
        color = palette[communities[n] % len(palette)] if n in communities \
            else opts.colors.marker
        parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="8" fill="{color}" '
                     f'stroke="{opts.colors.border}"/>')
        anchor = "start" if x >= cx else "end"
        dx = 12 if x >= cx else -12
        parts.append(_text(x + dx, y + 4, n, opts.ticks.fontsize, anchor=anchor))
    return parts


def _draw_worldmap(spec, plot):
    """Tile cartogram: one labelled tile per country, fill intensity by
    value share. Real geographic outlines live in the browser UI."""
    opts = spec.options
    rows = sorted(spec.data.rows, key=lambda r: str(r[0]))
    values = {str(r[0]): (r[1] if isinstance(r[1], (int, float)) else 0) for r in rows}
    vmax = max(list(values.values()) + [1])
    cols = 6
    tile_w = plot.w / cols
    n_rows = math.ceil(len(rows) / cols) or 1
    tile_h = min(plot.h / n_rows, 90)
    parts = [_frame(plot, opts)]
    base = _hex_to_rgb(opts.colors.bar)
    for i, row in enumerate(rows):
        label = str(row[0])
        frac = values[label] / vmax
        fill = _rgb_to_hex(tuple(int(255 + (c - 255) * frac) for c in base))
        x = plot.x + (i % cols) * tile_w + 4
        y = plot.y + (i // cols) * tile_h + 4
        parts.append(f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(tile_w - 8)}" '
                     f'height="{_fmt(tile_h - 8)}" rx="6" fill="{fill}" '
                     f'stroke="{opts.colors.border}"/>')
        parts.append(_text(x + 8, y + 20, label, opts.ticks.fontsize))
        parts.append(_text(x + 8, y + 20 + opts.ticks.fontsize + 4,
                           _tick_label(values[label]), opts.ticks.fontsize, fill="#555555"))
    return parts


def _hex_to_rgb(color):
    h = color.lstrip("#")
    return tuple(int(h[i:i + 2], 16) for i in (0, 2, 4))


def _rgb_to_hex(rgb):
    return "#" + "".join(f"{max(0, min(255, c)):02x}" for c in rgb)


def _legend_entries(spec):
    """(label, color) pairs, or None when a legend adds nothing."""
    opts = spec.options
    data = spec.data
    palette = _palette(opts)
    if opts.chart_type in ("pie", "doughnut"):
        return [(str(r[0]), palette[i % len(palette)]) for i, r in enumerate(data.rows)]
    if opts.chart_type == "stack" and len(data.columns) > 1:
        return [(c, palette[i % len(palette)]) for i, c in enumerate(data.columns)]
    if opts.chart_type == "scatter" and data.kind == "document_clusters":
        clusters = sorted({int(r[data.columns.index("cluster") + 1]) for r in data.rows})
        return [(f"cluster {c}", palette[c % len(palette)]) for c in clusters]
    if opts.chart_type == "network" and data.meta.get("communities"):
        ids = sorted(set(data.meta["communities"].values()))
        return [(f"community {c}", palette[c % len(palette)]) for c in ids]
    return None


def _draw_legend(entries, plot, opts):
    x = plot.x + plot.w + 30
    y = plot.y + 10
    parts = []
    for i, (label, color) in enumerate(entries[:20]):
        yy = y + i * 24
        parts.append(f'<rect x="{_fmt(x)}" y="{_fmt(yy - 11)}" width="14" height="14" '
                     f'fill="{color}" stroke="{opts.colors.border}"/>')
        parts.append(_text(x + 22, yy, label, opts.ticks.fontsize))
    return parts


_DRAWERS = {
    "bar": _draw_bar,
    "line": _draw_line,
    "pie": _draw_pie,
    "doughnut": _draw_doughnut,
    "box": _draw_box,
    "violin": _draw_violin,
    "swarm": _draw_swarm,
    "scatter": _draw_scatter,
    "stack": _draw_stack,
    "wordcloud": _draw_wordcloud,
    "network": _draw_network,
    "worldmap": _draw_worldmap,
}
